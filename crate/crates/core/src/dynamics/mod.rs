//! Time evolution of the lattice NLS `i∂_t u + Δ_h u - λ|u|^{p-1}u = 0`.
//!
//! The linear part is propagated exactly in frequency space; the nonlinear part
//! `i∂_t u = λ|u|^{p-1}u` is an exact pointwise phase rotation. The default
//! integrator is Strang splitting of the two.

mod evolve;
mod integrators;
mod picard;
mod reference;

pub use evolve::{
    evolve, evolve_with, read_trajectory, write_trajectory, EvolutionConfig, Integrator,
    Trajectory, TrajectoryManifest,
};
pub use integrators::{
    linear_flow, nonlinear_phase_step, step_rk4, step_strang, LinearPropagator, Stepper,
};
pub use picard::{contraction_factor, picard_iterate, picard_iterate_detailed, PicardOutcome};
pub use reference::{
    reference_solution, reference_trajectory, ReferenceConfig, ReferenceSolution, SpectralSampler,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LnlsError, Result};
use crate::lattice::GridFunction;
use crate::spectral::{forward, laplacian_symbol};

/// Nonlinearity exponent `p > 1` and sign `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NlsParams {
    pub p: f64,
    /// `+1` defocusing, `-1` focusing; `0` only through [`NlsParams::without_nonlinearity`].
    pub lambda: f64,
}

impl NlsParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(LnlsError::domain(format!("p > 1 required, got p = {p}")));
        }
        if lambda != 1.0 && lambda != -1.0 {
            return Err(LnlsError::domain(format!("λ must be +1 or -1, got {lambda}")));
        }
        Ok(NlsParams { p, lambda })
    }

    /// The free equation with exponent `p` kept for bookkeeping (`λ = 0`).
    pub fn without_nonlinearity(p: f64) -> Self {
        NlsParams { p, lambda: 0.0 }
    }

    pub fn is_linear(&self) -> bool {
        self.lambda == 0.0
    }

    pub fn is_focusing(&self) -> bool {
        self.lambda < 0.0
    }

    /// Whether the focusing continuum-limit hypothesis `1 < p < 3` fails in dimension `d`.
    pub fn outside_focusing_range(&self, d: usize) -> bool {
        self.is_focusing() && d == 2 && self.p >= 3.0
    }

    /// Logs a warning when [`NlsParams::outside_focusing_range`] holds.
    pub fn warn_if_outside_range(&self, d: usize) -> bool {
        let out = self.outside_focusing_range(d);
        if out {
            log::warn!(
                "focusing run with p = {} in d = 2 lies outside 1 < p < 3; the continuum limit is not covered",
                self.p
            );
        }
        out
    }

    /// `|z|^{p-1}`.
    #[inline]
    pub(crate) fn modulus_power(&self, z: Complex64) -> f64 {
        let m2 = z.norm_sqr();
        if self.p == 3.0 {
            m2
        } else if self.p == 5.0 {
            m2 * m2
        } else {
            m2.powf(0.5 * (self.p - 1.0))
        }
    }

    /// `|z|^{p-1} z`.
    #[inline]
    pub(crate) fn nonlinearity(&self, z: Complex64) -> Complex64 {
        z * self.modulus_power(z)
    }

    /// The exponent `q_*` of the time-averaged `L_h^∞` bound: 2 for `p < 3`, `p` otherwise.
    pub fn default_q_star(&self) -> f64 {
        if self.p < 3.0 {
            2.0
        } else {
            self.p
        }
    }
}

/// Mass and energy of a lattice state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservedQuantities {
    pub mass: f64,
    pub energy: f64,
}

/// `M_h = ‖u‖²` and `E_h = ½‖√(-Δ_h) u‖² + λ/(p+1) ‖u‖_{p+1}^{p+1}`.
pub fn conserved(u: &GridFunction, params: &NlsParams) -> ConservedQuantities {
    let lat = *u.lattice();
    let spec = forward(u);
    let sigma = laplacian_symbol(lat);
    let kinetic: f64 = spec
        .values()
        .iter()
        .zip(sigma.symbol())
        .map(|(z, s)| s.re * z.norm_sqr())
        .sum::<f64>()
        / (2.0 * PI).powi(lat.dim() as i32);
    let potential = if params.is_linear() {
        0.0
    } else {
        params.lambda / (params.p + 1.0) * u.norm(params.p + 1.0).powf(params.p + 1.0)
    };
    ConservedQuantities { mass: u.l2_norm().powi(2), energy: 0.5 * kinetic + potential }
}
