//! The exact linear propagator and the one-step integrators.

use num_complex::Complex64;

use super::NlsParams;
use crate::error::{LnlsError, Result};
use crate::lattice::{discrete_laplacian_stencil, GridFunction, Lattice};
use crate::spectral::{
    apply_bin_symbol, dual_index, laplacian_symbol, slot_to_bin_map, symbol_to_bins,
};

/// `e^{itΔ_h}` for a fixed `t`, stored as its symbol `e^{-itσ_h(k)}` in FFT-bin order.
#[derive(Debug, Clone)]
pub struct LinearPropagator {
    lattice: Lattice,
    t: f64,
    bins: Vec<Complex64>,
}

impl LinearPropagator {
    pub fn new(lattice: Lattice, t: f64) -> Self {
        Self::with_symbol(lattice, t, laplacian_symbol(lattice).symbol())
    }

    /// Propagator for an arbitrary real symbol `σ` given in dual storage order.
    pub(crate) fn with_symbol(lattice: Lattice, t: f64, sigma: &[Complex64]) -> Self {
        let phases: Vec<Complex64> =
            sigma.iter().map(|s| Complex64::from_polar(1.0, -t * s.re)).collect();
        LinearPropagator { lattice, t, bins: symbol_to_bins(&lattice, &phases) }
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Zeroes the symbol at every dual index `k` with `drop(k)`.
    pub(crate) fn mask_bins(&mut self, lat: &Lattice, drop: impl Fn(&[i64; 2]) -> bool) {
        for (idx, &b) in slot_to_bin_map(lat).iter().enumerate() {
            if drop(&dual_index(lat, idx)) {
                self.bins[b] = Complex64::new(0.0, 0.0);
            }
        }
    }

    pub fn apply_in_place(&self, values: &mut [Complex64]) {
        apply_bin_symbol(values, &self.lattice, &self.bins);
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.lattice.check_same(u.lattice())?;
        let mut v = u.values().to_vec();
        self.apply_in_place(&mut v);
        Ok(GridFunction::from_raw(self.lattice, v))
    }
}

/// `e^{itΔ_h} u0`.
pub fn linear_flow(u0: &GridFunction, t: f64) -> GridFunction {
    LinearPropagator::new(*u0.lattice(), t).apply(u0).expect("same lattice")
}

pub(crate) fn phase_rotate(values: &mut [Complex64], params: &NlsParams, dt: f64) {
    if params.is_linear() {
        return;
    }
    for z in values.iter_mut() {
        let angle = -params.lambda * params.modulus_power(*z) * dt;
        *z *= Complex64::from_polar(1.0, angle);
    }
}

/// Exact flow of `i∂_t u = λ|u|^{p-1}u` over `dt`: `u ← u·e^{-iλ|u|^{p-1}dt}`.
pub fn nonlinear_phase_step(u: &GridFunction, params: &NlsParams, dt: f64) -> GridFunction {
    let mut v = u.values().to_vec();
    phase_rotate(&mut v, params, dt);
    GridFunction::from_raw(*u.lattice(), v)
}

/// A reusable single-step integrator with precomputed propagators.
#[derive(Debug, Clone)]
pub enum Stepper {
    Strang { params: NlsParams, dt: f64, linear: LinearPropagator },
    Rk4 { params: NlsParams, dt: f64, lattice: Lattice },
}

impl Stepper {
    pub fn strang(lattice: Lattice, params: NlsParams, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        Ok(Stepper::Strang { params, dt, linear: LinearPropagator::new(lattice, dt) })
    }

    /// RK4 requires `dt ≤ h²/(2d)`.
    pub fn rk4(lattice: Lattice, params: NlsParams, dt: f64) -> Result<Self> {
        check_dt(dt)?;
        let limit = rk4_limit(&lattice);
        if dt > limit {
            return Err(LnlsError::domain(format!(
                "RK4 step dt = {dt} exceeds the stability limit h²/(2d) = {limit}"
            )));
        }
        Ok(Stepper::Rk4 { params, dt, lattice })
    }

    pub fn dt(&self) -> f64 {
        match self {
            Stepper::Strang { dt, .. } | Stepper::Rk4 { dt, .. } => *dt,
        }
    }

    pub fn step_in_place(&self, values: &mut [Complex64]) -> Result<()> {
        match self {
            Stepper::Strang { params, dt, linear } => {
                phase_rotate(values, params, 0.5 * dt);
                linear.apply_in_place(values);
                phase_rotate(values, params, 0.5 * dt);
                Ok(())
            }
            Stepper::Rk4 { params, dt, lattice } => rk4_in_place(values, lattice, params, *dt),
        }
    }

    pub fn step(&self, u: &GridFunction) -> Result<GridFunction> {
        let mut v = u.values().to_vec();
        self.step_in_place(&mut v)?;
        Ok(GridFunction::from_raw(*u.lattice(), v))
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LnlsError::domain(format!("time step must be positive, got {dt}")));
    }
    Ok(())
}

pub(crate) fn rk4_limit(lat: &Lattice) -> f64 {
    0.5 * lat.spacing().powi(2) / lat.dim() as f64
}

/// `-i(-Δ_h u + λ|u|^{p-1}u)`.
fn vector_field(lat: Lattice, params: &NlsParams, u: &[Complex64]) -> Vec<Complex64> {
    let g = GridFunction::from_raw(lat, u.to_vec());
    let lap = discrete_laplacian_stencil(&g);
    let i = Complex64::new(0.0, 1.0);
    lap.values()
        .iter()
        .zip(u)
        .map(|(&l, &z)| i * (l - params.lambda * params.nonlinearity(z)))
        .collect()
}

fn rk4_in_place(values: &mut [Complex64], lat: &Lattice, params: &NlsParams, dt: f64) -> Result<()> {
    let norm0 = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let axpy = |a: &[Complex64], k: &[Complex64], s: f64| -> Vec<Complex64> {
        a.iter().zip(k).map(|(&x, &y)| x + y * s).collect()
    };
    let k1 = vector_field(*lat, params, values);
    let k2 = vector_field(*lat, params, &axpy(values, &k1, 0.5 * dt));
    let k3 = vector_field(*lat, params, &axpy(values, &k2, 0.5 * dt));
    let k4 = vector_field(*lat, params, &axpy(values, &k3, dt));
    for (i, z) in values.iter_mut().enumerate() {
        *z += (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) * (dt / 6.0);
    }
    let norm1 = values.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if !norm1.is_finite() || norm1 > 10.0 * norm0 {
        return Err(LnlsError::Instability(format!(
            "RK4 norm grew from {norm0:e} to {norm1:e} in one step of dt = {dt}"
        )));
    }
    Ok(())
}

/// One Strang step `N(dt/2) ∘ e^{i dt Δ_h} ∘ N(dt/2)`.
pub fn step_strang(u: &GridFunction, params: &NlsParams, dt: f64) -> Result<GridFunction> {
    Stepper::strang(*u.lattice(), *params, dt)?.step(u)
}

/// One classical RK4 step of `i∂_t u = -Δ_h u + λ|u|^{p-1}u`, with `Δ_h` the stencil.
pub fn step_rk4(u: &GridFunction, params: &NlsParams, dt: f64) -> Result<GridFunction> {
    Stepper::rk4(*u.lattice(), *params, dt)?.step(u)
}
