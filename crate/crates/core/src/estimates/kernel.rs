//! The frequency-localized free kernel
//! `K_{N,t}(x) = (2π)^{-d} Π_j Σ_{|k_j| ≤ πN/h} e^{i(x_j k_j - (2t/h²)(1 - cos h k_j))}`
//! and the short-time dispersive sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::log_space;
use super::oscillatory::phase;
use crate::dynamics::linear_flow;
use crate::error::{LnlsError, Result};
use crate::harness::ExperimentRecord;
use crate::lattice::{GridFunction, Lattice};
use crate::spectral::{lp_project, DyadicScale};

/// One `(h, N)` cell of the dispersive sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelQuery {
    pub lattice: Lattice,
    pub scale: DyadicScale,
    /// Times are restricted to `0 < t ≤ c·h/N`.
    pub c: f64,
    /// Log-spaced times in `[10⁻⁴·c·h/N, c·h/N]`.
    pub t_samples: usize,
}

impl KernelQuery {
    pub fn new(lattice: Lattice, scale: DyadicScale) -> Self {
        KernelQuery { lattice, scale, c: 0.1, t_samples: 64 }
    }

    pub fn with_c(mut self, c: f64) -> Self {
        self.c = c;
        self
    }

    pub fn with_t_samples(mut self, n: usize) -> Self {
        self.t_samples = n;
        self
    }

    /// `c·h/N`.
    pub fn time_window(&self) -> f64 {
        self.c * self.lattice.spacing() / self.scale.value()
    }

    fn validate(&self) -> Result<()> {
        DyadicScale::new(&self.lattice, self.scale.exponent())?;
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(LnlsError::domain(format!("small-time constant c must be positive, got {}", self.c)));
        }
        if self.t_samples == 0 {
            return Err(LnlsError::domain("t_samples must be positive"));
        }
        Ok(())
    }

    fn kmax(&self) -> i64 {
        self.scale.outer_radius(&self.lattice).floor() as i64
    }
}

fn axis_sum(kmax: i64, h: f64, t: f64, x: f64) -> Complex64 {
    (-kmax..=kmax).map(|k| Complex64::from_polar(1.0, phase(x, t, h, k as f64))).sum()
}

/// `K_{N,t}(x)` by direct per-axis summation; `x` has one entry per axis.
pub fn dispersive_kernel(query: &KernelQuery, t: f64, x: &[f64]) -> Complex64 {
    let lat = &query.lattice;
    let h = lat.spacing();
    let kmax = query.kmax();
    let prod: Complex64 = x[..lat.dim()].iter().map(|&xj| axis_sum(kmax, h, t, xj)).product();
    prod * (2.0 * PI).powi(-(lat.dim() as i32))
}

/// The one-dimensional factor `Σ_{|k| ≤ πN/h} e^{iφ(k)}` at every lattice coordinate, in slot order.
fn axis_profile(query: &KernelQuery, t: f64) -> Vec<Complex64> {
    let lat = &query.lattice;
    let h = lat.spacing();
    let kmax = query.kmax();
    let coeffs: Vec<Complex64> =
        (-kmax..=kmax).map(|k| Complex64::from_polar(1.0, phase(0.0, t, h, k as f64))).collect();
    (0..lat.side())
        .map(|slot| {
            let x = lat.coordinate(slot);
            // e^{ikx} by recurrence from k = -kmax
            let step = Complex64::from_polar(1.0, x);
            let mut w = Complex64::from_polar(1.0, -(kmax as f64) * x);
            let mut acc = Complex64::new(0.0, 0.0);
            for c in &coeffs {
                acc += c * w;
                w *= step;
            }
            acc
        })
        .collect()
}

/// `sup_{x ∈ T_h} |K_{N,t}(x)|` for `d = 1`.
pub fn kernel_sup_1d(query: &KernelQuery, t: f64) -> f64 {
    axis_profile(query, t).iter().map(|z| z.norm()).fold(0.0, f64::max) / (2.0 * PI)
}

/// `K_{N,t}` sampled on the lattice as a grid function.
pub fn kernel_grid_function(query: &KernelQuery, t: f64) -> GridFunction {
    let lat = query.lattice;
    let axis = axis_profile(query, t);
    let scale = (2.0 * PI).powi(-(lat.dim() as i32));
    let values = (0..lat.n_points())
        .map(|idx| {
            let s = lat.unflat(idx);
            let v: Complex64 = s[..lat.dim()].iter().map(|&sj| axis[sj]).product();
            v * scale
        })
        .collect();
    GridFunction::new(lat, values).expect("lattice-sized")
}

/// One record per sampled time: `value = sup_x |K_{N,t}|`, `ratio = value·(ht/N)^{d/3}`.
///
/// The sup over the lattice tensorizes, so the `d = 2` sup is the square of the
/// one-dimensional one.
pub fn dispersive_bound_sweep(query: &KernelQuery) -> Result<Vec<ExperimentRecord>> {
    query.validate()?;
    let lat = &query.lattice;
    let d = lat.dim() as i32;
    let h = lat.spacing();
    let n = query.scale.value();
    let window = query.time_window();
    let times = log_space(1e-4 * window, window, query.t_samples);
    let records = times
        .par_iter()
        .map(|&t| {
            let sup = kernel_sup_1d(query, t).powi(d);
            let ratio = sup * (h * t / n).powf(d as f64 / 3.0);
            ExperimentRecord::new("dispersive", h, sup)
                .with_n(n)
                .with_t(t)
                .with_ratio(ratio)
                .with_meta("d", d)
                .with_meta("c", query.c)
        })
        .collect();
    Ok(records)
}

/// `‖e^{itΔ_h} P_{N_*} u‖_{L_h^∞} / ‖u‖_{L_h^2}`.
///
/// `P_{N_*}` keeps only the zero mode, so Cauchy–Schwarz bounds this by `(2π)^{-d/2}`.
pub fn lowest_scale_ratio(u: &GridFunction, t: f64) -> Result<f64> {
    let lat = *u.lattice();
    let low = lp_project(u, DyadicScale::lowest(&lat))?;
    let norm = u.l2_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    Ok(linear_flow(&low, t).sup_norm() / norm)
}
