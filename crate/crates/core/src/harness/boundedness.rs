//! Uniform-in-`h` bounds: `d_h` and `p_h` in `H¹`, the interpolation error
//! `(p_h∘d_h)f - f`, and the time-averaged `L_h^∞` bound of nonlinear solutions.

use rayon::prelude::*;

use super::corpus::{continuum_sobolev_norm, ProfileSpec};
use super::quadrature_in_time;
use super::ExperimentRecord;
use crate::dynamics::{evolve_with, EvolutionConfig, NlsParams};
use crate::error::{LnlsError, Result};
use crate::lattice::{continuum_l2_error, discretize, interpolate, Lattice};
use crate::spectral::sobolev_norm;

/// Points per axis for continuum `H¹` norms of corpus profiles.
const CONTINUUM_NORM_RESOLUTION: usize = 256;

fn cells(dim: usize, specs: &[ProfileSpec], h_list: &[f64]) -> Result<Vec<(usize, Lattice)>> {
    let mut out = Vec::new();
    for (i, s) in specs.iter().enumerate() {
        s.validate(dim)?;
        for &h in h_list {
            out.push((i, Lattice::from_spacing(dim, h)?));
        }
    }
    Ok(out)
}

/// Per `(f, h)`: `‖d_h f‖_{H_h^1}/‖f‖_{H¹}` ("discretization_bound") and
/// `‖p_h f_h‖_{H¹}/‖f_h‖_{H_h^1}` with `f_h = d_h f` ("interpolation_bound").
///
/// In `d = 2` the `H¹` norm of `p_h f_h` is the broken one (cellwise gradient).
/// The zero function yields value-0 records without a ratio, flagged `skipped`.
pub fn boundedness_sweep(dim: usize, specs: &[ProfileSpec], h_list: &[f64]) -> Result<Vec<ExperimentRecord>> {
    let grid = cells(dim, specs, h_list)?;
    let out: Vec<Vec<ExperimentRecord>> = grid
        .par_iter()
        .map(|(i, lat)| {
            let spec = &specs[*i];
            let f = spec.build(dim)?;
            let h = lat.spacing();
            let f_norm = continuum_sobolev_norm(f.as_ref(), 1.0, CONTINUUM_NORM_RESOLUTION);
            let fh = discretize(f.as_ref(), *lat);
            let fh_norm = sobolev_norm(&fh, 1.0);
            let ph_norm = interpolate(&fh).broken_h1_norm();
            let rec = |name: &str, value: f64, denom: f64| {
                let r = ExperimentRecord::new(name, h, value).with_meta("profile", spec.name()).with_meta("d", dim);
                if denom > 0.0 {
                    r.with_ratio(value / denom)
                } else {
                    r.with_meta("skipped", "zero_function")
                }
            };
            Ok(vec![
                rec("discretization_bound", fh_norm, f_norm),
                rec("interpolation_bound", ph_norm, fh_norm),
            ])
        })
        .collect::<Result<_>>()?;
    Ok(out.into_iter().flatten().collect())
}

/// Per `(f, h)`: `value = ‖(p_h∘d_h)f - f‖_{L²}`, `ratio = value/(h‖f‖_{H¹})`.
pub fn interpolation_error_sweep(
    dim: usize,
    specs: &[ProfileSpec],
    h_list: &[f64],
    oversample: usize,
) -> Result<Vec<ExperimentRecord>> {
    let grid = cells(dim, specs, h_list)?;
    grid.par_iter()
        .map(|(i, lat)| {
            let spec = &specs[*i];
            let f = spec.build(dim)?;
            let h = lat.spacing();
            let err = continuum_l2_error(&discretize(f.as_ref(), *lat), f.as_ref(), oversample);
            let norm = continuum_sobolev_norm(f.as_ref(), 1.0, CONTINUUM_NORM_RESOLUTION);
            let r = ExperimentRecord::new("interpolation_error", h, err)
                .with_meta("profile", spec.name())
                .with_meta("d", dim);
            Ok(if norm > 0.0 { r.with_ratio(err / (h * norm)) } else { r.with_meta("skipped", "zero_function") })
        })
        .collect()
}

/// Settings of the time-averaged `L_h^∞` study.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LinfAverageConfig {
    pub params: NlsParams,
    pub t_final: f64,
    pub dt: f64,
    pub q_star: f64,
}

impl LinfAverageConfig {
    /// Defocusing cubic on `[0, 5]` with `q_* = 3`.
    pub fn defocusing_cubic() -> Self {
        let params = NlsParams { p: 3.0, lambda: 1.0 };
        LinfAverageConfig { params, t_final: 5.0, dt: 5e-3, q_star: params.default_q_star() }
    }
}

/// Per `(f, h)`: `value = (∫_0^T ‖u_h(t)‖_{L_h^∞}^{q_*} dt)^{1/q_*}` for the Strang
/// solution from `d_h f`, `ratio = value / (⟨T⟩^{1/q_*} ‖d_h f‖_{H_h^1})`.
pub fn linf_average_sweep(
    dim: usize,
    specs: &[ProfileSpec],
    h_list: &[f64],
    cfg: &LinfAverageConfig,
) -> Result<Vec<ExperimentRecord>> {
    if !(cfg.q_star >= 1.0 && cfg.q_star.is_finite()) {
        return Err(LnlsError::domain(format!("q_* must be a finite exponent ≥ 1, got {}", cfg.q_star)));
    }
    let evo = EvolutionConfig::strang(cfg.dt, cfg.t_final);
    evo.validate()?;
    let grid = cells(dim, specs, h_list)?;
    grid.par_iter()
        .map(|(i, lat)| {
            let spec = &specs[*i];
            let u0 = discretize(spec.build(dim)?.as_ref(), *lat);
            let mut sups = Vec::with_capacity(evo.n_steps() + 1);
            evolve_with(&u0, &cfg.params, &evo, |_, _, u| sups.push(u.sup_norm().powf(cfg.q_star)))?;
            let value = quadrature_in_time(&sups, evo.effective_dt()).powf(1.0 / cfg.q_star);
            let bracket = (1.0 + cfg.t_final * cfg.t_final).sqrt();
            let denom = bracket.powf(1.0 / cfg.q_star) * sobolev_norm(&u0, 1.0);
            let r = ExperimentRecord::new("linf_average", lat.spacing(), value)
                .with_t(cfg.t_final)
                .with_q(cfg.q_star)
                .with_r(f64::INFINITY)
                .with_meta("profile", spec.name())
                .with_meta("d", dim)
                .with_meta("p", cfg.params.p)
                .with_meta("lambda", cfg.params.lambda)
                .with_meta("q_star", cfg.q_star)
                .with_meta("dt", evo.effective_dt());
            Ok(if denom > 0.0 { r.with_ratio(value / denom) } else { r.with_meta("skipped", "zero_function") })
        })
        .collect()
}
