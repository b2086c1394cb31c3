//! The continuum-limit study: `d_h` → lattice evolution → `p_h` → compare with the
//! fine-grid reference, over an `h`-sweep and a list of times.

use std::sync::Arc;

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::corpus::ProfileSpec;
use super::fit::{fit_rate_records, growth_fit, uniformity, GrowthFit, RateFit, Uniformity};
use super::quadrature_in_time;
use super::ExperimentRecord;
use crate::dynamics::{
    evolve_with, linear_flow, reference_solution, reference_trajectory, EvolutionConfig, Integrator,
    NlsParams, ReferenceConfig, ReferenceSolution,
};
use crate::error::{LnlsError, Result};
use crate::lattice::{continuum_l2_error, discretize, interpolate, ContinuumSampler, GridFunction, Lattice};
use crate::spectral::sobolev_norm;

/// Largest accepted relative change of a reported error when the reference
/// resolution is doubled.
pub const REFERENCE_INDEPENDENCE_TOL: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub dim: usize,
    pub params: NlsParams,
    pub u0: ProfileSpec,
    /// Strictly decreasing spacings `π/M`, all in `(0, 1]`.
    pub h_list: Vec<f64>,
    /// Increasing evaluation times `≥ 0`.
    pub times: Vec<f64>,
    pub reference: ReferenceConfig,
    pub integrator: Integrator,
    pub dt: f64,
    /// Midpoint-rule refinement per lattice cell for the continuum `L²` error.
    pub oversample: usize,
}

/// `π/8, π/16, …, π/2^{3+count-1}`.
pub fn dyadic_h_list(count: usize) -> Vec<f64> {
    (0..count).map(|i| std::f64::consts::PI / (8usize << i) as f64).collect()
}

impl Default for ConvergenceStudy {
    /// `d = 2`, defocusing cubic, wrapped Gaussian, `h = π/8 … π/128`, `t ∈ {0, ¼, ½, 1}`.
    fn default() -> Self {
        ConvergenceStudy {
            dim: 2,
            params: NlsParams { p: 3.0, lambda: 1.0 },
            u0: ProfileSpec::gaussian(),
            h_list: dyadic_h_list(5),
            times: vec![0.0, 0.25, 0.5, 1.0],
            reference: ReferenceConfig::new(256, 1e-3),
            integrator: Integrator::Strang,
            dt: 1e-3,
            oversample: 4,
        }
    }
}

impl ConvergenceStudy {
    /// The same study with the nonlinearity switched off.
    pub fn linearized(&self) -> Self {
        ConvergenceStudy { params: NlsParams::without_nonlinearity(self.params.p), ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dim) {
            return Err(LnlsError::domain(format!("d must be 1 or 2, got {}", self.dim)));
        }
        if self.h_list.len() < 3 {
            return Err(LnlsError::domain(format!(
                "≥ 3 spacings required for a rate fit, got {}",
                self.h_list.len()
            )));
        }
        if self.h_list.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(LnlsError::domain("h_list must be strictly decreasing"));
        }
        for &h in &self.h_list {
            if !(h > 0.0 && h <= 1.0) {
                return Err(LnlsError::domain(format!("spacings must lie in (0, 1], got h = {h}")));
            }
            Lattice::from_spacing(self.dim, h)?;
        }
        if self.times.is_empty() || self.times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) {
            return Err(LnlsError::domain("times must be a nonempty list of finite values ≥ 0"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(LnlsError::domain("times must be strictly increasing"));
        }
        if !(self.dt > 0.0) {
            return Err(LnlsError::domain(format!("dt > 0 required, got {}", self.dt)));
        }
        if self.oversample < 4 {
            return Err(LnlsError::domain(format!("oversample must be at least 4, got {}", self.oversample)));
        }
        if !self.params.is_linear() {
            NlsParams::new(self.params.p, self.params.lambda)?;
        }
        self.u0.validate(self.dim)
    }

    fn experiment(&self) -> &'static str {
        if self.params.is_linear() {
            "linear_convergence"
        } else {
            "convergence"
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    /// One record per `(h, t)`, ordered by `h` as given, then by `t`.
    pub records: Vec<ExperimentRecord>,
    /// Rate fit per time.
    pub fits: Vec<(f64, RateFit)>,
    /// Largest relative change of an error between the `R` and `2R` references.
    pub max_reference_change: f64,
    /// Set when the parameters lie outside the hypotheses of the continuum limit.
    pub outside_hypotheses: bool,
}

impl ConvergenceReport {
    pub fn errors_at(&self, t: f64) -> Vec<&ExperimentRecord> {
        self.records.iter().filter(|r| r.t == Some(t)).collect()
    }

    pub fn fit_at(&self, t: f64) -> Option<RateFit> {
        self.fits.iter().find(|(s, _)| *s == t).map(|(_, f)| *f)
    }
}

/// Lattice states `u_h(t)` from `d_h u0` at each of `times`.
fn lattice_states(
    u0: &dyn ContinuumSampler,
    lat: Lattice,
    params: &NlsParams,
    integrator: Integrator,
    dt: f64,
    times: &[f64],
) -> Result<Vec<GridFunction>> {
    let mut state = discretize(u0, lat);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let cfg = EvolutionConfig { dt, t_final: t - now, integrator, record_stride: 1 };
        state = evolve_with(&state, params, &cfg, |_, _, _| {})?;
        now = t;
        out.push(state.clone());
    }
    Ok(out)
}

/// `‖p_h u - U(t)u0‖` against the `2R` reference, and its relative change against the `R` one.
fn reference_error(u: &GridFunction, reference: &ReferenceSolution, oversample: usize) -> (f64, f64) {
    let fine = continuum_l2_error(u, &reference.fine, oversample);
    let coarse = continuum_l2_error(u, &reference.coarse, oversample);
    let change = if fine > 0.0 { (fine - coarse).abs() / fine } else { 0.0 };
    (fine, change)
}

/// Runs the study and fits a rate per time.
pub fn run_convergence(study: &ConvergenceStudy) -> Result<ConvergenceReport> {
    study.validate()?;
    let outside = study.params.warn_if_outside_range(study.dim);
    let u0 = study.u0.build(study.dim)?;
    info!("reference solve at R = {} for t = {:?}", study.reference.resolution, study.times);
    let refs = reference_trajectory(u0.as_ref(), &study.params, &study.times, &study.reference)?;
    let cells: Vec<Vec<(ExperimentRecord, f64)>> = study
        .h_list
        .par_iter()
        .map(|&h| {
            let lat = Lattice::from_spacing(study.dim, h)?;
            let states = lattice_states(u0.as_ref(), lat, &study.params, study.integrator, study.dt, &study.times)?;
            info!("h = {h:.5}: evolved to t = {}", study.times.last().unwrap());
            Ok(states
                .iter()
                .zip(&refs)
                .map(|(u, r)| {
                    let (err, change) = reference_error(u, r, study.oversample);
                    let rec = ExperimentRecord::new(study.experiment(), h, err)
                        .with_t(r.t)
                        .with_meta("d", study.dim)
                        .with_meta("p", study.params.p)
                        .with_meta("lambda", study.params.lambda)
                        .with_meta("q_star", study.params.default_q_star())
                        .with_meta("integrator", format!("{:?}", study.integrator).to_lowercase())
                        .with_meta("dt", study.dt)
                        .with_meta("profile", study.u0.name())
                        .with_meta("reference_self_difference", r.self_difference);
                    (rec, change)
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let mut records = Vec::new();
    let mut max_change: f64 = 0.0;
    for (rec, change) in cells.into_iter().flatten() {
        max_change = max_change.max(change);
        records.push(rec);
    }
    if max_change > REFERENCE_INDEPENDENCE_TOL {
        return Err(LnlsError::Accuracy(format!(
            "doubling the reference resolution changed a reported error by {:.2}% (> {}%)",
            100.0 * max_change,
            100.0 * REFERENCE_INDEPENDENCE_TOL
        )));
    }
    let fits = study
        .times
        .iter()
        .map(|&t| {
            let at: Vec<ExperimentRecord> = records.iter().filter(|r| r.t == Some(t)).cloned().collect();
            Ok((t, fit_rate_records(&at)?))
        })
        .collect::<Result<_>>()?;
    Ok(ConvergenceReport { records, fits, max_reference_change: max_change, outside_hypotheses: outside })
}

/// Per spacing, the spread over `t > 0` of `error / (√h·⟨t⟩)`; a pass means the
/// error grows at most like `⟨t⟩` up to the uniformity band.
pub fn linear_growth_check(report: &ConvergenceReport) -> Vec<(f64, Uniformity)> {
    let mut hs: Vec<f64> = report.records.iter().map(|r| r.h).collect();
    hs.dedup();
    hs.into_iter()
        .map(|h| {
            let scaled: Vec<f64> = report
                .records
                .iter()
                .filter(|r| r.h == h && r.t.is_some_and(|t| t > 0.0))
                .map(|r| {
                    let t = r.t.unwrap();
                    r.value / (h.sqrt() * (1.0 + t * t).sqrt())
                })
                .collect();
            (h, uniformity(&scaled))
        })
        .collect()
}

/// [`growth_fit`] of `error/√h` against `t` at one spacing.
pub fn growth_at(report: &ConvergenceReport, h: f64) -> Result<GrowthFit> {
    let (t, e): (Vec<f64>, Vec<f64>) = report
        .records
        .iter()
        .filter(|r| r.h == h)
        .map(|r| (r.t.unwrap_or(0.0), r.value / h.sqrt()))
        .unzip();
    growth_fit(&t, &e)
}

/// Measured sizes of the four terms of the Duhamel error splitting at one `(h, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorDecomposition {
    pub h: f64,
    pub t: f64,
    /// `‖p_h e^{itΔ_h} d_h u0 - e^{itΔ} u0‖`, measured directly.
    pub i1: f64,
    /// `√h ∫_0^t (t-s) ‖u_h‖_∞^{p-1} ‖u_h‖_{H_h^1} ds`.
    pub i2: f64,
    /// `∫_0^t ‖p_h(|u_h|^{p-1}u_h) - |p_h u_h|^{p-1} p_h u_h‖ ds`.
    pub i3: f64,
    /// `∫_0^t (‖u_h‖_∞ + ‖u‖_∞)^{p-1} ‖p_h u_h - u‖ ds`.
    pub i4: f64,
    /// The `I₃` integrand at `s = t` over `h·‖u_h‖_∞^{p-1}‖u_h‖_{H_h^1}`.
    pub i3_ratio: f64,
}

/// Evaluates the four error terms with `quad_intervals` (even) Simpson panels in `s`.
pub fn decompose_error(study: &ConvergenceStudy, h: f64, t: f64, quad_intervals: usize) -> Result<ErrorDecomposition> {
    study.validate()?;
    if quad_intervals < 2 || quad_intervals % 2 == 1 {
        return Err(LnlsError::domain(format!("quad_intervals must be even and ≥ 2, got {quad_intervals}")));
    }
    if !(t >= 0.0) {
        return Err(LnlsError::domain(format!("t ≥ 0 required, got {t}")));
    }
    let lat = Lattice::from_spacing(study.dim, h)?;
    let u0: Arc<dyn ContinuumSampler> = study.u0.build(study.dim)?;
    let params = study.params;
    let os = study.oversample;

    let free = NlsParams::without_nonlinearity(params.p);
    let free_ref = reference_solution(u0.as_ref(), &free, t, &study.reference)?;
    let i1 = continuum_l2_error(&linear_flow(&discretize(u0.as_ref(), lat), t), &free_ref.fine, os);
    if t == 0.0 || params.is_linear() {
        return Ok(ErrorDecomposition { h, t, i1, i2: 0.0, i3: 0.0, i4: 0.0, i3_ratio: 0.0 });
    }

    let nodes: Vec<f64> = (0..=quad_intervals).map(|i| t * i as f64 / quad_intervals as f64).collect();
    let states = lattice_states(u0.as_ref(), lat, &params, study.integrator, study.dt, &nodes)?;
    let refs = reference_trajectory(u0.as_ref(), &params, &nodes, &study.reference)?;
    let n = lat.side() * os;
    let offset = [0.5, 0.5];
    let offset = &offset[..study.dim];
    let cell = (2.0 * std::f64::consts::PI / n as f64).powi(study.dim as i32);
    let pm1 = params.p - 1.0;
    let lam = params.lambda.abs();

    let mut f2 = Vec::new();
    let mut f3 = Vec::new();
    let mut f4 = Vec::new();
    let mut last_ratio = 0.0;
    for ((&s, u), r) in nodes.iter().zip(&states).zip(&refs) {
        let sup = u.sup_norm();
        let a = sup.powf(pm1) * sobolev_norm(u, 1.0);
        f2.push(lam * h.sqrt() * (t - s) * a);

        let pu = interpolate(u).sample_grid(n, offset);
        let pn = interpolate(&u.map(|z| params.nonlinearity(z))).sample_grid(n, offset);
        let gap: f64 = pn.iter().zip(&pu).map(|(a, b)| (a - params.nonlinearity(*b)).norm_sqr()).sum();
        let gap = (gap * cell).sqrt();
        f3.push(lam * gap);
        last_ratio = if a > 0.0 { gap / (h * a) } else { 0.0 };

        let uref = r.fine.sample_grid(n, offset);
        let ref_sup = uref.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let dist: f64 = pu.iter().zip(&uref).map(|(a, b)| (a - b).norm_sqr()).sum();
        f4.push(lam * (sup + ref_sup).powf(pm1) * (dist * cell).sqrt());
    }
    let ds = t / quad_intervals as f64;
    Ok(ErrorDecomposition {
        h,
        t,
        i1,
        i2: quadrature_in_time(&f2, ds),
        i3: quadrature_in_time(&f3, ds),
        i4: quadrature_in_time(&f4, ds),
        i3_ratio: last_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::DEFAULT_OVERSAMPLE;

    fn small_study() -> ConvergenceStudy {
        ConvergenceStudy {
            dim: 1,
            h_list: dyadic_h_list(3),
            times: vec![0.0, 0.1],
            dt: 1e-3,
            reference: ReferenceConfig::new(256, 1e-3),
            ..ConvergenceStudy::default()
        }
    }

    #[test]
    fn validation_messages() {
        let mut s = small_study();
        s.h_list.truncate(2);
        assert!(s.validate().unwrap_err().to_string().contains("≥ 3 spacings required"));
        let mut s = small_study();
        s.h_list.swap(0, 1);
        assert!(s.validate().is_err());
        let mut s = small_study();
        s.times = vec![0.5, 0.25];
        assert!(s.validate().is_err());
        let mut s = small_study();
        s.params = NlsParams { p: 0.5, lambda: 1.0 };
        assert!(s.validate().unwrap_err().to_string().contains("p > 1 required"));
        assert!(small_study().validate().is_ok());
    }

    #[test]
    fn time_zero_column_is_the_interpolation_error() {
        let s = small_study();
        let rep = run_convergence(&s).unwrap();
        let u0 = s.u0.build(1).unwrap();
        for r in rep.errors_at(0.0) {
            let lat = Lattice::from_spacing(1, r.h).unwrap();
            let direct = continuum_l2_error(&discretize(u0.as_ref(), lat), u0.as_ref(), s.oversample);
            assert!((r.value - direct).abs() <= 1e-8 * direct, "{} vs {direct}", r.value);
        }
        assert!(rep.max_reference_change < 1e-3);
        assert_eq!(rep.records.len(), 6);
        assert!(rep.fit_at(0.1).unwrap().slope > 0.5);
    }

    #[test]
    fn decomposition_vanishes_at_time_zero() {
        let s = small_study();
        let d = decompose_error(&s, s.h_list[0], 0.0, 4).unwrap();
        assert_eq!((d.i2, d.i3, d.i4), (0.0, 0.0, 0.0));
        let u0 = s.u0.build(1).unwrap();
        let lat = Lattice::from_spacing(1, s.h_list[0]).unwrap();
        let direct = continuum_l2_error(&discretize(u0.as_ref(), lat), u0.as_ref(), DEFAULT_OVERSAMPLE);
        assert!((d.i1 - direct).abs() < 0.05 * direct);
    }

    #[test]
    fn decomposition_terms_shrink_with_h() {
        let s = small_study();
        let coarse = decompose_error(&s, s.h_list[0], 0.1, 4).unwrap();
        let fine = decompose_error(&s, s.h_list[2], 0.1, 4).unwrap();
        assert!(fine.i1 < coarse.i1 && fine.i2 < coarse.i2 && fine.i3 < coarse.i3 && fine.i4 < coarse.i4);
        assert!(coarse.i3_ratio.is_finite() && coarse.i3_ratio > 0.0);
    }
}
