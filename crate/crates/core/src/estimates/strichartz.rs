//! Mixed space-time norms of the free flow and the uniform Strichartz sweep.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::quadrature::simpson;
use super::AdmissiblePair;
use crate::error::{LnlsError, Result};
use crate::harness::ExperimentRecord;
use crate::lattice::{GridFunction, Lattice};
use crate::spectral::{fft_nd, laplacian_symbol, sobolev_norm, symbol_to_bins};

/// Simpson nodes on `[0, 1]`; the self-check reruns on the doubled grid.
pub const STRICHARTZ_T_NODES: usize = 257;

const SELF_CHECK_TOL: f64 = 0.01;

/// Builds the corpus on a given lattice, so that the same continuum profiles
/// are compared at every spacing.
pub type CorpusBuilder = dyn Fn(&Lattice) -> Vec<(String, GridFunction)> + Send + Sync;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzQuery {
    pub pair: AdmissiblePair,
    pub epsilon: f64,
    pub h_sweep: Vec<f64>,
    pub t_nodes: usize,
}

impl StrichartzQuery {
    pub fn new(pair: AdmissiblePair, epsilon: f64, h_sweep: Vec<f64>) -> Result<Self> {
        let q = StrichartzQuery { pair, epsilon, h_sweep, t_nodes: STRICHARTZ_T_NODES };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) {
            return Err(LnlsError::domain(format!("ε > 0 required, got ε = {}", self.epsilon)));
        }
        if let Some(h) = self.h_sweep.iter().find(|&&h| !(h > 0.0 && h <= 1.0)) {
            return Err(LnlsError::domain(format!("spacings must lie in (0, 1], got h = {h}")));
        }
        check_nodes(self.t_nodes)
    }
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(LnlsError::domain(format!("time quadrature needs an odd node count ≥ 3, got {n}")));
    }
    Ok(())
}

fn raw_norm(values: &[Complex64], r: f64, vol: f64) -> f64 {
    let sup = values.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r.is_infinite() || sup == 0.0 {
        return sup;
    }
    if r == 2.0 {
        return (values.iter().map(|z| z.norm_sqr()).sum::<f64>() * vol).sqrt();
    }
    let s: f64 = values.iter().map(|z| (z.norm() / sup).powf(r)).sum();
    sup * (s * vol).powf(1.0 / r)
}

/// `t ↦ ‖e^{itΔ_h}u0‖_{L_h^r}` at `n` equispaced nodes of `[0, 1]`.
fn norm_profile(u0: &GridFunction, r: f64, n: usize) -> Vec<f64> {
    let lat = *u0.lattice();
    let sigma = symbol_to_bins(&lat, laplacian_symbol(lat).symbol());
    let mut spec = u0.values().to_vec();
    fft_nd(&mut spec, lat.side(), lat.dim(), FftDirection::Forward);
    let inv_n = 1.0 / lat.n_points() as f64;
    let vol = lat.cell_volume();
    let mut buf = vec![Complex64::new(0.0, 0.0); spec.len()];
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            for ((b, s), sg) in buf.iter_mut().zip(&spec).zip(&sigma) {
                *b = s * Complex64::from_polar(inv_n, -t * sg.re);
            }
            fft_nd(&mut buf, lat.side(), lat.dim(), FftDirection::Inverse);
            raw_norm(&buf, r, vol)
        })
        .collect()
}

/// `‖e^{itΔ_h}u0‖_{L_t^q([0,1]; L_h^r)}` by composite Simpson on `t_nodes` nodes.
///
/// The flow is also evaluated on the doubled grid; if the two quadratures differ by
/// more than 1% the result is rejected as under-resolved. For `q = ∞` the sup over
/// the doubled grid is returned.
pub fn mixed_norm(u0: &GridFunction, q: f64, r: f64, t_nodes: usize) -> Result<f64> {
    check_nodes(t_nodes)?;
    if !(q >= 1.0 && r >= 1.0) {
        return Err(LnlsError::domain(format!("mixed norm exponents must be ≥ 1, got q = {q}, r = {r}")));
    }
    let fine_n = 2 * t_nodes - 1;
    let fine = norm_profile(u0, r, fine_n);
    let coarse: Vec<f64> = fine.iter().step_by(2).copied().collect();
    let (a, b) = if q.is_infinite() {
        let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
        (max(&coarse), max(&fine))
    } else {
        let integrate = |v: &[f64], dt: f64| {
            let powered: Vec<f64> = v.iter().map(|x| x.powf(q)).collect();
            simpson(&powered, dt).max(0.0).powf(1.0 / q)
        };
        (integrate(&coarse, 1.0 / (t_nodes - 1) as f64), integrate(&fine, 1.0 / (fine_n - 1) as f64))
    };
    if b > 0.0 && (a - b).abs() > SELF_CHECK_TOL * b {
        return Err(LnlsError::Accuracy(format!(
            "L^{q}_t L^{r}_h quadrature changed by {:.2}% when doubling {t_nodes} time nodes",
            100.0 * (a - b).abs() / b
        )));
    }
    Ok(b)
}

fn lattices(dim: usize, h_sweep: &[f64]) -> Result<Vec<Lattice>> {
    h_sweep.iter().map(|&h| Lattice::from_spacing(dim, h)).collect()
}

/// One record per `(h, corpus element)`:
/// `ratio = ‖e^{itΔ_h}u0‖_{L_t^q L_h^r} / ‖⟨∇_h⟩^{2/q+ε}u0‖_{L_h^2}`.
pub fn strichartz_sweep(query: &StrichartzQuery, corpus: &CorpusBuilder) -> Result<Vec<ExperimentRecord>> {
    query.validate()?;
    let (q, r) = (query.pair.q(), query.pair.r());
    let s = 2.0 / q + query.epsilon;
    let cells = lattices(query.pair.dim(), &query.h_sweep)?;
    let per_h: Vec<Vec<ExperimentRecord>> = cells
        .par_iter()
        .map(|lat| {
            corpus(lat)
                .into_iter()
                .map(|(tag, u)| {
                    let mixed = mixed_norm(&u, q, r, query.t_nodes)?;
                    let weight = sobolev_norm(&u, s);
                    let ratio = if weight > 0.0 { mixed / weight } else { 0.0 };
                    Ok(ExperimentRecord::new("strichartz", lat.spacing(), mixed)
                        .with_q(q)
                        .with_r(r)
                        .with_epsilon(query.epsilon)
                        .with_ratio(ratio)
                        .with_meta("profile", tag)
                        .with_meta("d", lat.dim()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(per_h.into_iter().flatten().collect())
}

/// Time-averaged sup norms of the free flow against the `H_h^1` norm:
/// `ratio = ‖e^{itΔ_h}u0‖_{L_t^q([0,1]; L_h^∞)} / ‖u0‖_{H_h^1}` for each `q`.
pub fn linear_linf_sweep(
    dim: usize,
    h_sweep: &[f64],
    qs: &[f64],
    corpus: &CorpusBuilder,
    t_nodes: usize,
) -> Result<Vec<ExperimentRecord>> {
    check_nodes(t_nodes)?;
    let cells = lattices(dim, h_sweep)?;
    let per_h: Vec<Vec<ExperimentRecord>> = cells
        .par_iter()
        .map(|lat| {
            let mut out = Vec::new();
            for (tag, u) in corpus(lat) {
                let weight = sobolev_norm(&u, 1.0);
                for &q in qs {
                    let mixed = mixed_norm(&u, q, f64::INFINITY, t_nodes)?;
                    let ratio = if weight > 0.0 { mixed / weight } else { 0.0 };
                    out.push(
                        ExperimentRecord::new("linear_linf", lat.spacing(), mixed)
                            .with_q(q)
                            .with_r(f64::INFINITY)
                            .with_ratio(ratio)
                            .with_meta("profile", tag.clone())
                            .with_meta("d", dim),
                    );
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_h.into_iter().flatten().collect())
}
