//! Measured-constant sweeps for the short-time dispersive estimate, the
//! oscillatory integrals behind it, and the uniform Strichartz estimates.
//!
//! Nothing here asserts a particular constant; each sweep emits ratios whose
//! variation across the `h`-sweep is what callers check.

mod kernel;
mod oscillatory;
mod quadrature;
mod strichartz;

pub use kernel::{
    dispersive_bound_sweep, dispersive_kernel, kernel_grid_function, kernel_sup_1d,
    lowest_scale_ratio, KernelQuery,
};
pub use oscillatory::{oscillatory_integral, phase_derivative_bound, zygmund_gap};
pub use quadrature::{gauss_kronrod_adaptive, simpson};
pub use strichartz::{
    linear_linf_sweep, mixed_norm, strichartz_sweep, CorpusBuilder, StrichartzQuery,
    STRICHARTZ_T_NODES,
};

use serde::{Deserialize, Serialize};

use crate::error::{LnlsError, Result};

const ADMISSIBLE_TOL: f64 = 1e-12;

/// A lattice-admissible exponent pair: `q, r ∈ [2, ∞]`, `3/q + d/r = d/2`, `(q, r, d) ≠ (2, ∞, 3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdmissiblePair {
    q: f64,
    r: f64,
    d: usize,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64, d: usize) -> Result<Self> {
        if !(q >= 2.0 && r >= 2.0) {
            return Err(LnlsError::domain(format!(
                "(q, r) = ({q}, {r}) is not admissible: q, r ∈ [2, ∞] required"
            )));
        }
        let lhs = 3.0 / q + d as f64 / r;
        if (lhs - 0.5 * d as f64).abs() > ADMISSIBLE_TOL {
            return Err(LnlsError::domain(format!(
                "(q, r) = ({q}, {r}) is not admissible in d = {d}: 3/q + d/r = {lhs} but must equal d/2 = {}",
                0.5 * d as f64
            )));
        }
        if q == 2.0 && r.is_infinite() && d == 3 {
            return Err(LnlsError::domain(
                "(q, r, d) = (2, ∞, 3) is the excluded endpoint of 3/q + d/r = d/2",
            ));
        }
        Ok(AdmissiblePair { q, r, d })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn dim(&self) -> usize {
        self.d
    }
}

/// `n` log-spaced points in `[lo, hi]`.
pub(crate) fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}
