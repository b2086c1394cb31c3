//! Dyadic frequency projections `P_N`.
//!
//! `N = 2^ℓ` runs from `N_* = 2^{⌈log₂(h/π)⌉ - 1}` up to 1. For `N ≥ 2N_*`,
//! `P_N` keeps the annulus `πN/(2h) < max_j |k_j| ≤ πN/h`; `P_{N_*}` keeps the
//! zero mode, contributing `(2π)^{-d} û(0)` at every point, which is exactly the
//! `k = 0` term of the inverse transform. The projections therefore sum to the
//! identity.

use serde::{Deserialize, Serialize};

use super::{dual_index, forward, inverse};
use crate::error::{LnlsError, Result};
use crate::lattice::{GridFunction, Lattice};

/// A dyadic scale `N = 2^exponent` on a given lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicScale {
    exponent: i32,
}

impl DyadicScale {
    /// `ℓ_* = ⌈log₂(h/π)⌉ - 1 = -log₂ M - 1` for `h = π/M` with `M` a power of two.
    pub fn lowest_exponent(lat: &Lattice) -> i32 {
        -(lat.half_size().trailing_zeros() as i32) - 1
    }

    /// `N_*`.
    pub fn lowest(lat: &Lattice) -> Self {
        DyadicScale { exponent: Self::lowest_exponent(lat) }
    }

    /// `N = 1`.
    pub fn top() -> Self {
        DyadicScale { exponent: 0 }
    }

    /// `N = 2^exponent`, validated against `N_* ≤ N ≤ 1`.
    pub fn new(lat: &Lattice, exponent: i32) -> Result<Self> {
        let lo = Self::lowest_exponent(lat);
        if exponent < lo || exponent > 0 {
            return Err(LnlsError::domain(format!(
                "dyadic scale 2^{exponent} outside [N_*, 1] = [2^{lo}, 1]"
            )));
        }
        Ok(DyadicScale { exponent })
    }

    pub fn exponent(&self) -> i32 {
        self.exponent
    }

    pub fn value(&self) -> f64 {
        2f64.powi(self.exponent)
    }

    pub fn is_lowest(&self, lat: &Lattice) -> bool {
        self.exponent == Self::lowest_exponent(lat)
    }

    /// `πN/h = M·N`, the outer radius of the annulus in the max-norm.
    pub fn outer_radius(&self, lat: &Lattice) -> f64 {
        lat.half_size() as f64 * self.value()
    }

    /// Whether dual index `k` belongs to the support of `P_N`.
    pub fn contains(&self, lat: &Lattice, k: &[i64]) -> bool {
        let kmax = k.iter().map(|kj| kj.unsigned_abs()).max().unwrap_or(0) as f64;
        if self.is_lowest(lat) {
            kmax == 0.0
        } else {
            let outer = self.outer_radius(lat);
            0.5 * outer < kmax && kmax <= outer
        }
    }

    fn check(&self, lat: &Lattice) -> Result<()> {
        DyadicScale::new(lat, self.exponent).map(|_| ())
    }
}

/// All scales `N_*, 2N_*, …, 1` of a lattice.
pub fn dyadic_scales(lat: &Lattice) -> Vec<DyadicScale> {
    (DyadicScale::lowest_exponent(lat)..=0).map(|exponent| DyadicScale { exponent }).collect()
}

/// `P_N u`.
pub fn lp_project(u: &GridFunction, n: DyadicScale) -> Result<GridFunction> {
    let lat = *u.lattice();
    n.check(&lat)?;
    let mut spec = forward(u);
    for (idx, z) in spec.values_mut().iter_mut().enumerate() {
        if !n.contains(&lat, &dual_index(&lat, idx)[..lat.dim()]) {
            *z = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    Ok(inverse(&spec))
}

/// `P_{≤N} u`: keeps `max_j |k_j| ≤ πN/h`.
pub fn project_below(u: &GridFunction, n: DyadicScale) -> Result<GridFunction> {
    let lat = *u.lattice();
    n.check(&lat)?;
    let outer = n.outer_radius(&lat);
    let mut spec = forward(u);
    for (idx, z) in spec.values_mut().iter_mut().enumerate() {
        let k = dual_index(&lat, idx);
        let kmax = k[..lat.dim()].iter().map(|kj| kj.unsigned_abs()).max().unwrap() as f64;
        if kmax > outer {
            *z = num_complex::Complex64::new(0.0, 0.0);
        }
    }
    Ok(inverse(&spec))
}
