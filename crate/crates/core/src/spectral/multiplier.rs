//! Fourier multipliers on the dual lattice.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{apply_bin_symbol, dual_index, forward, symbol_to_bins};
use crate::error::Result;
use crate::lattice::{GridFunction, Lattice};

/// A diagonal operator `û(k) ↦ σ(k) û(k)`.
#[derive(Debug, Clone)]
pub struct Multiplier {
    lattice: Lattice,
    symbol: Vec<Complex64>,
    bins: Vec<Complex64>,
    tag: String,
}

impl Multiplier {
    /// Builds the multiplier from a symbol `σ(k)` evaluated at every dual index.
    pub fn from_fn(lattice: Lattice, tag: impl Into<String>, sigma: impl Fn(&[i64]) -> Complex64) -> Self {
        let symbol: Vec<Complex64> = (0..lattice.n_points())
            .map(|idx| sigma(&dual_index(&lattice, idx)[..lattice.dim()]))
            .collect();
        Multiplier::from_symbol(lattice, tag, symbol)
    }

    fn from_symbol(lattice: Lattice, tag: impl Into<String>, symbol: Vec<Complex64>) -> Self {
        let bins = symbol_to_bins(&lattice, &symbol);
        Multiplier { lattice, symbol, bins, tag: tag.into() }
    }

    pub fn identity(lattice: Lattice) -> Self {
        Multiplier::from_fn(lattice, "identity", |_| Complex64::new(1.0, 0.0))
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    /// Symbol values in dual storage order.
    pub fn symbol(&self) -> &[Complex64] {
        &self.symbol
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    /// `σ(k)` at dual index `k`.
    pub fn at(&self, k: &[i64]) -> Complex64 {
        self.symbol[super::dual_flat(&self.lattice, k)]
    }

    /// Pointwise symbol map, e.g. `σ ↦ e^{-itσ}`.
    pub fn map(&self, tag: impl Into<String>, f: impl Fn(Complex64) -> Complex64) -> Self {
        Multiplier::from_symbol(self.lattice, tag, self.symbol.iter().map(|&s| f(s)).collect())
    }

    /// The composition `self ∘ other`, whose symbol is the pointwise product.
    pub fn compose(&self, other: &Multiplier) -> Result<Self> {
        self.lattice.check_same(&other.lattice)?;
        let symbol = self.symbol.iter().zip(&other.symbol).map(|(a, b)| a * b).collect();
        Ok(Multiplier::from_symbol(self.lattice, format!("{}∘{}", self.tag, other.tag), symbol))
    }

    /// Applies the multiplier to a raw value buffer on this lattice.
    pub(crate) fn apply_in_place(&self, values: &mut [Complex64]) {
        apply_bin_symbol(values, &self.lattice, &self.bins);
    }
}

/// `F_h^{-1}(σ · F_h u)`.
pub fn apply_multiplier(m: &Multiplier, u: &GridFunction) -> Result<GridFunction> {
    m.lattice.check_same(u.lattice())?;
    let mut vals = u.values().to_vec();
    m.apply_in_place(&mut vals);
    Ok(GridFunction::from_raw(m.lattice, vals))
}

/// `σ_h(k) = Σ_j (4/h²) sin²(h k_j / 2)`, the symbol of `-Δ_h`.
pub fn laplacian_symbol(lat: Lattice) -> Multiplier {
    let h = lat.spacing();
    Multiplier::from_fn(lat, "-Δ_h", |k| {
        let s: f64 = k.iter().map(|&kj| (0.5 * h * kj as f64).sin().powi(2)).sum();
        Complex64::new(4.0 / (h * h) * s, 0.0)
    })
}

/// `⟨k⟩ = (1 + |k|²)^{1/2}`.
pub(crate) fn japanese_bracket(k: &[i64]) -> f64 {
    (1.0 + k.iter().map(|&kj| (kj * kj) as f64).sum::<f64>()).sqrt()
}

/// `‖u‖_{H_h^s} = ((2π)^{-d} Σ_k ⟨k⟩^{2s} |û(k)|²)^{1/2}`.
pub fn sobolev_norm(u: &GridFunction, s: f64) -> f64 {
    let lat = *u.lattice();
    let spec = forward(u);
    let sum: f64 = spec
        .values()
        .iter()
        .enumerate()
        .map(|(idx, z)| {
            let k = dual_index(&lat, idx);
            japanese_bracket(&k[..lat.dim()]).powf(2.0 * s) * z.norm_sqr()
        })
        .sum();
    (sum / (2.0 * PI).powi(lat.dim() as i32)).sqrt()
}

/// `⟨∇_h⟩^s u`, the multiplier with symbol `⟨k⟩^s`.
pub fn fractional_derivative(u: &GridFunction, s: f64) -> GridFunction {
    let m = Multiplier::from_fn(*u.lattice(), format!("<∇>^{s}"), |k| {
        Complex64::new(japanese_bracket(k).powf(s), 0.0)
    });
    apply_multiplier(&m, u).expect("same lattice")
}
