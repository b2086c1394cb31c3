//! Fourier analysis on the periodic lattice.
//!
//! `F_h u(k) = h^d Σ_x u(x) e^{-ik·x}` over the dual lattice `{-M, …, M-1}^d`,
//! inverted by `u(x) = (2π)^{-d} Σ_k û(k) e^{ik·x}`. Dual index `k` is stored at
//! slot `k + M` (same layout as [`GridFunction`]); the map to FFT bins is
//! [`dual_slot_to_bin`].

mod fft;
mod inequalities;
mod littlewood_paley;
mod multiplier;

pub(crate) use fft::fft_nd;
pub use inequalities::{inequality_sweep, InequalityKind};
pub use littlewood_paley::{dyadic_scales, lp_project, project_below, DyadicScale};
pub use multiplier::{
    apply_multiplier, fractional_derivative, laplacian_symbol, sobolev_norm, Multiplier,
};

use std::f64::consts::PI;
use std::io::{Read, Write};

use num_complex::Complex64;
use rustfft::FftDirection;

use crate::error::{LnlsError, Result};
use crate::lattice::{decode_binary, encode_binary, GridFunction, Lattice};

pub(crate) const SPEC_MAGIC: &[u8; 8] = b"LNLSSPEC";

/// A complex function on the dual lattice `(T_h^d)^*`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFunction {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl SpectrumFunction {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.n_points() {
            return Err(LnlsError::shape(format!(
                "expected {} spectral values, got {}",
                lattice.n_points(),
                values.len()
            )));
        }
        Ok(SpectrumFunction { lattice, values })
    }

    pub fn zeros(lattice: Lattice) -> Self {
        SpectrumFunction { lattice, values: vec![Complex64::new(0.0, 0.0); lattice.n_points()] }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    /// Value at dual index `k` (each component in `-M..M`).
    pub fn at(&self, k: &[i64]) -> Complex64 {
        self.values[dual_flat(&self.lattice, k)]
    }

    /// `(2π)^{-d} Σ_k |û(k)|²`, equal to `‖u‖²_{L_h^2}` by Plancherel.
    pub fn plancherel_mass(&self) -> f64 {
        self.values.iter().map(|z| z.norm_sqr()).sum::<f64>()
            / (2.0 * PI).powi(self.lattice.dim() as i32)
    }

    pub fn write_binary(&self, mut w: impl Write) -> Result<()> {
        w.write_all(&encode_binary(SPEC_MAGIC, &self.lattice, &self.values))?;
        Ok(())
    }

    pub fn read_binary(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes)?;
        let (lattice, values) = decode_binary(SPEC_MAGIC, &bytes)?;
        Ok(SpectrumFunction { lattice, values })
    }
}

/// FFT bin holding dual slot `slot` (i.e. `k = slot - M`): `k mod 2M`.
pub fn dual_slot_to_bin(slot: usize, half_size: usize) -> usize {
    (slot + half_size) % (2 * half_size)
}

/// Inverse of [`dual_slot_to_bin`].
pub fn bin_to_dual_slot(bin: usize, half_size: usize) -> usize {
    (bin + half_size) % (2 * half_size)
}

/// Flat storage index of dual index `k`.
pub fn dual_flat(lat: &Lattice, k: &[i64]) -> usize {
    let m = lat.half_size() as i64;
    let mut slots = [0usize; 2];
    for (j, &kj) in k.iter().enumerate() {
        slots[j] = ((kj + m).rem_euclid(2 * m)) as usize;
    }
    lat.flat(&slots[..lat.dim()])
}

/// Dual index `k` of a flat storage index.
pub fn dual_index(lat: &Lattice, idx: usize) -> [i64; 2] {
    let s = lat.unflat(idx);
    [lat.signed_index(s[0]), if lat.dim() > 1 { lat.signed_index(s[1]) } else { 0 }]
}

/// Flat index map from dual storage order to FFT bin order.
pub(crate) fn slot_to_bin_map(lat: &Lattice) -> Vec<usize> {
    let m = lat.half_size();
    let n = lat.side();
    (0..lat.n_points())
        .map(|idx| {
            let s = lat.unflat(idx);
            match lat.dim() {
                1 => dual_slot_to_bin(s[0], m),
                _ => dual_slot_to_bin(s[0], m) * n + dual_slot_to_bin(s[1], m),
            }
        })
        .collect()
}

/// `(-1)^{k_1 + … + k_d}` for the dual index at a flat storage index.
fn parity_sign(lat: &Lattice, idx: usize) -> f64 {
    let k = dual_index(lat, idx);
    if (k[0] + k[1]).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `F_h u`.
pub fn forward(u: &GridFunction) -> SpectrumFunction {
    let lat = *u.lattice();
    let mut buf = u.values().to_vec();
    fft_nd(&mut buf, lat.side(), lat.dim(), FftDirection::Forward);
    let vol = lat.cell_volume();
    let map = slot_to_bin_map(&lat);
    // e^{-ik·x} with x = (i - M)h picks up e^{ikMh} = (-1)^k per axis
    let values = (0..lat.n_points())
        .map(|idx| buf[map[idx]] * (vol * parity_sign(&lat, idx)))
        .collect();
    SpectrumFunction { lattice: lat, values }
}

/// `F_h^{-1} û`.
pub fn inverse(spec: &SpectrumFunction) -> GridFunction {
    let lat = spec.lattice;
    let map = slot_to_bin_map(&lat);
    let mut buf = vec![Complex64::new(0.0, 0.0); lat.n_points()];
    for idx in 0..lat.n_points() {
        buf[map[idx]] = spec.values[idx] * parity_sign(&lat, idx);
    }
    fft_nd(&mut buf, lat.side(), lat.dim(), FftDirection::Inverse);
    let scale = (2.0 * PI).powi(-(lat.dim() as i32));
    for z in buf.iter_mut() {
        *z *= scale;
    }
    GridFunction::from_raw(lat, buf)
}

/// `u * v` through the product rule `F_h(u*v) = F_h u · F_h v`.
pub fn convolve_spectral(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    u.lattice().check_same(v.lattice())?;
    let mut a = forward(u);
    let b = forward(v);
    for (x, y) in a.values.iter_mut().zip(&b.values) {
        *x *= y;
    }
    Ok(inverse(&a))
}

/// Applies a symbol given in FFT-bin order: `u ← IFFT(σ · FFT(u)) / n`.
///
/// The `h^d`, `(2π)^{-d}` and parity factors of the lattice pair cancel, so this is
/// the hot-path form of [`apply_multiplier`].
pub(crate) fn apply_bin_symbol(values: &mut [Complex64], lat: &Lattice, bin_symbol: &[Complex64]) {
    fft_nd(values, lat.side(), lat.dim(), FftDirection::Forward);
    let inv_n = 1.0 / lat.n_points() as f64;
    for (z, s) in values.iter_mut().zip(bin_symbol) {
        *z *= s * inv_n;
    }
    fft_nd(values, lat.side(), lat.dim(), FftDirection::Inverse);
}

/// Reorders a symbol from dual storage order into FFT-bin order.
pub(crate) fn symbol_to_bins(lat: &Lattice, symbol: &[Complex64]) -> Vec<Complex64> {
    let map = slot_to_bin_map(lat);
    let mut out = vec![Complex64::new(0.0, 0.0); symbol.len()];
    for (idx, &b) in map.iter().enumerate() {
        out[b] = symbol[idx];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn slot_bin_bijection() {
        for m in [1usize, 2, 4, 8] {
            let mut seen = vec![false; 2 * m];
            for slot in 0..2 * m {
                let b = dual_slot_to_bin(slot, m);
                let k = slot as i64 - m as i64;
                assert_eq!(b as i64, k.rem_euclid(2 * m as i64));
                assert_eq!(bin_to_dual_slot(b, m), slot);
                seen[b] = true;
            }
            assert!(seen.iter().all(|&s| s));
        }
    }

    #[test]
    fn point_mass_transforms_to_constant() {
        for dim in [1, 2] {
            let lat = Lattice::new(dim, 4).unwrap();
            let mut u = GridFunction::zeros(lat);
            let origin = lat.flat(&[4, 4][..dim]);
            u.values_mut()[origin] = Complex64::new(1.0, 0.0);
            for z in forward(&u).values() {
                assert!((z - lat.cell_volume()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn plane_wave_transforms_to_single_peak() {
        let lat = Lattice::new(2, 4).unwrap();
        let k0 = [-4i64, 3];
        let s = forward(&GridFunction::plane_wave(lat, &k0));
        for idx in 0..lat.n_points() {
            let k = dual_index(&lat, idx);
            let expected = if k == k0 { (2.0 * PI).powi(2) } else { 0.0 };
            assert!((s.values()[idx] - expected).norm() < 1e-12);
        }
        assert_relative_eq!(s.at(&k0).re, (2.0 * PI).powi(2), max_relative = 1e-13);
    }

    #[test]
    fn inverse_of_zero_is_zero() {
        let lat = Lattice::new(1, 8).unwrap();
        assert_eq!(inverse(&SpectrumFunction::zeros(lat)).sup_norm(), 0.0);
    }

    #[test]
    fn spectrum_binary_uses_its_own_magic() {
        let lat = Lattice::new(1, 2).unwrap();
        let s = forward(&GridFunction::plane_wave(lat, &[1]));
        let mut buf = Vec::new();
        s.write_binary(&mut buf).unwrap();
        assert_eq!(&buf[..8], b"LNLSSPEC");
        assert_eq!(SpectrumFunction::read_binary(&buf[..]).unwrap(), s);
        assert!(crate::lattice::read_grid_binary(&buf[..]).is_err());
    }
}
