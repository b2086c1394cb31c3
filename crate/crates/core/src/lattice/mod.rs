//! The periodic lattice `T_h^d` and complex grid functions on it.
//!
//! Layout convention: axis 0 is the slowest axis (row-major); the lattice
//! point with index `m ∈ {-M, …, M-1}` along an axis is stored at slot `m + M`,
//! so slot `i` sits at coordinate `(i - M)·h`.

mod io;
mod ops;
mod transfer;

pub use io::{read_grid_binary, read_grid_json, write_grid_binary, write_grid_json, GridJson};
pub(crate) use io::{decode_binary, encode_binary};
pub use ops::{
    backward_difference, convolve, discrete_laplacian_stencil, forward_difference, holder_check,
};
pub use transfer::{
    continuum_l2_error, discretize, interpolate, ContinuumSampler, FnSampler, PiecewiseAffine,
    DEFAULT_OVERSAMPLE, GAUSS_LEGENDRE_8,
};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LnlsError, Result};

/// The dense periodic lattice of `(2M)^d` points with spacing `h = π/M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    half_size: usize,
}

impl Lattice {
    /// `dim` must be 1 or 2 and `half_size` a power of two.
    pub fn new(dim: usize, half_size: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(LnlsError::domain(format!(
                "lattice dimension must be 1 or 2, got {dim}"
            )));
        }
        if half_size == 0 || !half_size.is_power_of_two() {
            return Err(LnlsError::domain(format!(
                "half-size M must be a positive power of two, got {half_size}"
            )));
        }
        Ok(Lattice { dim, half_size })
    }

    /// Recovers the lattice from a spacing `h ≈ π/M`.
    pub fn from_spacing(dim: usize, h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(LnlsError::domain(format!("spacing must be positive, got {h}")));
        }
        let m = (PI / h).round();
        if m < 1.0 || ((PI / m) - h).abs() > 1e-9 * h {
            return Err(LnlsError::domain(format!(
                "spacing {h} is not of the form π/M for an integer M"
            )));
        }
        Lattice::new(dim, m as usize)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `M`.
    pub fn half_size(&self) -> usize {
        self.half_size
    }

    /// Points per axis, `2M`.
    pub fn side(&self) -> usize {
        2 * self.half_size
    }

    pub fn n_points(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    /// `h = π/M`.
    pub fn spacing(&self) -> f64 {
        PI / self.half_size as f64
    }

    /// `h^d`, the measure of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Coordinate of slot `i` along one axis.
    pub fn coordinate(&self, slot: usize) -> f64 {
        (slot as f64 - self.half_size as f64) * self.spacing()
    }

    /// Signed lattice / dual index `slot - M`.
    pub fn signed_index(&self, slot: usize) -> i64 {
        slot as i64 - self.half_size as i64
    }

    /// Flat index of a multi-slot.
    pub fn flat(&self, slots: &[usize]) -> usize {
        debug_assert_eq!(slots.len(), self.dim);
        slots.iter().fold(0, |acc, &s| acc * self.side() + s)
    }

    /// Inverse of [`Lattice::flat`].
    pub fn unflat(&self, mut idx: usize) -> [usize; 2] {
        let n = self.side();
        let mut out = [0usize; 2];
        for j in (0..self.dim).rev() {
            out[j] = idx % n;
            idx /= n;
        }
        out
    }

    /// Flat index of the point shifted by `shift` slots along `axis`, wrapping periodically.
    pub fn shifted(&self, idx: usize, axis: usize, shift: isize) -> usize {
        let n = self.side() as isize;
        let stride = self.side().pow((self.dim - 1 - axis) as u32);
        let pos = ((idx / stride) % self.side()) as isize;
        let new_pos = (pos + shift).rem_euclid(n);
        (idx as isize + (new_pos - pos) * stride as isize) as usize
    }

    /// Coordinates of the lattice point at a flat index.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let s = self.unflat(idx);
        [self.coordinate(s[0]), if self.dim > 1 { self.coordinate(s[1]) } else { 0.0 }]
    }

    pub(crate) fn check_same(&self, other: &Lattice) -> Result<()> {
        if self != other {
            return Err(LnlsError::shape(format!(
                "lattice mismatch: (d={}, M={}) vs (d={}, M={})",
                self.dim, self.half_size, other.dim, other.half_size
            )));
        }
        Ok(())
    }
}

/// A complex-valued function on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    lattice: Lattice,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(lattice: Lattice, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != lattice.n_points() {
            return Err(LnlsError::shape(format!(
                "expected {} values, got {}",
                lattice.n_points(),
                values.len()
            )));
        }
        if values.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LnlsError::domain("grid function contains non-finite values"));
        }
        Ok(GridFunction { lattice, values })
    }

    /// Builds a grid function without the finiteness scan; callers guarantee the length.
    pub(crate) fn from_raw(lattice: Lattice, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), lattice.n_points());
        GridFunction { lattice, values }
    }

    pub fn zeros(lattice: Lattice) -> Self {
        GridFunction::from_raw(lattice, vec![Complex64::new(0.0, 0.0); lattice.n_points()])
    }

    pub fn constant(lattice: Lattice, c: Complex64) -> Self {
        GridFunction::from_raw(lattice, vec![c; lattice.n_points()])
    }

    /// Samples `f` at every lattice point.
    pub fn from_fn(lattice: Lattice, mut f: impl FnMut(&[f64]) -> Complex64) -> Self {
        let values = (0..lattice.n_points())
            .map(|i| f(&lattice.point(i)[..lattice.dim()]))
            .collect();
        GridFunction::from_raw(lattice, values)
    }

    /// The lattice plane wave `e^{ik·x}`.
    pub fn plane_wave(lattice: Lattice, k: &[i64]) -> Self {
        GridFunction::from_fn(lattice, |x| {
            let phase: f64 = x.iter().zip(k).map(|(xj, &kj)| xj * kj as f64).sum();
            Complex64::from_polar(1.0, phase)
        })
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

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        GridFunction::from_raw(self.lattice, self.values.iter().map(|&z| f(z)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|z| z * c)
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        self.lattice.check_same(&other.lattice)?;
        Ok(GridFunction::from_raw(
            self.lattice,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        ))
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// `h^d Σ_x u(x) conj(v(x))`.
    pub fn inner(&self, other: &GridFunction) -> Result<Complex64> {
        self.lattice.check_same(&other.lattice)?;
        let s: Complex64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj())
            .sum();
        Ok(s * self.lattice.cell_volume())
    }

    /// `‖u‖_{L_h^r}`; see [`lebesgue_norm`].
    pub fn norm(&self, r: f64) -> f64 {
        lebesgue_norm(self, r).expect("norm exponent must be >= 1")
    }

    /// `sup_x |u(x)|`.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `‖u‖_{L_h^2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.values.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.lattice.cell_volume()).sqrt()
    }
}

/// `(h^d Σ_x |u(x)|^r)^{1/r}`, or `sup_x |u(x)|` for `r = ∞`.
pub fn lebesgue_norm(u: &GridFunction, r: f64) -> Result<f64> {
    if r.is_nan() || r < 1.0 {
        return Err(LnlsError::domain(format!(
            "Lebesgue exponent must satisfy r >= 1, got {r}"
        )));
    }
    if r.is_infinite() {
        return Ok(u.sup_norm());
    }
    if r == 2.0 {
        return Ok(u.l2_norm());
    }
    // scale by the sup to keep large exponents in range
    let sup = u.sup_norm();
    if sup == 0.0 {
        return Ok(0.0);
    }
    let s: f64 = u.values.iter().map(|z| (z.norm() / sup).powf(r)).sum();
    Ok(sup * (s * u.lattice.cell_volume()).powf(1.0 / r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_lattices() {
        assert!(Lattice::new(3, 8).is_err());
        assert!(Lattice::new(1, 6).is_err());
        assert!(Lattice::new(2, 0).is_err());
        assert!(Lattice::from_spacing(1, 0.5).is_err());
        let lat = Lattice::from_spacing(2, PI / 16.0).unwrap();
        assert_eq!(lat.half_size(), 16);
    }

    #[test]
    fn spacing_and_coordinates() {
        let lat = Lattice::new(1, 4).unwrap();
        assert_relative_eq!(lat.spacing() * 4.0, PI, max_relative = 1e-15);
        let coords: Vec<f64> = (0..lat.side()).map(|i| lat.coordinate(i)).collect();
        assert_relative_eq!(coords[0], -PI, max_relative = 1e-15);
        assert_eq!(coords[4], 0.0);
        assert_relative_eq!(coords[7], PI - lat.spacing(), max_relative = 1e-15);
        assert_eq!(lat.n_points(), 8);
        assert_eq!(Lattice::new(2, 4).unwrap().n_points(), 64);
    }

    #[test]
    fn flat_index_round_trip_and_shift() {
        let lat = Lattice::new(2, 4).unwrap();
        for idx in 0..lat.n_points() {
            let s = lat.unflat(idx);
            assert_eq!(lat.flat(&s[..2]), idx);
        }
        let idx = lat.flat(&[7, 3]);
        assert_eq!(lat.shifted(idx, 0, 1), lat.flat(&[0, 3]));
        assert_eq!(lat.shifted(idx, 1, -4), lat.flat(&[7, 7]));
    }

    #[test]
    fn norm_of_constant_one_in_2d_is_two_pi() {
        for m in [2, 8, 32] {
            let lat = Lattice::new(2, m).unwrap();
            let u = GridFunction::constant(lat, Complex64::new(1.0, 0.0));
            assert_relative_eq!(lebesgue_norm(&u, 2.0).unwrap(), 2.0 * PI, max_relative = 1e-13);
        }
    }

    #[test]
    fn norm_of_zero_and_point_mass() {
        let lat = Lattice::new(1, 2).unwrap();
        assert_eq!(lebesgue_norm(&GridFunction::zeros(lat), 5.0).unwrap(), 0.0);
        let mut u = GridFunction::zeros(lat);
        u.values_mut()[1] = Complex64::new(1.0, 0.0);
        assert_relative_eq!(lebesgue_norm(&u, 1.0).unwrap(), PI / 2.0, max_relative = 1e-15);
        assert_eq!(lebesgue_norm(&u, f64::INFINITY).unwrap(), 1.0);
    }

    #[test]
    fn norm_rejects_small_exponent() {
        let lat = Lattice::new(1, 2).unwrap();
        assert!(matches!(
            lebesgue_norm(&GridFunction::zeros(lat), 0.5),
            Err(LnlsError::Domain(_))
        ));
    }

    #[test]
    fn constructor_checks_length_and_finiteness() {
        let lat = Lattice::new(1, 2).unwrap();
        assert!(GridFunction::new(lat, vec![Complex64::new(0.0, 0.0); 3]).is_err());
        let mut v = vec![Complex64::new(0.0, 0.0); 4];
        v[2] = Complex64::new(f64::NAN, 0.0);
        assert!(GridFunction::new(lat, v).is_err());
    }
}
