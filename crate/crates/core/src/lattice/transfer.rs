//! Transfer between the torus `T^d` and the lattice: cell-average
//! discretization `d_h`, per-cell affine interpolation `p_h`, and the
//! continuum `L²` distance between a lattice function and a continuum one.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{forward_difference, GridFunction, Lattice};

/// Oversampling factor used by [`continuum_l2_error`] when none is given.
pub const DEFAULT_OVERSAMPLE: usize = 8;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, 8 points.
pub const GAUSS_LEGENDRE_8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362),
    (0.525_532_409_916_329, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// A function `f: T^d → C`, 2π-periodic in every axis.
pub trait ContinuumSampler: Send + Sync {
    fn dim(&self) -> usize;

    /// `f(x)` for `x` of length [`ContinuumSampler::dim`].
    fn eval(&self, x: &[f64]) -> Complex64;

    /// Values on the uniform grid `x_i = -π + (i + offset)·2π/n` per axis,
    /// row-major with axis 0 slowest.
    ///
    /// Implementors with a faster route (FFT, cell tables) override this.
    fn sample_grid(&self, n: usize, offset: &[f64]) -> Vec<Complex64> {
        let d = self.dim();
        let step = 2.0 * PI / n as f64;
        let total = n.pow(d as u32);
        let mut out = Vec::with_capacity(total);
        let mut x = [0.0f64; 2];
        for idx in 0..total {
            let mut rem = idx;
            for j in (0..d).rev() {
                let i = rem % n;
                rem /= n;
                x[j] = -PI + (i as f64 + offset[j]) * step;
            }
            out.push(self.eval(&x[..d]));
        }
        out
    }

    /// Free-form description of the function class (smooth, band-limited, …).
    fn tag(&self) -> &str {
        ""
    }
}

/// A [`ContinuumSampler`] backed by a closure.
pub struct FnSampler<F> {
    dim: usize,
    tag: String,
    f: F,
}

impl<F> FnSampler<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    pub fn new(dim: usize, tag: impl Into<String>, f: F) -> Self {
        FnSampler { dim, tag: tag.into(), f }
    }
}

impl<F> ContinuumSampler for FnSampler<F>
where
    F: Fn(&[f64]) -> Complex64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        (self.f)(x)
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

/// `(d_h f)(x) = h^{-d} ∫_{x + [0,h)^d} f(y) dy`, by tensorised 8-point Gauss–Legendre per cell.
///
/// Oscillation beyond what 8 nodes per cell resolve is not detected.
pub fn discretize(f: &dyn ContinuumSampler, lat: Lattice) -> GridFunction {
    assert_eq!(f.dim(), lat.dim(), "sampler and lattice dimensions differ");
    let n = lat.side();
    let mut acc = vec![Complex64::new(0.0, 0.0); lat.n_points()];
    let mut accumulate = |offset: &[f64], weight: f64| {
        let vals = f.sample_grid(n, offset);
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += v * weight;
        }
    };
    match lat.dim() {
        1 => {
            for &(xi, w) in &GAUSS_LEGENDRE_8 {
                accumulate(&[0.5 * (1.0 + xi)], 0.5 * w);
            }
        }
        _ => {
            for &(xi, wi) in &GAUSS_LEGENDRE_8 {
                for &(xj, wj) in &GAUSS_LEGENDRE_8 {
                    accumulate(&[0.5 * (1.0 + xi), 0.5 * (1.0 + xj)], 0.25 * wi * wj);
                }
            }
        }
    }
    GridFunction::from_raw(lat, acc)
}

/// The per-cell affine extension `p_h u`:
/// `u(x̲) + Σ_j D_{h,j}^+ u(x̲)·(x_j - x̲_j)` for `x ∈ x̲ + [0,h)^d`.
///
/// For `d = 2` this is generally discontinuous across cell faces.
#[derive(Debug, Clone)]
pub struct PiecewiseAffine {
    base: GridFunction,
    slopes: Vec<[Complex64; 2]>,
}

/// Builds `p_h u`.
pub fn interpolate(u: &GridFunction) -> PiecewiseAffine {
    let lat = *u.lattice();
    let mut slopes = vec![[Complex64::new(0.0, 0.0); 2]; lat.n_points()];
    for axis in 0..lat.dim() {
        let d = forward_difference(u, axis).expect("axis in range");
        for (s, v) in slopes.iter_mut().zip(d.values()) {
            s[axis] = *v;
        }
    }
    PiecewiseAffine { base: u.clone(), slopes }
}

impl PiecewiseAffine {
    pub fn lattice(&self) -> &Lattice {
        self.base.lattice()
    }

    pub fn base(&self) -> &GridFunction {
        &self.base
    }

    /// Per-cell gradient `D_h^+ u(x̲)`.
    pub fn slopes(&self) -> &[[Complex64; 2]] {
        &self.slopes
    }

    /// Locates `x` along one axis: (cell slot, offset in `[0,h)`).
    fn locate(&self, x: f64) -> (usize, f64) {
        let lat = self.lattice();
        let h = lat.spacing();
        let s = (x + PI) / h;
        let cell = s.floor();
        let frac = (s - cell) * h;
        let slot = (cell as i64).rem_euclid(lat.side() as i64) as usize;
        (slot, frac)
    }

    fn value_at(&self, cells: &[(usize, f64)]) -> Complex64 {
        let lat = self.lattice();
        let mut slots = [0usize; 2];
        for (j, c) in cells.iter().enumerate() {
            slots[j] = c.0;
        }
        let idx = lat.flat(&slots[..lat.dim()]);
        let mut v = self.base.values()[idx];
        for (j, c) in cells.iter().enumerate() {
            v += self.slopes[idx][j] * c.1;
        }
        v
    }

    /// Exact `‖p_h u‖_{L²(T^d)}` from the closed-form integral of `|affine|²` per cell.
    pub fn l2_norm(&self) -> f64 {
        let lat = self.lattice();
        let h = lat.spacing();
        let mut total = 0.0;
        for (a, b) in self.base.values().iter().zip(&self.slopes) {
            let mut cell = a.norm_sqr();
            for bj in &b[..lat.dim()] {
                cell += (a * bj.conj()).re * h + bj.norm_sqr() * h * h / 3.0;
            }
            if lat.dim() == 2 {
                cell += 2.0 * (b[0] * b[1].conj()).re * h * h / 4.0;
            }
            total += cell;
        }
        (total * lat.cell_volume()).sqrt()
    }

    /// Broken `H¹` norm: `(‖p_h u‖²_{L²} + Σ_cells h^d |∇ p_h u|²)^{1/2}`, i.e. the
    /// `H¹` norm with the gradient taken cell by cell (face jumps ignored).
    pub fn broken_h1_norm(&self) -> f64 {
        let lat = self.lattice();
        let grad: f64 = self
            .slopes
            .iter()
            .map(|b| b[..lat.dim()].iter().map(|z| z.norm_sqr()).sum::<f64>())
            .sum::<f64>()
            * lat.cell_volume();
        (self.l2_norm().powi(2) + grad).sqrt()
    }
}

impl ContinuumSampler for PiecewiseAffine {
    fn dim(&self) -> usize {
        self.lattice().dim()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let mut cells = [(0usize, 0.0f64); 2];
        for (j, &xj) in x.iter().enumerate() {
            cells[j] = self.locate(xj);
        }
        self.value_at(&cells[..x.len()])
    }

    fn sample_grid(&self, n: usize, offset: &[f64]) -> Vec<Complex64> {
        let d = self.dim();
        let step = 2.0 * PI / n as f64;
        // per-axis cell lookup tables
        let tables: Vec<Vec<(usize, f64)>> = (0..d)
            .map(|j| (0..n).map(|i| self.locate(-PI + (i as f64 + offset[j]) * step)).collect())
            .collect();
        match d {
            1 => tables[0].iter().map(|c| self.value_at(std::slice::from_ref(c))).collect(),
            _ => {
                let mut out = Vec::with_capacity(n * n);
                for c0 in &tables[0] {
                    for c1 in &tables[1] {
                        out.push(self.value_at(&[*c0, *c1]));
                    }
                }
                out
            }
        }
    }

    fn tag(&self) -> &str {
        "piecewise-affine lattice interpolant"
    }
}

/// `‖p_h u - f‖_{L²(T^d)}` by the midpoint rule on the grid of spacing
/// `h / oversample`; every quadrature node is interior to a lattice cell.
pub fn continuum_l2_error(u: &GridFunction, f: &dyn ContinuumSampler, oversample: usize) -> f64 {
    assert!(oversample >= 4, "oversample must be at least 4");
    let lat = *u.lattice();
    let n = lat.side() * oversample;
    let offset = [0.5, 0.5];
    let p = interpolate(u).sample_grid(n, &offset[..lat.dim()]);
    let g = f.sample_grid(n, &offset[..lat.dim()]);
    let sum: f64 = p.iter().zip(&g).map(|(a, b)| (a - b).norm_sqr()).sum();
    (sum * (2.0 * PI / n as f64).powi(lat.dim() as i32)).sqrt()
}
