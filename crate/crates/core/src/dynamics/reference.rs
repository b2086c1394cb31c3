//! Fine-grid Fourier-collocation solver for the continuum NLS
//! `i∂_t u + Δu - λ|u|^{p-1}u = 0` on `T^d`, used as the reference `U(t)u0`.
//!
//! The solve runs at the requested resolution `R` (points per axis) and at `2R`;
//! the two must agree to `self_check_tol`. For a non-integer `p` both resolutions
//! are doubled; for odd integer `p` the 2/3 rule is applied in every linear substep.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftDirection;
use serde::{Deserialize, Serialize};

use super::integrators::{phase_rotate, LinearPropagator};
use super::NlsParams;
use crate::error::{LnlsError, Result};
use crate::lattice::{ContinuumSampler, GridFunction, Lattice};
use crate::spectral::{dual_index, fft_nd};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceConfig {
    /// Points per axis, a power of two ≥ 256.
    pub resolution: usize,
    /// Strang step of the reference solve.
    pub dt: f64,
    /// Largest accepted relative `L²` difference between the `R` and `2R` solutions.
    pub self_check_tol: f64,
}

impl ReferenceConfig {
    pub fn new(resolution: usize, dt: f64) -> Self {
        ReferenceConfig { resolution, dt, self_check_tol: 1e-6 }
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < 256 || !self.resolution.is_power_of_two() {
            return Err(LnlsError::domain(format!(
                "reference resolution must be a power of two ≥ 256, got {}",
                self.resolution
            )));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(LnlsError::domain(format!("reference dt must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Trigonometric interpolant of samples on the uniform grid `x_i = -π + 2πi/n`.
///
/// The Nyquist mode of each axis is split evenly between `±n/2`, so the
/// interpolant of real data is real.
#[derive(Debug, Clone)]
pub struct SpectralSampler {
    dim: usize,
    n: usize,
    /// `c_k` in FFT-bin order, `u(x) = Σ_k c_k e^{ik·x}`.
    coeffs: Vec<Complex64>,
    tag: String,
}

impl SpectralSampler {
    /// Interpolant of grid values `u(x_i)`, `x_i = -π + 2πi/n`.
    pub fn from_grid(dim: usize, n: usize, mut values: Vec<Complex64>) -> Self {
        assert_eq!(values.len(), n.pow(dim as u32));
        fft_nd(&mut values, n, dim, FftDirection::Forward);
        let inv = 1.0 / values.len() as f64;
        // e^{-ik x_i} = (-1)^k e^{-2πi k i / n}
        for (b, c) in values.iter_mut().enumerate() {
            *c *= inv * parity(b, n, dim);
        }
        SpectralSampler { dim, n, coeffs: values, tag: "trigonometric interpolant".into() }
    }

    /// Interpolant of a lattice function viewed as point samples.
    pub fn from_grid_function(u: &GridFunction) -> Self {
        let lat = u.lattice();
        SpectralSampler::from_grid(lat.dim(), lat.side(), u.values().to_vec())
    }

    pub fn resolution(&self) -> usize {
        self.n
    }

    /// Signed frequencies of bin `b` with their weights (two halves at the Nyquist bin).
    fn axis_modes(&self, b: usize) -> [(i64, f64); 2] {
        let n = self.n as i64;
        let k = if (b as i64) < n / 2 { b as i64 } else { b as i64 - n };
        if k == -n / 2 {
            [(-n / 2, 0.5), (n / 2, 0.5)]
        } else {
            [(k, 1.0), (0, 0.0)]
        }
    }

    /// `L²(T^d)` norm of the interpolant, `(2π)^{d/2} (Σ|c_k|²)^{1/2}` with the Nyquist split.
    pub fn l2_norm(&self) -> f64 {
        let mut s = 0.0;
        for (b, c) in self.coeffs.iter().enumerate() {
            let mut w = 1.0;
            for j in 0..self.dim {
                let axis_bin = if j == 0 && self.dim == 2 { b / self.n } else { b % self.n };
                let m = self.axis_modes(axis_bin);
                w *= m[0].1 * m[0].1 + m[1].1 * m[1].1;
            }
            s += w * c.norm_sqr();
        }
        (2.0 * PI).powf(self.dim as f64 / 2.0) * s.sqrt()
    }
}

fn parity(b: usize, n: usize, dim: usize) -> f64 {
    let (b0, b1) = if dim == 2 { (b / n, b % n) } else { (b, 0) };
    // (-1)^k equals (-1)^b because n is even
    if (b0 + b1) % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl ContinuumSampler for SpectralSampler {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let n = self.n;
        for (b, c) in self.coeffs.iter().enumerate() {
            let bins = if self.dim == 2 { [b / n, b % n] } else { [b, 0] };
            let mut factor = Complex64::new(1.0, 0.0);
            for j in 0..self.dim {
                let mut axis = Complex64::new(0.0, 0.0);
                for (k, w) in self.axis_modes(bins[j]) {
                    if w != 0.0 {
                        axis += Complex64::from_polar(w, k as f64 * x[j]);
                    }
                }
                factor *= axis;
            }
            acc += c * factor;
        }
        acc
    }

    /// Zero-pads to `m' = m·⌈n/m⌉ ≥ n` bins, transforms, then keeps every `m'/m`-th value.
    fn sample_grid(&self, m: usize, offset: &[f64]) -> Vec<Complex64> {
        let d = self.dim;
        let stride = self.n.div_ceil(m).max(1);
        let mp = m * stride;
        // per-axis bin placement and phase: e^{ik(-π + off·2π/m')}
        let axis_tables: Vec<Vec<Vec<(usize, Complex64)>>> = (0..d)
            .map(|j| {
                let off = offset[j] * stride as f64;
                (0..self.n)
                    .map(|b| {
                        self.axis_modes(b)
                            .into_iter()
                            .filter(|&(_, w)| w != 0.0)
                            .map(|(k, w)| {
                                let bin = k.rem_euclid(mp as i64) as usize;
                                let phase = k as f64 * (-PI + off * 2.0 * PI / mp as f64);
                                (bin, Complex64::from_polar(w, phase))
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let mut buf = vec![Complex64::new(0.0, 0.0); mp.pow(d as u32)];
        match d {
            1 => {
                for (b, c) in self.coeffs.iter().enumerate() {
                    for &(bin, ph) in &axis_tables[0][b] {
                        buf[bin] += c * ph;
                    }
                }
            }
            _ => {
                for b0 in 0..self.n {
                    for b1 in 0..self.n {
                        let c = self.coeffs[b0 * self.n + b1];
                        for &(i0, p0) in &axis_tables[0][b0] {
                            for &(i1, p1) in &axis_tables[1][b1] {
                                buf[i0 * mp + i1] += c * p0 * p1;
                            }
                        }
                    }
                }
            }
        }
        fft_nd(&mut buf, mp, d, FftDirection::Inverse);
        if stride == 1 {
            return buf;
        }
        match d {
            1 => (0..m).map(|i| buf[i * stride]).collect(),
            _ => {
                let mut out = Vec::with_capacity(m * m);
                for i0 in 0..m {
                    for i1 in 0..m {
                        out.push(buf[i0 * stride * mp + i1 * stride]);
                    }
                }
                out
            }
        }
    }

    fn tag(&self) -> &str {
        &self.tag
    }
}

/// The reference state at one time, at the working and at the doubled resolution.
#[derive(Debug, Clone)]
pub struct ReferenceSolution {
    pub t: f64,
    /// Solution at the doubled resolution; the one to compare against.
    pub fine: SpectralSampler,
    /// Solution at the working resolution.
    pub coarse: SpectralSampler,
    /// Relative `L²` difference of the two.
    pub self_difference: f64,
}

/// `U(t)u0` for a single time.
pub fn reference_solution(
    u0: &dyn ContinuumSampler,
    params: &NlsParams,
    t: f64,
    cfg: &ReferenceConfig,
) -> Result<ReferenceSolution> {
    Ok(reference_trajectory(u0, params, &[t], cfg)?.pop().expect("one time requested"))
}

/// `U(t)u0` for each of the (nondecreasing, nonnegative) `times`, from one solve per resolution.
pub fn reference_trajectory(
    u0: &dyn ContinuumSampler,
    params: &NlsParams,
    times: &[f64],
    cfg: &ReferenceConfig,
) -> Result<Vec<ReferenceSolution>> {
    cfg.validate()?;
    if times.iter().any(|&t| !(t >= 0.0 && t.is_finite())) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(LnlsError::domain("reference times must be nonnegative and nondecreasing"));
    }
    let polynomial = params.p.fract() == 0.0 && (params.p as i64) % 2 == 1;
    let base = if polynomial || params.is_linear() { cfg.resolution } else { 2 * cfg.resolution };
    let coarse = solve_collocation(u0, params, times, base, cfg.dt, polynomial)?;
    let fine = solve_collocation(u0, params, times, 2 * base, cfg.dt, polynomial)?;
    let mut out = Vec::with_capacity(times.len());
    for ((&t, c), f) in times.iter().zip(coarse).zip(fine) {
        let c = SpectralSampler::from_grid(u0.dim(), base, c);
        let f = SpectralSampler::from_grid(u0.dim(), 2 * base, f);
        let diff = sampler_distance(&c, &f, 2 * base) / f.l2_norm().max(f64::MIN_POSITIVE);
        if !(diff <= cfg.self_check_tol) {
            return Err(LnlsError::Accuracy(format!(
                "reference solution at t = {t} changes by {diff:e} (> {:e}) between resolutions {} and {}",
                cfg.self_check_tol,
                base,
                2 * base
            )));
        }
        out.push(ReferenceSolution { t, fine: f, coarse: c, self_difference: diff });
    }
    Ok(out)
}

/// `‖f - g‖_{L²}` by the trapezoid rule on an `n`-point grid (exact for band-limited pairs).
fn sampler_distance(f: &SpectralSampler, g: &SpectralSampler, n: usize) -> f64 {
    let offset = [0.0, 0.0];
    let a = f.sample_grid(n, &offset[..f.dim]);
    let b = g.sample_grid(n, &offset[..f.dim]);
    let s: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).norm_sqr()).sum();
    (s * (2.0 * PI / n as f64).powi(f.dim as i32)).sqrt()
}

/// Grid states at `times` from Strang splitting with the continuum symbol `|k|²`.
fn solve_collocation(
    u0: &dyn ContinuumSampler,
    params: &NlsParams,
    times: &[f64],
    n: usize,
    dt: f64,
    dealias: bool,
) -> Result<Vec<Vec<Complex64>>> {
    let d = u0.dim();
    // the collocation grid -π + 2πi/n is the lattice with M = n/2
    let lat = Lattice::new(d, n / 2)?;
    let offset = [0.0, 0.0];
    let mut state = u0.sample_grid(n, &offset[..d]);
    let cutoff = n as f64 / 3.0;
    let symbol: Vec<Complex64> = (0..lat.n_points())
        .map(|idx| {
            let k = dual_index(&lat, idx);
            Complex64::new(k[..d].iter().map(|&kj| (kj * kj) as f64).sum(), 0.0)
        })
        .collect();
    let filter = |prop: LinearPropagator| -> LinearPropagator {
        if !dealias {
            return prop;
        }
        let mut p = prop;
        p.mask_bins(&lat, |k| k[..d].iter().any(|&kj| (kj.abs() as f64) > cutoff));
        p
    };
    let mut out = Vec::with_capacity(times.len());
    let mut now = 0.0;
    for &t in times {
        let span = t - now;
        if span > 0.0 {
            if params.is_linear() {
                filter(LinearPropagator::with_symbol(lat, span, &symbol)).apply_in_place(&mut state);
            } else {
                let steps = (span / dt - 1e-9).ceil().max(1.0) as usize;
                let h = span / steps as f64;
                let prop = filter(LinearPropagator::with_symbol(lat, h, &symbol));
                for _ in 0..steps {
                    phase_rotate(&mut state, params, 0.5 * h);
                    prop.apply_in_place(&mut state);
                    phase_rotate(&mut state, params, 0.5 * h);
                }
            }
            if state.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(LnlsError::Accuracy(format!("reference solve diverged before t = {t}")));
            }
        }
        now = t;
        out.push(state.clone());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::FnSampler;
    use approx::assert_relative_eq;

    fn max_err(a: &[Complex64], b: &[Complex64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn interpolant_reproduces_samples_and_is_periodic() {
        let n = 16;
        let f = |x: f64| Complex64::new((3.0 * x).cos(), (x).sin() + 0.2 * (8.0 * x).cos());
        let vals: Vec<Complex64> = (0..n).map(|i| f(-PI + 2.0 * PI * i as f64 / n as f64)).collect();
        let s = SpectralSampler::from_grid(1, n, vals.clone());
        assert!(max_err(&s.sample_grid(n, &[0.0]), &vals) < 1e-13);
        for (i, v) in vals.iter().enumerate() {
            let x = -PI + 2.0 * PI * i as f64 / n as f64;
            assert!((s.eval(&[x]) - v).norm() < 1e-12);
            assert!((s.eval(&[x + 0.3]) - s.eval(&[x + 0.3 + 2.0 * PI])).norm() < 1e-12);
        }
        // band-limited functions below Nyquist are reproduced everywhere
        let g = |x: f64| Complex64::new((3.0 * x).cos(), x.sin());
        let gv: Vec<Complex64> = (0..n).map(|i| g(-PI + 2.0 * PI * i as f64 / n as f64)).collect();
        let gs = SpectralSampler::from_grid(1, n, gv);
        assert!((gs.eval(&[0.123]) - g(0.123)).norm() < 1e-13);
    }

    #[test]
    fn fft_sampling_matches_direct_evaluation() {
        for dim in [1, 2] {
            let n = 8usize;
            let total = n.pow(dim as u32);
            let vals: Vec<Complex64> =
                (0..total).map(|i| Complex64::new((i as f64 * 0.7).sin(), (i * i % 5) as f64)).collect();
            let s = SpectralSampler::from_grid(dim, n, vals);
            for (m, off) in [(8usize, 0.25), (24, 0.5), (4, 0.5), (3, 0.1)] {
                let fast = s.sample_grid(m, &[off, off][..dim]);
                let slow = crate::lattice::FnSampler::new(dim, "", |x: &[f64]| s.eval(x))
                    .sample_grid(m, &[off, off][..dim]);
                assert!(max_err(&fast, &slow) < 1e-11, "dim {dim}, m {m}: {}", max_err(&fast, &slow));
            }
        }
    }

    #[test]
    fn real_data_gives_real_interpolant() {
        let n = 8;
        let vals: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 0.0)).collect();
        let s = SpectralSampler::from_grid(1, n, vals);
        assert!(s.eval(&[0.37]).im.abs() < 1e-13);
    }

    #[test]
    fn l2_norm_matches_quadrature() {
        let n = 8;
        let vals: Vec<Complex64> = (0..n * n).map(|i| Complex64::new((i % 3) as f64, (i % 5) as f64)).collect();
        let s = SpectralSampler::from_grid(2, n, vals);
        let fine = s.sample_grid(32, &[0.0, 0.0]);
        let q = (fine.iter().map(|z| z.norm_sqr()).sum::<f64>() * (2.0 * PI / 32.0).powi(2)).sqrt();
        assert_relative_eq!(s.l2_norm(), q, max_relative = 1e-12);
    }

    fn plane(k: [f64; 2], amp: f64) -> FnSampler<impl Fn(&[f64]) -> Complex64 + Send + Sync> {
        FnSampler::new(2, "plane wave", move |x: &[f64]| Complex64::from_polar(amp, k[0] * x[0] + k[1] * x[1]))
    }

    #[test]
    fn initial_time_reproduces_data() {
        let u0 = FnSampler::new(2, "g", |x: &[f64]| Complex64::new((x[0].cos() + x[1].sin()).exp(), 0.0));
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let r = reference_solution(&u0, &prm, 0.0, &ReferenceConfig::new(256, 0.01)).unwrap();
        let grid = r.coarse.sample_grid(256, &[0.0, 0.0]);
        let direct = u0.sample_grid(256, &[0.0, 0.0]);
        assert!(max_err(&grid, &direct) < 1e-12);
    }

    #[test]
    fn free_and_nonlinear_plane_waves() {
        let k = [2.0, -1.0];
        let t = 0.3;
        let free = reference_solution(&plane(k, 1.0), &NlsParams::without_nonlinearity(3.0), t, &ReferenceConfig::new(256, 0.01))
            .unwrap();
        let x = [0.4, -1.3];
        let expected = Complex64::from_polar(1.0, k[0] * x[0] + k[1] * x[1] - 5.0 * t);
        assert!((free.fine.eval(&x) - expected).norm() < 1e-12);

        let amp = 0.7;
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let nl = reference_solution(&plane(k, amp), &prm, t, &ReferenceConfig::new(256, 0.01)).unwrap();
        let omega = 5.0 + amp * amp;
        let expected = Complex64::from_polar(amp, k[0] * x[0] + k[1] * x[1] - omega * t);
        assert!((nl.fine.eval(&x) - expected).norm() < 1e-9);
    }

    #[test]
    fn validation() {
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let u0 = plane([1.0, 0.0], 1.0);
        assert!(reference_solution(&u0, &prm, 0.1, &ReferenceConfig::new(128, 0.01)).is_err());
        assert!(reference_solution(&u0, &prm, 0.1, &ReferenceConfig::new(300, 0.01)).is_err());
        assert!(reference_trajectory(&u0, &prm, &[0.5, 0.2], &ReferenceConfig::new(256, 0.01)).is_err());
    }
}
