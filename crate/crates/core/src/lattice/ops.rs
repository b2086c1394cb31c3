//! Pointwise and stencil operators on grid functions.

use num_complex::Complex64;

use super::{lebesgue_norm, GridFunction};
use crate::error::{LnlsError, Result};

/// Returns `(‖uv‖_{L_h^r}, ‖u‖_{L_h^p}·‖v‖_{L_h^q})` for `1/p + 1/q = 1/r`.
pub fn holder_check(u: &GridFunction, v: &GridFunction, p: f64, q: f64, r: f64) -> Result<(f64, f64)> {
    u.lattice().check_same(v.lattice())?;
    let mismatch = (1.0 / p + 1.0 / q - 1.0 / r).abs();
    if mismatch > 1e-12 {
        return Err(LnlsError::domain(format!(
            "Hölder exponents must satisfy 1/p + 1/q = 1/r (off by {mismatch:e})"
        )));
    }
    let lhs = lebesgue_norm(&u.mul(v)?, r)?;
    let rhs = lebesgue_norm(u, p)? * lebesgue_norm(v, q)?;
    Ok((lhs, rhs))
}

/// `(u*v)(x) = h^d Σ_y u(x-y) v(y)` by direct summation.
///
/// Cost is quadratic in the number of points; [`crate::spectral::convolve_spectral`]
/// is the fast route.
pub fn convolve(u: &GridFunction, v: &GridFunction) -> Result<GridFunction> {
    u.lattice().check_same(v.lattice())?;
    let lat = *u.lattice();
    let n = lat.side();
    let vol = lat.cell_volume();
    let out: Vec<Complex64> = (0..lat.n_points())
        .map(|x| {
            let xs = lat.unflat(x);
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..lat.n_points() {
                let ys = lat.unflat(y);
                let mut diff = [0usize; 2];
                for j in 0..lat.dim() {
                    diff[j] = (xs[j] + n - ys[j]) % n;
                }
                // slot arithmetic: coordinate(x) - coordinate(y) sits at slot xs - ys + M
                for d in diff.iter_mut().take(lat.dim()) {
                    *d = (*d + lat.half_size()) % n;
                }
                acc += u.values()[lat.flat(&diff[..lat.dim()])] * v.values()[y];
            }
            acc * vol
        })
        .collect();
    Ok(GridFunction::from_raw(lat, out))
}

fn check_axis(u: &GridFunction, axis: usize) -> Result<()> {
    if axis >= u.lattice().dim() {
        return Err(LnlsError::domain(format!(
            "axis {axis} out of range for a {}-dimensional lattice (axes are 0-based)",
            u.lattice().dim()
        )));
    }
    Ok(())
}

/// `D_{h,j}^+ u(x) = (u(x + h e_j) - u(x)) / h`, axis `j` 0-based.
pub fn forward_difference(u: &GridFunction, axis: usize) -> Result<GridFunction> {
    check_axis(u, axis)?;
    let lat = *u.lattice();
    let h = lat.spacing();
    let vals = u.values();
    let out = (0..lat.n_points())
        .map(|i| (vals[lat.shifted(i, axis, 1)] - vals[i]) / h)
        .collect();
    Ok(GridFunction::from_raw(lat, out))
}

/// `D_{h,j}^- u(x) = (u(x) - u(x - h e_j)) / h`, the adjoint partner of `-D^+`.
pub fn backward_difference(u: &GridFunction, axis: usize) -> Result<GridFunction> {
    check_axis(u, axis)?;
    let lat = *u.lattice();
    let h = lat.spacing();
    let vals = u.values();
    let out = (0..lat.n_points())
        .map(|i| (vals[i] - vals[lat.shifted(i, axis, -1)]) / h)
        .collect();
    Ok(GridFunction::from_raw(lat, out))
}

/// `Δ_h u(x) = Σ_j (u(x + h e_j) + u(x - h e_j) - 2u(x)) / h²`.
pub fn discrete_laplacian_stencil(u: &GridFunction) -> GridFunction {
    let lat = *u.lattice();
    let inv_h2 = 1.0 / (lat.spacing() * lat.spacing());
    let vals = u.values();
    let out = (0..lat.n_points())
        .map(|i| {
            let mut acc = Complex64::new(0.0, 0.0);
            for axis in 0..lat.dim() {
                acc += vals[lat.shifted(i, axis, 1)] + vals[lat.shifted(i, axis, -1)] - 2.0 * vals[i];
            }
            acc * inv_h2
        })
        .collect();
    GridFunction::from_raw(lat, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random(lat: Lattice, seed: u64) -> GridFunction {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = (0..lat.n_points())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        GridFunction::new(lat, v).unwrap()
    }

    fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn holder_equality_for_constants() {
        let lat = Lattice::new(1, 8).unwrap();
        let one = GridFunction::constant(lat, Complex64::new(1.0, 0.0));
        let (lhs, rhs) = holder_check(&one, &one, 4.0, 4.0, 2.0).unwrap();
        assert_relative_eq!(lhs, (2.0 * PI).sqrt(), max_relative = 1e-13);
        assert_relative_eq!(rhs, (2.0 * PI).sqrt(), max_relative = 1e-13);
        let (lhs0, rhs0) = holder_check(&GridFunction::zeros(lat), &one, 4.0, 4.0, 2.0).unwrap();
        assert_eq!(lhs0, 0.0);
        assert!(rhs0 == 0.0);
    }

    #[test]
    fn holder_inequality_on_random_data() {
        let lat = Lattice::new(1, 4).unwrap();
        for seed in 0..50 {
            let u = random(lat, seed);
            let v = random(lat, seed + 1000);
            for (p, q, r) in [(2.0, 2.0, 1.0), (4.0, 4.0, 2.0), (3.0, 6.0, 2.0), (f64::INFINITY, 2.0, 2.0)] {
                let (lhs, rhs) = holder_check(&u, &v, p, q, r).unwrap();
                assert!(lhs <= rhs * (1.0 + 1e-10), "{lhs} > {rhs}");
            }
        }
    }

    #[test]
    fn holder_rejects_bad_exponents_and_lattices() {
        let a = GridFunction::zeros(Lattice::new(1, 4).unwrap());
        let b = GridFunction::zeros(Lattice::new(1, 8).unwrap());
        assert!(matches!(holder_check(&a, &a, 2.0, 2.0, 2.0), Err(LnlsError::Domain(_))));
        assert!(matches!(holder_check(&a, &b, 2.0, 2.0, 1.0), Err(LnlsError::Shape(_))));
    }

    #[test]
    fn convolution_identity_and_constants() {
        let lat = Lattice::new(2, 2).unwrap();
        let u = random(lat, 7);
        let mut delta = GridFunction::zeros(lat);
        let origin = lat.flat(&[2, 2]);
        delta.values_mut()[origin] = Complex64::new(1.0 / lat.cell_volume(), 0.0);
        assert!(max_diff(&convolve(&u, &delta).unwrap(), &u) < 1e-13);

        let one = GridFunction::constant(lat, Complex64::new(1.0, 0.0));
        let c = convolve(&one, &one).unwrap();
        for z in c.values() {
            assert_relative_eq!(z.re, (2.0 * PI).powi(2), max_relative = 1e-13);
        }
    }

    #[test]
    fn convolution_commutes() {
        let lat = Lattice::new(1, 8).unwrap();
        let u = random(lat, 1);
        let v = random(lat, 2);
        assert!(max_diff(&convolve(&u, &v).unwrap(), &convolve(&v, &u).unwrap()) < 1e-12);
    }

    #[test]
    fn forward_difference_on_exponentials_and_constants() {
        let lat = Lattice::new(1, 8).unwrap();
        let h = lat.spacing();
        let c = GridFunction::constant(lat, Complex64::new(2.0, -1.0));
        assert!(forward_difference(&c, 0).unwrap().sup_norm() == 0.0);
        let k = 3;
        let u = GridFunction::plane_wave(lat, &[k]);
        let du = forward_difference(&u, 0).unwrap();
        let factor = (Complex64::from_polar(1.0, k as f64 * h) - 1.0) / h;
        for (a, b) in du.values().iter().zip(u.values()) {
            assert!((a - b * factor).norm() < 1e-12);
        }
        assert!(matches!(forward_difference(&u, 1), Err(LnlsError::Domain(_))));
    }

    #[test]
    fn summation_by_parts() {
        for dim in [1, 2] {
            let lat = Lattice::new(dim, 8).unwrap();
            let u = random(lat, 11);
            let v = random(lat, 12);
            for axis in 0..dim {
                let lhs = forward_difference(&u, axis).unwrap().inner(&v).unwrap();
                let rhs = -u.inner(&backward_difference(&v, axis).unwrap()).unwrap();
                assert!((lhs - rhs).norm() < 1e-12 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn stencil_laplacian_on_mode() {
        let lat = Lattice::new(1, 2).unwrap();
        let u = GridFunction::plane_wave(lat, &[1]);
        let lu = discrete_laplacian_stencil(&u);
        let expected = -8.0 / (PI * PI);
        for (a, b) in lu.values().iter().zip(u.values()) {
            assert!((a - b * expected).norm() < 1e-14);
        }
        let c = GridFunction::constant(lat, Complex64::new(3.0, 0.0));
        assert!(discrete_laplacian_stencil(&c).sup_norm() < 1e-14);
    }
}
