//! Fixed-point iteration of the Duhamel map
//! `Γ(u)(t) = e^{itΔ_h}u0 - iλ ∫_0^t e^{i(t-s)Δ_h} |u|^{p-1}u(s) ds`.
//!
//! Iterates live on a uniform grid of `PICARD_NODES` times in `[0, T]`. The time
//! integral is evaluated in the interaction picture `e^{-isΔ_h}F(s)` with the
//! cumulative trapezoid rule.

use num_complex::Complex64;

use super::integrators::LinearPropagator;
use super::NlsParams;
use crate::error::{LnlsError, Result};
use crate::lattice::GridFunction;

pub const PICARD_NODES: usize = 64;
pub const PICARD_ITERATIONS: usize = 8;

/// `κ = p·|λ|·T·h^{-d(p-1)/2}·(2‖u0‖)^{p-1}`, the Lipschitz constant of `Γ` on the
/// ball of radius `2‖u0‖` in `C([0,T]; L_h²)`.
pub fn contraction_factor(u0: &GridFunction, params: &NlsParams, t: f64) -> f64 {
    let lat = u0.lattice();
    let exponent = lat.dim() as f64 * (params.p - 1.0) / 2.0;
    params.p
        * params.lambda.abs()
        * t.abs()
        * lat.spacing().powf(-exponent)
        * (2.0 * u0.l2_norm()).powf(params.p - 1.0)
}

#[derive(Debug, Clone)]
pub struct PicardOutcome {
    /// The last iterate at time `T`.
    pub solution: GridFunction,
    /// `sup_t ‖Γ^{j+1} - Γ^j‖_{L_h²}` for each iteration.
    pub increments: Vec<f64>,
    pub contraction: f64,
}

/// The `n_iter`-th Picard iterate at time `t_final`, starting from the free solution.
pub fn picard_iterate(
    u0: &GridFunction,
    params: &NlsParams,
    t_final: f64,
    n_iter: usize,
) -> Result<GridFunction> {
    Ok(picard_iterate_detailed(u0, params, t_final, n_iter)?.solution)
}

pub fn picard_iterate_detailed(
    u0: &GridFunction,
    params: &NlsParams,
    t_final: f64,
    n_iter: usize,
) -> Result<PicardOutcome> {
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(LnlsError::domain(format!("T must be a nonnegative time, got {t_final}")));
    }
    let kappa = contraction_factor(u0, params, t_final);
    if kappa >= 1.0 {
        let required = t_final / kappa;
        return Err(LnlsError::domain(format!(
            "Duhamel map is not contractive: factor {kappa:.3} ≥ 1 at T = {t_final}; need T < {required:e}"
        )));
    }
    let lat = *u0.lattice();
    let n = PICARD_NODES;
    let dt = t_final / (n - 1) as f64;
    let times: Vec<f64> = (0..n).map(|j| j as f64 * dt).collect();
    let forward: Vec<LinearPropagator> = times.iter().map(|&t| LinearPropagator::new(lat, t)).collect();
    let backward: Vec<LinearPropagator> = times.iter().map(|&t| LinearPropagator::new(lat, -t)).collect();

    let free: Vec<Vec<Complex64>> = forward
        .iter()
        .map(|p| {
            let mut v = u0.values().to_vec();
            p.apply_in_place(&mut v);
            v
        })
        .collect();
    let mut iterate = free.clone();
    let mut increments = Vec::with_capacity(n_iter);
    let coef = Complex64::new(0.0, -params.lambda);
    for _ in 0..n_iter {
        // w_j = e^{-it_jΔ_h} F(u(t_j))
        let w: Vec<Vec<Complex64>> = iterate
            .iter()
            .zip(&backward)
            .map(|(u, b)| {
                let mut f: Vec<Complex64> = u.iter().map(|&z| params.nonlinearity(z)).collect();
                b.apply_in_place(&mut f);
                f
            })
            .collect();
        let mut next = Vec::with_capacity(n);
        let mut acc = vec![Complex64::new(0.0, 0.0); lat.n_points()];
        for j in 0..n {
            if j > 0 {
                for (a, (x, y)) in acc.iter_mut().zip(w[j - 1].iter().zip(&w[j])) {
                    *a += (x + y) * (0.5 * dt);
                }
            }
            let mut duhamel: Vec<Complex64> = acc.iter().map(|&a| a * coef).collect();
            forward[j].apply_in_place(&mut duhamel);
            next.push(free[j].iter().zip(&duhamel).map(|(a, b)| a + b).collect::<Vec<_>>());
        }
        let inc = next
            .iter()
            .zip(&iterate)
            .map(|(a, b)| {
                let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
                (s * lat.cell_volume()).sqrt()
            })
            .fold(0.0, f64::max);
        increments.push(inc);
        iterate = next;
    }
    let solution = GridFunction::from_raw(lat, iterate.pop().expect("at least one node"));
    Ok(PicardOutcome { solution, increments, contraction: kappa })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{linear_flow, Stepper};
    use crate::lattice::Lattice;

    fn smooth(lat: Lattice) -> GridFunction {
        GridFunction::from_fn(lat, |x| {
            Complex64::new(0.3 * x[0].cos(), 0.2 * (2.0 * x[0]).sin()) + 0.1
        })
    }

    #[test]
    fn free_limit_is_linear_flow() {
        let lat = Lattice::new(1, 8).unwrap();
        let u0 = smooth(lat);
        let out = picard_iterate(&u0, &NlsParams::without_nonlinearity(3.0), 0.7, 3).unwrap();
        assert!(out.sub(&linear_flow(&u0, 0.7)).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn rejects_non_contractive_horizon() {
        let lat = Lattice::new(1, 8).unwrap();
        let u0 = smooth(lat);
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let err = picard_iterate(&u0, &prm, 100.0, 2).unwrap_err();
        assert!(err.to_string().contains("need T <"), "{err}");
    }

    #[test]
    fn increments_decay_geometrically() {
        let lat = Lattice::new(1, 8).unwrap();
        let u0 = smooth(lat);
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let out = picard_iterate_detailed(&u0, &prm, 0.05, 6).unwrap();
        assert!(out.contraction < 1.0);
        for w in out.increments.windows(2).take(4) {
            assert!(w[1] <= w[0] * out.contraction.max(0.5), "{:?}", out.increments);
        }
    }

    #[test]
    fn agrees_with_strang() {
        let lat = Lattice::new(1, 8).unwrap();
        let u0 = smooth(lat);
        let prm = NlsParams::new(3.0, 1.0).unwrap();
        let t = 0.01;
        let picard = picard_iterate(&u0, &prm, t, PICARD_ITERATIONS).unwrap();
        let steps = 100;
        let stepper = Stepper::strang(lat, prm, t / steps as f64).unwrap();
        let mut v = u0.values().to_vec();
        for _ in 0..steps {
            stepper.step_in_place(&mut v).unwrap();
        }
        let strang = GridFunction::from_raw(lat, v);
        assert!(picard.sub(&strang).unwrap().l2_norm() < 1e-6);
    }
}
