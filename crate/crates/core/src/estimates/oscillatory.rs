//! The oscillatory integral `I_{N,h,t,x} = ∫_{-πN/h}^{πN/h} e^{iφ(ξ)} dξ` with
//! `φ(ξ) = xξ - (2t/h²)(1 - cos hξ)`, and its gap to the integer sum.

use num_complex::Complex64;

use super::quadrature::gauss_kronrod_adaptive;
use crate::error::Result;
use crate::spectral::DyadicScale;
use crate::lattice::Lattice;

pub(crate) fn phase(x: f64, t: f64, h: f64, xi: f64) -> f64 {
    x * xi - 2.0 * t / (h * h) * (1.0 - (h * xi).cos())
}

/// `I_{N,h,t,x}` by adaptive Gauss–Kronrod quadrature.
pub fn oscillatory_integral(n: DyadicScale, lat: &Lattice, t: f64, x: f64) -> Result<Complex64> {
    let h = lat.spacing();
    let radius = n.outer_radius(lat);
    let f = move |xi: f64| Complex64::from_polar(1.0, phase(x, t, h, xi));
    // roughly one panel per unit of ξ resolves the phase at desk scales
    let panels = (2.0 * radius).ceil().max(4.0) as usize;
    let tol = 1e-10 * (2.0 * radius).max(1.0);
    gauss_kronrod_adaptive(&f, -radius, radius, tol, panels, 1 << 20)
}

/// `sup_{|ξ| ≤ πN/h} |φ'(ξ)| ≤ |x| + 2|t|/h · sup|sin hξ|`.
pub fn phase_derivative_bound(n: DyadicScale, lat: &Lattice, t: f64, x: f64) -> f64 {
    let h = lat.spacing();
    let arg = (h * n.outer_radius(lat)).min(std::f64::consts::FRAC_PI_2);
    x.abs() + 2.0 * t.abs() / h * arg.sin()
}

/// `|Σ_{|k| ≤ πN/h} e^{iφ(k)} - I_{N,h,t,x}|`.
pub fn zygmund_gap(n: DyadicScale, lat: &Lattice, t: f64, x: f64) -> Result<f64> {
    let h = lat.spacing();
    let kmax = n.outer_radius(lat).floor() as i64;
    let sum: Complex64 = (-kmax..=kmax).map(|k| Complex64::from_polar(1.0, phase(x, t, h, k as f64))).sum();
    Ok((sum - oscillatory_integral(n, lat, t, x)?).norm())
}
