//! Composite Simpson and adaptive Gauss–Kronrod (7/15) quadrature for complex integrands.

use num_complex::Complex64;

use crate::error::{LnlsError, Result};

/// Composite Simpson rule over equally spaced samples; the sample count must be odd (≥ 3).
pub fn simpson(values: &[f64], dx: f64) -> f64 {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "Simpson needs an odd number of samples ≥ 3, got {n}");
    let mut s = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    s * dx / 3.0
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
/// Gauss weights for the nodes `XGK[1], XGK[3], XGK[5], XGK[7]`.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let hw = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = hw * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let k = kronrod * hw;
    let g = gauss * hw;
    (k, (k - g).norm())
}

/// `∫_a^b f` to absolute tolerance `tol` by recursive bisection of 15-point Kronrod panels.
///
/// The interval is first split into `initial_panels` equal pieces. Fails with an
/// accuracy error when the panel budget `max_panels` is exhausted.
pub fn gauss_kronrod_adaptive(
    f: &dyn Fn(f64) -> Complex64,
    a: f64,
    b: f64,
    tol: f64,
    initial_panels: usize,
    max_panels: usize,
) -> Result<Complex64> {
    if a == b {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut stack: Vec<(f64, f64, f64)> = (0..n0)
        .map(|i| (a + i as f64 * width, a + (i + 1) as f64 * width, tol / n0 as f64))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut panels = 0usize;
    while let Some((lo, hi, budget)) = stack.pop() {
        panels += 1;
        if panels > max_panels {
            return Err(LnlsError::Accuracy(format!(
                "adaptive quadrature on [{a}, {b}] did not reach tolerance {tol:e} within {max_panels} panels"
            )));
        }
        let (val, err) = gk15(f, lo, hi);
        if err <= budget || (hi - lo) < 1e-12 * (b - a).abs() {
            total += val;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * budget));
            stack.push((mid, hi, 0.5 * budget));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn simpson_is_exact_for_cubics() {
        let xs: Vec<f64> = (0..9).map(|i| i as f64 / 8.0).collect();
        let v: Vec<f64> = xs.iter().map(|x| 2.0 * x * x * x - x + 1.0).collect();
        assert_relative_eq!(simpson(&v, 1.0 / 8.0), 0.5 - 0.5 + 1.0, max_relative = 1e-14);
    }

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert_relative_eq!(s, 2.0, max_relative = 1e-14);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert_relative_eq!(g, 2.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_exponential() {
        // ∫_{-L}^{L} e^{iωx} dx = 2 sin(ωL)/ω
        let (w, l) = (37.3, 5.0);
        let f = |x: f64| Complex64::from_polar(1.0, w * x);
        let v = gauss_kronrod_adaptive(&f, -l, l, 1e-12, 4, 100_000).unwrap();
        assert!((v - Complex64::new(2.0 * (w * l).sin() / w, 0.0)).norm() < 1e-11);
    }

    #[test]
    fn reports_budget_exhaustion() {
        let f = |x: f64| Complex64::from_polar(1.0, 1e6 * x * x);
        let err = gauss_kronrod_adaptive(&f, 0.0, 10.0, 1e-14, 1, 10).unwrap_err();
        assert!(err.is_numerical());
    }
}
