//! Ratio sweeps for the lattice Sobolev, Gagliardo–Nirenberg and Bernstein
//! inequalities. Each record carries `lhs / rhs`; the zero function has ratio 0.

use serde::{Deserialize, Serialize};

use super::{dyadic_scales, lp_project, sobolev_norm};
use crate::error::{LnlsError, Result};
use crate::harness::ExperimentRecord;
use crate::lattice::GridFunction;

const TOL: f64 = 1e-12;

/// Which inequality to measure, with its exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InequalityKind {
    /// `‖u‖_{L^q} ≲ ‖u‖_{H^{s+ε}}`, with `1/q = 1/2 - s/d`, `0 < s ≤ d/2`.
    Sobolev { s: f64, q: f64, epsilon: f64 },
    /// `‖f‖_{L^p} ≲ ‖f‖_{L²}^{1-θ} ‖f‖_{H¹}^θ`, with `1/p = 1/2 - θ/d`, `0 < θ < 1`.
    GagliardoNirenberg { theta: f64, p: f64 },
    /// `‖P_N u‖_{L^q} ≲ (N/h)^s ‖u‖_{L²}` for every dyadic `N`, same exponent relation as Sobolev.
    Bernstein { s: f64, q: f64 },
}

impl InequalityKind {
    pub fn name(&self) -> &'static str {
        match self {
            InequalityKind::Sobolev { .. } => "sobolev",
            InequalityKind::GagliardoNirenberg { .. } => "gagliardo_nirenberg",
            InequalityKind::Bernstein { .. } => "bernstein",
        }
    }

    /// Sobolev-type exponents with `q` derived from `s`: `1/q = 1/2 - s/d`.
    pub fn sobolev(d: usize, s: f64, epsilon: f64) -> Self {
        InequalityKind::Sobolev { s, q: exponent_from(d, s), epsilon }
    }

    pub fn gagliardo_nirenberg(d: usize, theta: f64) -> Self {
        InequalityKind::GagliardoNirenberg { theta, p: exponent_from(d, theta) }
    }

    pub fn bernstein(d: usize, s: f64) -> Self {
        InequalityKind::Bernstein { s, q: exponent_from(d, s) }
    }

    /// Checks the hypotheses for dimension `d`, naming the failed constraint.
    pub fn validate(&self, d: usize) -> Result<()> {
        let df = d as f64;
        match *self {
            InequalityKind::Sobolev { s, q, epsilon } => {
                check_sobolev_exponents(df, s, q)?;
                if !(epsilon > 0.0) {
                    return Err(LnlsError::domain(format!("ε > 0 required, got {epsilon}")));
                }
            }
            InequalityKind::Bernstein { s, q } => check_sobolev_exponents(df, s, q)?,
            InequalityKind::GagliardoNirenberg { theta, p } => {
                if !(theta > 0.0 && theta < 1.0) {
                    return Err(LnlsError::domain(format!("0 < θ < 1 required, got θ = {theta}")));
                }
                if !(p > 1.0) {
                    return Err(LnlsError::domain(format!("1 < p ≤ ∞ required, got p = {p}")));
                }
                if (1.0 / p - (0.5 - theta / df)).abs() > TOL {
                    return Err(LnlsError::domain(format!(
                        "1/p = 1/2 - θ/d violated: p = {p}, θ = {theta}, d = {d}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn exponent_from(d: usize, s: f64) -> f64 {
    let inv = 0.5 - s / d as f64;
    if inv.abs() < TOL {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

fn check_sobolev_exponents(d: f64, s: f64, q: f64) -> Result<()> {
    if !(s > 0.0 && s <= 0.5 * d + TOL) {
        return Err(LnlsError::domain(format!("0 < s ≤ d/2 required, got s = {s}, d = {d}")));
    }
    if !(q >= 2.0) {
        return Err(LnlsError::domain(format!("q ≥ 2 required, got q = {q}")));
    }
    if (1.0 / q - (0.5 - s / d)).abs() > TOL {
        return Err(LnlsError::domain(format!(
            "1/q = 1/2 - s/d violated: q = {q}, s = {s}, d = {d}"
        )));
    }
    Ok(())
}

fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / rhs
    }
}

/// Emits one record per corpus element (per dyadic scale for Bernstein).
///
/// `tags` labels corpus elements in the record metadata; it may be shorter than
/// the corpus, in which case the index is used.
pub fn inequality_sweep(
    kind: InequalityKind,
    corpus: &[GridFunction],
    tags: &[String],
) -> Result<Vec<ExperimentRecord>> {
    let mut out = Vec::new();
    for (i, u) in corpus.iter().enumerate() {
        let lat = *u.lattice();
        kind.validate(lat.dim())?;
        let h = lat.spacing();
        let tag = tags.get(i).cloned().unwrap_or_else(|| i.to_string());
        let base = |value: f64| {
            ExperimentRecord::new(kind.name(), h, value)
                .with_meta("profile", &tag)
                .with_meta("d", lat.dim())
        };
        match kind {
            InequalityKind::Sobolev { s, q, epsilon } => {
                let lhs = u.norm(q);
                let rhs = sobolev_norm(u, s + epsilon);
                out.push(
                    base(lhs).with_r(q).with_epsilon(epsilon).with_ratio(ratio(lhs, rhs)).with_meta("s", s),
                );
            }
            InequalityKind::GagliardoNirenberg { theta, p } => {
                let lhs = u.norm(p);
                let rhs = u.l2_norm().powf(1.0 - theta) * sobolev_norm(u, 1.0).powf(theta);
                out.push(base(lhs).with_r(p).with_ratio(ratio(lhs, rhs)).with_meta("theta", theta));
            }
            InequalityKind::Bernstein { s, q } => {
                let l2 = u.l2_norm();
                for n in dyadic_scales(&lat) {
                    let lhs = lp_project(u, n)?.norm(q);
                    let rhs = (n.value() / h).powf(s) * l2;
                    out.push(
                        base(lhs)
                            .with_n(n.value())
                            .with_r(q)
                            .with_ratio(ratio(lhs, rhs))
                            .with_meta("s", s),
                    );
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Lattice;
    use approx::assert_relative_eq;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn exponent_relations() {
        assert_eq!(InequalityKind::sobolev(2, 0.5, 0.1), InequalityKind::Sobolev { s: 0.5, q: 4.0, epsilon: 0.1 });
        match InequalityKind::bernstein(2, 1.0) {
            InequalityKind::Bernstein { q, .. } => assert!(q.is_infinite()),
            _ => unreachable!(),
        }
        assert!(InequalityKind::gagliardo_nirenberg(2, 0.5).validate(2).is_ok());
    }

    #[test]
    fn hypothesis_violations_name_the_constraint() {
        let bad = InequalityKind::Sobolev { s: 0.5, q: 5.0, epsilon: 0.1 };
        let msg = bad.validate(2).unwrap_err().to_string();
        assert!(msg.contains("1/q = 1/2 - s/d"), "{msg}");
        let msg = InequalityKind::Sobolev { s: 1.5, q: 4.0, epsilon: 0.1 }.validate(2).unwrap_err().to_string();
        assert!(msg.contains("s ≤ d/2"), "{msg}");
        let msg = InequalityKind::GagliardoNirenberg { theta: 1.0, p: f64::INFINITY }
            .validate(2)
            .unwrap_err()
            .to_string();
        assert!(msg.contains("θ < 1"), "{msg}");
        let msg = InequalityKind::Sobolev { s: 0.5, q: 4.0, epsilon: 0.0 }.validate(2).unwrap_err().to_string();
        assert!(msg.contains("ε > 0"), "{msg}");
        let lat = Lattice::new(2, 4).unwrap();
        assert!(inequality_sweep(bad, &[GridFunction::zeros(lat)], &[]).is_err());
    }

    #[test]
    fn zero_function_has_zero_ratio() {
        let lat = Lattice::new(2, 4).unwrap();
        for kind in [
            InequalityKind::sobolev(2, 0.5, 0.1),
            InequalityKind::gagliardo_nirenberg(2, 0.5),
            InequalityKind::bernstein(2, 1.0),
        ] {
            for rec in inequality_sweep(kind, &[GridFunction::zeros(lat)], &[]).unwrap() {
                assert_eq!(rec.ratio, Some(0.0));
            }
        }
    }

    #[test]
    fn gagliardo_nirenberg_on_constants() {
        // ‖c‖_p / (‖c‖_2^{1-θ} ‖c‖_{H¹}^θ) = (2π)^{d/p - d/2} for constants
        let lat = Lattice::new(2, 8).unwrap();
        let c = GridFunction::constant(lat, Complex64::new(0.7, -0.2));
        let rec = &inequality_sweep(InequalityKind::gagliardo_nirenberg(2, 0.5), &[c], &[]).unwrap()[0];
        let expected = (2.0 * PI).powf(2.0 / 4.0 - 1.0);
        assert_relative_eq!(rec.ratio.unwrap(), expected, max_relative = 1e-12);
        assert!(rec.ratio.unwrap() <= 1.0);
    }

    #[test]
    fn bernstein_emits_one_record_per_scale() {
        let lat = Lattice::new(1, 8).unwrap();
        let u = GridFunction::plane_wave(lat, &[3]);
        let recs = inequality_sweep(InequalityKind::bernstein(1, 0.5), &[u], &["mode".into()]).unwrap();
        assert_eq!(recs.len(), dyadic_scales(&lat).len());
        // only the annulus containing k = 3 is non-empty
        let nonzero: Vec<_> = recs.iter().filter(|r| r.value > 1e-12).collect();
        assert_eq!(nonzero.len(), 1);
        assert_eq!(nonzero[0].n, Some(0.5));
        assert_eq!(nonzero[0].meta("profile"), Some("mode"));
    }
}
