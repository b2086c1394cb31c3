//! Experiment engine: test corpora, the continuum-limit study, uniform-bound
//! sweeps, rate fits and result persistence.

mod boundedness;
pub mod convergence;
mod corpus;
mod fit;
mod plot;
mod record;

pub use boundedness::{boundedness_sweep, interpolation_error_sweep, linf_average_sweep, LinfAverageConfig};
pub use convergence::{
    decompose_error, dyadic_h_list, growth_at, linear_growth_check, run_convergence, ConvergenceReport,
    ConvergenceStudy, ErrorDecomposition, REFERENCE_INDEPENDENCE_TOL,
};
pub use corpus::{
    continuum_sobolev_norm, discretize_corpus, smooth_corpus, stress_corpus, top_frequency_packet, ProfileSpec,
};
pub use fit::{
    fit_rate, fit_rate_records, growth_fit, max_ratio_by_h, uniformity, GrowthFit, RateFit, Uniformity,
    UNIFORMITY_BAND,
};
pub use plot::{rate_tsv, svg_line_chart};
pub use record::{fmt_float, read_jsonl, write_csv, write_jsonl, ExperimentRecord, CSV_HEADER};

use crate::estimates::simpson;

/// `∫ f` over equally spaced samples: Simpson for an odd count ≥ 3, trapezoid otherwise.
pub(crate) fn quadrature_in_time(f: &[f64], dt: f64) -> f64 {
    match f.len() {
        0 | 1 => 0.0,
        n if n % 2 == 1 => simpson(f, dt),
        n => dt * (f[1..n - 1].iter().sum::<f64>() + 0.5 * (f[0] + f[n - 1])),
    }
}

#[cfg(test)]
mod tests {
    use super::quadrature_in_time;

    #[test]
    fn time_quadrature_both_parities() {
        let lin = |n: usize| (0..n).map(|i| i as f64 / (n - 1) as f64).collect::<Vec<_>>();
        assert!((quadrature_in_time(&lin(5), 0.25) - 0.5).abs() < 1e-14);
        assert!((quadrature_in_time(&lin(4), 1.0 / 3.0) - 0.5).abs() < 1e-14);
        assert_eq!(quadrature_in_time(&[3.0], 0.1), 0.0);
    }
}
