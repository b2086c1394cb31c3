//! End-to-end acceptance checks. Each criterion prints one `PASS` / `FAIL` line
//! with its measured numbers; the test fails if any criterion fails. It runs
//! without the libtest harness so the lines are never captured.

use std::f64::consts::PI;
use std::time::Instant;

use lnls_core::dynamics::{evolve, step_rk4, EvolutionConfig, Integrator, NlsParams, Stepper};
use lnls_core::estimates::{
    dispersive_bound_sweep, strichartz_sweep, AdmissiblePair, KernelQuery, StrichartzQuery, STRICHARTZ_T_NODES,
};
use lnls_core::harness::{
    discretize_corpus, dyadic_h_list, fit_rate_records, interpolation_error_sweep, linear_growth_check,
    linf_average_sweep, max_ratio_by_h, run_convergence, smooth_corpus, stress_corpus, uniformity,
    ConvergenceStudy, LinfAverageConfig,
};
use lnls_core::lattice::{discrete_laplacian_stencil, forward_difference, GridFunction, Lattice};
use lnls_core::spectral::{
    apply_multiplier, dual_flat, dual_index, dyadic_scales, forward, inequality_sweep, inverse, laplacian_symbol,
    sobolev_norm, InequalityKind,
};
use lnls_core::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn random_grid(lat: Lattice, rng: &mut ChaCha8Rng) -> GridFunction {
    GridFunction::from_fn(lat, |_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn rel(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum::<f64>().sqrt();
    num / den.max(f64::MIN_POSITIVE)
}

fn dot(k: &[i64; 2], x: &[f64; 2], d: usize) -> f64 {
    (0..d).map(|j| k[j] as f64 * x[j]).sum()
}

/// Direct O(n²) transform pair.
fn dft_oracle(u: &GridFunction) -> (Vec<Complex64>, Vec<Complex64>) {
    let lat = *u.lattice();
    let d = lat.dim();
    let n = lat.n_points();
    let fwd: Vec<Complex64> = (0..n)
        .map(|ki| {
            let k = dual_index(&lat, ki);
            (0..n).map(|xi| u.values()[xi] * Complex64::from_polar(1.0, -dot(&k, &lat.point(xi), d))).sum::<Complex64>()
                * lat.cell_volume()
        })
        .collect();
    let inv: Vec<Complex64> = (0..n)
        .map(|xi| {
            let x = lat.point(xi);
            (0..n).map(|ki| fwd[ki] * Complex64::from_polar(1.0, dot(&dual_index(&lat, ki), &x, d))).sum::<Complex64>()
                / (2.0 * PI).powi(d as i32)
        })
        .collect();
    (fwd, inv)
}

fn spectral_correctness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_dft, mut worst_id) = (0.0f64, 0.0f64);
    for d in [1, 2] {
        for m in [2, 4, 8, 16] {
            let lat = Lattice::new(d, m).unwrap();
            let u = random_grid(lat, &mut rng);
            let (fwd, inv) = dft_oracle(&u);
            let spec = forward(&u);
            worst_dft = worst_dft.max(rel(spec.values(), &fwd));
            let back = inverse(&spec);
            worst_dft = worst_dft.max(rel(back.values(), &inv)).max(rel(back.values(), u.values()));
            let plancherel = (spec.plancherel_mass() - u.l2_norm().powi(2)).abs() / u.l2_norm().powi(2);
            worst_id = worst_id.max(plancherel);
        }
    }
    // product identity on an 8-point lattice: F(uv)(k) = (2π)^{-d} Σ_{k'} û(k') v̂(k - k')
    for d in [1, 2] {
        let lat = Lattice::new(d, 4).unwrap();
        let (u, v) = (random_grid(lat, &mut rng), random_grid(lat, &mut rng));
        let (fu, fv) = (forward(&u), forward(&v));
        let m = lat.half_size() as i64;
        let wrap = |k: i64| (k + m).rem_euclid(2 * m) - m;
        let oracle: Vec<Complex64> = (0..lat.n_points())
            .map(|ki| {
                let k = dual_index(&lat, ki);
                let s: Complex64 = (0..lat.n_points())
                    .map(|pi| {
                        let kp = dual_index(&lat, pi);
                        let diff = [wrap(k[0] - kp[0]), wrap(k[1] - kp[1])];
                        fu.values()[pi] * fv.values()[dual_flat(&lat, &diff[..d])]
                    })
                    .sum();
                s / (2.0 * PI).powi(d as i32)
            })
            .collect();
        worst_id = worst_id.max(rel(forward(&u.mul(&v).unwrap()).values(), &oracle));
    }
    (
        worst_dft <= 1e-12 && worst_id <= 1e-10,
        format!("max rel. deviation from direct DFT {worst_dft:.2e} (≤ 1e-12), Plancherel/product {worst_id:.2e} (≤ 1e-10)"),
    )
}

fn operator_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst_lap = 0.0f64;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..1000 {
        let d = 1 + i % 2;
        let m = [2, 4, 8, 16][(i / 2) % 4];
        let lat = Lattice::new(d, m).unwrap();
        let u = random_grid(lat, &mut rng);
        if i < 40 {
            let spectral = apply_multiplier(&laplacian_symbol(lat), &u).unwrap().scale(Complex64::new(-1.0, 0.0));
            worst_lap = worst_lap.max(rel(spectral.values(), discrete_laplacian_stencil(&u).values()));
        }
        let grad: f64 = (0..d).map(|j| forward_difference(&u, j).unwrap().l2_norm().powi(2)).sum();
        let ratio = sobolev_norm(&u, 1.0) / (u.l2_norm().powi(2) + grad).sqrt();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    // |D⁺| symbol (2/h)|sin(hk/2)| lies between (2/π)|k| and |k| on the dual lattice
    let band = lo >= 1.0 - 1e-12 && hi <= PI / 2.0 + 1e-12;
    (
        worst_lap <= 1e-12 && band,
        format!(
            "multiplier vs stencil Laplacian {worst_lap:.2e} (≤ 1e-12); ‖u‖_H¹ / (‖u‖² + ‖D⁺u‖²)^½ ∈ [{lo:.4}, {hi:.4}] ⊂ [1, π/2] on 10³ functions"
        ),
    )
}

fn conservation() -> Outcome {
    let lat = Lattice::new(1, 32).unwrap();
    let params = NlsParams::new(3.0, 1.0).unwrap();
    let u0 = GridFunction::from_fn(lat, |x| Complex64::new((-2.0 * x[0] * x[0]).exp(), 0.3 * x[0].sin()));
    let long = evolve(&u0, &params, &EvolutionConfig { record_stride: 100, ..EvolutionConfig::strang(1e-3, 10.0) }).unwrap();
    let steps = long.config.n_steps();
    let mass = long.mass_drift();
    let drift = |dt: f64| evolve(&u0, &params, &EvolutionConfig::strang(dt, 1.0)).unwrap().energy_drift();
    let (e1, e2, e3) = (drift(0.02), drift(0.01), drift(0.005));
    let (r1, r2) = (e1 / e2, e2 / e3);
    let ok = steps >= 10_000 && mass <= 1e-11 && (3.2..=4.8).contains(&r1) && (3.2..=4.8).contains(&r2);
    (
        ok,
        format!(
            "mass drift {mass:.2e} over {steps} Strang steps (≤ 1e-11); energy drift ratios dt→dt/2: {r1:.3}, {r2:.3} (∈ [3.2, 4.8])"
        ),
    )
}

fn exact_solution() -> Outcome {
    let lat = Lattice::new(2, 16).unwrap();
    let params = NlsParams::new(3.0, 1.0).unwrap();
    let (k0, amp) = ([2i64, -3], 0.7);
    let sigma = laplacian_symbol(lat).at(&k0).re;
    let omega = sigma + params.lambda * amp * amp;
    let exact = |t: f64| GridFunction::plane_wave(lat, &k0).scale(Complex64::from_polar(amp, -omega * t));
    let dt = 1e-3;
    let stepper = Stepper::strang(lat, params, dt).unwrap();
    let mut u = exact(0.0);
    for _ in 0..1000 {
        u = stepper.step(&u).unwrap();
    }
    let strang_err = u.sub(&exact(1.0)).unwrap().l2_norm();

    // RK4 against a fine Strang run on smooth data, and against the plane wave, over t ∈ [0, 1]
    let lat1 = Lattice::new(1, 16).unwrap();
    let u0 = GridFunction::from_fn(lat1, |x| Complex64::new((-x[0] * x[0]).exp(), 0.0));
    let rk = evolve(&u0, &params, &EvolutionConfig { integrator: Integrator::Rk4, ..EvolutionConfig::strang(5e-3, 1.0) })
        .unwrap();
    let st = evolve(&u0, &params, &EvolutionConfig::strang(5e-5, 1.0)).unwrap();
    let cross = rk.last().sub(st.last()).unwrap().l2_norm();
    let pw = Lattice::new(1, 16).unwrap();
    let pw_exact = |t: f64| {
        let om = laplacian_symbol(pw).at(&[3]).re + amp * amp;
        GridFunction::plane_wave(pw, &[3]).scale(Complex64::from_polar(amp, -om * t))
    };
    let mut v = pw_exact(0.0);
    for _ in 0..200 {
        v = step_rk4(&v, &params, 5e-3).unwrap();
    }
    let rk_pw = v.sub(&pw_exact(1.0)).unwrap().l2_norm();
    (
        strang_err <= 1e-10 && cross <= 1e-6 && rk_pw <= 1e-6,
        format!(
            "plane wave after 1000 Strang steps: L² error {strang_err:.2e} (≤ 1e-10); RK4 vs fine Strang at t = 1: {cross:.2e}, RK4 vs plane wave: {rk_pw:.2e} (≤ 1e-6)"
        ),
    )
}

fn interpolation_rate() -> Outcome {
    let hs = dyadic_h_list(5);
    let specs = smooth_corpus(7);
    let recs = interpolation_error_sweep(2, &specs, &hs, 8).unwrap();
    let spread = uniformity(&max_ratio_by_h(&recs).iter().map(|p| p.1).collect::<Vec<_>>());
    let mut min_slope = f64::INFINITY;
    for s in &specs {
        let mine: Vec<_> = recs.iter().filter(|r| r.meta("profile") == Some(&s.name())).cloned().collect();
        min_slope = min_slope.min(fit_rate_records(&mine).unwrap().slope);
    }
    (
        spread.pass && min_slope >= 0.9,
        format!(
            "max ‖(p_h∘d_h)f - f‖/(h‖f‖_H¹) varies by {:.3}× over h = π/8…π/128 (< 3); min slope {min_slope:.3} (≥ 0.9)",
            spread.variation
        ),
    )
}

fn continuum_rate(linear: bool) -> Outcome {
    let base = ConvergenceStudy::default();
    let study = if linear { base.linearized() } else { base };
    let rep = match run_convergence(&study) {
        Ok(r) => r,
        Err(e) => return (false, format!("study aborted: {e}")),
    };
    let slopes: Vec<(f64, f64)> = rep.fits.iter().filter(|(t, _)| *t > 0.0).map(|(t, f)| (*t, f.slope)).collect();
    let min_slope = slopes.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let listing: Vec<String> = slopes.iter().map(|(t, s)| format!("t={t}: {s:.3}")).collect();
    let mut ok = min_slope >= 0.45 && rep.max_reference_change < 0.05;
    let mut extra = String::new();
    if linear {
        let growth = linear_growth_check(&rep);
        let worst = growth.iter().map(|(_, u)| u.variation).fold(0.0, f64::max);
        ok &= growth.iter().all(|(_, u)| u.pass);
        extra = format!("; error/(√h⟨t⟩) spread over t ≤ {worst:.3}× (< 3)");
    }
    (
        ok,
        format!(
            "slopes {} (≥ 0.45); reference change {:.2e} (< 5%){extra}",
            listing.join(", "),
            rep.max_reference_change
        ),
    )
}

fn dispersive_uniformity() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for d in [1, 2] {
        let mut per_h = Vec::new();
        for h in dyadic_h_list(5) {
            let lat = Lattice::from_spacing(d, h).unwrap();
            let mut best = 0.0f64;
            for n in dyadic_scales(&lat).into_iter().skip(1) {
                for r in dispersive_bound_sweep(&KernelQuery::new(lat, n)).unwrap() {
                    best = best.max(r.ratio.unwrap());
                }
            }
            per_h.push(best);
        }
        let u = uniformity(&per_h);
        ok &= u.pass;
        parts.push(format!("d={d}: max ρ ∈ [{:.4}, {:.4}], {:.3}×", u.min, u.max, u.variation));
    }
    (ok, format!("{} (< 3) over h = π/8…π/128, t ≤ 0.1·h/N", parts.join("; ")))
}

fn strichartz_uniformity() -> Outcome {
    let specs = smooth_corpus(7);
    let builder = move |lat: &Lattice| discretize_corpus(&specs, lat).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for (q, r) in [(3.0, f64::INFINITY), (6.0, 4.0)] {
        let pair = AdmissiblePair::new(q, r, 2).unwrap();
        let mut query = StrichartzQuery::new(pair, 0.1, dyadic_h_list(5)).unwrap();
        query.t_nodes = STRICHARTZ_T_NODES;
        match strichartz_sweep(&query, &builder) {
            Ok(recs) => {
                let u = uniformity(&max_ratio_by_h(&recs).iter().map(|p| p.1).collect::<Vec<_>>());
                ok &= u.pass;
                parts.push(format!("(q, r) = ({q}, {r}): {:.3}×", u.variation));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("(q, r) = ({q}, {r}): {e}"));
            }
        }
    }
    (ok, format!("max corpus ratio variation {} (< 3), d = 2, ε = 0.1", parts.join(", ")))
}

fn inequality_uniformity() -> Outcome {
    let kinds = [
        InequalityKind::bernstein(2, 0.5),
        InequalityKind::bernstein(2, 1.0),
        InequalityKind::sobolev(2, 0.5, 0.1),
        InequalityKind::sobolev(2, 1.0, 0.1),
        InequalityKind::gagliardo_nirenberg(2, 0.5),
    ];
    let corpora: Vec<_> = dyadic_h_list(5)
        .iter()
        .map(|&h| stress_corpus(&Lattice::from_spacing(2, h).unwrap(), 7).unwrap())
        .collect();
    let mut ok = true;
    let mut parts = Vec::new();
    for kind in kinds {
        let mut per_h = Vec::new();
        for corpus in &corpora {
            let (tags, fns): (Vec<String>, Vec<GridFunction>) = corpus.iter().cloned().unzip();
            let recs = inequality_sweep(kind, &fns, &tags).unwrap();
            per_h.push(recs.iter().filter_map(|r| r.ratio).fold(0.0, f64::max));
        }
        let u = uniformity(&per_h);
        ok &= u.pass;
        let label = match kind {
            InequalityKind::Bernstein { s, .. } => format!("bernstein s={s}"),
            InequalityKind::Sobolev { s, .. } => format!("sobolev s={s}"),
            InequalityKind::GagliardoNirenberg { theta, .. } => format!("GN θ={theta}"),
        };
        parts.push(format!("{label}: {:.3}×", u.variation));
    }
    (ok, format!("{} (< 3) over h = π/8…π/128", parts.join(", ")))
}

fn nonlinear_boundedness() -> Outcome {
    let cfg = LinfAverageConfig::defocusing_cubic();
    let recs = linf_average_sweep(2, &smooth_corpus(7), &dyadic_h_list(5), &cfg).unwrap();
    let u = uniformity(&max_ratio_by_h(&recs).iter().map(|p| p.1).collect::<Vec<_>>());
    (
        u.pass,
        format!(
            "‖u_h‖_{{L^{q}_t L^∞}}([0, {T}]) / (⟨T⟩^{{1/{q}}}‖u_0‖_H¹) ∈ [{:.4}, {:.4}], {:.3}× (< 3)",
            u.min,
            u.max,
            u.variation,
            q = cfg.q_star,
            T = cfg.t_final
        ),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("spectral correctness", spectral_correctness),
        ("operator equivalence", operator_equivalence),
        ("conservation", conservation),
        ("exact-solution reproduction", exact_solution),
        ("interpolation-error rate", interpolation_rate),
        ("continuum-limit rate", || continuum_rate(false)),
        ("linear continuum limit", || continuum_rate(true)),
        ("dispersive uniformity", dispersive_uniformity),
        ("Strichartz uniformity", strichartz_uniformity),
        ("inequality sweeps", inequality_uniformity),
        ("nonlinear boundedness", nonlinear_boundedness),
    ];
    let mut failed = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (ok, detail) = run();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("{verdict} [{:>2}] {name}: {detail} ({:.1}s)", i + 1, start.elapsed().as_secs_f64());
        if !ok {
            failed.push(*name);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
