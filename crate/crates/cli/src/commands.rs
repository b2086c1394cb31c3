//! The subcommands. Each one validates its inputs before any output is
//! written, so `--dry-run` catches the same configuration errors as a real run.

use std::f64::consts::PI;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::Path;

use anyhow::{Context, Result};
use lnls_core::dynamics::{evolve, write_trajectory, EvolutionConfig, ReferenceConfig, Trajectory};
use lnls_core::estimates::{dispersive_bound_sweep, strichartz_sweep, AdmissiblePair, KernelQuery, StrichartzQuery};
use lnls_core::harness::{
    discretize_corpus, linear_growth_check, max_ratio_by_h, rate_tsv, run_convergence, smooth_corpus, stress_corpus,
    svg_line_chart, uniformity, write_csv, write_jsonl, ConvergenceStudy, ExperimentRecord, Uniformity,
};
use lnls_core::lattice::{discretize, GridFunction, Lattice};
use lnls_core::spectral::{dyadic_scales, inequality_sweep};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::{config_error, Command};

/// Smallest accepted continuum-limit slope.
const MIN_SLOPE: f64 = 0.45;

pub fn dispatch(cmd: Command, cfg: &RunConfig, out: &Path, dry_run: bool) -> Result<()> {
    let plan = match cmd {
        Command::Simulate => plan_simulate(cfg)?,
        Command::Conserve => plan_conserve(cfg)?,
        Command::Converge => plan_converge(cfg)?,
        Command::Strichartz => plan_strichartz(cfg)?,
        Command::Dispersive => plan_dispersive(cfg)?,
        Command::Inequalities => plan_inequalities(cfg)?,
    };
    if dry_run {
        println!("dry run: {} {plan}", cmd.name());
        println!("{}", serde_json::to_string_pretty(cfg)?);
        return Ok(());
    }
    fs::create_dir_all(out).with_context(|| format!("cannot create output directory {}", out.display()))?;
    write_json(&out.join("resolved_config.json"), cfg)?;
    log::info!("{} {plan}", cmd.name());
    match cmd {
        Command::Simulate => simulate(cfg, out),
        Command::Conserve => conserve(cfg, out),
        Command::Converge => converge(cfg, out),
        Command::Strichartz => strichartz(cfg, out),
        Command::Dispersive => dispersive(cfg, out),
        Command::Inequalities => inequalities(cfg, out),
    }
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    serde_json::to_writer_pretty(BufWriter::new(f), value)?;
    Ok(())
}

fn write_records(out: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let csv = out.join("records.csv");
    write_csv(records, BufWriter::new(File::create(&csv).with_context(|| format!("cannot write {}", csv.display()))?))?;
    let jsonl = out.join("records.jsonl");
    write_jsonl(
        records,
        BufWriter::new(File::create(&jsonl).with_context(|| format!("cannot write {}", jsonl.display()))?),
    )?;
    println!("wrote {} records to {}", records.len(), csv.display());
    Ok(())
}

/// `π/M` when `h` is one, the decimal value otherwise.
fn fmt_h(h: f64) -> String {
    let m = PI / h;
    if (m - m.round()).abs() < 1e-9 {
        format!("π/{}", m.round())
    } else {
        format!("{h}")
    }
}

fn fmt_list(hs: &[f64]) -> String {
    hs.iter().map(|&h| fmt_h(h)).collect::<Vec<_>>().join(", ")
}

fn lattices(cfg: &RunConfig) -> Result<Vec<Lattice>> {
    cfg.require_spacings()?;
    cfg.h_list.iter().map(|&h| Ok(Lattice::from_spacing(cfg.d, h)?)).collect()
}

fn print_verdict(label: &str, per_h: &[(f64, f64)]) -> Uniformity {
    println!("{:>10}  {:>12}", "h", "max ratio");
    for (h, r) in per_h {
        println!("{:>10}  {:>12.6}", fmt_h(*h), r);
    }
    let u = uniformity(&per_h.iter().map(|p| p.1).collect::<Vec<_>>());
    println!(
        "{label}: {} (max/min = {:.3}, band < {})",
        if u.pass { "PASS" } else { "FAIL" },
        u.variation,
        lnls_core::harness::UNIFORMITY_BAND
    );
    u
}

fn evolution_config(cfg: &RunConfig, dt: f64) -> Result<EvolutionConfig> {
    let ec = EvolutionConfig { dt, t_final: cfg.t_final, integrator: cfg.integrator, record_stride: cfg.record_stride };
    ec.validate()?;
    Ok(ec)
}

fn initial_state(cfg: &RunConfig) -> Result<GridFunction> {
    let lat = Lattice::new(cfg.d, cfg.half_size)?;
    Ok(discretize(cfg.profile.build(cfg.d)?.as_ref(), lat))
}

fn plan_simulate(cfg: &RunConfig) -> Result<String> {
    let params = cfg.params()?;
    let ec = evolution_config(cfg, cfg.dt)?;
    initial_state(cfg)?;
    Ok(format!(
        "d = {}, M = {}, p = {}, λ = {}, {} with {} steps of {:.3e} to t = {}, profile {}",
        cfg.d,
        cfg.half_size,
        params.p,
        params.lambda,
        serde_json::to_value(ec.integrator)?.as_str().unwrap_or("?"),
        ec.n_steps(),
        ec.effective_dt(),
        ec.t_final,
        cfg.profile.name()
    ))
}

fn print_conserved(traj: &Trajectory) {
    println!("{:>10}  {:>22}  {:>22}", "t", "mass", "energy");
    let n = traj.times.len();
    let stride = n.div_ceil(10).max(1);
    for i in (0..n).filter(|i| i % stride == 0 || *i == n - 1) {
        let c = traj.conserved[i];
        println!("{:>10.4}  {:>22.15e}  {:>22.15e}", traj.times[i], c.mass, c.energy);
    }
}

fn simulate(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.params()?;
    params.warn_if_outside_range(cfg.d);
    let u0 = initial_state(cfg)?;
    let traj = evolve(&u0, &params, &evolution_config(cfg, cfg.dt)?)?;
    let dir = out.join("trajectory");
    write_trajectory(&traj, &dir)?;

    let mut tsv = String::from("t\tmass\tenergy\n");
    for (t, c) in traj.times.iter().zip(&traj.conserved) {
        tsv.push_str(&format!("{t}\t{}\t{}\n", c.mass, c.energy));
    }
    fs::write(out.join("conserved.tsv"), tsv)?;
    print_conserved(&traj);
    println!(
        "relative mass drift {:.3e}, energy drift {:.3e}; {} snapshots in {}",
        traj.mass_drift(),
        traj.energy_drift(),
        traj.snapshots.len(),
        dir.display()
    );
    Ok(())
}

fn plan_conserve(cfg: &RunConfig) -> Result<String> {
    let base = plan_simulate(cfg)?;
    Ok(format!("{base}; repeated at dt/2 and dt/4"))
}

fn conserve(cfg: &RunConfig, out: &Path) -> Result<()> {
    let params = cfg.params()?;
    let u0 = initial_state(cfg)?;
    let h = u0.lattice().spacing();
    // scale the stride with the step count so all three runs sample the same times
    let runs = [1usize, 2, 4]
        .par_iter()
        .map(|&refine| {
            let mut ec = evolution_config(cfg, cfg.dt / refine as f64)?;
            ec.record_stride *= refine;
            let traj = evolve(&u0, &params, &ec)?;
            Ok((ec.effective_dt(), traj.mass_drift(), traj.energy_drift()))
        })
        .collect::<Result<Vec<_>>>()?;
    println!("{:>12}  {:>12}  {:>12}  {:>8}", "dt", "mass drift", "energy drift", "ratio");
    let mut records = Vec::new();
    for (i, &(dt, mass, energy)) in runs.iter().enumerate() {
        let ratio = if i == 0 { f64::NAN } else { runs[i - 1].2 / energy };
        println!("{dt:>12.4e}  {mass:>12.3e}  {energy:>12.3e}  {ratio:>8.3}");
        let mut rec = ExperimentRecord::new("conservation", h, energy)
            .with_t(cfg.t_final)
            .with_meta("dt", dt)
            .with_meta("mass_drift", mass)
            .with_meta("d", cfg.d);
        if ratio.is_finite() {
            rec = rec.with_ratio(ratio);
        }
        records.push(rec);
    }
    println!("energy drift ratios near 4 indicate second-order splitting error");
    write_records(out, &records)
}

fn study(cfg: &RunConfig) -> Result<ConvergenceStudy> {
    cfg.require_spacings()?;
    let study = ConvergenceStudy {
        dim: cfg.d,
        params: cfg.params()?,
        u0: cfg.profile.clone(),
        h_list: cfg.h_list.clone(),
        times: cfg.times.clone(),
        reference: ReferenceConfig::new(cfg.reference_resolution, cfg.reference_dt),
        integrator: cfg.integrator,
        dt: cfg.dt,
        oversample: cfg.oversample,
    };
    study.validate()?;
    Ok(study)
}

fn plan_converge(cfg: &RunConfig) -> Result<String> {
    let s = study(cfg)?;
    Ok(format!(
        "d = {}, p = {}, λ = {}, profile {}, h ∈ {{{}}}, t ∈ {:?}, reference {}^{} points with dt = {}",
        s.dim,
        s.params.p,
        s.params.lambda,
        s.u0.name(),
        fmt_list(&s.h_list),
        s.times,
        s.reference.resolution,
        s.dim,
        s.reference.dt
    ))
}

fn converge(cfg: &RunConfig, out: &Path) -> Result<()> {
    let s = study(cfg)?;
    if !s.params.is_linear() {
        s.params.warn_if_outside_range(s.dim);
    }
    let report = run_convergence(&s)?;
    write_records(out, &report.records)?;

    let mut series = Vec::new();
    println!("{:>8}  {:>8}  {:>10}", "t", "slope", "residual");
    let mut pass = true;
    for (t, fit) in &report.fits {
        println!("{t:>8}  {:>8.4}  {:>10.2e}", fit.slope, fit.residual);
        if *t > 0.0 {
            pass &= fit.slope >= MIN_SLOPE;
        }
        fs::write(out.join(format!("rate_t{t}.tsv")), rate_tsv(&report.records, Some(*t)))?;
        let pts = report.errors_at(*t).iter().filter(|r| r.value > 0.0).map(|r| (r.h.ln(), r.value.ln())).collect();
        series.push((format!("t = {t}"), pts));
    }
    fs::write(
        out.join("rate.svg"),
        svg_line_chart("continuum-limit error", "log h", "log ‖p_h u_h - u‖", &series),
    )?;
    println!("reference change under resolution doubling: {:.2e}", report.max_reference_change);
    if s.params.is_linear() {
        for (h, u) in linear_growth_check(&report) {
            pass &= u.pass;
            println!("h = {}: error/(√h⟨t⟩) spread {:.3}×", fmt_h(h), u.variation);
        }
    }
    println!("rate: {} (slope ≥ {MIN_SLOPE} for t > 0)", if pass { "PASS" } else { "FAIL" });
    Ok(())
}

fn pair(cfg: &RunConfig) -> Result<AdmissiblePair> {
    Ok(AdmissiblePair::new(cfg.q, cfg.r, cfg.d)?)
}

fn plan_strichartz(cfg: &RunConfig) -> Result<String> {
    let pair = pair(cfg)?;
    cfg.require_spacings()?;
    StrichartzQuery::new(pair, cfg.epsilon, cfg.h_list.clone())?.validate()?;
    Ok(format!(
        "d = {}, (q, r) = ({}, {}), ε = {}, h ∈ {{{}}}, {} time nodes, corpus seed {}",
        cfg.d,
        cfg.q,
        cfg.r,
        cfg.epsilon,
        fmt_list(&cfg.h_list),
        cfg.t_nodes,
        cfg.seed
    ))
}

fn strichartz(cfg: &RunConfig, out: &Path) -> Result<()> {
    cfg.require_spacings()?;
    let mut query = StrichartzQuery::new(pair(cfg)?, cfg.epsilon, cfg.h_list.clone())?;
    query.t_nodes = cfg.t_nodes;
    query.validate()?;
    let specs = smooth_corpus(cfg.seed);
    let builder = move |lat: &Lattice| discretize_corpus(&specs, lat).unwrap_or_default();
    let records = strichartz_sweep(&query, &builder)?;
    write_records(out, &records)?;
    print_verdict("strichartz uniformity", &max_ratio_by_h(&records));
    Ok(())
}

fn plan_dispersive(cfg: &RunConfig) -> Result<String> {
    let lats = lattices(cfg)?;
    if !(cfg.c > 0.0) || cfg.t_samples == 0 {
        return Err(config_error(format!(
            "dispersive sweep needs c > 0 and t_samples ≥ 1, got c = {}, t_samples = {}",
            cfg.c, cfg.t_samples
        )));
    }
    let scales: usize = lats.iter().map(|l| dyadic_scales(l).len() - 1).sum();
    Ok(format!(
        "d = {}, h ∈ {{{}}}, {scales} dyadic scales, {} times in (0, {}·h/N]",
        cfg.d,
        fmt_list(&cfg.h_list),
        cfg.t_samples,
        cfg.c
    ))
}

fn dispersive(cfg: &RunConfig, out: &Path) -> Result<()> {
    plan_dispersive(cfg)?;
    let mut records = Vec::new();
    for lat in lattices(cfg)? {
        // the lowest scale is a single mode; its bound is checked separately in the library tests
        for n in dyadic_scales(&lat).into_iter().skip(1) {
            let q = KernelQuery::new(lat, n).with_c(cfg.c).with_t_samples(cfg.t_samples);
            records.extend(dispersive_bound_sweep(&q)?);
        }
    }
    write_records(out, &records)?;
    print_verdict("dispersive uniformity", &max_ratio_by_h(&records));
    Ok(())
}

fn plan_inequalities(cfg: &RunConfig) -> Result<String> {
    lattices(cfg)?;
    if cfg.inequalities.is_empty() {
        return Err(config_error("inequalities list is empty"));
    }
    for spec in &cfg.inequalities {
        spec.kind(cfg.d).validate(cfg.d)?;
    }
    let labels: Vec<String> = cfg.inequalities.iter().map(|s| s.label()).collect();
    Ok(format!("d = {}, h ∈ {{{}}}, {}", cfg.d, fmt_list(&cfg.h_list), labels.join(", ")))
}

fn inequalities(cfg: &RunConfig, out: &Path) -> Result<()> {
    plan_inequalities(cfg)?;
    let corpora = lattices(cfg)?
        .par_iter()
        .map(|lat| Ok(stress_corpus(lat, cfg.seed)?))
        .collect::<Result<Vec<_>>>()?;
    let mut records = Vec::new();
    for spec in &cfg.inequalities {
        let kind = spec.kind(cfg.d);
        let mut mine = Vec::new();
        for corpus in &corpora {
            let (tags, fns): (Vec<String>, Vec<GridFunction>) = corpus.iter().cloned().unzip();
            mine.extend(inequality_sweep(kind, &fns, &tags)?);
        }
        println!("{}", spec.label());
        print_verdict("  uniformity", &max_ratio_by_h(&mine));
        records.extend(mine);
    }
    write_records(out, &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_labels() {
        assert_eq!(fmt_h(PI / 16.0), "π/16");
        assert_eq!(fmt_h(0.3), "0.3");
    }

    #[test]
    fn inadmissible_pair_is_a_config_error() {
        let cfg = RunConfig { q: 2.0, r: f64::INFINITY, ..RunConfig::default() };
        let msg = format!("{:#}", plan_strichartz(&cfg).unwrap_err());
        assert!(msg.contains("3/q + d/r"), "{msg}");
    }

    #[test]
    fn linear_flag_drops_the_nonlinearity() {
        let cfg = RunConfig { linear: true, ..RunConfig::default() };
        assert!(study(&cfg).unwrap().params.is_linear());
        let bad = RunConfig { p: 0.5, ..RunConfig::default() };
        assert!(format!("{:#}", study(&bad).unwrap_err()).contains("p > 1 required"));
    }
}
