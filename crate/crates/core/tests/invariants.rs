//! Structural invariants on random lattice functions, and persistence round trips.

use std::fs::File;
use std::io::{BufReader, BufWriter};

use lnls_core::dynamics::{evolve, linear_flow, read_trajectory, write_trajectory, EvolutionConfig, NlsParams, Stepper};
use lnls_core::harness::{read_jsonl, write_jsonl, ExperimentRecord};
use lnls_core::lattice::{GridFunction, Lattice};
use lnls_core::spectral::{dyadic_scales, forward, inverse, lp_project};
use lnls_core::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_grid(d: usize, m: usize, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GridFunction::from_fn(Lattice::new(d, m).unwrap(), |_| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    })
}

fn rel_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.sub(b).unwrap().l2_norm() / b.l2_norm()
}

fn lattice_shape() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..=2, prop::sample::select(vec![2usize, 4, 8, 16]), any::<u64>())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_round_trip_and_plancherel((d, m, seed) in lattice_shape()) {
        let u = random_grid(d, m, seed);
        let spec = forward(&u);
        prop_assert!(rel_diff(&inverse(&spec), &u) < 1e-13);
        let mass = u.l2_norm().powi(2);
        prop_assert!((spec.plancherel_mass() - mass).abs() <= 1e-12 * mass);
    }

    #[test]
    fn littlewood_paley_pieces_sum_to_identity((d, m, seed) in lattice_shape()) {
        let u = random_grid(d, m, seed);
        let mut sum = GridFunction::zeros(*u.lattice());
        for n in dyadic_scales(u.lattice()) {
            sum = sum.add(&lp_project(&u, n).unwrap()).unwrap();
        }
        prop_assert!(rel_diff(&sum, &u) < 1e-12);
    }

    #[test]
    fn free_flow_is_unitary_group((d, m, seed) in lattice_shape(), t1 in -2.0f64..2.0, t2 in -2.0f64..2.0) {
        let u = random_grid(d, m, seed);
        let composed = linear_flow(&linear_flow(&u, t1), t2);
        prop_assert!(rel_diff(&composed, &linear_flow(&u, t1 + t2)) < 1e-11);
        prop_assert!((linear_flow(&u, t1).l2_norm() / u.l2_norm() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn strang_step_preserves_mass((d, m, seed) in lattice_shape(), focusing in any::<bool>(), dt in 1e-4f64..0.05) {
        let u = random_grid(d, m, seed);
        let params = NlsParams::new(3.0, if focusing { -1.0 } else { 1.0 }).unwrap();
        let v = Stepper::strang(*u.lattice(), params, dt).unwrap().step(&u).unwrap();
        prop_assert!((v.l2_norm() / u.l2_norm() - 1.0).abs() < 1e-13);
    }
}

#[test]
fn trajectory_round_trips_through_disk() {
    let dir = tempfile::tempdir().unwrap();
    let u0 = random_grid(2, 4, 11);
    let params = NlsParams::new(3.0, -1.0).unwrap();
    let traj = evolve(&u0, &params, &EvolutionConfig { record_stride: 5, ..EvolutionConfig::strang(0.01, 0.2) }).unwrap();
    write_trajectory(&traj, dir.path()).unwrap();
    let back = read_trajectory(dir.path()).unwrap();
    assert_eq!(back.times, traj.times);
    assert_eq!(back.conserved, traj.conserved);
    assert_eq!(back.params, traj.params);
    for (a, b) in back.snapshots.iter().zip(&traj.snapshots) {
        assert_eq!(a.values(), b.values());
    }
}

#[test]
fn records_round_trip_through_jsonl() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("records.jsonl");
    let records = vec![
        ExperimentRecord::new("strichartz", 0.1, 2.5).with_q(3.0).with_r(f64::INFINITY).with_ratio(0.7),
        ExperimentRecord::new("dispersive", 0.05, 1e-3).with_n(0.25).with_t(1e-4).with_meta("d", 2),
    ];
    write_jsonl(&records, BufWriter::new(File::create(&path).unwrap())).unwrap();
    let back = read_jsonl(BufReader::new(File::open(&path).unwrap())).unwrap();
    assert_eq!(back, records);
}
