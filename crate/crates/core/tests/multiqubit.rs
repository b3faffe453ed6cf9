use longi_core::measurement::snr_longitudinal;
use longi_core::multiqubit::{
    bitstring, constellation, distinguishability_partition, multiqubit_snr_pairwise, plus_state, project_by_outcome,
    spin, ModulationPhases, Partition, DEFAULT_CLUSTER_TOL, MAX_QUBITS,
};
use longi_core::{Complex64, Error};
use proptest::prelude::*;
use std::f64::consts::PI;

fn partition(phases: &ModulationPhases) -> Partition {
    let c = constellation(phases, 1.0, 1.0).unwrap();
    distinguishability_partition(&c, DEFAULT_CLUSTER_TOL).unwrap()
}

fn labels(p: &Partition, n: usize) -> Vec<Vec<String>> {
    p.groups.iter().map(|g| g.iter().map(|&i| bitstring(n, i)).collect()).collect()
}

#[test]
fn single_qubit_points() {
    let c = constellation(&ModulationPhases::zero(1).unwrap(), 2.0, 4.0).unwrap();
    assert_eq!(c.entries, vec![Complex64::new(0.0, 0.5), Complex64::new(0.0, -0.5)]);
}

#[test]
fn two_qubit_partitions() {
    assert_eq!(labels(&partition(&ModulationPhases::zero(2).unwrap()), 2), [vec!["00"], vec!["01", "10"], vec!["11"]]);
    assert_eq!(labels(&partition(&ModulationPhases::pi(2).unwrap()), 2), [vec!["00", "11"], vec!["01"], vec!["10"]]);
    assert_eq!(labels(&partition(&ModulationPhases::quarter(2).unwrap()), 2), [["00"], ["01"], ["10"], ["11"]]);
}

#[test]
fn ghz_constellation() {
    let phases = ModulationPhases::ghz3();
    let c = constellation(&phases, 1.0, 1.0).unwrap();
    assert!(c.entries[0].norm() < 1e-12 && c.entries[7].norm() < 1e-12);
    for i in 1..7 {
        assert!((c.entries[i].norm() - 2.0).abs() < 1e-12);
    }
    let p = distinguishability_partition(&c, DEFAULT_CLUSTER_TOL).unwrap();
    assert_eq!(p.groups.len(), 7);
    assert_eq!(p.group_of(0).unwrap(), &[0, 7]);
    assert!(p.groups.iter().filter(|g| g.len() == 1).count() == 6);

    let out = project_by_outcome(&plus_state(3), p.group_of(7).unwrap()).unwrap();
    assert!((out.probability - 0.25).abs() < 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (i, a) in out.state.iter().enumerate() {
        let want = if i == 0 || i == 7 { h } else { 0.0 };
        assert!((a - Complex64::new(want, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn bell_state_by_measurement() {
    let p = partition(&ModulationPhases::zero(2).unwrap());
    let out = project_by_outcome(&plus_state(2), p.group_of(1).unwrap()).unwrap();
    assert!((out.probability - 0.5).abs() < 1e-12);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    assert!((out.state[1].re - h).abs() < 1e-12 && (out.state[2].re - h).abs() < 1e-12);
    assert_eq!(out.state[0], Complex64::new(0.0, 0.0));
}

#[test]
fn full_group_is_the_identity() {
    let state = plus_state(3);
    let all: Vec<usize> = (0..8).collect();
    let out = project_by_outcome(&state, &all).unwrap();
    for (a, b) in out.state.iter().zip(&state) {
        assert!((a - b).norm() < 1e-15);
    }
    assert!((out.probability - 1.0).abs() < 1e-12);
}

#[test]
fn impossible_outcome_and_bad_input() {
    let mut state = vec![Complex64::new(0.0, 0.0); 4];
    state[0] = Complex64::new(1.0, 0.0);
    assert!(matches!(project_by_outcome(&state, &[1, 2]), Err(Error::ImpossibleOutcome)));
    assert!(project_by_outcome(&state[..3], &[0]).is_err());
    assert!(project_by_outcome(&[Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], &[0]).is_err());
    let too_many = ModulationPhases::zero(MAX_QUBITS + 1);
    assert!(too_many.is_err() || constellation(&too_many.unwrap(), 1.0, 1.0).is_err());
}

#[test]
fn coincident_constellation_is_degenerate() {
    let c = constellation(&ModulationPhases::zero(2).unwrap(), 0.0, 1.0).unwrap();
    let p = distinguishability_partition(&c, DEFAULT_CLUSTER_TOL).unwrap();
    assert!(p.degenerate);
    assert_eq!(p.groups, vec![vec![0, 1, 2, 3]]);
}

#[test]
fn pairwise_snr() {
    let c1 = constellation(&ModulationPhases::zero(1).unwrap(), 1.5, 1.0).unwrap();
    let m = multiqubit_snr_pairwise(&c1, 1.0, 2.0).unwrap();
    let single = snr_longitudinal(1.5, 1.0, 2.0).unwrap().snr;
    assert!((m[0][1] - single).abs() < 1e-12 * single);
    assert_eq!(m[0][0], 0.0);

    let zero = constellation(&ModulationPhases::zero(2).unwrap(), 1.0, 1.0).unwrap();
    assert_eq!(multiqubit_snr_pairwise(&zero, 1.0, 2.0).unwrap()[1][2], 0.0);

    // φ_j = jπ/2 puts the four points on a square of side 2 (in g̃_z/κ units).
    let sq = constellation(&ModulationPhases::quarter(2).unwrap(), 1.0, 1.0).unwrap();
    let m = multiqubit_snr_pairwise(&sq, 1.0, 2.0).unwrap();
    let off: Vec<f64> = (0..4).flat_map(|a| (a + 1..4).map(move |b| (a, b))).map(|(a, b)| m[a][b]).collect();
    let near = off.iter().copied().fold(f64::INFINITY, f64::min);
    let far = off.iter().copied().fold(0.0, f64::max);
    assert!((near / far - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
}

#[test]
fn large_constellations_match_the_serial_path() {
    let phases = ModulationPhases::linear(9, 0.37).unwrap();
    let c = constellation(&phases, 1.0, 1.0).unwrap();
    for (i, a) in c.entries.iter().enumerate() {
        let mut sum = Complex64::new(0.0, 0.0);
        for (j, &p) in phases.as_slice().iter().enumerate() {
            sum += Complex64::from_polar(spin(9, i, j), p);
        }
        assert!((a - Complex64::new(0.0, -1.0) * sum).norm() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn global_flip_negates(phases in prop::collection::vec(-PI..PI, 1..6), g in 0.1f64..5.0) {
        let n = phases.len();
        let c = constellation(&ModulationPhases::new(phases).unwrap(), g, 1.0).unwrap();
        let full = (1usize << n) - 1;
        for i in 0..=full {
            prop_assert_eq!(c.entries[full - i], -c.entries[i]);
        }
    }

    #[test]
    fn permuting_qubits_relabels_states(phases in prop::collection::vec(-PI..PI, 2..6), shift in 1usize..5) {
        let n = phases.len();
        let perm: Vec<usize> = (0..n).map(|j| (j + shift) % n).collect();
        let permuted: Vec<f64> = perm.iter().map(|&j| phases[j]).collect();
        let a = constellation(&ModulationPhases::new(phases).unwrap(), 1.0, 1.0).unwrap();
        let b = constellation(&ModulationPhases::new(permuted).unwrap(), 1.0, 1.0).unwrap();
        for i in 0..(1usize << n) {
            // New qubit k carries old qubit perm[k].
            let mut j = 0;
            for (k, &old) in perm.iter().enumerate() {
                if spin(n, i, old) > 0.0 {
                    j |= 1 << (n - 1 - k);
                }
            }
            prop_assert!((a.entries[i] - b.entries[j]).norm() < 1e-12);
        }
    }

    #[test]
    fn common_phase_offset_rotates_everything(phases in prop::collection::vec(-PI..PI, 1..6), theta in -PI..PI) {
        let shifted: Vec<f64> = phases.iter().map(|p| p + theta).collect();
        let a = constellation(&ModulationPhases::new(phases).unwrap(), 1.0, 1.0).unwrap();
        let b = constellation(&ModulationPhases::new(shifted).unwrap(), 1.0, 1.0).unwrap();
        let rot = Complex64::from_polar(1.0, theta);
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert!((x * rot - y).norm() < 1e-12);
        }
    }

    #[test]
    fn partitions_ignore_a_common_offset(preset in 0usize..4, theta in -PI..PI) {
        let (base, n) = match preset {
            0 => (ModulationPhases::zero(2).unwrap(), 2),
            1 => (ModulationPhases::pi(2).unwrap(), 2),
            2 => (ModulationPhases::quarter(2).unwrap(), 2),
            _ => (ModulationPhases::ghz3(), 3),
        };
        let shifted = ModulationPhases::new(base.as_slice().iter().map(|p| p + theta).collect()).unwrap();
        prop_assert_eq!(labels(&partition(&base), n), labels(&partition(&shifted), n));
    }

    #[test]
    fn projection_is_normalized_and_idempotent(amps in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8), pick in 1usize..255) {
        let raw: Vec<Complex64> = amps.iter().map(|&(re, im)| Complex64::new(re, im)).collect();
        let norm = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let state: Vec<Complex64> = raw.iter().map(|a| a / norm).collect();
        let group: Vec<usize> = (0..8).filter(|i| pick >> i & 1 == 1).collect();
        let weight: f64 = group.iter().map(|&i| state[i].norm_sqr()).sum();
        prop_assume!(weight > 1e-9);
        let once = project_by_outcome(&state, &group).unwrap();
        let total: f64 = once.state.iter().map(|a| a.norm_sqr()).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
        let twice = project_by_outcome(&once.state, &group).unwrap();
        prop_assert!((twice.probability - 1.0).abs() < 1e-12);
        for (x, y) in once.state.iter().zip(&twice.state) {
            prop_assert!((x - y).norm() < 1e-12);
        }
    }
}
