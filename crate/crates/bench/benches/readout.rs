use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use longi_core::dynamics::{longitudinal_trajectory, LinearPointerModel};
use longi_core::measurement::{required_tau, snr_numeric, HomodyneSetup};
use longi_core::montecarlo::{simulate_records, McConfig};
use longi_core::multiqubit::{constellation, distinguishability_partition, ModulationPhases};
use longi_core::ode::Dopri5;
use longi_core::{EnvelopeSpec, FrequencyParams, ReadoutProtocol};

fn pointer(c: &mut Criterion) {
    let params = FrequencyParams::default().to_system().with_chi(0.0);
    let env = EnvelopeSpec::default();
    let t_max = 8.0 / params.kappa;
    c.bench_function("longitudinal_trajectory_801", |b| {
        b.iter(|| longitudinal_trajectory(black_box(&params), &env, t_max, 801).unwrap())
    });
    let model = LinearPointerModel::longitudinal(&params);
    let times: Vec<f64> = (0..=800).map(|k| t_max * k as f64 / 800.0).collect();
    c.bench_function("dopri5_pointer_801", |b| {
        b.iter(|| model.solve_numeric(&env, black_box(&times), &Dopri5::default()).unwrap())
    });
    let traj = longitudinal_trajectory(&params, &env, t_max, 801).unwrap();
    let setup = HomodyneSetup::optimal(t_max);
    c.bench_function("snr_numeric_801", |b| b.iter(|| snr_numeric(black_box(&traj), &setup).unwrap()));
    c.bench_function("required_tau_longitudinal", |b| {
        b.iter(|| required_tau(black_box(1.0), 1.0, 0.9999, ReadoutProtocol::Longitudinal, None).unwrap())
    });
}

fn montecarlo(c: &mut Criterion) {
    let params = FrequencyParams::default().to_system().with_chi(0.0);
    let setup = HomodyneSetup::optimal(1.2566 / params.kappa);
    let mut group = c.benchmark_group("montecarlo");
    group.sample_size(10);
    for n in [1_000usize, 10_000] {
        let mut cfg = McConfig::new(ReadoutProtocol::Longitudinal, params.kappa);
        cfg.n_traj = n;
        group.bench_with_input(BenchmarkId::from_parameter(n), &cfg, |b, cfg| {
            b.iter(|| simulate_records(&params, &setup, cfg).unwrap())
        });
    }
    group.finish();
}

fn multiqubit(c: &mut Criterion) {
    let mut group = c.benchmark_group("partition");
    for n in [3usize, 6, 9] {
        let phases = ModulationPhases::linear(n, std::f64::consts::PI / n as f64).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &phases, |b, phases| {
            b.iter(|| {
                let c = constellation(phases, 1.0, 1.0).unwrap();
                distinguishability_partition(&c, 1e-9).unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, pointer, montecarlo, multiqubit);
criterion_main!(benches);
