//! Stochastic homodyne records.
//!
//! Each record is the integral of the mean homodyne current plus Gaussian
//! white noise of variance N₀·κ·dt per step (scaled by the squeezed
//! quadrature variance e^{−2r}/P for squeezed input). The dynamics are
//! linear, so the mean trajectory is precomputed once and each record only
//! draws noise.
//!
//! Every trajectory owns a ChaCha8 stream selected by its index, so the
//! output is identical for any thread count.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use statrs::function::erf::erfc;

use crate::dynamics::LinearPointerModel;
use crate::error::{Error, Result};
use crate::measurement::{fidelity_from_snr, HomodyneSetup, Quadrature};
use crate::model::{validate, QubitState, ReadoutProtocol, SqueezeSpec, SystemParams};

/// Largest allowed dt in units of 1/κ.
pub const MAX_DT_KAPPA: f64 = 0.01;
pub const DEFAULT_DT_KAPPA: f64 = 1e-3;
pub const DEFAULT_N_TRAJ: usize = 100_000;
/// Upper bound on stored samples (two per trajectory).
pub const MAX_SAMPLES: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McConfig {
    pub n_traj: usize,
    pub seed: u64,
    /// Record discretization in seconds.
    pub dt: f64,
    pub protocol: ReadoutProtocol,
    pub squeeze: Option<SqueezeSpec>,
}

impl McConfig {
    pub fn new(protocol: ReadoutProtocol, kappa: f64) -> Self {
        Self { n_traj: DEFAULT_N_TRAJ, seed: 0, dt: DEFAULT_DT_KAPPA / kappa, protocol, squeeze: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct McResult {
    pub samples_plus: Vec<f64>,
    pub samples_minus: Vec<f64>,
    pub mean_plus: f64,
    pub mean_minus: f64,
    pub var_plus: f64,
    pub var_minus: f64,
    pub empirical_snr: f64,
    pub empirical_fidelity: f64,
    pub stderr_snr: f64,
    /// SNR of the discretized record model without sampling noise.
    pub analytic_snr: f64,
    pub steps: usize,
}

/// Summation by recursive halving; the result depends only on the order of `xs`.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    (mean, pairwise_sum(&dev) / (n - 1.0))
}

/// Random stream of trajectory `index`.
pub fn trajectory_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Simulates `mc.n_traj` integrated homodyne records for each qubit state.
pub fn simulate_records(params: &SystemParams, setup: &HomodyneSetup, mc: &McConfig) -> Result<McResult> {
    let params = validate(*params)?.params;
    let kappa = params.kappa;
    if mc.n_traj == 0 {
        return Err(Error::InvalidArgument("n_traj must be at least 1".into()));
    }
    if mc.n_traj.saturating_mul(2) > MAX_SAMPLES {
        return Err(Error::InvalidArgument(format!(
            "{} trajectories exceed the sample budget of {MAX_SAMPLES}",
            mc.n_traj
        )));
    }
    if !(mc.dt > 0.0 && mc.dt <= MAX_DT_KAPPA / kappa * (1.0 + 1e-12)) {
        return Err(Error::InvalidArgument(format!(
            "dt = {:e} s must lie in (0, {MAX_DT_KAPPA}/kappa]",
            mc.dt
        )));
    }
    if !(setup.tau > 0.0 && setup.tau.is_finite()) {
        return Err(Error::InvalidArgument("integration time must be positive".into()));
    }
    if !(setup.noise_floor > 0.0) {
        return Err(Error::InvalidArgument("noise floor must be positive".into()));
    }
    if mc.squeeze.is_some() && mc.protocol == ReadoutProtocol::Dispersive {
        return Err(Error::Unsupported("squeezed dispersive readout is out of scope".into()));
    }

    let steps = (setup.tau / mc.dt).ceil().max(1.0) as usize;
    let dt = setup.tau / steps as f64;
    let model = LinearPointerModel::for_protocol(mc.protocol, &params);
    let midpoints = |s: QubitState| -> Vec<Complex64> {
        (0..steps).map(|k| model.step_response(s, (k as f64 + 0.5) * dt)).collect()
    };
    let plus = midpoints(QubitState::Plus);
    let minus = midpoints(QubitState::Minus);
    let phi = match setup.quadrature {
        Quadrature::Fixed(phi) => phi,
        Quadrature::Optimal => {
            let total: Complex64 = plus.iter().zip(&minus).map(|(p, m)| p - m).sum();
            -total.arg()
        }
    };
    let rotor = Complex64::from_polar(1.0, phi);
    let increments =
        |branch: &[Complex64]| -> Vec<f64> { branch.iter().map(|a| 2.0 * kappa * (rotor * a).re * dt).collect() };
    let mu_plus = increments(&plus);
    let mu_minus = increments(&minus);

    let variance = mc.squeeze.map_or(1.0, |s| s.measured_variance());
    let sigma = (setup.noise_floor * kappa * dt * variance).sqrt();
    let analytic_snr = (pairwise_sum(&mu_plus) - pairwise_sum(&mu_minus)).abs()
        / (2.0 * setup.noise_floor * kappa * setup.tau * variance).sqrt();

    let record = |rng: &mut ChaCha8Rng, mu: &[f64]| -> f64 {
        mu.iter()
            .map(|m| {
                let xi: f64 = rng.sample(StandardNormal);
                m + sigma * xi
            })
            .sum()
    };
    let pairs: Vec<(f64, f64)> = (0..mc.n_traj)
        .into_par_iter()
        .map(|i| {
            let mut rng = trajectory_rng(mc.seed, i as u64);
            let p = record(&mut rng, &mu_plus);
            let m = record(&mut rng, &mu_minus);
            (p, m)
        })
        .collect();
    let (samples_plus, samples_minus): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();

    Ok(summarize(samples_plus, samples_minus, analytic_snr, steps))
}

fn summarize(samples_plus: Vec<f64>, samples_minus: Vec<f64>, analytic_snr: f64, steps: usize) -> McResult {
    let n = samples_plus.len() as f64;
    let (mean_plus, var_plus) = mean_var(&samples_plus);
    let (mean_minus, var_minus) = mean_var(&samples_minus);
    let total_var = var_plus + var_minus;
    let empirical_snr = if total_var > 0.0 { (mean_plus - mean_minus).abs() / total_var.sqrt() } else { 0.0 };
    let stderr_snr = if total_var > 0.0 {
        ((1.0 + empirical_snr.powi(2) * (var_plus.powi(2) + var_minus.powi(2)) / (2.0 * total_var.powi(2))) / n).sqrt()
    } else {
        0.0
    };

    let threshold = 0.5 * (mean_plus + mean_minus);
    let plus_above = mean_plus >= mean_minus;
    let correct_plus = samples_plus.iter().filter(|&&x| (x > threshold) == plus_above).count();
    let correct_minus = samples_minus.iter().filter(|&&x| (x > threshold) != plus_above).count();
    let empirical_fidelity = (correct_plus + correct_minus) as f64 / (2.0 * n);

    McResult {
        samples_plus,
        samples_minus,
        mean_plus,
        mean_minus,
        var_plus,
        var_minus,
        empirical_snr,
        empirical_fidelity,
        stderr_snr,
        analytic_snr,
        steps,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FidelityCheck {
    pub fidelity: f64,
    /// 1 − ½erfc(SNR/2) at the record model's noiseless SNR.
    pub analytic_prediction: f64,
    /// Binomial z-score of the observed misclassification rate.
    pub z_score: f64,
}

/// Compares threshold classification with the Gaussian error model.
pub fn empirical_fidelity_check(result: &McResult) -> FidelityCheck {
    let trials = (result.samples_plus.len() + result.samples_minus.len()) as f64;
    let predicted_error = 0.5 * erfc(result.analytic_snr / 2.0);
    let observed_error = 1.0 - result.empirical_fidelity;
    let sd = (predicted_error * (1.0 - predicted_error) / trials).sqrt();
    let z_score = if sd > 0.0 {
        (observed_error - predicted_error) / sd
    } else if observed_error == predicted_error {
        0.0
    } else {
        f64::INFINITY
    };
    FidelityCheck { fidelity: result.empirical_fidelity, analytic_prediction: fidelity_from_snr(result.analytic_snr), z_score }
}
