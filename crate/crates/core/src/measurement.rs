//! Homodyne signal-to-noise ratios, readout fidelity, photon budgets and
//! measurement-rate diagnostics.
//!
//! The homodyne measurement operator is M(τ) = √κ ∫₀^τ [e^{−iφ}a_out† + e^{iφ}a_out] dt.
//! Its mean difference between the two qubit states is the signal and
//! the noise is the root of the summed variances. For vacuum input each
//! branch has variance N₀·κτ, and N₀ = 1 reproduces the closed-form SNR
//! expressions exactly.

use num_complex::Complex64;
use serde::Serialize;
use statrs::function::erf::{erfc, erfc_inv};

use crate::dynamics::{LinearPointerModel, Normalization, PointerTrajectory};
use crate::error::{Error, Result};
use crate::model::{ReadoutProtocol, SqueezeSpec, SystemParams, TWO_PI};

/// Vacuum noise normalization for the homodyne record.
pub const VACUUM_NOISE: f64 = 1.0;

/// Bracket for the cavity damping search, as κ/2π in Hz.
pub const KAPPA_SEARCH_HZ: (f64, f64) = (1e4, 1e9);
pub const KAPPA_SEARCH_RTOL: f64 = 1e-4;

/// Homodyne local-oscillator phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    /// The phase maximizing the signal.
    Optimal,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HomodyneSetup {
    pub quadrature: Quadrature,
    /// Integration time in seconds.
    pub tau: f64,
    /// Vacuum variance scale N₀.
    pub noise_floor: f64,
}

impl HomodyneSetup {
    pub fn optimal(tau: f64) -> Self {
        Self { quadrature: Quadrature::Optimal, tau, noise_floor: VACUUM_NOISE }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrProtocol {
    Longitudinal,
    Dispersive,
    LongitudinalResidualChi,
    SqueezedLongitudinal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SnrResult {
    pub signal: f64,
    pub noise: f64,
    pub snr: f64,
    pub protocol: SnrProtocol,
}

impl SnrResult {
    fn new(signal: f64, noise: f64, protocol: SnrProtocol) -> Self {
        let snr = if noise > 0.0 { signal / noise } else { 0.0 };
        Self { signal, noise, snr, protocol }
    }
}

/// y − 1 + e^{−y}: the time integral of the longitudinal separation shape
/// 1 − e^{−θ} over θ ∈ [0, y].
fn integrated_shape_longitudinal(y: f64) -> f64 {
    if y < 0.5 {
        // Σ_{k≥2} (−y)^k / k!
        let mut term = y * y / 2.0;
        let mut sum: f64 = 0.0;
        let mut k = 2.0;
        while term.abs() > 1e-18 * sum.abs() {
            sum += term;
            k += 1.0;
            term *= -y / k;
        }
        sum
    } else {
        y + (-y).exp_m1()
    }
}

/// y − 1 + e^{−y}·cos y: the integral of the dispersive (χ = κ/2) separation
/// shape 1 − e^{−θ}(cos θ + sin θ) over θ ∈ [0, y].
fn integrated_shape_dispersive(y: f64) -> f64 {
    if y < 0.5 {
        // Re Σ_{k≥3} (c·y)^k / k! with c = −(1+i); the k ≤ 2 terms cancel.
        let c = Complex64::new(-y, -y);
        let mut term = c * c * c / 6.0;
        let mut sum: f64 = 0.0;
        let mut k = 3.0;
        while term.norm() > 1e-18 * sum.abs().max(f64::MIN_POSITIVE) {
            sum += term.re;
            k += 1.0;
            term = term * c / k;
        }
        sum
    } else {
        y - 1.0 + (-y).exp() * y.cos()
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(Error::InvalidArgument(format!("integration time must be finite and non-negative, got {tau}")));
    }
    Ok(())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(Error::InvalidArgument(format!("kappa must be positive, got {kappa}")));
    }
    Ok(())
}

fn analytic(amplitude: f64, kappa: f64, tau: f64, shape: fn(f64) -> f64, protocol: SnrProtocol) -> Result<SnrResult> {
    check_tau(tau)?;
    check_kappa(kappa)?;
    let x = kappa * tau;
    let noise = (2.0 * VACUUM_NOISE * x).sqrt();
    let signal = 8.0 * amplitude.abs() / kappa * shape(x / 2.0);
    Ok(SnrResult::new(signal, noise, protocol))
}

/// SNR_z = √8 (|g̃_z|/κ) √(κτ) [1 − (2/κτ)(1 − e^{−κτ/2})].
pub fn snr_longitudinal(g_z_mod: f64, kappa: f64, tau: f64) -> Result<SnrResult> {
    analytic(g_z_mod, kappa, tau, integrated_shape_longitudinal, SnrProtocol::Longitudinal)
}

/// SNR_χ = √8 (|ε|/κ) √(κτ) [1 − (2/κτ)(1 − e^{−κτ/2} cos(κτ/2))], at the
/// optimal dispersive shift χ = κ/2.
pub fn snr_dispersive(epsilon: f64, kappa: f64, tau: f64) -> Result<SnrResult> {
    analytic(epsilon, kappa, tau, integrated_shape_dispersive, SnrProtocol::Dispersive)
}

pub fn snr_analytic(protocol: ReadoutProtocol, amplitude: f64, kappa: f64, tau: f64) -> Result<SnrResult> {
    match protocol {
        ReadoutProtocol::Longitudinal => snr_longitudinal(amplitude, kappa, tau),
        ReadoutProtocol::Dispersive => snr_dispersive(amplitude, kappa, tau),
    }
}

fn lagrange(ts: &[f64], fs: &[Complex64], x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (j, (&tj, &fj)) in ts.iter().zip(fs).enumerate() {
        let mut w = 1.0;
        for (m, &tm) in ts.iter().enumerate() {
            if m != j {
                w *= (x - tm) / (tj - tm);
            }
        }
        acc += fj * w;
    }
    acc
}

/// ∫₀^τ f dt over samples, using the local cubic interpolant on each interval
/// (two-point Gauss–Legendre is exact for it).
fn integrate_samples(times: &[f64], values: &[Complex64], tau: f64) -> Complex64 {
    let n = times.len();
    let node = 0.5 / 3f64.sqrt();
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..n.saturating_sub(1) {
        let a = times[i];
        if a >= tau {
            break;
        }
        let b = times[i + 1].min(tau);
        let h = b - a;
        if h <= 0.0 {
            continue;
        }
        let width = n.min(4);
        let start = i.saturating_sub(1).min(n - width);
        let ts = &times[start..start + width];
        let fs = &values[start..start + width];
        let mid = 0.5 * (a + b);
        total += (lagrange(ts, fs, mid - node * h) + lagrange(ts, fs, mid + node * h)) * (0.5 * h);
    }
    total
}

/// SNR from a sampled trajectory: integrates the homodyne mean signal
/// 2κ·Re[e^{iφ} ∫(α_+ − α_−) dt] and divides by the vacuum noise
/// √(2N₀κτ). With [`Quadrature::Optimal`] the phase is the exact maximizer
/// φ = −arg ∫(α_+ − α_−) dt.
pub fn snr_numeric(traj: &PointerTrajectory, setup: &HomodyneSetup) -> Result<SnrResult> {
    if traj.normalization != Normalization::Raw {
        return Err(Error::InvalidArgument("snr_numeric needs a raw (unnormalized) trajectory".into()));
    }
    check_tau(setup.tau)?;
    if !(setup.noise_floor > 0.0) {
        return Err(Error::InvalidArgument("noise floor must be positive".into()));
    }
    let span = traj.span();
    if setup.tau > span * (1.0 + 1e-12) {
        return Err(Error::TauOutOfRange { tau: setup.tau, span });
    }
    let diff: Vec<Complex64> = traj.alpha_plus.iter().zip(&traj.alpha_minus).map(|(p, m)| p - m).collect();
    let integral = integrate_samples(&traj.times, &diff, setup.tau);
    let projected = match setup.quadrature {
        Quadrature::Optimal => integral.norm(),
        Quadrature::Fixed(phi) => (Complex64::from_polar(1.0, phi) * integral).re.abs(),
    };
    let signal = 2.0 * traj.kappa * projected;
    let noise = (2.0 * setup.noise_floor * traj.kappa * setup.tau).sqrt();
    let protocol = match traj.protocol {
        ReadoutProtocol::Dispersive => SnrProtocol::Dispersive,
        ReadoutProtocol::Longitudinal if traj.chi != 0.0 => SnrProtocol::LongitudinalResidualChi,
        ReadoutProtocol::Longitudinal => SnrProtocol::Longitudinal,
    };
    Ok(SnrResult::new(signal, noise, protocol))
}

/// Applies a single-mode squeezed input to a longitudinal result. With the
/// squeeze axis orthogonal to the displacement the noise drops by e^{−r}/√P
/// and the SNR grows by e^{r}√P.
pub fn snr_squeezed(base: &SnrResult, squeeze: &SqueezeSpec) -> Result<SnrResult> {
    if base.protocol != SnrProtocol::Longitudinal {
        return Err(Error::Unsupported(format!(
            "squeezing applies to ideal longitudinal readout only (got {:?}); under dispersive coupling the \
             squeeze angle rotates with the qubit state and squeezing can lengthen the measurement",
            base.protocol
        )));
    }
    let noise = base.noise * squeeze.measured_variance().sqrt();
    Ok(SnrResult {
        signal: base.signal,
        noise,
        snr: base.snr * squeeze.snr_gain(),
        protocol: SnrProtocol::SqueezedLongitudinal,
    })
}

/// F = 1 − ½ erfc(SNR/2): two equal-variance Gaussian record distributions
/// separated by SNR standard deviations of the summed noise, split at the
/// midpoint.
pub fn fidelity_from_snr(snr: f64) -> f64 {
    1.0 - 0.5 * erfc(snr / 2.0)
}

/// Inverse of [`fidelity_from_snr`]: 2·erfc⁻¹(2(1 − F)).
pub fn snr_for_fidelity(fidelity: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    Ok(2.0 * erfc_inv(2.0 * (1.0 - fidelity)))
}

fn check_fidelity(fidelity: f64) -> Result<()> {
    if !(fidelity > 0.5 && fidelity < 1.0) {
        return Err(Error::InvalidArgument(format!("target fidelity must lie in (0.5, 1), got {fidelity}")));
    }
    Ok(())
}

/// How squeezing enters a photon-budget search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SqueezePolicy {
    None,
    Fixed(SqueezeSpec),
    /// Best squeezing up to `max_db` at the given purity.
    Optimized { max_db: f64, purity: f64 },
}

impl SqueezePolicy {
    fn resolve(&self, protocol: ReadoutProtocol) -> Result<Option<SqueezeSpec>> {
        let spec = match *self {
            SqueezePolicy::None => return Ok(None),
            SqueezePolicy::Fixed(spec) => spec,
            // SNR grows monotonically with r, so the optimum sits on the cap.
            SqueezePolicy::Optimized { max_db, purity } => SqueezeSpec::from_db(max_db, purity)?,
        };
        if protocol == ReadoutProtocol::Dispersive {
            return Err(Error::Unsupported("squeezed dispersive readout is out of scope".into()));
        }
        Ok(Some(spec))
    }
}

fn squeeze_gain(protocol: ReadoutProtocol, squeeze: Option<&SqueezeSpec>) -> Result<f64> {
    match squeeze {
        None => Ok(1.0),
        Some(_) if protocol == ReadoutProtocol::Dispersive => {
            Err(Error::Unsupported("squeezed dispersive readout is out of scope".into()))
        }
        Some(s) => Ok(s.snr_gain()),
    }
}

/// Smallest integration time reaching `fidelity`, by bisection on a bracket
/// grown geometrically from 1/κ. The returned τ always meets the target.
pub fn required_tau(
    amplitude: f64,
    kappa: f64,
    fidelity: f64,
    protocol: ReadoutProtocol,
    squeeze: Option<&SqueezeSpec>,
) -> Result<f64> {
    check_fidelity(fidelity)?;
    check_kappa(kappa)?;
    if amplitude == 0.0 || !amplitude.is_finite() {
        return Err(Error::InvalidArgument("zero coupling never reaches the fidelity target".into()));
    }
    let gain = squeeze_gain(protocol, squeeze)?;
    let reaches = |tau: f64| -> Result<bool> {
        let snr = snr_analytic(protocol, amplitude, kappa, tau)?.snr * gain;
        Ok(fidelity_from_snr(snr) >= fidelity)
    };

    let mut lo = 0.0;
    let mut hi = 1.0 / kappa;
    let mut grown = 0;
    while !reaches(hi)? {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 200 {
            return Err(Error::NoBracket { lo, hi });
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-15 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Coupling amplitude per unit κ at intra-cavity photon number n̄:
/// n̄ = (g̃_z/κ)² for longitudinal and n̄ = 2(ε/κ)² for dispersive readout at
/// χ = κ/2.
pub fn amplitude_over_kappa(protocol: ReadoutProtocol, n_bar: f64) -> f64 {
    match protocol {
        ReadoutProtocol::Longitudinal => n_bar.sqrt(),
        ReadoutProtocol::Dispersive => (n_bar / 2.0).sqrt(),
    }
}

pub fn photons_for_amplitude(protocol: ReadoutProtocol, amplitude_over_kappa: f64) -> f64 {
    match protocol {
        ReadoutProtocol::Longitudinal => amplitude_over_kappa.powi(2),
        ReadoutProtocol::Dispersive => 2.0 * amplitude_over_kappa.powi(2),
    }
}

/// Smallest cavity damping rate (rad/s) that reaches `fidelity` within `tau`
/// at fixed photon number, searched by log-bisection over κ/2π ∈ [10 kHz, 1 GHz].
pub fn required_kappa_vs_photons(
    n_bar: f64,
    tau: f64,
    fidelity: f64,
    protocol: ReadoutProtocol,
    policy: &SqueezePolicy,
) -> Result<f64> {
    if !(n_bar > 0.0 && n_bar.is_finite()) {
        return Err(Error::InvalidArgument(format!("photon number must be positive, got {n_bar}")));
    }
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    check_fidelity(fidelity)?;
    let squeeze = policy.resolve(protocol)?;
    let gain = squeeze_gain(protocol, squeeze.as_ref())?;
    let ratio = amplitude_over_kappa(protocol, n_bar);
    let reaches = |kappa: f64| -> Result<bool> {
        let snr = snr_analytic(protocol, ratio * kappa, kappa, tau)?.snr * gain;
        Ok(fidelity_from_snr(snr) >= fidelity)
    };

    let mut lo = TWO_PI * KAPPA_SEARCH_HZ.0;
    let mut hi = TWO_PI * KAPPA_SEARCH_HZ.1;
    if reaches(lo)? || !reaches(hi)? {
        return Err(Error::NoBracket { lo, hi });
    }
    while hi / lo - 1.0 > KAPPA_SEARCH_RTOL {
        let mid = (lo * hi).sqrt();
        if reaches(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Photon number needed to reach `fidelity` within `tau` at damping `kappa`.
/// SNR is linear in the drive amplitude, so this inverts in closed form.
pub fn required_photons(
    kappa: f64,
    tau: f64,
    fidelity: f64,
    protocol: ReadoutProtocol,
    policy: &SqueezePolicy,
) -> Result<f64> {
    check_kappa(kappa)?;
    if !(tau > 0.0) {
        return Err(Error::InvalidArgument(format!("tau must be positive, got {tau}")));
    }
    let squeeze = policy.resolve(protocol)?;
    let gain = squeeze_gain(protocol, squeeze.as_ref())?;
    let target = snr_for_fidelity(fidelity)?;
    let unit = snr_analytic(protocol, kappa, kappa, tau)?.snr * gain;
    Ok(photons_for_amplitude(protocol, target / unit))
}

/// Qubit relaxation through the cavity, γ_κ = (g_x/Δ)²κ.
pub fn purcell_rate(g_x: f64, delta: f64, kappa: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::InvalidArgument("Purcell rate diverges at zero detuning".into()));
    }
    Ok((g_x / delta).powi(2) * kappa)
}

/// n_crit = (Δ/2g_x)². Without transverse coupling there is no critical
/// photon number and `f64::INFINITY` is returned.
pub fn critical_photon_number(g_x: f64, delta: f64) -> f64 {
    if g_x == 0.0 {
        return f64::INFINITY;
    }
    (delta / (2.0 * g_x)).powi(2)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantumLimit {
    /// Measurement-induced dephasing rate Γ_φm = (κ/2)|α_+ − α_−|² in steady state.
    pub gamma_phi_m: f64,
    /// Measurement rate Γ_meas = lim_{τ→∞} SNR²/(4τ).
    pub gamma_meas: f64,
    /// Γ_meas/Γ_φm; `None` when both vanish.
    pub ratio: Option<f64>,
}

/// Time at which the long-time limit of SNR²/(4τ) is first sampled, in units of 1/κ.
pub const LIMIT_PROXY_KAPPA_TAU: f64 = 1e3;

/// Compares the measurement rate of ideal longitudinal readout with its
/// measurement-induced dephasing.
///
/// SNR_z²/(4τ) approaches its limit as 1 − 4/κτ + 4/(κτ)² (up to terms
/// e^{−κτ/2}), so the limit is extrapolated in 1/τ from κτ = 10³, 2·10³ and
/// 4·10³ with two rounds of Richardson elimination.
pub fn quantum_limit_check(g_z_mod: f64, kappa: f64) -> Result<QuantumLimit> {
    check_kappa(kappa)?;
    let rate = |kappa_tau: f64| -> Result<f64> {
        let tau = kappa_tau / kappa;
        Ok(snr_longitudinal(g_z_mod, kappa, tau)?.snr.powi(2) / (4.0 * tau))
    };
    let f1 = rate(LIMIT_PROXY_KAPPA_TAU)?;
    let f2 = rate(2.0 * LIMIT_PROXY_KAPPA_TAU)?;
    let f4 = rate(4.0 * LIMIT_PROXY_KAPPA_TAU)?;
    let r1 = 2.0 * f2 - f1;
    let r2 = 2.0 * f4 - f2;
    let gamma_meas = (4.0 * r2 - r1) / 3.0;

    let model = LinearPointerModel::longitudinal(&SystemParams::new(kappa, 1.0).with_g_z_mod(g_z_mod));
    let sep = model.steady_state(crate::model::QubitState::Plus) - model.steady_state(crate::model::QubitState::Minus);
    let gamma_phi_m = kappa / 2.0 * sep.norm_sqr();
    let ratio = (gamma_phi_m > 0.0).then(|| gamma_meas / gamma_phi_m);
    Ok(QuantumLimit { gamma_phi_m, gamma_meas, ratio })
}
