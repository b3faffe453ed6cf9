//! Pointer-state trajectories of the cavity field.
//!
//! At fixed qubit state s = ±1 both protocols reduce to a driven, damped
//! linear oscillator for the mean cavity amplitude α_s,
//!
//! ```text
//! dα_s/dt = u(t)·D_s − Γ_s·α_s
//! ```
//!
//! with drive D_s and complex decay Γ_s = κ/2 + i·s·χ:
//!
//! * longitudinal: D_s = −i·s·g̃_z/2 (the modulated coupling acts as a
//!   qubit-state dependent drive),
//! * dispersive: D_s = −i·ε (a coherent drive, qubit-independent).
//!
//! Means of Gaussian states close exactly under these equations, so no
//! Hilbert-space truncation is needed anywhere.
//!
//! Sign convention: with the drive −i·s·g̃_z/2 the longitudinal pointer states
//! sit on the imaginary axis and s = +1 ends at (0, −1) in the normalized
//! output frame.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{validate, EnvelopeKind, EnvelopeSpec, QubitState, ReadoutProtocol, SystemParams, TWO_PI};
use crate::ode::Dopri5;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Minimum integrator samples per cavity period in lab-frame runs.
pub const LAB_SAMPLES_PER_PERIOD: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Interaction,
    /// Integrated in the lab frame, then rotated into the interaction frame.
    Lab,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Raw,
    UnitSteadyState,
}

/// Time-sampled mean cavity amplitude for both qubit states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointerTrajectory {
    pub times: Vec<f64>,
    pub alpha_plus: Vec<Complex64>,
    pub alpha_minus: Vec<Complex64>,
    pub frame: Frame,
    pub normalization: Normalization,
    pub protocol: ReadoutProtocol,
    pub kappa: f64,
    /// Dispersive (or residual dispersive) shift used for this run.
    pub chi: f64,
    /// Mean input field a_in(t) driving the cavity; zero for longitudinal.
    pub input_field: Vec<Complex64>,
    pub input_steady: Complex64,
    /// Steady-state amplitudes under full drive (u = 1).
    pub steady_plus: Complex64,
    pub steady_minus: Complex64,
}

impl PointerTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0)
    }

    pub fn branch(&self, s: QubitState) -> &[Complex64] {
        match s {
            QubitState::Plus => &self.alpha_plus,
            QubitState::Minus => &self.alpha_minus,
        }
    }
}

/// e^z − 1 without cancellation for small |z|.
pub(crate) fn cexpm1(z: Complex64) -> Complex64 {
    let (s, c) = z.im.sin_cos();
    let half = (0.5 * z.im).sin();
    Complex64::new(z.re.exp_m1() * c - 2.0 * half * half, z.re.exp() * s)
}

/// The linear pointer equation dα_s/dt = u(t)·D_s − Γ_s·α_s for both s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPointerModel {
    pub protocol: ReadoutProtocol,
    pub kappa: f64,
    pub chi: f64,
    drive: [Complex64; 2],
    decay: [Complex64; 2],
    input_steady: Complex64,
}

fn idx(s: QubitState) -> usize {
    match s {
        QubitState::Plus => 0,
        QubitState::Minus => 1,
    }
}

impl LinearPointerModel {
    /// Modulated longitudinal coupling, with residual dispersive shift `params.chi`.
    /// The static coupling ḡ_z drops out in the interaction frame.
    pub fn longitudinal(params: &SystemParams) -> Self {
        let drive = |s: f64| -I * s * params.g_z_mod / 2.0;
        Self::build(ReadoutProtocol::Longitudinal, params, [drive(1.0), drive(-1.0)], Complex64::new(0.0, 0.0))
    }

    /// Coherent drive ε with dispersive shift χ. The input field obeys
    /// −i·ε = −√κ·a_in, so a_in = i·ε/√κ.
    pub fn dispersive(params: &SystemParams) -> Self {
        let drive = -I * params.epsilon;
        let input = I * params.epsilon / params.kappa.sqrt();
        Self::build(ReadoutProtocol::Dispersive, params, [drive, drive], input)
    }

    pub fn for_protocol(protocol: ReadoutProtocol, params: &SystemParams) -> Self {
        match protocol {
            ReadoutProtocol::Longitudinal => Self::longitudinal(params),
            ReadoutProtocol::Dispersive => Self::dispersive(params),
        }
    }

    fn build(protocol: ReadoutProtocol, p: &SystemParams, drive: [Complex64; 2], input_steady: Complex64) -> Self {
        let decay = |s: f64| Complex64::new(p.kappa / 2.0, s * p.chi);
        Self { protocol, kappa: p.kappa, chi: p.chi, drive, decay: [decay(1.0), decay(-1.0)], input_steady }
    }

    pub fn drive(&self, s: QubitState) -> Complex64 {
        self.drive[idx(s)]
    }

    pub fn decay(&self, s: QubitState) -> Complex64 {
        self.decay[idx(s)]
    }

    pub fn steady_state(&self, s: QubitState) -> Complex64 {
        self.drive(s) / self.decay(s)
    }

    /// Closed-form amplitude at time `t` for a step turn-on at t = 0.
    pub fn step_response(&self, s: QubitState, t: f64) -> Complex64 {
        if t <= 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        -self.steady_state(s) * cexpm1(-self.decay(s) * t)
    }

    /// Integrates the pointer equation for both qubit states on `times`.
    pub fn solve_numeric(&self, envelope: &EnvelopeSpec, times: &[f64], solver: &Dopri5) -> Result<[Vec<Complex64>; 2]> {
        let mut branches = [Vec::new(), Vec::new()];
        for s in QubitState::BOTH {
            let d = self.drive(s);
            let g = self.decay(s);
            let kappa = self.kappa;
            let env = *envelope;
            let rhs = move |t: f64, y: &[f64; 2]| {
                let a = Complex64::new(y[0], y[1]);
                let da = d * env.value(kappa, t) - g * a;
                [da.re, da.im]
            };
            let sol = solver.solve(rhs, [0.0, 0.0], times)?;
            branches[idx(s)] = sol.into_iter().map(|y| Complex64::new(y[0], y[1])).collect();
        }
        Ok(branches)
    }

    /// Closed form for a step envelope, numerical integration otherwise.
    pub fn trajectory(&self, envelope: &EnvelopeSpec, times: &[f64]) -> Result<PointerTrajectory> {
        let [plus, minus] = match envelope.kind {
            EnvelopeKind::Step => QubitState::BOTH.map(|s| times.iter().map(|&t| self.step_response(s, t)).collect()),
            EnvelopeKind::Arctan => self.solve_numeric(envelope, times, &Dopri5::default())?,
        };
        Ok(self.package(times.to_vec(), plus, minus, envelope))
    }

    fn package(
        &self,
        times: Vec<f64>,
        alpha_plus: Vec<Complex64>,
        alpha_minus: Vec<Complex64>,
        envelope: &EnvelopeSpec,
    ) -> PointerTrajectory {
        let input_field = times.iter().map(|&t| self.input_steady * envelope.value(self.kappa, t)).collect();
        PointerTrajectory {
            times,
            alpha_plus,
            alpha_minus,
            frame: Frame::Interaction,
            normalization: Normalization::Raw,
            protocol: self.protocol,
            kappa: self.kappa,
            chi: self.chi,
            input_field,
            input_steady: self.input_steady,
            steady_plus: self.steady_state(QubitState::Plus),
            steady_minus: self.steady_state(QubitState::Minus),
        }
    }
}

/// `n_samples` evenly spaced times on [0, t_max].
pub fn uniform_grid(t_max: f64, n_samples: usize) -> Result<Vec<f64>> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 samples, got {n_samples}")));
    }
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidArgument(format!("t_max must be positive and finite, got {t_max}")));
    }
    let last = (n_samples - 1) as f64;
    Ok((0..n_samples).map(|k| t_max * k as f64 / last).collect())
}

/// Interaction-frame trajectory of the modulated longitudinal protocol.
pub fn longitudinal_trajectory(
    params: &SystemParams,
    envelope: &EnvelopeSpec,
    t_max: f64,
    n_samples: usize,
) -> Result<PointerTrajectory> {
    let params = validate(*params)?.params;
    envelope.check()?;
    let times = uniform_grid(t_max, n_samples)?;
    LinearPointerModel::longitudinal(&params).trajectory(envelope, &times)
}

/// Interaction-frame trajectory of dispersive readout under a coherent drive.
pub fn dispersive_trajectory(
    params: &SystemParams,
    envelope: &EnvelopeSpec,
    t_max: f64,
    n_samples: usize,
) -> Result<PointerTrajectory> {
    let params = validate(*params)?.params;
    envelope.check()?;
    let times = uniform_grid(t_max, n_samples)?;
    LinearPointerModel::dispersive(&params).trajectory(envelope, &times)
}

/// |α_+(t) − α_−(t)| at every sample.
pub fn pointer_separation(traj: &PointerTrajectory) -> Vec<(f64, f64)> {
    traj.times
        .iter()
        .zip(traj.alpha_plus.iter().zip(&traj.alpha_minus))
        .map(|(&t, (p, m))| (t, (p - m).norm()))
        .collect()
}

/// Maps a raw trajectory onto the normalized output field.
///
/// The output field is a_out = a_in + √κ·α. A global rotation then places the
/// steady-state separation on the vertical axis with s = +1 below the origin,
/// and everything is divided by half the steady-state separation so the
/// endpoints sit at distance one from the midpoint. For the longitudinal
/// protocol the rotation is the identity. Input trajectories already
/// normalized are returned unchanged.
pub fn output_field_frame(traj: &PointerTrajectory) -> Result<PointerTrajectory> {
    if traj.normalization == Normalization::UnitSteadyState {
        return Ok(traj.clone());
    }
    let root_kappa = traj.kappa.sqrt();
    let out_plus = traj.input_steady + root_kappa * traj.steady_plus;
    let out_minus = traj.input_steady + root_kappa * traj.steady_minus;
    let half_sep = (out_plus - out_minus) / 2.0;
    let scale = half_sep.norm();
    if !(scale > 0.0) {
        return Err(Error::ZeroSeparation);
    }
    let rotation = -I * scale / half_sep;
    let map = |a_in: Complex64, a: Complex64| rotation * (a_in + root_kappa * a) / scale;

    let alpha_plus = traj.input_field.iter().zip(&traj.alpha_plus).map(|(&i, &a)| map(i, a)).collect();
    let alpha_minus = traj.input_field.iter().zip(&traj.alpha_minus).map(|(&i, &a)| map(i, a)).collect();
    Ok(PointerTrajectory {
        times: traj.times.clone(),
        alpha_plus,
        alpha_minus,
        normalization: Normalization::UnitSteadyState,
        input_field: vec![Complex64::new(0.0, 0.0); traj.len()],
        input_steady: Complex64::new(0.0, 0.0),
        steady_plus: rotation * out_plus / scale,
        steady_minus: rotation * out_minus / scale,
        ..traj.clone()
    })
}

/// Steady-state lab-frame displacement −i·s·ḡ_z/(iω_r + κ/2) without
/// modulation.
pub fn unmodulated_steady_state(params: &SystemParams, s: QubitState) -> Complex64 {
    -I * s.sign() * params.g_z_dc / Complex64::new(params.kappa / 2.0, params.omega_r)
}

/// Lab-frame integration of the full modulated coupling, rotated into the
/// interaction frame by e^{iω_r t}. Serves as the oracle for the
/// rotating-wave approximation.
pub fn lab_frame_trajectory(params: &SystemParams, t_max: f64, n_samples: usize, tol: f64) -> Result<PointerTrajectory> {
    let params = validate(*params)?.params;
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidArgument(format!("tolerance must lie in (0, 1), got {tol}")));
    }
    let times = uniform_grid(t_max, n_samples)?;
    let period = TWO_PI / params.omega_r;
    let amplitude = (params.g_z_mod.abs().max(params.g_z_dc.abs()) / params.kappa).max(f64::MIN_POSITIVE);
    let solver = Dopri5::with_tolerances(tol, tol * 1e-3 * amplitude).with_h_max(period / LAB_SAMPLES_PER_PERIOD);

    let decay = Complex64::new(params.kappa / 2.0, params.omega_r);
    let mut branches = [Vec::new(), Vec::new()];
    for s in QubitState::BOTH {
        let sign = s.sign();
        let rhs = |t: f64, y: &[f64; 2]| {
            let a = Complex64::new(y[0], y[1]);
            let g = params.g_z_dc + params.g_z_mod * (params.omega_r * t).cos();
            let da = -decay * a - I * sign * g;
            [da.re, da.im]
        };
        let sol = solver.solve(rhs, [0.0, 0.0], &times)?;
        branches[idx(s)] = sol
            .into_iter()
            .zip(&times)
            .map(|(y, &t)| Complex64::new(y[0], y[1]) * Complex64::from_polar(1.0, params.omega_r * t))
            .collect();
    }
    let [plus, minus] = branches;
    let model = LinearPointerModel::longitudinal(&params.with_chi(0.0));
    let mut traj = model.package(times, plus, minus, &EnvelopeSpec::step());
    traj.frame = Frame::Lab;
    Ok(traj)
}
