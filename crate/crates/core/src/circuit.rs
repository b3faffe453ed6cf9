//! Transmon phase-biased by an LC oscillator: coupling strengths, qubit
//! frequency and residual dispersive shift versus external flux.
//!
//! Energies are given as E/h in GHz; returned rates are angular (rad/s).
//! Only the leading order in Z₀/R_K is modelled.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, FieldError, Result};
use crate::measurement::{critical_photon_number, purcell_rate};
use crate::model::ghz_to_rad;

/// Resistance quantum h/e² in ohms.
pub const R_K: f64 = 25812.807;

/// Below this E_J/E_C the transmon regime is flagged.
pub const TRANSMON_RATIO_WARNING: f64 = 20.0;
pub const IMPEDANCE_RATIO_WARNING: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransmonCircuit {
    /// Mean Josephson energy E_J/h (GHz). The junctions carry E_J(1 ± d)/2.
    pub e_j: f64,
    /// Charging energy E_C/h (GHz).
    pub e_c: f64,
    /// Junction asymmetry d ∈ [0, 1].
    pub d: f64,
    /// Oscillator impedance √(L/C) in ohms.
    pub z0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum CircuitWarning {
    WeakTransmonRatio { ej_over_ec: f64 },
    LargeImpedance { z0_over_rk: f64 },
}

impl std::fmt::Display for CircuitWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CircuitWarning::WeakTransmonRatio { ej_over_ec } => {
                write!(f, "E_J/E_C = {ej_over_ec:.2} is below {TRANSMON_RATIO_WARNING}; outside the transmon regime")
            }
            CircuitWarning::LargeImpedance { z0_over_rk } => {
                write!(f, "Z0/R_K = {z0_over_rk:.3} exceeds {IMPEDANCE_RATIO_WARNING}; leading-order couplings are inaccurate")
            }
        }
    }
}

impl TransmonCircuit {
    pub fn new(e_j: f64, e_c: f64, d: f64, z0: f64) -> Self {
        Self { e_j, e_c, d, z0 }
    }

    /// E_J/h = 20 GHz, E_J/E_C = 67, d = 0.02, Z₀ = 50 Ω.
    pub fn reference() -> Self {
        Self::new(20.0, 20.0 / 67.0, 0.02, 50.0)
    }

    pub fn validate(&self) -> Result<Vec<CircuitWarning>> {
        let mut errors = Vec::new();
        if !(self.e_j > 0.0 && self.e_j.is_finite()) {
            errors.push(FieldError::new("e_j", "must be positive"));
        }
        if !(self.e_c > 0.0 && self.e_c.is_finite()) {
            errors.push(FieldError::new("e_c", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.d) {
            errors.push(FieldError::new("d", "asymmetry must lie in [0, 1]"));
        }
        if !(self.z0 > 0.0 && self.z0.is_finite()) {
            errors.push(FieldError::new("z0", "must be positive"));
        }
        if !errors.is_empty() {
            return Err(Error::InvalidParams(errors));
        }
        let mut warnings = Vec::new();
        if self.e_j / self.e_c < TRANSMON_RATIO_WARNING {
            warnings.push(CircuitWarning::WeakTransmonRatio { ej_over_ec: self.e_j / self.e_c });
        }
        if self.z0 / R_K > IMPEDANCE_RATIO_WARNING {
            warnings.push(CircuitWarning::LargeImpedance { z0_over_rk: self.z0 / R_K });
        }
        Ok(warnings)
    }

    pub fn e_c_rate(&self) -> f64 {
        ghz_to_rad(self.e_c)
    }

    fn impedance_factor(&self) -> f64 {
        (PI * self.z0 / R_K).sqrt()
    }

    /// |g_z| at Φ_x = Φ₀/2, in rad/s.
    pub fn g_z_amplitude(&self) -> f64 {
        ghz_to_rad(self.e_j / 2.0 * (2.0 * self.e_c / self.e_j).sqrt() * self.impedance_factor())
    }

    /// g_x at Φ_x = 0, in rad/s.
    pub fn g_x_amplitude(&self) -> f64 {
        ghz_to_rad(self.d * self.e_j * (2.0 * self.e_c / self.e_j).powf(0.25) * self.impedance_factor())
    }
}

/// External flux in units of Φ₀. The coupling formulas use the raw value:
/// they are 2Φ₀-periodic, so folding into one Φ₀ would flip the sign of g_z.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FluxBias(pub f64);

impl FluxBias {
    /// Flux folded into [−0.5, 0.5) for reporting.
    pub fn reduced(self) -> f64 {
        let r = (self.0 + 0.5).rem_euclid(1.0) - 0.5;
        if r >= 0.5 { r - 1.0 } else { r }
    }

    fn angle(self) -> f64 {
        PI * self.0
    }
}

/// g_z = −(E_J/2)(2E_C/E_J)^{1/2} √(πZ₀/R_K) sin(πΦ_x/Φ₀).
pub fn g_z_of_flux(circ: &TransmonCircuit, flux: FluxBias) -> f64 {
    -circ.g_z_amplitude() * flux.angle().sin()
}

/// g_x = d·E_J (2E_C/E_J)^{1/4} √(πZ₀/R_K) cos(πΦ_x/Φ₀).
pub fn g_x_of_flux(circ: &TransmonCircuit, flux: FluxBias) -> f64 {
    circ.g_x_amplitude() * flux.angle().cos()
}

/// Flux-tuned effective Josephson energy (GHz),
/// E_J|cos(πΦ_x/Φ₀)|√(1 + d² tan²(πΦ_x/Φ₀)) = E_J√(cos² + d² sin²).
pub fn effective_josephson_energy(circ: &TransmonCircuit, flux: FluxBias) -> f64 {
    let (s, c) = flux.angle().sin_cos();
    circ.e_j * (c * c + circ.d * circ.d * s * s).sqrt()
}

/// ω_a = √(8 E_J(Φ_x) E_C) − E_C, in rad/s.
pub fn transmon_frequency(circ: &TransmonCircuit, flux: FluxBias) -> Result<f64> {
    let e_j = effective_josephson_energy(circ, flux);
    let f = (8.0 * e_j * circ.e_c).sqrt() - circ.e_c;
    if !(f > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "qubit frequency is not positive at flux {} (E_J(Φ) = {e_j} GHz)",
            flux.0
        )));
    }
    Ok(ghz_to_rad(f))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModulationAmplitude {
    /// Static coupling ḡ_z (rad/s).
    pub g_z_dc: f64,
    /// First-harmonic modulation amplitude g̃_z (rad/s).
    pub g_z_mod: f64,
}

/// Coupling under a flux drive Φ_center + depth·cos(ω_r t).
pub fn modulation_amplitude(circ: &TransmonCircuit, center: FluxBias, depth: f64) -> Result<ModulationAmplitude> {
    if !(depth >= 0.0 && depth.is_finite()) {
        return Err(Error::InvalidArgument(format!("modulation depth must be non-negative, got {depth}")));
    }
    let up = g_z_of_flux(circ, FluxBias(center.0 + depth));
    let down = g_z_of_flux(circ, FluxBias(center.0 - depth));
    Ok(ModulationAmplitude { g_z_dc: g_z_of_flux(circ, center), g_z_mod: (up - down) / 2.0 })
}

/// Dispersive shift from a residual transverse coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualChi {
    /// Two-level value g_x²/Δ.
    pub two_level: f64,
    /// Transmon value g_x²·E_C/(Δ(Δ − E_C)), the default reported one.
    pub transmon: f64,
}

/// All inputs are angular rates. Both values are positive for Δ > E_C > 0.
pub fn residual_chi(g_x: f64, delta: f64, e_c: f64) -> Result<ResidualChi> {
    if delta == 0.0 {
        return Err(Error::Pole("residual chi at zero detuning"));
    }
    if delta == e_c {
        return Err(Error::Pole("transmon residual chi at delta = E_C"));
    }
    let g2 = g_x * g_x;
    Ok(ResidualChi { two_level: g2 / delta, transmon: g2 * e_c / (delta * (delta - e_c)) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FluxPoint {
    pub phi_over_phi0: f64,
    pub g_z: f64,
    pub g_x: f64,
    pub omega_a: f64,
}

/// Couplings and qubit frequency on `n` evenly spaced flux points.
pub fn flux_sweep(circ: &TransmonCircuit, from: f64, to: f64, n: usize) -> Result<Vec<FluxPoint>> {
    if n < 2 {
        return Err(Error::InvalidArgument("flux sweep needs at least two points".into()));
    }
    (0..n)
        .map(|k| {
            let phi = from + (to - from) * k as f64 / (n - 1) as f64;
            let flux = FluxBias(phi);
            Ok(FluxPoint {
                phi_over_phi0: phi,
                g_z: g_z_of_flux(circ, flux),
                g_x: g_x_of_flux(circ, flux),
                omega_a: transmon_frequency(circ, flux)?,
            })
        })
        .collect()
}

/// Everything the `design` report prints, in rad/s unless noted.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignReport {
    pub circuit: TransmonCircuit,
    pub flux: f64,
    pub flux_depth: f64,
    pub g_z_amplitude: f64,
    pub g_x_amplitude: f64,
    pub g_z: f64,
    pub g_x: f64,
    pub modulation: ModulationAmplitude,
    pub omega_a: f64,
    /// Qubit frequency change over flux ∈ [center − depth, center + depth].
    pub omega_a_excursion: f64,
    pub delta: f64,
    pub kappa: f64,
    pub residual_chi: ResidualChi,
    pub purcell_rate: f64,
    pub critical_photons: f64,
    pub warnings: Vec<String>,
}

pub fn design_report(circ: &TransmonCircuit, flux: FluxBias, depth: f64, delta: f64, kappa: f64) -> Result<DesignReport> {
    let warnings = circ.validate()?.iter().map(ToString::to_string).collect();
    let g_x = g_x_of_flux(circ, flux);
    let modulation = modulation_amplitude(circ, flux, depth)?;
    let omega_a = transmon_frequency(circ, flux)?;
    let samples = 201;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..samples {
        let phi = flux.0 - depth + 2.0 * depth * k as f64 / (samples - 1) as f64;
        let w = transmon_frequency(circ, FluxBias(phi))?;
        lo = lo.min(w);
        hi = hi.max(w);
    }
    Ok(DesignReport {
        circuit: *circ,
        flux: flux.0,
        flux_depth: depth,
        g_z_amplitude: circ.g_z_amplitude(),
        g_x_amplitude: circ.g_x_amplitude(),
        g_z: g_z_of_flux(circ, flux),
        g_x,
        modulation,
        omega_a,
        omega_a_excursion: hi - lo,
        delta,
        kappa,
        residual_chi: residual_chi(g_x, delta, circ.e_c_rate())?,
        purcell_rate: purcell_rate(g_x, delta, kappa)?,
        critical_photons: critical_photon_number(g_x, delta),
        warnings,
    })
}
