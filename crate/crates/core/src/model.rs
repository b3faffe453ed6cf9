//! Parameter types shared by every module.
//!
//! Internally every rate and frequency is an angular quantity in rad/s. The
//! user-facing side (config files, CLI flags, CSV columns) speaks ordinary
//! frequency: MHz for rates, GHz for oscillator frequencies and energies
//! (E/h). [`FrequencyParams::to_system`] is the single place where the
//! conversion happens.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, FieldError, Result};

pub const TWO_PI: f64 = 2.0 * PI;

/// Above this ratio of modulation amplitude to cavity frequency the
/// rotating-wave approximation is flagged as questionable.
pub const RWA_WARNING_RATIO: f64 = 0.1;

/// Ordinary frequency in MHz to angular rate in rad/s.
pub fn mhz_to_rad(f_mhz: f64) -> f64 {
    TWO_PI * f_mhz * 1e6
}

pub fn rad_to_mhz(omega: f64) -> f64 {
    omega / (TWO_PI * 1e6)
}

pub fn ghz_to_rad(f_ghz: f64) -> f64 {
    TWO_PI * f_ghz * 1e9
}

pub fn rad_to_ghz(omega: f64) -> f64 {
    omega / (TWO_PI * 1e9)
}

/// Sign of the qubit's σ_z eigenvalue.
///
/// `Plus` (s = +1) is labelled `1` in bitstrings and `Minus` (s = −1) is
/// labelled `0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitState {
    Plus,
    Minus,
}

impl QubitState {
    pub const BOTH: [QubitState; 2] = [QubitState::Plus, QubitState::Minus];

    pub fn sign(self) -> f64 {
        match self {
            QubitState::Plus => 1.0,
            QubitState::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            QubitState::Plus => QubitState::Minus,
            QubitState::Minus => QubitState::Plus,
        }
    }
}

/// Which readout scheme a computation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReadoutProtocol {
    /// Longitudinal coupling modulated at the cavity frequency.
    Longitudinal,
    /// Coherent drive of amplitude ε with dispersive shift χ.
    Dispersive,
}

impl std::str::FromStr for ReadoutProtocol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "longitudinal" => Ok(ReadoutProtocol::Longitudinal),
            "dispersive" => Ok(ReadoutProtocol::Dispersive),
            other => Err(Error::InvalidArgument(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Qubit-cavity parameters. All fields are angular rates in rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity energy damping rate κ.
    pub kappa: f64,
    pub omega_r: f64,
    pub omega_a: f64,
    /// Static part ḡ_z of the longitudinal coupling.
    pub g_z_dc: f64,
    /// Modulation amplitude g̃_z of the longitudinal coupling.
    pub g_z_mod: f64,
    /// Transverse coupling g_x.
    pub g_x: f64,
    /// Dispersive shift χ (signed).
    pub chi: f64,
    /// Coherent drive amplitude ε.
    pub epsilon: f64,
    /// Qubit-cavity detuning Δ.
    pub delta: f64,
}

impl SystemParams {
    /// Bare cavity with every coupling and drive set to zero.
    pub fn new(kappa: f64, omega_r: f64) -> Self {
        Self {
            kappa,
            omega_r,
            omega_a: 0.0,
            g_z_dc: 0.0,
            g_z_mod: 0.0,
            g_x: 0.0,
            chi: 0.0,
            epsilon: 0.0,
            delta: 0.0,
        }
    }

    /// Dimensionless parameters with κ = 1: times are in units of 1/κ and
    /// rates in units of κ. The cavity frequency is parked far away so that
    /// interaction-frame operations are unaffected by it.
    pub fn dimensionless() -> Self {
        Self::new(1.0, 1e6)
    }

    pub fn with_g_z_mod(mut self, g: f64) -> Self {
        self.g_z_mod = g;
        self
    }

    pub fn with_g_z_dc(mut self, g: f64) -> Self {
        self.g_z_dc = g;
        self
    }

    pub fn with_chi(mut self, chi: f64) -> Self {
        self.chi = chi;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_g_x(mut self, g_x: f64) -> Self {
        self.g_x = g_x;
        self
    }

    pub fn with_detuning(mut self, delta: f64) -> Self {
        self.delta = delta;
        self
    }

    fn fields(&self) -> [(&'static str, f64); 9] {
        [
            ("kappa", self.kappa),
            ("omega_r", self.omega_r),
            ("omega_a", self.omega_a),
            ("g_z_dc", self.g_z_dc),
            ("g_z_mod", self.g_z_mod),
            ("g_x", self.g_x),
            ("chi", self.chi),
            ("epsilon", self.epsilon),
            ("delta", self.delta),
        ]
    }
}

/// Non-fatal findings from [`validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Warning {
    /// g̃_z/ω_r is large enough that the rotating-wave approximation degrades.
    RwaRatio { ratio: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::RwaRatio { ratio } => write!(
                f,
                "g_z_mod/omega_r = {ratio:.3e} exceeds {RWA_WARNING_RATIO}; rotating-wave approximation is marginal"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Validated {
    pub params: SystemParams,
    pub warnings: Vec<Warning>,
}

/// Checks every invariant of `params`, collecting all violations.
pub fn validate(params: SystemParams) -> Result<Validated> {
    let mut errors = Vec::new();
    for (name, value) in params.fields() {
        if !value.is_finite() {
            errors.push(FieldError::new(name, "must be finite"));
        }
    }
    if !(params.kappa > 0.0) {
        errors.push(FieldError::new("kappa", "kappa must be positive"));
    }
    if !(params.omega_r > 0.0) {
        errors.push(FieldError::new("omega_r", "omega_r must be positive"));
    }
    if params.g_z_mod.abs() >= params.omega_r && params.omega_r > 0.0 {
        errors.push(FieldError::new(
            "g_z_mod",
            "modulation amplitude must be below omega_r",
        ));
    }
    if !errors.is_empty() {
        return Err(Error::InvalidParams(errors));
    }

    let mut warnings = Vec::new();
    let ratio = params.g_z_mod.abs() / params.omega_r;
    if ratio > RWA_WARNING_RATIO {
        warnings.push(Warning::RwaRatio { ratio });
    }
    Ok(Validated { params, warnings })
}

/// User-facing parameter set in ordinary frequency units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyParams {
    pub kappa_mhz: f64,
    pub omega_r_ghz: f64,
    pub omega_a_ghz: f64,
    pub gz_dc_mhz: f64,
    pub gz_mod_mhz: f64,
    pub gx_mhz: f64,
    pub chi_mhz: f64,
    pub epsilon_mhz: f64,
    pub delta_ghz: f64,
}

impl Default for FrequencyParams {
    fn default() -> Self {
        Self {
            kappa_mhz: 4.0,
            omega_r_ghz: 6.0,
            omega_a_ghz: 9.0,
            gz_dc_mhz: 0.0,
            gz_mod_mhz: 21.0,
            gx_mhz: 13.0,
            chi_mhz: 2.0,
            epsilon_mhz: 21.0,
            delta_ghz: 3.0,
        }
    }
}

impl FrequencyParams {
    pub fn to_system(&self) -> SystemParams {
        SystemParams {
            kappa: mhz_to_rad(self.kappa_mhz),
            omega_r: ghz_to_rad(self.omega_r_ghz),
            omega_a: ghz_to_rad(self.omega_a_ghz),
            g_z_dc: mhz_to_rad(self.gz_dc_mhz),
            g_z_mod: mhz_to_rad(self.gz_mod_mhz),
            g_x: mhz_to_rad(self.gx_mhz),
            chi: mhz_to_rad(self.chi_mhz),
            epsilon: mhz_to_rad(self.epsilon_mhz),
            delta: ghz_to_rad(self.delta_ghz),
        }
    }

    pub fn from_system(p: &SystemParams) -> Self {
        Self {
            kappa_mhz: rad_to_mhz(p.kappa),
            omega_r_ghz: rad_to_ghz(p.omega_r),
            omega_a_ghz: rad_to_ghz(p.omega_a),
            gz_dc_mhz: rad_to_mhz(p.g_z_dc),
            gz_mod_mhz: rad_to_mhz(p.g_z_mod),
            gx_mhz: rad_to_mhz(p.g_x),
            chi_mhz: rad_to_mhz(p.chi),
            epsilon_mhz: rad_to_mhz(p.epsilon),
            delta_ghz: rad_to_ghz(p.delta),
        }
    }

    /// Converts to angular units and validates.
    pub fn validate(&self) -> Result<Validated> {
        validate(self.to_system())
    }
}

/// Single-mode squeezed input.
///
/// `angle` is the orientation of the anti-squeezed axis measured from the
/// direction orthogonal to the pointer-state displacement; zero is the
/// optimal orientation, where the measured quadrature sees the reduced noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeSpec {
    pub r: f64,
    pub angle: f64,
    pub purity: f64,
}

impl SqueezeSpec {
    pub fn new(r: f64, angle: f64, purity: f64) -> Result<Self> {
        let mut errors = Vec::new();
        if !(r.is_finite() && r >= 0.0) {
            errors.push(FieldError::new("squeeze_r", "must be finite and non-negative"));
        }
        if !angle.is_finite() {
            errors.push(FieldError::new("squeeze_angle", "must be finite"));
        }
        if !(purity > 0.0 && purity <= 1.0) {
            errors.push(FieldError::new("squeeze_purity", "must lie in (0, 1]"));
        }
        if errors.is_empty() {
            Ok(Self { r, angle, purity })
        } else {
            Err(Error::InvalidParams(errors))
        }
    }

    /// Optimally oriented squeezing of `db` decibels, e^{2r} = 10^{dB/10}.
    pub fn from_db(db: f64, purity: f64) -> Result<Self> {
        if !(db.is_finite() && db >= 0.0) {
            return Err(Error::invalid("squeeze_db", "must be finite and non-negative"));
        }
        Self::new(db_to_r(db), 0.0, purity)
    }

    pub fn vacuum() -> Self {
        Self { r: 0.0, angle: 0.0, purity: 1.0 }
    }

    pub fn db(&self) -> f64 {
        r_to_db(self.r)
    }

    /// Variance of the measured quadrature relative to vacuum.
    pub fn measured_variance(&self) -> f64 {
        let (s, c) = self.angle.sin_cos();
        ((-2.0 * self.r).exp() * c * c + (2.0 * self.r).exp() * s * s) / self.purity
    }

    /// Factor multiplying the vacuum-noise SNR.
    pub fn snr_gain(&self) -> f64 {
        1.0 / self.measured_variance().sqrt()
    }
}

pub fn db_to_r(db: f64) -> f64 {
    0.5 * (db / 10.0 * std::f64::consts::LN_10)
}

pub fn r_to_db(r: f64) -> f64 {
    10.0 * (2.0 * r) / std::f64::consts::LN_10
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeKind {
    Step,
    Arctan,
}

/// Turn-on profile u(t) of the modulation or drive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSpec {
    pub kind: EnvelopeKind,
    pub rate_factor: f64,
}

impl Default for EnvelopeSpec {
    fn default() -> Self {
        Self::arctan(10.0)
    }
}

impl EnvelopeSpec {
    pub fn step() -> Self {
        Self { kind: EnvelopeKind::Step, rate_factor: 10.0 }
    }

    /// u(t) = (2/π) arctan(rate_factor · κt)
    pub fn arctan(rate_factor: f64) -> Self {
        Self { kind: EnvelopeKind::Arctan, rate_factor }
    }

    pub fn check(&self) -> Result<()> {
        if self.kind == EnvelopeKind::Arctan && !(self.rate_factor > 0.0 && self.rate_factor.is_finite()) {
            return Err(Error::invalid("envelope_rate_factor", "must be positive and finite"));
        }
        Ok(())
    }

    /// Envelope value at time `t` for cavity damping `kappa`.
    pub fn value(&self, kappa: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self.kind {
            EnvelopeKind::Step => 1.0,
            EnvelopeKind::Arctan => (2.0 / PI) * (self.rate_factor * kappa * t).atan(),
        }
    }
}

impl std::str::FromStr for EnvelopeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step" => Ok(EnvelopeKind::Step),
            "arctan" => Ok(EnvelopeKind::Arctan),
            other => Err(Error::InvalidArgument(format!("unknown envelope `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn kappa_conversion() {
        assert_eq!(mhz_to_rad(4.0), 2.0 * PI * 4.0e6);
    }

    #[test]
    fn zero_kappa_rejected() {
        let p = SystemParams::new(0.0, 1.0);
        let err = validate(p).unwrap_err();
        assert!(err.to_string().contains("kappa must be positive"), "{err}");
    }

    #[test]
    fn all_errors_collected() {
        let mut p = SystemParams::new(-1.0, 0.0);
        p.chi = f64::NAN;
        match validate(p).unwrap_err() {
            Error::InvalidParams(list) => {
                let fields: Vec<_> = list.iter().map(|e| e.field).collect();
                assert!(fields.contains(&"kappa"));
                assert!(fields.contains(&"omega_r"));
                assert!(fields.contains(&"chi"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn circuit_modulation_accepted_without_warning() {
        let f = FrequencyParams { gz_mod_mhz: 21.0, omega_r_ghz: 6.0, ..Default::default() };
        let v = f.validate().unwrap();
        assert!(v.warnings.is_empty());
        let ratio = v.params.g_z_mod / v.params.omega_r;
        assert!((ratio - 3.5e-3).abs() < 1e-12);
    }

    #[test]
    fn rwa_warning_and_hard_error() {
        let p = SystemParams::new(1.0, 10.0).with_g_z_mod(2.0);
        let v = validate(p).unwrap();
        assert_eq!(v.warnings.len(), 1);
        let p = SystemParams::new(1.0, 10.0).with_g_z_mod(10.0);
        assert!(validate(p).is_err());
    }

    #[test]
    fn db_conversion() {
        let s = SqueezeSpec::from_db(20.0, 1.0).unwrap();
        assert!(((2.0 * s.r).exp() - 100.0).abs() < 1e-10);
        assert!((s.snr_gain() - 10.0).abs() < 1e-12);
        assert!((s.db() - 20.0).abs() < 1e-12);
    }

    #[test]
    fn squeeze_rejects_bad_purity() {
        assert!(SqueezeSpec::new(0.1, 0.0, 0.0).is_err());
        assert!(SqueezeSpec::new(0.1, 0.0, 1.1).is_err());
        assert!(SqueezeSpec::new(-0.1, 0.0, 1.0).is_err());
    }

    #[test]
    fn envelope_shape() {
        let e = EnvelopeSpec::default();
        assert_eq!(e.value(1.0, 0.0), 0.0);
        assert!(e.value(1.0, 1e6) > 0.999_99);
        let mut last = 0.0;
        for k in 0..1000 {
            let u = e.value(2.0, k as f64 * 0.01);
            assert!(u >= last);
            last = u;
        }
    }

    proptest! {
        #[test]
        fn mhz_round_trip(f in -1e5f64..1e5) {
            let back = rad_to_mhz(mhz_to_rad(f));
            prop_assert!((back - f).abs() <= 1e-12 * f.abs().max(1e-300));
        }

        #[test]
        fn validate_idempotent(kappa in 1e-3f64..1e9, omega in 1e-3f64..1e12, g in -1e6f64..1e6, chi in -1e6f64..1e6) {
            let p = SystemParams::new(kappa, omega).with_g_z_mod(g).with_chi(chi);
            match validate(p) {
                Ok(v) => prop_assert_eq!(validate(v.params).unwrap(), v),
                Err(_) => prop_assert!(g.abs() >= omega),
            }
        }
    }
}
