//! Flat `key = value` configuration files.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Unknown and repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::circuit::{FluxBias, TransmonCircuit};
use crate::error::{Error, Result};
use crate::model::{EnvelopeKind, EnvelopeSpec, FrequencyParams, SqueezeSpec};

/// Parses `text` into key → (value, line number).
pub fn parse_pairs(text: &str) -> Result<BTreeMap<String, (String, usize)>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Config { line, message: format!("expected `key = value`, got `{content}`") });
        };
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() || value.is_empty() {
            return Err(Error::Config { line, message: "empty key or value".into() });
        }
        if out.insert(key.to_string(), (value.to_string(), line)).is_some() {
            return Err(Error::Config { line, message: format!("duplicate key `{key}`") });
        }
    }
    Ok(out)
}

fn number(key: &str, value: &str, line: usize) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| Error::Config { line, message: format!("`{key}` expects a number, got `{value}`") })?;
    if !v.is_finite() {
        return Err(Error::Config { line, message: format!("`{key}` must be finite") });
    }
    Ok(v)
}

/// Parameters for the `trajectory`, `snr`, `montecarlo` and `validate-config` runs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunConfig {
    pub params: FrequencyParams,
    pub squeeze_db: f64,
    pub squeeze_purity: f64,
    pub envelope: EnvelopeSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { params: FrequencyParams::default(), squeeze_db: 20.0, squeeze_purity: 1.0, envelope: EnvelopeSpec::default() }
    }
}

impl RunConfig {
    pub const KEYS: [&'static str; 13] = [
        "kappa_mhz",
        "omega_r_ghz",
        "omega_a_ghz",
        "gz_dc_mhz",
        "gz_mod_mhz",
        "gx_mhz",
        "chi_mhz",
        "epsilon_mhz",
        "delta_ghz",
        "squeeze_db",
        "squeeze_purity",
        "envelope",
        "envelope_rate_factor",
    ];

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, (value, line)) in parse_pairs(text)? {
            cfg.set_at(&key, &value, line)?;
        }
        Ok(cfg)
    }

    /// Applies a single override; `line` 0 denotes the command line.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_at(key, value, 0)
    }

    fn set_at(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let p = &mut self.params;
        let slot = match key {
            "kappa_mhz" => &mut p.kappa_mhz,
            "omega_r_ghz" => &mut p.omega_r_ghz,
            "omega_a_ghz" => &mut p.omega_a_ghz,
            "gz_dc_mhz" => &mut p.gz_dc_mhz,
            "gz_mod_mhz" => &mut p.gz_mod_mhz,
            "gx_mhz" => &mut p.gx_mhz,
            "chi_mhz" => &mut p.chi_mhz,
            "epsilon_mhz" => &mut p.epsilon_mhz,
            "delta_ghz" => &mut p.delta_ghz,
            "squeeze_db" => &mut self.squeeze_db,
            "squeeze_purity" => &mut self.squeeze_purity,
            "envelope_rate_factor" => &mut self.envelope.rate_factor,
            "envelope" => {
                self.envelope.kind = value
                    .parse::<EnvelopeKind>()
                    .map_err(|e| Error::Config { line, message: e.to_string() })?;
                return Ok(());
            }
            other => return Err(Error::Config { line, message: format!("unknown key `{other}`") }),
        };
        *slot = number(key, value, line)?;
        Ok(())
    }

    pub fn squeeze(&self) -> Result<SqueezeSpec> {
        SqueezeSpec::from_db(self.squeeze_db, self.squeeze_purity)
    }

    /// Full validation of every field.
    pub fn check(&self) -> Result<()> {
        self.params.validate()?;
        self.squeeze()?;
        self.envelope.check()
    }

    /// Renders the configuration back into the file format.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = String::new();
        let values = [
            p.kappa_mhz,
            p.omega_r_ghz,
            p.omega_a_ghz,
            p.gz_dc_mhz,
            p.gz_mod_mhz,
            p.gx_mhz,
            p.chi_mhz,
            p.epsilon_mhz,
            p.delta_ghz,
            self.squeeze_db,
            self.squeeze_purity,
        ];
        for (key, v) in Self::KEYS.iter().zip(values) {
            let _ = writeln!(s, "{key} = {v}");
        }
        let kind = match self.envelope.kind {
            EnvelopeKind::Step => "step",
            EnvelopeKind::Arctan => "arctan",
        };
        let _ = writeln!(s, "envelope = {kind}");
        let _ = writeln!(s, "envelope_rate_factor = {}", self.envelope.rate_factor);
        s
    }
}

/// Inputs of the `design` report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignConfig {
    pub circuit: TransmonCircuit,
    pub flux: FluxBias,
    pub flux_depth: f64,
    pub delta_ghz: f64,
    pub kappa_mhz: f64,
}

impl Default for DesignConfig {
    fn default() -> Self {
        Self { circuit: TransmonCircuit::reference(), flux: FluxBias(0.0), flux_depth: 0.05, delta_ghz: 3.0, kappa_mhz: 4.0 }
    }
}

impl DesignConfig {
    pub const KEYS: [&'static str; 8] =
        ["ej_ghz", "ec_ghz", "asymmetry", "z0_ohm", "flux_phi0", "flux_depth_phi0", "delta_ghz", "kappa_mhz"];

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (key, (value, line)) in parse_pairs(text)? {
            cfg.set_at(&key, &value, line)?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_at(key, value, 0)
    }

    fn set_at(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        let slot = match key {
            "ej_ghz" => &mut self.circuit.e_j,
            "ec_ghz" => &mut self.circuit.e_c,
            "asymmetry" => &mut self.circuit.d,
            "z0_ohm" => &mut self.circuit.z0,
            "flux_phi0" => &mut self.flux.0,
            "flux_depth_phi0" => &mut self.flux_depth,
            "delta_ghz" => &mut self.delta_ghz,
            "kappa_mhz" => &mut self.kappa_mhz,
            other => return Err(Error::Config { line, message: format!("unknown key `{other}`") }),
        };
        *slot = number(key, value, line)?;
        Ok(())
    }
}
