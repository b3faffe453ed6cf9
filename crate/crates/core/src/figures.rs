//! Figure-data sweeps and their CSV layout.
//!
//! Numbers are written in scientific notation with 12 significant digits.
//! Column names are part of the file format and must stay stable.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::circuit::{flux_sweep, TransmonCircuit};
use crate::dynamics::{
    dispersive_trajectory, longitudinal_trajectory, output_field_frame, pointer_separation, uniform_grid,
    LinearPointerModel, PointerTrajectory,
};
use crate::error::Result;
use crate::measurement::{
    required_kappa_vs_photons, required_tau, snr_dispersive, snr_longitudinal, snr_numeric, snr_squeezed,
    HomodyneSetup, SqueezePolicy,
};
use crate::model::{rad_to_ghz, rad_to_mhz, EnvelopeSpec, ReadoutProtocol, SqueezeSpec, SystemParams};

pub const TRAJECTORY_HEADER: [&str; 6] = ["t_over_kappa_inv", "re_plus", "im_plus", "re_minus", "im_minus", "separation"];
pub const SEPARATION_HEADER: [&str; 3] = ["t_over_kappa_inv", "separation_long", "separation_disp"];
pub const FIG2A_HEADER: [&str; 5] = ["kappa_tau", "snr_long", "snr_disp", "snr_long_chi_residual", "snr_squeezed"];
pub const FIG2B_HEADER: [&str; 4] = ["g_over_kappa", "tau_long", "tau_disp", "tau_squeezed"];
pub const FIG2C_HEADER: [&str; 4] = ["n_bar", "kappa_long_mhz", "kappa_disp_mhz", "kappa_squeezed_mhz"];
pub const FIG3_HEADER: [&str; 4] = ["phi_over_phi0", "g_z_mhz", "g_x_mhz", "omega_a_ghz"];

/// Trajectory samples per unit of 1/κ.
pub const SAMPLES_PER_KAPPA_INV: f64 = 100.0;

pub fn format_number(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.11e}")
    }
}

pub fn write_csv<W: Write>(mut w: W, header: &[&str], rows: &[Vec<f64>]) -> io::Result<()> {
    writeln!(w, "{}", header.join(","))?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&x| format_number(x)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// Number of samples covering `t_max_kappa` units of 1/κ.
pub fn sample_count(t_max_kappa: f64) -> usize {
    ((SAMPLES_PER_KAPPA_INV * t_max_kappa).ceil() as usize + 1).max(2)
}

pub fn trajectory_rows(traj: &PointerTrajectory) -> Vec<Vec<f64>> {
    pointer_separation(traj)
        .into_iter()
        .zip(traj.alpha_plus.iter().zip(&traj.alpha_minus))
        .map(|((t, d), (p, m))| vec![t * traj.kappa, p.re, p.im, m.re, m.im, d])
        .collect()
}

/// Normalized output-field trajectories of both protocols.
#[derive(Debug, Clone)]
pub struct Fig1 {
    pub longitudinal: PointerTrajectory,
    pub dispersive: PointerTrajectory,
}

impl Fig1 {
    pub fn separation_rows(&self) -> Vec<Vec<f64>> {
        let long = pointer_separation(&self.longitudinal);
        let disp = pointer_separation(&self.dispersive);
        long.iter()
            .zip(&disp)
            .map(|(&(t, a), &(_, b))| vec![t * self.longitudinal.kappa, a, b])
            .collect()
    }
}

/// Longitudinal (ideal, plus `residual_chi`) and dispersive runs. The
/// dispersive run uses `params.chi` and `params.epsilon`.
pub fn fig1(params: &SystemParams, envelope: &EnvelopeSpec, t_max_kappa: f64, residual_chi: f64) -> Result<Fig1> {
    let t_max = t_max_kappa / params.kappa;
    let n = sample_count(t_max_kappa);
    let long = longitudinal_trajectory(&params.with_chi(residual_chi), envelope, t_max, n)?;
    let disp = dispersive_trajectory(params, envelope, t_max, n)?;
    Ok(Fig1 { longitudinal: output_field_frame(&long)?, dispersive: output_field_frame(&disp)? })
}

pub fn log_grid(from: f64, to: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![from];
    }
    let (a, b) = (from.ln(), to.ln());
    (0..n).map(|k| (a + (b - a) * k as f64 / (n - 1) as f64).exp()).collect()
}

/// SNR versus κτ in units of g̃_z/κ (κ = 1, g̃_z = ε = 1).
pub fn fig2a(kappa_taus: &[f64], residual_chi_over_kappa: f64, squeeze: &SqueezeSpec) -> Result<Vec<Vec<f64>>> {
    let t_max = kappa_taus.iter().copied().fold(0.0, f64::max);
    let residual = if t_max > 0.0 {
        let p = SystemParams::dimensionless().with_g_z_mod(1.0).with_chi(residual_chi_over_kappa);
        let n = ((2000.0 * t_max).ceil() as usize).clamp(2001, 200_001);
        Some(LinearPointerModel::longitudinal(&p).trajectory(&EnvelopeSpec::step(), &uniform_grid(t_max, n)?)?)
    } else {
        None
    };
    kappa_taus
        .par_iter()
        .map(|&x| {
            let long = snr_longitudinal(1.0, 1.0, x)?;
            let disp = snr_dispersive(1.0, 1.0, x)?;
            let chi = match &residual {
                Some(traj) if x > 0.0 => snr_numeric(traj, &HomodyneSetup::optimal(x))?.snr,
                _ => 0.0,
            };
            let sq = snr_squeezed(&long, squeeze)?;
            Ok(vec![x, long.snr, disp.snr, chi, sq.snr])
        })
        .collect()
}

/// Required κτ to reach `fidelity` versus g̃_z/κ (= ε/κ).
pub fn fig2b(ratios: &[f64], fidelity: f64, squeeze: &SqueezeSpec) -> Result<Vec<Vec<f64>>> {
    ratios
        .par_iter()
        .map(|&g| {
            let long = required_tau(g, 1.0, fidelity, ReadoutProtocol::Longitudinal, None)?;
            let disp = required_tau(g, 1.0, fidelity, ReadoutProtocol::Dispersive, None)?;
            let sq = required_tau(g, 1.0, fidelity, ReadoutProtocol::Longitudinal, Some(squeeze))?;
            Ok(vec![g, long, disp, sq])
        })
        .collect()
}

/// Required κ/2π (MHz) versus photon number at fixed τ (seconds). Points
/// outside the search bracket are reported as NaN.
pub fn fig2c(n_bars: &[f64], tau: f64, fidelity: f64, max_squeeze_db: f64, purity: f64) -> Result<Vec<Vec<f64>>> {
    let policy = SqueezePolicy::Optimized { max_db: max_squeeze_db, purity };
    n_bars
        .par_iter()
        .map(|&n| {
            let solve = |protocol, policy: &SqueezePolicy| -> Result<f64> {
                match required_kappa_vs_photons(n, tau, fidelity, protocol, policy) {
                    Ok(k) => Ok(rad_to_mhz(k)),
                    Err(crate::Error::NoBracket { .. }) => Ok(f64::NAN),
                    Err(e) => Err(e),
                }
            };
            Ok(vec![
                n,
                solve(ReadoutProtocol::Longitudinal, &SqueezePolicy::None)?,
                solve(ReadoutProtocol::Dispersive, &SqueezePolicy::None)?,
                solve(ReadoutProtocol::Longitudinal, &policy)?,
            ])
        })
        .collect()
}

/// Couplings (MHz) and qubit frequency (GHz) versus flux.
pub fn fig3(circ: &TransmonCircuit, from: f64, to: f64, n: usize) -> Result<Vec<Vec<f64>>> {
    Ok(flux_sweep(circ, from, to, n)?
        .into_iter()
        .map(|p| vec![p.phi_over_phi0, rad_to_mhz(p.g_z), rad_to_mhz(p.g_x), rad_to_ghz(p.omega_a)])
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format_has_twelve_digits() {
        assert_eq!(format_number(1.0), "1.00000000000e0");
        assert_eq!(format_number(-0.000123456789012345), "-1.23456789012e-4");
        assert_eq!(format_number(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &FIG3_HEADER, &[vec![0.0, 1.0, 2.0, 3.0]]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "phi_over_phi0,g_z_mhz,g_x_mhz,omega_a_ghz");
        assert_eq!(lines.next().unwrap().split(',').count(), 4);
    }

    #[test]
    fn sampling_policy() {
        assert!(sample_count(8.0) >= 800);
        assert_eq!(sample_count(0.0), 2);
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0, 30.0, 5);
        assert!((g[0] - 1.0).abs() < 1e-15);
        assert!((g[4] - 30.0).abs() < 1e-12);
    }
}
