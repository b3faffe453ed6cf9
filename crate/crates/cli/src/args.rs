use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "longi", version, about = "Longitudinal and dispersive qubit readout simulations")]
pub struct Cli {
    /// Flat `key = value` configuration file.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Directory receiving data files and manifests.
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,

    /// Override a configuration key; may be repeated. Dedicated flags win over these.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub set: Vec<String>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalized output-field trajectories and pointer separation (fig1a_*.csv, fig1b.csv).
    Trajectory(TrajectoryArgs),
    /// SNR, required integration time or required damping sweeps (fig2a/b/c.csv).
    Snr(SnrArgs),
    /// Circuit design report and coupling-versus-flux sweep (design.json, fig3.csv).
    Design(DesignArgs),
    /// Multi-qubit pointer constellation and its partition (constellation.json).
    Constellation(ConstellationArgs),
    /// Monte Carlo homodyne records (montecarlo.json, optional samples CSV).
    Montecarlo(MontecarloArgs),
    /// Parse and validate a configuration without running anything.
    ValidateConfig(ValidateArgs),
}

/// Flags mirroring the run configuration keys.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long)]
    pub kappa_mhz: Option<f64>,
    #[arg(long)]
    pub omega_r_ghz: Option<f64>,
    #[arg(long)]
    pub omega_a_ghz: Option<f64>,
    #[arg(long)]
    pub gz_dc_mhz: Option<f64>,
    #[arg(long)]
    pub gz_mod_mhz: Option<f64>,
    #[arg(long)]
    pub gx_mhz: Option<f64>,
    #[arg(long)]
    pub chi_mhz: Option<f64>,
    #[arg(long)]
    pub epsilon_mhz: Option<f64>,
    #[arg(long)]
    pub delta_ghz: Option<f64>,
    /// `arctan` or `step`.
    #[arg(long)]
    pub envelope: Option<String>,
    #[arg(long)]
    pub envelope_rate_factor: Option<f64>,
}

impl ParamArgs {
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        let mut out = Vec::new();
        let mut num = |key: &'static str, v: Option<f64>| {
            if let Some(v) = v {
                out.push((key, v.to_string()));
            }
        };
        num("kappa_mhz", self.kappa_mhz);
        num("omega_r_ghz", self.omega_r_ghz);
        num("omega_a_ghz", self.omega_a_ghz);
        num("gz_dc_mhz", self.gz_dc_mhz);
        num("gz_mod_mhz", self.gz_mod_mhz);
        num("gx_mhz", self.gx_mhz);
        num("chi_mhz", self.chi_mhz);
        num("epsilon_mhz", self.epsilon_mhz);
        num("delta_ghz", self.delta_ghz);
        num("envelope_rate_factor", self.envelope_rate_factor);
        if let Some(e) = &self.envelope {
            out.push(("envelope", e.clone()));
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolChoice {
    Longitudinal,
    Dispersive,
    Both,
}

#[derive(Debug, Args)]
pub struct TrajectoryArgs {
    #[command(flatten)]
    pub params: ParamArgs,

    #[arg(long, value_enum, default_value_t = ProtocolChoice::Both)]
    pub protocol: ProtocolChoice,

    /// Simulated span in units of 1/κ.
    #[arg(long, default_value_t = 8.0)]
    pub t_max_kappa: f64,

    /// Residual dispersive shift of the longitudinal run (MHz); zero by default.
    #[arg(long)]
    pub residual_chi_mhz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    #[value(name = "2a")]
    A,
    #[value(name = "2b")]
    B,
    #[value(name = "2c")]
    C,
}

#[derive(Debug, Args)]
pub struct SnrArgs {
    #[arg(long, value_enum)]
    pub fig: Figure,

    #[command(flatten)]
    pub params: ParamArgs,

    #[arg(long, default_value_t = 0.9999)]
    pub fidelity: f64,

    /// Number of sweep points.
    #[arg(long, default_value_t = 200)]
    pub points: usize,

    /// Upper end of the κτ axis for 2a.
    #[arg(long, default_value_t = 10.0)]
    pub kappa_tau_max: f64,

    /// Residual χ/κ of the dotted 2a curve.
    #[arg(long, default_value_t = 0.2)]
    pub residual_chi_ratio: f64,

    /// Integration time for 2c, in ns.
    #[arg(long, default_value_t = 50.0)]
    pub tau_ns: f64,

    #[arg(long)]
    pub squeeze_db: Option<f64>,

    #[arg(long)]
    pub squeeze_purity: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DesignArgs {
    #[arg(long)]
    pub ej_ghz: Option<f64>,
    #[arg(long)]
    pub ec_ghz: Option<f64>,
    #[arg(long)]
    pub asymmetry: Option<f64>,
    #[arg(long)]
    pub z0_ohm: Option<f64>,
    /// Flux bias in units of Φ₀.
    #[arg(long)]
    pub flux: Option<f64>,
    /// Flux modulation depth in units of Φ₀.
    #[arg(long)]
    pub depth: Option<f64>,
    #[arg(long)]
    pub delta_ghz: Option<f64>,
    #[arg(long)]
    pub kappa_mhz: Option<f64>,

    #[arg(long, default_value_t = -0.5, allow_hyphen_values = true)]
    pub sweep_from: f64,
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    pub sweep_to: f64,
    #[arg(long, default_value_t = 201)]
    pub points: usize,
}

impl DesignArgs {
    pub fn pairs(&self) -> Vec<(&'static str, String)> {
        [
            ("ej_ghz", self.ej_ghz),
            ("ec_ghz", self.ec_ghz),
            ("asymmetry", self.asymmetry),
            ("z0_ohm", self.z0_ohm),
            ("flux_phi0", self.flux),
            ("flux_depth_phi0", self.depth),
            ("delta_ghz", self.delta_ghz),
            ("kappa_mhz", self.kappa_mhz),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.map(|v| (k, v.to_string())))
        .collect()
    }
}

#[derive(Debug, Args)]
pub struct ConstellationArgs {
    /// Number of qubits (presets default to 2, ghz3 to 3).
    #[arg(long)]
    pub n: Option<usize>,

    /// Comma-separated phases φ_1..φ_n in radians.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "preset")]
    pub phases: Option<Vec<f64>>,

    /// One of quarter, zero, pi, ghz3.
    #[arg(long)]
    pub preset: Option<String>,

    /// g̃_z/κ used for the amplitudes.
    #[arg(long, default_value_t = 1.0)]
    pub g_over_kappa: f64,

    /// κτ for the pairwise SNR matrix.
    #[arg(long, default_value_t = 1.2566)]
    pub kappa_tau: f64,

    /// Relative clustering tolerance.
    #[arg(long, default_value_t = longi_core::multiqubit::DEFAULT_CLUSTER_TOL)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McProtocol {
    Longitudinal,
    Dispersive,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    #[command(flatten)]
    pub params: ParamArgs,

    #[arg(long, value_enum, default_value_t = McProtocol::Longitudinal)]
    pub protocol: McProtocol,

    #[arg(long, default_value_t = longi_core::montecarlo::DEFAULT_N_TRAJ)]
    pub ntraj: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, default_value_t = 1.2566)]
    pub tau_kappa: f64,

    /// Record step in units of 1/κ.
    #[arg(long, default_value_t = longi_core::montecarlo::DEFAULT_DT_KAPPA)]
    pub dt_kappa: f64,

    /// Squeezed input (longitudinal only); vacuum when absent.
    #[arg(long)]
    pub squeeze_db: Option<f64>,

    #[arg(long, default_value_t = 1.0)]
    pub purity: f64,

    /// Residual dispersive shift of a longitudinal run (MHz); zero by default.
    #[arg(long)]
    pub residual_chi_mhz: Option<f64>,

    /// Also write every integrated record to montecarlo_samples.csv.
    #[arg(long)]
    pub raw: bool,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Treat the configuration as a circuit design file.
    #[arg(long)]
    pub design: bool,
}
