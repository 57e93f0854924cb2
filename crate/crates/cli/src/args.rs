use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "fluxsim",
    version,
    about = "Fluxonium spectra, coherence budgets, couplings and spectroscopy fits"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Flux sweep of transition frequencies and matrix elements (CSV)
    Spectrum(SpectrumArgs),
    /// Per-channel decoherence rates and T1/T2 at one bias (JSON)
    Budget(BudgetArgs),
    /// Loss parameters implied by a measured T1 (JSON)
    Invert(InvertArgs),
    /// Derived columns for every registry device beside the quoted values (CSV)
    Table1(Table1Args),
    /// Fit circuit parameters and flux calibration to a spectroscopy CSV (JSON)
    Fit(FitArgs),
    /// Synthetic spectroscopy data from the forward model (CSV)
    Synth(SynthArgs),
    /// Two-qubit coupling, joint spectrum and spin model (JSON)
    Couple(CoupleArgs),
    /// Dispersive shift of the readout cavity (JSON)
    Chi(ChiArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct OutArg {
    /// Output file; standard output when absent
    #[arg(long, global = false)]
    pub out: Option<PathBuf>,
}

/// A device from the registry, a parameter file, and per-field overrides,
/// applied in that order.
#[derive(Args, Debug, Clone, Default)]
pub struct DeviceArgs {
    /// Registry device name (A-H bundled)
    #[arg(long)]
    pub device: Option<String>,
    /// JSON file {"E_J_GHz", "E_C_GHz", "E_L_GHz", "N"}
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long = "ej", value_name = "GHZ")]
    pub e_j: Option<f64>,
    #[arg(long = "ec", value_name = "GHZ")]
    pub e_c: Option<f64>,
    #[arg(long = "el", value_name = "GHZ")]
    pub e_l: Option<f64>,
    /// Chain junction count
    #[arg(long = "junctions")]
    pub n_junctions: Option<u32>,
}

#[derive(Args, Debug, Clone, Default)]
pub struct BasisArgs {
    /// Oscillator basis size
    #[arg(long, default_value_t = 60)]
    pub dim: usize,
    /// Convergence tolerance on eigenvalues, GHz
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

/// Noise environment: optional JSON file, then per-key overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct EnvArgs {
    /// JSON environment file; absent keys disable their channel
    #[arg(long)]
    pub env: Option<PathBuf>,
    /// Start from the registry device's environment block
    #[arg(long)]
    pub device_env: bool,
    #[arg(long = "temperature-mk")]
    pub temperature_mk: Option<f64>,
    /// 1/f flux-noise amplitude, Phi0/sqrt(Hz)
    #[arg(long = "flux-noise")]
    pub flux_noise: Option<f64>,
    /// Capacitive loss tangent at 6 GHz
    #[arg(long = "tan-delta-c")]
    pub tan_delta_c: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "tan-delta-l")]
    pub tan_delta_l: Option<f64>,
    #[arg(long = "tan-delta-alox")]
    pub tan_delta_alox: Option<f64>,
    #[arg(long = "x-qp")]
    pub x_qp: Option<f64>,
    #[arg(long = "delta-ghz")]
    pub delta_ghz: Option<f64>,
    #[arg(long = "c-j-ff")]
    pub c_j_ff: Option<f64>,
    #[arg(long = "c-g-ff")]
    pub c_g_ff: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Capacitive,
    Inductive,
}

/// Readout cavity: registry block, JSON file, then overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct CavityArgs {
    /// JSON file {"f_r_GHz", "kappa_MHz", "g_MHz", "coupling_kind"}
    #[arg(long)]
    pub cavity: Option<PathBuf>,
    #[arg(long = "f-r", value_name = "GHZ")]
    pub f_r: Option<f64>,
    #[arg(long, value_name = "MHZ")]
    pub kappa: Option<f64>,
    #[arg(long, value_name = "MHZ")]
    pub g: Option<f64>,
    #[arg(long)]
    pub kind: Option<KindArg>,
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// First flux point, Phi0
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub from: f64,
    /// Last flux point, Phi0
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long, default_value_t = 101)]
    pub steps: usize,
    /// Levels retained; with --all-pairs every pair among them is written
    #[arg(long, default_value_t = 5)]
    pub levels: usize,
    /// Write every (i, j) pair instead of the 0-1 transition only
    #[arg(long)]
    pub all_pairs: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct BudgetArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub flux: f64,
    #[command(flatten)]
    pub env: EnvArgs,
    #[command(flatten)]
    pub cavity: CavityArgs,
    /// Mean thermal photons in the readout mode; enables the thermal-photon channel
    #[arg(long = "n-th")]
    pub n_th: Option<f64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum ChannelArg {
    Dielectric,
    Quasiparticle,
    JunctionOxide,
    All,
}

#[derive(Args, Debug)]
pub struct InvertArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, value_enum, default_value_t = ChannelArg::All)]
    pub channel: ChannelArg,
    /// Measured T1 in us; defaults to the registry value for --device
    #[arg(long = "t1-us")]
    pub t1_us: Option<f64>,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub flux: f64,
    #[command(flatten)]
    pub env: EnvArgs,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Lm,
    Simplex,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Dataset CSV: bias,freq_GHz,label,sigma_GHz
    #[arg(long)]
    pub data: PathBuf,
    /// Initial circuit parameters
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    /// Initial flux offset, Phi0
    #[arg(long, allow_negative_numbers = true)]
    pub offset: f64,
    /// Initial flux per bias unit, Phi0
    #[arg(long, allow_negative_numbers = true)]
    pub scale: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Lm)]
    pub method: MethodArg,
    #[arg(long = "f-readout", default_value_t = 7.5)]
    pub f_readout: f64,
    #[arg(long = "max-iter")]
    pub max_iter: Option<usize>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct SynthArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub offset: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub scale: f64,
    #[arg(long = "bias-from", default_value_t = 0.0, allow_negative_numbers = true)]
    pub bias_from: f64,
    #[arg(long = "bias-to", default_value_t = 1.0, allow_negative_numbers = true)]
    pub bias_to: f64,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Comma-separated labels, e.g. 01,12,sideband_04_red
    #[arg(long, value_delimiter = ',', default_value = "01,12")]
    pub labels: Vec<String>,
    /// Gaussian noise, GHz
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "f-readout", default_value_t = 7.5)]
    pub f_readout: f64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct CoupleArgs {
    #[arg(long = "device-a")]
    pub device_a: Option<String>,
    #[arg(long = "params-a")]
    pub params_a: Option<PathBuf>,
    #[arg(long = "device-b")]
    pub device_b: Option<String>,
    #[arg(long = "params-b")]
    pub params_b: Option<PathBuf>,
    /// JSON file {"kind", "m" | "C_M_over_C"}
    #[arg(long)]
    pub coupling: Option<PathBuf>,
    #[arg(long, conflicts_with = "c_m_over_c")]
    pub m: Option<f64>,
    #[arg(long = "c-m-over-c")]
    pub c_m_over_c: Option<f64>,
    #[arg(long = "flux-a", default_value_t = 0.5)]
    pub flux_a: f64,
    #[arg(long = "flux-b", default_value_t = 0.5)]
    pub flux_b: f64,
    /// Eigenstates kept per qubit in the joint Hamiltonian
    #[arg(long = "n-keep", default_value_t = 10)]
    pub n_keep: usize,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct ChiArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub basis: BasisArgs,
    #[command(flatten)]
    pub cavity: CavityArgs,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub flux: f64,
    #[arg(long, default_value_t = 12)]
    pub levels: usize,
    #[command(flatten)]
    pub out: OutArg,
}
