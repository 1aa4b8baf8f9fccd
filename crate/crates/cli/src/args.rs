use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "np-spectra", version, about = "Plasmon spectra, Fredholm determinants and xi-function positivity checks")]
pub struct Cli {
    /// Omit the timestamp line so identical runs give identical files.
    #[arg(long, global = true)]
    pub no_timestamp: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of the boundary operator of a particle.
    Spectrum(SpectrumArgs),
    /// Resonance frequencies and off-resonance gain curves under a dispersion model.
    Resonance(ResonanceArgs),
    /// Mode dipoles, couplings and resonant envelopes for a uniform field.
    Excite(ExciteArgs),
    /// Iterated traces and determinant coefficients of the deflated 2D operator.
    Fredholm(FredholmArgs),
    /// Xi coefficients, zeros and positivity checks.
    Xi(XiArgs),
    /// Hankel positivity of trace sequences.
    GrommerCheck(GrommerArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LayerArg {
    Single,
    Adjoint,
}

#[derive(Debug, Args)]
pub struct Discretize {
    /// Shape file: a 2D contour spec, or {"kind": "sphere" | "ellipsoid", ...}.
    #[arg(long)]
    pub shape: PathBuf,
    /// Nodes on a 2D contour.
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    /// Icosahedral refinement level of a 3D surface.
    #[arg(long, default_value_t = 3)]
    pub refinement: u32,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub disc: Discretize,
    /// Use the deflated 2D kernel, which drops the equilibrium-charge eigenvalue.
    #[arg(long)]
    pub deflated: bool,
    /// Density convention for 3D surfaces.
    #[arg(long, value_enum, default_value_t = LayerArg::Single)]
    pub layer: LayerArg,
    /// Relative imaginary part above which an eigenvalue is reported as spurious.
    #[arg(long, default_value_t = 1e-8)]
    pub realness_tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the assembled matrix as row-major little-endian f64.
    #[arg(long)]
    pub dump_matrix: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct Dispersion {
    /// Background permittivity.
    #[arg(long, default_value_t = 1.0)]
    pub eps0: f64,
    /// Plasma frequency (any unit; frequencies in the report use the same unit).
    #[arg(long, default_value_t = 1.0)]
    pub omega_p: f64,
    /// Collision rate.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Free-electron silver in rad/s instead of the three numbers above.
    #[arg(long)]
    pub silver: bool,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    /// Shape file; eigenvalues are computed inline.
    #[arg(long, conflicts_with = "lambda")]
    pub shape: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 3)]
    pub refinement: u32,
    /// Plasmonic eigenvalues given directly, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Vec<f64>,
    /// Number of leading modes taken from the spectrum.
    #[arg(long, default_value_t = 6)]
    pub modes: usize,
    /// Points of the gain curve per mode.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[command(flatten)]
    pub dispersion: Dispersion,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ExciteArgs {
    #[command(flatten)]
    pub disc: Discretize,
    /// Uniform field components, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,0")]
    pub field: Vec<f64>,
    /// Drive frequency for the off-resonance gain.
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long, default_value_t = 6)]
    pub modes: usize,
    #[command(flatten)]
    pub dispersion: Dispersion,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct FredholmArgs {
    #[command(flatten)]
    pub disc: Discretize,
    /// Highest trace order n (traces q_2 .. q_2n).
    #[arg(long, default_value_t = 10)]
    pub orders: usize,
    /// Also write n,q_2n,b_2n as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct XiArgs {
    /// Working precision in decimal digits.
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    /// Number of tabulated coefficients c_0 .. c_2n.
    #[arg(long, default_value_t = 20)]
    pub orders: usize,
    /// Find zeros in (0, zeros_to].
    #[arg(long, default_value_t = 0.0)]
    pub zeros_to: f64,
    /// Run the Hankel trace check up to this size.
    #[arg(long)]
    pub grommer: Option<usize>,
    /// Also write n,c_2n,q_2n as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Also write the zeros as CSV.
    #[arg(long)]
    pub zeros_out: Option<PathBuf>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct GrommerArgs {
    #[arg(long, default_value_t = 50)]
    pub digits: u32,
    /// Largest Hankel index N checked.
    #[arg(long, default_value_t = 4)]
    pub max_n: usize,
    /// Use traces of one off-axis zero pair "re,im" instead of the xi traces.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub synthetic: Option<Vec<f64>>,
    #[command(flatten)]
    pub output: Output,
}
