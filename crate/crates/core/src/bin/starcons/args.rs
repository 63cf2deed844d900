use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use starcons::simulate::{Scheme, DEFAULT_MAX_ITERS};
use starcons::topology::Graph;
use starcons::{Result, Topology, Weighting};

/// Optimal consensus weights, spectra and quantized-consensus simulation for
/// star-shaped sensor networks.
///
/// Results go to stdout (or --out) as CSV or JSON; a short summary goes to
/// stderr. Exit codes: 0 success, 1 usage error, 2 numerical failure,
/// 3 verification failure.
#[derive(Parser, Debug)]
#[command(name = "starcons", version)]
pub struct Cli {
    /// Worker threads for Monte Carlo runs (default: all cores). Results do
    /// not depend on this value.
    #[arg(long, global = true, env = "STARCONS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// SLEM of a weighted topology.
    Slem(SlemArgs),
    /// Reproduce a reference table (1: k_max grid, 2: SLEM comparison,
    /// 3-5: quantized consensus on the symmetric, CCS and KCS stars).
    Table(TableArgs),
    /// Reproduce a figure as plot-ready CSV (2: SLEM versus number of
    /// centres, 4: quantized state trajectories).
    Fig(FigArgs),
    /// Run a property suite; exits with 3 if any case fails.
    Verify(VerifyArgs),
    /// Edge list of a topology as `u,v,stratum`.
    Graph(GraphArgs),
    /// Weights of a topology under a weighting scheme.
    Weights(WeightsArgs),
    /// Eigenvalues of the weight matrix, decreasing.
    Spectrum(WeightsArgs),
    /// Characteristic function sampled on a θ grid.
    Charfn(CharfnArgs),
    /// Monte Carlo batch of quantized consensus trials.
    Simulate(SimulateArgs),
    /// Numerically minimize the SLEM.
    Optimize(OptimizeArgs),
    /// Dual-certificate residuals of the symmetric-star closed form.
    Slackness(SlacknessArgs),
    /// Boundary number of centres for a k-cored star.
    Kmax(KmaxArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    SymmetricStar,
    CcsStar,
    KcsStar,
    Custom,
}

#[derive(Args, Debug, Clone)]
pub struct TopologyArgs {
    /// Graph family.
    #[arg(long, value_enum, default_value_t = Family::SymmetricStar)]
    pub topology: Family,
    /// Tail length (edges for symmetric/CCS, nodes for KCS).
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    /// Number of branches.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Number of central nodes (KCS only).
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Edge-list CSV (`u,v[,stratum]`) for `--topology custom`.
    #[arg(long)]
    pub graph: Option<PathBuf>,
}

impl TopologyArgs {
    pub fn topology(&self) -> Result<Topology> {
        let t = match self.topology {
            Family::SymmetricStar => Topology::SymmetricStar { m: self.m, n: self.n },
            Family::CcsStar => Topology::CcsStar { m: self.m, n: self.n },
            Family::KcsStar => Topology::KcsStar { m: self.m, n: self.n, k: self.k },
            Family::Custom => {
                let path = self
                    .graph
                    .as_ref()
                    .ok_or_else(|| starcons::Error::ParameterBounds("--topology custom needs --graph FILE".into()))?;
                Topology::Custom { graph: Graph::read_csv(std::fs::File::open(path)?)? }
            }
        };
        t.check()?;
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightingArg {
    Metropolis,
    MaxDegree,
    BestConstant,
    Optimal,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::Metropolis => Weighting::Metropolis,
            WeightingArg::MaxDegree => Weighting::MaxDegree,
            WeightingArg::BestConstant => Weighting::BestConstant,
            WeightingArg::Optimal => Weighting::Optimal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Uniform,
    Probabilistic,
    None,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Self {
        match s {
            SchemeArg::Uniform => Scheme::Uniform,
            SchemeArg::Probabilistic => Scheme::Probabilistic,
            SchemeArg::None => Scheme::None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SlemMethod {
    ClosedForm,
    Eigen,
}

#[derive(Args, Debug)]
pub struct SlemArgs {
    #[command(flatten)]
    pub topo: TopologyArgs,
    /// Closed-form root or eigensolve of the assembled matrix.
    #[arg(long, value_enum, default_value_t = SlemMethod::ClosedForm)]
    pub method: SlemMethod,
    /// Weighting scheme for the eigensolve.
    #[arg(long, value_enum, default_value_t = WeightingArg::Optimal)]
    pub weighting: WeightingArg,
    /// Print both methods and their difference.
    #[arg(long)]
    pub check: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    /// Table number (1-5).
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=5))]
    pub id: u32,
    /// Trials per cell (tables 3-5).
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Master seed (tables 3-5).
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Bit depths (tables 3-5).
    #[arg(long, value_delimiter = ',', default_values_t = [4u32, 8, 16])]
    pub bits: Vec<u32>,
    /// Weighting schemes (tables 3-5); all four by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub weighting: Vec<WeightingArg>,
    /// Update cap per trial; trials hitting it count as non-consensus.
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FigArgs {
    /// Figure number (2 or 4).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=4))]
    pub id: u32,
    /// Largest number of centres on the curve (figure 2).
    #[arg(long, default_value_t = 30)]
    pub k_end: usize,
    /// Only print k_max for the curve (figure 2).
    #[arg(long)]
    pub k_max_only: bool,
    /// Seed for the initial states and quantizer draws (figure 4).
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Maximum number of updates recorded (figure 4).
    #[arg(long, default_value_t = 200)]
    pub steps: usize,
    /// Output file (figure 2) or file prefix (figure 4: PREFIX_uniform.csv
    /// and PREFIX_probabilistic.csv). Figure 2 defaults to stdout, figure 4
    /// to the prefix `fig4`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// stratification, interlacing, slackness, optimizer, invariance or all.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GraphArgs {
    #[command(flatten)]
    pub topo: TopologyArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum WeightsFormat {
    /// `u,v,weight` rows followed by `node,self_weight` rows.
    Csv,
    Json,
    /// Full matrix, row-major.
    Dense,
}

#[derive(Args, Debug)]
pub struct WeightsArgs {
    #[command(flatten)]
    pub topo: TopologyArgs,
    #[arg(long, value_enum, default_value_t = WeightingArg::Optimal)]
    pub weighting: WeightingArg,
    /// Output layout (weights command only).
    #[arg(long, value_enum, default_value_t = WeightsFormat::Csv)]
    pub format: WeightsFormat,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum CharFamily {
    SymmetricStar,
    KcsStar,
}

#[derive(Args, Debug)]
pub struct CharfnArgs {
    #[arg(long, value_enum, default_value_t = CharFamily::SymmetricStar)]
    pub family: CharFamily,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Interior grid points on (0, π).
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// JSON experiment file with fields topology, weighting, bits, scheme,
    /// trials, seed and optionally max_iters. Overrides the flags below.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub topo: TopologyArgs,
    #[arg(long, value_enum, default_value_t = WeightingArg::Optimal)]
    pub weighting: WeightingArg,
    #[arg(long, default_value_t = 4)]
    pub bits: u32,
    #[arg(long, value_enum, default_value_t = SchemeArg::Probabilistic)]
    pub scheme: SchemeArg,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_ITERS)]
    pub max_iters: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[command(flatten)]
    pub topo: TopologyArgs,
    /// Give every edge its own weight instead of one per stratum.
    #[arg(long)]
    pub untied: bool,
    #[arg(long, default_value_t = 5_000)]
    pub max_iters: usize,
    /// Write the best-so-far SLEM per iteration here (`iteration,best_slem`).
    #[arg(long)]
    pub history: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SlacknessArgs {
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long, default_value_t = 5)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KmaxArgs {
    /// Nodes per tail.
    #[arg(long)]
    pub m: usize,
    /// Number of tails.
    #[arg(long)]
    pub n: usize,
}
