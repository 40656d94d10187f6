use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "forge",
    version,
    about = "Approximate equilibria and price-of-stability bounds for weighted congestion games"
)]
pub struct Cli {
    /// Arithmetic backend for exhaustive routines.
    #[arg(long, env = "FORGE_MODE", default_value = "rational", global = true)]
    pub mode: String,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random game instance as JSON.
    Gen(GenArgs),
    /// Run a certification suite and write one CSV row per (instance, lambda).
    Suite(SuiteArgs),
    /// Re-emit suite rows as CSV or a per-family text summary.
    Report(ReportArgs),
    /// Fit or check goodness parameters of a single cost.
    #[command(subcommand)]
    Goodness(GoodnessCommand),
    /// Potential minimization, descent, condition checks and certificates.
    #[command(subcommand)]
    Potential(PotentialCommand),
    /// Trade-off curves as CSV.
    #[command(subcommand)]
    Bounds(BoundsCommand),
}

#[derive(Args, Debug, Clone)]
pub struct FamilyArgs {
    /// Cost family: poly, concave, mixed or fairshare.
    #[arg(long)]
    pub family: String,
    /// Maximum polynomial degree (poly and mixed).
    #[arg(long)]
    pub d: Option<u32>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Player count; drawn from the seed when absent.
    #[arg(long)]
    pub players: Option<usize>,
    #[arg(long)]
    pub resources: Option<usize>,
    /// Strategies per player.
    #[arg(long)]
    pub strategies: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SuiteArgs {
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Comma-separated lambda values; `lnW` stands for each instance's ln W.
    #[arg(long)]
    pub lambda_grid: String,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV output file; stdout when absent.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Writes failing instances as JSON lines.
    #[arg(long)]
    pub failures: Option<PathBuf>,
    /// Exit with status 1 when any row fails.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Suite CSV; `-` reads stdin.
    #[arg(long, short, default_value = "-")]
    pub input: String,
    #[arg(long, default_value = "summary")]
    pub format: String,
}

#[derive(Args, Debug)]
pub struct DomainArgs {
    /// Cost spec JSON file; `-` reads stdin.
    #[arg(long)]
    pub cost: String,
    /// Takes the weight domain from this game instead of the explicit bounds.
    #[arg(long, conflicts_with_all = ["w_min", "w_max", "total"])]
    pub game: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub w_min: f64,
    #[arg(long, default_value_t = 1.0)]
    pub w_max: f64,
    /// Total weight W.
    #[arg(long, default_value_t = 10.0)]
    pub total: f64,
    #[arg(long, default_value_t = forge_core::goodness::DEFAULT_GRID_DENSITY)]
    pub density: usize,
}

#[derive(Subcommand, Debug)]
pub enum GoodnessCommand {
    /// Tightest parameters for a fixed slack.
    Fit {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long, default_value_t = 0.0)]
        xi: f64,
    },
    /// Checks `alpha1,alpha2,beta1,beta2,xi` on the grid.
    Check {
        #[command(flatten)]
        domain: DomainArgs,
        #[arg(long)]
        params: String,
        /// Use the simplified load condition for nondecreasing costs.
        #[arg(long)]
        shortcut: bool,
    },
    /// Fits at each slack in a grid and keeps the best.
    ScanXi {
        #[command(flatten)]
        domain: DomainArgs,
        /// Comma list, or `lo:hi:n` for `n` evenly spaced values.
        #[arg(long)]
        xi_grid: String,
        #[arg(long, value_enum, default_value_t = Objective::Alpha)]
        objective: Objective,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Objective {
    Alpha,
    Beta,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Game instance JSON.
    #[arg(long)]
    pub game: PathBuf,
    #[command(flatten)]
    pub family: FamilyArgs,
    /// Lambda value or `lnW`.
    #[arg(long)]
    pub lambda: String,
}

#[derive(Subcommand, Debug)]
pub enum PotentialCommand {
    /// Exhaustive potential minimizer, certified against the family curve.
    Minimize {
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Potential descent from a start profile, certified at the curve's alpha.
    Descend {
        #[command(flatten)]
        catalog: CatalogArgs,
        /// Comma-separated strategy indices; all zeros when absent.
        #[arg(long)]
        start: Option<String>,
        #[arg(long, value_enum, default_value_t = Rule::Best)]
        rule: Rule,
    },
    /// Checks the per-resource potential conditions over all player sets.
    VerifyLemma1 {
        #[command(flatten)]
        catalog: CatalogArgs,
    },
    /// Certifies a given profile against claimed factors.
    Certify {
        #[arg(long)]
        game: PathBuf,
        /// Comma-separated strategy indices.
        #[arg(long)]
        profile: String,
        /// Claimed approximation factor; `inf` accepts anything.
        #[arg(long, default_value = "inf")]
        alpha: String,
        /// Claimed cost ratio to the optimum.
        #[arg(long, default_value = "inf")]
        beta: String,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Rule {
    Best,
    First,
}

#[derive(Subcommand, Debug)]
pub enum BoundsCommand {
    /// Samples `(lambda, alpha, beta)` of a family curve.
    Curve {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated lambdas; an even sample of the valid range when absent.
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        /// Largest player weight (fairshare, unit minimum weight).
        #[arg(long)]
        w_max: Option<f64>,
        /// Total weight W (fairshare).
        #[arg(long)]
        total: Option<f64>,
    },
    /// Fair-sharing comparison with the earlier bounds.
    Fig1 {
        #[arg(long, value_enum, default_value_t = Panel::Left)]
        panel: Panel,
        #[arg(long, default_value_t = 100)]
        points: usize,
        /// Right end of the w_max axis (left panel).
        #[arg(long, default_value_t = 10.0)]
        w_max_limit: f64,
        /// w_max of the trade-off panel.
        #[arg(long, default_value_t = 3.0)]
        w_max: f64,
        /// W of the trade-off panel.
        #[arg(long, default_value_t = 50.0)]
        total: f64,
        /// Right end of the alpha axis of the trade-off panel.
        #[arg(long, default_value_t = 11.0)]
        alpha_limit: f64,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Panel {
    /// `alpha` at `lambda = 1` against `w_max`.
    Left,
    /// `(alpha, beta)` trade-off for fixed weights.
    Right,
}
