//! Command-line front end.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Kind, RawConfig};
use crate::error::Result;
use crate::experiment::{run, Report};

#[derive(Debug, Parser)]
#[command(name = "flmm", version, about = "Fractional linear multistep methods: weights, solves, convergence and stability studies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the weight sequences (a, q) of a method.
    Weights(Overrides),
    /// Solve a registry problem and write the trace.
    Solve(Overrides),
    /// Max-error / EOC table over a list of M = 1/h.
    Converge(Overrides),
    /// Stability boundary curves, membership grids and comparisons.
    Stability {
        #[command(subcommand)]
        what: StabilityCommand,
    },
    /// Run whatever kind the config file declares.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum StabilityCommand {
    /// Boundary locus delta(e^{i theta}).
    Boundary(Overrides),
    /// Unstable-region membership over a zeta grid.
    Grid(Overrides),
    /// Generating functions at xi = -1.
    Compare(Overrides),
}

/// Every flag maps onto the config key of the same name and overrides it.
#[derive(Debug, Default, Args)]
pub struct Overrides {
    /// key = value file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Method name, or comma list where several are allowed.
    #[arg(long)]
    pub method: Option<String>,
    /// Order beta in (0, 1], or comma list.
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub problem: Option<String>,
    #[arg(long)]
    pub y0: Option<String>,
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub t0: Option<String>,
    #[arg(long = "t-end")]
    pub t_end: Option<String>,
    #[arg(long)]
    pub steps: Option<String>,
    /// `lo..hi` over powers of two, or a comma list.
    #[arg(long)]
    pub mlist: Option<String>,
    #[arg(long = "newton-tol")]
    pub newton_tol: Option<String>,
    #[arg(long = "newton-max-iters")]
    pub newton_max_iters: Option<String>,
    /// Output path; stdout if omitted.
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Boundary samples over [0, 2 pi].
    #[arg(long)]
    pub samples: Option<String>,
    /// Number of weights.
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long = "re-min", allow_hyphen_values = true)]
    pub re_min: Option<String>,
    #[arg(long = "re-max", allow_hyphen_values = true)]
    pub re_max: Option<String>,
    #[arg(long = "im-min", allow_hyphen_values = true)]
    pub im_min: Option<String>,
    #[arg(long = "im-max", allow_hyphen_values = true)]
    pub im_max: Option<String>,
    /// Grid points per axis.
    #[arg(long)]
    pub points: Option<String>,
    /// winding or dynamic.
    #[arg(long)]
    pub oracle: Option<String>,
}

impl Overrides {
    fn apply(&self, raw: &mut RawConfig) {
        let pairs = [
            ("method", &self.method),
            ("beta", &self.beta),
            ("problem", &self.problem),
            ("y0", &self.y0),
            ("lambda", &self.lambda),
            ("t0", &self.t0),
            ("t_end", &self.t_end),
            ("steps", &self.steps),
            ("mlist", &self.mlist),
            ("newton_tol", &self.newton_tol),
            ("newton_max_iters", &self.newton_max_iters),
            ("out", &self.out),
            ("format", &self.format),
            ("samples", &self.samples),
            ("n", &self.n),
            ("re_min", &self.re_min),
            ("re_max", &self.re_max),
            ("im_min", &self.im_min),
            ("im_max", &self.im_max),
            ("points", &self.points),
            ("oracle", &self.oracle),
        ];
        for (key, value) in pairs {
            if let Some(v) = value {
                raw.set(key, v.clone());
            }
        }
    }

    fn execute(&self, kind: Kind) -> Result<Report> {
        let mut raw = match &self.config {
            Some(p) => RawConfig::load(p)?,
            None => RawConfig::default(),
        };
        self.apply(&mut raw);
        run(&raw.resolve(Some(kind))?)
    }
}

impl Cli {
    pub fn execute(&self) -> Result<Report> {
        match &self.command {
            Command::Weights(o) => o.execute(Kind::Weights),
            Command::Solve(o) => o.execute(Kind::Solve),
            Command::Converge(o) => o.execute(Kind::Convergence),
            Command::Stability { what } => match what {
                StabilityCommand::Boundary(o) => o.execute(Kind::StabilityBoundary),
                StabilityCommand::Grid(o) => o.execute(Kind::StabilityGrid),
                StabilityCommand::Compare(o) => o.execute(Kind::StabilityCompare),
            },
            Command::Run { config } => run(&RawConfig::load(config)?.resolve(None)?),
        }
    }
}

/// Parses the process arguments, runs, prints diagnostics and returns the exit
/// code.
pub fn main_exit_code() -> i32 {
    let cli = Cli::parse();
    match cli.execute().and_then(|r| {
        for d in &r.diagnostics {
            eprintln!("{d}");
        }
        r.into_result()
    }) {
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
