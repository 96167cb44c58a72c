mod commands;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use ultradyn::error::Error;
use ultradyn::scalar::Exact;

/// Exact shadowing experiments. Every run prints one JSON report on stdout.
///
/// Exit status: 0 when every verdict is the expected one, 1 on a
/// counterexample or failed check, 2 on bad usage or malformed input.
#[derive(Debug, Parser, Serialize)]
#[command(name = "ultradyn", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[arg(long, global = true)]
    pub horizon: Option<usize>,
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Indent the report.
    #[arg(long, global = true)]
    pub pretty: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "command")]
pub enum Cmd {
    /// Finite shadowing on a finite system: exhaustive (default) or sampled.
    ShadowCheck {
        file: PathBuf,
        #[arg(long)]
        eps: Exact,
        #[arg(long)]
        delta: Exact,
        #[arg(long)]
        sampled: bool,
    },
    /// Least p ≤ pmax for which a shift is of order p, to --depth.
    OrderDetect {
        file: PathBuf,
        #[arg(long)]
        pmax: usize,
    },
    /// Builds shadows of sampled pseudo-orbits and verifies them.
    ShadowConstruct {
        #[command(subcommand)]
        how: Construct,
    },
    /// p-adic orbits, map classification and ball partitions.
    Padic {
        #[command(subcommand)]
        op: PadicOp,
    },
    /// Mittag-Leffler check on an inverse-system file.
    MlCheck {
        file: PathBuf,
        #[arg(long = "N", alias = "n")]
        n: usize,
        /// Also restrict the system to the stable images.
        #[arg(long)]
        stabilize: bool,
    },
    /// Realizes projected PO(U_n) paths by true orbits.
    Shadowreform {
        #[command(flatten)]
        system: ReformSystem,
        #[arg(long)]
        m: usize,
        /// Defaults to m + 1.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 100)]
        paths: usize,
    },
    /// Reproduces a standard example.
    Repro {
        #[command(subcommand)]
        example: Example,
    },
}

#[derive(Debug, Args, Serialize)]
pub struct ReformSystem {
    /// p-adic map; requires --p.
    #[arg(long, requires = "p", required_unless_present = "shift")]
    pub map: Option<String>,
    /// Shift presentation file.
    #[arg(long, conflicts_with_all = ["map", "p", "precision"])]
    pub shift: Option<PathBuf>,
    #[arg(long)]
    pub p: Option<u32>,
    #[arg(long)]
    pub precision: Option<usize>,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "construction")]
pub enum Construct {
    /// x_0 shadows pseudo-orbits of 1-Lipschitz maps of Z_p.
    StartPoint {
        #[arg(long)]
        map: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 12)]
        precision: usize,
        /// delta = p^-m.
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 50)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// x_0 two-sided shadows Z-indexed pseudo-orbits of isometries of Z_p.
    TwoSided {
        #[arg(long)]
        map: String,
        #[arg(long)]
        p: u32,
        #[arg(long, default_value_t = 12)]
        precision: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// The glued shadow for shifts of finite order.
    OrderP {
        file: PathBuf,
        /// delta = 1/(k+1).
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
    /// Lifts a stage shadow through an inverse system.
    Lift {
        file: PathBuf,
        #[arg(long)]
        eps: Exact,
        #[arg(long)]
        delta: Exact,
        #[arg(long, default_value_t = 8)]
        len: usize,
        #[arg(long, default_value_t = 1)]
        samples: usize,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "op")]
pub enum PadicOp {
    Orbit {
        #[arg(long)]
        map: String,
        #[arg(long)]
        p: u32,
        /// An integer, a fraction, or a literal `p=..;l=..;digits=..`.
        #[arg(long)]
        x0: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[arg(long, default_value_t = 16)]
        precision: usize,
    },
    Classify {
        #[arg(long)]
        map: String,
        #[arg(long)]
        p: u32,
        /// Radius exponent of the locally scaling test.
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Factor exponent of the locally scaling test.
        #[arg(long, default_value_t = 1)]
        m: i64,
        #[arg(long, default_value_t = 16)]
        precision: usize,
    },
    /// The level-n ball partition of Z_p.
    Partition {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        precision: Option<usize>,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case", tag = "example")]
pub enum Example {
    /// The same map on a line of points, euclidean versus discrete metric.
    MetricDependence {
        #[arg(long = "N", alias = "n", default_value_t = 2)]
        n: usize,
        #[arg(long, default_value = "1/2")]
        delta: Exact,
        #[arg(long, default_value = "1/2")]
        eps: Exact,
        /// Points x_{-range}..x_{range}.
        #[arg(long, default_value_t = 24)]
        range: usize,
        /// Length for the exhaustive discrete check.
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Finite shadowing without shadowing.
    FiniteShadowing {
        #[arg(long, default_value_t = 8200)]
        blocks: u64,
        #[arg(long, default_value_t = 6)]
        max_l: usize,
        #[arg(long, default_value = "1/4")]
        delta: Exact,
        #[arg(long, default_value = "1/2")]
        eps: Exact,
        #[arg(long, default_value_t = 5)]
        crossings: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 12)]
        max_len: usize,
    },
    /// Glued pseudo-orbits of the even shift with no 1/2-shadow.
    EvenShift {
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        /// Forbidden odd blocks kept in the presentation.
        #[arg(long, default_value_t = 4)]
        truncation: usize,
        #[arg(long, default_value_t = 12)]
        order_depth: usize,
        #[arg(long, default_value_t = 10)]
        candidate_depth: usize,
    },
}

/// A run that produced no report.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Failure {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match e {
            Error::Internal(_) => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(w) = cli.global.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(report) => {
            let out = if cli.global.pretty {
                serde_json::to_string_pretty(&report)
            } else {
                serde_json::to_string(&report)
            };
            // A closed stdout is not worth a panic.
            let _ = writeln!(std::io::stdout(), "{}", out.expect("report serializes"));
            ExitCode::from(report.exit_code() as u8)
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
