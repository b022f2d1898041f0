use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dolbeault::groupdolbeault::Flavor;
use dolbeault_cli::{emit_report, exit_code, parse_expr, render, resolve, run_suite, Command, Format, GroupSpec, SuiteConfig};

#[derive(Parser)]
#[command(name = "dolbeault", version, about = "Exact verification suites for quantum Dolbeault complexes")]
struct Cli {
    /// JSON suite config; flags override its fields
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    max_degree: Option<usize>,
    /// seed for randomized probes
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Quantum plane
    Qplane {
        #[command(subcommand)]
        cmd: QplaneCmd,
    },
    /// Braided symmetric and exterior algebras
    Braided {
        #[command(subcommand)]
        cmd: BraidedCmd,
    },
    /// Finite-group calculi
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Line-bundle valued metrics
    Bundle {
        #[command(subcommand)]
        cmd: BundleCmd,
    },
    /// Parse an expression and print its normal form
    Expr { text: String },
}

#[derive(Subcommand)]
enum QplaneCmd {
    /// Relations, double complex, star and pairings
    Verify,
    /// Metrics, Chern connection and braiding identities
    Metric,
}

#[derive(Subcommand)]
enum BraidedCmd {
    Dims {
        /// `qplane` or `flip`
        #[arg(long)]
        preset: Option<String>,
        /// dimension of the flip preset
        #[arg(long)]
        dim: Option<usize>,
    },
}

#[derive(Args)]
struct GroupArgs {
    /// `a4`, `zN`, or `cyclic` with `--n`
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// comma-separated names of the elements of C01
    #[arg(long, value_delimiter = ',')]
    split: Option<Vec<String>>,
    /// L, LL or Wor
    #[arg(long, value_parser = parse_flavor)]
    flavor: Option<Flavor>,
    #[arg(long)]
    factorise: Option<bool>,
}

#[derive(Subcommand)]
enum GroupCmd {
    Dims(GroupArgs),
    Chern(GroupArgs),
}

#[derive(Subcommand)]
enum BundleCmd {
    Verify {
        /// exponent of the exchange weight q^(2 alpha)
        #[arg(long)]
        two_alpha: Option<i64>,
    },
}

fn parse_flavor(s: &str) -> Result<Flavor, String> {
    match s {
        "L" => Ok(Flavor::L),
        "LL" => Ok(Flavor::LL),
        "Wor" => Ok(Flavor::Wor),
        _ => Err(format!("unknown flavor `{s}` (expected L, LL or Wor)")),
    }
}

fn group_overrides(a: GroupArgs) -> SuiteConfig {
    SuiteConfig { group: a.group.map(GroupSpec::Preset), n: a.n, split: a.split, flavor: a.flavor, factorise: a.factorise, ..Default::default() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cmd, mut over) = match cli.cmd {
        Cmd::Expr { text } => {
            return match parse_expr(&text) {
                Ok(p) => {
                    println!("{}", render(&p));
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            };
        }
        Cmd::Qplane { cmd: QplaneCmd::Verify } => (Command::QplaneVerify, SuiteConfig::default()),
        Cmd::Qplane { cmd: QplaneCmd::Metric } => (Command::QplaneMetric, SuiteConfig::default()),
        Cmd::Braided { cmd: BraidedCmd::Dims { preset, dim } } => (Command::BraidedDims, SuiteConfig { preset, dim, ..Default::default() }),
        Cmd::Group { cmd: GroupCmd::Dims(a) } => (Command::GroupDims, group_overrides(a)),
        Cmd::Group { cmd: GroupCmd::Chern(a) } => (Command::GroupChern, group_overrides(a)),
        Cmd::Bundle { cmd: BundleCmd::Verify { two_alpha } } => (Command::BundleVerify, SuiteConfig { two_alpha, ..Default::default() }),
    };
    over.format = cli.format;
    over.max_degree = cli.max_degree;
    over.seed = cli.seed;
    let base = match cli.config.as_deref().map(SuiteConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cfg = base.merged(&over);
    let job = match resolve(cmd, &cfg) {
        Ok(j) => j,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = run_suite(&job);
    print!("{}", emit_report(&report, cfg.format.unwrap_or_default()));
    ExitCode::from(exit_code(&report) as u8)
}
