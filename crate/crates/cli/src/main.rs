use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use nkslag::cli::{self, Report, Tolerances};
use nkslag::structure_eqs::NamedExample;
use nkslag::symmetry::{GridSpec, GroupId};

#[derive(Parser)]
#[command(name = "nkslag", version, about = "Special Lagrangians in the nearly Kähler CP³: verification suites")]
struct Args {
    #[command(subcommand)]
    cmd: Cmd,
    /// Tolerance for algebraic checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    tol: f64,
    /// Tolerance for finite-difference checks.
    #[arg(long, global = true, default_value_t = 1e-4)]
    fd_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    fd_step: f64,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Output::Json)]
    output: Output,
    /// Write the report and CSV artifacts here instead of stdout.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Output {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify a named example: rp3, berger, s1s2, chiang, exotic.
    Verify { example: String },
    /// Find the zeros of μ on the slice of k1, k2 or k3.
    Scan {
        group: String,
        /// Grid points per axis (default: 400, or 31 samples for k1).
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        max: Option<f64>,
    },
    /// Moment-map, ψ, equivariance and coframe identities at random points.
    Identities {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Flip the sign of the dν coefficient (negative control).
        #[arg(long)]
        corrupt: bool,
    },
    /// Jacobian zero locus and stabilisers on the flag manifold.
    Flag {
        #[arg(long, default_value_t = 200)]
        grid: usize,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
    },
    /// Angle θ and n_W of a special Lagrangian subspace read from a JSON file.
    Canon {
        #[arg(long)]
        basis: PathBuf,
    },
}

fn usage(msg: String) -> nkslag::NkError {
    nkslag::NkError::InvalidInput(msg)
}

fn run(args: &Args) -> nkslag::Result<Report> {
    let t = Tolerances { tol: args.tol, fd_tol: args.fd_tol, fd_step: args.fd_step, seed: args.seed };
    match &args.cmd {
        Cmd::Verify { example } => {
            let ex = NamedExample::parse(example).ok_or_else(|| usage(format!("unknown example {example:?}")))?;
            cli::cmd_verify(ex, &t)
        }
        Cmd::Scan { group, grid, max } => {
            let id = GroupId::parse(group).ok_or_else(|| usage(format!("unknown group {group:?}")))?;
            let mut g = GridSpec::default_for(id);
            if let Some(n) = grid {
                g.n = *n;
            }
            if let Some(m) = max {
                g.hi = if id == GroupId::K1 { [*m, 0.0] } else { [*m, *m] };
            }
            cli::cmd_scan(id, &g, &t)
        }
        Cmd::Identities { samples, corrupt } => cli::cmd_identities(*samples, *corrupt, &t),
        Cmd::Flag { grid, samples } => cli::cmd_flag(*grid, *samples, &t),
        Cmd::Canon { basis } => {
            let text = std::fs::read_to_string(basis).map_err(|e| usage(format!("{}: {e}", basis.display())))?;
            cli::cmd_canon(&text, &t)
        }
    }
}

fn emit(args: &Args, report: &Report) -> std::io::Result<()> {
    let body = match args.output {
        Output::Json => report.to_json(),
        Output::Csv => report.to_csv(),
    };
    match &args.out_dir {
        None => writeln!(std::io::stdout().lock(), "{body}")?,
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            let ext = match args.output {
                Output::Json => "json",
                Output::Csv => "csv",
            };
            std::fs::write(dir.join(format!("report.{ext}")), body)?;
            for a in &report.artifacts {
                std::fs::write(dir.join(&a.file), &a.contents)?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    let report = match run(&args) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match emit(&args, &report) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
        _ => {}
    }
    for c in report.failed() {
        eprintln!("FAIL {}: {} (target {})", c.name, c.value, c.target);
    }
    ExitCode::from(report.exit_code() as u8)
}
