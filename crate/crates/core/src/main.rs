use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orbita::cases::{build_case, CASES};
use orbita::orbitscan::{orbit_partition, ScanOptions, MAX_POINTS};
use orbita::spinor::{self, Convention};
use orbita::verify::{counting_identities, render_orbits, run_case, RunOptions};
use orbita::{FieldSpec, OrbitaError, Result};

#[derive(Parser)]
#[command(name = "orbita", version, about = "Orbits of finite groups on singular points of quadratic modules")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the available cases.
    ListCases,
    /// Run every check of a case.
    Verify {
        case: String,
        #[arg(long)]
        q: u32,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Largest number of projective points to enumerate.
        #[arg(long, default_value_t = MAX_POINTS)]
        budget: u64,
        #[arg(long)]
        threads: Option<usize>,
        /// Second degree for Sp4xSpN.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Print the orbit partition of the singular points.
    Orbits {
        case: String,
        #[arg(long)]
        q: u32,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long, default_value_t = MAX_POINTS)]
        budget: u64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
    },
    /// Exact counting identities (F4, PGL2, quadric).
    Identities {
        #[arg(long)]
        family: String,
        #[arg(long = "q-list", value_delimiter = ',', required = true)]
        q_list: Vec<u32>,
    },
    /// Spinor and Clifford arithmetic in characteristic 2.
    Spinor {
        #[command(subcommand)]
        command: SpinorCommand,
    },
}

#[derive(Subcommand)]
enum SpinorCommand {
    /// Evaluate an expression such as "s7(t) (1+f1f2f3f4f5f6)".
    Eval {
        expr: String,
        /// Field of the parameters; t is its generator.
        #[arg(long, default_value_t = 64)]
        q: u32,
        #[arg(long, value_enum, default_value_t = Conv::Standard)]
        convention: Conv,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Conv {
    Standard,
    Reversed,
}

fn write_json(path: &PathBuf, doc: &serde_json::Value) -> Result<()> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| OrbitaError::Usage(e.to_string()))?;
    std::fs::write(path, text + "\n").map_err(|e| OrbitaError::Usage(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ListCases => {
            for c in CASES {
                println!("{:<14} dim {:<4} {:<22} {}", c.id, c.dim, c.constraints, c.group);
            }
            Ok(true)
        }
        Command::Verify {
            case,
            q,
            json,
            budget,
            threads,
            n,
        } => {
            let opts = RunOptions {
                budget,
                threads,
                n_param: n,
                ..RunOptions::default()
            };
            let report = run_case(&case, q, &opts)?;
            print!("{}", report.render_text());
            if let Some(path) = json {
                write_json(&path, &report.to_json())?;
            }
            Ok(report.passed())
        }
        Command::Orbits {
            case,
            q,
            json,
            budget,
            threads,
            n,
        } => {
            let c = build_case(&case, q, n)?;
            let opts = ScanOptions {
                budget,
                ..ScanOptions::default()
            };
            let report = orbit_partition(&c, opts, threads)?;
            print!("{}", render_orbits(&report));
            if let Some(path) = json {
                write_json(&path, &report.to_json())?;
            }
            Ok(true)
        }
        Command::Identities { family, q_list } => {
            let report = counting_identities(&family, &q_list)?;
            print!("{}", report.render_text());
            Ok(report.passed())
        }
        Command::Spinor {
            command: SpinorCommand::Eval { expr, q, convention },
        } => {
            let field = FieldSpec::new(q)?;
            let conv = match convention {
                Conv::Standard => Convention::Standard,
                Conv::Reversed => Convention::Reversed,
            };
            let e = spinor::evaluate(&field, &expr, conv)?;
            println!("operator: {}", e.operator);
            println!("spinor:   {}", e.spinor);
            if let Some(v) = e.quadratic {
                println!("Q_X:      {}", field.format(v));
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
