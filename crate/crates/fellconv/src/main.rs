use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fellconv::cli::{self, CheckOptions, FuzzOptions};

#[derive(Parser)]
#[command(
    name = "fellconv",
    about = "Convolution *-algebras of Fell bundles over finite etale groupoids",
    version
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a bundle file: groupoid laws, the ten bundle axioms,
    /// fiber-form nondegeneracy and saturation
    Check {
        path: PathBuf,
        /// Numerical tolerance for the axiom checks
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Random elements sampled for the norm and positivity axioms
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Seed for the sampled checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the sup, I- and full C*-norm of a named section
    Norm {
        path: PathBuf,
        /// Section name inside the file
        #[arg(long)]
        section: String,
    },
    /// Emit a gallery bundle (trivial, pair, unitbundle, linking, partial)
    Example {
        name: String,
        /// Example parameters, e.g. `n=3`, `p=2 q=1`, `z2-halved`
        params: Vec<String>,
        /// Write the document here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate seeded random bundles and run the invariant suite
    Fuzz {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long = "max-elements", default_value_t = 10)]
        max_elements: usize,
        #[arg(long = "max-fiber-dim", default_value_t = 2)]
        max_fiber_dim: usize,
    },
}

fn main() -> ExitCode {
    let args = Args::parse();
    let code = match args.command {
        Command::Check {
            path,
            tol,
            samples,
            seed,
        } => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", path.display());
                    return ExitCode::from(cli::EXIT_INPUT as u8);
                }
            };
            let (code, report) = cli::check_text(&text, &CheckOptions { tol, samples, seed });
            print!("{report}");
            code
        }
        Command::Norm { path, section } => {
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("cannot read {}: {e}", path.display());
                    return ExitCode::from(cli::EXIT_INPUT as u8);
                }
            };
            let (code, report) = cli::norm_text(&text, &section);
            print!("{report}");
            code
        }
        Command::Example { name, params, out } => match cli::example_text(&name, &params) {
            Ok(text) => match out {
                Some(path) => match fs::write(&path, &text) {
                    Ok(()) => cli::EXIT_OK,
                    Err(e) => {
                        eprintln!("cannot write {}: {e}", path.display());
                        cli::EXIT_INPUT
                    }
                },
                None => {
                    print!("{text}");
                    cli::EXIT_OK
                }
            },
            Err(e) => {
                eprintln!("{e}");
                cli::EXIT_INPUT
            }
        },
        Command::Fuzz {
            seed,
            count,
            max_elements,
            max_fiber_dim,
        } => {
            let (code, report, files) = cli::fuzz_text(&FuzzOptions {
                seed,
                count,
                max_elements,
                max_fiber_dim,
            });
            print!("{report}");
            for (name, content) in files {
                if let Err(e) = fs::write(&name, content) {
                    eprintln!("cannot write {name}: {e}");
                }
            }
            code
        }
    };
    ExitCode::from(code as u8)
}
