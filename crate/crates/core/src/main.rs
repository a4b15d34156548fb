use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use simpers::cli::{self, CliError, GenerateMode, RunFlags, ValidateFlags};
use simpers::tda::RipsParams;

/// Persistence diagrams of filtrations connected by simplicial maps
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute the diagram of a filtration file with the annotation engine
    Run {
        filtration: PathBuf,
        /// Keep pairs born and killed at the same grade
        #[arg(long)]
        keep_zero: bool,
        /// Insert missing faces instead of rejecting the op
        #[arg(long)]
        lenient: bool,
        /// Audit the annotation after every op
        #[arg(long)]
        audit: bool,
        #[arg(long)]
        max_dim: Option<usize>,
        /// Write the diagram here instead of stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compute the diagram of an inclusion-only filtration by matrix reduction
    Oracle {
        filtration: PathBuf,
        #[arg(long)]
        keep_zero: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Build a filtration file from a point cloud
    Generate {
        points: PathBuf,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        eps: f64,
        /// Number of scale steps. By default one more than needed for the
        /// scales to reach the diameter, so that graph induced complexes,
        /// which lag one scale behind, also end on a full simplex.
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 2)]
        max_dim: usize,
        #[arg(long, value_enum, default_value_t = Mode::Sparse)]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Bottleneck distance between two diagram files
    Bottleneck {
        first: PathBuf,
        second: PathBuf,
        /// Compare ln(birth), ln(death) instead of raw grades
        #[arg(long)]
        log_scale: bool,
        /// Only compare these dimensions (comma separated)
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
    },
    /// Replay a filtration with every consistency check enabled
    Validate {
        filtration: PathBuf,
        #[arg(long)]
        lenient: bool,
        #[arg(long)]
        max_dim: Option<usize>,
        /// Write the final annotation dump here
        #[arg(long)]
        dump: Option<PathBuf>,
        /// Audit this annotation dump against the final complex
        #[arg(long)]
        check_dump: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Mode {
    Exact,
    Sparse,
    Gic,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run {
            filtration,
            keep_zero,
            lenient,
            audit,
            max_dim,
            output,
        } => {
            let flags = RunFlags {
                keep_zero,
                lenient,
                audit,
                max_dim,
            };
            emit(
                &cli::cmd_run(&read(&filtration)?, flags)?,
                output.as_deref(),
            )
        }
        Command::Oracle {
            filtration,
            keep_zero,
            output,
        } => emit(
            &cli::cmd_oracle(&read(&filtration)?, keep_zero)?,
            output.as_deref(),
        ),
        Command::Generate {
            points,
            alpha,
            eps,
            steps,
            max_dim,
            mode,
            output,
        } => {
            let text = read(&points)?;
            let steps = match steps {
                Some(s) => s,
                None => {
                    let cloud = cli::parse_points(&text)?;
                    if !(alpha > 0.0 && (0.0..=1.0).contains(&eps)) || eps == 0.0 {
                        return Err(CliError::Usage(
                            "--steps is required unless alpha > 0 and 0 < eps <= 1".into(),
                        ));
                    }
                    RipsParams::steps_to_cover(alpha, eps, cloud.diameter()) + 1
                }
            };
            let params = RipsParams {
                alpha,
                eps,
                steps,
                max_dim,
            };
            let mode = match mode {
                Mode::Exact => GenerateMode::Exact,
                Mode::Sparse => GenerateMode::Sparse,
                Mode::Gic => GenerateMode::Gic,
            };
            emit(&cli::cmd_generate(&text, params, mode)?, output.as_deref())
        }
        Command::Bottleneck {
            first,
            second,
            log_scale,
            dims,
        } => {
            let dims: Option<BTreeSet<usize>> = dims.map(|d| d.into_iter().collect());
            emit(
                &cli::cmd_bottleneck(&read(&first)?, &read(&second)?, log_scale, dims.as_ref())?,
                None,
            )
        }
        Command::Validate {
            filtration,
            lenient,
            max_dim,
            dump,
            check_dump,
        } => {
            let flags = ValidateFlags {
                lenient,
                max_dim,
                check_dump: check_dump.as_deref().map(read).transpose()?,
            };
            let v = cli::cmd_validate(&read(&filtration)?, &flags)?;
            if let Some(p) = dump {
                emit(&v.final_dump, Some(&p))?;
            }
            emit(&v.report, None)
        }
    }
}

fn main() -> ExitCode {
    let parsed = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match execute(parsed.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
