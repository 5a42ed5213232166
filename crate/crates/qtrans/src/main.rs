use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use qtrans::*;
use qtrans_core::fq_oracle::{DEFAULT_BUDGET, DEFAULT_PRIMES};

#[derive(Parser)]
#[command(name = "qtrans", version, about = "Quasi-transitivity checks, stratifications and p-adic measures")]
struct Cli {
    /// Worker threads for parallel loops (output does not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct MeasureFlags {
    /// Override the prime of recipe measures.
    #[arg(long)]
    prime: Option<u64>,
    /// Override the level of recipe measures.
    #[arg(long)]
    level: Option<u32>,
}

impl MeasureFlags {
    fn overrides(&self) -> MeasureOverrides {
        MeasureOverrides { prime: self.prime, level: self.level }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fiber dimension of B_phi over a point and the resulting verdict.
    Qtcheck {
        morphism: PathBuf,
        /// Comma-separated target point, e.g. `0` or `0,1/2`.
        #[arg(long)]
        fiber: Option<String>,
        /// Also report the generic fiber dimension.
        #[arg(long)]
        generic: bool,
    },
    /// Generators of the kernel vector fields.
    Kernel { morphism: PathBuf },
    /// The pairing ideal B_phi in the cotangent ring.
    Bphi { morphism: PathBuf },
    /// Conormal ideal of a subvariety of the given codimension.
    Conormal {
        ideal: PathBuf,
        #[arg(long)]
        codim: usize,
    },
    /// Functorial stratification of a map to the line, or validation of a
    /// stratification file.
    Stratify {
        input: PathBuf,
        #[arg(long)]
        audit_fiber: Option<String>,
    },
    /// Krull dimension of an ideal.
    Dim { ideal: PathBuf },
    /// Reduced Groebner basis.
    Gb {
        ideal: PathBuf,
        #[arg(long, default_value = "grevlex")]
        order: String,
    },
    /// Pushforward of a measure along an integer polynomial map.
    Push {
        measure: PathBuf,
        map: PathBuf,
        #[command(flatten)]
        flags: MeasureFlags,
        #[arg(long)]
        restrict: Option<u32>,
    },
    /// Exact Fourier transform on the full dual grid.
    Fourier {
        measure: PathBuf,
        #[command(flatten)]
        flags: MeasureFlags,
        #[arg(long)]
        restrict: Option<u32>,
    },
    /// Rank of a family of measures restricted to p^N Z_p^d.
    Germrank {
        family: PathBuf,
        #[command(flatten)]
        flags: MeasureFlags,
        #[arg(long, default_value_t = 1)]
        restrict: u32,
    },
    /// Number of distinct support germs in p^N Z_p^d.
    Supportgerms {
        family: PathBuf,
        #[command(flatten)]
        flags: MeasureFlags,
        #[arg(long, default_value_t = 1)]
        restrict: u32,
    },
    /// Dimension estimate from point counts over F_p.
    OracleDim {
        ideal: PathBuf,
        #[arg(long)]
        primes: Option<String>,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        oracle_budget: u64,
    },
}

fn run(cli: &Cli) -> CliResult<Value> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(CliError::Usage("--threads must be positive".into()));
        }
        // Ignore the error raised when a pool already exists.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match &cli.command {
        Command::Qtcheck { morphism, fiber, generic } => {
            let fiber = fiber.as_deref().map(parse_rational_list).transpose()?;
            let m = read_json(morphism)?;
            cmd_qtcheck(&m, fiber.as_deref(), *generic)
        }
        Command::Kernel { morphism } => cmd_kernel(&read_json(morphism)?),
        Command::Bphi { morphism } => cmd_bphi(&read_json(morphism)?),
        Command::Conormal { ideal, codim } => cmd_conormal(&read_json(ideal)?, *codim),
        Command::Stratify { input, audit_fiber } => {
            let fiber = audit_fiber.as_deref().map(parse_rational_list).transpose()?;
            cmd_stratify(&read_json(input)?, fiber.as_deref())
        }
        Command::Dim { ideal } => cmd_dim(&read_json(ideal)?),
        Command::Gb { ideal, order } => {
            let order = parse_order(order)?;
            cmd_gb(&read_json(ideal)?, &order)
        }
        Command::Push { measure, map, flags, restrict } => {
            cmd_push(&read_json(measure)?, &read_json(map)?, flags.overrides(), *restrict)
        }
        Command::Fourier { measure, flags, restrict } => cmd_fourier(&read_json(measure)?, flags.overrides(), *restrict),
        Command::Germrank { family, flags, restrict } => cmd_germrank(&read_json(family)?, flags.overrides(), *restrict),
        Command::Supportgerms { family, flags, restrict } => {
            cmd_supportgerms(&read_json(family)?, flags.overrides(), *restrict)
        }
        Command::OracleDim { ideal, primes, oracle_budget } => {
            let primes = match primes {
                Some(p) => parse_u64_list(p)?,
                None => DEFAULT_PRIMES.to_vec(),
            };
            cmd_oracle_dim(&read_json(ideal)?, &primes, *oracle_budget)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(v) => {
            let text = render(&v);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                None => print!("{text}"),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
