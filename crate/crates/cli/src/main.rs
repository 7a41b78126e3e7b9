use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;

use commands::{CmdError, Report};

#[derive(Parser, Debug)]
#[command(name = "singer", version, about = "Singer-cycle labeling and rewriting for GL_d(q) modules")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Seed for every random choice.
    #[arg(long, env = "SINGER_SEED", default_value_t = 0, global = true)]
    seed: u64,

    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exhaustive injectivity of the base-q map on a digit box.
    CheckInjectivity {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Digit bound, or the digit sum with --sum-k.
        #[arg(long = "C")]
        c: u64,
        /// Check only digit vectors summing to C.
        #[arg(long = "sum-K")]
        sum_k: bool,
    },
    /// Weight patterns of total degree K with exponents and model eigenvalues.
    ModelSpectrum {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        #[arg(long = "K")]
        k: u64,
        /// `auto` (the field generator) or an element of F_{q^d}.
        #[arg(long, default_value = "auto")]
        omega: String,
    },
    /// Singer cycle on a module: spectrum against the digit model.
    SingerDemo {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        d: usize,
        /// Factor list, e.g. `sym(2)` or `nat@0,nat@1`.
        #[arg(long)]
        spec: String,
    },
    /// Write a planted instance file.
    GenInstance {
        /// Module, e.g. `d=3 q=7 factors=[sym(2)@0]`.
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 2)]
        gens: usize,
        #[arg(long)]
        plant_singer: bool,
        /// Leave out the oracle block.
        #[arg(long)]
        public: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the rewriting pipeline on an instance file.
    Rewrite {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        eps: Option<f64>,
        /// Result file; not written when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the certificate of a result, and the oracle when present.
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
    },
}

fn run(cli: &Cli) -> Result<Report, CmdError> {
    match &cli.command {
        Command::CheckInjectivity { q, d, c, sum_k } => commands::check_injectivity(*q, *d, *c, *sum_k),
        Command::ModelSpectrum { q, d, k, omega } => commands::model_spectrum(*q, *d, *k, omega),
        Command::SingerDemo { q, d, spec } => commands::singer_demo(*q, *d, spec, cli.seed),
        Command::GenInstance { spec, gens, plant_singer, public, out } => {
            commands::gen_instance(spec, *gens, *plant_singer, *public, out, cli.seed)
        }
        Command::Rewrite { input, eps, out } => commands::rewrite(input, *eps, out.as_deref(), cli.seed),
        Command::Verify { input, result } => commands::verify(input, result, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(report) => {
            // a closed pipe downstream is not an error of ours
            let mut out = std::io::stdout().lock();
            let _ = match cli.format {
                Format::Text => write!(out, "{}", report.text),
                Format::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&report.json).expect("json value"))
                }
            };
            if cli.verbose > 0 {
                for line in &report.notes {
                    eprintln!("{line}");
                }
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            match cli.format {
                Format::Text => eprintln!("error: {}", e.message),
                Format::Json => println!(
                    "{}",
                    serde_json::json!({ "error": e.message, "exit_code": e.code })
                ),
            }
            ExitCode::from(e.code)
        }
    }
}
