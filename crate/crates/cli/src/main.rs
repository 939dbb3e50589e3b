mod commands;
mod cremer;
mod input;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use irrat_core::report::{Report, EXIT_INPUT_ERROR};

use crate::input::SpecArgs;

#[derive(Debug, Parser)]
#[command(
    name = "irrat",
    version,
    about = "Irrationality and transcendence criteria for series of rationals"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Check criterion hypotheses and classify the limit.
    Classify {
        #[command(flatten)]
        spec: SpecArgs,
        /// Decimal places of the enclosure.
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print terms, partial sums and an enclosure.
    Eval {
        #[command(flatten)]
        spec: SpecArgs,
        /// Tabulate terms up to this index.
        #[arg(long)]
        terms: Option<u64>,
        #[arg(long)]
        digits: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Iterate z^d + e^{2πiθ} z from seeds near 0 and write a CSV of |z|.
    DemoCremer(cremer::DemoArgs),
    /// List built-in series.
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

/// Writes to stdout; a closed pipe (e.g. `| head`) is not an error.
fn write_stdout(text: &str) {
    let mut out = io::stdout().lock();
    if let Err(e) = out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        if e.kind() != io::ErrorKind::BrokenPipe {
            eprintln!("irrat: {e}");
        }
    }
}

fn emit(report: &Report, format: Format) {
    match format {
        Format::Json => write_stdout(&format!("{}\n", report.to_json())),
        Format::Text => write_stdout(&report.render_text()),
    }
}

fn input_error(msg: &str) -> ExitCode {
    eprintln!("irrat: {msg}");
    ExitCode::from(EXIT_INPUT_ERROR as u8)
}

fn demo(args: &cremer::DemoArgs) -> Result<cremer::Summary, String> {
    let cfg = input::bit_budget_from_env()?;
    if args.out.as_os_str() == "-" {
        let stdout = io::stdout();
        let mut lock = stdout.lock();
        cremer::run_demo(args, &cfg, &mut lock)
    } else {
        let f = File::create(&args.out).map_err(|e| format!("{}: {e}", args.out.display()))?;
        let mut w = BufWriter::new(f);
        let s = cremer::run_demo(args, &cfg, &mut w)?;
        w.flush().map_err(|e| e.to_string())?;
        Ok(s)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.cmd {
        Cmd::Classify { spec, digits, format } => match commands::run_classify(&spec, digits) {
            Ok(r) => {
                emit(&r, format);
                ExitCode::from(r.exit_code() as u8)
            }
            Err(e) => input_error(&e),
        },
        Cmd::Eval {
            spec,
            terms,
            digits,
            format,
        } => match commands::run_eval(&spec, terms, digits) {
            Ok(r) => {
                emit(&r, format);
                ExitCode::from(r.exit_code() as u8)
            }
            Err(e) => input_error(&e),
        },
        Cmd::DemoCremer(args) => {
            eprintln!("note: {}", cremer::DISCLAIMER);
            match demo(&args) {
                Ok(s) => {
                    eprintln!("theta = {}", s.theta);
                    eprintln!("wrote {} rows", s.rows);
                    for (seed, step) in &s.escaped {
                        eprintln!("seed {seed} escaped at step {step}");
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(&e),
            }
        }
        Cmd::List { format } => {
            let mut text = commands::run_list(format == Format::Json);
            if format == Format::Json {
                text.push('\n');
            }
            write_stdout(&text);
            ExitCode::SUCCESS
        }
    }
}
