mod format;
mod verify;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use paulimem::analysis::{critical_memory_with_grid, entropy_report, mu_grid, sweep, DEFAULT_GRID_POINTS, DEFAULT_TOL};
use paulimem::oracle::{encode_state, output_spectrum_dense};
use paulimem::spectrum::{ghz_spectrum, separable_spectrum};
use paulimem::{ChannelParams, Encoding, Error, Level, DEFAULT_DENSE_CAP};
use serde::Serialize;

use crate::format::{
    num, round12, write_critical_csv, write_critical_json, write_json, write_reports_csv, write_reports_json,
};

#[derive(Parser)]
#[command(
    name = "paulimem",
    version,
    about = "Output entropy of qubit strings through a Pauli channel with memory"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Output format.
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv, global = true)]
    format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Largest string length allowed on the dense path.
    #[arg(long, env = "PAULIMEM_DENSE_CAP", default_value_t = DEFAULT_DENSE_CAP, global = true)]
    dense_cap: usize,
    /// Lift the dense-path cap.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy and capacity bound for one encoding.
    Entropy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value = "sep")]
        encoding: String,
    },
    /// Entropies over a memory grid, one block of rows per encoding.
    Sweep {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        /// START,STOP,COUNT with both endpoints included.
        #[arg(long, value_parser = parse_grid, default_value = "0,1,101")]
        mu_grid: Grid,
        #[arg(long, value_delimiter = ',', default_value = "sep,ghz")]
        encodings: Vec<String>,
    },
    /// Memory at which the GHZ encoding starts to beat the separable one.
    Critical {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
    },
    /// Output eigenvalues with multiplicities.
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long, default_value = "sep")]
        encoding: String,
    },
    /// Cross-check closed forms against the dense oracle and print a JSON summary.
    Verify {
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 20_240_601)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<verify::Fault>,
    },
}

#[derive(Clone, Copy, Debug)]
struct Grid {
    start: f64,
    stop: f64,
    count: usize,
}

fn parse_grid(s: &str) -> Result<Grid, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [start, stop, count] = parts[..] else {
        return Err("expected START,STOP,COUNT".into());
    };
    let f = |x: &str| x.parse::<f64>().map_err(|e| format!("{x}: {e}"));
    Ok(Grid {
        start: f(start)?,
        stop: f(stop)?,
        count: count.parse().map_err(|e| format!("{count}: {e}"))?,
    })
}

enum Failure {
    Lib(Error),
    Io(io::Error),
    Verify,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn parse_encodings(specs: &[String]) -> Result<Vec<Encoding>, Error> {
    specs.iter().map(|s| s.trim().parse()).collect()
}

#[derive(Serialize)]
struct SpectrumRow {
    eigenvalue: f64,
    multiplicity: u64,
}

#[derive(Serialize)]
struct SpectrumDoc {
    n: usize,
    p: f64,
    mu: f64,
    encoding: String,
    levels: Vec<SpectrumRow>,
}

fn spectrum(
    out: &mut dyn Write,
    fmt: OutputFormat,
    n: usize,
    p: f64,
    mu: f64,
    enc: &Encoding,
    cap: usize,
) -> Result<(), Failure> {
    enc.check(n)?;
    let ch = ChannelParams::symmetric(p, mu)?;
    let levels: Box<dyn Iterator<Item = Level>> = match enc {
        Encoding::Separable => Box::new(separable_spectrum(n, &ch)?),
        Encoding::Ghz => Box::new(ghz_spectrum(n, &ch)?),
        _ => Box::new(output_spectrum_dense(&encode_state(enc, n)?, &ch, cap)?.into_iter()),
    };
    match fmt {
        OutputFormat::Csv => {
            writeln!(out, "{}", format::SPECTRUM_HEADER)?;
            let prefix = format!("{n},{},{},{enc}", num(p), num(mu));
            for l in levels {
                writeln!(out, "{prefix},{},{}", num(l.value), l.multiplicity)?;
            }
        }
        OutputFormat::Json => {
            let doc = SpectrumDoc {
                n,
                p: round12(p),
                mu: round12(mu),
                encoding: enc.to_string(),
                levels: levels
                    .map(|l| SpectrumRow {
                        eigenvalue: round12(l.value),
                        multiplicity: l.multiplicity,
                    })
                    .collect(),
            };
            write_json(out, &doc)?;
        }
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let Common {
        format: fmt,
        output,
        dense_cap,
        force,
    } = cli.common;
    let cap = if force { usize::MAX } else { dense_cap };
    let mut out: Box<dyn Write> = match &output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match cli.command {
        Command::Entropy { n, p, mu, encoding } => {
            let enc: Encoding = encoding.trim().parse()?;
            let report = entropy_report(n, p, mu, &enc, cap)?;
            match fmt {
                OutputFormat::Csv => write_reports_csv(&mut out, &[report])?,
                OutputFormat::Json => write_reports_json(&mut out, &[report])?,
            }
        }
        Command::Sweep {
            n,
            p,
            mu_grid: g,
            encodings,
        } => {
            let encodings = parse_encodings(&encodings)?;
            let grid = mu_grid(g.start, g.stop, g.count)?;
            let rows = sweep(n, p, &grid, &encodings, cap)?;
            match fmt {
                OutputFormat::Csv => write_reports_csv(&mut out, &rows)?,
                OutputFormat::Json => write_reports_json(&mut out, &rows)?,
            }
        }
        Command::Critical { n, p, tol, grid_points } => {
            let rows = n
                .iter()
                .map(|&n| critical_memory_with_grid(n, p, tol, grid_points))
                .collect::<Result<Vec<_>, _>>()?;
            for r in rows.iter().filter(|r| r.multiple_crossings) {
                eprintln!(
                    "warning: n={} has {} crossings, reporting the smallest",
                    r.n,
                    r.crossings.len()
                );
            }
            match fmt {
                OutputFormat::Csv => write_critical_csv(&mut out, &rows)?,
                OutputFormat::Json => write_critical_json(&mut out, &rows)?,
            }
        }
        Command::Spectrum { n, p, mu, encoding } => {
            let enc: Encoding = encoding.trim().parse()?;
            spectrum(&mut out, fmt, n, p, mu, &enc, cap)?;
        }
        Command::Verify {
            n_max,
            samples,
            seed,
            inject_fault,
        } => {
            let opts = verify::VerifyOptions {
                n_max,
                samples,
                seed,
                dense_cap: cap,
                fault: inject_fault,
            };
            let summary = verify::run(&opts)?;
            write_json(&mut out, &summary)?;
            out.flush()?;
            if !summary.passed {
                for f in &summary.failures {
                    eprintln!("FAIL {} {}: {}", f.suite, f.check, f.detail);
                }
                return Err(Failure::Verify);
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verify) => {
            eprintln!("error: verification failed");
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) if e.is_cap_exceeded() => {
            eprintln!("error: {e} (pass --force to lift the cap)");
            ExitCode::from(3)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
