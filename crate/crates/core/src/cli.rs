//! Command-line front end.
//!
//! Exit status is 0 on success, 1 on malformed arguments or invalid input,
//! and 2 when a computation would exceed a resource cap.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{frelation_scan, gap, sample_processes};
use crate::channel::{BscMixture, ChannelSpec};
use crate::error::Error;
use crate::functional::{eval, Functional};
use crate::np_region::{contains, np_region_of, DEFAULT_TOL};
use crate::polar::{polarize_path, PolarIndex};
use crate::quantize::{construct_code_with, format_sig, polarize_path_quantized, ConstructOptions, QuantizerConfig};

/// Longest polar index accepted on the command line.
pub const MAX_N: usize = 24;

#[derive(Parser, Debug)]
#[command(name = "blackwell-polar", version, about = "Binary-input channel functionals, polar transforms and quantized code construction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print I_f of a channel.
    Eval {
        #[command(flatten)]
        channel: ChannelArg,
        /// Functional, e.g. `capacity`, `moment:r=2`, `bayes-gain:lambda=0.333`.
        #[arg(long, default_value = "capacity")]
        functional: Functional,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Print the BSC mixture reached along a branch string.
    Polarize {
        #[command(flatten)]
        channel: ChannelArg,
        /// Branch string, first step leftmost (0 = minus, 1 = plus).
        #[arg(long)]
        index: PolarIndex,
        /// Quantize with D = 2^-L before and after every step.
        #[arg(long = "L")]
        levels: Option<u32>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Quantized construction of all 2^n channels.
    Construct {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long)]
        n: usize,
        #[arg(long = "L")]
        levels: u32,
        /// Per-index CSV report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Classify the f-relation of a functional over BSC pairs.
    FrelScan {
        #[arg(long)]
        functional: Functional,
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the M_2 gap function on a square grid over [0, 1/2]^2.
    GapGrid {
        #[arg(long, default_value_t = 128)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Neyman-Pearson region, optionally compared with a second channel.
    NpRegion {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long)]
        channel2: Option<String>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded sample paths of the polarization process.
    ProcessSim {
        #[command(flatten)]
        channel: ChannelArg,
        #[arg(long, default_value = "capacity")]
        functional: Functional,
        #[arg(long)]
        n: usize,
        /// First seed; trajectory k uses seed + k.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long = "L")]
        levels: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct ChannelArg {
    /// Channel as JSON, or `@path` to read it from a file.
    #[arg(long)]
    channel: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
}

fn parse_channel(text: &str) -> anyhow::Result<ChannelSpec> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading channel file {path}"))?,
        None => text.to_owned(),
    };
    Ok(ChannelSpec::from_json(&body)?)
}

fn check_n(n: usize) -> anyhow::Result<()> {
    if n > MAX_N {
        return Err(Error::Domain { field: "n", value: n as f64, range: "integers 0..=24" }.into());
    }
    Ok(())
}

fn mixture_json(c: &BscMixture) -> String {
    serde_json::to_string(&ChannelSpec::from_mixture(c)).expect("finite values")
}

/// Write to `path`, or to `stdout` when no path is given.
fn emit(path: Option<&Path>, stdout: &mut dyn Write, body: &[u8]) -> anyhow::Result<()> {
    match path {
        Some(p) => {
            let mut f = BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?);
            f.write_all(body)?;
            f.flush()?;
        }
        None => stdout.write_all(body)?,
    }
    Ok(())
}

fn in_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> anyhow::Result<T> {
    match threads {
        None => Ok(job()),
        Some(0) => bail!("invalid threads: must be at least 1"),
        Some(t) => Ok(rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(job)),
    }
}

fn execute(cmd: Command, stdout: &mut dyn Write) -> anyhow::Result<()> {
    match cmd {
        Command::Eval { channel, functional, format } => {
            let m = parse_channel(&channel.channel)?.to_measure()?;
            let v = eval(&m, &functional);
            match format {
                Format::Csv => writeln!(stdout, "{v:.6}")?,
                Format::Json => writeln!(stdout, "{}", json!({"functional": functional.to_string(), "value": v}))?,
            }
        }
        Command::Polarize { channel, index, levels, format } => {
            check_n(index.len())?;
            let c = parse_channel(&channel.channel)?.to_mixture()?;
            let out = match levels {
                None => polarize_path(&c, &index)?,
                Some(l) => polarize_path_quantized(&c, &index, QuantizerConfig::new(l)?).0,
            };
            match format {
                Format::Json => writeln!(stdout, "{}", mixture_json(&out))?,
                Format::Csv => {
                    writeln!(stdout, "lambda,p")?;
                    for k in out.components() {
                        writeln!(stdout, "{},{}", format_sig(k.lambda), format_sig(k.p))?;
                    }
                }
            }
        }
        Command::Construct { channel, n, levels, out, threads } => {
            check_n(n)?;
            let c = parse_channel(&channel.channel)?.to_mixture()?;
            let cfg = QuantizerConfig::new(levels)?;
            let report = construct_code_with(&c, n, cfg, &ConstructOptions { threads })?;
            if let Some(path) = out {
                let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                report.write_csv(BufWriter::new(f))?;
            }
            writeln!(stdout, "{}", serde_json::to_string(&report.summary())?)?;
        }
        Command::FrelScan { functional, grid, tol, threads, out } => {
            let verdict = in_pool(threads, || frelation_scan(&functional, grid, tol))??;
            let mut body = serde_json::to_vec(&verdict)?;
            body.push(b'\n');
            emit(out.as_deref(), stdout, &body)?;
        }
        Command::GapGrid { grid, out } => {
            if grid < 1 {
                return Err(Error::Domain { field: "grid", value: 0.0, range: "positive integers" }.into());
            }
            let step = 0.5 / grid as f64;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["p", "q", "gap"])?;
            for i in 0..=grid {
                for j in 0..=grid {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    let (p, q) = (i as f64 * step, j as f64 * step);
                    w.write_record([format_sig(p), format_sig(q), format_sig(gap(p, q)?)])?;
                }
            }
            emit(out.as_deref(), stdout, &w.into_inner()?)?;
        }
        Command::NpRegion { channel, channel2, tol, out } => {
            let r1 = np_region_of(&parse_channel(&channel.channel)?.to_measure()?);
            let value = match channel2 {
                None => serde_json::to_value(&r1)?,
                Some(text) => {
                    let r2 = np_region_of(&parse_channel(&text)?.to_measure()?);
                    json!({
                        "upper_boundary": r1.upper_boundary,
                        "upper_boundary2": r2.upper_boundary,
                        "contains": contains(&r1, &r2, tol),
                        "contained_in": contains(&r2, &r1, tol),
                    })
                }
            };
            let mut body = serde_json::to_vec(&value)?;
            body.push(b'\n');
            emit(out.as_deref(), stdout, &body)?;
        }
        Command::ProcessSim { channel, functional, n, seed, samples, levels, out } => {
            check_n(n)?;
            let c = parse_channel(&channel.channel)?.to_mixture()?;
            let cfg = levels.map(QuantizerConfig::new).transpose()?;
            let seeds = (0..samples).map(|k| seed.wrapping_add(k));
            let (trajectories, _) = sample_processes(&c, &functional, n, seeds, cfg)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["seed", "step", "bit", "value"])?;
            for t in &trajectories {
                for (k, v) in t.values.iter().enumerate() {
                    let bit = if k == 0 { String::new() } else { t.bits[k - 1].to_string() };
                    w.write_record([t.seed.to_string(), k.to_string(), bit, format_sig(*v)])?;
                }
            }
            emit(out.as_deref(), stdout, &w.into_inner()?)?;
        }
    }
    Ok(())
}

/// Parse `argv` (program name first), run the command and return the exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(err) if err.is_resource_cap() => 2,
                _ => 1,
            }
        }
    }
}
