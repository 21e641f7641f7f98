use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use erasure_qec::codes::{hgp, read_matrix_market, save, surface_code};
use erasure_qec::sim::{
    parse_decoders, parse_rates, run_sweep, verify, write_csv, CodeSource, DecoderKind, SweepConfig,
};
use erasure_qec::{BitVector, CssCode, ErasureInstance, ErrorType};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "erasure-qec",
    version,
    about = "Erasure decoding for CSS codes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Surface,
    Hgp,
}

#[derive(Subcommand)]
enum Command {
    /// Build a code and write it as a bundle directory.
    Construct {
        #[arg(long, value_enum)]
        code: Family,
        #[arg(long, required_if_eq("code", "surface"))]
        distance: Option<usize>,
        #[arg(long, required_if_eq("code", "hgp"))]
        h1: Option<PathBuf>,
        #[arg(long, required_if_eq("code", "hgp"))]
        h2: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep decoders over erasure rates and append rows to a CSV file.
    Simulate {
        /// surface:<d>, hgp:shipped, hgp-random:<m>x<n>:<seed> or a bundle directory
        #[arg(long)]
        code: String,
        #[arg(long, default_value = "inact")]
        decoders: String,
        /// start:stop:step or a comma-separated list
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-check the ML decoders against the rank oracle.
    Verify {
        #[arg(long)]
        code: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = default_workers())]
        workers: usize,
    },
    /// Decode a single erasure pattern and print the estimated supports.
    Decode {
        #[arg(long)]
        code: String,
        #[arg(long)]
        erasures: PathBuf,
        #[arg(long)]
        syndrome_x: PathBuf,
        #[arg(long)]
        syndrome_z: PathBuf,
        #[arg(long, default_value = "inact")]
        decoder: String,
    },
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn load_code(source: &str) -> Result<CssCode> {
    source
        .parse::<CodeSource>()?
        .build()
        .with_context(|| format!("loading code {source}"))
}

/// One 0-based index per line; blank lines and `#` comments are skipped.
fn read_indices(path: &Path, bound: usize) -> Result<Vec<usize>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v: usize = line
            .parse()
            .with_context(|| format!("{}:{}: expected an index", path.display(), i + 1))?;
        if v >= bound {
            bail!(
                "{}:{}: index {v} out of range 0..{bound}",
                path.display(),
                i + 1
            );
        }
        out.push(v);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn read_mtx(path: &Path) -> Result<erasure_qec::SparseBitMatrix> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(read_matrix_market(&text, path)?)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Construct {
            code,
            distance,
            h1,
            h2,
            out,
        } => {
            let built = match code {
                Family::Surface => surface_code(distance.expect("required by clap"))?,
                Family::Hgp => hgp(
                    &read_mtx(&h1.expect("required by clap"))?,
                    &read_mtx(&h2.expect("required by clap"))?,
                )?,
            };
            save(&built, &out)?;
            println!(
                "{} n={} k={} -> {}",
                built.name(),
                built.n(),
                built.k(),
                out.display()
            );
        }
        Command::Simulate {
            code,
            decoders,
            p,
            trials,
            seed,
            workers,
            out,
        } => {
            let code = load_code(&code)?;
            let config = SweepConfig {
                decoders: parse_decoders(&decoders)?,
                rates: parse_rates(&p)?,
                trials,
                seed,
                workers,
            };
            let rows = run_sweep(&code, &config)?;
            write_csv(&out, &rows)?;
            for row in &rows {
                eprintln!(
                    "{} {} p={} failure_rate={:.3e} mean_inactivations={:.4}",
                    row.code, row.decoder, row.p, row.failure_rate, row.mean_inactivations
                );
            }
        }
        Command::Verify {
            code,
            p,
            trials,
            seed,
            workers,
        } => {
            let code = load_code(&code)?;
            let report = verify(&code, p, trials, seed, workers)?;
            println!("{} {report}", code.name());
            if report.hard_violations() > 0 {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Decode {
            code,
            erasures,
            syndrome_x,
            syndrome_z,
            decoder,
        } => {
            let code = load_code(&code)?;
            let decoder: DecoderKind = decoder.parse()?;
            if decoder.needs_lattice() && code.lattice().is_none() {
                bail!("decoder {decoder} needs a planar surface code");
            }
            let erased = read_indices(&erasures, code.n())?;
            let s_x = read_indices(&syndrome_x, code.hz().num_rows())?;
            let s_z = read_indices(&syndrome_z, code.hx().num_rows())?;
            let zeros = BitVector::zeros(code.n());
            let inst = ErasureInstance {
                erased,
                x_error: zeros.clone(),
                z_error: zeros,
                s_x: BitVector::from_support(code.hz().num_rows(), s_x),
                s_z: BitVector::from_support(code.hx().num_rows(), s_z),
            };
            for (label, side) in [("x", ErrorType::X), ("z", ErrorType::Z)] {
                let res = decoder.decode(&code, &inst, side)?;
                let support: Vec<String> =
                    res.estimate.iter_ones().map(|q| q.to_string()).collect();
                println!("{label}: {}", support.join(" "));
                println!(
                    "{label}-status: {:?} inactivations={} core_dim={} fixed_bits={} hard_guesses={}",
                    res.status,
                    res.stats.num_inactivations,
                    res.stats.core_dim,
                    res.stats.num_fixed_bits,
                    res.stats.num_hard_guesses
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
