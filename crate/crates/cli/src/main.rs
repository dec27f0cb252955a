use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sawtm::analysis::{predict_coefficients, BatchOptions};
use sawtm::exact::{combine_residues, enumerate_range, EnumerateOptions, Entry, Kind, ResidueFile, Series};
use sawtm::oracle::dfs_count;
use sawtm::tm::engine::DEFAULT_MEMORY_LIMIT;
use sawtm::tm::sweep;
use sawtm::{generate_primes, golden, ProblemSpec};

mod analyze;
mod config;
mod error;

use analyze::AnalyzeArgs;
use config::RunConfig;
use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sawtm", version, about = "Exact enumeration and series analysis of self-avoiding walks and polygons in lattice domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count walks or polygons for a range of sizes.
    Enumerate {
        #[arg(long)]
        problem: String,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = 1)]
        lmin: usize,
        /// Primes per size; derived from a magnitude bound by default.
        #[arg(long)]
        primes: Option<usize>,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Skip the extra-prime consistency check.
        #[arg(long)]
        no_verify: bool,
        #[arg(long)]
        memory_limit: Option<usize>,
        /// Where residue files go (default: next to --out).
        #[arg(long)]
        residue_dir: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild exact counts from residue files.
    Combine {
        #[arg(long, num_args = 1.., required = true)]
        residues: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Append predicted terms to a series.
    Extend {
        #[arg(long)]
        series: PathBuf,
        #[arg(long)]
        terms: usize,
        #[arg(long, default_value_t = 1e-5)]
        cutoff: f64,
        /// Output file (default: rewrite the input).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate asymptotic parameters.
    Analyze(AnalyzeArgs),
    /// Check the engine against the bundled tables and the brute-force oracle.
    Selftest {
        #[arg(long, default_value_t = 8)]
        golden_lmax: usize,
        #[arg(long, default_value_t = 4)]
        oracle_lmax: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn read_series(path: &Path) -> Result<Series, CliError> {
    let text = fs::read_to_string(path)?;
    Series::parse(&text).map_err(|source| CliError::Malformed { path: path.display().to_string(), source })
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn with_config(mut series: Series, config: &RunConfig) -> Series {
    let keys: Vec<&str> = config.entries().iter().map(|(k, _)| k.as_str()).collect();
    series.config.retain(|(k, _)| !keys.contains(&k.as_str()));
    let mut lines: Vec<(String, String)> = config.entries().iter().filter(|(k, _)| k != "problem").cloned().collect();
    lines.append(&mut series.config);
    series.config = lines;
    series
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Enumerate { problem, lmax, lmin, primes, workers, no_verify, memory_limit, residue_dir, out } => {
            let spec: ProblemSpec = problem.parse()?;
            if lmin == 0 || lmin > lmax {
                return Err(CliError::Invalid(format!("bad size range {lmin}..={lmax}")));
            }
            let opts = EnumerateOptions {
                primes,
                workers: workers.max(1),
                verify: !no_verify,
                memory_limit: memory_limit.unwrap_or(DEFAULT_MEMORY_LIMIT),
            };
            let mut config = RunConfig::new("enumerate");
            config
                .set("problem", spec.id())
                .set("lmin", lmin)
                .set("lmax", lmax)
                .set("primes", primes.map_or("auto".to_string(), |p| p.to_string()))
                .set("workers", opts.workers)
                .set("verify", opts.verify)
                .set("memory_limit", opts.memory_limit);
            let (series, files) = enumerate_range(&spec, lmin..=lmax, &opts)?;
            let dir = residue_dir.or_else(|| out.as_ref().map(|o| o.parent().unwrap_or(Path::new("")).to_path_buf()));
            if let Some(dir) = dir {
                if !dir.as_os_str().is_empty() {
                    fs::create_dir_all(&dir)?;
                }
                for mut f in files.into_iter().filter(|f| !f.residues.is_empty()) {
                    f.config = config.entries().to_vec();
                    fs::write(dir.join(format!("{}.{}.res", spec.id(), f.prime)), f.to_text())?;
                }
            }
            emit(out.as_deref(), &with_config(series, &config).to_text())
        }
        Command::Combine { residues, out } => {
            let files = residues
                .iter()
                .map(|p| {
                    let text = fs::read_to_string(p)?;
                    ResidueFile::parse(&text).map_err(|source| CliError::Malformed { path: p.display().to_string(), source })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let series = combine_residues(&files)?;
            let mut config = RunConfig::new("combine");
            config.set("problem", &series.problem).set_list(
                "residues",
                &residues.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
            );
            config.set_list("primes", &files.iter().map(|f| f.prime).collect::<Vec<_>>());
            emit(out.as_deref(), &with_config(series, &config).to_text())
        }
        Command::Extend { series, terms, cutoff, out } => {
            let input = read_series(&series)?;
            let counts = input.exact_values();
            if input.exact().enumerate().any(|(i, e)| e.size != i + 1) {
                return Err(CliError::Invalid("exact entries must be L = 1, 2, … without gaps".into()));
            }
            let opts = BatchOptions::for_prediction(counts.len() + 1);
            let prediction = predict_coefficients(&counts, terms, cutoff, &opts)?;
            if let Some(d) = &prediction.diagnostic {
                eprintln!("{d}");
            }
            let mut config = RunConfig::new("extend");
            config
                .set_path("source", &series)
                .set("terms", terms)
                .set("cutoff", cutoff)
                .set("order", opts.order)
                .set("spread", opts.spread)
                .set("min_terms", opts.min_terms)
                .set("approximants", prediction.approximants);
            let mut extended = input.truncated(usize::MAX);
            for t in &prediction.terms {
                extended.push(Entry { size: t.size, value: t.value.clone(), kind: Kind::Predicted, stderr: Some(t.rel_spread) })?;
            }
            let target = out.unwrap_or(series);
            emit(Some(&target), &with_config(extended, &config).to_text())
        }
        Command::Analyze(args) => {
            let series = read_series(&args.series)?;
            let mut config = RunConfig::new("analyze");
            config.set_path("series", &args.series);
            let report = analyze::run(&series, &args, &mut config)?;
            let mut buf = Vec::new();
            report.write(&config, &mut buf)?;
            emit(args.out.as_deref(), &String::from_utf8(buf).expect("utf-8"))
        }
        Command::Selftest { golden_lmax, oracle_lmax } => selftest(golden_lmax, oracle_lmax),
    }
}

fn selftest(golden_lmax: usize, oracle_lmax: usize) -> Result<(), CliError> {
    let mut failures = 0;
    let mut report = |name: String, ok: Result<(), String>| match ok {
        Ok(()) => println!("PASS {name}"),
        Err(detail) => {
            failures += 1;
            println!("FAIL {name}: {detail}");
        }
    };
    let opts = EnumerateOptions::default();
    for id in golden::ids() {
        let table = golden::series(id).expect("bundled");
        let spec: ProblemSpec = id.parse()?;
        let lmax = golden_lmax.min(table.entries.len());
        let outcome = enumerate_range(&spec, 1..=lmax, &opts).map_err(|e| e.to_string()).and_then(|(s, _)| {
            match s.entries.iter().zip(&table.entries).find(|(a, b)| a.value != b.value) {
                Some((a, b)) => Err(format!("L={}: got {}, table has {}", a.size, a.value, b.value)),
                None => Ok(()),
            }
        });
        report(format!("golden {id} L<={lmax}"), outcome);
    }
    let prime = generate_primes(1)[0];
    for spec in ProblemSpec::all() {
        let outcome = (1..=oracle_lmax).try_for_each(|l| {
            let expected = dfs_count(&spec, l).map_err(|e| e.to_string())? % prime;
            let got = sweep(&spec, l, prime, 1).map_err(|e| e.to_string())?;
            if num_bigint::BigUint::from(got) == expected {
                Ok(())
            } else {
                Err(format!("L={l}: sweep {got}, oracle {expected}"))
            }
        });
        report(format!("oracle {} L<={oracle_lmax}", spec.id()), outcome);
    }
    if failures == 0 {
        Ok(())
    } else {
        Err(CliError::SelfTest(failures))
    }
}
