//! Command line for the forward-scatter library.
//!
//! Subcommands:
//!   power      Monte Carlo power study over mixture alternatives
//!   breakdown  empirical breakdown-point sweep
//!   test       run T1/T2 on a CSV dataset (exit 0 = accept, 3 = reject)
//!
//! Exit codes: 0 success/accept, 1 usage error, 2 data error, 3 reject.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use forward_scatter::elliptical::DensityGenerator;
use forward_scatter::error::Error;
use forward_scatter::harness::{
    emit, emit_manifest, render_breakdown, render_power_table, run_breakdown_study,
    run_power_study, test_dataset, BreakdownConfig, DatasetTestOptions, EmitFormat,
    ExperimentConfig, Scenario,
};
use forward_scatter::rng::RngSeed;
use forward_scatter::scatter_tests::TestKind;

#[derive(Parser)]
#[command(name = "forward-scatter", version, about = "Robust multivariate scatter tests via the forward search")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate power of the scatter tests over a grid of mixture weights.
    Power(PowerArgs),
    /// Probe the empirical breakdown fraction of the forward-search estimator.
    Breakdown(BreakdownArgs),
    /// Test H0: Sigma = Sigma0 on a CSV dataset.
    Test(TestArgs),
}

#[derive(Args)]
struct PowerArgs {
    /// Flat key=value config file; flags override file entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// gaussian-gaussian | cauchy-cauchy | gaussian-cauchy
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// Comma-separated mixture weights, e.g. 0,0.1,0.2
    #[arg(long)]
    betas: Option<String>,
    /// Scatter scale of the contaminating component.
    #[arg(long = "alt-scale")]
    alt_scale: Option<f64>,
    /// Comma-separated subset of t1,t2.
    #[arg(long)]
    tests: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "mc-draws")]
    mc_draws: Option<usize>,
    /// Output file; stdout when omitted. A .manifest.json lands alongside.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct BreakdownArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    d: Option<usize>,
    /// Comma-separated contamination fractions; a gamma-aware grid by default.
    #[arg(long)]
    fractions: Option<String>,
    /// Comma-separated outlier magnitudes.
    #[arg(long)]
    magnitudes: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv | json
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct TestArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Headerless CSV, one observation per row.
    #[arg(long)]
    data: Option<PathBuf>,
    /// identity | scaled:<c> | path to a d x d CSV matrix.
    #[arg(long)]
    sigma0: Option<String>,
    /// t1 | t2
    #[arg(long = "test")]
    which: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    /// auto | a numeric kurtosis parameter.
    #[arg(long)]
    kappa: Option<String>,
    /// gaussian | cauchy | t:<nu> — radial law for the consistency factor.
    #[arg(long)]
    generator: Option<String>,
    #[arg(long = "mc-draws")]
    mc_draws: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders help/version through the error path too
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Power(args) => cmd_power(args),
        Command::Breakdown(args) => cmd_breakdown(args),
        Command::Test(args) => cmd_test(args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Data { .. } | Error::Io(_) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

/// key=value lines; '#' starts a comment.
fn read_config_file(path: &Path) -> Result<HashMap<String, String>, Error> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Data {
                line: idx + 1,
                message: format!("expected key=value, got '{line}'"),
            });
        };
        map.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn file_get<T: FromStr>(map: &HashMap<String, String>, key: &str) -> Result<Option<T>, Error> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw
            .parse::<T>()
            .map(Some)
            .map_err(|_| Error::invalid(format!("config key '{key}': bad value '{raw}'"))),
    }
}

fn parse_list_f64(s: &str, what: &str) -> Result<Vec<f64>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad {what} entry '{}'", p.trim())))
        })
        .collect()
}

fn parse_tests(s: &str) -> Result<Vec<TestKind>, Error> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<TestKind>())
        .collect()
}

fn parse_generator(s: &str) -> Result<DensityGenerator, Error> {
    match s.to_ascii_lowercase().as_str() {
        "gaussian" | "normal" => Ok(DensityGenerator::Gaussian),
        "cauchy" => Ok(DensityGenerator::cauchy()),
        other => {
            if let Some(nu) = other.strip_prefix("t:") {
                let nu: f64 = nu
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad generator '{s}'")))?;
                let gen = DensityGenerator::StudentT { nu };
                gen.validate()?;
                Ok(gen)
            } else {
                Err(Error::invalid(format!("unknown generator '{s}'")))
            }
        }
    }
}

fn cmd_power(args: PowerArgs) -> Result<ExitCode, Error> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => HashMap::new(),
    };
    let scenario: Scenario = args
        .scenario
        .or_else(|| file.get("scenario").cloned())
        .unwrap_or_else(|| "gaussian-gaussian".into())
        .parse()?;
    let mut cfg = ExperimentConfig::new(scenario);
    if let Some(v) = args.n.or(file_get(&file, "n")?) {
        cfg.n = v;
    }
    if let Some(v) = args.d.or(file_get(&file, "d")?) {
        cfg.d = v;
    }
    if let Some(v) = args.reps.or(file_get(&file, "reps")?) {
        cfg.reps = v;
    }
    if let Some(v) = args.alpha.or(file_get(&file, "alpha")?) {
        cfg.alpha = v;
    }
    if let Some(v) = args.gamma.or(file_get(&file, "gamma")?) {
        cfg.gamma = v;
    }
    if let Some(v) = args.alt_scale.or(file_get(&file, "alt-scale")?) {
        cfg.sigma_alt_scale = v;
    }
    if let Some(v) = args.seed.or(file_get(&file, "seed")?) {
        cfg.master_seed = RngSeed(v);
    }
    if let Some(v) = args.mc_draws.or(file_get(&file, "mc-draws")?) {
        cfg.mc_draws = v;
    }
    if let Some(raw) = args.betas.or_else(|| file.get("betas").cloned()) {
        cfg.betas = parse_list_f64(&raw, "beta")?;
    }
    if let Some(raw) = args.tests.or_else(|| file.get("tests").cloned()) {
        cfg.tests = parse_tests(&raw)?;
    }
    let format: EmitFormat = args
        .format
        .or_else(|| file.get("format").cloned())
        .unwrap_or_else(|| "csv".into())
        .parse()?;

    let (table, manifest) = run_power_study(&cfg)?;
    let rendered = render_power_table(&table, format);
    match &args.out {
        Some(path) => {
            emit(&rendered, path)?;
            emit_manifest(&manifest, path)?;
            eprintln!("wrote {} rows to {}", table.rows.len(), path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_breakdown(args: BreakdownArgs) -> Result<ExitCode, Error> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => HashMap::new(),
    };
    let mut cfg = BreakdownConfig::new();
    if let Some(v) = args.gamma.or(file_get(&file, "gamma")?) {
        cfg.gamma = v;
    }
    if let Some(v) = args.n.or(file_get(&file, "n")?) {
        cfg.n = v;
    }
    if let Some(v) = args.d.or(file_get(&file, "d")?) {
        cfg.d = v;
    }
    if let Some(v) = args.seed.or(file_get(&file, "seed")?) {
        cfg.master_seed = RngSeed(v);
    }
    if let Some(raw) = args.fractions.or_else(|| file.get("fractions").cloned()) {
        cfg.fractions = Some(parse_list_f64(&raw, "fraction")?);
    }
    if let Some(raw) = args.magnitudes.or_else(|| file.get("magnitudes").cloned()) {
        cfg.magnitudes = parse_list_f64(&raw, "magnitude")?;
    }
    let format: EmitFormat = args
        .format
        .or_else(|| file.get("format").cloned())
        .unwrap_or_else(|| "csv".into())
        .parse()?;

    let report = run_breakdown_study(&cfg)?;
    let rendered = render_breakdown(&report, format);
    match &args.out {
        Some(path) => {
            emit(&rendered, path)?;
            eprintln!(
                "estimated breakdown fraction {} written to {}",
                report.estimated_breakdown_fraction,
                path.display()
            );
        }
        None => print!("{rendered}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_test(args: TestArgs) -> Result<ExitCode, Error> {
    let file = match &args.config {
        Some(p) => read_config_file(p)?,
        None => HashMap::new(),
    };
    let data_path = args
        .data
        .or_else(|| file.get("data").map(PathBuf::from))
        .ok_or_else(|| Error::invalid("--data is required"))?;
    let which: TestKind = args
        .which
        .or_else(|| file.get("test").cloned())
        .unwrap_or_else(|| "t1".into())
        .parse()?;
    let kappa = match args.kappa.or_else(|| file.get("kappa").cloned()) {
        None => None,
        Some(raw) if raw.eq_ignore_ascii_case("auto") => None,
        Some(raw) => Some(
            raw.parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad --kappa '{raw}'")))?,
        ),
    };
    let generator = match args.generator.or_else(|| file.get("generator").cloned()) {
        None => DensityGenerator::Gaussian,
        Some(raw) => parse_generator(&raw)?,
    };
    let opts = DatasetTestOptions {
        which,
        sigma0_spec: args
            .sigma0
            .or_else(|| file.get("sigma0").cloned())
            .unwrap_or_else(|| "identity".into()),
        alpha: args.alpha.or(file_get(&file, "alpha")?).unwrap_or(0.05),
        gamma: args.gamma.or(file_get(&file, "gamma")?).unwrap_or(0.5),
        kappa,
        generator,
        mc_draws: args.mc_draws.or(file_get(&file, "mc-draws")?).unwrap_or(1_000_000),
        seed: RngSeed(args.seed.or(file_get(&file, "seed")?).unwrap_or(0)),
    };
    let outcome = test_dataset(&data_path, &opts)?;
    println!("{}", serde_json::to_string_pretty(&outcome).expect("serializable"));
    if outcome.reject {
        Ok(ExitCode::from(3))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
