//! Config-driven experiment runner: power grids over mixture alternatives,
//! breakdown sweeps, single-dataset tests, and deterministic CSV/JSON output
//! with a run manifest.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use crate::elliptical::{DensityGenerator, EllipticalModel, MixtureModel};
use crate::error::{Error, Result};
use crate::estimators::ForwardSearchConfig;
use crate::matrix::{Matrix, SpdMatrix};
use crate::rng::RngSeed;
use crate::robustness::{default_fractions, empirical_breakdown, BreakdownReport};
use crate::scatter_tests::{power_rejections, run_test, KappaPolicy, TestKind, TestOutcome, TestSpec};

/// Simulation scenario: which family the null and the contaminating component
/// come from. The null scatter is always I_d; the alternative component has
/// scatter `sigma_alt_scale`·I_d.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scenario {
    GaussianGaussian,
    CauchyCauchy,
    GaussianCauchy,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::GaussianGaussian => "gaussian-gaussian",
            Scenario::CauchyCauchy => "cauchy-cauchy",
            Scenario::GaussianCauchy => "gaussian-cauchy",
        }
    }

    /// Generator of the null model; critical values are calibrated against it.
    pub fn null_generator(self) -> DensityGenerator {
        match self {
            Scenario::GaussianGaussian | Scenario::GaussianCauchy => DensityGenerator::Gaussian,
            Scenario::CauchyCauchy => DensityGenerator::cauchy(),
        }
    }

    pub fn alternative_generator(self) -> DensityGenerator {
        match self {
            Scenario::GaussianGaussian => DensityGenerator::Gaussian,
            Scenario::CauchyCauchy | Scenario::GaussianCauchy => DensityGenerator::cauchy(),
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian-gaussian" | "gg" => Ok(Scenario::GaussianGaussian),
            "cauchy-cauchy" | "cc" => Ok(Scenario::CauchyCauchy),
            "gaussian-cauchy" | "gc" => Ok(Scenario::GaussianCauchy),
            other => Err(Error::invalid(format!(
                "unknown scenario '{other}' (expected gaussian-gaussian, cauchy-cauchy or gaussian-cauchy)"
            ))),
        }
    }
}

/// Configuration of a power study.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub d: usize,
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    pub gamma: f64,
    pub betas: Vec<f64>,
    pub sigma_alt_scale: f64,
    pub tests: Vec<TestKind>,
    pub master_seed: RngSeed,
    pub mc_draws: usize,
}

impl ExperimentConfig {
    pub fn new(scenario: Scenario) -> Self {
        ExperimentConfig {
            scenario,
            d: 4,
            n: 100,
            reps: 1000,
            alpha: 0.05,
            gamma: 0.5,
            betas: (0..=10).map(|i| i as f64 / 10.0).collect(),
            sigma_alt_scale: 5.0,
            tests: vec![TestKind::T1, TestKind::T2],
            master_seed: RngSeed(0),
            mc_draws: 1_000_000,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n == 0 {
            return Err(Error::invalid("d and n must be positive"));
        }
        if self.reps < 100 {
            return Err(Error::invalid("power estimates need reps >= 100"));
        }
        if self.betas.iter().any(|b| !(0.0..=1.0).contains(b)) {
            return Err(Error::invalid("betas must lie in [0, 1]"));
        }
        if self.betas.is_empty() || self.tests.is_empty() {
            return Err(Error::invalid("need at least one beta and one test"));
        }
        if !self.sigma_alt_scale.is_finite() || self.sigma_alt_scale <= 0.0 {
            return Err(Error::invalid("alternative scale must be positive"));
        }
        if !(0.0 < self.alpha && self.alpha < 1.0) {
            return Err(Error::invalid("alpha must be in (0,1)"));
        }
        if !(0.0 < self.gamma && self.gamma <= 1.0) {
            return Err(Error::invalid("gamma must be in (0,1]"));
        }
        if self.mc_draws < 10_000 {
            return Err(Error::invalid("mc_draws must be at least 10^4"));
        }
        Ok(())
    }

    /// Stable textual form; the manifest hash is computed over it.
    fn canonical_string(&self) -> String {
        let mut s = String::new();
        let _ = write!(
            s,
            "scenario={};d={};n={};reps={};alpha={};gamma={};alt={};mc={};seed={};betas=",
            self.scenario.label(),
            self.d,
            self.n,
            self.reps,
            self.alpha,
            self.gamma,
            self.sigma_alt_scale,
            self.mc_draws,
            self.master_seed.0
        );
        for b in &self.betas {
            let _ = write!(s, "{b},");
        }
        let _ = write!(s, ";tests=");
        for t in &self.tests {
            let _ = write!(s, "{},", t.label());
        }
        s
    }

    pub fn config_hash(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.canonical_string().as_bytes() {
            h ^= u64::from(*b);
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        h
    }

    fn mixture(&self, beta: f64) -> Result<MixtureModel> {
        let f = EllipticalModel::standard(self.d, 1.0, self.scenario.null_generator())?;
        let g = EllipticalModel::standard(
            self.d,
            self.sigma_alt_scale,
            self.scenario.alternative_generator(),
        )?;
        MixtureModel::new(beta, f, g)
    }

    fn row_seed(&self, test: TestKind, beta: f64) -> RngSeed {
        self.master_seed
            .derive_str(test.label())
            .derive_str(self.scenario.label())
            .derive(beta.to_bits())
    }

    fn test_spec(&self, test: TestKind) -> TestSpec {
        let generator = self.scenario.null_generator();
        TestSpec {
            sigma0: SpdMatrix::identity(self.d),
            alpha: self.alpha,
            gamma: self.gamma,
            kappa: KappaPolicy::default_for(test, generator),
            generator,
            mc_draws: self.mc_draws,
            seed: self.master_seed,
        }
    }
}

/// One (test, beta) row of a power table.
#[derive(Debug, Clone, Serialize)]
pub struct PowerRow {
    pub test: TestKind,
    pub scenario: Scenario,
    pub beta: f64,
    pub power: f64,
    pub se: f64,
    pub reps: usize,
    pub n: usize,
    pub d: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub seed: u64,
}

/// Power estimates over the (test, beta) grid.
#[derive(Debug, Clone, Serialize)]
pub struct PowerTable {
    pub rows: Vec<PowerRow>,
}

impl PowerTable {
    pub fn lookup(&self, test: TestKind, beta: f64) -> Option<&PowerRow> {
        self.rows.iter().find(|r| r.test == test && (r.beta - beta).abs() < 1e-12)
    }

    /// CSV with the fixed schema
    /// `test,scenario,beta,power,se,reps,n,d,gamma,alpha,seed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("test,scenario,beta,power,se,reps,n,d,gamma,alpha,seed\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{:.6},{},{},{},{},{},{}",
                r.test.label(),
                r.scenario.label(),
                r.beta,
                r.power,
                r.se,
                r.reps,
                r.n,
                r.d,
                r.gamma,
                r.alpha,
                r.seed
            );
        }
        out
    }
}

/// Provenance record for a run: config echo + hash, version, wall clock, and
/// the derived per-row seeds. Re-running the config reproduces every number.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub config: ExperimentConfig,
    pub config_hash: String,
    pub version: String,
    pub wall_clock_seconds: f64,
    pub row_seeds: Vec<RowSeed>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RowSeed {
    pub test: String,
    pub beta: f64,
    pub seed: u64,
}

/// Run the full power grid of a config.
pub fn run_power_study(cfg: &ExperimentConfig) -> Result<(PowerTable, RunManifest)> {
    cfg.validate()?;
    let started = Instant::now();
    let mut rows = Vec::with_capacity(cfg.tests.len() * cfg.betas.len());
    let mut row_seeds = Vec::new();
    for &test in &cfg.tests {
        let spec = cfg.test_spec(test);
        for &beta in &cfg.betas {
            let mix = cfg.mixture(beta)?;
            let row_seed = cfg.row_seed(test, beta);
            let rejections = power_rejections(&mix, test, &spec, cfg.n, cfg.reps, row_seed)?;
            let power = rejections as f64 / cfg.reps as f64;
            let se = (power * (1.0 - power) / cfg.reps as f64).sqrt();
            rows.push(PowerRow {
                test,
                scenario: cfg.scenario,
                beta,
                power,
                se,
                reps: cfg.reps,
                n: cfg.n,
                d: cfg.d,
                gamma: cfg.gamma,
                alpha: cfg.alpha,
                seed: row_seed.0,
            });
            row_seeds.push(RowSeed { test: test.label().into(), beta, seed: row_seed.0 });
        }
    }
    let manifest = RunManifest {
        config: cfg.clone(),
        config_hash: format!("{:016x}", cfg.config_hash()),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        row_seeds,
    };
    Ok((PowerTable { rows }, manifest))
}

/// Configuration of a breakdown sweep.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownConfig {
    pub d: usize,
    pub n: usize,
    pub gamma: f64,
    pub fractions: Option<Vec<f64>>,
    pub magnitudes: Vec<f64>,
    pub master_seed: RngSeed,
}

impl BreakdownConfig {
    pub fn new() -> Self {
        BreakdownConfig {
            d: 4,
            n: 100,
            gamma: 0.5,
            fractions: None,
            magnitudes: vec![1e2, 1e4, 1e6, 1e8],
            master_seed: RngSeed(0),
        }
    }
}

impl Default for BreakdownConfig {
    fn default() -> Self {
        Self::new()
    }
}

/// Run a breakdown sweep on fresh Gaussian data.
pub fn run_breakdown_study(cfg: &BreakdownConfig) -> Result<BreakdownReport> {
    let model = EllipticalModel::standard(cfg.d, 1.0, DensityGenerator::Gaussian)?;
    let data = crate::elliptical::sample(&model, cfg.n, cfg.master_seed.derive_str("breakdown-data"))?;
    let fs_cfg = ForwardSearchConfig::for_generator(
        DensityGenerator::Gaussian,
        cfg.gamma,
        SpdMatrix::identity(cfg.d),
    )?;
    let fractions = match &cfg.fractions {
        Some(f) => f.clone(),
        None => default_fractions(cfg.n, cfg.gamma),
    };
    empirical_breakdown(
        &data,
        &fs_cfg,
        &cfg.magnitudes,
        &fractions,
        cfg.master_seed.derive_str("breakdown-probe"),
    )
}

/// Breakdown report CSV: one row per probed fraction.
pub fn breakdown_to_csv(report: &BreakdownReport) -> String {
    let mut out =
        String::from("gamma,n,d,fraction,n_star,divergence,exploded,threshold,estimated_breakdown\n");
    for c in &report.cells {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6e},{},{:.6e},{}",
            report.gamma,
            report.n,
            report.d,
            c.fraction,
            c.n_star,
            c.divergence,
            c.exploded,
            report.threshold,
            report.estimated_breakdown_fraction
        );
    }
    out
}

/// How Σ₀ is specified on the command line.
pub fn parse_sigma0(spec: &str, d: usize) -> Result<SpdMatrix> {
    if spec == "identity" {
        return Ok(SpdMatrix::identity(d));
    }
    if let Some(c) = spec.strip_prefix("scaled:") {
        let c: f64 = c
            .parse()
            .map_err(|_| Error::invalid(format!("bad scale in --sigma0 '{spec}'")))?;
        return SpdMatrix::scaled_identity(d, c);
    }
    // otherwise a CSV file holding a d x d matrix
    let rows = read_csv_matrix(Path::new(spec))?;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(Error::invalid(format!(
            "--sigma0 file must hold a {d}x{d} matrix matching the data dimension"
        )));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    SpdMatrix::new(Matrix::new(d, d, flat)?)
}

/// Headerless numeric CSV: one observation per row, comma separator.
pub fn read_csv_matrix(path: &Path) -> Result<Vec<Vec<f64>>> {
    let text = std::fs::read_to_string(path)?;
    let mut rows = Vec::new();
    let mut width = None;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in trimmed.split(',') {
            let v: f64 = field.trim().parse().map_err(|_| Error::Data {
                line: line_no,
                message: format!("cannot parse '{}' as a number", field.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Data { line: line_no, message: "non-finite value".into() });
            }
            row.push(v);
        }
        if let Some(w) = width {
            if row.len() != w {
                return Err(Error::Data {
                    line: line_no,
                    message: format!("expected {w} columns, found {}", row.len()),
                });
            }
        } else {
            width = Some(row.len());
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Data { line: 0, message: "no data rows".into() });
    }
    Ok(rows)
}

/// Options of the single-dataset `test` subcommand.
#[derive(Debug, Clone)]
pub struct DatasetTestOptions {
    pub which: TestKind,
    pub sigma0_spec: String,
    pub alpha: f64,
    pub gamma: f64,
    /// `None` means the generator-aware automatic policy.
    pub kappa: Option<f64>,
    pub generator: DensityGenerator,
    pub mc_draws: usize,
    pub seed: RngSeed,
}

/// Run one test on a CSV dataset.
pub fn test_dataset(path: &Path, opts: &DatasetTestOptions) -> Result<TestOutcome> {
    let data = read_csv_matrix(path)?;
    let d = data[0].len();
    let sigma0 = parse_sigma0(&opts.sigma0_spec, d)?;
    let kappa = match opts.kappa {
        Some(k) => KappaPolicy::Fixed(k),
        None => KappaPolicy::default_for(opts.which, opts.generator),
    };
    let spec = TestSpec {
        sigma0,
        alpha: opts.alpha,
        gamma: opts.gamma,
        kappa,
        generator: opts.generator,
        mc_draws: opts.mc_draws,
        seed: opts.seed,
    };
    run_test(&data, opts.which, &spec, None)
}

/// Output format of `emit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

impl std::str::FromStr for EmitFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(EmitFormat::Csv),
            "json" => Ok(EmitFormat::Json),
            other => Err(Error::invalid(format!("unknown format '{other}'"))),
        }
    }
}

/// Render a power table in the requested format.
pub fn render_power_table(table: &PowerTable, format: EmitFormat) -> String {
    match format {
        EmitFormat::Csv => table.to_csv(),
        EmitFormat::Json => serde_json::to_string_pretty(table).expect("serializable") + "\n",
    }
}

/// Render a breakdown report in the requested format.
pub fn render_breakdown(report: &BreakdownReport, format: EmitFormat) -> String {
    match format {
        EmitFormat::Csv => breakdown_to_csv(report),
        EmitFormat::Json => serde_json::to_string_pretty(report).expect("serializable") + "\n",
    }
}

/// Write rendered output, plus a manifest JSON alongside when given.
pub fn emit(content: &str, path: &Path) -> Result<()> {
    std::fs::write(path, content)?;
    Ok(())
}

pub fn emit_manifest(manifest: &RunManifest, out_path: &Path) -> Result<()> {
    let manifest_path = out_path.with_extension(format!(
        "{}manifest.json",
        out_path
            .extension()
            .map(|e| format!("{}.", e.to_string_lossy()))
            .unwrap_or_default()
    ));
    let body = serde_json::to_string_pretty(manifest).expect("serializable");
    std::fs::write(manifest_path, body)?;
    Ok(())
}
