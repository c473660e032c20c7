//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with the measured numbers (run with `--nocapture` to see the PASS lines).
//!
//! The Monte Carlo configuration is pinned: n = 100, d = 4, gamma = 0.5,
//! alpha = 0.05, 1000 replications, 10^6 draws behind each critical value,
//! and a fixed master seed chosen once.

use std::sync::LazyLock;
use std::time::Instant;

use forward_scatter::elliptical::{radial_cdf, radial_quantile, sample, DensityGenerator, EllipticalModel};
use forward_scatter::estimators::{forward_search_fit, sample_covariance, ForwardSearchConfig};
use forward_scatter::harness::{run_breakdown_study, run_power_study, BreakdownConfig, ExperimentConfig, PowerTable, Scenario};
use forward_scatter::matrix::{cholesky, commutation_matrix, kron, sym_eigenvalues, try_cholesky, vec_columns, Matrix, SpdMatrix};
use forward_scatter::rng::RngSeed;
use forward_scatter::robustness::{contaminate, divergence, ContaminationDirection, ContaminationPlan};
use forward_scatter::scatter_tests::{weighted_chisq_quantile, TestKind, WeightedChiSq};

const MASTER_SEED: u64 = 1;

struct Criterion {
    id: &'static str,
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new(id: &'static str) -> Self {
        Criterion { id, failures: Vec::new(), notes: Vec::new() }
    }

    fn check(&mut self, ok: bool, detail: String) {
        if ok {
            self.notes.push(detail);
        } else {
            self.failures.push(detail);
        }
    }

    fn finish(self) {
        for n in &self.notes {
            println!("  [{}] ok: {n}", self.id);
        }
        for f in &self.failures {
            println!("  [{}] FAILED: {f}", self.id);
        }
        if self.failures.is_empty() {
            println!("{}: PASS", self.id);
        } else {
            println!("{}: FAIL", self.id);
            panic!("{}: FAIL — {}", self.id, self.failures.join("; "));
        }
    }
}

fn base_config(scenario: Scenario, betas: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig {
        betas,
        master_seed: RngSeed(MASTER_SEED),
        ..ExperimentConfig::new(scenario)
    }
}

static GAUSSIAN_TABLE: LazyLock<(PowerTable, f64)> = LazyLock::new(|| {
    let cfg = base_config(
        Scenario::GaussianGaussian,
        vec![0.0, 0.1, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
    );
    let t0 = Instant::now();
    let (table, _) = run_power_study(&cfg).expect("gaussian power study");
    (table, t0.elapsed().as_secs_f64())
});

static CAUCHY_TABLE: LazyLock<PowerTable> = LazyLock::new(|| {
    let cfg = base_config(
        Scenario::CauchyCauchy,
        vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
    );
    run_power_study(&cfg).expect("cauchy power study").0
});

fn power_of(table: &PowerTable, kind: TestKind, beta: f64) -> f64 {
    table.lookup(kind, beta).unwrap_or_else(|| panic!("missing row {kind:?} beta={beta}")).power
}

#[test]
fn criterion_01_size_at_the_null() {
    let mut c = Criterion::new("criterion 01 (size at the null, gaussian)");
    let (table, elapsed) = &*GAUSSIAN_TABLE;
    for kind in [TestKind::T1, TestKind::T2] {
        let size = power_of(table, kind, 0.0);
        c.check(
            (0.03..=0.08).contains(&size),
            format!("{} empirical size {size:.4} (window [0.03, 0.08])", kind.label()),
        );
    }
    c.check(*elapsed < 600.0, format!("gaussian grid wall clock {elapsed:.1}s (< 600s)"));
    c.finish();
}

#[test]
fn criterion_02_gaussian_power_curve() {
    let mut c = Criterion::new("criterion 02 (gaussian power curve)");
    let (table, _) = &*GAUSSIAN_TABLE;
    let t2_01 = power_of(table, TestKind::T2, 0.1);
    c.check(
        (0.67..=0.80).contains(&t2_01),
        format!("t2 power at beta=0.1: {t2_01:.4} (window [0.67, 0.80])"),
    );
    let t1_01 = power_of(table, TestKind::T1, 0.1);
    c.check(
        (0.45..=0.61).contains(&t1_01),
        format!("t1 power at beta=0.1: {t1_01:.4} (window [0.45, 0.61])"),
    );
    for beta in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
        for kind in [TestKind::T1, TestKind::T2] {
            let p = power_of(table, kind, beta);
            c.check(p >= 0.99, format!("{} power at beta={beta}: {p:.4} (>= 0.99)", kind.label()));
        }
    }
    c.finish();
}

#[test]
fn criterion_03_cauchy_power_curve() {
    let mut c = Criterion::new("criterion 03 (cauchy power curve)");
    let table = &*CAUCHY_TABLE;
    let t1_04 = power_of(table, TestKind::T1, 0.4);
    c.check(t1_04 >= 0.95, format!("t1 power at beta=0.4: {t1_04:.4} (>= 0.95)"));
    for beta in [0.5, 0.6, 0.7, 0.8, 0.9, 1.0] {
        let p = power_of(table, TestKind::T1, beta);
        c.check(p >= 0.99, format!("t1 power at beta={beta}: {p:.4} (>= 0.99)"));
    }
    for beta in [0.1, 0.2, 0.3, 0.4] {
        let t1 = power_of(table, TestKind::T1, beta);
        let t2 = power_of(table, TestKind::T2, beta);
        c.check(
            t1 - t2 >= 0.2,
            format!("t1 dominates t2 at beta={beta}: {t1:.3} - {t2:.3} = {:.3} (>= 0.2)", t1 - t2),
        );
    }
    c.finish();
}

#[test]
fn invariant_t1_power_is_monotone_in_beta() {
    // nondecreasing in beta up to MC noise (single-step dips within 2 SEs)
    let table = &*CAUCHY_TABLE;
    let mut rows: Vec<_> = table.rows.iter().filter(|r| r.test == TestKind::T1).collect();
    rows.sort_by(|a, b| a.beta.partial_cmp(&b.beta).unwrap());
    for w in rows.windows(2) {
        let dip = w[0].power - w[1].power;
        let tol = 2.0 * (w[0].se + w[1].se);
        assert!(
            dip <= tol,
            "t1 power dipped from {} at beta={} to {} at beta={}",
            w[0].power,
            w[0].beta,
            w[1].power,
            w[1].beta
        );
    }
    println!("invariant (t1 power monotone in beta, cauchy grid): PASS");
}

#[test]
fn criterion_04_mixed_scenario_sizes() {
    let mut c = Criterion::new("criterion 04 (gaussian-cauchy sizes at beta=0)");
    let cfg = base_config(Scenario::GaussianCauchy, vec![0.0]);
    let (table, _) = run_power_study(&cfg).expect("mixed power study");
    let t1 = power_of(&table, TestKind::T1, 0.0);
    c.check((0.03..=0.08).contains(&t1), format!("t1 size {t1:.4} (window [0.03, 0.08])"));
    let t2 = power_of(&table, TestKind::T2, 0.0);
    c.check(t2 >= 0.10, format!("t2 size {t2:.4} (>= 0.10)"));
    c.finish();
}

#[test]
fn criterion_05_weighted_chisq_reduction() {
    let mut c = Criterion::new("criterion 05 (weighted chi-square reduction)");
    let mut lambdas = vec![2.0; 10];
    lambdas.extend([0.0; 6]);
    let w = WeightedChiSq { lambdas };
    let q = weighted_chisq_quantile(&w, 0.95, 1_000_000, RngSeed(MASTER_SEED).derive_str("c5"))
        .expect("quantile");
    let target = 36.61;
    let rel = (q - target).abs() / target;
    c.check(rel <= 0.01, format!("MC 0.95-quantile {q:.3} vs 2*chi2_10 = {target} (rel err {rel:.4})"));
    c.finish();
}

#[test]
fn criterion_06_variance_formula() {
    let mut c = Criterion::new("criterion 06 (asymptotic variance of sqrt(n) vec(est - I))");
    let (d, n, reps, gamma) = (3usize, 200usize, 100_000usize, 0.5f64);
    let dd = d * d;
    let fs_cfg = ForwardSearchConfig::for_generator(
        DensityGenerator::Gaussian,
        gamma,
        SpdMatrix::identity(d),
    )
    .expect("config");
    let c_sq = fs_cfg.c_gamma * fs_cfg.c_gamma;
    let model = EllipticalModel::standard(d, 1.0, DensityGenerator::Gaussian).expect("model");
    let seed = RngSeed(MASTER_SEED).derive_str("c6");

    // fixed 64-chunk split; chunk sums are reduced in index order so the
    // result does not depend on the worker count
    use rayon::prelude::*;
    let chunks: Vec<(usize, usize)> = {
        let k = 64usize;
        let per = reps.div_ceil(k);
        (0..k).map(|i| (i * per, ((i + 1) * per).min(reps))).filter(|(a, b)| a < b).collect()
    };
    let partials: Vec<(Vec<f64>, Vec<f64>)> = chunks
        .par_iter()
        .map(|&(lo, hi)| {
            let mut acc_fs = vec![0.0; dd * dd];
            let mut acc_scm = vec![0.0; dd * dd];
            for r in lo..hi {
                let data = sample(&model, n, seed.derive(r as u64)).expect("sample");
                let fs = forward_search_fit(&data, &fs_cfg).expect("fit");
                let scm = sample_covariance(&data).expect("scm");
                for (est, acc) in [(&fs, &mut acc_fs), (&scm, &mut acc_scm)] {
                    let diff = est.sigma_hat.sub(&Matrix::identity(d)).expect("diff");
                    let v = vec_columns(&diff);
                    for i in 0..dd {
                        let vi = v[i] * n as f64; // (sqrt(n) v_i)(sqrt(n) v_j)
                        for j in 0..dd {
                            acc[i * dd + j] += vi * v[j];
                        }
                    }
                }
            }
            (acc_fs, acc_scm)
        })
        .collect();
    let mut cov_fs = vec![0.0; dd * dd];
    let mut cov_scm = vec![0.0; dd * dd];
    for (pf, ps) in &partials {
        for i in 0..dd * dd {
            cov_fs[i] += pf[i];
            cov_scm[i] += ps[i];
        }
    }
    for i in 0..dd * dd {
        cov_fs[i] /= reps as f64;
        cov_scm[i] /= reps as f64;
    }

    let target = Matrix::identity(dd)
        .add(&commutation_matrix(d))
        .unwrap()
        .matmul(&kron(&Matrix::identity(d), &Matrix::identity(d)))
        .unwrap();
    let mut worst_scm: (f64, usize, usize) = (0.0, 0, 0);
    let mut worst_fs: (f64, usize, usize) = (0.0, 0, 0);
    for i in 0..dd {
        for j in 0..dd {
            let t = target.get(i, j);
            if t.abs() < 0.5 {
                continue;
            }
            let rel_scm = (cov_scm[i * dd + j] - t).abs() / t.abs();
            if rel_scm > worst_scm.0 {
                worst_scm = (rel_scm, i, j);
            }
            let rel_fs = (cov_fs[i * dd + j] - c_sq * t).abs() / (c_sq * t).abs();
            if rel_fs > worst_fs.0 {
                worst_fs = (rel_fs, i, j);
            }
        }
    }
    c.check(
        worst_scm.0 <= 0.10,
        format!(
            "sample covariance: worst relative error {:.4} at entry ({}, {}) — measured {:.3} vs {:.3} (<= 10%)",
            worst_scm.0,
            worst_scm.1,
            worst_scm.2,
            cov_scm[worst_scm.1 * dd + worst_scm.2],
            target.get(worst_scm.1, worst_scm.2)
        ),
    );
    c.check(
        worst_fs.0 <= 0.15,
        format!(
            "forward search: worst relative error {:.4} at entry ({}, {}) — measured {:.3} vs c^2-scaled {:.3} (<= 15%)",
            worst_fs.0,
            worst_fs.1,
            worst_fs.2,
            cov_fs[worst_fs.1 * dd + worst_fs.2],
            c_sq * target.get(worst_fs.1, worst_fs.2)
        ),
    );
    c.finish();
}

#[test]
fn criterion_07_breakdown_point() {
    let mut c = Criterion::new("criterion 07 (breakdown point)");
    for (gamma, lo, hi) in [(0.5, 0.48, 0.53), (0.75, 0.23, 0.28)] {
        let cfg = BreakdownConfig {
            gamma,
            master_seed: RngSeed(MASTER_SEED).derive_str("c7"),
            ..BreakdownConfig::new()
        };
        let report = run_breakdown_study(&cfg).expect("breakdown study");
        let est = report.estimated_breakdown_fraction;
        c.check(
            (lo..=hi).contains(&est),
            format!("gamma={gamma}: estimated breakdown fraction {est:.3} (window [{lo}, {hi}])"),
        );
    }
    // sample covariance collapses at the smallest tested fraction 1/n
    let model = EllipticalModel::standard(4, 1.0, DensityGenerator::Gaussian).expect("model");
    let data = sample(&model, 100, RngSeed(MASTER_SEED).derive_str("c7-scm")).expect("sample");
    let clean = sample_covariance(&data).expect("scm");
    let plan = ContaminationPlan {
        n_star: 1,
        magnitude: 1e8,
        direction: ContaminationDirection::ProportionalToOnes,
    };
    let poisoned = contaminate(&data, &plan, RngSeed(0)).expect("contaminate");
    let dirty = sample_covariance(&poisoned).expect("scm dirty");
    let div = divergence(&clean, &dirty).expect("divergence");
    let threshold = 1e3 * sym_eigenvalues(&clean.sigma_hat).expect("eig")[0];
    c.check(
        div > threshold,
        format!("sample covariance divergence {div:.3e} at fraction 1/n exceeds threshold {threshold:.3e}"),
    );
    c.finish();
}

#[test]
fn criterion_08_consistency_in_n() {
    let mut c = Criterion::new("criterion 08 (power against 5I is nondecreasing in n)");
    let mut powers: Vec<(usize, f64, f64)> = Vec::new();
    for n in [50usize, 100, 200] {
        let cfg = ExperimentConfig {
            n,
            betas: vec![1.0],
            master_seed: RngSeed(MASTER_SEED).derive_str("c8"),
            ..ExperimentConfig::new(Scenario::GaussianGaussian)
        };
        let (table, _) = run_power_study(&cfg).expect("power study");
        powers.push((n, power_of(&table, TestKind::T1, 1.0), power_of(&table, TestKind::T2, 1.0)));
    }
    for w in powers.windows(2) {
        c.check(
            w[1].1 >= w[0].1 && w[1].2 >= w[0].2,
            format!(
                "power nondecreasing from n={} (t1 {:.3}, t2 {:.3}) to n={} (t1 {:.3}, t2 {:.3})",
                w[0].0, w[0].1, w[0].2, w[1].0, w[1].1, w[1].2
            ),
        );
    }
    let last = powers.last().unwrap();
    c.check(
        last.1 >= 0.99 && last.2 >= 0.99,
        format!("power at n=200: t1 {:.3}, t2 {:.3} (both >= 0.99)", last.1, last.2),
    );
    c.finish();
}

#[test]
fn criterion_09_determinism() {
    let mut c = Criterion::new("criterion 09 (byte-identical output)");
    let cfg = ExperimentConfig {
        reps: 200,
        betas: vec![0.0, 0.3],
        mc_draws: 50_000,
        master_seed: RngSeed(MASTER_SEED).derive_str("c9"),
        ..ExperimentConfig::new(Scenario::GaussianGaussian)
    };
    let (a, _) = run_power_study(&cfg).expect("run a");
    let (b, _) = run_power_study(&cfg).expect("run b");
    c.check(a.to_csv() == b.to_csv(), "repeated runs produce byte-identical CSV".into());

    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("pool");
    let (serial, _) = single.install(|| run_power_study(&cfg)).expect("run serial");
    c.check(
        serial.to_csv() == a.to_csv(),
        "a single-threaded pool reproduces the parallel CSV byte-for-byte".into(),
    );
    c.finish();
}

#[test]
fn criterion_10_kernel_property_suites() {
    let mut c = Criterion::new("criterion 10 (kernel properties)");
    // commutation identity for d <= 5 on random matrices
    {
        use rand::prelude::*;
        let mut rng = RngSeed(MASTER_SEED).derive_str("c10").stream();
        let mut ok = true;
        for d in 1..=5 {
            let k = commutation_matrix(d);
            for _ in 0..20 {
                let a = Matrix::new(
                    d,
                    d,
                    (0..d * d).map(|_| rng.random_range(-2.0..2.0)).collect(),
                )
                .unwrap();
                if k.matvec(&vec_columns(&a)).unwrap() != vec_columns(&a.transpose()) {
                    ok = false;
                }
            }
        }
        c.check(ok, "K vec(A) = vec(A^T) exactly for d <= 5".into());
    }
    // (I + K) spectra for d in {2,3,4}
    {
        let mut ok = true;
        for d in [2usize, 3, 4] {
            let m = Matrix::identity(d * d).add(&commutation_matrix(d)).unwrap();
            let eig = sym_eigenvalues(&m).unwrap();
            let twos = eig.iter().filter(|&&v| (v - 2.0).abs() < 1e-10).count();
            let zeros = eig.iter().filter(|&&v| v.abs() < 1e-10).count();
            ok &= twos == d * (d + 1) / 2 && zeros == d * (d - 1) / 2;
        }
        c.check(ok, "(I + K) spectrum is {2, 0} with the symmetric/antisymmetric multiplicities".into());
    }
    // Cholesky round trip <= 1e-10 relative
    {
        use rand::prelude::*;
        let mut rng = RngSeed(MASTER_SEED).derive_str("c10-chol").stream();
        let mut worst = 0.0f64;
        for d in 2..=6 {
            for _ in 0..20 {
                let a = Matrix::new(
                    d,
                    d,
                    (0..d * d).map(|_| rng.random_range(-1.0..1.0)).collect(),
                )
                .unwrap();
                let spd = SpdMatrix::new(
                    a.matmul(&a.transpose()).unwrap().add(&Matrix::identity(d).scale(0.5)).unwrap(),
                )
                .unwrap();
                let l = cholesky(&spd);
                let back = l.matmul(&l.transpose()).unwrap();
                let rel =
                    back.sub(spd.matrix()).unwrap().frobenius_norm() / spd.matrix().frobenius_norm();
                worst = worst.max(rel);
            }
        }
        c.check(worst <= 1e-10, format!("cholesky round-trip worst relative error {worst:.2e} (<= 1e-10)"));
        // and the factor of a near-singular matrix fails cleanly
        let singular = Matrix::new(2, 2, vec![1.0, 1.0, 1.0, 1.0]).unwrap();
        c.check(try_cholesky(&singular).is_err(), "singular matrices are rejected".into());
    }
    // radial CDF/quantile round trip <= 1e-9
    {
        let mut worst = 0.0f64;
        for gen in [DensityGenerator::Gaussian, DensityGenerator::cauchy()] {
            for d in 1..=6 {
                for i in 1..=99 {
                    let g = i as f64 / 100.0;
                    let q = radial_quantile(gen, d, g).unwrap();
                    worst = worst.max((radial_cdf(gen, d, q).unwrap() - g).abs());
                }
            }
        }
        c.check(worst <= 1e-9, format!("radial CDF/quantile round-trip worst error {worst:.2e} (<= 1e-9)"));
    }
    // KS distance between sampled Md^2 and H_d at 1e5 draws
    {
        let n = 100_000;
        for gen in [DensityGenerator::Gaussian, DensityGenerator::cauchy()] {
            let model = EllipticalModel::standard(4, 1.0, gen).unwrap();
            let ys = sample(&model, n, RngSeed(MASTER_SEED).derive_str("c10-ks")).unwrap();
            let mut r2: Vec<f64> = ys.iter().map(|y| y.iter().map(|v| v * v).sum()).collect();
            r2.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut ks = 0.0f64;
            for (i, &u) in r2.iter().enumerate() {
                let h = radial_cdf(gen, 4, u).unwrap();
                ks = ks.max((h - i as f64 / n as f64).abs());
                ks = ks.max((h - (i + 1) as f64 / n as f64).abs());
            }
            c.check(ks <= 0.01, format!("KS(Md^2, H_d) = {ks:.4} for {gen:?} (<= 0.01)"));
        }
    }
    c.finish();
}
