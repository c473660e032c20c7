//! Empirical breakdown machinery: the eigenvalue divergence between a clean
//! and a contaminated fit, sample contamination, and a probe that sweeps
//! contamination fractions and magnitudes to locate the breakdown fraction.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{forward_search_fit, ForwardSearchConfig, ScatterEstimate};
use crate::matrix::sym_eigenvalues;
use crate::rng::RngSeed;

/// Direction the replaced observations point in.
#[derive(Debug, Clone)]
pub enum ContaminationDirection {
    /// A fixed unit vector.
    Fixed(Vec<f64>),
    /// (1,…,1)/√d.
    ProportionalToOnes,
    /// A fresh random unit vector per replaced point.
    RandomUnit,
}

/// Replacement plan: the first `n_star` observations become
/// `magnitude · direction`.
#[derive(Debug, Clone)]
pub struct ContaminationPlan {
    pub n_star: usize,
    pub magnitude: f64,
    pub direction: ContaminationDirection,
}

/// Divergence D between two scatter estimates: the larger of the top-eigenvalue
/// gap and the reciprocal-smallest-eigenvalue gap. Infinite when either scale
/// explodes or the contaminated estimate collapses to a singular matrix.
pub fn divergence(a: &ScatterEstimate, b: &ScatterEstimate) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dim("divergence requires equal dimensions"));
    }
    let ea = sym_eigenvalues(&a.sigma_hat)?;
    let eb = sym_eigenvalues(&b.sigma_hat)?;
    let d = ea.len();
    let (top_a, bot_a) = (ea[0], ea[d - 1]);
    let (top_b, bot_b) = (eb[0], eb[d - 1]);
    if !top_a.is_finite() || !top_b.is_finite() {
        return Ok(f64::INFINITY);
    }
    let tiny = 1e-300;
    let inv_gap = if bot_a.max(bot_b) <= 0.0 {
        // both singular
        if bot_a <= tiny && bot_b <= tiny {
            0.0
        } else {
            f64::INFINITY
        }
    } else if bot_a <= tiny || bot_b <= tiny {
        f64::INFINITY
    } else {
        (1.0 / bot_a - 1.0 / bot_b).abs()
    };
    Ok((top_a - top_b).abs().max(inv_gap))
}

/// Replace the first `n_star` observations according to the plan.
pub fn contaminate(
    data: &[Vec<f64>],
    plan: &ContaminationPlan,
    seed: RngSeed,
) -> Result<Vec<Vec<f64>>> {
    let n = data.len();
    if plan.n_star > n {
        return Err(Error::invalid(format!(
            "n_star = {} exceeds the sample size {n}",
            plan.n_star
        )));
    }
    if !(plan.magnitude > 0.0 && plan.magnitude.is_finite()) {
        return Err(Error::invalid("contamination magnitude must be positive and finite"));
    }
    let d = if n > 0 { data[0].len() } else { 0 };
    let mut out = data.to_vec();
    let mut rng = seed.stream();
    for slot in out.iter_mut().take(plan.n_star) {
        let dir: Vec<f64> = match &plan.direction {
            ContaminationDirection::Fixed(v) => {
                if v.len() != d {
                    return Err(Error::dim("contamination direction dimension mismatch"));
                }
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm == 0.0 {
                    return Err(Error::invalid("contamination direction must be nonzero"));
                }
                v.iter().map(|x| x / norm).collect()
            }
            ContaminationDirection::ProportionalToOnes => {
                let inv = 1.0 / (d as f64).sqrt();
                vec![inv; d]
            }
            ContaminationDirection::RandomUnit => {
                let mut v: Vec<f64> =
                    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                for x in v.iter_mut() {
                    *x /= norm;
                }
                v
            }
        };
        *slot = dir.iter().map(|x| x * plan.magnitude).collect();
    }
    Ok(out)
}

/// One probed contamination fraction.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownCell {
    pub fraction: f64,
    pub n_star: usize,
    /// sup over the magnitude sweep of the divergence from the clean fit;
    /// infinity when a contaminated fit degenerates.
    pub divergence: f64,
    pub exploded: bool,
    /// Divergence at each probed magnitude, in sweep order.
    pub per_magnitude: Vec<f64>,
}

/// Report of a breakdown probe.
#[derive(Debug, Clone, Serialize)]
pub struct BreakdownReport {
    pub gamma: f64,
    pub n: usize,
    pub d: usize,
    pub threshold: f64,
    pub cells: Vec<BreakdownCell>,
    /// Smallest probed fraction whose divergence exceeded the threshold;
    /// 1.0 when none did.
    pub estimated_breakdown_fraction: f64,
}

/// Sweep contamination fractions and magnitudes around a clean dataset.
///
/// For each fraction f the probe replaces the first ⌈f·n⌉ observations at each
/// magnitude, refits, and records the supremum divergence from the clean fit.
/// The explosion threshold is 10³ times the clean fit's top eigenvalue: the
/// diverging branch grows with the square of the magnitude, so any large fixed
/// multiple separates the branches.
pub fn empirical_breakdown(
    data: &[Vec<f64>],
    fs_cfg: &ForwardSearchConfig,
    magnitudes: &[f64],
    fractions: &[f64],
    seed: RngSeed,
) -> Result<BreakdownReport> {
    if fractions.is_empty() || magnitudes.is_empty() {
        return Err(Error::invalid("need at least one fraction and one magnitude"));
    }
    if fractions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("fractions must be strictly ascending"));
    }
    if fractions.iter().any(|&f| !(0.0..1.0).contains(&f)) {
        return Err(Error::invalid("fractions must lie in [0, 1)"));
    }
    let n = data.len();
    let d = if n > 0 { data[0].len() } else { 0 };
    let clean = forward_search_fit(data, fs_cfg)?;
    let clean_top = sym_eigenvalues(&clean.sigma_hat)?[0];
    let threshold = 1e3 * clean_top;

    let mut cells = Vec::with_capacity(fractions.len());
    let mut estimated = 1.0;
    for (fi, &fraction) in fractions.iter().enumerate() {
        let n_star = ((fraction * n as f64).ceil() as usize).min(n);
        let mut sup = 0.0f64;
        let mut per_magnitude = Vec::with_capacity(magnitudes.len());
        for (mi, &magnitude) in magnitudes.iter().enumerate() {
            let plan = ContaminationPlan {
                n_star,
                magnitude,
                direction: ContaminationDirection::ProportionalToOnes,
            };
            let cell_seed = seed.derive(fi as u64).derive(mi as u64);
            let poisoned = contaminate(data, &plan, cell_seed)?;
            let div = match forward_search_fit(&poisoned, fs_cfg) {
                Ok(est) => divergence(&clean, &est)?,
                // a subset collapsing onto the contamination hyperplane is the
                // breakdown event itself
                Err(Error::DegenerateSubset) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            per_magnitude.push(div);
            sup = sup.max(div);
        }
        let exploded = sup > threshold;
        if exploded && estimated == 1.0 {
            estimated = fraction;
        }
        cells.push(BreakdownCell { fraction, n_star, divergence: sup, exploded, per_magnitude });
    }
    Ok(BreakdownReport {
        gamma: fs_cfg.gamma,
        n,
        d,
        threshold,
        cells,
        estimated_breakdown_fraction: estimated,
    })
}

/// Default fraction grid for a probe at trimming level γ: 1/n, a coarse sweep,
/// and a fine band around the theoretical boundary 1 − γ.
pub fn default_fractions(n: usize, gamma: f64) -> Vec<f64> {
    let mut fr = vec![1.0 / n as f64];
    let mut f = 0.05;
    while f < 0.96 {
        fr.push(f);
        f += 0.05;
    }
    let boundary = 1.0 - gamma;
    for k in -2i32..=3 {
        let v = boundary + k as f64 / n as f64;
        if v > 0.0 && v < 1.0 {
            fr.push(v);
        }
    }
    fr.sort_by(|a, b| a.partial_cmp(b).unwrap());
    fr.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    fr.retain(|&v| v < 1.0);
    fr
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elliptical::{sample, DensityGenerator, EllipticalModel};
    use crate::estimators::sample_covariance;
    use crate::matrix::{Matrix, SpdMatrix};

    fn gauss_data(n: usize, d: usize, seed: u64) -> Vec<Vec<f64>> {
        let model = EllipticalModel::standard(d, 1.0, DensityGenerator::Gaussian).unwrap();
        sample(&model, n, RngSeed(seed)).unwrap()
    }

    fn synthetic_estimate(eigs: &[f64]) -> ScatterEstimate {
        ScatterEstimate {
            mu_hat: vec![0.0; eigs.len()],
            sigma_hat: Matrix::diagonal(eigs),
            subset_mask: vec![true; 8],
            md2: vec![0.0; 8],
            c_gamma: 1.0,
            subset_size: 8,
            converged: true,
        }
    }

    #[test]
    fn divergence_cases() {
        let a = synthetic_estimate(&[4.0, 2.0, 1.0]);
        assert_eq!(divergence(&a, &a).unwrap(), 0.0);

        let b = synthetic_estimate(&[9.0, 2.0, 1.0]);
        assert_eq!(divergence(&a, &b).unwrap(), 5.0);
        assert_eq!(divergence(&b, &a).unwrap(), 5.0);

        let singular = synthetic_estimate(&[4.0, 2.0, 0.0]);
        assert_eq!(divergence(&a, &singular).unwrap(), f64::INFINITY);
    }

    #[test]
    fn contaminate_basics() {
        let data = gauss_data(10, 4, 1);
        let plan = ContaminationPlan {
            n_star: 0,
            magnitude: 1e8,
            direction: ContaminationDirection::ProportionalToOnes,
        };
        assert_eq!(contaminate(&data, &plan, RngSeed(2)).unwrap(), data);

        let plan = ContaminationPlan {
            n_star: 1,
            magnitude: 1e8,
            direction: ContaminationDirection::Fixed(vec![1.0, 0.0, 0.0, 0.0]),
        };
        let out = contaminate(&data, &plan, RngSeed(2)).unwrap();
        assert_eq!(out.len(), data.len());
        assert_eq!(out[0], vec![1e8, 0.0, 0.0, 0.0]);
        assert_eq!(out[1..], data[1..]);

        let plan = ContaminationPlan {
            n_star: 11,
            magnitude: 1.0,
            direction: ContaminationDirection::ProportionalToOnes,
        };
        assert!(contaminate(&data, &plan, RngSeed(2)).is_err());
    }

    #[test]
    fn breakdown_probe_half_gamma() {
        let data = gauss_data(100, 4, 3);
        let cfg = ForwardSearchConfig::for_generator(
            DensityGenerator::Gaussian,
            0.5,
            SpdMatrix::identity(4),
        )
        .unwrap();
        let fractions = default_fractions(100, 0.5);
        let magnitudes = [1e2, 1e4, 1e6, 1e8];
        let report =
            empirical_breakdown(&data, &cfg, &magnitudes, &fractions, RngSeed(4)).unwrap();
        let est = report.estimated_breakdown_fraction;
        assert!(
            (0.48..=0.53).contains(&est),
            "estimated breakdown {est} outside [0.48, 0.53]"
        );
        // safety region: everything below 1 - gamma - 1/n stays bounded
        for cell in &report.cells {
            if cell.fraction <= 0.5 - 0.01 {
                assert!(!cell.exploded, "fraction {} exploded", cell.fraction);
            }
            if cell.fraction >= 0.5 + 0.02 {
                assert!(cell.exploded, "fraction {} did not explode", cell.fraction);
            }
        }
        // the exploding branch grows along the magnitude sweep
        for cell in report.cells.iter().filter(|c| c.exploded) {
            let finite: Vec<f64> =
                cell.per_magnitude.iter().copied().filter(|v| v.is_finite()).collect();
            for w in finite.windows(2) {
                assert!(w[1] >= w[0] * 0.99, "magnitude sweep not growing: {:?}", cell.per_magnitude);
            }
        }
    }

    #[test]
    fn sample_covariance_breaks_at_one_point() {
        let data = gauss_data(100, 4, 5);
        let clean = sample_covariance(&data).unwrap();
        let plan = ContaminationPlan {
            n_star: 1,
            magnitude: 1e8,
            direction: ContaminationDirection::ProportionalToOnes,
        };
        let poisoned = contaminate(&data, &plan, RngSeed(6)).unwrap();
        let dirty = sample_covariance(&poisoned).unwrap();
        let div = divergence(&clean, &dirty).unwrap();
        let threshold = 1e3 * sym_eigenvalues(&clean.sigma_hat).unwrap()[0];
        assert!(div > threshold, "divergence {div} vs threshold {threshold}");
    }
}
