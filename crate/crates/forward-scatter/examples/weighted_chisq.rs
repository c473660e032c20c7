//! Eigenvalue weights of the limiting law and Monte Carlo quantiles, checked
//! against a chi-square reduction.
//!
//! Run with: cargo run --release --example weighted_chisq

use forward_scatter::elliptical::consistency_factor;
use forward_scatter::elliptical::DensityGenerator;
use forward_scatter::matrix::SpdMatrix;
use forward_scatter::rng::RngSeed;
use forward_scatter::scatter_tests::{
    asymptotic_lambdas_t1, asymptotic_lambdas_t2, weighted_chisq_pvalue, weighted_chisq_quantile,
};

fn main() -> forward_scatter::Result<()> {
    let d = 4;
    let sigma0 = SpdMatrix::identity(d);

    // sample-covariance weights at kappa = 0: ten 2s and six 0s
    let w2 = asymptotic_lambdas_t2(&sigma0, 0.0)?;
    println!("t2 weights (kappa = 0): {:?}", w2.lambdas);
    let q = weighted_chisq_quantile(&w2, 0.95, 1_000_000, RngSeed(41))?;
    println!("MC 0.95-quantile {q:.3} vs 2 * chi2_10(0.95) = 36.61");

    // forward-search weights carry the consistency factor squared
    let c = consistency_factor(DensityGenerator::Gaussian, d, 0.5)?;
    let w1 = asymptotic_lambdas_t1(&sigma0, 0.0, c)?;
    println!(
        "t1 weights scale by c^2 = {:.3}: largest {:.3}",
        c * c,
        w1.lambdas[0]
    );
    let q1 = weighted_chisq_quantile(&w1, 0.95, 1_000_000, RngSeed(41))?;
    println!("t1 MC 0.95-quantile {q1:.3} (= c^2 * t2 quantile on the same draws: {:.3})", c * c * q);

    // positive kurtosis lifts the vec(I) direction
    let w_kurt = asymptotic_lambdas_t2(&sigma0, 1.0)?;
    println!("t2 weights at kappa = 1: top three {:?}", &w_kurt.lambdas[..3]);

    let p = weighted_chisq_pvalue(&w2, q, 1_000_000, RngSeed(42))?;
    println!("p-value of the 0.95-quantile on fresh draws: {p:.4}");
    Ok(())
}
