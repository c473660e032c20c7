//! Robust testing of a multivariate scatter matrix via the forward search.
//!
//! The library provides:
//!
//! - dense matrix kernels (vec, Kronecker products, commutation matrices, a
//!   Jacobi eigensolver, Cholesky factorization) sized for the small systems
//!   these tests need ([`matrix`]);
//! - samplers and radial laws for elliptical families — Gaussian and
//!   multivariate Student-t/Cauchy — plus mixtures ([`elliptical`]);
//! - the forward-search trimmed scatter estimator, the sample covariance, and
//!   kurtosis estimation ([`estimators`]);
//! - the scatter hypothesis tests `T1` (forward search) and `T2` (sample
//!   covariance) with weighted chi-square critical values estimated by Monte
//!   Carlo ([`scatter_tests`]);
//! - an empirical breakdown-point probe ([`robustness`]);
//! - a reproducible experiment harness with CSV/JSON output ([`harness`]).
//!
//! Every sampler and Monte Carlo routine takes an explicit [`rng::RngSeed`];
//! derived streams make results independent of execution order and worker
//! count.
//!
//! ```
//! use forward_scatter::elliptical::{sample, DensityGenerator, EllipticalModel};
//! use forward_scatter::matrix::SpdMatrix;
//! use forward_scatter::scatter_tests::{run_test, TestKind, TestSpec};
//! use forward_scatter::RngSeed;
//!
//! // 100 draws from N_4(0, I), tested against the true scatter
//! let model = EllipticalModel::standard(4, 1.0, DensityGenerator::Gaussian)?;
//! let data = sample(&model, 100, RngSeed(7))?;
//! let spec = TestSpec {
//!     mc_draws: 10_000,
//!     ..TestSpec::new(SpdMatrix::identity(4), DensityGenerator::Gaussian, TestKind::T2)
//! };
//! let outcome = run_test(&data, TestKind::T2, &spec, None)?;
//! assert!(!outcome.reject);
//! # Ok::<(), forward_scatter::Error>(())
//! ```

pub mod elliptical;
pub mod error;
pub mod estimators;
pub mod harness;
pub mod matrix;
pub mod rng;
pub mod robustness;
pub mod special;

pub use error::{Error, Result};
pub use rng::RngSeed;
