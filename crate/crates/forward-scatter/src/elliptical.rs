//! Elliptical families: Gaussian and multivariate Student-t samplers (Cauchy is
//! t with one degree of freedom), two-component mixtures, the radial law H_d of
//! the squared Mahalanobis distance, its quantile, and the consistency factor
//! that rescales a trimmed covariance back to the scatter parameter.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{cholesky, Matrix, SpdMatrix};
use crate::rng::RngSeed;
use crate::special::{adaptive_simpson, ln_gamma, reg_inc_beta, reg_lower_gamma};

/// Density generator of the elliptical family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DensityGenerator {
    Gaussian,
    StudentT { nu: f64 },
}

impl DensityGenerator {
    /// The multivariate Cauchy is Student-t with one degree of freedom.
    pub fn cauchy() -> Self {
        DensityGenerator::StudentT { nu: 1.0 }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DensityGenerator::Gaussian => Ok(()),
            DensityGenerator::StudentT { nu } if *nu > 0.0 && nu.is_finite() => Ok(()),
            DensityGenerator::StudentT { nu } => {
                Err(Error::invalid(format!("StudentT requires nu > 0, got {nu}")))
            }
        }
    }

    /// Radial density h_d(u) of the squared Mahalanobis distance.
    pub fn radial_pdf(&self, d: usize, u: f64) -> f64 {
        if u < 0.0 {
            return 0.0;
        }
        let a = d as f64 / 2.0;
        match self {
            // chi-square_d density
            DensityGenerator::Gaussian => {
                ((a - 1.0) * u.ln() - u / 2.0 - a * 2.0f64.ln() - ln_gamma(a)).exp()
            }
            // density of d * F(d, nu)
            DensityGenerator::StudentT { nu } => {
                let b = nu / 2.0;
                let ln_norm = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) - a * nu.ln();
                (ln_norm + (a - 1.0) * u.ln() - (a + b) * (1.0 + u / nu).ln()).exp()
            }
        }
    }
}

/// Elliptical model: location, scatter, and the radial generator.
#[derive(Debug, Clone)]
pub struct EllipticalModel {
    pub mu: Vec<f64>,
    pub sigma: SpdMatrix,
    pub generator: DensityGenerator,
}

impl EllipticalModel {
    pub fn new(mu: Vec<f64>, sigma: SpdMatrix, generator: DensityGenerator) -> Result<Self> {
        generator.validate()?;
        if mu.len() != sigma.dim() {
            return Err(Error::dim(format!(
                "location dim {} != scatter dim {}",
                mu.len(),
                sigma.dim()
            )));
        }
        if !mu.iter().all(|v| v.is_finite()) {
            return Err(Error::invalid("location entries must be finite"));
        }
        Ok(EllipticalModel { mu, sigma, generator })
    }

    /// Centered model with scatter c·I_d.
    pub fn standard(d: usize, scale: f64, generator: DensityGenerator) -> Result<Self> {
        EllipticalModel::new(vec![0.0; d], SpdMatrix::scaled_identity(d, scale)?, generator)
    }

    pub fn dim(&self) -> usize {
        self.mu.len()
    }
}

/// Two-component mixture (1−β)F + βG.
#[derive(Debug, Clone)]
pub struct MixtureModel {
    pub beta: f64,
    pub f: EllipticalModel,
    pub g: EllipticalModel,
}

impl MixtureModel {
    pub fn new(beta: f64, f: EllipticalModel, g: EllipticalModel) -> Result<Self> {
        if !(0.0..=1.0).contains(&beta) {
            return Err(Error::invalid(format!("mixture weight must be in [0,1], got {beta}")));
        }
        if f.dim() != g.dim() {
            return Err(Error::dim("mixture components must share a dimension"));
        }
        Ok(MixtureModel { beta, f, g })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }
}

fn draw_one(model: &EllipticalModel, l: &Matrix, rng: &mut impl Rng) -> Vec<f64> {
    let d = model.dim();
    let mut z: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
    if let DensityGenerator::StudentT { nu } = model.generator {
        let w: f64 = ChiSquared::new(nu).expect("validated nu").sample(rng);
        let r = (nu / w).sqrt();
        for v in z.iter_mut() {
            *v *= r;
        }
    }
    // mu + L*(scaled z); scaling z first keeps the affine pushforward exact
    let mut y = model.mu.clone();
    for (r, yr) in y.iter_mut().enumerate() {
        let row_start = r * d;
        let mut acc = 0.0;
        for (c, zv) in z.iter().enumerate().take(r + 1) {
            acc += l.data()[row_start + c] * zv;
        }
        *yr += acc;
    }
    y
}

/// n i.i.d. draws from the model. Deterministic in the seed.
pub fn sample(model: &EllipticalModel, n: usize, seed: RngSeed) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let l = cholesky(&model.sigma);
    let mut rng = seed.stream();
    Ok((0..n).map(|_| draw_one(model, &l, &mut rng)).collect())
}

/// n i.i.d. draws from (1−β)F + βG; each draw picks its component independently.
pub fn sample_mixture(mix: &MixtureModel, n: usize, seed: RngSeed) -> Result<Vec<Vec<f64>>> {
    if n == 0 {
        return Err(Error::invalid("sample size must be positive"));
    }
    let lf = cholesky(&mix.f.sigma);
    let lg = cholesky(&mix.g.sigma);
    let mut rng = seed.stream();
    Ok((0..n)
        .map(|_| {
            let u: f64 = rng.random();
            if u < mix.beta {
                draw_one(&mix.g, &lg, &mut rng)
            } else {
                draw_one(&mix.f, &lf, &mut rng)
            }
        })
        .collect())
}

/// Radial CDF H_d(u): the law of the squared Mahalanobis distance under the
/// standardized model. Chi-square_d for the Gaussian generator; d·F(d, ν) for
/// Student-t(ν).
pub fn radial_cdf(gen: DensityGenerator, d: usize, u: f64) -> Result<f64> {
    gen.validate()?;
    if d == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    if u < 0.0 || u.is_nan() {
        return Err(Error::invalid("radial_cdf requires u >= 0"));
    }
    match gen {
        DensityGenerator::Gaussian => reg_lower_gamma(d as f64 / 2.0, u / 2.0),
        DensityGenerator::StudentT { nu } => {
            if u.is_infinite() {
                return Ok(1.0);
            }
            reg_inc_beta(d as f64 / 2.0, nu / 2.0, u / (u + nu))
        }
    }
}

/// Q_d(γ) = inf{x : H_d(x) ≥ γ}, by bracket expansion and bisection.
pub fn radial_quantile(gen: DensityGenerator, d: usize, gamma: f64) -> Result<f64> {
    gen.validate()?;
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::invalid(format!("quantile level must be in (0,1), got {gamma}")));
    }
    let mut lo = 0.0;
    let mut hi = d as f64;
    let mut expansions = 0;
    while radial_cdf(gen, d, hi)? < gamma {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 1024 {
            return Err(Error::invalid("quantile bracket expansion failed"));
        }
    }
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if radial_cdf(gen, d, mid)? >= gamma {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Consistency factor c_γ rescaling the γ-trimmed second moment to the scatter.
///
/// Gaussian generator: γ / H_{d+2}(Q_d(γ)). Student-t: the trimmed-second-moment
/// normalization γ·d / ∫₀^{Q_d(γ)} u·h_d(u) du, which the Gaussian expression is
/// a closed form of, and which keeps the factor meaningful when the untrimmed
/// second moment does not exist (ν ≤ 2).
pub fn consistency_factor(gen: DensityGenerator, d: usize, gamma: f64) -> Result<f64> {
    gen.validate()?;
    if gamma == 1.0 {
        return Ok(1.0);
    }
    if !(0.0 < gamma && gamma < 1.0) {
        return Err(Error::invalid(format!("gamma must be in (0,1], got {gamma}")));
    }
    let q = radial_quantile(gen, d, gamma)?;
    match gen {
        DensityGenerator::Gaussian => {
            let h = radial_cdf(DensityGenerator::Gaussian, d + 2, q)?;
            Ok(gamma / h)
        }
        DensityGenerator::StudentT { .. } => {
            let integrand = move |u: f64| u * gen.radial_pdf(d, u);
            let trimmed = adaptive_simpson(&integrand, 0.0, q, 1e-13 * (1.0 + q));
            if trimmed <= 0.0 {
                return Err(Error::invalid("trimmed second moment is not positive"));
            }
            Ok(gamma * d as f64 / trimmed)
        }
    }
}
