//! Location/scatter estimators: the forward-search trimmed estimator, the
//! classical sample covariance, and the kurtosis estimate used by the
//! asymptotic critical values.

use crate::elliptical::{consistency_factor, DensityGenerator};
use crate::error::{Error, Result};
use crate::matrix::{invert_spd, mahalanobis_sq, try_invert_symmetric, Matrix, SpdMatrix};

/// Which scatter the squared distances are measured against while the search
/// updates its subset.
///
/// `Refitted` is the classical forward search: the hypothesized Σ₀ seeds the
/// first sweep and each later sweep uses the current trimmed estimate.
/// `FixedSigma0` keeps Σ₀ as the metric in every sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistanceMetric {
    Refitted,
    FixedSigma0,
}

/// Configuration of a forward-search fit.
#[derive(Debug, Clone)]
pub struct ForwardSearchConfig {
    /// Trimming level; the subset keeps m = ⌊nγ⌋ observations. γ = 1 means no
    /// trimming (m = n).
    pub gamma: f64,
    /// Step size of the classical growing scheme; the γ-step fixed point does
    /// not depend on it, kept for interface completeness.
    pub h: usize,
    /// Initial subset size for the median start; `None` means ⌊(n+d+1)/2⌋.
    pub m0: Option<usize>,
    pub max_sweeps: usize,
    /// Hypothesized scatter; the metric of the first sweep, and of every sweep
    /// in `FixedSigma0` mode.
    pub sigma0: SpdMatrix,
    /// Known location. When set, the location is never re-estimated.
    pub known_mu: Option<Vec<f64>>,
    pub metric: DistanceMetric,
    /// Consistency factor c_γ. Use `for_generator` to derive it from a radial
    /// law, or set 1.0 for raw trimmed covariances.
    pub c_gamma: f64,
}

impl ForwardSearchConfig {
    /// Config with c_γ computed for the given generator.
    pub fn for_generator(
        generator: DensityGenerator,
        gamma: f64,
        sigma0: SpdMatrix,
    ) -> Result<Self> {
        let d = sigma0.dim();
        let c_gamma = consistency_factor(generator, d, gamma)?;
        Ok(ForwardSearchConfig {
            gamma,
            h: 1,
            m0: None,
            max_sweeps: 100,
            sigma0,
            known_mu: None,
            metric: DistanceMetric::Refitted,
            c_gamma,
        })
    }

    pub fn with_metric(mut self, metric: DistanceMetric) -> Self {
        self.metric = metric;
        self
    }

    pub fn with_known_mu(mut self, mu: Vec<f64>) -> Self {
        self.known_mu = Some(mu);
        self
    }

    fn validate(&self, n: usize, d: usize) -> Result<usize> {
        if !(0.0 < self.gamma && self.gamma <= 1.0) {
            return Err(Error::invalid(format!("gamma must be in (0,1], got {}", self.gamma)));
        }
        if self.sigma0.dim() != d {
            return Err(Error::dim("sigma0 dimension does not match the data"));
        }
        if let Some(mu) = &self.known_mu {
            if mu.len() != d {
                return Err(Error::dim("known_mu dimension does not match the data"));
            }
        }
        if self.max_sweeps == 0 || self.h == 0 {
            return Err(Error::invalid("max_sweeps and h must be positive"));
        }
        if !(self.c_gamma.is_finite() && self.c_gamma > 0.0) {
            return Err(Error::invalid("c_gamma must be positive and finite"));
        }
        let m = ((n as f64) * self.gamma).floor() as usize;
        let m = m.min(n);
        if m < d + 1 {
            return Err(Error::invalid(format!(
                "subset size ⌊n·γ⌋ = {m} must be at least d+1 = {}",
                d + 1
            )));
        }
        Ok(m)
    }
}

/// Result of an estimator run.
#[derive(Debug, Clone)]
pub struct ScatterEstimate {
    pub mu_hat: Vec<f64>,
    /// Symmetric positive semi-definite scatter estimate. May be singular on
    /// degenerate data; tests that need an inverse must check.
    pub sigma_hat: Matrix,
    pub subset_mask: Vec<bool>,
    /// Squared distances from the final selection sweep.
    pub md2: Vec<f64>,
    pub c_gamma: f64,
    pub subset_size: usize,
    /// False when the subset was still changing at max_sweeps.
    pub converged: bool,
}

impl ScatterEstimate {
    pub fn dim(&self) -> usize {
        self.mu_hat.len()
    }
}

/// Lower median: the ⌈n/2⌉-th order statistic. Against a cluster of far
/// outliers this stays with the majority half, which the midpoint-average
/// convention does not.
fn lower_median(values: &mut [f64]) -> f64 {
    let k = values.len().div_ceil(2) - 1;
    *values
        .select_nth_unstable_by(k, |a, b| a.partial_cmp(b).expect("finite data"))
        .1
}

fn coordinatewise_median(data: &[Vec<f64>], idx: Option<&[usize]>) -> Vec<f64> {
    let d = data[0].len();
    let mut out = vec![0.0; d];
    let mut buf: Vec<f64> = Vec::with_capacity(data.len());
    for (k, o) in out.iter_mut().enumerate() {
        buf.clear();
        match idx {
            Some(rows) => buf.extend(rows.iter().map(|&i| data[i][k])),
            None => buf.extend(data.iter().map(|y| y[k])),
        }
        *o = lower_median(&mut buf);
    }
    out
}

/// Indices of the m smallest values, ties broken by index.
fn smallest_m(values: &[f64], m: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[a].partial_cmp(&values[b]).expect("finite distances").then(a.cmp(&b))
    });
    idx.truncate(m);
    idx
}

fn trimmed_mean(data: &[Vec<f64>], subset: &[usize]) -> Vec<f64> {
    let d = data[0].len();
    let mut mu = vec![0.0; d];
    for &i in subset {
        for k in 0..d {
            mu[k] += data[i][k];
        }
    }
    let inv = 1.0 / subset.len() as f64;
    for v in mu.iter_mut() {
        *v *= inv;
    }
    mu
}

fn scatter_about(data: &[Vec<f64>], subset: &[usize], mu: &[f64], factor: f64) -> Matrix {
    let d = mu.len();
    let mut s = Matrix::zeros(d, d);
    for &i in subset {
        let y = &data[i];
        for r in 0..d {
            let dr = y[r] - mu[r];
            for c in r..d {
                let v = s.get(r, c) + dr * (y[c] - mu[c]);
                s.set(r, c, v);
            }
        }
    }
    let scale = factor / subset.len() as f64;
    for r in 0..d {
        for c in r..d {
            let v = s.get(r, c) * scale;
            s.set(r, c, v);
            s.set(c, r, v);
        }
    }
    s
}

fn distances(data: &[Vec<f64>], mu: &[f64], metric_inv: &SpdMatrix) -> Result<Vec<f64>> {
    let d2: Vec<f64> = data
        .iter()
        .map(|y| mahalanobis_sq(y, mu, metric_inv))
        .collect::<Result<_>>()?;
    // a numerically collapsed metric can turn distances into NaN; +inf is
    // fine (orderable), NaN is not
    if d2.iter().any(|v| v.is_nan()) {
        return Err(Error::DegenerateSubset);
    }
    Ok(d2)
}

/// The γ-step forward-search estimator.
///
/// Starts from the coordinatewise median of the m₀ observations closest to the
/// coordinatewise median of the data (in the Σ₀ metric), then iterates: rank
/// all observations by squared distance, keep the m = ⌊nγ⌋ closest, refit the
/// location (and, in `Refitted` mode, the metric) on that subset, until the
/// subset stabilizes. The scatter is the c_γ-rescaled trimmed covariance about
/// the final location.
pub fn forward_search_fit(data: &[Vec<f64>], cfg: &ForwardSearchConfig) -> Result<ScatterEstimate> {
    let n = data.len();
    if n == 0 {
        return Err(Error::invalid("empty data"));
    }
    let d = data[0].len();
    if d == 0 || data.iter().any(|y| y.len() != d) {
        return Err(Error::dim("observations must share a positive dimension"));
    }
    if data.iter().any(|y| y.iter().any(|v| !v.is_finite())) {
        return Err(Error::invalid("data entries must be finite"));
    }
    if n < d + 2 {
        return Err(Error::invalid(format!("need at least d+2 = {} observations", d + 2)));
    }
    let m = cfg.validate(n, d)?;

    let sigma0_inv = invert_spd(&cfg.sigma0);

    let mut mu = match &cfg.known_mu {
        Some(mu) => mu.clone(),
        None => {
            let med = coordinatewise_median(data, None);
            let d2 = distances(data, &med, &sigma0_inv)?;
            let m0 = cfg.m0.unwrap_or((n + d).div_ceil(2)).clamp(1, n);
            let core = smallest_m(&d2, m0);
            coordinatewise_median(data, Some(&core))
        }
    };

    let mut metric_inv = sigma0_inv.clone();
    let mut subset: Vec<usize> = Vec::new();
    let mut md2 = vec![0.0; n];
    let mut converged = false;

    // h > 1 requests the classical growing scheme: the fitting subset expands
    // by h per sweep from the initial core up to the γ-step size m, refitting
    // along the way. The growth shapes the trajectory; the returned estimate
    // is still the γ-step fixed point it lands on.
    if cfg.h > 1 {
        let m0 = cfg.m0.unwrap_or((n + d).div_ceil(2)).clamp(d + 1, n);
        let mut size = m0.min(m);
        while size < m {
            md2 = distances(data, &mu, &metric_inv)?;
            let grown = smallest_m(&md2, size);
            if cfg.known_mu.is_none() {
                mu = trimmed_mean(data, &grown);
            }
            if cfg.metric == DistanceMetric::Refitted {
                let raw = scatter_about(data, &grown, &mu, 1.0);
                metric_inv = try_invert_symmetric(&raw).map_err(|_| Error::DegenerateSubset)?;
            }
            size = (size + cfg.h).min(m);
        }
    }

    for _ in 0..cfg.max_sweeps {
        md2 = distances(data, &mu, &metric_inv)?;
        let next = smallest_m(&md2, m);
        if next == subset {
            converged = true;
            break;
        }
        subset = next;
        if cfg.known_mu.is_none() {
            mu = trimmed_mean(data, &subset);
        }
        if cfg.metric == DistanceMetric::Refitted {
            let raw = scatter_about(data, &subset, &mu, 1.0);
            metric_inv = try_invert_symmetric(&raw).map_err(|_| Error::DegenerateSubset)?;
        }
    }

    let sigma_hat = scatter_about(data, &subset, &mu, cfg.c_gamma);
    let mut mask = vec![false; n];
    for &i in &subset {
        mask[i] = true;
    }
    Ok(ScatterEstimate {
        mu_hat: mu,
        sigma_hat,
        subset_mask: mask,
        md2,
        c_gamma: cfg.c_gamma,
        subset_size: m,
        converged,
    })
}

/// Classical sample covariance with divisor n, reported as a `ScatterEstimate`
/// with a full subset. Distances fall back to squared Euclidean norms when the
/// covariance is singular.
pub fn sample_covariance(data: &[Vec<f64>]) -> Result<ScatterEstimate> {
    let n = data.len();
    if n < 2 {
        return Err(Error::invalid("sample covariance needs n >= 2"));
    }
    let d = data[0].len();
    if d == 0 || data.iter().any(|y| y.len() != d) {
        return Err(Error::dim("observations must share a positive dimension"));
    }
    let all: Vec<usize> = (0..n).collect();
    let mu = trimmed_mean(data, &all);
    let sigma = scatter_about(data, &all, &mu, 1.0);
    let md2 = match try_invert_symmetric(&sigma) {
        Ok(inv) => distances(data, &mu, &inv)?,
        Err(_) => data
            .iter()
            .map(|y| y.iter().zip(&mu).map(|(a, b)| (a - b) * (a - b)).sum())
            .collect(),
    };
    Ok(ScatterEstimate {
        mu_hat: mu,
        sigma_hat: sigma,
        subset_mask: vec![true; n],
        md2,
        c_gamma: 1.0,
        subset_size: n,
        converged: true,
    })
}

#[derive(Debug, Clone)]
pub struct KurtosisEstimate {
    pub kappa: f64,
    pub per_coordinate: Vec<f64>,
}

/// Kurtosis parameter estimate: per coordinate κ̂ⱼ = [m₄ⱼ/σⱼⱼ² − 3]/3 with m₄ⱼ
/// the fourth moment about `mu`, averaged over coordinates. `sigma_diag`
/// supplies the σⱼⱼ (variance-scale) entries.
pub fn kurtosis_estimate(
    data: &[Vec<f64>],
    mu: &[f64],
    sigma_diag: &[f64],
) -> Result<KurtosisEstimate> {
    let n = data.len();
    if n < 4 {
        return Err(Error::invalid("kurtosis estimate needs n >= 4"));
    }
    let d = mu.len();
    if sigma_diag.len() != d || data.iter().any(|y| y.len() != d) {
        return Err(Error::dim("kurtosis_estimate dimension mismatch"));
    }
    if sigma_diag.iter().any(|&v| v <= 0.0 || !v.is_finite()) {
        return Err(Error::invalid("sigma_diag entries must be positive"));
    }
    let inv_n = 1.0 / n as f64;
    let mut per = vec![0.0; d];
    for (k, p) in per.iter_mut().enumerate() {
        let m4: f64 = data.iter().map(|y| (y[k] - mu[k]).powi(4)).sum::<f64>() * inv_n;
        *p = (m4 / (sigma_diag[k] * sigma_diag[k]) - 3.0) / 3.0;
    }
    let kappa = per.iter().sum::<f64>() / d as f64;
    if !kappa.is_finite() {
        return Err(Error::invalid("kurtosis estimate is not finite"));
    }
    Ok(KurtosisEstimate { kappa, per_coordinate: per })
}
