//! Dense linear-algebra kernels: vec, Kronecker products, commutation matrices,
//! a cyclic Jacobi eigensolver for symmetric matrices, Cholesky factorization and
//! SPD inversion, and squared Mahalanobis distances.
//!
//! Everything here works on small row-major matrices (the workloads top out around
//! d² = 16 for the asymptotic covariance matrices), so simplicity and provable
//! convergence win over performance.

use crate::error::{Error, Result};

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::dim(format!(
                "expected {} entries for a {}x{} matrix, got {}",
                rows * cols,
                rows,
                cols,
                data.len()
            )));
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Diagonal matrix from the given entries.
    pub fn diagonal(entries: &[f64]) -> Self {
        let n = entries.len();
        let mut m = Matrix::zeros(n, n);
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[r * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.data[k * other.cols + c];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("matrix addition requires equal shapes"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::dim("matrix subtraction requires equal shapes"));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Largest absolute deviation from symmetry, scaled by the largest entry.
    pub fn symmetry_deviation(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
        let mut dev = 0.0f64;
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        dev / scale
    }

    /// (M + Mᵀ)/2, for squashing roundoff accumulated through products.
    pub fn symmetrized(&self) -> Matrix {
        let mut out = self.clone();
        for r in 0..self.rows {
            for c in (r + 1)..self.cols {
                let v = 0.5 * (self.get(r, c) + self.get(c, r));
                out.set(r, c, v);
                out.set(c, r, v);
            }
        }
        out
    }

    /// Outer product v·wᵀ.
    pub fn outer(v: &[f64], w: &[f64]) -> Matrix {
        let mut out = Matrix::zeros(v.len(), w.len());
        for (r, &a) in v.iter().enumerate() {
            for (c, &b) in w.iter().enumerate() {
                out.data[r * w.len() + c] = a * b;
            }
        }
        out
    }

    /// M·v for a vector v.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::dim("matvec dimension mismatch"));
        }
        let mut out = vec![0.0; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
        }
        Ok(out)
    }

    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).collect()
    }
}

/// Symmetric positive-definite matrix. Construction verifies symmetry
/// (relative tolerance 1e-10) and that a Cholesky factorization exists.
#[derive(Debug, Clone, PartialEq)]
pub struct SpdMatrix {
    inner: Matrix,
}

impl SpdMatrix {
    pub const SYMMETRY_TOL: f64 = 1e-10;

    pub fn new(m: Matrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
        }
        if !m.all_finite() {
            return Err(Error::invalid("SPD matrix entries must be finite"));
        }
        let dev = m.symmetry_deviation();
        if dev > Self::SYMMETRY_TOL {
            return Err(Error::NotSymmetric { deviation: dev, tolerance: Self::SYMMETRY_TOL });
        }
        let sym = m.symmetrized();
        cholesky_raw(&sym)?;
        Ok(SpdMatrix { inner: sym })
    }

    pub fn identity(n: usize) -> Self {
        SpdMatrix { inner: Matrix::identity(n) }
    }

    /// c·I for c > 0.
    pub fn scaled_identity(n: usize, c: f64) -> Result<Self> {
        if c <= 0.0 || !c.is_finite() {
            return Err(Error::invalid("scale must be positive and finite"));
        }
        Ok(SpdMatrix { inner: Matrix::identity(n).scale(c) })
    }

    pub fn dim(&self) -> usize {
        self.inner.rows()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.inner
    }

    pub fn into_matrix(self) -> Matrix {
        self.inner
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.inner.get(r, c)
    }

    pub fn diag(&self) -> Vec<f64> {
        self.inner.diag()
    }
}

/// Column-stacking vec operator.
pub fn vec_columns(m: &Matrix) -> Vec<f64> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut out = vec![0.0; rows * cols];
    for c in 0..cols {
        for r in 0..rows {
            out[c * rows + r] = m.get(r, c);
        }
    }
    out
}

/// Kronecker product a ⊗ b.
pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (p, q) = (a.rows(), a.cols());
    let (r, s) = (b.rows(), b.cols());
    let mut out = Matrix::zeros(p * r, q * s);
    for i in 0..p {
        for j in 0..q {
            let aij = a.get(i, j);
            if aij == 0.0 {
                continue;
            }
            for k in 0..r {
                for l in 0..s {
                    out.set(i * r + k, j * s + l, aij * b.get(k, l));
                }
            }
        }
    }
    out
}

/// The d²×d² commutation matrix K with K·vec(A) = vec(Aᵀ) for every d×d A.
pub fn commutation_matrix(d: usize) -> Matrix {
    let n = d * d;
    let mut k = Matrix::zeros(n, n);
    // vec(A)[c*d + r] = A[r,c]; we need (K vec(A))[c*d + r] = A[c,r] = vec(A)[r*d + c].
    for r in 0..d {
        for c in 0..d {
            k.set(c * d + r, r * d + c, 1.0);
        }
    }
    k
}

const JACOBI_MAX_SWEEPS: usize = 100;
const SYM_EIG_INPUT_TOL: f64 = 1e-8;

/// Eigenvalues of a symmetric matrix, descending, via cyclic Jacobi rotations.
///
/// The input is symmetrized as (S+Sᵀ)/2 before solving; inputs asymmetric beyond
/// a relative 1e-8 are rejected.
pub fn sym_eigenvalues(s: &Matrix) -> Result<Vec<f64>> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    let dev = s.symmetry_deviation();
    if dev > SYM_EIG_INPUT_TOL {
        return Err(Error::NotSymmetric { deviation: dev, tolerance: SYM_EIG_INPUT_TOL });
    }
    let n = s.rows();
    let mut a = s.symmetrized();
    let scale = a.frobenius_norm().max(f64::MIN_POSITIVE);

    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut off = 0.0;
        for r in 0..n {
            for c in (r + 1)..n {
                off += a.get(r, c) * a.get(r, c);
            }
        }
        if (2.0 * off).sqrt() <= 1e-15 * scale {
            let mut eig = a.diag();
            eig.sort_by(|x, y| y.partial_cmp(x).expect("finite eigenvalues"));
            return Ok(eig);
        }
        for p in 0..n - 1 {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = a.get(p, p);
                let aqq = a.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                // stable tangent of the rotation angle
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, c * akp - sn * akq);
                    a.set(k, q, sn * akp + c * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, c * apk - sn * aqk);
                    a.set(q, k, sn * apk + c * aqk);
                }
            }
        }
    }
    Err(Error::EigenNoConvergence { sweeps: JACOBI_MAX_SWEEPS })
}

fn cholesky_raw(s: &Matrix) -> Result<Matrix> {
    let n = s.rows();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = s.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::NotPositiveDefinite { index: i, pivot: sum });
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Lower-triangular L with L·Lᵀ = s.
pub fn cholesky(s: &SpdMatrix) -> Matrix {
    cholesky_raw(s.matrix()).expect("SPD invariant guarantees a Cholesky factor")
}

/// Attempt a Cholesky factorization of a plain symmetric matrix.
pub fn try_cholesky(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(Error::NotSquare { rows: s.rows(), cols: s.cols() });
    }
    cholesky_raw(s)
}

/// Inverse of an SPD matrix via its Cholesky factor.
pub fn invert_spd(s: &SpdMatrix) -> SpdMatrix {
    let n = s.dim();
    let l = cholesky(s);
    // forward-solve L X = I, column by column
    let mut x = Matrix::zeros(n, n);
    for col in 0..n {
        for i in 0..n {
            let mut sum = if i == col { 1.0 } else { 0.0 };
            for k in 0..i {
                sum -= l.get(i, k) * x.get(k, col);
            }
            x.set(i, col, sum / l.get(i, i));
        }
    }
    // back-solve Lᵀ Y = X so that Y = S⁻¹
    let mut y = Matrix::zeros(n, n);
    for col in 0..n {
        for i in (0..n).rev() {
            let mut sum = x.get(i, col);
            for k in (i + 1)..n {
                sum -= l.get(k, i) * y.get(k, col);
            }
            y.set(i, col, sum / l.get(i, i));
        }
    }
    SpdMatrix { inner: y.symmetrized() }
}

/// Inverse of a plain symmetric positive-definite matrix, if it is one.
pub fn try_invert_symmetric(s: &Matrix) -> Result<SpdMatrix> {
    let spd = SpdMatrix::new(s.symmetrized())?;
    Ok(invert_spd(&spd))
}

/// Squared Mahalanobis distance (y−μ)ᵀ Σ⁻¹ (y−μ).
pub fn mahalanobis_sq(y: &[f64], mu: &[f64], sigma_inv: &SpdMatrix) -> Result<f64> {
    if y.len() != mu.len() || y.len() != sigma_inv.dim() {
        return Err(Error::dim(format!(
            "mahalanobis_sq: point dim {}, mean dim {}, matrix dim {}",
            y.len(),
            mu.len(),
            sigma_inv.dim()
        )));
    }
    let d = y.len();
    let mut q = 0.0;
    for r in 0..d {
        let dr = y[r] - mu[r];
        if dr == 0.0 {
            continue;
        }
        for c in 0..d {
            q += dr * sigma_inv.get(r, c) * (y[c] - mu[c]);
        }
    }
    // PSD quadratic form; tiny negatives are roundoff
    Ok(q.max(0.0))
}
