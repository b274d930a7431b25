//! Dense complex linear algebra used by the operator representations.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use thiserror::Error;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Ratio `σ_min/σ_max` below which a matrix is treated as singular.
pub const SINGULAR_RATIO: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (sigma_min/sigma_max = {ratio:.3e})")]
    Singular { ratio: f64 },
    #[error("Schur iteration did not converge")]
    EigenFailure,
    #[error("matrix is not diagonalizable (eigenvector condition {cond:.3e})")]
    Defective { cond: f64 },
    #[error("matrix is not square")]
    NotSquare,
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m
        .clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Largest singular value.
pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Smallest singular value.
pub fn sigma_min(m: &CMat) -> f64 {
    singular_values(m).last().copied().unwrap_or(0.0)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `σ_max / σ_min`, infinite for singular input.
pub fn condition_number(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Inverse through the SVD, rejecting matrices with `σ_min/σ_max < 1e-12`.
pub fn inverse(m: &CMat) -> Result<CMat, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare);
    }
    let svd = m.clone().svd(true, true);
    let s = &svd.singular_values;
    let smax = s.iter().copied().fold(0.0, f64::max);
    let smin = s.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = if smax > 0.0 { smin / smax } else { 0.0 };
    if !(ratio >= SINGULAR_RATIO) {
        return Err(LinalgError::Singular { ratio });
    }
    let (u, vt) = match (svd.u, svd.v_t) {
        (Some(u), Some(vt)) => (u, vt),
        _ => return Err(LinalgError::EigenFailure),
    };
    // A^{-1} = V Σ^{-1} U^*
    let mut v = vt.adjoint();
    for (j, sj) in s.iter().enumerate() {
        let inv = 1.0 / sj;
        v.column_mut(j).iter_mut().for_each(|z| *z *= inv);
    }
    Ok(v * u.adjoint())
}

/// LU-based inverse without the conditioning check, for inner loops whose
/// inputs were already validated.
pub fn inverse_fast(m: &CMat) -> Result<CMat, LinalgError> {
    m.clone()
        .lu()
        .try_inverse()
        .ok_or(LinalgError::Singular { ratio: 0.0 })
}

/// Complex Schur form `A = Q R Q^*`.
pub fn schur(m: &CMat) -> Result<(CMat, CMat), LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare);
    }
    // Clustered eigenvalues deflate slowly at machine precision, so retry with looser tolerances.
    let budget = 200 * m.nrows().max(1);
    [1.0, 1e3, 1e6]
        .iter()
        .find_map(|f| Schur::try_new(m.clone(), f * f64::EPSILON, budget))
        .map(|s| s.unpack())
        .ok_or(LinalgError::EigenFailure)
}

pub fn eigenvalues(m: &CMat) -> Result<Vec<Complex64>, LinalgError> {
    let (_, r) = schur(m)?;
    Ok((0..r.nrows()).map(|k| r[(k, k)]).collect())
}

/// Eigendecomposition `A = V diag(λ) V^{-1}`.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub values: Vec<Complex64>,
    pub vectors: CMat,
    pub inverse: CMat,
    pub condition: f64,
}

/// Largest eigenvector-basis condition number accepted as diagonalizable.
pub const MAX_EIGENVECTOR_COND: f64 = 1e10;

pub fn eigen_decompose(m: &CMat) -> Result<EigenDecomposition, LinalgError> {
    let n = m.nrows();
    let (q, r) = schur(m)?;
    let scale = frobenius(&r).max(f64::MIN_POSITIVE);
    let cluster = 1e-10 * scale;
    let mut y = CMat::zeros(n, n);
    for j in 0..n {
        let lambda = r[(j, j)];
        y[(j, j)] = Complex64::new(1.0, 0.0);
        let mut xnorm = 1.0f64;
        for i in (0..j).rev() {
            let mut num = Complex64::new(0.0, 0.0);
            for k in (i + 1)..=j {
                num += r[(i, k)] * y[(k, j)];
            }
            let den = r[(i, i)] - lambda;
            let xi = if den.norm() <= cluster {
                // Equal eigenvalues: a diagonalizable matrix has no coupling here.
                if num.norm() > 1e-8 * scale * xnorm {
                    return Err(LinalgError::Defective {
                        cond: f64::INFINITY,
                    });
                }
                Complex64::new(0.0, 0.0)
            } else {
                -num / den
            };
            y[(i, j)] = xi;
            xnorm = xnorm.max(xi.norm());
        }
        let norm = y.column(j).norm();
        y.column_mut(j).iter_mut().for_each(|z| *z /= norm);
    }
    let condition = condition_number(&y);
    if !(condition <= MAX_EIGENVECTOR_COND) {
        return Err(LinalgError::Defective { cond: condition });
    }
    let y_inv = inverse(&y)?;
    let values = (0..n).map(|k| r[(k, k)]).collect();
    Ok(EigenDecomposition {
        values,
        vectors: &q * &y,
        inverse: y_inv * q.adjoint(),
        condition,
    })
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Complex copy of a real matrix.
pub fn complexify(m: &DMatrix<f64>) -> CMat {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Largest imaginary part magnitude.
pub fn max_imag(m: &CMat) -> f64 {
    m.iter().map(|z| z.im.abs()).fold(0.0, f64::max)
}
