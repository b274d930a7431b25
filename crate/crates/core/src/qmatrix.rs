//! Quaternionic matrices acting right-linearly on `H^m`.
//!
//! A quaternion `q = w + x e1 + y e2 + z e3` splits as `q = z1 + z2 e2` with
//! `z1 = w + x i`, `z2 = y + z i` in the reference plane `C_{e1}`. A matrix
//! `A = A1 + A2 e2` is represented by the complex adjoint
//! `χ(A) = [[A1, A2], [-conj(A2), conj(A1)]]`, and a vector `v = v1 + v2 e2`
//! by `[v1; -conj(v2)]`, so that `χ(A) φ(v) = φ(A v)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::algebra::{CliffordElement, Quaternion};
use crate::linalg::{self, CMat, CVec};
use crate::operator::{quaternion_of, OperatorError, SliceOperator, Space};

/// Column vector in `H^m`.
pub type QVector = Vec<Quaternion>;

/// Square quaternionic matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct QMatrix {
    m: usize,
    entries: Vec<Quaternion>,
}

impl fmt::Debug for QMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "QMatrix {}x{} [", self.m, self.m)?;
        for r in 0..self.m {
            let row: Vec<String> = (0..self.m).map(|c| format!("({})", self[(r, c)])).collect();
            writeln!(f, "  {}", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl QMatrix {
    pub fn zeros(m: usize) -> Self {
        Self {
            m,
            entries: vec![Quaternion::ZERO; m * m],
        }
    }

    pub fn identity(m: usize) -> Self {
        Self::scalar(m, Quaternion::ONE)
    }

    /// `a I`, the matrix of left multiplication by `a`.
    pub fn scalar(m: usize, a: Quaternion) -> Self {
        Self::from_diag(&vec![a; m])
    }

    pub fn from_diag(d: &[Quaternion]) -> Self {
        let m = d.len();
        let mut out = Self::zeros(m);
        for (k, &q) in d.iter().enumerate() {
            out[(k, k)] = q;
        }
        out
    }

    pub fn from_fn(m: usize, f: impl Fn(usize, usize) -> Quaternion) -> Self {
        let entries = (0..m * m).map(|k| f(k / m, k % m)).collect();
        Self { m, entries }
    }

    pub fn from_rows(rows: Vec<Vec<Quaternion>>) -> Result<Self, OperatorError> {
        let m = rows.len();
        if m == 0 {
            return Err(OperatorError::Shape("empty matrix".into()));
        }
        if let Some(r) = rows.iter().position(|r| r.len() != m) {
            return Err(OperatorError::Shape(format!(
                "row {r} has {} entries, expected {m}",
                rows[r].len()
            )));
        }
        Ok(Self {
            m,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Real matrix embedded as a quaternionic one.
    pub fn from_real(m: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), m * m);
        Self {
            m,
            entries: values.iter().map(|&x| Quaternion::real(x)).collect(),
        }
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.m
    }

    pub fn entries(&self) -> &[Quaternion] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Quaternion>> {
        self.entries.chunks(self.m).map(|r| r.to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.m, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            m: self.m,
            entries: self.entries.iter().map(|q| q.scale(s)).collect(),
        }
    }

    /// `T ∘ L_a`: entries multiplied by `a` on the right.
    pub fn mul_scalar_right(&self, a: Quaternion) -> Self {
        Self {
            m: self.m,
            entries: self.entries.iter().map(|&q| q * a).collect(),
        }
    }

    /// `L_a ∘ T`: entries multiplied by `a` on the left.
    pub fn mul_scalar_left(&self, a: Quaternion) -> Self {
        Self {
            m: self.m,
            entries: self.entries.iter().map(|&q| a * q).collect(),
        }
    }

    pub fn apply(&self, v: &[Quaternion]) -> Result<QVector, OperatorError> {
        if v.len() != self.m {
            return Err(OperatorError::LengthMismatch {
                expected: self.m,
                found: v.len(),
            });
        }
        Ok((0..self.m)
            .map(|r| (0..self.m).map(|c| self[(r, c)] * v[c]).sum())
            .collect())
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut acc = Self::identity(self.m);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Frobenius norm of the quaternion entries.
    pub fn frobenius(&self) -> f64 {
        self.entries
            .iter()
            .map(|q| q.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Frobenius distance.
    pub fn dist(&self, other: &Self) -> f64 {
        (self - other).frobenius()
    }

    pub fn is_finite(&self) -> bool {
        self.entries.iter().all(|q| q.is_finite())
    }

    /// Largest deviation from being Hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        self.dist(&self.adjoint())
    }

    pub fn embed(&self) -> CMat {
        embed(self)
    }
}

impl std::ops::Index<(usize, usize)> for QMatrix {
    type Output = Quaternion;
    fn index(&self, (r, c): (usize, usize)) -> &Quaternion {
        &self.entries[r * self.m + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Quaternion {
        &mut self.entries[r * self.m + c]
    }
}

impl<'a> Mul<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn mul(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.m, o.m, "QMatrix size mismatch");
        let m = self.m;
        QMatrix::from_fn(m, |r, c| (0..m).map(|k| self[(r, k)] * o[(k, c)]).sum())
    }
}

impl<'a> Add<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn add(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.m, o.m, "QMatrix size mismatch");
        QMatrix {
            m: self.m,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<'a> Sub<&'a QMatrix> for &'a QMatrix {
    type Output = QMatrix;
    fn sub(self, o: &QMatrix) -> QMatrix {
        assert_eq!(self.m, o.m, "QMatrix size mismatch");
        QMatrix {
            m: self.m,
            entries: self
                .entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl Neg for &QMatrix {
    type Output = QMatrix;
    fn neg(self) -> QMatrix {
        self.scale(-1.0)
    }
}

/// Complex adjoint `χ(A)`.
pub fn embed(a: &QMatrix) -> CMat {
    let m = a.m;
    let mut out = CMat::zeros(2 * m, 2 * m);
    for r in 0..m {
        for c in 0..m {
            let q = a[(r, c)];
            let z1 = Complex64::new(q.w, q.x);
            let z2 = Complex64::new(q.y, q.z);
            out[(r, c)] = z1;
            out[(r, m + c)] = z2;
            out[(m + r, c)] = -z2.conj();
            out[(m + r, m + c)] = z1.conj();
        }
    }
    out
}

/// Relative tolerance for the block pattern accepted by [`unembed`].
pub const SYMPLECTIC_TOL: f64 = 1e-8;

/// Inverse of [`embed`]; the blocks are averaged so round-off is symmetrized away.
pub fn unembed(c: &CMat) -> Result<QMatrix, OperatorError> {
    if c.nrows() != c.ncols() || !c.nrows().is_multiple_of(2) || c.nrows() == 0 {
        return Err(OperatorError::Shape(format!(
            "complex adjoint must be 2m x 2m, got {} x {}",
            c.nrows(),
            c.ncols()
        )));
    }
    let m = c.nrows() / 2;
    let scale = linalg::frobenius(c).max(1.0);
    let mut deviation = 0.0f64;
    let mut out = QMatrix::zeros(m);
    for r in 0..m {
        for k in 0..m {
            let a11 = c[(r, k)];
            let a12 = c[(r, m + k)];
            let a21 = c[(m + r, k)];
            let a22 = c[(m + r, m + k)];
            deviation = deviation
                .max((a11 - a22.conj()).norm())
                .max((a12 + a21.conj()).norm());
            let z1 = (a11 + a22.conj()) * 0.5;
            let z2 = (a12 - a21.conj()) * 0.5;
            out[(r, k)] = Quaternion::new(z1.re, z1.im, z2.re, z2.im);
        }
    }
    if deviation > SYMPLECTIC_TOL * scale {
        return Err(OperatorError::NotSymplectic { deviation });
    }
    Ok(out)
}

/// `φ(v) = [v1; -conj(v2)]`.
pub fn embed_vector(v: &[Quaternion]) -> CVec {
    let m = v.len();
    let mut out = CVec::zeros(2 * m);
    for (k, q) in v.iter().enumerate() {
        out[k] = Complex64::new(q.w, q.x);
        out[m + k] = -Complex64::new(q.y, q.z).conj();
    }
    out
}

pub fn unembed_vector(c: &CVec) -> QVector {
    let m = c.len() / 2;
    (0..m)
        .map(|k| {
            let z1 = c[k];
            let z2 = -c[m + k].conj();
            Quaternion::new(z1.re, z1.im, z2.re, z2.im)
        })
        .collect()
}

/// Solves `A x = b`.
pub fn qsolve(a: &QMatrix, b: &[Quaternion]) -> Result<QVector, OperatorError> {
    if b.len() != a.m {
        return Err(OperatorError::LengthMismatch {
            expected: a.m,
            found: b.len(),
        });
    }
    let inv = linalg::inverse(&embed(a))?;
    Ok(unembed_vector(&(inv * embed_vector(b))))
}

/// Inverse matrix; fails with `Singular` when `σ_min/σ_max < 1e-12`.
pub fn qinv(a: &QMatrix) -> Result<QMatrix, OperatorError> {
    unembed(&linalg::inverse(&embed(a))?)
}

/// Operator norm `σ_max(χ(A))`.
pub fn op_norm(a: &QMatrix) -> f64 {
    linalg::spectral_norm(&embed(a))
}

/// `⟨x, y⟩ = Σ_k conj(y_k) x_k`.
pub fn inner(x: &[Quaternion], y: &[Quaternion]) -> Result<Quaternion, OperatorError> {
    if x.len() != y.len() {
        return Err(OperatorError::LengthMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    Ok(x.iter().zip(y).map(|(a, b)| b.conj() * *a).sum())
}

/// `‖x‖ = sqrt(⟨x, x⟩)`.
pub fn norm(x: &[Quaternion]) -> f64 {
    x.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// `v λ` componentwise.
pub fn vec_mul_right(v: &[Quaternion], lambda: Quaternion) -> QVector {
    v.iter().map(|&q| q * lambda).collect()
}

pub fn vec_add(a: &[Quaternion], b: &[Quaternion]) -> QVector {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn vec_sub(a: &[Quaternion], b: &[Quaternion]) -> QVector {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

impl SliceOperator for QMatrix {
    fn space(&self) -> Space {
        Space::Quaternion { m: self.m }
    }

    fn rep(&self) -> CMat {
        embed(self)
    }

    fn from_rep(space: Space, rep: &CMat) -> Result<Self, OperatorError> {
        match space {
            Space::Quaternion { m } if rep.nrows() == 2 * m => unembed(rep),
            _ => Err(OperatorError::Shape(format!(
                "{space:?} does not match a quaternionic matrix"
            ))),
        }
    }
}

impl QMatrix {
    /// `a I` from a Clifford element in `R_2`.
    pub fn scalar_element(m: usize, a: &CliffordElement) -> Self {
        Self::scalar(m, quaternion_of(a))
    }
}
