//! Faithful complex representations shared by quaternionic matrices and
//! Clifford operators, so that every calculus runs on one matrix type.

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{CliffordElement, Quaternion};
use crate::linalg::{self, CMat, LinalgError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("complex matrix lacks the quaternionic block pattern (deviation {deviation:.3e})")]
    NotSymplectic { deviation: f64 },
    #[error("representation has a non-real entry (imaginary part {imag:.3e})")]
    NotReal { imag: f64 },
    #[error("vector length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("operator size {size} exceeds the limit {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The module an operator acts on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    /// `H^m`, represented on `C^{2m}`.
    Quaternion { m: usize },
    /// `R^m ⊗ R_n`, represented on `R^{m 2^n}` with index `B·m + k`.
    Clifford { n: usize, m: usize },
}

impl Space {
    /// Size of the representing matrix.
    pub fn rep_dim(&self) -> usize {
        match *self {
            Space::Quaternion { m } => 2 * m,
            Space::Clifford { n, m } => m << n,
        }
    }

    pub fn base_size(&self) -> usize {
        match *self {
            Space::Quaternion { m } | Space::Clifford { m, .. } => m,
        }
    }

    /// Dimension of the scalar algebra; quaternions are `R_2`.
    pub fn algebra_dim(&self) -> usize {
        match *self {
            Space::Quaternion { .. } => 2,
            Space::Clifford { n, .. } => n,
        }
    }

    /// Number of representation eigenvalues per unit of sphere multiplicity.
    pub fn multiplicity_divisor(&self) -> usize {
        match *self {
            Space::Quaternion { .. } => 2,
            Space::Clifford { n, .. } => 1 << n,
        }
    }

    pub fn identity(&self) -> CMat {
        linalg::identity(self.rep_dim())
    }

    /// Representation of left multiplication `v ↦ a v` by a scalar.
    pub fn scalar(&self, a: &CliffordElement) -> CMat {
        match *self {
            Space::Quaternion { m } => {
                let q = quaternion_of(a);
                let alpha = Complex64::new(q.w, q.x);
                let beta = Complex64::new(q.y, q.z);
                let mut out = CMat::zeros(2 * m, 2 * m);
                for k in 0..m {
                    out[(k, k)] = alpha;
                    out[(k, m + k)] = beta;
                    out[(m + k, k)] = -beta.conj();
                    out[(m + k, m + k)] = alpha.conj();
                }
                out
            }
            Space::Clifford { n, m } => {
                assert!(a.dim() <= n, "scalar from R_{} acting on R_{n}", a.dim());
                let l = a.lift(n).left_matrix();
                let len = 1usize << n;
                let mut out = CMat::zeros(m * len, m * len);
                for r in 0..len {
                    for col in 0..len {
                        let x = l[r * len + col];
                        if x != 0.0 {
                            for k in 0..m {
                                out[(r * m + k, col * m + k)] = Complex64::new(x, 0.0);
                            }
                        }
                    }
                }
                out
            }
        }
    }

    /// Representation of `u + v i` for a slice unit given as a Clifford element.
    pub fn slice_point(&self, i_rep: &CMat, z: Complex64) -> CMat {
        let mut out = i_rep * Complex64::new(z.im, 0.0);
        for k in 0..out.nrows() {
            out[(k, k)] += z.re;
        }
        out
    }
}

/// Reads a Clifford element as a quaternion, allowing elements of `R_0`/`R_1`.
pub fn quaternion_of(a: &CliffordElement) -> Quaternion {
    let c = |k: usize| if k < a.len() { a.coeff(k) } else { 0.0 };
    debug_assert!(
        a.coeffs().iter().skip(4).all(|&x| x == 0.0),
        "element outside the quaternions"
    );
    Quaternion::new(c(0), c(1), c(2), c(3))
}

/// Operators that admit a faithful complex matrix representation.
pub trait SliceOperator: Clone + Send + Sync + Sized {
    fn space(&self) -> Space;
    fn rep(&self) -> CMat;
    /// Reads an operator back from a representation matrix; checks the structure.
    fn from_rep(space: Space, rep: &CMat) -> Result<Self, OperatorError>;
}

/// Operator norm of any representable operator.
pub fn operator_norm<O: SliceOperator>(t: &O) -> f64 {
    linalg::spectral_norm(&t.rep())
}
