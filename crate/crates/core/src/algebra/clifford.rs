//! Real Clifford algebra `R_n` with `e_i^2 = -1` and anticommuting units.
//!
//! Basis blades `e_A` are indexed by bitmasks: bit `k-1` set means `e_k ∈ A`.
//! The quaternions are identified with `R_2` through `e3 = e1 e2 = e_{12}`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::{AlgebraError, Quaternion};

/// Largest supported number of generators.
pub const MAX_CLIFFORD_DIM: usize = 5;
const MAX_BLADES: usize = 1 << MAX_CLIFFORD_DIM;

/// Sign of `e_A e_B` as a multiple of `e_{A xor B}`.
#[inline]
pub fn blade_sign(a: usize, b: usize) -> f64 {
    // Reordering swaps: for each generator in B, count generators of A with a larger index.
    let mut swaps = 0u32;
    let mut bb = b;
    while bb != 0 {
        let low = bb.trailing_zeros();
        swaps += (a >> (low + 1)).count_ones();
        bb &= bb - 1;
    }
    // e_k e_k = -1 for every shared generator.
    swaps += (a & b).count_ones();
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Clifford conjugation sign for a blade of grade `g` (grades 0,1,2,3 mod 4 map to +,-,-,+).
#[inline]
pub fn conj_sign(grade: u32) -> f64 {
    match grade % 4 {
        0 | 3 => 1.0,
        _ => -1.0,
    }
}

/// Element `Σ_A x_A e_A` of `R_n`, `n ≤ 5`.
#[derive(Clone, Copy, PartialEq)]
pub struct CliffordElement {
    n: usize,
    coeffs: [f64; MAX_BLADES],
}

impl fmt::Debug for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CliffordElement")
            .field("n", &self.n)
            .field("coeffs", &self.coeffs())
            .finish()
    }
}

impl fmt::Display for CliffordElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (mask, &c) in self.coeffs().iter().enumerate() {
            if c == 0.0 && !(mask == 0 && self.coeffs().iter().all(|&x| x == 0.0)) {
                continue;
            }
            if !first {
                write!(f, " ")?;
            }
            first = false;
            if mask == 0 {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c:+}e{}", blade_label(mask))?;
            }
        }
        Ok(())
    }
}

/// Digits of the generators in a blade, e.g. `0b101 -> "13"`.
pub fn blade_label(mask: usize) -> String {
    (0..MAX_CLIFFORD_DIM)
        .filter(|k| mask & (1 << k) != 0)
        .map(|k| char::from_digit(k as u32 + 1, 10).unwrap_or('?'))
        .collect()
}

impl CliffordElement {
    pub fn zero(n: usize) -> Self {
        assert!(
            n <= MAX_CLIFFORD_DIM,
            "Clifford dimension {n} exceeds {MAX_CLIFFORD_DIM}"
        );
        Self {
            n,
            coeffs: [0.0; MAX_BLADES],
        }
    }

    pub fn scalar(n: usize, x: f64) -> Self {
        let mut e = Self::zero(n);
        e.coeffs[0] = x;
        e
    }

    pub fn one(n: usize) -> Self {
        Self::scalar(n, 1.0)
    }

    /// Basis blade `e_A` for the bitmask `mask`.
    pub fn blade(n: usize, mask: usize) -> Self {
        assert!(mask < (1 << n), "blade {mask:#b} outside R_{n}");
        let mut e = Self::zero(n);
        e.coeffs[mask] = 1.0;
        e
    }

    /// Generator `e_k`, `1 ≤ k ≤ n`.
    pub fn unit(n: usize, k: usize) -> Self {
        assert!(k >= 1 && k <= n, "generator e{k} outside R_{n}");
        Self::blade(n, 1 << (k - 1))
    }

    pub fn from_coeffs(n: usize, coeffs: &[f64]) -> Result<Self, AlgebraError> {
        if n > MAX_CLIFFORD_DIM {
            return Err(AlgebraError::DimensionTooLarge {
                n,
                max: MAX_CLIFFORD_DIM,
            });
        }
        if coeffs.len() != 1 << n {
            return Err(AlgebraError::DimensionMismatch {
                expected: 1 << n,
                found: coeffs.len(),
            });
        }
        let mut e = Self::zero(n);
        e.coeffs[..coeffs.len()].copy_from_slice(coeffs);
        Ok(e)
    }

    /// Quaternion as an element of `R_2` (or a larger algebra when `n > 2`).
    pub fn from_quaternion(n: usize, q: Quaternion) -> Self {
        assert!(n >= 2, "quaternions need at least two generators");
        let mut e = Self::zero(n);
        e.coeffs[0] = q.w;
        e.coeffs[1] = q.x;
        e.coeffs[2] = q.y;
        e.coeffs[3] = q.z;
        e
    }

    /// Inverse of [`from_quaternion`](Self::from_quaternion); fails when blades beyond `e_{12}` are set.
    pub fn to_quaternion(&self) -> Result<Quaternion, AlgebraError> {
        if self.coeffs()[4.min(self.len())..].iter().any(|&c| c != 0.0) {
            return Err(AlgebraError::NotQuaternion);
        }
        let c = |k: usize| self.coeffs.get(k).copied().unwrap_or(0.0);
        Ok(Quaternion::new(c(0), c(1), c(2), c(3)))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of blades, `2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..1 << self.n]
    }

    #[inline]
    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    #[inline]
    pub fn set_coeff(&mut self, mask: usize, value: f64) {
        assert!(mask < self.len());
        self.coeffs[mask] = value;
    }

    /// Scalar part.
    #[inline]
    pub fn re(&self) -> f64 {
        self.coeffs[0]
    }

    /// Everything except the scalar part.
    pub fn im(&self) -> Self {
        let mut e = *self;
        e.coeffs[0] = 0.0;
        e
    }

    /// Canonical inclusion into `R_m`, `m ≥ n`.
    pub fn lift(&self, m: usize) -> Self {
        assert!(m >= self.n && m <= MAX_CLIFFORD_DIM);
        let mut e = *self;
        e.n = m;
        e
    }

    /// Euclidean norm of the coefficient vector.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs().iter().map(|c| c * c).sum()
    }

    /// Clifford conjugation: reverses products and negates generators.
    pub fn conj(&self) -> Self {
        let mut e = *self;
        for mask in 0..self.len() {
            e.coeffs[mask] *= conj_sign(mask.count_ones());
        }
        e
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut e = *self;
        for c in e.coeffs[..self.len()].iter_mut() {
            *c *= s;
        }
        e
    }

    pub fn add_real(&self, x: f64) -> Self {
        let mut e = *self;
        e.coeffs[0] += x;
        e
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs().iter().all(|c| c.is_finite())
    }

    /// True when only the scalar and grade-one blades are set.
    pub fn is_paravector(&self, tol: f64) -> bool {
        self.coeffs()
            .iter()
            .enumerate()
            .all(|(mask, c)| mask.count_ones() <= 1 || c.abs() <= tol)
    }

    pub fn dist(&self, other: &Self) -> f64 {
        let m = self.n.max(other.n);
        (self.lift(m) - other.lift(m)).norm()
    }

    /// Product with a dimension check.
    pub fn try_mul(&self, rhs: &Self) -> Result<Self, AlgebraError> {
        if self.n != rhs.n {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.n,
                found: rhs.n,
            });
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &Self) -> Self {
        let len = self.len();
        let mut out = Self::zero(self.n);
        for a in 0..len {
            let ca = self.coeffs[a];
            if ca == 0.0 {
                continue;
            }
            for b in 0..len {
                let cb = rhs.coeffs[b];
                if cb == 0.0 {
                    continue;
                }
                out.coeffs[a ^ b] += blade_sign(a, b) * ca * cb;
            }
        }
        out
    }

    /// Inverse for elements with `x conj(x)` real (paravectors, quaternions).
    pub fn inv(&self) -> Option<Self> {
        let c = self.conj();
        let p = self.mul_unchecked(&c);
        let scale = self.norm_sqr().max(f64::MIN_POSITIVE);
        if p.im().norm() > 1e-12 * scale || p.re() == 0.0 {
            return None;
        }
        Some(c.scale(1.0 / p.re()))
    }

    /// Real matrix of left multiplication `y ↦ self·y` in the blade basis.
    pub fn left_matrix(&self) -> Vec<f64> {
        let len = self.len();
        let mut m = vec![0.0; len * len];
        for col in 0..len {
            for a in 0..len {
                let ca = self.coeffs[a];
                if ca != 0.0 {
                    m[(a ^ col) * len + col] += blade_sign(a, col) * ca;
                }
            }
        }
        m
    }
}

/// Clifford product with a dimension check.
pub fn clifford_mul(
    a: &CliffordElement,
    b: &CliffordElement,
) -> Result<CliffordElement, AlgebraError> {
    a.try_mul(b)
}

impl Add for CliffordElement {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        assert_eq!(self.n, o.n, "Clifford dimension mismatch");
        let mut e = self;
        for k in 0..self.len() {
            e.coeffs[k] += o.coeffs[k];
        }
        e
    }
}

impl Sub for CliffordElement {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        assert_eq!(self.n, o.n, "Clifford dimension mismatch");
        let mut e = self;
        for k in 0..self.len() {
            e.coeffs[k] -= o.coeffs[k];
        }
        e
    }
}

impl Neg for CliffordElement {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Panics on dimension mismatch; use [`CliffordElement::try_mul`] for a checked product.
impl Mul for CliffordElement {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        assert_eq!(self.n, o.n, "Clifford dimension mismatch");
        self.mul_unchecked(&o)
    }
}

impl Mul<f64> for CliffordElement {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}
