//! Paravectors and the decomposition of a point into `u + i v` on its slice.

use std::f64::consts::PI;

use super::{AlgebraError, CliffordElement, Quaternion};

/// Absolute tolerance on `(u, v)` used for sphere membership.
pub const SPHERE_TOL: f64 = 1e-9;

/// Paravector `x0 + x1 e1 + ... + xn en` in `R_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Paravector {
    pub x0: f64,
    pub xs: Vec<f64>,
}

impl Paravector {
    pub fn new(x0: f64, xs: Vec<f64>) -> Self {
        Self { x0, xs }
    }

    pub fn real(n: usize, x0: f64) -> Self {
        Self::new(x0, vec![0.0; n])
    }

    pub fn dim(&self) -> usize {
        self.xs.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.x0 * self.x0 + self.xs.iter().map(|x| x * x).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn im_norm(&self) -> f64 {
        self.xs.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x0, self.xs.iter().map(|x| -x).collect())
    }

    pub fn to_clifford(&self) -> CliffordElement {
        let n = self.dim();
        let mut e = CliffordElement::scalar(n, self.x0);
        for (k, &x) in self.xs.iter().enumerate() {
            e.set_coeff(1 << k, x);
        }
        e
    }

    /// Reads the scalar and grade-one parts; fails if higher grades are present.
    pub fn from_clifford(e: &CliffordElement) -> Result<Self, AlgebraError> {
        if !e.is_paravector(0.0) {
            return Err(AlgebraError::NotParavector);
        }
        let xs = (0..e.dim()).map(|k| e.coeff(1 << k)).collect();
        Ok(Self::new(e.re(), xs))
    }
}

/// Points of the scalar algebras that admit a slice decomposition.
pub trait SlicePoint {
    fn real_part(&self) -> f64;
    fn imag_norm(&self) -> f64;
    /// Unit imaginary direction `Im(q)/|Im(q)|` as a Clifford element, `None` when `Im(q) = 0`.
    fn imag_direction(&self) -> Option<CliffordElement>;
    /// Algebra dimension used for the default unit.
    fn algebra_dim(&self) -> usize;
}

impl SlicePoint for Quaternion {
    fn real_part(&self) -> f64 {
        self.w
    }
    fn imag_norm(&self) -> f64 {
        self.im_norm()
    }
    fn imag_direction(&self) -> Option<CliffordElement> {
        let v = self.im_norm();
        (v > 0.0).then(|| CliffordElement::from_quaternion(2, self.im().scale(1.0 / v)))
    }
    fn algebra_dim(&self) -> usize {
        2
    }
}

impl SlicePoint for Paravector {
    fn real_part(&self) -> f64 {
        self.x0
    }
    fn imag_norm(&self) -> f64 {
        self.im_norm()
    }
    fn imag_direction(&self) -> Option<CliffordElement> {
        let v = self.im_norm();
        (v > 0.0).then(|| {
            let mut e = self.to_clifford();
            e.set_coeff(0, 0.0);
            e.scale(1.0 / v)
        })
    }
    fn algebra_dim(&self) -> usize {
        self.dim()
    }
}

/// A unit `i` with `Re(i) = 0`, `|i| = 1`, so `i^2 = -1`.
///
/// Stored as a Clifford element; quaternion units live in `R_2` and must be
/// paravectors there (`e3 = e12` is allowed) while general `R_n` units must be
/// grade one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceUnit(CliffordElement);

impl SliceUnit {
    /// Default unit `e1` in `R_n`.
    pub fn e1(n: usize) -> Self {
        Self(CliffordElement::unit(n, 1))
    }

    pub fn new(e: CliffordElement) -> Result<Self, AlgebraError> {
        let minus_one = CliffordElement::scalar(e.dim(), -1.0);
        if e.re().abs() > 1e-12
            || (e.norm() - 1.0).abs() > 1e-10
            || (e * e).dist(&minus_one) > 1e-10
        {
            return Err(AlgebraError::NotUnit);
        }
        Ok(Self(e))
    }

    /// Normalizes a nonzero purely imaginary quaternion.
    pub fn from_quaternion(q: Quaternion) -> Result<Self, AlgebraError> {
        let v = q.im_norm();
        if v == 0.0 || q.w != 0.0 {
            return Err(AlgebraError::NotUnit);
        }
        Self::new(CliffordElement::from_quaternion(2, q.scale(1.0 / v)))
    }

    pub fn element(&self) -> CliffordElement {
        self.0
    }

    pub fn to_quaternion(&self) -> Result<Quaternion, AlgebraError> {
        self.0.to_quaternion()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn lift(&self, n: usize) -> Self {
        Self(self.0.lift(n))
    }

    /// `u + i v`.
    pub fn point(&self, u: f64, v: f64) -> CliffordElement {
        self.0.scale(v).add_real(u)
    }
}

/// `q = u + i v` with `v ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SliceDecomposition {
    pub u: f64,
    pub v: f64,
    pub i: SliceUnit,
}

impl SliceDecomposition {
    pub fn reassemble(&self) -> CliffordElement {
        self.i.point(self.u, self.v)
    }
}

/// Splits `q` into `u + i v`; real inputs get the unit `e1`.
pub fn slice_decompose<P: SlicePoint>(q: &P) -> SliceDecomposition {
    let u = q.real_part();
    let v = q.imag_norm();
    let i = match q.imag_direction() {
        Some(e) => SliceUnit(e),
        None => SliceUnit::e1(q.algebra_dim().max(1)),
    };
    SliceDecomposition { u, v, i }
}

/// Splits a Clifford element that is a paravector (or a quaternion in `R_2`).
pub fn slice_decompose_element(e: &CliffordElement) -> SliceDecomposition {
    let im = e.im();
    let v = im.norm();
    let i = if v > 0.0 {
        SliceUnit(im.scale(1.0 / v))
    } else {
        SliceUnit::e1(e.dim().max(1))
    };
    SliceDecomposition { u: e.re(), v, i }
}

/// Argument `θ ∈ [0, π]` with `s = |s| e^{θ i_s}`.
pub fn arg<P: SlicePoint>(s: &P) -> Result<f64, AlgebraError> {
    arg_uv(s.real_part(), s.imag_norm())
}

/// Argument of `u + i v` for `v ≥ 0`.
pub fn arg_uv(u: f64, v: f64) -> Result<f64, AlgebraError> {
    let r = u.hypot(v);
    if r == 0.0 {
        return Err(AlgebraError::ZeroInput);
    }
    // atan2 keeps full accuracy near 0 and π where arccos loses digits.
    Ok(v.abs().atan2(u).clamp(0.0, PI))
}

/// Representative `(u, v)` of the sphere `[q]`.
pub fn sphere_of<P: SlicePoint>(q: &P) -> (f64, f64) {
    (q.real_part(), q.imag_norm())
}

/// Whether `p` lies on the sphere with representative `(u, v)`.
pub fn sphere_contains<P: SlicePoint>(sphere: (f64, f64), p: &P) -> bool {
    (p.real_part() - sphere.0).abs() <= SPHERE_TOL && (p.imag_norm() - sphere.1).abs() <= SPHERE_TOL
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decomposes_points_on_slices() {
        let d = slice_decompose(&Quaternion::new(1.0, 2.0, 0.0, 0.0));
        assert_eq!((d.u, d.v), (1.0, 2.0));
        assert_eq!(d.i.to_quaternion().unwrap(), Quaternion::E1);

        let d = slice_decompose(&Quaternion::real(3.0));
        assert_eq!((d.u, d.v), (3.0, 0.0));
        assert_eq!(d.i.to_quaternion().unwrap(), Quaternion::E1);

        let d = slice_decompose(&Quaternion::new(0.0, 1.0, 1.0, 0.0));
        assert!((d.v - 2f64.sqrt()).abs() < 1e-15);
        let s = 1.0 / 2f64.sqrt();
        assert!(
            d.i.to_quaternion()
                .unwrap()
                .dist(Quaternion::new(0.0, s, s, 0.0))
                < 1e-15
        );
    }

    #[test]
    fn arguments() {
        assert_eq!(arg(&Quaternion::real(-2.0)).unwrap(), PI);
        assert!((arg(&Quaternion::E1).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((arg(&Quaternion::new(1.0, 1.0, 0.0, 0.0)).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!(matches!(
            arg(&Quaternion::ZERO),
            Err(AlgebraError::ZeroInput)
        ));
    }

    #[test]
    fn sphere_membership() {
        assert!(sphere_contains(sphere_of(&Quaternion::E1), &Quaternion::E2));
        let two = sphere_of(&Quaternion::real(2.0));
        assert!(sphere_contains(two, &Quaternion::real(2.0)));
        assert!(!sphere_contains(two, &Quaternion::new(2.0, 1.0, 0.0, 0.0)));
        let s = sphere_of(&Quaternion::new(1.0, 1.0, 0.0, 0.0));
        assert!(sphere_contains(s, &Quaternion::new(1.0, 0.0, 0.0, 1.0)));
    }

    #[test]
    fn paravector_identities() {
        let x = Paravector::new(1.0, vec![2.0, -1.0, 0.5]);
        let e = x.to_clifford();
        let p = e * x.conj().to_clifford();
        assert!(p.dist(&CliffordElement::scalar(3, x.norm_sqr())) < 1e-14);
        let d = slice_decompose(&x);
        assert!(d.reassemble().dist(&e) < 1e-14);
        assert_eq!(Paravector::from_clifford(&e).unwrap(), x);
    }

    #[test]
    fn e3_is_a_quaternion_unit() {
        let i = SliceUnit::from_quaternion(Quaternion::E3).unwrap();
        assert_eq!(i.element().coeff(0b11), 1.0);
        assert!(SliceUnit::from_quaternion(Quaternion::ONE).is_err());
    }
}
