//! Slice polynomials `Σ q^ℓ a_ℓ` (left) / `Σ a_ℓ q^ℓ` (right) and rational
//! functions `Q^{-1} P` with a real denominator.

use num_complex::Complex64;

use super::{merge_poles, Orders, Shape, Side, SliceDomain, SliceError, SliceFunction, Stem};
use crate::algebra::CliffordElement;
use crate::linalg::{self, CMat};

/// Polynomial with Clifford coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct SlicePolynomial {
    side: Side,
    n: usize,
    coeffs: Vec<CliffordElement>,
}

impl SlicePolynomial {
    /// Coefficients are lifted to a common algebra; real coefficients give an intrinsic polynomial.
    pub fn new(side: Side, coeffs: Vec<CliffordElement>) -> Self {
        let n = coeffs.iter().map(|c| c.dim()).max().unwrap_or(1).max(1);
        let coeffs: Vec<CliffordElement> = coeffs.iter().map(|c| c.lift(n)).collect();
        let all_real = coeffs.iter().all(|c| c.im().norm() == 0.0);
        let side = if all_real { Side::Intrinsic } else { side };
        let mut p = Self { side, n, coeffs };
        p.trim();
        p
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Self::new(
            Side::Intrinsic,
            coeffs
                .iter()
                .map(|&c| CliffordElement::scalar(1, c))
                .collect(),
        )
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(CliffordElement::zero(self.n));
        }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coeffs(&self) -> &[CliffordElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn valuation(&self) -> usize {
        self.coeffs
            .iter()
            .position(|c| c.norm() != 0.0)
            .unwrap_or(0)
    }

    pub fn real_coeffs(&self) -> Option<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|c| (c.im().norm() == 0.0).then_some(c.re()))
            .collect()
    }

    fn lifted(&self, n: usize) -> Vec<CliffordElement> {
        self.coeffs.iter().map(|c| c.lift(n)).collect()
    }

    /// Coefficient convolution `c_k = Σ_j a_j b_{k-j}`.
    pub fn star_mul(&self, other: &SlicePolynomial) -> Result<SlicePolynomial, SliceError> {
        let side = self
            .side
            .combine(other.side)
            .ok_or(SliceError::SideMismatch(self.side, other.side))?;
        let n = self.n.max(other.n);
        let a = self.lifted(n);
        let b = other.lifted(n);
        let mut c = vec![CliffordElement::zero(n); a.len() + b.len() - 1];
        for (j, aj) in a.iter().enumerate() {
            for (k, bk) in b.iter().enumerate() {
                c[j + k] = c[j + k] + *aj * *bk;
            }
        }
        Ok(SlicePolynomial::new(side, c))
    }

    pub fn add(&self, other: &SlicePolynomial) -> Result<SlicePolynomial, SliceError> {
        let side = self
            .side
            .combine(other.side)
            .ok_or(SliceError::SideMismatch(self.side, other.side))?;
        let n = self.n.max(other.n);
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = CliffordElement::zero(n);
        let c = (0..len)
            .map(|k| {
                self.coeffs.get(k).map_or(zero, |x| x.lift(n))
                    + other.coeffs.get(k).map_or(zero, |x| x.lift(n))
            })
            .collect();
        Ok(SlicePolynomial::new(side, c))
    }

    pub fn scale(&self, a: f64) -> SlicePolynomial {
        SlicePolynomial::new(self.side, self.coeffs.iter().map(|c| c.scale(a)).collect())
    }

    /// Product with a real polynomial (commutes with everything).
    pub fn mul_real(&self, r: &[f64]) -> SlicePolynomial {
        let mut c = vec![CliffordElement::zero(self.n); self.coeffs.len() + r.len().max(1) - 1];
        for (j, aj) in self.coeffs.iter().enumerate() {
            for (k, &rk) in r.iter().enumerate() {
                c[j + k] = c[j + k] + aj.scale(rk);
            }
        }
        SlicePolynomial::new(self.side, c)
    }

    /// Coefficientwise Clifford conjugation.
    pub fn conjugate(&self) -> SlicePolynomial {
        SlicePolynomial::new(self.side, self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn symmetrize(&self) -> SlicePolynomial {
        self.star_mul(&self.conjugate()).expect("same side")
    }

    /// Direct evaluation `Σ q^ℓ a_ℓ` (left) or `Σ a_ℓ q^ℓ` (right).
    pub fn eval_direct(&self, q: &CliffordElement) -> CliffordElement {
        let n = self.n.max(q.dim());
        let q = q.lift(n);
        let mut power = CliffordElement::one(n);
        let mut acc = CliffordElement::zero(n);
        for a in &self.coeffs {
            let a = a.lift(n);
            acc = acc
                + match self.side {
                    Side::Right => a * power,
                    _ => power * a,
                };
            power = power * q;
        }
        acc
    }

    /// Complex coefficient vectors of the stems `F_A`, keyed by blade mask.
    pub fn stem_coeffs(&self) -> Vec<(usize, Vec<Complex64>)> {
        let len = 1usize << self.n;
        let mut out: Vec<(usize, Vec<Complex64>)> = Vec::new();
        for mask in (0..len).step_by(2) {
            let mut v = vec![Complex64::new(0.0, 0.0); self.coeffs.len()];
            let odd = mask.count_ones() % 2 == 1;
            for (l, a) in self.coeffs.iter().enumerate() {
                let re = a.coeff(mask);
                let mut im = if len > 1 { a.coeff(mask | 1) } else { 0.0 };
                // e_A e1 = (-1)^{|A|} e1 e_A for right-sided coefficients.
                if self.side == Side::Right && odd {
                    im = -im;
                }
                v[l] = Complex64::new(re, im);
            }
            if mask == 0 || v.iter().any(|z| z.norm() != 0.0) {
                out.push((mask, v));
            }
        }
        out
    }

    pub fn to_function(&self) -> SliceFunction {
        RationalForm::new(self.clone(), vec![1.0])
            .expect("constant denominator")
            .to_function()
    }
}

/// Horner evaluation of a complex-coefficient polynomial.
pub(crate) fn horner(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub(crate) fn horner_real(c: &[f64], z: Complex64) -> Complex64 {
    c.iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

pub(crate) fn real_poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut c = vec![0.0; a.len() + b.len() - 1];
    for (j, x) in a.iter().enumerate() {
        for (k, y) in b.iter().enumerate() {
            c[j + k] += x * y;
        }
    }
    c
}

fn trim_real(c: &[f64]) -> Vec<f64> {
    let mut v = c.to_vec();
    while v.len() > 1 && v.last() == Some(&0.0) {
        v.pop();
    }
    v
}

/// Roots of a real polynomial (lowest degree first) via its companion matrix.
pub fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let c = trim_real(coeffs);
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let mut m = CMat::zeros(deg, deg);
    for k in 1..deg {
        m[(k, k - 1)] = Complex64::new(1.0, 0.0);
    }
    for k in 0..deg {
        m[(k, deg - 1)] = Complex64::new(-c[k] / lead, 0.0);
    }
    linalg::eigenvalues(&m).unwrap_or_default()
}

/// Sphere representatives of the roots, merged when closer than `tol`.
pub(crate) fn root_spheres(coeffs: &[f64], tol: f64) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for r in poly_roots(coeffs) {
        let p = (r.re, r.im.abs());
        let scale = 1.0 + p.0.hypot(p.1);
        if !out
            .iter()
            .any(|q| (q.0 - p.0).hypot(q.1 - p.1) < tol * scale)
        {
            out.push(p);
        }
    }
    out
}

/// `Q^{-1} P` (left) or `P Q^{-1}` (right) with a real polynomial `Q`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalForm {
    pub num: SlicePolynomial,
    pub den: Vec<f64>,
}

impl RationalForm {
    pub fn new(num: SlicePolynomial, den: Vec<f64>) -> Result<Self, SliceError> {
        let den = trim_real(&den);
        if den.iter().all(|&x| x == 0.0) {
            return Err(SliceError::InvalidParameter("zero denominator".into()));
        }
        Ok(Self { num, den })
    }

    pub fn side(&self) -> Side {
        self.num.side()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }

    pub fn star_mul(&self, other: &RationalForm) -> Result<RationalForm, SliceError> {
        RationalForm::new(
            self.num.star_mul(&other.num)?,
            real_poly_mul(&self.den, &other.den),
        )
    }

    pub fn add(&self, other: &RationalForm) -> Option<RationalForm> {
        if self.den == other.den {
            return RationalForm::new(self.num.add(&other.num).ok()?, self.den.clone()).ok();
        }
        let a = self.num.mul_real(&other.den);
        let b = other.num.mul_real(&self.den);
        RationalForm::new(a.add(&b).ok()?, real_poly_mul(&self.den, &other.den)).ok()
    }

    pub fn scale(&self, a: f64) -> RationalForm {
        RationalForm {
            num: self.num.scale(a),
            den: self.den.clone(),
        }
    }

    pub fn conjugate(&self) -> RationalForm {
        RationalForm {
            num: self.num.conjugate(),
            den: self.den.clone(),
        }
    }

    /// Pole spheres: roots of the denominator.
    pub fn poles(&self) -> Vec<(f64, f64)> {
        root_spheres(&self.den, 1e-6)
    }

    pub fn orders(&self) -> Orders {
        let den_val = self.den.iter().position(|&x| x != 0.0).unwrap_or(0);
        if self.num.is_zero() {
            return Orders {
                at_zero: f64::INFINITY,
                at_infinity: f64::NEG_INFINITY,
            };
        }
        Orders {
            at_zero: self.num.valuation() as f64 - den_val as f64,
            at_infinity: self.num.degree() as f64 - (self.den.len() - 1) as f64,
        }
    }

    pub fn to_function(&self) -> SliceFunction {
        let den = self.den.clone();
        let poles = self.poles();
        let scale = self.den.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let stems: Vec<Stem> = self
            .num
            .stem_coeffs()
            .into_iter()
            .map(|(mask, coeffs)| {
                let den = den.clone();
                Stem::new(mask, move |z| {
                    let q = horner_real(&den, z);
                    if q.norm() <= 1e-14 * scale * (1.0 + z.norm()).powi(den.len() as i32 - 1) {
                        return Err(SliceError::OutOfDomain {
                            u: z.re,
                            v: z.im.abs(),
                        });
                    }
                    Ok(horner(&coeffs, z) / q)
                })
            })
            .collect();
        let label = if self.is_polynomial() {
            format!("poly(deg {})", self.num.degree())
        } else {
            format!("rational(deg {}/{})", self.num.degree(), self.den.len() - 1)
        };
        let mut f = SliceFunction::from_stems(
            self.side(),
            self.num.dim(),
            SliceDomain::WHOLE,
            stems,
            label,
        );
        f.poles = merge_poles(&poles, &[]);
        f.orders = Some(self.orders());
        f.degree = self.num.degree().max(self.den.len() - 1);
        f.shape = if self.is_polynomial() {
            Shape::Polynomial
        } else {
            Shape::Rational
        };
        f.rational = Some(self.clone());
        f
    }
}
