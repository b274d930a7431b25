//! Slice hyperholomorphic functions stored as holomorphic stems on the
//! reference plane `C_{e1}` together with a completion `e2, ..., en`.
//!
//! A left function restricts to `C_{e1}` as `f(z) = Σ_A F_A(z) e_A` and a right
//! function as `f(z) = Σ_A e_A F_A(z)`, with `A ⊆ {2, ..., n}` encoded as a
//! bitmask whose lowest bit is clear. Values elsewhere come from the
//! representation formula. Quaternion-valued functions use `n = 2`, where the
//! two stems are the pair `(F, G)` of `f = F + G e2`.

mod catalog;
mod classify;
mod kernel;
mod poly;
mod star;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use thiserror::Error;

use crate::algebra::{
    slice_decompose_element, AlgebraError, CliffordElement, Quaternion, SliceUnit,
};

pub use catalog::{
    catalog, constant, exp_neg, frac_pow, poly_quaternion, poly_real, poly_sided, pow, psi,
    rational, rational_sided,
};
pub use classify::{classify, grid_angles, grid_radii, Classification, GRID_ANGLES, GRID_RADII};
pub use kernel::{cauchy_kernel_left, cauchy_kernel_right};
pub use poly::{poly_roots, RationalForm, SlicePolynomial};
pub use star::{condition_defect, conjugate, star_eval, star_inv, star_mul, symmetrize};

/// Holomorphic stem on the reference plane.
pub type StemFn = Arc<dyn Fn(Complex64) -> Result<Complex64, SliceError> + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SliceError {
    #[error("point ({u}, {v}) lies outside the function's domain")]
    OutOfDomain { u: f64, v: f64 },
    #[error("symmetrization vanishes at ({u}, {v}): |f^s| = {value:.3e}")]
    ZeroDivisor { u: f64, v: f64, value: f64 },
    #[error(
        "f * f^c is not slice-valued (deviation {deviation:.3e}); the star inverse is undefined"
    )]
    ConditionViolated { deviation: f64 },
    #[error("cannot combine a {0} function with a {1} function")]
    SideMismatch(Side, Side),
    #[error("algebra dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("point lies on the sphere of the kernel singularity")]
    OnSpectrumSphere,
    #[error("point is neither a quaternion nor a paravector")]
    NotSlicePoint,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Intrinsic,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Intrinsic => "intrinsic",
        })
    }
}

impl Side {
    /// Side of a product or sum; `None` for left with right.
    pub fn combine(self, other: Side) -> Option<Side> {
        match (self, other) {
            (Side::Intrinsic, s) | (s, Side::Intrinsic) => Some(s),
            (a, b) if a == b => Some(a),
            _ => None,
        }
    }
}

/// Axially symmetric domains, described by their trace on a slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SliceDomain {
    Ball(f64),
    Annulus(f64, f64),
    /// Open sector `|arg s| < μ`, `0 < μ ≤ π`.
    Sector(f64),
    SectorAnnulus(f64, f64, f64),
}

impl SliceDomain {
    pub const WHOLE: SliceDomain = SliceDomain::Ball(f64::INFINITY);

    /// Whether `u + i v` (hence the whole sphere) belongs to the domain.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        let r = u.hypot(v);
        let arg = v.abs().atan2(u);
        match *self {
            SliceDomain::Ball(r0) => r < r0,
            SliceDomain::Annulus(r0, r1) => r0 < r && r < r1,
            SliceDomain::Sector(mu) => r > 0.0 && arg < mu,
            SliceDomain::SectorAnnulus(mu, r0, r1) => r0 < r && r < r1 && arg < mu,
        }
    }

    /// Largest opening `μ` such that the sector `S_μ` near the origin and infinity lies inside.
    pub fn sector_angle(&self) -> f64 {
        match *self {
            SliceDomain::Ball(r) if r.is_infinite() => PI,
            SliceDomain::Annulus(r0, r1) if r0 == 0.0 && r1.is_infinite() => PI,
            SliceDomain::Sector(mu) => mu,
            SliceDomain::SectorAnnulus(mu, r0, r1) if r0 == 0.0 && r1.is_infinite() => mu,
            _ => 0.0,
        }
    }

    /// Intersection, when it is again one of the supported shapes.
    pub fn intersect(&self, other: &SliceDomain) -> SliceDomain {
        let (mu1, a1, b1) = self.parts();
        let (mu2, a2, b2) = other.parts();
        let mu = mu1.min(mu2);
        let (a, b) = (a1.max(a2), b1.min(b2));
        match (mu < PI, a > 0.0 || b.is_finite()) {
            (false, _) if a == 0.0 => SliceDomain::Ball(b),
            (false, _) => SliceDomain::Annulus(a, b),
            (true, false) => SliceDomain::Sector(mu),
            (true, true) => SliceDomain::SectorAnnulus(mu, a, b),
        }
    }

    fn parts(&self) -> (f64, f64, f64) {
        match *self {
            SliceDomain::Ball(r) => (PI + 1.0, 0.0, r),
            SliceDomain::Annulus(a, b) => (PI + 1.0, a, b),
            SliceDomain::Sector(mu) => (mu, 0.0, f64::INFINITY),
            SliceDomain::SectorAnnulus(mu, a, b) => (mu, a, b),
        }
    }
}

/// Decay `|f(s)| ≤ c |s|^α / (1 + |s|^{2α})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayBound {
    pub alpha: f64,
    pub c: f64,
}

/// Growth `|f(s)| ≤ C (|s|^k + |s|^{-k})`; `k = 0` marks a bounded function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthBound {
    pub k: f64,
    pub c: f64,
}

/// Power-law orders: `|f(s)| ~ |s|^{at_zero}` as `s → 0` and `|s|^{at_infinity}` as `s → ∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Orders {
    pub at_zero: f64,
    pub at_infinity: f64,
}

impl Orders {
    pub fn product(self, o: Orders) -> Orders {
        Orders {
            at_zero: self.at_zero + o.at_zero,
            at_infinity: self.at_infinity + o.at_infinity,
        }
    }

    pub fn sum(self, o: Orders) -> Orders {
        Orders {
            at_zero: self.at_zero.min(o.at_zero),
            at_infinity: self.at_infinity.max(o.at_infinity),
        }
    }

    /// Decay exponent `min(order at 0, -order at ∞)` when positive.
    pub fn decay_exponent(&self) -> Option<f64> {
        let a = self.at_zero.min(-self.at_infinity);
        (a > 0.0).then_some(a)
    }

    /// Growth exponent `k` with `|f| ≲ |s|^k + |s|^{-k}`.
    pub fn growth_exponent(&self) -> f64 {
        (-self.at_zero).max(self.at_infinity).max(0.0)
    }
}

/// Named catalog shapes that some calculi can evaluate in closed form.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Pow(u32),
    Psi(u32),
    FracPow(f64),
    ExpNeg,
    Polynomial,
    Rational,
    Other,
}

#[derive(Clone)]
pub struct Stem {
    pub mask: usize,
    pub f: StemFn,
}

impl Stem {
    pub fn new(
        mask: usize,
        f: impl Fn(Complex64) -> Result<Complex64, SliceError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            mask,
            f: Arc::new(f),
        }
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Result<Complex64, SliceError> {
        (self.f)(z)
    }
}

/// A slice hyperholomorphic function with its metadata.
#[derive(Clone)]
pub struct SliceFunction {
    pub(crate) side: Side,
    pub(crate) n: usize,
    pub(crate) domain: SliceDomain,
    pub(crate) stems: Vec<Stem>,
    pub(crate) poles: Vec<(f64, f64)>,
    /// Opening beyond which the power-law orders stop holding.
    pub(crate) sector_limit: f64,
    pub(crate) decay: Option<DecayBound>,
    pub(crate) growth: Option<GrowthBound>,
    pub(crate) orders: Option<Orders>,
    pub(crate) rational: Option<RationalForm>,
    pub(crate) shape: Shape,
    pub(crate) degree: usize,
    pub(crate) label: String,
}

impl fmt::Debug for SliceFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SliceFunction")
            .field("label", &self.label)
            .field("side", &self.side)
            .field("n", &self.n)
            .field("domain", &self.domain)
            .field(
                "stems",
                &self.stems.iter().map(|s| s.mask).collect::<Vec<_>>(),
            )
            .field("poles", &self.poles)
            .finish()
    }
}

/// Embeds `a + b i` as `a + b e1` in `R_n`.
#[inline]
pub fn embed_complex(z: Complex64, n: usize) -> CliffordElement {
    let mut e = CliffordElement::scalar(n, z.re);
    e.set_coeff(1, z.im);
    e
}

/// Reads an element of `C_{e1}` back as a complex number.
#[inline]
pub fn complex_of(e: &CliffordElement) -> Complex64 {
    Complex64::new(e.re(), if e.len() > 1 { e.coeff(1) } else { 0.0 })
}

impl SliceFunction {
    /// Builds a function from stems; `n` is the Clifford dimension of the values.
    pub fn from_stems(
        side: Side,
        n: usize,
        domain: SliceDomain,
        stems: Vec<Stem>,
        label: impl Into<String>,
    ) -> Self {
        assert!(
            stems
                .iter()
                .all(|s| s.mask & 1 == 0 && s.mask < (1 << n.max(1))),
            "stem masks must omit e1"
        );
        Self {
            side,
            n: n.max(1),
            domain,
            stems,
            poles: Vec::new(),
            sector_limit: PI,
            decay: None,
            growth: None,
            orders: None,
            rational: None,
            shape: Shape::Other,
            degree: 0,
            label: label.into(),
        }
    }

    /// Intrinsic function from a stem with `F(conj z) = conj F(z)`.
    pub fn intrinsic(
        domain: SliceDomain,
        label: impl Into<String>,
        f: impl Fn(Complex64) -> Result<Complex64, SliceError> + Send + Sync + 'static,
    ) -> Self {
        Self::from_stems(Side::Intrinsic, 1, domain, vec![Stem::new(0, f)], label)
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn domain(&self) -> SliceDomain {
        self.domain
    }

    pub fn stems(&self) -> &[Stem] {
        &self.stems
    }

    pub fn poles(&self) -> &[(f64, f64)] {
        &self.poles
    }

    pub fn decay(&self) -> Option<DecayBound> {
        self.decay
    }

    pub fn growth(&self) -> Option<GrowthBound> {
        self.growth
    }

    pub fn orders(&self) -> Option<Orders> {
        self.orders
    }

    pub fn rational_form(&self) -> Option<&RationalForm> {
        self.rational.as_ref()
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_intrinsic(&self) -> bool {
        self.side == Side::Intrinsic
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn with_poles(mut self, poles: Vec<(f64, f64)>) -> Self {
        self.poles = poles;
        self
    }

    pub fn with_decay(mut self, d: DecayBound) -> Self {
        self.decay = Some(d);
        self
    }

    pub fn with_growth(mut self, g: GrowthBound) -> Self {
        self.growth = Some(g);
        self
    }

    pub fn with_sector_limit(mut self, mu: f64) -> Self {
        self.sector_limit = mu;
        self
    }

    pub fn with_orders(mut self, o: Orders) -> Self {
        self.orders = Some(o);
        self
    }

    pub fn with_degree(mut self, d: usize) -> Self {
        self.degree = d;
        self
    }

    pub(crate) fn with_shape(mut self, s: Shape) -> Self {
        self.shape = s;
        self
    }

    /// Polynomial degree used in the zero-set threshold.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Largest sector opening on which the function is holomorphic.
    pub fn sector_angle(&self) -> f64 {
        let mut mu = self.domain.sector_angle().min(self.sector_limit);
        let rational_poles = self
            .rational
            .as_ref()
            .map(|r| r.poles())
            .unwrap_or_default();
        for &(u, v) in self.poles.iter().chain(&rational_poles) {
            if u.hypot(v) > 0.0 {
                mu = mu.min(v.atan2(u));
            } else {
                mu = 0.0;
            }
        }
        mu
    }

    /// Whether the sphere through `u + i v` lies in the domain and away from poles.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        if !self.domain.contains(u, v) {
            return false;
        }
        self.poles
            .iter()
            .all(|&(pu, pv)| (pu - u).hypot(pv - v.abs()) > 1e-12 * (1.0 + pu.hypot(pv)))
    }

    fn check_point(&self, z: Complex64) -> Result<(), SliceError> {
        if self.contains(z.re, z.im) {
            Ok(())
        } else {
            Err(SliceError::OutOfDomain {
                u: z.re,
                v: z.im.abs(),
            })
        }
    }

    /// Stem values `F_A(z)` at a point of the reference plane.
    pub fn stem_values(&self, z: Complex64) -> Result<Vec<(usize, Complex64)>, SliceError> {
        self.stems
            .iter()
            .map(|s| Ok((s.mask, s.eval(z)?)))
            .collect()
    }

    /// Value on the reference plane, `Σ F_A(z) e_A` (left) or `Σ e_A F_A(z)` (right), in `R_dim`.
    fn reference_value(&self, z: Complex64, dim: usize) -> Result<CliffordElement, SliceError> {
        let mut acc = CliffordElement::zero(dim);
        for s in &self.stems {
            let w = embed_complex(s.eval(z)?, dim);
            let blade = CliffordElement::blade(dim, s.mask);
            acc = acc
                + match self.side {
                    Side::Right => blade * w,
                    _ => w * blade,
                };
        }
        Ok(acc)
    }

    /// `f(u + i v)` for a slice unit `i` and any real `v` (representation formula).
    pub fn eval_slice(&self, z: Complex64, i: &SliceUnit) -> Result<CliffordElement, SliceError> {
        self.check_point(z)?;
        let dim = self.n.max(i.dim());
        let iu = i.lift(dim).element();
        if self.side == Side::Intrinsic && self.stems.len() == 1 && self.stems[0].mask == 0 {
            let w = self.stems[0].eval(z)?;
            return Ok(iu.scale(w.im).add_real(w.re));
        }
        let e1 = CliffordElement::unit(dim, 1);
        let fp = self.reference_value(z, dim)?;
        let fm = self.reference_value(z.conj(), dim)?;
        let mean = (fp + fm).scale(0.5);
        let diff = (fm - fp).scale(0.5);
        Ok(match self.side {
            Side::Right => mean + diff * e1 * iu,
            _ => mean + iu * e1 * diff,
        })
    }

    /// Evaluates at a quaternion (in `R_2`) or a paravector.
    pub fn eval(&self, q: &CliffordElement) -> Result<CliffordElement, SliceError> {
        let is_quaternion = q.dim() <= 2;
        if !is_quaternion && !q.is_paravector(0.0) {
            return Err(SliceError::NotSlicePoint);
        }
        if !is_quaternion && self.n > 2 && q.dim() != self.n && !self.is_intrinsic() {
            return Err(SliceError::DimensionMismatch(self.n, q.dim()));
        }
        let d = slice_decompose_element(q);
        let i = if d.v > 0.0 {
            d.i
        } else {
            SliceUnit::e1(q.dim().max(1))
        };
        self.eval_slice(Complex64::new(d.u, d.v), &i)
    }

    pub fn eval_quaternion(&self, q: Quaternion) -> Result<Quaternion, SliceError> {
        if self.n > 2 {
            return Err(SliceError::DimensionMismatch(self.n, 2));
        }
        Ok(self
            .eval(&CliffordElement::from_quaternion(2, q))?
            .to_quaternion()?)
    }

    /// Norm `|f(u + i v)|` maximised over probe units of the slice family.
    pub fn abs_on_slices(&self, z: Complex64) -> Result<f64, SliceError> {
        let units = self.probe_units();
        let mut best = 0.0f64;
        for i in &units {
            best = best.max(self.eval_slice(z, i)?.norm());
        }
        Ok(best)
    }

    /// Units used to sample a function across slices.
    pub fn probe_units(&self) -> Vec<SliceUnit> {
        if self.is_intrinsic() {
            return vec![SliceUnit::e1(1)];
        }
        let dim = self.n.max(2);
        let mut units = vec![
            SliceUnit::e1(dim),
            SliceUnit::new(-CliffordElement::unit(dim, 1)).expect("unit"),
        ];
        units.push(SliceUnit::new(CliffordElement::unit(dim, 2)).expect("unit"));
        units
    }

    /// Pointwise scaling by a real number.
    pub fn scale(&self, a: f64) -> SliceFunction {
        let stems = self
            .stems
            .iter()
            .map(|s| {
                let f = s.f.clone();
                Stem::new(s.mask, move |z| Ok(f(z)? * a))
            })
            .collect();
        let mut out = SliceFunction::from_stems(
            self.side,
            self.n,
            self.domain,
            stems,
            format!("{a}*{}", self.label),
        );
        out.poles = self.poles.clone();
        out.sector_limit = self.sector_limit;
        out.orders = self.orders;
        out.degree = self.degree;
        out.decay = self.decay.map(|d| DecayBound {
            alpha: d.alpha,
            c: d.c * a.abs(),
        });
        out.growth = self.growth.map(|g| GrowthBound {
            k: g.k,
            c: g.c * a.abs(),
        });
        out.rational = self.rational.as_ref().map(|r| r.scale(a));
        out.shape = match self.shape {
            Shape::Polynomial => Shape::Polynomial,
            Shape::Other => Shape::Other,
            _ if self.rational.is_some() => Shape::Rational,
            _ => Shape::Other,
        };
        out
    }

    /// Pointwise sum; both functions must be on compatible sides.
    pub fn add(&self, other: &SliceFunction) -> Result<SliceFunction, SliceError> {
        let side = self
            .side
            .combine(other.side)
            .ok_or(SliceError::SideMismatch(self.side, other.side))?;
        let n = self.n.max(other.n);
        let mut masks: Vec<usize> = self
            .stems
            .iter()
            .chain(&other.stems)
            .map(|s| s.mask)
            .collect();
        masks.sort_unstable();
        masks.dedup();
        let stems = masks
            .into_iter()
            .map(|mask| {
                let a = self
                    .stems
                    .iter()
                    .find(|s| s.mask == mask)
                    .map(|s| s.f.clone());
                let b = other
                    .stems
                    .iter()
                    .find(|s| s.mask == mask)
                    .map(|s| s.f.clone());
                Stem::new(mask, move |z| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    if let Some(f) = &a {
                        acc += f(z)?;
                    }
                    if let Some(f) = &b {
                        acc += f(z)?;
                    }
                    Ok(acc)
                })
            })
            .collect();
        let domain = self.domain.intersect(&other.domain);
        let mut out = SliceFunction::from_stems(
            side,
            n,
            domain,
            stems,
            format!("({})+({})", self.label, other.label),
        );
        out.poles = merge_poles(&self.poles, &other.poles);
        out.sector_limit = self.sector_limit.min(other.sector_limit);
        out.degree = self.degree.max(other.degree);
        out.orders = match (self.orders, other.orders) {
            (Some(a), Some(b)) => Some(a.sum(b)),
            _ => None,
        };
        if let (Some(a), Some(b)) = (&self.rational, &other.rational) {
            if let Some(r) = a.add(b) {
                out.rational = Some(r);
                out.shape = Shape::Rational;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &SliceFunction) -> Result<SliceFunction, SliceError> {
        self.add(&other.scale(-1.0))
    }

    /// Maximum central-difference residual of `∂F/∂z̄` over the given points,
    /// relative to the local scale `max(1, |F|)`.
    pub fn cauchy_riemann_residual(&self, points: &[Complex64]) -> Result<f64, SliceError> {
        let mut worst = 0.0f64;
        for &z in points {
            let h = 1e-5 * z.norm().max(1.0);
            for s in &self.stems {
                let fx = (s.eval(z + h)? - s.eval(z - h)?) / (2.0 * h);
                let fy = (s.eval(z + Complex64::new(0.0, h))?
                    - s.eval(z - Complex64::new(0.0, h))?)
                    / (2.0 * h);
                let dbar = (fx + Complex64::new(0.0, 1.0) * fy) * 0.5;
                let scale = s.eval(z)?.norm().max(1.0);
                worst = worst.max(dbar.norm() / scale);
            }
        }
        Ok(worst)
    }

    /// Largest deviation from `F(conj z) = conj F(z)` and `G = 0` over the points.
    pub fn intrinsic_defect(&self, points: &[Complex64]) -> Result<f64, SliceError> {
        let mut worst = 0.0f64;
        for &z in points {
            for s in &self.stems {
                let w = s.eval(z)?;
                let d = if s.mask == 0 {
                    (s.eval(z.conj())? - w.conj()).norm()
                } else {
                    w.norm()
                };
                worst = worst.max(d / w.norm().max(1.0));
            }
        }
        Ok(worst)
    }
}

pub(crate) fn merge_poles(a: &[(f64, f64)], b: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut out = a.to_vec();
    for &p in b {
        if !out
            .iter()
            .any(|&q| (q.0 - p.0).abs() < 1e-12 && (q.1 - p.1).abs() < 1e-12)
        {
            out.push(p);
        }
    }
    out
}
