//! Bounded, sectorial, rational and regularised functional calculi, plus the
//! identity checks built on them.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{CliffordElement, SliceUnit};
use crate::contour::{build_circle_centered, build_sector_path, Contour, ContourError};
use crate::linalg::{self, CMat, CVec, LinalgError};
use crate::operator::{OperatorError, SliceOperator};
use crate::slicefn::{
    classify, psi, star_mul, Orders, Side, SliceDomain, SliceError, SliceFunction, SlicePolynomial,
};
use crate::spectrum::{hausdorff, RepOperator, SSpectrum, SpectrumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CalculusError {
    #[error("no circle fits inside the domain around the spectrum (needs radius > {needed:.3e}, room {available:.3e})")]
    DomainTooSmall { needed: f64, available: f64 },
    #[error("operator is not of type ω below the admissible sector (ω = {omega:.6}, μ = {mu:.6})")]
    NotTypeOmega { omega: f64, mu: f64 },
    #[error("{0} is not in the decaying class on the required sector")]
    NotInPsiClass(String),
    #[error("{0} does not have polynomial growth on the required sector")]
    NotInFClass(String),
    #[error("{0} is not positive and decaying on (0, ∞)")]
    NotPsiPlus(String),
    #[error("integration path meets the S-spectrum near ({u}, {v})")]
    PathHitsSpectrum { u: f64, v: f64 },
    #[error("pole sphere ({u}, {v}) meets the S-spectrum")]
    PoleOnSpectrum { u: f64, v: f64 },
    #[error("regularizer is singular: the sphere ({u}, {v}) meets the S-spectrum")]
    RegularizerSingular { u: f64, v: f64 },
    #[error("matrix is not diagonalizable (eigenvector condition {cond:.3e})")]
    DefectiveMatrix { cond: f64 },
    #[error("{0} is not intrinsic")]
    NotIntrinsic(String),
    #[error(
        "quadrature did not converge (last relative change {change:.3e}, tolerance {tol:.3e})"
    )]
    NotConverged { change: f64, tol: f64 },
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Slice(#[from] SliceError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<ContourError> for CalculusError {
    fn from(e: ContourError) -> Self {
        match e {
            ContourError::PathHitsSpectrum { u, v } => CalculusError::PathHitsSpectrum { u, v },
            ContourError::Spectrum(s) => CalculusError::Spectrum(s),
            ContourError::Slice(s) => CalculusError::Slice(s),
            ContourError::InvalidParameter(p) => CalculusError::InvalidParameter(p),
        }
    }
}

impl CalculusError {
    /// Variant name, used in reports.
    pub fn name(&self) -> &'static str {
        match self {
            CalculusError::DomainTooSmall { .. } => "DomainTooSmall",
            CalculusError::NotTypeOmega { .. } => "NotTypeOmega",
            CalculusError::NotInPsiClass(_) => "NotInPsiClass",
            CalculusError::NotInFClass(_) => "NotInFClass",
            CalculusError::NotPsiPlus(_) => "NotPsiPlus",
            CalculusError::PathHitsSpectrum { .. } => "PathHitsSpectrum",
            CalculusError::PoleOnSpectrum { .. } => "PoleOnSpectrum",
            CalculusError::RegularizerSingular { .. } => "RegularizerSingular",
            CalculusError::DefectiveMatrix { .. } => "DefectiveMatrix",
            CalculusError::NotIntrinsic(_) => "NotIntrinsic",
            CalculusError::NotConverged { .. } => "NotConverged",
            CalculusError::HypothesisFailed(_) => "HypothesisFailed",
            CalculusError::InvalidParameter(_) => "InvalidParameter",
            CalculusError::Spectrum(SpectrumError::OnSpectrum { .. }) => "OnSpectrum",
            CalculusError::Spectrum(_) => "SpectrumFailure",
            CalculusError::Slice(_) => "FunctionError",
            CalculusError::Operator(_) => "OperatorError",
            CalculusError::Linalg(_) => "LinearAlgebraFailure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CalculusMethod {
    Contour,
    SectorContour,
    Rational,
    Hinf,
    EigenOracle,
}

impl CalculusMethod {
    pub const ALL: [CalculusMethod; 5] = [
        CalculusMethod::Contour,
        CalculusMethod::SectorContour,
        CalculusMethod::Rational,
        CalculusMethod::Hinf,
        CalculusMethod::EigenOracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CalculusMethod::Contour => "contour",
            CalculusMethod::SectorContour => "sector",
            CalculusMethod::Rational => "rational",
            CalculusMethod::Hinf => "hinf",
            CalculusMethod::EigenOracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    /// Relative change of the result per refinement.
    pub history: Vec<f64>,
    pub nodes: usize,
    pub theta: Option<f64>,
    pub radius: Option<f64>,
    /// Estimated contribution of the path inside `ε` and beyond `R`.
    pub tail_bound: Option<f64>,
    pub regularizer: Option<u32>,
    pub condition: Option<f64>,
    /// Set when the regularizer image is badly conditioned.
    pub possibly_unbounded: bool,
}

#[derive(Debug, Clone)]
pub struct CalculusReport<M> {
    pub result: M,
    pub method: CalculusMethod,
    pub diagnostics: Diagnostics,
}

impl<M> CalculusReport<M> {
    pub fn try_map<N, E>(self, f: impl FnOnce(M) -> Result<N, E>) -> Result<CalculusReport<N>, E> {
        Ok(CalculusReport {
            result: f(self.result)?,
            method: self.method,
            diagnostics: self.diagnostics,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CalculusOptions {
    /// Slice plane of the path; `e1` when unset.
    pub unit: Option<SliceUnit>,
    /// Sector path angle; midway between `ω` and the function's opening when unset.
    pub theta: Option<f64>,
    /// Relative change accepted between refinements.
    pub tol: f64,
    pub nodes: usize,
    pub max_nodes: usize,
    pub eps_factor: f64,
    pub r_factor: f64,
    /// Limits for extending the sector path while the truncation bound exceeds `tol`.
    pub min_eps_factor: f64,
    pub max_r_factor: f64,
    pub panels_per_decade: usize,
    pub max_panels_per_decade: usize,
    /// Forces the right integral for intrinsic functions.
    pub right: bool,
    /// Overrides the regularizer exponent `k` in `ψ = (s/(1+s²))^{k+1}`.
    pub regularizer: Option<u32>,
}

impl Default for CalculusOptions {
    fn default() -> Self {
        Self {
            unit: None,
            theta: None,
            tol: 1e-9,
            nodes: 256,
            max_nodes: 16384,
            eps_factor: 1e-8,
            r_factor: 1e8,
            min_eps_factor: 1e-20,
            max_r_factor: 1e20,
            panels_per_decade: 6,
            max_panels_per_decade: 96,
            right: false,
            regularizer: None,
        }
    }
}

/// An operator with its representation and S-spectrum computed once.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub op: RepOperator,
    pub spectrum: SSpectrum,
}

fn relative_change(a: &CMat, b: &CMat) -> f64 {
    linalg::frobenius(&(a - b)) / linalg::frobenius(b).max(1e-12)
}

fn polynomial_of(op: &RepOperator, coeffs: &[CliffordElement], side: Side) -> CMat {
    let mut acc = CMat::zeros(op.space.rep_dim(), op.space.rep_dim());
    for a in coeffs.iter().rev() {
        let c = op.space.scalar(a);
        acc = match side {
            Side::Right => c + acc * &op.rep,
            _ => c + &op.rep * acc,
        };
    }
    acc
}

fn real_polynomial_of(op: &RepOperator, coeffs: &[f64]) -> CMat {
    let d = op.space.rep_dim();
    let mut acc = CMat::zeros(d, d);
    for &a in coeffs.iter().rev() {
        acc = &op.rep * acc;
        for k in 0..d {
            acc[(k, k)] += a;
        }
    }
    acc
}

impl Prepared {
    pub fn new<O: SliceOperator>(t: &O) -> Result<Self, CalculusError> {
        Self::from_rep(RepOperator::new(t))
    }

    pub fn from_rep(op: RepOperator) -> Result<Self, CalculusError> {
        let spectrum = op.spectrum()?;
        Ok(Self { op, spectrum })
    }

    fn scale(&self) -> f64 {
        if self.op.norm > 0.0 {
            self.op.norm
        } else {
            1.0
        }
    }

    fn unit(&self, opts: &CalculusOptions) -> SliceUnit {
        let dim = self.op.space.algebra_dim();
        opts.unit
            .map(|u| u.lift(dim))
            .unwrap_or_else(|| SliceUnit::e1(dim))
    }

    fn use_right(f: &SliceFunction, opts: &CalculusOptions) -> bool {
        f.side() == Side::Right || (f.side() == Side::Intrinsic && opts.right)
    }

    fn integrate(
        &self,
        c: &Contour,
        f: &SliceFunction,
        right: bool,
    ) -> Result<CMat, CalculusError> {
        Ok(if right {
            c.integrate_right(&self.op, f)?
        } else {
            c.integrate_left(&self.op, f)?
        })
    }

    /// Circle centre and radius enclosing the spectrum inside the domain of `f`.
    fn circle_for(&self, f: &SliceFunction) -> Result<(f64, f64), CalculusError> {
        let pts = self.spectrum.points();
        let umin = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
        let umax = pts.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
        let reach = |c: f64| pts.iter().map(|p| (p.0 - c).hypot(p.1)).fold(0.0, f64::max);
        let room = |c: f64| {
            let mut d = match f.domain() {
                SliceDomain::Ball(r) => r - c.abs(),
                SliceDomain::Sector(mu) if c > 0.0 => {
                    if mu >= PI / 2.0 {
                        c
                    } else {
                        c * mu.sin()
                    }
                }
                _ => 0.0,
            };
            let rational = f.rational_form().map(|r| r.poles()).unwrap_or_default();
            for &(u, v) in f.poles().iter().chain(&rational) {
                d = d.min((u - c).hypot(v));
            }
            d
        };
        let mut best: Option<(f64, f64, f64)> = None;
        for c in [0.0, 0.5 * (umin + umax)] {
            let (rho, d) = (reach(c), room(c));
            let ratio = if rho > 0.0 { d / rho } else { f64::INFINITY };
            if d > 0.0 && best.is_none_or(|b| ratio > b.0) {
                best = Some((ratio, c, rho));
            }
        }
        let (ratio, c, rho) = best.unwrap_or((0.0, 0.0, reach(0.0)));
        let d = room(c);
        if !(ratio > 1.05) {
            return Err(CalculusError::DomainTooSmall {
                needed: rho,
                available: d.max(0.0),
            });
        }
        let r = match (d.is_infinite(), rho > 0.0) {
            (true, true) => 2.0 * rho,
            (true, false) => 1.0,
            (false, true) => (rho * d).sqrt(),
            (false, false) => 0.5 * d,
        };
        Ok((c, r))
    }

    /// `(1/2π) ∮ S^{-1}(s,T) ds_i f(s)` on a circle, doubling nodes until stable.
    pub fn bounded(
        &self,
        f: &SliceFunction,
        opts: &CalculusOptions,
    ) -> Result<CalculusReport<CMat>, CalculusError> {
        let (center, r) = self.circle_for(f)?;
        let unit = self.unit(opts);
        let right = Self::use_right(f, opts);
        let tol = 1e-10 * self.scale();
        let mut n = opts.nodes.max(8);
        let circle = build_circle_centered(unit, center, r, n)?;
        circle.check_clear(&self.spectrum, tol)?;
        let mut prev = self.integrate(&circle, f, right)?;
        let mut history = Vec::new();
        loop {
            let next_n = 2 * n;
            let c = build_circle_centered(unit, center, r, next_n)?;
            let next = self.integrate(&c, f, right)?;
            let change = relative_change(&prev, &next);
            history.push(change);
            n = next_n;
            prev = next;
            if change <= opts.tol {
                break;
            }
            if n >= opts.max_nodes {
                return Err(CalculusError::NotConverged {
                    change,
                    tol: opts.tol,
                });
            }
        }
        Ok(CalculusReport {
            result: prev,
            method: CalculusMethod::Contour,
            diagnostics: Diagnostics {
                history,
                nodes: n,
                radius: Some(r),
                ..Default::default()
            },
        })
    }

    fn psi_orders(&self, f: &SliceFunction, theta: f64) -> Result<Orders, CalculusError> {
        let orders = match f.orders() {
            Some(o) => o,
            None => {
                let c = classify(f, theta);
                if !c.in_psi {
                    return Err(CalculusError::NotInPsiClass(f.label().to_string()));
                }
                c.orders
            }
        };
        match orders.decay_exponent() {
            Some(a) if a > 0.0 => Ok(orders),
            _ => Err(CalculusError::NotInPsiClass(f.label().to_string())),
        }
    }

    /// Sector angle for a path: `ω < θ < μ`.
    fn sector_theta(
        &self,
        f: &SliceFunction,
        opts: &CalculusOptions,
    ) -> Result<f64, CalculusError> {
        let omega = self.spectrum.omega();
        let mu = f.sector_angle();
        if omega >= mu {
            return Err(CalculusError::NotTypeOmega { omega, mu });
        }
        let theta = opts.theta.unwrap_or(0.5 * (omega + mu));
        if theta <= omega {
            return Err(CalculusError::NotTypeOmega { omega, mu: theta });
        }
        if theta >= mu {
            return Err(CalculusError::NotInPsiClass(format!(
                "{} on S_{theta:.6}",
                f.label()
            )));
        }
        Ok(theta)
    }

    /// `(1/2π) ∫_Γ S^{-1}(s,T) ds_i ψ(s)` over the boundary of `S_θ`.
    pub fn omega(
        &self,
        f: &SliceFunction,
        opts: &CalculusOptions,
    ) -> Result<CalculusReport<CMat>, CalculusError> {
        let theta = self.sector_theta(f, opts)?;
        let orders = self.psi_orders(f, theta)?;
        let unit = self.unit(opts);
        let right = Self::use_right(f, opts);
        let scale = self.scale();
        let (mut eps, mut big_r) = (opts.eps_factor * scale, opts.r_factor * scale);
        let mut ppd = opts.panels_per_decade.max(1);
        let mut history = Vec::new();
        loop {
            let (result, nodes) = self.converge_sector(
                f,
                &unit,
                theta,
                eps,
                big_r,
                &mut ppd,
                right,
                opts,
                &mut history,
            )?;
            let head = self.head_estimate(f, &unit, theta, eps, orders)?;
            let tail = self.tail_estimate(f, &unit, theta, big_r, orders)?;
            let target = opts.tol * linalg::frobenius(&result);
            let grow_r = tail > target && big_r < opts.max_r_factor * scale;
            let shrink_eps = head > target && eps > opts.min_eps_factor * scale;
            if !(grow_r || shrink_eps) {
                return Ok(CalculusReport {
                    result,
                    method: CalculusMethod::SectorContour,
                    diagnostics: Diagnostics {
                        history,
                        nodes,
                        theta: Some(theta),
                        tail_bound: Some(head + tail),
                        ..Default::default()
                    },
                });
            }
            if grow_r {
                big_r = (big_r * 1e4).min(opts.max_r_factor * scale);
            }
            if shrink_eps {
                eps = (eps * 1e-4).max(opts.min_eps_factor * scale);
            }
        }
    }

    /// Doubles the panel density from `ppd` until successive results agree to `tol`.
    #[allow(clippy::too_many_arguments)]
    fn converge_sector(
        &self,
        f: &SliceFunction,
        unit: &SliceUnit,
        theta: f64,
        eps: f64,
        big_r: f64,
        ppd: &mut usize,
        right: bool,
        opts: &CalculusOptions,
        history: &mut Vec<f64>,
    ) -> Result<(CMat, usize), CalculusError> {
        let path = build_sector_path(*unit, theta, eps, big_r, *ppd)?;
        path.check_clear(&self.spectrum, 1e-10 * self.scale())?;
        let mut prev = self.integrate(&path, f, right)?;
        loop {
            let doubled = *ppd * 2;
            let path = build_sector_path(*unit, theta, eps, big_r, doubled)?;
            let next = self.integrate(&path, f, right)?;
            let change = relative_change(&prev, &next);
            history.push(change);
            prev = next;
            if change <= opts.tol {
                // `ppd` stays at the coarser level so a longer path restarts there.
                return Ok((prev, path.nodes.len()));
            }
            if doubled >= opts.max_panels_per_decade {
                return Err(CalculusError::NotConverged {
                    change,
                    tol: opts.tol,
                });
            }
            *ppd = doubled;
        }
    }

    /// `g(ε) ε / (a + 1) / π` with `g` the integrand norm at `|s| = ε` and `|f| ~ |s|^a`.
    fn head_estimate(
        &self,
        f: &SliceFunction,
        unit: &SliceUnit,
        theta: f64,
        eps: f64,
        orders: Orders,
    ) -> Result<f64, CalculusError> {
        let a = orders.at_zero;
        if a.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.integrand_norm(f, unit, theta, eps)? * eps / (a + 1.0) / PI)
    }

    fn integrand_norm(
        &self,
        f: &SliceFunction,
        unit: &SliceUnit,
        theta: f64,
        r: f64,
    ) -> Result<f64, CalculusError> {
        let mut g = 0.0f64;
        for z in [
            Complex64::from_polar(r, theta),
            Complex64::from_polar(r, -theta),
        ] {
            let s = unit.point(z.re, z.im);
            let (l, rr) = self.op.resolvents(&s)?;
            let k = linalg::spectral_norm(&l).max(linalg::spectral_norm(&rr));
            g = g.max(k * f.eval_slice(z, unit)?.norm());
        }
        Ok(g)
    }

    /// `g(R) R / a / π` with `g` the integrand norm at `|s| = R` and `|f| ~ |s|^{-a}`.
    fn tail_estimate(
        &self,
        f: &SliceFunction,
        unit: &SliceUnit,
        theta: f64,
        big_r: f64,
        orders: Orders,
    ) -> Result<f64, CalculusError> {
        let a = -orders.at_infinity;
        if a.is_infinite() {
            return Ok(0.0);
        }
        Ok(self.integrand_norm(f, unit, theta, big_r)? * big_r / a / PI)
    }

    fn check_poles(&self, poles: &[(f64, f64)]) -> Result<(), CalculusError> {
        let tol = 1e-8 * (1.0 + self.scale());
        for &(u, v) in poles {
            if self.spectrum.distance(u, v) <= tol * (1.0 + u.hypot(v)) {
                return Err(CalculusError::PoleOnSpectrum { u, v });
            }
        }
        Ok(())
    }

    /// `P(T) = Σ T^ℓ a_ℓ` (left) or `Σ a_ℓ T^ℓ` (right).
    pub fn polynomial(&self, p: &SlicePolynomial) -> CMat {
        polynomial_of(&self.op, p.coeffs(), p.side())
    }

    /// `Q(T)^{-1} P(T)` (left, intrinsic) or `P(T) Q(T)^{-1}` (right).
    pub fn rational(&self, f: &SliceFunction) -> Result<CalculusReport<CMat>, CalculusError> {
        let r = f.rational_form().ok_or_else(|| {
            CalculusError::InvalidParameter(format!("{} has no rational form", f.label()))
        })?;
        self.check_poles(&r.poles())?;
        let p = self.polynomial(&r.num);
        let q = real_polynomial_of(&self.op, &r.den);
        let cond = linalg::condition_number(&q);
        let qi = linalg::inverse(&q).map_err(|_| {
            let (u, v) = r.poles().first().copied().unwrap_or((f64::NAN, f64::NAN));
            CalculusError::PoleOnSpectrum { u, v }
        })?;
        let result = match r.side() {
            Side::Right => p * qi,
            _ => qi * p,
        };
        Ok(CalculusReport {
            result,
            method: CalculusMethod::Rational,
            diagnostics: Diagnostics {
                condition: Some(cond),
                ..Default::default()
            },
        })
    }

    /// `ψ(T)^{-1} (ψ f)(T)` with `ψ = (s/(1+s²))^{k+1}`.
    pub fn hinf(
        &self,
        f: &SliceFunction,
        opts: &CalculusOptions,
    ) -> Result<CalculusReport<CMat>, CalculusError> {
        let tol = 1e-8 * self.scale();
        for (u, v) in [(0.0, 0.0), (0.0, 1.0)] {
            if self.spectrum.distance(u, v) <= tol {
                return Err(CalculusError::RegularizerSingular { u, v });
            }
        }
        let growth = match f.orders() {
            Some(o) => o.growth_exponent(),
            None => match f.growth() {
                Some(g) => g.k,
                None => {
                    let mu = f.sector_angle().min(PI / 2.0);
                    let c = classify(f, 0.5 * (self.spectrum.omega() + mu));
                    if !c.in_f {
                        return Err(CalculusError::NotInFClass(f.label().to_string()));
                    }
                    c.orders.growth_exponent()
                }
            },
        };
        if !growth.is_finite() {
            return Err(CalculusError::NotInFClass(f.label().to_string()));
        }
        let k = opts
            .regularizer
            .unwrap_or((growth - 1e-9).ceil().max(0.0) as u32);
        let reg = psi(k + 1);
        let right = f.side() == Side::Right;
        let product = if right {
            star_mul(f, &reg)?
        } else {
            star_mul(&reg, f)?
        };
        let a = self.omega(&product, opts)?;
        let b = self.rational(&reg)?;
        let cond = b.diagnostics.condition.unwrap_or(f64::NAN);
        let bi = linalg::inverse(&b.result).map_err(|_| CalculusError::RegularizerSingular {
            u: f64::NAN,
            v: f64::NAN,
        })?;
        let result = if right { a.result * bi } else { bi * a.result };
        let mut diagnostics = a.diagnostics;
        diagnostics.regularizer = Some(k);
        diagnostics.condition = Some(cond);
        diagnostics.possibly_unbounded = !(cond < 1e8);
        Ok(CalculusReport {
            result,
            method: CalculusMethod::Hinf,
            diagnostics,
        })
    }

    /// Applies the stem of an intrinsic `f` to the eigenvalues of the representation.
    pub fn eigen_oracle(&self, f: &SliceFunction) -> Result<CalculusReport<CMat>, CalculusError> {
        if !f.is_intrinsic() || f.stems().len() != 1 {
            return Err(CalculusError::NotIntrinsic(f.label().to_string()));
        }
        let e = linalg::eigen_decompose(&self.op.rep).map_err(|e| match e {
            LinalgError::Defective { cond } => CalculusError::DefectiveMatrix { cond },
            other => other.into(),
        })?;
        let stem = &f.stems()[0];
        let values = e
            .values
            .iter()
            .map(|&z| stem.eval(z))
            .collect::<Result<Vec<_>, _>>()?;
        let d = CMat::from_diagonal(&CVec::from_vec(values));
        Ok(CalculusReport {
            result: &e.vectors * d * &e.inverse,
            method: CalculusMethod::EigenOracle,
            diagnostics: Diagnostics {
                condition: Some(e.condition),
                ..Default::default()
            },
        })
    }

    pub fn apply(
        &self,
        f: &SliceFunction,
        method: CalculusMethod,
        opts: &CalculusOptions,
    ) -> Result<CalculusReport<CMat>, CalculusError> {
        match method {
            CalculusMethod::Contour => self.bounded(f, opts),
            CalculusMethod::SectorContour => self.omega(f, opts),
            CalculusMethod::Rational => self.rational(f),
            CalculusMethod::Hinf => self.hinf(f, opts),
            CalculusMethod::EigenOracle => self.eigen_oracle(f),
        }
    }

    /// First applicable method: rational, sectorial, regularised, then circle.
    pub fn auto(
        &self,
        f: &SliceFunction,
        opts: &CalculusOptions,
    ) -> Result<CalculusReport<CMat>, CalculusError> {
        if f.rational_form().is_some() {
            return self.rational(f);
        }
        if f.orders()
            .and_then(|o| o.decay_exponent())
            .is_some_and(|a| a > 0.0)
        {
            return self.omega(f, opts);
        }
        if f.orders().is_some() || f.growth().is_some() {
            return self.hinf(f, opts);
        }
        self.bounded(f, opts)
    }
}

pub fn bounded_calculus<O: SliceOperator>(
    f: &SliceFunction,
    t: &O,
    opts: &CalculusOptions,
) -> Result<CalculusReport<O>, CalculusError> {
    let p = Prepared::new(t)?;
    p.bounded(f, opts)?
        .try_map(|m| O::from_rep(t.space(), &m).map_err(Into::into))
}

pub fn omega_calculus<O: SliceOperator>(
    f: &SliceFunction,
    t: &O,
    opts: &CalculusOptions,
) -> Result<CalculusReport<O>, CalculusError> {
    let p = Prepared::new(t)?;
    p.omega(f, opts)?
        .try_map(|m| O::from_rep(t.space(), &m).map_err(Into::into))
}

pub fn rational_calculus<O: SliceOperator>(
    f: &SliceFunction,
    t: &O,
) -> Result<CalculusReport<O>, CalculusError> {
    let p = Prepared::new(t)?;
    p.rational(f)?
        .try_map(|m| O::from_rep(t.space(), &m).map_err(Into::into))
}

pub fn hinf_calculus<O: SliceOperator>(
    f: &SliceFunction,
    t: &O,
    opts: &CalculusOptions,
) -> Result<CalculusReport<O>, CalculusError> {
    let p = Prepared::new(t)?;
    p.hinf(f, opts)?
        .try_map(|m| O::from_rep(t.space(), &m).map_err(Into::into))
}

pub fn eigen_oracle<O: SliceOperator>(f: &SliceFunction, t: &O) -> Result<O, CalculusError> {
    let p = Prepared::new(t)?;
    Ok(O::from_rep(t.space(), &p.eigen_oracle(f)?.result)?)
}

/// Operator-norm difference, absolute and relative to the larger operand.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residual {
    pub absolute: f64,
    pub relative: f64,
}

impl Residual {
    pub fn between(a: &CMat, b: &CMat) -> Self {
        let absolute = linalg::spectral_norm(&(a - b));
        let size = linalg::spectral_norm(a).max(linalg::spectral_norm(b));
        Residual {
            absolute,
            relative: if size > 0.0 {
                absolute / size
            } else {
                absolute
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProductRuleReport {
    /// `(ψφ)(T)` against `ψ(T)φ(T)`.
    pub product: Residual,
    /// `ψ(T)φ(T)` against `φ(T)ψ(T)`; meaningful when both are intrinsic.
    pub commutator: Residual,
}

/// Compares `(ψφ)(T)` with `ψ(T)φ(T)`, all three by the sectorial calculus.
pub fn verify_product_rule(
    p: &Prepared,
    psi_fn: &SliceFunction,
    phi: &SliceFunction,
    opts: &CalculusOptions,
) -> Result<ProductRuleReport, CalculusError> {
    if !psi_fn.is_intrinsic() {
        return Err(CalculusError::NotIntrinsic(psi_fn.label().to_string()));
    }
    let a = p.omega(psi_fn, opts)?.result;
    let b = p.omega(phi, opts)?.result;
    let ab = p.omega(&star_mul(psi_fn, phi)?, opts)?.result;
    let prod = &a * &b;
    Ok(ProductRuleReport {
        product: Residual::between(&ab, &prod),
        commutator: Residual::between(&prod, &(&b * &a)),
    })
}

/// Regularised results with exponents `k1` and `k2`.
pub fn verify_regularizer_independence(
    p: &Prepared,
    f: &SliceFunction,
    k1: u32,
    k2: u32,
    opts: &CalculusOptions,
) -> Result<Residual, CalculusError> {
    let run = |k: u32| {
        let o = CalculusOptions {
            regularizer: Some(k),
            ..opts.clone()
        };
        p.hinf(f, &o).map(|r| r.result)
    };
    Ok(Residual::between(&run(k1)?, &run(k2)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SumProductReport {
    pub sum: Residual,
    pub product: Residual,
}

/// `f(T) + g(T)` against `(f+g)(T)` and `f(T)g(T)` against `(f⋆g)(T)`, all regularised.
pub fn verify_sum_product(
    p: &Prepared,
    f: &SliceFunction,
    g: &SliceFunction,
    opts: &CalculusOptions,
) -> Result<SumProductReport, CalculusError> {
    let ft = p.hinf(f, opts)?.result;
    let gt = p.hinf(g, opts)?.result;
    let sum = p.hinf(&f.add(g)?, opts)?.result;
    let prod = p.hinf(&star_mul(f, g)?, opts)?.result;
    Ok(SumProductReport {
        sum: Residual::between(&(&ft + &gt), &sum),
        product: Residual::between(&(&ft * &gt), &prod),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralMapReport {
    pub distance: f64,
    /// `ψ` applied to the spectral spheres of `T`.
    pub mapped: Vec<(f64, f64)>,
    /// Spheres of the computed `ψ(T)`.
    pub computed: Vec<(f64, f64)>,
}

/// Hausdorff distance between `ψ(σ_S(T))` and `σ_S(ψ(T))`.
pub fn verify_spectral_mapping(
    p: &Prepared,
    f: &SliceFunction,
    opts: &CalculusOptions,
) -> Result<SpectralMapReport, CalculusError> {
    if !f.is_intrinsic() || f.stems().len() != 1 {
        return Err(CalculusError::NotIntrinsic(f.label().to_string()));
    }
    let ft = p.auto(f, opts)?.result;
    let image = RepOperator::from_parts(p.op.space, ft).spectrum()?;
    let stem = &f.stems()[0];
    let mut mapped: Vec<(f64, f64)> = Vec::new();
    for (u, v) in p.spectrum.points() {
        let w = stem.eval(Complex64::new(u, v))?;
        mapped.push((w.re, w.im.abs()));
    }
    let computed = image.points();
    Ok(SpectralMapReport {
        distance: hausdorff(&mapped, &computed),
        mapped,
        computed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceReport {
    /// `‖f_j(T)u − f(T)u‖` per sequence element.
    pub errors: Vec<f64>,
    /// `sup |f_j − f|` on a grid of the annulus `δ ≤ |s| ≤ λ` inside the sector.
    pub grid_errors: Vec<f64>,
    /// `max_j ‖f_j(T)‖`.
    pub bound: f64,
    pub limit_norm: f64,
    pub monotone: bool,
}

/// Checks `f_j(T)u → f(T)u` for a sequence converging on annuli around the spectrum.
pub fn convergence_check(
    p: &Prepared,
    seq: &[SliceFunction],
    f: &SliceFunction,
    u: &CVec,
    method: CalculusMethod,
    opts: &CalculusOptions,
) -> Result<ConvergenceReport, CalculusError> {
    if seq.is_empty() {
        return Err(CalculusError::InvalidParameter("empty sequence".into()));
    }
    let pts = p.spectrum.points();
    let radii: Vec<f64> = pts.iter().map(|q| q.0.hypot(q.1)).collect();
    let lambda = 2.0 * radii.iter().copied().fold(0.0, f64::max).max(1e-300);
    let delta = 0.5
        * radii
            .iter()
            .copied()
            .filter(|&r| r > 0.0)
            .fold(f64::INFINITY, f64::min)
            .min(lambda / 4.0);
    let mu = seq
        .iter()
        .map(SliceFunction::sector_angle)
        .fold(f.sector_angle(), f64::min);
    let omega = p.spectrum.omega();
    let theta = 0.5 * (omega + mu.min(PI / 2.0));
    let mut grid_errors = Vec::with_capacity(seq.len());
    for g in seq {
        let mut sup = 0.0f64;
        for a in 0..20 {
            let r = delta * (lambda / delta).powf(a as f64 / 19.0);
            for b in 0..17 {
                let z = Complex64::from_polar(r, -theta + 2.0 * theta * b as f64 / 16.0);
                let d = g.sub(f)?.abs_on_slices(z)?;
                sup = sup.max(d);
            }
        }
        grid_errors.push(sup);
    }
    if !grid_errors.iter().all(|e| e.is_finite()) || grid_errors.last() > grid_errors.first() {
        return Err(CalculusError::HypothesisFailed(format!(
            "no uniform convergence on δ ≤ |s| ≤ λ (grid errors {grid_errors:?})"
        )));
    }
    let limit = p.apply(f, method, opts)?.result;
    let fu = &limit * u;
    let mut errors = Vec::with_capacity(seq.len());
    let mut bound = 0.0f64;
    for g in seq {
        let gt = p.apply(g, method, opts)?.result;
        bound = bound.max(linalg::spectral_norm(&gt));
        errors.push((&gt * u - &fu).norm());
    }
    if !bound.is_finite() {
        return Err(CalculusError::HypothesisFailed(
            "sequence is not uniformly bounded".into(),
        ));
    }
    Ok(ConvergenceReport {
        monotone: errors.windows(2).all(|w| w[1] <= w[0]),
        errors,
        grid_errors,
        bound,
        limit_norm: linalg::spectral_norm(&limit),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quaternion;
    use crate::qmatrix::QMatrix;
    use crate::slicefn::{constant, exp_neg, frac_pow, poly_quaternion, pow, rational};

    fn real_diag(d: &[f64]) -> QMatrix {
        QMatrix::from_diag(&d.iter().map(|&x| Quaternion::real(x)).collect::<Vec<_>>())
    }

    fn assert_close(a: &QMatrix, b: &QMatrix, tol: f64) {
        assert!(
            a.dist(b) <= tol,
            "distance {} > {tol}\n{a:?}\n{b:?}",
            a.dist(b)
        );
    }

    #[test]
    fn bounded_examples() {
        let o = CalculusOptions::default();
        let t = QMatrix::from_diag(&[Quaternion::E1, Quaternion::E2]);
        let sq = bounded_calculus(&pow(2), &t, &o).unwrap().result;
        assert_close(&sq, &QMatrix::identity(2).scale(-1.0), 1e-12);
        let d = real_diag(&[2.0, 3.0]);
        let f = poly_quaternion(Side::Left, &[Quaternion::ZERO, Quaternion::E1]);
        let r = bounded_calculus(&f, &d, &o).unwrap().result;
        assert_close(
            &r,
            &QMatrix::from_diag(&[Quaternion::E1.scale(2.0), Quaternion::E1.scale(3.0)]),
            1e-12,
        );
        let one = bounded_calculus(&constant(1.0), &t, &o).unwrap().result;
        assert_close(&one, &QMatrix::identity(2), 1e-12);
    }

    #[test]
    fn bounded_avoids_poles() {
        let o = CalculusOptions::default();
        let d = real_diag(&[1.0, 2.0]);
        let r = bounded_calculus(&psi(1), &d, &o).unwrap().result;
        assert_close(&r, &real_diag(&[0.5, 0.4]), 1e-10);
        let near = real_diag(&[-3.0, 3.0]);
        assert!(matches!(
            bounded_calculus(&psi(1), &near, &o),
            Err(CalculusError::DomainTooSmall { .. })
        ));
    }

    #[test]
    fn omega_examples() {
        let o = CalculusOptions::default();
        let r = omega_calculus(&psi(2), &real_diag(&[1.0, 2.0]), &o).unwrap();
        assert_close(&r.result, &real_diag(&[0.25, 0.16]), 1e-8);
        assert!(r.diagnostics.tail_bound.unwrap() < 1e-6);
        let s = omega_calculus(&psi(1), &real_diag(&[4.0]), &o)
            .unwrap()
            .result;
        assert!((s[(0, 0)].w - 4.0 / 17.0).abs() < 1e-9);
        let t = QMatrix::from_diag(&[Quaternion::new(1.0, 0.5, 0.0, 0.0), Quaternion::real(2.0)]);
        let a = omega_calculus(
            &psi(1),
            &t,
            &CalculusOptions {
                theta: Some(PI / 4.0),
                ..o.clone()
            },
        )
        .unwrap();
        let b = omega_calculus(
            &psi(1),
            &t,
            &CalculusOptions {
                theta: Some(PI / 3.0),
                ..o
            },
        )
        .unwrap();
        assert_close(&a.result, &b.result, 1e-8);
    }

    #[test]
    fn omega_rejects_wide_spectrum() {
        let t = QMatrix::from_diag(&[Quaternion::new(-1.0, 0.1, 0.0, 0.0)]);
        assert!(matches!(
            omega_calculus(&psi(1), &t, &CalculusOptions::default()),
            Err(CalculusError::NotTypeOmega { .. })
        ));
        assert!(matches!(
            omega_calculus(&pow(1), &real_diag(&[1.0]), &CalculusOptions::default()),
            Err(CalculusError::NotInPsiClass(_))
        ));
    }

    #[test]
    fn rational_examples() {
        let t = QMatrix::from_fn(2, |r, c| {
            Quaternion::new(
                1.0 + (r == c) as u8 as f64,
                0.3 * r as f64,
                0.2,
                -0.1 * c as f64,
            )
        });
        let got = rational_calculus(&psi(1), &t).unwrap().result;
        let t2 = &t * &t;
        let expect = &t * &crate::qmatrix::qinv(&(&QMatrix::identity(2) + &t2)).unwrap();
        assert_close(&got, &expect, 1e-12);
        let inv = rational_calculus(
            &rational(&[1.0], &[0.0, 1.0]).unwrap(),
            &real_diag(&[2.0, 4.0]),
        )
        .unwrap();
        assert_close(&inv.result, &real_diag(&[0.5, 0.25]), 1e-14);
        let e = QMatrix::from_diag(&[Quaternion::E2]);
        assert!(matches!(
            rational_calculus(&rational(&[0.0, 1.0], &[1.0, 0.0, 1.0]).unwrap(), &e),
            Err(CalculusError::PoleOnSpectrum { .. })
        ));
    }

    #[test]
    fn hinf_examples() {
        let o = CalculusOptions::default();
        let r = hinf_calculus(&frac_pow(0.5), &real_diag(&[4.0, 9.0]), &o).unwrap();
        assert_close(&r.result, &real_diag(&[2.0, 3.0]), 1e-7);
        assert_eq!(r.diagnostics.regularizer, Some(1));
        let t = QMatrix::from_diag(&[Quaternion::new(1.0, 0.5, 0.0, 0.0), Quaternion::real(3.0)]);
        let id = hinf_calculus(&pow(1), &t, &o).unwrap().result;
        assert_close(&id, &t, 1e-7);
        let e = hinf_calculus(&exp_neg(), &real_diag(&[1.0]), &o)
            .unwrap()
            .result;
        assert!((e[(0, 0)].w - (-1f64).exp()).abs() < 1e-8);
        assert!(matches!(
            hinf_calculus(&pow(1), &QMatrix::from_diag(&[Quaternion::E1]), &o),
            Err(CalculusError::RegularizerSingular { .. })
        ));
    }

    #[test]
    fn oracle_examples() {
        let t = QMatrix::from_diag(&[Quaternion::new(1.0, 1.0, 0.0, 0.0)]);
        let c = eigen_oracle(&pow(3), &t).unwrap();
        assert!(c[(0, 0)].dist(Quaternion::new(-2.0, 2.0, 0.0, 0.0)) < 1e-13);
        let j = QMatrix::from_rows(vec![
            vec![Quaternion::ONE, Quaternion::ONE],
            vec![Quaternion::ZERO, Quaternion::ONE],
        ])
        .unwrap();
        assert!(matches!(
            eigen_oracle(&pow(2), &j),
            Err(CalculusError::DefectiveMatrix { .. })
        ));
        assert!(matches!(
            eigen_oracle(&poly_quaternion(Side::Left, &[Quaternion::E1]), &t),
            Err(CalculusError::NotIntrinsic(_))
        ));
    }

    #[test]
    fn identity_checks() {
        let o = CalculusOptions::default();
        let p = Prepared::new(&real_diag(&[1.0, 2.0])).unwrap();
        let pr = verify_product_rule(&p, &psi(1), &psi(1), &o).unwrap();
        assert!(pr.product.absolute < 1e-6 && pr.commutator.absolute < 1e-8);
        let reg = verify_regularizer_independence(
            &Prepared::new(&real_diag(&[1.0, 4.0])).unwrap(),
            &frac_pow(0.5),
            1,
            2,
            &o,
        )
        .unwrap();
        assert!(reg.relative < 1e-6, "{reg:?}");
        let sm = verify_spectral_mapping(&p, &psi(1), &o).unwrap();
        assert!(sm.distance < 1e-8);
        let q = Prepared::new(&real_diag(&[4.0])).unwrap();
        let sp = verify_sum_product(&q, &frac_pow(0.5), &frac_pow(0.5), &o).unwrap();
        assert!(
            sp.sum.absolute < 1e-6 && sp.product.absolute < 1e-6,
            "{sp:?}"
        );
    }

    #[test]
    fn convergence_of_a_constant_sequence() {
        let p = Prepared::new(&real_diag(&[1.0, 2.0])).unwrap();
        let u = CVec::from_element(4, Complex64::new(1.0, 0.0));
        let seq = vec![psi(1), psi(1)];
        let r = convergence_check(
            &p,
            &seq,
            &psi(1),
            &u,
            CalculusMethod::Rational,
            &CalculusOptions::default(),
        )
        .unwrap();
        assert!(r.errors.iter().all(|&e| e < 1e-14));
    }
}
