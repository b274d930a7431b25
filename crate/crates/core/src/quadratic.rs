//! Quadratic estimates `∫₀^∞ ‖ψ(tT)u‖² dt/t ≤ β²‖u‖²` and the empirical
//! bound `‖f(T)‖ ≤ C‖f‖_∞`.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::Quaternion;
use crate::calculus::{CalculusError, CalculusOptions, Prepared};
use crate::linalg::{self, CMat, CVec};
use crate::operator::{SliceOperator, Space};
use crate::qmatrix::{embed_vector, QMatrix};
use crate::sample::{self, SampleRng};
use crate::slicefn::{classify, grid_radii, SliceFunction};
use crate::spectrum::{RepOperator, SSpectrum, Sphere};

const GAUSS_ORDER: usize = 8;

#[derive(Debug, Clone)]
pub struct QuadratureOptions {
    /// Lower limit is `eps_factor / ‖T‖`.
    pub eps_factor: f64,
    /// Upper limit is `r_factor / ‖T‖`.
    pub r_factor: f64,
    pub panels_per_decade: usize,
    pub calculus: CalculusOptions,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            eps_factor: 1e-6,
            r_factor: 1e6,
            panels_per_decade: 20,
            calculus: CalculusOptions::default(),
        }
    }
}

/// One evaluation of the truncated square function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadraticEstimate {
    /// `∫_ε^R ‖ψ(tT)u‖² dt/t`.
    pub value: f64,
    pub eps: f64,
    pub big_r: f64,
    pub nodes: usize,
    /// Difference from the same rule with half the panels.
    pub refinement: f64,
    /// Power-law estimate of the two discarded tails.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaEstimate {
    pub beta: f64,
    /// `sqrt` of each trial integral, in trial order.
    pub samples: Vec<f64>,
    pub adjoint_samples: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HinfBound {
    pub norm: f64,
    pub sup: f64,
    pub ratio: f64,
    pub constant: f64,
    pub holds: bool,
    pub theta: f64,
}

/// `(1/2)Γ(k)²/Γ(2k)`, the scalar integral for `psi(k)`.
pub fn scalar_closed_form(k: u32) -> f64 {
    let k = k as u64;
    let fact = |n: u64| (1..=n).map(|j| j as f64).product::<f64>();
    0.5 * fact(k - 1).powi(2) / fact(2 * k - 1)
}

/// Checks `ψ` is intrinsic, decays at both ends and is positive on `(0, ∞)`.
pub fn check_psi_plus(psi: &SliceFunction) -> Result<(), CalculusError> {
    let bad = |why: &str| Err(CalculusError::NotPsiPlus(format!("{}: {why}", psi.label())));
    if !psi.is_intrinsic() || psi.stems().len() != 1 {
        return bad("not intrinsic");
    }
    let orders = match psi.orders() {
        Some(o) => o,
        None => classify(psi, psi.sector_angle().min(PI / 2.0)).orders,
    };
    if orders.decay_exponent().is_none() {
        return bad("no decay at 0 and ∞");
    }
    let stem = &psi.stems()[0];
    for t in grid_radii() {
        let v = stem.eval(Complex64::new(t, 0.0))?;
        if !(v.re > 0.0) || v.im.abs() > 1e-12 * v.re {
            return bad(&format!("ψ({t:e}) = {v} is not positive"));
        }
    }
    Ok(())
}

fn log_nodes(eps: f64, big_r: f64, ppd: usize) -> Vec<(f64, f64)> {
    let gl = GaussLegendre::new(NonZeroUsize::new(GAUSS_ORDER).expect("positive order"));
    let (ta, tb) = (eps.ln(), big_r.ln());
    let panels = ((big_r / eps).log10() * ppd as f64).ceil().max(1.0) as usize;
    let dt = (tb - ta) / panels as f64;
    let mut out = Vec::with_capacity(panels * GAUSS_ORDER);
    for p in 0..panels {
        let mid = ta + (p as f64 + 0.5) * dt;
        for &(x, w) in gl.as_node_weight_pairs() {
            out.push(((mid + 0.5 * dt * x).exp(), 0.5 * dt * w));
        }
    }
    out
}

fn scaled(p: &Prepared, t: f64) -> Prepared {
    let spheres = p
        .spectrum
        .spheres
        .iter()
        .map(|s| Sphere {
            u: t * s.u,
            v: t * s.v,
            ..*s
        })
        .collect();
    Prepared {
        op: RepOperator::from_parts(p.op.space, &p.op.rep * Complex64::new(t, 0.0)),
        spectrum: SSpectrum { spheres },
    }
}

/// `‖ψ(tT)u‖²` at each node.
fn integrand(
    p: &Prepared,
    psi: &SliceFunction,
    u: &CVec,
    ts: &[f64],
    opts: &CalculusOptions,
) -> Result<Vec<f64>, CalculusError> {
    if let Some(r) = psi.rational_form() {
        let num = r
            .num
            .real_coeffs()
            .ok_or_else(|| CalculusError::NotPsiPlus(psi.label().to_string()))?;
        let den = &r.den;
        let deg = num.len().max(den.len());
        let mut powers = vec![p.op.space.identity()];
        for l in 1..deg {
            powers.push(&p.op.rep * &powers[l - 1]);
        }
        let pu: Vec<CVec> = powers.iter().map(|m| m * u).collect();
        return ts
            .par_iter()
            .map(|&t| {
                let d = p.op.space.rep_dim();
                let mut q = CMat::zeros(d, d);
                let mut tl = 1.0;
                for (l, &b) in den.iter().enumerate() {
                    q += &powers[l] * Complex64::new(b * tl, 0.0);
                    tl *= t;
                }
                let mut rhs = CVec::zeros(d);
                let mut tl = 1.0;
                for (l, &a) in num.iter().enumerate() {
                    rhs += &pu[l] * Complex64::new(a * tl, 0.0);
                    tl *= t;
                }
                let x = q
                    .lu()
                    .solve(&rhs)
                    .ok_or(CalculusError::PoleOnSpectrum { u: 0.0, v: 1.0 / t })?;
                Ok(x.norm_squared())
            })
            .collect();
    }
    ts.par_iter()
        .map(|&t| {
            let m = scaled(p, t).omega(psi, opts)?.result;
            Ok((m * u).norm_squared())
        })
        .collect()
}

/// `∫_ε^R ‖ψ(tT)u‖² dt/t` on a prepared operator, `u` in representation coordinates.
pub fn quadratic_integral_rep(
    p: &Prepared,
    psi: &SliceFunction,
    u: &CVec,
    opts: &QuadratureOptions,
) -> Result<QuadraticEstimate, CalculusError> {
    check_psi_plus(psi)?;
    if u.len() != p.op.space.rep_dim() {
        return Err(CalculusError::InvalidParameter(format!(
            "vector of length {} for an operator of size {}",
            u.len(),
            p.op.space.rep_dim()
        )));
    }
    let scale = if p.op.norm > 0.0 { p.op.norm } else { 1.0 };
    let (eps, big_r) = (opts.eps_factor / scale, opts.r_factor / scale);
    if !(eps > 0.0 && eps < big_r && big_r.is_finite()) || opts.panels_per_decade < 2 {
        return Err(CalculusError::InvalidParameter(format!(
            "ε = {eps}, R = {big_r}"
        )));
    }
    if u.norm() == 0.0 {
        return Ok(QuadraticEstimate {
            value: 0.0,
            eps,
            big_r,
            nodes: 0,
            refinement: 0.0,
            tail_bound: 0.0,
        });
    }
    let fine = log_nodes(eps, big_r, opts.panels_per_decade);
    let coarse = log_nodes(eps, big_r, opts.panels_per_decade / 2);
    let ts: Vec<f64> = fine
        .iter()
        .chain(&coarse)
        .map(|n| n.0)
        .chain([eps, big_r])
        .collect();
    let g = integrand(p, psi, u, &ts, &opts.calculus)?;
    let (gf, rest) = g.split_at(fine.len());
    let (gc, ends) = rest.split_at(coarse.len());
    let value: f64 = fine.iter().zip(gf).map(|(n, g)| n.1 * g).sum();
    let coarse_value: f64 = coarse.iter().zip(gc).map(|(n, g)| n.1 * g).sum();
    let orders = psi
        .orders()
        .unwrap_or_else(|| classify(psi, psi.sector_angle().min(PI / 2.0)).orders);
    let tail = |g: f64, order: f64| {
        if order.is_finite() && order > 0.0 {
            g / (2.0 * order)
        } else {
            0.0
        }
    };
    Ok(QuadraticEstimate {
        value,
        eps,
        big_r,
        nodes: fine.len(),
        refinement: (value - coarse_value).abs(),
        tail_bound: tail(ends[0], orders.at_zero) + tail(ends[1], -orders.at_infinity),
    })
}

/// `∫_ε^R ‖ψ(tT)u‖² dt/t` for a quaternionic matrix, with `ε, R` scaled by `1/‖T‖`.
pub fn quadratic_integral(
    t: &QMatrix,
    psi: &SliceFunction,
    u: &[Quaternion],
    opts: &QuadratureOptions,
) -> Result<QuadraticEstimate, CalculusError> {
    if u.len() != t.size() {
        return Err(CalculusError::InvalidParameter(format!(
            "vector of length {} for a {}×{} matrix",
            u.len(),
            t.size(),
            t.size()
        )));
    }
    quadratic_integral_rep(&Prepared::new(t)?, psi, &embed_vector(u), opts)
}

/// A random unit vector of the space in representation coordinates.
pub fn random_unit(space: Space, rng: &mut SampleRng) -> CVec {
    match space {
        Space::Quaternion { m } => embed_vector(&sample::unit_qvector(rng, m)),
        Space::Clifford { .. } => {
            use rand::Rng;
            let d = space.rep_dim();
            let v = CVec::from_fn(d, |_, _| Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            let r = v.norm();
            v / Complex64::new(r, 0.0)
        }
    }
}

/// Largest `sqrt(∫‖ψ(tT)u‖² dt/t)` over random unit `u`, and over `T*` when asked.
pub fn estimate_beta<O: SliceOperator>(
    t: &O,
    psi: &SliceFunction,
    trials: usize,
    seed: u64,
    adjoint: bool,
    opts: &QuadratureOptions,
) -> Result<BetaEstimate, CalculusError> {
    if trials == 0 {
        return Err(CalculusError::InvalidParameter("at least one trial".into()));
    }
    let p = Prepared::new(t)?;
    let mut rng = sample::rng(seed);
    let us: Vec<CVec> = (0..trials)
        .map(|_| random_unit(p.op.space, &mut rng))
        .collect();
    let run = |p: &Prepared| -> Result<Vec<f64>, CalculusError> {
        us.iter()
            .map(|u| {
                Ok(quadratic_integral_rep(p, psi, u, opts)?
                    .value
                    .max(0.0)
                    .sqrt())
            })
            .collect()
    };
    let samples = run(&p)?;
    let adjoint_samples = if adjoint {
        let a = RepOperator::from_parts(p.op.space, p.op.rep.adjoint());
        run(&Prepared::from_rep(a)?)?
    } else {
        Vec::new()
    };
    let beta = samples
        .iter()
        .chain(&adjoint_samples)
        .fold(0.0f64, |a, &b| a.max(b));
    Ok(BetaEstimate {
        beta,
        samples,
        adjoint_samples,
    })
}

/// Compares `‖f(T)‖` from the regularised calculus against `C ‖f‖_∞` on `S_θ`, `θ = (ω + μ)/2`.
pub fn hinf_bound_check_rep(
    p: &Prepared,
    f: &SliceFunction,
    constant: f64,
    opts: &CalculusOptions,
) -> Result<HinfBound, CalculusError> {
    let mu = f.sector_angle().min(PI / 2.0);
    let omega = p.spectrum.omega();
    if omega >= mu {
        return Err(CalculusError::NotTypeOmega { omega, mu });
    }
    let theta = opts.theta.unwrap_or(0.5 * (omega + mu));
    let c = classify(f, theta);
    if !c.in_shinf {
        return Err(CalculusError::NotInFClass(format!(
            "{} is not bounded on S_{theta:.6}",
            f.label()
        )));
    }
    let fl = p.hinf(f, opts)?.result;
    let norm = linalg::spectral_norm(&fl);
    let ratio = if c.sup > 0.0 {
        norm / c.sup
    } else {
        f64::INFINITY
    };
    Ok(HinfBound {
        norm,
        sup: c.sup,
        ratio,
        constant,
        holds: norm <= constant * c.sup,
        theta,
    })
}

pub fn hinf_bound_check<O: SliceOperator>(
    t: &O,
    f: &SliceFunction,
    constant: f64,
    opts: &CalculusOptions,
) -> Result<HinfBound, CalculusError> {
    hinf_bound_check_rep(&Prepared::new(t)?, f, constant, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slicefn::{exp_neg, frac_pow, pow, psi};

    fn scalar(l: f64) -> QMatrix {
        QMatrix::from_diag(&[Quaternion::real(l)])
    }

    #[test]
    fn scalar_integrals() {
        let opts = QuadratureOptions::default();
        for k in 1..=4 {
            let want = scalar_closed_form(k);
            let at = |l: f64| {
                quadratic_integral(&scalar(l), &psi(k), &[Quaternion::ONE], &opts).unwrap()
            };
            let one = at(1.0);
            assert!((one.value - want).abs() < 1e-9, "k = {k}: {}", one.value);
            for l in [0.1, 10.0] {
                assert!((at(l).value - one.value).abs() <= 1e-10 * want);
            }
        }
        assert_eq!(scalar_closed_form(2), 1.0 / 12.0);
        let z = quadratic_integral(&scalar(1.0), &psi(1), &[Quaternion::ZERO], &opts).unwrap();
        assert_eq!(z.value, 0.0);
    }

    #[test]
    fn psi_plus_is_enforced() {
        let opts = QuadratureOptions::default();
        for f in [pow(1), frac_pow(0.5)] {
            let e = quadratic_integral(&scalar(1.0), &f, &[Quaternion::ONE], &opts).unwrap_err();
            assert_eq!(e.name(), "NotPsiPlus");
        }
    }

    #[test]
    fn beta_of_hermitian() {
        let t = QMatrix::from_diag(&[Quaternion::real(1.0), Quaternion::real(10.0)]);
        let opts = QuadratureOptions::default();
        let b = estimate_beta(&t, &psi(1), 6, 11, true, &opts).unwrap();
        assert!((b.beta - 0.5f64.sqrt()).abs() < 1e-8);
        for (a, c) in b.samples.iter().zip(&b.adjoint_samples) {
            assert!((a - c).abs() < 1e-10);
        }
    }

    #[test]
    fn hinf_bound_on_positive_matrices() {
        let mut rng = sample::rng(2);
        let t = sample::hermitian_positive(&mut rng, 3, 0.5, 3.0);
        let r = hinf_bound_check(&t, &exp_neg(), 1.0, &CalculusOptions::default()).unwrap();
        assert!(r.holds && r.ratio <= 1.0 + 1e-6, "{r:?}");
        let one = hinf_bound_check(
            &t,
            &crate::slicefn::constant(1.0),
            1.0,
            &CalculusOptions::default(),
        )
        .unwrap();
        assert!(
            (one.norm - 1.0).abs() < 1e-6 && (one.ratio - 1.0).abs() < 1e-6,
            "{one:?}"
        );
    }
}
