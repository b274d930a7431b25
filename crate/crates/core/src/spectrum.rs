//! S-spectrum, pseudo-resolvent, S-resolvents and sector profiles.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{CliffordElement, Quaternion, SliceUnit};
use crate::linalg::{self, CMat, CVec, LinalgError};
use crate::operator::{OperatorError, SliceOperator, Space};
use crate::qmatrix::{embed_vector, QMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectrumError {
    #[error("the sphere through ({u}, {v}) meets the S-spectrum")]
    OnSpectrum { u: f64, v: f64 },
    #[error("s and p lie on the same sphere ({u}, {v})")]
    SphereCollision { u: f64, v: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// One sphere `[u + v S]` of the S-spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sphere {
    pub u: f64,
    pub v: f64,
    pub multiplicity: usize,
    /// `σ_min(T² − 2uT + (u² + v²)I) / ‖T‖²` at the representative.
    pub residual: f64,
}

impl Sphere {
    pub fn arg(&self) -> f64 {
        if self.u == 0.0 && self.v == 0.0 {
            0.0
        } else {
            self.v.atan2(self.u)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SSpectrum {
    pub spheres: Vec<Sphere>,
}

impl SSpectrum {
    /// Smallest `ω` with `σ_S(T) ⊂ S_ω`.
    pub fn omega(&self) -> f64 {
        self.spheres.iter().map(Sphere::arg).fold(0.0, f64::max)
    }

    pub fn spectral_radius(&self) -> f64 {
        self.spheres
            .iter()
            .map(|s| s.u.hypot(s.v))
            .fold(0.0, f64::max)
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.spheres.iter().map(|s| (s.u, s.v)).collect()
    }

    /// Distance from the sphere through `u + i v` to the nearest spectral sphere.
    pub fn distance(&self, u: f64, v: f64) -> f64 {
        self.spheres
            .iter()
            .map(|s| (s.u - u).hypot(s.v - v.abs()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains_zero(&self, tol: f64) -> bool {
        self.distance(0.0, 0.0) <= tol
    }
}

/// Hausdorff distance between two finite sets of sphere representatives.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let one_way = |x: &[(f64, f64)], y: &[(f64, f64)]| {
        x.iter()
            .map(|p| {
                y.iter()
                    .map(|q| (p.0 - q.0).hypot(p.1 - q.1))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

/// An operator together with its cached representation.
#[derive(Debug, Clone)]
pub struct RepOperator {
    pub space: Space,
    pub rep: CMat,
    pub rep_sq: CMat,
    pub norm: f64,
}

impl RepOperator {
    pub fn new<O: SliceOperator>(t: &O) -> Self {
        Self::from_parts(t.space(), t.rep())
    }

    pub fn from_parts(space: Space, rep: CMat) -> Self {
        let rep_sq = &rep * &rep;
        let norm = linalg::spectral_norm(&rep);
        Self {
            space,
            rep,
            rep_sq,
            norm,
        }
    }

    /// `T² − 2uT + r2 I`.
    pub fn pencil(&self, u: f64, r2: f64) -> CMat {
        let mut p = &self.rep_sq - &self.rep * Complex64::new(2.0 * u, 0.0);
        for k in 0..p.nrows() {
            p[(k, k)] += r2;
        }
        p
    }

    /// `Q_s(T)`; depends on `s` only through `Re s` and `|s|²`.
    pub fn pseudo_resolvent(&self, u: f64, r2: f64) -> Result<CMat, SpectrumError> {
        linalg::inverse(&self.pencil(u, r2)).map_err(|e| match e {
            LinalgError::Singular { .. } => SpectrumError::OnSpectrum {
                u,
                v: (r2 - u * u).max(0.0).sqrt(),
            },
            other => other.into(),
        })
    }

    /// `Q_s(T)` by LU, for callers that already keep `s` away from the spectrum.
    pub fn pseudo_resolvent_fast(&self, u: f64, r2: f64) -> Result<CMat, SpectrumError> {
        linalg::inverse_fast(&self.pencil(u, r2)).map_err(|_| SpectrumError::OnSpectrum {
            u,
            v: (r2 - u * u).max(0.0).sqrt(),
        })
    }

    fn split(s: &CliffordElement) -> (f64, f64) {
        (s.re(), s.norm() * s.norm())
    }

    /// `S_L^{-1}(s,T) = Q_s(T) s̄ − T Q_s(T)` from a precomputed `Q_s`.
    pub fn left_from_q(&self, q: &CMat, s: &CliffordElement) -> CMat {
        q * self.space.scalar(&s.conj()) - &self.rep * q
    }

    /// `S_R^{-1}(s,T) = −(T − 𝕀s̄) Q_s(T)` from a precomputed `Q_s`.
    pub fn right_from_q(&self, q: &CMat, s: &CliffordElement) -> CMat {
        (self.space.scalar(&s.conj()) - &self.rep) * q
    }

    pub fn resolvent_left(&self, s: &CliffordElement) -> Result<CMat, SpectrumError> {
        let (u, r2) = Self::split(s);
        Ok(self.left_from_q(&self.pseudo_resolvent(u, r2)?, s))
    }

    pub fn resolvent_right(&self, s: &CliffordElement) -> Result<CMat, SpectrumError> {
        let (u, r2) = Self::split(s);
        Ok(self.right_from_q(&self.pseudo_resolvent(u, r2)?, s))
    }

    /// Both S-resolvents sharing one pseudo-resolvent.
    pub fn resolvents(&self, s: &CliffordElement) -> Result<(CMat, CMat), SpectrumError> {
        let (u, r2) = Self::split(s);
        let q = self.pseudo_resolvent(u, r2)?;
        Ok((self.left_from_q(&q, s), self.right_from_q(&q, s)))
    }

    pub fn spectrum(&self) -> Result<SSpectrum, SpectrumError> {
        spectrum_of(self)
    }

    /// `‖LHS v − RHS v‖` for the S-resolvent equation
    /// `S_R(s)S_L(p) = [(S_R(s) − S_L(p))p − s̄(S_R(s) − S_L(p))](p² − 2s₀p + |s|²)^{-1}`.
    pub fn resolvent_equation_residual(
        &self,
        s: &CliffordElement,
        p: &CliffordElement,
        v: &CVec,
    ) -> Result<f64, SpectrumError> {
        let (su, sr2) = Self::split(s);
        let (pu, pr2) = Self::split(p);
        let sv = (sr2 - su * su).max(0.0).sqrt();
        let pv = (pr2 - pu * pu).max(0.0).sqrt();
        let scale = 1.0 + s.norm() + p.norm();
        if (su - pu).abs() <= 1e-13 * scale && (sv - pv).abs() <= 1e-13 * scale {
            return Err(SpectrumError::SphereCollision { u: su, v: sv });
        }
        let sr = self.resolvent_right(s)?;
        let sl = self.resolvent_left(p)?;
        let lhs = &sr * &sl;
        let d = &sr - &sl;
        let lp = self.space.scalar(p);
        let quad = &lp * &lp - &lp * Complex64::new(2.0 * su, 0.0)
            + self.space.identity() * Complex64::new(sr2, 0.0);
        let quad_inv = linalg::inverse(&quad)?;
        let rhs = (&d * &lp - self.space.scalar(&s.conj()) * &d) * quad_inv;
        Ok(((lhs - rhs) * v).norm())
    }
}

/// Spheres from the eigenvalues of the representation, each verified on the pencil.
pub fn s_spectrum<O: SliceOperator>(t: &O) -> Result<SSpectrum, SpectrumError> {
    spectrum_of(&RepOperator::new(t))
}

fn spectrum_of(op: &RepOperator) -> Result<SSpectrum, SpectrumError> {
    let eig = linalg::eigenvalues(&op.rep)?;
    let scale = op.norm.max(f64::MIN_POSITIVE);
    let tol = 1e-7 * scale;
    let pts: Vec<(f64, f64)> = eig.iter().map(|z| (z.re, z.im.abs())).collect();
    // Single-linkage clustering of (u, |v|) points.
    let mut parent: Vec<usize> = (0..pts.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for a in 0..pts.len() {
        for b in a + 1..pts.len() {
            if (pts[a].0 - pts[b].0).hypot(pts[a].1 - pts[b].1) <= tol {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: Vec<(usize, Vec<usize>)> = Vec::new();
    for k in 0..pts.len() {
        let r = find(&mut parent, k);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(k),
            None => groups.push((r, vec![k])),
        }
    }
    let div = op.space.multiplicity_divisor();
    let norm2 = (op.norm * op.norm).max(f64::MIN_POSITIVE);
    let mut spheres: Vec<Sphere> = groups
        .into_iter()
        .map(|(_, idx)| {
            let n = idx.len() as f64;
            let u = idx.iter().map(|&k| pts[k].0).sum::<f64>() / n;
            let mut v = idx.iter().map(|&k| pts[k].1).sum::<f64>() / n;
            if v <= 1e-12 * scale {
                v = 0.0;
            }
            let residual = linalg::sigma_min(&op.pencil(u, u * u + v * v)) / norm2;
            Sphere {
                u,
                v,
                multiplicity: idx.len().div_ceil(div).max(1),
                residual,
            }
        })
        .collect();
    spheres.sort_by(|a, b| a.u.total_cmp(&b.u).then(a.v.total_cmp(&b.v)));
    Ok(SSpectrum { spheres })
}

/// Sampled resolvent bound for one sector angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SectorSample {
    pub theta: f64,
    /// `sup |s| max(‖S_L^{-1}(s,T)‖, ‖S_R^{-1}(s,T)‖)` over samples outside `S_θ`; `None` when `θ ≤ ω`.
    pub c: Option<f64>,
    /// Sample `(|s|, arg s)` attaining the bound.
    pub witness: Option<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorProfile {
    pub omega: f64,
    pub samples: Vec<SectorSample>,
}

impl SectorProfile {
    pub fn constant(&self, theta: f64) -> Option<f64> {
        self.samples
            .iter()
            .find(|s| s.theta == theta)
            .and_then(|s| s.c)
    }
}

pub const SECTOR_RADII: usize = 60;
pub const SECTOR_ANGLES: usize = 24;

/// Estimates `C_θ` on `60` log radii in `[1e-3 ‖T‖, 1e3 ‖T‖]` by `24` angles per `θ` in `[θ, π]`.
/// The angle sets are nested so the estimates are non-increasing in `θ`.
pub fn classify_sector<O: SliceOperator>(
    t: &O,
    thetas: &[f64],
) -> Result<SectorProfile, SpectrumError> {
    let op = RepOperator::new(t);
    sector_profile(&op, thetas, SECTOR_RADII)
}

pub fn sector_profile(
    op: &RepOperator,
    thetas: &[f64],
    n_radii: usize,
) -> Result<SectorProfile, SpectrumError> {
    let omega = op.spectrum()?.omega();
    let scale = if op.norm > 0.0 { op.norm } else { 1.0 };
    let admissible: Vec<f64> = thetas
        .iter()
        .copied()
        .filter(|&th| th > omega && th <= PI)
        .collect();
    let mut angles: Vec<f64> = admissible
        .iter()
        .flat_map(|&th| {
            (0..SECTOR_ANGLES).map(move |k| th + (PI - th) * k as f64 / (SECTOR_ANGLES - 1) as f64)
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles.dedup();
    let radii: Vec<f64> = (0..n_radii)
        .map(|j| scale * 10f64.powf(-3.0 + 6.0 * j as f64 / (n_radii.max(2) - 1) as f64))
        .collect();
    let dim = op.space.algebra_dim().max(1);
    let mut units = vec![SliceUnit::e1(dim)];
    if dim >= 2 {
        units.push(SliceUnit::new(CliffordElement::unit(dim, 2)).expect("unit"));
    }
    let points: Vec<(f64, f64)> = radii
        .iter()
        .flat_map(|&r| angles.iter().map(move |&a| (r, a)))
        .collect();
    let values: Vec<Result<f64, SpectrumError>> = points
        .par_iter()
        .map(|&(r, a)| {
            let z = Complex64::from_polar(r, a);
            let mut best = 0.0f64;
            for i in &units {
                let s = i.point(z.re, z.im);
                let (l, rr) = op.resolvents(&s)?;
                best = best
                    .max(linalg::spectral_norm(&l))
                    .max(linalg::spectral_norm(&rr));
            }
            Ok(best * r)
        })
        .collect();
    let values = values.into_iter().collect::<Result<Vec<_>, _>>()?;
    let samples = thetas
        .iter()
        .map(|&theta| {
            if theta <= omega || theta > PI {
                return SectorSample {
                    theta,
                    c: None,
                    witness: None,
                };
            }
            let mut best = (0.0, None);
            for (k, &(r, a)) in points.iter().enumerate() {
                if a >= theta && values[k] > best.0 {
                    best = (values[k], Some((r, a)));
                }
            }
            SectorSample {
                theta,
                c: Some(best.0),
                witness: best.1,
            }
        })
        .collect();
    Ok(SectorProfile { omega, samples })
}

fn q_element(q: Quaternion) -> CliffordElement {
    CliffordElement::from_quaternion(2, q)
}

/// `Q_s(T) = (T² − 2Re(s)T + |s|²I)^{-1}`.
pub fn pseudo_resolvent(t: &QMatrix, s: Quaternion) -> Result<QMatrix, SpectrumError> {
    let op = RepOperator::new(t);
    let q = op.pseudo_resolvent(s.w, s.norm() * s.norm())?;
    Ok(QMatrix::from_rep(op.space, &q)?)
}

pub fn s_resolvent_left(t: &QMatrix, s: Quaternion) -> Result<QMatrix, SpectrumError> {
    let op = RepOperator::new(t);
    Ok(QMatrix::from_rep(
        op.space,
        &op.resolvent_left(&q_element(s))?,
    )?)
}

pub fn s_resolvent_right(t: &QMatrix, s: Quaternion) -> Result<QMatrix, SpectrumError> {
    let op = RepOperator::new(t);
    Ok(QMatrix::from_rep(
        op.space,
        &op.resolvent_right(&q_element(s))?,
    )?)
}

pub fn resolvent_equation_residual(
    t: &QMatrix,
    s: Quaternion,
    p: Quaternion,
    v: &[Quaternion],
) -> Result<f64, SpectrumError> {
    if v.len() != t.size() {
        return Err(OperatorError::LengthMismatch {
            expected: t.size(),
            found: v.len(),
        }
        .into());
    }
    RepOperator::new(t).resolvent_equation_residual(&q_element(s), &q_element(p), &embed_vector(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slicefn::{cauchy_kernel_left, cauchy_kernel_right};

    fn q(w: f64, x: f64, y: f64, z: f64) -> Quaternion {
        Quaternion::new(w, x, y, z)
    }

    #[test]
    fn diagonal_spectra() {
        let s = s_spectrum(&QMatrix::from_diag(&[
            q(2.0, 0.0, 0.0, 0.0),
            q(3.0, 0.0, 0.0, 0.0),
        ]))
        .unwrap();
        assert_eq!(s.points(), vec![(2.0, 0.0), (3.0, 0.0)]);
        let s = s_spectrum(&QMatrix::from_diag(&[Quaternion::E1, Quaternion::E2])).unwrap();
        assert_eq!(s.spheres.len(), 1);
        assert!((s.spheres[0].v - 1.0).abs() < 1e-14 && s.spheres[0].u.abs() < 1e-14);
        assert_eq!(s.spheres[0].multiplicity, 2);
        assert!((s.omega() - PI / 2.0).abs() < 1e-14);
        let s = s_spectrum(&QMatrix::from_diag(&[q(1.0, 2.0, 0.0, 0.0)])).unwrap();
        assert!(hausdorff(&s.points(), &[(1.0, 2.0)]) < 1e-14);
    }

    #[test]
    fn pseudo_resolvent_scalar() {
        let t = QMatrix::from_diag(&[Quaternion::E1]);
        let qs = pseudo_resolvent(&t, Quaternion::real(2.0)).unwrap();
        assert!(qs[(0, 0)].dist(q(3.0, 4.0, 0.0, 0.0).scale(1.0 / 25.0)) < 1e-15);
        let z = pseudo_resolvent(&QMatrix::zeros(1), Quaternion::ONE).unwrap();
        assert!(z[(0, 0)].dist(Quaternion::ONE) < 1e-15);
    }

    #[test]
    fn resolvents_reduce_to_kernels() {
        let x = q(0.3, -1.2, 0.4, 0.9);
        let s = q(1.1, 0.2, -0.7, 0.5);
        let t = QMatrix::from_diag(&[x]);
        let l = s_resolvent_left(&t, s).unwrap()[(0, 0)];
        let r = s_resolvent_right(&t, s).unwrap()[(0, 0)];
        let kl = cauchy_kernel_left(&q_element(s), &q_element(x))
            .unwrap()
            .to_quaternion()
            .unwrap();
        let kr = cauchy_kernel_right(&q_element(s), &q_element(x))
            .unwrap()
            .to_quaternion()
            .unwrap();
        assert!(l.dist(kl) < 1e-14, "{l:?} vs {kl:?}");
        assert!(r.dist(kr) < 1e-14, "{r:?} vs {kr:?}");
        let e = s_resolvent_left(
            &QMatrix::from_diag(&[Quaternion::E1]),
            Quaternion::real(2.0),
        )
        .unwrap();
        assert!(e[(0, 0)].dist(q(2.0, 1.0, 0.0, 0.0).scale(0.2)) < 1e-15);
    }

    #[test]
    fn resolvent_equation_holds() {
        let t = QMatrix::from_fn(3, |r, c| {
            q(r as f64 - c as f64, 0.5 * c as f64, 0.3, -(r as f64) * 0.2)
        });
        let v = vec![
            q(1.0, 0.0, -1.0, 2.0),
            q(0.5, 0.5, 0.5, 0.5),
            q(0.0, 1.0, 0.0, 0.0),
        ];
        let res =
            resolvent_equation_residual(&t, q(4.0, 1.0, 2.0, 0.0), q(-3.0, 0.0, 1.0, 5.0), &v)
                .unwrap();
        assert!(res < 1e-12, "{res}");
        let err = resolvent_equation_residual(&t, q(4.0, 1.0, 0.0, 0.0), q(4.0, 0.0, 1.0, 0.0), &v);
        assert!(matches!(err, Err(SpectrumError::SphereCollision { .. })));
    }

    #[test]
    fn sector_profile_is_monotone() {
        let t = QMatrix::from_diag(&[q(1.0, 1.0, 0.0, 0.0), Quaternion::real(2.0)]);
        let thetas = [PI / 6.0, PI / 3.0, PI / 2.0, 2.0 * PI / 3.0];
        let p = classify_sector(&t, &thetas).unwrap();
        assert!((p.omega - PI / 4.0).abs() < 1e-12);
        assert!(p.samples[0].c.is_none());
        let cs: Vec<f64> = p.samples[1..].iter().map(|s| s.c.unwrap()).collect();
        assert!(cs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn on_spectrum_is_rejected() {
        let t = QMatrix::from_diag(&[Quaternion::E1]);
        assert!(matches!(
            s_resolvent_left(&t, Quaternion::E2),
            Err(SpectrumError::OnSpectrum { .. })
        ));
    }
}
