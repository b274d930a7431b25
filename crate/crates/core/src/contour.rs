//! Integration paths in a slice plane with `ds_i = −i ds` folded into the weights.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{CliffordElement, SliceUnit};
use crate::linalg::CMat;
use crate::slicefn::{SliceError, SliceFunction};
use crate::spectrum::{RepOperator, SSpectrum, SpectrumError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContourError {
    #[error("invalid contour parameter: {0}")]
    InvalidParameter(String),
    #[error("integration path meets the S-spectrum near ({u}, {v})")]
    PathHitsSpectrum { u: f64, v: f64 },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Slice(#[from] SliceError),
}

/// A quadrature node `s_k` in the slice plane and its weight for `ds_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub z: Complex64,
    pub w: Complex64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ContourKind {
    Circle {
        center: f64,
        radius: f64,
    },
    /// From `R e^{iθ}` to `ε e^{iθ}`, along `|s| = ε` through the positive axis, then out to `R e^{−iθ}`.
    SectorPath {
        theta: f64,
        eps: f64,
        big_r: f64,
        panels_per_decade: usize,
    },
}

#[derive(Debug, Clone)]
pub struct Contour {
    pub unit: SliceUnit,
    pub kind: ContourKind,
    pub nodes: Vec<Node>,
}

pub const GAUSS_ORDER: usize = 8;

fn gauss_pairs(order: usize) -> Vec<(f64, f64)> {
    GaussLegendre::new(NonZeroUsize::new(order).expect("positive order"))
        .as_node_weight_pairs()
        .to_vec()
}

/// Trapezoidal circle of radius `r` about the origin.
pub fn build_circle(i: SliceUnit, r: f64, n: usize) -> Result<Contour, ContourError> {
    build_circle_centered(i, 0.0, r, n)
}

/// Trapezoidal circle about a real centre, positively oriented.
pub fn build_circle_centered(
    i: SliceUnit,
    center: f64,
    r: f64,
    n: usize,
) -> Result<Contour, ContourError> {
    if !(r > 0.0 && r.is_finite() && center.is_finite()) || n < 8 {
        return Err(ContourError::InvalidParameter(format!(
            "circle needs r > 0 and N ≥ 8 (r = {r}, N = {n})"
        )));
    }
    let h = 2.0 * PI * r / n as f64;
    let nodes = (0..n)
        .map(|k| {
            let e = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / n as f64);
            Node {
                z: center + e * r,
                w: e * h,
            }
        })
        .collect();
    Ok(Contour {
        unit: i,
        kind: ContourKind::Circle { center, radius: r },
        nodes,
    })
}

/// Boundary of the sector `S_θ` truncated to `ε ≤ |s| ≤ R`, with Gauss–Legendre panels in `ln |s|`.
pub fn build_sector_path(
    i: SliceUnit,
    theta: f64,
    eps: f64,
    big_r: f64,
    panels_per_decade: usize,
) -> Result<Contour, ContourError> {
    if !(theta > 0.0 && theta < PI) {
        return Err(ContourError::InvalidParameter(format!(
            "sector angle {theta} outside (0, π)"
        )));
    }
    if !(eps > 0.0 && eps < big_r && big_r.is_finite()) || panels_per_decade == 0 {
        return Err(ContourError::InvalidParameter(format!(
            "need 0 < ε < R and panels > 0 (ε = {eps}, R = {big_r})"
        )));
    }
    let gl = gauss_pairs(GAUSS_ORDER);
    let (ta, tb) = (eps.ln(), big_r.ln());
    let panels = ((big_r / eps).log10() * panels_per_decade as f64)
        .ceil()
        .max(1.0) as usize;
    let dt = (tb - ta) / panels as f64;
    let mut ray: Vec<(f64, f64)> = Vec::with_capacity(panels * GAUSS_ORDER);
    for p in 0..panels {
        let mid = ta + (p as f64 + 0.5) * dt;
        for &(x, w) in &gl {
            let t = mid + 0.5 * dt * x;
            ray.push((t.exp(), 0.5 * dt * w));
        }
    }
    let minus_i = Complex64::new(0.0, -1.0);
    let up = Complex64::from_polar(1.0, theta);
    let down = up.conj();
    let mut nodes = Vec::with_capacity(2 * ray.len() + 4 * GAUSS_ORDER);
    // Upper ray, traversed inward.
    for &(rho, w) in ray.iter().rev() {
        nodes.push(Node {
            z: up * rho,
            w: minus_i * (-up * rho * w),
        });
    }
    // Arc |s| = ε from angle θ down to −θ.
    let arc_panels = (2.0 * theta / (PI / 8.0)).ceil().max(1.0) as usize;
    let dphi = 2.0 * theta / arc_panels as f64;
    for p in (0..arc_panels).rev() {
        let mid = -theta + (p as f64 + 0.5) * dphi;
        for &(x, w) in gl.iter().rev() {
            let phi = mid + 0.5 * dphi * x;
            let e = Complex64::from_polar(eps, phi);
            nodes.push(Node {
                z: e,
                w: minus_i * (-Complex64::i() * e * (0.5 * dphi * w)),
            });
        }
    }
    // Lower ray, traversed outward.
    for &(rho, w) in &ray {
        nodes.push(Node {
            z: down * rho,
            w: minus_i * (down * rho * w),
        });
    }
    Ok(Contour {
        unit: i,
        kind: ContourKind::SectorPath {
            theta,
            eps,
            big_r,
            panels_per_decade,
        },
        nodes,
    })
}

impl Contour {
    /// The same path traversed backwards.
    pub fn reversed(&self) -> Contour {
        let mut c = self.clone();
        c.nodes.reverse();
        for n in &mut c.nodes {
            n.w = -n.w;
        }
        c
    }

    /// `Σ_k g(s_k) w_k`, the discretised `∫ g(s) ds_i` for a complex integrand on the slice.
    pub fn sum(&self, g: impl Fn(Complex64) -> Complex64) -> Complex64 {
        self.nodes.iter().map(|n| g(n.z) * n.w).sum()
    }

    /// Fails when a node lies within `tol` of a spectral sphere.
    pub fn check_clear(&self, spectrum: &SSpectrum, tol: f64) -> Result<(), ContourError> {
        for n in &self.nodes {
            if spectrum.distance(n.z.re, n.z.im) <= tol {
                return Err(ContourError::PathHitsSpectrum {
                    u: n.z.re,
                    v: n.z.im.abs(),
                });
            }
        }
        Ok(())
    }

    /// Per-node `Q_k` weighted by the blade coefficients of two elements `(a_k, b_k)`.
    ///
    /// Returns `(Σ_k a_{k,β} Q_k, Σ_k b_{k,β} Q_k)` for every blade `β`, divided by `2π`.
    /// Chunks are summed in index order so results do not depend on the thread count.
    fn accumulate(
        &self,
        op: &RepOperator,
        coeffs: impl Fn(&Node) -> Result<(CliffordElement, CliffordElement), ContourError> + Sync,
    ) -> Result<Vec<CMat>, ContourError> {
        let d = op.space.rep_dim();
        let n = op.space.algebra_dim();
        let blades = 1usize << n;
        let partial: Vec<Result<Vec<CMat>, ContourError>> = self
            .nodes
            .par_chunks(64)
            .map(|chunk| {
                let mut acc = vec![CMat::zeros(d, d); 2 * blades];
                for node in chunk {
                    let q = op.pseudo_resolvent_fast(node.z.re, node.z.norm_sqr())?;
                    let (a, b) = coeffs(node)?;
                    let (a, b) = (a.lift(n), b.lift(n));
                    for (k, c) in a.coeffs().iter().chain(b.coeffs()).enumerate() {
                        let c = *c;
                        if c != 0.0 {
                            acc[k].zip_apply(&q, |x, y| *x += y * c);
                        }
                    }
                }
                Ok(acc)
            })
            .collect();
        let mut acc = vec![CMat::zeros(d, d); 2 * blades];
        for p in partial {
            for (x, y) in acc.iter_mut().zip(p?) {
                *x += y;
            }
        }
        let scale = Complex64::new(1.0 / (2.0 * PI), 0.0);
        Ok(acc.into_iter().map(|m| m * scale).collect())
    }

    fn blade_scalars(op: &RepOperator) -> Vec<CMat> {
        let n = op.space.algebra_dim();
        (0..1usize << n)
            .map(|mask| {
                let mut e = CliffordElement::zero(n);
                e.set_coeff(mask, 1.0);
                op.space.scalar(&e)
            })
            .collect()
    }

    fn node_point(&self, z: Complex64) -> CliffordElement {
        self.unit.point(z.re, z.im)
    }

    /// `(1/2π) Σ S_L^{-1}(s_k, T) w_k f(s_k)`, with `w_k` read in the slice `C_i`.
    ///
    /// With `a_k = w_k f(s_k)` the sum is `Σ Q_k (s̄_k a_k) − T Σ Q_k a_k`.
    pub fn integrate_left(
        &self,
        op: &RepOperator,
        f: &SliceFunction,
    ) -> Result<CMat, ContourError> {
        let acc = self.accumulate(op, |n| {
            let s = self.node_point(n.z);
            let value = self.node_point(n.w) * f.eval_slice(n.z, &self.unit)?;
            Ok((s.conj() * value, value))
        })?;
        let e = Self::blade_scalars(op);
        let (a, b) = acc.split_at(e.len());
        let d = op.space.rep_dim();
        let mut left = CMat::zeros(d, d);
        let mut right = CMat::zeros(d, d);
        for (k, eb) in e.iter().enumerate() {
            left += &a[k] * eb;
            right += &b[k] * eb;
        }
        Ok(left - &op.rep * right)
    }

    /// `(1/2π) Σ f(s_k) w_k S_R^{-1}(s_k, T)`.
    ///
    /// With `a_k = f(s_k) w_k` the sum is `Σ (a_k s̄_k) Q_k − Σ a_k T Q_k`.
    pub fn integrate_right(
        &self,
        op: &RepOperator,
        f: &SliceFunction,
    ) -> Result<CMat, ContourError> {
        let acc = self.accumulate(op, |n| {
            let s = self.node_point(n.z);
            let value = f.eval_slice(n.z, &self.unit)? * self.node_point(n.w);
            Ok((value * s.conj(), value))
        })?;
        let e = Self::blade_scalars(op);
        let (a, b) = acc.split_at(e.len());
        let d = op.space.rep_dim();
        let mut out = CMat::zeros(d, d);
        for (k, eb) in e.iter().enumerate() {
            out += eb * (&a[k] - &op.rep * &b[k]);
        }
        Ok(out)
    }
}
