//! Star product, conjugate, symmetrization and star inverse on stems.

use num_complex::Complex64;

use super::poly::{RationalForm, SlicePolynomial};
use super::{merge_poles, Orders, Shape, Side, SliceError, SliceFunction, Stem, StemFn};
use crate::algebra::{blade_sign, conj_sign, CliffordElement};

fn odd(mask: usize) -> bool {
    mask.count_ones() % 2 == 1
}

/// `z ↦ conj(F(conj z))`, the holomorphic reflection of a stem.
fn reflected(f: &StemFn) -> StemFn {
    let f = f.clone();
    std::sync::Arc::new(move |z: Complex64| Ok(f(z.conj())?.conj()))
}

/// Star product `f ⋆ g`.
///
/// Left: the `e_{A Δ B}` component collects `sign(e_A e_B) F_A G̃_B` where
/// `G̃_B = G_B` for even `|A|` and `conj(G_B(conj z))` for odd `|A|`.
/// Right: `sign(e_A e_B) F̃_A G_B` with the reflection applied when `|B|` is odd.
pub fn star_mul(f: &SliceFunction, g: &SliceFunction) -> Result<SliceFunction, SliceError> {
    let side = f
        .side
        .combine(g.side)
        .ok_or(SliceError::SideMismatch(f.side, g.side))?;
    let n = f.n.max(g.n);
    let mut terms: Vec<(usize, f64, StemFn, StemFn)> = Vec::new();
    for a in &f.stems {
        for b in &g.stems {
            let sign = blade_sign(a.mask, b.mask);
            let (fa, gb) = match side {
                Side::Right if odd(b.mask) => (reflected(&a.f), b.f.clone()),
                Side::Right => (a.f.clone(), b.f.clone()),
                _ if odd(a.mask) => (a.f.clone(), reflected(&b.f)),
                _ => (a.f.clone(), b.f.clone()),
            };
            terms.push((a.mask ^ b.mask, sign, fa, gb));
        }
    }
    let mut masks: Vec<usize> = terms.iter().map(|t| t.0).collect();
    masks.sort_unstable();
    masks.dedup();
    let stems = masks
        .into_iter()
        .map(|mask| {
            let parts: Vec<(f64, StemFn, StemFn)> = terms
                .iter()
                .filter(|t| t.0 == mask)
                .map(|t| (t.1, t.2.clone(), t.3.clone()))
                .collect();
            Stem::new(mask, move |z| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (sign, fa, gb) in &parts {
                    acc += fa(z)? * gb(z)? * *sign;
                }
                Ok(acc)
            })
        })
        .collect();
    let domain = f.domain.intersect(&g.domain);
    let mut out = SliceFunction::from_stems(
        side,
        n,
        domain,
        stems,
        format!("({})*({})", f.label, g.label),
    );
    out.poles = merge_poles(&f.poles, &g.poles);
    out.sector_limit = f.sector_limit.min(g.sector_limit);
    out.degree = f.degree + g.degree;
    out.orders = match (f.orders, g.orders) {
        (Some(a), Some(b)) => Some(a.product(b)),
        _ => None,
    };
    if let (Some(a), Some(b)) = (&f.rational, &g.rational) {
        if let Ok(r) = a.star_mul(b) {
            out.shape = if r.is_polynomial() {
                Shape::Polynomial
            } else {
                Shape::Rational
            };
            out.rational = Some(r);
        }
    }
    Ok(out)
}

/// Slice hyperholomorphic conjugate `f^c`.
///
/// `F^c_A = sign(|A|) conj(F_A(conj z))` for even `|A|` and `sign(|A|) F_A(z)` for
/// odd `|A|`, where `sign` is `+, -, -, +` by `|A| mod 4`.
pub fn conjugate(f: &SliceFunction) -> SliceFunction {
    if f.is_intrinsic() {
        return f.clone().with_label(format!("({})^c", f.label));
    }
    let stems = f
        .stems
        .iter()
        .map(|s| {
            let sign = conj_sign(s.mask.count_ones());
            let inner = if odd(s.mask) {
                s.f.clone()
            } else {
                reflected(&s.f)
            };
            Stem::new(s.mask, move |z| Ok(inner(z)? * sign))
        })
        .collect();
    let mut out =
        SliceFunction::from_stems(f.side, f.n, f.domain, stems, format!("({})^c", f.label));
    out.poles = f.poles.clone();
    out.sector_limit = f.sector_limit;
    out.orders = f.orders;
    out.degree = f.degree;
    out.shape = f.shape.clone();
    out.rational = f.rational.as_ref().map(|r| r.conjugate());
    out
}

/// Symmetrization `f^s`, the `C_i`-valued part of `f ⋆ f^c`; always intrinsic.
pub fn symmetrize(f: &SliceFunction) -> SliceFunction {
    let full = star_mul(f, &conjugate(f)).expect("a function and its conjugate share a side");
    let scalar = full
        .stems
        .iter()
        .find(|s| s.mask == 0)
        .cloned()
        .unwrap_or_else(|| Stem::new(0, |_| Ok(Complex64::new(0.0, 0.0))));
    let mut out = SliceFunction::from_stems(
        Side::Intrinsic,
        1,
        full.domain,
        vec![scalar],
        format!("({})^s", f.label),
    );
    out.poles = full.poles.clone();
    out.sector_limit = full.sector_limit;
    out.orders = full.orders;
    out.degree = full.degree;
    if let Some(r) = &full.rational {
        let coeffs: Option<Vec<f64>> = r
            .num
            .coeffs()
            .iter()
            .map(|c| (c.coeff(1).abs() <= 1e-14 * c.norm().max(1.0)).then_some(c.re()))
            .collect();
        if let Some(c) = coeffs {
            let num = SlicePolynomial::real(&c);
            if let Ok(rf) = RationalForm::new(num, r.den.clone()) {
                out.shape = if rf.is_polynomial() {
                    Shape::Polynomial
                } else {
                    Shape::Rational
                };
                out.rational = Some(rf);
            }
        }
    }
    out
}

fn probe_points(f: &SliceFunction) -> Vec<Complex64> {
    let mut pts = Vec::new();
    for &r in &[0.3, 0.7, 1.3, 2.1] {
        for &phi in &[0.3f64, 1.1, 2.0] {
            let z = Complex64::from_polar(r, phi);
            if f.contains(z.re, z.im) {
                pts.push(z);
            }
        }
    }
    pts
}

/// Largest non-slice component of `f ⋆ f^c` over probe points, relative to its slice part.
pub fn condition_defect(f: &SliceFunction) -> Result<f64, SliceError> {
    let full = star_mul(f, &conjugate(f))?;
    let mut worst = 0.0f64;
    for z in probe_points(f) {
        let vals = full.stem_values(z)?;
        let scale = vals.iter().map(|(_, w)| w.norm()).fold(1.0, f64::max);
        for (mask, w) in vals {
            if mask != 0 {
                worst = worst.max(w.norm() / scale);
            }
        }
    }
    Ok(worst)
}

/// Star inverse `f^{-⋆} = (f^s)^{-1} f^c`.
///
/// Evaluation fails with `ZeroDivisor` where `|f^s| < 1e-12 (1 + |q|^{2 deg})`.
/// Non-intrinsic Clifford functions must have `f ⋆ f^c` slice-valued.
pub fn star_inv(f: &SliceFunction) -> Result<SliceFunction, SliceError> {
    if !f.is_intrinsic() && f.n > 2 {
        let deviation = condition_defect(f)?;
        if deviation > 1e-10 {
            return Err(SliceError::ConditionViolated { deviation });
        }
    }
    let fs = symmetrize(f);
    let fc = conjugate(f);
    let deg = f.degree as i32;
    let s_stem = fs.stems[0].f.clone();
    let stems = fc
        .stems
        .iter()
        .map(|c| {
            let cf = c.f.clone();
            let sf = s_stem.clone();
            Stem::new(c.mask, move |z| {
                let s = sf(z)?;
                let thresh = 1e-12 * (1.0 + z.norm().powi(2 * deg));
                if s.norm() < thresh {
                    return Err(SliceError::ZeroDivisor {
                        u: z.re,
                        v: z.im.abs(),
                        value: s.norm(),
                    });
                }
                Ok(cf(z)? / s)
            })
        })
        .collect();
    let mut out =
        SliceFunction::from_stems(f.side, f.n, f.domain, stems, format!("({})^-*", f.label));
    out.degree = f.degree;
    out.sector_limit = f.sector_limit;
    out.orders = f.orders.map(|o| Orders {
        at_zero: -o.at_zero,
        at_infinity: -o.at_infinity,
    });
    if let (Some(r), Some(s)) = (&f.rational, &fs.rational) {
        // f = Q^{-1} P gives f^{-*} = (P^s)^{-1} Q P^c where f^s = Q^{-2} P^s.
        if let Some(ps) = s.num.real_coeffs() {
            let qq = super::poly::real_poly_mul(&r.den, &r.den);
            let ps_over = divide_exact(&ps, &s.den, &qq);
            if let Some(ps_num) = ps_over {
                let num = r.conjugate().num.mul_real(&r.den);
                if let Ok(rf) = RationalForm::new(num, ps_num) {
                    out.shape = Shape::Rational;
                    out.rational = Some(rf);
                }
            }
        }
    }
    Ok(out)
}

/// Numerator of `P^s` given `f^s = S / D` with `D = Q^2`; returns `S` when `D` matches.
fn divide_exact(s: &[f64], d: &[f64], qq: &[f64]) -> Option<Vec<f64>> {
    let same = d.len() == qq.len()
        && d.iter()
            .zip(qq)
            .all(|(a, b)| (a - b).abs() <= 1e-12 * b.abs().max(1.0));
    same.then(|| s.to_vec())
}

/// `f ⋆ g` evaluated at a point, a convenience for identity checks.
pub fn star_eval(
    f: &SliceFunction,
    g: &SliceFunction,
    q: &CliffordElement,
) -> Result<CliffordElement, SliceError> {
    star_mul(f, g)?.eval(q)
}
