//! Empirical membership tests for the bounded, decaying and polynomially
//! growing function classes on a sector.

use num_complex::Complex64;

use super::{DecayBound, GrowthBound, Orders, SliceFunction};

/// Number of log-spaced radii in `[1e-4, 1e4]`.
pub const GRID_RADII: usize = 40;
/// Number of angles strictly inside `(-μ, μ)`.
pub const GRID_ANGLES: usize = 33;

const SLOPE_TOL: f64 = 0.02;

/// Outcome of [`classify`]; all constants hold on every grid sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Classification {
    pub mu: f64,
    /// Sampled supremum of `|f|`; infinite when a sample failed or overflowed.
    pub sup: f64,
    pub in_shinf: bool,
    pub in_psi: bool,
    pub decay: Option<DecayBound>,
    pub in_f: bool,
    pub growth: Option<GrowthBound>,
    /// Power-law orders used for the decision.
    pub orders: Orders,
    /// Sample `(r, φ)` with the largest `|f|`, or the first failing sample.
    pub witness: (f64, f64),
}

pub fn grid_radii() -> Vec<f64> {
    (0..GRID_RADII)
        .map(|j| 10f64.powf(-4.0 + 8.0 * j as f64 / (GRID_RADII - 1) as f64))
        .collect()
}

pub fn grid_angles(mu: f64) -> Vec<f64> {
    (0..GRID_ANGLES)
        .map(|k| -mu + 2.0 * mu * (k + 1) as f64 / (GRID_ANGLES + 1) as f64)
        .collect()
}

/// Samples `|f|` on a log-radial by angular grid of the sector `S_μ`.
pub fn classify(f: &SliceFunction, mu: f64) -> Classification {
    let radii = grid_radii();
    let angles = grid_angles(mu);
    let mut row_max = vec![0.0f64; radii.len()];
    let mut samples: Vec<(f64, f64, f64)> = Vec::with_capacity(radii.len() * angles.len());
    let mut witness = (radii[0], angles[0]);
    let mut sup = 0.0f64;
    let mut failed = false;
    'outer: for (j, &r) in radii.iter().enumerate() {
        for &phi in &angles {
            let z = Complex64::from_polar(r, phi);
            let v = f.abs_on_slices(z).unwrap_or(f64::INFINITY);
            let v = if v.is_nan() { f64::INFINITY } else { v };
            if v > sup {
                sup = v;
                witness = (r, phi);
            }
            if !v.is_finite() {
                failed = true;
                witness = (r, phi);
                break 'outer;
            }
            row_max[j] = row_max[j].max(v);
            samples.push((r, phi, v));
        }
    }
    if failed {
        return Classification {
            mu,
            sup: f64::INFINITY,
            in_shinf: false,
            in_psi: false,
            decay: None,
            in_f: false,
            growth: None,
            orders: Orders {
                at_zero: f64::NAN,
                at_infinity: f64::NAN,
            },
            witness,
        };
    }

    let slope =
        |a: usize, b: usize| (row_max[b].ln() - row_max[a].ln()) / (radii[b].ln() - radii[a].ln());
    let n = radii.len();
    let empirical = Orders {
        at_zero: snap(slope(0, 4)),
        at_infinity: snap(slope(n - 5, n - 1)),
    };
    let orders = match f.orders {
        // Metadata is trusted unless the samples clearly contradict it.
        Some(o) if consistent(o, empirical) => o,
        _ => empirical,
    };

    let in_shinf = orders.at_zero >= -SLOPE_TOL && orders.at_infinity <= SLOPE_TOL;
    let (in_psi, decay) = match orders.decay_exponent() {
        Some(alpha) if alpha > SLOPE_TOL => {
            let c = samples
                .iter()
                .map(|&(r, _, v)| v * (1.0 + r.powf(2.0 * alpha)) / r.powf(alpha))
                .fold(0.0, f64::max);
            (c.is_finite(), Some(DecayBound { alpha, c }))
        }
        _ => (false, None),
    };
    let k = orders.growth_exponent();
    let c = samples
        .iter()
        .map(|&(r, _, v)| v / (r.powf(k) + r.powf(-k)))
        .fold(0.0, f64::max);
    let in_f = k.is_finite() && c.is_finite();
    Classification {
        mu,
        sup,
        in_shinf,
        in_psi,
        decay: if in_psi { decay } else { None },
        in_f,
        growth: in_f.then_some(GrowthBound { k, c }),
        orders,
        witness,
    }
}

fn snap(x: f64) -> f64 {
    if x.is_nan() || x.abs() < SLOPE_TOL {
        0.0
    } else {
        x
    }
}

fn consistent(meta: Orders, emp: Orders) -> bool {
    let close = |a: f64, b: f64| {
        if a.is_infinite() {
            // Faster than any power: the empirical slope just needs the same sign.
            a.signum() * b >= -SLOPE_TOL
        } else {
            (a - b).abs() <= 0.25 + 0.05 * a.abs()
        }
    };
    close(meta.at_zero, emp.at_zero) && close(meta.at_infinity, emp.at_infinity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slicefn::{exp_neg, pow, psi};
    use std::f64::consts::PI;

    #[test]
    fn psi_two_decays_on_the_right_half_plane() {
        let c = classify(&psi(2), PI / 2.0);
        assert!(c.in_psi);
        assert_eq!(c.decay.unwrap().alpha, 2.0);
    }

    #[test]
    fn exp_neg_is_bounded_but_does_not_decay_at_zero() {
        let c = classify(&exp_neg(), PI / 4.0);
        assert!(c.in_shinf);
        assert!(!c.in_psi);
        assert!((c.sup - 1.0).abs() < 1e-3);
    }

    #[test]
    fn cube_grows() {
        let c = classify(&pow(3), PI / 4.0);
        assert!(c.in_f);
        assert_eq!(c.growth.unwrap().k, 3.0);
        assert!(!c.in_shinf);
    }

    #[test]
    fn constants_hold_on_all_samples() {
        let f = psi(1);
        let c = classify(&f, PI / 3.0);
        let d = c.decay.unwrap();
        for r in grid_radii() {
            for phi in grid_angles(PI / 3.0) {
                let v = f.abs_on_slices(Complex64::from_polar(r, phi)).unwrap();
                assert!(v <= d.c * r.powf(d.alpha) / (1.0 + r.powf(2.0 * d.alpha)) * (1.0 + 1e-12));
            }
        }
    }
}
