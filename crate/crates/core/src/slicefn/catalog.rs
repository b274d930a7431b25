//! Named constructors for commonly used functions.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::classify::classify;
use super::poly::{RationalForm, SlicePolynomial};
use super::{Orders, Shape, Side, SliceDomain, SliceError, SliceFunction};
use crate::algebra::{CliffordElement, Quaternion};

/// Sector on which catalog decay and growth constants are fitted.
pub const CERTIFY_SECTOR: f64 = PI / 4.0;

fn certified(f: SliceFunction) -> SliceFunction {
    let c = classify(&f, CERTIFY_SECTOR);
    let mut f = f;
    if c.in_psi {
        f.decay = c.decay;
    }
    if c.in_f {
        f.growth = c.growth;
    }
    f
}

/// `s^m`.
pub fn pow(m: u32) -> SliceFunction {
    let mut coeffs = vec![0.0; m as usize + 1];
    coeffs[m as usize] = 1.0;
    let f = SlicePolynomial::real(&coeffs)
        .to_function()
        .with_label(format!("pow({m})"))
        .with_shape(Shape::Pow(m));
    certified(f)
}

/// Real constant.
pub fn constant(c: f64) -> SliceFunction {
    poly_real(&[c]).with_label(format!("{c}"))
}

/// Intrinsic polynomial with real coefficients, lowest degree first.
pub fn poly_real(coeffs: &[f64]) -> SliceFunction {
    SlicePolynomial::real(coeffs).to_function()
}

/// Left (`Σ q^ℓ a_ℓ`) or right (`Σ a_ℓ q^ℓ`) polynomial with quaternion coefficients.
pub fn poly_quaternion(side: Side, coeffs: &[Quaternion]) -> SliceFunction {
    poly_sided(
        side,
        coeffs
            .iter()
            .map(|&q| CliffordElement::from_quaternion(2, q))
            .collect(),
    )
}

/// Polynomial with Clifford coefficients.
pub fn poly_sided(side: Side, coeffs: Vec<CliffordElement>) -> SliceFunction {
    SlicePolynomial::new(side, coeffs).to_function()
}

/// Intrinsic rational function `P / Q` with real coefficients.
pub fn rational(num: &[f64], den: &[f64]) -> Result<SliceFunction, SliceError> {
    let f = RationalForm::new(SlicePolynomial::real(num), den.to_vec())?.to_function();
    Ok(f.with_label(format!("rational({num:?},{den:?})")))
}

/// `Q^{-1} P` (left) or `P Q^{-1}` (right) with quaternion numerator coefficients.
pub fn rational_sided(
    side: Side,
    num: &[Quaternion],
    den: &[f64],
) -> Result<SliceFunction, SliceError> {
    let p = SlicePolynomial::new(
        side,
        num.iter()
            .map(|&q| CliffordElement::from_quaternion(2, q))
            .collect(),
    );
    Ok(RationalForm::new(p, den.to_vec())?.to_function())
}

/// `(s / (1 + s^2))^k`.
pub fn psi(k: u32) -> SliceFunction {
    let mut num = vec![0.0; k as usize + 1];
    num[k as usize] = 1.0;
    let mut den = vec![1.0];
    for _ in 0..k {
        den = super::poly::real_poly_mul(&den, &[1.0, 0.0, 1.0]);
    }
    let f = RationalForm::new(SlicePolynomial::real(&num), den)
        .expect("nonzero denominator")
        .to_function()
        .with_label(format!("psi({k})"))
        .with_shape(Shape::Psi(k))
        .with_poles(vec![(0.0, 1.0)]);
    certified(f)
}

/// Principal branch `s^α` on `|arg s| < π`.
pub fn frac_pow(alpha: f64) -> SliceFunction {
    let f = SliceFunction::intrinsic(
        SliceDomain::Sector(PI),
        format!("frac_pow({alpha})"),
        move |z: Complex64| Ok(z.powf(alpha)),
    )
    .with_orders(Orders {
        at_zero: alpha,
        at_infinity: alpha,
    })
    .with_shape(Shape::FracPow(alpha));
    certified(f)
}

/// `e^{-s}`; bounded on sectors of opening below `π/2`.
pub fn exp_neg() -> SliceFunction {
    let f = SliceFunction::intrinsic(SliceDomain::WHOLE, "exp_neg", |z: Complex64| Ok((-z).exp()))
        .with_orders(Orders {
            at_zero: 0.0,
            at_infinity: f64::NEG_INFINITY,
        })
        .with_sector_limit(PI / 2.0)
        .with_shape(Shape::ExpNeg);
    certified(f)
}

/// Looks a function up by name with numeric parameters.
pub fn catalog(name: &str, params: &[f64]) -> Result<SliceFunction, SliceError> {
    let int_param = |what: &str, min: u32| -> Result<u32, SliceError> {
        match params {
            [x] if x.fract() == 0.0 && *x >= min as f64 && *x <= 64.0 => Ok(*x as u32),
            _ => Err(SliceError::InvalidParameter(format!(
                "{what} expects one integer ≥ {min}"
            ))),
        }
    };
    match name {
        "pow" => Ok(pow(int_param("pow", 0)?)),
        "psi" => Ok(psi(int_param("psi", 1)?)),
        "frac_pow" => match params {
            [a] if *a > 0.0 && a.is_finite() => Ok(frac_pow(*a)),
            _ => Err(SliceError::InvalidParameter(
                "frac_pow expects one positive exponent".into(),
            )),
        },
        "exp_neg" if params.is_empty() => Ok(exp_neg()),
        "exp_neg" => Err(SliceError::InvalidParameter(
            "exp_neg takes no parameters".into(),
        )),
        "poly" if !params.is_empty() => Ok(poly_real(params)),
        "constant" => match params {
            [c] => Ok(constant(*c)),
            _ => Err(SliceError::InvalidParameter(
                "constant expects one value".into(),
            )),
        },
        other => Err(SliceError::UnknownFunction(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(f: &SliceFunction, x: f64) -> Complex64 {
        f.stems()[0].eval(Complex64::new(x, 0.0)).unwrap()
    }

    #[test]
    fn catalog_values() {
        assert!((at(&psi(1), 2.0).re - 0.4).abs() < 1e-15);
        assert!((at(&frac_pow(0.5), 9.0).re - 3.0).abs() < 1e-14);
        assert!((at(&exp_neg(), 1.0).re - (-1f64).exp()).abs() < 1e-15);
        assert!((at(&pow(3), 2.0).re - 8.0).abs() < 1e-15);
    }

    #[test]
    fn psi_is_certified_with_decay() {
        let d = psi(1).decay().unwrap();
        assert_eq!(d.alpha, 1.0);
        assert!(d.c >= 1.0);
        assert!(psi(2).poles().contains(&(0.0, 1.0)));
    }

    #[test]
    fn unknown_names_and_bad_parameters() {
        assert!(matches!(
            catalog("sin", &[]),
            Err(SliceError::UnknownFunction(_))
        ));
        assert!(catalog("psi", &[0.0]).is_err());
        assert!(catalog("pow", &[1.5]).is_err());
        assert!(catalog("frac_pow", &[-1.0]).is_err());
        assert!(catalog("psi", &[2.0]).is_ok());
    }
}
