//! Function expressions such as `psi(2)`, `rational([0,1],[1,0,1])` or `left:poly([[0,1,0,0]])`.

use serde_json::Value;
use slice_calc::algebra::Quaternion;
use slice_calc::slicefn::{
    catalog, poly_quaternion, rational, rational_sided, Side, SliceFunction,
};

use crate::CliError;

fn err(spec: &str, why: impl std::fmt::Display) -> CliError {
    CliError::Input(format!("function '{spec}': {why}"))
}

fn reals(spec: &str, v: &Value) -> Result<Vec<f64>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| err(spec, "expected an array of numbers"))?;
    arr.iter()
        .map(|x| {
            x.as_f64()
                .ok_or_else(|| err(spec, "expected real coefficients"))
        })
        .collect()
}

/// Real numbers become real quaternions; `[w, x, y, z]` arrays become full quaternions.
fn quaternions(spec: &str, v: &Value) -> Result<Vec<Quaternion>, CliError> {
    let arr = v
        .as_array()
        .ok_or_else(|| err(spec, "expected an array of coefficients"))?;
    arr.iter()
        .map(|x| match x {
            Value::Number(n) => Ok(Quaternion::real(n.as_f64().unwrap_or(f64::NAN))),
            Value::Array(c) if c.len() == 4 => {
                let mut q = [0.0; 4];
                for (slot, y) in q.iter_mut().zip(c) {
                    *slot = y
                        .as_f64()
                        .ok_or_else(|| err(spec, "quaternion components must be numbers"))?;
                }
                Ok(Quaternion::from_array(q))
            }
            _ => Err(err(spec, "coefficients are numbers or [w, x, y, z]")),
        })
        .collect()
}

fn is_real(q: &[Quaternion]) -> bool {
    q.iter().all(|c| c.x == 0.0 && c.y == 0.0 && c.z == 0.0)
}

fn check_finite(spec: &str, xs: impl IntoIterator<Item = f64>) -> Result<(), CliError> {
    if xs.into_iter().all(f64::is_finite) {
        Ok(())
    } else {
        Err(err(spec, "coefficients must be finite"))
    }
}

pub fn parse(spec: &str) -> Result<SliceFunction, CliError> {
    let text = spec.trim();
    let (side, body) = match text.split_once(':') {
        Some(("left", rest)) => (Some(Side::Left), rest.trim()),
        Some(("right", rest)) => (Some(Side::Right), rest.trim()),
        Some((p, _)) => return Err(err(spec, format!("unknown prefix '{p}:'"))),
        None => (None, text),
    };
    let (name, args) = match body.find('(') {
        Some(open) => {
            let inner = body[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| err(spec, "missing closing parenthesis"))?;
            let args: Vec<Value> = serde_json::from_str(&format!("[{inner}]")).map_err(|e| {
                err(
                    spec,
                    format!(
                        "bad arguments at column {}: {e}",
                        e.column().saturating_sub(1)
                    ),
                )
            })?;
            (body[..open].trim(), args)
        }
        None => (body, Vec::new()),
    };
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Err(err(spec, "expected a function name"));
    }
    let f = match (name, args.as_slice()) {
        ("rational", [num, den]) => {
            let den = reals(spec, den)?;
            let num = quaternions(spec, num)?;
            check_finite(
                spec,
                den.iter()
                    .copied()
                    .chain(num.iter().flat_map(|q| q.to_array())),
            )?;
            match side {
                None if is_real(&num) => {
                    let num: Vec<f64> = num.iter().map(|q| q.w).collect();
                    rational(&num, &den)
                }
                None => {
                    return Err(err(
                        spec,
                        "quaternion coefficients need a left: or right: prefix",
                    ))
                }
                Some(s) => rational_sided(s, &num, &den),
            }
            .map_err(|e| err(spec, e))?
        }
        ("poly_left" | "poly_right", [coeffs]) if side.is_none() => {
            let s = if name == "poly_left" {
                Side::Left
            } else {
                Side::Right
            };
            let c = quaternions(spec, coeffs)?;
            check_finite(spec, c.iter().flat_map(|q| q.to_array()))?;
            if c.is_empty() {
                return Err(err(spec, "empty coefficient list"));
            }
            poly_quaternion(s, &c)
        }
        ("poly", [coeffs]) => {
            let c = quaternions(spec, coeffs)?;
            check_finite(spec, c.iter().flat_map(|q| q.to_array()))?;
            if c.is_empty() {
                return Err(err(spec, "empty coefficient list"));
            }
            match side {
                None if is_real(&c) => catalog("poly", &c.iter().map(|q| q.w).collect::<Vec<_>>())
                    .map_err(|e| err(spec, e))?,
                None => {
                    return Err(err(
                        spec,
                        "quaternion coefficients need a left: or right: prefix",
                    ))
                }
                Some(s) => poly_quaternion(s, &c),
            }
        }
        ("rational" | "poly" | "poly_left" | "poly_right", _) => {
            return Err(err(spec, format!("wrong arguments for {name}")));
        }
        (_, params) => {
            if side.is_some() {
                return Err(err(spec, "sided prefixes apply to rational and poly only"));
            }
            let params = params
                .iter()
                .map(|v| {
                    v.as_f64()
                        .ok_or_else(|| err(spec, "expected numeric parameters"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            catalog(name, &params).map_err(|e| err(spec, e))?
        }
    };
    Ok(f)
}
