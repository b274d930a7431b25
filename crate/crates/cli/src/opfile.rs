//! Operator documents: quaternion matrices, paravector operators and general `R_n`-linear matrices.

use std::path::Path;

use serde::{Deserialize, Serialize};
use slice_calc::algebra::Quaternion;
use slice_calc::cliffordop::{CliffordMatrix, ParavectorOperator, RMat};
use slice_calc::linalg::CMat;
use slice_calc::operator::{OperatorError, SliceOperator, Space};
use slice_calc::qmatrix::QMatrix;

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum OperatorFile {
    /// Row-major `m × m` entries, each `[w, x, y, z]`.
    QuaternionMatrix {
        m: usize,
        entries: Vec<Vec<[f64; 4]>>,
    },
    /// `n + 1` real `m × m` components `T_0, …, T_n`, row-major.
    Paravector {
        m: usize,
        n: usize,
        entries: Vec<Vec<Vec<f64>>>,
    },
    /// Real `m 2^n × m 2^n` matrix on `R^m ⊗ R_n`, index `blade · m + k`.
    CliffordMatrix {
        m: usize,
        n: usize,
        entries: Vec<Vec<f64>>,
    },
}

// Concrete document shapes, read directly from the text so that errors keep their positions.
#[derive(Deserialize)]
struct KindOnly {
    kind: String,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QuaternionDoc {
    #[serde(rename = "kind")]
    _kind: String,
    m: usize,
    entries: Vec<Vec<[f64; 4]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ParavectorDoc {
    #[serde(rename = "kind")]
    _kind: String,
    m: usize,
    n: usize,
    entries: Vec<Vec<Vec<f64>>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct CliffordDoc {
    #[serde(rename = "kind")]
    _kind: String,
    m: usize,
    n: usize,
    entries: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub enum Operator {
    Quaternion(QMatrix),
    Paravector(ParavectorOperator),
    Clifford(CliffordMatrix),
}

fn shape_error(what: impl Into<String>) -> CliError {
    CliError::Input(what.into())
}

fn real_matrix(rows: &[Vec<f64>], size: usize, what: &str) -> Result<RMat, CliError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return Err(shape_error(format!("{what} must be {size} × {size}")));
    }
    if rows.iter().flatten().any(|x| !x.is_finite()) {
        return Err(shape_error(format!("{what} has non-finite entries")));
    }
    Ok(RMat::from_fn(size, size, |r, c| rows[r][c]))
}

fn rows_of(m: &RMat) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| m.row(r).iter().copied().collect())
        .collect()
}

fn operator_error(e: OperatorError) -> CliError {
    CliError::Input(e.to_string())
}

impl OperatorFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        fn read<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T, CliError> {
            serde_json::from_str(text).map_err(|e| {
                let full = e.to_string();
                let suffix = format!(" at line {} column {}", e.line(), e.column());
                CliError::Parse {
                    line: e.line(),
                    column: e.column(),
                    message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
                }
            })
        }
        let kind: KindOnly = read(text)?;
        match kind.kind.as_str() {
            "quaternion-matrix" => read(text).map(|d: QuaternionDoc| OperatorFile::QuaternionMatrix {
                m: d.m,
                entries: d.entries,
            }),
            "paravector" => read(text).map(|d: ParavectorDoc| OperatorFile::Paravector {
                m: d.m,
                n: d.n,
                entries: d.entries,
            }),
            "clifford-matrix" => read(text).map(|d: CliffordDoc| OperatorFile::CliffordMatrix {
                m: d.m,
                n: d.n,
                entries: d.entries,
            }),
            other => Err(CliError::Input(format!(
                "unknown operator kind '{other}' (expected quaternion-matrix, paravector or clifford-matrix)"
            ))),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("operator documents serialize")
    }

    pub fn to_operator(&self) -> Result<Operator, CliError> {
        match self {
            OperatorFile::QuaternionMatrix { m, entries } => {
                if *m == 0 || entries.len() != *m || entries.iter().any(|r| r.len() != *m) {
                    return Err(shape_error(format!("entries must be {m} × {m} with m ≥ 1")));
                }
                if entries.iter().flatten().flatten().any(|x| !x.is_finite()) {
                    return Err(shape_error("entries must be finite"));
                }
                let rows = entries
                    .iter()
                    .map(|r| r.iter().map(|&q| Quaternion::from_array(q)).collect())
                    .collect();
                Ok(Operator::Quaternion(
                    QMatrix::from_rows(rows).map_err(operator_error)?,
                ))
            }
            OperatorFile::Paravector { m, n, entries } => {
                if *m == 0 || entries.len() != n + 1 {
                    return Err(shape_error(format!(
                        "paravector needs m ≥ 1 and n + 1 = {} components",
                        n + 1
                    )));
                }
                let comps = entries
                    .iter()
                    .enumerate()
                    .map(|(j, c)| real_matrix(c, *m, &format!("component {j}")))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(Operator::Paravector(
                    ParavectorOperator::new(comps).map_err(operator_error)?,
                ))
            }
            OperatorFile::CliffordMatrix { m, n, entries } => {
                let size = m
                    .checked_shl(*n as u32)
                    .filter(|s| *s > 0)
                    .ok_or_else(|| shape_error("bad size"))?;
                let mat = real_matrix(entries, size, "matrix")?;
                Ok(Operator::Clifford(
                    CliffordMatrix::new(*n, *m, mat).map_err(operator_error)?,
                ))
            }
        }
    }

    pub fn from_operator(op: &Operator) -> Self {
        match op {
            Operator::Quaternion(q) => OperatorFile::QuaternionMatrix {
                m: q.size(),
                entries: q
                    .rows()
                    .iter()
                    .map(|r| r.iter().map(|q| q.to_array()).collect())
                    .collect(),
            },
            Operator::Paravector(p) => OperatorFile::Paravector {
                m: p.size(),
                n: p.dim(),
                entries: p.components().iter().map(rows_of).collect(),
            },
            Operator::Clifford(c) => OperatorFile::CliffordMatrix {
                m: c.size(),
                n: c.dim(),
                entries: rows_of(c.matrix()),
            },
        }
    }
}

impl SliceOperator for Operator {
    fn space(&self) -> Space {
        match self {
            Operator::Quaternion(q) => q.space(),
            Operator::Paravector(p) => p.space(),
            Operator::Clifford(c) => c.space(),
        }
    }

    fn rep(&self) -> CMat {
        match self {
            Operator::Quaternion(q) => q.rep(),
            Operator::Paravector(p) => p.rep(),
            Operator::Clifford(c) => c.rep(),
        }
    }

    /// Quaternionic spaces read back as matrices over `H`, Clifford spaces as general `R_n`-linear matrices.
    fn from_rep(space: Space, rep: &CMat) -> Result<Self, OperatorError> {
        Ok(match space {
            Space::Quaternion { .. } => Operator::Quaternion(QMatrix::from_rep(space, rep)?),
            Space::Clifford { .. } => Operator::Clifford(CliffordMatrix::from_rep(space, rep)?),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_round_trip_is_bit_exact() {
        let text = r#"{"kind":"quaternion-matrix","m":2,"entries":[[[0.1,0.2,0.30000000000000004,1e-300],[1,0,0,0]],[[0,0,0,0],[3.141592653589793,-2.718281828459045,5e-324,7]]]}"#;
        let f = OperatorFile::parse(text).unwrap();
        let op = f.to_operator().unwrap();
        let back = OperatorFile::parse(&OperatorFile::from_operator(&op).to_json()).unwrap();
        assert_eq!(back, f);
        let (
            OperatorFile::QuaternionMatrix { entries: a, .. },
            OperatorFile::QuaternionMatrix { entries: b, .. },
        ) = (&f, &back)
        else {
            panic!()
        };
        for (x, y) in a
            .iter()
            .flatten()
            .flatten()
            .zip(b.iter().flatten().flatten())
        {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn paravector_round_trip() {
        let text =
            r#"{"kind":"paravector","m":2,"n":1,"entries":[[[2,0],[0,3]],[[0,0.5],[-0.5,0]]]}"#;
        let f = OperatorFile::parse(text).unwrap();
        let op = f.to_operator().unwrap();
        assert_eq!(OperatorFile::from_operator(&op), f);
    }

    #[test]
    fn parse_errors_carry_positions() {
        match OperatorFile::parse(
            "{\n  \"kind\": \"quaternion-matrix\",\n  \"m\": 1,\n  \"entries\": [[[1, 2, 3]]]\n}",
        ) {
            Err(CliError::Parse {
                line,
                column,
                message,
            }) => {
                assert_eq!(line, 4);
                assert!(column > 0);
                assert!(!message.contains("line"), "{message}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn shapes_are_checked() {
        let bad = r#"{"kind":"quaternion-matrix","m":2,"entries":[[[1,0,0,0]]]}"#;
        assert!(matches!(
            OperatorFile::parse(bad).unwrap().to_operator(),
            Err(CliError::Input(_))
        ));
        let bad = r#"{"kind":"paravector","m":1,"n":2,"entries":[[[1]],[[0]]]}"#;
        assert!(matches!(
            OperatorFile::parse(bad).unwrap().to_operator(),
            Err(CliError::Input(_))
        ));
        let unknown = r#"{"kind":"matrix","m":1}"#;
        assert!(matches!(
            OperatorFile::parse(unknown),
            Err(CliError::Input(_))
        ));
        let extra = r#"{"kind":"quaternion-matrix","m":1,"entries":[[[1,0,0,0]]],"x":1}"#;
        assert!(matches!(
            OperatorFile::parse(extra),
            Err(CliError::Parse { .. })
        ));
        assert!(matches!(
            OperatorFile::parse("{\"kind\": "),
            Err(CliError::Parse { .. })
        ));
    }
}
