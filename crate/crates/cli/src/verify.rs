//! Seeded identity suites behind `slice-calc verify`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use slice_calc::algebra::{CliffordElement, Quaternion, SliceUnit};
use slice_calc::calculus::{
    convergence_check, verify_product_rule, verify_regularizer_independence,
    verify_spectral_mapping, CalculusMethod, CalculusOptions, Prepared, Residual,
};
use slice_calc::cliffordop::{
    clifford_resolvent_equation_residual, clifford_s_spectrum, ParavectorOperator, RMat,
};
use slice_calc::qmatrix::{embed_vector, op_norm, QMatrix};
use slice_calc::sample::{self, SampleRng};
use slice_calc::slicefn::{
    exp_neg, frac_pow, poly_quaternion, pow, psi, rational, star_inv, star_mul, Side, SliceFunction,
};
use slice_calc::spectrum::resolvent_equation_residual;

/// One named quantity from a trial and the bound it must meet.
#[derive(Debug, Clone, Copy)]
pub struct Measurement {
    pub name: &'static str,
    pub value: f64,
    pub tol: f64,
}

type Trial = fn(&mut SampleRng) -> Result<Vec<Measurement>, String>;

pub struct Suite {
    pub name: &'static str,
    pub default_trials: usize,
    run: Trial,
}

pub const SUITES: [Suite; 8] = [
    Suite {
        name: "resolvent-eq",
        default_trials: 100,
        run: resolvent_eq,
    },
    Suite {
        name: "slice-independence",
        default_trials: 3,
        run: slice_independence,
    },
    Suite {
        name: "product-rule",
        default_trials: 3,
        run: product_rule,
    },
    Suite {
        name: "regularizer",
        default_trials: 3,
        run: regularizer,
    },
    Suite {
        name: "spectral-map",
        default_trials: 5,
        run: spectral_map,
    },
    Suite {
        name: "star-inverse",
        default_trials: 20,
        run: star_inverse,
    },
    Suite {
        name: "clifford",
        default_trials: 10,
        run: clifford,
    },
    Suite {
        name: "convergence",
        default_trials: 2,
        run: convergence,
    },
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).chain(["all"]).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub index: usize,
    pub seed: u64,
    pub passed: bool,
    pub values: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasurementSummary {
    pub name: String,
    pub worst: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub passed: bool,
    pub trials: usize,
    pub summary: Vec<MeasurementSummary>,
    /// Failing trials with their seeds, in trial order.
    pub witnesses: Vec<TrialReport>,
}

/// Per-trial seeds, distinct across suites for the same master seed.
fn trial_seeds(seed: u64, suite_index: usize, trials: usize) -> Vec<u64> {
    let mut rng = sample::rng(seed ^ (suite_index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    (0..trials).map(|_| rng.random()).collect()
}

pub fn run_suite(index: usize, seed: u64, trials: Option<usize>) -> SuiteReport {
    let suite = &SUITES[index];
    let trials = trials.unwrap_or(suite.default_trials);
    let reports: Vec<TrialReport> = trial_seeds(seed, index, trials)
        .into_par_iter()
        .enumerate()
        .map(|(k, s)| {
            let outcome = std::panic::catch_unwind(|| (suite.run)(&mut sample::rng(s)))
                .unwrap_or_else(|_| Err("trial panicked".into()));
            match outcome {
                Ok(ms) => TrialReport {
                    index: k,
                    seed: s,
                    passed: ms.iter().all(|m| m.value <= m.tol),
                    values: ms.iter().map(|m| (m.name.to_string(), m.value)).collect(),
                    error: None,
                },
                Err(e) => TrialReport {
                    index: k,
                    seed: s,
                    passed: false,
                    values: Vec::new(),
                    error: Some(e),
                },
            }
        })
        .collect();
    let mut summary: Vec<MeasurementSummary> = Vec::new();
    for r in &reports {
        for (name, value) in &r.values {
            match summary.iter_mut().find(|m| &m.name == name) {
                Some(m) => m.worst = m.worst.max(*value),
                None => summary.push(MeasurementSummary {
                    name: name.clone(),
                    worst: *value,
                    tol: tolerance_of(name),
                }),
            }
        }
    }
    SuiteReport {
        suite: suite.name.to_string(),
        passed: reports.iter().all(|r| r.passed),
        trials,
        summary,
        witnesses: reports.into_iter().filter(|r| !r.passed).collect(),
    }
}

const TOLERANCES: [(&str, f64); 11] = [
    ("resolvent_residual", 1e-8),
    ("slice_deviation", 1e-8),
    ("product_residual", 1e-6),
    ("regularizer_relative", 1e-6),
    ("hausdorff", 1e-7),
    ("star_inverse_error", 1e-10),
    ("clifford_resolvent_residual", 1e-8),
    ("clifford_method_deviation", 1e-6),
    ("convergence_final", 1e-6),
    ("convergence_increase", 0.0),
    ("limit_bound_excess", 1e-6),
];

fn tolerance_of(name: &str) -> f64 {
    TOLERANCES
        .iter()
        .find(|(n, _)| *n == name)
        .map_or(0.0, |t| t.1)
}

fn measure(name: &'static str, value: f64) -> Measurement {
    Measurement {
        name,
        value,
        tol: tolerance_of(name),
    }
}

fn sectorial(rng: &mut SampleRng, m: usize, max_arg: f64, rmin: f64, rmax: f64) -> QMatrix {
    let pts = sample::sector_points(rng, m, max_arg, rmin, rmax);
    sample::similar_with_spectrum(rng, &pts, 0.3)
}

fn prepared(t: &QMatrix) -> Result<Prepared, String> {
    Prepared::new(t).map_err(|e| e.to_string())
}

fn resolvent_eq(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let t = sample::qmatrix(rng, 3).scale(0.4);
    let s = sample::quaternion(rng).scale(2.0) + Quaternion::real(4.0);
    let p = sample::quaternion(rng).scale(2.0) - Quaternion::real(4.0);
    let v = sample::qvector(rng, 3);
    let r = resolvent_equation_residual(&t, s, p, &v).map_err(|e| e.to_string())?;
    Ok(vec![measure("resolvent_residual", r)])
}

fn slice_independence(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let p = prepared(&sectorial(rng, 3, 1.0, 0.5, 2.0))?;
    let run = |unit: Option<SliceUnit>| {
        let opts = CalculusOptions {
            unit,
            ..Default::default()
        };
        p.apply(&psi(1), CalculusMethod::SectorContour, &opts)
            .map(|r| r.result)
            .map_err(|e| e.to_string())
    };
    let base = run(None)?;
    let mut worst = 0.0f64;
    for _ in 0..2 {
        worst =
            worst.max(Residual::between(&run(Some(sample::quaternion_unit(rng)))?, &base).absolute);
    }
    Ok(vec![measure("slice_deviation", worst)])
}

fn product_rule(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let p = prepared(&sectorial(rng, 3, 0.8, 0.3, 3.0))?;
    let fs = [
        psi(1),
        psi(2),
        rational(&[0.0, 1.0], &[2.0, 3.0, 1.0]).map_err(|e| e.to_string())?,
    ];
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for i in 0..fs.len() {
        for j in i..fs.len() {
            let r = verify_product_rule(&p, &fs[i], &fs[j], &opts).map_err(|e| e.to_string())?;
            worst = worst.max(r.product.absolute);
        }
    }
    Ok(vec![measure("product_residual", worst)])
}

fn regularizer(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let p = prepared(&sectorial(rng, 3, 0.8, 0.5, 3.0))?;
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for (f, k) in [(frac_pow(0.5), 1), (exp_neg(), 0), (pow(1), 1)] {
        let r = verify_regularizer_independence(&p, &f, k, k + 1, &opts)
            .map_err(|e| format!("{}: {e}", f.label()))?;
        worst = worst.max(r.relative);
    }
    Ok(vec![measure("regularizer_relative", worst)])
}

fn spectral_map(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let p = prepared(&sectorial(rng, 3, 0.8, 0.3, 3.0))?;
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for f in [psi(1), exp_neg()] {
        let r =
            verify_spectral_mapping(&p, &f, &opts).map_err(|e| format!("{}: {e}", f.label()))?;
        worst = worst.max(r.distance);
    }
    Ok(vec![measure("hausdorff", worst)])
}

fn star_inverse(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let deg = rng.random_range(1..=2);
    let c = sample::integer_quaternions(rng, deg + 1, 2);
    if c.last().is_some_and(|q| *q == Quaternion::ZERO) {
        return Ok(vec![measure("star_inverse_error", 0.0)]);
    }
    let f = poly_quaternion(Side::Left, &c);
    let g = star_inv(&f).map_err(|e| e.to_string())?;
    let h = star_mul(&g, &f).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let q = sample::quaternion(rng).scale(2.0);
        // Skip points near the zero spheres of the symmetrization.
        match h.eval_quaternion(q) {
            Ok(v) if g.eval_quaternion(q).is_ok_and(|x| x.norm() < 1e4) => {
                worst = worst.max(v.dist(Quaternion::ONE))
            }
            _ => continue,
        }
    }
    Ok(vec![measure("star_inverse_error", worst)])
}

fn clifford(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let n = rng.random_range(2..=3);
    let (t, s, p) = loop {
        let t = ParavectorOperator::random(rng, n, 2, 0.5).map_err(|e| e.to_string())?;
        let spec = clifford_s_spectrum(&t).map_err(|e| e.to_string())?;
        let s = sample::paravector(rng, n).scale(3.0);
        let p = sample::paravector(rng, n).scale(3.0);
        let sp = |x: &CliffordElement| (x.re(), x.im().norm());
        let ((su, sv), (pu, pv)) = (sp(&s), sp(&p));
        if spec.distance(su, sv) >= 0.1
            && spec.distance(pu, pv) >= 0.1
            && (su - pu).hypot(sv - pv) >= 0.1
        {
            break (t, s, p);
        }
    };
    let v: Vec<f64> = (0..2 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let resid = clifford_resolvent_equation_residual(&t, &s, &p, &v).map_err(|e| e.to_string())?;
    // A sectorial paravector operator: dominant positive T_0 plus small vector parts.
    let m = 2;
    let d: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..2.5)).collect();
    let mut comps = vec![RMat::from_diagonal(&nalgebra::DVector::from_vec(d))];
    for _ in 0..n {
        comps.push(RMat::from_fn(m, m, |_, _| rng.random_range(-0.15..0.15)));
    }
    let t = ParavectorOperator::new(comps).map_err(|e| e.to_string())?;
    let p = Prepared::new(&t).map_err(|e| e.to_string())?;
    let opts = CalculusOptions::default();
    let a = p
        .apply(&psi(1), CalculusMethod::SectorContour, &opts)
        .map_err(|e| e.to_string())?
        .result;
    let b = p
        .apply(&psi(1), CalculusMethod::Rational, &opts)
        .map_err(|e| e.to_string())?
        .result;
    Ok(vec![
        measure("clifford_resolvent_residual", resid),
        measure(
            "clifford_method_deviation",
            Residual::between(&a, &b).absolute,
        ),
    ])
}

fn convergence(rng: &mut SampleRng) -> Result<Vec<Measurement>, String> {
    let t = sectorial(rng, 2, 0.7, 0.5, 2.0);
    let t = t.scale(0.05 / op_norm(&t));
    let p = prepared(&t)?;
    let seq: Vec<SliceFunction> = [1.0, 10.0, 100.0, 1e3, 1e4]
        .iter()
        .map(|&j| rational(&[0.0, j], &[j, 1.0]).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let u = embed_vector(&sample::unit_qvector(rng, 2));
    let r = convergence_check(
        &p,
        &seq,
        &pow(1),
        &u,
        CalculusMethod::Hinf,
        &CalculusOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let increase = r
        .errors
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    Ok(vec![
        measure(
            "convergence_final",
            *r.errors.last().unwrap_or(&f64::INFINITY),
        ),
        measure("convergence_increase", increase),
        measure(
            "limit_bound_excess",
            (r.limit_norm - r.bound).max(0.0) / r.bound.max(1e-300),
        ),
    ])
}
