//! Exit criteria, one line per criterion. Runs without the libtest harness.

use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::Rng;

use slice_calc::algebra::{CliffordElement, Quaternion};
use slice_calc::calculus::{
    convergence_check, verify_product_rule, verify_regularizer_independence,
    verify_spectral_mapping, verify_sum_product, CalculusMethod, CalculusOptions, Prepared,
    Residual,
};
use slice_calc::cliffordop::{
    clifford_calculus, clifford_resolvent_equation_residual, clifford_s_spectrum, dirac_demo,
    ParavectorOperator,
};
use slice_calc::contour::build_circle;
use slice_calc::linalg::{self, CMat, CVec};
use slice_calc::qmatrix::{embed_vector, QMatrix};
use slice_calc::quadratic::{hinf_bound_check, quadratic_integral, QuadratureOptions};
use slice_calc::sample::{self, SampleRng};
use slice_calc::slicefn::{
    cauchy_kernel_left, cauchy_kernel_right, exp_neg, frac_pow, poly_quaternion, poly_real, pow,
    psi, rational, star_inv, star_mul, Side, SliceFunction, SlicePolynomial,
};
use slice_calc::spectrum::{hausdorff, RepOperator};

const TIME_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn qe(q: Quaternion) -> CliffordElement {
    CliffordElement::from_quaternion(2, q)
}

/// Non-normal matrix with spectrum in the sector `|arg| ≤ max_arg`.
fn sectorial(rng: &mut SampleRng, m: usize, max_arg: f64, rmin: f64, rmax: f64) -> QMatrix {
    let pts = sample::sector_points(rng, m, max_arg, rmin, rmax);
    sample::similar_with_spectrum(rng, &pts, 0.3)
}

fn catalog_rational() -> SliceFunction {
    // s / ((1 + s)(2 + s))
    rational(&[0.0, 1.0], &[2.0, 3.0, 1.0]).unwrap()
}

/// Horner evaluation `Σ q^l a_l` with real coefficients.
fn horner(coeffs: &[f64], q: Quaternion) -> Quaternion {
    coeffs
        .iter()
        .rev()
        .fold(Quaternion::ZERO, |acc, &a| q * acc + Quaternion::real(a))
}

fn cauchy_reproduction() -> Outcome {
    let mut rng = sample::rng(101);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let deg = rng.random_range(0..=5);
        let coeffs = sample::real_poly(&mut rng, deg);
        let f = poly_real(&coeffs);
        let unit = sample::quaternion_unit(&mut rng);
        let circle = build_circle(unit, 2.0, 256).unwrap();
        for _ in 0..20 {
            let q = sample::quaternion(&mut rng);
            let q = q.scale(rng.random_range(0.0..1.5) / q.norm());
            let mut acc = CliffordElement::zero(2);
            for n in &circle.nodes {
                let s = unit.point(n.z.re, n.z.im);
                let k = cauchy_kernel_left(&s, &qe(q)).unwrap();
                acc = acc + k * unit.point(n.w.re, n.w.im) * f.eval_slice(n.z, &unit).unwrap();
            }
            let got = acc.scale(1.0 / (2.0 * PI)).to_quaternion().unwrap();
            worst = worst.max(got.dist(horner(&coeffs, q)));
        }
    }
    check(
        worst <= 1e-10,
        format!("max |error| {worst:.2e} (tol 1e-10, 400 cases, N = 256)"),
    )
}

fn kernel_identity() -> Outcome {
    let mut rng = sample::rng(102);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 200 {
        let s = sample::quaternion(&mut rng).scale(2.0);
        let q = sample::quaternion(&mut rng).scale(2.0);
        if (s.re() - q.re()).hypot(s.im_norm() - q.im_norm()) < 0.5 {
            continue;
        }
        let r = cauchy_kernel_right(&qe(s), &qe(q)).unwrap();
        let l = cauchy_kernel_left(&qe(q), &qe(s)).unwrap();
        worst = worst.max((r + l).norm());
        n += 1;
    }
    check(
        worst <= 1e-12,
        format!("max |S_R(s,q) + S_L(q,s)| {worst:.2e} (tol 1e-12, 200 pairs)"),
    )
}

fn resolvent_equation() -> Outcome {
    let mut rng = sample::rng(103);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < 100 {
        let t = sample::qmatrix(&mut rng, 4);
        let op = RepOperator::new(&t);
        let spec = op.spectrum().unwrap();
        let s = sample::quaternion(&mut rng).scale(3.0);
        let p = sample::quaternion(&mut rng).scale(3.0);
        let sep = (s.re() - p.re()).hypot(s.im_norm() - p.im_norm());
        if spec.distance(s.re(), s.im_norm()) < 0.1
            || spec.distance(p.re(), p.im_norm()) < 0.1
            || sep < 0.1
        {
            continue;
        }
        let v = embed_vector(&sample::qvector(&mut rng, 4));
        let r = op.resolvent_equation_residual(&qe(s), &qe(p), &v).unwrap();
        let sr = op.resolvent_right(&qe(s)).unwrap();
        let sl = op.resolvent_left(&qe(p)).unwrap();
        let scale = v.norm() * (linalg::spectral_norm(&sr) * linalg::spectral_norm(&sl)).max(1.0);
        worst = worst.max(r / scale);
        n += 1;
    }
    check(
        worst <= 1e-8,
        format!("max residual/scale {worst:.2e} (tol 1e-8, 100 cases)"),
    )
}

fn slice_independence() -> Outcome {
    let mut rng = sample::rng(104);
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let t = sectorial(&mut rng, 3, 0.8, 0.5, 3.0);
        let p = Prepared::new(&t).unwrap();
        let results: Vec<CMat> = (0..5)
            .map(|_| {
                let opts = CalculusOptions {
                    unit: Some(sample::quaternion_unit(&mut rng)),
                    ..Default::default()
                };
                p.apply(&psi(1), CalculusMethod::SectorContour, &opts)
                    .unwrap()
                    .result
            })
            .collect();
        for a in &results {
            for b in &results {
                worst = worst.max(linalg::spectral_norm(&(a - b)));
            }
        }
    }
    check(
        worst <= 1e-8,
        format!("max deviation across 5 slices {worst:.2e} (tol 1e-8)"),
    )
}

fn product_rule() -> Outcome {
    let mut rng = sample::rng(105);
    let fs = [psi(1), psi(2), catalog_rational()];
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let p = Prepared::new(&sectorial(&mut rng, 3, 0.8, 0.3, 3.0)).unwrap();
        for i in 0..fs.len() {
            for j in i..fs.len() {
                let r =
                    verify_product_rule(&p, &fs[i], &fs[j], &opts).map_err(|e| e.to_string())?;
                worst = worst.max(r.product.absolute);
            }
        }
    }
    check(
        worst <= 1e-6,
        format!("max ‖(ψφ)(T) − ψ(T)φ(T)‖ {worst:.2e} (tol 1e-6, 10 matrices × 6 pairs)"),
    )
}

fn spectral_mapping() -> Outcome {
    let mut rng = sample::rng(106);
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let p = Prepared::new(&sectorial(&mut rng, 3, 0.8, 0.3, 3.0)).unwrap();
        for f in [psi(1), exp_neg()] {
            let r = verify_spectral_mapping(&p, &f, &opts).map_err(|e| e.to_string())?;
            worst = worst.max(r.distance);
        }
    }
    check(
        worst <= 1e-7,
        format!("max Hausdorff distance {worst:.2e} (tol 1e-7, 10 cases)"),
    )
}

fn regularizer_independence() -> Outcome {
    let mut rng = sample::rng(107);
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let p = Prepared::new(&sectorial(&mut rng, 3, 0.8, 0.5, 3.0)).unwrap();
        for (f, k) in [(frac_pow(0.5), 1), (exp_neg(), 0), (pow(1), 1)] {
            let r = verify_regularizer_independence(&p, &f, k, k + 1, &opts)
                .map_err(|e| e.to_string())?;
            worst = worst.max(r.relative);
        }
    }
    check(
        worst <= 1e-6,
        format!("max relative k vs k+1 deviation {worst:.2e} (tol 1e-6)"),
    )
}

fn cross_method() -> Outcome {
    let mut rng = sample::rng(108);
    let opts = CalculusOptions::default();
    let methods = [
        CalculusMethod::Contour,
        CalculusMethod::SectorContour,
        CalculusMethod::Rational,
        CalculusMethod::EigenOracle,
    ];
    let mut worst = 0.0f64;
    for _ in 0..5 {
        let pts = sample::sector_points(&mut rng, 3, 0.6, 0.3, 2.0);
        let p = Prepared::new(&sample::normal_with_spectrum(&mut rng, &pts)).unwrap();
        for k in 1..=3 {
            let rs: Vec<CMat> = methods
                .iter()
                .map(|&m| p.apply(&psi(k), m, &opts).map(|r| r.result))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            for a in &rs {
                for b in &rs {
                    worst = worst.max(Residual::between(a, b).absolute);
                }
            }
        }
    }
    check(
        worst <= 1e-6,
        format!("max pairwise deviation {worst:.2e} (tol 1e-6, 4 methods)"),
    )
}

fn star_algebra() -> Outcome {
    let mut rng = sample::rng(109);
    // Star inverse.
    let mut inv_err = 0.0f64;
    for _ in 0..10 {
        let deg = rng.random_range(1..=2);
        let c = sample::integer_quaternions(&mut rng, deg + 1, 2);
        let f = poly_quaternion(Side::Left, &c);
        let fs = SlicePolynomial::new(Side::Left, c.iter().map(|&q| qe(q)).collect()).symmetrize();
        let h =
            star_mul(&star_inv(&f).map_err(|e| e.to_string())?, &f).map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let q = sample::quaternion(&mut rng).scale(2.0);
            if fs.eval_direct(&qe(q)).norm() < 1e-2 {
                continue;
            }
            inv_err = inv_err.max(h.eval_quaternion(q).unwrap().dist(Quaternion::ONE));
        }
    }
    // Coefficient convolution.
    let mut conv_exact = true;
    for _ in 0..50 {
        let (la, lb) = (rng.random_range(1..=4), rng.random_range(1..=4));
        let a = sample::integer_quaternions(&mut rng, la, 3);
        let b = sample::integer_quaternions(&mut rng, lb, 3);
        let mut want = vec![Quaternion::ZERO; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                want[i + j] += x * y;
            }
        }
        let pa = SlicePolynomial::new(Side::Left, a.iter().map(|&q| qe(q)).collect());
        let pb = SlicePolynomial::new(Side::Left, b.iter().map(|&q| qe(q)).collect());
        let got = pa.star_mul(&pb).map_err(|e| e.to_string())?;
        while want.len() > 1 && want.last() == Some(&Quaternion::ZERO) {
            want.pop();
        }
        let got: Vec<Quaternion> = got
            .coeffs()
            .iter()
            .map(|c| c.to_quaternion().unwrap())
            .collect();
        conv_exact &= got == want;
    }
    // (q − e1)^s = q² + 1.
    let f = SlicePolynomial::new(Side::Left, vec![qe(-Quaternion::E1), qe(Quaternion::ONE)]);
    let fs: Vec<f64> = f.symmetrize().coeffs().iter().map(|c| c.re()).collect();
    let fs_exact = fs == [1.0, 0.0, 1.0] && f.symmetrize().real_coeffs().is_some();
    check(
        inv_err <= 1e-10 && conv_exact && fs_exact,
        format!("star inverse error {inv_err:.2e} (tol 1e-10); convolution exact {conv_exact}; symmetrization exact {fs_exact}"),
    )
}

fn quadratic_estimates() -> Outcome {
    let frozen = [0.5, 1.0 / 12.0, 1.0 / 60.0, 1.0 / 280.0];
    let opts = QuadratureOptions::default();
    let mut closed = 0.0f64;
    let mut spread = 0.0f64;
    for (k, want) in (1..=4).zip(frozen) {
        let vals: Vec<f64> = [0.1, 1.0, 10.0]
            .iter()
            .map(|&l| {
                quadratic_integral(
                    &QMatrix::from_diag(&[Quaternion::real(l)]),
                    &psi(k),
                    &[Quaternion::ONE],
                    &opts,
                )
                .map(|q| q.value)
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        closed = closed.max((vals[1] - want).abs());
        for v in &vals {
            spread = spread.max((v - vals[1]).abs() / vals[1]);
        }
    }
    check(
        closed <= 1e-6 && spread <= 1e-8,
        format!("closed-form error {closed:.2e} (tol 1e-6); λ spread {spread:.2e} (tol 1e-8)"),
    )
}

fn hinf_bound() -> Outcome {
    let mut rng = sample::rng(111);
    let opts = CalculusOptions::default();
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..10 {
        let t = sample::hermitian_positive(&mut rng, 3, 0.2, 5.0);
        let r = hinf_bound_check(&t, &exp_neg(), 1.0, &opts).map_err(|e| e.to_string())?;
        worst = worst.max(r.norm - r.sup);
    }
    check(
        worst <= 1e-6,
        format!("max ‖f(T)‖ − ‖f‖_∞ {worst:.2e} (tol 1e-6, 10 matrices)"),
    )
}

fn clifford() -> Outcome {
    let mut rng = sample::rng(112);
    let mut resid = 0.0f64;
    for n in [2, 3] {
        let mut done = 0;
        while done < 10 {
            let t = ParavectorOperator::random(&mut rng, n, 2, 0.5).unwrap();
            let spec = clifford_s_spectrum(&t).unwrap();
            let s = sample::paravector(&mut rng, n).scale(3.0);
            let p = sample::paravector(&mut rng, n).scale(3.0);
            let sp = |x: &CliffordElement| (x.re(), x.im().norm());
            let ((su, sv), (pu, pv)) = (sp(&s), sp(&p));
            if spec.distance(su, sv) < 0.1
                || spec.distance(pu, pv) < 0.1
                || (su - pu).hypot(sv - pv) < 0.1
            {
                continue;
            }
            let v: Vec<f64> = (0..2 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
            resid = resid.max(
                clifford_resolvent_equation_residual(&t, &s, &p, &v).map_err(|e| e.to_string())?,
            );
            done += 1;
        }
    }
    let massive = dirac_demo(1, 8, 2.0).map_err(|e| e.to_string())?;
    let opts = CalculusOptions::default();
    let h = clifford_calculus(&frac_pow(0.5), &massive, CalculusMethod::Hinf, &opts)
        .map_err(|e| e.to_string())?;
    let o = clifford_calculus(&frac_pow(0.5), &massive, CalculusMethod::EigenOracle, &opts)
        .map_err(|e| e.to_string())?;
    let dirac_dev = h.result.dist(&o.result);
    let massless = clifford_s_spectrum(&dirac_demo(1, 4, 0.0).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let pts = massless.points();
    let sphere_dist = hausdorff(&pts, &[(0.0, 0.0), (0.0, 1.0)]);
    let detail = format!(
        "resolvent residual {resid:.2e} (tol 1e-8); massive Dirac hinf vs oracle {dirac_dev:.2e} (tol 1e-6); \
         massless spheres {pts:?} vs {{(0,0), (0,1)}} distance {sphere_dist:.2e} (tol 1e-10)"
    );
    check(
        resid <= 1e-8 && dirac_dev <= 1e-6 && sphere_dist <= 1e-10,
        detail,
    )
}

fn sum_product() -> Outcome {
    let mut rng = sample::rng(113);
    let fs = [frac_pow(0.5), exp_neg(), pow(1), psi(1)];
    let opts = CalculusOptions::default();
    let mut worst = 0.0f64;
    for _ in 0..2 {
        let p = Prepared::new(&sectorial(&mut rng, 2, 0.7, 0.5, 2.0)).unwrap();
        for i in 0..fs.len() {
            for j in i..fs.len() {
                let r = verify_sum_product(&p, &fs[i], &fs[j], &opts)
                    .map_err(|e| format!("{}, {}: {e}", fs[i].label(), fs[j].label()))?;
                worst = worst.max(r.sum.absolute).max(r.product.absolute);
            }
        }
    }
    check(
        worst <= 1e-5,
        format!("max sum/product residual {worst:.2e} (tol 1e-5, 10 pairs × 2 matrices)"),
    )
}

fn convergence() -> Outcome {
    let mut rng = sample::rng(114);
    let t = sectorial(&mut rng, 2, 0.7, 0.5, 2.0);
    let t = t.scale(0.05 / slice_calc::qmatrix::op_norm(&t));
    let p = Prepared::new(&t).unwrap();
    let seq: Vec<SliceFunction> = [1.0, 10.0, 100.0, 1e3, 1e4]
        .iter()
        .map(|&j| rational(&[0.0, j], &[j, 1.0]).unwrap())
        .collect();
    let u: CVec = embed_vector(&sample::unit_qvector(&mut rng, 2));
    let r = convergence_check(
        &p,
        &seq,
        &pow(1),
        &u,
        CalculusMethod::Hinf,
        &CalculusOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let last = *r.errors.last().unwrap();
    check(
        r.monotone && last <= 1e-6,
        format!(
            "errors {:?}; monotone {}; final {last:.2e} (tol 1e-6, ‖T‖ = 0.05)",
            r.errors
                .iter()
                .map(|e| format!("{e:.1e}"))
                .collect::<Vec<_>>(),
            r.monotone
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 14] = [
        ("Cauchy reproduction", cauchy_reproduction),
        ("kernel identity", kernel_identity),
        ("S-resolvent equation", resolvent_equation),
        ("slice independence", slice_independence),
        ("product rule", product_rule),
        ("spectral mapping", spectral_mapping),
        ("regularizer independence", regularizer_independence),
        ("cross-method agreement", cross_method),
        ("star algebra", star_algebra),
        ("quadratic estimates", quadratic_estimates),
        ("H-infinity bound", hinf_bound),
        ("Clifford operators", clifford),
        ("sum/product rules", sum_product),
        ("convergence", convergence),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let slow = elapsed > TIME_LIMIT;
        let (ok, detail) = match outcome {
            Ok(d) => (!slow, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {:<26} {}  {} [{:.2} s{}]",
            k + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            detail,
            elapsed.as_secs_f64(),
            if slow { ", over 10 s" } else { "" }
        );
    }
    println!(
        "acceptance: {} passed, {} failed",
        criteria.len() - failed,
        failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
