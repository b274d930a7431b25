use num_complex::Complex64;
use proptest::prelude::*;

use slice_calc::algebra::{CliffordElement, Quaternion, SliceUnit};
use slice_calc::calculus::{CalculusMethod, CalculusOptions, Prepared};
use slice_calc::cliffordop::{clifford_resolvent_equation_residual, ParavectorOperator};
use slice_calc::linalg;
use slice_calc::qmatrix::{embed, QMatrix};
use slice_calc::quadratic::{quadratic_integral, QuadratureOptions};
use slice_calc::sample;
use slice_calc::slicefn::{
    cauchy_kernel_left, cauchy_kernel_right, exp_neg, frac_pow, poly_quaternion, psi, star_mul,
    Side, SlicePolynomial,
};
use slice_calc::spectrum::{hausdorff, resolvent_equation_residual, s_spectrum};

fn quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-2.0f64..2.0).prop_map(Quaternion::from_array)
}

fn integer_quaternion() -> impl Strategy<Value = Quaternion> {
    prop::array::uniform4(-3i32..=3)
        .prop_map(|a| Quaternion::new(a[0] as f64, a[1] as f64, a[2] as f64, a[3] as f64))
}

fn integer_poly() -> impl Strategy<Value = Vec<Quaternion>> {
    prop::collection::vec(integer_quaternion(), 1..4)
}

fn qe(q: Quaternion) -> CliffordElement {
    CliffordElement::from_quaternion(2, q)
}

fn qpoly(c: &[Quaternion]) -> SlicePolynomial {
    SlicePolynomial::new(Side::Left, c.iter().map(|&q| qe(q)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn star_product_is_associative(a in integer_poly(), b in integer_poly(), c in integer_poly()) {
        let (a, b, c) = (qpoly(&a), qpoly(&b), qpoly(&c));
        let left = a.star_mul(&b).unwrap().star_mul(&c).unwrap();
        let right = a.star_mul(&b.star_mul(&c).unwrap()).unwrap();
        prop_assert_eq!(left.coeffs(), right.coeffs());
    }

    #[test]
    fn star_product_matches_pointwise_formula(a in integer_poly(), b in integer_poly(), q in quaternion()) {
        // (f ⋆ g)(q) = f(q) g(f(q)^{-1} q f(q)) where f(q) ≠ 0.
        let f = poly_quaternion(Side::Left, &a);
        let g = poly_quaternion(Side::Left, &b);
        let fq = f.eval_quaternion(q).unwrap();
        prop_assume!(fq.norm() > 1e-3);
        let moved = fq.inv().unwrap() * q * fq;
        let want = fq * g.eval_quaternion(moved).unwrap();
        let got = star_mul(&f, &g).unwrap().eval_quaternion(q).unwrap();
        prop_assert!(got.dist(want) <= 1e-9 * (1.0 + want.norm()), "{:?} vs {:?}", got, want);
    }

    #[test]
    fn kernels_are_antisymmetric(s in quaternion(), q in quaternion()) {
        let (sa, qa) = (qe(s), qe(q));
        let sep = (s.re() - q.re()).hypot(s.im_norm() - q.im_norm());
        prop_assume!(sep > 0.1);
        let r = cauchy_kernel_right(&sa, &qa).unwrap();
        let l = cauchy_kernel_left(&qa, &sa).unwrap();
        prop_assert!((r + l).norm() <= 1e-12 * (1.0 + r.norm()));
    }

    #[test]
    fn slice_functions_satisfy_cauchy_riemann(re in 0.1f64..3.0, im in -3.0f64..3.0, a in integer_poly()) {
        let z = [Complex64::new(re, im)];
        for f in [psi(2), frac_pow(0.5), exp_neg(), poly_quaternion(Side::Left, &a)] {
            let r = f.cauchy_riemann_residual(&z).unwrap();
            prop_assert!(r < 1e-6, "{}: {}", f.label(), r);
        }
    }

    #[test]
    fn embedding_is_multiplicative(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let a = sample::qmatrix(&mut rng, 3);
        let b = sample::qmatrix(&mut rng, 3);
        prop_assert!(linalg::frobenius(&(embed(&(&a * &b)) - embed(&a) * embed(&b))) < 1e-13);
        prop_assert!(linalg::frobenius(&(embed(&a.adjoint()) - embed(&a).adjoint())) < 1e-15);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn resolvent_equation_holds(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let t = sample::qmatrix(&mut rng, 3).scale(0.4);
        let s = sample::quaternion(&mut rng).scale(2.0) + Quaternion::real(4.0);
        let p = sample::quaternion(&mut rng).scale(2.0) - Quaternion::real(4.0);
        let v = sample::qvector(&mut rng, 3);
        let r = resolvent_equation_residual(&t, s, p, &v).unwrap();
        prop_assert!(r < 1e-10, "{}", r);
    }

    #[test]
    fn clifford_resolvent_equation_holds(seed in any::<u64>(), n in 2usize..=3) {
        let mut rng = sample::rng(seed);
        let t = ParavectorOperator::random(&mut rng, n, 2, 0.3).unwrap();
        let s = sample::paravector(&mut rng, n).scale(2.0).add_real(4.0);
        let p = sample::paravector(&mut rng, n).scale(2.0).add_real(-4.0);
        let v: Vec<f64> = (0..2 << n).map(|k| ((k * 7 + 3) % 5) as f64 - 2.0).collect();
        let r = clifford_resolvent_equation_residual(&t, &s, &p, &v).unwrap();
        prop_assert!(r < 1e-10, "{}", r);
    }

    #[test]
    fn prescribed_spectra_are_recovered(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let pts = sample::sector_points(&mut rng, 3, 1.2, 0.5, 4.0);
        let t = sample::normal_with_spectrum(&mut rng, &pts);
        let want: Vec<(f64, f64)> = pts.iter().map(|z| (z.re, z.im)).collect();
        prop_assert!(hausdorff(&s_spectrum(&t).unwrap().points(), &want) < 1e-9);
    }

    #[test]
    fn quadratic_integral_is_nonnegative_and_scale_free(seed in any::<u64>(), lambda in 0.2f64..5.0) {
        let mut rng = sample::rng(seed);
        let t = sample::hermitian_positive(&mut rng, 2, 0.5, 3.0);
        let u = sample::unit_qvector(&mut rng, 2);
        let opts = QuadratureOptions::default();
        let a = quadratic_integral(&t, &psi(1), &u, &opts).unwrap();
        let b = quadratic_integral(&t.scale(lambda), &psi(1), &u, &opts).unwrap();
        prop_assert!(a.value >= 0.0);
        prop_assert!((a.value - 0.5).abs() < 1e-8 && (b.value - a.value).abs() < 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn bounded_calculus_is_slice_independent(seed in any::<u64>()) {
        let mut rng = sample::rng(seed);
        let pts = sample::sector_points(&mut rng, 2, 1.0, 0.5, 2.0);
        let t = sample::similar_with_spectrum(&mut rng, &pts, 0.2);
        let p = Prepared::new(&t).unwrap();
        let f = psi(1);
        let base = p.apply(&f, CalculusMethod::SectorContour, &CalculusOptions::default()).unwrap().result;
        for _ in 0..2 {
            let opts = CalculusOptions { unit: Some(sample::quaternion_unit(&mut rng)), ..Default::default() };
            let other = p.apply(&f, CalculusMethod::SectorContour, &opts).unwrap().result;
            prop_assert!(linalg::frobenius(&(other - &base)) < 1e-8);
        }
    }

    #[test]
    fn clifford_calculus_agrees_with_rational(seed in any::<u64>()) {
        // Quaternionic suites re-run on R_2 through the paravector representation.
        let mut rng = sample::rng(seed);
        let d: Vec<f64> = (0..2).map(|_| 0.5 + 2.0 * rand::Rng::random::<f64>(&mut rng)).collect();
        let mut comps = vec![slice_calc::cliffordop::RMat::from_diagonal(&nalgebra::DVector::from_vec(d))];
        comps.push(slice_calc::cliffordop::RMat::from_fn(2, 2, |r, c| if r == c { 0.0 } else { 0.3 }));
        comps.push(slice_calc::cliffordop::RMat::zeros(2, 2));
        let t = ParavectorOperator::new(comps).unwrap();
        let p = Prepared::new(&t).unwrap();
        let opts = CalculusOptions { unit: Some(SliceUnit::new(CliffordElement::unit(2, 2)).unwrap()), ..Default::default() };
        let a = p.apply(&psi(1), CalculusMethod::SectorContour, &opts).unwrap().result;
        let b = p.apply(&psi(1), CalculusMethod::Rational, &opts).unwrap().result;
        prop_assert!(linalg::frobenius(&(a - b)) < 1e-8);
    }
}

#[test]
fn scalar_quaternion_matrix_round_trip() {
    let t = QMatrix::from_diag(&[Quaternion::new(1.0, 2.0, 0.0, 0.0)]);
    let s = s_spectrum(&t).unwrap();
    assert!(hausdorff(&s.points(), &[(1.0, 2.0)]) < 1e-14);
}
