//! Seeded random inputs for identity checks and trials.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{CliffordElement, Quaternion, SliceUnit};
use crate::qmatrix::{inner, norm, qinv, vec_mul_right, vec_sub, QMatrix, QVector};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Components uniform in `[-1, 1]`.
pub fn quaternion(rng: &mut SampleRng) -> Quaternion {
    Quaternion::new(
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
        rng.random_range(-1.0..1.0),
    )
}

/// Random imaginary unit quaternion as a slice unit.
pub fn quaternion_unit(rng: &mut SampleRng) -> SliceUnit {
    loop {
        let mut q = quaternion(rng);
        q.w = 0.0;
        if q.im_norm() > 0.1 {
            return SliceUnit::from_quaternion(q).expect("nonzero imaginary part");
        }
    }
}

/// Random grade-one unit of `R_n`.
pub fn clifford_unit(rng: &mut SampleRng, n: usize) -> SliceUnit {
    loop {
        let mut e = CliffordElement::zero(n);
        for k in 1..=n {
            e.set_coeff(1 << (k - 1), rng.random_range(-1.0..1.0));
        }
        let r = e.norm();
        if r > 0.1 {
            return SliceUnit::new(e.scale(1.0 / r)).expect("grade-one unit");
        }
    }
}

/// Random paravector `x0 + Σ x_j e_j` with components in `[-1, 1]`.
pub fn paravector(rng: &mut SampleRng, n: usize) -> CliffordElement {
    let mut e = CliffordElement::scalar(n, rng.random_range(-1.0..1.0));
    for k in 1..=n {
        e.set_coeff(1 << (k - 1), rng.random_range(-1.0..1.0));
    }
    e
}

pub fn qvector(rng: &mut SampleRng, m: usize) -> QVector {
    (0..m).map(|_| quaternion(rng)).collect()
}

pub fn unit_qvector(rng: &mut SampleRng, m: usize) -> QVector {
    loop {
        let v = qvector(rng, m);
        let r = norm(&v);
        if r > 1e-3 {
            return v.iter().map(|q| q.scale(1.0 / r)).collect();
        }
    }
}

pub fn qmatrix(rng: &mut SampleRng, m: usize) -> QMatrix {
    let entries: Vec<Quaternion> = (0..m * m).map(|_| quaternion(rng)).collect();
    QMatrix::from_fn(m, |r, c| entries[r * m + c])
}

/// Random unitary by Gram–Schmidt in the right module `H^m`.
pub fn unitary(rng: &mut SampleRng, m: usize) -> QMatrix {
    let mut cols: Vec<QVector> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut v = qvector(rng, m);
        for u in &cols {
            let c = inner(&v, u).expect("same length");
            v = vec_sub(&v, &vec_mul_right(u, c));
        }
        let r = norm(&v);
        if r > 1e-3 {
            cols.push(v.iter().map(|q| q.scale(1.0 / r)).collect());
        }
    }
    QMatrix::from_fn(m, |r, c| cols[c][r])
}

fn slice_quaternion(z: Complex64) -> Quaternion {
    Quaternion::new(z.re, z.im, 0.0, 0.0)
}

/// `U diag(λ) U*` with a random unitary `U`; spheres `[λ_k]`.
pub fn normal_with_spectrum(rng: &mut SampleRng, points: &[Complex64]) -> QMatrix {
    let u = unitary(rng, points.len());
    let d = QMatrix::from_diag(
        &points
            .iter()
            .map(|&z| slice_quaternion(z))
            .collect::<Vec<_>>(),
    );
    &(&u * &d) * &u.adjoint()
}

/// `S diag(λ) S^{-1}` with `S = I + coupling · random`.
pub fn similar_with_spectrum(rng: &mut SampleRng, points: &[Complex64], coupling: f64) -> QMatrix {
    let m = points.len();
    let d = QMatrix::from_diag(
        &points
            .iter()
            .map(|&z| slice_quaternion(z))
            .collect::<Vec<_>>(),
    );
    loop {
        let s = &QMatrix::identity(m) + &qmatrix(rng, m).scale(coupling);
        if let Ok(si) = qinv(&s) {
            if crate::qmatrix::op_norm(&si) < 10.0 {
                return &(&s * &d) * &si;
            }
        }
    }
}

/// Points `r e^{iφ}` with `|φ| ≤ max_arg` and `r` log-uniform in `[rmin, rmax]`.
pub fn sector_points(
    rng: &mut SampleRng,
    m: usize,
    max_arg: f64,
    rmin: f64,
    rmax: f64,
) -> Vec<Complex64> {
    (0..m)
        .map(|_| {
            let r = (rng.random_range(rmin.ln()..=rmax.ln())).exp();
            let phi = rng.random_range(0.0..=max_arg);
            Complex64::from_polar(r, phi)
        })
        .collect()
}

/// Hermitian matrix with eigenvalues uniform in `[lo, hi]`.
pub fn hermitian_positive(rng: &mut SampleRng, m: usize, lo: f64, hi: f64) -> QMatrix {
    let pts: Vec<Complex64> = (0..m)
        .map(|_| Complex64::new(rng.random_range(lo..=hi), 0.0))
        .collect();
    let t = normal_with_spectrum(rng, &pts);
    // Symmetrize away rounding.
    let ta = t.adjoint();
    (&t + &ta).scale(0.5)
}

/// Real coefficients uniform in `[-1, 1]`, lowest degree first.
pub fn real_poly(rng: &mut SampleRng, degree: usize) -> Vec<f64> {
    (0..=degree).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// Integer coefficients in `[-range, range]`.
pub fn integer_quaternions(rng: &mut SampleRng, len: usize, range: i32) -> Vec<Quaternion> {
    (0..len)
        .map(|_| {
            let mut c = || rng.random_range(-range..=range) as f64;
            Quaternion::new(c(), c(), c(), c())
        })
        .collect()
}
