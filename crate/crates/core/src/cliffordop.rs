//! Paravector operators `T = T₀ + Σ e_j T_j` on `V ⊗ R_n` and their calculi.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::algebra::{blade_sign, CliffordElement};
use crate::calculus::{CalculusError, CalculusMethod, CalculusOptions, CalculusReport, Prepared};
use crate::linalg::{self, CMat, CVec};
use crate::operator::{OperatorError, SliceOperator, Space};
use crate::sample::SampleRng;
use crate::slicefn::SliceFunction;
use crate::spectrum::{s_spectrum, RepOperator, SSpectrum, SpectrumError};

pub type RMat = DMatrix<f64>;

pub const MAX_PARAVECTOR_DIM: usize = 4;
pub const MAX_REP_SIZE: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CliffordError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
}

fn check_size(n: usize, m: usize) -> Result<(), OperatorError> {
    let size = m << n;
    if size > MAX_REP_SIZE {
        return Err(OperatorError::TooLarge {
            size,
            limit: MAX_REP_SIZE,
        });
    }
    Ok(())
}

/// `T₀ + e₁T₁ + ⋯ + e_nT_n` with real `m×m` components.
#[derive(Debug, Clone, PartialEq)]
pub struct ParavectorOperator {
    n: usize,
    m: usize,
    components: Vec<RMat>,
}

impl ParavectorOperator {
    pub fn new(components: Vec<RMat>) -> Result<Self, OperatorError> {
        if components.len() < 2 || components.len() > MAX_PARAVECTOR_DIM + 1 {
            return Err(OperatorError::Shape(format!(
                "{} components, expected 2 to {}",
                components.len(),
                MAX_PARAVECTOR_DIM + 1
            )));
        }
        let m = components[0].nrows();
        if m == 0 || components.iter().any(|c| c.nrows() != m || c.ncols() != m) {
            return Err(OperatorError::Shape(
                "components must be square of equal size".into(),
            ));
        }
        let n = components.len() - 1;
        check_size(n, m)?;
        Ok(Self { n, m, components })
    }

    /// Components with `e_j` entries scaled by real diagonal `d`.
    pub fn from_real(n: usize, t0: RMat) -> Result<Self, OperatorError> {
        let m = t0.nrows();
        let mut c = vec![t0];
        c.extend((0..n).map(|_| RMat::zeros(m, m)));
        Self::new(c)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn components(&self) -> &[RMat] {
        &self.components
    }

    /// `Σ_A ‖T_A‖`.
    pub fn component_norm(&self) -> f64 {
        self.components
            .iter()
            .map(|c| c.clone().svd(false, false).singular_values.max())
            .sum()
    }

    /// `Σ_{A,B} T_A(v_B) e_A e_B` on a vector with blocks `v_B` at offsets `B·m`.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, OperatorError> {
        let len = 1usize << self.n;
        if v.len() != self.m * len {
            return Err(OperatorError::LengthMismatch {
                expected: self.m * len,
                found: v.len(),
            });
        }
        let mut out = vec![0.0; v.len()];
        for (j, t) in self.components.iter().enumerate() {
            let a = if j == 0 { 0 } else { 1 << (j - 1) };
            for b in 0..len {
                let block = nalgebra::DVector::from_column_slice(&v[b * self.m..(b + 1) * self.m]);
                let tv = t * block;
                let c = a ^ b;
                let sign = blade_sign(a, b);
                for k in 0..self.m {
                    out[c * self.m + k] += sign * tv[k];
                }
            }
        }
        Ok(out)
    }

    /// Real matrix of the action on `R^{m 2^n}`.
    pub fn to_real_matrix(&self) -> CliffordMatrix {
        let len = 1usize << self.n;
        let d = self.m * len;
        let mut mat = RMat::zeros(d, d);
        for (j, t) in self.components.iter().enumerate() {
            let a = if j == 0 { 0 } else { 1 << (j - 1) };
            for b in 0..len {
                let c = a ^ b;
                let sign = blade_sign(a, b);
                for r in 0..self.m {
                    for k in 0..self.m {
                        mat[(c * self.m + r, b * self.m + k)] += sign * t[(r, k)];
                    }
                }
            }
        }
        CliffordMatrix {
            n: self.n,
            m: self.m,
            mat,
        }
    }

    /// Components uniform in `[-1, 1]` scaled by `scale`.
    pub fn random(
        rng: &mut SampleRng,
        n: usize,
        m: usize,
        scale: f64,
    ) -> Result<Self, OperatorError> {
        let comps = (0..=n)
            .map(|_| RMat::from_fn(m, m, |_, _| scale * rng.random_range(-1.0..1.0)))
            .collect();
        Self::new(comps)
    }
}

/// A general operator on `R^m ⊗ R_n` as a real matrix, closed under products.
#[derive(Debug, Clone, PartialEq)]
pub struct CliffordMatrix {
    n: usize,
    m: usize,
    mat: RMat,
}

impl CliffordMatrix {
    pub fn new(n: usize, m: usize, mat: RMat) -> Result<Self, OperatorError> {
        if n > crate::algebra::MAX_CLIFFORD_DIM {
            return Err(OperatorError::Shape(format!(
                "Clifford dimension {n} too large"
            )));
        }
        check_size(n, m)?;
        if mat.nrows() != m << n || mat.ncols() != m << n {
            return Err(OperatorError::Shape(format!(
                "{}×{} matrix for m = {m}, n = {n}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        Ok(Self { n, m, mat })
    }

    pub fn identity(n: usize, m: usize) -> Self {
        Self {
            n,
            m,
            mat: RMat::identity(m << n, m << n),
        }
    }

    /// Left multiplication by a Clifford scalar.
    pub fn scalar(n: usize, m: usize, a: &CliffordElement) -> Self {
        let c = Space::Clifford { n, m }.scalar(a);
        Self {
            n,
            m,
            mat: c.map(|z| z.re),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn matrix(&self) -> &RMat {
        &self.mat
    }

    pub fn dist(&self, other: &Self) -> f64 {
        (&self.mat - &other.mat).norm()
    }

    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, OperatorError> {
        if v.len() != self.mat.ncols() {
            return Err(OperatorError::LengthMismatch {
                expected: self.mat.ncols(),
                found: v.len(),
            });
        }
        Ok((&self.mat * nalgebra::DVector::from_column_slice(v))
            .as_slice()
            .to_vec())
    }
}

impl std::ops::Mul<&CliffordMatrix> for &CliffordMatrix {
    type Output = CliffordMatrix;
    fn mul(self, rhs: &CliffordMatrix) -> CliffordMatrix {
        assert_eq!(
            (self.n, self.m),
            (rhs.n, rhs.m),
            "operators on different spaces"
        );
        CliffordMatrix {
            n: self.n,
            m: self.m,
            mat: &self.mat * &rhs.mat,
        }
    }
}

impl SliceOperator for CliffordMatrix {
    fn space(&self) -> Space {
        Space::Clifford {
            n: self.n,
            m: self.m,
        }
    }

    fn rep(&self) -> CMat {
        self.mat.map(|x| Complex64::new(x, 0.0))
    }

    fn from_rep(space: Space, rep: &CMat) -> Result<Self, OperatorError> {
        let Space::Clifford { n, m } = space else {
            return Err(OperatorError::Shape(format!(
                "{space:?} is not a Clifford space"
            )));
        };
        let scale = rep.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let imag = rep.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        if imag > 1e-9 * scale {
            return Err(OperatorError::NotReal { imag });
        }
        Self::new(n, m, rep.map(|z| z.re))
    }
}

impl SliceOperator for ParavectorOperator {
    fn space(&self) -> Space {
        Space::Clifford {
            n: self.n,
            m: self.m,
        }
    }

    fn rep(&self) -> CMat {
        self.to_real_matrix().rep()
    }

    /// Accepts only representations of paravector form.
    fn from_rep(space: Space, rep: &CMat) -> Result<Self, OperatorError> {
        let c = CliffordMatrix::from_rep(space, rep)?;
        let (n, m) = (c.n, c.m);
        let comps: Vec<RMat> = (0..=n)
            .map(|j| {
                let a = if j == 0 { 0 } else { 1 << (j - 1) };
                // Column block 0 holds `e_A T_A` in row block `A`.
                c.mat.view((a * m, 0), (m, m)).into_owned()
            })
            .collect();
        let t = ParavectorOperator::new(comps)?;
        let deviation = (&t.to_real_matrix().mat - &c.mat).norm();
        if deviation > 1e-9 * c.mat.norm().max(1.0) {
            return Err(OperatorError::Shape(format!(
                "not a paravector operator (deviation {deviation:.3e})"
            )));
        }
        Ok(t)
    }
}

fn check_paravector(s: &CliffordElement, n: usize) -> Result<CliffordElement, CliffordError> {
    if s.dim() > n || !s.is_paravector(0.0) {
        return Err(CliffordError::InvalidParameter(format!(
            "{s} is not a paravector of R_{n}"
        )));
    }
    Ok(s.lift(n))
}

/// Spheres `[u + v S]` from eigenvalues `u ± iv` of the real representation.
pub fn clifford_s_spectrum<O: SliceOperator>(t: &O) -> Result<SSpectrum, SpectrumError> {
    s_spectrum(t)
}

/// `(S_L^{-1}(s,T), S_R^{-1}(s,T))` with `S_R^{-1} = −(T − 𝕀 s̄) Q_s(T)`.
pub fn clifford_resolvents<O: SliceOperator>(
    t: &O,
    s: &CliffordElement,
) -> Result<(CliffordMatrix, CliffordMatrix), CliffordError> {
    let Space::Clifford { n, .. } = t.space() else {
        return Err(CliffordError::InvalidParameter(
            "not a Clifford operator".into(),
        ));
    };
    let s = check_paravector(s, n)?;
    let (l, r) = RepOperator::new(t).resolvents(&s)?;
    Ok((
        CliffordMatrix::from_rep(t.space(), &l)?,
        CliffordMatrix::from_rep(t.space(), &r)?,
    ))
}

/// Residual of `S_R^{-1}(s) S_L^{-1}(p) v` against the S-resolvent equation.
pub fn clifford_resolvent_equation_residual<O: SliceOperator>(
    t: &O,
    s: &CliffordElement,
    p: &CliffordElement,
    v: &[f64],
) -> Result<f64, CliffordError> {
    let space = t.space();
    let Space::Clifford { n, .. } = space else {
        return Err(CliffordError::InvalidParameter(
            "not a Clifford operator".into(),
        ));
    };
    if v.len() != space.rep_dim() {
        return Err(OperatorError::LengthMismatch {
            expected: space.rep_dim(),
            found: v.len(),
        }
        .into());
    }
    let (s, p) = (check_paravector(s, n)?, check_paravector(p, n)?);
    let v = CVec::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0)));
    Ok(RepOperator::new(t).resolvent_equation_residual(&s, &p, &v)?)
}

/// Any calculus on a Clifford operator; `f` must take values in `R_k`, `k ≤ n`.
pub fn clifford_calculus<O: SliceOperator>(
    f: &SliceFunction,
    t: &O,
    method: CalculusMethod,
    opts: &CalculusOptions,
) -> Result<CalculusReport<CliffordMatrix>, CalculusError> {
    let space = t.space();
    let Space::Clifford { n, .. } = space else {
        return Err(CalculusError::InvalidParameter(
            "not a Clifford operator".into(),
        ));
    };
    if f.dim() > n.max(1) && !f.is_intrinsic() {
        return Err(CalculusError::InvalidParameter(format!(
            "{} takes values in R_{} but the operator acts on R_{n}",
            f.label(),
            f.dim()
        )));
    }
    if let Some(u) = &opts.unit {
        if u.dim() > n {
            return Err(CalculusError::InvalidParameter(format!(
                "slice unit outside R_{n}"
            )));
        }
    }
    let p = Prepared::new(t)?;
    p.apply(f, method, opts)?
        .try_map(|m| CliffordMatrix::from_rep(space, &m).map_err(Into::into))
}

/// Central differences `(f_{k+1} − f_{k−1})/2` on the `N`-point circle.
fn central_difference(big_n: usize) -> RMat {
    let mut d = RMat::zeros(big_n, big_n);
    for k in 0..big_n {
        d[(k, (k + 1) % big_n)] += 0.5;
        d[(k, (k + big_n - 1) % big_n)] -= 0.5;
    }
    d
}

/// `mass·I + Σ e_j ∂_j` on the `N^n`-point torus, `∂_j` the central difference along axis `j`.
pub fn dirac_demo(n: usize, big_n: usize, mass: f64) -> Result<ParavectorOperator, CliffordError> {
    if !(1..=3).contains(&n) || big_n < 4 || !mass.is_finite() {
        return Err(CliffordError::InvalidParameter(format!(
            "need 1 ≤ n ≤ 3, N ≥ 4 and finite mass (n = {n}, N = {big_n}, mass = {mass})"
        )));
    }
    let m = big_n.pow(n as u32);
    check_size(n, m)?;
    let d = central_difference(big_n);
    let id = RMat::identity(big_n, big_n);
    let mut comps = vec![RMat::identity(m, m) * mass];
    for j in 0..n {
        // Axis 0 varies slowest in the flattened index.
        let mut acc = RMat::identity(1, 1);
        for axis in 0..n {
            acc = acc.kronecker(if axis == j { &d } else { &id });
        }
        comps.push(acc);
    }
    Ok(ParavectorOperator::new(comps)?)
}

/// `‖rep(T)‖`, bounded by [`ParavectorOperator::component_norm`].
pub fn operator_norm(t: &ParavectorOperator) -> f64 {
    linalg::spectral_norm(&t.rep())
}
