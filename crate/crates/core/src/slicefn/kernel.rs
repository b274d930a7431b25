//! Slice hyperholomorphic Cauchy kernels in the form that is explicit in `q`.

use super::SliceError;
use crate::algebra::CliffordElement;

/// `q^2 - 2 Re(s) q + |s|^2` and its inverse.
fn pencil_inverse(s: &CliffordElement, q: &CliffordElement) -> Result<CliffordElement, SliceError> {
    let p = *q * *q - q.scale(2.0 * s.re()) + CliffordElement::scalar(q.dim(), s.norm_sqr());
    let scale = 1.0 + q.norm_sqr() + s.norm_sqr();
    if p.norm() <= 1e-13 * scale {
        return Err(SliceError::OnSpectrumSphere);
    }
    p.inv().ok_or(SliceError::OnSpectrumSphere)
}

fn common(s: &CliffordElement, q: &CliffordElement) -> (CliffordElement, CliffordElement) {
    let n = s.dim().max(q.dim());
    (s.lift(n), q.lift(n))
}

/// Left kernel `S_L^{-1}(s, q) = -(q^2 - 2 Re(s) q + |s|^2)^{-1} (q - conj s)`.
pub fn cauchy_kernel_left(
    s: &CliffordElement,
    q: &CliffordElement,
) -> Result<CliffordElement, SliceError> {
    let (s, q) = common(s, q);
    let inv = pencil_inverse(&s, &q)?;
    Ok(-(inv * (q - s.conj())))
}

/// Right kernel `S_R^{-1}(s, q) = -(q - conj s)(q^2 - 2 Re(s) q + |s|^2)^{-1}`.
pub fn cauchy_kernel_right(
    s: &CliffordElement,
    q: &CliffordElement,
) -> Result<CliffordElement, SliceError> {
    let (s, q) = common(s, q);
    let inv = pencil_inverse(&s, &q)?;
    Ok(-((q - s.conj()) * inv))
}
