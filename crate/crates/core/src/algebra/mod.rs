//! Scalar algebras: quaternions, Clifford algebras `R_n`, paravectors and slices.

mod clifford;
mod quaternion;
mod slice;

pub use clifford::{
    blade_label, blade_sign, clifford_mul, conj_sign, CliffordElement, MAX_CLIFFORD_DIM,
};
pub use quaternion::{quat_mul, Quaternion};
pub use slice::{
    arg, arg_uv, slice_decompose, slice_decompose_element, sphere_contains, sphere_of, Paravector,
    SliceDecomposition, SlicePoint, SliceUnit, SPHERE_TOL,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("Clifford dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("argument of zero is undefined")]
    ZeroInput,
    #[error("element has components outside the quaternion subalgebra")]
    NotQuaternion,
    #[error("element is not a paravector")]
    NotParavector,
    #[error("not a purely imaginary unit")]
    NotUnit,
}
