pub mod algebra;
pub mod calculus;
pub mod cliffordop;
pub mod contour;
pub mod linalg;
pub mod operator;
pub mod qmatrix;
pub mod quadratic;
pub mod sample;
pub mod slicefn;
pub mod spectrum;
