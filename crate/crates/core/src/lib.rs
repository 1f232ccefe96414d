//! Optimal SIAC (smoothness-increasing accuracy-conserving) B-spline kernels.
//!
//! A degree-`d` kernel is a combination of `2d + 1` B-splines on `3d + 2`
//! knots whose convolution reproduces every polynomial of degree `≤ 2d`. The
//! coefficients solve `M₀ c = e₁`, where `M₀` holds divided differences of
//! monomials over each B-spline's knots. Everything is generic over
//! [`Scalar`], so the same code runs in exact rational arithmetic or in `f64`.
//!
//! ```
//! use siac_core::{build_kernel, symmetric_knots, Rational};
//!
//! let kernel = build_kernel(&symmetric_knots::<Rational>(1), 1).unwrap();
//! let c: Vec<String> = kernel.raw_coefficients().iter().map(|c| c.to_string()).collect();
//! assert_eq!(c, ["-1/12", "7/6", "-1/12"]);
//! ```

pub mod bspline;
pub mod divdiff;
pub mod document;
pub mod error;
pub mod filter;
pub mod kernel;
pub mod numeric;
pub mod quadrature;

pub use bspline::BSpline;
pub use divdiff::{divided_difference, divided_difference_expansion, KnotSequence, Polynomial};
pub use document::{AnyKernel, FieldDocument, FieldTag, KernelDocument};
pub use error::{Error, NumericError, Result};
pub use filter::{
    convolve_field, convolve_monomial, error_norms, reproduction_residuals, ErrorNorms,
    PiecewiseField, ScaledKernel,
};
pub use kernel::{
    build_kernel, build_matrix_divdiff, build_matrix_single_knots, build_matrix_uniform,
    coefficient_table, normalize_coefficients, solve_coefficients, symmetric_knots,
    CoefficientTable, ConstraintMatrix, SiacKernel, TableMode,
};
pub use numeric::{rational_from_integer_pair, Rational, Scalar};
