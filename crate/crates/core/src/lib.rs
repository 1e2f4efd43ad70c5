//! Finite free probability on the negative half-line: finite free additive
//! convolution of monic polynomials, the FFF transform, finite R-transforms
//! and cumulants, and the quantitative comparison of the finite R-transform
//! with the Voiculescu R-transform of the empirical root distribution.
//!
//! Algebraic operations are generic over [`Scalar`] (exact rationals or
//! `f64`). Analytic operations work in `f64` from explicit roots.

// `!(a < b)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod convolution;
pub mod error;
pub mod experiments;
pub mod io;
pub mod measures;
pub mod oracles;
pub mod polycore;
pub mod scalar;
pub mod transforms;

pub use analytic::{saddle, tilted_r, BoundCertificate, TiltContext};
pub use convolution::{boxplus, superadditivity_report, SuperadditivityReport};
pub use error::{Error, Result};
pub use measures::ReferenceMeasure;
pub use polycore::{DensePoly, EmpiricalDistribution, ExactPoly, FloatPoly, MonicPoly};
pub use scalar::{ExpFloat, Scalar};
pub use transforms::{
    finite_R, finite_cumulants_logseries, finite_cumulants_mobius, CumulantVector,
    TruncatedSeries,
};
