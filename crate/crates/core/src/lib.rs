//! Singer-cycle spectral labeling and Las Vegas rewriting for
//! multiplicity-free polynomial modules of `GL_d(q)`.
//!
//! Modules, bottom-up:
//! - [`ffield`]: prime/extension fields, polynomials, factoring, discrete logs.
//! - [`matfq`]: dense exact matrices, characteristic polynomials, eigenpairs.
//! - [`digitmap`]: base-q digit vectors and the exponent model.
//! - [`schur`]: natural, symmetric and exterior power factors with twists.
//! - [`singer`]: Singer cycles and spectral checks on modules.
//! - [`rewrite`]: the rewriting pipeline with its verification certificate.
//! - [`instgen`]: planted instances and the ground-truth oracle.
//! - [`io`]: JSON instance and result files.

pub mod arith;
pub mod digitmap;
pub mod error;
pub mod ffield;
pub mod instgen;
pub mod io;
pub mod matfq;
pub mod rewrite;
pub mod schur;
pub mod singer;

pub use error::{Error, FailureKind, Result};
pub use ffield::{DensePoly, Field, FieldCtx, FieldElement};
pub use matfq::Matrix;
pub use schur::{BasisLabel, FactorKind, FactorSpec, ModuleSpec};
