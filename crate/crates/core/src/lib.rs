//! Boundary-entropy spectra for random walks on `Z[1/p_1,...,1/p_l] ⋊ S`.
//!
//! The pipeline: design a finitely supported, generating, `Λ`-absorbing
//! measure `τ` with prescribed negative drifts ([`measures`]), enumerate the
//! exact entropy spectrum ([`spectrum`]), and check it by simulating the walk
//! and its `p`-adic boundary points ([`walk`], [`padic`]).

pub mod error;
pub mod group;
pub mod logval;
pub mod measures;
pub mod padic;
pub mod pipeline;
pub mod report;
pub mod sarith;
pub mod spectrum;
pub mod walk;

pub use error::{Error, Result};
pub use group::{AffineElement, CosetKey};
pub use logval::SymbolicLogValue;
pub use measures::{DriftVector, FiniteMeasure};
pub use padic::PAdicApprox;
pub use sarith::{PrimeSet, SInteger, SUnit, Valuation};
