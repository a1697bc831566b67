//! Noncommutative deformations of the structure sheaf of a Weierstrass elliptic curve,
//! regarded as a module over the sheaf of differential operators.
//!
//! The pipeline runs over exact rationals: chart rings and their derivations
//! ([`chart`], [`diffop`]), `Ext^1` as the cokernel of the derivation ([`ext`]), cohomology
//! over the cover `{D+(y), D+(z), D+(yz)}` ([`cohomology`]), and the obstruction calculus that
//! produces the hull and the versal family ([`algebra`], [`deformation`]).

pub mod chart;
pub mod diffop;
pub mod error;
pub mod ext;
pub mod linalg;
pub mod scalar;
pub mod syntax;

pub use error::{DeformError, Result};
pub mod algebra;
pub mod cohomology;
pub mod deformation;
pub mod reference;
pub mod report;
