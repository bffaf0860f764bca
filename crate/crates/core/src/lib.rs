//! Finite-dimensional models behind wrapped Floer homology and subcritical
//! handle attachment: Lagrangian paths and their indices, the Weinstein handle
//! model, radial Hamiltonian profiles, the handle chord spectrum and
//! `Z/2` filtered complexes with direct limits.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod handle;
pub mod homalg;
pub mod maslov;
pub mod profiles;
pub mod spectrum;
pub mod symplin;
pub mod verify;

pub use error::{Error, Result};
pub use maslov::HalfInt;
pub use symplin::{LagrangianFrame, LagrangianPath, SymplecticForm, SymplecticMatrix};
