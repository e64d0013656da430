//! Exact modular symbols for Γ₀(N), Hecke eigenvalue fields, and the
//! classification of the measured foliations induced by weight-2 eigenforms.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod congruence;
pub mod eigen;
pub mod error;
pub mod foliation;
pub mod hecke;
pub mod iet;
pub mod modsym;
pub mod periods;

pub use error::{Error, Result};
