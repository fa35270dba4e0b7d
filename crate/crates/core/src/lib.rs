//! Symmetric and bosonic extendibility of bipartite states whose `B` side is
//! a qubit.
//!
//! The crate decides whether `rho_AB` admits a `k`-copy symmetric or bosonic
//! extension, and converts any symmetric extension into a bosonic one with
//! the same two-party marginal.

pub mod acceptance;
pub mod cli;
pub mod convert;
pub mod error;
pub mod extend;
pub mod fixtures;
pub mod io;
pub mod limits;
pub mod linalg;
pub mod schur;
pub mod tol;

pub use error::{Error, Result};
