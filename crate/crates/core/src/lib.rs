//! Steady compressible, heat-conducting, chemically reacting mixtures with slip
//! walls: constitutive kernel, validated closures, a regularized Galerkin
//! discretization on a periodic channel, Newton continuation over the
//! regularization parameters, and audits of the entropy and energy balances.

pub mod approx;
pub mod cli;
pub mod closures;
pub mod config;
pub mod error;
pub mod fields;
pub mod mesh;
pub mod mixture;
pub mod scalar;
pub mod solver;
pub mod verification;

pub use error::{Error, Result};
