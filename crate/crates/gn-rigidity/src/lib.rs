pub mod cli;
pub mod constants;
pub mod error;
pub mod expansion;
pub mod functionals;
pub mod geometry;
pub mod quad;
pub mod ranges;
pub mod specfun;
pub mod suite;
pub mod symmetrize;
pub mod tolerances;
pub mod varmin;

pub use error::{Error, Result};
