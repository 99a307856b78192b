//! Exact computations with DG categories, twisted complexes, bitwisted
//! complexes and A∞ structures over `Q` and `F_p`.

pub mod ainfty;
pub mod bitwisted;
pub mod category;
pub mod cli;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod io;
pub mod matrix;
pub mod quiver;
pub mod random;
pub mod scalar;
pub mod selftest;
pub mod tensor;
pub mod transfer;
pub mod twisted;

pub use error::{Error, Result};
