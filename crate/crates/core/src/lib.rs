//! Finite-scale computations around two-step correlation sequences:
//! Gowers norms on cyclic groups, the structured/uniform/error splitting of
//! multiplicative functions, partition regularity of quadratic equations,
//! multiplicative recurrence searches, an exact spectral representation of
//! correlations for finite systems, and a Grothendieck-type bilinear gauge.

pub mod arith;
pub mod correlation;
pub mod cyclic;
pub mod decomposition;
pub mod error;
pub mod gauge;
pub mod gowers;
pub mod multiplicative;
pub mod quadform;
pub mod recurrence;
pub mod subset;
pub mod sum;

pub use num_complex::Complex64;

pub use error::{Error, Result};
