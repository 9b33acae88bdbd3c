//! Exact computations on ordered Bratteli diagrams: Vershik dynamics, invariant measures,
//! return correlations, Toeplitz substitution schemes, enumeration scales and a skew-product
//! simulator.

pub mod bits;
pub mod diagram;
pub mod diagram_file;
pub mod enumeration;
pub mod error;
pub mod interval;
pub mod expr;
pub mod matrix;
pub mod measures;
pub mod rigidity;
pub mod skewsim;
pub mod toeplitz;
pub mod ordering;
pub mod poly;
pub mod vershik;

pub use error::{Error, Result};
