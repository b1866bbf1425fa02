//! Parametric AAA (p-AAA): data-driven rational approximation of sampled
//! multivariate functions in barycentric form.

pub mod barycentric;
pub mod error;
pub mod fit;
pub mod grid;
pub mod io;
pub mod loewner;
pub mod lsq;
pub mod mimo;
pub mod models;

pub use error::{Error, Result};
