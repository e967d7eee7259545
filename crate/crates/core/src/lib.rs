pub mod config;
pub mod error;
pub mod experiment;
pub mod fractional_calculus;
pub mod galerkin_solver;
pub mod problem_model;
pub mod quadrature;
pub mod spatial_operator;
pub mod special_functions;
pub mod verification;

pub use error::{Error, Result};
