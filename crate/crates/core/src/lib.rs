//! Configuration-interaction dynamics of matter fields coupled to gravonons.
//!
//! The crate is organised bottom-up: [`fock`] provides the truncated bosonic
//! basis, [`models`] assembles Hamiltonians on it, [`propagator`] evolves
//! states exactly, and [`analytic`] holds the weak-coupling closed forms the
//! numerics are checked against. [`gravonon`], [`meanfield`] and
//! [`dimensional`] cover the mode structure, the coupled field equations and
//! the order-of-magnitude estimates.

pub mod analytic;
pub mod dimensional;
pub mod error;
pub mod fock;
pub mod gravonon;
pub mod meanfield;
pub mod models;
pub mod propagator;
pub mod series;
pub mod telegraph;

pub use error::{Error, Result};
pub use models::HamiltonianMatrix;
pub use series::TimeSeries;
