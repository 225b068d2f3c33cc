//! Energy-momentum invariants of asymptotically anti-de Sitter initial data,
//! the Hermitian mass matrices built from them, and numerical checks of the
//! spinor identities behind their positivity.

pub mod clifford;
pub mod error;
pub mod geometry;
pub mod initial_data;
pub mod mass;
pub mod quadrature;
pub mod report;
pub mod spinor;

pub use error::{Error, Result};
