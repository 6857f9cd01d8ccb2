//! Analysis of dissipative complex quadratic forms on phase space:
//! Hamilton maps, singular spaces, symplectic decompositions, predicted
//! spectra and decay rates, and a Hermite-Galerkin numerical cross-check.

pub mod construct;
pub mod decomposition;
pub mod error;
pub mod galerkin;
pub mod linalg;
pub mod quadform;
pub mod report;
pub mod singular;
pub mod spectrum;
pub mod tol;

pub use error::{QuadError, Result};
pub use quadform::{HamiltonMap, QuadraticForm, QuadraticFormJson};
pub use tol::Tolerances;
