//! Decoherence of qubits coupled to spin environments: exact product-form
//! reduced dynamics, a dense state-vector oracle, the many-to-one coupling
//! reduction, the Gaussian-bath limit and a reproducible experiment runner.

pub mod bath;
pub mod closed_form;
pub mod coupling;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod spin;

pub use error::{LabError, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64 as C64;
