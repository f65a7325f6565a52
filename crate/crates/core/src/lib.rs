//! Linear stability analysis of a kinetic-fluid spray model.

pub mod error;
pub mod profiles;
pub mod quadrature;
pub mod roots;
pub mod dispersion;
pub mod hyperbolic;
pub mod modesim;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
