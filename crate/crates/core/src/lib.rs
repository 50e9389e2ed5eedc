pub mod benson;
pub mod convexprog;
pub mod error;
pub mod geometry;
pub mod instances;
pub mod linalg;
pub mod linprog;
pub mod metrics;
mod par;
pub mod projection;
pub mod verify;

pub use error::{Error, Result};

pub use benson::{dual as benson_dual, primal as benson_primal};
