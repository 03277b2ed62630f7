pub mod error;
pub mod quad;
pub mod specfun;
pub mod laws;
pub mod kernels;
pub mod counting;
mod sums;
pub mod models;
pub mod predict;
pub mod transforms;
pub mod montecarlo;
pub mod oracle;

pub use error::{Error, Result};
