pub mod bell;
pub mod certify;
pub mod cli;
pub mod dense;
pub mod error;
pub mod gap;
pub mod instances;
pub mod moments;
pub mod oracle;
pub mod pauli;
pub mod trotter;
pub mod twirl;
pub mod verify;

pub use error::{Error, Result};
