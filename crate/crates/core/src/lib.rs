pub mod assembly;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod linops;
pub mod solver;
pub mod spaces;

pub use error::{Error, Result};
