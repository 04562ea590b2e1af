pub mod bundle;
pub mod cli;
pub mod error;
pub mod expr;
pub mod forms;
pub mod groupoid;
pub mod nerve;
pub mod sampling;
pub mod smooth;

pub use error::{Error, Result};
