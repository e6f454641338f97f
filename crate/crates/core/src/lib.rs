pub mod bath;
pub mod cli;
pub mod error;
pub mod focksim;
pub mod kraus;
pub mod numerics;
pub mod protocol;

pub use error::{Error, Result};
