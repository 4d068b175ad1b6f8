pub mod algebra;
pub mod boxcount;
pub mod digital;
pub mod discrepancy;
pub mod error;
pub mod hankel;
pub mod laurent;

pub use error::{Error, Result};
