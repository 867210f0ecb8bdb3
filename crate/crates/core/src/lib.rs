pub mod bands;
pub mod eig;
pub mod ep;
pub mod error;
pub mod format;
pub mod gauge;
pub mod model;

pub use error::{Error, Result};
