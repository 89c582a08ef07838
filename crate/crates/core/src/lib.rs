pub mod analysis;
pub mod bench;
pub mod cli;
pub mod error;
pub mod gramians;
pub mod io;
pub mod kernels;
pub mod reduction;
pub mod simulate;
pub mod system;

pub use error::{Error, Result};
