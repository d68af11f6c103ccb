pub mod cfrac;
pub mod diagnostics;
pub mod circle;
pub mod error;
pub mod par;
pub mod quad;
pub mod ratner;
pub mod rng;
pub mod roof;
pub mod rotations;
pub mod specflow;
pub mod sum;

pub use error::{Error, Result};
