pub mod contour;
pub mod error;
pub mod krein;
pub mod mobius;
pub mod quad;
pub mod renorm;
pub mod schottky;
pub mod specialfn;
pub mod zeta;

pub use error::{Error, Result};
