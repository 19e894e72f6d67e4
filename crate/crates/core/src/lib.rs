//! Quantisation with squeezed coherent states.

pub mod error;
pub mod fields;
pub mod numerics;
pub mod onemode;
pub mod pdm;
pub mod quantmap;
pub mod nonsepstates;
pub mod sepstates;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
