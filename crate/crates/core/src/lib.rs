//! Supersingular genus-2 curves over finite fields.

pub mod arith;
pub mod error;
pub mod ff;
pub mod poly;
pub mod curve;
pub mod jacobian;
pub mod zeta;
pub mod crypto;
pub mod families;
pub mod scan;

pub use error::{Error, Result};
