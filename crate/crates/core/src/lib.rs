//! Exact combinatorics for skew tableaux, 321-avoiding permutations and
//! Brill–Noether Euler characteristics.
//!
//! Every quantity is computed exactly with arbitrary-precision integers, and
//! each formula comes with an independent route (enumeration, divided
//! differences or pipe dreams) to check it against.

pub mod brill_noether;
pub mod error;
pub mod exact;
pub mod permutations;
pub mod polyring;
pub mod tableaux;

pub use error::{Error, Result};
