//! Exact calculator for Donaldson series of simple-type 4-manifolds and
//! the gluing formula along genus-g surfaces of self-intersection zero.

pub mod catalog;
pub mod cli;
pub mod constructions;
pub mod error;
pub mod gluing;
pub mod lattice;
pub mod number;
pub mod pairing_fit;
pub mod series;

pub use error::{Error, Result};
