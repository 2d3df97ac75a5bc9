//! Opposition graphs on maximal flags of finite classical geometries.
//!
//! The crate builds projective spaces, the classical polar spaces and the
//! oriflamme geometry over small finite fields, enumerates their maximal
//! flags, and checks closed-form spectral data of the opposition graph
//! (quotient matrices, eigenvector families, intersection numbers,
//! smallest-eigenvalue multiplicities) against exact computation.

pub mod field;
pub mod geometry;
pub mod linalg;
pub mod qpow;
pub mod spectra;

pub use field::{Elem, Field, FieldError};
pub use geometry::{Descriptor, Enumeration, GeometryError, GeometryInstance};
