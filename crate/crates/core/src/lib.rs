//! Higher additive energies, tuple sumsets, spectral bounds and structure extraction
//! for finite sets in finite abelian groups and integer lattices.

pub mod eigen;
pub mod error;
pub mod extract;
pub mod genset;
mod fourier;
pub mod group;
pub mod limits;
pub mod moments;
pub mod sets;
pub mod spectrum;
pub mod verify;

pub use error::{Error, Result};
pub use group::{make_group, Elem, GroupSpec};
pub use limits::Limits;
pub use sets::{GSet, Sign, TupleSet};
