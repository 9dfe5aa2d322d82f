//! Polygonal words in free groups.
//!
//! A cyclically reduced word `w` is polygonal when some closed surface built
//! from disks reading powers of `w` immerses in the rose and has χ smaller
//! than its number of disks. This crate provides the word algebra, the
//! surface complexes and their certifier, the combinatorial invariants that
//! imply polygonality, explicit constructions, Whitehead reduction, a bounded
//! exhaustive search and Monte Carlo statistics for height-one words.

pub mod complex;
pub mod constructors;
pub mod covers;
pub mod invariants;
pub mod par;
pub mod search;
pub mod stats;
pub mod whitehead;
pub mod words;

pub use complex::{certify, DiskSpec, PolygonalityCertificate, SidePairing, Slot, SurfaceComplex};
pub use par::Executor;
pub use words::{cyclic_reduce, parse_cyclic, parse_word, CyclicWord, Letter, Relabeling, Word, WordError};
