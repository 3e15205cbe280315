//! Homology of the cell complexes `cell(n, w)` (disks in a strip of width `w`)
//! and `desc(n, w)` (no-`(w+1)`-equal arrangements) through a discrete
//! gradient field, an explicit integral basis of cycles, and the FI_d-module
//! structure on homology.

pub mod basis;
pub mod cli;
pub mod complex;
pub mod error;
pub mod fid;
pub mod homology;
pub mod morse;
pub mod perm;
pub mod repro;
pub mod snf;
pub mod symbols;

pub use error::{Error, Result};
pub use symbols::{Chain, ComplexSpec, Label, Symbol, Variant};
