//! Information-geometric tools for quantum channel capacities.
//!
//! The crate treats quantum relative entropy as a Bregman divergence and
//! estimates capacities as radii of smallest enclosing information balls.
//!
//! - [`qmath`]: density matrices, entropies, relative entropy (matrix and Bloch forms).
//! - [`channels`]: Kraus channels, affine Bloch maps, complementary channels.
//! - [`infogeo`]: Bregman generators, enclosing-ball solvers, Laguerre/Delaunay structures.
//! - [`capacity`]: Holevo, coherent and private information, HSW capacity estimation.
//! - [`superact`]: joint-channel superactivation sweeps and decomposition checks.
//! - [`zeroerr`]: confusability graphs, independent sets and k-median core-sets.
//!
//! All logarithms are base 2 unless a function says otherwise.

#![forbid(unsafe_code)]

pub mod capacity;
pub mod channels;
pub mod error;
pub mod infogeo;
pub mod qmath;
pub mod superact;
pub mod zeroerr;

pub use error::{Error, Result};
