//! Computations with ends of finitely generated groups: Cayley balls,
//! commensurated subsets and their Boolean algebra, free-product and
//! tree constructions, level functions on locally finite groups, and the
//! boundary of free groups as an ultrametric space.

pub mod cayley;
pub mod ends;
pub mod error;
pub mod experiments;
pub mod free_product;
pub mod group;
pub mod locally_finite;
pub mod report;
pub mod subset;
pub mod tree;

pub use error::{Error, Result};
pub use group::{ball, Ball, Element, MarkedGroup};
