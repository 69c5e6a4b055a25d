//! Metric geometry on merge trees.
//!
//! The crate computes barcodes of merge trees with the Elder Rule, exact
//! bottleneck distances between barcodes, exact interleaving distances
//! between small merge trees, chamber decompositions on which the two
//! distances agree, and discrete paths whose bottleneck length matches the
//! interleaving distance between their endpoints.

pub mod barcode;
pub mod chambers;
pub mod error;
pub mod interleaving;
pub mod io;
pub mod paths;
pub mod tree;
mod union_find;

pub use error::{Error, Result};
pub use tree::{isomorphic, validate, MergeTree, NodeId, PointOnTree, RawNode};
