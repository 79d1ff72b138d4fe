//! Digraph laboratory for locally semicomplete commutative weakly
//! distance-regular digraphs.
//!
//! The crate builds the standard metric attachments of a strongly connected
//! digraph (two-way distances, relation partition, intersection numbers),
//! decides the pure/mixed character of short-circuit arc types, constructs
//! the three classification families (team-tournament products and circulant
//! lexicographic products), and classifies an arbitrary input digraph against
//! them with an explicit isomorphism witness. A backtracking searcher for
//! doubly regular team tournaments and an exhaustive small-order sweep round
//! out the toolbox; everything is deterministic and desk-scale (n ≤ 256).
//!
//! ```
//! use wdrlab::classifier::{classify, FamilyParams};
//! use wdrlab::constructions::cayley_circulant;
//!
//! // The circulant on Z_8 with steps {1, 2} is the (i, l, m) = (2, 4, 1)
//! // member of the circulant-product family.
//! let g = cayley_circulant(8, &[1, 2])?;
//! let result = classify(&g)?;
//! assert_eq!(result.family, Some(2));
//! assert_eq!(result.params, Some(FamilyParams::Family2 { i: 2, l: 4, m: 1 }));
//! # Ok::<(), wdrlab::Error>(())
//! ```

pub mod classifier;
pub mod cli;
pub mod constructions;
pub mod digraph;
pub mod iso;
pub mod scheme;
pub mod search;
pub mod structure;

pub use digraph::{Digraph, TwoWayDistanceMatrix};
pub use scheme::{IntersectionTensor, RelationPartition};

/// A two-way distance pair `(∂(x,y), ∂(y,x))`. Serialized as `[a, b]`.
pub type Label = (usize, usize);

/// The transpose `(b, a)` of a label `(a, b)`.
pub fn transpose(l: Label) -> Label {
    (l.1, l.0)
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("loop arc ({0}, {0}) is not allowed")]
    LoopArc(usize),
    #[error("arc ({u}, {v}) out of range for {n} vertices")]
    ArcOutOfRange { u: usize, v: usize, n: usize },
    #[error("vertex {v} out of range for {n} vertices")]
    VertexOutOfRange { v: usize, n: usize },
    #[error("digraph has no vertices")]
    EmptyDigraph,
    #[error("digraph is not strongly connected: no path from {from} to {to}")]
    NotStronglyConnected { from: usize, to: usize },
    #[error("digraph has no circuit")]
    NoCircuit,
    #[error("vertex subset is empty")]
    EmptyVertexSet,
    #[error("label set is empty")]
    EmptyLabelSet,
    #[error("label ({0}, {1}) is not a two-way distance of this digraph")]
    UnknownLabel(usize, usize),
    #[error("intersection tensor is not weakly distance-regular")]
    NotWeaklyDistanceRegular,
    #[error("intersection tensor is not commutative")]
    NotCommutative,
    #[error("digraph is not locally semicomplete")]
    NotLocallySemicomplete,
    #[error("arc type {0} is not present (no label (1, {0} - 1))")]
    ArcTypeNotPresent(usize),
    #[error("invalid construction: {0}")]
    Construction(String),
    #[error("invalid search specification: {0}")]
    SearchSpec(String),
    #[error("hypothesis failed: {0}")]
    Hypothesis(Box<classifier::HypothesisReport>),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
