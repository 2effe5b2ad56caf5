//! Compressed arborescence enumeration for directed graphs.
//!
//! The enumerator of a digraph — its Kirchhoff polynomial, with one
//! monomial per spanning arborescence — is usually exponentially large when
//! expanded. This crate computes it in factored form instead: strongly
//! connected components and dominator-tree decomposition split the digraph
//! into provably prime components in linear time, and a recursive
//! deletion-contraction step compresses each prime component further.
//! Counting, exact evaluation, uniform sampling and polynomial GCD all run
//! directly on the compressed form.
//!
//! Modules:
//! - [`digraph`]: graph representation and structural primitives
//! - [`expr`]: hash-consed expression DAGs for the compressed polynomials
//! - [`oracle`]: brute-force enumeration and Matrix-Tree counting
//! - [`decompose`]: the SCC / domination prime-factorization pipeline
//! - [`engine`]: recursive compression and counting
//! - [`ops`]: GCD, uniform sampling, composable test-graph generation
//! - [`cli`]: the `kirchhoff` command-line surface

pub mod cli;
pub mod decompose;
pub mod digraph;
pub mod engine;
pub mod expr;
pub mod ops;
pub mod oracle;
#[doc(hidden)]
pub mod testutil;

pub use digraph::{Digraph, DigraphBuilder, DominatorTree, Edge, EdgeId, SccPartition, VertexId};
pub use expr::{Expr, Monomial, MonomialSet, Symbol};
