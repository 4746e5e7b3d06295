//! Exact maximum-weight stable sets on surface-embedded graphs.
//!
//! The input is a simple graph with rational vertex weights together with a
//! combinatorial embedding (rotation system + edge signature). After a
//! transversal step removes the 2-sided odd closed walks and standard
//! preprocessing reduces to 2-connected, non-bipartite, parity-consistent
//! blocks with edge-induced weights, the problem becomes a minimum-cost
//! non-negative integer circulation in an alternating orientation of the
//! dual graph, constrained to the homology class of the all-ones vector.
//! That circulation problem is solved exactly through a windowed cover
//! graph; the stable set is recovered through the slack map and a final
//! clamp. A disjunctive extended formulation of the stable set polytope can
//! be emitted and cross-checked with a built-in exact rational LP solver.
//!
//! All arithmetic is exact (big rationals / big integers); no floating
//! point anywhere in the pipeline.

pub mod blockcut;
pub mod circulation;
pub mod dual;
pub mod ef;
pub mod embedding;
pub mod error;
pub mod generate;
pub mod instance;
pub mod maxflow;
pub mod oracle;
pub mod preprocess;
pub mod rational;
pub mod slack;
pub mod solve;
pub mod transversal;
pub mod verify;

pub use embedding::{Edge, EdgeId, EmbeddedGraph, OddOneTree, Sidedness, VertexId, Walk};
pub use error::Error;
pub use rational::Q;
