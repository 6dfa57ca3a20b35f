//! Perfect tournament packings in digraphs.
//!
//! The crate is organised around a small set of exact tools:
//!
//! - [`digraph`], [`pattern`], [`embed`]: loopless digraphs on at most 64
//!   vertices, pattern digraphs (tournaments, `K_r`, `K_3^-`) and subdigraph
//!   embeddings.
//! - [`solver`]: an exact-cover search for perfect, maximum and family
//!   packings. Everything else uses it as ground truth.
//! - [`constructions`]: the extremal digraphs and seeded random generators.
//! - [`t3`]: the swap algorithm producing perfect `T_3`-packings under the
//!   "outdegree or indegree at least 2n/3" condition.
//! - [`turan`], [`complex`], [`absorb`], [`matching`], [`classify`],
//!   [`extremal`]: constructive versions of the density, hypergraph,
//!   absorbing, matching and extremal-case arguments.
//! - [`harness`]: threshold sweeps and tightness checks.

pub mod absorb;
pub mod classify;
pub mod complex;
pub mod constructions;
pub mod containment;
pub mod digraph;
pub mod embed;
mod error;
pub mod extremal;
pub mod harness;
pub mod matching;
pub mod params;
pub mod pattern;
pub mod rng;
pub mod solver;
pub mod t3;
pub mod turan;
pub mod vset;

pub use digraph::{Digraph, DigraphBuilder, Vertex};
pub use embed::{spans_copy, Embedding};
pub use error::{Error, Result};
pub use pattern::{Pattern, Tournament};
pub use solver::{Packing, Verdict};
pub use vset::VertexSet;
