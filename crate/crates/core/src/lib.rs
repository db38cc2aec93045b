//! Exact combinatorics for edge-coloured, edge-weighted multigraphs
//! ("experiment graphs"): perfect-matching weights, GHZ verification,
//! structural decompositions across small vertex cuts, the vertex-count
//! reductions across 3-cuts, and a numerical search for GHZ weightings.

pub mod ghz;
pub mod graph;
pub mod instances;
pub mod io;
pub mod matching;
pub mod rational;
pub mod reduction;
pub mod search;
pub mod structure;

pub use graph::{Colour, Edge, FloatGraph, Multigraph, VertexColouring, Weight};
pub use rational::GaussianRational;
