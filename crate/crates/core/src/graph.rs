//! Half-edge-coloured, edge-weighted multigraphs.
//!
//! An [`Edge`] carries one colour per half: `cu` is the colour of the half
//! incident on `u` and `cv` the colour of the half incident on `v`. Edges are
//! stored with `u < v`; constructing one with the endpoints reversed swaps the
//! half colours along with them, so the same physical edge always has the same
//! representation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, Mul};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::GaussianRational;

/// Scalar type an edge weight can take. Exact graphs use
/// [`GaussianRational`]; numerically rescaled graphs use [`Complex64`].
pub trait Weight:
    Clone + PartialEq + fmt::Debug + Zero + One + Add<Output = Self> + Mul<Output = Self> + Send + Sync
{
}

impl Weight for GaussianRational {}
impl Weight for Complex64 {}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colour(pub u32);

impl fmt::Debug for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.0)
    }
}

impl fmt::Display for Colour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Colour {
    fn from(c: u32) -> Self {
        Colour(c)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("edge endpoint {vertex} out of range for {n} vertices")]
    EndpointOutOfRange { vertex: usize, n: usize },
    #[error("colour {0} is not in the colour universe")]
    ColourOutsideUniverse(Colour),
    #[error("vertex colouring has {got} entries, graph has {expected} vertices")]
    ColouringLength { expected: usize, got: usize },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(usize),
}

#[derive(Clone, PartialEq, Debug)]
pub struct Edge<W = GaussianRational> {
    u: usize,
    v: usize,
    cu: Colour,
    cv: Colour,
    weight: W,
}

impl<W> Edge<W> {
    pub fn new(a: usize, b: usize, ca: Colour, cb: Colour, weight: W) -> Result<Self, GraphError> {
        if a == b {
            return Err(GraphError::SelfLoop(a));
        }
        Ok(if a < b {
            Edge { u: a, v: b, cu: ca, cv: cb, weight }
        } else {
            Edge { u: b, v: a, cu: cb, cv: ca, weight }
        })
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn cu(&self) -> Colour {
        self.cu
    }

    pub fn cv(&self) -> Colour {
        self.cv
    }

    pub fn weight(&self) -> &W {
        &self.weight
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u, self.v)
    }

    /// The endpoint that is not `x`. `x` must be an endpoint.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }

    /// Colour of the half incident on `x`.
    pub fn colour_at(&self, x: usize) -> Colour {
        if x == self.u {
            self.cu
        } else {
            debug_assert_eq!(x, self.v);
            self.cv
        }
    }

    pub fn is_monochromatic(&self) -> bool {
        self.cu == self.cv
    }

    /// The `(u, v, cu, cv)` class used for parallel-edge merging.
    pub fn class(&self) -> (usize, usize, Colour, Colour) {
        (self.u, self.v, self.cu, self.cv)
    }

    pub fn with_weight<W2>(&self, weight: W2) -> Edge<W2> {
        Edge { u: self.u, v: self.v, cu: self.cu, cv: self.cv, weight }
    }
}

/// Total map from vertex index to colour.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexColouring(Vec<Colour>);

impl VertexColouring {
    pub fn new(colours: Vec<Colour>) -> Self {
        VertexColouring(colours)
    }

    pub fn monochromatic(n: usize, c: Colour) -> Self {
        VertexColouring(vec![c; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> Colour {
        self.0[v]
    }

    pub fn set(&mut self, v: usize, c: Colour) {
        self.0[v] = c;
    }

    pub fn as_slice(&self) -> &[Colour] {
        &self.0
    }

    /// The single colour used, if every vertex has the same one. `None` for
    /// the empty colouring.
    pub fn mono_colour(&self) -> Option<Colour> {
        let first = *self.0.first()?;
        self.0.iter().all(|&c| c == first).then_some(first)
    }

    /// Every vertex has the same colour. Vacuously true for the empty
    /// colouring, which is the monochromatic colouring of every colour.
    pub fn is_monochromatic(&self) -> bool {
        self.is_empty() || self.mono_colour().is_some()
    }

    /// Colouring of `vertices` (in the given order) read off `self`.
    pub fn restrict(&self, vertices: &[usize]) -> VertexColouring {
        VertexColouring(vertices.iter().map(|&v| self.0[v]).collect())
    }
}

impl From<Vec<u32>> for VertexColouring {
    fn from(v: Vec<u32>) -> Self {
        VertexColouring(v.into_iter().map(Colour).collect())
    }
}

impl fmt::Debug for VertexColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", c.0)?;
        }
        write!(f, "]")
    }
}

impl fmt::Display for VertexColouring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Every colouring of `n` vertices with colours from `universe`, in
/// lexicographic order (vertex 0 most significant).
pub fn all_colourings(n: usize, universe: &BTreeSet<Colour>) -> Vec<VertexColouring> {
    let colours: Vec<Colour> = universe.iter().copied().collect();
    if n > 0 && colours.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        out.push(VertexColouring(idx.iter().map(|&i| colours[i]).collect()));
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < colours.len() {
                break;
            }
            idx[pos] = 0;
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Multigraph<W = GaussianRational> {
    n: usize,
    edges: Vec<Edge<W>>,
    colour_universe: BTreeSet<Colour>,
}

/// Graph with complex floating-point weights.
pub type FloatGraph = Multigraph<Complex64>;

/// Result of [`Multigraph::induced_subgraph`]: the subgraph on a dense vertex
/// range plus the original index of every new vertex.
#[derive(Clone, Debug)]
pub struct InducedSubgraph<W = GaussianRational> {
    pub graph: Multigraph<W>,
    /// `original[new] = old`.
    pub original: Vec<usize>,
}

impl<W> InducedSubgraph<W> {
    /// New index of original vertex `old`, if it was retained.
    pub fn new_index(&self, old: usize) -> Option<usize> {
        self.original.iter().position(|&x| x == old)
    }
}

impl<W: Weight> Multigraph<W> {
    pub fn new(
        n: usize,
        colour_universe: impl IntoIterator<Item = Colour>,
        edges: Vec<Edge<W>>,
    ) -> Result<Self, GraphError> {
        let colour_universe: BTreeSet<Colour> = colour_universe.into_iter().collect();
        for e in &edges {
            if e.v >= n {
                return Err(GraphError::EndpointOutOfRange { vertex: e.v, n });
            }
            for c in [e.cu, e.cv] {
                if !colour_universe.contains(&c) {
                    return Err(GraphError::ColourOutsideUniverse(c));
                }
            }
        }
        Ok(Multigraph { n, edges, colour_universe })
    }

    /// Graph without edges.
    pub fn empty(n: usize, colour_universe: impl IntoIterator<Item = Colour>) -> Self {
        Multigraph {
            n,
            edges: Vec::new(),
            colour_universe: colour_universe.into_iter().collect(),
        }
    }

    /// Appends an edge and returns its index.
    pub fn add_edge(
        &mut self,
        a: usize,
        b: usize,
        ca: impl Into<Colour>,
        cb: impl Into<Colour>,
        weight: W,
    ) -> Result<usize, GraphError> {
        let e = Edge::new(a, b, ca.into(), cb.into(), weight)?;
        if e.v >= self.n {
            return Err(GraphError::EndpointOutOfRange { vertex: e.v, n: self.n });
        }
        for c in [e.cu, e.cv] {
            if !self.colour_universe.contains(&c) {
                return Err(GraphError::ColourOutsideUniverse(c));
            }
        }
        self.edges.push(e);
        Ok(self.edges.len() - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge<W>] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &Edge<W> {
        &self.edges[i]
    }

    pub fn colour_universe(&self) -> &BTreeSet<Colour> {
        &self.colour_universe
    }

    pub fn with_universe(mut self, universe: impl IntoIterator<Item = Colour>) -> Result<Self, GraphError> {
        let universe: BTreeSet<Colour> = universe.into_iter().collect();
        for e in &self.edges {
            for c in [e.cu, e.cv] {
                if !universe.contains(&c) {
                    return Err(GraphError::ColourOutsideUniverse(c));
                }
            }
        }
        self.colour_universe = universe;
        Ok(self)
    }

    pub fn check_colouring(&self, vc: &VertexColouring) -> Result<(), GraphError> {
        if vc.len() != self.n {
            return Err(GraphError::ColouringLength { expected: self.n, got: vc.len() });
        }
        if let Some(c) = vc.as_slice().iter().find(|c| !self.colour_universe.contains(c)) {
            return Err(GraphError::ColourOutsideUniverse(*c));
        }
        Ok(())
    }

    /// Incident edge indices per vertex, in storage order.
    pub fn incidence(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.n];
        for (i, e) in self.edges.iter().enumerate() {
            inc[e.u].push(i);
            inc[e.v].push(i);
        }
        inc
    }

    /// Sorted neighbour sets of the skeleton.
    pub fn neighbours(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for e in &self.edges {
            adj[e.u].insert(e.v);
            adj[e.v].insert(e.u);
        }
        adj
    }

    /// Replaces every class of parallel edges sharing `(u, v, cu, cv)` by a
    /// single edge carrying the summed weight. Classes appear in order of
    /// first occurrence. Zero sums are kept.
    pub fn merge_parallel_edges(&self) -> Self {
        let mut slot: HashMap<(usize, usize, Colour, Colour), usize> = HashMap::new();
        let mut edges: Vec<Edge<W>> = Vec::new();
        for e in &self.edges {
            match slot.get(&e.class()) {
                Some(&i) => {
                    let w = edges[i].weight.clone() + e.weight.clone();
                    edges[i].weight = w;
                }
                None => {
                    slot.insert(e.class(), edges.len());
                    edges.push(e.clone());
                }
            }
        }
        Multigraph { n: self.n, edges, colour_universe: self.colour_universe.clone() }
    }

    pub fn drop_zero_edges(&self) -> Self {
        self.filter_edges(|e| !e.weight.is_zero())
    }

    /// Same vertex set, keeping the edges for which `keep` holds.
    pub fn filter_edges(&self, mut keep: impl FnMut(&Edge<W>) -> bool) -> Self {
        Multigraph {
            n: self.n,
            edges: self.edges.iter().filter(|e| keep(e)).cloned().collect(),
            colour_universe: self.colour_universe.clone(),
        }
    }

    /// `G[vertices]`, relabelled so that the retained vertices keep their
    /// relative order.
    pub fn induced_subgraph(&self, vertices: &BTreeSet<usize>) -> Result<InducedSubgraph<W>, GraphError> {
        if let Some(&v) = vertices.iter().find(|&&v| v >= self.n) {
            return Err(GraphError::VertexOutOfRange(v));
        }
        let original: Vec<usize> = vertices.iter().copied().collect();
        let mut new_index = vec![usize::MAX; self.n];
        for (i, &v) in original.iter().enumerate() {
            new_index[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| new_index[e.u] != usize::MAX && new_index[e.v] != usize::MAX)
            .map(|e| Edge {
                u: new_index[e.u],
                v: new_index[e.v],
                cu: e.cu,
                cv: e.cv,
                weight: e.weight.clone(),
            })
            .collect();
        Ok(InducedSubgraph {
            graph: Multigraph {
                n: original.len(),
                edges,
                colour_universe: self.colour_universe.clone(),
            },
            original,
        })
    }

    /// Underlying simple graph: one unit-weight edge, both halves colour 0,
    /// per adjacent pair, sorted by endpoints.
    pub fn skeleton(&self) -> Self {
        let pairs: BTreeSet<(usize, usize)> = self.edges.iter().map(|e| (e.u, e.v)).collect();
        Multigraph {
            n: self.n,
            edges: pairs
                .into_iter()
                .map(|(u, v)| Edge { u, v, cu: Colour(0), cv: Colour(0), weight: W::one() })
                .collect(),
            colour_universe: [Colour(0)].into_iter().collect(),
        }
    }

    /// Applies `f` to every edge weight.
    pub fn map_weights<W2: Weight>(&self, mut f: impl FnMut(&Edge<W>) -> W2) -> Multigraph<W2> {
        Multigraph {
            n: self.n,
            edges: self.edges.iter().map(|e| e.with_weight(f(e))).collect(),
            colour_universe: self.colour_universe.clone(),
        }
    }

    /// True when no `(u, v, cu, cv)` class holds more than one edge.
    pub fn is_merged(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges.iter().all(|e| seen.insert(e.class()))
    }
}

impl Multigraph<GaussianRational> {
    pub fn to_float(&self) -> FloatGraph {
        self.map_weights(|e| e.weight.to_complex64())
    }
}
