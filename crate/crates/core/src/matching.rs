//! Perfect-matching enumeration and the weight functions built on it.
//!
//! Everything here is defined by brute force over perfect matchings: the
//! weight of a matching is the product of its edge weights, the weight of a
//! graph is the sum over its perfect matchings, and the weight of a vertex
//! colouring is the weight of the subgraph it filters out. Enumeration
//! branches on the lowest-index uncovered vertex and tries its incident edges
//! in storage order, so the output order is a function of the graph alone.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{Colour, Multigraph, VertexColouring, Weight};

/// Vertex count above which the `u64` cover mask cannot be used.
pub const MAX_VERTICES: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("edge index {0} out of range")]
    EdgeOutOfRange(usize),
    #[error("vertex {0} is covered more than once")]
    DoublyCovered(usize),
    #[error("vertex {0} is not covered")]
    Uncovered(usize),
}

/// A set of edge indices covering every vertex exactly once.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PerfectMatching {
    edge_indices: Vec<usize>,
}

impl PerfectMatching {
    /// Validates `edge_indices` against `g`.
    pub fn new<W: Weight>(g: &Multigraph<W>, mut edge_indices: Vec<usize>) -> Result<Self, MatchingError> {
        edge_indices.sort_unstable();
        let mut covered = vec![false; g.n()];
        for &i in &edge_indices {
            let e = g.edges().get(i).ok_or(MatchingError::EdgeOutOfRange(i))?;
            for x in [e.u(), e.v()] {
                if covered[x] {
                    return Err(MatchingError::DoublyCovered(x));
                }
                covered[x] = true;
            }
        }
        if let Some(x) = covered.iter().position(|&c| !c) {
            return Err(MatchingError::Uncovered(x));
        }
        Ok(PerfectMatching { edge_indices })
    }

    pub fn edge_indices(&self) -> &[usize] {
        &self.edge_indices
    }

    pub fn len(&self) -> usize {
        self.edge_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edge_indices.is_empty()
    }
}

/// Calls `visit` with the edge indices (in branching order) of every perfect
/// matching of `g`.
///
/// Panics if `g` has more than [`MAX_VERTICES`] vertices.
pub fn for_each_perfect_matching<W: Weight>(g: &Multigraph<W>, mut visit: impl FnMut(&[usize])) {
    let n = g.n();
    assert!(n <= MAX_VERTICES, "perfect-matching enumeration supports at most {MAX_VERTICES} vertices");
    if n % 2 == 1 {
        return;
    }
    let inc = g.incidence();
    if inc.iter().any(|l| l.is_empty()) {
        return;
    }
    let full: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let ends: Vec<(usize, usize)> = g.edges().iter().map(|e| e.endpoints()).collect();
    let mut stack = Vec::with_capacity(n / 2);
    branch(&inc, &ends, 0, full, &mut stack, &mut visit);
}

fn branch(
    inc: &[Vec<usize>],
    ends: &[(usize, usize)],
    covered: u64,
    full: u64,
    stack: &mut Vec<usize>,
    visit: &mut impl FnMut(&[usize]),
) {
    if covered == full {
        visit(stack);
        return;
    }
    let v = (!covered).trailing_zeros() as usize;
    for &ei in &inc[v] {
        let (a, b) = ends[ei];
        let o = if a == v { b } else { a };
        if covered & (1u64 << o) == 0 {
            stack.push(ei);
            branch(inc, ends, covered | (1u64 << v) | (1u64 << o), full, stack, visit);
            stack.pop();
        }
    }
}

/// All perfect matchings of `g`. An odd vertex count gives none; the empty
/// graph has exactly one, the empty matching.
pub fn enumerate_perfect_matchings<W: Weight>(g: &Multigraph<W>) -> Vec<PerfectMatching> {
    let mut out = Vec::new();
    for_each_perfect_matching(g, |edges| {
        let mut edge_indices = edges.to_vec();
        edge_indices.sort_unstable();
        out.push(PerfectMatching { edge_indices });
    });
    out
}

fn product<W: Weight>(g: &Multigraph<W>, edges: &[usize]) -> W {
    edges
        .iter()
        .fold(W::one(), |acc, &i| acc * g.edge(i).weight().clone())
}

fn colouring_of<W: Weight>(g: &Multigraph<W>, edges: &[usize]) -> VertexColouring {
    let mut colours = vec![Colour(0); g.n()];
    for &i in edges {
        let e = g.edge(i);
        colours[e.u()] = e.cu();
        colours[e.v()] = e.cv();
    }
    VertexColouring::new(colours)
}

/// Product of the edge weights of `m`.
pub fn matching_weight<W: Weight>(g: &Multigraph<W>, m: &PerfectMatching) -> Result<W, MatchingError> {
    let m = PerfectMatching::new(g, m.edge_indices.clone())?;
    Ok(product(g, &m.edge_indices))
}

/// The colouring giving each vertex the colour of its matched half-edge.
pub fn induced_colouring<W: Weight>(
    g: &Multigraph<W>,
    m: &PerfectMatching,
) -> Result<VertexColouring, MatchingError> {
    let m = PerfectMatching::new(g, m.edge_indices.clone())?;
    Ok(colouring_of(g, &m.edge_indices))
}

/// Keeps exactly the edges whose half colours agree with `vc` at both ends.
///
/// Panics if `vc` does not cover every vertex of `g`.
pub fn filter<W: Weight>(g: &Multigraph<W>, vc: &VertexColouring) -> Multigraph<W> {
    assert_eq!(vc.len(), g.n(), "colouring must be total");
    g.filter_edges(|e| e.cu() == vc.get(e.u()) && e.cv() == vc.get(e.v()))
}

/// Sum of the weights of all perfect matchings.
pub fn graph_weight<W: Weight>(g: &Multigraph<W>) -> W {
    let mut total = W::zero();
    for_each_perfect_matching(g, |edges| {
        total = total.clone() + product(g, edges);
    });
    total
}

/// Weight of the subgraph filtered out by `vc`; zero when infeasible.
pub fn colouring_weight<W: Weight>(g: &Multigraph<W>, vc: &VertexColouring) -> W {
    graph_weight(&filter(g, vc))
}

/// Weight of a colouring together with how many perfect matchings induce it.
#[derive(Clone, Debug, PartialEq)]
pub struct ColouringEvaluation<W> {
    pub weight: W,
    pub matchings: usize,
}

impl<W: Weight> ColouringEvaluation<W> {
    /// At least one perfect matching survives the filter.
    pub fn is_feasible(&self) -> bool {
        self.matchings > 0
    }

    /// Feasible, yet the matchings cancel to exactly zero.
    pub fn is_cancelled(&self) -> bool {
        self.is_feasible() && self.weight.is_zero()
    }
}

pub fn evaluate_colouring<W: Weight>(g: &Multigraph<W>, vc: &VertexColouring) -> ColouringEvaluation<W> {
    let f = filter(g, vc);
    let mut weight = W::zero();
    let mut matchings = 0;
    for_each_perfect_matching(&f, |edges| {
        weight = weight.clone() + product(&f, edges);
        matchings += 1;
    });
    ColouringEvaluation { weight, matchings }
}

/// Weight of every feasible colouring, keyed by colouring.
#[derive(Clone, Debug, PartialEq)]
pub struct ColouringWeightTable<W> {
    entries: BTreeMap<VertexColouring, ColouringEvaluation<W>>,
}

impl<W: Weight> ColouringWeightTable<W> {
    /// Weight of `vc`, zero when no perfect matching induces it.
    pub fn weight(&self, vc: &VertexColouring) -> W {
        self.entries.get(vc).map(|e| e.weight.clone()).unwrap_or_else(W::zero)
    }

    pub fn get(&self, vc: &VertexColouring) -> Option<&ColouringEvaluation<W>> {
        self.entries.get(vc)
    }

    pub fn is_feasible(&self, vc: &VertexColouring) -> bool {
        self.entries.contains_key(vc)
    }

    /// Feasible colourings in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (&VertexColouring, &W)> {
        self.entries.iter().map(|(k, v)| (k, &v.weight))
    }

    pub fn evaluations(&self) -> impl Iterator<Item = (&VertexColouring, &ColouringEvaluation<W>)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Sum over all entries; equals the graph weight.
    pub fn total(&self) -> W {
        self.entries
            .values()
            .fold(W::zero(), |acc, e| acc + e.weight.clone())
    }
}

/// Groups perfect-matching weights by the colouring each matching induces.
/// Entries whose matchings cancel to zero are retained.
pub fn colouring_weight_table<W: Weight>(g: &Multigraph<W>) -> ColouringWeightTable<W> {
    let mut entries: BTreeMap<VertexColouring, ColouringEvaluation<W>> = BTreeMap::new();
    for_each_perfect_matching(g, |edges| {
        let w = product(g, edges);
        let entry = entries
            .entry(colouring_of(g, edges))
            .or_insert_with(|| ColouringEvaluation { weight: W::zero(), matchings: 0 });
        entry.weight = entry.weight.clone() + w;
        entry.matchings += 1;
    });
    ColouringWeightTable { entries }
}
