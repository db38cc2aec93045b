//! GHZ and g-GHZ verification, dimension, rescaling of g-GHZ weights, and
//! the search for a non-monochromatic perfect matching.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Colour, FloatGraph, Multigraph, VertexColouring, Weight};
use crate::matching::{colouring_weight_table, enumerate_perfect_matchings, for_each_perfect_matching, PerfectMatching};
use crate::rational::GaussianRational;

pub const DEFAULT_EPSILON: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GhzError {
    #[error("not a (g-)GHZ graph")]
    NotGGhz,
    #[error("colour {0} has zero monochromatic weight but carries a non-zero perfect matching")]
    UnscalableColour(Colour),
    #[error("hypothesis not satisfied: {0}")]
    HypothesisNotSatisfied(String),
    #[error("invariant failure: {0}")]
    InvariantFailure(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// A non-monochromatic colouring with non-zero weight.
    NonMonochromatic,
    /// A monochromatic colouring whose non-zero weight is not 1.
    MonochromaticNotOne,
    /// A feasible monochromatic colouring whose matchings cancel to 0.
    MonochromaticCancelled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation<W> {
    pub colouring: VertexColouring,
    pub weight: W,
    pub kind: ViolationKind,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GhzVerdict<W = GaussianRational> {
    pub is_ghz: bool,
    pub is_g_ghz: bool,
    /// Monochromatic colourings with non-zero weight.
    pub dimension: usize,
    pub violations: Vec<Violation<W>>,
}

/// How feasible monochromatic colourings that cancel to weight 0 are judged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Feasibility {
    /// Treated like infeasible colourings: not counted, not a violation.
    #[default]
    Lenient,
    /// Reported as violations of both the GHZ and the g-GHZ conditions.
    Strict,
}

/// Exact verification with cancelled monochromatic colourings treated
/// leniently.
pub fn verify(g: &Multigraph) -> GhzVerdict {
    verify_with(g, Feasibility::Lenient)
}

pub fn verify_with(g: &Multigraph, mode: Feasibility) -> GhzVerdict {
    verify_by(g, mode, |w| w.is_zero(), |w| w.is_one())
}

/// Verification of a float-weighted graph: weights within `epsilon` of 0 (or
/// of 1) count as 0 (or 1).
pub fn verify_numeric(g: &FloatGraph, epsilon: f64, mode: Feasibility) -> GhzVerdict<Complex64> {
    verify_by(g, mode, |w| w.norm() < epsilon, |w| (w - Complex64::one()).norm() < epsilon)
}

fn verify_by<W: Weight>(
    g: &Multigraph<W>,
    mode: Feasibility,
    is_zero: impl Fn(&W) -> bool,
    is_one: impl Fn(&W) -> bool,
) -> GhzVerdict<W> {
    let table = colouring_weight_table(g);
    let mut violations = Vec::new();
    let mut mono_not_one = false;
    let mut cancelled = false;
    for (vc, eval) in table.evaluations() {
        if !vc.is_monochromatic() && !is_zero(&eval.weight) {
            violations.push(Violation {
                colouring: vc.clone(),
                weight: eval.weight.clone(),
                kind: ViolationKind::NonMonochromatic,
            });
        }
    }
    let non_mono = !violations.is_empty();
    let mut dimension = 0;
    for &c in g.colour_universe() {
        let vc = VertexColouring::monochromatic(g.n(), c);
        let Some(eval) = table.get(&vc) else { continue };
        if is_zero(&eval.weight) {
            if mode == Feasibility::Strict {
                cancelled = true;
                violations.push(Violation {
                    colouring: vc,
                    weight: eval.weight.clone(),
                    kind: ViolationKind::MonochromaticCancelled,
                });
            }
            continue;
        }
        dimension += 1;
        if !is_one(&eval.weight) {
            mono_not_one = true;
            violations.push(Violation {
                colouring: vc,
                weight: eval.weight.clone(),
                kind: ViolationKind::MonochromaticNotOne,
            });
        }
    }
    let is_g_ghz = !non_mono && !cancelled;
    GhzVerdict {
        is_ghz: is_g_ghz && !mono_not_one,
        is_g_ghz,
        dimension,
        violations,
    }
}

/// Number of monochromatic colourings with non-zero weight of a g-GHZ graph.
pub fn dimension(g: &Multigraph) -> Result<usize, GhzError> {
    let v = verify(g);
    if v.is_g_ghz {
        Ok(v.dimension)
    } else {
        Err(GhzError::NotGGhz)
    }
}

/// `W(i)`, the weight of the monochromatic colouring of every colour in the
/// universe.
pub fn mono_weights<W: Weight>(g: &Multigraph<W>) -> BTreeMap<Colour, W> {
    let table = colouring_weight_table(g);
    g.colour_universe()
        .iter()
        .map(|&c| (c, table.weight(&VertexColouring::monochromatic(g.n(), c))))
        .collect()
}

/// Rescaled graph and its numeric verdict.
#[derive(Clone, Debug)]
pub struct Scaled {
    pub graph: FloatGraph,
    pub verdict: GhzVerdict<Complex64>,
    /// `s_i` applied to every half of colour `i`.
    pub factors: BTreeMap<Colour, Complex64>,
}

/// Turns a g-GHZ graph into a GHZ graph of the same dimension.
///
/// Every half of colour `i` contributes the factor
/// `s_i = exp(-Log W(i) / n)` (principal branch), so an edge with half colours
/// `(i, j)` is multiplied by `s_i · s_j` and each monochromatic colouring ends
/// up multiplied by `s_i^n = W(i)^{-1}`. A colour with `W(i) = 0` gets
/// `s_i = 1`, which is only allowed when no non-zero perfect matching uses an
/// edge with a half of that colour.
pub fn scale_to_ghz(g: &Multigraph, epsilon: f64) -> Result<Scaled, GhzError> {
    if !verify(g).is_g_ghz {
        return Err(GhzError::NotGGhz);
    }
    let n = g.n();
    let weights = mono_weights(g);
    let zero_colours: BTreeSet<Colour> = weights.iter().filter(|(_, w)| w.is_zero()).map(|(&c, _)| c).collect();
    if !zero_colours.is_empty() {
        let mut live = vec![false; g.edges().len()];
        for_each_perfect_matching(g, |edges| {
            let w: GaussianRational = edges.iter().map(|&i| g.edge(i).weight().clone()).product();
            if !w.is_zero() {
                for &i in edges {
                    live[i] = true;
                }
            }
        });
        for (i, e) in g.edges().iter().enumerate() {
            if !live[i] {
                continue;
            }
            for c in [e.cu(), e.cv()] {
                if zero_colours.contains(&c) {
                    return Err(GhzError::UnscalableColour(c));
                }
            }
        }
    }
    let factors: BTreeMap<Colour, Complex64> = weights
        .iter()
        .map(|(&c, w)| {
            let s = if w.is_zero() || n == 0 {
                Complex64::one()
            } else {
                (-w.to_complex64().ln() / n as f64).exp()
            };
            (c, s)
        })
        .collect();
    let graph = g.map_weights(|e| e.weight().to_complex64() * factors[&e.cu()] * factors[&e.cv()]);
    let verdict = verify_numeric(&graph, epsilon, Feasibility::Lenient);
    if !verdict.is_ghz {
        return Err(GhzError::InvariantFailure(format!(
            "rescaled graph is not GHZ within {epsilon}: {} violations",
            verdict.violations.len()
        )));
    }
    Ok(Scaled { graph, verdict, factors })
}

/// A perfect matching inducing a non-monochromatic colouring, for graphs on
/// more than four vertices with monochromatic perfect matchings in at least
/// three distinct colours. Only the presence of edges matters, not weights.
pub fn find_bogdanov_witness<W: Weight>(g: &Multigraph<W>) -> Result<PerfectMatching, GhzError> {
    if g.n() <= 4 {
        return Err(GhzError::HypothesisNotSatisfied(format!("{} vertices, need more than 4", g.n())));
    }
    let mut mono_colours = BTreeSet::new();
    let mut witness = None;
    for m in enumerate_perfect_matchings(g) {
        let edges: Vec<_> = m.edge_indices().iter().map(|&i| g.edge(i)).collect();
        let first = edges[0].cu();
        if edges.iter().all(|e| e.cu() == first && e.cv() == first) {
            mono_colours.insert(first);
        } else if witness.is_none() {
            witness = Some(m);
        }
    }
    if mono_colours.len() < 3 {
        return Err(GhzError::HypothesisNotSatisfied(format!(
            "monochromatic perfect matchings in {} colours, need 3",
            mono_colours.len()
        )));
    }
    witness.ok_or_else(|| GhzError::InvariantFailure("no non-monochromatic perfect matching".into()))
}

/// True when, after merging parallel classes and dropping zero edges, every
/// pair of vertices is joined by exactly one edge.
pub fn has_unique_nonzero_edges(g: &Multigraph) -> bool {
    let h = g.merge_parallel_edges().drop_zero_edges();
    let n = h.n();
    let mut count = vec![vec![0usize; n]; n];
    for e in h.edges() {
        count[e.u()][e.v()] += 1;
    }
    (0..n).all(|a| (a + 1..n).all(|b| count[a][b] == 1))
}
