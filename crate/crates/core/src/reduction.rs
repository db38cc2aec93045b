//! Reduction across a vertex cut of size 3.
//!
//! With `S = {u_1, u_2, u_3}` separating an odd side `V1` from an even side
//! `V2`, every perfect matching sends either all three cut vertices into `V1`
//! (type 0) or exactly one, `u_t` (type `t`). Grouping matchings this way
//! splits every colouring weight into four products of side weights, which
//! lets `V2` be folded into new edges inside `S` (or, when no type-0 matching
//! meets a non-zero monochromatic `V2` weight, lets the whole graph collapse
//! onto four vertices).

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::ghz::{scale_to_ghz, verify, GhzError, GhzVerdict, Scaled, DEFAULT_EPSILON};
use crate::graph::{Colour, Edge, Multigraph, VertexColouring};
use crate::matching::{colouring_weight, colouring_weight_table, ColouringWeightTable};
use crate::rational::GaussianRational;
use crate::structure::{all_three_cuts, find_cut, vertex_connectivity, CutSpec, StructureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReductionError {
    #[error("graph has {0} vertices, reduction needs more than 4")]
    TooSmall(usize),
    #[error("irreducible: no vertex cut of size 3 (vertex connectivity {0})")]
    Irreducible(usize),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("easy case inapplicable: C1 = {0:?} is non-empty")]
    EasyInapplicable(BTreeSet<Colour>),
    #[error("hard case inapplicable: C1 is empty, use the easy case")]
    HardInapplicable,
    #[error("colouring has length {got}, graph has {expected} vertices")]
    ColouringLength { expected: usize, got: usize },
    #[error("internal invariant failure: {0}")]
    InvariantFailure(String),
    #[error(transparent)]
    Ghz(#[from] GhzError),
}

impl From<StructureError> for ReductionError {
    fn from(e: StructureError) -> Self {
        ReductionError::InvalidCut(e.to_string())
    }
}

/// The four type weights of one colouring on each side of the cut.
///
/// Index 0 is type 0; index `t` is the type where only `u_t` is matched into
/// `V1`.
#[derive(Clone, Debug, PartialEq)]
pub struct TypeWeights {
    /// `W_t`: weights on the `V1` side.
    pub v1_side: [GaussianRational; 4],
    /// `W_t'`: weights on the `V2` side.
    pub v2_side: [GaussianRational; 4],
}

impl TypeWeights {
    /// `sum_t W_t W_t'`, the weight of the colouring on the whole graph.
    pub fn total(&self) -> GaussianRational {
        self.v1_side.iter().zip(&self.v2_side).map(|(a, b)| a * b).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColourClassification {
    pub c1: BTreeSet<Colour>,
    pub c2: BTreeSet<Colour>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ReductionCase {
    Easy,
    Hard,
}

fn check_cut(g: &Multigraph, cut: &CutSpec) -> Result<(), ReductionError> {
    CutSpec::new(g, cut.s.clone(), cut.v1.clone(), cut.v2.clone())?;
    if cut.s.len() != 3 {
        return Err(ReductionError::InvalidCut(format!("cut has {} vertices, need 3", cut.s.len())));
    }
    if cut.v1.len() % 2 == 0 {
        return Err(ReductionError::InvalidCut("V1 must be odd".into()));
    }
    Ok(())
}

/// Induced subgraph on `vertices` with the edges inside `drop` removed, plus a
/// way to translate colourings into its indices.
struct Part {
    graph: Multigraph,
    original: Vec<usize>,
}

impl Part {
    fn new(g: &Multigraph, vertices: &BTreeSet<usize>, drop: &BTreeSet<usize>) -> Part {
        let sub = g.induced_subgraph(vertices).expect("vertices in range");
        let original = sub.original;
        let graph = sub
            .graph
            .filter_edges(|e| !(drop.contains(&original[e.u()]) && drop.contains(&original[e.v()])));
        Part { graph, original }
    }

    fn colouring(&self, colour_of: impl Fn(usize) -> Colour) -> VertexColouring {
        VertexColouring::new(self.original.iter().map(|&o| colour_of(o)).collect())
    }

    fn weight(&self, colour_of: impl Fn(usize) -> Colour) -> GaussianRational {
        colouring_weight(&self.graph, &self.colouring(colour_of))
    }
}

fn union(a: &BTreeSet<usize>, b: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    let mut out = a.clone();
    out.extend(b);
    out
}

/// Type weights of the full colouring `vc_full`.
pub fn type_weights(g: &Multigraph, cut: &CutSpec, vc_full: &VertexColouring) -> Result<TypeWeights, ReductionError> {
    check_cut(g, cut)?;
    if vc_full.len() != g.n() {
        return Err(ReductionError::ColouringLength { expected: g.n(), got: vc_full.len() });
    }
    let none = BTreeSet::new();
    let at = |v: usize| vc_full.get(v);
    let u = cut.cut_vertices();
    let mut v1_side: [GaussianRational; 4] = Default::default();
    let mut v2_side: [GaussianRational; 4] = Default::default();
    v1_side[0] = Part::new(g, &union(&cut.v1, u.iter().copied()), &cut.s).weight(at);
    v2_side[0] = Part::new(g, &cut.v2, &none).weight(at);
    for t in 0..3 {
        v1_side[t + 1] = Part::new(g, &union(&cut.v1, [u[t]]), &none).weight(at);
        let rest = u.iter().copied().filter(|&x| x != u[t]);
        v2_side[t + 1] = Part::new(g, &union(&cut.v2, rest), &none).weight(at);
    }
    Ok(TypeWeights { v1_side, v2_side })
}

/// `W(c_{V2})` for every colour of the universe.
pub fn v2_mono_weights(g: &Multigraph, cut: &CutSpec) -> BTreeMap<Colour, GaussianRational> {
    let part = Part::new(g, &cut.v2, &BTreeSet::new());
    g.colour_universe().iter().map(|&c| (c, part.weight(|_| c))).collect()
}

/// `C1` holds the colours `c` with `W0'(c_{V2}) != 0` when some type-0
/// weight on `V1 + S` is non-zero; `C2` holds the rest.
pub fn classify_colours(g: &Multigraph, cut: &CutSpec) -> Result<ColourClassification, ReductionError> {
    check_cut(g, cut)?;
    let type0 = Part::new(g, &union(&cut.v1, cut.s.iter().copied()), &cut.s);
    let any_type0 = colouring_weight_table(&type0.graph).iter().any(|(_, w)| !w.is_zero());
    let mut c1 = BTreeSet::new();
    let mut c2 = BTreeSet::new();
    for (c, w) in v2_mono_weights(g, cut) {
        if any_type0 && !w.is_zero() {
            c1.insert(c);
        } else {
            c2.insert(c);
        }
    }
    Ok(ColourClassification { c1, c2 })
}

/// `W(c_{V2} p_{u_i} q_{u_j})` on `G[V2 + {u_i, u_j}]`, with the direct
/// `u_i u_j` edges included.
struct PairWeights {
    part: Part,
    table: ColouringWeightTable<GaussianRational>,
    ui: usize,
    uj: usize,
}

impl PairWeights {
    fn new(g: &Multigraph, cut: &CutSpec, ui: usize, uj: usize) -> PairWeights {
        let part = Part::new(g, &union(&cut.v2, [ui, uj]), &BTreeSet::new());
        let table = colouring_weight_table(&part.graph);
        PairWeights { part, table, ui, uj }
    }

    fn get(&self, c: Colour, p: Colour, q: Colour) -> GaussianRational {
        let vc = self.part.colouring(|v| if v == self.ui { p } else if v == self.uj { q } else { c });
        self.table.weight(&vc)
    }
}

/// Collapses `g` onto `K4`-shaped vertices `v0 = V1` and `v1, v2, v3 = u_1,
/// u_2, u_3`, with one edge per ordered colour pair and vertex pair.
///
/// Every colouring `(i, j, k, l)` of the result weighs
/// `sum_c w(i_{V1} j_{u_1} k_{u_2} l_{u_3} c_{V2})`; this is checked before
/// parallel edges are merged and zero edges dropped.
pub fn reduce_easy(g: &Multigraph, cut: &CutSpec) -> Result<Multigraph, ReductionError> {
    let class = classify_colours(g, cut)?;
    if !class.c1.is_empty() {
        return Err(ReductionError::EasyInapplicable(class.c1));
    }
    let universe: Vec<Colour> = g.colour_universe().iter().copied().collect();
    let u = cut.cut_vertices();
    let mut gp: Multigraph = Multigraph::empty(4, universe.iter().copied());
    for (i, &ui) in u.iter().enumerate() {
        let part = Part::new(g, &union(&cut.v1, [ui]), &BTreeSet::new());
        let table = colouring_weight_table(&part.graph);
        for &p in &universe {
            for &q in &universe {
                let w = table.weight(&part.colouring(|v| if v == ui { q } else { p }));
                gp.add_edge(0, i + 1, p.0, q.0, w).expect("valid edge");
            }
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            let pair = PairWeights::new(g, cut, u[i], u[j]);
            for &p in &universe {
                for &q in &universe {
                    let w: GaussianRational = class.c2.iter().map(|&c| pair.get(c, p, q)).sum();
                    gp.add_edge(i + 1, j + 1, p.0, q.0, w).expect("valid edge");
                }
            }
        }
    }

    let v1: Vec<usize> = cut.v1.iter().copied().collect();
    let v2: Vec<usize> = cut.v2.iter().copied().collect();
    let mut expected: BTreeMap<VertexColouring, GaussianRational> = BTreeMap::new();
    for (vc, w) in colouring_weight_table(g).iter() {
        let (Some(a), Some(_)) = (vc.restrict(&v1).mono_colour(), vc.restrict(&v2).mono_colour()) else {
            continue;
        };
        let key = VertexColouring::new(vec![a, vc.get(u[0]), vc.get(u[1]), vc.get(u[2])]);
        *expected.entry(key).or_default() += w;
    }
    check_identity(&gp, expected, "easy-case colouring identity")?;
    Ok(gp.merge_parallel_edges().drop_zero_edges())
}

/// Replaces `V2` by weighted edges inside `S`. The result lives on `V1 + S`,
/// relabelled in increasing original order.
///
/// Edges touching `V1` are kept as they are; the edges inside `S` are replaced
/// by one edge per ordered colour pair `(p, q)` of weight
/// `sum_{C2} W(c p q) + 1/|C1| sum_{C1} W(c p q) / W(c_{V2})`. Every colouring
/// `vc'` of the result then weighs
/// `sum_{C2} w(vc(c)) + 1/|C1| sum_{C1} w(vc(c)) / w(c_{V2})`, which is
/// checked before parallel edges are merged and zero edges dropped.
pub fn reduce_hard(g: &Multigraph, cut: &CutSpec) -> Result<Multigraph, ReductionError> {
    let class = classify_colours(g, cut)?;
    if class.c1.is_empty() {
        return Err(ReductionError::HardInapplicable);
    }
    let v2_weights = v2_mono_weights(g, cut);
    let c1_size = GaussianRational::from(class.c1.len() as i64);
    let mut coefficient: BTreeMap<Colour, GaussianRational> = BTreeMap::new();
    for &c in &class.c2 {
        coefficient.insert(c, GaussianRational::from(1));
    }
    for &c in &class.c1 {
        let inv = (&c1_size * &v2_weights[&c])
            .recip()
            .ok_or_else(|| ReductionError::InvariantFailure(format!("W({c:?}_V2) is zero for a C1 colour")))?;
        coefficient.insert(c, inv);
    }

    let keep = union(&cut.v1, cut.s.iter().copied());
    let sub = g.induced_subgraph(&keep).expect("vertices in range");
    let u = cut.cut_vertices();
    let new_u: Vec<usize> = u.iter().map(|&x| sub.new_index(x).expect("cut vertex kept")).collect();
    let s_new: BTreeSet<usize> = new_u.iter().copied().collect();
    let mut gp = sub
        .graph
        .filter_edges(|e| !(s_new.contains(&e.u()) && s_new.contains(&e.v())));
    let universe: Vec<Colour> = g.colour_universe().iter().copied().collect();
    for i in 0..3 {
        for j in i + 1..3 {
            let pair = PairWeights::new(g, cut, u[i], u[j]);
            for &p in &universe {
                for &q in &universe {
                    let w: GaussianRational =
                        coefficient.iter().map(|(&c, k)| pair.get(c, p, q) * k).sum();
                    gp.add_edge(new_u[i], new_u[j], p.0, q.0, w).expect("valid edge");
                }
            }
        }
    }

    let v2: Vec<usize> = cut.v2.iter().copied().collect();
    let kept: Vec<usize> = sub.original.clone();
    let mut expected: BTreeMap<VertexColouring, GaussianRational> = BTreeMap::new();
    for (vc, w) in colouring_weight_table(g).iter() {
        let Some(c) = vc.restrict(&v2).mono_colour() else { continue };
        *expected.entry(vc.restrict(&kept)).or_default() += w * &coefficient[&c];
    }
    check_identity(&gp, expected, "hard-case colouring identity")?;
    Ok(gp.merge_parallel_edges().drop_zero_edges())
}

fn check_identity(
    gp: &Multigraph,
    mut expected: BTreeMap<VertexColouring, GaussianRational>,
    what: &str,
) -> Result<(), ReductionError> {
    expected.retain(|_, w| !w.is_zero());
    let actual: BTreeMap<VertexColouring, GaussianRational> = colouring_weight_table(gp)
        .iter()
        .filter(|(_, w)| !w.is_zero())
        .map(|(vc, w)| (vc.clone(), w.clone()))
        .collect();
    if actual == expected {
        Ok(())
    } else {
        let bad = actual
            .keys()
            .chain(expected.keys())
            .find(|vc| actual.get(*vc) != expected.get(*vc))
            .expect("maps differ");
        Err(ReductionError::InvariantFailure(format!("{what} fails at {bad}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceOptions {
    /// Try every size-3 cut and keep the smallest result instead of using the
    /// lexicographically first cut.
    pub all_cuts: bool,
}

#[derive(Clone, Debug)]
pub struct ReductionReport {
    pub kappa: usize,
    /// `Some(2)` when the vertex connectivity alone bounds the dimension.
    pub connectivity_bound: Option<usize>,
    pub cut: CutSpec,
    /// How many size-3 cuts were tried.
    pub cuts_tried: usize,
    pub classification: ColourClassification,
    pub case: ReductionCase,
    pub reduced: Multigraph,
    pub verdict: GhzVerdict,
    pub reduced_verdict: GhzVerdict,
    /// The rescaled result when the input was g-GHZ but the result is not GHZ.
    pub scaled: Option<Scaled>,
}

/// Reduces along one cut, picking the easy or the hard case.
pub fn reduce_along(
    g: &Multigraph,
    cut: &CutSpec,
) -> Result<(ColourClassification, ReductionCase, Multigraph), ReductionError> {
    let class = classify_colours(g, cut)?;
    if class.c1.is_empty() {
        Ok((class, ReductionCase::Easy, reduce_easy(g, cut)?))
    } else {
        Ok((class, ReductionCase::Hard, reduce_hard(g, cut)?))
    }
}

/// Full pipeline: connectivity, cut, classification, reduction, verification
/// of both graphs and rescaling of a g-GHZ result.
pub fn reduce(g: &Multigraph, options: ReduceOptions) -> Result<ReductionReport, ReductionError> {
    if g.n() <= 4 {
        return Err(ReductionError::TooSmall(g.n()));
    }
    let kappa = vertex_connectivity(g);
    let connectivity_bound = (kappa <= 2).then_some(2);
    let cuts: Vec<CutSpec> = if options.all_cuts {
        all_three_cuts(g)
    } else {
        find_cut(g, 3).into_iter().collect()
    };
    if cuts.is_empty() {
        return Err(ReductionError::Irreducible(kappa));
    }
    let cuts_tried = cuts.len();
    let mut best: Option<(CutSpec, ColourClassification, ReductionCase, Multigraph)> = None;
    for cut in cuts {
        let (class, case, reduced) = reduce_along(g, &cut)?;
        let better = match &best {
            None => true,
            Some((_, _, _, b)) => (reduced.n(), reduced.edges().len()) < (b.n(), b.edges().len()),
        };
        if better {
            best = Some((cut, class, case, reduced));
        }
    }
    let (cut, classification, case, reduced) = best.expect("at least one cut");
    let verdict = verify(g);
    let reduced_verdict = verify(&reduced);
    if verdict.is_g_ghz && (!reduced_verdict.is_g_ghz || reduced_verdict.dimension < verdict.dimension) {
        return Err(ReductionError::InvariantFailure(format!(
            "g-GHZ input of dimension {} reduced to a graph with g-GHZ {} and dimension {}",
            verdict.dimension, reduced_verdict.is_g_ghz, reduced_verdict.dimension
        )));
    }
    let scaled = if reduced_verdict.is_g_ghz && !reduced_verdict.is_ghz {
        Some(scale_to_ghz(&reduced, DEFAULT_EPSILON)?)
    } else {
        None
    };
    Ok(ReductionReport {
        kappa,
        connectivity_bound,
        cut,
        cuts_tried,
        classification,
        case,
        reduced,
        verdict,
        reduced_verdict,
        scaled,
    })
}

/// Graph from explicit `(a, b, ca, cb, w)` edges.
pub fn graph_from_edges(
    n: usize,
    universe: impl IntoIterator<Item = Colour>,
    edges: &[(usize, usize, u32, u32, GaussianRational)],
) -> Multigraph {
    let edges = edges
        .iter()
        .map(|(a, b, ca, cb, w)| Edge::new(*a, *b, Colour(*ca), Colour(*cb), w.clone()).expect("valid edge"))
        .collect();
    Multigraph::new(n, universe, edges).expect("valid graph")
}
