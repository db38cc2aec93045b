//! Matching-covered subgraphs, vertex connectivity, small vertex cuts and
//! the coloured-square factorisation of colouring weights across a 2-cut.

use std::collections::{BTreeSet, VecDeque};

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{Colour, Multigraph, VertexColouring, Weight};
use crate::matching::{colouring_weight, for_each_perfect_matching};
use crate::rational::GaussianRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("blocks do not partition the vertex set: {0}")]
    NotAPartition(String),
    #[error("edge {0}-{1} joins the two sides")]
    CrossingEdge(usize, usize),
    #[error("block {0} must have {1} size")]
    WrongParity(&'static str, &'static str),
    #[error("block {0} must be non-empty")]
    EmptyBlock(&'static str),
}

/// Removes every edge that lies in no perfect matching.
pub fn mcg<W: Weight>(g: &Multigraph<W>) -> Multigraph<W> {
    let mut used = vec![false; g.edges().len()];
    for_each_perfect_matching(g, |edges| {
        for &i in edges {
            used[i] = true;
        }
    });
    let mut idx = 0;
    g.filter_edges(|_| {
        let keep = used[idx];
        idx += 1;
        keep
    })
}

/// Every edge lies in some perfect matching.
pub fn is_matching_covered<W: Weight>(g: &Multigraph<W>) -> bool {
    mcg(g).edges().len() == g.edges().len()
}

/// Vertex connectivity of the skeleton: `n - 1` for complete skeletons,
/// otherwise the minimum over non-adjacent pairs of the number of internally
/// vertex-disjoint paths between them.
pub fn vertex_connectivity<W: Weight>(g: &Multigraph<W>) -> usize {
    let n = g.n();
    if n <= 1 {
        return 0;
    }
    let adj = g.neighbours();
    let mut best = n - 1;
    for s in 0..n {
        for t in s + 1..n {
            if adj[s].contains(&t) {
                continue;
            }
            best = best.min(disjoint_paths(&adj, s, t, best));
            if best == 0 {
                return 0;
            }
        }
    }
    best
}

/// Max flow between `s` and `t` in the vertex-split network, stopping once
/// `limit` is reached.
fn disjoint_paths(adj: &[BTreeSet<usize>], s: usize, t: usize, limit: usize) -> usize {
    // Vertex x becomes x_in = 2x and x_out = 2x + 1 with unit capacity
    // between them; graph edges become infinite-capacity arcs out -> in.
    let n = adj.len();
    let size = 2 * n;
    let big = n as i64 + 1;
    let mut cap = vec![vec![0i64; size]; size];
    for x in 0..n {
        cap[2 * x][2 * x + 1] = if x == s || x == t { big } else { 1 };
        for &y in &adj[x] {
            cap[2 * x + 1][2 * y] = big;
        }
    }
    let (src, sink) = (2 * s + 1, 2 * t);
    let mut flow = 0;
    while flow < limit {
        let mut prev = vec![usize::MAX; size];
        prev[src] = src;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            if x == sink {
                break;
            }
            for y in 0..size {
                if prev[y] == usize::MAX && cap[x][y] > 0 {
                    prev[y] = x;
                    queue.push_back(y);
                }
            }
        }
        if prev[sink] == usize::MAX {
            break;
        }
        let mut y = sink;
        while y != src {
            let x = prev[y];
            cap[x][y] -= 1;
            cap[y][x] += 1;
            y = x;
        }
        flow += 1;
    }
    flow
}

/// Connected components of the skeleton with `removed` deleted, ordered by
/// smallest vertex.
pub fn components_without<W: Weight>(g: &Multigraph<W>, removed: &BTreeSet<usize>) -> Vec<BTreeSet<usize>> {
    let adj = g.neighbours();
    let mut seen = vec![false; g.n()];
    let mut out = Vec::new();
    for start in 0..g.n() {
        if seen[start] || removed.contains(&start) {
            continue;
        }
        let mut comp = BTreeSet::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(x) = stack.pop() {
            comp.insert(x);
            for &y in &adj[x] {
                if !seen[y] && !removed.contains(&y) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        out.push(comp);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Odd,
    Even,
}

impl Parity {
    pub fn of(len: usize) -> Parity {
        if len % 2 == 1 {
            Parity::Odd
        } else {
            Parity::Even
        }
    }
}

/// A vertex cut `s` with the rest of the vertices split into `v1` and `v2`,
/// no edge joining `v1` to `v2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CutSpec {
    pub s: BTreeSet<usize>,
    pub v1: BTreeSet<usize>,
    pub v2: BTreeSet<usize>,
    /// Parity of `|v1|`.
    pub parity: Parity,
}

impl CutSpec {
    pub fn new<W: Weight>(
        g: &Multigraph<W>,
        s: BTreeSet<usize>,
        v1: BTreeSet<usize>,
        v2: BTreeSet<usize>,
    ) -> Result<CutSpec, StructureError> {
        check_partition(g.n(), &[&s, &v1, &v2])?;
        if v1.is_empty() {
            return Err(StructureError::EmptyBlock("V1"));
        }
        if v2.is_empty() {
            return Err(StructureError::EmptyBlock("V2"));
        }
        check_no_crossing(g, &v1, &v2)?;
        let parity = Parity::of(v1.len());
        Ok(CutSpec { s, v1, v2, parity })
    }

    /// Cut vertices in increasing order, `u_1 < u_2 < u_3`.
    pub fn cut_vertices(&self) -> Vec<usize> {
        self.s.iter().copied().collect()
    }
}

fn check_partition(n: usize, blocks: &[&BTreeSet<usize>]) -> Result<(), StructureError> {
    let mut seen = vec![false; n];
    for b in blocks {
        for &x in b.iter() {
            if x >= n {
                return Err(StructureError::NotAPartition(format!("vertex {x} out of range")));
            }
            if seen[x] {
                return Err(StructureError::NotAPartition(format!("vertex {x} appears twice")));
            }
            seen[x] = true;
        }
    }
    if let Some(x) = seen.iter().position(|&s| !s) {
        return Err(StructureError::NotAPartition(format!("vertex {x} missing")));
    }
    Ok(())
}

fn check_no_crossing<W: Weight>(
    g: &Multigraph<W>,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
) -> Result<(), StructureError> {
    for e in g.edges() {
        let (x, y) = e.endpoints();
        if (a.contains(&x) && b.contains(&y)) || (a.contains(&y) && b.contains(&x)) {
            return Err(StructureError::CrossingEdge(x, y));
        }
    }
    Ok(())
}

/// Groups the components of `G - s` into the two sides, if `s` separates.
///
/// `v1` is the odd component with the smallest vertex when there is an odd
/// component, otherwise the component with the smallest vertex; `v2` is the
/// union of the rest.
pub fn cut_partition<W: Weight>(g: &Multigraph<W>, s: &BTreeSet<usize>) -> Option<CutSpec> {
    let comps = components_without(g, s);
    if comps.len() < 2 {
        return None;
    }
    let pick = comps.iter().position(|c| c.len() % 2 == 1).unwrap_or(0);
    let v1 = comps[pick].clone();
    let v2: BTreeSet<usize> = comps
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pick)
        .flat_map(|(_, c)| c.iter().copied())
        .collect();
    let parity = Parity::of(v1.len());
    Some(CutSpec { s: s.clone(), v1, v2, parity })
}

/// `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<BTreeSet<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<BTreeSet<usize>>) {
        if cur.len() == k {
            out.push(cur.iter().copied().collect());
            return;
        }
        for x in start..n {
            if n - x < k - cur.len() {
                break;
            }
            cur.push(x);
            rec(x + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

/// The lexicographically smallest vertex cut of the given size, with its
/// sides grouped by [`cut_partition`].
pub fn find_cut<W: Weight>(g: &Multigraph<W>, size: usize) -> Option<CutSpec> {
    subsets(g.n(), size).into_iter().find_map(|s| cut_partition(g, &s))
}

/// Every size-3 cut with every grouping of the components of `G - S` into
/// an odd `V1` and a non-empty even `V2`. Ordered by `S`, then by grouping.
pub fn all_three_cuts<W: Weight>(g: &Multigraph<W>) -> Vec<CutSpec> {
    let mut out = Vec::new();
    for s in subsets(g.n(), 3) {
        let comps = components_without(g, &s);
        if comps.len() < 2 || comps.len() > 20 {
            continue;
        }
        for mask in 1u32..(1 << comps.len()) - 1 {
            let (mut v1, mut v2) = (BTreeSet::new(), BTreeSet::new());
            for (i, c) in comps.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    v1.extend(c.iter().copied());
                } else {
                    v2.extend(c.iter().copied());
                }
            }
            if v1.len() % 2 == 1 && v2.len() % 2 == 0 {
                out.push(CutSpec { s: s.clone(), v1, v2, parity: Parity::Odd });
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Solidity {
    Solid,
    Fragile,
}

/// Four factors of a colouring weight across a 2-cut: the total is
/// `h + v` with `h = h_t · h_b` and `v = v_l · v_r`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareDecomposition {
    pub h: GaussianRational,
    pub v: GaussianRational,
    pub h_t: GaussianRational,
    pub h_b: GaussianRational,
    pub v_l: GaussianRational,
    pub v_r: GaussianRational,
    pub solidity: Solidity,
}

impl SquareDecomposition {
    fn from_factors(
        h_t: GaussianRational,
        h_b: GaussianRational,
        v_l: GaussianRational,
        v_r: GaussianRational,
    ) -> Self {
        let solid = [&h_t, &h_b, &v_l, &v_r].iter().all(|x| !x.is_zero());
        SquareDecomposition {
            h: &h_t * &h_b,
            v: &v_l * &v_r,
            h_t,
            h_b,
            v_l,
            v_r,
            solidity: if solid { Solidity::Solid } else { Solidity::Fragile },
        }
    }

    pub fn total(&self) -> GaussianRational {
        &self.h + &self.v
    }
}

/// Weight of the colouring giving every vertex of each block its colour, on
/// the subgraph induced by the union of the blocks. Edges for which `drop`
/// holds (in original labels) are removed first.
fn block_weight(
    g: &Multigraph,
    blocks: &[(&BTreeSet<usize>, Colour)],
    drop: impl Fn(usize, usize) -> bool,
) -> GaussianRational {
    let vertices: BTreeSet<usize> = blocks.iter().flat_map(|(b, _)| b.iter().copied()).collect();
    let sub = g.induced_subgraph(&vertices).expect("blocks are in range");
    let graph = sub.graph.filter_edges(|e| !drop(sub.original[e.u()], sub.original[e.v()]));
    let mut colours = vec![Colour(0); graph.n()];
    for (b, c) in blocks {
        for &x in b.iter() {
            colours[sub.new_index(x).expect("retained")] = *c;
        }
    }
    colouring_weight(&graph, &VertexColouring::new(colours))
}

/// Colouring `i_A j_B k_u l_v` across the 2-cut `{u, v}` with `|A|` odd.
pub fn square_decomposition_odd(
    g: &Multigraph,
    u: usize,
    v: usize,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    [i, j, k, l]: [Colour; 4],
) -> Result<SquareDecomposition, StructureError> {
    let su: BTreeSet<usize> = [u].into();
    let sv: BTreeSet<usize> = [v].into();
    check_partition(g.n(), &[a, b, &su, &sv])?;
    if a.len() % 2 == 0 {
        return Err(StructureError::WrongParity("A", "odd"));
    }
    check_no_crossing(g, a, b)?;
    let none = |_: usize, _: usize| false;
    let v_l = block_weight(g, &[(a, i), (&su, k)], none);
    let v_r = block_weight(g, &[(b, j), (&sv, l)], none);
    let h_t = block_weight(g, &[(b, j), (&su, k)], none);
    let h_b = block_weight(g, &[(a, i), (&sv, l)], none);
    Ok(SquareDecomposition::from_factors(h_t, h_b, v_l, v_r))
}

/// Colouring `i_A j_B k_U` across the 2-cut `U = {u, v}` with `|A|` even.
/// The `A`-side factor `v_l` excludes every direct `u-v` edge; `h_t` keeps
/// them.
pub fn square_decomposition_even(
    g: &Multigraph,
    u: usize,
    v: usize,
    a: &BTreeSet<usize>,
    b: &BTreeSet<usize>,
    [i, j, k]: [Colour; 3],
) -> Result<SquareDecomposition, StructureError> {
    let cut: BTreeSet<usize> = [u, v].into();
    if u == v {
        return Err(StructureError::NotAPartition("u = v".into()));
    }
    check_partition(g.n(), &[a, b, &cut])?;
    if a.len() % 2 == 1 {
        return Err(StructureError::WrongParity("A", "even"));
    }
    check_no_crossing(g, a, b)?;
    let none = |_: usize, _: usize| false;
    let is_uv = |x: usize, y: usize| (x == u && y == v) || (x == v && y == u);
    let v_l = block_weight(g, &[(a, i), (&cut, k)], is_uv);
    let v_r = block_weight(g, &[(b, j)], none);
    let h_t = block_weight(g, &[(b, j), (&cut, k)], none);
    let h_b = block_weight(g, &[(a, i)], none);
    Ok(SquareDecomposition::from_factors(h_t, h_b, v_l, v_r))
}
