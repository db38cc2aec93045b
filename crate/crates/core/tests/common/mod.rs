//! Brute-force oracles and seeded instance generators shared by the
//! integration tests. The oracles only read vertices, edges and weights; they
//! do not call the library's enumeration, filtering or flow code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use ghz_graphs::{Colour, GaussianRational, Multigraph, VertexColouring, Weight};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn q(re: i64, im: i64) -> GaussianRational {
    GaussianRational::from_ratios(re, 1, im, 1)
}

/// Every perfect matching, found by checking all `n/2`-subsets of edges.
pub fn oracle_pms<W: Weight>(g: &Multigraph<W>) -> Vec<Vec<usize>> {
    let n = g.n();
    if n % 2 == 1 {
        return Vec::new();
    }
    let k = n / 2;
    let m = g.edges().len();
    let mut out = Vec::new();
    let mut pick: Vec<usize> = Vec::with_capacity(k);
    fn rec<W: Weight>(g: &Multigraph<W>, start: usize, k: usize, m: usize, pick: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if pick.len() == k {
            let mut seen = vec![false; g.n()];
            for &i in pick.iter() {
                let e = g.edge(i);
                for x in [e.u(), e.v()] {
                    if seen[x] {
                        return;
                    }
                    seen[x] = true;
                }
            }
            out.push(pick.clone());
            return;
        }
        for i in start..m {
            if m - i < k - pick.len() {
                break;
            }
            pick.push(i);
            rec(g, i + 1, k, m, pick, out);
            pick.pop();
        }
    }
    rec(g, 0, k, m, &mut pick, &mut out);
    out
}

pub fn oracle_colouring_of<W: Weight>(g: &Multigraph<W>, pm: &[usize]) -> Vec<u32> {
    let mut c = vec![u32::MAX; g.n()];
    for &i in pm {
        let e = g.edge(i);
        c[e.u()] = e.cu().0;
        c[e.v()] = e.cv().0;
    }
    c
}

pub fn oracle_product<W: Weight>(g: &Multigraph<W>, pm: &[usize]) -> W {
    pm.iter().fold(W::one(), |acc, &i| acc * g.edge(i).weight().clone())
}

/// Grouped perfect-matching weights keyed by induced colouring, with the
/// number of matchings in each group.
pub fn oracle_table<W: Weight>(g: &Multigraph<W>) -> BTreeMap<Vec<u32>, (W, usize)> {
    let mut t: BTreeMap<Vec<u32>, (W, usize)> = BTreeMap::new();
    for pm in oracle_pms(g) {
        let e = t.entry(oracle_colouring_of(g, &pm)).or_insert((W::zero(), 0));
        e.0 = e.0.clone() + oracle_product(g, &pm);
        e.1 += 1;
    }
    t
}

pub fn oracle_weight<W: Weight>(g: &Multigraph<W>, vc: &[u32]) -> W {
    oracle_table(g).remove(vc).map(|e| e.0).unwrap_or_else(W::zero)
}

pub fn oracle_graph_weight<W: Weight>(g: &Multigraph<W>) -> W {
    oracle_pms(g).iter().fold(W::zero(), |acc, pm| acc + oracle_product(g, pm))
}

/// Weight of the colouring `vc` (indexed by original vertex) on `G[vertices]`.
pub fn oracle_weight_on(g: &Multigraph, vertices: &BTreeSet<usize>, vc: &dyn Fn(usize) -> u32) -> GaussianRational {
    let sub = g.induced_subgraph(vertices).unwrap();
    let key: Vec<u32> = sub.original.iter().map(|&o| vc(o)).collect();
    oracle_weight(&sub.graph, &key)
}

fn connected_without(adj: &[BTreeSet<usize>], removed: &BTreeSet<usize>) -> bool {
    let rest: Vec<usize> = (0..adj.len()).filter(|v| !removed.contains(v)).collect();
    let Some(&start) = rest.first() else { return true };
    let mut seen = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if !removed.contains(&y) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len() == rest.len()
}

/// Vertex connectivity by trying every vertex subset in order of size.
pub fn oracle_kappa<W: Weight>(g: &Multigraph<W>) -> usize {
    let n = g.n();
    let mut adj = vec![BTreeSet::new(); n];
    for e in g.edges() {
        adj[e.u()].insert(e.v());
        adj[e.v()].insert(e.u());
    }
    for k in 0..n.saturating_sub(1) {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let removed: BTreeSet<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            if n - k >= 2 && !connected_without(&adj, &removed) {
                return k;
            }
        }
    }
    n.saturating_sub(1)
}

pub fn all_colourings(n: usize, colours: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..colours).map(move |c| {
                    let mut p = p.clone();
                    p.push(c);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn vc(colours: &[u32]) -> VertexColouring {
    VertexColouring::new(colours.iter().map(|&c| Colour(c)).collect())
}

/// Small Gaussian integer or half-integer, sometimes zero.
pub fn random_weight(r: &mut ChaCha8Rng) -> GaussianRational {
    let den = if r.gen_bool(0.25) { 2 } else { 1 };
    GaussianRational::from_ratios(r.gen_range(-2..=2), den, r.gen_range(-1..=1), 1)
}

pub fn random_nonzero_weight(r: &mut ChaCha8Rng) -> GaussianRational {
    loop {
        let w = random_weight(r);
        if w != GaussianRational::from(0) {
            return w;
        }
    }
}

/// Random multigraph on `n` vertices with `m` edges and `colours` colours.
pub fn random_multigraph(r: &mut ChaCha8Rng, n: usize, m: usize, colours: u32) -> Multigraph {
    let mut g = Multigraph::empty(n, (0..colours).map(Colour));
    for _ in 0..m {
        let a = r.gen_range(0..n);
        let mut b = r.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        let w = random_weight(r);
        g.add_edge(a, b, r.gen_range(0..colours), r.gen_range(0..colours), w).unwrap();
    }
    g
}

/// Random instance of the acceptance corpus: `n <= 8`, at most 14 edges,
/// at most 3 colours.
pub fn corpus_instance(seed: u64) -> Multigraph {
    let mut r = rng(seed);
    let n = [4, 6, 8][r.gen_range(0..3)];
    let m = r.gen_range(n..=14);
    let colours = r.gen_range(1..=3);
    random_multigraph(&mut r, n, m, colours)
}

pub struct Planted {
    pub g: Multigraph,
    pub s: BTreeSet<usize>,
    pub v1: BTreeSet<usize>,
    pub v2: BTreeSet<usize>,
}

/// Random multigraph with a planted 3-cut: an odd `V1`, the cut `S` and an
/// even non-empty `V2`, no edges between `V1` and `V2`. Vertices are shuffled.
pub fn planted_three_cut(r: &mut ChaCha8Rng, v1_len: usize, v2_len: usize, colours: u32, m: usize) -> Planted {
    let n = v1_len + 3 + v2_len;
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(r);
    let v1: BTreeSet<usize> = perm[..v1_len].iter().copied().collect();
    let s: BTreeSet<usize> = perm[v1_len..v1_len + 3].iter().copied().collect();
    let v2: BTreeSet<usize> = perm[v1_len + 3..].iter().copied().collect();
    let left: Vec<usize> = v1.iter().chain(&s).copied().collect();
    let right: Vec<usize> = v2.iter().chain(&s).copied().collect();
    let mut g = Multigraph::empty(n, (0..colours).map(Colour));
    for k in 0..m {
        let side = if k % 2 == 0 { &left } else { &right };
        let a = *side.choose(r).unwrap();
        let b = loop {
            let b = *side.choose(r).unwrap();
            if b != a {
                break b;
            }
        };
        let w = random_nonzero_weight(r);
        g.add_edge(a, b, r.gen_range(0..colours), r.gen_range(0..colours), w).unwrap();
    }
    Planted { g, s, v1, v2 }
}

/// Random perfect matching of `0..n` as vertex pairs.
pub fn random_pairing(r: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(r);
    p.chunks(2).map(|c| (c[0], c[1])).collect()
}

/// Multigraph with monochromatic perfect matchings in `k >= 3` distinct
/// colours plus a few random extra edges.
pub fn planted_mono_matchings(seed: u64) -> Multigraph {
    let mut r = rng(seed);
    let n = [6, 8, 10][r.gen_range(0..3)];
    let k = r.gen_range(3..=4u32);
    let colours = k + r.gen_range(0..=1);
    let mut g = Multigraph::empty(n, (0..colours).map(Colour));
    for c in 0..k {
        for (a, b) in random_pairing(&mut r, n) {
            let w = random_nonzero_weight(&mut r);
            g.add_edge(a, b, c, c, w).unwrap();
        }
    }
    for _ in 0..r.gen_range(0..4) {
        let a = r.gen_range(0..n);
        let b = (a + r.gen_range(1..n)) % n;
        let w = random_weight(&mut r);
        g.add_edge(a, b, r.gen_range(0..colours), r.gen_range(0..colours), w).unwrap();
    }
    g
}

/// Multiplies every edge by a seeded non-zero factor chosen per colour
/// class. When all edges are monochromatic this keeps g-GHZ graphs g-GHZ.
pub fn scale_colour_classes(g: &Multigraph, r: &mut ChaCha8Rng) -> Multigraph {
    let factors: BTreeMap<(Colour, Colour), GaussianRational> = g
        .edges()
        .iter()
        .map(|e| (e.cu(), e.cv()))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .map(|k| (k, random_nonzero_weight(r)))
        .collect();
    g.map_weights(|e| e.weight() * &factors[&(e.cu(), e.cv())])
}

pub fn close(a: Complex64, b: Complex64, eps: f64) -> bool {
    (a - b).norm() < eps
}
