//! Named example graphs used throughout the tests, the corpus and the CLI.

use crate::graph::{Colour, Multigraph};
use crate::rational::GaussianRational;

fn one() -> GaussianRational {
    GaussianRational::from(1)
}

fn build(n: usize, colours: u32, edges: &[(usize, usize, u32, u32)]) -> Multigraph {
    let mut g = Multigraph::empty(n, (0..colours).map(Colour));
    for &(a, b, ca, cb) in edges {
        g.add_edge(a, b, ca, cb, one()).expect("valid instance");
    }
    g
}

/// `K4` in three colours, each colour class one perfect matching of two
/// monochromatic unit edges: `{01, 23}`, `{02, 13}`, `{03, 12}`.
pub fn k4_canonical() -> Multigraph {
    build(4, 3, &[(0, 1, 0, 0), (2, 3, 0, 0), (0, 2, 1, 1), (1, 3, 1, 1), (0, 3, 2, 2), (1, 2, 2, 2)])
}

/// `K2` with `t` parallel monochromatic unit edges of colours `0..t`.
pub fn k2_parallel(t: u32) -> Multigraph {
    let edges: Vec<_> = (0..t).map(|c| (0, 1, c, c)).collect();
    build(2, t, &edges)
}

/// 4-cycle `0-2-1-3` joining `{0, 1}` to `{2, 3}`: `{02, 13}` in colour 0 and
/// `{03, 12}` in colour 1.
pub fn c4_ghz() -> Multigraph {
    build(4, 2, &[(0, 2, 0, 0), (1, 3, 0, 0), (0, 3, 1, 1), (1, 2, 1, 1)])
}

/// 6-cycle `0-1-...-5`, alternating colours: `{01, 23, 45}` in colour 0 and
/// `{12, 34, 50}` in colour 1.
pub fn c6_ghz() -> Multigraph {
    build(6, 2, &[(0, 1, 0, 0), (1, 2, 1, 1), (2, 3, 0, 0), (3, 4, 1, 1), (4, 5, 0, 0), (5, 0, 1, 1)])
}

/// [`c6_ghz`] plus the three long diagonals as a colour-2 perfect matching.
pub fn c6_three_matchings() -> Multigraph {
    let mut g = c6_ghz().with_universe((0..3).map(Colour)).expect("superset");
    for (a, b) in [(0, 3), (1, 4), (2, 5)] {
        g.add_edge(a, b, 2, 2, one()).expect("valid instance");
    }
    g
}

/// `K6` minus the perfect matching `{03, 14, 25}`, single colour.
pub fn octahedron() -> Multigraph {
    let mut edges = Vec::new();
    for a in 0..6 {
        for b in a + 1..6 {
            if b != a + 3 {
                edges.push((a, b, 0, 0));
            }
        }
    }
    build(6, 1, &edges)
}

/// 8 vertices `p q r | a b c | y z` = `0 1 2 | 3 4 5 | 6 7` with the 3-cut
/// `{a, b, c}` separating `{p, q, r}` from `{y, z}`. Two perfect matchings:
/// `{ap, bq, cr, yz}` in colour 0 (all of the cut matched into `{p, q, r}`)
/// and `{pq, ra, by, cz}` in colour 1. GHZ of dimension 2.
pub fn hard_case_example() -> Multigraph {
    build(
        8,
        2,
        &[
            (3, 0, 0, 0),
            (4, 1, 0, 0),
            (5, 2, 0, 0),
            (6, 7, 0, 0),
            (0, 1, 1, 1),
            (2, 3, 1, 1),
            (4, 6, 1, 1),
            (5, 7, 1, 1),
        ],
    )
}

/// Simple path `0-1-...-(n-1)`, single colour.
pub fn path(n: usize) -> Multigraph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i, 0, 0)).collect();
    build(n, 1, &edges)
}

/// Simple cycle on `n` vertices, single colour.
pub fn cycle(n: usize) -> Multigraph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n, 0, 0)).collect();
    build(n, 1, &edges)
}

/// Complete simple graph, single colour.
pub fn complete(n: usize) -> Multigraph {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b, 0, 0));
        }
    }
    build(n, 1, &edges)
}
