//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;

use common::*;
use ghz_graphs::ghz::{find_bogdanov_witness, mono_weights, scale_to_ghz, verify, DEFAULT_EPSILON};
use ghz_graphs::matching::{colouring_weight, colouring_weight_table, graph_weight};
use ghz_graphs::reduction::{classify_colours, graph_from_edges, reduce_easy, reduce_hard, type_weights};
use ghz_graphs::search::SearchProblem;
use ghz_graphs::structure::{
    components_without, cut_partition, mcg, square_decomposition_even, square_decomposition_odd, vertex_connectivity,
    CutSpec,
};
use ghz_graphs::{instances, io, Colour, GaussianRational, Multigraph};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err(format!($($arg)+));
        }
    };
}

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

fn corpus() -> Vec<(String, Multigraph)> {
    let mut files: Vec<_> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, io::parse(&std::fs::read_to_string(&p).unwrap()).unwrap())
        })
        .collect()
}

fn set(xs: &[usize]) -> BTreeSet<usize> {
    xs.iter().copied().collect()
}

fn criterion_1() -> Check {
    let g = instances::k4_canonical();
    let v = verify(&g);
    ensure!(v.is_ghz && v.dimension == 3, "verdict {v:?}");
    let t = oracle_table(&g);
    let mono: Vec<_> = t.iter().filter(|(k, _)| k.iter().all(|&c| c == k[0])).collect();
    ensure!(mono.len() == 3 && mono.iter().all(|(_, (w, _))| w.is_one()), "oracle mono entries {mono:?}");
    ensure!(t.iter().all(|(k, (w, _))| k.iter().all(|&c| c == k[0]) || w.is_zero()), "oracle non-mono weight");
    Ok(())
}

fn criterion_2() -> Check {
    let g = instances::k2_parallel(5);
    let v = verify(&g);
    ensure!(v.is_ghz && v.dimension == 5, "verdict {v:?}");
    ensure!(oracle_table(&g).len() == 5, "oracle table size");
    Ok(())
}

fn criterion_3() -> Check {
    for seed in 0..100 {
        let g = corpus_instance(seed);
        let expected = oracle_graph_weight(&g);
        let total = colouring_weight_table(&g).total();
        ensure!(total == expected, "seed {seed}: table total {total} vs oracle {expected}");
        ensure!(graph_weight(&g) == expected, "seed {seed}: graph weight");
    }
    Ok(())
}

fn criterion_4() -> Check {
    for seed in 0..100 {
        let g = corpus_instance(seed);
        for (key, (w, _)) in oracle_table(&g) {
            let got = colouring_weight(&g, &vc(&key));
            ensure!(got == w, "seed {seed}, colouring {key:?}: filtered {got} vs grouped {w}");
        }
    }
    Ok(())
}

fn criterion_5() -> Check {
    for seed in 0..50 {
        let mut r = rng(1000 + seed);
        let v1_len = [1, 3][r.gen_range(0..2)];
        let v2_len = [2, 4][r.gen_range(0..2)];
        let colours = r.gen_range(1..=3);
        let p = planted_three_cut(&mut r, v1_len, v2_len, colours, 12);
        let cut = CutSpec::new(&p.g, p.s.clone(), p.v1.clone(), p.v2.clone()).map_err(|e| e.to_string())?;
        let table = oracle_table(&p.g);
        let u: Vec<usize> = p.s.iter().copied().collect();
        for block in all_colourings(5, colours) {
            let mut key = vec![0; p.g.n()];
            for &x in &p.v1 {
                key[x] = block[0];
            }
            for &x in &p.v2 {
                key[x] = block[1];
            }
            for t in 0..3 {
                key[u[t]] = block[2 + t];
            }
            let expected = table.get(&key).map(|e| e.0.clone()).unwrap_or_default();
            let tw = type_weights(&p.g, &cut, &vc(&key)).map_err(|e| e.to_string())?;
            ensure!(tw.total() == expected, "seed {seed}, colouring {key:?}: {} vs {expected}", tw.total());
        }
    }
    Ok(())
}

fn class_list(g: &Multigraph) -> Vec<((usize, usize, Colour, Colour), GaussianRational)> {
    let mut e: Vec<_> = g.edges().iter().map(|e| (e.class(), e.weight().clone())).collect();
    e.sort_by(|a, b| a.0.cmp(&b.0));
    e
}

fn criterion_6() -> Check {
    let g = instances::c6_ghz();
    let cut = cut_partition(&g, &set(&[1, 3, 5])).ok_or("no partition")?;
    ensure!(cut.v1 == set(&[0]) && cut.v2 == set(&[2, 4]), "sides {cut:?}");
    let gp = reduce_easy(&g, &cut).map_err(|e| e.to_string())?;
    let one = GaussianRational::from(1);
    let expected = graph_from_edges(4, [Colour(0), Colour(1)], &[
        (0, 1, 0, 0, one.clone()),
        (0, 3, 1, 1, one.clone()),
        (1, 2, 1, 1, one.clone()),
        (2, 3, 0, 0, one),
    ]);
    ensure!(class_list(&gp) == class_list(&expected), "reduced edges {:?}", class_list(&gp));
    let v = verify(&gp);
    ensure!(v.is_ghz && v.dimension == 2, "reduced verdict {v:?}");
    let colourings = all_colourings(4, 2);
    ensure!(colourings.len() == 16, "colouring count");
    for c in colourings {
        let lhs = oracle_weight(&gp, &c);
        let mut rhs = GaussianRational::zero();
        for col in 0..2 {
            let full = [c[0], c[1], col, c[2], col, c[3]];
            rhs += oracle_weight(&g, &full);
        }
        ensure!(lhs == rhs, "colouring {c:?}: {lhs} vs {rhs}");
    }
    Ok(())
}

/// The hard-case family: re-weighted copies of the 8-vertex example and random
/// 8-vertex graphs with a planted cut and a non-empty `C1`.
fn hard_family() -> Vec<(Multigraph, CutSpec)> {
    let mut out = Vec::new();
    let base = instances::hard_case_example();
    let cut_of = |g: &Multigraph| CutSpec::new(g, set(&[3, 4, 5]), set(&[0, 1, 2]), set(&[6, 7])).unwrap();
    out.push((base.clone(), cut_of(&base)));
    let ghz_variant = base.map_weights(|e| match e.endpoints() {
        (6, 7) => GaussianRational::from(3),
        (0, 3) => GaussianRational::from_ratios(1, 3, 0, 1),
        _ => e.weight().clone(),
    });
    out.push((ghz_variant.clone(), cut_of(&ghz_variant)));
    for seed in 0..10 {
        let mut r = rng(2000 + seed);
        let g = base.map_weights(|_| random_nonzero_weight(&mut r));
        out.push((g.clone(), cut_of(&g)));
    }
    let mut seed = 0;
    while out.len() < 24 {
        seed += 1;
        let mut r = rng(3000 + seed);
        let colours = r.gen_range(1..=2);
        let p = planted_three_cut(&mut r, 3, 2, colours, 12);
        let cut = CutSpec::new(&p.g, p.s, p.v1, p.v2).unwrap();
        if !classify_colours(&p.g, &cut).unwrap().c1.is_empty() {
            out.push((p.g, cut));
        }
    }
    out
}

fn criterion_7() -> Check {
    let mut g_ghz_members = 0;
    for (idx, (g, cut)) in hard_family().into_iter().enumerate() {
        let class = classify_colours(&g, &cut).map_err(|e| e.to_string())?;
        ensure!(!class.c1.is_empty(), "member {idx}: C1 empty");
        let gp = reduce_hard(&g, &cut).map_err(|e| format!("member {idx}: {e}"))?;
        let kept: Vec<usize> = cut.v1.iter().chain(&cut.s).copied().collect::<BTreeSet<_>>().into_iter().collect();
        let k = GaussianRational::from(class.c1.len() as i64);
        let v2_mono = |c: u32| oracle_weight_on(&g, &cut.v2, &|_| c);
        let full_table = oracle_table(&g);
        let reduced_table = oracle_table(&gp);
        let universe = g.colour_universe().len() as u32;
        for c in all_colourings(kept.len(), universe) {
            let lhs = reduced_table.get(&c).map(|e| e.0.clone()).unwrap_or_default();
            let mut rhs = GaussianRational::zero();
            for col in 0..universe {
                let mut key = vec![col; g.n()];
                for (i, &x) in kept.iter().enumerate() {
                    key[x] = c[i];
                }
                let w = full_table.get(&key).map(|e| e.0.clone()).unwrap_or_default();
                if class.c1.contains(&Colour(col)) {
                    rhs += w / (&k * &v2_mono(col));
                } else {
                    rhs += w;
                }
            }
            ensure!(lhs == rhs, "member {idx}, colouring {c:?}: {lhs} vs {rhs}");
        }
        let v = verify(&g);
        if v.is_g_ghz {
            g_ghz_members += 1;
            let vp = verify(&gp);
            ensure!(vp.is_g_ghz && vp.dimension >= v.dimension, "member {idx}: dimension {} -> {}", v.dimension, vp.dimension);
            let before = mono_weights(&g);
            let after = mono_weights(&gp);
            for (c, w) in &before {
                let expected = if class.c1.contains(c) { w.clone() / (&k * &v2_mono(c.0)) } else { w.clone() };
                ensure!(after[c] == expected, "member {idx}, colour {c:?}: {} vs {expected}", after[c]);
                if v.is_ghz {
                    let closed = if class.c1.contains(c) {
                        (&k * &v2_mono(c.0)).recip().unwrap()
                    } else {
                        GaussianRational::one()
                    };
                    ensure!(after[c] == closed, "member {idx}, colour {c:?}: closing formula");
                }
            }
        }
    }
    ensure!(g_ghz_members >= 12, "only {g_ghz_members} g-GHZ members");
    Ok(())
}

fn ghz_corpus() -> Vec<(String, Multigraph)> {
    corpus().into_iter().filter(|(_, g)| verify(g).is_ghz).collect()
}

fn criterion_8() -> Check {
    let base = ghz_corpus();
    ensure!(base.len() >= 5, "GHZ corpus too small");
    for i in 0..20u64 {
        let (name, g0) = &base[i as usize % base.len()];
        let mut r = rng(4000 + i);
        let g = scale_colour_classes(g0, &mut r);
        let v = verify(&g);
        ensure!(v.is_g_ghz, "{name}#{i}: not g-GHZ after re-weighting");
        let s = scale_to_ghz(&g, DEFAULT_EPSILON).map_err(|e| format!("{name}#{i}: {e}"))?;
        let mut dim = 0;
        for (key, (w, _)) in oracle_table(&s.graph) {
            if key.iter().all(|&c| c == key[0]) {
                if w.norm() > DEFAULT_EPSILON {
                    dim += 1;
                    ensure!(close(w, Complex64::one(), 1e-9), "{name}#{i}: mono {key:?} weighs {w}");
                }
            } else {
                ensure!(w.norm() < 1e-9, "{name}#{i}: non-mono {key:?} weighs {w}");
            }
        }
        ensure!(dim == v.dimension, "{name}#{i}: dimension {} -> {dim}", v.dimension);
    }
    Ok(())
}

fn criterion_9() -> Check {
    for seed in 0..100 {
        let g = planted_mono_matchings(5000 + seed);
        let m = find_bogdanov_witness(&g).map_err(|e| format!("seed {seed}: {e}"))?;
        let pm = m.edge_indices();
        ensure!(oracle_pms(&g).iter().any(|p| p.as_slice() == pm), "seed {seed}: {pm:?} is not a perfect matching");
        let c = oracle_colouring_of(&g, pm);
        ensure!(c.iter().any(|&x| x != c[0]), "seed {seed}: witness is monochromatic");
    }
    Ok(())
}

/// Every way to split the components of `G - {u, v}` into two non-empty
/// sides.
fn two_cut_sides(g: &Multigraph) -> Vec<(usize, usize, BTreeSet<usize>, BTreeSet<usize>)> {
    let mut out = Vec::new();
    let n = g.n();
    for u in 0..n {
        for v in u + 1..n {
            let comps = components_without(g, &set(&[u, v]));
            if comps.len() < 2 {
                continue;
            }
            for mask in 1..(1u32 << comps.len()) - 1 {
                let mut a = BTreeSet::new();
                let mut b = BTreeSet::new();
                for (i, c) in comps.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        a.extend(c);
                    } else {
                        b.extend(c);
                    }
                }
                out.push((u, v, a, b));
            }
        }
    }
    out
}

fn criterion_10() -> Check {
    let mut squares = 0;
    for (name, g) in ghz_corpus() {
        if g.n() < 4 || oracle_kappa(&g) > 2 {
            continue;
        }
        let v = verify(&g);
        ensure!(v.dimension <= 2, "{name}: kappa <= 2 but dimension {}", v.dimension);
        let colours: Vec<Colour> = g.colour_universe().iter().copied().collect();
        let d = colours.len() as u32;
        for (u, w, a, b) in two_cut_sides(&g) {
            let odd = a.len() % 2 == 1;
            for c in all_colourings(if odd { 4 } else { 3 }, d) {
                if c.iter().all(|&x| x == c[0]) {
                    continue;
                }
                let col = |i: usize| colours[c[i] as usize];
                let (sq, key) = if odd {
                    let sq = square_decomposition_odd(&g, u, w, &a, &b, [col(0), col(1), col(2), col(3)]);
                    (sq, (0..g.n()).map(|x| if a.contains(&x) { c[0] } else if b.contains(&x) { c[1] } else if x == u { c[2] } else { c[3] }).collect::<Vec<_>>())
                } else {
                    let sq = square_decomposition_even(&g, u, w, &a, &b, [col(0), col(1), col(2)]);
                    (sq, (0..g.n()).map(|x| if a.contains(&x) { c[0] } else if b.contains(&x) { c[1] } else { c[2] }).collect())
                };
                let sq = sq.map_err(|e| format!("{name}: {e}"))?;
                squares += 1;
                ensure!(sq.h == -sq.v.clone(), "{name}: cut ({u},{w}) colouring {c:?}: H = {}, V = {}", sq.h, sq.v);
                ensure!(sq.total() == oracle_weight(&g, &key), "{name}: square total differs from the colouring weight");
            }
        }
    }
    ensure!(squares > 0, "no square colourings checked");
    Ok(())
}

fn pm_signature(g: &Multigraph) -> Vec<Vec<String>> {
    let mut pms: Vec<Vec<String>> = oracle_pms(g)
        .into_iter()
        .map(|pm| {
            let mut s: Vec<String> = pm.iter().map(|&i| format!("{:?}{}", g.edge(i).class(), g.edge(i).weight())).collect();
            s.sort();
            s
        })
        .collect();
    pms.sort();
    pms
}

fn criterion_11() -> Check {
    for seed in 0..50 {
        let g = corpus_instance(6000 + seed);
        let h = mcg(&g);
        ensure!(pm_signature(&g) == pm_signature(&h), "seed {seed}: perfect matchings changed");
        ensure!(oracle_table(&g) == oracle_table(&h), "seed {seed}: oracle tables changed");
        ensure!(colouring_weight_table(&g) == colouring_weight_table(&h), "seed {seed}: tables changed");
        let used: BTreeSet<usize> = oracle_pms(&h).into_iter().flatten().collect();
        ensure!(used.len() == h.edges().len(), "seed {seed}: mcg keeps a redundant edge");
        if h.n() >= 4 {
            let k = oracle_kappa(&h);
            ensure!(k != 1, "seed {seed}: matching-covered graph with kappa 1");
            ensure!(vertex_connectivity(&h) == k, "seed {seed}: connectivity {} vs oracle {k}", vertex_connectivity(&h));
        }
    }
    Ok(())
}

fn finite_difference_error(p: &SearchProblem, x: &[Complex64]) -> f64 {
    let h = 1e-6;
    let g = p.gradient(x).unwrap();
    let f = |y: &[Complex64]| p.residual(y).unwrap().value;
    let mut diff = 0.0;
    let mut norm = 0.0;
    for i in 0..x.len() {
        let mut fd = [0.0; 2];
        for (part, dir) in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)].into_iter().enumerate() {
            let mut plus = x.to_vec();
            let mut minus = x.to_vec();
            plus[i] += dir * h;
            minus[i] -= dir * h;
            fd[part] = (f(&plus) - f(&minus)) / (2.0 * h);
        }
        diff += (g[i] - Complex64::new(fd[0], fd[1])).norm_sqr();
        norm += g[i].norm_sqr();
    }
    (diff / norm).sqrt()
}

fn criterion_12() -> Check {
    let p = SearchProblem::new(&instances::complete(4), 3).map_err(|e| e.to_string())?;
    ensure!(p.restarts == 20 && p.max_iters == 2000, "default budget changed");
    let out = p.search();
    ensure!(out.residual.value < 1e-8, "K4 d=3 residual {}", out.residual.value);
    for (name, g, d) in [
        ("K2", instances::k2_parallel(1), 3),
        ("K4", instances::complete(4), 3),
        ("C6", instances::cycle(6), 2),
    ] {
        let p = SearchProblem::new(&g, d).map_err(|e| e.to_string())?;
        let mut r = rng(7000);
        for point in 0..20 {
            let x: Vec<Complex64> = (0..p.variable_count())
                .map(|_| Complex64::from_polar(r.gen::<f64>().sqrt(), r.gen::<f64>() * std::f64::consts::TAU))
                .collect();
            let err = finite_difference_error(&p, &x);
            ensure!(err < 1e-5, "{name} d={d} point {point}: relative error {err}");
        }
    }
    Ok(())
}

fn criterion_13() -> Check {
    for (name, g) in corpus() {
        let path = corpus_dir().join(format!("{name}.json"));
        let text = std::fs::read_to_string(&path).unwrap();
        ensure!(io::serialize(&g) + "\n" == text, "{name}: serialization is not byte-identical");
        ensure!(io::parse(&io::serialize(&g)).unwrap() == g, "{name}: round trip");
    }
    let bin = env!("CARGO_BIN_EXE_ghz");
    let out = Command::new(bin).arg("reduce").arg(corpus_dir().join("c6.json")).output().unwrap();
    ensure!(out.status.success(), "reduce failed: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    ensure!(report["case"] == "easy", "case {}", report["case"]);
    let dir = tempfile::tempdir().unwrap();
    let reduced = dir.path().join("reduced.json");
    std::fs::write(&reduced, serde_json::to_string(&report["reduced"]).unwrap()).unwrap();
    let out = Command::new(bin).arg("verify").arg(&reduced).output().unwrap();
    ensure!(out.status.success(), "verify rejected the reduced graph");
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    ensure!(verdict["is_ghz"] == true && verdict["dimension"] == 2, "verdict {verdict}");
    let gp = io::parse(&std::fs::read_to_string(&reduced).unwrap()).unwrap();
    ensure!(gp.n() == 4, "reduced graph has {} vertices", gp.n());
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 13] = [
        ("K4 canonical instance is GHZ of dimension 3", criterion_1),
        ("K2 with 5 parallel edges is GHZ of dimension 5", criterion_2),
        ("table weights sum to the graph weight", criterion_3),
        ("filtered weight equals grouped matching weight", criterion_4),
        ("four-term type decomposition across a 3-cut", criterion_5),
        ("easy-case reduction of C6", criterion_6),
        ("hard-case reduction identity and monochromatic weights", criterion_7),
        ("rescaling g-GHZ graphs", criterion_8),
        ("non-monochromatic witness matching", criterion_9),
        ("connectivity at most 2 bounds the dimension; H = -V", criterion_10),
        ("mcg preserves matchings; matching-covered graphs have kappa != 1", criterion_11),
        ("search on K4 at d=3; gradient against finite differences", criterion_12),
        ("corpus round trip and reduce-then-verify through the CLI", criterion_13),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        match result {
            Ok(()) => println!("criterion {:>2}: PASS  {name}", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2}: FAIL  {name}: {e}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
