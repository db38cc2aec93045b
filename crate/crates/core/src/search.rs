//! Numerical search for GHZ weight assignments on a fixed skeleton.
//!
//! Every skeleton edge carries one complex variable per ordered colour pair
//! `(p, q)`, `p` on the lower endpoint. Colouring weights are multilinear in
//! these variables, so the residual
//! `sum_mono |w(vc) - 1|^2 + sum_other |w(vc)|^2` and its gradient are
//! computed from a fixed list of monomials, one per perfect matching of the
//! fully multi-edged graph.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ghz::{verify, verify_numeric, Feasibility, GhzVerdict, DEFAULT_EPSILON};
use crate::graph::{Colour, Edge, FloatGraph, Multigraph, VertexColouring, Weight};
use crate::matching::{enumerate_perfect_matchings, MAX_VERTICES};
use crate::rational::GaussianRational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SearchError {
    #[error("expected {expected} variables, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("dimension must be at least 1")]
    ZeroDimension,
    #[error("skeleton has {0} vertices, at most {MAX_VERTICES} supported")]
    TooLarge(usize),
}

#[derive(Clone, Debug)]
struct Monomial {
    vars: Vec<usize>,
    colouring: usize,
}

/// A skeleton, a target dimension and the descent budget.
#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    /// A restart stops once the residual drops below this value.
    pub tolerance: f64,
    skeleton: Multigraph,
    d: u32,
    monomials: Vec<Monomial>,
    colourings: Vec<VertexColouring>,
    targets: Vec<Complex64>,
}

impl SearchProblem {
    /// Uses the skeleton of `skeleton`, so colours and parallel edges are
    /// ignored. Defaults: seed 0, 20 restarts of at most 2000 iterations, tolerance
    /// `1e-10`.
    pub fn new<W: Weight>(skeleton: &Multigraph<W>, d: u32) -> Result<SearchProblem, SearchError> {
        if d == 0 {
            return Err(SearchError::ZeroDimension);
        }
        if skeleton.n() > MAX_VERTICES {
            return Err(SearchError::TooLarge(skeleton.n()));
        }
        let skeleton: Multigraph = skeleton.skeleton().map_weights(|_| GaussianRational::one());
        let d2 = (d * d) as usize;
        let n = skeleton.n();
        let mut index: BTreeMap<VertexColouring, usize> = BTreeMap::new();
        let mut colourings = Vec::new();
        let mut targets = Vec::new();
        for c in 0..d {
            let vc = VertexColouring::monochromatic(n, Colour(c));
            index.insert(vc.clone(), colourings.len());
            colourings.push(vc);
            targets.push(Complex64::one());
        }
        let mut monomials = Vec::new();
        for pm in enumerate_perfect_matchings(&skeleton) {
            let edges = pm.edge_indices();
            let k = edges.len();
            let total = d2.pow(k as u32);
            for code in 0..total {
                let mut rest = code;
                let mut vars = Vec::with_capacity(k);
                let mut colours = vec![Colour(0); n];
                for &ei in edges {
                    let pq = rest % d2;
                    rest /= d2;
                    let e = skeleton.edge(ei);
                    colours[e.u()] = Colour(pq as u32 / d);
                    colours[e.v()] = Colour(pq as u32 % d);
                    vars.push(ei * d2 + pq);
                }
                let vc = VertexColouring::new(colours);
                let next = colourings.len();
                let colouring = *index.entry(vc.clone()).or_insert(next);
                if colouring == next {
                    colourings.push(vc);
                    targets.push(Complex64::zero());
                }
                monomials.push(Monomial { vars, colouring });
            }
        }
        Ok(SearchProblem {
            seed: 0,
            restarts: 20,
            max_iters: 2000,
            tolerance: 1e-10,
            skeleton,
            d,
            monomials,
            colourings,
            targets,
        })
    }

    pub fn skeleton(&self) -> &Multigraph {
        &self.skeleton
    }

    pub fn dimension(&self) -> u32 {
        self.d
    }

    /// `|E(skeleton)| * d^2`.
    pub fn variable_count(&self) -> usize {
        self.skeleton.edges().len() * (self.d * self.d) as usize
    }

    /// Variable of skeleton edge `edge` with colour `p` on its lower endpoint
    /// and `q` on its upper endpoint.
    pub fn variable(&self, edge: usize, p: u32, q: u32) -> usize {
        edge * (self.d * self.d) as usize + (p * self.d + q) as usize
    }

    /// Colourings that can carry weight, monochromatic ones first.
    pub fn colourings(&self) -> &[VertexColouring] {
        &self.colourings
    }

    fn check(&self, x: &[Complex64]) -> Result<(), SearchError> {
        let expected = self.variable_count();
        if x.len() == expected {
            Ok(())
        } else {
            Err(SearchError::SizeMismatch { expected, got: x.len() })
        }
    }

    fn colouring_weights(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut f = vec![Complex64::zero(); self.colourings.len()];
        for m in &self.monomials {
            f[m.colouring] += m.vars.iter().fold(Complex64::one(), |acc, &v| acc * x[v]);
        }
        f
    }

    fn value(&self, x: &[Complex64]) -> f64 {
        self.colouring_weights(x)
            .iter()
            .zip(&self.targets)
            .map(|(f, t)| (f - t).norm_sqr())
            .sum()
    }

    pub fn residual(&self, x: &[Complex64]) -> Result<Residual, SearchError> {
        self.check(x)?;
        let f = self.colouring_weights(x);
        let value = f.iter().zip(&self.targets).map(|(f, t)| (f - t).norm_sqr()).sum();
        let breakdown = self.colourings.iter().cloned().zip(f).collect();
        Ok(Residual { value, breakdown })
    }

    /// `dR/d(re x) + i dR/d(im x)` for every variable `x`.
    pub fn gradient(&self, x: &[Complex64]) -> Result<Vec<Complex64>, SearchError> {
        self.check(x)?;
        Ok(self.gradient_unchecked(x))
    }

    fn gradient_unchecked(&self, x: &[Complex64]) -> Vec<Complex64> {
        let f = self.colouring_weights(x);
        let r: Vec<Complex64> = f.iter().zip(&self.targets).map(|(f, t)| f - t).collect();
        let mut g = vec![Complex64::zero(); x.len()];
        let mut prefix = Vec::new();
        for m in &self.monomials {
            let k = m.vars.len();
            prefix.clear();
            prefix.push(Complex64::one());
            for &v in &m.vars {
                let last = *prefix.last().expect("non-empty");
                prefix.push(last * x[v]);
            }
            let mut suffix = Complex64::one();
            let rc = r[m.colouring] * 2.0;
            for j in (0..k).rev() {
                let others = prefix[j] * suffix;
                g[m.vars[j]] += rc * others.conj();
                suffix *= x[m.vars[j]];
            }
        }
        g
    }

    /// Weighted multigraph with one edge per variable.
    pub fn graph(&self, x: &[Complex64]) -> Result<FloatGraph, SearchError> {
        self.check(x)?;
        let mut edges = Vec::with_capacity(x.len());
        for (ei, e) in self.skeleton.edges().iter().enumerate() {
            for p in 0..self.d {
                for q in 0..self.d {
                    let w = x[self.variable(ei, p, q)];
                    edges.push(Edge::new(e.u(), e.v(), Colour(p), Colour(q), w).expect("skeleton edge"));
                }
            }
        }
        Ok(Multigraph::new(self.skeleton.n(), (0..self.d).map(Colour), edges).expect("valid layout"))
    }

    /// Seeded multi-restart descent; returns the best point found.
    pub fn search(&self) -> SearchOutcome {
        let mut best: Option<SearchOutcome> = None;
        for restart in 0..self.restarts.max(1) {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed.wrapping_add(restart as u64));
            let x0: Vec<Complex64> = (0..self.variable_count())
                .map(|_| {
                    let r: f64 = rng.gen::<f64>().sqrt();
                    let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
                    Complex64::from_polar(r, t)
                })
                .collect();
            let (x, iterations) = self.descend(x0);
            let residual = self.residual(&x).expect("sized");
            let done = residual.value < self.tolerance;
            if best.as_ref().is_none_or(|b| residual.value < b.residual.value) {
                best = Some(SearchOutcome { weights: x, residual, restart, iterations });
            }
            if done {
                break;
            }
        }
        best.expect("at least one restart")
    }

    /// Gradient descent with Barzilai-Borwein steps guarded by Armijo
    /// backtracking.
    fn descend(&self, mut x: Vec<Complex64>) -> (Vec<Complex64>, usize) {
        let mut fx = self.value(&x);
        let mut g = self.gradient_unchecked(&x);
        let mut step = 0.1;
        for it in 0..self.max_iters {
            if fx < self.tolerance {
                return (x, it);
            }
            let gg: f64 = g.iter().map(|v| v.norm_sqr()).sum();
            if gg == 0.0 {
                return (x, it);
            }
            let mut eta = step;
            let (xn, fxn) = loop {
                let xn: Vec<Complex64> = x.iter().zip(&g).map(|(a, b)| a - b * eta).collect();
                let fxn = self.value(&xn);
                if fxn <= fx - 1e-4 * eta * gg || eta < 1e-14 {
                    break (xn, fxn);
                }
                eta *= 0.5;
            };
            let gn = self.gradient_unchecked(&xn);
            let mut ss = 0.0;
            let mut sy = 0.0;
            for i in 0..x.len() {
                let s = xn[i] - x[i];
                let y = gn[i] - g[i];
                ss += s.norm_sqr();
                sy += (s.conj() * y).re;
            }
            step = if sy > 0.0 { (ss / sy).clamp(1e-6, 1e3) } else { (eta * 2.0).min(1e3) };
            x = xn;
            fx = fxn;
            g = gn;
        }
        (x, self.max_iters)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub value: f64,
    /// Weight of every colouring that can carry weight.
    pub breakdown: Vec<(VertexColouring, Complex64)>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub weights: Vec<Complex64>,
    pub residual: Residual,
    /// Restart that produced `weights`.
    pub restart: usize,
    pub iterations: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VerificationMode {
    Exact,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct Verification {
    pub mode: VerificationMode,
    pub is_ghz: bool,
    pub dimension: usize,
    /// The rounded graph, when every weight rounded cleanly.
    pub exact: Option<Multigraph>,
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued fractions.
pub fn rational_approximation(x: f64, max_den: i64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    let (mut p0, mut q0, mut p1, mut q1) = (0i128, 1i128, 1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > max_den as i128 {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a as f64;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    if q1 == 0 {
        return None;
    }
    Some(BigRational::new((p1 as i64).into(), (q1 as i64).into()))
}

/// Rounds every weight to a Gaussian rational with denominators at most
/// `max_den`, provided each part lands within `tol`.
pub fn exactify(weights: &[Complex64], max_den: i64, tol: f64) -> Option<Vec<GaussianRational>> {
    use num_traits::ToPrimitive;
    let part = |x: f64| {
        let r = rational_approximation(x, max_den)?;
        ((r.to_f64()? - x).abs() <= tol).then_some(r)
    };
    weights
        .iter()
        .map(|w| Some(GaussianRational::from_parts(part(w.re)?, part(w.im)?)))
        .collect()
}

impl SearchProblem {
    /// Verifies `x` exactly when it rounds to small Gaussian rationals, and
    /// numerically within `epsilon` otherwise.
    pub fn verify_weights(&self, x: &[Complex64], epsilon: f64) -> Result<Verification, SearchError> {
        let graph = self.graph(x)?;
        if let Some(exact) = exactify(x, 1_000_000, DEFAULT_EPSILON) {
            let g = Multigraph::new(
                graph.n(),
                graph.colour_universe().iter().copied(),
                graph.edges().iter().zip(exact).map(|(e, w)| e.with_weight(w)).collect(),
            )
            .expect("same layout");
            let v: GhzVerdict = verify(&g);
            if v.is_ghz && v.dimension == self.d as usize {
                return Ok(Verification { mode: VerificationMode::Exact, is_ghz: true, dimension: v.dimension, exact: Some(g) });
            }
        }
        let v = verify_numeric(&graph, epsilon, Feasibility::Lenient);
        Ok(Verification { mode: VerificationMode::Numeric, is_ghz: v.is_ghz, dimension: v.dimension, exact: None })
    }
}
