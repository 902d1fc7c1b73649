#![allow(dead_code)]

use dirichlet_graph::{Vertex, VertexFunction, WeightedGraph};
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random connected graph on `n` vertices with b ∈ (0,2], c ∈ [0,1],
/// m ∈ (0,2]. With `open`, about a third of the vertices get extra weight to
/// unrealized neighbors.
pub fn random_graph(rng: &mut StdRng, n: usize, open: bool) -> WeightedGraph {
    let mut b = WeightedGraph::builder();
    let mut realized = vec![0.0; n];
    for i in 0..n {
        let m = 2.0 * (1.0 - rng.random::<f64>());
        let c = rng.random::<f64>();
        b.vertex(Vertex::Int(i as i64), m, c);
    }
    let mut add = |b: &mut dirichlet_graph::graph::GraphBuilder, i: usize, j: usize, w: f64| {
        b.edge(Vertex::Int(i as i64), Vertex::Int(j as i64), w);
        realized[i] += w;
        realized[j] += w;
    };
    for i in 1..n {
        let j = rng.random_range(0..i);
        let w = weight(rng);
        add(&mut b, i, j, w);
    }
    let extra = rng.random_range(0..=n);
    let mut seen = std::collections::HashSet::new();
    for _ in 0..extra {
        let i = rng.random_range(0..n);
        let j = rng.random_range(0..n);
        if i == j || !seen.insert((i.min(j), i.max(j))) {
            continue;
        }
        let w = weight(rng);
        add(&mut b, i, j, w);
    }
    if open {
        for (i, r) in realized.iter().enumerate() {
            if rng.random_bool(0.3) {
                b.degree(Vertex::Int(i as i64), r + weight(rng));
            }
        }
    }
    b.build()
}

fn weight(rng: &mut StdRng) -> f64 {
    2.0 * (1.0 - rng.random::<f64>())
}

/// Random values on every vertex in [-1, 1].
pub fn random_function(rng: &mut StdRng, g: &WeightedGraph) -> VertexFunction {
    g.vertices()
        .iter()
        .map(|v| (v.clone(), rng.random_range(-1.0..=1.0)))
        .collect()
}

/// Random values in [-1, 1] on the closed vertices only.
pub fn random_interior_function(rng: &mut StdRng, g: &WeightedGraph) -> VertexFunction {
    (0..g.len())
        .filter(|&i| g.is_closed(i))
        .map(|i| (g.vertex(i).clone(), rng.random_range(-1.0..=1.0)))
        .collect()
}

/// (L_D + α) as a dense matrix over `domain` (indices into `g`).
pub fn dense_operator(g: &WeightedGraph, domain: &[usize], alpha: f64) -> DMatrix<f64> {
    let n = domain.len();
    DMatrix::from_fn(n, n, |r, s| {
        let (i, j) = (domain[r], domain[s]);
        let m = g.measure(i);
        if r == s {
            (g.degree(i) + g.killing(i)) / m + alpha
        } else {
            -g.weight(i, j) / m
        }
    })
}

/// Dense LU solve of (L_D + α) u = f on `domain`.
pub fn dense_solve(g: &WeightedGraph, domain: &[usize], alpha: f64, f: &VertexFunction) -> Vec<f64> {
    let a = dense_operator(g, domain, alpha);
    let rhs = DVector::from_iterator(domain.len(), domain.iter().map(|&i| f.get(g.vertex(i))));
    a.lu().solve(&rhs).expect("nonsingular").iter().copied().collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
