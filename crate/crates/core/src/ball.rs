//! Combinatorial balls: finite realizations of an oracle around an origin.

use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::oracle::{require_vertex, GraphOracle, OracleMeta};
use crate::vertex::Vertex;

/// Resource caps applied while materializing a ball.
#[derive(Clone, Copy, Debug)]
pub struct BallLimits {
    pub max_degree: usize,
    pub max_vertices: usize,
}

impl Default for BallLimits {
    fn default() -> Self {
        BallLimits {
            max_degree: 1 << 20,
            max_vertices: 1 << 24,
        }
    }
}

/// The vertices within combinatorial distance `radius` of `origin`, with
/// degrees taken from the oracle's full neighbor lists.
#[derive(Clone, Debug)]
pub struct Ball {
    pub meta: OracleMeta,
    pub origin: Vertex,
    pub radius: usize,
    pub realization: WeightedGraph,
    distance: Vec<usize>,
    interior: Vec<bool>,
}

impl Ball {
    /// Whether every neighbor of realization vertex `i` is realized.
    pub fn is_interior(&self, i: usize) -> bool {
        self.interior[i]
    }

    pub fn interior_mask(&self) -> &[bool] {
        &self.interior
    }

    pub fn interior(&self) -> Vec<Vertex> {
        (0..self.realization.len())
            .filter(|&i| self.interior[i])
            .map(|i| self.realization.vertex(i).clone())
            .collect()
    }

    pub fn distance(&self, i: usize) -> usize {
        self.distance[i]
    }

    pub fn origin_index(&self) -> usize {
        self.realization.index_of(&self.origin).expect("origin is realized")
    }
}

pub fn ball(oracle: &dyn GraphOracle, origin: &Vertex, radius: usize) -> Result<Ball> {
    ball_with_limits(oracle, origin, radius, BallLimits::default())
}

pub fn ball_with_limits(oracle: &dyn GraphOracle, origin: &Vertex, radius: usize, limits: BallLimits) -> Result<Ball> {
    require_vertex(oracle, origin)?;

    let mut order: Vec<Vertex> = vec![origin.clone()];
    let mut dist: HashMap<Vertex, usize> = HashMap::from([(origin.clone(), 0)]);
    let mut lists: Vec<Vec<(Vertex, f64)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(k) = queue.pop_front() {
        let x = order[k].clone();
        let nb = oracle.neighbors(&x);
        if nb.len() > limits.max_degree {
            return Err(Error::NeighborLimit {
                vertex: x,
                len: nb.len(),
                limit: limits.max_degree,
            });
        }
        let d = dist[&x];
        if d < radius {
            for (y, _) in &nb {
                if !dist.contains_key(y) {
                    if order.len() >= limits.max_vertices {
                        return Err(Error::VertexLimit {
                            limit: limits.max_vertices,
                        });
                    }
                    dist.insert(y.clone(), d + 1);
                    order.push(y.clone());
                    queue.push_back(order.len() - 1);
                }
            }
        }
        lists.push(nb);
    }

    let mut builder = WeightedGraph::builder();
    let mut closed = HashMap::with_capacity(order.len());
    for (x, nb) in order.iter().zip(&lists) {
        builder.vertex(x.clone(), oracle.measure(x), oracle.killing(x));
        let mut listed = 0.0;
        let mut all_realized = true;
        for (y, w) in nb {
            if y == x {
                return Err(Error::Oracle(format!("self-loop at {x}")));
            }
            listed += w;
            if dist.contains_key(y) {
                builder.half_edge(x.clone(), y.clone(), *w);
            } else {
                all_realized = false;
            }
        }
        let deg = oracle.degree(x).unwrap_or(listed);
        builder.degree(x.clone(), deg);
        closed.insert(x.clone(), all_realized);
    }
    let realization = builder.build();

    for i in 0..realization.len() {
        for &(j, w) in realization.neighbors(i) {
            if realization.weight(j, i) != w {
                return Err(Error::Oracle(format!(
                    "asymmetric weights between {} and {}",
                    realization.vertex(i),
                    realization.vertex(j)
                )));
            }
        }
    }

    let distance = realization.vertices().iter().map(|v| dist[v]).collect();
    let interior = (0..realization.len())
        .map(|i| closed[realization.vertex(i)] && realization.is_closed(i))
        .collect();
    Ok(Ball {
        meta: oracle.meta().clone(),
        origin: origin.clone(),
        radius,
        realization,
        distance,
        interior,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::generate;
    use crate::graph::validate;

    fn ints(ns: &[i64]) -> Vec<Vertex> {
        ns.iter().map(|&n| Vertex::Int(n)).collect()
    }

    #[test]
    fn z_ball_radius_two() {
        let z = generate("lattice:1").unwrap();
        let b = ball(z.as_ref(), &Vertex::Int(0), 2).unwrap();
        assert_eq!(b.realization.vertices(), ints(&[-2, -1, 0, 1, 2]).as_slice());
        assert_eq!(b.interior(), ints(&[-1, 0, 1]));
        for i in 0..5 {
            assert_eq!(b.realization.degree(i), 2.0);
        }
        assert_eq!(b.realization.boundary_degree(0), 1.0);
    }

    #[test]
    fn radius_zero() {
        let z = generate("lattice:1").unwrap();
        let b = ball(z.as_ref(), &Vertex::Int(3), 0).unwrap();
        assert_eq!(b.realization.len(), 1);
        assert!(b.interior().is_empty());

        let mut g = WeightedGraph::builder();
        g.vertex(Vertex::label("lonely"), 1.0, 0.0);
        let o = crate::oracle::FiniteOracle::new(g.build(), "custom");
        let b = ball(&o, &Vertex::label("lonely"), 0).unwrap();
        assert_eq!(b.interior(), vec![Vertex::label("lonely")]);
    }

    #[test]
    fn binary_tree_radius_two() {
        let t = generate("tree:2").unwrap();
        let b = ball(t.as_ref(), &Vertex::label("root"), 2).unwrap();
        assert_eq!(b.realization.len(), 7);
        let mut interior: Vec<String> = b.interior().iter().map(|v| v.to_string()).collect();
        interior.sort();
        assert_eq!(interior, ["root", "root.0", "root.1"]);
    }

    #[test]
    fn unknown_origin() {
        let t = generate("tree:2").unwrap();
        assert!(matches!(
            ball(t.as_ref(), &Vertex::Int(0), 1),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn neighbor_limit() {
        let s = generate("star:50").unwrap();
        let limits = BallLimits {
            max_degree: 10,
            ..BallLimits::default()
        };
        let err = ball_with_limits(s.as_ref(), &Vertex::Int(0), 1, limits).unwrap_err();
        assert!(matches!(err, Error::NeighborLimit { len: 50, .. }));
    }

    #[test]
    fn lattice_counts_and_validity() {
        let z1 = generate("lattice:1").unwrap();
        let z2 = generate("lattice:2").unwrap();
        for r in 0..6usize {
            let b1 = ball(z1.as_ref(), &z1.default_origin(), r).unwrap();
            assert_eq!(b1.realization.len(), 2 * r + 1);
            let b2 = ball(z2.as_ref(), &z2.default_origin(), r).unwrap();
            assert_eq!(b2.realization.len(), 2 * r * r + 2 * r + 1);
            assert!(validate(&b1.realization).is_empty());
            assert!(validate(&b2.realization).is_empty());
        }
    }

    #[test]
    fn finite_oracle_covered() {
        let k = generate("complete:3").unwrap();
        let b = ball(k.as_ref(), &Vertex::Int(0), 1).unwrap();
        assert_eq!(b.interior().len(), 3);
    }
}
