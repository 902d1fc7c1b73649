//! Finitely supported real functions on vertices.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::vertex::Vertex;

/// A real function with finite support, extended by zero everywhere else.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VertexFunction {
    values: BTreeMap<Vertex, f64>,
}

impl VertexFunction {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn indicator(v: Vertex) -> Self {
        Self::from_iter([(v, 1.0)])
    }

    /// The constant `value` on every vertex of `g`.
    pub fn constant(g: &WeightedGraph, value: f64) -> Self {
        g.vertices().iter().map(|v| (v.clone(), value)).collect()
    }

    /// Builds a function from a dense vector indexed like `g`.
    pub fn from_dense(g: &WeightedGraph, values: &[f64]) -> Self {
        g.vertices().iter().cloned().zip(values.iter().copied()).collect()
    }

    pub fn get(&self, v: &Vertex) -> f64 {
        self.values.get(v).copied().unwrap_or(0.0)
    }

    pub fn set(&mut self, v: Vertex, value: f64) {
        self.values.insert(v, value);
    }

    pub fn support(&self) -> impl Iterator<Item = &Vertex> {
        self.values.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Vertex, f64)> {
        self.values.iter().map(|(v, &x)| (v, x))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Dense values over `g` in index order. Fails if the support leaves `g`.
    pub fn to_dense(&self, g: &WeightedGraph) -> Result<Vec<f64>> {
        let mut out = vec![0.0; g.len()];
        for (v, &x) in &self.values {
            let i = g.index_of(v).ok_or_else(|| Error::SupportEscapes(v.clone()))?;
            out[i] = x;
        }
        Ok(out)
    }

    pub fn map(&self, mut f: impl FnMut(f64) -> f64) -> Self {
        self.values.iter().map(|(v, &x)| (v.clone(), f(x))).collect()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.values().fold(0.0, |acc, x| acc.max(x.abs()))
    }

    pub fn min_value(&self) -> f64 {
        self.values.values().copied().fold(f64::INFINITY, f64::min)
    }
}

impl FromIterator<(Vertex, f64)> for VertexFunction {
    fn from_iter<I: IntoIterator<Item = (Vertex, f64)>>(iter: I) -> Self {
        VertexFunction {
            values: iter.into_iter().collect(),
        }
    }
}
