//! The formal Laplacian, the energy form and Green's-formula bookkeeping.
//!
//! Functions are extended by zero outside their support. An edge from a
//! realized vertex `x` to an unrealized neighbor therefore contributes
//! `b(x,y)·u(x)` to the Laplacian and `b(x,y)·u(x)²` to the energy; this
//! weight is the boundary degree of `x`.

use crate::error::{Error, Result};
use crate::function::VertexFunction;
use crate::graph::WeightedGraph;
use crate::vertex::Vertex;

/// Summation strategy for the long reductions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Summation {
    #[default]
    Naive,
    Compensated,
    /// Double-double products and sums: the result is the correctly rounded
    /// value of the sum for the given inputs, up to about 1e-30 relative.
    DoubleDouble,
}

/// Accumulator honoring a [`Summation`] mode.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Acc {
    mode: Summation,
    sum: f64,
    comp: f64,
}

impl Acc {
    pub(crate) fn new(mode: Summation) -> Self {
        Acc {
            mode,
            sum: 0.0,
            comp: 0.0,
        }
    }

    pub(crate) fn add(&mut self, x: f64) {
        match self.mode {
            Summation::Naive => self.sum += x,
            Summation::DoubleDouble => {
                let (t, e) = two_sum(self.sum, x);
                self.sum = t;
                self.comp += e;
            }
            Summation::Compensated => {
                // Neumaier variant of Kahan summation
                let t = self.sum + x;
                if self.sum.abs() >= x.abs() {
                    self.comp += (self.sum - t) + x;
                } else {
                    self.comp += (x - t) + self.sum;
                }
                self.sum = t;
            }
        }
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

fn fast_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy, Debug, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn diff(a: f64, b: f64) -> Dd {
        let (s, e) = two_sum(a, -b);
        Dd { hi: s, lo: e }
    }

    fn mul(self, o: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, o.hi);
        fast_two_sum(p, e + (self.hi * o.lo + self.lo * o.hi))
    }

    fn scale(self, w: f64) -> Dd {
        let (p, e) = two_prod(self.hi, w);
        fast_two_sum(p, e + self.lo * w)
    }

    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        fast_two_sum(s, e + self.lo + o.lo)
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

fn bilinear_double_double(g: &WeightedGraph, u: &[f64], v: &[f64]) -> (f64, f64) {
    let mut jump = Dd::default();
    let mut kill = Dd::default();
    for i in 0..g.len() {
        for &(j, w) in g.neighbors(i) {
            let t = Dd::diff(u[i], u[j]).mul(Dd::diff(v[i], v[j]));
            jump = jump.add(t.scale(0.5 * w));
        }
        let (p, e) = two_prod(u[i], v[i]);
        let uv = Dd { hi: p, lo: e };
        let outer = g.boundary_degree(i);
        if outer != 0.0 {
            jump = jump.add(uv.scale(outer));
        }
        kill = kill.add(uv.scale(g.killing(i)));
    }
    (jump.value(), kill.value())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyReport {
    pub jump_part: f64,
    pub killing_part: f64,
    pub total: f64,
}

/// Dense Laplacian of a dense function, in graph index order.
pub(crate) fn laplacian_dense(g: &WeightedGraph, u: &[f64]) -> Vec<f64> {
    (0..g.len())
        .map(|i| {
            let mut s = (g.degree(i) + g.killing(i)) * u[i];
            for &(j, w) in g.neighbors(i) {
                s -= w * u[j];
            }
            s / g.measure(i)
        })
        .collect()
}

/// L̃u on every vertex of `g`.
pub fn formal_laplacian(g: &WeightedGraph, u: &VertexFunction) -> Result<VertexFunction> {
    let dense = u.to_dense(g)?;
    Ok(VertexFunction::from_dense(g, &laplacian_dense(g, &dense)))
}

fn bilinear_dense(g: &WeightedGraph, u: &[f64], v: &[f64], mode: Summation) -> (f64, f64) {
    if mode == Summation::DoubleDouble {
        return bilinear_double_double(g, u, v);
    }
    let mut jump = Acc::new(mode);
    let mut kill = Acc::new(mode);
    for i in 0..g.len() {
        // ½ Σ_{x,y} over realized pairs, each undirected edge visited twice
        for &(j, w) in g.neighbors(i) {
            jump.add(0.5 * w * ((u[i] - u[j]) * (v[i] - v[j])));
        }
        let outer = g.boundary_degree(i);
        if outer != 0.0 {
            jump.add(outer * (u[i] * v[i]));
        }
        kill.add(g.killing(i) * (u[i] * v[i]));
    }
    (jump.value(), kill.value())
}

pub fn energy(g: &WeightedGraph, u: &VertexFunction) -> Result<EnergyReport> {
    energy_with(g, u, Summation::Naive)
}

pub fn energy_with(g: &WeightedGraph, u: &VertexFunction, mode: Summation) -> Result<EnergyReport> {
    let dense = u.to_dense(g)?;
    Ok(energy_dense(g, &dense, mode))
}

pub(crate) fn energy_dense(g: &WeightedGraph, u: &[f64], mode: Summation) -> EnergyReport {
    let (jump_part, killing_part) = bilinear_dense(g, u, u, mode);
    EnergyReport {
        jump_part,
        killing_part,
        total: jump_part + killing_part,
    }
}

/// Q̃(u, v), the polarized energy, summed in canonical order.
pub fn energy_bilinear(g: &WeightedGraph, u: &VertexFunction, v: &VertexFunction) -> Result<f64> {
    let (jump, kill) = bilinear_dense(g, &u.to_dense(g)?, &v.to_dense(g)?, Summation::Naive);
    Ok(jump + kill)
}

/// Σ_x f(x) g(x) m(x).
pub(crate) fn m_inner(g: &WeightedGraph, f: &[f64], h: &[f64], mode: Summation) -> f64 {
    let mut acc = Acc::new(mode);
    for i in 0..g.len() {
        acc.add(f[i] * h[i] * g.measure(i));
    }
    acc.value()
}

/// Fails unless every vertex in the support of `v` has all its neighbors
/// realized in `g`.
pub fn require_interior_support(g: &WeightedGraph, v: &VertexFunction) -> Result<()> {
    for x in v.support() {
        let i = g.index_of(x).ok_or_else(|| Error::SupportEscapes(x.clone()))?;
        if !g.is_closed(i) {
            return Err(Error::NotInterior {
                vertex: x.clone(),
                weight: g.boundary_degree(i),
            });
        }
    }
    Ok(())
}

/// Q̃(u, v) − Σ_x (L̃u)(x) v(x) m(x). Zero in exact arithmetic whenever every
/// neighbor of the support of `v` is realized.
pub fn green_defect(g: &WeightedGraph, u: &VertexFunction, v: &VertexFunction) -> Result<f64> {
    require_interior_support(g, v)?;
    let ud = u.to_dense(g)?;
    let vd = v.to_dense(g)?;
    let (jump, kill) = bilinear_dense(g, &ud, &vd, Summation::Naive);
    let lu = laplacian_dense(g, &ud);
    Ok((jump + kill) - m_inner(g, &lu, &vd, Summation::Naive))
}

/// Σ_x (L̃u)(x) m(x) over the realized vertices.
pub fn boundary_sum(g: &WeightedGraph, u: &VertexFunction) -> Result<f64> {
    boundary_sum_with(g, u, Summation::Naive)
}

pub fn boundary_sum_with(g: &WeightedGraph, u: &VertexFunction, mode: Summation) -> Result<f64> {
    let ud = u.to_dense(g)?;
    let lu = laplacian_dense(g, &ud);
    let mut acc = Acc::new(mode);
    for (i, l) in lu.iter().enumerate() {
        acc.add(l * g.measure(i));
    }
    Ok(acc.value())
}

/// |∇u|²(x) = Σ_y b(x,y)(u(x) − u(y))², unrealized neighbors counting as 0.
pub fn local_energy_density(g: &WeightedGraph, u: &VertexFunction, x: &Vertex) -> Result<f64> {
    let i = g.require(x)?;
    let ux = u.get(x);
    for v in u.support() {
        if !g.contains(v) {
            return Err(Error::SupportEscapes(v.clone()));
        }
    }
    let mut s = g.boundary_degree(i) * ux * ux;
    for &(j, w) in g.neighbors(i) {
        let d = ux - u.get(g.vertex(j));
        s += w * d * d;
    }
    Ok(s)
}

/// Pointwise (u ∨ lo) ∧ hi on the support of `u`.
pub fn clamp(u: &VertexFunction, lo: f64, hi: f64) -> Result<VertexFunction> {
    if lo.is_nan() || hi.is_nan() || lo > hi {
        return Err(Error::InvalidArgument(format!("clamp bounds [{lo}, {hi}] are empty")));
    }
    Ok(u.map(|x| x.max(lo).min(hi)))
}
