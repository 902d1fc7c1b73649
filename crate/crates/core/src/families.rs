//! Built-in graph families.

use crate::error::{Error, Result};
use crate::oracle::{FiniteOracle, GraphOracle, OracleMeta};
use crate::vertex::Vertex;

/// The integer lattice ℤ^d with unit weights, m ≡ 1, c ≡ 0. Vertices are
/// integers for d = 1 and d-tuples otherwise.
#[derive(Clone, Debug)]
pub struct Lattice {
    dim: usize,
    meta: OracleMeta,
}

impl Lattice {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("lattice dimension must be at least 1".into()));
        }
        let meta = OracleMeta {
            family: "lattice".into(),
            params: vec![("d".into(), dim.to_string())],
            condition_a: Some(true),
            connected: Some(true),
            vertex_count: None,
        };
        Ok(Lattice { dim, meta })
    }

    fn coords(&self, v: &Vertex) -> Option<Vec<i64>> {
        match v {
            Vertex::Int(n) if self.dim == 1 => Some(vec![*n]),
            Vertex::Tuple(c) if self.dim > 1 && c.len() == self.dim => Some(c.to_vec()),
            _ => None,
        }
    }

    fn vertex(&self, coords: &[i64]) -> Vertex {
        if self.dim == 1 {
            Vertex::Int(coords[0])
        } else {
            Vertex::tuple(coords)
        }
    }
}

impl GraphOracle for Lattice {
    fn meta(&self) -> &OracleMeta {
        &self.meta
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.coords(v).is_some()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<(Vertex, f64)> {
        let Some(mut c) = self.coords(v) else { return Vec::new() };
        let mut out = Vec::with_capacity(2 * self.dim);
        for k in 0..self.dim {
            for step in [-1, 1] {
                c[k] += step;
                out.push((self.vertex(&c), 1.0));
                c[k] -= step;
            }
        }
        out
    }

    fn measure(&self, _v: &Vertex) -> f64 {
        1.0
    }

    fn killing(&self, _v: &Vertex) -> f64 {
        0.0
    }

    fn default_origin(&self) -> Vertex {
        self.vertex(&vec![0; self.dim])
    }
}

/// Rooted tree in which every vertex has `k` children, unit weights, m ≡ 1.
/// The root is `root`; descendants are labelled by their child-index path,
/// e.g. `root.0.1`.
#[derive(Clone, Debug)]
pub struct RegularTree {
    arity: usize,
    meta: OracleMeta,
}

impl RegularTree {
    pub fn new(arity: usize) -> Result<Self> {
        if arity == 0 {
            return Err(Error::InvalidArgument("tree arity must be at least 1".into()));
        }
        let meta = OracleMeta {
            family: "tree".into(),
            params: vec![("k".into(), arity.to_string())],
            condition_a: Some(true),
            connected: Some(true),
            vertex_count: None,
        };
        Ok(RegularTree { arity, meta })
    }

    fn path<'a>(&self, v: &'a Vertex) -> Option<&'a str> {
        let Vertex::Label(s) = v else { return None };
        let rest = s.strip_prefix("root")?;
        let valid = rest.is_empty()
            || rest.strip_prefix('.').is_some_and(|r| {
                r.split('.').all(|t| {
                    !t.is_empty()
                        && t.bytes().all(|b| b.is_ascii_digit())
                        && (t == "0" || !t.starts_with('0'))
                        && t.parse::<usize>().is_ok_and(|i| i < self.arity)
                })
            });
        valid.then_some(s.as_ref())
    }
}

impl GraphOracle for RegularTree {
    fn meta(&self) -> &OracleMeta {
        &self.meta
    }

    fn contains(&self, v: &Vertex) -> bool {
        self.path(v).is_some()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<(Vertex, f64)> {
        let Some(s) = self.path(v) else { return Vec::new() };
        let mut out = Vec::with_capacity(self.arity + 1);
        if let Some(dot) = s.rfind('.') {
            out.push((Vertex::label(&s[..dot]), 1.0));
        }
        for i in 0..self.arity {
            out.push((Vertex::label(&format!("{s}.{i}")), 1.0));
        }
        out
    }

    fn measure(&self, _v: &Vertex) -> f64 {
        1.0
    }

    fn killing(&self, _v: &Vertex) -> f64 {
        0.0
    }

    fn default_origin(&self) -> Vertex {
        Vertex::label("root")
    }
}

/// Half-line birth–death chain on {0, 1, 2, ...} with b(n, n+1) = β^n,
/// m(n) = μ^n and constant killing c(n) = κ.
#[derive(Clone, Debug)]
pub struct PathChain {
    beta: f64,
    mu: f64,
    kappa: f64,
    meta: OracleMeta,
}

impl PathChain {
    pub fn new(beta: f64, mu: f64, kappa: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "path_chain: beta must be positive, got {beta}"
            )));
        }
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "path_chain: mu must be positive, got {mu}"
            )));
        }
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "path_chain: c must be nonnegative, got {kappa}"
            )));
        }
        let meta = OracleMeta {
            family: "path_chain".into(),
            params: vec![
                ("beta".into(), beta.to_string()),
                ("mu".into(), mu.to_string()),
                ("c".into(), kappa.to_string()),
            ],
            // the only escaping paths run to +infinity, with measure Σ μ^n
            condition_a: Some(mu >= 1.0),
            connected: Some(true),
            vertex_count: None,
        };
        Ok(PathChain { beta, mu, kappa, meta })
    }

    fn site(v: &Vertex) -> Option<i32> {
        match v {
            Vertex::Int(n) if *n >= 0 && *n <= i32::MAX as i64 => Some(*n as i32),
            _ => None,
        }
    }
}

impl GraphOracle for PathChain {
    fn meta(&self) -> &OracleMeta {
        &self.meta
    }

    fn contains(&self, v: &Vertex) -> bool {
        Self::site(v).is_some()
    }

    fn neighbors(&self, v: &Vertex) -> Vec<(Vertex, f64)> {
        let Some(n) = Self::site(v) else { return Vec::new() };
        let mut out = Vec::with_capacity(2);
        if n > 0 {
            out.push((Vertex::Int(n as i64 - 1), self.beta.powi(n - 1)));
        }
        out.push((Vertex::Int(n as i64 + 1), self.beta.powi(n)));
        out
    }

    fn measure(&self, v: &Vertex) -> f64 {
        Self::site(v).map_or(1.0, |n| self.mu.powi(n))
    }

    fn killing(&self, _v: &Vertex) -> f64 {
        self.kappa
    }

    fn default_origin(&self) -> Vertex {
        Vertex::Int(0)
    }
}

/// Star with center 0 and leaves 1..=n.
pub fn star(n: usize) -> Result<FiniteOracle> {
    if n == 0 {
        return Err(Error::InvalidArgument("star needs at least one leaf".into()));
    }
    let mut b = crate::graph::WeightedGraph::builder();
    for leaf in 1..=n as i64 {
        b.edge(Vertex::Int(0), Vertex::Int(leaf), 1.0);
    }
    let mut o = FiniteOracle::new(b.build(), "star");
    o.meta_mut().params = vec![("n".into(), n.to_string())];
    Ok(o)
}

/// Complete graph on 0..n with unit weights.
pub fn complete(n: usize) -> Result<FiniteOracle> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "complete graph needs at least one vertex".into(),
        ));
    }
    let mut b = crate::graph::WeightedGraph::builder();
    b.vertex(Vertex::Int(0), 1.0, 0.0);
    for i in 0..n as i64 {
        for j in i + 1..n as i64 {
            b.edge(Vertex::Int(i), Vertex::Int(j), 1.0);
        }
    }
    let mut o = FiniteOracle::new(b.build(), "complete");
    o.meta_mut().params = vec![("n".into(), n.to_string())];
    Ok(o)
}

/// Parses a positive or nonnegative rational given as `p/q` or as a decimal.
pub fn parse_rational(s: &str) -> Result<f64> {
    let bad = || Error::InvalidArgument(format!("invalid number {s:?}"));
    let value = match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| bad())?;
            let q: f64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0.0 {
                return Err(bad());
            }
            p / q
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

fn parse_count(family: &str, s: &str) -> Result<usize> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("{family}: expected a nonnegative integer, got {s:?}")))
}

/// Instantiates a family from a spec such as `lattice:2`, `tree:2`,
/// `path_chain:beta=4,mu=1/2`, `star:5`, `complete:3` or `file:graph.g`.
pub fn generate(spec: &str) -> Result<Box<dyn GraphOracle>> {
    let (name, params) = spec.split_once(':').unwrap_or((spec, ""));
    let name = name.trim();
    Ok(match name {
        "lattice" => Box::new(Lattice::new(parse_count(name, params)?)?),
        "tree" | "regular_tree" => Box::new(RegularTree::new(parse_count(name, params)?)?),
        "star" => Box::new(star(parse_count(name, params)?)?),
        "complete" => Box::new(complete(parse_count(name, params)?)?),
        "path_chain" | "chain" => {
            let (mut beta, mut mu, mut kappa) = (None, None, 0.0);
            for (pos, item) in params.split(',').filter(|t| !t.trim().is_empty()).enumerate() {
                let (key, value) = match item.split_once('=') {
                    Some((k, v)) => (k.trim(), v),
                    None => (["beta", "mu", "c"].get(pos).copied().unwrap_or(""), item),
                };
                match key {
                    "beta" | "b" => beta = Some(parse_rational(value)?),
                    "mu" | "m" => mu = Some(parse_rational(value)?),
                    "c" | "kappa" => kappa = parse_rational(value)?,
                    _ => {
                        return Err(Error::InvalidArgument(format!(
                            "path_chain: unknown parameter {item:?}"
                        )))
                    }
                }
            }
            let beta = beta.ok_or_else(|| Error::InvalidArgument("path_chain: beta is required".into()))?;
            Box::new(PathChain::new(beta, mu.unwrap_or(1.0), kappa)?)
        }
        "file" | "custom_file" => Box::new(crate::io::read_graph_file(params.trim())?.into_oracle()?),
        _ => return Err(Error::UnknownFamily(name.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Vertex {
        Vertex::Int(n)
    }

    #[test]
    fn lattice_one() {
        let z = generate("lattice:1").unwrap();
        assert_eq!(z.neighbors(&int(0)), vec![(int(-1), 1.0), (int(1), 1.0)]);
        assert_eq!(z.measure(&int(7)), 1.0);
        assert_eq!(z.killing(&int(7)), 0.0);
        assert!(!z.contains(&Vertex::tuple(&[0, 0])));
    }

    #[test]
    fn lattice_two_uses_tuples() {
        let z2 = generate("lattice:2").unwrap();
        let o = z2.default_origin();
        assert_eq!(o.to_string(), "(0,0)");
        assert_eq!(z2.neighbors(&o).len(), 4);
    }

    #[test]
    fn binary_tree_degrees() {
        let t = generate("tree:2").unwrap();
        let root = Vertex::label("root");
        assert_eq!(t.neighbors(&root).len(), 2);
        let child = Vertex::label("root.1");
        let nb = t.neighbors(&child);
        assert_eq!(nb.len(), 3);
        assert_eq!(nb[0].0, root);
        assert!(t.contains(&Vertex::label("root.0.1.1")));
        assert!(!t.contains(&Vertex::label("root.2")));
        assert!(!t.contains(&Vertex::label("root.01")));
    }

    #[test]
    fn path_chain_substitution() {
        let c = generate("path_chain:beta=2,mu=1").unwrap();
        assert_eq!(c.neighbors(&int(0)), vec![(int(1), 1.0)]);
        assert_eq!(c.neighbors(&int(3)), vec![(int(2), 4.0), (int(4), 8.0)]);
        let d = generate("path_chain:4,1/2").unwrap();
        assert_eq!(d.measure(&int(3)), 0.125);
        assert_eq!(d.meta().condition_a, Some(false));
        assert!(!d.contains(&int(-1)));
    }

    #[test]
    fn path_chain_rejects_nonpositive_rates() {
        assert!(generate("path_chain:beta=0").is_err());
        assert!(generate("path_chain:beta=2,mu=-1/2").is_err());
    }

    #[test]
    fn unknown_family() {
        assert!(matches!(generate("moebius:3"), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn finite_families() {
        let s = generate("star:4").unwrap();
        assert_eq!(s.neighbors(&int(0)).len(), 4);
        assert_eq!(s.meta().vertex_count, Some(5));
        let k = generate("complete:3").unwrap();
        assert_eq!(k.neighbors(&int(1)), vec![(int(0), 1.0), (int(2), 1.0)]);
        assert_eq!(k.meta().connected, Some(true));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("1/2").unwrap(), 0.5);
        assert_eq!(parse_rational("3").unwrap(), 3.0);
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }
}
