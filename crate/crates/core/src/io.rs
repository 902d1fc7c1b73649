//! Text formats for graphs and vertex functions.
//!
//! Graph files are line oriented with `#` comments:
//!
//! ```text
//! v <id> <m> <c> [<deg>]   vertex with measure m, killing c and optional full degree
//! e <id1> <id2> <b>        undirected edge
//! ```
//!
//! Vertices that only appear in edge lines get `m = 1`, `c = 0`. The optional
//! degree field records weight to vertices outside the file, which is how a
//! ball realization keeps its boundary degree when written to disk.
//!
//! Function files hold `<id> <value>` lines; unlisted vertices are 0.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::function::VertexFunction;
use crate::graph::{validate, GraphBuilder, Rule, Violation, WeightedGraph};
use crate::oracle::FiniteOracle;
use crate::vertex::Vertex;

/// Formats a double with 17 significant digits, `%.17g` style.
pub fn fmt_num(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    if !(-5..17).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (16 - exp) as usize;
    strip_zeros(&format!("{x:.decimals$}")).to_string()
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// A graph file as read, together with file-level problems (duplicate
/// declarations) that the graph structure itself cannot represent.
#[derive(Clone, Debug)]
pub struct ParsedGraph {
    pub graph: WeightedGraph,
    pub file_violations: Vec<Violation>,
}

impl ParsedGraph {
    /// All violations: file-level ones first, then structural ones.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = self.file_violations.clone();
        out.extend(validate(&self.graph));
        out
    }

    /// The graph, provided it has no violations.
    pub fn into_valid(self) -> Result<WeightedGraph> {
        match self.violations().first() {
            None => Ok(self.graph),
            Some(v) => Err(Error::InvalidArgument(format!("invalid graph: {v}"))),
        }
    }

    pub fn into_oracle(self) -> Result<FiniteOracle> {
        Ok(FiniteOracle::new(self.into_valid()?, "custom_file"))
    }
}

fn parse_vertex(tok: &str, line: usize) -> Result<Vertex> {
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid vertex id {tok:?}"),
    })
}

fn parse_number(tok: &str, line: usize, what: &str) -> Result<f64> {
    tok.parse::<f64>()
        .ok()
        .filter(|x| !x.is_nan())
        .ok_or_else(|| Error::Parse {
            line,
            message: format!("invalid {what} {tok:?}"),
        })
}

fn content(raw: &str) -> &str {
    raw.split('#').next().unwrap_or("").trim()
}

pub fn parse_graph(text: &str) -> Result<ParsedGraph> {
    let mut builder = GraphBuilder::default();
    let mut declared: HashSet<Vertex> = HashSet::new();
    let mut edges: HashSet<(Vertex, Vertex)> = HashSet::new();
    let mut file_violations = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = content(raw).split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            ["v", id, m, c, rest @ ..] if rest.len() <= 1 => {
                let v = parse_vertex(id, line)?;
                let m = parse_number(m, line, "measure")?;
                let c = parse_number(c, line, "killing")?;
                if !declared.insert(v.clone()) {
                    file_violations.push(Violation::at(Rule::DuplicateVertex, v));
                    continue;
                }
                builder.vertex(v.clone(), m, c);
                if let [deg] = rest {
                    builder.degree(v, parse_number(deg, line, "degree")?);
                }
            }
            ["e", x, y, b] => {
                let x = parse_vertex(x, line)?;
                let y = parse_vertex(y, line)?;
                let b = parse_number(b, line, "edge weight")?;
                let key = if x <= y {
                    (x.clone(), y.clone())
                } else {
                    (y.clone(), x.clone())
                };
                if !edges.insert(key) {
                    file_violations.push(Violation::at_pair(Rule::DuplicateEdge, x, y));
                    continue;
                }
                if x == y {
                    file_violations.push(Violation::at(Rule::SelfLoop, x));
                    continue;
                }
                // vertices declared later keep their declared data
                for v in [&x, &y] {
                    if !builder.has_vertex(v) {
                        builder.vertex(v.clone(), 1.0, 0.0);
                    }
                }
                builder.edge(x, y, b);
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("unrecognized line {:?}", raw.trim()),
                });
            }
        }
    }
    Ok(ParsedGraph {
        graph: builder.build(),
        file_violations,
    })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn read_graph_file(path: impl AsRef<Path>) -> Result<ParsedGraph> {
    parse_graph(&read_text(path.as_ref())?)
}

/// Serializes a graph; the degree field is written for every vertex so that
/// re-reading reproduces the degrees bit for bit.
pub fn write_graph(g: &WeightedGraph) -> String {
    let mut out = String::new();
    for i in 0..g.len() {
        out.push_str(&format!(
            "v {} {} {} {}\n",
            g.vertex(i),
            fmt_num(g.measure(i)),
            fmt_num(g.killing(i)),
            fmt_num(g.degree(i))
        ));
    }
    for (i, j, w) in g.edges() {
        out.push_str(&format!("e {} {} {}\n", g.vertex(i), g.vertex(j), fmt_num(w)));
    }
    out
}

pub fn parse_function(text: &str) -> Result<VertexFunction> {
    let mut f = VertexFunction::new();
    let mut seen = HashSet::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let toks: Vec<&str> = content(raw).split_whitespace().collect();
        match toks.as_slice() {
            [] => {}
            [id, value] => {
                let v = parse_vertex(id, line)?;
                if !seen.insert(v.clone()) {
                    return Err(Error::Parse {
                        line,
                        message: format!("duplicate value for vertex {v}"),
                    });
                }
                let value = parse_number(value, line, "value")?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        line,
                        message: format!("non-finite value for vertex {v}"),
                    });
                }
                f.set(v, value);
            }
            _ => {
                return Err(Error::Parse {
                    line,
                    message: format!("expected `<id> <value>`, got {:?}", raw.trim()),
                })
            }
        }
    }
    Ok(f)
}

pub fn read_function_file(path: impl AsRef<Path>) -> Result<VertexFunction> {
    parse_function(&read_text(path.as_ref())?)
}

pub fn write_function(f: &VertexFunction) -> String {
    f.iter().map(|(v, x)| format!("{v} {}\n", fmt_num(x))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(4.0 / 3.0), "1.3333333333333333");
        assert_eq!(fmt_num(0.2), "0.20000000000000001");
        assert_eq!(fmt_num(0.5), "0.5");
        assert_eq!(fmt_num(1.0), "1");
        assert_eq!(fmt_num(-2.0), "-2");
        assert_eq!(fmt_num(0.0), "0");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(1e-7), "9.9999999999999995e-08");
        assert_eq!(fmt_num(1e20), "1e+20");
        assert_eq!(fmt_num(123456.0), "123456");
    }

    #[test]
    fn formatted_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 2.0f64.sqrt(), 6.02e23, 1e-300, -7.25, 0.05, 0.01] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn parse_defaults_and_comments() {
        let p = parse_graph("# triangle\nv a 2 0.5\ne a b 1\ne b c 1 # tail\n\ne c a 1\n").unwrap();
        assert!(p.violations().is_empty());
        let g = &p.graph;
        let a = g.require(&"a".parse().unwrap()).unwrap();
        let b = g.require(&"b".parse().unwrap()).unwrap();
        assert_eq!((g.measure(a), g.killing(a)), (2.0, 0.5));
        assert_eq!((g.measure(b), g.killing(b)), (1.0, 0.0));
        assert_eq!(g.degree(a), 2.0);
    }

    #[test]
    fn duplicate_edge_and_self_loop_are_violations() {
        let p = parse_graph("e a b 1\ne b a 2\ne c c 1\n").unwrap();
        let v = p.violations();
        assert!(v
            .iter()
            .any(|v| v.rule == Rule::DuplicateEdge && v.to_string().contains("(b,a)")));
        assert!(v.iter().any(|v| v.rule == Rule::SelfLoop));
    }

    #[test]
    fn semantic_problems_are_violations_not_parse_errors() {
        let p = parse_graph("v a 0 0\ne a b -1\n").unwrap();
        assert_eq!(p.violations().len(), 3);
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(
            parse_graph("e a b heavy\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(parse_graph("v a 1\n"), Err(Error::Parse { .. })));
        assert!(matches!(parse_graph("x a b\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn graph_round_trip_keeps_boundary_degree() {
        let mut b = WeightedGraph::builder();
        b.edge(Vertex::Int(0), Vertex::Int(1), 0.1)
            .degree(Vertex::Int(1), 0.30000000000000004);
        let g = b.build();
        let back = parse_graph(&write_graph(&g)).unwrap().into_valid().unwrap();
        assert_eq!(back.degree(1), g.degree(1));
        assert_eq!(back.boundary_degree(1), g.boundary_degree(1));
        assert_eq!(write_graph(&back), write_graph(&g));
    }

    #[test]
    fn function_files() {
        let f = parse_function("# u\n0 1\n(1,2) -0.5\n").unwrap();
        assert_eq!(f.get(&Vertex::Int(0)), 1.0);
        assert_eq!(f.get(&Vertex::tuple(&[1, 2])), -0.5);
        assert_eq!(f.get(&Vertex::Int(9)), 0.0);
        assert!(parse_function("0 1\n0 2\n").is_err());
        assert!(parse_function("0\n").is_err());
        assert_eq!(parse_function(&write_function(&f)).unwrap(), f);
    }
}
