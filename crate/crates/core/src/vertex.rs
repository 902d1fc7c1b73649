//! Opaque vertex identifiers with a canonical text form.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::Error;

/// A vertex identifier.
///
/// Integers and integer tuples cover the lattice and chain families; everything
/// else is an opaque label. The derived ordering (integers, then tuples, then
/// labels) is the canonical summation order used throughout the crate.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Int(i64),
    Tuple(Box<[i64]>),
    Label(Arc<str>),
}

impl Vertex {
    pub fn label(s: &str) -> Self {
        Vertex::Label(Arc::from(s))
    }

    pub fn tuple(coords: &[i64]) -> Self {
        Vertex::Tuple(coords.into())
    }
}

impl From<i64> for Vertex {
    fn from(n: i64) -> Self {
        Vertex::Int(n)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Vertex::Int(n) => write!(f, "{n}"),
            Vertex::Tuple(c) => {
                f.write_str("(")?;
                for (i, x) in c.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
            Vertex::Label(s) => f.write_str(s),
        }
    }
}

impl FromStr for Vertex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s.chars().any(char::is_whitespace) {
            return Err(Error::InvalidArgument(format!("invalid vertex id {s:?}")));
        }
        if let Ok(n) = s.parse::<i64>() {
            return Ok(Vertex::Int(n));
        }
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let coords: Result<Vec<i64>, _> = inner.split(',').map(|t| t.trim().parse::<i64>()).collect();
            if let Ok(coords) = coords {
                return Ok(Vertex::Tuple(coords.into()));
            }
        }
        Ok(Vertex::label(s))
    }
}
