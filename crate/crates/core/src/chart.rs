//! Coordinate charts.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;

/// An ordered list of distinct coordinate names.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ChartSpec {
    names: Arc<[String]>,
}

impl ChartSpec {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidChart("a chart needs at least one coordinate".into()));
        }
        if names.len() > 32 {
            return Err(Error::InvalidChart("at most 32 coordinates are supported".into()));
        }
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, n) in names.iter().enumerate() {
            if n.is_empty() {
                return Err(Error::InvalidChart(format!("coordinate {i} has an empty name")));
            }
            if names[..i].contains(n) {
                return Err(Error::InvalidChart(format!("duplicate coordinate `{n}`")));
            }
        }
        Ok(ChartSpec {
            names: names.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Concatenation; fails on a shared coordinate name.
    pub fn product(&self, other: &ChartSpec) -> Result<ChartSpec> {
        let names: Vec<&String> = self.names.iter().chain(other.names.iter()).collect();
        ChartSpec::new(&names)
    }

    pub fn var(&self, name: &str) -> Result<ScalarExpr> {
        self.index_of(name)
            .map(ScalarExpr::var)
            .ok_or_else(|| Error::InvalidChart(format!("no coordinate `{name}` in {self}")))
    }

    /// Checks that every coordinate used by `e` belongs to this chart.
    pub fn check_expr(&self, e: &ScalarExpr) -> Result<()> {
        match e.max_var() {
            Some(m) if m >= self.dim() => Err(Error::IndexOutOfRange {
                index: m,
                dim: self.dim(),
            }),
            _ => Ok(()),
        }
    }

    /// Partial derivative with index checking.
    pub fn diff(&self, e: &ScalarExpr, i: usize) -> Result<ScalarExpr> {
        if i >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.dim(),
            });
        }
        self.check_expr(e)?;
        Ok(e.diff(i))
    }

    pub fn render(&self, e: &ScalarExpr) -> String {
        e.render(&self.names)
    }

    pub(crate) fn ensure_same(&self, other: &ChartSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::ChartMismatch {
                left: self.to_string(),
                right: other.to_string(),
            })
        }
    }
}

impl fmt::Display for ChartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.names.join(", "))
    }
}

impl fmt::Debug for ChartSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_names() {
        assert!(ChartSpec::new::<&str>(&[]).is_err());
        assert!(ChartSpec::new(&["x", "x"]).is_err());
        assert!(ChartSpec::new(&["x", ""]).is_err());
    }

    #[test]
    fn diff_checks_index() {
        let c = ChartSpec::new(&["x", "y"]).unwrap();
        let x = c.var("x").unwrap();
        assert_eq!(c.diff(&x, 0).unwrap(), ScalarExpr::one());
        assert!(matches!(c.diff(&x, 2), Err(Error::IndexOutOfRange { .. })));
        assert!(c.check_expr(&ScalarExpr::var(5)).is_err());
    }

    #[test]
    fn product_concatenates() {
        let a = ChartSpec::new(&["u", "v"]).unwrap();
        let b = ChartSpec::new(&["z"]).unwrap();
        assert_eq!(a.product(&b).unwrap().names(), ["u", "v", "z"]);
        assert!(a.product(&a).is_err());
    }
}
