//! Chart maps with declared inverses and pushforward of multivectors.

use crate::chart::ChartSpec;
use crate::error::{Error, Result};
use crate::expr::{ScalarExpr, ZeroTest};
use crate::linalg::ExprMatrix;

use super::{blade_indices, MultivectorField};

/// A diffeomorphism between charts given by component functions.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartMap {
    source: ChartSpec,
    target: ChartSpec,
    /// One expression per target coordinate, in source coordinates.
    forward: Vec<ScalarExpr>,
    /// One expression per source coordinate, in target coordinates.
    inverse: Option<Vec<ScalarExpr>>,
}

impl ChartMap {
    /// Builds a map and, when an inverse is declared, checks both
    /// compositions against the identity.
    pub fn new(
        source: &ChartSpec,
        target: &ChartSpec,
        forward: Vec<ScalarExpr>,
        inverse: Option<Vec<ScalarExpr>>,
        zt: &ZeroTest,
    ) -> Result<Self> {
        if forward.len() != target.dim() {
            return Err(Error::ChartMap(format!(
                "{} components for a target of dimension {}",
                forward.len(),
                target.dim()
            )));
        }
        for f in &forward {
            source.check_expr(f)?;
        }
        let map = ChartMap {
            source: source.clone(),
            target: target.clone(),
            forward,
            inverse,
        };
        if let Some(inv) = &map.inverse {
            if inv.len() != source.dim() {
                return Err(Error::ChartMap(format!(
                    "{} inverse components for a source of dimension {}",
                    inv.len(),
                    source.dim()
                )));
            }
            for g in inv {
                target.check_expr(g)?;
            }
            map.check_inverse(zt)?;
        }
        Ok(map)
    }

    pub fn identity(chart: &ChartSpec) -> Self {
        let comps: Vec<ScalarExpr> = (0..chart.dim()).map(ScalarExpr::var).collect();
        ChartMap {
            source: chart.clone(),
            target: chart.clone(),
            forward: comps.clone(),
            inverse: Some(comps),
        }
    }

    pub fn source(&self) -> &ChartSpec {
        &self.source
    }

    pub fn target(&self) -> &ChartSpec {
        &self.target
    }

    pub fn forward(&self) -> &[ScalarExpr] {
        &self.forward
    }

    pub fn inverse(&self) -> Option<&[ScalarExpr]> {
        self.inverse.as_deref()
    }

    fn check_inverse(&self, zt: &ZeroTest) -> Result<()> {
        let inv = self.inverse.as_ref().expect("checked by caller");
        for (j, f) in self.forward.iter().enumerate() {
            let back = f.subst(&|i| inv[i].clone())?;
            if !(back - ScalarExpr::var(j)).is_zero(zt)?.is_zero() {
                return Err(Error::ChartMap(format!(
                    "forward after inverse is not the identity in `{}`",
                    self.target.names()[j]
                )));
            }
        }
        for (i, g) in inv.iter().enumerate() {
            let back = g.subst(&|j| self.forward[j].clone())?;
            if !(back - ScalarExpr::var(i)).is_zero(zt)?.is_zero() {
                return Err(Error::ChartMap(format!(
                    "inverse after forward is not the identity in `{}`",
                    self.source.names()[i]
                )));
            }
        }
        Ok(())
    }

    /// The map in the other direction.
    pub fn inverted(&self) -> Result<ChartMap> {
        let inv = self
            .inverse
            .clone()
            .ok_or_else(|| Error::ChartMap("no inverse declared".into()))?;
        Ok(ChartMap {
            source: self.target.clone(),
            target: self.source.clone(),
            forward: inv,
            inverse: Some(self.forward.clone()),
        })
    }

    /// `J[j][i] = d forward_j / d x_i`.
    pub fn jacobian(&self) -> ExprMatrix {
        ExprMatrix::from_fn(self.target.dim(), self.source.dim(), |j, i| {
            self.forward[j].diff(i)
        })
    }

    /// Pushforward of a multivector field, expressed in target coordinates.
    pub fn pushforward(&self, a: &MultivectorField, zt: &ZeroTest) -> Result<MultivectorField> {
        a.chart().ensure_same(&self.source)?;
        let inv = self
            .inverse
            .as_ref()
            .ok_or_else(|| Error::ChartMap("pushforward needs a declared inverse".into()))?;
        let jac = self.jacobian();
        if self.source.dim() == self.target.dim() {
            let det = jac.det()?;
            if det.is_zero(zt)?.is_zero() {
                return Err(Error::ChartMap("Jacobian is singular".into()));
            }
        }
        let k = a.degree();
        let n = self.target.dim();
        let mut out = MultivectorField::zero(&self.target, k);
        for (b, c) in a.blades() {
            let cols = blade_indices(*b);
            for rows in subsets(n, k) {
                let m = jac.minor(&rows, &cols).det()?;
                if m.is_structural_zero() {
                    continue;
                }
                out.add_component(&rows, c * &m)?;
            }
        }
        out.try_map_coeffs(|c| c.subst(&|i| inv[i].clone()))
    }
}

/// Increasing `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_pushforward() {
        let c = ChartSpec::new(&["x", "y"]).unwrap();
        let a = MultivectorField::from_components(&c, 2, [(vec![0, 1], ScalarExpr::var(0))]).unwrap();
        let id = ChartMap::identity(&c);
        assert_eq!(id.pushforward(&a, &ZeroTest::default()).unwrap(), a);
    }

    #[test]
    fn wrong_inverse_is_rejected() {
        let c = ChartSpec::new(&["x"]).unwrap();
        let two_x = ScalarExpr::int(2) * ScalarExpr::var(0);
        let r = ChartMap::new(&c, &c, vec![two_x.clone()], Some(vec![two_x]), &ZeroTest::default());
        assert!(matches!(r, Err(Error::ChartMap(_))));
    }

    #[test]
    fn missing_inverse_blocks_pushforward() {
        let c = ChartSpec::new(&["x"]).unwrap();
        let m = ChartMap::new(&c, &c, vec![ScalarExpr::var(0)], None, &ZeroTest::default()).unwrap();
        let a = MultivectorField::basis(&c, &[0]).unwrap();
        assert!(m.pushforward(&a, &ZeroTest::default()).is_err());
    }

    #[test]
    fn subsets_enumerates_combinations() {
        assert_eq!(subsets(4, 2).len(), 6);
        assert_eq!(subsets(3, 0), vec![Vec::<usize>::new()]);
    }
}
