//! Schouten-Nijenhuis bracket and Lie derivatives.
//!
//! Multivectors are treated as superfunctions in odd variables `t_i` standing
//! for `d_i`. With right derivatives in the odd variables,
//!
//! `[P,Q]_t = sum_i (dP/dt_i)(d_i Q) - (-1)^{(p-1)(q-1)} (dQ/dt_i)(d_i P)`
//!
//! and the bracket used here is `(-1)^{(p-1)(q-1)} [P,Q]_t`. On vector fields
//! this is the Lie bracket, `[X,f] = Xf`, and for a bivector `L`
//! `-1/2 [L,L](a,b,c) = L(dL(a,b),c) + <a,[Lb,Lc]> + cyclic` holds for all
//! 1-forms with first-slot contraction (see [`bivector_identity_defect`]).

use std::collections::BTreeMap;

use super::{d, position, wedge_sign, Blade, DifferentialForm, MultivectorField};
use crate::error::Result;
use crate::expr::ScalarExpr;

fn odd_parity(p: usize, q: usize) -> bool {
    ((p as i64 - 1) * (q as i64 - 1)).rem_euclid(2) == 1
}

/// Accumulates `sign * (dA/dt_i) * (d_i B)` over all `i` into `out`.
fn half_bracket(
    a: &MultivectorField,
    b_derivs: &BTreeMap<(usize, Blade), ScalarExpr>,
    negate: bool,
    out: &mut BTreeMap<Blade, ScalarExpr>,
) {
    let k = a.degree();
    for (ia, ca) in a.blades() {
        let mut rest = *ia;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            // right derivative: move t_i to the end past k-1-m odd factors
            let m = position(*ia, i);
            let mut neg = (k - 1 - m) % 2 == 1;
            neg ^= negate;
            let reduced = ia & !(1 << i);
            for ((j, ib), db) in b_derivs.range((i, 0)..=(i, Blade::MAX)) {
                debug_assert_eq!(*j, i);
                let Some(shuffle) = wedge_sign(reduced, *ib) else {
                    continue;
                };
                let v = ca * db;
                let v = if neg ^ shuffle { -v } else { v };
                let key = reduced | ib;
                let sum = match out.remove(&key) {
                    Some(old) => &old + &v,
                    None => v,
                };
                if !sum.is_structural_zero() {
                    out.insert(key, sum);
                }
            }
        }
    }
}

fn derivatives(f: &MultivectorField) -> BTreeMap<(usize, Blade), ScalarExpr> {
    let mut out = BTreeMap::new();
    for (b, c) in f.blades() {
        for i in 0..f.chart().dim() {
            if c.depends_on(i) {
                out.insert((i, *b), c.diff(i));
            }
        }
    }
    out
}

/// Schouten-Nijenhuis bracket of degree `a + b - 1`.
pub fn schouten(a: &MultivectorField, b: &MultivectorField) -> Result<MultivectorField> {
    a.chart().ensure_same(b.chart())?;
    let (p, q) = (a.degree(), b.degree());
    if p + q == 0 {
        return Ok(MultivectorField::zero(a.chart(), 0));
    }
    let odd = odd_parity(p, q);
    let mut comps = BTreeMap::new();
    // overall factor (-1)^{(p-1)(q-1)} folded into both halves
    half_bracket(a, &derivatives(b), odd, &mut comps);
    half_bracket(b, &derivatives(a), true, &mut comps);
    let mut out = MultivectorField::zero(a.chart(), p + q - 1);
    for (blade, c) in comps {
        out.insert(blade, c);
    }
    Ok(out)
}

/// `-1/2 [L,L](a,b,c)` minus `L(dL(a,b),c) + <a,[Lb,Lc]> + cyclic`, with the
/// right side built from contractions, `d` and Lie brackets of vector fields.
pub fn bivector_identity_defect(
    l: &MultivectorField,
    a: &DifferentialForm,
    b: &DifferentialForm,
    c: &DifferentialForm,
) -> Result<ScalarExpr> {
    if l.degree() != 2 {
        return Err(crate::error::Error::Degree("expected a bivector".into()));
    }
    let lhs = schouten(l, l)?.eval(&[a, b, c])?.scale(&crate::expr::Rational::new((-1).into(), 2.into()));
    let mut rhs = ScalarExpr::zero();
    for (x, y, z) in [(a, b, c), (b, c, a), (c, a, b)] {
        let pairing = DifferentialForm::exact(l.chart(), &l.eval(&[x, y])?)?;
        rhs = rhs + l.eval(&[&pairing, z])?;
        let bracket = schouten(&l.contract(y)?, &l.contract(z)?)?;
        rhs = rhs + bracket.eval(&[x])?;
    }
    Ok(lhs - rhs)
}

/// Lie derivative along a vector field.
pub trait LieDerivative: Sized {
    fn lie_derivative_along(&self, x: &MultivectorField) -> Result<Self>;
}

impl LieDerivative for MultivectorField {
    fn lie_derivative_along(&self, x: &MultivectorField) -> Result<Self> {
        schouten(x, self)
    }
}

impl LieDerivative for DifferentialForm {
    /// Cartan's formula `L_X = i_X d + d i_X`.
    fn lie_derivative_along(&self, x: &MultivectorField) -> Result<Self> {
        let first = d(self)?.contract(x)?;
        if self.degree() == 0 {
            return Ok(first);
        }
        first.add(&d(&self.contract(x)?)?)
    }
}

pub fn lie_derivative<T: LieDerivative>(x: &MultivectorField, a: &T) -> Result<T> {
    if x.degree() != 1 {
        return Err(crate::error::Error::Degree(format!(
            "Lie derivative along a degree-{} field",
            x.degree()
        )));
    }
    a.lie_derivative_along(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::ChartSpec;
    use crate::expr::ZeroTest;

    fn xyz() -> ChartSpec {
        ChartSpec::new(&["x", "y", "z"]).unwrap()
    }

    fn so3(c: &ChartSpec) -> MultivectorField {
        let v = ScalarExpr::var;
        MultivectorField::from_components(
            c,
            2,
            [(vec![1, 2], v(0)), (vec![2, 0], v(1)), (vec![0, 1], v(2))],
        )
        .unwrap()
    }

    #[test]
    fn so3_is_poisson() {
        let c = xyz();
        let p = so3(&c);
        assert!(schouten(&p, &p).unwrap().is_structural_zero());
    }

    #[test]
    fn vector_on_function_is_derivative() {
        let c = xyz();
        let x = MultivectorField::basis(&c, &[0]).unwrap();
        let f = MultivectorField::scalar(&c, ScalarExpr::var(0).powi(2).unwrap());
        let r = schouten(&x, &f).unwrap();
        assert_eq!(r.as_scalar().unwrap(), ScalarExpr::int(2) * ScalarExpr::var(0));
        let r = schouten(&f, &x).unwrap();
        assert_eq!(r.as_scalar().unwrap(), ScalarExpr::int(-2) * ScalarExpr::var(0));
        assert!(schouten(&f, &f).unwrap().is_structural_zero());
    }

    #[test]
    fn vector_fields_give_lie_bracket() {
        let c = xyz();
        let v = ScalarExpr::var;
        let x = MultivectorField::vector(&c, &[v(1), ScalarExpr::zero(), ScalarExpr::zero()]).unwrap();
        let y = MultivectorField::vector(&c, &[ScalarExpr::zero(), v(0), ScalarExpr::zero()]).unwrap();
        // [y d_x, x d_y] = y d_y - x d_x
        let r = schouten(&x, &y).unwrap();
        assert_eq!(r.component(&[0]), -v(0));
        assert_eq!(r.component(&[1]), v(1));
    }

    #[test]
    fn lie_derivative_of_weighted_bivector() {
        let c = ChartSpec::new(&["u", "v", "z"]).unwrap();
        let dz = MultivectorField::basis(&c, &[2]).unwrap();
        let b = MultivectorField::basis(&c, &[0, 1])
            .unwrap()
            .scale(&ScalarExpr::exp(&ScalarExpr::var(2)));
        assert_eq!(lie_derivative(&dz, &b).unwrap(), b);
        let du = MultivectorField::basis(&c, &[0]).unwrap();
        let uv = MultivectorField::basis(&c, &[0, 1]).unwrap();
        assert!(lie_derivative(&du, &uv).unwrap().is_structural_zero());
    }

    #[test]
    fn hand_expanded_self_bracket() {
        // For L = x d_y^d_z the only derivative is d_x L = d_y^d_z, and t_x
        // never occurs in L, so every term carries a factor (dL/dt_x) = 0.
        let c = xyz();
        let l = MultivectorField::from_components(&c, 2, [(vec![1, 2], ScalarExpr::var(0))]).unwrap();
        assert!(schouten(&l, &l).unwrap().is_structural_zero());
        // L = x d_x^d_y + y d_y^d_z: the Jacobiator of {x,y}=x, {y,z}=y is x,
        // and [L,L](dx,dy,dz) = -2 * Jacobiator
        let l = MultivectorField::from_components(
            &c,
            2,
            [(vec![0, 1], ScalarExpr::var(0)), (vec![1, 2], ScalarExpr::var(1))],
        )
        .unwrap();
        let t = schouten(&l, &l).unwrap();
        assert_eq!(t.components().len(), 1);
        assert_eq!(t.component(&[0, 1, 2]), ScalarExpr::int(-2) * ScalarExpr::var(0));
        assert!(!t.check_zero(&ZeroTest::default()).unwrap().holds);
    }

    #[test]
    fn cartan_formula_on_functions() {
        let c = xyz();
        let v = ScalarExpr::var;
        let x = MultivectorField::vector(&c, &[v(1), v(2), ScalarExpr::one()]).unwrap();
        let f = &v(0) * &v(0) + v(2);
        let lf = lie_derivative(&x, &DifferentialForm::scalar(&c, f.clone())).unwrap();
        assert_eq!(lf.as_scalar().unwrap(), x.apply(&f).unwrap());
    }
}
