//! Exact scalar expressions over chart coordinates.
//!
//! A [`ScalarExpr`] is kept in a normal form: a quotient of a polynomial in
//! atoms (coordinates, pi, `exp(..)`, `ln(..)`) by a product of monic
//! polynomial factors. Arithmetic renormalizes eagerly, so structural equality
//! of two normal forms implies equality of the functions.

mod gcd;
mod poly;
mod tree;
mod zero;

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use poly::{Atom, Mono, Poly};

pub use poly::Rational;
pub use tree::ExprTree;
pub use zero::{Value, ZeroTest, ZeroVerdict};

pub(crate) use poly::rational_from_i64;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct RatFn {
    num: Poly,
    /// Monic, squarefree, pairwise coprime factors sorted ascending, each
    /// coprime to `num`.
    den: Vec<(Poly, u32)>,
}

/// An exact scalar function on a chart.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ScalarExpr(Arc<RatFn>);

impl ScalarExpr {
    fn from_parts(num: Poly, den: Vec<(Poly, u32)>) -> Self {
        let mut r = RatFn { num, den };
        r.reduce();
        ScalarExpr(Arc::new(r))
    }

    fn from_poly(p: Poly) -> Self {
        ScalarExpr(Arc::new(RatFn {
            num: p,
            den: Vec::new(),
        }))
    }

    pub fn zero() -> Self {
        Self::from_poly(Poly::zero())
    }

    pub fn one() -> Self {
        Self::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_poly(Poly::constant(c))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(rational_from_i64(n))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::constant(rational_from_i64(n) / rational_from_i64(d))
    }

    /// The coordinate with index `i`.
    pub fn var(i: usize) -> Self {
        Self::from_poly(Poly::atom(Atom::Var(i)))
    }

    pub fn pi() -> Self {
        Self::from_poly(Poly::atom(Atom::Pi))
    }

    pub fn exp(arg: &ScalarExpr) -> Self {
        if arg.is_structural_zero() {
            return Self::one();
        }
        Self::from_poly(Poly::atom(Atom::Exp(arg.clone())))
    }

    pub fn ln(arg: &ScalarExpr) -> Result<Self> {
        if let Some(c) = arg.as_rational() {
            if !c.is_positive() {
                return Err(Error::LogDomain);
            }
            if c.is_one() {
                return Ok(Self::zero());
            }
        }
        Ok(Self::from_poly(Poly::atom(Atom::Ln(arg.clone()))))
    }

    pub fn is_structural_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn as_rational(&self) -> Option<Rational> {
        if self.0.den.is_empty() {
            self.0.num.as_constant()
        } else {
            None
        }
    }

    /// True when no `exp` or `ln` atoms occur, so that zero tests are exact.
    pub fn is_rational_function(&self) -> bool {
        self.0.num.is_algebraic_free() && self.0.den.iter().all(|(f, _)| f.is_algebraic_free())
    }

    /// True when the expression is a polynomial in coordinates and pi.
    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_empty() && self.0.num.is_algebraic_free()
    }

    /// True when the expression is a rational constant or involves only pi.
    pub fn is_constant(&self) -> bool {
        self.max_var().is_none()
    }

    pub fn depends_on(&self, var: usize) -> bool {
        self.0.num.depends_on(var) || self.0.den.iter().any(|(f, _)| f.depends_on(var))
    }

    /// Largest coordinate index occurring anywhere in the expression.
    pub fn max_var(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        self.visit_vars(&mut |i| best = Some(best.map_or(i, |b: usize| b.max(i))));
        best
    }

    fn visit_vars(&self, f: &mut dyn FnMut(usize)) {
        let polys = std::iter::once(&self.0.num).chain(self.0.den.iter().map(|(p, _)| p));
        for p in polys {
            for atom in p.atoms() {
                match atom {
                    Atom::Var(i) => f(*i),
                    Atom::Pi => {}
                    Atom::Exp(a) | Atom::Ln(a) => a.visit_vars(f),
                }
            }
        }
    }

    pub fn checked_div(&self, other: &ScalarExpr) -> Result<ScalarExpr> {
        Ok(self * &other.recip()?)
    }

    pub fn recip(&self) -> Result<ScalarExpr> {
        let r = &self.0;
        if r.num.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let mut num = Poly::one();
        for (f, k) in &r.den {
            num = num.mul(&f.pow(*k));
        }
        let (c, rest) = r.num.monic();
        let content = rest.monomial_content();
        let rest = rest.div_mono(&content);
        let mut den: Vec<(Poly, u32)> = content
            .factors()
            .iter()
            .map(|(a, e)| (Poly::atom(a.clone()), *e))
            .collect();
        if rest.as_constant().is_none() {
            den.push((rest, 1));
        }
        den.sort();
        Ok(Self::from_parts(num.scale(&c.recip()), den))
    }

    pub fn powi(&self, n: i32) -> Result<ScalarExpr> {
        if n < 0 {
            return self.recip()?.powi(-n);
        }
        let n = n as u32;
        let r = &self.0;
        let den = r.den.iter().map(|(f, k)| (f.clone(), k * n)).collect();
        Ok(ScalarExpr(Arc::new(RatFn {
            num: r.num.pow(n),
            den,
        })))
    }

    pub fn scale(&self, k: &Rational) -> ScalarExpr {
        if k.is_zero() {
            return Self::zero();
        }
        ScalarExpr(Arc::new(RatFn {
            num: self.0.num.scale(k),
            den: self.0.den.clone(),
        }))
    }

    /// Partial derivative with respect to coordinate `i`.
    pub fn diff(&self, i: usize) -> ScalarExpr {
        let r = &self.0;
        if !self.depends_on(i) {
            return Self::zero();
        }
        let dn = diff_poly(&r.num, i);
        let mut out = if r.den.is_empty() {
            dn
        } else {
            &dn * &Self::from_parts(Poly::one(), r.den.clone())
        };
        for (idx, (f, k)) in r.den.iter().enumerate() {
            if !f.depends_on(i) {
                continue;
            }
            // d(f^-k) = -k f' f^-(k+1)
            let mut den = r.den.clone();
            den[idx].1 += 1;
            let coeff = Self::from_parts(r.num.scale(&-rational_from_i64(i64::from(*k))), den);
            out = &out + &(&coeff * &diff_poly(f, i));
        }
        out
    }

    /// Replaces every coordinate `i` by `f(i)`.
    pub fn subst(&self, f: &dyn Fn(usize) -> ScalarExpr) -> Result<ScalarExpr> {
        let mut cache = HashMap::new();
        self.subst_cached(f, &mut cache)
    }

    fn subst_cached(
        &self,
        f: &dyn Fn(usize) -> ScalarExpr,
        cache: &mut HashMap<Atom, ScalarExpr>,
    ) -> Result<ScalarExpr> {
        let r = &self.0;
        let mut out = subst_poly(&r.num, f, cache)?;
        for (p, k) in &r.den {
            let v = subst_poly(p, f, cache)?;
            out = out.checked_div(&v.powi(*k as i32)?)?;
        }
        Ok(out)
    }

    /// Substitutes rational values for some coordinates.
    pub fn subst_values(&self, values: &[(usize, Rational)]) -> Result<ScalarExpr> {
        self.subst(&|i| {
            values
                .iter()
                .find(|(j, _)| *j == i)
                .map_or_else(|| ScalarExpr::var(i), |(_, v)| ScalarExpr::constant(v.clone()))
        })
    }

    /// Renames coordinates through `f`; used for pullbacks along projections.
    pub fn reindex(&self, f: &dyn Fn(usize) -> usize) -> ScalarExpr {
        self.subst(&|i| ScalarExpr::var(f(i)))
            .expect("renaming coordinates cannot introduce poles")
    }

    /// Coefficients `[c0, c1, ..]` with `self = sum c_k x_var^k`, when `self`
    /// is polynomial in `var` with coefficients free of `var`.
    pub fn coefficients_in(&self, var: usize) -> Option<Vec<ScalarExpr>> {
        let r = &self.0;
        if r.den.iter().any(|(f, _)| f.depends_on(var)) {
            return None;
        }
        let target = Atom::Var(var);
        let mut parts: Vec<Poly> = Vec::new();
        for (m, c) in r.num.terms() {
            let mut exp = 0u32;
            let mut rest = Mono::one();
            for (a, e) in m.factors() {
                if *a == target {
                    exp = *e;
                } else if a.depends_on(var) {
                    return None;
                } else {
                    rest = rest.mul(&Mono::atom(a.clone(), *e));
                }
            }
            let k = exp as usize;
            if parts.len() <= k {
                parts.resize(k + 1, Poly::zero());
            }
            parts[k].add_term(rest, c.clone());
        }
        if parts.is_empty() {
            parts.push(Poly::zero());
        }
        Some(
            parts
                .into_iter()
                .map(|p| Self::from_parts(p, r.den.clone()))
                .collect(),
        )
    }

    /// Total degree in the given coordinates when the expression is a
    /// polynomial in them (other atoms may appear in coefficients).
    pub fn degree_in(&self, vars: &[usize]) -> Option<u32> {
        let r = &self.0;
        if r.den.iter().any(|(f, _)| vars.iter().any(|v| f.depends_on(*v))) {
            return None;
        }
        let mut best = 0;
        for (m, _) in r.num.terms() {
            let mut deg = 0;
            for (a, e) in m.factors() {
                match a {
                    Atom::Var(i) if vars.contains(i) => deg += e,
                    _ if vars.iter().any(|v| a.depends_on(*v)) => return None,
                    _ => {}
                }
            }
            best = best.max(deg);
        }
        Some(best)
    }

    /// A sufficient certificate that the expression is strictly positive on
    /// the open positive orthant: numerator and every denominator factor have
    /// non-negative coefficients in coordinates and pi.
    pub fn positive_on_orthant(&self) -> bool {
        self.0.num.positive_on_orthant() && self.0.den.iter().all(|(f, _)| f.positive_on_orthant())
    }

    /// Numerator and denominator as separate expressions.
    pub fn numer_denom(&self) -> (ScalarExpr, ScalarExpr) {
        let mut den = Poly::one();
        for (f, k) in &self.0.den {
            den = den.mul(&f.pow(*k));
        }
        (Self::from_poly(self.0.num.clone()), Self::from_poly(den))
    }

    /// Renders with the given coordinate names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named { expr: self, names }
    }

    pub fn render(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

struct Named<'a> {
    expr: &'a ScalarExpr,
    names: &'a [String],
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tree = self.expr.to_tree();
        f.write_str(&tree.render(&|i| {
            self.names
                .get(i)
                .cloned()
                .unwrap_or_else(|| format!("x{i}"))
        }))
    }
}

impl fmt::Display for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_tree().render(&|i| format!("x{i}")))
    }
}

impl fmt::Debug for ScalarExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Default for ScalarExpr {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ScalarExpr {
    fn from(n: i64) -> Self {
        Self::int(n)
    }
}

impl From<Rational> for ScalarExpr {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl RatFn {
    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den.clear();
            return;
        }
        if self.den.is_empty() {
            return;
        }
        gcd::normalize_fraction(&mut self.num, &mut self.den);
    }
}

fn merge_dens(a: &[(Poly, u32)], b: &[(Poly, u32)]) -> Vec<(Poly, u32)> {
    let mut out: Vec<(Poly, u32)> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ord = match (a.get(i), b.get(j)) {
            (Some(x), Some(y)) => x.0.cmp(&y.0),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, _) => std::cmp::Ordering::Greater,
        };
        match ord {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push((a[i].0.clone(), a[i].1 + b[j].1));
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Product of `factors` raised to the part of their exponents missing from
/// `have` relative to `want`.
fn cofactor(have: &[(Poly, u32)], want: &[(Poly, u32)]) -> Poly {
    let mut out = Poly::one();
    for (f, k) in want {
        let h = have
            .iter()
            .find(|(g, _)| g == f)
            .map_or(0, |(_, e)| *e);
        if *k > h {
            out = out.mul(&f.pow(k - h));
        }
    }
    out
}

fn add_ratfn(a: &RatFn, b: &RatFn) -> ScalarExpr {
    if a.num.is_zero() {
        return ScalarExpr(Arc::new(b.clone()));
    }
    if b.num.is_zero() {
        return ScalarExpr(Arc::new(a.clone()));
    }
    if a.den == b.den {
        let num = a.num.add(&b.num);
        return ScalarExpr::from_parts(num, a.den.clone());
    }
    // least common denominator by maximal exponents
    let mut den = merge_dens(&a.den, &b.den);
    for (f, k) in den.iter_mut() {
        let ea = a.den.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e);
        let eb = b.den.iter().find(|(g, _)| g == f).map_or(0, |(_, e)| *e);
        *k = ea.max(eb);
    }
    let num = a
        .num
        .mul(&cofactor(&a.den, &den))
        .add(&b.num.mul(&cofactor(&b.den, &den)));
    ScalarExpr::from_parts(num, den)
}

fn mul_ratfn(a: &RatFn, b: &RatFn) -> ScalarExpr {
    if a.num.is_zero() || b.num.is_zero() {
        return ScalarExpr::zero();
    }
    let num = a.num.mul(&b.num);
    if a.den.is_empty() && b.den.is_empty() {
        return ScalarExpr::from_poly(num);
    }
    ScalarExpr::from_parts(num, merge_dens(&a.den, &b.den))
}

fn diff_atom(atom: &Atom, i: usize) -> ScalarExpr {
    match atom {
        Atom::Var(j) => {
            if *j == i {
                ScalarExpr::one()
            } else {
                ScalarExpr::zero()
            }
        }
        Atom::Pi => ScalarExpr::zero(),
        Atom::Exp(a) => &ScalarExpr::from_poly(Poly::atom(atom.clone())) * &a.diff(i),
        Atom::Ln(a) => a
            .diff(i)
            .checked_div(a)
            .expect("logarithm arguments are nonzero"),
    }
}

fn diff_poly(p: &Poly, i: usize) -> ScalarExpr {
    let mut plain = Poly::zero();
    let mut rest = ScalarExpr::zero();
    for (m, c) in p.terms() {
        for (idx, (atom, e)) in m.factors().iter().enumerate() {
            if !atom.depends_on(i) {
                continue;
            }
            let k = c * rational_from_i64(i64::from(*e));
            let lowered = m.lower_at(idx);
            match atom {
                Atom::Var(_) => plain.add_term(lowered, k),
                _ => {
                    let part = ScalarExpr::from_poly(Poly::term(lowered, k));
                    rest = &rest + &(&part * &diff_atom(atom, i));
                }
            }
        }
    }
    &ScalarExpr::from_poly(plain) + &rest
}

fn subst_atom(
    atom: &Atom,
    f: &dyn Fn(usize) -> ScalarExpr,
    cache: &mut HashMap<Atom, ScalarExpr>,
) -> Result<ScalarExpr> {
    if let Some(v) = cache.get(atom) {
        return Ok(v.clone());
    }
    let v = match atom {
        Atom::Var(i) => f(*i),
        Atom::Pi => ScalarExpr::pi(),
        Atom::Exp(a) => ScalarExpr::exp(&a.subst_cached(f, cache)?),
        Atom::Ln(a) => ScalarExpr::ln(&a.subst_cached(f, cache)?)?,
    };
    cache.insert(atom.clone(), v.clone());
    Ok(v)
}

fn subst_poly(
    p: &Poly,
    f: &dyn Fn(usize) -> ScalarExpr,
    cache: &mut HashMap<Atom, ScalarExpr>,
) -> Result<ScalarExpr> {
    let mut out = ScalarExpr::zero();
    for (m, c) in p.terms() {
        let mut term = ScalarExpr::constant(c.clone());
        for (atom, e) in m.factors() {
            let v = subst_atom(atom, f, cache)?;
            term = &term * &v.powi(*e as i32)?;
        }
        out = &out + &term;
    }
    Ok(out)
}

impl Add for &ScalarExpr {
    type Output = ScalarExpr;
    fn add(self, rhs: &ScalarExpr) -> ScalarExpr {
        add_ratfn(&self.0, &rhs.0)
    }
}

impl Sub for &ScalarExpr {
    type Output = ScalarExpr;
    fn sub(self, rhs: &ScalarExpr) -> ScalarExpr {
        self + &(-rhs)
    }
}

impl Mul for &ScalarExpr {
    type Output = ScalarExpr;
    fn mul(self, rhs: &ScalarExpr) -> ScalarExpr {
        mul_ratfn(&self.0, &rhs.0)
    }
}

impl Neg for &ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        ScalarExpr(Arc::new(RatFn {
            num: self.0.num.neg(),
            den: self.0.den.clone(),
        }))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr { (&self).$m(&rhs) }
        }
        impl $tr<&ScalarExpr> for ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: &ScalarExpr) -> ScalarExpr { (&self).$m(rhs) }
        }
        impl $tr<ScalarExpr> for &ScalarExpr {
            type Output = ScalarExpr;
            fn $m(self, rhs: ScalarExpr) -> ScalarExpr { self.$m(&rhs) }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for ScalarExpr {
    type Output = ScalarExpr;
    fn neg(self) -> ScalarExpr {
        -&self
    }
}

impl std::iter::Sum for ScalarExpr {
    fn sum<I: Iterator<Item = ScalarExpr>>(iter: I) -> Self {
        iter.fold(ScalarExpr::zero(), |a, b| &a + &b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> ScalarExpr {
        ScalarExpr::var(0)
    }
    fn y() -> ScalarExpr {
        ScalarExpr::var(1)
    }
    fn z() -> ScalarExpr {
        ScalarExpr::var(2)
    }

    #[test]
    fn power_rule() {
        let e = x().powi(2).unwrap();
        assert_eq!(e.diff(0), ScalarExpr::int(2) * x());
    }

    #[test]
    fn exp_derivative() {
        let e = ScalarExpr::exp(&z());
        assert_eq!(e.diff(2), e);
    }

    #[test]
    fn casimir_gradient() {
        let f = ScalarExpr::one()
            + x().powi(2).unwrap()
            + y().powi(2).unwrap()
            + z().powi(2).unwrap();
        assert_eq!(f.diff(0), ScalarExpr::int(2) * x());
    }

    #[test]
    fn commutativity_normalizes() {
        let e = x() * y() - y() * x();
        assert!(e.is_structural_zero());
    }

    #[test]
    fn quotient_cancels() {
        let one = ScalarExpr::one();
        let num = x().powi(2).unwrap() - one.clone();
        let den = x() + one.clone();
        let q = num.checked_div(&den).unwrap();
        assert_eq!(q, x() - one);
    }

    #[test]
    fn quotient_rule() {
        // d/dx x/(1+x^2) = (1-x^2)/(1+x^2)^2
        let one = ScalarExpr::one();
        let den = &one + &x().powi(2).unwrap();
        let e = x().checked_div(&den).unwrap();
        let expected = (&one - &x().powi(2).unwrap())
            .checked_div(&den.powi(2).unwrap())
            .unwrap();
        assert!((e.diff(0) - expected).is_structural_zero());
    }

    #[test]
    fn ln_derivative_and_domain() {
        let one = ScalarExpr::one();
        let l = ScalarExpr::ln(&(&one + &x())).unwrap();
        let d = l.diff(0);
        assert_eq!(d, one.checked_div(&(&one + &x())).unwrap());
        assert_eq!(ScalarExpr::ln(&ScalarExpr::zero()), Err(Error::LogDomain));
        assert!(ScalarExpr::ln(&one).unwrap().is_structural_zero());
    }

    #[test]
    fn division_by_zero_rejected() {
        assert_eq!(x().checked_div(&ScalarExpr::zero()), Err(Error::DivisionByZero));
    }

    #[test]
    fn substitution_into_pole_errors() {
        let e = ScalarExpr::one().checked_div(&x()).unwrap();
        assert_eq!(
            e.subst(&|_| ScalarExpr::zero()),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn pi_cancels_in_quotients() {
        let four_pi = ScalarExpr::int(4) * ScalarExpr::pi();
        let one = ScalarExpr::one();
        let v = (&four_pi * &x())
            .checked_div(&(&one + &x().powi(2).unwrap()))
            .unwrap();
        let r = v.checked_div(&four_pi).unwrap();
        let expected = x().checked_div(&(&one + &x().powi(2).unwrap())).unwrap();
        assert_eq!(r, expected);
    }

    #[test]
    fn coefficients_in_splits_powers() {
        let e = ScalarExpr::int(3) + ScalarExpr::int(2) * (&x() * &y()) + x().powi(2).unwrap();
        let c = e.coefficients_in(0).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(c[1], ScalarExpr::int(2) * y());
        assert!(ScalarExpr::exp(&x()).coefficients_in(0).is_none());
    }
}
