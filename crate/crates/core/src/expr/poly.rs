//! Sparse multivariate polynomials over the rationals.
//!
//! The indeterminates are [`Atom`]s: chart coordinates, the constant pi, and
//! opaque `exp(..)` / `ln(..)` applications. Monomials are ordered graded
//! lexicographically, so the last key of a [`Poly`] is its leading term and
//! single-divisor division is exact whenever the divisor really divides.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::ScalarExpr;

pub type Rational = BigRational;

/// An indeterminate of the coefficient ring.
///
/// Variant order fixes the atom order used by the normal form: coordinates
/// first, then pi, then `exp` atoms (by argument), then `ln` atoms.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) enum Atom {
    Var(usize),
    Pi,
    Exp(ScalarExpr),
    Ln(ScalarExpr),
}

impl Atom {
    /// Atoms whose algebraic independence we can rely on for exact zero tests.
    pub(crate) fn is_algebraic_free(&self) -> bool {
        match self {
            Atom::Var(_) | Atom::Pi => true,
            Atom::Exp(_) | Atom::Ln(_) => false,
        }
    }

    pub(crate) fn depends_on(&self, var: usize) -> bool {
        match self {
            Atom::Var(i) => *i == var,
            Atom::Pi => false,
            Atom::Exp(a) | Atom::Ln(a) => a.depends_on(var),
        }
    }
}

/// A power product of atoms, kept sorted by atom with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub(crate) struct Mono(Vec<(Atom, u32)>);

impl Mono {
    pub(crate) fn one() -> Self {
        Mono(Vec::new())
    }

    pub(crate) fn atom(atom: Atom, exp: u32) -> Self {
        if exp == 0 {
            Mono::one()
        } else {
            Mono(vec![(atom, exp)])
        }
    }

    pub(crate) fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn factors(&self) -> &[(Atom, u32)] {
        &self.0
    }

    pub(crate) fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| u64::from(*e)).sum()
    }

    pub(crate) fn mul(&self, other: &Mono) -> Mono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Mono(out)
    }

    /// `self / other` when `other` divides `self`.
    pub(crate) fn div(&self, other: &Mono) -> Option<Mono> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for (atom, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < *atom {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == *atom {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((atom.clone(), e - f)),
                }
            } else {
                out.push((atom.clone(), *e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Mono(out))
    }

    pub(crate) fn exponent_of(&self, atom: &Atom) -> u32 {
        self.0.iter().find(|(a, _)| a == atom).map_or(0, |(_, e)| *e)
    }

    /// The monomial with every power of `atom` removed.
    pub(crate) fn without(&self, atom: &Atom) -> Mono {
        Mono(self.0.iter().filter(|(a, _)| a != atom).cloned().collect())
    }

    pub(crate) fn max_atom(&self) -> Option<&Atom> {
        self.0.last().map(|(a, _)| a)
    }

    /// Greatest common divisor (componentwise minimum exponent).
    pub(crate) fn gcd(&self, other: &Mono) -> Mono {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1.min(other.0[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        Mono(out)
    }

    /// The same monomial with one power of `atom` at position `idx` removed.
    pub(crate) fn lower_at(&self, idx: usize) -> Mono {
        let mut out = self.0.clone();
        if out[idx].1 == 1 {
            out.remove(idx);
        } else {
            out[idx].1 -= 1;
        }
        Mono(out)
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        // lex: the monomial with the larger exponent on the smallest differing
        // atom is the larger one
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some((a, e)), Some((b, f))) => match a.cmp(b) {
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                    Ordering::Equal => {
                        if e != f {
                            return e.cmp(f);
                        }
                        i += 1;
                        j += 1;
                    }
                },
            }
        }
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub(crate) struct Poly(BTreeMap<Mono, Rational>);

impl Poly {
    pub(crate) fn zero() -> Self {
        Poly(BTreeMap::new())
    }

    pub(crate) fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub(crate) fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Mono::one(), c);
        p
    }

    pub(crate) fn term(mono: Mono, c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(mono, c);
        p
    }

    pub(crate) fn atom(atom: Atom) -> Self {
        Poly::term(Mono::atom(atom, 1), Rational::one())
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub(crate) fn len(&self) -> usize {
        self.0.len()
    }

    pub(crate) fn terms(&self) -> impl DoubleEndedIterator<Item = (&Mono, &Rational)> {
        self.0.iter()
    }

    pub(crate) fn as_constant(&self) -> Option<Rational> {
        match self.0.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.0.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub(crate) fn leading(&self) -> Option<(&Mono, &Rational)> {
        self.0.iter().next_back()
    }

    pub(crate) fn add_term(&mut self, mono: Mono, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.0.get_mut(&mono) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.0.remove(&mono);
                }
            }
            None => {
                self.0.insert(mono, c);
            }
        }
    }

    pub(crate) fn add(&self, other: &Poly) -> Poly {
        let (mut big, small) = if self.len() >= other.len() {
            (self.clone(), other)
        } else {
            (other.clone(), self)
        };
        for (m, c) in small.terms() {
            big.add_term(m.clone(), c.clone());
        }
        big
    }

    pub(crate) fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(m, c)| (m.clone(), -c)).collect())
    }

    pub(crate) fn sub(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m.clone(), -c);
        }
        out
    }

    pub(crate) fn scale(&self, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.clone(), c * k)).collect())
    }

    pub(crate) fn mul_term(&self, mono: &Mono, k: &Rational) -> Poly {
        if k.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|(m, c)| (m.mul(mono), c * k)).collect())
    }

    pub(crate) fn mul(&self, other: &Poly) -> Poly {
        if let Some(c) = self.as_constant() {
            return other.scale(&c);
        }
        if let Some(c) = other.as_constant() {
            return self.scale(&c);
        }
        let mut out = Poly::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in other.terms() {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub(crate) fn pow(&self, mut exp: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / divisor`, or `None` if the division leaves a
    /// remainder.
    pub(crate) fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        let (lead_m, lead_c) = divisor.leading()?;
        if let Some(c) = divisor.as_constant() {
            return Some(self.scale(&c.recip()));
        }
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            if rm.degree() < lead_m.degree() {
                return None;
            }
            let m = rm.div(lead_m)?;
            let c = rc / lead_c;
            rem = rem.sub(&divisor.mul_term(&m, &c));
            quot.add_term(m, c);
        }
        Some(quot)
    }

    /// Splits off the leading coefficient: `self = c * monic`.
    pub(crate) fn monic(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::zero(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&c.recip()))
            }
        }
    }

    /// Largest monomial dividing every term.
    pub(crate) fn monomial_content(&self) -> Mono {
        let mut it = self.0.keys();
        let Some(first) = it.next() else {
            return Mono::one();
        };
        let mut g = first.clone();
        for m in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub(crate) fn div_mono(&self, mono: &Mono) -> Poly {
        Poly(
            self.0
                .iter()
                .map(|(m, c)| (m.div(mono).expect("monomial content divides"), c.clone()))
                .collect(),
        )
    }

    pub(crate) fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.0.keys().flat_map(|m| m.factors().iter().map(|(a, _)| a))
    }

    pub(crate) fn is_algebraic_free(&self) -> bool {
        self.atoms().all(Atom::is_algebraic_free)
    }

    pub(crate) fn depends_on(&self, var: usize) -> bool {
        self.atoms().any(|a| a.depends_on(var))
    }

    /// True when every coefficient is non-negative and at least one is
    /// positive, with only coordinates and pi as atoms. Such a polynomial is
    /// strictly positive on the open positive orthant.
    pub(crate) fn positive_on_orthant(&self) -> bool {
        !self.is_zero()
            && self.terms().all(|(_, c)| !c.is_negative())
            && self.atoms().all(|a| matches!(a, Atom::Var(_) | Atom::Pi))
    }
}

pub(crate) fn rational_from_i64(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::atom(Atom::Var(i))
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Mono::atom(Atom::Var(0), 1);
        let b = Mono::atom(Atom::Var(1), 2);
        assert!(b > a);
        let c = Mono::atom(Atom::Var(0), 1).mul(&Mono::atom(Atom::Var(1), 1));
        // x0*x1 vs x1^2: same degree, x0 exponent decides
        assert!(c > b);
    }

    #[test]
    fn exact_division_and_failure() {
        let one = Poly::one();
        let f = x(0).add(&one);
        let g = f.mul(&x(1).sub(&one)).mul(&f);
        let q = g.div_exact(&f).unwrap();
        assert_eq!(q.mul(&f), g);
        assert!(x(0).add(&x(1)).div_exact(&f).is_none());
    }

    #[test]
    fn monomial_content_is_gcd() {
        let p = x(0).mul(&x(0)).mul(&x(1)).add(&x(0).mul(&x(1)).mul(&x(1)));
        let g = p.monomial_content();
        assert_eq!(Poly::term(g, Rational::one()), x(0).mul(&x(1)));
    }
}
