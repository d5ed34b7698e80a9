//! Explicit expression trees: the bridge between parsed surface syntax and
//! the normal form, and the basis of the printer.

use num_traits::{One, Signed};

use super::poly::{Atom, Mono, Poly, Rational};
use super::ScalarExpr;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExprTree {
    Const(Rational),
    Var(usize),
    Pi,
    Neg(Box<ExprTree>),
    Sum(Vec<ExprTree>),
    Product(Vec<ExprTree>),
    Quotient(Box<ExprTree>, Box<ExprTree>),
    Power(Box<ExprTree>, i32),
    Exp(Box<ExprTree>),
    Ln(Box<ExprTree>),
}

impl ExprTree {
    pub fn to_expr(&self) -> Result<ScalarExpr> {
        ScalarExpr::from_tree(self)
    }

    /// Surface syntax accepted by the definition-file parser.
    pub fn render(&self, name: &dyn Fn(usize) -> String) -> String {
        let mut s = String::new();
        write_tree(self, name, 0, &mut s);
        s
    }
}

const PREC_SUM: u8 = 1;
const PREC_PRODUCT: u8 = 2;
const PREC_UNARY: u8 = 3;
const PREC_POWER: u8 = 4;
const PREC_ATOM: u8 = 5;

fn precedence(t: &ExprTree) -> u8 {
    match t {
        ExprTree::Const(c) => {
            if c.is_negative() {
                PREC_UNARY
            } else if c.is_integer() {
                PREC_ATOM
            } else {
                PREC_PRODUCT
            }
        }
        ExprTree::Var(_) | ExprTree::Pi | ExprTree::Exp(_) | ExprTree::Ln(_) => PREC_ATOM,
        ExprTree::Neg(_) => PREC_UNARY,
        ExprTree::Sum(v) if v.len() == 1 => precedence(&v[0]),
        ExprTree::Sum(_) => PREC_SUM,
        ExprTree::Product(v) if v.len() == 1 => precedence(&v[0]),
        ExprTree::Product(_) | ExprTree::Quotient(..) => PREC_PRODUCT,
        ExprTree::Power(..) => PREC_POWER,
    }
}

fn write_wrapped(t: &ExprTree, name: &dyn Fn(usize) -> String, min: u8, out: &mut String) {
    if precedence(t) < min {
        out.push('(');
        write_tree(t, name, 0, out);
        out.push(')');
    } else {
        write_tree(t, name, min, out);
    }
}

fn write_tree(t: &ExprTree, name: &dyn Fn(usize) -> String, _ctx: u8, out: &mut String) {
    match t {
        ExprTree::Const(c) => {
            if c.is_integer() {
                out.push_str(&c.numer().to_string());
            } else {
                out.push_str(&format!("{}/{}", c.numer(), c.denom()));
            }
        }
        ExprTree::Var(i) => out.push_str(&name(*i)),
        ExprTree::Pi => out.push_str("pi"),
        ExprTree::Neg(a) => {
            out.push('-');
            write_wrapped(a, name, PREC_PRODUCT, out);
        }
        ExprTree::Sum(terms) => {
            if terms.is_empty() {
                out.push('0');
            }
            for (k, term) in terms.iter().enumerate() {
                if k == 0 {
                    write_wrapped(term, name, PREC_SUM, out);
                    continue;
                }
                match term {
                    ExprTree::Neg(inner) => {
                        out.push_str(" - ");
                        write_wrapped(inner, name, PREC_PRODUCT, out);
                    }
                    ExprTree::Const(c) if c.is_negative() => {
                        out.push_str(" - ");
                        write_tree(&ExprTree::Const(-c), name, PREC_PRODUCT, out);
                    }
                    _ => {
                        out.push_str(" + ");
                        write_wrapped(term, name, PREC_PRODUCT, out);
                    }
                }
            }
        }
        ExprTree::Product(factors) => {
            if factors.is_empty() {
                out.push('1');
            }
            for (k, f) in factors.iter().enumerate() {
                if k > 0 {
                    out.push('*');
                }
                // a fraction literal after the first factor would re-associate
                let min = if k == 0 { PREC_PRODUCT } else { PREC_POWER };
                write_wrapped(f, name, min, out);
            }
        }
        ExprTree::Quotient(n, d) => {
            write_wrapped(n, name, PREC_PRODUCT, out);
            out.push('/');
            write_wrapped(d, name, PREC_POWER, out);
        }
        ExprTree::Power(b, k) => {
            write_wrapped(b, name, PREC_ATOM, out);
            if *k < 0 {
                out.push_str(&format!("^({k})"));
            } else {
                out.push_str(&format!("^{k}"));
            }
        }
        ExprTree::Exp(a) => {
            out.push_str("exp(");
            write_tree(a, name, 0, out);
            out.push(')');
        }
        ExprTree::Ln(a) => {
            out.push_str("ln(");
            write_tree(a, name, 0, out);
            out.push(')');
        }
    }
}

fn atom_tree(a: &Atom) -> ExprTree {
    match a {
        Atom::Var(i) => ExprTree::Var(*i),
        Atom::Pi => ExprTree::Pi,
        Atom::Exp(u) => ExprTree::Exp(Box::new(u.to_tree())),
        Atom::Ln(u) => ExprTree::Ln(Box::new(u.to_tree())),
    }
}

fn mono_factors(m: &Mono) -> Vec<ExprTree> {
    m.factors()
        .iter()
        .map(|(a, e)| {
            if *e == 1 {
                atom_tree(a)
            } else {
                ExprTree::Power(Box::new(atom_tree(a)), *e as i32)
            }
        })
        .collect()
}

fn poly_tree(p: &Poly) -> ExprTree {
    if p.is_zero() {
        return ExprTree::Const(Rational::from_integer(0.into()));
    }
    let mut terms = Vec::with_capacity(p.len());
    // leading term first
    for (m, c) in p.terms().rev() {
        let mut factors = mono_factors(m);
        let neg = c.is_negative();
        let mag = c.abs();
        let term = if factors.is_empty() {
            ExprTree::Const(mag)
        } else {
            if !mag.is_one() {
                factors.insert(0, ExprTree::Const(mag));
            }
            if factors.len() == 1 {
                factors.pop().unwrap()
            } else {
                ExprTree::Product(factors)
            }
        };
        terms.push(if neg { ExprTree::Neg(Box::new(term)) } else { term });
    }
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        ExprTree::Sum(terms)
    }
}

impl ScalarExpr {
    /// The normal form as a tree: numerator over a product of factor powers.
    pub fn to_tree(&self) -> ExprTree {
        let num = poly_tree(&self.0.num);
        if self.0.den.is_empty() {
            return num;
        }
        let mut factors: Vec<ExprTree> = self
            .0
            .den
            .iter()
            .map(|(f, k)| {
                let t = poly_tree(f);
                if *k == 1 {
                    t
                } else {
                    ExprTree::Power(Box::new(t), *k as i32)
                }
            })
            .collect();
        let den = if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            ExprTree::Product(factors)
        };
        ExprTree::Quotient(Box::new(num), Box::new(den))
    }

    pub fn from_tree(t: &ExprTree) -> Result<ScalarExpr> {
        Ok(match t {
            ExprTree::Const(c) => ScalarExpr::constant(c.clone()),
            ExprTree::Var(i) => ScalarExpr::var(*i),
            ExprTree::Pi => ScalarExpr::pi(),
            ExprTree::Neg(a) => -Self::from_tree(a)?,
            ExprTree::Sum(v) => {
                let mut acc = ScalarExpr::zero();
                for a in v {
                    acc = &acc + &Self::from_tree(a)?;
                }
                acc
            }
            ExprTree::Product(v) => {
                let mut acc = ScalarExpr::one();
                for a in v {
                    acc = &acc * &Self::from_tree(a)?;
                }
                acc
            }
            ExprTree::Quotient(n, d) => {
                // invert each denominator factor separately so that a printed
                // normal form reads back to the same factorization
                let mut acc = Self::from_tree(n)?;
                match d.as_ref() {
                    ExprTree::Product(fs) => {
                        for f in fs {
                            acc = acc.checked_div(&Self::from_tree(f)?)?;
                        }
                    }
                    other => acc = acc.checked_div(&Self::from_tree(other)?)?,
                }
                acc
            }
            ExprTree::Power(b, k) => Self::from_tree(b)?.powi(*k)?,
            ExprTree::Exp(a) => ScalarExpr::exp(&Self::from_tree(a)?),
            ExprTree::Ln(a) => ScalarExpr::ln(&Self::from_tree(a)?)?,
        })
    }

    /// `from_tree(to_tree(self))`.
    pub fn normalize(&self) -> ScalarExpr {
        Self::from_tree(&self.to_tree()).expect("a normal form re-reads without poles")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(i: usize) -> String {
        ["u", "v", "z"][i].to_string()
    }

    #[test]
    fn renders_surface_syntax() {
        let z = ScalarExpr::var(2);
        let e = ScalarExpr::one()
            .checked_div(&(ScalarExpr::one() + z.clone()))
            .unwrap();
        assert_eq!(e.to_tree().render(&names), "1/(z + 1)");
        let f = ScalarExpr::exp(&z) * ScalarExpr::ratio(-3, 2);
        assert_eq!(f.to_tree().render(&names), "-3/2*exp(z)");
    }

    #[test]
    fn normalize_is_idempotent_on_quotients() {
        let x = ScalarExpr::var(0);
        let y = ScalarExpr::var(1);
        let e = (&x + &y)
            .checked_div(&(&x * &(ScalarExpr::int(2) * &y + ScalarExpr::one()).powi(2).unwrap()))
            .unwrap();
        let n = e.normalize();
        assert_eq!(n, e);
        assert_eq!(n.normalize(), n);
    }
}
