//! Multivariate gcd and squarefree decomposition.
//!
//! Polynomials are viewed recursively as univariate in their largest atom
//! with coefficients in the remaining atoms; the gcd runs a primitive
//! pseudo-remainder sequence. Denominators of the normal form are kept as a
//! pairwise coprime list of squarefree monic factors, each coprime to the
//! numerator.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::poly::{Atom, Mono, Poly, Rational};

fn atom_set(p: &Poly) -> BTreeSet<Atom> {
    p.terms().flat_map(|(m, _)| m.factors().iter().map(|(a, _)| a.clone())).collect()
}

/// Coefficients of `p` viewed as a polynomial in the atoms of `over`.
fn coefficients_over(p: &Poly, over: &BTreeSet<Atom>) -> Vec<Poly> {
    let mut groups: BTreeMap<Vec<(Atom, u32)>, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let key: Vec<(Atom, u32)> = m.factors().iter().filter(|(a, _)| over.contains(a)).cloned().collect();
        let mut rest = m.clone();
        for (a, _) in &key {
            rest = rest.without(a);
        }
        groups.entry(key).or_insert_with(Poly::zero).add_term(rest, c.clone());
    }
    groups.into_values().collect()
}

/// `gcd(a, b)` where `b` has atoms that `a` lacks: any common divisor
/// divides every coefficient of `b` over those atoms.
fn gcd_with_content(a: &Poly, b: &Poly, extra: &BTreeSet<Atom>) -> Poly {
    let mut g = a.monic().1;
    for c in coefficients_over(b, extra) {
        g = gcd(&g, &c);
        if g.as_constant().is_some() {
            return Poly::one();
        }
    }
    g
}

/// Coefficients in `x` of `p` with every other atom set to a small integer
/// depending on `salt`.
fn image_in(p: &Poly, x: &Atom, atoms: &[Atom], salt: u64) -> Vec<Rational> {
    let value = |a: &Atom| {
        let k = atoms.iter().position(|b| b == a).expect("atom listed") as u64;
        Rational::from_integer(((k * 7 + salt * 13) % 29 + 2).into())
    };
    let mut out: Vec<Rational> = Vec::new();
    for (m, c) in p.terms() {
        let e = m.exponent_of(x) as usize;
        if out.len() <= e {
            out.resize(e + 1, Rational::zero());
        }
        let mut t = c.clone();
        for (a, k) in m.factors() {
            if a != x {
                t *= num_traits::pow(value(a), *k as usize);
            }
        }
        out[e] += t;
    }
    out
}

fn univariate_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    let lb = b.last().expect("non-zero divisor");
    while r.len() >= b.len() {
        let q = r.last().expect("non-empty") / lb;
        let shift = r.len() - b.len();
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &q * c;
        }
        r.pop();
        while r.last().is_some_and(Zero::is_zero) {
            r.pop();
        }
    }
    r
}

/// Whether the gcd of `a` and `b` certainly has degree zero in `x`: some
/// evaluation of the other atoms keeps both leading coefficients and has
/// coprime univariate images.
fn coprime_in(a: &Poly, b: &Poly, x: &Atom, atoms: &[Atom]) -> bool {
    let (da, db) = (degree_in(a, x), degree_in(b, x));
    for salt in 0..3 {
        let (mut p, mut q) = (image_in(a, x, atoms, salt), image_in(b, x, atoms, salt));
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
        while q.last().is_some_and(Zero::is_zero) {
            q.pop();
        }
        if p.len() != da + 1 || q.len() != db + 1 {
            continue;
        }
        while !q.is_empty() {
            let r = univariate_rem(&p, &q);
            p = q;
            q = r;
        }
        return p.len() == 1;
    }
    false
}

fn main_atom(p: &Poly) -> Option<Atom> {
    p.terms().filter_map(|(m, _)| m.max_atom()).max().cloned()
}

/// Coefficients of `p` as a polynomial in `x`, lowest power first.
fn coeffs_in(p: &Poly, x: &Atom) -> Vec<Poly> {
    let mut out: Vec<Poly> = Vec::new();
    for (m, c) in p.terms() {
        let e = m.exponent_of(x) as usize;
        if out.len() <= e {
            out.resize(e + 1, Poly::zero());
        }
        out[e].add_term(m.without(x), c.clone());
    }
    while out.last().is_some_and(Poly::is_zero) {
        out.pop();
    }
    out
}

fn from_coeffs(cs: &[Poly], x: &Atom) -> Poly {
    let mut out = Poly::zero();
    for (e, c) in cs.iter().enumerate() {
        let xm = Mono::atom(x.clone(), e as u32);
        out = out.add(&c.mul_term(&xm, &Rational::one()));
    }
    out
}

/// Formal partial derivative with respect to an atom.
pub(crate) fn formal_diff(p: &Poly, x: &Atom) -> Poly {
    let cs = coeffs_in(p, x);
    let d: Vec<Poly> = cs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(e, c)| c.scale(&super::rational_from_i64(e as i64)))
        .collect();
    from_coeffs(&d, x)
}

fn content_in(p: &Poly, x: &Atom) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs_in(p, x) {
        g = gcd(&g, &c);
        if g.as_constant().is_some() && !g.is_zero() {
            return Poly::one();
        }
    }
    g
}

fn is_nonzero_constant(p: &Poly) -> bool {
    !p.is_zero() && p.as_constant().is_some()
}

/// Pseudo-remainder `lc(b)^(deg a - deg b + 1) a mod b` in `x`.
fn prem(a: &Poly, b: &Poly, x: &Atom) -> Poly {
    let bc = coeffs_in(b, x);
    let db = bc.len() - 1;
    let lb = bc[db].clone();
    let da = degree_in(a, x);
    if da < db {
        return a.clone();
    }
    let mut steps = da - db + 1;
    let mut r = a.clone();
    loop {
        let rc = coeffs_in(&r, x);
        if rc.is_empty() || rc.len() - 1 < db {
            break;
        }
        let dr = rc.len() - 1;
        let lr = &rc[dr];
        let shift = Mono::atom(x.clone(), (dr - db) as u32);
        let t = b.mul(lr).mul_term(&shift, &Rational::one());
        r = r.mul(&lb).sub(&t);
        steps -= 1;
    }
    if steps > 0 {
        r = r.mul(&lb.pow(steps as u32));
    }
    r
}

fn leading_coeff(p: &Poly, x: &Atom) -> Poly {
    coeffs_in(p, x).pop().expect("non-zero polynomial")
}

fn degree_in(p: &Poly, x: &Atom) -> usize {
    coeffs_in(p, x).len().saturating_sub(1)
}

/// Monic greatest common divisor; `1` for coprime inputs.
pub(crate) fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return b.monic().1;
    }
    if b.is_zero() {
        return a.monic().1;
    }
    if is_nonzero_constant(a) || is_nonzero_constant(b) {
        return Poly::one();
    }
    if a.len() == 1 || b.len() == 1 {
        let ca = a.monomial_content();
        let cb = b.monomial_content();
        return Poly::term(ca.gcd(&cb), Rational::one());
    }
    if b.div_exact(a).is_some() {
        return a.monic().1;
    }
    if a.div_exact(b).is_some() {
        return b.monic().1;
    }
    if known_irreducible(if a.len() <= b.len() { a } else { b }) {
        return Poly::one();
    }
    let (sa, sb) = (atom_set(a), atom_set(b));
    let extra_b: BTreeSet<Atom> = sb.difference(&sa).cloned().collect();
    if !extra_b.is_empty() {
        return gcd_with_content(a, b, &extra_b);
    }
    let extra_a: BTreeSet<Atom> = sa.difference(&sb).cloned().collect();
    if !extra_a.is_empty() {
        return gcd_with_content(b, a, &extra_a);
    }
    let x = main_atom(a).max(main_atom(b)).expect("non-constant input");
    let da = degree_in(a, &x);
    let db = degree_in(b, &x);
    if da == 0 {
        return gcd(a, &content_in(b, &x));
    }
    if db == 0 {
        return gcd(&content_in(a, &x), b);
    }
    let ca = content_in(a, &x);
    let cb = content_in(b, &x);
    let c = gcd(&ca, &cb);
    let atoms: Vec<Atom> = sa.into_iter().collect();
    if coprime_in(a, b, &x, &atoms) {
        return c;
    }
    let mut p = a.div_exact(&ca).expect("content divides");
    let mut q = b.div_exact(&cb).expect("content divides");
    if da < db {
        std::mem::swap(&mut p, &mut q);
    }
    // subresultant remainder sequence
    let mut g = Poly::one();
    let mut h = Poly::one();
    loop {
        let delta = (degree_in(&p, &x) - degree_in(&q, &x)) as u32;
        let r = prem(&p, &q, &x);
        if r.is_zero() {
            break;
        }
        if degree_in(&r, &x) == 0 {
            return c;
        }
        let divisor = g.mul(&h.pow(delta));
        p = q;
        q = r.div_exact(&divisor).expect("subresultant division is exact");
        g = leading_coeff(&p, &x);
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1)).expect("subresultant division is exact")
        };
    }
    let cq = content_in(&q, &x);
    let q = q.div_exact(&cq).expect("content divides");
    c.mul(&q).monic().1
}

/// Squarefree decomposition of a non-zero polynomial into monic factors.
pub(crate) fn squarefree(p: &Poly) -> Vec<(Poly, u32)> {
    let mut out = Vec::new();
    squarefree_into(&p.monic().1, 1, &mut out);
    out
}

fn squarefree_into(p: &Poly, mult: u32, out: &mut Vec<(Poly, u32)>) {
    if p.as_constant().is_some() {
        return;
    }
    if p.len() == 1 {
        let (m, _) = p.terms().next().unwrap();
        for (a, e) in m.factors() {
            push_factor(out, Poly::atom(a.clone()), e * mult);
        }
        return;
    }
    let x = main_atom(p).expect("non-constant");
    let c = content_in(p, &x);
    squarefree_into(&c, mult, out);
    let p = p.div_exact(&c).expect("content divides").monic().1;
    // Yun's algorithm in `x`
    let dp = formal_diff(&p, &x);
    let a0 = gcd(&p, &dp);
    let mut b = p.div_exact(&a0).expect("gcd divides");
    let mut cc = dp.div_exact(&a0).expect("gcd divides");
    let mut d = cc.sub(&formal_diff(&b, &x));
    let mut i = 1;
    while b.as_constant().is_none() {
        let a = gcd(&b, &d);
        if a.as_constant().is_none() {
            push_factor(out, a.clone(), i * mult);
        }
        b = b.div_exact(&a).expect("gcd divides");
        cc = d.div_exact(&a).expect("gcd divides");
        d = cc.sub(&formal_diff(&b, &x));
        i += 1;
    }
}

fn push_factor(out: &mut Vec<(Poly, u32)>, f: Poly, k: u32) {
    match out.iter_mut().find(|(g, _)| *g == f) {
        Some((_, e)) => *e += k,
        None => out.push((f, k)),
    }
}

/// Rewrites `num / prod den` so the denominator factors are squarefree,
/// pairwise coprime and coprime to the numerator.
pub(crate) fn normalize_fraction(num: &mut Poly, den: &mut Vec<(Poly, u32)>) {
    let mut list: Vec<(Poly, u32)> = Vec::with_capacity(den.len());
    for (f, k) in den.drain(..) {
        if f.len() <= 2 && is_linear(&f) {
            push_factor(&mut list, f, k);
        } else {
            for (g, j) in squarefree(&f) {
                push_factor(&mut list, g, j * k);
            }
        }
    }
    // coprime refinement
    'outer: loop {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let h = gcd(&list[i].0, &list[j].0);
                if h.as_constant().is_none() {
                    let (g, b) = list.remove(j);
                    let (f, a) = list.remove(i);
                    for (p, e) in [
                        (f.div_exact(&h).expect("gcd divides"), a),
                        (g.div_exact(&h).expect("gcd divides"), b),
                        (h, a + b),
                    ] {
                        if p.as_constant().is_none() {
                            push_factor(&mut list, p.monic().1, e);
                        }
                    }
                    continue 'outer;
                }
            }
        }
        break;
    }
    // cancellation against the numerator
    let mut k = 0;
    while k < list.len() {
        while list[k].1 > 0 {
            match num.div_exact(&list[k].0) {
                Some(q) => {
                    *num = q;
                    list[k].1 -= 1;
                }
                None => break,
            }
        }
        if list[k].1 > 0 && !is_linear(&list[k].0) && !known_irreducible(&list[k].0) {
            let h = gcd(num, &list[k].0);
            if h.as_constant().is_none() {
                let (f, e) = list.remove(k);
                list.push((f.div_exact(&h).expect("gcd divides").monic().1, e));
                list.push((h, e));
                continue;
            }
        }
        k += 1;
    }
    list.retain(|(f, e)| *e > 0 && f.as_constant().is_none());
    list.sort();
    *den = list;
}

/// Degree one in some atom with coprime coefficients.
fn known_irreducible(p: &Poly) -> bool {
    atom_set(p).iter().any(|x| {
        let cs = coeffs_in(p, x);
        cs.len() == 2 && is_nonzero_constant(&gcd(&cs[0], &cs[1]))
    })
}

fn is_linear(p: &Poly) -> bool {
    p.terms().all(|(m, _)| m.degree() <= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Poly {
        Poly::atom(Atom::Var(i))
    }

    fn c(n: i64) -> Poly {
        Poly::constant(super::super::rational_from_i64(n))
    }

    #[test]
    fn gcd_of_shared_factor() {
        let f = x(0).add(&c(1));
        let g = x(1).sub(&x(0).mul(&x(0)));
        let a = f.mul(&g);
        let b = f.mul(&x(1).add(&c(3)));
        assert_eq!(gcd(&a, &b), f);
        assert_eq!(gcd(&g, &x(1).add(&c(3))), Poly::one());
    }

    #[test]
    fn squarefree_splits_square() {
        let f = x(0).add(&x(1));
        let p = f.pow(2).mul(&x(1).add(&c(2)));
        let mut parts = squarefree(&p);
        parts.sort();
        assert!(parts.contains(&(f, 2)));
        assert!(parts.contains(&(x(1).add(&c(2)), 1)));
    }

    #[test]
    fn gcd_recovers_repeated_quartic() {
        let q = x(0).mul(&x(1)).mul(&x(2)).add(&x(2).pow(3)).add(&x(0).pow(2).mul(&x(1))).add(&c(2));
        let p = q.pow(2);
        let dp = formal_diff(&p, &Atom::Var(2));
        assert_eq!(gcd(&p, &dp), q.monic().1);
        assert_eq!(squarefree(&p), vec![(q.monic().1, 2)]);
    }

    #[test]
    fn coprime_dense_inputs() {
        let a = x(0).pow(2).add(&x(1).mul(&x(2))).add(&c(1));
        let b = x(0).mul(&x(1)).add(&x(2).pow(2)).sub(&c(3));
        assert_eq!(gcd(&a.mul(&a), &b.mul(&a).add(&c(1))), Poly::one());
        assert_eq!(gcd(&a.mul(&b), &b.pow(2)), b.monic().1);
    }
}
