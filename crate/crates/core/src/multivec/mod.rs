//! Graded exterior calculus on a chart.
//!
//! Multi-indices are strictly increasing sets of coordinate indices, stored
//! as bitmasks. A degree-k field is the sparse sum of `c_I d_I` (multivectors)
//! or `c_I dx^I` (forms) over increasing index sets `I`.

mod map;
mod schouten;

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::chart::ChartSpec;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::expr::{Rational, ScalarExpr, ZeroTest};

pub use map::ChartMap;
pub use map::subsets;
pub use schouten::{bivector_identity_defect, lie_derivative, schouten, LieDerivative};

/// Bitmask of coordinate indices.
pub type Blade = u32;

pub(crate) fn blade_of(indices: &[usize]) -> Option<(Blade, i32)> {
    // sort with sign tracking; repeated indices give None
    let mut v = indices.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    let mut b = 0;
    for i in v {
        b |= 1 << i;
    }
    Some((b, sign))
}

pub fn blade_indices(b: Blade) -> Vec<usize> {
    (0..32).filter(|i| b & (1 << i) != 0).collect()
}

fn below(i: usize) -> Blade {
    ((1u64 << i) - 1) as Blade
}

/// Sign of `e_A ^ e_B` relative to `e_{A u B}`; `None` when they overlap.
pub(crate) fn wedge_sign(a: Blade, b: Blade) -> Option<bool> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        swaps += (a & !below(j + 1)).count_ones();
    }
    Some(swaps % 2 == 1)
}

/// 0-based position of index `i` within blade `b`.
pub(crate) fn position(b: Blade, i: usize) -> usize {
    (b & below(i)).count_ones() as usize
}

/// Component variance of a field.
pub trait Kind: Clone + Copy + fmt::Debug + PartialEq + Eq + Send + Sync + 'static {
    type Dual: Kind<Dual = Self>;
    const NAME: &'static str;
    fn basis_symbol(name: &str) -> String;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Vector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Covector;

impl Kind for Vector {
    type Dual = Covector;
    const NAME: &'static str = "multivector";
    fn basis_symbol(name: &str) -> String {
        format!("d_{name}")
    }
}

impl Kind for Covector {
    type Dual = Vector;
    const NAME: &'static str = "form";
    fn basis_symbol(name: &str) -> String {
        format!("d{name}")
    }
}

/// A sparse antisymmetric tensor field of fixed degree.
#[derive(Clone, PartialEq)]
pub struct Field<K: Kind> {
    chart: ChartSpec,
    degree: usize,
    comps: BTreeMap<Blade, ScalarExpr>,
    _kind: PhantomData<K>,
}

pub type MultivectorField = Field<Vector>;
pub type DifferentialForm = Field<Covector>;

impl<K: Kind> Field<K> {
    pub fn zero(chart: &ChartSpec, degree: usize) -> Self {
        Field {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
            _kind: PhantomData,
        }
    }

    /// A degree-0 field.
    pub fn scalar(chart: &ChartSpec, f: ScalarExpr) -> Self {
        let mut out = Self::zero(chart, 0);
        out.insert(0, f);
        out
    }

    /// The basis element on the given indices (in any order, with sign).
    pub fn basis(chart: &ChartSpec, indices: &[usize]) -> Result<Self> {
        let mut out = Self::zero(chart, indices.len());
        out.add_component(indices, ScalarExpr::one())?;
        Ok(out)
    }

    /// Builds a field from `(indices, coefficient)` pairs; indices may be in
    /// any order and repeated entries accumulate.
    pub fn from_components<I>(chart: &ChartSpec, degree: usize, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, ScalarExpr)>,
    {
        let mut out = Self::zero(chart, degree);
        for (idx, c) in comps {
            out.add_component(&idx, c)?;
        }
        Ok(out)
    }

    pub fn add_component(&mut self, indices: &[usize], c: ScalarExpr) -> Result<()> {
        if indices.len() != self.degree {
            return Err(Error::Degree(format!(
                "component of length {} in a degree-{} field",
                indices.len(),
                self.degree
            )));
        }
        if let Some(&i) = indices.iter().find(|&&i| i >= self.chart.dim()) {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.chart.dim(),
            });
        }
        self.chart.check_expr(&c)?;
        let Some((b, sign)) = blade_of(indices) else {
            return Ok(());
        };
        let c = if sign < 0 { -c } else { c };
        self.insert(b, c);
        Ok(())
    }

    fn insert(&mut self, b: Blade, c: ScalarExpr) {
        if c.is_structural_zero() {
            return;
        }
        let v = match self.comps.remove(&b) {
            Some(old) => &old + &c,
            None => c,
        };
        if !v.is_structural_zero() {
            self.comps.insert(b, v);
        }
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Coefficient at the given indices, signed by their ordering.
    pub fn component(&self, indices: &[usize]) -> ScalarExpr {
        match blade_of(indices) {
            Some((b, s)) => {
                let c = self.comps.get(&b).cloned().unwrap_or_default();
                if s < 0 {
                    -c
                } else {
                    c
                }
            }
            None => ScalarExpr::zero(),
        }
    }

    pub fn blade_component(&self, b: Blade) -> Option<&ScalarExpr> {
        self.comps.get(&b)
    }

    /// Nonzero components keyed by increasing index lists, in index order.
    pub fn components(&self) -> Vec<(Vec<usize>, ScalarExpr)> {
        let mut v: Vec<(Vec<usize>, ScalarExpr)> = self
            .comps
            .iter()
            .map(|(b, c)| (blade_indices(*b), c.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }

    pub(crate) fn blades(&self) -> impl Iterator<Item = (&Blade, &ScalarExpr)> {
        self.comps.iter()
    }

    pub fn is_structural_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// The value as a function when the degree is 0.
    pub fn as_scalar(&self) -> Result<ScalarExpr> {
        if self.degree != 0 {
            return Err(Error::Degree(format!("expected degree 0, got {}", self.degree)));
        }
        Ok(self.comps.get(&0).cloned().unwrap_or_default())
    }

    fn check_same(&self, other: &Field<impl Kind>) -> Result<()> {
        self.chart.ensure_same(&other.chart)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.degree != other.degree {
            return Err(Error::Degree(format!(
                "cannot add degree {} and degree {}",
                self.degree, other.degree
            )));
        }
        let mut out = self.clone();
        for (b, c) in &other.comps {
            out.insert(*b, c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| -c)
    }

    /// Multiplies every component by a function.
    pub fn scale(&self, f: &ScalarExpr) -> Self {
        if f.is_structural_zero() {
            return Self::zero(&self.chart, self.degree);
        }
        self.map_coeffs(|c| c * f)
    }

    pub fn scale_rational(&self, k: &Rational) -> Self {
        self.map_coeffs(|c| c.scale(k))
    }

    pub fn map_coeffs(&self, f: impl Fn(&ScalarExpr) -> ScalarExpr) -> Self {
        let mut out = Self::zero(&self.chart, self.degree);
        for (b, c) in &self.comps {
            out.insert(*b, f(c));
        }
        out
    }

    pub fn try_map_coeffs(&self, f: impl Fn(&ScalarExpr) -> Result<ScalarExpr>) -> Result<Self> {
        let mut out = Self::zero(&self.chart, self.degree);
        for (b, c) in &self.comps {
            out.insert(*b, f(c)?);
        }
        Ok(out)
    }

    /// Substitutes rational values for coordinates in every coefficient.
    pub fn subst_values(&self, values: &[(usize, Rational)]) -> Result<Self> {
        self.try_map_coeffs(|c| c.subst_values(values))
    }

    /// Moves the field to `target`, renaming coordinate `i` to `f(i)`.
    pub fn reindex(&self, target: &ChartSpec, f: &dyn Fn(usize) -> usize) -> Result<Self> {
        let mut out = Self::zero(target, self.degree);
        for (b, c) in &self.comps {
            let idx: Vec<usize> = blade_indices(*b).into_iter().map(f).collect();
            out.add_component(&idx, c.reindex(f))?;
        }
        Ok(out)
    }

    /// Exterior product with shuffle signs.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.chart, self.degree + other.degree);
        for (a, ca) in &self.comps {
            for (b, cb) in &other.comps {
                if let Some(neg) = wedge_sign(*a, *b) {
                    let v = ca * cb;
                    out.insert(a | b, if neg { -v } else { v });
                }
            }
        }
        Ok(out)
    }

    /// Interior product of a degree-1 dual field into the first slot.
    pub fn contract(&self, alpha: &Field<K::Dual>) -> Result<Self> {
        self.check_same(alpha)?;
        if alpha.degree != 1 {
            return Err(Error::Degree(format!(
                "contraction needs a degree-1 argument, got degree {}",
                alpha.degree
            )));
        }
        if self.degree == 0 {
            return Err(Error::Degree("cannot contract a degree-0 field".into()));
        }
        let mut out = Self::zero(&self.chart, self.degree - 1);
        for (b, c) in &self.comps {
            for (a, ca) in &alpha.comps {
                let i = a.trailing_zeros() as usize;
                if b & a == 0 {
                    continue;
                }
                let v = c * ca;
                let neg = position(*b, i) % 2 == 1;
                out.insert(b & !a, if neg { -v } else { v });
            }
        }
        Ok(out)
    }

    /// Full evaluation on degree-1 arguments, filling slots left to right.
    pub fn eval(&self, args: &[&Field<K::Dual>]) -> Result<ScalarExpr> {
        if args.len() != self.degree {
            return Err(Error::Degree(format!(
                "{} arguments for a degree-{} field",
                args.len(),
                self.degree
            )));
        }
        let mut cur = self.clone();
        for a in args {
            cur = cur.contract(a)?;
        }
        cur.as_scalar()
    }

    /// Asserts every component vanishes.
    pub fn check_zero(&self, zt: &ZeroTest) -> Result<Check> {
        let names = self.chart.names().to_vec();
        Check::all_zero(
            self.comps.iter().map(|(b, c)| {
                let label = blade_indices(*b)
                    .iter()
                    .map(|&i| K::basis_symbol(&names[i]))
                    .collect::<Vec<_>>()
                    .join("^");
                (if label.is_empty() { "scalar".to_string() } else { label }, c.clone())
            }),
            zt,
        )
    }

    /// Human-readable sum of terms with the chart's coordinate names.
    pub fn render(&self) -> String {
        if self.comps.is_empty() {
            return "0".into();
        }
        let names = self.chart.names();
        self.components()
            .iter()
            .map(|(idx, c)| {
                let basis = idx
                    .iter()
                    .map(|&i| K::basis_symbol(&names[i]))
                    .collect::<Vec<_>>()
                    .join("^");
                let coeff = c.render(names);
                if basis.is_empty() {
                    coeff
                } else {
                    format!("({coeff}) {basis}")
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl MultivectorField {
    /// The vector field `sum_i comps[i] d_i`.
    pub fn vector(chart: &ChartSpec, comps: &[ScalarExpr]) -> Result<Self> {
        Self::from_components(chart, 1, comps.iter().enumerate().map(|(i, c)| (vec![i], c.clone())))
    }

    /// The sharp map `A(alpha, .)` for degree 2, first-slot contraction in general.
    pub fn sharp(&self, alpha: &DifferentialForm) -> Result<MultivectorField> {
        self.contract(alpha)
    }

    /// Directional derivative `X f` of a function along a vector field.
    pub fn apply(&self, f: &ScalarExpr) -> Result<ScalarExpr> {
        if self.degree != 1 {
            return Err(Error::Degree("only vector fields act on functions".into()));
        }
        Ok(self
            .comps
            .iter()
            .map(|(b, c)| c * &f.diff(b.trailing_zeros() as usize))
            .sum())
    }
}

impl DifferentialForm {
    /// The covector `sum_i comps[i] dx_i`.
    pub fn covector(chart: &ChartSpec, comps: &[ScalarExpr]) -> Result<Self> {
        Self::from_components(chart, 1, comps.iter().enumerate().map(|(i, c)| (vec![i], c.clone())))
    }

    /// Differential of a function.
    pub fn exact(chart: &ChartSpec, f: &ScalarExpr) -> Result<Self> {
        d(&Self::scalar(chart, f.clone()))
    }
}

/// Exterior derivative.
pub fn d(form: &DifferentialForm) -> Result<DifferentialForm> {
    let mut out = DifferentialForm::zero(&form.chart, form.degree + 1);
    for (b, c) in &form.comps {
        for j in 0..form.chart.dim() {
            if b & (1 << j) != 0 || !c.depends_on(j) {
                continue;
            }
            let v = c.diff(j);
            let neg = position(*b, j) % 2 == 1;
            out.insert(b | (1 << j), if neg { -v } else { v });
        }
    }
    Ok(out)
}

impl<K: Kind> fmt::Debug for Field<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}] on {}: {}", K::NAME, self.degree, self.chart, self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> ChartSpec {
        ChartSpec::new(names).unwrap()
    }

    #[test]
    fn wedge_of_basis_vectors() {
        let c = chart(&["u", "v"]);
        let du = MultivectorField::basis(&c, &[0]).unwrap();
        let dv = MultivectorField::basis(&c, &[1]).unwrap();
        let w = du.wedge(&dv).unwrap();
        assert_eq!(w.component(&[0, 1]), ScalarExpr::one());
        assert_eq!(w.component(&[1, 0]), -ScalarExpr::one());
        assert!(du.wedge(&du).unwrap().is_structural_zero());
    }

    #[test]
    fn wedge_is_bilinear() {
        let c = chart(&["x", "y", "z"]);
        let x = ScalarExpr::var(0);
        let y = ScalarExpr::var(1);
        let a = MultivectorField::basis(&c, &[1]).unwrap().scale(&x);
        let b = MultivectorField::basis(&c, &[2]).unwrap().scale(&y);
        let w = a.wedge(&b).unwrap();
        assert_eq!(w.component(&[1, 2]), &x * &y);
        assert_eq!(w.components().len(), 1);
    }

    #[test]
    fn contraction_first_slot() {
        let c = chart(&["u", "v"]);
        let pi = MultivectorField::basis(&c, &[0, 1]).unwrap();
        let du = DifferentialForm::basis(&c, &[0]).unwrap();
        assert_eq!(pi.contract(&du).unwrap(), MultivectorField::basis(&c, &[1]).unwrap());
    }

    #[test]
    fn exterior_derivative_signs() {
        // d(z du^dv) = dz^du^dv = du^dv^dz
        let c = chart(&["u", "v", "z"]);
        let z = ScalarExpr::var(2);
        let w = DifferentialForm::from_components(&c, 2, [(vec![0, 1], z)]).unwrap();
        let dw = d(&w).unwrap();
        assert_eq!(dw.component(&[0, 1, 2]), ScalarExpr::one());
        assert_eq!(dw.component(&[2, 0, 1]), ScalarExpr::one());
    }

    #[test]
    fn d_squared_vanishes_on_casimir() {
        let c = chart(&["x", "y", "z"]);
        let f: ScalarExpr = ScalarExpr::one()
            + (0..3).map(|i| ScalarExpr::var(i).powi(2).unwrap()).sum::<ScalarExpr>();
        let df = DifferentialForm::exact(&c, &f).unwrap();
        assert!(d(&df).unwrap().is_structural_zero());
    }

    #[test]
    fn example_coupling_form_differential() {
        // d((1+z) du^dv) = du^dv^dz
        let c = chart(&["u", "v", "z"]);
        let w = DifferentialForm::from_components(
            &c,
            2,
            [(vec![0, 1], ScalarExpr::one() + ScalarExpr::var(2))],
        )
        .unwrap();
        let dw = d(&w).unwrap();
        assert_eq!(dw.components(), vec![(vec![0, 1, 2], ScalarExpr::one())]);
    }

    #[test]
    fn evaluation_fills_slots_in_order() {
        let c = chart(&["u", "v"]);
        let pi = MultivectorField::basis(&c, &[0, 1]).unwrap();
        let du = DifferentialForm::basis(&c, &[0]).unwrap();
        let dv = DifferentialForm::basis(&c, &[1]).unwrap();
        assert_eq!(pi.eval(&[&du, &dv]).unwrap(), ScalarExpr::one());
        assert_eq!(pi.eval(&[&dv, &du]).unwrap(), -ScalarExpr::one());
    }

    #[test]
    fn component_errors() {
        let c = chart(&["u", "v"]);
        let mut f = MultivectorField::zero(&c, 2);
        assert!(f.add_component(&[0], ScalarExpr::one()).is_err());
        assert!(f.add_component(&[0, 5], ScalarExpr::one()).is_err());
        let other = chart(&["a", "b"]);
        let g = MultivectorField::zero(&other, 2);
        assert!(matches!(f.add(&g), Err(Error::ChartMismatch { .. })));
    }
}
