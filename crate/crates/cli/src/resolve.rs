//! Name resolution: turns a parsed file into core objects.
//!
//! All declarations share one namespace. Anything that needs a zero test
//! (Casimir validation, inverse checks, nondegeneracy) is deferred to the
//! commands, which know the sampling configuration.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use poisson_core::coupling::FiberedChart;
use poisson_core::poisson::{lie_poisson, LieAlgebraSpec};
use poisson_core::{ChartSpec, MultivectorField, Rational, ScalarExpr};

use crate::ast::{self, BivectorBody, DataKind, Decl, DefinitionFile, Expr, Func, Ident, Index};
use crate::error::{Diagnostic, Phase, Pos};
use crate::parser::RESERVED;

#[derive(Clone, Debug)]
pub struct Chart {
    pub spec: ChartSpec,
    /// Number of base coordinates when the chart is split with `|`.
    pub base_dim: Option<usize>,
}

impl Chart {
    pub fn fibered(&self) -> Option<FiberedChart> {
        self.base_dim.and_then(|n| FiberedChart::new(&self.spec, n).ok())
    }
}

#[derive(Clone, Debug)]
pub struct Bivector {
    pub chart: String,
    pub field: MultivectorField,
}

#[derive(Clone, Debug)]
pub struct Casimir {
    pub chart: String,
    pub value: ScalarExpr,
}

#[derive(Clone, Debug)]
pub struct MapDef {
    pub source: String,
    pub target: String,
    pub forward: Vec<ScalarExpr>,
    pub inverse: Option<Vec<ScalarExpr>>,
}

#[derive(Clone, Debug)]
pub struct ProductDef {
    pub first: (String, String),
    pub second: (String, String),
}

#[derive(Clone, Debug)]
pub struct DataDef {
    pub chart: String,
    /// `gamma[a][i]`, fiber index first.
    pub gamma: Vec<Vec<ScalarExpr>>,
    pub nu: MultivectorField,
    /// Base index pairs of `phi`.
    pub phi: Vec<((usize, usize), ScalarExpr)>,
}

#[derive(Clone, Debug)]
pub struct VolumeDef {
    pub chart: String,
    pub value: ScalarExpr,
    pub leaf: usize,
    pub positive: bool,
}

#[derive(Clone, Debug)]
pub enum Item {
    Chart(Chart),
    Bivector(Bivector),
    Casimir(Casimir),
    LieAlg(LieAlgebraSpec),
    Map(MapDef),
    Product(ProductDef),
    Data(DataDef),
    Volume(VolumeDef),
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Chart(_) => "chart",
            Item::Bivector(_) => "bivector",
            Item::Casimir(_) => "casimir",
            Item::LieAlg(_) => "liealg",
            Item::Map(_) => "map",
            Item::Product(_) => "product",
            Item::Data(_) => "data",
            Item::Volume(_) => "volume",
        }
    }
}

/// A fully resolved definition file.
#[derive(Clone, Debug)]
pub struct Definitions {
    pub file: String,
    pub items: BTreeMap<String, (Item, Pos)>,
}

impl Definitions {
    pub fn get(&self, name: &str) -> Option<&Item> {
        self.items.get(name).map(|(i, _)| i)
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        match self.get(name) {
            Some(Item::Chart(c)) => Some(c),
            _ => None,
        }
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.items.keys()
    }
}

struct Resolver<'a> {
    file: &'a str,
    items: BTreeMap<String, (Item, Pos)>,
}

type Res<T> = Result<T, Diagnostic>;

pub fn resolve(file: &str, ast: &DefinitionFile) -> Res<Definitions> {
    let mut r = Resolver {
        file,
        items: BTreeMap::new(),
    };
    for d in &ast.decls {
        let name = d.name();
        if let Some((prev, at)) = r.items.get(&name.name) {
            return Err(r.err(
                name.pos,
                format!(
                    "`{}` is declared twice: as a {} at {} and as a {} at {}",
                    name.name,
                    prev.kind(),
                    at,
                    d.kind(),
                    name.pos
                ),
            ));
        }
        let item = r.decl(d)?;
        r.items.insert(name.name.clone(), (item, name.pos));
    }
    Ok(Definitions {
        file: file.into(),
        items: r.items,
    })
}

/// Exact value of a decimal literal such as `12` or `0.125`.
pub fn decimal(text: &str) -> Option<Rational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    let digits = format!("{int}{frac}");
    let num = BigInt::parse_bytes(digits.as_bytes(), 10)?;
    let den = num_traits::pow(BigInt::from(10), frac.len());
    Some(Rational::new(num, den))
}

impl Resolver<'_> {
    fn err(&self, pos: Pos, message: String) -> Diagnostic {
        Diagnostic {
            file: self.file.into(),
            phase: Phase::Resolution,
            pos,
            message,
            expected: Vec::new(),
        }
    }

    fn lookup(&self, id: &Ident, kind: &str) -> Res<&Item> {
        match self.items.get(&id.name) {
            Some((item, _)) if item.kind() == kind => Ok(item),
            Some((item, at)) => Err(self.err(
                id.pos,
                format!("`{}` is a {} (declared at {at}), expected a {kind}", id.name, item.kind()),
            )),
            None => Err(self.err(id.pos, format!("unknown {kind} `{}`", id.name))),
        }
    }

    fn chart(&self, id: &Ident) -> Res<Chart> {
        match self.lookup(id, "chart")? {
            Item::Chart(c) => Ok(c.clone()),
            _ => unreachable!(),
        }
    }

    fn decl(&self, d: &Decl) -> Res<Item> {
        match d {
            Decl::Chart { name, base, fiber } => self.chart_decl(name, base, fiber.as_deref()),
            Decl::Bivector { chart, body, .. } => {
                let c = self.chart(chart)?;
                let field = match body {
                    BivectorBody::Lie(alg) => {
                        let Item::LieAlg(g) = self.lookup(alg, "liealg")? else { unreachable!() };
                        if g.dim() != c.spec.dim() {
                            return Err(self.err(
                                alg.pos,
                                format!(
                                    "`{}` has dimension {} but chart `{}` has {} coordinates",
                                    alg.name,
                                    g.dim(),
                                    chart.name,
                                    c.spec.dim()
                                ),
                            ));
                        }
                        lie_poisson(g, &c.spec)
                            .map_err(|e| self.err(alg.pos, e.to_string()))?
                            .bivector()
                            .clone()
                    }
                    BivectorBody::Components(comps) => {
                        let mut f = MultivectorField::zero(&c.spec, 2);
                        for comp in comps {
                            let i = self.coordinate(&comp.i, &c.spec)?;
                            let j = self.coordinate(&comp.j, &c.spec)?;
                            if i == j {
                                return Err(self.err(comp.j.pos(), "a bivector has no diagonal components".into()));
                            }
                            let v = self.expr(&comp.value, &c.spec)?;
                            f.add_component(&[i, j], v).map_err(|e| self.err(comp.i.pos(), e.to_string()))?;
                        }
                        f
                    }
                };
                Ok(Item::Bivector(Bivector {
                    chart: chart.name.clone(),
                    field,
                }))
            }
            Decl::Casimir { value, chart, .. } => {
                let c = self.chart(chart)?;
                Ok(Item::Casimir(Casimir {
                    chart: chart.name.clone(),
                    value: self.expr(value, &c.spec)?,
                }))
            }
            Decl::LieAlg { name, dim, brackets } => self.liealg(name, *dim, brackets),
            Decl::Map {
                source,
                target,
                forward,
                inverse,
                ..
            } => {
                let s = self.chart(source)?;
                let t = self.chart(target)?;
                let fwd = self.expr_list(forward, &s.spec, t.spec.dim(), target)?;
                let inv = match inverse {
                    Some(list) => Some(self.expr_list(list, &t.spec, s.spec.dim(), source)?),
                    None => None,
                };
                Ok(Item::Map(MapDef {
                    source: source.name.clone(),
                    target: target.name.clone(),
                    forward: fwd,
                    inverse: inv,
                }))
            }
            Decl::Product { first, second, .. } => {
                let c1 = self.factor(first)?;
                let c2 = self.factor(second)?;
                if let Some(n) = c1.names().iter().find(|n| c2.names().contains(n)) {
                    return Err(self.err(
                        second.structure.pos,
                        format!("both factors use the coordinate `{n}`"),
                    ));
                }
                Ok(Item::Product(ProductDef {
                    first: (first.structure.name.clone(), first.casimir.name.clone()),
                    second: (second.structure.name.clone(), second.casimir.name.clone()),
                }))
            }
            Decl::Data { chart, entries, .. } => self.data(chart, entries),
            Decl::Volume {
                chart,
                value,
                leaf,
                positive,
                ..
            } => {
                let c = self.chart(chart)?;
                Ok(Item::Volume(VolumeDef {
                    chart: chart.name.clone(),
                    value: self.expr(value, &c.spec)?,
                    leaf: *leaf,
                    positive: *positive,
                }))
            }
        }
    }

    fn chart_decl(&self, name: &Ident, base: &[Ident], fiber: Option<&[Ident]>) -> Res<Item> {
        let all: Vec<&Ident> = base.iter().chain(fiber.unwrap_or(&[])).collect();
        for (k, id) in all.iter().enumerate() {
            if RESERVED.contains(&id.name.as_str()) || id.name == "pi" || id.name == "exp" || id.name == "ln" {
                return Err(self.err(id.pos, format!("`{}` is reserved and cannot name a coordinate", id.name)));
            }
            if let Some(prev) = all[..k].iter().find(|p| p.name == id.name) {
                return Err(self.err(
                    id.pos,
                    format!("coordinate `{}` of chart `{}` repeats the one at {}", id.name, name.name, prev.pos),
                ));
            }
        }
        let names: Vec<&str> = all.iter().map(|i| i.name.as_str()).collect();
        let spec = ChartSpec::new(&names).map_err(|e| self.err(name.pos, e.to_string()))?;
        Ok(Item::Chart(Chart {
            spec,
            base_dim: fiber.map(|_| base.len()),
        }))
    }

    fn coordinate(&self, idx: &Index, chart: &ChartSpec) -> Res<usize> {
        match idx {
            Index::Number(n, pos) => Err(self.err(
                *pos,
                format!("index `{n}`: coordinates are referenced by name ({})", chart.names().join(", ")),
            )),
            Index::Name(id) => chart
                .index_of(&id.name)
                .ok_or_else(|| self.err(id.pos, format!("`{}` is not a coordinate of {chart}", id.name))),
        }
    }

    fn expr(&self, e: &Expr, chart: &ChartSpec) -> Res<ScalarExpr> {
        let at = |r: poisson_core::Result<ScalarExpr>| r.map_err(|err| self.err(e.pos(), err.to_string()));
        Ok(match e {
            Expr::Num(n, pos) => ScalarExpr::constant(
                decimal(n).ok_or_else(|| self.err(*pos, format!("malformed number `{n}`")))?,
            ),
            Expr::Name(id) => match chart.index_of(&id.name) {
                Some(i) => ScalarExpr::var(i),
                None if id.name == "pi" => ScalarExpr::pi(),
                None => {
                    return Err(self.err(
                        id.pos,
                        format!("unknown name `{}`; chart {chart} has no such coordinate", id.name),
                    ))
                }
            },
            Expr::Neg(a, _) => -self.expr(a, chart)?,
            Expr::Bin(op, a, b, _) => {
                let (a, b) = (self.expr(a, chart)?, self.expr(b, chart)?);
                match op {
                    ast::BinOp::Add => a + b,
                    ast::BinOp::Sub => a - b,
                    ast::BinOp::Mul => a * b,
                    ast::BinOp::Div => at(a.checked_div(&b))?,
                }
            }
            Expr::Pow(a, k, _) => at(self.expr(a, chart)?.powi(*k))?,
            Expr::Call(Func::Exp, a, _) => ScalarExpr::exp(&self.expr(a, chart)?),
            Expr::Call(Func::Ln, a, _) => at(ScalarExpr::ln(&self.expr(a, chart)?))?,
        })
    }

    fn expr_list(&self, list: &[Expr], chart: &ChartSpec, want: usize, other: &Ident) -> Res<Vec<ScalarExpr>> {
        if list.len() != want {
            return Err(self.err(
                list[0].pos(),
                format!("{} components given, chart `{}` needs {want}", list.len(), other.name),
            ));
        }
        list.iter().map(|e| self.expr(e, chart)).collect()
    }

    fn factor(&self, f: &ast::Factor) -> Res<ChartSpec> {
        let Item::Bivector(b) = self.lookup(&f.structure, "bivector")? else { unreachable!() };
        let Item::Casimir(c) = self.lookup(&f.casimir, "casimir")? else { unreachable!() };
        let bc = &self.chart_of(&b.chart);
        let cc = &self.chart_of(&c.chart);
        if bc != cc {
            return Err(self.err(
                f.casimir.pos,
                format!("`{}` lives on {cc} but `{}` on {bc}", f.casimir.name, f.structure.name),
            ));
        }
        Ok(bc.clone())
    }

    fn chart_of(&self, name: &str) -> ChartSpec {
        match self.items.get(name) {
            Some((Item::Chart(c), _)) => c.spec.clone(),
            _ => unreachable!("resolved items refer to declared charts"),
        }
    }

    fn liealg(&self, name: &Ident, dim: usize, brackets: &[ast::Component]) -> Res<Item> {
        if dim == 0 || dim > 32 {
            return Err(self.err(name.pos, format!("dimension {dim} is out of range 1..=32")));
        }
        let basis: Vec<String> = (1..=dim).map(|k| format!("e{k}")).collect();
        let chart = ChartSpec::new(&basis).map_err(|e| self.err(name.pos, e.to_string()))?;
        let mut out = Vec::new();
        for b in brackets {
            let i = self.coordinate(&b.i, &chart)?;
            let j = self.coordinate(&b.j, &chart)?;
            let v = self.expr(&b.value, &chart)?;
            let vars: Vec<usize> = (0..dim).collect();
            let origin: Vec<(usize, Rational)> = vars.iter().map(|&k| (k, Rational::zero())).collect();
            let linear = v.is_polynomial()
                && v.degree_in(&vars).is_some_and(|d| d <= 1)
                && v.subst_values(&origin).is_ok_and(|c| c.is_structural_zero());
            if !linear {
                return Err(self.err(
                    b.value.pos(),
                    format!("bracket value must be a linear combination of {}", basis.join(", ")),
                ));
            }
            let terms: Vec<(usize, Rational)> = vars
                .iter()
                .filter_map(|&k| {
                    let c = v.diff(k).as_rational()?;
                    (!c.is_zero()).then_some((k, c))
                })
                .collect();
            if i == j && !terms.is_empty() {
                return Err(self.err(b.j.pos(), "a bracket of an element with itself vanishes".into()));
            }
            if i != j {
                out.push((i, j, terms));
            }
        }
        LieAlgebraSpec::from_brackets(dim, &out)
            .map(Item::LieAlg)
            .map_err(|e| self.err(name.pos, e.to_string()))
    }

    fn data(&self, chart: &Ident, entries: &[ast::DataEntry]) -> Res<Item> {
        let c = self.chart(chart)?;
        let Some(fc) = c.fibered() else {
            return Err(self.err(chart.pos, format!("chart `{}` has no base | fiber split", chart.name)));
        };
        let nb = fc.base_dim();
        let mut gamma = vec![vec![ScalarExpr::zero(); nb]; fc.fiber_dim()];
        let mut nu = MultivectorField::zero(&c.spec, 2);
        let mut phi = Vec::new();
        for e in entries {
            let comp = &e.component;
            let i = self.coordinate(&comp.i, &c.spec)?;
            let j = self.coordinate(&comp.j, &c.spec)?;
            let v = self.expr(&comp.value, &c.spec)?;
            let (want_i, want_j) = match e.kind {
                DataKind::Gamma => (false, true),
                DataKind::Nu => (false, false),
                DataKind::Phi => (true, true),
            };
            for (k, idx, want_base) in [(i, &comp.i, want_i), (j, &comp.j, want_j)] {
                if fc.is_base(k) != want_base {
                    let role = if want_base { "base" } else { "fiber" };
                    return Err(self.err(
                        idx.pos(),
                        format!("{} expects a {role} coordinate here, `{idx}` is not one", e.kind.keyword()),
                    ));
                }
            }
            match e.kind {
                DataKind::Gamma => {
                    let slot = &mut gamma[i - nb][j];
                    *slot = &*slot + &v;
                }
                DataKind::Nu | DataKind::Phi if i == j => {
                    return Err(self.err(comp.j.pos(), "a 2-tensor has no diagonal components".into()));
                }
                DataKind::Nu => nu.add_component(&[i, j], v).map_err(|er| self.err(comp.i.pos(), er.to_string()))?,
                DataKind::Phi => phi.push(((i, j), v)),
            }
        }
        Ok(Item::Data(DataDef {
            chart: chart.name.clone(),
            gamma,
            nu,
            phi,
        }))
    }
}

/// Rational argument of the command line, e.g. `1/10` or `0.5`.
pub fn rational_arg(text: &str) -> Option<Rational> {
    let text = text.trim();
    let (n, d) = text.split_once('/').unwrap_or((text, "1"));
    let (n, d) = (decimal(n.trim_start_matches('-'))?, decimal(d)?);
    if d.is_zero() {
        return None;
    }
    let sign = if text.starts_with('-') { -Rational::one() } else { Rational::one() };
    Some(sign * n / d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse;

    fn run(src: &str) -> Res<Definitions> {
        resolve("t", &parse("t", src).unwrap())
    }

    #[test]
    fn duplicate_names_cite_both_sites() {
        let e = run("chart M = (u)\nchart M = (v)").unwrap_err();
        assert_eq!(e.phase, Phase::Resolution);
        assert_eq!((e.pos.line, e.pos.col), (2, 7));
        assert!(e.message.contains("1:7") && e.message.contains("2:7"), "{}", e.message);
    }

    #[test]
    fn numeric_indices_are_rejected() {
        let e = run("chart M = (u, v)\nbivector p on M { (0, 1): u }").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 20));
    }

    #[test]
    fn unknown_coordinate() {
        let e = run("chart M = (u, v)\ncasimir f = u + w on M").unwrap_err();
        assert_eq!((e.pos.line, e.pos.col), (2, 17));
    }

    #[test]
    fn lie_algebra_from_brackets() {
        let d = run("liealg g dim 3 { [e1, e2] = e3, [e2, e3] = e1, [e3, e1] = e2 }\nchart S = (x, y, z)\nbivector p = lie g on S").unwrap();
        let Some(Item::Bivector(b)) = d.get("p") else { panic!() };
        assert_eq!(b.field.component(&[0, 1]), ScalarExpr::var(2));
        assert!(run("liealg g dim 2 { [e1, e2] = e1 * e2 }").is_err());
    }

    #[test]
    fn decimals_are_exact() {
        assert_eq!(decimal("0.125"), Some(Rational::new(1.into(), 8.into())));
        assert_eq!(rational_arg("-1/10"), Some(Rational::new((-1).into(), 10.into())));
        assert_eq!(rational_arg("2"), Some(Rational::from_integer(2.into())));
        assert_eq!(rational_arg("1/0"), None);
    }
}
