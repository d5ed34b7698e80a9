//! Built-in structures and coupling data: the three weighted products near
//! the torus leaf, a curved so(3) coupling, and variants breaking one
//! integrability condition each.

use crate::chart::ChartSpec;
use crate::coupling::{base_two_form, compose, decompose, EhresmannConnection, FiberedChart, GeometricData};
use crate::error::Result;
use crate::expr::{ScalarExpr, ZeroTest};
use crate::multivec::MultivectorField;
use crate::poisson::{jacobi_check, lie_poisson, lie_poisson_at, LieAlgebraSpec, PoissonFactor, PoissonStructure, WeightedProductSpec};
use crate::vorobjev::first_approximation;

fn var(i: usize) -> ScalarExpr {
    ScalarExpr::var(i)
}

fn sq(e: ScalarExpr) -> ScalarExpr {
    e.clone() * e
}

/// `(u, v)` with `d_u ^ d_v`.
pub fn torus(zt: &ZeroTest) -> Result<PoissonStructure> {
    let c = ChartSpec::new(&["u", "v"])?;
    jacobi_check(&MultivectorField::basis(&c, &[0, 1])?, zt)
}

/// The so(3)* Lie-Poisson structure on `(x, y, z)`.
pub fn so3_structure() -> Result<PoissonStructure> {
    lie_poisson(&LieAlgebraSpec::so3(), &ChartSpec::new(&["x", "y", "z"])?)
}

/// `1 + x^2 + y^2 + z^2` on `(x, y, z)`.
pub fn so3_casimir() -> ScalarExpr {
    ScalarExpr::one() + (0..3).map(|i| sq(var(i))).sum::<ScalarExpr>()
}

fn torus_times_line(f: ScalarExpr, zt: &ZeroTest) -> Result<WeightedProductSpec> {
    let line = jacobi_check(&MultivectorField::zero(&ChartSpec::new(&["z"])?, 2), zt)?;
    WeightedProductSpec::new(
        PoissonFactor {
            structure: torus(zt)?,
            casimir: ScalarExpr::one(),
        },
        PoissonFactor {
            structure: line,
            casimir: f,
        },
        zt,
    )
}

/// Torus times the trivial line with weight `e^z`.
pub fn example1(zt: &ZeroTest) -> Result<WeightedProductSpec> {
    torus_times_line(ScalarExpr::exp(&var(0)), zt)
}

/// Torus times the trivial line with weight `1 + z^2`.
pub fn example2(zt: &ZeroTest) -> Result<WeightedProductSpec> {
    torus_times_line(ScalarExpr::one() + sq(var(0)), zt)
}

/// Torus times so(3)* with weight `1 + x^2 + y^2 + z^2`.
pub fn example3(zt: &ZeroTest) -> Result<WeightedProductSpec> {
    WeightedProductSpec::new(
        PoissonFactor {
            structure: torus(zt)?,
            casimir: ScalarExpr::one(),
        },
        PoissonFactor {
            structure: so3_structure()?,
            casimir: so3_casimir(),
        },
        zt,
    )
}

/// A bivector on `(x, y, z)` failing Jacobi: `-y d_y^d_z + x d_z^d_x + d_x^d_y`.
pub fn broken_bivector() -> Result<MultivectorField> {
    let c = ChartSpec::new(&["x", "y", "z"])?;
    MultivectorField::from_components(
        &c,
        2,
        [
            (vec![1, 2], -var(1)),
            (vec![2, 0], var(0)),
            (vec![0, 1], ScalarExpr::one()),
        ],
    )
}

/// The fibered chart `(u, v | y1..yk)` for a weighted product over the torus.
pub fn torus_fibration(spec: &WeightedProductSpec) -> Result<FiberedChart> {
    FiberedChart::new(spec.chart(), 2)
}

fn so3_chart() -> Result<FiberedChart> {
    FiberedChart::from_names(&["u", "v"], &["x", "y", "z"])
}

fn so3_fiber_bivector(fc: &FiberedChart) -> Result<MultivectorField> {
    Ok(lie_poisson_at(&LieAlgebraSpec::so3(), fc.chart(), fc.base_dim())?.bivector().clone())
}

/// Connection rotating the so(3)* fiber about the `x` axis along `v`,
/// `Gamma[y][v] = t u z`, `Gamma[z][v] = -t u y`, with `nu = pi_so3` and
/// `phi = (1 + x) dv^du`. Integrable exactly for `t = -1`.
pub fn curved_so3(twist: i64, zt: &ZeroTest) -> Result<GeometricData> {
    let fc = so3_chart()?;
    let t = ScalarExpr::int(twist);
    let (u, x, y, z) = (var(0), var(2), var(3), var(4));
    let zero = ScalarExpr::zero;
    let conn = EhresmannConnection::new(
        &fc,
        vec![
            vec![zero(), zero()],
            vec![zero(), t.clone() * u.clone() * z],
            vec![zero(), -(t * u * y)],
        ],
    )?;
    let phi = base_two_form(&fc, &[((1, 0), ScalarExpr::one() + x)])?;
    GeometricData::new(conn, so3_fiber_bivector(&fc)?, phi, zt)
}

/// Entry of the integrability corpus.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub data: GeometricData,
    /// The single condition this entry is built to violate.
    pub broken: Option<usize>,
}

fn entry(name: &str, data: GeometricData, broken: Option<usize>) -> CorpusEntry {
    CorpusEntry {
        name: name.into(),
        data,
        broken,
    }
}

fn flat_so3(phi_vu: ScalarExpr, nu_scale: ScalarExpr, zt: &ZeroTest) -> Result<GeometricData> {
    let fc = so3_chart()?;
    let phi = base_two_form(&fc, &[((1, 0), phi_vu)])?;
    let nu = so3_fiber_bivector(&fc)?.scale(&nu_scale);
    GeometricData::new(EhresmannConnection::flat(&fc), nu, phi, zt)
}

fn four_base(extra: Option<ScalarExpr>, zt: &ZeroTest) -> Result<GeometricData> {
    let fc = FiberedChart::from_names(&["q1", "q2", "q3", "q4"], &["y"])?;
    let mut entries = vec![
        ((0, 1), ScalarExpr::one() + var(4)),
        ((2, 3), ScalarExpr::one()),
    ];
    if let Some(c) = extra {
        entries.push(((1, 2), c));
    }
    let phi = base_two_form(&fc, &entries)?;
    GeometricData::new(EhresmannConnection::flat(&fc), MultivectorField::zero(fc.chart(), 2), phi, zt)
}

/// Coupling data with known integrability verdicts: the three examples (as
/// decompositions of the products and as first approximations), further
/// integrable data, and one variant per violated condition.
pub fn integrability_corpus(zt: &ZeroTest) -> Result<Vec<CorpusEntry>> {
    let mut out = Vec::new();
    for (name, spec) in [("ex1", example1(zt)?), ("ex2", example2(zt)?), ("ex3", example3(zt)?)] {
        let pi = jacobi_check(&spec.bivector()?, zt)?;
        out.push(entry(name, decompose(&pi, &torus_fibration(&spec)?, zt)?, None));
        out.push(entry(&format!("{name}-first-approx"), first_approximation(&spec, zt)?.data, None));
    }
    out.push(entry("curved-so3", curved_so3(-1, zt)?, None));
    out.push(entry("so3-casimir-weight", flat_so3(so3_casimir().reindex(&|i| i + 2), ScalarExpr::one(), zt)?, None));
    out.push(entry("four-base", four_base(None, zt)?, None));
    let fc = FiberedChart::from_names(&["u", "v"], &["a", "b", "c"])?;
    let nu = broken_bivector()?.reindex(fc.chart(), &|i| i + 2)?;
    let phi = base_two_form(&fc, &[((1, 0), ScalarExpr::one())])?;
    out.push(entry(
        "broken-1",
        GeometricData::new(EhresmannConnection::flat(&fc), nu, phi, zt)?,
        Some(1),
    ));
    out.push(entry("broken-2", flat_so3(ScalarExpr::one(), ScalarExpr::one() + sq(var(0)), zt)?, Some(2)));
    out.push(entry("broken-3", flat_so3(ScalarExpr::one() + var(2), ScalarExpr::one(), zt)?, Some(3)));
    out.push(entry("broken-4", four_base(Some(var(0) * var(4)), zt)?, Some(4)));
    Ok(out)
}

/// `compose` of every integrable corpus entry.
pub fn composed(entries: &[CorpusEntry], zt: &ZeroTest) -> Result<Vec<(String, PoissonStructure)>> {
    entries
        .iter()
        .filter(|e| e.broken.is_none())
        .map(|e| Ok((e.name.clone(), compose(&e.data, zt)?)))
        .collect()
}
