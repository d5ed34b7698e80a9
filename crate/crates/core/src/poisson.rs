//! Poisson structures: Jacobi verification, Lie-Poisson structures, Casimirs,
//! the Koszul bracket of 1-forms and Casimir-weighted products.

use num_traits::Zero;

use crate::chart::ChartSpec;
use crate::check::{Check, Regime, Witness};
use crate::error::{Error, Result};
use crate::expr::{Rational, ScalarExpr, ZeroTest};
use crate::multivec::{lie_derivative, schouten, DifferentialForm, MultivectorField};

#[derive(Clone, Debug, PartialEq)]
pub enum JacobiStatus {
    Unverified,
    Verified(Regime),
    /// Nonzero components of `[pi, pi]`.
    Failed(Vec<Witness>),
    Inconclusive(String),
}

/// A bivector together with the outcome of its Jacobi check.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonStructure {
    bivector: MultivectorField,
    status: JacobiStatus,
}

impl PoissonStructure {
    pub fn unverified(bivector: MultivectorField) -> Result<Self> {
        if bivector.degree() != 2 {
            return Err(Error::Degree(format!(
                "a Poisson structure is a bivector, got degree {}",
                bivector.degree()
            )));
        }
        Ok(PoissonStructure {
            bivector,
            status: JacobiStatus::Unverified,
        })
    }

    pub fn bivector(&self) -> &MultivectorField {
        &self.bivector
    }

    pub fn chart(&self) -> &ChartSpec {
        self.bivector.chart()
    }

    pub fn status(&self) -> &JacobiStatus {
        &self.status
    }

    pub fn is_verified(&self) -> bool {
        matches!(self.status, JacobiStatus::Verified(_))
    }

    /// `{f, g} = pi(df, dg)`.
    pub fn bracket(&self, f: &ScalarExpr, g: &ScalarExpr) -> Result<ScalarExpr> {
        let df = DifferentialForm::exact(self.chart(), f)?;
        let dg = DifferentialForm::exact(self.chart(), g)?;
        self.bivector.eval(&[&df, &dg])
    }

    /// Matrix entry `pi(dx_i, dx_j)`.
    pub fn entry(&self, i: usize, j: usize) -> ScalarExpr {
        self.bivector.component(&[i, j])
    }
}

/// Computes `[pi, pi]` and classifies every component.
pub fn jacobi_check(bivector: &MultivectorField, zt: &ZeroTest) -> Result<PoissonStructure> {
    let mut s = PoissonStructure::unverified(bivector.clone())?;
    let t = schouten(bivector, bivector)?;
    s.status = match t.check_zero(zt) {
        Ok(c) if c.holds => JacobiStatus::Verified(c.regime),
        Ok(c) => JacobiStatus::Failed(c.witnesses),
        Err(e @ Error::Inconclusive { .. }) => JacobiStatus::Inconclusive(e.to_string()),
        Err(e) => return Err(e),
    };
    Ok(s)
}

/// `[e_i, e_j] = sum coeff e_m` as `(i, j, [(m, coeff)])`.
pub type Bracket = (usize, usize, Vec<(usize, Rational)>);

/// Structure constants `[e_i, e_j] = sum_m c[i][j][m] e_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebraSpec {
    dim: usize,
    c: Vec<Rational>,
}

impl LieAlgebraSpec {
    pub fn new(dim: usize, c: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidLieAlgebra("dimension must be positive".into()));
        }
        let shape_ok = c.len() == dim
            && c.iter()
                .all(|row| row.len() == dim && row.iter().all(|v| v.len() == dim));
        if !shape_ok {
            return Err(Error::InvalidLieAlgebra(format!(
                "structure constants must be {dim}x{dim}x{dim}"
            )));
        }
        let flat = c.into_iter().flatten().flatten().collect();
        let g = LieAlgebraSpec { dim, c: flat };
        g.validate()?;
        Ok(g)
    }

    /// From the brackets `[e_i, e_j] = sum coeff e_m` for `i < j`; unlisted
    /// brackets vanish.
    pub fn from_brackets(dim: usize, brackets: &[Bracket]) -> Result<Self> {
        let mut c = vec![vec![vec![Rational::zero(); dim]; dim]; dim];
        for (i, j, terms) in brackets {
            if *i >= dim || *j >= dim || terms.iter().any(|(m, _)| *m >= dim) {
                return Err(Error::InvalidLieAlgebra(format!(
                    "bracket index out of range for dimension {dim}"
                )));
            }
            if i == j {
                return Err(Error::InvalidLieAlgebra(format!("bracket [e{i}, e{i}] must vanish")));
            }
            for (m, v) in terms {
                c[*i][*j][*m] += v.clone();
                c[*j][*i][*m] -= v.clone();
            }
        }
        Self::new(dim, c)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebraSpec {
            dim,
            c: vec![Rational::zero(); dim * dim * dim],
        }
    }

    /// so(3) with `[e1,e2]=e3` and cyclic permutations.
    pub fn so3() -> Self {
        let one = Rational::from_integer(1.into());
        Self::from_brackets(
            3,
            &[
                (0, 1, vec![(2, one.clone())]),
                (1, 2, vec![(0, one.clone())]),
                (2, 0, vec![(1, one)]),
            ],
        )
        .expect("so(3) is a Lie algebra")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, m: usize) -> &Rational {
        &self.c[(i * self.dim + j) * self.dim + m]
    }

    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for i in 0..n {
            for j in 0..n {
                for m in 0..n {
                    if *self.constant(i, j, m) != -self.constant(j, i, m).clone() {
                        return Err(Error::InvalidLieAlgebra(format!(
                            "constants not antisymmetric at ({i},{j},{m})"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for p in 0..n {
                        let mut s = Rational::zero();
                        for m in 0..n {
                            s += self.constant(i, j, m) * self.constant(m, l, p)
                                + self.constant(j, l, m) * self.constant(m, i, p)
                                + self.constant(l, i, m) * self.constant(m, j, p);
                        }
                        if !s.is_zero() {
                            return Err(Error::InvalidLieAlgebra(format!(
                                "Jacobi identity fails for ({i},{j},{l}) in component {p}"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The linear Poisson structure on the dual, with coordinates `x_m` on `chart`.
pub fn lie_poisson(g: &LieAlgebraSpec, chart: &ChartSpec) -> Result<PoissonStructure> {
    lie_poisson_at(g, chart, 0)
}

/// As [`lie_poisson`], with the dual coordinates starting at `offset`.
pub fn lie_poisson_at(g: &LieAlgebraSpec, chart: &ChartSpec, offset: usize) -> Result<PoissonStructure> {
    if offset + g.dim() > chart.dim() {
        return Err(Error::InvalidChart(format!(
            "{} has no room for a {}-dimensional dual at offset {offset}",
            chart,
            g.dim()
        )));
    }
    let n = g.dim();
    let mut pi = MultivectorField::zero(chart, 2);
    for i in 0..n {
        for j in i + 1..n {
            let coeff: ScalarExpr = (0..n)
                .filter(|&m| !g.constant(i, j, m).is_zero())
                .map(|m| ScalarExpr::var(offset + m).scale(g.constant(i, j, m)))
                .sum();
            pi.add_component(&[offset + i, offset + j], coeff)?;
        }
    }
    Ok(PoissonStructure {
        bivector: pi,
        status: JacobiStatus::Verified(Regime::Exact),
    })
}

/// Checks `pi(df, .) = 0`.
pub fn casimir_check(f: &ScalarExpr, pi: &PoissonStructure, zt: &ZeroTest) -> Result<Check> {
    pi.chart().check_expr(f)?;
    let df = DifferentialForm::exact(pi.chart(), f)?;
    pi.bivector().contract(&df)?.check_zero(zt)
}

/// `[a, b] = L_{La} b - L_{Lb} a - d L(a, b)`.
pub fn koszul_bracket(
    a: &DifferentialForm,
    b: &DifferentialForm,
    lambda: &MultivectorField,
) -> Result<DifferentialForm> {
    if a.degree() != 1 || b.degree() != 1 {
        return Err(Error::Degree("the Koszul bracket acts on 1-forms".into()));
    }
    let la = lambda.contract(a)?;
    let lb = lambda.contract(b)?;
    let pairing = lambda.eval(&[a, b])?;
    lie_derivative(&la, b)?
        .sub(&lie_derivative(&lb, a)?)?
        .sub(&DifferentialForm::exact(lambda.chart(), &pairing)?)
}

/// One factor of a weighted product: a Poisson manifold and a Casimir.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonFactor {
    pub structure: PoissonStructure,
    pub casimir: ScalarExpr,
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedProductSpec {
    factor1: PoissonFactor,
    factor2: PoissonFactor,
    chart: ChartSpec,
}

impl WeightedProductSpec {
    /// Validates both Casimirs and their non-vanishing on sample points.
    pub fn new(factor1: PoissonFactor, factor2: PoissonFactor, zt: &ZeroTest) -> Result<Self> {
        for (k, f) in [&factor1, &factor2].into_iter().enumerate() {
            let c = casimir_check(&f.casimir, &f.structure, zt)?;
            if !c.holds {
                return Err(Error::Precondition(format!(
                    "the function of factor {} is not a Casimir",
                    k + 1
                )));
            }
            nonvanishing_on_samples(&f.casimir, f.structure.chart().dim(), zt).map_err(|e| {
                Error::Precondition(format!("Casimir of factor {}: {e}", k + 1))
            })?;
        }
        let chart = factor1.structure.chart().product(factor2.structure.chart())?;
        Ok(WeightedProductSpec {
            factor1,
            factor2,
            chart,
        })
    }

    pub fn factor1(&self) -> &PoissonFactor {
        &self.factor1
    }

    pub fn factor2(&self) -> &PoissonFactor {
        &self.factor2
    }

    /// Factor-1 coordinates followed by factor-2 coordinates.
    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn offset(&self) -> usize {
        self.factor1.structure.chart().dim()
    }

    /// Pullback of a factor-2 function to the product chart.
    pub fn pull2(&self, f: &ScalarExpr) -> ScalarExpr {
        let off = self.offset();
        f.reindex(&|i| i + off)
    }

    /// `(pr2* f2)(pr1* pi1) + (pr1* f1)(pr2* pi2)` without the Jacobi check.
    pub fn bivector(&self) -> Result<MultivectorField> {
        let off = self.offset();
        let pi1 = self.factor1.structure.bivector().reindex(&self.chart, &|i| i)?;
        let pi2 = self.factor2.structure.bivector().reindex(&self.chart, &|i| i + off)?;
        let f2 = self.pull2(&self.factor2.casimir);
        pi1.scale(&f2).add(&pi2.scale(&self.factor1.casimir))
    }
}

fn nonvanishing_on_samples(f: &ScalarExpr, dim: usize, zt: &ZeroTest) -> Result<()> {
    if let Some(c) = f.as_rational() {
        return if c.is_zero() {
            Err(Error::Precondition("vanishes identically".into()))
        } else {
            Ok(())
        };
    }
    let mut valid = 0;
    for p in zt.sample_points(dim, zt.samples * 4, 1) {
        let Ok(v) = f.eval(&p) else { continue };
        valid += 1;
        if v.to_f64().abs() < zt.epsilon {
            return Err(Error::Precondition(format!(
                "vanishes at the sample point {}",
                p.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
            )));
        }
        if valid >= zt.samples {
            break;
        }
    }
    if valid < zt.samples {
        return Err(Error::Inconclusive {
            valid,
            required: zt.samples,
        });
    }
    Ok(())
}

/// The Casimir-weighted product, Jacobi-checked.
pub fn weighted_product(spec: &WeightedProductSpec, zt: &ZeroTest) -> Result<PoissonStructure> {
    jacobi_check(&spec.bivector()?, zt)
}
