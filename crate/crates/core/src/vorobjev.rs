//! First approximations at a symplectic leaf and volume obstructions.
//!
//! The leaf is the zero section `y = 0` of a fibered chart. Sections of the
//! isotropy bundle are conormal 1-forms `sum_a c_a(q) dy_a`; brackets are
//! Koszul brackets of the ambient bivector restricted to the leaf.
//!
//! Sign conventions: the leaf form has matrix `omega = (P_bb|_{y=0})^-1`, so
//! `d_u ^ d_v` has leaf form `dv ^ du`. The first approximation uses
//! `phi = omega + l(R_sigma)`, `Gamma[b][i] = l(nabla_i dy_b)` and
//! `nu^ab = l([dy_a, dy_b])`; on data that are already affine in the fiber
//! this returns the data unchanged.
//!
//! Volumes use the Liouville normalization `omega^n / n!`, under which the
//! volume of a product leaf is the product of the factor volumes.

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::chart::ChartSpec;
use crate::check::{Check, Regime, Witness};
use crate::coupling::{compose, EhresmannConnection, FiberedChart, GeometricData};
use crate::error::{Error, Result};
use crate::expr::{Rational, ScalarExpr, Value, ZeroTest};
use crate::linalg::ExprMatrix;
use crate::multivec::{ChartMap, DifferentialForm, MultivectorField};
use crate::poisson::{jacobi_check, koszul_bracket, PoissonStructure, WeightedProductSpec};

/// `l(sum_a c_a dy_a) = sum_a c_a y_a` for a conormal section.
pub fn ell(s: &DifferentialForm, fc: &FiberedChart) -> Result<ScalarExpr> {
    s.chart().ensure_same(fc.chart())?;
    if s.degree() != 1 {
        return Err(Error::Degree("l acts on 1-forms".into()));
    }
    let mut out = ScalarExpr::zero();
    for (idx, c) in s.components() {
        let i = idx[0];
        if fc.is_base(i) {
            return Err(Error::Precondition(format!(
                "section has a component along d{}",
                fc.name(i)
            )));
        }
        if fc.fiber_vars().iter().any(|&a| c.depends_on(a)) {
            return Err(Error::Precondition(format!(
                "coefficient of d{} depends on the fiber",
                fc.name(i)
            )));
        }
        out = out + c * ScalarExpr::var(i);
    }
    Ok(out)
}

/// `d_0 f = sum_a (d f / d y_a)(q, 0) dy_a`.
pub fn fiber_differential_at_zero(f: &ScalarExpr, fc: &FiberedChart) -> Result<DifferentialForm> {
    fc.chart().check_expr(f)?;
    let mut comps = vec![ScalarExpr::zero(); fc.chart().dim()];
    for a in fc.fiber_vars() {
        comps[a] = fc.at_zero_section(&f.diff(a))?;
    }
    DifferentialForm::covector(fc.chart(), &comps)
}

/// `J^1_0 f = f(0) + l(d_0 f)`.
pub fn first_jet(f: &ScalarExpr, fc: &FiberedChart) -> Result<ScalarExpr> {
    Ok(fc.at_zero_section(f)? + ell(&fiber_differential_at_zero(f, fc)?, fc)?)
}

fn horizontal_matrix(lambda: &MultivectorField, fc: &FiberedChart) -> ExprMatrix {
    let d = fc.base_dim();
    ExprMatrix::from_fn(d, d, |i, j| lambda.component(&[i, j]))
}

fn check_leaf(lambda: &MultivectorField, fc: &FiberedChart, zt: &ZeroTest) -> Result<ExprMatrix> {
    lambda.chart().ensure_same(fc.chart())?;
    if lambda.degree() != 2 {
        return Err(Error::Degree("expected a bivector".into()));
    }
    for (idx, c) in lambda.components() {
        if idx.iter().all(|&i| fc.is_base(i)) {
            continue;
        }
        if !fc.at_zero_section(&c)?.is_zero(zt)?.is_zero() {
            return Err(Error::Precondition(format!(
                "the zero section is not a leaf: component ({}) does not vanish there",
                idx.iter().map(|&i| fc.name(i)).collect::<Vec<_>>().join(",")
            )));
        }
    }
    let p0 = horizontal_matrix(lambda, fc).map(|e| fc.at_zero_section(e))?;
    p0.inverse(zt).map_err(|e| match e {
        Error::Singular => Error::Precondition("the bivector is degenerate along the leaf".into()),
        other => other,
    })
}

/// Leaf form `omega` with matrix `(P_bb|_{y=0})^-1`.
pub fn leaf_form(lambda: &PoissonStructure, fc: &FiberedChart, zt: &ZeroTest) -> Result<DifferentialForm> {
    let w = check_leaf(lambda.bivector(), fc, zt)?;
    form_of_matrix(&w, fc)
}

fn form_of_matrix(w: &ExprMatrix, fc: &FiberedChart) -> Result<DifferentialForm> {
    let mut out = DifferentialForm::zero(fc.chart(), 2);
    for i in 0..w.rows() {
        for j in i + 1..w.cols() {
            out.add_component(&[i, j], w.get(i, j).clone())?;
        }
    }
    Ok(out)
}

/// The pullback connection of a tubular neighborhood and its tables.
#[derive(Clone, Debug, PartialEq)]
pub struct PullbackConnectionData {
    fc: FiberedChart,
    lambda: MultivectorField,
    omega: DifferentialForm,
    sigma: Vec<DifferentialForm>,
    /// `nabla_i dy_b = sum_c nabla[i][b][c] dy_c`.
    nabla: Vec<Vec<Vec<ScalarExpr>>>,
    /// `l(R_sigma(d_i, d_j))`.
    ell_curvature: Vec<Vec<ScalarExpr>>,
    /// `l([dy_a, dy_b])`.
    isotropy: Vec<Vec<ScalarExpr>>,
}

/// Builds the pullback connection of `lambda` at the zero section, whose
/// leaf form must be `omega`.
#[allow(clippy::needless_range_loop)]
pub fn pullback_connection(
    lambda: &PoissonStructure,
    fc: &FiberedChart,
    omega: &DifferentialForm,
    zt: &ZeroTest,
) -> Result<PullbackConnectionData> {
    let w = check_leaf(lambda.bivector(), fc, zt)?;
    omega.chart().ensure_same(fc.chart())?;
    let expected = form_of_matrix(&w, fc)?;
    if !omega.sub(&expected)?.check_zero(zt)?.holds {
        return Err(Error::Precondition(
            "the given form is not the leaf form of the bivector".into(),
        ));
    }
    let nd = fc.base_dim();
    let nf = fc.fiber_dim();
    let sigma: Vec<DifferentialForm> = (0..nd)
        .map(|i| {
            let mut comps = vec![ScalarExpr::zero(); fc.chart().dim()];
            for (j, c) in comps.iter_mut().enumerate().take(nd) {
                *c = w.get(i, j).clone();
            }
            DifferentialForm::covector(fc.chart(), &comps)
        })
        .collect::<Result<_>>()?;
    let mut data = PullbackConnectionData {
        fc: fc.clone(),
        lambda: lambda.bivector().clone(),
        omega: omega.clone(),
        sigma,
        nabla: Vec::new(),
        ell_curvature: Vec::new(),
        isotropy: Vec::new(),
    };
    let mut nabla = vec![vec![vec![ScalarExpr::zero(); nf]; nf]; nd];
    for (i, table) in nabla.iter_mut().enumerate() {
        for (b, row) in table.iter_mut().enumerate() {
            let s = data.nabla(i, &fc.dy(b), zt)?;
            for (c, entry) in row.iter_mut().enumerate() {
                *entry = s.component(&[fc.fiber(c)]);
            }
        }
    }
    let mut curv = vec![vec![ScalarExpr::zero(); nd]; nd];
    for i in 0..nd {
        for j in i + 1..nd {
            let l = ell(&data.curvature_section(i, j, zt)?, fc)?;
            curv[j][i] = -&l;
            curv[i][j] = l;
        }
    }
    let mut iso = vec![vec![ScalarExpr::zero(); nf]; nf];
    for a in 0..nf {
        for b in a + 1..nf {
            let l = ell(&data.bracket(&fc.dy(a), &fc.dy(b), zt)?, fc)?;
            iso[b][a] = -&l;
            iso[a][b] = l;
        }
    }
    data.nabla = nabla;
    data.ell_curvature = curv;
    data.isotropy = iso;
    Ok(data)
}

impl PullbackConnectionData {
    pub fn fibered_chart(&self) -> &FiberedChart {
        &self.fc
    }

    pub fn omega(&self) -> &DifferentialForm {
        &self.omega
    }

    /// `sigma(d_{q_i}) = sum_j omega_ij dq_j`.
    pub fn sigma(&self, i: usize) -> &DifferentialForm {
        &self.sigma[i]
    }

    pub fn nabla_coefficient(&self, i: usize, b: usize, c: usize) -> &ScalarExpr {
        &self.nabla[i][b][c]
    }

    pub fn ell_curvature(&self, i: usize, j: usize) -> &ScalarExpr {
        &self.ell_curvature[i][j]
    }

    pub fn isotropy_bracket(&self, a: usize, b: usize) -> &ScalarExpr {
        &self.isotropy[a][b]
    }

    pub fn is_flat(&self) -> bool {
        self.nabla.iter().flatten().flatten().all(ScalarExpr::is_structural_zero)
    }

    fn ensure_conormal(&self, s: &DifferentialForm) -> Result<()> {
        ell(s, &self.fc).map(|_| ())
    }

    /// Restricts a 1-form to the leaf and checks that it is conormal there.
    fn restrict_conormal(&self, form: &DifferentialForm, what: &str, zt: &ZeroTest) -> Result<DifferentialForm> {
        let r = form.subst_values(&self.fc.zero_section_values())?;
        let mut out = DifferentialForm::zero(self.fc.chart(), 1);
        let mut stray = Vec::new();
        for (idx, c) in r.components() {
            if self.fc.is_base(idx[0]) {
                stray.push((format!("d{}", self.fc.name(idx[0])), c));
            } else {
                out.add_component(&idx, c)?;
            }
        }
        if !Check::all_zero(stray, zt)?.holds {
            return Err(Error::Precondition(format!("{what} is not conormal to the leaf")));
        }
        Ok(out)
    }

    /// `nabla_i s = [sigma(d_i), s]` on the leaf.
    pub fn nabla(&self, i: usize, s: &DifferentialForm, zt: &ZeroTest) -> Result<DifferentialForm> {
        if i >= self.fc.base_dim() {
            return Err(Error::IndexOutOfRange {
                index: i,
                dim: self.fc.base_dim(),
            });
        }
        self.ensure_conormal(s)?;
        let b = koszul_bracket(&self.sigma[i], s, &self.lambda)?;
        self.restrict_conormal(&b, "nabla", zt)
    }

    /// Isotropy bracket `[s1, s2]` on the leaf.
    pub fn bracket(&self, s1: &DifferentialForm, s2: &DifferentialForm, zt: &ZeroTest) -> Result<DifferentialForm> {
        self.ensure_conormal(s1)?;
        self.ensure_conormal(s2)?;
        let b = koszul_bracket(s1, s2, &self.lambda)?;
        self.restrict_conormal(&b, "the isotropy bracket", zt)
    }

    /// `R_sigma(d_i, d_j) = [sigma_i, sigma_j]` (coordinate fields commute).
    pub fn curvature_section(&self, i: usize, j: usize, zt: &ZeroTest) -> Result<DifferentialForm> {
        let b = koszul_bracket(&self.sigma[i], &self.sigma[j], &self.lambda)?;
        self.restrict_conormal(&b, "R_sigma", zt)
    }

    /// `R_nabla(d_i, d_j) s = nabla_i nabla_j s - nabla_j nabla_i s`.
    pub fn curvature_nabla(&self, i: usize, j: usize, s: &DifferentialForm, zt: &ZeroTest) -> Result<DifferentialForm> {
        let a = self.nabla(i, &self.nabla(j, s, zt)?, zt)?;
        let b = self.nabla(j, &self.nabla(i, s, zt)?, zt)?;
        a.sub(&b)
    }

    /// The splitting property: the base part of `Lambda(sigma_i)` is `d_i`
    /// on the leaf.
    pub fn splitting_check(&self, zt: &ZeroTest) -> Result<Check> {
        let mut items = Vec::new();
        for i in 0..self.fc.base_dim() {
            let v = self.lambda.contract(&self.sigma[i])?;
            for k in 0..self.fc.base_dim() {
                let c = self.fc.at_zero_section(&v.component(&[k]))?;
                let target = if i == k { ScalarExpr::one() } else { ScalarExpr::zero() };
                items.push((format!("Lambda(sigma_{})^{}", self.fc.name(i), self.fc.name(k)), c - target));
            }
        }
        Check::all_zero(items, zt)
    }

    /// `nabla_i (g s) = (d_i g) s + g nabla_i s` for a base function `g`.
    pub fn leibniz_check(&self, i: usize, g: &ScalarExpr, s: &DifferentialForm, zt: &ZeroTest) -> Result<Check> {
        let lhs = self.nabla(i, &s.scale(g), zt)?;
        let rhs = s.scale(&g.diff(i)).add(&self.nabla(i, s, zt)?.scale(g))?;
        lhs.sub(&rhs)?.check_zero(zt)
    }

    /// `nabla_i [s1, s2] = [nabla_i s1, s2] + [s1, nabla_i s2]`.
    pub fn identity_ii(&self, i: usize, s1: &DifferentialForm, s2: &DifferentialForm, zt: &ZeroTest) -> Result<Check> {
        let lhs = self.nabla(i, &self.bracket(s1, s2, zt)?, zt)?;
        let rhs = self
            .bracket(&self.nabla(i, s1, zt)?, s2, zt)?
            .add(&self.bracket(s1, &self.nabla(i, s2, zt)?, zt)?)?;
        lhs.sub(&rhs)?.check_zero(zt)
    }

    /// `[R_sigma(d_i, d_j), s] = R_nabla(d_i, d_j) s`.
    pub fn identity_iii(&self, i: usize, j: usize, s: &DifferentialForm, zt: &ZeroTest) -> Result<Check> {
        let lhs = self.bracket(&self.curvature_section(i, j, zt)?, s, zt)?;
        let rhs = self.curvature_nabla(i, j, s, zt)?;
        lhs.sub(&rhs)?.check_zero(zt)
    }

    /// Cyclic sum of `nabla_i R_sigma(d_j, d_k)`.
    pub fn identity_iv(&self, i: usize, j: usize, k: usize, zt: &ZeroTest) -> Result<Check> {
        let mut acc = DifferentialForm::zero(self.fc.chart(), 1);
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            acc = acc.add(&self.nabla(a, &self.curvature_section(b, c, zt)?, zt)?)?;
        }
        acc.check_zero(zt)
    }

    /// Jacobi identity of the isotropy bracket on the basis `dy_a`.
    pub fn isotropy_jacobi(&self, zt: &ZeroTest) -> Result<Check> {
        let nf = self.fc.fiber_dim();
        let mut out = Check::pass();
        for a in 0..nf {
            for b in a + 1..nf {
                for c in b + 1..nf {
                    let (ya, yb, yc) = (self.fc.dy(a), self.fc.dy(b), self.fc.dy(c));
                    let t1 = self.bracket(&ya, &self.bracket(&yb, &yc, zt)?, zt)?;
                    let t2 = self.bracket(&yb, &self.bracket(&yc, &ya, zt)?, zt)?;
                    let t3 = self.bracket(&yc, &self.bracket(&ya, &yb, zt)?, zt)?;
                    out = out.and(t1.add(&t2)?.add(&t3)?.check_zero(zt)?);
                }
            }
        }
        Ok(out)
    }

    /// Geometric data of the first approximation on the normal bundle.
    pub fn geometric_data(&self, zt: &ZeroTest) -> Result<GeometricData> {
        let fc = &self.fc;
        let nd = fc.base_dim();
        let nf = fc.fiber_dim();
        let gamma: Vec<Vec<ScalarExpr>> = (0..nf)
            .map(|b| {
                (0..nd)
                    .map(|i| {
                        (0..nf)
                            .map(|c| &self.nabla[i][b][c] * &ScalarExpr::var(fc.fiber(c)))
                            .sum()
                    })
                    .collect()
            })
            .collect();
        let conn = EhresmannConnection::new(fc, gamma)?;
        let mut nu = MultivectorField::zero(fc.chart(), 2);
        for a in 0..nf {
            for b in a + 1..nf {
                nu.add_component(&[fc.fiber(a), fc.fiber(b)], self.isotropy[a][b].clone())?;
            }
        }
        let mut phi = DifferentialForm::zero(fc.chart(), 2);
        for i in 0..nd {
            for j in i + 1..nd {
                phi.add_component(&[i, j], self.omega.component(&[i, j]) + &self.ell_curvature[i][j])?;
            }
        }
        GeometricData::new(conn, nu, phi, zt)
    }
}

/// Output of [`first_approximation`].
#[derive(Clone, Debug, PartialEq)]
pub struct FirstApproximation {
    pub data: GeometricData,
    pub structure: PoissonStructure,
    /// `J^1_0 f` on the product chart.
    pub jet: ScalarExpr,
    /// `(1 / J^1_0 f) pi_S + pi_g` assembled directly.
    pub closed_form: MultivectorField,
    /// Componentwise agreement of `structure` with `closed_form`. The
    /// computed structure has leaf forms given by the first jet of `1/f`, so
    /// the two differ whenever `d_0 f` is nonzero.
    pub agreement: Check,
}

fn is_linear_in(e: &ScalarExpr, vars: &[usize]) -> bool {
    e.is_polynomial()
        && e.degree_in(vars) == Some(1)
        && e.subst_values(&vars.iter().map(|&v| (v, Rational::zero())).collect::<Vec<_>>())
            .is_ok_and(|c| c.is_structural_zero())
}

/// The first approximation of `f pi_S + pi_g` at `S x {0}`.
pub fn first_approximation(spec: &WeightedProductSpec, zt: &ZeroTest) -> Result<FirstApproximation> {
    let f1 = &spec.factor1().casimir;
    if f1.as_rational() != Some(Rational::one()) {
        return Err(Error::Precondition(
            "the Casimir of the symplectic factor must be 1".into(),
        ));
    }
    let s = spec.factor1().structure.bivector();
    let n1 = s.chart().dim();
    let det = ExprMatrix::from_fn(n1, n1, |i, j| s.component(&[i, j])).det()?;
    if det.is_zero(zt)?.is_zero() {
        return Err(Error::Precondition("the first factor is not symplectic".into()));
    }
    let g = spec.factor2().structure.bivector();
    let fiber: Vec<usize> = (0..g.chart().dim()).collect();
    if let Some((idx, _)) = g.components().into_iter().find(|(_, c)| !is_linear_in(c, &fiber)) {
        return Err(Error::Precondition(format!(
            "the second factor is not linear: component ({}) is not a linear form",
            idx.iter().map(|&i| g.chart().names()[i].clone()).collect::<Vec<_>>().join(",")
        )));
    }
    let fc = FiberedChart::new(spec.chart(), n1)?;
    let f = spec.pull2(&spec.factor2().casimir);
    let f0 = fc.at_zero_section(&f)?;
    if !(&f0 - &ScalarExpr::one()).is_zero(zt)?.is_zero() {
        return Err(Error::Precondition(format!(
            "the Casimir must equal 1 at the origin, found {}",
            fc.chart().render(&f0)
        )));
    }
    let lambda = jacobi_check(&spec.bivector()?, zt)?;
    let omega = leaf_form(&lambda, &fc, zt)?;
    let pc = pullback_connection(&lambda, &fc, &omega, zt)?;
    let data = pc.geometric_data(zt)?;
    let structure = compose(&data, zt)?;

    let jet = first_jet(&f, &fc)?;
    let off = spec.offset();
    let pi_s = s.reindex(spec.chart(), &|i| i)?;
    let pi_g = g.reindex(spec.chart(), &|i| i + off)?;
    let closed_form = pi_s.scale(&jet.recip()?).add(&pi_g)?;
    let agreement = structure.bivector().sub(&closed_form)?.check_zero(zt)?;
    Ok(FirstApproximation {
        data,
        structure,
        jet,
        closed_form,
        agreement,
    })
}

/// Verdict of [`verify_linearizing_map`].
#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationVerdict {
    /// The map restricts to the identity on the zero section.
    pub fixes_leaf: Check,
    /// `psi_* source - target` vanishes.
    pub pushforward: Check,
}

impl LinearizationVerdict {
    pub fn holds(&self) -> bool {
        self.fixes_leaf.holds && self.pushforward.holds
    }

    pub fn regime(&self) -> Regime {
        self.fixes_leaf.regime.join(self.pushforward.regime)
    }
}

/// Checks `psi|_S = id` and `psi_* source = target`.
pub fn verify_linearizing_map(
    psi: &ChartMap,
    fc: &FiberedChart,
    source: &PoissonStructure,
    target: &PoissonStructure,
    zt: &ZeroTest,
) -> Result<LinearizationVerdict> {
    psi.source().ensure_same(fc.chart())?;
    source.chart().ensure_same(psi.source())?;
    target.chart().ensure_same(psi.target())?;
    if psi.source().dim() != psi.target().dim() {
        return Err(Error::ChartMap("source and target dimensions differ".into()));
    }
    let mut items = Vec::new();
    for (k, comp) in psi.forward().iter().enumerate() {
        let restricted = fc.at_zero_section(comp)?;
        let expected = if fc.is_base(k) { ScalarExpr::var(k) } else { ScalarExpr::zero() };
        items.push((format!("psi^{}|S", psi.target().names()[k]), restricted - expected));
    }
    let fixes_leaf = Check::all_zero(items, zt)?;
    let pushed = psi.pushforward(source.bivector(), zt)?;
    let pushforward = pushed.sub(target.bivector())?.check_zero(zt)?;
    Ok(LinearizationVerdict {
        fixes_leaf,
        pushforward,
    })
}

/// Volume of the unit symplectic torus.
pub fn torus_volume() -> ScalarExpr {
    ScalarExpr::one()
}

/// Volume `4 pi r` of the sphere of radius `r` with form `dA / r`.
pub fn sphere_volume(r: &ScalarExpr) -> ScalarExpr {
    ScalarExpr::int(4) * ScalarExpr::pi() * r
}

/// `a^n1 b^n2 vol1 vol2`: the volume of a product leaf whose form is
/// `a omega_1 + b omega_2`, with `omega_k` of half-dimension `n_k`.
pub fn product_leaf_volume(
    vol1: &ScalarExpr,
    n1: u32,
    vol2: &ScalarExpr,
    n2: u32,
    a: &ScalarExpr,
    b: &ScalarExpr,
) -> Result<ScalarExpr> {
    Ok(a.powi(n1 as i32)? * b.powi(n2 as i32)? * vol1 * vol2)
}

/// Where the leaf parameters range.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParameterDomain {
    Real,
    Positive,
}

/// A family of compact leaves with closed-form volumes.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafVolumeProfile {
    chart: ChartSpec,
    volume: ScalarExpr,
    leaf_dim: usize,
    domain: ParameterDomain,
}

impl LeafVolumeProfile {
    /// Requires an even leaf dimension and a volume that is manifestly
    /// positive on the domain or positive on every sample.
    pub fn new(
        chart: &ChartSpec,
        volume: ScalarExpr,
        leaf_dim: usize,
        domain: ParameterDomain,
        zt: &ZeroTest,
    ) -> Result<Self> {
        chart.check_expr(&volume)?;
        if !leaf_dim.is_multiple_of(2) {
            return Err(Error::Precondition(format!("leaf dimension {leaf_dim} is odd")));
        }
        let manifest = domain == ParameterDomain::Positive && volume.positive_on_orthant();
        if !manifest {
            for p in zt.sample_points(chart.dim(), zt.samples, 2) {
                let p: Vec<Rational> = match domain {
                    ParameterDomain::Real => p,
                    ParameterDomain::Positive => {
                        if p.iter().any(Zero::is_zero) {
                            continue;
                        }
                        p.into_iter().map(|r| r.abs()).collect()
                    }
                };
                let v = volume.eval(&p)?.to_f64();
                if v <= 0.0 {
                    return Err(Error::Precondition(format!(
                        "volume {} is not positive at ({})",
                        chart.render(&volume),
                        p.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ")
                    )));
                }
            }
        }
        Ok(LeafVolumeProfile {
            chart: chart.clone(),
            volume,
            leaf_dim,
            domain,
        })
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn volume(&self) -> &ScalarExpr {
        &self.volume
    }

    pub fn leaf_dim(&self) -> usize {
        self.leaf_dim
    }

    pub fn domain(&self) -> ParameterDomain {
        self.domain
    }
}

/// Outcome of comparing two volume profiles.
#[derive(Clone, Debug, PartialEq)]
pub enum VolumeCertificate {
    /// Both profiles coincide; leaves match with equal parameters.
    Identical,
    /// `A` varies while `B` is constant, so no volume-preserving
    /// correspondence of leaves with a fixed parameter identification exists.
    NonConstancy {
        derivatives: Vec<ScalarExpr>,
        /// A parameter value where some derivative is nonzero.
        point: Vec<Rational>,
        value: Value,
    },
    /// The parameter of `B` as a function of the parameters of `A` making
    /// the volumes equal.
    Matching { parameter: String, solution: ScalarExpr },
}

pub fn volume_obstruction(
    a: &LeafVolumeProfile,
    b: &LeafVolumeProfile,
    zt: &ZeroTest,
) -> Result<VolumeCertificate> {
    if a.leaf_dim != b.leaf_dim {
        return Err(Error::Precondition(format!(
            "leaf dimensions {} and {} differ",
            a.leaf_dim, b.leaf_dim
        )));
    }
    if a.chart == b.chart && (&a.volume - &b.volume).is_zero(zt)?.is_zero() {
        return Ok(VolumeCertificate::Identical);
    }
    let a_const = a.volume.max_var().is_none();
    let b_const = b.volume.max_var().is_none();
    if b_const {
        if a_const {
            return Err(Error::Unsolvable(format!(
                "constant volumes {} and {} differ",
                a.chart.render(&a.volume),
                b.chart.render(&b.volume)
            )));
        }
        let derivatives: Vec<ScalarExpr> = (0..a.chart.dim()).map(|i| a.volume.diff(i)).collect();
        for p in zt.sample_points(a.chart.dim(), zt.samples * 4, 3) {
            let p: Vec<Rational> = match a.domain {
                ParameterDomain::Real => p,
                ParameterDomain::Positive => p.into_iter().map(|r| r.abs() + Rational::one()).collect(),
            };
            for dv in &derivatives {
                let Ok(v) = dv.eval(&p) else { continue };
                let nonzero = match &v {
                    Value::Exact(r) => !r.is_zero(),
                    Value::Approx(x) => x.abs() > zt.epsilon,
                };
                if nonzero {
                    return Ok(VolumeCertificate::NonConstancy {
                        derivatives,
                        point: p,
                        value: v,
                    });
                }
            }
        }
        return Err(Error::Unsolvable(
            "no sample shows the first profile varying".into(),
        ));
    }
    if b.chart.dim() != 1 {
        return Err(Error::Unsolvable(
            "matching needs a one-parameter second profile".into(),
        ));
    }
    let coeffs = b.volume.coefficients_in(0).ok_or_else(|| {
        Error::Unsolvable(format!(
            "volume {} is not polynomial in its parameter",
            b.chart.render(&b.volume)
        ))
    })?;
    if coeffs.len() != 2 || coeffs.iter().any(|c| c.max_var().is_some()) {
        return Err(Error::Unsolvable(format!(
            "volume {} is not affine in its parameter",
            b.chart.render(&b.volume)
        )));
    }
    let solution = (&a.volume - &coeffs[0]).checked_div(&coeffs[1])?;
    Ok(VolumeCertificate::Matching {
        parameter: b.chart.names()[0].clone(),
        solution,
    })
}

/// The leaf volume profiles of `f pi_T + pi_so3` with `f = 1 + |x|^2`
/// (leaves `T x S^2_r`) and of the direct product.
pub fn sphere_family_profiles(zt: &ZeroTest) -> Result<(LeafVolumeProfile, LeafVolumeProfile)> {
    let c1 = ChartSpec::new(&["r1"])?;
    let c2 = ChartSpec::new(&["r2"])?;
    let r = ScalarExpr::var(0);
    let scale = (ScalarExpr::one() + r.powi(2)?).recip()?;
    let va = product_leaf_volume(&torus_volume(), 1, &sphere_volume(&r), 1, &scale, &ScalarExpr::one())?;
    let vb = product_leaf_volume(&torus_volume(), 1, &sphere_volume(&r), 1, &ScalarExpr::one(), &ScalarExpr::one())?;
    Ok((
        LeafVolumeProfile::new(&c1, va, 4, ParameterDomain::Positive, zt)?,
        LeafVolumeProfile::new(&c2, vb, 4, ParameterDomain::Positive, zt)?,
    ))
}

/// One grid point of [`sphere_class_certificate`].
#[derive(Clone, Debug, PartialEq)]
pub struct SphereSample {
    pub r1: Rational,
    pub volume_match: Rational,
    pub sphere_class: Rational,
    pub mismatch: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereClassCertificate {
    /// `r2(r1)` from volume matching.
    pub matching: ScalarExpr,
    /// `r1 - r2(r1)`.
    pub difference: ScalarExpr,
    /// Numerator and denominator of `difference` are positive for `r1 > 0`.
    pub difference_positive: bool,
    pub samples: Vec<SphereSample>,
    pub note: String,
}

impl SphereClassCertificate {
    pub fn holds(&self) -> bool {
        self.difference_positive && self.samples.iter().all(|s| s.mismatch)
    }

    pub fn witnesses(&self) -> Vec<Witness> {
        self.samples
            .iter()
            .map(|s| Witness {
                label: format!("r1 = {}: matching r2 = {}, sphere class r2 = {}", s.r1, s.volume_match, s.sphere_class),
                value: ScalarExpr::constant(&s.sphere_class - &s.volume_match),
            })
            .collect()
    }
}

/// Compares the volume-matching radius with the radius forced by the sphere
/// class (`r2 = r1`) on a grid of positive radii and symbolically.
pub fn sphere_class_certificate(grid: &[Rational], zt: &ZeroTest) -> Result<SphereClassCertificate> {
    if let Some(bad) = grid.iter().find(|r| !r.is_positive()) {
        return Err(Error::Precondition(format!("radius {bad} is not positive")));
    }
    let (a, b) = sphere_family_profiles(zt)?;
    let matching = match volume_obstruction(&a, &b, zt)? {
        VolumeCertificate::Matching { solution, .. } => solution,
        other => {
            return Err(Error::Unsolvable(format!(
                "expected a matching function, got {other:?}"
            )))
        }
    };
    let r = ScalarExpr::var(0);
    let difference = &r - &matching;
    let (num, den) = difference.numer_denom();
    let difference_positive = num.positive_on_orthant() && den.positive_on_orthant();
    let samples = grid
        .par_iter()
        .map(|r1| {
            let m = match matching.eval(std::slice::from_ref(r1))? {
                Value::Exact(v) => v,
                Value::Approx(_) => unreachable!("the matching function is rational"),
            };
            Ok(SphereSample {
                r1: r1.clone(),
                mismatch: m != *r1,
                volume_match: m,
                sphere_class: r1.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SphereClassCertificate {
        matching,
        difference,
        difference_positive,
        samples,
        note: "r1 = 0 is excluded: the leaf there is 2-dimensional".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poisson::{lie_poisson, LieAlgebraSpec, PoissonFactor};

    fn zt() -> ZeroTest {
        ZeroTest::default()
    }

    fn torus() -> PoissonStructure {
        let c = ChartSpec::new(&["u", "v"]).unwrap();
        jacobi_check(&MultivectorField::basis(&c, &[0, 1]).unwrap(), &zt()).unwrap()
    }

    fn line_spec(f: ScalarExpr) -> WeightedProductSpec {
        let c = ChartSpec::new(&["z"]).unwrap();
        let line = jacobi_check(&MultivectorField::zero(&c, 2), &zt()).unwrap();
        WeightedProductSpec::new(
            PoissonFactor {
                structure: torus(),
                casimir: ScalarExpr::one(),
            },
            PoissonFactor {
                structure: line,
                casimir: f,
            },
            &zt(),
        )
        .unwrap()
    }

    #[test]
    fn ell_pairs_with_dual_basis() {
        let fc = FiberedChart::from_names(&["u", "v"], &["y1", "y2"]).unwrap();
        assert_eq!(ell(&fc.dy(0), &fc).unwrap(), ScalarExpr::var(2));
        assert!(ell(&fc.dq(0), &fc).is_err());
        let bad = fc.dy(0).scale(&ScalarExpr::var(3));
        assert!(ell(&bad, &fc).is_err());
    }

    #[test]
    fn jets_of_example_casimirs() {
        let fc = FiberedChart::from_names(&["u", "v"], &["z"]).unwrap();
        let z = ScalarExpr::var(2);
        assert_eq!(first_jet(&ScalarExpr::exp(&z), &fc).unwrap(), ScalarExpr::one() + z.clone());
        let fc3 = FiberedChart::from_names(&["u", "v"], &["x", "y", "z"]).unwrap();
        let f: ScalarExpr = ScalarExpr::one() + (2..5).map(|i| ScalarExpr::var(i).powi(2).unwrap()).sum::<ScalarExpr>();
        assert_eq!(first_jet(&f, &fc3).unwrap(), ScalarExpr::one());
    }

    #[test]
    fn exponential_line_first_approximation() {
        let z = ScalarExpr::var(0);
        let fa = first_approximation(&line_spec(ScalarExpr::exp(&z)), &zt()).unwrap();
        // leaf forms e^{-z} omega linearize to (1 - z) omega
        let expected = (ScalarExpr::one() - ScalarExpr::var(2)).recip().unwrap();
        assert_eq!(fa.structure.bivector().components(), vec![(vec![0, 1], expected)]);
        let closed = (ScalarExpr::one() + ScalarExpr::var(2)).recip().unwrap();
        assert_eq!(fa.closed_form.components(), vec![(vec![0, 1], closed)]);
        assert!(!fa.agreement.holds);
        assert_eq!(fa.agreement.regime, Regime::Exact);
    }

    #[test]
    fn quadratic_line_first_approximation() {
        let z = ScalarExpr::var(0);
        let fa = first_approximation(&line_spec(ScalarExpr::one() + z.powi(2).unwrap()), &zt()).unwrap();
        assert_eq!(fa.structure.bivector().components(), vec![(vec![0, 1], ScalarExpr::one())]);
    }

    #[test]
    fn sphere_product_first_approximation_is_direct() {
        let c = ChartSpec::new(&["x", "y", "z"]).unwrap();
        let so3 = lie_poisson(&LieAlgebraSpec::so3(), &c).unwrap();
        let f = ScalarExpr::one() + (0..3).map(|i| ScalarExpr::var(i).powi(2).unwrap()).sum::<ScalarExpr>();
        let spec = WeightedProductSpec::new(
            PoissonFactor {
                structure: torus(),
                casimir: ScalarExpr::one(),
            },
            PoissonFactor {
                structure: so3,
                casimir: f,
            },
            &zt(),
        )
        .unwrap();
        let fa = first_approximation(&spec, &zt()).unwrap();
        assert!(fa.agreement.holds);
        assert!(fa.data.connection().is_structurally_flat());
        assert_eq!(fa.structure.bivector().component(&[0, 1]), ScalarExpr::one());
        assert_eq!(fa.structure.bivector().component(&[3, 4]), ScalarExpr::var(2));
    }

    #[test]
    fn casimir_must_be_normalized() {
        let z = ScalarExpr::var(0);
        let r = first_approximation(&line_spec(ScalarExpr::int(2) + z), &zt());
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn exponential_line_curvature_table() {
        let spec = line_spec(ScalarExpr::exp(&ScalarExpr::var(0)));
        let lambda = jacobi_check(&spec.bivector().unwrap(), &zt()).unwrap();
        let fc = FiberedChart::new(spec.chart(), 2).unwrap();
        let omega = leaf_form(&lambda, &fc, &zt()).unwrap();
        assert_eq!(omega.component(&[1, 0]), ScalarExpr::one());
        let pc = pullback_connection(&lambda, &fc, &omega, &zt()).unwrap();
        assert!(pc.is_flat());
        assert_eq!(pc.ell_curvature(0, 1), &ScalarExpr::var(2));
        let data = pc.geometric_data(&zt()).unwrap();
        assert_eq!(data.phi().component(&[1, 0]), ScalarExpr::one() - ScalarExpr::var(2));
        assert!(pc.splitting_check(&zt()).unwrap().holds);
    }

    #[test]
    fn identity_map_fails_on_quadratic_line() {
        let z = ScalarExpr::var(0);
        let spec = line_spec(ScalarExpr::one() + z.powi(2).unwrap());
        let src = weighted_product_of(&spec);
        let fa = first_approximation(&spec, &zt()).unwrap();
        let fc = FiberedChart::new(spec.chart(), 2).unwrap();
        let id = ChartMap::identity(spec.chart());
        let v = verify_linearizing_map(&id, &fc, &src, &fa.structure, &zt()).unwrap();
        assert!(v.fixes_leaf.holds);
        assert!(!v.pushforward.holds);
        assert_eq!(v.pushforward.witnesses[0].value, ScalarExpr::var(2).powi(2).unwrap());
    }

    fn weighted_product_of(spec: &WeightedProductSpec) -> PoissonStructure {
        crate::poisson::weighted_product(spec, &zt()).unwrap()
    }

    #[test]
    fn product_volumes() {
        let one = ScalarExpr::one();
        assert_eq!(product_leaf_volume(&one, 1, &one, 1, &one, &one).unwrap(), one);
        let (a, b) = sphere_family_profiles(&zt()).unwrap();
        let r = ScalarExpr::var(0);
        let expected = sphere_volume(&r).checked_div(&(ScalarExpr::one() + r.powi(2).unwrap())).unwrap();
        assert_eq!(a.volume(), &expected);
        assert_eq!(b.volume(), &sphere_volume(&r));
    }

    #[test]
    fn volume_certificates() {
        let c = ChartSpec::new(&["z"]).unwrap();
        let z = ScalarExpr::var(0);
        let a = LeafVolumeProfile::new(&c, ScalarExpr::one() + z.powi(2).unwrap(), 2, ParameterDomain::Real, &zt()).unwrap();
        let b = LeafVolumeProfile::new(&c, ScalarExpr::one(), 2, ParameterDomain::Real, &zt()).unwrap();
        match volume_obstruction(&a, &b, &zt()).unwrap() {
            VolumeCertificate::NonConstancy { derivatives, .. } => {
                assert_eq!(derivatives, vec![ScalarExpr::int(2) * z.clone()])
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(volume_obstruction(&a, &a, &zt()).unwrap(), VolumeCertificate::Identical);
        let (p, q) = sphere_family_profiles(&zt()).unwrap();
        match volume_obstruction(&p, &q, &zt()).unwrap() {
            VolumeCertificate::Matching { solution, parameter } => {
                assert_eq!(parameter, "r2");
                let r = ScalarExpr::var(0);
                assert_eq!(solution, r.checked_div(&(ScalarExpr::one() + r.powi(2).unwrap())).unwrap());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sphere_class_mismatch() {
        let grid: Vec<Rational> = [(1, 10), (1, 2), (1, 1), (2, 1)]
            .iter()
            .map(|&(n, d)| Rational::new(n.into(), d.into()))
            .collect();
        let cert = sphere_class_certificate(&grid, &zt()).unwrap();
        assert!(cert.holds());
        assert_eq!(cert.samples[2].volume_match, Rational::new(1.into(), 2.into()));
        let r = ScalarExpr::var(0);
        let expected = r.powi(3).unwrap().checked_div(&(ScalarExpr::one() + r.powi(2).unwrap())).unwrap();
        assert_eq!(cert.difference, expected);
        assert!(sphere_class_certificate(&[Rational::zero()], &zt()).is_err());
    }
}
