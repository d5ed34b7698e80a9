//! Coupling data on a fibered chart.
//!
//! A fibered chart has base coordinates `q_1..q_d` followed by fiber
//! coordinates `y_1..y_k`; the zero section is `y = 0`. Geometric data
//! `(Gamma, nu, phi)` consist of an Ehresmann connection with horizontal lifts
//! `X_i = d_{q_i} + sum_a Gamma[a][i] d_{y_a}`, a vertical bivector `nu`, and a
//! base-indexed 2-form `phi` with coefficients on the total chart.
//!
//! The coupling form annihilates vertical vectors, so on the total chart it
//! is `sum_{i<j} phi_ij dq_i ^ dq_j` itself (the `dq_i` are the horizontal
//! coframe). The horizontal coupling bivector is `mu = sum_{i<j} M_ij X_i ^ X_j`
//! with `M` the inverse of the matrix `phi(d_i, d_j)`; this gives
//! `omega(mu a, mu b) = -mu(a, b)` for horizontal 1-forms.
//!
//! The conditions are checked on coordinate base fields only. Each defect is
//! function-linear in its base arguments, since coordinate fields commute and
//! `nu` annihilates horizontal 1-forms, so vanishing on a frame is enough.

use num_traits::Zero;

use crate::chart::ChartSpec;
use crate::check::Check;
use crate::error::{Error, Result};
use crate::expr::{Rational, ScalarExpr, ZeroTest};
use crate::linalg::ExprMatrix;
use crate::multivec::{blade_indices, d, schouten, DifferentialForm, MultivectorField};
use crate::poisson::{jacobi_check, PoissonStructure};

/// A chart split into base and fiber coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberedChart {
    chart: ChartSpec,
    base: usize,
}

impl FiberedChart {
    pub fn new(chart: &ChartSpec, base_dim: usize) -> Result<Self> {
        if base_dim == 0 || base_dim > chart.dim() {
            return Err(Error::InvalidChart(format!(
                "base dimension {base_dim} does not fit {chart}"
            )));
        }
        Ok(FiberedChart {
            chart: chart.clone(),
            base: base_dim,
        })
    }

    pub fn from_names<S: AsRef<str>>(base: &[S], fiber: &[S]) -> Result<Self> {
        let names: Vec<&str> = base.iter().chain(fiber).map(|s| s.as_ref()).collect();
        Self::new(&ChartSpec::new(&names)?, base.len())
    }

    pub fn chart(&self) -> &ChartSpec {
        &self.chart
    }

    pub fn base_dim(&self) -> usize {
        self.base
    }

    pub fn fiber_dim(&self) -> usize {
        self.chart.dim() - self.base
    }

    /// Total-chart index of fiber coordinate `a`.
    pub fn fiber(&self, a: usize) -> usize {
        self.base + a
    }

    pub fn is_base(&self, i: usize) -> bool {
        i < self.base
    }

    pub fn fiber_vars(&self) -> Vec<usize> {
        (self.base..self.chart.dim()).collect()
    }

    pub fn zero_section_values(&self) -> Vec<(usize, Rational)> {
        self.fiber_vars().into_iter().map(|i| (i, Rational::zero())).collect()
    }

    /// Restriction of a function to `y = 0`.
    pub fn at_zero_section(&self, e: &ScalarExpr) -> Result<ScalarExpr> {
        e.subst_values(&self.zero_section_values())
    }

    pub fn dq(&self, i: usize) -> DifferentialForm {
        DifferentialForm::basis(&self.chart, &[i]).expect("base index in range")
    }

    pub fn dy(&self, a: usize) -> DifferentialForm {
        DifferentialForm::basis(&self.chart, &[self.fiber(a)]).expect("fiber index in range")
    }

    pub fn name(&self, i: usize) -> &str {
        &self.chart.names()[i]
    }
}

/// Connection coefficients `Gamma[a][i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct EhresmannConnection {
    fc: FiberedChart,
    gamma: Vec<Vec<ScalarExpr>>,
}

impl EhresmannConnection {
    pub fn new(fc: &FiberedChart, gamma: Vec<Vec<ScalarExpr>>) -> Result<Self> {
        if gamma.len() != fc.fiber_dim() || gamma.iter().any(|row| row.len() != fc.base_dim()) {
            return Err(Error::Degree(format!(
                "connection coefficients must be {}x{}",
                fc.fiber_dim(),
                fc.base_dim()
            )));
        }
        for e in gamma.iter().flatten() {
            fc.chart().check_expr(e)?;
        }
        Ok(EhresmannConnection {
            fc: fc.clone(),
            gamma,
        })
    }

    pub fn flat(fc: &FiberedChart) -> Self {
        EhresmannConnection {
            fc: fc.clone(),
            gamma: vec![vec![ScalarExpr::zero(); fc.base_dim()]; fc.fiber_dim()],
        }
    }

    pub fn fibered_chart(&self) -> &FiberedChart {
        &self.fc
    }

    pub fn coefficient(&self, a: usize, i: usize) -> &ScalarExpr {
        &self.gamma[a][i]
    }

    pub fn coefficients(&self) -> &[Vec<ScalarExpr>] {
        &self.gamma
    }

    pub fn is_structurally_flat(&self) -> bool {
        self.gamma.iter().flatten().all(ScalarExpr::is_structural_zero)
    }

    /// Horizontal lift of the coordinate field `d_{q_i}`.
    pub fn lift(&self, i: usize) -> MultivectorField {
        let mut comps = vec![ScalarExpr::zero(); self.fc.chart().dim()];
        comps[i] = ScalarExpr::one();
        for a in 0..self.fc.fiber_dim() {
            comps[self.fc.fiber(a)] = self.gamma[a][i].clone();
        }
        MultivectorField::vector(self.fc.chart(), &comps).expect("lift stays on the chart")
    }

    /// Vertical coframe element `theta_a = dy_a - sum_i Gamma[a][i] dq_i`.
    pub fn theta(&self, a: usize) -> DifferentialForm {
        let mut comps = vec![ScalarExpr::zero(); self.fc.chart().dim()];
        comps[self.fc.fiber(a)] = ScalarExpr::one();
        for (i, c) in comps.iter_mut().take(self.fc.base_dim()).enumerate() {
            *c = -&self.gamma[a][i];
        }
        DifferentialForm::covector(self.fc.chart(), &comps).expect("coframe stays on the chart")
    }
}

/// Base indices `(i, j, k)`.
pub type Triple = (usize, usize, usize);
/// A base index `i` and a fiber pair `(a, b)`.
pub type MixedIndex = (usize, (usize, usize));

/// Lift of a base vector field; fails if it has fiber components.
pub fn horizontal_lift(x: &MultivectorField, conn: &EhresmannConnection) -> Result<MultivectorField> {
    let fc = conn.fibered_chart();
    x.chart().ensure_same(fc.chart())?;
    if x.degree() != 1 {
        return Err(Error::Degree("only vector fields can be lifted".into()));
    }
    let mut out = MultivectorField::zero(fc.chart(), 1);
    for (idx, c) in x.components() {
        let i = idx[0];
        if !fc.is_base(i) {
            return Err(Error::Precondition(format!(
                "vector field has a component along the fiber coordinate `{}`",
                fc.name(i)
            )));
        }
        out = out.add(&conn.lift(i).scale(&c))?;
    }
    Ok(out)
}

/// `Curv(d_i, d_j) = [X_i, X_j]` for coordinate fields.
pub fn curvature(conn: &EhresmannConnection, i: usize, j: usize) -> Result<MultivectorField> {
    let d = conn.fibered_chart().base_dim();
    if i >= d || j >= d {
        return Err(Error::IndexOutOfRange {
            index: i.max(j),
            dim: d,
        });
    }
    schouten(&conn.lift(i), &conn.lift(j))
}

/// The triple `(Gamma, nu, phi)`.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometricData {
    connection: EhresmannConnection,
    nu: MultivectorField,
    phi: DifferentialForm,
}

impl GeometricData {
    /// Validates the shape of `nu` and `phi` and that `phi` restricts to a
    /// closed nondegenerate form on the zero section.
    pub fn new(
        connection: EhresmannConnection,
        nu: MultivectorField,
        phi: DifferentialForm,
        zt: &ZeroTest,
    ) -> Result<Self> {
        let fc = connection.fibered_chart().clone();
        nu.chart().ensure_same(fc.chart())?;
        phi.chart().ensure_same(fc.chart())?;
        if nu.degree() != 2 || phi.degree() != 2 {
            return Err(Error::Degree("nu and phi must have degree 2".into()));
        }
        if let Some((idx, _)) = nu.components().into_iter().find(|(idx, _)| idx.iter().any(|&i| fc.is_base(i))) {
            return Err(Error::Precondition(format!(
                "nu has a component touching the base coordinate `{}`",
                fc.name(idx[0])
            )));
        }
        if let Some((idx, _)) = phi.components().into_iter().find(|(idx, _)| idx.iter().any(|&i| !fc.is_base(i))) {
            return Err(Error::Precondition(format!(
                "phi has a component touching the fiber coordinate `{}`",
                fc.name(*idx.iter().find(|&&i| !fc.is_base(i)).unwrap())
            )));
        }
        let data = GeometricData {
            connection,
            nu,
            phi,
        };
        let omega = data.omega()?;
        let closed = d(&omega)?.check_zero(zt)?;
        if !closed.holds {
            return Err(Error::Precondition("phi restricted to the zero section is not closed".into()));
        }
        let det = data.phi_matrix().det()?;
        let det0 = fc.at_zero_section(&det)?;
        if det0.is_zero(zt)?.is_zero() {
            return Err(Error::Precondition("phi is degenerate on the zero section".into()));
        }
        Ok(data)
    }

    pub fn fibered_chart(&self) -> &FiberedChart {
        self.connection.fibered_chart()
    }

    pub fn connection(&self) -> &EhresmannConnection {
        &self.connection
    }

    pub fn nu(&self) -> &MultivectorField {
        &self.nu
    }

    pub fn phi(&self) -> &DifferentialForm {
        &self.phi
    }

    /// The leaf form: `phi` on the zero section.
    pub fn omega(&self) -> Result<DifferentialForm> {
        self.phi.subst_values(&self.fibered_chart().zero_section_values())
    }

    /// `R = phi - omega`, vanishing on the zero section.
    pub fn r_part(&self) -> Result<DifferentialForm> {
        self.phi.sub(&self.omega()?)
    }

    /// `Phi[i][j] = phi(d_i, d_j)` over base indices.
    pub fn phi_matrix(&self) -> ExprMatrix {
        let d = self.fibered_chart().base_dim();
        ExprMatrix::from_fn(d, d, |i, j| self.phi.component(&[i, j]))
    }
}

/// The coupling form: vertical-annihilating extension of `phi`.
pub fn coupling_form(data: &GeometricData) -> DifferentialForm {
    data.phi.clone()
}

/// `mu = sum_{i<j} M_ij X_i ^ X_j` with `M` the inverse of `phi`'s matrix.
pub fn horizontal_coupling_bivector(data: &GeometricData, zt: &ZeroTest) -> Result<MultivectorField> {
    let fc = data.fibered_chart();
    let m = data.phi_matrix().inverse(zt).map_err(|e| match e {
        Error::Singular => Error::Precondition("phi is degenerate".into()),
        other => other,
    })?;
    let d = fc.base_dim();
    let lifts: Vec<MultivectorField> = (0..d).map(|i| data.connection.lift(i)).collect();
    let mut mu = MultivectorField::zero(fc.chart(), 2);
    for i in 0..d {
        for j in i + 1..d {
            let c = m.get(i, j);
            if c.is_structural_zero() {
                continue;
            }
            fc.at_zero_section(c).map_err(|_| {
                Error::Precondition("the inverse of phi has a pole on the zero section".into())
            })?;
            mu = mu.add(&lifts[i].wedge(&lifts[j])?.scale(c))?;
        }
    }
    Ok(mu)
}

/// `mu + nu` without checking integrability.
pub fn coupling_bivector(data: &GeometricData, zt: &ZeroTest) -> Result<MultivectorField> {
    horizontal_coupling_bivector(data, zt)?.add(&data.nu)
}

/// `(d_Gamma F)(X_0..X_k) = sum_m (-1)^m X_m(F(.. no X_m ..))` on coordinate
/// base fields; `F` is a base-indexed form.
pub fn partial_gamma(f: &DifferentialForm, conn: &EhresmannConnection) -> Result<DifferentialForm> {
    let fc = conn.fibered_chart();
    f.chart().ensure_same(fc.chart())?;
    if f.components().iter().any(|(idx, _)| idx.iter().any(|&i| !fc.is_base(i))) {
        return Err(Error::Precondition("the argument of d_Gamma must be base-indexed".into()));
    }
    let k = f.degree();
    let lifts: Vec<MultivectorField> = (0..fc.base_dim()).map(|i| conn.lift(i)).collect();
    let mut out = DifferentialForm::zero(fc.chart(), k + 1);
    for set in crate::multivec::subsets(fc.base_dim(), k + 1) {
        let mut acc = ScalarExpr::zero();
        for (m, &j) in set.iter().enumerate() {
            let rest: Vec<usize> = set.iter().copied().filter(|&x| x != j).collect();
            let v = lifts[j].apply(&f.component(&rest))?;
            acc = if m % 2 == 0 { &acc + &v } else { &acc - &v };
        }
        out.add_component(&set, acc)?;
    }
    Ok(out)
}

fn minus_half() -> Rational {
    Rational::new((-1).into(), 2.into())
}

/// `-1/2 [mu,mu](dq_i,dq_j,dq_k) - dw(mu dq_i, mu dq_j, mu dq_k)` for every
/// `i < j < k`, where `mu` is the horizontal coupling bivector of `data`.
pub fn horizontal_identity_defects(
    data: &GeometricData,
    mu: &MultivectorField,
) -> Result<Vec<(Triple, ScalarExpr)>> {
    let fc = data.fibered_chart();
    let bracket = schouten(mu, mu)?;
    let dw = d(&coupling_form(data))?;
    let sharp: Vec<MultivectorField> = (0..fc.base_dim()).map(|i| mu.contract(&fc.dq(i))).collect::<Result<_>>()?;
    let mut out = Vec::new();
    for set in crate::multivec::subsets(fc.base_dim(), 3) {
        let (i, j, k) = (set[0], set[1], set[2]);
        let lhs = bracket.eval(&[&fc.dq(i), &fc.dq(j), &fc.dq(k)])?.scale(&minus_half());
        let rhs = dw.eval(&[&sharp[i], &sharp[j], &sharp[k]])?;
        out.push(((i, j, k), lhs - rhs));
    }
    Ok(out)
}

/// `-1/2 [pi,pi](dq_i, theta_a, theta_b) - [mu dq_i, nu](theta_a, theta_b)`
/// for `pi = mu + nu`, every base index `i` and fiber pair `a < b`.
pub fn mixed_identity_defects(
    data: &GeometricData,
    mu: &MultivectorField,
) -> Result<Vec<(MixedIndex, ScalarExpr)>> {
    let fc = data.fibered_chart();
    let conn = data.connection();
    let pi = mu.add(data.nu())?;
    let bracket = schouten(&pi, &pi)?;
    let thetas: Vec<DifferentialForm> = (0..fc.fiber_dim()).map(|a| conn.theta(a)).collect();
    let mut out = Vec::new();
    for i in 0..fc.base_dim() {
        let alpha = fc.dq(i);
        let x = schouten(&mu.contract(&alpha)?, data.nu())?;
        for a in 0..fc.fiber_dim() {
            for b in a + 1..fc.fiber_dim() {
                let lhs = bracket.eval(&[&alpha, &thetas[a], &thetas[b]])?.scale(&minus_half());
                let rhs = x.eval(&[&thetas[a], &thetas[b]])?;
                out.push(((i, (a, b)), lhs - rhs));
            }
        }
    }
    Ok(out)
}

/// Verdicts for the four integrability conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegrabilityReport {
    /// Conditions 1 to 4 in order.
    pub conditions: [Check; 4],
    /// Condition 4 evaluated as `d_Gamma phi = 0`.
    pub condition4_partial_gamma: Check,
    /// Whether the two evaluations of condition 4 agree componentwise.
    pub condition4_paths_agree: bool,
}

impl IntegrabilityReport {
    pub fn holds(&self) -> bool {
        self.conditions.iter().all(|c| c.holds)
    }

    /// Numbers (1-based) of the failing conditions.
    pub fn failing(&self) -> Vec<usize> {
        (0..4).filter(|&k| !self.conditions[k].holds).map(|k| k + 1).collect()
    }
}

fn labelled(prefix: &str, c: Check) -> Check {
    Check {
        witnesses: c
            .witnesses
            .into_iter()
            .map(|mut w| {
                w.label = format!("{prefix} {}", w.label);
                w
            })
            .collect(),
        ..c
    }
}

pub fn integrability_check(data: &GeometricData, zt: &ZeroTest) -> Result<IntegrabilityReport> {
    let fc = data.fibered_chart();
    let conn = &data.connection;
    let nd = fc.base_dim();
    let lifts: Vec<MultivectorField> = (0..nd).map(|i| conn.lift(i)).collect();
    let name = |i: usize| fc.name(i).to_string();

    let c1 = labelled("[nu,nu]", schouten(&data.nu, &data.nu)?.check_zero(zt)?);

    let mut c2 = Check::pass();
    for (i, x) in lifts.iter().enumerate() {
        let prefix = format!("[X_{},nu]", name(i));
        c2 = c2.and(labelled(&prefix, schouten(x, &data.nu)?.check_zero(zt)?));
    }

    let domega = d(&coupling_form(data))?;
    let mut c3 = Check::pass();
    for i in 0..nd {
        for j in i + 1..nd {
            let lhs = curvature(conn, i, j)?;
            let form = domega.contract(&lifts[i])?.contract(&lifts[j])?;
            let rhs = data.nu.contract(&form)?;
            let prefix = format!("Curv(d_{},d_{}) - nu(dw(X,Y))", name(i), name(j));
            c3 = c3.and(labelled(&prefix, lhs.sub(&rhs)?.check_zero(zt)?));
        }
    }

    let pg = partial_gamma(data.phi(), conn)?;
    let mut c4_items = Vec::new();
    let mut diff_items = Vec::new();
    for set in crate::multivec::subsets(nd, 3) {
        let v = domega.eval(&[&lifts[set[0]], &lifts[set[1]], &lifts[set[2]]])?;
        let label = format!(
            "dw(X_{},X_{},X_{})",
            name(set[0]),
            name(set[1]),
            name(set[2])
        );
        diff_items.push((label.clone(), &v - &pg.component(&set)));
        c4_items.push((label, v));
    }
    let c4 = Check::all_zero(c4_items, zt)?;
    let pg_check = pg.check_zero(zt)?;
    let agree = Check::all_zero(diff_items, zt)?.holds;

    Ok(IntegrabilityReport {
        conditions: [c1, c2, c3, c4],
        condition4_partial_gamma: pg_check,
        condition4_paths_agree: agree,
    })
}

/// `pi = mu + nu`, rejected unless all four conditions hold.
pub fn compose(data: &GeometricData, zt: &ZeroTest) -> Result<PoissonStructure> {
    let report = integrability_check(data, zt)?;
    if !report.holds() {
        return Err(Error::Precondition(format!(
            "integrability conditions {:?} fail",
            report.failing()
        )));
    }
    jacobi_check(&coupling_bivector(data, zt)?, zt)
}

/// Splits a horizontally nondegenerate bivector into geometric data.
pub fn decompose(pi: &PoissonStructure, fc: &FiberedChart, zt: &ZeroTest) -> Result<GeometricData> {
    pi.chart().ensure_same(fc.chart())?;
    let nd = fc.base_dim();
    let nf = fc.fiber_dim();
    let p = pi.bivector();
    let pbb = ExprMatrix::from_fn(nd, nd, |i, j| p.component(&[i, j]));
    let det0 = fc.at_zero_section(&pbb.det()?)?;
    if det0.is_zero(zt)?.is_zero() {
        return Err(Error::Precondition(
            "the bivector is horizontally degenerate on the zero section".into(),
        ));
    }
    for (idx, c) in p.components() {
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
    let pinv = pbb.inverse(zt)?;
    // Gamma[a][j] = sum_i (P_bb^-1)[j][i] P(dq_i, dy_a)
    let gamma: Vec<Vec<ScalarExpr>> = (0..nf)
        .map(|a| {
            (0..nd)
                .map(|j| {
                    (0..nd)
                        .map(|i| pinv.get(j, i) * &p.component(&[i, fc.fiber(a)]))
                        .sum()
                })
                .collect()
        })
        .collect();
    let conn = EhresmannConnection::new(fc, gamma)?;
    let mut phi = DifferentialForm::zero(fc.chart(), 2);
    for i in 0..nd {
        for j in i + 1..nd {
            phi.add_component(&[i, j], pinv.get(i, j).clone())?;
        }
    }
    let lifts: Vec<MultivectorField> = (0..nd).map(|i| conn.lift(i)).collect();
    let mut mu = MultivectorField::zero(fc.chart(), 2);
    for i in 0..nd {
        for j in i + 1..nd {
            let c = pbb.get(i, j);
            if !c.is_structural_zero() {
                mu = mu.add(&lifts[i].wedge(&lifts[j])?.scale(c))?;
            }
        }
    }
    let rest = p.sub(&mu)?;
    let mut nu = MultivectorField::zero(fc.chart(), 2);
    let mut leftovers = Vec::new();
    for (idx, c) in rest.components() {
        if idx.iter().all(|&i| !fc.is_base(i)) {
            nu.add_component(&idx, c)?;
        } else {
            leftovers.push((format!("{idx:?}"), c));
        }
    }
    if !Check::all_zero(leftovers, zt)?.holds {
        return Err(Error::Precondition(
            "pi - mu has components off the vertical bundle".into(),
        ));
    }
    GeometricData::new(conn, nu, phi, zt)
}

/// Components of a trivector by the number of `dq` arguments.
///
/// Entry `n` evaluates `T` on `n` horizontal coframe elements `dq_i` and
/// `3 - n` vertical ones `theta_a`; integrability condition `n + 1` governs
/// that block of `[pi, pi]`.
pub fn degree_blocks(t: &MultivectorField, conn: &EhresmannConnection, zt: &ZeroTest) -> Result<[Check; 4]> {
    if t.degree() != 3 {
        return Err(Error::Degree("degree blocks are defined for trivectors".into()));
    }
    let fc = conn.fibered_chart();
    let dq: Vec<DifferentialForm> = (0..fc.base_dim()).map(|i| fc.dq(i)).collect();
    let th: Vec<DifferentialForm> = (0..fc.fiber_dim()).map(|a| conn.theta(a)).collect();
    let mut out: Vec<Check> = Vec::with_capacity(4);
    for n in 0..4 {
        let mut items = Vec::new();
        for hs in crate::multivec::subsets(fc.base_dim(), n) {
            for vs in crate::multivec::subsets(fc.fiber_dim(), 3 - n) {
                let args: Vec<&DifferentialForm> =
                    hs.iter().map(|&i| &dq[i]).chain(vs.iter().map(|&a| &th[a])).collect();
                let label = hs
                    .iter()
                    .map(|&i| format!("dq_{}", fc.name(i)))
                    .chain(vs.iter().map(|&a| format!("theta_{}", fc.name(fc.fiber(a)))))
                    .collect::<Vec<_>>()
                    .join(",");
                items.push((format!("({label})"), t.eval(&args)?));
            }
        }
        out.push(Check::all_zero(items, zt)?);
    }
    Ok(out.try_into().expect("four blocks"))
}

/// Convenience: total-chart 2-form `sum c dq_i ^ dq_j` from base pairs.
pub fn base_two_form(fc: &FiberedChart, entries: &[((usize, usize), ScalarExpr)]) -> Result<DifferentialForm> {
    DifferentialForm::from_components(
        fc.chart(),
        2,
        entries.iter().map(|((i, j), c)| (vec![*i, *j], c.clone())),
    )
}

/// Indices of a blade rendered with the chart's names.
pub fn index_label(fc: &FiberedChart, b: u32) -> String {
    blade_indices(b).iter().map(|&i| fc.name(i)).collect::<Vec<_>>().join(",")
}
