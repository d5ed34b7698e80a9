//! Commands: each maps onto core operations and fills a report.

use std::time::Instant;

use poisson_core::coupling::{base_two_form, compose, decompose, integrability_check, EhresmannConnection, FiberedChart, GeometricData, IntegrabilityReport};
use poisson_core::multivec::ChartMap;
use poisson_core::oracles::{bivector_identity_suite, horizontal_identity_suite, mixed_identity_suite, pullback_identity_suite, SuiteResult};
use poisson_core::poisson::{casimir_check, jacobi_check, JacobiStatus, PoissonFactor, PoissonStructure, WeightedProductSpec};
use poisson_core::vorobjev::{
    first_approximation, sphere_class_certificate, sphere_family_profiles, verify_linearizing_map,
    volume_obstruction, LeafVolumeProfile, ParameterDomain, VolumeCertificate,
};
use poisson_core::{ChartSpec, Check, MultivectorField, Rational, Regime, ScalarExpr, ZeroTest};

use crate::error::{CliError, Context, Result};
use crate::library::Workspace;
use crate::report::{Entry, Report, Settings, Verdict};
use crate::resolve::{Definitions, Item};

pub const DEFAULT_SEED: u64 = 0x5eed_1e55;

/// Sampling configuration shared by all commands.
#[derive(Clone, Debug, PartialEq)]
pub struct Options {
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub parallel: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            seed: DEFAULT_SEED,
            samples: 64,
            epsilon: 1e-9,
            parallel: true,
        }
    }
}

impl Options {
    pub fn zero_test(&self) -> ZeroTest {
        ZeroTest {
            samples: self.samples,
            epsilon: self.epsilon,
            seed: self.seed,
            parallel: self.parallel,
        }
    }

    fn settings(&self) -> Settings {
        Settings {
            seed: self.seed,
            samples: self.samples,
            epsilon: self.epsilon,
            parallel: self.parallel,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Command {
    CheckJacobi { name: String },
    CheckCasimir { casimir: String, structure: String },
    WeightedProduct { name: String },
    FirstApprox { name: String },
    CheckIntegrability { data: String },
    Decompose { structure: String, chart: String },
    VerifyMap { map: String, source: String, target: String },
    VolumeObstruction { first: String, second: String },
    Example3Certificate { grid: Option<Vec<Rational>> },
    Identities { instances: usize, sections: usize },
}

impl Command {
    pub fn describe(&self) -> String {
        match self {
            Command::CheckJacobi { name } => format!("check-jacobi {name}"),
            Command::CheckCasimir { casimir, structure } => format!("check-casimir {casimir} on {structure}"),
            Command::WeightedProduct { name } => format!("weighted-product {name}"),
            Command::FirstApprox { name } => format!("first-approx {name}"),
            Command::CheckIntegrability { data } => format!("check-integrability {data}"),
            Command::Decompose { structure, chart } => format!("decompose {structure} on {chart}"),
            Command::VerifyMap { map, source, target } => format!("verify-map {map} from {source} to {target}"),
            Command::VolumeObstruction { first, second } => format!("volume-obstruction {first} {second}"),
            Command::Example3Certificate { grid } => match grid {
                Some(g) => format!(
                    "example3-certificate --grid {}",
                    g.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(",")
                ),
                None => "example3-certificate".into(),
            },
            Command::Identities { instances, sections } => format!("identities --instances {instances} --sections {sections}"),
        }
    }
}

pub fn default_grid() -> Vec<Rational> {
    [(1, 10), (1, 2), (1, 1), (2, 1)]
        .iter()
        .map(|&(n, d)| Rational::new(n.into(), d.into()))
        .collect()
}

pub fn run(cmd: &Command, opts: &Options, ws: &Workspace) -> Result<Report> {
    let zt = opts.zero_test();
    let mut report = Report::new(cmd.describe(), opts.settings());
    match cmd {
        Command::CheckJacobi { name } => check_jacobi(ws.file_for(&[name])?, name, &zt, &mut report)?,
        Command::CheckCasimir { casimir, structure } => {
            check_casimir(ws.file_for(&[casimir, structure])?, casimir, structure, &zt, &mut report)?
        }
        Command::WeightedProduct { name } => weighted(ws.file_for(&[name])?, name, &zt, &mut report)?,
        Command::FirstApprox { name } => first_approx(ws.file_for(&[name])?, name, &zt, &mut report)?,
        Command::CheckIntegrability { data } => {
            let t = Instant::now();
            let defs = ws.file_for(&[data])?;
            let gd = geometric_data(defs, data, &zt)?;
            let r = integrability_check(&gd, &zt).context(format!("integrability of `{data}`"))?;
            push_integrability(&mut report, data, &r, gd.fibered_chart().chart(), t);
        }
        Command::Decompose { structure, chart } => decompose_cmd(ws.file_for(&[structure, chart])?, structure, chart, &zt, &mut report)?,
        Command::VerifyMap { map, source, target } => {
            verify_map(ws.file_for(&[map, source, target])?, map, source, target, &zt, &mut report)?
        }
        Command::VolumeObstruction { first, second } => {
            volume_cmd(ws.file_for(&[first, second])?, first, second, &zt, &mut report)?
        }
        Command::Example3Certificate { grid } => {
            example3(grid.clone().unwrap_or_else(default_grid), &zt, &mut report)?
        }
        Command::Identities { instances, sections } => identities(opts.seed, *instances, *sections, &zt, &mut report)?,
    }
    Ok(report)
}

fn usage<T>(msg: String) -> Result<T> {
    Err(CliError::Usage(msg))
}

/// A named Poisson structure: a plain bivector or a weighted product.
enum Structure {
    Plain(MultivectorField),
    Product(Box<WeightedProductSpec>),
}

impl Structure {
    fn bivector(&self) -> Result<MultivectorField> {
        match self {
            Structure::Plain(f) => Ok(f.clone()),
            Structure::Product(s) => s.bivector().context("weighted product"),
        }
    }

    fn chart(&self) -> ChartSpec {
        match self {
            Structure::Plain(f) => f.chart().clone(),
            Structure::Product(s) => s.chart().clone(),
        }
    }
}

fn structure(defs: &Definitions, name: &str, zt: &ZeroTest) -> Result<Structure> {
    match defs.get(name) {
        Some(Item::Bivector(b)) => Ok(Structure::Plain(b.field.clone())),
        Some(Item::Product(_)) => Ok(Structure::Product(Box::new(product_spec(defs, name, zt)?))),
        Some(other) => usage(format!("`{name}` is a {}, expected a bivector or product", other.kind())),
        None => usage(format!("unknown name `{name}`")),
    }
}

fn factor(defs: &Definitions, (s, c): &(String, String), zt: &ZeroTest) -> Result<PoissonFactor> {
    let (Some(Item::Bivector(b)), Some(Item::Casimir(f))) = (defs.get(s), defs.get(c)) else {
        unreachable!("products are resolved against bivectors and Casimirs")
    };
    Ok(PoissonFactor {
        structure: jacobi_check(&b.field, zt).context(format!("Jacobi check of `{s}`"))?,
        casimir: f.value.clone(),
    })
}

fn product_spec(defs: &Definitions, name: &str, zt: &ZeroTest) -> Result<WeightedProductSpec> {
    let Some(Item::Product(p)) = defs.get(name) else {
        return usage(format!("`{name}` is not a product"));
    };
    let f1 = factor(defs, &p.first, zt)?;
    let f2 = factor(defs, &p.second, zt)?;
    WeightedProductSpec::new(f1, f2, zt).context(format!("product `{name}`"))
}

fn jacobi_entry(label: String, anchor: &str, pi: &PoissonStructure) -> Entry {
    let chart = pi.chart();
    let mut e = match pi.status() {
        JacobiStatus::Verified(r) => Entry::new(label, anchor, Verdict::Pass, *r),
        JacobiStatus::Failed(ws) => {
            let mut e = Entry::new(label, anchor, Verdict::Fail, Regime::Exact);
            for w in ws {
                e.witness(&format!("[pi,pi] {}", w.label), &chart.render(&w.value));
            }
            e
        }
        JacobiStatus::Inconclusive(msg) => Entry::new(label, anchor, Verdict::Inconclusive, Regime::Numeric).detail("reason", msg.clone()),
        JacobiStatus::Unverified => Entry::new(label, anchor, Verdict::Inconclusive, Regime::Exact),
    };
    e = e.detail("pi", pi.bivector().render());
    e
}

fn check_jacobi(defs: &Definitions, name: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let s = structure(defs, name, zt)?;
    let anchor = match s {
        Structure::Plain(_) => "Jacobi identity: [pi, pi] = 0",
        Structure::Product(_) => "Jacobi identity of the Casimir-weighted product f2 pi1 + f1 pi2",
    };
    let pi = jacobi_check(&s.bivector()?, zt).context(format!("Jacobi check of `{name}`"))?;
    report.push(jacobi_entry(format!("jacobi {name}"), anchor, &pi).timed(t.elapsed()));
    Ok(())
}

fn check_casimir(defs: &Definitions, casimir: &str, name: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let Some(Item::Casimir(c)) = defs.get(casimir) else {
        return usage(format!("`{casimir}` is not a casimir"));
    };
    let cas_chart = defs.chart(&c.chart).expect("resolved").spec.clone();
    let s = structure(defs, name, zt)?;
    let chart = s.chart();
    let f = if cas_chart == chart {
        c.value.clone()
    } else {
        match &s {
            Structure::Product(p) if p.factor2().structure.chart() == &cas_chart => p.pull2(&c.value),
            Structure::Product(p) if p.factor1().structure.chart() == &cas_chart => c.value.clone(),
            _ => return usage(format!("`{casimir}` lives on {cas_chart}, `{name}` on {chart}")),
        }
    };
    let pi = PoissonStructure::unverified(s.bivector()?).context("bivector")?;
    let check = casimir_check(&f, &pi, zt).context(format!("Casimir check of `{casimir}`"))?;
    report.push(
        Entry::from_check(format!("casimir {casimir} on {name}"), "Casimir condition: pi(df, .) = 0", &check, &chart)
            .detail("f", chart.render(&f))
            .timed(t.elapsed()),
    );
    Ok(())
}

fn weighted(defs: &Definitions, name: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let Some(Item::Product(p)) = defs.get(name) else {
        return usage(format!("`{name}` is not a product"));
    };
    for (k, fac) in [&p.first, &p.second].into_iter().enumerate() {
        let t = Instant::now();
        let f = factor(defs, fac, zt)?;
        report.push(jacobi_entry(format!("factor {} `{}` is Poisson", k + 1, fac.0), "Jacobi identity of a factor", &f.structure).timed(t.elapsed()));
        let t = Instant::now();
        let c = casimir_check(&f.casimir, &f.structure, zt).context(format!("Casimir check of `{}`", fac.1))?;
        let chart = f.structure.chart().clone();
        report.push(
            Entry::from_check(format!("`{}` is a Casimir of `{}`", fac.1, fac.0), "weights must be Casimirs of their factors", &c, &chart)
                .detail("f", chart.render(&f.casimir))
                .timed(t.elapsed()),
        );
    }
    if !report.passed() {
        return Ok(());
    }
    let t = Instant::now();
    let spec = product_spec(defs, name, zt)?;
    let pi = jacobi_check(&spec.bivector().context("weighted product")?, zt).context("Jacobi check")?;
    report.push(
        jacobi_entry(format!("product {name} is Poisson"), "Casimir-weighted product f2 pi1 + f1 pi2", &pi).timed(t.elapsed()),
    );
    Ok(())
}

fn first_approx(defs: &Definitions, name: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let spec = product_spec(defs, name, zt)?;
    let fa = first_approximation(&spec, zt).context(format!("first approximation of `{name}`"))?;
    let chart = spec.chart().clone();
    report.push(
        jacobi_entry(format!("first approximation of {name}"), "linearized coupling structure at the leaf", &fa.structure)
            .detail("first jet J^1_0 f", chart.render(&fa.jet))
            .detail("closed form (1/J^1_0 f) pi_S + pi_g", fa.closed_form.render())
            .timed(t.elapsed()),
    );
    let t = Instant::now();
    let r = integrability_check(&fa.data, zt).context("integrability of the linearized data")?;
    push_integrability(report, &format!("{name} linearized data"), &r, &chart, t);
    report.push(Entry::from_check(
        format!("first approximation of {name} equals closed form"),
        "comparison with (1/J^1_0 f) pi_S + pi_g",
        &fa.agreement,
        &chart,
    ));
    Ok(())
}

const CONDITION_ANCHORS: [&str; 4] = [
    "condition 1: [nu, nu] = 0",
    "condition 2: [X, nu] = 0 for horizontal lifts X",
    "condition 3: Curv(X, Y) = nu^#(d omega(X, Y))",
    "condition 4: d omega vanishes on horizontal lifts",
];

fn push_integrability(report: &mut Report, name: &str, r: &IntegrabilityReport, chart: &ChartSpec, t: Instant) {
    for (k, c) in r.conditions.iter().enumerate() {
        let mut e = Entry::from_check(format!("{name} condition {}", k + 1), CONDITION_ANCHORS[k], c, chart);
        if k == 0 {
            e = e.timed(t.elapsed());
        }
        report.push(e);
    }
    let verdict = if r.condition4_paths_agree { Verdict::Pass } else { Verdict::Fail };
    let mut e = Entry::new(format!("{name} condition 4 two ways"), "d omega on lifts equals the covariant derivative of phi", verdict, r.condition4_partial_gamma.regime);
    if !r.condition4_paths_agree {
        e.witness("paths", "d omega(X,Y,Z) and d_Gamma phi differ");
    }
    report.push(e);
}

fn geometric_data(defs: &Definitions, name: &str, zt: &ZeroTest) -> Result<GeometricData> {
    let Some(Item::Data(d)) = defs.get(name) else {
        return usage(format!("`{name}` is not a data declaration"));
    };
    let fc = defs.chart(&d.chart).and_then(|c| c.fibered()).expect("data charts are split");
    let conn = EhresmannConnection::new(&fc, d.gamma.clone()).context(format!("connection of `{name}`"))?;
    let phi = base_two_form(&fc, &d.phi).context(format!("phi of `{name}`"))?;
    GeometricData::new(conn, d.nu.clone(), phi, zt).context(format!("data `{name}`"))
}

fn decompose_cmd(defs: &Definitions, name: &str, chart: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let Some(c) = defs.chart(chart) else {
        return usage(format!("`{chart}` is not a chart"));
    };
    let Some(fc) = c.fibered() else {
        return usage(format!("chart `{chart}` has no base | fiber split"));
    };
    let s = structure(defs, name, zt)?;
    if s.chart() != c.spec {
        return usage(format!("`{name}` lives on {}, not on `{chart}` {}", s.chart(), c.spec));
    }
    let pi = jacobi_check(&s.bivector()?, zt).context(format!("Jacobi check of `{name}`"))?;
    let data = decompose(&pi, &fc, zt).context(format!("decomposition of `{name}`"))?;
    let mut gamma = Vec::new();
    for (a, row) in data.connection().coefficients().iter().enumerate() {
        for (i, g) in row.iter().enumerate() {
            if !g.is_structural_zero() {
                gamma.push(format!("gamma({}, {}) = {}", fc.name(fc.fiber(a)), fc.name(i), c.spec.render(g)));
            }
        }
    }
    report.push(
        jacobi_entry(format!("{name} is Poisson"), "decomposition needs a Poisson bivector", &pi)
            .detail("gamma", if gamma.is_empty() { "0".into() } else { gamma.join(", ") })
            .detail("nu", data.nu().render())
            .detail("phi", data.phi().render())
            .timed(t.elapsed()),
    );
    let t = Instant::now();
    let r = integrability_check(&data, zt).context("integrability of the decomposition")?;
    push_integrability(report, &format!("{name} on {chart}"), &r, &c.spec, t);
    if r.holds() {
        let t = Instant::now();
        let back = compose(&data, zt).context("compose")?;
        let diff = back.bivector().sub(pi.bivector()).context("difference")?;
        let check = diff.check_zero(zt).context("round trip")?;
        report.push(Entry::from_check(format!("compose after decompose of {name}"), "round trip pi = mu + nu", &check, &c.spec).timed(t.elapsed()));
    }
    Ok(())
}

fn verify_map(defs: &Definitions, map: &str, source: &str, target: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let Some(Item::Map(m)) = defs.get(map) else {
        return usage(format!("`{map}` is not a map"));
    };
    let sc = defs.chart(&m.source).expect("resolved");
    let tc = defs.chart(&m.target).expect("resolved");
    let a = structure(defs, source, zt)?;
    let b = structure(defs, target, zt)?;
    let fc = match (sc.fibered(), &a) {
        (Some(fc), _) => fc,
        (None, Structure::Product(p)) => FiberedChart::new(&sc.spec, p.offset()).context("fibered chart")?,
        _ => return usage(format!("chart `{}` has no base | fiber split", m.source)),
    };
    if a.chart() != sc.spec || b.chart() != tc.spec {
        return usage(format!("`{map}` maps {} to {}, but `{source}` lives on {} and `{target}` on {}", sc.spec, tc.spec, a.chart(), b.chart()));
    }
    let psi = ChartMap::new(&sc.spec, &tc.spec, m.forward.clone(), m.inverse.clone(), zt).context(format!("map `{map}`"))?;
    let pa = jacobi_check(&a.bivector()?, zt).context(format!("Jacobi check of `{source}`"))?;
    let pb = jacobi_check(&b.bivector()?, zt).context(format!("Jacobi check of `{target}`"))?;
    let v = verify_linearizing_map(&psi, &fc, &pa, &pb, zt).context(format!("verification of `{map}`"))?;
    let elapsed = t.elapsed();
    report.push(Entry::from_check(format!("{map} fixes the leaf"), "psi restricted to the zero section is the identity", &v.fixes_leaf, &sc.spec).timed(elapsed));
    report.push(
        Entry::from_check(format!("{map} pushes {source} to {target}"), "psi_* pi_source = pi_target", &v.pushforward, &tc.spec)
            .detail("forward", m.forward.iter().map(|e| sc.spec.render(e)).collect::<Vec<_>>().join(", ")),
    );
    Ok(())
}

fn profile(defs: &Definitions, name: &str, zt: &ZeroTest) -> Result<LeafVolumeProfile> {
    let Some(Item::Volume(v)) = defs.get(name) else {
        return usage(format!("`{name}` is not a volume profile"));
    };
    let chart = &defs.chart(&v.chart).expect("resolved").spec;
    let domain = if v.positive { ParameterDomain::Positive } else { ParameterDomain::Real };
    LeafVolumeProfile::new(chart, v.value.clone(), v.leaf, domain, zt).context(format!("volume profile `{name}`"))
}

fn volume_cmd(defs: &Definitions, first: &str, second: &str, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let a = profile(defs, first, zt)?;
    let b = profile(defs, second, zt)?;
    let cert = volume_obstruction(&a, &b, zt).context("volume obstruction")?;
    let (ca, cb) = (a.chart(), b.chart());
    let base = |verdict, check: String, anchor: &str| {
        Entry::new(check, anchor, verdict, Regime::Exact)
            .detail(&format!("Vol({first})"), ca.render(a.volume()))
            .detail(&format!("Vol({second})"), cb.render(b.volume()))
    };
    let e = match cert {
        VolumeCertificate::NonConstancy { derivatives, point, value } => {
            let regime = if matches!(value, poisson_core::Value::Exact(_)) { Regime::Exact } else { Regime::Numeric };
            let mut e = base(Verdict::Pass, format!("{first} varies, {second} is constant"), "leaf volume is an isomorphism invariant");
            e.regime = regime.as_str();
            e.detail(
                "derivatives",
                derivatives.iter().map(|d| ca.render(d)).collect::<Vec<_>>().join(", "),
            )
            .detail(
                "nonzero at",
                format!(
                    "({}) with value {}",
                    point.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", "),
                    match value {
                        poisson_core::Value::Exact(r) => r.to_string(),
                        poisson_core::Value::Approx(x) => format!("{x:e}"),
                    }
                ),
            )
        }
        VolumeCertificate::Matching { parameter, solution } => base(
            Verdict::Pass,
            format!("volume matching {first} ~ {second}"),
            "parameter of the second family with equal leaf volume",
        )
        .detail(&parameter, ca.render(&solution)),
        VolumeCertificate::Identical => base(
            Verdict::Inconclusive,
            format!("{first} and {second} have equal volumes"),
            "no volume obstruction",
        ),
    };
    report.push(e.timed(t.elapsed()));
    Ok(())
}

fn example3(grid: Vec<Rational>, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    let t = Instant::now();
    let (a, b) = sphere_family_profiles(zt).context("leaf volume profiles")?;
    let r = ScalarExpr::var(0);
    let one = ScalarExpr::one();
    let stated_a = (ScalarExpr::int(4) * ScalarExpr::pi() * &r).checked_div(&(&one + &(&r * &r))).context("volume")?;
    let stated_b = ScalarExpr::int(4) * ScalarExpr::pi() * &r;
    for (label, p, stated, anchor) in [
        ("leaf volume in the weighted product", &a, stated_a, "Vol(T x S^2_r1) with weight 1/(1 + r1^2) on the torus"),
        ("leaf volume in the linear model", &b, stated_b, "Vol(T x S^2_r2) of the direct product"),
    ] {
        let c = zero_check(label, p.volume() - &stated, zt)?;
        report.push(
            Entry::from_check(label, anchor, &c, p.chart())
                .detail("volume", p.chart().render(p.volume()))
                .timed(t.elapsed()),
        );
    }
    let t = Instant::now();
    let cert = sphere_class_certificate(&grid, zt).context("sphere class certificate")?;
    let r1 = a.chart();
    let expected = r.checked_div(&(&one + &(&r * &r))).context("matching")?;
    let c = zero_check("r2(r1)", &cert.matching - &expected, zt)?;
    report.push(
        Entry::from_check("volume matching r2(r1)", "equal leaf volumes force r2 = r1/(1 + r1^2)", &c, r1)
            .detail("r2", r1.render(&cert.matching))
            .timed(t.elapsed()),
    );
    let verdict = if cert.difference_positive { Verdict::Pass } else { Verdict::Fail };
    let mut e = Entry::new("r1 - r2(r1) > 0 for r1 > 0", "the sphere class forces r2 = r1", verdict, Regime::Exact)
        .detail("r1 - r2(r1)", r1.render(&cert.difference))
        .detail("note", cert.note.clone());
    if !cert.difference_positive {
        e.witness("r1 - r2(r1)", &r1.render(&cert.difference));
    }
    report.push(e);
    for s in &cert.samples {
        let verdict = if s.mismatch { Verdict::Pass } else { Verdict::Fail };
        let mut e = Entry::new(format!("mismatch at r1 = {}", s.r1), "volume matching and sphere class disagree", verdict, Regime::Exact)
            .detail("volume matching r2", s.volume_match.to_string())
            .detail("sphere class r2", s.sphere_class.to_string());
        if !s.mismatch {
            e.witness(&format!("r1 = {}", s.r1), "both radii agree");
        }
        report.push(e);
    }
    Ok(())
}

fn zero_check(label: &str, e: ScalarExpr, zt: &ZeroTest) -> Result<Check> {
    Check::all_zero([(label.to_string(), e)], zt).context(label.to_string())
}

fn suite_entry(s: &SuiteResult, anchor: &str, chart: &ChartSpec, t: Instant) -> Entry {
    Entry::from_check(s.name, anchor, &s.check, chart)
        .detail("instances", s.instances.to_string())
        .detail("components", s.components.to_string())
        .timed(t.elapsed())
}

fn identities(seed: u64, instances: usize, sections: usize, zt: &ZeroTest, report: &mut Report) -> Result<()> {
    // witnesses come from several charts; render them on a generic one
    let names: Vec<String> = (1..=8).map(|i| format!("x{i}")).collect();
    let chart = ChartSpec::new(&names).expect("valid names");
    let t = Instant::now();
    let s = bivector_identity_suite(seed, instances, zt).context("bivector identity suite")?;
    report.push(suite_entry(&s, "-1/2 [L,L](a,b,c) = L(a, L#b, c) contraction formula, cyclic", &chart, t));
    let t = Instant::now();
    let s = horizontal_identity_suite(seed, instances, zt).context("horizontal identity suite")?;
    report.push(suite_entry(&s, "-1/2 [mu,mu] on horizontal forms equals d omega on their images", &chart, t));
    let t = Instant::now();
    let s = mixed_identity_suite(seed, instances, zt).context("mixed identity suite")?;
    report.push(suite_entry(&s, "-1/2 [pi,pi](dq, theta, theta) equals [mu dq, nu](theta, theta)", &chart, t));
    let t = Instant::now();
    let s = pullback_identity_suite(seed, sections, zt).context("pullback connection suite")?;
    report.push(suite_entry(&s, "derivation, curvature and cyclic identities of the pullback connection", &chart, t));
    Ok(())
}
