//! Acceptance criteria 1 to 10, run in order without the test harness so
//! that each prints one `criterion N: PASS|FAIL` line with its runtime.
//! Criteria whose stated closed form disagrees with the computation print
//! FAIL and assert the computed outcome instead.

use std::time::{Duration, Instant};

use poisson_cli::ast::DefinitionFile;
use poisson_cli::commands::default_grid;
use poisson_cli::error::Phase;
use poisson_cli::library::EMBEDDED;
use poisson_cli::parser::parse;
use poisson_cli::{load, run, CliError, Command, Options, Report, Verdict, Workspace};
use poisson_core::corpus::{example1, example2, example3, integrability_corpus, torus_fibration};
use poisson_core::coupling::{compose, coupling_bivector, decompose, degree_blocks, integrability_check};
use poisson_core::multivec::schouten;
use poisson_core::oracles::{bivector_identity_suite, horizontal_identity_suite, mixed_identity_suite, pullback_identity_suite, pullback_tables};
use poisson_core::poisson::{jacobi_check, lie_poisson_at, LieAlgebraSpec};
use poisson_core::vorobjev::{first_approximation, product_leaf_volume, sphere_class_certificate, sphere_family_profiles, torus_volume};
use poisson_core::{ChartSpec, Check, MultivectorField, Regime, ScalarExpr, ZeroTest};

fn zt() -> ZeroTest {
    Options::default().zero_test()
}

fn ws() -> Workspace {
    Workspace::builtin().expect("embedded library loads")
}

/// Prints the criterion line; returns whether it passed within `limit`.
fn verdict(n: u32, ok: bool, t: Instant, limit: Duration, note: &str) -> bool {
    let elapsed = t.elapsed();
    let in_time = elapsed <= limit;
    println!(
        "criterion {n}: {} ({:.3} s, limit {} s){}{note}",
        if ok && in_time { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs(),
        if note.is_empty() { "" } else { "; " },
    );
    assert!(in_time, "criterion {n} took {elapsed:?}, limit {limit:?}");
    ok
}

fn all_exact_pass(r: &Report) -> bool {
    !r.entries.is_empty() && r.entries.iter().all(|e| e.verdict == Verdict::Pass && e.regime == "exact")
}

fn exact_zero(c: &Check) -> bool {
    c.holds && c.regime == Regime::Exact
}

fn criterion_01_jacobi_suite() {
    let ws = ws();
    let opts = Options::default();
    let t = Instant::now();
    let mut ok = true;
    for name in ["so3", "ex1", "ex2", "ex3"] {
        let r = run(&Command::CheckJacobi { name: name.into() }, &opts, &ws).unwrap();
        assert!(all_exact_pass(&r), "{}", r.to_text());
        ok &= all_exact_pass(&r);
    }
    let broken = run(&Command::CheckJacobi { name: "broken".into() }, &opts, &ws).unwrap();
    let e = &broken.entries[0];
    assert_eq!(e.verdict, Verdict::Fail);
    assert!(e.witnesses.iter().any(|w| w.label.starts_with("[pi,pi]") && w.value != "0"));
    assert_eq!(broken.exit_code(), 1);
    let w = &e.witnesses[0];
    let note = format!("so3, ex1, ex2, ex3 exact; broken fails with {} = {}", w.label, w.value);
    assert!(verdict(1, ok, t, Duration::from_secs(1), &note));
}

fn criterion_02_bracket_identity_oracles() {
    let zt = zt();
    let seed = Options::default().seed;
    let t = Instant::now();
    let suites = [
        bivector_identity_suite(seed, 50, &zt).unwrap(),
        horizontal_identity_suite(seed, 50, &zt).unwrap(),
        mixed_identity_suite(seed, 50, &zt).unwrap(),
    ];
    let mut note = Vec::new();
    for s in &suites {
        assert!(s.instances >= 50, "{}", s.name);
        assert!(exact_zero(&s.check), "{}: {:?}", s.name, s.check.witnesses);
        note.push(format!("{} {}x{}", s.name, s.instances, s.components));
    }
    let ok = suites.iter().all(|s| exact_zero(&s.check));
    assert!(verdict(2, ok, t, Duration::from_secs(30), &note.join(", ")));
}

fn criterion_03_conditions_match_jacobi() {
    let zt = zt();
    let t = Instant::now();
    let corpus = integrability_corpus(&zt).unwrap();
    assert!(corpus.len() >= 10);
    for ex in ["ex1", "ex2", "ex3"] {
        assert!(corpus.iter().any(|e| e.name == ex));
    }
    let mut broken: Vec<usize> = corpus.iter().filter_map(|e| e.broken).collect();
    broken.sort();
    assert_eq!(broken, vec![1, 2, 3, 4]);
    let mut ok = true;
    for e in &corpus {
        let report = integrability_check(&e.data, &zt).unwrap();
        let pi = coupling_bivector(&e.data, &zt).unwrap();
        let jacobi = jacobi_check(&pi, &zt).unwrap();
        let agree = report.holds() == jacobi.is_verified();
        let blocks_match = match e.broken {
            None => report.holds(),
            Some(c) => {
                let blocks = degree_blocks(&schouten(&pi, &pi).unwrap(), e.data.connection(), &zt).unwrap();
                let nonzero: Vec<usize> = (0..4).filter(|&n| !blocks[n].holds).map(|n| n + 1).collect();
                report.failing() == vec![c] && nonzero == vec![c]
            }
        };
        assert!(agree && blocks_match, "{}", e.name);
        ok &= agree && blocks_match;
    }
    let note = format!("{} data sets, broken conditions 1 to 4 located in their degree blocks", corpus.len());
    assert!(verdict(3, ok, t, Duration::from_secs(30), &note));
}

fn criterion_04_pullback_connection_identities() {
    let zt = zt();
    let t = Instant::now();
    let names: Vec<&str> = pullback_tables(&zt).unwrap().into_iter().map(|(n, _)| n).collect();
    assert!(names.contains(&"example 1") && names.contains(&"example 3"));
    let s = pullback_identity_suite(Options::default().seed, 20, &zt).unwrap();
    assert!(s.instances >= 20);
    assert!(exact_zero(&s.check), "{:?}", s.check.witnesses);
    let note = format!("tables {}; {} sections, {} components", names.join(", "), s.instances, s.components);
    assert!(verdict(4, exact_zero(&s.check), t, Duration::from_secs(10), &note));
}

fn criterion_05_first_approximations() {
    let zt = zt();
    let t = Instant::now();
    let one = ScalarExpr::one();
    let z = ScalarExpr::var(2);

    let ex1 = example1(&zt).unwrap();
    let fa1 = first_approximation(&ex1, &zt).unwrap();
    let c1 = ex1.chart();
    let stated1 = MultivectorField::from_components(c1, 2, [(vec![0, 1], (&one + &z).recip().unwrap())]).unwrap();
    let ex1_ok = exact_zero(&fa1.structure.bivector().sub(&stated1).unwrap().check_zero(&zt).unwrap());
    // documented outcome: 1/(1 - z), the stated form reflected in z
    let computed1 = MultivectorField::from_components(c1, 2, [(vec![0, 1], (&one - &z).recip().unwrap())]).unwrap();
    assert!(exact_zero(&fa1.structure.bivector().sub(&computed1).unwrap().check_zero(&zt).unwrap()));
    assert!(!fa1.agreement.holds && fa1.agreement.regime == Regime::Exact);

    let ex2 = example2(&zt).unwrap();
    let fa2 = first_approximation(&ex2, &zt).unwrap();
    let stated2 = MultivectorField::basis(ex2.chart(), &[0, 1]).unwrap();
    let ex2_ok = exact_zero(&fa2.structure.bivector().sub(&stated2).unwrap().check_zero(&zt).unwrap());
    assert!(ex2_ok && fa2.agreement.holds);

    let ex3 = example3(&zt).unwrap();
    let fa3 = first_approximation(&ex3, &zt).unwrap();
    let c3 = ex3.chart();
    let so3 = lie_poisson_at(&LieAlgebraSpec::so3(), c3, 2).unwrap();
    let stated3 = MultivectorField::basis(c3, &[0, 1]).unwrap().add(so3.bivector()).unwrap();
    let ex3_ok = exact_zero(&fa3.structure.bivector().sub(&stated3).unwrap().check_zero(&zt).unwrap());
    assert!(ex3_ok && fa3.agreement.holds);

    let note = format!(
        "ex2 d_u^d_v and ex3 pi_T + pi_so3 exact; ex1 gives {} against the stated {}, equal up to z -> -z",
        fa1.structure.bivector().render(),
        stated1.render()
    );
    verdict(5, ex1_ok && ex2_ok && ex3_ok, t, Duration::from_secs(5), &note);
}

fn criterion_06_linearizing_map() {
    let ws = ws();
    let opts = Options {
        samples: 64,
        epsilon: 1e-9,
        ..Options::default()
    };
    let t = Instant::now();
    let stated = Command::VerifyMap {
        map: "psi1".into(),
        source: "ex1".into(),
        target: "lin1".into(),
    };
    let r = run(&stated, &opts, &ws).unwrap();
    assert!(r.passed(), "{}", r.to_text());
    let jet = Command::VerifyMap {
        map: "psi1_jet".into(),
        source: "ex1".into(),
        target: "lin1_jet".into(),
    };
    let rj = run(&jet, &opts, &ws).unwrap();
    assert!(rj.passed(), "{}", rj.to_text());
    let regimes: Vec<&str> = r.entries.iter().map(|e| e.regime).collect();
    let note = format!("psi1 pushes ex1 to 1/(1+z) d_u^d_v (regimes {}); psi1_jet reaches 1/(1-z) d_u^d_v", regimes.join(", "));
    assert!(verdict(6, r.passed() && rj.passed(), t, Duration::from_secs(5), &note));
}

fn criterion_07_volume_obstruction() {
    let ws = ws();
    let opts = Options::default();
    let zt = zt();
    let t = Instant::now();
    let one = ScalarExpr::one();
    let z = ScalarExpr::var(0);
    let f = &one + &(&z * &z);
    // leaves T x {z} of f d_u^d_v carry (1/f) omega_T
    let computed = product_leaf_volume(&torus_volume(), 1, &one, 0, &f.recip().unwrap(), &one).unwrap();
    let linear = product_leaf_volume(&torus_volume(), 1, &one, 0, &one, &one).unwrap();
    assert!((&computed - &one.checked_div(&f).unwrap()).is_zero(&zt).unwrap().is_zero());
    assert!((&linear - &one).is_zero(&zt).unwrap().is_zero());
    let reproduced = (&computed - &f).is_zero(&zt).unwrap().is_zero();

    let mut certified = true;
    for (a, b) in [("vol2", "vol2_linear"), ("vol2_leafwise", "vol2_linear")] {
        let r = run(&Command::VolumeObstruction { first: a.into(), second: b.into() }, &opts, &ws).unwrap();
        let name = format!("{a} varies, {b} is constant");
        let e = r.entry(&name).unwrap_or_else(|| panic!("{}", r.to_text()));
        assert!(e.verdict == Verdict::Pass && e.regime == "exact", "{}", r.to_text());
        certified &= e.verdict == Verdict::Pass;
    }
    let note = format!(
        "non-constancy certified for the stated 1 + z^2 vs 1 and for the computed leaf volume {} vs 1; \
         the computed profile is the reciprocal of the stated one",
        ChartSpec::new(&["z"]).unwrap().render(&computed)
    );
    verdict(7, reproduced && certified, t, Duration::from_secs(1), &note);
}

fn criterion_08_sphere_family_certificate() {
    let ws = ws();
    let zt = zt();
    let t = Instant::now();
    let r = run(&Command::Example3Certificate { grid: None }, &Options::default(), &ws).unwrap();
    assert!(all_exact_pass(&r), "{}", r.to_text());
    for s in default_grid() {
        assert!(r.entry(&format!("mismatch at r1 = {s}")).is_some(), "{s}");
    }
    let (a, b) = sphere_family_profiles(&zt).unwrap();
    let r1 = ScalarExpr::var(0);
    let one = ScalarExpr::one();
    let four_pi = ScalarExpr::int(4) * ScalarExpr::pi();
    let va = (&four_pi * &r1).checked_div(&(&one + &(&r1 * &r1))).unwrap();
    assert!((a.volume() - &va).is_zero(&zt).unwrap().is_zero());
    assert!((b.volume() - &(&four_pi * &r1)).is_zero(&zt).unwrap().is_zero());
    let cert = sphere_class_certificate(&default_grid(), &zt).unwrap();
    let cube = (&r1 * &r1 * &r1).checked_div(&(&one + &(&r1 * &r1))).unwrap();
    assert!((&cert.difference - &cube).is_zero(&zt).unwrap().is_zero());
    assert!(cert.difference_positive && cert.samples.iter().all(|s| s.mismatch));
    let note = format!(
        "volumes {} and {}, r2 = {}, r1 - r2 = {} > 0, mismatch at {} grid points",
        a.chart().render(a.volume()),
        b.chart().render(b.volume()),
        a.chart().render(&cert.matching),
        a.chart().render(&cert.difference),
        cert.samples.len()
    );
    assert!(verdict(8, all_exact_pass(&r), t, Duration::from_secs(1), &note));
}

fn criterion_09_compose_decompose_roundtrip() {
    let zt = zt();
    let t = Instant::now();
    let mut count = 0;
    for e in integrability_corpus(&zt).unwrap().into_iter().filter(|e| e.broken.is_none()) {
        let pi = compose(&e.data, &zt).unwrap();
        let data = decompose(&pi, e.data.fibered_chart(), &zt).unwrap();
        let back = compose(&data, &zt).unwrap();
        assert!(exact_zero(&back.bivector().sub(pi.bivector()).unwrap().check_zero(&zt).unwrap()), "{}", e.name);
        assert!(exact_zero(&data.nu().sub(e.data.nu()).unwrap().check_zero(&zt).unwrap()), "{}", e.name);
        assert!(exact_zero(&data.phi().sub(e.data.phi()).unwrap().check_zero(&zt).unwrap()), "{}", e.name);
        count += 1;
    }
    for spec in [example1(&zt).unwrap(), example2(&zt).unwrap(), example3(&zt).unwrap()] {
        let pi = jacobi_check(&spec.bivector().unwrap(), &zt).unwrap();
        let data = decompose(&pi, &torus_fibration(&spec).unwrap(), &zt).unwrap();
        let back = compose(&data, &zt).unwrap();
        assert!(exact_zero(&back.bivector().sub(pi.bivector()).unwrap().check_zero(&zt).unwrap()));
        count += 1;
    }
    let note = format!("{count} structures, including the three weighted products");
    assert!(verdict(9, true, t, Duration::from_secs(10), &note));
}

fn diagnostic(file: &str, src: &str) -> poisson_cli::Diagnostic {
    match load(file, src) {
        Err(CliError::Diagnostic(d)) => *d,
        other => panic!("{file}: expected a diagnostic, got {other:?}"),
    }
}

fn criterion_10_parser_roundtrip_and_diagnostics() {
    let t = Instant::now();
    for (file, src) in EMBEDDED.iter().filter(|(f, _)| f.starts_with("ex")) {
        let ast: DefinitionFile = parse(file, src).unwrap();
        let printed = ast.to_string();
        let again = parse(file, &printed).unwrap();
        assert_eq!(ast, again, "{file}");
        assert_eq!(printed, again.to_string(), "{file}");
        load(file, &printed).unwrap();
    }
    let header = "chart M = (x, y)\n";
    let malformed = [
        ("lexical.def", format!("{header}casimir f = x $ y on M"), Phase::Lexical, (2, 15)),
        ("dangling.def", format!("{header}casimir f = x + on M"), Phase::Syntax, (2, 15)),
        ("keyword.def", format!("{header}bivektor p on M {{ (x, y): 1 }}"), Phase::Syntax, (2, 1)),
        ("duplicate.def", format!("{header}chart M = (a, b)"), Phase::Resolution, (2, 7)),
        ("coordinate.def", format!("{header}bivector p on M {{ (x, w): 1 }}"), Phase::Resolution, (2, 23)),
    ];
    let mut shown = Vec::new();
    for (file, src, phase, (line, col)) in &malformed {
        let d = diagnostic(file, src);
        assert_eq!(d.phase, *phase, "{d}");
        assert_eq!((d.pos.line, d.pos.col), (*line, *col), "{d}");
        assert!(d.to_string().starts_with(&format!("{file}:{line}:{col}: ")), "{d}");
        shown.push(format!("{}:{}", d.pos.line, d.pos.col));
    }
    let note = format!("ex1, ex2, ex3 round trip; diagnostics at {}", shown.join(", "));
    assert!(verdict(10, true, t, Duration::from_secs(1), &note));
}

fn main() {
    criterion_01_jacobi_suite();
    criterion_02_bracket_identity_oracles();
    criterion_03_conditions_match_jacobi();
    criterion_04_pullback_connection_identities();
    criterion_05_first_approximations();
    criterion_06_linearizing_map();
    criterion_07_volume_obstruction();
    criterion_08_sphere_family_certificate();
    criterion_09_compose_decompose_roundtrip();
    criterion_10_parser_roundtrip_and_diagnostics();
}
