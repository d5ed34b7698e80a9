//! Seeded randomized suites for the bracket identities and the pullback
//! connection identities. Each suite returns one aggregated [`Check`] whose
//! witness labels name the instance.

use crate::check::{Check, Regime, Witness};
use crate::chart::ChartSpec;
use crate::corpus::{curved_so3, example1, example3, torus_fibration};
use crate::coupling::{compose, horizontal_coupling_bivector, horizontal_identity_defects, mixed_identity_defects, FiberedChart};
use crate::error::Result;
use crate::expr::{ScalarExpr, ZeroTest, ZeroVerdict};
use crate::multivec::{bivector_identity_defect, subsets};
use crate::poisson::{jacobi_check, PoissonStructure};
use crate::random::InstanceGen;
use crate::vorobjev::{leaf_form, pullback_connection, PullbackConnectionData};

/// Outcome of a suite: the aggregated check and the number of instances.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub instances: usize,
    pub components: usize,
    pub check: Check,
}

fn record(check: &mut Check, label: String, value: ScalarExpr, zt: &ZeroTest) -> Result<()> {
    match value.is_zero(zt)? {
        ZeroVerdict::ProvenZero => {}
        ZeroVerdict::NumericallyZero => check.regime = Regime::Numeric,
        ZeroVerdict::ProvenNonzero => {
            check.holds = false;
            check.witnesses.push(Witness { label, value });
        }
    }
    Ok(())
}

fn chart(n: usize) -> Result<ChartSpec> {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    ChartSpec::new(&names)
}

/// `-1/2 [L,L](a,b,c)` against the contraction formula for random
/// quadratic bivectors on charts of dimension 2 to 5.
pub fn bivector_identity_suite(seed: u64, instances: usize, zt: &ZeroTest) -> Result<SuiteResult> {
    let mut check = Check::pass();
    for k in 0..instances as u64 {
        let mut g = InstanceGen::new(seed.wrapping_add(k));
        let c = chart(2 + (k as usize % 4))?;
        let l = g.bivector(&c, 2);
        let (a, b, cc) = (g.one_form(&c, 2), g.one_form(&c, 2), g.one_form(&c, 2));
        record(&mut check, format!("instance {k}"), bivector_identity_defect(&l, &a, &b, &cc)?, zt)?;
    }
    Ok(SuiteResult {
        name: "bivector pairing identity",
        instances,
        components: instances,
        check,
    })
}

/// `-1/2 [mu,mu]` on horizontal forms against `dw` on their images, over a
/// four-dimensional base.
pub fn horizontal_identity_suite(seed: u64, instances: usize, zt: &ZeroTest) -> Result<SuiteResult> {
    let mut check = Check::pass();
    let mut components = 0;
    for k in 0..instances as u64 {
        let mut g = InstanceGen::new(seed.wrapping_add(1000 + k));
        let data = g.four_base_data(zt)?;
        let mu = horizontal_coupling_bivector(&data, zt)?;
        for ((i, j, l), defect) in horizontal_identity_defects(&data, &mu)? {
            components += 1;
            record(&mut check, format!("instance {k} ({i},{j},{l})"), defect, zt)?;
        }
    }
    Ok(SuiteResult {
        name: "horizontal coupling identity",
        instances,
        components,
        check,
    })
}

/// `-1/2 [pi,pi](dq, theta, theta)` against `[mu dq, nu]` with two or three
/// fiber coordinates.
pub fn mixed_identity_suite(seed: u64, instances: usize, zt: &ZeroTest) -> Result<SuiteResult> {
    let mut check = Check::pass();
    let mut components = 0;
    for k in 0..instances as u64 {
        let mut g = InstanceGen::new(seed.wrapping_add(2000 + k));
        let data = g.two_base_data(2 + (k as usize % 2), zt)?;
        let mu = horizontal_coupling_bivector(&data, zt)?;
        for ((i, (a, b)), defect) in mixed_identity_defects(&data, &mu)? {
            components += 1;
            record(&mut check, format!("instance {k} i={i} ({a},{b})"), defect, zt)?;
        }
    }
    Ok(SuiteResult {
        name: "mixed coupling identity",
        instances,
        components,
        check,
    })
}

fn table(lambda: &PoissonStructure, fc: &FiberedChart, zt: &ZeroTest) -> Result<PullbackConnectionData> {
    let omega = leaf_form(lambda, fc, zt)?;
    pullback_connection(lambda, fc, &omega, zt)
}

/// Pullback-connection tables of the first and third examples and of the
/// curved so(3) coupling.
pub fn pullback_tables(zt: &ZeroTest) -> Result<Vec<(&'static str, PullbackConnectionData)>> {
    let mut out = Vec::new();
    for (name, spec) in [("example 1", example1(zt)?), ("example 3", example3(zt)?)] {
        let lambda = jacobi_check(&spec.bivector()?, zt)?;
        out.push((name, table(&lambda, &torus_fibration(&spec)?, zt)?));
    }
    let curved = curved_so3(-1, zt)?;
    out.push(("curved so3", table(&compose(&curved, zt)?, curved.fibered_chart(), zt)?));
    Ok(out)
}

/// Derivation, curvature and cyclic identities of the pullback connection
/// on random conormal sections for every table.
pub fn pullback_identity_suite(seed: u64, sections: usize, zt: &ZeroTest) -> Result<SuiteResult> {
    let mut check = Check::pass();
    let mut components = 0;
    for (name, t) in pullback_tables(zt)? {
        let fc = t.fibered_chart().clone();
        let nd = fc.base_dim();
        let mut g = InstanceGen::new(seed.wrapping_add(3000));
        let mut push = |c: Check, label: String| {
            components += 1;
            check.regime = check.regime.join(c.regime);
            if !c.holds {
                check.holds = false;
                check
                    .witnesses
                    .extend(c.witnesses.into_iter().map(|w| Witness { label: format!("{label} {}", w.label), value: w.value }));
            }
        };
        push(t.isotropy_jacobi(zt)?, format!("{name} isotropy Jacobi"));
        for n in 0..sections {
            let (s1, s2) = (g.conormal_section(&fc, 2), g.conormal_section(&fc, 2));
            for i in 0..nd {
                push(t.identity_ii(i, &s1, &s2, zt)?, format!("{name} section {n} (ii) {i}"));
                for j in 0..nd {
                    push(t.identity_iii(i, j, &s1, zt)?, format!("{name} section {n} (iii) {i},{j}"));
                }
            }
        }
        for set in subsets(nd, 3) {
            push(t.identity_iv(set[0], set[1], set[2], zt)?, format!("{name} (iv) {set:?}"));
        }
        push(t.identity_iv(0, 1, 0, zt)?, format!("{name} (iv) 0,1,0"));
    }
    Ok(SuiteResult {
        name: "pullback connection identities",
        instances: sections,
        components,
        check,
    })
}
