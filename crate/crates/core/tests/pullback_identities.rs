//! Identities of the pullback connection on the isotropy bundle: derivation
//! of the bracket, curvature versus bracket with `R_sigma`, and the
//! Bianchi-type cyclic sum, on example tables and random conormal sections.

use poisson_core::corpus::{curved_so3, example1, example3, integrability_corpus, torus_fibration};
use poisson_core::coupling::{compose, FiberedChart};
use poisson_core::multivec::subsets;
use poisson_core::poisson::{jacobi_check, PoissonStructure};
use poisson_core::random::InstanceGen;
use poisson_core::vorobjev::{leaf_form, pullback_connection, PullbackConnectionData};
use poisson_core::{ScalarExpr, ZeroTest};

const SECTIONS: u64 = 20;

fn table(lambda: &PoissonStructure, fc: &FiberedChart, zt: &ZeroTest) -> PullbackConnectionData {
    let omega = leaf_form(lambda, fc, zt).unwrap();
    pullback_connection(lambda, fc, &omega, zt).unwrap()
}

fn tables(zt: &ZeroTest) -> Vec<(&'static str, PullbackConnectionData)> {
    let mut out = Vec::new();
    for (name, spec) in [("ex1", example1(zt).unwrap()), ("ex3", example3(zt).unwrap())] {
        let lambda = jacobi_check(&spec.bivector().unwrap(), zt).unwrap();
        out.push((name, table(&lambda, &torus_fibration(&spec).unwrap(), zt)));
    }
    let curved = curved_so3(-1, zt).unwrap();
    let lambda = compose(&curved, zt).unwrap();
    out.push(("curved-so3", table(&lambda, curved.fibered_chart(), zt)));
    let four = integrability_corpus(zt).unwrap().into_iter().find(|e| e.name == "four-base").unwrap();
    let lambda = compose(&four.data, zt).unwrap();
    out.push(("four-base", table(&lambda, four.data.fibered_chart(), zt)));
    out
}

#[test]
fn splitting_and_isotropy_algebroid() {
    let zt = ZeroTest::default();
    for (name, t) in tables(&zt) {
        assert!(t.splitting_check(&zt).unwrap().holds, "{name}");
        assert!(t.isotropy_jacobi(&zt).unwrap().holds, "{name}");
    }
}

#[test]
fn connection_identities_on_random_sections() {
    let zt = ZeroTest::default();
    for (name, t) in tables(&zt) {
        let fc = t.fibered_chart().clone();
        let nd = fc.base_dim();
        let mut g = InstanceGen::new(7);
        for n in 0..SECTIONS {
            let (s1, s2) = (g.conormal_section(&fc, 2), g.conormal_section(&fc, 2));
            for i in 0..nd {
                assert!(t.identity_ii(i, &s1, &s2, &zt).unwrap().holds, "{name} section {n} (ii) {i}");
                for j in 0..nd {
                    assert!(t.identity_iii(i, j, &s1, &zt).unwrap().holds, "{name} section {n} (iii) {i},{j}");
                }
            }
        }
        for set in subsets(nd, 3) {
            assert!(t.identity_iv(set[0], set[1], set[2], &zt).unwrap().holds, "{name} (iv) {set:?}");
        }
        for (i, j) in [(0, 1), (1, 0)] {
            assert!(t.identity_iv(i, j, i, &zt).unwrap().holds, "{name} (iv) {i},{j},{i}");
        }
    }
}

#[test]
fn covariant_derivative_leibniz_rule() {
    let zt = ZeroTest::default();
    let base = |fc: &FiberedChart| (0..fc.base_dim()).collect::<Vec<usize>>();
    for (name, t) in tables(&zt) {
        let fc = t.fibered_chart().clone();
        let mut g = InstanceGen::new(11);
        for _ in 0..5 {
            let s = g.conormal_section(&fc, 2);
            let f: ScalarExpr = g.poly(&base(&fc), 2);
            for i in 0..fc.base_dim() {
                assert!(t.leibniz_check(i, &f, &s, &zt).unwrap().holds, "{name} {i}");
            }
        }
    }
}

#[test]
fn curvature_of_curved_table_is_nontrivial() {
    let zt = ZeroTest::default();
    let curved = curved_so3(-1, &zt).unwrap();
    let lambda = compose(&curved, &zt).unwrap();
    let t = table(&lambda, curved.fibered_chart(), &zt);
    assert!(!t.is_flat());
    assert!(!t.ell_curvature(0, 1).is_structural_zero());
}
