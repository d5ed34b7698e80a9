//! `compose` and `decompose` are mutually inverse on horizontally
//! nondegenerate data.

use poisson_core::corpus::{example1, example2, example3, integrability_corpus, torus_fibration};
use poisson_core::coupling::{compose, decompose};
use poisson_core::linalg::ExprMatrix;
use poisson_core::poisson::jacobi_check;
use poisson_core::random::InstanceGen;
use poisson_core::{ScalarExpr, ZeroTest};

#[test]
fn decompose_then_compose_on_examples() {
    let zt = ZeroTest::default();
    for spec in [example1(&zt).unwrap(), example2(&zt).unwrap(), example3(&zt).unwrap()] {
        let pi = jacobi_check(&spec.bivector().unwrap(), &zt).unwrap();
        let data = decompose(&pi, &torus_fibration(&spec).unwrap(), &zt).unwrap();
        let back = compose(&data, &zt).unwrap();
        assert!(back.bivector().sub(pi.bivector()).unwrap().check_zero(&zt).unwrap().holds);
    }
}

#[test]
fn compose_then_decompose_on_corpus() {
    let zt = ZeroTest::default();
    for e in integrability_corpus(&zt).unwrap().into_iter().filter(|e| e.broken.is_none()) {
        let pi = compose(&e.data, &zt).unwrap();
        let data = decompose(&pi, e.data.fibered_chart(), &zt).unwrap();
        assert!(data.nu().sub(e.data.nu()).unwrap().check_zero(&zt).unwrap().holds, "{}", e.name);
        assert!(data.phi().sub(e.data.phi()).unwrap().check_zero(&zt).unwrap().holds, "{}", e.name);
        let fc = e.data.fibered_chart();
        for a in 0..fc.fiber_dim() {
            for i in 0..fc.base_dim() {
                let diff = data.connection().coefficient(a, i) - e.data.connection().coefficient(a, i);
                assert!(diff.is_zero(&zt).unwrap().is_zero(), "{} Gamma[{a}][{i}]", e.name);
            }
        }
        let again = compose(&data, &zt).unwrap();
        assert!(again.bivector().sub(pi.bivector()).unwrap().check_zero(&zt).unwrap().holds, "{}", e.name);
    }
}

#[test]
fn symbolic_inverse_of_four_by_four() {
    let zt = ZeroTest::default();
    for seed in 0..5 {
        let mut g = InstanceGen::new(300 + seed);
        let entries: Vec<ScalarExpr> = (0..16).map(|_| g.poly(&[0, 1, 2], 1)).collect();
        let m = ExprMatrix::from_fn(4, 4, |i, j| {
            let diag = if i == j { ScalarExpr::int(4) } else { ScalarExpr::zero() };
            diag + entries[4 * i + j].clone()
        });
        let inv = m.inverse(&zt).unwrap();
        let prod = m.mul(&inv).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let target = if i == j { ScalarExpr::one() } else { ScalarExpr::zero() };
                assert!((prod.get(i, j) - &target).is_zero(&zt).unwrap().is_zero(), "seed {seed} ({i},{j})");
            }
        }
    }
}
