//! Integrability conditions against the Jacobi identity of the composed
//! bivector, and the blocks of `[pi, pi]` picked out by each broken variant.

use poisson_core::corpus::integrability_corpus;
use poisson_core::coupling::{coupling_bivector, degree_blocks, integrability_check};
use poisson_core::multivec::schouten;
use poisson_core::poisson::jacobi_check;
use poisson_core::ZeroTest;

#[test]
fn corpus_has_one_broken_variant_per_condition() {
    let corpus = integrability_corpus(&ZeroTest::default()).unwrap();
    assert!(corpus.len() >= 10);
    let mut broken: Vec<usize> = corpus.iter().filter_map(|e| e.broken).collect();
    broken.sort();
    assert_eq!(broken, vec![1, 2, 3, 4]);
}

#[test]
fn conditions_match_jacobi_of_composition() {
    let zt = ZeroTest::default();
    for e in integrability_corpus(&zt).unwrap() {
        let report = integrability_check(&e.data, &zt).unwrap();
        let pi = coupling_bivector(&e.data, &zt).unwrap();
        let jacobi = jacobi_check(&pi, &zt).unwrap();
        assert_eq!(report.holds(), jacobi.is_verified(), "{}", e.name);
        assert!(report.condition4_paths_agree, "{}", e.name);
        match e.broken {
            None => assert!(report.holds(), "{}", e.name),
            Some(c) => {
                assert_eq!(report.failing(), vec![c], "{}", e.name);
                let blocks = degree_blocks(&schouten(&pi, &pi).unwrap(), e.data.connection(), &zt).unwrap();
                let nonzero: Vec<usize> = (0..4).filter(|&n| !blocks[n].holds).map(|n| n + 1).collect();
                assert_eq!(nonzero, vec![c], "{}", e.name);
            }
        }
    }
}

#[test]
fn curved_so3_is_integrable_for_one_twist_only() {
    let zt = ZeroTest::default();
    for (t, ok) in [(-1, true), (1, false), (0, false)] {
        let data = poisson_core::corpus::curved_so3(t, &zt).unwrap();
        let report = integrability_check(&data, &zt).unwrap();
        assert_eq!(report.holds(), ok, "twist {t}");
        if !ok {
            assert_eq!(report.failing(), vec![3], "twist {t}");
        }
    }
}
