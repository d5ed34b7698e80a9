//! Pairing identities for Schouten brackets, checked on seeded random
//! polynomial instances. Both sides are computed along independent paths.

use poisson_core::coupling::{horizontal_coupling_bivector, horizontal_identity_defects, mixed_identity_defects};
use poisson_core::multivec::bivector_identity_defect;
use poisson_core::random::InstanceGen;
use poisson_core::{ChartSpec, ZeroTest, ZeroVerdict};

const INSTANCES: u64 = 50;

fn chart(n: usize) -> ChartSpec {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    ChartSpec::new(&names).unwrap()
}

#[test]
fn bivector_identity_on_random_instances() {
    let zt = ZeroTest::default();
    for seed in 0..INSTANCES {
        let mut g = InstanceGen::new(seed);
        let c = chart(2 + (seed as usize % 4));
        let l = g.bivector(&c, 2);
        let (a, b, cc) = (g.one_form(&c, 2), g.one_form(&c, 2), g.one_form(&c, 2));
        let defect = bivector_identity_defect(&l, &a, &b, &cc).unwrap();
        assert_eq!(defect.is_zero(&zt).unwrap(), ZeroVerdict::ProvenZero, "seed {seed}");
    }
}

#[test]
fn horizontal_identity_on_random_instances() {
    let zt = ZeroTest::default();
    for seed in 0..INSTANCES {
        let mut g = InstanceGen::new(1000 + seed);
        let data = g.four_base_data(&zt).unwrap();
        let mu = horizontal_coupling_bivector(&data, &zt).unwrap();
        let defects = horizontal_identity_defects(&data, &mu).unwrap();
        assert_eq!(defects.len(), 4);
        for (t, defect) in defects {
            assert_eq!(defect.is_zero(&zt).unwrap(), ZeroVerdict::ProvenZero, "seed {seed} {t:?}");
        }
    }
}

#[test]
fn mixed_identity_on_random_instances() {
    let zt = ZeroTest::default();
    for seed in 0..INSTANCES {
        let mut g = InstanceGen::new(2000 + seed);
        let fibers = 2 + (seed as usize % 2);
        let data = g.two_base_data(fibers, &zt).unwrap();
        let mu = horizontal_coupling_bivector(&data, &zt).unwrap();
        let defects = mixed_identity_defects(&data, &mu).unwrap();
        assert_eq!(defects.len(), 2 * fibers * (fibers - 1) / 2);
        for ((i, pair), defect) in defects {
            assert_eq!(defect.is_zero(&zt).unwrap(), ZeroVerdict::ProvenZero, "seed {seed} i={i} {pair:?}");
        }
    }
}
