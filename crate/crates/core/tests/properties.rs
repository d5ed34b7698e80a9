//! Algebraic invariants of the exterior calculus and Poisson constructions
//! on seeded random instances.

use poisson_core::coupling::FiberedChart;
use poisson_core::multivec::{d, lie_derivative, schouten, ChartMap};
use poisson_core::poisson::{casimir_check, jacobi_check, koszul_bracket, lie_poisson, weighted_product, LieAlgebraSpec, PoissonFactor, WeightedProductSpec};
use poisson_core::random::InstanceGen;
use poisson_core::{ChartSpec, DifferentialForm, MultivectorField, Rational, ScalarExpr, ZeroTest};
use proptest::prelude::*;

fn chart(n: usize) -> ChartSpec {
    let names: Vec<String> = (1..=n).map(|i| format!("x{i}")).collect();
    ChartSpec::new(&names).unwrap()
}

fn all_vars(c: &ChartSpec) -> Vec<usize> {
    (0..c.dim()).collect()
}

fn zero<K>(f: &poisson_core::multivec::Field<K>) -> bool
where
    K: poisson_core::multivec::Kind,
{
    f.check_zero(&ZeroTest::default()).unwrap().holds
}

fn random_field(g: &mut InstanceGen, c: &ChartSpec, degree: usize) -> MultivectorField {
    match degree {
        1 => g.vector(c, 2),
        _ => g.bivector(c, 2),
    }
}

fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn schouten_graded_antisymmetry(seed in any::<u64>(), n in 2usize..5, a in 1usize..3, b in 1usize..3) {
        let mut g = InstanceGen::new(seed);
        let c = chart(n);
        let (x, y) = (random_field(&mut g, &c, a), random_field(&mut g, &c, b));
        let sign = if (a - 1) * (b - 1) % 2 == 0 { 1 } else { -1 };
        let lhs = schouten(&x, &y).unwrap();
        let rhs = schouten(&y, &x).unwrap().scale_rational(&rat(sign));
        prop_assert!(zero(&lhs.add(&rhs).unwrap()));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(seed in any::<u64>(), n in 2usize..5) {
        let mut g = InstanceGen::new(seed);
        let c = chart(n);
        let f = g.poly(&all_vars(&c), 3);
        prop_assert!(zero(&d(&d(&DifferentialForm::scalar(&c, f)).unwrap()).unwrap()));
        let one = g.one_form(&c, 2);
        prop_assert!(zero(&d(&d(&one).unwrap()).unwrap()));
        let two = one.wedge(&g.one_form(&c, 2)).unwrap();
        prop_assert!(zero(&d(&d(&two).unwrap()).unwrap()));
    }

    #[test]
    fn lie_derivative_commutes_with_d(seed in any::<u64>(), n in 2usize..5) {
        let mut g = InstanceGen::new(seed);
        let c = chart(n);
        let x = g.vector(&c, 2);
        let alpha = g.one_form(&c, 2);
        let lhs = lie_derivative(&x, &d(&alpha).unwrap()).unwrap();
        let rhs = d(&lie_derivative(&x, &alpha).unwrap()).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn lie_derivative_leibniz(seed in any::<u64>(), n in 2usize..5) {
        let mut g = InstanceGen::new(seed);
        let c = chart(n);
        let x = g.vector(&c, 2);
        let a = g.bivector(&c, 1);
        let f = g.poly(&all_vars(&c), 2);
        let lhs = lie_derivative(&x, &a.scale(&f)).unwrap();
        let rhs = lie_derivative(&x, &a).unwrap().scale(&f).add(&a.scale(&x.apply(&f).unwrap())).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn pushforward_round_trip(seed in any::<u64>(), k in -3i64..4) {
        let mut g = InstanceGen::new(seed);
        let c = chart(3);
        let (x, y, z) = (ScalarExpr::var(0), ScalarExpr::var(1), ScalarExpr::var(2));
        let kk = ScalarExpr::int(k);
        let forward = vec![x.clone(), &y + &(&x * &x), &z + &(&kk * &(&x * &y))];
        let y0 = &y - &(&x * &x);
        let inverse = vec![x.clone(), y0.clone(), &z - &(&kk * &(&x * &y0))];
        let zt = ZeroTest::default();
        let psi = ChartMap::new(&c, &c, forward, Some(inverse), &zt).unwrap();
        let a = g.bivector(&c, 2);
        let there = psi.pushforward(&a, &zt).unwrap();
        let back = psi.inverted().unwrap().pushforward(&there, &zt).unwrap();
        prop_assert!(zero(&back.sub(&a).unwrap()));
    }

    #[test]
    fn mixed_partials_commute(seed in any::<u64>()) {
        let mut g = InstanceGen::new(seed);
        let vars = [0, 1, 2];
        let p = g.poly(&vars, 3);
        let q = ScalarExpr::int(2) + g.poly(&vars, 2) * g.poly(&vars, 2);
        let e = ScalarExpr::exp(&g.poly(&vars, 1)) * p.checked_div(&(q.clone() * q)).unwrap_or_else(|_| p.clone());
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let lhs = e.diff(i).diff(j);
            let rhs = e.diff(j).diff(i);
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn normal_form_is_canonical(seed in any::<u64>()) {
        let mut g = InstanceGen::new(seed);
        let vars = [0, 1, 2];
        let f = ScalarExpr::int(1) + g.poly(&vars, 2);
        let a = g.poly(&vars, 2);
        let b = ScalarExpr::int(5) + g.poly(&vars, 1);
        prop_assume!(!f.is_zero(&ZeroTest::default()).unwrap().is_zero());
        prop_assume!(!b.is_zero(&ZeroTest::default()).unwrap().is_zero());
        let lhs = (&f * &a).checked_div(&(&f * &b)).unwrap();
        let rhs = a.checked_div(&b).unwrap();
        prop_assert_eq!(&lhs, &rhs);
        prop_assert_eq!(&(&lhs + &ScalarExpr::zero()), &lhs);
        prop_assert_eq!(&(&lhs * &b), &a);
    }

    #[test]
    fn koszul_bracket_of_exact_forms(seed in any::<u64>()) {
        let mut g = InstanceGen::new(seed);
        let c = chart(3);
        let lambda = lie_poisson(&LieAlgebraSpec::so3(), &c).unwrap();
        let (f, h) = (g.poly(&all_vars(&c), 2), g.poly(&all_vars(&c), 2));
        let df = DifferentialForm::exact(&c, &f).unwrap();
        let dh = DifferentialForm::exact(&c, &h).unwrap();
        let lhs = koszul_bracket(&df, &dh, lambda.bivector()).unwrap();
        let rhs = DifferentialForm::exact(&c, &lambda.bracket(&f, &h).unwrap()).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
        prop_assert!(zero(&koszul_bracket(&df, &df, lambda.bivector()).unwrap()));
    }

    #[test]
    fn anchor_preserves_brackets(seed in any::<u64>()) {
        let mut g = InstanceGen::new(seed);
        let c = chart(3);
        let lambda = lie_poisson(&LieAlgebraSpec::so3(), &c).unwrap();
        let (a, b) = (g.one_form(&c, 1), g.one_form(&c, 1));
        let l = lambda.bivector();
        let lhs = l.contract(&koszul_bracket(&a, &b, l).unwrap()).unwrap();
        let rhs = schouten(&l.contract(&a).unwrap(), &l.contract(&b).unwrap()).unwrap();
        prop_assert!(zero(&lhs.sub(&rhs).unwrap()));
    }

    #[test]
    fn semidirect_lie_poisson_is_poisson(a in -3i64..4, b in -3i64..4, c in -3i64..4, e in -3i64..4) {
        // [e3, e1] = a e1 + c e2, [e3, e2] = b e1 + e e2
        let g = LieAlgebraSpec::from_brackets(
            3,
            &[(2, 0, vec![(0, rat(a)), (1, rat(c))]), (2, 1, vec![(0, rat(b)), (1, rat(e))])],
        )
        .unwrap();
        let pi = lie_poisson(&g, &chart(3)).unwrap();
        prop_assert!(pi.is_verified());
    }

    #[test]
    fn weighted_product_is_poisson_with_casimirs(seed in any::<u64>()) {
        let zt = ZeroTest::default();
        let mut gen = InstanceGen::new(seed);
        let torus = ChartSpec::new(&["u", "v"]).unwrap();
        let so3 = lie_poisson(&LieAlgebraSpec::so3(), &ChartSpec::new(&["x", "y", "z"]).unwrap()).unwrap();
        let r2 = (0..3).map(|i| ScalarExpr::var(i) * ScalarExpr::var(i)).sum::<ScalarExpr>();
        let f2 = ScalarExpr::int(1) + &r2 * &ScalarExpr::int(gen.int(1, 3)) + &r2 * &r2 * ScalarExpr::int(gen.int(0, 2));
        let f1 = ScalarExpr::int(2);
        let spec = WeightedProductSpec::new(
            PoissonFactor { structure: jacobi_check(&MultivectorField::basis(&torus, &[0, 1]).unwrap(), &zt).unwrap(), casimir: f1 },
            PoissonFactor { structure: so3, casimir: f2.clone() },
            &zt,
        )
        .unwrap();
        let pi = weighted_product(&spec, &zt).unwrap();
        prop_assert!(pi.is_verified());
        prop_assert!(casimir_check(&spec.pull2(&f2), &pi, &zt).unwrap().holds);
        let fc = FiberedChart::new(spec.chart(), 2).unwrap();
        prop_assert_eq!(fc.fiber_dim(), 3);
    }
}
