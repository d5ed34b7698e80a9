//! Seeded random instances for the identity oracles and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chart::ChartSpec;
use crate::coupling::{base_two_form, EhresmannConnection, FiberedChart, GeometricData};
use crate::error::Result;
use crate::expr::{ScalarExpr, ZeroTest};
use crate::multivec::{DifferentialForm, MultivectorField};

/// Deterministic generator of sparse integer polynomials and fields.
pub struct InstanceGen(ChaCha8Rng);

impl InstanceGen {
    pub fn new(seed: u64) -> Self {
        InstanceGen(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn int(&mut self, lo: i64, hi: i64) -> i64 {
        self.0.gen_range(lo..=hi)
    }

    /// Up to three terms of total degree at most `deg` in `vars`, integer
    /// coefficients in `[-3, 3]`.
    pub fn poly(&mut self, vars: &[usize], deg: u32) -> ScalarExpr {
        let mut out = ScalarExpr::zero();
        for _ in 0..self.int(1, 3) {
            let mut t = ScalarExpr::int(self.int(-3, 3));
            if !vars.is_empty() {
                for _ in 0..self.int(0, i64::from(deg)) {
                    t = t * ScalarExpr::var(vars[self.int(0, vars.len() as i64 - 1) as usize]);
                }
            }
            out = out + t;
        }
        out
    }

    pub fn bivector(&mut self, chart: &ChartSpec, deg: u32) -> MultivectorField {
        let vars: Vec<usize> = (0..chart.dim()).collect();
        let mut out = MultivectorField::zero(chart, 2);
        for i in 0..chart.dim() {
            for j in i + 1..chart.dim() {
                out.add_component(&[i, j], self.poly(&vars, deg)).expect("in range");
            }
        }
        out
    }

    pub fn one_form(&mut self, chart: &ChartSpec, deg: u32) -> DifferentialForm {
        let vars: Vec<usize> = (0..chart.dim()).collect();
        let comps: Vec<ScalarExpr> = (0..chart.dim()).map(|_| self.poly(&vars, deg)).collect();
        DifferentialForm::covector(chart, &comps).expect("in range")
    }

    pub fn vector(&mut self, chart: &ChartSpec, deg: u32) -> MultivectorField {
        let vars: Vec<usize> = (0..chart.dim()).collect();
        let comps: Vec<ScalarExpr> = (0..chart.dim()).map(|_| self.poly(&vars, deg)).collect();
        MultivectorField::vector(chart, &comps).expect("in range")
    }

    pub fn connection(&mut self, fc: &FiberedChart, deg: u32) -> EhresmannConnection {
        let vars: Vec<usize> = (0..fc.chart().dim()).collect();
        let gamma = (0..fc.fiber_dim())
            .map(|_| (0..fc.base_dim()).map(|_| self.poly(&vars, deg)).collect())
            .collect();
        EhresmannConnection::new(fc, gamma).expect("shape matches")
    }

    /// Conormal section `sum_a c_a(q) dy_a`.
    pub fn conormal_section(&mut self, fc: &FiberedChart, deg: u32) -> DifferentialForm {
        let base: Vec<usize> = (0..fc.base_dim()).collect();
        let mut comps = vec![ScalarExpr::zero(); fc.chart().dim()];
        for a in fc.fiber_vars() {
            comps[a] = self.poly(&base, deg);
        }
        DifferentialForm::covector(fc.chart(), &comps).expect("in range")
    }

    /// Data on `(q1..q4 | y)`: random connection, `nu = 0` and
    /// `phi = dq1^dq2 + dq3^dq4 + y C` with `C` a random constant form.
    pub fn four_base_data(&mut self, zt: &ZeroTest) -> Result<GeometricData> {
        let fc = FiberedChart::from_names(&["q1", "q2", "q3", "q4"], &["y"])?;
        let conn = self.connection(&fc, 2);
        let y = ScalarExpr::var(4);
        let mut entries = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                let sympl = if (i, j) == (0, 1) || (i, j) == (2, 3) { 1 } else { 0 };
                let c = ScalarExpr::int(sympl) + ScalarExpr::int(self.int(-2, 2)) * y.clone();
                entries.push(((i, j), c));
            }
        }
        let phi = base_two_form(&fc, &entries)?;
        GeometricData::new(conn, MultivectorField::zero(fc.chart(), 2), phi, zt)
    }

    /// Data on `(q1, q2 | y1..yk)`: random connection and vertical `nu`,
    /// `phi_12 = 1 + sum_a y_a p_a` with `p_a` affine.
    pub fn two_base_data(&mut self, fibers: usize, zt: &ZeroTest) -> Result<GeometricData> {
        let fiber_names: Vec<String> = (1..=fibers).map(|a| format!("y{a}")).collect();
        let fiber_refs: Vec<&str> = fiber_names.iter().map(String::as_str).collect();
        let fc = FiberedChart::from_names(&["q1", "q2"], &fiber_refs)?;
        let vars: Vec<usize> = (0..fc.chart().dim()).collect();
        let conn = self.connection(&fc, 2);
        let mut nu = MultivectorField::zero(fc.chart(), 2);
        for a in 0..fibers {
            for b in a + 1..fibers {
                nu.add_component(&[fc.fiber(a), fc.fiber(b)], self.poly(&vars, 2))?;
            }
        }
        let mut p = ScalarExpr::one();
        for a in fc.fiber_vars() {
            p = p + ScalarExpr::var(a) * self.poly(&vars, 1);
        }
        let phi = base_two_form(&fc, &[((0, 1), p)])?;
        GeometricData::new(conn, nu, phi, zt)
    }
}
