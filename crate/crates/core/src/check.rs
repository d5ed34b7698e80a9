//! Aggregated verdicts over many zero tests.

use rayon::prelude::*;

use crate::error::Result;
use crate::expr::{ScalarExpr, ZeroTest, ZeroVerdict};

/// Which zero-testing regime decided a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Exact,
    Numeric,
}

impl Regime {
    pub fn join(self, other: Regime) -> Regime {
        if self == Regime::Numeric || other == Regime::Numeric {
            Regime::Numeric
        } else {
            Regime::Exact
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Exact => "exact",
            Regime::Numeric => "numeric",
        }
    }
}

/// A labelled nonzero value found by a failed check.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub label: String,
    pub value: ScalarExpr,
}

/// Result of asserting that a family of expressions vanishes.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub holds: bool,
    pub regime: Regime,
    pub witnesses: Vec<Witness>,
}

impl Check {
    pub fn pass() -> Self {
        Check {
            holds: true,
            regime: Regime::Exact,
            witnesses: Vec::new(),
        }
    }

    /// Tests every expression; the labels name failing entries.
    pub fn all_zero<I>(items: I, zt: &ZeroTest) -> Result<Check>
    where
        I: IntoIterator<Item = (String, ScalarExpr)>,
    {
        let items: Vec<(String, ScalarExpr)> = items.into_iter().collect();
        let verdicts: Vec<Result<ZeroVerdict>> = if zt.parallel && items.len() > 1 {
            items.par_iter().map(|(_, e)| e.is_zero(zt)).collect()
        } else {
            items.iter().map(|(_, e)| e.is_zero(zt)).collect()
        };
        let mut out = Check::pass();
        for ((label, value), v) in items.into_iter().zip(verdicts) {
            let v = v?;
            if !v.is_exact() || (v == ZeroVerdict::ProvenNonzero && !value.is_rational_function()) {
                out.regime = Regime::Numeric;
            }
            if !v.is_zero() {
                out.holds = false;
                out.witnesses.push(Witness { label, value });
            }
        }
        Ok(out)
    }

    pub fn and(mut self, other: Check) -> Check {
        self.holds &= other.holds;
        self.regime = self.regime.join(other.regime);
        self.witnesses.extend(other.witnesses);
        self
    }
}
