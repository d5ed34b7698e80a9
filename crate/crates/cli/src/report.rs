//! Check reports in aligned text or JSON.

use std::fmt::Write;
use std::time::Duration;

use poisson_core::{Check, ChartSpec, Regime};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessOut {
    pub label: String,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub check: String,
    /// What the check corresponds to in the theory.
    pub anchor: String,
    pub verdict: Verdict,
    pub regime: &'static str,
    pub witnesses: Vec<WitnessOut>,
    pub details: Vec<(String, String)>,
    pub millis: f64,
}

impl Entry {
    pub fn new(check: impl Into<String>, anchor: impl Into<String>, verdict: Verdict, regime: Regime) -> Self {
        Entry {
            check: check.into(),
            anchor: anchor.into(),
            verdict,
            regime: regime.as_str(),
            witnesses: Vec::new(),
            details: Vec::new(),
            millis: 0.0,
        }
    }

    /// Entry mirroring a core check; witness values use `chart` names.
    pub fn from_check(check: impl Into<String>, anchor: impl Into<String>, c: &Check, chart: &ChartSpec) -> Self {
        let verdict = if c.holds { Verdict::Pass } else { Verdict::Fail };
        let mut e = Entry::new(check, anchor, verdict, c.regime);
        for w in &c.witnesses {
            e.witness(&w.label, &chart.render(&w.value));
        }
        e
    }

    pub fn witness(&mut self, label: &str, value: &str) -> &mut Self {
        self.witnesses.push(WitnessOut {
            label: label.into(),
            value: value.into(),
        });
        self
    }

    pub fn detail(mut self, key: &str, value: impl Into<String>) -> Self {
        self.details.push((key.into(), value.into()));
        self
    }

    pub fn timed(mut self, d: Duration) -> Self {
        self.millis = d.as_secs_f64() * 1e3;
        self
    }

    /// Failed entries must name at least one witness.
    fn normalized(mut self) -> Self {
        if self.verdict == Verdict::Fail && self.witnesses.is_empty() {
            self.witnesses.push(WitnessOut {
                label: "verdict".into(),
                value: "failed without a recorded component".into(),
            });
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub samples: usize,
    pub epsilon: f64,
    pub parallel: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub settings: Settings,
    pub entries: Vec<Entry>,
}

impl Report {
    pub fn new(command: impl Into<String>, settings: Settings) -> Self {
        Report {
            command: command.into(),
            settings,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, e: Entry) {
        self.entries.push(e.normalized());
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.verdict == Verdict::Pass)
    }

    pub fn entry(&self, check: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.check == check)
    }

    /// 0 when everything passes, 1 on any failure, otherwise 3.
    pub fn exit_code(&self) -> i32 {
        if self.entries.iter().any(|e| e.verdict == Verdict::Fail) {
            1
        } else if self.entries.iter().any(|e| e.verdict == Verdict::Inconclusive) {
            3
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let s = &self.settings;
        let _ = writeln!(
            out,
            "{}  (seed {}, samples {}, epsilon {:e}, parallel {})",
            self.command,
            s.seed,
            s.samples,
            s.epsilon,
            if s.parallel { "on" } else { "off" }
        );
        let width = self.entries.iter().map(|e| e.check.chars().count()).max().unwrap_or(0);
        for e in &self.entries {
            let _ = writeln!(
                out,
                "{:<12} {:<7}  {:<width$}  {:>9.1} ms",
                e.verdict.label(),
                e.regime,
                e.check,
                e.millis
            );
            let _ = writeln!(out, "{:21}{}", "", e.anchor);
            for (k, v) in &e.details {
                let _ = writeln!(out, "{:21}{k}: {v}", "");
            }
            for w in &e.witnesses {
                let _ = writeln!(out, "{:21}witness {}: {}", "", w.label, w.value);
            }
        }
        let count = |v: Verdict| self.entries.iter().filter(|e| e.verdict == v).count();
        let _ = writeln!(
            out,
            "{} passed, {} failed, {} inconclusive",
            count(Verdict::Pass),
            count(Verdict::Fail),
            count(Verdict::Inconclusive)
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn settings() -> Settings {
        Settings {
            seed: 1,
            samples: 64,
            epsilon: 1e-9,
            parallel: false,
        }
    }

    #[test]
    fn failures_always_carry_a_witness() {
        let mut r = Report::new("t", settings());
        r.push(Entry::new("c", "a", Verdict::Fail, Regime::Exact));
        assert_eq!(r.entries[0].witnesses.len(), 1);
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn inconclusive_exit_code() {
        let mut r = Report::new("t", settings());
        r.push(Entry::new("c", "a", Verdict::Pass, Regime::Exact));
        r.push(Entry::new("d", "a", Verdict::Inconclusive, Regime::Numeric));
        assert_eq!(r.exit_code(), 3);
        assert!(r.to_json().contains("\"inconclusive\""));
        assert!(r.to_text().contains("1 passed, 0 failed, 1 inconclusive"));
    }
}
