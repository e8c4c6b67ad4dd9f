//! Report records, the JSON schema and the aligned text table.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;
use std::path::Path;

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Trivial,
    Derived,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub identity: String,
    pub computed: f64,
    pub expected: f64,
    pub error: f64,
    pub tol: f64,
    pub provenance: Provenance,
    pub pass: bool,
}

impl Item {
    pub fn new(identity: impl Into<String>, computed: f64, expected: f64, tol: f64, provenance: Provenance) -> Item {
        let error = (computed - expected).abs();
        Item {
            identity: identity.into(),
            computed,
            expected,
            error,
            tol,
            provenance,
            // NaN errors compare false and fail.
            pass: error <= tol,
        }
    }

    /// A residual that should vanish.
    pub fn residual(identity: impl Into<String>, residual: f64, tol: f64, provenance: Provenance) -> Item {
        Item::new(identity, residual, 0.0, tol, provenance)
    }

    /// A scenario that stopped with a library error.
    pub fn failed(identity: impl Into<String>, provenance: Provenance) -> Item {
        Item {
            identity: identity.into(),
            computed: f64::NAN,
            expected: 0.0,
            error: f64::INFINITY,
            tol: 0.0,
            provenance,
            pass: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub name: String,
    pub items: Vec<Item>,
    pub wall_ms: u64,
}

impl ScenarioReport {
    pub fn pass(&self) -> bool {
        self.items.iter().all(|i| i.pass)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub items_total: usize,
    pub items_passed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub scenarios: Vec<ScenarioReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn new(seed: u64, scenarios: Vec<ScenarioReport>) -> SuiteReport {
        let passed = scenarios.iter().filter(|s| s.pass()).count();
        let items_total = scenarios.iter().map(|s| s.items.len()).sum();
        let items_passed = scenarios.iter().flat_map(|s| &s.items).filter(|i| i.pass).count();
        SuiteReport {
            suite: "cgb-verify".into(),
            seed,
            summary: Summary {
                total: scenarios.len(),
                passed,
                failed: scenarios.len() - passed,
                items_total,
                items_passed,
            },
            scenarios,
        }
    }

    pub fn pass(&self) -> bool {
        self.summary.failed == 0
    }

    /// `scenario: identity` for every failing item.
    pub fn failures(&self) -> Vec<String> {
        self.scenarios
            .iter()
            .flat_map(|s| {
                s.items
                    .iter()
                    .filter(|i| !i.pass)
                    .map(move |i| format!("{}: {}", s.name, i.identity))
            })
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_json(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json() + "\n")
    }

    pub fn to_text(&self) -> String {
        let header = [
            "scenario", "identity", "computed", "expected", "error", "tol", "source", "result",
        ];
        let mut rows: Vec<[String; 8]> = Vec::new();
        for s in &self.scenarios {
            for i in &s.items {
                rows.push([
                    s.name.clone(),
                    i.identity.clone(),
                    format!("{:.10e}", i.computed),
                    format!("{:.10e}", i.expected),
                    format!("{:.2e}", i.error),
                    format!("{:.0e}", i.tol),
                    format!("{:?}", i.provenance).to_lowercase(),
                    if i.pass { "pass" } else { "FAIL" }.into(),
                ]);
            }
        }
        let mut width = header.map(|h| h.chars().count());
        for r in &rows {
            for (w, c) in width.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: Vec<&str>| {
            let mut first = true;
            for (c, w) in cells.iter().zip(width) {
                if !first {
                    out.push_str("  ");
                }
                first = false;
                let pad = w - c.chars().count();
                out.push_str(c);
                out.push_str(&" ".repeat(pad));
            }
            let trimmed = out.trim_end().len();
            out.truncate(trimmed);
            out.push('\n');
        };
        line(&mut out, header.to_vec());
        for r in &rows {
            line(&mut out, r.iter().map(String::as_str).collect());
        }
        let s = &self.summary;
        let _ = writeln!(
            out,
            "{} of {} scenarios passed ({} of {} items), seed {}",
            s.passed, s.total, s.items_passed, s.items_total, self.seed
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scenario(name: &str, pass: bool) -> ScenarioReport {
        ScenarioReport {
            name: name.into(),
            items: vec![Item::new(
                "x",
                if pass { 1.0 } else { 2.0 },
                1.0,
                1e-8,
                Provenance::Trivial,
            )],
            wall_ms: 3,
        }
    }

    #[test]
    fn empty_suite_is_valid_json() {
        let r = SuiteReport::new(0, vec![]);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["summary"]["total"], 0);
        assert!(r.pass());
    }

    #[test]
    fn mixed_summary_counts() {
        let r = SuiteReport::new(1, vec![scenario("a", true), scenario("b", false), scenario("c", true)]);
        assert_eq!(r.summary.passed, 2);
        assert_eq!(r.summary.failed, 1);
        assert_eq!(r.summary.items_total, 3);
        assert_eq!(r.failures(), vec!["b: x".to_string()]);
    }

    #[test]
    fn provenance_serializes_lowercase() {
        let s = serde_json::to_string(&Provenance::Derived).unwrap();
        assert_eq!(s, "\"derived\"");
    }

    #[test]
    fn nan_item_fails() {
        assert!(!Item::new("n", f64::NAN, 0.0, 1.0, Provenance::Paper).pass);
        assert!(!Item::failed("e", Provenance::Paper).pass);
    }

    #[test]
    fn text_table_is_aligned() {
        let t = SuiteReport::new(2, vec![scenario("long-name", true), scenario("b", false)]).to_text();
        let lines: Vec<&str> = t.lines().collect();
        let col = lines[0].find("identity").unwrap();
        assert_eq!(lines[1].chars().nth(col), Some('x'));
        assert!(t.contains("FAIL"));
    }
}
