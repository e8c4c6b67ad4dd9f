//! Scenario registry, execution and certification reports for `cgb-verify`.

pub mod report;
pub mod scenarios;

use report::{Item, Provenance, ScenarioReport, SuiteReport};
use scenarios::{Config, Scenario};
use std::time::Instant;

/// `(name, description)` for every scenario exercising `module`, or all of
/// them, in registry order.
pub fn list_scenarios(module: Option<&str>) -> Vec<(&'static str, &'static str)> {
    scenarios::registry()
        .into_iter()
        .filter(|s| module.is_none_or(|m| s.exercises(m)))
        .map(|s| (s.name, s.description))
        .collect()
}

/// Runs one scenario. A library error becomes a single failing item
/// carrying the error text.
pub fn run_scenario(s: &Scenario, cfg: &Config) -> ScenarioReport {
    let t = Instant::now();
    let items = match (s.run)(cfg) {
        Ok(items) => items,
        Err(e) => vec![Item::failed(format!("error: {e}"), Provenance::Derived)],
    };
    ScenarioReport {
        name: s.name.to_string(),
        items,
        wall_ms: t.elapsed().as_millis() as u64,
    }
}

/// Runs scenarios on up to `jobs` threads; reports keep the input order.
pub fn run_all(list: &[Scenario], cfg: &Config, jobs: usize) -> SuiteReport {
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .expect("thread pool");
    let reports = pool.install(|| list.par_iter().map(|s| run_scenario(s, cfg)).collect());
    SuiteReport::new(cfg.seed, reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_filter_lists_nothing() {
        assert!(list_scenarios(Some("nonexistent")).is_empty());
        assert!(list_scenarios(Some("discrete")).len() < list_scenarios(None).len());
    }

    #[test]
    fn errors_become_failing_items() {
        let s = scenarios::find("odd-rank-point").unwrap();
        let r = run_scenario(
            &s,
            &Config {
                rank: Some(5),
                ..Config::default()
            },
        );
        assert!(!r.pass());
        assert!(r.items[0].identity.contains("configuration error"));
    }

    #[test]
    fn parallel_run_keeps_order() {
        let list: Vec<Scenario> = ["plane-frame", "discrete-duality", "symmetry-rotation"]
            .iter()
            .map(|n| scenarios::find(n).unwrap())
            .collect();
        let r = run_all(&list, &Config::default(), 3);
        let names: Vec<&str> = r.scenarios.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["plane-frame", "discrete-duality", "symmetry-rotation"]);
        assert!(r.pass());
    }
}
