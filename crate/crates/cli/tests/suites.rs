use msl_cli::catalog::catalog;
use msl_cli::scenario::{Outputs, Scenario, Suite};
use msl_cli::suites::run_scenario;
use serde_json::Map;
use std::collections::BTreeSet;

#[test]
fn every_suite_passes_and_covers_its_catalog() {
    for suite in Suite::ALL {
        let s = Scenario::new(suite.name(), suite, Map::new(), Outputs::default()).unwrap();
        let o = run_scenario(&s, 1.0);
        assert!(o.report.error.is_none(), "{}: {:?}", suite.name(), o.report.error);
        let failed: Vec<String> = o.report.failed().map(|a| a.label()).collect();
        assert!(failed.is_empty(), "{}: {failed:?}", suite.name());
        let info = catalog().iter().find(|c| c.suite == suite.name()).unwrap();
        let emitted: BTreeSet<&str> = o.report.assertions.iter().map(|a| a.name.as_str()).collect();
        let listed: BTreeSet<&str> = info.assertions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(emitted, listed, "{}", suite.name());
        let series: BTreeSet<&str> = o.series.keys().map(|k| k.as_str()).collect();
        let listed: BTreeSet<&str> = info.series.iter().map(|x| x.name.as_str()).collect();
        assert_eq!(series, listed, "{}", suite.name());
        for (name, s) in &o.series {
            assert!(!s.rows.is_empty(), "{name}");
            assert!(s.rows.iter().all(|r| r.len() == s.columns.len()), "{name}");
        }
    }
}
