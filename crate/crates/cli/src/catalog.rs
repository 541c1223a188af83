//! Static description of every suite: its assertions with their anchors and
//! the plot series it can emit.

use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AssertionInfo {
    pub name: String,
    pub anchor: String,
    pub reproduces: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesInfo {
    pub name: String,
    pub columns: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteInfo {
    pub suite: String,
    pub summary: String,
    pub series: Vec<SeriesInfo>,
    pub assertions: Vec<AssertionInfo>,
}

impl SuiteInfo {
    pub fn assertion(&self, name: &str) -> Option<&AssertionInfo> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn series(&self, name: &str) -> Option<&SeriesInfo> {
        self.series.iter().find(|s| s.name == name)
    }
}

pub fn catalog() -> &'static [SuiteInfo] {
    static CATALOG: OnceLock<Vec<SuiteInfo>> = OnceLock::new();
    CATALOG.get_or_init(|| serde_json::from_str(include_str!("catalog.json")).expect("embedded catalog is valid JSON"))
}

pub fn suite_info(name: &str) -> Option<&'static SuiteInfo> {
    catalog().iter().find(|s| s.suite == name)
}

/// Human-readable listing.
pub fn render() -> String {
    let mut out = String::new();
    for s in catalog() {
        out.push_str(&format!("{}: {}\n", s.suite, s.summary));
        for a in &s.assertions {
            out.push_str(&format!("  {:<28} [{}] {}\n", a.name, a.anchor, a.reproduces));
        }
        if !s.series.is_empty() {
            let names: Vec<&str> = s.series.iter().map(|x| x.name.as_str()).collect();
            out.push_str(&format!("  series: {}\n", names.join(", ")));
        }
    }
    out.push_str(&format!("{} suites\n", catalog().len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_suites_with_anchored_assertions() {
        assert_eq!(catalog().len(), 9);
        for s in catalog() {
            assert!(!s.assertions.is_empty());
            for a in &s.assertions {
                assert!(!a.anchor.is_empty(), "{}::{}", s.suite, a.name);
            }
        }
    }

    #[test]
    fn listing_names_key_anchors() {
        let r = render();
        for anchor in ["[2.51]", "[3.8]", "[3.22]"] {
            assert!(r.contains(anchor), "{anchor}");
        }
    }
}
