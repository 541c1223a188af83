//! Scenario files: loading, validation against the suite's parameter schema
//! and canonical digests.

use crate::error::{CliError, Result};
use crate::suites::{collapse, conformal, dehn, identities, sphere};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};
use std::collections::BTreeSet;
use std::path::Path;

pub const SCENARIO_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Suite {
    DehnFill,
    SphereCaseI,
    SphereCaseII,
    SchwarzschildIdentities,
    CuspIdentities,
    FunctionalIdentities,
    Collapse,
    Residuals,
    Conformal,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::DehnFill,
        Suite::SphereCaseI,
        Suite::SphereCaseII,
        Suite::SchwarzschildIdentities,
        Suite::CuspIdentities,
        Suite::FunctionalIdentities,
        Suite::Collapse,
        Suite::Residuals,
        Suite::Conformal,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DehnFill => "dehn_fill",
            Suite::SphereCaseI => "sphere_case_i",
            Suite::SphereCaseII => "sphere_case_ii",
            Suite::SchwarzschildIdentities => "schwarzschild_identities",
            Suite::CuspIdentities => "cusp_identities",
            Suite::FunctionalIdentities => "functional_identities",
            Suite::Collapse => "collapse",
            Suite::Residuals => "residuals",
            Suite::Conformal => "conformal",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|s| s.name() == name)
            .ok_or_else(|| CliError::UnknownSuite(name.to_string()))
    }
}

/// Typed parameter records, one per suite.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SuiteParams {
    DehnFill(dehn::Params),
    SphereCaseI(sphere::CaseIParams),
    SphereCaseII(sphere::CaseIIParams),
    SchwarzschildIdentities(identities::SchwarzschildParams),
    CuspIdentities(identities::CuspParams),
    FunctionalIdentities(identities::FunctionalParams),
    Collapse(collapse::Params),
    Residuals(identities::ResidualParams),
    Conformal(conformal::Params),
}

/// Parameter records validate their own values beyond the schema.
pub trait Validate {
    fn validate(&self) -> std::result::Result<(), String>;
}

fn typed<P: DeserializeOwned + Serialize + Validate>(suite: Suite, params: Map<String, Value>) -> Result<P> {
    let invalid = |detail: String| CliError::InvalidParams {
        suite: suite.name().to_string(),
        detail,
    };
    let p: P = serde_json::from_value(Value::Object(params)).map_err(|e| invalid(e.to_string()))?;
    let v = serde_json::to_value(&p).expect("parameters serialize");
    if let Some(Value::Object(tols)) = v.get("tolerances") {
        for (k, t) in tols {
            match t.as_f64() {
                Some(x) if x > 0.0 && x.is_finite() => {}
                _ => return Err(invalid(format!("tolerance `{k}` must be a positive number, got {t}"))),
            }
        }
    }
    p.validate().map_err(invalid)?;
    Ok(p)
}

impl SuiteParams {
    pub fn parse(suite: Suite, params: Map<String, Value>) -> Result<Self> {
        Ok(match suite {
            Suite::DehnFill => SuiteParams::DehnFill(typed(suite, params)?),
            Suite::SphereCaseI => SuiteParams::SphereCaseI(typed(suite, params)?),
            Suite::SphereCaseII => SuiteParams::SphereCaseII(typed(suite, params)?),
            Suite::SchwarzschildIdentities => SuiteParams::SchwarzschildIdentities(typed(suite, params)?),
            Suite::CuspIdentities => SuiteParams::CuspIdentities(typed(suite, params)?),
            Suite::FunctionalIdentities => SuiteParams::FunctionalIdentities(typed(suite, params)?),
            Suite::Collapse => SuiteParams::Collapse(typed(suite, params)?),
            Suite::Residuals => SuiteParams::Residuals(typed(suite, params)?),
            Suite::Conformal => SuiteParams::Conformal(typed(suite, params)?),
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Plot series written next to the report by `run`.
    #[serde(default)]
    pub series: Vec<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema_version: u32,
    id: String,
    check: String,
    #[serde(default)]
    params: Map<String, Value>,
    #[serde(default)]
    outputs: Outputs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBatch {
    schema_version: u32,
    scenarios: Vec<Value>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub id: String,
    pub suite: Suite,
    pub params: SuiteParams,
    pub outputs: Outputs,
}

#[derive(Serialize)]
struct Canonical<'a> {
    schema_version: u32,
    id: &'a str,
    check: &'a str,
    params: &'a SuiteParams,
    outputs: &'a Outputs,
}

impl Scenario {
    pub fn new(id: &str, suite: Suite, params: Map<String, Value>, outputs: Outputs) -> Result<Self> {
        check_id(id)?;
        let params = SuiteParams::parse(suite, params)?;
        let s = Self {
            id: id.to_string(),
            suite,
            params,
            outputs,
        };
        s.check_series(&s.outputs.series)?;
        Ok(s)
    }

    /// The scenario with every default filled in, as compact JSON.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(&Canonical {
            schema_version: SCENARIO_SCHEMA_VERSION,
            id: &self.id,
            check: self.suite.name(),
            params: &self.params,
            outputs: &self.outputs,
        })
        .expect("scenarios serialize")
    }

    pub fn digest(&self) -> String {
        Sha256::digest(self.canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn check_series(&self, names: &[String]) -> Result<()> {
        let info = crate::catalog::suite_info(self.suite.name()).expect("every suite is catalogued");
        for n in names {
            if info.series(n).is_none() {
                return Err(CliError::UnknownSeries {
                    suite: self.suite.name().to_string(),
                    series: n.clone(),
                });
            }
        }
        Ok(())
    }
}

fn check_id(id: &str) -> Result<()> {
    let ok =
        !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c)) && !id.starts_with('.');
    if ok {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "scenario id `{id}` must be non-empty and use only letters, digits, '-', '_' and '.'"
        )))
    }
}

fn check_version(v: u32) -> Result<()> {
    if v == SCENARIO_SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::Parse(format!(
            "unsupported schema_version {v}; expected {SCENARIO_SCHEMA_VERSION}"
        )))
    }
}

fn from_value(v: Value) -> Result<Scenario> {
    let raw: RawScenario = serde_json::from_value(v).map_err(|e| CliError::Parse(e.to_string()))?;
    check_version(raw.schema_version)?;
    let suite = Suite::from_name(&raw.check)?;
    Scenario::new(&raw.id, suite, raw.params, raw.outputs)
}

/// Parses a single scenario or a batch `{"schema_version": 1, "scenarios": [...]}`.
pub fn parse_scenarios(text: &str) -> Result<Vec<Scenario>> {
    let v: Value = serde_json::from_str(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if v.get("scenarios").is_some() {
        let batch: RawBatch = serde_json::from_value(v).map_err(|e| CliError::Parse(e.to_string()))?;
        check_version(batch.schema_version)?;
        batch.scenarios.into_iter().map(from_value).collect()
    } else {
        Ok(vec![from_value(v)?])
    }
}

pub fn load(path: &Path) -> Result<Vec<Scenario>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenarios(&text)
}

/// Rejects repeated ids so reports do not overwrite each other.
pub fn check_unique(scenarios: &[Scenario]) -> Result<()> {
    let mut seen = BTreeSet::new();
    for s in scenarios {
        if !seen.insert(s.id.as_str()) {
            return Err(CliError::Parse(format!("duplicate scenario id `{}`", s.id)));
        }
    }
    Ok(())
}
