//! The check suites. Each one fills a [`Ctx`] with assertions and plot series.

pub mod collapse;
pub mod conformal;
pub mod dehn;
pub mod identities;
pub mod sphere;

use crate::catalog::{suite_info, SuiteInfo};
use crate::report::{Assertion, Check, RunReport, Series, REPORT_SCHEMA_VERSION};
use crate::scenario::{Scenario, SuiteParams};
use msl_core::Result;
use std::collections::BTreeMap;
use std::time::Instant;

pub struct Ctx {
    info: &'static SuiteInfo,
    /// Multiplies every tolerance, never a physical bound.
    scale: f64,
    pub assertions: Vec<Assertion>,
    pub series: BTreeMap<String, Series>,
}

pub fn case(label: impl Into<String>) -> Option<String> {
    Some(label.into())
}

impl Ctx {
    pub fn new(info: &'static SuiteInfo, scale: f64) -> Self {
        Self {
            info,
            scale,
            assertions: vec![],
            series: BTreeMap::new(),
        }
    }

    fn push(&mut self, name: &str, case: Option<String>, check: Check, measured: f64, target: Option<f64>, bound: f64) {
        let anchor = &self
            .info
            .assertion(name)
            .unwrap_or_else(|| panic!("{}::{name} is not catalogued", self.info.suite))
            .anchor;
        self.assertions
            .push(Assertion::evaluate(name, case, anchor, check, measured, target, bound));
    }

    pub fn at_most(&mut self, name: &str, case: Option<String>, measured: f64, bound: f64) {
        self.push(name, case, Check::AtMost, measured, None, bound);
    }

    pub fn below(&mut self, name: &str, case: Option<String>, measured: f64, bound: f64) {
        self.push(name, case, Check::Below, measured, None, bound);
    }

    pub fn at_least(&mut self, name: &str, case: Option<String>, measured: f64, bound: f64) {
        self.push(name, case, Check::AtLeast, measured, None, bound);
    }

    pub fn above(&mut self, name: &str, case: Option<String>, measured: f64, bound: f64) {
        self.push(name, case, Check::Above, measured, None, bound);
    }

    /// `measured <= tol`, with the tolerance scaled.
    pub fn small(&mut self, name: &str, case: Option<String>, measured: f64, tol: f64) {
        self.push(name, case, Check::AtMost, measured, None, tol * self.scale);
    }

    /// `measured >= floor - tol`, with the tolerance scaled.
    pub fn at_least_within(&mut self, name: &str, case: Option<String>, measured: f64, floor: f64, tol: f64) {
        self.push(name, case, Check::AtLeast, measured, None, floor - tol * self.scale);
    }

    pub fn near(&mut self, name: &str, case: Option<String>, measured: f64, target: f64, tol: f64) {
        self.push(
            name,
            case,
            Check::AbsDeviation,
            measured,
            Some(target),
            tol * self.scale,
        );
    }

    pub fn near_rel(&mut self, name: &str, case: Option<String>, measured: f64, target: f64, tol: f64) {
        self.push(
            name,
            case,
            Check::RelDeviation,
            measured,
            Some(target),
            tol * self.scale,
        );
    }

    pub fn series(&mut self, name: &str, rows: Vec<Vec<f64>>) {
        let info = self
            .info
            .series(name)
            .unwrap_or_else(|| panic!("{}::{name} is not a catalogued series", self.info.suite));
        self.series.insert(
            name.to_string(),
            Series {
                columns: info.columns.clone(),
                rows,
            },
        );
    }
}

pub struct Outcome {
    pub report: RunReport,
    pub series: BTreeMap<String, Series>,
}

fn dispatch(params: &SuiteParams, ctx: &mut Ctx) -> Result<()> {
    match params {
        SuiteParams::DehnFill(p) => dehn::run(p, ctx),
        SuiteParams::SphereCaseI(p) => sphere::run_case_i(p, ctx),
        SuiteParams::SphereCaseII(p) => sphere::run_case_ii(p, ctx),
        SuiteParams::SchwarzschildIdentities(p) => identities::run_schwarzschild(p, ctx),
        SuiteParams::CuspIdentities(p) => identities::run_cusp(p, ctx),
        SuiteParams::FunctionalIdentities(p) => identities::run_functionals(p, ctx),
        SuiteParams::Collapse(p) => collapse::run(p, ctx),
        SuiteParams::Residuals(p) => identities::run_residuals(p, ctx),
        SuiteParams::Conformal(p) => conformal::run(p, ctx),
    }
}

/// Runs one scenario. Computational errors end the suite and are recorded
/// in the report instead of the assertions that could not be evaluated.
pub fn run_scenario(scenario: &Scenario, tolerance_scale: f64) -> Outcome {
    let start = Instant::now();
    let info = suite_info(scenario.suite.name()).expect("every suite is catalogued");
    let mut ctx = Ctx::new(info, tolerance_scale);
    let error = dispatch(&scenario.params, &mut ctx).err().map(|e| e.to_string());
    let pass = error.is_none() && ctx.assertions.iter().all(|a| a.pass);
    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        scenario_id: scenario.id.clone(),
        suite: scenario.suite.name().to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: scenario.digest(),
        tolerance_scale,
        pass,
        error,
        assertions: ctx.assertions,
        series: ctx.series.keys().cloned().collect(),
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    Outcome {
        report,
        series: ctx.series,
    }
}

/// Index and value of the smallest entry.
pub fn argmin(v: &[f64]) -> (usize, f64) {
    v.iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (k, x)| if *x < acc.1 { (k, *x) } else { acc })
}

pub fn max_abs<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    it.into_iter()
        .fold(0.0, |a, x| if x.abs() > a || x.is_nan() { x.abs() } else { a })
}

/// Formats a float for assertion case labels.
pub fn label(name: &str, v: f64) -> Option<String> {
    case(format!("{name}={v}"))
}
