//! Command-line front end.

use crate::catalog;
use crate::error::{CliError, Result};
use crate::report::write_file;
use crate::scenario::{self, Outputs, Scenario, Suite};
use crate::suites::{run_scenario, Outcome};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde_json::{Map, Value};
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

#[derive(Parser, Debug)]
#[command(
    name = "msl",
    version,
    about = "Verification suites for reduced 3-metrics and their surgeries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run suites and write `<id>.report.json` (plus requested series) to the output directory.
    Run {
        #[command(flatten)]
        select: Selection,
        /// Scenarios run in parallel up to this many at a time.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Multiplies every tolerance; physical bounds are unaffected.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
    /// Print every suite with its assertions and anchors.
    ListSuites {
        #[arg(long)]
        json: bool,
    },
    /// Run suites and write only the selected plot series as CSV.
    EmitPlots {
        #[command(flatten)]
        select: Selection,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args, Debug)]
struct Selection {
    /// Run a suite with default parameters and any inline overrides.
    #[arg(long, conflicts_with = "scenario", required_unless_present = "scenario")]
    suite: Option<String>,
    /// Scenario file: one scenario or a batch. May be repeated.
    #[arg(long)]
    scenario: Vec<PathBuf>,
    /// Id of an inline scenario; defaults to the suite name.
    #[arg(long, requires = "suite")]
    id: Option<String>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Comma-separated plot series.
    #[arg(long, value_delimiter = ',')]
    series: Vec<String>,
    #[arg(long, requires = "suite", allow_hyphen_values = true)]
    t0: Option<f64>,
    #[arg(long, requires = "suite")]
    mass: Option<f64>,
    /// Collapse parameter.
    #[arg(long, requires = "suite")]
    eps: Option<f64>,
    /// Weight of `Z^2` in `I_eps^-`.
    #[arg(long, requires = "suite")]
    epsilon: Option<f64>,
    #[arg(long, requires = "suite")]
    lambda: Option<f64>,
    #[arg(long, requires = "suite", allow_hyphen_values = true)]
    cos_angle: Option<f64>,
    /// Single surgery radius.
    #[arg(long, requires = "suite")]
    radius: Option<f64>,
    /// Any parameter as `key=json`, e.g. `--param 't0_sweep=[3,5]'`.
    #[arg(long = "param", requires = "suite")]
    params: Vec<String>,
}

impl Selection {
    fn inline_params(&self) -> Result<Map<String, Value>> {
        let mut m = Map::new();
        let num = |v: f64| {
            serde_json::Number::from_f64(v)
                .map(Value::Number)
                .ok_or_else(|| CliError::Parse(format!("{v} is not finite")))
        };
        for (k, v) in [
            ("t0", self.t0),
            ("mass", self.mass),
            ("eps", self.eps),
            ("epsilon", self.epsilon),
            ("lambda", self.lambda),
            ("cos_angle", self.cos_angle),
        ] {
            if let Some(v) = v {
                m.insert(k.into(), num(v)?);
            }
        }
        if let Some(r) = self.radius {
            m.insert("radii".into(), Value::Array(vec![num(r)?]));
        }
        for kv in &self.params {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| CliError::Parse(format!("--param `{kv}` is not key=value")))?;
            let value = serde_json::from_str(v).unwrap_or_else(|_| Value::String(v.to_string()));
            m.insert(k.trim().to_string(), value);
        }
        Ok(m)
    }

    fn scenarios(&self) -> Result<Vec<Scenario>> {
        let list = match &self.suite {
            Some(name) => {
                let suite = Suite::from_name(name)?;
                let id = self.id.clone().unwrap_or_else(|| suite.name().to_string());
                vec![Scenario::new(&id, suite, self.inline_params()?, Outputs::default())?]
            }
            None => {
                let mut all = Vec::new();
                for p in &self.scenario {
                    all.extend(scenario::load(p)?);
                }
                all
            }
        };
        scenario::check_unique(&list)?;
        for s in &list {
            s.check_series(&self.series)?;
        }
        Ok(list)
    }
}

fn run_all(scenarios: &[Scenario], jobs: usize, scale: f64) -> Result<Vec<Outcome>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Parse(format!("cannot start {jobs} workers: {e}")))?;
    let mut out: Vec<Outcome> = pool.install(|| scenarios.par_iter().map(|s| run_scenario(s, scale)).collect());
    out.sort_by(|a, b| a.report.scenario_id.cmp(&b.report.scenario_id));
    Ok(out)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.display().to_string(),
        source,
    })
}

fn write_series(dir: &Path, outcome: &Outcome, names: &[String]) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for name in names {
        if let Some(s) = outcome.series.get(name) {
            let path = dir.join(format!("{}.{}.csv", outcome.report.scenario_id, name));
            write_file(&path, &s.to_csv())?;
            written.push(path);
        }
    }
    Ok(written)
}

fn cmd_run(select: &Selection, jobs: usize, scale: f64, out: &mut dyn Write) -> Result<i32> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(CliError::Parse(format!("--tolerance-scale {scale} must be positive")));
    }
    let scenarios = select.scenarios()?;
    ensure_dir(&select.out)?;
    let outcomes = run_all(&scenarios, jobs, scale)?;
    let mut code = 0;
    for (o, s) in outcomes.iter().zip(sorted(&scenarios)) {
        let r = &o.report;
        write_file(&select.out.join(format!("{}.report.json", r.scenario_id)), &r.to_json())?;
        let mut names = s.outputs.series.clone();
        names.extend(select.series.iter().cloned());
        write_series(&select.out, o, &names)?;
        let passed = r.assertions.iter().filter(|a| a.pass).count();
        let status = if r.error.is_some() {
            "ERROR"
        } else if r.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let _ = writeln!(
            out,
            "{status} {} ({}) {passed}/{} assertions in {:.3} s",
            r.scenario_id,
            r.suite,
            r.assertions.len(),
            r.wall_time_s
        );
        for a in r.failed() {
            let _ = writeln!(
                out,
                "  failed {} [{}]: measured {:e}, bound {:e}, margin {:e}",
                a.label(),
                a.anchor,
                a.measured,
                a.bound,
                a.margin
            );
        }
        if let Some(e) = &r.error {
            let _ = writeln!(out, "  error: {e}");
            code = 3;
        } else if !r.pass && code == 0 {
            code = 1;
        }
    }
    Ok(code)
}

fn sorted(scenarios: &[Scenario]) -> Vec<&Scenario> {
    let mut v: Vec<&Scenario> = scenarios.iter().collect();
    v.sort_by(|a, b| a.id.cmp(&b.id));
    v
}

fn cmd_emit(select: &Selection, jobs: usize, out: &mut dyn Write) -> Result<i32> {
    let scenarios = select.scenarios()?;
    if select.series.is_empty() {
        let _ = writeln!(out, "no series selected");
        return Ok(0);
    }
    ensure_dir(&select.out)?;
    let outcomes = run_all(&scenarios, jobs, 1.0)?;
    let mut code = 0;
    for o in &outcomes {
        if let Some(e) = &o.report.error {
            let _ = writeln!(out, "ERROR {}: {e}", o.report.scenario_id);
            code = 3;
            continue;
        }
        for p in write_series(&select.out, o, &select.series)? {
            let _ = writeln!(out, "wrote {}", p.display());
        }
    }
    Ok(code)
}

/// Runs the command line and returns the process exit code: 0 success,
/// 1 assertion failure, 2 invalid input, 3 computational error.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return if code == 0 { 0 } else { 2 };
        }
    };
    let result = match &cli.command {
        Command::Run {
            select,
            jobs,
            tolerance_scale,
        } => cmd_run(select, *jobs, *tolerance_scale, out),
        Command::ListSuites { json } => {
            if *json {
                let _ = writeln!(
                    out,
                    "{}",
                    serde_json::to_string_pretty(catalog::catalog()).expect("catalog serializes")
                );
            } else {
                let _ = write!(out, "{}", catalog::render());
            }
            Ok(0)
        }
        Command::EmitPlots { select, jobs } => cmd_emit(select, *jobs, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
