//! Command-line interface: `verify <target>` and `check-surface <file>`.
//!
//! Exit codes: 0 when every check passes, 1 on a verification failure, 2 on
//! usage or configuration errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::submanifold::{CurveReport, ShapeReport};
use crate::suites::{self, Check, RunConfig, SuiteReport, Target};
use crate::surface_file::{self, Definition};
use crate::verifier::{classify, Subject, Verdict};

#[derive(Parser, Debug)]
#[command(name = "isoparam", version, about = "Numerical verification of isoparametric surfaces in CH^2 and CP^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named verification suite.
    Verify {
        /// chen, rh2, circle, sphere, jacobi, curvature or all.
        #[arg(value_parser = parse_target)]
        target: Target,
        #[command(flatten)]
        opts: Options,
    },
    /// Classify a surface or curve given by a definition file.
    CheckSurface {
        file: PathBuf,
        /// Expected verdict; the run fails when the verdict differs.
        #[arg(long, value_parser = parse_verdict)]
        expect: Option<Verdict>,
        #[command(flatten)]
        opts: Options,
    },
}

#[derive(Args, Debug)]
struct Options {
    /// Holomorphic sectional curvature.
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,
    /// Grid points per side.
    #[arg(long, default_value_t = 21)]
    grid: usize,
    /// Displacement radii in units of 1/sqrt|c|, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.02, 0.05])]
    radii: Vec<f64>,
    #[arg(long = "tol-alg", default_value_t = 1e-5)]
    tol_alg: f64,
    #[arg(long = "tol-d1", default_value_t = 1e-3)]
    tol_d1: f64,
    #[arg(long = "tol-d2", default_value_t = 1e-3)]
    tol_d2: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time in the report (makes it nondeterministic).
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_target(s: &str) -> Result<Target, String> {
    s.parse()
}

fn parse_verdict(s: &str) -> Result<Verdict, String> {
    serde_json::from_value(serde_json::Value::String(s.to_uppercase())).map_err(|_| format!("unknown verdict '{s}'"))
}

impl Options {
    fn run_config(&self, c: f64) -> RunConfig {
        RunConfig {
            c,
            grid: self.grid,
            radii: self.radii.clone(),
            tol_alg: self.tol_alg,
            tol_d1: self.tol_d1,
            tol_d2: self.tol_d2,
            seed: self.seed,
        }
    }
}

#[derive(Serialize)]
struct ConfigOut<'a> {
    #[serde(flatten)]
    run: &'a RunConfig,
    format: Format,
}

/// JSON report layout.
#[derive(Serialize)]
struct Envelope<'a> {
    target: &'a str,
    config: ConfigOut<'a>,
    residuals: &'a BTreeMap<String, f64>,
    verdict: Option<Verdict>,
    pass: bool,
    runtime_ms: Option<u64>,
    checks: &'a [Check],
    verdicts: &'a BTreeMap<String, Verdict>,
    notes: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    shape_report: Option<&'a ShapeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    curve_report: Option<&'a CurveReport>,
}

/// Fixed CSV header.
pub const CSV_HEADER: [&str; 7] = ["target", "kind", "name", "value", "expected", "tolerance", "pass"];

struct Rendered<'a> {
    report: &'a SuiteReport,
    shape: Option<&'a ShapeReport>,
    curve: Option<&'a CurveReport>,
}

fn render(r: &Rendered<'_>, cfg: &RunConfig, format: Format, runtime_ms: Option<u64>) -> Result<String, String> {
    let rep = r.report;
    match format {
        Format::Json => {
            let env = Envelope {
                target: &rep.target,
                config: ConfigOut { run: cfg, format },
                residuals: &rep.residuals,
                verdict: rep.verdict,
                pass: rep.pass,
                runtime_ms,
                checks: &rep.checks,
                verdicts: &rep.verdicts,
                notes: &rep.notes,
                shape_report: r.shape,
                curve_report: r.curve,
            };
            serde_json::to_string_pretty(&env)
                .map(|s| s + "\n")
                .map_err(|e| e.to_string())
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| e.to_string();
            w.write_record(CSV_HEADER).map_err(io)?;
            for c in &rep.checks {
                w.write_record([
                    rep.target.as_str(),
                    "check",
                    &c.name,
                    &format!("{:e}", c.value),
                    &c.expected.map(|v| format!("{v:e}")).unwrap_or_default(),
                    &format!("{:e}", c.tolerance),
                    if c.pass { "true" } else { "false" },
                ])
                .map_err(io)?;
            }
            for (k, v) in &rep.residuals {
                if rep.checks.iter().any(|c| &c.name == k) {
                    continue;
                }
                w.write_record([rep.target.as_str(), "residual", k, &format!("{v:e}"), "", "", ""])
                    .map_err(io)?;
            }
            if let Some(v) = rep.verdict {
                w.write_record([rep.target.as_str(), "verdict", v.as_str(), "", "", "", ""])
                    .map_err(io)?;
            }
            for (t, v) in &rep.verdicts {
                w.write_record([rep.target.as_str(), "verdict", &format!("{t}:{v}"), "", "", "", ""])
                    .map_err(io)?;
            }
            w.write_record([rep.target.as_str(), "pass", "", "", "", "", if rep.pass { "true" } else { "false" }])
                .map_err(io)?;
            String::from_utf8(w.into_inner().map_err(|e| e.to_string())?).map_err(|e| e.to_string())
        }
        Format::Text => {
            let mut s = String::new();
            for c in &rep.checks {
                let bound = match (c.relation, c.expected) {
                    ("near", Some(e)) => format!("expected {e:.9} ± {:e}", c.tolerance),
                    ("below", _) => format!("< {:e}", c.tolerance),
                    ("above", _) => format!("> {:e}", c.tolerance),
                    _ => String::new(),
                };
                s += &format!("{:4} {:<40} {:<24e} {bound}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
            }
            if let Some(v) = rep.verdict {
                s += &format!("verdict: {v}\n");
            }
            for (t, v) in &rep.verdicts {
                s += &format!("verdict {t}: {v}\n");
            }
            for n in &rep.notes {
                s += &format!("note: {n}\n");
            }
            if let Some(ms) = runtime_ms {
                s += &format!("runtime: {ms} ms\n");
            }
            s += &suites::summary(rep);
            s.push('\n');
            Ok(s)
        }
    }
}

fn emit(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| e.to_string())
        }
    }
}

fn config_error(msg: impl std::fmt::Display) -> i32 {
    eprintln!("error: {msg}");
    2
}

/// Runs the tool on the given arguments and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let started = Instant::now();
    match cli.command {
        Command::Verify { target, opts } => {
            let cfg = opts.run_config(opts.c.unwrap_or(-4.0));
            let report = match suites::run(target, &cfg) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            let ms = opts.timing.then(|| started.elapsed().as_millis() as u64);
            let r = Rendered {
                report: &report,
                shape: None,
                curve: None,
            };
            finish(&r, &cfg, &opts, ms)
        }
        Command::CheckSurface { file, expect, opts } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return config_error(format!("cannot read {}: {e}", file.display())),
            };
            let def = match surface_file::parse(&src, opts.c) {
                Ok(d) => d,
                Err(e) => return config_error(format!("{}: {e}", file.display())),
            };
            let c = match &def {
                Definition::Surface(p) => p.space.c(),
                Definition::Curve(k) => k.space.c(),
            };
            let cfg = opts.run_config(c);
            if let Err(e) = cfg.validate() {
                return config_error(e);
            }
            let vcfg = cfg.verifier();
            let cls = match &def {
                Definition::Surface(p) => classify(Subject::Surface(p), &vcfg),
                Definition::Curve(k) => classify(Subject::Curve(k), &vcfg),
            };
            let mut report = SuiteReport {
                target: file.display().to_string(),
                residuals: BTreeMap::new(),
                checks: Vec::new(),
                verdict: Some(cls.verdict),
                verdicts: BTreeMap::new(),
                notes: cls.diagnostics.clone(),
                pass: true,
            };
            if let Some(t) = &cls.terng {
                report.residuals.insert("eigenvalue_spread".into(), t.eigenvalue_spread);
                report.residuals.insert("normal_curvature".into(), t.normal_curvature_max);
                report.residuals.insert("kaehler_angle_min".into(), t.kaehler_angle_min);
                report.residuals.insert("kaehler_angle_max".into(), t.kaehler_angle_max);
            }
            if let Some(s) = cls.section_residual_max {
                report.residuals.insert("section_residual".into(), s);
            }
            if let Some(k) = &cls.curve {
                report.residuals.insert("kappa_spread".into(), k.kappa_spread());
                report.residuals.insert("kappa_mean".into(), k.kappa_mean());
                report.residuals.insert("principal_spread".into(), k.principal_spread);
            }
            let ok = match expect {
                Some(v) => cls.verdict == v,
                None => cls.verdict != Verdict::Degenerate,
            };
            let mut chk = Check::flag("verdict", ok);
            chk.name = match expect {
                Some(v) => format!("verdict_is_{}", v.as_str().to_lowercase()),
                None => "verdict_not_degenerate".into(),
            };
            report.residuals.insert(chk.name.clone(), chk.value);
            report.pass = chk.pass;
            report.checks.push(chk);
            let ms = opts.timing.then(|| started.elapsed().as_millis() as u64);
            let r = Rendered {
                report: &report,
                shape: cls.terng.as_ref(),
                curve: cls.curve.as_ref(),
            };
            finish(&r, &cfg, &opts, ms)
        }
    }
}

fn finish(r: &Rendered<'_>, cfg: &RunConfig, opts: &Options, ms: Option<u64>) -> i32 {
    let text = match render(r, cfg, opts.format, ms) {
        Ok(t) => t,
        Err(e) => return config_error(e),
    };
    if let Err(e) = emit(&text, &opts.out) {
        return config_error(e);
    }
    if r.report.pass {
        0
    } else {
        1
    }
}
