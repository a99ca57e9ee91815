//! Command-line front end. Every report is a pure function of the parsed
//! arguments, so identical invocations give byte-identical output.

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::combinatorics::{count_pattern_permutations, falsify_lemma2, falsify_lemma3, FalsifyReport, Pattern};
use crate::constants::{
    c1_upper, even_grid, scan_eta, verify_main_theorem, write_scan_csv, C1Method, ScanRow,
};
use crate::error::{Error, Result};
use crate::integrator::{c1_coarse_upper, c1_enclosure_with, c1_monte_carlo, EnclosureOptions};
use crate::ledger::{eta_cap, verify_all};
use crate::polytope::{build_e, enumerate_vertices, exact_volume, mc_volume};
use crate::rational::{parse_rational, to_decimal_string, to_exact_string, ExactValue, Rational};

/// Environment variable that fixes the worker-thread count.
pub const THREADS_ENV: &str = "GAPCERT_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT_ERROR: i32 = 2;
pub const EXIT_RUNTIME_ERROR: i32 = 3;

fn rational_arg(s: &str) -> std::result::Result<Rational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum C1Choice {
    Coarse,
    Enclosure,
    Mc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundChoice {
    Coarse,
    Enclosure,
}

impl From<BoundChoice> for C1Method {
    fn from(b: BoundChoice) -> Self {
        match b {
            BoundChoice::Coarse => C1Method::Coarse,
            BoundChoice::Enclosure => C1Method::Enclosure,
        }
    }
}

const DEFAULT_ETA: &str = "22/3295";
const DEFAULT_TOL: &str = "1/100000000";
const DEFAULT_SAMPLES: &str = "10000000";

#[derive(Debug, Parser)]
#[command(name = "gapcert", version, about = "Exact verification of the prime-gap sieve constants")]
pub struct RunConfig {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Report format. Defaults to csv for `scan` and json otherwise.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify every threshold claim in the ledger.
    Thresholds,
    /// Exact volume of E(eta) with a Monte Carlo cross-check.
    Volume {
        #[arg(long, default_value = DEFAULT_ETA, value_parser = rational_arg)]
        eta: Rational,
        #[arg(long, default_value = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Include the H-representation in the report.
        #[arg(long)]
        dump_hrep: bool,
    },
    /// Bound or estimate c1(eta).
    C1 {
        #[arg(long, default_value = DEFAULT_ETA, value_parser = rational_arg)]
        eta: Rational,
        #[arg(long, value_enum, default_value = "enclosure")]
        method: C1Choice,
        #[arg(long, default_value = DEFAULT_TOL, value_parser = rational_arg)]
        tol: Rational,
        #[arg(long, default_value_t = 24)]
        max_depth: u32,
        #[arg(long, default_value = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Run the final chain of exact checks at eta.
    Report {
        #[arg(long, default_value = DEFAULT_ETA, value_parser = rational_arg)]
        eta: Rational,
        #[arg(long, value_enum, default_value = "enclosure")]
        method: BoundChoice,
        #[arg(long, default_value = DEFAULT_TOL, value_parser = rational_arg)]
        tol: Rational,
    },
    /// Tabulate volume, c1 and c0 over a grid of eta values.
    Scan {
        /// Comma-separated eta values.
        #[arg(long, value_delimiter = ',', value_parser = rational_arg, conflicts_with = "points")]
        grid: Option<Vec<Rational>>,
        /// Evenly spaced points on [0, 22/3295].
        #[arg(long, default_value_t = 8)]
        points: usize,
        #[arg(long, value_enum, default_value = "enclosure")]
        method: BoundChoice,
        #[arg(long, default_value = DEFAULT_TOL, value_parser = rational_arg)]
        tol: Rational,
    },
    /// Randomized counterexample search for the ordered-partition lemmas.
    Falsify {
        /// 2: sorted tuples. 3: tuples split into three ordered blocks.
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        lemma: u8,
        #[arg(long, default_value = DEFAULT_ETA, value_parser = rational_arg)]
        eta: Rational,
        /// Premise-satisfying samples to check.
        #[arg(long, default_value = DEFAULT_SAMPLES)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        t_min: usize,
        #[arg(long, default_value_t = 8)]
        t_max: usize,
    },
    /// Count permutations matching the two order patterns.
    Perms {
        /// Random distinct 5-tuples to test besides (1, 2, 3, 4, 5).
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Rendered report plus whether every executed check passed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub body: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct NamedCheck {
    name: &'static str,
    pass: bool,
}

fn json_body(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn unsupported(format: Format, what: &str) -> Error {
    Error::Input(format!("format {format:?} is not available for {what}"))
}

fn exact(r: &Rational) -> ExactValue {
    ExactValue(r.clone())
}

fn text_checks(out: &mut String, checks: &[NamedCheck]) {
    for c in checks {
        let _ = writeln!(out, "{:<24} {}", c.name, if c.pass { "PASS" } else { "FAIL" });
    }
}

fn check_eta_range(eta: &Rational) -> Result<()> {
    let cap = crate::polytope::eta_sanity_cap();
    if eta < &Rational::from_integer(0.into()) || eta >= &cap {
        return Err(Error::Input(format!("eta = {} outside [0, 1/10)", to_exact_string(eta))));
    }
    Ok(())
}

fn thresholds(format: Format) -> Result<Outcome> {
    let results = verify_all();
    let pass = results.iter().all(|r| r.pass);
    let body = match format {
        Format::Json => json_body(&json!({ "claims": results, "overall": pass })),
        Format::Csv => {
            let mut s = String::from("name,pass,computed,claimed\n");
            for r in &results {
                let _ = writeln!(
                    s,
                    "{},{},{},{}",
                    r.name,
                    r.pass,
                    to_exact_string(&r.computed_threshold.0),
                    to_exact_string(&r.claimed_threshold.0)
                );
            }
            s
        }
        Format::Text => {
            let mut s = String::new();
            for r in &results {
                let _ = writeln!(s, "{r}");
            }
            s
        }
    };
    Ok(Outcome { body, pass })
}

fn volume(format: Format, eta: &Rational, samples: u64, seed: u64, dump_hrep: bool) -> Result<Outcome> {
    check_eta_range(eta)?;
    let e = build_e(eta)?;
    let vol = exact_volume(&e)?;
    let vertices = enumerate_vertices(&e)?.len();
    let mc = mc_volume(&e, samples, seed)?;
    let z = mc.z_score(crate::rational::to_f64(&vol));
    let checks = [NamedCheck {
        name: "mc-within-4-sigma",
        pass: z < 4.0,
    }];
    let pass = checks.iter().all(|c| c.pass);
    let body = match format {
        Format::Json => json_body(&json!({
            "eta": exact(eta),
            "volume": exact(&vol),
            "vertices": vertices,
            "monte_carlo": mc,
            "z_score": z,
            "checks": checks,
            "overall": pass,
            "hrep": dump_hrep.then(|| e.to_hrep()),
        })),
        Format::Text => {
            let mut s = format!(
                "eta          {}\nvolume       {} ({})\nvertices     {}\nmonte carlo  {:e} +- {:e} (z = {:.3})\n",
                to_exact_string(eta),
                to_exact_string(&vol),
                to_decimal_string(&vol),
                vertices,
                mc.estimate,
                mc.standard_error,
                z
            );
            text_checks(&mut s, &checks);
            if dump_hrep {
                s.push_str(&e.to_hrep());
            }
            s
        }
        Format::Csv => return Err(unsupported(format, "volume")),
    };
    Ok(Outcome { body, pass })
}

#[allow(clippy::too_many_arguments)]
fn c1(
    format: Format,
    eta: &Rational,
    method: C1Choice,
    tol: &Rational,
    max_depth: u32,
    samples: u64,
    seed: u64,
) -> Result<Outcome> {
    check_eta_range(eta)?;
    let (value, checks) = match method {
        C1Choice::Coarse => {
            let upper = c1_coarse_upper(eta)?;
            (json!({ "method": "coarse", "upper": exact(&upper) }), vec![])
        }
        C1Choice::Enclosure => {
            let opts = EnclosureOptions {
                tol: tol.clone(),
                max_depth,
                ..EnclosureOptions::default()
            };
            let r = c1_enclosure_with(eta, &opts)?;
            let checks = vec![NamedCheck {
                name: "converged",
                pass: r.converged,
            }];
            (
                json!({
                    "method": "enclosure",
                    "lower": exact(r.enclosure.lo()),
                    "upper": exact(r.enclosure.hi()),
                    "width": exact(&r.enclosure.width()),
                    "cells": r.work,
                }),
                checks,
            )
        }
        C1Choice::Mc => {
            let m = c1_monte_carlo(eta, samples, seed)?;
            (json!({ "method": "mc", "monte_carlo": m }), vec![])
        }
    };
    let pass = checks.iter().all(|c| c.pass);
    let body = match format {
        Format::Json => {
            let mut v = value;
            v["eta"] = json!(exact(eta));
            v["checks"] = json!(checks);
            v["overall"] = json!(pass);
            json_body(&v)
        }
        Format::Text => {
            let mut s = format!("eta   {}\n", to_exact_string(eta));
            for key in ["lower", "upper", "width"] {
                if let Some(x) = value.get(key) {
                    let _ = writeln!(s, "{key:<6}{} ({})", x["exact"].as_str().unwrap_or(""), x["decimal"].as_str().unwrap_or(""));
                }
            }
            if let Some(m) = value.get("monte_carlo") {
                let _ = writeln!(s, "mc   {} +- {}", m["estimate"], m["standard_error"]);
            }
            text_checks(&mut s, &checks);
            s
        }
        Format::Csv => return Err(unsupported(format, "c1")),
    };
    Ok(Outcome { body, pass })
}

fn enclosure_opts(tol: &Rational) -> EnclosureOptions {
    EnclosureOptions {
        tol: tol.clone(),
        ..EnclosureOptions::default()
    }
}

fn report(format: Format, eta: &Rational, method: BoundChoice, tol: &Rational) -> Result<Outcome> {
    check_eta_range(eta)?;
    let upper = c1_upper(eta, method.into(), &enclosure_opts(tol))?;
    let r = verify_main_theorem(eta, &upper)?;
    let body = match format {
        Format::Json => {
            let mut s = r.to_json();
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            for c in &r.checks {
                let _ = writeln!(
                    s,
                    "{:<24} {}  {} {} {}",
                    c.name,
                    if c.pass { "PASS" } else { "FAIL" },
                    to_decimal_string(&c.lhs.0),
                    c.relation,
                    to_decimal_string(&c.rhs.0)
                );
            }
            let _ = writeln!(s, "overall                  {}", if r.overall { "PASS" } else { "FAIL" });
            s
        }
        Format::Csv => return Err(unsupported(format, "report")),
    };
    Ok(Outcome { body, pass: r.overall })
}

/// True iff every row's `c0` is strictly below the previous row's.
fn strictly_decreasing(rows: &[ScanRow]) -> bool {
    rows.windows(2).all(|w| w[1].c0 < w[0].c0)
}

fn scan(format: Format, grid: Option<&[Rational]>, points: usize, method: BoundChoice, tol: &Rational) -> Result<Outcome> {
    let grid = match grid {
        Some(g) => g.to_vec(),
        None => even_grid(points),
    };
    if grid.is_empty() {
        return Err(Error::Input("empty grid".into()));
    }
    if grid.iter().any(|x| x > &eta_cap()) {
        return Err(Error::Input("grid points must lie in [0, 22/3295]".into()));
    }
    let rows = scan_eta(&grid, method.into(), &enclosure_opts(tol))?;
    let sorted = grid.windows(2).all(|w| w[0] < w[1]);
    let checks = [NamedCheck {
        name: "c0-decreasing",
        pass: !sorted || strictly_decreasing(&rows),
    }];
    let pass = checks.iter().all(|c| c.pass);
    let body = match format {
        Format::Csv => {
            let mut buf = Vec::new();
            write_scan_csv(&rows, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Json => {
            let rows: Vec<_> = rows
                .iter()
                .map(|r| {
                    json!({
                        "eta": exact(&r.eta),
                        "volume": exact(&r.volume),
                        "c1_upper": exact(&r.c1_upper),
                        "theta0": exact(&r.theta0),
                        "c0": exact(&r.c0),
                    })
                })
                .collect();
            json_body(&json!({ "rows": rows, "checks": checks, "overall": pass }))
        }
        Format::Text => {
            let mut s = String::new();
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:<22} vol {:<22} c1 {:<22} c0 {}",
                    to_decimal_string(&r.eta),
                    to_decimal_string(&r.volume),
                    to_decimal_string(&r.c1_upper),
                    to_decimal_string(&r.c0)
                );
            }
            text_checks(&mut s, &checks);
            s
        }
    };
    Ok(Outcome { body, pass })
}

fn falsify(format: Format, lemma: u8, eta: &Rational, samples: u64, seed: u64, t_min: usize, t_max: usize) -> Result<Outcome> {
    let r: FalsifyReport = match lemma {
        2 => falsify_lemma2(eta, t_min, t_max, samples, seed)?,
        3 => falsify_lemma3(eta, samples, seed)?,
        other => return Err(Error::Input(format!("unknown lemma {other}"))),
    };
    let pass = r.passed();
    let body = match format {
        Format::Json => json_body(&json!({ "report": r, "reached_target": r.reached_target(), "overall": pass })),
        Format::Text => format!(
            "lemma {} eta {} seed {}\ndraws {} premise hits {} (target {}) boundary hits {}\ncounterexample {}\n",
            r.lemma,
            r.eta,
            r.seed,
            r.draws,
            r.premise_hits,
            r.target,
            r.boundary_hits,
            match &r.counterexample {
                Some(c) => c.gamma.join(" "),
                None => "none".into(),
            }
        ),
        Format::Csv => return Err(unsupported(format, "falsify")),
    };
    Ok(Outcome { body, pass })
}

fn perms(format: Format, trials: u64, seed: u64) -> Result<Outcome> {
    let base = [1, 2, 3, 4, 5];
    let p1 = count_pattern_permutations(&base, Pattern::P1)?;
    let p2 = count_pattern_permutations(&base, Pattern::P2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut agree = 0u64;
    for _ in 0..trials {
        let v: [f64; 5] = std::array::from_fn(|_| rng.gen::<f64>());
        if let (Ok(4), Ok(20)) = (
            count_pattern_permutations(&v, Pattern::P1),
            count_pattern_permutations(&v, Pattern::P2),
        ) {
            agree += 1;
        }
    }
    let pass = p1 == 4 && p2 == 20 && agree == trials;
    let body = match format {
        Format::Json => json_body(&json!({ "P1": p1, "P2": p2, "trials": trials, "trials_agreeing": agree, "overall": pass })),
        Format::Text => format!("P1 {p1}\nP2 {p2}\nrandom tuples agreeing {agree}/{trials}\n"),
        Format::Csv => format!("pattern,count\nP1,{p1}\nP2,{p2}\n"),
    };
    Ok(Outcome { body, pass })
}

/// Runs one parsed invocation.
pub fn run(config: &RunConfig) -> Result<Outcome> {
    let default_format = match config.command {
        Command::Scan { .. } => Format::Csv,
        _ => Format::Json,
    };
    let format = config.format.unwrap_or(default_format);
    match &config.command {
        Command::Thresholds => thresholds(format),
        Command::Volume { eta, samples, seed, dump_hrep } => volume(format, eta, *samples, *seed, *dump_hrep),
        Command::C1 { eta, method, tol, max_depth, samples, seed } => {
            c1(format, eta, *method, tol, *max_depth, *samples, *seed)
        }
        Command::Report { eta, method, tol } => report(format, eta, *method, tol),
        Command::Scan { grid, points, method, tol } => scan(format, grid.as_deref(), *points, *method, tol),
        Command::Falsify { lemma, eta, samples, seed, t_min, t_max } => {
            falsify(format, *lemma, eta, *samples, *seed, *t_min, *t_max)
        }
        Command::Perms { trials, seed } => perms(format, *trials, *seed),
    }
}

pub fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Input(_) | Error::Parse(_) | Error::Dimension { .. } | Error::NoThreshold => EXIT_INPUT_ERROR,
        _ => EXIT_RUNTIME_ERROR,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| Error::Input(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    if n == 0 {
        return Err(Error::Input(format!("{THREADS_ENV} must be positive")));
    }
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs, writes the report and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT_ERROR } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return EXIT_INPUT_ERROR;
    }
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    let written = match &config.output {
        Some(path) => std::fs::write(path, &outcome.body),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(outcome.body.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return EXIT_RUNTIME_ERROR;
    }
    if outcome.pass {
        EXIT_PASS
    } else {
        EXIT_CHECK_FAILED
    }
}
