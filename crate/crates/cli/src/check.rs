use std::fmt::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use vscp_core::exact::{ExactConfig, OracleError, DEFAULT_STATE_BUDGET};
use vscp_core::trace::Report;
use vscp_core::{
    classify_writers, enumerate_all, parse_program, solve_exact_with, solve_one_writer, ExactError,
    OneWriterError, Program, Witness,
};

use crate::{emit, read_input, Failure, Mode, EXIT_BUDGET, EXIT_CONSISTENT, EXIT_INCONSISTENT};

pub const STATE_BUDGET_VAR: &str = "VSCP_STATE_BUDGET";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Solver {
    Onewriter,
    Exact,
    Oracle,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stats {
    /// Point sets tried (onewriter), memoized states (exact) or SC
    /// interleavings counted (oracle).
    pub states: u64,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub report: Report,
    pub solver: Solver,
    pub stats: Stats,
}

fn load(path: &Path) -> Result<Program, Failure> {
    let text = read_input(path)?;
    parse_program(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn state_budget() -> Result<usize, Failure> {
    match std::env::var(STATE_BUDGET_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::usage(format!("{STATE_BUDGET_VAR}={v} is not a number"))),
        Err(_) => Ok(DEFAULT_STATE_BUDGET),
    }
}

fn budget_failure(message: String) -> Failure {
    Failure {
        code: EXIT_BUDGET,
        message,
    }
}

pub fn check(path: &Path, pi: usize, mode: Mode, json: bool) -> Result<u8, Failure> {
    let p = load(path)?;
    let solver = match mode {
        Mode::Auto if classify_writers(&p).is_one_writer() => Solver::Onewriter,
        Mode::Auto | Mode::Exact => Solver::Exact,
        Mode::Onewriter => Solver::Onewriter,
        Mode::Oracle => Solver::Oracle,
    };
    let start = Instant::now();
    let (witness, states): (Option<Witness>, u64) = match solver {
        Solver::Onewriter => {
            let s = solve_one_writer(&p, pi).map_err(
                |OneWriterError::NotOneWriter { max_writers }| {
                    Failure::usage(format!(
                        "onewriter mode needs at most one writer per variable, found {max_writers}"
                    ))
                },
            )?;
            (s.decision.witness().cloned(), s.stats.point_sets as u64)
        }
        Solver::Exact => {
            let config = ExactConfig {
                state_budget: state_budget()?,
                ..ExactConfig::default()
            };
            let s = solve_exact_with(&p, pi, &config).map_err(
                |ExactError::BudgetExceeded { states }| {
                    budget_failure(format!("state budget exceeded after {states} states"))
                },
            )?;
            (s.decision.witness().cloned(), s.stats.states as u64)
        }
        Solver::Oracle => {
            let e = enumerate_all(&p, pi).map_err(|OracleError::TooLarge { events, cap }| {
                budget_failure(format!(
                    "oracle handles at most {cap} events, trace has {events}"
                ))
            })?;
            let witness = e.witness.map(|s| Witness::certify(&p, s, pi));
            (witness, e.count)
        }
    };
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;

    let report = match &witness {
        Some(w) => Report::witness(&p, &w.interleaving).expect("certified witness"),
        None => Report::inconsistent(),
    };
    let verdict = Verdict {
        report,
        solver,
        stats: Stats { states, elapsed_ms },
    };
    if json {
        emit(&(serde_json::to_string(&verdict).expect("verdict serializes") + "\n"));
    } else {
        emit(&render_verdict(&p, pi, &verdict, witness.as_ref()));
    }
    Ok(if witness.is_some() {
        EXIT_CONSISTENT
    } else {
        EXIT_INCONSISTENT
    })
}

fn render_verdict(p: &Program, pi: usize, v: &Verdict, witness: Option<&Witness>) -> String {
    let solver = serde_json::to_value(v.solver).expect("solver serializes");
    let solver = solver.as_str().unwrap_or_default();
    let mut out = String::new();
    match witness {
        Some(w) => {
            let _ = writeln!(
                out,
                "consistent: {} preemptions (bound {pi}), solver {solver}",
                w.preemptions
            );
            let _ = writeln!(out, "witness: {}", w.interleaving.describe(p));
        }
        None => {
            let _ = writeln!(
                out,
                "inconsistent: no SC interleaving with at most {pi} preemptions, solver {solver}"
            );
        }
    }
    let _ = writeln!(
        out,
        "states: {}, elapsed: {:.3} ms",
        v.stats.states, v.stats.elapsed_ms
    );
    out
}

pub fn classify(path: &Path) -> Result<u8, Failure> {
    let p = load(path)?;
    let c = classify_writers(&p);
    let mut out = format!(
        "{}, k={}, n={}\nmaxWriters: {}\n",
        c.label(),
        p.num_threads(),
        p.num_events(),
        c.max_writers
    );
    for (var, writers) in &c.per_variable {
        let _ = writeln!(out, "writers {var}: {writers}");
    }
    emit(&out);
    Ok(EXIT_CONSISTENT)
}
