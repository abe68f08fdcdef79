//! Exact decision for arbitrary programs by memoized depth-first search.
//!
//! A search state is the next-event index of every thread, the thread that ran
//! last, the preemption budget left, and the last value written to every
//! variable. With several writers per variable the memory is not a function of
//! the positions, so it is part of the memo key.
//!
//! The memo table maps (positions, last thread, memory) to the largest budget
//! with which that state is known to fail; any smaller budget fails too.

mod oracle;

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::trace::{EventRef, Interleaving, OpKind, Program};
use crate::witness::{Decision, Solution, Witness};

pub use oracle::{
    enumerate_all, enumerate_all_with_cap, preemption_histogram, Enumeration, OracleError,
    DEFAULT_ORACLE_CAP,
};

pub const DEFAULT_STATE_BUDGET: usize = 10_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactConfig {
    /// Maximum number of distinct memoized states (or visited states when
    /// memoization is off) before giving up.
    pub state_budget: usize,
    pub memoize: bool,
    /// With `pi = 0` every thread runs to completion once started, so search
    /// over which threads have finished instead of over event positions.
    pub atomic_threads_for_zero: bool,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            state_budget: DEFAULT_STATE_BUDGET,
            memoize: true,
            atomic_threads_for_zero: true,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("state budget exceeded after {states} states")]
    BudgetExceeded { states: usize },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum SearchMode {
    Events,
    AtomicThreads,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactStats {
    pub mode: SearchMode,
    /// Distinct states recorded (memoized) or visited (no memo).
    pub states: usize,
}

pub fn solve_exact(p: &Program, pi: usize) -> Result<Solution<ExactStats>, ExactError> {
    solve_exact_with(p, pi, &ExactConfig::default())
}

pub fn solve_exact_with(
    p: &Program,
    pi: usize,
    config: &ExactConfig,
) -> Result<Solution<ExactStats>, ExactError> {
    let (found, stats) = if pi == 0 && config.atomic_threads_for_zero {
        let mut search = AtomicSearch::new(p, config);
        let found = search.run()?;
        (
            found,
            ExactStats {
                mode: SearchMode::AtomicThreads,
                states: search.states(),
            },
        )
    } else {
        let mut search = EventSearch::new(p, pi, config);
        let found = search.run()?;
        (
            found,
            ExactStats {
                mode: SearchMode::Events,
                states: search.states(),
            },
        )
    };
    let decision = match found {
        Some(order) => Decision::Sat(Witness::certify(p, Interleaving::new(order), pi)),
        None => Decision::Unsat,
    };
    Ok(Solution { decision, stats })
}

const NONE: u32 = u32::MAX;
/// Budget large enough that it can never run out on the remaining events.
const UNBOUNDED: usize = usize::MAX;

struct EventSearch<'a> {
    p: &'a Program,
    pi: usize,
    config: &'a ExactConfig,
    positions: Vec<usize>,
    last: Option<usize>,
    memory: Vec<u32>,
    remaining_events: usize,
    path: Vec<EventRef>,
    failed: HashMap<Vec<u32>, usize>,
    visited: usize,
}

impl<'a> EventSearch<'a> {
    fn new(p: &'a Program, pi: usize, config: &'a ExactConfig) -> Self {
        EventSearch {
            p,
            pi,
            config,
            positions: vec![0; p.num_threads()],
            last: None,
            memory: vec![NONE; p.num_variables()],
            remaining_events: p.num_events(),
            path: Vec::with_capacity(p.num_events()),
            failed: HashMap::new(),
            visited: 0,
        }
    }

    fn states(&self) -> usize {
        if self.config.memoize {
            self.failed.len()
        } else {
            self.visited
        }
    }

    fn run(&mut self) -> Result<Option<Vec<EventRef>>, ExactError> {
        Ok(if self.dfs(self.pi)? {
            Some(std::mem::take(&mut self.path))
        } else {
            None
        })
    }

    fn is_unfinished(&self, t: usize) -> bool {
        self.positions[t] < self.p.thread_len(t)
    }

    fn key(&self, budget: usize) -> Vec<u32> {
        let last = match self.last {
            Some(t) if budget != UNBOUNDED && self.is_unfinished(t) => t as u32,
            _ => NONE,
        };
        let mut key = Vec::with_capacity(self.positions.len() + 1 + self.memory.len());
        key.extend(self.positions.iter().map(|&i| i as u32));
        key.push(last);
        key.extend_from_slice(&self.memory);
        key
    }

    fn dfs(&mut self, budget: usize) -> Result<bool, ExactError> {
        if self.remaining_events == 0 {
            return Ok(true);
        }
        let budget = if budget >= self.remaining_events {
            UNBOUNDED
        } else {
            budget
        };

        let key = if self.config.memoize {
            let key = self.key(budget);
            if let Some(&failed_with) = self.failed.get(&key) {
                if failed_with >= budget {
                    return Ok(false);
                }
            }
            Some(key)
        } else {
            self.visited += 1;
            if self.visited > self.config.state_budget {
                return Err(ExactError::BudgetExceeded {
                    states: self.visited,
                });
            }
            None
        };

        let k = self.p.num_threads();
        let first = self.last.filter(|&t| self.is_unfinished(t));
        let order = first
            .into_iter()
            .chain((0..k).filter(|&t| Some(t) != first));
        for t in order.collect::<Vec<_>>() {
            if !self.is_unfinished(t) {
                continue;
            }
            let cost = usize::from(first.is_some_and(|l| l != t));
            if cost > budget {
                continue;
            }
            let index = self.positions[t];
            let op = self.p.thread(t)[index];
            let slot = op.var.0 as usize;
            let saved = self.memory[slot];
            match op.kind {
                OpKind::Read if saved != op.value.0 => continue,
                OpKind::Read => {}
                OpKind::Write => self.memory[slot] = op.value.0,
            }
            let saved_last = self.last;
            self.positions[t] += 1;
            self.remaining_events -= 1;
            self.last = Some(t);
            self.path.push(EventRef::new(t, index));

            let next_budget = if budget == UNBOUNDED {
                UNBOUNDED
            } else {
                budget - cost
            };
            let ok = self.dfs(next_budget)?;

            if ok {
                return Ok(true);
            }
            self.path.pop();
            self.last = saved_last;
            self.remaining_events += 1;
            self.positions[t] -= 1;
            self.memory[slot] = saved;
        }

        if let Some(key) = key {
            let entry = self.failed.entry(key).or_insert(0);
            *entry = (*entry).max(budget);
            if self.failed.len() > self.config.state_budget {
                return Err(ExactError::BudgetExceeded {
                    states: self.failed.len(),
                });
            }
        }
        Ok(false)
    }
}

/// Zero-preemption search: the interleaving is a concatenation of threads.
struct AtomicSearch<'a> {
    p: &'a Program,
    config: &'a ExactConfig,
    done: Vec<u64>,
    memory: Vec<u32>,
    finished: usize,
    path: Vec<usize>,
    failed: HashSet<Vec<u64>>,
    visited: usize,
}

impl<'a> AtomicSearch<'a> {
    fn new(p: &'a Program, config: &'a ExactConfig) -> Self {
        AtomicSearch {
            p,
            config,
            done: vec![0; p.num_threads().div_ceil(64)],
            memory: vec![NONE; p.num_variables()],
            finished: 0,
            path: Vec::with_capacity(p.num_threads()),
            failed: HashSet::new(),
            visited: 0,
        }
    }

    fn states(&self) -> usize {
        if self.config.memoize {
            self.failed.len()
        } else {
            self.visited
        }
    }

    fn run(&mut self) -> Result<Option<Vec<EventRef>>, ExactError> {
        if !self.dfs()? {
            return Ok(None);
        }
        let order = Interleaving::concatenation(self.p, &self.path).order;
        Ok(Some(order))
    }

    fn is_done(&self, t: usize) -> bool {
        self.done[t / 64] & (1 << (t % 64)) != 0
    }

    fn key(&self) -> Vec<u64> {
        let mut key = self.done.clone();
        key.extend(self.memory.iter().map(|&v| v as u64));
        key
    }

    /// Runs thread `t` against the current memory; returns the previous memory
    /// on success so the caller can undo.
    fn try_run(&mut self, t: usize) -> Option<Vec<u32>> {
        let saved = self.memory.clone();
        for op in self.p.thread(t) {
            let slot = &mut self.memory[op.var.0 as usize];
            match op.kind {
                OpKind::Write => *slot = op.value.0,
                OpKind::Read if *slot == op.value.0 => {}
                OpKind::Read => {
                    self.memory = saved;
                    return None;
                }
            }
        }
        Some(saved)
    }

    fn dfs(&mut self) -> Result<bool, ExactError> {
        let k = self.p.num_threads();
        if self.finished == k {
            return Ok(true);
        }
        let key = if self.config.memoize {
            let key = self.key();
            if self.failed.contains(&key) {
                return Ok(false);
            }
            Some(key)
        } else {
            self.visited += 1;
            if self.visited > self.config.state_budget {
                return Err(ExactError::BudgetExceeded {
                    states: self.visited,
                });
            }
            None
        };

        for t in 0..k {
            if self.is_done(t) {
                continue;
            }
            let Some(saved) = self.try_run(t) else {
                continue;
            };
            self.done[t / 64] |= 1 << (t % 64);
            self.finished += 1;
            self.path.push(t);
            if self.dfs()? {
                return Ok(true);
            }
            self.path.pop();
            self.finished -= 1;
            self.done[t / 64] &= !(1 << (t % 64));
            self.memory = saved;
        }

        if let Some(key) = key {
            self.failed.insert(key);
            if self.failed.len() > self.config.state_budget {
                return Err(ExactError::BudgetExceeded {
                    states: self.failed.len(),
                });
            }
        }
        Ok(false)
    }
}
