//! Exhaustive enumeration of interleavings, used as ground truth.
//!
//! Every complete interleaving that respects program order is generated;
//! prefixes that already contain an unsatisfied read or too many preemptions
//! are abandoned, which cannot change the count because both properties are
//! inherited by every extension. No state is shared between branches.

use thiserror::Error;

use crate::trace::{EventRef, Interleaving, OpKind, Program};

pub const DEFAULT_ORACLE_CAP: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("program has {events} events, above the oracle cap of {cap}")]
    TooLarge { events: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    /// Number of SC interleavings with at most `pi` preemptions.
    pub count: u64,
    /// The first such interleaving in the enumeration order.
    pub witness: Option<Interleaving>,
}

pub fn enumerate_all(p: &Program, pi: usize) -> Result<Enumeration, OracleError> {
    enumerate_all_with_cap(p, pi, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_all_with_cap(
    p: &Program,
    pi: usize,
    cap: usize,
) -> Result<Enumeration, OracleError> {
    check_cap(p, cap)?;
    let mut walker = Walker::new(p, pi);
    let mut count = 0u64;
    let mut witness = None;
    walker.walk(&mut |order, _| {
        count += 1;
        if witness.is_none() {
            witness = Some(Interleaving::new(order.to_vec()));
        }
    });
    Ok(Enumeration { count, witness })
}

/// `h[j]` = number of SC interleavings with exactly `j` preemptions, for
/// `j <= max_pi`.
pub fn preemption_histogram(
    p: &Program,
    max_pi: usize,
    cap: usize,
) -> Result<Vec<u64>, OracleError> {
    check_cap(p, cap)?;
    let mut hist = vec![0u64; max_pi + 1];
    Walker::new(p, max_pi).walk(&mut |_, preemptions| hist[preemptions] += 1);
    Ok(hist)
}

fn check_cap(p: &Program, cap: usize) -> Result<(), OracleError> {
    if p.num_events() > cap {
        return Err(OracleError::TooLarge {
            events: p.num_events(),
            cap,
        });
    }
    Ok(())
}

struct Walker<'a> {
    p: &'a Program,
    pi: usize,
    positions: Vec<usize>,
    memory: Vec<Option<u32>>,
    order: Vec<EventRef>,
}

impl<'a> Walker<'a> {
    fn new(p: &'a Program, pi: usize) -> Self {
        Walker {
            p,
            pi,
            positions: vec![0; p.num_threads()],
            memory: vec![None; p.num_variables()],
            order: Vec::with_capacity(p.num_events()),
        }
    }

    fn walk(&mut self, visit: &mut dyn FnMut(&[EventRef], usize)) {
        self.step(0, visit);
    }

    fn step(&mut self, preemptions: usize, visit: &mut dyn FnMut(&[EventRef], usize)) {
        if self.order.len() == self.p.num_events() {
            visit(&self.order, preemptions);
            return;
        }
        for t in 0..self.p.num_threads() {
            let index = self.positions[t];
            if index == self.p.thread_len(t) {
                continue;
            }
            let switch = match self.order.last() {
                Some(&prev) => prev.thread != t && !self.p.is_last(prev),
                None => false,
            };
            let preemptions = preemptions + usize::from(switch);
            if preemptions > self.pi {
                continue;
            }
            let op = self.p.thread(t)[index];
            let slot = op.var.0 as usize;
            let saved = self.memory[slot];
            match op.kind {
                OpKind::Read if saved != Some(op.value.0) => continue,
                OpKind::Read => {}
                OpKind::Write => self.memory[slot] = Some(op.value.0),
            }
            self.positions[t] += 1;
            self.order.push(EventRef::new(t, index));
            self.step(preemptions, visit);
            self.order.pop();
            self.positions[t] -= 1;
            self.memory[slot] = saved;
        }
    }
}
