use std::collections::{BTreeMap, BTreeSet};

#[cfg(test)]
use super::program::EventRef;
use super::program::{OpKind, Program, ValueId};
use super::{Interleaving, Violation};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Completeness {
    /// Any subset of events, in program order.
    Partial,
    /// Every event exactly once.
    Required,
}

/// Returns the first violation, scanning left to right.
pub fn validate_interleaving(
    p: &Program,
    s: &Interleaving,
    completeness: Completeness,
) -> Result<(), Violation> {
    let mut seen: Vec<Vec<bool>> = p.threads().iter().map(|t| vec![false; t.len()]).collect();
    let mut last: Vec<Option<usize>> = vec![None; p.num_threads()];

    for (position, &event) in s.order.iter().enumerate() {
        if !p.contains(event) {
            return Err(Violation::UnknownEvent { position, event });
        }
        if seen[event.thread][event.index] {
            return Err(Violation::Duplicate { position, event });
        }
        if let Some(previous) = last[event.thread] {
            if previous > event.index {
                return Err(Violation::ProgramOrder {
                    position,
                    event,
                    previous,
                });
            }
        }
        seen[event.thread][event.index] = true;
        last[event.thread] = Some(event.index);
    }

    if completeness == Completeness::Required {
        if let Some(event) = p.events().find(|e| !seen[e.thread][e.index]) {
            return Err(Violation::Missing { event });
        }
    }
    Ok(())
}

/// Position of the first read whose value is not the last value written to its
/// variable, or `None` if every read is satisfied. There are no initial values.
pub fn first_sc_violation(p: &Program, s: &Interleaving) -> Result<Option<usize>, Violation> {
    validate_interleaving(p, s, Completeness::Partial)?;
    let mut memory: Vec<Option<ValueId>> = vec![None; p.num_variables()];
    for (position, &event) in s.order.iter().enumerate() {
        let op = p.op(event);
        let slot = &mut memory[op.var.0 as usize];
        match op.kind {
            OpKind::Write => *slot = Some(op.value),
            OpKind::Read => {
                if *slot != Some(op.value) {
                    return Ok(Some(position));
                }
            }
        }
    }
    Ok(None)
}

pub fn is_sequentially_consistent(p: &Program, s: &Interleaving) -> Result<bool, Violation> {
    Ok(first_sc_violation(p, s)?.is_none())
}

/// Number of switches away from a thread that still has pending events.
pub fn count_preemptions(p: &Program, s: &Interleaving) -> Result<usize, Violation> {
    validate_interleaving(p, s, Completeness::Partial)?;
    Ok(s.order
        .windows(2)
        .filter(|pair| pair[0].thread != pair[1].thread && !p.is_last(pair[0]))
        .count())
}

/// Number of distinct writer threads per variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WriterClass {
    pub per_variable: BTreeMap<String, usize>,
    pub max_writers: usize,
}

impl WriterClass {
    pub fn is_one_writer(&self) -> bool {
        self.max_writers <= 1
    }

    /// `1-Writer`, `2-Writer`, ... A program without writes is 1-Writer.
    pub fn label(&self) -> String {
        format!("{}-Writer", self.max_writers.max(1))
    }
}

pub fn classify_writers(p: &Program) -> WriterClass {
    let mut writers: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); p.num_variables()];
    for (t, ops) in p.threads().iter().enumerate() {
        for op in ops.iter().filter(|op| op.is_write()) {
            writers[op.var.0 as usize].insert(t);
        }
    }
    let per_variable: BTreeMap<String, usize> = writers
        .iter()
        .enumerate()
        .map(|(v, set)| (p.variables()[v].clone(), set.len()))
        .collect();
    let max_writers = per_variable.values().copied().max().unwrap_or(0);
    WriterClass {
        per_variable,
        max_writers,
    }
}

/// Events as `(thread, index)` pairs with 1-based threads, for terse tests.
#[cfg(test)]
pub(crate) fn il(pairs: &[(usize, usize)]) -> Interleaving {
    pairs
        .iter()
        .map(|&(t, i)| EventRef::new(t - 1, i))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::parse_program;
    use crate::trace::program::{r, w};

    fn three_thread() -> Program {
        parse_program("T1: w x 1\nT1: w x 2\nT1: r y 1\nT2: r x 2\nT2: w y 1\nT3: r x 1").unwrap()
    }

    #[test]
    fn caption_interleaving_is_sc_with_two_preemptions() {
        let p = three_thread();
        let s = il(&[(1, 0), (3, 0), (1, 1), (2, 0), (2, 1), (1, 2)]);
        assert_eq!(is_sequentially_consistent(&p, &s), Ok(true));
        assert_eq!(count_preemptions(&p, &s), Ok(2));
        validate_interleaving(&p, &s, Completeness::Required).unwrap();
    }

    #[test]
    fn caption_partial_interleaving_has_one_preemption() {
        let p = three_thread();
        let s = il(&[(1, 0), (3, 0), (1, 1)]);
        assert_eq!(count_preemptions(&p, &s), Ok(1));
        assert_eq!(is_sequentially_consistent(&p, &s), Ok(true));
    }

    #[test]
    fn stale_read_after_overwrite_is_rejected() {
        // b11 b31 b21 b12 b22 for the first point set of the block example.
        let p = three_thread();
        let s = il(&[(1, 0), (3, 0), (2, 0), (1, 1), (1, 2), (2, 1)]);
        assert_eq!(first_sc_violation(&p, &s), Ok(Some(2)));
    }

    #[test]
    fn same_value_write_in_between_is_allowed() {
        let p = Program::builder()
            .thread("A", [w("x", 1)])
            .thread("B", [w("x", 1)])
            .thread("C", [r("x", 1)])
            .build()
            .unwrap();
        assert_eq!(
            is_sequentially_consistent(&p, &il(&[(1, 0), (2, 0), (3, 0)])),
            Ok(true)
        );
    }

    #[test]
    fn read_without_write_is_inconsistent() {
        let p = Program::builder()
            .thread("A", [r("x", 1)])
            .thread("B", [w("x", 1)])
            .build()
            .unwrap();
        assert_eq!(
            is_sequentially_consistent(&p, &il(&[(1, 0), (2, 0)])),
            Ok(false)
        );
        assert_eq!(
            is_sequentially_consistent(&p, &il(&[(2, 0), (1, 0)])),
            Ok(true)
        );
    }

    #[test]
    fn write_only_program_is_consistent_in_any_order() {
        let p = Program::builder()
            .thread("A", [w("x", 1), w("y", 2)])
            .thread("B", [w("x", 2)])
            .build()
            .unwrap();
        for s in [
            il(&[(1, 0), (1, 1), (2, 0)]),
            il(&[(1, 0), (2, 0), (1, 1)]),
            il(&[(2, 0), (1, 0), (1, 1)]),
        ] {
            assert_eq!(is_sequentially_consistent(&p, &s), Ok(true));
        }
    }

    #[test]
    fn contiguous_threads_have_no_preemptions() {
        let p = three_thread();
        for order in [[0, 1, 2], [2, 1, 0], [1, 0, 2]] {
            let s = Interleaving::concatenation(&p, &order);
            assert_eq!(count_preemptions(&p, &s), Ok(0));
        }
    }

    #[test]
    fn switching_from_a_finished_thread_is_free() {
        let p = three_thread();
        // T3 finishes after one event; switching away from it is not a preemption.
        let s = il(&[(3, 0), (1, 0), (1, 1), (1, 2), (2, 0), (2, 1)]);
        assert_eq!(count_preemptions(&p, &s), Ok(0));
    }

    #[test]
    fn validation_reports_first_violation() {
        let p = three_thread();
        assert_eq!(
            validate_interleaving(&p, &il(&[(1, 1), (1, 0)]), Completeness::Partial),
            Err(Violation::ProgramOrder {
                position: 1,
                event: EventRef::new(0, 0),
                previous: 1
            })
        );
        assert!(matches!(
            validate_interleaving(&p, &il(&[(1, 0), (9, 0)]), Completeness::Partial),
            Err(Violation::UnknownEvent { position: 1, .. })
        ));
        assert!(matches!(
            validate_interleaving(&p, &il(&[(1, 0), (1, 0)]), Completeness::Partial),
            Err(Violation::Duplicate { position: 1, .. })
        ));
        assert!(matches!(
            validate_interleaving(&p, &il(&[(1, 0)]), Completeness::Required),
            Err(Violation::Missing { .. })
        ));
        assert!(matches!(
            is_sequentially_consistent(&p, &il(&[(2, 1), (2, 0)])),
            Err(Violation::ProgramOrder { .. })
        ));
        let full = Interleaving::concatenation(&p, &[0, 1, 2]);
        assert_eq!(
            validate_interleaving(&p, &full, Completeness::Required),
            Ok(())
        );
    }

    #[test]
    fn writer_classes() {
        let c = classify_writers(&three_thread());
        assert_eq!(c.max_writers, 1);
        assert_eq!(c.per_variable["x"], 1);
        assert_eq!(c.per_variable["y"], 1);
        assert_eq!(c.label(), "1-Writer");

        let reads_only = Program::builder()
            .thread("A", [r("x", 1)])
            .thread("B", [r("x", 2)])
            .build()
            .unwrap();
        let c = classify_writers(&reads_only);
        assert_eq!(c.max_writers, 0);
        assert!(c.is_one_writer());

        let two = Program::builder()
            .thread("A", [w("x", 1), w("x", 2)])
            .thread("B", [w("x", 1)])
            .build()
            .unwrap();
        let c = classify_writers(&two);
        assert_eq!(c.per_variable["x"], 2);
        assert_eq!(c.label(), "2-Writer");
    }
}
