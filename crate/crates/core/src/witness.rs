use crate::trace::{
    count_preemptions, is_sequentially_consistent, validate_interleaving, Completeness,
    Interleaving, Program,
};

/// A complete SC interleaving together with its realized preemption count.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub interleaving: Interleaving,
    pub preemptions: usize,
}

impl Witness {
    /// Re-checks `s` against the definitions. Solvers call this on every
    /// answer they return and treat a failure as a bug.
    pub fn certify(p: &Program, s: Interleaving, pi: usize) -> Witness {
        validate_interleaving(p, &s, Completeness::Required)
            .unwrap_or_else(|v| panic!("solver produced an invalid interleaving: {v}"));
        assert!(
            is_sequentially_consistent(p, &s).unwrap(),
            "solver produced a non-SC witness: {}",
            s.describe(p)
        );
        let preemptions = count_preemptions(p, &s).unwrap();
        assert!(
            preemptions <= pi,
            "solver produced a witness with {preemptions} > {pi} preemptions"
        );
        Witness {
            interleaving: s,
            preemptions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision {
    Sat(Witness),
    Unsat,
}

impl Decision {
    pub fn is_sat(&self) -> bool {
        matches!(self, Decision::Sat(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Decision::Sat(w) => Some(w),
            Decision::Unsat => None,
        }
    }
}

/// A decision plus solver-specific statistics.
#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub decision: Decision,
    pub stats: S,
}

impl<S> Solution<S> {
    pub fn is_sat(&self) -> bool {
        self.decision.is_sat()
    }
}
