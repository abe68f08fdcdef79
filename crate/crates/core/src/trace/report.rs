use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::check::{
    count_preemptions, is_sequentially_consistent, validate_interleaving, Completeness,
};
use super::program::{EventRef, Program};
use super::{Interleaving, Violation};

/// JSON form of a verdict: `{"consistent": .., "preemptions": .., "order": [[label, index], ..]}`.
///
/// `preemptions` is `null` and `order` empty when there is no witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub consistent: bool,
    pub preemptions: Option<usize>,
    pub order: Vec<(String, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown thread label `{0}`")]
    UnknownLabel(String),
    #[error("witness is not a complete interleaving: {0}")]
    Invalid(#[from] Violation),
    #[error("witness is not sequentially consistent")]
    NotConsistent,
    #[error("reported {reported} preemptions but the witness has {actual}")]
    PreemptionMismatch { reported: usize, actual: usize },
    #[error("`consistent` is false but a witness is present")]
    UnexpectedWitness,
}

impl Report {
    pub fn witness(p: &Program, s: &Interleaving) -> Result<Report, Violation> {
        let preemptions = count_preemptions(p, s)?;
        Ok(Report {
            consistent: true,
            preemptions: Some(preemptions),
            order: s
                .order
                .iter()
                .map(|e| (p.label(e.thread).to_string(), e.index))
                .collect(),
        })
    }

    pub fn inconsistent() -> Report {
        Report {
            consistent: false,
            preemptions: None,
            order: Vec::new(),
        }
    }

    /// Resolves labels against `p` and re-checks the witness.
    pub fn to_interleaving(&self, p: &Program) -> Result<Option<Interleaving>, ReportError> {
        if !self.consistent {
            if self.order.is_empty() && self.preemptions.is_none() {
                return Ok(None);
            }
            return Err(ReportError::UnexpectedWitness);
        }
        let order = self
            .order
            .iter()
            .map(|(label, index)| {
                p.thread_by_label(label)
                    .map(|t| EventRef::new(t, *index))
                    .ok_or_else(|| ReportError::UnknownLabel(label.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let s = Interleaving::new(order);
        validate_interleaving(p, &s, Completeness::Required)?;
        if !is_sequentially_consistent(p, &s)? {
            return Err(ReportError::NotConsistent);
        }
        let actual = count_preemptions(p, &s)?;
        if let Some(reported) = self.preemptions {
            if reported != actual {
                return Err(ReportError::PreemptionMismatch { reported, actual });
            }
        }
        Ok(Some(s))
    }
}
