//! Programs, interleavings, and the definitional checks on them.

mod check;
mod parse;
mod program;
mod report;

use std::fmt;

use thiserror::Error;

pub use check::{
    classify_writers, count_preemptions, first_sc_violation, is_sequentially_consistent,
    validate_interleaving, Completeness, WriterClass,
};
pub use parse::parse_program;
pub use program::{
    r, w, EventRef, OpKind, Operation, Program, ProgramBuilder, TokenOp, ValueId, VarId,
};
pub use report::{Report, ReportError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("program has no events")]
    EmptyInput,
    #[error("thread `{0}` has no events")]
    EmptyThread(String),
    #[error("thread `{0}` declared twice")]
    DuplicateThread(String),
    #[error("invalid thread label `{0}`")]
    InvalidLabel(String),
    #[error("thread `{thread}`: invalid tokens in operation on `{variable}` = `{value}`")]
    InvalidToken {
        thread: String,
        variable: String,
        value: String,
    },
}

/// A global order over (some of) a program's events.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Interleaving {
    pub order: Vec<EventRef>,
}

impl Interleaving {
    pub fn new(order: Vec<EventRef>) -> Self {
        Interleaving { order }
    }

    /// Each thread in turn, in the given thread order.
    pub fn concatenation(p: &Program, thread_order: &[usize]) -> Self {
        let order = thread_order
            .iter()
            .flat_map(|&t| (0..p.thread_len(t)).map(move |i| EventRef::new(t, i)))
            .collect();
        Interleaving { order }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &EventRef> {
        self.order.iter()
    }

    pub fn describe(&self, p: &Program) -> String {
        self.order
            .iter()
            .map(|&e| p.describe(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl From<Vec<EventRef>> for Interleaving {
    fn from(order: Vec<EventRef>) -> Self {
        Interleaving { order }
    }
}

impl FromIterator<EventRef> for Interleaving {
    fn from_iter<I: IntoIterator<Item = EventRef>>(iter: I) -> Self {
        Interleaving {
            order: iter.into_iter().collect(),
        }
    }
}

/// Why a sequence of event references is not an interleaving of a program.
/// Positions are 0-based indices into the order.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Violation {
    #[error("position {position}: unknown event {event}")]
    UnknownEvent { position: usize, event: EventRef },
    #[error("position {position}: event {event} appears twice")]
    Duplicate { position: usize, event: EventRef },
    #[error("position {position}: event {event} follows index {previous} of the same thread")]
    ProgramOrder {
        position: usize,
        event: EventRef,
        previous: usize,
    },
    #[error("event {event} is missing")]
    Missing { event: EventRef },
}

impl Violation {
    pub fn position(&self) -> Option<usize> {
        match *self {
            Violation::UnknownEvent { position, .. }
            | Violation::Duplicate { position, .. }
            | Violation::ProgramOrder { position, .. } => Some(position),
            Violation::Missing { .. } => None,
        }
    }
}

impl fmt::Display for Interleaving {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.order.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}
