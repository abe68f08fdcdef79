//! Hardness gadgets: programs whose SC-with-bounded-preemptions question
//! answers a 3-SAT or k-independent-set question, plus brute-force deciders
//! for the source problems.

pub mod cnf;
pub mod graph;
mod indep;
mod sat;

use std::collections::BTreeMap;

use thiserror::Error;

use crate::trace::Program;

pub use cnf::{sat_bruteforce, CnfFormula};
pub use graph::{indepset_bruteforce, UndirectedGraph};
pub use indep::indepset_to_program;
pub use sat::{sat3_to_2writer, sat3_to_3writer};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub program: Program,
    /// Preemption budget paired with the program.
    pub pi: usize,
    /// Thread label to gadget role.
    pub label_map: BTreeMap<String, String>,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReductionError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("clause {clause}: literal {literal} is out of range")]
    BadLiteral { clause: usize, literal: i32 },
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    #[error("edge {edge:?} references a vertex outside 1..={vertex_count}")]
    BadVertex {
        edge: (usize, usize),
        vertex_count: usize,
    },
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("selector count must be at least 1")]
    NoSelectors,
    #[error("selector count {k_sel} exceeds the {vertex_count} vertices")]
    TooManySelectors { k_sel: usize, vertex_count: usize },
    #[error("instance size {size} is above the brute-force cap of {cap}")]
    TooLarge { size: usize, cap: usize },
}

struct Gadget {
    builder: crate::trace::ProgramBuilder,
    label_map: BTreeMap<String, String>,
}

impl Gadget {
    fn new() -> Self {
        Gadget {
            builder: Program::builder(),
            label_map: BTreeMap::new(),
        }
    }

    fn thread(&mut self, label: String, role: String, ops: Vec<crate::trace::TokenOp>) {
        self.label_map.insert(label.clone(), role);
        self.builder.push_thread(label, ops);
    }

    fn finish(self, pi: usize) -> ReductionOutput {
        let program = self
            .builder
            .build()
            .expect("gadget labels and tokens are well-formed");
        ReductionOutput {
            program,
            pi,
            label_map: self.label_map,
        }
    }
}
