//! Deciding whether a multi-threaded history of reads and writes has a
//! sequentially consistent interleaving with at most `pi` preemptions.
//!
//! * [`trace`]: programs, interleavings, the SC and preemption definitions,
//!   writer classification and the text trace format.
//! * [`block`]: preemption-point sets and block programs.
//! * [`onewriter`]: the polynomial procedure for programs where every variable
//!   has a single writer thread.
//! * [`exact`]: memoized exhaustive search for arbitrary programs, plus a
//!   brute-force enumeration oracle.
//! * [`reductions`]: hardness gadgets from 3-CNF and independent set, with
//!   brute-force deciders for the source problems.

pub mod block;
pub mod exact;
pub mod onewriter;
pub mod reductions;
pub mod trace;
mod witness;

pub use exact::{enumerate_all, solve_exact, solve_exact_with, ExactConfig, ExactError};
pub use onewriter::{solve_one_writer, OneWriterError};
pub use trace::{
    classify_writers, count_preemptions, is_sequentially_consistent, parse_program, EventRef,
    Interleaving, Program,
};
pub use witness::{Decision, Solution, Witness};
