use crate::trace::{r, w, TokenOp};

use super::{CnfFormula, Gadget, ReductionOutput};

#[derive(Copy, Clone, PartialEq, Eq)]
enum Writers {
    Three,
    Two,
}

/// Program with `6k + 1` threads and `k + m + 1` variables that has a
/// zero-preemption SC interleaving iff `f` is satisfiable. Every `c_j` is
/// written by at most three threads.
pub fn sat3_to_3writer(f: &CnfFormula) -> ReductionOutput {
    build(f, Writers::Three)
}

/// Variant where the third literal of clause `j` writes `d_j` instead and a
/// relay thread copies `c_j` into `d_j`, so no variable has more than two
/// writers. `6k + m + 1` threads.
pub fn sat3_to_2writer(f: &CnfFormula) -> ReductionOutput {
    build(f, Writers::Two)
}

fn build(f: &CnfFormula, writers: Writers) -> ReductionOutput {
    let mut g = Gadget::new();
    for i in 1..=f.num_vars() {
        let v = format!("v{i}");
        for b in [0, 1] {
            g.thread(format!("S{i}_{b}"), format!("S_{i}^{b}"), vec![w(&v, b)]);
            g.thread(
                format!("H{i}_{b}"),
                format!("H_{i}^{b}"),
                vec![r("x", 1), r(&v, b)],
            );
        }
        for (lit, b, label, role) in [
            (i as i32, 1, format!("Lx{i}"), format!("S_x{i}")),
            (-(i as i32), 0, format!("Lnx{i}"), format!("S_not_x{i}")),
        ] {
            let mut ops = vec![r(&v, b)];
            ops.extend(literal_writes(f, lit, writers));
            g.thread(label, role, ops);
        }
    }
    let target = match writers {
        Writers::Three => "c",
        Writers::Two => "d",
    };
    if writers == Writers::Two {
        for j in 1..=f.num_clauses() {
            g.thread(
                format!("C{j}"),
                format!("S_{j}"),
                vec![r(format!("c{j}"), 1), w(format!("d{j}"), 1)],
            );
        }
    }
    let mut last: Vec<TokenOp> = (1..=f.num_clauses())
        .map(|j| r(format!("{target}{j}"), 1))
        .collect();
    last.push(w("x", 1));
    g.thread("Sf".into(), "S_f".into(), last);
    g.finish(0)
}

fn literal_writes(f: &CnfFormula, lit: i32, writers: Writers) -> Vec<TokenOp> {
    let mut ops = Vec::new();
    for j in f.occurrences(lit) {
        let [a, b, c] = f.clauses()[j - 1];
        match writers {
            Writers::Three => ops.push(w(format!("c{j}"), 1)),
            Writers::Two => {
                if a == lit || b == lit {
                    ops.push(w(format!("c{j}"), 1));
                }
                if c == lit {
                    ops.push(w(format!("d{j}"), 1));
                }
            }
        }
    }
    ops
}
