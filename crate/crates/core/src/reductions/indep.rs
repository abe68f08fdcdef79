use crate::trace::{r, w, TokenOp};

use super::{Gadget, ReductionError, ReductionOutput, UndirectedGraph};

fn edge_var((u, v): (usize, usize)) -> String {
    format!("y{u}_{v}")
}

/// Program with `2 k_sel + 1` threads that has an SC interleaving with
/// `3 k_sel` preemptions iff `g` has an independent set of size `k_sel`.
///
/// Selector `j` walks every vertex in ascending order; in each vertex block it
/// claims the incident edges by writing `j` to their `y` variables. The checker
/// chain forces each selector to stop inside exactly one block while the
/// others run, so the chosen vertices must not share an edge.
pub fn indepset_to_program(
    g: &UndirectedGraph,
    k_sel: usize,
) -> Result<ReductionOutput, ReductionError> {
    if g.vertex_count() == 0 {
        return Err(ReductionError::EmptyGraph);
    }
    if k_sel == 0 {
        return Err(ReductionError::NoSelectors);
    }
    if k_sel > g.vertex_count() {
        return Err(ReductionError::TooManySelectors {
            k_sel,
            vertex_count: g.vertex_count(),
        });
    }

    let mut gadget = Gadget::new();

    let mut init: Vec<TokenOp> = g.edges().map(|e| w(edge_var(e), 0)).collect();
    init.extend((1..=k_sel).map(|j| w(format!("x{j}"), 1)));
    init.push(w("s", 1));
    init.push(w("p0", 1));
    gadget.thread("Init".into(), "Init".into(), init);

    for j in 1..=k_sel {
        let mut ops = vec![r(format!("p{}", j - 1), 1)];
        if j != k_sel {
            ops.push(w("s", 0));
        }
        ops.push(r(format!("x{j}"), 0));
        if j == k_sel {
            ops.push(w("s", 1));
        }
        ops.push(w(format!("p{j}"), 1));
        gadget.thread(format!("Checker{j}"), format!("Checker_{j}"), ops);
    }

    for j in 1..=k_sel {
        let mut ops = Vec::new();
        for u in 1..=g.vertex_count() {
            let incident: Vec<String> = g.incident(u).map(edge_var).collect();
            for y in &incident {
                ops.push(r(y, 0));
                ops.push(w(y, j));
            }
            ops.push(r("s", 1));
            ops.push(w(format!("x{j}"), 0));
            ops.push(w(format!("x{j}"), 1));
            for y in &incident {
                ops.push(r(y, j));
                ops.push(w(y, 0));
            }
        }
        gadget.thread(format!("Sel{j}"), format!("Sel_{j}"), ops);
    }

    Ok(gadget.finish(3 * k_sel))
}
