//! Fixtures and corpus generators shared by the integration tests.
#![allow(dead_code)]

use rand::seq::SliceRandom;
use rand::Rng;
use vscp_core::reductions::{CnfFormula, UndirectedGraph};
use vscp_core::trace::{r, w, TokenOp};
use vscp_core::Program;

pub fn three_thread() -> Program {
    vscp_core::parse_program("T1: w x 1\nT1: w x 2\nT1: r y 1\nT2: r x 2\nT2: w y 1\nT3: r x 1")
        .unwrap()
}

/// Program whose chosen block split yields a single conflict edge.
pub fn example_p1() -> Program {
    Program::builder()
        .thread("S1", [r("y", 2)])
        .thread("S2", [w("y", 1), w("y", 2)])
        .thread("S3", [w("x", 1), w("x", 2), w("x", 3)])
        .thread("S4", [r("x", 2), r("x", 2)])
        .build()
        .unwrap()
}

/// Program whose chosen block split yields a conflict cycle.
pub fn example_p2() -> Program {
    Program::builder()
        .thread("S1", [w("x", 1), r("y", 1), w("x", 2)])
        .thread("S2", [w("y", 1), r("x", 1), w("y", 2)])
        .build()
        .unwrap()
}

fn build(threads: Vec<Vec<TokenOp>>) -> Program {
    let mut b = Program::builder();
    for (t, ops) in threads.into_iter().enumerate() {
        b.push_thread(format!("T{}", t + 1), ops);
    }
    b.build().unwrap()
}

/// Knobs for [`random_program`].
#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_threads: usize,
    pub max_events: usize,
    pub vars: usize,
    pub values: u32,
    pub one_writer: bool,
}

/// Random program built along a random schedule. Reads mostly return the
/// value current at that point of the schedule, so the corpus mixes
/// consistent and inconsistent programs and varies the preemptions needed.
pub fn random_program<R: Rng>(rng: &mut R, shape: Shape) -> Program {
    let k = rng.gen_range(1..=shape.max_threads);
    let n = rng.gen_range(k..=shape.max_events.max(k));
    let mut lens = vec![1; k];
    for _ in k..n {
        lens[rng.gen_range(0..k)] += 1;
    }
    let owner: Vec<usize> = (0..shape.vars).map(|_| rng.gen_range(0..k)).collect();
    let mut schedule: Vec<usize> = (0..k)
        .flat_map(|t| std::iter::repeat_n(t, lens[t]))
        .collect();
    if rng.gen_bool(0.4) {
        // Threads one after another, then a few adjacent swaps.
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(rng);
        schedule = order
            .iter()
            .flat_map(|&t| std::iter::repeat_n(t, lens[t]))
            .collect();
        for _ in 0..rng.gen_range(0..3) {
            let i = rng.gen_range(0..n);
            schedule.swap(i, (i + 1).min(n - 1));
        }
    } else {
        schedule.shuffle(rng);
    }

    let mut memory: Vec<Option<u32>> = vec![None; shape.vars];
    let mut threads: Vec<Vec<TokenOp>> = vec![Vec::new(); k];
    for t in schedule {
        let own: Vec<usize> = (0..shape.vars)
            .filter(|&v| !shape.one_writer || owner[v] == t)
            .collect();
        let write = !own.is_empty() && rng.gen_bool(0.5);
        if write {
            let v = own[rng.gen_range(0..own.len())];
            let d = rng.gen_range(1..=shape.values);
            memory[v] = Some(d);
            threads[t].push(w(format!("v{v}"), d));
        } else {
            let v = rng.gen_range(0..shape.vars);
            let d = match memory[v] {
                Some(d) if rng.gen_bool(0.85) => d,
                _ => rng.gen_range(1..=shape.values),
            };
            threads[t].push(r(format!("v{v}"), d));
        }
    }
    build(threads)
}

/// Large 1-Writer program with exactly `k` threads of `per_thread` events,
/// built along a schedule with at most `preemptions` preemptions. Reads
/// return the current value, except that with `corrupt` one read is changed
/// to a value that is never written.
pub fn planted_one_writer<R: Rng>(
    rng: &mut R,
    k: usize,
    per_thread: usize,
    preemptions: usize,
    corrupt: bool,
) -> Program {
    let vars_per_thread = 2;
    let mut memory: Vec<Option<u32>> = vec![None; k * vars_per_thread];
    let mut threads: Vec<Vec<TokenOp>> = vec![Vec::new(); k];
    let mut order: Vec<usize> = (0..k).collect();
    order.shuffle(rng);
    let n = k * per_thread;
    let mut cut_at: Vec<usize> = (0..preemptions).map(|_| rng.gen_range(1..n)).collect();
    cut_at.sort_unstable();

    let mut queue = order;
    let mut step = 0;
    while let Some(&t) = queue.first() {
        if threads[t].len() == per_thread {
            queue.remove(0);
            continue;
        }
        if cut_at.first() == Some(&step) && queue.len() > 1 {
            cut_at.remove(0);
            // Switch to another thread and resume this one later.
            let t = queue.remove(0);
            let at = rng.gen_range(1..=queue.len());
            queue.insert(at, t);
            continue;
        }
        let known: Vec<usize> = (0..memory.len()).filter(|&v| memory[v].is_some()).collect();
        if !known.is_empty() && rng.gen_bool(0.5) {
            let v = known[rng.gen_range(0..known.len())];
            threads[t].push(r(format!("v{v}"), memory[v].unwrap()));
        } else {
            let v = t * vars_per_thread + rng.gen_range(0..vars_per_thread);
            let d = rng.gen_range(1..=3);
            memory[v] = Some(d);
            threads[t].push(w(format!("v{v}"), d));
        }
        step += 1;
    }
    if corrupt {
        let reads: Vec<(usize, usize)> = threads
            .iter()
            .enumerate()
            .flat_map(|(t, ops)| {
                ops.iter()
                    .enumerate()
                    .filter(|(_, op)| op.kind == vscp_core::trace::OpKind::Read)
                    .map(move |(i, _)| (t, i))
            })
            .collect();
        if let Some(&(t, i)) = reads.choose(rng) {
            threads[t][i].value = "99".into();
        }
    }
    build(threads)
}

pub fn random_cnf<R: Rng>(rng: &mut R, max_vars: usize, max_clauses: usize) -> CnfFormula {
    let k = rng.gen_range(1..=max_vars);
    let m = rng.gen_range(1..=max_clauses);
    let clauses = (0..m)
        .map(|_| {
            [0; 3].map(|_| {
                let v = rng.gen_range(1..=k as i32);
                if rng.gen_bool(0.5) {
                    v
                } else {
                    -v
                }
            })
        })
        .collect();
    CnfFormula::new(k, clauses).unwrap()
}

/// Every labelled simple graph on `1..=n` vertices.
pub fn all_graphs(n: usize) -> Vec<UndirectedGraph> {
    let pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|u| (u + 1..=n).map(move |v| (u, v)))
        .collect();
    (0u32..1 << pairs.len())
        .map(|mask| {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, &e)| e);
            UndirectedGraph::new(n, edges).unwrap()
        })
        .collect()
}

/// Every 1-Writer program with at most `max_threads` threads of length 1 to
/// `max_len` over variables `x`, `y` and values `1`, `2`, up to reordering
/// threads, swapping the variables and swapping the values of either
/// variable. These renamings preserve both verdicts, so one representative
/// per class suffices.
pub fn exhaustive_one_writer(
    max_threads: usize,
    max_len: usize,
    mut visit: impl FnMut(&Program),
) -> usize {
    // An op is three bits: write flag, variable, value.
    let threads: Vec<Vec<u8>> = (1..=max_len as u32)
        .flat_map(|len| {
            (0..8usize.pow(len)).map(move |code| {
                (0..len)
                    .rev()
                    .map(|i| (code >> (3 * i) & 7) as u8)
                    .collect()
            })
        })
        .collect();
    let index: std::collections::HashMap<Vec<u8>, usize> = threads
        .iter()
        .cloned()
        .enumerate()
        .map(|(i, t)| (t, i))
        .collect();

    let map_op = |op: u8, g: u8| -> u8 {
        let (kind, var, val) = (op >> 2 & 1, op >> 1 & 1, op & 1);
        let flip = g >> (1 + var) & 1;
        let var2 = var ^ (g & 1);
        kind << 2 | var2 << 1 | (val ^ flip)
    };
    let images: Vec<Vec<usize>> = (0..8u8)
        .map(|g| {
            threads
                .iter()
                .map(|t| index[&t.iter().map(|&op| map_op(op, g)).collect::<Vec<_>>()])
                .collect()
        })
        .collect();
    let writes: Vec<u8> = threads
        .iter()
        .map(|t| {
            t.iter()
                .filter(|&&op| op & 4 != 0)
                .fold(0, |m, &op| m | 1 << (op >> 1 & 1))
        })
        .collect();

    let to_program = |combo: &[usize]| {
        let ops = combo
            .iter()
            .map(|&t| {
                threads[t]
                    .iter()
                    .map(|&op| {
                        let var = if op & 2 == 0 { "x" } else { "y" };
                        let val = 1 + (op & 1);
                        if op & 4 != 0 {
                            w(var, val)
                        } else {
                            r(var, val)
                        }
                    })
                    .collect()
            })
            .collect();
        build(ops)
    };

    let mut count = 0;
    let mut combo = Vec::new();
    fn rec(
        start: usize,
        mask: u8,
        left: usize,
        combo: &mut Vec<usize>,
        n: usize,
        writes: &[u8],
        f: &mut dyn FnMut(&[usize]),
    ) {
        if !combo.is_empty() {
            f(combo);
        }
        if left == 0 {
            return;
        }
        for t in start..n {
            if writes[t] & mask != 0 {
                continue;
            }
            combo.push(t);
            rec(t, mask | writes[t], left - 1, combo, n, writes, f);
            combo.pop();
        }
    }
    let mut image = Vec::with_capacity(max_threads);
    rec(
        0,
        0,
        max_threads,
        &mut combo,
        threads.len(),
        &writes,
        &mut |c| {
            for g in &images[1..] {
                image.clear();
                image.extend(c.iter().map(|&t| g[t]));
                image.sort_unstable();
                if image.as_slice() < c {
                    return;
                }
            }
            count += 1;
            visit(&to_program(c));
        },
    );
    count
}
