//! Polynomial decision procedure for 1-Writer programs.
//!
//! For each preemption-point set of size at most `pi`:
//!
//! 1. cut the program into a block program;
//! 2. order the outer blocks by their read/write conflicts and drop the set if
//!    the conflict graph has a cycle;
//! 3. for every order of the inner blocks that respects program order, place
//!    the outer blocks greedily into the gaps between inner blocks;
//! 4. re-check the whole expanded interleaving.
//!
//! With a single writer per variable, an outer block that writes `x` holds the
//! final value of `x`. Every read of `x` with another value has to be scheduled
//! before it, which is what makes the outer-block order forced.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::block::{
    build_block_program, expand, preemption_point_sets, validate_block_interleaving,
    BlockInterleaving, BlockProgram, BlockRef,
};
use crate::trace::{
    classify_writers, first_sc_violation, OpKind, Operation, Program, ValueId, VarId,
};
use crate::witness::{Decision, Solution, Witness};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OneWriterError {
    #[error("program is not 1-Writer: some variable has {max_writers} writer threads")]
    NotOneWriter { max_writers: usize },
}

/// Last write per variable, in first-write order.
fn last_writes(ops: &[Operation]) -> Vec<(VarId, ValueId)> {
    let mut out: Vec<(VarId, ValueId)> = Vec::new();
    for op in ops.iter().filter(|op| op.is_write()) {
        match out.iter_mut().find(|(v, _)| *v == op.var) {
            Some(slot) => slot.1 = op.value,
            None => out.push((op.var, op.value)),
        }
    }
    out
}

fn distinct_reads(ops: &[Operation]) -> Vec<(VarId, ValueId)> {
    let mut out: Vec<(VarId, ValueId)> = Vec::new();
    for op in ops.iter().filter(|op| op.is_read()) {
        if !out.contains(&(op.var, op.value)) {
            out.push((op.var, op.value));
        }
    }
    out
}

fn summaries_conflict(writes: &[(VarId, ValueId)], reads: &[(VarId, ValueId)]) -> bool {
    writes
        .iter()
        .any(|&(x, last)| reads.iter().any(|&(y, d)| x == y && d != last))
}

/// `writer` conflicts `reader`: they sit on different threads and for some
/// variable the last write of `writer` disagrees with a read in `reader`.
/// Earlier writes inside `writer` are ignored.
pub fn block_conflicts(writer: BlockRef, reader: BlockRef, bp: &BlockProgram<'_>) -> bool {
    writer.thread != reader.thread
        && summaries_conflict(
            &last_writes(bp.ops(writer)),
            &distinct_reads(bp.ops(reader)),
        )
}

/// Per-block read and last-write summaries, computed once per block program.
struct Summaries {
    writes: Vec<Vec<Vec<(VarId, ValueId)>>>,
    reads: Vec<Vec<Vec<(VarId, ValueId)>>>,
}

impl Summaries {
    fn new(bp: &BlockProgram<'_>) -> Self {
        let mut writes = Vec::with_capacity(bp.num_threads());
        let mut reads = Vec::with_capacity(bp.num_threads());
        for t in 0..bp.num_threads() {
            let (w, r): (Vec<_>, Vec<_>) = bp
                .thread_blocks(t)
                .iter()
                .map(|b| {
                    let ops = bp.ops(b.id());
                    (last_writes(ops), distinct_reads(ops))
                })
                .unzip();
            writes.push(w);
            reads.push(r);
        }
        Summaries { writes, reads }
    }

    fn conflicts(&self, writer: BlockRef, reader: BlockRef) -> bool {
        writer.thread != reader.thread
            && summaries_conflict(
                &self.writes[writer.thread][writer.position],
                &self.reads[reader.thread][reader.position],
            )
    }
}

/// Directed graph over the outer blocks (one per thread, indexed by thread);
/// an edge `reader -> writer` means the reader must come first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConflictGraph {
    nodes: Vec<BlockRef>,
    successors: Vec<Vec<usize>>,
}

impl ConflictGraph {
    pub fn nodes(&self) -> &[BlockRef] {
        &self.nodes
    }

    pub fn edges(&self) -> Vec<(BlockRef, BlockRef)> {
        self.successors
            .iter()
            .enumerate()
            .flat_map(|(from, tos)| {
                tos.iter()
                    .map(move |&to| (self.nodes[from], self.nodes[to]))
            })
            .collect()
    }

    pub fn has_edge(&self, from: BlockRef, to: BlockRef) -> bool {
        self.successors[from.thread].contains(&to.thread)
    }
}

pub fn build_conflict_graph(bp: &BlockProgram<'_>) -> ConflictGraph {
    build_conflict_graph_with(bp, &Summaries::new(bp))
}

fn build_conflict_graph_with(bp: &BlockProgram<'_>, summaries: &Summaries) -> ConflictGraph {
    let nodes = bp.outer_blocks();
    let successors = nodes
        .iter()
        .map(|&reader| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(_, &writer)| summaries.conflicts(writer, reader))
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    ConflictGraph { nodes, successors }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Linearization {
    Order(Vec<BlockRef>),
    /// Nodes along a cycle, each with an edge to the next and the last back
    /// to the first.
    Cycle(Vec<BlockRef>),
}

/// Topological order, smallest thread first among ready nodes.
pub fn topological_linearization(g: &ConflictGraph) -> Linearization {
    let n = g.nodes.len();
    let mut indegree = vec![0usize; n];
    for tos in &g.successors {
        for &to in tos {
            indegree[to] += 1;
        }
    }
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &to in &g.successors[i] {
            indegree[to] -= 1;
            if indegree[to] == 0 {
                ready.push(Reverse(to));
            }
        }
    }
    if order.len() == n {
        return Linearization::Order(order.into_iter().map(|i| g.nodes[i]).collect());
    }

    // Every leftover node has a leftover predecessor; walk predecessors until
    // a node repeats.
    let leftover: Vec<bool> = (0..n).map(|i| indegree[i] > 0).collect();
    let predecessor = |node: usize| {
        (0..n)
            .find(|&from| leftover[from] && g.successors[from].contains(&node))
            .expect("leftover node has a leftover predecessor")
    };
    let mut walk = vec![(0..n).find(|&i| leftover[i]).unwrap()];
    loop {
        let prev = predecessor(*walk.last().unwrap());
        if let Some(start) = walk.iter().position(|&v| v == prev) {
            let mut cycle: Vec<usize> = walk[start..].to_vec();
            cycle.reverse();
            return Linearization::Cycle(cycle.into_iter().map(|i| g.nodes[i]).collect());
        }
        walk.push(prev);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PlacementFailure {
    /// The inner order is not a linear extension of per-thread block order,
    /// or the linearization does not list each outer block once.
    BadInput,
    /// Outer blocks that never became placeable.
    Unplaced(Vec<BlockRef>),
    /// Every block was placed but the expansion has an unsatisfied read at
    /// this event position.
    FinalCheck { position: usize },
}

/// Inserts the outer blocks into the gaps of a fixed order of inner blocks.
///
/// Gap `i` lies just before `inner[i]`; gap `inner.len()` is after the last
/// inner block. In each gap the first outer block of `lin` that is enabled and
/// safe is placed, repeatedly, until none is. A block is enabled when all
/// earlier blocks of its thread are scheduled and its reads are satisfied by
/// the current memory as its own events execute. It is safe when it conflicts
/// neither a later inner block nor an outer block still waiting to be placed.
pub fn check_sc_placement(
    bp: &BlockProgram<'_>,
    inner: &[BlockRef],
    lin: &[BlockRef],
) -> Result<BlockInterleaving, PlacementFailure> {
    check_placement_with(bp, &Summaries::new(bp), inner, lin)
}

fn check_placement_with(
    bp: &BlockProgram<'_>,
    summaries: &Summaries,
    inner: &[BlockRef],
    lin: &[BlockRef],
) -> Result<BlockInterleaving, PlacementFailure> {
    let p = bp.program();
    let k = bp.num_threads();
    if inner.len() != bp.num_blocks() - k
        || validate_block_interleaving(bp, &BlockInterleaving::new(inner.to_vec())).is_err()
        || inner.iter().any(|b| bp.block(*b).is_outer)
    {
        return Err(PlacementFailure::BadInput);
    }
    let mut listed = vec![false; k];
    for b in lin {
        if b.thread >= k
            || *b != bp.outer_block(b.thread)
            || std::mem::replace(&mut listed[b.thread], true)
        {
            return Err(PlacementFailure::BadInput);
        }
    }
    if listed.iter().any(|l| !l) {
        return Err(PlacementFailure::BadInput);
    }

    let mut memory: Vec<Option<ValueId>> = vec![None; p.num_variables()];
    let mut scheduled_blocks = vec![0usize; k];
    let mut placed = vec![false; k];
    let mut remaining = k;
    let mut schedule: Vec<BlockRef> = Vec::with_capacity(bp.num_blocks());

    for gap in 0..=inner.len() {
        let later_inner = &inner[gap..];
        while remaining > 0 {
            let candidate = lin.iter().copied().find(|&b| {
                !placed[b.thread]
                    && scheduled_blocks[b.thread] == b.position
                    && reads_satisfied(bp.ops(b), &memory)
                    && !later_inner.iter().any(|&i| summaries.conflicts(b, i))
                    && !lin
                        .iter()
                        .any(|&o| o != b && !placed[o.thread] && summaries.conflicts(b, o))
            });
            let Some(b) = candidate else { break };
            apply_writes(bp.ops(b), &mut memory);
            placed[b.thread] = true;
            scheduled_blocks[b.thread] += 1;
            remaining -= 1;
            schedule.push(b);
        }
        if let Some(&b) = inner.get(gap) {
            apply_writes(bp.ops(b), &mut memory);
            scheduled_blocks[b.thread] += 1;
            schedule.push(b);
        }
    }

    if remaining > 0 {
        return Err(PlacementFailure::Unplaced(
            lin.iter().copied().filter(|b| !placed[b.thread]).collect(),
        ));
    }
    let bi = BlockInterleaving::new(schedule);
    let s = expand(bp, &bi).expect("placement respects block order");
    match first_sc_violation(p, &s).expect("expansion is an interleaving") {
        None => Ok(bi),
        Some(position) => Err(PlacementFailure::FinalCheck { position }),
    }
}

fn reads_satisfied(ops: &[Operation], memory: &[Option<ValueId>]) -> bool {
    // Writes inside the block may feed its own later reads.
    let mut local: Vec<(VarId, ValueId)> = Vec::new();
    for op in ops {
        let current = |var: VarId| {
            local
                .iter()
                .rev()
                .find(|(v, _)| *v == var)
                .map(|&(_, d)| d)
                .or(memory[var.0 as usize])
        };
        match op.kind {
            OpKind::Write => local.push((op.var, op.value)),
            OpKind::Read => {
                if current(op.var) != Some(op.value) {
                    return false;
                }
            }
        }
    }
    true
}

fn apply_writes(ops: &[Operation], memory: &mut [Option<ValueId>]) {
    for op in ops.iter().filter(|op| op.is_write()) {
        memory[op.var.0 as usize] = Some(op.value);
    }
}

/// Every order of the inner blocks that keeps each thread's blocks in order.
pub fn inner_block_orders(bp: &BlockProgram<'_>) -> Vec<Vec<BlockRef>> {
    let per_thread: Vec<usize> = (0..bp.num_threads())
        .map(|t| bp.thread_blocks(t).len() - 1)
        .collect();
    let total: usize = per_thread.iter().sum();
    let mut out = Vec::new();
    let mut next = vec![0usize; per_thread.len()];
    let mut current = Vec::with_capacity(total);
    merge_orders(&per_thread, &mut next, &mut current, total, &mut out);
    out
}

fn merge_orders(
    per_thread: &[usize],
    next: &mut [usize],
    current: &mut Vec<BlockRef>,
    total: usize,
    out: &mut Vec<Vec<BlockRef>>,
) {
    if current.len() == total {
        out.push(current.clone());
        return;
    }
    for t in 0..per_thread.len() {
        if next[t] < per_thread[t] {
            current.push(BlockRef::new(t, next[t]));
            next[t] += 1;
            merge_orders(per_thread, next, current, total, out);
            next[t] -= 1;
            current.pop();
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OneWriterStats {
    pub point_sets: usize,
    pub cyclic_point_sets: usize,
    pub placements: usize,
}

/// Decides whether a 1-Writer program has an SC interleaving with at most
/// `pi` preemptions. The returned witness is re-checked before it is handed
/// out; it is the first one found, not necessarily one with fewest
/// preemptions.
pub fn solve_one_writer(
    p: &Program,
    pi: usize,
) -> Result<Solution<OneWriterStats>, OneWriterError> {
    let class = classify_writers(p);
    if !class.is_one_writer() {
        return Err(OneWriterError::NotOneWriter {
            max_writers: class.max_writers,
        });
    }

    let mut stats = OneWriterStats::default();
    for points in preemption_point_sets(p, pi) {
        stats.point_sets += 1;
        let bp = build_block_program(p, points).expect("enumerated points are valid");
        let summaries = Summaries::new(&bp);
        let graph = build_conflict_graph_with(&bp, &summaries);
        let lin = match topological_linearization(&graph) {
            Linearization::Order(lin) => lin,
            Linearization::Cycle(_) => {
                stats.cyclic_point_sets += 1;
                continue;
            }
        };
        for inner in inner_block_orders(&bp) {
            stats.placements += 1;
            if let Ok(bi) = check_placement_with(&bp, &summaries, &inner, &lin) {
                let s = expand(&bp, &bi).expect("placement is valid");
                return Ok(Solution {
                    decision: Decision::Sat(Witness::certify(p, s, pi)),
                    stats,
                });
            }
        }
    }
    Ok(Solution {
        decision: Decision::Unsat,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::PreemptionPointSet;
    use crate::trace::{count_preemptions, parse_program, r, w, EventRef};

    fn three_thread() -> Program {
        parse_program("T1: w x 1\nT1: w x 2\nT1: r y 1\nT2: r x 2\nT2: w y 1\nT3: r x 1").unwrap()
    }

    /// Left-hand program of the conflict-graph example, with its four threads.
    fn example_p1() -> Program {
        Program::builder()
            .thread("S1", [r("y", 2)])
            .thread("S2", [w("y", 1), w("y", 2)])
            .thread("S3", [w("x", 1), w("x", 2), w("x", 3)])
            .thread("S4", [r("x", 2), r("x", 2)])
            .build()
            .unwrap()
    }

    fn p1_points() -> PreemptionPointSet {
        PreemptionPointSet::new([
            EventRef::new(1, 0),
            EventRef::new(2, 1),
            EventRef::new(3, 0),
        ])
    }

    fn example_p2() -> Program {
        Program::builder()
            .thread("S1", [w("x", 1), r("y", 1), w("x", 2)])
            .thread("S2", [w("y", 1), r("x", 1), w("y", 2)])
            .build()
            .unwrap()
    }

    fn p2_points() -> PreemptionPointSet {
        PreemptionPointSet::new([EventRef::new(0, 0), EventRef::new(1, 0)])
    }

    fn b(t: usize, pos: usize) -> BlockRef {
        BlockRef::new(t - 1, pos - 1)
    }

    #[test]
    fn outer_write_conflicts_outer_read() {
        let p = example_p1();
        let bp = build_block_program(&p, p1_points()).unwrap();
        assert!(block_conflicts(b(3, 2), b(4, 2), &bp));
        assert!(!block_conflicts(b(4, 2), b(3, 2), &bp));
        // Disjoint variables.
        assert!(!block_conflicts(b(2, 2), b(4, 2), &bp));
    }

    #[test]
    fn only_the_last_write_counts() {
        let p = Program::builder()
            .thread("W", [w("x", 1), w("x", 2)])
            .thread("R", [r("x", 1)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::empty()).unwrap();
        assert!(block_conflicts(b(1, 1), b(2, 1), &bp));

        let p = Program::builder()
            .thread("W", [w("x", 1), w("x", 2)])
            .thread("R", [r("x", 2)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::empty()).unwrap();
        assert!(!block_conflicts(b(1, 1), b(2, 1), &bp));
    }

    #[test]
    fn same_thread_never_conflicts() {
        let p = Program::builder()
            .thread("A", [r("x", 1), w("x", 2)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::new([EventRef::new(0, 0)])).unwrap();
        assert!(!block_conflicts(b(1, 2), b(1, 1), &bp));
    }

    #[test]
    fn p1_graph_has_a_single_edge() {
        let p = example_p1();
        let bp = build_block_program(&p, p1_points()).unwrap();
        let g = build_conflict_graph(&bp);
        assert_eq!(g.nodes().len(), 4);
        assert_eq!(g.edges(), [(b(4, 2), b(3, 2))]);
        assert_eq!(
            topological_linearization(&g),
            Linearization::Order(vec![b(1, 1), b(2, 2), b(4, 2), b(3, 2)])
        );
    }

    #[test]
    fn p2_graph_is_a_two_cycle() {
        let p = example_p2();
        let bp = build_block_program(&p, p2_points()).unwrap();
        let g = build_conflict_graph(&bp);
        assert_eq!(g.edges().len(), 2);
        assert!(g.has_edge(b(1, 2), b(2, 2)));
        assert!(g.has_edge(b(2, 2), b(1, 2)));
        match topological_linearization(&g) {
            Linearization::Cycle(c) => {
                assert_eq!(c.len(), 2);
                assert!(c.contains(&b(1, 2)) && c.contains(&b(2, 2)));
            }
            other => panic!("expected a cycle, got {other:?}"),
        }
    }

    #[test]
    fn cycle_report_follows_edges() {
        // Three-cycle S1 -> S2 -> S3 -> S1 plus an acyclic tail S4.
        let p = Program::builder()
            .thread("S1", [r("a", 0), w("c", 1)])
            .thread("S2", [r("b", 0), w("a", 1)])
            .thread("S3", [r("c", 0), w("b", 1)])
            .thread("S4", [r("a", 1)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::empty()).unwrap();
        let g = build_conflict_graph(&bp);
        let Linearization::Cycle(c) = topological_linearization(&g) else {
            panic!("expected cycle");
        };
        assert_eq!(c.len(), 3);
        for i in 0..c.len() {
            assert!(g.has_edge(c[i], c[(i + 1) % c.len()]));
        }
    }

    #[test]
    fn edgeless_graph_linearizes_in_thread_order() {
        let p = Program::builder()
            .thread("A", [r("x", 1)])
            .thread("B", [r("y", 1)])
            .thread("C", [r("z", 1)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::empty()).unwrap();
        let g = build_conflict_graph(&bp);
        assert!(g.edges().is_empty());
        assert_eq!(
            topological_linearization(&g),
            Linearization::Order(vec![b(1, 1), b(2, 1), b(3, 1)])
        );
    }

    #[test]
    fn placement_reproduces_the_worked_example() {
        let p = example_p1();
        let bp = build_block_program(&p, p1_points()).unwrap();
        let Linearization::Order(lin) = topological_linearization(&build_conflict_graph(&bp))
        else {
            panic!("acyclic");
        };
        let inner = [b(3, 1), b(2, 1), b(4, 1)];
        let bi = check_sc_placement(&bp, &inner, &lin).unwrap();
        assert_eq!(
            bi.order,
            [
                b(3, 1),
                b(2, 1),
                b(2, 2),
                b(1, 1),
                b(4, 1),
                b(4, 2),
                b(3, 2)
            ]
        );
    }

    #[test]
    fn placement_fails_when_an_inner_read_comes_first() {
        let p = example_p1();
        let bp = build_block_program(&p, p1_points()).unwrap();
        let Linearization::Order(lin) = topological_linearization(&build_conflict_graph(&bp))
        else {
            panic!("acyclic");
        };
        let inner = [b(4, 1), b(3, 1), b(2, 1)];
        assert!(check_sc_placement(&bp, &inner, &lin).is_err());
    }

    #[test]
    fn zero_inner_blocks_concatenate_in_lin_order() {
        let p = Program::builder()
            .thread("A", [w("x", 1)])
            .thread("B", [r("x", 1), w("y", 2)])
            .thread("C", [r("y", 2)])
            .build()
            .unwrap();
        let bp = build_block_program(&p, PreemptionPointSet::empty()).unwrap();
        let lin = [b(1, 1), b(2, 1), b(3, 1)];
        let bi = check_sc_placement(&bp, &[], &lin).unwrap();
        assert_eq!(bi.order, lin);
    }

    #[test]
    fn bad_placement_input() {
        let p = example_p1();
        let bp = build_block_program(&p, p1_points()).unwrap();
        let lin = bp.outer_blocks();
        assert_eq!(
            check_sc_placement(&bp, &[b(3, 1), b(2, 1)], &lin),
            Err(PlacementFailure::BadInput)
        );
        assert_eq!(
            check_sc_placement(&bp, &[b(3, 1), b(2, 1), b(4, 1)], &lin[..3]),
            Err(PlacementFailure::BadInput)
        );
    }

    #[test]
    fn inner_orders_are_linear_extensions() {
        let p = example_p1();
        let points = PreemptionPointSet::new([
            EventRef::new(2, 0),
            EventRef::new(2, 1),
            EventRef::new(3, 0),
        ]);
        let bp = build_block_program(&p, points).unwrap();
        let orders = inner_block_orders(&bp);
        // Two ordered blocks of S3 and one of S4: 3 merges.
        assert_eq!(orders.len(), 3);
        for o in &orders {
            let s3: Vec<_> = o.iter().filter(|b| b.thread == 2).collect();
            assert_eq!(s3, [&b(3, 1), &b(3, 2)]);
        }
    }

    #[test]
    fn three_thread_decisions() {
        let p = three_thread();
        let sol = solve_one_writer(&p, 2).unwrap();
        let wit = sol.decision.witness().expect("SAT at two preemptions");
        assert!(wit.preemptions <= 2);
        assert_eq!(
            count_preemptions(&p, &wit.interleaving),
            Ok(wit.preemptions)
        );

        assert!(!solve_one_writer(&p, 0).unwrap().is_sat());
        assert!(!solve_one_writer(&p, 1).unwrap().is_sat());
    }

    #[test]
    fn p2_rejects_the_cyclic_point_set() {
        let p = example_p2();
        let bp = build_block_program(&p, p2_points()).unwrap();
        assert!(matches!(
            topological_linearization(&build_conflict_graph(&bp)),
            Linearization::Cycle(_)
        ));
        let sol = solve_one_writer(&p, 2).unwrap();
        assert!(sol.stats.cyclic_point_sets >= 1);
    }

    #[test]
    fn multi_writer_programs_are_refused() {
        let p = Program::builder()
            .thread("A", [w("x", 1)])
            .thread("B", [w("x", 2)])
            .build()
            .unwrap();
        assert_eq!(
            solve_one_writer(&p, 1).unwrap_err(),
            OneWriterError::NotOneWriter { max_writers: 2 }
        );
    }

    #[test]
    fn deterministic_witnesses() {
        let p = example_p1();
        let a = solve_one_writer(&p, 3).unwrap().decision;
        let b = solve_one_writer(&p, 3).unwrap().decision;
        assert_eq!(a, b);
        assert!(a.is_sat());
    }
}
