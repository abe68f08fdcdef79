//! Preemption-point sets and the block programs they induce.
//!
//! Choosing a set of events after which preemptions happen splits every thread
//! into contiguous blocks. Each block except the last of its thread ("inner"
//! blocks) ends at a chosen point; the last block of each thread is "outer".

use std::collections::BTreeSet;
use std::ops::RangeInclusive;

use itertools::Itertools;
use thiserror::Error;

use crate::trace::{EventRef, Interleaving, Operation, Program};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error("preemption point {0} is the last event of its thread")]
    PointIsLast(EventRef),
    #[error("preemption point {0} is not an event of the program")]
    UnknownPoint(EventRef),
    #[error("position {position}: unknown block {block:?}")]
    UnknownBlock { position: usize, block: BlockRef },
    #[error("position {position}: block {block:?} is out of thread order")]
    BlockOrder { position: usize, block: BlockRef },
}

/// Events after which preemptions are allowed to occur.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PreemptionPointSet {
    points: BTreeSet<EventRef>,
}

impl PreemptionPointSet {
    pub fn new<I: IntoIterator<Item = EventRef>>(points: I) -> Self {
        PreemptionPointSet {
            points: points.into_iter().collect(),
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, e: EventRef) -> bool {
        self.points.contains(&e)
    }

    pub fn iter(&self) -> impl Iterator<Item = EventRef> + '_ {
        self.points.iter().copied()
    }

    pub fn validate(&self, p: &Program) -> Result<(), BlockError> {
        for &e in &self.points {
            if !p.contains(e) {
                return Err(BlockError::UnknownPoint(e));
            }
            if p.is_last(e) {
                return Err(BlockError::PointIsLast(e));
            }
        }
        Ok(())
    }
}

/// Every set of at most `pi` non-last events, smallest sets first. Within a
/// size, sets come in lexicographic order of thread-major event positions.
pub fn preemption_point_sets(
    p: &Program,
    pi: usize,
) -> impl Iterator<Item = PreemptionPointSet> + '_ {
    let candidates: Vec<EventRef> = p.events().filter(|&e| !p.is_last(e)).collect();
    let max = pi.min(candidates.len());
    (0..=max).flat_map(move |size| {
        candidates
            .clone()
            .into_iter()
            .combinations(size)
            .map(PreemptionPointSet::new)
    })
}

/// A block is named by its thread and its ordinal inside that thread.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BlockRef {
    pub thread: usize,
    pub position: usize,
}

impl BlockRef {
    pub fn new(thread: usize, position: usize) -> Self {
        BlockRef { thread, position }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub thread: usize,
    /// First event index.
    pub lo: usize,
    /// Last event index, inclusive.
    pub hi: usize,
    pub position: usize,
    pub is_outer: bool,
}

impl Block {
    pub fn id(&self) -> BlockRef {
        BlockRef::new(self.thread, self.position)
    }

    pub fn span(&self) -> RangeInclusive<usize> {
        self.lo..=self.hi
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn events(&self) -> impl Iterator<Item = EventRef> + '_ {
        self.span().map(move |i| EventRef::new(self.thread, i))
    }
}

/// A program whose threads are cut into blocks at a preemption-point set.
#[derive(Clone, Debug)]
pub struct BlockProgram<'p> {
    program: &'p Program,
    points: PreemptionPointSet,
    blocks: Vec<Vec<Block>>,
}

pub fn build_block_program(
    p: &Program,
    points: PreemptionPointSet,
) -> Result<BlockProgram<'_>, BlockError> {
    points.validate(p)?;
    let mut blocks: Vec<Vec<Block>> = (0..p.num_threads()).map(|_| Vec::new()).collect();
    for (t, thread_blocks) in blocks.iter_mut().enumerate() {
        let mut lo = 0;
        for cut in points.iter().filter(|e| e.thread == t) {
            thread_blocks.push(Block {
                thread: t,
                lo,
                hi: cut.index,
                position: thread_blocks.len(),
                is_outer: false,
            });
            lo = cut.index + 1;
        }
        thread_blocks.push(Block {
            thread: t,
            lo,
            hi: p.thread_len(t) - 1,
            position: thread_blocks.len(),
            is_outer: true,
        });
    }
    Ok(BlockProgram {
        program: p,
        points,
        blocks,
    })
}

impl<'p> BlockProgram<'p> {
    pub fn program(&self) -> &'p Program {
        self.program
    }

    pub fn points(&self) -> &PreemptionPointSet {
        &self.points
    }

    pub fn num_threads(&self) -> usize {
        self.blocks.len()
    }

    pub fn thread_blocks(&self, thread: usize) -> &[Block] {
        &self.blocks[thread]
    }

    pub fn block(&self, id: BlockRef) -> &Block {
        &self.blocks[id.thread][id.position]
    }

    pub fn try_block(&self, id: BlockRef) -> Option<&Block> {
        self.blocks.get(id.thread)?.get(id.position)
    }

    pub fn ops(&self, id: BlockRef) -> &'p [Operation] {
        let b = self.block(id);
        &self.program.thread(b.thread)[b.lo..=b.hi]
    }

    /// Inner blocks in thread-major order.
    pub fn inner_blocks(&self) -> Vec<BlockRef> {
        self.blocks
            .iter()
            .flat_map(|bs| bs.iter().filter(|b| !b.is_outer).map(Block::id))
            .collect()
    }

    /// One outer block per thread, in thread order.
    pub fn outer_blocks(&self) -> Vec<BlockRef> {
        self.blocks
            .iter()
            .map(|bs| bs.last().expect("every thread has a block").id())
            .collect()
    }

    pub fn outer_block(&self, thread: usize) -> BlockRef {
        BlockRef::new(thread, self.blocks[thread].len() - 1)
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }
}

/// A global order over (a prefix-closed subset of) the blocks.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlockInterleaving {
    pub order: Vec<BlockRef>,
}

impl BlockInterleaving {
    pub fn new(order: Vec<BlockRef>) -> Self {
        BlockInterleaving { order }
    }
}

/// Each block must be the next unscheduled block of its thread.
pub fn validate_block_interleaving(
    bp: &BlockProgram<'_>,
    bi: &BlockInterleaving,
) -> Result<(), BlockError> {
    let mut next = vec![0usize; bp.num_threads()];
    for (position, &block) in bi.order.iter().enumerate() {
        if bp.try_block(block).is_none() {
            return Err(BlockError::UnknownBlock { position, block });
        }
        if next[block.thread] != block.position {
            return Err(BlockError::BlockOrder { position, block });
        }
        next[block.thread] += 1;
    }
    Ok(())
}

/// Replaces every block by its events.
pub fn expand(bp: &BlockProgram<'_>, bi: &BlockInterleaving) -> Result<Interleaving, BlockError> {
    validate_block_interleaving(bp, bi)?;
    Ok(bi
        .order
        .iter()
        .flat_map(|&b| bp.block(b).events().collect::<Vec<_>>())
        .collect())
}
