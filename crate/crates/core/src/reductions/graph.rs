use std::collections::BTreeSet;
use std::fmt;

use super::ReductionError;

/// Simple undirected graph on vertices `1..=vertex_count`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    vertex_count: usize,
    /// Normalized so that `u < v`.
    edges: BTreeSet<(usize, usize)>,
}

pub const INDEPSET_BRUTEFORCE_CAP: usize = 20;

impl UndirectedGraph {
    pub fn new<I>(vertex_count: usize, edges: I) -> Result<Self, ReductionError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            if u == v {
                return Err(ReductionError::SelfLoop(u));
            }
            if u == 0 || v == 0 || u > vertex_count || v > vertex_count {
                return Err(ReductionError::BadVertex {
                    edge: (u, v),
                    vertex_count,
                });
            }
            set.insert((u.min(v), u.max(v)));
        }
        Ok(UndirectedGraph {
            vertex_count,
            edges: set,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u.min(v), u.max(v)))
    }

    /// Edges touching `u`, in ascending order.
    pub fn incident(&self, u: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .copied()
            .filter(move |&(a, b)| a == u || b == u)
    }

    /// `|V|` on the first line, then one `u v` pair per line. `#` starts a
    /// comment line.
    pub fn parse_edge_list(text: &str) -> Result<Self, ReductionError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let Some((line, header)) = lines.next() else {
            return Err(ReductionError::EmptyGraph);
        };
        let vertex_count: usize = header.parse().map_err(|_| ReductionError::Syntax {
            line,
            message: format!("expected a vertex count, got `{header}`"),
        })?;
        let mut edges = Vec::new();
        for (line, l) in lines {
            let fields: Vec<&str> = l.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                [u, v] => u.parse::<usize>().ok().zip(v.parse::<usize>().ok()),
                _ => None,
            };
            let edge = parsed.ok_or_else(|| ReductionError::Syntax {
                line,
                message: format!("expected `u v`, got `{l}`"),
            })?;
            edges.push(edge);
        }
        UndirectedGraph::new(vertex_count, edges)
    }
}

impl fmt::Display for UndirectedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.vertex_count)?;
        for (u, v) in &self.edges {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

/// Whether some `k` vertices are pairwise non-adjacent, by trying every
/// `k`-subset.
pub fn indepset_bruteforce(g: &UndirectedGraph, k: usize) -> Result<bool, ReductionError> {
    let n = g.vertex_count();
    if n > INDEPSET_BRUTEFORCE_CAP {
        return Err(ReductionError::TooLarge {
            size: n,
            cap: INDEPSET_BRUTEFORCE_CAP,
        });
    }
    if k > n {
        return Ok(false);
    }
    let neighbours: Vec<u32> = (1..=n)
        .map(|u| {
            g.incident(u)
                .map(|(a, b)| if a == u { b } else { a })
                .fold(0u32, |m, v| m | 1 << (v - 1))
        })
        .collect();
    Ok((0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .any(|mask| {
            (0..n)
                .filter(|&i| mask & (1 << i) != 0)
                .all(|i| neighbours[i] & mask == 0)
        }))
}
