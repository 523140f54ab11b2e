//! Elementary-cycle enumeration on vertex-induced subgraphs.
//!
//! Backtracking with blocking sets (Johnson 1975): every elementary cycle is
//! reported exactly once, rotated so that it starts at its smallest vertex.

use thiserror::Error;

use crate::graph::{SideInfoGraph, Vertex};

/// Default cap on the number of cycles or paths a single search may produce.
pub const DEFAULT_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("search produced more than {limit} results")]
pub struct LimitExceeded {
    pub limit: usize,
}

/// Enumerates the elementary cycles of the subgraph induced by `allowed`.
///
/// Cycles are returned as vertex sequences starting at their minimum vertex and
/// sorted lexicographically.
pub fn elementary_cycles<F>(g: &SideInfoGraph, allowed: F, limit: usize) -> Result<Vec<Vec<Vertex>>, LimitExceeded>
where
    F: Fn(Vertex) -> bool,
{
    let n = g.num_vertices() as usize;
    let allowed: Vec<bool> = (1..=n as Vertex).map(&allowed).collect();
    let mut search = Search {
        g,
        allowed: &allowed,
        blocked: vec![false; n + 1],
        blockers: vec![Vec::new(); n + 1],
        stack: Vec::new(),
        found: Vec::new(),
        limit,
        start: 0,
    };
    for s in 1..=n as Vertex {
        if !allowed[(s - 1) as usize] {
            continue;
        }
        search.start = s;
        for v in s..=n as Vertex {
            search.blocked[v as usize] = false;
            search.blockers[v as usize].clear();
        }
        search.circuit(s)?;
    }
    let mut found = search.found;
    found.sort();
    Ok(found)
}

struct Search<'a> {
    g: &'a SideInfoGraph,
    allowed: &'a [bool],
    blocked: Vec<bool>,
    blockers: Vec<Vec<Vertex>>,
    stack: Vec<Vertex>,
    found: Vec<Vec<Vertex>>,
    limit: usize,
    start: Vertex,
}

impl Search<'_> {
    fn usable(&self, w: Vertex) -> bool {
        w >= self.start && self.allowed[(w - 1) as usize]
    }

    fn unblock(&mut self, u: Vertex) {
        let mut pending = vec![u];
        while let Some(x) = pending.pop() {
            if !self.blocked[x as usize] {
                continue;
            }
            self.blocked[x as usize] = false;
            pending.append(&mut self.blockers[x as usize]);
        }
    }

    fn circuit(&mut self, v: Vertex) -> Result<bool, LimitExceeded> {
        let mut closed = false;
        self.stack.push(v);
        self.blocked[v as usize] = true;
        let succ: Vec<Vertex> = self.g.out(v).iter().copied().filter(|&w| self.usable(w)).collect();
        for &w in &succ {
            if w == self.start {
                if self.found.len() >= self.limit {
                    return Err(LimitExceeded { limit: self.limit });
                }
                self.found.push(self.stack.clone());
                closed = true;
            } else if !self.blocked[w as usize] && self.circuit(w)? {
                closed = true;
            }
        }
        if closed {
            self.unblock(v);
        } else {
            for &w in &succ {
                let list = &mut self.blockers[w as usize];
                if !list.contains(&v) {
                    list.push(v);
                }
            }
        }
        self.stack.pop();
        Ok(closed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: u32, edges: &[(u32, u32)]) -> SideInfoGraph {
        SideInfoGraph::new(n, &[1], edges.iter().copied()).unwrap()
    }

    #[test]
    fn complete_digraph_on_four_vertices() {
        // 6 two-cycles, 8 three-cycles, 6 four-cycles.
        let edges: Vec<_> = (1..=4).flat_map(|u| (1..=4).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let g = graph(4, &edges);
        let cycles = elementary_cycles(&g, |_| true, DEFAULT_LIMIT).unwrap();
        assert_eq!(cycles.len(), 20);
        assert!(cycles.iter().all(|c| c[0] == *c.iter().min().unwrap()));
    }

    #[test]
    fn respects_vertex_mask() {
        let g = graph(4, &[(1, 2), (2, 1), (2, 3), (3, 4), (4, 2)]);
        let cycles = elementary_cycles(&g, |v| v != 1, DEFAULT_LIMIT).unwrap();
        assert_eq!(cycles, vec![vec![2, 3, 4]]);
        let all = elementary_cycles(&g, |_| true, DEFAULT_LIMIT).unwrap();
        assert_eq!(all, vec![vec![1, 2], vec![2, 3, 4]]);
    }

    #[test]
    fn acyclic_graph_has_no_cycles() {
        let g = graph(4, &[(1, 2), (2, 3), (1, 3), (3, 4)]);
        assert!(elementary_cycles(&g, |_| true, DEFAULT_LIMIT).unwrap().is_empty());
    }

    #[test]
    fn limit_is_enforced() {
        let edges: Vec<_> = (1..=4).flat_map(|u| (1..=4).filter(move |&v| v != u).map(move |v| (u, v))).collect();
        let g = graph(4, &edges);
        assert_eq!(elementary_cycles(&g, |_| true, 5), Err(LimitExceeded { limit: 5 }));
    }
}
