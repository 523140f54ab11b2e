//! Recognition of interlinked-cycle (IC) structures.
//!
//! A graph with inner set `V_I` is an IC structure when
//! 1. no directed cycle contains exactly one inner vertex (no I-cycle),
//! 2. every ordered pair of distinct inner vertices is joined by exactly one
//!    I-path (a path whose interior avoids inner vertices), and
//! 3. every edge lies on one of the `K` rooted trees formed by those I-paths.
//!
//! Outer cycles (cycles through non-inner vertices only) are reported but do not
//! disqualify a graph.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::OuterCycle;
use crate::cycles::{elementary_cycles, LimitExceeded, DEFAULT_LIMIT};
use crate::graph::{SideInfoGraph, Vertex, VertexSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValidateError {
    #[error("vertex {0} is not an inner vertex")]
    NotInner(Vertex),
    #[error("I-path endpoints must differ (got {0} twice)")]
    SameEndpoints(Vertex),
    #[error("need at least two inner vertices, found {0}")]
    TooFewInner(usize),
    #[error("expected exactly one I-path {from} -> {to}, found {count}")]
    IPathNotUnique { from: Vertex, to: Vertex, count: usize },
    #[error("I-paths from {root} reach vertex {vertex} through two different predecessors")]
    TreeConflict { root: Vertex, vertex: Vertex },
    #[error("not an IC structure")]
    NotIcStructure(Box<ValidationReport>),
    #[error(transparent)]
    Limit(#[from] LimitExceeded),
}

/// A directed path as its vertex sequence, endpoints included.
pub type Path = Vec<Vertex>;

/// Tree of the I-paths leaving an inner vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootedTree {
    pub root: Vertex,
    pub parent_of: BTreeMap<Vertex, Vertex>,
    pub depth_of: BTreeMap<Vertex, u32>,
}

impl RootedTree {
    pub fn contains(&self, v: Vertex) -> bool {
        self.depth_of.contains_key(&v)
    }

    pub fn depth(&self, v: Vertex) -> Option<u32> {
        self.depth_of.get(&v).copied()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.depth_of.keys().copied()
    }

    /// Non-inner vertices of the tree, `V_NI(i)`.
    pub fn non_inner(&self, g: &SideInfoGraph) -> VertexSet {
        self.vertices().filter(|&v| !g.is_inner(v)).collect()
    }

    /// Children of the root, `N⁺_{T_i}(i)`.
    pub fn root_children(&self) -> VertexSet {
        self.parent_of.iter().filter(|(_, &p)| p == self.root).map(|(&v, _)| v).collect()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.parent_of.iter().map(|(&v, &p)| (p, v))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IPathViolation {
    pub from: Vertex,
    pub to: Vertex,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub is_ic_structure: bool,
    pub i_cycles_found: Vec<Vec<Vertex>>,
    pub ipath_violations: Vec<IPathViolation>,
    pub union_gap: Vec<[Vertex; 2]>,
    pub outer_cycles: Vec<OuterCycle>,
    pub has_outer_cycles: bool,
}

/// Every elementary cycle containing exactly one inner vertex.
pub fn find_i_cycles(g: &SideInfoGraph) -> Result<Vec<Vec<Vertex>>, LimitExceeded> {
    find_i_cycles_limited(g, DEFAULT_LIMIT)
}

pub fn find_i_cycles_limited(g: &SideInfoGraph, limit: usize) -> Result<Vec<Vec<Vertex>>, LimitExceeded> {
    let mut found = Vec::new();
    for &i in g.inner() {
        let cycles = elementary_cycles(g, |v| v == i || !g.is_inner(v), limit)?;
        found.extend(cycles.into_iter().filter(|c| c.contains(&i)));
        if found.len() > limit {
            return Err(LimitExceeded { limit });
        }
    }
    found.sort();
    Ok(found)
}

/// Every elementary cycle through non-inner vertices only.
pub fn find_outer_cycles(g: &SideInfoGraph) -> Result<Vec<OuterCycle>, LimitExceeded> {
    find_outer_cycles_limited(g, DEFAULT_LIMIT)
}

pub fn find_outer_cycles_limited(g: &SideInfoGraph, limit: usize) -> Result<Vec<OuterCycle>, LimitExceeded> {
    Ok(elementary_cycles(g, |v| !g.is_inner(v), limit)?.into_iter().map(OuterCycle::new).collect())
}

/// All I-paths leaving inner vertex `a`, in DFS order (ascending neighbors).
fn i_paths_from(g: &SideInfoGraph, a: Vertex, limit: usize) -> Result<Vec<Path>, LimitExceeded> {
    fn walk(
        g: &SideInfoGraph,
        v: Vertex,
        path: &mut Path,
        on_path: &mut [bool],
        out: &mut Vec<Path>,
        limit: usize,
    ) -> Result<(), LimitExceeded> {
        for &w in g.out(v) {
            if on_path[w as usize] {
                continue;
            }
            path.push(w);
            if g.is_inner(w) {
                if out.len() >= limit {
                    return Err(LimitExceeded { limit });
                }
                out.push(path.clone());
            } else {
                on_path[w as usize] = true;
                walk(g, w, path, on_path, out, limit)?;
                on_path[w as usize] = false;
            }
            path.pop();
        }
        Ok(())
    }

    let mut on_path = vec![false; g.num_vertices() as usize + 1];
    on_path[a as usize] = true;
    let mut out = Vec::new();
    walk(g, a, &mut vec![a], &mut on_path, &mut out, limit)?;
    Ok(out)
}

/// All simple paths `a -> ... -> b` whose interior vertices are non-inner.
pub fn enumerate_i_paths(g: &SideInfoGraph, a: Vertex, b: Vertex) -> Result<Vec<Path>, ValidateError> {
    for v in [a, b] {
        if !g.is_inner(v) {
            return Err(ValidateError::NotInner(v));
        }
    }
    if a == b {
        return Err(ValidateError::SameEndpoints(a));
    }
    let mut paths = i_paths_from(g, a, DEFAULT_LIMIT)?;
    paths.retain(|p| p.last() == Some(&b));
    Ok(paths)
}

fn tree_from_paths(root: Vertex, paths: &[Path]) -> Result<RootedTree, ValidateError> {
    let mut parent_of = BTreeMap::new();
    let mut depth_of = BTreeMap::from([(root, 0)]);
    for path in paths {
        for (d, pair) in path.windows(2).enumerate() {
            let (p, v) = (pair[0], pair[1]);
            match parent_of.insert(v, p) {
                Some(old) if old != p => return Err(ValidateError::TreeConflict { root, vertex: v }),
                _ => {}
            }
            depth_of.insert(v, d as u32 + 1);
        }
    }
    Ok(RootedTree { root, parent_of, depth_of })
}

fn path_counts(g: &SideInfoGraph, a: Vertex, paths: &[Path]) -> BTreeMap<Vertex, usize> {
    let mut counts: BTreeMap<Vertex, usize> = g.inner().iter().filter(|&&b| b != a).map(|&b| (b, 0)).collect();
    for p in paths {
        *counts.get_mut(p.last().unwrap()).unwrap() += 1;
    }
    counts
}

/// Rooted tree of inner vertex `i`: the union of its unique I-paths.
pub fn build_rooted_tree(g: &SideInfoGraph, i: Vertex) -> Result<RootedTree, ValidateError> {
    if !g.is_inner(i) {
        return Err(ValidateError::NotInner(i));
    }
    let paths = i_paths_from(g, i, DEFAULT_LIMIT)?;
    if let Some((&to, &count)) = path_counts(g, i, &paths).iter().find(|(_, &c)| c != 1) {
        return Err(ValidateError::IPathNotUnique { from: i, to, count });
    }
    tree_from_paths(i, &paths)
}

/// Checks conditions 1-3 and reports every witness; outer cycles are listed too.
pub fn validate(g: &SideInfoGraph) -> Result<ValidationReport, ValidateError> {
    if g.num_inner() < 2 {
        return Err(ValidateError::TooFewInner(g.num_inner()));
    }
    let i_cycles_found = find_i_cycles(g)?;

    let mut ipath_violations = Vec::new();
    let mut covered: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    for &a in g.inner() {
        let paths = i_paths_from(g, a, DEFAULT_LIMIT)?;
        for (to, count) in path_counts(g, a, &paths) {
            if count != 1 {
                ipath_violations.push(IPathViolation { from: a, to, count });
            }
        }
        for p in &paths {
            covered.extend(p.windows(2).map(|w| (w[0], w[1])));
        }
    }
    let union_gap: Vec<[Vertex; 2]> = g.edges().filter(|e| !covered.contains(e)).map(|(u, v)| [u, v]).collect();

    let outer_cycles = find_outer_cycles(g)?;
    Ok(ValidationReport {
        is_ic_structure: i_cycles_found.is_empty() && ipath_violations.is_empty() && union_gap.is_empty(),
        has_outer_cycles: !outer_cycles.is_empty(),
        i_cycles_found,
        ipath_violations,
        union_gap,
        outer_cycles,
    })
}

/// A graph certified to satisfy conditions 1-3, with its `K` rooted trees.
#[derive(Debug, Clone)]
pub struct IcStructure {
    graph: SideInfoGraph,
    trees: Vec<RootedTree>,
    report: ValidationReport,
}

impl IcStructure {
    pub fn new(graph: SideInfoGraph) -> Result<Self, ValidateError> {
        let report = validate(&graph)?;
        if !report.is_ic_structure {
            return Err(ValidateError::NotIcStructure(Box::new(report)));
        }
        let trees = graph.inner().iter().map(|&i| build_rooted_tree(&graph, i)).collect::<Result<_, _>>()?;
        Ok(IcStructure { graph, trees, report })
    }

    pub fn graph(&self) -> &SideInfoGraph {
        &self.graph
    }

    pub fn trees(&self) -> &[RootedTree] {
        &self.trees
    }

    pub fn tree(&self, i: Vertex) -> Option<&RootedTree> {
        self.trees.iter().find(|t| t.root == i)
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    #[test]
    fn detects_two_vertex_i_cycle() {
        let g = parse_graph("inner: 1 2\nedge: 1 7\nedge: 7 1\nedge: 1 2\nedge: 2 1").unwrap();
        assert_eq!(find_i_cycles(&g).unwrap(), vec![vec![1, 7]]);
        let report = validate(&g).unwrap();
        assert!(!report.is_ic_structure);
        assert_eq!(report.i_cycles_found, vec![vec![1, 7]]);
    }

    #[test]
    fn no_cycles_no_i_cycles() {
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 2").unwrap();
        assert!(find_i_cycles(&g).unwrap().is_empty());
    }

    #[test]
    fn diamond_yields_two_i_paths() {
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 2\nedge: 1 4\nedge: 4 2\nedge: 2 1").unwrap();
        assert_eq!(enumerate_i_paths(&g, 1, 2).unwrap(), vec![vec![1, 3, 2], vec![1, 4, 2]]);
        assert_eq!(build_rooted_tree(&g, 1), Err(ValidateError::IPathNotUnique { from: 1, to: 2, count: 2 }));
        let report = validate(&g).unwrap();
        assert_eq!(report.ipath_violations, vec![IPathViolation { from: 1, to: 2, count: 2 }]);
        assert!(!report.is_ic_structure);
    }

    #[test]
    fn dead_end_vertex_has_no_i_paths() {
        let g = parse_graph("inner: 1 2\nedge: 2 1").unwrap();
        assert!(enumerate_i_paths(&g, 1, 2).unwrap().is_empty());
        assert_eq!(enumerate_i_paths(&g, 1, 3), Err(ValidateError::NotInner(3)));
        assert_eq!(enumerate_i_paths(&g, 1, 1), Err(ValidateError::SameEndpoints(1)));
        let report = validate(&g).unwrap();
        assert_eq!(report.ipath_violations, vec![IPathViolation { from: 1, to: 2, count: 0 }]);
    }

    #[test]
    fn two_cycle_tree_is_single_edge() {
        let g = parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1").unwrap();
        let t = build_rooted_tree(&g, 1).unwrap();
        assert_eq!(t.edges().collect::<Vec<_>>(), vec![(1, 2)]);
        assert_eq!(t.depth(2), Some(1));
        let report = validate(&g).unwrap();
        assert!(report.is_ic_structure);
        assert!(!report.has_outer_cycles);
    }

    #[test]
    fn union_gap_lists_uncovered_edges() {
        // 3 -> 4 leads nowhere, so it is on no I-path.
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 2\nedge: 2 1\nedge: 3 4").unwrap();
        let report = validate(&g).unwrap();
        assert_eq!(report.union_gap, vec![[3, 4]]);
        assert!(!report.is_ic_structure);
        assert!(matches!(IcStructure::new(g), Err(ValidateError::NotIcStructure(_))));
    }

    #[test]
    fn needs_two_inner_vertices() {
        let g = parse_graph("inner: 1\nedge: 1 2").unwrap();
        assert_eq!(validate(&g), Err(ValidateError::TooFewInner(1)));
    }
}
