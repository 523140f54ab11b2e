//! Outer-cycle structure of an IC structure.
//!
//! The outer-cycle group of a non-inner vertex `j` is the set of outer cycles
//! through `j`. Groups are compared as sets of cycles. A group that is not
//! strictly contained in another vertex's group is a maximal outer-cycle group
//! (MOCG); its central cycle vertex (CCV) is the vertex defining it, or, when
//! several vertices share the group, the one with the largest in-degree inside
//! the group.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cycles::LimitExceeded;
use crate::graph::{SideInfoGraph, Vertex, VertexSet};
use crate::validate::{find_outer_cycles, RootedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("vertex {0} lies on no outer cycle")]
    VertexNotOnAnyCycle(Vertex),
    #[error("vertex {0} is an inner vertex")]
    InnerVertex(Vertex),
    #[error("outer-cycle group shared by {candidates:?} has no unique vertex of maximal in-degree")]
    CcvTie { candidates: Vec<Vertex> },
    #[error("CCV {ccv}: vertex {vertex} precedes it on more than one cycle")]
    PreCentralAnomaly { ccv: Vertex, vertex: Vertex },
    #[error("count for inner vertex {inner}, vertex {vertex}: {reason}")]
    CountPrecondition { inner: Vertex, vertex: Vertex, reason: &'static str },
    #[error(transparent)]
    Limit(#[from] LimitExceeded),
}

/// An elementary cycle of non-inner vertices, rotated to start at its minimum.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct OuterCycle {
    pub vertices: VertexSet,
    pub sequence: Vec<Vertex>,
}

impl OuterCycle {
    pub fn new(sequence: Vec<Vertex>) -> Self {
        assert!(sequence.len() >= 2, "outer cycle needs two vertices");
        let start = (0..sequence.len()).min_by_key(|&k| sequence[k]).unwrap();
        let mut sequence = sequence;
        sequence.rotate_left(start);
        OuterCycle { vertices: sequence.iter().copied().collect(), sequence }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn len(&self) -> usize {
        self.sequence.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sequence.is_empty()
    }

    /// Predecessor of `v` along the cycle.
    pub fn predecessor(&self, v: Vertex) -> Option<Vertex> {
        let k = self.sequence.iter().position(|&x| x == v)?;
        Some(self.sequence[(k + self.sequence.len() - 1) % self.sequence.len()])
    }

    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let n = self.sequence.len();
        (0..n).map(move |k| (self.sequence[k], self.sequence[(k + 1) % n]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(count: usize) -> Self {
        if count.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

fn sequences<S: Serializer>(cycles: &[OuterCycle], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(cycles.iter().map(|c| &c.sequence))
}

/// Maximal outer-cycle group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mocg {
    pub ccv: Vertex,
    #[serde(serialize_with = "sequences")]
    pub cycles: Vec<OuterCycle>,
    pub pre_central: VertexSet,
    pub isolated: bool,
    pub parity: Parity,
    /// Every non-inner vertex whose outer-cycle group is exactly this group.
    pub members: VertexSet,
}

impl Mocg {
    pub fn vertices(&self) -> VertexSet {
        self.cycles.iter().flat_map(|c| c.vertices.iter().copied()).collect()
    }

    /// Edge set of the group's subgraph.
    pub fn edges(&self) -> BTreeSet<(Vertex, Vertex)> {
        self.cycles.iter().flat_map(|c| c.edges()).collect()
    }

    /// In-degree of `v` inside the group's subgraph.
    pub fn in_degree(&self, v: Vertex) -> usize {
        self.edges().iter().filter(|&&(_, w)| w == v).count()
    }

    /// Steps 3 and 4 of the construction encode one, respectively two,
    /// pre-central vertices without the CCV.
    pub fn selection_size(&self) -> usize {
        if self.isolated || self.parity == Parity::Even {
            1
        } else {
            2
        }
    }
}

/// The cycles of `cycles` through non-inner vertex `j`.
pub fn outer_cycle_group<'a>(
    g: &SideInfoGraph,
    cycles: &'a [OuterCycle],
    j: Vertex,
) -> Result<Vec<&'a OuterCycle>, AnalysisError> {
    if g.is_inner(j) {
        return Err(AnalysisError::InnerVertex(j));
    }
    let group: Vec<_> = cycles.iter().filter(|c| c.contains(j)).collect();
    if group.is_empty() {
        return Err(AnalysisError::VertexNotOnAnyCycle(j));
    }
    Ok(group)
}

/// All MOCGs among vertices lying on at least two outer cycles, sorted by CCV.
pub fn find_mocgs(g: &SideInfoGraph, cycles: &[OuterCycle]) -> Result<Vec<Mocg>, AnalysisError> {
    let mut group_of: BTreeMap<Vertex, BTreeSet<usize>> = BTreeMap::new();
    for (k, c) in cycles.iter().enumerate() {
        for &v in &c.vertices {
            if !g.is_inner(v) {
                group_of.entry(v).or_default().insert(k);
            }
        }
    }
    group_of.retain(|_, s| s.len() >= 2);

    let mut members_of: BTreeMap<&BTreeSet<usize>, VertexSet> = BTreeMap::new();
    for (&v, s) in &group_of {
        members_of.entry(s).or_default().insert(v);
    }
    let maximal: Vec<(&BTreeSet<usize>, &VertexSet)> = members_of
        .iter()
        .filter(|(s, _)| !members_of.keys().any(|t| t.len() > s.len() && s.is_subset(t)))
        .map(|(s, m)| (*s, m))
        .collect();

    let mut mocgs = Vec::with_capacity(maximal.len());
    for (k, &(set, members)) in maximal.iter().enumerate() {
        let group: Vec<OuterCycle> = set.iter().map(|&c| cycles[c].clone()).collect();
        let mut mocg = Mocg {
            ccv: 0,
            parity: Parity::of(group.len()),
            cycles: group,
            pre_central: VertexSet::new(),
            isolated: maximal.iter().enumerate().all(|(l, (other, _))| l == k || set.is_disjoint(other)),
            members: members.clone(),
        };
        mocg.ccv = choose_ccv(&mocg)?;
        for c in &mocg.cycles {
            let p = c.predecessor(mocg.ccv).expect("ccv lies on every cycle of its group");
            if !mocg.pre_central.insert(p) {
                return Err(AnalysisError::PreCentralAnomaly { ccv: mocg.ccv, vertex: p });
            }
        }
        mocgs.push(mocg);
    }
    mocgs.sort_by_key(|m| m.ccv);
    Ok(mocgs)
}

fn choose_ccv(mocg: &Mocg) -> Result<Vertex, AnalysisError> {
    if mocg.members.len() == 1 {
        return Ok(*mocg.members.first().unwrap());
    }
    let edges = mocg.edges();
    let degree = |v: Vertex| edges.iter().filter(|&&(_, w)| w == v).count();
    let best = mocg.members.iter().map(|&v| degree(v)).max().unwrap();
    let top: Vec<Vertex> = mocg.members.iter().copied().filter(|&v| degree(v) == best).collect();
    match top.as_slice() {
        [v] => Ok(*v),
        _ => Err(AnalysisError::CcvTie { candidates: top }),
    }
}

/// Outer cycles, MOCGs and the derived vertex sets used by the encoder and decoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CycleAnalysis {
    pub outer_cycles: Vec<OuterCycle>,
    pub mocgs: Vec<Mocg>,
    /// Vertices on some outer cycle.
    pub v_oc: VertexSet,
    /// Vertices of cycles belonging to some MOCG.
    pub v_mocg: VertexSet,
    /// Vertices of isolated MOCGs. Computed for reporting only.
    pub v_ocgi: VertexSet,
}

impl CycleAnalysis {
    pub fn new(g: &SideInfoGraph) -> Result<Self, AnalysisError> {
        Self::from_cycles(g, find_outer_cycles(g)?)
    }

    pub fn from_cycles(g: &SideInfoGraph, outer_cycles: Vec<OuterCycle>) -> Result<Self, AnalysisError> {
        let mocgs = find_mocgs(g, &outer_cycles)?;
        let v_oc = outer_cycles.iter().flat_map(|c| c.vertices.iter().copied()).collect();
        let v_mocg = mocgs.iter().flat_map(|m| m.vertices()).collect();
        let v_ocgi = mocgs.iter().filter(|m| m.isolated).flat_map(|m| m.vertices()).collect();
        Ok(CycleAnalysis { outer_cycles, mocgs, v_oc, v_mocg, v_ocgi })
    }

    pub fn cycles_through(&self, j: Vertex) -> impl Iterator<Item = &OuterCycle> {
        self.outer_cycles.iter().filter(move |c| c.contains(j))
    }

    /// `V_OC(j)`: vertices of the outer cycles through `j`.
    pub fn v_oc_of(&self, j: Vertex) -> VertexSet {
        self.cycles_through(j).flat_map(|c| c.vertices.iter().copied()).collect()
    }

    /// `N⁺_C(j)`: out-neighbors of `j` inside `V_OC(j)`.
    pub fn n_c(&self, g: &SideInfoGraph, j: Vertex) -> VertexSet {
        let group = self.v_oc_of(j);
        g.out(j).intersection(&group).copied().collect()
    }

    pub fn is_ccv(&self, v: Vertex) -> bool {
        self.mocgs.iter().any(|m| m.ccv == v)
    }

    pub fn mocg(&self, ccv: Vertex) -> Option<&Mocg> {
        self.mocgs.iter().find(|m| m.ccv == ccv)
    }
}

/// `a_{i,j}`: number of tree vertices `v ∈ V_NI(i)` with `j ∈ N⁺(v)`, defined for
/// non-inner tree vertices at depth at least two.
pub fn count_a(g: &SideInfoGraph, tree: &RootedTree, j: Vertex) -> Result<usize, AnalysisError> {
    let fail = |reason| AnalysisError::CountPrecondition { inner: tree.root, vertex: j, reason };
    if g.is_inner(j) || !tree.contains(j) {
        return Err(fail("vertex is not a non-inner vertex of the tree"));
    }
    if tree.depth(j).unwrap() < 2 {
        return Err(fail("vertex sits at depth below two"));
    }
    Ok(predecessors_in_tree(g, tree, j))
}

/// `b_{i,j}`: the same count for a vertex outside the tree.
pub fn count_b(g: &SideInfoGraph, tree: &RootedTree, j: Vertex) -> Result<usize, AnalysisError> {
    if !g.contains(j) || tree.contains(j) {
        return Err(AnalysisError::CountPrecondition { inner: tree.root, vertex: j, reason: "vertex belongs to the tree" });
    }
    Ok(predecessors_in_tree(g, tree, j))
}

fn predecessors_in_tree(g: &SideInfoGraph, tree: &RootedTree, j: Vertex) -> usize {
    g.inc(j).iter().filter(|&&v| !g.is_inner(v) && tree.contains(v)).count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Condition {
    C1,
    C2,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionWitness {
    pub condition: Condition,
    pub inner: Vertex,
    pub vertex: Vertex,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub c1_ok: bool,
    pub c2_ok: bool,
    pub witnesses: Vec<ConditionWitness>,
}

/// c1: every `a_{i,j}` is odd. c2: every `b_{i,j}` is zero.
pub fn check_c1_c2(g: &SideInfoGraph, trees: &[RootedTree]) -> ConditionReport {
    let mut witnesses = Vec::new();
    for tree in trees {
        for v in g.vertices().filter(|&v| !g.is_inner(v)) {
            let (condition, count) = match tree.depth(v) {
                Some(d) if d >= 2 => (Condition::C1, predecessors_in_tree(g, tree, v)),
                Some(_) => continue,
                None => (Condition::C2, predecessors_in_tree(g, tree, v)),
            };
            let violated = match condition {
                Condition::C1 => count % 2 == 0,
                Condition::C2 => count != 0,
            };
            if violated {
                witnesses.push(ConditionWitness { condition, inner: tree.root, vertex: v, count });
            }
        }
    }
    ConditionReport {
        c1_ok: !witnesses.iter().any(|w| w.condition == Condition::C1),
        c2_ok: !witnesses.iter().any(|w| w.condition == Condition::C2),
        witnesses,
    }
}
