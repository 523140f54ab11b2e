//! Decoding: the combinations `Z_i` of Algorithms 1 and 2 and message recovery.
//!
//! Everything is derived symbolically over supports first; messages are only
//! touched by [`decode_all`].

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::analysis::CycleAnalysis;
use crate::encoder::{CodeLabel, Codebook, Construction, Transmissions};
use crate::graph::{xor_into, MessageVector, SideInfoGraph, Vertex, VertexSet};
use crate::validate::{IcStructure, RootedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("user {user} cannot decode: missing side information {missing:?}")]
    NotDecodable { user: Vertex, missing: VertexSet },
    #[error("codebook has no symbol {0}")]
    MissingSymbol(CodeLabel),
    #[error("no transmission for symbol {0}")]
    MissingTransmission(CodeLabel),
    #[error("transmissions differ in length")]
    LengthMismatch,
    #[error("no transmissions")]
    NoTransmissions,
    #[error("Algorithm 2 needs the cycle analysis")]
    MissingAnalysis,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
}

/// The combination `Z_i` for inner vertex `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodeEquation {
    pub inner: Vertex,
    pub combined: BTreeSet<CodeLabel>,
    pub z_support: VertexSet,
    pub v_nic: VertexSet,
    pub v_prime: VertexSet,
}

impl DecodeEquation {
    /// Side information user `i` lacks to read `x_i` off `Z_i`.
    pub fn missing_side_info(&self, g: &SideInfoGraph) -> VertexSet {
        self.z_support.iter().copied().filter(|&v| v != self.inner && !g.has_edge(self.inner, v)).collect()
    }

    pub fn is_decodable(&self, g: &SideInfoGraph) -> bool {
        self.z_support.contains(&self.inner) && self.missing_side_info(g).is_empty()
    }
}

/// Symmetric difference of the supports, one at a time.
pub fn xor_supports<'a, I: IntoIterator<Item = &'a VertexSet>>(supports: I) -> VertexSet {
    let mut acc = VertexSet::new();
    for s in supports {
        for &v in s {
            if !acc.remove(&v) {
                acc.insert(v);
            }
        }
    }
    acc
}

fn equation(book: &Codebook, inner: Vertex, combined: BTreeSet<CodeLabel>, v_nic: VertexSet, v_prime: VertexSet) -> Result<DecodeEquation, DecodeError> {
    let supports = combined
        .iter()
        .map(|&l| book.support(l).ok_or(DecodeError::MissingSymbol(l)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DecodeEquation { inner, z_support: xor_supports(supports), combined, v_nic, v_prime })
}

/// Algorithm 1: `Z_i = W_I ⊕ W_q` over `q ∈ V_NI(i)`.
pub fn derive_z_algorithm1(book: &Codebook, g: &SideInfoGraph, tree: &RootedTree) -> Result<DecodeEquation, DecodeError> {
    let combined = std::iter::once(CodeLabel::Inner)
        .chain(tree.non_inner(g).into_iter().map(CodeLabel::Vertex))
        .collect();
    equation(book, tree.root, combined, VertexSet::new(), VertexSet::new())
}

/// Algorithm 2: `W_I`, the tree's non-inner vertices off the outer cycles, and
/// every vertex of the outer-cycle groups the tree touches.
pub fn derive_z_algorithm2(
    book: &Codebook,
    g: &SideInfoGraph,
    tree: &RootedTree,
    analysis: &CycleAnalysis,
) -> Result<DecodeEquation, DecodeError> {
    let v_ni = tree.non_inner(g);
    let v_nic: VertexSet = v_ni.intersection(&analysis.v_oc).copied().collect();
    let v_prime: VertexSet = v_nic.iter().flat_map(|&j| analysis.v_oc_of(j)).collect();
    let off_cycle: VertexSet = v_ni.difference(&v_nic).copied().collect();
    if let Some(v) = off_cycle.intersection(&v_prime).next() {
        log::warn!("inner {}: vertex {v} is in both V_NI(i)\\V_NIC(i) and V'_NI(i)", tree.root);
    }
    let combined = std::iter::once(CodeLabel::Inner)
        .chain(off_cycle.iter().chain(&v_prime).map(|&v| CodeLabel::Vertex(v)))
        .collect();
    equation(book, tree.root, combined, v_nic, v_prime)
}

/// Decode equations for every inner vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecodingPlan {
    pub algorithm: Algorithm,
    pub equations: Vec<DecodeEquation>,
}

impl DecodingPlan {
    pub fn new(
        book: &Codebook,
        ic: &IcStructure,
        analysis: Option<&CycleAnalysis>,
        algorithm: Algorithm,
    ) -> Result<Self, DecodeError> {
        let g = ic.graph();
        let equations = ic
            .trees()
            .iter()
            .map(|t| match algorithm {
                Algorithm::One => derive_z_algorithm1(book, g, t),
                Algorithm::Two => derive_z_algorithm2(book, g, t, analysis.ok_or(DecodeError::MissingAnalysis)?),
            })
            .collect::<Result<_, _>>()?;
        Ok(DecodingPlan { algorithm, equations })
    }

    /// Algorithm 1 for Construction 1 codebooks, Algorithm 2 otherwise.
    pub fn for_codebook(book: &Codebook, ic: &IcStructure, analysis: &CycleAnalysis) -> Result<Self, DecodeError> {
        let algorithm = match book.construction() {
            Construction::One => Algorithm::One,
            Construction::Two => Algorithm::Two,
        };
        Self::new(book, ic, Some(analysis), algorithm)
    }

    pub fn equation(&self, i: Vertex) -> Option<&DecodeEquation> {
        self.equations.iter().find(|e| e.inner == i)
    }
}

/// Messages a user already holds.
pub trait SideInformation {
    /// `x_v` as known to `user`, or `None` if `user` does not have it.
    fn known(&self, user: Vertex, v: Vertex) -> Option<&[u8]>;
}

/// Side information dictated by the graph: user `u` knows `x_v` iff `(u, v)` is an edge.
pub struct GraphSideInfo<'a> {
    g: &'a SideInfoGraph,
    msgs: &'a MessageVector,
}

impl<'a> GraphSideInfo<'a> {
    pub fn new(g: &'a SideInfoGraph, msgs: &'a MessageVector) -> Self {
        GraphSideInfo { g, msgs }
    }
}

impl SideInformation for GraphSideInfo<'_> {
    fn known(&self, user: Vertex, v: Vertex) -> Option<&[u8]> {
        self.g.has_edge(user, v).then(|| self.msgs.get(v))
    }
}

fn strip(user: Vertex, support: &VertexSet, acc: &mut [u8], side: &impl SideInformation) -> Result<(), DecodeError> {
    let missing: VertexSet = support.iter().copied().filter(|&v| v != user && side.known(user, v).is_none()).collect();
    if !missing.is_empty() || !support.contains(&user) {
        return Err(DecodeError::NotDecodable { user, missing });
    }
    for &v in support.iter().filter(|&&v| v != user) {
        xor_into(acc, side.known(user, v).expect("checked above"));
    }
    Ok(())
}

fn fetch(tx: &Transmissions, label: CodeLabel) -> Result<&[u8], DecodeError> {
    tx.get(&label).map(Vec::as_slice).ok_or(DecodeError::MissingTransmission(label))
}

/// Recovers `x_user` from the transmissions and the user's side information.
pub fn decode_user(
    g: &SideInfoGraph,
    book: &Codebook,
    plan: &DecodingPlan,
    tx: &Transmissions,
    side: &impl SideInformation,
    user: Vertex,
) -> Result<Vec<u8>, DecodeError> {
    let len = tx.values().next().ok_or(DecodeError::NoTransmissions)?.len();
    let mut acc = vec![0; len];
    let support = if g.is_inner(user) {
        let eq = plan.equation(user).ok_or(DecodeError::NotDecodable { user, missing: VertexSet::new() })?;
        for &label in &eq.combined {
            xor_into(&mut acc, fetch(tx, label)?);
        }
        eq.z_support.clone()
    } else {
        let label = CodeLabel::Vertex(user);
        acc.copy_from_slice(fetch(tx, label)?);
        book.support(label).ok_or(DecodeError::MissingSymbol(label))?.clone()
    };
    strip(user, &support, &mut acc, side)?;
    Ok(acc)
}

/// Recovers every message; each user decodes only its own.
pub fn decode_all(
    g: &SideInfoGraph,
    book: &Codebook,
    plan: &DecodingPlan,
    tx: &Transmissions,
    side: &impl SideInformation,
) -> Result<MessageVector, DecodeError> {
    let len = tx.values().next().ok_or(DecodeError::NoTransmissions)?.len();
    if tx.values().any(|t| t.len() != len) {
        return Err(DecodeError::LengthMismatch);
    }
    let values = g.vertices().map(|u| decode_user(g, book, plan, tx, side, u)).collect::<Result<Vec<_>, _>>()?;
    MessageVector::new(values).map_err(|_| DecodeError::LengthMismatch)
}

/// How many symbols each user combines.
pub fn symbols_used(g: &SideInfoGraph, plan: &DecodingPlan) -> BTreeMap<Vertex, usize> {
    g.vertices()
        .map(|u| (u, plan.equation(u).map_or(1, |e| e.combined.len())))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoder::construction1_unchecked;
    use crate::graph::parse_graph;
    use proptest::prelude::*;

    fn vs(ids: &[Vertex]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn two_vertex_cycle() {
        let ic = IcStructure::new(parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1").unwrap()).unwrap();
        let book = construction1_unchecked(ic.graph());
        let eq = derive_z_algorithm1(&book, ic.graph(), ic.tree(1).unwrap()).unwrap();
        assert_eq!(eq.combined, BTreeSet::from([CodeLabel::Inner]));
        assert_eq!(eq.z_support, vs(&[1, 2]));
        assert!(eq.is_decodable(ic.graph()));
    }

    #[test]
    fn algorithm1_on_three_inner_vertices() {
        // Trees: 1 -> 4 -> {2, 3}; 2 -> 1, 2 -> 3; 3 -> 1, 3 -> 2.
        let g = parse_graph("inner: 1 2 3\nedge: 1 4\nedge: 4 2\nedge: 4 3\nedge: 2 1\nedge: 2 3\nedge: 3 1\nedge: 3 2")
            .unwrap();
        let ic = IcStructure::new(g).unwrap();
        let book = construction1_unchecked(ic.graph());
        let eq = derive_z_algorithm1(&book, ic.graph(), ic.tree(1).unwrap()).unwrap();
        assert_eq!(eq.z_support, vs(&[1, 4]));
        let eq2 = derive_z_algorithm1(&book, ic.graph(), ic.tree(2).unwrap()).unwrap();
        assert_eq!(eq2.combined, BTreeSet::from([CodeLabel::Inner]));
        assert_eq!(eq2.z_support, vs(&[1, 2, 3]));

        let msgs = MessageVector::new((1..=4).map(|v| vec![v as u8 * 3, 0x55 ^ v as u8]).collect()).unwrap();
        let tx = book.transmit(&msgs).unwrap();
        let plan = DecodingPlan::new(&book, &ic, None, Algorithm::One).unwrap();
        let side = GraphSideInfo::new(ic.graph(), &msgs);
        assert_eq!(decode_all(ic.graph(), &book, &plan, &tx, &side).unwrap(), msgs);
        assert_eq!(symbols_used(ic.graph(), &plan)[&1], 2);
    }

    #[test]
    fn missing_side_information_is_reported() {
        let ic = IcStructure::new(parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1").unwrap()).unwrap();
        let mut supports = construction1_unchecked(ic.graph()).supports().clone();
        supports.insert(CodeLabel::Inner, vs(&[1]));
        let bogus = Codebook::from_supports(Construction::One, supports, Default::default());
        let book = construction1_unchecked(ic.graph());
        let plan = DecodingPlan::new(&book, &ic, None, Algorithm::One).unwrap();
        let msgs = MessageVector::zeros(2, 1);
        let tx = bogus.transmit(&msgs).unwrap();
        struct Nothing;
        impl SideInformation for Nothing {
            fn known(&self, _: Vertex, _: Vertex) -> Option<&[u8]> {
                None
            }
        }
        assert_eq!(
            decode_user(ic.graph(), &book, &plan, &tx, &Nothing, 1),
            Err(DecodeError::NotDecodable { user: 1, missing: vs(&[2]) })
        );
        assert_eq!(
            decode_all(ic.graph(), &book, &plan, &Transmissions::new(), &Nothing),
            Err(DecodeError::NoTransmissions)
        );
    }

    #[test]
    fn graph_side_info_follows_edges() {
        let g = parse_graph("inner: 1 2\nedge: 1 2").unwrap();
        let msgs = MessageVector::new(vec![vec![1], vec![2]]).unwrap();
        let side = GraphSideInfo::new(&g, &msgs);
        assert_eq!(side.known(1, 2), Some(&[2u8][..]));
        assert_eq!(side.known(2, 1), None);
    }

    proptest! {
        #[test]
        fn xor_two_ways(sets in prop::collection::vec(prop::collection::btree_set(1u32..20, 0..8), 0..8)) {
            let incremental = xor_supports(&sets);
            let mut count: BTreeMap<Vertex, usize> = BTreeMap::new();
            for s in &sets { for &v in s { *count.entry(v).or_default() += 1; } }
            let parity: VertexSet = count.into_iter().filter(|(_, c)| c % 2 == 1).map(|(v, _)| v).collect();
            prop_assert_eq!(incremental, parity);
        }
    }
}
