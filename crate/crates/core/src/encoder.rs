//! Index codebooks for IC structures.
//!
//! Construction 1 applies to IC structures without outer cycles: one inner
//! symbol `W_I` plus, per non-inner vertex `j`, the XOR of `x_j` and its
//! out-neighbors. Construction 2 handles outer cycles by splitting each
//! non-inner neighborhood into the part off the outer cycles and the part
//! inside `V_OC(j)`, dropping the CCV from a few selected pre-central symbols.
//! Both produce `N - K + 1` symbols.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer, MapAccess, Visitor};
use serde::ser::{SerializeMap, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::CycleAnalysis;
use crate::graph::{xor_into, MessageVector, SideInfoGraph, Vertex, VertexSet};
use crate::oracle::certify;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("graph has outer cycles; Construction 1 does not apply")]
    OuterCyclesPresent,
    #[error("vertex {vertex} is selected for both CCV {first} and CCV {second}")]
    SelectionConflict { vertex: Vertex, first: Vertex, second: Vertex },
    #[error("selection for CCV {ccv}: {reason}")]
    InvalidSelection { ccv: Vertex, reason: String },
    #[error("no MOCG has CCV {0}")]
    UnknownMocg(Vertex),
    #[error("no admissible pre-central selection for CCV {ccv}")]
    NoAdmissibleSelection { ccv: Vertex },
    #[error("no selection yields a decodable codebook")]
    NoDecodableSelection,
    #[error("codebook has no symbol {0}")]
    MissingSymbol(CodeLabel),
    #[error("invalid selection syntax `{0}`; expected ccv=v[,v]")]
    SelectionSyntax(String),
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("expected {expected} messages, got {found}")]
    MessageCount { expected: usize, found: usize },
}

/// Symbol label: the inner symbol `W_I` or a non-inner vertex `W_j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CodeLabel {
    Inner,
    Vertex(Vertex),
}

impl fmt::Display for CodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodeLabel::Inner => f.write_str("W_I"),
            CodeLabel::Vertex(j) => write!(f, "W_{j}"),
        }
    }
}

impl FromStr for CodeLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let body = s.strip_prefix("W_").unwrap_or(s);
        if body == "I" {
            return Ok(CodeLabel::Inner);
        }
        body.parse().map(CodeLabel::Vertex).map_err(|_| format!("invalid symbol label `{s}`"))
    }
}

impl Serialize for CodeLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CodeLabel {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(de::Error::custom)
    }
}

/// A transmitted symbol: the XOR of the messages of `support`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSymbol {
    pub label: CodeLabel,
    pub support: VertexSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Construction {
    One,
    Two,
}

impl From<Construction> for u8 {
    fn from(c: Construction) -> u8 {
        match c {
            Construction::One => 1,
            Construction::Two => 2,
        }
    }
}

impl TryFrom<u8> for Construction {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        match v {
            1 => Ok(Construction::One),
            2 => Ok(Construction::Two),
            _ => Err(format!("unknown construction {v}")),
        }
    }
}

/// Pre-central vertices chosen per CCV in steps 3 and 4.
pub type Selection = BTreeMap<Vertex, Vec<Vertex>>;

/// Symbol supports keyed by label. Immutable once built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codebook {
    construction: Construction,
    symbols: BTreeMap<CodeLabel, VertexSet>,
    choices: Selection,
}

impl Codebook {
    /// Builds a codebook from explicit supports; used for hand-made or perturbed codes.
    pub fn from_supports(construction: Construction, symbols: BTreeMap<CodeLabel, VertexSet>, choices: Selection) -> Self {
        Codebook { construction, symbols, choices }
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn support(&self, label: CodeLabel) -> Option<&VertexSet> {
        self.symbols.get(&label)
    }

    pub fn inner_support(&self) -> Option<&VertexSet> {
        self.support(CodeLabel::Inner)
    }

    pub fn symbols(&self) -> impl Iterator<Item = CodeSymbol> + '_ {
        self.symbols.iter().map(|(&label, support)| CodeSymbol { label, support: support.clone() })
    }

    pub fn labels(&self) -> impl Iterator<Item = CodeLabel> + '_ {
        self.symbols.keys().copied()
    }

    pub fn supports(&self) -> &BTreeMap<CodeLabel, VertexSet> {
        &self.symbols
    }

    pub fn choices(&self) -> &Selection {
        &self.choices
    }

    /// Copy of the codebook with one symbol dropped.
    pub fn without(&self, label: CodeLabel) -> Codebook {
        let mut book = self.clone();
        book.symbols.remove(&label);
        book
    }

    /// Checks the structural invariants against `g`.
    pub fn check_against(&self, g: &SideInfoGraph) -> Result<(), EncodeError> {
        let bad = |msg: String| Err(EncodeError::InvalidCodebook(msg));
        if self.inner_support() != Some(&g.inner_set()) {
            return bad("W_I must cover exactly the inner vertices".into());
        }
        for (label, support) in &self.symbols {
            if let Some(v) = support.iter().find(|&&v| !g.contains(v)) {
                return bad(format!("{label} references vertex {v} outside 1..={}", g.num_vertices()));
            }
            if let CodeLabel::Vertex(j) = *label {
                if g.is_inner(j) || !g.contains(j) {
                    return bad(format!("{label} is not a non-inner vertex"));
                }
                if !support.contains(&j) {
                    return bad(format!("{label} does not contain x_{j}"));
                }
            }
        }
        Ok(())
    }

    pub fn to_doc(&self) -> CodebookDoc {
        let mut w_j = Vec::new();
        let mut w_i = Vec::new();
        for (label, support) in &self.symbols {
            let ids: Vec<Vertex> = support.iter().copied().collect();
            match label {
                CodeLabel::Inner => w_i = ids,
                CodeLabel::Vertex(j) => w_j.push((*j, ids)),
            }
        }
        CodebookDoc {
            construction: self.construction,
            length: self.symbols.len(),
            w_i,
            w_j: SymbolMap(w_j),
            choices: self.choices.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("codebook serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, EncodeError> {
        let doc: CodebookDoc = serde_json::from_str(text).map_err(|e| EncodeError::InvalidCodebook(e.to_string()))?;
        doc.try_into()
    }

    /// Evaluates every symbol on `msgs`.
    pub fn transmit(&self, msgs: &MessageVector) -> Result<Transmissions, EncodeError> {
        let needed = self.symbols.values().flat_map(|s| s.iter().copied()).max().unwrap_or(0) as usize;
        if msgs.num_messages() < needed {
            return Err(EncodeError::MessageCount { expected: needed, found: msgs.num_messages() });
        }
        Ok(self
            .symbols
            .iter()
            .map(|(&label, support)| {
                let mut acc = vec![0; msgs.msg_len()];
                for &v in support {
                    xor_into(&mut acc, msgs.get(v));
                }
                (label, acc)
            })
            .collect())
    }
}

/// Evaluated symbols.
pub type Transmissions = BTreeMap<CodeLabel, Vec<u8>>;

/// `W_j` symbols in ascending vertex order, written as `{"W_<j>": [..]}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolMap(pub Vec<(Vertex, Vec<Vertex>)>);

impl Serialize for SymbolMap {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (j, ids) in &self.0 {
            map.serialize_entry(&CodeLabel::Vertex(*j), ids)?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for SymbolMap {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = SymbolMap;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a map from W_<j> to vertex lists")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<SymbolMap, A::Error> {
                let mut out = Vec::new();
                while let Some((label, ids)) = access.next_entry::<CodeLabel, Vec<Vertex>>()? {
                    match label {
                        CodeLabel::Vertex(j) => out.push((j, ids)),
                        CodeLabel::Inner => return Err(de::Error::custom("W_I belongs outside W_j")),
                    }
                }
                out.sort_by_key(|e| e.0);
                Ok(SymbolMap(out))
            }
        }
        d.deserialize_map(V)
    }
}

/// JSON form of a codebook.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodebookDoc {
    pub construction: Construction,
    pub length: usize,
    #[serde(rename = "W_I")]
    pub w_i: Vec<Vertex>,
    #[serde(rename = "W_j")]
    pub w_j: SymbolMap,
    #[serde(default)]
    pub choices: Selection,
}

impl TryFrom<CodebookDoc> for Codebook {
    type Error = EncodeError;

    fn try_from(doc: CodebookDoc) -> Result<Self, Self::Error> {
        let mut symbols = BTreeMap::from([(CodeLabel::Inner, doc.w_i.into_iter().collect())]);
        for (j, ids) in doc.w_j.0 {
            if symbols.insert(CodeLabel::Vertex(j), ids.into_iter().collect()).is_some() {
                return Err(EncodeError::InvalidCodebook(format!("duplicate symbol W_{j}")));
            }
        }
        if symbols.len() != doc.length {
            return Err(EncodeError::InvalidCodebook(format!(
                "length {} disagrees with {} symbols",
                doc.length,
                symbols.len()
            )));
        }
        Ok(Codebook { construction: doc.construction, symbols, choices: doc.choices })
    }
}

/// Per-CCV overrides of the default pre-central selection.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SelectionPolicy {
    pub overrides: Selection,
}

impl SelectionPolicy {
    /// Parses `ccv=v[,v]` items.
    pub fn parse<'a, I: IntoIterator<Item = &'a str>>(items: I) -> Result<Self, EncodeError> {
        let mut overrides = Selection::new();
        for item in items {
            let syntax = || EncodeError::SelectionSyntax(item.to_string());
            let (ccv, picks) = item.split_once('=').ok_or_else(syntax)?;
            let ccv: Vertex = ccv.trim().parse().map_err(|_| syntax())?;
            let picks: Vec<Vertex> =
                picks.split(',').map(|p| p.trim().parse().map_err(|_| syntax())).collect::<Result<_, _>>()?;
            if overrides.insert(ccv, picks).is_some() {
                return Err(EncodeError::InvalidSelection { ccv, reason: "given more than once".into() });
            }
        }
        Ok(SelectionPolicy { overrides })
    }
}

/// Construction 1. Rejects graphs with outer cycles.
pub fn encode_construction1(g: &SideInfoGraph, analysis: &CycleAnalysis) -> Result<Codebook, EncodeError> {
    if !analysis.outer_cycles.is_empty() {
        return Err(EncodeError::OuterCyclesPresent);
    }
    Ok(construction1_unchecked(g))
}

/// Construction 1 applied regardless of outer cycles.
pub fn construction1_unchecked(g: &SideInfoGraph) -> Codebook {
    let mut symbols = BTreeMap::from([(CodeLabel::Inner, g.inner_set())]);
    for j in g.non_inner() {
        let mut support = g.out(j).clone();
        support.insert(j);
        symbols.insert(CodeLabel::Vertex(j), support);
    }
    Codebook { construction: Construction::One, symbols, choices: Selection::new() }
}

/// Resolves the pre-central selection: overrides first, then, in ascending CCV
/// order, the smallest admissible vertices (not a CCV of another MOCG and not
/// already selected).
pub fn resolve_selection(analysis: &CycleAnalysis, policy: &SelectionPolicy) -> Result<Selection, EncodeError> {
    let mut taken: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    let mut selection = Selection::new();

    for (&ccv, picks) in &policy.overrides {
        let mocg = analysis.mocg(ccv).ok_or(EncodeError::UnknownMocg(ccv))?;
        let invalid = |reason: String| EncodeError::InvalidSelection { ccv, reason };
        if picks.len() != mocg.selection_size() {
            return Err(invalid(format!("expected {} vertices, got {}", mocg.selection_size(), picks.len())));
        }
        let mut sorted = picks.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != picks.len() {
            return Err(invalid("repeated vertex".into()));
        }
        for &p in &sorted {
            if !mocg.pre_central.contains(&p) {
                return Err(invalid(format!("{p} is not a pre-central vertex")));
            }
            if let Some(&first) = taken.get(&p) {
                return Err(EncodeError::SelectionConflict { vertex: p, first, second: ccv });
            }
            taken.insert(p, ccv);
        }
        selection.insert(ccv, sorted);
    }

    for mocg in &analysis.mocgs {
        if selection.contains_key(&mocg.ccv) {
            continue;
        }
        let picks: Vec<Vertex> = mocg
            .pre_central
            .iter()
            .copied()
            .filter(|&p| !taken.contains_key(&p) && !(analysis.is_ccv(p) && p != mocg.ccv))
            .take(mocg.selection_size())
            .collect();
        if picks.len() < mocg.selection_size() {
            return Err(EncodeError::NoAdmissibleSelection { ccv: mocg.ccv });
        }
        for &p in &picks {
            taken.insert(p, mocg.ccv);
        }
        selection.insert(mocg.ccv, picks);
    }
    Ok(selection)
}

/// Construction 2 for an explicit selection. The selection must name every
/// MOCG and no vertex twice.
pub fn construction2_with(
    g: &SideInfoGraph,
    analysis: &CycleAnalysis,
    selection: &Selection,
) -> Result<Codebook, EncodeError> {
    let mut owner: BTreeMap<Vertex, Vertex> = BTreeMap::new();
    for (&ccv, picks) in selection {
        let mocg = analysis.mocg(ccv).ok_or(EncodeError::UnknownMocg(ccv))?;
        for &p in picks {
            if !mocg.pre_central.contains(&p) {
                return Err(EncodeError::InvalidSelection { ccv, reason: format!("{p} is not a pre-central vertex") });
            }
            if let Some(first) = owner.insert(p, ccv) {
                return Err(EncodeError::SelectionConflict { vertex: p, first, second: ccv });
            }
        }
    }
    if let Some(m) = analysis.mocgs.iter().find(|m| !selection.contains_key(&m.ccv)) {
        return Err(EncodeError::InvalidSelection { ccv: m.ccv, reason: "no vertex selected".into() });
    }

    let v_oc = &analysis.v_oc;
    let mut symbols = BTreeMap::from([(CodeLabel::Inner, g.inner_set())]);
    for j in g.non_inner() {
        let mut support: VertexSet = g.out(j).difference(v_oc).copied().collect();
        support.insert(j);
        if v_oc.contains(&j) {
            let mut inside = analysis.n_c(g, j);
            if let Some(ccv) = owner.get(&j) {
                inside.remove(ccv);
            }
            support.extend(inside);
        }
        symbols.insert(CodeLabel::Vertex(j), support);
    }
    Ok(Codebook { construction: Construction::Two, symbols, choices: selection.clone() })
}

/// Construction 2 with the default selection and overrides.
pub fn encode_construction2(
    g: &SideInfoGraph,
    analysis: &CycleAnalysis,
    policy: &SelectionPolicy,
) -> Result<Codebook, EncodeError> {
    construction2_with(g, analysis, &resolve_selection(analysis, policy)?)
}

/// Construction 2 whose output is certified decodable. When the default
/// selection is inadmissible or not decodable, every selection tuple that
/// honours the overrides is tried in order.
pub fn encode_construction2_certified(
    g: &SideInfoGraph,
    analysis: &CycleAnalysis,
    policy: &SelectionPolicy,
) -> Result<Codebook, EncodeError> {
    match encode_construction2(g, analysis, policy) {
        Ok(book) if certify(g, &book).all_decodable => return Ok(book),
        Ok(book) => log::warn!("default selection {:?} is not decodable; searching", book.choices()),
        Err(EncodeError::NoAdmissibleSelection { ccv }) => {
            log::warn!("no admissible selection for CCV {ccv}; searching")
        }
        Err(e) => return Err(e),
    }
    let options: Vec<(Vertex, Vec<Vec<Vertex>>)> = analysis
        .mocgs
        .iter()
        .map(|m| {
            let opts = match policy.overrides.get(&m.ccv) {
                Some(p) => vec![p.clone()],
                None => combinations(&m.pre_central.iter().copied().collect::<Vec<_>>(), m.selection_size()),
            };
            (m.ccv, opts)
        })
        .collect();
    let mut index = vec![0usize; options.len()];
    if options.iter().any(|(_, o)| o.is_empty()) {
        return Err(EncodeError::NoDecodableSelection);
    }
    loop {
        let selection: Selection = options.iter().zip(&index).map(|((ccv, o), &k)| (*ccv, o[k].clone())).collect();
        if let Ok(book) = construction2_with(g, analysis, &selection) {
            if certify(g, &book).all_decodable {
                return Ok(book);
            }
        }
        let mut pos = 0;
        loop {
            if pos == index.len() {
                return Err(EncodeError::NoDecodableSelection);
            }
            index[pos] += 1;
            if index[pos] < options[pos].1.len() {
                break;
            }
            index[pos] = 0;
            pos += 1;
        }
    }
}

fn combinations(items: &[Vertex], k: usize) -> Vec<Vec<Vertex>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for (i, &x) in items.iter().enumerate() {
        for mut rest in combinations(&items[i + 1..], k - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::parse_graph;

    fn vs(ids: &[Vertex]) -> VertexSet {
        ids.iter().copied().collect()
    }

    #[test]
    fn construction1_on_small_graph() {
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 2\nedge: 2 4\nedge: 4 1\nedge: 3 4").unwrap();
        let book = construction1_unchecked(&g);
        assert_eq!(book.len(), 3);
        assert_eq!(book.support(CodeLabel::Vertex(3)), Some(&vs(&[2, 3, 4])));
        assert_eq!(book.support(CodeLabel::Vertex(4)), Some(&vs(&[1, 4])));
    }

    #[test]
    fn sink_vertex_symbol_is_singleton() {
        let g = parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1\nedge: 1 3").unwrap();
        assert_eq!(construction1_unchecked(&g).support(CodeLabel::Vertex(3)), Some(&vs(&[3])));
    }

    #[test]
    fn construction1_rejects_outer_cycles() {
        let g = parse_graph("inner: 1 2\nedge: 1 3\nedge: 3 4\nedge: 4 3\nedge: 4 2\nedge: 2 1").unwrap();
        let analysis = CycleAnalysis::new(&g).unwrap();
        assert_eq!(encode_construction1(&g, &analysis), Err(EncodeError::OuterCyclesPresent));
    }

    #[test]
    fn transmit_xors_supports() {
        let g = parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1\nedge: 3 1\nedge: 3 2").unwrap();
        let book = construction1_unchecked(&g);
        let msgs = MessageVector::new(vec![vec![0x02], vec![0x04], vec![0x01]]).unwrap();
        let tx = book.transmit(&msgs).unwrap();
        assert_eq!(tx[&CodeLabel::Inner], vec![0x06]);
        assert_eq!(tx[&CodeLabel::Vertex(3)], vec![0x07]);
        let zeros = book.transmit(&MessageVector::zeros(3, 4)).unwrap();
        assert!(zeros.values().all(|t| t == &vec![0; 4]));
        let short = MessageVector::new(vec![vec![0]; 2]).unwrap();
        assert!(matches!(book.transmit(&short), Err(EncodeError::MessageCount { .. })));
    }

    #[test]
    fn labels_round_trip() {
        for l in [CodeLabel::Inner, CodeLabel::Vertex(10)] {
            assert_eq!(l.to_string().parse::<CodeLabel>(), Ok(l));
        }
        assert_eq!("7".parse::<CodeLabel>(), Ok(CodeLabel::Vertex(7)));
        assert!("W_x".parse::<CodeLabel>().is_err());
        assert!(CodeLabel::Inner < CodeLabel::Vertex(1));
    }

    #[test]
    fn json_keys_follow_numeric_order() {
        let g = parse_graph("inner: 1 2\nedge: 1 2\nedge: 2 1\nedge: 10 1\nedge: 9 2").unwrap();
        let book = construction1_unchecked(&g);
        let json = serde_json::to_string(&book.to_doc()).unwrap();
        let nine = json.find("\"W_9\"").unwrap();
        let ten = json.find("\"W_10\"").unwrap();
        assert!(nine < ten);
        assert_eq!(Codebook::from_json(&json).unwrap(), book);
    }

    #[test]
    fn selection_syntax() {
        let p = SelectionPolicy::parse(["10=13", "15 = 13, 17"]).unwrap();
        assert_eq!(p.overrides[&10], vec![13]);
        assert_eq!(p.overrides[&15], vec![13, 17]);
        assert!(matches!(SelectionPolicy::parse(["10"]), Err(EncodeError::SelectionSyntax(_))));
        assert!(matches!(SelectionPolicy::parse(["10=a"]), Err(EncodeError::SelectionSyntax(_))));
        assert!(matches!(SelectionPolicy::parse(["1=2", "1=3"]), Err(EncodeError::InvalidSelection { .. })));
    }

    #[test]
    fn combinations_in_order() {
        assert_eq!(combinations(&[1, 2, 3], 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(combinations(&[1], 2), Vec::<Vec<Vertex>>::new());
    }
}
