//! Output documents: pretty JSON is the contract, text is a rendering of it.

use std::collections::BTreeMap;
use std::fmt::Write;

use icc::analysis::{ConditionWitness, Parity};
use icc::decoder::{DecodeError, DecodingPlan};
use icc::encoder::{CodebookDoc, Transmissions};
use icc::graph::{GraphDoc, MessageVector};
use icc::oracle::{OracleCertificate, RoundtripReport};
use icc::validate::ValidationReport;
use icc::{CodeLabel, Codebook, Instance, Vertex, VertexSet};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

pub trait Render {
    fn json(&self) -> String;
    fn text(&self) -> String;
}

fn pretty(v: &impl Serialize) -> String {
    serde_json::to_string_pretty(v).expect("serializable") + "\n"
}

fn xor_of(ids: impl IntoIterator<Item = Vertex>) -> String {
    let terms: Vec<String> = ids.into_iter().map(|v| format!("x{v}")).collect();
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

fn list(ids: impl IntoIterator<Item = Vertex>) -> String {
    let items: Vec<String> = ids.into_iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", items.join(", "))
}

fn cycle(seq: &[Vertex]) -> String {
    let mut s: Vec<String> = seq.iter().map(|v| v.to_string()).collect();
    s.push(seq[0].to_string());
    s.join(" -> ")
}

pub struct Validation(pub ValidationReport);

impl Render for Validation {
    fn json(&self) -> String {
        pretty(&self.0)
    }

    fn text(&self) -> String {
        let r = &self.0;
        let mut out = format!("IC structure: {}\n", if r.is_ic_structure { "yes" } else { "no" });
        for c in &r.i_cycles_found {
            writeln!(out, "I-cycle: {}", cycle(c)).unwrap();
        }
        for v in &r.ipath_violations {
            writeln!(out, "I-paths {} -> {}: {} (need exactly 1)", v.from, v.to, v.count).unwrap();
        }
        for [u, v] in &r.union_gap {
            writeln!(out, "edge ({u}, {v}) lies on no I-path").unwrap();
        }
        writeln!(out, "outer cycles: {}", r.outer_cycles.len()).unwrap();
        for c in &r.outer_cycles {
            writeln!(out, "  {}", cycle(&c.sequence)).unwrap();
        }
        out
    }
}

#[derive(Serialize)]
struct MocgDoc {
    ccv: Vertex,
    cycles: Vec<Vec<Vertex>>,
    pre_central: VertexSet,
    isolated: bool,
    parity: Parity,
    members: VertexSet,
    selection_size: usize,
}

#[derive(Serialize)]
pub struct Analysis {
    outer_cycles: Vec<Vec<Vertex>>,
    mocgs: Vec<MocgDoc>,
    v_oc: VertexSet,
    v_mocg: VertexSet,
    v_ocgi: VertexSet,
    c1_ok: bool,
    c2_ok: bool,
    witnesses: Vec<ConditionWitness>,
}

impl Analysis {
    pub fn new(ic: &Instance) -> Self {
        let a = &ic.analysis;
        let cond = ic.conditions();
        Analysis {
            outer_cycles: a.outer_cycles.iter().map(|c| c.sequence.clone()).collect(),
            mocgs: a
                .mocgs
                .iter()
                .map(|m| MocgDoc {
                    ccv: m.ccv,
                    cycles: m.cycles.iter().map(|c| c.sequence.clone()).collect(),
                    pre_central: m.pre_central.clone(),
                    isolated: m.isolated,
                    parity: m.parity,
                    members: m.members.clone(),
                    selection_size: m.selection_size(),
                })
                .collect(),
            v_oc: a.v_oc.clone(),
            v_mocg: a.v_mocg.clone(),
            v_ocgi: a.v_ocgi.clone(),
            c1_ok: cond.c1_ok,
            c2_ok: cond.c2_ok,
            witnesses: cond.witnesses,
        }
    }
}

impl Render for Analysis {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        let mut out = format!("outer cycles: {}\n", self.outer_cycles.len());
        for c in &self.outer_cycles {
            writeln!(out, "  {}", cycle(c)).unwrap();
        }
        for m in &self.mocgs {
            let kind = if m.isolated { "isolated" } else { "shared" };
            let parity = match m.parity {
                Parity::Even => "even",
                Parity::Odd => "odd",
            };
            writeln!(out, "MOCG at CCV {}: {} cycles, {kind}, {parity}, pre-central {}", m.ccv, m.cycles.len(), list(m.pre_central.iter().copied()))
                .unwrap();
        }
        writeln!(out, "V_OC = {}", list(self.v_oc.iter().copied())).unwrap();
        writeln!(out, "V_MOCG = {}", list(self.v_mocg.iter().copied())).unwrap();
        writeln!(out, "c1: {}  c2: {}", ok(self.c1_ok), ok(self.c2_ok)).unwrap();
        for w in &self.witnesses {
            writeln!(out, "  {} fails at inner {} vertex {} (count {})", format!("{:?}", w.condition).to_lowercase(), w.inner, w.vertex, w.count).unwrap();
        }
        out
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

fn codebook_text(doc: &CodebookDoc) -> String {
    let mut out = format!("construction {}, {} symbols\n", u8::from(doc.construction), doc.length);
    writeln!(out, "W_I = {}", xor_of(doc.w_i.iter().copied())).unwrap();
    for (j, ids) in &doc.w_j.0 {
        writeln!(out, "W_{j} = {}", xor_of(ids.iter().copied())).unwrap();
    }
    for (ccv, picks) in &doc.choices {
        writeln!(out, "CCV {ccv} keeps {}", list(picks.iter().copied())).unwrap();
    }
    out
}

pub struct Book(pub CodebookDoc);

impl Render for Book {
    fn json(&self) -> String {
        pretty(&self.0)
    }

    fn text(&self) -> String {
        codebook_text(&self.0)
    }
}

/// Hex strings keyed by label, in label order.
pub struct Symbols(pub Vec<(CodeLabel, String)>);

impl Serialize for Symbols {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (l, h) in &self.0 {
            map.serialize_entry(l, h)?;
        }
        map.end()
    }
}

impl Render for Symbols {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        self.0.iter().map(|(l, h)| format!("{l} = {h}\n")).collect()
    }
}

pub fn hex_transmissions(tx: &Transmissions) -> Vec<(CodeLabel, String)> {
    tx.iter().map(|(&l, bytes)| (l, hex::encode(bytes))).collect()
}

pub fn parse_transmissions(text: &str) -> Result<Transmissions, String> {
    let raw: BTreeMap<CodeLabel, String> = serde_json::from_str(text).map_err(|e| e.to_string())?;
    raw.into_iter().map(|(l, h)| Ok((l, hex::decode(&h).map_err(|e| format!("{l}: {e}"))?))).collect()
}

pub fn hex_messages(msgs: &MessageVector) -> Vec<String> {
    msgs.values().iter().map(hex::encode).collect()
}

#[derive(Serialize)]
struct EquationDoc {
    inner: Vertex,
    combined: Vec<CodeLabel>,
    z_support: VertexSet,
}

#[derive(Serialize)]
pub struct Recovered {
    user: Vertex,
    message: Option<String>,
    correct: bool,
    error: Option<String>,
}

impl Recovered {
    pub fn new(user: Vertex, r: Result<Vec<u8>, DecodeError>, truth: &[u8]) -> Self {
        match r {
            Ok(bytes) => Recovered { user, correct: bytes == truth, message: Some(hex::encode(bytes)), error: None },
            Err(e) => Recovered { user, message: None, correct: false, error: Some(e.to_string()) },
        }
    }
}

#[derive(Serialize)]
pub struct Decoding {
    algorithm: u8,
    equations: Vec<EquationDoc>,
    /// Present when the message vector was supplied.
    pub users: Option<Vec<Recovered>>,
}

fn equations(plan: &DecodingPlan) -> Vec<EquationDoc> {
    plan.equations
        .iter()
        .map(|e| EquationDoc { inner: e.inner, combined: e.combined.iter().copied().collect(), z_support: e.z_support.clone() })
        .collect()
}

fn algorithm_number(plan: &DecodingPlan) -> u8 {
    match plan.algorithm {
        icc::decoder::Algorithm::One => 1,
        icc::decoder::Algorithm::Two => 2,
    }
}

fn equations_text(eqs: &[EquationDoc]) -> String {
    let mut out = String::new();
    for e in eqs {
        let labels: Vec<String> = e.combined.iter().map(|l| l.to_string()).collect();
        writeln!(out, "Z_{} = {} = {}", e.inner, labels.join(" + "), xor_of(e.z_support.iter().copied())).unwrap();
    }
    out
}

impl Decoding {
    pub fn new(plan: &DecodingPlan) -> Self {
        Decoding { algorithm: algorithm_number(plan), equations: equations(plan), users: None }
    }
}

impl Render for Decoding {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        let mut out = format!("algorithm {}\n", self.algorithm);
        out += &equations_text(&self.equations);
        for u in self.users.iter().flatten() {
            match (&u.message, &u.error) {
                (Some(m), _) => writeln!(out, "x{} = {m}{}", u.user, if u.correct { "" } else { "  (wrong)" }).unwrap(),
                (None, Some(e)) => writeln!(out, "x{}: {e}", u.user).unwrap(),
                (None, None) => {}
            }
        }
        out
    }
}

#[derive(Serialize)]
pub struct Verification {
    construction: u8,
    length: usize,
    certificate: OracleCertificate,
    roundtrip: RoundtripReport,
}

impl Verification {
    pub fn new(book: &Codebook, certificate: OracleCertificate, roundtrip: RoundtripReport) -> Self {
        Verification { construction: book.construction().into(), length: book.len(), certificate, roundtrip }
    }
}

impl Render for Verification {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        let c = &self.certificate;
        let r = &self.roundtrip;
        let mut out = format!("construction {}, {} symbols, rank {}\n", self.construction, self.length, c.code_rank);
        writeln!(out, "certified: {}", if c.all_decodable { "all users" } else { "NO" }).unwrap();
        if !c.all_decodable {
            writeln!(out, "undecodable users: {}", list(c.undecodable())).unwrap();
        }
        let rate = r.match_rate.map_or("n/a".into(), |x| format!("{x}"));
        writeln!(out, "round trips: {}/{} exact (rate {rate}), seed {}, {} bytes", r.matches, r.trials, r.seed, r.msg_len).unwrap();
        for f in &r.failures {
            writeln!(out, "  trial {} user {}: {}", f.trial, f.user, f.reason).unwrap();
        }
        out
    }
}

#[derive(Serialize)]
pub struct Enumeration {
    pub dir: String,
    pub seed: u64,
    pub attempts: usize,
    pub count: usize,
    pub files: Vec<String>,
}

impl Render for Enumeration {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        format!("{} structures written to {} ({} candidates, seed {})\n", self.count, self.dir, self.attempts, self.seed)
    }
}

#[derive(Serialize)]
pub struct Demo {
    graph: GraphDoc,
    analysis: Analysis,
    codebook: CodebookDoc,
    equations: Vec<EquationDoc>,
    certified: bool,
}

impl Demo {
    pub fn new(ic: &Instance, book: &Codebook, plan: &DecodingPlan, certified: bool) -> Self {
        Demo {
            graph: ic.graph().to_doc(),
            analysis: Analysis::new(ic),
            codebook: book.to_doc(),
            equations: equations(plan),
            certified,
        }
    }
}

impl Render for Demo {
    fn json(&self) -> String {
        pretty(self)
    }

    fn text(&self) -> String {
        let g = &self.graph;
        let mut out = format!("{}-IC structure on {} vertices, {} edges\n\n", g.inner.len(), g.n, g.edges.len());
        out += &self.analysis.text();
        out += "\n";
        out += &codebook_text(&self.codebook);
        out += "\n";
        out += &equations_text(&self.equations);
        writeln!(out, "\ncertified decodable: {}", if self.certified { "yes" } else { "no" }).unwrap();
        out
    }
}
