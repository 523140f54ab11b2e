//! Browser bindings: every operation takes graph text and returns a JSON
//! document, so the page needs no knowledge of the Rust types.

use icc::decoder::DecodingPlan;
use icc::encoder::CodebookDoc;
use icc::graph::GraphDoc;
use icc::oracle::{certify, simulate_roundtrip, OracleCertificate, RoundtripReport};
use icc::validate::validate;
use icc::{fixtures, CodeLabel, Codebook, Construction, Instance, SelectionPolicy, SideInfoGraph, Vertex, VertexSet};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_TRIALS: u32 = 100_000;
const MAX_MSG_LEN: u32 = 4096;

fn to_json(v: &impl Serialize) -> String {
    serde_json::to_string(v).expect("serializable")
}

fn parse(text: &str) -> Result<SideInfoGraph, String> {
    SideInfoGraph::parse(text).map_err(|e| e.to_string())
}

/// Explains why a graph is not an IC structure.
fn instance(text: &str) -> Result<Instance, String> {
    let g = parse(text)?;
    let report = validate(&g).map_err(|e| e.to_string())?;
    if !report.is_ic_structure {
        let mut why = Vec::new();
        why.extend(report.i_cycles_found.iter().take(3).map(|c| format!("I-cycle through {c:?}")));
        why.extend(report.ipath_violations.iter().take(3).map(|v| format!("{} I-paths from {} to {}", v.count, v.from, v.to)));
        why.extend(report.union_gap.iter().take(3).map(|[u, v]| format!("edge ({u}, {v}) on no I-path")));
        return Err(format!("not an IC structure: {}", why.join("; ")));
    }
    Instance::new(g).map_err(|e| e.to_string())
}

fn code(ic: &Instance, select: &str, construction: u8) -> Result<Codebook, String> {
    let construction = Construction::try_from(construction)?;
    let policy = SelectionPolicy::parse(select.split([' ', ';', '\n']).filter(|s| !s.is_empty())).map_err(|e| e.to_string())?;
    ic.encode_with(construction, &policy).map_err(|e| e.to_string())
}

pub fn fixture_text(name: &str) -> Result<String, String> {
    fixtures::by_name(name).map(str::to_string).ok_or_else(|| format!("no fixture named {name}"))
}

#[derive(Serialize)]
struct MocgView {
    ccv: Vertex,
    cycles: Vec<Vec<Vertex>>,
    pre_central: VertexSet,
    isolated: bool,
    odd: bool,
}

#[derive(Serialize)]
struct AnalysisView {
    graph: GraphDoc,
    outer_cycles: Vec<Vec<Vertex>>,
    mocgs: Vec<MocgView>,
    v_oc: VertexSet,
    c1_ok: bool,
    c2_ok: bool,
}

/// Graph, outer cycles, MOCGs and the c1/c2 verdict.
pub fn analyze(graph_text: &str) -> Result<String, String> {
    let ic = instance(graph_text)?;
    let a = &ic.analysis;
    let cond = ic.conditions();
    Ok(to_json(&AnalysisView {
        graph: ic.graph().to_doc(),
        outer_cycles: a.outer_cycles.iter().map(|c| c.sequence.clone()).collect(),
        mocgs: a
            .mocgs
            .iter()
            .map(|m| MocgView {
                ccv: m.ccv,
                cycles: m.cycles.iter().map(|c| c.sequence.clone()).collect(),
                pre_central: m.pre_central.clone(),
                isolated: m.isolated,
                odd: m.cycles.len() % 2 == 1,
            })
            .collect(),
        v_oc: a.v_oc.clone(),
        c1_ok: cond.c1_ok,
        c2_ok: cond.c2_ok,
    }))
}

#[derive(Serialize)]
struct EquationView {
    inner: Vertex,
    combined: Vec<CodeLabel>,
    z_support: VertexSet,
}

#[derive(Serialize)]
struct EncodingView {
    codebook: CodebookDoc,
    algorithm: u8,
    equations: Vec<EquationView>,
    certificate: OracleCertificate,
}

fn equations(plan: &DecodingPlan) -> Vec<EquationView> {
    plan.equations
        .iter()
        .map(|e| EquationView { inner: e.inner, combined: e.combined.iter().copied().collect(), z_support: e.z_support.clone() })
        .collect()
}

/// Codebook, every `Z_i` and the GF(2) certificate. `select` holds
/// whitespace-separated `ccv=v[,v]` overrides.
pub fn encode(graph_text: &str, select: &str, construction: u8) -> Result<String, String> {
    let ic = instance(graph_text)?;
    let book = code(&ic, select, construction)?;
    let plan = ic.plan(&book).map_err(|e| e.to_string())?;
    Ok(to_json(&EncodingView {
        codebook: book.to_doc(),
        algorithm: construction,
        equations: equations(&plan),
        certificate: certify(ic.graph(), &book),
    }))
}

/// Random round trips through the chosen codebook.
pub fn simulate(
    graph_text: &str,
    select: &str,
    construction: u8,
    trials: u32,
    msg_len: u32,
    seed: u32,
) -> Result<String, String> {
    if trials > MAX_TRIALS || msg_len == 0 || msg_len > MAX_MSG_LEN {
        return Err(format!("need trials <= {MAX_TRIALS} and 1 <= message length <= {MAX_MSG_LEN}"));
    }
    let ic = instance(graph_text)?;
    let book = code(&ic, select, construction)?;
    let plan = ic.plan(&book).map_err(|e| e.to_string())?;
    let report: RoundtripReport =
        simulate_roundtrip(ic.graph(), &book, &plan, trials as usize, msg_len as usize, seed.into()).map_err(|e| e.to_string())?;
    Ok(to_json(&report))
}

#[wasm_bindgen(js_name = fixtureText)]
pub fn fixture_text_js(name: &str) -> Result<String, JsError> {
    fixture_text(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(graph_text: &str) -> Result<String, JsError> {
    analyze(graph_text).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = encode)]
pub fn encode_js(graph_text: &str, select: &str, construction: u8) -> Result<String, JsError> {
    encode(graph_text, select, construction).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(graph_text: &str, select: &str, construction: u8, trials: u32, msg_len: u32, seed: u32) -> Result<String, JsError> {
    simulate(graph_text, select, construction, trials, msg_len, seed).map_err(|e| JsError::new(&e))
}
