//! Ground truth independent of the decoding algorithms: GF(2) decodability
//! certificates, message round trips and small-instance enumeration.

pub mod enumerate;
pub mod gf2;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::decoder::{decode_user, symbols_used, DecodingPlan, GraphSideInfo};
use crate::encoder::{CodeLabel, Codebook};
use crate::graph::{MessageError, MessageVector, SideInfoGraph, Vertex, VertexSet};
use gf2::{Basis, BitRow, Gf2Matrix};

pub use enumerate::{enumerate_ic_structures, sample_ic_structures, EnumerationConfig};

/// Symbols whose XOR, minus known side information, leaves `x_i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub symbols: Vec<CodeLabel>,
    /// Support of the XOR of the witness symbols.
    pub support: VertexSet,
    /// Side information cancelled to isolate `x_i`.
    pub side_info: VertexSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct UserCertificate {
    pub decodable: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleCertificate {
    pub all_decodable: bool,
    pub code_rank: usize,
    pub per_user: BTreeMap<Vertex, UserCertificate>,
}

impl OracleCertificate {
    pub fn undecodable(&self) -> Vec<Vertex> {
        self.per_user.iter().filter(|(_, c)| !c.decodable).map(|(&u, _)| u).collect()
    }
}

fn row_of(g: &SideInfoGraph, support: &VertexSet, skip: Option<&VertexSet>) -> BitRow {
    let width = g.num_vertices() as usize;
    let ones = support.iter().filter(|v| skip.is_none_or(|s| !s.contains(v))).map(|&v| (v - 1) as usize);
    BitRow::from_ones(width, ones)
}

/// For each user `i`: is `e_i` in the span of the code rows and the unit rows
/// `e_v`, `v ∈ N⁺(i)`? Side-information rows are folded in by zeroing the
/// known coordinates of each code row.
pub fn certify(g: &SideInfoGraph, book: &Codebook) -> OracleCertificate {
    let width = g.num_vertices() as usize;
    let labels: Vec<CodeLabel> = book.labels().collect();
    let supports = book.supports();

    let mut code = Gf2Matrix::new(width);
    for s in supports.values() {
        code.push(row_of(g, s, None));
    }

    let mut per_user = BTreeMap::new();
    for u in g.vertices() {
        let known = g.out(u);
        let mut basis = Basis::new(width);
        for s in supports.values() {
            basis.insert(row_of(g, s, Some(known)));
        }
        let target = BitRow::from_ones(width, [(u - 1) as usize]);
        let witness = basis.express(&target).map(|combo| {
            let symbols: Vec<CodeLabel> = combo.iter().map(|&k| labels[k]).collect();
            let support = crate::decoder::xor_supports(symbols.iter().map(|l| &supports[l]));
            let side_info = support.iter().copied().filter(|&v| v != u).collect();
            Witness { symbols, support, side_info }
        });
        per_user.insert(u, UserCertificate { decodable: witness.is_some(), witness });
    }
    OracleCertificate { all_decodable: per_user.values().all(|c| c.decodable), code_rank: code.rank(), per_user }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripFailure {
    pub trial: usize,
    pub user: Vertex,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub trials: usize,
    pub msg_len: usize,
    pub seed: u64,
    pub certified: bool,
    pub undecodable_users: Vec<Vertex>,
    pub matches: usize,
    /// `None` when no trial ran.
    pub match_rate: Option<f64>,
    pub max_symbols_used: usize,
    /// First failures only.
    pub failures: Vec<RoundtripFailure>,
}

const MAX_REPORTED_FAILURES: usize = 32;

/// Transmits `trials` random message vectors and decodes every user from its
/// own side information. Trial `t` is reproducible from `(seed, t)`.
pub fn simulate_roundtrip(
    g: &SideInfoGraph,
    book: &Codebook,
    plan: &DecodingPlan,
    trials: usize,
    msg_len: usize,
    seed: u64,
) -> Result<RoundtripReport, MessageError> {
    if msg_len == 0 {
        return Err(MessageError::Empty);
    }
    let cert = certify(g, book);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matches = 0;
    let mut failures = Vec::new();
    for trial in 0..trials {
        let msgs = MessageVector::random(g.num_vertices(), msg_len, &mut rng);
        let tx = book.transmit(&msgs).expect("one message per vertex");
        let side = GraphSideInfo::new(g, &msgs);
        let mut ok = true;
        for u in g.vertices() {
            let reason = match decode_user(g, book, plan, &tx, &side, u) {
                Ok(x) if x == msgs.get(u) => continue,
                Ok(_) => "decoded value differs".to_string(),
                Err(e) => e.to_string(),
            };
            ok = false;
            if failures.len() < MAX_REPORTED_FAILURES {
                failures.push(RoundtripFailure { trial, user: u, reason });
            }
        }
        matches += ok as usize;
    }
    Ok(RoundtripReport {
        trials,
        msg_len,
        seed,
        certified: cert.all_decodable,
        undecodable_users: cert.undecodable(),
        matches,
        match_rate: (trials > 0).then(|| matches as f64 / trials as f64),
        max_symbols_used: symbols_used(g, plan).into_values().max().unwrap_or(0),
        failures,
    })
}
