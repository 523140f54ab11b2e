//! Index codes for interlinked-cycle (IC) side-information graphs, including
//! graphs whose non-inner vertices form outer cycles.
//!
//! Pipeline: [`graph`] parses a side-information graph, [`validate`] certifies
//! it as an IC structure, [`analysis`] finds outer cycles and their maximal
//! groups, [`encoder`] builds a codebook of `N - K + 1` XOR symbols,
//! [`decoder`] derives each user's decoding combination, and [`oracle`]
//! checks all of it by GF(2) elimination and simulation.
//!
//! ```
//! let ic = icc::Instance::new(icc::fixtures::g1()).unwrap();
//! let book = ic.encode(&Default::default()).unwrap();
//! assert_eq!(book.len(), 17 - 6 + 1);
//! assert!(icc::oracle::certify(ic.graph(), &book).all_decodable);
//! ```

pub mod analysis;
pub mod cycles;
pub mod decoder;
pub mod encoder;
pub mod fixtures;
pub mod graph;
pub mod oracle;
pub mod validate;

use thiserror::Error;

pub use analysis::CycleAnalysis;
pub use decoder::{DecodeEquation, DecodingPlan};
pub use encoder::{CodeLabel, Codebook, Construction, SelectionPolicy};
pub use graph::{MessageVector, SideInfoGraph, Vertex, VertexSet};
pub use validate::IcStructure;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Graph(#[from] graph::GraphError),
    #[error(transparent)]
    Validate(#[from] validate::ValidateError),
    #[error(transparent)]
    Analysis(#[from] analysis::AnalysisError),
    #[error(transparent)]
    Encode(#[from] encoder::EncodeError),
    #[error(transparent)]
    Decode(#[from] decoder::DecodeError),
    #[error(transparent)]
    Message(#[from] graph::MessageError),
}

/// A validated IC structure together with its outer-cycle analysis.
#[derive(Debug, Clone)]
pub struct Instance {
    pub ic: IcStructure,
    pub analysis: CycleAnalysis,
}

impl Instance {
    pub fn new(g: SideInfoGraph) -> Result<Self, Error> {
        let ic = IcStructure::new(g)?;
        let analysis = CycleAnalysis::from_cycles(ic.graph(), ic.report().outer_cycles.clone())?;
        Ok(Instance { ic, analysis })
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        Self::new(SideInfoGraph::parse(text)?)
    }

    pub fn graph(&self) -> &SideInfoGraph {
        self.ic.graph()
    }

    pub fn has_outer_cycles(&self) -> bool {
        !self.analysis.outer_cycles.is_empty()
    }

    /// Construction 2 with the given selection overrides, certified decodable.
    pub fn encode(&self, policy: &SelectionPolicy) -> Result<Codebook, Error> {
        Ok(encoder::encode_construction2_certified(self.graph(), &self.analysis, policy)?)
    }

    pub fn encode_with(&self, construction: Construction, policy: &SelectionPolicy) -> Result<Codebook, Error> {
        match construction {
            Construction::One => Ok(encoder::encode_construction1(self.graph(), &self.analysis)?),
            Construction::Two => self.encode(policy),
        }
    }

    /// Decode equations matching the codebook's construction.
    pub fn plan(&self, book: &Codebook) -> Result<DecodingPlan, Error> {
        Ok(DecodingPlan::for_codebook(book, &self.ic, &self.analysis)?)
    }

    pub fn conditions(&self) -> analysis::ConditionReport {
        analysis::check_c1_c2(self.graph(), self.ic.trees())
    }
}
