//! Bundled example graphs.

use crate::graph::SideInfoGraph;

/// 6-IC structure on 17 vertices with three outer cycles.
pub const G1: &str = include_str!("../../../fixtures/g1.sig");

/// 10-IC structure on 36 vertices with three MOCGs.
pub const IC10: &str = include_str!("../../../fixtures/ic10.sig");

pub fn g1() -> SideInfoGraph {
    SideInfoGraph::parse(G1).expect("bundled fixture parses")
}

pub fn ic10() -> SideInfoGraph {
    SideInfoGraph::parse(IC10).expect("bundled fixture parses")
}

/// Looks a fixture up by name (`g1`, `ic10`).
pub fn by_name(name: &str) -> Option<&'static str> {
    match name {
        "g1" => Some(G1),
        "ic10" => Some(IC10),
        _ => None,
    }
}
