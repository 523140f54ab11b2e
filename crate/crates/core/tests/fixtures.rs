//! Every stated quantity of the bundled graphs, re-derived from the edges.

use std::collections::BTreeMap;

use icc::analysis::Parity;
use icc::decoder::{derive_z_algorithm2, DecodeEquation};
use icc::encoder::resolve_selection;
use icc::{fixtures, Instance, SelectionPolicy, Vertex, VertexSet};

fn vs(ids: &[Vertex]) -> VertexSet {
    ids.iter().copied().collect()
}

fn equation(ic: &Instance, i: Vertex) -> DecodeEquation {
    let book = ic.encode(&SelectionPolicy::default()).unwrap();
    derive_z_algorithm2(&book, ic.graph(), ic.ic.tree(i).unwrap(), &ic.analysis).unwrap()
}

#[test]
fn g1_shape() {
    let ic = Instance::new(fixtures::g1()).unwrap();
    let g = ic.graph();
    assert_eq!((g.num_vertices(), g.num_inner()), (17, 6));
    assert_eq!(g.inner(), &[1, 2, 3, 4, 5, 6]);
    let a = &ic.analysis;
    assert_eq!(a.v_oc, vs(&[8, 9, 10, 13, 15, 16]));
    assert_eq!(a.v_mocg, vs(&[8, 9, 10, 13]));
    assert_eq!(a.v_ocgi, a.v_mocg);
    assert_eq!(a.mocgs.len(), 1);
    let m = &a.mocgs[0];
    assert_eq!(m.ccv, 10);
    assert!(m.isolated);
    assert_eq!(m.parity, Parity::Even);
    let sets: Vec<VertexSet> = m.cycles.iter().map(|c| c.vertices.clone()).collect();
    assert!(sets.contains(&vs(&[8, 9, 10])) && sets.contains(&vs(&[10, 13])) && sets.len() == 2);
    assert_eq!(m.pre_central, vs(&[9, 13]));
}

#[test]
fn g1_neighborhoods() {
    let ic = Instance::new(fixtures::g1()).unwrap();
    let g = ic.graph();
    let a = &ic.analysis;
    let off = |j: Vertex| -> VertexSet { g.out(j).difference(&a.v_oc).copied().collect() };
    let expected: &[(Vertex, &[Vertex])] = &[
        (7, &[]),
        (11, &[4]),
        (12, &[]),
        (14, &[]),
        (17, &[3, 4]),
        (9, &[]),
        (8, &[3]),
        (10, &[11]),
        (13, &[6]),
        (15, &[2]),
        (16, &[5]),
    ];
    for &(j, expected) in expected {
        assert_eq!(off(j), vs(expected), "N+({j}) off the outer cycles");
    }
    let inside: &[(Vertex, &[Vertex])] = &[(9, &[10]), (8, &[9]), (10, &[8, 13]), (13, &[10]), (15, &[16]), (16, &[15])];
    for &(j, expected) in inside {
        assert_eq!(a.n_c(g, j), vs(expected), "N+_C({j})");
    }
}

#[test]
fn g1_decode_sets_and_side_information() {
    let ic = Instance::new(fixtures::g1()).unwrap();
    let g = ic.graph();
    let expected: &[(Vertex, &[Vertex], &[Vertex], &[Vertex])] = &[
        (1, &[8, 9, 10, 13, 15, 16], &[8, 9, 10, 13, 15, 16], &[7, 11, 14]),
        (2, &[8, 10, 13], &[8, 9, 10, 13], &[11]),
        (3, &[15, 16], &[15, 16], &[]),
        (4, &[], &[], &[]),
        (5, &[8, 10, 13], &[8, 9, 10, 13], &[11, 12]),
        (6, &[15, 16], &[15, 16], &[17]),
    ];
    for &(i, nic, prime, rest) in expected {
        let eq = equation(&ic, i);
        assert_eq!(eq.v_nic, vs(nic), "V_NIC({i})");
        assert_eq!(eq.v_prime, vs(prime), "V'_NI({i})");
        let tree_ni = ic.ic.tree(i).unwrap().non_inner(g);
        assert_eq!(tree_ni.difference(&eq.v_nic).copied().collect::<VertexSet>(), vs(rest), "V_NI({i}) minus V_NIC({i})");
    }
    let side: &[(Vertex, &[Vertex])] =
        &[(1, &[7, 14]), (2, &[1, 5]), (3, &[1, 4, 6]), (4, &[1, 2, 3, 5, 6]), (5, &[1, 2, 12]), (6, &[1, 17])];
    for &(u, known) in side {
        assert!(known.iter().all(|&v| g.has_edge(u, v)), "user {u} side information");
    }
}

#[test]
fn ic10_shape() {
    let ic = Instance::new(fixtures::ic10()).unwrap();
    let g = ic.graph();
    assert_eq!((g.num_vertices(), g.num_inner()), (36, 10));
    let a = &ic.analysis;
    assert_eq!(a.v_oc, vs(&[12, 13, 15, 17, 22, 23, 25, 29, 31, 32, 33, 34]));
    assert_eq!(a.v_mocg, vs(&[12, 13, 15, 17, 22, 23, 25, 32, 33, 34]));
    let by_ccv: BTreeMap<Vertex, _> = a.mocgs.iter().map(|m| (m.ccv, m)).collect();
    assert_eq!(by_ccv.keys().copied().collect::<Vec<_>>(), vec![15, 22, 32]);

    let cycle_sets = |ccv: Vertex| -> Vec<VertexSet> {
        let mut s: Vec<_> = by_ccv[&ccv].cycles.iter().map(|c| c.vertices.clone()).collect();
        s.sort();
        s
    };
    assert_eq!(cycle_sets(32), vec![vs(&[32, 33]), vs(&[32, 34])]);
    assert_eq!(cycle_sets(15), vec![vs(&[12, 13, 15]), vs(&[15, 17]), vs(&[15, 22])]);
    assert_eq!(cycle_sets(22), vec![vs(&[15, 22]), vs(&[22, 23, 25])]);
    assert!(by_ccv[&32].isolated && !by_ccv[&15].isolated && !by_ccv[&22].isolated);
    assert_eq!(by_ccv[&15].parity, Parity::Odd);
    assert_eq!(by_ccv[&15].pre_central, vs(&[13, 17, 22]));
    assert_eq!(by_ccv[&22].pre_central, vs(&[15, 25]));
    assert_eq!(by_ccv[&32].pre_central, vs(&[33, 34]));
    // the non-MOCG cycle through 29 and 31
    assert!(a.outer_cycles.iter().any(|c| c.vertices == vs(&[29, 31])));
}

#[test]
fn ic10_default_selection_matches_expected_choices() {
    let ic = Instance::new(fixtures::ic10()).unwrap();
    let sel = resolve_selection(&ic.analysis, &SelectionPolicy::default()).unwrap();
    assert_eq!(sel, BTreeMap::from([(15, vec![13, 17]), (22, vec![25]), (32, vec![33])]));
}

#[test]
fn ic10_decode_sets_and_side_information() {
    let ic = Instance::new(fixtures::ic10()).unwrap();
    let g = ic.graph();
    let mocg_side: &[Vertex] = &[12, 13, 15, 17, 22, 23, 25];
    let c32: &[Vertex] = &[32, 33, 34];
    let expected: &[(Vertex, &[Vertex], &[Vertex])] = &[
        (1, &[12, 13, 15, 17, 22, 23, 25, 29, 31, 32, 33, 34], &[11, 14, 18, 24, 26, 28]),
        (2, &[29, 31, 32, 33, 34], &[35]),
        (3, &[29, 31, 32, 33, 34], &[18, 30, 35]),
        (4, mocg_side, &[14, 16, 18, 24, 26]),
        (5, c32, &[35]),
        (6, mocg_side, &[14, 18, 19, 20, 24, 26]),
        (7, mocg_side, &[14, 18, 21, 24, 26]),
        (8, c32, &[36]),
        (9, c32, &[36]),
        (10, mocg_side, &[14, 18, 24, 26, 27]),
    ];
    for &(i, nic, rest) in expected {
        let eq = equation(&ic, i);
        assert_eq!(eq.v_nic, vs(nic), "V_NIC({i})");
        assert_eq!(eq.v_prime, vs(nic), "V'_NI({i}) = V_NIC({i})");
        let tree_ni = ic.ic.tree(i).unwrap().non_inner(g);
        assert_eq!(tree_ni.difference(&eq.v_nic).copied().collect::<VertexSet>(), vs(rest), "V_NI({i}) minus V_NIC({i})");
    }
    let side: &[(Vertex, &[Vertex])] = &[
        (1, &[11, 28]),
        (2, &[1, 3, 5]),
        (3, &[1, 2, 18, 30, 35]),
        (4, &[1, 6, 7, 16]),
        (5, &[1, 2, 3, 6, 35]),
        (6, &[1, 4, 7, 10, 20]),
        (7, &[1, 4, 6, 10, 21]),
        (8, &[5, 6, 9, 36]),
        (9, &[5, 6, 8, 36]),
        // x_24 is not needed: no combination of the symbols gives the Z_10
        // that would use it
        (10, &[1, 4, 6, 7, 27]),
    ];
    for &(u, known) in side {
        assert!(known.iter().all(|&v| g.has_edge(u, v)), "user {u} side information");
    }
}

#[test]
fn ic10_neighborhoods() {
    let ic = Instance::new(fixtures::ic10()).unwrap();
    let g = ic.graph();
    let a = &ic.analysis;
    let off = |j: Vertex| -> VertexSet { g.out(j).difference(&a.v_oc).copied().collect() };
    let expected: &[(Vertex, &[Vertex])] = &[
        (11, &[]),
        (14, &[3]),
        (16, &[]),
        (18, &[5]),
        (19, &[]),
        (20, &[19]),
        (21, &[]),
        (24, &[8]),
        (26, &[9]),
        (27, &[]),
        (28, &[]),
        (30, &[]),
        (35, &[8, 9]),
        (36, &[1, 2, 3]),
        (33, &[4]),
        (25, &[26]),
        (17, &[18]),
        (13, &[14]),
        (12, &[2]),
        (15, &[]),
        (22, &[]),
        (23, &[24]),
        (29, &[6]),
        (31, &[]),
        (32, &[]),
        (34, &[7, 10]),
    ];
    for &(j, expected) in expected {
        assert_eq!(off(j), vs(expected), "N+({j}) off the outer cycles");
    }
    let inside: &[(Vertex, &[Vertex])] = &[
        (33, &[32]),
        (25, &[22]),
        (17, &[15]),
        (13, &[15]),
        (12, &[13]),
        (15, &[12, 17, 22]),
        (22, &[15, 23]),
        (23, &[25]),
        (29, &[31]),
        (31, &[29]),
        (32, &[33, 34]),
        (34, &[32]),
    ];
    for &(j, expected) in inside {
        assert_eq!(a.n_c(g, j), vs(expected), "N+_C({j})");
    }
}
