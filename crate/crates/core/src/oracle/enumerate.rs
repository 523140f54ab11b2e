//! Small IC structures for property tests.
//!
//! Every IC structure is the union of one I-path per ordered pair of inner
//! vertices, and the two ways a partial union can go wrong (a second I-path
//! between some pair, or an I-cycle) persist when edges are added. So graphs
//! are grown path by path with that check as a pruning rule: exhaustively for
//! small `N`, by seeded randomized greedy growth beyond.
//!
//! Inner vertices are `1..=K`. Graphs with a vertex that touches no edge are
//! skipped; they add nothing over the smaller graph.

use std::collections::{HashSet, VecDeque};
use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{SideInfoGraph, Vertex};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub min_n: u32,
    /// Largest vertex count; at most 8 for [`enumerate_ic_structures`].
    pub max_n: u32,
    pub k_range: RangeInclusive<usize>,
    pub seed: u64,
    /// Candidate graphs attempted by the sampler.
    pub budget: usize,
    /// Exhaustive search for `N` up to this bound, sampling above it.
    pub exhaustive_max_n: u32,
    /// Steer sampled I-paths along a few planted overlapping cycles of
    /// non-inner vertices, which makes outer-cycle groups far more common.
    pub cycle_bias: bool,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig { min_n: 2, max_n: 8, k_range: 2..=8, seed: 0, budget: 100_000, exhaustive_max_n: 5, cycle_bias: false }
    }
}

type EdgeList = Vec<(Vertex, Vertex)>;

/// Growing edge set on vertices `1..=n` with inner vertices `1..=k`.
#[derive(Clone)]
struct Partial {
    n: u32,
    k: u32,
    out: Vec<Vec<Vertex>>,
}

impl Partial {
    fn new(n: u32, k: u32) -> Self {
        Partial { n, k, out: vec![Vec::new(); n as usize + 1] }
    }

    fn is_inner(&self, v: Vertex) -> bool {
        v <= self.k
    }

    fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.out[u as usize].contains(&v)
    }

    fn add_path(&mut self, path: &[Vertex]) {
        for w in path.windows(2) {
            if !self.has_edge(w[0], w[1]) {
                self.out[w[0] as usize].push(w[1]);
            }
        }
    }

    /// I-paths from `a` to each inner vertex, capped at 2, plus whether an
    /// I-cycle through `a` exists.
    fn scan(&self, a: Vertex) -> (Vec<u8>, bool) {
        let mut counts = vec![0u8; self.k as usize + 1];
        let mut cycle = false;
        let mut on_path = vec![false; self.n as usize + 1];
        on_path[a as usize] = true;
        self.walk(a, a, &mut on_path, &mut counts, &mut cycle);
        (counts, cycle)
    }

    fn walk(&self, a: Vertex, v: Vertex, on_path: &mut [bool], counts: &mut [u8], cycle: &mut bool) {
        for &w in &self.out[v as usize] {
            if w == a {
                if v != a {
                    *cycle = true;
                }
            } else if self.is_inner(w) {
                counts[w as usize] = counts[w as usize].saturating_add(1).min(2);
            } else if !on_path[w as usize] {
                on_path[w as usize] = true;
                self.walk(a, w, on_path, counts, cycle);
                on_path[w as usize] = false;
            }
        }
    }

    /// Neither a repeated I-path nor an I-cycle.
    fn sound(&self) -> bool {
        (1..=self.k).all(|a| {
            let (counts, cycle) = self.scan(a);
            !cycle && counts.iter().all(|&c| c <= 1)
        })
    }

    fn connected(&self, a: Vertex, b: Vertex) -> bool {
        self.scan(a).0[b as usize] == 1
    }

    fn covers_all_vertices(&self) -> bool {
        let mut touched = vec![false; self.n as usize + 1];
        for u in 1..=self.n {
            for &v in &self.out[u as usize] {
                touched[u as usize] = true;
                touched[v as usize] = true;
            }
        }
        touched[1..].iter().all(|&t| t)
    }

    fn edges(&self) -> EdgeList {
        let mut e: EdgeList = (1..=self.n).flat_map(|u| self.out[u as usize].iter().map(move |&v| (u, v))).collect();
        e.sort_unstable();
        e
    }
}

fn ordered_pairs(k: u32) -> Vec<(Vertex, Vertex)> {
    (1..=k).flat_map(|a| (1..=k).filter(move |&b| b != a).map(move |b| (a, b))).collect()
}

/// Every sequence of distinct non-inner vertices, including the empty one.
fn interiors(n: u32, k: u32) -> Vec<Vec<Vertex>> {
    fn extend(n: u32, k: u32, cur: &mut Vec<Vertex>, out: &mut Vec<Vec<Vertex>>) {
        out.push(cur.clone());
        for v in k + 1..=n {
            if !cur.contains(&v) {
                cur.push(v);
                extend(n, k, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, k, &mut Vec::new(), &mut out);
    out
}

fn exhaustive(n: u32, k: u32, emit: &mut dyn FnMut(EdgeList)) {
    fn go(p: &Partial, pairs: &[(Vertex, Vertex)], interiors: &[Vec<Vertex>], emit: &mut dyn FnMut(EdgeList)) {
        let Some((&(a, b), rest)) = pairs.split_first() else {
            if p.covers_all_vertices() {
                emit(p.edges());
            }
            return;
        };
        if p.connected(a, b) {
            go(p, rest, interiors, emit);
            return;
        }
        for mid in interiors {
            let path: Vec<Vertex> = std::iter::once(a).chain(mid.iter().copied()).chain(std::iter::once(b)).collect();
            let mut next = p.clone();
            next.add_path(&path);
            if next.sound() {
                go(&next, rest, interiors, emit);
            }
        }
    }
    go(&Partial::new(n, k), &ordered_pairs(k), &interiors(n, k), emit);
}

/// Overlapping short cycles on a pool of non-inner vertices, each pool vertex
/// leaving the pool towards its own inner vertex.
struct Gadget {
    succ: Vec<Vec<Vertex>>,
    exit_of: Vec<(Vertex, Vertex)>,
    /// Where each inner vertex that is nobody's exit enters the pool.
    entry_of: Vec<(Vertex, Vertex)>,
}

impl Gadget {
    fn plant(n: u32, k: u32, rng: &mut ChaCha8Rng) -> Option<Gadget> {
        let non_inner: Vec<Vertex> = (k + 1..=n).collect();
        let max_pool = non_inner.len().min(k as usize - 1).min(5);
        if max_pool < 2 {
            return None;
        }
        let size = rng.random_range(2..=max_pool);
        let pool: Vec<Vertex> = non_inner.choose_multiple(rng, size).copied().collect();
        let mut succ = vec![Vec::new(); n as usize + 1];
        for _ in 0..rng.random_range(2..=4) {
            let len = rng.random_range(2..=3).min(pool.len());
            let cycle: Vec<Vertex> = pool.choose_multiple(rng, len).copied().collect();
            for j in 0..cycle.len() {
                let (u, v) = (cycle[j], cycle[(j + 1) % cycle.len()]);
                if !succ[u as usize].contains(&v) {
                    succ[u as usize].push(v);
                }
            }
        }
        let inner: Vec<Vertex> = (1..=k).collect();
        let exits: Vec<Vertex> = inner.choose_multiple(rng, pool.len()).copied().collect();
        let entry_of = inner
            .iter()
            .filter(|a| !exits.contains(a))
            .map(|&a| (a, *pool.choose(rng).unwrap()))
            .collect();
        let exit_of = pool.iter().copied().zip(exits).collect();
        Some(Gadget { succ, exit_of, entry_of })
    }

    /// Shortest walk inside the gadget from `from` to `to`, both included.
    fn route(&self, from: Vertex, to: Vertex) -> Option<Vec<Vertex>> {
        let mut prev: Vec<Option<Vertex>> = vec![None; self.succ.len()];
        let mut queue = VecDeque::from([from]);
        prev[from as usize] = Some(from);
        while let Some(u) = queue.pop_front() {
            if u == to {
                let mut path = vec![to];
                while *path.last().unwrap() != from {
                    path.push(prev[*path.last().unwrap() as usize].unwrap());
                }
                path.reverse();
                return Some(path);
            }
            for &v in &self.succ[u as usize] {
                if prev[v as usize].is_none() {
                    prev[v as usize] = Some(u);
                    queue.push_back(v);
                }
            }
        }
        None
    }

    /// Interior of an I-path from `a` through the pool, leaving through the
    /// vertex whose exit is `b`.
    fn interior(&self, a: Vertex, b: Vertex) -> Option<Vec<Vertex>> {
        let &(w, _) = self.exit_of.iter().find(|&&(_, e)| e == b)?;
        let &(_, u) = self.entry_of.iter().find(|&&(x, _)| x == a)?;
        self.route(u, w)
    }
}

fn sample(n: u32, k: u32, cycle_bias: bool, rng: &mut ChaCha8Rng) -> Option<EdgeList> {
    const TRIES_PER_PAIR: usize = 12;
    let non_inner: Vec<Vertex> = (k + 1..=n).collect();
    let gadget = if cycle_bias { Gadget::plant(n, k, rng) } else { None };
    let mut pairs = ordered_pairs(k);
    pairs.shuffle(rng);
    let mut p = Partial::new(n, k);
    for (a, b) in pairs {
        if p.connected(a, b) {
            continue;
        }
        let mut placed = false;
        for _ in 0..TRIES_PER_PAIR {
            let mut path = vec![a];
            let routed = match &gadget {
                Some(gd) => gd.interior(a, b),
                _ => None,
            };
            if let Some(mid) = routed {
                path.extend(mid);
            } else {
                let len = *[0usize, 1, 2, 2, 3].choose(rng).unwrap();
                path.extend(non_inner.choose_multiple(rng, len.min(non_inner.len())));
            }
            path.push(b);
            let mut next = p.clone();
            next.add_path(&path);
            if next.sound() {
                p = next;
                placed = true;
                break;
            }
        }
        if !placed {
            return None;
        }
    }
    p.covers_all_vertices().then(|| p.edges())
}

/// Lazily yields distinct IC structures: the exhaustive range first, in
/// `(N, K)` order, then samples until the budget is spent.
pub struct IcEnumerator {
    cfg: EnumerationConfig,
    rng: ChaCha8Rng,
    seen: HashSet<(u32, u32, EdgeList)>,
    queue: VecDeque<SideInfoGraph>,
    exhaustive_done: bool,
    attempts: usize,
}

impl IcEnumerator {
    /// Candidate graphs tried by the sampler so far.
    pub fn attempts(&self) -> usize {
        self.attempts
    }

    fn admit(&mut self, n: u32, k: u32, edges: EdgeList) -> Option<SideInfoGraph> {
        if !self.seen.insert((n, k, edges.clone())) {
            return None;
        }
        let inner: Vec<Vertex> = (1..=k).collect();
        Some(SideInfoGraph::new(n, &inner, edges).expect("enumerated edges are well formed"))
    }

    fn k_values(&self, n: u32) -> Vec<u32> {
        (2..=n).filter(|&k| self.cfg.k_range.contains(&(k as usize))).collect()
    }
}

impl Iterator for IcEnumerator {
    type Item = SideInfoGraph;

    fn next(&mut self) -> Option<SideInfoGraph> {
        if !self.exhaustive_done {
            self.exhaustive_done = true;
            for n in self.cfg.min_n.max(2)..=self.cfg.max_n.min(self.cfg.exhaustive_max_n) {
                for k in self.k_values(n) {
                    let mut found = Vec::new();
                    exhaustive(n, k, &mut |e| found.push(e));
                    for e in found {
                        if let Some(g) = self.admit(n, k, e) {
                            self.queue.push_back(g);
                        }
                    }
                }
            }
        }
        if let Some(g) = self.queue.pop_front() {
            return Some(g);
        }
        let lo = self.cfg.min_n.max(self.cfg.exhaustive_max_n + 1);
        if lo > self.cfg.max_n {
            return None;
        }
        while self.attempts < self.cfg.budget {
            self.attempts += 1;
            let n = self.rng.random_range(lo..=self.cfg.max_n);
            let ks = self.k_values(n);
            let Some(&k) = ks.choose(&mut self.rng) else { continue };
            if let Some(edges) = sample(n, k, self.cfg.cycle_bias, &mut self.rng) {
                if let Some(g) = self.admit(n, k, edges) {
                    return Some(g);
                }
            }
        }
        None
    }
}

/// Stream of IC structures with `cfg.min_n <= N <= cfg.max_n`, deduplicated
/// by `(N, K, edges)`.
pub fn enumerate_ic_structures(cfg: EnumerationConfig) -> IcEnumerator {
    assert!(cfg.max_n <= 8, "enumeration is meant for N <= 8");
    assert!(cfg.exhaustive_max_n <= 6, "exhaustive search beyond N = 6 is too slow");
    stream(cfg)
}

/// Sampling only, for graphs larger than [`enumerate_ic_structures`] allows.
pub fn sample_ic_structures(cfg: EnumerationConfig) -> IcEnumerator {
    assert!(cfg.max_n <= 64, "sampling is meant for small graphs");
    stream(EnumerationConfig { exhaustive_max_n: 0, ..cfg })
}

fn stream(cfg: EnumerationConfig) -> IcEnumerator {
    IcEnumerator {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
        seen: HashSet::new(),
        queue: VecDeque::new(),
        exhaustive_done: false,
        attempts: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::validate;

    #[test]
    fn smallest_structure_comes_first() {
        let cfg = EnumerationConfig { max_n: 2, ..Default::default() };
        let all: Vec<_> = enumerate_ic_structures(cfg).collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].edges().collect::<Vec<_>>(), vec![(1, 2), (2, 1)]);
    }

    #[test]
    fn exhaustive_output_validates() {
        let cfg = EnumerationConfig { max_n: 4, ..Default::default() };
        let all: Vec<_> = enumerate_ic_structures(cfg).collect();
        assert!(all.len() > 10);
        for g in &all {
            assert!(validate(g).unwrap().is_ic_structure, "{g:?}");
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let cfg = EnumerationConfig { max_n: 6, k_range: 4..=4, budget: 300, seed: 9, ..Default::default() };
        let a: Vec<_> = enumerate_ic_structures(cfg.clone()).map(|g| g.to_json()).collect();
        let b: Vec<_> = enumerate_ic_structures(cfg).map(|g| g.to_json()).collect();
        assert_eq!(a, b);
    }
}
