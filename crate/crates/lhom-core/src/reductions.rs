//! Reductions from hypergraph list homomorphism (CSP) to graph list
//! homomorphism, and the polymorphism-detection construction built on top of
//! the same signature machinery.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::graph::{Digraph, Homomorphism, Instance, ListAssignment};
use crate::solver::remove_minority;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum HypergraphError {
    EntryOutOfRange { block: u32, value: u32 },
    ArityMismatch { block: u32 },
    ListArityMismatch { edge: u32 },
    ListCountMismatch { expected: u32, got: u32 },
}

impl fmt::Display for HypergraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HypergraphError::EntryOutOfRange { block, value } => {
                write!(f, "block {} mentions value {} outside the domain", block, value)
            }
            HypergraphError::ArityMismatch { block } => {
                write!(f, "block {} mixes tuple arities", block)
            }
            HypergraphError::ListArityMismatch { edge } => {
                write!(f, "list of hyperedge {} has a tuple of wrong arity", edge)
            }
            HypergraphError::ListCountMismatch { expected, got } => {
                write!(f, "expected {} lists, got {}", expected, got)
            }
        }
    }
}

/// One uniform relation: a set of ordered tuples of a fixed arity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Block {
    pub arity: usize,
    pub tuples: Vec<Vec<u32>>,
}

/// Ordered tuples over a finite domain, partitioned into uniform blocks.
/// A relational structure is exactly this, with one block per relation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Hypergraph {
    domain: usize,
    blocks: Vec<Block>,
}

impl Hypergraph {
    pub fn new(domain: usize, blocks: Vec<Block>) -> Result<Hypergraph, HypergraphError> {
        let mut blocks = blocks;
        for (bi, b) in blocks.iter_mut().enumerate() {
            b.tuples.sort_unstable();
            b.tuples.dedup();
            for t in &b.tuples {
                if t.len() != b.arity {
                    return Err(HypergraphError::ArityMismatch { block: bi as u32 });
                }
                for &v in t {
                    if v as usize >= domain {
                        return Err(HypergraphError::EntryOutOfRange { block: bi as u32, value: v });
                    }
                }
            }
        }
        Ok(Hypergraph { domain, blocks })
    }

    /// Plain hypergraph constructor: hyperedges are grouped into uniform
    /// blocks by arity, ascending.
    pub fn from_edges(domain: usize, edges: Vec<Vec<u32>>) -> Result<Hypergraph, HypergraphError> {
        let mut arities: Vec<usize> = edges.iter().map(|e| e.len()).collect();
        arities.sort_unstable();
        arities.dedup();
        let blocks = arities
            .into_iter()
            .map(|r| Block {
                arity: r,
                tuples: edges.iter().filter(|e| e.len() == r).cloned().collect(),
            })
            .collect();
        Hypergraph::new(domain, blocks)
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn edge_count(&self) -> usize {
        self.blocks.iter().map(|b| b.tuples.len()).sum()
    }

    /// Hyperedges in global order: blocks in order, tuples within each block.
    pub fn edges(&self) -> impl Iterator<Item = (u32, &Vec<u32>)> {
        self.blocks
            .iter()
            .enumerate()
            .flat_map(|(bi, b)| b.tuples.iter().map(move |t| (bi as u32, t)))
    }
}

/// A hypergraph list-homomorphism instance: every source hyperedge carries a
/// list of same-arity target hyperedges it may map onto.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HyperInstance {
    pub source: Hypergraph,
    pub target: Hypergraph,
    /// Indexed by global source hyperedge order.
    pub lists: Vec<Vec<Vec<u32>>>,
}

impl HyperInstance {
    pub fn new(
        source: Hypergraph,
        target: Hypergraph,
        lists: Vec<Vec<Vec<u32>>>,
    ) -> Result<HyperInstance, HypergraphError> {
        if lists.len() != source.edge_count() {
            return Err(HypergraphError::ListCountMismatch {
                expected: source.edge_count() as u32,
                got: lists.len() as u32,
            });
        }
        for ((_, alpha), (ei, list)) in source.edges().zip(lists.iter().enumerate()) {
            for t in list {
                if t.len() != alpha.len() {
                    return Err(HypergraphError::ListArityMismatch { edge: ei as u32 });
                }
            }
        }
        Ok(HyperInstance { source, target, lists })
    }
}

/// Coordinate pairs on which two tuples agree, `(i, j)` meaning
/// `t1[i] == t2[j]`. Stored 0-based and sorted.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    pairs: Vec<(u32, u32)>,
}

impl Signature {
    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn is_subset_of(&self, other: &Signature) -> bool {
        self.pairs.iter().all(|p| other.pairs.binary_search(p).is_ok())
    }

    pub fn intersect(&self, other: &Signature) -> Signature {
        Signature {
            pairs: self
                .pairs
                .iter()
                .copied()
                .filter(|p| other.pairs.binary_search(p).is_ok())
                .collect(),
        }
    }
}

pub fn signature(t1: &[u32], t2: &[u32]) -> Signature {
    let mut pairs = Vec::new();
    for (i, &a) in t1.iter().enumerate() {
        for (j, &b) in t2.iter().enumerate() {
            if a == b {
                pairs.push((i as u32, j as u32));
            }
        }
    }
    Signature { pairs }
}

/// Signature as a bitmask over `i * w + j`; usable when `t1.len() * t2.len()`
/// fits in 128 bits, which covers every construction in this crate.
fn sig_mask(t1: &[u32], t2: &[u32]) -> u128 {
    debug_assert!(t1.len() * t2.len() <= 128);
    let w = t2.len();
    let mut m = 0u128;
    for (i, &a) in t1.iter().enumerate() {
        for (j, &b) in t2.iter().enumerate() {
            if a == b {
                m |= 1u128 << (i * w + j);
            }
        }
    }
    m
}

/// Output of [`hyper_to_graph`]: the graph instance and the labels linking
/// its vertices back to hyperedges and tuples.
#[derive(Clone, Debug)]
pub struct HyperReduction {
    pub instance: Instance,
    /// Source tuple of each input-graph vertex, in vertex order.
    pub g_edge_tuples: Vec<Vec<u32>>,
    /// `(input vertex, target tuple)` of each target-graph vertex: one target
    /// vertex per list occurrence.
    pub h_labels: Vec<(u32, Vec<u32>)>,
}

/// The list-homomorphism encoding of a hypergraph instance: one input vertex
/// per source hyperedge, one target vertex per list occurrence, edges where
/// signatures are shared and respected. All edges are symmetric arc pairs.
pub fn hyper_to_graph(hi: &HyperInstance) -> Result<HyperReduction, HypergraphError> {
    let g_edge_tuples: Vec<Vec<u32>> = hi.source.edges().map(|(_, t)| t.clone()).collect();
    let n = g_edge_tuples.len();

    let mut h_labels: Vec<(u32, Vec<u32>)> = Vec::new();
    let mut lists: Vec<Vec<u32>> = Vec::with_capacity(n);
    for (ei, list) in hi.lists.iter().enumerate() {
        if list.iter().any(|t| t.len() != g_edge_tuples[ei].len()) {
            return Err(HypergraphError::ListArityMismatch { edge: ei as u32 });
        }
        let start = h_labels.len() as u32;
        for t in list {
            h_labels.push((ei as u32, t.clone()));
        }
        lists.push((start..h_labels.len() as u32).collect());
    }

    let mut g_edges: Vec<(u32, u32)> = Vec::new();
    let mut h_edges: Vec<(u32, u32)> = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let s_ab = sig_mask(&g_edge_tuples[a], &g_edge_tuples[b]);
            if s_ab == 0 {
                continue;
            }
            g_edges.push((a as u32, b as u32));
            for &tv in &lists[a] {
                for &wv in &lists[b] {
                    let s_tw = sig_mask(&h_labels[tv as usize].1, &h_labels[wv as usize].1);
                    if s_ab & !s_tw == 0 {
                        h_edges.push((tv, wv));
                    }
                }
            }
        }
    }

    let g = Digraph::symmetric(n as u32, &g_edges).expect("edges in range");
    let h = Digraph::symmetric(h_labels.len() as u32, &h_edges).expect("edges in range");
    let instance = Instance::new(g, h, ListAssignment::new(lists)).expect("reduction instance");
    Ok(HyperReduction {
        instance,
        g_edge_tuples,
        h_labels,
    })
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct PullBackConflict {
    pub element: u32,
    pub first: u32,
    pub second: u32,
}

impl fmt::Display for PullBackConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "element {} assigned both {} and {}",
            self.element, self.first, self.second
        )
    }
}

/// Reads the per-element assignment off a homomorphism of the reduced graph.
/// Elements covered by no hyperedge default to value 0.
pub fn pull_back(
    hi: &HyperInstance,
    red: &HyperReduction,
    f: &Homomorphism,
) -> Result<Vec<u32>, PullBackConflict> {
    let mut assign: Vec<Option<u32>> = vec![None; hi.source.domain()];
    for (gi, alpha) in red.g_edge_tuples.iter().enumerate() {
        let img = f.image(gi as u32);
        let tau = &red.h_labels[img as usize].1;
        for (i, &x) in alpha.iter().enumerate() {
            let v = tau[i];
            match assign[x as usize] {
                None => assign[x as usize] = Some(v),
                Some(prev) if prev == v => {}
                Some(prev) => {
                    return Err(PullBackConflict {
                        element: x,
                        first: prev,
                        second: v,
                    })
                }
            }
        }
    }
    Ok(assign.into_iter().map(|v| v.unwrap_or(0)).collect())
}

/// A partial or total ternary operation table over a finite domain.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TernaryTable {
    domain: usize,
    entries: Vec<Option<u32>>,
}

impl TernaryTable {
    pub fn new(domain: usize) -> TernaryTable {
        TernaryTable {
            domain,
            entries: vec![None; domain * domain * domain],
        }
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    #[inline]
    fn idx(&self, a: u32, b: u32, c: u32) -> usize {
        (a as usize * self.domain + b as usize) * self.domain + c as usize
    }

    pub fn get(&self, a: u32, b: u32, c: u32) -> Option<u32> {
        self.entries[self.idx(a, b, c)]
    }

    /// Records a value; reports the existing value on disagreement.
    pub fn record(&mut self, a: u32, b: u32, c: u32, v: u32) -> Result<(), u32> {
        let i = self.idx(a, b, c);
        match self.entries[i] {
            None => {
                self.entries[i] = Some(v);
                Ok(())
            }
            Some(prev) if prev == v => Ok(()),
            Some(prev) => Err(prev),
        }
    }

    pub fn erase(&mut self, a: u32, b: u32, c: u32) {
        let i = self.idx(a, b, c);
        self.entries[i] = None;
    }

    pub fn is_total(&self) -> bool {
        self.entries.iter().all(|e| e.is_some())
    }

    /// Fills the undefined triples: repeat patterns get their forced value,
    /// every other triple gets its first coordinate.
    pub fn complete(&mut self) {
        let d = self.domain as u32;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let i = self.idx(a, b, c);
                    if self.entries[i].is_none() {
                        let v = if b == c {
                            a
                        } else if a == b {
                            c
                        } else {
                            a
                        };
                        self.entries[i] = Some(v);
                    }
                }
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct WellDefinednessConflict {
    pub args: (u32, u32, u32),
    pub first: u32,
    pub second: u32,
}

impl fmt::Display for WellDefinednessConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "h{:?} recorded as both {} and {}",
            self.args, self.first, self.second
        )
    }
}

/// Output of [`detection_instance`]: the graph instance plus labels mapping
/// its vertices back to tuple triples and tuples.
#[derive(Clone, Debug)]
pub struct DetectionReduction {
    pub instance: Instance,
    /// `(block, [tuple indices within block])` per input vertex.
    pub g_triples: Vec<(u32, [u32; 3])>,
    /// `(block, tuple index within block)` per target vertex. Target vertices
    /// are created per list occurrence, as in the homomorphism encoding, so
    /// that an edge between two of them always certifies the signature
    /// containment of their own input edge.
    pub h_labels: Vec<(u32, u32)>,
}

impl DetectionReduction {
    fn tuple<'a>(&self, hg: &'a Hypergraph, block: u32, idx: u32) -> &'a [u32] {
        &hg.blocks()[block as usize].tuples[idx as usize]
    }
}

/// The Maltsev-detection instance: one input vertex per ordered triple of
/// same-block hyperedges, lists forced by the coordinate conditions, edges by
/// non-empty signature intersection and its containment in the target pair's
/// signature. The instance is polynomial but cubic in the block sizes.
pub fn detection_instance(hg: &Hypergraph) -> DetectionReduction {
    // Tuple index base per block, for global signature lookups.
    let mut t_base: Vec<u32> = Vec::new();
    let mut e = 0u32;
    for b in hg.blocks() {
        t_base.push(e);
        e += b.tuples.len() as u32;
    }
    let e = e as usize;

    let mut g_triples: Vec<(u32, [u32; 3])> = Vec::new();
    let mut admitted: Vec<Vec<u32>> = Vec::new(); // tuple indices within the block
    for (bi, b) in hg.blocks().iter().enumerate() {
        let m = b.tuples.len() as u32;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    let (alpha, beta, gamma) =
                        (&b.tuples[i as usize], &b.tuples[j as usize], &b.tuples[k as usize]);
                    let list: Vec<u32> = b
                        .tuples
                        .iter()
                        .enumerate()
                        .filter(|(_, tau)| triple_list_admits(alpha, beta, gamma, tau))
                        .map(|(ti, _)| ti as u32)
                        .collect();
                    g_triples.push((bi as u32, [i, j, k]));
                    admitted.push(list);
                }
            }
        }
    }

    // One target vertex per list occurrence.
    let mut h_labels: Vec<(u32, u32)> = Vec::new();
    let mut lists: Vec<Vec<u32>> = Vec::with_capacity(g_triples.len());
    for (x, list) in admitted.iter().enumerate() {
        let start = h_labels.len() as u32;
        let (bx, _) = g_triples[x];
        for &ti in list {
            h_labels.push((bx, ti));
        }
        lists.push((start..h_labels.len() as u32).collect());
    }

    // Signature masks between all pairs of tuples (global order).
    let all_tuples: Vec<&Vec<u32>> = hg.blocks().iter().flat_map(|b| b.tuples.iter()).collect();
    let mut sig: Vec<u128> = vec![0; e * e];
    for s in 0..e {
        for t in 0..e {
            sig[s * e + t] = sig_mask(all_tuples[s], all_tuples[t]);
        }
    }
    let gid = |bi: u32, ti: u32| (t_base[bi as usize] + ti) as usize;

    let n = g_triples.len();
    let mut g_edges: Vec<(u32, u32)> = Vec::new();
    let mut h_edges: Vec<(u32, u32)> = Vec::new();
    for x in 0..n {
        let (bx, [i1, j1, k1]) = g_triples[x];
        for y in x + 1..n {
            let (by, [i2, j2, k2]) = g_triples[y];
            let s = sig[gid(bx, i1) * e + gid(by, i2)]
                & sig[gid(bx, j1) * e + gid(by, j2)]
                & sig[gid(bx, k1) * e + gid(by, k2)];
            if s == 0 {
                continue;
            }
            g_edges.push((x as u32, y as u32));
            for (pt, &ti) in admitted[x].iter().enumerate() {
                for (pw, &wi) in admitted[y].iter().enumerate() {
                    if s & !sig[gid(bx, ti) * e + gid(by, wi)] == 0 {
                        h_edges.push((lists[x][pt], lists[y][pw]));
                    }
                }
            }
        }
    }

    let g = Digraph::symmetric(n as u32, &g_edges).expect("edges in range");
    let h = Digraph::symmetric(h_labels.len() as u32, &h_edges).expect("edges in range");
    let instance = Instance::new(g, h, ListAssignment::new(lists)).expect("detection instance");
    DetectionReduction {
        instance,
        g_triples,
        h_labels,
    }
}

/// The three coordinate conditions a list tuple must satisfy for the triple
/// `(alpha, beta, gamma)`.
fn triple_list_admits(alpha: &[u32], beta: &[u32], gamma: &[u32], tau: &[u32]) -> bool {
    for i in 0..alpha.len() {
        if alpha[i] == beta[i] && beta[i] == gamma[i] && tau[i] != alpha[i] {
            return false;
        }
        if alpha[i] == beta[i] && tau[i] != gamma[i] {
            return false;
        }
        if beta[i] == gamma[i] && tau[i] != alpha[i] {
            return false;
        }
    }
    true
}

/// Reads the ternary operation off a homomorphism of the detection instance,
/// coordinate by coordinate. Disagreements cannot happen for a verified
/// homomorphism and are reported as internal-consistency failures.
pub fn extract_maltsev(
    hg: &Hypergraph,
    red: &DetectionReduction,
    f: &Homomorphism,
) -> Result<TernaryTable, WellDefinednessConflict> {
    let mut table = TernaryTable::new(hg.domain());
    for (x, &(bi, [i, j, k])) in red.g_triples.iter().enumerate() {
        let img = f.image(x as u32);
        let (tb, ti) = red.h_labels[img as usize];
        debug_assert_eq!(tb, bi);
        let tau = red.tuple(hg, tb, ti);
        let alpha = red.tuple(hg, bi, i);
        let beta = red.tuple(hg, bi, j);
        let gamma = red.tuple(hg, bi, k);
        for c in 0..alpha.len() {
            table
                .record(alpha[c], beta[c], gamma[c], tau[c])
                .map_err(|prev| WellDefinednessConflict {
                    args: (alpha[c], beta[c], gamma[c]),
                    first: prev,
                    second: tau[c],
                })?;
        }
    }
    Ok(table)
}

/// Decides whether a hypergraph (relational structure) admits a Maltsev
/// polymorphism, returning a verified total table when it does. A `None`
/// answer is unconditionally correct: the detection instance admits a Maltsev
/// list polymorphism precisely when the structure admits one.
pub fn detect_maltsev(hg: &Hypergraph) -> Option<TernaryTable> {
    let red = detection_instance(hg);
    let f = remove_minority(&red.instance)?;
    let mut table = extract_maltsev(hg, &red, &f)
        .expect("verified detection homomorphism yields a well-defined operation");
    table.complete();
    assert!(
        crate::oracle::verify_maltsev_table(hg, &table),
        "extracted table must verify"
    );
    Some(table)
}
