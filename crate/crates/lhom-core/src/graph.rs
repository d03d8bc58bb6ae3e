//! Digraphs, list assignments, instances, walks, and homomorphism checking.
//!
//! Vertices are dense integer ids `0..n`. Arcs are ordered pairs with set
//! semantics; self-loops are allowed (targets routinely carry them).

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::Bitset;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum GraphError {
    ArcOutOfRange { arc: (u32, u32), n: u32 },
    ListKeyMismatch { expected: u32, got: u32 },
    ListValueOutOfRange { vertex: u32, value: u32 },
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::ArcOutOfRange { arc, n } => {
                write!(f, "arc ({},{}) out of range for {} vertices", arc.0, arc.1, n)
            }
            GraphError::ListKeyMismatch { expected, got } => {
                write!(f, "expected {} lists, got {}", expected, got)
            }
            GraphError::ListValueOutOfRange { vertex, value } => {
                write!(f, "list of vertex {} mentions invalid target vertex {}", vertex, value)
            }
        }
    }
}

/// A digraph on dense vertex ids with both forward and reverse adjacency.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Digraph {
    n: u32,
    arcs: Vec<(u32, u32)>,
    out: Vec<Vec<u32>>,
    inn: Vec<Vec<u32>>,
}

impl Digraph {
    pub fn new(n: u32, mut arcs: Vec<(u32, u32)>) -> Result<Digraph, GraphError> {
        arcs.sort_unstable();
        arcs.dedup();
        for &(u, v) in &arcs {
            if u >= n || v >= n {
                return Err(GraphError::ArcOutOfRange { arc: (u, v), n });
            }
        }
        let mut out = vec![Vec::new(); n as usize];
        let mut inn = vec![Vec::new(); n as usize];
        for &(u, v) in &arcs {
            out[u as usize].push(v);
            inn[v as usize].push(u);
        }
        Ok(Digraph { n, arcs, out, inn })
    }

    /// Builds an undirected graph: every edge becomes a pair of opposite arcs.
    pub fn symmetric(n: u32, edges: &[(u32, u32)]) -> Result<Digraph, GraphError> {
        let mut arcs = Vec::with_capacity(edges.len() * 2);
        for &(u, v) in edges {
            arcs.push((u, v));
            arcs.push((v, u));
        }
        Digraph::new(n, arcs)
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn arcs(&self) -> &[(u32, u32)] {
        &self.arcs
    }

    pub fn has_arc(&self, u: u32, v: u32) -> bool {
        if u >= self.n || v >= self.n {
            return false;
        }
        self.out[u as usize].binary_search(&v).is_ok()
    }

    #[inline]
    pub fn out_neighbors(&self, u: u32) -> &[u32] {
        &self.out[u as usize]
    }

    #[inline]
    pub fn in_neighbors(&self, u: u32) -> &[u32] {
        &self.inn[u as usize]
    }

    /// Adjacency as a bit matrix, rows indexed by source vertex.
    pub(crate) fn arc_matrix(&self) -> ArcMatrix {
        let n = self.n as usize;
        let mut rows = Vec::with_capacity(n);
        for _ in 0..n {
            rows.push(Bitset::empty(n));
        }
        for &(u, v) in &self.arcs {
            rows[u as usize].set(v as usize);
        }
        ArcMatrix { rows }
    }

    /// Weakly connected components; each component is sorted ascending and the
    /// components are ordered by their smallest vertex.
    pub fn weak_components(&self) -> Vec<Vec<u32>> {
        let n = self.n as usize;
        let mut seen = vec![false; n];
        let mut comps = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let mut comp = Vec::new();
            let mut stack = vec![s as u32];
            seen[s] = true;
            while let Some(u) = stack.pop() {
                comp.push(u);
                for &v in self.out_neighbors(u).iter().chain(self.in_neighbors(u)) {
                    if !seen[v as usize] {
                        seen[v as usize] = true;
                        stack.push(v);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }
}

pub(crate) struct ArcMatrix {
    rows: Vec<Bitset>,
}

impl ArcMatrix {
    #[inline]
    pub fn has(&self, u: u32, v: u32) -> bool {
        self.rows[u as usize].test(v as usize)
    }
}

/// Per-vertex allowed target sets. An empty list is a legal value and signals
/// an infeasible vertex rather than a malformed assignment.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ListAssignment {
    lists: Vec<Vec<u32>>,
}

impl ListAssignment {
    /// Lists are stored sorted and deduplicated.
    pub fn new(mut lists: Vec<Vec<u32>>) -> ListAssignment {
        for l in &mut lists {
            l.sort_unstable();
            l.dedup();
        }
        ListAssignment { lists }
    }

    /// Every vertex gets the full target vertex set.
    pub fn full(g_vertices: u32, h_vertices: u32) -> ListAssignment {
        let all: Vec<u32> = (0..h_vertices).collect();
        ListAssignment {
            lists: vec![all; g_vertices as usize],
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.lists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    #[inline]
    pub fn list(&self, x: u32) -> &[u32] {
        &self.lists[x as usize]
    }

    pub fn lists(&self) -> &[Vec<u32>] {
        &self.lists
    }

    pub fn total_size(&self) -> usize {
        self.lists.iter().map(|l| l.len()).sum()
    }
}

/// One list-homomorphism instance: input digraph, target digraph, lists.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Instance {
    pub g: Digraph,
    pub h: Digraph,
    pub l: ListAssignment,
}

impl Instance {
    pub fn new(g: Digraph, h: Digraph, l: ListAssignment) -> Result<Instance, GraphError> {
        if l.len() != g.n() as usize {
            return Err(GraphError::ListKeyMismatch {
                expected: g.n(),
                got: l.len() as u32,
            });
        }
        for (x, list) in l.lists().iter().enumerate() {
            for &a in list {
                if a >= h.n() {
                    return Err(GraphError::ListValueOutOfRange { vertex: x as u32, value: a });
                }
            }
        }
        Ok(Instance { g, h, l })
    }

    pub fn total_list_size(&self) -> usize {
        self.l.total_size()
    }
}

/// A total vertex map from an input digraph into a target digraph. The type
/// stores an arbitrary map; only [`verify_homomorphism`] decides validity.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Homomorphism {
    pub map: Vec<u32>,
}

impl Homomorphism {
    pub fn new(map: Vec<u32>) -> Homomorphism {
        Homomorphism { map }
    }

    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.map[x as usize]
    }
}

/// True iff `f` is total on the input vertices, maps every arc of `g` onto an
/// arc of `h`, and lands inside every list. Out-of-range images yield `false`.
pub fn verify_homomorphism(inst: &Instance, f: &Homomorphism) -> bool {
    if f.map.len() != inst.g.n() as usize {
        return false;
    }
    for (x, &a) in f.map.iter().enumerate() {
        if a >= inst.h.n() || inst.l.list(x as u32).binary_search(&a).is_err() {
            return false;
        }
    }
    for &(u, v) in inst.g.arcs() {
        if !inst.h.has_arc(f.image(u), f.image(v)) {
            return false;
        }
    }
    true
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Step {
    Forward,
    Backward,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WalkError {
    LengthMismatch,
    MissingArc { from: u32, to: u32, step: Step },
}

/// A walk whose steps may traverse arcs forwards or backwards.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OrientedWalk {
    vertices: Vec<u32>,
    steps: Vec<Step>,
}

impl OrientedWalk {
    /// Validates every step against the host digraph.
    pub fn new(host: &Digraph, vertices: Vec<u32>, steps: Vec<Step>) -> Result<OrientedWalk, WalkError> {
        if vertices.is_empty() || steps.len() != vertices.len() - 1 {
            return Err(WalkError::LengthMismatch);
        }
        for (i, &s) in steps.iter().enumerate() {
            let (u, v) = (vertices[i], vertices[i + 1]);
            let ok = match s {
                Step::Forward => host.has_arc(u, v),
                Step::Backward => host.has_arc(v, u),
            };
            if !ok {
                return Err(WalkError::MissingArc { from: u, to: v, step: s });
            }
        }
        Ok(OrientedWalk { vertices, steps })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }
}

/// Two walks are congruent when they follow the same forward/backward pattern.
pub fn congruent(w1: &OrientedWalk, w2: &OrientedWalk) -> bool {
    w1.steps == w2.steps
}

/// The product digraph over pairs `(x, a)` with `a` in the list of `x`.
/// Vertices are ordered lexicographically by `(x, a)`.
#[derive(Clone, Debug)]
pub struct ProductGraph {
    pub graph: Digraph,
    pub vertices: Vec<(u32, u32)>,
}

impl ProductGraph {
    pub fn index_of(&self, x: u32, a: u32) -> Option<usize> {
        self.vertices.binary_search(&(x, a)).ok()
    }
}

/// Builds the product of the input and the target along the lists: there is an
/// arc `(x,a) -> (y,b)` exactly when `xy` is an input arc and `ab` a target arc.
pub fn product_graph(inst: &Instance) -> ProductGraph {
    let mut vertices = Vec::with_capacity(inst.total_list_size());
    for x in 0..inst.g.n() {
        for &a in inst.l.list(x) {
            vertices.push((x, a));
        }
    }
    let mut arcs = Vec::new();
    for (i, &(x, a)) in vertices.iter().enumerate() {
        for &y in inst.g.out_neighbors(x) {
            for &b in inst.l.list(y) {
                if inst.h.has_arc(a, b) {
                    let j = vertices.binary_search(&(y, b)).expect("product vertex");
                    arcs.push((i as u32, j as u32));
                }
            }
        }
    }
    let graph = Digraph::new(vertices.len() as u32, arcs).expect("product arcs in range");
    ProductGraph { graph, vertices }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_instance() -> Instance {
        // G: x -> y; H: a -> b
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let h = Digraph::new(2, vec![(0, 1)]).unwrap();
        let l = ListAssignment::new(vec![vec![0], vec![1]]);
        Instance::new(g, h, l).unwrap()
    }

    #[test]
    fn verify_accepts_direct_map() {
        let inst = tiny_instance();
        assert!(verify_homomorphism(&inst, &Homomorphism::new(vec![0, 1])));
    }

    #[test]
    fn verify_rejects_list_violation() {
        let inst = tiny_instance();
        assert!(!verify_homomorphism(&inst, &Homomorphism::new(vec![1, 0])));
    }

    #[test]
    fn verify_rejects_malformed_ids() {
        let inst = tiny_instance();
        assert!(!verify_homomorphism(&inst, &Homomorphism::new(vec![0, 7])));
        assert!(!verify_homomorphism(&inst, &Homomorphism::new(vec![0])));
    }

    #[test]
    fn congruent_walks() {
        let h = Digraph::new(3, vec![(0, 1), (2, 1), (1, 2)]).unwrap();
        let w1 = OrientedWalk::new(&h, vec![0, 1, 2], vec![Step::Forward, Step::Backward]).unwrap();
        let w2 = OrientedWalk::new(&h, vec![0, 1, 2], vec![Step::Forward, Step::Forward]).unwrap();
        let w3 = OrientedWalk::new(&h, vec![2, 1, 2], vec![Step::Backward, Step::Forward]).unwrap();
        assert!(congruent(&w1, &w1));
        assert!(!congruent(&w1, &w2));
        assert!(!congruent(&w2, &w3));
        let e1 = OrientedWalk::new(&h, vec![1], vec![]).unwrap();
        let e2 = OrientedWalk::new(&h, vec![2], vec![]).unwrap();
        assert!(congruent(&e1, &e2));
    }

    #[test]
    fn walk_validation() {
        let h = Digraph::new(2, vec![(0, 1)]).unwrap();
        assert!(OrientedWalk::new(&h, vec![0, 1], vec![Step::Backward]).is_err());
        assert!(OrientedWalk::new(&h, vec![1, 0], vec![Step::Backward]).is_ok());
        assert!(OrientedWalk::new(&h, vec![0, 1], vec![]).is_err());
    }

    #[test]
    fn product_single_arc() {
        let inst = tiny_instance();
        let p = product_graph(&inst);
        assert_eq!(p.vertices, vec![(0, 0), (1, 1)]);
        assert_eq!(p.graph.arcs(), &[(0, 1)]);
    }

    #[test]
    fn product_empty_input() {
        let g = Digraph::new(0, vec![]).unwrap();
        let h = Digraph::new(2, vec![(0, 1)]).unwrap();
        let inst = Instance::new(g, h, ListAssignment::new(vec![])).unwrap();
        let p = product_graph(&inst);
        assert_eq!(p.graph.n(), 0);
    }

    #[test]
    fn product_branches() {
        // G: x -> y; H: a -> b, a -> c; L(x) = {a}, L(y) = {b, c}
        let g = Digraph::new(2, vec![(0, 1)]).unwrap();
        let h = Digraph::new(3, vec![(0, 1), (0, 2)]).unwrap();
        let l = ListAssignment::new(vec![vec![0], vec![1, 2]]);
        let inst = Instance::new(g, h, l).unwrap();
        let p = product_graph(&inst);
        assert_eq!(p.vertices, vec![(0, 0), (1, 1), (1, 2)]);
        assert_eq!(p.graph.arcs(), &[(0, 1), (0, 2)]);
    }
}
