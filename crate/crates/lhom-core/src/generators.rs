//! Instance construction: parity-equation systems over Z2, the fixed worked
//! example, random instance families, and the two hand-built counterexample
//! instances.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::graph::{Digraph, Instance, ListAssignment};
use crate::reductions::{Block, HyperInstance, Hypergraph};

/// splitmix64; deterministic across platforms.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Rng {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `0..n` (n > 0).
    pub fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.below(den) < num
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearEquation {
    pub name: String,
    /// Ordered variable ids; the order defines the tuple coordinates.
    pub variables: Vec<u32>,
    /// Right-hand side of the parity constraint (sum of variables mod 2).
    pub parity: bool,
}

/// A system of parity equations over Z2 with named variables.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LinearSystemZ2 {
    pub variables: Vec<String>,
    pub equations: Vec<LinearEquation>,
}

impl LinearSystemZ2 {
    pub fn validate(&self) -> bool {
        self.equations
            .iter()
            .all(|e| e.variables.iter().all(|&v| (v as usize) < self.variables.len()))
    }
}

/// Independent satisfiability check by Gaussian elimination over GF(2).
/// Deliberately not shared with any oracle or solver code path.
pub fn gf2_satisfiable(sys: &LinearSystemZ2) -> bool {
    let words = sys.variables.len().div_ceil(64);
    let mut rows: Vec<(Vec<u64>, bool)> = sys
        .equations
        .iter()
        .map(|e| {
            let mut m = vec![0u64; words];
            for &v in &e.variables {
                m[v as usize / 64] ^= 1u64 << (v % 64);
            }
            (m, e.parity)
        })
        .collect();
    let mut pivot_row = 0usize;
    for col in 0..sys.variables.len() {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r].0[col / 64] >> (col % 64) & 1 != 0)
        else {
            continue;
        };
        rows.swap(pivot_row, r);
        for r2 in 0..rows.len() {
            if r2 != pivot_row && rows[r2].0[col / 64] >> (col % 64) & 1 != 0 {
                let (pm, pb) = rows[pivot_row].clone();
                for (w, p) in rows[r2].0.iter_mut().zip(pm.iter()) {
                    *w ^= p;
                }
                rows[r2].1 ^= pb;
            }
        }
        pivot_row += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rows.iter().all(|(m, b)| m.iter().any(|&w| w != 0) || !b)
}

/// All 0/1 tuples of the equation's arity with the required parity, ascending.
fn equation_solutions(arity: usize, parity: bool) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for v in 0u32..1 << arity {
        if (v.count_ones() & 1 == 1) == parity {
            out.push((0..arity).map(|i| v >> (arity - 1 - i) & 1).collect());
        }
    }
    out
}

/// One source hyperedge per equation (its variable tuple, one block each so
/// the equation order is preserved); the list is every parity-respecting
/// assignment tuple.
pub fn linear_to_hyper(sys: &LinearSystemZ2) -> HyperInstance {
    let n_vars = sys.variables.len();
    let source_blocks: Vec<Block> = sys
        .equations
        .iter()
        .map(|e| Block {
            arity: e.variables.len(),
            tuples: vec![e.variables.clone()],
        })
        .collect();
    let source = Hypergraph::new(n_vars, source_blocks).expect("valid source");
    let lists: Vec<Vec<Vec<u32>>> = sys
        .equations
        .iter()
        .map(|e| equation_solutions(e.variables.len(), e.parity))
        .collect();
    let target_blocks: Vec<Block> = sys
        .equations
        .iter()
        .zip(lists.iter())
        .map(|(e, l)| Block {
            arity: e.variables.len(),
            tuples: l.clone(),
        })
        .collect();
    let target = Hypergraph::new(2, target_blocks).expect("valid target");
    HyperInstance::new(source, target, lists).expect("valid hyper instance")
}

/// An instance together with display names for its vertices.
#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub instance: Instance,
    pub g_names: Vec<String>,
    pub h_names: Vec<String>,
}

fn bits_name(t: &[u32]) -> String {
    t.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

/// Builds the graph instance of a parity system directly from the
/// shared-variable agreement rule: equation vertices are adjacent when they
/// share a variable, solution tuples are adjacent when every shared variable
/// carries the same value. This is an independent code path from the
/// signature-based reduction.
pub fn linear_instance(sys: &LinearSystemZ2) -> NamedInstance {
    let n = sys.equations.len();
    let solutions: Vec<Vec<Vec<u32>>> = sys
        .equations
        .iter()
        .map(|e| equation_solutions(e.variables.len(), e.parity))
        .collect();

    let mut h_names = Vec::new();
    let mut lists: Vec<Vec<u32>> = Vec::with_capacity(n);
    let mut start = 0u32;
    for (e, sols) in sys.equations.iter().zip(solutions.iter()) {
        lists.push((start..start + sols.len() as u32).collect());
        for s in sols {
            h_names.push(format!("{}:{}", e.name, bits_name(s)));
        }
        start += sols.len() as u32;
    }

    // Shared variables between two equations, as coordinate position pairs.
    let shared = |i: usize, j: usize| -> Vec<(usize, usize)> {
        let (ei, ej) = (&sys.equations[i], &sys.equations[j]);
        let mut out = Vec::new();
        for (p, &v) in ei.variables.iter().enumerate() {
            for (q, &w) in ej.variables.iter().enumerate() {
                if v == w {
                    out.push((p, q));
                }
            }
        }
        out
    };

    let mut g_edges = Vec::new();
    let mut h_edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let common = shared(i, j);
            if common.is_empty() {
                continue;
            }
            g_edges.push((i as u32, j as u32));
            for (si, s) in solutions[i].iter().enumerate() {
                for (tj, t) in solutions[j].iter().enumerate() {
                    if common.iter().all(|&(p, q)| s[p] == t[q]) {
                        h_edges.push((lists[i][si], lists[j][tj]));
                    }
                }
            }
        }
    }

    let g = Digraph::symmetric(n as u32, &g_edges).expect("edges in range");
    let h = Digraph::symmetric(h_names.len() as u32, &h_edges).expect("edges in range");
    let instance = Instance::new(g, h, ListAssignment::new(lists)).expect("instance");
    NamedInstance {
        instance,
        g_names: sys.equations.iter().map(|e| e.name.clone()).collect(),
        h_names,
    }
}

/// The fixed ten-equation parity system of the worked example. Every
/// right-hand side is zero, each link variable appears in exactly two
/// equations, and the first equation forces its two variables equal; summing
/// all other equations shows the system is solvable exactly when that value
/// is zero.
pub fn worked_example_system() -> LinearSystemZ2 {
    let variables: Vec<String> = [
        "Y", "Z", "X_bg", "X_bd", "X_gt", "X_gd", "X_gl", "X_dt", "X_dl", "X_lt", "X_tm", "X_lp",
        "X_mp", "X_mt", "X_mw", "X_pt", "X_pw",
    ]
    .iter()
    .map(|s| String::from(*s))
    .collect();
    let eq = |name: &str, vars: &[u32]| LinearEquation {
        name: String::from(name),
        variables: vars.to_vec(),
        parity: false,
    };
    LinearSystemZ2 {
        variables,
        equations: vec![
            eq("alpha", &[0, 1]),
            eq("beta", &[0, 2, 3]),
            eq("gamma", &[4, 2, 5, 6]),
            eq("delta", &[7, 3, 5, 8]),
            eq("theta", &[4, 7, 9, 10]),
            eq("lambda", &[6, 8, 9, 11]),
            eq("mu", &[10, 12, 13, 14]),
            eq("pi", &[11, 12, 15, 16]),
            eq("tau", &[13, 15]),
            eq("omega", &[14, 16]),
        ],
    }
}

/// The worked example as a concrete instance, built by the direct
/// shared-variable scan. Solution tuples are numbered 0..58 in equation
/// order, ascending within each list.
pub fn worked_example() -> NamedInstance {
    linear_instance(&worked_example_system())
}

/// Parameters of the unconstrained random family.
#[derive(Clone, Debug)]
pub struct RandomParams {
    pub g_vertices: u32,
    pub h_vertices: u32,
    pub g_arcs: u32,
    pub h_arcs: u32,
    pub max_list: u32,
}

#[derive(Clone, Debug)]
pub enum RandomMode {
    Unconstrained(RandomParams),
    /// Instances reduced from random parity systems; the coordinatewise xor
    /// is then a Maltsev list polymorphism on the reduced instance.
    PlantedLinear { equations: u32, max_vars: u32, consistent: bool },
}

/// Reproducible pseudo-random instances. The same seed yields the same
/// instance, bit for bit.
pub fn random_instance(seed: u64, mode: &RandomMode) -> Instance {
    match mode {
        RandomMode::Unconstrained(p) => random_unconstrained(seed, p),
        RandomMode::PlantedLinear { equations, max_vars, consistent } => {
            linear_instance(&random_planted_system(seed, *equations, *max_vars, *consistent)).instance
        }
    }
}

fn random_digraph(rng: &mut Rng, n: u32, arcs: u32) -> Digraph {
    let mut set = alloc::collections::BTreeSet::new();
    if n > 0 {
        for _ in 0..arcs * 4 {
            if set.len() as u32 >= arcs {
                break;
            }
            let u = rng.below(n as u64) as u32;
            let v = rng.below(n as u64) as u32;
            set.insert((u, v));
        }
    }
    Digraph::new(n, set.into_iter().collect()).expect("arcs in range")
}

fn random_unconstrained(seed: u64, p: &RandomParams) -> Instance {
    let mut rng = Rng::new(seed);
    let g = random_digraph(&mut rng, p.g_vertices, p.g_arcs);
    let h = random_digraph(&mut rng, p.h_vertices, p.h_arcs);
    let mut lists = Vec::with_capacity(p.g_vertices as usize);
    for _ in 0..p.g_vertices {
        let size = 1 + rng.below(p.max_list.max(1) as u64) as usize;
        let mut l = alloc::collections::BTreeSet::new();
        for _ in 0..size * 3 {
            if l.len() >= size {
                break;
            }
            l.insert(rng.below(p.h_vertices.max(1) as u64) as u32);
        }
        lists.push(l.into_iter().collect());
    }
    Instance::new(g, h, ListAssignment::new(lists)).expect("random instance")
}

/// A random parity system: equations get 2..=max_vars slots, slots are paired
/// into shared link variables, and parities are read off a hidden random
/// assignment (then optionally broken).
pub fn random_planted_system(seed: u64, equations: u32, max_vars: u32, consistent: bool) -> LinearSystemZ2 {
    let mut rng = Rng::new(seed);
    let max_vars = max_vars.clamp(2, 6);
    let capacities: Vec<usize> = (0..equations)
        .map(|_| 2 + rng.below(max_vars as u64 - 1) as usize)
        .collect();
    let mut slots: Vec<usize> = Vec::new();
    for (e, &c) in capacities.iter().enumerate() {
        for _ in 0..c {
            slots.push(e);
        }
    }
    rng.shuffle(&mut slots);

    let mut variables: Vec<String> = Vec::new();
    let mut eq_vars: Vec<Vec<u32>> = vec![Vec::new(); equations as usize];
    let fresh = |variables: &mut Vec<String>| -> u32 {
        let id = variables.len() as u32;
        variables.push(format!("v{}", id));
        id
    };
    let mut i = 0;
    while i + 1 < slots.len() {
        let (a, b) = (slots[i], slots[i + 1]);
        if a == b {
            // A variable repeated inside one equation would break the tuple
            // encoding; give each slot its own free variable instead.
            let v1 = fresh(&mut variables);
            let v2 = fresh(&mut variables);
            eq_vars[a].push(v1);
            eq_vars[b].push(v2);
        } else {
            let v = fresh(&mut variables);
            eq_vars[a].push(v);
            eq_vars[b].push(v);
        }
        i += 2;
    }
    if i < slots.len() {
        let v = fresh(&mut variables);
        eq_vars[slots[i]].push(v);
    }

    let hidden: Vec<bool> = (0..variables.len()).map(|_| rng.chance(1, 2)).collect();
    let mut equations_out = Vec::new();
    for (e, vars) in eq_vars.into_iter().enumerate() {
        let parity = vars.iter().fold(false, |p, &v| p ^ hidden[v as usize]);
        equations_out.push(LinearEquation {
            name: format!("e{}", e),
            variables: vars,
            parity,
        });
    }
    if !consistent && !equations_out.is_empty() {
        let k = rng.below(equations_out.len() as u64) as usize;
        equations_out[k].parity = !equations_out[k].parity;
    }
    LinearSystemZ2 {
        variables,
        equations: equations_out,
    }
}

/// Parameters of the random hypergraph-instance family used to exercise the
/// reduction: small source structures with distinct variables per hyperedge.
#[derive(Clone, Debug)]
pub struct RandomHyperParams {
    pub elements: u32,
    pub domain: u32,
    pub edges: u32,
    pub max_arity: u32,
    pub max_list: u32,
}

pub fn random_hyper_instance(seed: u64, p: &RandomHyperParams) -> HyperInstance {
    let mut rng = Rng::new(seed);
    let arity_cap = p.max_arity.clamp(1, p.elements.max(1)) as usize;
    let mut source_blocks = Vec::new();
    let mut lists = Vec::new();
    for _ in 0..p.edges {
        let arity = 1 + rng.below(arity_cap as u64) as usize;
        let mut vars: Vec<u32> = (0..p.elements).collect();
        rng.shuffle(&mut vars);
        vars.truncate(arity);
        let total = (p.domain as u64).pow(arity as u32);
        let want = 1 + rng.below(p.max_list.max(1) as u64) as usize;
        let mut tuples = alloc::collections::BTreeSet::new();
        for _ in 0..want * 3 {
            if tuples.len() >= want {
                break;
            }
            let mut code = rng.below(total);
            let mut t = vec![0u32; arity];
            for slot in t.iter_mut().rev() {
                *slot = (code % p.domain as u64) as u32;
                code /= p.domain as u64;
            }
            tuples.insert(t);
        }
        source_blocks.push(Block {
            arity,
            tuples: vec![vars],
        });
        lists.push(tuples.into_iter().collect::<Vec<_>>());
    }
    let source = Hypergraph::new(p.elements as usize, source_blocks).expect("source");
    let target_blocks: Vec<Block> = lists
        .iter()
        .map(|l: &Vec<Vec<u32>>| Block {
            arity: l.first().map(|t| t.len()).unwrap_or(1),
            tuples: l.clone(),
        })
        .collect();
    let target = Hypergraph::new(p.domain as usize, target_blocks).expect("target");
    HyperInstance::new(source, target, lists).expect("hyper instance")
}

/// The hand-built instance admitting a Maltsev list polymorphism while the
/// target admits no majority polymorphism. Vertex key, input: x y z w;
/// target: 1 2 a b c d e f i j as ids 0..=9.
pub fn example_maltsev_no_majority() -> Instance {
    let g = Digraph::new(4, vec![(0, 1), (1, 2), (1, 3)]).unwrap();
    // 1=0 2=1 a=2 b=3 c=4 d=5 e=6 f=7 i=8 j=9
    let h = Digraph::new(
        10,
        vec![
            (0, 2),
            (0, 5),
            (1, 3),
            (1, 4),
            (2, 8),
            (3, 9),
            (4, 8),
            (5, 9),
            (2, 6),
            (3, 6),
            (4, 7),
            (5, 7),
        ],
    )
    .unwrap();
    let l = ListAssignment::new(vec![vec![0, 1], vec![2, 3, 4, 5], vec![8, 9], vec![6, 7]]);
    Instance::new(g, h, l).unwrap()
}

/// The hand-built instance whose pair lists satisfy the rectangle closure
/// while no Maltsev list polymorphism exists. Target ids:
/// 1 2 a b c d g e f i j as 0..=10.
pub fn example_rectangle_no_maltsev() -> Instance {
    let g = Digraph::new(4, vec![(0, 1), (1, 2), (1, 3)]).unwrap();
    let h = Digraph::new(
        11,
        vec![
            (0, 2),
            (0, 5),
            (0, 6),
            (1, 3),
            (1, 4),
            (2, 10),
            (3, 10),
            (4, 9),
            (5, 9),
            (6, 10),
            (2, 7),
            (3, 7),
            (4, 8),
            (5, 7),
            (6, 8),
        ],
    )
    .unwrap();
    let l = ListAssignment::new(vec![
        vec![0, 1],
        vec![2, 3, 4, 5, 6],
        vec![9, 10],
        vec![7, 8],
    ]);
    Instance::new(g, h, l).unwrap()
}
