//! On-disk formats: JSON-shaped instance and hypergraph documents plus the
//! line-oriented map and table formats.
//!
//! Serialization is canonical: compact JSON, struct keys in sorted order,
//! sorted arc and list contents, one trailing newline. Identical data always
//! produces identical bytes.

use std::fmt;

use serde::{Deserialize, Serialize};

use lhom_core::graph::{Digraph, Instance, ListAssignment};
use lhom_core::reductions::{Block, HyperInstance, Hypergraph, TernaryTable};

#[derive(Debug)]
pub enum FormatError {
    Json(serde_json::Error),
    Graph(lhom_core::graph::GraphError),
    Hypergraph(lhom_core::reductions::HypergraphError),
    Malformed(String),
}

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FormatError::Json(e) => write!(f, "{e}"),
            FormatError::Graph(e) => write!(f, "{e}"),
            FormatError::Hypergraph(e) => write!(f, "{e}"),
            FormatError::Malformed(m) => write!(f, "{m}"),
        }
    }
}

impl From<serde_json::Error> for FormatError {
    fn from(e: serde_json::Error) -> Self {
        FormatError::Json(e)
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct DigraphFile {
    pub arcs: Vec<(u32, u32)>,
    pub n: u32,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct NamesFile {
    pub g: Vec<String>,
    pub h: Vec<String>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct InstanceFile {
    pub g: DigraphFile,
    pub h: DigraphFile,
    pub lists: Vec<Vec<u32>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<NamesFile>,
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance, names: Option<NamesFile>) -> InstanceFile {
        InstanceFile {
            g: DigraphFile {
                arcs: inst.g.arcs().to_vec(),
                n: inst.g.n(),
            },
            h: DigraphFile {
                arcs: inst.h.arcs().to_vec(),
                n: inst.h.n(),
            },
            lists: inst.l.lists().to_vec(),
            names,
        }
    }

    pub fn into_instance(self) -> Result<(Instance, Option<NamesFile>), FormatError> {
        let g = Digraph::new(self.g.n, self.g.arcs).map_err(FormatError::Graph)?;
        let h = Digraph::new(self.h.n, self.h.arcs).map_err(FormatError::Graph)?;
        let inst =
            Instance::new(g, h, ListAssignment::new(self.lists)).map_err(FormatError::Graph)?;
        if let Some(n) = &self.names {
            if n.g.len() != inst.g.n() as usize || n.h.len() != inst.h.n() as usize {
                return Err(FormatError::Malformed(
                    "name tables do not match vertex counts".into(),
                ));
            }
        }
        Ok((inst, self.names))
    }
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct BlockFile {
    pub arity: u32,
    pub tuples: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct HypergraphFile {
    pub blocks: Vec<BlockFile>,
    pub domain: u32,
}

impl HypergraphFile {
    pub fn from_hypergraph(hg: &Hypergraph) -> HypergraphFile {
        HypergraphFile {
            blocks: hg
                .blocks()
                .iter()
                .map(|b| BlockFile {
                    arity: b.arity as u32,
                    tuples: b.tuples.clone(),
                })
                .collect(),
            domain: hg.domain() as u32,
        }
    }

    pub fn into_hypergraph(self) -> Result<Hypergraph, FormatError> {
        Hypergraph::new(
            self.domain as usize,
            self.blocks
                .into_iter()
                .map(|b| Block {
                    arity: b.arity as usize,
                    tuples: b.tuples,
                })
                .collect(),
        )
        .map_err(FormatError::Hypergraph)
    }
}

/// A hypergraph document extended with the source structure and per-edge
/// lists; `blocks` and `domain` describe the target.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct HyperInstanceFile {
    pub blocks: Vec<BlockFile>,
    pub domain: u32,
    pub lists: Vec<Vec<Vec<u32>>>,
    pub source: HypergraphFile,
}

impl HyperInstanceFile {
    pub fn from_hyper_instance(hi: &HyperInstance) -> HyperInstanceFile {
        let target = HypergraphFile::from_hypergraph(&hi.target);
        HyperInstanceFile {
            blocks: target.blocks,
            domain: target.domain,
            lists: hi.lists.clone(),
            source: HypergraphFile::from_hypergraph(&hi.source),
        }
    }

    pub fn into_hyper_instance(self) -> Result<HyperInstance, FormatError> {
        let target = HypergraphFile {
            blocks: self.blocks,
            domain: self.domain,
        }
        .into_hypergraph()?;
        HyperInstance::new(self.source.into_hypergraph()?, target, self.lists)
            .map_err(FormatError::Hypergraph)
    }
}

/// Canonical document bytes: compact JSON plus a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("serializable");
    s.push('\n');
    s
}

pub fn parse_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

/// One `x -> a` line per input vertex, name-resolved when names are present.
pub fn map_lines(map: &[u32], names: Option<&NamesFile>) -> String {
    let mut out = String::new();
    for (x, &a) in map.iter().enumerate() {
        match names {
            Some(n) => {
                out.push_str(&format!("{} -> {}\n", n.g[x], n.h[a as usize]));
            }
            None => out.push_str(&format!("{} -> {}\n", x, a)),
        }
    }
    out
}

/// Parses map lines back into a vertex map, accepting both names and ids and
/// ignoring a leading `HOM` line.
pub fn parse_map_lines(
    text: &str,
    n_g: u32,
    names: Option<&NamesFile>,
) -> Result<Vec<u32>, FormatError> {
    let mut map = vec![u32::MAX; n_g as usize];
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line == "HOM" {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| FormatError::Malformed(format!("bad map line: {line}")))?;
        let lhs = lhs.trim();
        let rhs = rhs.trim();
        let x = resolve(lhs, names.map(|n| n.g.as_slice()))
            .ok_or_else(|| FormatError::Malformed(format!("unknown input vertex: {lhs}")))?;
        let a = resolve(rhs, names.map(|n| n.h.as_slice()))
            .ok_or_else(|| FormatError::Malformed(format!("unknown target vertex: {rhs}")))?;
        if x as usize >= map.len() {
            return Err(FormatError::Malformed(format!("vertex {x} out of range")));
        }
        map[x as usize] = a;
    }
    if map.contains(&u32::MAX) {
        return Err(FormatError::Malformed("map is not total".into()));
    }
    Ok(map)
}

fn resolve(token: &str, names: Option<&[String]>) -> Option<u32> {
    if let Some(names) = names {
        if let Some(i) = names.iter().position(|n| n == token) {
            return Some(i as u32);
        }
    }
    token.parse().ok()
}

/// One `a b c -> d` line per triple, ascending.
pub fn table_lines(t: &TernaryTable) -> String {
    let d = t.domain() as u32;
    let mut out = String::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                out.push_str(&format!("{a} {b} {c} -> {}\n", t.get(a, b, c).unwrap()));
            }
        }
    }
    out
}

pub fn parse_table_lines(text: &str, domain: usize) -> Result<TernaryTable, FormatError> {
    let mut t = TernaryTable::new(domain);
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| FormatError::Malformed(format!("bad table line: {line}")))?;
        let args: Vec<u32> = lhs
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| FormatError::Malformed(format!("bad arg: {s}"))))
            .collect::<Result<_, _>>()?;
        if args.len() != 3 {
            return Err(FormatError::Malformed(format!("need three arguments: {line}")));
        }
        let v: u32 = rhs
            .trim()
            .parse()
            .map_err(|_| FormatError::Malformed(format!("bad value: {rhs}")))?;
        if args.iter().chain([&v]).any(|&x| x as usize >= domain) {
            return Err(FormatError::Malformed(format!("entry out of domain: {line}")));
        }
        t.record(args[0], args[1], args[2], v)
            .map_err(|prev| FormatError::Malformed(format!("conflicting entries {prev} vs {v}")))?;
    }
    if !t.is_total() {
        return Err(FormatError::Malformed("table is not total".into()));
    }
    Ok(t)
}

/// Serialized conjecture-harness outcome.
#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
pub struct CounterexampleFile {
    pub failure: FailureFile,
    pub instance: InstanceFile,
    pub trace: Vec<TraceStepFile>,
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TraceStepFile {
    CollapseDiagonal { triple: [u32; 3], x: u32 },
    Choice { chosen: u32, triple: [u32; 3], x: u32 },
}

#[derive(Serialize, Deserialize, Clone, PartialEq, Eq, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureFile {
    EmptyDistinguisher { triple: [u32; 3], x: u32 },
    VerificationFailed { reason: String },
}

impl From<&lhom_core::conjecture::TraceStep> for TraceStepFile {
    fn from(s: &lhom_core::conjecture::TraceStep) -> Self {
        use lhom_core::conjecture::TraceStep as T;
        match s {
            T::CollapseDiagonal { x, triple } => TraceStepFile::CollapseDiagonal {
                triple: *triple,
                x: *x,
            },
            T::Choice { x, triple, chosen } => TraceStepFile::Choice {
                chosen: *chosen,
                triple: *triple,
                x: *x,
            },
        }
    }
}

impl From<&lhom_core::conjecture::FailureKind> for FailureFile {
    fn from(f: &lhom_core::conjecture::FailureKind) -> Self {
        use lhom_core::conjecture::FailureKind as F;
        match f {
            F::EmptyDistinguisher { x, triple } => FailureFile::EmptyDistinguisher {
                triple: *triple,
                x: *x,
            },
            F::VerificationFailed { reason } => FailureFile::VerificationFailed {
                reason: reason.clone(),
            },
        }
    }
}

impl CounterexampleFile {
    pub fn from_report(r: &lhom_core::conjecture::CounterexampleReport) -> CounterexampleFile {
        CounterexampleFile {
            failure: (&r.failure).into(),
            instance: InstanceFile::from_instance(&r.instance, None),
            trace: r.trace.iter().map(Into::into).collect(),
        }
    }
}
