//! Shared helpers for the integration suites.
#![allow(dead_code)]

use lhom_core::generators::{random_instance, RandomMode, RandomParams};
use lhom_core::graph::{Digraph, Instance, ListAssignment};

pub fn instance(
    gn: u32,
    ga: &[(u32, u32)],
    hn: u32,
    ha: &[(u32, u32)],
    lists: &[&[u32]],
) -> Instance {
    let g = Digraph::new(gn, ga.to_vec()).unwrap();
    let h = Digraph::new(hn, ha.to_vec()).unwrap();
    let l = ListAssignment::new(lists.iter().map(|l| l.to_vec()).collect());
    Instance::new(g, h, l).unwrap()
}

/// The seeded random family used across suites: inputs up to 6 vertices,
/// targets up to 8.
pub fn seeded_instance(seed: u64) -> Instance {
    let params = RandomParams {
        g_vertices: 2 + (seed % 5) as u32,
        h_vertices: 2 + (seed % 7) as u32,
        g_arcs: 1 + (seed % 9) as u32,
        h_arcs: 1 + (seed % 13) as u32,
        max_list: 1 + (seed % 4) as u32,
    };
    random_instance(seed, &RandomMode::Unconstrained(params))
}

/// A wider mix that also covers single-vertex graphs and self-loops.
pub fn seeded_instance_wide(seed: u64) -> Instance {
    let params = RandomParams {
        g_vertices: 1 + (seed % 6) as u32,
        h_vertices: 1 + (seed % 8) as u32,
        g_arcs: (seed % 11) as u32,
        h_arcs: (seed % 15) as u32,
        max_list: 1 + (seed % 5) as u32,
    };
    random_instance(seed ^ 0x5eed_0000, &RandomMode::Unconstrained(params))
}

/// Pins one vertex list, keeping everything else.
pub fn with_pin(inst: &Instance, x: u32, value: u32) -> Instance {
    let mut lists = inst.l.lists().to_vec();
    lists[x as usize] = vec![value];
    Instance::new(inst.g.clone(), inst.h.clone(), ListAssignment::new(lists)).unwrap()
}
