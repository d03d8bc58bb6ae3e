//! Arc and pair consistency to fixpoint, component splitting, twin removal.
//!
//! Pair lists are kept for every unordered vertex pair of the input digraph
//! under the canonical orientation `x < y`. The diagonal is implicit: `(a, b)`
//! belongs to the pair list of `(x, x)` exactly when `a == b` and `a` is live.
//! Pair consistency quantifies the witness vertex over all of the input, also
//! across weak components.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::bitset::{iter_bits, slices_intersect, words_for, Bitset};
use crate::graph::{Digraph, Instance, ListAssignment};

/// Some unary list became empty during fixpoint computation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Infeasible {
    pub vertex: u32,
}

impl fmt::Display for Infeasible {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "list of vertex {} became empty", self.vertex)
    }
}

#[derive(Clone, Debug)]
struct PairTable {
    /// Words per forward row.
    sa: u32,
    /// Words per reverse row.
    sb: u32,
    cnt: u32,
    fwd: Vec<u64>,
    rev: Vec<u64>,
}

impl PairTable {
    fn new_empty(la: usize, lb: usize) -> PairTable {
        let sa = words_for(lb).max(1);
        let sb = words_for(la).max(1);
        PairTable {
            sa: sa as u32,
            sb: sb as u32,
            cnt: 0,
            fwd: vec![0; la * sa],
            rev: vec![0; lb * sb],
        }
    }

    #[inline]
    fn row_fwd(&self, a: usize) -> &[u64] {
        let s = self.sa as usize;
        &self.fwd[a * s..(a + 1) * s]
    }

    #[inline]
    fn row_rev(&self, b: usize) -> &[u64] {
        let s = self.sb as usize;
        &self.rev[b * s..(b + 1) * s]
    }

    #[inline]
    fn test(&self, a: usize, b: usize) -> bool {
        self.fwd[a * self.sa as usize + b / 64] >> (b % 64) & 1 != 0
    }

    #[inline]
    fn set(&mut self, a: usize, b: usize) {
        let w = &mut self.fwd[a * self.sa as usize + b / 64];
        if *w >> (b % 64) & 1 == 0 {
            *w |= 1 << (b % 64);
            self.rev[b * self.sb as usize + a / 64] |= 1 << (a % 64);
            self.cnt += 1;
        }
    }

    #[inline]
    fn unset(&mut self, a: usize, b: usize) {
        let w = &mut self.fwd[a * self.sa as usize + b / 64];
        if *w >> (b % 64) & 1 != 0 {
            *w &= !(1u64 << (b % 64));
            self.rev[b * self.sb as usize + a / 64] &= !(1u64 << (a % 64));
            self.cnt -= 1;
        }
    }

    fn row_fwd_is_empty(&self, a: usize) -> bool {
        self.row_fwd(a).iter().all(|&w| w == 0)
    }

    fn row_rev_is_empty(&self, b: usize) -> bool {
        self.row_rev(b).iter().all(|&w| w == 0)
    }

    /// Clears forward row `a`, fixing up the reverse bits. Returns the number
    /// of entries removed.
    fn clear_row_fwd(&mut self, a: usize) -> u32 {
        let bits: Vec<usize> = iter_bits(self.row_fwd(a)).collect();
        for &b in &bits {
            self.unset(a, b);
        }
        bits.len() as u32
    }

    fn clear_row_rev(&mut self, b: usize) -> u32 {
        let bits: Vec<usize> = iter_bits(self.row_rev(b)).collect();
        for &a in &bits {
            self.unset(a, b);
        }
        bits.len() as u32
    }
}

/// The `(2,3)`-consistent pair-list state of one instance: per-vertex live
/// lists plus one table per unordered vertex pair, all indexed by positions
/// into the immutable base lists captured at construction.
#[derive(Clone, Debug)]
pub struct PairLists {
    n: u32,
    base: Vec<Vec<u32>>,
    live: Vec<Bitset>,
    live_count: Vec<u32>,
    tables: Vec<PairTable>,
    pair_offset: Vec<usize>,
    collapsed: bool,
}

impl PairLists {
    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    fn pair_index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < y);
        self.pair_offset[x as usize] + (y - x - 1) as usize
    }

    fn pair_vertices(&self, p: usize) -> (u32, u32) {
        // Inverse of pair_index via the offset table.
        let x = match self.pair_offset.binary_search(&p) {
            Ok(i) => {
                // Offsets repeat once suffix vertices run out of partners.
                let mut i = i;
                while i + 1 < self.pair_offset.len() && self.pair_offset[i + 1] == p {
                    i += 1;
                }
                i
            }
            Err(i) => i - 1,
        };
        let y = x + 1 + (p - self.pair_offset[x]);
        (x as u32, y as u32)
    }

    /// Base list of a vertex (the instance list this state was built from).
    pub fn base_list(&self, x: u32) -> &[u32] {
        &self.base[x as usize]
    }

    fn pos(&self, x: u32, id: u32) -> Option<usize> {
        self.base[x as usize].binary_search(&id).ok()
    }

    pub fn live_len(&self, x: u32) -> usize {
        self.live_count[x as usize] as usize
    }

    pub fn is_live(&self, x: u32, id: u32) -> bool {
        match self.pos(x, id) {
            Some(p) => self.live[x as usize].test(p),
            None => false,
        }
    }

    /// Current list of `x` as target ids, ascending.
    pub fn list(&self, x: u32) -> Vec<u32> {
        let base = &self.base[x as usize];
        self.live[x as usize].iter().map(|p| base[p]).collect()
    }

    pub fn lists(&self) -> Vec<Vec<u32>> {
        (0..self.n).map(|x| self.list(x)).collect()
    }

    pub fn sum_live(&self) -> usize {
        self.live_count.iter().map(|&c| c as usize).sum()
    }

    pub fn has_empty_list(&self) -> bool {
        self.collapsed || self.live_count.contains(&0)
    }

    /// True when a pinned fixpoint cascaded to the all-empty state: the pin
    /// admits no pair-consistent extension at all.
    pub fn is_collapsed(&self) -> bool {
        self.collapsed
    }

    /// Membership in the pair list of `(x, y)`; the diagonal is implicit.
    pub fn has_pair(&self, x: u32, a: u32, y: u32, b: u32) -> bool {
        if x == y {
            return a == b && self.is_live(x, a);
        }
        let (u, v, s, t) = if x < y { (x, y, a, b) } else { (y, x, b, a) };
        let (Some(sp), Some(tp)) = (self.pos(u, s), self.pos(v, t)) else {
            return false;
        };
        self.tables[self.pair_index(u, v)].test(sp, tp)
    }

    /// Pair list of `(x, y)` as ordered id pairs `(a in L(x), b in L(y))`.
    pub fn pair_entries(&self, x: u32, y: u32) -> Vec<(u32, u32)> {
        assert!(x != y, "diagonal pair lists are implicit");
        let mut out = Vec::new();
        let (u, v) = if x < y { (x, y) } else { (y, x) };
        let t = &self.tables[self.pair_index(u, v)];
        let bu = &self.base[u as usize];
        let bv = &self.base[v as usize];
        for ap in 0..bu.len() {
            for bp in iter_bits(t.row_fwd(ap)) {
                if x < y {
                    out.push((bu[ap], bv[bp]));
                } else {
                    out.push((bv[bp], bu[ap]));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// The restriction row: all `d` with `(a, d)` in the pair list of `(x, y)`.
    /// For `y == x` this is `{a}` when `a` is live.
    pub fn restriction_row(&self, x: u32, a: u32, y: u32) -> Vec<u32> {
        if x == y {
            return if self.is_live(x, a) { vec![a] } else { Vec::new() };
        }
        let Some(ap) = self.pos(x, a) else { return Vec::new() };
        let basey = &self.base[y as usize];
        if x < y {
            let t = &self.tables[self.pair_index(x, y)];
            iter_bits(t.row_fwd(ap)).map(|p| basey[p]).collect()
        } else {
            let t = &self.tables[self.pair_index(y, x)];
            iter_bits(t.row_rev(ap)).map(|p| basey[p]).collect()
        }
    }

    /// Whether the `a`-row minus the `b`-row of the pair list `(x, y)` is
    /// non-empty (word-level, no allocation). Requires `y != x`.
    pub(crate) fn row_diff_nonempty(&self, x: u32, a: u32, b: u32, y: u32) -> bool {
        debug_assert!(x != y);
        let Some(ap) = self.pos(x, a) else { return false };
        let ra = self.side_row(x, y, ap);
        match self.pos(x, b) {
            Some(bp) => {
                let rb = self.side_row(x, y, bp);
                ra.iter().zip(rb.iter()).any(|(wa, wb)| wa & !wb != 0)
            }
            None => ra.iter().any(|&w| w != 0),
        }
    }

    /// Raw row words over `base(y)` positions for a value given by id.
    /// Empty slice when the value is not in the base list.
    pub(crate) fn row_words(&self, x: u32, a: u32, y: u32) -> &[u64] {
        debug_assert!(x != y);
        match self.pos(x, a) {
            Some(ap) => self.side_row(x, y, ap),
            None => &[],
        }
    }

    /// Raw words of `{c at z : (value apos of u, c) in pair (u, z)}`.
    #[inline]
    fn side_row(&self, u: u32, z: u32, upos: usize) -> &[u64] {
        if u < z {
            self.tables[self.pair_index(u, z)].row_fwd(upos)
        } else {
            self.tables[self.pair_index(z, u)].row_rev(upos)
        }
    }

    #[inline]
    fn leg_full(&self, u: u32, z: u32) -> bool {
        let t = if u < z {
            &self.tables[self.pair_index(u, z)]
        } else {
            &self.tables[self.pair_index(z, u)]
        };
        t.cnt == self.live_count[u as usize] * self.live_count[z as usize]
    }

    fn collapse(&mut self) {
        self.collapsed = true;
        for x in 0..self.n as usize {
            self.live[x].clear_all();
            self.live_count[x] = 0;
        }
        for t in &mut self.tables {
            t.cnt = 0;
            for w in &mut t.fwd {
                *w = 0;
            }
            for w in &mut t.rev {
                *w = 0;
            }
        }
    }

    fn delete_value(
        &mut self,
        x: u32,
        apos: usize,
        bail: bool,
        queue: &mut Worklist,
    ) -> Result<(), Infeasible> {
        if self.collapsed || !self.live[x as usize].test(apos) {
            return Ok(());
        }
        self.live[x as usize].clear(apos);
        self.live_count[x as usize] -= 1;
        if self.live_count[x as usize] == 0 {
            if bail {
                return Err(Infeasible { vertex: x });
            }
            self.collapse();
            return Ok(());
        }
        for v in 0..self.n {
            if v == x {
                continue;
            }
            let removed = if x < v {
                let p = self.pair_index(x, v);
                self.tables[p].clear_row_fwd(apos)
            } else {
                let p = self.pair_index(v, x);
                self.tables[p].clear_row_rev(apos)
            };
            let _ = removed;
        }
        // A unary deletion shrinks every leg incident to x, so any pair may
        // have lost a witness through x.
        queue.push_all();
        Ok(())
    }

    /// Drops the failing entries of pair `p` checked against witness vertex
    /// `z`. Returns whether anything was removed.
    fn revise(&mut self, p: usize, z: u32) -> bool {
        let (x, y) = self.pair_vertices(p);
        debug_assert!(z != x && z != y);
        if self.tables[p].cnt == 0 {
            return false;
        }
        let full_xz = self.leg_full(x, z);
        let full_yz = self.leg_full(y, z);
        if full_xz && full_yz {
            return false;
        }
        let mut deletions: Vec<(usize, usize)> = Vec::new();
        {
            let t = &self.tables[p];
            let live_z = self.live[z as usize].words();
            for apos in self.live[x as usize].iter() {
                let row = t.row_fwd(apos);
                if row.iter().all(|&w| w == 0) {
                    continue;
                }
                let xa: &[u64] = if full_xz { live_z } else { self.side_row(x, z, apos) };
                let xa_empty = xa.iter().all(|&w| w == 0);
                for bpos in iter_bits(row) {
                    if xa_empty {
                        deletions.push((apos, bpos));
                        continue;
                    }
                    let yb: &[u64] = if full_yz { live_z } else { self.side_row(y, z, bpos) };
                    if !slices_intersect(xa, yb) {
                        deletions.push((apos, bpos));
                    }
                }
            }
        }
        if deletions.is_empty() {
            return false;
        }
        let t = &mut self.tables[p];
        for &(a, b) in &deletions {
            t.unset(a, b);
        }
        true
    }

    fn propagate(&mut self, queue: &mut Worklist, bail: bool) -> Result<(), Infeasible> {
        while let Some(p) = queue.pop() {
            if self.collapsed {
                break;
            }
            let (x, y) = self.pair_vertices(p);
            let mut changed = false;
            for z in 0..self.n {
                if z == x || z == y {
                    continue;
                }
                if self.revise(p, z) {
                    changed = true;
                }
            }
            // Projection: values with an empty row in this table are dead.
            let dead_x: Vec<usize> = self.live[x as usize]
                .iter()
                .filter(|&a| self.tables[p].row_fwd_is_empty(a))
                .collect();
            let dead_y: Vec<usize> = self.live[y as usize]
                .iter()
                .filter(|&b| self.tables[p].row_rev_is_empty(b))
                .collect();
            for a in dead_x {
                changed = true;
                self.delete_value(x, a, bail, queue)?;
            }
            if self.collapsed {
                break;
            }
            for b in dead_y {
                changed = true;
                self.delete_value(y, b, bail, queue)?;
            }
            if self.collapsed {
                break;
            }
            if changed {
                // Entries elsewhere may have used a removed entry (or value)
                // of this pair as their witness.
                queue.push_incident(self, x);
                queue.push_incident(self, y);
            }
        }
        Ok(())
    }

    /// Pins `x` to `a` and recomputes the pair fixpoint. Lists are allowed to
    /// empty; an unsatisfiable pin collapses every list and pair list.
    pub fn restrict_pin(&self, x: u32, a: u32) -> PairLists {
        let mut out = self.clone();
        let mut queue = Worklist::new(out.tables.len());
        if out.collapsed {
            return out;
        }
        match out.pos(x, a) {
            Some(apos) if out.live[x as usize].test(apos) => {
                let others: Vec<usize> = out.live[x as usize].iter().filter(|&p| p != apos).collect();
                for p in others {
                    out.delete_value(x, p, false, &mut queue).expect("no bail");
                }
                out.propagate(&mut queue, false).expect("no bail");
            }
            _ => out.collapse(),
        }
        out
    }

    /// Removes one value from a live list and restores the fixpoint,
    /// reporting infeasibility eagerly.
    pub fn remove_value(&mut self, x: u32, a: u32) -> Result<(), Infeasible> {
        let apos = match self.pos(x, a) {
            Some(p) if self.live[x as usize].test(p) => p,
            _ => return Ok(()),
        };
        let mut queue = Worklist::new(self.tables.len());
        self.delete_value(x, apos, true, &mut queue)?;
        self.propagate(&mut queue, true)
    }

    /// Re-checks the whole state; used after external edits in tests.
    pub fn refixpoint(&mut self) -> Result<(), Infeasible> {
        let mut queue = Worklist::new(self.tables.len());
        queue.push_all();
        self.propagate(&mut queue, true)
    }
}

/// FIFO worklist of pair indices with membership dedup.
struct Worklist {
    queue: VecDeque<u32>,
    in_queue: Bitset,
    push_all_pending: bool,
    len: usize,
}

impl Worklist {
    fn new(pairs: usize) -> Worklist {
        Worklist {
            queue: VecDeque::new(),
            in_queue: Bitset::empty(pairs),
            push_all_pending: false,
            len: pairs,
        }
    }

    fn push(&mut self, p: usize) {
        if !self.in_queue.test(p) {
            self.in_queue.set(p);
            self.queue.push_back(p as u32);
        }
    }

    fn push_all(&mut self) {
        self.push_all_pending = true;
    }

    fn push_incident(&mut self, pl: &PairLists, v: u32) {
        for u in 0..pl.n {
            if u == v {
                continue;
            }
            let p = if u < v { pl.pair_index(u, v) } else { pl.pair_index(v, u) };
            self.push(p);
        }
    }

    fn pop(&mut self) -> Option<usize> {
        if self.push_all_pending {
            self.push_all_pending = false;
            for p in 0..self.len {
                self.push(p);
            }
        }
        let p = self.queue.pop_front()? as usize;
        self.in_queue.clear(p);
        Some(p)
    }
}

/// Computes the greatest arc- and pair-consistent fixpoint of an instance.
/// Returns eagerly with `Infeasible` when some unary list empties.
pub fn preprocess(inst: &Instance) -> Result<PairLists, Infeasible> {
    let n = inst.g.n();
    let base: Vec<Vec<u32>> = inst.l.lists().to_vec();
    let h_adj = inst.h.arc_matrix();

    let mut live = Vec::with_capacity(n as usize);
    let mut live_count = Vec::with_capacity(n as usize);
    for x in 0..n {
        let lx = &base[x as usize];
        let mut m = Bitset::full(lx.len());
        if inst.g.has_arc(x, x) {
            for (p, &a) in lx.iter().enumerate() {
                if !h_adj.has(a, a) {
                    m.clear(p);
                }
            }
        }
        let c = m.count() as u32;
        if c == 0 {
            return Err(Infeasible { vertex: x });
        }
        live.push(m);
        live_count.push(c);
    }

    let mut pair_offset = Vec::with_capacity(n as usize + 1);
    let mut acc = 0usize;
    for x in 0..n as usize {
        pair_offset.push(acc);
        acc += n as usize - 1 - x;
    }
    pair_offset.push(acc);

    let mut tables = Vec::with_capacity(acc);
    for x in 0..n {
        for y in x + 1..n {
            let bx = &base[x as usize];
            let by = &base[y as usize];
            let need_xy = inst.g.has_arc(x, y);
            let need_yx = inst.g.has_arc(y, x);
            let mut t = PairTable::new_empty(bx.len(), by.len());
            for ap in live[x as usize].iter() {
                let a = bx[ap];
                for bp in live[y as usize].iter() {
                    let b = by[bp];
                    if (!need_xy || h_adj.has(a, b)) && (!need_yx || h_adj.has(b, a)) {
                        t.set(ap, bp);
                    }
                }
            }
            tables.push(t);
        }
    }

    let mut pl = PairLists {
        n,
        base,
        live,
        live_count,
        tables,
        pair_offset,
        collapsed: false,
    };
    let mut queue = Worklist::new(pl.tables.len());
    queue.push_all();
    pl.propagate(&mut queue, true)?;
    Ok(pl)
}

/// Builds the sub-instance induced by `vertices` (ascending original ids) with
/// the given lists, reindexing arcs to the dense sub-ids.
pub fn induced_instance(inst: &Instance, vertices: &[u32], lists: Vec<Vec<u32>>) -> Instance {
    debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
    let index_of = |v: u32| vertices.binary_search(&v).ok();
    let mut arcs = Vec::new();
    for &(u, v) in inst.g.arcs() {
        if let (Some(iu), Some(iv)) = (index_of(u), index_of(v)) {
            arcs.push((iu as u32, iv as u32));
        }
    }
    let g = Digraph::new(vertices.len() as u32, arcs).expect("induced arcs in range");
    Instance::new(g, inst.h.clone(), ListAssignment::new(lists)).expect("induced instance")
}

/// One weakly connected component of the product graph, as a standalone
/// sub-instance over the original vertex ids it touches.
#[derive(Clone, Debug)]
pub struct SubInstance {
    pub vertices: Vec<u32>,
    pub instance: Instance,
}

#[derive(Clone, Debug)]
pub struct ComponentSplit {
    pub components: Vec<SubInstance>,
    /// Components whose own fixpoint emptied a list; counted, not returned.
    pub discarded: usize,
}

fn product_labels(inst: &Instance, pl: &PairLists) -> (Vec<(u32, u32)>, Vec<usize>, usize) {
    let mut verts: Vec<(u32, u32)> = Vec::new();
    for x in 0..inst.g.n() {
        for a in pl.list(x) {
            verts.push((x, a));
        }
    }
    let m = verts.len();
    let idx_of = |x: u32, a: u32| verts.binary_search(&(x, a)).ok();
    let mut comp_id = vec![usize::MAX; m];
    let mut n_comps = 0usize;
    for s in 0..m {
        if comp_id[s] != usize::MAX {
            continue;
        }
        let id = n_comps;
        n_comps += 1;
        let mut stack = vec![s];
        comp_id[s] = id;
        while let Some(i) = stack.pop() {
            let (x, a) = verts[i];
            let mut push_nbr = |y: u32, b: u32| {
                if let Some(j) = idx_of(y, b) {
                    if comp_id[j] == usize::MAX {
                        comp_id[j] = id;
                        stack.push(j);
                    }
                }
            };
            for &y in inst.g.out_neighbors(x) {
                for b in pl.list(y) {
                    if inst.h.has_arc(a, b) {
                        push_nbr(y, b);
                    }
                }
            }
            for &y in inst.g.in_neighbors(x) {
                for b in pl.list(y) {
                    if inst.h.has_arc(b, a) {
                        push_nbr(y, b);
                    }
                }
            }
        }
    }
    (verts, comp_id, n_comps)
}

/// Whether the surviving product pairs form a single weakly connected
/// component (in which case splitting would reproduce the instance).
pub(crate) fn product_is_connected(inst: &Instance, pl: &PairLists) -> bool {
    let (_, _, n_comps) = product_labels(inst, pl);
    n_comps <= 1
}

/// Splits the surviving `(x, a)` pairs into weakly connected components of
/// the product graph and re-runs the fixpoint on each. Components are ordered
/// by their smallest product vertex.
pub fn components(inst: &Instance, pl: &PairLists) -> ComponentSplit {
    let (verts, comp_id, n_comps) = product_labels(inst, pl);
    let mut components_out = Vec::new();
    let mut discarded = 0usize;
    for id in 0..n_comps {
        let members: Vec<(u32, u32)> = verts
            .iter()
            .enumerate()
            .filter(|&(i, _)| comp_id[i] == id)
            .map(|(_, &v)| v)
            .collect();
        let mut vertices: Vec<u32> = members.iter().map(|&(x, _)| x).collect();
        vertices.sort_unstable();
        vertices.dedup();
        let lists: Vec<Vec<u32>> = vertices
            .iter()
            .map(|&x| members.iter().filter(|&&(y, _)| y == x).map(|&(_, a)| a).collect())
            .collect();
        let sub = induced_instance(inst, &vertices, lists);
        match preprocess(&sub) {
            Ok(_) => components_out.push(SubInstance { vertices, instance: sub }),
            Err(_) => discarded += 1,
        }
    }
    ComponentSplit {
        components: components_out,
        discarded,
    }
}

/// Removes list twins: values of one list with identical in-neighborhoods in
/// every in-neighbor list and identical out-neighborhoods in every
/// out-neighbor list. The smaller id is kept.
pub fn remove_twins(inst: &Instance, pl: &PairLists) -> Instance {
    let h_adj = inst.h.arc_matrix();
    let mut lists = pl.lists();
    for x in 0..inst.g.n() {
        'rescan: loop {
            let lx = &lists[x as usize];
            for i in 0..lx.len() {
                for j in i + 1..lx.len() {
                    if twins(inst, &lists, &h_adj, x, lx[i], lx[j]) {
                        let b = lx[j];
                        lists[x as usize].retain(|&v| v != b);
                        continue 'rescan;
                    }
                }
            }
            break;
        }
    }
    Instance::new(inst.g.clone(), inst.h.clone(), ListAssignment::new(lists))
        .expect("twin removal keeps lists valid")
}

pub(crate) fn twins(
    inst: &Instance,
    lists: &[Vec<u32>],
    h_adj: &crate::graph::ArcMatrix,
    x: u32,
    a: u32,
    b: u32,
) -> bool {
    for &y in inst.g.in_neighbors(x) {
        for &c in &lists[y as usize] {
            if h_adj.has(c, a) != h_adj.has(c, b) {
                return false;
            }
        }
    }
    for &y in inst.g.out_neighbors(x) {
        for &c in &lists[y as usize] {
            if h_adj.has(a, c) != h_adj.has(b, c) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Homomorphism;

    fn inst(gn: u32, ga: &[(u32, u32)], hn: u32, ha: &[(u32, u32)], lists: &[&[u32]]) -> Instance {
        let g = Digraph::new(gn, ga.to_vec()).unwrap();
        let h = Digraph::new(hn, ha.to_vec()).unwrap();
        let l = ListAssignment::new(lists.iter().map(|l| l.to_vec()).collect());
        Instance::new(g, h, l).unwrap()
    }

    #[test]
    fn arc_consistency_prunes() {
        // G: x -> y; H: a -> b; L(x) = {a, b}, L(y) = {b}.
        let i = inst(2, &[(0, 1)], 2, &[(0, 1)], &[&[0, 1], &[1]]);
        let pl = preprocess(&i).unwrap();
        assert_eq!(pl.list(0), vec![0]);
        assert_eq!(pl.list(1), vec![1]);
        assert_eq!(pl.pair_entries(0, 1), vec![(0, 1)]);
    }

    #[test]
    fn singleton_fixpoint_is_identity() {
        let i = inst(2, &[(0, 1)], 2, &[(0, 1)], &[&[0], &[1]]);
        let pl = preprocess(&i).unwrap();
        assert_eq!(pl.lists(), vec![vec![0], vec![1]]);
    }

    #[test]
    fn three_cycle_to_two_cycle_is_infeasible() {
        // Directed 3-cycle into directed 2-cycle, full lists.
        let i = inst(
            3,
            &[(0, 1), (1, 2), (2, 0)],
            2,
            &[(0, 1), (1, 0)],
            &[&[0, 1], &[0, 1], &[0, 1]],
        );
        assert!(preprocess(&i).is_err());
    }

    #[test]
    fn preprocess_is_idempotent() {
        let i = inst(
            3,
            &[(0, 1), (1, 2)],
            3,
            &[(0, 1), (1, 2), (0, 2)],
            &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]],
        );
        let pl = preprocess(&i).unwrap();
        let again = Instance::new(
            i.g.clone(),
            i.h.clone(),
            ListAssignment::new(pl.lists()),
        )
        .unwrap();
        let pl2 = preprocess(&again).unwrap();
        assert_eq!(pl.lists(), pl2.lists());
        for x in 0..3u32 {
            for y in x + 1..3 {
                assert_eq!(pl.pair_entries(x, y), pl2.pair_entries(x, y));
            }
        }
    }

    #[test]
    fn self_loop_pruning() {
        // G has a loop at 0; only looped target values survive.
        let i = inst(1, &[(0, 0)], 3, &[(0, 0), (1, 2)], &[&[0, 1, 2]]);
        let pl = preprocess(&i).unwrap();
        assert_eq!(pl.list(0), vec![0]);
    }

    #[test]
    fn components_split_disjoint_targets() {
        // G: x -> y; H: a -> b and c -> d disjoint; full lists.
        let i = inst(
            2,
            &[(0, 1)],
            4,
            &[(0, 1), (2, 3)],
            &[&[0, 2], &[1, 3]],
        );
        let pl = preprocess(&i).unwrap();
        let split = components(&i, &pl);
        assert_eq!(split.components.len(), 2);
        assert_eq!(split.discarded, 0);
        assert_eq!(split.components[0].vertices, vec![0, 1]);
        assert_eq!(split.components[0].instance.l.list(0), &[0]);
        assert_eq!(split.components[0].instance.l.list(1), &[1]);
        assert_eq!(split.components[1].instance.l.list(0), &[2]);
        assert_eq!(split.components[1].instance.l.list(1), &[3]);
    }

    #[test]
    fn connected_product_is_single_component() {
        let i = inst(2, &[(0, 1)], 2, &[(0, 1)], &[&[0], &[1]]);
        let pl = preprocess(&i).unwrap();
        let split = components(&i, &pl);
        assert_eq!(split.components.len(), 1);
        assert_eq!(split.components[0].instance.l.lists(), i.l.lists());
    }

    #[test]
    fn twins_are_removed_smallest_kept() {
        // H values 1 and 2 behave identically toward L(y) = {0}.
        let i = inst(2, &[(0, 1)], 3, &[(1, 0), (2, 0)], &[&[1, 2], &[0]]);
        let pl = preprocess(&i).unwrap();
        let reduced = remove_twins(&i, &pl);
        assert_eq!(reduced.l.list(0), &[1]);
        assert_eq!(reduced.l.list(1), &[0]);
    }

    #[test]
    fn no_twins_is_identity() {
        let i = inst(2, &[(0, 1)], 3, &[(1, 0), (2, 0), (2, 2)], &[&[1, 2], &[0, 2]]);
        let pl = preprocess(&i).unwrap();
        let reduced = remove_twins(&i, &pl);
        assert_eq!(reduced.l.list(0), pl.list(0).as_slice());
    }

    #[test]
    fn restrict_pin_keeps_only_compatible_rows() {
        let i = inst(2, &[(0, 1)], 3, &[(0, 1), (0, 2), (1, 2)], &[&[0, 1], &[1, 2]]);
        let pl = preprocess(&i).unwrap();
        let pinned = pl.restrict_pin(0, 0);
        assert_eq!(pinned.restriction_row(0, 0, 1), vec![1, 2]);
        let pinned_b = pl.restrict_pin(0, 1);
        assert_eq!(pinned_b.restriction_row(0, 1, 1), vec![2]);
    }

    #[test]
    fn sound_for_witnessed_homomorphism() {
        // Pair lists never drop a pair realized by an actual homomorphism.
        let i = inst(
            3,
            &[(0, 1), (1, 2), (0, 2)],
            3,
            &[(0, 1), (1, 2), (0, 2)],
            &[&[0, 1, 2], &[0, 1, 2], &[0, 1, 2]],
        );
        let pl = preprocess(&i).unwrap();
        let f = Homomorphism::new(vec![0, 1, 2]);
        assert!(crate::graph::verify_homomorphism(&i, &f));
        for x in 0..3u32 {
            assert!(pl.is_live(x, f.image(x)));
            for y in x + 1..3 {
                assert!(pl.has_pair(x, f.image(x), y, f.image(y)));
            }
        }
    }
}
