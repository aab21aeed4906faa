//! Bitmask representation of the degenerations of a single vertex.
//!
//! The labels of the vertex being degenerated are numbered as atoms
//! `0..n`; every label of a degeneration, and every flag image, is then a
//! bitmask of atoms. A tree is identified by its set of edge splits, so
//! deduplication needs no graph isomorphism.

use rustc_hash::FxHashMap;

use super::graph::{Label, StableGraph, Vertex};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CVert {
    pub open: bool,
    pub atoms: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CTree {
    pub verts: Vec<CVert>,
    pub edges: Vec<(u8, u8)>,
}

/// Atoms of a degeneration family: `boundary` has bit `i` set when atom `i`
/// is a boundary label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AtomSet {
    pub count: u32,
    pub boundary: u64,
}

impl AtomSet {
    pub fn new(boundary_atoms: u32, interior_atoms: u32) -> Self {
        AtomSet {
            count: boundary_atoms + interior_atoms,
            boundary: (1u64 << boundary_atoms) - 1,
        }
    }

    pub fn full(&self) -> u64 {
        if self.count == 64 {
            u64::MAX
        } else {
            (1u64 << self.count) - 1
        }
    }

    pub fn interior(&self) -> u64 {
        self.full() & !self.boundary
    }
}

pub type TreeKey = Vec<u128>;

/// Per-edge data of a rooted tree.
struct Rooted {
    /// atoms on the child side of each edge
    below: Vec<u64>,
    /// whether `edges[e].1` is the child endpoint
    second_is_child: Vec<bool>,
}

impl CTree {
    pub fn single(open: bool, atoms: u64) -> Self {
        CTree {
            verts: vec![CVert { open, atoms }],
            edges: Vec::new(),
        }
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        self.verts[a as usize].open && self.verts[b as usize].open
    }

    fn rooted(&self, root: usize) -> Rooted {
        let n = self.verts.len();
        let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (e, &(a, b)) in self.edges.iter().enumerate() {
            adj[a as usize].push((e, b as usize));
            adj[b as usize].push((e, a as usize));
        }
        let mut order = Vec::with_capacity(n);
        let mut parent_edge = vec![usize::MAX; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        order.push(root);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            i += 1;
            for &(e, w) in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = e;
                    order.push(w);
                }
            }
        }
        let mut sub: Vec<u64> = self.verts.iter().map(|v| v.atoms).collect();
        let mut below = vec![0u64; self.edges.len()];
        let mut second_is_child = vec![false; self.edges.len()];
        for &v in order.iter().rev() {
            let e = parent_edge[v];
            if e == usize::MAX {
                continue;
            }
            below[e] = sub[v];
            second_is_child[e] = self.edges[e].1 as usize == v;
            let (a, b) = self.edges[e];
            let p = if a as usize == v { b } else { a } as usize;
            sub[p] |= sub[v];
        }
        Rooted { below, second_is_child }
    }

    /// Atoms on the far side of edge `e` as seen from its endpoint `v`.
    pub fn far_masks(&self, full: u64) -> Vec<(u64, u64)> {
        // (far side seen from edges[e].0, far side seen from edges[e].1)
        let r = self.rooted(0);
        (0..self.edges.len())
            .map(|e| {
                if r.second_is_child[e] {
                    (r.below[e], full ^ r.below[e])
                } else {
                    (full ^ r.below[e], r.below[e])
                }
            })
            .collect()
    }

    /// One entry per edge: the atom mask of one side shifted left, with
    /// the low bit set for boundary edges. Boundary edges, and all edges of
    /// trees without open vertices, use the side missing the lowest atom.
    /// Otherwise an interior edge uses its closed side, the one without
    /// open vertices.
    pub fn edge_entries(&self, full: u64) -> Vec<u128> {
        let reference = full & full.wrapping_neg();
        let norm = |m: u64| if m & reference != 0 { full ^ m } else { m };
        let root = self.verts.iter().position(|v| v.open);
        // rooted at an open vertex, the child side of an interior edge is closed
        let r = self.rooted(root.unwrap_or(0));
        (0..self.edges.len())
            .map(|e| {
                let below = r.below[e];
                if self.is_boundary_edge(e) {
                    ((norm(below) as u128) << 1) | 1
                } else if root.is_some() {
                    (below as u128) << 1
                } else {
                    (norm(below) as u128) << 1
                }
            })
            .collect()
    }

    /// Canonical identity of the tree within its family.
    pub fn key(&self, full: u64) -> TreeKey {
        let mut key = self.edge_entries(full);
        key.sort_unstable();
        key
    }

    pub fn to_graph(&self, labels: &[Label], atoms: &AtomSet) -> StableGraph {
        let verts = self
            .verts
            .iter()
            .map(|v| {
                let mut out = if v.open { Vertex::open([], []) } else { Vertex::closed([]) };
                for i in 0..atoms.count {
                    if v.atoms >> i & 1 == 1 {
                        if atoms.boundary >> i & 1 == 1 {
                            out.boundary.insert(labels[i as usize].clone());
                        } else {
                            out.interior.insert(labels[i as usize].clone());
                        }
                    }
                }
                out
            })
            .collect();
        let edges = self.edges.iter().map(|&(a, b)| (a as usize, b as usize)).collect();
        StableGraph::new(verts, edges)
    }
}

/// One flag of a vertex: its atom mask, and whether it is a boundary flag.
#[derive(Clone, Copy)]
struct CFlag {
    mask: u64,
    boundary: bool,
    /// `Some(e)` for an edge flag
    edge: Option<usize>,
}

fn vertex_flags(t: &CTree, v: usize, far: &[(u64, u64)], atoms: &AtomSet) -> Vec<CFlag> {
    let mut flags = Vec::new();
    let own = t.verts[v].atoms;
    for i in 0..atoms.count {
        if own >> i & 1 == 1 {
            flags.push(CFlag {
                mask: 1 << i,
                boundary: atoms.boundary >> i & 1 == 1,
                edge: None,
            });
        }
    }
    for (e, &(a, b)) in t.edges.iter().enumerate() {
        let mask = if a as usize == v {
            far[e].0
        } else if b as usize == v {
            far[e].1
        } else {
            continue;
        };
        flags.push(CFlag {
            mask,
            boundary: t.is_boundary_edge(e),
            edge: Some(e),
        });
    }
    flags
}

fn open_ok(k: usize, l: usize) -> bool {
    k + 2 * l >= 3
}

/// A way of splitting vertex `v`: the flags in `moved` go to a new vertex
/// joined to `v`; `side` is the atom mask on the new vertex's side.
#[derive(Clone, Copy)]
struct Split {
    v: usize,
    moved: u64,
    keep_open: bool,
    new_open: bool,
    side: u64,
}

fn for_each_split<F: FnMut(&[CFlag], Split)>(t: &CTree, far: &[(u64, u64)], atoms: &AtomSet, mut f: F) {
    for v in 0..t.verts.len() {
        let flags = vertex_flags(t, v, far, atoms);
        let n = flags.len();
        if !(2..=63).contains(&n) {
            continue;
        }
        let all = (1u64 << n) - 1;
        let bflags = flags
            .iter()
            .enumerate()
            .filter(|(_, f)| f.boundary)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        let open = t.verts[v].open;
        // flag 0 always stays
        for q in 1u64..(1u64 << (n - 1)) {
            let moved = q << 1;
            let kq = (moved & bflags).count_ones() as usize;
            let lq = (moved & !bflags).count_ones() as usize;
            let kp = (all & !moved & bflags).count_ones() as usize;
            let lp = (all & !moved & !bflags).count_ones() as usize;
            let mut kinds = [(false, false); 3];
            let mut nk = 0;
            if !open {
                if lp + 1 >= 3 && lq + 1 >= 3 {
                    kinds[nk] = (false, false);
                    nk += 1;
                }
            } else {
                if open_ok(kp + 1, lp) && open_ok(kq + 1, lq) {
                    kinds[nk] = (true, true);
                    nk += 1;
                }
                if kq == 0 && lq + 1 >= 3 && open_ok(kp, lp + 1) {
                    kinds[nk] = (true, false);
                    nk += 1;
                }
                if kp == 0 && lp + 1 >= 3 && open_ok(kq, lq + 1) {
                    kinds[nk] = (false, true);
                    nk += 1;
                }
            }
            if nk == 0 {
                continue;
            }
            let mut side = 0u64;
            let mut rest = moved;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                side |= flags[i].mask;
                rest &= rest - 1;
            }
            for &(keep_open, new_open) in &kinds[..nk] {
                f(
                    &flags,
                    Split {
                        v,
                        moved,
                        keep_open,
                        new_open,
                        side,
                    },
                );
            }
        }
    }
}

fn apply_split(t: &CTree, flags: &[CFlag], s: Split) -> CTree {
    let mut child = t.clone();
    let w = child.verts.len() as u8;
    let mut moved_atoms = 0u64;
    for (i, f) in flags.iter().enumerate() {
        if s.moved >> i & 1 == 0 {
            continue;
        }
        match f.edge {
            None => moved_atoms |= f.mask,
            Some(e) => {
                let (a, b) = child.edges[e];
                child.edges[e] = if a as usize == s.v { (w, b) } else { (a, w) };
            }
        }
    }
    child.verts[s.v].atoms &= !moved_atoms;
    child.verts[s.v].open = s.keep_open;
    child.verts.push(CVert {
        open: s.new_open,
        atoms: moved_atoms,
    });
    child.edges.push((s.v as u8, w));
    child
}

/// Every way of splitting one vertex of `t` into two joined by a new edge.
pub fn splits(t: &CTree, atoms: &AtomSet) -> Vec<CTree> {
    let far = t.far_masks(atoms.full());
    let mut out = Vec::new();
    for_each_split(t, &far, atoms, |flags, s| out.push(apply_split(t, flags, s)));
    out
}

/// All degenerations of one vertex, grouped by number of edges, together
/// with the one-step degeneration links `(child index, parent index)`
/// between consecutive levels.
#[derive(Debug, Clone)]
pub struct Family {
    pub atoms: AtomSet,
    pub open: bool,
    pub levels: Vec<Vec<CTree>>,
    /// `links[c]` relates level `c+1` (first) to level `c` (second)
    pub links: Vec<Vec<(u32, u32)>>,
}

impl Family {
    pub fn generate(open: bool, atoms: AtomSet) -> Self {
        let full = atoms.full();
        let reference = full & full.wrapping_neg();
        let norm = |m: u64| if m & reference != 0 { full ^ m } else { m };
        let mut levels = vec![vec![CTree::single(open, full)]];
        let mut links = Vec::new();
        let mut buf: TreeKey = Vec::new();
        loop {
            let prev = levels.last().unwrap();
            let mut index: FxHashMap<TreeKey, u32> = FxHashMap::default();
            let mut next = Vec::new();
            let mut link = Vec::new();
            for (pi, t) in prev.iter().enumerate() {
                let far = t.far_masks(full);
                let entries = t.key(full);
                for_each_split(t, &far, &atoms, |flags, s| {
                    let mut built = None;
                    let entry = match (s.keep_open, s.new_open) {
                        (true, true) => Some(((norm(s.side) as u128) << 1) | 1),
                        (true, false) => Some((s.side as u128) << 1),
                        (false, true) => Some(((full ^ s.side) as u128) << 1),
                        (false, false) if !open => Some((norm(s.side) as u128) << 1),
                        // which side holds the disks depends on the moved edges
                        (false, false) => None,
                    };
                    match entry {
                        Some(entry) => {
                            buf.clear();
                            buf.extend_from_slice(&entries);
                            let pos = buf.partition_point(|&x| x < entry);
                            buf.insert(pos, entry);
                        }
                        None => {
                            let c = apply_split(t, flags, s);
                            buf = c.key(full);
                            built = Some(c);
                        }
                    }
                    let ci = match index.get(buf.as_slice()) {
                        Some(&i) => i,
                        None => {
                            let c = built.unwrap_or_else(|| apply_split(t, flags, s));
                            next.push(c);
                            let i = (next.len() - 1) as u32;
                            index.insert(buf.clone(), i);
                            i
                        }
                    };
                    link.push((ci, pi as u32));
                });
            }
            if next.is_empty() {
                break;
            }
            link.sort_unstable();
            link.dedup();
            levels.push(next);
            links.push(link);
        }
        Family {
            atoms,
            open,
            levels,
            links,
        }
    }

    pub fn len(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = &CTree> {
        self.levels.iter().flatten()
    }
}

/// A vertex of an edgeless graph whose labels are atom masks.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MaskVertex {
    pub open: bool,
    pub boundary: Vec<u64>,
    pub interior: Vec<u64>,
}

impl MaskVertex {
    fn normalize(mut self) -> Self {
        self.boundary.sort_unstable();
        self.interior.sort_unstable();
        self
    }

    pub fn substitute(&self, images: &[u64]) -> MaskVertex {
        let sub = |m: &u64| {
            let mut out = 0u64;
            for (i, img) in images.iter().enumerate() {
                if m >> i & 1 == 1 {
                    out |= img;
                }
            }
            out
        };
        MaskVertex {
            open: self.open,
            boundary: self.boundary.iter().map(sub).collect(),
            interior: self.interior.iter().map(sub).collect(),
        }
        .normalize()
    }
}

/// Legality of the boundary edge `e` for its first (`.0`) and second (`.1`)
/// endpoint.
pub fn legality(far: &[(u64, u64)], atoms: &AtomSet, e: usize) -> (bool, bool) {
    let full = atoms.full();
    let even = |m: u64| (m & atoms.boundary).count_ones().is_multiple_of(2);
    (even(full ^ far[e].0), even(full ^ far[e].1))
}

/// `𝓑` in mask form: sorted retained vertices.
pub fn base(t: &CTree, atoms: &AtomSet) -> Vec<MaskVertex> {
    let far = t.far_masks(atoms.full());
    let mut out = Vec::new();
    for v in 0..t.verts.len() {
        let vert = t.verts[v];
        let mut mv = MaskVertex {
            open: vert.open,
            boundary: Vec::new(),
            interior: Vec::new(),
        };
        for i in 0..atoms.count {
            if vert.atoms >> i & 1 == 1 {
                if atoms.boundary >> i & 1 == 1 {
                    mv.boundary.push(1 << i);
                } else {
                    mv.interior.push(1 << i);
                }
            }
        }
        for (e, &(a, b)) in t.edges.iter().enumerate() {
            let (first, mask) = if a as usize == v {
                (true, far[e].0)
            } else if b as usize == v {
                (false, far[e].1)
            } else {
                continue;
            };
            if t.is_boundary_edge(e) {
                let (l0, l1) = legality(&far, atoms, e);
                if (first && l0) || (!first && l1) {
                    mv.boundary.push(mask);
                }
            } else {
                mv.interior.push(mask);
            }
        }
        if 2 * mv.interior.len() + mv.boundary.len() >= 3 {
            out.push(mv.normalize());
        }
    }
    out.sort();
    out
}
