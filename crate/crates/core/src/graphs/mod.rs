//! Stable graphs of the moduli of stable disks with boundary and interior
//! markings.

mod graph;
pub mod strata;
pub mod suite;

use std::collections::BTreeMap;

pub use graph::{BaseLabel, Flag, Label, Legality, StableGraph, Vertex, VertexKind};
use strata::{AtomSet, Family};

use crate::error::Result;

/// `∂Γ_{0,k,l}` (or only the strata with `codim` edges), in canonical form,
/// sorted by serialization.
pub fn enumerate_boundary(k: u32, l: u32, codim: Option<usize>) -> Vec<StableGraph> {
    let atoms = AtomSet::new(k, l);
    if k + 2 * l < 3 {
        return Vec::new();
    }
    let family = Family::generate(true, atoms);
    let labels: Vec<Label> = (1..=k as i64)
        .map(Label::boundary)
        .chain((1..=l as i64).map(Label::interior))
        .collect();
    let mut out = BTreeMap::new();
    for (c, level) in family.levels.iter().enumerate().skip(1) {
        if codim.is_some_and(|x| x != c) {
            continue;
        }
        for t in level {
            let g = t.to_graph(&labels, &atoms).canonical();
            out.insert(g.to_json(), g);
        }
    }
    out.into_values().collect()
}

pub fn has_boundary_edge(g: &StableGraph) -> bool {
    (0..g.edges.len()).any(|e| g.is_boundary_edge(e))
}

enum Item {
    Label(Label),
    Edge(usize),
}

/// `∂⁺Γ = {Γ} ∪ ∂Γ`: every graph whose smoothing along some edge set is
/// `Γ`, in canonical form.
pub fn degenerations(g: &StableGraph) -> Result<Vec<StableGraph>> {
    g.check()?;
    // per vertex: its atoms are its own labels, then its edges
    let mut per_vertex: Vec<(Vec<StableGraph>, Vec<usize>)> = Vec::new();
    for v in 0..g.vertices.len() {
        let vert = &g.vertices[v];
        let mut b_items: Vec<Item> = vert.boundary.iter().cloned().map(Item::Label).collect();
        let mut i_items: Vec<Item> = vert.interior.iter().cloned().map(Item::Label).collect();
        for (e, _) in g.incident(v) {
            if g.is_boundary_edge(e) {
                b_items.push(Item::Edge(e));
            } else {
                i_items.push(Item::Edge(e));
            }
        }
        let atoms = AtomSet::new(b_items.len() as u32, i_items.len() as u32);
        let items: Vec<Item> = b_items.into_iter().chain(i_items).collect();
        // stand-in labels for the edge atoms, far from any real label
        let stand_in = |e: usize| Label::interior(i64::MIN + e as i64);
        let labels: Vec<Label> = items
            .iter()
            .map(|x| match x {
                Item::Label(l) => l.clone(),
                Item::Edge(e) => stand_in(*e),
            })
            .collect();
        let family = Family::generate(vert.is_open(), atoms);
        let graphs: Vec<StableGraph> = family.iter().map(|t| t.to_graph(&labels, &atoms)).collect();
        let edges: Vec<usize> = items
            .iter()
            .filter_map(|x| match x {
                Item::Edge(e) => Some(*e),
                Item::Label(_) => None,
            }).collect();
        per_vertex.push((graphs, edges));
    }
    let mut out = BTreeMap::new();
    let mut choice = vec![0usize; per_vertex.len()];
    loop {
        let mut verts = Vec::new();
        let mut edges = Vec::new();
        let mut holder: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, (graphs, edge_atoms)) in per_vertex.iter().enumerate() {
            let piece = &graphs[choice[v]];
            let offset = verts.len();
            for pv in &piece.vertices {
                let mut pv = pv.clone();
                for &e in edge_atoms {
                    let l = Label::interior(i64::MIN + e as i64);
                    let in_b = pv.boundary.remove(&l);
                    let in_i = pv.interior.remove(&l);
                    if in_b || in_i {
                        holder.entry(e).or_default().push(verts.len());
                    }
                }
                verts.push(pv);
            }
            edges.extend(piece.edges.iter().map(|&(a, b)| (a + offset, b + offset)));
        }
        for ends in holder.values() {
            edges.push((ends[0], ends[1]));
        }
        let h = StableGraph::new(verts, edges).canonical();
        out.insert(h.to_json(), h);
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Ok(out.into_values().collect());
            }
            choice[i] += 1;
            if choice[i] < per_vertex[i].0.len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}
