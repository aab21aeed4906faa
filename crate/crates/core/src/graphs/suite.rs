//! Property checks over a whole degeneration family `∂⁺Γ_{0,k,l}`.

use std::collections::BTreeSet;

use rustc_hash::{FxHashMap, FxHashSet};

use super::graph::{Label, StableGraph};
use super::strata::{base, legality, AtomSet, Family, MaskVertex, TreeKey};

/// Outcome of one property over a family.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Tally {
    pub checked: usize,
    pub failed: usize,
    /// the first few failures
    pub examples: Vec<String>,
}

impl Tally {
    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 5 {
                self.examples.push(what());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct FamilyReport {
    pub k: u32,
    pub l: u32,
    /// number of strata with `c` edges, `c = 0, 1, …`
    pub by_codim: Vec<usize>,
    pub odd_parity: Tally,
    pub unique_legality: Tally,
    pub base_dimension: Tally,
    pub base_boundary: Tally,
    pub smoothing: Tally,
    pub stabilization: Tally,
    /// bases through the public type agree with the mask computation
    pub representations: Tally,
}

impl FamilyReport {
    pub fn tallies(&self) -> [(&'static str, &Tally); 7] {
        [
            ("odd legal-edge-plus-label count", &self.odd_parity),
            ("unique legality per boundary edge", &self.unique_legality),
            ("base dimension drop and integrality", &self.base_dimension),
            ("B∂⁺ = B∂⁺B", &self.base_boundary),
            ("smoothing round-trip", &self.smoothing),
            ("stabilization order independence", &self.stabilization),
            ("public and mask bases agree", &self.representations),
        ]
    }

    pub fn passed(&self) -> bool {
        self.tallies().iter().all(|(_, t)| t.passed())
    }
}

/// How much of the family the slower checks through the public graph type
/// visit: every `public_stride`-th stratum (0 skips them).
#[derive(Debug, Clone, Copy)]
pub struct SuiteOptions {
    pub public_stride: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions { public_stride: 1 }
    }
}

impl SuiteOptions {
    /// Every stratum, except every 16th in families above 100000 strata.
    pub fn for_family(k: u32, l: u32) -> Self {
        let big = k + 2 * l >= 9 && l == 0;
        SuiteOptions {
            public_stride: if big { 16 } else { 1 },
        }
    }

    fn visits(&self, i: usize) -> bool {
        self.public_stride != 0 && i.is_multiple_of(self.public_stride)
    }
}

fn family_labels(k: u32, l: u32) -> Vec<Label> {
    (1..=k as i64)
        .map(Label::boundary)
        .chain((1..=l as i64).map(Label::interior))
        .collect()
}

/// Flat, order-independent encoding of an edgeless mask graph.
pub fn encode(vs: &[MaskVertex]) -> Vec<u64> {
    let mut vs = vs.to_vec();
    vs.sort();
    let mut out = Vec::new();
    for v in vs {
        out.push(v.open as u64 | (v.boundary.len() as u64) << 1 | (v.interior.len() as u64) << 16);
        out.extend(&v.boundary);
        out.extend(&v.interior);
    }
    out
}

pub fn decode(flat: &[u64]) -> Vec<MaskVertex> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < flat.len() {
        let h = flat[i];
        let nb = (h >> 1 & 0x7fff) as usize;
        let ni = (h >> 16) as usize;
        i += 1;
        out.push(MaskVertex {
            open: h & 1 == 1,
            boundary: flat[i..i + nb].to_vec(),
            interior: flat[i + nb..i + nb + ni].to_vec(),
        });
        i += nb + ni;
    }
    out
}

/// Parity, legality and base-dimension checks on every stratum.
fn local_checks(family: &Family, k: u32, l: u32, report: &mut FamilyReport) {
    let atoms = family.atoms;
    let full = atoms.full();
    let top_real = (k + 2 * l) as i64 - 3;
    for t in family.iter() {
        let far = t.far_masks(full);
        let mut legal_count = vec![0usize; t.verts.len()];
        for e in 0..t.edges.len() {
            if !t.is_boundary_edge(e) {
                continue;
            }
            let (l0, l1) = legality(&far, &atoms, e);
            let (a, b) = t.edges[e];
            legal_count[a as usize] += l0 as usize;
            legal_count[b as usize] += l1 as usize;
            report
                .unique_legality
                .record(l0 != l1, || format!("{:?}: edge {} legal for {} endpoints", t, e, l0 as u8 + l1 as u8));
        }
        for (v, vert) in t.verts.iter().enumerate() {
            if !vert.open {
                continue;
            }
            let n = (vert.atoms & atoms.boundary).count_ones() as usize + legal_count[v];
            report
                .odd_parity
                .record(n % 2 == 1, || format!("{:?}: vertex {} has |lB ∪ E_legal| = {}", t, v, n));
        }
        if t.edges.is_empty() {
            continue;
        }
        let b = base(t, &atoms);
        let real: i64 = b
            .iter()
            .map(|v| {
                let (nb, ni) = (v.boundary.len() as i64, v.interior.len() as i64);
                if v.open {
                    nb + 2 * ni - 3
                } else {
                    2 * (ni - 3)
                }
            })
            .sum();
        report.base_dimension.record(real % 2 == 0 && real <= top_real - 2, || {
            format!("{:?}: base real dimension {} against {}", t, real, top_real)
        });
    }
}

/// Contracting any single edge of a stratum lands on a stratum one level
/// down, so every stratum smooths back to the single vertex.
fn smoothing_checks(family: &Family, report: &mut FamilyReport) {
    let full = family.atoms.full();
    let mut lower: FxHashMap<TreeKey, u32> = FxHashMap::default();
    for t in &family.levels[0] {
        lower.insert(t.key(full), 0);
    }
    let mut buf: TreeKey = Vec::new();
    for level in family.levels.iter().skip(1) {
        let mut this: FxHashMap<TreeKey, u32> = FxHashMap::default();
        for (i, t) in level.iter().enumerate() {
            let key = t.key(full);
            let entries = t.edge_entries(full);
            for e in 0..t.edges.len() {
                // contraction keeps every other entry
                buf.clear();
                buf.extend(key.iter().copied());
                let pos = buf.iter().position(|&x| x == entries[e]).unwrap();
                buf.remove(pos);
                let found = lower.contains_key(buf.as_slice());
                report
                    .smoothing
                    .record(found, || format!("{:?}: contracting edge {} leaves the family", t, e));
            }
            this.insert(key, i as u32);
        }
        lower = this;
    }
}

/// Decoded strata are valid, smooth back to `Γ_{0,k,l}`, and have the same
/// base through the public type as through masks.
fn public_checks(family: &Family, k: u32, l: u32, options: SuiteOptions, report: &mut FamilyReport) {
    let atoms = family.atoms;
    let labels = family_labels(k, l);
    let disk = StableGraph::disk(k, l).canonical();
    for (_, t) in family.iter().enumerate().filter(|(i, _)| options.visits(*i)) {
        let g = t.to_graph(&labels, &atoms);
        let all: Vec<usize> = (0..g.edges.len()).collect();
        let ok = g.is_valid() && g.smooth(&all).map(|s| s.canonical() == disk).unwrap_or(false);
        report.smoothing.record(ok, || format!("{}does not smooth to the disk", g));
        let via_masks = mask_graph_to_public(&base(t, &atoms), &labels, &atoms);
        let ok = g.base().map(|b| b.canonical() == via_masks.canonical()).unwrap_or(false);
        report.representations.record(ok, || format!("{}base differs between representations", g));
    }
}

fn mask_to_label(mask: u64, labels: &[Label]) -> Label {
    let mut items = BTreeSet::new();
    for (i, l) in labels.iter().enumerate() {
        if mask >> i & 1 == 1 {
            items.extend(l.elements().iter().copied());
        }
    }
    Label::new(items).expect("masks are non-empty")
}

pub fn mask_graph_to_public(vs: &[MaskVertex], labels: &[Label], _atoms: &AtomSet) -> StableGraph {
    let verts = vs
        .iter()
        .map(|v| {
            let b = v.boundary.iter().map(|&m| mask_to_label(m, labels));
            let i = v.interior.iter().map(|&m| mask_to_label(m, labels));
            if v.open {
                super::graph::Vertex::open(b, i)
            } else {
                super::graph::Vertex::closed(i)
            }
        })
        .collect();
    StableGraph::new(verts, Vec::new())
}

/// Flat encoding of the abstract vertices `η(v) = (kind, k(v), ℓ_I(v))`
/// of an edgeless mask graph: boundary labels are kept only as a count.
pub fn encode_abstract(vs: &[MaskVertex]) -> Vec<u64> {
    let mut parts: Vec<Vec<u64>> = vs.iter().map(abstract_vertex).collect();
    parts.sort();
    parts.concat()
}

/// `𝓑∂⁺Γ = 𝓑∂⁺𝓑Γ` for every stratum `Γ` of the family, bases compared
/// through their abstract vertices.
///
/// `𝓑∂⁺Γ` is collected bottom-up along the one-step degeneration links.
/// Strata with equal bases must have equal `𝓑∂⁺`; for each distinct base
/// the set is matched against the product of the `𝓑∂⁺` of its vertices.
fn base_boundary_checks(family: &Family, report: &mut FamilyReport) {
    let atoms = family.atoms;
    let mut abstract_ids: FxHashMap<Vec<u64>, u32> = FxHashMap::default();
    let mut base_ids: FxHashMap<Vec<u64>, u32> = FxHashMap::default();
    let mut base_table: Vec<Vec<u64>> = Vec::new();
    // (full base id, abstract base id) per stratum
    let ids: Vec<Vec<(u32, u32)>> = family
        .levels
        .iter()
        .map(|level| {
            level
                .iter()
                .map(|t| {
                    let b = base(t, &atoms);
                    let code = encode(&b);
                    let n = base_ids.len() as u32;
                    let full = *base_ids.entry(code.clone()).or_insert_with(|| {
                        base_table.push(code);
                        n
                    });
                    let n = abstract_ids.len() as u32;
                    let abs = *abstract_ids.entry(encode_abstract(&b)).or_insert(n);
                    (full, abs)
                })
                .collect()
        })
        .collect();
    let mut representative: FxHashMap<u32, Vec<u32>> = FxHashMap::default();
    let mut upper: Vec<Vec<u32>> = Vec::new();
    for c in (0..family.levels.len()).rev() {
        let mut sets: Vec<Vec<u32>> = ids[c].iter().map(|&(_, a)| vec![a]).collect();
        if c + 1 < family.levels.len() {
            for &(child, parent) in &family.links[c] {
                let (child, parent) = (child as usize, parent as usize);
                sets[parent].extend_from_slice(&upper[child]);
            }
        }
        for (i, s) in sets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            let b = ids[c][i].0;
            match representative.get(&b) {
                Some(r) => report.base_boundary.record(r == s, || {
                    format!("{:?}: strata with the same base have different B∂⁺", family.levels[c][i])
                }),
                None => {
                    representative.insert(b, s.clone());
                }
            }
        }
        upper = sets;
    }
    drop(upper);
    let mut shapes: FxHashMap<(bool, usize, usize), Vec<Vec<MaskVertex>>> = FxHashMap::default();
    let mut memo = VertexMemo::default();
    let mut reps: Vec<(u32, Vec<u32>)> = representative.into_iter().collect();
    reps.sort_unstable();
    for (b, set) in reps {
        let vertices = decode(&base_table[b as usize]);
        let ok = match product_set(&vertices, &mut shapes, &mut memo) {
            Some(product) => {
                let mut expected: Vec<u32> = Vec::with_capacity(product.len());
                let mut all_known = true;
                for code in product {
                    match abstract_ids.get(&code) {
                        Some(&id) => expected.push(id),
                        None => all_known = false,
                    }
                }
                expected.sort_unstable();
                expected.dedup();
                all_known && expected == set
            }
            None => false,
        };
        report
            .base_boundary
            .record(ok, || format!("base {:?}: B∂⁺ is not B∂⁺ of the base", vertices));
    }
}

/// Bases of all degenerations of one vertex of the given shape, labels as
/// masks over the vertex's own labels (boundary ones first).
fn local_bases(
    shapes: &mut FxHashMap<(bool, usize, usize), Vec<Vec<MaskVertex>>>,
    open: bool,
    nb: usize,
    ni: usize,
) -> &Vec<Vec<MaskVertex>> {
    shapes.entry((open, nb, ni)).or_insert_with(|| {
        let atoms = AtomSet::new(nb as u32, ni as u32);
        let family = Family::generate(open, atoms);
        // substitution is injective on disjoint labels, so deduplicating on
        // the abstract form first loses nothing
        let mut seen = FxHashSet::default();
        family
            .iter()
            .map(|t| base(t, &atoms))
            .filter(|b| seen.insert(encode_abstract(b)))
            .collect()
    })
}

/// One abstract vertex, flattened: header, then sorted interior masks.
fn abstract_vertex(v: &MaskVertex) -> Vec<u64> {
    let mut i = v.interior.clone();
    i.sort_unstable();
    let mut out = vec![v.open as u64 | (v.boundary.len() as u64) << 1 | (i.len() as u64) << 16];
    out.extend(i);
    out
}

type VertexMemo = FxHashMap<MaskVertex, Vec<Vec<Vec<u64>>>>;

/// Abstract encodings of `𝓑∂⁺` of an edgeless mask graph, as the product
/// over its vertices; `None` if some open vertex has even `k`.
fn product_set(
    b: &[MaskVertex],
    shapes: &mut FxHashMap<(bool, usize, usize), Vec<Vec<MaskVertex>>>,
    memo: &mut VertexMemo,
) -> Option<Vec<Vec<u64>>> {
    let mut factors: Vec<&Vec<Vec<Vec<u64>>>> = Vec::with_capacity(b.len());
    for v in b {
        if v.open && v.boundary.len() % 2 == 0 {
            return None;
        }
        if !memo.contains_key(v) {
            let images: Vec<u64> = v.boundary.iter().chain(v.interior.iter()).copied().collect();
            let local: Vec<Vec<Vec<u64>>> = local_bases(shapes, v.open, v.boundary.len(), v.interior.len())
                .iter()
                .map(|lb| lb.iter().map(|x| abstract_vertex(&x.substitute(&images))).collect())
                .collect();
            memo.insert(v.clone(), local);
        }
    }
    for v in b {
        factors.push(&memo[v]);
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; factors.len()];
    loop {
        let mut parts: Vec<&Vec<u64>> = Vec::new();
        for (f, &c) in factors.iter().zip(&choice) {
            parts.extend(f[c].iter());
        }
        parts.sort();
        out.push(parts.into_iter().flatten().copied().collect());
        let mut i = 0;
        loop {
            if i == choice.len() {
                return Some(out);
            }
            choice[i] += 1;
            if choice[i] < factors[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// For every stratum and interior label: forgetting it gives one result
/// under every stabilization order.
fn stabilization_checks(family: &Family, k: u32, l: u32, options: SuiteOptions, report: &mut FamilyReport) {
    let labels = family_labels(k, l);
    for (_, t) in family.iter().enumerate().filter(|(i, _)| options.visits(*i)) {
        let g = t.to_graph(&labels, &family.atoms);
        for i in 1..=l as i64 {
            let label = Label::interior(i);
            if (k + 2 * (l - 1)) < 3 {
                continue;
            }
            let ok = match g.forget_interior_all_orders(&label) {
                Ok(results) => results.len() == 1,
                Err(_) => false,
            };
            report
                .stabilization
                .record(ok, || format!("{}forgetting {} depends on the order", g, label));
        }
    }
}

/// Runs every property over `∂⁺Γ_{0,k,l}`.
pub fn check_family(k: u32, l: u32, options: SuiteOptions) -> FamilyReport {
    let mut report = FamilyReport {
        k,
        l,
        ..Default::default()
    };
    if k + 2 * l < 3 {
        return report;
    }
    let family = Family::generate(true, AtomSet::new(k, l));
    report.by_codim = family.levels.iter().map(|x| x.len()).collect();
    local_checks(&family, k, l, &mut report);
    smoothing_checks(&family, &mut report);
    public_checks(&family, k, l, options, &mut report);
    base_boundary_checks(&family, &mut report);
    stabilization_checks(&family, k, l, options, &mut report);
    report
}
