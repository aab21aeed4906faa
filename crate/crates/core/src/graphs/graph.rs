use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{frac, ExactRational};

/// An element of `ℤ ∪ ℤ°`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseLabel {
    Interior(i64),
    Boundary(i64),
}

impl fmt::Display for BaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseLabel::Interior(i) => write!(f, "{}", i),
            BaseLabel::Boundary(i) => write!(f, "{}°", i),
        }
    }
}

/// Non-empty finite set of base labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<BaseLabel>", into = "Vec<BaseLabel>")]
pub struct Label(BTreeSet<BaseLabel>);

impl Label {
    pub fn new<I: IntoIterator<Item = BaseLabel>>(items: I) -> Result<Self> {
        let set: BTreeSet<BaseLabel> = items.into_iter().collect();
        if set.is_empty() {
            return Err(Error::InvalidGraph("empty label".into()));
        }
        Ok(Label(set))
    }

    pub fn interior(i: i64) -> Self {
        Label(BTreeSet::from([BaseLabel::Interior(i)]))
    }

    pub fn boundary(i: i64) -> Self {
        Label(BTreeSet::from([BaseLabel::Boundary(i)]))
    }

    pub fn elements(&self) -> &BTreeSet<BaseLabel> {
        &self.0
    }

    pub fn is_disjoint(&self, other: &Label) -> bool {
        self.0.is_disjoint(&other.0)
    }
}

impl TryFrom<Vec<BaseLabel>> for Label {
    type Error = Error;

    fn try_from(v: Vec<BaseLabel>) -> Result<Self> {
        Label::new(v)
    }
}

impl From<Label> for Vec<BaseLabel> {
    fn from(l: Label) -> Self {
        l.0.into_iter().collect()
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.len() == 1 {
            return write!(f, "{}", self.0.iter().next().unwrap());
        }
        let parts: Vec<String> = self.0.iter().map(|b| b.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VertexKind {
    Open,
    Closed,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex {
    pub kind: VertexKind,
    #[serde(rename = "lB", default)]
    pub boundary: BTreeSet<Label>,
    #[serde(rename = "lI", default)]
    pub interior: BTreeSet<Label>,
}

impl Vertex {
    pub fn open<B, I>(boundary: B, interior: I) -> Self
    where
        B: IntoIterator<Item = Label>,
        I: IntoIterator<Item = Label>,
    {
        Vertex {
            kind: VertexKind::Open,
            boundary: boundary.into_iter().collect(),
            interior: interior.into_iter().collect(),
        }
    }

    pub fn closed<I: IntoIterator<Item = Label>>(interior: I) -> Self {
        Vertex {
            kind: VertexKind::Closed,
            boundary: BTreeSet::new(),
            interior: interior.into_iter().collect(),
        }
    }

    pub fn is_open(&self) -> bool {
        self.kind == VertexKind::Open
    }

    /// Boundary labels, then interior labels.
    pub fn labels(&self) -> impl Iterator<Item = &Label> {
        self.boundary.iter().chain(self.interior.iter())
    }
}

/// A half-edge of a vertex: one of its own labels or one of its edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Flag {
    Label(Label),
    Edge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Legality {
    Legal,
    Illegal,
}

/// Open and closed vertices with labels, joined by a forest of edges.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StableGraph {
    pub vertices: Vec<Vertex>,
    #[serde(default)]
    pub edges: Vec<(usize, usize)>,
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.0[ra.max(rb)] = ra.min(rb);
        true
    }
}

impl StableGraph {
    /// Edges are stored as ordered pairs, sorted.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<(usize, usize)>) -> Self {
        let mut edges: Vec<(usize, usize)> = edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect();
        edges.sort_unstable();
        StableGraph { vertices, edges }
    }

    /// `Γ_{0,k,l}`: one open vertex with boundary labels `1°..k°` and
    /// interior labels `1..l`.
    pub fn disk(k: u32, l: u32) -> Self {
        let v = Vertex::open(
            (1..=k as i64).map(Label::boundary),
            (1..=l as i64).map(Label::interior),
        );
        StableGraph::new(vec![v], Vec::new())
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        let (a, b) = self.edges[e];
        self.vertices[a].is_open() && self.vertices[b].is_open()
    }

    /// `(edge index, other endpoint)` for each edge at `v`.
    pub fn incident(&self, v: usize) -> Vec<(usize, usize)> {
        self.edges
            .iter()
            .enumerate()
            .filter_map(|(i, &(a, b))| {
                if a == v {
                    Some((i, b))
                } else if b == v {
                    Some((i, a))
                } else {
                    None
                }
            })
            .collect()
    }

    /// `k(v)`: boundary labels plus boundary edges.
    pub fn k_of(&self, v: usize) -> usize {
        if !self.vertices[v].is_open() {
            return 0;
        }
        self.vertices[v].boundary.len() + self.incident(v).iter().filter(|(e, _)| self.is_boundary_edge(*e)).count()
    }

    /// `l(v)`: interior labels plus interior edges.
    pub fn l_of(&self, v: usize) -> usize {
        self.vertices[v].interior.len() + self.incident(v).iter().filter(|(e, _)| !self.is_boundary_edge(*e)).count()
    }

    pub fn is_vertex_stable(&self, v: usize) -> bool {
        let (k, l) = (self.k_of(v), self.l_of(v));
        match self.vertices[v].kind {
            VertexKind::Open => k + 2 * l >= 3,
            VertexKind::Closed => l >= 3,
        }
    }

    /// Vertex sets of the connected components, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut uf = UnionFind::new(self.vertices.len());
        for &(a, b) in &self.edges {
            if a < self.vertices.len() && b < self.vertices.len() {
                uf.union(a, b);
            }
        }
        let mut by_root: HashMap<usize, Vec<usize>> = HashMap::new();
        for v in 0..self.vertices.len() {
            by_root.entry(uf.find(v)).or_default().push(v);
        }
        let mut comps: Vec<Vec<usize>> = by_root.into_values().collect();
        comps.sort();
        comps
    }

    /// Vertices of `Γ_{e,v}`, the component of `v` once `e` is removed.
    pub fn side(&self, e: usize, v: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertices.len()];
        let mut stack = vec![v];
        seen[v] = true;
        while let Some(x) = stack.pop() {
            for (f, y) in self.incident(x) {
                if f != e && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.vertices.len()).filter(|&x| seen[x]).collect()
    }

    /// `k` of a vertex set: number of boundary labels on it.
    pub fn boundary_count(&self, vs: &[usize]) -> usize {
        vs.iter().map(|&v| self.vertices[v].boundary.len()).sum()
    }

    /// `k(Γ) = |B(Γ)|`.
    pub fn k(&self) -> usize {
        self.vertices.iter().map(|v| v.boundary.len()).sum()
    }

    /// `l(Γ) = |I(Γ)|`.
    pub fn l(&self) -> usize {
        self.vertices.iter().map(|v| v.interior.len()).sum()
    }

    fn base_labels(&self, vs: &[usize]) -> BTreeSet<BaseLabel> {
        let mut out = BTreeSet::new();
        for &v in vs {
            for l in self.vertices[v].labels() {
                out.extend(l.elements().iter().copied());
            }
        }
        out
    }

    /// Empty when the graph satisfies every stable-graph condition;
    /// otherwise one message per violation.
    pub fn validate(&self) -> Vec<String> {
        let mut diags = Vec::new();
        let n = self.vertices.len();
        let mut seen_edges = BTreeSet::new();
        for &(a, b) in &self.edges {
            if a >= n || b >= n {
                diags.push(format!("edge ({},{}) refers to a missing vertex", a, b));
                return diags;
            }
            if a == b {
                diags.push(format!("loop at vertex {}", a));
            }
            if !seen_edges.insert((a.min(b), a.max(b))) {
                diags.push(format!("repeated edge ({},{})", a, b));
            }
        }
        if !diags.is_empty() {
            return diags;
        }
        let mut uf = UnionFind::new(n);
        for &(a, b) in &self.edges {
            if !uf.union(a, b) {
                diags.push("edges contain a cycle".into());
                return diags;
            }
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if !v.is_open() && !v.boundary.is_empty() {
                diags.push(format!("closed vertex {} has boundary labels", i));
            }
        }
        let comps = self.components();
        for comp in &comps {
            let open: Vec<usize> = comp.iter().copied().filter(|&v| self.vertices[v].is_open()).collect();
            let mut ouf = UnionFind::new(n);
            for &(a, b) in &self.edges {
                if self.vertices[a].is_open() && self.vertices[b].is_open() {
                    ouf.union(a, b);
                }
            }
            if let Some(&first) = open.first() {
                if open.iter().any(|&v| ouf.find(v) != ouf.find(first)) {
                    diags.push(format!("open vertices of component {:?} are not connected through open vertices", comp));
                }
            }
        }
        let mut all = BTreeSet::new();
        for v in &self.vertices {
            for l in v.labels() {
                if !all.insert(l.clone()) {
                    diags.push(format!("label {} is used twice", l));
                }
            }
        }
        let comp_labels: Vec<Vec<&Label>> = comps
            .iter()
            .map(|c| c.iter().flat_map(|&v| self.vertices[v].labels()).collect())
            .collect();
        for (ci, labels) in comp_labels.iter().enumerate() {
            for i in 0..labels.len() {
                for j in i + 1..labels.len() {
                    if !labels[i].is_disjoint(labels[j]) {
                        diags.push(format!("labels {} and {} of component {} overlap", labels[i], labels[j], ci));
                    }
                }
            }
        }
        for i in 0..comp_labels.len() {
            for j in i + 1..comp_labels.len() {
                if let Some(x) = shared_union(&comp_labels[i], &comp_labels[j]) {
                    diags.push(format!("components {} and {} have sub-families with the same union {:?}", i, j, x));
                }
            }
        }
        for v in 0..n {
            if !self.is_vertex_stable(v) {
                diags.push(format!("vertex {} is unstable (k={}, l={})", v, self.k_of(v), self.l_of(v)));
            }
        }
        diags
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    pub fn check(&self) -> Result<()> {
        let d = self.validate();
        if d.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(d.join("; ")))
        }
    }

    /// `(dim_ℝ, dim_ℂ)` of the stratum: open vertices contribute
    /// `k(v)+2l(v)-3`, closed ones `2(l(v)-3)`.
    pub fn dims(&self) -> Result<(i64, ExactRational)> {
        self.check()?;
        Ok(self.dims_unchecked())
    }

    pub(crate) fn dims_unchecked(&self) -> (i64, ExactRational) {
        let mut real = 0i64;
        for v in 0..self.vertices.len() {
            let (k, l) = (self.k_of(v) as i64, self.l_of(v) as i64);
            real += match self.vertices[v].kind {
                VertexKind::Open => k + 2 * l - 3,
                VertexKind::Closed => 2 * (l - 3),
            };
        }
        (real, frac(real, 2))
    }

    /// Contracts the edges in `s`; also returns where each old vertex went.
    pub fn smooth_with_map(&self, s: &[usize]) -> Result<(StableGraph, Vec<usize>)> {
        for &e in s {
            if e >= self.edges.len() {
                return Err(Error::MissingEdge(e));
            }
        }
        let mut uf = UnionFind::new(self.vertices.len());
        for &e in s {
            let (a, b) = self.edges[e];
            uf.union(a, b);
        }
        let mut class_of: HashMap<usize, usize> = HashMap::new();
        let mut map = Vec::with_capacity(self.vertices.len());
        let mut verts: Vec<Vertex> = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let r = uf.find(i);
            let idx = *class_of.entry(r).or_insert_with(|| {
                verts.push(Vertex::closed([]));
                verts.len() - 1
            });
            let target = &mut verts[idx];
            if v.is_open() {
                target.kind = VertexKind::Open;
            }
            target.boundary.extend(v.boundary.iter().cloned());
            target.interior.extend(v.interior.iter().cloned());
            map.push(idx);
        }
        let contracted: BTreeSet<usize> = s.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !contracted.contains(i))
            .map(|(_, &(a, b))| (map[a], map[b]))
            .collect();
        let g = StableGraph::new(verts, edges);
        g.check()?;
        Ok((g, map))
    }

    pub fn smooth(&self, s: &[usize]) -> Result<StableGraph> {
        Ok(self.smooth_with_map(s)?.0)
    }

    /// `i_v(x)`: a label of `v` maps to itself, an edge at `v` to the union
    /// of all labels beyond it.
    pub fn flag_label(&self, v: usize, x: &Flag) -> Result<Label> {
        match x {
            Flag::Label(l) => {
                let vert = &self.vertices[v];
                if vert.boundary.contains(l) || vert.interior.contains(l) {
                    Ok(l.clone())
                } else {
                    Err(Error::MissingLabel(l.to_string()))
                }
            }
            Flag::Edge(e) => {
                let e = *e;
                if e >= self.edges.len() {
                    return Err(Error::MissingEdge(e));
                }
                let (a, b) = self.edges[e];
                let u = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    return Err(Error::MissingEdge(e));
                };
                Label::new(self.base_labels(&self.side(e, u)))
            }
        }
    }

    /// Whether the boundary edge `e` is legal for its endpoint `v`:
    /// `k(Γ_{e,v})` is even.
    pub fn edge_legality(&self, e: usize, v: usize) -> Result<Legality> {
        if e >= self.edges.len() {
            return Err(Error::MissingEdge(e));
        }
        let (a, b) = self.edges[e];
        if a != v && b != v {
            return Err(Error::Domain(format!("edge {} is not incident to vertex {}", e, v)));
        }
        if !self.is_boundary_edge(e) {
            return Err(Error::Domain(format!("edge {} is not a boundary edge", e)));
        }
        if self.boundary_count(&self.side(e, v)) % 2 == 1 {
            Ok(Legality::Illegal)
        } else {
            Ok(Legality::Legal)
        }
    }

    /// Legal boundary edges at `v`.
    pub fn legal_edges(&self, v: usize) -> Vec<usize> {
        self.incident(v)
            .into_iter()
            .map(|(e, _)| e)
            .filter(|&e| self.is_boundary_edge(e) && self.edge_legality(e, v) == Ok(Legality::Legal))
            .collect()
    }

    /// Every component with open vertices has odd `k`.
    pub fn is_odd(&self) -> bool {
        self.components().iter().all(|c| {
            !c.iter().any(|&v| self.vertices[v].is_open()) || self.boundary_count(c) % 2 == 1
        })
    }

    /// The base `𝓑Γ`: edgeless graph on the vertices with
    /// `2l(v) + |ℓ_B(v) ∪ E_legal(v)| ≥ 3`, flags relabeled through `i_v`.
    pub fn base(&self) -> Result<StableGraph> {
        if !self.is_odd() {
            return Err(Error::Domain("base is defined only when every open component has odd k".into()));
        }
        let mut verts = Vec::new();
        for v in 0..self.vertices.len() {
            let vert = &self.vertices[v];
            let legal = self.legal_edges(v);
            let interior_edges: Vec<usize> = self
                .incident(v)
                .into_iter()
                .map(|(e, _)| e)
                .filter(|&e| !self.is_boundary_edge(e))
                .collect();
            let l = vert.interior.len() + interior_edges.len();
            let b = vert.boundary.len() + legal.len();
            if 2 * l + b < 3 {
                continue;
            }
            let mut nv = Vertex {
                kind: vert.kind,
                boundary: vert.boundary.clone(),
                interior: vert.interior.clone(),
            };
            for e in legal {
                nv.boundary.insert(self.flag_label(v, &Flag::Edge(e))?);
            }
            for e in interior_edges {
                nv.interior.insert(self.flag_label(v, &Flag::Edge(e))?);
            }
            verts.push(nv);
        }
        Ok(StableGraph::new(verts, Vec::new()))
    }

    /// `Γ_U`: the induced graph on `U`, cut edges replaced by their `i_v`
    /// labels.
    pub fn span(&self, u: &[usize]) -> Result<StableGraph> {
        let keep: BTreeSet<usize> = u.iter().copied().collect();
        if let Some(&bad) = keep.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(Error::Domain(format!("vertex {} not present", bad)));
        }
        let index: HashMap<usize, usize> = keep.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut verts = Vec::new();
        for &v in &keep {
            let mut nv = self.vertices[v].clone();
            for (e, w) in self.incident(v) {
                if keep.contains(&w) {
                    continue;
                }
                let label = self.flag_label(v, &Flag::Edge(e))?;
                if self.is_boundary_edge(e) {
                    nv.boundary.insert(label);
                } else {
                    nv.interior.insert(label);
                }
            }
            verts.push(nv);
        }
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| keep.contains(a) && keep.contains(b))
            .map(|(a, b)| (index[a], index[b]))
            .collect();
        Ok(StableGraph::new(verts, edges))
    }

    fn remove_vertex(&mut self, v: usize) {
        self.vertices.remove(v);
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (if a > v { a - 1 } else { a }, if b > v { b - 1 } else { b }))
            .collect();
        *self = StableGraph::new(std::mem::take(&mut self.vertices), edges);
    }

    /// One stabilization step at the unstable vertex `v`.
    fn stabilize_at(&mut self, v: usize) -> Result<()> {
        let inc = self.incident(v);
        let vert = self.vertices[v].clone();
        let nb = vert.boundary.len();
        let ni = vert.interior.len();
        let be = inc.iter().filter(|(e, _)| self.is_boundary_edge(*e)).count();
        let ie = inc.len() - be;
        let open = vert.is_open();
        if nb + ni == 0 && inc.len() == 2 && ((open && be == 2) || (!open && ie == 2)) {
            let (u, w) = (inc[0].1, inc[1].1);
            self.edges.push((u.min(w), u.max(w)));
            self.remove_vertex(v);
        } else if open && be == 1 && ie == 0 && nb == 1 && ni == 0 {
            let u = inc[0].1;
            let l = vert.boundary.iter().next().unwrap().clone();
            self.vertices[u].boundary.insert(l);
            self.remove_vertex(v);
        } else if !open && ie == 1 && ni == 1 {
            let u = inc[0].1;
            let l = vert.interior.iter().next().unwrap().clone();
            self.vertices[u].interior.insert(l);
            self.remove_vertex(v);
        } else if inc.len() == 1 && nb + ni == 0 {
            self.remove_vertex(v);
        } else {
            return Err(Error::Domain(format!("vertex {} cannot be stabilized", v)));
        }
        Ok(())
    }

    /// Stabilization, choosing the next unstable vertex with `pick` (given
    /// the current unstable vertices, returns a position in that list).
    pub fn stabilize_with<F: FnMut(&[usize]) -> usize>(&self, mut pick: F) -> Result<StableGraph> {
        let mut g = self.clone();
        loop {
            let unstable: Vec<usize> = (0..g.vertices.len()).filter(|&v| !g.is_vertex_stable(v)).collect();
            if unstable.is_empty() {
                return Ok(g);
            }
            let v = unstable[pick(&unstable) % unstable.len()];
            g.stabilize_at(v)?;
        }
    }

    pub fn stabilize(&self) -> Result<StableGraph> {
        self.stabilize_with(|_| 0)
    }

    /// Canonical forms of the stabilizations reached by every possible
    /// order of steps.
    pub fn all_stabilizations(&self) -> Result<BTreeSet<String>> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self.clone()];
        while let Some(g) = stack.pop() {
            let unstable: Vec<usize> = (0..g.vertices.len()).filter(|&v| !g.is_vertex_stable(v)).collect();
            if unstable.is_empty() {
                out.insert(g.canonical().to_json());
                continue;
            }
            for v in unstable {
                let mut h = g.clone();
                h.stabilize_at(v)?;
                stack.push(h);
            }
        }
        Ok(out)
    }

    fn remove_interior_label(&self, i: &Label) -> Result<Option<StableGraph>> {
        let v = match self.vertices.iter().position(|v| v.interior.contains(i)) {
            Some(v) => v,
            None => return Ok(None),
        };
        let comp = self.components().into_iter().find(|c| c.contains(&v)).unwrap();
        let k = self.boundary_count(&comp) as i64;
        let l = comp.iter().map(|&w| self.vertices[w].interior.len()).sum::<usize>() as i64;
        let has_open = comp.iter().any(|&w| self.vertices[w].is_open());
        let ok = if has_open { k + 2 * (l - 1) >= 3 } else { l > 3 };
        if !ok {
            return Err(Error::Domain(format!("forgetting {} leaves an unstable component", i)));
        }
        let mut g = self.clone();
        g.vertices[v].interior.remove(i);
        Ok(Some(g))
    }

    /// `for_i`: remove interior label `i` and stabilize; the graph itself if
    /// `i` is absent.
    pub fn forget_interior(&self, i: &Label) -> Result<StableGraph> {
        match self.remove_interior_label(i)? {
            None => Ok(self.clone()),
            Some(g) => g.stabilize(),
        }
    }

    /// Results of `for_i` under every stabilization order.
    pub fn forget_interior_all_orders(&self, i: &Label) -> Result<BTreeSet<String>> {
        match self.remove_interior_label(i)? {
            None => Ok(BTreeSet::from([self.canonical().to_json()])),
            Some(g) => g.all_stabilizations(),
        }
    }

    /// Sorted `i_v` images of all flags of `v`.
    pub fn flag_images(&self, v: usize) -> Vec<Label> {
        let mut out: Vec<Label> = self.vertices[v].labels().cloned().collect();
        for (e, _) in self.incident(v) {
            if let Ok(l) = self.flag_label(v, &Flag::Edge(e)) {
                out.push(l);
            }
        }
        out.sort();
        out
    }

    /// Flag images of `v` tagged by where they come from: 0 for own
    /// labels, 1 for boundary edges, 2 for interior edges. Unlike the bare
    /// images these tell vertices apart.
    fn typed_images(&self, v: usize) -> Vec<(Label, u8)> {
        let mut out: Vec<(Label, u8)> = self.vertices[v].labels().map(|l| (l.clone(), 0)).collect();
        for (e, _) in self.incident(v) {
            if let Ok(l) = self.flag_label(v, &Flag::Edge(e)) {
                out.push((l, if self.is_boundary_edge(e) { 1 } else { 2 }));
            }
        }
        out.sort();
        out
    }

    /// Vertices sorted by their typed flag images, edges sorted.
    pub fn canonical(&self) -> StableGraph {
        let mut order: Vec<(Vec<(Label, u8)>, VertexKind, usize)> = (0..self.vertices.len())
            .map(|v| (self.typed_images(v), self.vertices[v].kind, v))
            .collect();
        order.sort();
        let mut pos = vec![0; self.vertices.len()];
        for (i, (_, _, v)) in order.iter().enumerate() {
            pos[*v] = i;
        }
        let verts = order.iter().map(|(_, _, v)| self.vertices[*v].clone()).collect();
        let edges = self.edges.iter().map(|&(a, b)| (pos[a], pos[b])).collect();
        StableGraph::new(verts, edges)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graphs always serialize")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("graphs always serialize")
    }

    pub fn from_json(text: &str) -> Result<StableGraph> {
        let g: StableGraph = serde_json::from_str(text).map_err(|e| Error::Io(e.to_string()))?;
        Ok(StableGraph::new(g.vertices, g.edges))
    }
}

/// A set of base labels that is the union of a non-empty proper
/// sub-family of `a` and of one of `b`. Both families must have pairwise
/// disjoint members.
fn shared_union(a: &[&Label], b: &[&Label]) -> Option<BTreeSet<BaseLabel>> {
    let n = a.len() + b.len();
    let mut uf = UnionFind::new(n);
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            if !x.is_disjoint(y) {
                uf.union(i, a.len() + j);
            }
        }
    }
    let mut classes: HashMap<usize, (Vec<usize>, Vec<usize>)> = HashMap::new();
    for i in 0..a.len() {
        classes.entry(uf.find(i)).or_default().0.push(i);
    }
    for j in 0..b.len() {
        classes.entry(uf.find(a.len() + j)).or_default().1.push(j);
    }
    for (ia, ib) in classes.values() {
        if ia.is_empty() || ib.is_empty() || ia.len() == a.len() || ib.len() == b.len() {
            continue;
        }
        let ua: BTreeSet<BaseLabel> = ia.iter().flat_map(|&i| a[i].elements().iter().copied()).collect();
        let ub: BTreeSet<BaseLabel> = ib.iter().flat_map(|&j| b[j].elements().iter().copied()).collect();
        if ua == ub {
            return Some(ua);
        }
    }
    None
}

impl fmt::Display for StableGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.vertices.iter().enumerate() {
            let b: Vec<String> = v.boundary.iter().map(|l| l.to_string()).collect();
            let il: Vec<String> = v.interior.iter().map(|l| l.to_string()).collect();
            let kind = match v.kind {
                VertexKind::Open => "open",
                VertexKind::Closed => "closed",
            };
            writeln!(f, "v{} {} lB=[{}] lI=[{}]", i, kind, b.join(","), il.join(","))?;
        }
        for (a, b) in &self.edges {
            writeln!(f, "e v{}-v{}", a, b)?;
        }
        Ok(())
    }
}
