//! Labeled rooted Schreier graphs and finite permutation actions.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::words::{GenSet, Word};

/// Marker for an undefined edge-slot.
pub const NO_EDGE: u32 = u32::MAX;

/// Anything that can be walked by labels: Schreier graphs, folded cores and
/// permutation actions.
pub trait Labeled {
    fn gens(&self) -> &GenSet;
    fn vertex_count(&self) -> usize;
    fn step(&self, v: usize, label: usize) -> Option<usize>;
    /// Boundary vertices may have undefined slots.
    fn is_boundary(&self, _v: usize) -> bool {
        false
    }
}

/// Result of following a word from a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Vertex(usize),
    Boundary,
}

impl Endpoint {
    pub fn vertex(self) -> Option<usize> {
        match self {
            Endpoint::Vertex(v) => Some(v),
            Endpoint::Boundary => None,
        }
    }
}

/// A connected, label-consistent rooted graph with `d` edge-slots per vertex.
///
/// Vertices are numbered in breadth-first order from the root (root = 0),
/// exploring slots in label order. Truncated balls of infinite graphs flag
/// their outer vertices as boundary; only boundary vertices may have
/// undefined slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGraph {
    gens: GenSet,
    next: Vec<u32>,
    boundary: Vec<bool>,
    truncation: Option<u32>,
}

impl SchreierGraph {
    /// Validates the slot table and renumbers canonically.
    ///
    /// `next[v * d + l]` is the `l`-neighbour of `v` or [`NO_EDGE`]. The root
    /// is given in the input numbering; in the result it is vertex 0.
    pub fn new(
        gens: GenSet,
        root: usize,
        next: Vec<u32>,
        boundary: Vec<bool>,
        truncation: Option<u32>,
    ) -> Result<Self> {
        let d = gens.degree();
        if !next.len().is_multiple_of(d) {
            return Err(Error::Invariant(format!(
                "slot table length {} is not a multiple of the degree {d}",
                next.len()
            )));
        }
        let n = next.len() / d;
        if n == 0 {
            return Err(Error::Invariant("graph has no vertices".into()));
        }
        if boundary.len() != n {
            return Err(Error::Invariant(format!("{} boundary flags for {n} vertices", boundary.len())));
        }
        if root >= n {
            return Err(Error::Invariant(format!("root {root} is not a vertex")));
        }
        check_slots(&gens, &next, |v| boundary[v])?;
        if truncation.is_none() {
            if let Some(v) = boundary.iter().position(|&b| b) {
                return Err(Error::Invariant(format!(
                    "vertex {v} is flagged boundary but the graph is not truncated"
                )));
            }
        }
        let order = bfs_order(d, &next, root);
        if order.len() != n {
            let missing = first_unreached(n, &order);
            return Err(Error::Invariant(format!("graph is disconnected: vertex {missing} unreachable from the root")));
        }
        let (next, boundary) = renumber(d, &next, &boundary, &order);
        Ok(SchreierGraph { gens, next, boundary, truncation })
    }

    /// Finite graph from a complete slot table.
    pub fn finite(gens: GenSet, root: usize, next: Vec<u32>) -> Result<Self> {
        let n = next.len() / gens.degree().max(1);
        SchreierGraph::new(gens, root, next, vec![false; n], None)
    }

    pub fn gens(&self) -> &GenSet {
        &self.gens
    }

    pub fn degree(&self) -> usize {
        self.gens.degree()
    }

    pub fn vertex_count(&self) -> usize {
        self.boundary.len()
    }

    /// Always 0 after canonical numbering.
    pub fn root(&self) -> usize {
        0
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    pub fn is_finite(&self) -> bool {
        self.truncation.is_none()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }

    pub fn boundary_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.boundary.iter().enumerate().filter(|(_, &b)| b).map(|(v, _)| v)
    }

    pub fn next(&self, v: usize, label: usize) -> Option<usize> {
        let t = self.next[v * self.degree() + label];
        (t != NO_EDGE).then_some(t as usize)
    }

    /// Raw slot table, `d` entries per vertex.
    pub fn slots(&self) -> &[u32] {
        &self.next
    }

    /// Defined slots of `v` as `(label, target)`.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, usize)> + '_ {
        let d = self.degree();
        self.next[v * d..(v + 1) * d]
            .iter()
            .enumerate()
            .filter(|(_, &t)| t != NO_EDGE)
            .map(|(l, &t)| (l, t as usize))
    }

    pub fn walk_endpoint(&self, v: usize, w: &Word) -> Endpoint {
        walk(self, v, w)
    }

    /// The same graph with another root, renumbered canonically.
    pub fn rerooted(&self, root: usize) -> SchreierGraph {
        let d = self.degree();
        let order = bfs_order(d, &self.next, root);
        let (next, boundary) = renumber(d, &self.next, &self.boundary, &order);
        SchreierGraph { gens: self.gens.clone(), next, boundary, truncation: self.truncation }
    }

    /// Breadth-first distances from `from`; unreachable entries are `u32::MAX`.
    pub fn distances(&self, from: usize) -> Vec<u32> {
        distances(self, from)
    }

    /// Distance from `v` to the nearest boundary vertex, `None` if there is none.
    pub fn boundary_distance(&self, v: usize) -> Option<u32> {
        self.truncation?;
        let n = self.vertex_count();
        let mut dist = vec![u32::MAX; n];
        let mut queue = VecDeque::new();
        for b in self.boundary_vertices() {
            dist[b] = 0;
            queue.push_back(b);
        }
        if queue.is_empty() {
            return None;
        }
        while let Some(u) = queue.pop_front() {
            if u == v {
                return Some(dist[u]);
            }
            for (_, w) in self.neighbors(u) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        None
    }

    /// Ball of radius `r` around the root as a truncated graph: vertices
    /// within distance `r`, with the slots of those at distance `< r`.
    pub fn restrict(&self, r: u32) -> SchreierGraph {
        let d = self.degree();
        let dist = self.distances(0);
        let keep: Vec<usize> = (0..self.vertex_count()).filter(|&v| dist[v] <= r).collect();
        let mut index = vec![NO_EDGE; self.vertex_count()];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i as u32;
        }
        let mut next = vec![NO_EDGE; keep.len() * d];
        let mut boundary = vec![false; keep.len()];
        for (i, &v) in keep.iter().enumerate() {
            boundary[i] = dist[v] == r || self.boundary[v];
            for (l, w) in self.neighbors(v) {
                // Inward slots at distance r stay so the result is label-consistent.
                if dist[v] < r || dist[w] < r {
                    next[i * d + l] = index[w];
                }
            }
        }
        let truncation = Some(match self.truncation {
            Some(t) => t.min(r),
            None => r,
        });
        SchreierGraph::new(self.gens.clone(), 0, next, boundary, truncation)
            .expect("restriction of a valid graph is valid")
    }

    /// Two-colouring test on the underlying graph (loops make it non-bipartite).
    pub fn is_bipartite(&self) -> bool {
        let n = self.vertex_count();
        let mut colour = vec![u8::MAX; n];
        colour[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for (_, w) in self.neighbors(u) {
                if colour[w] == u8::MAX {
                    colour[w] = 1 - colour[u];
                    queue.push_back(w);
                } else if colour[w] == colour[u] {
                    return false;
                }
            }
        }
        true
    }

    /// Proper two-colouring (0/1 per vertex) when bipartite.
    pub fn bipartition(&self) -> Option<Vec<u8>> {
        if !self.is_bipartite() {
            return None;
        }
        let dist = self.distances(0);
        Some(dist.iter().map(|&d| (d % 2) as u8).collect())
    }

    /// Number of slots from `v` into `w`, i.e. the adjacency multiplicity.
    pub fn multiplicity(&self, v: usize, w: usize) -> usize {
        self.neighbors(v).filter(|&(_, t)| t == w).count()
    }

    /// Edge list of the underlying multigraph, one entry per undirected edge:
    /// `(v, w, label)` with the edge taken from its lower endpoint slot. Each
    /// non-involutive loop appears once (for its slot pair).
    pub fn undirected_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for v in 0..self.vertex_count() {
            for (l, w) in self.neighbors(v) {
                let il = self.gens.inv(l);
                if v < w || (v == w && l <= il) {
                    out.push((v, w, l));
                }
            }
        }
        out
    }
}

impl Labeled for SchreierGraph {
    fn gens(&self) -> &GenSet {
        &self.gens
    }
    fn vertex_count(&self) -> usize {
        self.boundary.len()
    }
    fn step(&self, v: usize, label: usize) -> Option<usize> {
        self.next(v, label)
    }
    fn is_boundary(&self, v: usize) -> bool {
        self.boundary[v]
    }
}

pub(crate) fn walk<G: Labeled + ?Sized>(g: &G, v: usize, w: &Word) -> Endpoint {
    let mut cur = v;
    for &l in w.letters() {
        match g.step(cur, l) {
            Some(t) => cur = t,
            None => return Endpoint::Boundary,
        }
    }
    Endpoint::Vertex(cur)
}

pub(crate) fn distances<G: Labeled + ?Sized>(g: &G, from: usize) -> Vec<u32> {
    let n = g.vertex_count();
    let d = g.gens().degree();
    let mut dist = vec![u32::MAX; n];
    dist[from] = 0;
    let mut queue = VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for l in 0..d {
            if let Some(w) = g.step(u, l) {
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
    }
    dist
}

/// Checks symmetry of defined slots and totality at non-boundary vertices.
pub(crate) fn check_slots(gens: &GenSet, next: &[u32], is_boundary: impl Fn(usize) -> bool) -> Result<()> {
    let d = gens.degree();
    let n = next.len() / d;
    for v in 0..n {
        for l in 0..d {
            let t = next[v * d + l];
            if t == NO_EDGE {
                if !is_boundary(v) {
                    return Err(Error::Invariant(format!(
                        "interior vertex {v} has no {}-edge (degree must be {d})",
                        gens.name(l)
                    )));
                }
                continue;
            }
            let w = t as usize;
            if w >= n {
                return Err(Error::Invariant(format!("edge ({v},{}) points to missing vertex {w}", gens.name(l))));
            }
            if next[w * d + gens.inv(l)] != v as u32 {
                return Err(Error::Invariant(format!("label-consistency violated at edge ({v},{})", gens.name(l))));
            }
        }
    }
    Ok(())
}

pub(crate) fn bfs_order(d: usize, next: &[u32], root: usize) -> Vec<usize> {
    let n = next.len() / d;
    let mut seen = vec![false; n];
    let mut order = Vec::with_capacity(n);
    seen[root] = true;
    order.push(root);
    let mut head = 0;
    while head < order.len() {
        let u = order[head];
        head += 1;
        for &t in &next[u * d..(u + 1) * d] {
            if t != NO_EDGE && !seen[t as usize] {
                seen[t as usize] = true;
                order.push(t as usize);
            }
        }
    }
    order
}

fn first_unreached(n: usize, order: &[usize]) -> usize {
    let mut seen = vec![false; n];
    for &v in order {
        seen[v] = true;
    }
    seen.iter().position(|&s| !s).unwrap_or(0)
}

/// Relabels vertices so that `order[i]` becomes `i`. Vertices missing from
/// `order` are dropped (their slots must not be referenced).
pub(crate) fn renumber(d: usize, next: &[u32], boundary: &[bool], order: &[usize]) -> (Vec<u32>, Vec<bool>) {
    let n = next.len() / d;
    let mut index = vec![NO_EDGE; n];
    for (i, &v) in order.iter().enumerate() {
        index[v] = i as u32;
    }
    let mut out = vec![NO_EDGE; order.len() * d];
    let mut flags = vec![false; order.len()];
    for (i, &v) in order.iter().enumerate() {
        flags[i] = boundary[v];
        for l in 0..d {
            let t = next[v * d + l];
            if t != NO_EDGE {
                out[i * d + l] = index[t as usize];
            }
        }
    }
    (out, flags)
}

/// A finite right action of the group generated by the labels: point `x`
/// moves to `perm(l)[x]` under label `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermAction {
    gens: GenSet,
    perms: Vec<Vec<u32>>,
}

impl PermAction {
    pub fn new(gens: GenSet, perms: Vec<Vec<u32>>) -> Result<Self> {
        let d = gens.degree();
        if perms.len() != d {
            return Err(Error::Invariant(format!("{} permutations for {d} labels", perms.len())));
        }
        let n = perms[0].len();
        if n == 0 {
            return Err(Error::Invariant("action on the empty set".into()));
        }
        for (l, p) in perms.iter().enumerate() {
            if p.len() != n {
                return Err(Error::Invariant(format!("permutation {} has the wrong length", gens.name(l))));
            }
            let mut seen = vec![false; n];
            for &x in p {
                if x as usize >= n || seen[x as usize] {
                    return Err(Error::Invariant(format!("{} is not a permutation", gens.name(l))));
                }
                seen[x as usize] = true;
            }
        }
        for l in 0..d {
            let q = &perms[gens.inv(l)];
            for x in 0..n {
                if q[perms[l][x] as usize] != x as u32 {
                    return Err(Error::Invariant(format!(
                        "{} does not act as the inverse of {}",
                        gens.name(gens.inv(l)),
                        gens.name(l)
                    )));
                }
            }
        }
        Ok(PermAction { gens, perms })
    }

    /// Builds the action from images of one label per inverse pair; the
    /// inverse labels get the inverse permutations.
    pub fn from_generators(gens: GenSet, images: &[Vec<u32>]) -> Result<Self> {
        let d = gens.degree();
        let reps: Vec<usize> = (0..d).filter(|&l| gens.inv(l) >= l).collect();
        if images.len() != reps.len() {
            return Err(Error::Invariant(format!(
                "{} permutations for {} generator pairs",
                images.len(),
                reps.len()
            )));
        }
        let n = images.first().map_or(0, |p| p.len());
        let mut perms = vec![Vec::new(); d];
        for (&l, p) in reps.iter().zip(images) {
            perms[l] = p.clone();
            let il = gens.inv(l);
            if il != l {
                let mut q = vec![0u32; p.len()];
                for (x, &y) in p.iter().enumerate() {
                    if (y as usize) < q.len() {
                        q[y as usize] = x as u32;
                    }
                }
                perms[il] = q;
            }
        }
        if perms.iter().any(|p| p.len() != n) {
            return Err(Error::Invariant("permutations of different lengths".into()));
        }
        PermAction::new(gens, perms)
    }

    /// Permutation action read off a finite Schreier graph.
    pub fn from_graph(g: &SchreierGraph) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::Unsupported("truncated graphs do not define an action".into()));
        }
        let d = g.degree();
        let n = g.vertex_count();
        let perms = (0..d)
            .map(|l| (0..n).map(|v| g.slots()[v * d + l]).collect())
            .collect();
        PermAction::new(g.gens().clone(), perms)
    }

    /// The cyclic group Z/n acting on itself, generator `t` adding one.
    pub fn cyclic(n: usize) -> Result<Self> {
        let gens = GenSet::new(vec!["t".into(), "T".into()], vec![1, 0])?;
        let t: Vec<u32> = (0..n).map(|x| ((x + 1) % n) as u32).collect();
        PermAction::from_generators(gens, &[t])
    }

    /// Right regular action of the finite group generated by `group_gens`
    /// and the label elements (all given as permutations of `0..m`). Points
    /// are group elements, point 0 is the identity; label `l` multiplies on
    /// the right by `label_elems[l]`.
    pub fn regular(gens: GenSet, label_elems: &[Vec<u32>], group_gens: &[Vec<u32>]) -> Result<Self> {
        let d = gens.degree();
        if label_elems.len() != d {
            return Err(Error::Invariant(format!("{} elements for {d} labels", label_elems.len())));
        }
        let m = label_elems
            .first()
            .or(group_gens.first())
            .map_or(0, |p| p.len());
        let all: Vec<&Vec<u32>> = label_elems.iter().chain(group_gens).collect();
        for p in &all {
            if p.len() != m || !is_permutation(p) {
                return Err(Error::Invariant("group elements must be permutations of one set".into()));
            }
        }
        for l in 0..d {
            let prod = compose(&label_elems[l], &label_elems[gens.inv(l)]);
            if prod.iter().enumerate().any(|(x, &y)| x as u32 != y) {
                return Err(Error::Invariant(format!(
                    "element of {} is not the inverse of {}",
                    gens.name(gens.inv(l)),
                    gens.name(l)
                )));
            }
        }
        let identity: Vec<u32> = (0..m as u32).collect();
        let mut elems = vec![identity.clone()];
        let mut index = std::collections::HashMap::new();
        index.insert(identity, 0u32);
        let mut head = 0;
        while head < elems.len() {
            let g = elems[head].clone();
            head += 1;
            for s in &all {
                let h = compose(&g, s);
                if !index.contains_key(&h) {
                    index.insert(h.clone(), elems.len() as u32);
                    elems.push(h);
                }
            }
        }
        let perms = label_elems
            .iter()
            .map(|s| elems.iter().map(|g| index[&compose(g, s)]).collect())
            .collect();
        PermAction::new(gens, perms)
    }

    pub fn gens(&self) -> &GenSet {
        &self.gens
    }

    pub fn degree(&self) -> usize {
        self.perms[0].len()
    }

    pub fn perm(&self, label: usize) -> &[u32] {
        &self.perms[label]
    }

    pub fn apply(&self, x: usize, label: usize) -> usize {
        self.perms[label][x] as usize
    }

    pub fn apply_word(&self, x: usize, w: &Word) -> usize {
        w.letters().iter().fold(x, |p, &l| self.apply(p, l))
    }

    /// The permutation `x ↦ x·w`.
    pub fn word_permutation(&self, w: &Word) -> Vec<u32> {
        let mut p: Vec<u32> = (0..self.degree() as u32).collect();
        for &l in w.letters() {
            for x in p.iter_mut() {
                *x = self.perms[l][*x as usize];
            }
        }
        p
    }

    /// Points of the orbit of `x` in breadth-first order.
    pub fn orbit(&self, x: usize) -> Vec<usize> {
        let dist = distances(self, x);
        let mut pts: Vec<usize> = (0..self.degree()).filter(|&y| dist[y] != u32::MAX).collect();
        pts.sort_by_key(|&y| dist[y]);
        pts
    }

    pub fn is_transitive(&self) -> bool {
        self.orbit(0).len() == self.degree()
    }

    /// True when the action is transitive and every point has trivial stabilizer,
    /// i.e. it is the regular action of the group it generates.
    pub fn is_regular(&self) -> bool {
        if !self.is_transitive() {
            return false;
        }
        let n = self.degree();
        // The group generated has exactly n elements iff regular; enumerate
        // elements as permutations, stopping once n is exceeded.
        let identity: Vec<u32> = (0..n as u32).collect();
        let mut seen = std::collections::HashSet::new();
        seen.insert(identity.clone());
        let mut queue = vec![identity];
        while let Some(g) = queue.pop() {
            for s in &self.perms {
                let h = compose(&g, s);
                if seen.insert(h.clone()) {
                    if seen.len() > n {
                        return false;
                    }
                    queue.push(h);
                }
            }
        }
        seen.len() == n
    }
}

impl Labeled for PermAction {
    fn gens(&self) -> &GenSet {
        &self.gens
    }
    fn vertex_count(&self) -> usize {
        self.degree()
    }
    fn step(&self, v: usize, label: usize) -> Option<usize> {
        Some(self.perms[label][v] as usize)
    }
}

fn is_permutation(p: &[u32]) -> bool {
    let mut seen = vec![false; p.len()];
    for &x in p {
        if x as usize >= p.len() || seen[x as usize] {
            return false;
        }
        seen[x as usize] = true;
    }
    true
}

/// Product `g·s` of right actions: first `g`, then `s`.
pub fn compose(g: &[u32], s: &[u32]) -> Vec<u32> {
    g.iter().map(|&x| s[x as usize]).collect()
}
