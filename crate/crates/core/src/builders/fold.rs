//! Stallings folding of subgroup generators and completion of the core to
//! balls of the full Schreier graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::graph::{bfs_order, check_slots, renumber, Labeled, SchreierGraph, NO_EDGE};
use crate::words::{GenSet, Word};

/// A folded, connected, label-consistent graph whose vertices may miss
/// slots; a missing slot is where a free tree hangs off in the full
/// Schreier graph. Root is vertex 0, numbering is breadth-first canonical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoreGraph {
    gens: GenSet,
    next: Vec<u32>,
}

impl CoreGraph {
    pub fn gens(&self) -> &GenSet {
        &self.gens
    }

    pub fn degree(&self) -> usize {
        self.gens.degree()
    }

    pub fn vertex_count(&self) -> usize {
        self.next.len() / self.degree()
    }

    pub fn next(&self, v: usize, label: usize) -> Option<usize> {
        let t = self.next[v * self.degree() + label];
        (t != NO_EDGE).then_some(t as usize)
    }

    pub fn slots(&self) -> &[u32] {
        &self.next
    }

    pub fn missing_slots(&self, v: usize) -> usize {
        let d = self.degree();
        self.next[v * d..(v + 1) * d].iter().filter(|&&t| t == NO_EDGE).count()
    }

    /// Complete cores describe finite-index subgroups.
    pub fn is_complete(&self) -> bool {
        self.next.iter().all(|&t| t != NO_EDGE)
    }

    /// The finite Schreier graph, when the core is complete.
    pub fn to_graph(&self) -> Result<SchreierGraph> {
        if !self.is_complete() {
            return Err(Error::Unsupported("core has missing slots; use complete_ball".into()));
        }
        SchreierGraph::finite(self.gens.clone(), 0, self.next.clone())
    }

    /// Subgroup membership: the reduced word `w` lies in the subgroup iff it
    /// reads a closed path at the root.
    pub fn contains(&self, w: &Word) -> bool {
        let w = w.reduce(&self.gens);
        let mut v = 0;
        for &l in w.letters() {
            match self.next(v, l) {
                Some(t) => v = t,
                None => return false,
            }
        }
        v == 0
    }
}

impl Labeled for CoreGraph {
    fn gens(&self) -> &GenSet {
        &self.gens
    }
    fn vertex_count(&self) -> usize {
        CoreGraph::vertex_count(self)
    }
    fn step(&self, v: usize, label: usize) -> Option<usize> {
        self.next(v, label)
    }
    fn is_boundary(&self, v: usize) -> bool {
        self.missing_slots(v) > 0
    }
}

struct Folder {
    d: usize,
    inv: Vec<usize>,
    parent: Vec<u32>,
    slots: Vec<u32>,
    pending: Vec<(u32, u32)>,
}

impl Folder {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    fn set_slot(&mut self, u: u32, l: usize, v: u32) {
        let cur = self.slots[u as usize * self.d + l];
        if cur == NO_EDGE {
            self.slots[u as usize * self.d + l] = v;
        } else if self.find(cur) != self.find(v) {
            self.pending.push((cur, v));
        }
    }

    fn add_edge(&mut self, u: u32, l: usize, v: u32) {
        let (u, v) = (self.find(u), self.find(v));
        self.set_slot(u, l, v);
        let il = self.inv[l];
        self.set_slot(v, il, u);
    }

    fn merge_all(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (keep, gone) = if x < y { (x, y) } else { (y, x) };
            self.parent[gone as usize] = keep;
            for l in 0..self.d {
                let t = self.slots[gone as usize * self.d + l];
                if t != NO_EDGE {
                    self.slots[gone as usize * self.d + l] = NO_EDGE;
                    self.set_slot(keep, l, t);
                }
            }
        }
    }
}

/// Folds an arbitrary labeled graph given as an edge list `(u, label, v)` on
/// `vertex_count` vertices and returns the folded component of `root`. The
/// result does not depend on the edge order.
pub fn fold(gens: &GenSet, vertex_count: usize, edges: &[(usize, usize, usize)], root: usize) -> Result<CoreGraph> {
    let d = gens.degree();
    if root >= vertex_count {
        return Err(Error::Invariant(format!("root {root} is not a vertex")));
    }
    let mut f = Folder {
        d,
        inv: gens.inverse_map().to_vec(),
        parent: (0..vertex_count as u32).collect(),
        slots: vec![NO_EDGE; vertex_count * d],
        pending: Vec::new(),
    };
    for &(u, l, v) in edges {
        if u >= vertex_count || v >= vertex_count || l >= d {
            return Err(Error::Invariant(format!("edge ({u},{l},{v}) out of range")));
        }
        f.add_edge(u as u32, l, v as u32);
        f.merge_all();
    }
    // Resolve targets to representatives and compact.
    let reps: Vec<u32> = (0..vertex_count as u32).filter(|&x| f.find(x) == x).collect();
    let mut index = vec![NO_EDGE; vertex_count];
    for (i, &r) in reps.iter().enumerate() {
        index[r as usize] = i as u32;
    }
    let mut next = vec![NO_EDGE; reps.len() * d];
    for (i, &r) in reps.iter().enumerate() {
        for l in 0..d {
            let t = f.slots[r as usize * d + l];
            if t != NO_EDGE {
                let rt = f.find(t);
                next[i * d + l] = index[rt as usize];
            }
        }
    }
    let root = index[f.find(root as u32) as usize] as usize;
    let order = bfs_order(d, &next, root);
    let flags = vec![false; reps.len()];
    let (next, _) = renumber(d, &next, &flags, &order);
    check_slots(gens, &next, |_| true)?;
    Ok(CoreGraph { gens: gens.clone(), next })
}

/// The core of the Schreier graph of `⟨words⟩` in the free group on `gens`.
pub fn stallings_core(gens: &GenSet, words: &[Word]) -> Result<CoreGraph> {
    if !gens.is_free() {
        return Err(Error::InvalidGenSet("folding needs a free alphabet (no involutive labels)".into()));
    }
    let mut edges = Vec::new();
    let mut count = 1;
    for w in words {
        w.check(gens)?;
        let w = w.reduce(gens);
        if w.is_empty() {
            continue;
        }
        let mut prev = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            let target = if i + 1 == w.len() {
                0
            } else {
                count += 1;
                count - 1
            };
            edges.push((prev, l, target));
            prev = target;
        }
    }
    fold(gens, count, &edges, 0)
}

/// Core of the trivial subgroup: one vertex with no slots.
pub fn trivial_core(gens: &GenSet) -> CoreGraph {
    CoreGraph { gens: gens.clone(), next: vec![NO_EDGE; gens.degree()] }
}

/// The ball of radius `r` around the root of the full Schreier graph whose
/// core is `core`: missing slots are completed by free trees.
pub fn complete_ball(core: &CoreGraph, r: u32) -> SchreierGraph {
    let d = core.degree();
    let gens = core.gens();
    let cn = core.vertex_count();
    let dist = crate::graph::distances(core, 0);
    // Core vertices within the ball keep their ids.
    let mut vdist: Vec<u32> = Vec::new();
    let mut index = vec![NO_EDGE; cn];
    for v in 0..cn {
        if dist[v] <= r {
            index[v] = vdist.len() as u32;
            vdist.push(dist[v]);
        }
    }
    let mut next: Vec<u32> = vec![NO_EDGE; vdist.len() * d];
    for v in 0..cn {
        if dist[v] > r {
            continue;
        }
        for l in 0..d {
            if let Some(w) = core.next(v, l) {
                if dist[w] <= r && (dist[v] < r || dist[w] < r) {
                    next[index[v] as usize * d + l] = index[w];
                }
            }
        }
    }
    // Grow trees breadth-first from missing slots at depth < r.
    let mut queue: VecDeque<(u32, usize)> = VecDeque::new();
    for v in 0..cn {
        if dist[v] < r {
            for l in 0..d {
                if core.next(v, l).is_none() {
                    queue.push_back((index[v], l));
                }
            }
        }
    }
    while let Some((parent, l)) = queue.pop_front() {
        let child = vdist.len() as u32;
        let depth = vdist[parent as usize] + 1;
        vdist.push(depth);
        next.extend(std::iter::repeat_n(NO_EDGE, d));
        next[parent as usize * d + l] = child;
        let back = gens.inv(l);
        next[child as usize * d + back] = parent;
        if depth < r {
            for l2 in 0..d {
                if l2 != back {
                    queue.push_back((child, l2));
                }
            }
        }
    }
    let boundary: Vec<bool> = vdist.iter().map(|&k| k == r).collect();
    SchreierGraph::new(gens.clone(), 0, next, boundary, Some(r)).expect("completed ball is valid")
}

/// Ball of radius `r` in the Cayley graph of the free group of rank `m`.
pub fn free_ball(m: usize, r: u32) -> SchreierGraph {
    complete_ball(&trivial_core(&GenSet::free(m)), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(g: &GenSet, ws: &[&str]) -> Vec<Word> {
        ws.iter().map(|w| g.parse_word(w).unwrap()).collect()
    }

    #[test]
    fn core_of_cyclic_subgroup() {
        let g = GenSet::free(2);
        let c = stallings_core(&g, &words(&g, &["a"])).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert_eq!(c.next(0, 0), Some(0));
        assert_eq!(c.next(0, 2), None);
    }

    #[test]
    fn core_of_a_squared_and_b() {
        let g = GenSet::free(2);
        let c = stallings_core(&g, &words(&g, &["a^2", "b"])).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert_eq!(c.next(0, 0), Some(1));
        assert_eq!(c.next(1, 0), Some(0));
        assert_eq!(c.next(0, 2), Some(0));
        assert_eq!(c.next(1, 2), None);
        assert_eq!(c.next(1, 3), None);
    }

    #[test]
    fn core_of_whole_group() {
        let g = GenSet::free(2);
        let c = stallings_core(&g, &words(&g, &["a", "a b"])).unwrap();
        assert_eq!(c.vertex_count(), 1);
        assert!(c.is_complete());
    }

    #[test]
    fn conjugate_folds_to_lollipop() {
        let g = GenSet::free(2);
        let c = stallings_core(&g, &words(&g, &["b a B"])).unwrap();
        assert_eq!(c.vertex_count(), 2);
        assert!(c.contains(&g.parse_word("b a^3 B").unwrap()));
        assert!(!c.contains(&g.parse_word("a").unwrap()));
    }

    #[test]
    fn ball_sizes() {
        assert_eq!(free_ball(2, 2).vertex_count(), 17);
        assert_eq!(free_ball(2, 0).vertex_count(), 1);
        let g = GenSet::free(2);
        let c = stallings_core(&g, &words(&g, &["a"])).unwrap();
        let b = complete_ball(&c, 1);
        assert_eq!(b.vertex_count(), 3);
        assert_eq!(b.boundary_vertices().count(), 2);
        assert!(complete_ball(&c, 0).is_boundary(0));
    }
}
