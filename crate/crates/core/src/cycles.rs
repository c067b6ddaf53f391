//! Girth and short-cycle counts of the underlying multigraph.
//!
//! Loops are 1-cycles, each pair of parallel edges is a 2-cycle, and for
//! `L ≥ 3` a cycle is a set of `L` distinct vertices joined cyclically, counted
//! with the product of the edge multiplicities along it.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec;
use crate::graph::SchreierGraph;

pub const DEFAULT_MAX_CYCLE_LENGTH: usize = 12;

const START_BLOCK: usize = 64;

/// Simple adjacency of the underlying multigraph, loops removed.
struct Adjacency {
    adj: Vec<Vec<(u32, u64)>>,
    loops: u64,
    parallel_pairs: u64,
}

impl Adjacency {
    fn new(g: &SchreierGraph) -> Self {
        let n = g.vertex_count();
        let mut adj: Vec<Vec<(u32, u64)>> = vec![Vec::new(); n];
        let mut loops = 0;
        for (v, w, _) in g.undirected_edges() {
            if v == w {
                loops += 1;
                continue;
            }
            for (a, b) in [(v, w), (w, v)] {
                match adj[a].iter_mut().find(|e| e.0 as usize == b) {
                    Some(e) => e.1 += 1,
                    None => adj[a].push((b as u32, 1)),
                }
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        let parallel_pairs = adj
            .iter()
            .enumerate()
            .flat_map(|(v, list)| list.iter().filter(move |e| e.0 as usize > v).map(|e| e.1 * (e.1 - 1) / 2))
            .sum();
        Adjacency { adj, loops, parallel_pairs }
    }

    fn multiplicity(&self, v: usize, w: usize) -> u64 {
        self.adj[v].binary_search_by_key(&(w as u32), |e| e.0).map_or(0, |i| self.adj[v][i].1)
    }
}

/// Reusable search state for walks from one start vertex.
struct Search<'a> {
    adj: &'a Adjacency,
    len: usize,
    dist: Vec<u32>,
    touched: Vec<usize>,
    path: Vec<usize>,
}

impl<'a> Search<'a> {
    fn new(adj: &'a Adjacency, len: usize) -> Self {
        Search { adj, len, dist: vec![u32::MAX; adj.adj.len()], touched: Vec::new(), path: Vec::with_capacity(len) }
    }

    fn reset(&mut self, s: usize) {
        for &v in &self.touched {
            self.dist[v] = u32::MAX;
        }
        self.touched.clear();
        let radius = (self.len / 2) as u32;
        self.dist[s] = 0;
        self.touched.push(s);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            if self.dist[u] == radius {
                continue;
            }
            for &(w, _) in &self.adj.adj[u] {
                let w = w as usize;
                if self.dist[w] == u32::MAX {
                    self.dist[w] = self.dist[u] + 1;
                    self.touched.push(w);
                    queue.push_back(w);
                }
            }
        }
    }

    /// Weighted count of closed vertex-distinct walks of length `len` from
    /// `s`, both orientations, using only vertices `> s` when `lowest`.
    fn closed_walks(&mut self, s: usize, lowest: bool) -> u64 {
        self.reset(s);
        self.path.clear();
        self.path.push(s);
        self.extend(s, s, 1, lowest)
    }

    fn extend(&mut self, s: usize, v: usize, weight: u64, lowest: bool) -> u64 {
        let depth = self.path.len() - 1;
        if depth == self.len - 1 {
            return weight * self.adj.multiplicity(v, s);
        }
        let remaining = (self.len - depth - 1) as u32;
        let mut total = 0;
        for i in 0..self.adj.adj[v].len() {
            let (w, m) = self.adj.adj[v][i];
            let w = w as usize;
            if (lowest && w <= s) || w == s || self.dist[w] > remaining || self.path.contains(&w) {
                continue;
            }
            self.path.push(w);
            total += self.extend(s, w, weight * m, lowest);
            self.path.pop();
        }
        total
    }
}

fn check_finite(g: &SchreierGraph) -> Result<()> {
    if !g.is_finite() {
        return Err(Error::Unsupported("cycle counts need a finite, untruncated graph".into()));
    }
    Ok(())
}

fn count_with(g: &SchreierGraph, adj: &Adjacency, len: usize) -> u64 {
    match len {
        0 => 0,
        1 => adj.loops,
        2 => adj.parallel_pairs,
        _ => {
            let n = g.vertex_count();
            let blocks = n.div_ceil(START_BLOCK);
            let partial = exec::map_range(blocks, |b| {
                let mut search = Search::new(adj, len);
                let hi = ((b + 1) * START_BLOCK).min(n);
                (b * START_BLOCK..hi).map(|s| search.closed_walks(s, true)).sum::<u64>()
            });
            partial.iter().sum::<u64>() / 2
        }
    }
}

/// Number of cycles of length `len`, refusing lengths above `max_len`.
pub fn count_cycles_with(g: &SchreierGraph, len: usize, max_len: usize) -> Result<u64> {
    check_finite(g)?;
    if len > max_len {
        return Err(Error::CycleLengthGuard { length: len, max: max_len });
    }
    Ok(count_with(g, &Adjacency::new(g), len))
}

pub fn count_cycles(g: &SchreierGraph, len: usize) -> Result<u64> {
    count_cycles_with(g, len, DEFAULT_MAX_CYCLE_LENGTH)
}

/// Number of cycles of length `len` through `v`.
pub fn cycles_through(g: &SchreierGraph, v: usize, len: usize) -> Result<u64> {
    check_finite(g)?;
    if len > DEFAULT_MAX_CYCLE_LENGTH {
        return Err(Error::CycleLengthGuard { length: len, max: DEFAULT_MAX_CYCLE_LENGTH });
    }
    let adj = Adjacency::new(g);
    Ok(match len {
        0 => 0,
        1 => g.undirected_edges().iter().filter(|e| e.0 == v && e.1 == v).count() as u64,
        2 => adj.adj[v].iter().map(|e| e.1 * (e.1 - 1) / 2).sum(),
        _ => Search::new(&adj, len).closed_walks(v, false) / 2,
    })
}

/// Length of the shortest cycle, `None` for a forest.
pub fn girth(g: &SchreierGraph) -> Result<Option<usize>> {
    check_finite(g)?;
    let adj = Adjacency::new(g);
    if adj.loops > 0 {
        return Ok(Some(1));
    }
    if adj.parallel_pairs > 0 {
        return Ok(Some(2));
    }
    let n = g.vertex_count();
    let best = exec::map_range(n, |s| shortest_cycle_from(&adj, s));
    Ok(best.into_iter().flatten().min())
}

/// Shortest cycle seen by a BFS from `s`; the minimum over all `s` is the girth.
fn shortest_cycle_from(adj: &Adjacency, s: usize) -> Option<usize> {
    let n = adj.adj.len();
    let mut dist = vec![u32::MAX; n];
    let mut parent = vec![u32::MAX; n];
    dist[s] = 0;
    let mut frontier = vec![s];
    while !frontier.is_empty() {
        let mut found: Option<usize> = None;
        let mut next = Vec::new();
        for &u in &frontier {
            for &(w, _) in &adj.adj[u] {
                let w = w as usize;
                if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    parent[w] = u as u32;
                    next.push(w);
                } else if parent[u] as usize != w {
                    let c = (dist[u] + dist[w] + 1) as usize;
                    found = Some(found.map_or(c, |f| f.min(c)));
                }
            }
        }
        if found.is_some() {
            return found;
        }
        frontier = next;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleProfile {
    pub id: String,
    pub vertices: usize,
    pub girth: Option<usize>,
    /// `counts[L-1] = c_L` for `L = 1..=max_len`.
    pub counts: Vec<u64>,
    pub densities: Vec<f64>,
}

pub fn cycle_profile(id: &str, g: &SchreierGraph, max_len: usize) -> Result<CycleProfile> {
    check_finite(g)?;
    if max_len > DEFAULT_MAX_CYCLE_LENGTH {
        return Err(Error::CycleLengthGuard { length: max_len, max: DEFAULT_MAX_CYCLE_LENGTH });
    }
    let adj = Adjacency::new(g);
    let n = g.vertex_count();
    let counts: Vec<u64> = (1..=max_len).map(|l| count_with(g, &adj, l)).collect();
    Ok(CycleProfile {
        id: id.to_string(),
        vertices: n,
        girth: girth(g)?,
        densities: counts.iter().map(|&c| c as f64 / n as f64).collect(),
        counts,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GirthTrend {
    pub length: usize,
    pub first_density: f64,
    pub last_density: f64,
    pub nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GirthProfile {
    pub max_len: usize,
    pub profiles: Vec<CycleProfile>,
    pub trends: Vec<GirthTrend>,
    /// False when some fixed-length density fails to decrease along the
    /// sequence while being positive.
    pub essentially_large_girth_trend: bool,
}

/// Cycle densities `c_L/n` along a sequence of graphs.
pub fn essential_girth_profile(graphs: &[(String, SchreierGraph)], max_len: usize) -> Result<GirthProfile> {
    let profiles = graphs.iter().map(|(id, g)| cycle_profile(id, g, max_len)).collect::<Result<Vec<_>>>()?;
    let mut trends = Vec::new();
    let mut plausible = true;
    for l in 0..max_len {
        let dens: Vec<f64> = profiles.iter().map(|p| p.densities[l]).collect();
        let (first, last) = (dens.first().copied().unwrap_or(0.0), dens.last().copied().unwrap_or(0.0));
        let nonincreasing = dens.windows(2).all(|w| w[1] <= w[0]);
        if last > 0.0 && (profiles.len() < 2 || last >= first) {
            plausible = false;
        }
        trends.push(GirthTrend { length: l + 1, first_density: first, last_density: last, nonincreasing });
    }
    Ok(GirthProfile { max_len, profiles, trends, essentially_large_girth_trend: plausible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{cycle, from_perm_action, k4, petersen};
    use crate::graph::PermAction;
    use crate::words::GenSet;

    #[test]
    fn named_graphs() {
        assert_eq!(girth(&petersen()).unwrap(), Some(5));
        assert_eq!(count_cycles(&petersen(), 5).unwrap(), 12);
        assert_eq!(count_cycles(&petersen(), 6).unwrap(), 10);
        assert_eq!(count_cycles(&k4(), 3).unwrap(), 4);
        assert_eq!(count_cycles(&k4(), 4).unwrap(), 3);
        assert_eq!(girth(&cycle(6)).unwrap(), Some(6));
        assert_eq!(count_cycles(&cycle(6), 5).unwrap(), 0);
        assert_eq!(count_cycles(&cycle(6), 6).unwrap(), 1);
    }

    #[test]
    fn loops_and_parallel_edges() {
        let act = PermAction::from_generators(GenSet::free(2), &[vec![0, 1], vec![1, 0]]).unwrap();
        let g = from_perm_action(&act, 0);
        // Two vertices: an a-loop at each, joined by two b-edges.
        assert_eq!(g.vertex_count(), 2);
        assert_eq!(girth(&g).unwrap(), Some(1));
        assert_eq!(count_cycles(&g, 1).unwrap(), 2);
        assert_eq!(count_cycles(&g, 2).unwrap(), 1);
        assert_eq!(count_cycles(&g, 3).unwrap(), 0);
        assert_eq!(cycle(2).vertex_count(), 2);
        assert_eq!(girth(&cycle(2)).unwrap(), Some(2));
    }

    #[test]
    fn guard() {
        assert!(matches!(count_cycles(&cycle(20), 13), Err(Error::CycleLengthGuard { .. })));
    }

    #[test]
    fn through_vertex_matches_total_on_transitive_graphs() {
        let g = petersen();
        for l in 3..=9 {
            let total = count_cycles(&g, l).unwrap();
            assert_eq!(cycles_through(&g, 0, l).unwrap() * g.vertex_count() as u64, total * l as u64);
        }
    }
}
