//! Graph automorphisms by individualisation and equitable refinement.
//!
//! The search follows one canonical path of individualisations down to a
//! discrete partition, then, level by level from the bottom, looks for
//! automorphisms mapping the path vertex to every other vertex of the target
//! cell that is not already in its orbit. The generators found form a
//! strong generating set of the full automorphism group.

use std::collections::hash_map::DefaultHasher;
use std::collections::VecDeque;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use crate::graph::{CoverGraph, Graph};
use crate::perm::{orbits_of, PermGroup, Permutation};

pub const DEFAULT_VERTEX_BOUND: usize = 512;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutError {
    #[error("graph has {vertices} vertices, above the bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("colour vector has length {0}, expected {1}")]
    BadColouring(usize, usize),
}

type Cells = Vec<Vec<usize>>;

struct Search<'a> {
    graph: &'a Graph,
    words: usize,
}

impl<'a> Search<'a> {
    fn bits(&self, cell: &[usize]) -> Vec<u64> {
        let mut b = vec![0u64; self.words];
        for &x in cell {
            b[x / 64] |= 1 << (x % 64);
        }
        b
    }

    /// Refines to the coarsest equitable partition below `cells`, starting
    /// from the splitter cells in `queue`; returns an invariant trace.
    fn refine(&self, cells: &mut Cells, mut queue: VecDeque<usize>) -> u64 {
        let mut h = DefaultHasher::new();
        let mut queued = vec![false; cells.len()];
        for &q in &queue {
            queued[q] = true;
        }
        while let Some(s) = queue.pop_front() {
            queued[s] = false;
            let splitter = self.bits(&cells[s]);
            let mut i = 0;
            while i < cells.len() {
                if cells[i].len() == 1 {
                    i += 1;
                    continue;
                }
                let mut keyed: Vec<(usize, usize)> = cells[i]
                    .iter()
                    .map(|&x| {
                        let c = self
                            .graph
                            .row(x)
                            .iter()
                            .zip(&splitter)
                            .map(|(a, b)| (a & b).count_ones() as usize)
                            .sum();
                        (c, x)
                    })
                    .collect();
                keyed.sort_unstable();
                if keyed.first().map(|k| k.0) == keyed.last().map(|k| k.0) {
                    i += 1;
                    continue;
                }
                let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
                for (c, x) in keyed {
                    match parts.last_mut() {
                        Some((pc, p)) if *pc == c => p.push(x),
                        _ => parts.push((c, vec![x])),
                    }
                }
                (s, i).hash(&mut h);
                for (c, p) in &parts {
                    (c, p.len()).hash(&mut h);
                }
                let mut parts = parts.into_iter().map(|(_, p)| p);
                cells[i] = parts.next().expect("at least two parts");
                if !queued[i] {
                    queued[i] = true;
                    queue.push_back(i);
                }
                for p in parts {
                    cells.push(p);
                    queued.push(true);
                    queue.push_back(cells.len() - 1);
                }
                i += 1;
            }
        }
        cells.len().hash(&mut h);
        h.finish()
    }

    fn individualise(&self, cells: &Cells, c: usize, v: usize) -> (Cells, u64) {
        let mut next = cells.clone();
        let rest: Vec<usize> = next[c].iter().copied().filter(|&x| x != v).collect();
        next[c] = vec![v];
        next.push(rest);
        let last = next.len() - 1;
        let trace = self.refine(&mut next, VecDeque::from([c, last]));
        (next, trace)
    }

    fn target_cell(cells: &Cells) -> Option<usize> {
        cells.iter().position(|c| c.len() > 1)
    }

    /// Permutation sending the `i`-th singleton of `from` to that of `to`.
    fn leaf_map(from: &Cells, to: &Cells) -> Permutation {
        let mut images = vec![0u32; from.len()];
        for (a, b) in from.iter().zip(to) {
            images[a[0]] = b[0] as u32;
        }
        Permutation::from_images(images).expect("discrete partitions give a bijection")
    }

    fn is_automorphism(&self, g: &Permutation) -> bool {
        let n = self.graph.vertex_count();
        (0..n).all(|u| {
            self.graph.degree(u) == self.graph.degree(g.apply(u))
                && self.graph.neighbours(u).all(|v| self.graph.has_edge(g.apply(u), g.apply(v)))
        })
    }

    /// Depth-first search below `cells` (at `depth` on the reference path)
    /// for a leaf giving an automorphism.
    fn search(&self, cells: &Cells, depth: usize, path: &FirstPath) -> Option<Permutation> {
        let Some(c) = Self::target_cell(cells) else {
            let g = Self::leaf_map(&path.leaf, cells);
            return self.is_automorphism(&g).then_some(g);
        };
        if depth >= path.targets.len() || c != path.targets[depth] {
            return None;
        }
        for &u in &cells[c] {
            let (next, trace) = self.individualise(cells, c, u);
            if trace != path.traces[depth + 1] {
                continue;
            }
            if let Some(g) = self.search(&next, depth + 1, path) {
                return Some(g);
            }
        }
        None
    }
}

struct FirstPath {
    /// Partition at each depth, after refinement.
    partitions: Vec<Cells>,
    traces: Vec<u64>,
    targets: Vec<usize>,
    chosen: Vec<usize>,
    leaf: Cells,
}

/// Automorphism group of a graph, with the default vertex bound.
pub fn graph_automorphisms(graph: &Graph) -> Result<PermGroup, AutError> {
    automorphisms_coloured(graph, None, DEFAULT_VERTEX_BOUND)
}

/// Full automorphism group of a cover; automorphisms of an antipodal cover
/// preserve its fibres, so no colouring is needed.
pub fn automorphism_group(g: &CoverGraph) -> Result<PermGroup, AutError> {
    automorphisms_coloured(g.graph(), None, DEFAULT_VERTEX_BOUND)
}

pub fn automorphism_group_bounded(g: &CoverGraph, bound: usize) -> Result<PermGroup, AutError> {
    automorphisms_coloured(g.graph(), None, bound)
}

/// Automorphisms preserving the vertex colouring, if given.
pub fn automorphisms_coloured(graph: &Graph, colours: Option<&[usize]>, bound: usize) -> Result<PermGroup, AutError> {
    let n = graph.vertex_count();
    if n > bound {
        return Err(AutError::TooLarge { vertices: n, bound });
    }
    if let Some(c) = colours {
        if c.len() != n {
            return Err(AutError::BadColouring(c.len(), n));
        }
    }
    let search = Search {
        graph,
        words: n.div_ceil(64).max(1),
    };
    let mut root: Cells = match colours {
        None => vec![(0..n).collect()],
        Some(c) => {
            let mut keys: Vec<usize> = c.to_vec();
            keys.sort_unstable();
            keys.dedup();
            keys.iter()
                .map(|&k| (0..n).filter(|&x| c[x] == k).collect())
                .collect()
        }
    };
    if n == 0 {
        return Ok(PermGroup::trivial(0));
    }
    let all: VecDeque<usize> = (0..root.len()).collect();
    let root_trace = search.refine(&mut root, all);

    let mut path = FirstPath {
        partitions: vec![root.clone()],
        traces: vec![root_trace],
        targets: vec![],
        chosen: vec![],
        leaf: vec![],
    };
    let mut cells = root;
    while let Some(c) = Search::target_cell(&cells) {
        let v = *cells[c].iter().min().expect("non-empty cell");
        let (next, trace) = search.individualise(&cells, c, v);
        path.targets.push(c);
        path.chosen.push(v);
        path.partitions.push(next.clone());
        path.traces.push(trace);
        cells = next;
    }
    path.leaf = cells;

    let mut gens: Vec<Permutation> = Vec::new();
    for depth in (0..path.targets.len()).rev() {
        let c = path.targets[depth];
        let v = path.chosen[depth];
        let parent = &path.partitions[depth];
        let mut failed: Vec<usize> = Vec::new();
        for &w in &parent[c] {
            if w == v {
                continue;
            }
            let orbs = orbits_of(n, &gens);
            let orbit_of = |x: usize| orbs.iter().position(|o| o.binary_search(&x).is_ok());
            let ow = orbit_of(w);
            if ow == orbit_of(v) || failed.iter().any(|&f| orbit_of(f) == ow) {
                continue;
            }
            let (next, trace) = search.individualise(parent, c, w);
            let found = if trace == path.traces[depth + 1] {
                search.search(&next, depth + 1, &path)
            } else {
                None
            };
            match found {
                Some(g) => gens.push(g),
                None => failed.push(w),
            }
        }
    }
    Ok(PermGroup::new(n, gens).expect("generators have degree n"))
}

/// Isomorphism test for connected graphs: in the disjoint union, some
/// automorphism must move a vertex of the first copy into the second.
pub fn are_isomorphic(a: &Graph, b: &Graph) -> Result<bool, AutError> {
    let n = a.vertex_count();
    if n != b.vertex_count() || a.edge_count() != b.edge_count() {
        return Ok(false);
    }
    if n == 0 {
        return Ok(true);
    }
    let mut union = Graph::new(2 * n);
    for (u, v) in a.edges() {
        union.add_edge(u, v);
    }
    for (u, v) in b.edges() {
        union.add_edge(n + u, n + v);
    }
    let group = automorphisms_coloured(&union, None, 2 * DEFAULT_VERTEX_BOUND)?;
    Ok(group.orbit(0).iter().any(|&x| x >= n))
}

/// Isomorphism of covers as graphs.
pub fn covers_isomorphic(a: &CoverGraph, b: &CoverGraph) -> Result<bool, AutError> {
    are_isomorphic(a.graph(), b.graph())
}
