//! Bitset graphs, covers of complete graphs and their verification.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canonical::to_canonical_string;
use crate::params::{CoverParams, Surd};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed cover: {0}")]
    Structural(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("expected diameter 3, found {0}")]
    Diameter(usize),
    #[error("vertex {vertex} has eccentricity {eccentricity}, expected 3")]
    Eccentricity { vertex: usize, eccentricity: usize },
    #[error("distance-3 relation is not transitive: d({0},{1}) = d({1},{2}) = 3 but d({0},{2}) ≠ 3")]
    NotAntipodal(usize, usize, usize),
    #[error("invalid cover file: {0}")]
    Parse(String),
}

/// Simple undirected graph on `0..n` with bitset adjacency rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    rows: Vec<u64>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Graph {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            rows: vec![0; n * words],
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Graph::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// Adds `{u, v}`; loops are ignored.
    pub fn add_edge(&mut self, u: usize, v: usize) {
        if u == v {
            return;
        }
        self.rows[u * self.words + v / 64] |= 1 << (v % 64);
        self.rows[v * self.words + u / 64] |= 1 << (u % 64);
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) {
        self.rows[u * self.words + v / 64] &= !(1 << (v % 64));
        self.rows[v * self.words + u / 64] &= !(1 << (u % 64));
    }

    pub fn toggle_edge(&mut self, u: usize, v: usize) {
        if self.has_edge(u, v) {
            self.remove_edge(u, v);
        } else {
            self.add_edge(u, v);
        }
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }

    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(v).iter().enumerate().flat_map(|(w, &bits)| {
            let mut bits = bits;
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.row(v).iter().map(|w| w.count_ones() as usize).sum()
    }

    /// `|N(u) ∩ N(v)|`.
    pub fn common_neighbours(&self, u: usize, v: usize) -> usize {
        self.row(u)
            .iter()
            .zip(self.row(v))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.n).map(|v| self.degree(v)).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.neighbours(u).filter(move |&v| v > u).map(move |v| (u, v)))
            .collect()
    }

    /// BFS distances from `s`; `None` for unreachable vertices.
    pub fn distances_from(&self, s: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        // bit-parallel BFS: the next frontier is the union of frontier rows
        let mut visited = vec![0u64; self.words];
        let mut frontier = vec![0u64; self.words];
        visited[s / 64] |= 1 << (s % 64);
        frontier[s / 64] |= 1 << (s % 64);
        dist[s] = Some(0);
        let mut d = 0;
        loop {
            let mut next = vec![0u64; self.words];
            for (w, &bits) in frontier.iter().enumerate() {
                let mut bits = bits;
                while bits != 0 {
                    let x = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for (nw, rw) in next.iter_mut().zip(self.row(x)) {
                        *nw |= rw;
                    }
                }
            }
            let mut any = false;
            d += 1;
            for (w, (nw, vw)) in next.iter_mut().zip(visited.iter_mut()).enumerate() {
                *nw &= !*vw;
                *vw |= *nw;
                let mut bits = *nw;
                any |= bits != 0;
                while bits != 0 {
                    dist[w * 64 + bits.trailing_zeros() as usize] = Some(d);
                    bits &= bits - 1;
                }
            }
            if !any {
                return dist;
            }
            frontier = next;
        }
    }

    /// BFS layers `Γ_0(s), Γ_1(s), …`.
    pub fn bfs_layers(&self, s: usize) -> Result<Vec<Vec<usize>>, GraphError> {
        let dist = self.distances_from(s);
        let mut layers: Vec<Vec<usize>> = Vec::new();
        for (v, d) in dist.into_iter().enumerate() {
            let d = d.ok_or(GraphError::Disconnected)?;
            if layers.len() <= d {
                layers.resize(d + 1, Vec::new());
            }
            layers[d].push(v);
        }
        Ok(layers)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// All-pairs distances as a row-major matrix; requires connectivity.
    pub fn distance_matrix(&self) -> Result<DistanceMatrix, GraphError> {
        let rows: Vec<Vec<u8>> = (0..self.n)
            .into_par_iter()
            .map(|s| {
                self.distances_from(s)
                    .into_iter()
                    .map(|d| d.map(|d| d.min(u8::MAX as usize) as u8).ok_or(GraphError::Disconnected))
                    .collect::<Result<Vec<u8>, _>>()
            })
            .collect::<Result<_, _>>()?;
        Ok(DistanceMatrix {
            n: self.n,
            data: rows.concat(),
        })
    }

    /// Image of the graph under a vertex relabelling `v ↦ perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        let mut g = Graph::new(self.n);
        for (u, v) in self.edges() {
            g.add_edge(perm[u], perm[v]);
        }
        g
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<u8>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, u: usize, v: usize) -> usize {
        self.data[u * self.n + v] as usize
    }

    pub fn diameter(&self) -> usize {
        self.data.iter().copied().max().unwrap_or(0) as usize
    }
}

/// A graph with a partition of its vertices into fibres.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverGraph {
    graph: Graph,
    fibres: Vec<Vec<usize>>,
    fibre_of: Vec<usize>,
}

impl CoverGraph {
    /// Validates the partition (n ≥ 3 blocks, all of size r ≥ 2) and sorts
    /// fibres internally and by their minimum element.
    pub fn new(graph: Graph, mut fibres: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        let v = graph.vertex_count();
        let mut fibre_of = vec![usize::MAX; v];
        for f in fibres.iter_mut() {
            f.sort_unstable();
        }
        fibres.sort_by_key(|f| f.first().copied().unwrap_or(usize::MAX));
        for (i, f) in fibres.iter().enumerate() {
            for &x in f {
                if x >= v {
                    return Err(GraphError::Structural(format!("vertex {x} out of range 0..{v}")));
                }
                if fibre_of[x] != usize::MAX {
                    return Err(GraphError::Structural(format!("vertex {x} lies in two fibres")));
                }
                fibre_of[x] = i;
            }
        }
        if let Some(x) = fibre_of.iter().position(|&f| f == usize::MAX) {
            return Err(GraphError::Structural(format!("vertex {x} lies in no fibre")));
        }
        if fibres.len() < 3 {
            return Err(GraphError::Structural(format!(
                "need at least 3 fibres, got {}",
                fibres.len()
            )));
        }
        let r = fibres[0].len();
        if r < 2 || fibres.iter().any(|f| f.len() != r) {
            return Err(GraphError::Structural(
                "fibres must all have the same size r ≥ 2".into(),
            ));
        }
        Ok(CoverGraph {
            graph,
            fibres,
            fibre_of,
        })
    }

    pub fn from_edges(v: usize, edges: &[(usize, usize)], fibres: Vec<Vec<usize>>) -> Result<Self, GraphError> {
        for &(a, b) in edges {
            if a >= v || b >= v || a == b {
                return Err(GraphError::Structural(format!("bad edge ({a}, {b})")));
            }
        }
        CoverGraph::new(Graph::from_edges(v, edges), fibres)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_mut(&mut self) -> &mut Graph {
        &mut self.graph
    }

    pub fn fibres(&self) -> &[Vec<usize>] {
        &self.fibres
    }

    pub fn fibre_of(&self, v: usize) -> usize {
        self.fibre_of[v]
    }

    /// Number of fibres.
    pub fn n(&self) -> usize {
        self.fibres.len()
    }

    /// Fibre size.
    pub fn r(&self) -> usize {
        self.fibres[0].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    /// The unique neighbour of `x` in fibre `f`, if exactly one exists.
    pub fn matched(&self, x: usize, f: usize) -> Option<usize> {
        let mut it = self.fibres[f].iter().copied().filter(|&y| self.graph.has_edge(x, y));
        let first = it.next()?;
        it.next().is_none().then_some(first)
    }

    pub fn to_file(&self) -> CoverFile {
        CoverFile {
            edges: self.graph.edges().into_iter().map(|(u, v)| [u, v]).collect(),
            fibres: self.fibres.clone(),
            v: self.vertex_count(),
        }
    }

    /// Canonical compact JSON.
    pub fn to_json(&self) -> String {
        to_canonical_string(&self.to_file()).expect("cover serialises")
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let file: CoverFile = serde_json::from_str(text).map_err(|e| GraphError::Parse(e.to_string()))?;
        file.into_cover()
    }
}

/// On-disk cover format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverFile {
    pub edges: Vec<[usize; 2]>,
    pub fibres: Vec<Vec<usize>>,
    pub v: usize,
}

impl CoverFile {
    pub fn into_cover(self) -> Result<CoverGraph, GraphError> {
        let edges: Vec<(usize, usize)> = self.edges.iter().map(|e| (e[0], e[1])).collect();
        CoverGraph::from_edges(self.v, &edges, self.fibres)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Connectivity,
    FibreCoclique,
    PerfectMatching,
    ConstantMu,
    ConstantLambda,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub axiom: Axiom,
    /// Vertices (or fibre indices, for matching failures) witnessing it.
    pub witness: Vec<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverReport {
    pub is_cover: bool,
    pub n: usize,
    pub r: usize,
    /// Most frequent common-neighbour count on non-adjacent cross-fibre pairs.
    pub mu: Option<usize>,
    /// `n − (r−1)μ − 2` when non-negative, else the most frequent count on edges.
    pub lambda: Option<usize>,
    /// At most `cap` witnesses per axiom.
    pub failures: Vec<Violation>,
    /// Total number of violations per axiom, including those not listed.
    pub failure_counts: BTreeMap<Axiom, usize>,
    pub antipodality_confirmed: bool,
    pub diameter: Option<usize>,
}

impl CoverReport {
    pub fn failed_axioms(&self) -> Vec<Axiom> {
        self.failure_counts.keys().copied().collect()
    }
}

#[derive(Default)]
struct Collector {
    cap: usize,
    failures: Vec<Violation>,
    counts: BTreeMap<Axiom, usize>,
}

impl Collector {
    fn push(&mut self, axiom: Axiom, witness: Vec<usize>, detail: String) {
        let c = self.counts.entry(axiom).or_insert(0);
        *c += 1;
        if *c <= self.cap {
            self.failures.push(Violation { axiom, witness, detail });
        }
    }
}

/// Most frequent value of a histogram, ties broken towards the smaller value.
fn mode(hist: &BTreeMap<usize, usize>) -> Option<usize> {
    hist.iter()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&k, _)| k)
}

/// Checks the cover axioms with up to 10 witnesses per axiom.
pub fn verify_cover(g: &CoverGraph) -> CoverReport {
    verify_cover_capped(g, 10)
}

/// Checks, in order: connectivity, fibres are cocliques, any two fibres
/// induce a perfect matching, constant `μ ≥ 1` on non-adjacent pairs in
/// distinct fibres, constant `λ = n − (r−1)μ − 2` on adjacent pairs.
pub fn verify_cover_capped(g: &CoverGraph, cap: usize) -> CoverReport {
    let graph = &g.graph;
    let v = g.vertex_count();
    let (n, r) = (g.n(), g.r());
    let mut out = Collector {
        cap,
        ..Default::default()
    };

    let dist0 = graph.distances_from(0);
    if let Some(x) = dist0.iter().position(Option::is_none) {
        out.push(Axiom::Connectivity, vec![0, x], format!("no path from 0 to {x}"));
    }

    for f in &g.fibres {
        for (i, &a) in f.iter().enumerate() {
            for &b in &f[i + 1..] {
                if graph.has_edge(a, b) {
                    out.push(
                        Axiom::FibreCoclique,
                        vec![a, b],
                        format!("edge {a}–{b} inside fibre {}", g.fibre_of(a)),
                    );
                }
            }
        }
    }

    let matching: Vec<(usize, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut bad = Vec::new();
            for j in i + 1..n {
                let ok_side = |from: usize, to: usize| {
                    g.fibres[from]
                        .iter()
                        .filter(|&&x| g.fibres[to].iter().filter(|&&y| graph.has_edge(x, y)).count() != 1)
                        .count()
                };
                let deviations = ok_side(i, j) + ok_side(j, i);
                if deviations > 0 {
                    bad.push((i, j, deviations));
                }
            }
            bad
        })
        .collect();
    for (i, j, dev) in matching {
        out.push(
            Axiom::PerfectMatching,
            vec![i, j],
            format!("fibres {i} and {j} do not induce a perfect matching ({dev} vertices with ≠ 1 partner)"),
        );
    }

    // common-neighbour histograms over pairs in distinct fibres
    let cross_pairs = |a: usize| (a + 1..v).filter(move |&b| g.fibre_of(a) != g.fibre_of(b));
    type Hist = BTreeMap<usize, usize>;
    let (mu_hist, lambda_hist) = (0..v)
        .into_par_iter()
        .fold(
            || (Hist::new(), Hist::new()),
            |(mut mh, mut lh), a| {
                for b in cross_pairs(a) {
                    let c = graph.common_neighbours(a, b);
                    *if graph.has_edge(a, b) { &mut lh } else { &mut mh }.entry(c).or_insert(0) += 1;
                }
                (mh, lh)
            },
        )
        .reduce(
            || (Hist::new(), Hist::new()),
            |(mut m1, mut l1), (m2, l2)| {
                for (k, c) in m2 {
                    *m1.entry(k).or_insert(0) += c;
                }
                for (k, c) in l2 {
                    *l1.entry(k).or_insert(0) += c;
                }
                (m1, l1)
            },
        );
    let mu = mode(&mu_hist);
    if mu == Some(0) {
        out.push(Axiom::ConstantMu, vec![], "μ = 0 on non-adjacent pairs".into());
    }
    let lambda_expected = mu.map(|m| n as isize - (r as isize - 1) * m as isize - 2);
    let lambda = match lambda_expected {
        Some(l) if l >= 0 => Some(l as usize),
        _ => mode(&lambda_hist),
    };
    let mu_bad = mu_hist.keys().any(|&k| Some(k) != mu);
    let lambda_bad = lambda_hist.keys().any(|&k| Some(k) != lambda);
    if mu_bad || lambda_bad {
        for a in 0..v {
            for b in cross_pairs(a) {
                let c = graph.common_neighbours(a, b);
                if graph.has_edge(a, b) {
                    if Some(c) != lambda {
                        out.push(
                            Axiom::ConstantLambda,
                            vec![a, b],
                            format!("adjacent {a}, {b} have {c} common neighbours, expected {lambda:?}"),
                        );
                    }
                } else if Some(c) != mu {
                    out.push(
                        Axiom::ConstantMu,
                        vec![a, b],
                        format!("non-adjacent {a}, {b} have {c} common neighbours, expected {mu:?}"),
                    );
                }
            }
        }
    }
    if let Some(l) = lambda_expected {
        if l < 0 {
            out.push(
                Axiom::ConstantLambda,
                vec![],
                format!("n − (r−1)μ − 2 = {l} is negative"),
            );
        }
    }

    let (antipodality_confirmed, diameter) = if dist0.iter().all(Option::is_some) {
        let per_vertex: Vec<(bool, usize)> = (0..v)
            .into_par_iter()
            .map(|x| {
                let d = graph.distances_from(x);
                let ecc = d.iter().map(|d| d.unwrap_or(0)).max().unwrap_or(0);
                let far: Vec<usize> = (0..v).filter(|&y| d[y] == Some(3)).collect();
                let mut mates: Vec<usize> = g.fibres[g.fibre_of(x)].iter().copied().filter(|&y| y != x).collect();
                mates.sort_unstable();
                (far == mates, ecc)
            })
            .collect();
        (
            per_vertex.iter().all(|p| p.0),
            per_vertex.iter().map(|p| p.1).max(),
        )
    } else {
        (false, None)
    };

    let is_cover = out.counts.is_empty();
    CoverReport {
        is_cover,
        n,
        r,
        mu,
        lambda,
        failures: out.failures,
        failure_counts: out.counts,
        antipodality_confirmed,
        diameter,
    }
}

/// BFS layers `Γ_0(v), …, Γ_3(v)`; errors unless the eccentricity is 3.
pub fn distance_classes(g: &CoverGraph, v: usize) -> Result<Vec<Vec<usize>>, GraphError> {
    let layers = g.graph.bfs_layers(v)?;
    if layers.len() != 4 {
        return Err(GraphError::Eccentricity {
            vertex: v,
            eccentricity: layers.len() - 1,
        });
    }
    Ok(layers)
}

/// Classes of the relation "equal or at distance 3" for a connected graph of
/// diameter 3, sorted by minimum element.
pub fn antipodal_classes(g: &Graph) -> Result<Vec<Vec<usize>>, GraphError> {
    let dm = g.distance_matrix()?;
    let diam = dm.diameter();
    if diam != 3 {
        return Err(GraphError::Diameter(diam));
    }
    let v = g.vertex_count();
    let class = |x: usize| -> Vec<usize> { (0..v).filter(|&y| y == x || dm.get(x, y) == 3).collect() };
    let mut seen = vec![false; v];
    let mut classes = Vec::new();
    for x in 0..v {
        if seen[x] {
            continue;
        }
        let cx = class(x);
        for &y in &cx {
            if y == x {
                continue;
            }
            if let Some(&z) = class(y).iter().find(|&&z| z != x && dm.get(x, z) != 3) {
                return Err(GraphError::NotAntipodal(x, y, z));
            }
        }
        for &y in &cx {
            seen[y] = true;
        }
        classes.push(cx);
    }
    Ok(classes)
}

/// Wraps a graph with its antipodal classes as fibres.
pub fn cover_from_antipodal(g: Graph) -> Result<CoverGraph, GraphError> {
    let fibres = antipodal_classes(&g)?;
    CoverGraph::new(g, fibres)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumReport {
    pub holds: bool,
    /// `(A − θI)(A − τI)(A + I)(A − kI) = 0` exactly.
    pub minimal_polynomial_vanishes: bool,
    /// `tr(A^j)` for `j = 0..=3` from the graph.
    pub traces: [i128; 4],
    /// Power sums of the model spectrum; `None` when not integral.
    pub model_traces: [Option<i128>; 4],
    pub failures: Vec<String>,
}

/// Exact check that `g` has the four-eigenvalue spectrum predicted by `p`.
///
/// Since `θ + τ = λ − μ` and `θτ = −(n − 1)` are integers, the quartic
/// identity is an integer matrix identity; the surds enter only through the
/// model power sums `Σ m_i x_i^j`.
pub fn spectrum_check(g: &CoverGraph, p: &CoverParams) -> SpectrumReport {
    let mut failures = Vec::new();
    let graph = &g.graph;
    let v = g.vertex_count();
    let k = p.n as i128 - 1;
    if v as u64 != p.v || g.n() as u64 != p.n || g.r() as u64 != p.r {
        failures.push(format!(
            "shape mismatch: graph has (n, r, v) = ({}, {}, {v}), parameters ({}, {}, {})",
            g.n(),
            g.r(),
            p.n,
            p.r,
            p.v
        ));
    }
    let sum = (p.theta.clone() + p.tau.clone()).to_integer();
    let prod = (p.theta.clone() * p.tau.clone()).to_integer();

    let traces = [
        v as i128,
        0,
        (0..v).map(|x| graph.degree(x) as i128).sum(),
        (0..v)
            .into_par_iter()
            .map(|x| graph.neighbours(x).map(|y| graph.common_neighbours(x, y) as i128).sum::<i128>())
            .sum(),
    ];
    let eig = [
        (Surd::integer(k), Surd::integer(1)),
        (p.theta.clone(), p.m_theta.clone()),
        (Surd::integer(-1), Surd::integer(p.n as i128 - 1)),
        (p.tau.clone(), p.m_tau.clone()),
    ];
    let mut model_traces = [None; 4];
    for (j, slot) in model_traces.iter_mut().enumerate() {
        let s = eig
            .iter()
            .fold(Surd::integer(0), |acc, (x, m)| acc + m.clone() * x.pow(j as u32));
        *slot = s.to_integer();
        if *slot != Some(traces[j]) {
            failures.push(format!(
                "tr(A^{j}) = {} but the model spectrum gives {s}",
                traces[j]
            ));
        }
    }

    let minimal_polynomial_vanishes = match (sum, prod, failures.is_empty()) {
        (Some(s), Some(pr), true) => {
            let ok = quartic_vanishes(graph, s, pr, k);
            if !ok {
                failures.push("(A − θI)(A − τI)(A + I)(A − kI) ≠ 0".into());
            }
            ok
        }
        (None, _, _) | (_, None, _) => {
            failures.push("θ + τ or θτ is not an integer".into());
            false
        }
        _ => false,
    };
    SpectrumReport {
        holds: failures.is_empty(),
        minimal_polynomial_vanishes,
        traces,
        model_traces,
        failures,
    }
}

/// Evaluates `(A² − sA + pI)(A + I)(A − kI)` row by row and tests for zero.
fn quartic_vanishes(graph: &Graph, s: i128, pr: i128, k: i128) -> bool {
    let v = graph.vertex_count();
    let adj: Vec<Vec<usize>> = (0..v).map(|x| graph.neighbours(x).collect()).collect();
    // row · A for a dense integer row
    let times_a = |row: &[i128]| -> Vec<i128> {
        let mut out = vec![0i128; v];
        for (l, &c) in row.iter().enumerate() {
            if c != 0 {
                for &j in &adj[l] {
                    out[j] += c;
                }
            }
        }
        out
    };
    (0..v).into_par_iter().all(|i| {
        // e_i · (A² − sA + pI)
        let mut e = vec![0i128; v];
        e[i] = 1;
        let a1 = times_a(&e);
        let a2 = times_a(&a1);
        let b: Vec<i128> = (0..v).map(|j| a2[j] - s * a1[j] + pr * e[j]).collect();
        let ba = times_a(&b);
        let c: Vec<i128> = (0..v).map(|j| ba[j] + b[j]).collect();
        let ca = times_a(&c);
        (0..v).all(|j| ca[j] - k * c[j] == 0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn hexagon() -> CoverGraph {
        let edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        CoverGraph::from_edges(6, &edges, vec![vec![0, 3], vec![1, 4], vec![2, 5]]).unwrap()
    }

    fn cube() -> CoverGraph {
        let mut edges = vec![];
        for x in 0..8usize {
            for b in 0..3 {
                let y = x ^ (1 << b);
                if x < y {
                    edges.push((x, y));
                }
            }
        }
        CoverGraph::from_edges(8, &edges, vec![vec![0, 7], vec![1, 6], vec![2, 5], vec![3, 4]]).unwrap()
    }

    #[test]
    fn hexagon_is_a_cover() {
        let rep = verify_cover(&hexagon());
        assert!(rep.is_cover, "{rep:?}");
        assert_eq!((rep.n, rep.r, rep.mu, rep.lambda), (3, 2, Some(1), Some(0)));
        assert!(rep.antipodality_confirmed);
        assert_eq!(rep.diameter, Some(3));
    }

    #[test]
    fn cube_is_a_cover() {
        let rep = verify_cover(&cube());
        assert!(rep.is_cover);
        assert_eq!((rep.n, rep.r, rep.mu, rep.lambda), (4, 2, Some(2), Some(0)));
    }

    #[test]
    fn deleted_edge_breaks_matching() {
        let mut g = hexagon();
        g.graph_mut().remove_edge(0, 1);
        let rep = verify_cover(&g);
        assert!(!rep.is_cover);
        let m = rep
            .failures
            .iter()
            .find(|f| f.axiom == Axiom::PerfectMatching)
            .expect("matching failure");
        assert_eq!(m.witness, vec![0, 1]);
    }

    #[test]
    fn structural_errors() {
        let g = Graph::new(6);
        assert!(matches!(
            CoverGraph::new(g.clone(), vec![vec![0, 1], vec![2, 3]]),
            Err(GraphError::Structural(_))
        ));
        assert!(CoverGraph::new(g.clone(), vec![vec![0, 1, 2], vec![3, 4], vec![5]]).is_err());
        assert!(CoverGraph::new(g, vec![vec![0, 1], vec![1, 2], vec![3, 4, 5]]).is_err());
    }

    #[test]
    fn layers() {
        let sizes = |g: &CoverGraph, v| {
            distance_classes(g, v).unwrap().iter().map(Vec::len).collect::<Vec<_>>()
        };
        assert_eq!(sizes(&hexagon(), 0), vec![1, 2, 2, 1]);
        assert_eq!(sizes(&cube(), 0), vec![1, 3, 3, 1]);
    }

    #[test]
    fn antipodal_classes_of_small_graphs() {
        assert_eq!(
            antipodal_classes(hexagon().graph()).unwrap(),
            vec![vec![0, 3], vec![1, 4], vec![2, 5]]
        );
        assert_eq!(
            antipodal_classes(cube().graph()).unwrap(),
            vec![vec![0, 7], vec![1, 6], vec![2, 5], vec![3, 4]]
        );
        let mut petersen = Graph::new(10);
        for i in 0..5 {
            petersen.add_edge(i, (i + 1) % 5);
            petersen.add_edge(i, i + 5);
            petersen.add_edge(5 + i, 5 + (i + 2) % 5);
        }
        assert_eq!(antipodal_classes(&petersen), Err(GraphError::Diameter(2)));
        // heptagon: d(0,3) = d(3,6) = 3 but 0 ~ 6
        let c7 = Graph::from_edges(7, &(0..7).map(|i| (i, (i + 1) % 7)).collect::<Vec<_>>());
        assert_eq!(antipodal_classes(&c7), Err(GraphError::NotAntipodal(0, 3, 6)));
    }

    #[test]
    fn exact_spectrum() {
        assert!(spectrum_check(&hexagon(), &derive_params(3, 2, 1).unwrap()).holds);
        assert!(spectrum_check(&cube(), &derive_params(4, 2, 2).unwrap()).holds);
        assert!(!spectrum_check(&cube(), &derive_params(3, 2, 1).unwrap()).holds);
    }

    #[test]
    fn json_round_trip_is_canonical() {
        let g = hexagon();
        let text = g.to_json();
        assert_eq!(
            text,
            "{\"edges\":[[0,1],[0,5],[1,2],[2,3],[3,4],[4,5]],\"fibres\":[[0,3],[1,4],[2,5]],\"v\":6}\n"
        );
        let back = CoverGraph::from_json(
            "{\"v\":6,\"fibres\":[[5,2],[3,0],[4,1]],\"edges\":[[1,0],[5,0],[2,1],[3,2],[4,3],[5,4]]}",
        )
        .unwrap();
        assert_eq!(back.to_json(), text);
        assert!(CoverGraph::from_json("{\"v\":3}").is_err());
    }
}
