//! Group structure of covers: the covering group, the induced action on
//! fibres, arc orbits, quotient covers, displacement profiles and audits of
//! the fixed-point and subdegree identities.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::Serialize;
use thiserror::Error;

use crate::graph::{verify_cover, CoverGraph, Graph, GraphError};
use crate::numtheory::factorize;
use crate::params::{derive_params, CoverParams};
use crate::perm::{PermError, PermGroup, Permutation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("permutation has degree {found}, expected {expected}")]
    Degree { expected: usize, found: usize },
    #[error("not an automorphism: edge ({0}, {1}) is not preserved")]
    NotAutomorphism(usize, usize),
    #[error("vertex {0} is moved out of its fibre")]
    NotFibreFixing(usize),
    #[error("subgroup of order {order} does not give a proper quotient of an {r}-cover")]
    QuotientOrder { order: u64, r: usize },
    #[error("element has order {0}, not 2")]
    NotInvolution(u64),
    #[error("input is not a cover: {0}")]
    NotACover(String),
    #[error(transparent)]
    Perm(#[from] PermError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Outcome of one audited identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AuditStatus {
    Pass,
    Fail,
    NotApplicable,
    NotChecked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditItem {
    pub audit: String,
    pub item: String,
    pub status: AuditStatus,
    pub witness: String,
}

impl AuditItem {
    fn new(audit: &str, item: &str, status: AuditStatus, witness: impl Into<String>) -> Self {
        AuditItem {
            audit: audit.into(),
            item: item.into(),
            status,
            witness: witness.into(),
        }
    }

    fn check(audit: &str, item: &str, ok: bool, witness: impl Into<String>) -> Self {
        let status = if ok { AuditStatus::Pass } else { AuditStatus::Fail };
        Self::new(audit, item, status, witness)
    }
}

/// True when no item failed.
pub fn audit_passed(items: &[AuditItem]) -> bool {
    items.iter().all(|i| i.status != AuditStatus::Fail)
}

fn check_degree(g: &CoverGraph, x: &Permutation) -> Result<(), AnalysisError> {
    if x.degree() != g.vertex_count() {
        return Err(AnalysisError::Degree {
            expected: g.vertex_count(),
            found: x.degree(),
        });
    }
    Ok(())
}

/// Checks that `x` maps edges to edges.
pub fn check_automorphism(g: &CoverGraph, x: &Permutation) -> Result<(), AnalysisError> {
    check_degree(g, x)?;
    let graph = g.graph();
    for u in 0..graph.vertex_count() {
        for w in graph.neighbours(u) {
            if u < w && !graph.has_edge(x.apply(u), x.apply(w)) {
                return Err(AnalysisError::NotAutomorphism(u, w));
            }
        }
    }
    Ok(())
}

fn cover_params(g: &CoverGraph) -> Result<CoverParams, AnalysisError> {
    let report = verify_cover(g);
    let mu = match (report.is_cover, report.mu) {
        (true, Some(mu)) => mu,
        _ => {
            let axioms: Vec<String> = report.failed_axioms().iter().map(|a| format!("{a:?}")).collect();
            return Err(AnalysisError::NotACover(axioms.join(", ")));
        }
    };
    derive_params(g.n() as u64, g.r() as u64, mu as u64).map_err(|e| AnalysisError::NotACover(e.to_string()))
}

/// `t = −τ` when the parameters are `((t²−1)², r, μ)` with integral `τ`.
fn family_b_t(p: &CoverParams) -> Option<u64> {
    let t = (-p.tau.clone()).to_integer()?;
    let t = u64::try_from(t).ok()?;
    (t >= 2 && (t * t - 1) * (t * t - 1) == p.n).then_some(t)
}

fn propagate(g: &CoverGraph, x0: usize, y0: usize) -> Option<Permutation> {
    let graph = g.graph();
    let v = g.vertex_count();
    let mut img = vec![usize::MAX; v];
    img[x0] = y0;
    let mut queue = vec![x0];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        k += 1;
        for z in graph.neighbours(x) {
            let w = g.matched(img[x], g.fibre_of(z))?;
            if img[z] == usize::MAX {
                img[z] = w;
                queue.push(z);
            } else if img[z] != w {
                return None;
            }
        }
    }
    if queue.len() != v || (0..v).any(|x| g.fibre_of(img[x]) != g.fibre_of(x)) {
        return None;
    }
    let p = Permutation::from_usize(&img).ok()?;
    check_automorphism(g, &p).ok()?;
    Some(p)
}

/// Every automorphism fixing each fibre setwise, sorted.
///
/// In a connected cover such a map is fixed by the image of one vertex: a
/// neighbour of `x` in fibre `F` must go to the neighbour of `x`'s image in
/// `F`. So there are at most `r` of them.
pub fn fibre_fixing_automorphisms(g: &CoverGraph) -> Vec<Permutation> {
    let start = g.fibres()[g.fibre_of(0)].clone();
    let mut out: Vec<Permutation> = start.into_iter().filter_map(|y| propagate(g, 0, y)).collect();
    out.sort();
    out
}

/// Smallest generating set found greedily from a list of elements.
fn generators_of(degree: usize, elements: &[Permutation]) -> Result<PermGroup, PermError> {
    let mut group = PermGroup::trivial(degree);
    let mut gens: Vec<Permutation> = Vec::new();
    for e in elements {
        if !group.contains(e) {
            gens.push(e.clone());
            group = PermGroup::new(degree, gens.clone())?;
        }
    }
    Ok(group)
}

#[derive(Debug, Clone, Serialize)]
pub struct CoveringGroup {
    #[serde(skip)]
    pub group: PermGroup,
    #[serde(skip)]
    pub elements: Vec<Permutation>,
    pub generators: Vec<Vec<Vec<usize>>>,
    pub order: u64,
    pub is_abelian: bool,
    /// No nonidentity element fixes a vertex.
    pub semiregular: bool,
    /// Transitive, hence regular, on every fibre.
    pub regular_on_fibres: bool,
    /// Abelian and regular on each fibre.
    pub abelian_cover: bool,
}

/// The kernel of the action on fibres, of `group` if given and otherwise of
/// the full automorphism group.
pub fn covering_group(g: &CoverGraph, group: Option<&PermGroup>) -> Result<CoveringGroup, AnalysisError> {
    let mut elements = fibre_fixing_automorphisms(g);
    if let Some(h) = group {
        elements.retain(|e| h.contains(e));
    }
    let k = generators_of(g.vertex_count(), &elements)?;
    let semiregular = elements.iter().all(|e| e.is_identity() || e.fixed_points().is_empty());
    let order = elements.len() as u64;
    let regular_on_fibres = semiregular && order == g.r() as u64;
    let is_abelian = k.is_abelian();
    Ok(CoveringGroup {
        generators: k.generators().iter().map(|p| p.cycles()).collect(),
        group: k,
        elements,
        order,
        is_abelian,
        semiregular,
        regular_on_fibres,
        abelian_cover: is_abelian && regular_on_fibres,
    })
}

/// The permutation of fibre indices induced by a fibre-preserving map.
pub fn induced_on_fibres(g: &CoverGraph, x: &Permutation) -> Permutation {
    let images: Vec<usize> = g.fibres().iter().map(|f| g.fibre_of(x.apply(f[0]))).collect();
    Permutation::from_usize(&images).expect("automorphisms permute fibres")
}

#[derive(Debug, Clone, Serialize)]
pub struct FibreAction {
    #[serde(skip)]
    pub group: PermGroup,
    pub degree: usize,
    pub order: String,
    pub transitive: bool,
    /// Number of orbits of a fibre stabilizer; only for transitive actions.
    pub rank: Option<usize>,
    /// Suborbit lengths of fibre 0, starting with 1.
    pub subdegrees: Vec<usize>,
}

/// The group induced by `group` on the set of fibres.
pub fn fibre_action(g: &CoverGraph, group: &PermGroup) -> Result<FibreAction, AnalysisError> {
    let gens: Vec<Permutation> = group.generators().iter().map(|x| induced_on_fibres(g, x)).collect();
    let h = PermGroup::new(g.n(), gens)?;
    let transitive = h.is_transitive();
    let subdegrees = if transitive {
        let mut s: Vec<usize> = h.suborbits(0).iter().map(Vec::len).collect();
        s[1..].sort_unstable();
        s
    } else {
        Vec::new()
    };
    Ok(FibreAction {
        degree: g.n(),
        order: h.order().to_string(),
        transitive,
        rank: transitive.then_some(subdegrees.len()),
        subdegrees,
        group: h,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct ArcOrbitReport {
    pub arcs: usize,
    pub orbits: usize,
    pub fibre_rank: Option<usize>,
    /// Vertex-transitive, and containing a covering group of order `r`.
    pub hypotheses_hold: bool,
    pub hypotheses_detail: String,
    /// `orbits = rank − 1`, when the hypotheses hold.
    pub identity_holds: Option<bool>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Number of orbits of `group` on ordered adjacent pairs.
pub fn arc_orbit_count(g: &CoverGraph, group: &PermGroup) -> Result<ArcOrbitReport, AnalysisError> {
    let graph = g.graph();
    let v = g.vertex_count();
    let nbrs: Vec<Vec<usize>> = (0..v).map(|u| graph.neighbours(u).collect()).collect();
    let mut offset = vec![0usize; v + 1];
    for u in 0..v {
        offset[u + 1] = offset[u] + nbrs[u].len();
    }
    let arcs = offset[v];
    let arc_id = |a: usize, b: usize| offset[a] + nbrs[a].binary_search(&b).expect("image of an arc is an arc");
    let mut parent: Vec<usize> = (0..arcs).collect();
    for x in group.generators() {
        check_automorphism(g, x)?;
        for u in 0..v {
            for (i, &w) in nbrs[u].iter().enumerate() {
                let a = find(&mut parent, offset[u] + i);
                let b = find(&mut parent, arc_id(x.apply(u), x.apply(w)));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let orbits = (0..arcs).filter(|&a| find(&mut parent, a) == a).count();

    let fa = fibre_action(g, group)?;
    let k_full = fibre_fixing_automorphisms(g).len();
    let k_in = covering_group(g, Some(group))?.order as usize;
    let transitive = group.is_transitive();
    let hypotheses_hold = transitive && k_full == g.r() && k_in == g.r();
    let hypotheses_detail = format!(
        "vertex-transitive: {transitive}; |K| = {k_full}; |K ∩ G| = {k_in}; r = {}",
        g.r()
    );
    let identity_holds = match (hypotheses_hold, fa.rank) {
        (true, Some(rank)) => Some(orbits + 1 == rank),
        _ => None,
    };
    Ok(ArcOrbitReport {
        arcs,
        orbits,
        fibre_rank: fa.rank,
        hypotheses_hold,
        hypotheses_detail,
        identity_holds,
    })
}

/// The graph on `sub`-orbits, two orbits adjacent when an edge joins them.
///
/// `sub` must consist of fibre-fixing automorphisms and have order below
/// `r`. Orbits are numbered by least vertex.
pub fn quotient_cover(g: &CoverGraph, sub: &PermGroup) -> Result<CoverGraph, AnalysisError> {
    for x in sub.generators() {
        check_automorphism(g, x)?;
        if let Some(u) = (0..g.vertex_count()).find(|&u| g.fibre_of(x.apply(u)) != g.fibre_of(u)) {
            return Err(AnalysisError::NotFibreFixing(u));
        }
    }
    let order = sub.order_u64().unwrap_or(u64::MAX);
    if order >= g.r() as u64 || !(g.r() as u64).is_multiple_of(order) {
        return Err(AnalysisError::QuotientOrder { order, r: g.r() });
    }
    let orbits = sub.orbits();
    let mut id = vec![0usize; g.vertex_count()];
    for (i, o) in orbits.iter().enumerate() {
        for &x in o {
            id[x] = i;
        }
    }
    let mut q = Graph::new(orbits.len());
    for (a, b) in g.graph().edges() {
        q.add_edge(id[a], id[b]);
    }
    let fibres: Vec<Vec<usize>> = g
        .fibres()
        .iter()
        .map(|f| f.iter().map(|&x| id[x]).collect::<BTreeSet<_>>().into_iter().collect())
        .collect();
    Ok(CoverGraph::new(q, fibres)?)
}

/// Distance between two vertices of a cover: 0, 1, 3 within a fibre, else 2.
fn cover_distance(g: &CoverGraph, x: usize, y: usize) -> usize {
    if x == y {
        0
    } else if g.graph().has_edge(x, y) {
        1
    } else if g.fibre_of(x) == g.fibre_of(y) {
        3
    } else {
        2
    }
}

/// `α_i(x)`, the number of vertices moved to distance `i`, for `i = 0..=3`.
///
/// Distances use the cover structure (fibres are the antipodal classes of a
/// diameter-3 graph), so `g` is assumed to be a cover.
pub fn displacement_profile(g: &CoverGraph, x: &Permutation) -> Result<[usize; 4], AnalysisError> {
    check_degree(g, x)?;
    let mut alpha = [0usize; 4];
    for u in 0..g.vertex_count() {
        alpha[cover_distance(g, u, x.apply(u))] += 1;
    }
    Ok(alpha)
}

#[derive(Debug, Clone, Serialize)]
pub struct InvolutionAudit {
    pub fixed_vertices: Vec<usize>,
    /// Fixed vertices per fibre meeting the fixed set.
    pub f: usize,
    /// Number of fibres mapped to themselves.
    pub l: usize,
    pub profile: [usize; 4],
    pub items: Vec<AuditItem>,
}

/// Fixed-subgraph identities for an involutory automorphism.
///
/// The equalities (regularity of the fixed subgraph, its order, the
/// displacement counts) are checked on every cover. Items stated in terms of
/// `t = −τ` are checked only when the parameters are `((t²−1)², r, μ)`.
pub fn involution_audit(g: &CoverGraph, x: &Permutation) -> Result<InvolutionAudit, AnalysisError> {
    const A: &str = "involution";
    check_automorphism(g, x)?;
    if x.order() != 2 {
        return Err(AnalysisError::NotInvolution(x.order()));
    }
    let p = cover_params(g)?;
    let t = family_b_t(&p);
    let graph = g.graph();
    let (n, r) = (g.n(), g.r());
    let (lambda, mu) = (p.lambda as usize, p.mu as usize);
    let profile = displacement_profile(g, x)?;
    let omega = x.fixed_points();
    let fixed_fibres: Vec<usize> = (0..n).filter(|&i| g.fibre_of(x.apply(g.fibres()[i][0])) == i).collect();
    let l = fixed_fibres.len();
    let mut items = Vec::new();
    if omega.is_empty() {
        items.push(AuditItem::new(A, "fixed-set", AuditStatus::NotApplicable, "no fixed vertices; the fixed-set identities do not apply"));
        return Ok(InvolutionAudit {
            fixed_vertices: omega,
            f: 0,
            l,
            profile,
            items,
        });
    }
    let in_omega = {
        let mut m = vec![false; g.vertex_count()];
        omega.iter().for_each(|&u| m[u] = true);
        m
    };

    let mut per_fibre = vec![0usize; n];
    omega.iter().for_each(|&u| per_fibre[g.fibre_of(u)] += 1);
    let counts: BTreeSet<usize> = per_fibre.iter().copied().filter(|&c| c > 0).collect();
    let f = per_fibre[g.fibre_of(omega[0])];
    items.push(AuditItem::check(A, "f-constant", counts.len() == 1, format!("fixed points per fibre: {counts:?}")));
    items.push(AuditItem::check(
        A,
        "omega-order",
        omega.len() == l * f,
        format!("|Ω| = {}, l·f = {}", omega.len(), l * f),
    ));
    let degrees: BTreeSet<usize> = omega
        .iter()
        .map(|&u| graph.neighbours(u).filter(|&w| in_omega[w]).count())
        .collect();
    items.push(AuditItem::check(
        A,
        "omega-regular",
        degrees.len() == 1 && degrees.contains(&(l - 1)),
        format!("degrees in Ω: {degrees:?}, l − 1 = {}", l - 1),
    ));

    // X: vertices outside Ω with a neighbour in Ω
    let into_omega: Vec<usize> = (0..g.vertex_count())
        .map(|u| graph.neighbours(u).filter(|&w| in_omega[w]).count())
        .collect();
    let x_set: Vec<usize> = (0..g.vertex_count()).filter(|&u| !in_omega[u] && into_omega[u] > 0).collect();
    let [_, a1, a2, a3] = profile;
    let t_item = |item: &str, ok: bool, witness: String| match t {
        Some(_) => AuditItem::check(A, item, ok, witness),
        None => AuditItem::new(A, item, AuditStatus::NotChecked, "parameters not of the form ((t²−1)², r, μ)"),
    };
    let tv = t.unwrap_or(0) as usize;

    if l == 1 {
        items.push(AuditItem::check(A, "case1-alpha3", a3 == 0, format!("α3 = {a3}")));
        items.push(AuditItem::check(
            A,
            "case1-alpha12",
            a1 + a2 == (n - 1) * r,
            format!("α1 + α2 = {}, (n−1)r = {}", a1 + a2, (n - 1) * r),
        ));
        let fibre = &g.fibres()[g.fibre_of(omega[0])];
        items.push(AuditItem::check(A, "case1-fibre", &omega == fibre, format!("Ω = {omega:?}")));
        items.push(t_item("case1-t-even", tv.is_multiple_of(2), format!("t = {tv}")));
    } else {
        items.push(AuditItem::check(
            A,
            "case2-alpha3",
            a3 == (r - f) * l,
            format!("α3 = {a3}, (r−f)l = {}", (r - f) * l),
        ));
        items.push(AuditItem::check(
            A,
            "case2-alpha12",
            a1 + a2 == (n - l) * r,
            format!("α1 + α2 = {}, (n−l)r = {}", a1 + a2, (n - l) * r),
        ));
        let max_into = x_set.iter().map(|&u| into_omega[u]).max().unwrap_or(0);
        items.push(AuditItem::check(
            A,
            "case2-x-adjacency",
            max_into <= l,
            format!("|X| = {}, max neighbours in Ω = {max_into}", x_set.len()),
        ));
        let nl = (n - l) as f64;
        let xs = x_set.len() as f64 / nl;
        let om = omega.len() as f64;
        let bound = (lambda as f64 - mu as f64) * a1 as f64 / nl + (r * mu) as f64;
        let chain = f as f64 <= xs && xs <= om && om <= bound && bound <= (r * lambda) as f64;
        items.push(t_item(
            "case2-chain",
            chain,
            format!("f = {f} ≤ |X|/(n−l) = {xs:.4} ≤ |Ω| = {om} ≤ {bound:.4} ≤ rλ = {}", r * lambda),
        ));
        if omega.iter().any(|&u| per_fibre[g.fibre_of(u)] == r) {
            let all_x = x_set.len() + omega.len() == g.vertex_count();
            items.push(AuditItem::check(A, "case2-whole-fibre-x", all_x, format!("|X| = {}", x_set.len())));
            let edges = (0..g.vertex_count()).all(|u| in_omega[u] || graph.has_edge(u, x.apply(u)));
            let case_i = a1 == (n - l) * r && l <= lambda && edges;
            let case_ii = a2 > 0 && l <= mu;
            items.push(t_item(
                "case2-whole-fibre-alternative",
                case_i || case_ii,
                format!("α1 = {a1}, α2 = {a2}, l = {l}, λ = {lambda}, μ = {mu}"),
            ));
        }
    }
    if t.is_some() && tv.is_multiple_of(2) {
        let moved: BTreeSet<usize> = (0..g.vertex_count())
            .filter(|&u| matches!(cover_distance(g, u, x.apply(u)), 1 | 2))
            .collect();
        let xs: BTreeSet<usize> = x_set.iter().copied().collect();
        items.push(AuditItem::check(A, "case3-x", moved == xs, format!("|X| = {}, moved to distance 1 or 2: {}", xs.len(), moved.len())));
    }
    if f == 1 && l > 1 {
        let clique = omega.iter().all(|&u| omega.iter().all(|&w| u == w || graph.has_edge(u, w)));
        items.push(AuditItem::check(A, "case4-clique", clique, format!("|Ω| = {}", omega.len())));
        let ok = tv > 1 && l as f64 <= (r * mu) as f64 / (tv as f64 - 1.0) && (r * mu) as f64 / (tv as f64 - 1.0) <= mu as f64;
        items.push(t_item("case4-bound", ok, format!("l = {l}, rμ/(t−1), μ = {mu}")));
    }
    if f > 1 && l > 1 && t.is_some() && tv.is_multiple_of(2) {
        let sub = Graph::from_edges(
            omega.len(),
            &omega
                .iter()
                .enumerate()
                .flat_map(|(i, &u)| omega.iter().enumerate().skip(i + 1).filter(move |&(_, &w)| graph.has_edge(u, w)).map(move |(j, _)| (i, j)))
                .collect::<Vec<_>>(),
        );
        let diameter = sub.distance_matrix().ok().map(|d| d.diameter());
        let size_ok = omega.len() <= l + (l - 1) * (l - 1) * (l - 2);
        items.push(AuditItem::check(
            A,
            "case5",
            diameter == Some(3) && size_ok,
            format!("diam Ω = {diameter:?}, |Ω| = {}, bound {}", omega.len(), l + (l - 1) * (l - 1) * (l - 2)),
        ));
    }
    Ok(InvolutionAudit {
        fixed_vertices: omega,
        f,
        l,
        profile,
        items,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StarCheck {
    pub a_star: usize,
    pub mu1: usize,
    pub mu2: usize,
    pub lhs: i64,
    pub rhs: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SubdegreeReport {
    pub rank: Option<usize>,
    pub k: Option<(usize, usize)>,
    pub lambdas: Option<(usize, usize)>,
    /// `(k1(λ−λ1), k2(λ−λ2))`.
    pub lambda_sides: Option<(i64, i64)>,
    pub mu_checks: Vec<StarCheck>,
    pub items: Vec<AuditItem>,
}

/// Count of neighbours of `y` inside `set`.
fn into_set(graph: &Graph, y: usize, set: &BTreeSet<usize>) -> usize {
    graph.neighbours(y).filter(|w| set.contains(w)).count()
}

/// For a rank-3 action on fibres: the two orbits of a vertex stabilizer on
/// the neighbourhood of vertex 0 and the balance identities
/// `k1(λ−λ1) = k2(λ−λ2)` and, for each `a*` fixed by the stabilizer,
/// `k1(μ−μ1) = k2(μ−μ2)`.
pub fn subdegree_identity_check(g: &CoverGraph, group: &PermGroup) -> Result<SubdegreeReport, AnalysisError> {
    const A: &str = "subdegree";
    let fa = fibre_action(g, group)?;
    let mut report = SubdegreeReport {
        rank: fa.rank,
        k: None,
        lambdas: None,
        lambda_sides: None,
        mu_checks: Vec::new(),
        items: Vec::new(),
    };
    if fa.rank != Some(3) {
        report.items.push(AuditItem::new(A, "rank", AuditStatus::NotApplicable, format!("fibre rank {:?}, not 3", fa.rank)));
        return Ok(report);
    }
    let p = cover_params(g)?;
    let (lambda, mu) = (p.lambda as i64, p.mu as i64);
    let graph = g.graph();
    let a = 0;
    let stab = group.stabilizer(&[a]);
    let nbrs: BTreeSet<usize> = graph.neighbours(a).collect();
    let mut orbs: Vec<BTreeSet<usize>> = stab
        .orbits()
        .into_iter()
        .filter(|o| nbrs.contains(&o[0]))
        .map(|o| o.into_iter().collect())
        .collect();
    orbs.sort_by_key(|o| (o.len(), o.iter().next().copied()));
    report.items.push(AuditItem::check(A, "two-orbits", orbs.len() == 2, format!("orbit lengths on [a]: {:?}", orbs.iter().map(BTreeSet::len).collect::<Vec<_>>())));
    if orbs.len() != 2 {
        return Ok(report);
    }
    let (x1, x2) = (&orbs[0], &orbs[1]);
    let (k1, k2) = (x1.len(), x2.len());
    let l1: BTreeSet<usize> = x1.iter().map(|&y| into_set(graph, y, x1)).collect();
    let l2: BTreeSet<usize> = x2.iter().map(|&y| into_set(graph, y, x2)).collect();
    report.items.push(AuditItem::check(A, "lambda-constant", l1.len() == 1 && l2.len() == 1, format!("λ1 values {l1:?}, λ2 values {l2:?}")));
    let lambda1 = *l1.iter().next().expect("nonempty orbit");
    let lambda2 = *l2.iter().next().expect("nonempty orbit");
    let lhs = k1 as i64 * (lambda - lambda1 as i64);
    let rhs = k2 as i64 * (lambda - lambda2 as i64);
    report.k = Some((k1, k2));
    report.lambdas = Some((lambda1, lambda2));
    report.lambda_sides = Some((lhs, rhs));
    report.items.push(AuditItem::check(
        A,
        "lambda-balance",
        lhs == rhs,
        format!("k1 = {k1}, λ1 = {lambda1}, k2 = {k2}, λ2 = {lambda2}, λ = {lambda}: {lhs} vs {rhs}"),
    ));

    let fixed_partners: Vec<usize> = g.fibres()[g.fibre_of(a)]
        .iter()
        .copied()
        .filter(|&b| b != a && stab.generators().iter().all(|s| s.fixes(b)))
        .collect();
    if fixed_partners.is_empty() {
        report.items.push(AuditItem::new(A, "mu-balance", AuditStatus::NotApplicable, "stabilizer fixes no other vertex of the fibre"));
    }
    for b in fixed_partners {
        let star = |set: &BTreeSet<usize>| -> Option<BTreeSet<usize>> {
            set.iter().map(|&y| g.matched(b, g.fibre_of(y))).collect()
        };
        let (Some(s1), Some(s2)) = (star(x1), star(x2)) else {
            report.items.push(AuditItem::check(A, "mu-balance", false, format!("a* = {b}: fibres not matched")));
            continue;
        };
        let y1 = *s1.iter().next().expect("nonempty");
        let y2 = *x2.iter().next().expect("nonempty");
        let mu1 = into_set(graph, y1, x1);
        let mu2 = into_set(graph, y2, &s2);
        let lhs = k1 as i64 * (mu - mu1 as i64);
        let rhs = k2 as i64 * (mu - mu2 as i64);
        report.items.push(AuditItem::check(
            A,
            "mu-balance",
            lhs == rhs,
            format!("a* = {b}: μ1 = {mu1}, μ2 = {mu2}, μ = {mu}: {lhs} vs {rhs}"),
        ));
        report.mu_checks.push(StarCheck {
            a_star: b,
            mu1,
            mu2,
            lhs,
            rhs,
            holds: lhs == rhs,
        });
    }
    Ok(report)
}

fn prime_set(x: u64) -> BTreeSet<u64> {
    factorize(x).into_iter().map(|(p, _)| p).collect()
}

/// Whether every fixed point of `sub` (a point stabilizer of the transitive
/// `group`) is reached by an element normalizing `sub`; then the number of
/// fixed points is `|N(sub) : sub|`.
fn normalizer_matches_fixed(group: &PermGroup, sub: &PermGroup, base: usize) -> (usize, bool) {
    let fixed: Vec<usize> = (0..group.degree()).filter(|&b| sub.generators().iter().all(|s| s.fixes(b))).collect();
    let ok = fixed.iter().all(|&b| match group.transporter(base, b) {
        Some(t) => sub.generators().iter().all(|s| sub.contains(&s.conjugate_by(&t))),
        None => false,
    });
    (fixed.len(), ok)
}

/// Structural identities for a vertex-transitive group containing an
/// abelian covering group that is regular on fibres.
pub fn lemma3_audit(g: &CoverGraph, group: &PermGroup) -> Result<Vec<AuditItem>, AnalysisError> {
    const A: &str = "stabilizer-structure";
    let k = covering_group(g, Some(group))?;
    let transitive = group.is_transitive();
    if !transitive || !k.abelian_cover {
        return Ok(vec![AuditItem::new(
            A,
            "hypotheses",
            AuditStatus::NotApplicable,
            format!("vertex-transitive: {transitive}; abelian regular covering group: {}", k.abelian_cover),
        )]);
    }
    let p = cover_params(g)?;
    let t = family_b_t(&p);
    let (n, r) = (g.n() as u64, g.r() as u64);
    let Some(order) = group.order().to_u64() else {
        return Ok(vec![AuditItem::new(A, "order", AuditStatus::NotChecked, "group order exceeds 64 bits")]);
    };
    let a = 0;
    let ga = group.stabilizer(&[a]);
    let ga_order = ga.order().to_u64().expect("subgroup of a 64-bit group");
    let fa = fibre_action(g, group)?;
    let fibre_orbit = fa.group.orbit(g.fibre_of(a)).len() as u64;
    let m_order = order / fibre_orbit;
    let mut gens = k.group.generators().to_vec();
    gens.extend(ga.generators().iter().cloned());
    let m = PermGroup::new(g.vertex_count(), gens)?;
    let m_gen = m.order().to_u64().unwrap_or(0);
    let mut items = Vec::new();
    items.push(AuditItem::check(
        A,
        "1: M = K:G_a",
        m_gen == k.order * ga_order && m_gen == m_order,
        format!("|K| = {}, |G_a| = {ga_order}, |⟨K, G_a⟩| = {m_gen}, |G_F(a)| = {m_order}", k.order),
    ));
    let index = order / m_order;
    items.push(AuditItem::check(A, "2: |G:M| = n", index == n, format!("|G:M| = {index}, n = {n}")));
    match t {
        Some(t) => {
            let ok = (n * (t - 1)) % (order / ga_order) == 0;
            items.push(AuditItem::check(A, "2: |G:G_a| divides n(t−1)", ok, format!("|G:G_a| = {}, n(t−1) = {}", order / ga_order, n * (t - 1))));
        }
        None => items.push(AuditItem::new(A, "2: |G:G_a| divides n(t−1)", AuditStatus::NotChecked, "parameters not of the form ((t²−1)², r, μ)")),
    }
    let pi_g = prime_set(order);
    let mut pi_rhs = prime_set(n * r);
    pi_rhs.extend(prime_set(ga_order));
    items.push(AuditItem::check(A, "3: π(G) = π(nr) ∪ π(G_a)", pi_g == pi_rhs, format!("π(G) = {pi_g:?}, π(nr) ∪ π(G_a) = {pi_rhs:?}")));
    match t {
        Some(t) => {
            let ok = pi_g.iter().all(|&q| q <= n || (t - 1) % q == 0);
            items.push(AuditItem::check(A, "3: π(G) ⊆ π(n!(t−1))", ok, format!("π(G) = {pi_g:?}")));
        }
        None => items.push(AuditItem::new(A, "3: π(G) ⊆ π(n!(t−1))", AuditStatus::NotChecked, "parameters not of the form ((t²−1)², r, μ)")),
    }
    let (fix, norm_ok) = normalizer_matches_fixed(group, &ga, a);
    items.push(AuditItem::check(
        A,
        "4: |Fix(G_a)| = |N(G_a):G_a| divides nr",
        norm_ok && (n * r) % fix as u64 == 0,
        format!("|Fix(G_a)| = {fix}, nr = {}", n * r),
    ));
    let h = &fa.group;
    let m_sigma = h.stabilizer(&[g.fibre_of(a)]);
    let (fix_s, norm_s) = normalizer_matches_fixed(h, &m_sigma, g.fibre_of(a));
    items.push(AuditItem::check(
        A,
        "4: |Fix_Σ(M)| = |N(M):M| divides n",
        norm_s && n % fix_s as u64 == 0,
        format!("|Fix_Σ(M)| = {fix_s}, n = {n}"),
    ));
    for item in ["5", "6", "7"] {
        items.push(AuditItem::new(A, item, AuditStatus::NotChecked, "concerns parameter regimes not instantiable on a concrete cover"));
    }
    Ok(items)
}
