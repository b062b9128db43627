//! Explicit covers: hexagon, cube, icosahedron, the symplectic covers over
//! finite fields and double covers from Seidel matrices.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf::{FieldError, FiniteField};
use crate::graph::{cover_from_antipodal, CoverGraph, Graph, GraphError};

/// Largest vertex count the field constructions will build by default.
pub const DEFAULT_CONSTRUCTION_BOUND: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("m must be at least 1")]
    BadDimension,
    #[error("construction would have {vertices} vertices, above the bound {bound}")]
    TooLarge { vertices: usize, bound: usize },
    #[error("invalid Seidel matrix: {0}")]
    InvalidSeidel(String),
    #[error("not a double cover: fibres have size {0}")]
    NotDoubleCover(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Named constructions with their arguments.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ConstructionSpec {
    Hexagon,
    Icosahedron,
    Cube,
    ThasSomma { q: u64, m: u32 },
    Taylor { seidel: Vec<Vec<i8>>, sign: SeidelSign },
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<CoverGraph, ConstructionError> {
        match self {
            ConstructionSpec::Hexagon => Ok(hexagon()),
            ConstructionSpec::Icosahedron => Ok(icosahedron()),
            ConstructionSpec::Cube => Ok(cube()),
            ConstructionSpec::ThasSomma { q, m } => thas_somma(*q, *m),
            ConstructionSpec::Taylor { seidel, sign } => taylor_from_seidel(seidel, *sign),
        }
    }
}

/// The 6-cycle with antipodal pairs as fibres: a (3, 2, 1)-cover.
pub fn hexagon() -> CoverGraph {
    let edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
    CoverGraph::from_edges(6, &edges, vec![vec![0, 3], vec![1, 4], vec![2, 5]]).expect("hexagon is well formed")
}

/// The 3-cube on bit vectors: a (4, 2, 2)-cover.
pub fn cube() -> CoverGraph {
    let mut g = Graph::new(8);
    for x in 0..8usize {
        for b in 0..3 {
            g.add_edge(x, x ^ (1 << b));
        }
    }
    cover_from_antipodal(g).expect("cube is antipodal")
}

/// The icosahedron: apex 0, upper ring 1..=5, lower ring 6..=10, apex 11.
/// A (6, 2, 2)-cover.
pub fn icosahedron() -> CoverGraph {
    let mut g = Graph::new(12);
    for i in 0..5 {
        let up = 1 + i;
        let up_next = 1 + (i + 1) % 5;
        let low = 6 + i;
        let low_next = 6 + (i + 1) % 5;
        g.add_edge(0, up);
        g.add_edge(11, low);
        g.add_edge(up, up_next);
        g.add_edge(low, low_next);
        g.add_edge(up, low);
        g.add_edge(up, low_next);
    }
    cover_from_antipodal(g).expect("icosahedron is antipodal")
}

/// Symplectic cover with the default size bound.
pub fn thas_somma(q: u64, m: u32) -> Result<CoverGraph, ConstructionError> {
    thas_somma_bounded(q, m, DEFAULT_CONSTRUCTION_BOUND)
}

/// Vertices `(u, a) ∈ F_q^{2m} × F_q`, with `(u, a) ~ (v, b)` iff `u ≠ v`
/// and `b − a = B(u, v)` for the standard alternating form
/// `B(u, v) = Σ u_{2i} v_{2i+1} − u_{2i+1} v_{2i}`.
///
/// Vertex `(u, a)` has id `index(u)·q + a`, where `index(u) = Σ u_i q^i`.
/// Fibres are `{u} × F_q`. The result is a `(q^{2m}, q, q^{2m−1})`-cover.
pub fn thas_somma_bounded(q: u64, m: u32, bound: usize) -> Result<CoverGraph, ConstructionError> {
    if m == 0 {
        return Err(ConstructionError::BadDimension);
    }
    let field = FiniteField::new(q)?;
    let q = q as usize;
    let dim = 2 * m as usize;
    let points = q.checked_pow(dim as u32).unwrap_or(usize::MAX);
    let vertices = points.saturating_mul(q);
    if vertices > bound {
        return Err(ConstructionError::TooLarge { vertices, bound });
    }
    let coords: Vec<Vec<usize>> = (0..points)
        .map(|mut x| {
            (0..dim)
                .map(|_| {
                    let c = x % q;
                    x /= q;
                    c
                })
                .collect()
        })
        .collect();
    let form = |u: &[usize], v: &[usize]| {
        (0..dim / 2).fold(0, |acc, i| {
            let plus = field.mul(u[2 * i], v[2 * i + 1]);
            let minus = field.mul(u[2 * i + 1], v[2 * i]);
            field.add(acc, field.sub(plus, minus))
        })
    };
    let mut g = Graph::new(vertices);
    for u in 0..points {
        for v in u + 1..points {
            let b = form(&coords[u], &coords[v]);
            for a in 0..q {
                g.add_edge(u * q + a, v * q + field.add(a, b));
            }
        }
    }
    let fibres = (0..points).map(|u| (u * q..(u + 1) * q).collect()).collect();
    Ok(CoverGraph::new(g, fibres)?)
}

/// Which sign relation defines adjacency in the double cover of a Seidel
/// matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeidelSign {
    /// `(ε, i) ~ (δ, j)` iff `i ≠ j` and `εδ = S_ij`.
    #[default]
    Direct,
    /// `(ε, i) ~ (δ, j)` iff `i ≠ j` and `εδ = −S_ij`.
    Negated,
}

fn check_seidel(s: &[Vec<i8>]) -> Result<usize, ConstructionError> {
    let n = s.len();
    if n < 3 {
        return Err(ConstructionError::InvalidSeidel(format!("need at least 3 points, got {n}")));
    }
    for (i, row) in s.iter().enumerate() {
        if row.len() != n {
            return Err(ConstructionError::InvalidSeidel(format!("row {i} has length {}", row.len())));
        }
        if row[i] != 0 {
            return Err(ConstructionError::InvalidSeidel(format!("diagonal entry {i} is nonzero")));
        }
        for (j, &x) in row.iter().enumerate() {
            if i != j && x != 1 && x != -1 {
                return Err(ConstructionError::InvalidSeidel(format!("entry ({i},{j}) = {x} is not ±1")));
            }
            if s[j][i] != x {
                return Err(ConstructionError::InvalidSeidel(format!("not symmetric at ({i},{j})")));
            }
        }
    }
    Ok(n)
}

/// Double cover of `K_n` from a Seidel matrix. Vertex `(+, i)` is `i` and
/// `(−, i)` is `n + i`; fibres are `{i, n + i}`.
///
/// The result is always returned as a partitioned graph; whether it is a
/// cover is for [`crate::graph::verify_cover`] to decide.
pub fn taylor_from_seidel(s: &[Vec<i8>], sign: SeidelSign) -> Result<CoverGraph, ConstructionError> {
    let n = check_seidel(s)?;
    let mut g = Graph::new(2 * n);
    for i in 0..n {
        for j in i + 1..n {
            let same = match sign {
                SeidelSign::Direct => s[i][j] == 1,
                SeidelSign::Negated => s[i][j] == -1,
            };
            if same {
                g.add_edge(i, j);
                g.add_edge(n + i, n + j);
            } else {
                g.add_edge(i, n + j);
                g.add_edge(n + i, j);
            }
        }
    }
    let fibres = (0..n).map(|i| vec![i, n + i]).collect();
    Ok(CoverGraph::new(g, fibres)?)
}

/// Seidel matrix of a double cover under [`SeidelSign::Direct`]: `S_ij = 1`
/// iff the least vertices of fibres `i` and `j` are adjacent.
pub fn seidel_from_double_cover(g: &CoverGraph) -> Result<Vec<Vec<i8>>, ConstructionError> {
    if g.r() != 2 {
        return Err(ConstructionError::NotDoubleCover(g.r()));
    }
    let reps: Vec<usize> = g.fibres().iter().map(|f| f[0]).collect();
    let n = reps.len();
    let mut s = vec![vec![0i8; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s[i][j] = if g.graph().has_edge(reps[i], reps[j]) { 1 } else { -1 };
            }
        }
    }
    Ok(s)
}

/// Seidel matrix `J − I − 2A` of a graph.
pub fn seidel_of_graph(g: &Graph) -> Vec<Vec<i8>> {
    let n = g.vertex_count();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, g.has_edge(i, j)) {
                    (true, _) => 0,
                    (false, true) => -1,
                    (false, false) => 1,
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::verify_cover;

    #[test]
    fn small_covers_have_expected_shape() {
        let g = hexagon();
        assert_eq!((g.vertex_count(), g.graph().edge_count()), (6, 6));
        let g = icosahedron();
        assert_eq!((g.vertex_count(), g.graph().edge_count(), g.n()), (12, 30, 6));
        let g = cube();
        assert_eq!((g.vertex_count(), g.graph().edge_count(), g.n()), (8, 12, 4));
    }

    #[test]
    fn symplectic_cover_sizes() {
        let g = thas_somma(3, 1).unwrap();
        assert_eq!((g.vertex_count(), g.n(), g.r()), (27, 9, 3));
        assert_eq!(g.graph().degree(0), 8);
        assert!(thas_somma(6, 1).is_err());
        assert!(matches!(thas_somma(16, 2), Err(ConstructionError::TooLarge { .. })));
        assert_eq!(thas_somma(3, 0), Err(ConstructionError::BadDimension));
    }

    #[test]
    fn seidel_validation() {
        assert!(taylor_from_seidel(&[vec![0, 1], vec![1, 0]], SeidelSign::Direct).is_err());
        let asym = vec![vec![0, 1, 1], vec![-1, 0, 1], vec![1, 1, 0]];
        assert!(taylor_from_seidel(&asym, SeidelSign::Direct).is_err());
        let bad = vec![vec![0, 2, 1], vec![2, 0, 1], vec![1, 1, 0]];
        assert!(taylor_from_seidel(&bad, SeidelSign::Direct).is_err());
    }

    #[test]
    fn triangle_two_graph_gives_hexagon() {
        let s = vec![vec![0, -1, -1], vec![-1, 0, -1], vec![-1, -1, 0]];
        let g = taylor_from_seidel(&s, SeidelSign::Direct).unwrap();
        let rep = verify_cover(&g);
        assert!(rep.is_cover);
        assert_eq!((rep.n, rep.mu, rep.lambda), (3, Some(1), Some(0)));
        // the negated convention gives two disjoint triangles
        let g = taylor_from_seidel(&s, SeidelSign::Negated).unwrap();
        assert!(!verify_cover(&g).is_cover);
    }

    #[test]
    fn round_trip_seidel() {
        let ico = icosahedron();
        let s = seidel_from_double_cover(&ico).unwrap();
        let back = taylor_from_seidel(&s, SeidelSign::Direct).unwrap();
        assert_eq!(back.graph().edge_count(), 30);
        assert!(verify_cover(&back).is_cover);
        assert!(seidel_from_double_cover(&thas_somma(3, 1).unwrap()).is_err());
    }
}
