use std::sync::OnceLock;

use num_rational::Ratio;
use num_traits::{One, Zero};
use proptest::prelude::*;

use coverlab::analysis::displacement_profile;
use coverlab::autom::automorphism_group;
use coverlab::constructions::{cube, hexagon, icosahedron, thas_somma};
use coverlab::frames::{character_matrix, cover_characters, extract_lines, Side, DEFAULT_TOLERANCE};
use coverlab::graph::{verify_cover, CoverGraph};
use coverlab::perm::Permutation;
use coverlab::{derive_params, Surd};

fn surd(a: (i64, i64), b: (i64, i64), d: i128) -> Surd {
    Surd::new(Ratio::new(a.0 as i128, a.1 as i128), Ratio::new(b.0 as i128, b.1 as i128), d)
}

fn part() -> impl Strategy<Value = (i64, i64)> {
    (-40i64..=40, 1i64..=12)
}

fn radicand() -> impl Strategy<Value = i128> {
    prop::sample::select(vec![2i128, 3, 5, 6, 7, 10, 13])
}

proptest! {
    #[test]
    fn surd_field_operations(a in part(), b in part(), c in part(), e in part(), d in radicand()) {
        let x = surd(a, b, d);
        let y = surd(c, e, d);
        prop_assert_eq!(x.clone() - x.clone(), Surd::zero());
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        if !y.is_zero() {
            prop_assert_eq!((x.clone() * y.clone()) / y.clone(), x.clone());
            prop_assert_eq!(y.clone() / y.clone(), Surd::one());
        }
        prop_assert_eq!((x.clone() * y.clone()).conjugate(), x.conjugate() * y.conjugate());
        prop_assert_eq!((x.clone() * y.clone()).norm(), x.norm() * y.norm());
        let fx = x.to_f64() * y.to_f64();
        prop_assert!(((x.clone() * y.clone()).to_f64() - fx).abs() <= 1e-9 * (1.0 + fx.abs()));
    }

    #[test]
    fn surd_order_agrees_with_floats(a in part(), b in part(), c in part(), e in part(), d in radicand()) {
        let x = surd(a, b, d);
        let y = surd(c, e, d);
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x.cmp(&y), fx.partial_cmp(&fy).unwrap());
        }
        prop_assert_eq!(x.clone() == y.clone(), (x - y).is_zero());
    }

    #[test]
    fn derived_spectrum_identities(n in 3u64..400, r in 2u64..12, mu in 1u64..60) {
        let Ok(p) = derive_params(n, r, mu) else {
            prop_assume!(false);
            unreachable!()
        };
        let int = |x: i128| Surd::integer(x);
        prop_assert_eq!(p.lambda as i128, n as i128 - (r as i128 - 1) * mu as i128 - 2);
        prop_assert_eq!(p.theta.clone() + p.tau.clone(), int(p.lambda as i128 - mu as i128));
        prop_assert_eq!(p.theta.clone() * p.tau.clone(), int(1 - n as i128));
        prop_assert_eq!(p.m_theta.clone() + p.m_tau.clone(), int((n * (r - 1)) as i128));
        // trace of the adjacency matrix vanishes
        prop_assert_eq!(p.theta.clone() * p.m_theta.clone() + p.tau.clone() * p.m_tau.clone(), Surd::zero());
        prop_assert!(p.theta > int(-1) && p.tau < int(-1));
        prop_assert_eq!(p.v, n * r);
    }
}

fn toggled(g: &CoverGraph, u: usize, v: usize) -> CoverGraph {
    let mut h = g.clone();
    h.graph_mut().toggle_edge(u, v);
    h
}

proptest! {
    #[test]
    fn single_edge_mutation_breaks_hexagon(u in 0usize..6, v in 0usize..6) {
        prop_assume!(u != v);
        prop_assert!(!verify_cover(&toggled(&hexagon(), u, v)).is_cover);
    }

    #[test]
    fn single_edge_mutation_breaks_cube(u in 0usize..8, v in 0usize..8) {
        prop_assume!(u != v);
        let report = verify_cover(&toggled(&cube(), u, v));
        prop_assert!(!report.is_cover);
        prop_assert!(!report.failures.is_empty());
    }

    #[test]
    fn single_edge_mutation_breaks_thas_somma(u in 0usize..27, v in 0usize..27) {
        prop_assume!(u != v);
        prop_assert!(!verify_cover(&toggled(&thas_somma(3, 1).unwrap(), u, v)).is_cover);
    }
}

struct Corpus {
    covers: Vec<(CoverGraph, Vec<Permutation>)>,
}

/// Corpus covers paired with every automorphism.
fn corpus() -> &'static Corpus {
    static CORPUS: OnceLock<Corpus> = OnceLock::new();
    CORPUS.get_or_init(|| {
        let covers = [hexagon(), cube(), icosahedron(), thas_somma(3, 1).unwrap()]
            .into_iter()
            .map(|g| {
                let elements = automorphism_group(&g).unwrap().elements(10_000).unwrap();
                (g, elements)
            })
            .collect();
        Corpus { covers }
    })
}

proptest! {
    #[test]
    fn displacement_profile_partitions_vertices(c in 0usize..4, i in any::<prop::sample::Index>()) {
        let (g, elements) = &corpus().covers[c];
        let x = i.get(elements);
        let profile = displacement_profile(g, x).unwrap();
        prop_assert_eq!(profile.iter().sum::<usize>(), g.vertex_count());
        prop_assert_eq!(profile[0], x.fixed_points().len());
    }

    #[test]
    fn displacement_profile_is_conjugation_invariant(
        c in 0usize..4,
        i in any::<prop::sample::Index>(),
        j in any::<prop::sample::Index>(),
    ) {
        let (g, elements) = &corpus().covers[c];
        let x = i.get(elements);
        let y = j.get(elements);
        prop_assert_eq!(displacement_profile(g, x).unwrap(), displacement_profile(g, &x.conjugate_by(y)).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn line_angle_matches_dimension_count(
        q in prop::sample::select(vec![2u64, 3, 4, 5]),
        theta in any::<bool>(),
        k in any::<prop::sample::Index>(),
    ) {
        let g = thas_somma(q, 1).unwrap();
        let (_, chars) = cover_characters(&g).unwrap();
        let index = 1 + k.index(chars.len() - 1);
        let s = character_matrix::<f64>(&g, index).unwrap();
        let side = if theta { Side::Theta } else { Side::Tau };
        let lines = extract_lines(&s, side, DEFAULT_TOLERANCE).unwrap();
        let (n, d) = (lines.n as f64, lines.d as f64);
        // d = 1 puts every line on the same axis, where the relative bound is undefined
        prop_assert_eq!(lines.certificates.passed, lines.d >= 2);
        prop_assert!((lines.alpha * lines.alpha - (n - d) / (d * (n - 1.0))).abs() < 1e-9);
        let p = derive_params(g.n() as u64, g.r() as u64, verify_cover(&g).mu.unwrap() as u64).unwrap();
        let (d_tau_side, d_theta_side) = p.frame_dimensions().unwrap();
        prop_assert_eq!(lines.d as u64, if theta { d_theta_side } else { d_tau_side });
    }
}
