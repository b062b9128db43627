use coverlab::analysis::{
    arc_orbit_count, audit_passed, covering_group, fibre_action, involution_audit, lemma3_audit, quotient_cover,
    subdegree_identity_check, AuditStatus,
};
use coverlab::autom::{automorphism_group, covers_isomorphic};
use coverlab::constructions::{cube, hexagon, icosahedron, thas_somma};
use coverlab::frames::{character_matrix, cover_characters, extract_lines, Side, DEFAULT_TOLERANCE};
use coverlab::graph::{verify_cover, CoverGraph};
use coverlab::perm::{enumerate_subgroups, PermGroup, Permutation};

fn corpus() -> Vec<(&'static str, CoverGraph)> {
    vec![
        ("hexagon", hexagon()),
        ("cube", cube()),
        ("icosahedron", icosahedron()),
        ("TS(3,1)", thas_somma(3, 1).unwrap()),
        ("TS(4,1)", thas_somma(4, 1).unwrap()),
    ]
}

fn sorted_eigenvalues(g: &CoverGraph, index: usize) -> Vec<f64> {
    character_matrix::<f64>(g, index).unwrap().eigenvalues().to_vec()
}

#[test]
fn every_nontrivial_character_is_certified() {
    let mut covers = corpus();
    covers.push(("TS(5,1)", thas_somma(5, 1).unwrap()));
    covers.push(("TS(2,2)", thas_somma(2, 2).unwrap()));
    for (name, g) in covers {
        let (_, chars) = cover_characters(&g).unwrap();
        assert_eq!(chars.len(), g.r(), "{name}");
        assert!(chars[0].is_trivial(), "{name}");
        for index in 1..chars.len() {
            let s = character_matrix::<f64>(&g, index).unwrap();
            let c = &s.certificate;
            assert!(c.certified, "{name} χ{index}: {c:?}");
            assert_eq!(Some(c.theta_multiplicity), c.expected_theta_multiplicity, "{name} χ{index}");
            assert_eq!(Some(c.tau_multiplicity), c.expected_tau_multiplicity, "{name} χ{index}");
            assert!(c.hermitian_defect < 1e-12, "{name} χ{index}");
        }
    }
}

#[test]
fn lines_agree_across_characters() {
    let g = thas_somma(3, 1).unwrap();
    for index in 1..3 {
        let s = character_matrix::<f64>(&g, index).unwrap();
        let tau = extract_lines(&s, Side::Tau, DEFAULT_TOLERANCE).unwrap();
        assert_eq!((tau.n, tau.d), (9, 3));
        assert!(tau.certificates.sic && tau.certificates.passed);
        assert!((tau.alpha * tau.alpha - 0.25).abs() < 1e-12);
        let theta = extract_lines(&s, Side::Theta, DEFAULT_TOLERANCE).unwrap();
        assert_eq!(theta.d, 6);
        assert!((theta.alpha * theta.alpha - 1.0 / 16.0).abs() < 1e-12);
        assert!(theta.certificates.passed);
    }
    // the two characters of Z3 are conjugate, so their spectra coincide
    let a = sorted_eigenvalues(&g, 1);
    let b = sorted_eigenvalues(&g, 2);
    assert!(a.iter().zip(&b).all(|(x, y)| (x - y).abs() < 1e-9));
}

#[test]
fn single_precision_character_matrix_is_certified() {
    let g = thas_somma(3, 1).unwrap();
    let s = character_matrix::<f32>(&g, 1).unwrap();
    assert!(s.certificate.certified);
    let lines = extract_lines(&s, Side::Tau, 1e-4).unwrap();
    assert_eq!(lines.d, 3);
    assert!(lines.certificates.sic && lines.certificates.passed);
}

#[test]
fn non_faithful_character_matches_quotient() {
    let g = thas_somma(4, 1).unwrap();
    let (elements, chars) = cover_characters(&g).unwrap();
    let k = covering_group(&g, None).unwrap();
    for (index, chi) in chars.iter().enumerate().skip(1) {
        assert!(!chi.is_faithful());
        assert_eq!(chi.kernel_size(), 2);
        let kernel: Vec<_> = elements
            .iter()
            .enumerate()
            .filter(|(i, _)| chi.values[*i] == 0)
            .map(|(_, e)| e.clone())
            .collect();
        let n = PermGroup::new(g.vertex_count(), kernel).unwrap();
        assert!(n.is_subgroup_of(&k.group));
        let q = quotient_cover(&g, &n).unwrap();
        let report = verify_cover(&q);
        assert!(report.is_cover);
        assert_eq!((report.n, report.r, report.mu), (16, 2, Some(8)));
        let ours = sorted_eigenvalues(&g, index);
        let theirs = sorted_eigenvalues(&q, 1);
        assert_eq!(ours.len(), theirs.len());
        assert!(ours.iter().zip(&theirs).all(|(x, y)| (x - y).abs() < 1e-9), "χ{index}");
    }
}

#[test]
fn thas_somma_4_quotients_by_order_two_subgroups() {
    let g = thas_somma(4, 1).unwrap();
    let k = covering_group(&g, None).unwrap();
    assert!(k.abelian_cover);
    let order_two: Vec<PermGroup> = enumerate_subgroups(&k.group, 64)
        .unwrap()
        .into_iter()
        .filter(|h| h.order_u64() == Some(2))
        .collect();
    assert_eq!(order_two.len(), 3);
    let mut quotients = Vec::new();
    for h in &order_two {
        let q = quotient_cover(&g, h).unwrap();
        let report = verify_cover(&q);
        assert!(report.is_cover && report.failures.is_empty());
        assert_eq!((report.n, report.r, report.mu), (16, 4 / 2, Some(4 * 2)));
        quotients.push(q);
    }
    // the three quotients are Taylor covers of isomorphic two-graphs
    assert!(covers_isomorphic(&quotients[0], &quotients[1]).unwrap());
    assert!(covers_isomorphic(&quotients[0], &quotients[2]).unwrap());
}

#[test]
fn involution_identities_hold_on_corpus() {
    for (name, g) in corpus() {
        let aut = automorphism_group(&g).unwrap();
        let (mut count, mut with_fixed_points) = (0, 0);
        for x in aut.elements(100_000).unwrap().iter().filter(|x| x.order() == 2) {
            let audit = involution_audit(&g, x).unwrap();
            count += 1;
            assert!(audit_passed(&audit.items), "{name} {:?}: {:?}", x.cycles(), audit.items);
            if audit.fixed_vertices.is_empty() {
                continue;
            }
            with_fixed_points += 1;
            let by_name = |item: &str| audit.items.iter().find(|i| i.item == item).map(|i| i.status);
            assert_eq!(by_name("f-constant"), Some(AuditStatus::Pass), "{name}");
            assert_eq!(by_name("omega-regular"), Some(AuditStatus::Pass), "{name}");
        }
        assert!(count > 0 && with_fixed_points > 0, "{name}");
    }
}

#[test]
fn arc_orbits_equal_rank_minus_one() {
    for (name, g) in corpus() {
        let aut = automorphism_group(&g).unwrap();
        let report = arc_orbit_count(&g, &aut).unwrap();
        assert!(report.hypotheses_hold, "{name}: {}", report.hypotheses_detail);
        assert_eq!(Some(report.orbits + 1), report.fibre_rank, "{name}");
        assert_eq!(report.identity_holds, Some(true), "{name}");
    }
}

#[test]
fn stabilizer_structure_items_hold() {
    for (name, g) in corpus() {
        let aut = automorphism_group(&g).unwrap();
        let items = lemma3_audit(&g, &aut).unwrap();
        assert!(audit_passed(&items), "{name}: {items:?}");
        let passed = items.iter().filter(|i| i.status == AuditStatus::Pass).count();
        assert!(passed >= 3, "{name}: {items:?}");
        assert!(items.iter().any(|i| i.item.starts_with("2:") && i.status == AuditStatus::Pass), "{name}");
    }
}

/// Subgroups `⟨K, L, x⟩` with `L` a subgroup of a vertex stabilizer and `x`
/// a fixed-point-free element of order 3.
fn transitive_extensions(aut: &PermGroup, k: &PermGroup) -> Vec<PermGroup> {
    let elements = aut.elements(10_000).unwrap();
    let movers: Vec<&Permutation> = elements
        .iter()
        .filter(|x| x.order() == 3 && x.fixed_points().is_empty())
        .collect();
    let stab = aut.stabilizer(&[0]);
    let mut out: Vec<PermGroup> = Vec::new();
    for l in enumerate_subgroups(&stab, 1000).unwrap() {
        for &x in &movers {
            let mut gens: Vec<Permutation> = k.generators().to_vec();
            gens.extend(l.generators().iter().cloned());
            gens.push(x.clone());
            let h = PermGroup::new(aut.degree(), gens).unwrap();
            if !out.iter().any(|o| o.order() == h.order() && o.is_subgroup_of(&h)) {
                out.push(h);
            }
        }
    }
    out
}

#[test]
fn rank_three_subgroups_satisfy_subdegree_identities() {
    let g = thas_somma(3, 1).unwrap();
    let aut = automorphism_group(&g).unwrap();
    let k = covering_group(&g, None).unwrap();
    let mut subdegrees = Vec::new();
    for h in transitive_extensions(&aut, &k.group) {
        if !h.is_transitive() || !k.group.is_subgroup_of(&h) {
            continue;
        }
        if fibre_action(&g, &h).unwrap().rank != Some(3) {
            continue;
        }
        let report = subdegree_identity_check(&g, &h).unwrap();
        assert!(audit_passed(&report.items), "{:?}", report.items);
        let (k1, k2) = report.k.unwrap();
        assert_eq!(k1 + k2, g.n() - 1);
        let (l1, l2) = report.lambda_sides.unwrap();
        assert_eq!(l1, l2);
        subdegrees.push((k1, k2));
    }
    subdegrees.sort_unstable();
    subdegrees.dedup();
    assert_eq!(subdegrees, vec![(2, 6), (4, 4)]);
}

#[test]
fn full_groups_are_rank_two() {
    for (name, g) in corpus() {
        let aut = automorphism_group(&g).unwrap();
        let fa = fibre_action(&g, &aut).unwrap();
        assert_eq!(fa.rank, Some(2), "{name}");
        let report = subdegree_identity_check(&g, &aut).unwrap();
        assert_eq!(report.items[0].status, AuditStatus::NotApplicable);
    }
}
