use flagspec::geometry::counts::{closed_form_count, CountKind, Counts};
use flagspec::geometry::opposition::{
    generator_class, is_opposite_literal, perp, point_relation, GeneratorClass, Opposition, PointRelation,
};
use flagspec::geometry::{Descriptor, Enumeration, GeometryInstance, Subspace};
use num_bigint::BigInt;

fn setup(s: &str) -> (GeometryInstance, Enumeration) {
    let g = GeometryInstance::parse(s).unwrap();
    let en = Enumeration::build(&g).unwrap();
    (g, en)
}

/// Brute-force count of singular projective points straight from the form.
fn brute_points(g: &GeometryInstance) -> usize {
    g.normalized_vectors()
        .filter(|v| g.form.as_ref().is_none_or(|form| form.is_singular(&g.field, v)))
        .count()
}

#[test]
fn point_counts_match_brute_force_and_closed_form() {
    let cases = [
        ("A:3:2", 15),
        ("A:3:3", 40),
        ("B:2:2:2:sp", 15),
        ("B:2:4:2:ell", 27),
        ("B:2:1:4:herm", 45),
        ("B:2:3:4:herm", 165),
        ("B:2:0:2:hyp", 9),
        ("B:3:2:2:sp", 63),
        ("B:2:2:3:par", 40),
    ];
    for (s, expected) in cases {
        let (g, en) = setup(s);
        assert_eq!(en.num_points(), expected, "{s}");
        assert_eq!(brute_points(&g), expected, "{s}");
        assert_eq!(Counts::of(&g).point_count().unwrap(), expected as u64, "{s}");
    }
}

#[test]
fn flag_counts_match_closed_form() {
    let cases = [
        ("A:3:2", 315),
        ("A:3:3", 2080),
        ("B:2:2:2:sp", 45),
        ("B:2:4:2:ell", 135),
        ("B:2:1:4:herm", 135),
        ("B:2:3:4:herm", 1485),
        ("B:2:0:2:hyp", 18),
        ("B:3:2:2:sp", 2835),
        ("B:3:0:2:hyp", 630),
        ("D:4:2", 42525),
    ];
    for (s, expected) in cases {
        let (g, en) = setup(s);
        assert_eq!(en.num_flags(), expected, "{s}");
        assert_eq!(Counts::of(&g).flag_count().unwrap(), expected as u64, "{s}");
    }
    let (_, d4) = setup("D:4:2");
    assert_eq!(d4.num_leaves(), 85050);
}

#[test]
fn flags_are_nested_chains_of_isotropic_subspaces() {
    for s in ["A:3:2", "B:2:1:4:herm", "B:3:2:2:sp", "B:2:4:2:ell"] {
        let (g, en) = setup(s);
        let reg = &en.registry;
        for leaf in (0..en.num_leaves()).step_by(7) {
            let chain = en.chain(leaf);
            for k in 1..g.n {
                let lower = reg.subspace(k, chain[k - 1]);
                let upper = reg.subspace(k + 1, chain[k]);
                assert!(upper.contains(&g.field, lower));
            }
            if let Some(form) = &g.form {
                assert!(form.is_totally_isotropic(&g.field, reg.subspace(g.n, chain[g.n - 1])));
            }
        }
    }
}

#[test]
fn enumeration_is_deterministic() {
    let (_, a) = setup("B:2:4:2:ell");
    let (_, b) = setup("B:2:4:2:ell");
    assert_eq!(a.chains, b.chains);
}

#[test]
fn valency_matches_weyl_length() {
    for s in ["A:3:2", "A:3:3", "A:2:2", "B:2:2:2:sp", "B:2:4:2:ell", "B:2:1:4:herm", "B:2:0:2:hyp", "B:2:3:4:herm"] {
        let (g, en) = setup(s);
        let opp = Opposition::new(&g, &en);
        let expected = Counts::of(&g).valency().unwrap();
        for c in 0..en.num_flags() {
            assert_eq!(BigInt::from(opp.neighbors(c).len()), expected, "{s} flag {c}");
        }
    }
}

#[test]
fn valency_on_larger_instances_sampled() {
    for (s, valency) in [("B:3:2:2:sp", 512), ("B:3:0:2:hyp", 64), ("D:4:2", 4096)] {
        let (g, en) = setup(s);
        let opp = Opposition::new(&g, &en);
        for c in (0..en.num_flags()).step_by(en.num_flags() / 40 + 1) {
            assert_eq!(opp.neighbors(c).len(), valency, "{s} flag {c}");
        }
    }
}

#[test]
fn trie_search_agrees_with_literal_predicate() {
    for s in ["A:3:2", "B:2:2:2:sp", "B:2:4:2:ell", "B:2:1:4:herm", "B:2:0:2:hyp", "A:2:3"] {
        let (g, en) = setup(s);
        let opp = Opposition::new(&g, &en);
        let nf = en.num_flags();
        for c in 0..nf {
            let fast = opp.neighbors(c);
            let slow: Vec<u32> = (0..nf).filter(|&d| is_opposite_literal(&g, &en, c, d)).map(|d| d as u32).collect();
            assert_eq!(fast, slow, "{s} flag {c}");
            assert!(!fast.contains(&(c as u32)));
        }
    }
}

#[test]
fn oriflamme_search_agrees_with_literal_predicate() {
    let g = GeometryInstance::build_unrestricted(Descriptor::D { n: 3, q: 2 }).unwrap();
    let en = Enumeration::build(&g).unwrap();
    assert_eq!(en.num_flags(), 315);
    let opp = Opposition::new(&g, &en);
    for c in (0..en.num_flags()).step_by(4) {
        let fast = opp.neighbors(c);
        let slow: Vec<u32> = (0..en.num_flags()).filter(|&d| is_opposite_literal(&g, &en, c, d)).map(|d| d as u32).collect();
        assert_eq!(fast, slow, "flag {c}");
        assert_eq!(fast.len(), 64);
    }
    let (g4, en4) = setup("D:4:2");
    let opp4 = Opposition::new(&g4, &en4);
    for c in [0usize, 12345, 42524] {
        let fast = opp4.neighbors(c);
        for &d in fast.iter().step_by(97) {
            assert!(is_opposite_literal(&g4, &en4, c, d as usize));
        }
        let mut non = 0;
        for d in (0..en4.num_flags()).step_by(1013) {
            if !fast.contains(&(d as u32)) {
                assert!(!is_opposite_literal(&g4, &en4, c, d));
                non += 1;
            }
        }
        assert!(non > 0);
    }
}

#[test]
fn opposition_is_symmetric() {
    let (g, en) = setup("B:2:4:2:ell");
    let opp = Opposition::new(&g, &en);
    let lists: Vec<Vec<u32>> = (0..en.num_flags()).map(|c| opp.neighbors(c)).collect();
    for (c, list) in lists.iter().enumerate() {
        for &d in list {
            assert!(lists[d as usize].contains(&(c as u32)));
        }
    }
}

#[test]
fn perp_is_an_inclusion_reversing_involution() {
    for s in ["B:2:2:2:sp", "B:2:1:4:herm", "B:3:2:2:sp", "B:2:4:2:ell"] {
        let (g, en) = setup(s);
        let f = &g.field;
        let whole = Subspace::whole(g.ambient_dim);
        assert_eq!(perp(&g, &whole).unwrap().rank(), 0);
        for rank in 1..=g.n {
            for id in (0..en.registry.count(rank) as u32).step_by(5) {
                let u = en.registry.subspace(rank, id);
                let up = perp(&g, u).unwrap();
                assert_eq!(up.rank(), g.ambient_dim - rank);
                assert!(up.contains(f, u));
                assert_eq!(&perp(&g, &up).unwrap(), u);
                // the registered perp point set is exactly the points of U^perp
                let pts = en.registry.perp_of(rank, id);
                for p in 0..en.num_points() {
                    assert_eq!(pts.contains(p), up.contains_vector(f, en.registry.point_vector(p as u32)));
                }
                if rank > 1 {
                    // contained subspaces have larger perps
                    let lower = en.registry.subspace(1, 0);
                    if u.contains(f, lower) {
                        assert!(perp(&g, lower).unwrap().contains(f, &up));
                    }
                }
            }
        }
    }
    let a = GeometryInstance::parse("A:3:2").unwrap();
    assert!(perp(&a, &Subspace::zero(4)).is_err());
}

#[test]
fn points_in_perp_of_a_point() {
    let (g, en) = setup("B:2:2:2:sp");
    for p in 0..15 {
        let pts = en.registry.perp_of(1, p);
        assert_eq!(pts.count_ones(..), 7);
        assert!(pts.contains(p as usize));
    }
    let _ = g;
}

fn relation_counts(s: &str) -> (usize, usize) {
    let (g, en) = setup(s);
    let np = en.num_points() as u32;
    let mut coll = 0;
    let mut opp = 0;
    for y in 0..np {
        match point_relation(&g, &en, 0, y).unwrap() {
            PointRelation::Equal => {}
            PointRelation::Collinear => coll += 1,
            PointRelation::Opposite => opp += 1,
        }
    }
    (coll, opp)
}

#[test]
fn opposite_points_match_alpha() {
    assert_eq!(relation_counts("B:2:2:2:sp").1, 8);
    assert_eq!(relation_counts("B:2:4:2:ell").1, 16);
    let a = GeometryInstance::parse("A:3:2").unwrap();
    let en = Enumeration::build(&a).unwrap();
    assert!(point_relation(&a, &en, 0, 1).is_err());
}

/// Brute-force version of the beta/gamma counts: points opposite to both
/// of a pair in the given relation.
fn common_opposite(s: &str, rel: PointRelation) -> usize {
    let (g, en) = setup(s);
    let np = en.num_points() as u32;
    let y = (1..np).find(|&y| point_relation(&g, &en, 0, y).unwrap() == rel).unwrap();
    (0..np)
        .filter(|&z| {
            point_relation(&g, &en, 0, z).unwrap() == PointRelation::Opposite
                && point_relation(&g, &en, y, z).unwrap() == PointRelation::Opposite
        })
        .count()
}

#[test]
fn beta_gamma_d_by_brute_force() {
    let w = GeometryInstance::parse("B:2:2:2:sp").unwrap();
    let beta = closed_form_count(&w, CountKind::Beta, 2, 2, None).unwrap();
    assert_eq!(beta, BigInt::from(4));
    assert_eq!(common_opposite("B:2:2:2:sp", PointRelation::Opposite), 4);

    let e = GeometryInstance::parse("B:2:4:2:ell").unwrap();
    let gamma = closed_form_count(&e, CountKind::Gamma, 2, 4, None).unwrap();
    assert_eq!(gamma, BigInt::from(8));
    assert_eq!(common_opposite("B:2:4:2:ell", PointRelation::Collinear), 8);

    // generators opposite a generator: rank(M + M'^perp) is the whole space
    let d = closed_form_count(&w, CountKind::D, 2, 2, Some(2)).unwrap();
    assert_eq!(d, BigInt::from(8));
    let en = Enumeration::build(&w).unwrap();
    let f = &w.field;
    let m = en.registry.subspace(2, 0);
    let opposite = (0..en.registry.count(2) as u32)
        .filter(|&id| {
            let mp = perp(&w, en.registry.subspace(2, id)).unwrap();
            m.join(f, &mp).rank() == 4
        })
        .count();
    assert_eq!(opposite, 8);
    // the same count for every rank and several polar spaces
    for s in ["B:2:4:2:ell", "B:3:2:2:sp", "B:2:1:4:herm"] {
        let (g, en) = setup(s);
        let counts = Counts::of(&g);
        for i in 1..=g.n {
            let u = en.registry.subspace(i, 0);
            let found = (0..en.registry.count(i) as u32)
                .filter(|&id| u.join(&g.field, &perp(&g, en.registry.subspace(i, id)).unwrap()).rank() == g.ambient_dim)
                .count();
            assert_eq!(BigInt::from(found), counts.d(i as i64).unwrap(), "{s} rank {i}");
        }
    }
}

#[test]
fn generator_classes_split_evenly() {
    for (s, half) in [("B:2:0:2:hyp", 3usize), ("B:4:0:2:hyp", 135)] {
        let (g, en) = setup(s);
        let n = g.n;
        let gens = en.registry.count(n);
        assert_eq!(gens, 2 * half);
        let classes: Vec<GeneratorClass> =
            (0..gens as u32).map(|id| generator_class(&g, &en, en.registry.subspace(n, id)).unwrap()).collect();
        assert_eq!(classes[0], GeneratorClass::Plus);
        assert_eq!(classes.iter().filter(|&&c| c == GeneratorClass::Plus).count(), half);
        // parity partition: same class iff intersection rank has the parity of n
        for a in (0..gens).step_by(11) {
            for b in (0..gens).step_by(7) {
                let r = en.registry.subspace(n, a as u32).meet_rank(&g.field, en.registry.subspace(n, b as u32));
                assert_eq!(classes[a] == classes[b], r % 2 == n % 2);
            }
        }
    }
    let w = GeometryInstance::parse("B:2:2:2:sp").unwrap();
    let en = Enumeration::build(&w).unwrap();
    assert!(generator_class(&w, &en, en.registry.subspace(2, 0)).is_err());
    let h = GeometryInstance::parse("B:2:0:2:hyp").unwrap();
    let hen = Enumeration::build(&h).unwrap();
    assert!(generator_class(&h, &hen, hen.registry.subspace(1, 0)).is_err());
}

#[test]
fn oriflamme_flags_pair_one_generator_of_each_class() {
    let (g, en) = setup("D:4:2");
    let classes = en.registry.generator_plus.as_ref().unwrap();
    for c in (0..en.num_flags()).step_by(101) {
        let flag = en.oriflamme_flag(c).unwrap();
        assert_eq!(flag.chain.len(), 2);
        assert!(!classes[flag.gen_minus as usize]);
        assert!(classes[flag.gen_plus as usize]);
        let m = en.registry.subspace(4, flag.gen_minus);
        let p = en.registry.subspace(4, flag.gen_plus);
        assert_eq!(m.meet_rank(&g.field, p), 3);
        let u2 = en.registry.subspace(2, flag.chain[1]);
        assert!(m.contains(&g.field, u2) && p.contains(&g.field, u2));
    }
}

#[test]
fn flag_budget_is_enforced() {
    let g = GeometryInstance::parse("B:3:2:2:sp").unwrap();
    assert!(Enumeration::build_with_limit(&g, 1000).is_err());
}
