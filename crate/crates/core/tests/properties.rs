//! Property tests over random flags, points and parameters.

use std::sync::OnceLock;

use flagspec::geometry::counts::Counts;
use flagspec::geometry::opposition::{is_opposite_literal, Opposition};
use flagspec::spectra::quotient::closed_form_quotient;
use flagspec::spectra::scheme::relation;
use flagspec::spectra::{
    eval_chi, eval_f, family_count, family_eigenvalue, flag_type, size_of_type_class, type_profile,
};
use flagspec::{Enumeration, GeometryInstance};
use proptest::prelude::*;

const INSTANCES: [&str; 7] =
    ["A:3:2", "A:2:3", "B:2:2:2:sp", "B:2:4:2:ell", "B:2:1:4:herm", "B:2:0:2:hyp", "B:2:3:4:herm"];

fn instances() -> &'static Vec<(GeometryInstance, Enumeration)> {
    static CELL: OnceLock<Vec<(GeometryInstance, Enumeration)>> = OnceLock::new();
    CELL.get_or_init(|| {
        INSTANCES
            .iter()
            .map(|s| {
                let g = GeometryInstance::parse(s).unwrap();
                let en = Enumeration::build(&g).unwrap();
                (g, en)
            })
            .collect()
    })
}

fn pick(i: usize, c: usize, x: usize) -> (&'static GeometryInstance, &'static Enumeration, usize, u32) {
    let (g, en) = &instances()[i % INSTANCES.len()];
    (g, en, c % en.num_flags(), (x % en.num_points()) as u32)
}

/// Descriptors with closed forms only, no enumeration needed.
fn descriptor() -> impl Strategy<Value = String> {
    prop_oneof![
        (1usize..6, prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9])).prop_map(|(n, q)| format!("A:{n}:{q}")),
        (1usize..5, prop::sample::select(vec![2u64, 3, 4, 5, 7])).prop_map(|(n, q)| format!("B:{n}:2:{q}:sp")),
        (1usize..5, prop::sample::select(vec![3u64, 5, 7])).prop_map(|(n, q)| format!("B:{n}:2:{q}:par")),
        (1usize..5, prop::sample::select(vec![2u64, 3, 4, 5])).prop_map(|(n, q)| format!("B:{n}:4:{q}:ell")),
        (1usize..5, prop::sample::select(vec![2u64, 3, 4])).prop_map(|(n, q)| format!("B:{n}:0:{q}:hyp")),
        (1usize..4, prop::sample::select(vec![4u64, 9]), prop::sample::select(vec![1u32, 3]))
            .prop_map(|(n, q, e2)| format!("B:{n}:{e2}:{q}:herm")),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn opposition_is_symmetric_and_matches_the_predicate(i in 0usize..7, c in any::<usize>(), d in any::<usize>()) {
        let (g, en, c, _) = pick(i, c, 0);
        let d = d % en.num_flags();
        let opp = Opposition::new(g, en);
        let nc = opp.neighbors(c);
        prop_assert_eq!(nc.binary_search(&(d as u32)).is_ok(), is_opposite_literal(g, en, c, d));
        for &e in nc.iter().take(8) {
            prop_assert!(opp.neighbors(e as usize).binary_search(&(c as u32)).is_ok());
        }
    }

    #[test]
    fn types_partition_the_flags(i in 0usize..7, x in any::<usize>(), c in any::<usize>()) {
        let (g, en, c, x) = pick(i, c, x);
        let profile = type_profile(g, en, x).unwrap();
        let t = flag_type(g, en, c, x).unwrap();
        prop_assert_eq!(t, profile.types[c] as usize);
        prop_assert!((1..=profile.num_types).contains(&t));
        let sizes = profile.class_sizes();
        prop_assert_eq!(sizes.iter().sum::<u64>(), en.num_flags() as u64);
        for (k, &s) in sizes.iter().enumerate() {
            prop_assert_eq!(size_of_type_class(g, k + 1).unwrap(), s.into());
        }
    }

    #[test]
    fn case_formula_equals_lift(i in 0usize..7, x in any::<usize>(), c in any::<usize>(), j in 1usize..3) {
        let (g, en, c, x) = pick(i, c, x);
        prop_assume!(family_count(g).is_ok());
        let j = 1 + (j - 1) % family_count(g).unwrap();
        prop_assert_eq!(eval_chi(g, en, j, x, c).unwrap(), eval_f(g, en, j, x, c).unwrap());
    }

    #[test]
    fn lifted_identity_at_random_flags(i in 0usize..7, x in any::<usize>(), c in any::<usize>(), j in 1usize..3) {
        let (g, en, c, x) = pick(i, c, x);
        prop_assume!(family_count(g).is_ok());
        let j = 1 + (j - 1) % family_count(g).unwrap();
        let lambda = family_eigenvalue(g).unwrap();
        let sum: i64 = Opposition::new(g, en).neighbors(c).iter().map(|&d| eval_f(g, en, j, x, d as usize).unwrap()).sum();
        prop_assert_eq!(sum, lambda * eval_f(g, en, j, x, c).unwrap());
    }

    #[test]
    fn point_relations_are_symmetric(i in 0usize..7, x in any::<usize>(), y in any::<usize>()) {
        let (g, en, _, x) = pick(i, 0, x);
        let y = (y % en.num_points()) as u32;
        let r = relation(g, en, x, y).unwrap();
        prop_assert_eq!(r, relation(g, en, y, x).unwrap());
        prop_assert_eq!(r == 0, x == y);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closed_quotient_counts_consistently(s in descriptor()) {
        let g = GeometryInstance::parse(&s).unwrap();
        let q = closed_form_quotient(&g).unwrap();
        let sizes: Vec<i64> = (1..=q.size())
            .map(|i| i64::try_from(size_of_type_class(&g, i).unwrap()).unwrap())
            .collect();
        prop_assert!(q.double_counting_holds(&sizes));
        let valency = Counts::of(&g).valency().unwrap();
        prop_assert!(q.row_sums().iter().all(|&r| valency == r.into()), "{:?}", q.row_sums());
        prop_assert_eq!(sizes.iter().sum::<i64>() as u64, Counts::of(&g).flag_count().unwrap());
        prop_assert!(q.entries.iter().flatten().all(|&v| v >= 0));
    }

    #[test]
    fn families_are_quotient_eigenvectors(s in descriptor()) {
        let g = GeometryInstance::parse(&s).unwrap();
        prop_assume!(family_count(&g).is_ok());
        let q = closed_form_quotient(&g).unwrap();
        for j in 1..=family_count(&g).unwrap() {
            let f = flagspec::spectra::eigvec_family(&g, j).unwrap();
            prop_assert_eq!(f.quotient_eigenvalue(&q), Some(num_rational::BigRational::from_integer(f.eigenvalue.into())), "j = {}", j);
        }
    }
}
