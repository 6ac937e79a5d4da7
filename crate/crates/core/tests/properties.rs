//! Cross-module properties on generated inputs, each checked against an
//! independent computation.

use std::collections::BTreeSet;

use num_traits::One;
use proptest::prelude::*;

use progjohn::certificate::{Document, Payload, ProgressionDoc};
use progjohn::{covering, group, oracle, progression, structure};
use progjohn::{AmbientGroup, CosetProgression, FiniteSet, FiniteSubgroup, Gap, GroupElement, Int, Rational};

const CAP: usize = 200_000;

fn q(n: i64) -> Rational {
    Rational::from_integer(Int::from(n))
}

fn ambient() -> impl Strategy<Value = AmbientGroup> {
    prop_oneof![
        Just(AmbientGroup::integers()),
        Just(AmbientGroup::lattice(2)),
        (2u64..=15).prop_map(AmbientGroup::cyclic),
        (2u64..=6, 2u64..=6).prop_map(|(a, b)| AmbientGroup::new(0, vec![Int::from(a), Int::from(b)]).unwrap()),
        (2u64..=6).prop_map(|m| AmbientGroup::new(1, vec![Int::from(m)]).unwrap()),
    ]
}

fn element(g: &AmbientGroup, raw: &[i64]) -> GroupElement {
    let coords = (0..g.coord_len()).map(|i| Int::from(raw[i % raw.len()])).collect();
    g.element(coords).unwrap()
}

/// A coset progression of rank <= 3 with half-integer dims allowed and an
/// occasional cyclic symmetry group.
fn coset_progression() -> impl Strategy<Value = CosetProgression> {
    (ambient(), prop::collection::vec((1i64..=6, prop::collection::vec(-4i64..=4, 2)), 0..=3), prop::collection::vec(0i64..=5, 2), any::<bool>()).prop_map(
        |(g, steps, h_raw, with_h)| {
            let dims = steps.iter().map(|(n, _)| Rational::new(Int::from(*n), Int::from(2))).collect();
            let vs = steps.iter().map(|(_, v)| element(&g, v)).collect();
            let gap = Gap::new(g.clone(), dims, vs).unwrap();
            let h = if with_h && !g.moduli().is_empty() {
                let mut raw = vec![0; g.free_rank()];
                raw.extend(h_raw.iter().cycle().take(g.moduli().len()));
                FiniteSubgroup::generated(&g, &[element(&g, &raw)], CAP).unwrap()
            } else {
                FiniteSubgroup::trivial(g.clone())
            };
            CosetProgression::new(gap, h).unwrap()
        },
    )
}

fn finite_set() -> impl Strategy<Value = FiniteSet> {
    (ambient(), prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 1..=7)).prop_map(|(g, raw)| {
        let xs = raw.iter().map(|r| element(&g, r)).collect();
        FiniteSet::from_vec(g, xs)
    })
}

fn dilation() -> impl Strategy<Value = Rational> {
    prop_oneof![Just(Rational::new(Int::from(1), Int::from(2))), Just(q(1)), Just(Rational::new(Int::from(3), Int::from(2))), Just(q(2))]
}

/// `A + B` straight from the definition.
fn pairwise(a: &FiniteSet, b: &FiniteSet) -> BTreeSet<GroupElement> {
    let g = a.group();
    a.iter().flat_map(|x| b.iter().map(move |y| g.add(x, y))).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn image_matches_the_oracle(p in coset_progression(), t in dilation()) {
        prop_assert_eq!(progression::image(&p, &t, CAP).unwrap(), oracle::brute_image(&p, &t, CAP).unwrap());
    }

    #[test]
    fn properness_matches_the_oracle(p in coset_progression(), t in dilation()) {
        let fast = progression::is_proper(&p, &t, CAP).unwrap();
        prop_assert_eq!(fast.proper, oracle::brute_is_proper(&p, &t, CAP).unwrap());
        if let Some((a, b)) = fast.witness {
            prop_assert!(a != b);
            prop_assert_eq!(p.evaluate_rep(&a), p.evaluate_rep(&b));
        }
    }

    #[test]
    fn images_grow_with_t(p in coset_progression(), s in dilation(), t in dilation()) {
        let (lo, hi) = if s <= t { (s, t) } else { (t, s) };
        let small = progression::image(&p, &lo, CAP).unwrap();
        let big = progression::image(&p, &hi, CAP).unwrap();
        prop_assert!(oracle::verify_inclusion(&small, &big).holds);
    }

    #[test]
    fn size_is_at_most_the_box_count(p in coset_progression(), t in dilation()) {
        let n = progression::size(&p, &t, CAP).unwrap();
        prop_assert!(Int::from(n) <= p.box_count(&t) * Int::from(p.symmetry_group().order()));
    }

    #[test]
    fn sumset_is_the_pairwise_sum(a in finite_set(), raw in prop::collection::vec(prop::collection::vec(-5i64..=5, 2), 1..=5)) {
        let b = FiniteSet::from_vec(a.group().clone(), raw.iter().map(|r| element(a.group(), r)).collect());
        let s = group::sumset(&a, &b).unwrap();
        prop_assert_eq!(s.iter().cloned().collect::<BTreeSet<_>>(), pairwise(&a, &b));
        prop_assert_eq!(s, group::sumset(&b, &a).unwrap());
    }

    #[test]
    fn iterated_sumset_adds_one_copy_at_a_time(a in finite_set(), l in 1u64..=6) {
        let la = group::iterated_sumset(&a, l, CAP).unwrap();
        let mut slow = a.iter().cloned().collect::<BTreeSet<_>>();
        for _ in 1..l {
            slow = pairwise(&FiniteSet::from_vec(a.group().clone(), slow.into_iter().collect()), &a);
        }
        prop_assert_eq!(la.iter().cloned().collect::<BTreeSet<_>>(), slow);
        prop_assert_eq!(la, oracle::brute_iterated_sumset(&a, l, CAP).unwrap());
    }

    #[test]
    fn symmetric_core_is_symmetric_and_large(a in finite_set()) {
        let (f, x) = structure::symmetric_core(&a).unwrap();
        let g = a.group();
        prop_assert!(f.is_subset(&a));
        prop_assert!(f.iter().all(|y| f.contains(&g.sub(&x, y))));
        let doubled = pairwise(&a, &a).len();
        prop_assert!(f.len() * doubled >= a.len() * a.len());
    }

    #[test]
    fn translate_containment_matches_a_full_scan(s in finite_set(), raw in prop::collection::vec(prop::collection::vec(-2i64..=2, 2), 1..=3)) {
        let g = s.group().clone();
        let t = FiniteSet::from_vec(g.clone(), raw.iter().map(|r| element(&g, r)).collect());
        let found = oracle::verify_translate_containment(&s, &t);
        let exists = s.iter().any(|a| t.iter().any(|b| {
            let x = g.sub(a, b);
            t.iter().all(|y| s.contains(&g.add(&x, y)))
        }));
        prop_assert_eq!(found.is_some(), exists);
        if let Some(x) = found {
            prop_assert!(t.iter().all(|y| s.contains(&g.add(&x, y))));
        }
    }

    #[test]
    fn translations_are_freiman_homomorphisms(a in finite_set(), raw in prop::collection::vec(-5i64..=5, 2)) {
        let g = a.group();
        let c = element(g, &raw);
        let f: Vec<_> = a.iter().map(|x| (x.clone(), g.add(x, &c))).collect();
        prop_assert!(structure::freiman_hom_check(g, g, &f).unwrap().is_hom);
    }

    #[test]
    fn doubling_cover_respects_the_bound(p in coset_progression(), t in 1i64..=3) {
        let t = q(t);
        let cov = covering::doubling_cover(&p, &t, CAP).unwrap();
        prop_assert!(Rational::from_integer(Int::from(cov.count)) <= covering::doubling_bound(p.rank(), &t));
        let g = p.group();
        let union: BTreeSet<GroupElement> = cov.bases.iter().flat_map(|b| cov.tile.iter().map(move |y| g.add(b, y))).collect();
        prop_assert!(cov.target.iter().all(|x| union.contains(x)));
        prop_assert_eq!(cov.tile, progression::image(&p, &Rational::one(), CAP).unwrap());
    }

    #[test]
    fn documents_round_trip(p in coset_progression()) {
        let doc = Document::new(Payload::Progression(ProgressionDoc::of(&p)));
        let text = doc.to_json();
        let back = Document::parse(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        match back.payload {
            Payload::Progression(d) => prop_assert_eq!(d.to_progression(CAP).unwrap(), p),
            _ => prop_assert!(false, "payload kind changed"),
        }
    }
}
