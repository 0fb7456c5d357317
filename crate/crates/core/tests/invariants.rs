mod common;

use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use quatlat::classify::{
    degree_formula, embedding_criterion, enumerate_classes, find_even_places, place_verdicts, twist,
    Criterion, SignatureOutcome, SubfieldInput, VerdictStatus, ViolationWitness,
};
use quatlat::exact::{Lcg, Rat};
use quatlat::numfield::PlaceId;
use quatlat::problem::Corpus;
use quatlat::quat::{same_class, QuaternionAlgebra, QuatError};
use quatlat::relext::SubfieldEmbedding;

fn corpus() -> &'static Corpus {
    static C: OnceLock<Corpus> = OnceLock::new();
    C.get_or_init(|| Corpus::bundled().unwrap())
}

struct Bed {
    towers: Vec<common::Tower>,
    fibres: Vec<Vec<common::Fibre>>,
}

fn bed() -> &'static Bed {
    static B: OnceLock<Bed> = OnceLock::new();
    B.get_or_init(|| {
        let towers = common::towers(corpus());
        let fibres = towers.iter().map(|t| common::fibres(&t.embedding, 60)).collect();
        Bed { towers, fibres }
    })
}

fn input_for(t: &common::Tower) -> SubfieldInput {
    let c = corpus();
    let input = SubfieldInput::new(t.name.clone(), t.embedding.clone()).with_top_autos(c.automorphisms(&t.top_label));
    match c.certificate(&t.top_label) {
        Some(cert) if t.embedding.base().is_rational() => input.with_certificate(cert),
        _ => input,
    }
}

/// A random algebra over the top field: half are base changes, half are
/// arbitrary even sets over primes < 30.
fn random_top_algebra(i: usize, seed: u64) -> QuaternionAlgebra {
    let bed = bed();
    let t = &bed.towers[i];
    let mut rng = Lcg::new(seed);
    let ram = if rng.below(2) == 0 {
        let b = common::random_even_subset(&mut rng, &common::places_of(t.embedding.base(), 30), 2);
        common::local_base_change(&b, &bed.fibres[i])
    } else {
        common::random_even_subset(&mut rng, &common::places_of(t.embedding.top(), 30), 1)
    };
    QuaternionAlgebra::from_places(t.embedding.top().clone(), ram).unwrap()
}

fn random_base_algebra(e: &SubfieldEmbedding, seed: u64) -> QuaternionAlgebra {
    let mut rng = Lcg::new(seed);
    let b = common::random_even_subset(&mut rng, &common::places_of(e.base(), 30), 2);
    QuaternionAlgebra::from_places(e.base().clone(), b).unwrap()
}

#[test]
fn odd_ramification_is_rejected() {
    let k = corpus().field("q-sqrt5").unwrap();
    let err = QuaternionAlgebra::from_places(k, [PlaceId::Finite { p: 11, index: 0 }]).unwrap_err();
    assert!(matches!(err, QuatError::OddRamification { .. }), "{err}");
}

#[test]
fn tower_composition_quartic() {
    let c = corpus();
    for (top, sub) in [("quartic-2", "q-sqrt2"), ("cyclic-quartic", "q-sqrt5")] {
        let (_, mid) = c.subfields(top).into_iter().find(|(l, _)| l == sub).unwrap();
        let lower = SubfieldEmbedding::from_rationals(c.field(sub).unwrap());
        let direct = SubfieldEmbedding::from_rationals(c.field(top).unwrap());
        let mut rng = Lcg::new(11);
        for _ in 0..40 {
            let seed = rng.next_u64();
            let b = random_base_algebra(&lower, seed);
            let two_step = b.base_change(&lower).unwrap().base_change(&mid).unwrap();
            assert_eq!(two_step, b.base_change(&direct).unwrap(), "{top}: B = {b}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn base_change_preserves_parity_and_matches_local_degrees(i in 0usize..9, seed in any::<u64>()) {
        let bed = bed();
        let t = &bed.towers[i];
        let b = random_base_algebra(&t.embedding, seed);
        let a = b.base_change(&t.embedding).unwrap();
        prop_assert_eq!(a.ramification().len() % 2, 0);
        let ram: BTreeSet<PlaceId> = b.ramification().clone();
        prop_assert_eq!(a.ramification(), &common::local_base_change(&ram, &bed.fibres[i]));
    }

    #[test]
    fn criterion_agrees_with_search(i in 0usize..9, seed in any::<u64>()) {
        let bed = bed();
        let t = &bed.towers[i];
        let a = random_top_algebra(i, seed);
        let cert = input_for(t).certify().unwrap();
        let crit = embedding_criterion(&a, &t.embedding, 59, &cert).unwrap();
        let brute = common::brute_force(&a, &bed.fibres[i]);
        prop_assert_eq!(crit.exists(), brute.is_some(), "A = {}", a);
        if let Criterion::NotExists { violations, .. } = crit {
            let ram = a.ramification();
            for v in violations {
                let fib = bed.fibres[i].iter().find(|f| match &v {
                    ViolationWitness::EvenDegreeRamified { base, .. }
                    | ViolationWitness::PartiallyRamified { base, .. } => f.base == *base,
                });
                let fib = fib.expect("violation at a searched place");
                let degree = |w: &PlaceId| fib.above.iter().find(|(x, _)| x == w).map(|(_, d)| *d).unwrap();
                match v {
                    ViolationWitness::EvenDegreeRamified { place, .. } => {
                        prop_assert!(ram.contains(&place));
                        prop_assert_eq!(degree(&place) % 2, 0);
                    }
                    ViolationWitness::PartiallyRamified { ramified, unramified, .. } => {
                        prop_assert!(ram.contains(&ramified) && !ram.contains(&unramified));
                        prop_assert_eq!(degree(&unramified) % 2, 1);
                    }
                }
            }
        }
    }

    #[test]
    fn verdict_trichotomy(i in 0usize..9, seed in any::<u64>()) {
        let bed = bed();
        let t = &bed.towers[i];
        let a = random_top_algebra(i, seed);
        let table = place_verdicts(&a, &t.embedding, 59).unwrap();
        let mut bases = BTreeSet::new();
        for v in &table.verdicts {
            prop_assert!(bases.insert(v.place), "{} listed twice", v.place);
            let all_odd_ramified = v.ramified.iter().all(|w| v.odd.contains(w));
            let expected = if !all_odd_ramified {
                VerdictStatus::Violation
            } else if v.ramified.is_empty() && v.odd.is_empty() {
                VerdictStatus::Free
            } else if v.ramified.is_empty() {
                VerdictStatus::Forbidden
            } else if v.ramified.len() == v.odd.len() {
                VerdictStatus::Forced
            } else {
                VerdictStatus::Violation
            };
            prop_assert_eq!(v.status, expected, "{}", v.place);
            prop_assert_eq!(v.violation().is_some(), v.status == VerdictStatus::Violation);
        }
        for w in a.ramification() {
            prop_assert!(table.verdicts.iter().any(|v| v.ramified.contains(w)), "{} has no verdict", w);
        }
        let cert = input_for(t).certify().unwrap();
        if let Ok(Criterion::Exists { .. }) = quatlat::classify::criterion_from_table(&table, &cert) {
            prop_assert!(table.violations().is_empty());
        }
    }

    #[test]
    fn classes_satisfy_the_degree_formula(i in 0usize..9, seed in any::<u64>()) {
        let bed = bed();
        let t = &bed.towers[i];
        let a = random_top_algebra(i, seed);
        let Ok(res) = enumerate_classes(&a, &input_for(t), 59) else { return Ok(()) };
        let sig = a.lattice_signature().unwrap();
        let inf = t.embedding.match_infinite_places().unwrap();
        for s in &res.signatures {
            let classes = match &s.outcome {
                SignatureOutcome::Finite { classes } | SignatureOutcome::LowerBound { classes, .. } => classes,
                SignatureOutcome::Infinite { .. } => continue,
            };
            for c in classes {
                let rs: Vec<usize> = c.ramification.iter().filter_map(|v| match v {
                    PlaceId::Real { index } => Some(inf.real[*index].r),
                    _ => None,
                }).collect();
                let d = degree_formula(sig.a, sig.b, c.c, c.d, &rs).unwrap();
                prop_assert_eq!(d, Rat::from_integer(t.embedding.relative_degree().into()));
                let b = QuaternionAlgebra::from_places(t.embedding.base().clone(), c.ramification.iter().copied()).unwrap();
                prop_assert_eq!(b.base_change(&t.embedding).unwrap(), a.clone());
            }
        }
    }

    #[test]
    fn same_class_is_an_equivalence(s1 in any::<u64>(), s2 in any::<u64>(), g in 1usize..3) {
        let c = corpus();
        let group = c.automorphism_group("cyclic-cubic").unwrap();
        let k = c.field("cyclic-cubic").unwrap();
        let e = SubfieldEmbedding::identity(k);
        let x = random_base_algebra(&e, s1);
        let y = random_base_algebra(&e, s2);
        let z = QuaternionAlgebra::from_places(e.base().clone(), x.transport(&group, g).unwrap()).unwrap();
        prop_assert!(same_class(&x, &x, &group).unwrap());
        prop_assert!(same_class(&x, &z, &group).unwrap());
        prop_assert!(same_class(&z, &x, &group).unwrap());
        prop_assert_eq!(same_class(&x, &y, &group).unwrap(), same_class(&y, &x, &group).unwrap());
        if same_class(&x, &y, &group).unwrap() {
            prop_assert!(same_class(&z, &y, &group).unwrap());
        }
    }

    #[test]
    fn twists_keep_the_base_change(seed in any::<u64>(), i in 0usize..12, j in 0usize..12) {
        prop_assume!(i != j);
        let c = corpus();
        let e = SubfieldEmbedding::from_rationals(c.field("q-sqrt5").unwrap());
        static FREE: OnceLock<Vec<PlaceId>> = OnceLock::new();
        let free = FREE.get_or_init(|| {
            let k = c.field("q-sqrt5").unwrap();
            find_even_places(&SubfieldEmbedding::from_rationals(k), 200, 12).unwrap()
        });
        let b = random_base_algebra(&e, seed);
        let (p1, p2) = (free[i], free[j]);
        prop_assume!(!b.ramification().contains(&p1) && !b.ramification().contains(&p2));
        let t = twist(&b, &e, p1, p2).unwrap();
        prop_assert_eq!(t.base_change(&e).unwrap(), b.base_change(&e).unwrap());
        prop_assert_eq!(t.ramification().len(), b.ramification().len() + 2);
    }
}
