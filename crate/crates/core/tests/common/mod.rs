//! Oracles shared by the integration tests. Nothing here calls the verdict
//! or enumeration code; base change is recomputed from local degrees.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::sync::Arc;

use quatlat::exact::{primes_up_to, Lcg};
use quatlat::numfield::{NumberField, PlaceId};
use quatlat::problem::Corpus;
use quatlat::quat::QuaternionAlgebra;
use quatlat::relext::SubfieldEmbedding;

/// One base place with the places above it and their local degrees.
#[derive(Debug, Clone)]
pub struct Fibre {
    pub base: PlaceId,
    pub above: Vec<(PlaceId, usize)>,
}

/// Every real place of `K₀` and every finite place over primes `< bound`.
pub fn fibres(e: &SubfieldEmbedding, bound: u64) -> Vec<Fibre> {
    let mut out = Vec::new();
    let inf = e.match_infinite_places().unwrap();
    for s in &inf.real {
        let mut above: Vec<(PlaceId, usize)> =
            s.real_above.iter().map(|&i| (PlaceId::Real { index: i }, 1)).collect();
        above.extend(s.complex_above.iter().map(|&i| (PlaceId::Complex { index: i }, 2)));
        out.push(Fibre {
            base: PlaceId::Real { index: s.base_index },
            above,
        });
    }
    for p in primes_up_to(bound.saturating_sub(1)) {
        for m in e.match_finite_places(p).unwrap() {
            out.push(Fibre {
                base: m.base,
                above: m.fibers.iter().map(|w| (w.place, w.local_degree)).collect(),
            });
        }
    }
    out
}

/// Places of `K` above `v` that `B ⊗ K` ramifies at when `v ∈ Ram(B)`:
/// `inv_w = [K_w:(K₀)_v] · ½`.
pub fn ramified_above(f: &Fibre) -> BTreeSet<PlaceId> {
    f.above
        .iter()
        .filter(|(_, d)| d % 2 == 1)
        .map(|(w, _)| *w)
        .collect()
}

/// Base change recomputed from the fibres. Panics if `b` ramifies outside
/// the listed fibres.
pub fn local_base_change(b: &BTreeSet<PlaceId>, fibres: &[Fibre]) -> BTreeSet<PlaceId> {
    let mut out = BTreeSet::new();
    let mut seen = 0;
    for f in fibres {
        if b.contains(&f.base) {
            seen += 1;
            out.extend(ramified_above(f));
        }
    }
    assert_eq!(seen, b.len(), "B ramifies outside the search support");
    out
}

/// Exhaustive search for `B` supported on `fibres` with `B ⊗ K = A`. Each
/// fibre independently allows in, out, both or neither; a parity pass over
/// the fibres then decides. Returns a witness.
pub fn brute_force(a: &QuaternionAlgebra, fibres: &[Fibre]) -> Option<BTreeSet<PlaceId>> {
    let ram = a.ramification();
    let covered: BTreeSet<PlaceId> = fibres.iter().flat_map(|f| f.above.iter().map(|(w, _)| *w)).collect();
    if ram.iter().any(|w| !covered.contains(w)) {
        return None;
    }
    // reachable[parity] = a partial choice with that parity
    let mut reachable: [Option<BTreeSet<PlaceId>>; 2] = [Some(BTreeSet::new()), None];
    for f in fibres {
        let here: BTreeSet<PlaceId> = f.above.iter().map(|(w, _)| *w).filter(|w| ram.contains(w)).collect();
        let if_in = ramified_above(f);
        let mut options = Vec::new();
        if here.is_empty() {
            options.push(false);
        }
        if if_in == here {
            options.push(true);
        }
        let mut next: [Option<BTreeSet<PlaceId>>; 2] = [None, None];
        for (par, set) in reachable.iter().enumerate() {
            let Some(set) = set else { continue };
            for &take in &options {
                let np = (par + take as usize) % 2;
                if next[np].is_none() {
                    let mut s = set.clone();
                    if take {
                        s.insert(f.base);
                    }
                    next[np] = Some(s);
                }
            }
        }
        reachable = next;
    }
    reachable[0].take()
}

/// A named tower `K₀ ⊂ K` from the bundled corpus together with the
/// automorphisms of `K` used for certification.
pub struct Tower {
    pub name: String,
    pub embedding: SubfieldEmbedding,
    pub top_label: String,
}

pub fn towers(corpus: &Corpus) -> Vec<Tower> {
    let mut out = Vec::new();
    for label in ["q-i", "q-sqrt2", "q-sqrt3", "q-sqrt5", "q-sqrt-3", "pure-cubic", "cyclic-cubic"] {
        let k = corpus.field(label).unwrap();
        out.push(Tower {
            name: format!("Q < {label}"),
            embedding: SubfieldEmbedding::from_rationals(k),
            top_label: label.into(),
        });
    }
    for label in ["quartic-2", "cyclic-quartic"] {
        for (sub, e) in corpus.subfields(label) {
            out.push(Tower {
                name: format!("{sub} < {label}"),
                embedding: e,
                top_label: label.into(),
            });
        }
    }
    out
}

/// Finite places of `k` over primes `< bound` plus its real places.
pub fn places_of(k: &Arc<NumberField>, bound: u64) -> Vec<PlaceId> {
    let mut out: Vec<PlaceId> = (0..k.signature().r1).map(|index| PlaceId::Real { index }).collect();
    for p in primes_up_to(bound.saturating_sub(1)) {
        for w in &k.decompose_prime(p).unwrap().places {
            out.push(w.id());
        }
    }
    out
}

/// A random even subset of `pool`, each element kept with probability about
/// `density / 8`.
pub fn random_even_subset(rng: &mut Lcg, pool: &[PlaceId], density: u64) -> BTreeSet<PlaceId> {
    let mut s: BTreeSet<PlaceId> = pool.iter().copied().filter(|_| rng.below(8) < density).collect();
    if s.len() % 2 == 1 {
        if s.len() < pool.len() {
            let extra = pool.iter().copied().filter(|w| !s.contains(w)).nth(rng.below((pool.len() - s.len()) as u64) as usize);
            s.insert(extra.unwrap());
        } else {
            let first = *s.iter().next().unwrap();
            s.remove(&first);
        }
    }
    s
}
