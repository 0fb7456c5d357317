//! Scripted end-to-end runs with known answers, shared by the CLI's
//! `reproduce` command and the acceptance tests.

use std::sync::Arc;

use serde::Serialize;

use crate::classify::{
    degree_formula, enumerate_classes, full_sublattice_report, tau, verdict_at, Count,
    SignatureOutcome, SubfieldInput, VerdictStatus,
};
use crate::exact::{primes_up_to, Rat};
use crate::numfield::{NumberField, PlaceId};
use crate::problem::{Corpus, SpecError};
use crate::quat::{make_algebra, QuaternionAlgebra};
use crate::relext::{verify_embedding, SubfieldEmbedding};

#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub name: String,
    pub pass: bool,
    pub lines: Vec<String>,
}

impl Reproduction {
    fn new(name: impl Into<String>) -> Self {
        Reproduction {
            name: name.into(),
            pass: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, line: impl Into<String>) {
        let line = line.into();
        self.lines.push(format!("[{}] {line}", if ok { "ok" } else { "FAIL" }));
        self.pass &= ok;
    }

    fn note(&mut self, line: impl Into<String>) {
        self.lines.push(format!("     {}", line.into()));
    }
}

fn fail(name: &str, err: impl std::fmt::Display) -> Reproduction {
    let mut r = Reproduction::new(name);
    r.check(false, err.to_string());
    r
}

fn corpus_field(corpus: &Corpus, label: &str) -> Result<Arc<NumberField>, SpecError> {
    corpus
        .field(label)
        .ok_or_else(|| SpecError::new("$", format!("corpus has no field {label:?}")))
}

/// The A5 sextic with `A = B_S ⊗ K` for an even set `S` of primes: exactly
/// one Fuchsian class, `B = B_S`, and `S ∪ {19, 293}` is rejected at 293.
pub fn a5(corpus: &Corpus, s: &[u64], prime_bound: u64) -> Reproduction {
    let name = "a5";
    match a5_inner(corpus, s, prime_bound) {
        Ok(r) => r,
        Err(e) => fail(name, e),
    }
}

fn a5_inner(corpus: &Corpus, s: &[u64], prime_bound: u64) -> Result<Reproduction, Box<dyn std::error::Error>> {
    let mut r = Reproduction::new("a5");
    let k = corpus_field(corpus, "a5-sextic")?;
    if !s.len().is_multiple_of(2) || s.iter().any(|p| [19, 293].contains(p)) {
        return Err(format!("S = {s:?} must be even and avoid 19 and 293").into());
    }
    let e = SubfieldEmbedding::from_rationals(k.clone());
    let q = e.base().clone();
    let b_s = make_algebra(q.clone(), &s.iter().map(|&p| (p, 0)).collect::<Vec<_>>(), &[])?;
    let a = b_s.base_change(&e)?;
    let sig = k.signature();
    r.note(format!("K = {}, signature ({}, {})", k.defining_poly(), sig.r1, sig.r2));
    r.note(format!("S = {s:?}; Ram(A_S) = {a}"));
    for &p in s {
        let above: Vec<_> = a.finite_ramification().filter(|(q, _)| *q == p).collect();
        r.check(!above.is_empty(), format!("A_S ramifies above {p} ({} places)", above.len()));
    }

    let mut input = SubfieldInput::new("Q", e.clone());
    if let Some(cert) = corpus.certificate("a5-sextic") {
        input = input.with_certificate(cert);
    }
    let report = full_sublattice_report(&a, vec![input], prime_bound)?;
    r.check(
        report.fuchsian() == Count::Exact(1),
        format!("Fuchsian classes: {}", report.fuchsian()),
    );
    let over_q = report
        .entries
        .iter()
        .find(|x| x.relative_degree == 6)
        .ok_or("no entry for Q")?;
    if let crate::classify::EntryOutcome::Classified(res) = &over_q.outcome {
        r.note(format!("certification: {}", res.certification));
        if let Some(SignatureOutcome::Finite { classes }) = res.signatures.first().map(|s| &s.outcome) {
            for c in classes {
                r.note(format!("class at (c, d) = ({}, {}): {c}", c.c, c.d));
            }
            let expected: Vec<PlaceId> = s.iter().map(|&p| PlaceId::Finite { p, index: 0 }).collect();
            r.check(
                classes.len() == 1 && classes[0].ramification == expected,
                "the class is B_S",
            );
        } else {
            r.check(false, "classification over Q is not finite");
        }
    }

    let v293 = verdict_at(&a, &e, PlaceId::Finite { p: 293, index: 0 })?;
    let dec = k.decompose_prime(293)?;
    let witness = dec.places.iter().find(|w| w.local_degree() == 1);
    r.check(
        v293.status == VerdictStatus::Forbidden && witness.is_some(),
        format!(
            "Ram(B') = S + {{19, 293}} rejected: 293 is forbidden, {} has local degree 1 and is unramified in A",
            witness.map(|w| w.id().to_string()).unwrap_or_default()
        ),
    );
    let mut bigger: Vec<(u64, usize)> = s.iter().map(|&p| (p, 0)).collect();
    bigger.extend([(19, 0), (293, 0)]);
    let b_big = make_algebra(q, &bigger, &[])?;
    r.check(
        b_big.base_change(&e)? != a,
        "base change of S + {19, 293} differs from A_S",
    );
    let v19 = verdict_at(&a, &e, PlaceId::Finite { p: 19, index: 0 })?;
    r.check(
        v19.status == VerdictStatus::Free,
        "19 is free (every place above has local degree 2), but adding it alone breaks parity",
    );
    Ok(r)
}

/// Smallest `count` primes splitting completely in `k`.
pub fn split_primes(k: &NumberField, count: usize, bound: u64) -> Vec<u64> {
    primes_up_to(bound)
        .into_iter()
        .filter(|&p| {
            k.decompose_prime(p)
                .map(|d| d.places.len() == k.degree())
                .unwrap_or(false)
        })
        .take(count)
        .collect()
}

/// A cyclic field of prime degree `n` with `A` ramified at every place above
/// two split primes: `τ(n)` classes counting the trivial one.
pub fn cyclic(corpus: &Corpus, n: u64, prime_bound: u64) -> Reproduction {
    let name = format!("cyclic n={n}");
    match cyclic_inner(corpus, n, prime_bound) {
        Ok(r) => r,
        Err(e) => fail(&name, e),
    }
}

fn cyclic_inner(corpus: &Corpus, n: u64, prime_bound: u64) -> Result<Reproduction, Box<dyn std::error::Error>> {
    let label = match n {
        3 => "cyclic-cubic",
        5 => "cyclic-quintic",
        _ => return Err(format!("no bundled cyclic field of degree {n} (have 3 and 5)").into()),
    };
    let mut r = Reproduction::new(format!("cyclic n={n}"));
    let k = corpus_field(corpus, label)?;
    let group = corpus.automorphism_group(label).ok_or("no automorphisms")?;
    r.check(
        group.order() as u64 == n,
        format!("verified automorphism group of {} has order {}", k.defining_poly(), group.order()),
    );
    let split = split_primes(&k, 2, 1000);
    r.note(format!("split primes: {split:?}"));
    let a = QuaternionAlgebra::ramified_above(k.clone(), &split)?;
    r.note(format!("Ram(A) has {} places", a.ramification().len()));
    let over_q = SubfieldInput::new("Q", SubfieldEmbedding::from_rationals(k.clone()))
        .with_top_autos(group.elements().to_vec());
    let itself = SubfieldInput::new(label, SubfieldEmbedding::identity(k.clone())).with_base_autos(group);
    let report = full_sublattice_report(&a, vec![over_q, itself], prime_bound)?;
    let expected = tau(n).tau as usize;
    r.check(
        report.total == Count::Exact(expected),
        format!("classes including the trivial one: {} (tau({n}) = {expected})", report.total),
    );
    r.check(
        report.nontrivial == Count::Exact(expected - 1),
        format!("classes from proper subfields: {} (tau({n}) - 1 = {})", report.nontrivial, expected - 1),
    );
    r.check(
        report.fuchsian() == Count::Exact(1),
        format!("signature (1, 0): {}", report.fuchsian()),
    );
    Ok(r)
}

/// `(a, b) = (0, 1)`, `(c, d) = (1, 0)`, one ramified real place with two
/// real places above: the degree formula forces `[K:K₀] = 2`. Checked on
/// the formula and on `ℚ(√2) ⊂ ℚ(2^(1/4))`.
pub fn kleinian_degree(corpus: &Corpus, prime_bound: u64) -> Reproduction {
    match kleinian_inner(corpus, prime_bound) {
        Ok(r) => r,
        Err(e) => fail("kleinian-degree", e),
    }
}

fn kleinian_inner(corpus: &Corpus, prime_bound: u64) -> Result<Reproduction, Box<dyn std::error::Error>> {
    let mut r = Reproduction::new("kleinian-degree");
    let two = Rat::from_integer(2.into());
    let d = degree_formula(0, 1, 1, 0, &[2])?;
    r.check(d == two, format!("(2*1 + 0 + 2) / (2*0 + 1 + 1) = {d}"));

    let k0 = corpus_field(corpus, "q-sqrt2")?;
    let k = corpus_field(corpus, "quartic-2")?;
    let e = verify_embedding(k0, k.clone(), crate::exact::parse_poly("t^2")?)?;
    let a = make_algebra(k.clone(), &[], &[0, 1])?;
    let sig = a.lattice_signature()?;
    r.check(
        (sig.a, sig.b) == (0, 1),
        format!("A over {} ramified at both real places: (a, b) = ({}, {})", k.defining_poly(), sig.a, sig.b),
    );
    let input = SubfieldInput::new("q-sqrt2", e.clone()).with_top_autos(corpus.automorphisms("quartic-2"));
    let res = enumerate_classes(&a, &input, prime_bound)?;
    let inf = e.match_infinite_places()?;
    for s in &res.signatures {
        r.note(format!("(c, d) = ({}, {}): {}", s.c, s.d, s.outcome.count()));
    }
    r.check(
        res.signatures.iter().map(|s| (s.c, s.d)).collect::<Vec<_>>() == vec![(1, 0)],
        "only (c, d) = (1, 0) occurs",
    );
    let forced_real: Vec<usize> = res
        .forced
        .iter()
        .filter_map(|v| match v {
            PlaceId::Real { index } => Some(inf.real[*index].r),
            _ => None,
        })
        .collect();
    let d = degree_formula(sig.a, sig.b, 1, 0, &forced_real)?;
    r.check(
        d == two && e.relative_degree() == 2,
        format!("formula with r_K(v) = {forced_real:?} gives {d} = [K:K0]"),
    );
    Ok(r)
}
