//! Descent of quaternion algebras along `K₀ ↪ K` and counting of
//! commensurability classes of sublattices.
//!
//! For every place `v` of `K₀` the places `w | v` split into those of odd and
//! even local degree. `A = B ⊗ K` forces `Ram(A)` above `v` to be either all
//! odd-degree `w` (then `v ∈ Ram(B)`) or none of them (then `v ∉ Ram(B)`),
//! and no even-degree `w` may ramify. Places with no odd-degree `w` at all
//! are free: adding them to `Ram(B)` does not change `B ⊗ K`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{primes_up_to, Poly, Rat};
use crate::numfield::{NumFieldError, NumberField, PlaceId};
use crate::quat::{same_class, QuatError, QuaternionAlgebra};
use crate::relext::{
    is_relatively_galois, AutomorphismGroup, GaloisStatus, InfiniteMatch, PlaceMatch, RelExtError,
    SubfieldEmbedding,
};

/// Free archimedean places are enumerated by subsets; beyond this many the
/// enumeration is refused.
pub const MAX_FREE_ARCHIMEDEAN: usize = 12;
/// Same for free finite places when classes are listed explicitly.
pub const MAX_FREE_FINITE: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("degree formula denominator 2d + c + #Ram_inf(B) is zero")]
    ZeroDenominator,
    #[error(
        "inconclusive: {forced} forced places (odd) and no free place found up to {prime_bound}, \
         with no certificate ruling free places in or out"
    )]
    Inconclusive { forced: usize, prime_bound: u64 },
    #[error("the algebra ramifies above {p}, where place data is unavailable")]
    UnsupportedRamification { p: u64 },
    #[error("{place} is {status}, not free")]
    NotFree { place: PlaceId, status: VerdictStatus },
    #[error("{0} is already ramified")]
    AlreadyRamified(PlaceId),
    #[error("twist needs two distinct places")]
    SamePlace,
    #[error("the algebra is not over the top field of the embedding")]
    FieldMismatch,
    #[error("splitting type {found:?} at p = {p} is not in the certificate")]
    CertificateViolated { p: u64, found: Vec<usize> },
    #[error("splitting-type certificates apply only over the rationals")]
    CertificateNotApplicable,
    #[error("{count} free {kind} places is too many to enumerate")]
    TooManyFreePlaces { count: usize, kind: &'static str },
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    RelExt(#[from] RelExtError),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
}

/// `[K:K₀] = (2b + a + Σ r_K(v_j)) / (2d + c + #Ram_∞(B))`, the sum over the
/// real places `v_j` ramified in `B`.
pub fn degree_formula(
    a: usize,
    b: usize,
    c: usize,
    d: usize,
    ramified_real_r: &[usize],
) -> Result<Rat, ClassifyError> {
    let den = 2 * d + c + ramified_real_r.len();
    if den == 0 {
        return Err(ClassifyError::ZeroDenominator);
    }
    let num = 2 * b + a + ramified_real_r.iter().sum::<usize>();
    Ok(Rat::new(BigInt::from(num), BigInt::from(den)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivisorCount {
    pub n: u64,
    pub tau: u64,
}

pub fn tau(n: u64) -> DivisorCount {
    assert!(n >= 1, "tau is defined for n >= 1");
    let mut m = n;
    let mut count = 1;
    let mut q = 2;
    while q * q <= m {
        let mut k = 0;
        while m.is_multiple_of(q) {
            m /= q;
            k += 1;
        }
        count *= k + 1;
        q += 1;
    }
    if m > 1 {
        count *= 2;
    }
    DivisorCount { n, tau: count }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    Forced,
    Forbidden,
    Free,
    Violation,
}

impl fmt::Display for VerdictStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictStatus::Forced => "forced",
            VerdictStatus::Forbidden => "forbidden",
            VerdictStatus::Free => "free",
            VerdictStatus::Violation => "violation",
        })
    }
}

/// The verdict at a base place `v`, with `A_v` (ramified places above) and
/// `Odd_v` (odd local degree places above).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceVerdict {
    pub place: PlaceId,
    pub status: VerdictStatus,
    pub ramified: Vec<PlaceId>,
    pub odd: Vec<PlaceId>,
    pub even: Vec<PlaceId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ViolationWitness {
    /// `w` ramifies in `A` but has even local degree over `v`.
    EvenDegreeRamified { base: PlaceId, place: PlaceId },
    /// `w` ramifies and `w'` (odd degree, same `v`) does not.
    PartiallyRamified {
        base: PlaceId,
        ramified: PlaceId,
        unramified: PlaceId,
    },
}

impl PlaceVerdict {
    fn new(
        place: PlaceId,
        fibers: impl IntoIterator<Item = (PlaceId, usize)>,
        ram: &BTreeSet<PlaceId>,
    ) -> Self {
        let (mut ramified, mut odd, mut even) = (Vec::new(), Vec::new(), Vec::new());
        for (w, deg) in fibers {
            if ram.contains(&w) {
                ramified.push(w);
            }
            if deg % 2 == 1 {
                odd.push(w);
            } else {
                even.push(w);
            }
        }
        let status = if ramified.iter().any(|w| !odd.contains(w)) {
            VerdictStatus::Violation
        } else if ramified.len() == odd.len() {
            if odd.is_empty() {
                VerdictStatus::Free
            } else {
                VerdictStatus::Forced
            }
        } else if ramified.is_empty() {
            VerdictStatus::Forbidden
        } else {
            VerdictStatus::Violation
        };
        PlaceVerdict {
            place,
            status,
            ramified,
            odd,
            even,
        }
    }

    pub fn violation(&self) -> Option<ViolationWitness> {
        if self.status != VerdictStatus::Violation {
            return None;
        }
        if let Some(&w) = self.ramified.iter().find(|w| self.even.contains(w)) {
            return Some(ViolationWitness::EvenDegreeRamified {
                base: self.place,
                place: w,
            });
        }
        let unramified = *self.odd.iter().find(|w| !self.ramified.contains(w))?;
        Some(ViolationWitness::PartiallyRamified {
            base: self.place,
            ramified: self.ramified[0],
            unramified,
        })
    }
}

fn finite_verdicts(matches: &[PlaceMatch], ram: &BTreeSet<PlaceId>) -> Vec<PlaceVerdict> {
    matches
        .iter()
        .map(|m| {
            PlaceVerdict::new(
                m.base,
                m.fibers.iter().map(|w| (w.place, w.local_degree)),
                ram,
            )
        })
        .collect()
}

fn archimedean_verdicts(inf: &InfiniteMatch, ram: &BTreeSet<PlaceId>) -> Vec<PlaceVerdict> {
    let mut out = Vec::new();
    for a in &inf.real {
        let fibers = a
            .real_above
            .iter()
            .map(|&index| (PlaceId::Real { index }, 1))
            .chain(
                a.complex_above
                    .iter()
                    .map(|&index| (PlaceId::Complex { index }, 2)),
            );
        out.push(PlaceVerdict::new(
            PlaceId::Real { index: a.base_index },
            fibers,
            ram,
        ));
    }
    for (j, above) in inf.complex.iter().enumerate() {
        let fibers = above.iter().map(|&index| (PlaceId::Complex { index }, 1));
        out.push(PlaceVerdict::new(PlaceId::Complex { index: j }, fibers, ram));
    }
    out
}

/// Verdicts at every archimedean base place, every base place under
/// `Ram(A)`, every base place over a prime dividing either discriminant, and
/// every base place over a prime up to `prime_bound`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictTable {
    pub verdicts: Vec<PlaceVerdict>,
    pub prime_bound: u64,
    /// Discriminant primes where one of the fields has no usable place data.
    pub unsupported: Vec<u64>,
}

impl VerdictTable {
    pub fn get(&self, place: &PlaceId) -> Option<&PlaceVerdict> {
        self.verdicts
            .binary_search_by(|v| v.place.cmp(place))
            .ok()
            .map(|i| &self.verdicts[i])
    }

    pub fn with_status(&self, status: VerdictStatus) -> impl Iterator<Item = &PlaceVerdict> + '_ {
        self.verdicts.iter().filter(move |v| v.status == status)
    }

    pub fn forced(&self) -> Vec<PlaceId> {
        self.with_status(VerdictStatus::Forced).map(|v| v.place).collect()
    }

    pub fn free_finite(&self) -> Vec<PlaceId> {
        self.with_status(VerdictStatus::Free)
            .filter(|v| !v.place.is_archimedean())
            .map(|v| v.place)
            .collect()
    }

    pub fn free_archimedean(&self) -> Vec<PlaceId> {
        self.with_status(VerdictStatus::Free)
            .filter(|v| v.place.is_archimedean())
            .map(|v| v.place)
            .collect()
    }

    pub fn violations(&self) -> Vec<ViolationWitness> {
        self.verdicts.iter().filter_map(|v| v.violation()).collect()
    }
}

fn check_field(a: &QuaternionAlgebra, e: &SubfieldEmbedding) -> Result<(), ClassifyError> {
    if a.field().defining_poly() != e.top().defining_poly() {
        return Err(ClassifyError::FieldMismatch);
    }
    Ok(())
}

fn place_data_missing(err: &RelExtError) -> bool {
    matches!(
        err,
        RelExtError::ImageNotIntegral { .. } | RelExtError::NumField(NumFieldError::IndexDivisible { .. })
    )
}

pub fn place_verdicts(
    a: &QuaternionAlgebra,
    e: &SubfieldEmbedding,
    prime_bound: u64,
) -> Result<VerdictTable, ClassifyError> {
    check_field(a, e)?;
    let under_a = a.ramified_rational_primes();
    let mut primes: BTreeSet<u64> = primes_up_to(prime_bound).into_iter().collect();
    primes.extend(under_a.iter().copied());
    primes.extend(e.top().discriminant_primes());
    primes.extend(e.base().discriminant_primes());

    let ram = a.ramification();
    let per_prime: Vec<(u64, Result<Vec<PlaceMatch>, RelExtError>)> = primes
        .into_par_iter()
        .map(|p| (p, e.match_finite_places(p)))
        .collect();

    let mut verdicts = archimedean_verdicts(&e.match_infinite_places()?, ram);
    let mut unsupported = Vec::new();
    for (p, m) in per_prime {
        match m {
            Ok(m) => verdicts.extend(finite_verdicts(&m, ram)),
            Err(err) if place_data_missing(&err) => {
                if under_a.contains(&p) {
                    return Err(ClassifyError::UnsupportedRamification { p });
                }
                unsupported.push(p);
            }
            Err(err) => return Err(err.into()),
        }
    }
    verdicts.sort_by_key(|x| x.place);
    Ok(VerdictTable {
        verdicts,
        prime_bound,
        unsupported,
    })
}

/// The verdict at one base place, for `A` over the top field.
pub fn verdict_at(
    a: &QuaternionAlgebra,
    e: &SubfieldEmbedding,
    place: PlaceId,
) -> Result<PlaceVerdict, ClassifyError> {
    check_field(a, e)?;
    let all = match place {
        PlaceId::Finite { p, .. } => finite_verdicts(&e.match_finite_places(p)?, a.ramification()),
        _ => archimedean_verdicts(&e.match_infinite_places()?, a.ramification()),
    };
    all.into_iter()
        .find(|v| v.place == place)
        .ok_or(ClassifyError::Quat(QuatError::UnknownPlace(place)))
}

/// Allowed decomposition types (multisets of local degrees over ℚ) of the
/// unramified primes of a field. Checked on every prime up to `sample_bound`;
/// beyond that it is taken on trust, which the report records.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SplittingTypeCertificate {
    pub allowed: Vec<Vec<usize>>,
    pub sample_bound: u64,
    #[serde(default = "yes")]
    pub asserted_by_user: bool,
}

fn yes() -> bool {
    true
}

impl SplittingTypeCertificate {
    pub fn new(allowed: Vec<Vec<usize>>, sample_bound: u64, asserted_by_user: bool) -> Self {
        let mut cert = SplittingTypeCertificate {
            allowed,
            sample_bound,
            asserted_by_user,
        };
        cert.normalize();
        cert
    }

    fn normalize(&mut self) {
        for t in &mut self.allowed {
            t.sort_unstable();
        }
        self.allowed.sort();
        self.allowed.dedup();
    }

    /// Every allowed type has an odd entry, so no unramified prime is free.
    pub fn excludes_free_primes(&self) -> bool {
        self.allowed.iter().all(|t| t.iter().any(|d| d % 2 == 1))
    }

    /// Check the sample range against the field.
    pub fn verify(&self, field: &NumberField) -> Result<(), ClassifyError> {
        let mut sorted = self.clone();
        sorted.normalize();
        for p in primes_up_to(self.sample_bound) {
            if field.discriminant_primes().contains(&p) {
                continue;
            }
            let found = field.decompose_prime(p)?.splitting_type();
            if sorted.allowed.binary_search(&found).is_err() {
                return Err(ClassifyError::CertificateViolated { p, found });
            }
        }
        Ok(())
    }
}

/// How the absence or abundance of free finite places beyond the search bound
/// is known.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certification {
    /// `K/K₀` is Galois of this order: every unramified `v` has all local
    /// degrees equal, so free places are infinite in number when the order
    /// is even (Chebotarev) and absent when it is odd.
    CertifiedGalois { order: usize },
    CertifiedByTypeCertificate {
        sample_bound: u64,
        asserted_by_user: bool,
    },
    Uncertified,
}

impl Certification {
    pub fn free_places_infinite(&self) -> bool {
        matches!(self, Certification::CertifiedGalois { order } if order % 2 == 0)
    }

    pub fn free_places_excluded(&self) -> bool {
        match self {
            Certification::CertifiedGalois { order } => order % 2 == 1,
            Certification::CertifiedByTypeCertificate { .. } => true,
            Certification::Uncertified => false,
        }
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::CertifiedGalois { order } if order % 2 == 0 => {
                f.write_str("certified: Galois even degree")
            }
            Certification::CertifiedGalois { .. } => f.write_str("certified: Galois odd degree"),
            Certification::CertifiedByTypeCertificate {
                sample_bound,
                asserted_by_user,
            } => {
                write!(f, "certified: splitting types checked to {sample_bound}")?;
                if *asserted_by_user {
                    f.write_str(", asserted beyond")?;
                }
                Ok(())
            }
            Certification::Uncertified => f.write_str("uncertified"),
        }
    }
}

/// A subfield to classify against, with its supporting data.
#[derive(Debug, Clone)]
pub struct SubfieldInput {
    pub name: String,
    pub embedding: SubfieldEmbedding,
    /// Verified automorphisms of `K₀`; classes are counted up to these.
    pub base_autos: AutomorphismGroup,
    /// Candidate automorphisms of `K`, used only to detect `K/K₀` Galois.
    pub top_autos: Vec<Poly>,
    pub certificate: Option<SplittingTypeCertificate>,
}

impl SubfieldInput {
    pub fn new(name: impl Into<String>, embedding: SubfieldEmbedding) -> Self {
        let base_autos = AutomorphismGroup::trivial(embedding.base().clone());
        SubfieldInput {
            name: name.into(),
            embedding,
            base_autos,
            top_autos: Vec::new(),
            certificate: None,
        }
    }

    pub fn with_base_autos(mut self, g: AutomorphismGroup) -> Self {
        self.base_autos = g;
        self
    }

    pub fn with_top_autos(mut self, autos: Vec<Poly>) -> Self {
        self.top_autos = autos;
        self
    }

    pub fn with_certificate(mut self, cert: SplittingTypeCertificate) -> Self {
        self.certificate = Some(cert);
        self
    }

    pub fn certify(&self) -> Result<Certification, ClassifyError> {
        if let GaloisStatus::Galois { order } = is_relatively_galois(&self.embedding, &self.top_autos) {
            return Ok(Certification::CertifiedGalois { order });
        }
        let Some(cert) = &self.certificate else {
            return Ok(Certification::Uncertified);
        };
        if !self.embedding.base().is_rational() {
            return Err(ClassifyError::CertificateNotApplicable);
        }
        cert.verify(self.embedding.top())?;
        if !cert.excludes_free_primes() {
            return Ok(Certification::Uncertified);
        }
        Ok(Certification::CertifiedByTypeCertificate {
            sample_bound: cert.sample_bound,
            asserted_by_user: cert.asserted_by_user,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Criterion {
    Exists {
        forced: Vec<PlaceId>,
        free_found: Vec<PlaceId>,
        free_infinite: bool,
    },
    NotExists {
        violations: Vec<ViolationWitness>,
        /// No violation, but an odd number of forced places and certainly
        /// no free place to fix the parity.
        parity_obstruction: bool,
    },
}

impl Criterion {
    pub fn exists(&self) -> bool {
        matches!(self, Criterion::Exists { .. })
    }
}

/// Decide from a verdict table whether some `B` over `K₀` has `B ⊗ K ≅ A`.
pub fn criterion_from_table(
    table: &VerdictTable,
    cert: &Certification,
) -> Result<Criterion, ClassifyError> {
    let violations = table.violations();
    if !violations.is_empty() {
        return Ok(Criterion::NotExists {
            violations,
            parity_obstruction: false,
        });
    }
    let forced = table.forced();
    let mut free_found = table.free_archimedean();
    free_found.extend(table.free_finite());
    if forced.len().is_multiple_of(2) || !free_found.is_empty() || cert.free_places_infinite() {
        return Ok(Criterion::Exists {
            forced,
            free_found,
            free_infinite: cert.free_places_infinite(),
        });
    }
    if cert.free_places_excluded() && table.unsupported.is_empty() {
        return Ok(Criterion::NotExists {
            violations: Vec::new(),
            parity_obstruction: true,
        });
    }
    Err(ClassifyError::Inconclusive {
        forced: forced.len(),
        prime_bound: table.prime_bound,
    })
}

pub fn embedding_criterion(
    a: &QuaternionAlgebra,
    e: &SubfieldEmbedding,
    prime_bound: u64,
    cert: &Certification,
) -> Result<Criterion, ClassifyError> {
    criterion_from_table(&place_verdicts(a, e, prime_bound)?, cert)
}

/// A class representative: `Ram(B)` over `K₀` and the signature of its
/// lattices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ClassRep {
    pub ramification: Vec<PlaceId>,
    pub c: usize,
    pub d: usize,
}

impl fmt::Display for ClassRep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ramification.iter().map(|v| v.to_string()).collect();
        write!(f, "Ram(B) = {{{}}}", parts.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SignatureOutcome {
    Finite {
        classes: Vec<ClassRep>,
    },
    Infinite {
        forced: Vec<PlaceId>,
        witnesses: Vec<PlaceId>,
        twist: String,
    },
    LowerBound {
        classes: Vec<ClassRep>,
        search_bound: u64,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SignatureResult {
    pub c: usize,
    pub d: usize,
    #[serde(flatten)]
    pub outcome: SignatureOutcome,
}

/// Number of classes: exact, infinite, or a lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Count {
    Exact(usize),
    AtLeast(usize),
    Infinite,
}

impl std::ops::Add for Count {
    type Output = Count;

    fn add(self, other: Count) -> Count {
        use Count::*;
        match (self, other) {
            (Infinite, _) | (_, Infinite) => Infinite,
            (Exact(a), Exact(b)) => Exact(a + b),
            (Exact(a) | AtLeast(a), Exact(b) | AtLeast(b)) => AtLeast(a + b),
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Exact(n) => write!(f, "{n}"),
            Count::AtLeast(n) => write!(f, ">= {n}"),
            Count::Infinite => f.write_str("infinitely many"),
        }
    }
}

impl SignatureOutcome {
    pub fn count(&self) -> Count {
        match self {
            SignatureOutcome::Finite { classes } => Count::Exact(classes.len()),
            SignatureOutcome::Infinite { .. } => Count::Infinite,
            SignatureOutcome::LowerBound { classes, .. } => Count::AtLeast(classes.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ClassificationResult {
    pub subfield: String,
    pub relative_degree: usize,
    pub criterion: Criterion,
    pub signatures: Vec<SignatureResult>,
    pub certification: Certification,
    pub forced: Vec<PlaceId>,
    pub free_archimedean: Vec<PlaceId>,
    pub free_finite_found: Vec<PlaceId>,
    pub unsupported_primes: Vec<u64>,
    pub prime_bound: u64,
}

impl ClassificationResult {
    pub fn count(&self) -> Count {
        self.signatures
            .iter()
            .fold(Count::Exact(0), |acc, s| acc + s.outcome.count())
    }

    pub fn count_at(&self, c: usize, d: usize) -> Count {
        self.signatures
            .iter()
            .filter(|s| s.c == c && s.d == d)
            .fold(Count::Exact(0), |acc, s| acc + s.outcome.count())
    }
}

fn subsets<T: Copy>(items: &[T]) -> impl Iterator<Item = Vec<T>> + '_ {
    (0u64..1 << items.len()).map(move |mask| {
        items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &x)| x)
            .collect()
    })
}

fn sort_reps(reps: &mut [ClassRep]) {
    reps.sort_by(|x, y| {
        x.ramification
            .len()
            .cmp(&y.ramification.len())
            .then_with(|| x.ramification.cmp(&y.ramification))
    });
}

struct Enumerator<'a> {
    a: &'a QuaternionAlgebra,
    input: &'a SubfieldInput,
    inf: InfiniteMatch,
    a_sig: (usize, usize),
}

impl Enumerator<'_> {
    fn algebra(&self, ram: &[PlaceId]) -> Result<QuaternionAlgebra, ClassifyError> {
        Ok(QuaternionAlgebra::from_places(
            self.input.embedding.base().clone(),
            ram.iter().copied(),
        )?)
    }

    // B ⊗ K = A, and the degree formula returns [K:K₀] at B's signature.
    fn validate(&self, rep: &ClassRep) -> Result<(), ClassifyError> {
        let b = self.algebra(&rep.ramification)?;
        if &b.base_change(&self.input.embedding)? != self.a {
            return Err(ClassifyError::Inconsistent(format!(
                "{rep} does not base change to A"
            )));
        }
        let rs: Vec<usize> = b.real_ramification().map(|v| self.inf.real[v].r).collect();
        let deg = degree_formula(self.a_sig.0, self.a_sig.1, rep.c, rep.d, &rs)?;
        if deg != Rat::from_integer(self.input.embedding.relative_degree().into()) {
            return Err(ClassifyError::Inconsistent(format!(
                "degree formula gives {deg} for {rep}"
            )));
        }
        Ok(())
    }

    fn dedup(&self, reps: Vec<ClassRep>) -> Result<Vec<ClassRep>, ClassifyError> {
        let group = &self.input.base_autos;
        let mut kept: Vec<(ClassRep, QuaternionAlgebra)> = Vec::new();
        for rep in reps {
            let b = self.algebra(&rep.ramification)?;
            let mut seen = false;
            for (_, other) in &kept {
                if same_class(other, &b, group)? {
                    seen = true;
                    break;
                }
            }
            if !seen {
                kept.push((rep, b));
            }
        }
        Ok(kept.into_iter().map(|(r, _)| r).collect())
    }
}

/// Enumerate the classes of `B` over `K₀` with `B ⊗ K ≅ A`, grouped by the
/// signature `(c, d)` of their lattices.
pub fn enumerate_classes(
    a: &QuaternionAlgebra,
    input: &SubfieldInput,
    prime_bound: u64,
) -> Result<ClassificationResult, ClassifyError> {
    let e = &input.embedding;
    let table = place_verdicts(a, e, prime_bound)?;
    let cert = input.certify()?;
    let criterion = criterion_from_table(&table, &cert)?;
    let sig_a = a.lattice_signature()?;
    let mut result = ClassificationResult {
        subfield: input.name.clone(),
        relative_degree: e.relative_degree(),
        criterion: criterion.clone(),
        signatures: Vec::new(),
        certification: cert,
        forced: table.forced(),
        free_archimedean: table.free_archimedean(),
        free_finite_found: table.free_finite(),
        unsupported_primes: table.unsupported.clone(),
        prime_bound,
    };
    if !criterion.exists() {
        return Ok(result);
    }

    let en = Enumerator {
        a,
        input,
        inf: e.match_infinite_places()?,
        a_sig: (sig_a.a, sig_a.b),
    };
    let free_arch = &result.free_archimedean;
    let free_fin = &result.free_finite_found;
    if free_arch.len() > MAX_FREE_ARCHIMEDEAN {
        return Err(ClassifyError::TooManyFreePlaces {
            count: free_arch.len(),
            kind: "archimedean",
        });
    }
    let infinite = cert.free_places_infinite();
    if !infinite && free_fin.len() > MAX_FREE_FINITE {
        return Err(ClassifyError::TooManyFreePlaces {
            count: free_fin.len(),
            kind: "finite",
        });
    }
    let complete = cert.free_places_excluded() && table.unsupported.is_empty();
    let base_sig = e.base().signature();
    let forced = &result.forced;
    let forced_real = forced.iter().filter(|v| v.is_archimedean()).count();

    // (c, d) -> (explicit reps, infinite?, complete?)
    let mut groups: BTreeMap<(usize, usize), (Vec<ClassRep>, bool, bool)> = BTreeMap::new();
    for t in subsets(free_arch) {
        let c = base_sig.r1 - forced_real - t.len();
        let d = base_sig.r2;
        if c + d == 0 {
            continue;
        }
        let entry = groups.entry((c, d)).or_insert((Vec::new(), false, true));
        if infinite {
            entry.1 = true;
            continue;
        }
        entry.2 &= complete;
        for s in subsets(free_fin) {
            if !(forced.len() + t.len() + s.len()).is_multiple_of(2) {
                continue;
            }
            let mut ram: Vec<PlaceId> = forced.iter().chain(&t).chain(&s).copied().collect();
            ram.sort();
            entry.0.push(ClassRep { ramification: ram, c, d });
        }
    }

    for ((c, d), (reps, inf, complete)) in groups {
        let outcome = if inf {
            let witnesses: Vec<PlaceId> = free_fin.iter().take(2).copied().collect();
            SignatureOutcome::Infinite {
                forced: forced.clone(),
                witnesses,
                twist: "Ram(B) = forced places plus any even-parity choice of free places; \
                        each pair of free finite places gives a new class"
                    .into(),
            }
        } else {
            let mut reps = en.dedup(reps)?;
            sort_reps(&mut reps);
            for r in &reps {
                en.validate(r)?;
            }
            if complete {
                SignatureOutcome::Finite { classes: reps }
            } else {
                let reason = if table.unsupported.is_empty() {
                    "free places beyond the search bound are not ruled out".to_string()
                } else {
                    format!("no place data at primes {:?}", table.unsupported)
                };
                SignatureOutcome::LowerBound {
                    classes: reps,
                    search_bound: prime_bound,
                    reason,
                }
            }
        };
        result.signatures.push(SignatureResult { c, d, outcome });
    }
    Ok(result)
}

/// `B'` with `Ram(B') = Ram(B) ∪ {p1, p2}` for two free places; `B' ⊗ K`
/// equals `B ⊗ K`.
pub fn twist(
    b: &QuaternionAlgebra,
    e: &SubfieldEmbedding,
    p1: PlaceId,
    p2: PlaceId,
) -> Result<QuaternionAlgebra, ClassifyError> {
    if p1 == p2 {
        return Err(ClassifyError::SamePlace);
    }
    for p in [p1, p2] {
        if b.ramification().contains(&p) {
            return Err(ClassifyError::AlreadyRamified(p));
        }
    }
    let a = b.base_change(e)?;
    for p in [p1, p2] {
        let v = verdict_at(&a, e, p)?;
        if v.status != VerdictStatus::Free {
            return Err(ClassifyError::NotFree {
                place: p,
                status: v.status,
            });
        }
    }
    let twisted = QuaternionAlgebra::from_places(
        b.field().clone(),
        b.ramification().iter().copied().chain([p1, p2]),
    )?;
    if twisted.base_change(e)? != a {
        return Err(ClassifyError::Inconsistent("twist changed the base change".into()));
    }
    Ok(twisted)
}

/// Up to `want` base places over primes `≤ bound`, unramified in `K`, with
/// every local degree above them even.
pub fn find_even_places(
    e: &SubfieldEmbedding,
    bound: u64,
    want: usize,
) -> Result<Vec<PlaceId>, ClassifyError> {
    let mut skip: BTreeSet<u64> = e.top().discriminant_primes().into_iter().collect();
    skip.extend(e.base().discriminant_primes());
    let mut out = Vec::new();
    for p in primes_up_to(bound) {
        if out.len() >= want {
            break;
        }
        if skip.contains(&p) {
            continue;
        }
        for m in e.match_finite_places(p)? {
            if m.all_even() && out.len() < want {
                out.push(m.base);
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum EntryOutcome {
    Classified(Box<ClassificationResult>),
    Error { message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct ReportEntry {
    pub subfield: String,
    pub relative_degree: usize,
    /// `K₀ = K`, `B = A`.
    pub trivial: bool,
    pub outcome: EntryOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct SublatticeReport {
    pub field: String,
    pub a: usize,
    pub b: usize,
    pub entries: Vec<ReportEntry>,
    /// All classes, the trivial one included.
    pub total: Count,
    /// Classes from proper subfields only.
    pub nontrivial: Count,
    /// Classes rejected by `c | a` for totally real fields; always empty
    /// unless something upstream is wrong.
    pub screen_rejections: Vec<String>,
}

impl SublatticeReport {
    /// Classes of lattices in `SL₂(ℝ)`, i.e. signature `(1, 0)`.
    pub fn fuchsian(&self) -> Count {
        self.count_at(1, 0)
    }

    pub fn count_at(&self, c: usize, d: usize) -> Count {
        self.entries
            .iter()
            .filter_map(|e| match &e.outcome {
                EntryOutcome::Classified(r) => Some(r.count_at(c, d)),
                EntryOutcome::Error { .. } => None,
            })
            .fold(Count::Exact(0), |a, b| a + b)
    }

    /// Infinite beats lower bound beats finite.
    pub fn overall(&self) -> Count {
        self.total
    }
}

/// Classify against every supplied subfield, plus `K` itself if absent.
pub fn full_sublattice_report(
    a: &QuaternionAlgebra,
    subfields: Vec<SubfieldInput>,
    prime_bound: u64,
) -> Result<SublatticeReport, ClassifyError> {
    let sig = a.lattice_signature()?;
    let field: &Arc<NumberField> = a.field();
    let mut inputs = subfields;
    if !inputs.iter().any(|s| s.embedding.relative_degree() == 1) {
        inputs.push(SubfieldInput::new(
            field.label().to_string(),
            SubfieldEmbedding::identity(field.clone()),
        ));
    }
    let mut report = SublatticeReport {
        field: field.label().to_string(),
        a: sig.a,
        b: sig.b,
        entries: Vec::new(),
        total: Count::Exact(0),
        nontrivial: Count::Exact(0),
        screen_rejections: Vec::new(),
    };
    for input in &inputs {
        let trivial = input.embedding.relative_degree() == 1;
        let outcome = match enumerate_classes(a, input, prime_bound) {
            Ok(mut r) => {
                if field.is_totally_real() {
                    r.signatures.retain(|s| {
                        let ok = s.c > 0 && sig.a % s.c == 0;
                        if !ok {
                            report
                                .screen_rejections
                                .push(format!("{}: c = {} does not divide a = {}", input.name, s.c, sig.a));
                        }
                        ok
                    });
                }
                EntryOutcome::Classified(Box::new(r))
            }
            Err(err) => EntryOutcome::Error {
                message: err.to_string(),
            },
        };
        let count = match &outcome {
            EntryOutcome::Classified(r) => r.count(),
            EntryOutcome::Error { .. } => Count::AtLeast(0),
        };
        report.total = report.total + count;
        if !trivial {
            report.nontrivial = report.nontrivial + count;
        }
        report.entries.push(ReportEntry {
            subfield: input.name.clone(),
            relative_degree: input.embedding.relative_degree(),
            trivial,
            outcome,
        });
    }
    report.entries.sort_by_key(|e| std::cmp::Reverse(e.relative_degree));
    Ok(report)
}
