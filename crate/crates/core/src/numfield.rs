//! Number fields `ℚ[t]/(f)` given by a monic integral defining polynomial.
//!
//! A [`NumberField`] knows its signature, the discriminant of its defining
//! polynomial and the rational primes that ramify in it. Finite places are
//! read off the factorization of `f` modulo `p`, which is only valid when
//! `p` does not divide the index `[O_K : ℤ[θ]]`; the Dedekind criterion
//! decides that, and primes failing it are reported as
//! [`NumFieldError::IndexDivisible`] rather than guessed at.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use schemars::JsonSchema;
use thiserror::Error;

use crate::exact::{
    discriminant, factor_integer, factor_mod_p, is_prime, poly_gcd, primes_up_to, ExactError,
    FpPoly, Poly, Rat, RealRoot, RootIsolation,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumFieldError {
    #[error("defining polynomial must be monic with integer coefficients: {0}")]
    NotMonicIntegral(String),
    #[error("defining polynomial has a rational root {root} and is reducible")]
    Reducible { root: BigInt },
    #[error("defining polynomial must have degree at least 1")]
    ConstantPolynomial,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{p} divides the index of Z[theta]; decomposition unsupported at {p}")]
    IndexDivisible { p: u64 },
    #[error("discriminant has a prime factor {0} beyond 63 bits")]
    PrimeTooLarge(String),
    #[error("no place with index {index} above {p}")]
    UnknownFinitePlace { p: u64, index: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Counts of real and complex places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub r1: usize,
    pub r2: usize,
}

/// How irreducibility of the defining polynomial was established.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Irreducibility {
    /// Degree 1.
    Trivial,
    /// Irreducible modulo `p`.
    ModP { p: u64 },
    /// Factorization degree patterns modulo these primes admit no common
    /// proper sub-sum, so no factorization over ℚ is compatible with all.
    DegreePatterns { primes: Vec<u64> },
    /// The caller vouched for it.
    Asserted,
    /// No certificate found below the search bound.
    Unverified,
}

impl Irreducibility {
    pub fn is_certified(&self) -> bool {
        !matches!(self, Irreducibility::Unverified)
    }
}

/// A prime of `K` above a rational prime `p`, cut out by an irreducible factor
/// of the defining polynomial modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinitePlace {
    pub p: u64,
    /// Position among the places above `p`, in factor order.
    pub index: usize,
    /// Monic irreducible factor of `f mod p` (the radical factor).
    pub factor: FpPoly,
    /// Ramification index.
    pub e: usize,
    /// Residue degree.
    pub f: usize,
}

impl FinitePlace {
    /// `[K_w : ℚ_p] = e f`.
    pub fn local_degree(&self) -> usize {
        self.e * self.f
    }

    pub fn id(&self) -> PlaceId {
        PlaceId::Finite {
            p: self.p,
            index: self.index,
        }
    }
}

/// Finite places above `p`, plus whether `p` divides the index of `ℤ[θ]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeDecomposition {
    pub p: u64,
    pub places: Vec<FinitePlace>,
    /// When set, `places` mirrors the factorization of `f mod p` but the
    /// `(e, f)` values need not be those of the actual primes.
    pub index_divisible: bool,
}

impl PrimeDecomposition {
    /// Local degrees `e f`, ascending.
    pub fn splitting_type(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.places.iter().map(FinitePlace::local_degree).collect();
        v.sort_unstable();
        v
    }

    pub fn is_unramified(&self) -> bool {
        self.places.iter().all(|w| w.e == 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlaceKind {
    Real,
    Complex,
}

/// An archimedean place. Real places are numbered by increasing root value;
/// complex places by real part and then imaginary magnitude of the root in
/// the upper half plane.
#[derive(Debug, Clone)]
pub struct InfinitePlace {
    pub kind: PlaceKind,
    pub index: usize,
    /// Isolating interval, for real places.
    pub root: Option<RealRoot>,
    /// Approximate root (upper half plane for complex places).
    pub approx: Complex64,
}

/// Identifies a place of one particular field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlaceId {
    Finite { p: u64, index: usize },
    Real { index: usize },
    Complex { index: usize },
}

impl PlaceId {
    pub fn is_archimedean(&self) -> bool {
        !matches!(self, PlaceId::Finite { .. })
    }

    pub fn rational_prime(&self) -> Option<u64> {
        match self {
            PlaceId::Finite { p, .. } => Some(*p),
            _ => None,
        }
    }
}

impl fmt::Display for PlaceId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlaceId::Finite { p, index } => write!(f, "p{p}.{index}"),
            PlaceId::Real { index } => write!(f, "real{index}"),
            PlaceId::Complex { index } => write!(f, "complex{index}"),
        }
    }
}

/// Wire format: coefficients as decimal strings, ascending degree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldJson {
    pub poly: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

const CERTIFICATE_PRIME_BOUND: u64 = 100;

pub struct NumberField {
    label: String,
    poly: Poly,
    degree: usize,
    signature: Signature,
    disc: BigInt,
    ramified_primes: Vec<u64>,
    index_divisible_primes: Vec<u64>,
    irreducibility: Irreducibility,
    real_roots: RootIsolation,
    complex_roots: Vec<Complex64>,
    decompositions: Mutex<HashMap<u64, Arc<PrimeDecomposition>>>,
    seed: u64,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("label", &self.label)
            .field("poly", &self.poly)
            .field("signature", &self.signature)
            .finish()
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        self.poly == other.poly
    }
}

impl Eq for NumberField {}

impl NumberField {
    /// Build a field from a monic integral polynomial, searching for an
    /// irreducibility certificate.
    pub fn new(label: impl Into<String>, poly: Poly) -> Result<Self, NumFieldError> {
        Self::build(label.into(), poly, false)
    }

    /// Like [`NumberField::new`], but a missing certificate is recorded as
    /// [`Irreducibility::Asserted`] instead of `Unverified`.
    pub fn new_asserted(label: impl Into<String>, poly: Poly) -> Result<Self, NumFieldError> {
        Self::build(label.into(), poly, true)
    }

    /// ℚ itself, as `ℚ[t]/(t)`.
    pub fn rationals() -> Self {
        Self::build("Q".into(), Poly::t(), false).expect("Q is a field")
    }

    /// Seed for the randomized splitting step of factorization. Results do
    /// not depend on it.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.decompositions.lock().unwrap().clear();
        self
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn from_json(json: &FieldJson) -> Result<Self, NumFieldError> {
        let coeffs = json
            .poly
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<BigInt>()
                    .map_err(|_| NumFieldError::NotMonicIntegral(format!("bad coefficient {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let poly = Poly::from_bigints(&coeffs);
        let label = json.label.clone().unwrap_or_else(|| poly.to_string());
        Self::new(label, poly)
    }

    pub fn to_json(&self) -> FieldJson {
        FieldJson {
            poly: self
                .poly
                .coeffs()
                .iter()
                .map(|c| c.numer().to_string())
                .collect(),
            label: Some(self.label.clone()),
        }
    }

    fn build(label: String, poly: Poly, asserted: bool) -> Result<Self, NumFieldError> {
        let degree = match poly.degree() {
            None | Some(0) => return Err(NumFieldError::ConstantPolynomial),
            Some(d) => d,
        };
        if !poly.is_monic() || !poly.has_integer_coeffs() {
            return Err(NumFieldError::NotMonicIntegral(poly.to_string()));
        }
        if let Some(root) = integer_root(&poly) {
            if degree > 1 {
                return Err(NumFieldError::Reducible { root });
            }
        }
        if !poly_gcd(&poly, &poly.derivative()).is_constant() {
            // A repeated factor over ℚ without a rational root.
            return Err(NumFieldError::Exact(ExactError::NotSquarefree));
        }
        let disc = discriminant(&poly)?.to_integer();
        let real_roots = RootIsolation::new(&poly)?;
        let r1 = real_roots.count();
        let signature = Signature {
            r1,
            r2: (degree - r1) / 2,
        };
        let irreducibility = if degree == 1 {
            Irreducibility::Trivial
        } else {
            match irreducibility_certificate(&poly, &disc) {
                Some(c) => c,
                None if asserted => Irreducibility::Asserted,
                None => Irreducibility::Unverified,
            }
        };
        let complex_roots = if signature.r2 > 0 {
            upper_half_plane_roots(&poly, signature.r2)
        } else {
            Vec::new()
        };
        let mut field = NumberField {
            label,
            poly,
            degree,
            signature,
            disc,
            ramified_primes: Vec::new(),
            index_divisible_primes: Vec::new(),
            irreducibility,
            real_roots,
            complex_roots,
            decompositions: Mutex::new(HashMap::new()),
            seed: 0,
        };
        if !field.disc.abs().is_one() {
            for (q, _) in factor_integer(&field.disc).factors {
                let q = q
                    .to_u64()
                    .filter(|&q| q < (1 << 63))
                    .ok_or_else(|| NumFieldError::PrimeTooLarge(q.to_string()))?;
                if field.dedekind_index_check(q) {
                    field.ramified_primes.push(q);
                } else {
                    field.index_divisible_primes.push(q);
                }
            }
        }
        Ok(field)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn defining_poly(&self) -> &Poly {
        &self.poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_rational(&self) -> bool {
        self.degree == 1
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn is_totally_real(&self) -> bool {
        self.signature.r2 == 0
    }

    /// Discriminant of the defining polynomial.
    pub fn disc_defining(&self) -> &BigInt {
        &self.disc
    }

    /// Primes dividing the polynomial discriminant at which `ℤ[θ]` is
    /// `p`-maximal; exactly these are known to ramify.
    pub fn ramified_primes(&self) -> &[u64] {
        &self.ramified_primes
    }

    /// Primes dividing the polynomial discriminant that also divide the index;
    /// whether they ramify is not decided here.
    pub fn index_divisible_primes(&self) -> &[u64] {
        &self.index_divisible_primes
    }

    /// Every prime dividing the polynomial discriminant.
    pub fn discriminant_primes(&self) -> Vec<u64> {
        let mut v: Vec<u64> = self
            .ramified_primes
            .iter()
            .chain(&self.index_divisible_primes)
            .copied()
            .collect();
        v.sort_unstable();
        v
    }

    pub fn irreducibility(&self) -> &Irreducibility {
        &self.irreducibility
    }

    pub fn real_roots(&self) -> &[RealRoot] {
        &self.real_roots.roots
    }

    /// Dedekind criterion: `true` iff `p` does not divide `[O_K : ℤ[θ]]`.
    pub fn dedekind_index_check(&self, p: u64) -> bool {
        let disc_mod = (&self.disc % BigInt::from(p)).is_zero();
        if !disc_mod {
            return true;
        }
        let fbar = FpPoly::from_poly(&self.poly, p).expect("integral");
        let factors = factor_mod_p(&fbar, 0).expect("prime modulus");
        dedekind_from_factors(&self.poly, p, &factors)
    }

    fn raw_decomposition(&self, p: u64) -> Result<Arc<PrimeDecomposition>, NumFieldError> {
        if !is_prime(p) {
            return Err(NumFieldError::NotPrime(p));
        }
        if let Some(d) = self.decompositions.lock().unwrap().get(&p) {
            return Ok(d.clone());
        }
        let fbar = FpPoly::from_poly(&self.poly, p)?;
        let factors = factor_mod_p(&fbar, self.seed)?;
        let ramifies = factors.iter().any(|(_, m)| *m > 1);
        let index_divisible = ramifies && !dedekind_from_factors(&self.poly, p, &factors);
        let places = factors
            .into_iter()
            .enumerate()
            .map(|(index, (factor, e))| FinitePlace {
                p,
                index,
                f: factor.degree().unwrap(),
                factor,
                e,
            })
            .collect();
        let dec = Arc::new(PrimeDecomposition {
            p,
            places,
            index_divisible,
        });
        // Two threads may race here; both computed the same value.
        let mut cache = self.decompositions.lock().unwrap();
        Ok(cache.entry(p).or_insert(dec).clone())
    }

    /// Places above `p` with their `(e, f)`.
    ///
    /// The seed only drives equal-degree splitting; the result is the same
    /// for every seed and is cached per prime.
    pub fn decompose_prime(&self, p: u64) -> Result<Arc<PrimeDecomposition>, NumFieldError> {
        let dec = self.raw_decomposition(p)?;
        if dec.index_divisible {
            return Err(NumFieldError::IndexDivisible { p });
        }
        Ok(dec)
    }

    /// Same as [`NumberField::decompose_prime`] but factoring with an explicit
    /// seed and bypassing the cache.
    pub fn decompose_prime_seeded(
        &self,
        p: u64,
        seed: u64,
    ) -> Result<PrimeDecomposition, NumFieldError> {
        if !is_prime(p) {
            return Err(NumFieldError::NotPrime(p));
        }
        let fbar = FpPoly::from_poly(&self.poly, p)?;
        let factors = factor_mod_p(&fbar, seed)?;
        let ramifies = factors.iter().any(|(_, m)| *m > 1);
        if ramifies && !dedekind_from_factors(&self.poly, p, &factors) {
            return Err(NumFieldError::IndexDivisible { p });
        }
        Ok(PrimeDecomposition {
            p,
            places: factors
                .into_iter()
                .enumerate()
                .map(|(index, (factor, e))| FinitePlace {
                    p,
                    index,
                    f: factor.degree().unwrap(),
                    factor,
                    e,
                })
                .collect(),
            index_divisible: false,
        })
    }

    pub fn finite_place(&self, p: u64, index: usize) -> Result<FinitePlace, NumFieldError> {
        let dec = self.decompose_prime(p)?;
        dec.places
            .get(index)
            .cloned()
            .ok_or(NumFieldError::UnknownFinitePlace { p, index })
    }

    /// Real places in increasing root order, then complex places.
    pub fn infinite_places(&self) -> Vec<InfinitePlace> {
        let mut out: Vec<InfinitePlace> = self
            .real_roots
            .roots
            .iter()
            .enumerate()
            .map(|(index, r)| InfinitePlace {
                kind: PlaceKind::Real,
                index,
                root: Some(r.clone()),
                approx: Complex64::new(r.approx(), 0.0),
            })
            .collect();
        out.extend(
            self.complex_roots
                .iter()
                .enumerate()
                .map(|(index, &z)| InfinitePlace {
                    kind: PlaceKind::Complex,
                    index,
                    root: None,
                    approx: z,
                }),
        );
        out
    }
}

fn lift(g: &FpPoly) -> Poly {
    Poly::new(
        g.coeffs()
            .iter()
            .map(|&c| Rat::from_integer(BigInt::from(c)))
            .collect(),
    )
}

// f = prod g_i^e_i mod p; with g = prod g_i and h = prod g_i^(e_i - 1) lifted
// to ℤ, p is coprime to the index iff gcd(g, h, (f - g h)/p) = 1 mod p.
fn dedekind_from_factors(f: &Poly, p: u64, factors: &[(FpPoly, usize)]) -> bool {
    let mut g = Poly::one();
    let mut h = Poly::one();
    for (gi, e) in factors {
        let li = lift(gi);
        g = &g * &li;
        for _ in 1..*e {
            h = &h * &li;
        }
    }
    let diff = f - &(&g * &h);
    let pr = Rat::from_integer(BigInt::from(p));
    let quotient = diff.scale(&pr.recip());
    debug_assert!(quotient.has_integer_coeffs());
    let fq = FpPoly::from_poly(&quotient, p).expect("integral");
    let gb = FpPoly::from_poly(&g, p).expect("integral");
    let hb = FpPoly::from_poly(&h, p).expect("integral");
    gb.gcd(&hb).gcd(&fq).is_one()
}

// Integer root of a monic integral polynomial, if any. Any rational root is
// an integer, so it is enough to look at integers inside each isolating
// interval of the real roots.
fn integer_root(f: &Poly) -> Option<BigInt> {
    let sqfree = {
        let g = poly_gcd(f, &f.derivative());
        f.div_rem(&g).0
    };
    let iso = RootIsolation::new(&sqfree).ok()?;
    for r in &iso.roots {
        let mut r = r.clone();
        while r.width() > Rat::one() {
            r.bisect(&sqfree);
        }
        let mut k = r.lo.ceil();
        while k <= r.hi {
            if f.eval(&k).is_zero() {
                return Some(k.to_integer());
            }
            k += Rat::one();
        }
    }
    None
}

fn proper_subset_sums(degrees: &[usize], n: usize) -> Vec<bool> {
    let mut reach = vec![false; n + 1];
    reach[0] = true;
    for &d in degrees {
        for s in (d..=n).rev() {
            if reach[s - d] {
                reach[s] = true;
            }
        }
    }
    reach[0] = false;
    reach[n] = false;
    reach
}

fn irreducibility_certificate(f: &Poly, disc: &BigInt) -> Option<Irreducibility> {
    let n = f.degree()?;
    let mut common = vec![true; n + 1];
    common[0] = false;
    common[n] = false;
    let mut used = Vec::new();
    for p in primes_up_to(CERTIFICATE_PRIME_BOUND) {
        if (disc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fbar = FpPoly::from_poly(f, p).ok()?;
        let factors = factor_mod_p(&fbar, 0).ok()?;
        if factors.len() == 1 {
            return Some(Irreducibility::ModP { p });
        }
        let degrees: Vec<usize> = factors.iter().map(|(g, _)| g.degree().unwrap()).collect();
        let sums = proper_subset_sums(&degrees, n);
        let before = common.iter().filter(|&&b| b).count();
        for (c, s) in common.iter_mut().zip(&sums) {
            *c &= *s;
        }
        if common.iter().filter(|&&b| b).count() < before {
            used.push(p);
        }
        if common.iter().all(|&b| !b) {
            return Some(Irreducibility::DegreePatterns { primes: used });
        }
    }
    None
}

// Durand-Kerner in floating point; only used to label complex places.
fn upper_half_plane_roots(f: &Poly, r2: usize) -> Vec<Complex64> {
    let coeffs: Vec<f64> = f
        .coeffs()
        .iter()
        .map(|c| c.to_f64().unwrap_or(0.0))
        .collect();
    let n = coeffs.len() - 1;
    let eval = |z: Complex64| {
        coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    };
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32)).collect();
    for _ in 0..2000 {
        let mut delta = 0.0f64;
        for i in 0..n {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..n {
                if i != j {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-14 {
            break;
        }
    }
    let mut upper: Vec<Complex64> = roots.into_iter().filter(|z| z.im > 0.0).collect();
    upper.sort_by(|a, b| {
        a.re.partial_cmp(&b.re)
            .unwrap()
            .then(a.im.abs().partial_cmp(&b.im.abs()).unwrap())
    });
    upper.truncate(r2);
    while upper.len() < r2 {
        upper.push(Complex64::new(f64::NAN, f64::NAN));
    }
    upper
}
