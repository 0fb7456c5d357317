//! Quaternion algebras as ramification data.
//!
//! An algebra over a number field is determined by its (even) set of
//! ramified places, so that set is all we store. Base change along
//! `K₀ ↪ K` uses `inv_w = [K_w : (K₀)_v] · inv_v` in `½ℤ/ℤ`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use schemars::JsonSchema;
use thiserror::Error;

use crate::numfield::{NumFieldError, NumberField, PlaceId};
use crate::relext::{AutomorphismGroup, RelExtError, SubfieldEmbedding};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuatError {
    #[error("{count} ramified places; a quaternion algebra ramifies at an even number of places")]
    OddRamification { count: usize },
    #[error("complex place {0} cannot ramify")]
    ComplexPlaceListed(PlaceId),
    #[error("place {0} does not exist in this field")]
    UnknownPlace(PlaceId),
    #[error("algebra is ramified at every archimedean place, so it has no lattice")]
    TotallyDefinite,
    #[error("embedding base is not the algebra's field")]
    FieldMismatch,
    #[error("bad prime in ramification data: {0}")]
    BadPrime(String),
    #[error(transparent)]
    RelExt(#[from] RelExtError),
    #[error(transparent)]
    NumField(#[from] NumFieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct FinitePlaceRef {
    pub p: String,
    pub factor_index: usize,
}

/// Wire format; `field` names a field in the surrounding document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct AlgebraJson {
    pub field: String,
    #[serde(default)]
    pub ram_finite: Vec<FinitePlaceRef>,
    #[serde(default)]
    pub ram_real: Vec<usize>,
}

#[derive(Clone)]
pub struct QuaternionAlgebra {
    field: Arc<NumberField>,
    ram: BTreeSet<PlaceId>,
}

impl PartialEq for QuaternionAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.field.defining_poly() == other.field.defining_poly() && self.ram == other.ram
    }
}

impl Eq for QuaternionAlgebra {}

impl fmt::Debug for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuaternionAlgebra({} | {})", self.field.label(), self)
    }
}

impl fmt::Display for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ram.is_empty() {
            return f.write_str("{}");
        }
        let parts: Vec<String> = self.ram.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// `(a, b)`: split real places and complex places.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSignature {
    pub a: usize,
    pub b: usize,
    /// False only for `M₂(K)`.
    pub cocompact: bool,
}

/// Build an algebra from `(p, factor index)` pairs and real place indices.
pub fn make_algebra(
    field: Arc<NumberField>,
    finite: &[(u64, usize)],
    real: &[usize],
) -> Result<QuaternionAlgebra, QuatError> {
    let places = finite
        .iter()
        .map(|&(p, index)| PlaceId::Finite { p, index })
        .chain(real.iter().map(|&index| PlaceId::Real { index }));
    QuaternionAlgebra::from_places(field, places)
}

impl QuaternionAlgebra {
    pub fn from_places(
        field: Arc<NumberField>,
        places: impl IntoIterator<Item = PlaceId>,
    ) -> Result<Self, QuatError> {
        let ram: BTreeSet<PlaceId> = places.into_iter().collect();
        for v in &ram {
            match *v {
                PlaceId::Complex { .. } => return Err(QuatError::ComplexPlaceListed(*v)),
                PlaceId::Real { index } => {
                    if index >= field.signature().r1 {
                        return Err(QuatError::UnknownPlace(*v));
                    }
                }
                PlaceId::Finite { p, index } => {
                    let dec = field.decompose_prime(p).map_err(|e| match e {
                        NumFieldError::NotPrime(_) => QuatError::UnknownPlace(*v),
                        e => e.into(),
                    })?;
                    if index >= dec.places.len() {
                        return Err(QuatError::UnknownPlace(*v));
                    }
                }
            }
        }
        if !ram.len().is_multiple_of(2) {
            return Err(QuatError::OddRamification { count: ram.len() });
        }
        Ok(QuaternionAlgebra { field, ram })
    }

    /// `M₂(K)`.
    pub fn matrix_algebra(field: Arc<NumberField>) -> Self {
        QuaternionAlgebra {
            field,
            ram: BTreeSet::new(),
        }
    }

    /// Ramified at every place above each prime in `primes`, which must have
    /// even total count.
    pub fn ramified_above(field: Arc<NumberField>, primes: &[u64]) -> Result<Self, QuatError> {
        let mut places = Vec::new();
        for &p in primes {
            let dec = field.decompose_prime(p)?;
            places.extend(dec.places.iter().map(|w| w.id()));
        }
        Self::from_places(field, places)
    }

    pub fn from_json(json: &AlgebraJson, field: Arc<NumberField>) -> Result<Self, QuatError> {
        let mut finite = Vec::with_capacity(json.ram_finite.len());
        for r in &json.ram_finite {
            let p: u64 = r
                .p
                .trim()
                .parse()
                .map_err(|_| QuatError::BadPrime(r.p.clone()))?;
            finite.push((p, r.factor_index));
        }
        make_algebra(field, &finite, &json.ram_real)
    }

    pub fn to_json(&self, field_name: &str) -> AlgebraJson {
        AlgebraJson {
            field: field_name.to_string(),
            ram_finite: self
                .finite_ramification()
                .map(|(p, i)| FinitePlaceRef {
                    p: p.to_string(),
                    factor_index: i,
                })
                .collect(),
            ram_real: self.real_ramification().collect(),
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn ramification(&self) -> &BTreeSet<PlaceId> {
        &self.ram
    }

    pub fn is_matrix_algebra(&self) -> bool {
        self.ram.is_empty()
    }

    pub fn finite_ramification(&self) -> impl Iterator<Item = (u64, usize)> + '_ {
        self.ram.iter().filter_map(|v| match *v {
            PlaceId::Finite { p, index } => Some((p, index)),
            _ => None,
        })
    }

    pub fn real_ramification(&self) -> impl Iterator<Item = usize> + '_ {
        self.ram.iter().filter_map(|v| match *v {
            PlaceId::Real { index } => Some(index),
            _ => None,
        })
    }

    /// Rational primes below the finite ramified places.
    pub fn ramified_rational_primes(&self) -> BTreeSet<u64> {
        self.finite_ramification().map(|(p, _)| p).collect()
    }

    pub fn lattice_signature(&self) -> Result<LatticeSignature, QuatError> {
        let sig = self.field.signature();
        let a = sig.r1 - self.real_ramification().count();
        if a + sig.r2 == 0 {
            return Err(QuatError::TotallyDefinite);
        }
        Ok(LatticeSignature {
            a,
            b: sig.r2,
            cocompact: !self.ram.is_empty(),
        })
    }

    /// `B ⊗_{K₀} K`.
    pub fn base_change(&self, e: &SubfieldEmbedding) -> Result<QuaternionAlgebra, QuatError> {
        if e.base().defining_poly() != self.field.defining_poly() {
            return Err(QuatError::FieldMismatch);
        }
        let mut ram = BTreeSet::new();
        for p in self.ramified_rational_primes() {
            for m in e.match_finite_places(p)? {
                if self.ram.contains(&m.base) {
                    ram.extend(
                        m.fibers
                            .iter()
                            .filter(|w| w.local_degree % 2 == 1)
                            .map(|w| w.place),
                    );
                }
            }
        }
        if self.real_ramification().next().is_some() {
            let inf = e.match_infinite_places()?;
            for v in self.real_ramification() {
                ram.extend(
                    inf.real[v]
                        .real_above
                        .iter()
                        .map(|&index| PlaceId::Real { index }),
                );
            }
        }
        if ram.len() % 2 != 0 {
            return Err(QuatError::OddRamification { count: ram.len() });
        }
        Ok(QuaternionAlgebra {
            field: e.top().clone(),
            ram,
        })
    }

    /// The ramification set moved by the automorphism `group.elements()[i]`
    /// (as the inverse place map; the group contains both).
    pub fn transport(&self, group: &AutomorphismGroup, i: usize) -> Result<BTreeSet<PlaceId>, QuatError> {
        let mut actions: BTreeMap<u64, BTreeMap<PlaceId, PlaceId>> = BTreeMap::new();
        let mut real: Option<BTreeMap<usize, usize>> = None;
        let mut out = BTreeSet::new();
        for v in &self.ram {
            let w = match *v {
                PlaceId::Finite { p, .. } => {
                    if let std::collections::btree_map::Entry::Vacant(e) = actions.entry(p) {
                        e.insert(group.finite_action(i, p)?);
                    }
                    actions[&p][v]
                }
                PlaceId::Real { index } => {
                    if real.is_none() {
                        real = Some(group.real_action(i)?);
                    }
                    PlaceId::Real {
                        index: real.as_ref().unwrap()[&index],
                    }
                }
                PlaceId::Complex { .. } => unreachable!("complex places never ramify"),
            };
            out.insert(w);
        }
        Ok(out)
    }
}

/// True iff some verified automorphism carries `Ram(b1)` onto `Ram(b2)`.
pub fn same_class(
    b1: &QuaternionAlgebra,
    b2: &QuaternionAlgebra,
    group: &AutomorphismGroup,
) -> Result<bool, QuatError> {
    if b1.field.defining_poly() != b2.field.defining_poly() {
        return Ok(false);
    }
    if b1.ram == b2.ram {
        return Ok(true);
    }
    if b1.ram.len() != b2.ram.len() {
        return Ok(false);
    }
    for i in 1..group.order() {
        if b1.transport(group, i)? == b2.ram {
            return Ok(true);
        }
    }
    Ok(false)
}
