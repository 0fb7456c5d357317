//! Subfield embeddings `K₀ ↪ K`, place matching and automorphisms.
//!
//! Subfields and automorphisms are input data: an embedding is the image of
//! the generator of `K₀` as a polynomial in the generator of `K`, and an
//! automorphism is the image of the generator of `K` in `K`. Both are checked
//! by exact composition modulo the defining polynomial, never discovered.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{eval_interval, evaluate_in_quotient, ExactError, FpQuotientElem, Poly};
use crate::numfield::{NumFieldError, NumberField, PlaceId, PlaceKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelExtError {
    #[error("degree {base} of the subfield does not divide degree {top}")]
    DegreeMismatch { base: usize, top: usize },
    #[error("image {image} does not send the subfield generator to a root of its polynomial")]
    NotAnEmbedding { image: String },
    #[error("{image} is not an automorphism")]
    NotAutomorphism { image: String },
    #[error("image has a denominator divisible by {p}; places above {p} cannot be matched")]
    ImageNotIntegral { p: u64 },
    #[error("place {place} of the top field lies over {candidates} base places")]
    MatchAmbiguous { place: PlaceId, candidates: usize },
    #[error("inconsistent place data: {0}")]
    Inconsistent(String),
    #[error("real roots could not be separated within {steps} refinement steps")]
    IntervalSeparationFailure { steps: usize },
    #[error(transparent)]
    NumField(#[from] NumFieldError),
}

impl From<ExactError> for RelExtError {
    fn from(e: ExactError) -> Self {
        RelExtError::NumField(NumFieldError::Exact(e))
    }
}

/// Wire format of an embedding; fields are referenced by name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmbeddingJson {
    pub base: String,
    pub top: String,
    pub image: Vec<String>,
}

/// A verified embedding `K₀ ↪ K`, `θ₀ ↦ image(θ)`.
#[derive(Debug, Clone)]
pub struct SubfieldEmbedding {
    base: Arc<NumberField>,
    top: Arc<NumberField>,
    image: Poly,
    relative_degree: usize,
}

/// Check that `image` sends a root of the base polynomial to a root in the
/// top field: `f₀(image(t)) ≡ 0 mod f_K`.
pub fn verify_embedding(
    base: Arc<NumberField>,
    top: Arc<NumberField>,
    image: Poly,
) -> Result<SubfieldEmbedding, RelExtError> {
    let (n0, n) = (base.degree(), top.degree());
    if n % n0 != 0 {
        return Err(RelExtError::DegreeMismatch { base: n0, top: n });
    }
    let image = image.rem(top.defining_poly());
    if !base
        .defining_poly()
        .compose_mod(&image, top.defining_poly())
        .is_zero()
    {
        return Err(RelExtError::NotAnEmbedding {
            image: image.to_string(),
        });
    }
    Ok(SubfieldEmbedding {
        base,
        top,
        image,
        relative_degree: n / n0,
    })
}

/// `(w, [K_w : (K₀)_v])` with the relative ramification and residue degrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub place: PlaceId,
    pub local_degree: usize,
    pub e: usize,
    pub f: usize,
}

/// All places of the top field over one base place.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaceMatch {
    pub base: PlaceId,
    pub fibers: Vec<Fiber>,
}

impl PlaceMatch {
    pub fn local_degree_sum(&self) -> usize {
        self.fibers.iter().map(|w| w.local_degree).sum()
    }

    pub fn all_even(&self) -> bool {
        self.fibers.iter().all(|w| w.local_degree % 2 == 0)
    }
}

/// Extensions of one real place of `K₀`: `[K:K₀] = r + 2c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchStats {
    pub base_index: usize,
    /// Real places of `K` above, by index.
    pub real_above: Vec<usize>,
    /// Complex places of `K` above, by index (labelled from approximate
    /// roots; the count `c` is exact).
    pub complex_above: Vec<usize>,
    pub r: usize,
    pub c: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InfiniteMatch {
    pub real: Vec<ArchStats>,
    /// Complex places of `K` above each complex place of `K₀`; always
    /// `[K:K₀]` of them.
    pub complex: Vec<Vec<usize>>,
}

const SEPARATION_BUDGET: usize = 64;
const SEPARATION_CAP: usize = 8192;

impl SubfieldEmbedding {
    pub fn base(&self) -> &Arc<NumberField> {
        &self.base
    }

    pub fn top(&self) -> &Arc<NumberField> {
        &self.top
    }

    pub fn image(&self) -> &Poly {
        &self.image
    }

    pub fn relative_degree(&self) -> usize {
        self.relative_degree
    }

    /// `ℚ ↪ K`, `t ↦ 0`.
    pub fn from_rationals(top: Arc<NumberField>) -> Self {
        verify_embedding(Arc::new(NumberField::rationals()), top, Poly::zero())
            .expect("Q embeds everywhere")
    }

    /// The identity `K ↪ K`.
    pub fn identity(field: Arc<NumberField>) -> Self {
        verify_embedding(field.clone(), field, Poly::t()).expect("identity embeds")
    }

    pub fn to_json(&self, base: &str, top: &str) -> EmbeddingJson {
        EmbeddingJson {
            base: base.into(),
            top: top.into(),
            image: self.image.coeffs().iter().map(|c| c.to_string()).collect(),
        }
    }

    /// Match every place of `K` above `p` to the place of `K₀` below it.
    ///
    /// For the place `w` cut out by `h` and each base factor `g_i`, the base
    /// place is the unique `i` with `g_i(image(t)) ≡ 0` in `F_p[t]/(h)`.
    pub fn match_finite_places(&self, p: u64) -> Result<Vec<PlaceMatch>, RelExtError> {
        let base_dec = self.base.decompose_prime(p)?;
        let top_dec = self.top.decompose_prime(p)?;
        let mut groups: BTreeMap<usize, Vec<Fiber>> = BTreeMap::new();
        for w in &top_dec.places {
            let x = FpQuotientElem::generator(w.factor.clone());
            let y = match evaluate_in_quotient(&self.image, &x) {
                Ok(y) => y,
                Err(ExactError::DenominatorDivisible(p)) => {
                    return Err(RelExtError::ImageNotIntegral { p })
                }
                Err(e) => return Err(e.into()),
            };
            let hits: Vec<usize> = base_dec
                .places
                .iter()
                .filter(|v| v.factor.compose_mod(y.rep(), &w.factor).is_zero())
                .map(|v| v.index)
                .collect();
            if hits.len() != 1 {
                return Err(RelExtError::MatchAmbiguous {
                    place: w.id(),
                    candidates: hits.len(),
                });
            }
            let v = &base_dec.places[hits[0]];
            if w.e % v.e != 0 || w.f % v.f != 0 {
                return Err(RelExtError::Inconsistent(format!(
                    "(e, f) = ({}, {}) at {} is not a multiple of ({}, {}) at {}",
                    w.e,
                    w.f,
                    w.id(),
                    v.e,
                    v.f,
                    v.id()
                )));
            }
            let (e, f) = (w.e / v.e, w.f / v.f);
            groups.entry(v.index).or_default().push(Fiber {
                place: w.id(),
                local_degree: e * f,
                e,
                f,
            });
        }
        let out: Vec<PlaceMatch> = base_dec
            .places
            .iter()
            .map(|v| PlaceMatch {
                base: v.id(),
                fibers: groups.remove(&v.index).unwrap_or_default(),
            })
            .collect();
        for m in &out {
            if m.local_degree_sum() != self.relative_degree {
                return Err(RelExtError::Inconsistent(format!(
                    "local degrees above {} sum to {} instead of {}",
                    m.base,
                    m.local_degree_sum(),
                    self.relative_degree
                )));
            }
        }
        Ok(out)
    }

    /// Which real root of `f₀` each real root of `f_K` maps to, by refining
    /// isolating intervals until the interval image of `image` meets exactly
    /// one base root.
    pub fn match_infinite_places(&self) -> Result<InfiniteMatch, RelExtError> {
        let base_roots = self.base.real_roots();
        let fk = self.top.defining_poly();
        let mut real_above: Vec<Vec<usize>> = vec![Vec::new(); base_roots.len()];
        for (i, root) in self.top.real_roots().iter().enumerate() {
            let mut root = root.clone();
            let mut budget = SEPARATION_BUDGET;
            let mut spent = 0;
            let target = loop {
                let (lo, hi) = if root.is_exact() {
                    let v = self.image.eval(&root.lo);
                    (v.clone(), v)
                } else {
                    eval_interval(&self.image, &root.lo, &root.hi)
                };
                let hits: Vec<usize> = base_roots
                    .iter()
                    .enumerate()
                    .filter(|(_, b)| b.meets(&lo, &hi))
                    .map(|(j, _)| j)
                    .collect();
                match hits.len() {
                    1 => break hits[0],
                    0 => {
                        return Err(RelExtError::Inconsistent(format!(
                            "real place {i} maps to no real root of the subfield"
                        )))
                    }
                    _ => {}
                }
                if spent >= budget {
                    if budget >= SEPARATION_CAP {
                        return Err(RelExtError::IntervalSeparationFailure { steps: spent });
                    }
                    budget *= 2;
                }
                root.bisect(fk);
                spent += 1;
            };
            real_above[target].push(i);
        }
        let n = self.relative_degree;
        let mut real = Vec::with_capacity(real_above.len());
        for (j, above) in real_above.into_iter().enumerate() {
            let r = above.len();
            if r > n || !(n - r).is_multiple_of(2) {
                return Err(RelExtError::Inconsistent(format!(
                    "{r} real places above real place {j} in degree {n}"
                )));
            }
            real.push(ArchStats {
                base_index: j,
                real_above: above,
                complex_above: Vec::new(),
                r,
                c: (n - r) / 2,
            });
        }
        let complex_total: usize = real.iter().map(|a| a.c).sum::<usize>()
            + self.base.signature().r2 * n;
        if complex_total != self.top.signature().r2 {
            return Err(RelExtError::Inconsistent(format!(
                "complex places do not add up: {} vs {}",
                complex_total,
                self.top.signature().r2
            )));
        }
        let mut complex = vec![Vec::new(); self.base.signature().r2];
        self.label_complex_places(&mut real, &mut complex)?;
        Ok(InfiniteMatch { real, complex })
    }

    // Nearest base root (up to conjugation) to image(z) for each complex root z.
    fn label_complex_places(
        &self,
        real: &mut [ArchStats],
        complex: &mut [Vec<usize>],
    ) -> Result<(), RelExtError> {
        let coeffs: Vec<f64> = self
            .image
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect();
        let base = self.base.infinite_places();
        for w in self.top.infinite_places() {
            if w.kind != PlaceKind::Complex {
                continue;
            }
            let y = coeffs
                .iter()
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * w.approx + c);
            let y = Complex64::new(y.re, y.im.abs());
            let nearest = base
                .iter()
                .min_by(|a, b| (a.approx - y).norm().total_cmp(&(b.approx - y).norm()))
                .expect("a field has an archimedean place");
            match nearest.kind {
                PlaceKind::Real => real[nearest.index].complex_above.push(w.index),
                PlaceKind::Complex => complex[nearest.index].push(w.index),
            }
        }
        let n = self.relative_degree;
        if real.iter().any(|a| a.complex_above.len() != a.c)
            || complex.iter().any(|v| v.len() != n)
        {
            return Err(RelExtError::Inconsistent(
                "approximate labelling of complex places disagrees with exact counts".into(),
            ));
        }
        Ok(())
    }
}

/// Automorphisms of a field, closed under composition.
#[derive(Debug, Clone)]
pub struct AutomorphismGroup {
    field: Arc<NumberField>,
    /// Images of the generator; `elements[0]` is the identity.
    elements: Vec<Poly>,
    /// `table[i][j]` is the index of `σ_i ∘ σ_j`.
    table: Vec<Vec<usize>>,
    input_closed: bool,
}

impl AutomorphismGroup {
    pub fn trivial(field: Arc<NumberField>) -> Self {
        AutomorphismGroup {
            field,
            elements: vec![Poly::t()],
            table: vec![vec![0]],
            input_closed: true,
        }
    }

    pub fn field(&self) -> &Arc<NumberField> {
        &self.field
    }

    pub fn elements(&self) -> &[Poly] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Whether the supplied images (with the identity) were already closed
    /// under composition.
    pub fn input_was_closed(&self) -> bool {
        self.input_closed
    }

    /// `σ` as an embedding `K ↪ K`; its place matching sends each place `w`
    /// to `σ⁻¹(w)`.
    pub fn as_embedding(&self, i: usize) -> SubfieldEmbedding {
        SubfieldEmbedding {
            base: self.field.clone(),
            top: self.field.clone(),
            image: self.elements[i].clone(),
            relative_degree: 1,
        }
    }

    /// Permutation of the places above `p` induced by element `i`, as a map
    /// `w ↦ σ_i⁻¹(w)`.
    pub fn finite_action(&self, i: usize, p: u64) -> Result<BTreeMap<PlaceId, PlaceId>, RelExtError> {
        let matches = self.as_embedding(i).match_finite_places(p)?;
        Ok(matches
            .into_iter()
            .map(|m| (m.fibers[0].place, m.base))
            .collect())
    }

    /// Permutation of the real places induced by element `i`.
    pub fn real_action(&self, i: usize) -> Result<BTreeMap<usize, usize>, RelExtError> {
        let m = self.as_embedding(i).match_infinite_places()?;
        Ok(m.real
            .into_iter()
            .map(|a| (a.real_above[0], a.base_index))
            .collect())
    }
}

// σ_a ∘ σ_b sends θ to σ_a(h_b(θ)) = h_b(h_a(θ)).
fn compose_images(a: &Poly, b: &Poly, f: &Poly) -> Poly {
    b.compose_mod(a, f)
}

fn close_under_composition(f: &Poly, mut elements: Vec<Poly>) -> (Vec<Poly>, bool) {
    let original = elements.len();
    let mut i = 0;
    while i < elements.len() {
        let mut j = 0;
        while j <= i {
            for (a, b) in [(i, j), (j, i)] {
                let c = compose_images(&elements[a], &elements[b], f);
                if !elements.contains(&c) {
                    elements.push(c);
                }
            }
            j += 1;
        }
        i += 1;
    }
    let closed = elements.len() == original;
    (elements, closed)
}

fn check_automorphism(field: &NumberField, h: &Poly) -> Result<Poly, RelExtError> {
    let f = field.defining_poly();
    let h_red = h.rem(f);
    if h_red.degree().is_some_and(|d| d >= field.degree()) || !f.compose_mod(&h_red, f).is_zero() {
        return Err(RelExtError::NotAutomorphism {
            image: h.to_string(),
        });
    }
    Ok(h_red)
}

/// Verify candidate automorphism images and close them into a group.
pub fn verify_automorphisms(
    field: Arc<NumberField>,
    images: &[Poly],
) -> Result<AutomorphismGroup, RelExtError> {
    let f = field.defining_poly().clone();
    let mut elements = vec![Poly::t().rem(&f)];
    for h in images {
        let h = check_automorphism(&field, h)?;
        if !elements.contains(&h) {
            elements.push(h);
        }
    }
    let (elements, input_closed) = close_under_composition(&f, elements);
    if elements.len() > field.degree() {
        return Err(RelExtError::Inconsistent(format!(
            "{} automorphisms of a degree {} field",
            elements.len(),
            field.degree()
        )));
    }
    let table = (0..elements.len())
        .map(|a| {
            (0..elements.len())
                .map(|b| {
                    let c = compose_images(&elements[a], &elements[b], &f);
                    elements.iter().position(|e| *e == c).unwrap()
                })
                .collect()
        })
        .collect();
    Ok(AutomorphismGroup {
        field,
        elements,
        table,
        input_closed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GaloisStatus {
    Galois { order: usize },
    NotCertified,
}

/// Galois iff the verified automorphisms of `K` fixing `K₀` generate a group
/// of order `[K:K₀]`. Invalid or non-fixing images are ignored; too few
/// supplied automorphisms never prove the extension non-Galois.
pub fn is_relatively_galois(e: &SubfieldEmbedding, relative_autos: &[Poly]) -> GaloisStatus {
    let f = e.top.defining_poly();
    let mut elements = vec![Poly::t().rem(f)];
    for h in relative_autos {
        let Ok(h) = check_automorphism(&e.top, h) else {
            continue;
        };
        if e.image.compose_mod(&h, f) != e.image {
            continue;
        }
        if !elements.contains(&h) {
            elements.push(h);
        }
    }
    let (elements, _) = close_under_composition(f, elements);
    if elements.len() == e.relative_degree {
        GaloisStatus::Galois {
            order: elements.len(),
        }
    } else {
        GaloisStatus::NotCertified
    }
}
