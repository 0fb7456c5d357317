//! Input documents: the bundled field corpus and problem specifications.
//!
//! A problem names fields, embeddings between them, automorphisms,
//! splitting-type certificates and algebras, then picks a target algebra and
//! the subfields to classify against. Everything is resolved and verified
//! before any classification runs; errors carry the JSON path at fault.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::classify::{full_sublattice_report, SplittingTypeCertificate, SubfieldInput, SublatticeReport};
use crate::exact::{parse_poly, Poly, Rat};
use crate::numfield::NumberField;
use crate::quat::{AlgebraJson, QuaternionAlgebra};
use crate::relext::{verify_automorphisms, verify_embedding, AutomorphismGroup, SubfieldEmbedding};

pub const DEFAULT_PRIME_BOUND: u64 = 200;
pub const CORPUS_ENV: &str = "QUATLAT_CORPUS";
const BUNDLED_CORPUS: &str = include_str!("../corpus/corpus.json");

/// An input error, located by a dotted JSON path (`$` is the document root).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecError {
    pub path: String,
    pub message: String,
}

impl SpecError {
    pub fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        SpecError {
            path: path.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for SpecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for SpecError {}

fn parse_json<T: serde::de::DeserializeOwned>(src: &str) -> Result<T, SpecError> {
    let de = &mut serde_json::Deserializer::from_str(src);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let path = if path == "." { "$".to_string() } else { format!("$.{path}") };
        SpecError::new(
            path,
            format!("{} (line {}, column {})", strip_position(&inner), inner.line(), inner.column()),
        )
    })
}

fn strip_position(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// A polynomial written either as text (`"t^2-2"`) or as ascending
/// coefficients (`["-2", "0", "1"]`, rationals such as `"1/2"` allowed).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum PolySpec {
    Text(String),
    Coeffs(Vec<String>),
}

impl PolySpec {
    pub fn to_poly(&self) -> Result<Poly, String> {
        match self {
            PolySpec::Text(s) => parse_poly(s).map_err(|e| e.to_string()),
            PolySpec::Coeffs(cs) => cs
                .iter()
                .map(|c| c.trim().parse::<Rat>().map_err(|_| format!("bad coefficient {c:?}")))
                .collect::<Result<Vec<_>, _>>()
                .map(Poly::new),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub struct KnownSubfield {
    pub label: String,
    pub image: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct KnownFacts {
    pub signature: (usize, usize),
    pub ramified_primes: Vec<u64>,
    #[serde(default)]
    pub automorphisms: Vec<String>,
    #[serde(default)]
    pub subfields: Vec<KnownSubfield>,
    #[serde(default)]
    pub splitting_types: Option<SplittingTypeCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CorpusEntry {
    pub label: String,
    pub poly: String,
    pub provenance: String,
    pub known: KnownFacts,
}

#[derive(Debug, Clone, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
struct CorpusFile {
    fields: Vec<CorpusEntry>,
}

/// Named fields whose stated facts have been recomputed.
#[derive(Debug, Clone)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    fields: BTreeMap<String, Arc<NumberField>>,
}

impl Corpus {
    /// The bundled corpus, or `$QUATLAT_CORPUS/corpus.json` when set (the
    /// variable may also name the file itself).
    pub fn load() -> Result<Corpus, SpecError> {
        match std::env::var_os(CORPUS_ENV) {
            Some(dir) => Corpus::from_path(Path::new(&dir)),
            None => Corpus::bundled(),
        }
    }

    pub fn bundled() -> Result<Corpus, SpecError> {
        Corpus::parse(BUNDLED_CORPUS)
    }

    pub fn from_path(path: &Path) -> Result<Corpus, SpecError> {
        let file = if path.is_dir() { path.join("corpus.json") } else { path.to_path_buf() };
        let src = std::fs::read_to_string(&file)
            .map_err(|e| SpecError::new("$", format!("cannot read {}: {e}", file.display())))?;
        Corpus::parse(&src)
    }

    pub fn parse(src: &str) -> Result<Corpus, SpecError> {
        let file: CorpusFile = parse_json(src)?;
        let mut fields = BTreeMap::new();
        for (i, entry) in file.fields.iter().enumerate() {
            let at = format!("$.fields[{i}]");
            if fields.contains_key(&entry.label) {
                return Err(SpecError::new(at, format!("duplicate label {:?}", entry.label)));
            }
            let field = verify_entry(entry, &fields).map_err(|m| SpecError::new(at, m))?;
            fields.insert(entry.label.clone(), field);
        }
        Ok(Corpus {
            entries: file.fields,
            fields,
        })
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }

    pub fn entry(&self, label: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.label == label)
    }

    pub fn field(&self, label: &str) -> Option<Arc<NumberField>> {
        self.fields.get(label).cloned()
    }

    /// Stated automorphism images (already verified).
    pub fn automorphisms(&self, label: &str) -> Vec<Poly> {
        self.entry(label)
            .map(|e| {
                e.known
                    .automorphisms
                    .iter()
                    .map(|s| parse_poly(s).expect("verified at load"))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn automorphism_group(&self, label: &str) -> Option<AutomorphismGroup> {
        let field = self.field(label)?;
        Some(verify_automorphisms(field, &self.automorphisms(label)).expect("verified at load"))
    }

    pub fn certificate(&self, label: &str) -> Option<SplittingTypeCertificate> {
        self.entry(label)?.known.splitting_types.clone()
    }

    /// Stated subfields of `label`, as embeddings.
    pub fn subfields(&self, label: &str) -> Vec<(String, SubfieldEmbedding)> {
        let (Some(entry), Some(top)) = (self.entry(label), self.field(label)) else {
            return Vec::new();
        };
        entry
            .known
            .subfields
            .iter()
            .map(|s| {
                let base = self.field(&s.label).expect("verified at load");
                let image = parse_poly(&s.image).expect("verified at load");
                let e = verify_embedding(base, top.clone(), image).expect("verified at load");
                (s.label.clone(), e)
            })
            .collect()
    }
}

fn verify_entry(
    entry: &CorpusEntry,
    earlier: &BTreeMap<String, Arc<NumberField>>,
) -> Result<Arc<NumberField>, String> {
    let poly = parse_poly(&entry.poly).map_err(|e| format!("poly: {e}"))?;
    let field = Arc::new(NumberField::new(entry.label.clone(), poly).map_err(|e| e.to_string())?);
    let k = &entry.known;
    let sig = field.signature();
    if (sig.r1, sig.r2) != k.signature {
        return Err(format!(
            "stated signature {:?} but computed ({}, {})",
            k.signature, sig.r1, sig.r2
        ));
    }
    if field.ramified_primes() != k.ramified_primes.as_slice() {
        return Err(format!(
            "stated ramified primes {:?} but computed {:?}",
            k.ramified_primes,
            field.ramified_primes()
        ));
    }
    let autos = k
        .automorphisms
        .iter()
        .map(|s| parse_poly(s).map_err(|e| format!("automorphism {s:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    verify_automorphisms(field.clone(), &autos).map_err(|e| e.to_string())?;
    for s in &k.subfields {
        let base = earlier
            .get(&s.label)
            .ok_or_else(|| format!("subfield {:?} must be listed earlier", s.label))?;
        let image = parse_poly(&s.image).map_err(|e| format!("subfield image: {e}"))?;
        verify_embedding(base.clone(), field.clone(), image).map_err(|e| e.to_string())?;
    }
    if let Some(cert) = &k.splitting_types {
        cert.verify(&field).map_err(|e| e.to_string())?;
    }
    Ok(field)
}

/// How a field is given in a problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged, deny_unknown_fields)]
pub enum FieldSpec {
    /// A corpus label.
    Corpus { corpus: String },
    /// A monic integral defining polynomial.
    Poly {
        poly: PolySpec,
        #[serde(default)]
        label: Option<String>,
    },
    /// The rationals (`true` is the only accepted value).
    Rational { rational: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub base: String,
    pub top: String,
    /// Image of the generator of `base`, as a polynomial in that of `top`.
    pub image: PolySpec,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum AlgebraSpec {
    /// `B ⊗ K` for another algebra `B` and an embedding.
    BaseChange { base_change: String, embedding: String },
    /// Ramified at every place above the listed primes.
    RamifiedAbove { field: String, ramified_above: Vec<u64> },
    /// Explicit ramification set.
    Direct(AlgebraJson),
}

/// A classification problem.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// Fields by name. `Q` is predefined as the rationals.
    pub fields: BTreeMap<String, FieldSpec>,
    #[serde(default)]
    pub embeddings: BTreeMap<String, EmbeddingSpec>,
    /// Automorphism images per field name. Corpus fields default to their
    /// stated automorphisms.
    #[serde(default)]
    pub automorphisms: BTreeMap<String, Vec<PolySpec>>,
    /// Splitting-type certificates per field name, used for subfield `Q`.
    /// Corpus fields default to their stated certificate.
    #[serde(default)]
    pub certificates: BTreeMap<String, SplittingTypeCertificate>,
    pub algebras: BTreeMap<String, AlgebraSpec>,
    /// Name of the algebra whose sublattices are classified.
    pub target: String,
    /// Embedding names into the target's field. The field itself is added
    /// automatically.
    #[serde(default)]
    pub subfields: Vec<String>,
    #[serde(default = "default_prime_bound")]
    pub prime_bound: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_prime_bound() -> u64 {
    DEFAULT_PRIME_BOUND
}

impl ProblemSpec {
    pub fn from_json_str(src: &str) -> Result<ProblemSpec, SpecError> {
        parse_json(src)
    }

    pub fn from_file(path: &Path) -> Result<ProblemSpec, SpecError> {
        let src = std::fs::read_to_string(path)
            .map_err(|e| SpecError::new("$", format!("cannot read {}: {e}", path.display())))?;
        ProblemSpec::from_json_str(&src)
    }

    pub fn resolve(&self, corpus: &Corpus) -> Result<Problem, SpecError> {
        Resolver::new(self, corpus).run()
    }
}

/// A verified problem, ready to classify.
#[derive(Debug, Clone)]
pub struct Problem {
    pub fields: BTreeMap<String, Arc<NumberField>>,
    pub embeddings: BTreeMap<String, SubfieldEmbedding>,
    pub algebras: BTreeMap<String, QuaternionAlgebra>,
    pub target: QuaternionAlgebra,
    pub subfields: Vec<SubfieldInput>,
    pub prime_bound: u64,
    pub seed: u64,
}

impl Problem {
    pub fn classify(&self) -> Result<SublatticeReport, SpecError> {
        self.classify_with_bound(self.prime_bound)
    }

    pub fn classify_with_bound(&self, prime_bound: u64) -> Result<SublatticeReport, SpecError> {
        full_sublattice_report(&self.target, self.subfields.clone(), prime_bound)
            .map_err(|e| SpecError::new("$.target", e))
    }
}

struct Resolver<'a> {
    spec: &'a ProblemSpec,
    corpus: &'a Corpus,
    fields: BTreeMap<String, Arc<NumberField>>,
    autos: BTreeMap<String, Vec<Poly>>,
    groups: BTreeMap<String, AutomorphismGroup>,
    embeddings: BTreeMap<String, SubfieldEmbedding>,
    algebras: BTreeMap<String, QuaternionAlgebra>,
}

impl<'a> Resolver<'a> {
    fn new(spec: &'a ProblemSpec, corpus: &'a Corpus) -> Self {
        Resolver {
            spec,
            corpus,
            fields: BTreeMap::new(),
            autos: BTreeMap::new(),
            groups: BTreeMap::new(),
            embeddings: BTreeMap::new(),
            algebras: BTreeMap::new(),
        }
    }

    fn run(mut self) -> Result<Problem, SpecError> {
        let spec = self.spec;
        self.fields
            .insert("Q".into(), Arc::new(NumberField::rationals().with_seed(spec.seed)));
        for (name, f) in &spec.fields {
            let field = self.field(name, f)?;
            self.fields.insert(name.clone(), Arc::new(field));
        }
        for (name, images) in &spec.automorphisms {
            let at = format!("$.automorphisms.{name}");
            if !self.fields.contains_key(name) {
                return Err(SpecError::new(at, format!("unknown field {name:?}")));
            }
            let mut polys = Vec::new();
            for (i, img) in images.iter().enumerate() {
                polys.push(img.to_poly().map_err(|m| SpecError::new(format!("{at}[{i}]"), m))?);
            }
            self.autos.insert(name.clone(), polys);
        }
        for (name, f) in &spec.fields {
            if let FieldSpec::Corpus { corpus } = f {
                self.autos
                    .entry(name.clone())
                    .or_insert_with(|| self.corpus.automorphisms(corpus));
            }
        }
        for (name, field) in &self.fields {
            let images = self.autos.get(name).cloned().unwrap_or_default();
            let g = verify_automorphisms(field.clone(), &images)
                .map_err(|e| SpecError::new(format!("$.automorphisms.{name}"), e))?;
            self.groups.insert(name.clone(), g);
        }
        for name in spec.certificates.keys() {
            if !self.fields.contains_key(name) {
                return Err(SpecError::new(
                    format!("$.certificates.{name}"),
                    format!("unknown field {name:?}"),
                ));
            }
        }
        for (name, e) in &spec.embeddings {
            let emb = self.embedding(name, e)?;
            self.embeddings.insert(name.clone(), emb);
        }
        for name in spec.algebras.keys() {
            self.algebra(name, &mut BTreeSet::new())?;
        }
        let target = self
            .algebras
            .get(&spec.target)
            .cloned()
            .ok_or_else(|| SpecError::new("$.target", format!("unknown algebra {:?}", spec.target)))?;
        target
            .lattice_signature()
            .map_err(|e| SpecError::new("$.target", e))?;
        let mut subfields = Vec::new();
        for (i, name) in spec.subfields.iter().enumerate() {
            subfields.push(self.subfield(&format!("$.subfields[{i}]"), name, &target)?);
        }
        Ok(Problem {
            fields: self.fields,
            embeddings: self.embeddings,
            algebras: self.algebras,
            target,
            subfields,
            prime_bound: spec.prime_bound,
            seed: spec.seed,
        })
    }

    fn field_name_of(&self, field: &NumberField) -> Option<&str> {
        self.fields
            .iter()
            .find(|(_, f)| f.defining_poly() == field.defining_poly())
            .map(|(n, _)| n.as_str())
    }

    fn field(&self, name: &str, f: &FieldSpec) -> Result<NumberField, SpecError> {
        let at = format!("$.fields.{name}");
        if name == "Q" && !matches!(f, FieldSpec::Rational { rational: true }) {
            return Err(SpecError::new(at, "the name Q is reserved for the rationals"));
        }
        let field = match f {
            FieldSpec::Corpus { corpus } => {
                let entry = self.corpus.entry(corpus).ok_or_else(|| {
                    SpecError::new(format!("{at}.corpus"), format!("no corpus field {corpus:?}"))
                })?;
                let poly = parse_poly(&entry.poly).map_err(|e| SpecError::new(&at, e))?;
                NumberField::new(name, poly)
            }
            FieldSpec::Poly { poly, label } => {
                let poly = poly.to_poly().map_err(|m| SpecError::new(format!("{at}.poly"), m))?;
                NumberField::new(label.clone().unwrap_or_else(|| name.to_string()), poly)
            }
            FieldSpec::Rational { rational: true } => Ok(NumberField::rationals()),
            FieldSpec::Rational { rational: false } => {
                return Err(SpecError::new(format!("{at}.rational"), "must be true"))
            }
        };
        field
            .map(|k| k.with_seed(self.spec.seed))
            .map_err(|e| SpecError::new(at, e))
    }

    fn lookup_field(&self, at: &str, name: &str) -> Result<Arc<NumberField>, SpecError> {
        self.fields
            .get(name)
            .cloned()
            .ok_or_else(|| SpecError::new(at, format!("unknown field {name:?}")))
    }

    fn embedding(&self, name: &str, e: &EmbeddingSpec) -> Result<SubfieldEmbedding, SpecError> {
        let at = format!("$.embeddings.{name}");
        let base = self.lookup_field(&format!("{at}.base"), &e.base)?;
        let top = self.lookup_field(&format!("{at}.top"), &e.top)?;
        let image = e
            .image
            .to_poly()
            .map_err(|m| SpecError::new(format!("{at}.image"), m))?;
        verify_embedding(base, top, image).map_err(|err| SpecError::new(at, err))
    }

    fn algebra(&mut self, name: &str, visiting: &mut BTreeSet<String>) -> Result<QuaternionAlgebra, SpecError> {
        if let Some(a) = self.algebras.get(name) {
            return Ok(a.clone());
        }
        let at = format!("$.algebras.{name}");
        let spec = self
            .spec
            .algebras
            .get(name)
            .ok_or_else(|| SpecError::new(&at, format!("unknown algebra {name:?}")))?;
        if !visiting.insert(name.to_string()) {
            return Err(SpecError::new(at, "algebra definitions form a cycle"));
        }
        let algebra = match spec {
            AlgebraSpec::BaseChange { base_change, embedding } => {
                let b = self.algebra(base_change, visiting).map_err(|e| {
                    if e.path.starts_with("$.algebras") && e.message.starts_with("unknown") {
                        SpecError::new(format!("{at}.base_change"), e.message)
                    } else {
                        e
                    }
                })?;
                let e = self.embeddings.get(embedding).ok_or_else(|| {
                    SpecError::new(format!("{at}.embedding"), format!("unknown embedding {embedding:?}"))
                })?;
                b.base_change(e).map_err(|err| SpecError::new(&at, err))?
            }
            AlgebraSpec::RamifiedAbove { field, ramified_above } => {
                let k = self.lookup_field(&format!("{at}.field"), field)?;
                QuaternionAlgebra::ramified_above(k, ramified_above).map_err(|e| SpecError::new(&at, e))?
            }
            AlgebraSpec::Direct(json) => {
                let k = self.lookup_field(&format!("{at}.field"), &json.field)?;
                QuaternionAlgebra::from_json(json, k).map_err(|e| SpecError::new(&at, e))?
            }
        };
        visiting.remove(name);
        self.algebras.insert(name.to_string(), algebra.clone());
        Ok(algebra)
    }

    fn subfield(&self, at: &str, name: &str, target: &QuaternionAlgebra) -> Result<SubfieldInput, SpecError> {
        let e = self
            .embeddings
            .get(name)
            .ok_or_else(|| SpecError::new(at, format!("unknown embedding {name:?}")))?;
        if e.top().defining_poly() != target.field().defining_poly() {
            return Err(SpecError::new(at, "embedding does not land in the target's field"));
        }
        let base_name = self.field_name_of(e.base()).unwrap_or("Q").to_string();
        let top_name = self.field_name_of(e.top()).unwrap_or_default().to_string();
        let label = if e.relative_degree() == 1 { name.to_string() } else { base_name.clone() };
        let mut input = SubfieldInput::new(label, e.clone())
            .with_base_autos(self.groups[&base_name].clone())
            .with_top_autos(self.autos.get(&top_name).cloned().unwrap_or_default());
        if e.base().is_rational() {
            let cert = self.spec.certificates.get(&top_name).cloned().or_else(|| {
                match self.spec.fields.get(&top_name) {
                    Some(FieldSpec::Corpus { corpus }) => self.corpus.certificate(corpus),
                    _ => None,
                }
            });
            if let Some(cert) = cert {
                input = input.with_certificate(cert);
            }
        }
        Ok(input)
    }
}

/// JSON Schema of [`ProblemSpec`].
pub fn problem_schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(ProblemSpec)
}

/// JSON Schema of [`SublatticeReport`].
pub fn report_schema() -> schemars::schema::RootSchema {
    schemars::schema_for!(SublatticeReport)
}
