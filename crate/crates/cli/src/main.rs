//! `quatlat`: number fields, quaternion algebras and sublattice classes from
//! the command line.
//!
//! Exit codes: 0 finite answer (or success), 1 infinitely many classes,
//! 2 input error, 3 inconclusive or lower bound only. `reproduce` exits 1 on
//! a mismatch.

use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};

use quatlat::classify::Count;
use quatlat::exact::{factor_mod_p, parse_poly, FpPoly};
use quatlat::numfield::NumberField;
use quatlat::problem::{problem_schema, report_schema, Corpus, ProblemSpec, SpecError};
use quatlat::reproduce;

mod render;

#[derive(Parser)]
#[command(name = "quatlat", version, about = "Commensurability classes of arithmetic sublattices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect a number field.
    #[command(subcommand)]
    Field(FieldCommand),
    /// Classify the sublattices described by a problem file.
    Classify {
        #[arg(long)]
        spec: PathBuf,
        /// Machine-readable output.
        #[arg(long)]
        json: bool,
        /// Overrides the file's prime_bound.
        #[arg(long)]
        prime_bound: Option<u64>,
        /// Overrides the file's seed.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Rerun a known result and compare.
    Reproduce {
        #[command(subcommand)]
        target: ReproduceTarget,
    },
    /// Print a JSON Schema.
    Schema {
        #[arg(value_enum)]
        which: SchemaKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    Problem,
    Report,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct FieldSource {
    /// A corpus label such as a5-sextic.
    #[arg(long)]
    label: Option<String>,
    /// A monic integral polynomial such as "t^3-2".
    #[arg(long)]
    poly: Option<String>,
}

#[derive(Subcommand)]
enum FieldCommand {
    /// Signature, discriminant, ramified primes and prime decompositions.
    Info {
        #[command(flatten)]
        source: FieldSource,
        /// Primes to decompose (repeatable).
        #[arg(long = "p")]
        primes: Vec<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Factor the defining polynomial modulo p.
    Factor {
        #[command(flatten)]
        source: FieldSource,
        #[arg(long = "p")]
        p: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum ReproduceTarget {
    /// Unique Fuchsian class for the A5 sextic.
    A5 {
        /// Even set of primes below 50 avoiding 19 and 293.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        s: Vec<u64>,
        #[arg(long, default_value_t = 200)]
        prime_bound: u64,
    },
    /// tau(n) classes for a cyclic field of degree n.
    Cyclic {
        #[arg(long)]
        n: u64,
        #[arg(long, default_value_t = 200)]
        prime_bound: u64,
    },
    /// The degree formula forces [K:K0] = 2 in the Kleinian example.
    KleinianDegree {
        #[arg(long, default_value_t = 100)]
        prime_bound: u64,
    },
}

const EXIT_INFINITE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;

fn input_error(e: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(EXIT_INPUT)
}

fn load_field(source: &FieldSource, corpus: &Corpus) -> Result<Arc<NumberField>, String> {
    match (&source.label, &source.poly) {
        (Some(label), _) => corpus.field(label).ok_or_else(|| {
            let known: Vec<&str> = corpus.labels().collect();
            format!("--label: no corpus field {label:?}; known: {}", known.join(", "))
        }),
        (None, Some(poly)) => {
            let f = parse_poly(poly).map_err(|e| format!("--poly: {e}"))?;
            NumberField::new(poly.clone(), f)
                .map(Arc::new)
                .map_err(|e| format!("--poly: {e}"))
        }
        (None, None) => unreachable!("clap requires one source"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let corpus = match Corpus::load() {
        Ok(c) => c,
        Err(e) => return input_error(format!("corpus: {e}")),
    };
    match cli.command {
        Command::Field(FieldCommand::Info { source, primes, json }) => {
            let field = match load_field(&source, &corpus) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            match render::field_info(&field, &primes, json) {
                Ok(out) => {
                    print!("{out}");
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(e),
            }
        }
        Command::Field(FieldCommand::Factor { source, p, seed }) => {
            let field = match load_field(&source, &corpus) {
                Ok(f) => f,
                Err(e) => return input_error(e),
            };
            let factors = FpPoly::from_poly(field.defining_poly(), p).and_then(|f| factor_mod_p(&f, seed));
            match factors {
                Ok(factors) => {
                    print!("{}", render::factorization(&field, p, &factors));
                    ExitCode::SUCCESS
                }
                Err(e) => input_error(format!("--p: {e}")),
            }
        }
        Command::Classify {
            spec,
            json,
            prime_bound,
            seed,
        } => classify(&corpus, &spec, json, prime_bound, seed),
        Command::Reproduce { target } => {
            let r = match target {
                ReproduceTarget::A5 { s, prime_bound } => reproduce::a5(&corpus, &s, prime_bound),
                ReproduceTarget::Cyclic { n, prime_bound } => reproduce::cyclic(&corpus, n, prime_bound),
                ReproduceTarget::KleinianDegree { prime_bound } => {
                    reproduce::kleinian_degree(&corpus, prime_bound)
                }
            };
            print!("{}", render::reproduction(&r));
            if r.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Command::Schema { which } => {
            let schema = match which {
                SchemaKind::Problem => problem_schema(),
                SchemaKind::Report => report_schema(),
            };
            println!("{}", serde_json::to_string_pretty(&schema).expect("schema serializes"));
            ExitCode::SUCCESS
        }
    }
}

fn classify(
    corpus: &Corpus,
    path: &std::path::Path,
    json: bool,
    prime_bound: Option<u64>,
    seed: Option<u64>,
) -> ExitCode {
    let run = || -> Result<_, SpecError> {
        let mut spec = ProblemSpec::from_file(path)?;
        if let Some(b) = prime_bound {
            spec.prime_bound = b;
        }
        if let Some(s) = seed {
            spec.seed = s;
        }
        spec.resolve(corpus)?.classify()
    };
    let report = match run() {
        Ok(r) => r,
        Err(e) => return input_error(format!("{}: {e}", path.display())),
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", render::report(&report));
    }
    match report.total {
        Count::Exact(_) => ExitCode::SUCCESS,
        Count::Infinite => ExitCode::from(EXIT_INFINITE),
        Count::AtLeast(_) => ExitCode::from(EXIT_INCONCLUSIVE),
    }
}
