use std::path::PathBuf;

use quatlat::problem::{problem_schema, report_schema, Corpus, ProblemSpec};

fn book_file(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../book/src/reference").join(name)
}

fn pretty(v: &impl serde::Serialize) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).unwrap())
}

// Regenerate with `quatlat schema problem > book/src/reference/problem.schema.json`.
#[test]
fn committed_schemas_are_current() {
    for (name, schema) in [
        ("problem.schema.json", problem_schema()),
        ("report.schema.json", report_schema()),
    ] {
        let committed = std::fs::read_to_string(book_file(name)).unwrap();
        assert_eq!(committed, pretty(&schema), "{name} is stale");
    }
}

#[test]
fn reports_validate_against_the_schema() {
    let schema = serde_json::to_value(report_schema()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let corpus = Corpus::bundled().unwrap();
    let specs = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../cli/specs");
    let mut seen = 0;
    for entry in std::fs::read_dir(specs).unwrap() {
        let path = entry.unwrap().path();
        let report = ProblemSpec::from_file(&path).unwrap().resolve(&corpus).unwrap().classify().unwrap();
        let v = serde_json::to_value(&report).unwrap();
        let errors: Vec<String> = validator.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{}: {errors:?}", path.display());
        seen += 1;
    }
    assert!(seen >= 3);
}
