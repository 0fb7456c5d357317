use std::fmt::Write;

use serde_json::json;

use quatlat::classify::{
    Certification, ClassificationResult, Count, Criterion, EntryOutcome, SignatureOutcome,
    SublatticeReport,
};
use quatlat::exact::{factor_integer, FpPoly};
use quatlat::numfield::{Irreducibility, NumberField};
use quatlat::reproduce::Reproduction;

fn factored(n: &num_bigint::BigInt) -> String {
    use num_traits::{One, Zero};
    if n.is_zero() || n.magnitude().is_one() {
        return n.to_string();
    }
    let f = factor_integer(n);
    let parts: Vec<String> = f
        .factors
        .iter()
        .map(|(p, e)| if *e == 1 { p.to_string() } else { format!("{p}^{e}") })
        .collect();
    format!("{}{}", if f.negative { "-" } else { "" }, parts.join(" * "))
}

fn irreducibility(i: &Irreducibility) -> String {
    match i {
        Irreducibility::Trivial => "degree 1".into(),
        Irreducibility::ModP { p } => format!("certified: irreducible mod {p}"),
        Irreducibility::DegreePatterns { primes } => format!(
            "certified: factor degree patterns mod {}",
            primes.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
        ),
        Irreducibility::Asserted => "asserted, not certified".into(),
        Irreducibility::Unverified => "NOT certified".into(),
    }
}

fn type_string(t: &[usize]) -> String {
    format!("({})", t.iter().map(usize::to_string).collect::<Vec<_>>().join(", "))
}

pub fn field_info(k: &NumberField, primes: &[u64], json: bool) -> Result<String, String> {
    let mut decs = Vec::new();
    for &p in primes {
        let d = k.decompose_prime(p).map_err(|e| format!("--p {p}: {e}"))?;
        decs.push(d);
    }
    let sig = k.signature();
    if json {
        let v = json!({
            "label": k.label(),
            "poly": k.defining_poly().to_string(),
            "degree": k.degree(),
            "signature": [sig.r1, sig.r2],
            "discriminant": k.disc_defining().to_string(),
            "ramified_primes": k.ramified_primes(),
            "index_divisible_primes": k.index_divisible_primes(),
            "irreducibility": k.irreducibility(),
            "decompositions": decs.iter().map(|d| json!({
                "p": d.p,
                "splitting_type": d.splitting_type(),
                "places": d.places.iter().map(|w| json!({
                    "place": w.id().to_string(),
                    "e": w.e,
                    "f": w.f,
                    "factor": w.factor.to_string(),
                })).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        });
        return Ok(format!("{}\n", serde_json::to_string_pretty(&v).unwrap()));
    }
    let mut out = String::new();
    let list = |v: &[u64]| {
        if v.is_empty() {
            "none".to_string()
        } else {
            v.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")
        }
    };
    writeln!(out, "field        {}", k.label()).unwrap();
    writeln!(out, "poly         {}", k.defining_poly()).unwrap();
    writeln!(out, "degree       {}", k.degree()).unwrap();
    writeln!(out, "signature    ({}, {})", sig.r1, sig.r2).unwrap();
    writeln!(out, "disc(f)      {} = {}", k.disc_defining(), factored(k.disc_defining())).unwrap();
    writeln!(out, "ramified     {{{}}}", list(k.ramified_primes())).unwrap();
    if !k.index_divisible_primes().is_empty() {
        writeln!(
            out,
            "index        Z[t] is not maximal at {{{}}}; places there are unavailable",
            list(k.index_divisible_primes())
        )
        .unwrap();
    }
    writeln!(out, "irreducible  {}", irreducibility(k.irreducibility())).unwrap();
    for d in decs {
        writeln!(out, "p = {}: type {}", d.p, type_string(&d.splitting_type())).unwrap();
        for w in &d.places {
            writeln!(out, "  {:<10} e={} f={}  {}", w.id().to_string(), w.e, w.f, w.factor).unwrap();
        }
    }
    Ok(out)
}

pub fn factorization(k: &NumberField, p: u64, factors: &[(FpPoly, usize)]) -> String {
    let mut out = String::new();
    writeln!(out, "{} mod {p}:", k.defining_poly()).unwrap();
    let mut degrees = Vec::new();
    for (g, e) in factors {
        let d = g.degree().unwrap_or(0);
        degrees.extend(std::iter::repeat_n(d, *e));
        if *e == 1 {
            writeln!(out, "  ({g})").unwrap();
        } else {
            writeln!(out, "  ({g})^{e}").unwrap();
        }
    }
    degrees.sort_unstable();
    writeln!(out, "factor degrees {}", type_string(&degrees)).unwrap();
    out
}

pub fn reproduction(r: &Reproduction) -> String {
    let mut out = String::new();
    writeln!(out, "reproduce {}", r.name).unwrap();
    for l in &r.lines {
        writeln!(out, "  {l}").unwrap();
    }
    writeln!(out, "{}", if r.pass { "PASS" } else { "FAIL" }).unwrap();
    out
}

fn plural(n: usize, one: &str, many: &str) -> String {
    format!("{n} {}", if n == 1 { one } else { many })
}

fn count_phrase(c: Count, noun: &str, nouns: &str) -> String {
    match c {
        Count::Exact(n) => plural(n, noun, nouns),
        Count::AtLeast(n) => format!("at least {n} {nouns} (lower bound)"),
        Count::Infinite => format!("infinitely many {nouns}"),
    }
}

fn certification(c: &Certification) -> String {
    c.to_string()
}

struct Row {
    cells: Vec<String>,
}

fn table(header: &[&str], rows: &[Row]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for r in rows {
        for (i, c) in r.cells.iter().enumerate() {
            widths[i] = widths[i].max(c.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut s = String::new();
        for (i, c) in cells.iter().enumerate() {
            if i + 1 == cells.len() {
                s.push_str(c);
            } else {
                write!(s, "{:<w$}  ", c, w = widths[i]).unwrap();
            }
        }
        s.trim_end().to_string()
    };
    let mut out = String::new();
    writeln!(out, "{}", line(header.to_vec())).unwrap();
    for r in rows {
        writeln!(out, "{}", line(r.cells.iter().map(String::as_str).collect())).unwrap();
    }
    out
}

fn result_rows(name: &str, trivial: bool, r: &ClassificationResult, rows: &mut Vec<Row>, details: &mut Vec<String>) {
    let label = if trivial { format!("{name} (trivial)") } else { name.to_string() };
    let cert = certification(&r.certification);
    if let Criterion::NotExists { violations, parity_obstruction } = &r.criterion {
        rows.push(Row {
            cells: vec![label, r.relative_degree.to_string(), "-".into(), "none".into(), "0".into(), cert],
        });
        for v in violations {
            details.push(format!("{name}: no descent, {}", serde_json::to_string(v).unwrap()));
        }
        if *parity_obstruction {
            details.push(format!("{name}: no descent, odd number of forced places and no free place"));
        }
        return;
    }
    for s in &r.signatures {
        let status = match &s.outcome {
            SignatureOutcome::Finite { .. } => "finite",
            SignatureOutcome::Infinite { .. } => "infinite",
            SignatureOutcome::LowerBound { .. } => "lower bound",
        };
        rows.push(Row {
            cells: vec![
                label.clone(),
                r.relative_degree.to_string(),
                format!("({}, {})", s.c, s.d),
                status.into(),
                s.outcome.count().to_string(),
                cert.clone(),
            ],
        });
        match &s.outcome {
            SignatureOutcome::Finite { classes } | SignatureOutcome::LowerBound { classes, .. } => {
                for c in classes {
                    details.push(format!("{name} ({}, {}): {c}", s.c, s.d));
                }
            }
            SignatureOutcome::Infinite { witnesses, .. } => {
                let w: Vec<String> = witnesses.iter().map(|v| v.to_string()).collect();
                details.push(format!(
                    "{name} ({}, {}): forced {:?}, free places include {{{}}}",
                    s.c,
                    s.d,
                    r.forced.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                    w.join(", ")
                ));
            }
        }
        if let SignatureOutcome::LowerBound { reason, .. } = &s.outcome {
            details.push(format!("{name} ({}, {}): lower bound: {reason}", s.c, s.d));
        }
    }
}

pub fn report(r: &SublatticeReport) -> String {
    let mut out = String::new();
    writeln!(out, "field {}; A has signature (a, b) = ({}, {})", r.field, r.a, r.b).unwrap();
    let mut rows = Vec::new();
    let mut details = Vec::new();
    for e in &r.entries {
        match &e.outcome {
            EntryOutcome::Classified(res) => result_rows(&e.subfield, e.trivial, res, &mut rows, &mut details),
            EntryOutcome::Error { message } => {
                rows.push(Row {
                    cells: vec![
                        e.subfield.clone(),
                        e.relative_degree.to_string(),
                        "-".into(),
                        "error".into(),
                        "?".into(),
                        "-".into(),
                    ],
                });
                details.push(format!("{}: {message}", e.subfield));
            }
        }
    }
    out.push_str(&table(
        &["subfield", "[K:K0]", "(c, d)", "status", "classes", "certification"],
        &rows,
    ));
    for d in details {
        writeln!(out, "  {d}").unwrap();
    }
    for s in &r.screen_rejections {
        writeln!(out, "  screen: {s}").unwrap();
    }
    let infinite_cert = r.entries.iter().find_map(|e| match &e.outcome {
        EntryOutcome::Classified(res) if res.count() == Count::Infinite => Some(certification(&res.certification)),
        _ => None,
    });
    let total = match (r.total, infinite_cert) {
        (Count::Infinite, Some(c)) => format!("Infinite ({c})"),
        (Count::Exact(n), _) => format!("{} (incl. trivial)", plural(n, "class", "classes")),
        (c, _) => format!("{} (incl. trivial)", count_phrase(c, "class", "classes")),
    };
    writeln!(out, "total: {total}").unwrap();
    writeln!(out, "proper subfields: {}", count_phrase(r.nontrivial, "class", "classes")).unwrap();
    writeln!(out, "Fuchsian: {}", count_phrase(r.fuchsian(), "Fuchsian class", "Fuchsian classes")).unwrap();
    out
}
