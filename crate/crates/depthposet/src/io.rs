//! Text formats: complex and filter files, JSON emitters, DOT export, and
//! exact decimal rendering for the stats CSVs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde_json::json;

use crate::complex::LefschetzComplex;
use crate::depth::PairRelation;
use crate::error::{Error, Result};
use crate::filter::Filter;
use crate::reduction::ReductionState;
use crate::Rational;

/// Serializes a complex in the `lefschetz v1` format.
pub fn write_complex(complex: &LefschetzComplex) -> String {
    let mut out = String::from("lefschetz v1\n");
    for c in complex.iter_cells() {
        writeln!(out, "cell {} {}", complex.id(c), complex.dim(c)).unwrap();
    }
    for c in complex.iter_cells() {
        if complex.facets(c).is_empty() {
            continue;
        }
        let ids: Vec<&str> = complex.facets(c).iter().map(|&f| complex.id(f)).collect();
        writeln!(out, "facets {} : {}", complex.id(c), ids.join(" ")).unwrap();
    }
    out
}

pub fn read_complex(text: &str) -> Result<LefschetzComplex> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim());
    if header != Some("lefschetz v1") {
        return Err(Error::Parse {
            kind: "complex",
            line: 1,
            msg: "expected header `lefschetz v1`".into(),
        });
    }
    let mut cells: Vec<(String, i32)> = Vec::new();
    let mut facets: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("cell") => {
                let id = tokens.next().ok_or_else(|| Error::Parse {
                    kind: "complex",
                    line: i + 1,
                    msg: "cell line needs an id".into(),
                })?;
                let dim: i32 = tokens
                    .next()
                    .and_then(|t| t.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        kind: "complex",
                        line: i + 1,
                        msg: "cell line needs an integer dimension".into(),
                    })?;
                cells.push((id.to_string(), dim));
            }
            Some("facets") => {
                let id = tokens.next().ok_or_else(|| Error::Parse {
                    kind: "complex",
                    line: i + 1,
                    msg: "facets line needs an id".into(),
                })?;
                if tokens.next() != Some(":") {
                    return Err(Error::Parse {
                        kind: "complex",
                        line: i + 1,
                        msg: "facets line needs a `:` separator".into(),
                    });
                }
                let entry = facets.entry(id.to_string()).or_default();
                for t in tokens {
                    entry.insert(t.to_string());
                }
            }
            _ => {
                return Err(Error::Parse {
                    kind: "complex",
                    line: i + 1,
                    msg: format!("unrecognized line `{line}`"),
                });
            }
        }
    }
    LefschetzComplex::build(&cells, &facets)
}

/// Serializes a filter in the `filter v1` format, cells in complex order.
pub fn write_filter(complex: &LefschetzComplex, filter: &Filter) -> String {
    let mut out = String::from("filter v1\n");
    for c in complex.iter_cells() {
        let v = filter.value(c);
        writeln!(out, "{} {}/{}", complex.id(c), v.numer(), v.denom()).unwrap();
    }
    out
}

pub fn read_filter(complex: &LefschetzComplex, text: &str) -> Result<Filter> {
    let mut lines = text.lines().enumerate();
    let header = lines.next().map(|(_, l)| l.trim());
    if header != Some("filter v1") {
        return Err(Error::Parse {
            kind: "filter",
            line: 1,
            msg: "expected header `filter v1`".into(),
        });
    }
    let mut values: BTreeMap<String, Rational> = BTreeMap::new();
    for (i, raw) in lines {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(id), Some(value), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                kind: "filter",
                line: i + 1,
                msg: "expected `<id> <numerator>/<denominator>`".into(),
            });
        };
        let (num, den) = value.split_once('/').ok_or_else(|| Error::Parse {
            kind: "filter",
            line: i + 1,
            msg: "value must be `<numerator>/<denominator>`".into(),
        })?;
        let num = BigInt::from_str(num).map_err(|e| Error::Parse {
            kind: "filter",
            line: i + 1,
            msg: e.to_string(),
        })?;
        let den = BigInt::from_str(den).map_err(|e| Error::Parse {
            kind: "filter",
            line: i + 1,
            msg: e.to_string(),
        })?;
        if den.is_zero() {
            return Err(Error::Parse {
                kind: "filter",
                line: i + 1,
                msg: "zero denominator".into(),
            });
        }
        values.insert(id.to_string(), Rational::new(num, den));
    }
    Filter::new(complex, &values)
}

/// Pairs and the two relations as JSON, pair indices sorted by death-cell
/// position.
pub fn reduce_json(complex: &LefschetzComplex, state: &ReductionState) -> serde_json::Value {
    let pairs: Vec<_> = state
        .pairs
        .iter()
        .map(|p| {
            json!({
                "birth": complex.id(p.birth),
                "death": complex.id(p.death),
                "degree": p.degree,
            })
        })
        .collect();
    let arcs = |rel: &PairRelation| -> Vec<[usize; 2]> {
        rel.arcs.iter().map(|&(u, w)| [u, w]).collect()
    };
    let dr = crate::reduction::death_relation(state);
    let br = crate::reduction::birth_relation(state);
    json!({
        "pairs": pairs,
        "death_relation": arcs(&dr),
        "birth_relation": arcs(&br),
    })
}

/// Depth poset as JSON: pairs plus closure and transitive-reduction arcs.
pub fn depth_json(
    complex: &LefschetzComplex,
    closure: &PairRelation,
    reduction: &PairRelation,
) -> serde_json::Value {
    let pairs: Vec<_> = closure
        .nodes
        .iter()
        .map(|p| {
            json!({
                "birth": complex.id(p.birth),
                "death": complex.id(p.death),
                "degree": p.degree,
            })
        })
        .collect();
    json!({
        "pairs": pairs,
        "closure": closure.arcs.iter().map(|&(u, w)| [u, w]).collect::<Vec<_>>(),
        "reduction": reduction.arcs.iter().map(|&(u, w)| [u, w]).collect::<Vec<_>>(),
    })
}

/// Plain DOT digraph of a relation.
pub fn dot_digraph(complex: &LefschetzComplex, rel: &PairRelation) -> String {
    let mut out = String::from("digraph depth {\n");
    let label = |i: usize| {
        let p = &rel.nodes[i];
        format!("{}:{}", complex.id(p.birth), complex.id(p.death))
    };
    for i in 0..rel.nodes.len() {
        writeln!(out, "  \"{}\";", label(i)).unwrap();
    }
    for &(u, w) in &rel.arcs {
        writeln!(out, "  \"{}\" -> \"{}\";", label(u), label(w)).unwrap();
    }
    out.push_str("}\n");
    out
}

/// Event log of a homotopy run as CSV.
pub fn events_csv(complex: &LefschetzComplex, events: &[crate::TranspositionEvent]) -> String {
    let mut out = String::from(
        "index,lambda_num,lambda_den,low_cell,high_cell,dim_low,dim_high,case,switch,arcs_changed_closure,arcs_changed_reduction\n",
    );
    for e in events {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            e.index,
            e.lambda.numer(),
            e.lambda.denom(),
            complex.id(e.low_cell),
            complex.id(e.high_cell),
            e.dim_low,
            e.dim_high,
            e.case_label.as_str(),
            e.switch_type.as_str(),
            e.arcs_changed_closure.map_or(String::new(), |v| v.to_string()),
            e.arcs_changed_reduction.map_or(String::new(), |v| v.to_string()),
        )
        .unwrap();
    }
    out
}

/// Vineyard trace as CSV, one row per vine sample.
pub fn trace_csv(complex: &LefschetzComplex, trace: &crate::homotopy::VineyardTrace) -> String {
    let mut out = String::from(
        "vine,lambda_num,lambda_den,birth_num,birth_den,death_num,death_den\n",
    );
    let _ = complex;
    for (i, vine) in trace.vines.iter().enumerate() {
        for (l, b, d) in &vine.samples {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                i,
                l.numer(),
                l.denom(),
                b.numer(),
                b.denom(),
                d.numer(),
                d.denom(),
            )
            .unwrap();
        }
    }
    out
}

/// Renders an exact rational as a decimal with 12 significant digits
/// (round half up). Deterministic, no floating point involved.
pub fn decimal_12(r: &Rational) -> String {
    const SIG: i64 = 12;
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let n = r.numer().abs();
    let d = r.denom().abs();

    // Find e with 10^e <= n/d < 10^(e+1).
    let mut e: i64 = n.to_string().len() as i64 - d.to_string().len() as i64;
    let pow = |k: i64| -> BigInt {
        BigInt::from(10u32).pow(k.unsigned_abs() as u32)
    };
    let cmp_pow = |e: i64| -> std::cmp::Ordering {
        // compare n/d with 10^e
        if e >= 0 {
            n.cmp(&(&d * pow(e)))
        } else {
            (&n * pow(-e)).cmp(&d)
        }
    };
    while cmp_pow(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_pow(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }

    // scaled = round(n/d * 10^(SIG-1-e)), half up.
    let shift = SIG - 1 - e;
    let (num, den) = if shift >= 0 {
        (&n * pow(shift), d.clone())
    } else {
        (n.clone(), &d * pow(-shift))
    };
    let mut scaled = (&num * BigInt::from(2) + &den) / (&den * BigInt::from(2));
    let mut digits = scaled.to_string();
    if digits.len() as i64 > SIG {
        // rounding carried over (e.g. 999... -> 1000...)
        e += 1;
        scaled /= BigInt::from(10);
        digits = scaled.to_string();
    }
    debug_assert_eq!(digits.len() as i64, SIG);

    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if (0..SIG).contains(&e) {
        let point = (e + 1) as usize;
        out.push_str(&digits[..point]);
        if point < digits.len() {
            out.push('.');
            out.push_str(&digits[point..]);
        }
    } else if (-4..0).contains(&e) {
        out.push_str("0.");
        for _ in 0..(-e - 1) {
            out.push('0');
        }
        out.push_str(&digits);
    } else {
        out.push_str(&digits[..1]);
        out.push('.');
        out.push_str(&digits[1..]);
        write!(out, "e{e}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::ratio;

    #[test]
    fn complex_roundtrip() {
        let (complex, _) = fixtures::pillow();
        let text = write_complex(&complex);
        let back = read_complex(&text).unwrap();
        assert_eq!(complex, back);
    }

    #[test]
    fn filter_roundtrip() {
        let (complex, filter) = fixtures::circle();
        let text = write_filter(&complex, &filter);
        let back = read_filter(&complex, &text).unwrap();
        assert_eq!(filter, back);
    }

    #[test]
    fn bad_headers_are_rejected() {
        assert!(matches!(
            read_complex("nope\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        let (complex, _) = fixtures::circle();
        assert!(matches!(
            read_filter(&complex, "filter v2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(decimal_12(&ratio(0, 1)), "0");
        assert_eq!(decimal_12(&ratio(1, 1)), "1.00000000000");
        assert_eq!(decimal_12(&ratio(1, 3)), "0.333333333333");
        assert_eq!(decimal_12(&ratio(2, 3)), "0.666666666667");
        assert_eq!(decimal_12(&ratio(-5, 2)), "-2.50000000000");
        assert_eq!(decimal_12(&ratio(1, 8000)), "0.000125000000000");
        assert_eq!(decimal_12(&ratio(1, 80000)), "1.25000000000e-5");
        assert_eq!(decimal_12(&ratio(123456789, 1)), "123456789.000");
    }
}
