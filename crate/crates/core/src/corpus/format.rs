//! Text format for identity records.
//!
//! ```text
//! # comment
//! id: I7
//! scale: 1
//! lhs: 2*f(-q^4,-q^6)*f(-q^6,-q^9) + 2*q*f(-q^2,-q^8)*f(-q^3,-q^12)
//! rhs: f(1,q)*f(-q^3,-q^3)
//! derivation.form: quad: 1/2,0,3 | lin: -1/2,0 | delta: 0,1
//! derivation.B1: 2,3;-1,1   shifts: e1, -2..2   side: lhs
//! derivation.B2: 1,0;0,1    shifts: 0,0         side: rhs
//! notes: free text, may repeat
//! ```
//!
//! A new `id:` line starts a new record; each `derivation.form:` starts a new
//! derivation block owned by the current record.

use crate::ecs::{format_shifts, parse_shifts, IntMatrix};
use crate::error::{Error, Result};
use crate::expr::parse;

use super::{Derivation, Expansion, IdentityRecord, Side};

fn format_err(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Format(format!("line {line}: {msg}"))
}

fn parse_side(text: &str) -> Result<Side> {
    let t: String = text.split_whitespace().collect();
    let (k, rest) = match t.split_once('*') {
        Some((k, rest)) if matches!(rest, "lhs" | "rhs") => {
            let k = k.parse::<i64>().map_err(|_| Error::Format(format!("bad side multiplier {k:?}")))?;
            (k, rest)
        }
        _ => (1, t.as_str()),
    };
    Ok(match rest {
        "lhs" => Side::Lhs(k),
        "rhs" => Side::Rhs(k),
        _ => Side::Expr(parse(text.trim())?),
    })
}

/// Splits `matrix  shifts: ...  side: ...` into its three parts.
fn split_expansion(val: &str) -> (&str, Option<&str>, Option<&str>) {
    let (head, side) = match val.split_once("side:") {
        Some((h, s)) => (h, Some(s.trim())),
        None => (val, None),
    };
    match head.split_once("shifts:") {
        Some((m, s)) => (m.trim(), Some(s.trim()), side),
        None => (head.trim(), None, side),
    }
}

fn finish(rec: Option<Partial>, out: &mut Vec<IdentityRecord>) -> Result<()> {
    let Some(p) = rec else { return Ok(()) };
    let missing = |what: &str| Error::Format(format!("record {}: missing {what}", p.id));
    let lhs = p.lhs.clone().ok_or_else(|| missing("lhs"))?;
    let rhs = p.rhs.clone().ok_or_else(|| missing("rhs"))?;
    if let Some(d) = p.derivations.iter().find(|d| d.expansions.is_empty()) {
        return Err(Error::Format(format!("record {}: derivation of {} has no matrices", p.id, d.form)));
    }
    out.push(IdentityRecord {
        lhs: parse(&lhs).map_err(|e| e.in_record(&p.id))?,
        rhs: parse(&rhs).map_err(|e| e.in_record(&p.id))?,
        id: p.id,
        variable_scale: p.scale,
        derivations: p.derivations,
        notes: p.notes,
    });
    Ok(())
}

struct Partial {
    id: String,
    scale: i64,
    lhs: Option<String>,
    rhs: Option<String>,
    derivations: Vec<Derivation>,
    notes: Vec<String>,
}

/// Parses every record in `text`.
pub fn parse_records(text: &str) -> Result<Vec<IdentityRecord>> {
    let mut out = Vec::new();
    let mut cur: Option<Partial> = None;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, val) = line
            .split_once(':')
            .ok_or_else(|| format_err(line_no, "expected `key: value`"))?;
        let (key, val) = (key.trim(), val.trim());
        if key == "id" {
            finish(cur.take(), &mut out)?;
            cur = Some(Partial {
                id: val.to_string(),
                scale: 1,
                lhs: None,
                rhs: None,
                derivations: Vec::new(),
                notes: Vec::new(),
            });
            continue;
        }
        let rec = cur.as_mut().ok_or_else(|| format_err(line_no, "field before first `id:`"))?;
        let ctx = |e: Error| e.with_context(format!("line {line_no}"));
        match key {
            "scale" => {
                rec.scale = val
                    .parse()
                    .ok()
                    .filter(|&s: &i64| s >= 1)
                    .ok_or_else(|| format_err(line_no, "scale must be a positive integer"))?;
            }
            "lhs" => rec.lhs = Some(val.to_string()),
            "rhs" => rec.rhs = Some(val.to_string()),
            "notes" => rec.notes.push(val.to_string()),
            "derivation.form" => rec.derivations.push(Derivation {
                form: val.parse().map_err(ctx)?,
                expansions: Vec::new(),
            }),
            k if k.starts_with("derivation.B") => {
                let d = rec
                    .derivations
                    .last_mut()
                    .ok_or_else(|| format_err(line_no, "matrix before `derivation.form:`"))?;
                let (m, shifts, side) = split_expansion(val);
                let b: IntMatrix = m.parse().map_err(ctx)?;
                let system = parse_shifts(shifts.unwrap_or("auto"), &b).map_err(ctx)?;
                let side = match side {
                    Some(s) => Some(parse_side(s).map_err(ctx)?),
                    None => None,
                };
                d.expansions.push(Expansion { system, side });
            }
            other => return Err(format_err(line_no, format!("unknown field {other:?}"))),
        }
    }
    finish(cur, &mut out)?;
    Ok(out)
}

fn write_side(side: &Side) -> String {
    match side {
        Side::Lhs(1) => "lhs".into(),
        Side::Rhs(1) => "rhs".into(),
        Side::Lhs(k) => format!("{k}*lhs"),
        Side::Rhs(k) => format!("{k}*rhs"),
        Side::Expr(e) => e.to_string(),
    }
}

/// Renders a record so that [`parse_records`] reads it back unchanged.
pub fn write_record(rec: &IdentityRecord) -> String {
    let mut s = format!("id: {}\nscale: {}\nlhs: {}\nrhs: {}\n", rec.id, rec.variable_scale, rec.lhs, rec.rhs);
    for d in &rec.derivations {
        s.push_str(&format!("derivation.form: {}\n", d.form));
        for (j, x) in d.expansions.iter().enumerate() {
            s.push_str(&format!("derivation.B{}: {}  shifts: {}", j + 1, matrix_text(&x.system.b), format_shifts(&x.system)));
            if let Some(side) = &x.side {
                s.push_str(&format!("  side: {}", write_side(side)));
            }
            s.push('\n');
        }
    }
    for n in &rec.notes {
        s.push_str(&format!("notes: {n}\n"));
    }
    s
}

fn matrix_text(b: &IntMatrix) -> String {
    b.rows()
        .iter()
        .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}
