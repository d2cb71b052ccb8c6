//! Catalog of theta-product identities with their lattice-sum derivations,
//! and the harness that checks them.
//!
//! A record states `lhs = rhs` as expressions in `q`. Its derivation blocks
//! name an extended quadratic form and several covering systems; each
//! expansion of the form must agree with the form's lattice sum, and may be
//! tied to a side of the statement written in `q^scale`.

mod format;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use format::{parse_records, write_record};

use crate::ecs::{verify_ecs, CosetSystem};
use crate::error::{Error, Result};
use crate::expand::{expand_with, CheckOrder, ThetaCombination};
use crate::expr::{eval, ThetaExpr};
use crate::quadform::ExtendedQuadForm;
use crate::series::{first_mismatch, QSeries};

/// Default comparison order for statements.
pub const DEFAULT_ORDER: i64 = 300;
/// Default comparison order for derivations.
pub const DEFAULT_DERIVATION_ORDER: i64 = 200;

/// What one expansion of a derivation form is expected to equal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Side {
    /// `k · lhs(q^scale)`
    Lhs(i64),
    /// `k · rhs(q^scale)`
    Rhs(i64),
    /// An expression in the form's own variable.
    Expr(ThetaExpr),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub system: CosetSystem,
    pub side: Option<Side>,
}

/// One form expanded along several covering systems.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub form: ExtendedQuadForm,
    pub expansions: Vec<Expansion>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityRecord {
    pub id: String,
    pub lhs: ThetaExpr,
    pub rhs: ThetaExpr,
    /// Power of `q` that the statement's variable stands for in derivations.
    pub variable_scale: i64,
    pub derivations: Vec<Derivation>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub id: String,
    pub ok: bool,
    pub first_mismatch: Option<i64>,
    pub elapsed_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Stage of a derivation check, in the order they run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    /// The representatives do not form an exact cover.
    Ecs,
    /// Expansion failed: not diagonal, or its internal numeric check.
    Expansion,
    /// The expansion disagrees with the form's lattice sum.
    Direct,
    /// The expansion disagrees with the side it is tied to.
    Side,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub id: String,
    pub ok: bool,
    /// `(block, expansion)` indices, 1-based, of the first failure.
    pub failed_at: Option<(usize, usize)>,
    pub stage: Option<Stage>,
    pub first_mismatch: Option<i64>,
    pub detail: Option<String>,
    pub elapsed_ms: u64,
}

fn elapsed_ms(start: Instant) -> u64 {
    u64::try_from(start.elapsed().as_millis()).unwrap_or(u64::MAX)
}

fn check_order(order: i64) -> Result<()> {
    if order < 10 {
        return Err(Error::Precondition(format!("verification order must be at least 10, got {order}")));
    }
    Ok(())
}

/// Compares both sides of `rec` up to `order`.
pub fn verify(rec: &IdentityRecord, order: i64) -> Result<VerifyReport> {
    check_order(order)?;
    let start = Instant::now();
    let run = || -> Result<Option<i64>> {
        let l = eval(&rec.lhs, order)?;
        let r = eval(&rec.rhs, order)?;
        first_mismatch(&l, &r, order)
    };
    let mismatch = run().map_err(|e| e.in_record(&rec.id))?;
    Ok(VerifyReport {
        id: rec.id.clone(),
        ok: mismatch.is_none(),
        first_mismatch: mismatch,
        elapsed_ms: elapsed_ms(start),
        error: None,
    })
}

/// Series of a side at `order`, in the derivation form's variable.
fn side_series(rec: &IdentityRecord, side: &Side, order: i64) -> Result<QSeries> {
    let s = rec.variable_scale;
    let stated = |e: &ThetaExpr, k: i64| -> Result<QSeries> {
        // order ⌈order/s⌉ in q covers order in q^s
        let inner = eval(e, (order + s - 1) / s)?;
        Ok(inner.substitute_power(s).scale(&BigInt::from(k)).truncate(order))
    };
    match side {
        Side::Lhs(k) => stated(&rec.lhs, *k),
        Side::Rhs(k) => stated(&rec.rhs, *k),
        Side::Expr(e) => eval(e, order),
    }
}

/// All expansions of every derivation block of `rec`, in file order.
pub fn expansions(rec: &IdentityRecord) -> Result<Vec<Vec<ThetaCombination>>> {
    rec.derivations
        .iter()
        .map(|d| {
            d.expansions
                .iter()
                .map(|x| expand_with(&d.form, &x.system, CheckOrder::Auto))
                .collect()
        })
        .collect::<Result<_>>()
        .map_err(|e| e.in_record(&rec.id))
}

/// Checks every derivation block: exact covers, expansions (with their
/// internal check), agreement with the lattice sum, and the tied sides.
pub fn verify_derivation(rec: &IdentityRecord, order: i64) -> Result<DerivationReport> {
    check_order(order)?;
    if rec.derivations.is_empty() {
        return Err(Error::Precondition(format!("record {} has no derivation", rec.id)));
    }
    let start = Instant::now();
    let mut report = DerivationReport {
        id: rec.id.clone(),
        ok: true,
        failed_at: None,
        stage: None,
        first_mismatch: None,
        detail: None,
        elapsed_ms: 0,
    };
    let mut fail = |at: (usize, usize), stage: Stage, mismatch: Option<i64>, detail: String| {
        report.ok = false;
        report.failed_at = Some(at);
        report.stage = Some(stage);
        report.first_mismatch = mismatch;
        report.detail = Some(detail);
    };
    'blocks: for (bi, d) in rec.derivations.iter().enumerate() {
        let direct = d.form.direct_series(order).map_err(|e| e.in_record(&rec.id))?;
        for (xi, x) in d.expansions.iter().enumerate() {
            let at = (bi + 1, xi + 1);
            if !verify_ecs(&x.system) {
                fail(at, Stage::Ecs, None, format!("{} with {:?}", x.system.b, x.system.reps));
                break 'blocks;
            }
            let comb = match expand_with(&d.form, &x.system, CheckOrder::Auto) {
                Ok(c) => c,
                Err(e @ Error::ExpansionMismatch { exponent }) => {
                    fail(at, Stage::Expansion, Some(exponent), e.to_string());
                    break 'blocks;
                }
                Err(e @ (Error::NotDiagonal(_) | Error::NotExactCover(_))) => {
                    fail(at, Stage::Expansion, None, e.to_string());
                    break 'blocks;
                }
                Err(e) => return Err(e.in_record(&rec.id)),
            };
            let ours = comb.series(order).map_err(|e| e.in_record(&rec.id))?;
            if let Some(m) = first_mismatch(&ours, &direct, order)? {
                fail(at, Stage::Direct, Some(m), format!("{comb}"));
                break 'blocks;
            }
            if let Some(side) = &x.side {
                let want = side_series(rec, side, order).map_err(|e| e.in_record(&rec.id))?;
                if let Some(m) = first_mismatch(&ours, &want, order)? {
                    fail(at, Stage::Side, Some(m), format!("{comb}"));
                    break 'blocks;
                }
            }
        }
    }
    report.elapsed_ms = elapsed_ms(start);
    Ok(report)
}

/// Runs [`verify`] over `records` in parallel; reports keep input order and
/// evaluation errors become failed reports.
pub fn verify_all(records: &[IdentityRecord], order: i64) -> Vec<VerifyReport> {
    records
        .par_iter()
        .map(|r| {
            verify(r, order).unwrap_or_else(|e| VerifyReport {
                id: r.id.clone(),
                ok: false,
                first_mismatch: None,
                elapsed_ms: 0,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

/// Runs [`verify_derivation`] over the derivation-bearing records.
pub fn verify_all_derivations(records: &[IdentityRecord], order: i64) -> Vec<DerivationReport> {
    records
        .par_iter()
        .filter(|r| !r.derivations.is_empty())
        .map(|r| {
            verify_derivation(r, order).unwrap_or_else(|e| DerivationReport {
                id: r.id.clone(),
                ok: false,
                failed_at: None,
                stage: None,
                first_mismatch: None,
                detail: Some(e.to_string()),
                elapsed_ms: 0,
            })
        })
        .collect()
}

/// Directory holding the bundled corpus; `THETAFORGE_CORPUS` overrides it.
pub fn default_dir() -> PathBuf {
    std::env::var_os("THETAFORGE_CORPUS")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus"))
}

/// Reads every `*.rec` file under `dir`, in file-name order.
pub fn load_dir(dir: &Path) -> Result<Vec<IdentityRecord>> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "rec"))
        .collect();
    paths.sort();
    let mut out = Vec::new();
    for p in paths {
        let text = fs::read_to_string(&p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
        let recs = parse_records(&text).map_err(|e| e.with_context(p.display()))?;
        out.extend(recs);
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = out.iter().find(|r| !seen.insert(r.id.clone())) {
        return Err(Error::Format(format!("duplicate record id {}", dup.id)));
    }
    Ok(out)
}

/// The bundled corpus.
pub fn load_default() -> Result<Vec<IdentityRecord>> {
    load_dir(&default_dir())
}

/// Looks records up by id, in the order requested.
pub fn select<'a>(records: &'a [IdentityRecord], ids: &[String]) -> Result<Vec<&'a IdentityRecord>> {
    ids.iter()
        .map(|id| {
            records
                .iter()
                .find(|r| &r.id == id)
                .ok_or_else(|| Error::Precondition(format!("no record with id {id}")))
        })
        .collect()
}
