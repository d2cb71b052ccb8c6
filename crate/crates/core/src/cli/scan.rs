//! Determinant sweep: expand small extended binary forms along every
//! diagonalizer and keep the pairs of expansions as candidate identities.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::Signed;
use rayon::prelude::*;

use crate::corpus::{Derivation, Expansion, IdentityRecord, Side};
use crate::ecs::{parse_shifts, CosetSystem, IntMatrix};
use crate::error::Result;
use crate::expand::{expand_with, CheckOrder, ThetaCombination};
use crate::quadform::{enumerate_reduced_primitive, find_congruence_matrices, BinaryForm, ExtendedQuadForm};
use crate::series::{eq_to_order, QSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub max_det: i64,
    /// Comparison order for every candidate.
    pub order: i64,
    /// Largest `|det B|` tried as a diagonalizer.
    pub max_index: i64,
    /// `|dᵢ|` bound for linear parts; `None` means `2·max(a, c)`.
    pub lin_box: Option<i64>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            max_det: 11,
            order: 100,
            max_index: 5,
            lin_box: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagonalizer {
    pub matrix: IntMatrix,
    pub target: Vec<i64>,
    pub system: CosetSystem,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub form: ExtendedQuadForm,
    /// Indices into [`ScanResult::diagonalizers`].
    pub pair: (usize, usize),
    pub lhs: ThetaCombination,
    pub rhs: ThetaCombination,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanResult {
    pub determinant: i64,
    pub form: BinaryForm,
    pub diagonalizers: Vec<Diagonalizer>,
    pub candidate_identities: Vec<Candidate>,
    /// Every candidate's two sides agree as series at the scan order.
    pub verified: bool,
}

fn divisors(n: i64) -> Vec<i64> {
    (1..=n).take_while(|d| d * d <= n).filter(|d| n % d == 0).flat_map(|d| [d, n / d]).collect::<BTreeSet<_>>().into_iter().collect()
}

/// Diagonalizers of `f` to `diag(t₁, t₂)` with `t₁ ≤ t₂`, ordered by
/// `|det|`, then target, then matrix.
pub fn diagonalizers(f: BinaryForm, max_index: i64) -> Result<Vec<Diagonalizer>> {
    let g2 = f.to_form().g2().clone();
    let d = f.determinant();
    let mut out = Vec::new();
    for k in 1..=max_index {
        let n = d * k * k;
        for t1 in divisors(n).into_iter().filter(|t| t * t <= n) {
            let target = vec![t1, n / t1];
            for b in find_congruence_matrices(&g2, &target, None)? {
                let system = parse_shifts("auto", &b)?;
                out.push(Diagonalizer {
                    matrix: b,
                    target: target.clone(),
                    system,
                });
            }
        }
    }
    Ok(out)
}

/// Coefficients from the lowest nonzero exponent over a fixed window, with
/// the leading coefficient made positive; equal keys mean the sums agree up
/// to `±q^c`.
fn shape_key(s: &QSeries, window: i64) -> Option<Vec<BigInt>> {
    let v = s.min_exp()?;
    if v + window > s.order() {
        return None;
    }
    let mut coeffs = s.coefficients(v, v + window);
    if coeffs[0].is_negative() {
        coeffs.iter_mut().for_each(|c| *c = -c.clone());
    }
    Some(coeffs)
}

/// Extended forms over `f` with distinct lattice-sum shapes, in sweep order.
fn extended_forms(f: BinaryForm, opts: &ScanOptions) -> Result<Vec<(ExtendedQuadForm, QSeries)>> {
    let r = opts.lin_box.unwrap_or(2 * f.a.max(f.c));
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for d1 in [0, 1] {
        for d2 in [0, 1] {
            for x in -r..=r {
                for y in -r..=r {
                    let form = ExtendedQuadForm::from_coefficients(&[f.a, f.two_b, f.c], &[x, y], 0, &[d1, d2])?;
                    let s = form.direct_series(opts.order)?;
                    let Some(key) = shape_key(&s, opts.order / 2) else { continue };
                    if seen.insert(key) {
                        out.push((form, s));
                    }
                }
            }
        }
    }
    Ok(out)
}

fn scan_form(d: i64, f: BinaryForm, opts: &ScanOptions) -> Result<Option<ScanResult>> {
    let diags = diagonalizers(f, opts.max_index)?;
    if diags.len() < 2 {
        return Ok(None);
    }
    let mut candidates = Vec::new();
    let mut verified = true;
    for (form, direct) in extended_forms(f, opts)? {
        let combos = diags
            .iter()
            .map(|g| Ok(expand_with(&form, &g.system, CheckOrder::Skip)?.simplified()))
            .collect::<Result<Vec<_>>>()?;
        let agrees = combos
            .iter()
            .map(|c| eq_to_order(&c.series(opts.order)?, &direct, opts.order))
            .collect::<Result<Vec<bool>>>()?;
        for i in 0..diags.len() {
            for j in i + 1..diags.len() {
                if !(agrees[i] && agrees[j]) {
                    verified = false;
                    continue;
                }
                // both sides the same combination says nothing
                if combos[i] == combos[j] {
                    continue;
                }
                candidates.push(Candidate {
                    form: form.clone(),
                    pair: (i, j),
                    lhs: combos[i].clone(),
                    rhs: combos[j].clone(),
                });
            }
        }
    }
    Ok(Some(ScanResult {
        determinant: d,
        form: f,
        diagonalizers: diags,
        candidate_identities: candidates,
        verified,
    }))
}

/// Sweeps determinants `1..=max_det`; results come back in determinant,
/// then form order regardless of scheduling.
pub fn cmd_scan(opts: &ScanOptions) -> Result<Vec<ScanResult>> {
    let forms: Vec<(i64, BinaryForm)> = (1..=opts.max_det)
        .flat_map(|d| enumerate_reduced_primitive(d).into_iter().map(move |f| (d, f)))
        .collect();
    let results = forms
        .par_iter()
        .map(|&(d, f)| scan_form(d, f, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(results.into_iter().flatten().collect())
}

/// Corpus records for every candidate, ids `scan-D<det>-(a,2b,c)-<n>`.
pub fn scan_records(results: &[ScanResult]) -> Vec<IdentityRecord> {
    let mut out = Vec::new();
    for r in results {
        for (n, c) in r.candidate_identities.iter().enumerate() {
            let (i, j) = c.pair;
            let exp = |g: &Diagonalizer, side| Expansion {
                system: g.system.clone(),
                side: Some(side),
            };
            out.push(IdentityRecord {
                id: format!("scan-D{}-{}-{}", r.determinant, r.form, n + 1),
                lhs: c.lhs.to_expr(),
                rhs: c.rhs.to_expr(),
                variable_scale: 1,
                derivations: vec![Derivation {
                    form: c.form.clone(),
                    expansions: vec![exp(&r.diagonalizers[i], Side::Lhs(1)), exp(&r.diagonalizers[j], Side::Rhs(1))],
                }],
                notes: vec![format!(
                    "diag{:?} by det {} and diag{:?} by det {}",
                    r.diagonalizers[i].target,
                    r.diagonalizers[i].matrix.det(),
                    r.diagonalizers[j].target,
                    r.diagonalizers[j].matrix.det()
                )],
            });
        }
    }
    out
}
