//! Command-line surface. Each `cmd_*` returns its printed output and exit
//! code so that the binary stays a thin shell.
//!
//! Exit codes: 0 success, 1 a check came out false, 2 usage or input error.

pub mod scan;

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::corpus::{self, IdentityRecord};
use crate::ecs::{is_simple_covering, parse_shifts, verify_ecs, IntMatrix};
use crate::error::{Error, Result};
use crate::expand::{expand_with, CheckOrder};
use crate::expr::{eval, parse};
use crate::quadform::{enumerate_reduced_primitive, find_congruence_matrices, parse_gram, ExtendedQuadForm};

pub use scan::{cmd_scan, scan_records, ScanOptions, ScanResult};

/// Printed output plus exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { stdout, code: 0 }
    }

    fn check(stdout: String, passed: bool) -> Self {
        Outcome {
            stdout,
            code: if passed { 0 } else { 1 },
        }
    }
}

/// Default order, overridable through `THETAFORGE_ORDER`.
pub fn default_order(fallback: i64) -> i64 {
    std::env::var("THETAFORGE_ORDER")
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .filter(|&n: &i64| n >= 1)
        .unwrap_or(fallback)
}

#[derive(Debug, Parser)]
#[command(name = "thetaforge", version, about = "Exact q-series engine for theta-function product identities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the coefficients of an expression from q^0 up to the order.
    Series {
        expr: String,
        #[arg(long)]
        order: Option<i64>,
        /// Print as a truncated series instead of a coefficient list.
        #[arg(long)]
        pretty: bool,
    },
    /// Check corpus records.
    Verify {
        ids: Vec<String>,
        #[arg(long)]
        all: bool,
        #[arg(long)]
        order: Option<i64>,
        #[arg(long)]
        json: bool,
        /// Also replay derivation blocks.
        #[arg(long)]
        derivations: bool,
        /// Corpus directory; defaults to THETAFORGE_CORPUS or the bundled corpus.
        #[arg(long)]
        corpus: Option<PathBuf>,
    },
    /// Expand the lattice sum of an extended form along a covering system.
    Expand {
        #[arg(long)]
        form: String,
        #[arg(long)]
        matrix: String,
        /// Shift specification: `auto`, `e1`, `e2, -1..1`, `canonical`, or `0,0; 1,0`.
        #[arg(long, default_value = "auto")]
        shifts: String,
        /// Order of the numeric self-check; 0 skips it.
        #[arg(long)]
        check_order: Option<i64>,
        /// Keep vanishing and repeated terms.
        #[arg(long)]
        raw: bool,
    },
    /// Find integer B with Bᵀ·G·B = diag(target).
    FindMatrix {
        #[arg(long)]
        gram: String,
        #[arg(long)]
        target: String,
        #[arg(long)]
        bound: Option<i64>,
    },
    /// List reduced primitive positive definite forms of a determinant.
    ReduceForms {
        #[arg(long)]
        det: i64,
    },
    /// Check that shifts of B·Zⁿ partition Zⁿ.
    CheckEcs {
        #[arg(long)]
        matrix: String,
        /// Representatives as `0,0; 1,0`, or any shift specification.
        #[arg(long, default_value = "auto")]
        reps: String,
    },
    /// Sweep determinants for forms with several diagonalizers.
    Scan {
        #[arg(long)]
        max_det: i64,
        #[arg(long)]
        order: Option<i64>,
        #[arg(long, default_value_t = 5)]
        max_index: i64,
        #[arg(long)]
        lin_box: Option<i64>,
        /// Write corpus-format records here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn cmd_series(expr: &str, order: i64, pretty: bool) -> Result<Outcome> {
    let s = eval(&parse(expr)?, order)?;
    if pretty {
        return Ok(Outcome::ok(format!("{s}\n")));
    }
    let lo = s.min_exp().map_or(0, |v| v.min(0));
    let mut out = String::new();
    if lo < 0 {
        writeln!(out, "from q^{lo}:").unwrap();
    }
    let list: Vec<String> = s.coefficients(lo, order).iter().map(ToString::to_string).collect();
    writeln!(out, "{}", list.join(", ")).unwrap();
    Ok(Outcome::ok(out))
}

pub fn cmd_verify(records: &[IdentityRecord], ids: &[String], all: bool, order: i64, json: bool, derivations: bool) -> Result<Outcome> {
    let chosen: Vec<IdentityRecord> = if all {
        records.to_vec()
    } else if ids.is_empty() {
        return Err(Error::Precondition("name record ids or pass --all".into()));
    } else {
        corpus::select(records, ids)?.into_iter().cloned().collect()
    };
    let reports = corpus::verify_all(&chosen, order);
    let mut passed = reports.iter().all(|r| r.ok);
    let dreps = if derivations {
        let d = corpus::verify_all_derivations(&chosen, order);
        passed &= d.iter().all(|r| r.ok);
        d
    } else {
        Vec::new()
    };
    let mut out = String::new();
    if json {
        let text = if derivations {
            serde_json::to_string_pretty(&serde_json::json!({ "records": reports, "derivations": dreps }))
        } else {
            serde_json::to_string_pretty(&reports)
        };
        writeln!(out, "{}", text.map_err(|e| Error::Format(e.to_string()))?).unwrap();
    } else {
        for r in &reports {
            match (&r.error, r.first_mismatch) {
                (Some(e), _) => writeln!(out, "{:<14} error     {e}", r.id),
                (None, Some(m)) => writeln!(out, "{:<14} MISMATCH  first at q^{m} ({} ms)", r.id, r.elapsed_ms),
                (None, None) => writeln!(out, "{:<14} ok        ({} ms)", r.id, r.elapsed_ms),
            }
            .unwrap();
        }
        for d in &dreps {
            if d.ok {
                writeln!(out, "{:<14} derivation ok ({} ms)", d.id, d.elapsed_ms).unwrap();
            } else {
                writeln!(
                    out,
                    "{:<14} derivation FAILED at {:?} stage {:?}: {}",
                    d.id,
                    d.failed_at,
                    d.stage,
                    d.detail.as_deref().unwrap_or("")
                )
                .unwrap();
            }
        }
        let bad = reports.iter().filter(|r| !r.ok).count() + dreps.iter().filter(|r| !r.ok).count();
        writeln!(out, "{} checked, {} failed", reports.len() + dreps.len(), bad).unwrap();
    }
    Ok(Outcome::check(out, passed))
}

pub fn cmd_expand(form: &str, matrix: &str, shifts: &str, check_order: Option<i64>, raw: bool) -> Result<Outcome> {
    let f: ExtendedQuadForm = form.parse()?;
    let b: IntMatrix = matrix.parse()?;
    let cs = parse_shifts(shifts, &b)?;
    let check = match check_order {
        None => CheckOrder::Auto,
        Some(0) => CheckOrder::Skip,
        Some(n) => CheckOrder::Order(n),
    };
    let c = expand_with(&f, &cs, check)?;
    let c = if raw { c } else { c.simplified() };
    let mut out = String::new();
    if raw {
        for t in &c.terms {
            let one = crate::expand::ThetaCombination { terms: vec![t.clone()] };
            let note = if t.vanishing { "  (vanishing)" } else { "" };
            let text = if t.vanishing { format!("{}*q^{} * {:?}", t.coeff, t.q_shift, t.factors) } else { one.to_string() };
            writeln!(out, "{text}{note}").unwrap();
        }
    } else {
        writeln!(out, "{c}").unwrap();
    }
    Ok(Outcome::ok(out))
}

fn parse_list(s: &str) -> Result<Vec<i64>> {
    crate::ecs::parse_vector(s)
}

pub fn cmd_find_matrix(gram: &str, target: &str, bound: Option<i64>) -> Result<Outcome> {
    let g2 = parse_gram(gram)?;
    let found = find_congruence_matrices(&g2, &parse_list(target)?, bound)?;
    let mut out = String::new();
    for b in &found {
        writeln!(out, "{b}").unwrap();
    }
    Ok(Outcome::check(out, !found.is_empty()))
}

pub fn cmd_reduce_forms(det: i64) -> Result<Outcome> {
    if det < 1 {
        return Err(Error::Precondition(format!("determinant must be positive, got {det}")));
    }
    let mut out = String::new();
    for f in enumerate_reduced_primitive(det) {
        writeln!(out, "{f}").unwrap();
    }
    Ok(Outcome::ok(out))
}

pub fn cmd_check_ecs(matrix: &str, reps: &str) -> Result<Outcome> {
    let b: IntMatrix = matrix.parse()?;
    if b.det() == 0 {
        return Err(Error::Singular);
    }
    let cs = parse_shifts(reps, &b)?;
    let ok = verify_ecs(&cs);
    let mut out = String::new();
    writeln!(out, "|det| = {}, {} representatives", b.det().abs(), cs.reps.len()).unwrap();
    match is_simple_covering(&b) {
        Some((j, _)) => writeln!(out, "simple covering along e{}", j + 1).unwrap(),
        None => writeln!(out, "not a simple covering matrix").unwrap(),
    }
    writeln!(out, "{}", if ok { "exact cover" } else { "not an exact cover" }).unwrap();
    Ok(Outcome::check(out, ok))
}

/// Text output of a scan: a summary comment per form followed by records.
pub fn render_scan(results: &[ScanResult]) -> String {
    let mut out = String::new();
    for r in results {
        let dets: Vec<String> = r
            .diagonalizers
            .iter()
            .map(|g| format!("{} -> diag({},{})", g.matrix, g.target[0], g.target[1]))
            .collect();
        writeln!(out, "# D = {}, form {}, {} candidates, verified: {}", r.determinant, r.form, r.candidate_identities.len(), r.verified).unwrap();
        for d in dets {
            writeln!(out, "#   {d}").unwrap();
        }
    }
    out.push('\n');
    for rec in scan_records(results) {
        out.push_str(&corpus::write_record(&rec));
        out.push('\n');
    }
    out
}

fn dispatch(cli: Cli) -> Result<Outcome> {
    match cli.command {
        Command::Series { expr, order, pretty } => cmd_series(&expr, order.unwrap_or_else(|| default_order(20)), pretty),
        Command::Verify {
            ids,
            all,
            order,
            json,
            derivations,
            corpus,
        } => {
            let dir = corpus.unwrap_or_else(corpus::default_dir);
            let records = corpus::load_dir(&dir)?;
            cmd_verify(&records, &ids, all, order.unwrap_or_else(|| default_order(corpus::DEFAULT_ORDER)), json, derivations)
        }
        Command::Expand {
            form,
            matrix,
            shifts,
            check_order,
            raw,
        } => cmd_expand(&form, &matrix, &shifts, check_order, raw),
        Command::FindMatrix { gram, target, bound } => cmd_find_matrix(&gram, &target, bound),
        Command::ReduceForms { det } => cmd_reduce_forms(det),
        Command::CheckEcs { matrix, reps } => cmd_check_ecs(&matrix, &reps),
        Command::Scan {
            max_det,
            order,
            max_index,
            lin_box,
            out,
        } => {
            if max_det < 1 {
                return Err(Error::Precondition(format!("max-det must be at least 1, got {max_det}")));
            }
            let opts = ScanOptions {
                max_det,
                order: order.unwrap_or_else(|| default_order(ScanOptions::default().order)),
                max_index,
                lin_box,
            };
            let text = render_scan(&cmd_scan(&opts)?);
            match out {
                Some(path) => {
                    std::fs::write(&path, &text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    Ok(Outcome::ok(String::new()))
                }
                None => Ok(Outcome::ok(text)),
            }
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the exit code after printing.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(o) => {
            print!("{}", o.stdout);
            o.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_examples() {
        assert_eq!(cmd_series("phi(q)", 5, false).unwrap().stdout, "1, 2, 0, 0, 2\n");
        assert_eq!(cmd_series("chi(-q)", 6, false).unwrap().stdout, "1, -1, 0, -1, 1, -1\n");
        let out = cmd_series("G(q^11)*H(q) - q^2*G(q)*H(q^11)", 40, false).unwrap().stdout;
        let want = std::iter::once("1").chain(std::iter::repeat("0").take(39)).collect::<Vec<_>>().join(", ");
        assert_eq!(out.trim(), want);
        assert_eq!(cmd_series("q^-1 + 1", 3, false).unwrap().stdout, "from q^-1:\n1, 1, 0, 0\n");
    }

    #[test]
    fn find_matrix_examples() {
        let o = cmd_find_matrix("3,1;1,4", "3,33", None).unwrap();
        assert_eq!((o.stdout.as_str(), o.code), ("[[1,-1],[0,3]]\n", 0));
        let o = cmd_find_matrix("1,0;0,1", "3,3", None).unwrap();
        assert_eq!(o.code, 1);
    }

    #[test]
    fn reduce_forms_example() {
        assert_eq!(cmd_reduce_forms(11).unwrap().stdout, "(1,0,11)\n(3,-2,4)\n(3,2,4)\n");
    }

    #[test]
    fn check_ecs_codes() {
        assert_eq!(cmd_check_ecs("1,1;-1,1", "0,0; 1,0").unwrap().code, 0);
        assert_eq!(cmd_check_ecs("1,1;-1,1", "0,0; 2,0").unwrap().code, 1);
        assert!(cmd_check_ecs("1,1;1,1", "auto").is_err());
    }

    #[test]
    fn expand_prints_combination() {
        let o = cmd_expand("quad: 1,1,1", "1,1;-1,1", "0,0; 1,0", None, false).unwrap();
        assert_eq!(o.stdout, "f(q,q)*f(q^3,q^3) + q*f(1,q^2)*f(1,q^6)\n");
    }
}
