//! Splitting a lattice sum along an exact covering system.
//!
//! Substituting `X = B·Y + R` for each coset representative turns the sum of
//! an extended quadratic form into sums over translated forms. When `BᵀGB` is
//! diagonal each translated sum factors into one theta function per
//! coordinate, so the whole sum becomes a linear combination of theta
//! products.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;

use crate::ecs::{verify_ecs, CosetSystem, IntMatrix, ShiftRange};
use crate::error::{Error, Result};
use crate::expr::{normalize_theta, theta_series, MonomialArg, ThetaExpr};
use crate::quadform::ExtendedQuadForm;
use crate::series::{first_mismatch, QSeries};

/// `coeff · q^{q_shift} · Π f(a, b)` with every factor in normalized range.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ThetaTerm {
    pub coeff: i64,
    pub q_shift: i64,
    pub factors: Vec<(MonomialArg, MonomialArg)>,
    /// Some factor is `f(-1, ·)`, so the term is zero.
    pub vanishing: bool,
}

impl ThetaTerm {
    /// Builds a term from raw theta arguments, moving each factor into
    /// normalized range and collecting the extracted monomials.
    pub fn from_raw(coeff: i64, q_shift: i64, raw: &[(MonomialArg, MonomialArg)]) -> Self {
        let mut term = ThetaTerm {
            coeff,
            q_shift,
            factors: Vec::with_capacity(raw.len()),
            vanishing: false,
        };
        for &(a, b) in raw {
            let nt = normalize_theta(a, b);
            term.coeff *= nt.factor.sign();
            term.q_shift += nt.factor.exponent();
            term.factors.push((nt.a, nt.b));
            term.vanishing |= nt.vanishes;
        }
        term
    }

    pub fn is_zero(&self) -> bool {
        self.vanishing || self.coeff == 0
    }

    pub fn series(&self, order: i64) -> Result<QSeries> {
        if self.is_zero() || order <= self.q_shift {
            return Ok(QSeries::zero(order));
        }
        // normalized, nonvanishing factors all start at q^0
        let inner = order - self.q_shift;
        let mut s = QSeries::one(inner);
        for &(a, b) in &self.factors {
            s = &s * &theta_series(a, b, inner)?;
        }
        Ok(s.scale(&BigInt::from(self.coeff)).shift(self.q_shift))
    }

    fn max_exponent(&self) -> i64 {
        self.factors.iter().map(|(a, b)| a.exponent().max(b.exponent())).max().unwrap_or(0)
    }

    fn product_expr(&self) -> ThetaExpr {
        let mut e: Option<ThetaExpr> = (self.q_shift != 0).then(|| ThetaExpr::monomial(1, self.q_shift));
        for &(a, b) in &self.factors {
            let t = ThetaExpr::Theta(a, b);
            e = Some(match e {
                None => t,
                Some(prev) => prev.mul(t),
            });
        }
        e.unwrap_or_else(|| ThetaExpr::int(1))
    }
}

/// A sum of theta-product terms, in coset order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ThetaCombination {
    pub terms: Vec<ThetaTerm>,
}

impl ThetaCombination {
    pub fn series(&self, order: i64) -> Result<QSeries> {
        let mut total = QSeries::zero(order);
        for t in &self.terms {
            total = &total + &t.series(order)?;
        }
        Ok(total.truncate(order))
    }

    /// Drops zero terms and merges terms with equal monomial and factors.
    pub fn simplified(&self) -> ThetaCombination {
        let mut out: Vec<ThetaTerm> = Vec::new();
        for t in self.terms.iter().filter(|t| !t.is_zero()) {
            match out.iter_mut().find(|u| u.q_shift == t.q_shift && u.factors == t.factors) {
                Some(u) => u.coeff += t.coeff,
                None => out.push(t.clone()),
            }
        }
        out.retain(|t| t.coeff != 0);
        ThetaCombination { terms: out }
    }

    /// Largest theta argument exponent over all terms.
    pub fn max_exponent(&self) -> i64 {
        self.terms.iter().map(ThetaTerm::max_exponent).max().unwrap_or(0)
    }

    /// The combination as an expression; zero terms are omitted.
    pub fn to_expr(&self) -> ThetaExpr {
        let mut e: Option<ThetaExpr> = None;
        for t in self.terms.iter().filter(|t| !t.is_zero()) {
            let body = t.product_expr();
            let mag = t.coeff.abs();
            let scaled = if mag == 1 { body.clone() } else { body.clone().scale(mag) };
            e = Some(match e {
                // `-q^k*…` reads back as this same tree
                None if t.coeff == -1 && t.q_shift != 0 => t.factors.iter().fold(ThetaExpr::monomial(-1, t.q_shift), |acc, &(a, b)| acc.mul(ThetaExpr::Theta(a, b))),
                None if t.coeff < 0 => body.scale(t.coeff),
                None => scaled,
                Some(prev) if t.coeff < 0 => prev.sub(scaled),
                Some(prev) => prev.add(scaled),
            });
        }
        e.unwrap_or_else(|| ThetaExpr::int(0))
    }

    /// Replaces `q^k` by `q` throughout; every exponent must be a multiple
    /// of `k`.
    pub fn extract_power(&self, k: i64) -> Result<ThetaCombination> {
        let div = |e: i64| {
            if e % k == 0 {
                Ok(e / k)
            } else {
                Err(Error::Misaligned { exponent: e, k })
            }
        };
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut factors = Vec::new();
            for &(a, b) in &t.factors {
                factors.push((
                    MonomialArg::new(a.sign(), div(a.exponent())?),
                    MonomialArg::new(b.sign(), div(b.exponent())?),
                ));
            }
            terms.push(ThetaTerm {
                coeff: t.coeff,
                q_shift: div(t.q_shift)?,
                factors,
                vanishing: t.vanishing,
            });
        }
        Ok(ThetaCombination { terms })
    }
}

impl fmt::Display for ThetaCombination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_expr())
    }
}

fn mat_vec(m: &IntMatrix, v: &[i64]) -> Vec<i64> {
    m.mul_vec(v)
}

fn dot(u: &[i64], v: &[i64]) -> i64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// The pieces `(M', v', κ)` of `(XᵀMX + v·X)/2` after `X = B·Y + R`:
/// `M' = BᵀMB`, `v' = Bᵀ(2MR + v)`, `κ = (RᵀMR + v·R)/2`.
fn substitute(m: &IntMatrix, v: &[i64], b: &IntMatrix, r: &[i64]) -> (IntMatrix, Vec<i64>, i64) {
    let bt = b.transpose();
    let m2 = bt.mul(m).mul(b);
    let mr = mat_vec(m, r);
    let inner: Vec<i64> = mr.iter().zip(v).map(|(x, y)| 2 * x + y).collect();
    let v2 = mat_vec(&bt, &inner);
    let kappa = (dot(r, &mr) + dot(v, r)) / 2;
    (m2, v2, kappa)
}

/// Form of `Y` after substituting `X = B·Y + R`, with the constant sign
/// `(-1)^{χ(R)}` split off as `±1`.
pub fn transform(f: &ExtendedQuadForm, b: &IntMatrix, r: &[i64]) -> Result<(ExtendedQuadForm, i64)> {
    if b.n() != f.n() || r.len() != f.n() {
        return Err(Error::Dimension(format!(
            "form of dimension {} with {}x{} matrix and shift of length {}",
            f.n(),
            b.n(),
            b.n(),
            r.len()
        )));
    }
    let (g2, d2, k) = substitute(f.g2(), f.d2(), b, r);
    let (s2, t2, chi) = substitute(f.sign_matrix(), f.sign_linear(), b, r);
    let out = ExtendedQuadForm::new(g2, d2, f.constant() + k, s2, t2)?;
    Ok((out, if chi.rem_euclid(2) == 0 { 1 } else { -1 }))
}

/// Factors the sum of a diagonal form into one theta function per
/// coordinate: `Σ_y (-1)^{(γy²+sy)/2} q^{(gy²+dy)/2} = f(±q^{(g+d)/2}, ±q^{(g-d)/2})`.
pub fn factor_diagonal(f: &ExtendedQuadForm, sign: i64) -> Result<ThetaTerm> {
    let n = f.n();
    if !f.is_diagonal() {
        return Err(Error::NotDiagonal(format!("quadratic part {}", f.g2())));
    }
    let s2 = f.sign_matrix();
    if (0..n).any(|i| (0..n).any(|j| i != j && s2.get(i, j) % 2 != 0)) {
        return Err(Error::NotDiagonal("sign character couples coordinates".into()));
    }
    let mut raw = Vec::with_capacity(n);
    for k in 0..n {
        let (g, d) = (f.g2().get(k, k), f.d2()[k]);
        if g <= 0 {
            return Err(Error::NotPositiveDefinite);
        }
        let (gamma, s) = (s2.get(k, k), f.sign_linear()[k]);
        let sa = if ((gamma + s) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
        let sb = if ((gamma - s) / 2).rem_euclid(2) == 0 { 1 } else { -1 };
        raw.push((MonomialArg::new(sa, (g + d) / 2), MonomialArg::new(sb, (g - d) / 2)));
    }
    Ok(ThetaTerm::from_raw(sign, f.constant(), &raw))
}

/// Order of the numeric self-check run by [`expand_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CheckOrder {
    /// `max(100, 2 · largest theta argument exponent)`.
    #[default]
    Auto,
    Order(i64),
    Skip,
}

impl CheckOrder {
    fn resolve(self, c: &ThetaCombination) -> Option<i64> {
        match self {
            CheckOrder::Auto => Some((2 * c.max_exponent()).max(100)),
            CheckOrder::Order(n) => Some(n),
            CheckOrder::Skip => None,
        }
    }
}

/// One theta-product term per coset representative, re-checked against the
/// lattice sum at the default order.
pub fn expand(f: &ExtendedQuadForm, cs: &CosetSystem) -> Result<ThetaCombination> {
    expand_with(f, cs, CheckOrder::Auto)
}

pub fn expand_with(f: &ExtendedQuadForm, cs: &CosetSystem, check: CheckOrder) -> Result<ThetaCombination> {
    if !verify_ecs(cs) {
        return Err(Error::NotExactCover(format!("{} with representatives {:?}", cs.b, cs.reps)));
    }
    let mut terms = Vec::with_capacity(cs.reps.len());
    for r in &cs.reps {
        let (g, sign) = transform(f, &cs.b, r)?;
        terms.push(factor_diagonal(&g, sign)?);
    }
    let comb = ThetaCombination { terms };
    if let Some(n) = check.resolve(&comb) {
        check_against_lattice(f, &comb, n)?;
    }
    Ok(comb)
}

/// Compares a combination with the lattice sum of `f` up to `order`.
pub fn check_against_lattice(f: &ExtendedQuadForm, comb: &ThetaCombination, order: i64) -> Result<()> {
    let direct = f.direct_series(order)?;
    let ours = comb.series(order)?;
    match first_mismatch(&direct, &ours, order)? {
        None => Ok(()),
        Some(exponent) => Err(Error::ExpansionMismatch { exponent }),
    }
}

/// Lattice-sum form of `Π f(aᵢ, bᵢ)`: coordinate `i` carries
/// `(e(a)+e(b))/2·x² + (e(a)-e(b))/2·x` and the matching sign character.
pub fn product_form(args: &[(MonomialArg, MonomialArg)]) -> Result<ExtendedQuadForm> {
    let n = args.len();
    let diag = |f: &dyn Fn(MonomialArg, MonomialArg) -> i64| -> Result<IntMatrix> {
        let mut rows = vec![vec![0; n]; n];
        for (i, &(a, b)) in args.iter().enumerate() {
            rows[i][i] = f(a, b);
        }
        IntMatrix::from_rows(rows)
    };
    let neg = |m: MonomialArg| i64::from(m.is_negative());
    let g2 = diag(&|a, b| a.exponent() + b.exponent())?;
    let s2 = diag(&|a, b| neg(a) + neg(b))?;
    let d2 = args.iter().map(|(a, b)| a.exponent() - b.exponent()).collect();
    let t2 = args.iter().map(|&(a, b)| neg(a) - neg(b)).collect();
    if let Some((a, b)) = args.iter().find(|(a, b)| a.exponent() + b.exponent() < 1) {
        return Err(Error::DivergentTheta {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    ExtendedQuadForm::new(g2, d2, 0, s2, t2)
}

/// `f(a₁,b₁)·f(a₂,b₂)` split along `B·Z² + (i, 0)` in closed form, for `B`
/// with `m₁b₁₁b₁₂ + m₂b₂₁b₂₂ = 0` and `gcd(b₂₁, b₂₂) = 1`, where
/// `mⱼ = e(aⱼ) + e(bⱼ)`. When instead only `gcd(b₁₁, b₁₂) = 1` holds the
/// split runs along `(0, i)` through the general engine.
pub fn expand_product(
    a1: MonomialArg,
    b1: MonomialArg,
    a2: MonomialArg,
    b2: MonomialArg,
    b: &IntMatrix,
    range: ShiftRange,
) -> Result<ThetaCombination> {
    if b.n() != 2 {
        return Err(Error::Dimension("product expansion needs a 2x2 matrix".into()));
    }
    let (m1, m2) = (a1.exponent() + b1.exponent(), a2.exponent() + b2.exponent());
    if m1 < 1 || m2 < 1 {
        return Err(Error::Precondition(format!("exponent sums m1 = {m1}, m2 = {m2} must be positive")));
    }
    let (b11, b12, b21, b22) = (b.get(0, 0), b.get(0, 1), b.get(1, 0), b.get(1, 1));
    let k = b.det().abs();
    if k == 0 {
        return Err(Error::Singular);
    }
    if m1 * b11 * b12 + m2 * b21 * b22 != 0 {
        return Err(Error::Precondition(format!(
            "orthogonality fails: {m1}·{b11}·{b12} + {m2}·{b21}·{b22} ≠ 0"
        )));
    }
    let (lo, hi) = range.bounds(k);
    if b21.gcd(&b22) != 1 {
        if b11.gcd(&b12) != 1 {
            return Err(Error::Precondition(format!(
                "neither gcd(b21, b22) = {} nor gcd(b11, b12) = {} is 1",
                b21.gcd(&b22),
                b11.gcd(&b12)
            )));
        }
        let f = product_form(&[(a1, b1), (a2, b2)])?;
        let cs = CosetSystem::simple(b.clone(), 1, range)?;
        return expand(&f, &cs);
    }
    // x^{(t²+t)/2} y^{(t²-t)/2}, the n = t summand of f(x, y)
    let tri = |x: MonomialArg, y: MonomialArg, t: i64| x.pow((t * t + t) / 2).times(y.pow((t * t - t) / 2));
    let column = |u: i64, v: i64, i: i64| {
        let first = tri(a1, b1, u).times(a1.times(b1).pow(u * i)).times(tri(a2, b2, v));
        let second = tri(b1, a1, u).times(a1.times(b1).pow(-u * i)).times(tri(b2, a2, v));
        (first, second)
    };
    let terms = (lo..=hi)
        .map(|i| {
            let lead = tri(a1, b1, i);
            let raw = [column(b11, b21, i), column(b12, b22, i)];
            ThetaTerm::from_raw(lead.sign(), lead.exponent(), &raw)
        })
        .collect();
    Ok(ThetaCombination { terms })
}
