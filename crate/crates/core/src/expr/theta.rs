//! Ramanujan's two-parameter theta function on monomial arguments: series
//! evaluation, product forms, normalization by the shift law, and
//! k-dissection.

use num_bigint::BigInt;

use super::MonomialArg;
use crate::error::{Error, Result};
use crate::series::QSeries;

fn check_convergent(a: MonomialArg, b: MonomialArg) -> Result<()> {
    if a.exponent() + b.exponent() < 1 {
        return Err(Error::DivergentTheta {
            a: a.to_string(),
            b: b.to_string(),
        });
    }
    Ok(())
}

/// The `n`-th summand `a^{n(n+1)/2} b^{n(n-1)/2}` as a signed monomial.
fn summand(a: MonomialArg, b: MonomialArg, n: i64) -> MonomialArg {
    a.pow(n * (n + 1) / 2).times(b.pow(n * (n - 1) / 2))
}

/// `f(a, b) = Σ_n a^{n(n+1)/2} b^{n(n-1)/2}`, every term below `order`.
///
/// Arguments may carry negative exponents as long as `e(a) + e(b) ≥ 1`.
pub fn theta_series(a: MonomialArg, b: MonomialArg, order: i64) -> Result<QSeries> {
    check_convergent(a, b)?;
    let s = (a.exponent() + b.exponent()) as i128;
    let (ea, eb) = (a.exponent() as i128, b.exponent() as i128);
    // exponent of the n-th term is (s n^2 + (ea - eb) n) / 2, minimal near
    // n* = (eb - ea) / (2s); it increases monotonically away from n*
    let exp_at = |n: i128| (s * n * n + (ea - eb) * n) / 2;
    let pivot = (eb - ea).div_euclid(2 * s);
    let mut terms: Vec<(i64, i64)> = Vec::new();
    let mut n = pivot;
    while exp_at(n) < order as i128 {
        let m = summand(a, b, n as i64);
        terms.push((m.exponent(), m.sign()));
        n += 1;
    }
    let mut n = pivot - 1;
    while exp_at(n) < order as i128 {
        let m = summand(a, b, n as i64);
        terms.push((m.exponent(), m.sign()));
        n -= 1;
    }
    Ok(QSeries::from_terms(terms, order))
}

/// `(x; p)_∞ = Π_{k≥0} (1 - x p^k)` truncated below `order`.
///
/// Requires `e(x) ≥ 0` and `e(p) ≥ 1`.
pub fn pochhammer(x: MonomialArg, p: MonomialArg, order: i64) -> QSeries {
    assert!(x.exponent() >= 0 && p.exponent() >= 1, "pochhammer needs x = ±q^e, e ≥ 0, and p of positive degree");
    let mut out = QSeries::one(order);
    let mut t = x;
    while t.exponent() < order {
        out.mul_one_plus(-t.sign(), t.exponent());
        if out.is_zero() {
            break;
        }
        t = t.times(p);
    }
    out
}

/// Jacobi triple product `(-a; ab)_∞ (-b; ab)_∞ (ab; ab)_∞`, evaluated after
/// normalization so that both arguments have nonnegative exponent.
pub fn theta_product(a: MonomialArg, b: MonomialArg, order: i64) -> Result<QSeries> {
    check_convergent(a, b)?;
    let nt = normalize_theta(a, b);
    let (a, b) = (nt.a, nt.b);
    let ab = a.times(b);
    // the prefactor q^shift lowers the window we need by its exponent
    let inner = order - nt.factor.exponent();
    if inner <= 0 {
        return Ok(QSeries::zero(order));
    }
    let p = &(&pochhammer(a.negated(), ab, inner) * &pochhammer(b.negated(), ab, inner))
        * &pochhammer(ab, ab, inner);
    Ok(p.scale(&BigInt::from(nt.factor.sign())).shift(nt.factor.exponent()).truncate(order))
}

/// Result of moving `f(a, b)` into canonical position with the shift law.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalizedTheta {
    /// Monomial pulled out in front: `f(a, b) = factor · f(a', b')`.
    pub factor: MonomialArg,
    pub a: MonomialArg,
    pub b: MonomialArg,
    /// `a' = -1`, so the theta function is identically zero.
    pub vanishes: bool,
}

/// Rewrites `f(a, b)` as `factor · f(a', b')` with `0 ≤ e(a') ≤ e(b')`.
///
/// Equal exponents are ordered so that a negative argument comes first.
pub fn normalize_theta(a: MonomialArg, b: MonomialArg) -> NormalizedTheta {
    let s = a.exponent() + b.exponent();
    assert!(s >= 1, "normalize_theta needs e(a) + e(b) ≥ 1");
    let n = -a.exponent().div_euclid(s);
    let ab = a.times(b);
    let factor = summand(a, b, n);
    let mut a2 = a.times(ab.pow(n));
    let mut b2 = b.times(ab.pow(-n));
    if a2.exponent() > b2.exponent() || (a2.exponent() == b2.exponent() && b2.is_negative() && !a2.is_negative()) {
        std::mem::swap(&mut a2, &mut b2);
    }
    NormalizedTheta {
        factor,
        a: a2,
        b: b2,
        vanishes: a2 == MonomialArg::MINUS_ONE,
    }
}

/// Splits `f(a, b)` along the residues of the summation index modulo `k`:
/// `f(a,b) = Σ_{r<k} a^{r(r+1)/2} b^{r(r-1)/2} f(a_r, b_r)`.
///
/// Returned triples are `(factor, a_r, b_r)` in residue order.
pub fn dissect_theta(a: MonomialArg, b: MonomialArg, k: i64) -> Vec<(MonomialArg, MonomialArg, MonomialArg)> {
    assert!(k >= 1, "dissection modulus must be positive");
    let big = k * (k + 1) / 2;
    let small = k * (k - 1) / 2;
    (0..k)
        .map(|r| {
            let factor = summand(a, b, r);
            let ar = a.pow(big + k * r).times(b.pow(small + k * r));
            let br = a.pow(small - k * r).times(b.pow(big - k * r));
            (factor, ar, br)
        })
        .collect()
}
