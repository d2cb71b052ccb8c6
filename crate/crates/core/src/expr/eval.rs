//! Evaluation of expression trees to truncated q-series.

use num_traits::{One, Signed};

use super::theta::{pochhammer, theta_product, theta_series};
use super::{MonomialArg, ThetaExpr};
use crate::error::{Error, Result};
use crate::series::QSeries;

/// How the classical theta functions are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Route {
    /// Bilateral theta sums (χ has no sum form and always uses its product).
    #[default]
    Sum,
    /// Truncated infinite products.
    Product,
}

/// `e` as a series truncated at `order`, via theta sums.
pub fn eval(e: &ThetaExpr, order: i64) -> Result<QSeries> {
    eval_with(e, order, Route::Sum)
}

pub fn eval_with(e: &ThetaExpr, order: i64, route: Route) -> Result<QSeries> {
    if order < 1 {
        return Err(Error::Precondition(format!("evaluation order must be at least 1, got {order}")));
    }
    Ok(eval_at(e, order, route)?.truncate(order))
}

fn one_arg(m: MonomialArg) -> Result<()> {
    if m.exponent() < 1 {
        return Err(Error::DivergentTheta {
            a: m.to_string(),
            b: m.to_string(),
        });
    }
    Ok(())
}

/// Lowest exponent where `s` may be nonzero.
fn valuation(s: &QSeries) -> i64 {
    s.min_exp().unwrap_or(s.order())
}

fn theta(a: MonomialArg, b: MonomialArg, n: i64, route: Route) -> Result<QSeries> {
    match route {
        Route::Sum => theta_series(a, b, n),
        Route::Product => theta_product(a, b, n),
    }
}

/// `f(m) = f(m, -m^2)`; product side `(-m; -m)_∞`.
fn euler(m: MonomialArg, n: i64, route: Route) -> Result<QSeries> {
    one_arg(m)?;
    match route {
        Route::Sum => theta_series(m, m.pow(2).negated(), n),
        Route::Product => Ok(pochhammer(m.negated(), m.negated(), n)),
    }
}

fn quotient(num: QSeries, den: &QSeries) -> Result<QSeries> {
    Ok(&num * &den.invert_unit()?)
}

/// Evaluates to a series whose order is at least `n`.
fn eval_at(e: &ThetaExpr, n: i64, route: Route) -> Result<QSeries> {
    use ThetaExpr::*;
    match e {
        Theta(a, b) => theta(*a, *b, n, route),
        Euler(m) => euler(*m, n, route),
        Phi(m) => {
            one_arg(*m)?;
            match route {
                Route::Sum => theta_series(*m, *m, n),
                Route::Product => {
                    let odd = pochhammer(m.negated(), m.pow(2), n);
                    let even = pochhammer(m.pow(2), m.pow(2), n);
                    Ok(&(&odd * &odd) * &even)
                }
            }
        }
        Psi(m) => {
            one_arg(*m)?;
            match route {
                Route::Sum => theta_series(*m, m.pow(3), n),
                Route::Product => quotient(pochhammer(m.pow(2), m.pow(2), n), &pochhammer(*m, m.pow(2), n)),
            }
        }
        Chi(m) => {
            one_arg(*m)?;
            Ok(pochhammer(m.negated(), m.pow(2), n))
        }
        G(m) | H(m) => {
            one_arg(*m)?;
            let is_g = matches!(e, G(_));
            match route {
                Route::Sum => {
                    let num = if is_g {
                        theta_series(m.pow(2).negated(), m.pow(3).negated(), n)?
                    } else {
                        theta_series(m.negated(), m.pow(4).negated(), n)?
                    };
                    quotient(num, &euler(m.negated(), n, Route::Sum)?)
                }
                Route::Product => {
                    let m5 = m.pow(5);
                    let (i, j) = if is_g { (1, 4) } else { (2, 3) };
                    let den = &pochhammer(m.pow(i), m5, n) * &pochhammer(m.pow(j), m5, n);
                    den.invert_unit()
                }
            }
        }
        Monomial(c, k) => QSeries::from_monomial(c.clone(), *k, n.max(k + 1)),
        Add(a, b) => Ok(&eval_at(a, n, route)? + &eval_at(b, n, route)?),
        Sub(a, b) => Ok(&eval_at(a, n, route)? - &eval_at(b, n, route)?),
        Scale(a, c) => Ok(eval_at(a, n, route)?.scale(c)),
        Mul(a, b) => {
            // product order is min(A.order + val B, B.order + val A)
            let (mut na, mut nb) = (n, n);
            loop {
                let sa = eval_at(a, na, route)?;
                let sb = eval_at(b, nb, route)?;
                let need_a = n - valuation(&sb);
                let need_b = n - valuation(&sa);
                if sa.order() >= need_a && sb.order() >= need_b {
                    return Ok(&sa * &sb);
                }
                na = na.max(need_a);
                nb = nb.max(need_b);
            }
        }
        Div(a, b) => {
            let mut nb = n;
            for _ in 0..8 {
                let sb = eval_at(b, nb, route)?;
                let Some(v) = sb.min_exp() else {
                    nb = 2 * nb.max(1);
                    continue;
                };
                let lead = sb.coeff(v);
                if !lead.abs().is_one() {
                    return Err(Error::NotInvertible(format!(
                        "denominator {b} has leading coefficient {lead}"
                    )));
                }
                let sa = eval_at(a, n + v, route)?;
                let need_b = n + 2 * v - valuation(&sa);
                if sb.order() < need_b {
                    nb = need_b;
                    continue;
                }
                let inv = sb.shift(-v).invert_unit()?;
                return Ok((&sa * &inv).shift(-v));
            }
            Err(Error::NotInvertible(format!("denominator {b} vanishes to order {nb}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::series::eq_to_order;

    fn ints(s: &QSeries, n: i64) -> Vec<i64> {
        s.coefficients(0, n).iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    fn ev(text: &str, n: i64) -> QSeries {
        eval(&parse(text).unwrap(), n).unwrap()
    }

    /// `Π_{k≥0} (1 + s q^{e(2k+1)})` by plain polynomial multiplication.
    fn brute_chi(s: i64, e: i64, n: usize) -> Vec<i64> {
        let mut p = vec![0i64; n];
        p[0] = 1;
        let mut k = e;
        while (k as usize) < n {
            for i in (k as usize..n).rev() {
                p[i] += s * p[i - k as usize];
            }
            k += 2 * e;
        }
        p
    }

    /// `Σ_j q^{j^2 + shift·j} / (q;q)_j` with `(q;q)_j^{-1}` expanded as the
    /// generating function of partitions into parts at most `j`.
    fn brute_rr(shift: i64, n: usize) -> Vec<i64> {
        let mut total = vec![0i64; n];
        for j in 0..=30usize {
            let lead = j * j + shift as usize * j;
            if lead >= n {
                break;
            }
            let mut parts = vec![0i64; n];
            parts[0] = 1;
            for part in 1..=j {
                for i in part..n {
                    parts[i] += parts[i - part];
                }
            }
            for i in 0..n - lead {
                total[i + lead] += parts[i];
            }
        }
        total
    }

    #[test]
    fn chi_is_a_product() {
        assert_eq!(ints(&ev("chi(-q)", 6), 6), vec![1, -1, 0, -1, 1, -1]);
        assert_eq!(ints(&ev("chi(-q)", 60), 60), brute_chi(-1, 1, 60));
        assert_eq!(ints(&ev("chi(q^2)", 60), 60), brute_chi(1, 2, 60));
    }

    #[test]
    fn rogers_ramanujan_small() {
        assert_eq!(ints(&ev("G(q)", 8), 8), vec![1, 1, 1, 1, 2, 2, 3, 3]);
        assert_eq!(ints(&ev("G(q)", 80), 80), brute_rr(0, 80));
        assert_eq!(ints(&ev("H(q)", 80), 80), brute_rr(1, 80));
    }

    #[test]
    fn ramanujan_g_h_relation() {
        let s = ev("G(q^11)*H(q) - q^2*G(q)*H(q^11)", 60);
        assert_eq!(s, QSeries::one(60));
    }

    #[test]
    fn routes_agree() {
        let n = 120;
        for text in [
            "f(-q)", "f(q^2)", "f(-q^3)", "phi(q)", "phi(-q)", "phi(q^3)", "psi(q)", "psi(-q)", "psi(q^5)",
            "G(q)", "H(q)", "G(-q)", "H(-q^2)", "f(1,q)*f(-q^3,-q^3)", "f(-q^-1,-q^7)",
        ] {
            let e = parse(text).unwrap();
            let a = eval_with(&e, n, Route::Sum).unwrap();
            let b = eval_with(&e, n, Route::Product).unwrap();
            assert!(eq_to_order(&a, &b, n).unwrap(), "{text}");
        }
    }

    #[test]
    fn laurent_products_keep_order() {
        let s = ev("q^-3*phi(q)*q^3", 10);
        assert_eq!(s, ev("phi(q)", 10));
        let s = ev("f(-q^-1,-q^7)/q^-1", 20);
        assert_eq!(s.order(), 20);
        assert_eq!(s, ev("-1*f(-q,-q^5)", 20));
    }

    #[test]
    fn division_rules() {
        let s = ev("phi(q)/phi(q)", 30);
        assert_eq!(s, QSeries::one(30));
        assert!(matches!(eval(&parse("phi(q)/(2*phi(q))").unwrap(), 10), Err(Error::NotInvertible(_))));
        assert!(matches!(eval(&parse("phi(q)/f(-1,q)").unwrap(), 10), Err(Error::NotInvertible(_))));
        assert!(matches!(eval(&parse("phi(1)").unwrap(), 10), Err(Error::DivergentTheta { .. })));
        let s = ev("psi(q)/(q*psi(q))", 20);
        assert_eq!(s, ev("q^-1", 20));
    }
}
