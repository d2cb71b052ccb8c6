//! Truncated formal power series in one variable `q` with exact integer
//! coefficients.
//!
//! A [`QSeries`] stores the coefficients of `q^e` for `e` in a finite window
//! and an `order`: everything at exponent `order` and above is unknown. All
//! arithmetic tracks the order so that no result ever claims more precision
//! than its inputs carry. Finite negative exponents (Laurent terms) are
//! allowed.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    /// Exponent of `coeffs[0]`. Meaningless (kept at 0) when `coeffs` is empty.
    start: i64,
    /// Dense coefficients; first and last entries are nonzero.
    coeffs: Vec<BigInt>,
    order: i64,
}

impl QSeries {
    pub fn zero(order: i64) -> Self {
        QSeries {
            start: 0,
            coeffs: Vec::new(),
            order,
        }
    }

    pub fn one(order: i64) -> Self {
        Self::from_dense(0, vec![BigInt::one()], order)
    }

    /// The single term `c·q^e`, known up to `order`.
    pub fn from_monomial(c: impl Into<BigInt>, e: i64, order: i64) -> Result<Self> {
        if order <= e {
            return Err(Error::TruncationWindow { exponent: e, order });
        }
        Ok(Self::from_dense(e, vec![c.into()], order))
    }

    /// Builds a series from dense coefficients starting at `start`; entries
    /// at or beyond `order` are dropped.
    pub fn from_dense(start: i64, mut coeffs: Vec<BigInt>, order: i64) -> Self {
        let keep = (order - start).clamp(0, coeffs.len() as i64) as usize;
        coeffs.truncate(keep);
        let mut s = QSeries {
            start,
            coeffs,
            order,
        };
        s.trim();
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs; repeated
    /// exponents accumulate.
    pub fn from_terms<I, C>(terms: I, order: i64) -> Self
    where
        I: IntoIterator<Item = (i64, C)>,
        C: Into<BigInt>,
    {
        let terms: Vec<(i64, BigInt)> = terms
            .into_iter()
            .filter(|(e, _)| *e < order)
            .map(|(e, c)| (e, c.into()))
            .collect();
        let Some(lo) = terms.iter().map(|(e, _)| *e).min() else {
            return Self::zero(order);
        };
        let mut coeffs = vec![BigInt::zero(); (order - lo) as usize];
        for (e, c) in terms {
            coeffs[(e - lo) as usize] += c;
        }
        Self::from_dense(lo, coeffs, order)
    }

    fn trim(&mut self) {
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead == self.coeffs.len() {
            self.coeffs.clear();
            self.start = 0;
            return;
        }
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.start += lead as i64;
        }
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// Exponent of the lowest nonzero term, `None` for the zero series.
    pub fn min_exp(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.start)
    }

    /// Lowest exponent at which the series may be nonzero: the lowest stored
    /// term, or the order itself when nothing below it is nonzero.
    fn valuation_bound(&self) -> i64 {
        self.min_exp().unwrap_or(self.order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `q^e`. Exponents outside the stored window read as zero;
    /// callers must not ask at or above the order.
    pub fn coeff(&self, e: i64) -> BigInt {
        debug_assert!(e < self.order, "coefficient {e} beyond order {}", self.order);
        let i = e - self.start;
        if i < 0 || i >= self.coeffs.len() as i64 {
            BigInt::zero()
        } else {
            self.coeffs[i as usize].clone()
        }
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.start + i as i64, c))
    }

    /// Dense coefficient list for exponents `from..to`.
    pub fn coefficients(&self, from: i64, to: i64) -> Vec<BigInt> {
        (from..to).map(|e| self.coeff(e)).collect()
    }

    pub fn truncate(&self, order: i64) -> Self {
        Self::from_dense(self.start, self.coeffs.clone(), order.min(self.order))
    }

    /// Multiplication by the exact monomial `q^k`.
    pub fn shift(&self, k: i64) -> Self {
        QSeries {
            start: if self.coeffs.is_empty() { 0 } else { self.start + k },
            coeffs: self.coeffs.clone(),
            order: self.order + k,
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero(self.order);
        }
        QSeries {
            start: self.start,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            order: self.order,
        }
    }

    /// Multiplies in place by the binomial `1 + c·q^e` with `e ≥ 0`.
    pub fn mul_one_plus(&mut self, c: i64, e: i64) {
        assert!(e >= 0, "binomial factor must have nonnegative exponent");
        if self.coeffs.is_empty() || c == 0 {
            return;
        }
        if e == 0 {
            let f = BigInt::from(1 + c);
            *self = self.scale(&f);
            return;
        }
        let e = e as usize;
        let room = (self.order - self.start) as usize;
        let new_len = (self.coeffs.len() + e).min(room);
        self.coeffs.resize(new_len, BigInt::zero());
        let cb = BigInt::from(c);
        for i in (e..new_len).rev() {
            if !self.coeffs[i - e].is_zero() {
                let add = &self.coeffs[i - e] * &cb;
                self.coeffs[i] += add;
            }
        }
        self.trim();
    }

    /// Multiplicative inverse of a unit: constant term ±1 and no negative
    /// exponents.
    pub fn invert_unit(&self) -> Result<Self> {
        if self.coeffs.is_empty() {
            return Err(Error::NotInvertible("zero series".into()));
        }
        if self.start != 0 {
            return Err(Error::NotInvertible(format!(
                "lowest term at q^{} instead of q^0",
                self.start
            )));
        }
        let c0 = &self.coeffs[0];
        if !(c0.is_one() || (-c0).is_one()) {
            return Err(Error::NotInvertible(format!("constant term {c0} is not ±1")));
        }
        let n = self.order.max(0) as usize;
        let mut g: Vec<BigInt> = Vec::with_capacity(n);
        for k in 0..n {
            if k == 0 {
                g.push(c0.clone());
                continue;
            }
            let mut acc = BigInt::zero();
            let top = k.min(self.coeffs.len() - 1);
            for j in 1..=top {
                let fj = &self.coeffs[j];
                if !fj.is_zero() && !g[k - j].is_zero() {
                    acc += fj * &g[k - j];
                }
            }
            // g_k = -c0 * sum, since c0^{-1} = c0
            g.push(-(acc * c0));
        }
        Ok(Self::from_dense(0, g, self.order))
    }

    /// The series `f(q^k)`; the first unknown exponent `n` becomes `k·n`.
    pub fn substitute_power(&self, k: i64) -> Self {
        assert!(k >= 1, "substitution power must be positive");
        let order = k * self.order;
        Self::from_terms(self.terms().map(|(e, c)| (k * e, c.clone())), order)
    }

    /// Inverse of [`substitute_power`](Self::substitute_power): every stored
    /// exponent must be a multiple of `k`.
    pub fn extract_power(&self, k: i64) -> Result<Self> {
        assert!(k >= 1, "extraction power must be positive");
        if let Some((e, _)) = self.terms().find(|(e, _)| e.rem_euclid(k) != 0) {
            return Err(Error::Misaligned { exponent: e, k });
        }
        // exponents < order map to exponents < ceil(order / k)
        let order = div_ceil(self.order, k);
        Ok(Self::from_terms(
            self.terms().map(|(e, c)| (e / k, c.clone())),
            order,
        ))
    }

    fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }
}

fn div_ceil(a: i64, b: i64) -> i64 {
    -((-a).div_euclid(b))
}

/// True iff `f` and `g` agree at every exponent below `n`.
pub fn eq_to_order(f: &QSeries, g: &QSeries, n: i64) -> Result<bool> {
    Ok(first_mismatch(f, g, n)?.is_none())
}

/// Smallest exponent below `n` where `f` and `g` differ.
pub fn first_mismatch(f: &QSeries, g: &QSeries, n: i64) -> Result<Option<i64>> {
    let available = f.order.min(g.order);
    if n > available {
        return Err(Error::InsufficientPrecision {
            requested: n,
            available,
        });
    }
    let lo = match (f.min_exp(), g.min_exp()) {
        (None, None) => return Ok(None),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.min(b),
    };
    Ok((lo..n).find(|&e| f.coeff(e) != g.coeff(e)))
}

fn add_impl(f: &QSeries, g: &QSeries, negate_g: bool) -> QSeries {
    let order = f.order.min(g.order);
    let lo = match (f.min_exp(), g.min_exp()) {
        (None, None) => return QSeries::zero(order),
        (Some(a), None) | (None, Some(a)) => a,
        (Some(a), Some(b)) => a.min(b),
    };
    if lo >= order {
        return QSeries::zero(order);
    }
    let mut out = vec![BigInt::zero(); (order - lo) as usize];
    for (e, c) in f.terms() {
        if e < order {
            out[(e - lo) as usize] += c;
        }
    }
    for (e, c) in g.terms() {
        if e < order {
            if negate_g {
                out[(e - lo) as usize] -= c;
            } else {
                out[(e - lo) as usize] += c;
            }
        }
    }
    QSeries::from_dense(lo, out, order)
}

fn mul_impl(f: &QSeries, g: &QSeries) -> QSeries {
    let order = (f.order + g.valuation_bound()).min(g.order + f.valuation_bound());
    if f.is_zero() || g.is_zero() {
        return QSeries::zero(order);
    }
    let start = f.start + g.start;
    if start >= order {
        return QSeries::zero(order);
    }
    let len = (order - start) as usize;
    let shorter = f.coeffs.len().min(g.coeffs.len()) as u64;
    let bound_bits = f.max_bits() + g.max_bits() + 64 - shorter.leading_zeros() as u64;
    if bound_bits < 126 {
        let a: Vec<i128> = f.coeffs.iter().map(|c| c.to_i128().unwrap()).collect();
        let b: Vec<i128> = g.coeffs.iter().map(|c| c.to_i128().unwrap()).collect();
        let mut out = vec![0i128; len];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 || i >= len {
                continue;
            }
            let top = (len - i).min(b.len());
            for (j, &y) in b[..top].iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return QSeries::from_dense(start, out.into_iter().map(BigInt::from).collect(), order);
    }
    let mut out = vec![BigInt::zero(); len];
    for (i, x) in f.coeffs.iter().enumerate() {
        if x.is_zero() || i >= len {
            continue;
        }
        let top = (len - i).min(g.coeffs.len());
        for (j, y) in g.coeffs[..top].iter().enumerate() {
            if !y.is_zero() {
                out[i + j] += x * y;
            }
        }
    }
    QSeries::from_dense(start, out, order)
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        add_impl(self, rhs, false)
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        add_impl(self, rhs, true)
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        mul_impl(self, rhs)
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries {
            start: self.start,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
            order: self.order,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QSeries {
            type Output = QSeries;
            fn $m(self, rhs: QSeries) -> QSeries {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        -&self
    }
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            match (e, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "q")?,
                (1, false) => write!(f, "{mag}*q")?,
                (_, true) => write!(f, "q^{e}")?,
                (_, false) => write!(f, "{mag}*q^{e}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(q^{})", self.order)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(terms: &[(i64, i64)], order: i64) -> QSeries {
        QSeries::from_terms(terms.iter().copied(), order)
    }

    #[test]
    fn monomials() {
        assert_eq!(QSeries::from_monomial(1, 0, 10).unwrap(), QSeries::one(10));
        let m = QSeries::from_monomial(-1, 2, 10).unwrap();
        assert_eq!(m.coeff(2), BigInt::from(-1));
        assert_eq!(m.min_exp(), Some(2));
        let m = QSeries::from_monomial(4, 1, 3).unwrap();
        assert_eq!(m, s(&[(1, 4)], 3));
        assert!(QSeries::from_monomial(0, 1, 3).unwrap().is_zero());
        assert_eq!(
            QSeries::from_monomial(1, 5, 5),
            Err(Error::TruncationWindow { exponent: 5, order: 5 })
        );
    }

    #[test]
    fn ring_examples() {
        let a = s(&[(0, 1), (1, 1)], 10);
        let b = s(&[(0, -1)], 10);
        assert_eq!(&a + &b, s(&[(1, 1)], 10));

        let f = s(&[(0, 1), (1, -1)], 4);
        let g = s(&[(0, 1), (1, 1), (2, 1), (3, 1)], 4);
        assert_eq!(&f * &g, QSeries::one(4));

        let inv = s(&[(-1, 1)], 10);
        let q = s(&[(1, 1)], 10);
        let p = &inv * &q;
        assert_eq!(p.min_exp(), Some(0));
        assert_eq!(p.coefficients(0, p.order()), {
            let mut v = vec![BigInt::zero(); p.order() as usize];
            v[0] = BigInt::one();
            v
        });
    }

    #[test]
    fn mul_tightens_order() {
        let f = s(&[(2, 1)], 10);
        let g = s(&[(0, 1), (1, 1)], 6);
        // f is known to q^10, g only to q^6; q^2·g is known to q^8
        assert_eq!((&f * &g).order(), 8);
        let z = QSeries::zero(7);
        assert_eq!((&z * &g).order(), 7.min(6 + 7));
    }

    #[test]
    fn inversion() {
        let f = s(&[(0, 1), (1, -1)], 8);
        let g = f.invert_unit().unwrap();
        assert_eq!(g, s(&(0..8).map(|e| (e, 1)).collect::<Vec<_>>(), 8));
        let f = s(&[(0, -1), (1, 1)], 8);
        let g = f.invert_unit().unwrap();
        assert_eq!(g, s(&(0..8).map(|e| (e, -1)).collect::<Vec<_>>(), 8));
        assert!(matches!(
            s(&[(0, 2), (1, 1)], 8).invert_unit(),
            Err(Error::NotInvertible(_))
        ));
        assert!(s(&[(1, 1)], 8).invert_unit().is_err());
    }

    #[test]
    fn euler_inverse_is_partition_numbers() {
        // (q;q)_inf = prod (1 - q^k), inverted gives p(n)
        let mut f = QSeries::one(8);
        for k in 1..8 {
            f.mul_one_plus(-1, k);
        }
        let p = f.invert_unit().unwrap();
        let expected = partitions_brute_force(8);
        for (n, want) in expected.iter().enumerate() {
            assert_eq!(p.coeff(n as i64), BigInt::from(*want));
        }
        assert_eq!(expected, vec![1, 1, 2, 3, 5, 7, 11, 15]);
    }

    fn partitions_brute_force(n: usize) -> Vec<u64> {
        // count nonincreasing sequences summing to m
        fn count(m: usize, max: usize) -> u64 {
            if m == 0 {
                return 1;
            }
            (1..=max.min(m)).map(|p| count(m - p, p)).sum()
        }
        (0..n).map(|m| count(m, m)).collect()
    }

    #[test]
    fn power_substitution() {
        let f = s(&[(0, 1), (1, 1)], 10);
        let g = f.substitute_power(3);
        assert_eq!(g, s(&[(0, 1), (3, 1)], 30));
        let g = s(&[(-1, 1)], 5).substitute_power(2);
        assert_eq!(g.min_exp(), Some(-2));

        let f = s(&[(0, 1), (2, 2), (8, 2)], 10);
        assert_eq!(f.extract_power(2).unwrap(), s(&[(0, 1), (1, 2), (4, 2)], 5));
        assert_eq!(s(&[(6, 1)], 10).extract_power(3).unwrap(), s(&[(2, 1)], 4));
        assert_eq!(
            s(&[(0, 1), (3, 1), (5, 1)], 10).extract_power(3),
            Err(Error::Misaligned { exponent: 5, k: 3 })
        );
    }

    #[test]
    fn comparison() {
        let a = s(&[(0, 1), (1, 1)], 10);
        let b = s(&[(0, 1), (1, 1), (5, 1)], 10);
        assert!(eq_to_order(&a, &b, 5).unwrap());
        assert!(!eq_to_order(&a, &b, 6).unwrap());
        assert_eq!(first_mismatch(&a, &b, 10).unwrap(), Some(5));
        assert!(matches!(
            eq_to_order(&a, &a, 20),
            Err(Error::InsufficientPrecision { requested: 20, available: 10 })
        ));
    }

    #[test]
    fn binomial_product_truncates() {
        let mut f = QSeries::one(5);
        f.mul_one_plus(1, 3);
        f.mul_one_plus(1, 3);
        assert_eq!(f, s(&[(0, 1), (3, 2)], 5));
    }

    #[test]
    fn display() {
        let f = s(&[(0, 1), (1, -2), (3, 1)], 5);
        assert_eq!(f.to_string(), "1 - 2*q + q^3 + O(q^5)");
        assert_eq!(QSeries::zero(3).to_string(), "0 + O(q^3)");
    }
}
