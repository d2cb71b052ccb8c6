//! Theta-function expressions: monomial arguments, the expression tree, its
//! text grammar, and evaluation to [`QSeries`](crate::series::QSeries).

mod eval;
mod parse;
pub mod theta;

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use eval::{eval, eval_with, Route};
pub use theta::{pochhammer, theta_product};
pub use parse::parse;
pub use theta::{dissect_theta, normalize_theta, theta_series, NormalizedTheta};

/// A signed monomial `±q^e`.
///
/// Theta arguments are nonnegative powers in the expression grammar; the
/// theta calculus (shift law, dissections) produces negative powers in
/// intermediate steps, so the exponent is a plain signed integer here.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MonomialArg {
    negative: bool,
    exponent: i64,
}

impl MonomialArg {
    pub const ONE: MonomialArg = MonomialArg {
        negative: false,
        exponent: 0,
    };
    pub const MINUS_ONE: MonomialArg = MonomialArg {
        negative: true,
        exponent: 0,
    };

    pub fn new(sign: i64, exponent: i64) -> Self {
        assert!(sign == 1 || sign == -1, "monomial sign must be ±1");
        MonomialArg {
            negative: sign < 0,
            exponent,
        }
    }

    /// `q^e`
    pub fn q(exponent: i64) -> Self {
        Self::new(1, exponent)
    }

    /// `-q^e`
    pub fn neg_q(exponent: i64) -> Self {
        Self::new(-1, exponent)
    }

    pub fn sign(self) -> i64 {
        if self.negative {
            -1
        } else {
            1
        }
    }

    pub fn is_negative(self) -> bool {
        self.negative
    }

    pub fn exponent(self) -> i64 {
        self.exponent
    }

    /// Literal `±1`.
    pub fn is_unit(self) -> bool {
        self.exponent == 0
    }

    pub fn times(self, other: MonomialArg) -> MonomialArg {
        MonomialArg {
            negative: self.negative ^ other.negative,
            exponent: self.exponent + other.exponent,
        }
    }

    pub fn pow(self, k: i64) -> MonomialArg {
        MonomialArg {
            negative: self.negative && k.rem_euclid(2) == 1,
            exponent: self.exponent * k,
        }
    }

    pub fn recip(self) -> MonomialArg {
        self.pow(-1)
    }

    pub fn negated(self) -> MonomialArg {
        MonomialArg {
            negative: !self.negative,
            exponent: self.exponent,
        }
    }

    /// `q ↦ q^k` applied to the monomial.
    pub fn scaled(self, k: i64) -> MonomialArg {
        MonomialArg {
            negative: self.negative,
            exponent: self.exponent * k,
        }
    }
}

impl fmt::Display for MonomialArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negative {
            write!(f, "-")?;
        }
        match self.exponent {
            0 => write!(f, "1"),
            1 => write!(f, "q"),
            e => write!(f, "q^{e}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ThetaExpr {
    /// Ramanujan's `f(a, b)`.
    Theta(MonomialArg, MonomialArg),
    /// One-argument `f(m) := f(m, -m^2)`, so `f(-q) = (q;q)_inf`.
    Euler(MonomialArg),
    Phi(MonomialArg),
    Psi(MonomialArg),
    Chi(MonomialArg),
    G(MonomialArg),
    H(MonomialArg),
    /// `c·q^e`
    Monomial(BigInt, i64),
    Add(Box<ThetaExpr>, Box<ThetaExpr>),
    Sub(Box<ThetaExpr>, Box<ThetaExpr>),
    Mul(Box<ThetaExpr>, Box<ThetaExpr>),
    Div(Box<ThetaExpr>, Box<ThetaExpr>),
    Scale(Box<ThetaExpr>, BigInt),
}

impl ThetaExpr {
    pub fn theta(a: MonomialArg, b: MonomialArg) -> Self {
        ThetaExpr::Theta(a, b)
    }

    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        ThetaExpr::Monomial(c.into(), e)
    }

    pub fn int(c: impl Into<BigInt>) -> Self {
        ThetaExpr::Monomial(c.into(), 0)
    }

    pub fn add(self, rhs: ThetaExpr) -> Self {
        ThetaExpr::Add(Box::new(self), Box::new(rhs))
    }

    pub fn sub(self, rhs: ThetaExpr) -> Self {
        ThetaExpr::Sub(Box::new(self), Box::new(rhs))
    }

    pub fn mul(self, rhs: ThetaExpr) -> Self {
        ThetaExpr::Mul(Box::new(self), Box::new(rhs))
    }

    pub fn div(self, rhs: ThetaExpr) -> Self {
        ThetaExpr::Div(Box::new(self), Box::new(rhs))
    }

    pub fn scale(self, c: impl Into<BigInt>) -> Self {
        ThetaExpr::Scale(Box::new(self), c.into())
    }

    /// The same expression with `q` replaced by `q^k` throughout.
    pub fn substitute_power(&self, k: i64) -> ThetaExpr {
        use ThetaExpr::*;
        let sub = |e: &ThetaExpr| Box::new(e.substitute_power(k));
        match self {
            Theta(a, b) => Theta(a.scaled(k), b.scaled(k)),
            Euler(m) => Euler(m.scaled(k)),
            Phi(m) => Phi(m.scaled(k)),
            Psi(m) => Psi(m.scaled(k)),
            Chi(m) => Chi(m.scaled(k)),
            G(m) => G(m.scaled(k)),
            H(m) => H(m.scaled(k)),
            Monomial(c, e) => Monomial(c.clone(), e * k),
            Add(a, b) => Add(sub(a), sub(b)),
            Sub(a, b) => Sub(sub(a), sub(b)),
            Mul(a, b) => Mul(sub(a), sub(b)),
            Div(a, b) => Div(sub(a), sub(b)),
            Scale(a, c) => Scale(sub(a), c.clone()),
        }
    }

    fn is_additive(&self) -> bool {
        matches!(self, ThetaExpr::Add(..) | ThetaExpr::Sub(..))
    }

    fn is_multiplicative(&self) -> bool {
        matches!(self, ThetaExpr::Mul(..) | ThetaExpr::Div(..))
    }

    /// Nodes printed as `c*...`, which the parser reads as a scale of the
    /// whole remaining term.
    fn is_scale(&self) -> bool {
        match self {
            ThetaExpr::Scale(..) => true,
            ThetaExpr::Monomial(c, e) => *e != 0 && !c.is_zero() && !(c.is_one() || (-c).is_one()),
            _ => false,
        }
    }
}

fn write_call(f: &mut fmt::Formatter<'_>, name: &str, m: &MonomialArg) -> fmt::Result {
    write!(f, "{name}({m})")
}

/// Prints `e` as a `*`/`/` operand, parenthesizing whatever would otherwise
/// re-associate when parsed back.
fn write_operand(f: &mut fmt::Formatter<'_>, e: &ThetaExpr, right: bool) -> fmt::Result {
    // a leading integer before `*` would read back as a scale
    let int_lead = !right && matches!(e, ThetaExpr::Monomial(_, 0));
    let wrap = e.is_additive() || e.is_scale() || int_lead || (right && e.is_multiplicative());
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for ThetaExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use ThetaExpr::*;
        match self {
            Theta(a, b) => write!(f, "f({a},{b})"),
            Euler(m) => write_call(f, "f", m),
            Phi(m) => write_call(f, "phi", m),
            Psi(m) => write_call(f, "psi", m),
            Chi(m) => write_call(f, "chi", m),
            G(m) => write_call(f, "G", m),
            H(m) => write_call(f, "H", m),
            Monomial(c, e) => {
                if *e == 0 {
                    write!(f, "{c}")
                } else if c.is_one() || (-c).is_one() {
                    if c.is_negative() {
                        write!(f, "-")?;
                    }
                    if *e == 1 {
                        write!(f, "q")
                    } else {
                        write!(f, "q^{e}")
                    }
                } else if c.is_zero() {
                    write!(f, "0")
                } else {
                    // not produced by the parser; printed so that it reads back
                    // as an equal-valued scale
                    write!(f, "{c}*q^{e}")
                }
            }
            Add(a, b) => {
                write!(f, "{a} + ")?;
                if b.is_additive() {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Sub(a, b) => {
                write!(f, "{a} - ")?;
                if b.is_additive() {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
            Mul(a, b) => {
                write_operand(f, a, false)?;
                write!(f, "*")?;
                write_operand(f, b, true)
            }
            Div(a, b) => {
                write_operand(f, a, false)?;
                write!(f, "/")?;
                write_operand(f, b, true)
            }
            Scale(e, c) => {
                write!(f, "{c}*")?;
                if e.is_additive() || e.is_scale() {
                    write!(f, "({e})")
                } else {
                    write!(f, "{e}")
                }
            }
        }
    }
}
