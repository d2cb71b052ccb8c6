//! Extended quadratic forms and their lattice sums, binary-form reduction
//! and enumeration, representation search, and congruence diagonalization.
//!
//! Forms are stored doubled so that half-integral coefficients stay exact:
//! the exponent at `X` is `(XᵀG₂X + d₂·X)/2 + c` with `G₂` symmetric and
//! `d₂ᵢ ≡ G₂ᵢᵢ (mod 2)`. The sign character is a second form of the same
//! shape taken mod 2, `(XᵀS₂X + s₂·X)/2`, which covers both the plain
//! `(-1)^{δ·X}` and the triangular-number signs that theta products with
//! mixed-sign arguments produce.

use std::fmt;
use std::str::FromStr;

use num_integer::{Integer, Roots};

use crate::ecs::IntMatrix;
use crate::error::{Error, Result};
use crate::series::QSeries;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtendedQuadForm {
    g2: IntMatrix,
    d2: Vec<i64>,
    c: i64,
    s2: IntMatrix,
    t2: Vec<i64>,
}

fn check_parity(m: &IntMatrix, v: &[i64], what: &str) -> Result<()> {
    let n = m.n();
    if v.len() != n {
        return Err(Error::Dimension(format!("{what}: vector length {} for dimension {n}", v.len())));
    }
    for i in 0..n {
        for j in 0..n {
            if m.get(i, j) != m.get(j, i) {
                return Err(Error::Format(format!("{what}: matrix is not symmetric")));
            }
        }
        if (m.get(i, i) - v[i]).rem_euclid(2) != 0 {
            return Err(Error::Format(format!(
                "{what}: coordinate {} mixes integral and half-integral parts",
                i + 1
            )));
        }
    }
    Ok(())
}

impl ExtendedQuadForm {
    /// Builds a form from its doubled parts. `s2`/`t2` define the sign
    /// character `(XᵀS₂X + t₂·X)/2 mod 2`.
    pub fn new(g2: IntMatrix, d2: Vec<i64>, c: i64, s2: IntMatrix, t2: Vec<i64>) -> Result<Self> {
        if s2.n() != g2.n() {
            return Err(Error::Dimension("sign matrix dimension differs from form".into()));
        }
        check_parity(&g2, &d2, "form")?;
        check_parity(&s2, &t2, "sign character")?;
        let (s2, t2) = canonical_character(&s2, &t2);
        Ok(ExtendedQuadForm { g2, d2, c, s2, t2 })
    }

    /// Integer form `Σ_{i≤j} quad_ij x_i x_j + lin·x + c` with character
    /// `(-1)^{δ·x}`; `quad` lists upper-triangular coefficients row by row.
    pub fn from_coefficients(quad: &[i64], lin: &[i64], c: i64, delta: &[i64]) -> Result<Self> {
        let n = lin.len();
        let g2 = upper_to_doubled(quad, n, true)?;
        let d2 = lin.iter().map(|x| 2 * x).collect();
        let t2 = delta.iter().map(|x| 2 * x.rem_euclid(2)).collect();
        Self::new(g2, d2, c, IntMatrix::scalar(n, 0), t2)
    }

    pub fn n(&self) -> usize {
        self.g2.n()
    }

    /// Doubled Gram matrix `G₂`: twice the square coefficients on the
    /// diagonal, cross coefficients off it.
    pub fn g2(&self) -> &IntMatrix {
        &self.g2
    }

    /// Doubled linear part `d₂`.
    pub fn d2(&self) -> &[i64] {
        &self.d2
    }

    pub fn constant(&self) -> i64 {
        self.c
    }

    pub fn sign_matrix(&self) -> &IntMatrix {
        &self.s2
    }

    pub fn sign_linear(&self) -> &[i64] {
        &self.t2
    }

    /// The plain character vector `δ` when the sign is `(-1)^{δ·X}`.
    pub fn delta(&self) -> Option<Vec<i64>> {
        // canonical characters are plain exactly when the sign matrix is zero
        let n = self.n();
        let plain = (0..n).all(|i| (0..n).all(|j| self.s2.get(i, j) == 0));
        plain.then(|| self.t2.iter().map(|t| t / 2).collect())
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..n).all(|j| i == j || self.g2.get(i, j) == 0))
    }

    /// Exponent `(XᵀG₂X + d₂·X)/2 + c`.
    pub fn value(&self, x: &[i64]) -> i64 {
        half_form(&self.g2, &self.d2, x) + self.c
    }

    /// `0` or `1`: the exponent of `-1` in the character at `X`.
    pub fn character(&self, x: &[i64]) -> i64 {
        half_form(&self.s2, &self.t2, x).rem_euclid(2)
    }

    /// `(sign, exponent)` of the summand at `X`.
    pub fn eval_form(&self, x: &[i64]) -> (i64, i64) {
        let sign = if self.character(x) == 0 { 1 } else { -1 };
        (sign, self.value(x))
    }

    /// Leading principal minors of the Gram matrix are all positive.
    pub fn is_positive_definite(&self) -> bool {
        is_positive_definite(&self.g2)
    }

    /// Lattice sum `Σ_X sign(X) q^{value(X)}` truncated at `order`.
    pub fn direct_series(&self, order: i64) -> Result<QSeries> {
        if !self.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let n = self.n();
        let inv = inverse_f64(&self.g2);
        // value = (X - X0)ᵀ A (X - X0) + m with A = G₂/2, X0 = -G₂⁻¹ d₂ / 2
        let x0: Vec<f64> = (0..n)
            .map(|i| -(0..n).map(|j| inv[i][j] * self.d2[j] as f64).sum::<f64>() / 2.0)
            .collect();
        let quad0: f64 = (0..n)
            .map(|i| (0..n).map(|j| x0[i] * self.g2.get(i, j) as f64 * x0[j]).sum::<f64>())
            .sum::<f64>()
            / 2.0;
        let lin0: f64 = (0..n).map(|i| self.d2[i] as f64 * x0[i]).sum::<f64>() / 2.0;
        let min_value = quad0 + lin0 + self.c as f64;
        let radius = (order as f64 - min_value).max(0.0);
        // |xᵢ - x0ᵢ|² ≤ radius · (A⁻¹)ᵢᵢ = radius · 2 (G₂⁻¹)ᵢᵢ
        let bounds: Vec<(i64, i64)> = (0..n)
            .map(|i| {
                let r = (radius * 2.0 * inv[i][i]).max(0.0).sqrt();
                ((x0[i] - r).floor() as i64 - 2, (x0[i] + r).ceil() as i64 + 2)
            })
            .collect();
        let mut terms = Vec::new();
        for_each_in_box(&bounds, |x| {
            let v = self.value(x);
            if v < order {
                let (s, _) = self.eval_form(x);
                terms.push((v, s));
            }
        });
        Ok(QSeries::from_terms(terms, order))
    }

    /// Pretty form in the CLI/corpus syntax.
    fn fmt_parts(&self) -> String {
        let n = self.n();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in i..n {
                quad.push(if i == j { fmt_half(self.g2.get(i, i)) } else { self.g2.get(i, j).to_string() });
            }
        }
        let lin: Vec<String> = self.d2.iter().map(|&x| fmt_half(x)).collect();
        let mut out = format!("quad: {} | lin: {} | const: {}", quad.join(","), lin.join(","), self.c);
        match self.delta() {
            Some(delta) => {
                let d: Vec<String> = delta.iter().map(i64::to_string).collect();
                out.push_str(&format!(" | delta: {}", d.join(",")));
            }
            None => {
                let mut sq = Vec::new();
                for i in 0..n {
                    for j in i..n {
                        sq.push(if i == j { fmt_half(self.s2.get(i, i)) } else { self.s2.get(i, j).to_string() });
                    }
                }
                let t: Vec<String> = self.t2.iter().map(|&x| fmt_half(x)).collect();
                out.push_str(&format!(" | signquad: {} | delta: {}", sq.join(","), t.join(",")));
            }
        }
        out
    }
}

/// Reduces a character to a canonical representative of the same function
/// mod 2: off-diagonal entries in `{0,1}`, diagonal in `{0,1}`, linear part
/// in `[0,4)`. Shifts by `(4,0)`, `(0,4)`, `(2,2)` on a diagonal/linear pair
/// and by 2 off the diagonal change the value by an even amount.
fn canonical_character(s2: &IntMatrix, t2: &[i64]) -> (IntMatrix, Vec<i64>) {
    let n = s2.n();
    let mut rows = s2.rows();
    let mut t = t2.to_vec();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                rows[i][j] = rows[i][j].rem_euclid(2);
            }
        }
        let mut g = rows[i][i].rem_euclid(4);
        if g >= 2 {
            g -= 2;
            t[i] -= 2;
        }
        rows[i][i] = g;
        t[i] = t[i].rem_euclid(4);
    }
    (IntMatrix::from_rows(rows).expect("square"), t)
}

fn half_form(m: &IntMatrix, v: &[i64], x: &[i64]) -> i64 {
    let n = m.n();
    let mut s: i128 = 0;
    for i in 0..n {
        for j in 0..n {
            s += m.get(i, j) as i128 * x[i] as i128 * x[j] as i128;
        }
        s += v[i] as i128 * x[i] as i128;
    }
    debug_assert!(s % 2 == 0);
    i64::try_from(s / 2).expect("form value overflows i64")
}

fn fmt_half(doubled: i64) -> String {
    if doubled % 2 == 0 {
        (doubled / 2).to_string()
    } else {
        format!("{doubled}/2")
    }
}

/// Parses `k` or `k/2` into its doubled integer value.
fn parse_half(t: &str) -> Result<i64> {
    let t = t.trim();
    let bad = || Error::Format(format!("bad coefficient {t:?}"));
    match t.split_once('/') {
        Some((num, "2")) => num.trim().parse::<i64>().map_err(|_| bad()),
        Some(_) => Err(bad()),
        None => t.parse::<i64>().map(|x| 2 * x).map_err(|_| bad()),
    }
}

fn parse_half_list(s: &str) -> Result<Vec<i64>> {
    s.split(',').map(parse_half).collect()
}

/// Upper-triangular coefficient list (row by row) to a doubled Gram matrix.
/// `integral` entries are plain integers; otherwise they are already
/// doubled for the diagonal.
fn upper_to_doubled(coeffs: &[i64], n: usize, integral: bool) -> Result<IntMatrix> {
    if coeffs.len() != n * (n + 1) / 2 {
        return Err(Error::Dimension(format!(
            "{} quadratic coefficients do not fit dimension {n}",
            coeffs.len()
        )));
    }
    let mut rows = vec![vec![0; n]; n];
    let mut it = coeffs.iter();
    for i in 0..n {
        for j in i..n {
            let &x = it.next().expect("length checked");
            if i == j {
                rows[i][i] = if integral { 2 * x } else { x };
            } else {
                rows[i][j] = x;
                rows[j][i] = x;
            }
        }
    }
    IntMatrix::from_rows(rows)
}

fn dimension_of_upper(len: usize) -> Result<usize> {
    (1..=16)
        .find(|n| n * (n + 1) / 2 == len)
        .ok_or_else(|| Error::Dimension(format!("{len} is not a triangular number of coefficients")))
}

impl FromStr for ExtendedQuadForm {
    type Err = Error;

    /// `quad: 3,2,4 | lin: 1,4 | const: 0 | delta: 1,0`. `gram:` may replace
    /// `quad:` with rows of the rational Gram matrix; coefficients may be
    /// written `k/2`; `signquad:` adds a quadratic part to the character.
    fn from_str(s: &str) -> Result<Self> {
        let mut quad = None;
        let mut gram = None;
        let mut lin = None;
        let mut c = 0i64;
        let mut delta = None;
        let mut signquad = None;
        for field in s.split('|') {
            let (key, val) = field
                .split_once(':')
                .ok_or_else(|| Error::Format(format!("expected key: value in {field:?}")))?;
            let val = val.trim();
            match key.trim() {
                "quad" => {
                    // cross coefficients are whole; diagonal may be half
                    let raw: Vec<&str> = val.split(',').collect();
                    let n = dimension_of_upper(raw.len())?;
                    let mut coeffs = Vec::new();
                    let mut it = raw.iter();
                    for i in 0..n {
                        for j in i..n {
                            let t = it.next().expect("length checked");
                            if i == j {
                                coeffs.push(parse_half(t)?);
                            } else {
                                let d = parse_half(t)?;
                                if d % 2 != 0 {
                                    return Err(Error::Format(format!("cross coefficient {t:?} must be an integer")));
                                }
                                coeffs.push(d / 2);
                            }
                        }
                    }
                    quad = Some(upper_to_doubled(&coeffs, n, false)?);
                }
                "gram" => {
                    let rows = val
                        .split(';')
                        .map(|r| parse_half_list(r))
                        .collect::<Result<Vec<_>>>()?;
                    gram = Some(IntMatrix::from_rows(rows)?);
                }
                "lin" => lin = Some(parse_half_list(val)?),
                "const" => {
                    c = val.parse().map_err(|_| Error::Format(format!("bad constant {val:?}")))?;
                }
                "delta" => delta = Some(parse_half_list(val)?),
                "signquad" => {
                    let raw: Vec<&str> = val.split(',').collect();
                    let n = dimension_of_upper(raw.len())?;
                    let mut coeffs = Vec::new();
                    let mut it = raw.iter();
                    for i in 0..n {
                        for j in i..n {
                            let d = parse_half(it.next().expect("length checked"))?;
                            coeffs.push(if i == j { d } else { d / 2 });
                        }
                    }
                    signquad = Some(upper_to_doubled(&coeffs, n, false)?);
                }
                other => return Err(Error::Format(format!("unknown form field {other:?}"))),
            }
        }
        let g2 = match (quad, gram) {
            (Some(q), None) => q,
            (None, Some(g)) => g,
            _ => return Err(Error::Format("form needs exactly one of quad: or gram:".into())),
        };
        let n = g2.n();
        let d2 = lin.unwrap_or_else(|| vec![0; n]);
        // delta entries are read as doubled values; whole δᵢ ∈ {0,1}
        let t2 = delta.unwrap_or_else(|| vec![0; n]);
        let s2 = signquad.unwrap_or_else(|| IntMatrix::scalar(n, 0));
        Self::new(g2, d2, c, s2, t2)
    }
}

impl fmt::Display for ExtendedQuadForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fmt_parts())
    }
}

pub fn is_positive_definite(g2: &IntMatrix) -> bool {
    let n = g2.n();
    (1..=n).all(|k| {
        let rows = (0..k).map(|i| (0..k).map(|j| g2.get(i, j)).collect()).collect();
        IntMatrix::from_rows(rows).expect("square").det() > 0
    })
}

/// Floating-point inverse by Gauss-Jordan; used only to size search boxes.
fn inverse_f64(m: &IntMatrix) -> Vec<Vec<f64>> {
    let n = m.n();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut row: Vec<f64> = (0..n).map(|j| m.get(i, j) as f64).collect();
            row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .expect("nonempty");
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for k in 0..2 * n {
                        a[r][k] -= f * a[col][k];
                    }
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn for_each_in_box(bounds: &[(i64, i64)], mut f: impl FnMut(&[i64])) {
    let n = bounds.len();
    if bounds.iter().any(|(lo, hi)| lo > hi) {
        return;
    }
    let mut x: Vec<i64> = bounds.iter().map(|b| b.0).collect();
    loop {
        f(&x);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            x[i] += 1;
            if x[i] <= bounds[i].1 {
                break;
            }
            x[i] = bounds[i].0;
            i += 1;
        }
    }
}

/// `a·x² + two_b·xy + c·y²` with `two_b` even; determinant `ac - b²`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinaryForm {
    pub a: i64,
    pub two_b: i64,
    pub c: i64,
}

impl BinaryForm {
    pub fn new(a: i64, two_b: i64, c: i64) -> Self {
        assert!(two_b % 2 == 0, "middle coefficient must be even");
        BinaryForm { a, two_b, c }
    }

    pub fn b(&self) -> i64 {
        self.two_b / 2
    }

    pub fn determinant(&self) -> i64 {
        self.a * self.c - self.b() * self.b()
    }

    pub fn is_positive_definite(&self) -> bool {
        self.a > 0 && self.determinant() > 0
    }

    pub fn value(&self, x: i64, y: i64) -> i64 {
        self.a * x * x + self.two_b * x * y + self.c * y * y
    }

    pub fn is_reduced(&self) -> bool {
        self.two_b.abs() <= self.a && self.a <= self.c
    }

    pub fn is_primitive(&self) -> bool {
        self.a.gcd(&self.two_b).gcd(&self.c) == 1
    }

    /// Gram matrix `[[a, b], [b, c]]`.
    pub fn gram(&self) -> IntMatrix {
        IntMatrix::from_rows(vec![vec![self.a, self.b()], vec![self.b(), self.c]]).expect("2x2")
    }

    pub fn to_form(&self) -> ExtendedQuadForm {
        ExtendedQuadForm::from_coefficients(&[self.a, self.two_b, self.c], &[0, 0], 0, &[0, 0]).expect("binary form")
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.two_b, self.c)
    }
}

/// Gauss reduction: a reduced form and `U` with `Uᵀ·Gram(f)·U = Gram(reduced)`.
pub fn reduce_binary(f: BinaryForm) -> (BinaryForm, IntMatrix) {
    assert!(f.is_positive_definite(), "reduction needs a positive definite form");
    let (mut a, mut b, mut c) = (f.a, f.b(), f.c);
    let mut u = [[1i64, 0], [0, 1]];
    loop {
        if 2 * b.abs() > a {
            // x ↦ x + t y brings b into [-a/2, a/2)
            let t = -Integer::div_floor(&(2 * b + a), &(2 * a));
            c += a * t * t + 2 * b * t;
            b += a * t;
            u = [[u[0][0], u[0][0] * t + u[0][1]], [u[1][0], u[1][0] * t + u[1][1]]];
            continue;
        }
        if a > c {
            // (x, y) ↦ (-y, x)
            std::mem::swap(&mut a, &mut c);
            b = -b;
            u = [[u[0][1], -u[0][0]], [u[1][1], -u[1][0]]];
            continue;
        }
        break;
    }
    let reduced = BinaryForm::new(a, 2 * b, c);
    (reduced, IntMatrix::from_rows(vec![u[0].to_vec(), u[1].to_vec()]).expect("2x2"))
}

/// Reduced primitive positive definite forms of determinant `d`, sorted.
pub fn enumerate_reduced_primitive(d: i64) -> Vec<BinaryForm> {
    assert!(d >= 1, "determinant must be positive");
    let mut out = Vec::new();
    // a² ≤ ac = d + b² ≤ d + a²/4
    let a_max = (4 * d / 3).sqrt();
    for a in 1..=a_max {
        for two_b in (-a..=a).filter(|t| t % 2 == 0) {
            let b = two_b / 2;
            if (d + b * b) % a != 0 {
                continue;
            }
            let f = BinaryForm::new(a, two_b, (d + b * b) / a);
            if f.is_reduced() && f.is_primitive() {
                out.push(f);
            }
        }
    }
    out.sort();
    out
}

/// All `(x, y)` with `f(x, y) = m`, sorted.
pub fn represent(f: BinaryForm, m: i64) -> Vec<(i64, i64)> {
    assert!(f.is_positive_definite(), "representation needs a positive definite form");
    if m < 0 {
        return Vec::new();
    }
    let (a, b, d) = (f.a, f.b(), f.determinant());
    // a·f = (ax + by)² + d y²
    let y_max = (a * m / d).sqrt();
    let mut out = Vec::new();
    for y in -y_max..=y_max {
        let rest = a * m - d * y * y;
        if rest < 0 {
            continue;
        }
        let r = rest.sqrt();
        if r * r != rest {
            continue;
        }
        for s in [r, -r] {
            let num = -b * y + s;
            if num % a == 0 {
                out.push((num / a, y));
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

/// All `v` with `vᵀ·G₂·v = 2t` and `|vᵢ| ≤ bound`.
fn vectors_of_norm(g2: &IntMatrix, t: i64, bound: Option<i64>) -> Vec<Vec<i64>> {
    let n = g2.n();
    let inv = inverse_f64(g2);
    // vᵀAv = t with A = G₂/2 gives vᵢ² ≤ t·(A⁻¹)ᵢᵢ = 2t·(G₂⁻¹)ᵢᵢ
    let bounds: Vec<(i64, i64)> = (0..n)
        .map(|i| {
            let r = ((2.0 * t as f64 * inv[i][i]).max(0.0).sqrt() + 1e-6).floor() as i64 + 1;
            let r = bound.map_or(r, |b| b.min(r));
            (-r, r)
        })
        .collect();
    let zero = vec![0; n];
    let mut out = Vec::new();
    for_each_in_box(&bounds, |v| {
        if half_form(g2, &zero, v) == t {
            out.push(v.to_vec());
        }
    });
    out
}

fn bilinear(g2: &IntMatrix, u: &[i64], v: &[i64]) -> i64 {
    let n = g2.n();
    (0..n).map(|i| (0..n).map(|j| u[i] * g2.get(i, j) * v[j]).sum::<i64>()).sum()
}

/// Integer `B` with `Bᵀ·G·B = diag(target)`, where `g2 = 2G`.
///
/// Columns are unique up to sign, so each is normalized to a positive first
/// nonzero entry; a negative determinant is then fixed by negating the last
/// column. `entry_bound` caps `|B_ij|`; without it the search is complete.
pub fn find_congruence_matrices(g2: &IntMatrix, target: &[i64], entry_bound: Option<i64>) -> Result<Vec<IntMatrix>> {
    let n = g2.n();
    if target.len() != n {
        return Err(Error::Dimension(format!("{} targets for dimension {n}", target.len())));
    }
    if !is_positive_definite(g2) {
        return Err(Error::NotPositiveDefinite);
    }
    if let Some(t) = target.iter().find(|&&t| t <= 0) {
        return Err(Error::Precondition(format!("target {t} must be positive")));
    }
    let candidates: Vec<Vec<Vec<i64>>> = target
        .iter()
        .map(|&t| {
            vectors_of_norm(g2, t, entry_bound)
                .into_iter()
                .filter(|v| v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut chosen: Vec<Vec<i64>> = Vec::new();
    assemble(g2, &candidates, &mut chosen, &mut out);
    let mut result: Vec<IntMatrix> = out
        .into_iter()
        .map(|mut cols| {
            let b = IntMatrix::from_columns(&cols).expect("square");
            if b.det() < 0 {
                let last = cols.last_mut().expect("nonempty");
                last.iter_mut().for_each(|x| *x = -*x);
            }
            IntMatrix::from_columns(&cols).expect("square")
        })
        .collect();
    result.sort();
    result.dedup();
    Ok(result)
}

fn assemble(g2: &IntMatrix, candidates: &[Vec<Vec<i64>>], chosen: &mut Vec<Vec<i64>>, out: &mut Vec<Vec<Vec<i64>>>) {
    let k = chosen.len();
    if k == candidates.len() {
        out.push(chosen.clone());
        return;
    }
    for v in &candidates[k] {
        if chosen.iter().all(|u| bilinear(g2, u, v) == 0) {
            chosen.push(v.clone());
            assemble(g2, candidates, chosen, out);
            chosen.pop();
        }
    }
}

/// Doubled Gram matrix from rows of a rational Gram matrix (`k` or `k/2`).
pub fn parse_gram(s: &str) -> Result<IntMatrix> {
    let rows = s.split(';').map(parse_half_list).collect::<Result<Vec<_>>>()?;
    IntMatrix::from_rows(rows)
}
