//! Integer matrices and the exact covering systems they induce: `Z^n` split
//! into the lattice `B·Z^n` and its `|det B|` translates.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;

use crate::error::{Error, Result};

/// Square integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn from_rows(rows: Vec<Vec<i64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("matrix must be square and nonempty, got {rows:?}")));
        }
        Ok(IntMatrix {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_columns(cols: &[Vec<i64>]) -> Result<Self> {
        let n = cols.len();
        let rows = (0..n).map(|i| cols.iter().map(|c| c.get(i).copied().unwrap_or(0)).collect()).collect();
        if cols.iter().any(|c| c.len() != n) {
            return Err(Error::Dimension("columns must all have length n".into()));
        }
        Self::from_rows(rows)
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix { n, entries: vec![0; n * n] };
        for i in 0..n {
            m.entries[i * n + i] = 1;
        }
        m
    }

    pub fn scalar(n: usize, c: i64) -> Self {
        let mut m = Self::identity(n);
        m.entries.iter_mut().for_each(|x| *x *= c);
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.n + j]
    }

    fn set(&mut self, i: usize, j: usize, v: i64) {
        self.entries[i * self.n + j] = v;
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.n).map(<[i64]>::to_vec).collect()
    }

    pub fn column(&self, j: usize) -> Vec<i64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, other.n, "dimension mismatch");
        let n = self.n;
        let mut out = IntMatrix { n, entries: vec![0; n * n] };
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, (0..n).map(|k| self.get(i, k) * other.get(k, j)).sum());
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[i64]) -> Vec<i64> {
        assert_eq!(self.n, v.len(), "dimension mismatch");
        (0..self.n).map(|i| (0..self.n).map(|k| self.get(i, k) * v[k]).sum()).collect()
    }

    /// Fraction-free Gaussian elimination (Bareiss); exact in `i128`.
    pub fn det(&self) -> i64 {
        let n = self.n;
        let mut a: Vec<Vec<i128>> = self.rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if a[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                    return 0;
                };
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
                }
            }
            prev = a[k][k];
        }
        i64::try_from(sign * a[n - 1][n - 1]).expect("determinant overflows i64")
    }

    /// Classical adjoint: `B · adj(B) = det(B) · I`.
    pub fn adjugate(&self) -> IntMatrix {
        let n = self.n;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = IntMatrix { n, entries: vec![0; n * n] };
        for i in 0..n {
            for j in 0..n {
                let minor: Vec<Vec<i64>> = (0..n)
                    .filter(|&r| r != i)
                    .map(|r| (0..n).filter(|&c| c != j).map(|c| self.get(r, c)).collect())
                    .collect();
                let cof = IntMatrix::from_rows(minor).expect("square minor").det();
                let sgn = if (i + j) % 2 == 0 { 1 } else { -1 };
                // adj = transpose of the cofactor matrix
                adj.set(j, i, sgn * cof);
            }
        }
        adj
    }

    /// Column-style Hermite normal form `H = B·U`: lower triangular, positive
    /// diagonal, and `0 ≤ H[i][j] < H[i][i]` for `j < i`.
    pub fn hermite_lower(&self) -> Result<IntMatrix> {
        let n = self.n;
        let mut h: Vec<Vec<i128>> = self.rows().into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
        let col_op = |h: &mut Vec<Vec<i128>>, dst: usize, src: usize, f: i128| {
            for row in h.iter_mut() {
                row[dst] -= f * row[src];
            }
        };
        for i in 0..n {
            // clear row i to the right of the diagonal with gcd steps
            for j in i + 1..n {
                while h[i][j] != 0 {
                    let f = Integer::div_floor(&h[i][i], &h[i][j]);
                    col_op(&mut h, i, j, f);
                    for row in h.iter_mut() {
                        row.swap(i, j);
                    }
                }
            }
            if h[i][i] == 0 {
                return Err(Error::Singular);
            }
            if h[i][i] < 0 {
                for row in h.iter_mut() {
                    row[i] = -row[i];
                }
            }
            for j in 0..i {
                let f = Integer::div_floor(&h[i][j], &h[i][i]);
                col_op(&mut h, j, i, f);
            }
        }
        let rows = h
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).expect("Hermite entry overflows i64")).collect())
            .collect();
        IntMatrix::from_rows(rows)
    }
}

impl FromStr for IntMatrix {
    type Err = Error;

    /// Rows separated by `;`, entries by `,`: `"1,-1;0,3"`.
    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .split(';')
            .map(parse_vector)
            .collect::<Result<Vec<_>>>()?;
        IntMatrix::from_rows(rows)
    }
}

/// Comma-separated integers: `"0,1"`.
pub fn parse_vector(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .map_err(|_| Error::Format(format!("bad integer {:?} in {s:?}", t.trim())))
        })
        .collect()
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            let cells: Vec<String> = row.iter().map(i64::to_string).collect();
            write!(f, "[{}]", cells.join(","))?;
        }
        write!(f, "]")
    }
}

/// Whether `B·y = v` has an integer solution, via `adj(B)·v ≡ 0 (mod det B)`.
pub fn lattice_member(b: &IntMatrix, v: &[i64]) -> bool {
    let d = b.det();
    assert!(d != 0, "lattice membership needs a nonsingular matrix");
    b.adjugate().mul_vec(v).iter().all(|x| x % d == 0)
}

/// Simple-covering criterion: the smallest 0-based column index `j` whose
/// adjugate column has coprime entries, together with `k = |det B|`. The
/// shifts `i·e_j` for `k` consecutive `i` then form an exact cover.
pub fn is_simple_covering(b: &IntMatrix) -> Option<(usize, i64)> {
    let d = b.det();
    assert!(d != 0, "covering matrix must be nonsingular");
    let adj = b.adjugate();
    (0..b.n())
        .find(|&j| adj.column(j).iter().fold(0i64, |g, &x| g.gcd(&x)) == 1)
        .map(|j| (j, d.abs()))
}

/// Which consecutive integers multiply `e_j` in a simple coset system.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ShiftRange {
    /// `-⌊(k-1)/2⌋ ≤ i ≤ ⌊k/2⌋`
    #[default]
    Centered,
    /// `0 ≤ i < k`
    FromZero,
}

impl ShiftRange {
    pub fn bounds(self, k: i64) -> (i64, i64) {
        match self {
            ShiftRange::Centered => (-(k - 1) / 2, k / 2),
            ShiftRange::FromZero => (0, k - 1),
        }
    }
}

/// A lattice `B·Z^n` with translates `R_1, ..., R_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetSystem {
    pub b: IntMatrix,
    pub reps: Vec<Vec<i64>>,
}

impl CosetSystem {
    pub fn new(b: IntMatrix, reps: Vec<Vec<i64>>) -> Result<Self> {
        if let Some(r) = reps.iter().find(|r| r.len() != b.n()) {
            return Err(Error::Dimension(format!("representative {r:?} does not match dimension {}", b.n())));
        }
        Ok(CosetSystem { b, reps })
    }

    /// Shifts `i·e_j` (0-based `j`) over `|det B|` consecutive values of `i`.
    pub fn simple(b: IntMatrix, j: usize, range: ShiftRange) -> Result<Self> {
        if j >= b.n() {
            return Err(Error::Dimension(format!("basis index {} out of range", j + 1)));
        }
        let k = b.det().abs();
        if k == 0 {
            return Err(Error::Singular);
        }
        let (lo, hi) = range.bounds(k);
        let reps = (lo..=hi)
            .map(|i| {
                let mut v = vec![0; b.n()];
                v[j] = i;
                v
            })
            .collect();
        Ok(CosetSystem { b, reps })
    }

    pub fn k(&self) -> usize {
        self.reps.len()
    }
}

/// Exact cover check: `|det B|` representatives, pairwise incongruent.
pub fn verify_ecs(cs: &CosetSystem) -> bool {
    let d = cs.b.det();
    if d == 0 || cs.reps.len() as i64 != d.abs() || cs.reps.iter().any(|r| r.len() != cs.b.n()) {
        return false;
    }
    let adj = cs.b.adjugate();
    let images: Vec<Vec<i64>> = cs.reps.iter().map(|r| adj.mul_vec(r).iter().map(|x| x.rem_euclid(d.abs())).collect()).collect();
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    sorted.len() == images.len()
}

/// The representatives lying in the fundamental box `Π [0, H_ii)` of the
/// lower Hermite form, in lexicographic order.
pub fn canonical_cosets(b: &IntMatrix) -> Result<CosetSystem> {
    let h = b.hermite_lower()?;
    let diag: Vec<i64> = (0..h.n()).map(|i| h.get(i, i)).collect();
    let mut reps = vec![Vec::new()];
    for &d in &diag {
        reps = reps
            .into_iter()
            .flat_map(|prefix: Vec<i64>| {
                (0..d).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    CosetSystem::new(b.clone(), reps)
}

/// Parses a shift specification against `b`:
/// `e2` (centered), `e1, -2..2`, `e1, 0..4`, `canonical`, `auto`, or
/// explicit `0,0; 1,0`. `auto` is the centered simple system along the
/// first coprime adjugate column, else the canonical one.
pub fn parse_shifts(spec: &str, b: &IntMatrix) -> Result<CosetSystem> {
    let spec = spec.trim();
    if spec == "auto" {
        if b.det() == 0 {
            return Err(Error::Singular);
        }
        return match is_simple_covering(b) {
            Some((j, _)) => CosetSystem::simple(b.clone(), j, ShiftRange::Centered),
            None => canonical_cosets(b),
        };
    }
    if let Some(rest) = spec.strip_prefix('e') {
        let (idx, range) = match rest.split_once(',') {
            Some((i, r)) => (i.trim(), Some(r.trim())),
            None => (rest.trim(), None),
        };
        let j: usize = idx
            .parse()
            .ok()
            .filter(|&j| j >= 1)
            .ok_or_else(|| Error::Format(format!("bad basis index in shifts {spec:?}")))?;
        let Some(range) = range else {
            return CosetSystem::simple(b.clone(), j - 1, ShiftRange::Centered);
        };
        let (lo, hi) = range
            .split_once("..")
            .ok_or_else(|| Error::Format(format!("expected lo..hi in shifts {spec:?}")))?;
        let parse_int = |t: &str| t.trim().parse::<i64>().map_err(|_| Error::Format(format!("bad shift bound {t:?}")));
        let (lo, hi) = (parse_int(lo)?, parse_int(hi)?);
        if j > b.n() {
            return Err(Error::Dimension(format!("basis index {j} out of range")));
        }
        let reps = (lo..=hi)
            .map(|i| {
                let mut v = vec![0; b.n()];
                v[j - 1] = i;
                v
            })
            .collect();
        return CosetSystem::new(b.clone(), reps);
    }
    if spec == "canonical" {
        return canonical_cosets(b);
    }
    let reps = spec.split(';').map(parse_vector).collect::<Result<Vec<_>>>()?;
    CosetSystem::new(b.clone(), reps)
}

/// Inverse of `parse_shifts` for systems built by `CosetSystem::simple` or
/// listed explicitly.
pub fn format_shifts(cs: &CosetSystem) -> String {
    let n = cs.b.n();
    for j in 0..n {
        let along: Option<Vec<i64>> = cs
            .reps
            .iter()
            .map(|r| (0..n).all(|t| t == j || r[t] == 0).then_some(r[j]))
            .collect();
        if let Some(xs) = along {
            if !xs.is_empty() && xs.windows(2).all(|w| w[1] == w[0] + 1) {
                return format!("e{}, {}..{}", j + 1, xs[0], xs[xs.len() - 1]);
            }
        }
    }
    cs.reps
        .iter()
        .map(|r| r.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join("; ")
}
