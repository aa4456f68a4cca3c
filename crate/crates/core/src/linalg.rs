//! Linear algebra for relation matrices: sparse Wiedemann solving modulo a
//! prime, structured Gaussian elimination as a preprocessing step, dense
//! elimination modulo prime powers, and Hermite/Smith normal forms over the
//! integers for group-structure computations.
//!
//! Every solver verifies its output by direct multiplication before
//! returning; a nonzero residual is reported as an error, never silently.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::numbers::{invmod, mulmod};

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("system is singular; a kernel vector is attached")]
    SingularSystem { kernel: Vec<u64> },
    #[error("matrix rank too low to determine all unknowns")]
    RankDeficient,
    #[error("system is inconsistent")]
    Inconsistent,
    #[error("non-invertible pivot reveals a factor {factor} of the modulus")]
    CompositeTrouble { factor: u64 },
    #[error("matrix dimensions exceed the configured cap")]
    CapExceeded,
    #[error("bad matrix text: {0}")]
    ParseError(String),
}

/// Sparse matrix in row-major form; per-row entries sorted by column.
/// When `modulus` is set all values are stored reduced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<Vec<(u32, u64)>>,
    pub modulus: Option<u64>,
}

impl SparseMatrix {
    pub fn new(nrows: usize, ncols: usize, modulus: Option<u64>) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
            modulus,
        }
    }

    pub fn from_rows(ncols: usize, rows: Vec<Vec<(u32, u64)>>, modulus: Option<u64>) -> Self {
        let mut m = SparseMatrix {
            nrows: rows.len(),
            ncols,
            rows,
            modulus,
        };
        for row in &mut m.rows {
            if let Some(l) = modulus {
                for e in row.iter_mut() {
                    e.1 %= l;
                }
            }
            row.retain(|&(_, v)| v != 0);
            row.sort_by_key(|&(c, _)| c);
        }
        m
    }

    pub fn set(&mut self, row: usize, col: usize, value: u64) {
        let value = match self.modulus {
            Some(l) => value % l,
            None => value,
        };
        let r = &mut self.rows[row];
        match r.binary_search_by_key(&(col as u32), |&(c, _)| c) {
            Ok(i) => {
                if value == 0 {
                    r.remove(i);
                } else {
                    r[i].1 = value;
                }
            }
            Err(i) => {
                if value != 0 {
                    r.insert(i, (col as u32, value));
                }
            }
        }
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    /// `A * x` modulo the matrix modulus.
    pub fn matvec(&self, x: &[u64]) -> Vec<u64> {
        let l = self.modulus.expect("matvec requires a modulus");
        let mut out = vec![0u64; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            let mut acc: u64 = 0;
            for &(c, v) in row {
                acc = (acc + mulmod(v, x[c as usize], l)) % l;
            }
            out[i] = acc;
        }
        out
    }

    /// `A^T * x` modulo the matrix modulus.
    pub fn matvec_transpose(&self, x: &[u64]) -> Vec<u64> {
        let l = self.modulus.expect("matvec requires a modulus");
        let mut out = vec![0u64; self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            if x[i] == 0 {
                continue;
            }
            for &(c, v) in row {
                let cell = &mut out[c as usize];
                *cell = (*cell + mulmod(v, x[i], l)) % l;
            }
        }
        out
    }

    /// Bit-exact text form: header `nrows ncols modulus` (modulus 0 when
    /// unset), then sorted `row col value` triples; `#` starts a comment.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.nrows, self.ncols, self.modulus.unwrap_or(0));
        for (i, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                s.push_str(&format!("{i} {c} {v}\n"));
            }
        }
        s
    }

    pub fn parse(text: &str) -> Result<SparseMatrix, LinalgError> {
        let mut lines = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| LinalgError::ParseError("empty".into()))?;
        let h: Vec<u64> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| LinalgError::ParseError(header.into())))
            .collect::<Result<_, _>>()?;
        if h.len() != 3 {
            return Err(LinalgError::ParseError(header.into()));
        }
        let modulus = if h[2] == 0 { None } else { Some(h[2]) };
        let mut m = SparseMatrix::new(h[0] as usize, h[1] as usize, modulus);
        for line in lines {
            let t: Vec<u64> = line
                .split_whitespace()
                .map(|t| t.parse().map_err(|_| LinalgError::ParseError(line.into())))
                .collect::<Result<_, _>>()?;
            if t.len() != 3 || t[0] >= h[0] || t[1] >= h[1] {
                return Err(LinalgError::ParseError(line.into()));
            }
            m.set(t[0] as usize, t[1] as usize, t[2]);
        }
        Ok(m)
    }
}

/// Berlekamp-Massey: minimal linear recurrence of a sequence mod prime `l`.
/// Returns the connection polynomial `c` with `c[0] = 1` such that
/// `sum_j c[j] * s[i-j] = 0` for all valid i.
fn berlekamp_massey(seq: &[u64], l: u64) -> Vec<u64> {
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut big_l = 0usize;
    let mut m = 1usize;
    let mut last_d = 1u64;
    for n in 0..seq.len() {
        let mut d = 0u64;
        for (j, &cj) in c.iter().enumerate() {
            if j > n {
                break;
            }
            d = (d + mulmod(cj, seq[n - j], l)) % l;
        }
        if d == 0 {
            m += 1;
        } else if 2 * big_l <= n {
            let t = c.clone();
            let coef = mulmod(d, invmod(last_d, l).expect("modulus must be prime"), l);
            if c.len() < b.len() + m {
                c.resize(b.len() + m, 0);
            }
            for (j, &bj) in b.iter().enumerate() {
                let sub = mulmod(coef, bj, l);
                c[j + m] = (c[j + m] + l - sub) % l;
            }
            big_l = n + 1 - big_l;
            b = t;
            last_d = d;
            m = 1;
        } else {
            let coef = mulmod(d, invmod(last_d, l).expect("modulus must be prime"), l);
            if c.len() < b.len() + m {
                c.resize(b.len() + m, 0);
            }
            for (j, &bj) in b.iter().enumerate() {
                let sub = mulmod(coef, bj, l);
                c[j + m] = (c[j + m] + l - sub) % l;
            }
            m += 1;
        }
    }
    // normalise to the register length: trailing zeros up to big_l are the
    // lambda^k factor of the minimal polynomial and must be kept
    while c.len() > big_l + 1 {
        debug_assert_eq!(c.last(), Some(&0));
        c.pop();
    }
    c.resize(big_l + 1, 0);
    c
}

/// Scalar Wiedemann over an abstract matrix-vector product.
/// Solves `A y = b` mod prime `l` for a square operator of dimension n.
pub fn wiedemann_operator<F>(
    n: usize,
    matvec: F,
    b: &[u64],
    l: u64,
    seed: u64,
) -> Result<Vec<u64>, LinalgError>
where
    F: Fn(&[u64]) -> Vec<u64>,
{
    assert_eq!(b.len(), n);
    if n == 0 {
        return Ok(vec![]);
    }
    if b.iter().all(|&x| x == 0) {
        return Ok(vec![0; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _attempt in 0..6 {
        // Krylov sequence s_i = u^T A^i b
        let u: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
        let mut v = b.to_vec();
        let mut seq = Vec::with_capacity(2 * n + 2);
        for _ in 0..2 * n + 2 {
            let dot = u
                .iter()
                .zip(&v)
                .fold(0u64, |acc, (&a, &x)| (acc + mulmod(a, x, l)) % l);
            seq.push(dot);
            v = matvec(&v);
        }
        let c = berlekamp_massey(&seq, l);
        let deg = c.len() - 1;
        if deg == 0 {
            continue;
        }
        // minimal polynomial m(x) = sum c[j] x^(deg - j); m(0) = c[deg]
        if c[deg] != 0 {
            // y = -c[deg]^{-1} * sum_{j<deg} c[j] A^(deg-1-j) b
            let inv = invmod(c[deg], l).expect("prime modulus");
            let neg_inv = (l - inv) % l;
            let mut acc = vec![0u64; n];
            let mut pow = b.to_vec(); // A^0 b upward; coefficient of A^k is c[deg-1-k]
            for k in 0..deg {
                let coef = c[deg - 1 - k];
                if coef != 0 {
                    for (a, &p) in acc.iter_mut().zip(&pow) {
                        *a = (*a + mulmod(coef, p, l)) % l;
                    }
                }
                if k + 1 < deg {
                    pow = matvec(&pow);
                }
            }
            let y: Vec<u64> = acc.into_iter().map(|a| mulmod(neg_inv, a, l)).collect();
            if matvec(&y) == b {
                return Ok(y);
            }
            continue; // bad projection, retry
        }
        // m(0) = 0: try to extract a kernel vector g(A) A^j w for random w
        let k = c.iter().rev().take_while(|&&x| x == 0).count(); // multiplicity of the root 0
        let g: Vec<u64> = c[..c.len() - k].to_vec(); // m(x) = g-part * x^k, reversed form
        let w: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
        // evaluate g(A) w with g in minimal-poly orientation
        let gdeg = g.len() - 1;
        let mut acc = vec![0u64; n];
        let mut pow = w.clone();
        for j in 0..=gdeg {
            let coef = g[gdeg - j];
            if coef != 0 {
                for (a, &p) in acc.iter_mut().zip(&pow) {
                    *a = (*a + mulmod(coef, p, l)) % l;
                }
            }
            if j < gdeg {
                pow = matvec(&pow);
            }
        }
        let mut z = acc;
        for _ in 0..=k {
            if z.iter().all(|&x| x == 0) {
                break;
            }
            let az = matvec(&z);
            if az.iter().all(|&x| x == 0) {
                return Err(LinalgError::SingularSystem { kernel: z });
            }
            z = az;
        }
    }
    Err(LinalgError::RankDeficient)
}

/// Solve `A y = b` mod prime `l` for square sparse `A` (Wiedemann).
pub fn wiedemann_solve(a: &SparseMatrix, b: &[u64], l: u64, seed: u64) -> Result<Vec<u64>, LinalgError> {
    assert_eq!(a.nrows, a.ncols, "caller pads or crops to square");
    let a = with_modulus(a, l);
    wiedemann_operator(a.nrows, |x| a.matvec(x), b, l, seed)
}

fn with_modulus(a: &SparseMatrix, l: u64) -> SparseMatrix {
    let mut m = a.clone();
    m.modulus = Some(l);
    for row in &mut m.rows {
        for e in row.iter_mut() {
            e.1 %= l;
        }
        row.retain(|&(_, v)| v != 0);
    }
    m
}

/// A nonzero vector of the right kernel of square `A` mod prime `l`.
pub fn kernel_vector(a: &SparseMatrix, l: u64, seed: u64) -> Result<Vec<u64>, LinalgError> {
    assert_eq!(a.nrows, a.ncols);
    let a = with_modulus(a, l);
    let n = a.nrows;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    for attempt in 0..12 {
        let b: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
        match wiedemann_operator(n, |x| a.matvec(x), &b, l, seed.wrapping_add(attempt)) {
            Err(LinalgError::SingularSystem { kernel }) => {
                debug_assert!(a.matvec(&kernel).iter().all(|&x| x == 0));
                return Ok(kernel);
            }
            _ => continue,
        }
    }
    Err(LinalgError::RankDeficient)
}

/// One step of the structured-elimination transform log.
#[derive(Debug, Clone)]
enum Step {
    /// Variable solved outright by a weight-1 row: y[col] = value.
    Solved { col: usize, value: u64 },
    /// Variable determined later from a stored row (weight-1 column):
    /// y[col] = (rhs - sum over others) / coeff.
    Deferred {
        col: usize,
        coeff: u64,
        rhs: u64,
        others: Vec<(u32, u64)>,
    },
}

/// Result of structured Gaussian elimination on `(A, b)`.
pub struct Reduced {
    pub matrix: SparseMatrix,
    pub rhs: Vec<u64>,
    /// Maps columns of the reduced matrix to original column indices.
    pub col_map: Vec<usize>,
    steps: Vec<Step>,
    l: u64,
    orig_cols: usize,
}

impl Reduced {
    /// Extend a solution of the reduced system to the original system.
    pub fn lift(&self, y_reduced: &[u64]) -> Vec<u64> {
        let l = self.l;
        let mut y = vec![0u64; self.orig_cols];
        for (k, &orig) in self.col_map.iter().enumerate() {
            y[orig] = y_reduced[k];
        }
        for step in self.steps.iter().rev() {
            match step {
                Step::Solved { col, value } => y[*col] = *value,
                Step::Deferred {
                    col,
                    coeff,
                    rhs,
                    others,
                } => {
                    let mut acc = *rhs;
                    for &(c, v) in others {
                        acc = (acc + l - mulmod(v, y[c as usize], l)) % l;
                    }
                    y[*col] = mulmod(acc, invmod(*coeff, l).expect("prime modulus"), l);
                }
            }
        }
        y
    }
}

/// Structured Gaussian elimination: repeatedly removes weight-1 rows
/// (solving their variable) and weight-1 columns (deferring their variable),
/// shrinking the system before an iterative solver runs.
pub fn structured_gauss(a: &SparseMatrix, b: &[u64], l: u64) -> Result<Reduced, LinalgError> {
    let mut rows: Vec<Option<Vec<(u32, u64)>>> = with_modulus(a, l)
        .rows
        .into_iter()
        .map(Some)
        .collect();
    let mut rhs: Vec<u64> = b.iter().map(|&x| x % l).collect();
    let mut dead_col = vec![false; a.ncols];
    let mut solved: Vec<Step> = Vec::new();
    let mut col_weight = vec![0usize; a.ncols];
    for row in rows.iter().flatten() {
        for &(c, _) in row {
            col_weight[c as usize] += 1;
        }
    }
    loop {
        let mut progress = false;
        // weight-1 rows solve a variable immediately
        for i in 0..rows.len() {
            let Some(row) = rows[i].clone() else { continue };
            if row.len() == 1 {
                let (c, v) = row[0];
                let value = mulmod(rhs[i], invmod(v, l).expect("prime modulus"), l);
                solved.push(Step::Solved {
                    col: c as usize,
                    value,
                });
                dead_col[c as usize] = true;
                rows[i] = None;
                for (j, r) in rows.iter_mut().enumerate() {
                    let Some(r) = r else { continue };
                    if let Ok(pos) = r.binary_search_by_key(&c, |&(cc, _)| cc) {
                        let coeff = r[pos].1;
                        rhs[j] = (rhs[j] + l - mulmod(coeff, value, l)) % l;
                        r.remove(pos);
                        col_weight[c as usize] -= 1;
                    }
                }
                col_weight[c as usize] = 0;
                progress = true;
            } else if row.is_empty() {
                if rhs[i] != 0 {
                    return Err(LinalgError::Inconsistent);
                }
                rows[i] = None;
            }
        }
        // weight-1 columns defer a variable
        for c in 0..a.ncols {
            if dead_col[c] || col_weight[c] != 1 {
                continue;
            }
            let Some(i) = rows
                .iter()
                .position(|r| r.as_ref().is_some_and(|r| r.iter().any(|&(cc, _)| cc as usize == c)))
            else {
                col_weight[c] = 0;
                continue;
            };
            let row = rows[i].take().unwrap();
            let pos = row.iter().position(|&(cc, _)| cc as usize == c).unwrap();
            let coeff = row[pos].1;
            let mut others = row.clone();
            others.remove(pos);
            for &(cc, _) in &others {
                col_weight[cc as usize] -= 1;
            }
            solved.push(Step::Deferred {
                col: c,
                coeff,
                rhs: rhs[i],
                others,
            });
            dead_col[c] = true;
            col_weight[c] = 0;
            progress = true;
        }
        if !progress {
            break;
        }
    }
    // pack the surviving system
    let col_map: Vec<usize> = (0..a.ncols)
        .filter(|&c| !dead_col[c] && col_weight[c] > 0)
        .collect();
    let mut col_index = vec![usize::MAX; a.ncols];
    for (k, &c) in col_map.iter().enumerate() {
        col_index[c] = k;
    }
    let mut new_rows = Vec::new();
    let mut new_rhs = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let Some(row) = row else { continue };
        let packed: Vec<(u32, u64)> = row
            .iter()
            .map(|&(c, v)| (col_index[c as usize] as u32, v))
            .collect();
        new_rows.push(packed);
        new_rhs.push(rhs[i]);
    }
    let matrix = SparseMatrix::from_rows(col_map.len(), new_rows, Some(l));
    Ok(Reduced {
        matrix,
        rhs: new_rhs,
        col_map,
        steps: solved,
        l,
        orig_cols: a.ncols,
    })
}

/// Solve a (possibly overdetermined) sparse system mod prime `l`:
/// structured elimination first, then Wiedemann on the normal equations of
/// the surviving core. The returned solution satisfies `A y = b` exactly.
pub fn solve_sparse(a: &SparseMatrix, b: &[u64], l: u64, seed: u64) -> Result<Vec<u64>, LinalgError> {
    let red = structured_gauss(a, b, l)?;
    let core = &red.matrix;
    let y_core = if core.ncols == 0 {
        vec![]
    } else {
        // normal equations: (A^T A) y = A^T b, square and symmetric
        let atb = core.matvec_transpose(&red.rhs);
        let op = |x: &[u64]| core.matvec_transpose(&core.matvec(x));
        wiedemann_operator(core.ncols, op, &atb, l, seed)?
    };
    let y = red.lift(&y_core);
    // zero-residual contract
    let ax = with_modulus(a, l).matvec(&y);
    for (i, &r) in ax.iter().enumerate() {
        if r != b[i] % l {
            return Err(LinalgError::Inconsistent);
        }
    }
    Ok(y)
}

/// Dense elimination modulo an arbitrary word-sized modulus. Pivots must be
/// units; a nonzero non-unit column reveals a factor of the modulus, which
/// callers split off and retry per prime power.
pub fn solve_dense_mod(rows: &[Vec<u64>], b: &[u64], modulus: u64) -> Result<Vec<u64>, LinalgError> {
    let nrows = rows.len();
    assert_eq!(b.len(), nrows);
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|&v| v % modulus).collect())
        .collect();
    let mut rhs: Vec<u64> = b.iter().map(|&v| v % modulus).collect();
    let mut pivot_row_of_col = vec![usize::MAX; ncols];
    let mut used = vec![false; nrows];
    for col in 0..ncols {
        // unit pivot wanted
        let pivot = (0..nrows).find(|&i| !used[i] && a[i][col] != 0 && a[i][col].gcd(&modulus) == 1);
        let pivot = match pivot {
            Some(i) => i,
            None => {
                if let Some(i) = (0..nrows).find(|&i| !used[i] && a[i][col] != 0) {
                    let g = a[i][col].gcd(&modulus);
                    return Err(LinalgError::CompositeTrouble { factor: g });
                }
                return Err(LinalgError::RankDeficient);
            }
        };
        used[pivot] = true;
        pivot_row_of_col[col] = pivot;
        let inv = invmod(a[pivot][col], modulus).unwrap();
        for j in col..ncols {
            a[pivot][j] = mulmod(a[pivot][j], inv, modulus);
        }
        rhs[pivot] = mulmod(rhs[pivot], inv, modulus);
        for i in 0..nrows {
            if i == pivot || a[i][col] == 0 {
                continue;
            }
            let f = a[i][col];
            for j in col..ncols {
                let sub = mulmod(f, a[pivot][j], modulus);
                a[i][j] = (a[i][j] + modulus - sub) % modulus;
            }
            let sub = mulmod(f, rhs[pivot], modulus);
            rhs[i] = (rhs[i] + modulus - sub) % modulus;
        }
    }
    // leftover rows must be consistent
    for i in 0..nrows {
        if !used[i] && rhs[i] != 0 {
            return Err(LinalgError::Inconsistent);
        }
    }
    Ok((0..ncols).map(|c| rhs[pivot_row_of_col[c]]).collect())
}

/// Dense matrix with arbitrary-precision integer entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<BigInt>,
}

impl DenseIntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        DenseIntMatrix {
            nrows,
            ncols,
            entries: vec![BigInt::zero(); nrows * ncols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            *m.at_mut(i, i) = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let entries = rows.into_iter().flatten().collect();
        DenseIntMatrix {
            nrows,
            ncols,
            entries,
        }
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
                .collect(),
        )
    }

    pub fn at(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.ncols + j]
    }

    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut BigInt {
        &mut self.entries[i * self.ncols + j]
    }

    pub fn mul(&self, other: &DenseIntMatrix) -> DenseIntMatrix {
        assert_eq!(self.ncols, other.nrows);
        let mut out = DenseIntMatrix::zero(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for k in 0..self.ncols {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.ncols {
                    let add = a * other.at(k, j);
                    *out.at_mut(i, j) += add;
                }
            }
        }
        out
    }

    /// Determinant by fraction-free Bareiss elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.nrows, self.ncols);
        let n = self.nrows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m: Vec<Vec<BigInt>> = (0..n)
            .map(|i| (0..n).map(|j| self.at(i, j).clone()).collect())
            .collect();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[k][k].is_zero() {
                match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                    Some(i) => {
                        m.swap(k, i);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[i][j] * &m[k][k] - &m[i][k] * &m[k][j];
                    m[i][j] = num / &prev;
                }
                m[i][k] = BigInt::zero();
            }
            prev = m[k][k].clone();
        }
        sign * m[n - 1][n - 1].clone()
    }
}

const NORMAL_FORM_CAP: usize = 4000;

/// Smith normal form: the diagonal `d_1 | d_2 | ...` of the matrix under
/// unimodular row and column transforms, zeros last. With `modulus = Some(D)`
/// all arithmetic is reduced modulo D; this is valid whenever `D * Z^n` is
/// contained in the row lattice (for relation lattices, any multiple of the
/// group order), and keeps entries from exploding.
pub fn smith_normal_form(m: &DenseIntMatrix, modulus: Option<&BigUint>) -> Result<Vec<BigUint>, LinalgError> {
    if m.nrows > NORMAL_FORM_CAP || m.ncols > NORMAL_FORM_CAP {
        return Err(LinalgError::CapExceeded);
    }
    let d_mod = modulus.map(|d| BigInt::from(d.clone()));
    let reduce = |x: &mut BigInt| {
        if let Some(d) = &d_mod {
            *x = x.mod_floor(d);
            // symmetric representative keeps magnitudes small
            if &*x + &*x > *d {
                *x -= d;
            }
        }
    };
    let (nr, nc) = (m.nrows, m.ncols);
    let mut a: Vec<Vec<BigInt>> = (0..nr)
        .map(|i| {
            (0..nc)
                .map(|j| {
                    let mut v = m.at(i, j).clone();
                    reduce(&mut v);
                    v
                })
                .collect()
        })
        .collect();
    let rank_bound = nr.min(nc);
    let mut diag: Vec<BigUint> = Vec::with_capacity(rank_bound);
    'outer: for t in 0..rank_bound {
        'pivoting: loop {
            // smallest nonzero entry in the trailing block
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if a[i][j].is_zero() {
                        continue;
                    }
                    match best {
                        Some((bi, bj)) if a[bi][bj].abs() <= a[i][j].abs() => {}
                        _ => best = Some((i, j)),
                    }
                }
            }
            let Some((bi, bj)) = best else {
                // rest of the matrix is zero; modulo D a zero block stands
                // for the sublattice D*Z^k, so those factors are D
                let fill = match modulus {
                    Some(d) => d.clone(),
                    None => BigUint::zero(),
                };
                for _ in diag.len()..rank_bound {
                    diag.push(fill.clone());
                }
                break 'outer;
            };
            a.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            // clear column t
            let mut dirty = false;
            for i in t + 1..nr {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][t], &a[t][t]);
                if !q.is_zero() {
                    for j in t..nc {
                        let sub = &q * &a[t][j];
                        a[i][j] -= sub;
                        reduce(&mut a[i][j]);
                    }
                }
                if !a[i][t].is_zero() {
                    dirty = true;
                }
            }
            // clear row t
            for j in t + 1..nc {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = div_round(&a[t][j], &a[t][t]);
                if !q.is_zero() {
                    for row in a.iter_mut().skip(t) {
                        let sub = &q * &row[t];
                        row[j] -= sub;
                        reduce(&mut row[j]);
                    }
                }
                if !a[t][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                continue 'pivoting;
            }
            // divisibility: pivot must divide every remaining entry
            for i in t + 1..nr {
                for j in t + 1..nc {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        let add: Vec<BigInt> = a[i].clone();
                        for (jj, v) in add.into_iter().enumerate() {
                            a[t][jj] += v;
                            reduce(&mut a[t][jj]);
                        }
                        continue 'pivoting;
                    }
                }
            }
            break;
        }
        let mut d = a[t][t].abs();
        if let Some(dm) = &d_mod {
            // the true invariant factor divides D
            d = d.gcd(dm);
        }
        diag.push(d.to_biguint().unwrap());
    }
    if modulus.is_some() {
        // modular reduction can scramble the divisibility chain; restore it
        // with gcd/lcm sweeps (diag(a, b) ~ diag(gcd, lcm))
        loop {
            let mut changed = false;
            for i in 0..diag.len().saturating_sub(1) {
                for j in i + 1..diag.len() {
                    if (&diag[j] % &diag[i]).is_zero() {
                        continue;
                    }
                    let g = diag[i].gcd(&diag[j]);
                    let l = &diag[i] / &g * &diag[j];
                    diag[i] = g;
                    diag[j] = l;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        diag.sort();
    }
    Ok(diag)
}

fn div_round(a: &BigInt, b: &BigInt) -> BigInt {
    // quotient rounded to nearest, so remainders shrink fast
    let (mut q, r) = a.div_rem(b);
    let two_r = &r + &r;
    if two_r.abs() > b.abs() {
        if (r.is_negative()) == (b.is_negative()) {
            q += 1;
        } else {
            q -= 1;
        }
    }
    q
}

/// Row-style Hermite normal form: returns `H` upper-staircase with positive
/// pivots and entries above each pivot reduced into `[0, pivot)`. The row
/// lattice of `H` equals that of the input.
pub fn hermite_normal_form(m: &DenseIntMatrix) -> Result<DenseIntMatrix, LinalgError> {
    if m.nrows > NORMAL_FORM_CAP || m.ncols > NORMAL_FORM_CAP {
        return Err(LinalgError::CapExceeded);
    }
    let (nr, nc) = (m.nrows, m.ncols);
    let mut a: Vec<Vec<BigInt>> = (0..nr)
        .map(|i| (0..nc).map(|j| m.at(i, j).clone()).collect())
        .collect();
    let mut t = 0usize;
    for col in 0..nc {
        if t >= nr {
            break;
        }
        loop {
            // smallest nonzero entry in column below t
            let mut best: Option<usize> = None;
            for (i, row) in a.iter().enumerate().skip(t) {
                if row[col].is_zero() {
                    continue;
                }
                match best {
                    Some(b) if a[b][col].abs() <= row[col].abs() => {}
                    _ => best = Some(i),
                }
            }
            let Some(b) = best else { break };
            a.swap(t, b);
            let mut any = false;
            for i in t + 1..nr {
                if a[i][col].is_zero() {
                    continue;
                }
                let q = div_round(&a[i][col], &a[t][col]);
                for j in 0..nc {
                    let sub = &q * &a[t][j];
                    a[i][j] -= sub;
                }
                if !a[i][col].is_zero() {
                    any = true;
                }
            }
            if !any {
                break;
            }
        }
        if a[t][col].is_zero() {
            continue;
        }
        if a[t][col].is_negative() {
            for j in 0..nc {
                a[t][j] = -a[t][j].clone();
            }
        }
        // canonical reduction of the rows above
        for i in 0..t {
            let q = a[i][col].div_floor(&a[t][col]);
            if !q.is_zero() {
                for j in 0..nc {
                    let sub = &q * &a[t][j];
                    a[i][j] -= sub;
                }
            }
        }
        t += 1;
    }
    Ok(DenseIntMatrix::from_rows(a))
}

/// Reduce a vector against the rows of an HNF matrix; the result is zero
/// iff the vector lies in the row lattice.
pub fn hnf_reduce(h: &DenseIntMatrix, v: &[BigInt]) -> Vec<BigInt> {
    assert_eq!(v.len(), h.ncols);
    let mut v = v.to_vec();
    let mut row = 0usize;
    for col in 0..h.ncols {
        if row >= h.nrows || h.at(row, col).is_zero() {
            continue;
        }
        let q = v[col].div_floor(h.at(row, col));
        if !q.is_zero() {
            for j in 0..h.ncols {
                let sub = &q * h.at(row, j);
                v[j] -= sub;
            }
        }
        row += 1;
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: plain dense Gaussian elimination mod a prime.
    fn dense_oracle(rows: &[Vec<u64>], b: &[u64], l: u64) -> Option<Vec<u64>> {
        let n = rows.len();
        let m = rows[0].len();
        let mut a: Vec<Vec<u64>> = rows
            .iter()
            .zip(b)
            .map(|(r, &rb)| {
                let mut v: Vec<u64> = r.iter().map(|&x| x % l).collect();
                v.push(rb % l);
                v
            })
            .collect();
        let mut piv_of_col = vec![usize::MAX; m];
        let mut r = 0;
        for c in 0..m {
            let Some(p) = (r..n).find(|&i| a[i][c] != 0) else { continue };
            a.swap(r, p);
            let inv = invmod(a[r][c], l)?;
            for j in c..=m {
                a[r][j] = mulmod(a[r][j], inv, l);
            }
            for i in 0..n {
                if i != r && a[i][c] != 0 {
                    let f = a[i][c];
                    for j in c..=m {
                        let sub = mulmod(f, a[r][j], l);
                        a[i][j] = (a[i][j] + l - sub) % l;
                    }
                }
            }
            piv_of_col[c] = r;
            r += 1;
        }
        for row in a.iter().skip(r) {
            if row[m] != 0 {
                return None;
            }
        }
        let mut y = vec![0u64; m];
        for c in 0..m {
            if piv_of_col[c] == usize::MAX {
                return None; // underdetermined
            }
            y[c] = a[piv_of_col[c]][m];
        }
        Some(y)
    }

    fn random_sparse(n: usize, density: f64, l: u64, rng: &mut ChaCha8Rng) -> (SparseMatrix, Vec<Vec<u64>>) {
        loop {
            let mut rows = Vec::with_capacity(n);
            let mut dense = Vec::with_capacity(n);
            for _ in 0..n {
                let mut row = Vec::new();
                let mut drow = vec![0u64; n];
                for c in 0..n {
                    if rng.gen_bool(density) {
                        let v = rng.gen_range(1..l);
                        row.push((c as u32, v));
                        drow[c] = v;
                    }
                }
                // diagonal boost improves the odds of nonsingularity
                if drow[rows.len().min(n - 1)] == 0 {
                    let c = rows.len().min(n - 1);
                    let v = rng.gen_range(1..l);
                    row.push((c as u32, v));
                    row.sort_by_key(|&(c, _)| c);
                    drow[c] = v;
                }
                rows.push(row);
                dense.push(drow);
            }
            let m = SparseMatrix::from_rows(n, rows, Some(l));
            // accept only nonsingular instances for the solve comparison
            let probe: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
            if dense_oracle(&dense, &m.matvec(&probe), l).is_some() {
                return (m, dense);
            }
        }
    }

    #[test]
    fn wiedemann_identity_and_small() {
        let l = 10007u64;
        let mut id = SparseMatrix::new(3, 3, Some(l));
        for i in 0..3 {
            id.set(i, i, 1);
        }
        let b = vec![5, 7, 9];
        assert_eq!(wiedemann_solve(&id, &b, l, 1).unwrap(), b);

        // [[1,1],[0,1]] y = (3,2) mod 5 -> y = (1,2)
        let mut a = SparseMatrix::new(2, 2, Some(5));
        a.set(0, 0, 1);
        a.set(0, 1, 1);
        a.set(1, 1, 1);
        assert_eq!(wiedemann_solve(&a, &[3, 2], 5, 1).unwrap(), vec![1, 2]);
    }

    #[test]
    fn wiedemann_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for &l in &[101u64, 10007, 1000003] {
            for n in [3usize, 10, 50, 200] {
                let (a, dense) = random_sparse(n, 0.1, l, &mut rng);
                let y_true: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
                let b = a.matvec(&y_true);
                let y = wiedemann_solve(&a, &b, l, 7).unwrap();
                assert_eq!(a.matvec(&y), b);
                let oracle = dense_oracle(&dense, &b, l).unwrap();
                assert_eq!(y, oracle);
            }
        }
    }

    #[test]
    fn wiedemann_500_random() {
        let l = 10007u64;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (a, _) = random_sparse(500, 0.02, l, &mut rng);
        let y_true: Vec<u64> = (0..500).map(|_| rng.gen_range(0..l)).collect();
        let b = a.matvec(&y_true);
        let y = wiedemann_solve(&a, &b, l, 5).unwrap();
        assert_eq!(a.matvec(&y), b, "residual must be exactly zero");
    }

    #[test]
    fn kernel_of_singular() {
        let l = 101u64;
        // rank-2 3x3 matrix
        let a = SparseMatrix::from_rows(
            3,
            vec![
                vec![(0, 1), (1, 2), (2, 3)],
                vec![(0, 2), (1, 4), (2, 6)],
                vec![(1, 1), (2, 5)],
            ],
            Some(l),
        );
        let k = kernel_vector(&a, l, 9).unwrap();
        assert!(k.iter().any(|&x| x != 0));
        assert!(a.matvec(&k).iter().all(|&x| x == 0));
    }

    #[test]
    fn structured_gauss_reduces_and_lifts() {
        let l = 101u64;
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let n = rng.gen_range(4..20);
            let (a, dense) = random_sparse(n, 0.15, l, &mut rng);
            let y_true: Vec<u64> = (0..n).map(|_| rng.gen_range(0..l)).collect();
            let b = a.matvec(&y_true);
            let y = solve_sparse(&a, &b, l, 17).unwrap();
            assert_eq!(a.matvec(&y), b);
            assert_eq!(y, dense_oracle(&dense, &b, l).unwrap());
        }
    }

    #[test]
    fn structured_gauss_weight_one_column() {
        let l = 101u64;
        // column 2 appears only in row 0
        let a = SparseMatrix::from_rows(
            3,
            vec![
                vec![(0, 3), (2, 5)],
                vec![(0, 1), (1, 2)],
                vec![(1, 7)],
            ],
            Some(l),
        );
        let red = structured_gauss(&a, &[4, 9, 14], l).unwrap();
        assert!(red.matrix.ncols < 3, "dimension must shrink");
        let y = solve_sparse(&a, &[4, 9, 14], l, 1).unwrap();
        assert_eq!(a.matvec(&y), vec![4, 9, 14]);

        // empty matrix stays empty
        let e = SparseMatrix::new(0, 0, Some(l));
        let red = structured_gauss(&e, &[], l).unwrap();
        assert_eq!(red.matrix.nrows, 0);
    }

    #[test]
    fn dense_mod_prime_power_and_composite() {
        // x + y = 3, y = 2 mod 9 (prime power)
        let rows = vec![vec![1, 1], vec![0, 1]];
        let y = solve_dense_mod(&rows, &[3, 2], 9).unwrap();
        assert_eq!(y, vec![1, 2]);
        // composite modulus with a non-unit-only column reveals a factor
        let rows = vec![vec![2, 1], vec![4, 1]];
        match solve_dense_mod(&rows, &[1, 2], 6) {
            Err(LinalgError::CompositeTrouble { factor }) => assert_eq!(factor, 2),
            other => panic!("expected CompositeTrouble, got {other:?}"),
        }
    }

    #[test]
    fn snf_examples() {
        // diag(2,3) -> (1,6): by-hand row/column operations
        let m = DenseIntMatrix::from_i64_rows(&[vec![2, 0], vec![0, 3]]);
        let d = smith_normal_form(&m, None).unwrap();
        assert_eq!(d, vec![BigUint::from(1u32), BigUint::from(6u32)]);

        let id = DenseIntMatrix::identity(5);
        let d = smith_normal_form(&id, None).unwrap();
        assert!(d.iter().all(|x| x.is_one()));
    }

    #[test]
    fn snf_product_is_abs_det() {
        // independent oracle: cofactor-expansion determinant
        fn cofactor_det(m: &[Vec<i64>]) -> i64 {
            let n = m.len();
            if n == 1 {
                return m[0][0];
            }
            let mut det = 0i64;
            for j in 0..n {
                if m[0][j] == 0 {
                    continue;
                }
                let minor: Vec<Vec<i64>> = (1..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&c| c != j)
                            .map(|c| m[i][c])
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                det += s * m[0][j] * cofactor_det(&minor);
            }
            det
        }
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..100 {
            let rows: Vec<Vec<i64>> = (0..6)
                .map(|_| (0..6).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let det = cofactor_det(&rows);
            let m = DenseIntMatrix::from_i64_rows(&rows);
            assert_eq!(m.determinant(), BigInt::from(det));
            let d = smith_normal_form(&m, None).unwrap();
            let prod: BigUint = d.iter().product();
            assert_eq!(prod, BigInt::from(det).abs().to_biguint().unwrap());
            // divisibility chain
            for w in d.windows(2) {
                if !w[0].is_zero() {
                    if w[1].is_zero() {
                        continue;
                    }
                    assert!((&w[1] % &w[0]).is_zero(), "chain broken: {d:?}");
                }
            }
        }
    }

    #[test]
    fn snf_invariant_under_permutation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<i64>> = (0..5)
            .map(|_| (0..5).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let d1 = smith_normal_form(&DenseIntMatrix::from_i64_rows(&rows), None).unwrap();
        let mut permuted = rows.clone();
        permuted.swap(0, 3);
        permuted.iter_mut().for_each(|r| r.swap(1, 4));
        let d2 = smith_normal_form(&DenseIntMatrix::from_i64_rows(&permuted), None).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn snf_with_modulus_matches_plain() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..30 {
            let rows: Vec<Vec<i64>> = (0..4)
                .map(|_| (0..4).map(|_| rng.gen_range(-9..=9)).collect())
                .collect();
            let m = DenseIntMatrix::from_i64_rows(&rows);
            let det = m.determinant();
            if det.is_zero() {
                continue;
            }
            let d_plain = smith_normal_form(&m, None).unwrap();
            let modulus = det.abs().to_biguint().unwrap();
            let d_mod = smith_normal_form(&m, Some(&modulus)).unwrap();
            assert_eq!(d_plain, d_mod);
        }
    }

    #[test]
    fn hnf_examples() {
        // already triangular positive-pivot input is fixed
        let m = DenseIntMatrix::from_i64_rows(&[vec![2, 1], vec![0, 3]]);
        let h = hermite_normal_form(&m).unwrap();
        assert_eq!(h, m);

        // [[2,1],[1,1]] is unimodular: HNF is the identity
        let m = DenseIntMatrix::from_i64_rows(&[vec![2, 1], vec![1, 1]]);
        let h = hermite_normal_form(&m).unwrap();
        assert_eq!(h, DenseIntMatrix::identity(2));
    }

    #[test]
    fn hnf_lattice_membership() {
        let m = DenseIntMatrix::from_i64_rows(&[vec![4, 1, 0], vec![2, 3, 6], vec![0, 0, 12]]);
        let h = hermite_normal_form(&m).unwrap();
        // a combination of the rows reduces to zero
        let v: Vec<BigInt> = vec![
            BigInt::from(4 * 3 + 2 * 2),
            BigInt::from(3 + 3 * 2),
            BigInt::from(6 * 2 + 12 * 5),
        ];
        assert!(hnf_reduce(&h, &v).iter().all(|x| x.is_zero()));
        // and a vector outside the lattice does not
        let v = vec![BigInt::from(1), BigInt::zero(), BigInt::zero()];
        assert!(hnf_reduce(&h, &v).iter().any(|x| !x.is_zero()));
    }

    #[test]
    fn sparse_text_roundtrip() {
        let mut a = SparseMatrix::new(3, 4, Some(101));
        a.set(0, 1, 5);
        a.set(2, 3, 7);
        a.set(1, 0, 1);
        let text = a.to_text();
        assert_eq!(text.lines().next().unwrap(), "3 4 101");
        let b = SparseMatrix::parse(&text).unwrap();
        assert_eq!(a, b);
        let commented = format!("# relation file\n{text}# end\n");
        assert_eq!(SparseMatrix::parse(&commented).unwrap(), a);
    }
}
