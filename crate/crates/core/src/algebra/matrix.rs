//! Dense integer matrices and their Smith and Hermite normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<BigInt>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch { expected: rows * cols, got: entries.len() });
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch { expected: c, got: bad.len() });
        }
        let entries = rows.iter().flat_map(|row| row.iter().map(|x| x.clone().into())).collect();
        IntMatrix::new(r, c, entries)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn diagonal(d: &[BigInt]) -> Self {
        let mut m = IntMatrix::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn column(&self, j: usize) -> Vec<BigInt> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries.iter().all(|x| !x.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: other.rows });
        }
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch { expected: self.cols, got: v.len() });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        self.transpose().mul_vec(v)
    }

    pub fn sub(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, got: other.rows * other.cols });
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn pow(&self, mut e: u32) -> Result<IntMatrix> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let mut base = self.clone();
        let mut acc = IntMatrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt> {
        if !self.is_square() {
            return Err(Error::NotSquare(self.rows, self.cols));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Rank over `Q`.
    pub fn rank(&self) -> usize {
        hermite_normal_form(self).nonzero_rows()
    }

    fn nonzero_rows(&self) -> usize {
        (0..self.rows).filter(|&i| self.row(i).iter().any(|x| !x.is_zero())).count()
    }

    pub fn to_rational_rows(&self) -> Vec<Vec<BigRational>> {
        self.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(BigRational::from_integer).collect())
            .collect()
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// `row[dst] += c * row[src]`
    fn add_row(&mut self, dst: usize, src: usize, c: &BigInt) {
        if c.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self[(src, j)] * c;
            self[(dst, j)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            self[(i, j)] = -&self[(i, j)];
        }
    }

    /// Replaces rows `(a, b)` by the unimodular combination
    /// `[[p, q], [r, s]] · [row a; row b]`.
    fn combine_rows(&mut self, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
        for j in 0..self.cols {
            let x = self[(a, j)].clone();
            let y = self[(b, j)].clone();
            self[(a, j)] = p * &x + q * &y;
            self[(b, j)] = r * &x + s * &y;
        }
    }

    fn combine_cols(&mut self, a: usize, b: usize, p: &BigInt, q: &BigInt, r: &BigInt, s: &BigInt) {
        for i in 0..self.rows {
            let x = self[(i, a)].clone();
            let y = self[(i, b)].clone();
            self[(i, a)] = p * &x + q * &y;
            self[(i, b)] = r * &x + s * &y;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.entries[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for (j, x) in self.row(i).iter().enumerate() {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Smith normal form `(U, D, V)` with `D = U·m·V`, `U` and `V` unimodular,
/// `D` diagonal with nonnegative entries `d₁ | d₂ | …`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub d: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        (0..self.d.rows.min(self.d.cols))
            .map(|i| self.d[(i, i)].clone())
            .filter(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Unimodular `[[x, y], [r, s]]` sending `(a, b)` to `(gcd, 0)`. When `a`
/// already divides `b` it is a plain elimination that leaves the first
/// entry alone, so repeated reduction cannot cycle.
fn gcd_step(a: &BigInt, b: &BigInt) -> (BigInt, BigInt, BigInt, BigInt) {
    if (b % a).is_zero() {
        return (BigInt::one(), BigInt::zero(), -(b / a), BigInt::one());
    }
    let e = a.extended_gcd(b);
    let (p, q) = (a / &e.gcd, b / &e.gcd);
    (e.x, e.y, -q, p)
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows, m.cols);
    let mut d = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let n = r.min(c);

    for t in 0..n {
        // Pivot: smallest nonzero absolute value in the remaining block.
        let pivot = (t..r)
            .flat_map(|i| (t..c).map(move |j| (i, j)))
            .filter(|&(i, j)| !d[(i, j)].is_zero())
            .min_by(|&a, &b| d[a].abs().cmp(&d[b].abs()));
        let Some((pi, pj)) = pivot else { break };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            // Clear column t below the pivot with extended-gcd row moves.
            for i in t + 1..r {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(i, t)].clone());
                let (x, y, q, p) = gcd_step(&a, &b);
                d.combine_rows(t, i, &x, &y, &q, &p);
                u.combine_rows(t, i, &x, &y, &q, &p);
            }
            // Clear row t right of the pivot with column moves.
            for j in t + 1..c {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(t, j)].clone());
                let (x, y, q, p) = gcd_step(&a, &b);
                d.combine_cols(t, j, &x, &y, &q, &p);
                v.combine_cols(t, j, &x, &y, &q, &p);
            }
            let col_clear = (t + 1..r).all(|i| d[(i, t)].is_zero());
            if !col_clear {
                continue;
            }
            // Divisibility: the pivot must divide the whole remaining block.
            let bad = (t + 1..r)
                .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                .find(|&(i, j)| !(&d[(i, j)] % &d[(t, t)]).is_zero());
            match bad {
                Some((i, _)) => {
                    d.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, d, v }
}

/// Basis of `{x : rows · x = 0}` over `Q` for a matrix with `cols` columns.
pub fn rational_nullspace(rows: &[Vec<BigRational>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut pr = 0;
    for col in 0..cols {
        let Some(p) = (pr..m.len()).find(|&i| !m[i][col].is_zero()) else { continue };
        m.swap(pr, p);
        let inv = m[pr][col].recip();
        for x in m[pr].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != pr && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for j in 0..cols {
                    let d = &m[pr][j] * &f;
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(col);
        pr += 1;
    }
    (0..cols)
        .filter(|j| !pivots.contains(j))
        .map(|free| {
            let mut v = vec![BigRational::zero(); cols];
            v[free] = BigRational::one();
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = -&m[i][free];
            }
            v
        })
        .collect()
}

/// Row-style Hermite normal form of the row lattice of `m`: the nonzero rows
/// of an echelon basis with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`. Lattices with equal row span give identical
/// output. The zero lattice is reported as a single zero row.
pub fn hermite_normal_form(m: &IntMatrix) -> IntMatrix {
    let (r, c) = (m.rows, m.cols);
    let mut h = m.clone();
    let mut pivot_row = 0;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..c {
        if pivot_row == r {
            break;
        }
        // gcd-combine every row below into the pivot row.
        for i in pivot_row + 1..r {
            if h[(i, col)].is_zero() {
                continue;
            }
            let (a, b) = (h[(pivot_row, col)].clone(), h[(i, col)].clone());
            if a.is_zero() {
                h.swap_rows(pivot_row, i);
                continue;
            }
            let (x, y, q, p) = gcd_step(&a, &b);
            h.combine_rows(pivot_row, i, &x, &y, &q, &p);
        }
        if h[(pivot_row, col)].is_zero() {
            continue;
        }
        if h[(pivot_row, col)].is_negative() {
            h.negate_row(pivot_row);
        }
        let p = h[(pivot_row, col)].clone();
        for i in 0..pivot_row {
            let q = h[(i, col)].div_floor(&p);
            h.add_row(i, pivot_row, &-q);
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
    }
    let rank = pivot_row.max(1);
    let entries = h.entries[..rank * c].to_vec();
    IntMatrix { rows: rank, cols: c, entries }
}

/// Integer solution `X` of `A·X = B`, if one exists.
pub fn solve_integer(a: &IntMatrix, b: &IntMatrix) -> Result<Option<IntMatrix>> {
    if a.rows != b.rows {
        return Err(Error::DimensionMismatch { expected: a.rows, got: b.rows });
    }
    // U A V = D  ⇒  D (V⁻¹ X) = U B.
    let s = smith_normal_form(a);
    let ub = s.u.mul(b)?;
    let mut y = IntMatrix::zeros(a.cols, b.cols);
    let n = a.rows.min(a.cols);
    for i in 0..a.rows {
        let di = if i < n { s.d[(i, i)].clone() } else { BigInt::zero() };
        for j in 0..b.cols {
            let rhs = &ub[(i, j)];
            if di.is_zero() {
                if !rhs.is_zero() {
                    return Ok(None);
                }
            } else {
                let (q, r) = rhs.div_rem(&di);
                if !r.is_zero() {
                    return Ok(None);
                }
                y[(i, j)] = q;
            }
        }
    }
    Ok(Some(s.v.mul(&y)?))
}
