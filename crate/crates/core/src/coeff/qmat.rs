//! Dense matrices over arbitrary-precision rationals.
//!
//! Elimination is fraction-free (Bareiss) on an integer rescaling of the
//! rows, followed by a rational back-substitution on the echelon rows only.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rat = BigRational;

pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as `p/q` (always with an explicit denominator).
pub fn rat_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QMat {
    rows: usize,
    cols: usize,
    data: Vec<Rat>,
}

/// Reduced row echelon form together with its pivot columns.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rref: QMat,
    pub pivots: Vec<usize>,
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rat::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Rat::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rat) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMat { rows, cols, data }
    }

    /// Panics on ragged input; callers validate shapes first.
    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged matrix rows");
        QMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v)).collect()).collect())
    }

    pub fn column(v: Vec<Rat>) -> Self {
        QMat { rows: v.len(), cols: 1, data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Rat] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Rat> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rat>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let v = self.get(i, j);
                    if i == j {
                        v.is_one()
                    } else {
                        v.is_zero()
                    }
                })
            })
    }

    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.cols, other.rows, "matrix shape mismatch in product");
        let mut out = QMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if b.is_zero() {
                        continue;
                    }
                    let slot = &mut out.data[i * other.cols + j];
                    *slot += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Rat]) -> Vec<Rat> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| {
                let mut acc = Rat::zero();
                for (a, b) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !b.is_zero() {
                        acc += a * b;
                    }
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        QMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        QMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a * c).collect() }
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn trace(&self) -> Rat {
        (0..self.rows.min(self.cols)).fold(Rat::zero(), |acc, i| acc + self.get(i, i))
    }

    /// Kronecker product; row index of the result is `i * other.rows + k`.
    pub fn kron(&self, other: &QMat) -> QMat {
        let (r, c) = (self.rows * other.rows, self.cols * other.cols);
        let mut out = QMat::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        let b = other.get(k, l);
                        if !b.is_zero() {
                            out.set(i * other.rows + k, j * other.cols + l, a * b);
                        }
                    }
                }
            }
        }
        out
    }

    pub fn hstack(parts: &[&QMat]) -> QMat {
        let rows = parts.first().map_or(0, |p| p.rows);
        assert!(parts.iter().all(|p| p.rows == rows));
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = QMat::zeros(rows, cols);
        let mut off = 0;
        for p in parts {
            for i in 0..rows {
                for j in 0..p.cols {
                    out.set(i, off + j, p.get(i, j).clone());
                }
            }
            off += p.cols;
        }
        out
    }

    pub fn vstack(parts: &[&QMat]) -> QMat {
        let cols = parts.first().map_or(0, |p| p.cols);
        assert!(parts.iter().all(|p| p.cols == cols));
        let rows = parts.iter().map(|p| p.rows).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for p in parts {
            data.extend(p.data.iter().cloned());
        }
        QMat { rows, cols, data }
    }

    pub fn block_diag(parts: &[&QMat]) -> QMat {
        let rows = parts.iter().map(|p| p.rows).sum();
        let cols = parts.iter().map(|p| p.cols).sum();
        let mut out = QMat::zeros(rows, cols);
        let (mut r0, mut c0) = (0, 0);
        for p in parts {
            for i in 0..p.rows {
                for j in 0..p.cols {
                    out.set(r0 + i, c0 + j, p.get(i, j).clone());
                }
            }
            r0 += p.rows;
            c0 += p.cols;
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> QMat {
        QMat::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn select_cols(&self, cols: &[usize]) -> QMat {
        let rows: Vec<usize> = (0..self.rows).collect();
        self.select(&rows, cols)
    }

    /// Fraction-free forward elimination. Returns integer echelon rows,
    /// pivot columns and the number of row swaps.
    fn bareiss(&self) -> (Vec<Vec<BigInt>>, Vec<usize>, usize) {
        let mut m: Vec<Vec<BigInt>> = (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut swaps = 0;
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&p| !m[p][c].is_zero()) else { continue };
            if p != r {
                m.swap(p, r);
                swaps += 1;
            }
            let (top, rest) = m.split_at_mut(r + 1);
            let pr = &top[r];
            for row in rest.iter_mut() {
                let f = row[c].clone();
                for j in c + 1..self.cols {
                    let v = &pr[c] * &row[j] - &f * &pr[j];
                    row[j] = if prev.is_one() { v } else { v / &prev };
                }
                row[c] = BigInt::zero();
            }
            prev = m[r][c].clone();
            pivots.push(c);
            r += 1;
        }
        m.truncate(r);
        (m, pivots, swaps)
    }

    pub fn echelon(&self) -> Echelon {
        let (ints, pivots, _) = self.bareiss();
        let r = pivots.len();
        let mut rows: Vec<Vec<Rat>> = ints
            .into_iter()
            .zip(&pivots)
            .map(|(row, &p)| {
                let lead = row[p].clone();
                row.into_iter().map(|x| Rat::new(x, lead.clone())).collect()
            })
            .collect();
        for i in (0..r).rev() {
            let p = pivots[i];
            for k in 0..i {
                let f = rows[k][p].clone();
                if f.is_zero() {
                    continue;
                }
                let (upper, lower) = rows.split_at_mut(i);
                let src = &lower[0];
                for j in p..self.cols {
                    if !src[j].is_zero() {
                        let d = &f * &src[j];
                        upper[k][j] -= d;
                    }
                }
            }
        }
        let mut rref = QMat::zeros(r, self.cols);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                rref.set(i, j, v);
            }
        }
        Echelon { rref, pivots }
    }

    pub fn rank(&self) -> usize {
        self.bareiss().1.len()
    }

    /// Null-space basis as columns, one per free column in ascending order.
    pub fn kernel(&self) -> QMat {
        let e = self.echelon();
        let free: Vec<usize> = (0..self.cols).filter(|c| !e.pivots.contains(c)).collect();
        let mut out = QMat::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out.set(f, k, Rat::one());
            for (i, &p) in e.pivots.iter().enumerate() {
                out.set(p, k, -e.rref.get(i, f).clone());
            }
        }
        out
    }

    /// Column-space basis: the pivot columns of `self`.
    pub fn image(&self) -> QMat {
        let (_, pivots, _) = self.bareiss();
        self.select_cols(&pivots)
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        if self.rows == 0 {
            return Rat::one();
        }
        let scale = (0..self.rows).fold(Rat::one(), |acc, i| {
            let l = self.row(i).iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
            acc * Rat::from_integer(l)
        });
        let (m, pivots, swaps) = self.bareiss();
        if pivots.len() < self.rows {
            return Rat::zero();
        }
        let d = Rat::from_integer(m[self.rows - 1][self.cols - 1].clone()) / scale;
        if swaps % 2 == 1 {
            -d
        } else {
            d
        }
    }

    pub fn inverse(&self) -> Option<QMat> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(QMat::zeros(0, 0));
        }
        let aug = QMat::hstack(&[self, &QMat::identity(n)]);
        let e = aug.echelon();
        if e.pivots.len() < n || e.pivots[n - 1] != n - 1 {
            return None;
        }
        Some(QMat::from_fn(n, n, |i, j| e.rref.get(i, n + j).clone()))
    }

    /// Some solution X of `self * X = b`, or None if inconsistent.
    pub fn solve(&self, b: &QMat) -> Option<QMat> {
        assert_eq!(self.rows, b.rows);
        let aug = QMat::hstack(&[self, b]);
        let e = aug.echelon();
        if e.pivots.iter().any(|&p| p >= self.cols) {
            return None;
        }
        let mut x = QMat::zeros(self.cols, b.cols);
        for (i, &p) in e.pivots.iter().enumerate() {
            for j in 0..b.cols {
                x.set(p, j, e.rref.get(i, self.cols + j).clone());
            }
        }
        Some(x)
    }

    /// A left inverse of a matrix with independent columns, supported on a
    /// set of pivot rows. Applying it to any vector of the column span gives
    /// that vector's coordinates.
    pub fn left_inverse(&self) -> Option<QMat> {
        let k = self.cols;
        let (_, prow, _) = self.transpose().bareiss();
        if prow.len() < k {
            return None;
        }
        let sq = self.select(&prow, &(0..k).collect::<Vec<_>>());
        let inv = sq.inverse()?;
        let mut out = QMat::zeros(k, self.rows);
        for i in 0..k {
            for (j, &r) in prow.iter().enumerate() {
                out.set(i, r, inv.get(i, j).clone());
            }
        }
        Some(out)
    }

    pub fn entries(&self) -> impl Iterator<Item = &Rat> {
        self.data.iter()
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    pub fn max_abs(&self) -> Rat {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(Rat::zero)
    }
}

impl fmt::Debug for QMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, "; ")?;
            }
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            write!(f, "{}", row.join(" "))?;
        }
        write!(f, "]")
    }
}
