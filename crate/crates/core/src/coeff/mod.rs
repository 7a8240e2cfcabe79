//! Exact coefficient systems and labeled matrices over them.

mod qmat;
mod quantale;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use qmat::{parse_rat, rat, rat_string, ratio, Echelon, QMat, Rat};
pub use quantale::{Quantale, QuantaleKind};

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffSystem {
    Rational,
    Integer,
    Natural,
    Quantale(Arc<Quantale>),
}

/// A single coefficient. The variant always matches the system it came from.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coeff {
    Rat(Rat),
    Int(BigInt),
    Nat(BigUint),
    Q(u16),
}

impl CoeffSystem {
    pub fn boolean() -> Self {
        CoeffSystem::Quantale(Arc::new(Quantale::boolean()))
    }

    pub fn tropical(cap: u32) -> Self {
        CoeffSystem::Quantale(Arc::new(Quantale::tropical(cap)))
    }

    pub fn name(&self) -> String {
        match self {
            CoeffSystem::Rational => "rational".into(),
            CoeffSystem::Integer => "integer".into(),
            CoeffSystem::Natural => "natural".into(),
            CoeffSystem::Quantale(q) => match q.kind() {
                QuantaleKind::Boolean => "boolean".into(),
                QuantaleKind::Tropical { cap } => format!("tropical({cap})"),
                QuantaleKind::Lattice => format!("lattice({})", q.size()),
            },
        }
    }

    pub fn quantale(&self) -> Result<&Arc<Quantale>> {
        match self {
            CoeffSystem::Quantale(q) => Ok(q),
            other => Err(Error::UnsupportedCoeff(format!("{} is not a quantale", other.name()))),
        }
    }

    pub fn zero(&self) -> Coeff {
        match self {
            CoeffSystem::Rational => Coeff::Rat(Rat::zero()),
            CoeffSystem::Integer => Coeff::Int(BigInt::zero()),
            CoeffSystem::Natural => Coeff::Nat(BigUint::zero()),
            CoeffSystem::Quantale(q) => Coeff::Q(q.bottom()),
        }
    }

    pub fn one(&self) -> Coeff {
        match self {
            CoeffSystem::Rational => Coeff::Rat(Rat::one()),
            CoeffSystem::Integer => Coeff::Int(BigInt::one()),
            CoeffSystem::Natural => Coeff::Nat(BigUint::one()),
            CoeffSystem::Quantale(q) => Coeff::Q(q.unit()),
        }
    }

    /// `n · 1`, the image of a natural number.
    pub fn from_count(&self, n: u64) -> Coeff {
        match self {
            CoeffSystem::Rational => Coeff::Rat(Rat::from_integer(n.into())),
            CoeffSystem::Integer => Coeff::Int(n.into()),
            CoeffSystem::Natural => Coeff::Nat(n.into()),
            CoeffSystem::Quantale(q) => Coeff::Q(if n == 0 { q.bottom() } else { q.unit() }),
        }
    }

    pub fn contains(&self, a: &Coeff) -> bool {
        matches!(
            (self, a),
            (CoeffSystem::Rational, Coeff::Rat(_))
                | (CoeffSystem::Integer, Coeff::Int(_))
                | (CoeffSystem::Natural, Coeff::Nat(_))
        ) || matches!((self, a), (CoeffSystem::Quantale(q), Coeff::Q(x)) if (*x as usize) < q.size())
    }

    fn mismatch(&self, a: &Coeff) -> Error {
        Error::UnsupportedCoeff(format!("value {a:?} does not belong to {}", self.name()))
    }

    pub fn add(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(match (self, a, b) {
            (CoeffSystem::Rational, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x + y),
            (CoeffSystem::Integer, Coeff::Int(x), Coeff::Int(y)) => Coeff::Int(x + y),
            (CoeffSystem::Natural, Coeff::Nat(x), Coeff::Nat(y)) => Coeff::Nat(x + y),
            (CoeffSystem::Quantale(q), Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(q.join(*x, *y)),
            _ => return Err(self.mismatch(if self.contains(a) { b } else { a })),
        })
    }

    pub fn mul(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        Ok(match (self, a, b) {
            (CoeffSystem::Rational, Coeff::Rat(x), Coeff::Rat(y)) => Coeff::Rat(x * y),
            (CoeffSystem::Integer, Coeff::Int(x), Coeff::Int(y)) => Coeff::Int(x * y),
            (CoeffSystem::Natural, Coeff::Nat(x), Coeff::Nat(y)) => Coeff::Nat(x * y),
            (CoeffSystem::Quantale(q), Coeff::Q(x), Coeff::Q(y)) => Coeff::Q(q.tensor(*x, *y)),
            _ => return Err(self.mismatch(if self.contains(a) { b } else { a })),
        })
    }

    pub fn neg(&self, a: &Coeff) -> Result<Coeff> {
        match (self, a) {
            (CoeffSystem::Rational, Coeff::Rat(x)) => Ok(Coeff::Rat(-x)),
            (CoeffSystem::Integer, Coeff::Int(x)) => Ok(Coeff::Int(-x)),
            _ => Err(Error::UnsupportedCoeff(format!("{} has no additive inverses", self.name()))),
        }
    }

    /// Multiplicative inverse, when it exists.
    pub fn inverse(&self, a: &Coeff) -> Option<Coeff> {
        match (self, a) {
            (CoeffSystem::Rational, Coeff::Rat(x)) if !x.is_zero() => Some(Coeff::Rat(x.recip())),
            (CoeffSystem::Integer, Coeff::Int(x)) if x.abs().is_one() => Some(Coeff::Int(x.clone())),
            (CoeffSystem::Natural, Coeff::Nat(x)) if x.is_one() => Some(Coeff::Nat(x.clone())),
            (CoeffSystem::Quantale(q), Coeff::Q(x)) => {
                q.elements().find(|&y| q.tensor(*x, y) == q.unit()).map(Coeff::Q)
            }
            _ => None,
        }
    }

    pub fn is_unit(&self, a: &Coeff) -> bool {
        self.inverse(a).is_some()
    }

    pub fn is_zero(&self, a: &Coeff) -> bool {
        *a == self.zero()
    }

    pub fn le(&self, a: &Coeff, b: &Coeff) -> Result<bool> {
        match (self, a, b) {
            (CoeffSystem::Quantale(q), Coeff::Q(x), Coeff::Q(y)) => Ok(q.le(*x, *y)),
            _ => Err(Error::UnsupportedCoeff(format!("{} is not ordered as a quantale", self.name()))),
        }
    }

    /// Largest `x` with `x ⊗ a ≤ b`.
    pub fn residuate(&self, a: &Coeff, b: &Coeff) -> Result<Coeff> {
        let q = self.quantale()?;
        match (a, b) {
            (Coeff::Q(x), Coeff::Q(y)) if self.contains(a) && self.contains(b) => Ok(Coeff::Q(q.residuate(*x, *y))),
            _ => Err(self.mismatch(a)),
        }
    }

    pub fn parse(&self, s: &str) -> Result<Coeff> {
        let err = || Error::invalid("coefficient", format!("cannot read {s:?} as {}", self.name()));
        match self {
            CoeffSystem::Rational => parse_rat(s).map(Coeff::Rat).ok_or_else(err),
            CoeffSystem::Integer => s.trim().parse().map(Coeff::Int).map_err(|_| err()),
            CoeffSystem::Natural => s.trim().parse().map(Coeff::Nat).map_err(|_| err()),
            CoeffSystem::Quantale(q) => q.parse(s).map(Coeff::Q).ok_or_else(err),
        }
    }

    pub fn render(&self, a: &Coeff) -> String {
        match (self, a) {
            (_, Coeff::Rat(x)) => rat_string(x),
            (_, Coeff::Int(x)) => x.to_string(),
            (_, Coeff::Nat(x)) => x.to_string(),
            (CoeffSystem::Quantale(q), Coeff::Q(x)) => q.label(*x).to_string(),
            (_, Coeff::Q(x)) => x.to_string(),
        }
    }

    /// Every element, for finite carriers.
    pub fn finite_elements(&self) -> Option<Vec<Coeff>> {
        match self {
            CoeffSystem::Quantale(q) => Some(q.elements().map(Coeff::Q).collect()),
            _ => None,
        }
    }
}

impl fmt::Display for CoeffSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl Coeff {
    pub fn as_rat(&self) -> Option<&Rat> {
        match self {
            Coeff::Rat(r) => Some(r),
            _ => None,
        }
    }

    pub fn as_q(&self) -> Option<u16> {
        match self {
            Coeff::Q(x) => Some(*x),
            _ => None,
        }
    }
}

/// A matrix with labeled rows and columns over a coefficient system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Matrix {
    system: CoeffSystem,
    rows: Vec<String>,
    cols: Vec<String>,
    entries: Vec<Coeff>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSolve {
    pub rank: usize,
    /// Null-space basis vectors, indexed like the columns.
    pub kernel: Vec<Vec<Rat>>,
    /// Column-space basis vectors, indexed like the rows.
    pub image: Vec<Vec<Rat>>,
}

impl Matrix {
    pub fn new(system: CoeffSystem, rows: Vec<String>, cols: Vec<String>, entries: Vec<Coeff>) -> Result<Self> {
        if entries.len() != rows.len() * cols.len() {
            return Err(Error::invalid(
                "matrix",
                format!("{} entries for a {}x{} matrix", entries.len(), rows.len(), cols.len()),
            ));
        }
        if let Some(bad) = entries.iter().find(|e| !system.contains(e)) {
            return Err(system.mismatch(bad));
        }
        Ok(Matrix { system, rows, cols, entries })
    }

    pub fn from_fn(
        system: CoeffSystem,
        rows: Vec<String>,
        cols: Vec<String>,
        mut f: impl FnMut(usize, usize) -> Coeff,
    ) -> Result<Self> {
        let mut entries = Vec::with_capacity(rows.len() * cols.len());
        for i in 0..rows.len() {
            for j in 0..cols.len() {
                entries.push(f(i, j));
            }
        }
        Self::new(system, rows, cols, entries)
    }

    pub fn identity(system: CoeffSystem, labels: Vec<String>) -> Self {
        let (one, zero) = (system.one(), system.zero());
        let n = labels.len();
        let entries = (0..n * n).map(|k| if k / n == k % n { one.clone() } else { zero.clone() }).collect();
        Matrix { system, rows: labels.clone(), cols: labels, entries }
    }

    pub fn from_qmat(m: &QMat, rows: Vec<String>, cols: Vec<String>) -> Result<Self> {
        Self::new(CoeffSystem::Rational, rows, cols, m.entries().cloned().map(Coeff::Rat).collect())
    }

    pub fn system(&self) -> &CoeffSystem {
        &self.system
    }

    pub fn row_labels(&self) -> &[String] {
        &self.rows
    }

    pub fn col_labels(&self) -> &[String] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Coeff {
        &self.entries[i * self.cols.len() + j]
    }

    pub fn to_qmat(&self) -> Result<QMat> {
        if self.system != CoeffSystem::Rational {
            return Err(Error::UnsupportedCoeff(format!("expected rational, found {}", self.system.name())));
        }
        Ok(QMat::from_fn(self.rows.len(), self.cols.len(), |i, j| {
            self.get(i, j).as_rat().cloned().expect("validated rational entry")
        }))
    }

    /// Semiring product. Column labels of `self` must equal row labels of `other`.
    pub fn mat_mul(&self, other: &Matrix) -> Result<Matrix> {
        if self.system != other.system {
            return Err(Error::UnsupportedCoeff(format!(
                "cannot multiply {} by {}",
                self.system.name(),
                other.system.name()
            )));
        }
        if self.cols != other.rows {
            return Err(Error::LabelMismatch(format!("columns {:?} vs rows {:?}", self.cols, other.rows)));
        }
        let s = &self.system;
        Matrix::from_fn(s.clone(), self.rows.clone(), other.cols.clone(), |i, j| {
            (0..self.cols.len()).fold(s.zero(), |acc, k| {
                let p = s.mul(self.get(i, k), other.get(k, j)).expect("validated entries");
                s.add(&acc, &p).expect("validated entries")
            })
        })
    }

    /// Exact rank, null space and column space over the rationals. Columns
    /// are processed in ascending label order, so pivots come out in that order.
    pub fn q_linear_solve(&self) -> Result<LinearSolve> {
        let m = self.to_qmat()?;
        let mut order: Vec<usize> = (0..self.cols.len()).collect();
        order.sort_by(|&a, &b| self.cols[a].cmp(&self.cols[b]).then(a.cmp(&b)));
        let permuted = m.select_cols(&order);
        let e = permuted.echelon();
        let ker = permuted.kernel();
        let kernel = (0..ker.cols())
            .map(|k| {
                let mut v = vec![Rat::zero(); self.cols.len()];
                for (pos, &orig) in order.iter().enumerate() {
                    v[orig] = ker.get(pos, k).clone();
                }
                v
            })
            .collect();
        let image = e.pivots.iter().map(|&p| permuted.col(p)).collect();
        Ok(LinearSolve { rank: e.pivots.len(), kernel, image })
    }

    /// Invertibility over the active coefficients: full rank over the
    /// rationals, determinant ±1 over the integers, a monomial matrix with
    /// unit entries over the naturals, and a residual inverse for quantales.
    pub fn is_invertible(&self) -> bool {
        let n = self.rows.len();
        if n != self.cols.len() {
            return false;
        }
        match &self.system {
            CoeffSystem::Rational => self.to_qmat().map(|m| m.rank() == n).unwrap_or(false),
            CoeffSystem::Integer => {
                let m = QMat::from_fn(n, n, |i, j| match self.get(i, j) {
                    Coeff::Int(x) => Rat::from_integer(x.clone()),
                    _ => unreachable!("validated integer entry"),
                });
                m.det().abs().is_one()
            }
            CoeffSystem::Natural => {
                let row_ok = (0..n).all(|i| {
                    let nz: Vec<usize> = (0..n).filter(|&j| !self.system.is_zero(self.get(i, j))).collect();
                    nz.len() == 1 && self.system.is_unit(self.get(i, nz[0]))
                });
                let col_ok = (0..n).all(|j| (0..n).filter(|&i| !self.system.is_zero(self.get(i, j))).count() == 1);
                row_ok && col_ok
            }
            CoeffSystem::Quantale(q) => {
                let a = |i: usize, j: usize| self.get(i, j).as_q().expect("validated quantale entry");
                // the only candidate inverse is the largest X with A X ≤ I
                let x: Vec<u16> = (0..n * n)
                    .map(|k| {
                        let (r, c) = (k / n, k % n);
                        q.meet_all((0..n).map(|i| {
                            let target = if i == c { q.unit() } else { q.bottom() };
                            q.residuate(a(i, r), target)
                        }))
                    })
                    .collect();
                let prod_is_id = |f: &dyn Fn(usize, usize) -> u16, g: &dyn Fn(usize, usize) -> u16| {
                    (0..n).all(|i| {
                        (0..n).all(|j| {
                            let v = q.join_all((0..n).map(|k| q.tensor(f(i, k), g(k, j))));
                            v == if i == j { q.unit() } else { q.bottom() }
                        })
                    })
                };
                let xf = |i: usize, j: usize| x[i * n + j];
                prod_is_id(&a, &xf) && prod_is_id(&xf, &a)
            }
        }
    }

    pub fn render_rows(&self) -> Vec<Vec<String>> {
        (0..self.rows.len())
            .map(|i| (0..self.cols.len()).map(|j| self.system.render(self.get(i, j))).collect())
            .collect()
    }

    /// Diagonal entries as `u64`, where that makes sense (used in reports).
    pub fn diagonal_counts(&self) -> Vec<Option<u64>> {
        (0..self.rows.len().min(self.cols.len()))
            .map(|i| match self.get(i, i) {
                Coeff::Rat(r) if r.is_integer() => r.to_integer().to_u64(),
                Coeff::Int(x) => x.to_u64(),
                Coeff::Nat(x) => x.to_u64(),
                _ => None,
            })
            .collect()
    }
}
