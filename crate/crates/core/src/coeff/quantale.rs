//! Finite commutative quantales, stored as precomputed operation tables.

use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuantaleKind {
    Boolean,
    /// Carrier `{0, ..., cap, inf}`; element index `cap + 1` is infinity.
    Tropical { cap: u32 },
    Lattice,
}

/// A finite commutative quantale. Elements are indices `0..size()`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quantale {
    kind: QuantaleKind,
    labels: Vec<String>,
    join: Vec<u16>,
    meet: Vec<u16>,
    tensor: Vec<u16>,
    le: Vec<bool>,
    resid: Vec<u16>,
    unit: u16,
    bottom: u16,
    top: u16,
}

impl Quantale {
    pub fn boolean() -> Self {
        let labels = vec!["0".to_string(), "1".to_string()];
        Self::from_tables(QuantaleKind::Boolean, labels, |a, b| a | b, |a, b| a & b, 1)
            .expect("boolean quantale tables are valid")
    }

    pub fn tropical(cap: u32) -> Self {
        let inf = (cap + 1) as u16;
        let mut labels: Vec<String> = (0..=cap).map(|i| i.to_string()).collect();
        labels.push("inf".to_string());
        let join = move |a: u16, b: u16| a.min(b);
        let tensor = move |a: u16, b: u16| {
            if a == inf || b == inf {
                inf
            } else {
                (a + b).min(cap as u16)
            }
        };
        Self::from_tables(QuantaleKind::Tropical { cap }, labels, join, tensor, 0)
            .expect("tropical quantale tables are valid")
    }

    /// Build from a join table and a tensor table. Validates that the join
    /// makes a lattice with a bottom, and that the tensor is commutative,
    /// associative, unital and distributes over binary joins and bottom.
    pub fn lattice(labels: Vec<String>, join: &[Vec<u16>], tensor: &[Vec<u16>], unit: u16) -> Result<Self> {
        let n = labels.len();
        let shape_ok = join.len() == n
            && tensor.len() == n
            && join.iter().chain(tensor).all(|r| r.len() == n && r.iter().all(|&v| (v as usize) < n));
        if !shape_ok || (unit as usize) >= n {
            return Err(Error::invalid("quantale", "tables must be square over the carrier"));
        }
        Self::from_tables(
            QuantaleKind::Lattice,
            labels,
            |a, b| join[a as usize][b as usize],
            |a, b| tensor[a as usize][b as usize],
            unit,
        )
    }

    fn from_tables(
        kind: QuantaleKind,
        labels: Vec<String>,
        join: impl Fn(u16, u16) -> u16,
        tensor: impl Fn(u16, u16) -> u16,
        unit: u16,
    ) -> Result<Self> {
        let n = labels.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::invalid("quantale", "carrier must be nonempty"));
        }
        let idx = |a: usize, b: usize| a * n + b;
        let all = || (0..n as u16).flat_map(move |a| (0..n as u16).map(move |b| (a, b)));
        let mut jt = vec![0u16; n * n];
        let mut tt = vec![0u16; n * n];
        for (a, b) in all() {
            jt[idx(a as usize, b as usize)] = join(a, b);
            tt[idx(a as usize, b as usize)] = tensor(a, b);
        }
        let bad = |d: String| Err(Error::invalid("quantale", d));
        for (a, b) in all() {
            let (ai, bi) = (a as usize, b as usize);
            if jt[idx(ai, bi)] != jt[idx(bi, ai)] {
                return bad(format!("join not commutative at ({}, {})", labels[ai], labels[bi]));
            }
            if jt[idx(ai, ai)] != a {
                return bad(format!("join not idempotent at {}", labels[ai]));
            }
            if tt[idx(ai, bi)] != tt[idx(bi, ai)] {
                return bad(format!("tensor not commutative at ({}, {})", labels[ai], labels[bi]));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if jt[idx(jt[idx(a, b)] as usize, c)] != jt[idx(a, jt[idx(b, c)] as usize)] {
                        return bad("join not associative".into());
                    }
                    if tt[idx(tt[idx(a, b)] as usize, c)] != tt[idx(a, tt[idx(b, c)] as usize)] {
                        return bad("tensor not associative".into());
                    }
                    if tt[idx(a, jt[idx(b, c)] as usize)] != jt[idx(tt[idx(a, b)] as usize, tt[idx(a, c)] as usize)] {
                        return bad(format!("tensor does not distribute over join at ({}, {}, {})", labels[a], labels[b], labels[c]));
                    }
                }
            }
        }
        let le: Vec<bool> = (0..n * n).map(|k| jt[idx(k / n, k % n)] as usize == k % n).collect();
        let bottom = (0..n).find(|&b| (0..n).all(|x| le[idx(b, x)]));
        let top = (0..n).find(|&t| (0..n).all(|x| le[idx(x, t)]));
        let (Some(bottom), Some(top)) = (bottom, top) else {
            return bad("no bottom or top element".into());
        };
        for a in 0..n {
            if tt[idx(a, unit as usize)] as usize != a {
                return bad(format!("{} is not a unit", labels[unit as usize]));
            }
            if tt[idx(a, bottom)] as usize != bottom {
                return bad("tensor does not preserve the empty join".into());
            }
        }
        let mut meet = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<usize> = (0..n).filter(|&x| le[idx(x, a)] && le[idx(x, b)]).collect();
                let m = lower.iter().fold(bottom, |acc, &x| jt[idx(acc, x)] as usize);
                if !(le[idx(m, a)] && le[idx(m, b)]) {
                    return bad("meets do not exist".into());
                }
                meet[idx(a, b)] = m as u16;
            }
        }
        let mut resid = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                let r = (0..n)
                    .filter(|&x| le[idx(tt[idx(x, a)] as usize, b)])
                    .fold(bottom, |acc, x| jt[idx(acc, x)] as usize);
                resid[idx(a, b)] = r as u16;
            }
        }
        Ok(Quantale {
            kind,
            labels,
            join: jt,
            meet,
            tensor: tt,
            le,
            resid,
            unit,
            bottom: bottom as u16,
            top: top as u16,
        })
    }

    pub fn kind(&self) -> &QuantaleKind {
        &self.kind
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> impl Iterator<Item = u16> {
        0..self.size() as u16
    }

    pub fn label(&self, a: u16) -> &str {
        &self.labels[a as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn parse(&self, s: &str) -> Option<u16> {
        let s = s.trim();
        let s = match (&self.kind, s) {
            (QuantaleKind::Tropical { .. }, "∞") | (QuantaleKind::Tropical { .. }, "infinity") => "inf",
            (QuantaleKind::Boolean, "true") => "1",
            (QuantaleKind::Boolean, "false") => "0",
            _ => s,
        };
        self.labels.iter().position(|l| l == s).map(|i| i as u16)
    }

    #[inline]
    fn ix(&self, a: u16, b: u16) -> usize {
        a as usize * self.size() + b as usize
    }

    #[inline]
    pub fn join(&self, a: u16, b: u16) -> u16 {
        self.join[self.ix(a, b)]
    }

    #[inline]
    pub fn meet(&self, a: u16, b: u16) -> u16 {
        self.meet[self.ix(a, b)]
    }

    #[inline]
    pub fn tensor(&self, a: u16, b: u16) -> u16 {
        self.tensor[self.ix(a, b)]
    }

    #[inline]
    pub fn le(&self, a: u16, b: u16) -> bool {
        self.le[self.ix(a, b)]
    }

    /// Largest `x` with `x ⊗ a ≤ b`.
    #[inline]
    pub fn residuate(&self, a: u16, b: u16) -> u16 {
        self.resid[self.ix(a, b)]
    }

    pub fn unit(&self) -> u16 {
        self.unit
    }

    pub fn bottom(&self) -> u16 {
        self.bottom
    }

    pub fn top(&self) -> u16 {
        self.top
    }

    pub fn join_all(&self, it: impl IntoIterator<Item = u16>) -> u16 {
        it.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, it: impl IntoIterator<Item = u16>) -> u16 {
        it.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    pub fn tensor_all(&self, it: impl IntoIterator<Item = u16>) -> u16 {
        it.into_iter().fold(self.unit, |acc, x| self.tensor(acc, x))
    }

    pub fn is_invertible(&self, a: u16) -> bool {
        self.elements().any(|b| self.tensor(a, b) == self.unit)
    }

    /// The closed form for tropical carriers; other kinds use the table.
    pub fn tropical_residuate(cap: u32, a: u16, b: u16) -> u16 {
        let inf = (cap + 1) as u16;
        if a == inf || b == 0 {
            0
        } else if b == inf {
            inf
        } else {
            b.saturating_sub(a)
        }
    }
}
