use std::collections::VecDeque;
use std::sync::Arc;

use crate::{Error, Result};

/// A finite group on the indices `0..order()`.
///
/// Small groups carry a full multiplication table. Direct products are kept
/// structural (mixed radix, first factor most significant) so that the
/// large products arising from kernels on `Y × Y × Y` stay cheap.
#[derive(Debug)]
pub struct FinGroup {
    repr: GroupRepr,
    order: usize,
    identity: usize,
    gens: Vec<usize>,
}

#[derive(Debug)]
enum GroupRepr {
    Table { labels: Vec<String>, mul: Vec<u32>, inv: Vec<u32>, words: Vec<Vec<u16>> },
    Product { factors: Vec<Arc<FinGroup>>, strides: Vec<usize>, gen_offsets: Vec<usize> },
}

impl FinGroup {
    /// Build from labels and a full multiplication table `table[a][b] = a·b`.
    /// Associativity, identity and inverses are checked exhaustively.
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        let n = labels.len();
        let bad = |d: String| Err(Error::invalid("group", d));
        if n == 0 {
            return bad("empty carrier".into());
        }
        if table.len() != n || table.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return bad(format!("multiplication table must be {n}x{n} over the carrier"));
        }
        let Some(e) = (0..n).find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a)) else {
            return bad("no identity element".into());
        };
        let mut inv = vec![0u32; n];
        for a in 0..n {
            match (0..n).find(|&b| table[a][b] == e && table[b][a] == e) {
                Some(b) => inv[a] = b as u32,
                None => return bad(format!("{} has no inverse", labels[a])),
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return bad(format!(
                            "associativity fails at ({}, {}, {})",
                            labels[a], labels[b], labels[c]
                        ));
                    }
                }
            }
        }
        let mul: Vec<u32> = table.iter().flatten().map(|&v| v as u32).collect();
        Ok(Arc::new(Self::table_unchecked(labels, mul, inv, e)))
    }

    /// Build from a multiplication function on `0..n`, trusting the caller.
    pub(crate) fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> usize) -> Arc<Self> {
        let n = labels.len();
        let mul: Vec<u32> = (0..n * n).map(|k| f(k / n, k % n) as u32).collect();
        let e = (0..n).find(|&e| (0..n).all(|a| mul[e * n + a] as usize == a)).expect("identity");
        let inv = (0..n)
            .map(|a| (0..n).find(|&b| mul[a * n + b] as usize == e).expect("inverse") as u32)
            .collect();
        Arc::new(Self::table_unchecked(labels, mul, inv, e))
    }

    fn table_unchecked(labels: Vec<String>, mul: Vec<u32>, inv: Vec<u32>, e: usize) -> Self {
        let n = labels.len();
        // greedy canonical generators: smallest element outside the subgroup so far
        let mut gens = Vec::new();
        let mut inside = vec![false; n];
        inside[e] = true;
        let mut members = vec![e];
        for g in 0..n {
            if inside[g] {
                continue;
            }
            gens.push(g);
            let mut queue: VecDeque<usize> = members.iter().copied().collect();
            while let Some(a) = queue.pop_front() {
                for &s in &gens {
                    let b = mul[a * n + s] as usize;
                    if !inside[b] {
                        inside[b] = true;
                        members.push(b);
                        queue.push_back(b);
                    }
                }
            }
        }
        let mut words: Vec<Option<Vec<u16>>> = vec![None; n];
        words[e] = Some(Vec::new());
        let mut queue = VecDeque::from([e]);
        while let Some(a) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let b = mul[a * n + s] as usize;
                if words[b].is_none() {
                    let mut w = words[a].clone().unwrap();
                    w.push(i as u16);
                    words[b] = Some(w);
                    queue.push_back(b);
                }
            }
        }
        let words = words.into_iter().map(|w| w.expect("generators span")).collect();
        FinGroup { repr: GroupRepr::Table { labels, mul, inv, words }, order: n, identity: e, gens }
    }

    pub fn trivial() -> Arc<Self> {
        Self::from_fn(vec!["e".into()], |_, _| 0)
    }

    pub fn cyclic(n: usize) -> Arc<Self> {
        assert!(n > 0);
        Self::from_fn((0..n).map(|i| i.to_string()).collect(), move |a, b| (a + b) % n)
    }

    /// The symmetric group on `{1..n}`, elements in lexicographic order of
    /// one-line notation, labeled in cycle notation. Product is composition
    /// `(a·b)(i) = a(b(i))`.
    pub fn symmetric(n: usize) -> Arc<Self> {
        let perms = permutations(n);
        let labels = perms.iter().map(|p| cycle_label(p)).collect();
        let index = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        let table: Vec<usize> = (0..perms.len() * perms.len())
            .map(|k| {
                let (a, b) = (&perms[k / perms.len()], &perms[k % perms.len()]);
                let c: Vec<usize> = (0..n).map(|i| a[b[i]]).collect();
                index(&c)
            })
            .collect();
        let m = perms.len();
        Self::from_fn(labels, move |a, b| table[a * m + b])
    }

    /// Dihedral group of order `2n`: elements `r^k` then `s r^k`.
    pub fn dihedral(n: usize) -> Arc<Self> {
        let labels = (0..n).map(|k| format!("r{k}")).chain((0..n).map(|k| format!("sr{k}"))).collect();
        Self::from_fn(labels, move |a, b| {
            let (fa, ka) = (a / n, a % n);
            let (fb, kb) = (b / n, b % n);
            // s^fa r^ka s^fb r^kb = s^(fa+fb) r^(±ka + kb)
            let k = if fb == 1 { (n - ka + kb) % n } else { (ka + kb) % n };
            ((fa + fb) % 2) * n + k
        })
    }

    /// The quaternion group {±1, ±i, ±j, ±k}.
    pub fn quaternion() -> Arc<Self> {
        let names = ["1", "i", "j", "k"];
        let labels = [false, true]
            .iter()
            .flat_map(|&neg| names.iter().map(move |n| if neg { format!("-{n}") } else { n.to_string() }))
            .collect();
        // unit products with signs
        const T: [[(bool, usize); 4]; 4] = [
            [(false, 0), (false, 1), (false, 2), (false, 3)],
            [(false, 1), (true, 0), (false, 3), (true, 2)],
            [(false, 2), (true, 3), (true, 0), (false, 1)],
            [(false, 3), (false, 2), (true, 1), (true, 0)],
        ];
        Self::from_fn(labels, |a, b| {
            let (sa, ua) = (a >= 4, a % 4);
            let (sb, ub) = (b >= 4, b % 4);
            let (s, u) = T[ua][ub];
            if sa ^ sb ^ s {
                4 + u
            } else {
                u
            }
        })
    }

    pub fn product(factors: Vec<Arc<FinGroup>>) -> Arc<Self> {
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1].order;
        }
        let order = factors.iter().map(|f| f.order).product();
        let identity = factors.iter().zip(&strides).map(|(f, s)| f.identity * s).sum();
        let mut gens = Vec::new();
        let mut gen_offsets = Vec::new();
        for (i, f) in factors.iter().enumerate() {
            gen_offsets.push(gens.len());
            for &s in &f.gens {
                gens.push(identity - f.identity * strides[i] + s * strides[i]);
            }
        }
        Arc::new(FinGroup { repr: GroupRepr::Product { factors, strides, gen_offsets }, order, identity, gens })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Canonical generators, as element indices.
    pub fn gens(&self) -> &[usize] {
        &self.gens
    }

    pub fn factors(&self) -> Option<&[Arc<FinGroup>]> {
        match &self.repr {
            GroupRepr::Product { factors, .. } => Some(factors),
            GroupRepr::Table { .. } => None,
        }
    }

    pub fn split(&self, g: usize) -> Vec<usize> {
        match &self.repr {
            GroupRepr::Product { factors, strides, .. } => {
                factors.iter().zip(strides).map(|(f, s)| (g / s) % f.order).collect()
            }
            GroupRepr::Table { .. } => vec![g],
        }
    }

    pub fn join(&self, parts: &[usize]) -> usize {
        match &self.repr {
            GroupRepr::Product { strides, .. } => parts.iter().zip(strides).map(|(p, s)| p * s).sum(),
            GroupRepr::Table { .. } => parts[0],
        }
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        match &self.repr {
            GroupRepr::Table { mul, .. } => mul[a * self.order + b] as usize,
            GroupRepr::Product { factors, strides, .. } => factors
                .iter()
                .zip(strides)
                .map(|(f, s)| f.mul((a / s) % f.order, (b / s) % f.order) * s)
                .sum(),
        }
    }

    pub fn inv(&self, a: usize) -> usize {
        match &self.repr {
            GroupRepr::Table { inv, .. } => inv[a] as usize,
            GroupRepr::Product { factors, strides, .. } => {
                factors.iter().zip(strides).map(|(f, s)| f.inv((a / s) % f.order) * s).sum()
            }
        }
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        (0..k).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// A word in the canonical generators (indices into `gens()`) whose
    /// left-to-right product is `g`.
    pub fn word(&self, g: usize) -> Vec<usize> {
        match &self.repr {
            GroupRepr::Table { words, .. } => words[g].iter().map(|&i| i as usize).collect(),
            GroupRepr::Product { factors, strides, gen_offsets } => {
                let mut w = Vec::new();
                for ((f, s), off) in factors.iter().zip(strides).zip(gen_offsets) {
                    w.extend(f.word((g / s) % f.order).into_iter().map(|i| i + off));
                }
                w
            }
        }
    }

    pub fn label(&self, g: usize) -> String {
        match &self.repr {
            GroupRepr::Table { labels, .. } => labels[g].clone(),
            GroupRepr::Product { factors, strides, .. } => {
                let parts: Vec<String> = factors.iter().zip(strides).map(|(f, s)| f.label((g / s) % f.order)).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.elements().find(|&g| self.label(g) == label)
    }

    /// Structural equality of presentations.
    pub fn same_as(&self, other: &FinGroup) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        match (&self.repr, &other.repr) {
            (GroupRepr::Table { labels: l1, mul: m1, .. }, GroupRepr::Table { labels: l2, mul: m2, .. }) => {
                l1 == l2 && m1 == m2
            }
            (GroupRepr::Product { factors: f1, .. }, GroupRepr::Product { factors: f2, .. }) => {
                f1.len() == f2.len() && f1.iter().zip(f2).all(|(a, b)| a.same_as(b))
            }
            _ => false,
        }
    }

    /// The subgroup generated by `gens`, as a membership mask.
    pub fn generated(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order];
        inside[self.identity] = true;
        let mut queue = VecDeque::from([self.identity]);
        while let Some(a) = queue.pop_front() {
            for &s in gens {
                let b = self.mul(a, s);
                if !inside[b] {
                    inside[b] = true;
                    queue.push_back(b);
                }
            }
        }
        inside
    }

    /// Conjugacy classes by brute force, ordered by least member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order];
        let mut out = Vec::new();
        for a in self.elements() {
            if seen[a] {
                continue;
            }
            let mut class: Vec<usize> = self.elements().map(|h| self.mul(self.mul(h, a), self.inv(h))).collect();
            class.sort_unstable();
            class.dedup();
            for &c in &class {
                seen[c] = true;
            }
            out.push(class);
        }
        out
    }
}

pub(crate) fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn cycle_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut s = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            continue;
        }
        let mut cyc = vec![start + 1];
        seen[start] = true;
        let mut i = p[start];
        while i != start {
            seen[i] = true;
            cyc.push(i + 1);
            i = p[i];
        }
        let parts: Vec<String> = cyc.iter().map(|c| c.to_string()).collect();
        s.push_str(&format!("({})", parts.join(" ")));
    }
    if s.is_empty() {
        "e".into()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_laws(g: &FinGroup) {
        let e = g.identity();
        for a in g.elements() {
            assert_eq!(g.mul(a, e), a);
            assert_eq!(g.mul(a, g.inv(a)), e);
            for b in g.elements() {
                for c in g.elements() {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
            let w = g.word(a);
            let prod = w.iter().fold(e, |acc, &i| g.mul(acc, g.gens()[i]));
            assert_eq!(prod, a, "word for {}", g.label(a));
        }
    }

    #[test]
    fn standard_groups_satisfy_laws() {
        for g in [
            FinGroup::trivial(),
            FinGroup::cyclic(5),
            FinGroup::symmetric(3),
            FinGroup::dihedral(4),
            FinGroup::quaternion(),
            FinGroup::product(vec![FinGroup::cyclic(2), FinGroup::symmetric(3)]),
        ] {
            check_laws(&g);
        }
    }

    #[test]
    fn class_counts() {
        assert_eq!(FinGroup::symmetric(3).conjugacy_classes().len(), 3);
        assert_eq!(FinGroup::dihedral(4).conjugacy_classes().len(), 5);
        assert_eq!(FinGroup::quaternion().conjugacy_classes().len(), 5);
        assert_eq!(FinGroup::cyclic(6).conjugacy_classes().len(), 6);
    }

    #[test]
    fn symmetric_labels() {
        let s3 = FinGroup::symmetric(3);
        assert_eq!(s3.label(s3.identity()), "e");
        assert!(s3.find("(1 2 3)").is_some());
        assert!(s3.find("(1 2)").is_some());
    }

    #[test]
    fn rejects_non_group_tables() {
        let labels = vec!["a".to_string(), "b".to_string()];
        assert!(FinGroup::from_table(labels.clone(), vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FinGroup::from_table(labels, vec![vec![0, 1], vec![1, 0]]).is_ok());
    }
}
