//! Categories enriched in a finite commutative quantale, their presheaf
//! modules, and weighted (co)limits in finite modules.
//!
//! Over a quantale every coherence condition is an inequality, so all the
//! laws below are checked exhaustively.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coeff::Quantale;
use crate::{Error, Result};

/// Objects `0..n` with `hom[a][b] ∈ A`, satisfying `1 ≤ Hom(a,a)` and
/// `Hom(b,c) ⊗ Hom(a,b) ≤ Hom(a,c)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnrichedCat {
    q: Arc<Quantale>,
    labels: Vec<String>,
    hom: Vec<u16>,
}

impl EnrichedCat {
    pub fn new(q: Arc<Quantale>, labels: Vec<String>, hom: Vec<Vec<u16>>) -> Result<Self> {
        let n = labels.len();
        if hom.len() != n || hom.iter().any(|r| r.len() != n || r.iter().any(|&v| v as usize >= q.size())) {
            return Err(Error::invalid("enriched category", format!("hom table must be {n}x{n} over the quantale")));
        }
        let cat = EnrichedCat { q, labels, hom: hom.concat() };
        cat.check()?;
        Ok(cat)
    }

    fn check(&self) -> Result<()> {
        let q = &self.q;
        for a in self.objects() {
            if !q.le(q.unit(), self.hom(a, a)) {
                return Err(Error::Law(format!(
                    "unit: 1 ≰ Hom({0},{0}) = {1}",
                    self.labels[a],
                    q.label(self.hom(a, a))
                )));
            }
        }
        for a in self.objects() {
            for b in self.objects() {
                for c in self.objects() {
                    let comp = q.tensor(self.hom(b, c), self.hom(a, b));
                    if !q.le(comp, self.hom(a, c)) {
                        return Err(Error::Law(format!(
                            "composition at ({},{},{}): Hom(b,c)⊗Hom(a,b) = {} ≰ Hom(a,c) = {}",
                            self.labels[a],
                            self.labels[b],
                            self.labels[c],
                            q.label(comp),
                            q.label(self.hom(a, c))
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// One object with `Hom = 1`.
    pub fn unit_category(q: Arc<Quantale>) -> Self {
        let u = q.unit();
        EnrichedCat { q, labels: vec!["*".into()], hom: vec![u] }
    }

    /// Objects with `Hom = 1` on the diagonal and bottom elsewhere.
    pub fn discrete(q: Arc<Quantale>, n: usize) -> Self {
        let hom = (0..n * n).map(|k| if k / n == k % n { q.unit() } else { q.bottom() }).collect();
        EnrichedCat { q, labels: (0..n).map(|i| format!("c{i}")).collect(), hom }
    }

    /// The least category whose homs lie above the given table: diagonal
    /// raised to the unit, then closed under composition.
    pub fn closure(q: Arc<Quantale>, labels: Vec<String>, mut hom: Vec<Vec<u16>>) -> Result<Self> {
        let n = labels.len();
        for (a, row) in hom.iter_mut().enumerate() {
            row[a] = q.join(row[a], q.unit());
        }
        loop {
            let mut changed = false;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let v = q.join(hom[a][c], q.tensor(hom[b][c], hom[a][b]));
                        if v != hom[a][c] {
                            hom[a][c] = v;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        Self::new(q, labels, hom)
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn objects(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    #[inline]
    pub fn hom(&self, a: usize, b: usize) -> u16 {
        self.hom[a * self.size() + b]
    }

    pub fn hom_table(&self) -> Vec<Vec<u16>> {
        self.hom.chunks(self.size().max(1)).map(|r| r.to_vec()).take(self.size()).collect()
    }

    /// `Hom^op(a, b) = Hom(b, a)`; fine because the quantale is commutative.
    pub fn opposite(&self) -> Self {
        let n = self.size();
        let hom = (0..n * n).map(|k| self.hom(k % n, k / n)).collect();
        EnrichedCat { q: self.q.clone(), labels: self.labels.clone(), hom }
    }

    /// The full subcategory on `objects`, in the given order.
    pub fn full_subcategory(&self, objects: &[usize]) -> Self {
        let hom = objects.iter().flat_map(|&a| objects.iter().map(move |&b| (a, b))).map(|(a, b)| self.hom(a, b)).collect();
        EnrichedCat { q: self.q.clone(), labels: objects.iter().map(|&o| self.labels[o].clone()).collect(), hom }
    }

    /// `s ≼ t` iff `1 ≤ Hom(s, t)`.
    pub fn underlying_preorder(&self) -> Vec<Vec<bool>> {
        let q = &self.q;
        self.objects().map(|a| self.objects().map(|b| q.le(q.unit(), self.hom(a, b))).collect()).collect()
    }
}

/// `A` enriched in itself: `Hom(a, b) = a ⊸ b`.
pub fn self_enrichment(q: &Arc<Quantale>) -> EnrichedCat {
    let n = q.size();
    let hom = (0..n * n).map(|k| q.residuate(k as u16 / n as u16, (k % n) as u16)).collect();
    EnrichedCat { q: q.clone(), labels: q.labels().to_vec(), hom }
}

/// A monotone map of quantales with `F(a) ⊗ F(b) ≤ F(a ⊗ b)` and `1 ≤ F(1)`.
#[derive(Clone, Debug)]
pub struct LaxMap {
    pub src: Arc<Quantale>,
    pub tgt: Arc<Quantale>,
    table: Vec<u16>,
}

impl LaxMap {
    pub fn new(src: Arc<Quantale>, tgt: Arc<Quantale>, table: Vec<u16>) -> Result<Self> {
        if table.len() != src.size() || table.iter().any(|&v| v as usize >= tgt.size()) {
            return Err(Error::invalid("lax map", "one target value per source element"));
        }
        let m = LaxMap { src, tgt, table };
        m.check()?;
        Ok(m)
    }

    pub fn from_fn(src: &Arc<Quantale>, tgt: &Arc<Quantale>, f: impl Fn(u16) -> u16) -> Result<Self> {
        Self::new(src.clone(), tgt.clone(), src.elements().map(f).collect())
    }

    pub fn identity(q: &Arc<Quantale>) -> Self {
        LaxMap { src: q.clone(), tgt: q.clone(), table: q.elements().collect() }
    }

    fn check(&self) -> Result<()> {
        let (s, t) = (&self.src, &self.tgt);
        let bad = |d: String| Err(Error::invalid("lax map", d));
        for a in s.elements() {
            for b in s.elements() {
                if s.le(a, b) && !t.le(self.at(a), self.at(b)) {
                    return bad(format!("not monotone at {} ≤ {}", s.label(a), s.label(b)));
                }
                let lhs = t.tensor(self.at(a), self.at(b));
                if !t.le(lhs, self.at(s.tensor(a, b))) {
                    return bad(format!(
                        "F({0})⊗F({1}) = {2} ≰ F({0}⊗{1}) = {3}",
                        s.label(a),
                        s.label(b),
                        t.label(lhs),
                        t.label(self.at(s.tensor(a, b)))
                    ));
                }
            }
        }
        if !t.le(t.unit(), self.at(s.unit())) {
            return bad(format!("1 ≰ F(1) = {}", t.label(self.at(s.unit()))));
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, a: u16) -> u16 {
        self.table[a as usize]
    }

    /// `F(1) = 1` and `F(a) ⊗ F(b) = F(a ⊗ b)`.
    pub fn is_strict(&self) -> bool {
        let (s, t) = (&self.src, &self.tgt);
        self.at(s.unit()) == t.unit()
            && s.elements().all(|a| s.elements().all(|b| t.tensor(self.at(a), self.at(b)) == self.at(s.tensor(a, b))))
    }

    pub fn is_strict_unital(&self) -> bool {
        self.at(self.src.unit()) == self.tgt.unit()
    }
}

/// Transport homs along `F`. The result is a category by laxness; this is
/// rechecked.
pub fn change_enrichment(f: &LaxMap, c: &EnrichedCat) -> Result<EnrichedCat> {
    if *c.q != *f.src {
        return Err(Error::BaseMismatch("category is not enriched in the source quantale".into()));
    }
    let hom = c.hom.iter().map(|&h| f.at(h)).collect();
    let out = EnrichedCat { q: f.tgt.clone(), labels: c.labels.clone(), hom };
    out.check().map_err(|e| Error::Law(format!("transport along a lax map broke the category: {e}")))?;
    Ok(out)
}

/// A finite module over a quantale: a finite lattice `M` with an action
/// `A × M → M` that is unital, associative and preserves joins in each
/// variable.
#[derive(Clone, Debug)]
pub struct QuantaleModule {
    q: Arc<Quantale>,
    labels: Vec<String>,
    join: Vec<usize>,
    action: Vec<usize>,
    le: Vec<bool>,
    meet: Vec<usize>,
    cotensor: Vec<usize>,
    hom: Vec<u16>,
    bottom: usize,
    top: usize,
}

impl QuantaleModule {
    pub fn new(
        q: Arc<Quantale>,
        labels: Vec<String>,
        join: impl Fn(usize, usize) -> usize,
        action: impl Fn(u16, usize) -> usize,
    ) -> Result<Self> {
        let n = labels.len();
        let k = q.size();
        let bad = |d: String| Err(Error::invalid("module", d));
        if n == 0 {
            return bad("empty carrier".into());
        }
        let jt: Vec<usize> = (0..n * n).map(|i| join(i / n, i % n)).collect();
        let at: Vec<usize> = (0..k * n).map(|i| action((i / n) as u16, i % n)).collect();
        if jt.iter().chain(&at).any(|&v| v >= n) {
            return bad("tables leave the carrier".into());
        }
        for a in 0..n {
            if jt[a * n + a] != a {
                return bad(format!("join not idempotent at {}", labels[a]));
            }
            for b in 0..n {
                if jt[a * n + b] != jt[b * n + a] {
                    return bad("join not commutative".into());
                }
                for c in 0..n {
                    if jt[jt[a * n + b] * n + c] != jt[a * n + jt[b * n + c]] {
                        return bad("join not associative".into());
                    }
                }
            }
        }
        let le: Vec<bool> = (0..n * n).map(|i| jt[i] == i % n).collect();
        let bottom = (0..n).find(|&b| (0..n).all(|x| le[b * n + x]));
        let top = (0..n).find(|&t| (0..n).all(|x| le[x * n + t]));
        let (Some(bottom), Some(top)) = (bottom, top) else {
            return bad("no bottom or top".into());
        };
        let act = |a: u16, m: usize| at[a as usize * n + m];
        for m in 0..n {
            if act(q.unit(), m) != m {
                return bad(format!("1 ⊗ {} ≠ {}", labels[m], labels[m]));
            }
            if act(q.bottom(), m) != bottom {
                return bad("bottom of A does not act as zero".into());
            }
            for a in q.elements() {
                for b in q.elements() {
                    if act(q.tensor(a, b), m) != act(a, act(b, m)) {
                        return bad(format!("action not associative at ({}, {}, {})", q.label(a), q.label(b), labels[m]));
                    }
                    if act(q.join(a, b), m) != jt[act(a, m) * n + act(b, m)] {
                        return bad(format!("action does not preserve the join {} ∨ {}", q.label(a), q.label(b)));
                    }
                }
                if act(a, bottom) != bottom {
                    return bad("action does not preserve bottom".into());
                }
                for m2 in 0..n {
                    if act(a, jt[m * n + m2]) != jt[act(a, m) * n + act(a, m2)] {
                        return bad(format!("{} ⊗ − does not preserve joins", q.label(a)));
                    }
                }
            }
        }
        let join_all = |it: &mut dyn Iterator<Item = usize>| it.fold(bottom, |acc, x| jt[acc * n + x]);
        let meet: Vec<usize> = (0..n * n)
            .map(|i| join_all(&mut (0..n).filter(|&x| le[x * n + i / n] && le[x * n + i % n])))
            .collect();
        let cotensor: Vec<usize> =
            (0..k * n).map(|i| join_all(&mut (0..n).filter(|&x| le[act((i / n) as u16, x) * n + i % n]))).collect();
        let hom: Vec<u16> = (0..n * n)
            .map(|i| q.join_all(q.elements().filter(|&a| le[act(a, i / n) * n + i % n])))
            .collect();
        Ok(QuantaleModule { q, labels, join: jt, action: at, le, meet, cotensor, hom, bottom, top })
    }

    /// `A` as a module over itself.
    pub fn regular(q: &Arc<Quantale>) -> Self {
        let qq = q.clone();
        let qa = q.clone();
        Self::new(q.clone(), q.labels().to_vec(), move |a, b| qq.join(a as u16, b as u16) as usize, move |a, m| {
            qa.tensor(a, m as u16) as usize
        })
        .expect("a quantale is a module over itself")
    }

    /// `A^k` with the pointwise structure.
    pub fn power(q: &Arc<Quantale>, k: usize) -> Self {
        let s = q.size();
        let n = s.pow(k as u32);
        let digits = move |x: usize| -> Vec<u16> { (0..k).map(|i| ((x / s.pow((k - 1 - i) as u32)) % s) as u16).collect() };
        let undigits = move |d: &[u16]| d.iter().fold(0usize, |acc, &v| acc * s + v as usize);
        let labels = (0..n)
            .map(|x| format!("({})", digits(x).iter().map(|&v| q.label(v).to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let (qj, qa) = (q.clone(), q.clone());
        Self::new(
            q.clone(),
            labels,
            move |a, b| {
                let v: Vec<u16> = digits(a).iter().zip(digits(b)).map(|(&x, y)| qj.join(x, y)).collect();
                undigits(&v)
            },
            move |a, m| {
                let v: Vec<u16> = digits(m).iter().map(|&x| qa.tensor(a, x)).collect();
                undigits(&v)
            },
        )
        .expect("powers of modules are modules")
    }

    /// A finite lattice as a module over the Boolean quantale.
    pub fn boolean_lattice(labels: Vec<String>, join: &[Vec<usize>]) -> Result<Self> {
        let q = Arc::new(Quantale::boolean());
        let n = labels.len();
        if join.len() != n || join.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("module", "join table must be square"));
        }
        let bottom = (0..n).find(|&b| (0..n).all(|x| join[b][x] == x));
        let Some(bottom) = bottom else {
            return Err(Error::invalid("module", "no bottom"));
        };
        Self::new(q, labels, |a, b| join[a][b], move |a, m| if a == 1 { m } else { bottom })
    }

    pub fn quantale(&self) -> &Arc<Quantale> {
        &self.q
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    pub fn label(&self, m: usize) -> &str {
        &self.labels[m]
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.size() + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.size() + b]
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a * self.size() + b]
    }

    pub fn act(&self, a: u16, m: usize) -> usize {
        self.action[a as usize * self.size() + m]
    }

    /// `a ⋔ m`: the largest `x` with `a ⊗ x ≤ m`.
    pub fn cotensor(&self, a: u16, m: usize) -> usize {
        self.cotensor[a as usize * self.size() + m]
    }

    /// `M(m, m')`: the largest `a` with `a ⊗ m ≤ m'`.
    pub fn hom(&self, m: usize, m2: usize) -> u16 {
        self.hom[m * self.size() + m2]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn join_all(&self, it: impl IntoIterator<Item = usize>) -> usize {
        it.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn meet_all(&self, it: impl IntoIterator<Item = usize>) -> usize {
        it.into_iter().fold(self.top, |acc, x| self.meet(acc, x))
    }
}

/// A map of modules, given by its table. Only checked on request.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleMap {
    pub table: Vec<usize>,
}

impl ModuleMap {
    pub fn at(&self, m: usize) -> usize {
        self.table[m]
    }

    /// Preserves finite joins (including bottom) and the action.
    pub fn is_module_map(&self, src: &QuantaleModule, tgt: &QuantaleModule) -> bool {
        self.at(src.bottom()) == tgt.bottom()
            && src.elements().all(|a| src.elements().all(|b| self.at(src.join(a, b)) == tgt.join(self.at(a), self.at(b))))
            && src.quantale().elements().all(|a| src.elements().all(|m| self.at(src.act(a, m)) == tgt.act(a, self.at(m))))
    }

    pub fn preserves_meets_top_cotensors(&self, src: &QuantaleModule, tgt: &QuantaleModule) -> bool {
        self.at(src.top()) == tgt.top()
            && src.elements().all(|a| src.elements().all(|b| self.at(src.meet(a, b)) == tgt.meet(self.at(a), self.at(b))))
            && src
                .quantale()
                .elements()
                .all(|a| src.elements().all(|m| self.at(src.cotensor(a, m)) == tgt.cotensor(a, self.at(m))))
    }
}

/// The join-closed span of `base` after adding the scalings of `x`. The
/// scalings of one element are already closed under joins.
fn widen(m: &QuantaleModule, base: &[bool], x: usize) -> Vec<bool> {
    let mut span = base.to_vec();
    for y in m.elements().filter(|&y| base[y]) {
        for a in m.quantale().elements() {
            span[m.join(y, m.act(a, x))] = true;
        }
    }
    span
}

fn span_of(m: &QuantaleModule, gens: &[usize]) -> Vec<bool> {
    let mut span = vec![false; m.size()];
    span[m.bottom()] = true;
    for &g in gens {
        span = widen(m, &span, g);
    }
    span
}

/// Elements whose scalings generate `m` under joins: greedy by coverage,
/// then with redundant ones dropped.
pub fn module_generators(m: &QuantaleModule) -> Vec<usize> {
    let mut span = span_of(m, &[]);
    let mut gens = Vec::new();
    while span.iter().any(|&b| !b) {
        let (best, next) = m
            .elements()
            .filter(|&x| !span[x])
            .map(|x| (x, widen(m, &span, x)))
            .max_by_key(|(x, s)| (s.iter().filter(|&&b| b).count(), std::cmp::Reverse(*x)))
            .expect("some element is outside the span");
        gens.push(best);
        span = next;
    }
    let mut i = gens.len();
    while i > 0 {
        i -= 1;
        let mut rest = gens.clone();
        rest.remove(i);
        if span_of(m, &rest).iter().all(|&b| b) {
            gens = rest;
        }
    }
    gens
}

/// Every module map `src → tgt`. A map is fixed by its values on
/// generators, `f(x) = ⋁ { a·f(g) : a·g ≤ x }`, so only those are searched.
/// Both modules must share the quantale.
pub fn module_maps(src: &QuantaleModule, tgt: &QuantaleModule) -> Vec<ModuleMap> {
    let gens = module_generators(src);
    let q = src.quantale();
    // below[x]: the (scalar, generator) pairs under x
    let below: Vec<Vec<(u16, usize)>> = src
        .elements()
        .map(|x| {
            q.elements()
                .flat_map(|a| gens.iter().enumerate().map(move |(i, &g)| (a, i, g)))
                .filter(|&(a, _, g)| src.le(src.act(a, g), x))
                .map(|(a, i, _)| (a, i))
                .collect()
        })
        .collect();
    let t = tgt.size();
    let mut out = Vec::new();
    let mut values = vec![0usize; gens.len()];
    loop {
        let extend = |x: usize| below[x].iter().fold(tgt.bottom(), |acc, &(a, i)| tgt.join(acc, tgt.act(a, values[i])));
        if gens.iter().zip(&values).all(|(&g, &v)| extend(g) == v) {
            let m = ModuleMap { table: src.elements().map(extend).collect() };
            if m.is_module_map(src, tgt) {
                out.push(m);
            }
        }
        // next assignment, odometer style
        let mut k = 0;
        while k < values.len() && values[k] + 1 == t {
            values[k] = 0;
            k += 1;
        }
        if k == values.len() {
            break;
        }
        values[k] += 1;
    }
    out.sort_by(|x, y| x.table.cmp(&y.table));
    out
}

/// The presheaf module `P(C)`: maps `Φ: S → A` with
/// `Φ(c₂) ⊗ Hom(c₁, c₂) ≤ Φ(c₁)`, ordered pointwise.
#[derive(Clone, Debug)]
pub struct PresheafModule {
    cat: EnrichedCat,
    elements: Vec<Vec<u16>>,
    index: HashMap<Vec<u16>, usize>,
    module: QuantaleModule,
    enumerated: bool,
}

/// Above this many candidate functions, presheaves are generated from the
/// representables instead of enumerated.
pub const ENUMERATION_BOUND: usize = 1 << 16;

pub fn is_presheaf(c: &EnrichedCat, phi: &[u16]) -> bool {
    let q = c.quantale();
    phi.len() == c.size()
        && c.objects().all(|a| c.objects().all(|b| q.le(q.tensor(phi[b], c.hom(a, b)), phi[a])))
}

pub fn yoneda(c: &EnrichedCat, obj: usize) -> Vec<u16> {
    c.objects().map(|x| c.hom(x, obj)).collect()
}

/// `⋀_c Φ₁(c) ⊸ Φ₂(c)`.
pub fn hom_presheaf(c: &EnrichedCat, phi1: &[u16], phi2: &[u16]) -> u16 {
    let q = c.quantale();
    q.meet_all(c.objects().map(|o| q.residuate(phi1[o], phi2[o])))
}

pub fn presheaves(c: &EnrichedCat) -> Result<PresheafModule> {
    presheaves_bounded(c, ENUMERATION_BOUND)
}

/// `presheaves` with an explicit size bound, both for the enumeration and
/// for the generated module.
pub fn presheaves_bounded(c: &EnrichedCat, bound: usize) -> Result<PresheafModule> {
    let q = c.quantale().clone();
    let n = c.size();
    let total = q.size().checked_pow(n as u32).unwrap_or(usize::MAX);
    let mut elements: Vec<Vec<u16>> = Vec::new();
    let enumerated = total <= bound;
    if enumerated {
        let mut phi = vec![0u16; n];
        for _ in 0..total {
            if is_presheaf(c, &phi) {
                elements.push(phi.clone());
            }
            for i in (0..n).rev() {
                phi[i] += 1;
                if (phi[i] as usize) < q.size() {
                    break;
                }
                phi[i] = 0;
            }
        }
    } else {
        // closure of {a ⊗ Yon(c)} under binary joins, from bottom
        let mut seen: HashMap<Vec<u16>, ()> = HashMap::new();
        let bottom = vec![q.bottom(); n];
        seen.insert(bottom.clone(), ());
        elements.push(bottom);
        let gens: Vec<Vec<u16>> = c
            .objects()
            .flat_map(|o| q.elements().map(move |a| (o, a)))
            .map(|(o, a)| yoneda(c, o).iter().map(|&v| q.tensor(a, v)).collect())
            .collect();
        let mut i = 0;
        while i < elements.len() {
            for g in &gens {
                let j: Vec<u16> = elements[i].iter().zip(g).map(|(&x, &y)| q.join(x, y)).collect();
                if seen.insert(j.clone(), ()).is_none() {
                    if seen.len() > bound {
                        return Err(Error::SizeBound(format!("more than {bound} presheaves")));
                    }
                    elements.push(j);
                }
            }
            i += 1;
        }
        elements.sort();
    }
    let index: HashMap<Vec<u16>, usize> = elements.iter().enumerate().map(|(i, e)| (e.clone(), i)).collect();
    let labels = elements
        .iter()
        .map(|e| format!("[{}]", e.iter().map(|&v| q.label(v).to_string()).collect::<Vec<_>>().join(",")))
        .collect();
    let (qj, qa) = (q.clone(), q.clone());
    let (ej, ea) = (elements.clone(), elements.clone());
    let (ij, ia) = (index.clone(), index.clone());
    let module = QuantaleModule::new(
        q.clone(),
        labels,
        move |a, b| {
            let v: Vec<u16> = ej[a].iter().zip(&ej[b]).map(|(&x, &y)| qj.join(x, y)).collect();
            ij[&v]
        },
        move |a, m| {
            let v: Vec<u16> = ea[m].iter().map(|&x| qa.tensor(a, x)).collect();
            ia[&v]
        },
    )?;
    Ok(PresheafModule { cat: c.clone(), elements, index, module, enumerated })
}

impl PresheafModule {
    pub fn category(&self) -> &EnrichedCat {
        &self.cat
    }

    pub fn module(&self) -> &QuantaleModule {
        &self.module
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Vec<u16>] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &[u16] {
        &self.elements[i]
    }

    pub fn index_of(&self, phi: &[u16]) -> Option<usize> {
        self.index.get(phi).copied()
    }

    pub fn was_enumerated(&self) -> bool {
        self.enumerated
    }

    pub fn yoneda(&self, c: usize) -> usize {
        self.index[&yoneda(&self.cat, c)]
    }

    pub fn hom(&self, a: usize, b: usize) -> u16 {
        hom_presheaf(&self.cat, &self.elements[a], &self.elements[b])
    }
}

fn check_diagram(c: &EnrichedCat, m: &QuantaleModule, phi: &[usize]) -> Result<()> {
    if phi.len() != c.size() || phi.iter().any(|&x| x >= m.size()) {
        return Err(Error::invalid("diagram", "one module element per object"));
    }
    for a in c.objects() {
        for b in c.objects() {
            let pushed = m.act(c.hom(a, b), phi[a]);
            if !m.le(pushed, phi[b]) {
                return Err(Error::invalid(
                    "diagram",
                    format!("not functorial on {} → {}: Hom⊗Φ = {} ≰ {}", c.labels()[a], c.labels()[b], m.label(pushed), m.label(phi[b])),
                ));
            }
        }
    }
    Ok(())
}

/// `⋀_c W(c) ⋔ Φ(c)` for a covariant weight `W` and diagram `Φ: C → M`.
pub fn weighted_limit(c: &EnrichedCat, w: &[u16], m: &QuantaleModule, phi: &[usize]) -> Result<usize> {
    check_diagram(c, m, phi)?;
    if !is_presheaf(&c.opposite(), w) {
        return Err(Error::invalid("weight", "a limit weight must be covariant"));
    }
    Ok(m.meet_all(c.objects().map(|o| m.cotensor(w[o], phi[o]))))
}

/// `⋁_c W(c) ⊗ Φ(c)` for a presheaf weight `W` and diagram `Φ: C → M`.
pub fn weighted_colimit(c: &EnrichedCat, w: &[u16], m: &QuantaleModule, phi: &[usize]) -> Result<usize> {
    check_diagram(c, m, phi)?;
    if !is_presheaf(c, w) {
        return Err(Error::invalid("weight", "a colimit weight must be a presheaf"));
    }
    Ok(m.join_all(c.objects().map(|o| m.act(w[o], phi[o]))))
}

/// `M(x, L) = ⋀_c W(c) ⊸ M(x, Φ(c))` for every `x ∈ M`.
pub fn is_weighted_limit(c: &EnrichedCat, w: &[u16], m: &QuantaleModule, phi: &[usize], l: usize) -> bool {
    let q = m.quantale();
    m.elements().all(|x| m.hom(x, l) == q.meet_all(c.objects().map(|o| q.residuate(w[o], m.hom(x, phi[o])))))
}

/// `M(L, x) = ⋀_c W(c) ⊸ M(Φ(c), x)` for every `x ∈ M`.
pub fn is_weighted_colimit(c: &EnrichedCat, w: &[u16], m: &QuantaleModule, phi: &[usize], l: usize) -> bool {
    let q = m.quantale();
    m.elements().all(|x| m.hom(l, x) == q.meet_all(c.objects().map(|o| q.residuate(w[o], m.hom(phi[o], x)))))
}

/// The least diagram above `phi`: close under `Hom(a,b) ⊗ Φ(a) ≤ Φ(b)`.
pub fn diagram_closure(c: &EnrichedCat, m: &QuantaleModule, mut phi: Vec<usize>) -> Vec<usize> {
    loop {
        let mut changed = false;
        for a in c.objects() {
            for b in c.objects() {
                let v = m.join(phi[b], m.act(c.hom(a, b), phi[a]));
                if v != phi[b] {
                    phi[b] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            return phi;
        }
    }
}

/// The least presheaf above `w`.
pub fn presheaf_closure(c: &EnrichedCat, mut w: Vec<u16>) -> Vec<u16> {
    let q = c.quantale();
    loop {
        let mut changed = false;
        for a in c.objects() {
            for b in c.objects() {
                let v = q.join(w[a], q.tensor(w[b], c.hom(a, b)));
                if v != w[a] {
                    w[a] = v;
                    changed = true;
                }
            }
        }
        if !changed {
            return w;
        }
    }
}

/// `BK_n(Ψ)(x) = ⋁ Ψ(c_n) ⊗ Hom(c_{n-1}, c_n) ⊗ … ⊗ Hom(c_0, c_1) ⊗ Hom(x, c_0)`.
pub fn bk_term(c: &EnrichedCat, psi: &[u16], n: usize) -> Result<Vec<u16>> {
    if n > 2 {
        return Err(Error::Precondition("bar terms are provided for n ≤ 2".into()));
    }
    let q = c.quantale();
    // chain(x) = ⋁_{c_0..c_n} Ψ(c_n) ⊗ Π Hom, computed right to left
    let mut acc: Vec<u16> = psi.to_vec();
    for _ in 0..=n {
        acc = c.objects().map(|x| q.join_all(c.objects().map(|y| q.tensor(acc[y], c.hom(x, y))))).collect();
    }
    Ok(acc)
}

/// The realization of `BK₁ ⇉ BK₀` in a poset is the join-closure of `BK₀`
/// receiving both faces; it must give back `Ψ`.
pub fn bk_reconstruct(c: &EnrichedCat, psi: &[u16]) -> Result<bool> {
    let q = c.quantale();
    let b0 = bk_term(c, psi, 0)?;
    let b1 = bk_term(c, psi, 1)?;
    let faces = c.objects().all(|x| q.le(b1[x], b0[x]));
    Ok(faces && b0 == psi)
}

/// `m` is totally compact when `M(m, −)` is itself a module map: it
/// preserves finite joins and `M(m, a ⊗ x) = a ⊗ M(m, x)`.
pub fn totally_compact_check(m: usize, module: &QuantaleModule) -> bool {
    let q = module.quantale();
    module.hom(m, module.bottom()) == q.bottom()
        && module
            .elements()
            .all(|x| module.elements().all(|y| module.hom(m, module.join(x, y)) == q.join(module.hom(m, x), module.hom(m, y))))
        && q.elements().all(|a| module.elements().all(|x| module.hom(m, module.act(a, x)) == q.tensor(a, module.hom(m, x))))
}

/// Left Kan extension of a presheaf along a full inclusion `C → D` given by
/// an object map: `(ι_! Φ)(d) = ⋁_c Φ(c) ⊗ Hom_D(d, ι c)`.
pub fn extend_presheaf(d: &EnrichedCat, inclusion: &[usize], phi: &[u16]) -> Vec<u16> {
    let q = d.quantale();
    d.objects()
        .map(|x| q.join_all(inclusion.iter().zip(phi).map(|(&ic, &v)| q.tensor(v, d.hom(x, ic)))))
        .collect()
}

/// `⟨Φ, Ψ⟩ = ⋁_c Φ(c) ⊗ Ψ(c)` for `Φ ∈ P(C)`, `Ψ ∈ P(C^op)`.
pub fn pairing(c: &EnrichedCat, phi: &[u16], psi: &[u16]) -> u16 {
    let q = c.quantale();
    q.join_all(c.objects().map(|o| q.tensor(phi[o], psi[o])))
}

/// `Ψ ↦ ⟨−, Ψ⟩` is a bijection from `P(C^op)` onto the module maps
/// `P(C) → A`.
pub fn duality_bijection(c: &EnrichedCat) -> Result<bool> {
    let p = presheaves(c)?;
    let pop = presheaves(&c.opposite())?;
    let a = QuantaleModule::regular(c.quantale());
    let maps = module_maps(p.module(), &a);
    let mut induced: Vec<ModuleMap> = pop
        .elements()
        .iter()
        .map(|psi| ModuleMap { table: p.elements().iter().map(|phi| pairing(c, phi, psi) as usize).collect() })
        .collect();
    let all_module_maps = induced.iter().all(|m| m.is_module_map(p.module(), &a));
    let before = induced.len();
    induced.sort_by(|x, y| x.table.cmp(&y.table));
    induced.dedup();
    let injective = induced.len() == before;
    let surjective = maps.len() == induced.len() && maps.iter().all(|m| induced.contains(m));
    Ok(all_module_maps && injective && surjective)
}

#[cfg(test)]
mod tests;
