//! The enhancement of a lax monoidal functor `F: O → A` from a closed
//! symmetric monoidal poset into a quantale: `enh` has homs `F([o₁, o₂])`,
//! `Enh` is its presheaf module, and `A ⇄ Enh` is the pair `iota ⊣ epsilon`.

use std::sync::Arc;

use crate::coeff::Quantale;
use crate::enriched::{extend_presheaf, presheaves, EnrichedCat, ModuleMap, PresheafModule};
use crate::{Error, Result};

/// A finite closed symmetric monoidal poset, given by tables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmPoset {
    labels: Vec<String>,
    le: Vec<bool>,
    tensor: Vec<usize>,
    unit: usize,
    ihom: Vec<usize>,
    duals: Option<Vec<usize>>,
}

impl SmPoset {
    pub fn new(
        labels: Vec<String>,
        le: Vec<Vec<bool>>,
        tensor: Vec<Vec<usize>>,
        unit: usize,
        ihom: Vec<Vec<usize>>,
        duals: Option<Vec<usize>>,
    ) -> Result<Self> {
        let n = labels.len();
        let square = |t: usize, r: usize| t == n && r == n;
        let shape = square(le.len(), n)
            && le.iter().all(|r| r.len() == n)
            && square(tensor.len(), n)
            && tensor.iter().chain(&ihom).all(|r| r.len() == n && r.iter().all(|&v| v < n))
            && ihom.len() == n
            && unit < n
            && duals.as_ref().is_none_or(|d| d.len() == n && d.iter().all(|&v| v < n));
        if !shape {
            return Err(Error::invalid("monoidal poset", "tables must be square over the objects"));
        }
        let o = SmPoset { labels, le: le.concat(), tensor: tensor.concat(), unit, ihom: ihom.concat(), duals };
        o.check()?;
        Ok(o)
    }

    fn check(&self) -> Result<()> {
        let bad = |d: String| Err(Error::invalid("monoidal poset", d));
        let l = |x: usize| self.labels[x].as_str();
        for a in self.objects() {
            if !self.le(a, a) {
                return bad(format!("≤ is not reflexive at {}", l(a)));
            }
            if self.tensor(self.unit, a) != a {
                return bad(format!("1 ⊗ {} ≠ {}", l(a), l(a)));
            }
            for b in self.objects() {
                if a != b && self.le(a, b) && self.le(b, a) {
                    return bad(format!("≤ is not antisymmetric at {}, {}", l(a), l(b)));
                }
                if self.tensor(a, b) != self.tensor(b, a) {
                    return bad(format!("⊗ is not symmetric at {}, {}", l(a), l(b)));
                }
                for c in self.objects() {
                    if self.le(a, b) && self.le(b, c) && !self.le(a, c) {
                        return bad(format!("≤ is not transitive at {}, {}, {}", l(a), l(b), l(c)));
                    }
                    if self.tensor(self.tensor(a, b), c) != self.tensor(a, self.tensor(b, c)) {
                        return bad(format!("⊗ is not associative at {}, {}, {}", l(a), l(b), l(c)));
                    }
                    if self.le(a, b) && !self.le(self.tensor(a, c), self.tensor(b, c)) {
                        return bad(format!("⊗ is not monotone at {} ≤ {}", l(a), l(b)));
                    }
                    if self.le(self.tensor(a, b), c) != self.le(b, self.ihom(a, c)) {
                        return bad(format!("{0} ⊗ {1} ≤ {2} disagrees with {1} ≤ [{0}, {2}]", l(a), l(b), l(c)));
                    }
                }
            }
        }
        if let Some(d) = &self.duals {
            for a in self.objects() {
                let ev = self.le(self.tensor(d[a], a), self.unit);
                let coev = self.le(self.unit, self.tensor(a, d[a]));
                if !(ev && coev) {
                    return bad(format!("{} is not a dual of {}", l(d[a]), l(a)));
                }
            }
        }
        Ok(())
    }

    /// A quantale as a closed monoidal poset. Only the one-point quantale
    /// has duals.
    pub fn from_quantale(q: &Quantale) -> Self {
        let els: Vec<u16> = q.elements().collect();
        let table = |f: &dyn Fn(u16, u16) -> u16| -> Vec<Vec<usize>> {
            els.iter().map(|&a| els.iter().map(|&b| f(a, b) as usize).collect()).collect()
        };
        let le = els.iter().map(|&a| els.iter().map(|&b| q.le(a, b)).collect()).collect();
        let duals = (q.size() == 1).then(|| vec![0]);
        Self::new(
            q.labels().to_vec(),
            le,
            table(&|a, b| q.tensor(a, b)),
            q.unit() as usize,
            table(&|a, b| q.residuate(a, b)),
            duals,
        )
        .expect("a quantale is a closed monoidal poset")
    }

    /// A finite group as a discrete monoidal poset; every object is dual to
    /// its inverse.
    pub fn group(labels: Vec<String>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        let e = (0..n).find(|&e| (0..n).all(|x| mul.get(e).and_then(|r| r.get(x)) == Some(&x)));
        let Some(e) = e else {
            return Err(Error::invalid("group", "no identity"));
        };
        let inv: Vec<usize> = (0..n)
            .map(|a| (0..n).find(|&b| mul[a][b] == e).ok_or_else(|| Error::invalid("group", format!("{} has no inverse", labels[a]))))
            .collect::<Result<_>>()?;
        let le = (0..n).map(|a| (0..n).map(|b| a == b).collect()).collect();
        let ihom = (0..n).map(|a| (0..n).map(|b| mul[inv[a]][b]).collect()).collect();
        Self::new(labels, le, mul, e, ihom, Some(inv))
    }

    pub fn unit_category() -> Self {
        Self::new(vec!["1".into()], vec![vec![true]], vec![vec![0]], 0, vec![vec![0]], Some(vec![0])).expect("one object")
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

    pub fn unit(&self) -> usize {
        self.unit
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a * self.size() + b]
    }

    pub fn tensor(&self, a: usize, b: usize) -> usize {
        self.tensor[a * self.size() + b]
    }

    pub fn ihom(&self, a: usize, b: usize) -> usize {
        self.ihom[a * self.size() + b]
    }

    pub fn duals(&self) -> Option<&[usize]> {
        self.duals.as_deref()
    }
}

/// A monotone map `O → A` with `F(a) ⊗ F(b) ≤ F(a ⊗ b)` and `1 ≤ F(1)`.
#[derive(Clone, Debug)]
pub struct LaxFunctor {
    pub source: SmPoset,
    pub target: Arc<Quantale>,
    table: Vec<u16>,
}

impl LaxFunctor {
    pub fn new(source: SmPoset, target: Arc<Quantale>, table: Vec<u16>) -> Result<Self> {
        if table.len() != source.size() || table.iter().any(|&v| v as usize >= target.size()) {
            return Err(Error::invalid("lax functor", "one quantale element per object"));
        }
        let f = LaxFunctor { source, target, table };
        let (o, q) = (&f.source, &f.target);
        let l = |x: usize| o.labels[x].as_str();
        for a in o.objects() {
            for b in o.objects() {
                if o.le(a, b) && !q.le(f.at(a), f.at(b)) {
                    return Err(Error::invalid("lax functor", format!("not monotone at {} ≤ {}", l(a), l(b))));
                }
                let lhs = q.tensor(f.at(a), f.at(b));
                if !q.le(lhs, f.at(o.tensor(a, b))) {
                    return Err(Error::invalid(
                        "lax functor",
                        format!("F({0})⊗F({1}) = {2} ≰ F({0}⊗{1}) = {3}", l(a), l(b), q.label(lhs), q.label(f.at(o.tensor(a, b)))),
                    ));
                }
            }
        }
        if !q.le(q.unit(), f.at(o.unit())) {
            return Err(Error::invalid("lax functor", format!("1 ≰ F(1) = {}", q.label(f.at(o.unit())))));
        }
        Ok(f)
    }

    pub fn at(&self, o: usize) -> u16 {
        self.table[o]
    }

    pub fn table(&self) -> &[u16] {
        &self.table
    }

    pub fn strictly_unital(&self) -> bool {
        self.at(self.source.unit()) == self.target.unit()
    }

    pub fn strict(&self) -> bool {
        let (o, q) = (&self.source, &self.target);
        self.strictly_unital()
            && o.objects().all(|a| o.objects().all(|b| q.tensor(self.at(a), self.at(b)) == self.at(o.tensor(a, b))))
    }
}

/// `Hom(o₁, o₂) = F([o₁, o₂])`.
pub fn build_enh(f: &LaxFunctor) -> Result<EnrichedCat> {
    let o = &f.source;
    let hom = o.objects().map(|a| o.objects().map(|b| f.at(o.ihom(a, b))).collect()).collect();
    EnrichedCat::new(f.target.clone(), o.labels.clone(), hom)
        .map_err(|e| Error::Law(format!("enh is not a category; the lax data is wrong: {e}")))
}

/// `Enh` with its structure maps.
#[derive(Clone, Debug)]
pub struct EnhResult {
    pub functor: LaxFunctor,
    pub enh: EnrichedCat,
    pub presheaves: PresheafModule,
    /// `ulF(o) = Yon(o)`, as indices into `presheaves`.
    pub ul_f: Vec<usize>,
    /// `iota(a) = a ⊗ Yon(1)`, indexed by quantale element.
    pub iota: Vec<usize>,
    /// `epsilon(Φ) = Φ(1)`, indexed by presheaf.
    pub epsilon: Vec<u16>,
}

pub fn build_enh_module(f: &LaxFunctor) -> Result<EnhResult> {
    let enh = build_enh(f)?;
    let p = presheaves(&enh)?;
    let q = f.target.clone();
    let o = &f.source;
    let ul_f: Vec<usize> = o.objects().map(|x| p.yoneda(x)).collect();
    let unit = ul_f[o.unit()];
    let iota = q.elements().map(|a| p.module().act(a, unit)).collect();
    let epsilon: Vec<u16> = p.elements().iter().map(|phi| phi[o.unit()]).collect();
    for x in o.objects() {
        if epsilon[ul_f[x]] != f.at(x) {
            return Err(Error::Law(format!(
                "epsilon(ulF({0})) = {1} but F({0}) = {2}",
                o.labels[x],
                q.label(epsilon[ul_f[x]]),
                q.label(f.at(x))
            )));
        }
    }
    Ok(EnhResult { functor: f.clone(), enh, presheaves: p, ul_f, iota, epsilon })
}

impl EnhResult {
    fn q(&self) -> &Arc<Quantale> {
        &self.functor.target
    }

    /// `(Φ₁ ⊛ Φ₂)(o) = ⋁ Hom(o, o₁⊗o₂) ⊗ Φ₁(o₁) ⊗ Φ₂(o₂)`.
    pub fn day(&self, a: usize, b: usize) -> usize {
        let (q, o, p) = (self.q(), &self.functor.source, &self.presheaves);
        let (pa, pb) = (p.element(a), p.element(b));
        let v: Vec<u16> = o
            .objects()
            .map(|x| {
                q.join_all(o.objects().flat_map(|y| o.objects().map(move |z| (y, z))).map(|(y, z)| {
                    q.tensor_all([self.enh.hom(x, o.tensor(y, z)), pa[y], pb[z]])
                }))
            })
            .collect();
        p.index_of(&v).expect("Day products of presheaves are presheaves")
    }

    pub fn day_unit(&self) -> usize {
        self.ul_f[self.functor.source.unit()]
    }

    /// `ulF(o₁ ⊗ o₂) = ulF(o₁) ⊛ ulF(o₂)` for all pairs.
    pub fn ul_f_monoidal(&self) -> bool {
        let o = &self.functor.source;
        o.objects().all(|a| o.objects().all(|b| self.ul_f[o.tensor(a, b)] == self.day(self.ul_f[a], self.ul_f[b])))
    }

    /// `Yon(1) ⊛ Φ = Φ` for all `Φ`.
    pub fn day_unit_laws(&self) -> bool {
        let u = self.day_unit();
        (0..self.presheaves.size()).all(|x| self.day(u, x) == x && self.day(x, u) == x)
    }

    /// `Enh(iota a, Φ) = a ⊸ epsilon(Φ)` for all `a`, `Φ`.
    pub fn iota_left_of_epsilon(&self) -> bool {
        let q = self.q();
        q.elements()
            .all(|a| (0..self.presheaves.size()).all(|x| self.presheaves.hom(self.iota[a as usize], x) == q.residuate(a, self.epsilon[x])))
    }

    /// `epsilon(Φ) ⊸ a = Enh(Φ, iota a)` for all `a`, `Φ`.
    pub fn epsilon_left_of_iota(&self) -> bool {
        let q = self.q();
        q.elements()
            .all(|a| (0..self.presheaves.size()).all(|x| q.residuate(self.epsilon[x], a) == self.presheaves.hom(x, self.iota[a as usize])))
    }

    /// `epsilon ∘ iota = id` and `iota ∘ epsilon = id`.
    pub fn is_equivalence(&self) -> bool {
        let q = self.q();
        q.elements().all(|a| self.epsilon[self.iota[a as usize]] == a)
            && (0..self.presheaves.size()).all(|x| self.iota[self.epsilon[x] as usize] == x)
    }

    pub fn iota_map(&self) -> ModuleMap {
        ModuleMap { table: self.iota.clone() }
    }
}

/// Whether `iota` preserves homs; the first distorted pair otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FfReport {
    pub strictly_unital: bool,
    pub fully_faithful: bool,
    /// `(a, b, Enh(iota a, iota b), a ⊸ b)`
    pub distortion: Option<(String, String, String, String)>,
}

pub fn check_strict_unital_ff(r: &EnhResult) -> Result<FfReport> {
    let q = r.q();
    let mut distortion = None;
    'outer: for a in q.elements() {
        for b in q.elements() {
            let got = r.presheaves.hom(r.iota[a as usize], r.iota[b as usize]);
            let want = q.residuate(a, b);
            if got != want {
                distortion = Some((q.label(a).into(), q.label(b).into(), q.label(got).into(), q.label(want).into()));
                break 'outer;
            }
        }
    }
    let report = FfReport { strictly_unital: r.functor.strictly_unital(), fully_faithful: distortion.is_none(), distortion };
    if report.strictly_unital && !report.fully_faithful {
        let (a, b, got, want) = report.distortion.clone().expect("set when not fully faithful");
        return Err(Error::Law(format!("F is strictly unital but Enh(iota {a}, iota {b}) = {got} ≠ {want}")));
    }
    Ok(report)
}

/// The reading used for the duality pairing condition.
pub const PAIRING_READING: &str = "F(o)⊗F(o^∨) = 1: F sends duals to inverse elements";

/// Needs duals in `O`, `F` strictly unital, and `F` sending duals to
/// inverses; then both `iota ⊣ epsilon` and `epsilon ⊣ iota`.
pub fn check_ambidexterity(r: &EnhResult) -> Result<bool> {
    let (o, q, f) = (&r.functor.source, r.q(), &r.functor);
    let Some(d) = o.duals() else {
        return Err(Error::Precondition("objects of O have no duals".into()));
    };
    if !f.strictly_unital() {
        return Err(Error::Precondition(format!("not strictly unital: F(1) = {} is not the unit", q.label(f.at(o.unit())))));
    }
    if let Some(x) = o.objects().find(|&x| q.tensor(f.at(x), f.at(d[x])) != q.unit()) {
        return Err(Error::Precondition(format!(
            "duals not sent to inverses: F({0})⊗F({0}^∨) = {1}, reading {PAIRING_READING}",
            o.labels[x],
            q.label(q.tensor(f.at(x), f.at(d[x])))
        )));
    }
    Ok(r.iota_left_of_epsilon() && r.epsilon_left_of_iota())
}

/// Every object dualizable and `F` strict monoidal; then `iota` and
/// `epsilon` are inverse.
pub fn check_collapse(r: &EnhResult) -> Result<bool> {
    if r.functor.source.duals().is_none() {
        return Err(Error::Precondition("not every object of O is dualizable".into()));
    }
    if !r.functor.strict() {
        return Err(Error::Precondition("F is not strict monoidal".into()));
    }
    Ok(r.is_equivalence())
}

/// A monoidal map of posets `Φ: O₁ → O₂` with `F₁ ≤ F₂ ∘ Φ`.
#[derive(Clone, Debug)]
pub struct ChangeOfSource {
    pub map: ModuleMap,
    pub equality: bool,
    pub hom_preserving: bool,
    /// Equality transformation and duals in `O₁`, so `map` must preserve homs.
    pub ff_claimed: bool,
}

pub fn change_source(r1: &EnhResult, r2: &EnhResult, phi: &[usize]) -> Result<ChangeOfSource> {
    let (o1, o2) = (&r1.functor.source, &r2.functor.source);
    let (f1, f2) = (&r1.functor, &r2.functor);
    let q = r1.q();
    if **q != **r2.q() {
        return Err(Error::BaseMismatch("the two enhancements have different targets".into()));
    }
    if phi.len() != o1.size() || phi.iter().any(|&x| x >= o2.size()) {
        return Err(Error::invalid("change of source", "one target object per source object"));
    }
    let l = |x: usize| o1.labels[x].as_str();
    if phi[o1.unit()] != o2.unit() {
        return Err(Error::invalid("change of source", "Φ(1) is not the unit"));
    }
    for a in o1.objects() {
        for b in o1.objects() {
            if o1.le(a, b) && !o2.le(phi[a], phi[b]) {
                return Err(Error::invalid("change of source", format!("Φ is not monotone at {} ≤ {}", l(a), l(b))));
            }
            if phi[o1.tensor(a, b)] != o2.tensor(phi[a], phi[b]) {
                return Err(Error::invalid("change of source", format!("Φ({0}⊗{1}) ≠ Φ({0})⊗Φ({1})", l(a), l(b))));
            }
        }
        if !q.le(f1.at(a), f2.at(phi[a])) {
            return Err(Error::invalid("change of source", format!("F₁({0}) ≰ F₂(Φ({0}))", l(a))));
        }
    }
    let equality = o1.objects().all(|a| f1.at(a) == f2.at(phi[a]));
    let (p1, p2) = (&r1.presheaves, &r2.presheaves);
    let table = p1
        .elements()
        .iter()
        .map(|x| p2.index_of(&extend_presheaf(&r2.enh, phi, x)).expect("left Kan extensions are presheaves"))
        .collect::<Vec<_>>();
    let hom_preserving = (0..p1.size()).all(|a| (0..p1.size()).all(|b| p1.hom(a, b) == p2.hom(table[a], table[b])));
    let ff_claimed = equality && o1.duals().is_some();
    if ff_claimed && !hom_preserving {
        return Err(Error::Law("change of source along an equality with duals does not preserve homs".into()));
    }
    Ok(ChangeOfSource { map: ModuleMap { table }, equality, hom_preserving, ff_claimed })
}

/// `B = F(1) ⊗ A`, the quantale of `F(1)`-modules inside `A`, with unit
/// `F(1)`; returns it with the inclusion `B → A`.
pub fn unit_algebra_quantale(q: &Quantale, u: u16) -> Result<(Quantale, Vec<u16>)> {
    if q.tensor(u, u) != u || !q.le(q.unit(), u) {
        return Err(Error::Precondition(format!("{} is not an idempotent above the unit", q.label(u))));
    }
    let mut incl: Vec<u16> = q.elements().map(|a| q.tensor(u, a)).collect();
    incl.sort_unstable();
    incl.dedup();
    let pos = |a: u16| incl.iter().position(|&x| x == a).expect("closed") as u16;
    let join = incl.iter().map(|&a| incl.iter().map(|&b| pos(q.join(a, b))).collect()).collect::<Vec<_>>();
    let tensor = incl.iter().map(|&a| incl.iter().map(|&b| pos(q.tensor(a, b))).collect()).collect::<Vec<_>>();
    let labels = incl.iter().map(|&a| q.label(a).to_string()).collect();
    Ok((Quantale::lattice(labels, &join, &tensor, pos(u))?, incl))
}

/// `Enh(O, F(1)-mod)` and `Enh(O, A)` have the same presheaves, the same
/// representables, the same homs, and both are generated by representables.
pub fn check_target_insensitivity(f: &LaxFunctor) -> Result<bool> {
    let q = &f.target;
    let (b, incl) = unit_algebra_quantale(q, f.at(f.source.unit()))?;
    let b = Arc::new(b);
    let back = |a: u16| incl.iter().position(|&x| x == a).map(|i| i as u16);
    let table = f
        .table()
        .iter()
        .map(|&v| back(v).ok_or_else(|| Error::Law("F does not land in F(1)-modules".into())))
        .collect::<Result<Vec<_>>>()?;
    let fb = LaxFunctor::new(f.source.clone(), b.clone(), table)?;
    let (ra, rb) = (build_enh_module(f)?, build_enh_module(&fb)?);
    let lift = |phi: &[u16]| phi.iter().map(|&v| incl[v as usize]).collect::<Vec<u16>>();
    let (pa, pb) = (&ra.presheaves, &rb.presheaves);
    let map: Vec<Option<usize>> = pb.elements().iter().map(|phi| pa.index_of(&lift(phi))).collect();
    if map.iter().any(Option::is_none) {
        return Ok(false);
    }
    let map: Vec<usize> = map.into_iter().flatten().collect();
    let bijective = map.len() == pa.size();
    let representables = f.source.objects().all(|x| map[rb.ul_f[x]] == ra.ul_f[x]);
    let homs = (0..pb.size()).all(|i| (0..pb.size()).all(|j| incl[pb.hom(i, j) as usize] == pa.hom(map[i], map[j])));
    let generated = |r: &EnhResult| -> bool {
        let p = &r.presheaves;
        let q = r.q();
        let mut seen = vec![false; p.size()];
        let mut stack = vec![p.module().bottom()];
        seen[p.module().bottom()] = true;
        let gens: Vec<usize> =
            r.functor.source.objects().flat_map(|x| q.elements().map(move |a| (x, a))).map(|(x, a)| p.module().act(a, r.ul_f[x])).collect();
        while let Some(x) = stack.pop() {
            for &g in &gens {
                let j = p.module().join(x, g);
                if !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    Ok(bijective && representables && homs && generated(&ra) && generated(&rb))
}

/// Every lax functor `O → A`, by exhaustive search over tables.
pub fn lax_functors(o: &SmPoset, q: &Arc<Quantale>) -> Vec<LaxFunctor> {
    let n = o.size();
    let k = q.size();
    let total = k.checked_pow(n as u32).unwrap_or(usize::MAX);
    (0..total)
        .filter_map(|mut code| {
            let table = (0..n)
                .map(|_| {
                    let v = (code % k) as u16;
                    code /= k;
                    v
                })
                .collect();
            LaxFunctor::new(o.clone(), q.clone(), table).ok()
        })
        .collect()
}

#[cfg(test)]
mod tests;
