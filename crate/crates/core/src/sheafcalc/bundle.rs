use std::sync::Arc;

use num_traits::Zero;

use crate::coeff::{QMat, Rat};
use crate::groupoid::{FinGroupoid, GroupoidMap};
use crate::{Error, Result};

/// An equivariant vector bundle over the rationals on `X//G`.
///
/// Stored by the action of the canonical generators of `G`:
/// `gens[i][x] = ρ(s_i)_x : V_x → V_{s_i·x}`. Other group elements act
/// through their generator words.
#[derive(Clone, Debug)]
pub struct Bundle {
    base: Arc<FinGroupoid>,
    dims: Vec<usize>,
    gens: Vec<Vec<QMat>>,
}

/// A morphism of bundles on a common base: one matrix per point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BundleMap {
    pub maps: Vec<QMat>,
}

impl Bundle {
    /// Validated constructor: shapes, and `ρ(s g) = ρ(s) ρ(g)` for every
    /// generator `s` and every element `g`, which forces a homomorphism.
    pub fn new(base: Arc<FinGroupoid>, dims: Vec<usize>, gens: Vec<Vec<QMat>>) -> Result<Self> {
        let b = Self::unchecked(base, dims, gens)?;
        b.validate()?;
        Ok(b)
    }

    pub(crate) fn unchecked(base: Arc<FinGroupoid>, dims: Vec<usize>, gens: Vec<Vec<QMat>>) -> Result<Self> {
        let g = base.group().clone();
        if dims.len() != base.size() || gens.len() != g.gens().len() {
            return Err(Error::invalid("bundle", "one dimension per point and one matrix list per generator"));
        }
        for (i, &s) in g.gens().iter().enumerate() {
            if gens[i].len() != base.size() {
                return Err(Error::invalid("bundle", "each generator needs a matrix at every point"));
            }
            for x in base.points() {
                let m = &gens[i][x];
                if m.rows() != dims[base.act(s, x)] || m.cols() != dims[x] {
                    return Err(Error::invalid(
                        "bundle",
                        format!("generator {} at {} has the wrong shape", g.label(s), base.label(x)),
                    ));
                }
            }
        }
        Ok(Bundle { base, dims, gens })
    }

    /// Build from the action of arbitrary elements; only generators are queried.
    pub fn from_action(base: Arc<FinGroupoid>, dims: Vec<usize>, rho: impl Fn(usize, usize) -> QMat) -> Result<Self> {
        let gens = base.group().gens().iter().map(|&s| base.points().map(|x| rho(s, x)).collect()).collect();
        Self::new(base, dims, gens)
    }

    pub fn validate(&self) -> Result<()> {
        let g = self.base.group();
        for (i, &s) in g.gens().iter().enumerate() {
            for h in g.elements() {
                for x in self.base.points() {
                    let lhs = self.rho(g.mul(s, h), x);
                    let rhs = self.gens[i][self.base.act(h, x)].mul(&self.rho(h, x));
                    if lhs != rhs {
                        return Err(Error::invalid(
                            "bundle",
                            format!(
                                "action is not a homomorphism at s={}, g={}, x={}",
                                g.label(s),
                                g.label(h),
                                self.base.label(x)
                            ),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// The constant bundle of rank `d` with trivial action.
    pub fn trivial(base: &Arc<FinGroupoid>, d: usize) -> Self {
        let gens = base.group().gens().iter().map(|_| base.points().map(|_| QMat::identity(d)).collect()).collect();
        Bundle { base: base.clone(), dims: vec![d; base.size()], gens }
    }

    pub fn zero(base: &Arc<FinGroupoid>) -> Self {
        Self::trivial(base, 0)
    }

    /// The regular representation `ℚ[G]` on `pt//G`, `ρ(g) e_h = e_{gh}`.
    pub fn regular(base: &Arc<FinGroupoid>) -> Result<Self> {
        if base.size() != 1 {
            return Err(Error::Precondition("regular representation lives on pt//G".into()));
        }
        let g = base.group().clone();
        let n = g.order();
        Self::from_action(base.clone(), vec![n], |a, _| {
            let mut m = QMat::zeros(n, n);
            for h in g.elements() {
                m.set(g.mul(a, h), h, Rat::from_integer(1.into()));
            }
            m
        })
    }

    pub fn base(&self) -> &Arc<FinGroupoid> {
        &self.base
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, x: usize) -> usize {
        self.dims[x]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn gen_matrix(&self, i: usize, x: usize) -> &QMat {
        &self.gens[i][x]
    }

    /// `ρ(g)_x : V_x → V_{g·x}`.
    pub fn rho(&self, g: usize, x: usize) -> QMat {
        let gr = self.base.group();
        let word = gr.word(g);
        let mut m = QMat::identity(self.dims[x]);
        let mut cur = x;
        for &i in word.iter().rev() {
            m = self.gens[i][cur].mul(&m);
            cur = self.base.act(gr.gens()[i], cur);
        }
        m
    }

    /// Same data on a structurally identical base (same carrier and group
    /// indexing), e.g. `pt × Y` in place of `Y`.
    pub fn rebase(&self, base: &Arc<FinGroupoid>) -> Result<Self> {
        if base.size() != self.base.size() || base.group().order() != self.base.group().order() {
            return Err(Error::BaseMismatch("rebase needs the same carrier and group sizes".into()));
        }
        for g in base.group().gens() {
            for x in base.points() {
                if base.act(*g, x) != self.base.act(*g, x) {
                    return Err(Error::BaseMismatch("rebase needs the same action".into()));
                }
            }
        }
        let gens = base.group().gens().iter().map(|&s| base.points().map(|x| self.rho(s, x)).collect()).collect();
        Ok(Bundle { base: base.clone(), dims: self.dims.clone(), gens })
    }

    pub fn same_base(&self, other: &Bundle) -> bool {
        self.base.same_as(&other.base)
    }

    /// Character of the stabilizer of `x` on `V_x`, indexed by group element
    /// (zero outside the stabilizer).
    pub fn stabilizer_character(&self, x: usize) -> Vec<Rat> {
        self.base
            .group()
            .elements()
            .map(|g| if self.base.act(g, x) == x { self.rho(g, x).trace() } else { Rat::zero() })
            .collect()
    }

    pub fn direct_sum(&self, other: &Bundle) -> Result<Bundle> {
        if !self.same_base(other) {
            return Err(Error::BaseMismatch("direct sum of bundles on different bases".into()));
        }
        let gens = self
            .gens
            .iter()
            .zip(&other.gens)
            .map(|(a, b)| a.iter().zip(b).map(|(m, n)| QMat::block_diag(&[m, n])).collect())
            .collect();
        let dims = self.dims.iter().zip(&other.dims).map(|(a, b)| a + b).collect();
        Ok(Bundle { base: self.base.clone(), dims, gens })
    }

    /// Generator matrices, indexed `[generator][point]`.
    pub fn gens(&self) -> &[Vec<QMat>] {
        &self.gens
    }
}

impl BundleMap {
    pub fn identity(v: &Bundle) -> Self {
        BundleMap { maps: v.dims().iter().map(|&d| QMat::identity(d)).collect() }
    }

    pub fn zero(src: &Bundle, tgt: &Bundle) -> Self {
        BundleMap { maps: src.dims().iter().zip(tgt.dims()).map(|(&a, &b)| QMat::zeros(b, a)).collect() }
    }

    /// Checks shapes and equivariance against every generator.
    pub fn validate(&self, src: &Bundle, tgt: &Bundle) -> Result<()> {
        if !src.same_base(tgt) {
            return Err(Error::BaseMismatch("bundle map between different bases".into()));
        }
        let base = src.base();
        if self.maps.len() != base.size() {
            return Err(Error::invalid("bundle map", "one matrix per point"));
        }
        for x in base.points() {
            let m = &self.maps[x];
            if m.rows() != tgt.dim(x) || m.cols() != src.dim(x) {
                return Err(Error::invalid("bundle map", format!("wrong shape at {}", base.label(x))));
            }
        }
        for i in 0..base.group().gens().len() {
            let s = base.group().gens()[i];
            for x in base.points() {
                let lhs = self.maps[base.act(s, x)].mul(src.gen_matrix(i, x));
                let rhs = tgt.gen_matrix(i, x).mul(&self.maps[x]);
                if lhs != rhs {
                    return Err(Error::invalid(
                        "bundle map",
                        format!("not equivariant at {} for {}", base.label(x), base.group().label(s)),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn compose(&self, after: &BundleMap) -> BundleMap {
        BundleMap { maps: self.maps.iter().zip(&after.maps).map(|(a, b)| b.mul(a)).collect() }
    }

    pub fn direct_sum(&self, other: &BundleMap) -> BundleMap {
        BundleMap { maps: self.maps.iter().zip(&other.maps).map(|(a, b)| QMat::block_diag(&[a, b])).collect() }
    }

    pub fn is_iso(&self) -> bool {
        self.maps.iter().all(|m| m.rows() == m.cols() && m.rank() == m.rows())
    }

    /// A basis of the equivariant maps `src → tgt`: commuting matrices at
    /// each orbit representative, transported along the orbit.
    pub fn equivariant_basis(src: &Bundle, tgt: &Bundle) -> Result<Vec<BundleMap>> {
        if !src.same_base(tgt) {
            return Err(Error::BaseMismatch("maps between bundles on different bases".into()));
        }
        let base = src.base();
        let mut out = Vec::new();
        for o in base.pi0_with_aut() {
            let x = o.rep;
            let (ds, dt) = (src.dim(x), tgt.dim(x));
            if ds * dt == 0 {
                continue;
            }
            // T(g) M = M S(g) on row-major vec(M)
            let mut blocks = Vec::new();
            for g in base.stabilizer(x) {
                let t = tgt.rho(g, x).kron(&QMat::identity(ds));
                let s = QMat::identity(dt).kron(&src.rho(g, x).transpose());
                blocks.push(t.sub(&s));
            }
            let refs: Vec<&QMat> = blocks.iter().collect();
            let sols = if refs.is_empty() { QMat::identity(dt * ds) } else { QMat::vstack(&refs).kernel() };
            let orbit = base.orbit_with_transporters(x);
            for j in 0..sols.cols() {
                let m = QMat::from_fn(dt, ds, |r, c| sols.get(r * ds + c, j).clone());
                let mut bm = BundleMap::zero(src, tgt);
                for &(y, k) in &orbit {
                    let kinv = base.group().inv(k);
                    bm.maps[y] = tgt.rho(k, x).mul(&m).mul(&src.rho(kinv, y));
                }
                out.push(bm);
            }
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Option<BundleMap> {
        self.maps.iter().map(|m| m.inverse()).collect::<Option<Vec<_>>>().map(|maps| BundleMap { maps })
    }
}

/// `f^!W`: the stalk at `x` is `W_{u(x)}`, with the group acting through `θ`.
pub fn pullback_shriek(f: &GroupoidMap, w: &Bundle) -> Result<Bundle> {
    if !w.base().same_as(f.cod()) {
        return Err(Error::BaseMismatch("pullback of a bundle not on the codomain".into()));
    }
    let dom = f.dom();
    let dims = dom.points().map(|x| w.dim(f.on_object(x))).collect();
    let gens = dom
        .group()
        .gens()
        .iter()
        .map(|&s| dom.points().map(|x| w.rho(f.theta(s), f.on_object(x))).collect())
        .collect();
    Bundle::unchecked(dom.clone(), dims, gens)
}

/// Pointwise tensor product on a common base. Row index `i * dim(W) + j`.
pub fn tensor_shriek(v: &Bundle, w: &Bundle) -> Result<Bundle> {
    if !v.same_base(w) {
        return Err(Error::BaseMismatch("tensor of bundles on different bases".into()));
    }
    let dims = v.dims().iter().zip(w.dims()).map(|(a, b)| a * b).collect();
    let gens = v.gens.iter().zip(&w.gens).map(|(a, b)| a.iter().zip(b).map(|(m, n)| m.kron(n)).collect()).collect();
    Bundle::unchecked(v.base().clone(), dims, gens)
}

/// `V1 ⊠ V2` on `Y1 × Y2`.
pub fn external_product(v1: &Bundle, v2: &Bundle) -> Result<Bundle> {
    let base = FinGroupoid::product(v1.base(), v2.base());
    external_product_on(v1, v2, &base)
}

/// `V1 ⊠ V2` on a given product groupoid whose factors match the two bases.
pub fn external_product_on(v1: &Bundle, v2: &Bundle, base: &Arc<FinGroupoid>) -> Result<Bundle> {
    let ok = base.factors().is_some_and(|f| f.len() == 2 && f[0].same_as(v1.base()) && f[1].same_as(v2.base()));
    if !ok {
        return Err(Error::BaseMismatch("external product on a groupoid that is not the product".into()));
    }
    let dims = base.points().map(|p| {
        let s = base.split(p);
        v1.dim(s[0]) * v2.dim(s[1])
    });
    let dims: Vec<usize> = dims.collect();
    let n1 = v1.base().group().gens().len();
    let mut gens = Vec::new();
    for i in 0..base.group().gens().len() {
        let row = base
            .points()
            .map(|p| {
                let s = base.split(p);
                if i < n1 {
                    v1.gen_matrix(i, s[0]).kron(&QMat::identity(v2.dim(s[1])))
                } else {
                    QMat::identity(v1.dim(s[0])).kron(v2.gen_matrix(i - n1, s[1]))
                }
            })
            .collect();
        gens.push(row);
    }
    Bundle::unchecked(base.clone(), dims, gens)
}

/// Stalkwise dual with the contragredient action `ρ^∨(g) = ρ(g⁻¹)ᵀ`.
pub fn verdier_dual(v: &Bundle) -> Bundle {
    let gens = v
        .gens
        .iter()
        .map(|row| row.iter().map(|m| m.inverse().expect("group elements act invertibly").transpose()).collect())
        .collect();
    Bundle { base: v.base().clone(), dims: v.dims.clone(), gens }
}

/// Isomorphism test through characters of stabilizers at orbit representatives.
pub fn isomorphic(v: &Bundle, w: &Bundle) -> bool {
    if !v.same_base(w) || v.dims() != w.dims() {
        return false;
    }
    v.base().pi0_with_aut().iter().all(|o| v.stabilizer_character(o.rep) == w.stabilizer_character(o.rep))
}
