//! Kernels between finite groupoids and their convolution.
//!
//! A kernel from `Y1` to `Y2` is a bundle on `Y1 × Y2`. Composition reads
//! left to right: `convolve(K, L)` is "first `K`, then `L`", so
//! `act(convolve(K, L), V) = act(L, act(K, V))`.
//!
//! The convolution `K ⋆ L` at `(a, c)` is the space of invariant sections
//! over the middle variable; every such section is evaluated at the comma
//! objects `((a, b, c), e)`, which is how all structural 2-cells below
//! (whiskering, associators, unitors) are written down.

mod adjoint;
mod trace;

#[cfg(test)]
mod tests;

use std::sync::Arc;

use crate::coeff::QMat;
use crate::groupoid::{FinGroupoid, GroupoidMap};
use crate::sheafcalc::{pullback_shriek, ran, ran_map, tensor_shriek, Bundle, BundleMap, RanData};
use crate::{Error, Result};

pub use adjoint::{
    beck_chevalley_check, beck_chevalley_oracle, dual_kernel, kernel_left_adjoint, kernel_right_adjoint, Adjunction,
    BcReport, BcSquare, RightAdjoint, Side,
};
pub use trace::{
    class_of, class_oracle, compare_traces, diagonal_cochains, duality_data, trace_functoriality, trace_lt_ag,
    trace_via_duality, DualityData, Functoriality, TraceComparison, TraceSpace,
};

/// A bundle on `left × right`.
#[derive(Clone, Debug)]
pub struct Kernel {
    left: Arc<FinGroupoid>,
    right: Arc<FinGroupoid>,
    payload: Bundle,
    /// The correspondence `Z → left × right` whose pushforward this is, if known.
    origin: Option<GroupoidMap>,
}

impl Kernel {
    pub fn new(left: Arc<FinGroupoid>, right: Arc<FinGroupoid>, payload: Bundle) -> Result<Self> {
        let base = FinGroupoid::product(&left, &right);
        if !payload.base().same_as(&base) {
            return Err(Error::BaseMismatch("kernel payload must live on the product of its feet".into()));
        }
        let payload = payload.rebase(&base)?;
        Ok(Kernel { left, right, payload, origin: None })
    }

    /// A kernel between finite sets, given by the dimension of each entry.
    pub fn from_dims(dims: &[Vec<usize>]) -> Result<Self> {
        let cols = dims.first().map_or(0, |r| r.len());
        if dims.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("kernel", "ragged dimension matrix"));
        }
        let left = FinGroupoid::discrete_n(dims.len());
        let right = FinGroupoid::discrete_n(cols);
        let base = FinGroupoid::product(&left, &right);
        let payload = Bundle::new(base, dims.concat(), vec![])?;
        Ok(Kernel { left, right, payload, origin: None })
    }

    /// `c_▲(ω_Z)` for a correspondence `c: Z → Y1 × Y2`.
    pub fn from_correspondence(c: &GroupoidMap) -> Result<Self> {
        let feet = c.cod().factors().filter(|f| f.len() == 2).ok_or_else(|| {
            Error::invalid("correspondence", "codomain must be a product of two groupoids")
        })?;
        let (left, right) = (feet[0].clone(), feet[1].clone());
        let data = ran(c, &Bundle::trivial(c.dom(), 1))?;
        let base = FinGroupoid::product(&left, &right);
        let payload = data.result.rebase(&base)?;
        let c = c.rebased(c.dom(), &base)?;
        Ok(Kernel { left, right, payload, origin: Some(c) })
    }

    /// The kernel of `f_*`: the correspondence `(id, f)`.
    pub fn graph(f: &GroupoidMap) -> Result<Self> {
        Self::from_correspondence(&GroupoidMap::graph(f)?)
    }

    /// `V` on `Y`, viewed as a kernel `pt → Y`.
    pub fn column(v: &Bundle) -> Result<Self> {
        let pt = FinGroupoid::point();
        let base = FinGroupoid::product(&pt, v.base());
        let payload = Bundle::new(base, v.dims().to_vec(), v.gens().to_vec())?;
        Ok(Kernel { left: pt, right: v.base().clone(), payload, origin: None })
    }

    /// `V` on `Y`, viewed as a kernel `Y → pt`.
    pub fn row(v: &Bundle) -> Result<Self> {
        let pt = FinGroupoid::point();
        let base = FinGroupoid::product(v.base(), &pt);
        let payload = Bundle::new(base, v.dims().to_vec(), v.gens().to_vec())?;
        Ok(Kernel { left: v.base().clone(), right: pt, payload, origin: None })
    }

    pub fn left(&self) -> &Arc<FinGroupoid> {
        &self.left
    }

    pub fn right(&self) -> &Arc<FinGroupoid> {
        &self.right
    }

    pub fn payload(&self) -> &Bundle {
        &self.payload
    }

    pub fn origin(&self) -> Option<&GroupoidMap> {
        self.origin.as_ref()
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        self.payload.base().join(&[a, b])
    }

    pub fn dim(&self, a: usize, b: usize) -> usize {
        self.payload.dim(self.index(a, b))
    }

    /// Stalk dimensions as a `left × right` table.
    pub fn dims(&self) -> Vec<Vec<usize>> {
        self.left.points().map(|a| self.right.points().map(|b| self.dim(a, b)).collect()).collect()
    }

    pub fn is_endo(&self) -> bool {
        self.left.same_as(&self.right)
    }

    /// The payload of a kernel `pt → Y` as a bundle on `Y`.
    pub fn column_bundle(&self) -> Result<Bundle> {
        if self.left.size() != 1 || self.left.group().order() != 1 {
            return Err(Error::invalid("kernel", "not a column kernel"));
        }
        Bundle::new(self.right.clone(), self.payload.dims().to_vec(), self.payload.gens().to_vec())
    }
}

/// `K ⋆ L` with the Kan extension data needed to evaluate its sections.
#[derive(Clone, Debug)]
pub struct Convolution {
    pub first: Kernel,
    pub second: Kernel,
    pub data: RanData,
    pub result: Kernel,
    triple: Arc<FinGroupoid>,
}

pub fn convolution(k: &Kernel, l: &Kernel) -> Result<Convolution> {
    if !k.right.same_as(&l.left) {
        return Err(Error::BaseMismatch("convolution needs the right foot of the first kernel to match the left foot of the second".into()));
    }
    let triple = FinGroupoid::product_many(vec![k.left.clone(), k.right.clone(), l.right.clone()]);
    let p12 = GroupoidMap::projection(&triple, &[0, 1])?;
    let p23 = GroupoidMap::projection(&triple, &[1, 2])?;
    let p13 = GroupoidMap::projection(&triple, &[0, 2])?;
    let integrand = tensor_shriek(&pullback_shriek(&p12, &k.payload)?, &pullback_shriek(&p23, &l.payload)?)?;
    let data = ran(&p13, &integrand)?;
    let base = FinGroupoid::product(&k.left, &l.right);
    let result = Kernel { left: k.left.clone(), right: l.right.clone(), payload: data.result.rebase(&base)?, origin: None };
    Ok(Convolution { first: k.clone(), second: l.clone(), data, result, triple })
}

pub fn convolve(k: &Kernel, l: &Kernel) -> Result<Kernel> {
    Ok(convolution(k, l)?.result)
}

/// `[K](V)`: pull back along the first foot, tensor with `K`, push to the second.
pub fn act(k: &Kernel, v: &Bundle) -> Result<Bundle> {
    if !v.base().same_as(&k.left) {
        return Err(Error::BaseMismatch("acted-on bundle must live on the left foot".into()));
    }
    convolve(&Kernel::column(v)?, k)?.column_bundle()
}

impl Convolution {
    pub fn stalk(&self, a: usize, c: usize) -> usize {
        self.result.index(a, c)
    }

    /// The value at `((a, b, c), e)` of a section over `(a, c)`, as a map
    /// from the stalk of `K ⋆ L` to `K_ab ⊗ L_bc`.
    pub fn value_at(&self, a: usize, b: usize, c: usize) -> QMat {
        let x = self.triple.join(&[a, b, c]);
        let e = self.data.map.cod().group().identity();
        self.data.eval_matrix(self.stalk(a, c), x, e)
    }

    /// Coordinates at `(a, c)` of the section with value `f(b)` at each
    /// middle representative. Values may carry an extra leading tensor
    /// factor of dimension `prefix`, which is kept in front.
    pub fn coords(&self, a: usize, c: usize, prefix: usize, cols: usize, mut f: impl FnMut(usize) -> QMat) -> QMat {
        let y = self.stalk(a, c);
        let e = self.data.map.cod().group().identity();
        let dim = self.data.dim(y);
        let values: Vec<QMat> = self
            .data
            .reps(y)
            .iter()
            .map(|&(x, h)| {
                debug_assert_eq!(h, e);
                f(self.triple.split(x)[1])
            })
            .collect();
        if values.is_empty() {
            return QMat::zeros(prefix * dim, cols);
        }
        let blocks: Vec<QMat> = (0..prefix)
            .map(|i| {
                let part: Vec<QMat> = values
                    .iter()
                    .map(|v| {
                        let q = v.rows() / prefix;
                        let rows: Vec<usize> = (i * q..(i + 1) * q).collect();
                        let all: Vec<usize> = (0..cols).collect();
                        v.select(&rows, &all)
                    })
                    .collect();
                self.data.coords_from_rep_values(y, &part)
            })
            .collect();
        let refs: Vec<&QMat> = blocks.iter().collect();
        if refs.is_empty() {
            QMat::zeros(0, cols)
        } else {
            QMat::vstack(&refs)
        }
    }
}

/// The identity kernel `Δ_*(ω)` together with its Kan extension data.
#[derive(Clone, Debug)]
pub struct Unit {
    pub kernel: Kernel,
    pub data: RanData,
}

impl Unit {
    pub fn new(y: &Arc<FinGroupoid>) -> Result<Self> {
        let delta = GroupoidMap::diagonal(y);
        let data = ran(&delta, &Bundle::trivial(y, 1))?;
        let payload = data.result.clone();
        let kernel = Kernel { left: y.clone(), right: y.clone(), payload, origin: Some(delta) };
        Ok(Unit { kernel, data })
    }

    /// Evaluation at the identity arrow of `a`: `U_aa → ℚ`.
    pub fn at_identity(&self, a: usize) -> QMat {
        let e = self.data.map.cod().group().identity();
        self.data.eval_matrix(self.kernel.index(a, a), a, e)
    }
}

pub fn identity_kernel(y: &Arc<FinGroupoid>) -> Kernel {
    Unit::new(y).expect("the diagonal pushforward always exists").kernel
}

/// `φ ⋆ L: K ⋆ L → K' ⋆ L`.
pub fn whisker_right(phi: &BundleMap, src: &Convolution, tgt: &Convolution) -> BundleMap {
    let t = &src.triple;
    let maps = t
        .points()
        .map(|x| {
            let p = t.split(x);
            let l = src.second.dim(p[1], p[2]);
            phi.maps[src.first.index(p[0], p[1])].kron(&QMat::identity(l))
        })
        .collect();
    ran_map(&src.data, &tgt.data, &BundleMap { maps })
}

/// `K ⋆ ψ: K ⋆ L → K ⋆ L'`.
pub fn whisker_left(psi: &BundleMap, src: &Convolution, tgt: &Convolution) -> BundleMap {
    let t = &src.triple;
    let maps = t
        .points()
        .map(|x| {
            let p = t.split(x);
            let k = src.first.dim(p[0], p[1]);
            QMat::identity(k).kron(&psi.maps[src.second.index(p[1], p[2])])
        })
        .collect();
    ran_map(&src.data, &tgt.data, &BundleMap { maps })
}

/// The four convolutions of a triple and the associator between them.
#[derive(Clone, Debug)]
pub struct Assoc {
    pub kl: Convolution,
    pub lm: Convolution,
    /// `(K ⋆ L) ⋆ M`
    pub outer_left: Convolution,
    /// `K ⋆ (L ⋆ M)`
    pub outer_right: Convolution,
    /// `(K ⋆ L) ⋆ M → K ⋆ (L ⋆ M)`
    pub map: BundleMap,
}

impl Assoc {
    pub fn new(k: &Kernel, l: &Kernel, m: &Kernel) -> Result<Self> {
        let kl = convolution(k, l)?;
        let lm = convolution(l, m)?;
        let outer_left = convolution(&kl.result, m)?;
        let outer_right = convolution(k, &lm.result)?;
        let map = associator(&kl, &outer_left, &lm, &outer_right);
        Ok(Assoc { kl, lm, outer_left, outer_right, map })
    }

    pub fn inverse(&self) -> BundleMap {
        self.map.inverse().expect("associators are invertible")
    }
}

/// `(K ⋆ L) ⋆ M → K ⋆ (L ⋆ M)`: the value at `((a, b, d), e)` has inner
/// values `s_(a,c,d)` evaluated at `(a, b, c)`.
pub fn associator(kl: &Convolution, kl_m: &Convolution, lm: &Convolution, k_lm: &Convolution) -> BundleMap {
    let (k, m) = (&kl.first, &lm.second);
    let base = k_lm.result.payload.base().clone();
    let mut maps = vec![QMat::zeros(0, 0); base.size()];
    for a in k.left.points() {
        for d in m.right.points() {
            let cols = kl_m.result.dim(a, d);
            let block = k_lm.coords(a, d, 1, cols, |b| {
                lm.coords(b, d, k.dim(a, b), cols, |c| {
                    let inner = kl.value_at(a, b, c).kron(&QMat::identity(m.dim(c, d)));
                    inner.mul(&kl_m.value_at(a, c, d))
                })
            });
            maps[k_lm.result.index(a, d)] = block;
        }
    }
    BundleMap { maps }
}

/// `λ: U ⋆ K → K`.
pub fn left_unitor(u: &Unit, uk: &Convolution) -> BundleMap {
    let k = &uk.second;
    let maps = k
        .payload
        .base()
        .points()
        .map(|p| {
            let s = k.payload.base().split(p);
            let (a, c) = (s[0], s[1]);
            u.at_identity(a).kron(&QMat::identity(k.dim(a, c))).mul(&uk.value_at(a, a, c))
        })
        .collect();
    BundleMap { maps }
}

/// `ρ: K ⋆ U → K`.
pub fn right_unitor(u: &Unit, ku: &Convolution) -> BundleMap {
    let k = &ku.first;
    let maps = k
        .payload
        .base()
        .points()
        .map(|p| {
            let s = k.payload.base().split(p);
            let (a, c) = (s[0], s[1]);
            QMat::identity(k.dim(a, c)).kron(&u.at_identity(c)).mul(&ku.value_at(a, c, c))
        })
        .collect();
    BundleMap { maps }
}

/// Apply maps in order: `chain(&[f, g])` is `g ∘ f`.
pub fn chain(maps: &[&BundleMap]) -> BundleMap {
    let mut it = maps.iter();
    let first = (*it.next().expect("at least one map")).clone();
    it.fold(first, |acc, m| acc.compose(m))
}

/// `Δ^!` of a map of kernels on `Y × Y`.
pub fn diagonal_restrict(k: &Kernel, map: &BundleMap) -> BundleMap {
    BundleMap { maps: k.left.points().map(|a| map.maps[k.index(a, a)].clone()).collect() }
}
