//! Weil sheaves on finite groupoids with an automorphism `F`, the trace of
//! `F_*`, and functions on twisted fixed points.

use std::sync::Arc;

use crate::coeff::{Coeff, CoeffSystem, QMat};
use crate::groupoid::{twisted_fixed_points, FinGroupoid, GroupoidMap, TwistedFixedPoints};
use crate::kernelcalc::{class_of, convolution, convolve, identity_kernel, trace_lt_ag, Kernel, TraceSpace};
use crate::sheafcalc::{isomorphic, pullback_shriek, ran, tensor_shriek, Bundle, BundleMap, Fn0};
use crate::{Error, Result};

fn check_frobenius(y: &Arc<FinGroupoid>, f: &GroupoidMap) -> Result<()> {
    if !f.dom().same_as(y) || !f.cod().same_as(y) {
        return Err(Error::BaseMismatch("Frobenius must be an endomorphism of the groupoid".into()));
    }
    if !f.is_invertible() {
        return Err(Error::Precondition("Frobenius must be invertible".into()));
    }
    Ok(())
}

/// A bundle `V` with `α: F^! V → V`, i.e. `α_x: V_{F(x)} → V_x`.
#[derive(Clone, Debug)]
pub struct WeilSheaf {
    pub v: Bundle,
    pub f: GroupoidMap,
    pub alpha: BundleMap,
}

impl WeilSheaf {
    pub fn new(v: Bundle, f: GroupoidMap, alpha: BundleMap) -> Result<Self> {
        check_frobenius(v.base(), &f)?;
        let f = f.rebased(v.base(), v.base())?;
        alpha.validate(&pullback_shriek(&f, &v)?, &v)?;
        Ok(WeilSheaf { v, f, alpha })
    }

    /// `V` with `F = id` and `α = id`.
    pub fn trivial_structure(v: Bundle) -> Result<Self> {
        let f = GroupoidMap::identity(v.base());
        let alpha = BundleMap::identity(&v);
        Self::new(v, f, alpha)
    }

    pub fn base(&self) -> &Arc<FinGroupoid> {
        self.v.base()
    }

    pub fn direct_sum(&self, other: &WeilSheaf) -> Result<WeilSheaf> {
        same_frobenius(self, other)?;
        WeilSheaf::new(self.v.direct_sum(&other.v)?, self.f.clone(), self.alpha.direct_sum(&other.alpha))
    }

    /// `V ⊗^! V'` with `α ⊗ α'`.
    pub fn tensor(&self, other: &WeilSheaf) -> Result<WeilSheaf> {
        same_frobenius(self, other)?;
        let maps = self.alpha.maps.iter().zip(&other.alpha.maps).map(|(a, b)| a.kron(b)).collect();
        WeilSheaf::new(tensor_shriek(&self.v, &other.v)?, self.f.clone(), BundleMap { maps })
    }
}

fn same_frobenius(a: &WeilSheaf, b: &WeilSheaf) -> Result<()> {
    let same = a.base().same_as(b.base()) && a.base().points().all(|x| a.f.on_object(x) == b.f.on_object(x))
        && a.base().group().elements().all(|g| a.f.theta(g) == b.f.theta(g));
    if same {
        Ok(())
    } else {
        Err(Error::BaseMismatch("Weil sheaves over different Frobenii".into()))
    }
}

/// The inverse of an invertible groupoid endomorphism.
pub fn invert(f: &GroupoidMap) -> Result<GroupoidMap> {
    if !f.is_invertible() {
        return Err(Error::Precondition("map is not invertible".into()));
    }
    let (d, c) = (f.dom(), f.cod());
    let mut theta = vec![0; c.group().order()];
    for g in d.group().elements() {
        theta[f.theta(g)] = g;
    }
    let mut u = vec![0; c.size()];
    for x in d.points() {
        u[f.on_object(x)] = x;
    }
    GroupoidMap::new(c.clone(), d.clone(), theta, u)
}

/// The kernel of the correspondence `Y ← Y → Y` with legs `id` and `F`.
pub fn frobenius_kernel(y: &Arc<FinGroupoid>, f: &GroupoidMap) -> Result<Kernel> {
    check_frobenius(y, f)?;
    Kernel::graph(&f.rebased(y, y)?)
}

/// `F_*` is invertible: its kernel convolves with that of `F^{-1}` to the
/// identity, on both sides.
pub fn frobenius_is_invertible(y: &Arc<FinGroupoid>, f: &GroupoidMap) -> Result<bool> {
    let k = frobenius_kernel(y, f)?;
    let kinv = frobenius_kernel(y, &invert(f)?)?;
    let u = identity_kernel(y);
    Ok(isomorphic(convolve(&k, &kinv)?.payload(), u.payload())
        && isomorphic(convolve(&kinv, &k)?.payload(), u.payload()))
}

/// The trace of `F_*` with its basis indexed by components of the twisted
/// fixed points, in their component order.
#[derive(Clone, Debug)]
pub struct FrobTrace {
    pub space: TraceSpace,
    pub fixed: TwistedFixedPoints,
}

impl FrobTrace {
    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.space.labels
    }
}

pub fn tr_frob(y: &Arc<FinGroupoid>, f: &GroupoidMap) -> Result<FrobTrace> {
    let k = frobenius_kernel(y, f)?;
    let lt = trace_lt_ag(&k)?;
    let fixed = twisted_fixed_points(y, &f.rebased(y, y)?)?;
    let fix = &fixed.groupoid;
    let mut cols = Vec::new();
    let mut labels = Vec::new();
    for o in fix.pi0_with_aut() {
        let label = fix.label(o.rep);
        let i = lt.labels.iter().position(|l| *l == label).ok_or_else(|| {
            Error::Law(format!("twisted fixed class {label} is missing from the trace basis"))
        })?;
        cols.push(i);
        labels.push(label);
    }
    if cols.len() != lt.dim {
        return Err(Error::Law("trace dimension differs from the number of twisted fixed classes".into()));
    }
    let basis = lt.basis.select_cols(&cols);
    let space = TraceSpace { dim: lt.dim, labels, cochains: lt.cochains, basis };
    Ok(FrobTrace { space, fixed })
}

/// The trace function: at `(x, g)` with `g·F(x) = x`, the trace of
/// `α_x ∘ ρ(g⁻¹): V_x → V_{F(x)} → V_x`.
pub fn sfunct(w: &WeilSheaf) -> Result<Fn0> {
    let y = w.base();
    let gr = y.group();
    let fixed = twisted_fixed_points(y, &w.f)?;
    let fix = &fixed.groupoid;
    let value = |p: usize| {
        let (x, g) = fixed.pairs[p];
        w.alpha.maps[x].mul(&w.v.rho(gr.inv(g), x)).trace()
    };
    let mut values = Vec::new();
    for o in fix.pi0_with_aut() {
        let v = value(o.rep);
        if let Some(&p) = o.members.iter().find(|&&p| value(p) != v) {
            return Err(Error::Law(format!(
                "trace function is not constant on the class of {}: differs at {}",
                fix.label(o.rep),
                fix.label(p)
            )));
        }
        values.push(Coeff::Rat(v));
    }
    Fn0::new(fix.clone(), CoeffSystem::Rational, values)
}

/// Coordinates of a trace element in the fixed-class basis, as a function.
pub fn lt_naive(tr: &FrobTrace, t: &QMat) -> Result<Fn0> {
    if t.rows() != tr.dim() || t.cols() != 1 {
        return Err(Error::invalid("trace element", format!("expected a {}×1 column", tr.dim())));
    }
    let c = tr.space.basis.solve(t).ok_or_else(|| Error::Law("trace basis does not span".into()))?;
    let values = (0..tr.dim()).map(|i| Coeff::Rat(c.get(i, 0).clone())).collect();
    Fn0::new(tr.fixed.groupoid.clone(), CoeffSystem::Rational, values)
}

/// `V → [K_F](V)`, the transpose of `α` under `F^* ⊣ F_*`.
fn structure_map(w: &WeilSheaf, k: &Kernel) -> Result<BundleMap> {
    let y = w.base();
    let col = Kernel::column(&w.v)?;
    let conv = convolution(&col, k)?;
    let c = GroupoidMap::graph(&w.f)?;
    let kdata = ran(&c, &Bundle::trivial(y, 1))?;
    let gyy = c.cod().group().clone();
    let maps = y
        .points()
        .map(|cc| {
            let cols = w.v.dim(cc);
            conv.coords(0, cc, 1, cols, |b| {
                let s = k.index(b, cc);
                let dk = k.dim(b, cc);
                let reps = kdata.reps(s);
                // V_c → V_b for each representative (z, (h1, h2))
                let per_rep: Vec<QMat> = reps
                    .iter()
                    .map(|&(z, h)| {
                        let p = gyy.split(h);
                        let h1inv = y.group().inv(p[0]);
                        w.v.rho(h1inv, z).mul(&w.alpha.maps[z]).mul(&w.v.rho(p[1], cc))
                    })
                    .collect();
                let db = w.v.dim(b);
                let blocks: Vec<QMat> = (0..db)
                    .map(|i| {
                        let rows: Vec<QMat> = per_rep.iter().map(|m| m.select(&[i], &(0..cols).collect::<Vec<_>>())).collect();
                        if rows.is_empty() {
                            QMat::zeros(dk, cols)
                        } else {
                            kdata.coords_from_rep_values(s, &rows)
                        }
                    })
                    .collect();
                let refs: Vec<&QMat> = blocks.iter().collect();
                if refs.is_empty() {
                    QMat::zeros(0, cols)
                } else {
                    QMat::vstack(&refs)
                }
            })
        })
        .collect();
    Ok(BundleMap { maps })
}

/// The class of `(V, α)` in the trace of `F_*`, in cochain coordinates.
pub fn cl_weil(w: &WeilSheaf) -> Result<QMat> {
    let k = frobenius_kernel(w.base(), &w.f)?;
    let alpha = structure_map(w, &k)?;
    class_of(&w.v, &alpha, &k)
}

/// `g_▲ W` for `g: Y → Y'` that is the identity on groups and intertwines
/// the Frobenii: `g ∘ F = F' ∘ g`.
pub fn weil_pushforward(w: &WeilSheaf, g: &GroupoidMap, f2: &GroupoidMap) -> Result<WeilSheaf> {
    let (y, y2) = (w.base(), g.cod());
    if !g.dom().same_as(y) {
        return Err(Error::BaseMismatch("pushforward along a map out of another groupoid".into()));
    }
    if !y.group().same_as(y2.group()) || y.group().elements().any(|h| g.theta(h) != h) {
        return Err(Error::Precondition("Weil pushforward needs a map that is the identity on groups".into()));
    }
    check_frobenius(y2, f2)?;
    let commutes = y.points().all(|x| g.on_object(w.f.on_object(x)) == f2.on_object(g.on_object(x)))
        && y.group().elements().all(|h| w.f.theta(h) == f2.theta(h));
    if !commutes {
        return Err(Error::Precondition("the map does not intertwine the Frobenii".into()));
    }
    let data = ran(g, &w.v)?;
    let maps = y2
        .points()
        .map(|p| {
            let src = f2.on_object(p);
            let values: Vec<QMat> = data
                .reps(p)
                .iter()
                .map(|&(x, h)| w.alpha.maps[x].mul(&data.eval_matrix(src, w.f.on_object(x), f2.theta(h))))
                .collect();
            if values.is_empty() {
                QMat::zeros(0, data.dim(src))
            } else {
                data.coords_from_rep_values(p, &values)
            }
        })
        .collect();
    WeilSheaf::new(data.result.clone(), f2.clone(), BundleMap { maps })
}

#[cfg(test)]
mod tests;
