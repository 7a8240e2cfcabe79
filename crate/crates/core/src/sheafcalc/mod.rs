//! Sheaves on finite groupoids at level 0 (functions on components) and
//! level 1/2 (equivariant bundles over the rationals).
//!
//! Finite groupoids are zero-dimensional and smooth here, so `f^!` is the
//! naive pullback and `⊗^!` the pointwise tensor product.

mod bundle;
pub mod kan;

use std::sync::Arc;

pub use bundle::{
    external_product, external_product_on, isomorphic, pullback_shriek, tensor_shriek, verdier_dual, Bundle,
    BundleMap,
};
pub use kan::{lan, norm_map, ran, ran_map, LanData, RanData};

use crate::coeff::{Coeff, CoeffSystem, Matrix, QMat};
use crate::groupoid::{CommaSquare, FinGroupoid, GroupoidMap};
use crate::{Error, Result};

/// A coefficient-valued function on the components of a groupoid.
#[derive(Clone, Debug)]
pub struct Fn0 {
    pub base: Arc<FinGroupoid>,
    pub system: CoeffSystem,
    /// One value per component, in `pi0_with_aut` order.
    pub values: Vec<Coeff>,
}

impl Fn0 {
    pub fn new(base: Arc<FinGroupoid>, system: CoeffSystem, values: Vec<Coeff>) -> Result<Self> {
        let n = base.pi0_with_aut().len();
        if values.len() != n {
            return Err(Error::invalid("function", format!("{} values for {n} components", values.len())));
        }
        if values.iter().any(|v| !system.contains(v)) {
            return Err(Error::UnsupportedCoeff(format!("value outside {}", system.name())));
        }
        Ok(Fn0 { base, system, values })
    }

    pub fn component_labels(&self) -> Vec<String> {
        self.base.pi0_with_aut().iter().map(|o| self.base.label(o.rep)).collect()
    }

    pub fn rows(&self) -> Vec<(String, String)> {
        self.component_labels().into_iter().zip(self.values.iter().map(|v| self.system.render(v))).collect()
    }
}

/// `f_*`: the right Kan extension.
pub fn pushforward_star(f: &GroupoidMap, v: &Bundle) -> Result<Bundle> {
    Ok(ran(f, v)?.result)
}

/// `f_!`: the left Kan extension (coinvariants).
pub fn pushforward_bang(f: &GroupoidMap, v: &Bundle) -> Result<Bundle> {
    Ok(lan(f, v)?.result)
}

/// `f_▲`. Over the rationals every finite groupoid is tame, so this is
/// the right Kan extension.
pub fn pushforward_triangle(f: &GroupoidMap, v: &Bundle) -> Result<Bundle> {
    pushforward_star(f, v)
}

/// The norm matrix from the class-sum presentation of level-0 functions
/// to the indicator presentation: diagonal with `|Stab|·1` per component.
pub fn omega_map(y: &FinGroupoid, system: &CoeffSystem) -> (Matrix, bool) {
    let orbits = y.pi0_with_aut();
    let labels: Vec<String> = orbits.iter().map(|o| y.label(o.rep)).collect();
    let m = Matrix::from_fn(system.clone(), labels.clone(), labels, |i, j| {
        if i == j {
            system.from_count(orbits[i].aut_order as u64)
        } else {
            system.zero()
        }
    })
    .expect("entries come from the system");
    let tame = m.is_invertible();
    (m, tame)
}

/// `C_▲(Y, V)`: invariant global sections, with its Kan extension data.
#[derive(Clone, Debug)]
pub struct Cochains {
    pub dim: usize,
    pub labels: Vec<String>,
    pub data: RanData,
}

pub fn cochains_triangle(v: &Bundle) -> Result<Cochains> {
    let p = GroupoidMap::to_point(v.base());
    let data = ran(&p, v)?;
    Ok(Cochains { dim: data.dim(0), labels: data.basis_labels(0), data })
}

impl Cochains {
    /// The linear map from cochain coordinates to the value at `x`.
    pub fn value_at(&self, x: usize) -> QMat {
        self.data.eval_matrix(0, x, 0)
    }

    /// Coordinates of the invariant section with the given values at every point.
    pub fn coords_of(&self, values: &[QMat]) -> Option<QMat> {
        let reps: Vec<QMat> = self.data.reps(0).iter().map(|&(x, _)| values[x].clone()).collect();
        let c = self.data.try_coords_from_rep_values(0, &reps)?;
        let consistent = self
            .data
            .source
            .base()
            .points()
            .all(|x| self.value_at(x).mul(&c) == values[x]);
        consistent.then_some(c)
    }
}

/// Report of a stalkwise comparison of two bundles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub pass: bool,
    pub failing_stalk: Option<String>,
    pub detail: String,
}

impl CheckReport {
    fn ok(detail: impl Into<String>) -> Self {
        CheckReport { pass: true, failing_stalk: None, detail: detail.into() }
    }

    fn fail(stalk: String, detail: impl Into<String>) -> Self {
        CheckReport { pass: false, failing_stalk: Some(stalk), detail: detail.into() }
    }
}

fn check_iso(map: &BundleMap, base: &FinGroupoid, what: &str) -> CheckReport {
    for (x, m) in map.maps.iter().enumerate() {
        if m.rows() != m.cols() {
            return CheckReport::fail(base.label(x), format!("{what}: dimensions {} vs {}", m.cols(), m.rows()));
        }
        if m.rank() != m.rows() {
            return CheckReport::fail(base.label(x), format!("{what}: comparison map is singular"));
        }
    }
    CheckReport::ok(format!("{what}: comparison invertible on {} stalks", map.maps.len()))
}

/// Base change `g^! f_* V → (q_B)_* (q_A)^! V` for the iso-comma square of
/// `f: A → C` and `g: B → C`, with `V` on `A`.
///
/// The comparison sends `s` to the section `t` with
/// `t_(p,k) = s_(a', h'⁻¹ θ_g(k))` where `p = (a', b', h')`.
pub fn base_change_map(sq: &CommaSquare, v: &Bundle) -> Result<(Bundle, Bundle, BundleMap)> {
    let (f, g) = (&sq.f, &sq.g);
    let push = ran(f, v)?;
    let lhs = pullback_shriek(g, &push.result)?;
    let w = pullback_shriek(&sq.to_a, v)?;
    let right = ran(&sq.to_b, &w)?;
    let gc = f.cod().group().clone();
    let mut maps = Vec::new();
    for b in g.dom().points() {
        let yc = g.on_object(b);
        let vals: Vec<QMat> = right
            .reps(b)
            .iter()
            .map(|&(p, k)| {
                let a2 = sq.to_a.on_object(p);
                let h2 = sq.twist[p];
                let h = gc.mul(gc.inv(h2), g.theta(k));
                push.eval_matrix(yc, a2, h)
            })
            .collect();
        let m = if vals.is_empty() {
            QMat::zeros(right.dim(b), push.dim(yc))
        } else {
            right.coords_from_rep_values(b, &vals)
        };
        maps.push(m);
    }
    Ok((lhs, right.result, BundleMap { maps }))
}

pub fn base_change_check(sq: &CommaSquare, v: &Bundle) -> Result<CheckReport> {
    let (lhs, rhs, map) = base_change_map(sq, v)?;
    map.validate(&lhs, &rhs).map_err(|e| Error::Law(format!("base change comparison is not equivariant: {e}")))?;
    Ok(check_iso(&map, sq.g.dom(), "base change"))
}

/// Projection formula `f_*V ⊗ W → f_*(V ⊗ f^!W)`, sending `s ⊗ w` to the
/// section `(x, h) ↦ s_(x,h) ⊗ ρ_W(h) w`.
pub fn projection_formula_map(f: &GroupoidMap, v: &Bundle, w: &Bundle) -> Result<(Bundle, Bundle, BundleMap)> {
    let push_v = ran(f, v)?;
    let lhs = tensor_shriek(&push_v.result, w)?;
    let inner = tensor_shriek(v, &pullback_shriek(f, w)?)?;
    let push = ran(f, &inner)?;
    let mut maps = Vec::new();
    for y in f.cod().points() {
        let vals: Vec<QMat> = push
            .reps(y)
            .iter()
            .map(|&(x, h)| push_v.eval_matrix(y, x, h).kron(&w.rho(h, y)))
            .collect();
        let m = if vals.is_empty() {
            QMat::zeros(push.dim(y), lhs.dim(y))
        } else {
            push.coords_from_rep_values(y, &vals)
        };
        maps.push(m);
    }
    Ok((lhs, push.result, BundleMap { maps }))
}

pub fn projection_formula_check(f: &GroupoidMap, v: &Bundle, w: &Bundle) -> Result<CheckReport> {
    let (lhs, rhs, map) = projection_formula_map(f, v, w)?;
    map.validate(&lhs, &rhs).map_err(|e| Error::Law(format!("projection map is not equivariant: {e}")))?;
    Ok(check_iso(&map, f.cod(), "projection formula"))
}

/// Unit `W → f_* f^! W` of the pullback/pushforward adjunction:
/// `w ↦ ((x, h) ↦ ρ_W(h) w)`.
pub fn adjunction_unit(f: &GroupoidMap, w: &Bundle) -> Result<(RanData, BundleMap)> {
    let pulled = pullback_shriek(f, w)?;
    let data = ran(f, &pulled)?;
    let maps = f
        .cod()
        .points()
        .map(|y| {
            let vals: Vec<QMat> = data.reps(y).iter().map(|&(_, h)| w.rho(h, y)).collect();
            if vals.is_empty() {
                QMat::zeros(data.dim(y), w.dim(y))
            } else {
                data.coords_from_rep_values(y, &vals)
            }
        })
        .collect();
    Ok((data, BundleMap { maps }))
}

/// Counit `f^! f_* V → V`: evaluate a section at `(x, e)`.
pub fn adjunction_counit(f: &GroupoidMap, data: &RanData) -> BundleMap {
    let e = f.cod().group().identity();
    let maps = f.dom().points().map(|x| data.eval_matrix(f.on_object(x), x, e)).collect();
    BundleMap { maps }
}

/// Both triangle identities of `f^! ⊣ f_*`, as exact matrix equalities.
pub fn adjunction_triangles(f: &GroupoidMap, v: &Bundle, w: &Bundle) -> Result<bool> {
    // f^!W → f^! f_* f^! W → f^!W
    let (data_w, eta_w) = adjunction_unit(f, w)?;
    let pulled_eta = BundleMap { maps: f.dom().points().map(|x| eta_w.maps[f.on_object(x)].clone()).collect() };
    let eps = adjunction_counit(f, &data_w);
    let first = pulled_eta.compose(&eps) == BundleMap::identity(&pullback_shriek(f, w)?);
    // f_*V → f_* f^! f_* V → f_*V
    let push = ran(f, v)?;
    let (data_pv, eta_pv) = adjunction_unit(f, &push.result)?;
    let eps_v = adjunction_counit(f, &push);
    let pushed_eps = ran_map(&data_pv, &push, &eps_v);
    let second = eta_pv.compose(&pushed_eps) == BundleMap::identity(&push.result);
    Ok(first && second)
}

/// The norm map `f_! V → f_* V`, its source and target.
pub fn norm_comparison(f: &GroupoidMap, v: &Bundle) -> Result<(Bundle, Bundle, BundleMap)> {
    let l = lan(f, v)?;
    let r = ran(f, v)?;
    let m = norm_map(&l, &r);
    Ok((l.result, r.result, m))
}

pub fn norm_is_iso(f: &GroupoidMap, v: &Bundle) -> Result<CheckReport> {
    let (l, r, m) = norm_comparison(f, v)?;
    m.validate(&l, &r).map_err(|e| Error::Law(format!("norm map is not equivariant: {e}")))?;
    Ok(check_iso(&m, f.cod(), "norm"))
}

/// The evaluation pairing between `C(Y, V)` and `C(Y, 𝔻V)`,
/// `⟨s, φ⟩ = Σ_x φ_x(s_x)`. Invertible over the rationals.
pub fn cochain_pairing(v: &Bundle) -> Result<QMat> {
    let c = cochains_triangle(v)?;
    let d = cochains_triangle(&verdier_dual(v))?;
    let mut acc = QMat::zeros(d.dim, c.dim);
    for x in v.base().points() {
        acc = acc.add(&d.value_at(x).transpose().mul(&c.value_at(x)));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests;
