//! Traces of endo-kernels, classes, and functoriality of traces.

use std::collections::HashMap;
use std::sync::Arc;

use crate::coeff::{rat, QMat, Rat};
use crate::groupoid::{iso_comma_square, FinGroupoid, GroupoidMap};
use crate::sheafcalc::{cochains_triangle, pullback_shriek, ran, ran_map, Bundle, BundleMap, Cochains};
use crate::{Error, Result};

use super::{
    act, convolution, diagonal_restrict, kernel_right_adjoint, left_unitor, right_unitor, whisker_left,
    whisker_right, Adjunction, Assoc, Kernel, Unit,
};

/// A trace space: cochains of a diagonal restriction with a labeled basis.
#[derive(Clone, Debug)]
pub struct TraceSpace {
    pub dim: usize,
    pub labels: Vec<String>,
    pub cochains: Cochains,
    /// Columns are the labeled basis vectors in cochain coordinates.
    pub basis: QMat,
}

impl TraceSpace {
    /// The decategorified trace: the dimension, as a rational.
    pub fn value(&self) -> Rat {
        rat(self.dim as i64)
    }

    /// Express cochain coordinates in the labeled basis.
    pub fn in_basis(&self, v: &QMat) -> QMat {
        self.basis.solve(v).expect("the labeled basis spans")
    }
}

fn endo(k: &Kernel) -> Result<()> {
    if k.is_endo() {
        Ok(())
    } else {
        Err(Error::BaseMismatch("trace needs a kernel with equal feet".into()))
    }
}

/// `C(Y, Δ^! K)`.
pub fn diagonal_cochains(k: &Kernel) -> Result<Cochains> {
    endo(k)?;
    let d = GroupoidMap::diagonal(k.left()).rebased(k.left(), k.payload().base())?;
    cochains_triangle(&pullback_shriek(&d, k.payload())?)
}

/// Indicator functions of the components of the fixed-point groupoid of a
/// correspondence, written as cochains of `Δ^! c_▲(ω)`.
fn fixed_point_basis(k: &Kernel, c: &GroupoidMap, cochains: &Cochains) -> Result<(Vec<String>, QMat)> {
    let y = k.left().clone();
    let delta = GroupoidMap::diagonal(&y).rebased(&y, c.cod())?;
    let sq = iso_comma_square(c, &delta)?;
    let fix = sq.apex.clone();
    let index: HashMap<(usize, usize, usize), usize> =
        fix.points().map(|p| ((sq.to_a.on_object(p), sq.to_b.on_object(p), sq.twist[p]), p)).collect();
    let comps = fix.pi0_with_aut();
    let comp_of = fix.component_index();
    let data = ran(c, &Bundle::trivial(c.dom(), 1))?;
    let gyy = c.cod().group().clone();
    let gy = y.group().clone();
    let z = c.dom().clone();
    let mut labels = Vec::new();
    let mut cols = Vec::new();
    for (i, o) in comps.iter().enumerate() {
        // the member with trivial first twist and least (z, g)
        let rep = o
            .members
            .iter()
            .copied()
            .filter(|&p| gyy.split(sq.twist[p])[0] == gy.identity())
            .min_by_key(|&p| (sq.to_a.on_object(p), gyy.split(sq.twist[p])[1]))
            .expect("every component has a member with trivial first twist");
        let parts = gyy.split(sq.twist[rep]);
        labels.push(format!("({},{})", z.label(sq.to_a.on_object(rep)), gy.label(parts[1])));
        let mut values = Vec::new();
        for a in y.points() {
            let s = k.index(a, a);
            let vals: Vec<QMat> = data
                .reps(s)
                .iter()
                .map(|&(zz, h)| {
                    let p = index[&(zz, a, gyy.inv(h))];
                    QMat::from_fn(1, 1, |_, _| rat(i64::from(comp_of[p] == i)))
                })
                .collect();
            values.push(if vals.is_empty() { QMat::zeros(data.dim(s), 1) } else { data.coords_from_rep_values(s, &vals) });
        }
        let col = cochains.coords_of(&values).ok_or_else(|| Error::Law("fixed-point indicator is not invariant".into()))?;
        cols.push(col);
    }
    let refs: Vec<&QMat> = cols.iter().collect();
    let basis = if refs.is_empty() { QMat::zeros(cochains.dim, 0) } else { QMat::hstack(&refs) };
    if basis.cols() != cochains.dim || basis.rank() != cochains.dim {
        return Err(Error::Law("fixed-point components do not give a basis of the trace".into()));
    }
    Ok((labels, basis))
}

/// `C(Y, Δ^! K)` with a basis labeled by components of the fixed points
/// when the kernel comes from a correspondence, and by orbit
/// representatives otherwise.
pub fn trace_lt_ag(k: &Kernel) -> Result<TraceSpace> {
    let cochains = diagonal_cochains(k)?;
    let (labels, basis) = match k.origin() {
        Some(c) => fixed_point_basis(k, c, &cochains)?,
        None => (cochains.labels.clone(), QMat::identity(cochains.dim)),
    };
    Ok(TraceSpace { dim: cochains.dim, labels, cochains, basis })
}

/// Both trace computations and the comparison between them.
#[derive(Clone, Debug)]
pub struct TraceComparison {
    /// `C(Y, Δ^!(U ⋆ K))`: unit, then `id ⊗ K`, then counit.
    pub duality: TraceSpace,
    pub lt: TraceSpace,
    /// From duality coordinates to `lt` coordinates.
    pub lt_ag: QMat,
    pub invertible: bool,
}

pub fn compare_traces(k: &Kernel) -> Result<TraceComparison> {
    endo(k)?;
    let u = Unit::new(k.left())?;
    let uk = convolution(&u.kernel, k)?;
    let lam = left_unitor(&u, &uk);
    let dc = diagonal_cochains(&uk.result)?;
    let lt = trace_lt_ag(k)?;
    let phi = diagonal_restrict(&uk.result, &lam);
    let m = ran_map(&dc.data, &lt.cochains.data, &phi).maps.swap_remove(0);
    let invertible = m.rows() == m.cols() && m.rank() == m.rows();
    let (labels, basis) = if invertible {
        (lt.labels.clone(), m.inverse().expect("checked invertible").mul(&lt.basis))
    } else {
        (dc.labels.clone(), QMat::identity(dc.dim))
    };
    let duality = TraceSpace { dim: dc.dim, labels, cochains: dc, basis };
    Ok(TraceComparison { duality, lt, lt_ag: m, invertible })
}

pub fn trace_via_duality(k: &Kernel) -> Result<TraceSpace> {
    Ok(compare_traces(k)?.duality)
}

/// Self-duality data of `Y`: the unit kernel and the counit `K ↦ C(Y, Δ^! K)`.
#[derive(Clone, Debug)]
pub struct DualityData {
    pub y: Arc<FinGroupoid>,
    pub unit: Unit,
    /// The snake composite `U ⋆ U`, which must identify with `U`.
    pub snake: Kernel,
}

/// Builds the duality data and checks the zig-zag identities: the two
/// identifications of `U ⋆ U` with `U` (through either factor) agree and are
/// invertible.
pub fn duality_data(y: &Arc<FinGroupoid>) -> Result<DualityData> {
    let unit = Unit::new(y)?;
    let uu = convolution(&unit.kernel, &unit.kernel)?;
    let l = left_unitor(&unit, &uu);
    let r = right_unitor(&unit, &uu);
    if l != r || !l.is_iso() {
        return Err(Error::Law("zig-zag identity fails for the self-duality".into()));
    }
    Ok(DualityData { y: y.clone(), unit, snake: uu.result })
}

impl DualityData {
    pub fn counit(&self, k: &Kernel) -> Result<Cochains> {
        if !k.left().same_as(&self.y) {
            return Err(Error::BaseMismatch("counit of a kernel on another groupoid".into()));
        }
        diagonal_cochains(k)
    }
}

fn swap_factors(p: usize, q: usize) -> QMat {
    // kron(A, B) index i*q + j  ↦  kron(B, A) index j*p + i
    QMat::from_fn(p * q, p * q, |r, c| {
        let (i, j) = (c / q, c % q);
        rat(i64::from(r == j * p + i))
    })
}

/// `C(Y1, Δ^!(A ⋆ B)) → C(Y2, Δ^!(B ⋆ A))` for `A: Y1 → Y2`, `B: Y2 → Y1`:
/// both are invariant sections of `A ⊗ B` over `Y1 × Y2`.
fn cyclic(a: &Kernel, b: &Kernel) -> Result<QMat> {
    let ab = convolution(a, b)?;
    let ba = convolution(b, a)?;
    let c1 = diagonal_cochains(&ab.result)?;
    let c2 = diagonal_cochains(&ba.result)?;
    let n = c1.dim;
    let values: Vec<QMat> = a
        .right()
        .points()
        .map(|y2| {
            ba.coords(y2, y2, 1, n, |y1| {
                swap_factors(a.dim(y1, y2), b.dim(y2, y1)).mul(&ab.value_at(y1, y2, y1)).mul(&c1.value_at(y1))
            })
        })
        .collect();
    c2.coords_of(&values).ok_or_else(|| Error::Law("cyclic identification is not invariant".into()))
}

/// A step between traces: a 2-cell of endo-kernels, or the cyclic move.
enum Step {
    Cell { src: Kernel, tgt: Kernel, map: BundleMap },
    Cyclic { a: Kernel, b: Kernel },
}

fn induced(src: &Kernel, tgt: &Kernel, map: &BundleMap) -> Result<QMat> {
    let cs = diagonal_cochains(src)?;
    let ct = diagonal_cochains(tgt)?;
    Ok(ran_map(&cs.data, &ct.data, &diagonal_restrict(src, map)).maps.swap_remove(0))
}

/// The same step between duality-model traces `C(Y, Δ^!(U ⋆ X))`.
fn induced_dual(src: &Kernel, tgt: &Kernel, map: &BundleMap) -> Result<QMat> {
    let u = Unit::new(src.left())?;
    let us = convolution(&u.kernel, src)?;
    let ut = convolution(&u.kernel, tgt)?;
    induced(&us.result, &ut.result, &whisker_left(map, &us, &ut))
}

/// `C(Y, Δ^!(U ⋆ X)) → C(Y, Δ^!X)` through the left unitor.
fn unitor_on_traces(x: &Kernel) -> Result<QMat> {
    let u = Unit::new(x.left())?;
    let ux = convolution(&u.kernel, x)?;
    induced(&ux.result, x, &left_unitor(&u, &ux))
}

fn run(steps: &[Step], dual: bool) -> Result<QMat> {
    let mut acc: Option<QMat> = None;
    for s in steps {
        let m = match (s, dual) {
            (Step::Cell { src, tgt, map }, false) => induced(src, tgt, map)?,
            (Step::Cell { src, tgt, map }, true) => induced_dual(src, tgt, map)?,
            (Step::Cyclic { a, b }, false) => cyclic(a, b)?,
            (Step::Cyclic { a, b }, true) => {
                let ab = convolve_kernel(a, b)?;
                let ba = convolve_kernel(b, a)?;
                let into = unitor_on_traces(&ab)?;
                let out = unitor_on_traces(&ba)?.inverse().ok_or_else(|| Error::Law("unitor on traces is singular".into()))?;
                out.mul(&cyclic(a, b)?).mul(&into)
            }
        };
        acc = Some(match acc {
            None => m,
            Some(prev) => m.mul(&prev),
        });
    }
    Ok(acc.expect("at least one step"))
}

fn convolve_kernel(a: &Kernel, b: &Kernel) -> Result<Kernel> {
    Ok(convolution(a, b)?.result)
}

/// The map on traces induced by `H` with right adjoint and
/// `α: F1 ⋆ H → H ⋆ F2`.
#[derive(Clone, Debug)]
pub struct Functoriality {
    /// Between the `trace_lt_ag` spaces.
    pub lt_map: QMat,
    /// Between the duality-model traces.
    pub duality_map: QMat,
    /// The square with both comparison maps commutes.
    pub commutes: bool,
}

pub fn trace_functoriality(h: &Adjunction, f1: &Kernel, f2: &Kernel, alpha: &BundleMap) -> Result<Functoriality> {
    endo(f1)?;
    endo(f2)?;
    let hk = &h.kernel;
    let hr = &h.adjoint;
    if !hk.left().same_as(f1.left()) || !hk.right().same_as(f2.left()) {
        return Err(Error::BaseMismatch("H must go from the foot of F1 to the foot of F2".into()));
    }
    let f1h = convolution(f1, hk)?;
    let hf2 = convolution(hk, f2)?;
    alpha.validate(f1h.result.payload(), hf2.result.payload())?;
    let u1 = Unit::new(f1.left())?;
    let u2 = Unit::new(f2.left())?;

    // F1 → F1⋆U → F1⋆(H⋆H^R) → (F1⋆H)⋆H^R → (H⋆F2)⋆H^R
    let f1u = convolution(f1, &u1.kernel)?;
    let a1 = Assoc::new(f1, hk, hr)?;
    let f1_hhr = a1.outer_right.clone();
    let hf2_hr = convolution(&hf2.result, hr)?;
    // ~ H^R⋆(H⋆F2) → (H^R⋆H)⋆F2 → U⋆F2 → F2
    let a2 = Assoc::new(hr, hk, f2)?;
    let uf2 = convolution(&u2.kernel, f2)?;
    let steps = vec![
        Step::Cell {
            src: f1.clone(),
            tgt: f1u.result.clone(),
            map: right_unitor(&u1, &f1u).inverse().expect("unitors are invertible"),
        },
        Step::Cell { src: f1u.result.clone(), tgt: f1_hhr.result.clone(), map: whisker_left(&h.unit, &f1u, &f1_hhr) },
        Step::Cell { src: f1_hhr.result.clone(), tgt: a1.outer_left.result.clone(), map: a1.inverse() },
        Step::Cell {
            src: a1.outer_left.result.clone(),
            tgt: hf2_hr.result.clone(),
            map: whisker_right(alpha, &a1.outer_left, &hf2_hr),
        },
        Step::Cyclic { a: hf2.result.clone(), b: hr.clone() },
        Step::Cell { src: a2.outer_right.result.clone(), tgt: a2.outer_left.result.clone(), map: a2.inverse() },
        Step::Cell {
            src: a2.outer_left.result.clone(),
            tgt: uf2.result.clone(),
            map: whisker_right(&h.counit, &a2.outer_left, &uf2),
        },
        Step::Cell { src: uf2.result.clone(), tgt: f2.clone(), map: left_unitor(&u2, &uf2) },
    ];
    let lt_map = run(&steps, false)?;
    let duality_map = run(&steps, true)?;
    let c1 = compare_traces(f1)?;
    let c2 = compare_traces(f2)?;
    let commutes = c2.lt_ag.mul(&duality_map) == lt_map.mul(&c1.lt_ag);
    Ok(Functoriality { lt_map, duality_map, commutes })
}

/// `cl(G, α) ∈ C(Y, Δ^! K)` for `α: G → [K](G)`, in cochain coordinates:
/// the unit of `[G] ⊣ [𝔻G]`, moved cyclically to `C(Y, Δ^!(𝔻G ⊠ G))`, then
/// pushed through `𝔻G ⊠ G → 𝔻G ⊠ (G ⋆ K) ≅ (𝔻G ⊠ G) ⋆ K → U ⋆ K ≅ K`.
pub fn class_of(g: &Bundle, alpha: &BundleMap, k: &Kernel) -> Result<QMat> {
    endo(k)?;
    if !g.base().same_as(k.left()) {
        return Err(Error::BaseMismatch("class of a bundle on another groupoid".into()));
    }
    let target = act(k, g)?;
    alpha.validate(g, &target)?;
    let l = Kernel::column(g)?;
    let adj = kernel_right_adjoint(&l)?
        .found()
        .ok_or_else(|| Error::MissingAdjoint("column kernel of the bundle".into()))?;
    let lr = adj.adjoint.clone();
    // the unit as an element of C(pt, Δ^!(L ⋆ L^R))
    let llr = convolution(&l, &lr)?;
    let start = diagonal_cochains(&llr.result)?
        .coords_of(&[adj.unit.maps[0].clone()])
        .ok_or_else(|| Error::Law("unit element is not invariant".into()))?;
    let alpha_k = BundleMap { maps: alpha.maps.clone() };
    let lrl = convolution(&lr, &l)?;
    let a = Assoc::new(&lr, &l, k)?;
    let u = Unit::new(k.left())?;
    let uk = convolution(&u.kernel, k)?;
    let steps = vec![
        Step::Cyclic { a: l.clone(), b: lr.clone() },
        Step::Cell {
            src: lrl.result.clone(),
            tgt: a.outer_right.result.clone(),
            map: whisker_left(&alpha_k, &lrl, &a.outer_right),
        },
        Step::Cell { src: a.outer_right.result.clone(), tgt: a.outer_left.result.clone(), map: a.inverse() },
        Step::Cell {
            src: a.outer_left.result.clone(),
            tgt: uk.result.clone(),
            map: whisker_right(&adj.counit, &a.outer_left, &uk),
        },
        Step::Cell { src: uk.result.clone(), tgt: k.clone(), map: left_unitor(&u, &uk) },
    ];
    Ok(run(&steps, false)?.mul(&start))
}

/// The class computed directly as the partial trace of `α_a` at each point.
pub fn class_oracle(g: &Bundle, alpha: &BundleMap, k: &Kernel) -> Result<QMat> {
    let lk = convolution(&Kernel::column(g)?, k)?;
    let c = diagonal_cochains(k)?;
    let values: Vec<QMat> = k
        .left()
        .points()
        .map(|a| {
            let (dg, dk) = (g.dim(a), k.dim(a, a));
            let full = lk.value_at(0, a, a).mul(&alpha.maps[a]);
            QMat::from_fn(dk, 1, |r, _| (0..dg).fold(Rat::from_integer(0.into()), |s, i| s + full.get(i * dk + r, i)))
        })
        .collect();
    c.coords_of(&values).ok_or_else(|| Error::Law("partial trace is not invariant".into()))
}
