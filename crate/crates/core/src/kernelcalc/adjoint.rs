//! Adjoint kernels and the Beck–Chevalley condition.
//!
//! The candidate right adjoint of `K: Y1 → Y2` is the Verdier dual with its
//! feet swapped. The counit `K^R ⋆ K → U` pairs the two factors and sums over
//! the middle variable; the unit is then solved from the first triangle
//! identity and the second one is checked.

use crate::coeff::QMat;
use crate::groupoid::{FinGroupoid, GroupoidMap};
use crate::sheafcalc::{cochains_triangle, pullback_shriek, verdier_dual, BundleMap};
use crate::{Error, Result};

use super::{
    chain, convolution, left_unitor, right_unitor, whisker_left, whisker_right, Assoc, Convolution, Kernel, Unit,
};

/// `K ⊣ K^R` with explicit unit `U_{Y1} → K ⋆ K^R` and counit `K^R ⋆ K → U_{Y2}`.
#[derive(Clone, Debug)]
pub struct Adjunction {
    pub kernel: Kernel,
    pub adjoint: Kernel,
    pub unit: BundleMap,
    pub counit: BundleMap,
}

#[derive(Clone, Debug)]
pub enum RightAdjoint {
    Found(Box<Adjunction>),
    Absent { candidate: Kernel, reason: String },
}

impl RightAdjoint {
    pub fn found(self) -> Option<Adjunction> {
        match self {
            RightAdjoint::Found(a) => Some(*a),
            RightAdjoint::Absent { .. } => None,
        }
    }
}

/// `swap^! 𝔻K` on `Y2 × Y1`.
pub fn dual_kernel(k: &Kernel) -> Result<Kernel> {
    let swapped = FinGroupoid::product(k.right(), k.left());
    let swap = GroupoidMap::projection(&swapped, &[1, 0])?.rebased(&swapped, k.payload().base())?;
    let payload = pullback_shriek(&swap, &verdier_dual(k.payload()))?;
    Kernel::new(k.right().clone(), k.left().clone(), payload)
}

fn contraction(d: usize) -> QMat {
    QMat::from_fn(1, d * d, |_, j| if j % (d + 1) == 0 { crate::coeff::rat(1) } else { crate::coeff::rat(0) })
}

/// `K^R ⋆ K → U_{Y2}`: at a comma object `(x, h)` of the unit, contract
/// `K_ax^∨ ⊗ K_ax` and sum over every `a`.
fn pairing(krk: &Convolution, u2: &Unit) -> BundleMap {
    let k = &krk.second;
    let y2 = k.right().clone();
    let y1 = k.left().clone();
    let mut maps = vec![QMat::zeros(0, 0); u2.kernel.payload().base().size()];
    for b in y2.points() {
        for b2 in y2.points() {
            let s = u2.kernel.index(b, b2);
            let cols = krk.result.dim(b, b2);
            let vals: Vec<QMat> = u2
                .data
                .reps(s)
                .iter()
                .map(|&(x, h)| {
                    let mut acc = QMat::zeros(1, cols);
                    for a in y1.points() {
                        let d = k.dim(a, x);
                        if d == 0 {
                            continue;
                        }
                        let obj = krk.triple.join(&[x, a, x]);
                        acc = acc.add(&contraction(d).mul(&krk.data.eval_matrix(krk.stalk(b, b2), obj, h)));
                    }
                    acc
                })
                .collect();
            maps[s] = if vals.is_empty() {
                QMat::zeros(u2.data.dim(s), cols)
            } else {
                u2.data.coords_from_rep_values(s, &vals)
            };
        }
    }
    BundleMap { maps }
}

/// Candidate units `U → W`, one per invariant section `c` of `Δ^! W`:
/// `f ↦ Σ_(x,h) f(x, h) ρ_W(h⁻¹) c_x`, summed over all comma objects.
fn unit_candidates(u: &Unit, w: &Kernel) -> Result<Vec<BundleMap>> {
    let y = w.left().clone();
    let diag = pullback_shriek(&GroupoidMap::diagonal(&y), w.payload())?;
    let c = cochains_triangle(&diag)?;
    let yy = u.kernel.payload().base().clone();
    let gyy = yy.group().clone();
    let mut out: Vec<Vec<QMat>> = vec![Vec::with_capacity(yy.size()); c.dim];
    for p in yy.points() {
        let dw = w.payload().dim(p);
        let du = u.data.dim(p);
        let mut acc = vec![QMat::zeros(dw, du); c.dim];
        for x in y.points() {
            let xx = yy.join(&[x, x]);
            let vx = c.value_at(x);
            for h in gyy.elements() {
                if yy.act(h, p) != xx {
                    continue;
                }
                let e = u.data.eval_matrix(p, x, h);
                let r = w.payload().rho(gyy.inv(h), xx).mul(&vx);
                for (j, a) in acc.iter_mut().enumerate() {
                    let col = QMat::from_fn(dw, 1, |i, _| r.get(i, j).clone());
                    *a = a.add(&col.mul(&e));
                }
            }
        }
        for (j, a) in acc.into_iter().enumerate() {
            out[j].push(a);
        }
    }
    Ok(out.into_iter().map(|maps| BundleMap { maps }).collect())
}

fn flatten(m: &BundleMap) -> Vec<crate::coeff::Rat> {
    m.maps.iter().flat_map(|q| q.entries().cloned().collect::<Vec<_>>()).collect()
}

pub fn kernel_right_adjoint(k: &Kernel) -> Result<RightAdjoint> {
    let kr = dual_kernel(k)?;
    let (y1, y2) = (k.left().clone(), k.right().clone());
    let u1 = Unit::new(&y1)?;
    let u2 = Unit::new(&y2)?;
    let kkr = convolution(k, &kr)?;
    let krk = convolution(&kr, k)?;
    let counit = pairing(&krk, &u2);

    // first triangle: K → U⋆K → (K⋆K^R)⋆K → K⋆(K^R⋆K) → K⋆U → K
    let uk = convolution(&u1.kernel, k)?;
    let lam_inv = left_unitor(&u1, &uk).inverse().expect("unitors are invertible");
    let assoc = Assoc::new(k, &kr, k)?;
    let ku = convolution(k, &u2.kernel)?;
    let tail = chain(&[
        &assoc.map,
        &whisker_left(&counit, &assoc.outer_right, &ku),
        &right_unitor(&u2, &ku),
    ]);
    let candidates = unit_candidates(&u1, &kkr.result)?;
    let columns: Vec<Vec<_>> = candidates
        .iter()
        .map(|c| flatten(&chain(&[&lam_inv, &whisker_right(c, &uk, &assoc.outer_left), &tail])))
        .collect();
    let target = flatten(&BundleMap::identity(k.payload()));
    let a = QMat::from_fn(target.len(), columns.len(), |i, j| columns[j][i].clone());
    let b = QMat::column(target);
    let Some(x) = a.solve(&b) else {
        return Ok(RightAdjoint::Absent { candidate: kr, reason: "first triangle identity has no solution".into() });
    };
    let mut unit = BundleMap::zero(u1.kernel.payload(), kkr.result.payload());
    for (j, c) in candidates.iter().enumerate() {
        let s = x.get(j, 0);
        for (m, cm) in unit.maps.iter_mut().zip(&c.maps) {
            *m = m.add(&cm.scale(s));
        }
    }

    // second triangle: K^R → K^R⋆U → K^R⋆(K⋆K^R) → (K^R⋆K)⋆K^R → U⋆K^R → K^R
    let kru = convolution(&kr, &u1.kernel)?;
    let back = Assoc::new(&kr, k, &kr)?;
    let ukr = convolution(&u2.kernel, &kr)?;
    let second = chain(&[
        &right_unitor(&u1, &kru).inverse().expect("unitors are invertible"),
        &whisker_left(&unit, &kru, &back.outer_right),
        &back.inverse(),
        &whisker_right(&counit, &back.outer_left, &ukr),
        &left_unitor(&u2, &ukr),
    ]);
    if second != BundleMap::identity(kr.payload()) {
        return Ok(RightAdjoint::Absent { candidate: kr, reason: "second triangle identity fails".into() });
    }
    Ok(RightAdjoint::Found(Box::new(Adjunction { kernel: k.clone(), adjoint: kr, unit, counit })))
}

/// `K^L ⊣ K`, found as the right adjoint data of the dual kernel.
pub fn kernel_left_adjoint(k: &Kernel) -> Result<RightAdjoint> {
    let d = dual_kernel(k)?;
    Ok(match kernel_right_adjoint(&d)? {
        RightAdjoint::Found(a) => RightAdjoint::Found(Box::new(Adjunction { adjoint: k.clone(), ..*a })),
        RightAdjoint::Absent { reason, .. } => RightAdjoint::Absent { candidate: d, reason },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// A square `top: A → B`, `left: A → C`, `right: B → D`, `bottom: C → D`
/// with a 2-cell `cell: top ⋆ right → left ⋆ bottom`.
#[derive(Clone, Debug)]
pub struct BcSquare {
    pub top: Kernel,
    pub left: Kernel,
    pub right: Kernel,
    pub bottom: Kernel,
    pub cell: BundleMap,
}

#[derive(Clone, Debug)]
pub struct BcReport {
    pub pass: bool,
    /// Right side: `left^R ⋆ top → bottom ⋆ right^R`.
    /// Left side: `right ⋆ bottom^L → top^L ⋆ left`.
    pub mate: BundleMap,
    pub source: Kernel,
    pub target: Kernel,
    pub witness: Option<String>,
}

fn need(k: &Kernel, side: Side, edge: &str) -> Result<Adjunction> {
    let r = match side {
        Side::Right => kernel_right_adjoint(k)?,
        Side::Left => kernel_left_adjoint(k)?,
    };
    match r {
        RightAdjoint::Found(a) => Ok(*a),
        RightAdjoint::Absent { reason, .. } => Err(Error::MissingAdjoint(format!("{edge} edge: {reason}"))),
    }
}

impl BcSquare {
    pub fn validate(&self) -> Result<()> {
        let ok = self.top.left().same_as(self.left.left())
            && self.top.right().same_as(self.right.left())
            && self.left.right().same_as(self.bottom.left())
            && self.right.right().same_as(self.bottom.right());
        if !ok {
            return Err(Error::BaseMismatch("square edges are not composable".into()));
        }
        let tr = convolution(&self.top, &self.right)?;
        let lb = convolution(&self.left, &self.bottom)?;
        self.cell.validate(tr.result.payload(), lb.result.payload())
    }
}

fn right_mate(sq: &BcSquare, al: &Adjunction, ar: &Adjunction) -> Result<(Kernel, Kernel, BundleMap)> {
    let (t, l, r, b) = (&sq.top, &sq.left, &sq.right, &sq.bottom);
    let (lr, rr) = (&al.adjoint, &ar.adjoint);
    let ub = Unit::new(r.left())?;
    let uc = Unit::new(l.right())?;
    // l^R⋆t → (l^R⋆t)⋆U → (l^R⋆t)⋆(r⋆r^R)
    let p = convolution(lr, t)?;
    let pu = convolution(&p.result, &ub.kernel)?;
    let rrr = convolution(r, rr)?;
    let prr = convolution(&p.result, &rrr.result)?;
    let step1 = right_unitor(&ub, &pu).inverse().expect("unitors are invertible");
    let step2 = whisker_left(&ar.unit, &pu, &prr);
    // → l^R⋆(t⋆(r⋆r^R)) → l^R⋆((t⋆r)⋆r^R)
    let a1 = Assoc::new(lr, t, &rrr.result)?;
    let a2 = Assoc::new(t, r, rr)?;
    let lr_trr = convolution(lr, &a2.outer_left.result)?;
    let step3 = whisker_left(&a2.inverse(), &a1.outer_right, &lr_trr);
    // → l^R⋆((l⋆b)⋆r^R)
    let lb = convolution(l, b)?;
    let lb_rr = convolution(&lb.result, rr)?;
    let inner = whisker_right(&sq.cell, &a2.outer_left, &lb_rr);
    let lr_lbrr = convolution(lr, &lb_rr.result)?;
    let step4 = whisker_left(&inner, &lr_trr, &lr_lbrr);
    // → l^R⋆(l⋆(b⋆r^R)) → (l^R⋆l)⋆(b⋆r^R)
    let a3 = Assoc::new(l, b, rr)?;
    let lr_l_brr = convolution(lr, &a3.outer_right.result)?;
    let step5 = whisker_left(&a3.map, &lr_lbrr, &lr_l_brr);
    let a4 = Assoc::new(lr, l, &a3.lm.result)?;
    // → U⋆(b⋆r^R) → b⋆r^R
    let u_brr = convolution(&uc.kernel, &a3.lm.result)?;
    let step7 = whisker_right(&al.counit, &a4.outer_left, &u_brr);
    let mate = chain(&[
        &step1,
        &step2,
        &a1.map,
        &step3,
        &step4,
        &step5,
        &a4.inverse(),
        &step7,
        &left_unitor(&uc, &u_brr),
    ]);
    Ok((p.result, a3.lm.result, mate))
}

fn left_mate(sq: &BcSquare, at: &Adjunction, ab: &Adjunction) -> Result<(Kernel, Kernel, BundleMap)> {
    let (t, l, r, b) = (&sq.top, &sq.left, &sq.right, &sq.bottom);
    let (tl, bl) = (&at.kernel, &ab.kernel);
    let ub = Unit::new(t.right())?;
    let uc = Unit::new(l.right())?;
    // r⋆b^L → U⋆(r⋆b^L) → (t^L⋆t)⋆(r⋆b^L)
    let q = convolution(r, bl)?;
    let uq = convolution(&ub.kernel, &q.result)?;
    let tlt = convolution(tl, t)?;
    let tlt_q = convolution(&tlt.result, &q.result)?;
    let step1 = left_unitor(&ub, &uq).inverse().expect("unitors are invertible");
    let step2 = whisker_right(&at.unit, &uq, &tlt_q);
    // → t^L⋆(t⋆(r⋆b^L)) → t^L⋆((t⋆r)⋆b^L)
    let a1 = Assoc::new(tl, t, &q.result)?;
    let a2 = Assoc::new(t, r, bl)?;
    let tl_trbl = convolution(tl, &a2.outer_left.result)?;
    let step3 = whisker_left(&a2.inverse(), &a1.outer_right, &tl_trbl);
    // → t^L⋆((l⋆b)⋆b^L)
    let lb = convolution(l, b)?;
    let lb_bl = convolution(&lb.result, bl)?;
    let inner = whisker_right(&sq.cell, &a2.outer_left, &lb_bl);
    let tl_lbbl = convolution(tl, &lb_bl.result)?;
    let step4 = whisker_left(&inner, &tl_trbl, &tl_lbbl);
    // → t^L⋆(l⋆(b⋆b^L)) → t^L⋆(l⋆U) → t^L⋆l
    let a3 = Assoc::new(l, b, bl)?;
    let tl_l_bbl = convolution(tl, &a3.outer_right.result)?;
    let step5 = whisker_left(&a3.map, &tl_lbbl, &tl_l_bbl);
    let lu = convolution(l, &uc.kernel)?;
    let inner6 = whisker_left(&ab.counit, &a3.outer_right, &lu);
    let tl_lu = convolution(tl, &lu.result)?;
    let step6 = whisker_left(&inner6, &tl_l_bbl, &tl_lu);
    let tll = convolution(tl, l)?;
    let step7 = whisker_left(&right_unitor(&uc, &lu), &tl_lu, &tll);
    let mate = chain(&[&step1, &step2, &a1.map, &step3, &step4, &step5, &step6, &step7]);
    Ok((q.result, tll.result, mate))
}

pub fn beck_chevalley_check(sq: &BcSquare, side: Side) -> Result<BcReport> {
    sq.validate()?;
    let (source, target, mate) = match side {
        Side::Right => {
            let al = need(&sq.left, Side::Right, "left")?;
            let ar = need(&sq.right, Side::Right, "right")?;
            right_mate(sq, &al, &ar)?
        }
        Side::Left => {
            let at = need(&sq.top, Side::Left, "top")?;
            let ab = need(&sq.bottom, Side::Left, "bottom")?;
            left_mate(sq, &at, &ab)?
        }
    };
    let bad = source.payload().base().points().find(|&p| {
        let m = &mate.maps[p];
        m.rows() != m.cols() || m.rank() != m.rows()
    });
    let witness = bad.map(|p| {
        let m = &mate.maps[p];
        format!(
            "mate at {} is {}×{} of rank {}",
            source.payload().base().label(p),
            m.rows(),
            m.cols(),
            m.rank()
        )
    });
    Ok(BcReport { pass: witness.is_none(), mate, source, target, witness })
}

/// Solves for the mate directly: the unique `m` whose transpose back along
/// the adjunctions reproduces the square's 2-cell.
pub fn beck_chevalley_oracle(sq: &BcSquare, side: Side) -> Result<Option<BundleMap>> {
    sq.validate()?;
    let (t, l, r, b) = (&sq.top, &sq.left, &sq.right, &sq.bottom);
    let (source, target, transpose): (Kernel, Kernel, Box<dyn Fn(&BundleMap) -> BundleMap>) = match side {
        Side::Right => {
            let al = need(l, Side::Right, "left")?;
            let ar = need(r, Side::Right, "right")?;
            let (lr, rr) = (al.adjoint.clone(), ar.adjoint.clone());
            let ua = Unit::new(t.left())?;
            let ud = Unit::new(r.right())?;
            // t⋆r → U⋆(t⋆r) → (l⋆l^R)⋆(t⋆r) → l⋆(l^R⋆(t⋆r)) → l⋆((l^R⋆t)⋆r)
            let tr = convolution(t, r)?;
            let utr = convolution(&ua.kernel, &tr.result)?;
            let a1 = Assoc::new(l, &lr, &tr.result)?;
            let a2 = Assoc::new(&lr, t, r)?;
            let l_lrt_r = convolution(l, &a2.outer_left.result)?;
            let head = chain(&[
                &left_unitor(&ua, &utr).inverse().expect("unitors are invertible"),
                &whisker_right(&al.unit, &utr, &a1.outer_left),
                &a1.map,
                &whisker_left(&a2.inverse(), &a1.outer_right, &l_lrt_r),
            ]);
            // l⋆((b⋆r^R)⋆r) → l⋆(b⋆(r^R⋆r)) → l⋆(b⋆U) → l⋆b
            let a3 = Assoc::new(b, &rr, r)?;
            let l_brr_r = convolution(l, &a3.outer_left.result)?;
            let l_b_rrr = convolution(l, &a3.outer_right.result)?;
            let bu = convolution(b, &ud.kernel)?;
            let l_bu = convolution(l, &bu.result)?;
            let lb = convolution(l, b)?;
            let tail = chain(&[
                &whisker_left(&a3.map, &l_brr_r, &l_b_rrr),
                &whisker_left(&whisker_left(&ar.counit, &a3.outer_right, &bu), &l_b_rrr, &l_bu),
                &whisker_left(&right_unitor(&ud, &bu), &l_bu, &lb),
            ]);
            let mid_m = convolution(&a2.kl.result, r)?;
            let m_tgt = convolution(&a3.kl.result, r)?;
            let source = a2.kl.result.clone();
            let target = a3.kl.result.clone();
            (
                source,
                target,
                Box::new(move |m: &BundleMap| {
                    let mr = whisker_right(m, &mid_m, &m_tgt);
                    chain(&[&head, &whisker_left(&mr, &l_lrt_r, &l_brr_r), &tail])
                }),
            )
        }
        Side::Left => {
            let at = need(t, Side::Left, "top")?;
            let ab = need(b, Side::Left, "bottom")?;
            let (tl, bl) = (at.kernel.clone(), ab.kernel.clone());
            let ua = Unit::new(t.left())?;
            let ud = Unit::new(r.right())?;
            // t⋆r → (t⋆r)⋆U → (t⋆r)⋆(b^L⋆b) → t⋆(r⋆(b^L⋆b)) → t⋆((r⋆b^L)⋆b)
            let tr = convolution(t, r)?;
            let tru = convolution(&tr.result, &ud.kernel)?;
            let blb = convolution(&bl, b)?;
            let tr_blb = convolution(&tr.result, &blb.result)?;
            let a1b = Assoc::new(t, r, &blb.result)?;
            let a2 = Assoc::new(r, &bl, b)?;
            let t_rbl_b = convolution(t, &a2.outer_left.result)?;
            let head = chain(&[
                &right_unitor(&ud, &tru).inverse().expect("unitors are invertible"),
                &whisker_left(&ab.unit, &tru, &tr_blb),
                &a1b.map,
                &whisker_left(&a2.inverse(), &a1b.outer_right, &t_rbl_b),
            ]);
            // t⋆((t^L⋆l)⋆b) → t⋆(t^L⋆(l⋆b)) → (t⋆t^L)⋆(l⋆b) → U⋆(l⋆b) → l⋆b
            let a3 = Assoc::new(&tl, l, b)?;
            let t_tll_b = convolution(t, &a3.outer_left.result)?;
            let t_tl_lb = convolution(t, &a3.outer_right.result)?;
            let a4 = Assoc::new(t, &tl, &a3.lm.result)?;
            let ulb = convolution(&ua.kernel, &a3.lm.result)?;
            let tail = chain(&[
                &whisker_left(&a3.map, &t_tll_b, &t_tl_lb),
                &a4.inverse(),
                &whisker_right(&at.counit, &a4.outer_left, &ulb),
                &left_unitor(&ua, &ulb),
            ]);
            let m_src = convolution(&a2.kl.result, b)?;
            let m_tgt = convolution(&a3.kl.result, b)?;
            let source = a2.kl.result.clone();
            let target = a3.kl.result.clone();
            (
                source,
                target,
                Box::new(move |m: &BundleMap| {
                    let mb = whisker_right(m, &m_src, &m_tgt);
                    chain(&[&head, &whisker_left(&mb, &t_rbl_b, &t_tll_b), &tail])
                }),
            )
        }
    };
    let basis = BundleMap::equivariant_basis(source.payload(), target.payload())?;
    let want = flatten(&sq.cell);
    let columns: Vec<Vec<_>> = basis.iter().map(|m| flatten(&transpose(m))).collect();
    let a = QMat::from_fn(want.len(), columns.len(), |i, j| columns[j][i].clone());
    let Some(x) = a.solve(&QMat::column(want)) else {
        return Ok(None);
    };
    let mut mate = BundleMap::zero(source.payload(), target.payload());
    for (j, m) in basis.iter().enumerate() {
        for (acc, mm) in mate.maps.iter_mut().zip(&m.maps) {
            *acc = acc.add(&mm.scale(x.get(j, 0)));
        }
    }
    Ok(Some(mate))
}
