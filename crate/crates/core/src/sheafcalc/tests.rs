use super::*;
use crate::coeff::{rat, Rat};
use crate::groupoid::{iso_comma_square, FinGroup};
use num_traits::Zero;

fn bg(g: Arc<FinGroup>) -> Arc<FinGroupoid> {
    FinGroupoid::classifying(g)
}

fn sign_z2() -> Bundle {
    Bundle::from_action(bg(FinGroup::cyclic(2)), vec![1], |g, _| QMat::from_i64(&[&[if g == 0 { 1 } else { -1 }]]))
        .unwrap()
}

/// The two-dimensional irreducible of S3 on the sum-zero plane, basis
/// `e1 - e2`, `e2 - e3`.
fn standard_s3() -> Bundle {
    let nat = FinGroupoid::symmetric_action(3);
    let b = bg(nat.group().clone());
    let basis = QMat::from_i64(&[&[1, 0], &[-1, 1], &[0, -1]]);
    let li = basis.left_inverse().unwrap();
    Bundle::from_action(b, vec![2], |g, _| {
        let p = QMat::from_fn(3, 3, |i, j| if nat.act(g, j) == i { rat(1) } else { Rat::zero() });
        li.mul(&p).mul(&basis)
    })
    .unwrap()
}

/// `dim V^G` by the character formula, as an independent oracle.
fn invariant_dim_by_characters(v: &Bundle) -> Rat {
    let chi = v.stabilizer_character(0);
    let n = chi.len() as i64;
    chi.iter().fold(Rat::zero(), |a, c| a + c) / rat(n)
}

fn point_map(x: usize, target: &Arc<FinGroupoid>) -> GroupoidMap {
    GroupoidMap::from_fns(&FinGroupoid::point(), target, |_| target.group().identity(), |_| x)
}

#[test]
fn pullback_examples() {
    let y = FinGroupoid::discrete_n(2);
    let v = Bundle::new(y.clone(), vec![2, 3], vec![]).unwrap();
    let id = pullback_shriek(&GroupoidMap::identity(&y), &v).unwrap();
    assert_eq!(id.dims(), v.dims());
    let picked = pullback_shriek(&point_map(1, &y), &v).unwrap();
    assert_eq!(picked.dims(), &[3]);
    let b = bg(FinGroup::symmetric(3));
    let pulled = pullback_shriek(&GroupoidMap::to_point(&b), &Bundle::trivial(&FinGroupoid::point(), 4)).unwrap();
    assert_eq!(pulled.dims(), &[4]);
    assert!(pulled.gens().iter().all(|r| r[0].is_identity()));
}

#[test]
fn pushforward_examples() {
    let y = FinGroupoid::discrete_n(2);
    let v = Bundle::new(y.clone(), vec![2, 3], vec![]).unwrap();
    assert_eq!(pushforward_star(&GroupoidMap::to_point(&y), &v).unwrap().dims(), &[5]);
    assert_eq!(pushforward_bang(&GroupoidMap::to_point(&y), &v).unwrap().dims(), &[5]);

    let b = bg(FinGroup::cyclic(2));
    let reg = Bundle::regular(&b).unwrap();
    let p = GroupoidMap::to_point(&b);
    assert_eq!(pushforward_star(&p, &reg).unwrap().dims(), &[1]);
    assert_eq!(pushforward_bang(&p, &reg).unwrap().dims(), &[1]);
    assert_eq!(pushforward_bang(&p, &sign_z2()).unwrap().dims(), &[0]);
    assert_eq!(pushforward_star(&p, &sign_z2()).unwrap().dims(), &[0]);

    let same = pushforward_star(&GroupoidMap::identity(&b), &reg).unwrap();
    assert!(isomorphic(&same, &reg));
}

#[test]
fn triangle_kills_the_standard_representation() {
    let std = standard_s3();
    assert_eq!(invariant_dim_by_characters(&std), Rat::zero());
    let p = GroupoidMap::to_point(std.base());
    assert_eq!(pushforward_triangle(&p, &std).unwrap().dims(), &[0]);
}

#[test]
fn triangle_composes() {
    // {1,2,3}//S3 → pt//S3 → pt
    let nat = FinGroupoid::symmetric_action(3);
    let b = bg(nat.group().clone());
    let f = GroupoidMap::from_fns(&nat, &b, |g| g, |_| 0);
    let g = GroupoidMap::to_point(&b);
    let v = Bundle::trivial(&nat, 2);
    let step = pushforward_triangle(&g, &pushforward_triangle(&f, &v).unwrap()).unwrap();
    let direct = pushforward_triangle(&f.then(&g).unwrap(), &v).unwrap();
    assert_eq!(step.dims(), direct.dims());
    assert_eq!(direct.dims(), &[2]);
    // the middle term is the permutation representation, twice
    let mid = pushforward_triangle(&f, &v).unwrap();
    assert_eq!(mid.dims(), &[6]);
    mid.validate().unwrap();
}

#[test]
fn omega_examples() {
    let d = FinGroupoid::discrete_n(3);
    let (m, tame) = omega_map(&d, &CoeffSystem::Natural);
    assert!(tame);
    assert_eq!(m.diagonal_counts(), vec![Some(1); 3]);
    let b = bg(FinGroup::cyclic(2));
    let (m, tame) = omega_map(&b, &CoeffSystem::Rational);
    assert!(tame);
    assert_eq!(m.diagonal_counts(), vec![Some(2)]);
    let (m, tame) = omega_map(&b, &CoeffSystem::Integer);
    assert!(!tame);
    assert_eq!(m.diagonal_counts(), vec![Some(2)]);
}

#[test]
fn cochain_examples() {
    let d = FinGroupoid::discrete_n(4);
    assert_eq!(cochains_triangle(&Bundle::trivial(&d, 1)).unwrap().dim, 4);
    let s3 = FinGroup::symmetric(3);
    let b = bg(s3.clone());
    assert_eq!(cochains_triangle(&Bundle::trivial(&b, 1)).unwrap().dim, 1);
    // ℚ[S3] under conjugation
    let n = s3.order();
    let adj = Bundle::from_action(b, vec![n], |g, _| {
        QMat::from_fn(n, n, |i, j| if s3.mul(s3.mul(g, j), s3.inv(g)) == i { rat(1) } else { Rat::zero() })
    })
    .unwrap();
    assert_eq!(cochains_triangle(&adj).unwrap().dim, s3.conjugacy_classes().len());
}

#[test]
fn dual_examples() {
    let b = bg(FinGroup::cyclic(3));
    let t = Bundle::trivial(&b, 1);
    assert_eq!(verdier_dual(&t).gens(), t.gens());
    let std = standard_s3();
    let dd = verdier_dual(&verdier_dual(&std));
    assert_eq!(dd.gens(), std.gens());
    verdier_dual(&std).validate().unwrap();
}

#[test]
fn base_change_on_sets() {
    let a = FinGroupoid::discrete_n(3);
    let c = FinGroupoid::discrete_n(2);
    let b = FinGroupoid::discrete_n(2);
    let f = GroupoidMap::new(a.clone(), c.clone(), vec![0], vec![0, 1, 1]).unwrap();
    let g = GroupoidMap::new(b, c, vec![0], vec![1, 0]).unwrap();
    let sq = iso_comma_square(&f, &g).unwrap();
    let v = Bundle::new(a, vec![1, 2, 3], vec![]).unwrap();
    assert!(base_change_check(&sq, &v).unwrap().pass);
}

#[test]
fn base_change_point_into_classifying() {
    let g = FinGroup::dihedral(4);
    let b = bg(g.clone());
    let f = point_map(0, &b);
    let sq = iso_comma_square(&f, &f).unwrap();
    assert_eq!(sq.apex.size(), g.order());
    let v = Bundle::trivial(&FinGroupoid::point(), 2);
    let r = base_change_check(&sq, &v).unwrap();
    assert!(r.pass, "{r:?}");
    let (lhs, _, _) = base_change_map(&sq, &v).unwrap();
    assert_eq!(lhs.dims(), &[2 * g.order()]);
}

#[test]
fn projection_formula_on_graph() {
    let b = bg(FinGroup::symmetric(3));
    let delta = GroupoidMap::diagonal(&b);
    let v = standard_s3();
    let bb = delta.cod().clone();
    let w = external_product_on(&Bundle::regular(&b).unwrap(), &Bundle::trivial(&b, 1), &bb).unwrap();
    let r = projection_formula_check(&delta, &v, &w).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn adjunction_and_norm() {
    let nat = FinGroupoid::symmetric_action(3);
    let b = bg(nat.group().clone());
    let f = GroupoidMap::from_fns(&nat, &b, |g| g, |_| 0);
    let v = Bundle::trivial(&nat, 1);
    let w = standard_s3();
    assert!(adjunction_triangles(&f, &v, &w).unwrap());
    assert!(norm_is_iso(&f, &v).unwrap().pass);
    assert!(norm_is_iso(&GroupoidMap::to_point(&b), &w).unwrap().pass);
    let reg = Bundle::regular(&b).unwrap();
    assert!(norm_is_iso(&GroupoidMap::to_point(&b), &reg).unwrap().pass);
    assert!(norm_is_iso(&point_map(0, &b), &Bundle::trivial(&FinGroupoid::point(), 2)).unwrap().pass);
}

#[test]
fn pairing_is_perfect() {
    let b = bg(FinGroup::symmetric(3));
    for v in [standard_s3(), Bundle::regular(&b).unwrap(), Bundle::trivial(&b, 2)] {
        let p = cochain_pairing(&v).unwrap();
        assert_eq!(p.rows(), p.cols());
        assert_eq!(p.rank(), p.rows());
    }
}
