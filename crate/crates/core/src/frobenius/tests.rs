use super::*;
use crate::coeff::{rat, Rat};
use crate::groupoid::FinGroup;
use crate::kernelcalc::trace_via_duality;

fn set_perm(p: &[usize]) -> (Arc<FinGroupoid>, GroupoidMap) {
    let y = FinGroupoid::discrete_n(p.len());
    let f = GroupoidMap::new(y.clone(), y.clone(), vec![0], p.to_vec()).unwrap();
    (y, f)
}

fn group_auto(g: Arc<FinGroup>, theta: Vec<usize>) -> (Arc<FinGroupoid>, GroupoidMap) {
    let b = FinGroupoid::classifying(g);
    let f = GroupoidMap::new(b.clone(), b.clone(), theta, vec![0]).unwrap();
    (b, f)
}

fn values(f: &Fn0) -> Vec<Rat> {
    f.values.iter().map(|c| c.as_rat().unwrap().clone()).collect()
}

/// Twisted conjugacy classes of `G` under `g ~ h g θ(h)⁻¹`, by brute force.
fn twisted_classes(g: &FinGroup, theta: &[usize]) -> usize {
    let mut seen = vec![false; g.order()];
    let mut n = 0;
    for a in g.elements() {
        if seen[a] {
            continue;
        }
        n += 1;
        for h in g.elements() {
            seen[g.mul(g.mul(h, a), g.inv(theta[h]))] = true;
        }
    }
    n
}

fn unipotent() -> WeilSheaf {
    let (y, f) = set_perm(&[1, 0, 2]);
    let v = Bundle::new(y, vec![1, 1, 2], vec![]).unwrap();
    let alpha = BundleMap {
        maps: vec![QMat::from_i64(&[&[1]]), QMat::from_i64(&[&[1]]), QMat::from_i64(&[&[1, 1], &[0, 1]])],
    };
    WeilSheaf::new(v, f, alpha).unwrap()
}

#[test]
fn kernel_examples() {
    let (y, id) = set_perm(&[0, 1, 2]);
    assert_eq!(frobenius_kernel(&y, &id).unwrap().dims(), identity_kernel(&y).dims());
    let (y, f) = set_perm(&[1, 0, 2]);
    assert_eq!(frobenius_kernel(&y, &f).unwrap().dims(), vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]]);

    let (b, inv) = group_auto(FinGroup::cyclic(3), vec![0, 2, 1]);
    let k = frobenius_kernel(&b, &inv).unwrap();
    assert_eq!(k.dims(), vec![vec![3]]);
    assert!(!isomorphic(k.payload(), identity_kernel(&b).payload()));
}

#[test]
fn non_invertible_frobenius_is_rejected() {
    let y = FinGroupoid::discrete_n(2);
    let f = GroupoidMap::new(y.clone(), y.clone(), vec![0], vec![0, 0]).unwrap();
    assert!(matches!(frobenius_kernel(&y, &f), Err(Error::Precondition(_))));
}

#[test]
fn curated_traces() {
    let s3 = FinGroup::symmetric(3);
    let (b, id) = group_auto(s3.clone(), s3.elements().collect());
    assert_eq!(tr_frob(&b, &id).unwrap().dim(), 3);

    let (b, inv) = group_auto(FinGroup::cyclic(3), vec![0, 2, 1]);
    assert_eq!(tr_frob(&b, &inv).unwrap().dim(), 1);
    assert_eq!(twisted_classes(&FinGroup::cyclic(3), &[0, 2, 1]), 1);

    let c2 = FinGroup::cyclic(2);
    let v4 = FinGroup::product(vec![c2.clone(), c2]);
    let swap = vec![0, 2, 1, 3];
    assert_eq!(twisted_classes(&v4, &swap), 2);
    let (b, f) = group_auto(v4, swap);
    let t = tr_frob(&b, &f).unwrap();
    assert_eq!(t.dim(), 2);
    assert_eq!(t.dim(), trace_via_duality(&frobenius_kernel(&b, &f).unwrap()).unwrap().dim);

    let (y, f) = set_perm(&[1, 0, 2]);
    let t = tr_frob(&y, &f).unwrap();
    assert_eq!(t.dim(), 1);
    assert_eq!(t.labels(), &["(3,e)".to_string()]);
}

#[test]
fn trace_function_examples() {
    let u = unipotent();
    let s = sfunct(&u).unwrap();
    assert_eq!(s.component_labels(), vec!["(3,e)".to_string()]);
    assert_eq!(values(&s), vec![rat(2)]);

    let y = FinGroupoid::discrete_n(3);
    let triv = WeilSheaf::trivial_structure(Bundle::trivial(&y, 1)).unwrap();
    assert_eq!(values(&sfunct(&triv).unwrap()), vec![rat(1); 3]);

    let b = FinGroupoid::classifying(FinGroup::cyclic(2));
    let reg = WeilSheaf::trivial_structure(Bundle::regular(&b).unwrap()).unwrap();
    let s = sfunct(&reg).unwrap();
    assert_eq!(s.component_labels(), vec!["(*,0)".to_string(), "(*,1)".to_string()]);
    assert_eq!(values(&s), vec![rat(2), rat(0)]);
}

#[test]
fn class_matches_trace_function() {
    let b = FinGroupoid::classifying(FinGroup::cyclic(2));
    let y = FinGroupoid::discrete_n(3);
    let s3 = FinGroupoid::classifying(FinGroup::symmetric(3));
    let cases = vec![
        unipotent(),
        WeilSheaf::trivial_structure(Bundle::trivial(&y, 1)).unwrap(),
        WeilSheaf::trivial_structure(Bundle::regular(&b).unwrap()).unwrap(),
        WeilSheaf::trivial_structure(Bundle::regular(&s3).unwrap()).unwrap(),
    ];
    for w in cases {
        let tr = tr_frob(w.base(), &w.f).unwrap();
        let got = lt_naive(&tr, &cl_weil(&w).unwrap()).unwrap();
        assert_eq!(values(&got), values(&sfunct(&w).unwrap()));
    }
}

#[test]
fn class_of_trivial_sheaf_is_all_ones() {
    let y = FinGroupoid::discrete_n(4);
    let w = WeilSheaf::trivial_structure(Bundle::trivial(&y, 1)).unwrap();
    let tr = tr_frob(&y, &w.f).unwrap();
    assert_eq!(values(&lt_naive(&tr, &cl_weil(&w).unwrap()).unwrap()), vec![rat(1); 4]);
}

#[test]
fn twisted_structure_on_a_nonabelian_group() {
    // conjugation by a transposition on pt//S3, with V the regular
    // representation and α = left multiplication by it
    let s3 = FinGroup::symmetric(3);
    let t = s3.find("(1 2)").unwrap();
    let theta: Vec<usize> = s3.elements().map(|g| s3.mul(s3.mul(t, g), s3.inv(t))).collect();
    let (b, f) = group_auto(s3.clone(), theta);
    let v = Bundle::regular(&b).unwrap();
    let pulled = pullback_shriek(&f, &v).unwrap();
    for alpha in BundleMap::equivariant_basis(&pulled, &v).unwrap().into_iter().take(3) {
        let w = WeilSheaf::new(v.clone(), f.clone(), alpha).unwrap();
        let tr = tr_frob(&b, &f).unwrap();
        assert_eq!(values(&lt_naive(&tr, &cl_weil(&w).unwrap()).unwrap()), values(&sfunct(&w).unwrap()));
    }
}

#[test]
fn lt_naive_is_linear() {
    let (y, f) = set_perm(&[0, 2, 1, 3]);
    let tr = tr_frob(&y, &f).unwrap();
    let a = QMat::column(vec![rat(1), rat(-2)]);
    let b = QMat::column(vec![rat(5), rat(7)]);
    let c = rat(4);
    let lhs = values(&lt_naive(&tr, &a.scale(&c).add(&b)).unwrap());
    let la = values(&lt_naive(&tr, &a).unwrap());
    let lb = values(&lt_naive(&tr, &b).unwrap());
    let rhs: Vec<Rat> = la.iter().zip(&lb).map(|(x, y)| x * &c + y).collect();
    assert_eq!(lhs, rhs);
    assert!(lt_naive(&tr, &QMat::column(vec![rat(1)])).is_err());
    assert_eq!(tr.dim(), 2);
}

#[test]
fn tensor_and_sum() {
    let u = unipotent();
    let t = u.tensor(&u).unwrap();
    assert_eq!(values(&sfunct(&t).unwrap()), vec![rat(4)]);
    let s = u.direct_sum(&u).unwrap();
    assert_eq!(values(&sfunct(&s).unwrap()), vec![rat(4)]);
    let tr = tr_frob(t.base(), &t.f).unwrap();
    assert_eq!(values(&lt_naive(&tr, &cl_weil(&t).unwrap()).unwrap()), vec![rat(4)]);
}

#[test]
fn pushforward_sums_over_fibers() {
    // {1,2,3,4} with F = (1 2) pushed to {a, b} with F' = id
    let (y, f) = set_perm(&[1, 0, 2, 3]);
    let (y2, f2) = set_perm(&[0, 1]);
    let g = GroupoidMap::new(y.clone(), y2, vec![0], vec![0, 0, 1, 1]).unwrap();
    let v = Bundle::new(y, vec![1, 1, 2, 1], vec![]).unwrap();
    let alpha = BundleMap {
        maps: vec![
            QMat::from_i64(&[&[3]]),
            QMat::from_i64(&[&[1]]),
            QMat::from_i64(&[&[1, 1], &[0, 1]]),
            QMat::from_i64(&[&[5]]),
        ],
    };
    let w = WeilSheaf::new(v, f, alpha).unwrap();
    let p = weil_pushforward(&w, &g, &f2).unwrap();
    // fiber over a has no fixed points; over b the fixed points 3, 4
    assert_eq!(values(&sfunct(&w).unwrap()), vec![rat(2), rat(5)]);
    assert_eq!(values(&sfunct(&p).unwrap()), vec![rat(0), rat(7)]);
}

#[test]
fn frobenius_is_an_equivalence() {
    let (y, f) = set_perm(&[2, 0, 1]);
    assert!(frobenius_is_invertible(&y, &f).unwrap());
    let (b, inv) = group_auto(FinGroup::cyclic(3), vec![0, 2, 1]);
    assert!(frobenius_is_invertible(&b, &inv).unwrap());
}
