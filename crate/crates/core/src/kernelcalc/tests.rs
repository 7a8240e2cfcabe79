use super::*;
use crate::coeff::{rat, QMat};
use crate::groupoid::FinGroup;
use crate::sheafcalc::isomorphic;

fn dims(k: &Kernel) -> Vec<Vec<usize>> {
    k.dims()
}

fn set_map(n: usize, m: usize, f: &[usize]) -> GroupoidMap {
    GroupoidMap::new(FinGroupoid::discrete_n(n), FinGroupoid::discrete_n(m), vec![0], f.to_vec()).unwrap()
}

/// Identity on each stalk: for kernels whose stalks are known to agree.
fn stalkwise_identity(src: &Kernel, tgt: &Kernel) -> BundleMap {
    assert_eq!(src.payload().dims(), tgt.payload().dims());
    BundleMap { maps: src.payload().dims().iter().map(|&d| QMat::identity(d)).collect() }
}

fn bg(g: Arc<FinGroup>) -> Arc<FinGroupoid> {
    FinGroupoid::classifying(g)
}

#[test]
fn convolution_of_dimension_matrices() {
    let a = Kernel::from_dims(&[vec![1, 2], vec![0, 1]]).unwrap();
    let b = Kernel::from_dims(&[vec![1, 0], vec![3, 1]]).unwrap();
    assert_eq!(dims(&convolve(&a, &b).unwrap()), vec![vec![7, 2], vec![3, 1]]);
    assert!(convolve(&a, &Kernel::from_dims(&[vec![1, 1, 1]]).unwrap()).is_err());
}

#[test]
fn unit_laws() {
    let k = Kernel::from_dims(&[vec![2, 0, 1], vec![1, 3, 0]]).unwrap();
    let ul = convolve(&identity_kernel(k.left()), &k).unwrap();
    let ur = convolve(&k, &identity_kernel(k.right())).unwrap();
    assert_eq!(dims(&ul), dims(&k));
    assert_eq!(dims(&ur), dims(&k));

    let b = bg(FinGroup::symmetric(3));
    let u = identity_kernel(&b);
    assert_eq!(dims(&u), vec![vec![6]]);
    let uu = convolution(&Unit::new(&b).unwrap().kernel, &u).unwrap();
    assert!(isomorphic(uu.result.payload(), u.payload()));
    assert!(left_unitor(&Unit::new(&b).unwrap(), &uu).is_iso());
}

#[test]
fn associativity_by_both_bracketings() {
    let k = Kernel::from_dims(&[vec![1, 2], vec![0, 3]]).unwrap();
    let l = Kernel::from_dims(&[vec![2, 1], vec![1, 1]]).unwrap();
    let m = Kernel::from_dims(&[vec![0, 1], vec![4, 1]]).unwrap();
    let a = Assoc::new(&k, &l, &m).unwrap();
    assert_eq!(dims(&a.outer_left.result), dims(&a.outer_right.result));
    assert!(a.map.is_iso());
    let back = chain(&[&a.map, &a.inverse()]);
    assert!(back.maps.iter().all(|m| m.is_identity()));
}

#[test]
fn act_examples() {
    let y = FinGroupoid::discrete_n(2);
    let v = Bundle::new(y.clone(), vec![1, 2], vec![]).unwrap();
    assert!(isomorphic(&act(&identity_kernel(&y), &v).unwrap(), &v));
    let k = Kernel::from_dims(&[vec![1, 0, 2], vec![3, 1, 0]]).unwrap();
    // row vector times matrix
    assert_eq!(act(&k, &v).unwrap().dims(), &[7, 2, 2]);
    let l = Kernel::from_dims(&[vec![1], vec![2], vec![0]]).unwrap();
    let kl = convolve(&k, &l).unwrap();
    assert_eq!(act(&kl, &v).unwrap().dims(), act(&l, &act(&k, &v).unwrap()).unwrap().dims());

    let w = Bundle::new(FinGroupoid::discrete_n(3), vec![1, 1], vec![]);
    assert!(w.is_err() || act(&k, &w.unwrap()).is_err());
}

#[test]
fn trace_of_a_matrix_kernel() {
    let k = Kernel::from_dims(&[vec![5, 1], vec![2, 7]]).unwrap();
    let d = trace_via_duality(&k).unwrap();
    let l = trace_lt_ag(&k).unwrap();
    assert_eq!(d.value(), rat(12));
    assert_eq!(l.value(), rat(12));
    assert!(compare_traces(&k).unwrap().invertible);
    let zero = Kernel::from_dims(&[vec![0, 3], vec![1, 0]]).unwrap();
    assert_eq!(trace_via_duality(&zero).unwrap().dim, 0);
    assert!(compare_traces(&zero).unwrap().invertible);
    assert!(trace_lt_ag(&Kernel::from_dims(&[vec![1, 2]]).unwrap()).is_err());
}

#[test]
fn identity_trace_on_classifying_s3() {
    let s3 = FinGroup::symmetric(3);
    let u = identity_kernel(&bg(s3.clone()));
    let lt = trace_lt_ag(&u).unwrap();
    assert_eq!(lt.dim, 3);
    assert_eq!(lt.labels.len(), 3);
    // one label per conjugacy class, named by a member of the class
    let classes = s3.conjugacy_classes();
    for cls in &classes {
        let hit = lt.labels.iter().filter(|l| cls.iter().any(|&g| **l == format!("(*,{})", s3.label(g)))).count();
        assert_eq!(hit, 1, "{:?} vs {:?}", lt.labels, cls);
    }
    let c = compare_traces(&u).unwrap();
    assert!(c.invertible);
    assert_eq!(c.duality.dim, 3);
}

#[test]
fn frobenius_graph_has_one_fixed_point() {
    let phi = set_map(3, 3, &[1, 0, 2]);
    let k = Kernel::graph(&phi).unwrap();
    let lt = trace_lt_ag(&k).unwrap();
    assert_eq!(lt.dim, 1);
    assert_eq!(lt.labels.len(), 1);
    assert!(compare_traces(&k).unwrap().invertible);
}

#[test]
fn duality_data_examples() {
    let y = FinGroupoid::discrete_n(2);
    let d = duality_data(&y).unwrap();
    assert_eq!(dims(&d.unit.kernel), vec![vec![1, 0], vec![0, 1]]);
    assert_eq!(dims(&d.snake), dims(&d.unit.kernel));
    let k = Kernel::from_dims(&[vec![2, 1], vec![0, 3]]).unwrap();
    assert_eq!(d.counit(&k).unwrap().dim, 5);

    for g in [FinGroup::symmetric(3), FinGroup::dihedral(4), FinGroup::quaternion()] {
        let b = bg(g.clone());
        let d = duality_data(&b).unwrap();
        assert_eq!(d.counit(&d.unit.kernel).unwrap().dim, g.conjugacy_classes().len());
    }
}

#[test]
fn right_adjoint_examples() {
    let y = FinGroupoid::discrete_n(3);
    let u = identity_kernel(&y);
    let a = kernel_right_adjoint(&u).unwrap().found().unwrap();
    assert_eq!(dims(&a.adjoint), dims(&u));

    let p = Kernel::graph(&set_map(3, 3, &[1, 2, 0])).unwrap();
    let a = kernel_right_adjoint(&p).unwrap().found().unwrap();
    let d = dims(&p);
    let t: Vec<Vec<usize>> = (0..3).map(|i| (0..3).map(|j| d[j][i]).collect()).collect();
    assert_eq!(dims(&a.adjoint), t);

    let b = bg(FinGroup::symmetric(3));
    let g = Bundle::regular(&b).unwrap();
    let col = Kernel::column(&g).unwrap();
    let a = kernel_right_adjoint(&col).unwrap().found().unwrap();
    assert!(a.adjoint.right().size() == 1 && a.adjoint.left().same_as(&b));
    let row = Kernel::row(&crate::sheafcalc::verdier_dual(&g)).unwrap();
    assert!(isomorphic(a.adjoint.payload(), row.payload()));

    let left = kernel_left_adjoint(&col).unwrap().found().unwrap();
    assert!(left.adjoint.left().size() == 1);
}

fn square(t: Kernel, l: Kernel, r: Kernel, b: Kernel) -> BcSquare {
    let tr = convolve(&t, &r).unwrap();
    let lb = convolve(&l, &b).unwrap();
    let cell = stalkwise_identity(&tr, &lb);
    BcSquare { top: t, left: l, right: r, bottom: b, cell }
}

#[test]
fn beck_chevalley_identity_square() {
    let y = bg(FinGroup::cyclic(3));
    let u = identity_kernel(&y);
    let sq = square(u.clone(), u.clone(), u.clone(), u);
    for side in [Side::Left, Side::Right] {
        let r = beck_chevalley_check(&sq, side).unwrap();
        assert!(r.pass, "{:?}", r.witness);
        assert_eq!(beck_chevalley_oracle(&sq, side).unwrap().unwrap(), r.mate);
    }
}

#[test]
fn beck_chevalley_cartesian_square_of_sets() {
    // X × Y with both projections, over the point
    let (nx, ny) = (2, 3);
    let px: Vec<usize> = (0..nx * ny).map(|i| i / ny).collect();
    let py: Vec<usize> = (0..nx * ny).map(|i| i % ny).collect();
    let t = Kernel::graph(&set_map(nx * ny, nx, &px)).unwrap();
    let l = Kernel::graph(&set_map(nx * ny, ny, &py)).unwrap();
    let r = Kernel::graph(&set_map(nx, 1, &vec![0; nx])).unwrap();
    let b = Kernel::graph(&set_map(ny, 1, &vec![0; ny])).unwrap();
    let sq = square(t, l, r, b);
    for side in [Side::Left, Side::Right] {
        let rep = beck_chevalley_check(&sq, side).unwrap();
        assert!(rep.pass, "{side:?} {:?}", rep.witness);
        assert_eq!(beck_chevalley_oracle(&sq, side).unwrap().unwrap(), rep.mate);
    }
}

#[test]
fn beck_chevalley_failure_has_a_witness() {
    let p = Kernel::graph(&set_map(2, 1, &[0, 0])).unwrap();
    let u = identity_kernel(p.right());
    let sq = square(p.clone(), p, u.clone(), u);
    let r = beck_chevalley_check(&sq, Side::Right).unwrap();
    assert!(!r.pass);
    let w = r.witness.clone().unwrap();
    assert!(w.contains("1×2") || w.contains("2×1"), "{w}");
    assert_eq!(beck_chevalley_oracle(&sq, Side::Right).unwrap().unwrap(), r.mate);
}

#[test]
fn beck_chevalley_on_an_upper_triangular_square() {
    // the cell is the identity but the mate l^R ⋆ t → b ⋆ r^R is not
    let y = FinGroupoid::discrete_n(2);
    let u = identity_kernel(&y);
    let k = Kernel::from_dims(&[vec![1, 1], vec![0, 1]]).unwrap();
    let sq = square(k.clone(), k, u.clone(), u);
    let r = beck_chevalley_check(&sq, Side::Right).unwrap();
    assert!(!r.pass);
    assert_eq!(r.witness.as_deref(), Some("mate at (1,2) is 0×1 of rank 0"));
    assert_eq!(beck_chevalley_oracle(&sq, Side::Right).unwrap().unwrap(), r.mate);
}

#[test]
fn class_of_trivial_on_a_point() {
    let pt = FinGroupoid::point();
    let u = identity_kernel(&pt);
    let g = Bundle::trivial(&pt, 1);
    let target = act(&u, &g).unwrap();
    let alpha = stalk_identity(&g, &target);
    let cl = class_of(&g, &alpha, &u).unwrap();
    assert_eq!(cl, QMat::from_i64(&[&[1]]));
    assert_eq!(cl, class_oracle(&g, &alpha, &u).unwrap());
}

fn stalk_identity(g: &Bundle, t: &Bundle) -> BundleMap {
    assert_eq!(g.dims(), t.dims());
    BundleMap { maps: g.dims().iter().map(|&d| QMat::identity(d)).collect() }
}

#[test]
fn class_of_delta_with_scalar() {
    let y = FinGroupoid::discrete_n(3);
    let k = Kernel::from_dims(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let g = Bundle::new(y.clone(), vec![0, 1, 0], vec![]).unwrap();
    let target = act(&k, &g).unwrap();
    let alpha = stalk_identity(&g, &target);
    let c = rat(5);
    let alpha = BundleMap { maps: alpha.maps.iter().map(|m| m.scale(&c)).collect() };
    let cl = class_of(&g, &alpha, &k).unwrap();
    let tr = trace_lt_ag(&k).unwrap();
    assert_eq!(tr.in_basis(&cl), QMat::column(vec![rat(0), rat(5), rat(0)]));
    assert_eq!(cl, class_oracle(&g, &alpha, &k).unwrap());
}

#[test]
fn class_of_is_additive() {
    let b = bg(FinGroup::cyclic(3));
    let u = identity_kernel(&b);
    let g1 = Bundle::regular(&b).unwrap();
    let g2 = Bundle::trivial(&b, 2);
    let t1 = act(&u, &g1).unwrap();
    let t2 = act(&u, &g2).unwrap();
    let s1 = BundleMap::equivariant_basis(&g1, &t1).unwrap();
    let s2 = BundleMap::equivariant_basis(&g2, &t2).unwrap();
    let a1 = s1.last().unwrap().clone();
    let a2 = s2[0].clone();
    let sum = g1.direct_sum(&g2).unwrap();
    let tsum = act(&u, &sum).unwrap();
    // act is additive stalkwise, with the summands in order
    let asum = BundleMap::equivariant_basis(&sum, &tsum).unwrap();
    let lhs_oracle = class_oracle(&g1, &a1, &u).unwrap().add(&class_oracle(&g2, &a2, &u).unwrap());
    assert_eq!(class_of(&g1, &a1, &u).unwrap(), class_oracle(&g1, &a1, &u).unwrap());
    assert_eq!(class_of(&g2, &a2, &u).unwrap(), class_oracle(&g2, &a2, &u).unwrap());
    let direct = a1.direct_sum(&a2);
    if direct.validate(&sum, &tsum).is_ok() {
        let c = class_of(&sum, &direct, &u).unwrap();
        assert_eq!(c, class_of(&g1, &a1, &u).unwrap().add(&class_of(&g2, &a2, &u).unwrap()));
        assert_eq!(c, lhs_oracle);
    } else {
        assert!(!asum.is_empty());
    }
}

#[test]
fn functoriality_along_identity() {
    let k = Kernel::from_dims(&[vec![2, 1], vec![0, 3]]).unwrap();
    let y = k.left().clone();
    let h = kernel_right_adjoint(&identity_kernel(&y)).unwrap().found().unwrap();
    let f1h = convolve(&k, &h.kernel).unwrap();
    let hf2 = convolve(&h.kernel, &k).unwrap();
    let alpha = stalkwise_identity(&f1h, &hf2);
    let f = trace_functoriality(&h, &k, &k, &alpha).unwrap();
    assert!(f.commutes);
    assert!(f.lt_map.is_identity(), "{:?}", f.lt_map);
}

#[test]
fn functoriality_along_a_proper_map_sums_fibers() {
    let h = Kernel::graph(&set_map(2, 1, &[0, 0])).unwrap();
    let adj = kernel_right_adjoint(&h).unwrap().found().unwrap();
    let f1 = identity_kernel(h.left());
    let f2 = identity_kernel(h.right());
    let f1h = convolve(&f1, &h).unwrap();
    let hf2 = convolve(&h, &f2).unwrap();
    let alpha = stalkwise_identity(&f1h, &hf2);
    let f = trace_functoriality(&adj, &f1, &f2, &alpha).unwrap();
    assert!(f.commutes);
    let t1 = trace_lt_ag(&f1).unwrap();
    let t2 = trace_lt_ag(&f2).unwrap();
    let m = t2.in_basis(&f.lt_map.mul(&t1.basis));
    assert_eq!(m, QMat::from_i64(&[&[1, 1]]));
}

#[test]
fn functoriality_composes() {
    let h1 = Kernel::graph(&set_map(3, 2, &[0, 1, 1])).unwrap();
    let h2 = Kernel::graph(&set_map(2, 1, &[0, 0])).unwrap();
    let h12 = convolve(&h1, &h2).unwrap();
    let a1 = kernel_right_adjoint(&h1).unwrap().found().unwrap();
    let a2 = kernel_right_adjoint(&h2).unwrap().found().unwrap();
    let a12 = kernel_right_adjoint(&h12).unwrap().found().unwrap();
    let fs: Vec<Kernel> = [3, 2, 1].iter().map(|&n| identity_kernel(&FinGroupoid::discrete_n(n))).collect();
    let step = |adj: &Adjunction, f1: &Kernel, f2: &Kernel| {
        let alpha = stalkwise_identity(&convolve(f1, &adj.kernel).unwrap(), &convolve(&adj.kernel, f2).unwrap());
        trace_functoriality(adj, f1, f2, &alpha).unwrap()
    };
    let s1 = step(&a1, &fs[0], &fs[1]);
    let s2 = step(&a2, &fs[1], &fs[2]);
    let s12 = step(&a12, &fs[0], &fs[2]);
    assert!(s1.commutes && s2.commutes && s12.commutes);
    assert_eq!(s2.lt_map.mul(&s1.lt_map), s12.lt_map);
}
