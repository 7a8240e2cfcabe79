use std::sync::Arc;

use deskcat::coeff::{parse_rat, rat_string, ratio, QMat, Quantale};
use deskcat::corpus::Corpus;
use deskcat::enriched::{
    is_presheaf, module_maps, presheaf_closure, presheaves, EnrichedCat, ModuleMap, QuantaleModule,
};
use deskcat::frobenius::{cl_weil, lt_naive, sfunct, tr_frob};
use deskcat::kernelcalc::{compare_traces, convolve, identity_kernel, trace_lt_ag, Kernel};
use deskcat::sheafcalc::{isomorphic, norm_is_iso};
use proptest::prelude::*;

fn small_matrix(max: usize) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(-4i64..=4, c), r))
}

fn qmat(rows: &[Vec<i64>]) -> QMat {
    QMat::from_fn(rows.len(), rows[0].len(), |i, j| ratio(rows[i][j], 1))
}

fn dims_table(max_n: usize, max_d: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (1..=max_n).prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(0..=max_d, n), n))
}

fn tropical() -> impl Strategy<Value = Arc<Quantale>> {
    (1u32..=5).prop_map(|cap| Arc::new(Quantale::tropical(cap)))
}

/// All functions between two small modules that are module maps.
fn brute_force_maps(src: &QuantaleModule, tgt: &QuantaleModule) -> Vec<ModuleMap> {
    let (n, t) = (src.size(), tgt.size());
    let mut out = vec![];
    for mut k in 0..t.pow(n as u32) {
        let table = (0..n)
            .map(|_| {
                let v = k % t;
                k /= t;
                v
            })
            .collect();
        let m = ModuleMap { table };
        if m.is_module_map(src, tgt) {
            out.push(m);
        }
    }
    out.sort_by(|a, b| a.table.cmp(&b.table));
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rationals_round_trip(n in -1000i64..1000, d in 1i64..1000) {
        let r = ratio(n, d);
        prop_assert_eq!(parse_rat(&rat_string(&r)), Some(r));
    }

    #[test]
    fn rank_nullity(rows in small_matrix(5)) {
        let m = qmat(&rows);
        prop_assert_eq!(m.rank() + m.kernel().cols(), m.cols());
        prop_assert!(m.mul(&m.kernel()).is_zero());
    }

    #[test]
    fn kron_is_multiplicative(a in small_matrix(3), b in small_matrix(3)) {
        let (a, b) = (qmat(&a), qmat(&b));
        prop_assert_eq!(a.kron(&b).rank(), a.rank() * b.rank());
        if a.rows() == a.cols() && b.rows() == b.cols() {
            prop_assert_eq!(a.kron(&b).trace(), a.trace() * b.trace());
        }
    }

    #[test]
    fn convolution_multiplies_dimension_tables(a in dims_table(3, 2), seed in 0u64..1000) {
        let n = a.len();
        let mut c = Corpus::new(seed);
        let b: Vec<Vec<usize>> = (0..n).map(|i| (0..n).map(|j| (i + j + seed as usize) % 3).collect()).collect();
        let k = Kernel::from_dims(&a).unwrap();
        let l = Kernel::from_dims(&b).unwrap();
        let kl = convolve(&k, &l).unwrap();
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(kl.dims()[i][j], (0..n).map(|m| a[i][m] * b[m][j]).sum::<usize>());
            }
        }
        // a third factor from the corpus, both bracketings isomorphic
        let m = c.discrete_kernel(n, 2);
        if m.left().size() == n {
            let m = Kernel::from_dims(&m.dims().iter().map(|r| r.iter().map(|&d| d.min(2)).collect()).collect::<Vec<_>>()).unwrap();
            let left = convolve(&kl, &m).unwrap();
            let right = convolve(&k, &convolve(&l, &m).unwrap()).unwrap();
            prop_assert!(isomorphic(left.payload(), right.payload()));
        }
    }

    #[test]
    fn identity_kernel_is_a_unit(a in dims_table(4, 3)) {
        let k = Kernel::from_dims(&a).unwrap();
        let u = identity_kernel(k.left());
        prop_assert_eq!(convolve(&u, &k).unwrap().dims(), k.dims());
        prop_assert_eq!(convolve(&k, &u).unwrap().dims(), k.dims());
    }

    #[test]
    fn discrete_trace_is_the_diagonal_sum(a in dims_table(5, 3)) {
        let k = Kernel::from_dims(&a).unwrap();
        let tr = trace_lt_ag(&k).unwrap();
        prop_assert_eq!(tr.dim, (0..a.len()).map(|i| a[i][i]).sum::<usize>());
        let cmp = compare_traces(&k).unwrap();
        prop_assert!(cmp.invertible);
    }

    #[test]
    fn residuation_is_adjoint(q in tropical(), a in 0u16..7, b in 0u16..7, c in 0u16..7) {
        let n = q.size() as u16;
        let (a, b, c) = (a % n, b % n, c % n);
        prop_assert_eq!(q.le(q.tensor(a, b), c), q.le(b, q.residuate(a, c)));
    }

    #[test]
    fn presheaf_closure_is_a_closure(q in tropical(), hom in prop::collection::vec(0u16..7, 9), w in prop::collection::vec(0u16..7, 3)) {
        let n = q.size() as u16;
        let table = (0..3).map(|a| (0..3).map(|b| hom[3 * a + b] % n).collect()).collect();
        let c = EnrichedCat::closure(q.clone(), vec!["a".into(), "b".into(), "c".into()], table).unwrap();
        let w: Vec<u16> = w.into_iter().map(|v| v % n).collect();
        let cl = presheaf_closure(&c, w.clone());
        prop_assert!(is_presheaf(&c, &cl));
        prop_assert!(w.iter().zip(&cl).all(|(&x, &y)| q.le(x, y)));
        prop_assert_eq!(presheaf_closure(&c, cl.clone()), cl);
    }

    #[test]
    fn module_maps_match_brute_force(cap in 1u32..=2, hom in prop::collection::vec(0u16..4, 4)) {
        let q = Arc::new(Quantale::tropical(cap));
        let n = q.size() as u16;
        let table = (0..2).map(|a| (0..2).map(|b| hom[2 * a + b] % n).collect()).collect();
        let c = EnrichedCat::closure(q.clone(), vec!["a".into(), "b".into()], table).unwrap();
        let p = presheaves(&c).unwrap();
        let reg = QuantaleModule::regular(&q);
        // keep the brute force below a few hundred thousand functions
        for (src, tgt) in [(p.module(), &reg), (&reg, p.module())] {
            if (tgt.size() as f64).powi(src.size() as i32) <= 4e5 {
                prop_assert_eq!(module_maps(src, tgt), brute_force_maps(src, tgt));
            }
        }
    }

    #[test]
    fn sheaf_function_correspondence(seed in any::<u64>()) {
        let w = Corpus::new(seed).weil_sheaf(6, 3);
        let lt = lt_naive(&tr_frob(w.base(), &w.f).unwrap(), &cl_weil(&w).unwrap()).unwrap();
        prop_assert_eq!(lt.rows(), sfunct(&w).unwrap().rows());
    }

    #[test]
    fn norm_is_invertible_over_the_rationals(seed in any::<u64>()) {
        let mut c = Corpus::new(seed);
        let x = c.action_groupoid(8, 3);
        let f = c.map_from(&x);
        let v = c.bundle(&x);
        prop_assert!(norm_is_iso(&f, &v).unwrap().pass);
    }
}
