use super::*;

use crate::enriched::{is_presheaf, presheaf_closure, self_enrichment};

fn boolean() -> Arc<Quantale> {
    Arc::new(Quantale::boolean())
}

fn trop(cap: u32) -> Arc<Quantale> {
    Arc::new(Quantale::tropical(cap))
}

/// `⊥ < 1 < ⊤` with `⊤ ⊗ ⊤ = ⊤`: a unit strictly below the top.
fn chain3() -> Arc<Quantale> {
    let labels = ["bot", "1", "top"].map(String::from).to_vec();
    let join: Vec<Vec<u16>> = (0..3).map(|a| (0..3).map(|b| a.max(b)).collect()).collect();
    let tensor: Vec<Vec<u16>> = (0..3u16)
        .map(|a| (0..3u16).map(|b| if a == 0 || b == 0 { 0 } else if a == 1 { b } else if b == 1 { a } else { 2 }).collect())
        .collect();
    Arc::new(Quantale::lattice(labels, &join, &tensor, 1).unwrap())
}

fn cyclic(n: usize) -> SmPoset {
    let labels = (0..n).map(|i| format!("g{i}")).collect();
    SmPoset::group(labels, (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect()).unwrap()
}

/// The group quantale `P(Z/n)` on subsets as bitmasks.
fn group_quantale(n: usize) -> Arc<Quantale> {
    let size = 1usize << n;
    let labels = (0..size).map(|m| format!("{{{}}}", (0..n).filter(|i| m >> i & 1 == 1).map(|i| i.to_string()).collect::<Vec<_>>().join(","))).collect();
    let join: Vec<Vec<u16>> = (0..size).map(|a| (0..size).map(|b| (a | b) as u16).collect()).collect();
    let prod = |a: usize, b: usize| {
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| a >> i & 1 == 1 && b >> j & 1 == 1).fold(0, |m, (i, j)| m | 1 << ((i + j) % n))
    };
    let tensor: Vec<Vec<u16>> = (0..size).map(|a| (0..size).map(|b| prod(a, b) as u16).collect()).collect();
    Arc::new(Quantale::lattice(labels, &join, &tensor, 1).unwrap())
}

fn boolean_to_tropical() -> LaxFunctor {
    let t = trop(9);
    let inf = t.parse("inf").unwrap();
    LaxFunctor::new(SmPoset::from_quantale(&Quantale::boolean()), t, vec![inf, 0]).unwrap()
}

/// Instances with and without duals, strictness and unitality.
fn curated() -> Vec<LaxFunctor> {
    let b = boolean();
    let c3 = chain3();
    let ob = SmPoset::from_quantale(&b);
    vec![
        boolean_to_tropical(),
        LaxFunctor::new(ob.clone(), c3.clone(), vec![0, 2]).unwrap(),
        LaxFunctor::new(ob.clone(), c3.clone(), vec![0, 1]).unwrap(),
        LaxFunctor::new(cyclic(2), b.clone(), vec![1, 1]).unwrap(),
        LaxFunctor::new(cyclic(2), b.clone(), vec![1, 0]).unwrap(),
        LaxFunctor::new(cyclic(2), trop(3), vec![0, 0]).unwrap(),
        LaxFunctor::new(cyclic(2), c3.clone(), vec![2, 2]).unwrap(),
        LaxFunctor::new(cyclic(2), group_quantale(2), vec![1, 2]).unwrap(),
        LaxFunctor::new(cyclic(3), group_quantale(3), vec![1, 2, 4]).unwrap(),
        LaxFunctor::new(SmPoset::unit_category(), trop(4), vec![0]).unwrap(),
        LaxFunctor::new(SmPoset::unit_category(), c3, vec![2]).unwrap(),
    ]
}

#[test]
fn monoidal_posets_validate() {
    assert!(SmPoset::from_quantale(&Quantale::tropical(3)).duals().is_none());
    let bad = SmPoset::new(
        vec!["a".into(), "b".into()],
        vec![vec![true, true], vec![false, true]],
        vec![vec![0, 1], vec![1, 1]],
        0,
        vec![vec![0, 1], vec![0, 0]],
        None,
    );
    assert!(bad.unwrap_err().to_string().contains("disagrees"));
    assert!(SmPoset::group(vec!["a".into(), "b".into()], vec![vec![0, 1], vec![1, 1]]).is_err());
    let err = LaxFunctor::new(cyclic(2), boolean(), vec![0, 0]).unwrap_err();
    assert!(err.to_string().contains("1 ≰ F(1)"), "{err}");
}

#[test]
fn enh_examples() {
    let f = boolean_to_tropical();
    let enh = build_enh(&f).unwrap();
    assert_eq!(enh.hom_table(), vec![vec![0, 0], vec![10, 0]]);
    let q = trop(4);
    let id = LaxFunctor::new(SmPoset::from_quantale(&q), q.clone(), q.elements().collect()).unwrap();
    assert_eq!(build_enh(&id).unwrap(), self_enrichment(&q));
    let o = SmPoset::from_quantale(&Quantale::tropical(2));
    let constant = LaxFunctor::new(o, q.clone(), vec![0; 4]).unwrap();
    assert!(build_enh(&constant).unwrap().hom_table().iter().flatten().all(|&h| h == q.unit()));
}

#[test]
fn enh_module_examples() {
    let r = build_enh_module(&LaxFunctor::new(SmPoset::unit_category(), trop(4), vec![0]).unwrap()).unwrap();
    assert_eq!(r.presheaves.size(), 6);
    assert!(r.is_equivalence());
    assert_eq!(r.iota, (0..6).collect::<Vec<_>>());

    let f = boolean_to_tropical();
    let r = build_enh_module(&f).unwrap();
    let o = &f.source;
    for a in o.objects() {
        for b in o.objects() {
            assert_eq!(r.presheaves.hom(r.ul_f[a], r.ul_f[b]), f.at(o.ihom(a, b)));
        }
    }
    assert_eq!(r.presheaves.element(r.day_unit()), &[0, 0]);
}

#[test]
fn structure_on_every_instance() {
    let mut instances = curated();
    instances.extend(lax_functors(&SmPoset::from_quantale(&Quantale::tropical(2)), &trop(2)));
    instances.extend(lax_functors(&cyclic(3), &boolean()));
    for f in &instances {
        let r = build_enh_module(f).unwrap();
        for x in f.source.objects() {
            assert_eq!(r.epsilon[r.ul_f[x]], f.at(x));
        }
        assert!(r.ul_f_monoidal(), "{:?}", f.table());
        assert!(r.day_unit_laws());
        assert!(r.iota_left_of_epsilon());
        assert!(r.iota_map().is_module_map(&crate::enriched::QuantaleModule::regular(&f.target), r.presheaves.module()));
    }
}

#[test]
fn strictly_unital_iota_is_fully_faithful() {
    let mut count = 0;
    let sources = [SmPoset::from_quantale(&Quantale::boolean()), SmPoset::from_quantale(&Quantale::tropical(2)), cyclic(2), cyclic(3)];
    for o in &sources {
        for q in [boolean(), trop(2), trop(3), chain3()] {
            for f in lax_functors(o, &q) {
                let report = check_strict_unital_ff(&build_enh_module(&f).unwrap()).unwrap();
                if report.strictly_unital {
                    assert!(report.fully_faithful);
                    count += 1;
                }
            }
        }
    }
    assert!(count >= 50, "{count}");
    let f = LaxFunctor::new(SmPoset::from_quantale(&Quantale::boolean()), chain3(), vec![0, 2]).unwrap();
    let report = check_strict_unital_ff(&build_enh_module(&f).unwrap()).unwrap();
    assert!(!report.fully_faithful);
    // with F(1) = top, Enh(iota 1, iota 1) = top ⊸ top = top while 1 ⊸ 1 = 1
    let d = report.distortion.unwrap();
    assert_eq!((d.0.as_str(), d.1.as_str(), d.2.as_str(), d.3.as_str()), ("1", "1", "top", "1"));
}

#[test]
fn ambidexterity_and_collapse_match_preconditions() {
    for f in curated() {
        let r = build_enh_module(&f).unwrap();
        let ambi = r.iota_left_of_epsilon() && r.epsilon_left_of_iota();
        match check_ambidexterity(&r) {
            Ok(v) => assert!(v && ambi, "{:?}", f.table()),
            Err(Error::Precondition(_)) => assert!(!ambi, "{:?}", f.table()),
            Err(e) => panic!("{e}"),
        }
        match check_collapse(&r) {
            Ok(v) => assert!(v && r.is_equivalence(), "{:?}", f.table()),
            Err(Error::Precondition(_)) => assert!(!r.is_equivalence(), "{:?}", f.table()),
            Err(e) => panic!("{e}"),
        }
    }
    // the group instance with F ≡ 1 forces both values equal
    let r = build_enh_module(&LaxFunctor::new(cyclic(2), boolean(), vec![1, 1]).unwrap()).unwrap();
    assert!(r.presheaves.elements().iter().all(|p| p[0] == p[1]));
    assert!(check_collapse(&r).unwrap());
    let broken = build_enh_module(&LaxFunctor::new(cyclic(2), boolean(), vec![1, 0]).unwrap()).unwrap();
    assert!(matches!(check_collapse(&broken), Err(Error::Precondition(_))));
    let unital = build_enh_module(&LaxFunctor::new(cyclic(2), chain3(), vec![2, 2]).unwrap()).unwrap();
    assert!(check_ambidexterity(&unital).unwrap_err().to_string().contains("not strictly unital"));
}

#[test]
fn free_presheaf_is_a_closure() {
    for f in curated() {
        let enh = build_enh(&f).unwrap();
        let q = &f.target;
        let n = enh.size();
        let all: Vec<Vec<u16>> = (0..q.size().pow(n as u32))
            .map(|mut c| {
                (0..n)
                    .map(|_| {
                        let v = (c % q.size()) as u16;
                        c /= q.size();
                        v
                    })
                    .collect()
            })
            .collect();
        for w in &all {
            let c = presheaf_closure(&enh, w.clone());
            assert!(w.iter().zip(&c).all(|(&a, &b)| q.le(a, b)));
            assert_eq!(presheaf_closure(&enh, c.clone()), c);
            assert_eq!(c == *w, is_presheaf(&enh, w));
        }
    }
}

#[test]
fn change_of_source() {
    let f = LaxFunctor::new(cyclic(2), boolean(), vec![1, 0]).unwrap();
    let r = build_enh_module(&f).unwrap();
    let id = change_source(&r, &r, &[0, 1]).unwrap();
    assert!(id.hom_preserving && id.ff_claimed);
    assert_eq!(id.map.table, (0..r.presheaves.size()).collect::<Vec<_>>());

    let unit = build_enh_module(&LaxFunctor::new(SmPoset::unit_category(), boolean(), vec![1]).unwrap()).unwrap();
    let inc = change_source(&unit, &r, &[0]).unwrap();
    assert!(inc.ff_claimed && inc.hom_preserving);

    let ob = SmPoset::from_quantale(&Quantale::boolean());
    let lo = build_enh_module(&LaxFunctor::new(ob.clone(), chain3(), vec![0, 1]).unwrap()).unwrap();
    let hi = build_enh_module(&LaxFunctor::new(ob, chain3(), vec![0, 2]).unwrap()).unwrap();
    let c = change_source(&lo, &hi, &[0, 1]).unwrap();
    assert!(!c.equality && !c.ff_claimed);
    assert!(change_source(&hi, &lo, &[0, 1]).is_err());
}

#[test]
fn target_insensitivity() {
    for f in curated() {
        assert!(check_target_insensitivity(&f).unwrap(), "{:?}", f.table());
    }
    let (b, incl) = unit_algebra_quantale(&chain3(), 2).unwrap();
    assert_eq!((b.size(), incl), (2, vec![0, 2]));
}
