use super::*;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn boolean() -> Arc<Quantale> {
    Arc::new(Quantale::boolean())
}

fn trop(cap: u32) -> Arc<Quantale> {
    Arc::new(Quantale::tropical(cap))
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| ["a", "b", "c", "d"][i].to_string()).collect()
}

fn metric(q: &Arc<Quantale>, rows: &[&[&str]]) -> Result<EnrichedCat> {
    let hom = rows.iter().map(|r| r.iter().map(|s| q.parse(s).unwrap()).collect()).collect();
    EnrichedCat::new(q.clone(), labels(rows.len()), hom)
}

/// Every Boolean-enriched category with at most three objects.
fn all_boolean_cats() -> Vec<EnrichedCat> {
    let q = boolean();
    let mut out = Vec::new();
    for n in 1..=3 {
        for bits in 0u32..1 << (n * n) {
            let hom = (0..n).map(|a| (0..n).map(|b| ((bits >> (a * n + b)) & 1) as u16).collect()).collect();
            if let Ok(c) = EnrichedCat::new(q.clone(), labels(n), hom) {
                out.push(c);
            }
        }
    }
    out
}

fn random_tropical(rng: &mut ChaCha8Rng, cap: u32, max_n: usize) -> EnrichedCat {
    let q = trop(cap);
    let n = rng.gen_range(1..=max_n);
    let hom = (0..n).map(|_| (0..n).map(|_| rng.gen_range(0..q.size() as u16)).collect()).collect();
    EnrichedCat::closure(q, labels(n), hom).unwrap()
}

#[test]
fn preorders_are_boolean_categories() {
    let c = metric(&boolean(), &[&["1", "1", "1"], &["0", "1", "1"], &["0", "0", "1"]]).unwrap();
    assert_eq!(c.underlying_preorder()[0], vec![true, true, true]);
    assert_eq!(c.underlying_preorder()[2], vec![false, false, true]);
    // the 29 preorders on a labelled three-element set
    assert_eq!(all_boolean_cats().iter().filter(|c| c.size() == 3).count(), 29);
}

#[test]
fn triangle_violation_has_witness() {
    let q = trop(9);
    let err = metric(&q, &[&["0", "1", "5"], &["1", "0", "1"], &["5", "1", "0"]]).unwrap_err();
    assert!(err.to_string().contains("(a,b,c)"), "{err}");
    let err = metric(&q, &[&["1", "0"], &["0", "0"]]).unwrap_err();
    assert!(err.to_string().contains("unit"), "{err}");
    let u = EnrichedCat::unit_category(q.clone());
    assert_eq!(u.hom(0, 0), q.unit());
}

#[test]
fn self_enrichment_examples() {
    let b = self_enrichment(&boolean());
    assert_eq!((b.hom(0, 1), b.hom(1, 0)), (1, 0));
    let q = trop(9);
    let t = self_enrichment(&q);
    assert_eq!(q.label(t.hom(2, 5)), "3");
    assert_eq!(q.label(t.hom(5, 2)), "0");
    for b in q.elements() {
        assert_eq!(t.hom(q.unit() as usize, b as usize), b);
    }
}

#[test]
fn change_of_enrichment() {
    let b = boolean();
    let t = trop(9);
    let c = metric(&b, &[&["1", "1"], &["0", "1"]]).unwrap();
    assert_eq!(change_enrichment(&LaxMap::identity(&b), &c).unwrap(), c);
    let inf = t.parse("inf").unwrap();
    let f = LaxMap::from_fn(&b, &t, |a| if a == 1 { 0 } else { inf }).unwrap();
    let m = change_enrichment(&f, &c).unwrap();
    assert_eq!(m.hom_table(), vec![vec![0, 0], vec![inf, 0]]);
    assert!(f.is_strict());
    assert_eq!(m.underlying_preorder(), c.underlying_preorder());

    // thresholding at k is lax only for k = 0 or k ≥ cap
    let threshold = |k: u16| LaxMap::from_fn(&t, &b, move |x| u16::from(x <= k));
    let err = threshold(3).unwrap_err();
    assert!(err.to_string().contains("invalid lax map"), "{err}");
    let zero = threshold(0).unwrap();
    let d = metric(&t, &[&["0", "0", "4"], &["2", "0", "4"], &["inf", "inf", "0"]]).unwrap();
    let p = change_enrichment(&zero, &d).unwrap();
    assert_eq!(p.hom_table(), vec![vec![1, 1, 0], vec![0, 1, 0], vec![0, 0, 1]]);
    assert_eq!(p.underlying_preorder(), d.underlying_preorder());
    assert!(threshold(9).is_ok());
}

#[test]
fn presheaves_on_a_preorder_are_downsets() {
    // a ≤ b ≤ c
    let c = metric(&boolean(), &[&["1", "1", "1"], &["0", "1", "1"], &["0", "0", "1"]]).unwrap();
    let p = presheaves(&c).unwrap();
    assert_eq!(p.size(), 4);
    assert_eq!(p.element(p.yoneda(1)), &[1, 1, 0]);
    let one = presheaves(&EnrichedCat::unit_category(trop(4))).unwrap();
    assert_eq!(one.size(), 6);
}

#[test]
fn tropical_yoneda_example() {
    let q = trop(9);
    let c = metric(&q, &[&["0", "2"], &["inf", "0"]]).unwrap();
    let p = presheaves(&c).unwrap();
    assert_eq!(q.label(p.element(p.yoneda(1))[0]), "2");
    assert!(p.was_enumerated());
}

#[test]
fn closure_generation_matches_enumeration() {
    let q = trop(2);
    let c = EnrichedCat::closure(q.clone(), labels(3), vec![vec![0, 1, 3], vec![3, 0, 2], vec![1, 3, 0]]).unwrap();
    let full = presheaves(&c).unwrap();
    let mut gens = vec![vec![q.bottom(); 3]];
    let mut i = 0;
    while i < gens.len() {
        for o in c.objects() {
            for a in q.elements() {
                let j: Vec<u16> = gens[i].iter().zip(yoneda(&c, o)).map(|(&x, y)| q.join(x, q.tensor(a, y))).collect();
                if !gens.contains(&j) {
                    gens.push(j);
                }
            }
        }
        i += 1;
    }
    gens.sort();
    assert_eq!(gens, full.elements());
}

fn check_yoneda(c: &EnrichedCat) {
    let q = c.quantale();
    let p = presheaves(c).unwrap();
    for o in c.objects() {
        let y = p.yoneda(o);
        for (i, phi) in p.elements().iter().enumerate() {
            assert_eq!(p.hom(y, i), phi[o]);
            assert!(q.le(q.unit(), p.hom(i, i)));
        }
        for o2 in c.objects() {
            assert_eq!(p.hom(y, p.yoneda(o2)), c.hom(o, o2));
        }
        assert!(totally_compact_check(y, p.module()));
    }
    // hom_presheaf is the module hom
    for i in 0..p.size() {
        for j in 0..p.size() {
            assert_eq!(p.hom(i, j), p.module().hom(i, j));
        }
    }
}

#[test]
fn yoneda_on_all_small_boolean_categories() {
    for c in all_boolean_cats() {
        check_yoneda(&c);
    }
}

#[test]
fn yoneda_on_random_tropical_categories() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..200 {
        let cap = rng.gen_range(1..=4);
        check_yoneda(&random_tropical(&mut rng, cap, 3));
    }
}

#[test]
fn limit_examples() {
    let q = trop(5);
    let m = QuantaleModule::regular(&q);
    let c = metric(&q, &[&["0", "1"], &["3", "0"]]).unwrap();
    let phi = vec![2usize, 3];
    let cop = c.opposite();
    for o in c.objects() {
        let w = yoneda(&cop, o);
        let l = weighted_limit(&c, &w, &m, &phi).unwrap();
        assert_eq!(l, phi[o]);
        assert!(is_weighted_limit(&c, &w, &m, &phi, l));
        let wc = yoneda(&c, o);
        let l = weighted_colimit(&c, &wc, &m, &phi).unwrap();
        assert_eq!(l, phi[o]);
        assert!(is_weighted_colimit(&c, &wc, &m, &phi, l));
    }
    let u = EnrichedCat::unit_category(q.clone());
    for a in q.elements() {
        for x in m.elements() {
            assert_eq!(weighted_limit(&u, &[a], &m, &[x]).unwrap(), m.cotensor(a, x));
        }
    }
    let d = EnrichedCat::discrete(q.clone(), 2);
    let m2 = QuantaleModule::power(&q, 2);
    for x in m2.elements() {
        for y in m2.elements() {
            assert_eq!(weighted_limit(&d, &[0, 0], &m2, &[x, y]).unwrap(), m2.meet(x, y));
        }
    }
    let err = weighted_limit(&c, &[0, 0], &m, &[0, 5]).unwrap_err();
    assert!(err.to_string().contains("not functorial"), "{err}");
}

#[test]
fn universal_properties_and_weight_joins() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let c = random_tropical(&mut rng, 2, 3);
        let q = c.quantale().clone();
        let target = EnrichedCat::closure(q.clone(), labels(2), vec![vec![0, 1], vec![2, 0]]).unwrap();
        let p = presheaves(&target).unwrap();
        let m = p.module();
        let phi = diagram_closure(&c, m, c.objects().map(|_| rng.gen_range(0..m.size())).collect());
        let rand_w = |rng: &mut ChaCha8Rng| -> Vec<u16> { c.objects().map(|_| rng.gen_range(0..q.size() as u16)).collect() };
        let (w1, w2) = (presheaf_closure(&c.opposite(), rand_w(&mut rng)), presheaf_closure(&c.opposite(), rand_w(&mut rng)));
        let l1 = weighted_limit(&c, &w1, m, &phi).unwrap();
        let l2 = weighted_limit(&c, &w2, m, &phi).unwrap();
        assert!(is_weighted_limit(&c, &w1, m, &phi, l1));
        let wj: Vec<u16> = w1.iter().zip(&w2).map(|(&a, &b)| q.join(a, b)).collect();
        assert_eq!(weighted_limit(&c, &wj, m, &phi).unwrap(), m.meet(l1, l2));

        let (v1, v2) = (presheaf_closure(&c, rand_w(&mut rng)), presheaf_closure(&c, rand_w(&mut rng)));
        let k1 = weighted_colimit(&c, &v1, m, &phi).unwrap();
        let k2 = weighted_colimit(&c, &v2, m, &phi).unwrap();
        assert!(is_weighted_colimit(&c, &v1, m, &phi, k1));
        let vj: Vec<u16> = v1.iter().zip(&v2).map(|(&a, &b)| q.join(a, b)).collect();
        assert_eq!(weighted_colimit(&c, &vj, m, &phi).unwrap(), m.join(k1, k2));
    }
}

#[test]
fn bar_terms() {
    let q = trop(6);
    let u = EnrichedCat::unit_category(q.clone());
    for a in q.elements() {
        for n in 0..=2 {
            assert_eq!(bk_term(&u, &[a], n).unwrap(), vec![a]);
        }
    }
    assert!(bk_term(&u, &[0], 3).is_err());
    let c = metric(&q, &[&["0", "2"], &["inf", "0"]]).unwrap();
    for o in c.objects() {
        let y = yoneda(&c, o);
        assert!(bk_term(&c, &y, 0).unwrap().iter().zip(&y).all(|(&b, &v)| q.le(v, b)));
        assert!(bk_reconstruct(&c, &y).unwrap());
    }
    // every downset of a three-element preorder
    for c in all_boolean_cats().into_iter().filter(|c| c.size() == 3) {
        let p = presheaves(&c).unwrap();
        for psi in p.elements() {
            assert!(bk_reconstruct(&c, psi).unwrap());
        }
    }
}

#[test]
fn compactness() {
    let q = trop(3);
    let a = QuantaleModule::regular(&q);
    assert!(totally_compact_check(q.unit() as usize, &a));
    let d = EnrichedCat::discrete(boolean(), 2);
    let p = presheaves(&d).unwrap();
    let top = p.module().top();
    assert_eq!(p.element(top), &[1, 1]);
    assert!(!totally_compact_check(top, p.module()));
}

#[test]
fn module_validation() {
    let err = QuantaleModule::new(boolean(), labels(2), |a, b| a.max(b), |_, m| m).unwrap_err();
    assert!(err.to_string().contains("zero"), "{err}");
    // the diamond lattice ⊥ < x, y < ⊤
    let j = vec![vec![0, 1, 2, 3], vec![1, 1, 3, 3], vec![2, 3, 2, 3], vec![3, 3, 3, 3]];
    let m = QuantaleModule::boolean_lattice(labels(4), &j).unwrap();
    assert_eq!((m.meet(1, 2), m.bottom(), m.top()), (0, 0, 3));
    assert_eq!(module_maps(&m, &QuantaleModule::regular(m.quantale())).len(), 4);
}

/// Small modules for the limit-decomposition check.
fn small_modules() -> Vec<QuantaleModule> {
    let b = boolean();
    let chain = |n: usize| -> QuantaleModule {
        let j: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|c| a.max(c)).collect()).collect();
        QuantaleModule::boolean_lattice(labels(n), &j).unwrap()
    };
    let diamond = vec![vec![0, 1, 2, 3], vec![1, 1, 3, 3], vec![2, 3, 2, 3], vec![3, 3, 3, 3]];
    // pentagon ⊥ < x < z < ⊤, ⊥ < y < ⊤
    let pent = {
        let le = |a: usize, c: usize| a == c || a == 0 || c == 4 || (a == 1 && c == 3);
        let join = |a: usize, c: usize| (0..5).filter(|&u| le(a, u) && le(c, u)).find(|&u| (0..5).all(|v| !(le(a, v) && le(c, v)) || le(u, v))).unwrap();
        (0..5).map(|a| (0..5).map(|c| join(a, c)).collect::<Vec<_>>()).collect::<Vec<_>>()
    };
    let names = |n: usize| (0..n).map(|i| format!("m{i}")).collect::<Vec<_>>();
    vec![
        chain(2),
        chain(3),
        QuantaleModule::boolean_lattice(labels(4), &diamond).unwrap(),
        QuantaleModule::boolean_lattice(names(5), &pent).unwrap(),
        QuantaleModule::power(&b, 2),
        QuantaleModule::regular(&trop(2)),
        QuantaleModule::regular(&trop(4)),
    ]
}

/// Limit shapes probing the decomposition: empty, discrete pairs, single
/// objects with each weight, and a couple of non-discrete shapes.
fn preserves_corpus_limits(f: &ModuleMap, src: &QuantaleModule, tgt: &QuantaleModule) -> bool {
    let q = src.quantale().clone();
    let mut shapes = vec![EnrichedCat::discrete(q.clone(), 0), EnrichedCat::discrete(q.clone(), 1), EnrichedCat::discrete(q.clone(), 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..3 {
        let hom = (0..2).map(|_| (0..2).map(|_| rng.gen_range(0..q.size() as u16)).collect()).collect();
        shapes.push(EnrichedCat::closure(q.clone(), labels(2), hom).unwrap());
    }
    shapes.iter().all(|c| {
        let weights: Vec<Vec<u16>> = {
            let n = c.size();
            let total = q.size().pow(n as u32);
            (0..total)
                .map(|mut k| {
                    (0..n)
                        .map(|_| {
                            let v = (k % q.size()) as u16;
                            k /= q.size();
                            v
                        })
                        .collect()
                })
                .filter(|w: &Vec<u16>| is_presheaf(&c.opposite(), w))
                .collect()
        };
        let n = c.size();
        let diagrams = (0..src.size().pow(n as u32)).map(|mut k| {
            (0..n)
                .map(|_| {
                    let v = k % src.size();
                    k /= src.size();
                    v
                })
                .collect::<Vec<_>>()
        });
        diagrams.filter(|phi| check_diagram(c, src, phi).is_ok()).all(|phi| {
            let image: Vec<usize> = phi.iter().map(|&x| f.at(x)).collect();
            weights.iter().all(|w| {
                f.at(weighted_limit(c, w, src, &phi).unwrap()) == weighted_limit(c, w, tgt, &image).unwrap()
            })
        })
    })
}

#[test]
fn limit_preservation_decomposes() {
    let mods = small_modules();
    let mut agree = [0usize; 2];
    for s in &mods {
        for t in &mods {
            if s.quantale() != t.quantale() {
                continue;
            }
            for f in module_maps(s, t) {
                let a = f.preserves_meets_top_cotensors(s, t);
                let b = preserves_corpus_limits(&f, s, t);
                assert_eq!(a, b, "{:?}", f.table);
                agree[usize::from(a)] += 1;
            }
        }
    }
    assert!(agree[0] > 0 && agree[1] > 0, "{agree:?}");
}

#[test]
fn full_inclusions_extend() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let d = random_tropical(&mut rng, 2, 3);
        let sub: Vec<usize> = d.objects().filter(|_| rng.gen_bool(0.6)).collect();
        if sub.is_empty() {
            continue;
        }
        let c = d.full_subcategory(&sub);
        let pc = presheaves(&c).unwrap();
        let pd = presheaves(&d).unwrap();
        for i in 0..pc.size() {
            let ei = pd.index_of(&extend_presheaf(&d, &sub, pc.element(i))).unwrap();
            // restricting back recovers Φ
            let back: Vec<u16> = sub.iter().map(|&o| pd.element(ei)[o]).collect();
            assert_eq!(back, pc.element(i));
            for j in 0..pc.size() {
                let ej = pd.index_of(&extend_presheaf(&d, &sub, pc.element(j))).unwrap();
                assert_eq!(pd.hom(ei, ej), pc.hom(i, j));
            }
        }
    }
}

#[test]
fn presheaf_duality() {
    for c in all_boolean_cats() {
        assert!(duality_bijection(&c).unwrap());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        assert!(duality_bijection(&random_tropical(&mut rng, 1, 2)).unwrap());
    }
}
