//! The randomized self-test: each property draws its own seeded corpus, so
//! results do not depend on which other properties ran or in what order.

use std::path::PathBuf;
use std::sync::Arc;

use deskcat::coeff::Quantale;
use deskcat::corpus::{stabilizer_inclusion, Corpus};
use deskcat::enhance::{lax_functors, LaxFunctor, SmPoset};
use deskcat::enriched::{diagram_closure, presheaf_closure, presheaves_bounded, EnrichedCat, QuantaleModule};
use deskcat::frobenius::WeilSheaf;
use deskcat::groupoid::GroupoidMap;
use deskcat::kernelcalc::Kernel;
use deskcat::sheafcalc::Bundle;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::serialize::Writer;
use crate::tasks::{self, Check};
use crate::{CliError, Limits};

pub struct Options {
    pub size: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub mutations: Vec<String>,
    pub limits: Limits,
}

impl Options {
    fn mutated(&self, name: &str) -> bool {
        self.mutations.iter().any(|m| m == name)
    }
}

#[derive(Clone, Copy, Debug)]
enum ModuleKind {
    Regular,
    Square,
    Presheaves,
}

impl ModuleKind {
    fn build(self, c: &EnrichedCat, limits: &Limits) -> deskcat::Result<QuantaleModule> {
        Ok(match self {
            ModuleKind::Regular => QuantaleModule::regular(c.quantale()),
            ModuleKind::Square => QuantaleModule::power(c.quantale(), 2),
            ModuleKind::Presheaves => presheaves_bounded(c, limits.presheaves)?.module().clone(),
        })
    }

    fn spec(self) -> &'static str {
        match self {
            ModuleKind::Regular => "regular",
            ModuleKind::Square => "power:2",
            ModuleKind::Presheaves => "presheaves",
        }
    }
}

#[derive(Clone)]
enum Case {
    Assoc(Kernel, Kernel, Kernel),
    Unit(Kernel),
    Trace(Kernel),
    Sheaf(WeilSheaf),
    BaseChange(GroupoidMap, GroupoidMap, Bundle),
    Projection(GroupoidMap, Bundle, Bundle),
    Norm(GroupoidMap, Bundle),
    Yoneda(EnrichedCat),
    /// Category, limit weight, colimit weight, module, diagram.
    Weighted(EnrichedCat, Vec<u16>, Vec<u16>, ModuleKind, Vec<usize>),
    Enh(LaxFunctor),
}

const PROPERTIES: [&str; 10] = [
    "associativity",
    "unit_laws",
    "trace_comparison",
    "sheaf_function",
    "base_change",
    "projection_formula",
    "norm",
    "yoneda",
    "weighted_limits",
    "enhancement",
];

fn square_kernel(c: &mut Corpus, n: usize, max_dim: usize) -> Kernel {
    let dims: Vec<Vec<usize>> = (0..n).map(|_| (0..n).map(|_| c.rng().gen_range(0..=max_dim)).collect()).collect();
    Kernel::from_dims(&dims).expect("square table")
}

fn random_category(c: &mut Corpus) -> EnrichedCat {
    let q = Arc::new(match c.rng().gen_range(0..3) {
        0 => Quantale::boolean(),
        1 => Quantale::tropical(2),
        _ => Quantale::tropical(3),
    });
    let n = c.rng().gen_range(1..=3);
    let size = q.size() as u16;
    let hom = (0..n).map(|a| (0..n).map(|b| if a == b { q.unit() } else { c.rng().gen_range(0..size) }).collect()).collect();
    EnrichedCat::closure(q, (0..n).map(|i| format!("c{i}")).collect(), hom).expect("closure of a table")
}

fn random_values(c: &mut Corpus, q: &Quantale, n: usize) -> Vec<u16> {
    (0..n).map(|_| c.rng().gen_range(0..q.size() as u16)).collect()
}

fn generate(property: usize, c: &mut Corpus, limits: &Limits) -> Case {
    match property {
        0 => {
            let n = c.rng().gen_range(1..=3);
            Case::Assoc(square_kernel(c, n, 2), square_kernel(c, n, 2), square_kernel(c, n, 2))
        }
        1 | 2 => {
            let k = if c.rng().gen_bool(0.5) {
                c.discrete_kernel(4, 3)
            } else {
                let y = c.action_groupoid(6, 3);
                c.kernel(&y, &y)
            };
            if property == 1 {
                Case::Unit(k)
            } else {
                Case::Trace(k)
            }
        }
        3 => Case::Sheaf(c.weil_sheaf(6, 3)),
        4..=6 => {
            let x = c.action_groupoid(8, 3);
            let f = c.map_from(&x);
            let v = c.bundle(&x);
            match property {
                4 => {
                    let g = if c.rng().gen_bool(0.5) {
                        let p = c.rng().gen_range(0..f.cod().size());
                        stabilizer_inclusion(f.cod(), p)
                    } else {
                        GroupoidMap::identity(f.cod())
                    };
                    Case::BaseChange(f, g, v)
                }
                5 => {
                    let w = c.bundle(f.cod());
                    Case::Projection(f, v, w)
                }
                _ => Case::Norm(f, v),
            }
        }
        7 => Case::Yoneda(random_category(c)),
        8 => {
            let cat = random_category(c);
            let q = cat.quantale().clone();
            let n = cat.size();
            let wl = presheaf_closure(&cat.opposite(), random_values(c, &q, n));
            let wc = presheaf_closure(&cat, random_values(c, &q, n));
            let mut kind = [ModuleKind::Regular, ModuleKind::Square, ModuleKind::Presheaves][c.rng().gen_range(0..3)];
            let m = match kind.build(&cat, limits) {
                Ok(m) if m.size() <= 64 => m,
                _ => {
                    kind = ModuleKind::Regular;
                    QuantaleModule::regular(&q)
                }
            };
            let raw: Vec<usize> = (0..n).map(|_| c.rng().gen_range(0..m.size())).collect();
            let phi = diagram_closure(&cat, &m, raw);
            Case::Weighted(cat, wl, wc, kind, phi)
        }
        _ => {
            let cyclic = |n: usize| {
                SmPoset::group((0..n).map(|i| format!("g{i}")).collect(), (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect())
                    .expect("cyclic groups")
            };
            let sources = [
                SmPoset::unit_category(),
                SmPoset::from_quantale(&Quantale::boolean()),
                SmPoset::from_quantale(&Quantale::tropical(2)),
                cyclic(2),
                cyclic(3),
            ];
            let o = sources.choose(c.rng()).expect("nonempty").clone();
            let q = Arc::new(match c.rng().gen_range(0..3) {
                0 => Quantale::boolean(),
                1 => Quantale::tropical(2),
                _ => Quantale::tropical(3),
            });
            let fs = lax_functors(&o, &q);
            Case::Enh(fs.choose(c.rng()).expect("the constant unit functor is lax").clone())
        }
    }
}

fn check(case: &Case, opts: &Options) -> Check {
    let r = match case {
        Case::Assoc(k, l, m) => tasks::associativity(k, l, m, opts.mutated("convolution-order")),
        Case::Unit(k) => tasks::unit_laws(k),
        Case::Trace(k) => tasks::trace_comparison(k),
        Case::Sheaf(w) => tasks::sheaf_function(w),
        Case::BaseChange(f, g, v) => tasks::base_change(f, g, v),
        Case::Projection(f, v, w) => tasks::projection_formula(f, v, w),
        Case::Norm(f, v) => tasks::norm(f, v),
        Case::Yoneda(c) => tasks::yoneda_lemma(c, opts.limits.presheaves, opts.mutated("residuation")),
        Case::Weighted(c, wl, wc, kind, phi) => kind.build(c, &opts.limits).and_then(|m| tasks::weighted(c, wl, wc, &m, phi)),
        Case::Enh(f) => tasks::enhancement(f),
    };
    r.unwrap_or_else(|e| Check { holds: false, witness: Some(e.to_string()), detail: Default::default() })
}

fn drop_index<T: Clone>(xs: &[T], i: usize) -> Vec<T> {
    xs.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, x)| x.clone()).collect()
}

/// Smaller dimension tables: one index removed, or one entry lowered.
fn smaller_tables(dims: &[Vec<Vec<usize>>]) -> Vec<Vec<Vec<Vec<usize>>>> {
    let n = dims[0].len();
    let mut out = Vec::new();
    if n > 1 {
        for i in 0..n {
            out.push(dims.iter().map(|d| drop_index(d, i).iter().map(|r| drop_index(r, i)).collect()).collect());
        }
    }
    for (t, d) in dims.iter().enumerate() {
        for i in 0..n {
            for j in 0..n {
                if d[i][j] > 0 {
                    let mut e = dims.to_vec();
                    e[t][i][j] = 0;
                    out.push(e.clone());
                    if d[i][j] > 1 {
                        e[t][i][j] = d[i][j] - 1;
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

fn is_plain(k: &Kernel) -> bool {
    k.left().group().order() == 1 && k.right().group().order() == 1 && k.left().size() == k.right().size()
}

fn shrink(case: &Case) -> Vec<Case> {
    let kernels = |ds: &[Vec<Vec<usize>>]| -> Vec<Kernel> { ds.iter().map(|d| Kernel::from_dims(d).expect("square")).collect() };
    match case {
        Case::Assoc(k, l, m) if [k, l, m].iter().all(|k| is_plain(k)) => smaller_tables(&[k.dims(), l.dims(), m.dims()])
            .iter()
            .map(|t| {
                let ks = kernels(t);
                Case::Assoc(ks[0].clone(), ks[1].clone(), ks[2].clone())
            })
            .collect(),
        Case::Unit(k) if is_plain(k) => smaller_tables(&[k.dims()]).iter().map(|t| Case::Unit(kernels(t).remove(0))).collect(),
        Case::Trace(k) if is_plain(k) => smaller_tables(&[k.dims()]).iter().map(|t| Case::Trace(kernels(t).remove(0))).collect(),
        Case::Yoneda(c) if c.size() > 1 => {
            (0..c.size()).map(|i| Case::Yoneda(c.full_subcategory(&drop_index(&c.objects().collect::<Vec<_>>(), i)))).collect()
        }
        Case::Weighted(c, wl, wc, kind, phi) if c.size() > 1 => (0..c.size())
            .map(|i| {
                let keep = drop_index(&c.objects().collect::<Vec<_>>(), i);
                Case::Weighted(c.full_subcategory(&keep), drop_index(wl, i), drop_index(wc, i), *kind, drop_index(phi, i))
            })
            .collect(),
        _ => vec![],
    }
}

fn minimize(case: Case, opts: &Options) -> Case {
    let mut cur = case;
    'outer: loop {
        for cand in shrink(&cur) {
            if !check(&cand, opts).holds {
                cur = cand;
                continue 'outer;
            }
        }
        return cur;
    }
}

/// A scenario whose single property task re-raises the failure.
fn counterexample(case: &Case, opts: &Options) -> Value {
    let mut w = Writer::new(&opts.mutations);
    match case {
        Case::Assoc(k, l, m) => {
            let args = vec![json!(w.kernel(k)), json!(w.kernel(l)), json!(w.kernel(m))];
            w.task("associativity", args);
        }
        Case::Unit(k) => {
            let a = w.kernel(k);
            w.task("unit_laws", vec![json!(a)]);
        }
        Case::Trace(k) => {
            let a = w.kernel(k);
            w.task("compare_traces", vec![json!(a)]);
        }
        Case::Sheaf(s) => {
            let a = w.weil(s);
            w.task("sheaf_function", vec![json!(a)]);
        }
        Case::BaseChange(f, g, v) => {
            let args = vec![json!(w.map(f)), json!(w.map(g)), json!(w.bundle(v))];
            w.task("base_change", args);
        }
        Case::Projection(f, v, b) => {
            let args = vec![json!(w.map(f)), json!(w.bundle(v)), json!(w.bundle(b))];
            w.task("projection_formula", args);
        }
        Case::Norm(f, v) => {
            let args = vec![json!(w.map(f)), json!(w.bundle(v))];
            w.task("norm", args);
        }
        Case::Yoneda(c) => {
            let a = w.category(c);
            w.task("yoneda_lemma", vec![json!(a)]);
        }
        Case::Weighted(c, wl, wc, kind, phi) => {
            let a = w.category(c);
            let q = c.quantale();
            let labels = |xs: &[u16]| json!(xs.iter().map(|&x| q.label(x)).collect::<Vec<_>>());
            w.task("weighted_limit", vec![json!(a), labels(wl), json!(kind.spec()), json!(phi)]);
            w.task("weighted_colimit", vec![json!(a), labels(wc), json!(kind.spec()), json!(phi)]);
        }
        Case::Enh(f) => {
            let a = w.functor(f);
            w.task("enh_module", vec![json!(a)]);
        }
    }
    w.finish()
}

struct Outcome {
    passed: usize,
    failure: Option<(String, Value)>,
}

fn run_property(p: usize, opts: &Options) -> Outcome {
    let salt = (p as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut corpus = Corpus::new(opts.seed ^ salt);
    let mut passed = 0;
    for _ in 0..opts.size {
        let case = generate(p, &mut corpus, &opts.limits);
        let r = check(&case, opts);
        if !r.holds {
            let small = minimize(case, opts);
            let witness = check(&small, opts).witness.or(r.witness).unwrap_or_default();
            return Outcome { passed, failure: Some((witness, counterexample(&small, opts))) };
        }
        passed += 1;
    }
    Outcome { passed, failure: None }
}

pub fn run(opts: &Options) -> Result<u8, CliError> {
    let outcomes: Vec<Outcome> = (0..PROPERTIES.len()).into_par_iter().map(|p| run_property(p, opts)).collect();
    let width = PROPERTIES.iter().map(|p| p.len()).max().unwrap_or(0);
    let mut failed = false;
    println!("selftest seed={} corpus-size={}", opts.seed, opts.size);
    for (name, o) in PROPERTIES.iter().zip(&outcomes) {
        let total = if o.failure.is_some() { o.passed + 1 } else { o.passed };
        println!("{name:<width$}  {}/{} passed", o.passed, total);
        if let Some((witness, doc)) = &o.failure {
            failed = true;
            std::fs::create_dir_all(&opts.out).map_err(|e| CliError::Input(format!("{}: {e}", opts.out.display())))?;
            let path = opts.out.join(format!("counterexample-{name}.json"));
            let text = serde_json::to_string_pretty(doc).expect("values serialize");
            std::fs::write(&path, text + "\n").map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            println!("  witness: {witness}");
            println!("  counterexample: {}", path.display());
        }
    }
    if failed {
        println!("FAILED");
        Ok(2)
    } else {
        println!("all properties passed");
        Ok(0)
    }
}
