//! Writing library objects back out as scenario declarations.
//!
//! Groups and groupoids are emitted structurally (products stay products),
//! since kernels compare their bases by structure.

use std::collections::BTreeMap;
use std::sync::Arc;

use deskcat::coeff::{Quantale, QuantaleKind};
use deskcat::enhance::{LaxFunctor, SmPoset};
use deskcat::enriched::EnrichedCat;
use deskcat::frobenius::WeilSheaf;
use deskcat::groupoid::{FinGroup, FinGroupoid, GroupoidMap};
use deskcat::kernelcalc::Kernel;
use deskcat::sheafcalc::Bundle;
use serde_json::{json, Map, Value};

use crate::tasks::mat_json;

#[derive(Default)]
pub struct Writer {
    sections: BTreeMap<&'static str, Map<String, Value>>,
    groups: Vec<Arc<FinGroup>>,
    groupoids: Vec<Arc<FinGroupoid>>,
    quantales: Vec<Quantale>,
    posets: Vec<SmPoset>,
    counter: BTreeMap<&'static str, usize>,
    tasks: Vec<Value>,
    mutations: Vec<String>,
}

impl Writer {
    pub fn new(mutations: &[String]) -> Self {
        Writer { mutations: mutations.to_vec(), ..Default::default() }
    }

    fn fresh(&mut self, section: &'static str, prefix: &str) -> String {
        let n = self.counter.entry(section).or_insert(0);
        *n += 1;
        format!("{prefix}{n}")
    }

    fn put(&mut self, section: &'static str, name: &str, v: Value) {
        self.sections.entry(section).or_default().insert(name.to_string(), v);
    }

    pub fn group(&mut self, g: &Arc<FinGroup>) -> String {
        if let Some(i) = self.groups.iter().position(|h| h.same_as(g)) {
            return format!("G{}", i + 1);
        }
        let v = match g.factors() {
            Some(fs) => json!({ "product": fs.to_vec().iter().map(|f| self.group(f)).collect::<Vec<_>>() }),
            None => json!({
                "labels": g.elements().map(|a| g.label(a)).collect::<Vec<_>>(),
                "table": g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            }),
        };
        self.groups.push(g.clone());
        let name = format!("G{}", self.groups.len());
        self.put("groups", &name, v);
        name
    }

    pub fn groupoid(&mut self, y: &Arc<FinGroupoid>) -> String {
        if let Some(i) = self.groupoids.iter().position(|z| z.same_as(y)) {
            return format!("Y{}", i + 1);
        }
        let v = match y.factors() {
            Some(fs) => json!({ "product": fs.to_vec().iter().map(|f| self.groupoid(f)).collect::<Vec<_>>() }),
            None => {
                let g = self.group(y.group());
                json!({
                    "group": g,
                    "points": y.points().map(|x| y.label(x)).collect::<Vec<_>>(),
                    "action": y.group().elements().map(|a| y.points().map(|x| y.act(a, x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            }
        };
        self.groupoids.push(y.clone());
        let name = format!("Y{}", self.groupoids.len());
        self.put("groupoids", &name, v);
        name
    }

    pub fn map(&mut self, f: &GroupoidMap) -> String {
        let (dom, cod) = (self.groupoid(f.dom()), self.groupoid(f.cod()));
        let v = json!({
            "dom": dom,
            "cod": cod,
            "theta": f.dom().group().elements().map(|a| f.theta(a)).collect::<Vec<_>>(),
            "objects": f.dom().points().map(|x| f.on_object(x)).collect::<Vec<_>>(),
        });
        let name = self.fresh("maps", "f");
        self.put("maps", &name, v);
        name
    }

    pub fn bundle(&mut self, b: &Bundle) -> String {
        let y = b.base();
        let base = self.groupoid(y);
        let rho: Vec<Value> = y.group().elements().map(|a| Value::Array(y.points().map(|x| mat_json(&b.rho(a, x))).collect())).collect();
        let name = self.fresh("bundles", "V");
        self.put("bundles", &name, json!({ "base": base, "dims": b.dims(), "rho": rho }));
        name
    }

    fn is_plain_set(y: &Arc<FinGroupoid>) -> bool {
        y.same_as(&FinGroupoid::discrete_n(y.size()))
    }

    pub fn kernel(&mut self, k: &Kernel) -> String {
        let v = if Self::is_plain_set(k.left()) && Self::is_plain_set(k.right()) {
            json!({ "dims": k.dims() })
        } else {
            let (l, r) = (self.groupoid(k.left()), self.groupoid(k.right()));
            let p = self.bundle(k.payload());
            json!({ "left": l, "right": r, "payload": p })
        };
        let name = self.fresh("kernels", "K");
        self.put("kernels", &name, v);
        name
    }

    pub fn weil(&mut self, w: &WeilSheaf) -> String {
        let b = self.bundle(&w.v);
        let f = self.map(&w.f);
        let alpha: Vec<Value> = w.alpha.maps.iter().map(mat_json).collect();
        let name = self.fresh("weil", "W");
        self.put("weil", &name, json!({ "bundle": b, "frobenius": f, "alpha": alpha }));
        name
    }

    pub fn quantale(&mut self, q: &Quantale) -> String {
        match q.kind() {
            QuantaleKind::Boolean => return "boolean".into(),
            QuantaleKind::Tropical { cap } => return format!("tropical:{cap}"),
            QuantaleKind::Lattice => {}
        }
        if let Some(i) = self.quantales.iter().position(|p| p == q) {
            return format!("Q{}", i + 1);
        }
        let els: Vec<u16> = q.elements().collect();
        let table = |f: &dyn Fn(u16, u16) -> u16| -> Vec<Vec<&str>> {
            els.iter().map(|&a| els.iter().map(|&b| q.label(f(a, b))).collect()).collect()
        };
        let v = json!({
            "labels": q.labels(),
            "join": table(&|a, b| q.join(a, b)),
            "tensor": table(&|a, b| q.tensor(a, b)),
            "unit": q.label(q.unit()),
        });
        self.quantales.push(q.clone());
        let name = format!("Q{}", self.quantales.len());
        self.put("quantales", &name, v);
        name
    }

    pub fn category(&mut self, c: &EnrichedCat) -> String {
        let q = c.quantale().clone();
        let qn = self.quantale(&q);
        let hom: Vec<Vec<&str>> = c.hom_table().iter().map(|r| r.iter().map(|&h| q.label(h)).collect()).collect();
        let name = self.fresh("categories", "C");
        self.put("categories", &name, json!({ "quantale": qn, "objects": c.labels(), "hom": hom }));
        name
    }

    pub fn poset(&mut self, o: &SmPoset) -> String {
        if let Some(i) = self.posets.iter().position(|p| p == o) {
            return format!("O{}", i + 1);
        }
        let n = o.size();
        let table = |f: &dyn Fn(usize, usize) -> usize| -> Vec<Vec<usize>> { (0..n).map(|a| (0..n).map(|b| f(a, b)).collect()).collect() };
        let v = json!({
            "labels": o.labels(),
            "le": (0..n).map(|a| (0..n).map(|b| o.le(a, b)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "tensor": table(&|a, b| o.tensor(a, b)),
            "unit": o.unit(),
            "ihom": table(&|a, b| o.ihom(a, b)),
            "duals": o.duals(),
        });
        self.posets.push(o.clone());
        let name = format!("O{}", self.posets.len());
        self.put("posets", &name, v);
        name
    }

    pub fn functor(&mut self, f: &LaxFunctor) -> String {
        let o = self.poset(&f.source);
        let q = self.quantale(&f.target);
        let values: Vec<&str> = f.table().iter().map(|&v| f.target.label(v)).collect();
        let name = self.fresh("functors", "F");
        self.put("functors", &name, json!({ "source": o, "target": q, "values": values }));
        name
    }

    pub fn task(&mut self, op: &str, args: Vec<Value>) {
        self.tasks.push(json!({ "op": op, "args": args }));
    }

    pub fn finish(self) -> Value {
        let mut doc = Map::new();
        for (k, v) in self.sections {
            doc.insert(k.to_string(), Value::Object(v));
        }
        if !self.mutations.is_empty() {
            doc.insert("mutations".into(), json!(self.mutations));
        }
        doc.insert("tasks".into(), Value::Array(self.tasks));
        Value::Object(doc)
    }
}

#[cfg(test)]
mod tests {
    use deskcat::corpus::Corpus;
    use deskcat::enhance::lax_functors;
    use deskcat::frobenius::sfunct;
    use deskcat::sheafcalc::isomorphic;

    use super::*;
    use crate::report;
    use crate::scenario::Scenario;
    use crate::Limits;

    fn reload(w: Writer) -> Scenario {
        let text = serde_json::to_string(&w.finish()).unwrap();
        Scenario::parse(&text, Limits::default()).unwrap_or_else(|e| panic!("{e}\n{text}"))
    }

    #[test]
    fn sheaves_and_kernels_round_trip() {
        let mut c = Corpus::new(7);
        for _ in 0..15 {
            let y = c.action_groupoid(8, 3);
            let k = c.kernel(&y, &y);
            let f = c.map_from(&y);
            let v = c.bundle(&y);
            let ws = c.weil_sheaf(6, 3);
            let mut w = Writer::new(&[]);
            let (kn, fname, vn, wn) = (w.kernel(&k), w.map(&f), w.bundle(&v), w.weil(&ws));
            w.task("norm", vec![json!(fname), json!(vn)]);
            w.task("sheaf_function", vec![json!(wn)]);
            let s = reload(w);
            assert!(isomorphic(s.kernels[&kn].payload(), k.payload()));
            assert_eq!(s.kernels[&kn].dims(), k.dims());
            assert!(isomorphic(&s.bundles[&vn], &v));
            assert_eq!(sfunct(&s.weil[&wn]).unwrap().rows(), sfunct(&ws).unwrap().rows());
            assert_eq!(report::run(&s, false).exit_code(), 0);
        }
    }

    #[test]
    fn enriched_data_round_trips() {
        let chain: Vec<Vec<u16>> = (0..3).map(|a| (0..3).map(|b| a.max(b)).collect()).collect();
        let tensor: Vec<Vec<u16>> = (0..3).map(|a| (0..3).map(|b| a.min(b)).collect()).collect();
        let q = Arc::new(Quantale::lattice(["0", "h", "1"].map(String::from).to_vec(), &chain, &tensor, 2).unwrap());
        let c = EnrichedCat::closure(q.clone(), vec!["a".into(), "b".into()], vec![vec![2, 1], vec![0, 2]]).unwrap();
        let o = SmPoset::from_quantale(&Quantale::tropical(2));
        let mut w = Writer::new(&[]);
        let cn = w.category(&c);
        let mut fnames = vec![];
        for f in lax_functors(&o, &q).into_iter().take(5) {
            fnames.push((w.functor(&f), f));
        }
        w.task("yoneda_lemma", vec![json!(cn)]);
        let s = reload(w);
        assert_eq!(s.categories[&cn], c);
        for (n, f) in &fnames {
            assert_eq!(s.functors[n].table(), f.table());
            assert_eq!(s.functors[n].source, f.source);
        }
        assert_eq!(report::run(&s, false).exit_code(), 0);
    }
}
