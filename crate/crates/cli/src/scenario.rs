//! Scenario files: a JSON document of declarations and tasks.
//!
//! Declarations may refer to each other in any order; they are resolved by
//! repeated passes, and a name that never resolves is reported.

use std::collections::BTreeMap;
use std::sync::Arc;

use deskcat::coeff::{parse_rat, rat, CoeffSystem, QMat, Quantale, Rat};
use deskcat::enhance::{LaxFunctor, SmPoset};
use deskcat::enriched::EnrichedCat;
use deskcat::frobenius::WeilSheaf;
use deskcat::groupoid::{FinGroup, FinGroupoid, GroupoidMap};
use deskcat::kernelcalc::{identity_kernel, Kernel};
use deskcat::sheafcalc::{Bundle, BundleMap};
use serde_json::Value;

use crate::{CliError, Limits};

#[derive(Clone, Debug)]
pub struct Task {
    pub op: String,
    pub args: Vec<Value>,
    pub expect: Option<Value>,
}

#[derive(Default)]
pub struct Scenario {
    pub coefficients: Option<CoeffSystem>,
    pub mutations: Vec<String>,
    pub quantales: BTreeMap<String, Arc<Quantale>>,
    pub groups: BTreeMap<String, Arc<FinGroup>>,
    pub groupoids: BTreeMap<String, Arc<FinGroupoid>>,
    pub maps: BTreeMap<String, GroupoidMap>,
    pub bundles: BTreeMap<String, Bundle>,
    pub kernels: BTreeMap<String, Kernel>,
    pub weil: BTreeMap<String, WeilSheaf>,
    pub categories: BTreeMap<String, EnrichedCat>,
    pub posets: BTreeMap<String, SmPoset>,
    pub functors: BTreeMap<String, LaxFunctor>,
    pub tasks: Vec<Task>,
    pub limits: Limits,
}

/// Declaration sections in dependency order.
const SECTIONS: [&str; 11] =
    ["quantales", "groups", "groupoids", "maps", "bundles", "kernels", "weil", "categories", "posets", "functors", "tasks"];

enum Fail {
    /// A reference to a name of `kind` that is not (yet) declared.
    Missing(&'static str, String),
    Bad(String),
}

impl From<deskcat::Error> for Fail {
    fn from(e: deskcat::Error) -> Self {
        Fail::Bad(e.to_string())
    }
}

type R<T> = std::result::Result<T, Fail>;

fn bad<T>(msg: impl Into<String>) -> R<T> {
    Err(Fail::Bad(msg.into()))
}

fn field<'a>(v: &'a Value, key: &str) -> R<&'a Value> {
    v.get(key).ok_or_else(|| Fail::Bad(format!("missing field '{key}'")))
}

fn string(v: &Value) -> R<&str> {
    v.as_str().ok_or_else(|| Fail::Bad(format!("expected a string, got {v}")))
}

fn array(v: &Value) -> R<&Vec<Value>> {
    v.as_array().ok_or_else(|| Fail::Bad(format!("expected an array, got {v}")))
}

fn usize_of(v: &Value) -> R<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| Fail::Bad(format!("expected a non-negative integer, got {v}")))
}

/// An index given either as a number or as a label.
fn index(v: &Value, n: usize, find: impl Fn(&str) -> Option<usize>) -> R<usize> {
    let i = match v {
        Value::String(s) => find(s).ok_or_else(|| Fail::Bad(format!("unknown label '{s}'")))?,
        _ => usize_of(v)?,
    };
    if i >= n {
        return bad(format!("index {i} out of range (size {n})"));
    }
    Ok(i)
}

pub(crate) fn rational(v: &Value) -> Option<Rat> {
    match v {
        Value::Number(n) => n.as_i64().map(rat),
        Value::String(s) => parse_rat(s),
        _ => None,
    }
}

fn matrix(v: &Value, rows: usize, cols: usize) -> R<QMat> {
    let rs = array(v)?;
    if rs.len() != rows {
        return bad(format!("expected {rows} matrix rows, got {}", rs.len()));
    }
    let mut out = Vec::with_capacity(rows);
    for r in rs {
        let r = array(r)?;
        if r.len() != cols {
            return bad(format!("expected {cols} matrix columns, got {}", r.len()));
        }
        out.push(r.iter().map(|x| rational(x).ok_or_else(|| Fail::Bad(format!("not a rational: {x}")))).collect::<R<Vec<_>>>()?);
    }
    Ok(if rows == 0 { QMat::zeros(0, cols) } else { QMat::from_rows(out) })
}

pub fn builtin_quantale(name: &str) -> Option<Quantale> {
    match name {
        "boolean" => Some(Quantale::boolean()),
        _ => name.strip_prefix("tropical:").and_then(|c| c.parse().ok()).map(Quantale::tropical),
    }
}

pub fn coeff_system(name: &str) -> Option<CoeffSystem> {
    match name {
        "rational" => Some(CoeffSystem::Rational),
        "integer" => Some(CoeffSystem::Integer),
        "natural" => Some(CoeffSystem::Natural),
        _ => builtin_quantale(name).map(|q| CoeffSystem::Quantale(Arc::new(q))),
    }
}

impl Scenario {
    pub fn parse(text: &str, limits: Limits) -> Result<Self, CliError> {
        let doc: Value = serde_json::from_str(text).map_err(|e| CliError::Input(format!("parse error: {e}")))?;
        let obj = doc.as_object().ok_or_else(|| CliError::Input("a scenario is a JSON object".into()))?;
        for k in obj.keys() {
            if !SECTIONS.contains(&k.as_str()) && k != "coefficients" && k != "mutations" {
                return Err(CliError::Input(format!("unknown section '{k}'")));
            }
        }
        let mut s = Scenario { limits, ..Default::default() };
        if let Some(c) = obj.get("coefficients") {
            let name = c.as_str().ok_or_else(|| CliError::Input("coefficients must be a string".into()))?;
            s.coefficients = Some(coeff_system(name).ok_or_else(|| CliError::Input(format!("unknown coefficients '{name}'")))?);
        }
        if let Some(m) = obj.get("mutations") {
            s.mutations = m
                .as_array()
                .and_then(|a| a.iter().map(|x| x.as_str().map(String::from)).collect())
                .ok_or_else(|| CliError::Input("mutations must be a list of names".into()))?;
        }
        let mut pending: Vec<(&'static str, String, Value)> = Vec::new();
        for sec in &SECTIONS[..SECTIONS.len() - 1] {
            if let Some(v) = obj.get(*sec) {
                let m = v.as_object().ok_or_else(|| CliError::Input(format!("section '{sec}' must be an object")))?;
                pending.extend(m.iter().map(|(k, v)| (*sec, k.clone(), v.clone())));
            }
        }
        loop {
            let before = pending.len();
            let mut last_missing = None;
            let mut next = Vec::new();
            for (sec, name, v) in pending {
                match s.declare(sec, &name, &v) {
                    Ok(()) => {}
                    Err(Fail::Missing(kind, what)) => {
                        last_missing = Some(format!("{sec} '{name}' refers to undeclared {kind} '{what}'"));
                        next.push((sec, name, v));
                    }
                    Err(Fail::Bad(msg)) => return Err(CliError::Input(format!("{sec} '{name}': {msg}"))),
                }
            }
            pending = next;
            if pending.is_empty() {
                break;
            }
            if pending.len() == before {
                return Err(CliError::Input(last_missing.expect("something is pending")));
            }
        }
        if let Some(t) = obj.get("tasks") {
            let t = t.as_array().ok_or_else(|| CliError::Input("tasks must be a list".into()))?;
            for (i, task) in t.iter().enumerate() {
                let op = task.get("op").and_then(Value::as_str).ok_or_else(|| CliError::Input(format!("task {i} has no op")))?;
                let args = match task.get("args") {
                    None => vec![],
                    Some(a) => a.as_array().cloned().ok_or_else(|| CliError::Input(format!("task {i}: args must be a list")))?,
                };
                s.tasks.push(Task { op: op.to_string(), args, expect: task.get("expect").cloned() });
            }
        }
        crate::tasks::validate(&s).map_err(CliError::Input)?;
        Ok(s)
    }

    pub fn quantale(&self, name: &str) -> Result<Arc<Quantale>, String> {
        if let Some(q) = self.quantales.get(name) {
            return Ok(q.clone());
        }
        let q = builtin_quantale(name).ok_or_else(|| format!("undeclared quantale '{name}'"))?;
        if q.size() > self.limits.carrier {
            return Err(format!("quantale {name} has {} elements, above the carrier limit {}", q.size(), self.limits.carrier));
        }
        Ok(Arc::new(q))
    }

    fn q(&self, name: &str) -> R<Arc<Quantale>> {
        self.quantale(name).map_err(|e| if e.starts_with("undeclared") { Fail::Missing("quantale", name.into()) } else { Fail::Bad(e) })
    }

    fn get<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, v: &Value) -> R<&'a T> {
        let name = string(v)?;
        map.get(name).ok_or_else(|| Fail::Missing(kind, name.to_string()))
    }

    fn declare(&mut self, sec: &str, name: &str, v: &Value) -> R<()> {
        match sec {
            "quantales" => {
                let labels: Vec<String> = array(field(v, "labels")?)?.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?;
                if labels.len() > self.limits.carrier {
                    return bad(format!("{} elements, above the carrier limit {}", labels.len(), self.limits.carrier));
                }
                let n = labels.len();
                let find = |s: &str| labels.iter().position(|l| l == s);
                let table = |key: &str| -> R<Vec<Vec<u16>>> {
                    array(field(v, key)?)?
                        .iter()
                        .map(|r| array(r)?.iter().map(|x| index(x, n, find).map(|i| i as u16)).collect())
                        .collect()
                };
                let (join, tensor) = (table("join")?, table("tensor")?);
                let unit = index(field(v, "unit")?, n, find)? as u16;
                let q = Quantale::lattice(labels.clone(), &join, &tensor, unit)?;
                self.quantales.insert(name.into(), Arc::new(q));
            }
            "groups" => {
                let g = self.group(v)?;
                if g.order() > self.limits.order {
                    return bad(format!("order {} is above the limit {}", g.order(), self.limits.order));
                }
                self.groups.insert(name.into(), g);
            }
            "groupoids" => {
                let y = self.groupoid(v)?;
                if y.group().order() > self.limits.order {
                    return bad(format!("group order {} is above the limit {}", y.group().order(), self.limits.order));
                }
                self.groupoids.insert(name.into(), y);
            }
            "maps" => {
                let m = self.map(v)?;
                self.maps.insert(name.into(), m);
            }
            "bundles" => {
                let b = self.bundle(v)?;
                if let Some(d) = b.dims().iter().find(|&&d| d > self.limits.dim) {
                    return bad(format!("stalk dimension {d} is above the limit {}", self.limits.dim));
                }
                self.bundles.insert(name.into(), b);
            }
            "kernels" => {
                let k = self.kernel(v)?;
                if let Some(d) = k.payload().dims().iter().find(|&&d| d > self.limits.dim) {
                    return bad(format!("stalk dimension {d} is above the limit {}", self.limits.dim));
                }
                self.kernels.insert(name.into(), k);
            }
            "weil" => {
                let bundle = Self::get(&self.bundles, "bundle", field(v, "bundle")?)?.clone();
                let f = Self::get(&self.maps, "map", field(v, "frobenius")?)?.clone();
                let alpha = match v.get("alpha") {
                    None => BundleMap::identity(&bundle),
                    Some(a) => {
                        let a = array(a)?;
                        if a.len() != bundle.base().size() {
                            return bad("alpha needs one matrix per point");
                        }
                        let maps = bundle
                            .base()
                            .points()
                            .map(|x| matrix(&a[x], bundle.dim(x), bundle.dim(f.on_object(x))))
                            .collect::<R<_>>()?;
                        BundleMap { maps }
                    }
                };
                self.weil.insert(name.into(), WeilSheaf::new(bundle, f, alpha)?);
            }
            "categories" => {
                let q = self.q(string(field(v, "quantale")?)?)?;
                let labels: Vec<String> = array(field(v, "objects")?)?.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?;
                let hom = array(field(v, "hom")?)?
                    .iter()
                    .map(|r| array(r)?.iter().map(|x| self.element(&q, x)).collect())
                    .collect::<R<Vec<Vec<u16>>>>()?;
                self.categories.insert(name.into(), EnrichedCat::new(q, labels, hom)?);
            }
            "posets" => {
                let o = self.poset(v)?;
                self.posets.insert(name.into(), o);
            }
            "functors" => {
                let o = Self::get(&self.posets, "poset", field(v, "source")?)?.clone();
                let q = self.q(string(field(v, "target")?)?)?;
                let values = array(field(v, "values")?)?.iter().map(|x| self.element(&q, x)).collect::<R<_>>()?;
                self.functors.insert(name.into(), LaxFunctor::new(o, q, values)?);
            }
            _ => unreachable!("sections are fixed"),
        }
        Ok(())
    }

    fn element(&self, q: &Quantale, v: &Value) -> R<u16> {
        match v {
            Value::String(s) => q.parse(s).ok_or_else(|| Fail::Bad(format!("'{s}' is not an element of the quantale"))),
            Value::Number(_) => q.parse(&v.to_string()).ok_or_else(|| Fail::Bad(format!("{v} is not an element of the quantale"))),
            _ => bad(format!("expected a quantale element, got {v}")),
        }
    }

    fn group(&self, v: &Value) -> R<Arc<FinGroup>> {
        if let Some(n) = v.get("cyclic") {
            return Ok(FinGroup::cyclic(usize_of(n)?.max(1)));
        }
        if let Some(n) = v.get("symmetric") {
            return Ok(FinGroup::symmetric(usize_of(n)?.max(1)));
        }
        if let Some(n) = v.get("dihedral") {
            return Ok(FinGroup::dihedral(usize_of(n)?.max(1)));
        }
        if v.get("quaternion").is_some() {
            return Ok(FinGroup::quaternion());
        }
        if v.get("trivial").is_some() {
            return Ok(FinGroup::trivial());
        }
        if let Some(p) = v.get("product") {
            let fs = array(p)?.iter().map(|x| Self::get(&self.groups, "group", x).cloned()).collect::<R<Vec<_>>>()?;
            return Ok(FinGroup::product(fs));
        }
        let labels: Vec<String> = array(field(v, "labels")?)?.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?;
        let n = labels.len();
        let find = |s: &str| labels.iter().position(|l| l == s);
        let table = array(field(v, "table")?)?
            .iter()
            .map(|r| array(r)?.iter().map(|x| index(x, n, find)).collect())
            .collect::<R<Vec<Vec<usize>>>>()?;
        Ok(FinGroup::from_table(labels, table)?)
    }

    fn groupoid(&self, v: &Value) -> R<Arc<FinGroupoid>> {
        if let Some(g) = v.get("classifying") {
            return Ok(FinGroupoid::classifying(Self::get(&self.groups, "group", g)?.clone()));
        }
        if v.get("point").is_some() {
            return Ok(FinGroupoid::point());
        }
        if let Some(d) = v.get("discrete") {
            return Ok(match d {
                Value::Array(ls) => FinGroupoid::discrete(ls.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?),
                _ => FinGroupoid::discrete_n(usize_of(d)?),
            });
        }
        if let Some(n) = v.get("symmetric_action") {
            return Ok(FinGroupoid::symmetric_action(usize_of(n)?.max(1)));
        }
        if let Some(p) = v.get("product") {
            let fs = array(p)?.iter().map(|x| Self::get(&self.groupoids, "groupoid", x).cloned()).collect::<R<Vec<_>>>()?;
            return Ok(FinGroupoid::product_many(fs));
        }
        let g = Self::get(&self.groups, "group", field(v, "group")?)?.clone();
        let labels: Vec<String> = array(field(v, "points")?)?.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?;
        let n = labels.len();
        let find = |s: &str| labels.iter().position(|l| l == s);
        let rows = array(field(v, "action")?)?;
        if rows.len() != g.order() {
            return bad(format!("action needs one row per group element ({})", g.order()));
        }
        let action = rows.iter().map(|r| array(r)?.iter().map(|x| index(x, n, find)).collect()).collect::<R<Vec<Vec<usize>>>>()?;
        Ok(FinGroupoid::new(labels, g, action)?)
    }

    fn map(&self, v: &Value) -> R<GroupoidMap> {
        if let Some(y) = v.get("identity") {
            return Ok(GroupoidMap::identity(Self::get(&self.groupoids, "groupoid", y)?));
        }
        if let Some(y) = v.get("to_point") {
            return Ok(GroupoidMap::to_point(Self::get(&self.groupoids, "groupoid", y)?));
        }
        if let Some(y) = v.get("diagonal") {
            return Ok(GroupoidMap::diagonal(Self::get(&self.groupoids, "groupoid", y)?));
        }
        let dom = Self::get(&self.groupoids, "groupoid", field(v, "dom")?)?.clone();
        let cod = Self::get(&self.groupoids, "groupoid", field(v, "cod")?)?.clone();
        let (gd, gc) = (dom.group().clone(), cod.group().clone());
        let theta = array(field(v, "theta")?)?.iter().map(|x| index(x, gc.order(), |s| gc.find(s))).collect::<R<Vec<_>>>()?;
        if theta.len() != gd.order() {
            return bad(format!("theta needs one image per element of the source group ({})", gd.order()));
        }
        let objects = array(field(v, "objects")?)?.iter().map(|x| index(x, cod.size(), |s| cod.find(s))).collect::<R<Vec<_>>>()?;
        Ok(GroupoidMap::new(dom, cod, theta, objects)?)
    }

    fn bundle(&self, v: &Value) -> R<Bundle> {
        let y = Self::get(&self.groupoids, "groupoid", field(v, "base")?)?.clone();
        if let Some(d) = v.get("trivial") {
            return Ok(Bundle::trivial(&y, usize_of(d)?));
        }
        if v.get("regular").is_some() {
            return Ok(Bundle::regular(&y)?);
        }
        let dims = array(field(v, "dims")?)?.iter().map(usize_of).collect::<R<Vec<_>>>()?;
        if dims.len() != y.size() {
            return bad(format!("dims needs one entry per point ({})", y.size()));
        }
        let g = y.group().clone();
        if let Some(rho) = v.get("rho") {
            let rho = array(rho)?;
            if rho.len() != g.order() {
                return bad(format!("rho needs one entry per group element ({})", g.order()));
            }
            let mut table = Vec::with_capacity(g.order());
            for (a, e) in rho.iter().enumerate() {
                let ms = array(e)?;
                if ms.len() != y.size() {
                    return bad("one matrix per point");
                }
                table.push(y.points().map(|x| matrix(&ms[x], dims[y.act(a, x)], dims[x])).collect::<R<Vec<_>>>()?);
            }
            let b = Bundle::from_action(y.clone(), dims, |a, x| table[a][x].clone())?;
            for a in g.elements() {
                if let Some(x) = y.points().find(|&x| b.rho(a, x) != table[a][x]) {
                    return bad(format!("rho is not a homomorphism: rho({}) at {} disagrees with its generators", g.label(a), y.label(x)));
                }
            }
            return Ok(b);
        }
        let gens = array(field(v, "gens")?)?;
        if gens.len() != g.gens().len() {
            return bad(format!("gens needs one entry per group generator ({})", g.gens().len()));
        }
        let gens = gens
            .iter()
            .zip(g.gens())
            .map(|(e, &s)| {
                let ms = array(e)?;
                if ms.len() != y.size() {
                    return bad("one matrix per point");
                }
                y.points().map(|x| matrix(&ms[x], dims[y.act(s, x)], dims[x])).collect::<R<Vec<_>>>()
            })
            .collect::<R<Vec<_>>>()?;
        Ok(Bundle::new(y, dims, gens)?)
    }

    fn kernel(&self, v: &Value) -> R<Kernel> {
        if let Some(d) = v.get("dims") {
            let dims = array(d)?.iter().map(|r| array(r)?.iter().map(usize_of).collect()).collect::<R<Vec<Vec<usize>>>>()?;
            if dims.iter().any(|r| r.len() != dims.len()) {
                return bad("dims must be square");
            }
            return Ok(Kernel::from_dims(&dims)?);
        }
        if let Some(y) = v.get("identity") {
            return Ok(identity_kernel(Self::get(&self.groupoids, "groupoid", y)?));
        }
        if let Some(f) = v.get("graph") {
            return Ok(Kernel::graph(Self::get(&self.maps, "map", f)?)?);
        }
        if let Some(c) = v.get("correspondence") {
            return Ok(Kernel::from_correspondence(Self::get(&self.maps, "map", c)?)?);
        }
        let left = Self::get(&self.groupoids, "groupoid", field(v, "left")?)?.clone();
        let right = Self::get(&self.groupoids, "groupoid", field(v, "right")?)?.clone();
        let payload = Self::get(&self.bundles, "bundle", field(v, "payload")?)?.clone();
        Ok(Kernel::new(left, right, payload)?)
    }

    fn poset(&self, v: &Value) -> R<SmPoset> {
        if let Some(q) = v.get("quantale") {
            return Ok(SmPoset::from_quantale(&*self.q(string(q)?)?));
        }
        if let Some(g) = v.get("group") {
            let g = Self::get(&self.groups, "group", g)?;
            let labels = g.elements().map(|a| g.label(a)).collect();
            let mul = g.elements().map(|a| g.elements().map(|b| g.mul(a, b)).collect()).collect();
            return Ok(SmPoset::group(labels, mul)?);
        }
        if v.get("unit").is_some() && v.get("labels").is_none() {
            return Ok(SmPoset::unit_category());
        }
        let labels: Vec<String> = array(field(v, "labels")?)?.iter().map(|x| string(x).map(String::from)).collect::<R<_>>()?;
        let n = labels.len();
        let find = |s: &str| labels.iter().position(|l| l == s);
        let table = |key: &str| -> R<Vec<Vec<usize>>> {
            array(field(v, key)?)?.iter().map(|r| array(r)?.iter().map(|x| index(x, n, find)).collect()).collect()
        };
        let le = array(field(v, "le")?)?
            .iter()
            .map(|r| array(r)?.iter().map(|x| x.as_bool().ok_or_else(|| Fail::Bad("le entries are booleans".into()))).collect())
            .collect::<R<Vec<Vec<bool>>>>()?;
        let unit = index(field(v, "unit")?, n, find)?;
        let duals = match v.get("duals") {
            None | Some(Value::Null) => None,
            Some(d) => Some(array(d)?.iter().map(|x| index(x, n, find)).collect::<R<Vec<_>>>()?),
        };
        Ok(SmPoset::new(labels.clone(), le, table("tensor")?, unit, table("ihom")?, duals)?)
    }
}
