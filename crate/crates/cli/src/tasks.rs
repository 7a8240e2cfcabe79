//! Task execution. Every task produces a JSON object; property tasks also
//! say whether the property held and, if not, where it broke.

use std::sync::Arc;

use deskcat::coeff::{rat_string, CoeffSystem, QMat, Quantale};
use deskcat::enhance::{
    build_enh, build_enh_module, change_source, check_ambidexterity, check_collapse, check_strict_unital_ff,
    check_target_insensitivity, LaxFunctor,
};
use deskcat::enriched::{
    bk_reconstruct, change_enrichment, duality_bijection, hom_presheaf, is_presheaf, is_weighted_colimit,
    is_weighted_limit, presheaves_bounded, self_enrichment, totally_compact_check, weighted_colimit, weighted_limit,
    yoneda, EnrichedCat, LaxMap, QuantaleModule,
};
use deskcat::frobenius::{cl_weil, lt_naive, sfunct, tr_frob, WeilSheaf};
use deskcat::groupoid::{iso_comma_square, twisted_fixed_points, FinGroupoid, GroupoidMap};
use deskcat::kernelcalc::{
    compare_traces, convolution, convolve, dual_kernel, kernel_right_adjoint, left_unitor, right_unitor,
    trace_lt_ag, trace_via_duality, Assoc, Kernel, RightAdjoint, TraceSpace, Unit,
};
use deskcat::sheafcalc::{base_change_check, isomorphic, norm_is_iso, omega_map, projection_formula_check, Bundle, CheckReport};
use deskcat::Error;
use serde_json::{json, Map, Value};

use crate::scenario::{coeff_system, Scenario, Task};

#[derive(Debug)]
pub enum TaskError {
    /// Bad arguments or data: exit code 1.
    Input(String),
    /// A law, precondition or adjoint failure raised by the library: exit code 2.
    Law(String),
}

impl From<Error> for TaskError {
    fn from(e: Error) -> Self {
        match e {
            Error::Law(_) | Error::Precondition(_) | Error::MissingAdjoint(_) => TaskError::Law(e.to_string()),
            _ => TaskError::Input(e.to_string()),
        }
    }
}

impl TaskError {
    pub fn message(&self) -> &str {
        match self {
            TaskError::Input(m) | TaskError::Law(m) => m,
        }
    }
}

type R<T> = Result<T, TaskError>;

/// The outcome of a property check.
#[derive(Clone, Debug)]
pub struct Check {
    pub holds: bool,
    pub witness: Option<String>,
    pub detail: Map<String, Value>,
}

impl Check {
    fn pass(detail: Map<String, Value>) -> Self {
        Check { holds: true, witness: None, detail }
    }

    fn fail(witness: String, detail: Map<String, Value>) -> Self {
        Check { holds: false, witness: Some(witness), detail }
    }

    fn from_report(r: CheckReport) -> Self {
        let mut d = Map::new();
        d.insert("detail".into(), json!(r.detail));
        match r.failing_stalk {
            None if r.pass => Check::pass(d),
            stalk => Check::fail(format!("at {}: {}", stalk.unwrap_or_default(), r.detail), d),
        }
    }

    fn into_value(self) -> Map<String, Value> {
        let mut m = self.detail;
        m.insert("holds".into(), json!(self.holds));
        if let Some(w) = self.witness {
            m.insert("witness".into(), json!(w));
        }
        m
    }
}

pub fn mat_json(m: &QMat) -> Value {
    Value::Array(m.to_rows().iter().map(|r| Value::Array(r.iter().map(|x| json!(rat_string(x))).collect())).collect())
}

pub fn dims_json(k: &Kernel) -> Value {
    json!(k.dims())
}

fn trace_json(t: &TraceSpace) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("dim".into(), json!(t.dim));
    m.insert("value".into(), json!(rat_string(&t.value())));
    m.insert("labels".into(), json!(t.labels));
    m
}

fn labels_of(q: &Quantale, xs: &[u16]) -> Value {
    json!(xs.iter().map(|&x| q.label(x)).collect::<Vec<_>>())
}

fn table_of(q: &Quantale, rows: &[Vec<u16>]) -> Value {
    Value::Array(rows.iter().map(|r| labels_of(q, r)).collect())
}

// ---------------------------------------------------------------------------
// Property checks, shared with the self-test.

fn conv(k: &Kernel, l: &Kernel, mutated: bool) -> deskcat::Result<Kernel> {
    if mutated {
        convolve(&dual_kernel(k)?, l)
    } else {
        convolve(k, l)
    }
}

fn first_dim_difference(a: &Kernel, b: &Kernel) -> Option<String> {
    let (da, db) = (a.dims(), b.dims());
    if da.len() != db.len() || da.first().map(Vec::len) != db.first().map(Vec::len) {
        return Some(format!("shapes differ: {}×{} vs {}×{}", da.len(), da.first().map_or(0, Vec::len), db.len(), db.first().map_or(0, Vec::len)));
    }
    for (i, (ra, rb)) in da.iter().zip(&db).enumerate() {
        for (j, (x, y)) in ra.iter().zip(rb).enumerate() {
            if x != y {
                return Some(format!("stalk ({},{}) has dimension {x} vs {y}", a.left().label(i), a.right().label(j)));
            }
        }
    }
    None
}

pub fn associativity(k: &Kernel, l: &Kernel, m: &Kernel, mutated: bool) -> deskcat::Result<Check> {
    let left = conv(&conv(k, l, mutated)?, m, mutated)?;
    let right = conv(k, &conv(l, m, mutated)?, mutated)?;
    let mut d = Map::new();
    d.insert("left".into(), dims_json(&left));
    d.insert("right".into(), dims_json(&right));
    if let Some(w) = first_dim_difference(&left, &right) {
        return Ok(Check::fail(format!("(K⋆L)⋆M vs K⋆(L⋆M): {w}"), d));
    }
    if !isomorphic(left.payload(), right.payload()) {
        return Ok(Check::fail("the two bracketings are not isomorphic".into(), d));
    }
    if !mutated && !Assoc::new(k, l, m)?.map.is_iso() {
        return Ok(Check::fail("the associator is not invertible".into(), d));
    }
    Ok(Check::pass(d))
}

pub fn unit_laws(k: &Kernel) -> deskcat::Result<Check> {
    let ul = Unit::new(k.left())?;
    let ur = Unit::new(k.right())?;
    let uk = convolution(&ul.kernel, k)?;
    let ku = convolution(k, &ur.kernel)?;
    let mut d = Map::new();
    d.insert("dims".into(), dims_json(k));
    for (name, c) in [("U⋆K", &uk.result), ("K⋆U", &ku.result)] {
        if let Some(w) = first_dim_difference(c, k) {
            return Ok(Check::fail(format!("{name} vs K: {w}"), d));
        }
    }
    if !left_unitor(&ul, &uk).is_iso() {
        return Ok(Check::fail("the left unitor is not invertible".into(), d));
    }
    if !right_unitor(&ur, &ku).is_iso() {
        return Ok(Check::fail("the right unitor is not invertible".into(), d));
    }
    Ok(Check::pass(d))
}

pub fn trace_comparison(k: &Kernel) -> deskcat::Result<Check> {
    let c = compare_traces(k)?;
    let mut d = Map::new();
    d.insert("duality_dim".into(), json!(c.duality.dim));
    d.insert("lt_dim".into(), json!(c.lt.dim));
    d.insert("invertible".into(), json!(c.invertible));
    if c.duality.dim != c.lt.dim {
        return Ok(Check::fail(format!("dimensions {} vs {}", c.duality.dim, c.lt.dim), d));
    }
    if !c.invertible {
        return Ok(Check::fail("the comparison matrix is singular".into(), d));
    }
    Ok(Check::pass(d))
}

pub fn sheaf_function(w: &WeilSheaf) -> deskcat::Result<Check> {
    let tr = tr_frob(w.base(), &w.f)?;
    let lt = lt_naive(&tr, &cl_weil(w)?)?;
    let sf = sfunct(w)?;
    let mut d = Map::new();
    let rows = |f: &deskcat::sheafcalc::Fn0| Value::Object(f.rows().into_iter().map(|(k, v)| (k, json!(v))).collect());
    d.insert("sfunct".into(), rows(&sf));
    d.insert("lt".into(), rows(&lt));
    for ((label, a), (_, b)) in lt.rows().into_iter().zip(sf.rows()) {
        if a != b {
            return Ok(Check::fail(format!("at {label}: class gives {a}, trace function gives {b}"), d));
        }
    }
    Ok(Check::pass(d))
}

pub fn base_change(f: &GroupoidMap, g: &GroupoidMap, v: &Bundle) -> deskcat::Result<Check> {
    Ok(Check::from_report(base_change_check(&iso_comma_square(f, g)?, v)?))
}

pub fn projection_formula(f: &GroupoidMap, v: &Bundle, w: &Bundle) -> deskcat::Result<Check> {
    Ok(Check::from_report(projection_formula_check(f, v, w)?))
}

pub fn norm(f: &GroupoidMap, v: &Bundle) -> deskcat::Result<Check> {
    Ok(Check::from_report(norm_is_iso(f, v)?))
}

/// `Hom(Φ, Ψ) = ⋀ Φ(x) ⊸ Ψ(x)`; the mutation residuates the wrong way round.
fn hom_presheaf_with(c: &EnrichedCat, phi: &[u16], psi: &[u16], mutated: bool) -> u16 {
    if !mutated {
        return hom_presheaf(c, phi, psi);
    }
    let q = c.quantale();
    q.meet_all(c.objects().map(|x| q.residuate(psi[x], phi[x])))
}

pub fn yoneda_lemma(c: &EnrichedCat, bound: usize, mutated: bool) -> deskcat::Result<Check> {
    let p = presheaves_bounded(c, bound)?;
    let q = c.quantale();
    let mut d = Map::new();
    d.insert("presheaves".into(), json!(p.size()));
    for o in c.objects() {
        let y = yoneda(c, o);
        for phi in p.elements() {
            let got = hom_presheaf_with(c, &y, phi, mutated);
            if got != phi[o] {
                let shown: Vec<&str> = phi.iter().map(|&v| q.label(v)).collect();
                return Ok(Check::fail(
                    format!("Hom(Yon({}), [{}]) = {} but the value at {} is {}", c.labels()[o], shown.join(","), q.label(got), c.labels()[o], q.label(phi[o])),
                    d,
                ));
            }
        }
    }
    Ok(Check::pass(d))
}

/// Limit weighted by `wl` (covariant) and colimit weighted by `wc` (a presheaf).
pub fn weighted(c: &EnrichedCat, wl: &[u16], wc: &[u16], m: &QuantaleModule, phi: &[usize]) -> deskcat::Result<Check> {
    let lim = weighted_limit(c, wl, m, phi)?;
    let colim = weighted_colimit(c, wc, m, phi)?;
    let mut d = Map::new();
    d.insert("limit".into(), json!(m.label(lim)));
    d.insert("colimit".into(), json!(m.label(colim)));
    if !is_weighted_limit(c, wl, m, phi, lim) {
        return Ok(Check::fail(format!("{} is not the weighted limit", m.label(lim)), d));
    }
    if !is_weighted_colimit(c, wc, m, phi, colim) {
        return Ok(Check::fail(format!("{} is not the weighted colimit", m.label(colim)), d));
    }
    Ok(Check::pass(d))
}

pub fn enhancement(f: &LaxFunctor) -> deskcat::Result<Check> {
    let r = build_enh_module(f)?;
    let ff = check_strict_unital_ff(&r)?;
    let mut d = Map::new();
    d.insert("strictly_unital".into(), json!(ff.strictly_unital));
    d.insert("fully_faithful".into(), json!(ff.fully_faithful));
    d.insert("equivalence".into(), json!(r.is_equivalence()));
    let o = &f.source;
    if let Some(x) = o.objects().find(|&x| r.epsilon[r.ul_f[x]] != f.at(x)) {
        return Ok(Check::fail(format!("epsilon(ulF({})) differs from F({})", o.labels()[x], o.labels()[x]), d));
    }
    let checks = [
        ("ulF is not strong monoidal", r.ul_f_monoidal()),
        ("the Day unit laws fail", r.day_unit_laws()),
        ("iota is not left adjoint to epsilon", r.iota_left_of_epsilon()),
        ("strictly unital but iota is not fully faithful", !ff.strictly_unital || ff.fully_faithful),
        ("the enhancement depends on the target beyond the unit algebra", check_target_insensitivity(f)?),
    ];
    match checks.iter().find(|(_, ok)| !ok) {
        Some((what, _)) => Ok(Check::fail((*what).to_string(), d)),
        None => Ok(Check::pass(d)),
    }
}

// ---------------------------------------------------------------------------
// Argument access.

struct Args<'a> {
    s: &'a Scenario,
    task: &'a Task,
}

impl<'a> Args<'a> {
    fn get(&self, i: usize) -> R<&'a Value> {
        self.task.args.get(i).ok_or_else(|| TaskError::Input(format!("{} needs argument {}", self.task.op, i + 1)))
    }

    fn name(&self, i: usize) -> R<&'a str> {
        let v = self.get(i)?;
        v.as_str().ok_or_else(|| TaskError::Input(format!("{}: argument {} must be a name, got {v}", self.task.op, i + 1)))
    }

    fn lookup<T>(&self, map: &'a std::collections::BTreeMap<String, T>, kind: &str, i: usize) -> R<&'a T> {
        let n = self.name(i)?;
        map.get(n).ok_or_else(|| TaskError::Input(format!("undeclared {kind} '{n}'")))
    }

    fn kernel(&self, i: usize) -> R<&'a Kernel> {
        self.lookup(&self.s.kernels, "kernel", i)
    }

    fn groupoid(&self, i: usize) -> R<&'a Arc<FinGroupoid>> {
        self.lookup(&self.s.groupoids, "groupoid", i)
    }

    fn map(&self, i: usize) -> R<&'a GroupoidMap> {
        self.lookup(&self.s.maps, "map", i)
    }

    fn bundle(&self, i: usize) -> R<&'a Bundle> {
        self.lookup(&self.s.bundles, "bundle", i)
    }

    fn weil(&self, i: usize) -> R<&'a WeilSheaf> {
        self.lookup(&self.s.weil, "Weil sheaf", i)
    }

    fn category(&self, i: usize) -> R<&'a EnrichedCat> {
        self.lookup(&self.s.categories, "category", i)
    }

    fn functor(&self, i: usize) -> R<&'a LaxFunctor> {
        self.lookup(&self.s.functors, "functor", i)
    }

    fn quantale(&self, i: usize) -> R<Arc<Quantale>> {
        self.s.quantale(self.name(i)?).map_err(TaskError::Input)
    }

    fn object(&self, c: &EnrichedCat, i: usize) -> R<usize> {
        match self.get(i)? {
            Value::String(s) => c.find(s).ok_or_else(|| TaskError::Input(format!("no object '{s}'"))),
            v => v.as_u64().map(|x| x as usize).filter(|&x| x < c.size()).ok_or_else(|| TaskError::Input(format!("bad object {v}"))),
        }
    }

    fn element(q: &Quantale, v: &Value) -> R<u16> {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(TaskError::Input(format!("expected a quantale element, got {v}"))),
        };
        q.parse(&s).ok_or_else(|| TaskError::Input(format!("'{s}' is not an element of the quantale")))
    }

    /// A function on the objects of `c`: a list of values, or an object
    /// label standing for its representable.
    fn presheaf(&self, c: &EnrichedCat, i: usize) -> R<Vec<u16>> {
        match self.get(i)? {
            Value::String(_) => Ok(yoneda(c, self.object(c, i)?)),
            Value::Array(xs) if xs.len() == c.size() => xs.iter().map(|x| Self::element(c.quantale(), x)).collect(),
            v => Err(TaskError::Input(format!("expected {} values or an object, got {v}", c.size()))),
        }
    }

    fn module(&self, c: &EnrichedCat, i: usize) -> R<QuantaleModule> {
        let spec = self.name(i)?;
        let q = c.quantale();
        let m = match spec {
            "regular" => QuantaleModule::regular(q),
            "presheaves" => presheaves_bounded(c, self.s.limits.presheaves)?.module().clone(),
            _ => match spec.strip_prefix("power:").and_then(|k| k.parse::<u32>().ok()) {
                Some(k) => QuantaleModule::power(q, k as usize),
                None => return Err(TaskError::Input(format!("unknown module '{spec}' (regular, power:K, presheaves)"))),
            },
        };
        if m.size() > self.s.limits.presheaves {
            return Err(TaskError::Input(format!("module has {} elements, above the limit {}", m.size(), self.s.limits.presheaves)));
        }
        Ok(m)
    }

    fn module_elements(&self, m: &QuantaleModule, n: usize, i: usize) -> R<Vec<usize>> {
        let xs = self.get(i)?.as_array().filter(|a| a.len() == n).ok_or_else(|| TaskError::Input(format!("expected {n} module elements")))?;
        xs.iter()
            .map(|x| match x {
                Value::String(s) => m.elements().find(|&e| m.label(e) == s).ok_or_else(|| TaskError::Input(format!("'{s}' is not a module element"))),
                _ => x.as_u64().map(|v| v as usize).filter(|&v| v < m.size()).ok_or_else(|| TaskError::Input(format!("bad module element {x}"))),
            })
            .collect()
    }

    fn indices(&self, i: usize) -> R<Vec<usize>> {
        let v = self.get(i)?;
        v.as_array()
            .and_then(|a| a.iter().map(|x| x.as_u64().map(|u| u as usize)).collect())
            .ok_or_else(|| TaskError::Input(format!("expected a list of indices, got {v}")))
    }
}

fn obj(m: Map<String, Value>) -> Value {
    Value::Object(m)
}

/// Declared kinds of the leading name arguments of each op; `None` marks an
/// inline value.
const SIGNATURES: &[(&str, &[Option<&str>])] = &[
    ("trace", &[Some("kernel")]),
    ("trace_via_duality", &[Some("kernel")]),
    ("compare_traces", &[Some("kernel")]),
    ("convolve", &[Some("kernel"), Some("kernel")]),
    ("associativity", &[Some("kernel"), Some("kernel"), Some("kernel")]),
    ("unit_laws", &[Some("kernel")]),
    ("right_adjoint", &[Some("kernel")]),
    ("tr_frob", &[Some("groupoid"), Some("map")]),
    ("twisted_fixed_points", &[Some("groupoid"), Some("map")]),
    ("sfunct", &[Some("weil")]),
    ("sheaf_function", &[Some("weil")]),
    ("omega", &[Some("groupoid")]),
    ("pi0", &[Some("groupoid")]),
    ("base_change", &[Some("map"), Some("map"), Some("bundle")]),
    ("projection_formula", &[Some("map"), Some("bundle"), Some("bundle")]),
    ("norm", &[Some("map"), Some("bundle")]),
    ("yoneda", &[Some("category"), None]),
    ("hom_presheaf", &[Some("category"), None, None]),
    ("presheaves", &[Some("category")]),
    ("underlying", &[Some("category")]),
    ("self_enrichment", &[Some("quantale")]),
    ("change_enrichment", &[Some("category"), Some("quantale"), None]),
    ("weighted_limit", &[Some("category"), None, None, None]),
    ("weighted_colimit", &[Some("category"), None, None, None]),
    ("bk_reconstruct", &[Some("category"), None]),
    ("totally_compact", &[Some("category"), None, None]),
    ("yoneda_lemma", &[Some("category")]),
    ("duality", &[Some("category")]),
    ("enh", &[Some("functor")]),
    ("enh_module", &[Some("functor")]),
    ("strict_unital_ff", &[Some("functor")]),
    ("ambidexterity", &[Some("functor")]),
    ("collapse", &[Some("functor")]),
    ("target_insensitivity", &[Some("functor")]),
    ("change_source", &[Some("functor"), Some("functor"), None]),
];

/// Every op is known and every name argument is declared.
pub fn validate(s: &Scenario) -> Result<(), String> {
    for (i, t) in s.tasks.iter().enumerate() {
        let Some((_, sig)) = SIGNATURES.iter().find(|(op, _)| *op == t.op) else {
            let known: Vec<&str> = SIGNATURES.iter().map(|(op, _)| *op).collect();
            return Err(format!("task {i}: unknown op '{}' (known: {})", t.op, known.join(", ")));
        };
        if t.args.len() < sig.len() {
            return Err(format!("task {i} ({}): expected {} arguments, got {}", t.op, sig.len(), t.args.len()));
        }
        for (kind, arg) in sig.iter().zip(&t.args) {
            let Some(kind) = kind else { continue };
            let Some(name) = arg.as_str() else {
                return Err(format!("task {i} ({}): expected a {kind} name, got {arg}", t.op));
            };
            let known = match *kind {
                "kernel" => s.kernels.contains_key(name),
                "groupoid" => s.groupoids.contains_key(name),
                "map" => s.maps.contains_key(name),
                "bundle" => s.bundles.contains_key(name),
                "weil" => s.weil.contains_key(name),
                "category" => s.categories.contains_key(name),
                "functor" => s.functors.contains_key(name),
                _ => s.quantale(name).is_ok(),
            };
            if !known {
                return Err(format!("task {i} ({}) refers to undeclared {kind} '{name}'", t.op));
            }
        }
    }
    Ok(())
}

pub fn execute(s: &Scenario, task: &Task) -> R<Value> {
    let a = Args { s, task };
    let mutated = |name: &str| s.mutations.iter().any(|m| m == name);
    let check = |c: deskcat::Result<Check>| -> R<Value> { Ok(obj(c?.into_value())) };
    match task.op.as_str() {
        "trace" => Ok(obj(trace_json(&trace_lt_ag(a.kernel(0)?)?))),
        "trace_via_duality" => Ok(obj(trace_json(&trace_via_duality(a.kernel(0)?)?))),
        "compare_traces" => check(trace_comparison(a.kernel(0)?)),
        "convolve" => Ok(json!({ "dims": dims_json(&conv(a.kernel(0)?, a.kernel(1)?, mutated("convolution-order"))?) })),
        "associativity" => check(associativity(a.kernel(0)?, a.kernel(1)?, a.kernel(2)?, mutated("convolution-order"))),
        "unit_laws" => check(unit_laws(a.kernel(0)?)),
        "right_adjoint" => Ok(match kernel_right_adjoint(a.kernel(0)?)? {
            RightAdjoint::Found(adj) => json!({ "found": true, "dims": dims_json(&adj.adjoint) }),
            RightAdjoint::Absent { reason, .. } => json!({ "found": false, "reason": reason }),
        }),
        "tr_frob" => {
            let t = tr_frob(a.groupoid(0)?, a.map(1)?)?;
            Ok(json!({ "dim": t.dim(), "labels": t.labels() }))
        }
        "twisted_fixed_points" => {
            let t = twisted_fixed_points(a.groupoid(0)?, a.map(1)?)?;
            let orbits = t.groupoid.pi0_with_aut();
            Ok(json!({
                "objects": t.pairs.len(),
                "components": orbits.len(),
                "labels": orbits.iter().map(|o| t.groupoid.label(o.rep)).collect::<Vec<_>>(),
            }))
        }
        "sfunct" => {
            let f = sfunct(a.weil(0)?)?;
            Ok(json!({ "values": Value::Object(f.rows().into_iter().map(|(k, v)| (k, json!(v))).collect()) }))
        }
        "sheaf_function" => check(sheaf_function(a.weil(0)?)),
        "omega" => {
            let y = a.groupoid(0)?;
            let sys = match task.args.get(1) {
                Some(v) => {
                    let n = v.as_str().ok_or_else(|| TaskError::Input("coefficients must be a name".into()))?;
                    coeff_system(n).ok_or_else(|| TaskError::Input(format!("unknown coefficients '{n}'")))?
                }
                None => s.coefficients.clone().unwrap_or(CoeffSystem::Rational),
            };
            let (m, tame) = omega_map(y, &sys);
            Ok(json!({ "coefficients": sys.name(), "matrix": m.render_rows(), "tame": tame }))
        }
        "pi0" => {
            let y = a.groupoid(0)?;
            let orbits: Vec<Value> = y
                .pi0_with_aut()
                .iter()
                .map(|o| json!({ "rep": y.label(o.rep), "members": o.members.iter().map(|&x| y.label(x)).collect::<Vec<_>>(), "aut": o.aut_order }))
                .collect();
            Ok(json!({ "components": orbits }))
        }
        "base_change" => check(base_change(a.map(0)?, a.map(1)?, a.bundle(2)?)),
        "projection_formula" => check(projection_formula(a.map(0)?, a.bundle(1)?, a.bundle(2)?)),
        "norm" => check(norm(a.map(0)?, a.bundle(1)?)),
        "yoneda" => {
            let c = a.category(0)?;
            Ok(json!({ "presheaf": labels_of(c.quantale(), &yoneda(c, a.object(c, 1)?)) }))
        }
        "hom_presheaf" => {
            let c = a.category(0)?;
            let (p1, p2) = (a.presheaf(c, 1)?, a.presheaf(c, 2)?);
            for p in [&p1, &p2] {
                if !is_presheaf(c, p) {
                    return Err(TaskError::Input(format!("{:?} is not a presheaf", p)));
                }
            }
            Ok(json!({ "value": c.quantale().label(hom_presheaf(c, &p1, &p2)) }))
        }
        "presheaves" => {
            let c = a.category(0)?;
            let p = presheaves_bounded(c, s.limits.presheaves)?;
            let mut m = Map::new();
            m.insert("size".into(), json!(p.size()));
            m.insert("enumerated".into(), json!(p.was_enumerated()));
            if p.size() <= 64 {
                m.insert("elements".into(), Value::Array(p.elements().iter().map(|e| labels_of(c.quantale(), e)).collect()));
            }
            Ok(obj(m))
        }
        "underlying" => Ok(json!({ "preorder": a.category(0)?.underlying_preorder() })),
        "self_enrichment" => {
            let q = a.quantale(0)?;
            Ok(json!({ "hom": table_of(&q, &self_enrichment(&q).hom_table()) }))
        }
        "change_enrichment" => {
            let c = a.category(0)?;
            let tgt = a.quantale(1)?;
            let table = a.get(2)?.as_array().ok_or_else(|| TaskError::Input("the map is a list of target elements".into()))?;
            let table = table.iter().map(|x| Args::element(&tgt, x)).collect::<R<Vec<_>>>()?;
            let f = LaxMap::new(c.quantale().clone(), tgt.clone(), table)?;
            Ok(json!({ "hom": table_of(&tgt, &change_enrichment(&f, c)?.hom_table()) }))
        }
        "weighted_limit" | "weighted_colimit" => {
            let c = a.category(0)?;
            let limit = task.op == "weighted_limit";
            let wc = if limit { c.opposite() } else { c.clone() };
            let w = a.presheaf(&wc, 1)?;
            let m = a.module(c, 2)?;
            let phi = a.module_elements(&m, c.size(), 3)?;
            let (l, universal) = if limit {
                let l = weighted_limit(c, &w, &m, &phi)?;
                (l, is_weighted_limit(c, &w, &m, &phi, l))
            } else {
                let l = weighted_colimit(c, &w, &m, &phi)?;
                (l, is_weighted_colimit(c, &w, &m, &phi, l))
            };
            Ok(json!({ "value": m.label(l), "holds": universal }))
        }
        "bk_reconstruct" => {
            let c = a.category(0)?;
            Ok(json!({ "holds": bk_reconstruct(c, &a.presheaf(c, 1)?)? }))
        }
        "totally_compact" => {
            let c = a.category(0)?;
            let m = a.module(c, 1)?;
            let e = a.module_elements(&m, 1, 2)?[0];
            Ok(json!({ "totally_compact": totally_compact_check(e, &m) }))
        }
        "yoneda_lemma" => check(yoneda_lemma(a.category(0)?, s.limits.presheaves, mutated("residuation"))),
        "duality" => Ok(json!({ "holds": duality_bijection(a.category(0)?)? })),
        "enh" => {
            let f = a.functor(0)?;
            let e = build_enh(f)?;
            Ok(json!({ "objects": e.labels(), "hom": table_of(&f.target, &e.hom_table()) }))
        }
        "enh_module" => {
            let f = a.functor(0)?;
            let r = build_enh_module(f)?;
            let mut m = check(enhancement(f))?.as_object().cloned().unwrap_or_default();
            m.insert("presheaves".into(), json!(r.presheaves.size()));
            m.insert("ul_f".into(), json!(r.ul_f.iter().map(|&i| r.presheaves.module().label(i)).collect::<Vec<_>>()));
            m.insert("day_unit".into(), json!(r.presheaves.module().label(r.day_unit())));
            Ok(obj(m))
        }
        "strict_unital_ff" => {
            let r = check_strict_unital_ff(&build_enh_module(a.functor(0)?)?)?;
            let mut m = Map::new();
            m.insert("strictly_unital".into(), json!(r.strictly_unital));
            m.insert("fully_faithful".into(), json!(r.fully_faithful));
            m.insert("holds".into(), json!(!r.strictly_unital || r.fully_faithful));
            if let Some((x, y, got, want)) = r.distortion {
                m.insert("distortion".into(), json!({ "from": x, "to": y, "enh": got, "source": want }));
            }
            Ok(obj(m))
        }
        "ambidexterity" => Ok(json!({ "holds": check_ambidexterity(&build_enh_module(a.functor(0)?)?)? })),
        "collapse" => Ok(json!({ "holds": check_collapse(&build_enh_module(a.functor(0)?)?)? })),
        "target_insensitivity" => Ok(json!({ "holds": check_target_insensitivity(a.functor(0)?)? })),
        "change_source" => {
            let (r1, r2) = (build_enh_module(a.functor(0)?)?, build_enh_module(a.functor(1)?)?);
            let c = change_source(&r1, &r2, &a.indices(2)?)?;
            let m2 = r2.presheaves.module();
            Ok(json!({
                "map": c.map.table.iter().map(|&i| m2.label(i)).collect::<Vec<_>>(),
                "equality": c.equality,
                "hom_preserving": c.hom_preserving,
                "fully_faithful": c.ff_claimed,
            }))
        }
        other => Err(TaskError::Input(format!("unknown op '{other}'"))),
    }
}
