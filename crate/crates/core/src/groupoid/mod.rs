//! Finite action groupoids `X//G` and their morphisms.

mod group;

use std::collections::VecDeque;
use std::sync::Arc;

pub use group::FinGroup;

use crate::{Error, Result};

/// A finite set with an action of a finite group.
#[derive(Debug)]
pub struct FinGroupoid {
    group: Arc<FinGroup>,
    size: usize,
    repr: ActionRepr,
}

#[derive(Debug)]
enum ActionRepr {
    Table { labels: Vec<String>, act: Vec<u32> },
    Product { factors: Vec<Arc<FinGroupoid>>, strides: Vec<usize> },
}

/// One connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub rep: usize,
    pub members: Vec<usize>,
    pub aut_order: usize,
}

impl FinGroupoid {
    /// `action[g][x] = g·x`. The action laws are checked exhaustively.
    pub fn new(labels: Vec<String>, group: Arc<FinGroup>, action: Vec<Vec<usize>>) -> Result<Arc<Self>> {
        let n = labels.len();
        let bad = |d: String| Err(Error::invalid("groupoid", d));
        if action.len() != group.order() || action.iter().any(|r| r.len() != n || r.iter().any(|&y| y >= n)) {
            return bad(format!("action table must be {}x{n}", group.order()));
        }
        for x in 0..n {
            if action[group.identity()][x] != x {
                return bad(format!("identity moves {}", labels[x]));
            }
        }
        for g in group.elements() {
            for h in group.elements() {
                for x in 0..n {
                    if action[group.mul(g, h)][x] != action[g][action[h][x]] {
                        return bad(format!(
                            "(gh)x != g(hx) at g={}, h={}, x={}",
                            group.label(g),
                            group.label(h),
                            labels[x]
                        ));
                    }
                }
            }
        }
        let act = action.iter().flatten().map(|&y| y as u32).collect();
        Ok(Arc::new(FinGroupoid { group, size: n, repr: ActionRepr::Table { labels, act } }))
    }

    pub(crate) fn from_fn(labels: Vec<String>, group: Arc<FinGroup>, f: impl Fn(usize, usize) -> usize) -> Arc<Self> {
        let n = labels.len();
        let act = (0..group.order() * n).map(|k| f(k / n, k % n) as u32).collect();
        Arc::new(FinGroupoid { group, size: n, repr: ActionRepr::Table { labels, act } })
    }

    /// A finite set: trivial group.
    pub fn discrete(labels: Vec<String>) -> Arc<Self> {
        Self::from_fn(labels, FinGroup::trivial(), |_, x| x)
    }

    pub fn discrete_n(n: usize) -> Arc<Self> {
        Self::discrete((1..=n).map(|i| i.to_string()).collect())
    }

    pub fn point() -> Arc<Self> {
        Self::discrete(vec!["*".into()])
    }

    /// `pt//G`.
    pub fn classifying(group: Arc<FinGroup>) -> Arc<Self> {
        Self::from_fn(vec!["*".into()], group, |_, _| 0)
    }

    pub fn product(a: &Arc<FinGroupoid>, b: &Arc<FinGroupoid>) -> Arc<Self> {
        Self::product_many(vec![a.clone(), b.clone()])
    }

    /// Carrier indices are mixed radix with the first factor most significant.
    pub fn product_many(factors: Vec<Arc<FinGroupoid>>) -> Arc<Self> {
        let group = FinGroup::product(factors.iter().map(|f| f.group.clone()).collect());
        let mut strides = vec![1usize; factors.len()];
        for i in (0..factors.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * factors[i + 1].size;
        }
        let size = factors.iter().map(|f| f.size).product();
        Arc::new(FinGroupoid { group, size, repr: ActionRepr::Product { factors, strides } })
    }

    /// `{1..n}//S_n` with the natural action, elements ordered as in
    /// [`FinGroup::symmetric`].
    pub fn symmetric_action(n: usize) -> Arc<Self> {
        let g = FinGroup::symmetric(n);
        let perms = group::permutations(n);
        Self::from_fn((1..=n).map(|i| i.to_string()).collect(), g, move |a, x| perms[a][x])
    }

    pub fn group(&self) -> &Arc<FinGroup> {
        &self.group
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn points(&self) -> std::ops::Range<usize> {
        0..self.size
    }

    pub fn factors(&self) -> Option<&[Arc<FinGroupoid>]> {
        match &self.repr {
            ActionRepr::Product { factors, .. } => Some(factors),
            ActionRepr::Table { .. } => None,
        }
    }

    pub fn split(&self, x: usize) -> Vec<usize> {
        match &self.repr {
            ActionRepr::Product { factors, strides } => {
                factors.iter().zip(strides).map(|(f, s)| (x / s) % f.size).collect()
            }
            ActionRepr::Table { .. } => vec![x],
        }
    }

    pub fn join(&self, parts: &[usize]) -> usize {
        match &self.repr {
            ActionRepr::Product { strides, .. } => parts.iter().zip(strides).map(|(p, s)| p * s).sum(),
            ActionRepr::Table { .. } => parts[0],
        }
    }

    #[inline]
    pub fn act(&self, g: usize, x: usize) -> usize {
        match &self.repr {
            ActionRepr::Table { act, .. } => act[g * self.size + x] as usize,
            ActionRepr::Product { factors, strides } => {
                let gs = &self.group;
                let parts = gs.split(g);
                factors
                    .iter()
                    .zip(strides)
                    .zip(parts)
                    .map(|((f, s), gi)| f.act(gi, (x / s) % f.size) * s)
                    .sum()
            }
        }
    }

    pub fn label(&self, x: usize) -> String {
        match &self.repr {
            ActionRepr::Table { labels, .. } => labels[x].clone(),
            ActionRepr::Product { factors, strides } => {
                let parts: Vec<String> = factors.iter().zip(strides).map(|(f, s)| f.label((x / s) % f.size)).collect();
                format!("({})", parts.join(","))
            }
        }
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.points().find(|&x| self.label(x) == label)
    }

    pub fn stabilizer(&self, x: usize) -> Vec<usize> {
        self.group.elements().filter(|&g| self.act(g, x) == x).collect()
    }

    /// Some `g` with `g·x = y`.
    pub fn transporter(&self, x: usize, y: usize) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, x) == y)
    }

    pub fn same_as(&self, other: &FinGroupoid) -> bool {
        if std::ptr::eq(self, other) {
            return true;
        }
        if self.size != other.size || !self.group.same_as(&other.group) {
            return false;
        }
        match (&self.repr, &other.repr) {
            (ActionRepr::Table { labels: l1, act: a1 }, ActionRepr::Table { labels: l2, act: a2 }) => {
                l1 == l2 && a1 == a2
            }
            (ActionRepr::Product { factors: f1, .. }, ActionRepr::Product { factors: f2, .. }) => {
                f1.len() == f2.len() && f1.iter().zip(f2).all(|(a, b)| a.same_as(b))
            }
            _ => false,
        }
    }

    /// Orbit of `x` with a transporter for each member.
    pub fn orbit_with_transporters(&self, x: usize) -> Vec<(usize, usize)> {
        let g = &self.group;
        let mut seen = vec![usize::MAX; self.size];
        seen[x] = g.identity();
        let mut out = vec![(x, g.identity())];
        let mut queue = VecDeque::from([x]);
        while let Some(y) = queue.pop_front() {
            for &s in g.gens() {
                let z = self.act(s, y);
                if seen[z] == usize::MAX {
                    let t = g.mul(s, seen[y]);
                    seen[z] = t;
                    out.push((z, t));
                    queue.push_back(z);
                }
            }
        }
        out
    }

    /// Components with representatives (least member) and automorphism orders.
    pub fn pi0_with_aut(&self) -> Vec<Orbit> {
        let mut seen = vec![false; self.size];
        let mut out = Vec::new();
        for x in self.points() {
            if seen[x] {
                continue;
            }
            let mut members: Vec<usize> = self.orbit_with_transporters(x).into_iter().map(|(y, _)| y).collect();
            members.sort_unstable();
            for &m in &members {
                seen[m] = true;
            }
            let aut_order = self.group.order() / members.len();
            out.push(Orbit { rep: x, members, aut_order });
        }
        out
    }

    /// Component index of every point.
    pub fn component_index(&self) -> Vec<usize> {
        let mut idx = vec![0; self.size];
        for (i, o) in self.pi0_with_aut().iter().enumerate() {
            for &m in &o.members {
                idx[m] = i;
            }
        }
        idx
    }
}

/// An equivariant map `X//G → Y//H`: a homomorphism `θ` and a map `u` with
/// `u(g·x) = θ(g)·u(x)`.
#[derive(Debug, Clone)]
pub struct GroupoidMap {
    dom: Arc<FinGroupoid>,
    cod: Arc<FinGroupoid>,
    theta: Arc<Vec<u32>>,
    u: Arc<Vec<u32>>,
}

impl GroupoidMap {
    pub fn new(dom: Arc<FinGroupoid>, cod: Arc<FinGroupoid>, theta: Vec<usize>, u: Vec<usize>) -> Result<Self> {
        let (gd, gc) = (dom.group(), cod.group());
        let bad = |d: String| Err(Error::invalid("groupoid map", d));
        if theta.len() != gd.order() || theta.iter().any(|&t| t >= gc.order()) {
            return bad("group map must be defined on every element".into());
        }
        if u.len() != dom.size() || u.iter().any(|&y| y >= cod.size()) {
            return bad("object map must be defined on every point".into());
        }
        for a in gd.elements() {
            for b in gd.elements() {
                if theta[gd.mul(a, b)] != gc.mul(theta[a], theta[b]) {
                    return bad(format!("not a homomorphism at ({}, {})", gd.label(a), gd.label(b)));
                }
            }
        }
        for g in gd.elements() {
            for x in dom.points() {
                if u[dom.act(g, x)] != cod.act(theta[g], u[x]) {
                    return bad(format!("not equivariant at g={}, x={}", gd.label(g), dom.label(x)));
                }
            }
        }
        Ok(Self::unchecked(dom, cod, theta, u))
    }

    pub(crate) fn unchecked(dom: Arc<FinGroupoid>, cod: Arc<FinGroupoid>, theta: Vec<usize>, u: Vec<usize>) -> Self {
        GroupoidMap {
            dom,
            cod,
            theta: Arc::new(theta.into_iter().map(|t| t as u32).collect()),
            u: Arc::new(u.into_iter().map(|y| y as u32).collect()),
        }
    }

    pub(crate) fn from_fns(
        dom: &Arc<FinGroupoid>,
        cod: &Arc<FinGroupoid>,
        theta: impl Fn(usize) -> usize,
        u: impl Fn(usize) -> usize,
    ) -> Self {
        let t = dom.group().elements().map(theta).collect();
        let o = dom.points().map(u).collect();
        Self::unchecked(dom.clone(), cod.clone(), t, o)
    }

    pub fn identity(y: &Arc<FinGroupoid>) -> Self {
        Self::from_fns(y, y, |g| g, |x| x)
    }

    pub fn to_point(y: &Arc<FinGroupoid>) -> Self {
        Self::from_fns(y, &FinGroupoid::point(), |_| 0, |_| 0)
    }

    /// `Y → Y × Y`.
    pub fn diagonal(y: &Arc<FinGroupoid>) -> Self {
        let yy = FinGroupoid::product(y, y);
        Self::from_fns(y, &yy, |g| yy.group().join(&[g, g]), |x| yy.join(&[x, x]))
    }

    /// `(f, g): A → B × C`.
    pub fn pair(f: &GroupoidMap, g: &GroupoidMap) -> Result<Self> {
        if !f.dom.same_as(&g.dom) {
            return Err(Error::BaseMismatch("pair of maps with different domains".into()));
        }
        let bc = FinGroupoid::product(&f.cod, &g.cod);
        Ok(Self::from_fns(
            &f.dom,
            &bc,
            |h| bc.group().join(&[f.theta(h), g.theta(h)]),
            |x| bc.join(&[f.on_object(x), g.on_object(x)]),
        ))
    }

    /// The graph `(id, F): Y → Y × Y` of an endomorphism.
    pub fn graph(f: &GroupoidMap) -> Result<Self> {
        Self::pair(&Self::identity(&f.dom), f)
    }

    /// Projection of a product groupoid onto the factors listed in `sel`.
    pub fn projection(p: &Arc<FinGroupoid>, sel: &[usize]) -> Result<Self> {
        let factors = p.factors().ok_or_else(|| Error::invalid("projection", "domain is not a product"))?;
        if sel.iter().any(|&i| i >= factors.len()) {
            return Err(Error::invalid("projection", "factor index out of range"));
        }
        let target = FinGroupoid::product_many(sel.iter().map(|&i| factors[i].clone()).collect());
        let pg = p.group();
        Ok(Self::from_fns(
            p,
            &target,
            |g| {
                let parts = pg.split(g);
                target.group().join(&sel.iter().map(|&i| parts[i]).collect::<Vec<_>>())
            },
            |x| {
                let parts = p.split(x);
                target.join(&sel.iter().map(|&i| parts[i]).collect::<Vec<_>>())
            },
        ))
    }

    /// `f × g: A × B → C × D`.
    pub fn product(f: &GroupoidMap, g: &GroupoidMap) -> Self {
        let ab = FinGroupoid::product(&f.dom, &g.dom);
        let cd = FinGroupoid::product(&f.cod, &g.cod);
        Self::from_fns(
            &ab,
            &cd,
            |h| {
                let p = ab.group().split(h);
                cd.group().join(&[f.theta(p[0]), g.theta(p[1])])
            },
            |x| {
                let p = ab.split(x);
                cd.join(&[f.on_object(p[0]), g.on_object(p[1])])
            },
        )
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupoidMap) -> Result<Self> {
        if !self.cod.same_as(&other.dom) {
            return Err(Error::BaseMismatch("composable maps must share the middle groupoid".into()));
        }
        Ok(Self::from_fns(
            &self.dom,
            &other.cod,
            |g| other.theta(self.theta(g)),
            |x| other.on_object(self.on_object(x)),
        ))
    }

    pub fn dom(&self) -> &Arc<FinGroupoid> {
        &self.dom
    }

    pub fn cod(&self) -> &Arc<FinGroupoid> {
        &self.cod
    }

    #[inline]
    pub fn theta(&self, g: usize) -> usize {
        self.theta[g] as usize
    }

    #[inline]
    pub fn on_object(&self, x: usize) -> usize {
        self.u[x] as usize
    }

    /// Same map, with domain and codomain replaced by structurally equal groupoids.
    pub fn rebased(&self, dom: &Arc<FinGroupoid>, cod: &Arc<FinGroupoid>) -> Result<Self> {
        if !self.dom.same_as(dom) || !self.cod.same_as(cod) {
            return Err(Error::BaseMismatch("rebasing onto a different groupoid".into()));
        }
        Ok(GroupoidMap { dom: dom.clone(), cod: cod.clone(), theta: self.theta.clone(), u: self.u.clone() })
    }

    pub fn is_endo(&self) -> bool {
        self.dom.same_as(&self.cod)
    }

    /// Bijective on objects and an isomorphism on groups.
    pub fn is_invertible(&self) -> bool {
        let mut hit = vec![false; self.cod.size()];
        for x in self.dom.points() {
            hit[self.on_object(x)] = true;
        }
        let mut ghit = vec![false; self.cod.group().order()];
        for g in self.dom.group().elements() {
            ghit[self.theta(g)] = true;
        }
        self.dom.size() == self.cod.size()
            && hit.iter().all(|&h| h)
            && self.dom.group().order() == self.cod.group().order()
            && ghit.iter().all(|&h| h)
    }

    /// Faithful on automorphism groups: `θ` injective.
    pub fn is_faithful(&self) -> bool {
        let g = self.dom.group();
        g.elements().filter(|&a| self.theta(a) == self.cod.group().identity()).count() == 1
    }
}

/// An iso-comma square `P → A`, `P → B` over `f: A → C`, `g: B → C`.
/// Objects of `P` are triples `(a, b, h)` with `h·f(a) = g(b)`.
#[derive(Debug, Clone)]
pub struct CommaSquare {
    pub f: GroupoidMap,
    pub g: GroupoidMap,
    pub apex: Arc<FinGroupoid>,
    pub to_a: GroupoidMap,
    pub to_b: GroupoidMap,
    /// The `h` component of each object of the apex.
    pub twist: Vec<usize>,
}

pub fn iso_comma_square(f: &GroupoidMap, g: &GroupoidMap) -> Result<CommaSquare> {
    if !f.cod.same_as(&g.cod) {
        return Err(Error::BaseMismatch("iso-comma square needs a common codomain".into()));
    }
    let (a, b, c) = (f.dom.clone(), g.dom.clone(), f.cod.clone());
    let gc = c.group().clone();
    let mut triples = Vec::new();
    for x in a.points() {
        for y in b.points() {
            for h in gc.elements() {
                if c.act(h, f.on_object(x)) == g.on_object(y) {
                    triples.push((x, y, h));
                }
            }
        }
    }
    let group = FinGroup::product(vec![a.group().clone(), b.group().clone()]);
    let labels: Vec<String> = triples
        .iter()
        .map(|&(x, y, h)| format!("({},{},{})", a.label(x), b.label(y), gc.label(h)))
        .collect();
    let index = |t: (usize, usize, usize)| triples.binary_search(&t).expect("closed under the action");
    let action = |k: usize, i: usize| {
        let parts = group.split(k);
        let (g1, g2) = (parts[0], parts[1]);
        let (x, y, h) = triples[i];
        let nh = gc.mul(gc.mul(g.theta(g2), h), gc.inv(f.theta(g1)));
        index((a.act(g1, x), b.act(g2, y), nh))
    };
    let apex = FinGroupoid::from_fn(labels, group.clone(), action);
    let to_a = GroupoidMap::from_fns(&apex, &a, |k| group.split(k)[0], |i| triples[i].0);
    let to_b = GroupoidMap::from_fns(&apex, &b, |k| group.split(k)[1], |i| triples[i].1);
    let twist = triples.iter().map(|t| t.2).collect();
    Ok(CommaSquare { f: f.clone(), g: g.clone(), apex, to_a, to_b, twist })
}

/// The groupoid of pairs `(x, g)` with `g·u_F(x) = x`, acted on by
/// `h·(x, g) = (h·x, h g θ_F(h)⁻¹)`.
pub fn twisted_fixed_points(y: &Arc<FinGroupoid>, f: &GroupoidMap) -> Result<TwistedFixedPoints> {
    if !f.dom.same_as(y) || !f.cod.same_as(y) {
        return Err(Error::BaseMismatch("twisted fixed points need an endomorphism of Y".into()));
    }
    let gr = y.group().clone();
    let mut pairs = Vec::new();
    for x in y.points() {
        for g in gr.elements() {
            if y.act(g, f.on_object(x)) == x {
                pairs.push((x, g));
            }
        }
    }
    let labels = pairs.iter().map(|&(x, g)| format!("({},{})", y.label(x), gr.label(g))).collect();
    let index = |p: (usize, usize)| pairs.binary_search(&p).expect("closed under the action");
    let fix = FinGroupoid::from_fn(labels, gr.clone(), |h, i| {
        let (x, g) = pairs[i];
        index((y.act(h, x), gr.mul(gr.mul(h, g), gr.inv(f.theta(h)))))
    });
    Ok(TwistedFixedPoints { groupoid: fix, pairs })
}

#[derive(Debug, Clone)]
pub struct TwistedFixedPoints {
    pub groupoid: Arc<FinGroupoid>,
    /// `(x, g)` for each object.
    pub pairs: Vec<(usize, usize)>,
}

impl TwistedFixedPoints {
    pub fn index_of(&self, x: usize, g: usize) -> Option<usize> {
        self.pairs.binary_search(&(x, g)).ok()
    }
}
