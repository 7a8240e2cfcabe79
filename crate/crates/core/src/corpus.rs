//! Seeded generators for groups, groupoids, bundles, kernels and maps.
//!
//! Everything here is deterministic in the seed, so a failing corpus item can
//! be regenerated from `(seed, index)` alone.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coeff::{rat, QMat};
use crate::frobenius::WeilSheaf;
use crate::groupoid::{FinGroup, FinGroupoid, GroupoidMap};
use crate::kernelcalc::Kernel;
use crate::sheafcalc::{pullback_shriek, Bundle, BundleMap};

/// Every group of order at most 8, up to isomorphism, in a fixed order.
pub fn small_groups() -> Vec<Arc<FinGroup>> {
    let c2 = FinGroup::cyclic(2);
    vec![
        FinGroup::trivial(),
        c2.clone(),
        FinGroup::cyclic(3),
        FinGroup::cyclic(4),
        FinGroup::product(vec![c2.clone(), c2.clone()]),
        FinGroup::cyclic(5),
        FinGroup::cyclic(6),
        FinGroup::symmetric(3),
        FinGroup::cyclic(7),
        FinGroup::cyclic(8),
        FinGroup::product(vec![FinGroup::cyclic(4), c2.clone()]),
        FinGroup::product(vec![c2.clone(), c2.clone(), c2]),
        FinGroup::dihedral(4),
        FinGroup::quaternion(),
    ]
}

/// Subgroups of `g` as sorted member lists, found from triples of
/// generators. Every subgroup of a group of order ≤ 8 is 3-generated.
pub fn subgroups(g: &FinGroup) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for a in g.elements() {
        for b in a..g.order() {
            for c in b..g.order() {
                let mask = g.generated(&[a, b, c]);
                let members: Vec<usize> = g.elements().filter(|&x| mask[x]).collect();
                if !out.contains(&members) {
                    out.push(members);
                }
            }
        }
    }
    out.sort_by_key(|m| (m.len(), m.clone()));
    out
}

/// `G` acting on the left cosets of `h`.
pub fn coset_action(g: &Arc<FinGroup>, h: &[usize]) -> Arc<FinGroupoid> {
    let mut cosets: Vec<Vec<usize>> = Vec::new();
    let mut which = vec![usize::MAX; g.order()];
    for a in g.elements() {
        if which[a] != usize::MAX {
            continue;
        }
        let mut c: Vec<usize> = h.iter().map(|&x| g.mul(a, x)).collect();
        c.sort_unstable();
        for &x in &c {
            which[x] = cosets.len();
        }
        cosets.push(c);
    }
    let labels = cosets.iter().map(|c| g.label(c[0])).collect::<Vec<_>>();
    let labels = if cosets.len() == 1 { vec!["*".to_string()] } else { labels };
    let action = g.elements().map(|a| cosets.iter().map(|c| which[g.mul(a, c[0])]).collect()).collect();
    FinGroupoid::new(labels, g.clone(), action).expect("coset actions are actions")
}

/// Disjoint union of actions of one group.
pub fn disjoint_union(parts: &[Arc<FinGroupoid>]) -> Arc<FinGroupoid> {
    let g = parts[0].group().clone();
    let mut offsets = Vec::new();
    let mut labels = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        offsets.push(labels.len());
        labels.extend(p.points().map(|x| if parts.len() == 1 { p.label(x) } else { format!("{}{}", p.label(x), "'".repeat(i)) }));
    }
    let action = g
        .elements()
        .map(|a| parts.iter().zip(&offsets).flat_map(|(p, &o)| p.points().map(move |x| o + p.act(a, x))).collect())
        .collect();
    FinGroupoid::new(labels, g, action).expect("unions of actions are actions")
}

/// Sign of the permutation `x ↦ f(x)` of `0..n`.
fn perm_sign(n: usize, f: impl Fn(usize) -> usize) -> i64 {
    let mut seen = vec![false; n];
    let mut sign = 1;
    for s in 0..n {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = f(x);
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// A seeded source of random corpus items.
pub struct Corpus {
    rng: ChaCha8Rng,
    groups: Vec<Arc<FinGroup>>,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed), groups: small_groups() }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn group(&mut self, max_order: usize) -> Arc<FinGroup> {
        let fit: Vec<_> = self.groups.iter().filter(|g| g.order() <= max_order).cloned().collect();
        fit.choose(&mut self.rng).expect("the trivial group always fits").clone()
    }

    pub fn discrete(&mut self, max_points: usize) -> Arc<FinGroupoid> {
        FinGroupoid::discrete_n(self.rng.gen_range(1..=max_points))
    }

    /// `X//G` with `|G| ≤ max_order` and `1 ≤ |X| ≤ max_points`, built from
    /// coset actions.
    pub fn action_groupoid(&mut self, max_order: usize, max_points: usize) -> Arc<FinGroupoid> {
        let g = self.group(max_order);
        let subs: Vec<Vec<usize>> = subgroups(&g).into_iter().filter(|h| g.order() / h.len() <= max_points).collect();
        let mut parts = Vec::new();
        let mut left = max_points;
        loop {
            let fit: Vec<&Vec<usize>> = subs.iter().filter(|h| g.order() / h.len() <= left).collect();
            let h = fit.choose(&mut self.rng).expect("the whole group always fits");
            let part = coset_action(&g, h);
            left -= part.size();
            parts.push(part);
            if left == 0 || !self.rng.gen_bool(0.35) {
                break;
            }
        }
        disjoint_union(&parts)
    }

    /// A random representation of the group of `y`, as matrices on generators
    /// through `rho(g)`. Chosen among trivial, sign-type characters, the
    /// permutation representation on the points, and the regular one for
    /// groups of order at most 8.
    fn representation(&mut self, y: &Arc<FinGroupoid>) -> (usize, Arc<dyn Fn(usize) -> QMat + Send + Sync>) {
        let g = y.group().clone();
        let n = y.size();
        let kinds = if g.order() <= 8 { 5 } else { 4 };
        match self.rng.gen_range(0..kinds) {
            0 | 1 => {
                let d = self.rng.gen_range(1..=2);
                (d, Arc::new(move |_| QMat::identity(d)))
            }
            2 => {
                let (yy, gg) = (y.clone(), g.clone());
                let on_group = self.rng.gen_bool(0.5);
                (
                    1,
                    Arc::new(move |a| {
                        let s = if on_group {
                            perm_sign(gg.order(), |x| gg.mul(a, x))
                        } else {
                            perm_sign(yy.size(), |x| yy.act(a, x))
                        };
                        QMat::from_i64(&[&[s]])
                    }),
                )
            }
            3 => {
                let yy = y.clone();
                (n, Arc::new(move |a| QMat::from_fn(n, n, |i, j| rat(i64::from(yy.act(a, j) == i)))))
            }
            _ => {
                let m = g.order();
                (m, Arc::new(move |a| QMat::from_fn(m, m, |i, j| rat(i64::from(g.mul(a, j) == i)))))
            }
        }
    }

    /// A random equivariant bundle: a few representations of the group, each
    /// supported on a random union of orbits.
    pub fn bundle(&mut self, y: &Arc<FinGroupoid>) -> Bundle {
        let orbits = y.pi0_with_aut();
        let comp = y.component_index();
        let mut out = Bundle::zero(y);
        let pieces = self.rng.gen_range(1..=2);
        for _ in 0..pieces {
            let (d, rho) = self.representation(y);
            let support: Vec<bool> = (0..orbits.len()).map(|_| self.rng.gen_bool(0.6)).collect();
            let dims: Vec<usize> = y.points().map(|x| if support[comp[x]] { d } else { 0 }).collect();
            let dd = dims.clone();
            let piece = Bundle::from_action(y.clone(), dims, move |a, x| {
                if dd[x] == 0 {
                    QMat::zeros(0, 0)
                } else {
                    rho(a)
                }
            })
            .expect("constant representations are equivariant");
            out = out.direct_sum(&piece).expect("same base");
        }
        out
    }

    /// Random dimension table for a kernel between finite sets.
    pub fn discrete_kernel(&mut self, max_points: usize, max_dim: usize) -> Kernel {
        let n = self.rng.gen_range(1..=max_points);
        let dims: Vec<Vec<usize>> = (0..n).map(|_| (0..n).map(|_| self.rng.gen_range(0..=max_dim)).collect()).collect();
        Kernel::from_dims(&dims).expect("square table")
    }

    pub fn kernel(&mut self, left: &Arc<FinGroupoid>, right: &Arc<FinGroupoid>) -> Kernel {
        let base = FinGroupoid::product(left, right);
        let payload = self.bundle(&base);
        Kernel::new(left.clone(), right.clone(), payload).expect("payload on the product")
    }

    /// An equivariant map out of `x`, of one of several shapes: to the
    /// point, to `pt//G`, to an orbit quotient of the same group, the
    /// identity, or a stabilizer inclusion into `x` itself.
    pub fn map_from(&mut self, x: &Arc<FinGroupoid>) -> GroupoidMap {
        let g = x.group().clone();
        match self.rng.gen_range(0..4) {
            0 => GroupoidMap::to_point(x),
            1 => {
                let b = FinGroupoid::classifying(g.clone());
                GroupoidMap::new(x.clone(), b, g.elements().collect(), vec![0; x.size()]).expect("equivariant")
            }
            2 => {
                // collapse each orbit to a point of a discrete set with trivial θ
                let comp = x.component_index();
                let n = comp.iter().max().map_or(0, |m| m + 1);
                let target = FinGroupoid::discrete_n(n.max(1));
                GroupoidMap::new(x.clone(), target, vec![0; g.order()], comp).expect("orbits are invariant")
            }
            _ => GroupoidMap::identity(x),
        }
    }

    /// A random Weil sheaf: `F(x) = g₀·x` with `θ` conjugation by `g₀`, and
    /// `α` a small integer combination of a basis of equivariant maps.
    /// Stalks are kept to dimension at most 4; the class computation grows
    /// quickly beyond that.
    pub fn weil_sheaf(&mut self, max_order: usize, max_points: usize) -> WeilSheaf {
        let y = self.action_groupoid(max_order, max_points);
        let g = y.group().clone();
        let g0 = self.rng.gen_range(0..g.order());
        let theta = g.elements().map(|h| g.mul(g.mul(g0, h), g.inv(g0))).collect();
        let u = y.points().map(|x| y.act(g0, x)).collect();
        let f = GroupoidMap::new(y.clone(), y.clone(), theta, u).expect("translation intertwines conjugation");
        let v = loop {
            let v = self.bundle(&y);
            if v.dims().iter().all(|&d| d <= 4) {
                break v;
            }
        };
        let pulled = pullback_shriek(&f, &v).expect("same base");
        let basis = BundleMap::equivariant_basis(&pulled, &v).expect("same base");
        let mut alpha = BundleMap::zero(&pulled, &v);
        for b in &basis {
            let c = rat(self.rng.gen_range(-2..=2));
            alpha = BundleMap { maps: alpha.maps.iter().zip(&b.maps).map(|(a, m)| a.add(&m.scale(&c))).collect() };
        }
        WeilSheaf::new(v, f, alpha).expect("equivariant by construction")
    }

    /// The inclusion `pt//Stab(p) → X//G` of a point with its stabilizer.
    pub fn stabilizer_inclusion(&mut self, x: &Arc<FinGroupoid>) -> GroupoidMap {
        let p = self.rng.gen_range(0..x.size());
        stabilizer_inclusion(x, p)
    }
}

/// `pt//Stab(p) → X//G`.
pub fn stabilizer_inclusion(x: &Arc<FinGroupoid>, p: usize) -> GroupoidMap {
    let g = x.group();
    let stab = x.stabilizer(p);
    let index = |a: usize| stab.iter().position(|&s| s == a).expect("closed under products");
    let table = stab.iter().map(|&a| stab.iter().map(|&b| index(g.mul(a, b))).collect()).collect();
    let labels = stab.iter().map(|&a| g.label(a)).collect();
    let h = FinGroup::from_table(labels, table).expect("a subgroup is a group");
    GroupoidMap::new(FinGroupoid::classifying(h), x.clone(), stab.clone(), vec![p]).expect("stabilizer fixes p")
}
