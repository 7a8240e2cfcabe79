//! Right and left Kan extensions along groupoid maps.
//!
//! For `f: A → B` and `y ∈ B`, the comma objects are pairs `(x, h)` with
//! `h·y = u(x)`; `g ∈ G_A` sends `(x, h)` to `(g·x, θ(g)h)`. A section of
//! `Ran_f V` at `y` assigns `s_(x,h) ∈ V_x` compatibly, and is determined by
//! its values at one representative per orbit, each invariant under the
//! representative's stabilizer.

use std::collections::HashMap;
use num_traits::Zero;

use crate::coeff::QMat;
use crate::groupoid::GroupoidMap;
use crate::sheafcalc::bundle::{Bundle, BundleMap};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// Orbit structure of the comma category over one point `y`.
#[derive(Clone, Debug)]
pub struct CommaOrbits {
    /// `(x, h)` for each orbit representative.
    pub reps: Vec<(usize, usize)>,
    /// Generators of each representative's stabilizer.
    pub stab_gens: Vec<Vec<usize>>,
    hb: usize,
    lookup: Vec<u32>,
    transporter: Vec<u32>,
}

impl CommaOrbits {
    /// Representative index and `g` with `g·rep = (x, h)`.
    pub fn locate(&self, x: usize, h: usize) -> Option<(usize, usize)> {
        let k = x * self.hb + h;
        match self.lookup.get(k) {
            Some(&r) if r != NONE => Some((r as usize, self.transporter[k] as usize)),
            _ => None,
        }
    }
}

pub fn comma_orbits(f: &GroupoidMap, y: usize) -> CommaOrbits {
    let (a, b) = (f.dom(), f.cod());
    let (ga, gb) = (a.group(), b.group());
    let hb = gb.order();
    let mut lookup = vec![NONE; a.size() * hb];
    let mut transporter = vec![NONE; a.size() * hb];
    let mut reps = Vec::new();
    let mut stab_gens = Vec::new();
    let mut starts: Vec<(usize, usize)> = a.points().filter(|&x| f.on_object(x) == y).map(|x| (x, gb.identity())).collect();
    for x in a.points() {
        for h in gb.elements() {
            if b.act(h, y) == f.on_object(x) {
                starts.push((x, h));
            }
        }
    }
    for (x0, h0) in starts {
        if lookup[x0 * hb + h0] != NONE {
            continue;
        }
        let r = reps.len() as u32;
        reps.push((x0, h0));
        let mut orbit = vec![(x0, h0)];
        lookup[x0 * hb + h0] = r;
        transporter[x0 * hb + h0] = ga.identity() as u32;
        let mut schreier = Vec::new();
        let mut i = 0;
        while i < orbit.len() {
            let (x, h) = orbit[i];
            let t = transporter[x * hb + h] as usize;
            for &s in ga.gens() {
                let (nx, nh) = (a.act(s, x), gb.mul(f.theta(s), h));
                let k = nx * hb + nh;
                let st = ga.mul(s, t);
                if lookup[k] == NONE {
                    lookup[k] = r;
                    transporter[k] = st as u32;
                    orbit.push((nx, nh));
                } else {
                    let z = ga.mul(ga.inv(transporter[k] as usize), st);
                    if z != ga.identity() {
                        schreier.push(z);
                    }
                }
            }
            i += 1;
        }
        // keep only generators that enlarge the subgroup
        let mut gens: Vec<usize> = Vec::new();
        let mut mask = ga.generated(&[]);
        for z in schreier {
            if !mask[z] {
                gens.push(z);
                mask = ga.generated(&gens);
            }
        }
        stab_gens.push(gens);
    }
    CommaOrbits { reps, stab_gens, hb, lookup, transporter }
}

/// Memoized `ρ(g)_x` for one bundle.
pub(crate) struct RhoCache<'a> {
    v: &'a Bundle,
    memo: HashMap<(usize, usize), QMat>,
}

impl<'a> RhoCache<'a> {
    pub(crate) fn new(v: &'a Bundle) -> Self {
        RhoCache { v, memo: HashMap::new() }
    }

    pub(crate) fn get(&mut self, g: usize, x: usize) -> &QMat {
        let v = self.v;
        self.memo.entry((g, x)).or_insert_with(|| v.rho(g, x))
    }
}

/// One stalk of `Ran_f V`.
#[derive(Clone, Debug)]
pub struct RanStalk {
    pub orbits: CommaOrbits,
    /// Invariant basis (columns) at each representative.
    pub basis: Vec<QMat>,
    pub left_inv: Vec<QMat>,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

/// `Ran_f V` together with everything needed to evaluate its sections.
#[derive(Clone, Debug)]
pub struct RanData {
    pub map: GroupoidMap,
    pub source: Bundle,
    pub stalks: Vec<RanStalk>,
    pub result: Bundle,
}

fn invariants(cache: &mut RhoCache, x: usize, gens: &[usize], d: usize) -> QMat {
    let mut basis = QMat::identity(d);
    for &z in gens {
        if basis.cols() == 0 {
            break;
        }
        let m = cache.get(z, x).sub(&QMat::identity(d)).mul(&basis);
        basis = basis.mul(&m.kernel());
    }
    basis
}

pub fn ran(f: &GroupoidMap, v: &Bundle) -> Result<RanData> {
    if !v.base().same_as(f.dom()) {
        return Err(Error::BaseMismatch("pushforward of a bundle not on the domain".into()));
    }
    let b = f.cod().clone();
    let mut cache = RhoCache::new(v);
    let mut stalks = Vec::with_capacity(b.size());
    for y in b.points() {
        let orbits = comma_orbits(f, y);
        let mut basis = Vec::new();
        let mut left_inv = Vec::new();
        let mut offsets = Vec::new();
        let mut dim = 0;
        for (r, &(x, _)) in orbits.reps.iter().enumerate() {
            let bm = invariants(&mut cache, x, &orbits.stab_gens[r], v.dim(x));
            let li = bm.left_inverse().expect("invariant basis has independent columns");
            offsets.push(dim);
            dim += bm.cols();
            basis.push(bm);
            left_inv.push(li);
        }
        stalks.push(RanStalk { orbits, basis, left_inv, offsets, dim });
    }
    let gb = b.group();
    let mut gens = Vec::with_capacity(gb.gens().len());
    for &k in gb.gens() {
        let mut row = Vec::with_capacity(b.size());
        for y in b.points() {
            let y2 = b.act(k, y);
            let (src, tgt) = (&stalks[y], &stalks[y2]);
            let mut m = QMat::zeros(tgt.dim, src.dim);
            for (r2, &(x2, h2)) in tgt.orbits.reps.iter().enumerate() {
                let (r, g) = src.orbits.locate(x2, gb.mul(h2, k)).expect("comma object over y");
                let (x, _) = src.orbits.reps[r];
                let block = tgt.left_inv[r2].mul(cache.get(g, x)).mul(&src.basis[r]);
                paste(&mut m, tgt.offsets[r2], src.offsets[r], &block);
            }
            row.push(m);
        }
        gens.push(row);
    }
    let dims = stalks.iter().map(|s| s.dim).collect();
    let result = Bundle::unchecked(b.clone(), dims, gens)?;
    Ok(RanData { map: f.clone(), source: v.clone(), stalks, result })
}

pub(crate) fn paste(m: &mut QMat, r0: usize, c0: usize, block: &QMat) {
    for i in 0..block.rows() {
        for j in 0..block.cols() {
            let v = block.get(i, j);
            if !v.is_zero() {
                m.set(r0 + i, c0 + j, v.clone());
            }
        }
    }
}

impl RanData {
    pub fn dim(&self, y: usize) -> usize {
        self.stalks[y].dim
    }

    /// The linear map `coords ↦ s_(x,h)` from the stalk at `y` to `V_x`.
    pub fn eval_matrix(&self, y: usize, x: usize, h: usize) -> QMat {
        let st = &self.stalks[y];
        let (r, g) = st.orbits.locate(x, h).expect("(x, h) is a comma object over y");
        let (xr, _) = st.orbits.reps[r];
        let value = self.source.rho(g, xr).mul(&st.basis[r]);
        let mut m = QMat::zeros(self.source.dim(x), st.dim);
        paste(&mut m, 0, st.offsets[r], &value);
        m
    }

    /// Coordinates of the section whose representative values are the given
    /// matrices (rows = `dim V_{x_r}`, common column count). The values must
    /// be stabilizer-invariant; this is checked.
    pub fn coords_from_rep_values(&self, y: usize, values: &[QMat]) -> QMat {
        let st = &self.stalks[y];
        let cols = values.first().map_or(0, |v| v.cols());
        let mut m = QMat::zeros(st.dim, cols);
        for (r, val) in values.iter().enumerate() {
            let c = st.left_inv[r].mul(val);
            debug_assert_eq!(&st.basis[r].mul(&c), val, "representative value is not invariant");
            paste(&mut m, st.offsets[r], 0, &c);
        }
        m
    }

    /// Like [`coords_from_rep_values`](Self::coords_from_rep_values) but
    /// reports non-invariant input instead of asserting.
    pub fn try_coords_from_rep_values(&self, y: usize, values: &[QMat]) -> Option<QMat> {
        let st = &self.stalks[y];
        let cols = values.first().map_or(0, |v| v.cols());
        let mut m = QMat::zeros(st.dim, cols);
        for (r, val) in values.iter().enumerate() {
            let c = st.left_inv[r].mul(val);
            if st.basis[r].mul(&c) != *val {
                return None;
            }
            paste(&mut m, st.offsets[r], 0, &c);
        }
        Some(m)
    }

    pub fn reps(&self, y: usize) -> &[(usize, usize)] {
        &self.stalks[y].orbits.reps
    }

    /// Labels for the basis of the stalk at `y`: representative and index.
    pub fn basis_labels(&self, y: usize) -> Vec<String> {
        let st = &self.stalks[y];
        let a = self.map.dom();
        let gb = self.map.cod().group();
        let mut out = Vec::new();
        for (r, &(x, h)) in st.orbits.reps.iter().enumerate() {
            for j in 0..st.basis[r].cols() {
                if h == gb.identity() {
                    out.push(format!("{}#{}", a.label(x), j));
                } else {
                    out.push(format!("{}@{}#{}", a.label(x), gb.label(h), j));
                }
            }
        }
        out
    }
}

/// `Ran_f(φ)` for a bundle map `φ: V → W` over the domain of `f`.
pub fn ran_map(src: &RanData, tgt: &RanData, phi: &BundleMap) -> BundleMap {
    let maps = src
        .stalks
        .iter()
        .zip(&tgt.stalks)
        .map(|(s, t)| {
            let mut m = QMat::zeros(t.dim, s.dim);
            for (r, &(x, _)) in s.orbits.reps.iter().enumerate() {
                let block = t.left_inv[r].mul(&phi.maps[x]).mul(&s.basis[r]);
                paste(&mut m, t.offsets[r], s.offsets[r], &block);
            }
            m
        })
        .collect();
    BundleMap { maps }
}

/// One stalk of `Lan_f V`, presented by coinvariants at representatives.
#[derive(Clone, Debug)]
pub struct LanStalk {
    pub orbits: CommaOrbits,
    /// Quotient map `V_x → coinvariants` at each representative.
    pub quot: Vec<QMat>,
    /// A section of the quotient map.
    pub lift: Vec<QMat>,
    pub offsets: Vec<usize>,
    pub dim: usize,
}

#[derive(Clone, Debug)]
pub struct LanData {
    pub map: GroupoidMap,
    pub source: Bundle,
    pub stalks: Vec<LanStalk>,
    pub result: Bundle,
}

fn coinvariants(cache: &mut RhoCache, x: usize, gens: &[usize], d: usize) -> (QMat, QMat) {
    let rels: Vec<QMat> = gens.iter().map(|&z| cache.get(z, x).sub(&QMat::identity(d))).collect();
    let rel_refs: Vec<&QMat> = rels.iter().collect();
    let span = if rel_refs.is_empty() { QMat::zeros(d, 0) } else { QMat::hstack(&rel_refs).image() };
    let k = span.cols();
    let ext = QMat::hstack(&[&span, &QMat::identity(d)]);
    let pivots = ext.echelon().pivots;
    let comp: Vec<usize> = pivots.iter().filter(|&&p| p >= k).map(|&p| p - k).collect();
    let lift = QMat::identity(d).select_cols(&comp);
    let full = QMat::hstack(&[&span, &lift]);
    let inv = full.inverse().expect("span plus complement is a basis");
    let rows: Vec<usize> = (k..d).collect();
    let all: Vec<usize> = (0..d).collect();
    (inv.select(&rows, &all), lift)
}

pub fn lan(f: &GroupoidMap, v: &Bundle) -> Result<LanData> {
    if !v.base().same_as(f.dom()) {
        return Err(Error::BaseMismatch("pushforward of a bundle not on the domain".into()));
    }
    let b = f.cod().clone();
    let mut cache = RhoCache::new(v);
    let mut stalks = Vec::with_capacity(b.size());
    for y in b.points() {
        let orbits = comma_orbits(f, y);
        let (mut quot, mut lift, mut offsets, mut dim) = (Vec::new(), Vec::new(), Vec::new(), 0);
        for (r, &(x, _)) in orbits.reps.iter().enumerate() {
            let (q, l) = coinvariants(&mut cache, x, &orbits.stab_gens[r], v.dim(x));
            offsets.push(dim);
            dim += q.rows();
            quot.push(q);
            lift.push(l);
        }
        stalks.push(LanStalk { orbits, quot, lift, offsets, dim });
    }
    let (ga, gb) = (f.dom().group().clone(), b.group().clone());
    let mut gens = Vec::new();
    for &k in gb.gens() {
        let kinv = gb.inv(k);
        let mut row = Vec::new();
        for y in b.points() {
            let y2 = b.act(k, y);
            let (src, tgt) = (&stalks[y], &stalks[y2]);
            let mut m = QMat::zeros(tgt.dim, src.dim);
            for (r, &(x, h)) in src.orbits.reps.iter().enumerate() {
                let (r2, g) = tgt.orbits.locate(x, gb.mul(h, kinv)).expect("comma object over k·y");
                let block = tgt.quot[r2].mul(cache.get(ga.inv(g), x)).mul(&src.lift[r]);
                paste(&mut m, tgt.offsets[r2], src.offsets[r], &block);
            }
            row.push(m);
        }
        gens.push(row);
    }
    let dims = stalks.iter().map(|s| s.dim).collect();
    let result = Bundle::unchecked(b, dims, gens)?;
    Ok(LanData { map: f.clone(), source: v.clone(), stalks, result })
}

/// The norm map `Lan_f V → Ran_f V`: a class at `(x, a: u(x) → y)` goes to
/// the section whose value at `(x', b: y → u(x'))` is the sum of `ρ(g)v` over
/// all `g: x → x'` with `θ(g) = b∘a`.
pub fn norm_map(l: &LanData, r: &RanData) -> BundleMap {
    let f = &l.map;
    let (a, ga, gb) = (f.dom().clone(), f.dom().group().clone(), f.cod().group().clone());
    let mut cache = RhoCache::new(&l.source);
    let maps = l
        .stalks
        .iter()
        .zip(&r.stalks)
        .map(|(ls, rs)| {
            let mut m = QMat::zeros(rs.dim, ls.dim);
            for (i, &(x, h)) in ls.orbits.reps.iter().enumerate() {
                for (j, &(x2, h2)) in rs.orbits.reps.iter().enumerate() {
                    let want = gb.mul(h2, gb.inv(h));
                    let mut acc = QMat::zeros(l.source.dim(x2), l.source.dim(x));
                    for g in ga.elements() {
                        if a.act(g, x) == x2 && f.theta(g) == want {
                            acc = acc.add(cache.get(g, x));
                        }
                    }
                    let block = rs.left_inv[j].mul(&acc).mul(&ls.lift[i]);
                    paste(&mut m, rs.offsets[j], ls.offsets[i], &block);
                }
            }
            m
        })
        .collect();
    BundleMap { maps }
}
