//! Internal groupoids: validation, recovery of unit and inverse from the
//! multiplication, and the standard constructions.

use std::collections::HashMap;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::morphism::Functor;
use crate::report::Report;
use crate::site::{chain_product, factor_through, fibre_product, same, Backend, FibreProduct, Mor, Obj, Space};

pub type Grpd = Arc<Groupoid>;

/// The same groupoid, either shared or with identical layout and structure.
pub fn same_grpd(a: &Grpd, b: &Grpd) -> bool {
    Arc::ptr_eq(a, b)
        || (a.g0.same_layout(&b.g0) && a.g1.same_layout(&b.g1) && a.same_as(b))
}

/// Objects `g0`, arrows `g1`, range `r`, source `s`, and multiplication `m`
/// on the composable pairs `g1 ×_{s,g0,r} g1`, with unit `u` and inverse `i`.
#[derive(Debug)]
pub struct Groupoid {
    g0: Space,
    g1: Space,
    r: Mor,
    s: Mor,
    comp: FibreProduct,
    m: Mor,
    u: Mor,
    i: Mor,
    ends: HashMap<(usize, usize), Vec<usize>>,
}

fn check_boundary(f: &Mor, dom: &Space, cod: &Space, what: &str) -> Result<()> {
    if !same(f.dom(), dom) || !same(f.cod(), cod) {
        return Err(Error::BoundaryMismatch(format!("{what} has the wrong domain or codomain")));
    }
    Ok(())
}

impl Groupoid {
    /// Assembles a groupoid from its structure maps, checking only that the
    /// maps fit together. Use [`Groupoid::validate`] for the axioms.
    pub fn from_parts(g0: Space, g1: Space, r: Mor, s: Mor, m: Mor, u: Mor, i: Mor) -> Result<Groupoid> {
        check_boundary(&r, &g1, &g0, "range")?;
        check_boundary(&s, &g1, &g0, "source")?;
        check_boundary(&u, &g0, &g1, "unit")?;
        check_boundary(&i, &g1, &g1, "inverse")?;
        let r = r.recast(&g1, &g0)?;
        let s = s.recast(&g1, &g0)?;
        let u = u.recast(&g0, &g1)?;
        let i = i.recast(&g1, &g1)?;
        let comp = fibre_product(&s, &r)?;
        check_boundary(&m, &comp.apex, &g1, "multiplication")?;
        let m = m.recast(&comp.apex, &g1)?;
        let mut ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for g in 0..g1.len() {
            ends.entry((s.at(g), r.at(g))).or_default().push(g);
        }
        Ok(Groupoid { g0, g1, r, s, comp, m, u, i, ends })
    }

    /// Assembles a groupoid from a multiplication formula on composable pairs.
    pub fn from_tables(
        g0: Space,
        g1: Space,
        r: Mor,
        s: Mor,
        mul: impl Fn(usize, usize) -> usize,
        u: Mor,
        i: Mor,
    ) -> Result<Groupoid> {
        let comp = fibre_product(&s, &r)?;
        let m = comp.map_to(&g1, |t| mul(t[0], t[1]))?;
        Groupoid::from_parts(g0, g1, r, s, m, u, i)
    }

    /// Recovers the unit and inverse from the multiplication alone, using
    /// that the two shear maps are invertible.
    pub fn from_multiplication(g0: Space, g1: Space, r: Mor, s: Mor, m: Mor) -> Result<Groupoid> {
        if !r.is_cover() {
            return Err(Error::NotACover("range".into()));
        }
        if !s.is_cover() {
            return Err(Error::NotACover("source".into()));
        }
        let comp = fibre_product(&s, &r)?;
        check_boundary(&m, &comp.apex, &g1, "multiplication")?;
        let m = m.recast(&comp.apex, &g1)?;
        for (k, t) in comp.tuples().iter().enumerate() {
            let p = m.at(k);
            if r.at(p) != r.at(t[0]) || s.at(p) != s.at(t[1]) {
                return Err(Error::Invalid(format!(
                    "product of {} and {} has the wrong ends",
                    g1.name(t[0]),
                    g1.name(t[1])
                )));
            }
        }
        let mul = |a: usize, b: usize| m.at(comp.at(&[a, b]));
        for t in comp.tuples() {
            let ab = mul(t[0], t[1]);
            for c in 0..g1.len() {
                if r.at(c) == s.at(t[1]) && mul(ab, c) != mul(t[0], mul(t[1], c)) {
                    return Err(Error::NotAssociative(format!(
                        "({}, {}, {})",
                        g1.name(t[0]),
                        g1.name(t[1]),
                        g1.name(c)
                    )));
                }
            }
        }
        let (source_shear, target) = shear_source(&g1, &s, &comp, &m)?;
        let inv = source_shear
            .inverse()
            .ok_or_else(|| Error::ShearNotIso(shear_witness(&source_shear, &g1, &comp)))?;
        let (range_shear, _) = shear_range(&g1, &r, &comp, &m)?;
        if !range_shear.is_iso() {
            return Err(Error::ShearNotIso(shear_witness(&range_shear, &g1, &comp)));
        }
        // the unique x with x·g = g, read off the inverse shear at (g, g)
        let left_unit = Mor::from_fn(&g1, &g1, |g| comp.tuple(inv.at(target.at(&[g, g])))[0])?;
        let u = factor_through(&r, &left_unit).map_err(|e| Error::Invalid(format!("left units do not descend: {e}")))?;
        let i = Mor::from_fn(&g1, &g1, |g| comp.tuple(inv.at(target.at(&[g, u.at(s.at(g))])))[0])?;
        let out = Groupoid::from_parts(g0, g1, r, s, m, u, i)?;
        if !out.m.is_cover() {
            return Err(Error::NotACover("multiplication".into()));
        }
        Ok(out)
    }

    pub fn backend(&self) -> Backend {
        self.g0.backend()
    }

    pub fn objects(&self) -> &Space {
        &self.g0
    }

    pub fn arrows(&self) -> &Space {
        &self.g1
    }

    pub fn range(&self) -> &Mor {
        &self.r
    }

    pub fn source(&self) -> &Mor {
        &self.s
    }

    pub fn mult(&self) -> &Mor {
        &self.m
    }

    pub fn unit_map(&self) -> &Mor {
        &self.u
    }

    pub fn inverse_map(&self) -> &Mor {
        &self.i
    }

    /// Composable pairs `(g, h)` with `s(g) = r(h)`.
    pub fn composable(&self) -> &FibreProduct {
        &self.comp
    }

    #[inline]
    pub fn r(&self, g: usize) -> usize {
        self.r.at(g)
    }

    #[inline]
    pub fn s(&self, g: usize) -> usize {
        self.s.at(g)
    }

    #[inline]
    pub fn unit(&self, x: usize) -> usize {
        self.u.at(x)
    }

    #[inline]
    pub fn inv(&self, g: usize) -> usize {
        self.i.at(g)
    }

    pub fn try_mul(&self, g: usize, h: usize) -> Option<usize> {
        self.comp.pair(g, h).map(|k| self.m.at(k))
    }

    /// `g · h`; panics unless `s(g) = r(h)`.
    pub fn mul(&self, g: usize, h: usize) -> usize {
        match self.try_mul(g, h) {
            Some(p) => p,
            None => panic!("{} and {} are not composable", self.g1.name(g), self.g1.name(h)),
        }
    }

    /// Arrows from `x` to `y`, that is with source `x` and range `y`.
    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        self.ends.get(&(x, y)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    pub fn arrow_name(&self, g: usize) -> &str {
        self.g1.name(g)
    }

    pub fn object_name(&self, x: usize) -> &str {
        self.g0.name(x)
    }

    pub fn len0(&self) -> usize {
        self.g0.len()
    }

    pub fn len1(&self) -> usize {
        self.g1.len()
    }

    /// Equal objects, arrows and structure maps, compared by element names.
    pub fn same_as(&self, other: &Groupoid) -> bool {
        if !same(&self.g0, &other.g0) || !same(&self.g1, &other.g1) {
            return false;
        }
        if self.r != other.r || self.s != other.s || self.u != other.u || self.i != other.i {
            return false;
        }
        self.comp.tuples().iter().all(|t| {
            let a = other.g1.elem(self.g1.name(t[0])).expect("same arrows");
            let b = other.g1.elem(self.g1.name(t[1])).expect("same arrows");
            other.try_mul(a, b).map(|p| other.g1.name(p)) == Some(self.g1.name(self.mul(t[0], t[1])))
        })
    }

    /// Checks every groupoid axiom and reports all failures.
    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        let g1 = &self.g1;
        let n = |g: usize| g1.name(g).to_string();
        rep.record("range-cover", "r is a cover", (!self.r.is_cover()).then(|| format!("r = {}", self.r)));
        rep.record("source-cover", "s is a cover", (!self.s.is_cover()).then(|| format!("s = {}", self.s)));
        let mut bad_range = None;
        let mut bad_source = None;
        for t in self.comp.tuples() {
            let p = self.mul(t[0], t[1]);
            if bad_range.is_none() && self.r(p) != self.r(t[0]) {
                bad_range = Some(format!("({}, {})", n(t[0]), n(t[1])));
            }
            if bad_source.is_none() && self.s(p) != self.s(t[1]) {
                bad_source = Some(format!("({}, {})", n(t[0]), n(t[1])));
            }
        }
        rep.record("product-range", "r(g·h) = r(g)", bad_range);
        rep.record("product-source", "s(g·h) = s(h)", bad_source);
        let mut assoc = None;
        'outer: for t in self.comp.tuples() {
            for c in 0..g1.len() {
                if self.r(c) != self.s(t[1]) {
                    continue;
                }
                let lhs = self.try_mul(self.mul(t[0], t[1]), c);
                let rhs = self.try_mul(t[1], c).and_then(|bc| self.try_mul(t[0], bc));
                if lhs.is_none() || lhs != rhs {
                    assoc = Some(format!("({}, {}, {})", n(t[0]), n(t[1]), n(c)));
                    break 'outer;
                }
            }
        }
        rep.record("associative", "(g·h)·k = g·(h·k)", assoc);
        rep.record(
            "unit-ends",
            "r(1_x) = x = s(1_x)",
            (0..self.len0())
                .find(|&x| self.r(self.unit(x)) != x || self.s(self.unit(x)) != x)
                .map(|x| self.g0.name(x).to_string()),
        );
        rep.record(
            "unit-law",
            "1_{r(g)}·g = g = g·1_{s(g)}",
            (0..g1.len())
                .find(|&g| {
                    self.try_mul(self.unit(self.r(g)), g) != Some(g) || self.try_mul(g, self.unit(self.s(g))) != Some(g)
                })
                .map(n),
        );
        rep.record(
            "inverse-ends",
            "s(g⁻¹) = r(g) and r(g⁻¹) = s(g)",
            (0..g1.len()).find(|&g| self.s(self.inv(g)) != self.r(g) || self.r(self.inv(g)) != self.s(g)).map(n),
        );
        rep.record(
            "inverse-law",
            "g⁻¹·g = 1_{s(g)} and g·g⁻¹ = 1_{r(g)}",
            (0..g1.len())
                .find(|&g| {
                    self.try_mul(self.inv(g), g) != Some(self.unit(self.s(g)))
                        || self.try_mul(g, self.inv(g)) != Some(self.unit(self.r(g)))
                })
                .map(n),
        );
        match shear_source(g1, &self.s, &self.comp, &self.m) {
            Ok((f, _)) => rep.record(
                "shear-source",
                "(g, h) ↦ (h, g·h) onto pairs with equal source is invertible",
                (!f.is_iso()).then(|| shear_witness(&f, g1, &self.comp)),
            ),
            Err(e) => rep.record("shear-source", "(g, h) ↦ (h, g·h) is defined", Some(e.to_string())),
        }
        match shear_range(g1, &self.r, &self.comp, &self.m) {
            Ok((f, _)) => rep.record(
                "shear-range",
                "(g, h) ↦ (g, g·h) onto pairs with equal range is invertible",
                (!f.is_iso()).then(|| shear_witness(&f, g1, &self.comp)),
            ),
            Err(e) => rep.record("shear-range", "(g, h) ↦ (g, g·h) is defined", Some(e.to_string())),
        }
        rep.record(
            "unit-idempotent",
            "1_x·1_x = 1_x",
            (0..self.len0())
                .find(|&x| self.try_mul(self.unit(x), self.unit(x)) != Some(self.unit(x)))
                .map(|x| self.g0.name(x).to_string()),
        );
        rep.record(
            "inverse-involutive",
            "(g⁻¹)⁻¹ = g",
            (0..g1.len()).find(|&g| self.inv(self.inv(g)) != g).map(n),
        );
        rep.record(
            "inverse-reverses",
            "(g·h)⁻¹ = h⁻¹·g⁻¹",
            self.comp
                .tuples()
                .iter()
                .find(|t| {
                    Some(self.inv(self.mul(t[0], t[1]))) != self.try_mul(self.inv(t[1]), self.inv(t[0]))
                })
                .map(|t| format!("({}, {})", n(t[0]), n(t[1]))),
        );
        rep.record(
            "multiplication-cover",
            "m is a cover",
            (!self.m.is_cover()).then(|| "m is not a cover".to_string()),
        );
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }
}

fn shear_witness(f: &Mor, g1: &Space, comp: &FibreProduct) -> String {
    if !f.is_injective() {
        let mut seen = HashMap::new();
        for k in 0..f.dom().len() {
            if let Some(j) = seen.insert(f.at(k), k) {
                let (a, b) = (comp.tuple(j), comp.tuple(k));
                return format!(
                    "({}, {}) and ({}, {}) have the same image",
                    g1.name(a[0]),
                    g1.name(a[1]),
                    g1.name(b[0]),
                    g1.name(b[1])
                );
            }
        }
    }
    if !f.is_surjective() {
        let hit: std::collections::HashSet<usize> = f.table().iter().copied().collect();
        if let Some(y) = (0..f.cod().len()).find(|y| !hit.contains(y)) {
            return format!("{} is not reached", f.cod().name(y));
        }
    }
    "inverse is not continuous".into()
}

/// `(g, h) ↦ (h, g·h)` into `g1 ×_{s,s} g1`.
fn shear_source(g1: &Space, s: &Mor, comp: &FibreProduct, m: &Mor) -> Result<(Mor, FibreProduct)> {
    let target = fibre_product(s, s)?;
    for k in 0..comp.len() {
        let t = comp.tuple(k);
        if target.find(&[t[1], m.at(k)]).is_none() {
            return Err(Error::Invalid(format!(
                "s({}·{}) differs from s({})",
                g1.name(t[0]),
                g1.name(t[1]),
                g1.name(t[1])
            )));
        }
    }
    let f = Mor::from_fn(&comp.apex, &target.apex, |k| target.at(&[comp.tuple(k)[1], m.at(k)]))?;
    Ok((f, target))
}

/// `(g, h) ↦ (g, g·h)` into `g1 ×_{r,r} g1`.
fn shear_range(g1: &Space, r: &Mor, comp: &FibreProduct, m: &Mor) -> Result<(Mor, FibreProduct)> {
    let target = fibre_product(r, r)?;
    for k in 0..comp.len() {
        let t = comp.tuple(k);
        if target.find(&[t[0], m.at(k)]).is_none() {
            return Err(Error::Invalid(format!(
                "r({}·{}) differs from r({})",
                g1.name(t[0]),
                g1.name(t[1]),
                g1.name(t[0])
            )));
        }
    }
    let f = Mor::from_fn(&comp.apex, &target.apex, |k| target.at(&[comp.tuple(k)[0], m.at(k)]))?;
    Ok((f, target))
}

/// The Čech groupoid of a cover `p: X -> Y`: arrows are pairs with equal
/// image, `(x1, x2)·(x2, x3) = (x1, x3)`.
pub fn cech_groupoid(p: &Mor) -> Result<Grpd> {
    if !p.is_cover() {
        return Err(Error::NotACover(format!("{p}")));
    }
    let x = p.dom().clone();
    let kp = fibre_product(p, p)?;
    let g1 = kp.apex.clone();
    let u = Mor::from_fn(&x, &g1, |a| kp.at(&[a, a]))?;
    let i = Mor::from_fn(&g1, &g1, |k| {
        let t = kp.tuple(k);
        kp.at(&[t[1], t[0]])
    })?;
    let g = Groupoid::from_tables(
        x,
        g1,
        kp.pr1().clone(),
        kp.pr2().clone(),
        |a, b| kp.at(&[kp.tuple(a)[0], kp.tuple(b)[1]]),
        u,
        i,
    )?;
    Ok(Arc::new(g))
}

/// The pair groupoid on `x`, the Čech groupoid of `x -> point`.
pub fn pair_groupoid(x: &Space) -> Result<Grpd> {
    let pt = Obj::terminal(x.backend());
    cech_groupoid(&Mor::to_terminal(x, &pt)?)
}

/// Only identity arrows: `g1 = g0 = x`.
pub fn unit_groupoid(x: &Space) -> Grpd {
    let id = Mor::identity(x);
    let g = Groupoid::from_tables(x.clone(), x.clone(), id.clone(), id.clone(), |a, _| a, id.clone(), id)
        .expect("identity structure");
    Arc::new(g)
}

/// A group as a groupoid with one object `*`.
pub fn group<S: AsRef<str>>(backend: Backend, elements: &[S], mul: impl Fn(usize, usize) -> usize) -> Result<Grpd> {
    let pt = Obj::terminal(backend);
    let g1 = Obj::discrete(backend, elements)?;
    let to_pt = Mor::to_terminal(&g1, &pt)?;
    let comp = fibre_product(&to_pt, &to_pt)?;
    let m = comp.map_to(&g1, |t| mul(t[0], t[1]))?;
    Ok(Arc::new(Groupoid::from_multiplication(pt, g1, to_pt.clone(), to_pt, m)?))
}

/// The cyclic group of order `n` with elements `0..n`.
pub fn cyclic(backend: Backend, n: usize) -> Grpd {
    let names: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    group(backend, &names, |a, b| (a + b) % n).expect("cyclic group")
}

/// The pull-back groupoid along a cover `p: X -> G0`, with arrows
/// `(x1, g, x2)` and the hypercover functor back to `G`.
#[derive(Debug, Clone)]
pub struct Pullback {
    pub groupoid: Grpd,
    pub base: Grpd,
    pub cover: Mor,
    /// `X ×_{p,r} G1 ×_{s,p} X`.
    pub triples: FibreProduct,
    pub hyper: Functor,
}

pub fn pullback_groupoid(g: &Grpd, p: &Mor) -> Result<Pullback> {
    if !same(p.cod(), g.objects()) {
        return Err(Error::BoundaryMismatch("cover must land in the objects".into()));
    }
    if !p.is_cover() {
        return Err(Error::NotACover(format!("{p}")));
    }
    let p = p.recast(p.dom(), g.objects())?;
    let x = p.dom().clone();
    let tr = chain_product(&[(&p, g.range()), (g.source(), &p)])?;
    let a = tr.apex.clone();
    let u = Mor::from_fn(&x, &a, |k| tr.at(&[k, g.unit(p.at(k)), k]))?;
    let i = Mor::from_fn(&a, &a, |k| {
        let t = tr.tuple(k);
        tr.at(&[t[2], g.inv(t[1]), t[0]])
    })?;
    let pulled = Groupoid::from_tables(
        x,
        a,
        tr.leg(0).clone(),
        tr.leg(2).clone(),
        |k, l| {
            let (t1, t2) = (tr.tuple(k), tr.tuple(l));
            tr.at(&[t1[0], g.mul(t1[1], t2[1]), t2[2]])
        },
        u,
        i,
    )?;
    let pulled = Arc::new(pulled);
    let hyper = Functor::new(&pulled, g, p.clone(), tr.leg(1).clone())?;
    Ok(Pullback { groupoid: pulled, base: g.clone(), cover: p, triples: tr, hyper })
}

impl Pullback {
    /// Index of the arrow `(x1, g, x2)`.
    pub fn arrow(&self, x1: usize, g: usize, x2: usize) -> usize {
        self.triples.at(&[x1, g, x2])
    }

    pub fn find(&self, x1: usize, g: usize, x2: usize) -> Option<usize> {
        self.triples.find(&[x1, g, x2])
    }

    pub fn triple(&self, k: usize) -> (usize, usize, usize) {
        let t = self.triples.tuple(k);
        (t[0], t[1], t[2])
    }
}
