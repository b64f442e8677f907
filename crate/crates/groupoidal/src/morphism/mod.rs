//! Functors and natural transformations between internal groupoids,
//! bisections, and the anafunctor bicategory.

use std::collections::HashMap;

use itertools::Itertools;
use petgraph::unionfind::UnionFind;

use crate::backends::all_maps;
use crate::error::{Error, Result};
use crate::groupoid::{same_grpd, Grpd};
use crate::report::Report;
use crate::site::{chain_product, fibre_product, fit, FibreProduct, Mor};

mod ana;
mod search;

pub use ana::*;
pub use search::*;

/// A functor `src -> dst`: maps `f0` on objects and `f1` on arrows.
#[derive(Debug, Clone)]
pub struct Functor {
    src: Grpd,
    dst: Grpd,
    f0: Mor,
    f1: Mor,
}

impl Functor {
    /// Checks only that the maps have the right ends. See [`Functor::validate`].
    pub fn new(src: &Grpd, dst: &Grpd, f0: Mor, f1: Mor) -> Result<Functor> {
        let f0 = fit(&f0, src.objects(), dst.objects(), "object map")?;
        let f1 = fit(&f1, src.arrows(), dst.arrows(), "arrow map")?;
        Ok(Functor { src: src.clone(), dst: dst.clone(), f0, f1 })
    }

    pub fn from_tables(src: &Grpd, dst: &Grpd, t0: Vec<usize>, t1: Vec<usize>) -> Result<Functor> {
        let f0 = Mor::new(src.objects(), dst.objects(), t0)?;
        let f1 = Mor::new(src.arrows(), dst.arrows(), t1)?;
        Ok(Functor { src: src.clone(), dst: dst.clone(), f0, f1 })
    }

    pub fn identity(g: &Grpd) -> Functor {
        Functor { src: g.clone(), dst: g.clone(), f0: Mor::identity(g.objects()), f1: Mor::identity(g.arrows()) }
    }

    pub fn src(&self) -> &Grpd {
        &self.src
    }

    pub fn dst(&self) -> &Grpd {
        &self.dst
    }

    pub fn f0(&self) -> &Mor {
        &self.f0
    }

    pub fn f1(&self) -> &Mor {
        &self.f1
    }

    #[inline]
    pub fn obj(&self, x: usize) -> usize {
        self.f0.at(x)
    }

    #[inline]
    pub fn arr(&self, g: usize) -> usize {
        self.f1.at(g)
    }

    pub fn validate(&self) -> Report {
        let (g, h) = (&self.src, &self.dst);
        let n = |a: usize| g.arrow_name(a).to_string();
        let mut rep = Report::new();
        rep.record(
            "range",
            "r(F(g)) = F(r(g))",
            (0..g.len1()).find(|&a| h.r(self.arr(a)) != self.obj(g.r(a))).map(n),
        );
        rep.record(
            "source",
            "s(F(g)) = F(s(g))",
            (0..g.len1()).find(|&a| h.s(self.arr(a)) != self.obj(g.s(a))).map(n),
        );
        rep.record(
            "multiplicative",
            "F(g1·g2) = F(g1)·F(g2)",
            g.composable()
                .tuples()
                .iter()
                .find(|t| h.try_mul(self.arr(t[0]), self.arr(t[1])) != Some(self.arr(g.mul(t[0], t[1]))))
                .map(|t| format!("({}, {})", n(t[0]), n(t[1]))),
        );
        rep.record(
            "unital",
            "F(1_x) = 1_F(x)",
            (0..g.len0())
                .find(|&x| self.arr(g.unit(x)) != h.unit(self.obj(x)))
                .map(|x| g.object_name(x).to_string()),
        );
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    /// Same groupoids and the same maps.
    pub fn same_as(&self, other: &Functor) -> bool {
        same_grpd(&self.src, &other.src) && same_grpd(&self.dst, &other.dst) && self.f0 == other.f0 && self.f1 == other.f1
    }

    pub fn is_isomorphism(&self) -> bool {
        self.f0.is_iso() && self.f1.is_iso()
    }

    pub fn inverse(&self) -> Option<Functor> {
        Some(Functor { src: self.dst.clone(), dst: self.src.clone(), f0: self.f0.inverse()?, f1: self.f1.inverse()? })
    }

    /// The map `G0 ×_{F0,H0,r} H1 -> H0, (x, h) ↦ s(h)`; `F` is essentially
    /// surjective when it is a cover.
    pub fn essential_surjectivity_map(&self) -> Result<(FibreProduct, Mor)> {
        let fp = fibre_product(&self.f0, self.dst.range())?;
        let m = fp.map_to(self.dst.objects(), |t| self.dst.s(t[1]))?;
        Ok((fp, m))
    }

    /// The map `G1 -> G0 ×_{F0,H0,r} H1 ×_{s,H0,F0} G0, g ↦ (r(g), F(g), s(g))`;
    /// `F` is fully faithful when it is an isomorphism.
    pub fn full_faithfulness_map(&self) -> Result<(FibreProduct, Mor)> {
        let fp = chain_product(&[(&self.f0, self.dst.range()), (self.dst.source(), &self.f0)])?;
        let mut table = Vec::with_capacity(self.src.len1());
        for g in 0..self.src.len1() {
            match fp.find(&[self.src.r(g), self.arr(g), self.src.s(g)]) {
                Some(k) => table.push(k),
                None => return Err(Error::Invalid(format!("{} is sent to an arrow with other ends", self.src.arrow_name(g)))),
            }
        }
        let m = Mor::new(self.src.arrows(), &fp.apex, table)?;
        Ok((fp, m))
    }

    pub fn is_essentially_surjective(&self) -> bool {
        self.essential_surjectivity_map().map(|(_, m)| m.is_cover()).unwrap_or(false)
    }

    pub fn is_fully_faithful(&self) -> bool {
        self.full_faithfulness_map().map(|(_, m)| m.is_iso()).unwrap_or(false)
    }
}

/// `f2 ∘ f1`.
pub fn compose_functors(f2: &Functor, f1: &Functor) -> Result<Functor> {
    if !same_grpd(&f1.dst, &f2.src) {
        return Err(Error::BoundaryMismatch("the first functor does not land where the second starts".into()));
    }
    Ok(Functor {
        src: f1.src.clone(),
        dst: f2.dst.clone(),
        f0: f2.f0.after(&f1.f0)?,
        f1: f2.f1.after(&f1.f1)?,
    })
}

/// A natural transformation `from ⇒ to` given by `phi: G0 -> H1`.
#[derive(Debug, Clone)]
pub struct NatTrans {
    from: Functor,
    to: Functor,
    phi: Mor,
}

impl NatTrans {
    pub fn new(from: &Functor, to: &Functor, phi: Mor) -> Result<NatTrans> {
        if !same_grpd(&from.src, &to.src) || !same_grpd(&from.dst, &to.dst) {
            return Err(Error::BoundaryMismatch("functors are not parallel".into()));
        }
        let phi = fit(&phi, from.src.objects(), from.dst.arrows(), "transformation")?;
        Ok(NatTrans { from: from.clone(), to: to.clone(), phi })
    }

    pub fn from_fn(from: &Functor, to: &Functor, f: impl Fn(usize) -> usize) -> Result<NatTrans> {
        let phi = Mor::from_fn(from.src.objects(), from.dst.arrows(), f)?;
        NatTrans::new(from, to, phi)
    }

    pub fn identity(f: &Functor) -> NatTrans {
        let phi = Mor::from_fn(f.src.objects(), f.dst.arrows(), |x| f.dst.unit(f.obj(x))).expect("unit composite");
        NatTrans { from: f.clone(), to: f.clone(), phi }
    }

    pub fn from(&self) -> &Functor {
        &self.from
    }

    pub fn to(&self) -> &Functor {
        &self.to
    }

    pub fn phi(&self) -> &Mor {
        &self.phi
    }

    #[inline]
    pub fn at(&self, x: usize) -> usize {
        self.phi.at(x)
    }

    pub fn validate(&self) -> Report {
        let (g, h) = (&self.from.src, &self.from.dst);
        let mut rep = Report::new();
        let on = |x: usize| g.object_name(x).to_string();
        rep.record(
            "source",
            "s(Φ(x)) = F1(x)",
            (0..g.len0()).find(|&x| h.s(self.at(x)) != self.from.obj(x)).map(on),
        );
        rep.record(
            "range",
            "r(Φ(x)) = F2(x)",
            (0..g.len0()).find(|&x| h.r(self.at(x)) != self.to.obj(x)).map(on),
        );
        rep.record(
            "natural",
            "Φ(r(g))·F1(g) = F2(g)·Φ(s(g))",
            (0..g.len1())
                .find(|&a| {
                    let lhs = h.try_mul(self.at(g.r(a)), self.from.arr(a));
                    let rhs = h.try_mul(self.to.arr(a), self.at(g.s(a)));
                    lhs.is_none() || lhs != rhs
                })
                .map(|a| g.arrow_name(a).to_string()),
        );
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    /// `Φ⁻¹ = i ∘ Φ`, a transformation `to ⇒ from`.
    pub fn inverse(&self) -> NatTrans {
        let h = &self.from.dst;
        let phi = self.phi.clone();
        let inv = h.inverse_map().after(&phi).expect("inverse composite");
        NatTrans { from: self.to.clone(), to: self.from.clone(), phi: inv }
    }

    pub fn same_as(&self, other: &NatTrans) -> bool {
        self.from.same_as(&other.from) && self.to.same_as(&other.to) && self.phi == other.phi
    }
}

/// `(Ψ · Φ)(x) = Ψ(x) · Φ(x)` for `Φ: F1 ⇒ F2` and `Ψ: F2 ⇒ F3`.
pub fn vertical(psi: &NatTrans, phi: &NatTrans) -> Result<NatTrans> {
    if !phi.to.same_as(&psi.from) {
        return Err(Error::NotComposable("vertical product needs matching middle functors".into()));
    }
    let h = &phi.from.dst;
    NatTrans::from_fn(&phi.from, &psi.to, |x| h.mul(psi.at(x), phi.at(x)))
}

/// `(Ψ ∘ Φ)(x) = Ψ(F1'(x)) · F2(Φ(x))` for `Φ: F1 ⇒ F1': G -> H` and
/// `Ψ: F2 ⇒ F2': H -> K`, a transformation `F2 F1 ⇒ F2' F1'`.
pub fn horizontal(psi: &NatTrans, phi: &NatTrans) -> Result<NatTrans> {
    if !same_grpd(&phi.from.dst, &psi.from.src) {
        return Err(Error::NotComposable("horizontal product needs the first target to be the second source".into()));
    }
    let k = &psi.from.dst;
    let from = compose_functors(&psi.from, &phi.from)?;
    let to = compose_functors(&psi.to, &phi.to)?;
    NatTrans::from_fn(&from, &to, |x| k.mul(psi.at(phi.to.obj(x)), psi.from.arr(phi.at(x))))
}

/// Whether `phi` is a section of the source map, whether it is a
/// bisection, and the inner endomorphism it induces.
#[derive(Debug, Clone)]
pub struct AdResult {
    pub is_section: bool,
    pub is_bisection: bool,
    pub ad: Option<Functor>,
}

fn check_section(g: &Grpd, phi: &Mor) -> Result<Mor> {
    let phi = fit(phi, g.objects(), g.arrows(), "section")?;
    if let Some(x) = (0..g.len0()).find(|&x| g.s(phi.at(x)) != x) {
        return Err(Error::NotASection(format!("s(Φ({0})) is not {0}", g.object_name(x))));
    }
    Ok(phi)
}

pub fn ad_bisection(g: &Grpd, phi: &Mor) -> Result<AdResult> {
    fit(phi, g.objects(), g.arrows(), "section")?;
    match ad(g, phi) {
        Ok(f) => {
            let is_bisection = f.f0.is_iso();
            Ok(AdResult { is_section: true, is_bisection, ad: Some(f) })
        }
        Err(Error::NotASection(_)) => Ok(AdResult { is_section: false, is_bisection: false, ad: None }),
        Err(e) => Err(e),
    }
}

/// `Ad(Φ)`: objects by `r ∘ Φ`, arrows by `g ↦ Φ(r(g)) · g · Φ(s(g))⁻¹`.
pub fn ad(g: &Grpd, phi: &Mor) -> Result<Functor> {
    let phi = check_section(g, phi)?;
    let f0 = g.range().after(&phi)?;
    let f1 = Mor::from_fn(g.arrows(), g.arrows(), |a| {
        g.mul(g.mul(phi.at(g.r(a)), a), g.inv(phi.at(g.s(a))))
    })?;
    Functor::new(g, g, f0, f1)
}

/// `Φ` as a transformation from the identity functor to `Ad(Φ)`.
pub fn section_as_transformation(g: &Grpd, phi: &Mor) -> Result<NatTrans> {
    let f = ad(g, phi)?;
    NatTrans::new(&Functor::identity(g), &f, phi.clone())
}

/// `(Φ1 ∘ Φ2)(x) = Φ1(r(Φ2(x))) · Φ2(x)`.
pub fn section_product(g: &Grpd, phi1: &Mor, phi2: &Mor) -> Result<Mor> {
    let phi1 = check_section(g, phi1)?;
    let phi2 = check_section(g, phi2)?;
    Mor::from_fn(g.objects(), g.arrows(), |x| g.mul(phi1.at(g.r(phi2.at(x))), phi2.at(x)))
}

/// The inverse of a bisection for the section product:
/// `x ↦ Φ(α⁻¹(x))⁻¹` with `α = r ∘ Φ`.
pub fn bisection_inverse(g: &Grpd, phi: &Mor) -> Result<Mor> {
    let phi = check_section(g, phi)?;
    let alpha = g.range().after(&phi)?;
    let back = alpha
        .inverse()
        .ok_or_else(|| Error::Invalid("r ∘ Φ is not invertible, so Φ is not a bisection".into()))?;
    Mor::from_fn(g.objects(), g.arrows(), |x| g.inv(phi.at(back.at(x))))
}

/// Every section of the source map.
pub fn all_sections(g: &Grpd) -> Vec<Mor> {
    let choices: Vec<Vec<usize>> =
        (0..g.len0()).map(|x| (0..g.len1()).filter(|&a| g.s(a) == x).collect()).collect();
    if choices.is_empty() {
        return Mor::new(g.objects(), g.arrows(), vec![]).into_iter().collect();
    }
    choices
        .iter()
        .map(|c| c.iter().copied())
        .multi_cartesian_product()
        .filter_map(|t| Mor::new(g.objects(), g.arrows(), t).ok())
        .collect()
}

/// `F • Φ = 1_F ∘ Φ ∘ 1_{F⁻¹}` for an automorphism `F`, computed through the
/// horizontal product.
pub fn conjugate_section(f: &Functor, phi: &Mor) -> Result<Mor> {
    let g = &f.src;
    if !same_grpd(g, &f.dst) {
        return Err(Error::BoundaryMismatch("conjugation needs an endofunctor".into()));
    }
    let finv = f.inverse().ok_or_else(|| Error::Invalid("conjugation needs an automorphism".into()))?;
    let t = section_as_transformation(g, phi)?;
    let left = horizontal(&NatTrans::identity(f), &t)?;
    let both = horizontal(&left, &NatTrans::identity(&finv))?;
    Ok(both.phi)
}

fn arrow_constraints(g: &Grpd) -> Vec<Vec<(usize, usize, usize)>> {
    // (a, b, a·b) filed under the largest index, so it is checked as soon as
    // all three are assigned
    let mut by_last = vec![Vec::new(); g.len1()];
    for t in g.composable().tuples() {
        let c = g.mul(t[0], t[1]);
        let last = t[0].max(t[1]).max(c);
        by_last[last].push((t[0], t[1], c));
    }
    by_last
}

/// Arrow maps compatible with a fixed object map `f0`.
fn functors_over(src: &Grpd, dst: &Grpd, f0: &Mor, cons: &[Vec<(usize, usize, usize)>], out: &mut Vec<Functor>, limit: usize) {
    let n = src.len1();
    let mut units = HashMap::new();
    for x in 0..src.len0() {
        units.insert(src.unit(x), dst.unit(f0.at(x)));
    }
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|a| match units.get(&a) {
            Some(&u) => vec![u],
            None => dst.hom(f0.at(src.s(a)), f0.at(src.r(a))).to_vec(),
        })
        .collect();
    let mut cur = vec![usize::MAX; n];
    fn go(
        k: usize,
        cur: &mut Vec<usize>,
        cands: &[Vec<usize>],
        cons: &[Vec<(usize, usize, usize)>],
        dst: &Grpd,
        emit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if k == cands.len() {
            return emit(cur);
        }
        for &c in &cands[k] {
            cur[k] = c;
            let ok = cons[k].iter().all(|&(a, b, p)| dst.try_mul(cur[a], cur[b]) == Some(cur[p]));
            if ok && !go(k + 1, cur, cands, cons, dst, emit) {
                return false;
            }
        }
        cur[k] = usize::MAX;
        true
    }
    let mut emit = |t: &[usize]| {
        if let Ok(f1) = Mor::new(src.arrows(), dst.arrows(), t.to_vec()) {
            out.push(Functor { src: src.clone(), dst: dst.clone(), f0: f0.clone(), f1 });
        }
        out.len() < limit
    };
    go(0, &mut cur, &cands, cons, dst, &mut emit);
}

/// Every functor `src -> dst`, found by backtracking over arrow images with
/// the multiplication constraints checked as soon as they are determined.
pub fn all_functors(src: &Grpd, dst: &Grpd) -> Vec<Functor> {
    let cons = arrow_constraints(src);
    let mut out = Vec::new();
    for f0 in all_maps(src.objects(), dst.objects()) {
        functors_over(src, dst, &f0, &cons, &mut out, usize::MAX);
    }
    out
}

/// Every functor `src -> dst` with the given object map.
pub fn functors_with_objects(src: &Grpd, dst: &Grpd, f0: &Mor) -> Result<Vec<Functor>> {
    let f0 = fit(f0, src.objects(), dst.objects(), "object map")?;
    let cons = arrow_constraints(src);
    let mut out = Vec::new();
    functors_over(src, dst, &f0, &cons, &mut out, usize::MAX);
    Ok(out)
}

/// Connected components of the objects, each with a path from its first
/// object: `(root, [(object, arrow from root to object)])`.
fn components(g: &Grpd) -> Vec<(usize, Vec<(usize, usize)>)> {
    let mut uf = UnionFind::<usize>::new(g.len0());
    for a in 0..g.len1() {
        uf.union(g.s(a), g.r(a));
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for x in 0..g.len0() {
        let r = uf.find(x);
        if !members.contains_key(&r) {
            roots.push(r);
        }
        members.entry(r).or_default().push(x);
    }
    roots
        .into_iter()
        .map(|r| {
            let ms = &members[&r];
            let root = ms[0];
            // groupoid components are complete: some arrow root -> y exists
            let paths = ms.iter().map(|&y| (y, g.hom(root, y)[0])).collect();
            (root, paths)
        })
        .collect()
}

/// Per component, the candidate transformation values on its objects.
fn component_candidates(f1: &Functor, f2: &Functor) -> Vec<(Vec<usize>, Vec<Vec<usize>>)> {
    let (g, h) = (&f1.src, &f1.dst);
    let mut per_arrow_by_comp: HashMap<usize, Vec<usize>> = HashMap::new();
    let comps = components(g);
    let mut comp_of = vec![0; g.len0()];
    for (c, (_, paths)) in comps.iter().enumerate() {
        for &(y, _) in paths {
            comp_of[y] = c;
        }
    }
    for a in 0..g.len1() {
        per_arrow_by_comp.entry(comp_of[g.s(a)]).or_default().push(a);
    }
    comps
        .iter()
        .enumerate()
        .map(|(c, (root, paths))| {
            let objs: Vec<usize> = paths.iter().map(|&(y, _)| y).collect();
            let mut sols = Vec::new();
            for &c0 in h.hom(f1.obj(*root), f2.obj(*root)) {
                // Φ(y) = F2(a) · Φ(root) · F1(a)⁻¹ for a: root -> y
                let vals: Option<Vec<usize>> = paths
                    .iter()
                    .map(|&(_, a)| h.try_mul(h.try_mul(f2.arr(a), c0)?, h.inv(f1.arr(a))))
                    .collect();
                let Some(vals) = vals else { continue };
                let at = |x: usize| vals[objs.iter().position(|&o| o == x).expect("member")];
                let natural = per_arrow_by_comp.get(&c).into_iter().flatten().all(|&a| {
                    let lhs = h.try_mul(at(g.r(a)), f1.arr(a));
                    lhs.is_some() && lhs == h.try_mul(f2.arr(a), at(g.s(a)))
                });
                if natural {
                    sols.push(vals);
                }
            }
            (objs, sols)
        })
        .collect()
}

fn assemble(f1: &Functor, f2: &Functor, comps: &[(Vec<usize>, Vec<Vec<usize>>)], pick: &[&Vec<usize>]) -> Option<NatTrans> {
    let mut t = vec![0; f1.src.len0()];
    for ((objs, _), vals) in comps.iter().zip(pick) {
        for (&x, &v) in objs.iter().zip(vals.iter()) {
            t[x] = v;
        }
    }
    let phi = Mor::new(f1.src.objects(), f1.dst.arrows(), t).ok()?;
    Some(NatTrans { from: f1.clone(), to: f2.clone(), phi })
}

/// Every natural transformation `f1 ⇒ f2`. On each connected component the
/// value at one object determines the rest.
pub fn all_nat_trans(f1: &Functor, f2: &Functor) -> Vec<NatTrans> {
    if !same_grpd(&f1.src, &f2.src) || !same_grpd(&f1.dst, &f2.dst) {
        return Vec::new();
    }
    let comps = component_candidates(f1, f2);
    if comps.is_empty() {
        return assemble(f1, f2, &comps, &[]).into_iter().collect();
    }
    comps
        .iter()
        .map(|(_, sols)| sols.iter())
        .multi_cartesian_product()
        .filter_map(|pick| assemble(f1, f2, &comps, &pick))
        .collect()
}

/// Some natural transformation `f1 ⇒ f2`, if there is one.
pub fn find_nat_trans(f1: &Functor, f2: &Functor) -> Option<NatTrans> {
    if !same_grpd(&f1.src, &f2.src) || !same_grpd(&f1.dst, &f2.dst) {
        return None;
    }
    let comps = component_candidates(f1, f2);
    if comps.is_empty() {
        return assemble(f1, f2, &comps, &[]);
    }
    if comps.iter().any(|(_, sols)| sols.is_empty()) {
        return None;
    }
    comps
        .iter()
        .map(|(_, sols)| sols.iter())
        .multi_cartesian_product()
        .find_map(|pick| assemble(f1, f2, &comps, &pick))
}
