//! Anafunctors `(X, p, F)`, their transformations, composition and coherence
//! isomorphisms, and the weak-equivalence test with its lift.

use crate::error::{Error, Result};
use crate::groupoid::{pullback_groupoid, same_grpd, Grpd, Pullback};
use crate::report::Report;
use crate::site::{chain_product, factor_through, fibre_product, fit, same, FibreProduct, Mor, Space};

use super::{compose_functors, find_nat_trans, Functor, NatTrans};

/// A cover `p: X -> G0` together with a functor `F: G(X) -> H`.
#[derive(Debug, Clone)]
pub struct Anafunctor {
    pulled: Pullback,
    functor: Functor,
}

impl Anafunctor {
    pub fn new(pulled: Pullback, functor: Functor) -> Result<Anafunctor> {
        if !same_grpd(functor.src(), &pulled.groupoid) {
            return Err(Error::BoundaryMismatch("functor must start at the pulled-back groupoid".into()));
        }
        Ok(Anafunctor { pulled, functor })
    }

    /// Builds `G(X)` from the cover and the functor from a formula on
    /// arrows `(x1, g, x2)`.
    pub fn from_maps(
        src: &Grpd,
        dst: &Grpd,
        p: &Mor,
        f0: &Mor,
        f1: impl Fn(usize, usize, usize) -> usize,
    ) -> Result<Anafunctor> {
        let pulled = pullback_groupoid(src, p)?;
        let f1 = pulled.triples.map_to(dst.arrows(), |t| f1(t[0], t[1], t[2]))?;
        let f0 = fit(f0, pulled.groupoid.objects(), dst.objects(), "object map")?;
        let functor = Functor::new(&pulled.groupoid, dst, f0, f1)?;
        Anafunctor::new(pulled, functor)
    }

    /// `(G0, id, F)`.
    pub fn from_functor(f: &Functor) -> Result<Anafunctor> {
        let pulled = pullback_groupoid(f.src(), &Mor::identity(f.src().objects()))?;
        let functor = compose_functors(f, &pulled.hyper)?;
        Anafunctor::new(pulled, functor)
    }

    pub fn identity(g: &Grpd) -> Anafunctor {
        Anafunctor::from_functor(&Functor::identity(g)).expect("identity anafunctor")
    }

    /// The hypercover `p_*: G(X) -> G` as an anafunctor.
    pub fn hypercover(g: &Grpd, p: &Mor) -> Result<Anafunctor> {
        let pulled = pullback_groupoid(g, p)?;
        Anafunctor::from_functor(&pulled.hyper)
    }

    /// `(X, p, id)` from `G` to `G(X)`, the quasi-inverse of the hypercover.
    pub fn hypercover_inverse(g: &Grpd, p: &Mor) -> Result<Anafunctor> {
        let pulled = pullback_groupoid(g, p)?;
        let id = Functor::identity(&pulled.groupoid);
        Anafunctor::new(pulled, id)
    }

    pub fn src(&self) -> &Grpd {
        &self.pulled.base
    }

    pub fn dst(&self) -> &Grpd {
        self.functor.dst()
    }

    pub fn carrier(&self) -> &Space {
        self.pulled.groupoid.objects()
    }

    pub fn cover(&self) -> &Mor {
        &self.pulled.cover
    }

    pub fn functor(&self) -> &Functor {
        &self.functor
    }

    pub fn pullback(&self) -> &Pullback {
        &self.pulled
    }

    #[inline]
    pub fn p(&self, x: usize) -> usize {
        self.pulled.cover.at(x)
    }

    #[inline]
    pub fn obj(&self, x: usize) -> usize {
        self.functor.obj(x)
    }

    /// `F(x1, g, x2)`; needs `p(x1) = r(g)` and `s(g) = p(x2)`.
    #[inline]
    pub fn arr(&self, x1: usize, g: usize, x2: usize) -> usize {
        self.functor.arr(self.pulled.arrow(x1, g, x2))
    }

    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        rep.record("cover", "p is a cover", (!self.cover().is_cover()).then(|| format!("p = {}", self.cover())));
        rep.extend("functor", self.functor.validate());
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }
}

/// The functor `φ_*: G(X1) -> G(X2)`, `(x1, g, x2) ↦ (φ(x1), g, φ(x2))`, for
/// `φ` over `G0`.
pub fn induced_functor(from: &Pullback, to: &Pullback, phi: &Mor) -> Result<Functor> {
    if !same_grpd(&from.base, &to.base) {
        return Err(Error::BoundaryMismatch("pull-backs of different groupoids".into()));
    }
    let phi = fit(phi, from.groupoid.objects(), to.groupoid.objects(), "map of covers")?;
    if to.cover.after(&phi)? != from.cover {
        return Err(Error::BoundaryMismatch("map does not commute with the covers".into()));
    }
    let f1 = from.triples.map_to(to.groupoid.arrows(), |t| to.arrow(phi.at(t[0]), t[1], phi.at(t[2])))?;
    Functor::new(&from.groupoid, &to.groupoid, phi, f1)
}

/// A composite anafunctor together with its carrier `X12 ×_{F12, p23} X23`.
#[derive(Debug, Clone)]
pub struct AnaComposite {
    pub ana: Anafunctor,
    pub carrier: FibreProduct,
}

/// `b ∘ a`: first `a: G1 -> G2`, then `b: G2 -> G3`.
pub fn compose_anafunctors(b: &Anafunctor, a: &Anafunctor) -> Result<Anafunctor> {
    Ok(compose_anafunctors_with_carrier(b, a)?.ana)
}

pub fn compose_anafunctors_with_carrier(b: &Anafunctor, a: &Anafunctor) -> Result<AnaComposite> {
    if !same_grpd(a.dst(), b.src()) {
        return Err(Error::BoundaryMismatch("anafunctors are not composable".into()));
    }
    let x13 = fibre_product(a.functor.f0(), b.cover())?;
    let p13 = a.cover().after(x13.pr1())?;
    if !p13.is_cover() {
        return Err(Error::NotACover("composite cover".into()));
    }
    let pulled = pullback_groupoid(a.src(), &p13)?;
    let f0 = x13.map_to(b.dst().objects(), |t| b.obj(t[1]))?;
    let f1 = pulled.triples.map_to(b.dst().arrows(), |t| {
        let (u, v) = (x13.tuple(t[0]), x13.tuple(t[2]));
        b.arr(u[1], a.arr(u[0], t[1], v[0]), v[1])
    })?;
    let functor = Functor::new(&pulled.groupoid, b.dst(), f0, f1)?;
    Ok(AnaComposite { ana: Anafunctor::new(pulled, functor)?, carrier: x13 })
}

fn parallel(a: &Anafunctor, b: &Anafunctor) -> Result<()> {
    if !same_grpd(a.src(), b.src()) || !same_grpd(a.dst(), b.dst()) {
        return Err(Error::BoundaryMismatch("anafunctors are not parallel".into()));
    }
    Ok(())
}

/// Same groupoids, carrier, cover and functor tables.
pub fn same_anafunctor(a: &Anafunctor, b: &Anafunctor) -> bool {
    if !same_grpd(a.src(), b.src()) || !same_grpd(a.dst(), b.dst()) {
        return false;
    }
    if !same(a.carrier(), b.carrier()) || a.cover() != b.cover() || a.functor.f0() != b.functor.f0() {
        return false;
    }
    a.pulled.triples.tuples().iter().enumerate().all(|(k, t)| {
        let x1 = b.carrier().index_of(a.carrier().name(t[0])).expect("same carrier");
        let x2 = b.carrier().index_of(a.carrier().name(t[2])).expect("same carrier");
        b.arr(x1, t[1], x2) == a.functor.arr(k)
    })
}

/// A transformation between parallel anafunctors: `Φ: X1 ×_{G0} X2 -> H1`
/// natural from `F1 ∘ (pr1)_*` to `F2 ∘ (pr2)_*`.
#[derive(Debug, Clone)]
pub struct AnaNat {
    from: Anafunctor,
    to: Anafunctor,
    joint: FibreProduct,
    phi: Mor,
}

impl AnaNat {
    pub fn new(from: &Anafunctor, to: &Anafunctor, phi: Mor) -> Result<AnaNat> {
        parallel(from, to)?;
        let joint = fibre_product(from.cover(), to.cover())?;
        let phi = fit(&phi, &joint.apex, from.dst().arrows(), "transformation")?;
        Ok(AnaNat { from: from.clone(), to: to.clone(), joint, phi })
    }

    pub fn from_fn(from: &Anafunctor, to: &Anafunctor, f: impl Fn(usize, usize) -> usize) -> Result<AnaNat> {
        parallel(from, to)?;
        let joint = fibre_product(from.cover(), to.cover())?;
        let phi = joint.map_to(from.dst().arrows(), |t| f(t[0], t[1]))?;
        Ok(AnaNat { from: from.clone(), to: to.clone(), joint, phi })
    }

    /// The transformation of an isomorphism of anafunctors:
    /// `Φ(x1, x2) = F2(x2, 1, φ(x1))`.
    pub fn from_iso(iso: &AnaIso) -> AnaNat {
        let (to, map) = (&iso.to, &iso.map);
        AnaNat::from_fn(&iso.from, to, |x1, x2| to.arr(x2, to.src().unit(to.p(x2)), map.at(x1))).expect("iso transformation")
    }

    pub fn identity(a: &Anafunctor) -> AnaNat {
        AnaNat::from_iso(&AnaIso::identity(a))
    }

    pub fn from(&self) -> &Anafunctor {
        &self.from
    }

    pub fn to(&self) -> &Anafunctor {
        &self.to
    }

    pub fn joint(&self) -> &FibreProduct {
        &self.joint
    }

    pub fn phi(&self) -> &Mor {
        &self.phi
    }

    pub fn at(&self, x1: usize, x2: usize) -> usize {
        self.phi.at(self.joint.at(&[x1, x2]))
    }

    pub fn validate(&self) -> Report {
        let (g, h) = (self.from.src(), self.from.dst());
        let (a, b) = (&self.from, &self.to);
        let name = |k: usize| self.joint.apex.name(k).to_string();
        let mut rep = Report::new();
        rep.record(
            "source",
            "s(Φ(x1, x2)) = F1(x1)",
            (0..self.joint.len()).find(|&k| h.s(self.phi.at(k)) != a.obj(self.joint.tuple(k)[0])).map(name),
        );
        rep.record(
            "range",
            "r(Φ(x1, x2)) = F2(x2)",
            (0..self.joint.len()).find(|&k| h.r(self.phi.at(k)) != b.obj(self.joint.tuple(k)[1])).map(name),
        );
        let mut bad = None;
        'outer: for (k, t) in self.joint.tuples().iter().enumerate() {
            for (l, u) in self.joint.tuples().iter().enumerate() {
                for &e in g.hom(a.p(u[0]), a.p(t[0])) {
                    let lhs = h.try_mul(self.phi.at(k), a.arr(t[0], e, u[0]));
                    let rhs = h.try_mul(b.arr(t[1], e, u[1]), self.phi.at(l));
                    if lhs.is_none() || lhs != rhs {
                        bad = Some(format!("{} to {} along {}", name(l), name(k), g.arrow_name(e)));
                        break 'outer;
                    }
                }
            }
        }
        rep.record("natural", "Φ(x1, x2)·F1(x1, g, x3) = F2(x2, g, x4)·Φ(x3, x4)", bad);
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    /// `Φ⁻¹(x2, x1) = Φ(x1, x2)⁻¹`.
    pub fn inverse(&self) -> AnaNat {
        let h = self.from.dst();
        AnaNat::from_fn(&self.to, &self.from, |x2, x1| h.inv(self.at(x1, x2))).expect("inverse transformation")
    }

    pub fn same_as(&self, other: &AnaNat) -> bool {
        same_anafunctor(&self.from, &other.from) && same_anafunctor(&self.to, &other.to) && self.phi == other.phi
    }
}

/// The transformation `F1 ⇒ F2` whose pull-back along the hypercover is
/// `psi: F1 ∘ p_* ⇒ F2 ∘ p_*`, given as a map `X -> H1`.
pub fn descend_nat(psi: &Mor, pulled: &Pullback, f1: &Functor, f2: &Functor) -> Result<NatTrans> {
    let up1 = compose_functors(f1, &pulled.hyper)?;
    let up2 = compose_functors(f2, &pulled.hyper)?;
    let t = NatTrans::new(&up1, &up2, psi.clone())?;
    if let Some(bad) = t.validate().failures().first() {
        return Err(Error::Invalid(format!("not natural on the pull-back: {} {}", bad.check, bad.witness.clone().unwrap_or_default())));
    }
    let phi = factor_through(&pulled.cover, t.phi())?;
    NatTrans::new(f1, f2, phi)
}

/// `(Ψ · Φ)`: `Ψ(x2, x3) · Φ(x1, x2)` on the triple fibre product,
/// descended to `X1 ×_{G0} X3`.
pub fn ana_vertical(psi: &AnaNat, phi: &AnaNat) -> Result<AnaNat> {
    if !same_anafunctor(&phi.to, &psi.from) {
        return Err(Error::NotComposable("vertical product needs matching middle anafunctors".into()));
    }
    let h = phi.from.dst();
    let (a1, a2, a3) = (&phi.from, &phi.to, &psi.to);
    let triple = chain_product(&[(a1.cover(), a2.cover()), (a2.cover(), a3.cover())])?;
    let joint13 = fibre_product(a1.cover(), a3.cover())?;
    let big = triple.map_to(h.arrows(), |t| h.mul(psi.at(t[1], t[2]), phi.at(t[0], t[1])))?;
    let pr13 = triple.map_to(&joint13.apex, |t| joint13.at(&[t[0], t[2]]))?;
    let down = factor_through(&pr13, &big)?;
    AnaNat::new(a1, a3, down)
}

/// The horizontal product of `Φ: A1 ⇒ A2: G -> H` and `Ψ: B1 ⇒ B2: H -> K`,
/// a transformation `B1 ∘ A1 ⇒ B2 ∘ A2`. At `((x1, y1), (x2, y2))` it is
/// `E2(y2, Φ(x1, x2), y) · Ψ(y1, y)` for any `y` over `F1(x1)`; the value
/// must not depend on `y`.
pub fn ana_horizontal(psi: &AnaNat, phi: &AnaNat) -> Result<AnaNat> {
    if !same_grpd(phi.from.dst(), psi.from.src()) {
        return Err(Error::NotComposable("horizontal product needs the first target to be the second source".into()));
    }
    let k = psi.from.dst();
    let c1 = compose_anafunctors_with_carrier(&psi.from, &phi.from)?;
    let c2 = compose_anafunctors_with_carrier(&psi.to, &phi.to)?;
    let joint = fibre_product(c1.ana.cover(), c2.ana.cover())?;
    let (b2, q2) = (&psi.to, psi.to.cover());
    let mut table = Vec::with_capacity(joint.len());
    for t in joint.tuples() {
        let (u, v) = (c1.carrier.tuple(t[0]), c2.carrier.tuple(t[1]));
        let (x1, y1, x2, y2) = (u[0], u[1], v[0], v[1]);
        let mid = phi.at(x1, x2);
        let base = phi.from.obj(x1);
        let mut value = None;
        for y in (0..q2.dom().len()).filter(|&y| q2.at(y) == base) {
            let here = k.mul(b2.arr(y2, mid, y), psi.at(y1, y));
            match value {
                None => value = Some(here),
                Some(v) if v != here => {
                    return Err(Error::NotFibrewiseConstant(format!(
                        "horizontal product at {} depends on the auxiliary point",
                        joint.apex.name(table.len())
                    )))
                }
                Some(_) => {}
            }
        }
        table.push(value.ok_or_else(|| Error::NotACover("second cover misses a point".into()))?);
    }
    let phi_map = Mor::new(&joint.apex, k.arrows(), table)?;
    AnaNat::new(&c1.ana, &c2.ana, phi_map)
}

/// An isomorphism of anafunctors: `φ: X1 -> X2` invertible with
/// `p2 ∘ φ = p1` and `F2 ∘ φ_* = F1`.
#[derive(Debug, Clone)]
pub struct AnaIso {
    pub from: Anafunctor,
    pub to: Anafunctor,
    pub map: Mor,
}

impl AnaIso {
    pub fn new(from: &Anafunctor, to: &Anafunctor, map: Mor) -> Result<AnaIso> {
        parallel(from, to)?;
        let map = fit(&map, from.carrier(), to.carrier(), "carrier map")?;
        if !map.is_iso() {
            return Err(Error::Invalid(format!("carrier map {map} is not invertible")));
        }
        let star = induced_functor(&from.pulled, &to.pulled, &map)?;
        let pushed = compose_functors(&to.functor, &star)?;
        if pushed.f0() != from.functor.f0() || pushed.f1() != from.functor.f1() {
            return Err(Error::Invalid("carrier map does not intertwine the functors".into()));
        }
        Ok(AnaIso { from: from.clone(), to: to.clone(), map })
    }

    pub fn identity(a: &Anafunctor) -> AnaIso {
        AnaIso { from: a.clone(), to: a.clone(), map: Mor::identity(a.carrier()) }
    }

    pub fn inverse(&self) -> AnaIso {
        AnaIso { from: self.to.clone(), to: self.from.clone(), map: self.map.inverse().expect("iso") }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &AnaIso) -> Result<AnaIso> {
        if !same_anafunctor(&self.to, &next.from) {
            return Err(Error::NotComposable("isomorphisms do not meet".into()));
        }
        let map = next.map.after(&self.map)?;
        Ok(AnaIso { from: self.from.clone(), to: next.to.clone(), map })
    }

    pub fn to_nat(&self) -> AnaNat {
        AnaNat::from_iso(self)
    }
}

/// `id ∘ a ≅ a` through `(x, y) ↦ x` on `X ×_{F0, H0, id} H0`.
pub fn left_unitor(a: &Anafunctor) -> Result<AnaIso> {
    let c = compose_anafunctors_with_carrier(&Anafunctor::identity(a.dst()), a)?;
    let map = c.carrier.pr1().clone();
    AnaIso::new(&c.ana, a, map)
}

/// `a ∘ id ≅ a` through `(x, y) ↦ y` on `G0 ×_{id, G0, p} X`.
pub fn right_unitor(a: &Anafunctor) -> Result<AnaIso> {
    let c = compose_anafunctors_with_carrier(a, &Anafunctor::identity(a.src()))?;
    let map = c.carrier.pr2().clone();
    AnaIso::new(&c.ana, a, map)
}

/// `c ∘ (b ∘ a) ≅ (c ∘ b) ∘ a` through `((x, y), z) ↦ (x, (y, z))`.
pub fn ana_associator(c: &Anafunctor, b: &Anafunctor, a: &Anafunctor) -> Result<AnaIso> {
    let ba = compose_anafunctors_with_carrier(b, a)?;
    let left = compose_anafunctors_with_carrier(c, &ba.ana)?;
    let cb = compose_anafunctors_with_carrier(c, b)?;
    let right = compose_anafunctors_with_carrier(&cb.ana, a)?;
    let map = left.carrier.map_to(&right.carrier.apex, |t| {
        let xy = ba.carrier.tuple(t[0]);
        right.carrier.at(&[xy[0], cb.carrier.at(&[xy[1], t[1]])])
    })?;
    AnaIso::new(&left.ana, &right.ana, map)
}

/// `b ∘ φ: b ∘ a ≅ b ∘ a'` for `φ: a ≅ a'`.
pub fn whisker_iso_right(b: &Anafunctor, phi: &AnaIso) -> Result<AnaIso> {
    let l = compose_anafunctors_with_carrier(b, &phi.from)?;
    let r = compose_anafunctors_with_carrier(b, &phi.to)?;
    let map = l.carrier.map_to(&r.carrier.apex, |t| r.carrier.at(&[phi.map.at(t[0]), t[1]]))?;
    AnaIso::new(&l.ana, &r.ana, map)
}

/// `ψ ∘ a: b ∘ a ≅ b' ∘ a` for `ψ: b ≅ b'`.
pub fn whisker_iso_left(psi: &AnaIso, a: &Anafunctor) -> Result<AnaIso> {
    let l = compose_anafunctors_with_carrier(&psi.from, a)?;
    let r = compose_anafunctors_with_carrier(&psi.to, a)?;
    let map = l.carrier.map_to(&r.carrier.apex, |t| r.carrier.at(&[t[0], psi.map.at(t[1])]))?;
    AnaIso::new(&l.ana, &r.ana, map)
}

/// Some transformation between two parallel anafunctors, found as an
/// ordinary transformation on the pull-back to `X1 ×_{G0} X2`.
pub fn find_ana_nat(a1: &Anafunctor, a2: &Anafunctor) -> Result<Option<AnaNat>> {
    parallel(a1, a2)?;
    let joint = fibre_product(a1.cover(), a2.cover())?;
    let p12 = a1.cover().after(joint.pr1())?;
    let pulled = pullback_groupoid(a1.src(), &p12)?;
    let up1 = compose_functors(&a1.functor, &induced_functor(&pulled, &a1.pulled, joint.pr1())?)?;
    let up2 = compose_functors(&a2.functor, &induced_functor(&pulled, &a2.pulled, joint.pr2())?)?;
    match find_nat_trans(&up1, &up2) {
        Some(t) => Ok(Some(AnaNat::new(a1, a2, t.phi().clone())?)),
        None => Ok(None),
    }
}

/// The ana-isomorphism produced from a weak equivalence, with the auxiliary
/// cover of `H0` taken to be the identity.
#[derive(Debug, Clone)]
pub struct AnaLift {
    /// `X ×_{F0,H0,r} H1 ×_{s,H0,id} H0`, points `(x, h, y)`.
    pub carrier: FibreProduct,
    /// `(XHY, p ∘ pr1, G)` with `G(x, h, y) = y` and
    /// `G(t1, g, t2) = h1⁻¹ · F(x1, g, x2) · h2`.
    pub lifted: Anafunctor,
    /// `(x, h, y), x' ↦ F(x', 1, x) · h`, from `lifted` to the original.
    pub to_original: AnaNat,
    /// `H` pulled back along `G0`.
    pub target: Pullback,
    /// The identity-on-objects isomorphism from the lifted source onto
    /// `target`, given by `(r, G, s)` on arrows.
    pub iso: Functor,
}

#[derive(Debug, Clone)]
pub struct AnaEquivalence {
    pub essentially_surjective: bool,
    pub fully_faithful: bool,
    pub witness: Option<AnaLift>,
}

impl AnaEquivalence {
    pub fn flag(&self) -> bool {
        self.essentially_surjective && self.fully_faithful
    }
}

/// Tests whether `F: G(X) -> H` is a weak equivalence and, if so, builds the
/// lift to an ana-isomorphism.
pub fn is_ana_equivalence(a: &Anafunctor) -> Result<AnaEquivalence> {
    let f = &a.functor;
    let es = f.is_essentially_surjective();
    let ff = f.is_fully_faithful();
    if !(es && ff) {
        return Ok(AnaEquivalence { essentially_surjective: es, fully_faithful: ff, witness: None });
    }
    Ok(AnaEquivalence { essentially_surjective: es, fully_faithful: ff, witness: Some(lift(a)?) })
}

fn lift(a: &Anafunctor) -> Result<AnaLift> {
    let (g, h) = (a.src(), a.dst());
    let id_h0 = Mor::identity(h.objects());
    let carrier = chain_product(&[(a.functor.f0(), h.range()), (h.source(), &id_h0)])?;
    let cover = a.cover().after(carrier.leg(0))?;
    let pulled = pullback_groupoid(g, &cover)?;
    let g0 = carrier.leg(2).clone();
    let g1 = pulled.triples.map_to(h.arrows(), |t| {
        let (u, v) = (carrier.tuple(t[0]), carrier.tuple(t[2]));
        h.mul(h.mul(h.inv(u[1]), a.arr(u[0], t[1], v[0])), v[1])
    })?;
    let functor = Functor::new(&pulled.groupoid, h, g0.clone(), g1)?;
    let lifted = Anafunctor::new(pulled.clone(), functor.clone())?;
    let to_original = AnaNat::from_fn(&lifted, a, |t, x| {
        let u = carrier.tuple(t);
        h.mul(a.arr(x, g.unit(a.p(u[0])), u[0]), u[1])
    })?;
    let target = pullback_groupoid(h, &g0)?;
    let iso1 = pulled.triples.map_to(target.groupoid.arrows(), |t| target.arrow(t[0], functor.arr(pulled.arrow(t[0], t[1], t[2])), t[2]))?;
    let iso = Functor::new(&pulled.groupoid, &target.groupoid, Mor::identity(pulled.groupoid.objects()), iso1)?;
    Ok(AnaLift { carrier, lifted, to_original, target, iso })
}

impl AnaLift {
    /// Checks the lift: the anafunctor and transformation are valid, the
    /// functor is an isomorphism, and the hypercover after it is `G`.
    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        rep.extend("lifted", self.lifted.validate());
        rep.extend("to-original", self.to_original.validate());
        rep.extend("iso", self.iso.validate());
        rep.record(
            "iso-invertible",
            "the lifted functor is an isomorphism onto the pulled-back target",
            (!self.iso.is_isomorphism()).then(|| "arrow map is not invertible".to_string()),
        );
        let through = compose_functors(&self.target.hyper, &self.iso);
        let same_functor = through
            .map(|t| t.f0() == self.lifted.functor().f0() && t.f1() == self.lifted.functor().f1())
            .unwrap_or(false);
        rep.record(
            "intertwines",
            "hypercover after the isomorphism is the lifted functor",
            (!same_functor).then(|| "composite differs".to_string()),
        );
        rep
    }
}
