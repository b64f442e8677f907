//! Bibundle functors, actors and equivalences: classification, conversions
//! to and from functors and anafunctors, composition with its coherence
//! isomorphisms, duals, actor decomposition and imprimitivity.
//!
//! Composites `X ×_H Y` are orbit spaces of `X ×_{s,H0,r} Y` under
//! `(x, y)·h = (x·h, h⁻¹·y)`; points are named by their least
//! representative.

use std::collections::HashMap;
use std::sync::Arc;

use crate::action::{all_actions, is_bibundle_map, transformation_groupoid, Action, Actor, Bibundle, GMap, Side};
use crate::backends::{space_from_nbhds, topologies};
use crate::bundle::{is_basic, orbit_space, PrincipalBundle};
use crate::error::{Error, Result};
use crate::groupoid::{cech_groupoid, same_grpd, unit_groupoid, Groupoid, Grpd};
use crate::morphism::{compose_functors, AnaNat, Anafunctor, Functor};
use crate::report::Report;
use crate::site::{chain_product, factor_through, fibre_product, fit, Backend, FibreProduct, Mor, Obj, Space};

/// Which of the four bibundle notions a bibundle satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BibundleClass {
    /// The right action is principal with projection `r`.
    pub is_functor: bool,
    /// A functor whose right anchor `s` is a cover.
    pub is_covering: bool,
    /// The right action is basic and `s` is a cover.
    pub is_actor: bool,
    /// A functor whose left action is principal with projection `s`.
    pub is_equivalence: bool,
}

pub fn classify(x: &Bibundle) -> BibundleClass {
    let functor = PrincipalBundle::new(&x.right, x.r()).is_ok();
    let s_cover = x.s().is_cover();
    let basic = is_basic(&x.right).map(|b| b.basic).unwrap_or(false);
    let left = PrincipalBundle::new(&x.left, x.s()).is_ok();
    BibundleClass {
        is_functor: functor,
        is_covering: functor && s_cover,
        is_actor: basic && s_cover,
        is_equivalence: functor && left,
    }
}

/// The classification as a report, with the bibundle axioms first.
pub fn classify_report(x: &Bibundle) -> Report {
    let mut rep = Report::new();
    rep.extend("bibundle", x.validate());
    let c = classify(x);
    let flag = |b: bool| if b { "yes".to_string() } else { "no".to_string() };
    rep.info("functor", "the right action is principal over r", flag(c.is_functor));
    rep.info("covering", "a bibundle functor whose s is a cover", flag(c.is_covering));
    rep.info("actor", "the right action is basic and s is a cover", flag(c.is_actor));
    rep.info("equivalence", "both actions are principal, over r and over s", flag(c.is_equivalence));
    rep
}

/// Pushes an action on the domain of `proj` down to its codomain. The anchor
/// and the action must be constant on the fibres of `proj`.
fn descend_action(
    g: &Grpd,
    side: Side,
    proj: &Mor,
    anchor_up: &Mor,
    act_up: impl Fn(usize, usize) -> usize,
) -> Result<Action> {
    let anchor = factor_through(proj, anchor_up)?;
    let down = proj.cod();
    let mut members = vec![Vec::new(); down.len()];
    for x in 0..proj.dom().len() {
        members[proj.at(x)].push(x);
    }
    let mut table = HashMap::new();
    for (c, class) in members.iter().enumerate() {
        let o = anchor.at(c);
        for a in 0..g.len1() {
            let fits = match side {
                Side::Right => g.r(a) == o,
                Side::Left => g.s(a) == o,
            };
            if !fits {
                continue;
            }
            let mut image = None;
            for &x in class {
                let v = proj.at(act_up(x, a));
                match image {
                    Some(w) if w != v => {
                        return Err(Error::NotFibrewiseConstant(format!(
                            "{} sends the class of {} to two classes",
                            g.arrow_name(a),
                            down.name(c)
                        )))
                    }
                    _ => image = Some(v),
                }
            }
            table.insert((c, a), image.expect("classes are nonempty"));
        }
    }
    Action::from_fn(g, side, &anchor, |c, a| table[&(c, a)])
}

/// The members of each fibre of a surjection.
fn fibres(proj: &Mor) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); proj.cod().len()];
    for x in 0..proj.dom().len() {
        out[proj.at(x)].push(x);
    }
    out
}

/// A map of bibundles: equivariant for both actions.
#[derive(Debug, Clone)]
pub struct BibundleMap {
    pub from: Bibundle,
    pub to: Bibundle,
    pub map: Mor,
}

impl BibundleMap {
    pub fn new(from: &Bibundle, to: &Bibundle, map: Mor) -> Result<BibundleMap> {
        if !same_grpd(from.g(), to.g()) || !same_grpd(from.h(), to.h()) {
            return Err(Error::BoundaryMismatch("bibundles between different groupoids".into()));
        }
        let map = fit(&map, from.carrier(), to.carrier(), "bibundle map")?;
        Ok(BibundleMap { from: from.clone(), to: to.clone(), map })
    }

    pub fn identity(x: &Bibundle) -> BibundleMap {
        BibundleMap { from: x.clone(), to: x.clone(), map: Mor::identity(x.carrier()) }
    }

    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        let left = GMap::new(&self.from.left, &self.to.left, self.map.clone()).expect("same groupoids");
        let right = GMap::new(&self.from.right, &self.to.right, self.map.clone()).expect("same groupoids");
        rep.extend("left", left.validate());
        rep.extend("right", right.validate());
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    pub fn is_iso(&self) -> bool {
        self.map.is_iso()
    }

    pub fn inverse(&self) -> Option<BibundleMap> {
        let inv = self.map.inverse()?;
        Some(BibundleMap { from: self.to.clone(), to: self.from.clone(), map: inv })
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &BibundleMap) -> Result<BibundleMap> {
        if !self.to.same_as(&next.from) {
            return Err(Error::NotComposable("bibundle maps do not meet".into()));
        }
        BibundleMap::new(&self.from, &next.to, next.map.after(&self.map)?)
    }
}

/// `X ×_{s,H0,r} Y` with the diagonal right `H`-action and its orbit
/// projection.
struct Balanced {
    pairs: FibreProduct,
    proj: Mor,
}

fn balanced(x: &Bibundle, y: &Action) -> Result<Balanced> {
    let h = x.h();
    if y.side() != Side::Left || !same_grpd(y.groupoid(), h) {
        return Err(Error::MiddleMismatch("the second factor needs a left action of the middle groupoid".into()));
    }
    if !is_basic(&x.right)?.basic {
        return Err(Error::NotComposable("the middle action on the first bibundle is not basic".into()));
    }
    let pairs = fibre_product(x.s(), y.anchor())?;
    let anchor = x.s().after(pairs.pr1())?;
    let diagonal = Action::right(h, &anchor, |k, a| {
        let t = pairs.tuple(k);
        pairs.at(&[x.ract(t[0], a), y.act(t[1], h.inv(a))])
    })?;
    let orbits = orbit_space(&diagonal)?;
    Ok(Balanced { pairs, proj: orbits.proj })
}

/// A composite `X ×_H Y` with the pairs it is a quotient of.
#[derive(Debug, Clone)]
pub struct Composite {
    pub bibundle: Bibundle,
    /// `X ×_{s,H0,r} Y`.
    pub pairs: FibreProduct,
    pub proj: Mor,
}

impl Composite {
    /// The class `[x, y]`.
    pub fn class(&self, x: usize, y: usize) -> usize {
        self.proj.at(self.pairs.at(&[x, y]))
    }
}

/// `X ×_H Y` for a `G, H`-bibundle `X` and an `H, K`-bibundle `Y`, with
/// `g·[x, y] = [g·x, y]` and `[x, y]·k = [x, y·k]`.
pub fn compose_bibundles(x: &Bibundle, y: &Bibundle) -> Result<Composite> {
    if !same_grpd(x.h(), y.g()) {
        return Err(Error::MiddleMismatch("the right groupoid of the first is not the left of the second".into()));
    }
    let b = balanced(x, &y.left)?;
    let pairs = &b.pairs;
    let left = descend_action(x.g(), Side::Left, &b.proj, &x.r().after(pairs.pr1())?, |p, a| {
        let t = pairs.tuple(p);
        pairs.at(&[x.lact(a, t[0]), t[1]])
    })?;
    let right = descend_action(y.h(), Side::Right, &b.proj, &y.s().after(pairs.pr2())?, |p, k| {
        let t = pairs.tuple(p);
        pairs.at(&[t[0], y.ract(t[1], k)])
    })?;
    Ok(Composite { bibundle: Bibundle::new(left, right)?, pairs: b.pairs, proj: b.proj })
}

/// `f ×_H g: X1 ×_H Y1 -> X2 ×_H Y2`, `[x, y] ↦ [f(x), g(y)]`.
pub fn horizontal(f: &BibundleMap, g: &BibundleMap) -> Result<BibundleMap> {
    let c1 = compose_bibundles(&f.from, &g.from)?;
    let c2 = compose_bibundles(&f.to, &g.to)?;
    let up = c1.pairs.map_to(c2.bibundle.carrier(), |t| c2.class(f.map.at(t[0]), g.map.at(t[1])))?;
    BibundleMap::new(&c1.bibundle, &c2.bibundle, factor_through(&c1.proj, &up)?)
}

/// `G1 ×_G X ≅ X` induced by `(g, x) ↦ g·x`.
pub fn left_unitor(x: &Bibundle) -> Result<BibundleMap> {
    let c = compose_bibundles(&Bibundle::unit(x.g()), x)?;
    let up = c.pairs.map_to(x.carrier(), |t| x.lact(t[0], t[1]))?;
    BibundleMap::new(&c.bibundle, x, factor_through(&c.proj, &up)?)
}

/// `X ×_H H1 ≅ X` induced by `(x, h) ↦ x·h`.
pub fn right_unitor(x: &Bibundle) -> Result<BibundleMap> {
    let c = compose_bibundles(x, &Bibundle::unit(x.h()))?;
    let up = c.pairs.map_to(x.carrier(), |t| x.ract(t[0], t[1]))?;
    BibundleMap::new(&c.bibundle, x, factor_through(&c.proj, &up)?)
}

/// `(X ×_H Y) ×_K Z -> X ×_H (Y ×_K Z)`, the map lifted by the identity of
/// the triple fibre product.
pub fn associator(x: &Bibundle, y: &Bibundle, z: &Bibundle) -> Result<BibundleMap> {
    let xy = compose_bibundles(x, y)?;
    let left = compose_bibundles(&xy.bibundle, z)?;
    let yz = compose_bibundles(y, z)?;
    let right = compose_bibundles(x, &yz.bibundle)?;
    let triples = chain_product(&[(x.s(), y.r()), (y.s(), z.r())])?;
    let to_left = triples.map_to(left.bibundle.carrier(), |t| left.class(xy.class(t[0], t[1]), t[2]))?;
    let to_right = triples.map_to(right.bibundle.carrier(), |t| right.class(t[0], yz.class(t[1], t[2])))?;
    BibundleMap::new(&left.bibundle, &right.bibundle, factor_through(&to_left, &to_right)?)
}

/// `X*`: the same carrier with `h·x·g := g⁻¹·x·h⁻¹`, anchors exchanged.
pub fn dual(x: &Bibundle) -> Bibundle {
    Bibundle::new(x.right.flip(), x.left.flip()).expect("flipped actions share the carrier")
}

/// `F*(Y) = G0 ×_{F0,H0,r} Y` for a functor `F: G -> H` and an
/// `H, K`-bibundle `Y`, with `g·(x, y) = (r(g), F(g)·y)` and
/// `(x, y)·k = (x, y·k)`.
pub fn functor_pullback(f: &Functor, y: &Bibundle) -> Result<(Bibundle, FibreProduct)> {
    if !same_grpd(f.dst(), y.g()) {
        return Err(Error::MiddleMismatch("the functor does not land where the bibundle starts".into()));
    }
    let g = f.src();
    let fp = fibre_product(f.f0(), y.r())?;
    let s = y.s().after(fp.pr2())?;
    let b = Bibundle::from_fns(
        g,
        y.h(),
        fp.pr1(),
        &s,
        |p, a| fp.at(&[g.r(a), y.lact(f.arr(a), fp.tuple(p)[1])]),
        |p, k| {
            let t = fp.tuple(p);
            fp.at(&[t[0], y.ract(t[1], k)])
        },
    )?;
    Ok((b, fp))
}

/// `X_F = G0 ×_{F0,H0,r} H1`.
pub fn functor_to_bibundle(f: &Functor) -> Result<Bibundle> {
    Ok(functor_pullback(f, &Bibundle::unit(f.dst()))?.0)
}

/// The anafunctor `(X, r, F_X)` of a bibundle functor, with the
/// identity-on-objects isomorphism `G ⋉ X ⋊ H -> G(X)`,
/// `(g, x, h) ↦ (g·x, g, x·h)`.
#[derive(Debug, Clone)]
pub struct BibundleAna {
    pub ana: Anafunctor,
    pub iso: Functor,
}

/// `F_X(g·x, g, x·h) = h` and `F_X = s` on objects.
pub fn bibundle_to_anafunctor(x: &Bibundle) -> Result<BibundleAna> {
    let bundle = PrincipalBundle::new(&x.right, x.r()).map_err(|e| Error::NotABibundleFunctor(e.to_string()))?;
    let (g, h) = (x.g(), x.h());
    let ana = Anafunctor::from_maps(g, h, x.r(), x.s(), |x1, a, x2| {
        let mid = x.lact(g.inv(a), x1);
        bundle.arrow_between(mid, x2).expect("both lie over s(g)")
    })?;
    let (tg, tr) = x.transformation_groupoid()?;
    let pulled = ana.pullback();
    let f1 = tr.map_to(pulled.groupoid.arrows(), |t| pulled.arrow(x.lact(t[0], t[1]), t[0], x.ract(t[1], t[2])))?;
    let iso = Functor::new(&tg, &pulled.groupoid, Mor::identity(x.carrier()), f1)?;
    Ok(BibundleAna { ana, iso })
}

/// The bibundle functor of an anafunctor `(X, p, F)`: the orbit space of
/// `G1 ×_{s,G0,p} X ×_{F0,H0,r} H1` under
/// `(g1, x1, h)·(x1, g2, x2) = (g1·g2, x2, F(x1, g2, x2)⁻¹·h)`.
#[derive(Debug, Clone)]
pub struct Beta {
    pub bibundle: Bibundle,
    pub triples: FibreProduct,
    pub proj: Mor,
}

impl Beta {
    pub fn class(&self, g: usize, x: usize, h: usize) -> usize {
        self.proj.at(self.triples.at(&[g, x, h]))
    }
}

pub fn beta_ana_to_bibundle(a: &Anafunctor) -> Result<Beta> {
    let (g, h) = (a.src(), a.dst());
    let pulled = a.pullback();
    let f = a.functor();
    let tr = chain_product(&[(g.source(), a.cover()), (f.f0(), h.range())])?;
    let act = Action::right(&pulled.groupoid, tr.leg(1), |t, k| {
        let u = tr.tuple(t);
        let (_, g2, x2) = pulled.triple(k);
        tr.at(&[g.mul(u[0], g2), x2, h.mul(h.inv(f.arr(k)), u[2])])
    })?;
    let orbits = orbit_space(&act)?;
    let left = descend_action(g, Side::Left, &orbits.proj, &g.range().after(tr.leg(0))?, |t, a1| {
        let u = tr.tuple(t);
        tr.at(&[g.mul(a1, u[0]), u[1], u[2]])
    })?;
    let right = descend_action(h, Side::Right, &orbits.proj, &h.source().after(tr.leg(2))?, |t, b| {
        let u = tr.tuple(t);
        tr.at(&[u[0], u[1], h.mul(u[2], b)])
    })?;
    Ok(Beta { bibundle: Bibundle::new(left, right)?, triples: tr, proj: orbits.proj })
}

/// `β(X, r, F_X) -> X`, `[g, x, h] ↦ g·x·h`.
pub fn beta_roundtrip(x: &Bibundle) -> Result<BibundleMap> {
    let ana = bibundle_to_anafunctor(x)?.ana;
    let beta = beta_ana_to_bibundle(&ana)?;
    let up = beta.triples.map_to(x.carrier(), |t| x.ract(x.lact(t[0], t[1]), t[2]))?;
    BibundleMap::new(&beta.bibundle, x, factor_through(&beta.proj, &up)?)
}

/// The transformation `Ψ([g, x, h], x̃) = F(x̃, g, x)·h` from the anafunctor
/// of `β(a)` to `a`.
pub fn beta_psi(a: &Anafunctor) -> Result<AnaNat> {
    let beta = beta_ana_to_bibundle(a)?;
    let back = bibundle_to_anafunctor(&beta.bibundle)?.ana;
    let h = a.dst();
    let members = fibres(&beta.proj);
    let joint = fibre_product(back.cover(), a.cover())?;
    let mut table = Vec::with_capacity(joint.len());
    for t in joint.tuples() {
        let (c, xt) = (t[0], t[1]);
        let mut value = None;
        for &k in &members[c] {
            let u = beta.triples.tuple(k);
            let v = h.mul(a.arr(xt, u[0], u[1]), u[2]);
            match value {
                Some(w) if w != v => {
                    return Err(Error::NotFibrewiseConstant(format!(
                        "Ψ depends on the representative of {}",
                        beta.bibundle.carrier().name(c)
                    )))
                }
                _ => value = Some(v),
            }
        }
        table.push(value.expect("classes are nonempty"));
    }
    AnaNat::new(&back, a, Mor::new(&joint.apex, h.arrows(), table)?)
}

/// The isomorphisms `X ×_H X* ≅ G1` and `X* ×_G X ≅ H1` of an equivalence.
#[derive(Debug, Clone)]
pub struct InverseIsos {
    /// `[x1, x2] ↦` the unique `g` with `g·x2 = x1`.
    pub iso1: BibundleMap,
    /// `[x1, x2] ↦` the unique `h` with `x1·h = x2`.
    pub iso2: BibundleMap,
}

pub fn check_inverse(x: &Bibundle) -> Result<InverseIsos> {
    let left = PrincipalBundle::new(&x.left, x.s()).map_err(|e| Error::NotAnEquivalence(e.to_string()))?;
    let right = PrincipalBundle::new(&x.right, x.r()).map_err(|e| Error::NotAnEquivalence(e.to_string()))?;
    let d = dual(x);
    let (g, h) = (x.g(), x.h());
    let c1 = compose_bibundles(x, &d)?;
    let up1 = c1.pairs.map_to(g.arrows(), |t| left.arrow_between(t[0], t[1]).expect("same s-fibre"))?;
    let iso1 = BibundleMap::new(&c1.bibundle, &Bibundle::unit(g), factor_through(&c1.proj, &up1)?)?;
    let c2 = compose_bibundles(&d, x)?;
    let up2 = c2.pairs.map_to(h.arrows(), |t| right.arrow_between(t[0], t[1]).expect("same r-fibre"))?;
    let iso2 = BibundleMap::new(&c2.bibundle, &Bibundle::unit(h), factor_through(&c2.proj, &up2)?)?;
    for (name, m) in [("X ×_H X*", &iso1), ("X* ×_G X", &iso2)] {
        if !m.is_iso() || !m.is_valid() {
            return Err(Error::Invalid(format!("{name} is not identified with the unit bibundle")));
        }
    }
    Ok(InverseIsos { iso1, iso2 })
}

/// The bibundle of an actor `G -> H`: `H1` with the actor on the left and
/// right multiplication.
pub fn actor_bibundle(a: &Actor) -> Bibundle {
    Bibundle::new(a.action().clone(), Action::multiplication(a.h(), Side::Right)).expect("actor bibundle")
}

/// A bibundle actor written as an actor `G -> K` followed by an equivalence
/// from `K` to `H`.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// `K0 = X/H`, `K1 = (X ×_{s,H0,s} X)/H`.
    pub k: Grpd,
    /// `g·[x1, x2] = [g·x1, x2]`.
    pub actor: Actor,
    /// `X` with `[x1, x2]·(x2·h) = x1·h`.
    pub equivalence: Bibundle,
    /// `K1 ×_K X -> X`, `[k, x] ↦ k·x`.
    pub recompose: BibundleMap,
}

pub fn decompose_actor(x: &Bibundle) -> Result<Decomposition> {
    if !classify(x).is_actor {
        return Err(Error::NotAnActor("the right action is not basic with covering anchor".into()));
    }
    let h = x.h();
    let basic = is_basic(&x.right)?;
    let bundle = basic.bundle.expect("basic actions have a bundle");
    let q0 = basic.orbits.proj.clone();
    let reps0 = fibres(&q0);
    let sq = fibre_product(x.s(), x.s())?;
    let diag = Action::right(h, &x.s().after(sq.pr1())?, |p, a| {
        let t = sq.tuple(p);
        sq.at(&[x.ract(t[0], a), x.ract(t[1], a)])
    })?;
    let q1 = orbit_space(&diag)?.proj;
    let reps1 = fibres(&q1);
    let (k0, k1) = (q0.cod().clone(), q1.cod().clone());
    let r = factor_through(&q1, &q0.after(sq.pr1())?)?;
    let s = factor_through(&q1, &q0.after(sq.pr2())?)?;
    let u = Mor::from_fn(&k0, &k1, |c| q1.at(sq.at(&[reps0[c][0], reps0[c][0]])))?;
    let i = factor_through(&q1, &sq.map_to(&k1, |t| q1.at(sq.at(&[t[1], t[0]])))?)?;
    // [x1, x2]·[y2, y3] = [x1, y3·h] with y2·h = x2
    let built = Groupoid::from_tables(
        k0.clone(),
        k1.clone(),
        r,
        s,
        |a, b| {
            let (p, q) = (sq.tuple(reps1[a][0]), sq.tuple(reps1[b][0]));
            let hh = bundle.arrow_between(q[0], p[1]).expect("same orbit");
            q1.at(sq.at(&[p[0], x.ract(q[1], hh)]))
        },
        u,
        i,
    )?;
    let k: Grpd = Arc::new(built);
    let rep = k.validate();
    if !rep.passed() {
        return Err(Error::Invalid(format!("the middle groupoid fails {}", rep.failures()[0].check)));
    }
    let g_on_k1 = descend_action(x.g(), Side::Left, &q1, &x.r().after(sq.pr1())?, |p, a| {
        let t = sq.tuple(p);
        sq.at(&[x.lact(a, t[0]), t[1]])
    })?;
    let actor = Actor::new(&k, g_on_k1)?;
    let k_on_x = Action::left(&k, &q0, |p, a| {
        let t = sq.tuple(reps1[a][0]);
        let hh = bundle.arrow_between(t[1], p).expect("same orbit");
        x.ract(t[0], hh)
    })?;
    let equivalence = Bibundle::new(k_on_x, x.right.clone())?;
    let c = compose_bibundles(&actor_bibundle(&actor), &equivalence)?;
    let up = c.pairs.map_to(x.carrier(), |t| equivalence.lact(t[0], t[1]))?;
    let recompose = BibundleMap::new(&c.bibundle, x, factor_through(&c.proj, &up)?)?;
    Ok(Decomposition { k, actor, equivalence, recompose })
}

/// `X` as an equivalence from `G ⋉ (X/H)` to `(G\X) ⋊ H`.
#[derive(Debug, Clone)]
pub struct Imprimitivity {
    pub left: Grpd,
    pub right: Grpd,
    pub bibundle: Bibundle,
}

pub fn imprimitivity(x: &Bibundle) -> Result<Imprimitivity> {
    let lb = is_basic(&x.left)?;
    if !lb.basic {
        return Err(Error::NotBasic("left".into()));
    }
    let rb = is_basic(&x.right)?;
    if !rb.basic {
        return Err(Error::NotBasic("right".into()));
    }
    let to_xh = rb.orbits.proj;
    let to_gx = lb.orbits.proj;
    let on_xh = descend_action(x.g(), Side::Left, &to_xh, x.r(), |p, a| x.lact(a, p))?;
    let on_gx = descend_action(x.h(), Side::Right, &to_gx, x.s(), |p, b| x.ract(p, b))?;
    let left_g = transformation_groupoid(&on_xh)?;
    let right_g = transformation_groupoid(&on_gx)?;
    let (ld, rd) = (on_xh.domain(), on_gx.domain());
    let left = Action::left(&left_g, &to_xh, |p, k| x.lact(ld.tuple(k)[0], p))?;
    let right = Action::right(&right_g, &to_gx, |p, k| x.ract(p, rd.tuple(k)[1]))?;
    Ok(Imprimitivity { left: left_g, right: right_g, bibundle: Bibundle::new(left, right)? })
}

/// The outcome of testing whether `m: X ×_{s,H0,r} Y -> W` exhibits `W` as
/// the composite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompositeWitness {
    /// `(pr1, m): X ×_{s,H0,r} Y -> X ×_{r,G0,r} W` is invertible.
    pub pairs_iso: bool,
    /// The map `X ×_H Y -> W` induced by `m` is an invertible bibundle map.
    pub induced_iso: bool,
    pub cover: bool,
}

impl CompositeWitness {
    pub fn holds(&self) -> bool {
        self.pairs_iso
    }
}

pub fn composite_witness(x: &Bibundle, y: &Bibundle, w: &Bibundle, m: &Mor) -> Result<CompositeWitness> {
    if !same_grpd(x.h(), y.g()) || !same_grpd(x.g(), w.g()) || !same_grpd(y.h(), w.h()) {
        return Err(Error::BoundaryMismatch("the three bibundles do not fit together".into()));
    }
    let h = x.h();
    let pairs = fibre_product(x.s(), y.r())?;
    let m = fit(m, &pairs.apex, w.carrier(), "comparison map")?;
    for (p, t) in pairs.tuples().iter().enumerate() {
        let (a, b) = (t[0], t[1]);
        let v = m.at(p);
        let invariant = x.right.arrows_at(a).into_iter().all(|e| m.at(pairs.at(&[x.ract(a, e), y.lact(h.inv(e), b)])) == v);
        let left = x.left.arrows_at(a).into_iter().all(|e| w.left.try_act(v, e) == Some(m.at(pairs.at(&[x.lact(e, a), b]))));
        let right = y.right.arrows_at(b).into_iter().all(|e| w.right.try_act(v, e) == Some(m.at(pairs.at(&[a, y.ract(b, e)]))));
        if !(invariant && left && right) {
            return Err(Error::Invalid(format!(
                "the map is not invariant and equivariant at {}",
                pairs.apex.name(p)
            )));
        }
    }
    let target = fibre_product(x.r(), w.r())?;
    let pm = pairs.tuples().iter().enumerate().map(|(p, t)| target.find(&[t[0], m.at(p)])).collect::<Option<Vec<_>>>();
    let pairs_iso = pm
        .and_then(|table| Mor::new(&pairs.apex, &target.apex, table).ok())
        .is_some_and(|f| f.is_iso());
    let c = compose_bibundles(x, y)?;
    let induced_iso = factor_through(&c.proj, &m).is_ok_and(|f| f.is_iso() && is_bibundle_map(&c.bibundle, w, &f));
    Ok(CompositeWitness { pairs_iso, induced_iso, cover: m.is_cover() })
}

/// The `G`-action `X ×_H Y` induced by a bibundle actor on an `H`-action.
#[derive(Debug, Clone)]
pub struct Induced {
    pub action: Action,
    pub pairs: FibreProduct,
    pub proj: Mor,
}

impl Induced {
    pub fn class(&self, x: usize, y: usize) -> usize {
        self.proj.at(self.pairs.at(&[x, y]))
    }
}

/// `Y ↦ X ×_H Y`; a right action `Y` is first turned into a left one.
pub fn act_on(x: &Bibundle, y: &Action) -> Result<Induced> {
    if !classify(x).is_actor {
        return Err(Error::NotAnActor("the right action is not basic with covering anchor".into()));
    }
    if !same_grpd(y.groupoid(), x.h()) {
        return Err(Error::MiddleMismatch("the action is not one of the right groupoid".into()));
    }
    let y = y.to_side(Side::Left);
    let b = balanced(x, &y)?;
    let pairs = &b.pairs;
    let action = descend_action(x.g(), Side::Left, &b.proj, &x.r().after(pairs.pr1())?, |p, a| {
        let t = pairs.tuple(p);
        pairs.at(&[x.lact(a, t[0]), t[1]])
    })?;
    Ok(Induced { action, pairs: b.pairs, proj: b.proj })
}

/// `X ×_H f: [x, y] ↦ [x, f(y)]`.
pub fn act_on_map(x: &Bibundle, f: &GMap) -> Result<GMap> {
    let from = act_on(x, &f.from)?;
    let to = act_on(x, &f.to)?;
    let up = from.pairs.map_to(to.action.carrier(), |t| to.class(t[0], f.map.at(t[1])))?;
    GMap::new(&from.action, &to.action, factor_through(&from.proj, &up)?)
}

/// The left `G`-action on `X/H` for a bibundle with basic right action.
pub fn left_quotient(x: &Bibundle) -> Result<(Action, Mor)> {
    let b = is_basic(&x.right)?;
    if !b.basic {
        return Err(Error::NotBasic("right".into()));
    }
    let proj = b.orbits.proj;
    let action = descend_action(x.g(), Side::Left, &proj, x.r(), |p, a| x.lact(a, p))?;
    Ok((action, proj))
}

/// The equivalence `X` from the Čech groupoid of a cover `p: X -> Z` to the
/// 0-groupoid `Z`: `(x1, x2)·x2 = x1`, with `Z` acting trivially through `p`.
pub fn cech_bibundle(p: &Mor) -> Result<Bibundle> {
    let g = cech_groupoid(p)?;
    let z = unit_groupoid(p.cod());
    Bibundle::from_fns(&g, &z, &Mor::identity(p.dom()), p, |_, a| g.r(a), |x, _| x)
}

/// The equivalence `X1 ×_Z X2` between the Čech groupoids of two covers of
/// `Z`: `(x1, x2)·(x2, y) = (x1, y)` and `(x, y1)·(y1, y2) = (x, y2)`.
pub fn cech_equivalence(p1: &Mor, p2: &Mor) -> Result<Bibundle> {
    let g = cech_groupoid(p1)?;
    let h = cech_groupoid(p2)?;
    let fp = fibre_product(p1, p2)?;
    Bibundle::from_fns(
        &g,
        &h,
        fp.pr1(),
        fp.pr2(),
        |p, a| fp.at(&[g.r(a), fp.tuple(p)[1]]),
        |p, b| fp.at(&[fp.tuple(p)[0], h.s(b)]),
    )
}

/// Every `G, H`-bibundle on `carrier`.
pub fn all_bibundles(g: &Grpd, h: &Grpd, carrier: &Space, budget: usize) -> Result<Vec<Bibundle>> {
    let lefts = all_actions(g, carrier, Side::Left, budget)?;
    let rights = all_actions(h, carrier, Side::Right, budget)?;
    let mut out = Vec::new();
    for l in &lefts {
        for r in &rights {
            let b = Bibundle::new(l.clone(), r.clone())?;
            if b.is_valid() {
                out.push(b);
            }
        }
    }
    Ok(out)
}

/// An isomorphism of bibundles, found by backtracking over maps that
/// preserve both anchors and both actions.
pub fn find_bibundle_iso(a: &Bibundle, b: &Bibundle) -> Option<BibundleMap> {
    if !same_grpd(a.g(), b.g()) || !same_grpd(a.h(), b.h()) || a.carrier().len() != b.carrier().len() {
        return None;
    }
    let n = a.carrier().len();
    let cands: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| b.r().at(j) == a.r().at(i) && b.s().at(j) == a.s().at(i)).collect())
        .collect();
    let mut img = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn consistent(a: &Bibundle, b: &Bibundle, img: &[usize]) -> bool {
        let set = |p: usize| img[p] != usize::MAX;
        a.left.pairs().all(|(p, e)| {
            let q = a.lact(e, p);
            !(set(p) && set(q)) || b.left.try_act(img[p], e) == Some(img[q])
        }) && a.right.pairs().all(|(p, e)| {
            let q = a.ract(p, e);
            !(set(p) && set(q)) || b.right.try_act(img[p], e) == Some(img[q])
        })
    }
    fn go(i: usize, a: &Bibundle, b: &Bibundle, cands: &[Vec<usize>], img: &mut Vec<usize>, used: &mut Vec<bool>) -> Option<BibundleMap> {
        if i == img.len() {
            let map = Mor::new(a.carrier(), b.carrier(), img.clone()).ok()?;
            let m = BibundleMap::new(a, b, map).ok()?;
            return (m.is_iso() && m.is_valid()).then_some(m);
        }
        for &j in &cands[i] {
            if used[j] {
                continue;
            }
            img[i] = j;
            used[j] = true;
            if consistent(a, b, img) {
                if let Some(m) = go(i + 1, a, b, cands, img, used) {
                    return Some(m);
                }
            }
            used[j] = false;
            img[i] = usize::MAX;
        }
        None
    }
    go(0, a, b, &cands, &mut img, &mut used)
}

/// A quasi-inverse bibundle with the isomorphisms that witness it.
#[derive(Debug, Clone)]
pub struct BibundleInverse {
    pub inverse: Bibundle,
    /// `X ×_H Y ≅ G1`.
    pub unit: BibundleMap,
    /// `Y ×_G X ≅ H1`.
    pub counit: BibundleMap,
}

#[derive(Debug, Clone)]
pub struct BibundleSearch {
    pub cap: usize,
    pub candidates: usize,
    pub found: Option<BibundleInverse>,
}

fn carriers(backend: Backend, n: usize) -> Vec<Space> {
    let names: Vec<String> = (0..n).map(|i| format!("y{i}")).collect();
    match backend {
        Backend::FinSet => vec![Obj::finset(&names).expect("distinct names")],
        Backend::FinTop => topologies(n).iter().map(|t| space_from_nbhds(t)).collect(),
    }
}

/// Searches every `H, G`-bibundle with at most `cap` points for one whose
/// composites with `x` are isomorphic to the unit bibundles.
pub fn find_quasi_inverse_bibundle(x: &Bibundle, cap: usize, budget: usize) -> Result<BibundleSearch> {
    let (g, h) = (x.g(), x.h());
    let (ug, uh) = (Bibundle::unit(g), Bibundle::unit(h));
    let mut candidates = 0;
    for n in 0..=cap {
        for carrier in carriers(x.carrier().backend(), n) {
            for y in all_bibundles(h, g, &carrier, budget)? {
                candidates += 1;
                let Ok(xy) = compose_bibundles(x, &y) else { continue };
                let Some(unit) = find_bibundle_iso(&xy.bibundle, &ug) else { continue };
                let Ok(yx) = compose_bibundles(&y, x) else { continue };
                let Some(counit) = find_bibundle_iso(&yx.bibundle, &uh) else { continue };
                return Ok(BibundleSearch { cap, candidates, found: Some(BibundleInverse { inverse: y, unit, counit }) });
            }
        }
    }
    Ok(BibundleSearch { cap, candidates, found: None })
}

/// `X_{F2} ×_H X_{F1} ≅ X_{F1 ∘ F2}` for functors `F2: G -> H` and
/// `F1: H -> K`, induced by `α(x, h, k) = (x, F1(h)·k)`.
pub fn functor_composition_iso(f2: &Functor, f1: &Functor) -> Result<(BibundleMap, CompositeWitness)> {
    let k = f1.dst();
    let (x2, fp2) = functor_pullback(f2, &Bibundle::unit(f2.dst()))?;
    let (x1, fp1) = functor_pullback(f1, &Bibundle::unit(k))?;
    let (w, fpw) = functor_pullback(&compose_functors(f1, f2)?, &Bibundle::unit(k))?;
    let c = compose_bibundles(&x2, &x1)?;
    let alpha = c.pairs.map_to(w.carrier(), |t| {
        let (a, b) = (fp2.tuple(t[0]), fp1.tuple(t[1]));
        fpw.at(&[a[0], k.mul(f1.arr(a[1]), b[1])])
    })?;
    let witness = composite_witness(&x2, &x1, &w, &alpha)?;
    let iso = BibundleMap::new(&c.bibundle, &w, factor_through(&c.proj, &alpha)?)?;
    Ok((iso, witness))
}

/// An action of the Čech groupoid of `p: X -> Z` rebuilt as the pull-back
/// `Z̃ ×_{f,Z,p} X` with `(z, x1)·(x1, x2) = (z, x2)`.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    /// `f: Z̃ -> Z` induced by the anchor.
    pub base: Mor,
    pub pulled: Action,
    /// `y ↦ ([y], s(y))`.
    pub iso: GMap,
}

pub fn cech_reconstruction(p: &Mor, y: &Action) -> Result<Reconstruction> {
    let g = cech_groupoid(p)?;
    if !same_grpd(y.groupoid(), &g) {
        return Err(Error::MiddleMismatch("the action is not one of the Čech groupoid".into()));
    }
    let y = y.to_side(Side::Right);
    let b = is_basic(&y)?;
    if !b.basic {
        return Err(Error::NotBasic("right".into()));
    }
    let proj = b.orbits.proj;
    let base = factor_through(&proj, &p.after(y.anchor())?)?;
    let fp = fibre_product(&base, p)?;
    let pulled = Action::right(&g, fp.pr2(), |t, a| fp.at(&[fp.tuple(t)[0], g.s(a)]))?;
    let map = Mor::from_fn(y.carrier(), pulled.carrier(), |q| fp.at(&[proj.at(q), y.anchor_at(q)]))?;
    let iso = GMap::new(&y, &pulled, map)?;
    Ok(Reconstruction { base, pulled, iso })
}
