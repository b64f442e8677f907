//! Orbit spaces, principal bundles, basic actions and bundle pull-backs.
//!
//! Bundles work for either side. The shear map of a bundle is
//! `(x, g) ↦ (x, x·g)` for a right action and `(g, x) ↦ (g·x, x)` for a left
//! one, always into `X ×_{p,Z,p} X`.

use crate::action::{Action, GMap, Side};
use crate::error::{Error, Result};
use crate::report::{Outcome, Report};
use crate::site::{coequalizer, factor_through, fibre_product, fit, same, FibreProduct, Mor, Space};

/// The orbit space projection of an action, with its classes.
#[derive(Debug, Clone)]
pub struct OrbitSpace {
    pub space: Space,
    pub proj: Mor,
    pub classes: Vec<Vec<usize>>,
    pub is_cover: bool,
}

/// Coequaliser of the projection to the carrier and the action map.
pub fn orbit_space(a: &Action) -> Result<OrbitSpace> {
    let rep = a.validate();
    if !rep.passed() {
        return Err(Error::Invalid(format!("not an action: {}", rep.failures()[0].check)));
    }
    let leg = match a.side() {
        Side::Right => a.domain().pr1(),
        Side::Left => a.domain().pr2(),
    };
    let q = coequalizer(leg, a.mult())?;
    let is_cover = q.proj.is_cover();
    Ok(OrbitSpace { space: q.space, proj: q.proj, classes: q.classes, is_cover })
}

/// A principal bundle: an action with an invariant cover `proj` for which
/// the shear map is invertible. The inverse is stored.
#[derive(Debug, Clone)]
pub struct PrincipalBundle {
    action: Action,
    base: Space,
    proj: Mor,
    fibre: FibreProduct,
    shear: Mor,
    shear_inverse: Mor,
}

fn shear_into(a: &Action, fibre: &FibreProduct) -> Result<Mor> {
    let table = a
        .pairs()
        .map(|(x, g)| {
            let y = a.act(x, g);
            let t = match a.side() {
                Side::Right => [x, y],
                Side::Left => [y, x],
            };
            fibre.find(&t).ok_or_else(|| {
                Error::NotFibrewiseConstant(format!(
                    "{} and {} lie in different fibres",
                    a.carrier().name(x),
                    a.carrier().name(y)
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Mor::new(&a.domain().apex, &fibre.apex, table)
}

/// Checks whether `a` with `proj` is a principal bundle. Works on arbitrary
/// data, including multiplication tables that are not actions.
pub fn bundle_report(a: &Action, proj: &Mor) -> Report {
    let mut rep = Report::new();
    if !same(proj.dom(), a.carrier()) {
        rep.push("projection", "the projection leaves the carrier", Outcome::Fail, Some("wrong domain".into()));
        return rep;
    }
    rep.extend("action", a.validate());
    let bad = a.pairs().find(|&(x, g)| a.try_act(x, g).map(|y| proj.at(y) != proj.at(x)).unwrap_or(true));
    rep.record(
        "invariant",
        "p(x·g) = p(x)",
        bad.map(|(x, g)| format!("{} moved by {}", a.carrier().name(x), a.groupoid().arrow_name(g))),
    );
    rep.record("cover", "the projection is a cover", (!proj.is_cover()).then(|| "not a cover".into()));
    if bad.is_some() {
        rep.push("shear", "the shear map is invertible", Outcome::Fail, Some("not invariant".into()));
        return rep;
    }
    let fibre = fibre_product(proj, proj).expect("same projection twice");
    let shear = shear_into(a, &fibre).expect("invariant");
    let witness = if !shear.is_injective() {
        Some("two arrows relate the same pair".to_string())
    } else if !shear.is_surjective() {
        Some("some pair in a fibre is not related".to_string())
    } else if shear.inverse().is_none() {
        Some("the inverse is not continuous".to_string())
    } else {
        None
    };
    rep.record("shear", "the shear map is invertible", witness);
    rep
}

impl PrincipalBundle {
    pub fn new(action: &Action, proj: &Mor) -> Result<PrincipalBundle> {
        let proj = fit(proj, action.carrier(), proj.cod(), "projection")?;
        let rep = bundle_report(action, &proj);
        if let Some(f) = rep.failures().first() {
            let msg = format!("{}: {}", f.check, f.witness.clone().unwrap_or_default());
            return Err(match f.check.as_str() {
                "cover" => Error::NotACover(msg),
                "invariant" => Error::NotFibrewiseConstant(msg),
                "shear" => Error::ShearNotIso(msg),
                _ => Error::Invalid(msg),
            });
        }
        let fibre = fibre_product(&proj, &proj)?;
        let shear = shear_into(action, &fibre)?;
        let shear_inverse = shear.inverse().ok_or_else(|| Error::ShearNotIso("no inverse".into()))?;
        Ok(PrincipalBundle { action: action.clone(), base: proj.cod().clone(), proj, fibre, shear, shear_inverse })
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    pub fn base(&self) -> &Space {
        &self.base
    }

    pub fn proj(&self) -> &Mor {
        &self.proj
    }

    pub fn carrier(&self) -> &Space {
        self.action.carrier()
    }

    /// `X ×_{p,Z,p} X`.
    pub fn fibre_square(&self) -> &FibreProduct {
        &self.fibre
    }

    pub fn shear(&self) -> &Mor {
        &self.shear
    }

    pub fn shear_inverse(&self) -> &Mor {
        &self.shear_inverse
    }

    /// The unique arrow taking `x1` to `x2`: `x1·g = x2` on the right,
    /// `g·x2 = x1` on the left. `None` if they lie in different fibres.
    pub fn arrow_between(&self, x1: usize, x2: usize) -> Option<usize> {
        let k = self.fibre.find(&[x1, x2])?;
        let t = self.action.domain().tuple(self.shear_inverse.at(k));
        Some(match self.action.side() {
            Side::Right => t[1],
            Side::Left => t[0],
        })
    }

    /// Re-checks the invariants, including that the stored inverse inverts
    /// the shear map.
    pub fn validate(&self) -> Report {
        let mut rep = bundle_report(&self.action, &self.proj);
        let round = (0..self.shear.dom().len()).all(|k| self.shear_inverse.at(self.shear.at(k)) == k)
            && (0..self.shear_inverse.dom().len()).all(|k| self.shear.at(self.shear_inverse.at(k)) == k);
        rep.record("inverse", "the stored inverse inverts the shear map", (!round).then(|| "tables disagree".into()));
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }
}

/// The outcome of a basicness test, with the independent criteria it is
/// cross-checked against.
#[derive(Debug, Clone)]
pub struct Basicness {
    pub basic: bool,
    pub bundle: Option<PrincipalBundle>,
    pub orbits: OrbitSpace,
    /// No arrow other than a unit fixes a point.
    pub free: bool,
    /// The arrow between two points of an orbit depends continuously on them.
    /// Only meaningful for free actions.
    pub continuous_arrow: bool,
}

impl Basicness {
    /// The criterion for the backend: freeness in FinSet, and freeness, a
    /// continuous arrow map and an orbit cover in FinTop.
    pub fn criterion(&self) -> bool {
        self.free && self.continuous_arrow && self.orbits.is_cover
    }
}

/// Whether `x·g = x` (or `g·x = x`) forces `g` to be a unit.
pub fn is_free(a: &Action) -> bool {
    let g = a.groupoid();
    a.pairs().all(|(x, k)| a.act(x, k) != x || k == g.unit(g.r(k)))
}

fn arrow_map_continuous(a: &Action, orbits: &OrbitSpace) -> bool {
    let fibre = fibre_product(&orbits.proj, &orbits.proj).expect("same projection");
    let g = a.groupoid();
    let mut table = Vec::with_capacity(fibre.len());
    for t in fibre.tuples() {
        let (x1, x2) = (t[0], t[1]);
        let hit = a.arrows_at(match a.side() {
            Side::Right => x1,
            Side::Left => x2,
        })
        .into_iter()
        .find(|&k| match a.side() {
            Side::Right => a.act(x1, k) == x2,
            Side::Left => a.act(x2, k) == x1,
        });
        match hit {
            Some(k) => table.push(k),
            None => return false,
        }
    }
    Mor::new(&fibre.apex, g.arrows(), table).is_ok()
}

/// Tests whether an action is principal over its orbit space.
pub fn is_basic(a: &Action) -> Result<Basicness> {
    let orbits = orbit_space(a)?;
    let bundle = PrincipalBundle::new(a, &orbits.proj).ok();
    let free = is_free(a);
    let continuous_arrow = free && arrow_map_continuous(a, &orbits);
    Ok(Basicness { basic: bundle.is_some(), bundle, orbits, free, continuous_arrow })
}

/// The pull-back of a principal bundle along `f: Z' -> Z`, with the
/// equivariant projection to the original carrier. Points are `(z', x)`.
pub fn pullback_bundle(b: &PrincipalBundle, f: &Mor) -> Result<(PrincipalBundle, GMap)> {
    let f = fit(f, f.dom(), &b.base, "base map")?;
    let fp = fibre_product(&f, &b.proj)?;
    let (tilde, proj) = pullback_data(b.action(), &b.proj, &f)?.expect("bundle projections are invariant");
    let bundle = PrincipalBundle::new(&tilde, &proj)?;
    let hat = GMap::new(&tilde, b.action(), fp.pr2().recast(tilde.carrier(), b.carrier())?)?;
    Ok((bundle, hat))
}

/// Pulls back arbitrary bundle data `(a, proj)` along `f`. Returns `None`
/// when the pulled-back multiplication is not well defined, that is when
/// `proj` is not invariant (or the multiplication is not total).
pub fn pullback_data(a: &Action, proj: &Mor, f: &Mor) -> Result<Option<(Action, Mor)>> {
    let proj = fit(proj, a.carrier(), proj.cod(), "projection")?;
    let f = fit(f, f.dom(), proj.cod(), "base map")?;
    if a.pairs().any(|(x, g)| proj.at(a.act(x, g)) != proj.at(x)) {
        return Ok(None);
    }
    let fp = fibre_product(&f, &proj)?;
    let pr2 = fp.pr2().clone();
    let anchor = a.anchor().after(&pr2)?;
    let tilde = Action::from_fn(a.groupoid(), a.side(), &anchor, |p, g| {
        let t = fp.tuple(p);
        fp.find(&[t[0], a.act(t[1], g)]).expect("invariant projection")
    })?;
    Ok(Some((tilde, fp.pr1().clone())))
}

/// The unique isomorphism from another pull-back `(other, hat)` of `b`
/// along `f` to the canonical one: `x ↦ (p'(x), hat(x))`.
pub fn pullback_comparison(b: &PrincipalBundle, f: &Mor, other: &PrincipalBundle, hat: &GMap) -> Result<GMap> {
    let (canon, _) = pullback_bundle(b, f)?;
    let fp = fibre_product(&fit(f, f.dom(), &b.base, "base map")?, &b.proj)?;
    let pp = fit(other.proj(), other.carrier(), f.dom(), "projection")?;
    let h = fit(&hat.map, other.carrier(), b.carrier(), "equivariant map")?;
    let table = (0..other.carrier().len())
        .map(|x| {
            fp.find(&[pp.at(x), h.at(x)])
                .ok_or_else(|| Error::BoundaryMismatch("the square does not commute".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let phi = Mor::new(other.carrier(), canon.carrier(), table)?;
    if !phi.is_iso() {
        return Err(Error::Invalid("comparison map is not invertible".into()));
    }
    GMap::new(other.action(), canon.action(), phi)
}

/// The map of bases induced by an equivariant map of principal bundles.
pub fn induced_base_map(b1: &PrincipalBundle, b2: &PrincipalBundle, f: &GMap) -> Result<Mor> {
    if !f.from.same_as(b1.action()) || !f.to.same_as(b2.action()) {
        return Err(Error::BoundaryMismatch("the map does not run between the two bundles".into()));
    }
    let m = fit(&f.map, b1.carrier(), b2.carrier(), "equivariant map")?;
    factor_through(&b1.proj, &b2.proj.after(&m)?)
}

/// How an equivariant map and its base map transfer isomorphism and cover
/// properties.
pub fn base_map_transfers(b1: &PrincipalBundle, b2: &PrincipalBundle, f: &GMap) -> Result<Report> {
    let base = induced_base_map(b1, b2, f)?;
    let top = &f.map;
    let mut rep = Report::new();
    let flags = |m: &Mor| (m.is_iso(), m.is_cover());
    let ((ti, tc), (bi, bc)) = (flags(top), flags(&base));
    rep.record("iso", "f is invertible iff f/G is", (ti != bi).then(|| format!("f {ti}, f/G {bi}")));
    rep.record("cover", "f is a cover iff f/G is", (tc != bc).then(|| format!("f {tc}, f/G {bc}")));
    let square = (0..b1.carrier().len()).all(|x| b2.proj.at(top.at(x)) == base.at(b1.proj.at(x)));
    rep.record("square", "p2 ∘ f = f/G ∘ p1", (!square).then(|| "does not commute".into()));
    Ok(rep)
}
