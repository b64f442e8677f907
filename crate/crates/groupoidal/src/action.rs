//! Groupoid actions, equivariant maps, transformation groupoids, bibundles
//! and actors.

use std::sync::Arc;

use itertools::Itertools;

use crate::backends::all_maps;
use crate::error::{Error, Result};
use crate::groupoid::{same_grpd, Groupoid, Grpd};
use crate::morphism::{functors_with_objects, section_product, Functor};
use crate::report::{Outcome, Report};
use crate::site::{chain_product, fibre_product, fit, same, FibreProduct, Mor, Space};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
        }
    }
}

/// An action of `g` on `carrier`.
///
/// A right action has anchor `s` and is defined on `X ×_{s,G0,r} G1` with
/// tuples `(x, g)`. A left action has anchor `r` and is defined on
/// `G1 ×_{s,G0,r} X` with tuples `(g, x)`.
#[derive(Debug, Clone)]
pub struct Action {
    g: Grpd,
    side: Side,
    carrier: Space,
    anchor: Mor,
    dom: FibreProduct,
    mult: Mor,
}

fn action_domain(g: &Grpd, side: Side, anchor: &Mor) -> Result<FibreProduct> {
    match side {
        Side::Right => fibre_product(anchor, g.range()),
        Side::Left => fibre_product(g.source(), anchor),
    }
}

impl Action {
    pub fn new(g: &Grpd, side: Side, anchor: Mor, mult: Mor) -> Result<Action> {
        let carrier = anchor.dom().clone();
        let anchor = fit(&anchor, &carrier, g.objects(), "anchor")?;
        let dom = action_domain(g, side, &anchor)?;
        let mult = fit(&mult, &dom.apex, &carrier, "action map")?;
        Ok(Action { g: g.clone(), side, carrier, anchor, dom, mult })
    }

    /// Builds the action map from `f(x, g)`, the point `x` acted on by the
    /// arrow `g`, whatever the side.
    pub fn from_fn(g: &Grpd, side: Side, anchor: &Mor, f: impl Fn(usize, usize) -> usize) -> Result<Action> {
        let anchor = fit(anchor, anchor.dom(), g.objects(), "anchor")?;
        let dom = action_domain(g, side, &anchor)?;
        let mult = match side {
            Side::Right => dom.map_to(anchor.dom(), |t| f(t[0], t[1]))?,
            Side::Left => dom.map_to(anchor.dom(), |t| f(t[1], t[0]))?,
        };
        Ok(Action { g: g.clone(), side, carrier: anchor.dom().clone(), anchor, dom, mult })
    }

    pub fn right(g: &Grpd, anchor: &Mor, f: impl Fn(usize, usize) -> usize) -> Result<Action> {
        Action::from_fn(g, Side::Right, anchor, f)
    }

    pub fn left(g: &Grpd, anchor: &Mor, f: impl Fn(usize, usize) -> usize) -> Result<Action> {
        Action::from_fn(g, Side::Left, anchor, f)
    }

    /// The action on the objects: `r(g)·g = s(g)` on the right, `g·s(g) = r(g)`
    /// on the left, with identity anchor.
    pub fn canonical(g: &Grpd, side: Side) -> Action {
        let id = Mor::identity(g.objects());
        let f = |_x: usize, a: usize| match side {
            Side::Right => g.s(a),
            Side::Left => g.r(a),
        };
        Action::from_fn(g, side, &id, f).expect("canonical action")
    }

    /// Multiplication on the arrows: anchor `s` on the right, `r` on the left.
    pub fn multiplication(g: &Grpd, side: Side) -> Action {
        match side {
            Side::Right => Action::from_fn(g, side, g.source(), |h, a| g.mul(h, a)),
            Side::Left => Action::from_fn(g, side, g.range(), |h, a| g.mul(a, h)),
        }
        .expect("multiplication action")
    }

    pub fn groupoid(&self) -> &Grpd {
        &self.g
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn carrier(&self) -> &Space {
        &self.carrier
    }

    pub fn anchor(&self) -> &Mor {
        &self.anchor
    }

    /// The fibre product the action map is defined on.
    pub fn domain(&self) -> &FibreProduct {
        &self.dom
    }

    pub fn mult(&self) -> &Mor {
        &self.mult
    }

    #[inline]
    pub fn anchor_at(&self, x: usize) -> usize {
        self.anchor.at(x)
    }

    /// The index in [`Action::domain`] of `x` acted on by `a`.
    pub fn pair(&self, x: usize, a: usize) -> Option<usize> {
        match self.side {
            Side::Right => self.dom.find(&[x, a]),
            Side::Left => self.dom.find(&[a, x]),
        }
    }

    /// `x·a` or `a·x`, if defined.
    pub fn try_act(&self, x: usize, a: usize) -> Option<usize> {
        self.pair(x, a).map(|k| self.mult.at(k))
    }

    pub fn act(&self, x: usize, a: usize) -> usize {
        self.try_act(x, a).unwrap_or_else(|| {
            panic!("{} cannot act on {}", self.g.arrow_name(a), self.carrier.name(x))
        })
    }

    /// `(point, arrow)` for each element of the domain.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.dom.tuples().iter().map(move |t| match self.side {
            Side::Right => (t[0], t[1]),
            Side::Left => (t[1], t[0]),
        })
    }

    /// Arrows that can act on `x`.
    pub fn arrows_at(&self, x: usize) -> Vec<usize> {
        let o = self.anchor_at(x);
        (0..self.g.len1())
            .filter(|&a| match self.side {
                Side::Right => self.g.r(a) == o,
                Side::Left => self.g.s(a) == o,
            })
            .collect()
    }

    /// The shear map: `(x, g) ↦ (x·g, g)` into `X ×_{s,G0,s} G1` on the
    /// right, `(g, x) ↦ (g, g·x)` into `G1 ×_{r,G0,r} X` on the left.
    pub fn shear(&self) -> Result<(FibreProduct, Mor)> {
        let g = &self.g;
        let (target, map) = match self.side {
            Side::Right => {
                let target = fibre_product(&self.anchor, g.source())?;
                let t = &target;
                let mut table = Vec::with_capacity(self.dom.len());
                for (k, u) in self.dom.tuples().iter().enumerate() {
                    table.push(t.find(&[self.mult.at(k), u[1]]).ok_or_else(|| self.anchor_error(u[0], u[1]))?);
                }
                let m = Mor::new(&self.dom.apex, &target.apex, table)?;
                (target, m)
            }
            Side::Left => {
                let target = fibre_product(g.range(), &self.anchor)?;
                let t = &target;
                let mut table = Vec::with_capacity(self.dom.len());
                for (k, u) in self.dom.tuples().iter().enumerate() {
                    table.push(t.find(&[u[0], self.mult.at(k)]).ok_or_else(|| self.anchor_error(u[1], u[0]))?);
                }
                let m = Mor::new(&self.dom.apex, &target.apex, table)?;
                (target, m)
            }
        };
        Ok((target, map))
    }

    fn anchor_error(&self, x: usize, a: usize) -> Error {
        Error::Invalid(format!(
            "{} acting on {} lands over the wrong object",
            self.g.arrow_name(a),
            self.carrier.name(x)
        ))
    }

    fn label(&self, x: usize, a: usize) -> String {
        match self.side {
            Side::Right => format!("{}·{}", self.carrier.name(x), self.g.arrow_name(a)),
            Side::Left => format!("{}·{}", self.g.arrow_name(a), self.carrier.name(x)),
        }
    }

    /// The action axioms, the three equivalent forms of the unit law, and
    /// whether the anchor is a cover.
    pub fn validate(&self) -> Report {
        let g = &self.g;
        let mut rep = Report::new();
        let anchor_bad = self.pairs().find(|&(x, a)| {
            let y = self.act(x, a);
            match self.side {
                Side::Right => self.anchor_at(y) != g.s(a),
                Side::Left => self.anchor_at(y) != g.r(a),
            }
        });
        let anchor_law = match self.side {
            Side::Right => "s(x·g) = s(g)",
            Side::Left => "r(g·x) = r(g)",
        };
        rep.record("anchor", anchor_law, anchor_bad.map(|(x, a)| self.label(x, a)));
        let assoc_bad = if anchor_bad.is_some() {
            None
        } else {
            self.pairs()
                .flat_map(|(x, a)| self.arrows_at(self.act(x, a)).into_iter().map(move |b| (x, a, b)))
                .find(|&(x, a, b)| match self.side {
                    // (x·a)·b = x·(a·b)
                    Side::Right => self.act(self.act(x, a), b) != self.act(x, g.mul(a, b)),
                    // b·(a·x) = (b·a)·x
                    Side::Left => self.act(self.act(x, a), b) != self.act(x, g.mul(b, a)),
                })
        };
        let assoc_law = match self.side {
            Side::Right => "(x·g1)·g2 = x·(g1·g2)",
            Side::Left => "g1·(g2·x) = (g1·g2)·x",
        };
        if anchor_bad.is_some() {
            rep.push("associative", assoc_law, Outcome::Fail, Some("anchor law fails first".into()));
        } else {
            rep.record(
                "associative",
                assoc_law,
                assoc_bad.map(|(x, a, b)| format!("{} then {}", self.label(x, a), g.arrow_name(b))),
            );
        }
        let unit_bad = (0..self.carrier.len()).find(|&x| self.act(x, g.unit(self.anchor_at(x))) != x);
        rep.record(
            "unital",
            "x·1 = x",
            unit_bad.map(|x| self.carrier.name(x).to_string()),
        );
        let epi = self.mult.is_surjective();
        let cover = self.mult.is_cover();
        let shear = self.shear().map(|(_, m)| m.is_iso()).unwrap_or(false);
        rep.record("action map onto", "the action map is an epimorphism", (!epi).then(|| "not surjective".into()));
        rep.record("action map cover", "the action map is a cover", (!cover).then(|| "not a cover".into()));
        rep.record("shear", "the shear map is invertible", (!shear).then(|| "not invertible".into()));
        if anchor_bad.is_none() && assoc_bad.is_none() {
            let forms = [unit_bad.is_none(), epi, cover, shear];
            rep.record(
                "unit forms agree",
                "given the anchor and associativity laws, the unit law, the epimorphism, cover and shear conditions agree",
                (!forms.iter().all_equal()).then(|| format!("unit/epi/cover/shear = {forms:?}")),
            );
        }
        let sheaf = self.is_sheaf();
        rep.push(
            "sheaf",
            "the anchor is a cover",
            Outcome::Info,
            Some(if sheaf { "sheaf".into() } else { "not a sheaf".into() }),
        );
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    pub fn is_sheaf(&self) -> bool {
        self.anchor.is_cover()
    }

    /// The same action seen from the other side: `g·x := x·g⁻¹` and
    /// `x·g := g⁻¹·x`.
    pub fn flip(&self) -> Action {
        let g = &self.g;
        let side = match self.side {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        };
        Action::from_fn(g, side, &self.anchor, |x, a| self.act(x, g.inv(a))).expect("flipped action")
    }

    pub fn to_side(&self, side: Side) -> Action {
        if self.side == side {
            self.clone()
        } else {
            self.flip()
        }
    }

    /// Same groupoid, side, carrier and tables.
    pub fn same_as(&self, other: &Action) -> bool {
        same_grpd(&self.g, &other.g)
            && self.side == other.side
            && same(&self.carrier, &other.carrier)
            && self.anchor.table() == other.anchor.table()
            && self.mult.table() == other.mult.table()
    }

    /// Whether `f: X -> Z` is constant along the action.
    pub fn is_invariant(&self, f: &Mor) -> bool {
        same(f.dom(), &self.carrier) && self.pairs().all(|(x, a)| f.at(self.act(x, a)) == f.at(x))
    }

    /// The same action transported to an equal carrier object.
    pub fn recast(&self, carrier: &Space) -> Result<Action> {
        let anchor = fit(&self.anchor, carrier, self.g.objects(), "anchor")?;
        Action::from_fn(&self.g, self.side, &anchor, |x, a| self.act(x, a))
    }
}

/// An equivariant map between two actions of the same groupoid on the same
/// side.
#[derive(Debug, Clone)]
pub struct GMap {
    pub from: Action,
    pub to: Action,
    pub map: Mor,
}

impl GMap {
    pub fn new(from: &Action, to: &Action, map: Mor) -> Result<GMap> {
        if !same_grpd(&from.g, &to.g) || from.side != to.side {
            return Err(Error::BoundaryMismatch("actions of different groupoids or sides".into()));
        }
        let map = fit(&map, &from.carrier, &to.carrier, "equivariant map")?;
        Ok(GMap { from: from.clone(), to: to.clone(), map })
    }

    pub fn identity(a: &Action) -> GMap {
        GMap { from: a.clone(), to: a.clone(), map: Mor::identity(&a.carrier) }
    }

    pub fn validate(&self) -> Report {
        let (a, b, f) = (&self.from, &self.to, &self.map);
        let mut rep = Report::new();
        rep.record(
            "anchor",
            "the map preserves anchors",
            (0..a.carrier.len())
                .find(|&x| b.anchor_at(f.at(x)) != a.anchor_at(x))
                .map(|x| a.carrier.name(x).to_string()),
        );
        rep.record(
            "equivariant",
            "f(x·g) = f(x)·g",
            a.pairs()
                .find(|&(x, g)| b.try_act(f.at(x), g) != Some(f.at(a.act(x, g))))
                .map(|(x, g)| a.label(x, g)),
        );
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    pub fn after(&self, first: &GMap) -> Result<GMap> {
        GMap::new(&first.from, &self.to, self.map.after(&first.map)?)
    }
}

/// Every equivariant map between two actions.
pub fn all_gmaps(from: &Action, to: &Action) -> Vec<GMap> {
    all_maps(&from.carrier, &to.carrier)
        .into_iter()
        .filter_map(|f| GMap::new(from, to, f).ok())
        .filter(|m| m.is_valid())
        .collect()
}

/// Every action of `g` on `carrier` from the given side, found by trying all
/// anchors and all action tables compatible with them. Fails once more than
/// `budget` tables would be tried.
pub fn all_actions(g: &Grpd, carrier: &Space, side: Side, budget: usize) -> Result<Vec<Action>> {
    let mut out = Vec::new();
    let mut tried = 0usize;
    for anchor in all_maps(carrier, g.objects()) {
        let dom = action_domain(g, side, &anchor)?;
        // the possible images of each pair, with units forced
        let choices: Vec<Vec<usize>> = dom
            .tuples()
            .iter()
            .map(|t| {
                let (x, a) = match side {
                    Side::Right => (t[0], t[1]),
                    Side::Left => (t[1], t[0]),
                };
                if a == g.unit(anchor.at(x)) {
                    return vec![x];
                }
                let end = match side {
                    Side::Right => g.s(a),
                    Side::Left => g.r(a),
                };
                (0..carrier.len()).filter(|&y| anchor.at(y) == end).collect()
            })
            .collect();
        let count = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
        tried = match count.and_then(|c| tried.checked_add(c)) {
            Some(t) if t <= budget => t,
            _ => return Err(Error::BudgetExceeded { needed: count.unwrap_or(usize::MAX), budget }),
        };
        if choices.is_empty() {
            let mult = Mor::new(&dom.apex, carrier, vec![])?;
            let a = Action { g: g.clone(), side, carrier: carrier.clone(), anchor, dom, mult };
            if a.is_valid() {
                out.push(a);
            }
            continue;
        }
        for table in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product() {
            let Ok(mult) = Mor::new(&dom.apex, carrier, table) else { continue };
            let a = Action { g: g.clone(), side, carrier: carrier.clone(), anchor: anchor.clone(), dom: dom.clone(), mult };
            if a.is_valid() {
                out.push(a);
            }
        }
    }
    Ok(out)
}

/// The transformation groupoid `X ⋊ G` of a right action, or `G ⋉ X` of a
/// left one. Its arrows are the domain of the action.
pub fn transformation_groupoid(a: &Action) -> Result<Grpd> {
    let report = a.validate();
    if !report.passed() {
        return Err(Error::Invalid(format!("not an action: {}", report.failures()[0].check)));
    }
    let g = &a.g;
    let d = &a.dom;
    let x = a.carrier.clone();
    let arrows = d.apex.clone();
    let g1 = d.pr1().clone();
    let g2 = d.pr2().clone();
    let built = match a.side {
        Side::Right => {
            // (x, g) goes from x·g to x; (x1, g1)·(x2, g2) = (x1, g1·g2)
            let u = Mor::from_fn(&x, &arrows, |p| d.at(&[p, g.unit(a.anchor_at(p))]))?;
            let i = Mor::from_fn(&arrows, &arrows, |k| {
                let t = d.tuple(k);
                d.at(&[a.mult.at(k), g.inv(t[1])])
            })?;
            Groupoid::from_tables(
                x,
                arrows.clone(),
                g1,
                a.mult.clone(),
                |k, l| d.at(&[d.tuple(k)[0], g.mul(d.tuple(k)[1], d.tuple(l)[1])]),
                u,
                i,
            )?
        }
        Side::Left => {
            // (g, x) goes from x to g·x; (g1, x1)·(g2, x2) = (g1·g2, x2)
            let u = Mor::from_fn(&x, &arrows, |p| d.at(&[g.unit(a.anchor_at(p)), p]))?;
            let i = Mor::from_fn(&arrows, &arrows, |k| {
                let t = d.tuple(k);
                d.at(&[g.inv(t[0]), a.mult.at(k)])
            })?;
            Groupoid::from_tables(
                x,
                arrows.clone(),
                a.mult.clone(),
                g2,
                |k, l| d.at(&[g.mul(d.tuple(k)[0], d.tuple(l)[0]), d.tuple(l)[1]]),
                u,
                i,
            )?
        }
    };
    Ok(Arc::new(built))
}

/// The fibre product of two equivariant maps into the same action, with the
/// diagonal action and both projections.
#[derive(Debug, Clone)]
pub struct ActionProduct {
    pub action: Action,
    pub carrier: FibreProduct,
    pub pr1: GMap,
    pub pr2: GMap,
}

pub fn action_fibre_product(f1: &GMap, f2: &GMap) -> Result<ActionProduct> {
    if !f1.to.same_as(&f2.to) {
        return Err(Error::BoundaryMismatch("equivariant maps into different actions".into()));
    }
    let (a1, a2) = (&f1.from, &f2.from);
    let fp = fibre_product(&f1.map, &f2.map)?;
    let anchor = a1.anchor.after(fp.pr1())?;
    let action = Action::from_fn(&a1.g, a1.side, &anchor, |k, g| {
        let t = fp.tuple(k);
        fp.at(&[a1.act(t[0], g), a2.act(t[1], g)])
    })?;
    let pr1 = GMap::new(&action, a1, fp.pr1().clone())?;
    let pr2 = GMap::new(&action, a2, fp.pr2().clone())?;
    Ok(ActionProduct { action, carrier: fp, pr1, pr2 })
}

impl ActionProduct {
    /// The map into the fibre product induced by two equivariant maps out of
    /// the same action, if they agree downstairs.
    pub fn pairing(&self, h1: &GMap, h2: &GMap) -> Result<GMap> {
        if !h1.from.same_as(&h2.from) {
            return Err(Error::BoundaryMismatch("maps out of different actions".into()));
        }
        let map = self.carrier.pairing(&[h1.map.clone(), h2.map.clone()])?;
        GMap::new(&h1.from, &self.action, map)
    }
}

/// A `G, H`-bibundle: commuting left `G`- and right `H`-actions on one
/// carrier. The left anchor is `r`, the right one `s`.
#[derive(Debug, Clone)]
pub struct Bibundle {
    pub left: Action,
    pub right: Action,
}

impl Bibundle {
    pub fn new(left: Action, right: Action) -> Result<Bibundle> {
        if left.side != Side::Left || right.side != Side::Right {
            return Err(Error::BoundaryMismatch("a bibundle needs a left and a right action".into()));
        }
        if !same(&left.carrier, &right.carrier) {
            return Err(Error::BoundaryMismatch("the two actions live on different carriers".into()));
        }
        let right = if Arc::ptr_eq(&left.carrier, &right.carrier) { right } else { right.recast(&left.carrier)? };
        Ok(Bibundle { left, right })
    }

    /// Builds both actions from formulas on the same carrier.
    pub fn from_fns(
        g: &Grpd,
        h: &Grpd,
        r: &Mor,
        s: &Mor,
        left: impl Fn(usize, usize) -> usize,
        right: impl Fn(usize, usize) -> usize,
    ) -> Result<Bibundle> {
        let s = fit(s, r.dom(), h.objects(), "right anchor")?;
        Bibundle::new(Action::left(g, r, left)?, Action::right(h, &s, right)?)
    }

    /// `G1` with left and right multiplication.
    pub fn unit(g: &Grpd) -> Bibundle {
        Bibundle::new(Action::multiplication(g, Side::Left), Action::multiplication(g, Side::Right))
            .expect("unit bibundle")
    }

    pub fn g(&self) -> &Grpd {
        &self.left.g
    }

    pub fn h(&self) -> &Grpd {
        &self.right.g
    }

    pub fn carrier(&self) -> &Space {
        &self.left.carrier
    }

    pub fn r(&self) -> &Mor {
        &self.left.anchor
    }

    pub fn s(&self) -> &Mor {
        &self.right.anchor
    }

    /// `g·x`.
    pub fn lact(&self, g: usize, x: usize) -> usize {
        self.left.act(x, g)
    }

    /// `x·h`.
    pub fn ract(&self, x: usize, h: usize) -> usize {
        self.right.act(x, h)
    }

    pub fn validate(&self) -> Report {
        let mut rep = Report::new();
        rep.extend("left", self.left.validate());
        rep.extend("right", self.right.validate());
        let x = self.carrier();
        rep.record(
            "left keeps s",
            "s(g·x) = s(x)",
            self.left.pairs().find(|&(p, g)| self.s().at(self.lact(g, p)) != self.s().at(p)).map(|(p, g)| self.left.label(p, g)),
        );
        rep.record(
            "right keeps r",
            "r(x·h) = r(x)",
            self.right.pairs().find(|&(p, h)| self.r().at(self.ract(p, h)) != self.r().at(p)).map(|(p, h)| self.right.label(p, h)),
        );
        let commute_bad = self.left.pairs().find_map(|(p, g)| {
            self.right.arrows_at(p).into_iter().find_map(|h| {
                let gx = self.lact(g, p);
                let lhs = self.right.try_act(gx, h);
                let rhs = self.right.try_act(p, h).and_then(|xh| self.left.try_act(xh, g));
                (lhs != rhs || lhs.is_none())
                    .then(|| format!("{}·{}·{}", self.g().arrow_name(g), x.name(p), self.h().arrow_name(h)))
            })
        });
        rep.record("commute", "(g·x)·h = g·(x·h)", commute_bad);
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    /// Same actions on the same carrier.
    pub fn same_as(&self, other: &Bibundle) -> bool {
        self.left.same_as(&other.left) && self.right.same_as(&other.right)
    }

    /// `G ⋉ X ⋊ H` with arrows `(g, x, h)` from `x·h` to `g·x`.
    pub fn transformation_groupoid(&self) -> Result<(Grpd, FibreProduct)> {
        if !self.is_valid() {
            return Err(Error::Invalid("not a bibundle".into()));
        }
        let (g, h) = (self.g(), self.h());
        let tr = chain_product(&[(g.source(), self.r()), (self.s(), h.range())])?;
        let x = self.carrier().clone();
        let arrows = tr.apex.clone();
        let range = tr.map_to(&x, |t| self.lact(t[0], t[1]))?;
        let source = tr.map_to(&x, |t| self.ract(t[1], t[2]))?;
        let u = Mor::from_fn(&x, &arrows, |p| tr.at(&[g.unit(self.r().at(p)), p, h.unit(self.s().at(p))]))?;
        let i = tr.map_to(&arrows, |t| {
            let gxh = self.ract(self.lact(t[0], t[1]), t[2]);
            tr.at(&[g.inv(t[0]), gxh, h.inv(t[2])])
        })?;
        let built = Groupoid::from_tables(
            x,
            arrows,
            range,
            source,
            |k, l| {
                let (a, b) = (tr.tuple(k), tr.tuple(l));
                tr.at(&[g.mul(a[0], b[0]), self.lact(g.inv(b[0]), a[1]), h.mul(a[2], b[2])])
            },
            u,
            i,
        )?;
        Ok((Arc::new(built), tr))
    }
}

/// A map of bibundles, equivariant for both actions.
pub fn is_bibundle_map(from: &Bibundle, to: &Bibundle, f: &Mor) -> bool {
    GMap::new(&from.left, &to.left, f.clone()).is_ok_and(|m| m.is_valid())
        && GMap::new(&from.right, &to.right, f.clone()).is_ok_and(|m| m.is_valid())
}

/// An actor `G -> H`: a left action of `G` on `H1` commuting with right
/// multiplication.
#[derive(Debug, Clone)]
pub struct Actor {
    g: Grpd,
    h: Grpd,
    action: Action,
}

/// The data equivalent to an actor: a left action of `G` on `H0` and a
/// functor `G ⋉ H0 -> H` that is the identity on objects.
#[derive(Debug, Clone)]
pub struct ActorPair {
    pub base: Action,
    pub semidirect: Grpd,
    pub functor: Functor,
}

impl Actor {
    pub fn new(h: &Grpd, action: Action) -> Result<Actor> {
        if action.side != Side::Left {
            return Err(Error::BoundaryMismatch("an actor is a left action".into()));
        }
        if !same(&action.carrier, h.arrows()) {
            return Err(Error::BoundaryMismatch("an actor acts on the arrows of its target".into()));
        }
        let action = action.recast(h.arrows())?;
        Ok(Actor { g: action.g.clone(), h: h.clone(), action })
    }

    /// Left multiplication of `G` on `G1`.
    pub fn identity(g: &Grpd) -> Actor {
        Actor::new(g, Action::multiplication(g, Side::Left)).expect("identity actor")
    }

    /// The actor of a functor with invertible object map: anchor
    /// `(F0)⁻¹ ∘ r` and `g·h = F(g)·h`.
    pub fn from_functor(f: &Functor) -> Result<Actor> {
        let inv = f.f0().inverse().ok_or_else(|| Error::Invalid("object map is not invertible".into()))?;
        let h = f.dst();
        let anchor = inv.after(h.range())?;
        let action = Action::left(f.src(), &anchor, |k, g| h.mul(f.arr(g), k))?;
        Actor::new(h, action)
    }

    /// The actor of a left action on `H0` and a functor `G ⋉ H0 -> H`,
    /// `g·h = F(g, r(h))·h`.
    pub fn from_pair(base: &Action, functor: &Functor) -> Result<Actor> {
        if base.side != Side::Left {
            return Err(Error::BoundaryMismatch("the base action must be a left action".into()));
        }
        let h = functor.dst().clone();
        if !same(base.carrier(), h.objects()) {
            return Err(Error::BoundaryMismatch("the base action must act on the objects".into()));
        }
        let dom = base.domain();
        if !same(&dom.apex, functor.src().arrows()) {
            return Err(Error::BoundaryMismatch("the functor must start at the semidirect product".into()));
        }
        let anchor = base.anchor().after(&fit(h.range(), h.arrows(), base.carrier(), "range")?)?;
        let action = Action::left(base.groupoid(), &anchor, |k, g| {
            h.mul(functor.arr(dom.at(&[g, h.r(k)])), k)
        })?;
        Actor::new(&h, action)
    }

    pub fn g(&self) -> &Grpd {
        &self.g
    }

    pub fn h(&self) -> &Grpd {
        &self.h
    }

    pub fn action(&self) -> &Action {
        &self.action
    }

    /// `g·h`.
    pub fn act(&self, g: usize, k: usize) -> usize {
        self.action.act(k, g)
    }

    pub fn validate(&self) -> Report {
        let h = &self.h;
        let mut rep = Report::new();
        rep.extend("action", self.action.validate());
        let bad = self.action.pairs().find_map(|(k, g)| {
            (0..h.len1()).filter(|&l| h.r(l) == h.s(k)).find_map(|l| {
                let kl = h.mul(k, l);
                let same_anchor = self.action.anchor_at(kl) == self.action.anchor_at(k);
                let lhs = h.try_mul(self.act(g, k), l);
                let rhs = same_anchor.then(|| self.act(g, kl));
                (lhs != rhs).then(|| {
                    format!("{}·{}·{}", self.g.arrow_name(g), h.arrow_name(k), h.arrow_name(l))
                })
            })
        });
        rep.record("commute", "(g·h1)·h2 = g·(h1·h2)", bad);
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    pub fn same_as(&self, other: &Actor) -> bool {
        same_grpd(&self.h, &other.h) && self.action.same_as(&other.action)
    }

    /// The base anchor `r0: H0 -> G0`, `r0(x) = r(1_x)`.
    pub fn base_anchor(&self) -> Result<Mor> {
        let a = &self.action;
        Mor::from_fn(self.h.objects(), self.g.objects(), |x| a.anchor_at(self.h.unit(x)))
    }

    /// The left action on `H0` and the identity-on-objects functor
    /// `G ⋉ H0 -> H`, `F(g, x) = g·1_x`.
    pub fn to_pair(&self) -> Result<ActorPair> {
        let (g, h) = (&self.g, &self.h);
        let r0 = self.base_anchor()?;
        let base = Action::left(g, &r0, |x, a| h.r(self.act(a, h.unit(x))))?;
        let semidirect = transformation_groupoid(&base)?;
        let dom = base.domain();
        let f1 = dom.map_to(h.arrows(), |t| self.act(t[0], h.unit(t[1])))?;
        let f0 = Mor::identity(h.objects());
        let functor = Functor::new(&semidirect, h, f0, f1)?;
        Ok(ActorPair { base, semidirect, functor })
    }

    /// The induced left `G`-action on a left `H`-action: anchor `r0 ∘ r`,
    /// `g·x = F(g, r(x))·x`.
    pub fn apply(&self, x: &Action) -> Result<Action> {
        if x.side != Side::Left || !same_grpd(&x.g, &self.h) {
            return Err(Error::BoundaryMismatch("an actor acts on left actions of its target".into()));
        }
        let h = &self.h;
        let r0 = self.base_anchor()?;
        let anchor = r0.after(&fit(x.anchor(), x.carrier(), h.objects(), "anchor")?)?;
        Action::left(&self.g, &anchor, |p, g| x.act(p, self.act(g, h.unit(x.anchor_at(p)))))
    }
}

/// `b ∘ a` for actors `a: G -> H` and `b: H -> K`: the `G`-action on `K1`
/// with `(g·h)·k = g·(h·k)`.
pub fn compose_actors(b: &Actor, a: &Actor) -> Result<Actor> {
    if !same_grpd(&a.h, &b.g) {
        return Err(Error::BoundaryMismatch("actors do not meet".into()));
    }
    Actor::new(&b.h, a.apply(&b.action)?)
}

/// Every actor `G -> H`, through the pairs of a left action on `H0` and an
/// identity-on-objects functor.
pub fn all_actors(g: &Grpd, h: &Grpd, budget: usize) -> Result<Vec<Actor>> {
    let mut out = Vec::new();
    for base in all_actions(g, h.objects(), Side::Left, budget)? {
        let semidirect = transformation_groupoid(&base)?;
        for f in functors_with_objects(&semidirect, h, &Mor::identity(h.objects()))? {
            out.push(Actor::from_pair(&base, &f)?);
        }
    }
    Ok(out)
}

/// The section `Φ` with `φ(h) = Φ(r(h))·h`, if `φ: H1 -> H1` is a right
/// `H`-map.
pub fn section_of_right_map(h: &Grpd, phi: &Mor) -> Option<Mor> {
    let right = Action::multiplication(h, Side::Right);
    let map = GMap::new(&right, &right, phi.clone()).ok()?;
    if !map.is_valid() {
        return None;
    }
    let sec = Mor::from_fn(h.objects(), h.arrows(), |x| phi.at(h.unit(x))).ok()?;
    (0..h.len1()).all(|k| h.try_mul(sec.at(h.r(k)), k) == Some(phi.at(k))).then_some(sec)
}

/// Left multiplication by a section, `h ↦ Φ(r(h))·h`.
pub fn section_map(h: &Grpd, phi: &Mor) -> Result<Mor> {
    let mut table = Vec::with_capacity(h.len1());
    for k in 0..h.len1() {
        table.push(
            h.try_mul(phi.at(h.r(k)), k)
                .ok_or_else(|| Error::NotASection(format!("{} cannot multiply {}", h.arrow_name(phi.at(h.r(k))), h.arrow_name(k))))?,
        );
    }
    Mor::new(h.arrows(), h.arrows(), table)
}

/// A 2-arrow between actors `G -> H`: a section `Φ` of `s` on `H` whose
/// left multiplication is a map of bibundles between them.
#[derive(Debug, Clone)]
pub struct ActorCell {
    pub from: Actor,
    pub to: Actor,
    pub phi: Mor,
}

impl ActorCell {
    pub fn new(from: &Actor, to: &Actor, phi: Mor) -> Result<ActorCell> {
        if !same_grpd(&from.g, &to.g) || !same_grpd(&from.h, &to.h) {
            return Err(Error::BoundaryMismatch("actors are not parallel".into()));
        }
        let phi = fit(&phi, from.h.objects(), from.h.arrows(), "section")?;
        Ok(ActorCell { from: from.clone(), to: to.clone(), phi })
    }

    pub fn identity(a: &Actor) -> ActorCell {
        ActorCell { from: a.clone(), to: a.clone(), phi: a.h.unit_map().clone() }
    }

    pub fn validate(&self) -> Report {
        let h = &self.from.h;
        let mut rep = Report::new();
        rep.record(
            "section",
            "s(Φ(x)) = x",
            (0..h.len0()).find(|&x| h.s(self.phi.at(x)) != x).map(|x| h.object_name(x).to_string()),
        );
        if rep.passed() {
            let map = section_map(h, &self.phi).expect("section");
            rep.record(
                "intertwines",
                "Φ(r(g·h))·(g·h) = g·(Φ(r(h))·h)",
                self.from.action.pairs().find_map(|(k, g)| {
                    let lhs = map.at(self.from.act(g, k));
                    let rhs = self.to.action.try_act(map.at(k), g);
                    (Some(lhs) != rhs).then(|| format!("{}·{}", self.from.g.arrow_name(g), h.arrow_name(k)))
                }),
            );
        }
        rep
    }

    pub fn is_valid(&self) -> bool {
        self.validate().passed()
    }

    pub fn same_as(&self, other: &ActorCell) -> bool {
        self.from.same_as(&other.from) && self.to.same_as(&other.to) && self.phi.table() == other.phi.table()
    }
}

/// `Ψ ∘ Φ` for `Φ: a1 ⇒ a2` and `Ψ: a2 ⇒ a3`.
pub fn actor_vertical(psi: &ActorCell, phi: &ActorCell) -> Result<ActorCell> {
    if !phi.to.same_as(&psi.from) {
        return Err(Error::NotComposable("2-arrows do not meet".into()));
    }
    let prod = section_product(&phi.from.h, &psi.phi, &phi.phi)?;
    ActorCell::new(&phi.from, &psi.to, prod)
}

/// `Ψ • Φ: x ↦ Φ(r0'_1(x)) ·₂' Ψ(x)` for `Φ: m1 ⇒ m2` between actors
/// `G -> H` and `Ψ: m1' ⇒ m2'` between actors `H -> K`, where `r0'_1` is the
/// base anchor of `m1'` and `·₂'` the action of `m2'`.
pub fn actor_horizontal(psi: &ActorCell, phi: &ActorCell) -> Result<ActorCell> {
    if !same_grpd(&phi.from.h, &psi.from.g) {
        return Err(Error::NotComposable("2-arrows do not meet".into()));
    }
    let from = compose_actors(&psi.from, &phi.from)?;
    let to = compose_actors(&psi.to, &phi.to)?;
    let r01 = psi.from.base_anchor()?;
    let k = &psi.from.h;
    let mut table = Vec::with_capacity(k.len0());
    for x in 0..k.len0() {
        let v = psi.phi.at(x);
        let u = phi.phi.at(r01.at(x));
        table.push(psi.to.action.try_act(v, u).ok_or_else(|| {
            Error::NotComposable(format!("{} cannot act on {}", psi.from.g.arrow_name(u), k.arrow_name(v)))
        })?);
    }
    ActorCell::new(&from, &to, Mor::new(k.objects(), k.arrows(), table)?)
}

/// Every 2-arrow between two parallel actors.
pub fn all_actor_cells(from: &Actor, to: &Actor) -> Vec<ActorCell> {
    crate::morphism::all_sections(&from.h)
        .into_iter()
        .filter_map(|phi| ActorCell::new(from, to, phi).ok())
        .filter(|c| c.is_valid())
        .collect()
}

/// The action of `X ⋊ G` on `Y` given by a right `G`-action on `Y` and an
/// equivariant map `f: Y -> X`: anchor `f`, `y·(x, g) = y·g`.
pub fn action_over(tg: &Grpd, f: &GMap) -> Result<Action> {
    let (y, x) = (&f.from, &f.to);
    if y.side != Side::Right || !same(tg.objects(), x.carrier()) || !same(tg.arrows(), &x.dom.apex) {
        return Err(Error::BoundaryMismatch("expected the transformation groupoid of the target".into()));
    }
    let anchor = fit(&f.map, y.carrier(), tg.objects(), "anchor")?;
    Action::right(tg, &anchor, |p, k| y.act(p, x.dom.tuple(k)[1]))
}

/// The `G`-action on `Y` and the equivariant anchor `Y -> X` recovered from a
/// right action of `X ⋊ G`: `y·g := y·(f(y), g)`.
pub fn action_under(x: &Action, tg: &Grpd, a: &Action) -> Result<GMap> {
    if x.side != Side::Right || a.side != Side::Right || !same_grpd(&a.g, tg) || !same(tg.arrows(), &x.dom.apex) {
        return Err(Error::BoundaryMismatch("expected a right action of the transformation groupoid".into()));
    }
    let f = fit(&a.anchor, &a.carrier, &x.carrier, "anchor")?;
    let anchor = x.anchor.after(&f)?;
    let y = Action::right(&x.g, &anchor, |p, g| a.act(p, x.dom.at(&[f.at(p), g])))?;
    GMap::new(&y, x, f)
}
