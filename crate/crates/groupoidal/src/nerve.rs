//! Simplices of the nerve of groupoids and bibundle functors, stored as
//! plain tables: objects `X_i`, spans `X_i <- X_ij -> X_j` and products
//! `m_ijk: X_ij ×_{X_j} X_jk -> X_ik`.

use std::collections::{BTreeMap, HashMap};

use itertools::Itertools;

use crate::action::{Action, Bibundle, Side};
use crate::bibundle::{classify, compose_bibundles, composite_witness, Composite};
use crate::error::{Error, Result};
use crate::groupoid::{same_grpd, Groupoid, Grpd};
use crate::report::Report;
use crate::site::{chain_product, fibre_product, same, FibreProduct, Mor, Space};
use std::sync::Arc;

/// The span `X_i <- X_ij -> X_j`.
#[derive(Debug, Clone)]
pub struct Span {
    pub r: Mor,
    pub s: Mor,
}

impl Span {
    pub fn carrier(&self) -> &Space {
        self.r.dom()
    }
}

#[derive(Debug, Clone)]
pub struct NSimplex {
    pub n: usize,
    pub objects: Vec<Space>,
    pub spans: BTreeMap<(usize, usize), Span>,
    pub mult: BTreeMap<(usize, usize, usize), Mor>,
}

impl NSimplex {
    /// The 0-simplex of a groupoid.
    pub fn point(g: &Grpd) -> NSimplex {
        let mut spans = BTreeMap::new();
        spans.insert((0, 0), Span { r: g.range().clone(), s: g.source().clone() });
        let mut mult = BTreeMap::new();
        mult.insert((0, 0, 0), g.mult().clone());
        NSimplex { n: 0, objects: vec![g.objects().clone()], spans, mult }
    }

    /// The simplex spanned by a chain of bibundles, with `X_ij` the
    /// left-nested composite and `m_ijk` induced by concatenating chains.
    pub fn from_chain(chain: &[Bibundle]) -> Result<NSimplex> {
        Chain::new(chain)?.simplex()
    }

    pub fn span(&self, i: usize, j: usize) -> &Span {
        &self.spans[&(i, j)]
    }

    pub fn carrier(&self, i: usize, j: usize) -> &Space {
        self.span(i, j).carrier()
    }

    /// `X_ij ×_{s_ij, X_j, r_jk} X_jk`.
    pub fn pairs(&self, i: usize, j: usize, k: usize) -> Result<FibreProduct> {
        fibre_product(&self.span(i, j).s, &self.span(j, k).r)
    }

    /// `x·y` for `x ∈ X_ij`, `y ∈ X_jk`.
    fn prod(&self, fps: &HashMap<(usize, usize, usize), FibreProduct>, ijk: (usize, usize, usize), x: usize, y: usize) -> usize {
        self.mult[&ijk].at(fps[&ijk].at(&[x, y]))
    }

    /// The groupoid `G_i = (X_i, X_ii, r_ii, s_ii, m_iii)`.
    pub fn groupoid(&self, i: usize) -> Result<Grpd> {
        let sp = self.span(i, i);
        let g = Groupoid::from_multiplication(
            self.objects[i].clone(),
            sp.carrier().clone(),
            sp.r.clone(),
            sp.s.clone(),
            self.mult[&(i, i, i)].clone(),
        )?;
        Ok(Arc::new(g))
    }

    /// `X_ik` with the left action `m_iik` and the right action `m_ikk`.
    pub fn bibundle(&self, i: usize, k: usize) -> Result<Bibundle> {
        let (gi, gk) = (self.groupoid(i)?, self.groupoid(k)?);
        let sp = self.span(i, k);
        let left = Action::new(&gi, Side::Left, sp.r.clone(), self.mult[&(i, i, k)].clone())?;
        let right = Action::new(&gk, Side::Right, sp.s.clone(), self.mult[&(i, k, k)].clone())?;
        Bibundle::new(left, right)
    }

    /// The same data read backwards: `X'_ij = X_{n-j,n-i}` with the anchors
    /// exchanged and `x ·' y = y · x`.
    pub fn reverse(&self) -> Result<NSimplex> {
        let n = self.n;
        let objects = self.objects.iter().rev().cloned().collect();
        let mut spans = BTreeMap::new();
        for (&(i, j), sp) in &self.spans {
            spans.insert((n - j, n - i), Span { r: sp.s.clone(), s: sp.r.clone() });
        }
        let mut out = NSimplex { n, objects, spans, mult: BTreeMap::new() };
        for (&(i, j, k), m) in &self.mult {
            let old = self.pairs(i, j, k)?;
            let new = out.pairs(n - k, n - j, n - i)?;
            let table = new.map_to(m.cod(), |t| m.at(old.at(&[t[1], t[0]])))?;
            out.mult.insert((n - k, n - j, n - i), table);
        }
        Ok(out)
    }
}

fn check_boundary(s: &NSimplex, allow_missing: Option<(usize, usize, usize)>) -> Result<()> {
    let bad = |what: String| Err(Error::BoundaryMismatch(what));
    if s.objects.len() != s.n + 1 {
        return bad(format!("{} objects for dimension {}", s.objects.len(), s.n));
    }
    for (i, j) in (0..=s.n).tuple_combinations().chain((0..=s.n).map(|i| (i, i))) {
        let Some(sp) = s.spans.get(&(i, j)) else { return bad(format!("X_{i}{j} is missing")) };
        if !same(sp.r.dom(), sp.s.dom()) || !same(sp.r.cod(), &s.objects[i]) || !same(sp.s.cod(), &s.objects[j]) {
            return bad(format!("the span over ({i}, {j}) has the wrong ends"));
        }
    }
    for (i, j, k) in triples(s.n) {
        match s.mult.get(&(i, j, k)) {
            None if allow_missing == Some((i, j, k)) => {}
            None => return bad(format!("m_{i}{j}{k} is missing")),
            Some(m) => {
                let fp = s.pairs(i, j, k)?;
                if !same(m.dom(), &fp.apex) || !same(m.cod(), s.carrier(i, k)) {
                    return bad(format!("m_{i}{j}{k} has the wrong domain or codomain"));
                }
            }
        }
    }
    Ok(())
}

fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..=n).flat_map(move |i| (i..=n).flat_map(move |j| (j..=n).map(move |k| (i, j, k))))
}

fn quads(n: usize) -> impl Iterator<Item = (usize, usize, usize, usize)> {
    triples(n).flat_map(move |(i, j, k)| (k..=n).map(move |l| (i, j, k, l)))
}

/// Checks the six defining conditions, then the facts derived from them:
/// the diagonal groupoids, the bibundle functors `X_ik` and the composite
/// isomorphisms `X_ij ×_{G_j} X_jk ≅ X_ik`.
pub fn validate_simplex(s: &NSimplex) -> Result<Report> {
    check_boundary(s, None)?;
    let n = s.n;
    let mut rep = Report::new();
    let fps: HashMap<_, _> = triples(n).map(|t| Ok((t, s.pairs(t.0, t.1, t.2)?))).collect::<Result<_>>()?;

    let w = s.spans.iter().find(|(_, sp)| !sp.r.is_cover()).map(|(k, _)| format!("r_{}{}", k.0, k.1));
    rep.record("range-covers", "every r_ij is a cover", w);
    let w = (0..=n).find(|&i| !s.span(i, i).s.is_cover()).map(|i| format!("s_{i}{i}"));
    rep.record("source-covers", "every s_ii is a cover", w);

    let mut w = None;
    'ends: for (&(i, j, k), fp) in &fps {
        for (p, t) in fp.tuples().iter().enumerate() {
            let z = s.mult[&(i, j, k)].at(p);
            if s.span(i, k).r.at(z) != s.span(i, j).r.at(t[0]) || s.span(i, k).s.at(z) != s.span(j, k).s.at(t[1]) {
                w = Some(format!("m_{i}{j}{k} at {}", fp.apex.name(p)));
                break 'ends;
            }
        }
    }
    rep.record("ends", "r(x·y) = r(x) and s(x·y) = s(y)", w.clone());
    if w.is_some() {
        return Ok(rep);
    }

    let mut w = None;
    'assoc: for (i, j, k, l) in quads(n) {
        let chain = chain_product(&[(&s.span(i, j).s, &s.span(j, k).r), (&s.span(j, k).s, &s.span(k, l).r)])?;
        for t in chain.tuples() {
            let lhs = s.prod(&fps, (i, k, l), s.prod(&fps, (i, j, k), t[0], t[1]), t[2]);
            let rhs = s.prod(&fps, (i, j, l), t[0], s.prod(&fps, (j, k, l), t[1], t[2]));
            if lhs != rhs {
                w = Some(format!("({i}, {j}, {k}, {l}) at {}", s.carrier(i, j).name(t[0])));
                break 'assoc;
            }
        }
    }
    rep.record("associativity", "(x·y)·z = x·(y·z)", w);

    let range_shear = |i: usize, j: usize, k: usize| -> Result<bool> {
        let target = fibre_product(&s.span(i, j).r, &s.span(i, k).r)?;
        let fp = &fps[&(i, j, k)];
        let table: Option<Vec<usize>> =
            fp.tuples().iter().map(|t| target.find(&[t[0], s.prod(&fps, (i, j, k), t[0], t[1])])).collect();
        Ok(table.and_then(|t| Mor::new(&fp.apex, &target.apex, t).ok()).is_some_and(|m| m.is_iso()))
    };
    let source_shear = |i: usize, j: usize, k: usize| -> Result<bool> {
        let target = fibre_product(&s.span(i, k).s, &s.span(j, k).s)?;
        let fp = &fps[&(i, j, k)];
        let table: Option<Vec<usize>> =
            fp.tuples().iter().map(|t| target.find(&[s.prod(&fps, (i, j, k), t[0], t[1]), t[1]])).collect();
        Ok(table.and_then(|t| Mor::new(&fp.apex, &target.apex, t).ok()).is_some_and(|m| m.is_iso()))
    };
    let mut w = None;
    for (i, j, k) in triples(n).filter(|&(i, j, k)| i == j || j == k) {
        if w.is_none() && !range_shear(i, j, k)? {
            w = Some(format!("({i}, {j}, {k})"));
        }
    }
    rep.record("range-shear", "(x, y) ↦ (x, x·y) is invertible when i = j or j = k", w);
    let mut w = None;
    for (i, j, k) in triples(n).filter(|&(_, j, k)| j == k) {
        if w.is_none() && !source_shear(i, j, k)? {
            w = Some(format!("({i}, {j}, {k})"));
        }
    }
    rep.record("source-shear", "(x, y) ↦ (x·y, y) is invertible when j = k", w);
    if !rep.passed() {
        return Ok(rep);
    }

    let w = (0..=n).find_map(|i| match s.groupoid(i) {
        Ok(g) if g.is_valid() => None,
        Ok(_) => Some(format!("G_{i} fails the groupoid laws")),
        Err(e) => Some(format!("G_{i}: {e}")),
    });
    rep.record("groupoids", "each diagonal (X_i, X_ii) is a groupoid", w.clone());
    if w.is_some() {
        return Ok(rep);
    }
    let w = (0..=n).tuple_combinations().find_map(|(i, k)| match s.bibundle(i, k) {
        Ok(x) if x.is_valid() && classify(&x).is_functor => None,
        Ok(_) => Some(format!("X_{i}{k} is not a bibundle functor")),
        Err(e) => Some(format!("X_{i}{k}: {e}")),
    });
    rep.record("functors", "each X_ik is a bibundle functor", w.clone());
    if w.is_some() {
        return Ok(rep);
    }
    let mut w = None;
    for (i, j, k) in triples(n).filter(|&(i, j, k)| i < j && j < k) {
        let witness = composite_witness(&s.bibundle(i, j)?, &s.bibundle(j, k)?, &s.bibundle(i, k)?, &s.mult[&(i, j, k)]);
        let ok = witness.is_ok_and(|c| c.holds() && c.cover);
        if w.is_none() && !(ok && range_shear(i, j, k)?) {
            w = Some(format!("({i}, {j}, {k})"));
        }
    }
    rep.record("composites", "m_ijk induces X_ij ×_{G_j} X_jk ≅ X_ik and (x, y) ↦ (x, x·y) is invertible", w);
    Ok(rep)
}

/// `φ*`: the simplex read along an order map `φ: [k] -> [n]`.
pub fn restrict_simplex(phi: &[usize], s: &NSimplex) -> Result<NSimplex> {
    if phi.is_empty() {
        return Err(Error::NotMonotone("empty order map".into()));
    }
    if let Some(w) = phi.windows(2).find(|w| w[0] > w[1]) {
        return Err(Error::NotMonotone(format!("{} comes after {}", w[1], w[0])));
    }
    if let Some(&v) = phi.iter().find(|&&v| v > s.n) {
        return Err(Error::NotMonotone(format!("{v} is outside [0, {}]", s.n)));
    }
    let k = phi.len() - 1;
    let objects = phi.iter().map(|&i| s.objects[i].clone()).collect();
    let spans = (0..=k).flat_map(|i| (i..=k).map(move |j| (i, j))).map(|(i, j)| ((i, j), s.span(phi[i], phi[j]).clone())).collect();
    let mult = triples(k).map(|(i, j, l)| ((i, j, l), s.mult[&(phi[i], phi[j], phi[l])].clone())).collect();
    Ok(NSimplex { n: k, objects, spans, mult })
}

/// Fills the inner 2-horn `x01, x12` with the composite and its quotient
/// map.
pub fn horn_fill_inner2(x01: &Bibundle, x12: &Bibundle) -> Result<NSimplex> {
    NSimplex::from_chain(&[x01.clone(), x12.clone()])
}

#[derive(Debug, Clone)]
pub struct InnerFill {
    pub candidates: usize,
    pub fillers: Vec<NSimplex>,
}

/// Every map `m_ijk` completing `partial` to a valid simplex. Only maps
/// between the carriers already present are tried, and only those with the
/// right ends. Data that do not fit together have no filler.
pub fn unique_inner3_check(partial: &NSimplex, missing: (usize, usize, usize), budget: usize) -> Result<InnerFill> {
    if check_boundary(partial, Some(missing)).is_err() {
        return Ok(InnerFill { candidates: 0, fillers: Vec::new() });
    }
    let (i, j, k) = missing;
    let fp = partial.pairs(i, j, k)?;
    let (rij, sjk, target) = (&partial.span(i, j).r, &partial.span(j, k).s, partial.span(i, k));
    let choices: Vec<Vec<usize>> = fp
        .tuples()
        .iter()
        .map(|t| (0..target.carrier().len()).filter(|&z| target.r.at(z) == rij.at(t[0]) && target.s.at(z) == sjk.at(t[1])).collect())
        .collect();
    let count = choices.iter().try_fold(1usize, |acc, c| acc.checked_mul(c.len()));
    match count {
        Some(c) if c <= budget => {}
        _ => return Err(Error::BudgetExceeded { needed: count.unwrap_or(usize::MAX), budget }),
    }
    let mut fillers = Vec::new();
    let mut candidates = 0;
    for table in choices.iter().map(|c| c.iter().copied()).multi_cartesian_product().chain(choices.is_empty().then(Vec::new)) {
        let Ok(m) = Mor::new(&fp.apex, target.carrier(), table) else { continue };
        candidates += 1;
        let mut s = partial.clone();
        s.mult.insert(missing, m);
        if validate_simplex(&s)?.passed() {
            fillers.push(s);
        }
    }
    Ok(InnerFill { candidates, fillers })
}

/// A chain of bibundles with every left-nested composite.
struct Chain<'a> {
    links: &'a [Bibundle],
    groupoids: Vec<Grpd>,
    /// `(i, j)` for `i < j - 1`: `X_{i,j-1} ×_{G_{j-1}} x_{j-1,j}`.
    composites: HashMap<(usize, usize), Composite>,
}

impl<'a> Chain<'a> {
    fn new(links: &'a [Bibundle]) -> Result<Chain<'a>> {
        if links.is_empty() {
            return Err(Error::Invalid("a chain needs at least one bibundle".into()));
        }
        for (a, b) in links.iter().tuple_windows() {
            if !same_grpd(a.h(), b.g()) {
                return Err(Error::MiddleMismatch("consecutive bibundles do not meet".into()));
            }
        }
        let mut groupoids: Vec<Grpd> = links.iter().map(|x| x.g().clone()).collect();
        groupoids.push(links.last().expect("nonempty").h().clone());
        let mut out = Chain { links, groupoids, composites: HashMap::new() };
        let n = links.len();
        for i in 0..n {
            for j in i + 2..=n {
                let c = compose_bibundles(&out.carrier(i, j - 1).clone(), &links[j - 1])?;
                out.composites.insert((i, j), c);
            }
        }
        Ok(out)
    }

    fn carrier(&self, i: usize, j: usize) -> &Bibundle {
        if j == i + 1 {
            &self.links[i]
        } else {
            &self.composites[&(i, j)].bibundle
        }
    }

    /// Lifts of `X_ij`: arrows `[g]` of `G_i` on the diagonal, otherwise
    /// chains `(x_i, …, x_{j-1})` of composable points.
    fn lifts(&self, i: usize, j: usize) -> Vec<Vec<usize>> {
        if i == j {
            return (0..self.groupoids[i].len1()).map(|g| vec![g]).collect();
        }
        let mut out: Vec<Vec<usize>> = (0..self.links[i].carrier().len()).map(|x| vec![x]).collect();
        for l in i + 1..j {
            let (prev, next) = (&self.links[l - 1], &self.links[l]);
            out = out
                .into_iter()
                .flat_map(|t| {
                    let end = prev.s().at(*t.last().expect("nonempty"));
                    (0..next.carrier().len()).filter(move |&y| next.r().at(y) == end).map(move |y| {
                        let mut u = t.clone();
                        u.push(y);
                        u
                    })
                })
                .collect();
        }
        out
    }

    fn class(&self, i: usize, t: &[usize]) -> usize {
        let mut cur = t[0];
        for (l, &y) in t.iter().enumerate().skip(1) {
            cur = self.composites[&(i, i + l + 1)].class(cur, y);
        }
        cur
    }

    fn start(&self, i: usize, j: usize, t: &[usize]) -> usize {
        if i == j {
            self.groupoids[i].r(t[0])
        } else {
            self.links[i].r().at(t[0])
        }
    }

    fn end(&self, i: usize, j: usize, t: &[usize]) -> usize {
        if i == j {
            self.groupoids[i].s(t[0])
        } else {
            self.links[j - 1].s().at(*t.last().expect("nonempty"))
        }
    }

    fn concat(&self, (i, j, k): (usize, usize, usize), a: &[usize], b: &[usize]) -> Vec<usize> {
        match (i == j, j == k) {
            (true, true) => vec![self.groupoids[i].mul(a[0], b[0])],
            (true, false) => {
                let mut t = b.to_vec();
                t[0] = self.links[j].lact(a[0], t[0]);
                t
            }
            (false, true) => {
                let mut t = a.to_vec();
                let last = t.len() - 1;
                t[last] = self.links[j - 1].ract(t[last], b[0]);
                t
            }
            (false, false) => [a, b].concat(),
        }
    }

    fn simplex(&self) -> Result<NSimplex> {
        let n = self.links.len();
        let mut spans = BTreeMap::new();
        for i in 0..=n {
            let g = &self.groupoids[i];
            spans.insert((i, i), Span { r: g.range().clone(), s: g.source().clone() });
            for j in i + 1..=n {
                let x = self.carrier(i, j);
                spans.insert((i, j), Span { r: x.r().clone(), s: x.s().clone() });
            }
        }
        let objects = self.groupoids.iter().map(|g| g.objects().clone()).collect();
        let mut s = NSimplex { n, objects, spans, mult: BTreeMap::new() };
        let lifts: HashMap<(usize, usize), Vec<Vec<usize>>> =
            (0..=n).flat_map(|i| (i..=n).map(move |j| (i, j))).map(|(i, j)| ((i, j), self.lifts(i, j))).collect();
        for (i, j, k) in triples(n) {
            let fp = s.pairs(i, j, k)?;
            let mut table = vec![usize::MAX; fp.len()];
            for a in &lifts[&(i, j)] {
                for b in lifts[&(j, k)].iter().filter(|b| self.start(j, k, b) == self.end(i, j, a)) {
                    let p = fp.at(&[self.class(i, a), self.class(j, b)]);
                    let v = self.class(i, &self.concat((i, j, k), a, b));
                    if table[p] != usize::MAX && table[p] != v {
                        return Err(Error::NotFibrewiseConstant(format!("m_{i}{j}{k} at {}", fp.apex.name(p))));
                    }
                    table[p] = v;
                }
            }
            if table.contains(&usize::MAX) {
                return Err(Error::Invalid(format!("m_{i}{j}{k} is not total")));
            }
            s.mult.insert((i, j, k), Mor::new(&fp.apex, s.carrier(i, k), table)?);
        }
        Ok(s)
    }
}
