//! Finite objects and maps of the ambient site, with fibre products,
//! quotients and the cover predicate.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    FinSet,
    FinTop,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::FinSet => "finset",
            Backend::FinTop => "fintop",
        }
    }
}

pub type Space = Arc<Obj>;

/// A finite carrier. Points are indices `0..len`; each carries a unique name.
///
/// A finite topology is kept as the smallest open neighbourhood of each point,
/// which determines the open sets: a set is open iff it contains the
/// neighbourhood of each of its points.
#[derive(Debug)]
pub struct Obj {
    backend: Backend,
    names: Vec<String>,
    index: HashMap<String, usize>,
    nbhd: Option<Vec<FixedBitSet>>,
}

fn bits(n: usize, members: impl IntoIterator<Item = usize>) -> FixedBitSet {
    let mut b = FixedBitSet::with_capacity(n);
    for i in members {
        b.insert(i);
    }
    b
}

impl Obj {
    fn checked_names<S: AsRef<str>>(names: &[S]) -> Result<(Vec<String>, HashMap<String, usize>)> {
        let mut index = HashMap::with_capacity(names.len());
        let mut out = Vec::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            let n = n.as_ref().to_string();
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateElement(n));
            }
            out.push(n);
        }
        Ok((out, index))
    }

    pub fn finset<S: AsRef<str>>(names: &[S]) -> Result<Space> {
        let (names, index) = Self::checked_names(names)?;
        Ok(Arc::new(Obj { backend: Backend::FinSet, names, index, nbhd: None }))
    }

    /// A finite space from its full family of open sets.
    pub fn finspace<S: AsRef<str>, T: AsRef<str>>(names: &[S], opens: &[Vec<T>]) -> Result<Space> {
        let (names, index) = Self::checked_names(names)?;
        let n = names.len();
        let mut fam: Vec<FixedBitSet> = Vec::with_capacity(opens.len());
        for o in opens {
            let mut b = FixedBitSet::with_capacity(n);
            for e in o {
                let i = *index
                    .get(e.as_ref())
                    .ok_or_else(|| Error::UnknownElement(e.as_ref().to_string()))?;
                b.insert(i);
            }
            fam.push(b);
        }
        let show = |b: &FixedBitSet| -> String {
            let v: Vec<&str> = b.ones().map(|i| names[i].as_str()).collect();
            format!("{{{}}}", v.join(","))
        };
        let has = |b: &FixedBitSet| fam.iter().any(|o| o == b);
        if !has(&FixedBitSet::with_capacity(n)) {
            return Err(Error::NotATopology("the empty set is not open".into()));
        }
        let mut full = FixedBitSet::with_capacity(n);
        full.insert_range(..);
        if !has(&full) {
            return Err(Error::NotATopology("the whole carrier is not open".into()));
        }
        for a in &fam {
            for b in &fam {
                let u = a | b;
                if !has(&u) {
                    return Err(Error::NotATopology(format!("union of {} and {} missing", show(a), show(b))));
                }
                let m = a & b;
                if !has(&m) {
                    return Err(Error::NotATopology(format!(
                        "intersection of {} and {} missing",
                        show(a),
                        show(b)
                    )));
                }
            }
        }
        let nbhd = (0..n)
            .map(|x| {
                let mut u = full.clone();
                for o in fam.iter().filter(|o| o.contains(x)) {
                    u &= o;
                }
                u
            })
            .collect();
        Ok(Arc::new(Obj { backend: Backend::FinTop, names, index, nbhd: Some(nbhd) }))
    }

    /// Builds an object from already distinct names. `nbhd` must be given
    /// exactly for the FinTop backend and be transitive.
    pub(crate) fn build(backend: Backend, names: Vec<String>, nbhd: Option<Vec<FixedBitSet>>) -> Space {
        debug_assert_eq!(backend == Backend::FinTop, nbhd.is_some());
        let index: HashMap<String, usize> = names.iter().cloned().enumerate().map(|(i, n)| (n, i)).collect();
        assert_eq!(index.len(), names.len(), "duplicate element names in construction");
        Arc::new(Obj { backend, names, index, nbhd })
    }

    pub fn discrete<S: AsRef<str>>(backend: Backend, names: &[S]) -> Result<Space> {
        let (names, index) = Self::checked_names(names)?;
        let n = names.len();
        let nbhd = match backend {
            Backend::FinSet => None,
            Backend::FinTop => Some((0..n).map(|i| bits(n, [i])).collect()),
        };
        Ok(Arc::new(Obj { backend, names, index, nbhd }))
    }

    /// A finite space from the smallest neighbourhoods of its points, given
    /// as index sets. The family is closed up transitively.
    pub fn from_neighbourhoods<S: AsRef<str>>(names: &[S], nbhd: &[Vec<usize>]) -> Result<Space> {
        let (names, index) = Self::checked_names(names)?;
        let n = names.len();
        if nbhd.len() != n {
            return Err(Error::NotATopology("one neighbourhood per point is required".into()));
        }
        let mut u: Vec<FixedBitSet> = nbhd.iter().enumerate().map(|(i, v)| {
            let mut b = bits(n, v.iter().copied().filter(|&j| j < n));
            b.insert(i);
            b
        }).collect();
        loop {
            let mut changed = false;
            for i in 0..n {
                let mut acc = u[i].clone();
                for j in u[i].ones() {
                    acc |= &u[j];
                }
                if acc != u[i] {
                    u[i] = acc;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        Ok(Arc::new(Obj { backend: Backend::FinTop, names, index, nbhd: Some(u) }))
    }

    pub fn terminal(backend: Backend) -> Space {
        Self::discrete(backend, &["*"]).expect("one point")
    }

    pub fn empty(backend: Backend) -> Space {
        Self::discrete::<&str>(backend, &[]).expect("no points")
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn elem(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// Smallest open set containing `i`.
    pub fn nbhd(&self, i: usize) -> FixedBitSet {
        match &self.nbhd {
            Some(v) => v[i].clone(),
            None => bits(self.len(), [i]),
        }
    }

    fn nbhd_ref(&self, i: usize) -> Option<&FixedBitSet> {
        self.nbhd.as_ref().map(|v| &v[i])
    }

    pub fn is_open(&self, set: &FixedBitSet) -> bool {
        match &self.nbhd {
            None => true,
            Some(v) => set.ones().all(|i| v[i].is_subset(set)),
        }
    }

    /// `x` lies in the closure of `y`.
    pub fn leq(&self, x: usize, y: usize) -> bool {
        match &self.nbhd {
            None => x == y,
            Some(v) => v[x].contains(y),
        }
    }

    pub fn is_discrete(&self) -> bool {
        match &self.nbhd {
            None => true,
            Some(v) => v.iter().all(|b| b.count_ones(..) == 1),
        }
    }

    /// Every open set, by closing the point neighbourhoods under union.
    pub fn opens(&self) -> Vec<FixedBitSet> {
        let n = self.len();
        let mut seen: Vec<FixedBitSet> = vec![FixedBitSet::with_capacity(n)];
        let mut i = 0;
        while i < seen.len() {
            let cur = seen[i].clone();
            for x in 0..n {
                if cur.contains(x) {
                    continue;
                }
                let next = &cur | &self.nbhd(x);
                if !seen.contains(&next) {
                    seen.push(next);
                }
            }
            i += 1;
        }
        seen.sort_by_key(|b| (b.count_ones(..), b.ones().collect::<Vec<_>>()));
        seen
    }

    pub fn show_set(&self, set: &FixedBitSet) -> String {
        let v: Vec<&str> = set.ones().map(|i| self.name(i)).collect();
        format!("{{{}}}", v.join(","))
    }

    /// Same names in the same order and the same topology.
    pub fn same_layout(&self, other: &Obj) -> bool {
        self.backend == other.backend && self.names == other.names && self.nbhd == other.nbhd
    }
}

impl PartialEq for Obj {
    /// Equal as sets of names carrying the same structure.
    fn eq(&self, other: &Obj) -> bool {
        if self.backend != other.backend || self.len() != other.len() {
            return false;
        }
        if self.names == other.names {
            return self.nbhd == other.nbhd;
        }
        let mut map = Vec::with_capacity(self.len());
        for n in &self.names {
            match other.index_of(n) {
                Some(j) => map.push(j),
                None => return false,
            }
        }
        (0..self.len()).all(|i| {
            (0..self.len()).all(|j| self.leq(i, j) == other.leq(map[i], map[j]))
        })
    }
}

impl Eq for Obj {}

impl fmt::Display for Obj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.names.join(", "))
    }
}

pub fn same(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Joins component names into a tuple name. Components that are already
/// tuples are parenthesised so that names stay unambiguous.
pub fn tuple_name<S: AsRef<str>>(parts: &[S]) -> String {
    let mut out = String::new();
    for (k, p) in parts.iter().enumerate() {
        if k > 0 {
            out.push('|');
        }
        let p = p.as_ref();
        if p.contains('|') {
            out.push('(');
            out.push_str(p);
            out.push(')');
        } else {
            out.push_str(p);
        }
    }
    out
}

/// A total structure-preserving map between finite objects.
#[derive(Clone, Debug)]
pub struct Mor {
    dom: Space,
    cod: Space,
    table: Vec<usize>,
}

impl Mor {
    pub fn new(dom: &Space, cod: &Space, table: Vec<usize>) -> Result<Mor> {
        if dom.backend != cod.backend {
            return Err(Error::BackendMismatch(format!(
                "{} map between {} and {}",
                dom.backend.as_str(),
                dom.backend.as_str(),
                cod.backend.as_str()
            )));
        }
        if table.len() != dom.len() {
            return Err(Error::NotTotal(format!("{} images for {} points", table.len(), dom.len())));
        }
        if let Some(&bad) = table.iter().find(|&&y| y >= cod.len()) {
            return Err(Error::UnknownElement(format!("image index {bad}")));
        }
        let m = Mor { dom: dom.clone(), cod: cod.clone(), table };
        if let Some(x) = m.discontinuity() {
            return Err(Error::NotContinuous(format!(
                "at {}: image of {} not inside {}",
                dom.name(x),
                dom.show_set(&dom.nbhd(x)),
                cod.show_set(&cod.nbhd(m.table[x]))
            )));
        }
        Ok(m)
    }

    pub fn from_fn(dom: &Space, cod: &Space, f: impl Fn(usize) -> usize) -> Result<Mor> {
        Mor::new(dom, cod, (0..dom.len()).map(f).collect())
    }

    pub fn from_names<S: AsRef<str>, T: AsRef<str>>(dom: &Space, cod: &Space, pairs: &[(S, T)]) -> Result<Mor> {
        let mut table = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let i = dom.elem(a.as_ref())?;
            table[i] = cod.elem(b.as_ref())?;
        }
        if let Some(i) = table.iter().position(|&y| y == usize::MAX) {
            return Err(Error::NotTotal(format!("no image for `{}`", dom.name(i))));
        }
        Mor::new(dom, cod, table)
    }

    pub fn identity(x: &Space) -> Mor {
        Mor { dom: x.clone(), cod: x.clone(), table: (0..x.len()).collect() }
    }

    pub fn to_terminal(x: &Space, point: &Space) -> Result<Mor> {
        Mor::new(x, point, vec![0; x.len()])
    }

    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    #[inline]
    pub fn at(&self, i: usize) -> usize {
        self.table[i]
    }

    /// Image of a named point.
    pub fn apply_name(&self, name: &str) -> Result<&str> {
        Ok(self.cod.name(self.table[self.dom.elem(name)?]))
    }

    fn discontinuity(&self) -> Option<usize> {
        self.dom.nbhd.as_ref()?;
        (0..self.dom.len()).find(|&x| {
            let target = self.cod.nbhd_ref(self.table[x]).expect("fintop codomain");
            !self.dom.nbhd_ref(x).expect("fintop domain").ones().all(|y| target.contains(self.table[y]))
        })
    }

    /// `self ∘ g`.
    pub fn after(&self, g: &Mor) -> Result<Mor> {
        compose(self, g)
    }

    pub fn image(&self, set: &FixedBitSet) -> FixedBitSet {
        bits(self.cod.len(), set.ones().map(|i| self.table[i]))
    }

    pub fn preimage(&self, set: &FixedBitSet) -> FixedBitSet {
        bits(self.dom.len(), (0..self.dom.len()).filter(|&i| set.contains(self.table[i])))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.table {
            hit[y] = true;
        }
        hit.into_iter().all(|h| h)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.cod.len()];
        for &y in &self.table {
            if std::mem::replace(&mut hit[y], true) {
                return false;
            }
        }
        true
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.len() == self.cod.len() && self.is_injective()
    }

    /// Images of open sets are open. It suffices to test point neighbourhoods.
    pub fn is_open_map(&self) -> bool {
        if self.dom.nbhd.is_none() {
            return true;
        }
        (0..self.dom.len()).all(|x| self.cod.is_open(&self.image(&self.dom.nbhd(x))))
    }

    /// Checks continuity directly on every open set of the codomain.
    pub fn is_continuous_by_opens(&self) -> bool {
        self.cod.opens().iter().all(|o| self.dom.is_open(&self.preimage(o)))
    }

    /// Continuity as monotonicity for the specialisation preorder.
    pub fn is_monotone(&self) -> bool {
        let n = self.dom.len();
        (0..n).all(|x| (0..n).all(|y| !self.dom.leq(x, y) || self.cod.leq(self.table[x], self.table[y])))
    }

    /// Surjections in FinSet, open surjections in FinTop.
    pub fn is_cover(&self) -> bool {
        self.is_surjective() && self.is_open_map()
    }

    pub fn inverse(&self) -> Option<Mor> {
        if !self.is_bijective() {
            return None;
        }
        let mut inv = vec![0; self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        Mor::new(&self.cod, &self.dom, inv).ok()
    }

    pub fn is_iso(&self) -> bool {
        self.inverse().is_some()
    }

    /// The same map with its codomain replaced by an equal object.
    pub fn recast(&self, dom: &Space, cod: &Space) -> Result<Mor> {
        if !same(dom, &self.dom) || !same(cod, &self.cod) {
            return Err(Error::BoundaryMismatch("recast to a different object".into()));
        }
        Mor::from_fn(dom, cod, |i| {
            let x = self.dom.index_of(dom.name(i)).expect("same names");
            cod.index_of(self.cod.name(self.table[x])).expect("same names")
        })
    }
}

impl PartialEq for Mor {
    fn eq(&self, other: &Mor) -> bool {
        if Arc::ptr_eq(&self.dom, &other.dom) && Arc::ptr_eq(&self.cod, &other.cod) {
            return self.table == other.table;
        }
        if !same(&self.dom, &other.dom) || !same(&self.cod, &other.cod) {
            return false;
        }
        (0..self.dom.len()).all(|i| {
            let j = other.dom.index_of(self.dom.name(i)).expect("same names");
            self.cod.name(self.table[i]) == other.cod.name(other.table[j])
        })
    }
}

impl Eq for Mor {}

impl fmt::Display for Mor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .table
            .iter()
            .enumerate()
            .map(|(i, &y)| format!("{}->{}", self.dom.name(i), self.cod.name(y)))
            .collect();
        write!(f, "{{ {} }}", parts.join(", "))
    }
}

/// `f ∘ g`.
pub fn compose(f: &Mor, g: &Mor) -> Result<Mor> {
    if f.dom.backend != g.cod.backend {
        return Err(Error::BackendMismatch("composite across backends".into()));
    }
    if Arc::ptr_eq(&g.cod, &f.dom) || g.cod.same_layout(&f.dom) {
        return Ok(Mor { dom: g.dom.clone(), cod: f.cod.clone(), table: g.table.iter().map(|&y| f.table[y]).collect() });
    }
    if *g.cod != *f.dom {
        return Err(Error::BoundaryMismatch(format!("codomain {} is not domain {}", g.cod, f.dom)));
    }
    let table = g
        .table
        .iter()
        .map(|&y| f.table[f.dom.index_of(g.cod.name(y)).expect("equal objects")])
        .collect();
    Ok(Mor { dom: g.dom.clone(), cod: f.cod.clone(), table })
}

/// An iterated fibre product `A0 ×_{B0} A1 ×_{B1} ... ` of a chain of
/// cospans; points are tuples `(a0, a1, ...)`.
#[derive(Clone, Debug)]
pub struct FibreProduct {
    pub apex: Space,
    tuples: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    legs: Vec<Mor>,
}

pub fn fibre_product(f: &Mor, g: &Mor) -> Result<FibreProduct> {
    chain_product(&[(f, g)])
}

/// `links[k] = (f_k, g_k)` with `f_k: A_k -> B_k` and `g_k: A_{k+1} -> B_k`.
pub fn chain_product(links: &[(&Mor, &Mor)]) -> Result<FibreProduct> {
    if links.is_empty() {
        return Err(Error::Invalid("a fibre product needs at least one cospan".into()));
    }
    let mut factors: Vec<Space> = vec![links[0].0.dom.clone()];
    for (k, (f, g)) in links.iter().enumerate() {
        if !same(&f.cod, &g.cod) {
            return Err(Error::BoundaryMismatch(format!("cospan {k}: {} vs {}", f.cod, g.cod)));
        }
        if f.dom.backend != g.dom.backend {
            return Err(Error::BackendMismatch(format!("cospan {k}")));
        }
        if k > 0 && !same(&f.dom, factors.last().expect("nonempty")) {
            return Err(Error::BoundaryMismatch(format!("factor {k} differs between its two legs")));
        }
        factors.push(g.dom.clone());
    }
    let backend = factors[0].backend;
    // bucket the right legs by base point
    let buckets: Vec<Vec<Vec<usize>>> = links
        .iter()
        .map(|(f, g)| {
            let mut b = vec![Vec::new(); f.cod.len()];
            for (a, &z) in g.table.iter().enumerate() {
                let z = if Arc::ptr_eq(&f.cod, &g.cod) || f.cod.same_layout(&g.cod) {
                    z
                } else {
                    f.cod.index_of(g.cod.name(z)).expect("equal bases")
                };
                b[z].push(a);
            }
            b
        })
        .collect();
    let mut tuples = Vec::new();
    let mut cur = Vec::with_capacity(factors.len());
    fn walk(
        k: usize,
        cur: &mut Vec<usize>,
        links: &[(&Mor, &Mor)],
        buckets: &[Vec<Vec<usize>>],
        out: &mut Vec<Vec<usize>>,
    ) {
        if k == links.len() {
            out.push(cur.clone());
            return;
        }
        let z = links[k].0.table[cur[k]];
        for &a in &buckets[k][z] {
            cur.push(a);
            walk(k + 1, cur, links, buckets, out);
            cur.pop();
        }
    }
    for a0 in 0..factors[0].len() {
        cur.push(a0);
        walk(0, &mut cur, links, &buckets, &mut tuples);
        cur.pop();
    }
    let names: Vec<String> = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(&factors).map(|(&i, fac)| fac.name(i)).collect();
            tuple_name(&parts)
        })
        .collect();
    let lookup: HashMap<Vec<usize>, usize> = tuples.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
    let nbhd = match backend {
        Backend::FinSet => None,
        Backend::FinTop => {
            let n = tuples.len();
            Some(
                tuples
                    .iter()
                    .map(|t| {
                        let us: Vec<FixedBitSet> = t.iter().zip(&factors).map(|(&i, fac)| fac.nbhd(i)).collect();
                        bits(
                            n,
                            (0..n).filter(|&j| tuples[j].iter().zip(&us).all(|(&c, u)| u.contains(c))),
                        )
                    })
                    .collect(),
            )
        }
    };
    let apex = Obj::build(backend, names, nbhd);
    let legs = factors
        .iter()
        .enumerate()
        .map(|(k, fac)| Mor { dom: apex.clone(), cod: fac.clone(), table: tuples.iter().map(|t| t[k]).collect() })
        .collect();
    Ok(FibreProduct { apex, tuples, lookup, legs })
}

impl FibreProduct {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn arity(&self) -> usize {
        self.legs.len()
    }

    pub fn tuple(&self, i: usize) -> &[usize] {
        &self.tuples[i]
    }

    pub fn tuples(&self) -> &[Vec<usize>] {
        &self.tuples
    }

    pub fn find(&self, t: &[usize]) -> Option<usize> {
        self.lookup.get(t).copied()
    }

    /// Index of a tuple known to lie in the fibre product.
    pub fn at(&self, t: &[usize]) -> usize {
        match self.find(t) {
            Some(i) => i,
            None => panic!("tuple {t:?} is not in the fibre product {}", self.apex),
        }
    }

    pub fn pair(&self, a: usize, b: usize) -> Option<usize> {
        self.find(&[a, b])
    }

    pub fn leg(&self, k: usize) -> &Mor {
        &self.legs[k]
    }

    pub fn pr1(&self) -> &Mor {
        &self.legs[0]
    }

    pub fn pr2(&self) -> &Mor {
        &self.legs[1]
    }

    /// The map into the fibre product induced by maps into each factor.
    pub fn pairing(&self, maps: &[Mor]) -> Result<Mor> {
        if maps.len() != self.arity() {
            return Err(Error::BoundaryMismatch("wrong number of components".into()));
        }
        let dom = maps[0].dom.clone();
        let mut table = Vec::with_capacity(dom.len());
        for w in 0..dom.len() {
            let t: Vec<usize> = maps.iter().map(|m| m.table[w]).collect();
            match self.find(&t) {
                Some(i) => table.push(i),
                None => {
                    return Err(Error::BoundaryMismatch(format!(
                        "components of {} do not agree over the base",
                        dom.name(w)
                    )))
                }
            }
        }
        Mor::new(&dom, &self.apex, table)
    }

    /// Builds a map out of the fibre product from a formula on tuples.
    pub fn map_to(&self, cod: &Space, f: impl Fn(&[usize]) -> usize) -> Result<Mor> {
        Mor::new(&self.apex, cod, self.tuples.iter().map(|t| f(t)).collect())
    }
}

/// A quotient of a finite object by an equivalence relation.
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: Space,
    pub proj: Mor,
    pub classes: Vec<Vec<usize>>,
}

pub type Coequalizer = Quotient;

impl Quotient {
    /// First member of a class.
    pub fn rep(&self, class: usize) -> usize {
        self.classes[class][0]
    }

    pub fn class_of(&self, x: usize) -> usize {
        self.proj.table[x]
    }
}

/// The quotient of `x` by the equivalence generated by `pairs`. Classes are
/// ordered by their first member and named by their least name; the
/// quotient carries the final topology.
pub fn quotient(x: &Space, pairs: impl IntoIterator<Item = (usize, usize)>) -> Quotient {
    let n = x.len();
    let mut uf = UnionFind::<usize>::new(n);
    for (a, b) in pairs {
        uf.union(a, b);
    }
    let mut class_of_root: HashMap<usize, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut table = vec![0; n];
    for i in 0..n {
        let root = uf.find(i);
        let c = *class_of_root.entry(root).or_insert_with(|| {
            classes.push(Vec::new());
            classes.len() - 1
        });
        classes[c].push(i);
        table[i] = c;
    }
    let names: Vec<String> = classes
        .iter()
        .map(|c| c.iter().map(|&i| x.name(i)).min().expect("nonempty class").to_string())
        .collect();
    let nbhd = x.nbhd.as_ref().map(|_| {
        let k = classes.len();
        (0..k)
            .map(|c| {
                // least saturated open set containing the class
                let mut s = bits(n, classes[c].iter().copied());
                loop {
                    let mut t = s.clone();
                    for i in s.ones() {
                        t |= &x.nbhd(i);
                    }
                    let mut sat = FixedBitSet::with_capacity(n);
                    for i in t.ones() {
                        for &j in &classes[table[i]] {
                            sat.insert(j);
                        }
                    }
                    if sat == s {
                        break;
                    }
                    s = sat;
                }
                bits(k, s.ones().map(|i| table[i]))
            })
            .collect()
    });
    let space = Obj::build(x.backend, names, nbhd);
    let proj = Mor { dom: x.clone(), cod: space.clone(), table };
    Quotient { space, proj, classes }
}

pub fn coequalizer(f: &Mor, g: &Mor) -> Result<Coequalizer> {
    if !same(&f.dom, &g.dom) || !same(&f.cod, &g.cod) {
        return Err(Error::BoundaryMismatch("coequalizer of maps with different boundaries".into()));
    }
    let g = g.recast(&f.dom, &f.cod)?;
    Ok(quotient(&f.cod, f.table.iter().copied().zip(g.table.iter().copied())))
}

/// The unique `k` with `k ∘ p = h`, if `h` is constant on the fibres of the
/// surjection `p`.
pub fn factor_through(p: &Mor, h: &Mor) -> Result<Mor> {
    if !same(&p.dom, &h.dom) {
        return Err(Error::BoundaryMismatch("factorisation through a map with another domain".into()));
    }
    let h = h.recast(&p.dom, &h.cod)?;
    let mut k = vec![usize::MAX; p.cod.len()];
    let mut first = vec![usize::MAX; p.cod.len()];
    for x in 0..p.dom.len() {
        let y = p.table[x];
        if k[y] == usize::MAX {
            k[y] = h.table[x];
            first[y] = x;
        } else if k[y] != h.table[x] {
            return Err(Error::NotFibrewiseConstant(format!(
                "{} and {} lie over {} but have images {} and {}",
                p.dom.name(first[y]),
                p.dom.name(x),
                p.cod.name(y),
                h.cod.name(k[y]),
                h.cod.name(h.table[x])
            )));
        }
    }
    if let Some(y) = k.iter().position(|&v| v == usize::MAX) {
        return Err(Error::NotACover(format!("nothing lies over {}", p.cod.name(y))));
    }
    Mor::new(&p.cod, &h.cod, k)
}

/// Disjoint union with its two inclusions. Points are named `in1.x`, `in2.y`.
pub fn coproduct(a: &Space, b: &Space) -> Result<(Space, Mor, Mor)> {
    if a.backend != b.backend {
        return Err(Error::BackendMismatch("coproduct across backends".into()));
    }
    let (na, nb) = (a.len(), b.len());
    let mut names: Vec<String> = a.names.iter().map(|s| format!("in1.{s}")).collect();
    names.extend(b.names.iter().map(|s| format!("in2.{s}")));
    let nbhd = a.nbhd.as_ref().map(|_| {
        let n = na + nb;
        let mut v: Vec<FixedBitSet> = (0..na).map(|i| bits(n, a.nbhd(i).ones())).collect();
        v.extend((0..nb).map(|j| bits(n, b.nbhd(j).ones().map(|k| k + na))));
        v
    });
    let s = Obj::build(a.backend, names, nbhd);
    let i1 = Mor { dom: a.clone(), cod: s.clone(), table: (0..na).collect() };
    let i2 = Mor { dom: b.clone(), cod: s.clone(), table: (na..na + nb).collect() };
    Ok((s, i1, i2))
}

/// Copairing out of a coproduct built by [`coproduct`].
pub fn copair(sum: &Space, f: &Mor, g: &Mor) -> Result<Mor> {
    if !same(&f.cod, &g.cod) || sum.len() != f.dom.len() + g.dom.len() {
        return Err(Error::BoundaryMismatch("copairing".into()));
    }
    let g = g.recast(&g.dom, &f.cod)?;
    let mut t = f.table.clone();
    t.extend_from_slice(&g.table);
    Mor::new(sum, &f.cod, t)
}

/// Binary product as a fibre product over the point.
pub fn product(a: &Space, b: &Space) -> Result<FibreProduct> {
    let pt = Obj::terminal(a.backend);
    fibre_product(&Mor::to_terminal(a, &pt)?, &Mor::to_terminal(b, &pt)?)
}

/// `f` re-expressed with the given domain and codomain, which must equal its
/// own. Errors name `what`.
pub fn fit(f: &Mor, dom: &Space, cod: &Space, what: &str) -> Result<Mor> {
    if Arc::ptr_eq(&f.dom, dom) && Arc::ptr_eq(&f.cod, cod) {
        return Ok(f.clone());
    }
    if !same(&f.dom, dom) || !same(&f.cod, cod) {
        return Err(Error::BoundaryMismatch(format!("{what} has the wrong domain or codomain")));
    }
    f.recast(dom, cod)
}
