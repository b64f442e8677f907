//! Exhaustive checks of the pretopology axioms over a sample of objects and
//! maps.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::backends::Sample;
use crate::error::{Error, Result};
use crate::report::Report;
use crate::site::{coequalizer, compose, copair, coproduct, factor_through, fibre_product, Mor, Obj};

/// A failure of saturation shaped as a non-open map `f: X -> Y` glued to the
/// identity: `f2 = (f, id): X ⊔ Y -> Y` is not a cover although
/// `f2 ∘ f1 = id` is, for the inclusion `f1: Y -> X ⊔ Y`.
#[derive(Debug, Clone)]
pub struct SaturationWitness {
    pub f: Mor,
    pub f1: Mor,
    pub f2: Mor,
}

#[derive(Debug, Clone)]
pub struct HarnessOutcome {
    pub report: Report,
    pub instances: usize,
    pub saturation: Option<SaturationWitness>,
}

fn show(f: &Mor) -> String {
    format!("{} -> {} {}", f.dom(), f.cod(), f)
}

struct Index<'a> {
    maps: &'a [Mor],
    cover: Vec<bool>,
    into: HashMap<usize, Vec<usize>>,
    out_of: HashMap<usize, Vec<usize>>,
    between: HashMap<(usize, usize), Vec<usize>>,
}

fn obj_key(x: &Arc<Obj>) -> usize {
    Arc::as_ptr(x) as usize
}

impl<'a> Index<'a> {
    fn new(sample: &'a Sample) -> Self {
        let cover: Vec<bool> = sample.maps.par_iter().map(|m| m.is_cover()).collect();
        let mut into: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut out_of: HashMap<usize, Vec<usize>> = HashMap::new();
        let mut between: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (k, m) in sample.maps.iter().enumerate() {
            into.entry(obj_key(m.cod())).or_default().push(k);
            out_of.entry(obj_key(m.dom())).or_default().push(k);
            between.entry((obj_key(m.dom()), obj_key(m.cod()))).or_default().push(k);
        }
        Index { maps: &sample.maps, cover, into, out_of, between }
    }

    fn into(&self, x: &Arc<Obj>) -> &[usize] {
        self.into.get(&obj_key(x)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn out_of(&self, x: &Arc<Obj>) -> &[usize] {
        self.out_of.get(&obj_key(x)).map(|v| v.as_slice()).unwrap_or(&[])
    }

    fn between(&self, a: &Arc<Obj>, b: &Arc<Obj>) -> &[usize] {
        self.between.get(&(obj_key(a), obj_key(b))).map(|v| v.as_slice()).unwrap_or(&[])
    }

    /// Pairs `(k1, k2)` with `cod(k1) = cod(k2)`.
    fn cospans(&self, objects: &[Arc<Obj>]) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for x in objects {
            for &a in self.into(x) {
                for &b in self.into(x) {
                    v.push((a, b));
                }
            }
        }
        v
    }

    /// Pairs `(p, f)` with `cod(p) = dom(f)`.
    fn composable(&self, objects: &[Arc<Obj>]) -> Vec<(usize, usize)> {
        let mut v = Vec::new();
        for y in objects {
            for &p in self.into(y) {
                for &f in self.out_of(y) {
                    v.push((p, f));
                }
            }
        }
        v
    }
}

fn first_failure<T: Sync>(items: &[T], check: impl Fn(&T) -> Option<String> + Sync) -> Option<String> {
    items.par_iter().find_map_first(|x| check(x))
}

/// Runs every axiom check over `sample`. `budget` bounds the number of
/// instances examined; exceeding it is an error rather than a silent cut.
pub fn axiom_harness(sample: &Sample, budget: usize) -> Result<HarnessOutcome> {
    let idx = Index::new(sample);
    let objects = &sample.objects;
    let maps = idx.maps;
    let cospans = idx.cospans(objects);
    let composable = idx.composable(objects);
    let small_targets: Vec<&Arc<Obj>> = objects.iter().filter(|w| w.len() <= 3).collect();
    let covers: Vec<usize> = (0..maps.len()).filter(|&k| idx.cover[k]).collect();
    let subcanonical_count: usize = covers
        .iter()
        .map(|&k| small_targets.iter().map(|w| idx.between(maps[k].dom(), w).len()).sum::<usize>())
        .sum();
    let instances = maps.len() + cospans.len() * 3 + composable.len() * 2 + subcanonical_count + covers.len().pow(2);
    if instances > budget {
        return Err(Error::BudgetExceeded { needed: instances, budget });
    }

    let mut report = Report::new();

    report.record(
        "iso-is-cover",
        "every isomorphism is a cover",
        first_failure(maps, |f| (f.is_iso() && !f.is_cover()).then(|| show(f))),
    );

    report.record(
        "composite-of-covers",
        "composites of covers are covers",
        first_failure(&composable, |&(p, f)| {
            if !(idx.cover[p] && idx.cover[f]) {
                return None;
            }
            let c = compose(&maps[f], &maps[p]).expect("composable");
            (!c.is_cover()).then(|| format!("{} after {}", show(&maps[f]), show(&maps[p])))
        }),
    );

    report.record(
        "pullback-of-cover",
        "pr1: Y x_X U -> Y is a cover when g: U -> X is",
        first_failure(&cospans, |&(f, g)| {
            if !idx.cover[g] {
                return None;
            }
            let fp = fibre_product(&maps[f], &maps[g]).expect("cospan");
            (!fp.pr1().is_cover()).then(|| format!("f = {}, g = {}", show(&maps[f]), show(&maps[g])))
        }),
    );

    report.record(
        "subcanonical",
        "maps out of a cover's domain equalising its kernel pair biject with maps out of its codomain, and the cover is the coequaliser of its kernel pair",
        first_failure(&covers, |&k| {
            let f = &maps[k];
            let kp = fibre_product(f, f).expect("kernel pair");
            let q = coequalizer(kp.pr1(), kp.pr2()).expect("same boundaries");
            let induced = factor_through(&q.proj, f).ok()?;
            if !induced.is_iso() {
                return Some(format!("coequaliser of kernel pair of {} is not its codomain", show(f)));
            }
            for w in &small_targets {
                let mut equalising = 0;
                for &h in idx.between(f.dom(), w) {
                    let h = &maps[h];
                    let eq = kp.tuples().iter().all(|t| h.at(t[0]) == h.at(t[1]));
                    if eq {
                        equalising += 1;
                        if factor_through(f, h).is_err() {
                            return Some(format!("{} does not factor through {}", show(h), show(f)));
                        }
                    }
                }
                let downstairs = idx.between(f.cod(), w).len();
                if equalising != downstairs {
                    return Some(format!(
                        "{} equalising maps but {} maps out of the base, cover {}, target {}",
                        equalising,
                        downstairs,
                        show(f),
                        w
                    ));
                }
            }
            None
        }),
    );

    report.record(
        "cover-is-local",
        "if g is a cover and pr2: Y x_X U -> U is a cover then f is a cover",
        first_failure(&cospans, |&(f, g)| {
            if !idx.cover[g] || idx.cover[f] {
                return None;
            }
            let fp = fibre_product(&maps[f], &maps[g]).expect("cospan");
            fp.pr2().is_cover().then(|| format!("f = {}, g = {}", show(&maps[f]), show(&maps[g])))
        }),
    );

    report.record(
        "cancel-cover",
        "if f o p and p are covers then f is a cover",
        first_failure(&composable, |&(p, f)| {
            if !idx.cover[p] || idx.cover[f] {
                return None;
            }
            let c = compose(&maps[f], &maps[p]).expect("composable");
            c.is_cover().then(|| format!("f = {}, p = {}", show(&maps[f]), show(&maps[p])))
        }),
    );

    let point = Obj::terminal(sample.backend);
    report.record(
        "maps-to-point",
        "every map from a nonempty object to the point is a cover",
        objects.iter().find_map(|x| {
            let t = Mor::to_terminal(x, &point).expect("point");
            (!t.is_cover()).then(|| show(&t))
        }),
    );

    report.record(
        "iso-is-local",
        "if g is a cover and pr2: Y x_X U -> U is an isomorphism then f is an isomorphism",
        first_failure(&cospans, |&(f, g)| {
            if !idx.cover[g] || maps[f].is_iso() {
                return None;
            }
            let fp = fibre_product(&maps[f], &maps[g]).expect("cospan");
            fp.pr2().is_iso().then(|| format!("f = {}, g = {}", show(&maps[f]), show(&maps[g])))
        }),
    );

    report.record(
        "product-of-covers",
        "f1 x f2 is a cover when f1 and f2 are",
        first_failure(&covers.iter().flat_map(|&a| covers.iter().map(move |&b| (a, b))).collect::<Vec<_>>(), |&(a, b)| {
            let (f1, f2) = (&maps[a], &maps[b]);
            let dom = crate::site::product(f1.dom(), f2.dom()).expect("product");
            let cod = crate::site::product(f1.cod(), f2.cod()).expect("product");
            let m = dom
                .map_to(&cod.apex, |t| cod.at(&[f1.at(t[0]), f2.at(t[1])]))
                .expect("continuous");
            (!m.is_cover()).then(|| format!("{} and {}", show(f1), show(f2)))
        }),
    );

    // saturation is reported, not required
    let saturation_failure = first_failure(&composable, |&(p, f)| {
        if idx.cover[f] {
            return None;
        }
        let c = compose(&maps[f], &maps[p]).expect("composable");
        c.is_cover().then(|| format!("f = {}, p = {}", show(&maps[f]), show(&maps[p])))
    });
    let mut saturation = None;
    if saturation_failure.is_some() {
        let non_open = maps.iter().find(|f| !f.is_open_map());
        if let Some(f) = non_open {
            let (sum, _i1, i2) = coproduct(f.dom(), f.cod())?;
            let f2 = copair(&sum, f, &Mor::identity(f.cod()))?;
            let f1 = i2;
            let id = compose(&f2, &f1)?;
            if id == Mor::identity(f.cod()) && id.is_cover() && !f2.is_cover() {
                saturation = Some(SaturationWitness { f: f.clone(), f1, f2 });
            }
        }
    }
    match (&saturation_failure, &saturation) {
        (None, _) => report.info("saturated", "f is a cover whenever f o p is", "holds on the sample".into()),
        (Some(w), Some(s)) => report.info(
            "saturated",
            "f is a cover whenever f o p is",
            format!("fails: {w}; glued witness f = {}, f2 = {}", show(&s.f), show(&s.f2)),
        ),
        (Some(w), None) => report.info("saturated", "f is a cover whenever f o p is", format!("fails: {w}")),
    }

    Ok(HarnessOutcome { report, instances, saturation })
}
