//! Bounded searches: local versions of essential surjectivity and full
//! faithfulness, and quasi-inverse anafunctors.

use itertools::Itertools;

use crate::backends::{all_maps, space_from_nbhds, topologies};
use crate::error::Result;
use crate::groupoid::{pullback_groupoid, Pullback};
use crate::site::{fibre_product, Backend, Mor, Obj, Space};

use super::{all_functors, compose_anafunctors, find_ana_nat, AnaNat, Anafunctor, Functor};

/// Covers onto `target` from objects with at most `cap` points. In FinSet the
/// domains are `0..n` and only monotone tables are listed, one per
/// isomorphism class over `target`.
pub fn covers_onto(target: &Space, cap: usize) -> Vec<Mor> {
    let mut out = Vec::new();
    for n in 1..=cap {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        match target.backend() {
            Backend::FinSet => {
                let dom = Obj::finset(&names).expect("distinct names");
                for t in (0..target.len()).combinations_with_replacement(n) {
                    let f = Mor::new(&dom, target, t).expect("set map");
                    if f.is_cover() {
                        out.push(f);
                    }
                }
            }
            Backend::FinTop => {
                for top in topologies(n) {
                    let dom = space_from_nbhds(&top);
                    out.extend(all_maps(&dom, target).into_iter().filter(|f| f.is_cover()));
                }
            }
        }
    }
    out
}

/// `p*(F): G(G0 ×_{F0,H0,p} X) -> H(X)` for a cover `p: X -> H0`, with the
/// two pull-back groupoids.
pub fn pullback_functor(f: &Functor, p: &Mor) -> Result<(Pullback, Pullback, Functor)> {
    let tilde = fibre_product(f.f0(), p)?;
    let below = pullback_groupoid(f.src(), tilde.pr1())?;
    let above = pullback_groupoid(f.dst(), p)?;
    let f1 = below.triples.map_to(above.groupoid.arrows(), |t| {
        above.arrow(tilde.tuple(t[0])[1], f.arr(t[1]), tilde.tuple(t[2])[1])
    })?;
    let functor = Functor::new(&below.groupoid, &above.groupoid, tilde.pr2().clone(), f1)?;
    Ok((below, above, functor))
}

/// A cover `g: U -> H0` with `|U| ≤ cap` along which the essential
/// surjectivity map becomes a cover, if one exists.
pub fn almost_essentially_surjective(f: &Functor, cap: usize) -> Result<Option<Mor>> {
    let (_, es) = f.essential_surjectivity_map()?;
    let mut cands = vec![Mor::identity(f.dst().objects())];
    cands.extend(covers_onto(f.dst().objects(), cap));
    for g in cands {
        let fp = fibre_product(&es, &g)?;
        if fp.pr2().is_cover() {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

/// A cover `r: Z -> H0` with `|Z| ≤ cap` along which `F` becomes fully
/// faithful, if one exists.
pub fn almost_fully_faithful(f: &Functor, cap: usize) -> Result<Option<Mor>> {
    let mut cands = vec![Mor::identity(f.dst().objects())];
    cands.extend(covers_onto(f.dst().objects(), cap));
    for r in cands {
        let (_, _, pulled) = pullback_functor(f, &r)?;
        if pulled.is_fully_faithful() {
            return Ok(Some(r));
        }
    }
    Ok(None)
}

/// A quasi-inverse with the transformations that witness it.
#[derive(Debug, Clone)]
pub struct QuasiInverse {
    pub inverse: Anafunctor,
    /// `b ∘ a ⇒ id`.
    pub unit: AnaNat,
    /// `a ∘ b ⇒ id`.
    pub counit: AnaNat,
}

#[derive(Debug, Clone)]
pub struct QuasiInverseSearch {
    pub cap: usize,
    pub candidates: usize,
    pub found: Option<QuasiInverse>,
}

/// Searches every anafunctor `b: H -> G` whose carrier has at most `cap`
/// points for transformations `b ∘ a ⇒ id` and `a ∘ b ⇒ id`.
pub fn find_quasi_inverse(a: &Anafunctor, cap: usize) -> Result<QuasiInverseSearch> {
    let (g, h) = (a.src(), a.dst());
    let id_g = Anafunctor::identity(g);
    let id_h = Anafunctor::identity(h);
    let mut candidates = 0;
    for q in covers_onto(h.objects(), cap) {
        let pulled = pullback_groupoid(h, &q)?;
        for e in all_functors(&pulled.groupoid, g) {
            candidates += 1;
            let b = Anafunctor::new(pulled.clone(), e)?;
            let ba = compose_anafunctors(&b, a)?;
            let Some(unit) = find_ana_nat(&ba, &id_g)? else { continue };
            let ab = compose_anafunctors(a, &b)?;
            let Some(counit) = find_ana_nat(&ab, &id_h)? else { continue };
            return Ok(QuasiInverseSearch { cap, candidates, found: Some(QuasiInverse { inverse: b, unit, counit }) });
        }
    }
    Ok(QuasiInverseSearch { cap, candidates, found: None })
}
