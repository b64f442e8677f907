use groupoidal::action::*;
use groupoidal::fixtures::*;
use groupoidal::groupoid::{pair_groupoid, unit_groupoid, Grpd};
use groupoidal::morphism::{ad_bisection, all_functors, all_sections, Functor};
use groupoidal::site::{Mor, Obj, Space};
use itertools::Itertools;

const BUDGET: usize = 1 << 20;

fn set(names: &[&str]) -> Space {
    Obj::finset(names).unwrap()
}

fn carriers() -> Vec<Space> {
    vec![set(&["0"]), set(&["0", "1"]), set(&["0", "1", "2"])]
}

fn right_actions(g: &Grpd) -> Vec<Action> {
    carriers().iter().flat_map(|x| all_actions(g, x, Side::Right, BUDGET).unwrap()).collect()
}

#[test]
fn swap_is_a_valid_sheaf() {
    let a = swap();
    let rep = a.validate();
    assert!(rep.passed(), "{rep}");
    assert!(a.is_sheaf());
    assert_eq!(a.act(0, 1), 1);
}

#[test]
fn canonical_actions_are_valid() {
    for g in [cech2(), cech3(), z4()] {
        for side in [Side::Left, Side::Right] {
            assert!(Action::canonical(&g, side).is_valid());
            assert!(Action::multiplication(&g, side).is_valid());
        }
    }
}

#[test]
fn broken_swap_fails_with_witness() {
    let z = z2();
    let s = s2();
    let anchor = Mor::to_terminal(&s, z.objects()).unwrap();
    // t fixes a but moves b
    let a = Action::right(&z, &anchor, |x, g| if x == 0 { 0 } else { x ^ g }).unwrap();
    let rep = a.validate();
    assert!(!rep.passed());
    let f = rep.failures();
    assert!(f.iter().any(|f| f.witness.is_some()));
    // b·t = a and a·t = a, so t·t does not act as the unit on b
    assert!(rep.get("associative").unwrap().witness.is_some());
}

#[test]
fn unit_law_forms_agree_on_generated_tables() {
    // tables that obey the anchor and associativity laws but maybe not the unit law
    let z = z2();
    let x = set(&["0", "1"]);
    let anchor = Mor::to_terminal(&x, z.objects()).unwrap();
    for e in 0..4usize {
        for t in 0..4usize {
            let a = Action::right(&z, &anchor, |p, g| if g == 0 { (e >> p) & 1 } else { (t >> p) & 1 }).unwrap();
            let rep = a.validate();
            if let Some(f) = rep.get("unit forms agree") {
                assert_eq!(f.outcome, groupoidal::Outcome::Pass, "{rep}");
            }
        }
    }
}

#[test]
fn transformation_groupoid_of_swap_is_the_pair_groupoid() {
    let a = swap();
    let tg = transformation_groupoid(&a).unwrap();
    assert!(tg.is_valid());
    assert_eq!((tg.len0(), tg.len1()), (2, 4));
    let pair = pair_groupoid(a.carrier()).unwrap();
    // (x, g) goes from x·g to x, like the pair (x, x·g)
    let d = a.domain();
    let f1 = Mor::from_fn(tg.arrows(), pair.arrows(), |k| {
        let t = d.tuple(k);
        pair.arrows().elem(&format!("{}|{}", a.carrier().name(t[0]), a.carrier().name(a.act(t[0], t[1])))).unwrap()
    })
    .unwrap();
    let f = Functor::new(&tg, &pair, Mor::identity(tg.objects()), f1).unwrap();
    assert!(f.is_valid() && f.is_isomorphism());
}

#[test]
fn trivial_action_on_a_point_gives_the_group() {
    let z = z2();
    let a = Action::right(&z, &Mor::identity(z.objects()), |x, _| x).unwrap();
    assert!(a.is_valid());
    let tg = transformation_groupoid(&a).unwrap();
    let f1 = a.domain().pr2().clone();
    let f = Functor::new(&tg, &z, Mor::identity(z.objects()), f1).unwrap();
    assert!(f.is_valid() && f.is_isomorphism());
}

#[test]
fn canonical_action_gives_the_groupoid_back() {
    for g in [cech2(), cech3(), z4()] {
        let a = Action::canonical(&g, Side::Right);
        let tg = transformation_groupoid(&a).unwrap();
        // (r(g), g) ↦ g
        let f = Functor::new(&tg, &g, Mor::identity(g.objects()), a.domain().pr2().clone()).unwrap();
        assert!(f.is_valid() && f.is_isomorphism());
        let l = transformation_groupoid(&Action::canonical(&g, Side::Left)).unwrap();
        let f = Functor::new(&l, &g, Mor::identity(g.objects()), Action::canonical(&g, Side::Left).domain().pr1().clone())
            .unwrap();
        assert!(f.is_valid() && f.is_isomorphism());
    }
}

#[test]
fn anchor_is_the_unique_map_to_the_objects() {
    for g in [z2(), cech2()] {
        let base = Action::canonical(&g, Side::Right);
        for a in right_actions(&g) {
            let maps = all_gmaps(&a, &base);
            assert_eq!(maps.len(), 1);
            assert_eq!(maps[0].map.table(), a.anchor().table());
        }
    }
}

#[test]
fn fibre_product_examples() {
    let a = swap();
    let id = GMap::identity(&a);
    let p = action_fibre_product(&id, &id).unwrap();
    assert!(p.action.is_valid());
    assert_eq!(p.action.carrier().len(), 2);
    assert!(p.pr1.is_valid() && p.pr1.map.is_iso());

    // over the point action every pair survives and t swaps both coordinates
    let z = a.groupoid().clone();
    let base = Action::canonical(&z, Side::Right);
    let to_base = GMap::new(&a, &base, a.anchor().clone()).unwrap();
    let p = action_fibre_product(&to_base, &to_base).unwrap();
    assert_eq!(p.action.carrier().len(), 4);
    let ab = p.carrier.at(&[0, 1]);
    assert_eq!(p.carrier.tuple(p.action.act(ab, 1)), &[1, 0]);

    // an isomorphism on one side gives back the other factor
    let swap_map = GMap::new(&a, &a, Mor::new(a.carrier(), a.carrier(), vec![1, 0]).unwrap()).unwrap();
    assert!(swap_map.is_valid());
    let p = action_fibre_product(&id, &swap_map).unwrap();
    assert!(p.pr1.map.is_iso());
}

#[test]
fn fibre_product_has_the_universal_property() {
    let z = z2();
    let actions = right_actions(&z);
    let y = Action::canonical(&z, Side::Right);
    // the two-point test actions over the point
    let xs: Vec<&Action> = actions.iter().filter(|a| a.carrier().len() <= 2).collect();
    for x1 in &xs {
        for x2 in &xs {
            for f1 in all_gmaps(x1, &y) {
                for f2 in all_gmaps(x2, &y) {
                    let p = action_fibre_product(&f1, &f2).unwrap();
                    assert!(p.action.is_valid() && p.pr1.is_valid() && p.pr2.is_valid());
                    for w in &actions {
                        for h1 in all_gmaps(w, x1) {
                            for h2 in all_gmaps(w, x2) {
                                let agree = f1.map.after(&h1.map).unwrap() == f2.map.after(&h2.map).unwrap();
                                let through: Vec<GMap> = all_gmaps(w, &p.action)
                                    .into_iter()
                                    .filter(|h| {
                                        p.pr1.map.after(&h.map).unwrap() == h1.map
                                            && p.pr2.map.after(&h.map).unwrap() == h2.map
                                    })
                                    .collect();
                                assert_eq!(through.len(), usize::from(agree));
                                if agree {
                                    assert_eq!(p.pairing(&h1, &h2).unwrap().map, through[0].map);
                                }
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn actions_of_a_transformation_groupoid() {
    let z = z2();
    let actions = right_actions(&z);
    for x in &actions {
        let tg = transformation_groupoid(x).unwrap();
        for y in &actions {
            for f in all_gmaps(y, x) {
                let over = action_over(&tg, &f).unwrap();
                assert!(over.is_valid());
                let back = action_under(x, &tg, &over).unwrap();
                assert!(back.from.same_as(y) && back.map == f.map);
                // Y ⋊ (X ⋊ G) ≅ Y ⋊ G through (y, (x, g)) ↦ (y, g)
                let big = transformation_groupoid(&over).unwrap();
                let small = transformation_groupoid(y).unwrap();
                let f1 = Mor::from_fn(big.arrows(), small.arrows(), |k| {
                    let t = over.domain().tuple(k);
                    y.domain().at(&[t[0], x.domain().tuple(t[1])[1]])
                })
                .unwrap();
                let iso = Functor::new(&big, &small, Mor::identity(y.carrier()), f1).unwrap();
                assert!(iso.is_valid() && iso.is_isomorphism());
                // invariant maps coincide
                let two = set(&["0", "1"]);
                for m in groupoidal::backends::all_maps(y.carrier(), &two) {
                    assert_eq!(over.is_invariant(&m), y.is_invariant(&m));
                }
            }
        }
    }
}

#[test]
fn flipping_sides_is_an_involutive_isomorphism() {
    for g in [z2(), cech2()] {
        let acts = right_actions(&g);
        for a in &acts {
            let l = a.flip();
            assert_eq!(l.side(), Side::Left);
            assert!(l.is_valid());
            assert!(l.flip().same_as(a));
            for b in &acts {
                for m in groupoidal::backends::all_maps(a.carrier(), b.carrier()) {
                    let r = GMap::new(a, b, m.clone()).unwrap().is_valid();
                    let l = GMap::new(&a.flip(), &b.flip(), m).unwrap().is_valid();
                    assert_eq!(r, l);
                }
            }
        }
    }
}

fn trivial_actor(h: &Grpd) -> Actor {
    let p = unit_groupoid(&pt());
    let anchor = Mor::to_terminal(h.arrows(), p.objects()).unwrap();
    Actor::new(h, Action::left(&p, &anchor, |k, _| k).unwrap()).unwrap()
}

#[test]
fn actor_examples() {
    for g in [z2(), cech2(), z4()] {
        assert!(Actor::identity(&g).is_valid());
        assert!(trivial_actor(&g).is_valid());
    }
    // Z/2 swapping both coordinates of the pair arrows does not commute
    let z = z2();
    let c = cech2();
    let anchor = Mor::to_terminal(c.arrows(), z.objects()).unwrap();
    let kp = |k: usize| {
        let (x, y) = c.arrow_name(k).split_once('|').unwrap();
        (c.objects().elem(x).unwrap(), c.objects().elem(y).unwrap())
    };
    let act = Action::left(&z, &anchor, |k, g| {
        let (x, y) = kp(k);
        let (x, y) = (x ^ g, y ^ g);
        c.arrows().elem(&format!("{}|{}", c.object_name(x), c.object_name(y))).unwrap()
    })
    .unwrap();
    assert!(act.is_valid());
    let bad = Actor::new(&c, act).unwrap();
    let rep = bad.validate();
    assert!(!rep.passed());
    assert!(rep.get("commute").unwrap().witness.is_some());
}

#[test]
fn actor_pairs() {
    let z = z2();
    let pair = Actor::identity(&z).to_pair().unwrap();
    assert_eq!(pair.base.carrier().len(), 1);
    assert!(pair.base.is_valid());
    // F(g, *) = g
    for k in 0..pair.semidirect.len1() {
        assert_eq!(pair.functor.arr(k), pair.base.domain().tuple(k)[0]);
    }
    let c = cech2();
    let triv = trivial_actor(&c).to_pair().unwrap();
    assert!(triv.functor.is_valid());
    for k in 0..triv.semidirect.len1() {
        let x = triv.base.domain().tuple(k)[1];
        assert_eq!(triv.functor.arr(k), c.unit(x));
    }
    // round trip through the pair
    for h in [z2(), cech2()] {
        for g in [z2(), cech2(), unit_groupoid(&pt())] {
            for a in all_actors(&g, &h, BUDGET).unwrap() {
                assert!(a.is_valid());
                let p = a.to_pair().unwrap();
                assert!(p.functor.is_valid());
                assert!(Actor::from_pair(&p.base, &p.functor).unwrap().same_as(&a));
            }
        }
    }
}

#[test]
fn actor_from_functor_with_invertible_object_map() {
    let c = cech2();
    for f in all_functors(&c, &c).into_iter().filter(|f| f.f0().is_iso()) {
        let a = Actor::from_functor(&f).unwrap();
        assert!(a.is_valid());
        let inv = f.f0().inverse().unwrap();
        assert_eq!(a.base_anchor().unwrap().table(), inv.table());
        let p = a.to_pair().unwrap();
        // g·x = F0(s(g))... the base action moves x = F0(s g) to F0(r g)
        for (x, g) in p.base.pairs() {
            assert_eq!(p.base.act(x, g), f.obj(c.r(g)));
        }
    }
}

#[test]
fn actor_apply_examples() {
    let z = z2();
    let id = Actor::identity(&z);
    let mult = Action::multiplication(&z, Side::Left);
    assert!(id.apply(&mult).unwrap().same_as(&mult));
    assert!(id.apply(&mult).unwrap().same_as(id.action()));
    let x = swap().flip();
    let z = x.groupoid().clone();
    assert!(Actor::identity(&z).apply(&x).unwrap().same_as(&x));
    let t = trivial_actor(&z).apply(&x).unwrap();
    assert!(t.is_valid());
    assert!(t.pairs().all(|(p, _)| t.act(p, 0) == p));
    // H-invariant maps stay G-invariant
    for a in all_actors(&z2(), &z, BUDGET).unwrap() {
        let y = a.apply(&x).unwrap();
        assert!(y.is_valid());
        for m in groupoidal::backends::all_maps(x.carrier(), &set(&["0", "1"])) {
            if x.is_invariant(&m) {
                assert!(y.is_invariant(&m));
            }
        }
    }
}

#[test]
fn actor_composition() {
    let gs = [z2(), cech2(), unit_groupoid(&pt())];
    let acts: Vec<Vec<Vec<Actor>>> =
        gs.iter().map(|g| gs.iter().map(|h| all_actors(g, h, BUDGET).unwrap()).collect()).collect();
    for i in 0..3 {
        for j in 0..3 {
            for a in &acts[i][j] {
                let l = compose_actors(&Actor::identity(&gs[j]), a).unwrap();
                let r = compose_actors(a, &Actor::identity(&gs[i])).unwrap();
                assert!(l.same_as(a) && r.same_as(a));
                for k in 0..3 {
                    for b in &acts[j][k] {
                        let ba = compose_actors(b, a).unwrap();
                        assert!(ba.is_valid());
                        // composition matches applying one after the other
                        for x in all_actions(&gs[k], gs[k].arrows(), Side::Left, BUDGET).unwrap() {
                            let lhs = ba.apply(&x).unwrap();
                            let rhs = a.apply(&b.apply(&x).unwrap()).unwrap();
                            assert!(lhs.same_as(&rhs));
                        }
                    }
                }
            }
        }
    }
    let z = z2();
    let m = Actor::identity(&z);
    assert!(compose_actors(&m, &m).unwrap().same_as(&m));
    let t = trivial_actor(&z);
    let tt = compose_actors(&Actor::identity(&z), &t).unwrap();
    assert!(tt.same_as(&t));
}

#[test]
fn right_maps_of_the_arrows_are_section_multiplications() {
    for h in [z2(), z4(), cech2(), cech3()] {
        let right = Action::multiplication(&h, Side::Right);
        let sections = all_sections(&h);
        let mut found = 0;
        // equivariant maps keep the source, so only those tables are listed
        let tables = (0..h.len1())
            .map(|k| (0..h.len1()).filter(|&l| h.s(l) == h.s(k)).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .into_iter()
            .multi_cartesian_product();
        for t in tables {
            let phi = Mor::new(h.arrows(), h.arrows(), t).unwrap();
            let is_map = GMap::new(&right, &right, phi.clone()).unwrap().is_valid();
            let sec = section_of_right_map(&h, &phi);
            assert_eq!(is_map, sec.is_some());
            if let Some(sec) = sec {
                found += 1;
                let from_sections: Vec<&Mor> =
                    sections.iter().filter(|s| section_map(&h, s).unwrap() == phi).collect();
                assert_eq!(from_sections.len(), 1);
                assert_eq!(*from_sections[0], sec);
                let bis = ad_bisection(&h, &sec).unwrap().is_bisection;
                assert_eq!(phi.is_iso(), bis);
            }
        }
        assert_eq!(found, sections.len());
    }
}

fn all_cells(g: &Grpd, h: &Grpd) -> Vec<ActorCell> {
    let acts = all_actors(g, h, BUDGET).unwrap();
    let mut out = Vec::new();
    for a in &acts {
        for b in &acts {
            out.extend(all_actor_cells(a, b));
        }
    }
    out
}

#[test]
fn actor_two_category_laws() {
    let gs = [z2(), cech2(), unit_groupoid(&pt())];
    for g in &gs {
        for h in &gs {
            let gh = all_cells(g, h);
            for p in &gh {
                assert!(actor_vertical(p, &ActorCell::identity(&p.from)).unwrap().same_as(p));
                assert!(actor_vertical(&ActorCell::identity(&p.to), p).unwrap().same_as(p));
                for q in gh.iter().filter(|q| q.from.same_as(&p.to)) {
                    let qp = actor_vertical(q, p).unwrap();
                    assert!(qp.is_valid());
                    for r in gh.iter().filter(|r| r.from.same_as(&q.to)) {
                        let a = actor_vertical(r, &qp).unwrap();
                        let b = actor_vertical(&actor_vertical(r, q).unwrap(), p).unwrap();
                        assert!(a.same_as(&b));
                    }
                }
            }
            for k in &gs {
                let hk = all_cells(h, k);
                for phi in &gh {
                    for psi in &hk {
                        let h2 = actor_horizontal(psi, phi).unwrap();
                        assert!(h2.is_valid(), "{}", h2.validate());
                    }
                }
                // identities go to identities
                for a in all_actors(g, h, BUDGET).unwrap() {
                    for b in all_actors(h, k, BUDGET).unwrap() {
                        let one = actor_horizontal(&ActorCell::identity(&b), &ActorCell::identity(&a)).unwrap();
                        assert!(one.same_as(&ActorCell::identity(&compose_actors(&b, &a).unwrap())));
                    }
                }
                // interchange
                for phi1 in &gh {
                    for phi2 in gh.iter().filter(|p| p.from.same_as(&phi1.to)) {
                        for psi1 in &hk {
                            for psi2 in hk.iter().filter(|p| p.from.same_as(&psi1.to)) {
                                let lhs = actor_horizontal(
                                    &actor_vertical(psi2, psi1).unwrap(),
                                    &actor_vertical(phi2, phi1).unwrap(),
                                )
                                .unwrap();
                                let rhs = actor_vertical(
                                    &actor_horizontal(psi2, phi2).unwrap(),
                                    &actor_horizontal(psi1, phi1).unwrap(),
                                )
                                .unwrap();
                                assert!(lhs.same_as(&rhs));
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Invertible cells between two actors.
fn iso_cell(a: &Actor, b: &Actor) -> bool {
    all_actor_cells(a, b).iter().any(|c| ad_bisection(a.h(), &c.phi).unwrap().is_bisection)
}

#[test]
fn invertible_actors_are_groupoid_isomorphisms() {
    let gs = [z2(), cech2(), unit_groupoid(&pt()), unit_groupoid(&s2())];
    for g in &gs {
        for h in &gs {
            let back = all_actors(h, g, BUDGET).unwrap();
            for a in all_actors(g, h, BUDGET).unwrap() {
                let (id_g, id_h) = (Actor::identity(g), Actor::identity(h));
                let invertible = back.iter().any(|b| {
                    compose_actors(b, &a).unwrap().same_as(&id_g) && compose_actors(&a, b).unwrap().same_as(&id_h)
                });
                let equivalence = back.iter().any(|b| {
                    iso_cell(&id_g, &compose_actors(b, &a).unwrap()) && iso_cell(&id_h, &compose_actors(&a, b).unwrap())
                });
                let p = a.to_pair().unwrap();
                let from_iso = a.base_anchor().unwrap().is_iso() && p.functor.is_isomorphism();
                assert_eq!(invertible, from_iso);
                assert_eq!(equivalence, from_iso);
                if from_iso {
                    // it is the actor of a groupoid isomorphism
                    let iso = all_functors(g, h)
                        .into_iter()
                        .filter(|f| f.is_isomorphism())
                        .find(|f| Actor::from_functor(f).unwrap().same_as(&a));
                    assert!(iso.is_some());
                }
            }
        }
    }
}
