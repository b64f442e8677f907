use groupoidal::fixtures::*;
use groupoidal::groupoid::{pullback_groupoid, unit_groupoid, Grpd};
use groupoidal::morphism::*;
use groupoidal::site::{Mor, Space};
use itertools::Itertools;

fn arrow(g: &Grpd, name: &str) -> usize {
    g.arrows().elem(name).unwrap()
}

fn point_group() -> Grpd {
    unit_groupoid(&pt())
}

/// The functor from the one-arrow groupoid picking the unit of `g` at `x`.
fn unit_at(g: &Grpd, x: &str) -> Functor {
    let p = point_group();
    let x = g.objects().elem(x).unwrap();
    Functor::from_tables(&p, g, vec![x], vec![g.unit(x)]).unwrap()
}

/// Brute force: every pair of tables that passes validation.
fn functor_count_by_tables(src: &Grpd, dst: &Grpd) -> usize {
    let mut n = 0;
    for t0 in (0..src.len0()).map(|_| 0..dst.len0()).multi_cartesian_product() {
        for t1 in (0..src.len1()).map(|_| 0..dst.len1()).multi_cartesian_product() {
            if let Ok(f) = Functor::from_tables(src, dst, t0.clone(), t1) {
                if f.is_valid() {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn identity_and_unit_inclusions_are_functors() {
    assert!(Functor::identity(&cech2()).is_valid());
    assert!(unit_at(&z2(), "*").is_valid());
}

#[test]
fn z2_endomorphism_tables() {
    let z = z2();
    let trivial = Functor::from_tables(&z, &z, vec![0], vec![0, 0]).unwrap();
    assert!(trivial.is_valid());
    let bad = Functor::from_tables(&z, &z, vec![0], vec![1, 1]).unwrap();
    let rep = bad.validate();
    assert!(!rep.passed());
    assert!(rep.get("unital").unwrap().witness.is_some());
}

#[test]
fn composing_unit_inclusion_with_trivial_map_gives_constant_unit() {
    let z = z2();
    let inc = unit_at(&z, "*");
    let trivial = Functor::from_tables(&z, &z, vec![0], vec![0, 0]).unwrap();
    let c = compose_functors(&trivial, &inc).unwrap();
    assert_eq!(c.f1().table(), &[arrow(&z, "e")]);
    let id_after = compose_functors(&Functor::identity(&z), &trivial).unwrap();
    assert!(id_after.same_as(&trivial));
}

#[test]
fn functor_enumeration_matches_table_search() {
    let small = [z2(), cech2(), point_group(), z3()];
    for a in &small {
        for b in &small {
            let fast = all_functors(a, b);
            assert!(fast.iter().all(|f| f.is_valid()));
            assert_eq!(fast.len(), functor_count_by_tables(a, b), "{a:?} -> {b:?}");
        }
    }
}

#[test]
fn homomorphism_counts_between_cyclic_groups() {
    // Hom(Z/m, Z/n) has gcd(m, n) elements
    assert_eq!(all_functors(&z2(), &z4()).len(), 2);
    assert_eq!(all_functors(&z4(), &z4()).len(), 4);
    assert_eq!(all_functors(&z4(), &z2()).len(), 2);
    assert_eq!(all_functors(&z3(), &z2()).len(), 1);
}

#[test]
fn transformation_inverse_and_identity() {
    let z = z2();
    let id = Functor::identity(&z);
    let t = NatTrans::from_fn(&id, &id, |_| arrow(&z, "t")).unwrap();
    assert!(t.is_valid());
    let tt = vertical(&t, &t).unwrap();
    assert_eq!(tt.phi().table(), &[arrow(&z, "e")]);
    assert!(tt.same_as(&NatTrans::identity(&id)));
    for phi in all_nat_trans(&id, &id) {
        let back = vertical(&phi, &phi.inverse()).unwrap();
        assert!(back.same_as(&NatTrans::identity(phi.to())));
        let forth = vertical(&phi.inverse(), &phi).unwrap();
        assert!(forth.same_as(&NatTrans::identity(phi.from())));
    }
}

#[test]
fn horizontal_of_identities_is_identity() {
    let (z, c) = (z2(), cech2());
    for f in all_functors(&c, &z) {
        for g in all_functors(&z, &z) {
            let h = horizontal(&NatTrans::identity(&g), &NatTrans::identity(&f)).unwrap();
            let gf = compose_functors(&g, &f).unwrap();
            assert!(h.same_as(&NatTrans::identity(&gf)));
        }
    }
}

/// All transformations between functors `a -> b`.
fn all_two_cells(a: &Grpd, b: &Grpd) -> Vec<NatTrans> {
    let fs = all_functors(a, b);
    let mut out = Vec::new();
    for f in &fs {
        for g in &fs {
            out.extend(all_nat_trans(f, g));
        }
    }
    out
}

#[test]
fn strict_two_category_laws() {
    let gs = [cech2(), z2()];
    for a in &gs {
        for b in &gs {
            for c in &gs {
                let ab = all_two_cells(a, b);
                let bc = all_two_cells(b, c);
                for phi in &ab {
                    assert!(phi.is_valid());
                    for psi in &bc {
                        let h = horizontal(psi, phi).unwrap();
                        assert!(h.is_valid());
                        // the other expression of the horizontal product
                        let other = NatTrans::from_fn(h.from(), h.to(), |x| {
                            c.mul(psi.to().arr(phi.at(x)), psi.at(phi.from().obj(x)))
                        })
                        .unwrap();
                        assert!(h.same_as(&other));
                    }
                }
                // interchange: (Ψ2·Ψ1)∘(Φ2·Φ1) = (Ψ2∘Φ2)·(Ψ1∘Φ1)
                for phi1 in &ab {
                    for phi2 in ab.iter().filter(|p| p.from().same_as(phi1.to())) {
                        for psi1 in &bc {
                            for psi2 in bc.iter().filter(|p| p.from().same_as(psi1.to())) {
                                let lhs = horizontal(&vertical(psi2, psi1).unwrap(), &vertical(phi2, phi1).unwrap()).unwrap();
                                let rhs =
                                    vertical(&horizontal(psi2, phi2).unwrap(), &horizontal(psi1, phi1).unwrap()).unwrap();
                                assert!(lhs.same_as(&rhs));
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn vertical_product_is_associative_and_unital() {
    let (a, b) = (cech2(), z2());
    let cells = all_two_cells(&a, &b);
    for p in &cells {
        assert!(vertical(p, &NatTrans::identity(p.from())).unwrap().same_as(p));
        assert!(vertical(&NatTrans::identity(p.to()), p).unwrap().same_as(p));
        for q in cells.iter().filter(|q| q.from().same_as(p.to())) {
            for r in cells.iter().filter(|r| r.from().same_as(q.to())) {
                let l = vertical(r, &vertical(q, p).unwrap()).unwrap();
                let m = vertical(&vertical(r, q).unwrap(), p).unwrap();
                assert!(l.same_as(&m));
            }
        }
    }
}

#[test]
fn unit_section_is_a_bisection_with_trivial_ad() {
    for g in [cech2(), z2(), z4()] {
        let res = ad_bisection(&g, g.unit_map()).unwrap();
        assert!(res.is_section && res.is_bisection);
        assert!(res.ad.unwrap().same_as(&Functor::identity(&g)));
    }
}

#[test]
fn bisection_examples() {
    let z = z2();
    let t = Mor::from_fn(z.objects(), z.arrows(), |_| arrow(&z, "t")).unwrap();
    let res = ad_bisection(&z, &t).unwrap();
    assert!(res.is_bisection);
    assert!(res.ad.unwrap().same_as(&Functor::identity(&z)));

    let c = cech2();
    // Φ(a) = (b, a), Φ(b) = (a, b): arrows with source a and b
    let phi = Mor::from_names(c.objects(), c.arrows(), &[("a", "b|a"), ("b", "a|b")]).unwrap();
    let res = ad_bisection(&c, &phi).unwrap();
    assert!(res.is_section && res.is_bisection);
    let f = res.ad.unwrap();
    assert_eq!(f.f0().apply_name("a").unwrap(), "b");
    assert_eq!(f.f0().apply_name("b").unwrap(), "a");
    assert!(f.is_valid() && f.is_isomorphism());

    let not_section = Mor::from_names(c.objects(), c.arrows(), &[("a", "a|b"), ("b", "a|b")]).unwrap();
    let res = ad_bisection(&c, &not_section).unwrap();
    assert!(!res.is_section && res.ad.is_none());
    assert!(matches!(ad(&c, &not_section), Err(groupoidal::Error::NotASection(_))));
}

#[test]
fn crossed_module_identities() {
    for g in [z2(), z4(), cech2(), cech3()] {
        let sections = all_sections(&g);
        let bis: Vec<&Mor> = sections.iter().filter(|p| ad_bisection(&g, p).unwrap().is_bisection).collect();
        let autos: Vec<Functor> =
            all_functors(&g, &g).into_iter().filter(|f| f.is_isomorphism()).collect();
        for p1 in &sections {
            for p2 in &sections {
                let prod = section_product(&g, p1, p2).unwrap();
                let lhs = ad(&g, &prod).unwrap();
                let rhs = compose_functors(&ad(&g, p1).unwrap(), &ad(&g, p2).unwrap()).unwrap();
                assert!(lhs.same_as(&rhs));
            }
        }
        for f in &autos {
            let finv = f.inverse().unwrap();
            for p in &bis {
                let conj = conjugate_section(f, p).unwrap();
                // F • Φ sends F0(x) to F1(Φ(x))
                for x in 0..g.len0() {
                    assert_eq!(conj.at(f.obj(x)), f.arr(p.at(x)));
                }
                let lhs = ad(&g, &conj).unwrap();
                let rhs = compose_functors(&compose_functors(f, &ad(&g, p).unwrap()).unwrap(), &finv).unwrap();
                assert!(lhs.same_as(&rhs));
            }
        }
        for p1 in &bis {
            let ad1 = ad(&g, p1).unwrap();
            let inv1 = bisection_inverse(&g, p1).unwrap();
            assert_eq!(section_product(&g, p1, &inv1).unwrap(), *g.unit_map());
            for p2 in &bis {
                let lhs = conjugate_section(&ad1, p2).unwrap();
                let rhs = section_product(&g, &section_product(&g, p1, p2).unwrap(), &inv1).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn essential_surjectivity_and_full_faithfulness_examples() {
    let at_a = unit_at(&cech2(), "a");
    assert!(at_a.is_essentially_surjective() && at_a.is_fully_faithful());
    let into_z2 = unit_at(&z2(), "*");
    assert!(into_z2.is_essentially_surjective());
    assert!(!into_z2.is_fully_faithful());
    let (_, ff) = into_z2.full_faithfulness_map().unwrap();
    assert_eq!((ff.dom().len(), ff.cod().len()), (1, 2));
    let id = Functor::identity(&z4());
    assert!(id.is_essentially_surjective() && id.is_fully_faithful());
    // an inclusion missing an isolated object is not essentially surjective
    let two_points = unit_groupoid(&s2());
    let f = Functor::from_tables(&point_group(), &two_points, vec![0], vec![0]).unwrap();
    assert!(f.is_valid() && !f.is_essentially_surjective() && f.is_fully_faithful());
}

#[test]
fn local_conditions_agree_with_global_ones() {
    let battery: Vec<(Grpd, Grpd)> = vec![
        (point_group(), z2()),
        (point_group(), cech2()),
        (point_group(), unit_groupoid(&s2())),
        (z2(), z4()),
        (z4(), z2()),
        (cech2(), z2()),
        (cech2(), cech3()),
    ];
    for (a, b) in &battery {
        for f in all_functors(a, b) {
            let es = f.is_essentially_surjective();
            let ff = f.is_fully_faithful();
            let aes = almost_essentially_surjective(&f, 3).unwrap().is_some();
            let aff = almost_fully_faithful(&f, 3).unwrap().is_some();
            assert_eq!(aes, es);
            assert_eq!(es && aff, ff && es);
            if ff {
                assert!(aff);
            }
        }
    }
}

fn identity_ana(g: &Grpd) -> Anafunctor {
    Anafunctor::identity(g)
}

#[test]
fn anafunctor_unitors_are_isomorphisms() {
    let c2 = cech2();
    let a = Anafunctor::hypercover(&z2(), &Mor::to_terminal(&s2(), &pt()).unwrap()).unwrap();
    assert!(a.is_valid());
    let l = left_unitor(&a).unwrap();
    let r = right_unitor(&a).unwrap();
    assert!(l.to_nat().is_valid() && r.to_nat().is_valid());
    let id = identity_ana(&c2);
    assert!(id.is_valid());
    let ii = compose_anafunctors(&id, &id).unwrap();
    assert_eq!(ii.carrier().len(), 2);
    assert!(left_unitor(&id).unwrap().map.is_iso());
}

#[test]
fn hypercover_and_its_quasi_inverse() {
    // p2 into the point groupoid; the hypercover goes from the Čech groupoid
    let base = point_group();
    let p = p2();
    let hyper = Anafunctor::hypercover(&base, &p).unwrap();
    let back = Anafunctor::hypercover_inverse(&base, &p).unwrap();
    let round = compose_anafunctors(&hyper, &back).unwrap();
    // the composite G -> G(X) -> G is (X, p, p_*)
    assert_eq!(round.carrier().len(), 2);
    let nat = find_ana_nat(&round, &identity_ana(&base)).unwrap().expect("unit transformation");
    assert!(nat.is_valid());
    let other = compose_anafunctors(&back, &hyper).unwrap();
    let pulled = back.dst().clone();
    assert!(find_ana_nat(&other, &identity_ana(&pulled)).unwrap().is_some());
}

#[test]
fn descent_of_transformations() {
    let c = cech2();
    let id = Functor::identity(&c);
    let pulled = pullback_groupoid(&c, &Mor::identity(c.objects())).unwrap();
    for phi in all_nat_trans(&id, &id) {
        let up = phi.phi().after(&pulled.cover).unwrap();
        let down = descend_nat(&up, &pulled, &id, &id).unwrap();
        assert!(down.same_as(&phi));
    }
    // pull back the unit section along a two-to-one cover of the objects
    let x: Space = groupoidal::Obj::finset(&["a1", "a2", "b1"]).unwrap();
    let p = Mor::from_names(&x, c.objects(), &[("a1", "a"), ("a2", "a"), ("b1", "b")]).unwrap();
    let pulled = pullback_groupoid(&c, &p).unwrap();
    let up = c.unit_map().after(&p).unwrap();
    let down = descend_nat(&up, &pulled, &id, &id).unwrap();
    assert_eq!(down.phi(), c.unit_map());
    // a map that differs on one fibre does not descend
    let ab = arrow(&c, "a|b");
    let bad = Mor::from_fn(&x, c.arrows(), |k| if k == 1 { ab } else { up.at(k) }).unwrap();
    assert!(descend_nat(&bad, &pulled, &id, &id).is_err());
}

#[test]
fn ana_transformation_products() {
    let z = z2();
    let a = identity_ana(&z);
    let cells: Vec<AnaNat> = {
        let t = arrow(&z, "t");
        let e = arrow(&z, "e");
        vec![AnaNat::from_fn(&a, &a, |_, _| e).unwrap(), AnaNat::from_fn(&a, &a, |_, _| t).unwrap()]
    };
    for c in &cells {
        assert!(c.is_valid());
        let back = ana_vertical(&c.inverse(), c).unwrap();
        assert!(back.same_as(&AnaNat::identity(&a)));
        let one = ana_vertical(c, &AnaNat::identity(&a)).unwrap();
        assert!(one.same_as(c));
    }
    let ii = ana_horizontal(&AnaNat::identity(&a), &AnaNat::identity(&a)).unwrap();
    assert!(ii.is_valid());
    let aa = compose_anafunctors(&a, &a).unwrap();
    assert!(ii.same_as(&AnaNat::identity(&aa)));
    // interchange on Z/2
    for p1 in &cells {
        for p2 in &cells {
            for q1 in &cells {
                for q2 in &cells {
                    let lhs = ana_horizontal(&ana_vertical(q2, q1).unwrap(), &ana_vertical(p2, p1).unwrap()).unwrap();
                    let rhs =
                        ana_vertical(&ana_horizontal(q2, p2).unwrap(), &ana_horizontal(q1, p1).unwrap()).unwrap();
                    assert!(lhs.same_as(&rhs));
                }
            }
        }
    }
}

#[test]
fn vertical_product_with_an_isomorphism_matches_the_shortcut() {
    let base = point_group();
    let p = p2();
    // (X, p, constant): the swap of X = {a, b} is an automorphism of it
    let collapse = Anafunctor::from_maps(&base, &base, &p, &p, |_, _, _| 0).unwrap();
    assert!(collapse.is_valid());
    let swap = Mor::from_names(collapse.carrier(), collapse.carrier(), &[("a", "b"), ("b", "a")]).unwrap();
    let iso = AnaIso::new(&collapse, &collapse, swap.clone()).unwrap();
    let phi12 = iso.to_nat();
    assert!(phi12.is_valid());
    let id = identity_ana(&base);
    let phi23 = find_ana_nat(&collapse, &id).unwrap().unwrap();
    let general = ana_vertical(&phi23, &phi12).unwrap();
    // shortcut: precompose with φ on the first coordinate
    let shortcut = AnaNat::from_fn(&collapse, &id, |x1, x3| phi23.at(swap.at(x1), x3)).unwrap();
    assert!(general.same_as(&shortcut));
}

/// Composable chains of anafunctors between the point groupoid and `C2`.
fn ana_chain() -> (Anafunctor, Anafunctor, Anafunctor) {
    let base = point_group();
    let down = Anafunctor::hypercover_inverse(&base, &p2()).unwrap();
    let up = Anafunctor::hypercover(&base, &p2()).unwrap();
    let loop_ = compose_anafunctors(&up, &Anafunctor::identity(up.src())).unwrap();
    (down, up, loop_)
}

#[test]
fn associator_pentagon() {
    let (down, up, _) = ana_chain();
    let chains = [
        [down.clone(), up.clone(), down.clone(), up.clone()],
        [up.clone(), down.clone(), up.clone(), down.clone()],
    ];
    for [w, x, y, z] in &chains {
        // applied in order w, x, y, z
        let xw = compose_anafunctors(x, w).unwrap();
        let zy = compose_anafunctors(z, y).unwrap();
        let yx = compose_anafunctors(y, x).unwrap();
        let path1 = ana_associator(z, y, &xw).unwrap().then(&ana_associator(&zy, x, w).unwrap()).unwrap();
        let path2 = whisker_iso_right(z, &ana_associator(y, x, w).unwrap())
            .unwrap()
            .then(&ana_associator(z, &yx, w).unwrap())
            .unwrap()
            .then(&whisker_iso_left(&ana_associator(z, y, x).unwrap(), w).unwrap())
            .unwrap();
        assert_eq!(path1.map.table(), path2.map.table());
        assert!(same_anafunctor(&path1.to, &path2.to));
    }
}

#[test]
fn unitor_triangle() {
    let (down, up, loop_) = ana_chain();
    for (a, b) in [(&down, &up), (&up, &down), (&loop_, &down)] {
        let id = Anafunctor::identity(a.dst());
        let lhs = ana_associator(b, &id, a)
            .unwrap()
            .then(&whisker_iso_left(&right_unitor(b).unwrap(), a).unwrap())
            .unwrap();
        let rhs = whisker_iso_right(b, &left_unitor(a).unwrap()).unwrap();
        assert_eq!(lhs.map.table(), rhs.map.table());
    }
}

#[test]
fn weak_equivalence_test_examples() {
    let base = point_group();
    let hyper = Anafunctor::hypercover(&base, &p2()).unwrap();
    let eq = is_ana_equivalence(&hyper).unwrap();
    assert!(eq.flag());
    let lift = eq.witness.unwrap();
    assert!(lift.validate().passed(), "{}", lift.validate());

    let inc = Anafunctor::from_functor(&unit_at(&z2(), "*")).unwrap();
    let eq = is_ana_equivalence(&inc).unwrap();
    assert!(eq.essentially_surjective && !eq.fully_faithful && eq.witness.is_none());

    let id = identity_ana(&z4());
    let eq = is_ana_equivalence(&id).unwrap();
    assert!(eq.flag());
    assert!(eq.witness.unwrap().validate().passed());
}

#[test]
fn quasi_inverse_search_agrees_with_the_weak_equivalence_test() {
    let base = point_group();
    let battery = vec![
        Anafunctor::hypercover(&base, &p2()).unwrap(),
        Anafunctor::hypercover_inverse(&base, &p2()).unwrap(),
        Anafunctor::from_functor(&unit_at(&z2(), "*")).unwrap(),
        Anafunctor::from_functor(&unit_at(&cech2(), "a")).unwrap(),
        identity_ana(&z2()),
    ];
    for a in &battery {
        let flag = is_ana_equivalence(a).unwrap().flag();
        let search = find_quasi_inverse(a, 4).unwrap();
        assert_eq!(search.found.is_some(), flag);
        if let Some(q) = search.found {
            assert!(q.unit.is_valid() && q.counit.is_valid());
        }
    }
}
