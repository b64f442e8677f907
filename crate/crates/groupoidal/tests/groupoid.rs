use groupoidal::backends::all_maps;
use groupoidal::fixtures::*;
use groupoidal::groupoid::*;
use groupoidal::site::{compose, fibre_product, Backend, Mor, Obj, Space};
use groupoidal::Error;

fn set(names: &[&str]) -> Space {
    Obj::finset(names).unwrap()
}

/// Rebuilds `g` from `r`, `s` and `m` alone.
fn rebuild(g: &Grpd) -> Result<Groupoid, Error> {
    Groupoid::from_multiplication(
        g.objects().clone(),
        g.arrows().clone(),
        g.range().clone(),
        g.source().clone(),
        g.mult().clone(),
    )
}

/// Every unit and inverse map satisfying the laws, by brute force over all maps.
fn all_units_and_inverses(g: &Groupoid) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let units: Vec<Vec<usize>> = all_maps(g.objects(), g.arrows())
        .into_iter()
        .filter(|u| {
            (0..g.len1()).all(|a| {
                g.try_mul(u.at(g.r(a)), a) == Some(a) && g.try_mul(a, u.at(g.s(a))) == Some(a)
            })
        })
        .map(|u| u.table().to_vec())
        .collect();
    let mut inverses = vec![];
    for u in &units {
        for i in all_maps(g.arrows(), g.arrows()) {
            let ok = (0..g.len1()).all(|a| {
                g.try_mul(i.at(a), a) == Some(u[g.s(a)]) && g.try_mul(a, i.at(a)) == Some(u[g.r(a)])
            });
            if ok {
                inverses.push(i.table().to_vec());
            }
        }
    }
    (units, inverses)
}

fn small_groupoids() -> Vec<(String, Grpd)> {
    let mut out = vec![
        ("Z/2".into(), z2()),
        ("Z/3".into(), z3()),
        ("Z/4".into(), z4()),
        ("CECH2".into(), cech2()),
        ("CECH3".into(), cech3()),
    ];
    for n in 1..=2 {
        let x = set(&["a", "b"][..n]);
        out.push((format!("pair{n}"), pair_groupoid(&x).unwrap()));
    }
    let x = set(&["a", "b", "c"]);
    let y = set(&["u", "v"]);
    let p = Mor::from_names(&x, &y, &[("a", "u"), ("b", "u"), ("c", "v")]).unwrap();
    out.push(("cech(2+1)".into(), cech_groupoid(&p).unwrap()));
    out
}

#[test]
fn examples_are_valid() {
    for (name, g) in small_groupoids() {
        assert!(g.is_valid(), "{name}: {:?}", g.validate().failures());
    }
    let z = z2();
    assert_eq!((z.len0(), z.len1()), (1, 2));
    assert_eq!(z.mul(1, 1), 0);
    assert_eq!(z.inv(1), 1);
    let pg = pair_groupoid(&set(&["a", "b"])).unwrap();
    assert_eq!(pg.arrows().names(), ["a|a", "a|b", "b|a", "b|b"]);
    assert_eq!(pg.arrow_name(pg.inv(1)), "b|a");
    assert_eq!(pg.arrow_name(pg.mul(1, 2)), "a|a");
}

#[test]
fn corrupted_multiplication() {
    let pg = pair_groupoid(&set(&["a", "b"])).unwrap();
    let comp = fibre_product(pg.source(), pg.range()).unwrap();
    // (a,b)·(b,a) = (a,b) instead of (a,a)
    let m = comp
        .map_to(pg.arrows(), |t| if t == [1, 2] { 1 } else { pg.mul(t[0], t[1]) })
        .unwrap();
    let bad = Groupoid::from_parts(
        pg.objects().clone(),
        pg.arrows().clone(),
        pg.range().clone(),
        pg.source().clone(),
        m.clone(),
        pg.unit_map().clone(),
        pg.inverse_map().clone(),
    )
    .unwrap();
    let rep = bad.validate();
    assert!(!rep.passed());
    assert!(rep.get("product-source").unwrap().witness.as_deref() == Some("(a|b, b|a)"));
    let err = Groupoid::from_multiplication(
        pg.objects().clone(),
        pg.arrows().clone(),
        pg.range().clone(),
        pg.source().clone(),
        m,
    );
    assert!(err.is_err());
}

#[test]
fn unit_and_inverse_from_multiplication() {
    for (name, g) in small_groupoids() {
        let h = rebuild(&g).unwrap();
        assert_eq!(h.unit_map().table(), g.unit_map().table(), "{name}");
        assert_eq!(h.inverse_map().table(), g.inverse_map().table(), "{name}");
    }
    let z4 = z4();
    for k in 0..4 {
        assert_eq!(z4.inv(k), (4 - k) % 4);
    }
}

#[test]
fn recovered_structure_is_unique() {
    for (name, g) in small_groupoids() {
        if g.len1() > 6 {
            continue;
        }
        let (units, inverses) = all_units_and_inverses(&g);
        assert_eq!(units, [g.unit_map().table().to_vec()], "{name}");
        assert_eq!(inverses, [g.inverse_map().table().to_vec()], "{name}");
    }
}

#[test]
fn cech_groupoids() {
    assert_eq!(cech2().len1(), 4);
    assert_eq!(cech3().len1(), 9);
    let x = set(&["a", "b", "c"]);
    let g = cech_groupoid(&Mor::identity(&x)).unwrap();
    assert!(same_grpd(&g, &unit_groupoid(&x)) || (g.len1() == 3 && g.len0() == 3));
    assert!((0..3).all(|k| g.unit(k) == k));
    let a = set(&["a"]);
    let incl = Mor::from_names(&a, &x, &[("a", "a")]).unwrap();
    assert!(matches!(cech_groupoid(&incl), Err(Error::NotACover(_))));
}

#[test]
fn unit_groupoids() {
    for names in [&["*"][..], &["a", "b"], &[]] {
        let g = unit_groupoid(&set(names));
        assert!(g.is_valid());
        assert_eq!((g.len0(), g.len1()), (names.len(), names.len()));
    }
}

#[test]
fn pullbacks() {
    // along a cover of a unit groupoid: the Čech groupoid
    let pt = pt();
    let pb = pullback_groupoid(&unit_groupoid(&pt), &p2()).unwrap();
    assert!(pb.groupoid.is_valid());
    assert_eq!(pb.groupoid.len1(), cech2().len1());
    assert_eq!(pb.groupoid.range().table(), cech2().range().table());
    assert_eq!(pb.groupoid.source().table(), cech2().source().table());

    // along the identity: a copy of G
    for (name, g) in small_groupoids() {
        let pb = pullback_groupoid(&g, &Mor::identity(g.objects())).unwrap();
        assert_eq!(pb.groupoid.len1(), g.len1(), "{name}");
        assert!(pb.hyper.f1().is_iso(), "{name}");
        for k in 0..pb.groupoid.len1() {
            assert_eq!(pb.triple(k), (g.r(k), k, g.s(k)));
        }
    }

    // Z/2 along p2: 2·2·2 arrows
    let pb = pullback_groupoid(&z2(), &p2()).unwrap();
    assert_eq!(pb.groupoid.len1(), 8);
    assert!(pb.groupoid.is_valid());

    let x = set(&["a"]);
    let incl = Mor::from_names(&x, &s2(), &[("a", "a")]).unwrap();
    assert!(pullback_groupoid(&pair_groupoid(&s2()).unwrap(), &incl).is_err());
}

#[test]
fn iterated_pullbacks() {
    // pulling back along q then p is isomorphic to pulling back along p∘q
    let g = pair_groupoid(&s2()).unwrap();
    let x = set(&["c", "d", "e"]);
    let p = Mor::from_names(&x, &s2(), &[("c", "a"), ("d", "a"), ("e", "b")]).unwrap();
    let w = set(&["1", "2", "3", "4"]);
    for q in all_maps(&w, &x).into_iter().filter(|q| q.is_cover()) {
        let once = pullback_groupoid(&g, &p).unwrap();
        let twice = pullback_groupoid(&once.groupoid, &q).unwrap();
        let direct = pullback_groupoid(&g, &compose(&p, &q).unwrap()).unwrap();
        assert_eq!(twice.groupoid.len1(), direct.groupoid.len1());
        for k in 0..twice.groupoid.len1() {
            let (w1, a, w2) = twice.triple(k);
            let (_, b, _) = once.triple(a);
            let d = direct.arrow(w1, b, w2);
            // the comparison respects the structure maps
            assert_eq!(direct.groupoid.r(d), twice.groupoid.r(k));
            assert_eq!(direct.groupoid.s(d), twice.groupoid.s(k));
            for l in 0..twice.groupoid.len1() {
                if let Some(kl) = twice.groupoid.try_mul(k, l) {
                    let (v1, a2, v2) = twice.triple(l);
                    let e = direct.arrow(v1, once.triple(a2).1, v2);
                    let (y1, a3, y2) = twice.triple(kl);
                    assert_eq!(direct.groupoid.mul(d, e), direct.arrow(y1, once.triple(a3).1, y2));
                }
            }
        }
    }
}

#[test]
fn multiplication_is_a_cover() {
    for (name, g) in small_groupoids() {
        assert!(g.mult().is_cover(), "{name}");
    }
    let z = cyclic(Backend::FinTop, 3);
    assert!(z.is_valid() && z.mult().is_cover());
}

#[test]
fn group_laws() {
    for n in 1..=5 {
        let g = cyclic(Backend::FinSet, n);
        let e = g.unit(0);
        assert_eq!(e, 0);
        for a in 0..n {
            assert_eq!(g.mul(e, a), a);
            assert_eq!(g.mul(a, e), a);
            assert_eq!(g.mul(a, g.inv(a)), e);
        }
    }
    // not associative
    let bad = group(Backend::FinSet, &["0", "1", "2"], |a, b| (2 * a + b) % 3);
    assert!(bad.is_err());
}
