use std::collections::HashMap;

use groupoidal::axioms::axiom_harness;
use groupoidal::backends::*;
use groupoidal::site::*;
use groupoidal::Error;
use itertools::Itertools;
use proptest::prelude::*;

fn set(names: &[&str]) -> Space {
    Obj::finset(names).unwrap()
}

fn map(dom: &Space, cod: &Space, pairs: &[(&str, &str)]) -> Mor {
    Mor::from_names(dom, cod, pairs).unwrap()
}

fn discrete2() -> Space {
    Obj::finspace(&["0", "1"], &[vec![], vec!["0"], vec!["1"], vec!["0", "1"]]).unwrap()
}

#[test]
fn composition_examples() {
    let ab = set(&["a", "b"]);
    let swap = map(&ab, &ab, &[("a", "b"), ("b", "a")]);
    assert_eq!(compose(&swap, &swap).unwrap().table(), Mor::identity(&ab).table());

    let pt = set(&["*"]);
    let p2 = map(&ab, &pt, &[("a", "*"), ("b", "*")]);
    assert_eq!(compose(&p2, &Mor::identity(&ab)).unwrap().table(), p2.table());

    let cde = set(&["c", "d", "e"]);
    let c = set(&["c"]);
    let incl = map(&c, &cde, &[("c", "c")]);
    let p3 = Mor::to_terminal(&cde, &pt).unwrap();
    let k = compose(&p3, &incl).unwrap();
    assert_eq!((k.dom().len(), k.table()), (1, &[0][..]));

    assert!(matches!(compose(&p2, &p3), Err(Error::BoundaryMismatch(_))));
    let sier = sierpinski();
    assert!(matches!(compose(&Mor::identity(&sier), &swap), Err(Error::BoundaryMismatch(_) | Error::BackendMismatch(_))));
}

#[test]
fn cover_and_iso_examples() {
    let ab = set(&["a", "b"]);
    let pt = set(&["*"]);
    assert!(Mor::to_terminal(&ab, &pt).unwrap().is_cover());
    let a = set(&["a"]);
    assert!(!map(&a, &ab, &[("a", "a")]).is_cover());

    let sier = sierpinski();
    let bij = Mor::new(&discrete2(), &sier, vec![0, 1]).unwrap();
    assert!(bij.is_surjective() && !bij.is_cover());
    assert!(!bij.is_iso() && bij.inverse().is_none());
    assert!(!fintop_is_open(&bij).unwrap());
    let spt = Obj::terminal(Backend::FinTop);
    assert!(fintop_is_open(&Mor::to_terminal(&sier, &spt).unwrap()).unwrap());
    assert!(fintop_is_open(&Mor::identity(&sier)).unwrap());
    assert!(matches!(fintop_is_open(&Mor::identity(&ab)), Err(Error::BackendMismatch(_))));

    let swap = map(&ab, &ab, &[("a", "b"), ("b", "a")]);
    assert!(swap.is_iso() && Mor::identity(&sier).is_iso());
    // the inverse of the discontinuous direction does not exist as a map
    assert!(Mor::new(&sier, &discrete2(), vec![0, 1]).is_err());
}

#[test]
fn fibre_product_examples() {
    let ab = set(&["a", "b"]);
    let cde = set(&["c", "d", "e"]);
    let pt = set(&["*"]);
    let (p2, p3) = (Mor::to_terminal(&ab, &pt).unwrap(), Mor::to_terminal(&cde, &pt).unwrap());
    assert_eq!(fibre_product(&p2, &p3).unwrap().len(), 6);
    let kp = fibre_product(&p2, &p2).unwrap();
    assert_eq!(kp.apex.names(), ["a|a", "a|b", "b|a", "b|b"]);
    let f = map(&cde, &ab, &[("c", "a"), ("d", "a"), ("e", "b")]);
    let fp = fibre_product(&Mor::identity(&ab), &f).unwrap();
    assert!(fp.pr2().is_iso());
    assert!(fibre_product(&p2, &f).is_err());
}

#[test]
fn coequalizer_examples() {
    let ab = set(&["a", "b"]);
    let pt = set(&["*"]);
    let p2 = Mor::to_terminal(&ab, &pt).unwrap();
    let kp = fibre_product(&p2, &p2).unwrap();
    let q = coequalizer(kp.pr1(), kp.pr2()).unwrap();
    assert_eq!(q.space.len(), 1);
    assert!(factor_through(&q.proj, &p2).unwrap().is_iso());

    let f = map(&ab, &ab, &[("a", "a"), ("b", "a")]);
    let q = coequalizer(&f, &f).unwrap();
    assert_eq!(q.classes, vec![vec![0], vec![1]]);

    let swap = map(&ab, &ab, &[("a", "b"), ("b", "a")]);
    let q = coequalizer(&Mor::identity(&ab), &swap).unwrap();
    assert_eq!(q.space.names(), ["a"]);
    assert!(coequalizer(&p2, &Mor::identity(&ab)).is_err());
}

#[test]
fn constructors() {
    let spec = |e: &[&str]| FinSetSpec { name: "X".into(), elements: e.iter().map(|s| s.to_string()).collect() };
    assert_eq!(make_finset(&spec(&["a", "b"])).unwrap().len(), 2);
    assert!(make_finset(&spec(&[])).unwrap().is_empty());
    assert_eq!(make_finset(&spec(&["c", "d", "e"])).unwrap().len(), 3);
    assert!(matches!(make_finset(&spec(&["a", "a"])), Err(Error::DuplicateElement(_))));

    let space = |opens: &[&[&str]]| FinSpaceSpec {
        name: "X".into(),
        elements: vec!["0".into(), "1".into()],
        opens: opens.iter().map(|o| o.iter().map(|s| s.to_string()).collect()).collect(),
    };
    assert_eq!(make_finspace(&space(&[&[], &["1"], &["0", "1"]])).unwrap().opens().len(), 3);
    assert!(make_finspace(&space(&[&[], &["0"], &["1"], &["0", "1"]])).unwrap().is_discrete());
    assert!(matches!(make_finspace(&space(&[&[], &["0"], &["1"]])), Err(Error::NotATopology(_))));
}

fn sets(max: usize) -> Vec<Space> {
    (0..=max).map(|n| Obj::finset(&(0..n).map(|i| i.to_string()).collect::<Vec<_>>()).unwrap()).collect()
}

/// `Σ_z |f⁻¹(z)|·|g⁻¹(z)|`.
fn expected_pairs(f: &Mor, g: &Mor) -> usize {
    let count = |m: &Mor| m.table().iter().copied().counts();
    let (cf, cg) = (count(f), count(g));
    cf.iter().map(|(z, a)| a * cg.get(z).copied().unwrap_or(0)).sum()
}

#[test]
fn fibre_product_sizes() {
    let ss = sets(3);
    for z in &ss {
        let into: Vec<Mor> = ss.iter().flat_map(|x| all_maps(x, z)).collect();
        for f in &into {
            for g in &into {
                let fp = fibre_product(f, g).unwrap();
                assert_eq!(fp.len(), expected_pairs(f, g));
                for t in fp.tuples() {
                    assert_eq!(f.at(t[0]), g.at(t[1]));
                }
                if g.is_cover() {
                    assert!(fp.pr1().is_cover());
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn fibre_product_sizes_up_to_five(
        z in 1usize..=5,
        f in prop::collection::vec(0usize..5, 0..=5),
        g in prop::collection::vec(0usize..5, 0..=5),
    ) {
        let ss = sets(5);
        let f: Vec<usize> = f.into_iter().map(|v| v % z).collect();
        let g: Vec<usize> = g.into_iter().map(|v| v % z).collect();
        let f = Mor::new(&ss[f.len()], &ss[z], f).unwrap();
        let g = Mor::new(&ss[g.len()], &ss[z], g).unwrap();
        prop_assert_eq!(fibre_product(&f, &g).unwrap().len(), expected_pairs(&f, &g));
    }
}

#[test]
fn finset_axioms() {
    let out = axiom_harness(&finset_sample(3, false), 1 << 26).unwrap();
    assert!(out.report.passed(), "{:?}", out.report.failures());
    assert_eq!(out.report.get("saturated").unwrap().witness.as_deref(), Some("holds on the sample"));

    let out = axiom_harness(&finset_sample(3, true), 1 << 26).unwrap();
    let failed: Vec<&str> = out.report.failures().iter().map(|f| f.check.as_str()).collect();
    assert_eq!(failed, ["maps-to-point"]);
    assert!(out.report.get("maps-to-point").unwrap().witness.as_deref().unwrap().contains("{}"));

    assert!(matches!(axiom_harness(&finset_sample(3, false), 10), Err(Error::BudgetExceeded { .. })));
}

#[test]
fn fintop_axioms() {
    let out = axiom_harness(&fintop_sample(3, false, true), 1 << 28).unwrap();
    assert!(out.report.passed(), "{:?}", out.report.failures());
    let w = out.saturation.expect("open surjections are not saturated");
    assert!(!w.f.is_open_map());
    assert!(!w.f2.is_cover());
    assert!(w.f2.after(&w.f1).unwrap().is_cover());
}

#[test]
fn continuity_is_monotonicity() {
    for a in topologies(3).iter().chain(topologies(2).iter()) {
        for b in topologies(3).iter().chain(topologies(2).iter()) {
            let (x, y) = (space_from_nbhds(a), space_from_nbhds(b));
            for t in (0..x.len()).map(|_| 0..y.len()).multi_cartesian_product() {
                let monotone = (0..x.len()).all(|i| (0..x.len()).all(|j| !x.leq(i, j) || y.leq(t[i], t[j])));
                let continuous = y.opens().iter().all(|o| {
                    let pre = (0..x.len()).filter(|&i| o.contains(t[i]));
                    let mut set = fixedbitset::FixedBitSet::with_capacity(x.len());
                    pre.for_each(|i| set.insert(i));
                    x.is_open(&set)
                });
                assert_eq!(monotone, continuous);
                assert_eq!(Mor::new(&x, &y, t.clone()).is_ok(), continuous);
            }
        }
    }
}

#[test]
fn quotient_topology_is_final() {
    for top in topologies(3) {
        let x = space_from_nbhds(&top);
        for f in all_maps(&x, &x) {
            let q = coequalizer(&f, &Mor::identity(&x)).unwrap();
            let k = q.space.len();
            for bits in 0..(1u32 << k) {
                let mut u = fixedbitset::FixedBitSet::with_capacity(k);
                (0..k).filter(|c| bits >> c & 1 == 1).for_each(|c| u.insert(c));
                let pre = q.proj.preimage(&u);
                assert_eq!(q.space.is_open(&u), x.is_open(&pre));
            }
        }
    }
}

#[test]
fn subcanonical_reconstruction() {
    // maps out of U constant on the kernel pair are exactly maps out of X
    for cover in sets(3).iter().flat_map(|u| sets(3).into_iter().flat_map(move |x| all_maps(u, &x))).filter(|p| p.is_cover()) {
        let kp = fibre_product(&cover, &cover).unwrap();
        for w in sets(2) {
            let descended: HashMap<Vec<usize>, Vec<usize>> = all_maps(cover.dom(), &w)
                .into_iter()
                .filter(|h| kp.tuples().iter().all(|t| h.at(t[0]) == h.at(t[1])))
                .map(|h| (h.table().to_vec(), factor_through(&cover, &h).unwrap().table().to_vec()))
                .collect();
            assert_eq!(descended.len(), all_maps(cover.cod(), &w).len());
        }
    }
}
