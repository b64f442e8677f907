//! Small named examples used throughout the tests and the CLI.

use crate::groupoid::{cech_groupoid, group, Grpd};
use crate::site::{Backend, Mor, Obj, Space};

/// The point `{*}`.
pub fn pt() -> Space {
    Obj::terminal(Backend::FinSet)
}

pub fn s2() -> Space {
    Obj::finset(&["a", "b"]).expect("distinct")
}

pub fn s3() -> Space {
    Obj::finset(&["c", "d", "e"]).expect("distinct")
}

pub fn p2() -> Mor {
    Mor::to_terminal(&s2(), &pt()).expect("map to point")
}

pub fn p3() -> Mor {
    Mor::to_terminal(&s3(), &pt()).expect("map to point")
}

/// The Čech groupoid of `p2`, the pair groupoid on `{a, b}`.
pub fn cech2() -> Grpd {
    cech_groupoid(&p2()).expect("p2 is a cover")
}

pub fn cech3() -> Grpd {
    cech_groupoid(&p3()).expect("p3 is a cover")
}

/// `Z/2` with elements `e`, `t`.
pub fn z2() -> Grpd {
    group(Backend::FinSet, &["e", "t"], |a, b| a ^ b).expect("Z/2")
}

/// `Z/4` with elements `0..4`.
pub fn z4() -> Grpd {
    crate::groupoid::cyclic(Backend::FinSet, 4)
}

pub fn z3() -> Grpd {
    crate::groupoid::cyclic(Backend::FinSet, 3)
}

pub fn sier() -> Space {
    crate::backends::sierpinski()
}

/// `Z/2` acting on `{a, b}` from the right by swapping the points.
pub fn swap() -> crate::action::Action {
    let z = z2();
    let s = s2();
    let anchor = Mor::to_terminal(&s, z.objects()).expect("map to point");
    crate::action::Action::right(&z, &anchor, |x, g| x ^ g).expect("swap action")
}

/// `S2 × S3` between the Čech groupoids of `p2` and `p3`.
pub fn eq23() -> crate::action::Bibundle {
    crate::bibundle::cech_equivalence(&p2(), &p3()).expect("both covers of the point")
}

/// `S2` as an equivalence from the Čech groupoid of `p2` to the point.
pub fn cech_pt() -> crate::action::Bibundle {
    crate::bibundle::cech_bibundle(&p2()).expect("p2 is a cover")
}
