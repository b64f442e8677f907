//! Constructors and enumerators for the two concrete sites.

use itertools::Itertools;

use crate::error::{Error, Result};
use crate::site::{Backend, Mor, Obj, Space};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSetSpec {
    pub name: String,
    pub elements: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinSpaceSpec {
    pub name: String,
    pub elements: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

pub fn make_finset(spec: &FinSetSpec) -> Result<Space> {
    Obj::finset(&spec.elements)
}

pub fn make_finspace(spec: &FinSpaceSpec) -> Result<Space> {
    Obj::finspace(&spec.elements, &spec.opens)
}

pub fn fintop_is_open(f: &Mor) -> Result<bool> {
    if f.dom().backend() != Backend::FinTop {
        return Err(Error::BackendMismatch("open-map test needs finite spaces".into()));
    }
    Ok(f.is_open_map())
}

/// The Sierpiński space: points `0`, `1`, opens `∅, {1}, {0,1}`.
pub fn sierpinski() -> Space {
    Obj::finspace(&["0", "1"], &[vec![], vec!["1"], vec!["0", "1"]]).expect("valid topology")
}

fn point_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Every topology on the points `0..n`, as lists of point neighbourhoods.
pub fn topologies(n: usize) -> Vec<Vec<Vec<usize>>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let choices: Vec<Vec<Vec<usize>>> = (0..n)
        .map(|x| {
            let others: Vec<usize> = (0..n).filter(|&y| y != x).collect();
            others
                .iter()
                .copied()
                .powerset()
                .map(|mut s| {
                    s.push(x);
                    s.sort_unstable();
                    s
                })
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    for pick in choices.iter().map(|c| c.iter()).multi_cartesian_product() {
        let ok = (0..n).all(|x| pick[x].iter().all(|&y| pick[y].iter().all(|z| pick[x].contains(z))));
        if ok {
            out.push(pick.into_iter().cloned().collect());
        }
    }
    out
}

fn relation(nbhd: &[Vec<usize>], perm: &[usize]) -> Vec<bool> {
    let n = nbhd.len();
    let mut out = vec![false; n * n];
    for x in 0..n {
        for &y in &nbhd[x] {
            out[perm[x] * n + perm[y]] = true;
        }
    }
    out
}

/// One topology from each homeomorphism class on `n` points.
pub fn topologies_up_to_homeomorphism(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for t in topologies(n) {
        let canon = (0..n).permutations(n).map(|p| relation(&t, &p)).min().unwrap_or_default();
        if seen.insert(canon) {
            out.push(t);
        }
    }
    out
}

pub fn space_from_nbhds(nbhd: &[Vec<usize>]) -> Space {
    Obj::from_neighbourhoods(&point_names(nbhd.len()), nbhd).expect("valid neighbourhoods")
}

/// Every structure-preserving map between two objects.
pub fn all_maps(dom: &Space, cod: &Space) -> Vec<Mor> {
    if dom.is_empty() {
        return vec![Mor::new(dom, cod, vec![]).expect("empty map")];
    }
    (0..dom.len())
        .map(|_| 0..cod.len())
        .multi_cartesian_product()
        .filter_map(|t| Mor::new(dom, cod, t).ok())
        .collect()
}

/// Objects together with every map between them.
#[derive(Debug, Clone)]
pub struct Sample {
    pub backend: Backend,
    pub objects: Vec<Space>,
    pub maps: Vec<Mor>,
}

impl Sample {
    pub fn from_objects(backend: Backend, objects: Vec<Space>) -> Sample {
        let mut maps = Vec::new();
        for a in &objects {
            for b in &objects {
                maps.extend(all_maps(a, b));
            }
        }
        Sample { backend, objects, maps }
    }
}

/// Finite sets of sizes `0..=max` (or `1..=max`) with all maps between them.
pub fn finset_sample(max: usize, include_empty: bool) -> Sample {
    let lo = if include_empty { 0 } else { 1 };
    let objects = (lo..=max)
        .map(|n| Obj::finset(&point_names(n)).expect("distinct names"))
        .collect();
    Sample::from_objects(Backend::FinSet, objects)
}

/// Finite spaces with at most `max` points and all continuous maps between
/// them. With `up_to_homeomorphism` only one space per class is kept.
pub fn fintop_sample(max: usize, include_empty: bool, up_to_homeomorphism: bool) -> Sample {
    let lo = if include_empty { 0 } else { 1 };
    let mut objects = Vec::new();
    for n in lo..=max {
        let tops = if up_to_homeomorphism { topologies_up_to_homeomorphism(n) } else { topologies(n) };
        objects.extend(tops.iter().map(|t| space_from_nbhds(t)));
    }
    Sample::from_objects(Backend::FinTop, objects)
}
