//! Command dispatch and the reports it produces.

use std::fmt;

use serde::Serialize;

use groupoidal::action::Bibundle;
use groupoidal::axioms::axiom_harness;
use groupoidal::backends::{space_from_nbhds, topologies, Sample};
use groupoidal::bibundle::{
    all_bibundles, bibundle_to_anafunctor, check_inverse, classify, classify_report, composite_witness, compose_bibundles,
    decompose_actor,
};
use groupoidal::bundle::is_basic;
use groupoidal::groupoid::{same_grpd, Grpd};
use groupoidal::morphism::{compose_anafunctors, find_quasi_inverse, is_ana_equivalence};
use groupoidal::nerve::{horn_fill_inner2, unique_inner3_check, validate_simplex, NSimplex};
use groupoidal::report::{Outcome, Report};
use groupoidal::site::{Backend, Obj, Space};

use crate::error::{CliError, Result};
use crate::model::Pos;
use crate::resolve::{Model, Value};

/// Enumeration budget for the brute-force commands.
pub const BUDGET: usize = 1 << 26;

pub const COMMANDS: [&str; 7] = ["validate", "compose", "equiv", "decompose", "orbit", "nerve", "axioms"];

#[derive(Debug, Clone, Copy)]
pub struct Opts {
    pub backend: Backend,
    /// Carrier cap for searches and samples.
    pub max: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliFinding {
    pub check: String,
    pub basis: String,
    pub result: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliReport {
    pub command: String,
    pub status: Status,
    pub findings: Vec<CliFinding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CliReport {
    pub fn from_report(command: &str, rep: &Report) -> CliReport {
        let findings = rep
            .findings
            .iter()
            .map(|f| CliFinding {
                check: f.check.clone(),
                basis: f.basis.clone(),
                result: f.outcome.as_str().into(),
                witness: f.witness.clone(),
            })
            .collect();
        let status = if rep.passed() { Status::Pass } else { Status::Fail };
        CliReport { command: command.into(), status, findings, error: None }
    }

    pub fn error(command: &str, e: &CliError) -> CliReport {
        CliReport { command: command.into(), status: Status::Error, findings: vec![], error: Some(e.to_string()) }
    }

    pub fn get(&self, check: &str) -> Option<&CliFinding> {
        self.findings.iter().find(|f| f.check == check)
    }

    pub fn exit_code(&self) -> u8 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Error => 2,
        }
    }
}

impl fmt::Display for CliReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = match self.status {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Error => "error",
        };
        writeln!(f, "{}: {status}", self.command)?;
        if let Some(e) = &self.error {
            writeln!(f, "  {e}")?;
        }
        for x in &self.findings {
            write!(f, "  {:<4} {}  ({})", x.result, x.check, x.basis)?;
            match &x.witness {
                Some(w) => writeln!(f, ": {w}")?,
                None => writeln!(f)?,
            }
        }
        Ok(())
    }
}

const HERE: Pos = Pos { line: 0, col: 0 };

fn flag(b: bool) -> String {
    if b { "true" } else { "false" }.into()
}

fn arity(command: &str, names: &[String], ok: impl Fn(usize) -> bool, usage: &str) -> Result<()> {
    if ok(names.len()) {
        Ok(())
    } else {
        Err(CliError::TypeMismatch(format!("{command} takes {usage}")))
    }
}

pub fn run_command(model: &Model, command: &str, names: &[String], opts: &Opts) -> Result<CliReport> {
    let rep = match command {
        "validate" => validate(model, names)?,
        "compose" => {
            arity(command, names, |n| n == 2, "two bibundles or two anafunctors")?;
            compose(model, &names[0], &names[1])?
        }
        "equiv" => {
            arity(command, names, |n| n == 1 || n == 2, "a bibundle, an anafunctor, or two groupoids")?;
            equiv(model, names, opts)?
        }
        "decompose" => {
            arity(command, names, |n| n == 1, "one bibundle")?;
            decompose(model, &names[0])?
        }
        "orbit" => {
            arity(command, names, |n| n == 1, "one action")?;
            orbit(model, &names[0])?
        }
        "nerve" => nerve(model, names)?,
        "axioms" => axioms(opts)?,
        other => return Err(CliError::UnknownCommand(other.into())),
    };
    Ok(CliReport::from_report(command, &rep))
}

fn validate(model: &Model, names: &[String]) -> Result<Report> {
    let names: Vec<String> = if names.is_empty() { model.names().map(String::from).collect() } else { names.to_vec() };
    let mut rep = Report::new();
    for n in &names {
        match model.get(n)? {
            Value::Space(s) => {
                rep.info(&format!("{n}.points"), "number of points", s.len().to_string());
                if s.backend() == Backend::FinTop {
                    rep.info(&format!("{n}.opens"), "number of open sets", s.opens().len().to_string());
                }
            }
            Value::Map(m) => {
                rep.record(&format!("{n}.continuous"), "preimages of opens are open", (!m.is_continuous_by_opens()).then(|| m.to_string()));
                rep.info(&format!("{n}.cover"), "the map is a cover", flag(m.is_cover()));
            }
            Value::Groupoid(g) => rep.extend(n, g.validate()),
            Value::Action(a) => rep.extend(n, a.validate()),
            Value::Bibundle(x) => rep.extend(n, classify_report(x)),
            Value::Anafunctor(a) => rep.extend(n, a.validate()),
            Value::Simplex(s) => rep.extend(n, validate_simplex(s)?),
        }
    }
    Ok(rep)
}

fn compose(model: &Model, a: &str, b: &str) -> Result<Report> {
    let mut rep = Report::new();
    match (model.get(a)?, model.get(b)?) {
        (Value::Bibundle(x), Value::Bibundle(y)) => {
            let c = compose_bibundles(x, y)?;
            rep.info("composite.points", "points of the composite", c.bibundle.carrier().len().to_string());
            rep.extend("composite", classify_report(&c.bibundle));
            let (cx, cy, cc) = (classify(x), classify(y), classify(&c.bibundle));
            let closed = |p: bool, q: bool, r: bool| (p && q && !r).then(|| "lost under composition".to_string());
            rep.record("functors-compose", "a composite of bibundle functors is a functor", closed(cx.is_functor, cy.is_functor, cc.is_functor));
            rep.record(
                "equivalences-compose",
                "a composite of equivalences is an equivalence",
                closed(cx.is_equivalence, cy.is_equivalence, cc.is_equivalence),
            );
            let pairs = groupoidal::site::fibre_product(x.s(), y.r())?;
            let m = pairs.map_to(c.bibundle.carrier(), |t| c.class(t[0], t[1]))?;
            let w = composite_witness(x, y, &c.bibundle, &m)?;
            rep.record("quotient", "the orbit map onto the composite is a cover", (!w.cover).then(|| "not a cover".into()));
        }
        (Value::Anafunctor(f), Value::Anafunctor(g)) => {
            let c = compose_anafunctors(g, f)?;
            rep.info("composite.points", "points of the composite carrier", c.carrier().len().to_string());
            rep.extend("composite", c.validate());
        }
        (l, r) => {
            return Err(CliError::TypeMismatch(format!(
                "compose needs two bibundles or two anafunctors, got a {} and a {}",
                l.kind(),
                r.kind()
            )))
        }
    }
    Ok(rep)
}

fn bibundle_equiv(rep: &mut Report, x: &Bibundle, prefix: &str) -> Result<bool> {
    let c = classify(x);
    rep.extend(prefix, classify_report(x));
    if c.is_equivalence {
        let isos = check_inverse(x)?;
        let ok = isos.iso1.is_iso() && isos.iso2.is_iso();
        rep.record(&format!("{prefix}.inverse"), "the dual is an inverse up to isomorphism", (!ok).then(|| "comparison maps are not isomorphisms".into()));
    }
    if c.is_functor {
        let ana = bibundle_to_anafunctor(x)?.ana;
        let flag = is_ana_equivalence(&ana)?.flag();
        rep.record(
            &format!("{prefix}.anafunctor"),
            "the anafunctor is an equivalence iff the bibundle is",
            (flag != c.is_equivalence).then(|| format!("anafunctor says {flag}")),
        );
    }
    Ok(c.is_equivalence)
}

fn carriers(backend: Backend, n: usize) -> Vec<Space> {
    let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    match backend {
        Backend::FinSet => vec![Obj::finset(&names).expect("distinct")],
        Backend::FinTop => topologies(n).iter().map(|t| space_from_nbhds(t)).collect(),
    }
}

fn equiv(model: &Model, names: &[String], opts: &Opts) -> Result<Report> {
    let mut rep = Report::new();
    let basis = "a bibundle between them is an equivalence";
    match (model.get(&names[0])?, names.get(1)) {
        (Value::Bibundle(x), None) => {
            let eq = bibundle_equiv(&mut rep, x, &names[0])?;
            rep.record("equivalence", "both actions are principal", (!eq).then(|| format!("{} is not an equivalence", names[0])));
        }
        (Value::Anafunctor(a), None) => {
            let e = is_ana_equivalence(a)?;
            rep.info("essentially-surjective", "every object is reached up to isomorphism", flag(e.essentially_surjective));
            rep.info("fully-faithful", "bijective on arrows between any two objects", flag(e.fully_faithful));
            let search = find_quasi_inverse(a, opts.max)?;
            rep.info("quasi-inverse.candidates", "anafunctors searched", search.candidates.to_string());
            rep.record(
                "quasi-inverse",
                "a quasi-inverse exists iff fully faithful and essentially surjective",
                (search.found.is_some() != e.flag()).then(|| format!("search up to {} points disagrees", opts.max)),
            );
            rep.record("equivalence", "fully faithful and essentially surjective", (!e.flag()).then(|| "not an equivalence".into()));
        }
        (_, Some(other)) => {
            let g = model.groupoid(&names[0], HERE)?;
            let h = model.groupoid(other, HERE)?;
            let declared: Vec<(String, Bibundle)> = model
                .all()
                .filter_map(|(n, v)| match v {
                    Value::Bibundle(x) if same_grpd(x.g(), &g) && same_grpd(x.h(), &h) => Some((n.to_string(), x.clone())),
                    _ => None,
                })
                .collect();
            let mut found = None;
            for (n, x) in &declared {
                if bibundle_equiv(&mut rep, x, n)? && found.is_none() {
                    found = Some(n.clone());
                }
            }
            if declared.is_empty() {
                found = search_equivalence(&g, &h, opts)?;
            }
            match found {
                Some(n) => rep.push("equivalence", basis, Outcome::Pass, Some(n)),
                None if declared.is_empty() => {
                    rep.record("equivalence", basis, Some(format!("none with at most {} points", opts.max)))
                }
                None => rep.record("equivalence", basis, Some("no declared bibundle is an equivalence".into())),
            }
        }
        (v, None) => {
            return Err(CliError::TypeMismatch(format!("equiv needs a bibundle or an anafunctor, got a {}", v.kind())));
        }
    }
    Ok(rep)
}

/// The first equivalence bibundle found on carriers up to the cap.
fn search_equivalence(g: &Grpd, h: &Grpd, opts: &Opts) -> Result<Option<String>> {
    for n in 1..=opts.max {
        for c in carriers(g.backend(), n) {
            if let Some(x) = all_bibundles(g, h, &c, BUDGET)?.into_iter().find(|x| classify(x).is_equivalence) {
                return Ok(Some(format!("found on {}", x.carrier())));
            }
        }
    }
    Ok(None)
}

fn decompose(model: &Model, name: &str) -> Result<Report> {
    let x = model.bibundle(name, HERE)?;
    let d = decompose_actor(&x)?;
    let mut rep = Report::new();
    rep.info("k.objects", "objects of the intermediate groupoid", d.k.len0().to_string());
    rep.info("k.arrows", "arrows of the intermediate groupoid", d.k.len1().to_string());
    rep.extend("k", d.k.validate());
    rep.extend("actor", d.actor.action().validate());
    rep.record(
        "equivalence",
        "the second factor is an equivalence",
        (!classify(&d.equivalence).is_equivalence).then(|| "not an equivalence".into()),
    );
    let ok = d.recompose.is_valid() && d.recompose.is_iso();
    rep.record("recompose", "the composite of the factors is isomorphic to the input", (!ok).then(|| "no isomorphism".into()));
    Ok(rep)
}

fn orbit(model: &Model, name: &str) -> Result<Report> {
    let a = model.action(name, HERE)?;
    let b = is_basic(&a)?;
    let base = &b.orbits.space;
    // a one-point orbit space is the terminal object
    let shown = if base.len() == 1 { "{*}".to_string() } else { format!("{{{}}}", base.names().join(", ")) };
    let mut rep = Report::new();
    rep.info("base", "the orbit space", shown);
    rep.info("cover", "the orbit map is a cover", flag(b.orbits.is_cover));
    rep.info("free", "only units fix points", flag(b.free));
    rep.record("basic", "principal over the orbit space", (!b.basic).then(|| "not basic".into()));
    Ok(rep)
}

fn nerve(model: &Model, names: &[String]) -> Result<Report> {
    let mut rep = Report::new();
    let values: Vec<&Value> = names.iter().map(|n| model.get(n)).collect::<Result<_>>()?;
    match values.as_slice() {
        [Value::Simplex(s)] => rep.extend("simplex", validate_simplex(s)?),
        [Value::Bibundle(x), Value::Bibundle(y)] => {
            let s = horn_fill_inner2(x, y)?;
            rep.info("filler.points", "points over the long edge", s.carrier(0, 2).len().to_string());
            rep.extend("filler", validate_simplex(&s)?);
        }
        [Value::Bibundle(_), Value::Bibundle(_), Value::Bibundle(_)] => {
            let chain: Vec<Bibundle> = names.iter().map(|n| model.bibundle(n, HERE)).collect::<Result<_>>()?;
            let s = NSimplex::from_chain(&chain)?;
            rep.extend("simplex", validate_simplex(&s)?);
            for missing in [(0, 1, 3), (0, 2, 3)] {
                let mut partial = s.clone();
                partial.mult.remove(&missing);
                let fill = unique_inner3_check(&partial, missing, BUDGET)?;
                let (i, j, k) = missing;
                rep.record(
                    &format!("horn-{i}{j}{k}"),
                    "an inner 3-horn has exactly one filler",
                    (fill.fillers.len() != 1).then(|| format!("{} fillers", fill.fillers.len())),
                );
            }
        }
        _ => {
            return Err(CliError::TypeMismatch(
                "nerve takes a simplex, or a chain of two or three bibundles".into(),
            ))
        }
    }
    Ok(rep)
}

/// Most maps a sample may hold before it is built.
pub const MAP_BUDGET: usize = 1 << 22;

fn axioms(opts: &Opts) -> Result<Report> {
    let objects: Vec<Space> = (1..=opts.max).flat_map(|n| carriers(opts.backend, n)).collect();
    // |Y|^|X| bounds the maps X -> Y, and the sample holds all of them
    let bound = objects
        .iter()
        .flat_map(|x| objects.iter().map(move |y| (y.len() as f64).powi(x.len() as i32)))
        .sum::<f64>();
    if bound > MAP_BUDGET as f64 {
        return Err(groupoidal::Error::BudgetExceeded { needed: bound as usize, budget: MAP_BUDGET }.into());
    }
    let out = axiom_harness(&Sample::from_objects(opts.backend, objects), BUDGET)?;
    let mut rep = Report::new();
    rep.info("instances", "instances checked", out.instances.to_string());
    rep.extend("", out.report);
    Ok(rep)
}
