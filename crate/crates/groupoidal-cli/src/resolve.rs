//! Turns parsed declarations into library values, in order.

use std::collections::HashMap;

use groupoidal::action::{Action, Bibundle, Side};
use groupoidal::bibundle::{bibundle_to_anafunctor, cech_bibundle, cech_equivalence, compose_bibundles, dual, functor_to_bibundle};
use groupoidal::groupoid::{cech_groupoid, cyclic, pair_groupoid, pullback_groupoid, unit_groupoid, Groupoid, Grpd};
use groupoidal::morphism::{Anafunctor, Functor};
use groupoidal::nerve::{horn_fill_inner2, NSimplex};
use groupoidal::site::{fibre_product, fit, Backend, Mor, Obj, Space};

use crate::error::{CliError, Result};
use crate::model::{parse_syntax, Body, Call, Entry, ModelFile, Pos};

#[derive(Debug, Clone)]
pub enum Value {
    Space(Space),
    Map(Mor),
    Groupoid(Grpd),
    Action(Action),
    Bibundle(Bibundle),
    Anafunctor(Anafunctor),
    Simplex(NSimplex),
}

impl Value {
    pub fn kind(&self) -> &'static str {
        match self {
            Value::Space(_) => "space",
            Value::Map(_) => "map",
            Value::Groupoid(_) => "groupoid",
            Value::Action(_) => "action",
            Value::Bibundle(_) => "bibundle",
            Value::Anafunctor(_) => "anafunctor",
            Value::Simplex(_) => "simplex",
        }
    }
}

/// A parsed model with every declaration built.
#[derive(Debug, Clone, Default)]
pub struct Model {
    pub file: ModelFile,
    values: HashMap<String, Value>,
}

/// Parses and resolves a model.
pub fn parse_model(text: &str) -> Result<Model> {
    let file = parse_syntax(text)?;
    let mut model = Model { file: ModelFile::default(), values: HashMap::new() };
    for (decl, &pos) in file.decls.iter().zip(&file.positions) {
        if model.values.contains_key(&decl.name) {
            return Err(CliError::UnresolvedName {
                name: decl.name.clone(),
                line: pos.line,
                msg: "already declared".into(),
            });
        }
        let v = model.build(&decl.body, pos)?;
        model.values.insert(decl.name.clone(), v);
    }
    model.file = file;
    Ok(model)
}

fn lib_error(pos: Pos, e: groupoidal::Error) -> CliError {
    match e {
        groupoidal::Error::BoundaryMismatch(msg) => CliError::BoundaryMismatch { line: pos.line, msg },
        groupoidal::Error::UnknownElement(el) => CliError::SyntaxError {
            line: pos.line,
            col: pos.col,
            msg: format!("unknown element `{el}`"),
        },
        source => CliError::Build { line: pos.line, source },
    }
}

impl Model {
    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.file.decls.iter().map(|d| d.name.as_str())
    }

    pub fn get(&self, name: &str) -> Result<&Value> {
        self.values.get(name).ok_or_else(|| CliError::UnresolvedName {
            name: name.into(),
            line: 0,
            msg: "not declared".into(),
        })
    }

    /// Every value of a kind, in declaration order.
    pub fn all(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.names().map(|n| (n, &self.values[n]))
    }

    fn lookup(&self, name: &str, pos: Pos) -> Result<&Value> {
        self.values.get(name).ok_or_else(|| CliError::UnresolvedName {
            name: name.into(),
            line: pos.line,
            msg: "not declared before use".into(),
        })
    }

    fn mismatch(&self, name: &str, want: &str, pos: Pos) -> CliError {
        let got = self.values.get(name).map(|v| v.kind()).unwrap_or("unknown");
        CliError::TypeMismatch(format!("line {}: `{name}` is a {got}, expected a {want}", pos.line))
    }

    /// A space, or the objects (`G.0`) or arrows (`G.1`) of a groupoid.
    pub fn space(&self, name: &str, pos: Pos) -> Result<Space> {
        if let Some((g, part)) = name.split_once('.') {
            let g = self.groupoid(g, pos)?;
            return match part {
                "0" => Ok(g.objects().clone()),
                "1" => Ok(g.arrows().clone()),
                _ => Err(CliError::SyntaxError { line: pos.line, col: pos.col, msg: format!("`{name}`: use .0 or .1") }),
            };
        }
        match self.lookup(name, pos)? {
            Value::Space(s) => Ok(s.clone()),
            _ => Err(self.mismatch(name, "space", pos)),
        }
    }

    pub fn map(&self, name: &str, pos: Pos) -> Result<Mor> {
        match self.lookup(name, pos)? {
            Value::Map(m) => Ok(m.clone()),
            _ => Err(self.mismatch(name, "map", pos)),
        }
    }

    /// A groupoid, or the unit groupoid of a space.
    pub fn groupoid(&self, name: &str, pos: Pos) -> Result<Grpd> {
        match self.lookup(name, pos)? {
            Value::Groupoid(g) => Ok(g.clone()),
            Value::Space(s) => Ok(unit_groupoid(s)),
            _ => Err(self.mismatch(name, "groupoid", pos)),
        }
    }

    pub fn action(&self, name: &str, pos: Pos) -> Result<Action> {
        match self.lookup(name, pos)? {
            Value::Action(a) => Ok(a.clone()),
            _ => Err(self.mismatch(name, "action", pos)),
        }
    }

    pub fn bibundle(&self, name: &str, pos: Pos) -> Result<Bibundle> {
        match self.lookup(name, pos)? {
            Value::Bibundle(x) => Ok(x.clone()),
            _ => Err(self.mismatch(name, "bibundle", pos)),
        }
    }

    fn arity(call: &Call, n: usize, pos: Pos) -> Result<()> {
        if call.args.len() == n {
            Ok(())
        } else {
            Err(CliError::SyntaxError {
                line: pos.line,
                col: pos.col,
                msg: format!("`{}` takes {n} argument(s), got {}", call.op, call.args.len()),
            })
        }
    }

    fn unknown_op(call: &Call, kind: &str, pos: Pos) -> CliError {
        CliError::SyntaxError { line: pos.line, col: pos.col, msg: format!("unknown {kind} constructor `{}`", call.op) }
    }

    fn functor(&self, args: &[String], pos: Pos) -> Result<Functor> {
        let (g, h) = (self.groupoid(&args[0], pos)?, self.groupoid(&args[1], pos)?);
        let f0 = fit(&self.map(&args[2], pos)?, g.objects(), h.objects(), "object map").map_err(|e| lib_error(pos, e))?;
        let f1 = fit(&self.map(&args[3], pos)?, g.arrows(), h.arrows(), "arrow map").map_err(|e| lib_error(pos, e))?;
        Functor::new(&g, &h, f0, f1).map_err(|e| lib_error(pos, e))
    }

    fn build(&self, body: &Body, pos: Pos) -> Result<Value> {
        let lib = |e| lib_error(pos, e);
        Ok(match body {
            Body::FinSet { elements } => Value::Space(Obj::finset(elements).map_err(lib)?),
            Body::FinSpace { elements, opens } => Value::Space(Obj::finspace(elements, opens).map_err(lib)?),
            Body::Map { dom, cod, pairs } => {
                let (d, c) = (self.space(dom, pos)?, self.space(cod, pos)?);
                if let Some(missing) = d.names().iter().find(|x| !pairs.iter().any(|(a, _)| a == *x)) {
                    return Err(CliError::SyntaxError {
                        line: pos.line,
                        col: pos.col,
                        msg: format!("no image for element `{missing}`"),
                    });
                }
                Value::Map(Mor::from_names(&d, &c, pairs).map_err(lib)?)
            }
            Body::Groupoid { call, table } => Value::Groupoid(self.build_groupoid(call, table.as_deref(), pos)?),
            Body::Action { call, table } => {
                Model::arity(call, 2, pos)?;
                let side = match call.op.as_str() {
                    "right" => Side::Right,
                    "left" => Side::Left,
                    _ => return Err(Model::unknown_op(call, "action", pos)),
                };
                let g = self.groupoid(&call.args[0], pos)?;
                let anchor = self.map(&call.args[1], pos)?;
                let anchor = fit(&anchor, anchor.dom(), g.objects(), "anchor").map_err(lib)?;
                Value::Action(action_from_table(&g, side, &anchor, table, pos)?)
            }
            Body::Bibundle { call } => Value::Bibundle(self.build_bibundle(call, pos)?),
            Body::Anafunctor { call } => {
                let a = &call.args;
                let ana = match call.op.as_str() {
                    "identity" => {
                        Model::arity(call, 1, pos)?;
                        Anafunctor::identity(&self.groupoid(&a[0], pos)?)
                    }
                    "functor" => {
                        Model::arity(call, 4, pos)?;
                        Anafunctor::from_functor(&self.functor(a, pos)?).map_err(lib)?
                    }
                    "hypercover" | "hypercover_inverse" => {
                        Model::arity(call, 2, pos)?;
                        let (g, p) = (self.groupoid(&a[0], pos)?, self.map(&a[1], pos)?);
                        if call.op == "hypercover" {
                            Anafunctor::hypercover(&g, &p).map_err(lib)?
                        } else {
                            Anafunctor::hypercover_inverse(&g, &p).map_err(lib)?
                        }
                    }
                    "of" => {
                        Model::arity(call, 1, pos)?;
                        bibundle_to_anafunctor(&self.bibundle(&a[0], pos)?).map_err(lib)?.ana
                    }
                    _ => return Err(Model::unknown_op(call, "anafunctor", pos)),
                };
                Value::Anafunctor(ana)
            }
            Body::Simplex { call } => {
                let a = &call.args;
                let chain = || a.iter().map(|n| self.bibundle(n, pos)).collect::<Result<Vec<_>>>();
                let s = match call.op.as_str() {
                    "point" => {
                        Model::arity(call, 1, pos)?;
                        NSimplex::point(&self.groupoid(&a[0], pos)?)
                    }
                    "chain" => NSimplex::from_chain(&chain()?).map_err(lib)?,
                    "horn" => {
                        Model::arity(call, 2, pos)?;
                        let c = chain()?;
                        horn_fill_inner2(&c[0], &c[1]).map_err(lib)?
                    }
                    _ => return Err(Model::unknown_op(call, "simplex", pos)),
                };
                Value::Simplex(s)
            }
        })
    }

    fn build_groupoid(&self, call: &Call, table: Option<&[Entry]>, pos: Pos) -> Result<Grpd> {
        let lib = |e| lib_error(pos, e);
        let a = &call.args;
        if table.is_some() != (call.op == "multiplication") {
            return Err(CliError::SyntaxError {
                line: pos.line,
                col: pos.col,
                msg: "only `multiplication(r, s)` takes a table".into(),
            });
        }
        Ok(match call.op.as_str() {
            "cech" => {
                Model::arity(call, 1, pos)?;
                cech_groupoid(&self.map(&a[0], pos)?).map_err(lib)?
            }
            "pair" => {
                Model::arity(call, 1, pos)?;
                pair_groupoid(&self.space(&a[0], pos)?).map_err(lib)?
            }
            "unit" => {
                Model::arity(call, 1, pos)?;
                unit_groupoid(&self.space(&a[0], pos)?)
            }
            "cyclic" => {
                let n: usize = a.first().and_then(|n| n.parse().ok()).filter(|&n| n > 0).ok_or_else(|| {
                    CliError::SyntaxError { line: pos.line, col: pos.col, msg: "cyclic(n) needs a positive order".into() }
                })?;
                let backend = match a.get(1).map(String::as_str) {
                    None | Some("finset") => Backend::FinSet,
                    Some("fintop") => Backend::FinTop,
                    Some(b) => {
                        return Err(CliError::SyntaxError { line: pos.line, col: pos.col, msg: format!("unknown backend `{b}`") })
                    }
                };
                cyclic(backend, n)
            }
            "pullback" => {
                Model::arity(call, 2, pos)?;
                pullback_groupoid(&self.groupoid(&a[0], pos)?, &self.map(&a[1], pos)?).map_err(lib)?.groupoid
            }
            "multiplication" => {
                Model::arity(call, 2, pos)?;
                let (r, s) = (self.map(&a[0], pos)?, self.map(&a[1], pos)?);
                let s = fit(&s, r.dom(), r.cod(), "source").map_err(lib)?;
                let comp = fibre_product(&s, &r).map_err(lib)?;
                let g1 = r.dom().clone();
                let lookup = entries(table.unwrap_or(&[]));
                let mut m = Vec::with_capacity(comp.len());
                for t in comp.tuples() {
                    let key = (g1.name(t[0]).to_string(), g1.name(t[1]).to_string());
                    let v = lookup.get(&key).ok_or_else(|| CliError::SyntaxError {
                        line: pos.line,
                        col: pos.col,
                        msg: format!("no product for `{}.{}`", key.0, key.1),
                    })?;
                    m.push(g1.elem(v).map_err(lib)?);
                }
                check_extra(&lookup, |a, b| Some(comp.find(&[g1.elem(a).ok()?, g1.elem(b).ok()?]).is_some()), pos)?;
                let m = Mor::new(&comp.apex, &g1, m).map_err(lib)?;
                std::sync::Arc::new(Groupoid::from_multiplication(r.cod().clone(), g1, r, s, m).map_err(lib)?)
            }
            _ => return Err(Model::unknown_op(call, "groupoid", pos)),
        })
    }

    fn build_bibundle(&self, call: &Call, pos: Pos) -> Result<Bibundle> {
        let lib = |e| lib_error(pos, e);
        let a = &call.args;
        Ok(match call.op.as_str() {
            "unit" => {
                Model::arity(call, 1, pos)?;
                Bibundle::unit(&self.groupoid(&a[0], pos)?)
            }
            "cech" => {
                Model::arity(call, 1, pos)?;
                cech_bibundle(&self.map(&a[0], pos)?).map_err(lib)?
            }
            "equiv" => {
                Model::arity(call, 2, pos)?;
                cech_equivalence(&self.map(&a[0], pos)?, &self.map(&a[1], pos)?).map_err(lib)?
            }
            "dual" => {
                Model::arity(call, 1, pos)?;
                dual(&self.bibundle(&a[0], pos)?)
            }
            "compose" => {
                Model::arity(call, 2, pos)?;
                compose_bibundles(&self.bibundle(&a[0], pos)?, &self.bibundle(&a[1], pos)?).map_err(lib)?.bibundle
            }
            "functor" => {
                Model::arity(call, 4, pos)?;
                functor_to_bibundle(&self.functor(a, pos)?).map_err(lib)?
            }
            "actions" => {
                Model::arity(call, 2, pos)?;
                Bibundle::new(self.action(&a[0], pos)?, self.action(&a[1], pos)?).map_err(lib)?
            }
            _ => return Err(Model::unknown_op(call, "bibundle", pos)),
        })
    }
}

fn entries(table: &[Entry]) -> HashMap<(String, String), String> {
    table.iter().map(|[a, b, c]| ((a.clone(), b.clone()), c.clone())).collect()
}

/// Rejects entries outside the domain of the table.
fn check_extra(
    lookup: &HashMap<(String, String), String>,
    inside: impl Fn(&str, &str) -> Option<bool>,
    pos: Pos,
) -> Result<()> {
    let mut keys: Vec<_> = lookup.keys().collect();
    keys.sort();
    for (a, b) in keys {
        if inside(a, b) != Some(true) {
            return Err(CliError::BoundaryMismatch { line: pos.line, msg: format!("`{a}.{b}` is not composable") });
        }
    }
    Ok(())
}

/// Right tables list `x.g->y`, left tables `g.x->y`.
fn action_from_table(g: &Grpd, side: Side, anchor: &Mor, table: &[Entry], pos: Pos) -> Result<Action> {
    let x = anchor.dom();
    let lookup = entries(table);
    let key = |p: usize, a: usize| match side {
        Side::Right => (x.name(p).to_string(), g.arrow_name(a).to_string()),
        Side::Left => (g.arrow_name(a).to_string(), x.name(p).to_string()),
    };
    let problem = std::cell::RefCell::new(None);
    let built = Action::from_fn(g, side, anchor, |p, a| {
        let k = key(p, a);
        let found = match lookup.get(&k) {
            Some(v) => x.elem(v).map_err(|_| format!("unknown element `{v}`")),
            None => Err(format!("no entry for `{}.{}`", k.0, k.1)),
        };
        found.unwrap_or_else(|msg| {
            problem.borrow_mut().get_or_insert(msg);
            p
        })
    });
    if let Some(msg) = problem.into_inner() {
        return Err(CliError::SyntaxError { line: pos.line, col: pos.col, msg });
    }
    let built = built.map_err(|e| lib_error(pos, e))?;
    let pairs: Vec<(String, String)> = built.pairs().map(|(p, a)| key(p, a)).collect();
    check_extra(&lookup, |a, b| Some(pairs.iter().any(|k| k.0 == a && k.1 == b)), pos)?;
    Ok(built)
}
