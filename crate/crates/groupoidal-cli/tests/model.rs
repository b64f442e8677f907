use groupoidal_cli::*;
use proptest::prelude::*;

const SMALL: &str = "
# a point and a cover of it
finset PT = {*}
finset S2 = {a, b}
map p2 : S2 -> PT { a->*, b->* }
groupoid C2 = cech(p2)
";

fn syntax_error(text: &str) -> (usize, usize, String) {
    match parse_model(text) {
        Err(CliError::SyntaxError { line, col, msg }) => (line, col, msg),
        other => panic!("expected a syntax error, got {other:?}"),
    }
}

#[test]
fn small_model() {
    let m = parse_model(SMALL).unwrap();
    assert_eq!(m.file.decls.len(), 4);
    assert_eq!(m.names().collect::<Vec<_>>(), ["PT", "S2", "p2", "C2"]);
    assert!(matches!(m.get("C2").unwrap(), Value::Groupoid(g) if g.len1() == 4));
}

#[test]
fn duplicate_names() {
    let text = format!("{SMALL}finset S2 = {{x}}\n");
    match parse_model(&text) {
        Err(CliError::UnresolvedName { name, line, .. }) => assert_eq!((name.as_str(), line), ("S2", 7)),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_image() {
    let (line, _, msg) = syntax_error("finset PT = {*}\nfinset S2 = {a, b}\nmap p : S2 -> PT { a->* }\n");
    assert_eq!(line, 3);
    assert!(msg.contains("`b`"), "{msg}");
}

#[test]
fn positioned_errors() {
    assert_eq!(syntax_error("finset S = {a, b").0, 1);
    let (line, col, _) = syntax_error("finset S = {a}\nfinset T = {a} ; \n");
    assert_eq!((line, col), (2, 16));
    assert!(syntax_error("widget W = {a}").2.contains("widget"));
    assert!(syntax_error("finset PT = {*}\ngroupoid G = frob(PT)").2.contains("frob"));
    assert!(syntax_error("finset PT = {*}\nfinset S = {a}\nmap f : S -> PT { a->q }").2.contains("`q`"));
}

#[test]
fn resolution_errors() {
    assert!(matches!(parse_model("groupoid G = cech(p)"), Err(CliError::UnresolvedName { line: 1, .. })));
    assert!(matches!(parse_model("finset S = {a}\ngroupoid G = cech(S)"), Err(CliError::TypeMismatch(_))));
    // an anchor landing in the wrong space
    let text = format!("{SMALL}action A = right(C2, p2) {{ a.a|a->a }}\n");
    assert!(matches!(parse_model(&text), Err(CliError::BoundaryMismatch { line: 7, .. })));
    // not a topology
    assert!(matches!(parse_model("finspace X = {0, 1} opens {{}, {0}, {1}}"), Err(CliError::Build { line: 1, .. })));
    // a table entry outside the domain
    let text = "finset PT = {*}\nfinset E = {e}\nmap z : E -> PT { e->* }\ngroupoid G = multiplication(z, z) { e.e->e, e.f->e }";
    assert!(parse_model(text).is_err());
}

#[test]
fn actions_and_tables() {
    let m = parse_model(FIXTURES).unwrap();
    let Value::Action(swap) = m.get("SWAP").unwrap() else { panic!() };
    assert!(swap.is_valid());
    assert_eq!(swap.act(0, 1), 1);
    let Value::Groupoid(z) = m.get("Z2").unwrap() else { panic!() };
    assert!(z.is_valid());
    assert_eq!(z.inv(1), 1);
    let (_, _, msg) = syntax_error(&format!("{FIXTURES}action B = right(Z2, p2) {{ a.e->a, a.t->b, b.e->b }}\n"));
    assert!(msg.contains("b.t"), "{msg}");
}

#[test]
fn every_declaration_kind() {
    let text = format!(
        "{FIXTURES}
groupoid P = pair(S2)
groupoid U = unit(S2)
groupoid Q = pullback(Z2, p2)
groupoid Z3 = cyclic(3, fintop)
map f0 : PT -> Z2.0 {{ *->* }}
map f1 : PT -> Z2.1 {{ *->e }}
bibundle F = functor(PT, Z2, f0, f1)
bibundle D = dual(EQ23)
bibundle K = compose(EQ23, D)
map i2 : S2 -> S2 {{ a->a, b->b }}
action L = left(C2, i2) {{ a|a.a->a, a|b.b->a, b|a.a->b, b|b.b->b }}
action R = right(PT, p2) {{ a.*->a, b.*->b }}
bibundle LR = actions(L, R)
anafunctor A = of(CPT)
anafunctor I = identity(Z2)
anafunctor H = hypercover(PT, p2)
anafunctor HI = hypercover_inverse(PT, p3)
anafunctor FA = functor(PT, Z2, f0, f1)
simplex S0 = point(Z2)
simplex S1 = chain(U2, U2)
simplex S2H = horn(EQ23, D)
"
    );
    let m = parse_model(&text).unwrap();
    assert_eq!(m.file.decls.len(), parse_syntax(FIXTURES).unwrap().decls.len() + 21);
    let Value::Bibundle(k) = m.get("K").unwrap() else { panic!() };
    assert_eq!(k.carrier().len(), 4);
    let Value::Groupoid(q) = m.get("Q").unwrap() else { panic!() };
    assert_eq!(q.len1(), 8);
    let Value::Bibundle(lr) = m.get("LR").unwrap() else { panic!() };
    assert!(groupoidal::bibundle::classify(lr).is_equivalence);

    // serialising and parsing again gives the same declarations
    let again = parse_model(&serialize(&m.file)).unwrap();
    assert_eq!(again.file, m.file);
}

#[test]
fn fixtures_round_trip() {
    let m = parse_syntax(FIXTURES).unwrap();
    let text = serialize(&m);
    assert_eq!(parse_syntax(&text).unwrap(), m);
    // and the serialisation is stable
    assert_eq!(serialize(&parse_syntax(&text).unwrap()), text);
}

fn name() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_|*']{0,5}"
}

fn element() -> impl Strategy<Value = String> {
    "[a-z0-9*|]{1,3}"
}

fn decl() -> impl Strategy<Value = Decl> {
    use groupoidal_cli::model::{Body, Call};
    let names = || prop::collection::vec(element(), 0..5);
    prop_oneof![
        (name(), names()).prop_map(|(name, elements)| Decl { name, body: Body::FinSet { elements } }),
        (name(), names(), prop::collection::vec(names(), 0..4))
            .prop_map(|(name, elements, opens)| Decl { name, body: Body::FinSpace { elements, opens } }),
        (name(), name(), name(), prop::collection::vec((element(), element()), 0..4))
            .prop_map(|(name, dom, cod, pairs)| Decl { name, body: Body::Map { dom: format!("{dom}.0"), cod, pairs } }),
        (name(), name(), prop::collection::vec(name(), 0..4)).prop_map(|(name, op, args)| Decl {
            name,
            body: Body::Bibundle { call: Call { op, args } }
        }),
        (name(), name(), prop::collection::vec(name(), 0..3), prop::collection::vec([element(), element(), element()], 0..4))
            .prop_map(|(name, op, args, table)| Decl {
                name,
                body: Body::Action { call: Call { op, args }, table }
            }),
        (name(), name(), prop::option::of(prop::collection::vec([element(), element(), element()], 0..3)))
            .prop_map(|(name, op, table)| Decl {
                name,
                body: Body::Groupoid { call: Call { op, args: vec![] }, table }
            }),
    ]
}

proptest! {
    #[test]
    fn serialise_then_parse(decls in prop::collection::vec(decl(), 0..6)) {
        let m = ModelFile { decls, positions: vec![] };
        let back = parse_syntax(&serialize(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}
