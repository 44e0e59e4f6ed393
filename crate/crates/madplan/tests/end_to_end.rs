//! Exercises the public API end to end, the way a downstream crate
//! would: parse a domain, build or generate an initial model, apply
//! actions, evaluate queries, and plan.

use std::fs;
use std::path::PathBuf;

use madplan::initgen::{announcement_chain, generate_explicit, generate_partition, GenConfig};
use madplan::lang::{parse_domain, parse_query, Domain};
use madplan::model::{
    AgentId, FluentAtom, Interpretation, KripkeStructure, PointedStructure, StateId, Term,
    Vocabulary,
};
use madplan::plan::{holds_after, plan, PlanRequest, PlanResult, QueryVerdict, Strategy};

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

fn coin_domain() -> Domain {
    parse_domain(&corpus("coin.mad")).expect("coin.mad parses").ground()
}

/// The two-state coin model, assembled by hand through the public
/// constructors: interpretations identical except `tail`, total
/// relations, the tail state real.
fn coin_start(d: &Domain) -> PointedStructure {
    let voc = d.vocabulary().expect("coin vocabulary");
    let mut base = Interpretation::from_true_atoms([
        FluentAtom::new("looking_at_box", [Term::sym("a")]),
        FluentAtom::new("looking_at_box", [Term::sym("c")]),
        FluentAtom::new("has_key", [Term::sym("a")]),
    ]);
    let mut m = KripkeStructure::new(voc);
    let mut tails = base.clone();
    tails.set(FluentAtom::prop("tail"), true);
    m.add_state(StateId::new("s1"), tails).unwrap();
    base.set(FluentAtom::prop("tail"), false);
    m.add_state(StateId::new("s2"), base).unwrap();
    for ag in ["a", "b", "c"] {
        for from in ["s1", "s2"] {
            for to in ["s1", "s2"] {
                m.add_arc(&StateId::new(from), &AgentId::new(ag), &StateId::new(to)).unwrap();
            }
        }
    }
    PointedStructure::new(m, StateId::new("s1")).unwrap()
}

#[test]
fn the_coin_story_plays_out_through_the_public_api() {
    let d = coin_domain();
    let start = coin_start(&d);

    let q = parse_query("k(a, tail) & ~k(b, tail) after [peek(a,c)]", &d).unwrap();
    assert_eq!(holds_after(&start, &q).unwrap(), QueryVerdict::Holds);

    let q = parse_query("k(c, tail) after [peek(a,c)]", &d).unwrap();
    assert_eq!(holds_after(&start, &q).unwrap(), QueryVerdict::Fails);

    // b cannot peek: only a holds the key.
    let q = parse_query("tail after [peek(b,a)]", &d).unwrap();
    assert!(matches!(holds_after(&start, &q).unwrap(), QueryVerdict::Undefined(_)));

    let goal = parse_query("k(c, k(a, tail) | k(a, ~tail)) after []", &d).unwrap().goal;
    for strategy in [Strategy::Bfs, Strategy::Dfs] {
        let request = PlanRequest {
            initial: start.clone(),
            domain: &d,
            goal: goal.clone(),
            max_len: 3,
            strategy,
        };
        match plan(&request).unwrap() {
            PlanResult::Found { plan, .. } => {
                let names: Vec<String> = plan.iter().map(|a| a.to_string()).collect();
                assert_eq!(names, ["peek(a,c)"]);
            }
            PlanResult::NotFoundWithinBound => panic!("{strategy} found nothing"),
        }
    }
}

#[test]
fn explicit_generation_is_deterministic_and_respects_inits() {
    let d = coin_domain();
    let cfg = GenConfig { limit: Some(5), ..GenConfig::for_domain(&d, 2) };
    let first: Vec<PointedStructure> = generate_explicit(&d, &cfg).unwrap().collect();
    let second: Vec<PointedStructure> = generate_explicit(&d, &cfg).unwrap().collect();
    assert_eq!(first, second);
    assert_eq!(first.len(), 5);
    let inits = d.init_conjunction();
    for p in &first {
        assert!(p.entails(&inits).unwrap());
    }
}

#[test]
fn a_small_sum_product_universe_dies_out() {
    let text = "agent(s). agent(p). universe(x, 1..20). universe(y, 1..20). \
                constraint(1 < x & x < y & x + y <= 20). \
                observes(s, x + y). observes(p, x * y).";
    let d = parse_domain(text).unwrap();
    let m = generate_partition(d.universe().unwrap()).unwrap();
    assert_eq!(m.state_count(), 72);

    let steps = [
        parse_query("k(s, ~(kv(p, x) & kv(p, y))) after []", &d).unwrap().goal,
        parse_query("kv(p, x) & kv(p, y) after []", &d).unwrap().goal,
        parse_query("kv(s, x) & kv(s, y) after []", &d).unwrap().goal,
    ];
    let counts: Vec<usize> = (1..=steps.len())
        .map(|k| announcement_chain(&m, &steps[..k]).state_count())
        .collect();
    assert_eq!(counts, [4, 4, 0], "at 20 the dialogue leaves no solution");
}

#[test]
fn vocabularies_and_structures_compose_without_the_surface_language() {
    let voc = Vocabulary::new(
        [AgentId::new("a")],
        [FluentAtom::prop("p"), FluentAtom::new("v", [Term::Int(1)])],
    )
    .unwrap();
    let mut m = KripkeStructure::new(std::sync::Arc::new(voc));
    m.add_state(StateId::new("s1"), Interpretation::from_true_atoms([FluentAtom::prop("p")]))
        .unwrap();
    m.add_state(StateId::new("s2"), Interpretation::from_true_atoms([])).unwrap();
    m.add_arc(&StateId::new("s1"), &AgentId::new("a"), &StateId::new("s2")).unwrap();
    m.add_arc(&StateId::new("s2"), &AgentId::new("a"), &StateId::new("s1")).unwrap();

    use madplan::model::Formula;
    let knows_not_p =
        Formula::knows(AgentId::new("a"), Formula::atom(FluentAtom::prop("p")).not());
    assert!(m.entails(&StateId::new("s1"), &knows_not_p).unwrap());
    assert!(!m.entails(&StateId::new("s2"), &knows_not_p).unwrap());
}
