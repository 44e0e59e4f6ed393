//! Helpers shared by the integration and acceptance suites: running the
//! binary, locating the corpus, building the coin scenario through the
//! public API, seeded random structures and formulas, and a naive
//! formula evaluator kept deliberately independent of the library's.

#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};
use std::sync::Arc;

use madplan::lang::{parse_domain, Domain};
use madplan::model::{
    AgentId, FluentAtom, Formula, Interpretation, KripkeStructure, PointedStructure, StateId,
    Term, Vocabulary,
};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

pub fn corpus_text(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).expect("corpus file readable")
}

/// Runs the `madplan` binary with the given arguments.
pub fn run_bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_madplan"))
        .args(args)
        .output()
        .expect("the binary runs")
}

pub fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

pub fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn agent(name: &str) -> AgentId {
    AgentId::new(name)
}

pub fn state(name: &str) -> StateId {
    StateId::new(name)
}

/// The bundled coin domain, grounded.
pub fn coin_domain() -> Domain {
    parse_domain(&corpus_text("coin.mad")).expect("coin.mad parses").ground()
}

/// The two-state coin model: interpretations identical except `tail`,
/// total relations for everyone, the tail state real.
pub fn coin_start() -> PointedStructure {
    let d = coin_domain();
    let voc = d.vocabulary().expect("coin vocabulary");
    let mut base = Interpretation::from_true_atoms([
        FluentAtom::new("looking_at_box", [Term::sym("a")]),
        FluentAtom::new("looking_at_box", [Term::sym("c")]),
        FluentAtom::new("has_key", [Term::sym("a")]),
    ]);
    let mut m = KripkeStructure::new(voc);
    let mut tails = base.clone();
    tails.set(FluentAtom::prop("tail"), true);
    m.add_state(state("s1"), tails).unwrap();
    base.set(FluentAtom::prop("tail"), false);
    m.add_state(state("s2"), base).unwrap();
    for ag in ["a", "b", "c"] {
        for from in ["s1", "s2"] {
            for to in ["s1", "s2"] {
                m.add_arc(&state(from), &agent(ag), &state(to)).unwrap();
            }
        }
    }
    PointedStructure::new(m, state("s1")).unwrap()
}

/// The vocabulary used by the random generators: two agents, two plain
/// fluents, and one two-member family.
pub fn test_vocabulary() -> Arc<Vocabulary> {
    Arc::new(
        Vocabulary::new(
            [agent("a"), agent("b")],
            [
                FluentAtom::prop("p"),
                FluentAtom::prop("q"),
                FluentAtom::new("v", [Term::Int(1)]),
                FluentAtom::new("v", [Term::Int(2)]),
            ],
        )
        .unwrap(),
    )
}

/// A random structure over [`test_vocabulary`] with 1..=max_states
/// states, arbitrary interpretations, and arcs drawn independently.
pub fn random_structure(rng: &mut ChaCha8Rng, max_states: usize) -> KripkeStructure {
    let voc = test_vocabulary();
    let fluents: Vec<FluentAtom> = voc.fluents().cloned().collect();
    let agents: Vec<AgentId> = voc.agents().cloned().collect();
    let n = rng.gen_range(1..=max_states);
    let ids: Vec<StateId> = (1..=n).map(|k| state(&format!("s{k}"))).collect();
    let mut m = KripkeStructure::new(voc);
    for id in &ids {
        let interp = Interpretation::from_true_atoms(
            fluents.iter().filter(|_| rng.gen_bool(0.5)).cloned(),
        );
        m.add_state(id.clone(), interp).unwrap();
    }
    for ag in &agents {
        for from in &ids {
            for to in &ids {
                if rng.gen_bool(0.35) {
                    m.add_arc(from, ag, to).unwrap();
                }
            }
        }
    }
    m
}

/// A random formula over [`test_vocabulary`] of the given depth.
pub fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let leaf = |rng: &mut ChaCha8Rng| match rng.gen_range(0..6) {
        0 => Formula::True,
        1 => Formula::False,
        2 => Formula::atom(FluentAtom::prop("p")),
        3 => Formula::atom(FluentAtom::prop("q")),
        4 => Formula::atom(FluentAtom::new("v", [Term::Int(rng.gen_range(1..=2))])),
        _ => Formula::KnowsValue(agent(if rng.gen_bool(0.5) { "a" } else { "b" }), "v".to_string()),
    };
    if depth == 0 {
        return leaf(rng);
    }
    match rng.gen_range(0..9) {
        0 => leaf(rng),
        1 => random_formula(rng, depth - 1).not(),
        2 => random_formula(rng, depth - 1).and(random_formula(rng, depth - 1)),
        3 => random_formula(rng, depth - 1).or(random_formula(rng, depth - 1)),
        4 => random_formula(rng, depth - 1).implies(random_formula(rng, depth - 1)),
        5 => Formula::knows(agent("a"), random_formula(rng, depth - 1)),
        6 => Formula::knows(agent("b"), random_formula(rng, depth - 1)),
        7 => {
            let grp = random_group(rng);
            Formula::everyone(grp, random_formula(rng, depth - 1))
        }
        _ => {
            let grp = random_group(rng);
            Formula::common(grp, random_formula(rng, depth - 1))
        }
    }
}

fn random_group(rng: &mut ChaCha8Rng) -> Vec<AgentId> {
    match rng.gen_range(0..3) {
        0 => vec![agent("a")],
        1 => vec![agent("b")],
        _ => vec![agent("a"), agent("b")],
    }
}

/// A direct recursive evaluator used as an oracle against the library's
/// `eval`/`entails`. Common knowledge walks reachable states explicitly.
pub fn naive_eval(m: &KripkeStructure, s: &StateId, f: &Formula) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => m.interpretation(s).expect("state exists").truth(a),
        Formula::Not(g) => !naive_eval(m, s, g),
        Formula::And(g, h) => naive_eval(m, s, g) && naive_eval(m, s, h),
        Formula::Or(g, h) => naive_eval(m, s, g) || naive_eval(m, s, h),
        Formula::Implies(g, h) => !naive_eval(m, s, g) || naive_eval(m, s, h),
        Formula::Knows(i, g) => m.successors(i, s).all(|t| naive_eval(m, t, g)),
        Formula::Everyone(grp, g) => {
            grp.iter().all(|i| m.successors(i, s).all(|t| naive_eval(m, t, g)))
        }
        Formula::Common(grp, g) => {
            // Every state reachable through a nonempty path of arcs
            // labeled by group members must satisfy g.
            let mut seen: Vec<&StateId> = Vec::new();
            let mut queue: Vec<&StateId> =
                grp.iter().flat_map(|i| m.successors(i, s)).collect();
            while let Some(t) = queue.pop() {
                if seen.contains(&t) {
                    continue;
                }
                seen.push(t);
                queue.extend(grp.iter().flat_map(|i| m.successors(i, t)));
            }
            seen.into_iter().all(|t| naive_eval(m, t, g))
        }
        Formula::KnowsValue(i, family) => {
            let instances: Vec<&FluentAtom> = m.vocabulary().family_instances(family).collect();
            instances.iter().any(|atom| {
                m.successors(i, s)
                    .all(|t| m.interpretation(t).expect("state exists").truth(atom))
            })
        }
    }
}

/// All index sequences of exactly `len` over `0..k`, lexicographically.
pub fn index_sequences(k: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..k {
        for mut rest in index_sequences(k, len - 1) {
            let mut seq = Vec::with_capacity(len);
            seq.push(i);
            seq.append(&mut rest);
            out.push(seq);
        }
    }
    out
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
