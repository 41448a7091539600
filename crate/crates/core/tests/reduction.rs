mod common;

use std::collections::HashMap;

use dvalue::horn::{accept_clause, build_clauses, target_value, PayoffClass, DEFAULT_HORN_CAP};
use dvalue::logic::{eval, formula_size, Assignment, VarId};
use dvalue::rational::rat;
use dvalue::reduction::verify::{verify_reduction, Report, VerifyOptions};
use dvalue::reduction::{decode_one, decode_two, encode_one, encode_two, guard_index, reduce, Manifest, MAX_ARITY};
use dvalue::turing::{parse_word, Cell, Symbol};

use common::machine;

fn sampled(name: &str, w: &str, k: u32, seed: u64, samples: u64) -> Report {
    let mut opts = VerifyOptions::sampled(k, seed, samples);
    opts.values = false;
    verify_reduction(&machine(name), &parse_word(w).unwrap(), &opts).unwrap()
}

fn assert_clean(r: &Report) {
    for s in &r.suites {
        assert_eq!(s.failures, 0, "{}: {:?}", s.name, s.examples);
        assert!(s.checked > 0 || s.name.starts_with("component/"), "{} checked nothing", s.name);
    }
    assert!(r.passed);
}

#[test]
fn sampled_suites_pass_on_every_corpus_machine() {
    for (name, w) in [("accept_first_zero.json", "0"), ("never_accepts.json", "1"), ("walk_and_return.json", "01")] {
        for k in 1..=2 {
            assert_clean(&sampled(name, w, k, 3, 20_000));
        }
    }
}

#[test]
fn sampled_reports_are_reproducible() {
    let a = sampled("never_accepts.json", "0", 1, 42, 5_000);
    let b = sampled("never_accepts.json", "0", 1, 42, 5_000);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.config.seed, Some(42));
    assert_eq!(Report::from_json(&a.to_json()).unwrap(), a);
}

#[test]
fn every_mutated_guard_is_detected() {
    let m = machine("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    for class in PayoffClass::ALL {
        for j in 0..=MAX_ARITY {
            let mut opts = VerifyOptions::sampled(1, 5, 2_000);
            opts.values = false;
            opts.mutate = Some((class, j));
            let r = verify_reduction(&m, &w, &opts).unwrap();
            assert!(!r.passed, "{}{j}", class.name());
            assert!(r.suite("partition").unwrap().failures > 0, "{}{j}", class.name());
        }
    }
}

#[test]
fn decode_examples() {
    let m = machine("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    let red = reduce(&m, &w, 1).unwrap();
    let layout = &red.layout;
    let delta = m.delta().unwrap();

    let mut one = Assignment::all_false(layout.player1()).unwrap();
    let p = decode_one(layout, &one).unwrap();
    assert_eq!((p.t, p.l, p.cell), (0, 0, Cell::plain(Symbol::Blank)));
    one.set(&layout.one.zero, true).unwrap();
    one.set(&layout.one.one, true).unwrap();
    assert_eq!(decode_one(layout, &one).unwrap().cell, Cell::plain(Symbol::Zero));

    let accept = accept_clause(&delta, 1).unwrap();
    let bits = encode_two(layout, &delta, &accept).unwrap();
    let two = Assignment::new(layout.player2(), bits).unwrap();
    assert!(two.get(&layout.accept).unwrap());
    assert_eq!(decode_two(layout, &delta, &w, &two).unwrap(), accept);

    // both symbols in the left slot of a transition clause
    let clauses = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    let c = clauses.iter().find(|c| c.body.len() == 2 && c.head.is_some()).unwrap();
    let mut two = Assignment::new(layout.player2(), encode_two(layout, &delta, c).unwrap()).unwrap();
    assert_eq!(&decode_two(layout, &delta, &w, &two).unwrap(), c);
    two.set(&layout.left.zero, true).unwrap();
    two.set(&layout.left.one, true).unwrap();
    assert_eq!(decode_two(layout, &delta, &w, &two).unwrap(), accept);
}

fn joint(red: &dvalue::reduction::Reduction, one: &[bool], two: &[bool]) -> Assignment {
    let mut universe = red.layout.player1();
    universe.extend(red.layout.player2());
    Assignment::new(universe, one.iter().chain(two).copied().collect()).unwrap()
}

#[test]
fn init_examples() {
    let m = machine("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    let red = reduce(&m, &w, 1).unwrap();
    let delta = m.delta().unwrap();
    let clauses = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    let fact = clauses[0].clone();
    let head = fact.head.unwrap();
    assert_eq!((head.t, head.l, head.cell), (0, 0, Cell::head(0, Symbol::Zero)));
    let one = encode_one(&red.layout, &head);
    let mut two = encode_two(&red.layout, &delta, &fact).unwrap();
    assert!(eval(&red.guards.init, &joint(&red, &one, &two)).unwrap());
    assert!(eval(red.guards.guard(PayoffClass::Rq, 0), &joint(&red, &one, &two)).unwrap());
    let neg = red.layout.player2().iter().position(|v| *v == red.layout.negative).unwrap();
    two[neg] = true;
    assert!(!eval(&red.guards.init, &joint(&red, &one, &two)).unwrap());
}

#[test]
fn guards_that_cannot_fire_are_false() {
    let m = machine("accept_first_zero.json");
    let red = reduce(&m, &parse_word("0").unwrap(), 1).unwrap();
    assert_eq!(red.guards.guard(PayoffClass::Rq, 1).fold().as_const(), Some(false));
    assert_eq!(red.guards.guard(PayoffClass::Rq, 4).fold().as_const(), Some(false));
}

#[test]
fn manifest_targets_and_blocks() {
    let m = machine("walk_and_return.json");
    let red = reduce(&m, &parse_word("01").unwrap(), 1).unwrap();
    let man = Manifest::from_json(&red.manifest.to_json()).unwrap();
    assert_eq!(man.threshold, rat(1, 2));
    assert_eq!(man.guards.len(), 15);
    for (i, g) in man.guards.iter().enumerate() {
        assert_eq!(guard_index(g.class, g.j), i);
        assert_eq!(g.target_value, target_value(g.class, g.j, 1));
    }
    assert_eq!(man.guards[guard_index(PayoffClass::Rq, 0)].target_value, rat(11, 16));
    assert_eq!(man.guards[guard_index(PayoffClass::Rpi, 4)].target_value, rat(7, 16));

    let outer: Vec<VarId> = red.layout.player1();
    let outer2: Vec<VarId> = red.layout.player2();
    let mut owner: HashMap<&VarId, usize> = HashMap::new();
    for v in outer.iter().chain(&outer2) {
        owner.insert(v, usize::MAX);
    }
    for (i, s) in red.subgames.iter().enumerate() {
        for v in &s.game.universe {
            assert!(owner.insert(v, i).is_none(), "{} is shared", v.name());
            assert!(v.name().starts_with(&man.guards[i].subgame_prefix));
        }
    }
    assert_eq!(owner.len(), red.game.universe.len());
    assert!(outer.iter().all(|v| red.game.player1.contains(v)));
    assert!(outer2.iter().all(|v| red.game.player2.contains(v)));
}

#[test]
fn size_grows_within_a_cubic_envelope() {
    let m = machine("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    let rows: Vec<(u32, usize, u64)> = (1..=6)
        .map(|k| {
            let red = reduce(&m, &w, k).unwrap();
            (k, red.game.universe.len(), formula_size(&red.game.goal))
        })
        .collect();
    let (_, v1, s1) = rows[0];
    for &(k, vars, size) in &rows {
        println!("k={k} variables={vars} goal size={size}");
        let envelope = ((k + 1) as f64 / 2.0).powi(3);
        assert!(vars as f64 <= v1 as f64 * envelope, "variables at k={k}");
        assert!(size as f64 <= s1 as f64 * envelope, "goal size at k={k}");
    }
    for pair in rows.windows(2) {
        let (k, _, a) = pair[0];
        let (_, _, b) = pair[1];
        let step = ((k + 2) as f64 / (k + 1) as f64).powi(3);
        assert!(b as f64 / a as f64 <= step, "growth from k={k}");
    }
}

#[test]
fn word_must_fit_and_window_must_be_positive() {
    let m = machine("accept_first_zero.json");
    assert!(reduce(&m, &parse_word("000").unwrap(), 1).is_err());
    assert!(reduce(&m, &parse_word("0").unwrap(), 0).is_err());
}
