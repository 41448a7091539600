mod common;

use serde_json::Value;

use dvalue::game::{BooleanGame, MatrixGame};
use dvalue::horn::{build_clauses, dump_clauses, parse_clause_dump, DEFAULT_HORN_CAP};
use dvalue::logic::Formula;
use dvalue::rational::{is_canonical, parse_rational, to_canonical};
use dvalue::reduction::verify::{verify_reduction, Report, VerifyOptions};
use dvalue::reduction::{reduce, Manifest};
use dvalue::solver::{solve_zero_sum, SolveResult};
use dvalue::turing::{parse_word, TMachine};

use common::{corpus_files, machine};

fn value(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

/// `print(parse(text))` carries the same JSON value as `text`, and printing
/// is a fixed point of parse-then-print.
fn round_trip<T>(text: &str, parse: impl Fn(&str) -> T, print: impl Fn(&T) -> String) -> T {
    let x = parse(text);
    let printed = print(&x);
    assert_eq!(value(&printed), value(text));
    assert_eq!(print(&parse(&printed)), printed);
    x
}

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn corpus_games() {
    let files = corpus_files("games");
    assert!(!files.is_empty());
    for f in files {
        let g = round_trip(&read(&f), |t| BooleanGame::from_json(t).unwrap(), BooleanGame::to_json);
        g.validate().unwrap();
        let goal = Formula::from_json(&g.goal.to_json()).unwrap();
        assert_eq!(goal, g.goal);
    }
}

#[test]
fn corpus_machines() {
    let files = corpus_files("machines");
    assert_eq!(files.len(), 3);
    for f in files {
        let m = round_trip(&read(&f), |t| TMachine::from_json(t).unwrap(), TMachine::to_json);
        m.validate().unwrap();
        assert_eq!(TMachine::from_json(&m.to_json_pretty()).unwrap(), m);
    }
}

fn assert_canonical_strings(v: &Value) {
    match v {
        Value::String(s) => assert!(is_canonical(s), "{s:?} is not canonical"),
        Value::Array(xs) => xs.iter().for_each(assert_canonical_strings),
        other => panic!("expected rationals, found {other}"),
    }
}

#[test]
fn corpus_matrices() {
    let files = corpus_files("matrices");
    assert!(!files.is_empty());
    for f in files {
        let m = round_trip(&read(&f), |t| MatrixGame::from_json(t).unwrap(), MatrixGame::to_json);
        assert_canonical_strings(&value(&m.to_json())["payoffs"]);
        let res = round_trip(
            &solve_zero_sum(&m).unwrap().to_json(),
            |t| SolveResult::from_json(t).unwrap(),
            SolveResult::to_json,
        );
        let v = value(&res.to_json());
        for key in ["value", "row_strategy", "col_strategy"] {
            assert_canonical_strings(&v[key]);
        }
    }
}

#[test]
fn non_canonical_input_prints_canonically() {
    let m = MatrixGame::from_json(r#"{"rows":["a"],"cols":["x","y"],"payoffs":[["2/4","3"]]}"#).unwrap();
    let v = value(&m.to_json());
    assert_eq!(v["payoffs"][0][0], "1/2");
    assert_eq!(v["payoffs"][0][1], "3/1");
    assert!(MatrixGame::from_json(r#"{"rows":["a"],"cols":["x"],"payoffs":[["1/0"]]}"#).is_err());
    for s in ["-3/6", "0/5", "7"] {
        assert!(is_canonical(&to_canonical(&parse_rational(s).unwrap())));
    }
    assert!(!is_canonical("2/4") && !is_canonical("1/-2") && !is_canonical("5"));
}

#[test]
fn reports_and_manifests() {
    let m = machine("never_accepts.json");
    let w = parse_word("0").unwrap();
    let mut opts = VerifyOptions::sampled(1, 9, 1_000);
    opts.values = false;
    let report = verify_reduction(&m, &w, &opts).unwrap();
    round_trip(&report.to_json(), |t| Report::from_json(t).unwrap(), Report::to_json);

    let manifest = reduce(&m, &w, 1).unwrap().manifest;
    let v = value(&round_trip(&manifest.to_json(), |t| Manifest::from_json(t).unwrap(), Manifest::to_json).to_json());
    assert_eq!(v["threshold"], "1/2");
    for g in v["guards"].as_array().unwrap() {
        assert!(is_canonical(g["target_value"].as_str().unwrap()));
    }
}

#[test]
fn clause_dumps() {
    let m = machine("walk_and_return.json");
    let s = build_clauses(&m, &parse_word("01").unwrap(), 1, DEFAULT_HORN_CAP).unwrap();
    let text = dump_clauses(&s, &m.states);
    assert_eq!(parse_clause_dump(&text, &m.states).unwrap(), s);
}
