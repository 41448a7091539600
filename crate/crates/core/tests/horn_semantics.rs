use std::collections::HashSet;
use std::path::PathBuf;

use dvalue::game::matrix_from_function;
use dvalue::horn::{
    build_clauses, build_semantic_game, classify, enumerate_props, payoff_h, payoff_hprime, HornClause, PayoffClass,
    Proposition, DEFAULT_HORN_CAP,
};
use dvalue::rational::{int, rat};
use dvalue::solver::{affine_transform, solve_zero_sum};
use dvalue::turing::{parse_word, run, true_run_set, TMachine};

fn corpus(name: &str) -> TMachine {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/machines").join(name);
    TMachine::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn cases() -> Vec<(TMachine, &'static str)> {
    vec![
        (corpus("accept_first_zero.json"), "0"),
        (corpus("accept_first_zero.json"), "1"),
        (corpus("accept_first_zero.json"), ""),
        (corpus("never_accepts.json"), "0"),
        (corpus("never_accepts.json"), "10"),
    ]
}

#[test]
fn semantic_value_tracks_acceptance() {
    for (m, w) in cases() {
        let w = parse_word(w).unwrap();
        let accepted = run(&m, &w, 1).unwrap().accepted;
        let g = build_semantic_game(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
        let res = solve_zero_sum(&g).unwrap();
        assert!(res.certifies());
        assert_eq!(res.value >= rat(1, 2), accepted, "{w:?}: value {}", res.value);
    }
}

#[test]
fn run_set_satisfies_clauses_iff_accepting() {
    for (m, w) in cases() {
        let w = parse_word(w).unwrap();
        let accepted = run(&m, &w, 1).unwrap().accepted;
        let r: HashSet<Proposition> = true_run_set(&m, &w, 1).unwrap().into_iter().collect();
        assert_eq!(r.len(), 4);
        let s = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
        let truth = |p: &Proposition| r.contains(p);
        let failing: Vec<&HornClause> = s.iter().filter(|c| !c.satisfied_by(&truth)).collect();
        if accepted {
            assert!(failing.is_empty());
        } else {
            assert_eq!(failing, vec![s.last().unwrap()]);
        }
    }
}

#[test]
fn hprime_is_affine_image_of_h() {
    let m = corpus("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    let props = enumerate_props(1, 2, DEFAULT_HORN_CAP).unwrap();
    let clauses = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    let labels = |n: usize| (0..n).map(|i| i.to_string()).collect::<Vec<_>>();
    let h = matrix_from_function(labels(props.len()), labels(clauses.len()), |i, j| {
        payoff_h(&props[i], &clauses[j], 1)
    })
    .unwrap();
    let hp = matrix_from_function(labels(props.len()), labels(clauses.len()), |i, j| {
        payoff_hprime(&props[i], &clauses[j], 1)
    })
    .unwrap();
    assert_eq!(affine_transform(&h, &rat(1, 4), &rat(1, 2)).unwrap(), hp);
    let lo = rat(1, 4) - rat(1, 16);
    let hi = rat(3, 4) + rat(3, 16);
    assert!(hp.payoffs.iter().flatten().all(|x| *x >= lo && *x <= hi));
    assert!(hp.payoffs.iter().flatten().all(|x| *x >= int(0) && *x <= int(1)));
}

#[test]
fn semantic_game_shape() {
    let m = corpus("accept_first_zero.json");
    let w = parse_word("0").unwrap();
    let g = build_semantic_game(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    let clauses = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    assert_eq!(g.n_rows(), 36);
    assert_eq!(g.n_cols(), clauses.len());
    let head_row = g.rows.iter().position(|r| r == "p[1,0,(qf,0)]").unwrap();
    assert_eq!(g.payoffs[head_row][g.n_cols() - 1], rat(3, 4) - rat(1, 16));
}

#[test]
fn arity_census() {
    let m = corpus("never_accepts.json");
    let w = parse_word("0").unwrap();
    let s = build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap();
    for c in &s {
        let t0 = c.body.iter().chain(c.head.iter()).all(|p| p.t == 0);
        match (c.arity(), c.is_negative()) {
            (0, false) => assert!(c.head.unwrap().t == 0 || c == s.last().unwrap()),
            (1, true) => assert!(t0),
            (2, false) | (3, true) => {}
            other => panic!("unexpected arity/sign {other:?} at k=1"),
        }
    }
    let r = s[0].head.unwrap();
    assert_eq!(classify(&r, &s[0]), PayoffClass::Rq);
}
