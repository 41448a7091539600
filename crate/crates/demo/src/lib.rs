//! Browser bindings: solve a matrix, build and solve a value game, and
//! solve the clause game of a small machine. Each returns JSON; failures
//! come back as `{"error": ...}`.

use serde_json::json;
use wasm_bindgen::prelude::*;

use dvalue::game::MatrixGame;
use dvalue::horn::{build_semantic_game, DEFAULT_HORN_CAP};
use dvalue::rational::{rat, to_canonical};
use dvalue::solver::{game_value, solve_zero_sum};
use dvalue::turing::{parse_word, run, TMachine};
use dvalue::value_game::{build_value_game, Variant};
use dvalue::Result;

/// Value games above this many cells are refused in the browser.
const DEMO_CAP: u128 = 1 << 20;

fn respond(r: Result<serde_json::Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// `{"payoffs": [["1","0"],["0","1"]]}` (labels optional) to a solve result.
#[wasm_bindgen]
pub fn solve_matrix(text: &str) -> String {
    respond((|| {
        let m = match MatrixGame::from_json(text) {
            Ok(m) => m,
            Err(_) => {
                let v: serde_json::Value =
                    serde_json::from_str(text).map_err(|e| dvalue::Error::Parse(e.to_string()))?;
                unlabelled(&v)?
            }
        };
        let res = solve_zero_sum(&m)?;
        Ok(serde_json::from_str(&res.to_json()).expect("valid json"))
    })())
}

fn unlabelled(v: &serde_json::Value) -> Result<MatrixGame> {
    let payoffs: Vec<Vec<String>> =
        serde_json::from_value(v["payoffs"].clone()).map_err(|e| dvalue::Error::Parse(e.to_string()))?;
    let parsed = payoffs
        .iter()
        .map(|row| row.iter().map(|x| dvalue::rational::parse_rational(x)).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    MatrixGame::from_payoffs(parsed)
}

/// Builds the value game for a/b and solves it.
#[wasm_bindgen]
pub fn value_game(a: u32, b: u32, variant: &str) -> String {
    respond((|| {
        let variant: Variant = variant.parse()?;
        let g = build_value_game(a as u64, b as u64, variant)?;
        let value = game_value(&g, DEMO_CAP)?;
        Ok(json!({
            "variables": g.universe.len(),
            "player1": g.player1.len(),
            "player2": g.player2.len(),
            "value": to_canonical(&value),
            "target": to_canonical(&rat(a as i64, b as i64)),
        }))
    })())
}

/// Solves the clause game for a machine on a word and compares the verdict
/// with a direct run.
#[wasm_bindgen]
pub fn semantic(machine: &str, word: &str, k: u32) -> String {
    respond((|| {
        let m = TMachine::from_json(machine)?;
        m.validate()?;
        let w = parse_word(word)?;
        let g = build_semantic_game(&m, &w, k, DEFAULT_HORN_CAP)?;
        let value = solve_zero_sum(&g)?.value;
        let accepted = run(&m, &w, k)?.accepted;
        Ok(json!({
            "rows": g.n_rows(),
            "cols": g.n_cols(),
            "value": to_canonical(&value),
            "game_accepts": value >= rat(1, 2),
            "simulator_accepts": accepted,
        }))
    })())
}
