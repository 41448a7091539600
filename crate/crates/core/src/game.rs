//! Two-player zero-sum Boolean games and their normal forms.

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::compile::{LaneLayout, Program};
use crate::error::{Error, Result};
use crate::logic::{eval, free_vars, parse_deep, Assignment, Formula, VarId};
use crate::rational::{canonical_matrix, Rational};

/// Default limit on the number of payoff cells an expansion may produce.
pub const DEFAULT_CAP: u128 = 1 << 24;

/// Player One controls `player1`, Player Two controls `player2`; Player One
/// wins exactly when the joint assignment satisfies `goal`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BooleanGame {
    #[serde(rename = "variables")]
    pub universe: Vec<VarId>,
    pub player1: Vec<VarId>,
    pub player2: Vec<VarId>,
    pub goal: Formula,
}

impl BooleanGame {
    /// A game whose universe is `player1` followed by `player2`.
    pub fn new(player1: Vec<VarId>, player2: Vec<VarId>, goal: Formula) -> Self {
        let mut universe = player1.clone();
        universe.extend(player2.iter().cloned());
        BooleanGame {
            universe,
            player1,
            player2,
            goal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        validate_game(self)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("game serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        parse_deep(text)
    }

    pub fn var_count(&self) -> usize {
        self.universe.len()
    }
}

/// Checks the partition and scope invariants, collecting every violation.
pub fn validate_game(g: &BooleanGame) -> Result<()> {
    let mut problems = Vec::new();
    let mut universe = HashSet::new();
    for v in &g.universe {
        if !universe.insert(v) {
            problems.push(format!("variable `{v}` declared twice"));
        }
    }
    let mut owned = HashSet::new();
    for (player, vars) in [("player1", &g.player1), ("player2", &g.player2)] {
        for v in vars {
            if !universe.contains(v) {
                problems.push(format!("{player} variable `{v}` is not in the universe"));
            }
            if !owned.insert(v) {
                problems.push(format!("variable `{v}` is owned by both players"));
            }
        }
    }
    for v in &g.universe {
        if !owned.contains(v) {
            problems.push(format!("variable `{v}` is owned by neither player"));
        }
    }
    for v in free_vars(&g.goal) {
        if !universe.contains(&v) {
            problems.push(format!("goal mentions undeclared variable `{v}`"));
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Error::InvalidGame(problems))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureProfile {
    pub a1: Assignment,
    pub a2: Assignment,
}

fn same_vars(declared: &[VarId], got: &[VarId]) -> bool {
    declared.iter().collect::<BTreeSet<_>>() == got.iter().collect::<BTreeSet<_>>()
}

/// Player One's payoff: 1 on a win, 0 otherwise. Player Two gets `1 - u`.
pub fn utility(g: &BooleanGame, prof: &PureProfile) -> Result<Rational> {
    if !same_vars(&g.player1, prof.a1.universe()) {
        return Err(Error::ProfileMismatch("a1 is not an assignment to player1".into()));
    }
    if !same_vars(&g.player2, prof.a2.universe()) {
        return Err(Error::ProfileMismatch("a2 is not an assignment to player2".into()));
    }
    let joint = prof.a1.union(&prof.a2)?;
    Ok(if eval(&g.goal, &joint)? {
        Rational::one()
    } else {
        Rational::zero()
    })
}

/// A payoff matrix for Player One with opaque strategy labels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixGame {
    pub rows: Vec<String>,
    pub cols: Vec<String>,
    #[serde(with = "canonical_matrix")]
    pub payoffs: Vec<Vec<Rational>>,
}

impl MatrixGame {
    pub fn new(rows: Vec<String>, cols: Vec<String>, payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        let m = MatrixGame { rows, cols, payoffs };
        m.check()?;
        Ok(m)
    }

    /// Numbered labels `r0, r1, ...` and `c0, c1, ...`.
    pub fn from_payoffs(payoffs: Vec<Vec<Rational>>) -> Result<Self> {
        let rows = (0..payoffs.len()).map(|i| format!("r{i}")).collect();
        let cols = (0..payoffs.first().map_or(0, Vec::len))
            .map(|j| format!("c{j}"))
            .collect();
        MatrixGame::new(rows, cols, payoffs)
    }

    pub fn check(&self) -> Result<()> {
        if self.rows.is_empty() || self.cols.is_empty() {
            return Err(Error::InvalidMatrix("needs at least one row and one column".into()));
        }
        if self.payoffs.len() != self.rows.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} row labels but {} payoff rows",
                self.rows.len(),
                self.payoffs.len()
            )));
        }
        if let Some((i, row)) = self
            .payoffs
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != self.cols.len())
        {
            return Err(Error::InvalidMatrix(format!(
                "row {i} has {} entries, expected {}",
                row.len(),
                self.cols.len()
            )));
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("matrix serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: MatrixGame = parse_deep(text)?;
        m.check()?;
        Ok(m)
    }
}

/// Materializes `f` over every cell, calling it exactly once per cell.
pub fn matrix_from_function(
    rows: Vec<String>,
    cols: Vec<String>,
    mut f: impl FnMut(usize, usize) -> Rational,
) -> Result<MatrixGame> {
    let payoffs = (0..rows.len())
        .map(|i| (0..cols.len()).map(|j| f(i, j)).collect())
        .collect();
    MatrixGame::new(rows, cols, payoffs)
}

/// A 0/1 payoff matrix stored as a flat bitset in row-major order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<u64>,
}

impl BoolMatrix {
    pub fn new(rows: usize, cols: usize) -> Self {
        BoolMatrix {
            rows,
            cols,
            bits: vec![0; (rows * cols).div_ceil(64)],
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        let c = i * self.cols + j;
        (self.bits[c / 64] >> (c % 64)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        let c = i * self.cols + j;
        if v {
            self.bits[c / 64] |= 1 << (c % 64);
        } else {
            self.bits[c / 64] &= !(1 << (c % 64));
        }
    }

    /// Row `i` packed into words, for hashing.
    pub fn row_key(&self, i: usize) -> Vec<u64> {
        let mut key = vec![0u64; self.cols.div_ceil(64)];
        for j in 0..self.cols {
            if self.get(i, j) {
                key[j / 64] |= 1 << (j % 64);
            }
        }
        key
    }

    pub fn col_key(&self, j: usize) -> Vec<u64> {
        let mut key = vec![0u64; self.rows.div_ceil(64)];
        for i in 0..self.rows {
            if self.get(i, j) {
                key[i / 64] |= 1 << (i % 64);
            }
        }
        key
    }
}

/// Bit-pattern label of the `index`-th assignment to `n` variables.
pub fn pattern_label(index: u64, n: usize) -> String {
    if n == 0 {
        return "-".to_string();
    }
    (0..n)
        .map(|i| if (index >> (n - 1 - i)) & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_cap(g: &BooleanGame, cap: u128) -> Result<()> {
    let vars = g.player1.len() + g.player2.len();
    let required = if vars >= 127 { u128::MAX } else { 1u128 << vars };
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(())
}

/// Evaluates the goal on every pure profile. Row `i` is the `i`-th assignment
/// to `player1` in lexicographic order (first variable most significant),
/// column `j` likewise for `player2`.
pub fn expand_bits(g: &BooleanGame, cap: u128) -> Result<BoolMatrix> {
    validate_game(g)?;
    check_cap(g, cap)?;
    let (m1, m2) = (g.player1.len(), g.player2.len());
    let mut order = g.player1.clone();
    order.extend(g.player2.iter().cloned());
    let prog = Program::compile_ordered(std::slice::from_ref(&g.goal), &order)?;
    let lanes = LaneLayout::new(order.len());
    let words = lanes.words() as usize;
    let mask = lanes.mask();
    let eval_word = |w: usize| {
        let mut inputs = vec![0u64; order.len()];
        let mut scratch = prog.scratch();
        let mut out = [0u64];
        lanes.fill(w as u64, &mut inputs);
        prog.eval(&inputs, &mut scratch, &mut out);
        out[0] & mask
    };
    #[cfg(feature = "parallel")]
    let bits: Vec<u64> = {
        use rayon::prelude::*;
        (0..words).into_par_iter().map(eval_word).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let bits: Vec<u64> = (0..words).map(eval_word).collect();
    Ok(BoolMatrix {
        rows: 1 << m1,
        cols: 1 << m2,
        bits,
    })
}

pub fn expand(g: &BooleanGame, cap: u128) -> Result<MatrixGame> {
    let bits = expand_bits(g, cap)?;
    let (m1, m2) = (g.player1.len(), g.player2.len());
    let rows = (0..bits.rows as u64).map(|i| pattern_label(i, m1)).collect();
    let cols = (0..bits.cols as u64).map(|j| pattern_label(j, m2)).collect();
    matrix_from_function(rows, cols, |i, j| {
        if bits.get(i, j) {
            Rational::one()
        } else {
            Rational::zero()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn pennies() -> BooleanGame {
        BooleanGame::new(
            vec![VarId::new("p")],
            vec![VarId::new("q")],
            Formula::iff(Formula::var("p"), Formula::var("q")),
        )
    }

    #[test]
    fn validate_examples() {
        assert!(pennies().validate().is_ok());
        let overlap = BooleanGame {
            universe: vec![VarId::new("p")],
            player1: vec![VarId::new("p")],
            player2: vec![VarId::new("p")],
            goal: Formula::var("p"),
        };
        let Err(Error::InvalidGame(msgs)) = overlap.validate() else {
            panic!("overlap accepted")
        };
        assert!(msgs.iter().any(|m| m.contains("`p`") && m.contains("both")));
        let stray = BooleanGame::new(vec![VarId::new("p")], vec![], Formula::var("z"));
        let Err(Error::InvalidGame(msgs)) = stray.validate() else {
            panic!("stray variable accepted")
        };
        assert!(msgs.iter().any(|m| m.contains("`z`")));
    }

    #[test]
    fn utility_examples() {
        let g = BooleanGame::new(vec![VarId::new("p")], vec![], Formula::var("p"));
        let prof = PureProfile {
            a1: Assignment::new(vec![VarId::new("p")], vec![true]).unwrap(),
            a2: Assignment::all_false(vec![]).unwrap(),
        };
        assert_eq!(utility(&g, &prof).unwrap(), int(1));
        let lose = BooleanGame::new(vec![VarId::new("p")], vec![], Formula::falsity());
        assert_eq!(utility(&lose, &prof).unwrap(), int(0));
        let same = PureProfile {
            a1: Assignment::new(vec![VarId::new("p")], vec![true]).unwrap(),
            a2: Assignment::new(vec![VarId::new("q")], vec![true]).unwrap(),
        };
        assert_eq!(utility(&pennies(), &same).unwrap(), int(1));
        let swapped = PureProfile {
            a1: same.a2.clone(),
            a2: same.a1.clone(),
        };
        assert!(matches!(utility(&pennies(), &swapped), Err(Error::ProfileMismatch(_))));
    }

    #[test]
    fn expand_examples() {
        let m = expand(&pennies(), DEFAULT_CAP).unwrap();
        assert_eq!(m.payoffs, vec![vec![int(1), int(0)], vec![int(0), int(1)]]);
        assert_eq!(m.rows, ["0", "1"]);
        let all = BooleanGame::new(
            vec![VarId::new("a"), VarId::new("b")],
            vec![],
            Formula::truth(),
        );
        let m = expand(&all, DEFAULT_CAP).unwrap();
        assert_eq!((m.n_rows(), m.n_cols()), (4, 1));
        assert!(m.payoffs.iter().all(|r| r[0] == int(1)));
        assert_eq!(m.cols, ["-"]);
    }

    #[test]
    fn expand_respects_cap() {
        let err = expand(&pennies(), 3).unwrap_err();
        assert_eq!(err, Error::CapExceeded { required: 4, cap: 3 });
    }

    #[test]
    fn matrix_from_function_examples() {
        let mut calls = 0;
        let m = matrix_from_function(vec!["a".into()], vec!["b".into()], |_, _| {
            calls += 1;
            rat(5, 7)
        })
        .unwrap();
        assert_eq!(calls, 1);
        assert_eq!(m.payoffs, vec![vec![rat(5, 7)]]);
        let z = matrix_from_function(vec!["a".into(), "b".into()], vec!["c".into()], |_, _| int(0)).unwrap();
        assert!(z.payoffs.iter().flatten().all(Zero::is_zero));
    }

    #[test]
    fn matrix_shape_checked() {
        assert!(MatrixGame::new(vec![], vec![], vec![]).is_err());
        assert!(MatrixGame::new(vec!["a".into()], vec!["x".into(), "y".into()], vec![vec![int(1)]]).is_err());
    }

    #[test]
    fn game_json_shape() {
        let text = pennies().to_json();
        assert_eq!(
            text,
            r#"{"variables":["p","q"],"player1":["p"],"player2":["q"],"goal":{"iff":[{"var":"p"},{"var":"q"}]}}"#
        );
        assert_eq!(BooleanGame::from_json(&text).unwrap(), pennies());
    }
}
