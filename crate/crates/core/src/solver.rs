//! Exact zero-sum matrix game solver.
//!
//! The game is shifted to be strictly positive and the column player's
//! problem `max 1·y  s.t.  B y <= 1, y >= 0` is solved by a dense rational
//! simplex with Bland's rule. The row player's strategy is read off the
//! final reduced costs of the slack columns.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{expand_bits, BoolMatrix, BooleanGame, MatrixGame};
use crate::rational::{canonical, canonical_vec, to_canonical, Rational};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Payoff of each pure row against `col_strategy`.
    #[serde(with = "canonical_vec")]
    pub row_payoffs: Vec<Rational>,
    /// Payoff of `row_strategy` against each pure column.
    #[serde(with = "canonical_vec")]
    pub col_payoffs: Vec<Rational>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    #[serde(with = "canonical")]
    pub value: Rational,
    #[serde(with = "canonical_vec")]
    pub row_strategy: Vec<Rational>,
    #[serde(with = "canonical_vec")]
    pub col_strategy: Vec<Rational>,
    pub certificate: Certificate,
}

impl SolveResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("result serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// True when the certificate proves optimality: no pure row beats the
    /// value and no pure column holds Player One below it.
    pub fn certifies(&self) -> bool {
        let max_row = self.certificate.row_payoffs.iter().max();
        let min_col = self.certificate.col_payoffs.iter().min();
        max_row == Some(&self.value) && min_col == Some(&self.value)
    }
}

/// Payoffs of every pure row against `y` and of `x` against every pure column.
pub fn certificate(m: &MatrixGame, x: &[Rational], y: &[Rational]) -> Certificate {
    let row_payoffs = m
        .payoffs
        .iter()
        .map(|row| row.iter().zip(y).map(|(a, p)| a * p).sum())
        .collect();
    let col_payoffs = (0..m.n_cols())
        .map(|j| m.payoffs.iter().zip(x).map(|(row, p)| &row[j] * p).sum())
        .collect();
    Certificate {
        row_payoffs,
        col_payoffs,
    }
}

/// Removes duplicate rows, then duplicate columns, keeping first occurrences.
/// `row_map[i]` is the reduced index that original row `i` maps to.
pub fn dedupe(m: &MatrixGame) -> (MatrixGame, Vec<usize>, Vec<usize>) {
    let (keep_rows, row_map) = first_occurrences((0..m.n_rows()).map(|i| m.payoffs[i].clone()));
    let (keep_cols, col_map) = first_occurrences(
        (0..m.n_cols()).map(|j| keep_rows.iter().map(|&i| m.payoffs[i][j].clone()).collect::<Vec<_>>()),
    );
    let reduced = MatrixGame {
        rows: keep_rows.iter().map(|&i| m.rows[i].clone()).collect(),
        cols: keep_cols.iter().map(|&j| m.cols[j].clone()).collect(),
        payoffs: keep_rows
            .iter()
            .map(|&i| keep_cols.iter().map(|&j| m.payoffs[i][j].clone()).collect())
            .collect(),
    };
    (reduced, row_map, col_map)
}

fn first_occurrences<K: std::hash::Hash + Eq>(keys: impl Iterator<Item = K>) -> (Vec<usize>, Vec<usize>) {
    let mut seen: HashMap<K, usize> = HashMap::new();
    let mut keep = Vec::new();
    let mut map = Vec::new();
    for (i, key) in keys.enumerate() {
        let next = keep.len();
        let rep = *seen.entry(key).or_insert(next);
        if rep == next {
            keep.push(i);
        }
        map.push(rep);
    }
    (keep, map)
}

/// [`dedupe`] for 0/1 matrices, producing a rational matrix labelled with the
/// original row and column indices of the kept representatives.
pub fn dedupe_bits(m: &BoolMatrix) -> MatrixGame {
    let (keep_rows, _) = first_occurrences((0..m.n_rows()).map(|i| m.row_key(i)));
    let mut reduced = BoolMatrix::new(keep_rows.len(), m.n_cols());
    for (r, &i) in keep_rows.iter().enumerate() {
        for j in 0..m.n_cols() {
            reduced.set(r, j, m.get(i, j));
        }
    }
    let (keep_cols, _) = first_occurrences((0..m.n_cols()).map(|j| reduced.col_key(j)));
    MatrixGame {
        rows: keep_rows.iter().map(|i| i.to_string()).collect(),
        cols: keep_cols.iter().map(|j| j.to_string()).collect(),
        payoffs: (0..keep_rows.len())
            .map(|r| {
                keep_cols
                    .iter()
                    .map(|&j| if reduced.get(r, j) { Rational::one() } else { Rational::zero() })
                    .collect()
            })
            .collect(),
    }
}

/// Exact value and optimal mixed strategies of a zero-sum game.
pub fn solve_zero_sum(m: &MatrixGame) -> Result<SolveResult> {
    m.check()?;
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let min = m.payoffs.iter().flatten().min().expect("matrix is nonempty");
    let shift = if min.is_positive() {
        Rational::zero()
    } else {
        Rational::one() - min
    };

    // Tableau: `rows` constraint rows over `cols` structural and `rows`
    // slack columns, then the objective row; last column is the rhs.
    let width = cols + rows + 1;
    let mut t: Vec<Vec<Rational>> = Vec::with_capacity(rows + 1);
    for (i, row) in m.payoffs.iter().enumerate() {
        let mut r = Vec::with_capacity(width);
        r.extend(row.iter().map(|a| a + &shift));
        r.extend((0..rows).map(|s| if s == i { Rational::one() } else { Rational::zero() }));
        r.push(Rational::one());
        t.push(r);
    }
    let mut obj = vec![Rational::zero(); width];
    for c in obj.iter_mut().take(cols) {
        *c = -Rational::one();
    }
    t.push(obj);
    let mut basis: Vec<usize> = (cols..cols + rows).collect();

    while let Some(enter) = (0..cols + rows).find(|&j| t[rows][j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..rows {
            if !t[i][enter].is_positive() {
                continue;
            }
            let ratio = &t[i][width - 1] / &t[i][enter];
            let better = match &leave {
                None => true,
                Some((l, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*l]),
            };
            if better {
                leave = Some((i, ratio));
            }
        }
        // B > 0 keeps the feasible region bounded.
        let (pr, _) = leave.expect("column player's program is bounded");
        pivot(&mut t, pr, enter);
        basis[pr] = enter;
    }

    let z = t[rows][width - 1].clone();
    let scale = Rational::one() / &z;
    let mut col_strategy = vec![Rational::zero(); cols];
    for (i, &b) in basis.iter().enumerate() {
        if b < cols {
            col_strategy[b] = &t[i][width - 1] * &scale;
        }
    }
    let row_strategy: Vec<Rational> = (0..rows).map(|i| &t[rows][cols + i] * &scale).collect();
    let value = scale - shift;
    let certificate = certificate(m, &row_strategy, &col_strategy);
    Ok(SolveResult {
        value,
        row_strategy,
        col_strategy,
        certificate,
    })
}

fn pivot(t: &mut [Vec<Rational>], pr: usize, pc: usize) {
    let p = t[pr][pc].clone();
    if !p.is_one() {
        for x in t[pr].iter_mut() {
            *x /= &p;
        }
    }
    let pivot_row = t[pr].clone();
    for (i, row) in t.iter_mut().enumerate() {
        if i == pr || row[pc].is_zero() {
            continue;
        }
        let f = row[pc].clone();
        for (x, p) in row.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *x -= &f * p;
            }
        }
    }
}

/// Maps every entry `x` to `s·x + t`.
pub fn affine_transform(m: &MatrixGame, s: &Rational, t: &Rational) -> Result<MatrixGame> {
    if !s.is_positive() {
        return Err(Error::NonPositiveScale(to_canonical(s)));
    }
    Ok(MatrixGame {
        rows: m.rows.clone(),
        cols: m.cols.clone(),
        payoffs: m
            .payoffs
            .iter()
            .map(|row| row.iter().map(|x| s * x + t).collect())
            .collect(),
    })
}

/// Exact value of a Boolean game through its deduplicated normal form.
pub fn game_value(g: &BooleanGame, cap: u128) -> Result<Rational> {
    let bits = expand_bits(g, cap)?;
    Ok(solve_zero_sum(&dedupe_bits(&bits))?.value)
}

/// Whether the value of `g` is at least `v`.
pub fn dvalue(g: &BooleanGame, v: &Rational, cap: u128) -> Result<bool> {
    Ok(game_value(g, cap)? >= *v)
}
