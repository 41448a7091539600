//! Helpers shared by the integration tests: corpus access, random matrices,
//! a support-enumeration value oracle, and a satisfiability search for Horn
//! clause systems.
#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dvalue::game::MatrixGame;
use dvalue::horn::{HornClause, Proposition};
use dvalue::rational::{rat, Rational};
use dvalue::turing::TMachine;

pub fn corpus_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(kind)
}

pub fn corpus_files(kind: &str) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(corpus_dir(kind))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    files
}

pub fn machine(name: &str) -> TMachine {
    let text = std::fs::read_to_string(corpus_dir("machines").join(name)).unwrap();
    TMachine::from_json(&text).unwrap()
}

/// Entries `n/d` with `n` in [-9, 9] and `d` in [1, 6].
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> MatrixGame {
    let payoffs = (0..rows)
        .map(|_| (0..cols).map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=6))).collect())
        .collect();
    MatrixGame::from_payoffs(payoffs).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn subsets(n: usize, size: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
        .collect()
}

/// Solves `a x = b` exactly; `None` when singular.
fn gauss(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = &a[r][col] / &a[col][col];
                let pivot_row = a[col].clone();
                for (x, p) in a[r].iter_mut().zip(&pivot_row).skip(col) {
                    *x -= &f * p;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some((0..n).map(|i| &b[i] / &a[i][i]).collect())
}

/// Mixed strategy of one player on `support` that makes every opponent
/// strategy in `other` pay the same amount, with that amount last.
/// `pay(i, j)` is the payoff when this player uses `i` and the opponent `j`.
fn equaliser(support: &[usize], other: &[usize], pay: &dyn Fn(usize, usize) -> Rational) -> Option<Vec<Rational>> {
    let s = support.len();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for &j in other {
        let mut row: Vec<Rational> = support.iter().map(|&i| pay(i, j)).collect();
        row.push(rat(-1, 1));
        a.push(row);
        b.push(Rational::zero());
    }
    let mut row = vec![rat(1, 1); s];
    row.push(Rational::zero());
    a.push(row);
    b.push(rat(1, 1));
    gauss(a, b)
}

/// Value by enumerating equal-size supports. Every matrix game has an
/// optimal pair whose supports carry a nonsingular bordered square system
/// (Shapley and Snow), so the search is complete even for degenerate games.
pub fn support_enumeration_value(m: &MatrixGame) -> Option<Rational> {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let a = &m.payoffs;
    for size in 1..=rows.min(cols) {
        for i_set in subsets(rows, size) {
            for j_set in subsets(cols, size) {
                let Some(xs) = equaliser(&i_set, &j_set, &|i, j| a[i][j].clone()) else { continue };
                let Some(ys) = equaliser(&j_set, &i_set, &|j, i| a[i][j].clone()) else { continue };
                let (v, w) = (&xs[size], &ys[size]);
                if v != w || xs[..size].iter().chain(&ys[..size]).any(|p| p.is_negative()) {
                    continue;
                }
                let mut x = vec![Rational::zero(); rows];
                let mut y = vec![Rational::zero(); cols];
                for (k, &i) in i_set.iter().enumerate() {
                    x[i] = xs[k].clone();
                }
                for (k, &j) in j_set.iter().enumerate() {
                    y[j] = ys[k].clone();
                }
                let col_ok = (0..cols).all(|j| (0..rows).map(|i| &x[i] * &a[i][j]).sum::<Rational>() >= *v);
                let row_ok = (0..rows).all(|i| (0..cols).map(|j| &y[j] * &a[i][j]).sum::<Rational>() <= *v);
                if col_ok && row_ok {
                    return Some(v.clone());
                }
            }
        }
    }
    None
}

/// Clause system over dense proposition indices, grouped by the latest time
/// any of a clause's propositions mentions.
pub struct Layers {
    pub props: Vec<Vec<Proposition>>,
    /// `(body mask, head bit)` per clause; masks index `props` flattened.
    pub clauses: Vec<Vec<(u64, Option<u64>)>>,
}

impl Layers {
    pub fn new(clauses: &[HornClause]) -> Layers {
        let mut by_time: Vec<Vec<Proposition>> = Vec::new();
        for c in clauses {
            for p in c.body.iter().chain(c.head.iter()) {
                let t = p.t as usize;
                if by_time.len() <= t {
                    by_time.resize(t + 1, Vec::new());
                }
                if !by_time[t].contains(p) {
                    by_time[t].push(*p);
                }
            }
        }
        let total: usize = by_time.iter().map(Vec::len).sum();
        assert!(total <= 64, "{total} propositions do not fit one mask");
        let mut bit = HashMap::new();
        for p in by_time.iter().flatten() {
            let n = bit.len();
            bit.insert(*p, n as u64);
        }
        let mut layered = vec![Vec::new(); by_time.len()];
        for c in clauses {
            let mask = c.body.iter().fold(0u64, |m, p| m | 1 << bit[p]);
            let head = c.head.map(|p| 1u64 << bit[&p]);
            let t = c.body.iter().chain(c.head.iter()).map(|p| p.t).max().unwrap_or(0);
            layered[t as usize].push((mask, head));
        }
        Layers {
            props: by_time,
            clauses: layered,
        }
    }

    fn offset(&self, layer: usize) -> usize {
        self.props[..layer].iter().map(Vec::len).sum()
    }

    /// All assignments to the propositions up to `layer` satisfying every
    /// clause whose latest time is at most `layer`, as bitmasks. Each layer's
    /// propositions are enumerated exhaustively, so this is a brute force over
    /// all of them with early pruning on clauses already fully determined.
    pub fn models(&self, limit: usize) -> Vec<u64> {
        let mut partial = vec![0u64];
        for layer in 0..self.props.len() {
            let off = self.offset(layer);
            let width = self.props[layer].len();
            let mut next = Vec::new();
            for &base in &partial {
                for bits in 0..1u64 << width {
                    let a = base | bits << off;
                    let ok = self.clauses[layer]
                        .iter()
                        .all(|&(body, head)| a & body != body || head.is_some_and(|h| a & h != 0));
                    if ok {
                        next.push(a);
                        if layer + 1 == self.props.len() && next.len() >= limit {
                            return next;
                        }
                    }
                }
            }
            partial = next;
        }
        partial
    }

    pub fn proposition_count(&self) -> usize {
        self.props.iter().map(Vec::len).sum()
    }
}

/// Plain brute force over every assignment to the propositions in `clauses`.
pub fn brute_force_satisfiable(clauses: &[HornClause]) -> bool {
    let mut props: Vec<Proposition> = Vec::new();
    for c in clauses {
        for p in c.body.iter().chain(c.head.iter()) {
            if !props.contains(p) {
                props.push(*p);
            }
        }
    }
    assert!(props.len() <= 20, "{} propositions is too many to brute force", props.len());
    let index = |p: &Proposition| props.iter().position(|q| q == p).unwrap();
    let masks: Vec<(u64, Option<u64>)> = clauses
        .iter()
        .map(|c| {
            let body = c.body.iter().fold(0u64, |m, p| m | 1 << index(p));
            (body, c.head.map(|p| 1u64 << index(&p)))
        })
        .collect();
    (0..1u64 << props.len())
        .any(|a| masks.iter().all(|&(body, head)| a & body != body || head.is_some_and(|h| a & h != 0)))
}
