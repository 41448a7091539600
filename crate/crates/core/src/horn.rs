//! The tableau propositions and Horn clauses of a windowed computation, and
//! the matrix game built on them.
//!
//! Player One picks a proposition `r`, Player Two a clause `C`. With
//! `alpha = (j - 1)/4^k` for a clause with `j` body literals, One receives
//! `1 + alpha` when `r` is the head, `-1 + alpha` when `r` is in the body,
//! and `alpha` otherwise. Negative clauses `body ∧ q -> false` carry `q` as
//! the last body element.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::{matrix_from_function, MatrixGame};
use crate::rational::Rational;
use crate::turing::{initial_cell, next_cell, window, Cell, Delta, Symbol, TMachine};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Proposition {
    pub t: u64,
    pub l: u64,
    pub cell: Cell,
}

impl Proposition {
    pub fn new(t: u64, l: u64, cell: Cell) -> Self {
        Proposition { t, l, cell }
    }

    pub fn display(&self, states: &[String]) -> String {
        match self.cell.state {
            None => format!("p[{},{},{}]", self.t, self.l, self.cell.symbol),
            Some(q) => format!("p[{},{},({},{})]", self.t, self.l, states[q], self.cell.symbol),
        }
    }
}

impl fmt::Display for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cell.state {
            None => write!(f, "p[{},{},{}]", self.t, self.l, self.cell.symbol),
            Some(q) => write!(f, "p[{},{},(q{},{})]", self.t, self.l, q, self.cell.symbol),
        }
    }
}

/// `body -> head`, or `body -> false` when `head` is `None`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HornClause {
    pub head: Option<Proposition>,
    pub body: Vec<Proposition>,
}

impl HornClause {
    pub fn fact(head: Proposition) -> Self {
        HornClause {
            head: Some(head),
            body: Vec::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.body.len()
    }

    pub fn is_negative(&self) -> bool {
        self.head.is_none()
    }

    /// Whether the set `truth` satisfies the clause.
    pub fn satisfied_by(&self, truth: &impl Fn(&Proposition) -> bool) -> bool {
        !self.body.iter().all(truth) || self.head.as_ref().is_some_and(truth)
    }

    pub fn display(&self, states: &[String]) -> String {
        let body: Vec<String> = self.body.iter().map(|p| p.display(states)).collect();
        let head = self.head.map_or("false".to_string(), |h| h.display(states));
        if body.is_empty() {
            head
        } else {
            format!("{} -> {head}", body.join(" & "))
        }
    }
}

/// Which row of the payoff table a pair falls in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoffClass {
    /// `r` is the head of `C`.
    Rq,
    /// `r` occurs in the body of `C`.
    Rpi,
    /// Neither.
    Neq,
}

impl PayoffClass {
    pub const ALL: [PayoffClass; 3] = [PayoffClass::Rq, PayoffClass::Rpi, PayoffClass::Neq];

    pub fn name(self) -> &'static str {
        match self {
            PayoffClass::Rq => "rq",
            PayoffClass::Rpi => "rpi",
            PayoffClass::Neq => "neq",
        }
    }
}

pub fn classify(r: &Proposition, c: &HornClause) -> PayoffClass {
    if c.head.as_ref() == Some(r) {
        PayoffClass::Rq
    } else if c.body.contains(r) {
        PayoffClass::Rpi
    } else {
        PayoffClass::Neq
    }
}

/// Limit on generated propositions, clauses, and semantic-game cells.
pub const DEFAULT_HORN_CAP: u128 = 1 << 26;

fn check(required: u128, cap: u128) -> Result<()> {
    if required > cap {
        return Err(Error::CapExceeded { required, cap });
    }
    Ok(())
}

pub fn enumerate_props(k: u32, n_states: usize, cap: u128) -> Result<Vec<Proposition>> {
    let big_k = window(k)?;
    let cells = Cell::count(n_states);
    check(big_k as u128 * big_k as u128 * cells as u128, cap)?;
    let mut out = Vec::with_capacity((big_k * big_k) as usize * cells);
    for t in 0..big_k {
        for l in 0..big_k {
            out.extend((0..cells).map(|i| Proposition::new(t, l, Cell::from_index(i))));
        }
    }
    Ok(out)
}

/// `p[2^k - 1, 0, (accept, 0)]`.
pub fn accept_clause(delta: &Delta, k: u32) -> Result<HornClause> {
    Ok(HornClause::fact(Proposition::new(
        window(k)? - 1,
        0,
        Cell::head(delta.accept, Symbol::Zero),
    )))
}

/// Neighbourhoods with at most one head, in cell-index order.
fn neighbourhoods(n_states: usize, has_left: bool, has_right: bool) -> Vec<(Option<Cell>, Cell, Option<Cell>)> {
    let cells: Vec<Cell> = (0..Cell::count(n_states)).map(Cell::from_index).collect();
    let side = |present: bool| -> Vec<Option<Cell>> {
        if present {
            cells.iter().copied().map(Some).collect()
        } else {
            vec![None]
        }
    };
    let heads = |c: &Option<Cell>| c.is_some_and(|c| c.state.is_some()) as usize;
    let mut out = Vec::new();
    for left in side(has_left) {
        for &centre in &cells {
            for right in side(has_right) {
                if heads(&left) + heads(&Some(centre)) + heads(&right) <= 1 {
                    out.push((left, centre, right));
                }
            }
        }
    }
    out
}

fn clause_count(k: u32, n_states: usize) -> u128 {
    let big_k = 1u128 << k;
    let c = Cell::count(n_states) as u128;
    let plain = 3u128;
    let q = c - plain;
    // neighbourhoods with at most one head, per cell position class
    let pairs = plain * plain + 2 * q * plain;
    let triples = plain * plain * plain + 3 * q * plain * plain;
    let per_t = if big_k == 1 {
        c
    } else {
        2 * pairs + (big_k - 2) * triples
    };
    big_k * c + (big_k - 1) * per_t * c + 1
}

/// The clause system for `m` on `w` in the `2^k` window, in a fixed order:
/// initial facts, negative initial clauses, transition clauses by `(t, l)`
/// and neighbourhood (each positive clause followed by its negatives), and
/// finally the accept clause.
pub fn build_clauses(m: &TMachine, w: &[Symbol], k: u32, cap: u128) -> Result<Vec<HornClause>> {
    let delta = m.delta()?;
    let big_k = window(k)?;
    if w.len() as u64 > big_k {
        return Err(Error::WordTooLong { len: w.len(), cells: big_k });
    }
    check(clause_count(k, delta.n_states), cap)?;
    let cells: Vec<Cell> = (0..Cell::count(delta.n_states)).map(Cell::from_index).collect();
    let mut out = Vec::new();
    for l in 0..big_k {
        out.push(HornClause::fact(Proposition::new(0, l, initial_cell(&delta, w, l))));
    }
    for l in 0..big_k {
        let init = initial_cell(&delta, w, l);
        for &c in cells.iter().filter(|&&c| c != init) {
            let p = Proposition::new(0, l, c);
            out.push(HornClause {
                head: None,
                body: vec![p],
            });
        }
    }
    for t in 0..big_k.saturating_sub(1) {
        for l in 0..big_k {
            let hoods = neighbourhoods(delta.n_states, l > 0, l + 1 < big_k);
            for (left, centre, right) in hoods {
                let mut body = Vec::with_capacity(4);
                if let Some(c) = left {
                    body.push(Proposition::new(t, l - 1, c));
                }
                body.push(Proposition::new(t, l, centre));
                if let Some(c) = right {
                    body.push(Proposition::new(t, l + 1, c));
                }
                let cons = next_cell(&delta, left, centre, right);
                out.push(HornClause {
                    head: Some(Proposition::new(t + 1, l, cons)),
                    body: body.clone(),
                });
                for &c in cells.iter().filter(|&&c| c != cons) {
                    let mut neg = body.clone();
                    neg.push(Proposition::new(t + 1, l, c));
                    out.push(HornClause { head: None, body: neg });
                }
            }
        }
    }
    out.push(accept_clause(&delta, k)?);
    Ok(out)
}

/// `(j - 1) / 4^k`.
pub fn alpha(j: usize, k: u32) -> Rational {
    Rational::new(BigInt::from(j as i64 - 1), BigInt::one() << (2 * k as usize))
}

pub fn payoff_h(r: &Proposition, c: &HornClause, k: u32) -> Rational {
    let a = alpha(c.arity(), k);
    match classify(r, c) {
        PayoffClass::Rq => a + Rational::one(),
        PayoffClass::Rpi => a - Rational::one(),
        PayoffClass::Neq => a,
    }
}

/// `payoff_h / 4 + 1/2`.
pub fn payoff_hprime(r: &Proposition, c: &HornClause, k: u32) -> Rational {
    payoff_h(r, c, k) / Rational::from_integer(4.into()) + Rational::new(1.into(), 2.into())
}

/// Target value of the subgame for a payoff class and body arity.
pub fn target_value(class: PayoffClass, j: usize, k: u32) -> Rational {
    let base = match class {
        PayoffClass::Rq => Rational::new(3.into(), 4.into()),
        PayoffClass::Rpi => Rational::new(1.into(), 4.into()),
        PayoffClass::Neq => Rational::new(1.into(), 2.into()),
    };
    base + alpha(j, k) / Rational::from_integer(4.into())
}

pub fn build_semantic_game(m: &TMachine, w: &[Symbol], k: u32, cap: u128) -> Result<MatrixGame> {
    let props = enumerate_props(k, m.states.len(), cap)?;
    let clauses = build_clauses(m, w, k, cap)?;
    check(props.len() as u128 * clauses.len() as u128, cap)?;
    matrix_from_function(
        props.iter().map(|p| p.display(&m.states)).collect(),
        clauses.iter().map(|c| c.display(&m.states)).collect(),
        |i, j| payoff_hprime(&props[i], &clauses[j], k),
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropRecord {
    pub t: u64,
    pub l: u64,
    pub symbol: Symbol,
    pub state: Option<String>,
}

/// One line of a clause dump.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClauseRecord {
    pub head: Option<PropRecord>,
    pub body: Vec<PropRecord>,
}

impl PropRecord {
    pub fn new(p: &Proposition, states: &[String]) -> Self {
        PropRecord {
            t: p.t,
            l: p.l,
            symbol: p.cell.symbol,
            state: p.cell.state.map(|q| states[q].clone()),
        }
    }

    pub fn resolve(&self, states: &[String]) -> Result<Proposition> {
        let state = match &self.state {
            None => None,
            Some(s) => Some(
                states
                    .iter()
                    .position(|x| x == s)
                    .ok_or_else(|| Error::Parse(format!("unknown state `{s}`")))?,
            ),
        };
        Ok(Proposition::new(self.t, self.l, Cell { symbol: self.symbol, state }))
    }
}

/// Clauses as JSON lines.
pub fn dump_clauses(clauses: &[HornClause], states: &[String]) -> String {
    let mut out = String::new();
    for c in clauses {
        let rec = ClauseRecord {
            head: c.head.as_ref().map(|p| PropRecord::new(p, states)),
            body: c.body.iter().map(|p| PropRecord::new(p, states)).collect(),
        };
        out.push_str(&serde_json::to_string(&rec).expect("clause serialization cannot fail"));
        out.push('\n');
    }
    out
}

pub fn parse_clause_dump(text: &str, states: &[String]) -> Result<Vec<HornClause>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let rec: ClauseRecord = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
            Ok(HornClause {
                head: rec.head.as_ref().map(|p| p.resolve(states)).transpose()?,
                body: rec.body.iter().map(|p| p.resolve(states)).collect::<Result<_>>()?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::turing::{Move, Rule};

    fn machine() -> TMachine {
        let mut rules = vec![
            Rule { state: "q1".into(), read: Symbol::Zero, next: "qf".into(), write: Symbol::Zero, mv: Move::S },
            Rule { state: "q1".into(), read: Symbol::One, next: "q1".into(), write: Symbol::One, mv: Move::S },
            Rule { state: "q1".into(), read: Symbol::Blank, next: "q1".into(), write: Symbol::Blank, mv: Move::S },
        ];
        for a in Symbol::ALL {
            rules.push(Rule { state: "qf".into(), read: a, next: "qf".into(), write: a, mv: Move::S });
        }
        TMachine { states: vec!["q1".into(), "qf".into()], initial: "q1".into(), accept: "qf".into(), rules }
    }

    #[test]
    fn proposition_counts() {
        assert_eq!(enumerate_props(1, 2, DEFAULT_HORN_CAP).unwrap().len(), 36);
        assert_eq!(enumerate_props(0, 2, DEFAULT_HORN_CAP).unwrap().len(), 9);
        let mut ps = enumerate_props(1, 3, DEFAULT_HORN_CAP).unwrap();
        let n = ps.len();
        ps.sort();
        ps.dedup();
        assert_eq!(ps.len(), n);
        assert!(enumerate_props(1, 2, 10).is_err());
    }

    #[test]
    fn clause_shapes() {
        let m = machine();
        let s = build_clauses(&m, &[Symbol::Zero], 1, DEFAULT_HORN_CAP).unwrap();
        assert_eq!(s.len() as u128, clause_count(1, 2));
        let last = s.last().unwrap();
        assert_eq!(last.arity(), 0);
        assert_eq!(last.head, Some(Proposition::new(1, 0, Cell::head(1, Symbol::Zero))));
        assert!(s.iter().all(|c| c.arity() <= 4));
        let neg_init = s.iter().find(|c| c.is_negative()).unwrap();
        assert_eq!(neg_init.arity(), 1);
        assert_eq!(neg_init.body[0].t, 0);
        let s0 = build_clauses(&m, &[], 0, DEFAULT_HORN_CAP).unwrap();
        assert_eq!(s0.len() as u128, clause_count(0, 2));
        assert!(build_clauses(&m, &[Symbol::Zero; 3], 1, DEFAULT_HORN_CAP).is_err());
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(1, 1), int(0));
        assert_eq!(alpha(0, 1), rat(-1, 4));
        assert_eq!(alpha(4, 1), rat(3, 4));
    }

    #[test]
    fn payoffs() {
        let r = Proposition::new(1, 0, Cell::head(1, Symbol::Zero));
        let acc = HornClause::fact(r);
        assert_eq!(payoff_h(&r, &acc, 1), rat(3, 4));
        assert_eq!(payoff_hprime(&r, &acc, 1), rat(11, 16));
        let other = Proposition::new(0, 0, Cell::plain(Symbol::Zero));
        let neg = HornClause { head: None, body: vec![other] };
        assert_eq!(payoff_h(&r, &neg, 1), int(0));
        let body = vec![other, Proposition::new(0, 1, Cell::plain(Symbol::Blank)), r];
        let c3 = HornClause { head: None, body };
        assert_eq!(payoff_h(&r, &c3, 1), rat(-1, 2));
        assert_eq!(target_value(PayoffClass::Rq, 0, 1), rat(11, 16));
        assert_eq!(target_value(PayoffClass::Rpi, 4, 1), rat(7, 16));
    }

    #[test]
    fn dump_round_trip() {
        let m = machine();
        let s = build_clauses(&m, &[Symbol::Zero], 1, DEFAULT_HORN_CAP).unwrap();
        let text = dump_clauses(&s, &m.states);
        assert_eq!(text.lines().count(), s.len());
        assert!(text.lines().last().unwrap().contains(r#""state":"qf""#));
        assert_eq!(parse_clause_dump(&text, &m.states).unwrap(), s);
    }
}
