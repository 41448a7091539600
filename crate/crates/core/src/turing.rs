//! Deterministic single-tape machines over `{0, 1, _}` run inside a
//! `2^k`-cell, `2^k`-step window.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::horn::Proposition;
use crate::logic::parse_deep;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1")]
    One,
    #[serde(rename = "_")]
    Blank,
}

impl Symbol {
    pub const ALL: [Symbol; 3] = [Symbol::Zero, Symbol::One, Symbol::Blank];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Symbol {
        Symbol::ALL[i]
    }

    pub fn as_char(self) -> char {
        match self {
            Symbol::Zero => '0',
            Symbol::One => '1',
            Symbol::Blank => '_',
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    S,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rule {
    pub state: String,
    pub read: Symbol,
    pub next: String,
    pub write: Symbol,
    #[serde(rename = "move")]
    pub mv: Move,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TMachine {
    pub states: Vec<String>,
    pub initial: String,
    pub accept: String,
    pub rules: Vec<Rule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Action {
    pub next: usize,
    pub write: Symbol,
    pub mv: Move,
}

/// A validated transition table indexed by state position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Delta {
    actions: Vec<Action>,
    pub initial: usize,
    pub accept: usize,
    pub n_states: usize,
}

impl Delta {
    pub fn action(&self, state: usize, read: Symbol) -> Action {
        self.actions[state * 3 + read.index()]
    }
}

impl TMachine {
    pub fn from_json(text: &str) -> Result<Self> {
        parse_deep(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("machine serialization cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("machine serialization cannot fail")
    }

    pub fn state_index(&self, name: &str) -> Option<usize> {
        self.states.iter().position(|s| s == name)
    }

    pub fn validate(&self) -> Result<()> {
        self.delta().map(|_| ())
    }

    /// Checks totality, determinism, and that the accept state idles in
    /// place, then builds the lookup table.
    pub fn delta(&self) -> Result<Delta> {
        let mut problems = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if self.states[..i].contains(s) {
                problems.push(format!("state `{s}` listed twice"));
            }
        }
        let initial = self.state_index(&self.initial);
        let accept = self.state_index(&self.accept);
        if initial.is_none() {
            problems.push(format!("initial state `{}` is not listed", self.initial));
        }
        if accept.is_none() {
            problems.push(format!("accept state `{}` is not listed", self.accept));
        }
        let n = self.states.len();
        let mut slots: Vec<Option<Action>> = vec![None; n * 3];
        for r in &self.rules {
            let (Some(q), Some(next)) = (self.state_index(&r.state), self.state_index(&r.next)) else {
                problems.push(format!("rule ({}, {}) names an unknown state", r.state, r.read));
                continue;
            };
            let slot = &mut slots[q * 3 + r.read.index()];
            if slot.is_some() {
                problems.push(format!("two rules for ({}, {})", r.state, r.read));
                continue;
            }
            *slot = Some(Action {
                next,
                write: r.write,
                mv: r.mv,
            });
        }
        for q in 0..n {
            for a in Symbol::ALL {
                match slots[q * 3 + a.index()] {
                    None => problems.push(format!("missing rule for ({}, {a})", self.states[q])),
                    Some(act) if Some(q) == accept => {
                        if act != (Action { next: q, write: a, mv: Move::S }) {
                            problems.push(format!(
                                "accept state must idle: ({}, {a}) -> ({}, {a}, S)",
                                self.states[q], self.states[q]
                            ));
                        }
                    }
                    Some(_) => {}
                }
            }
        }
        if !problems.is_empty() {
            return Err(Error::InvalidMachine(problems));
        }
        Ok(Delta {
            actions: slots.into_iter().map(|a| a.expect("checked")).collect(),
            initial: initial.expect("checked"),
            accept: accept.expect("checked"),
            n_states: n,
        })
    }
}

pub fn validate_machine(m: &TMachine) -> Result<()> {
    m.validate()
}

/// Number of cells and steps in the window.
pub fn window(k: u32) -> Result<u64> {
    if k > 30 {
        return Err(Error::BadWindow(k, "window too large to simulate"));
    }
    Ok(1u64 << k)
}

pub fn parse_word(w: &str) -> Result<Vec<Symbol>> {
    w.chars()
        .map(|c| match c {
            '0' => Ok(Symbol::Zero),
            '1' => Ok(Symbol::One),
            _ => Err(Error::BadWord(w.to_string())),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Config {
    pub time: u64,
    pub head: u64,
    pub state: usize,
    pub tape: Vec<Symbol>,
}

impl Config {
    pub fn initial(delta: &Delta, w: &[Symbol], k: u32) -> Result<Config> {
        let cells = window(k)?;
        if w.len() as u64 > cells {
            return Err(Error::WordTooLong { len: w.len(), cells });
        }
        let mut tape = vec![Symbol::Blank; cells as usize];
        tape[..w.len()].copy_from_slice(w);
        Ok(Config {
            time: 0,
            head: 0,
            state: delta.initial,
            tape,
        })
    }

    pub fn read(&self) -> Symbol {
        self.tape[self.head as usize]
    }
}

pub fn step(delta: &Delta, c: &Config) -> Result<Config> {
    let act = delta.action(c.state, c.read());
    let max = c.tape.len() as u64 - 1;
    let head = match act.mv {
        Move::S => Some(c.head),
        Move::L => c.head.checked_sub(1),
        Move::R => Some(c.head + 1).filter(|&h| h <= max),
    }
    .ok_or(Error::WindowViolation { time: c.time, max })?;
    let mut tape = c.tape.clone();
    tape[c.head as usize] = act.write;
    Ok(Config {
        time: c.time + 1,
        head,
        state: act.next,
        tape,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub accepted: bool,
    pub halt_time: Option<u64>,
    /// Configurations at times `0 ..= 2^k - 1`.
    pub trace: Vec<Config>,
}

/// Runs from the initial configuration through time `2^k - 1` and accepts
/// when the machine is then in the accept state on cell 0 reading `0`.
pub fn run(m: &TMachine, w: &[Symbol], k: u32) -> Result<RunResult> {
    let delta = m.delta()?;
    let mut c = Config::initial(&delta, w, k)?;
    let steps = window(k)?;
    let mut trace = Vec::with_capacity(steps as usize);
    for _ in 1..steps {
        let next = step(&delta, &c)?;
        trace.push(c);
        c = next;
    }
    trace.push(c);
    let last = trace.last().expect("at least one configuration");
    let accepted = last.state == delta.accept && last.head == 0 && last.read() == Symbol::Zero;
    let halt_time = trace.iter().find(|c| c.state == delta.accept).map(|c| c.time);
    Ok(RunResult {
        accepted,
        halt_time,
        trace,
    })
}

/// Tape-cell content together with the head, when it is over the cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cell {
    pub symbol: Symbol,
    pub state: Option<usize>,
}

impl Cell {
    pub fn plain(symbol: Symbol) -> Cell {
        Cell { symbol, state: None }
    }

    pub fn head(state: usize, symbol: Symbol) -> Cell {
        Cell {
            symbol,
            state: Some(state),
        }
    }

    /// Dense index: plain symbols first, then `(state, symbol)` pairs.
    pub fn index(self) -> usize {
        match self.state {
            None => self.symbol.index(),
            Some(q) => 3 + 3 * q + self.symbol.index(),
        }
    }

    pub fn from_index(i: usize) -> Cell {
        if i < 3 {
            Cell::plain(Symbol::from_index(i))
        } else {
            Cell::head((i - 3) / 3, Symbol::from_index((i - 3) % 3))
        }
    }

    pub fn count(n_states: usize) -> usize {
        3 + 3 * n_states
    }
}

/// Content of cell `l` at time 0.
pub fn initial_cell(delta: &Delta, w: &[Symbol], l: u64) -> Cell {
    let symbol = w.get(l as usize).copied().unwrap_or(Symbol::Blank);
    if l == 0 {
        Cell::head(delta.initial, symbol)
    } else {
        Cell::plain(symbol)
    }
}

/// Content of a cell one step later, given its neighbourhood. A missing
/// neighbour is outside the window.
pub fn next_cell(delta: &Delta, left: Option<Cell>, centre: Cell, right: Option<Cell>) -> Cell {
    if let Some(q) = centre.state {
        let act = delta.action(q, centre.symbol);
        return Cell {
            symbol: act.write,
            state: (act.mv == Move::S).then_some(act.next),
        };
    }
    let enters = |side: Option<Cell>, towards: Move| {
        side.and_then(|c| {
            let q = c.state?;
            let act = delta.action(q, c.symbol);
            (act.mv == towards).then_some(act.next)
        })
    };
    Cell {
        symbol: centre.symbol,
        state: enters(left, Move::R).or_else(|| enters(right, Move::L)),
    }
}

/// The propositions true in the run: one per `(t, l)` in the window.
pub fn true_run_set(m: &TMachine, w: &[Symbol], k: u32) -> Result<Vec<Proposition>> {
    let res = run(m, w, k)?;
    let mut out = Vec::new();
    for c in &res.trace {
        for (l, &symbol) in c.tape.iter().enumerate() {
            let state = (c.head == l as u64).then_some(c.state);
            out.push(Proposition {
                t: c.time,
                l: l as u64,
                cell: Cell { symbol, state },
            });
        }
    }
    Ok(out)
}
