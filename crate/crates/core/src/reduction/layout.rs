use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{BitVec, Formula, VarId};

/// Symbol flags and state indicators describing one tape cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CellVars {
    pub zero: VarId,
    pub one: VarId,
    pub states: Vec<VarId>,
}

impl CellVars {
    fn new(zero: &str, one: &str, states: &str, n_states: usize) -> Self {
        CellVars {
            zero: VarId::new(zero),
            one: VarId::new(one),
            states: indexed(states, n_states),
        }
    }

    pub fn zero_f(&self) -> Formula {
        Formula::var(self.zero.clone())
    }

    pub fn one_f(&self) -> Formula {
        Formula::var(self.one.clone())
    }

    pub fn state_f(&self, q: usize) -> Formula {
        Formula::var(self.states[q].clone())
    }

    pub fn states_bv(&self) -> BitVec {
        BitVec::from_vars(&self.states).expect("distinct state names")
    }
}

fn indexed(name: &str, n: usize) -> Vec<VarId> {
    (1..=n).map(|i| VarId::new(format!("{name}.{i}"))).collect()
}

/// The outer variables of the reduction game.
///
/// Player One describes a proposition: a cell (`Zero1`, `One1`, `State1.*`)
/// at a time and position. Player Two describes a clause: the neighbourhood
/// at time `t - 1` (`p*` left, plain centre, `s*` right), the cell at time
/// `t` (`n*`), the coordinates `(t, l)`, and the `Negative` and `Accept`
/// flags.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub k: u32,
    pub n_states: usize,
    pub one: CellVars,
    pub time1: Vec<VarId>,
    pub tape1: Vec<VarId>,
    pub left: CellVars,
    pub centre: CellVars,
    pub right: CellVars,
    pub next: CellVars,
    pub time2: Vec<VarId>,
    pub tape2: Vec<VarId>,
    pub negative: VarId,
    pub accept: VarId,
}

impl Layout {
    pub fn new(k: u32, n_states: usize) -> Result<Layout> {
        if k == 0 {
            return Err(Error::BadWindow(k, "the reduction needs k >= 1"));
        }
        if k > 30 {
            return Err(Error::BadWindow(k, "window too large"));
        }
        if n_states < 2 {
            return Err(Error::InvalidMachine(vec!["the reduction needs at least two states".into()]));
        }
        let k_us = k as usize;
        Ok(Layout {
            k,
            n_states,
            one: CellVars::new("Zero1", "One1", "State1", n_states),
            time1: indexed("Time1", k_us),
            tape1: indexed("Tape1", k_us),
            left: CellVars::new("pZero2", "pOne2", "pState2", n_states),
            centre: CellVars::new("Zero2", "One2", "State2", n_states),
            right: CellVars::new("sZero2", "sOne2", "sState2", n_states),
            next: CellVars::new("nZero2", "nOne2", "nState2", n_states),
            time2: indexed("Time2", k_us),
            tape2: indexed("Tape2", k_us),
            negative: VarId::new("Negative"),
            accept: VarId::new("Accept"),
        })
    }

    /// `Zero1, One1, Time1.*, Tape1.*, State1.*`.
    pub fn player1(&self) -> Vec<VarId> {
        let mut v = vec![self.one.zero.clone(), self.one.one.clone()];
        v.extend(self.time1.iter().cloned());
        v.extend(self.tape1.iter().cloned());
        v.extend(self.one.states.iter().cloned());
        v
    }

    /// The eight symbol flags, `Time2.*`, `Tape2.*`, the four state
    /// families, then `Negative` and `Accept`.
    pub fn player2(&self) -> Vec<VarId> {
        let mut v = Vec::new();
        for c in self.families() {
            v.push(c.zero.clone());
            v.push(c.one.clone());
        }
        v.extend(self.time2.iter().cloned());
        v.extend(self.tape2.iter().cloned());
        for c in [&self.left, &self.centre, &self.right, &self.next] {
            v.extend(c.states.iter().cloned());
        }
        v.push(self.negative.clone());
        v.push(self.accept.clone());
        v
    }

    /// Player Two's cell families: left, centre, right, next.
    pub fn families(&self) -> [&CellVars; 4] {
        [&self.left, &self.centre, &self.right, &self.next]
    }

    pub fn window(&self) -> u64 {
        1u64 << self.k
    }

    pub fn bv(vars: &[VarId]) -> BitVec {
        BitVec::from_vars(vars).expect("distinct names")
    }

    pub fn time1_bv(&self) -> BitVec {
        Layout::bv(&self.time1)
    }

    pub fn tape1_bv(&self) -> BitVec {
        Layout::bv(&self.tape1)
    }

    pub fn time2_bv(&self) -> BitVec {
        Layout::bv(&self.time2)
    }

    pub fn tape2_bv(&self) -> BitVec {
        Layout::bv(&self.tape2)
    }
}

pub fn make_layout(k: u32, n_states: usize) -> Result<Layout> {
    Layout::new(k, n_states)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn sizes_and_uniqueness() {
        let l = make_layout(1, 2).unwrap();
        assert_eq!(l.player1().len(), 6);
        assert_eq!(l.player2().len(), 20);
        for (k, q) in [(1, 2), (2, 3), (3, 5)] {
            let l = make_layout(k, q).unwrap();
            let k = k as usize;
            assert_eq!(l.player1().len(), 2 + 2 * k + q);
            assert_eq!(l.player2().len(), 8 + 2 * k + 4 * q + 2);
            let all: HashSet<VarId> = l.player1().into_iter().chain(l.player2()).collect();
            assert_eq!(all.len(), l.player1().len() + l.player2().len());
        }
        assert!(make_layout(0, 2).is_err());
        assert!(make_layout(1, 1).is_err());
    }
}
