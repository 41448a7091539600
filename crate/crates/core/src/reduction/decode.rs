//! Procedural reading of outer assignments as propositions and clauses.
//!
//! These functions never look at the guard formulas; the verifier compares
//! the two.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::horn::{accept_clause, HornClause, Proposition};
use crate::logic::{Assignment, VarId};
use crate::turing::{initial_cell, next_cell, Cell, Delta, Symbol};

use super::layout::Layout;

/// The raw flags of one cell family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellBits {
    pub zero: bool,
    pub one: bool,
    pub states: Vec<bool>,
}

impl CellBits {
    pub fn encode(cell: Cell, n_states: usize) -> CellBits {
        let mut states = vec![false; n_states];
        if let Some(q) = cell.state {
            states[q] = true;
        }
        CellBits {
            zero: cell.symbol == Symbol::Zero,
            one: cell.symbol == Symbol::One,
            states,
        }
    }

    pub fn blank(n_states: usize) -> CellBits {
        CellBits {
            zero: false,
            one: false,
            states: vec![false; n_states],
        }
    }

    pub fn clash(&self) -> bool {
        self.zero && self.one
    }

    pub fn heads(&self) -> usize {
        self.states.iter().filter(|&&b| b).count()
    }

    pub fn is_legal(&self) -> bool {
        !self.clash() && self.heads() <= 1
    }

    /// The described cell. Only meaningful for legal flags; on a clash the
    /// symbol reads as `0` and the first set state wins.
    pub fn content(&self) -> Cell {
        let symbol = if self.zero {
            Symbol::Zero
        } else if self.one {
            Symbol::One
        } else {
            Symbol::Blank
        };
        Cell {
            symbol,
            state: self.states.iter().position(|&b| b),
        }
    }

    /// Exact flag equality with the encoding of `cell`.
    pub fn is(&self, cell: Cell) -> bool {
        *self == CellBits::encode(cell, self.states.len())
    }
}

fn read_num(bits: &[bool]) -> u64 {
    bits.iter().fold(0, |acc, &b| (acc << 1) | b as u64)
}

fn write_num(v: u64, width: usize, out: &mut Vec<bool>) {
    out.extend((0..width).rev().map(|i| (v >> i) & 1 == 1));
}

/// Player One's assignment, in `Layout::player1` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OneView {
    pub cell: CellBits,
    pub time: u64,
    pub tape: u64,
}

impl OneView {
    pub fn from_bits(layout: &Layout, bits: &[bool]) -> OneView {
        let k = layout.k as usize;
        OneView {
            cell: CellBits {
                zero: bits[0],
                one: bits[1],
                states: bits[2 + 2 * k..2 + 2 * k + layout.n_states].to_vec(),
            },
            time: read_num(&bits[2..2 + k]),
            tape: read_num(&bits[2 + k..2 + 2 * k]),
        }
    }

    pub fn to_bits(&self, layout: &Layout) -> Vec<bool> {
        let k = layout.k as usize;
        let mut v = vec![self.cell.zero, self.cell.one];
        write_num(self.time, k, &mut v);
        write_num(self.tape, k, &mut v);
        v.extend(&self.cell.states);
        v
    }
}

/// Player Two's assignment, in `Layout::player2` order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoView {
    pub left: CellBits,
    pub centre: CellBits,
    pub right: CellBits,
    pub next: CellBits,
    pub time: u64,
    pub tape: u64,
    pub negative: bool,
    pub accept: bool,
}

impl TwoView {
    pub fn from_bits(layout: &Layout, bits: &[bool]) -> TwoView {
        let k = layout.k as usize;
        let q = layout.n_states;
        let st = 8 + 2 * k;
        let fam = |i: usize| CellBits {
            zero: bits[2 * i],
            one: bits[2 * i + 1],
            states: bits[st + i * q..st + (i + 1) * q].to_vec(),
        };
        TwoView {
            left: fam(0),
            centre: fam(1),
            right: fam(2),
            next: fam(3),
            time: read_num(&bits[8..8 + k]),
            tape: read_num(&bits[8 + k..8 + 2 * k]),
            negative: bits[st + 4 * q],
            accept: bits[st + 4 * q + 1],
        }
    }

    pub fn to_bits(&self, layout: &Layout) -> Vec<bool> {
        let k = layout.k as usize;
        let mut v = Vec::new();
        for f in self.families() {
            v.push(f.zero);
            v.push(f.one);
        }
        write_num(self.time, k, &mut v);
        write_num(self.tape, k, &mut v);
        for f in self.families() {
            v.extend(&f.states);
        }
        v.push(self.negative);
        v.push(self.accept);
        v
    }

    pub fn families(&self) -> [&CellBits; 4] {
        [&self.left, &self.centre, &self.right, &self.next]
    }

    fn blank(layout: &Layout) -> TwoView {
        let b = CellBits::blank(layout.n_states);
        TwoView {
            left: b.clone(),
            centre: b.clone(),
            right: b.clone(),
            next: b,
            time: 0,
            tape: 0,
            negative: false,
            accept: false,
        }
    }

    /// The neighbourhood at time `t - 1`, absent sides outside the window.
    pub fn neighbourhood(&self, layout: &Layout) -> (Option<Cell>, Cell, Option<Cell>) {
        let big_k = layout.window();
        (
            (self.tape > 0).then(|| self.left.content()),
            self.centre.content(),
            (self.tape + 1 < big_k).then(|| self.right.content()),
        )
    }
}

fn bits_of(layout_vars: &[VarId], a: &Assignment) -> Result<Vec<bool>> {
    layout_vars.iter().map(|v| a.get(v)).collect()
}

/// Player One's proposition. Clashing symbol flags or several states read
/// as `p[0,0,0]`.
pub fn decode_one_bits(layout: &Layout, bits: &[bool]) -> Proposition {
    let v = OneView::from_bits(layout, bits);
    if !v.cell.is_legal() {
        return Proposition::new(0, 0, Cell::plain(Symbol::Zero));
    }
    Proposition::new(v.time, v.tape, v.cell.content())
}

pub fn decode_one(layout: &Layout, a: &Assignment) -> Result<Proposition> {
    Ok(decode_one_bits(layout, &bits_of(&layout.player1(), a)?))
}

pub fn encode_one(layout: &Layout, p: &Proposition) -> Vec<bool> {
    OneView {
        cell: CellBits::encode(p.cell, layout.n_states),
        time: p.t,
        tape: p.l,
    }
    .to_bits(layout)
}

/// The six ways Player Two's assignment can fail to describe a clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct IllegalItems {
    /// A family has both symbol flags.
    pub clash: bool,
    /// A family has several states.
    pub many_states: bool,
    /// More than one neighbourhood family carries a head.
    pub many_heads: bool,
    /// Initial step whose sign disagrees with the initial content.
    pub bad_initial: bool,
    /// Accept flag without the accepting cell description.
    pub bad_accept: bool,
    /// Transition whose sign disagrees with the computed next cell.
    pub bad_transition: bool,
}

impl IllegalItems {
    pub fn any(&self) -> bool {
        self.clash || self.many_states || self.many_heads || self.bad_initial || self.bad_accept || self.bad_transition
    }
}

pub fn illegal_items(layout: &Layout, delta: &Delta, w: &[Symbol], v: &TwoView) -> IllegalItems {
    let big_k = layout.window();
    let fams = v.families();
    let heads = [&v.left, &v.centre, &v.right].iter().filter(|f| f.heads() > 0).count();
    let t0 = v.time == 0;
    let init_ok = v.next.is(initial_cell(delta, w, v.tape));
    let (l, c, r) = v.neighbourhood(layout);
    let cons_ok = v.next.is(next_cell(delta, l, c, r));
    IllegalItems {
        clash: fams.iter().any(|f| f.clash()),
        many_states: fams.iter().any(|f| f.heads() > 1),
        many_heads: heads > 1,
        bad_initial: t0 && (init_ok == v.negative),
        bad_accept: v.accept
            && (v.negative
                || v.time != big_k - 1
                || v.tape != 0
                || !v.next.states[delta.accept]
                || !v.next.zero),
        bad_transition: !v.accept && !t0 && (cons_ok == v.negative),
    }
}

/// Which branch of the decoding produced the clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TwoPath {
    Illegal,
    Accept,
    Initial,
    Transition,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodedTwo {
    pub path: TwoPath,
    pub items: IllegalItems,
    pub clause: HornClause,
}

/// Player Two's clause. Illegal assignments and the accept flag read as the
/// accept clause.
pub fn decode_two_bits(layout: &Layout, delta: &Delta, w: &[Symbol], bits: &[bool]) -> DecodedTwo {
    let v = TwoView::from_bits(layout, bits);
    let items = illegal_items(layout, delta, w, &v);
    let accept = || accept_clause(delta, layout.k).expect("layout window is valid");
    if items.any() || v.accept {
        let path = if items.any() { TwoPath::Illegal } else { TwoPath::Accept };
        return DecodedTwo {
            path,
            items,
            clause: accept(),
        };
    }
    let here = Proposition::new(v.time, v.tape, v.next.content());
    if v.time == 0 {
        let clause = if v.negative {
            HornClause { head: None, body: vec![here] }
        } else {
            HornClause::fact(here)
        };
        return DecodedTwo {
            path: TwoPath::Initial,
            items,
            clause,
        };
    }
    let (left, centre, right) = v.neighbourhood(layout);
    let t = v.time - 1;
    let mut body = Vec::with_capacity(4);
    if let Some(c) = left {
        body.push(Proposition::new(t, v.tape - 1, c));
    }
    body.push(Proposition::new(t, v.tape, centre));
    if let Some(c) = right {
        body.push(Proposition::new(t, v.tape + 1, c));
    }
    let clause = if v.negative {
        body.push(here);
        HornClause { head: None, body }
    } else {
        HornClause { head: Some(here), body }
    };
    DecodedTwo {
        path: TwoPath::Transition,
        items,
        clause,
    }
}

pub fn decode_two(layout: &Layout, delta: &Delta, w: &[Symbol], a: &Assignment) -> Result<HornClause> {
    Ok(decode_two_bits(layout, delta, w, &bits_of(&layout.player2(), a)?).clause)
}

/// An assignment that decodes to `c`, for any clause of the system.
pub fn encode_two(layout: &Layout, delta: &Delta, c: &HornClause) -> Result<Vec<bool>> {
    let big_k = layout.window();
    let q = layout.n_states;
    let mut v = TwoView::blank(layout);
    if *c == accept_clause(delta, layout.k)? {
        let h = c.head.expect("accept clause has a head");
        v.accept = true;
        v.time = h.t;
        v.tape = h.l;
        v.next = CellBits::encode(h.cell, q);
        return Ok(v.to_bits(layout));
    }
    let target = match (c.head, c.body.last()) {
        (Some(h), _) => h,
        (None, Some(&last)) => last,
        (None, None) => return Err(Error::Parse("empty clause".into())),
    };
    v.negative = c.head.is_none();
    v.time = target.t;
    v.tape = target.l;
    v.next = CellBits::encode(target.cell, q);
    if target.t > 0 {
        let n_body = if v.negative { c.body.len() - 1 } else { c.body.len() };
        for p in &c.body[..n_body] {
            let bits = CellBits::encode(p.cell, q);
            if p.t + 1 != target.t || p.l + 1 < target.l || p.l > target.l + 1 || p.l >= big_k {
                return Err(Error::Parse(format!("body literal {p} is not in the neighbourhood of {target}")));
            }
            if p.l + 1 == target.l {
                v.left = bits;
            } else if p.l == target.l {
                v.centre = bits;
            } else {
                v.right = bits;
            }
        }
    }
    Ok(v.to_bits(layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horn::{build_clauses, enumerate_props, DEFAULT_HORN_CAP};
    use crate::turing::{Move, Rule, TMachine};

    fn machine() -> TMachine {
        let r = |s: &str, read, n: &str, write, mv| Rule {
            state: s.into(),
            read,
            next: n.into(),
            write,
            mv,
        };
        TMachine {
            states: vec!["q1".into(), "qf".into()],
            initial: "q1".into(),
            accept: "qf".into(),
            rules: vec![
                r("q1", Symbol::Zero, "qf", Symbol::Zero, Move::S),
                r("q1", Symbol::One, "q1", Symbol::One, Move::R),
                r("q1", Symbol::Blank, "q1", Symbol::Blank, Move::L),
                r("qf", Symbol::Zero, "qf", Symbol::Zero, Move::S),
                r("qf", Symbol::One, "qf", Symbol::One, Move::S),
                r("qf", Symbol::Blank, "qf", Symbol::Blank, Move::S),
            ],
        }
    }

    #[test]
    fn views_round_trip() {
        let layout = Layout::new(2, 3).unwrap();
        let n1 = layout.player1().len();
        let n2 = layout.player2().len();
        for seed in 0..200u64 {
            let bits1: Vec<bool> = (0..n1).map(|i| (seed.wrapping_mul(0x9e37) >> (i % 13)) & 1 == 1).collect();
            let bits2: Vec<bool> = (0..n2).map(|i| (seed.wrapping_mul(0x85eb) >> (i % 17)) & 1 == 1).collect();
            assert_eq!(OneView::from_bits(&layout, &bits1).to_bits(&layout), bits1);
            assert_eq!(TwoView::from_bits(&layout, &bits2).to_bits(&layout), bits2);
        }
    }

    #[test]
    fn encoders_invert_decoders() {
        let m = machine();
        let delta = m.delta().unwrap();
        let w = [Symbol::One];
        let layout = Layout::new(1, 2).unwrap();
        for p in enumerate_props(1, 2, DEFAULT_HORN_CAP).unwrap() {
            assert_eq!(decode_one_bits(&layout, &encode_one(&layout, &p)), p);
        }
        for c in build_clauses(&m, &w, 1, DEFAULT_HORN_CAP).unwrap() {
            let bits = encode_two(&layout, &delta, &c).unwrap();
            let d = decode_two_bits(&layout, &delta, &w, &bits);
            assert_ne!(d.path, TwoPath::Illegal, "{c:?}");
            assert_eq!(d.clause, c);
        }
    }

    #[test]
    fn illegal_player_one_reads_origin() {
        let layout = Layout::new(1, 2).unwrap();
        let mut bits = vec![false; 6];
        bits[0] = true;
        bits[1] = true;
        bits[2] = true;
        let p = decode_one_bits(&layout, &bits);
        assert_eq!(p, Proposition::new(0, 0, Cell::plain(Symbol::Zero)));
    }

    #[test]
    fn all_false_two_is_illegal_initial() {
        // time 0, tape 0, next cell blank without head: the initial cell
        // holds the head, so a positive fact would be wrong
        let m = machine();
        let delta = m.delta().unwrap();
        let layout = Layout::new(1, 2).unwrap();
        let bits = vec![false; layout.player2().len()];
        let d = decode_two_bits(&layout, &delta, &[], &bits);
        assert_eq!(d.path, TwoPath::Illegal);
        assert!(d.items.bad_initial);
        assert_eq!(d.clause, accept_clause(&delta, 1).unwrap());
    }
}
