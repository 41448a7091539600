//! Guard formulas over the outer variables.
//!
//! For each payoff class and body arity `j` there is one guard; exactly one
//! guard holds under every outer assignment, and it names the class of the
//! decoded pair `(r, C)` together with the arity of `C`.

use crate::error::{Error, Result};
use crate::gadgets::{build_counting, build_equal, build_less, build_numeral, build_succ, numeral_consts, CountKind};
use crate::horn::PayoffClass;
use crate::logic::{BitVec, Formula};
use crate::turing::{Delta, Move, Symbol};

use super::layout::{CellVars, Layout};

pub const MAX_ARITY: usize = 4;

fn not(f: Formula) -> Formula {
    Formula::not(f)
}

fn and(fs: Vec<Formula>) -> Formula {
    Formula::and(fs)
}

fn or(fs: Vec<Formula>) -> Formula {
    Formula::or(fs)
}

fn num(j: u64, bv: &BitVec) -> Formula {
    build_numeral(j, bv).expect("numeral fits the window")
}

fn count(kind: CountKind, c: &CellVars) -> Formula {
    build_counting(kind, &c.states_bv())
}

fn none_of(c: &CellVars) -> Formula {
    count(CountKind::NoneOf, c)
}

/// The symbol flags of `c` spell `s`.
fn sym(c: &CellVars, s: Symbol) -> Formula {
    and(vec![
        if s == Symbol::Zero { c.zero_f() } else { not(c.zero_f()) },
        if s == Symbol::One { c.one_f() } else { not(c.one_f()) },
    ])
}

/// Every state flag of `c` is off except `q`, if given.
fn states_are(c: &CellVars, q: Option<usize>) -> Formula {
    and((0..c.states.len())
        .map(|i| if Some(i) == q { c.state_f(i) } else { not(c.state_f(i)) })
        .collect())
}

/// The flags of `a` and `b` agree one for one.
fn same_flags(a: &CellVars, b: &CellVars) -> Formula {
    let mut parts = vec![Formula::iff(a.zero_f(), b.zero_f()), Formula::iff(a.one_f(), b.one_f())];
    parts.extend((0..a.states.len()).map(|i| Formula::iff(a.state_f(i), b.state_f(i))));
    and(parts)
}

/// The shared pieces and the fifteen guards.
#[derive(Clone, Debug)]
pub struct GuardSet {
    pub one_illegal: Formula,
    pub two_illegal: Formula,
    /// Illegal items in `IllegalItems` field order.
    pub items: [Formula; 6],
    pub init_conf: Formula,
    pub cons: Formula,
    pub init: Formula,
    pub final_: Formula,
    pub one_final: Formula,
    pub illegal_i: Formula,
    pub illegal_rpi: Formula,
    pub match_head: Formula,
    pub match_left: Formula,
    pub match_centre: Formula,
    pub match_right: Formula,
    pub both_correct: Formula,
    pub two_correct: Formula,
    pub one_correct: Formula,
    pub none_correct: Formula,
    pub arity: [Formula; MAX_ARITY + 1],
    guards: [[Formula; MAX_ARITY + 1]; 3],
}

fn class_index(c: PayoffClass) -> usize {
    match c {
        PayoffClass::Rq => 0,
        PayoffClass::Rpi => 1,
        PayoffClass::Neq => 2,
    }
}

impl GuardSet {
    pub fn new(layout: &Layout, delta: &Delta, w: &[Symbol]) -> Result<GuardSet> {
        let big_k = layout.window();
        if w.len() as u64 > big_k {
            return Err(Error::WordTooLong { len: w.len(), cells: big_k });
        }
        if delta.n_states != layout.n_states {
            return Err(Error::InvalidMachine(vec![format!(
                "layout has {} states, machine has {}",
                layout.n_states, delta.n_states
            )]));
        }
        let (time1, tape1) = (layout.time1_bv(), layout.tape1_bv());
        let (time2, tape2) = (layout.time2_bv(), layout.tape2_bv());
        let (p1, p, c, s, n) = (&layout.one, &layout.left, &layout.centre, &layout.right, &layout.next);
        let neg = Formula::var(layout.negative.clone());
        let acc = Formula::var(layout.accept.clone());
        let last = big_k - 1;
        let t0 = num(0, &time2);
        let at_left_edge = num(0, &tape2);
        let at_right_edge = num(last, &tape2);

        let one_illegal = or(vec![
            and(vec![p1.zero_f(), p1.one_f()]),
            count(CountKind::MoreThanOneOf, p1),
        ]);

        // Initial content of cell Tape2, as a condition on the next family.
        let mut conf = vec![
            Formula::implies(not(at_left_edge.clone()), none_of(n)),
            Formula::implies(
                at_left_edge.clone(),
                and(vec![n.state_f(delta.initial), count(CountKind::OneOf, n)]),
            ),
        ];
        for (i, &a) in w.iter().enumerate() {
            conf.push(Formula::implies(num(i as u64, &tape2), sym(n, a)));
        }
        if (w.len() as u64) < big_k {
            let len = numeral_consts(w.len() as u64, layout.k as usize)?;
            conf.push(Formula::implies(not(build_less(&tape2, &len)?), sym(n, Symbol::Blank)));
        }
        let init_conf = and(conf);

        let cons = cons_formula(layout, delta, &at_left_edge, &at_right_edge);

        let family_list = [p, c, s, n];
        let items = [
            or(family_list.iter().map(|f| and(vec![f.zero_f(), f.one_f()])).collect()),
            or(family_list
                .iter()
                .map(|f| count(CountKind::MoreThanOneOf, f))
                .collect()),
            or(vec![
                and(vec![not(none_of(p)), not(none_of(c))]),
                and(vec![not(none_of(p)), not(none_of(s))]),
                and(vec![not(none_of(c)), not(none_of(s))]),
            ]),
            and(vec![
                t0.clone(),
                or(vec![
                    and(vec![not(neg.clone()), not(init_conf.clone())]),
                    and(vec![neg.clone(), init_conf.clone()]),
                ]),
            ]),
            and(vec![
                acc.clone(),
                or(vec![
                    neg.clone(),
                    not(num(last, &time2)),
                    not(at_left_edge.clone()),
                    not(n.state_f(delta.accept)),
                    not(n.zero_f()),
                ]),
            ]),
            and(vec![
                not(acc.clone()),
                not(t0.clone()),
                or(vec![
                    and(vec![not(neg.clone()), not(cons.clone())]),
                    and(vec![neg.clone(), cons.clone()]),
                ]),
            ]),
        ];
        let two_illegal = or(items.to_vec());

        let match_head = and(vec![
            build_equal(&tape1, &tape2)?,
            build_equal(&time1, &time2)?,
            same_flags(p1, n),
        ]);
        let match_left = and(vec![
            build_succ(&tape1, &tape2)?,
            build_succ(&time1, &time2)?,
            same_flags(p1, p),
        ]);
        let match_centre = and(vec![
            build_equal(&tape1, &tape2)?,
            build_succ(&time1, &time2)?,
            same_flags(p1, c),
        ]);
        let match_right = and(vec![
            build_succ(&tape2, &tape1)?,
            build_succ(&time1, &time2)?,
            same_flags(p1, s),
        ]);
        let match_tail = or(vec![match_left.clone(), match_centre.clone(), match_right.clone()]);
        let match_any = or(vec![match_head.clone(), match_tail.clone()]);

        let init_c = and(vec![t0.clone(), not(acc.clone()), not(neg.clone()), init_conf.clone()]);
        let init = and(vec![init_c, not(two_illegal.clone()), match_head.clone()]);
        let final_c = and(vec![
            acc.clone(),
            not(neg.clone()),
            num(last, &time2),
            at_left_edge.clone(),
            sym(n, Symbol::Zero),
            states_are(n, Some(delta.accept)),
        ]);
        let final_ = and(vec![final_c, match_head.clone()]);
        let one_final = and(vec![
            num(last, &time1),
            num(0, &tape1),
            sym(p1, Symbol::Zero),
            states_are(p1, Some(delta.accept)),
        ]);
        let illegal_i = and(vec![two_illegal.clone(), one_final.clone()]);

        let origin_left = and(vec![
            p.zero_f(),
            none_of(p),
            num(1, &time2),
            num(1, &tape2),
        ]);
        let origin_centre = and(vec![c.zero_f(), none_of(c), num(1, &time2), at_left_edge.clone()]);
        let illegal_rpi = and(vec![
            one_illegal.clone(),
            not(two_illegal.clone()),
            or(vec![origin_left.clone(), origin_centre.clone()]),
        ]);
        let origin_next = and(vec![
            t0.clone(),
            neg.clone(),
            at_left_edge.clone(),
            n.zero_f(),
            none_of(n),
        ]);

        let both_correct = and(vec![
            not(one_illegal.clone()),
            not(two_illegal.clone()),
            not(or(vec![
                match_head.clone(),
                and(vec![not(acc.clone()), match_tail.clone()]),
            ])),
        ]);
        let two_correct = and(vec![
            one_illegal.clone(),
            not(two_illegal.clone()),
            not(and(vec![
                not(acc.clone()),
                or(vec![origin_next.clone(), origin_centre.clone(), origin_left.clone()]),
            ])),
        ]);
        let one_correct = and(vec![
            not(one_illegal.clone()),
            two_illegal.clone(),
            not(and(vec![
                num(last, &time1),
                num(0, &tape1),
                p1.zero_f(),
                p1.state_f(delta.accept),
            ])),
        ]);
        let none_correct = and(vec![one_illegal.clone(), two_illegal.clone()]);
        let correct = or(vec![
            both_correct.clone(),
            two_correct.clone(),
            one_correct.clone(),
            none_correct.clone(),
        ]);

        // Path and arity.
        let accept_path = or(vec![two_illegal.clone(), acc.clone()]);
        let transition = and(vec![not(two_illegal.clone()), not(acc.clone()), not(t0.clone())]);
        let boundary = or(vec![at_left_edge.clone(), at_right_edge.clone()]);
        let interior = not(boundary.clone());
        let pos = not(neg.clone());
        let arity = [
            or(vec![accept_path, and(vec![t0.clone(), pos.clone()])]),
            and(vec![not(two_illegal.clone()), not(acc.clone()), t0.clone(), neg.clone()]),
            and(vec![transition.clone(), pos.clone(), boundary.clone()]),
            and(vec![
                transition.clone(),
                or(vec![
                    and(vec![pos.clone(), interior.clone()]),
                    and(vec![neg.clone(), boundary.clone()]),
                ]),
            ]),
            and(vec![transition.clone(), neg.clone(), interior.clone()]),
        ];

        let tail_or_illegal = or(vec![illegal_rpi.clone(), match_tail]);
        let any_or_illegal = or(vec![illegal_rpi.clone(), match_any]);
        let rq = [
            or(vec![init.clone(), final_.clone(), illegal_i.clone()]),
            Formula::falsity(),
            and(vec![arity[2].clone(), match_head.clone()]),
            and(vec![transition.clone(), pos.clone(), interior.clone(), match_head.clone()]),
            Formula::falsity(),
        ];
        let rpi = [
            Formula::falsity(),
            and(vec![
                arity[1].clone(),
                or(vec![
                    match_head.clone(),
                    and(vec![one_illegal.clone(), origin_next]),
                ]),
            ]),
            and(vec![arity[2].clone(), tail_or_illegal.clone()]),
            and(vec![
                transition.clone(),
                or(vec![
                    and(vec![pos, interior.clone(), tail_or_illegal]),
                    and(vec![neg.clone(), boundary, any_or_illegal.clone()]),
                ]),
            ]),
            and(vec![arity[4].clone(), any_or_illegal]),
        ];
        let neq = arity.clone().map(|a| and(vec![a, correct.clone()]));

        Ok(GuardSet {
            one_illegal,
            two_illegal,
            items,
            init_conf,
            cons,
            init,
            final_,
            one_final,
            illegal_i,
            illegal_rpi,
            match_head,
            match_left,
            match_centre,
            match_right,
            both_correct,
            two_correct,
            one_correct,
            none_correct,
            arity,
            guards: [rq, rpi, neq],
        })
    }

    pub fn guard(&self, class: PayoffClass, j: usize) -> &Formula {
        &self.guards[class_index(class)][j]
    }

    /// All fifteen guards, class-major.
    pub fn all(&self) -> Vec<(PayoffClass, usize, Formula)> {
        PayoffClass::ALL
            .iter()
            .flat_map(|&c| (0..=MAX_ARITY).map(move |j| (c, j)))
            .map(|(c, j)| (c, j, self.guard(c, j).clone()))
            .collect()
    }

    /// Replaces one guard; used to check that the verifier notices.
    pub fn set_guard(&mut self, class: PayoffClass, j: usize, f: Formula) {
        self.guards[class_index(class)][j] = f;
    }
}

/// Index of a guard in class-major order.
pub fn guard_index(class: PayoffClass, j: usize) -> usize {
    class_index(class) * (MAX_ARITY + 1) + j
}

/// Holds iff the next family is exactly the content the transition function
/// computes from the neighbourhood. Only exact when the neighbourhood is
/// legal (no clashes, at most one head among the three families).
fn cons_formula(layout: &Layout, delta: &Delta, at_left_edge: &Formula, at_right_edge: &Formula) -> Formula {
    let (p, c, s, n) = (&layout.left, &layout.centre, &layout.right, &layout.next);
    let keeps_centre_symbol = and(vec![Formula::iff(n.zero_f(), c.zero_f()), Formula::iff(n.one_f(), c.one_f())]);
    let mut centre_cases = Vec::new();
    let mut left_in = Vec::new();
    let mut left_cases = Vec::new();
    let mut right_in = Vec::new();
    let mut right_cases = Vec::new();
    for q in 0..delta.n_states {
        for a in Symbol::ALL {
            let act = delta.action(q, a);
            centre_cases.push(and(vec![
                c.state_f(q),
                sym(c, a),
                sym(n, act.write),
                states_are(n, (act.mv == Move::S).then_some(act.next)),
            ]));
            match act.mv {
                Move::R => {
                    let from = and(vec![p.state_f(q), sym(p, a)]);
                    left_in.push(from.clone());
                    left_cases.push(and(vec![from, states_are(n, Some(act.next))]));
                }
                Move::L => {
                    let from = and(vec![s.state_f(q), sym(s, a)]);
                    right_in.push(from.clone());
                    right_cases.push(and(vec![from, states_are(n, Some(act.next))]));
                }
                Move::S => {}
            }
        }
    }
    let left_enters = and(vec![not(at_left_edge.clone()), or(left_in)]);
    let right_enters = and(vec![not(at_right_edge.clone()), or(right_in)]);
    let headless = none_of(c);
    or(vec![
        or(centre_cases),
        and(vec![
            headless.clone(),
            not(at_left_edge.clone()),
            keeps_centre_symbol.clone(),
            or(left_cases),
        ]),
        and(vec![
            headless.clone(),
            not(left_enters.clone()),
            not(at_right_edge.clone()),
            keeps_centre_symbol.clone(),
            or(right_cases),
        ]),
        and(vec![
            headless,
            not(left_enters),
            not(right_enters),
            keeps_centre_symbol,
            states_are(n, None),
        ]),
    ])
}
