//! Checks the composed game against the procedural decoding.
//!
//! The guards are compiled into one bit-parallel program together with the
//! named component formulas. Every tested outer assignment is decoded into a
//! pair `(r, C)` without looking at any formula; the program's outputs must
//! name the class and arity of that pair, and each component must agree with
//! its decode-level reading.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::compile::{LaneLayout, Program};
use crate::error::{Error, Result};
use crate::horn::{accept_clause, build_clauses, classify, enumerate_props, HornClause, PayoffClass, Proposition, DEFAULT_HORN_CAP};
use crate::logic::{Formula, VarId};
use crate::rational::{self, Rational};
use crate::solver::game_value;
use crate::turing::{initial_cell, next_cell, Cell, Delta, Symbol, TMachine};

use super::decode::{decode_one_bits, decode_two_bits, encode_one, encode_two, DecodedTwo, TwoPath, TwoView};
use super::guards::{guard_index, GuardSet, MAX_ARITY};
use super::layout::Layout;
use super::{compose, Reduction};

const N_GUARDS: usize = 3 * (MAX_ARITY + 1);
const MAX_EXAMPLES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "sampled" => Ok(Mode::Sampled),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub k: u32,
    pub mode: Mode,
    /// Required in sampled mode; also drives the restriction suite there.
    pub seed: Option<u64>,
    /// Number of sampled outer assignments (sampled mode).
    pub samples: u64,
    /// Limit on enumerated outer assignments and on subgame expansion.
    pub cap: u128,
    /// Solve the fifteen subgames.
    pub values: bool,
    /// Outer assignments checked by restricting the composed goal.
    pub restrictions: usize,
    /// Replace one guard by its negation before checking.
    pub mutate: Option<(PayoffClass, usize)>,
}

impl VerifyOptions {
    pub fn exhaustive(k: u32) -> Self {
        VerifyOptions {
            k,
            mode: Mode::Exhaustive,
            seed: None,
            samples: 0,
            cap: 1 << 26,
            values: true,
            restrictions: 64,
            mutate: None,
        }
    }

    pub fn sampled(k: u32, seed: u64, samples: u64) -> Self {
        VerifyOptions {
            mode: Mode::Sampled,
            seed: Some(seed),
            samples,
            ..VerifyOptions::exhaustive(k)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportConfig {
    pub machine_sha256: String,
    pub word: String,
    pub k: u32,
    pub mode: Mode,
    pub seed: Option<u64>,
    pub samples: u64,
    pub cap: u64,
    pub mutation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failures: u64,
    pub examples: Vec<String>,
}

impl SuiteReport {
    fn new(name: impl Into<String>) -> Self {
        SuiteReport {
            name: name.into(),
            checked: 0,
            failures: 0,
            examples: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, example: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(example());
            }
        }
    }

    fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failures += other.failures;
        for e in other.examples {
            if self.examples.len() < MAX_EXAMPLES {
                self.examples.push(e);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValueCheck {
    pub class: PayoffClass,
    pub j: usize,
    #[serde(with = "rational::canonical")]
    pub target: Rational,
    /// Canonical value, or `None` when the subgame exceeds the cap.
    pub value: Option<String>,
    pub exact: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardHits {
    pub class: PayoffClass,
    pub j: usize,
    pub hits: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub config: ReportConfig,
    pub suites: Vec<SuiteReport>,
    pub guard_hits: Vec<GuardHits>,
    pub conditional_values: Vec<ValueCheck>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Report> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteReport> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// Formulas checked alongside the guards, each against a decode-level
/// predicate on its own domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Component {
    TwoIllegal,
    OneIllegal,
    Item(usize),
    InitConf,
    Cons,
    Init,
    Final,
    OneFinal,
    IllegalRpi,
    MatchHead,
    MatchLeft,
    MatchCentre,
    MatchRight,
    BothCorrect,
    TwoCorrect,
    OneCorrect,
    NoneCorrect,
}

const ITEM_NAMES: [&str; 6] = [
    "clash",
    "many_states",
    "many_heads",
    "bad_initial",
    "bad_accept",
    "bad_transition",
];

impl Component {
    fn all() -> Vec<Component> {
        let mut v = vec![Component::TwoIllegal, Component::OneIllegal];
        v.extend((0..6).map(Component::Item));
        v.extend([
            Component::InitConf,
            Component::Cons,
            Component::Init,
            Component::Final,
            Component::OneFinal,
            Component::IllegalRpi,
            Component::MatchHead,
            Component::MatchLeft,
            Component::MatchCentre,
            Component::MatchRight,
            Component::BothCorrect,
            Component::TwoCorrect,
            Component::OneCorrect,
            Component::NoneCorrect,
        ]);
        v
    }

    fn name(self) -> String {
        let s = match self {
            Component::TwoIllegal => "two_illegal",
            Component::OneIllegal => "one_illegal",
            Component::Item(i) => return format!("component/item_{}", ITEM_NAMES[i]),
            Component::InitConf => "init_conf",
            Component::Cons => "cons",
            Component::Init => "init",
            Component::Final => "final",
            Component::OneFinal => "one_final",
            Component::IllegalRpi => "illegal_rpi",
            Component::MatchHead => "match_head",
            Component::MatchLeft => "match_left",
            Component::MatchCentre => "match_centre",
            Component::MatchRight => "match_right",
            Component::BothCorrect => "both_correct",
            Component::TwoCorrect => "two_correct",
            Component::OneCorrect => "one_correct",
            Component::NoneCorrect => "none_correct",
        };
        format!("component/{s}")
    }

    fn formula(self, g: &GuardSet) -> Formula {
        match self {
            Component::TwoIllegal => g.two_illegal.clone(),
            Component::OneIllegal => g.one_illegal.clone(),
            Component::Item(i) => g.items[i].clone(),
            Component::InitConf => g.init_conf.clone(),
            Component::Cons => g.cons.clone(),
            Component::Init => g.init.clone(),
            Component::Final => g.final_.clone(),
            Component::OneFinal => g.one_final.clone(),
            Component::IllegalRpi => g.illegal_rpi.clone(),
            Component::MatchHead => g.match_head.clone(),
            Component::MatchLeft => g.match_left.clone(),
            Component::MatchCentre => g.match_centre.clone(),
            Component::MatchRight => g.match_right.clone(),
            Component::BothCorrect => g.both_correct.clone(),
            Component::TwoCorrect => g.two_correct.clone(),
            Component::OneCorrect => g.one_correct.clone(),
            Component::NoneCorrect => g.none_correct.clone(),
        }
    }
}

/// Everything about Player Two's assignment that does not depend on
/// Player One.
struct TwoInfo {
    view: TwoView,
    decoded: DecodedTwo,
    init_ok: bool,
    cons_ok: bool,
    member: bool,
}

/// Player One's reading: the proposition and whether the default path was
/// taken.
#[derive(Clone, Copy)]
struct OneInfo {
    r: Proposition,
    illegal: bool,
}

struct Oracle<'a> {
    layout: &'a Layout,
    delta: Delta,
    w: &'a [Symbol],
    program: Program,
    components: Vec<Component>,
    accept_head: Proposition,
    one_table: Option<Vec<OneInfo>>,
    clauses: Option<HashSet<HornClause>>,
    n1: usize,
    n2: usize,
}

#[derive(Clone)]
struct Tally {
    decode: SuiteReport,
    partition: SuiteReport,
    membership: SuiteReport,
    components: Vec<SuiteReport>,
    hits: [u64; N_GUARDS],
}

impl Tally {
    fn new(components: &[Component]) -> Tally {
        Tally {
            decode: SuiteReport::new("decode_equivalence"),
            partition: SuiteReport::new("partition"),
            membership: SuiteReport::new("clause_membership"),
            components: components.iter().map(|c| SuiteReport::new(c.name())).collect(),
            hits: [0; N_GUARDS],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.decode.merge(other.decode);
        self.partition.merge(other.partition);
        self.membership.merge(other.membership);
        for (a, b) in self.components.iter_mut().zip(other.components) {
            a.merge(b);
        }
        for (a, b) in self.hits.iter_mut().zip(other.hits) {
            *a += b;
        }
        self
    }
}

fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn guard_name(g: usize) -> String {
    let class = PayoffClass::ALL[g / (MAX_ARITY + 1)];
    format!("{}{}", class.name(), g % (MAX_ARITY + 1))
}

impl<'a> Oracle<'a> {
    fn new(layout: &'a Layout, m: &TMachine, w: &'a [Symbol], guards: &GuardSet) -> Result<Oracle<'a>> {
        let delta = m.delta()?;
        let components = Component::all();
        let mut outputs: Vec<Formula> = guards.all().into_iter().map(|(_, _, f)| f).collect();
        outputs.extend(components.iter().map(|c| c.formula(guards)));
        let mut order = layout.player2();
        order.extend(layout.player1());
        let program = Program::compile_ordered(&outputs, &order)?;
        let n1 = layout.player1().len();
        let n2 = layout.player2().len();
        let one_table = (n1 <= 20).then(|| {
            (0..1u64 << n1)
                .map(|i| {
                    let bits: Vec<bool> = (0..n1).map(|b| (i >> (n1 - 1 - b)) & 1 == 1).collect();
                    one_info(layout, &bits)
                })
                .collect()
        });
        let clauses = build_clauses(m, w, layout.k, DEFAULT_HORN_CAP)
            .ok()
            .map(|s| s.into_iter().collect::<HashSet<_>>());
        let accept_head = accept_clause(&delta, layout.k)?.head.expect("accept clause has a head");
        Ok(Oracle {
            layout,
            delta,
            w,
            program,
            components,
            accept_head,
            one_table,
            clauses,
            n1,
            n2,
        })
    }

    fn two_info(&self, bits: &[bool]) -> TwoInfo {
        let view = TwoView::from_bits(self.layout, bits);
        let decoded = decode_two_bits(self.layout, &self.delta, self.w, bits);
        let init_ok = view.next.is(initial_cell(&self.delta, self.w, view.tape));
        let (l, c, r) = view.neighbourhood(self.layout);
        let cons_ok = view.next.is(next_cell(&self.delta, l, c, r));
        let member = match &self.clauses {
            Some(s) => s.contains(&decoded.clause),
            None => true,
        };
        TwoInfo {
            view,
            decoded,
            init_ok,
            cons_ok,
            member,
        }
    }

    fn one(&self, bits: &[bool], index: u64) -> OneInfo {
        match &self.one_table {
            Some(t) => t[index as usize],
            None => one_info(self.layout, bits),
        }
    }

    /// Decode-level reading of a component; `None` outside its domain.
    fn predicate(&self, c: Component, one: OneInfo, two: &TwoInfo) -> Option<bool> {
        let v = &two.view;
        let d = &two.decoded;
        let items = &d.items;
        let big_k = self.layout.window();
        let r = one.r;
        let legal_one = !one.illegal;
        let two_illegal = d.path == TwoPath::Illegal;
        let in_clause = classify(&r, &d.clause) != PayoffClass::Neq;
        let slot = |t: Option<u64>, l: Option<u64>, cell: Cell| match (t, l) {
            (Some(t), Some(l)) if l < big_k => r == Proposition::new(t, l, cell),
            _ => false,
        };
        let prev = v.time.checked_sub(1);
        match c {
            Component::TwoIllegal => Some(two_illegal),
            Component::OneIllegal => Some(one.illegal),
            Component::Item(5) => {
                (!items.clash && !items.many_states && !items.many_heads).then_some(items.bad_transition)
            }
            Component::Item(i) => Some([items.clash, items.many_states, items.many_heads, items.bad_initial, items.bad_accept][i]),
            Component::InitConf => Some(two.init_ok),
            Component::Cons => (!items.clash && !items.many_states && !items.many_heads).then_some(two.cons_ok),
            Component::Init => Some(d.path == TwoPath::Initial && !v.negative && d.clause.head == Some(r)),
            Component::Final => (!two_illegal).then_some(d.path == TwoPath::Accept && d.clause.head == Some(r)),
            Component::OneFinal => Some(r == self.accept_head),
            Component::IllegalRpi => {
                (d.path == TwoPath::Transition).then_some(one.illegal && d.clause.body.contains(&r))
            }
            Component::MatchHead => {
                (legal_one && v.next.is_legal()).then_some(slot(Some(v.time), Some(v.tape), v.next.content()))
            }
            Component::MatchLeft => {
                (legal_one && v.left.is_legal()).then_some(slot(prev, v.tape.checked_sub(1), v.left.content()))
            }
            Component::MatchCentre => {
                (legal_one && v.centre.is_legal()).then_some(slot(prev, Some(v.tape), v.centre.content()))
            }
            Component::MatchRight => {
                (legal_one && v.right.is_legal()).then_some(slot(prev, Some(v.tape + 1), v.right.content()))
            }
            Component::BothCorrect => Some(!one.illegal && !two_illegal && !in_clause),
            Component::TwoCorrect => Some(one.illegal && !two_illegal && !in_clause),
            Component::OneCorrect => Some(!one.illegal && two_illegal && !in_clause),
            Component::NoneCorrect => Some(one.illegal && two_illegal && !in_clause),
        }
    }

    /// Checks the lanes in `mask` of one batch of input words (Player Two's
    /// variables first).
    fn check_batch(&self, inputs: &[u64], mask: u64, scratch: &mut [u64], out: &mut [u64], tally: &mut Tally) {
        self.program.eval(inputs, scratch, out);
        let (n1, n2) = (self.n1, self.n2);
        let uniform_two = inputs[..n2].iter().all(|&x| x == 0 || x == !0);
        let lane_bits = |lane: u32, range: std::ops::Range<usize>| -> Vec<bool> {
            inputs[range].iter().map(|&x| (x >> lane) & 1 == 1).collect()
        };
        let shared = uniform_two.then(|| self.two_info(&lane_bits(0, 0..n2)));
        let mut two_bits = Vec::new();
        let mut local;
        for lane in 0..64u32 {
            if (mask >> lane) & 1 == 0 {
                continue;
            }
            let two = match &shared {
                Some(t) => t,
                None => {
                    two_bits = lane_bits(lane, 0..n2);
                    local = self.two_info(&two_bits);
                    &local
                }
            };
            let one_bits = lane_bits(lane, n2..n2 + n1);
            let one_index = one_bits.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
            let one = self.one(&one_bits, one_index);
            let expected = guard_index(classify(&one.r, &two.decoded.clause), two.decoded.clause.arity());
            let fired: Vec<usize> = (0..N_GUARDS).filter(|&g| (out[g] >> lane) & 1 == 1).collect();
            let describe = || {
                let p2 = if uniform_two { lane_bits(lane, 0..n2) } else { two_bits.clone() };
                format!(
                    "P2={} P1={} r={} C={:?} expected {} got [{}]",
                    bits_string(&p2),
                    bits_string(&one_bits),
                    one.r,
                    two.decoded.clause,
                    guard_name(expected),
                    fired.iter().map(|&g| guard_name(g)).collect::<Vec<_>>().join(",")
                )
            };
            tally.decode.record(fired == [expected], describe);
            tally.partition.record(fired.len() == 1, describe);
            for &g in &fired {
                tally.hits[g] += 1;
            }
            if shared.is_none() || lane == mask.trailing_zeros() {
                tally.membership.record(two.member, || format!("{:?} not in the clause system", two.decoded.clause));
            }
            for (i, &c) in self.components.iter().enumerate() {
                if let Some(want) = self.predicate(c, one, two) {
                    let got = (out[N_GUARDS + i] >> lane) & 1 == 1;
                    tally.components[i].record(got == want, || format!("{} formula={got} decode={want}", describe()));
                }
            }
        }
    }

    fn exhaustive(&self) -> Tally {
        let lanes = LaneLayout::new(self.n1 + self.n2);
        let words = lanes.words();
        let mask = lanes.mask();
        let run = |range: std::ops::Range<u64>| {
            let mut inputs = vec![0u64; self.n1 + self.n2];
            let mut scratch = self.program.scratch();
            let mut out = vec![0u64; self.program.outputs()];
            let mut tally = Tally::new(&self.components);
            for word in range {
                lanes.fill(word, &mut inputs);
                self.check_batch(&inputs, mask, &mut scratch, &mut out, &mut tally);
            }
            tally
        };
        let chunk = 1u64 << 12;
        let chunks: Vec<std::ops::Range<u64>> = (0..words.div_ceil(chunk))
            .map(|c| c * chunk..((c + 1) * chunk).min(words))
            .collect();
        #[cfg(feature = "parallel")]
        let tallies: Vec<Tally> = {
            use rayon::prelude::*;
            chunks.into_par_iter().map(run).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let tallies: Vec<Tally> = chunks.into_iter().map(run).collect();
        tallies
            .into_iter()
            .fold(Tally::new(&self.components), Tally::merge)
    }

    /// Seeded random lanes plus the curated corner cases.
    fn sampled(&self, seed: u64, samples: u64, corners: &[(Vec<bool>, Vec<bool>)]) -> Tally {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut inputs = vec![0u64; self.n1 + self.n2];
        let mut scratch = self.program.scratch();
        let mut out = vec![0u64; self.program.outputs()];
        let mut tally = Tally::new(&self.components);
        let mut left = samples;
        while left > 0 {
            for x in inputs.iter_mut() {
                *x = rng.gen();
            }
            let take = left.min(64);
            let mask = if take == 64 { !0 } else { (1u64 << take) - 1 };
            self.check_batch(&inputs, mask, &mut scratch, &mut out, &mut tally);
            left -= take;
        }
        for batch in corners.chunks(64) {
            inputs.iter_mut().for_each(|x| *x = 0);
            for (lane, (two, one)) in batch.iter().enumerate() {
                for (i, &b) in two.iter().chain(one.iter()).enumerate() {
                    inputs[i] |= (b as u64) << lane;
                }
            }
            let mask = if batch.len() == 64 { !0 } else { (1u64 << batch.len()) - 1 };
            self.check_batch(&inputs, mask, &mut scratch, &mut out, &mut tally);
        }
        tally
    }
}

fn one_info(layout: &Layout, bits: &[bool]) -> OneInfo {
    let zero = bits[0];
    let one = bits[1];
    let k = layout.k as usize;
    let heads = bits[2 + 2 * k..].iter().filter(|&&b| b).count();
    OneInfo {
        r: decode_one_bits(layout, bits),
        illegal: (zero && one) || heads > 1,
    }
}

/// Player Two assignments exercising every decoding branch, paired with
/// Player One assignments that hit and miss the decoded clause.
pub fn corner_cases(layout: &Layout, m: &TMachine, w: &[Symbol]) -> Result<Vec<(Vec<bool>, Vec<bool>)>> {
    let delta = m.delta()?;
    let n1 = layout.player1().len();
    let n2 = layout.player2().len();
    let clauses = build_clauses(m, w, layout.k, DEFAULT_HORN_CAP)?;
    let accept = accept_clause(&delta, layout.k)?;
    let mut twos: Vec<Vec<bool>> = vec![vec![false; n2], vec![true; n2]];
    let base = encode_two(layout, &delta, &accept)?;
    twos.push(base.clone());
    // one clause per branch: initial facts, negative initial clauses, the
    // first positive and negative transition clause at each position
    let mut seen = HashSet::new();
    for c in &clauses {
        let last = c.head.or(c.body.last().copied()).expect("nonempty clause");
        if seen.insert((last.t == 0, last.l, c.is_negative())) {
            twos.push(encode_two(layout, &delta, c)?);
        }
    }
    let with = |bits: &Vec<bool>, f: &dyn Fn(&mut TwoView)| {
        let mut v = TwoView::from_bits(layout, bits);
        f(&mut v);
        v.to_bits(layout)
    };
    let transition = clauses
        .iter()
        .find(|c| c.body.iter().all(|p| p.t == 0) && !c.body.is_empty() && c.head.is_some_and(|h| h.t == 1))
        .map(|c| encode_two(layout, &delta, c))
        .transpose()?
        .unwrap_or_else(|| base.clone());
    // each illegal item on its own
    twos.push(with(&transition, &|v| {
        v.left.zero = true;
        v.left.one = true;
    }));
    twos.push(with(&transition, &|v| v.centre.states.iter_mut().for_each(|s| *s = true)));
    twos.push(with(&transition, &|v| {
        v.left.states[0] = true;
        v.right.states[0] = true;
    }));
    twos.push(vec![false; n2]);
    twos.push(with(&base, &|v| v.time = 0));
    twos.push(with(&base, &|v| v.negative = true));
    twos.push(with(&transition, &|v| v.negative = !v.negative));
    let props = enumerate_props(layout.k, layout.n_states, DEFAULT_HORN_CAP)?;
    let mut ones: Vec<Vec<bool>> = vec![vec![false; n1], vec![true; n1]];
    ones.push(encode_one(layout, &accept.head.expect("accept head")));
    ones.push(encode_one(layout, &props[0]));
    let mut clash = vec![false; n1];
    clash[0] = true;
    clash[1] = true;
    ones.push(clash);
    let mut out = Vec::new();
    for two in &twos {
        let decoded = decode_two_bits(layout, &delta, w, two);
        let mut these = ones.clone();
        these.extend(decoded.clause.body.iter().chain(decoded.clause.head.iter()).map(|p| encode_one(layout, p)));
        for one in these {
            out.push((two.clone(), one));
        }
    }
    Ok(out)
}

fn restriction_suite(
    red: &Reduction,
    m: &TMachine,
    w: &[Symbol],
    samples: &[(Vec<bool>, Vec<bool>)],
) -> Result<SuiteReport> {
    let delta = m.delta()?;
    let layout = &red.layout;
    let mut report = SuiteReport::new("restriction");
    let (p1, p2) = (layout.player1(), layout.player2());
    let folded: Vec<Formula> = red.subgames.iter().map(|s| s.game.goal.fold()).collect();
    for (two, one) in samples {
        let r = decode_one_bits(layout, one);
        let c = decode_two_bits(layout, &delta, w, two).clause;
        let want = guard_index(classify(&r, &c), c.arity());
        let values: HashMap<VarId, bool> = p2
            .iter()
            .cloned()
            .zip(two.iter().copied())
            .chain(p1.iter().cloned().zip(one.iter().copied()))
            .collect();
        let got = red.game.goal.restrict(&values);
        report.record(got == folded[want], || {
            format!("P2={} P1={}: restriction is not subgame {}", bits_string(two), bits_string(one), guard_name(want))
        });
    }
    Ok(report)
}

fn surjectivity_suite(layout: &Layout, m: &TMachine, w: &[Symbol]) -> Result<SuiteReport> {
    let delta = m.delta()?;
    let mut report = SuiteReport::new("surjectivity");
    for p in enumerate_props(layout.k, layout.n_states, DEFAULT_HORN_CAP)? {
        let back = decode_one_bits(layout, &encode_one(layout, &p));
        report.record(back == p, || format!("{p} decodes as {back}"));
    }
    let mut clauses = build_clauses(m, w, layout.k, DEFAULT_HORN_CAP)?;
    clauses.push(accept_clause(&delta, layout.k)?);
    for c in clauses {
        let back = decode_two_bits(layout, &delta, w, &encode_two(layout, &delta, &c)?).clause;
        report.record(back == c, || format!("{c:?} decodes as {back:?}"));
    }
    Ok(report)
}

fn value_suite(red: &Reduction, cap: u128) -> Result<Vec<ValueCheck>> {
    red.subgames
        .iter()
        .map(|s| {
            let value = match game_value(&s.game, cap) {
                Ok(v) => Some(v),
                Err(Error::CapExceeded { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok(ValueCheck {
                class: s.class,
                j: s.j,
                target: s.target.clone(),
                exact: value.as_ref() == Some(&s.target),
                value: value.as_ref().map(rational::to_canonical),
            })
        })
        .collect()
}

pub fn machine_sha256(m: &TMachine) -> String {
    hex::encode(Sha256::digest(m.to_json().as_bytes()))
}

/// Runs every suite and assembles the report.
pub fn verify_reduction(m: &TMachine, w: &[Symbol], opts: &VerifyOptions) -> Result<Report> {
    let delta = m.delta()?;
    let layout = Layout::new(opts.k, delta.n_states)?;
    let mut guards = GuardSet::new(&layout, &delta, w)?;
    if let Some((class, j)) = opts.mutate {
        let g = guards.guard(class, j).clone();
        guards.set_guard(class, j, Formula::not(g));
    }
    let red = compose(&layout, guards)?;
    let oracle = Oracle::new(&layout, m, w, &red.guards)?;
    let corners = corner_cases(&layout, m, w)?;
    let n_outer = layout.player1().len() + layout.player2().len();
    let (tally, restrict_samples) = match opts.mode {
        Mode::Exhaustive => {
            let required = 1u128 << n_outer;
            if required > opts.cap {
                return Err(Error::CapExceeded { required, cap: opts.cap });
            }
            // evenly spaced outer assignments, then the corners
            let step = (required / opts.restrictions.max(1) as u128).max(1);
            let mut picks: Vec<(Vec<bool>, Vec<bool>)> = (0..opts.restrictions as u128)
                .map(|i| split_index(&layout, (i * step + i) % required))
                .collect();
            picks.extend(corners.iter().cloned());
            (oracle.exhaustive(), picks)
        }
        Mode::Sampled => {
            let seed = opts
                .seed
                .ok_or_else(|| Error::Parse("sampled verification needs an explicit seed".into()))?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
            let (n1, n2) = (layout.player1().len(), layout.player2().len());
            let mut picks: Vec<(Vec<bool>, Vec<bool>)> = (0..opts.restrictions)
                .map(|_| ((0..n2).map(|_| rng.gen()).collect(), (0..n1).map(|_| rng.gen()).collect()))
                .collect();
            picks.extend(corners.iter().cloned());
            (oracle.sampled(seed, opts.samples, &corners), picks)
        }
    };
    let mut suites = vec![tally.decode, tally.partition, tally.membership];
    suites.push(surjectivity_suite(&layout, m, w)?);
    suites.push(restriction_suite(&red, m, w, &restrict_samples)?);
    suites.extend(tally.components);
    let conditional_values = if opts.values { value_suite(&red, opts.cap)? } else { Vec::new() };
    let guard_hits = red
        .guards
        .all()
        .iter()
        .map(|&(class, j, _)| GuardHits {
            class,
            j,
            hits: tally.hits[guard_index(class, j)],
        })
        .collect();
    // subgames beyond the cap are reported without a value and do not count
    let passed = suites.iter().all(SuiteReport::passed)
        && conditional_values.iter().all(|v| v.exact || v.value.is_none());
    Ok(Report {
        config: ReportConfig {
            machine_sha256: machine_sha256(m),
            word: w.iter().map(|s| s.as_char()).collect(),
            k: opts.k,
            mode: opts.mode,
            seed: opts.seed,
            samples: opts.samples,
            cap: u64::try_from(opts.cap).unwrap_or(u64::MAX),
            mutation: opts.mutate.map(|(c, j)| format!("negate {}{j}", c.name())),
        },
        suites,
        guard_hits,
        conditional_values,
        passed,
    })
}

/// Splits a full outer index (Player Two most significant) into bit lists.
fn split_index(layout: &Layout, index: u128) -> (Vec<bool>, Vec<bool>) {
    let n1 = layout.player1().len();
    let n2 = layout.player2().len();
    let bit = |i: usize| (index >> (n1 + n2 - 1 - i)) & 1 == 1;
    ((0..n2).map(bit).collect(), (n2..n2 + n1).map(bit).collect())
}
