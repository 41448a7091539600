//! Bit-parallel formula evaluation.
//!
//! A [`Program`] is a hash-consed, topologically ordered straight-line form of
//! one or more formulas. Each input is a 64-bit word holding the value of one
//! variable in 64 independent assignments ("lanes"), so one pass evaluates 64
//! assignments at once.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::logic::{Formula, Node, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Const(bool),
    Input(u32),
    Not(u32),
    And { start: u32, len: u32 },
    Or { start: u32, len: u32 },
    Implies(u32, u32),
    Iff(u32, u32),
}

#[derive(PartialEq, Eq, Hash)]
enum Key {
    Const(bool),
    Input(u32),
    Not(u32),
    And(Vec<u32>),
    Or(Vec<u32>),
    Implies(u32, u32),
    Iff(u32, u32),
}

#[derive(Clone, Debug)]
pub struct Program {
    ops: Vec<Op>,
    args: Vec<u32>,
    outputs: Vec<u32>,
    inputs: usize,
}

struct Builder<'a> {
    slots: &'a HashMap<VarId, usize>,
    ops: Vec<Op>,
    args: Vec<u32>,
    by_ptr: HashMap<*const Node, u32>,
    by_key: HashMap<Key, u32>,
}

impl Builder<'_> {
    fn intern(&mut self, key: Key) -> u32 {
        if let Some(&id) = self.by_key.get(&key) {
            return id;
        }
        let op = match &key {
            Key::Const(b) => Op::Const(*b),
            Key::Input(i) => Op::Input(*i),
            Key::Not(x) => Op::Not(*x),
            Key::And(xs) | Key::Or(xs) => {
                let start = self.args.len() as u32;
                self.args.extend_from_slice(xs);
                let len = xs.len() as u32;
                if matches!(key, Key::And(_)) {
                    Op::And { start, len }
                } else {
                    Op::Or { start, len }
                }
            }
            Key::Implies(a, b) => Op::Implies(*a, *b),
            Key::Iff(a, b) => Op::Iff(*a, *b),
        };
        let id = self.ops.len() as u32;
        self.ops.push(op);
        self.by_key.insert(key, id);
        id
    }

    fn visit(&mut self, f: &Formula) -> Result<u32> {
        if let Some(&id) = self.by_ptr.get(&f.ptr()) {
            return Ok(id);
        }
        let key = match f.node() {
            Node::Const(b) => Key::Const(*b),
            Node::Var(v) => {
                let slot = self
                    .slots
                    .get(v)
                    .ok_or_else(|| Error::UndeclaredVariable(v.clone()))?;
                Key::Input(*slot as u32)
            }
            Node::Not(x) => Key::Not(self.visit(x)?),
            Node::And(xs) => Key::And(xs.iter().map(|x| self.visit(x)).collect::<Result<_>>()?),
            Node::Or(xs) => Key::Or(xs.iter().map(|x| self.visit(x)).collect::<Result<_>>()?),
            Node::Implies(a, b) => Key::Implies(self.visit(a)?, self.visit(b)?),
            Node::Iff(a, b) => Key::Iff(self.visit(a)?, self.visit(b)?),
        };
        let id = self.intern(key);
        self.by_ptr.insert(f.ptr(), id);
        Ok(id)
    }
}

impl Program {
    /// Compiles `formulas` against a variable-to-input-slot map. Every
    /// variable must have a slot.
    pub fn compile(formulas: &[Formula], slots: &HashMap<VarId, usize>) -> Result<Program> {
        let mut b = Builder {
            slots,
            ops: Vec::new(),
            args: Vec::new(),
            by_ptr: HashMap::new(),
            by_key: HashMap::new(),
        };
        let outputs = formulas
            .iter()
            .map(|f| b.visit(f))
            .collect::<Result<Vec<_>>>()?;
        let inputs = slots.values().copied().max().map_or(0, |m| m + 1);
        Ok(Program {
            ops: b.ops,
            args: b.args,
            outputs,
            inputs,
        })
    }

    /// Compiles against `order`, slot `i` holding `order[i]`.
    pub fn compile_ordered(formulas: &[Formula], order: &[VarId]) -> Result<Program> {
        let slots = order
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i))
            .collect();
        Program::compile(formulas, &slots)
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn scratch(&self) -> Vec<u64> {
        vec![0; self.ops.len()]
    }

    /// Evaluates all lanes; `out[i]` receives output `i`.
    pub fn eval(&self, inputs: &[u64], scratch: &mut [u64], out: &mut [u64]) {
        debug_assert!(inputs.len() >= self.inputs);
        for (i, op) in self.ops.iter().enumerate() {
            let v = match *op {
                Op::Const(b) => {
                    if b {
                        !0
                    } else {
                        0
                    }
                }
                Op::Input(s) => inputs[s as usize],
                Op::Not(x) => !scratch[x as usize],
                Op::And { start, len } => self.args[start as usize..(start + len) as usize]
                    .iter()
                    .fold(!0u64, |acc, &x| acc & scratch[x as usize]),
                Op::Or { start, len } => self.args[start as usize..(start + len) as usize]
                    .iter()
                    .fold(0u64, |acc, &x| acc | scratch[x as usize]),
                Op::Implies(a, b) => !scratch[a as usize] | scratch[b as usize],
                Op::Iff(a, b) => !(scratch[a as usize] ^ scratch[b as usize]),
            };
            scratch[i] = v;
        }
        for (o, &id) in out.iter_mut().zip(&self.outputs) {
            *o = scratch[id as usize];
        }
    }

    pub fn eval_single(&self, inputs: &[bool]) -> Vec<bool> {
        let words: Vec<u64> = inputs.iter().map(|&b| if b { !0 } else { 0 }).collect();
        let mut scratch = self.scratch();
        let mut out = vec![0; self.outputs.len()];
        self.eval(&words, &mut scratch, &mut out);
        out.into_iter().map(|w| w & 1 == 1).collect()
    }
}

const LANE_PATTERNS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Enumeration of all assignments to `n` ordered variables (first variable
/// most significant), packed 64 per word: assignment `c` lives in word
/// `c / 64`, lane `c % 64`.
#[derive(Clone, Copy, Debug)]
pub struct LaneLayout {
    vars: usize,
}

impl LaneLayout {
    pub fn new(vars: usize) -> Self {
        LaneLayout { vars }
    }

    pub fn words(&self) -> u64 {
        if self.vars <= 6 {
            1
        } else {
            1u64 << (self.vars - 6)
        }
    }

    /// Lanes that hold a real assignment.
    pub fn mask(&self) -> u64 {
        if self.vars >= 6 {
            !0
        } else {
            (1u64 << (1u32 << self.vars)) - 1
        }
    }

    pub fn fill(&self, word: u64, inputs: &mut [u64]) {
        for (v, slot) in inputs.iter_mut().take(self.vars).enumerate() {
            let bit = self.vars - 1 - v;
            *slot = if bit < 6 {
                LANE_PATTERNS[bit]
            } else if (word >> (bit - 6)) & 1 == 1 {
                !0
            } else {
                0
            };
        }
    }
}
