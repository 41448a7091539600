//! Propositional formulas over named variables, total assignments, and the
//! big-endian reading of variable sequences as naturals.
//!
//! Formulas are immutable and reference counted, so subformulas can be shared
//! freely between larger formulas. Traversals that would otherwise revisit a
//! shared subterm many times memoize on node identity.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A propositional variable, identified by its name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: impl AsRef<str>) -> Self {
        VarId(Arc::from(name.as_ref()))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    pub fn prefixed(&self, prefix: &str) -> VarId {
        VarId::new(format!("{prefix}{}", self.0))
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarId {
    fn from(s: &str) -> Self {
        VarId::new(s)
    }
}

/// One position of a [`BitVec`]: either a variable or a fixed truth value.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Atom {
    Var(VarId),
    Const(bool),
}

impl Atom {
    pub fn formula(&self) -> Formula {
        match self {
            Atom::Var(v) => Formula::var(v.clone()),
            Atom::Const(b) => Formula::constant(*b),
        }
    }

    /// The atom as a literal of the given polarity, folding constants.
    pub fn literal(&self, positive: bool) -> Formula {
        match self {
            Atom::Var(v) if positive => Formula::var(v.clone()),
            Atom::Var(v) => Formula::not(Formula::var(v.clone())),
            Atom::Const(b) => Formula::constant(*b == positive),
        }
    }
}

#[derive(Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Const(bool),
    Var(VarId),
    Not(Formula),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Formula, Formula),
    Iff(Formula, Formula),
}

/// A shared, immutable propositional formula.
#[derive(Clone, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Formula(Arc<Node>);

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(b) => write!(f, "{b}"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Not(x) => write!(f, "!{x:?}"),
            Node::And(xs) => write_list(f, "&", xs),
            Node::Or(xs) => write_list(f, "|", xs),
            Node::Implies(a, b) => write!(f, "({a:?} -> {b:?})"),
            Node::Iff(a, b) => write!(f, "({a:?} <-> {b:?})"),
        }
    }
}

fn write_list(f: &mut fmt::Formatter<'_>, op: &str, xs: &[Formula]) -> fmt::Result {
    if xs.is_empty() {
        return write!(f, "{}", op == "&");
    }
    write!(f, "(")?;
    for (i, x) in xs.iter().enumerate() {
        if i > 0 {
            write!(f, " {op} ")?;
        }
        write!(f, "{x:?}")?;
    }
    write!(f, ")")
}

impl Formula {
    pub fn from_node(node: Node) -> Self {
        Formula(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(b: bool) -> Self {
        Formula::from_node(Node::Const(b))
    }

    pub fn truth() -> Self {
        Formula::constant(true)
    }

    pub fn falsity() -> Self {
        Formula::constant(false)
    }

    pub fn var(v: impl Into<VarId>) -> Self {
        Formula::from_node(Node::Var(v.into()))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::from_node(Node::Not(f))
    }

    pub fn and(fs: Vec<Formula>) -> Self {
        Formula::from_node(Node::And(fs))
    }

    pub fn or(fs: Vec<Formula>) -> Self {
        Formula::from_node(Node::Or(fs))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::from_node(Node::Implies(a, b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::from_node(Node::Iff(a, b))
    }

    pub fn as_const(&self) -> Option<bool> {
        match self.node() {
            Node::Const(b) => Some(*b),
            _ => None,
        }
    }

    pub(crate) fn ptr(&self) -> *const Node {
        Arc::as_ptr(&self.0)
    }

    /// Substitutes the given values and folds constants. Unassigned variables
    /// are kept; sharing of subterms is preserved.
    pub fn restrict(&self, values: &HashMap<VarId, bool>) -> Formula {
        let mut memo = HashMap::new();
        restrict_rec(self, values, &mut memo)
    }

    /// Constant folding alone.
    pub fn fold(&self) -> Formula {
        self.restrict(&HashMap::new())
    }

    /// Renames every variable through `f`.
    pub fn rename(&self, f: &dyn Fn(&VarId) -> VarId) -> Formula {
        let mut memo = HashMap::new();
        rename_rec(self, f, &mut memo)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("formula serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Formula> {
        parse_deep(text)
    }
}

/// Parses JSON without serde_json's recursion limit; deep carry chains in
/// arithmetic gadgets exceed the default of 128.
pub(crate) fn parse_deep<T: serde::de::DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    de.disable_recursion_limit();
    let value = T::deserialize(&mut de).map_err(|e| Error::Parse(e.to_string()))?;
    de.end().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(value)
}

fn restrict_rec(
    f: &Formula,
    values: &HashMap<VarId, bool>,
    memo: &mut HashMap<*const Node, Formula>,
) -> Formula {
    if let Some(done) = memo.get(&f.ptr()) {
        return done.clone();
    }
    let out = match f.node() {
        Node::Const(_) => f.clone(),
        Node::Var(v) => match values.get(v) {
            Some(b) => Formula::constant(*b),
            None => f.clone(),
        },
        Node::Not(x) => {
            let x = restrict_rec(x, values, memo);
            match x.as_const() {
                Some(b) => Formula::constant(!b),
                None => Formula::not(x),
            }
        }
        Node::And(xs) | Node::Or(xs) => {
            let is_and = matches!(f.node(), Node::And(_));
            let mut kept = Vec::with_capacity(xs.len());
            let mut absorbed = false;
            for x in xs {
                let x = restrict_rec(x, values, memo);
                match x.as_const() {
                    Some(b) if b == is_and => {}
                    Some(_) => {
                        absorbed = true;
                        break;
                    }
                    None => kept.push(x),
                }
            }
            if absorbed {
                Formula::constant(!is_and)
            } else if kept.is_empty() {
                Formula::constant(is_and)
            } else if kept.len() == 1 {
                kept.pop().unwrap()
            } else if is_and {
                Formula::and(kept)
            } else {
                Formula::or(kept)
            }
        }
        Node::Implies(a, b) => {
            let a = restrict_rec(a, values, memo);
            let b = restrict_rec(b, values, memo);
            match (a.as_const(), b.as_const()) {
                (Some(false), _) | (_, Some(true)) => Formula::truth(),
                (Some(true), _) => b,
                (_, Some(false)) => Formula::not(a),
                _ => Formula::implies(a, b),
            }
        }
        Node::Iff(a, b) => {
            let a = restrict_rec(a, values, memo);
            let b = restrict_rec(b, values, memo);
            match (a.as_const(), b.as_const()) {
                (Some(x), Some(y)) => Formula::constant(x == y),
                (Some(true), _) => b,
                (_, Some(true)) => a,
                (Some(false), _) => Formula::not(b),
                (_, Some(false)) => Formula::not(a),
                _ => Formula::iff(a, b),
            }
        }
    };
    memo.insert(f.ptr(), out.clone());
    out
}

fn rename_rec(
    f: &Formula,
    rn: &dyn Fn(&VarId) -> VarId,
    memo: &mut HashMap<*const Node, Formula>,
) -> Formula {
    if let Some(done) = memo.get(&f.ptr()) {
        return done.clone();
    }
    let out = match f.node() {
        Node::Const(_) => f.clone(),
        Node::Var(v) => Formula::var(rn(v)),
        Node::Not(x) => Formula::not(rename_rec(x, rn, memo)),
        Node::And(xs) => Formula::and(xs.iter().map(|x| rename_rec(x, rn, memo)).collect()),
        Node::Or(xs) => Formula::or(xs.iter().map(|x| rename_rec(x, rn, memo)).collect()),
        Node::Implies(a, b) => Formula::implies(rename_rec(a, rn, memo), rename_rec(b, rn, memo)),
        Node::Iff(a, b) => Formula::iff(rename_rec(a, rn, memo), rename_rec(b, rn, memo)),
    };
    memo.insert(f.ptr(), out.clone());
    out
}

/// A total truth assignment over a declared, ordered universe.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Assignment {
    universe: Vec<VarId>,
    values: HashMap<VarId, bool>,
}

impl Assignment {
    pub fn new(universe: Vec<VarId>, values: Vec<bool>) -> Result<Self> {
        if universe.len() != values.len() {
            return Err(Error::WidthMismatch(universe.len(), values.len()));
        }
        let mut map = HashMap::with_capacity(universe.len());
        for (v, b) in universe.iter().zip(values) {
            if map.insert(v.clone(), b).is_some() {
                return Err(Error::DuplicateVariable(v.clone()));
            }
        }
        Ok(Assignment {
            universe,
            values: map,
        })
    }

    pub fn all_false(universe: Vec<VarId>) -> Result<Self> {
        let n = universe.len();
        Assignment::new(universe, vec![false; n])
    }

    /// The `index`-th assignment in lexicographic order, first variable most
    /// significant and false before true.
    pub fn from_index(universe: Vec<VarId>, index: u64) -> Result<Self> {
        let n = universe.len();
        let bits = (0..n).map(|i| (index >> (n - 1 - i)) & 1 == 1).collect();
        Assignment::new(universe, bits)
    }

    pub fn universe(&self) -> &[VarId] {
        &self.universe
    }

    pub fn get(&self, v: &VarId) -> Result<bool> {
        self.values
            .get(v)
            .copied()
            .ok_or_else(|| Error::UndeclaredVariable(v.clone()))
    }

    pub fn set(&mut self, v: &VarId, b: bool) -> Result<()> {
        match self.values.get_mut(v) {
            Some(slot) => {
                *slot = b;
                Ok(())
            }
            None => Err(Error::UndeclaredVariable(v.clone())),
        }
    }

    /// Values in universe order.
    pub fn bits(&self) -> Vec<bool> {
        self.universe.iter().map(|v| self.values[v]).collect()
    }

    pub fn union(&self, other: &Assignment) -> Result<Assignment> {
        let mut universe = self.universe.clone();
        universe.extend(other.universe.iter().cloned());
        let mut bits = self.bits();
        bits.extend(other.bits());
        Assignment::new(universe, bits)
    }

    pub fn as_map(&self) -> &HashMap<VarId, bool> {
        &self.values
    }
}

pub fn eval(f: &Formula, a: &Assignment) -> Result<bool> {
    Ok(match f.node() {
        Node::Const(b) => *b,
        Node::Var(v) => a.get(v)?,
        Node::Not(x) => !eval(x, a)?,
        Node::And(xs) => {
            for x in xs {
                if !eval(x, a)? {
                    return Ok(false);
                }
            }
            true
        }
        Node::Or(xs) => {
            for x in xs {
                if eval(x, a)? {
                    return Ok(true);
                }
            }
            false
        }
        Node::Implies(p, q) => !eval(p, a)? || eval(q, a)?,
        Node::Iff(p, q) => eval(p, a)? == eval(q, a)?,
    })
}

pub fn free_vars(f: &Formula) -> BTreeSet<VarId> {
    let mut out = BTreeSet::new();
    let mut seen = HashSet::new();
    let mut stack = vec![f.clone()];
    while let Some(g) = stack.pop() {
        if !seen.insert(g.ptr()) {
            continue;
        }
        match g.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.clone());
            }
            Node::Not(x) => stack.push(x.clone()),
            Node::And(xs) | Node::Or(xs) => stack.extend(xs.iter().cloned()),
            Node::Implies(a, b) | Node::Iff(a, b) => {
                stack.push(a.clone());
                stack.push(b.clone());
            }
        }
    }
    out
}

/// Number of nodes in the formula read as a tree: shared subterms count once
/// per occurrence.
pub fn formula_size(f: &Formula) -> u64 {
    fn go(f: &Formula, memo: &mut HashMap<*const Node, u64>) -> u64 {
        if let Some(&n) = memo.get(&f.ptr()) {
            return n;
        }
        let n = 1 + match f.node() {
            Node::Const(_) | Node::Var(_) => 0,
            Node::Not(x) => go(x, memo),
            Node::And(xs) | Node::Or(xs) => xs
                .iter()
                .fold(0u64, |acc, x| acc.saturating_add(go(x, memo))),
            Node::Implies(a, b) | Node::Iff(a, b) => go(a, memo).saturating_add(go(b, memo)),
        };
        memo.insert(f.ptr(), n);
        n
    }
    go(f, &mut HashMap::new())
}

/// An ordered sequence of atoms read as a big-endian natural: position 0 is
/// the most significant bit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitVec {
    atoms: Vec<Atom>,
}

impl BitVec {
    pub fn new(atoms: Vec<Atom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptyBitVec);
        }
        let mut seen = HashSet::new();
        for a in &atoms {
            if let Atom::Var(v) = a {
                if !seen.insert(v.clone()) {
                    return Err(Error::DuplicateVariable(v.clone()));
                }
            }
        }
        Ok(BitVec { atoms })
    }

    pub fn from_vars(vars: &[VarId]) -> Result<Self> {
        BitVec::new(vars.iter().cloned().map(Atom::Var).collect())
    }

    pub fn width(&self) -> usize {
        self.atoms.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn vars(&self) -> Vec<VarId> {
        self.atoms
            .iter()
            .filter_map(|a| match a {
                Atom::Var(v) => Some(v.clone()),
                Atom::Const(_) => None,
            })
            .collect()
    }
}

pub fn denote(v: &BitVec, a: &Assignment) -> Result<u64> {
    if v.width() > 64 {
        return Err(Error::TooWide(v.width()));
    }
    let mut n = 0u64;
    for atom in v.atoms() {
        let bit = match atom {
            Atom::Var(x) => a.get(x)?,
            Atom::Const(b) => *b,
        };
        n = (n << 1) | bit as u64;
    }
    Ok(n)
}
