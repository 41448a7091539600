//! Arithmetic and counting predicates over bit vectors, compiled into plain
//! propositional formulas with no auxiliary variables.
//!
//! All operands of one gadget must have the same width. Operands may mix
//! variables and constants; a constant bit behaves as a fixed input.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::logic::{Atom, BitVec, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GadgetKind {
    Numeral,
    Succ,
    Equal,
    Less,
    LessEq,
    Add,
    Sub,
    OneOf,
    NoneOf,
    MoreThanOneOf,
}

impl GadgetKind {
    pub const ALL: [GadgetKind; 10] = [
        GadgetKind::Numeral,
        GadgetKind::Succ,
        GadgetKind::Equal,
        GadgetKind::Less,
        GadgetKind::LessEq,
        GadgetKind::Add,
        GadgetKind::Sub,
        GadgetKind::OneOf,
        GadgetKind::NoneOf,
        GadgetKind::MoreThanOneOf,
    ];

    /// Number of bit-vector operands.
    pub fn arity(self) -> usize {
        match self {
            GadgetKind::Numeral | GadgetKind::OneOf | GadgetKind::NoneOf | GadgetKind::MoreThanOneOf => 1,
            GadgetKind::Succ | GadgetKind::Equal | GadgetKind::Less | GadgetKind::LessEq => 2,
            GadgetKind::Add | GadgetKind::Sub => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GadgetKind::Numeral => "numeral",
            GadgetKind::Succ => "succ",
            GadgetKind::Equal => "equal",
            GadgetKind::Less => "less",
            GadgetKind::LessEq => "less_eq",
            GadgetKind::Add => "add",
            GadgetKind::Sub => "sub",
            GadgetKind::OneOf => "one_of",
            GadgetKind::NoneOf => "none_of",
            GadgetKind::MoreThanOneOf => "more_than_one_of",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CountKind {
    OneOf,
    NoneOf,
    MoreThanOneOf,
}

fn same_width(p: &BitVec, q: &BitVec) -> Result<()> {
    if p.width() != q.width() {
        return Err(Error::WidthMismatch(p.width(), q.width()));
    }
    Ok(())
}

fn check_fits(j: u64, width: usize) -> Result<()> {
    if width < 64 && j >> width != 0 {
        return Err(Error::OutOfRange { value: j, width });
    }
    Ok(())
}

/// `j` as a constant-only bit vector of the given width.
pub fn numeral_consts(j: u64, width: usize) -> Result<BitVec> {
    check_fits(j, width)?;
    BitVec::new(
        (0..width)
            .map(|i| {
                let shift = width - 1 - i;
                Atom::Const(shift < 64 && (j >> shift) & 1 == 1)
            })
            .collect(),
    )
}

/// True iff the bit vector denotes `j`.
pub fn build_numeral(j: u64, p: &BitVec) -> Result<Formula> {
    let consts = numeral_consts(j, p.width())?;
    Ok(Formula::and(
        p.atoms()
            .iter()
            .zip(consts.atoms())
            .map(|(a, c)| a.literal(matches!(c, Atom::Const(true))))
            .collect(),
    ))
}

fn iff_atoms(a: &Atom, b: &Atom) -> Formula {
    match (a, b) {
        (Atom::Const(x), _) => b.literal(*x),
        (_, Atom::Const(y)) => a.literal(*y),
        _ => Formula::iff(a.formula(), b.formula()),
    }
}

fn prefix_equal(p: &BitVec, q: &BitVec, len: usize) -> Vec<Formula> {
    p.atoms()[..len]
        .iter()
        .zip(&q.atoms()[..len])
        .map(|(a, b)| iff_atoms(a, b))
        .collect()
}

pub fn build_equal(p: &BitVec, q: &BitVec) -> Result<Formula> {
    same_width(p, q)?;
    Ok(Formula::and(prefix_equal(p, q, p.width())))
}

/// True iff `p + 1 = q`. The all-ones value has no successor.
pub fn build_succ(p: &BitVec, q: &BitVec) -> Result<Formula> {
    same_width(p, q)?;
    let n = p.width();
    let (pa, qa) = (p.atoms(), q.atoms());
    // position k is the lowest zero of p: bits above it agree, it flips
    // 0 -> 1, and every lower bit flips 1 -> 0.
    let cases = (0..n)
        .map(|k| {
            let mut parts = prefix_equal(p, q, k);
            parts.push(pa[k].literal(false));
            parts.push(qa[k].literal(true));
            for i in k + 1..n {
                parts.push(pa[i].literal(true));
                parts.push(qa[i].literal(false));
            }
            Formula::and(parts)
        })
        .collect();
    Ok(Formula::or(cases))
}

/// True iff `p < q`: at the first differing position p has 0 and q has 1.
pub fn build_less(p: &BitVec, q: &BitVec) -> Result<Formula> {
    same_width(p, q)?;
    let (pa, qa) = (p.atoms(), q.atoms());
    let cases = (0..p.width())
        .map(|k| {
            let mut parts = prefix_equal(p, q, k);
            parts.push(pa[k].literal(false));
            parts.push(qa[k].literal(true));
            Formula::and(parts)
        })
        .collect();
    Ok(Formula::or(cases))
}

pub fn build_less_eq(p: &BitVec, q: &BitVec) -> Result<Formula> {
    Ok(Formula::or(vec![build_less(p, q)?, build_equal(p, q)?]))
}

/// True iff `p + q = r` over the naturals; a carry out of the top bit
/// falsifies the formula.
pub fn build_add(p: &BitVec, q: &BitVec, r: &BitVec) -> Result<Formula> {
    same_width(p, q)?;
    same_width(p, r)?;
    let n = p.width();
    let (pa, qa, ra) = (p.atoms(), q.atoms(), r.atoms());
    let mut parts = Vec::with_capacity(n + 1);
    // ripple from the least significant end; each carry formula embeds the
    // previous one once, so the whole gadget stays quadratic as a tree
    let mut carry: Option<Formula> = None;
    for i in (0..n).rev() {
        let same = iff_atoms(&pa[i], &qa[i]);
        let sum = match &carry {
            None => Formula::not(same),
            Some(c) => Formula::iff(same, c.clone()),
        };
        parts.push(Formula::iff(ra[i].formula(), sum));
        let generate = Formula::and(vec![pa[i].formula(), qa[i].formula()]);
        carry = Some(match carry {
            None => generate,
            Some(c) => Formula::or(vec![
                generate,
                Formula::and(vec![Formula::or(vec![pa[i].formula(), qa[i].formula()]), c]),
            ]),
        });
    }
    parts.push(Formula::not(carry.expect("width >= 1")));
    Ok(Formula::and(parts))
}

/// True iff `p - q = r` with a natural result, i.e. `q + r = p`.
pub fn build_sub(p: &BitVec, q: &BitVec, r: &BitVec) -> Result<Formula> {
    build_add(q, r, p)
}

pub fn build_counting(kind: CountKind, p: &BitVec) -> Formula {
    let atoms = p.atoms();
    let none = || Formula::and(atoms.iter().map(|a| a.literal(false)).collect());
    let one = || {
        Formula::or(
            (0..atoms.len())
                .map(|i| {
                    Formula::and(
                        atoms
                            .iter()
                            .enumerate()
                            .map(|(j, a)| a.literal(i == j))
                            .collect(),
                    )
                })
                .collect(),
        )
    };
    match kind {
        CountKind::NoneOf => none(),
        CountKind::OneOf => one(),
        CountKind::MoreThanOneOf => Formula::and(vec![Formula::not(one()), Formula::not(none())]),
    }
}

/// Builds a gadget by kind over fresh operands; used by the oracle suites.
/// `operands` must hold `kind.arity()` vectors; numerals take `j`.
pub fn build_gadget(kind: GadgetKind, operands: &[BitVec], j: u64) -> Result<Formula> {
    match kind {
        GadgetKind::Numeral => build_numeral(j, &operands[0]),
        GadgetKind::Succ => build_succ(&operands[0], &operands[1]),
        GadgetKind::Equal => build_equal(&operands[0], &operands[1]),
        GadgetKind::Less => build_less(&operands[0], &operands[1]),
        GadgetKind::LessEq => build_less_eq(&operands[0], &operands[1]),
        GadgetKind::Add => build_add(&operands[0], &operands[1], &operands[2]),
        GadgetKind::Sub => build_sub(&operands[0], &operands[1], &operands[2]),
        GadgetKind::OneOf => Ok(build_counting(CountKind::OneOf, &operands[0])),
        GadgetKind::NoneOf => Ok(build_counting(CountKind::NoneOf, &operands[0])),
        GadgetKind::MoreThanOneOf => Ok(build_counting(CountKind::MoreThanOneOf, &operands[0])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::{eval, Assignment, VarId};

    fn vec_of(prefix: &str, n: usize) -> (BitVec, Vec<VarId>) {
        let vars: Vec<VarId> = (0..n).map(|i| VarId::new(format!("{prefix}{i}"))).collect();
        (BitVec::from_vars(&vars).unwrap(), vars)
    }

    fn bits(vars: &[VarId], value: u64) -> Assignment {
        Assignment::from_index(vars.to_vec(), value).unwrap()
    }

    fn pair(vars_p: &[VarId], p: u64, vars_q: &[VarId], q: u64) -> Assignment {
        bits(vars_p, p).union(&bits(vars_q, q)).unwrap()
    }

    #[test]
    fn numeral_consts_examples() {
        let c = |j, n| {
            numeral_consts(j, n)
                .unwrap()
                .atoms()
                .iter()
                .map(|a| matches!(a, Atom::Const(true)))
                .collect::<Vec<_>>()
        };
        assert_eq!(c(3, 3), [false, true, true]);
        assert_eq!(c(0, 4), [false; 4]);
        assert_eq!(c(5, 3), [true, false, true]);
        assert_eq!(numeral_consts(8, 3), Err(Error::OutOfRange { value: 8, width: 3 }));
    }

    #[test]
    fn numeral_small_cases() {
        let (p, vars) = vec_of("p", 2);
        let f = build_numeral(0, &p).unwrap();
        assert!(eval(&f, &bits(&vars, 0)).unwrap());
        assert!(!eval(&f, &bits(&vars, 1)).unwrap());
        assert!(build_numeral(4, &p).is_err());
    }

    #[test]
    fn succ_small_cases() {
        let (p, vp) = vec_of("p", 2);
        let (q, vq) = vec_of("q", 2);
        let f = build_succ(&p, &q).unwrap();
        assert!(eval(&f, &pair(&vp, 1, &vq, 2)).unwrap());
        for qv in 0..4 {
            assert!(!eval(&f, &pair(&vp, 3, &vq, qv)).unwrap());
        }
    }

    #[test]
    fn equal_and_order_small_cases() {
        let (p, vp) = vec_of("p", 3);
        let (q, vq) = vec_of("q", 3);
        assert!(eval(&build_equal(&p, &q).unwrap(), &pair(&vp, 5, &vq, 5)).unwrap());
        let (p2, vp2) = vec_of("a", 2);
        let (q2, vq2) = vec_of("b", 2);
        assert!(!eval(&build_equal(&p2, &q2).unwrap(), &pair(&vp2, 2, &vq2, 1)).unwrap());

        let two = numeral_consts(2, 3).unwrap();
        let three = numeral_consts(3, 3).unwrap();
        let empty = Assignment::all_false(vec![]).unwrap();
        assert!(eval(&build_less(&two, &three).unwrap(), &empty).unwrap());
        assert!(!eval(&build_less(&p, &p).unwrap(), &bits(&vp, 6)).unwrap());
        assert!(eval(&build_less_eq(&p, &p).unwrap(), &bits(&vp, 6)).unwrap());
        let c3 = numeral_consts(3, 2).unwrap();
        let c1 = numeral_consts(1, 2).unwrap();
        assert!(!eval(&build_less_eq(&c3, &c1).unwrap(), &empty).unwrap());
    }

    #[test]
    fn add_sub_small_cases() {
        let empty = Assignment::all_false(vec![]).unwrap();
        let k = |j, n| numeral_consts(j, n).unwrap();
        assert!(eval(&build_add(&k(1, 3), &k(2, 3), &k(3, 3)).unwrap(), &empty).unwrap());
        assert!(!eval(&build_add(&k(3, 2), &k(3, 2), &k(2, 2)).unwrap(), &empty).unwrap());
        assert!(eval(&build_sub(&k(3, 2), &k(1, 2), &k(2, 2)).unwrap(), &empty).unwrap());
        for r in 0..4 {
            assert!(!eval(&build_sub(&k(1, 2), &k(2, 2), &k(r, 2)).unwrap(), &empty).unwrap());
        }
    }

    #[test]
    fn width_mismatch_rejected() {
        let (p, _) = vec_of("p", 2);
        let (q, _) = vec_of("q", 3);
        assert_eq!(build_equal(&p, &q), Err(Error::WidthMismatch(2, 3)));
        assert!(build_succ(&p, &q).is_err());
        assert!(build_less(&p, &q).is_err());
        assert!(build_add(&p, &p, &q).is_err());
        assert!(build_sub(&q, &p, &p).is_err());
    }

    #[test]
    fn counting_small_cases() {
        let (p, vars) = vec_of("p", 4);
        assert!(eval(&build_counting(CountKind::NoneOf, &p), &bits(&vars, 0)).unwrap());
        assert!(eval(&build_counting(CountKind::OneOf, &p), &bits(&vars, 0b0100)).unwrap());
        assert!(eval(&build_counting(CountKind::MoreThanOneOf, &p), &bits(&vars, 0b0110)).unwrap());
    }
}
