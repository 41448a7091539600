//! Integer-arithmetic oracles for the gadgets and a size table.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gadgets::{build_gadget, GadgetKind};
use crate::logic::{eval, formula_size, Assignment, BitVec, VarId};

/// The predicate a gadget is meant to compute, on operand values.
pub fn gadget_predicate(kind: GadgetKind, vals: &[u64], j: u64) -> bool {
    match kind {
        GadgetKind::Numeral => vals[0] == j,
        GadgetKind::Succ => vals[0] + 1 == vals[1],
        GadgetKind::Equal => vals[0] == vals[1],
        GadgetKind::Less => vals[0] < vals[1],
        GadgetKind::LessEq => vals[0] <= vals[1],
        GadgetKind::Add => vals[0] + vals[1] == vals[2],
        GadgetKind::Sub => vals[0] >= vals[1] && vals[0] - vals[1] == vals[2],
        GadgetKind::OneOf => vals[0].count_ones() == 1,
        GadgetKind::NoneOf => vals[0] == 0,
        GadgetKind::MoreThanOneOf => vals[0].count_ones() > 1,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetCheck {
    pub kind: GadgetKind,
    pub width: usize,
    pub assignments: u64,
    pub mismatches: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRow {
    pub kind: GadgetKind,
    pub width: usize,
    pub size: u64,
}

fn operands(kind: GadgetKind, width: usize) -> (Vec<BitVec>, Vec<VarId>) {
    let mut vars = Vec::new();
    let mut vecs = Vec::new();
    for op in 0..kind.arity() {
        let vs: Vec<VarId> = (0..width).map(|b| VarId::new(format!("x{op}.{b}"))).collect();
        vecs.push(BitVec::from_vars(&vs).expect("distinct names"));
        vars.extend(vs);
    }
    (vecs, vars)
}

/// Every operand assignment at `width` (and, for numerals, every `j`).
pub fn check_gadget(kind: GadgetKind, width: usize) -> Result<GadgetCheck> {
    let (vecs, vars) = operands(kind, width);
    let total_bits = vars.len();
    let js: Vec<u64> = if kind == GadgetKind::Numeral { (0..1u64 << width).collect() } else { vec![0] };
    let mut assignments = 0;
    let mut mismatches = 0;
    for &j in &js {
        let f = build_gadget(kind, &vecs, j)?;
        for index in 0..1u64 << total_bits {
            let a = Assignment::from_index(vars.clone(), index)?;
            let vals: Vec<u64> = (0..kind.arity())
                .map(|op| {
                    let shift = (kind.arity() - 1 - op) * width;
                    (index >> shift) & ((1 << width) - 1)
                })
                .collect();
            assignments += 1;
            if eval(&f, &a)? != gadget_predicate(kind, &vals, j) {
                mismatches += 1;
            }
        }
    }
    Ok(GadgetCheck {
        kind,
        width,
        assignments,
        mismatches,
    })
}

/// All gadgets at widths `1..=max_width`.
pub fn check_all(max_width: usize) -> Result<Vec<GadgetCheck>> {
    let mut out = Vec::new();
    for kind in GadgetKind::ALL {
        for width in 1..=max_width {
            out.push(check_gadget(kind, width)?);
        }
    }
    Ok(out)
}

/// Tree sizes of each gadget over fresh operands.
pub fn size_table(widths: &[usize]) -> Result<Vec<SizeRow>> {
    let mut out = Vec::new();
    for kind in GadgetKind::ALL {
        for &width in widths {
            let (vecs, _) = operands(kind, width);
            let j = if width >= 64 { u64::MAX } else { (1u64 << width) - 1 };
            let f = build_gadget(kind, &vecs, j)?;
            out.push(SizeRow {
                kind,
                width,
                size: formula_size(&f),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn widths_one_and_two_agree() {
        for c in check_all(2).unwrap() {
            assert_eq!(c.mismatches, 0, "{c:?}");
        }
    }

    #[test]
    fn predicate_examples() {
        assert!(gadget_predicate(GadgetKind::Sub, &[5, 3, 2], 0));
        assert!(!gadget_predicate(GadgetKind::Sub, &[3, 5, 0], 0));
        assert!(gadget_predicate(GadgetKind::MoreThanOneOf, &[0b101], 0));
    }
}
