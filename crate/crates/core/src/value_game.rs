//! Boolean games with a prescribed rational value `a/b`.
//!
//! Player One names two numbers `c1 = [p]` and `c2 = [q]` (with witnesses
//! `s`, `t` for intervals that wrap around), Player Two names `d = [r]`, and
//! Player One wins when `d` falls inside the chosen interval or outside the
//! legal range.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gadgets::{build_add, build_less, build_less_eq, build_numeral, build_sub, numeral_consts};
use crate::game::BooleanGame;
use crate::logic::{BitVec, Formula, VarId};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Closed intervals over `[0, b]`. Straight intervals cover `a + 1` of the
    /// `b + 1` points and wrapping ones `a + 2`, so the value exceeds `a/b`.
    PaperExact,
    /// Half-open intervals over the points `1..=b`; the value is exactly `a/b`.
    #[default]
    Calibrated,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::PaperExact => "paper_exact",
            Variant::Calibrated => "calibrated",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper_exact" => Ok(Variant::PaperExact),
            "calibrated" => Ok(Variant::Calibrated),
            other => Err(Error::Parse(format!("unknown variant `{other}`"))),
        }
    }
}

/// Least `n` with `2^n >= b + 1`.
pub fn width_for(b: u64) -> usize {
    (64 - b.leading_zeros()) as usize
}

fn block(prefix: &str, name: &str, n: usize) -> Vec<VarId> {
    (1..=n).map(|i| VarId::new(format!("{prefix}{name}{i}"))).collect()
}

/// The value game for `a/b` with every variable name prefixed by `prefix`.
pub fn build_prefixed(a: u64, b: u64, variant: Variant, prefix: &str) -> Result<BooleanGame> {
    if b == 0 || a > b {
        return Err(Error::BadFraction(format!("{a}/{b}")));
    }
    let n = width_for(b);
    let [p, q, s, t, r] = ["p", "q", "s", "t", "r"].map(|x| block(prefix, x, n));
    let bv = |vs: &[VarId]| BitVec::from_vars(vs).expect("fresh distinct names");
    let (pv, qv, sv, tv, rv) = (bv(&p), bv(&q), bv(&s), bv(&t), bv(&r));
    let ka = numeral_consts(a, n)?;
    let kb = numeral_consts(b, n)?;
    let k0 = numeral_consts(0, n)?;

    // `d` above the lower endpoint: strict for the calibrated variant
    let above_low = match variant {
        Variant::Calibrated => build_less(&pv, &rv)?,
        Variant::PaperExact => build_less_eq(&pv, &rv)?,
    };
    let straight = Formula::and(vec![
        build_sub(&qv, &pv, &ka)?,
        build_less_eq(&qv, &kb)?,
        build_less_eq(&rv, &qv)?,
        above_low.clone(),
    ]);
    let looping = Formula::and(vec![
        build_add(&sv, &tv, &ka)?,
        build_sub(&qv, &k0, &sv)?,
        build_sub(&kb, &pv, &tv)?,
        Formula::or(vec![build_less_eq(&rv, &qv)?, above_low]),
    ]);
    let mut disjuncts = vec![straight, looping, build_less(&kb, &rv)?];
    if variant == Variant::Calibrated {
        disjuncts.push(build_numeral(0, &rv)?);
    }
    let player1 = [p, q, s, t].concat();
    Ok(BooleanGame::new(player1, r, Formula::or(disjuncts)))
}

pub fn build_value_game(a: u64, b: u64, variant: Variant) -> Result<BooleanGame> {
    build_prefixed(a, b, variant, "")
}

/// Hands out value games whose variables are disjoint from everything
/// registered so far.
#[derive(Clone, Debug, Default)]
pub struct NameRegistry {
    taken: HashSet<VarId>,
}

impl NameRegistry {
    pub fn new() -> Self {
        NameRegistry::default()
    }

    /// Claims `vars`, failing on the first name already in use.
    pub fn reserve<'a>(&mut self, vars: impl IntoIterator<Item = &'a VarId>) -> Result<()> {
        let vars: Vec<&VarId> = vars.into_iter().collect();
        let mut batch = HashSet::new();
        for v in &vars {
            if self.taken.contains(*v) || !batch.insert(*v) {
                return Err(Error::PrefixCollision((*v).clone()));
            }
        }
        self.taken.extend(vars.into_iter().cloned());
        Ok(())
    }

    pub fn contains(&self, v: &VarId) -> bool {
        self.taken.contains(v)
    }

    pub fn fresh_value_subgame(&mut self, a: u64, b: u64, variant: Variant, prefix: &str) -> Result<BooleanGame> {
        let g = build_prefixed(a, b, variant, prefix)?;
        self.reserve(&g.universe)?;
        Ok(g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::DEFAULT_CAP;
    use crate::logic::free_vars;
    use crate::rational::rat;
    use crate::solver::game_value;

    #[test]
    fn widths() {
        assert_eq!(width_for(1), 1);
        assert_eq!(width_for(2), 2);
        assert_eq!(width_for(3), 2);
        assert_eq!(width_for(4), 3);
        assert_eq!(width_for(16), 5);
    }

    #[test]
    fn small_values() {
        for (a, b) in [(0, 1), (1, 1), (1, 2), (0, 3), (2, 3), (3, 3)] {
            let g = build_value_game(a, b, Variant::Calibrated).unwrap();
            assert!(g.validate().is_ok());
            assert_eq!(g.var_count(), 5 * width_for(b));
            assert_eq!(game_value(&g, DEFAULT_CAP).unwrap(), rat(a as i64, b as i64), "{a}/{b}");
        }
    }

    #[test]
    fn paper_exact_overshoots() {
        let g = build_value_game(1, 2, Variant::PaperExact).unwrap();
        assert_eq!(game_value(&g, DEFAULT_CAP).unwrap(), rat(1, 1));
        let g = build_value_game(1, 4, Variant::PaperExact).unwrap();
        assert!(game_value(&g, DEFAULT_CAP).unwrap() > rat(1, 4));
    }

    #[test]
    fn rejects_bad_fractions() {
        assert!(build_value_game(3, 2, Variant::Calibrated).is_err());
        assert!(build_value_game(0, 0, Variant::Calibrated).is_err());
    }

    #[test]
    fn registry_prevents_collisions() {
        let mut reg = NameRegistry::new();
        let g1 = reg.fresh_value_subgame(1, 2, Variant::Calibrated, "g1.").unwrap();
        let g2 = reg.fresh_value_subgame(1, 2, Variant::Calibrated, "g2.").unwrap();
        assert!(free_vars(&g1.goal).is_disjoint(&free_vars(&g2.goal)));
        assert!(g1.universe.iter().all(|v| !g2.universe.contains(v)));
        let mut reg = NameRegistry::new();
        reg.fresh_value_subgame(1, 2, Variant::Calibrated, "").unwrap();
        assert!(matches!(
            reg.fresh_value_subgame(1, 2, Variant::Calibrated, ""),
            Err(Error::PrefixCollision(_))
        ));
    }
}
