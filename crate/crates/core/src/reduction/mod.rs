//! From a machine, an input word, and a window exponent `k` to a Boolean
//! game whose value is at least 1/2 exactly when the machine accepts within
//! `2^k` steps.
//!
//! The outer variables describe a proposition for Player One and a clause
//! for Player Two. Fifteen guards, one per payoff class and body arity,
//! select a calibrated value subgame whose value is the semantic payoff for
//! that pair.

pub mod decode;
pub mod guards;
pub mod layout;
pub mod verify;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::game::BooleanGame;
use crate::horn::{target_value, PayoffClass};
use crate::logic::Formula;
use crate::rational::{self, Rational};
use crate::turing::{Symbol, TMachine};
use crate::value_game::{NameRegistry, Variant};

pub use decode::{decode_one, decode_two, encode_one, encode_two};
pub use guards::{guard_index, GuardSet, MAX_ARITY};
pub use layout::{make_layout, Layout};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuardEntry {
    pub class: PayoffClass,
    pub j: usize,
    #[serde(with = "rational::canonical")]
    pub target_value: Rational,
    pub subgame_prefix: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(with = "rational::canonical")]
    pub threshold: Rational,
    pub k: u32,
    pub guards: Vec<GuardEntry>,
    pub layout: Layout,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Manifest> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// A guarded subgame inside the composed game.
#[derive(Clone, Debug)]
pub struct Subgame {
    pub class: PayoffClass,
    pub j: usize,
    pub target: Rational,
    pub game: BooleanGame,
}

#[derive(Clone, Debug)]
pub struct Reduction {
    pub game: BooleanGame,
    pub manifest: Manifest,
    pub layout: Layout,
    pub guards: GuardSet,
    pub subgames: Vec<Subgame>,
}

pub fn subgame_prefix(class: PayoffClass, j: usize) -> String {
    format!("g.{}{j}.", class.name())
}

/// Denominator shared by all targets at window exponent `k`: `4^(k+1)`.
pub fn target_denominator(k: u32) -> Result<u64> {
    if 2 * k + 2 >= 63 {
        return Err(Error::BadWindow(k, "targets need 4^(k+1) to fit in 63 bits"));
    }
    Ok(1u64 << (2 * k + 2))
}

fn as_fraction(v: &Rational, b: u64) -> u64 {
    let scaled = v * Rational::from_integer(b.into());
    debug_assert!(scaled.is_integer());
    u64::try_from(scaled.to_integer()).expect("target lies in [0, 1]")
}

/// Builds the composed game with the given guards.
pub fn compose(layout: &Layout, guards: GuardSet) -> Result<Reduction> {
    let b = target_denominator(layout.k)?;
    let mut names = NameRegistry::new();
    names.reserve(layout.player1().iter().chain(layout.player2().iter()))?;
    let mut subgames = Vec::new();
    let mut entries = Vec::new();
    let mut branches = Vec::new();
    let mut p1 = layout.player1();
    let mut p2 = layout.player2();
    for (class, j, guard) in guards.all() {
        let target = target_value(class, j, layout.k);
        let prefix = subgame_prefix(class, j);
        let game = names.fresh_value_subgame(as_fraction(&target, b), b, Variant::Calibrated, &prefix)?;
        p1.extend(game.player1.iter().cloned());
        p2.extend(game.player2.iter().cloned());
        branches.push(Formula::and(vec![guard, game.goal.clone()]));
        entries.push(GuardEntry {
            class,
            j,
            target_value: target.clone(),
            subgame_prefix: prefix,
        });
        subgames.push(Subgame { class, j, target, game });
    }
    let game = BooleanGame::new(p1, p2, Formula::or(branches));
    let manifest = Manifest {
        threshold: rational::rat(1, 2),
        k: layout.k,
        guards: entries,
        layout: layout.clone(),
    };
    Ok(Reduction {
        game,
        manifest,
        layout: layout.clone(),
        guards,
        subgames,
    })
}

/// The reduction for `m` on `w` in the `2^k` window.
pub fn reduce(m: &TMachine, w: &[Symbol], k: u32) -> Result<Reduction> {
    let delta = m.delta()?;
    let layout = make_layout(k, delta.n_states)?;
    let guards = GuardSet::new(&layout, &delta, w)?;
    compose(&layout, guards)
}
