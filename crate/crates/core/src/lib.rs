//! Boolean games, exact game values, and the reduction from bounded Turing
//! machine acceptance to the question "is the value of this game at least
//! 1/2?".

pub mod compile;
pub mod error;
pub mod gadgets;
pub mod horn;
pub mod game;
pub mod logic;
pub mod oracle;
pub mod rational;
pub mod reduction;
pub mod solver;
pub mod turing;
pub mod value_game;

pub use error::{Error, Result};
pub use game::{BooleanGame, MatrixGame};
pub use logic::{Assignment, Atom, BitVec, Formula, VarId};
pub use rational::Rational;
