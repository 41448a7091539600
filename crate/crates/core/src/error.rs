use thiserror::Error;

use crate::logic::VarId;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("variable `{0}` is not declared in the assignment's universe")]
    UndeclaredVariable(VarId),
    #[error("duplicate variable `{0}`")]
    DuplicateVariable(VarId),
    #[error("bit vector must have width >= 1")]
    EmptyBitVec,
    #[error("bit vector of width {0} is too wide to denote as a 64-bit natural")]
    TooWide(usize),
    #[error("operand widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("{value} does not fit in {width} bits")]
    OutOfRange { value: u64, width: usize },
    #[error("invalid game: {}", .0.join("; "))]
    InvalidGame(Vec<String>),
    #[error("profile does not match the game's player partition: {0}")]
    ProfileMismatch(String),
    #[error("expansion needs {required} cells but the cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("scale factor must be positive, got {0}")]
    NonPositiveScale(String),
    #[error("bad fraction: {0}")]
    BadFraction(String),
    #[error("variable name collision on `{0}`")]
    PrefixCollision(VarId),
    #[error("invalid machine: {}", .0.join("; "))]
    InvalidMachine(Vec<String>),
    #[error("head left the window [0, {max}] at time {time}")]
    WindowViolation { time: u64, max: u64 },
    #[error("input word of length {len} does not fit in {cells} cells")]
    WordTooLong { len: usize, cells: u64 },
    #[error("invalid input word: {0}")]
    BadWord(String),
    #[error("k = {0} is not supported here: {1}")]
    BadWindow(u32, &'static str),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
