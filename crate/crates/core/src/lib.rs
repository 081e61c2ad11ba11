//! Sprague-Grundy analysis of rectangular and triangular chocolate-bar games.
//!
//! * [`game`]: positions, rule sets, move generation, nim-sum.
//! * [`grundy`]: mex, memoized and table-driven Grundy values, outcomes.
//! * [`sequence`]: step sequences and the bit-sequence generated by a position.
//! * [`verify`]: exhaustive checks of nim-sum characterizations.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod game;
pub mod grundy;
pub mod sequence;
pub mod verify;

pub use game::{enumerate_positions, is_valid, moves, nim_sum, Bounds, Cut, GameError, Position, RuleSet};
pub use grundy::{
    build_table, grundy, mex, outcome, sum_value, GrundyError, GrundyMemo, GrundyTable, Outcome, TableBuilder,
};
pub use sequence::{SeqType, SequenceError, StepFunction, StepSequence};
pub use verify::{Check, OutcomeFilter, Reason, VerificationReport, VerifyError};
