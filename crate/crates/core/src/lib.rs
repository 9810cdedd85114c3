//! Model checking for the prompt Muller fragment of prompt LTL.
//!
//! The crate decides three questions over finite labeled transition systems:
//!
//! * universal satisfaction: one bound `k` works for every run from the
//!   initial state ([`universal::universal_check`]);
//! * fair satisfaction: one bound `k` works for almost every run under the
//!   uniform successor measure ([`fair::fair_check`]);
//! * the exact satisfaction probability of initialized formulas
//!   ([`prob::satisfaction_probability`]).
//!
//! Negative universal answers carry an avoiding-sequence witness that can be
//! turned into a concrete ultimately periodic counterexample for any bound
//! with [`runs::k_pump`] and re-checked with [`runs::eval_bounded`].

pub mod cli;
pub mod error;
pub mod fair;
pub mod formula;
pub mod lts;
pub mod prob;
pub mod runs;
pub mod universal;

pub use error::{Error, Result};
pub use formula::{parse_formula, Formula, FragmentClass};
pub use lts::Lts;


pub use runs::{eval_bounded, LassoRun};
pub use universal::{universal_check, Verdict};
