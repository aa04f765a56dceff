//! Finite-horizon simulation of left-r.e. sets.
//!
//! A left-r.e. set is the limit of a recursive sequence of sets that only
//! ever increases in lexicographic order. Every construction here produces
//! such sequences on a bounded window of stages and positions, together with
//! validators and brute-force oracles for the invariants they promise.

pub mod diagonal;
pub mod error;
pub mod fixtures;
pub mod genericity;
pub mod markers;
pub mod numbering;
pub mod prefix;
pub mod process;
pub mod relations;
pub mod schedule;
pub mod selfref;
pub mod sparse;
pub mod zulu;

pub use error::{Error, Result};
pub use numbering::{index_set_estimate, HorizonPredicate, Numbering, NumberingFile, Provenance};
pub use prefix::{lex_cmp, lex_cmp_padded, Prefix};
pub use process::{
    join, limit_estimate, limit_estimate_with_window, validate_left_re, ApproxProcess, Horizon,
    ValidationReport,
};
pub use schedule::{schedule_member, LimitFunctionApprox, Schedule, ScheduleKind};
pub use sparse::{sparse_lex_cmp, SparseProcess, SparseReport, SparseSet};
