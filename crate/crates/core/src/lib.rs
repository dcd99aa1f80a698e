//! Exact maximin-share (MMS) allocations for instances with goods and chores.
//!
//! The [`oracle`] computes guarantees exactly; [`solver::solve`] builds an MMS
//! allocation constructively for the covered instance classes and falls back
//! to exhaustive search otherwise. Every allocation it reports is checked
//! with [`verify::verify_mms`].

pub mod error;
pub mod generate;
pub mod instance;
pub mod matching;
pub mod mimic;
pub mod oracle;
pub mod par;
pub mod rational;
pub mod reductions;
pub mod small_cases;
pub mod solver;
pub mod sop;
pub mod verify;

pub use error::{MmsError, Result};
pub use generate::{generate, GenSpec, Profile};
pub use instance::{AgentClass, AgentId, Allocation, Bundle, Instance, ItemId, ItemSign, MmsSign};
pub use oracle::{MmsCertificate, PartitionPredicate, SearchBudget};
pub use par::Exec;
pub use rational::Rational;
pub use reductions::{ReductionStep, RuleId, StepDetail};
pub use solver::{solve, CoveredBy, SolveOptions, SolveOutcome, SolveStatus, TraceEntry};
pub use verify::{verify_mms, AgentReport, VerificationReport};
