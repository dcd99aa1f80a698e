//! Independent MMS verification. Guarantees are always recomputed with the
//! oracle; nothing supplied by the caller is trusted.

use crate::error::Result;
use crate::instance::{AgentId, Allocation, Instance};
use crate::oracle::{self, SearchBudget};
use crate::par::{self, Exec};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgentReport {
    pub agent: AgentId,
    pub utility: Rational,
    pub guarantee: Rational,
    pub satisfied: bool,
}

impl AgentReport {
    /// `utility - guarantee`; non-negative iff satisfied.
    pub fn margin(&self) -> Rational {
        self.utility - self.guarantee
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationReport {
    pub per_agent: Vec<AgentReport>,
    pub satisfied: bool,
}

impl VerificationReport {
    pub fn unsatisfied_agents(&self) -> Vec<AgentId> {
        self.per_agent.iter().filter(|r| !r.satisfied).map(|r| r.agent).collect()
    }
}

pub fn verify_mms(inst: &Instance, alloc: &Allocation, budget: SearchBudget) -> Result<VerificationReport> {
    alloc.validate_for(inst)?;
    let g = oracle::guarantees(inst, budget)?;
    let per_agent: Vec<AgentReport> = g
        .into_iter()
        .enumerate()
        .map(|(agent, guarantee)| {
            let utility = inst.bundle_utility_unchecked(agent, alloc.bundle(agent));
            AgentReport { agent, utility, guarantee, satisfied: utility >= guarantee }
        })
        .collect();
    let satisfied = per_agent.iter().all(|r| r.satisfied);
    Ok(VerificationReport { per_agent, satisfied })
}

/// Verifies many `(instance, allocation)` pairs.
pub fn verify_batch(
    cases: &[(Instance, Allocation)],
    budget: SearchBudget,
    exec: Exec,
) -> Vec<Result<VerificationReport>> {
    par::map_with(exec, cases, |(inst, alloc)| verify_mms(inst, alloc, budget))
}
