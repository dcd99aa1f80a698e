//! Mimicked instances: every agent whose guarantee is not positive takes on
//! the utilities of a positive pivot agent. An MMS allocation of the mimicked
//! instance lifts to one of the original.

use crate::error::{argument, Result};
use crate::instance::{AgentId, Allocation, Bundle, Instance};
use crate::oracle::{self, SearchBudget};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MimicRecord {
    pub pivot: AgentId,
    pub replaced_agents: Vec<AgentId>,
    pub mimicked_instance: Instance,
    /// Guarantees in the original instance, indexed by agent.
    pub original_guarantees: Vec<Rational>,
}

/// Copies the pivot's row over every agent with guarantee `<= 0`. The pivot must be positive.
pub fn build_mimicked(inst: &Instance, pivot: AgentId, budget: SearchBudget) -> Result<MimicRecord> {
    inst.check_agent(pivot)?;
    let g = oracle::guarantees(inst, budget)?;
    build_mimicked_given(inst, pivot, g)
}

pub(crate) fn build_mimicked_given(inst: &Instance, pivot: AgentId, g: Vec<Rational>) -> Result<MimicRecord> {
    if !g[pivot].is_positive() {
        return Err(argument(format!("pivot agent {pivot} has guarantee {} <= 0", g[pivot])));
    }
    let replaced: Vec<AgentId> = (0..inst.num_agents()).filter(|&j| !g[j].is_positive()).collect();
    Ok(MimicRecord {
        pivot,
        mimicked_instance: inst.with_rows_copied(pivot, &replaced),
        replaced_agents: replaced,
        original_guarantees: g,
    })
}

/// Empties every replaced agent's bundle that falls short of its original
/// guarantee into the pivot's bundle. `alloc` must be MMS for the mimicked instance.
pub fn lift_mimicked_allocation(
    rec: &MimicRecord,
    inst: &Instance,
    alloc: &Allocation,
    budget: SearchBudget,
) -> Result<Allocation> {
    let mimicked = &rec.mimicked_instance;
    if (inst.num_agents(), inst.num_items()) != (mimicked.num_agents(), mimicked.num_items()) {
        return Err(argument("original and mimicked instances differ in shape"));
    }
    alloc.validate_for(mimicked)?;
    let g_mimic = oracle::guarantees(mimicked, budget)?;
    if let Some(a) = (0..alloc.len()).find(|&a| mimicked.bundle_utility_unchecked(a, alloc.bundle(a)) < g_mimic[a]) {
        return Err(argument(format!("allocation is not MMS for the mimicked instance (agent {a})")));
    }
    let mut bundles: Vec<Bundle> = alloc.bundles().to_vec();
    for &j in &rec.replaced_agents {
        if j == rec.pivot {
            continue;
        }
        if inst.bundle_utility_unchecked(j, &bundles[j]) < rec.original_guarantees[j] {
            let moved = std::mem::take(&mut bundles[j]);
            bundles[rec.pivot] = bundles[rec.pivot].union(&moved);
        }
    }
    Ok(Allocation::new(bundles))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn all_positive_is_unchanged() {
        let inst = Instance::from_integers(&[[2, 2], [3, 1]]).unwrap();
        let rec = build_mimicked(&inst, 0, budget()).unwrap();
        assert!(rec.replaced_agents.is_empty());
        assert_eq!(rec.mimicked_instance, inst);
        let a = Allocation::from_vecs(&[vec![1], vec![0]]);
        assert_eq!(lift_mimicked_allocation(&rec, &inst, &a, budget()).unwrap(), a);
    }

    #[test]
    fn negative_row_replaced_and_kept() {
        let inst = Instance::from_integers(&[[2, 2], [-5, -5]]).unwrap();
        let rec = build_mimicked(&inst, 0, budget()).unwrap();
        assert_eq!(rec.replaced_agents, vec![1]);
        assert_eq!(rec.original_guarantees[1], Rational::from(-5));
        assert_eq!(rec.mimicked_instance.row(1), inst.row(0));
        let a = Allocation::from_vecs(&[vec![0], vec![1]]);
        let lifted = lift_mimicked_allocation(&rec, &inst, &a, budget()).unwrap();
        assert_eq!(lifted, a);
    }

    #[test]
    fn shortfall_moves_to_pivot() {
        // Agent 1's guarantee is -5 (item 0 lands somewhere); {o1, o3} is worth -6 to it.
        let inst = Instance::from_integers(&[[3, 3, 3], [-5, 0, -1]]).unwrap();
        let rec = build_mimicked(&inst, 0, budget()).unwrap();
        assert_eq!(rec.original_guarantees, vec![Rational::from(3), Rational::from(-5)]);
        let a = Allocation::from_vecs(&[vec![1], vec![0, 2]]);
        let lifted = lift_mimicked_allocation(&rec, &inst, &a, budget()).unwrap();
        assert_eq!(lifted, Allocation::from_vecs(&[vec![0, 1, 2], vec![]]));
    }

    #[test]
    fn non_positive_pivot_rejected() {
        let inst = Instance::from_integers(&[[1, -5], [2, 2]]).unwrap();
        assert!(build_mimicked(&inst, 0, budget()).is_err());
    }

    #[test]
    fn non_mms_input_rejected() {
        let inst = Instance::from_integers(&[[2, 2], [-5, -5]]).unwrap();
        let rec = build_mimicked(&inst, 0, budget()).unwrap();
        let a = Allocation::from_vecs(&[vec![0, 1], vec![]]);
        assert!(lift_mimicked_allocation(&rec, &inst, &a, budget()).is_err());
    }
}
