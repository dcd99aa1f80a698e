//! Same-order-preference (SOP) transform and the lift of SOP allocations back
//! to the original instance.

use crate::error::{argument, Result};
use crate::instance::{Allocation, Bundle, Instance, ItemId};

/// An SOP instance and, per agent, the order of its original items:
/// `perms[i][j]` is the original item that agent `i` ranks `j`-th.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SopTransform {
    pub sop_instance: Instance,
    pub perms: Vec<Vec<ItemId>>,
}

/// Sorts every row non-increasingly, ties by original index.
pub fn to_sop(inst: &Instance) -> SopTransform {
    let m = inst.num_items();
    let perms: Vec<Vec<ItemId>> = (0..inst.num_agents())
        .map(|i| {
            let row = inst.row(i);
            let mut order: Vec<ItemId> = (0..m).collect();
            order.sort_by(|&a, &b| row[b].cmp(&row[a]));
            order
        })
        .collect();
    let rows = perms
        .iter()
        .enumerate()
        .map(|(i, p)| p.iter().map(|&j| inst.utility(i, j)).collect())
        .collect();
    let sop_instance = Instance::new(rows).expect("same shape as a valid instance");
    SopTransform { sop_instance, perms }
}

/// Rebuilds the original instance from the transform.
pub fn original_instance(t: &SopTransform) -> Instance {
    let sop = &t.sop_instance;
    let m = sop.num_items();
    let rows = t
        .perms
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut row = vec![Default::default(); m];
            for (rank, &j) in p.iter().enumerate() {
                row[j] = sop.utility(i, rank);
            }
            row
        })
        .collect();
    Instance::new(rows).expect("same shape as a valid instance")
}

/// Walks the SOP items in order; the agent holding SOP item `j` takes its
/// favourite remaining original item (ties by smallest index). Each agent ends
/// up with at least its SOP bundle's utility because at step `j` at most `j`
/// items are gone.
pub fn lift_allocation(t: &SopTransform, sop_alloc: &Allocation) -> Result<Allocation> {
    let sop = &t.sop_instance;
    sop_alloc.validate_for(sop).map_err(|e| argument(format!("SOP allocation: {e}")))?;
    let m = sop.num_items();
    let owners = sop_alloc.owners(m);
    let mut taken = vec![false; m];
    let mut bundles: Vec<Vec<ItemId>> = vec![Vec::new(); sop.num_agents()];
    for owner in owners {
        let agent = owner.expect("validated partition");
        // perms[agent] lists original items best first, ties by index.
        let pick = t.perms[agent].iter().copied().find(|&j| !taken[j]).expect("an item remains");
        taken[pick] = true;
        bundles[agent].push(pick);
    }
    Ok(Allocation::new(bundles.into_iter().map(Bundle::new).collect()))
}
