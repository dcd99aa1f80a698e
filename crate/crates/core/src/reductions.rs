//! Reduction rules: each removes some agents and items from an instance,
//! hands the removed agents their bundles, and records enough index
//! bookkeeping to compose an allocation of the smaller instance back into one
//! of the larger.

use std::fmt;

use crate::error::{argument, internal, Result};
use crate::instance::{AgentId, Allocation, Bundle, Instance, ItemId};
use crate::matching::{max_matching, perfect_matching};
use crate::mimic::{self, MimicRecord};
use crate::oracle::{self, PartitionPredicate, SearchBudget};
use crate::par;
use crate::rational::Rational;
use crate::sop::{self, SopTransform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RuleId {
    Singleton,
    HallMatching,
    ChoresLastItem,
    Mimic,
    DummyPad,
    Sop,
}

impl RuleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            RuleId::Singleton => "SINGLETON",
            RuleId::HallMatching => "HALL_MATCHING",
            RuleId::ChoresLastItem => "CHORES_LAST_ITEM",
            RuleId::Mimic => "MIMIC",
            RuleId::DummyPad => "DUMMY_PAD",
            RuleId::Sop => "SOP",
        }
    }

    pub fn parse(s: &str) -> Option<RuleId> {
        [
            RuleId::Singleton,
            RuleId::HallMatching,
            RuleId::ChoresLastItem,
            RuleId::Mimic,
            RuleId::DummyPad,
            RuleId::Sop,
        ]
        .into_iter()
        .find(|r| r.as_str() == s)
    }

    /// Rules that hand bundles to agents and delete them.
    pub fn allocates(&self) -> bool {
        matches!(self, RuleId::Singleton | RuleId::HallMatching | RuleId::ChoresLastItem)
    }
}

impl fmt::Display for RuleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Rule-specific data needed to map allocations back through a step.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StepDetail {
    Removal,
    Pad { original_items: usize },
    Sop { perms: Vec<Vec<ItemId>> },
    Mimic { pivot: AgentId, replaced: Vec<AgentId>, original_guarantees: Vec<Rational> },
}

/// One applied rule. Indices in `removed_*` and `assignment` refer to the
/// step's input instance; `agent_map` and `item_map` send result indices back
/// to input indices (`None` marks a dummy item).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionStep {
    pub rule: RuleId,
    pub removed_agents: Vec<AgentId>,
    pub removed_items: Vec<ItemId>,
    pub assignment: Vec<(AgentId, Bundle)>,
    pub input_shape: (usize, usize),
    pub result: Instance,
    pub agent_map: Vec<AgentId>,
    pub item_map: Vec<Option<ItemId>>,
    pub detail: StepDetail,
    pub annotation: String,
}

impl ReductionStep {
    /// Allocates each `(agent, bundle)` pair and deletes those agents and items.
    pub fn removal(
        inst: &Instance,
        rule: RuleId,
        mut assignment: Vec<(AgentId, Bundle)>,
        annotation: impl Into<String>,
    ) -> Result<ReductionStep> {
        if !rule.allocates() {
            return Err(argument(format!("{rule} does not allocate bundles")));
        }
        if assignment.is_empty() {
            return Err(argument("a reduction must remove a nonempty set of agents"));
        }
        let (n, m) = (inst.num_agents(), inst.num_items());
        assignment.sort_by_key(|(a, _)| *a);
        let mut agent_gone = vec![false; n];
        let mut item_gone = vec![false; m];
        for (a, b) in &assignment {
            inst.check_agent(*a)?;
            if std::mem::replace(&mut agent_gone[*a], true) {
                return Err(argument(format!("agent {a} assigned twice")));
            }
            for &j in b.items() {
                if j >= m {
                    return Err(argument(format!("item {j} out of range")));
                }
                if std::mem::replace(&mut item_gone[j], true) {
                    return Err(argument(format!("item {j} assigned twice")));
                }
            }
        }
        let removed_items: Vec<ItemId> = (0..m).filter(|&j| item_gone[j]).collect();
        if removed_items.is_empty() {
            return Err(argument("a reduction must remove a nonempty set of items"));
        }
        let agent_map: Vec<AgentId> = (0..n).filter(|&i| !agent_gone[i]).collect();
        if agent_map.is_empty() {
            return Err(argument("a reduction must leave at least one agent"));
        }
        let kept_items: Vec<ItemId> = (0..m).filter(|&j| !item_gone[j]).collect();
        Ok(ReductionStep {
            rule,
            removed_agents: assignment.iter().map(|(a, _)| *a).collect(),
            removed_items,
            result: inst.restrict(&agent_map, &kept_items)?,
            item_map: kept_items.into_iter().map(Some).collect(),
            agent_map,
            assignment,
            input_shape: (n, m),
            detail: StepDetail::Removal,
            annotation: annotation.into(),
        })
    }

    /// Appends zero-utility dummy items up to `target_items`.
    pub fn pad(inst: &Instance, target_items: usize) -> Result<ReductionStep> {
        let m = inst.num_items();
        let result = inst.pad_with_dummies(target_items)?;
        Ok(ReductionStep {
            rule: RuleId::DummyPad,
            removed_agents: vec![],
            removed_items: vec![],
            assignment: vec![],
            input_shape: (inst.num_agents(), m),
            result,
            agent_map: (0..inst.num_agents()).collect(),
            item_map: (0..target_items).map(|j| (j < m).then_some(j)).collect(),
            detail: StepDetail::Pad { original_items: m },
            annotation: format!("pad {m} -> {target_items} items with dummies"),
        })
    }

    pub fn sop(inst: &Instance) -> ReductionStep {
        let SopTransform { sop_instance, perms } = sop::to_sop(inst);
        ReductionStep {
            rule: RuleId::Sop,
            removed_agents: vec![],
            removed_items: vec![],
            assignment: vec![],
            input_shape: (inst.num_agents(), inst.num_items()),
            result: sop_instance,
            agent_map: (0..inst.num_agents()).collect(),
            item_map: vec![None; 0],
            detail: StepDetail::Sop { perms },
            annotation: "same-order-preference transform".into(),
        }
    }

    pub fn mimic(inst: &Instance, rec: MimicRecord) -> ReductionStep {
        ReductionStep {
            rule: RuleId::Mimic,
            removed_agents: vec![],
            removed_items: vec![],
            assignment: vec![],
            input_shape: (inst.num_agents(), inst.num_items()),
            annotation: format!("mimic agent {} for agents {:?}", rec.pivot, rec.replaced_agents),
            agent_map: (0..inst.num_agents()).collect(),
            item_map: (0..inst.num_items()).map(Some).collect(),
            result: rec.mimicked_instance,
            detail: StepDetail::Mimic {
                pivot: rec.pivot,
                replaced: rec.replaced_agents,
                original_guarantees: rec.original_guarantees,
            },
        }
    }

    /// Maps an allocation of `self.result` to one of `input`.
    pub fn unmap(&self, input: &Instance, alloc: &Allocation, budget: SearchBudget) -> Result<Allocation> {
        alloc.validate_for(&self.result)?;
        match &self.detail {
            StepDetail::Removal => {
                let mut bundles = vec![Bundle::empty(); input.num_agents()];
                for (a, b) in alloc.bundles().iter().enumerate() {
                    bundles[self.agent_map[a]] = b.map_items(|j| self.item_map[j]);
                }
                for (a, b) in &self.assignment {
                    bundles[*a] = b.clone();
                }
                Ok(Allocation::new(bundles))
            }
            StepDetail::Pad { .. } => Ok(Allocation::new(
                alloc.bundles().iter().map(|b| b.map_items(|j| self.item_map[j])).collect(),
            )),
            StepDetail::Sop { perms } => sop::lift_allocation(
                &SopTransform { sop_instance: self.result.clone(), perms: perms.clone() },
                alloc,
            ),
            StepDetail::Mimic { pivot, replaced, original_guarantees } => {
                let rec = MimicRecord {
                    pivot: *pivot,
                    replaced_agents: replaced.clone(),
                    mimicked_instance: self.result.clone(),
                    original_guarantees: original_guarantees.clone(),
                };
                mimic::lift_mimicked_allocation(&rec, input, alloc, budget)
            }
        }
    }
}

/// Oracle check that a removal step satisfies every removed agent and does
/// not lower any surviving agent's guarantee.
pub fn check_valid(inst: &Instance, step: &ReductionStep, budget: SearchBudget) -> Result<bool> {
    if !step.rule.allocates() || step.removed_agents.is_empty() || step.removed_items.is_empty() {
        return Err(argument("validity is defined for steps removing agents and items"));
    }
    if step.input_shape != (inst.num_agents(), inst.num_items()) {
        return Err(argument("step does not apply to this instance"));
    }
    let before = oracle::guarantees(inst, budget)?;
    for (a, b) in &step.assignment {
        if inst.bundle_utility(*a, b)? < before[*a] {
            return Ok(false);
        }
    }
    let after = oracle::guarantees(&step.result, budget)?;
    Ok(after.iter().enumerate().all(|(a, g)| *g >= before[step.agent_map[a]]))
}

/// Gives the highest-indexed item that is a singleton bundle in some agent's
/// partition to that agent (smallest agent on ties). `None` if some agent's
/// partition has no singleton.
pub fn apply_singleton_rule(inst: &Instance, per_agent: &[Allocation]) -> Result<Option<ReductionStep>> {
    if per_agent.len() != inst.num_agents() {
        return Err(argument("need one partition per agent"));
    }
    if !is_sop(inst) {
        return Err(argument("singleton rule needs a same-order-preference instance"));
    }
    let mut choice: Option<(ItemId, AgentId)> = None;
    for (agent, p) in per_agent.iter().enumerate() {
        let top = p.bundles().iter().filter(|b| b.len() == 1).map(|b| b.items()[0]).max();
        let Some(item) = top else { return Ok(None) };
        if choice.is_none_or(|(best, _)| item > best) {
            choice = Some((item, agent));
        }
    }
    let Some((item, agent)) = choice else { return Ok(None) };
    ReductionStep::removal(
        inst,
        RuleId::Singleton,
        vec![(agent, Bundle::singleton(item))],
        format!("item {item} to agent {agent}"),
    )
    .map(Some)
}

/// Result of the matching rule on a partition that is MMS for a pivot agent.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HallOutcome {
    FullAllocation(Allocation),
    Step(ReductionStep),
}

/// Satisfaction graph from agents to the partition's bundles.
fn satisfaction_graph(inst: &Instance, partition: &Allocation, guarantees: &[Rational]) -> Vec<Vec<usize>> {
    (0..inst.num_agents())
        .map(|a| {
            (0..partition.len())
                .filter(|&b| inst.bundle_utility_unchecked(a, partition.bundle(b)) >= guarantees[a])
                .collect()
        })
        .collect()
}

/// Smallest set of bundles whose satisfied-agent neighbourhood is smaller
/// than itself; subsets are tried by size, then lexicographically.
fn minimal_deficient_set(bundle_nbrs: &[u64]) -> Option<Vec<usize>> {
    let n = bundle_nbrs.len();
    for size in 1..=n {
        let mut comb: Vec<usize> = (0..size).collect();
        loop {
            let nbrs = comb.iter().fold(0u64, |acc, &b| acc | bundle_nbrs[b]);
            if (nbrs.count_ones() as usize) < size {
                return Some(comb);
            }
            // next combination
            let mut i = size;
            while i > 0 && comb[i - 1] == n - size + i - 1 {
                i -= 1;
            }
            if i == 0 {
                break;
            }
            comb[i - 1] += 1;
            for t in i..size {
                comb[t] = comb[t - 1] + 1;
            }
        }
    }
    None
}

/// Matches the partition's bundles to satisfied agents. With a perfect
/// matching the partition becomes an MMS allocation; otherwise a minimal
/// deficient set minus one bundle is matched onto its neighbourhood and
/// allocated as a reduction step.
pub fn apply_hall_rule(
    inst: &Instance,
    pivot: AgentId,
    partition: &Allocation,
    budget: SearchBudget,
) -> Result<HallOutcome> {
    inst.check_agent(pivot)?;
    partition.validate_for(inst)?;
    let n = inst.num_agents();
    if n > 64 {
        return Err(argument("matching rule supports at most 64 agents"));
    }
    if !PartitionPredicate::NMinus1Small.holds_for(partition) {
        return Err(argument(format!(
            "partition sizes {:?} need n-1 bundles of size 1 or 2",
            partition.sizes()
        )));
    }
    let g = oracle::guarantees(inst, budget)?;
    if partition.min_utility(inst, pivot) < g[pivot] {
        return Err(argument(format!("partition is not MMS for pivot agent {pivot}")));
    }
    let adj = satisfaction_graph(inst, partition, &g);
    if let Some(m) = perfect_matching(&adj, n) {
        return Ok(HallOutcome::FullAllocation(Allocation::new(
            m.into_iter().map(|b| partition.bundle(b).clone()).collect(),
        )));
    }
    let mut bundle_nbrs = vec![0u64; n];
    for (a, bs) in adj.iter().enumerate() {
        for &b in bs {
            bundle_nbrs[b] |= 1 << a;
        }
    }
    let deficient = minimal_deficient_set(&bundle_nbrs)
        .ok_or_else(|| internal("no perfect matching but no deficient set"))?;
    let odd: Vec<usize> = deficient.iter().copied().filter(|&b| !matches!(partition.bundle(b).len(), 1 | 2)).collect();
    let drop = match odd.as_slice() {
        [] => *deficient
            .iter()
            .max_by_key(|&&b| (partition.bundle(b).len(), std::cmp::Reverse(b)))
            .expect("deficient sets are nonempty"),
        [b] => *b,
        _ => return Err(internal("deficient set holds two bundles of size other than 1 or 2")),
    };
    let kept: Vec<usize> = deficient.into_iter().filter(|&b| b != drop).collect();
    let nbrs = kept.iter().fold(0u64, |acc, &b| acc | bundle_nbrs[b]);
    let agents: Vec<AgentId> = (0..n).filter(|&a| nbrs >> a & 1 == 1).collect();
    if agents.len() != kept.len() || kept.is_empty() {
        return Err(internal("reduced deficient set does not match its neighbourhood"));
    }
    let sub_adj: Vec<Vec<usize>> = kept
        .iter()
        .map(|&b| (0..agents.len()).filter(|&t| bundle_nbrs[b] >> agents[t] & 1 == 1).collect())
        .collect();
    let m = max_matching(&sub_adj, agents.len());
    let mut assignment = Vec::with_capacity(kept.len());
    for (t, &b) in kept.iter().enumerate() {
        let slot = m[t].ok_or_else(|| internal("minimal deficient set lacks a matching"))?;
        assignment.push((agents[slot], partition.bundle(b).clone()));
    }
    let note = format!("bundles {kept:?} of agent {pivot}'s partition to agents {agents:?}");
    ReductionStep::removal(inst, RuleId::HallMatching, assignment, note).map(HallOutcome::Step)
}

/// Result of the chores-agent rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ChoresOutcome {
    FullAllocation(Allocation),
    Step(ReductionStep),
    DelegateToHall { pivot: AgentId, partition: Allocation },
}

pub(crate) fn is_sop(inst: &Instance) -> bool {
    inst.rows().iter().all(|r| r.windows(2).all(|w| w[0] >= w[1]))
}

/// For an SOP instance with a chores agent, `m <= 2n + 1` and only negative
/// agents: if some agent has an optimal partition without empty or singleton
/// bundles, delegate that partition to the matching rule; otherwise give the
/// last item to the chores agent.
pub fn apply_chores_rule(inst: &Instance, chores_agent: AgentId, budget: SearchBudget) -> Result<ChoresOutcome> {
    inst.check_agent(chores_agent)?;
    let (n, m) = (inst.num_agents(), inst.num_items());
    if m > 2 * n + 1 {
        return Err(argument(format!("chores rule needs m <= 2n+1, got n={n}, m={m}")));
    }
    if !inst.is_chores_agent(chores_agent) {
        return Err(argument(format!("agent {chores_agent} is not a chores agent")));
    }
    if !is_sop(inst) {
        return Err(argument("chores rule needs a same-order-preference instance"));
    }
    let g = oracle::guarantees(inst, budget)?;
    if let Some(a) = g.iter().position(|x| !x.is_negative()) {
        return Err(argument(format!("agent {a} is non-negative; chores rule needs every guarantee negative")));
    }
    if n == 1 {
        return Ok(ChoresOutcome::FullAllocation(Allocation::new(vec![Bundle::new(0..m)])));
    }
    let agents: Vec<AgentId> = (0..n).collect();
    let found = par::find_map_first(&agents, |&a| {
        match oracle::find_mms_partition_given(inst, a, g[a], PartitionPredicate::NoSingletonNoEmpty, budget) {
            Ok(None) => None,
            Ok(Some(p)) => Some(Ok((a, p))),
            Err(e) => Some(Err(e)),
        }
    });
    if let Some(hit) = found {
        let (pivot, partition) = hit?;
        let sizes = partition.sizes();
        if sizes.iter().filter(|&&s| s == 2).count() + 1 < n || sizes.iter().any(|&s| s > 3) {
            return Err(internal(format!("unexpected partition shape {sizes:?} without small bundles")));
        }
        return Ok(ChoresOutcome::DelegateToHall { pivot, partition });
    }
    let last = m - 1;
    ReductionStep::removal(
        inst,
        RuleId::ChoresLastItem,
        vec![(chores_agent, Bundle::singleton(last))],
        format!("last item {last} to chores agent {chores_agent}"),
    )
    .map(ChoresOutcome::Step)
}

/// Maps `tail` (an allocation of the last step's result) back through the
/// chain of steps to an allocation of `inst`.
pub fn compose(inst: &Instance, steps: &[ReductionStep], tail: &Allocation, budget: SearchBudget) -> Result<Allocation> {
    let mut inputs: Vec<&Instance> = Vec::with_capacity(steps.len());
    let mut current = inst;
    for (t, step) in steps.iter().enumerate() {
        if step.input_shape != (current.num_agents(), current.num_items()) {
            return Err(argument(format!("step {t} ({}) does not follow from its predecessor", step.rule)));
        }
        inputs.push(current);
        current = &step.result;
    }
    tail.validate_for(current).map_err(|e| argument(format!("tail allocation: {e}")))?;
    let mut alloc = tail.clone();
    for (step, input) in steps.iter().zip(inputs).rev() {
        alloc = step.unmap(input, &alloc, budget)?;
    }
    Ok(alloc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    #[test]
    fn removal_bookkeeping() {
        let inst = Instance::from_integers(&[[5, 4, 3, 2], [4, 4, 1, 1], [3, 3, 3, 3]]).unwrap();
        let step = ReductionStep::removal(&inst, RuleId::HallMatching, vec![(1, Bundle::new([1, 3]))], "").unwrap();
        assert_eq!(step.removed_agents, vec![1]);
        assert_eq!(step.removed_items, vec![1, 3]);
        assert_eq!(step.result, Instance::from_integers(&[[5, 3], [3, 3]]).unwrap());
        let tail = Allocation::from_vecs(&[vec![1], vec![0]]);
        let full = compose(&inst, std::slice::from_ref(&step), &tail, budget()).unwrap();
        assert_eq!(full, Allocation::from_vecs(&[vec![2], vec![1, 3], vec![0]]));
    }

    #[test]
    fn empty_removal_rejected() {
        let inst = Instance::from_integers(&[[1, 2], [2, 1]]).unwrap();
        assert!(ReductionStep::removal(&inst, RuleId::Singleton, vec![], "").is_err());
        assert!(ReductionStep::removal(&inst, RuleId::Singleton, vec![(0, Bundle::empty())], "").is_err());
        assert!(ReductionStep::removal(&inst, RuleId::Sop, vec![(0, Bundle::singleton(0))], "").is_err());
        let pad = ReductionStep::pad(&inst, 3).unwrap();
        assert!(check_valid(&inst, &pad, budget()).is_err());
    }

    #[test]
    fn check_valid_detects_unsatisfied_agent() {
        let inst = Instance::from_integers(&[[5, 1, 1, 1], [5, 1, 1, 1]]).unwrap();
        let bad = ReductionStep::removal(&inst, RuleId::Singleton, vec![(0, Bundle::singleton(3))], "").unwrap();
        assert!(!check_valid(&inst, &bad, budget()).unwrap());
        let good = ReductionStep::removal(&inst, RuleId::Singleton, vec![(0, Bundle::singleton(0))], "").unwrap();
        assert!(check_valid(&inst, &good, budget()).unwrap());
    }

    #[test]
    fn singleton_rule_two_agents() {
        // After the SOP transform both rows read (5, 1).
        let inst = Instance::from_integers(&[[5, 1], [1, 5]]).unwrap();
        let sop = sop::to_sop(&inst).sop_instance;
        let parts: Vec<Allocation> = (0..2).map(|a| oracle::mms_guarantee(&sop, a, 2).unwrap().witness).collect();
        let step = apply_singleton_rule(&sop, &parts).unwrap().unwrap();
        assert_eq!(step.assignment, vec![(0, Bundle::singleton(1))]);
        assert!(check_valid(&sop, &step, budget()).unwrap());
    }

    #[test]
    fn singleton_rule_identical_rows() {
        let inst = Instance::from_integers(&[[4, 3, 3]; 2]).unwrap();
        let parts: Vec<Allocation> = (0..2).map(|a| oracle::mms_guarantee(&inst, a, 2).unwrap().witness).collect();
        // Optimum is {o1} | {o2, o3}.
        assert!(parts.iter().all(|p| p.bundles().contains(&Bundle::singleton(0))));
        let step = apply_singleton_rule(&inst, &parts).unwrap().unwrap();
        assert_eq!(step.assignment, vec![(0, Bundle::singleton(0))]);
    }

    #[test]
    fn singleton_rule_needs_singletons() {
        let inst = Instance::from_integers(&[[1, 1, 1, 1]; 2]).unwrap();
        let p = Allocation::from_vecs(&[vec![0, 1], vec![2, 3]]);
        assert_eq!(apply_singleton_rule(&inst, &[p.clone(), p]).unwrap(), None);
    }

    #[test]
    fn hall_rule_identical_rows_is_full() {
        let inst = Instance::from_integers(&[[3, 3, 2, 2, 1, 1]; 3]).unwrap();
        let p = Allocation::from_vecs(&[vec![0, 5], vec![1, 4], vec![2, 3]]);
        match apply_hall_rule(&inst, 0, &p, budget()).unwrap() {
            HallOutcome::FullAllocation(a) => {
                for i in 0..3 {
                    assert_eq!(inst.bundle_utility(i, a.bundle(i)).unwrap(), Rational::from(4));
                }
            }
            other => panic!("expected full allocation, got {other:?}"),
        }
    }

    #[test]
    fn hall_rule_step_on_deficient_graph() {
        // Agents 1 and 2 only like the two big items, which sit in one bundle
        // of agent 0's partition.
        let inst = Instance::from_integers(&[[4, 4, 3, 3, 2, 2], [10, 10, 0, 0, 0, 0], [10, 10, 0, 0, 0, 0]]).unwrap();
        let p = oracle::find_mms_partition(&inst, 0, PartitionPredicate::NMinus1Small, budget()).unwrap().unwrap();
        match apply_hall_rule(&inst, 0, &p, budget()).unwrap() {
            HallOutcome::Step(step) => {
                assert!(step.removed_items.len() >= step.removed_agents.len());
                assert!(!step.removed_agents.is_empty());
                assert!(check_valid(&inst, &step, budget()).unwrap());
            }
            HallOutcome::FullAllocation(a) => {
                assert!(crate::verify::verify_mms(&inst, &a, budget()).unwrap().satisfied)
            }
        }
    }

    #[test]
    fn hall_rule_rejects_wrong_profile() {
        let inst = Instance::from_integers(&[[1; 9]; 3]).unwrap();
        let p = Allocation::from_vecs(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        assert!(matches!(apply_hall_rule(&inst, 0, &p, budget()), Err(crate::MmsError::Argument(_))));
    }

    #[test]
    fn chores_rule_symmetric_gives_last_item() {
        // optima are (2,2,1), so every one has a singleton
        let inst = Instance::from_integers(&[[-1; 5]; 3]).unwrap();
        match apply_chores_rule(&inst, 0, budget()).unwrap() {
            ChoresOutcome::Step(step) => {
                assert_eq!(step.assignment, vec![(0, Bundle::singleton(4))]);
                assert!(check_valid(&inst, &step, budget()).unwrap());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chores_rule_delegates_on_pair_shaped_optima() {
        // Four agents, nine identical chores: optima are (2,2,2,3).
        let inst = Instance::from_integers(&[[-1; 9]; 4]).unwrap();
        match apply_chores_rule(&inst, 0, budget()).unwrap() {
            ChoresOutcome::DelegateToHall { pivot, partition } => {
                assert_eq!(pivot, 0);
                let mut s = partition.sizes();
                s.sort();
                assert_eq!(s, vec![2, 2, 2, 3]);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn chores_rule_preconditions() {
        let mixed = Instance::from_integers(&[[1, -1], [-1, -1]]).unwrap();
        assert!(apply_chores_rule(&mixed, 0, budget()).is_err());
        let unsorted = Instance::from_integers(&[[-2, -1], [-1, -1]]).unwrap();
        assert!(apply_chores_rule(&unsorted, 0, budget()).is_err());
        let too_many = Instance::from_integers(&[[-1; 4]]).unwrap();
        assert!(apply_chores_rule(&too_many, 0, budget()).is_err());
    }

    #[test]
    fn compose_identity_and_padding() {
        let inst = Instance::from_integers(&[[1, 2], [2, 1]]).unwrap();
        let tail = Allocation::from_vecs(&[vec![1], vec![0]]);
        assert_eq!(compose(&inst, &[], &tail, budget()).unwrap(), tail);
        let pad = ReductionStep::pad(&inst, 4).unwrap();
        let padded_tail = Allocation::from_vecs(&[vec![1, 2], vec![0, 3]]);
        assert_eq!(compose(&inst, &[pad], &padded_tail, budget()).unwrap(), tail);
    }

    #[test]
    fn compose_rejects_broken_chain() {
        let inst = Instance::from_integers(&[[1, 2], [2, 1]]).unwrap();
        let other = Instance::from_integers(&[[1, 2, 3], [2, 1, 3]]).unwrap();
        let step = ReductionStep::pad(&other, 4).unwrap();
        let tail = Allocation::from_vecs(&[vec![0, 1], vec![2, 3]]);
        assert!(compose(&inst, &[step], &tail, budget()).is_err());
    }

    #[test]
    fn deficient_set_is_minimal() {
        // bundles 0,1 both only see agent 0; bundle 2 sees everyone
        let nbrs = [0b001, 0b001, 0b111];
        assert_eq!(minimal_deficient_set(&nbrs), Some(vec![0, 1]));
        assert_eq!(minimal_deficient_set(&[0b01, 0b10]), None);
        assert_eq!(minimal_deficient_set(&[0b00, 0b11]), Some(vec![0]));
    }
}
