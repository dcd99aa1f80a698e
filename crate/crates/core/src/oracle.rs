//! Exact maximin-share guarantees by exhaustive branch and bound.
//!
//! Items are assigned one at a time, largest absolute utility first (stable on
//! the item index), to bundles in canonical order: an item may open bundle `b`
//! only once bundles `0..b` are open, so every unlabeled partition into at most
//! `k` non-empty parts is visited exactly once and unopened bundles count as
//! empty. The search runs on integers obtained by scaling the agent's row by the
//! common denominator, which keeps it exact.
//!
//! Ties between optimal partitions are broken by visiting order: the witness
//! is the optimal partition whose bundle-label string (in search order) is
//! lexicographically smallest.

use crate::error::{argument, MmsError, Result};
use crate::instance::{AgentId, Allocation, Bundle, Instance, ItemId};
use crate::par;
use crate::rational::Rational;

/// Node limit for a single search. Exceeding it is an error, never a silent approximation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_nodes: u64,
}

impl SearchBudget {
    pub const DEFAULT_NODES: u64 = 100_000_000;

    pub fn new(max_nodes: u64) -> Self {
        SearchBudget { max_nodes }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget { max_nodes: Self::DEFAULT_NODES }
    }
}

/// An agent's guarantee together with a partition achieving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MmsCertificate {
    pub agent: AgentId,
    pub guarantee: Rational,
    pub witness: Allocation,
}

/// Structural conditions on the bundle sizes of a partition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PartitionPredicate {
    Any,
    HasSingleton,
    NoSingletonNoEmpty,
    HasEmptyOrSingleton,
    /// All but at most one bundle has size 1 or 2.
    NMinus1Small,
    /// At least three bundles of size 3.
    ThreeThreeBundles,
    /// At least two bundles of size 2.
    TwoPairs,
}

impl PartitionPredicate {
    pub fn holds(&self, sizes: &[usize]) -> bool {
        let count = |f: fn(usize) -> bool| sizes.iter().filter(|&&s| f(s)).count();
        match self {
            PartitionPredicate::Any => true,
            PartitionPredicate::HasSingleton => count(|s| s == 1) > 0,
            PartitionPredicate::NoSingletonNoEmpty => count(|s| s <= 1) == 0,
            PartitionPredicate::HasEmptyOrSingleton => count(|s| s <= 1) > 0,
            PartitionPredicate::NMinus1Small => count(|s| s == 1 || s == 2) + 1 >= sizes.len(),
            PartitionPredicate::ThreeThreeBundles => count(|s| s == 3) >= 3,
            PartitionPredicate::TwoPairs => count(|s| s == 2) >= 2,
        }
    }

    pub fn holds_for(&self, alloc: &Allocation) -> bool {
        self.holds(&alloc.sizes())
    }
}

struct Search {
    order: Vec<ItemId>,
    values: Vec<i128>,
    suffix_pos: Vec<i128>,
    total: i128,
    k: usize,
    sums: Vec<i128>,
    sizes: Vec<usize>,
    slots: Vec<usize>,
    nodes: u64,
    limit: u64,
}

enum Mode<'v> {
    Maximise { floor: i128, best: Option<(i128, Vec<usize>)> },
    /// Visit every partition whose minimum bundle is at least `target`; the
    /// visitor returns `true` to stop.
    Enumerate { target: i128, visit: &'v mut dyn FnMut(&[usize], &[usize]) -> bool },
}

impl Search {
    fn new(row: &[Rational], k: usize, limit: u64) -> (Self, i128) {
        let scale = Rational::common_denominator(row);
        let scaled: Vec<i128> = row.iter().map(|u| u.scaled(scale)).collect();
        let mut order: Vec<ItemId> = (0..row.len()).collect();
        order.sort_by_key(|&j| std::cmp::Reverse(scaled[j].abs()));
        let values: Vec<i128> = order.iter().map(|&j| scaled[j]).collect();
        let mut suffix_pos = vec![0i128; values.len() + 1];
        for t in (0..values.len()).rev() {
            suffix_pos[t] = suffix_pos[t + 1] + values[t].max(0);
        }
        let search = Search {
            total: values.iter().sum(),
            order,
            values,
            suffix_pos,
            k,
            sums: vec![0; k],
            sizes: vec![0; k],
            slots: vec![0; row.len()],
            nodes: 0,
            limit,
        };
        (search, scale)
    }

    /// Whether some completion could reach minimum bundle value `target`:
    /// the remaining positive mass must cover every bundle's shortfall, and the
    /// average bundle value bounds the minimum.
    fn feasible(&self, pos: usize, target: i128) -> bool {
        if (self.k as i128) * target > self.total {
            return false;
        }
        let mut deficit = 0i128;
        for &s in &self.sums {
            if s < target {
                deficit += target - s;
                if deficit > self.suffix_pos[pos] {
                    return false;
                }
            }
        }
        true
    }

    fn greedy_floor(&self) -> i128 {
        let mut sums = vec![0i128; self.k];
        for &v in &self.values {
            let pick = if v >= 0 {
                (0..self.k).min_by_key(|&b| sums[b])
            } else {
                (0..self.k).max_by_key(|&b| sums[b])
            };
            sums[pick.unwrap()] += v;
        }
        sums.into_iter().min().unwrap()
    }

    fn run(&mut self, mode: &mut Mode<'_>) -> Result<()> {
        self.dfs(0, 0, mode).map(|_| ())
    }

    fn dfs(&mut self, pos: usize, used: usize, mode: &mut Mode<'_>) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.limit {
            return Err(MmsError::BudgetExceeded { limit: self.limit });
        }
        let target = match mode {
            Mode::Maximise { floor, best } => match best {
                Some((b, _)) => *b + 1,
                None => *floor,
            },
            Mode::Enumerate { target, .. } => *target,
        };
        if !self.feasible(pos, target) {
            return Ok(false);
        }
        if pos == self.values.len() {
            let value = *self.sums.iter().min().unwrap();
            match mode {
                Mode::Maximise { best, .. } => {
                    *best = Some((value, self.slots.clone()));
                    Ok(false)
                }
                Mode::Enumerate { visit, .. } => Ok(visit(&self.slots, &self.sizes)),
            }
        } else {
            let v = self.values[pos];
            let open = if used < self.k { used + 1 } else { used };
            for b in 0..open {
                self.slots[pos] = b;
                self.sums[b] += v;
                self.sizes[b] += 1;
                let stop = self.dfs(pos + 1, used.max(b + 1), mode)?;
                self.sums[b] -= v;
                self.sizes[b] -= 1;
                if stop {
                    return Ok(true);
                }
            }
            Ok(false)
        }
    }

    fn allocation(&self, slots: &[usize]) -> Allocation {
        let mut bundles = vec![Vec::new(); self.k];
        for (pos, &b) in slots.iter().enumerate() {
            bundles[b].push(self.order[pos]);
        }
        Allocation::new(bundles.into_iter().map(Bundle::new).collect())
    }
}

fn check_k(k: usize) -> Result<()> {
    if k == 0 {
        return Err(argument("number of bundles must be positive"));
    }
    Ok(())
}

/// Maximin share of `agent` when the items are divided into `k` bundles.
pub fn mms_guarantee(inst: &Instance, agent: AgentId, k: usize) -> Result<MmsCertificate> {
    mms_guarantee_within(inst, agent, k, SearchBudget::default())
}

pub fn mms_guarantee_within(inst: &Instance, agent: AgentId, k: usize, budget: SearchBudget) -> Result<MmsCertificate> {
    inst.check_agent(agent)?;
    check_k(k)?;
    let (mut search, scale) = Search::new(inst.row(agent), k, budget.max_nodes);
    let mut mode = Mode::Maximise { floor: search.greedy_floor(), best: None };
    search.run(&mut mode)?;
    let Mode::Maximise { best: Some((value, slots)), .. } = mode else {
        return Err(crate::error::internal("partition search found no leaf"));
    };
    Ok(MmsCertificate {
        agent,
        guarantee: Rational::new(value, scale),
        witness: search.allocation(&slots),
    })
}

/// Guarantees of every agent with `k = n`, computed in parallel over agents.
pub fn guarantees(inst: &Instance, budget: SearchBudget) -> Result<Vec<Rational>> {
    certificates(inst, budget).map(|cs| cs.into_iter().map(|c| c.guarantee).collect())
}

pub fn certificates(inst: &Instance, budget: SearchBudget) -> Result<Vec<MmsCertificate>> {
    let n = inst.num_agents();
    par::map_range(n, |i| mms_guarantee_within(inst, i, n, budget)).into_iter().collect()
}

fn enumerate_optimal(
    inst: &Instance,
    agent: AgentId,
    k: usize,
    guarantee: Rational,
    budget: SearchBudget,
    mut visit: impl FnMut(Allocation) -> bool,
) -> Result<()> {
    inst.check_agent(agent)?;
    check_k(k)?;
    let (mut search, scale) = Search::new(inst.row(agent), k, budget.max_nodes);
    let scaled = guarantee * Rational::from_integer(scale);
    if !scaled.is_integer() {
        return Ok(());
    }
    // The visitor needs the search's item order to rebuild the partition.
    let order = search.order.clone();
    let mut adapter = |slots: &[usize], _sizes: &[usize]| {
        let mut bundles = vec![Vec::new(); k];
        for (pos, &b) in slots.iter().enumerate() {
            bundles[b].push(order[pos]);
        }
        visit(Allocation::new(bundles.into_iter().map(Bundle::new).collect()))
    };
    let mut mode = Mode::Enumerate { target: scaled.numer(), visit: &mut adapter };
    search.run(&mut mode)
}

/// First partition (in search order) into `n` bundles that is optimal for the
/// agent and satisfies `pred`.
pub fn find_mms_partition(
    inst: &Instance,
    agent: AgentId,
    pred: PartitionPredicate,
    budget: SearchBudget,
) -> Result<Option<Allocation>> {
    let g = mms_guarantee_within(inst, agent, inst.num_agents(), budget)?.guarantee;
    find_mms_partition_given(inst, agent, g, pred, budget)
}

/// As [`find_mms_partition`] with the agent's guarantee already known.
pub fn find_mms_partition_given(
    inst: &Instance,
    agent: AgentId,
    guarantee: Rational,
    pred: PartitionPredicate,
    budget: SearchBudget,
) -> Result<Option<Allocation>> {
    let mut found = None;
    enumerate_optimal(inst, agent, inst.num_agents(), guarantee, budget, |alloc| {
        if pred.holds_for(&alloc) {
            found = Some(alloc);
            true
        } else {
            false
        }
    })?;
    Ok(found)
}

/// Every optimal partition into `k` bundles, up to `limit` of them.
pub fn optimal_partitions(
    inst: &Instance,
    agent: AgentId,
    k: usize,
    limit: usize,
    budget: SearchBudget,
) -> Result<Vec<Allocation>> {
    let g = mms_guarantee_within(inst, agent, k, budget)?.guarantee;
    let mut all = Vec::new();
    enumerate_optimal(inst, agent, k, g, budget, |alloc| {
        all.push(alloc);
        all.len() >= limit
    })?;
    Ok(all)
}

/// Whether every bundle of `alloc` meets the agent's guarantee.
pub fn is_mms_for_agent(inst: &Instance, agent: AgentId, alloc: &Allocation, budget: SearchBudget) -> Result<bool> {
    alloc.validate_for(inst)?;
    inst.check_agent(agent)?;
    let g = mms_guarantee_within(inst, agent, inst.num_agents(), budget)?.guarantee;
    Ok(alloc.min_utility(inst, agent) >= g)
}
