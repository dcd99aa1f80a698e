//! Instances, bundles, allocations and agent classification.
//!
//! Agents and items are indexed from zero. Utilities are additive, so a
//! bundle's utility is the sum of its item utilities.

use std::fmt;

use crate::error::{argument, MmsError, Result};
use crate::rational::Rational;

pub type AgentId = usize;
pub type ItemId = usize;

/// An `n x m` matrix of exact utilities; entry `[i][j]` is agent `i`'s value for item `j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Instance {
    utilities: Vec<Vec<Rational>>,
    num_items: usize,
}

impl Instance {
    /// Builds an instance from utility rows. Requires at least one agent and
    /// rows of equal length.
    pub fn new(utilities: Vec<Vec<Rational>>) -> Result<Self> {
        let num_items = utilities.first().map(Vec::len).ok_or_else(|| argument("an instance needs at least one agent"))?;
        if let Some((i, row)) = utilities.iter().enumerate().find(|(_, r)| r.len() != num_items) {
            return Err(argument(format!(
                "row {i} has {} entries, expected {num_items}",
                row.len()
            )));
        }
        Ok(Instance { utilities, num_items })
    }

    /// Convenience constructor for integer utilities.
    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R]) -> Result<Self> {
        Instance::new(
            rows.iter()
                .map(|r| r.as_ref().iter().map(|&v| Rational::from(v)).collect())
                .collect(),
        )
    }

    pub fn num_agents(&self) -> usize {
        self.utilities.len()
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn utility(&self, agent: AgentId, item: ItemId) -> Rational {
        self.utilities[agent][item]
    }

    pub fn row(&self, agent: AgentId) -> &[Rational] {
        &self.utilities[agent]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.utilities
    }

    pub(crate) fn check_agent(&self, agent: AgentId) -> Result<()> {
        if agent >= self.num_agents() {
            return Err(MmsError::Index(format!(
                "agent {agent} out of range for {} agents",
                self.num_agents()
            )));
        }
        Ok(())
    }

    /// Sum of the agent's utilities over the bundle; zero for the empty bundle.
    pub fn bundle_utility(&self, agent: AgentId, bundle: &Bundle) -> Result<Rational> {
        self.check_agent(agent)?;
        if let Some(&bad) = bundle.items().iter().find(|&&j| j >= self.num_items) {
            return Err(MmsError::Index(format!(
                "item {bad} out of range for {} items",
                self.num_items
            )));
        }
        Ok(self.bundle_utility_unchecked(agent, bundle))
    }

    pub(crate) fn bundle_utility_unchecked(&self, agent: AgentId, bundle: &Bundle) -> Rational {
        let row = &self.utilities[agent];
        bundle.items().iter().map(|&j| row[j]).sum()
    }

    /// Utility of the whole item set.
    pub fn total_utility(&self, agent: AgentId) -> Rational {
        self.utilities[agent].iter().sum()
    }

    /// Classifies the agent by the signs of its row and of its guarantee `mms`.
    pub fn classify_agent(&self, agent: AgentId, mms: Rational) -> Result<AgentClass> {
        self.check_agent(agent)?;
        let row = &self.utilities[agent];
        let all_nonneg = row.iter().all(|u| !u.is_negative());
        let all_nonpos = row.iter().all(|u| !u.is_positive());
        let item_sign = if all_nonneg {
            ItemSign::Goods
        } else if all_nonpos {
            ItemSign::Chores
        } else {
            ItemSign::Mixed
        };
        let mms_sign = if mms.is_positive() {
            MmsSign::Positive
        } else if mms.is_negative() {
            MmsSign::Negative
        } else {
            MmsSign::Zero
        };
        Ok(AgentClass { item_sign, mms_sign })
    }

    /// True iff every utility of the agent is non-positive.
    pub fn is_chores_agent(&self, agent: AgentId) -> bool {
        self.utilities[agent].iter().all(|u| !u.is_positive())
    }

    /// Appends all-zero columns until the instance has `target_items` items.
    pub fn pad_with_dummies(&self, target_items: usize) -> Result<Instance> {
        if target_items < self.num_items {
            return Err(argument(format!(
                "cannot pad {} items down to {target_items}",
                self.num_items
            )));
        }
        let utilities = self
            .utilities
            .iter()
            .map(|row| {
                let mut row = row.clone();
                row.resize(target_items, Rational::ZERO);
                row
            })
            .collect();
        Ok(Instance { utilities, num_items: target_items })
    }

    /// Keeps the listed agents and items, in the given order.
    pub fn restrict(&self, agents: &[AgentId], items: &[ItemId]) -> Result<Instance> {
        if agents.is_empty() {
            return Err(argument("restriction must keep at least one agent"));
        }
        let utilities = agents
            .iter()
            .map(|&i| items.iter().map(|&j| self.utilities[i][j]).collect())
            .collect();
        Ok(Instance { utilities, num_items: items.len() })
    }

    /// Returns a copy in which each listed agent's row is overwritten by `source`'s row.
    pub fn with_rows_copied(&self, source: AgentId, targets: &[AgentId]) -> Instance {
        let mut utilities = self.utilities.clone();
        for &t in targets {
            utilities[t] = self.utilities[source].clone();
        }
        Instance { utilities, num_items: self.num_items }
    }

    /// Returns a copy with the agent's row multiplied by `factor`.
    pub fn with_row_scaled(&self, agent: AgentId, factor: Rational) -> Instance {
        let mut utilities = self.utilities.clone();
        for u in &mut utilities[agent] {
            *u = *u * factor;
        }
        Instance { utilities, num_items: self.num_items }
    }

    /// Returns a copy with the item columns reordered: new column `j` is old column `order[j]`.
    pub fn with_items_permuted(&self, order: &[ItemId]) -> Instance {
        let utilities = self
            .utilities
            .iter()
            .map(|row| order.iter().map(|&j| row[j]).collect())
            .collect();
        Instance { utilities, num_items: order.len() }
    }
}

impl fmt::Debug for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Instance {}x{} [", self.num_agents(), self.num_items)?;
        for row in &self.utilities {
            let cells: Vec<String> = row.iter().map(Rational::to_string).collect();
            writeln!(f, "  [{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

/// A set of item indices, kept sorted and duplicate-free.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bundle(Vec<ItemId>);

impl Bundle {
    pub fn empty() -> Self {
        Bundle(Vec::new())
    }

    pub fn new(items: impl IntoIterator<Item = ItemId>) -> Self {
        let mut v: Vec<ItemId> = items.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        Bundle(v)
    }

    pub fn singleton(item: ItemId) -> Self {
        Bundle(vec![item])
    }

    pub fn items(&self) -> &[ItemId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, item: ItemId) -> bool {
        self.0.binary_search(&item).is_ok()
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.iter().all(|&j| !other.contains(j))
    }

    pub fn intersection_len(&self, other: &Bundle) -> usize {
        self.0.iter().filter(|&&j| other.contains(j)).count()
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle::new(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn difference(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&j| !other.contains(j)).collect())
    }

    pub fn with(&self, item: ItemId) -> Bundle {
        Bundle::new(self.0.iter().copied().chain(std::iter::once(item)))
    }

    pub fn without(&self, item: ItemId) -> Bundle {
        Bundle(self.0.iter().copied().filter(|&j| j != item).collect())
    }

    /// Maps every item through `f`, dropping those mapped to `None`.
    pub fn map_items(&self, f: impl Fn(ItemId) -> Option<ItemId>) -> Bundle {
        Bundle::new(self.0.iter().filter_map(|&j| f(j)))
    }
}

impl fmt::Debug for Bundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<ItemId> for Bundle {
    fn from_iter<T: IntoIterator<Item = ItemId>>(iter: T) -> Self {
        Bundle::new(iter)
    }
}

/// An ordered tuple of bundles; bundle `i` belongs to agent `i`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Allocation(Vec<Bundle>);

impl Allocation {
    pub fn new(bundles: Vec<Bundle>) -> Self {
        Allocation(bundles)
    }

    pub fn from_vecs<B: AsRef<[ItemId]>>(bundles: &[B]) -> Self {
        Allocation(bundles.iter().map(|b| Bundle::new(b.as_ref().iter().copied())).collect())
    }

    pub fn bundles(&self) -> &[Bundle] {
        &self.0
    }

    pub fn bundle(&self, idx: usize) -> &Bundle {
        &self.0[idx]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_bundles(self) -> Vec<Bundle> {
        self.0
    }

    /// Bundle sizes in bundle order.
    pub fn sizes(&self) -> Vec<usize> {
        self.0.iter().map(Bundle::len).collect()
    }

    /// Checks that the bundles partition `0..num_items`, naming duplicated and missing items.
    pub fn validate(&self, num_items: usize) -> Result<()> {
        let mut seen = vec![0usize; num_items];
        let mut out_of_range = Vec::new();
        for b in &self.0 {
            for &j in b.items() {
                if j < num_items {
                    seen[j] += 1;
                } else {
                    out_of_range.push(j);
                }
            }
        }
        let duplicated: Vec<ItemId> = (0..num_items).filter(|&j| seen[j] > 1).collect();
        let missing: Vec<ItemId> = (0..num_items).filter(|&j| seen[j] == 0).collect();
        if duplicated.is_empty() && missing.is_empty() && out_of_range.is_empty() {
            return Ok(());
        }
        Err(argument(format!(
            "not a partition of {num_items} items: duplicated {duplicated:?}, missing {missing:?}, out of range {out_of_range:?}"
        )))
    }

    /// Validates against the instance shape: one bundle per agent covering all items.
    pub fn validate_for(&self, inst: &Instance) -> Result<()> {
        if self.len() != inst.num_agents() {
            return Err(argument(format!(
                "allocation has {} bundles for {} agents",
                self.len(),
                inst.num_agents()
            )));
        }
        self.validate(inst.num_items())
    }

    /// Index of the bundle holding each item (`None` if no bundle holds it).
    pub fn owners(&self, num_items: usize) -> Vec<Option<usize>> {
        let mut owner = vec![None; num_items];
        for (b, bundle) in self.0.iter().enumerate() {
            for &j in bundle.items() {
                if j < num_items {
                    owner[j] = Some(b);
                }
            }
        }
        owner
    }

    /// Minimum bundle utility for `agent`.
    pub fn min_utility(&self, inst: &Instance, agent: AgentId) -> Rational {
        self.0
            .iter()
            .map(|b| inst.bundle_utility_unchecked(agent, b))
            .min()
            .unwrap_or(Rational::ZERO)
    }
}

impl fmt::Debug for Allocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Sign pattern of an agent's item utilities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ItemSign {
    Goods,
    Chores,
    Mixed,
}

/// Sign of an agent's maximin-share guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MmsSign {
    Positive,
    Zero,
    Negative,
}

/// An all-zero row satisfies both the goods and the chores definition and is reported as goods.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgentClass {
    pub item_sign: ItemSign,
    pub mms_sign: MmsSign,
}

impl AgentClass {
    pub fn is_non_negative(&self) -> bool {
        self.mms_sign != MmsSign::Negative
    }
}
