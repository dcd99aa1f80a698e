//! The full pipeline: classify the instance, pick a constructive path, recurse
//! through reductions and map the final allocation back to the input.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{argument, internal, MmsError, Result};
use crate::instance::{AgentId, Allocation, Bundle, Instance};
use crate::matching::perfect_matching;
use crate::mimic::build_mimicked_given;
use crate::oracle::{self, PartitionPredicate, SearchBudget};
use crate::par::{self, Exec};
use crate::rational::Rational;
use crate::reductions::{
    apply_chores_rule, apply_hall_rule, apply_singleton_rule, check_valid, compose, is_sop, ChoresOutcome,
    HallOutcome, ReductionStep, RuleId,
};
use crate::small_cases::{solve_three_agents_traced, solve_two_agents};
use crate::verify::verify_mms;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Solved,
    UnknownUncoveredCase,
    BudgetExceeded,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Solved => "SOLVED",
            SolveStatus::UnknownUncoveredCase => "UNKNOWN_UNCOVERED_CASE",
            SolveStatus::BudgetExceeded => "BUDGET_EXCEEDED",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which existence condition held at the root.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoveredBy {
    NLe3,
    NonNegativeAgent,
    AllChoresAgents,
    FallbackSearch,
    None,
}

impl CoveredBy {
    pub fn as_str(&self) -> &'static str {
        match self {
            CoveredBy::NLe3 => "N_LE_3",
            CoveredBy::NonNegativeAgent => "NON_NEGATIVE_AGENT",
            CoveredBy::AllChoresAgents => "ALL_CHORES_AGENTS",
            CoveredBy::FallbackSearch => "FALLBACK_SEARCH",
            CoveredBy::None => "NONE",
        }
    }
}

impl fmt::Display for CoveredBy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceEntry {
    Step(ReductionStep),
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub allocation: Option<Allocation>,
    pub trace: Vec<TraceEntry>,
    pub covered_by: CoveredBy,
    /// Allocation of the last step's result instance, from which
    /// `allocation` is recovered by composing the trace's steps.
    pub tail: Option<Allocation>,
    /// Set when an exhaustive search finished without finding any MMS allocation.
    pub proven_nonexistent: bool,
}

impl SolveOutcome {
    pub fn steps(&self) -> Vec<ReductionStep> {
        steps_of(&self.trace)
    }

    pub fn is_solved(&self) -> bool {
        self.status == SolveStatus::Solved
    }
}

fn steps_of(trace: &[TraceEntry]) -> Vec<ReductionStep> {
    trace
        .iter()
        .filter_map(|e| match e {
            TraceEntry::Step(s) => Some(s.clone()),
            TraceEntry::Note(_) => None,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SolveOptions {
    pub budget: SearchBudget,
    /// Check every reduction step against the oracle as it is applied.
    pub paranoid: bool,
    /// Accept `m > n + 5` by going straight to the exhaustive search.
    pub allow_fallback: bool,
}

struct Run<'o> {
    opts: &'o SolveOptions,
    trace: Vec<TraceEntry>,
}

impl Run<'_> {
    fn note(&mut self, msg: impl Into<String>) {
        self.trace.push(TraceEntry::Note(msg.into()));
    }

    fn budget(&self) -> SearchBudget {
        self.opts.budget
    }

    fn step(&mut self, input: &Instance, step: ReductionStep) -> Result<Instance> {
        if step.rule.allocates() {
            let (n, m) = (step.result.num_agents(), step.result.num_items());
            if m > n + 5 {
                return Err(internal(format!("{} left {n} agents and {m} items", step.rule)));
            }
            if self.opts.paranoid && !check_valid(input, &step, self.budget())? {
                return Err(internal(format!("{} step is not a valid reduction", step.rule)));
            }
        }
        let next = step.result.clone();
        self.trace.push(TraceEntry::Step(step));
        Ok(next)
    }

    /// Records a matching that serves every agent as one removal step. The
    /// agent holding the largest bundle stays behind and takes the rest.
    fn full_match(&mut self, cur: &Instance, pivot: AgentId, alloc: Allocation) -> Result<Allocation> {
        let keep = (0..cur.num_agents())
            .rev()
            .max_by_key(|&a| alloc.bundle(a).len())
            .ok_or_else(|| internal("empty matching"))?;
        let assignment = (0..cur.num_agents()).filter(|&a| a != keep).map(|a| (a, alloc.bundle(a).clone())).collect();
        let step = ReductionStep::removal(
            cur,
            RuleId::HallMatching,
            assignment,
            format!("partition of agent {pivot} matches every agent"),
        )?;
        if self.opts.paranoid && !check_valid(cur, &step, self.budget())? {
            return Err(internal("full matching is not a valid reduction"));
        }
        let rest = step.result.num_items();
        self.trace.push(TraceEntry::Step(step));
        Ok(Allocation::new(vec![Bundle::new(0..rest)]))
    }

    fn small(&mut self, cur: &Instance) -> Result<Allocation> {
        let (n, m) = (cur.num_agents(), cur.num_items());
        match n {
            1 => {
                self.note("one agent takes every item");
                Ok(Allocation::new(vec![Bundle::new(0..m)]))
            }
            2 => {
                self.note("two agents: cut and choose");
                solve_two_agents(cur, self.budget())
            }
            3 => {
                let (alloc, case) = solve_three_agents_traced(cur, self.budget())?;
                self.note(format!("three agents: {case:?}"));
                Ok(alloc)
            }
            _ => Err(internal(format!("no small-case solver for {n} agents"))),
        }
    }

    fn non_negative(&mut self, cur: &Instance, g: Vec<Rational>) -> Result<Allocation> {
        let m = cur.num_items();
        if let Some(pivot) = g.iter().position(Rational::is_positive) {
            let rec = build_mimicked_given(cur, pivot, g)?;
            let step = ReductionStep::mimic(cur, rec);
            let next = self.step(cur, step)?;
            return self.positive_loop(next);
        }
        let zero = g
            .iter()
            .position(Rational::is_zero)
            .ok_or_else(|| internal("non-negative path without a non-negative agent"))?;
        self.note(format!("every guarantee <= 0: agent {zero} takes every item"));
        let mut bundles = vec![Bundle::empty(); cur.num_agents()];
        bundles[zero] = Bundle::new(0..m);
        Ok(Allocation::new(bundles))
    }

    fn positive_loop(&mut self, mut cur: Instance) -> Result<Allocation> {
        let budget = self.budget();
        loop {
            let n = cur.num_agents();
            if n <= 3 {
                return self.small(&cur);
            }
            let g = oracle::guarantees(&cur, budget)?;
            if let Some(a) = g.iter().position(|x| !x.is_positive()) {
                return Err(internal(format!("agent {a} lost its positive guarantee")));
            }
            let agents: Vec<usize> = (0..n).collect();
            let no_single = par::find_map_first(&agents, |&a| {
                oracle::find_mms_partition_given(&cur, a, g[a], PartitionPredicate::NoSingletonNoEmpty, budget)
                    .map(|p| p.map(|p| (a, p)))
                    .transpose()
            })
            .transpose()?;
            let step = match no_single {
                Some((pivot, partition)) => {
                    if !PartitionPredicate::NMinus1Small.holds_for(&partition) {
                        return Err(internal(format!(
                            "singleton-free optimum of agent {pivot} has sizes {:?}",
                            partition.sizes()
                        )));
                    }
                    match apply_hall_rule(&cur, pivot, &partition, budget)? {
                        HallOutcome::FullAllocation(a) => return self.full_match(&cur, pivot, a),
                        HallOutcome::Step(s) => s,
                    }
                }
                None => {
                    let per_agent = par::map_range(n, |a| {
                        oracle::find_mms_partition_given(&cur, a, g[a], PartitionPredicate::HasSingleton, budget)?
                            .ok_or_else(|| internal(format!("agent {a} has no optimum with a singleton")))
                    })
                    .into_iter()
                    .collect::<Result<Vec<_>>>()?;
                    apply_singleton_rule(&cur, &per_agent)?.ok_or_else(|| internal("singleton rule did not apply"))?
                }
            };
            cur = self.step(&cur, step)?;
        }
    }

    fn chores(&mut self, mut cur: Instance) -> Result<Allocation> {
        let budget = self.budget();
        loop {
            let n = cur.num_agents();
            if n <= 3 {
                return self.small(&cur);
            }
            let g = oracle::guarantees(&cur, budget)?;
            if g.iter().any(|x| !x.is_negative()) {
                self.note("a non-negative agent appeared");
                return self.non_negative(&cur, g);
            }
            let chores_agent = (0..n)
                .find(|&a| cur.is_chores_agent(a))
                .ok_or_else(|| internal("chores path lost its chores agents"))?;
            let step = match apply_chores_rule(&cur, chores_agent, budget)? {
                ChoresOutcome::FullAllocation(a) => return Ok(a),
                ChoresOutcome::Step(s) => s,
                ChoresOutcome::DelegateToHall { pivot, partition } => {
                    match apply_hall_rule(&cur, pivot, &partition, budget)? {
                        HallOutcome::FullAllocation(a) => return self.full_match(&cur, pivot, a),
                        HallOutcome::Step(s) => s,
                    }
                }
            };
            cur = self.step(&cur, step)?;
        }
    }

    fn finish(self, inst: &Instance, tail: Allocation, covered_by: CoveredBy) -> Result<SolveOutcome> {
        let budget = self.budget();
        let allocation = compose(inst, &steps_of(&self.trace), &tail, budget)?;
        let report = verify_mms(inst, &allocation, budget)?;
        if !report.satisfied {
            return Err(internal(format!(
                "pipeline allocation fails agents {:?}",
                report.unsatisfied_agents()
            )));
        }
        Ok(SolveOutcome {
            status: SolveStatus::Solved,
            allocation: Some(allocation),
            trace: self.trace,
            covered_by,
            tail: Some(tail),
            proven_nonexistent: false,
        })
    }
}

fn budget_outcome(trace: Vec<TraceEntry>, covered_by: CoveredBy) -> SolveOutcome {
    SolveOutcome {
        status: SolveStatus::BudgetExceeded,
        allocation: None,
        trace,
        covered_by,
        tail: None,
        proven_nonexistent: false,
    }
}

fn check_shape(inst: &Instance, opts: &SolveOptions) -> Result<()> {
    let (n, m) = (inst.num_agents(), inst.num_items());
    if m > n + 5 && !opts.allow_fallback {
        return Err(argument(format!("solver needs m <= n+5, got n={n}, m={m}")));
    }
    Ok(())
}

/// Runs the pipeline. Budget exhaustion is reported in the outcome; errors
/// are reserved for bad input and internal invariant failures.
pub fn solve(inst: &Instance, opts: SolveOptions) -> Result<SolveOutcome> {
    check_shape(inst, &opts)?;
    let (n, m) = (inst.num_agents(), inst.num_items());
    if m > n + 5 {
        return Ok(fallback_search(inst, opts.budget));
    }
    let mut run = Run { opts: &opts, trace: Vec::new() };
    let sop = ReductionStep::sop(inst);
    let cur = run.step(inst, sop)?;

    let mut covered_by = CoveredBy::None;
    let result = (|| -> Result<Option<Allocation>> {
        if n <= 3 {
            covered_by = CoveredBy::NLe3;
            run.note(format!("dispatch: n = {n} <= 3"));
            return run.small(&cur).map(Some);
        }
        let g = oracle::guarantees(&cur, opts.budget)?;
        if let Some(a) = g.iter().position(|x| !x.is_negative()) {
            covered_by = CoveredBy::NonNegativeAgent;
            run.note(format!("dispatch: agent {a} is non-negative"));
            return run.non_negative(&cur, g).map(Some);
        }
        if (0..n).all(|a| cur.is_chores_agent(a)) {
            covered_by = CoveredBy::AllChoresAgents;
            run.note("dispatch: every agent is a chores agent");
            return run.chores(cur.clone()).map(Some);
        }
        run.note("dispatch: negative mixed agents only, no constructive path");
        Ok(None)
    })();

    match result {
        Ok(Some(tail)) => match run.finish(inst, tail, covered_by) {
            Err(MmsError::BudgetExceeded { .. }) => Ok(budget_outcome(Vec::new(), covered_by)),
            other => other,
        },
        Ok(None) => {
            let fb = fallback_search(&cur, opts.budget);
            run.trace.extend(fb.trace);
            match fb.tail {
                Some(tail) => {
                    let mut out = run.finish(inst, tail, CoveredBy::FallbackSearch)?;
                    out.covered_by = CoveredBy::FallbackSearch;
                    Ok(out)
                }
                None => Ok(SolveOutcome {
                    status: fb.status,
                    allocation: None,
                    trace: run.trace,
                    covered_by: CoveredBy::None,
                    tail: None,
                    proven_nonexistent: fb.proven_nonexistent,
                }),
            }
        }
        Err(MmsError::BudgetExceeded { .. }) => Ok(budget_outcome(run.trace, covered_by)),
        Err(e) => Err(e),
    }
}

/// Solves an instance known to have a non-negative agent. `inst` must be SOP.
pub fn non_negative_path(inst: &Instance, opts: SolveOptions) -> Result<SolveOutcome> {
    check_shape(inst, &opts)?;
    if !is_sop(inst) {
        return Err(argument("non-negative path needs a same-order-preference instance"));
    }
    let mut run = Run { opts: &opts, trace: Vec::new() };
    let result = (|| {
        let g = oracle::guarantees(inst, opts.budget)?;
        if g.iter().all(Rational::is_negative) {
            return Err(argument("no agent has a non-negative guarantee"));
        }
        run.non_negative(inst, g)
    })();
    match result {
        Ok(tail) => run.finish(inst, tail, CoveredBy::NonNegativeAgent),
        Err(MmsError::BudgetExceeded { .. }) => Ok(budget_outcome(run.trace, CoveredBy::NonNegativeAgent)),
        Err(e) => Err(e),
    }
}

/// Solves an instance in which every agent is a chores agent. `inst` must be SOP.
pub fn chores_path(inst: &Instance, opts: SolveOptions) -> Result<SolveOutcome> {
    check_shape(inst, &opts)?;
    if !is_sop(inst) {
        return Err(argument("chores path needs a same-order-preference instance"));
    }
    if let Some(a) = (0..inst.num_agents()).find(|&a| !inst.is_chores_agent(a)) {
        return Err(argument(format!("agent {a} is not a chores agent")));
    }
    let mut run = Run { opts: &opts, trace: Vec::new() };
    match run.chores(inst.clone()) {
        Ok(tail) => run.finish(inst, tail, CoveredBy::AllChoresAgents),
        Err(MmsError::BudgetExceeded { .. }) => Ok(budget_outcome(run.trace, CoveredBy::AllChoresAgents)),
        Err(e) => Err(e),
    }
}

/// Items up to this depth are fixed per parallel task.
const PREFIX_DEPTH: usize = 6;
/// Nodes counted locally before touching the shared counter.
const NODE_BATCH: u64 = 1024;

struct Fallback<'a> {
    rows: Vec<Vec<i128>>,
    targets: Vec<i128>,
    n: usize,
    m: usize,
    nodes: &'a AtomicU64,
    limit: u64,
}

struct Cursor {
    labels: Vec<usize>,
    sums: Vec<Vec<i128>>,
    open: usize,
    local: u64,
}

impl Fallback<'_> {
    fn tick(&self, cur: &mut Cursor) -> Result<()> {
        cur.local += 1;
        if cur.local == NODE_BATCH {
            cur.local = 0;
            let seen = self.nodes.fetch_add(NODE_BATCH, Ordering::Relaxed) + NODE_BATCH;
            if seen > self.limit {
                return Err(MmsError::BudgetExceeded { limit: self.limit });
            }
        }
        Ok(())
    }

    fn place(&self, cur: &mut Cursor, item: usize, b: usize) {
        cur.labels.push(b);
        for (a, row) in self.rows.iter().enumerate() {
            cur.sums[a][b] += row[item];
        }
    }

    fn unplace(&self, cur: &mut Cursor, item: usize) {
        let b = cur.labels.pop().expect("placed item");
        for (a, row) in self.rows.iter().enumerate() {
            cur.sums[a][b] -= row[item];
        }
    }

    fn leaf(&self, cur: &Cursor) -> Option<Allocation> {
        let adj: Vec<Vec<usize>> = (0..self.n)
            .map(|a| (0..self.n).filter(|&b| cur.sums[a][b] >= self.targets[a]).collect())
            .collect();
        let matching = perfect_matching(&adj, self.n)?;
        let mut bundles = vec![Vec::new(); self.n];
        for (item, &b) in cur.labels.iter().enumerate() {
            bundles[b].push(item);
        }
        Some(Allocation::new(matching.into_iter().map(|b| Bundle::new(bundles[b].iter().copied())).collect()))
    }

    fn dfs(&self, cur: &mut Cursor) -> Result<Option<Allocation>> {
        self.tick(cur)?;
        let item = cur.labels.len();
        if item == self.m {
            return Ok(self.leaf(cur));
        }
        let limit = (cur.open + 1).min(self.n);
        for b in 0..limit {
            let opened = b == cur.open;
            self.place(cur, item, b);
            if opened {
                cur.open += 1;
            }
            let found = self.dfs(cur);
            if opened {
                cur.open -= 1;
            }
            self.unplace(cur, item);
            if let Some(a) = found? {
                return Ok(Some(a));
            }
        }
        Ok(None)
    }

    fn cursor(&self) -> Cursor {
        Cursor { labels: Vec::with_capacity(self.m), sums: vec![vec![0; self.n]; self.n], open: 0, local: 0 }
    }

    /// Canonical label strings of length `depth`.
    fn prefixes(&self, depth: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut stack = vec![(Vec::new(), 0usize)];
        while let Some((labels, open)) = stack.pop() {
            if labels.len() == depth {
                out.push(labels);
                continue;
            }
            for b in (0..(open + 1).min(self.n)).rev() {
                let mut next = labels.clone();
                next.push(b);
                stack.push((next, open.max(b + 1)));
            }
        }
        out
    }

    fn search_from(&self, prefix: &[usize]) -> Result<Option<Allocation>> {
        let mut cur = self.cursor();
        for (item, &b) in prefix.iter().enumerate() {
            self.place(&mut cur, item, b);
            cur.open = cur.open.max(b + 1);
        }
        self.dfs(&mut cur)
    }
}

/// Exhaustive search over canonical allocations for one that is MMS for every
/// agent. Never fails: an exhausted budget is reported as an unknown status.
pub fn fallback_search(inst: &Instance, budget: SearchBudget) -> SolveOutcome {
    fallback_search_with(inst, budget, Exec::Parallel)
}

pub fn fallback_search_with(inst: &Instance, budget: SearchBudget, exec: Exec) -> SolveOutcome {
    let unknown = |note: String, proven: bool| SolveOutcome {
        status: SolveStatus::UnknownUncoveredCase,
        allocation: None,
        trace: vec![TraceEntry::Note(note)],
        covered_by: CoveredBy::None,
        tail: None,
        proven_nonexistent: proven,
    };
    let g = match oracle::guarantees(inst, budget) {
        Ok(g) => g,
        Err(e) => return unknown(format!("fallback search: guarantees unavailable ({e})"), false),
    };
    let (n, m) = (inst.num_agents(), inst.num_items());
    let mut rows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for (a, ga) in g.iter().enumerate() {
        let scale = Rational::common_denominator(inst.row(a));
        rows.push(inst.row(a).iter().map(|u| u.scaled(scale)).collect());
        targets.push(ga.scaled(scale));
    }
    let nodes = AtomicU64::new(0);
    let search = Fallback { rows, targets, n, m, nodes: &nodes, limit: budget.max_nodes };
    let prefixes = search.prefixes(m.min(PREFIX_DEPTH));
    let found = par::find_map_first_with(exec, &prefixes, |p| search.search_from(p).transpose());
    match found {
        Some(Ok(alloc)) => SolveOutcome {
            status: SolveStatus::Solved,
            trace: vec![TraceEntry::Note("fallback search found an MMS allocation".into())],
            allocation: Some(alloc.clone()),
            covered_by: CoveredBy::FallbackSearch,
            tail: Some(alloc),
            proven_nonexistent: false,
        },
        Some(Err(e)) => unknown(format!("fallback search stopped: {e}"), false),
        None => unknown("fallback search exhausted: no MMS allocation exists".into(), true),
    }
}

/// Solves every instance, in parallel when `exec` asks for it.
pub fn solve_batch(insts: &[Instance], opts: SolveOptions, exec: Exec) -> Vec<Result<SolveOutcome>> {
    par::map_with(exec, insts, |inst| solve(inst, opts))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> SolveOptions {
        SolveOptions { paranoid: true, ..SolveOptions::default() }
    }

    fn solved(inst: &Instance, covered: CoveredBy) -> SolveOutcome {
        let out = solve(inst, opts()).unwrap();
        assert_eq!(out.status, SolveStatus::Solved, "{:?}", out.trace);
        assert_eq!(out.covered_by, covered);
        let alloc = out.allocation.as_ref().unwrap();
        assert!(verify_mms(inst, alloc, SearchBudget::default()).unwrap().satisfied);
        out
    }

    #[test]
    fn two_agent_unit_chores() {
        let inst = Instance::from_integers(&[[-1, -1, -1, -1], [-1, -1, -1, -1]]).unwrap();
        let out = solved(&inst, CoveredBy::NLe3);
        let alloc = out.allocation.unwrap();
        for a in 0..2 {
            assert!(inst.bundle_utility(a, alloc.bundle(a)).unwrap() >= Rational::from(-2));
        }
    }

    #[test]
    fn all_chores_identical() {
        let inst = Instance::from_integers(&[[-1; 9]; 4]).unwrap();
        let out = solved(&inst, CoveredBy::AllChoresAgents);
        let alloc = out.allocation.unwrap();
        for a in 0..4 {
            assert!(inst.bundle_utility(a, alloc.bundle(a)).unwrap() >= Rational::from(-3));
        }
    }

    #[test]
    fn zero_row_takes_everything() {
        let inst = Instance::from_integers(&[[-1, -2, -3, -1, -1], [0, 0, 0, 0, 0], [-4, -1, -1, -1, -2], [-1; 5]])
            .unwrap();
        let out = solved(&inst, CoveredBy::NonNegativeAgent);
        assert_eq!(out.allocation.unwrap().bundle(1).len(), 5);
    }

    #[test]
    fn goods_four_by_nine() {
        let inst = Instance::from_integers(&[
            [9, 8, 7, 6, 5, 4, 3, 2, 1],
            [1, 2, 3, 4, 5, 6, 7, 8, 9],
            [5, 5, 5, 5, 5, 5, 5, 5, 5],
            [3, 9, 1, 7, 2, 8, 4, 6, 5],
        ])
        .unwrap();
        solved(&inst, CoveredBy::NonNegativeAgent);
    }

    #[test]
    fn positive_pivot_with_negative_others() {
        let inst = Instance::from_integers(&[
            [4, 3, -1, 2, 5, 1, 0, 2],
            [-2, -1, -3, -1, -1, -2, 1, -1],
            [-1, -1, -1, -1, -1, -1, -1, -1],
            [-3, 2, -2, -1, -4, -1, -1, -1],
        ])
        .unwrap();
        let out = solved(&inst, CoveredBy::NonNegativeAgent);
        assert!(out.steps().iter().any(|s| s.rule == crate::reductions::RuleId::Mimic));
    }

    #[test]
    fn negative_mixed_goes_to_fallback() {
        let inst = Instance::from_integers(&[[1, 1, 1, 1, 1, 1, -3, -3, -3]; 4]).unwrap();
        let out = solve(&inst, opts()).unwrap();
        assert_eq!(out.status, SolveStatus::Solved);
        assert_eq!(out.covered_by, CoveredBy::FallbackSearch);
        assert!(verify_mms(&inst, out.allocation.as_ref().unwrap(), SearchBudget::default()).unwrap().satisfied);
    }

    #[test]
    fn too_many_items() {
        let inst = Instance::from_integers(&[[1; 8]; 2]).unwrap();
        let err = solve(&inst, opts()).unwrap_err();
        assert!(err.to_string().contains("m <= n+5"), "{err}");
        let out = solve(&inst, SolveOptions { allow_fallback: true, ..opts() }).unwrap();
        assert_eq!(out.covered_by, CoveredBy::FallbackSearch);
    }

    #[test]
    fn fallback_single_agent_and_budget() {
        let inst = Instance::from_integers(&[[3, -1, 2]]).unwrap();
        let out = fallback_search(&inst, SearchBudget::default());
        assert_eq!(out.allocation, Some(Allocation::from_vecs(&[vec![0, 1, 2]])));

        let big = Instance::from_integers(&[[5, 4, 3, 3, 2, 2, 1, 1, 1, 1]; 5]).unwrap();
        let out = fallback_search(&big, SearchBudget::new(10));
        assert_eq!(out.status, SolveStatus::UnknownUncoveredCase);
        assert!(!out.proven_nonexistent);
    }

    #[test]
    fn fallback_sequential_matches_parallel() {
        let inst = Instance::from_integers(&[[3, -2, 5, 1, -1, 2, 0], [1, 1, -4, 2, 2, -1, 3], [-1, 4, 2, -2, 1, 1, 1]])
            .unwrap();
        let a = fallback_search_with(&inst, SearchBudget::default(), Exec::Sequential);
        let b = fallback_search_with(&inst, SearchBudget::default(), Exec::Parallel);
        assert_eq!(a, b);
        assert!(a.is_solved());
    }

    #[test]
    fn budget_reported_in_status() {
        let inst = Instance::from_integers(&[[9, 8, 7, 6, 5, 4, 3, 2, 1]; 4]).unwrap();
        let out = solve(&inst, SolveOptions { budget: SearchBudget::new(5), ..opts() }).unwrap();
        assert_eq!(out.status, SolveStatus::BudgetExceeded);
    }

    #[test]
    fn path_preconditions() {
        let not_sop = Instance::from_integers(&[[1, 2], [2, 1]]).unwrap();
        assert!(non_negative_path(&not_sop, opts()).is_err());
        let mixed = Instance::from_integers(&[[2, -1], [-1, -1]]).unwrap();
        assert!(chores_path(&mixed, opts()).is_err());
        let chores = Instance::from_integers(&[[-1; 9]; 4]).unwrap();
        assert!(chores_path(&chores, opts()).unwrap().is_solved());
    }
}
