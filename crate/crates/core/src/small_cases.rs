//! Constructive MMS allocations for two and three agents.
//!
//! Two agents use divide-and-choose. Three agents work from one optimal
//! partition per agent: when some partition has a bundle of size at most one or
//! two bundles of size two, two bundles across a pair of partitions are
//! disjoint and an allocation follows from the disjointness graph; otherwise
//! each partition is shaped (2,3,3) and a dummy item reduces to the 3x9
//! construction.

use crate::error::{argument, internal, Result};
use crate::instance::{AgentId, Allocation, Bundle, Instance, ItemId};
use crate::matching::perfect_matching;
use crate::oracle::{self, PartitionPredicate, SearchBudget};
use crate::rational::Rational;
use crate::reductions::is_sop;
use crate::sop;

/// Divide and choose: agent 0 splits by its optimal partition, agent 1 takes
/// the bundle it prefers (the second on ties).
pub fn solve_two_agents(inst: &Instance, budget: SearchBudget) -> Result<Allocation> {
    if inst.num_agents() != 2 {
        return Err(argument(format!("divide and choose needs 2 agents, got {}", inst.num_agents())));
    }
    let w = oracle::mms_guarantee_within(inst, 0, 2, budget)?.witness.into_bundles();
    let (a, b) = (w[0].clone(), w[1].clone());
    let alloc = if inst.bundle_utility_unchecked(1, &a) > inst.bundle_utility_unchecked(1, &b) {
        vec![b, a]
    } else {
        vec![a, b]
    };
    Ok(Allocation::new(alloc))
}

/// Bipartite graph between the bundles of two 3-bundle partitions with an
/// edge for every disjoint pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DisjointnessGraph {
    pub left: Vec<Bundle>,
    pub right: Vec<Bundle>,
    pub edges: Vec<(usize, usize)>,
}

pub fn build_disjointness_graph(pi_i: &Allocation, pi_j: &Allocation) -> Result<DisjointnessGraph> {
    if pi_i.len() != 3 || pi_j.len() != 3 {
        return Err(argument("disjointness graphs are defined for 3-bundle partitions"));
    }
    let items = |p: &Allocation| {
        let mut v: Vec<ItemId> = p.bundles().iter().flat_map(|b| b.items().iter().copied()).collect();
        v.sort_unstable();
        v
    };
    if items(pi_i) != items(pi_j) {
        return Err(argument("partitions cover different item sets"));
    }
    let mut edges = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            if pi_i.bundle(x).is_disjoint(pi_j.bundle(y)) {
                edges.push((x, y));
            }
        }
    }
    Ok(DisjointnessGraph { left: pi_i.bundles().to_vec(), right: pi_j.bundles().to_vec(), edges })
}

fn satisfaction_assignment(inst: &Instance, candidate: &Allocation, g: &[Rational]) -> Option<Allocation> {
    if candidate.len() != inst.num_agents() {
        return None;
    }
    let adj: Vec<Vec<usize>> = (0..inst.num_agents())
        .map(|a| {
            (0..candidate.len())
                .filter(|&b| inst.bundle_utility_unchecked(a, candidate.bundle(b)) >= g[a])
                .collect()
        })
        .collect();
    perfect_matching(&adj, candidate.len())
        .map(|m| Allocation::new(m.into_iter().map(|b| candidate.bundle(b).clone()).collect()))
}

/// Hands the candidate's bundles to agents so that everyone is satisfied, if possible.
pub fn assign_by_satisfaction(inst: &Instance, candidate: &Allocation, budget: SearchBudget) -> Result<Option<Allocation>> {
    candidate.validate(inst.num_items())?;
    let g = oracle::guarantees(inst, budget)?;
    Ok(satisfaction_assignment(inst, candidate, &g))
}

/// Which branch of the three-agent analysis produced the allocation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThreeAgentCase {
    SmallBundle,
    TwoPairs,
    ThreeNine(ThreeNineCase),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ThreeNineCase {
    IdenticalBundles,
    ShareTwoItemsDirect,
    ShareTwoItemsSwap,
    SingleIntersections,
}

/// The three-bundle candidate `(a, b, rest)` built from an edge of the
/// disjointness graph.
pub fn edge_candidate(num_items: usize, a: &Bundle, b: &Bundle) -> Allocation {
    let ab = a.union(b);
    let rest = Bundle::new((0..num_items).filter(|&j| !ab.contains(j)));
    Allocation::new(vec![a.clone(), b.clone(), rest])
}

/// Whether agent `i` values some bundle of its own partition other than
/// `pi_i[x]` at least as much as `bundle`.
fn edge_hypothesis(inst: &Instance, i: AgentId, pi_i: &Allocation, x: usize, bundle: &Bundle) -> bool {
    let target = inst.bundle_utility_unchecked(i, bundle);
    (0..3).any(|z| z != x && inst.bundle_utility_unchecked(i, pi_i.bundle(z)) >= target)
}

/// Resolves a pair of partitions whose disjointness graph has at least two edges.
fn resolve_two_edges(
    inst: &Instance,
    g: &[Rational],
    i: AgentId,
    j: AgentId,
    pi_i: &Allocation,
    pi_j: &Allocation,
) -> Result<Option<Allocation>> {
    let graph = build_disjointness_graph(pi_i, pi_j)?;
    if graph.edges.len() < 2 {
        return Ok(None);
    }
    let m = inst.num_items();
    for &(x, y) in &graph.edges {
        for (agent, own, ox, other, oy) in [(i, pi_i, x, pi_j, y), (j, pi_j, y, pi_i, x)] {
            if edge_hypothesis(inst, agent, own, ox, other.bundle(oy)) {
                let cand = edge_candidate(m, own.bundle(ox), other.bundle(oy));
                return satisfaction_assignment(inst, &cand, g)
                    .map(Some)
                    .ok_or_else(|| internal(format!("edge candidate for agents {agent} failed: {cand:?}")));
            }
        }
    }
    // Every edge fails the value test, so one partition has two bundles the
    // other agent is satisfied with; let the third agent pick first from it.
    for p in [pi_j, pi_i] {
        if let Some(a) = satisfaction_assignment(inst, p, g) {
            return Ok(Some(a));
        }
    }
    Err(internal("two disjoint edges but no picking order succeeded"))
}

fn two_edge_path(inst: &Instance, g: &[Rational], w: &[Allocation], i: AgentId) -> Result<Allocation> {
    for j in (0..3).filter(|&j| j != i) {
        if let Some(a) = resolve_two_edges(inst, g, i, j, &w[i], &w[j])? {
            return Ok(a);
        }
    }
    Err(internal(format!("partition of agent {i} should give two disjoint edges")))
}

/// MMS allocation for three agents and at most eight items.
pub fn solve_three_agents(inst: &Instance, budget: SearchBudget) -> Result<Allocation> {
    solve_three_agents_traced(inst, budget).map(|(a, _)| a)
}

pub fn solve_three_agents_traced(inst: &Instance, budget: SearchBudget) -> Result<(Allocation, ThreeAgentCase)> {
    let (n, m) = (inst.num_agents(), inst.num_items());
    if n != 3 || m > 8 {
        return Err(argument(format!("three-agent solver needs n = 3 and m <= 8, got n={n}, m={m}")));
    }
    let padded = inst.pad_with_dummies(8)?;
    let certs = oracle::certificates(&padded, budget)?;
    let g: Vec<Rational> = certs.iter().map(|c| c.guarantee).collect();
    let mut w: Vec<Allocation> = certs.into_iter().map(|c| c.witness).collect();

    let strip = |a: Allocation| Allocation::new(a.bundles().iter().map(|b| b.map_items(|j| (j < m).then_some(j))).collect());

    for (pred, case) in [
        (PartitionPredicate::HasEmptyOrSingleton, ThreeAgentCase::SmallBundle),
        (PartitionPredicate::TwoPairs, ThreeAgentCase::TwoPairs),
    ] {
        if let Some(i) = (0..3).find(|&i| pred.holds_for(&w[i])) {
            return Ok((strip(two_edge_path(&padded, &g, &w, i)?), case));
        }
        for i in 0..3 {
            if let Some(p) = oracle::find_mms_partition_given(&padded, i, g[i], pred, budget)? {
                w[i] = p;
                return Ok((strip(two_edge_path(&padded, &g, &w, i)?), case));
            }
        }
    }

    // Every optimal partition is shaped (2, 3, 3): put a dummy ninth item in
    // each 2-bundle and solve the 3x9 instance in SOP form.
    let inst9 = padded.pad_with_dummies(9)?;
    let dummy = 8;
    let mut w9 = Vec::with_capacity(3);
    for (i, p) in w.iter().enumerate() {
        let mut sizes = p.sizes();
        sizes.sort_unstable();
        if sizes != [2, 3, 3] {
            return Err(internal(format!("agent {i} partition has shape {sizes:?}, expected (2,3,3)")));
        }
        w9.push(Allocation::new(
            p.bundles().iter().map(|b| if b.len() == 2 { b.with(dummy) } else { b.clone() }).collect(),
        ));
    }
    let t = sop::to_sop(&inst9);
    let w9_sop: Vec<Allocation> = w9
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rank = [0; 9];
            for (r, &j) in t.perms[i].iter().enumerate() {
                rank[j] = r;
            }
            Allocation::new(p.bundles().iter().map(|b| b.map_items(|j| Some(rank[j]))).collect())
        })
        .collect();
    let (sop_alloc, case) = construct_3x9_traced(&t.sop_instance, &w9_sop, budget)?;
    let lifted = sop::lift_allocation(&t, &sop_alloc)?;
    Ok((strip(lifted), ThreeAgentCase::ThreeNine(case)))
}

/// MMS allocation for an SOP 3x9 instance in which every agent has an optimal
/// partition into three 3-bundles (the given `witnesses`).
pub fn construct_3x9(inst: &Instance, witnesses: &[Allocation], budget: SearchBudget) -> Result<Allocation> {
    construct_3x9_traced(inst, witnesses, budget).map(|(a, _)| a)
}

pub fn construct_3x9_traced(
    inst: &Instance,
    witnesses: &[Allocation],
    budget: SearchBudget,
) -> Result<(Allocation, ThreeNineCase)> {
    if inst.num_agents() != 3 || inst.num_items() != 9 || witnesses.len() != 3 {
        return Err(argument("3x9 construction needs three agents, nine items and three partitions"));
    }
    if !is_sop(inst) {
        return Err(argument("3x9 construction needs a same-order-preference instance"));
    }
    let g = oracle::guarantees(inst, budget)?;
    for (i, w) in witnesses.iter().enumerate() {
        w.validate(9)?;
        if w.len() != 3 || w.sizes() != [3, 3, 3] {
            return Err(argument(format!("partition of agent {i} is not three 3-bundles")));
        }
        if w.min_utility(inst, i) < g[i] {
            return Err(argument(format!("partition of agent {i} is not MMS for it")));
        }
    }
    let (alloc, case) = three_nine_cases(inst, &g, witnesses)?;
    alloc.validate_for(inst)?;
    if let Some(a) = (0..3).find(|&a| inst.bundle_utility_unchecked(a, alloc.bundle(a)) < g[a]) {
        return Err(internal(format!("3x9 case {case:?} left agent {a} unsatisfied")));
    }
    Ok((alloc, case))
}

fn three_nine_cases(inst: &Instance, g: &[Rational], w: &[Allocation]) -> Result<(Allocation, ThreeNineCase)> {
    let u = |a: AgentId, b: &Bundle| inst.bundle_utility_unchecked(a, b);
    let pairs = [(0, 1), (0, 2), (1, 2)];

    // Identical bundles: agent i likes two bundles of j's partition.
    for &(i, j) in &pairs {
        for a in w[i].bundles() {
            if w[j].bundles().contains(a) {
                let alloc = satisfaction_assignment(inst, &w[j], g)
                    .ok_or_else(|| internal("identical-bundle picking order failed"))?;
                return Ok((alloc, ThreeNineCase::IdenticalBundles));
            }
        }
    }

    // Two bundles differing in one item.
    for &(i, j) in &pairs {
        for bi in w[i].bundles() {
            for bj in w[j].bundles() {
                if bi.intersection_len(bj) != 2 {
                    continue;
                }
                let pi = bi.difference(bj).items()[0];
                let pj = bj.difference(bi).items()[0];
                // Lower index is at least as valuable to everyone; p1 owns the weaker bundle.
                let (p1, c1, p2, c2) = if pj < pi { (i, bi, j, bj) } else { (j, bj, i, bi) };
                let p3 = 3 - p1 - p2;
                let x = c1.difference(c2).items()[0];
                let y = c2.difference(c1).items()[0];
                let others: Vec<&Bundle> = w[p1].bundles().iter().filter(|b| *b != c1).collect();
                let (sat, rest) = if u(p2, others[0]) >= g[p2] {
                    (others[0], others[1])
                } else if u(p2, others[1]) >= g[p2] {
                    (others[1], others[0])
                } else {
                    return Err(internal("neither remaining bundle satisfies the second agent"));
                };
                let mut bundles = vec![Bundle::empty(); 3];
                if u(p3, c1) >= g[p3] {
                    bundles[p3] = c1.clone();
                    bundles[p2] = sat.clone();
                    bundles[p1] = rest.clone();
                    return Ok((Allocation::new(bundles), ThreeNineCase::ShareTwoItemsDirect));
                }
                let d = w[p2]
                    .bundles()
                    .iter()
                    .find(|b| b.contains(x))
                    .ok_or_else(|| internal("swapped item not found"))?;
                let e = w[p2]
                    .bundles()
                    .iter()
                    .find(|b| *b != d && *b != c2)
                    .ok_or_else(|| internal("third bundle not found"))?;
                let d2 = d.without(x).with(y);
                bundles[p1] = c1.clone();
                if u(p3, &d2) >= g[p3] {
                    bundles[p3] = d2;
                    bundles[p2] = e.clone();
                } else {
                    bundles[p3] = e.clone();
                    bundles[p2] = d2;
                }
                return Ok((Allocation::new(bundles), ThreeNineCase::ShareTwoItemsSwap));
            }
        }
    }

    // Every cross intersection is a single item; the least valuable item
    // (index 8) anchors one bundle per partition.
    let last = 8;
    let f: Vec<&Bundle> = w
        .iter()
        .map(|p| p.bundles().iter().find(|b| b.contains(last)).expect("partition covers every item"))
        .collect();
    for &(i, j) in &pairs {
        if f[i].intersection_len(f[j]) != 1 {
            return Err(internal("3x9 case analysis is not exhaustive for these partitions"));
        }
    }
    let covered = f[0].union(f[1]).union(f[2]);
    let outside: Vec<ItemId> = (0..9).filter(|&j| !covered.contains(j)).collect();
    let [ox, oy] = outside.as_slice() else {
        return Err(internal(format!("expected two uncovered items, found {outside:?}")));
    };
    let bundles = vec![f[0].without(last).with(*oy), f[1].without(last).with(*ox), f[2].clone()];
    Ok((Allocation::new(bundles), ThreeNineCase::SingleIntersections))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify_mms;

    fn budget() -> SearchBudget {
        SearchBudget::default()
    }

    fn utilities(inst: &Instance, a: &Allocation) -> Vec<Rational> {
        (0..inst.num_agents()).map(|i| inst.bundle_utility(i, a.bundle(i)).unwrap()).collect()
    }

    #[test]
    fn two_agents_identical_rows() {
        let inst = Instance::from_integers(&[[3, 1, 1, 1]; 2]).unwrap();
        let a = solve_two_agents(&inst, budget()).unwrap();
        assert_eq!(utilities(&inst, &a), vec![Rational::from(3); 2]);
    }

    #[test]
    fn two_agents_separate_items() {
        let inst = Instance::from_integers(&[[1, 0], [0, 1]]).unwrap();
        let a = solve_two_agents(&inst, budget()).unwrap();
        assert_eq!(oracle::guarantees(&inst, budget()).unwrap(), vec![Rational::ZERO; 2]);
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn two_agents_chores() {
        let inst = Instance::from_integers(&[[-1, -1]; 2]).unwrap();
        let a = solve_two_agents(&inst, budget()).unwrap();
        assert_eq!(utilities(&inst, &a), vec![Rational::from(-1); 2]);
        assert!(solve_two_agents(&Instance::from_integers(&[[1]; 3]).unwrap(), budget()).is_err());
    }

    #[test]
    fn disjointness_graph_examples() {
        let p = Allocation::from_vecs(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        assert_eq!(build_disjointness_graph(&p, &p).unwrap().edges.len(), 6);
        let q = Allocation::from_vecs(&[vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]);
        assert!(build_disjointness_graph(&p, &q).unwrap().edges.is_empty());
        let s = Allocation::from_vecs(&[vec![0], vec![1, 2, 3, 4], vec![5, 6, 7, 8]]);
        let gr = build_disjointness_graph(&s, &q).unwrap();
        assert!(gr.edges.iter().filter(|(x, _)| *x == 0).count() >= 2);
        assert!(build_disjointness_graph(&p, &Allocation::from_vecs(&[vec![0], vec![1]])).is_err());
    }

    #[test]
    fn assign_examples() {
        let one = Instance::from_integers(&[[2, -1, 4]]).unwrap();
        let w = oracle::mms_guarantee(&one, 0, 1).unwrap().witness;
        assert_eq!(assign_by_satisfaction(&one, &w, budget()).unwrap(), Some(w));
        let inst = Instance::from_integers(&[[5, 5, 1], [5, 5, 1]]).unwrap();
        let bad = Allocation::from_vecs(&[vec![0, 1, 2], vec![]]);
        assert_eq!(assign_by_satisfaction(&inst, &bad, budget()).unwrap(), None);
    }

    #[test]
    fn three_identical_rows_three_items() {
        let inst = Instance::from_integers(&[[4, 2, 1]; 3]).unwrap();
        let (a, case) = solve_three_agents_traced(&inst, budget()).unwrap();
        assert_eq!(case, ThreeAgentCase::SmallBundle);
        assert!(a.bundles().iter().all(|b| b.len() == 1));
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn three_identical_chores_eight_items() {
        let inst = Instance::from_integers(&[[-1; 8]; 3]).unwrap();
        let (a, case) = solve_three_agents_traced(&inst, budget()).unwrap();
        assert!(matches!(case, ThreeAgentCase::ThreeNine(_)), "{case:?}");
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn three_agents_rejects_shapes() {
        assert!(solve_three_agents(&Instance::from_integers(&[[1; 9]; 3]).unwrap(), budget()).is_err());
        assert!(solve_three_agents(&Instance::from_integers(&[[1; 4]; 2]).unwrap(), budget()).is_err());
    }

    #[test]
    fn three_nine_identical_witnesses() {
        let inst = Instance::from_integers(&[[9, 8, 7, 6, 5, 4, 3, 2, 1]; 3]).unwrap();
        let w = Allocation::from_vecs(&[vec![0, 4, 8], vec![1, 5, 6], vec![2, 3, 7]]);
        assert_eq!(w.min_utility(&inst, 0), oracle::mms_guarantee(&inst, 0, 3).unwrap().guarantee);
        let (a, case) = construct_3x9_traced(&inst, &[w.clone(), w.clone(), w], budget()).unwrap();
        assert_eq!(case, ThreeNineCase::IdenticalBundles);
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn three_nine_orthogonal_witnesses() {
        let inst = Instance::from_integers(&[[1; 9]; 3]).unwrap();
        let rows = Allocation::from_vecs(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8]]);
        let cols = Allocation::from_vecs(&[vec![0, 3, 6], vec![1, 4, 7], vec![2, 5, 8]]);
        let diag = Allocation::from_vecs(&[vec![0, 4, 8], vec![1, 5, 6], vec![2, 3, 7]]);
        let (a, case) = construct_3x9_traced(&inst, &[rows, cols, diag], budget()).unwrap();
        assert_eq!(case, ThreeNineCase::SingleIntersections);
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn three_agents_all_optima_two_three_three() {
        // similar-sized chores force every optimum into shape (2,3,3)
        let inst = Instance::from_integers(&[
            [-10, -12, -11, -13, -10, -14, -12, -11],
            [-13, -13, -10, -12, -11, -10, -14, -12],
            [-11, -10, -10, -10, -12, -13, -11, -14],
        ])
        .unwrap();
        let (a, case) = solve_three_agents_traced(&inst, budget()).unwrap();
        assert!(matches!(case, ThreeAgentCase::ThreeNine(_)), "{case:?}");
        assert!(verify_mms(&inst, &a, budget()).unwrap().satisfied);
    }

    #[test]
    fn three_nine_rejects_non_sop() {
        let inst = Instance::from_integers(&[[1, 2, 3, 4, 5, 6, 7, 8, 9]; 3]).unwrap();
        let w = Allocation::from_vecs(&[vec![0, 5, 8], vec![1, 4, 7], vec![2, 3, 6]]);
        assert!(construct_3x9(&inst, &[w.clone(), w.clone(), w], budget()).is_err());
    }
}
