//! Solver traces: one record per reduction step or dispatch decision, plus
//! the tail allocation so the result can be replayed from the input alone.

use mms_core::mimic::build_mimicked;
use mms_core::reductions::compose;
use mms_core::{
    Allocation, Bundle, Instance, MmsError, ReductionStep, RuleId, SearchBudget, SolveOutcome, StepDetail,
    TraceEntry,
};
use serde::{Deserialize, Serialize};

use crate::formats::AllocationFile;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Assignment {
    pub agent: usize,
    pub bundle: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceRecord {
    /// `None` for dispatch notes.
    pub rule_id: Option<String>,
    pub removed_agents: Vec<usize>,
    pub removed_items: Vec<usize>,
    pub assignment: Vec<Assignment>,
    pub case_annotation: String,
    /// Pivot agent of a MIMIC step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivot: Option<usize>,
    /// Item count after a DUMMY_PAD step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub padded_items: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TraceFile {
    pub status: String,
    pub covered_by: String,
    pub proven_nonexistent: bool,
    pub records: Vec<TraceRecord>,
    pub tail: Option<AllocationFile>,
    pub allocation: Option<AllocationFile>,
}

fn record(entry: &TraceEntry) -> TraceRecord {
    match entry {
        TraceEntry::Note(text) => TraceRecord {
            rule_id: None,
            removed_agents: vec![],
            removed_items: vec![],
            assignment: vec![],
            case_annotation: text.clone(),
            pivot: None,
            padded_items: None,
        },
        TraceEntry::Step(step) => TraceRecord {
            rule_id: Some(step.rule.as_str().to_string()),
            removed_agents: step.removed_agents.clone(),
            removed_items: step.removed_items.clone(),
            assignment: step
                .assignment
                .iter()
                .map(|(agent, b)| Assignment { agent: *agent, bundle: b.items().to_vec() })
                .collect(),
            case_annotation: step.annotation.clone(),
            pivot: match &step.detail {
                StepDetail::Mimic { pivot, .. } => Some(*pivot),
                _ => None,
            },
            padded_items: match step.detail {
                StepDetail::Pad { .. } => Some(step.result.num_items()),
                _ => None,
            },
        },
    }
}

impl TraceFile {
    pub fn from_outcome(out: &SolveOutcome) -> TraceFile {
        TraceFile {
            status: out.status.as_str().to_string(),
            covered_by: out.covered_by.as_str().to_string(),
            proven_nonexistent: out.proven_nonexistent,
            records: out.trace.iter().map(record).collect(),
            tail: out.tail.as_ref().map(AllocationFile::from_allocation),
            allocation: out.allocation.as_ref().map(AllocationFile::from_allocation),
        }
    }
}

fn bad(msg: impl Into<String>) -> MmsError {
    MmsError::Argument(msg.into())
}

/// Rebuilds every step from its record, starting at `inst`, and composes the
/// tail allocation back through them.
pub fn replay(inst: &Instance, trace: &TraceFile, budget: SearchBudget) -> Result<Allocation, MmsError> {
    let tail = trace.tail.as_ref().ok_or_else(|| bad("trace has no tail allocation to replay"))?;
    let mut steps: Vec<ReductionStep> = Vec::new();
    let mut cur = inst.clone();
    for (t, rec) in trace.records.iter().enumerate() {
        let Some(rule) = &rec.rule_id else { continue };
        let rule = RuleId::parse(rule).ok_or_else(|| bad(format!("record {t}: unknown rule {rule:?}")))?;
        let step = match rule {
            RuleId::Sop => ReductionStep::sop(&cur),
            RuleId::DummyPad => {
                let target = rec.padded_items.ok_or_else(|| bad(format!("record {t}: DUMMY_PAD without paddedItems")))?;
                ReductionStep::pad(&cur, target)?
            }
            RuleId::Mimic => {
                let pivot = rec.pivot.ok_or_else(|| bad(format!("record {t}: MIMIC without pivot")))?;
                ReductionStep::mimic(&cur, build_mimicked(&cur, pivot, budget)?)
            }
            _ => {
                let assignment =
                    rec.assignment.iter().map(|a| (a.agent, a.bundle.iter().copied().collect::<Bundle>())).collect();
                let step = ReductionStep::removal(&cur, rule, assignment, rec.case_annotation.clone())?;
                if step.removed_agents != rec.removed_agents || step.removed_items != rec.removed_items {
                    return Err(bad(format!("record {t}: removed agents/items disagree with the assignment")));
                }
                step
            }
        };
        cur = step.result.clone();
        steps.push(step);
    }
    compose(inst, &steps, &tail.to_allocation(), budget)
}
