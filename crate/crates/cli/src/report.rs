//! Machine-readable reports printed with `--json`.

use serde::{Deserialize, Serialize};

use lassocheck::checker::{CheckStats, Residual, TraceWitness, Verdict};
use lassocheck::model::Violation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictName {
    Holds,
    Fails,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessStepReport {
    pub position: usize,
    pub state: usize,
    pub label: Option<String>,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub position: usize,
    pub property: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub reason: String,
    pub path: String,
    pub pending: String,
    pub position: usize,
    pub reached_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatsReport {
    pub automaton_states: usize,
    pub traversed_states: usize,
    pub marked: bool,
    pub idempotent_cycle: Option<bool>,
    pub ignore_params: bool,
    pub max_transitions: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub verdict: VerdictName,
    pub formula: String,
    pub path: String,
    pub witness: Option<Vec<WitnessStepReport>>,
    pub violation: Option<ViolationReport>,
    pub residual: Option<ResidualReport>,
    pub oracle: Option<bool>,
    pub stats: StatsReport,
}

impl CheckReport {
    pub fn new(
        formula: String,
        path: String,
        verdict: &Verdict,
        stats: &CheckStats,
        oracle: Option<bool>,
    ) -> Self {
        let (name, witness, violation, residual) = match verdict {
            Verdict::Holds => (VerdictName::Holds, None, None, None),
            Verdict::Fails(w) => (
                VerdictName::Fails,
                Some(witness_steps(w)),
                Some(violation(w)),
                None,
            ),
            Verdict::Unknown(r) => (VerdictName::Unknown, None, None, Some(residual(r))),
        };
        Self {
            verdict: name,
            formula,
            path,
            witness,
            violation,
            residual,
            oracle,
            stats: StatsReport {
                automaton_states: stats.automaton_states,
                traversed_states: stats.traversed_states,
                marked: stats.marked,
                idempotent_cycle: stats.idempotent_cycle,
                ignore_params: stats.ignore_params,
                max_transitions: stats.max_transitions(),
            },
        }
    }
}

fn witness_steps(w: &TraceWitness) -> Vec<WitnessStepReport> {
    w.steps
        .iter()
        .enumerate()
        .map(|(position, s)| WitnessStepReport {
            position,
            state: s.state,
            label: s.label.clone(),
            digest: s.digest.clone(),
        })
        .collect()
}

fn violation(w: &TraceWitness) -> ViolationReport {
    ViolationReport {
        position: w.violation_index,
        property: w.violated.clone(),
    }
}

fn residual(r: &Residual) -> ResidualReport {
    ResidualReport {
        reason: r.reason.as_str().to_string(),
        path: r.residual.to_string(),
        pending: r.pending.to_string(),
        position: r.position,
        reached_digest: lassocheck::adl::model_digest(&r.reached),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationStep {
    pub position: usize,
    pub state: usize,
    pub label: Option<String>,
    pub changed: bool,
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub path: String,
    pub steps: Vec<SimulationStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdempotenceReport {
    pub path: String,
    pub cycle: Option<String>,
    pub entry_digest: Option<String>,
    pub exact: Option<bool>,
    pub modulo_params: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationEntry {
    pub subject: String,
    pub message: String,
}

impl From<&Violation> for ViolationEntry {
    fn from(v: &Violation) -> Self {
        Self {
            subject: v.subject.clone(),
            message: v.message.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub model: String,
    pub valid: bool,
    pub violations: Vec<ViolationEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub error: String,
    pub exit_code: u8,
}

#[cfg(test)]
mod tests {
    use super::*;
    use lassocheck::checker::{CheckStats, UnknownReason, WitnessStep};
    use lassocheck::ftpl::parse_formula;
    use lassocheck::model::{ComponentModel, Vocabulary};
    use lassocheck::pathspec::parse_path_syntax;

    fn round_trip(r: &CheckReport) -> CheckReport {
        serde_json::from_str(&serde_json::to_string(r).unwrap()).unwrap()
    }

    #[test]
    fn every_verdict_round_trips() {
        let stats = CheckStats::default();
        let holds = CheckReport::new(
            "always [true]".into(),
            "(run)+".into(),
            &Verdict::Holds,
            &stats,
            Some(true),
        );
        assert_eq!(round_trip(&holds), holds);

        let w = TraceWitness {
            steps: vec![
                WitnessStep {
                    state: 0,
                    label: None,
                    digest: "00".into(),
                },
                WitnessStep {
                    state: 1,
                    label: Some("run".into()),
                    digest: "11".into(),
                },
            ],
            violation_index: 1,
            violated: "always [false]".into(),
        };
        let fails = CheckReport::new(
            "always [false]".into(),
            "run".into(),
            &Verdict::Fails(w),
            &stats,
            None,
        );
        assert_eq!(fails.witness.as_ref().unwrap()[1].position, 1);
        assert_eq!(round_trip(&fails), fails);

        let r = Residual {
            reason: UnknownReason::StepBudgetExhausted,
            residual: parse_path_syntax("b (c)+").unwrap(),
            reached: ComponentModel::new("M"),
            pending: parse_formula("eventually [true]").unwrap(),
            position: 3,
            vocabulary: Vocabulary::default(),
        };
        let unknown = CheckReport::new(
            "eventually [true]".into(),
            "a b (c)+".into(),
            &Verdict::Unknown(Box::new(r)),
            &stats,
            None,
        );
        let residual = unknown.residual.as_ref().unwrap();
        assert_eq!(residual.path, "b (c)+");
        assert_eq!(residual.reason, "step-budget-exhausted");
        assert_eq!(round_trip(&unknown), unknown);
    }

    #[test]
    fn verdict_names_are_lowercase() {
        assert_eq!(
            serde_json::to_string(&VerdictName::Unknown).unwrap(),
            "\"unknown\""
        );
    }
}
