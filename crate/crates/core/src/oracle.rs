//! Brute-force reference semantics.
//!
//! The lasso automaton is unfolded into a concrete configuration sequence
//! until a `(state, model)` pair repeats, and formulas are evaluated by
//! direct quantification over that sequence. Nothing here is shared with
//! the checker beyond the model and operation engine.

use std::collections::HashMap;

use crate::ftpl::{EventSpec, FtplFormula, Modality, TraceProperty};
use crate::model::{
    eval_cp, model_equal, model_equal_modulo_params, ComponentModel, ConfigProperty, CpError,
};
use crate::pathspec::{PathAutomaton, StateId};
use crate::reconfig::{apply_evolution, EvolutionOperation};

pub const DEFAULT_MAX_ROUNDS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteStep {
    pub state: StateId,
    pub model: ComponentModel,
    /// Operation that produced this configuration; `None` at position 0.
    pub label: Option<String>,
    /// Whether that operation changed the configuration.
    pub changed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LassoTail {
    /// The path is finite and fully unfolded.
    Terminal,
    /// Applying `closing_label` to the last configuration yields the one at
    /// `start` again, so the sequence repeats from there forever.
    Periodic {
        start: usize,
        closing_label: String,
        closing_changed: bool,
    },
    /// No repetition was found within the round budget.
    Truncated,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcreteLasso {
    pub configs: Vec<ConcreteStep>,
    pub tail: LassoTail,
}

impl ConcreteLasso {
    pub fn period_start(&self) -> Option<usize> {
        match self.tail {
            LassoTail::Periodic { start, .. } => Some(start),
            _ => None,
        }
    }

    pub fn period(&self) -> Option<usize> {
        self.period_start().map(|s| self.configs.len() - s)
    }

    /// Configuration at absolute position `k`, following the period.
    pub fn config(&self, k: usize) -> Option<&ComponentModel> {
        self.index(k).map(|i| &self.configs[i].model)
    }

    fn index(&self, k: usize) -> Option<usize> {
        let n = self.configs.len();
        if k < n {
            return Some(k);
        }
        let start = self.period_start()?;
        Some(start + (k - start) % (n - start))
    }

    /// Label and change flag of the step into position `k`.
    pub fn step_into(&self, k: usize) -> Option<(&str, bool)> {
        if k == 0 {
            return None;
        }
        let n = self.configs.len();
        if k < n {
            let s = &self.configs[k];
            return s.label.as_deref().map(|l| (l, s.changed));
        }
        let LassoTail::Periodic {
            start,
            ref closing_label,
            closing_changed,
        } = self.tail
        else {
            return None;
        };
        let i = start + (k - start) % (n - start);
        if i == start {
            Some((closing_label.as_str(), closing_changed))
        } else {
            let s = &self.configs[i];
            s.label.as_deref().map(|l| (l, s.changed))
        }
    }
}

/// Unfolds `a` from `c0`, where `ops[q]` is the operation labelling the
/// transition out of state `q`. Stops at a terminal state, at the first
/// repeated `(state, model)` pair, or after `max_rounds` passes through the
/// cycle.
pub fn unfold_to_lasso(
    a: &PathAutomaton,
    c0: &ComponentModel,
    ops: &[EvolutionOperation],
    max_rounds: usize,
) -> ConcreteLasso {
    unfold(a, c0, ops, max_rounds, model_equal)
}

/// As [`unfold_to_lasso`], but a pair repeats when the models agree up to
/// parameter values. The result is faithful for formulas whose properties
/// ignore parameters and whose events name operations whose change flag
/// does not depend on parameter values.
pub fn unfold_to_lasso_modulo_params(
    a: &PathAutomaton,
    c0: &ComponentModel,
    ops: &[EvolutionOperation],
    max_rounds: usize,
) -> ConcreteLasso {
    unfold(a, c0, ops, max_rounds, model_equal_modulo_params)
}

fn unfold(
    a: &PathAutomaton,
    c0: &ComponentModel,
    ops: &[EvolutionOperation],
    max_rounds: usize,
    same: fn(&ComponentModel, &ComponentModel) -> bool,
) -> ConcreteLasso {
    let mut configs = vec![ConcreteStep {
        state: a.initial(),
        model: c0.clone(),
        label: None,
        changed: false,
    }];
    let mut rounds = 0;
    loop {
        let last = configs.last().expect("non-empty");
        let Some((label, next)) = a.succ(last.state) else {
            return ConcreteLasso {
                configs,
                tail: LassoTail::Terminal,
            };
        };
        let out = apply_evolution(&ops[last.state], &last.model);
        if next <= last.state {
            rounds += 1;
        }
        if let Some(start) = configs
            .iter()
            .position(|s| s.state == next && same(&s.model, &out.result))
        {
            return ConcreteLasso {
                configs,
                tail: LassoTail::Periodic {
                    start,
                    closing_label: label.to_string(),
                    closing_changed: out.changed,
                },
            };
        }
        configs.push(ConcreteStep {
            state: next,
            model: out.result,
            label: Some(label.to_string()),
            changed: out.changed,
        });
        if rounds >= max_rounds.max(1) {
            return ConcreteLasso {
                configs,
                tail: LassoTail::Truncated,
            };
        }
    }
}

/// Evaluates `f` on the whole sequence. `None` when the lasso is truncated
/// and the explored part does not decide the formula.
pub fn oracle_eval(f: &FtplFormula, l: &ConcreteLasso) -> Result<Option<bool>, CpError> {
    Evaluator::new(l).eval(f, 0, 0)
}

/// Evaluates `f` on the suffix starting at absolute position `s`.
pub fn oracle_eval_at(
    f: &FtplFormula,
    l: &ConcreteLasso,
    s: usize,
) -> Result<Option<bool>, CpError> {
    Evaluator::new(l).eval(f, s, 0)
}

struct Evaluator<'l> {
    l: &'l ConcreteLasso,
    memo: HashMap<(usize, usize), Option<bool>>,
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

impl<'l> Evaluator<'l> {
    fn new(l: &'l ConcreteLasso) -> Self {
        Self {
            l,
            memo: HashMap::new(),
        }
    }

    fn complete(&self) -> bool {
        !matches!(self.l.tail, LassoTail::Truncated)
    }

    /// Exclusive bound on the positions worth inspecting from `s`. Past it
    /// every configuration and step has already been seen with an equal
    /// prefix shape.
    fn horizon(&self, s: usize) -> usize {
        let n = self.l.configs.len();
        match self.l.period() {
            Some(per) => s + n + 2 * per + 1,
            None => n,
        }
    }

    /// Maps positions beyond one period to an earlier position with the same
    /// suffix.
    fn canonical(&self, s: usize) -> usize {
        match (self.l.period_start(), self.l.period()) {
            (Some(start), Some(per)) if s > start + per => start + 1 + (s - start - 1) % per,
            _ => s,
        }
    }

    fn cp(&self, cp: &ConfigProperty, k: usize) -> Result<bool, CpError> {
        eval_cp(cp, self.l.config(k).expect("position within horizon"))
    }

    fn event(&self, e: &EventSpec, k: usize) -> bool {
        match self.l.step_into(k) {
            Some((label, changed)) if label == e.op => match e.modality {
                Modality::Normal => changed,
                Modality::Exceptional => !changed,
                Modality::Terminates => true,
            },
            _ => false,
        }
    }

    fn eval(&mut self, f: &FtplFormula, s: usize, depth: usize) -> Result<Option<bool>, CpError> {
        let s = self.canonical(s);
        if let Some(v) = self.memo.get(&(depth, s)) {
            return Ok(*v);
        }
        let end = self.horizon(s);
        let tail = if self.complete() { Some(true) } else { None };
        let v = match f {
            FtplFormula::Trace(TraceProperty::Always(cp)) => {
                let mut v = tail;
                for k in s..end {
                    if !self.cp(cp, k)? {
                        v = Some(false);
                        break;
                    }
                }
                v
            }
            FtplFormula::Trace(TraceProperty::Eventually(cp)) => {
                let mut v = tail.map(|_| false);
                for k in s..end {
                    if self.cp(cp, k)? {
                        v = Some(true);
                        break;
                    }
                }
                v
            }
            FtplFormula::After(e, inner) => {
                let mut v = tail;
                for k in s + 1..end {
                    if self.event(e, k) {
                        v = and3(v, self.eval(inner, k, depth + 1)?);
                        if v == Some(false) {
                            break;
                        }
                    }
                }
                v
            }
            FtplFormula::Before(e, tr) => {
                let mut v = tail;
                for k in s + 1..end {
                    if !self.event(e, k) {
                        continue;
                    }
                    let segment_ok = match tr {
                        TraceProperty::Always(cp) => {
                            let mut ok = true;
                            for j in s..k {
                                if !self.cp(cp, j)? {
                                    ok = false;
                                    break;
                                }
                            }
                            ok
                        }
                        TraceProperty::Eventually(cp) => {
                            let mut ok = false;
                            for j in s..k {
                                if self.cp(cp, j)? {
                                    ok = true;
                                    break;
                                }
                            }
                            ok
                        }
                    };
                    if !segment_ok {
                        v = Some(false);
                        break;
                    }
                }
                v
            }
        };
        self.memo.insert((depth, s), v);
        Ok(v)
    }
}
