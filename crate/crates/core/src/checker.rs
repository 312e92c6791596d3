//! Mark-based checking of temporal formulas over lasso automata.
//!
//! When the path has a cycle, the composed cycle operation `F` is first
//! tested for idempotence at the configuration `e` reached after the prefix.
//! If `F(F(e)) = F(e)`, every pass through the cycle after the first one
//! visits the same configurations, so the traversal runs on the automaton
//! with the cycle unrolled once into the prefix. On that automaton each
//! state carries a single configuration, and the marks of every operator
//! instance bound its traversal to one visit per state.
//!
//! Without idempotence the verdict is `Unknown` unless a step budget is
//! given, in which case the original automaton is followed step by step
//! until the budget runs out.

use std::fmt;

use thiserror::Error;

use crate::adl::model_digest;
use crate::ftpl::{event_holds, EventSpec, FtplFormula, TraceProperty};
use crate::model::{
    eval_cp, validate_model, Atom, ComponentModel, ConfigProperty, CpError, Violation, Vocabulary,
};
use crate::oracle::{
    oracle_eval, unfold_to_lasso, unfold_to_lasso_modulo_params, DEFAULT_MAX_ROUNDS,
};
use crate::pathspec::{build_automaton, Mark, MarkMap, PathAutomaton, PathExpr, StateId};
use crate::reconfig::{
    apply_evolution, apply_sequence, is_idempotent_sequence, EvolutionOperation, RecipeSet,
};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckOptions {
    /// Transition budget for the whole check.
    pub max_steps: Option<usize>,
    /// Compare configurations without parameter values when testing the
    /// cycle for idempotence.
    pub ignore_params: bool,
    /// Evaluate the formula with the oracle as well and fail on
    /// disagreement.
    pub oracle_crosscheck: bool,
    /// Identifiers a property may name besides those of the initial model
    /// and the recipes.
    pub vocabulary: Vocabulary,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WitnessStep {
    pub state: StateId,
    /// Operation leading to this configuration; `None` for the first one.
    pub label: Option<String>,
    /// Hex SHA-256 of the configuration's canonical text.
    pub digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceWitness {
    pub steps: Vec<WitnessStep>,
    /// Position in `steps` of the configuration or step at fault.
    pub violation_index: usize,
    pub violated: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnknownReason {
    StepBudgetExhausted,
    NonIdempotentCycle,
}

impl UnknownReason {
    pub fn as_str(self) -> &'static str {
        match self {
            UnknownReason::StepBudgetExhausted => "step-budget-exhausted",
            UnknownReason::NonIdempotentCycle => "non-idempotent-cycle",
        }
    }
}

/// Where checking stopped. Checking `pending` on `residual` from `reached`
/// decides the original formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub reason: UnknownReason,
    pub residual: PathExpr,
    pub reached: ComponentModel,
    pub pending: FtplFormula,
    /// Transitions applied from the initial configuration to `reached`.
    pub position: usize,
    /// Identifiers `pending` was resolved against.
    pub vocabulary: Vocabulary,
}

impl Residual {
    /// Checks `pending` on `residual` from `reached`.
    pub fn resume(&self, recipes: &RecipeSet, opts: &CheckOptions) -> Result<Verdict, CheckError> {
        let mut opts = opts.clone();
        opts.vocabulary.merge(&self.vocabulary);
        check_path(&self.pending, &self.residual, &self.reached, recipes, &opts)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails(TraceWitness),
    Unknown(Box<Residual>),
}

impl Verdict {
    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Verdict::Holds => Some(true),
            Verdict::Fails(_) => Some(false),
            Verdict::Unknown(_) => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Fails(_) => "fails",
            Verdict::Unknown(_) => "unknown",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Holds => f.write_str("holds"),
            Verdict::Fails(w) => {
                write!(f, "fails at position {}: {}", w.violation_index, w.violated)
            }
            Verdict::Unknown(r) => write!(
                f,
                "unknown ({}), residual path `{}`",
                r.reason.as_str(),
                r.residual
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("{0}")]
    Property(#[from] CpError),
    #[error("invalid initial model: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidModel(Vec<Violation>),
    #[error("max_steps must be at least 1")]
    ZeroBudget,
    #[error("checker says {checker} but the oracle says {oracle}")]
    OracleDisagreement { checker: bool, oracle: bool },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    After,
    Before,
    Always,
    Eventually,
}

/// Work done by one operator instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceStats {
    pub kind: OperatorKind,
    /// State of the traversed automaton the instance started from.
    pub start: StateId,
    pub transitions: usize,
    pub cp_evaluations: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CheckStats {
    /// States of the path automaton.
    pub automaton_states: usize,
    /// States of the automaton actually traversed.
    pub traversed_states: usize,
    /// Whether marks bounded the traversal.
    pub marked: bool,
    /// Result of the cycle idempotence test, when one was run.
    pub idempotent_cycle: Option<bool>,
    /// Whether parameter values were ignored by that test.
    pub ignore_params: bool,
    pub instances: Vec<InstanceStats>,
}

impl CheckStats {
    pub fn max_transitions(&self) -> usize {
        self.instances
            .iter()
            .map(|i| i.transitions)
            .max()
            .unwrap_or(0)
    }
}

pub fn check(
    f: &FtplFormula,
    a: &PathAutomaton,
    c0: &ComponentModel,
    recipes: &RecipeSet,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    check_with_stats(f, a, c0, recipes, opts).map(|(v, _)| v)
}

/// Whether the idempotence test may ignore parameter values for `f`: the
/// formula reads no parameter and every operation named by one of its events
/// changes parameters only together with the topology.
pub fn params_irrelevant(f: &FtplFormula, recipes: &RecipeSet) -> bool {
    !f.mentions_params()
        && f.event_ops().into_iter().all(|op| {
            recipes
                .operation(op)
                .is_some_and(|o| o.changes_are_topological())
        })
}

pub fn check_with_stats(
    f: &FtplFormula,
    a: &PathAutomaton,
    c0: &ComponentModel,
    recipes: &RecipeSet,
    opts: &CheckOptions,
) -> Result<(Verdict, CheckStats), CheckError> {
    if opts.max_steps == Some(0) {
        return Err(CheckError::ZeroBudget);
    }
    let violations = validate_model(c0);
    if !violations.is_empty() {
        return Err(CheckError::InvalidModel(violations));
    }
    let ops = a
        .operations(recipes)
        .map_err(|e| CheckError::UnknownOperation(e.0))?;
    if let Some(op) = f.event_ops().into_iter().find(|op| !recipes.knows(op)) {
        return Err(CheckError::UnknownOperation(op.to_string()));
    }
    let mut vocabulary = Vocabulary::from_model(c0);
    recipes.extend_vocabulary(&mut vocabulary);
    vocabulary.merge(&opts.vocabulary);
    f.resolve(&vocabulary)?;

    let ignore_params = opts.ignore_params || params_irrelevant(f, recipes);
    let mut stats = CheckStats {
        automaton_states: a.num_states(),
        ignore_params,
        ..CheckStats::default()
    };

    let idempotent = a.expr().has_cycle().then(|| {
        let p = a.prefix_len();
        let entry = apply_sequence(&ops[..p], c0);
        is_idempotent_sequence(&ops[p..], &entry, ignore_params)
    });
    stats.idempotent_cycle = idempotent;

    let machine = match (idempotent, opts.max_steps) {
        (Some(false), None) => {
            let verdict = Verdict::Unknown(Box::new(Residual {
                reason: UnknownReason::NonIdempotentCycle,
                residual: a.expr().clone(),
                reached: c0.clone(),
                pending: f.clone(),
                position: 0,
                vocabulary,
            }));
            return Ok((verdict, stats));
        }
        (Some(false), Some(_)) => Machine::unmarked(a, &ops),
        _ => Machine::stabilized(a, &ops),
    };
    stats.marked = machine.marked;
    stats.traversed_states = machine.len();

    let mut engine = Engine {
        machine: &machine,
        budget: opts.max_steps,
        instances: Vec::new(),
    };
    let outcome = engine.eval(f, 0, 0, c0.clone());
    stats.instances = engine.instances;
    let verdict = match outcome {
        Ok(None) => Verdict::Holds,
        Ok(Some(failure)) => Verdict::Fails(witness(a, &ops, c0, failure)),
        Err(Stop::Property(e)) => return Err(e.into()),
        Err(Stop::Exhausted(p)) => Verdict::Unknown(Box::new(Residual {
            reason: UnknownReason::StepBudgetExhausted,
            residual: a.residual(machine.origin(p.state)),
            reached: p.model,
            pending: p.formula,
            position: p.position,
            vocabulary,
        })),
    };

    if opts.oracle_crosscheck {
        if let Some(checker) = verdict.as_bool() {
            let lasso = if ignore_params {
                unfold_to_lasso_modulo_params(a, c0, &ops, DEFAULT_MAX_ROUNDS)
            } else {
                unfold_to_lasso(a, c0, &ops, DEFAULT_MAX_ROUNDS)
            };
            if let Some(oracle) = oracle_eval(f, &lasso)? {
                if oracle != checker {
                    return Err(CheckError::OracleDisagreement { checker, oracle });
                }
            }
        }
    }
    Ok((verdict, stats))
}

/// Replays the path from `c0` up to the failure position.
fn witness(
    a: &PathAutomaton,
    ops: &[EvolutionOperation],
    c0: &ComponentModel,
    failure: Failure,
) -> TraceWitness {
    let mut steps = vec![WitnessStep {
        state: a.initial(),
        label: None,
        digest: model_digest(c0),
    }];
    let mut q = a.initial();
    let mut c = c0.clone();
    for _ in 0..failure.position {
        let (label, next) = a.succ(q).expect("failure position lies on the path");
        c = apply_evolution(&ops[q], &c).result;
        q = next;
        steps.push(WitnessStep {
            state: q,
            label: Some(label.to_string()),
            digest: model_digest(&c),
        });
    }
    TraceWitness {
        steps,
        violation_index: failure.position,
        violated: failure.violated,
    }
}

/// The automaton the engine traverses.
struct Machine<'a> {
    ops: Vec<&'a EvolutionOperation>,
    labels: Vec<&'a str>,
    next: Vec<Option<usize>>,
    /// States from which the configuration repeats on every later visit.
    stable_from: Option<usize>,
    prefix_len: usize,
    cycle_len: usize,
    marked: bool,
}

impl<'a> Machine<'a> {
    fn from_automaton(a: &'a PathAutomaton, ops: &'a [EvolutionOperation], marked: bool) -> Self {
        let mut labels = Vec::new();
        let mut next = Vec::new();
        for q in a.states() {
            match a.succ(q) {
                Some((l, n)) => {
                    labels.push(l);
                    next.push(Some(n));
                }
                None => next.push(None),
            }
        }
        Self {
            ops: ops.iter().collect(),
            labels,
            next,
            stable_from: None,
            prefix_len: a.prefix_len(),
            cycle_len: a.cycle_len(),
            marked,
        }
    }

    fn unmarked(a: &'a PathAutomaton, ops: &'a [EvolutionOperation]) -> Self {
        Self::from_automaton(a, ops, false)
    }

    /// The cycle unrolled once into the prefix.
    fn stabilized(a: &'a PathAutomaton, ops: &'a [EvolutionOperation]) -> Self {
        let mut m = Self::from_automaton(a, ops, true);
        if a.cycle_len() == 0 {
            return m;
        }
        let (p, c) = (a.prefix_len(), a.cycle_len());
        let n = p + 2 * c;
        m.ops = (0..n).map(|s| &ops[m.origin_of(s, p, c)]).collect();
        m.labels = (0..n)
            .map(|s| a.succ(m.origin_of(s, p, c)).expect("cycle state").0)
            .collect();
        m.next = (0..n)
            .map(|s| Some(if s + 1 < n { s + 1 } else { p + c }))
            .collect();
        m.stable_from = Some(p + c);
        m
    }

    fn origin_of(&self, s: usize, p: usize, c: usize) -> StateId {
        if s < p {
            s
        } else {
            p + (s - p) % c
        }
    }

    fn origin(&self, s: usize) -> StateId {
        if self.cycle_len == 0 {
            s
        } else {
            self.origin_of(s, self.prefix_len, self.cycle_len)
        }
    }

    fn len(&self) -> usize {
        self.next.len()
    }

    fn is_stable(&self, s: usize) -> bool {
        self.stable_from.is_some_and(|b| s >= b)
    }
}

struct Failure {
    position: usize,
    violated: String,
}

struct Pending {
    state: usize,
    position: usize,
    model: ComponentModel,
    formula: FtplFormula,
}

enum Stop {
    Exhausted(Box<Pending>),
    Property(CpError),
}

impl From<CpError> for Stop {
    fn from(e: CpError) -> Self {
        Stop::Property(e)
    }
}

type Outcome = Result<Option<Failure>, Stop>;

struct Engine<'m, 'a> {
    machine: &'m Machine<'a>,
    budget: Option<usize>,
    instances: Vec<InstanceStats>,
}

/// Result of trying to leave a state.
enum Advance<'a> {
    Terminal,
    Exhausted,
    Moved(usize, ComponentModel, &'a str),
}

impl<'m, 'a> Engine<'m, 'a> {
    fn begin(&mut self, kind: OperatorKind, start: usize) -> usize {
        self.instances.push(InstanceStats {
            kind,
            start,
            transitions: 0,
            cp_evaluations: 0,
        });
        self.instances.len() - 1
    }

    fn cp(&mut self, inst: usize, cp: &ConfigProperty, c: &ComponentModel) -> Result<bool, Stop> {
        self.instances[inst].cp_evaluations += 1;
        Ok(eval_cp(cp, c)?)
    }

    fn advance(&mut self, inst: usize, q: usize, c: &ComponentModel) -> Advance<'a> {
        let Some(next) = self.machine.next[q] else {
            return Advance::Terminal;
        };
        if let Some(b) = &mut self.budget {
            if *b == 0 {
                return Advance::Exhausted;
            }
            *b -= 1;
        }
        self.instances[inst].transitions += 1;
        debug_assert!(
            !self.machine.marked || self.instances[inst].transitions <= self.machine.len(),
            "an instance applied more transitions than there are states"
        );
        let out = apply_evolution(self.machine.ops[q], c);
        Advance::Moved(next, out.result, self.machine.labels[q])
    }

    fn eval(&mut self, f: &FtplFormula, q: usize, pos: usize, c: ComponentModel) -> Outcome {
        match f {
            FtplFormula::Trace(TraceProperty::Always(cp)) => self.always(f, cp, q, pos, c),
            FtplFormula::Trace(TraceProperty::Eventually(cp)) => self.eventually(f, cp, q, pos, c),
            FtplFormula::After(e, inner) => self.after(f, e, inner, q, pos, c),
            FtplFormula::Before(e, tr) => self.before(f, e, tr, q, pos, c),
        }
    }

    fn pending(
        &self,
        formula: FtplFormula,
        state: usize,
        position: usize,
        model: ComponentModel,
    ) -> Stop {
        Stop::Exhausted(Box::new(Pending {
            state,
            position,
            model,
            formula,
        }))
    }

    /// Marks set by an instance started at `start` and now at `q`, before
    /// any revisit: every state in between carries `expected`.
    fn debug_marks(&self, marks: &MarkMap, start: usize, q: usize, expected: Mark) {
        if cfg!(debug_assertions) && self.machine.marked && start <= q {
            for j in start..q {
                debug_assert_eq!(marks.get(j), expected, "mark invariant broken at state {j}");
            }
        }
    }

    fn always(
        &mut self,
        f: &FtplFormula,
        cp: &ConfigProperty,
        mut q: usize,
        mut pos: usize,
        mut c: ComponentModel,
    ) -> Outcome {
        let inst = self.begin(OperatorKind::Always, q);
        let start = q;
        let mut marks = MarkMap::with_states(self.machine.len());
        let mut wrapped = false;
        loop {
            if !self.cp(inst, cp, &c)? {
                return Ok(Some(Failure {
                    position: pos,
                    violated: format!("{f}"),
                }));
            }
            if self.machine.marked {
                if marks.get(q) == Mark::Checked {
                    return Ok(None);
                }
                if !wrapped {
                    self.debug_marks(&marks, start, q, Mark::Checked);
                }
                marks.set(q, Mark::Checked);
            }
            match self.advance(inst, q, &c) {
                Advance::Terminal => return Ok(None),
                Advance::Exhausted => return Err(self.pending(f.clone(), q, pos, c)),
                Advance::Moved(n, m, _) => {
                    wrapped |= n <= q;
                    q = n;
                    c = m;
                    pos += 1;
                }
            }
        }
    }

    fn eventually(
        &mut self,
        f: &FtplFormula,
        cp: &ConfigProperty,
        mut q: usize,
        mut pos: usize,
        mut c: ComponentModel,
    ) -> Outcome {
        let inst = self.begin(OperatorKind::Eventually, q);
        let mut marks = MarkMap::with_states(self.machine.len());
        let never = |position| {
            Ok(Some(Failure {
                position,
                violated: format!("{f}: never satisfied"),
            }))
        };
        loop {
            if self.cp(inst, cp, &c)? {
                return Ok(None);
            }
            if self.machine.marked {
                if marks.get(q) == Mark::Checked {
                    return never(pos);
                }
                marks.set(q, Mark::Checked);
            }
            match self.advance(inst, q, &c) {
                Advance::Terminal => return never(pos),
                Advance::Exhausted => return Err(self.pending(f.clone(), q, pos, c)),
                Advance::Moved(n, m, _) => {
                    q = n;
                    c = m;
                    pos += 1;
                }
            }
        }
    }

    fn after(
        &mut self,
        f: &FtplFormula,
        e: &EventSpec,
        inner: &FtplFormula,
        mut q: usize,
        mut pos: usize,
        mut c: ComponentModel,
    ) -> Outcome {
        let inst = self.begin(OperatorKind::After, q);
        let start = q;
        let first_only = inner.is_suffix_monotone();
        let mut marks = MarkMap::with_states(self.machine.len());
        let mut wrapped = false;
        loop {
            if self.machine.marked {
                if marks.get(q) == Mark::Again {
                    return Ok(None);
                }
                if !wrapped {
                    self.debug_marks(&marks, start, q, Mark::Again);
                }
                marks.set(q, Mark::Again);
            }
            let (n, m, label) = match self.advance(inst, q, &c) {
                Advance::Terminal => return Ok(None),
                Advance::Exhausted => return Err(self.pending(f.clone(), q, pos, c)),
                Advance::Moved(n, m, label) => (n, m, label),
            };
            wrapped |= n <= q;
            if event_holds(&c, &m, label, e, pos + 1) {
                match self.eval(inner, n, pos + 1, m.clone()) {
                    Ok(Some(failure)) => return Ok(Some(failure)),
                    Ok(None) if first_only => return Ok(None),
                    Ok(None) => {}
                    Err(Stop::Exhausted(_)) if !first_only => {
                        return Err(self.pending(f.clone(), q, pos, c));
                    }
                    Err(stop) => return Err(stop),
                }
            }
            q = n;
            c = m;
            pos += 1;
        }
    }

    fn before(
        &mut self,
        f: &FtplFormula,
        e: &EventSpec,
        tr: &TraceProperty,
        mut q: usize,
        mut pos: usize,
        mut c: ComponentModel,
    ) -> Outcome {
        let inst = self.begin(OperatorKind::Before, q);
        let mut marks = MarkMap::with_states(self.machine.len());
        let always = matches!(tr, TraceProperty::Always(_));
        // always: every configuration so far satisfies cp
        // eventually: some configuration so far satisfies cp
        let mut acc = always;
        let mut first_stable_event: Option<usize> = None;
        let violated = |position| {
            Ok(Some(Failure {
                position,
                violated: format!("{f}"),
            }))
        };
        loop {
            let holds = self.cp(inst, tr.cp(), &c)?;
            if always {
                acc &= holds;
            } else if holds {
                return Ok(None);
            }
            if self.machine.marked {
                if marks.get(q) == Mark::Again {
                    // every later event repeats one seen since the last
                    // visit to `q`, one cycle further on
                    if always && !acc {
                        if let Some(k) = first_stable_event {
                            return violated(k + self.machine.cycle_len);
                        }
                    }
                    return Ok(None);
                }
                marks.set(q, Mark::Again);
            }
            let (n, m, label) = match self.advance(inst, q, &c) {
                Advance::Terminal => return Ok(None),
                Advance::Exhausted => {
                    let formula = if always && !acc {
                        FtplFormula::Before(
                            e.clone(),
                            TraceProperty::Always(ConfigProperty::Atom(Atom::False)),
                        )
                    } else {
                        f.clone()
                    };
                    return Err(self.pending(formula, q, pos, c));
                }
                Advance::Moved(n, m, label) => (n, m, label),
            };
            if event_holds(&c, &m, label, e, pos + 1) {
                if !acc {
                    return violated(pos + 1);
                }
                if self.machine.is_stable(q) && first_stable_event.is_none() {
                    first_stable_event = Some(pos + 1);
                }
            }
            q = n;
            c = m;
            pos += 1;
        }
    }
}

/// Checks `f` on `path` by building its automaton first.
pub fn check_path(
    f: &FtplFormula,
    path: &PathExpr,
    c0: &ComponentModel,
    recipes: &RecipeSet,
    opts: &CheckOptions,
) -> Result<Verdict, CheckError> {
    check(f, &build_automaton(path), c0, recipes, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adl::{parse_model, parse_recipes};
    use crate::ftpl::parse_formula;
    use crate::oracle::oracle_eval;
    use crate::pathspec::parse_path;

    const COUNTERS: &str = "model M { component X {
        param z : int = 0
        param r : int = 0
        param w : int = 0
    } }";

    const COUNTER_OPS: &str = "
        op E { set X.z := 1 }
        op Raise { set X.r := 1 }
        op Swap { set X.r := 0 set X.w := 1 }
        op Up { set X.z := param(X.z) + 1 }
    ";

    fn run(
        model: &str,
        ops: &str,
        path: &str,
        formula: &str,
        opts: &CheckOptions,
    ) -> (Verdict, CheckStats) {
        let m = parse_model(model).unwrap();
        let recipes = parse_recipes(ops).unwrap();
        let a = build_automaton(&parse_path(path, &recipes).unwrap());
        let f = parse_formula(formula).unwrap();
        check_with_stats(&f, &a, &m, &recipes, opts).unwrap()
    }

    fn oracle(model: &str, ops: &str, path: &str, formula: &str) -> Option<bool> {
        let m = parse_model(model).unwrap();
        let recipes = parse_recipes(ops).unwrap();
        let a = build_automaton(&parse_path(path, &recipes).unwrap());
        let l = unfold_to_lasso(&a, &m, &a.operations(&recipes).unwrap(), 64);
        oracle_eval(&parse_formula(formula).unwrap(), &l).unwrap()
    }

    #[test]
    fn second_pass_through_an_idempotent_cycle_is_checked() {
        let formula = "after E normal always [not (param(X.r) = 1 and param(X.w) = 1)]";
        let (v, stats) = run(
            COUNTERS,
            COUNTER_OPS,
            "(E Raise Swap)+",
            formula,
            &CheckOptions::default(),
        );
        assert_eq!(stats.idempotent_cycle, Some(true));
        match v {
            Verdict::Fails(w) => {
                assert_eq!(w.violation_index, 5);
                assert_eq!(w.steps.len(), 6);
                assert_eq!(w.steps[5].state, 2);
            }
            other => panic!("expected a failure, got {other:?}"),
        }
        assert_eq!(
            oracle(COUNTERS, COUNTER_OPS, "(E Raise Swap)+", formula),
            Some(false)
        );
    }

    #[test]
    fn eventually_inside_after_is_checked_at_every_occurrence() {
        // the first Raise is followed by w = 1 only through Swap, later ones
        // are not followed by z = 0 ever again
        let formula = "after Raise terminates eventually [param(X.z) = 0]";
        let (v, _) = run(
            COUNTERS,
            COUNTER_OPS,
            "Raise E (Raise Swap)+",
            formula,
            &CheckOptions::default(),
        );
        assert_eq!(v.as_bool(), Some(false));
        assert_eq!(
            oracle(COUNTERS, COUNTER_OPS, "Raise E (Raise Swap)+", formula),
            Some(false)
        );
    }

    #[test]
    fn non_idempotent_cycles_are_unknown_without_a_budget() {
        let formula = "always [param(X.z) < 10]";
        let (v, stats) = run(
            COUNTERS,
            COUNTER_OPS,
            "(Up)+",
            formula,
            &CheckOptions::default(),
        );
        assert_eq!(stats.idempotent_cycle, Some(false));
        match v {
            Verdict::Unknown(r) => {
                assert_eq!(r.reason, UnknownReason::NonIdempotentCycle);
                assert_eq!(r.residual.to_string(), "(Up)+");
            }
            other => panic!("expected unknown, got {other:?}"),
        }
        let opts = CheckOptions {
            max_steps: Some(10),
            ..CheckOptions::default()
        };
        let (v, _) = run(COUNTERS, COUNTER_OPS, "(Up)+", formula, &opts);
        assert!(matches!(v, Verdict::Fails(ref w) if w.violation_index == 10));
        let opts = CheckOptions {
            max_steps: Some(9),
            ..CheckOptions::default()
        };
        let (v, _) = run(COUNTERS, COUNTER_OPS, "(Up)+", formula, &opts);
        match v {
            Verdict::Unknown(r) => {
                assert_eq!(r.reason, UnknownReason::StepBudgetExhausted);
                assert_eq!(r.position, 9);
                assert_eq!(
                    r.reached.param("X", "z").unwrap().value,
                    crate::model::Value::Int(9)
                );
            }
            other => panic!("expected unknown, got {other:?}"),
        }
    }

    #[test]
    fn finite_paths() {
        let opts = CheckOptions::default();
        assert_eq!(
            run(
                COUNTERS,
                COUNTER_OPS,
                "Up Up",
                "always [param(X.z) < 2]",
                &opts
            )
            .0
            .as_bool(),
            Some(false)
        );
        assert_eq!(
            run(
                COUNTERS,
                COUNTER_OPS,
                "Up Up",
                "eventually [param(X.z) = 2]",
                &opts
            )
            .0
            .as_bool(),
            Some(true)
        );
        assert_eq!(
            run(
                COUNTERS,
                COUNTER_OPS,
                "Up Up",
                "eventually [param(X.z) = 3]",
                &opts
            )
            .0
            .as_bool(),
            Some(false)
        );
        assert_eq!(
            run(COUNTERS, COUNTER_OPS, "", "always [true]", &opts).0,
            Verdict::Holds
        );
        assert_eq!(
            run(
                COUNTERS,
                COUNTER_OPS,
                "Up Up",
                "after Swap normal always [false]",
                &opts
            )
            .0,
            Verdict::Holds
        );
    }

    #[test]
    fn before_always_fails_on_a_later_pass() {
        // Raise fires inside the cycle before w first becomes 1; its next
        // occurrence sees the violation in its segment
        let formula = "before Raise normal always [param(X.w) = 0]";
        let path = "(Raise Swap)+";
        let (v, _) = run(
            COUNTERS,
            COUNTER_OPS,
            path,
            formula,
            &CheckOptions::default(),
        );
        let expected = oracle(COUNTERS, COUNTER_OPS, path, formula);
        assert_eq!(v.as_bool(), expected);
        assert_eq!(expected, Some(false));
        if let Verdict::Fails(w) = v {
            assert_eq!(w.violation_index, 3);
        }
    }

    #[test]
    fn before_eventually() {
        let formula = "before Swap normal eventually [param(X.r) = 1]";
        let opts = CheckOptions::default();
        assert_eq!(
            run(COUNTERS, COUNTER_OPS, "(Raise Swap)+", formula, &opts).0,
            Verdict::Holds
        );
        assert_eq!(
            run(COUNTERS, COUNTER_OPS, "(Swap Raise)+", formula, &opts)
                .0
                .as_bool(),
            Some(false)
        );
    }

    #[test]
    fn instances_stay_within_twice_the_states() {
        let formula =
            "after E normal after Raise terminates before Swap normal always [param(X.z) = 1]";
        let (_, stats) = run(
            COUNTERS,
            COUNTER_OPS,
            "E Up (Raise Swap E)+",
            formula,
            &CheckOptions::default(),
        );
        assert!(stats.marked);
        assert!(stats.max_transitions() <= 2 * stats.automaton_states);
        assert_eq!(stats.instances.len(), 3);
    }

    #[test]
    fn resolution_errors() {
        let m = parse_model(COUNTERS).unwrap();
        let recipes = parse_recipes(COUNTER_OPS).unwrap();
        let a = build_automaton(&parse_path("(E)+", &recipes).unwrap());
        let opts = CheckOptions::default();
        let f = parse_formula("after Nope normal always [true]").unwrap();
        assert_eq!(
            check(&f, &a, &m, &recipes, &opts),
            Err(CheckError::UnknownOperation("Nope".into()))
        );
        let f = parse_formula("always [component(Ghost)]").unwrap();
        assert!(matches!(
            check(&f, &a, &m, &recipes, &opts),
            Err(CheckError::Property(_))
        ));
        let zero = CheckOptions {
            max_steps: Some(0),
            ..CheckOptions::default()
        };
        let f = parse_formula("always [true]").unwrap();
        assert_eq!(
            check(&f, &a, &m, &recipes, &zero),
            Err(CheckError::ZeroBudget)
        );
    }

    #[test]
    fn crosscheck_agrees() {
        let m = parse_model(COUNTERS).unwrap();
        let recipes = parse_recipes(COUNTER_OPS).unwrap();
        let a = build_automaton(&parse_path("E (Raise Swap)+", &recipes).unwrap());
        let opts = CheckOptions {
            oracle_crosscheck: true,
            ..CheckOptions::default()
        };
        let f = parse_formula("after Raise normal eventually [param(X.w) = 1]").unwrap();
        assert_eq!(check(&f, &a, &m, &recipes, &opts), Ok(Verdict::Holds));
    }
}
