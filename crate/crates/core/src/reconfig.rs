//! Evolution operations and their robust application to component models.
//!
//! Every primitive either succeeds, yielding a well-formed model, or leaves
//! the model untouched. There is no error channel: an inapplicable operation
//! behaves as the identity, which is what makes the topological primitives
//! idempotent.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::model::{
    model_equal, model_equal_modulo_params, validate_model, Binding, Component, ComponentModel,
    Lifecycle, Value, ValueClass, Vocabulary,
};

/// Integer expression on the right-hand side of a `set` step.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum IntExpr {
    Lit(i64),
    Param { component: String, param: String },
    Add(Box<IntExpr>, Box<IntExpr>),
    Sub(Box<IntExpr>, Box<IntExpr>),
    Mul(Box<IntExpr>, Box<IntExpr>),
}

impl IntExpr {
    pub fn param(component: &str, param: &str) -> Self {
        IntExpr::Param {
            component: component.into(),
            param: param.into(),
        }
    }

    pub fn plus(self, rhs: IntExpr) -> Self {
        IntExpr::Add(Box::new(self), Box::new(rhs))
    }

    /// `None` when a referenced parameter is missing or not an int, or on
    /// overflow.
    pub fn eval(&self, m: &ComponentModel) -> Option<i64> {
        match self {
            IntExpr::Lit(n) => Some(*n),
            IntExpr::Param { component, param } => match m.param(component, param)?.value {
                Value::Int(n) => Some(n),
                _ => None,
            },
            IntExpr::Add(a, b) => a.eval(m)?.checked_add(b.eval(m)?),
            IntExpr::Sub(a, b) => a.eval(m)?.checked_sub(b.eval(m)?),
            IntExpr::Mul(a, b) => a.eval(m)?.checked_mul(b.eval(m)?),
        }
    }

    fn level(&self) -> u8 {
        match self {
            IntExpr::Add(..) | IntExpr::Sub(..) => 1,
            IntExpr::Mul(..) => 2,
            IntExpr::Lit(_) | IntExpr::Param { .. } => 3,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.level() < min {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        match self {
            IntExpr::Lit(n) => write!(f, "{n}"),
            IntExpr::Param { component, param } => write!(f, "param({component}.{param})"),
            IntExpr::Add(a, b) | IntExpr::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(if matches!(self, IntExpr::Add(..)) {
                    " + "
                } else {
                    " - "
                })?;
                b.write_at(f, 2)
            }
            IntExpr::Mul(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(" * ")?;
                b.write_at(f, 3)
            }
        }
    }
}

impl fmt::Display for IntExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PrimitiveKind {
    AddComponent,
    RemoveComponent,
    Bind,
    Unbind,
    SetParam,
    Stop,
    Start,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Primitive {
    /// Inserts a stopped component, optionally as a child of `parent`.
    AddComponent {
        component: Component,
        parent: Option<String>,
    },
    RemoveComponent(String),
    Bind(Binding),
    Unbind(Binding),
    SetParam {
        component: String,
        param: String,
        expr: IntExpr,
    },
    Stop(String),
    Start(String),
}

impl Primitive {
    pub fn kind(&self) -> PrimitiveKind {
        match self {
            Primitive::AddComponent { .. } => PrimitiveKind::AddComponent,
            Primitive::RemoveComponent(_) => PrimitiveKind::RemoveComponent,
            Primitive::Bind(_) => PrimitiveKind::Bind,
            Primitive::Unbind(_) => PrimitiveKind::Unbind,
            Primitive::SetParam { .. } => PrimitiveKind::SetParam,
            Primitive::Stop(_) => PrimitiveKind::Stop,
            Primitive::Start(_) => PrimitiveKind::Start,
        }
    }

    /// Addition or removal of a component or a binding.
    pub fn is_topological(&self) -> bool {
        matches!(
            self.kind(),
            PrimitiveKind::AddComponent
                | PrimitiveKind::RemoveComponent
                | PrimitiveKind::Bind
                | PrimitiveKind::Unbind
        )
    }
}

impl fmt::Display for Primitive {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Primitive::AddComponent { component, parent } => {
                f.write_str("add ")?;
                crate::adl::write_component(f, component, "  ")?;
                if let Some(p) = parent {
                    write!(f, " in {p}")?;
                }
                Ok(())
            }
            Primitive::RemoveComponent(id) => write!(f, "remove component {id}"),
            Primitive::Bind(b) => write!(f, "bind {b}"),
            Primitive::Unbind(b) => write!(f, "unbind {b}"),
            Primitive::SetParam {
                component,
                param,
                expr,
            } => write!(f, "set {component}.{param} := {expr}"),
            Primitive::Stop(id) => write!(f, "stop {id}"),
            Primitive::Start(id) => write!(f, "start {id}"),
        }
    }
}

/// A named composite operation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Recipe {
    pub name: String,
    pub steps: Vec<Primitive>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EvolutionOperation {
    /// Restarts every stopped component.
    Run,
    Primitive(Primitive),
    Composite(Recipe),
}

impl EvolutionOperation {
    pub const RUN: &'static str = "run";

    /// True when the operation can only change parameter values by also
    /// changing the topology: it has no `set` step and never removes and
    /// re-adds the same component. For such operations, whether an
    /// application changed the model is decided by the models with their
    /// parameter values erased.
    pub fn changes_are_topological(&self) -> bool {
        match self {
            EvolutionOperation::Run => true,
            EvolutionOperation::Primitive(p) => p.kind() != PrimitiveKind::SetParam,
            EvolutionOperation::Composite(r) => {
                let mut added = BTreeSet::new();
                let mut removed = BTreeSet::new();
                for step in &r.steps {
                    match step {
                        Primitive::SetParam { .. } => return false,
                        Primitive::AddComponent { component, .. } => {
                            added.insert(component.id.as_str());
                        }
                        Primitive::RemoveComponent(id) => {
                            removed.insert(id.as_str());
                        }
                        _ => {}
                    }
                }
                added.is_disjoint(&removed)
            }
        }
    }
}

impl fmt::Display for EvolutionOperation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvolutionOperation::Run => f.write_str(Self::RUN),
            EvolutionOperation::Primitive(p) => write!(f, "{p}"),
            EvolutionOperation::Composite(r) => f.write_str(&r.name),
        }
    }
}

/// Named composite operations loaded from a `.ops` file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RecipeSet {
    pub recipes: BTreeMap<String, Recipe>,
}

impl RecipeSet {
    pub fn new() -> Self {
        Self::default()
    }

    /// Fails, returning the recipe, when the name is taken.
    pub fn insert(&mut self, recipe: Recipe) -> Result<(), Recipe> {
        if self.recipes.contains_key(&recipe.name) || recipe.name == EvolutionOperation::RUN {
            return Err(recipe);
        }
        self.recipes.insert(recipe.name.clone(), recipe);
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<&Recipe> {
        self.recipes.get(name)
    }

    pub fn len(&self) -> usize {
        self.recipes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.recipes.is_empty()
    }

    /// Whether `name` is `run` or a loaded recipe.
    pub fn knows(&self, name: &str) -> bool {
        name == EvolutionOperation::RUN || self.recipes.contains_key(name)
    }

    /// Resolves an operation name: `run` or a loaded recipe.
    pub fn operation(&self, name: &str) -> Option<EvolutionOperation> {
        if name == EvolutionOperation::RUN {
            Some(EvolutionOperation::Run)
        } else {
            self.recipes
                .get(name)
                .cloned()
                .map(EvolutionOperation::Composite)
        }
    }

    /// Adds every component that some recipe may create.
    pub fn extend_vocabulary(&self, vocabulary: &mut Vocabulary) {
        for r in self.recipes.values() {
            for step in &r.steps {
                if let Primitive::AddComponent { component, .. } = step {
                    vocabulary.absorb(component);
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApplicationOutcome {
    pub result: ComponentModel,
    /// `result` differs from the input model.
    pub changed: bool,
}

impl ApplicationOutcome {
    fn identity(m: &ComponentModel) -> Self {
        Self {
            result: m.clone(),
            changed: false,
        }
    }

    fn from_candidate(input: &ComponentModel, candidate: ComponentModel) -> Self {
        if !validate_model(&candidate).is_empty() {
            return Self::identity(input);
        }
        let changed = !model_equal(input, &candidate);
        Self {
            result: candidate,
            changed,
        }
    }
}

pub fn apply_primitive(op: &Primitive, m: &ComponentModel) -> ApplicationOutcome {
    match op {
        Primitive::AddComponent { component, parent } => {
            if m.components.contains_key(&component.id) {
                return ApplicationOutcome::identity(m);
            }
            let mut next = m.clone();
            let mut added = component.clone();
            added.lifecycle = Lifecycle::Stopped;
            next.insert(added);
            if let Some(parent) = parent {
                match next.components.get_mut(parent) {
                    Some(p) => {
                        p.contains.insert(component.id.clone());
                    }
                    None => return ApplicationOutcome::identity(m),
                }
            }
            ApplicationOutcome::from_candidate(m, next)
        }
        Primitive::RemoveComponent(id) => {
            if !m.components.contains_key(id) {
                return ApplicationOutcome::identity(m);
            }
            let mut next = m.clone();
            // stopped before removal; the stop is not observable afterwards
            if let Some(c) = next.components.get_mut(id) {
                c.lifecycle = Lifecycle::Stopped;
            }
            next.bindings.retain(|b| !b.touches(id));
            next.delegations.retain(|d| !d.touches(id));
            for c in next.components.values_mut() {
                c.contains.remove(id);
            }
            next.components.remove(id);
            ApplicationOutcome::from_candidate(m, next)
        }
        Primitive::Bind(b) => {
            if m.bindings.contains(b) {
                return ApplicationOutcome::identity(m);
            }
            let mut next = m.clone();
            next.bindings.insert(b.clone());
            ApplicationOutcome::from_candidate(m, next)
        }
        Primitive::Unbind(b) => {
            if !m.bindings.contains(b) {
                return ApplicationOutcome::identity(m);
            }
            let mut next = m.clone();
            next.bindings.remove(b);
            ApplicationOutcome::from_candidate(m, next)
        }
        Primitive::SetParam {
            component,
            param,
            expr,
        } => {
            let target_is_int = m
                .param(component, param)
                .is_some_and(|p| p.class == ValueClass::Int);
            let Some(value) = expr.eval(m).filter(|_| target_is_int) else {
                return ApplicationOutcome::identity(m);
            };
            let mut next = m.clone();
            if let Some(p) = next
                .components
                .get_mut(component)
                .and_then(|c| c.params.get_mut(param))
            {
                p.value = Value::Int(value);
            }
            ApplicationOutcome::from_candidate(m, next)
        }
        Primitive::Stop(id) | Primitive::Start(id) => {
            let state = if matches!(op, Primitive::Stop(_)) {
                Lifecycle::Stopped
            } else {
                Lifecycle::Started
            };
            let mut next = m.clone();
            match next.components.get_mut(id) {
                Some(c) => c.lifecycle = state,
                None => return ApplicationOutcome::identity(m),
            }
            ApplicationOutcome::from_candidate(m, next)
        }
    }
}

pub fn apply_evolution(op: &EvolutionOperation, m: &ComponentModel) -> ApplicationOutcome {
    match op {
        EvolutionOperation::Run => {
            let mut next = m.clone();
            for c in next.components.values_mut() {
                c.lifecycle = Lifecycle::Started;
            }
            ApplicationOutcome::from_candidate(m, next)
        }
        EvolutionOperation::Primitive(p) => apply_primitive(p, m),
        EvolutionOperation::Composite(r) => {
            let result = r
                .steps
                .iter()
                .fold(m.clone(), |acc, step| apply_primitive(step, &acc).result);
            let changed = !model_equal(m, &result);
            ApplicationOutcome { result, changed }
        }
    }
}

/// Applies `ops` left to right.
pub fn apply_sequence(ops: &[EvolutionOperation], m: &ComponentModel) -> ComponentModel {
    ops.iter()
        .fold(m.clone(), |acc, op| apply_evolution(op, &acc).result)
}

/// With `F` the composition of `ops`, decides `F(F(m)) = F(m)`. When
/// `ignore_params` is set the two models are compared with parameter values
/// erased.
pub fn is_idempotent_sequence(
    ops: &[EvolutionOperation],
    m: &ComponentModel,
    ignore_params: bool,
) -> bool {
    let once = apply_sequence(ops, m);
    let twice = apply_sequence(ops, &once);
    if ignore_params {
        model_equal_modulo_params(&once, &twice)
    } else {
        model_equal(&once, &twice)
    }
}
