//! Component models: one configuration of a component-based architecture.
//!
//! A [`ComponentModel`] holds components keyed by id, the set of bindings
//! between output and input ports, and the set of delegation links between a
//! composite's ports and the ports of its direct subcomponents. All
//! collections are ordered, so structural equality is plain `==` and does not
//! depend on insertion order.

mod property;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use property::{
    eval_cp, Atom, ComponentRef, ComponentShape, ConfigProperty, CpError, Domain, RelOp, Vocabulary,
};
pub(crate) use property::{parse_cp, parse_literal};

/// Class of a parameter value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueClass {
    Int,
    Str,
    Bool,
}

impl ValueClass {
    pub fn keyword(self) -> &'static str {
        match self {
            ValueClass::Int => "int",
            ValueClass::Str => "string",
            ValueClass::Bool => "bool",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "int" => Some(ValueClass::Int),
            "string" => Some(ValueClass::Str),
            "bool" => Some(ValueClass::Bool),
            _ => None,
        }
    }

    /// The value every parameter of this class takes once values are erased.
    pub fn erased(self) -> Value {
        match self {
            ValueClass::Int => Value::Int(0),
            ValueClass::Str => Value::Str(String::new()),
            ValueClass::Bool => Value::Bool(false),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Str(String),
    Bool(bool),
}

impl Value {
    pub fn class(&self) -> ValueClass {
        match self {
            Value::Int(_) => ValueClass::Int,
            Value::Str(_) => ValueClass::Str,
            Value::Bool(_) => ValueClass::Bool,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Str(s) => f.write_str(&crate::syntax::quote(s)),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// A parameter's class together with its current value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Param {
    pub class: ValueClass,
    pub value: Value,
}

impl Param {
    pub fn new(value: Value) -> Self {
        Self {
            class: value.class(),
            value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Lifecycle {
    #[default]
    Started,
    Stopped,
}

impl Lifecycle {
    pub fn keyword(self) -> &'static str {
        match self {
            Lifecycle::Started => "started",
            Lifecycle::Stopped => "stopped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub id: String,
    pub class: String,
    pub params: BTreeMap<String, Param>,
    /// Input port name to port class.
    pub inputs: BTreeMap<String, String>,
    /// Output port name to port class.
    pub outputs: BTreeMap<String, String>,
    /// Direct subcomponents.
    pub contains: BTreeSet<String>,
    pub lifecycle: Lifecycle,
}

impl Component {
    pub fn new(id: impl Into<String>, class: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            class: class.into(),
            params: BTreeMap::new(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            contains: BTreeSet::new(),
            lifecycle: Lifecycle::Started,
        }
    }

    pub fn with_input(mut self, port: &str, class: &str) -> Self {
        self.inputs.insert(port.into(), class.into());
        self
    }

    pub fn with_output(mut self, port: &str, class: &str) -> Self {
        self.outputs.insert(port.into(), class.into());
        self
    }

    pub fn with_param(mut self, name: &str, value: Value) -> Self {
        self.params.insert(name.into(), Param::new(value));
        self
    }

    pub fn with_child(mut self, child: &str) -> Self {
        self.contains.insert(child.into());
        self
    }

    pub fn with_lifecycle(mut self, lifecycle: Lifecycle) -> Self {
        self.lifecycle = lifecycle;
        self
    }

    pub fn is_composite(&self) -> bool {
        !self.contains.is_empty()
    }

    /// Class of port `name` and whether it is an input.
    pub fn port(&self, name: &str) -> Option<(&str, bool)> {
        if let Some(c) = self.inputs.get(name) {
            Some((c.as_str(), true))
        } else {
            self.outputs.get(name).map(|c| (c.as_str(), false))
        }
    }
}

/// An `(output endpoint, input endpoint)` couple.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Binding {
    pub out_component: String,
    pub out_port: String,
    pub in_component: String,
    pub in_port: String,
}

impl Binding {
    pub fn new(out_component: &str, out_port: &str, in_component: &str, in_port: &str) -> Self {
        Self {
            out_component: out_component.into(),
            out_port: out_port.into(),
            in_component: in_component.into(),
            in_port: in_port.into(),
        }
    }

    pub fn touches(&self, id: &str) -> bool {
        self.out_component == id || self.in_component == id
    }
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} -> {}.{}",
            self.out_component, self.out_port, self.in_component, self.in_port
        )
    }
}

/// Link between a composite's port and a port of one of its subcomponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delegation {
    pub composite: String,
    pub composite_port: String,
    pub inner: String,
    pub inner_port: String,
}

impl Delegation {
    pub fn new(composite: &str, composite_port: &str, inner: &str, inner_port: &str) -> Self {
        Self {
            composite: composite.into(),
            composite_port: composite_port.into(),
            inner: inner.into(),
            inner_port: inner_port.into(),
        }
    }

    pub fn touches(&self, id: &str) -> bool {
        self.composite == id || self.inner == id
    }
}

impl fmt::Display for Delegation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}.{} -> {}.{}",
            self.composite, self.composite_port, self.inner, self.inner_port
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentModel {
    pub name: String,
    pub components: BTreeMap<String, Component>,
    pub bindings: BTreeSet<Binding>,
    pub delegations: BTreeSet<Delegation>,
}

impl ComponentModel {
    pub fn new(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            components: BTreeMap::new(),
            bindings: BTreeSet::new(),
            delegations: BTreeSet::new(),
        }
    }

    pub fn with_component(mut self, component: Component) -> Self {
        self.insert(component);
        self
    }

    pub fn with_binding(mut self, binding: Binding) -> Self {
        self.bindings.insert(binding);
        self
    }

    pub fn with_delegation(mut self, delegation: Delegation) -> Self {
        self.delegations.insert(delegation);
        self
    }

    /// Inserts or replaces the component keyed by its id.
    pub fn insert(&mut self, component: Component) -> Option<Component> {
        self.components.insert(component.id.clone(), component)
    }

    pub fn component(&self, id: &str) -> Option<&Component> {
        self.components.get(id)
    }

    pub fn parent_of(&self, id: &str) -> Option<&str> {
        self.components
            .values()
            .find(|c| c.contains.contains(id))
            .map(|c| c.id.as_str())
    }

    pub fn param(&self, component: &str, param: &str) -> Option<&Param> {
        self.components.get(component)?.params.get(param)
    }

    /// Same model with every parameter value replaced by its class default.
    /// Parameter names and classes are kept.
    pub fn erase_param_values(&self) -> ComponentModel {
        let mut out = self.clone();
        for c in out.components.values_mut() {
            for p in c.params.values_mut() {
                p.value = p.class.erased();
            }
        }
        out
    }

    pub fn mentions_params(&self) -> bool {
        self.components.values().any(|c| !c.params.is_empty())
    }
}

/// Structural equality up to the ordering of sets and maps, including
/// parameter values and lifecycle states.
pub fn model_equal(a: &ComponentModel, b: &ComponentModel) -> bool {
    a == b
}

/// Structural equality with parameter values ignored.
pub fn model_equal_modulo_params(a: &ComponentModel, b: &ComponentModel) -> bool {
    a.erase_param_values() == b.erase_param_values()
}

/// One broken structural rule, naming the element at fault.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Violation {
    pub subject: String,
    pub message: String,
}

impl Violation {
    pub fn new(subject: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            subject: subject.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.message)
    }
}

/// Checks every structural invariant of a component model. An empty result
/// means the model is well formed.
pub fn validate_model(m: &ComponentModel) -> Vec<Violation> {
    let mut out = Vec::new();

    for (key, c) in &m.components {
        let subject = format!("component {key}");
        if *key != c.id {
            out.push(Violation::new(
                &subject,
                format!("keyed under a different id `{}`", c.id),
            ));
        }
        if c.is_composite() && !c.params.is_empty() {
            out.push(Violation::new(&subject, "composite has parameters"));
        }
        for name in c.params.keys() {
            if c.inputs.contains_key(name) || c.outputs.contains_key(name) {
                out.push(Violation::new(
                    &subject,
                    format!("`{name}` is both a parameter and a port"),
                ));
            }
            if c.params[name].value.class() != c.params[name].class {
                out.push(Violation::new(
                    &subject,
                    format!("parameter `{name}` holds a value of the wrong class"),
                ));
            }
        }
        for name in c.inputs.keys() {
            if c.outputs.contains_key(name) {
                out.push(Violation::new(
                    &subject,
                    format!("`{name}` is both an input and an output port"),
                ));
            }
        }
        for child in &c.contains {
            if child == key {
                out.push(Violation::new(&subject, "contains itself"));
            } else if !m.components.contains_key(child) {
                out.push(Violation::new(
                    &subject,
                    format!("contains unknown component `{child}`"),
                ));
            }
        }
    }

    // at most one parent
    let mut parents: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for c in m.components.values() {
        for child in &c.contains {
            parents.entry(child).or_default().push(&c.id);
        }
    }
    for (child, ps) in &parents {
        if ps.len() > 1 {
            out.push(Violation::new(
                format!("component {child}"),
                format!("has several parents: {}", ps.join(", ")),
            ));
        }
    }

    if let Some(cycle_member) = find_containment_cycle(m) {
        out.push(Violation::new(
            format!("component {cycle_member}"),
            "subcomponent relation is cyclic",
        ));
    }

    let mut bound_inputs: BTreeMap<(&str, &str), usize> = BTreeMap::new();
    for b in &m.bindings {
        let subject = format!("binding {b}");
        let out_class = match m.components.get(&b.out_component) {
            None => {
                out.push(Violation::new(
                    &subject,
                    format!("unknown component `{}`", b.out_component),
                ));
                None
            }
            Some(c) => match c.outputs.get(&b.out_port) {
                None => {
                    out.push(Violation::new(
                        &subject,
                        format!(
                            "`{}` is not an output port of `{}`",
                            b.out_port, b.out_component
                        ),
                    ));
                    None
                }
                Some(class) => Some(class),
            },
        };
        let in_class = match m.components.get(&b.in_component) {
            None => {
                out.push(Violation::new(
                    &subject,
                    format!("unknown component `{}`", b.in_component),
                ));
                None
            }
            Some(c) => match c.inputs.get(&b.in_port) {
                None => {
                    out.push(Violation::new(
                        &subject,
                        format!(
                            "`{}` is not an input port of `{}`",
                            b.in_port, b.in_component
                        ),
                    ));
                    None
                }
                Some(class) => Some(class),
            },
        };
        if let (Some(o), Some(i)) = (out_class, in_class) {
            if o != i {
                out.push(Violation::new(
                    &subject,
                    format!("port classes differ (`{o}` vs `{i}`)"),
                ));
            }
        }
        *bound_inputs
            .entry((&b.in_component, &b.in_port))
            .or_default() += 1;
    }
    for ((c, p), n) in bound_inputs {
        if n > 1 {
            out.push(Violation::new(
                format!("input {c}.{p}"),
                format!("bound {n} times"),
            ));
        }
    }

    for d in &m.delegations {
        let subject = format!("delegation {d}");
        let outer = m.components.get(&d.composite);
        let inner = m.components.get(&d.inner);
        let (Some(outer), Some(inner)) = (outer, inner) else {
            for id in [&d.composite, &d.inner] {
                if !m.components.contains_key(id) {
                    out.push(Violation::new(
                        &subject,
                        format!("unknown component `{id}`"),
                    ));
                }
            }
            continue;
        };
        if !outer.contains.contains(&d.inner) {
            out.push(Violation::new(
                &subject,
                format!("`{}` is not a subcomponent of `{}`", d.inner, d.composite),
            ));
        }
        match (outer.port(&d.composite_port), inner.port(&d.inner_port)) {
            (None, _) => out.push(Violation::new(
                &subject,
                format!("`{}` has no port `{}`", d.composite, d.composite_port),
            )),
            (_, None) => out.push(Violation::new(
                &subject,
                format!("`{}` has no port `{}`", d.inner, d.inner_port),
            )),
            (Some((oc, odir)), Some((ic, idir))) => {
                if oc != ic {
                    out.push(Violation::new(
                        &subject,
                        format!("port classes differ (`{oc}` vs `{ic}`)"),
                    ));
                }
                if odir != idir {
                    out.push(Violation::new(&subject, "port directions differ"));
                }
            }
        }
    }

    out
}

fn find_containment_cycle(m: &ComponentModel) -> Option<&str> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: BTreeMap<&str, u8> = BTreeMap::new();
    for start in m.components.keys() {
        if state.get(start.as_str()).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(&str, Vec<&str>)> = vec![(start, children(m, start))];
        state.insert(start, 1);
        while let Some((node, pending)) = stack.last_mut() {
            match pending.pop() {
                Some(child) => match state.get(child).copied().unwrap_or(0) {
                    0 => {
                        state.insert(child, 1);
                        let next = children(m, child);
                        stack.push((child, next));
                    }
                    1 => return Some(child),
                    _ => {}
                },
                None => {
                    state.insert(node, 2);
                    stack.pop();
                }
            }
        }
    }
    None
}

fn children<'a>(m: &'a ComponentModel, id: &str) -> Vec<&'a str> {
    m.components
        .get(id)
        .map(|c| {
            c.contains
                .iter()
                .filter(|k| m.components.contains_key(*k))
                .map(String::as_str)
                .collect()
        })
        .unwrap_or_default()
}
