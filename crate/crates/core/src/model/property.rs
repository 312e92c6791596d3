//! Configuration properties: first-order formulas over a single
//! configuration, quantifying over its components or its bindings.
//!
//! Concrete syntax (lowest to highest precedence):
//!
//! ```text
//! cp      := ("forall" | "exists") VAR "in" ("components" | "bindings") ":" cp
//!          | or ("=>" cp)?
//! or      := and ("or" and)*
//! and     := unary ("and" unary)*
//! unary   := "not" unary | "(" cp ")" | atom
//! atom    := "true" | "false"
//!          | "component" "(" REF ")"       | "started" "(" REF ")"
//!          | "bound" "(" REF "." PORT "," REF "." PORT ")"
//!          | "param" "(" REF "." NAME ")" RELOP literal
//!          | "sub" "(" REF "," REF ")"     // child, parent
//!          | "class" "(" VAR ")" "=" CLASS | "present" "(" VAR ")"
//! ```
//!
//! `REF` is a component id, or a variable bound by an enclosing quantifier
//! over `components`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::{Binding, Component, ComponentModel, Value, ValueClass};
use crate::syntax::{Comments, Cursor, ParseError, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Components,
    Bindings,
}

impl Domain {
    fn keyword(self) -> &'static str {
        match self {
            Domain::Components => "components",
            Domain::Bindings => "bindings",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ComponentRef {
    Named(String),
    Var(String),
}

impl ComponentRef {
    pub fn named(id: &str) -> Self {
        ComponentRef::Named(id.into())
    }

    fn text(&self) -> &str {
        match self {
            ComponentRef::Named(s) | ComponentRef::Var(s) => s,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Ge => ">=",
            RelOp::Gt => ">",
        }
    }

    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        match self {
            RelOp::Lt => lhs < rhs,
            RelOp::Le => lhs <= rhs,
            RelOp::Eq => lhs == rhs,
            RelOp::Ne => lhs != rhs,
            RelOp::Ge => lhs >= rhs,
            RelOp::Gt => lhs > rhs,
        }
    }

    fn from_token(t: &Token) -> Option<Self> {
        Some(match t {
            Token::Lt => RelOp::Lt,
            Token::Le => RelOp::Le,
            Token::Eq => RelOp::Eq,
            Token::Ne => RelOp::Ne,
            Token::Ge => RelOp::Ge,
            Token::Gt => RelOp::Gt,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    True,
    False,
    ComponentPresent(ComponentRef),
    Bound {
        out_component: ComponentRef,
        out_port: String,
        in_component: ComponentRef,
        in_port: String,
    },
    ParamCmp {
        component: ComponentRef,
        param: String,
        op: RelOp,
        literal: Value,
    },
    Subcomponent {
        child: ComponentRef,
        parent: ComponentRef,
    },
    Started(ComponentRef),
    /// Class of a component variable, or the port class of a binding variable.
    ClassOf {
        var: String,
        class: String,
    },
    VarPresent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ConfigProperty {
    Atom(Atom),
    Not(Box<ConfigProperty>),
    And(Box<ConfigProperty>, Box<ConfigProperty>),
    Or(Box<ConfigProperty>, Box<ConfigProperty>),
    Implies(Box<ConfigProperty>, Box<ConfigProperty>),
    Forall {
        var: String,
        domain: Domain,
        body: Box<ConfigProperty>,
    },
    Exists {
        var: String,
        domain: Domain,
        body: Box<ConfigProperty>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpError {
    #[error("variable `{0}` is not bound by a quantifier")]
    UnboundVariable(String),
    #[error("variable `{var}` ranges over {found}, expected a component")]
    WrongSort { var: String, found: &'static str },
    #[error("`{component}.{param}` is a {expected} parameter, compared with a {found} literal")]
    IllSorted {
        component: String,
        param: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{component}` has no port `{port}`")]
    UnknownPort { component: String, port: String },
    #[error("component `{component}` has no parameter `{param}`")]
    UnknownParam { component: String, param: String },
}

impl ConfigProperty {
    pub fn truth() -> Self {
        ConfigProperty::Atom(Atom::True)
    }

    pub fn atom(a: Atom) -> Self {
        ConfigProperty::Atom(a)
    }

    pub fn bound(out_c: &str, out_p: &str, in_c: &str, in_p: &str) -> Self {
        ConfigProperty::Atom(Atom::Bound {
            out_component: ComponentRef::named(out_c),
            out_port: out_p.into(),
            in_component: ComponentRef::named(in_c),
            in_port: in_p.into(),
        })
    }

    pub fn present(id: &str) -> Self {
        ConfigProperty::Atom(Atom::ComponentPresent(ComponentRef::named(id)))
    }

    pub fn param_cmp(component: &str, param: &str, op: RelOp, literal: Value) -> Self {
        ConfigProperty::Atom(Atom::ParamCmp {
            component: ComponentRef::named(component),
            param: param.into(),
            op,
            literal,
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: ConfigProperty) -> Self {
        ConfigProperty::Not(Box::new(p))
    }

    pub fn and(a: ConfigProperty, b: ConfigProperty) -> Self {
        ConfigProperty::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: ConfigProperty, b: ConfigProperty) -> Self {
        ConfigProperty::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: ConfigProperty, b: ConfigProperty) -> Self {
        ConfigProperty::Implies(Box::new(a), Box::new(b))
    }

    /// True when some atom compares a parameter value.
    pub fn mentions_params(&self) -> bool {
        match self {
            ConfigProperty::Atom(a) => matches!(a, Atom::ParamCmp { .. }),
            ConfigProperty::Not(p) => p.mentions_params(),
            ConfigProperty::And(a, b)
            | ConfigProperty::Or(a, b)
            | ConfigProperty::Implies(a, b) => a.mentions_params() || b.mentions_params(),
            ConfigProperty::Forall { body, .. } | ConfigProperty::Exists { body, .. } => {
                body.mentions_params()
            }
        }
    }

    /// Checks every ground identifier against a vocabulary: component ids,
    /// ports and parameters that may ever exist along a path. Components that
    /// are in the vocabulary but absent from some configuration simply make
    /// their atoms false there.
    pub fn resolve(&self, vocabulary: &Vocabulary) -> Result<(), CpError> {
        let mut scope = Vec::new();
        self.resolve_in(vocabulary, &mut scope)
    }

    fn resolve_in(
        &self,
        voc: &Vocabulary,
        scope: &mut Vec<(String, Domain)>,
    ) -> Result<(), CpError> {
        match self {
            ConfigProperty::Atom(a) => resolve_atom(a, voc, scope),
            ConfigProperty::Not(p) => p.resolve_in(voc, scope),
            ConfigProperty::And(a, b)
            | ConfigProperty::Or(a, b)
            | ConfigProperty::Implies(a, b) => {
                a.resolve_in(voc, scope)?;
                b.resolve_in(voc, scope)
            }
            ConfigProperty::Forall { var, domain, body }
            | ConfigProperty::Exists { var, domain, body } => {
                scope.push((var.clone(), *domain));
                let r = body.resolve_in(voc, scope);
                scope.pop();
                r
            }
        }
    }

    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let mut cur = Cursor::new(text, Comments::Slashes)?;
        let cp = parse_cp(&mut cur)?;
        cur.expect_end()?;
        Ok(cp)
    }
}

fn lookup_var<'a>(scope: &'a [(String, Domain)], var: &str) -> Option<&'a Domain> {
    scope.iter().rev().find(|(v, _)| v == var).map(|(_, d)| d)
}

fn resolve_ref<'v>(
    r: &ComponentRef,
    voc: &'v Vocabulary,
    scope: &[(String, Domain)],
) -> Result<Option<&'v ComponentShape>, CpError> {
    match r {
        ComponentRef::Var(v) => match lookup_var(scope, v) {
            None => Err(CpError::UnboundVariable(v.clone())),
            Some(Domain::Bindings) => Err(CpError::WrongSort {
                var: v.clone(),
                found: "bindings",
            }),
            Some(Domain::Components) => Ok(None),
        },
        ComponentRef::Named(id) => voc
            .components
            .get(id)
            .map(Some)
            .ok_or_else(|| CpError::UnknownComponent(id.clone())),
    }
}

fn resolve_atom(a: &Atom, voc: &Vocabulary, scope: &[(String, Domain)]) -> Result<(), CpError> {
    match a {
        Atom::True | Atom::False => Ok(()),
        Atom::ComponentPresent(r) | Atom::Started(r) => resolve_ref(r, voc, scope).map(|_| ()),
        Atom::Subcomponent { child, parent } => {
            resolve_ref(child, voc, scope)?;
            resolve_ref(parent, voc, scope).map(|_| ())
        }
        Atom::Bound {
            out_component,
            out_port,
            in_component,
            in_port,
        } => {
            for (r, port) in [(out_component, out_port), (in_component, in_port)] {
                if let Some(shape) = resolve_ref(r, voc, scope)? {
                    if !shape.ports.contains(port) {
                        return Err(CpError::UnknownPort {
                            component: r.text().into(),
                            port: port.clone(),
                        });
                    }
                }
            }
            Ok(())
        }
        Atom::ParamCmp {
            component,
            param,
            literal,
            ..
        } => {
            if let Some(shape) = resolve_ref(component, voc, scope)? {
                match shape.params.get(param) {
                    None => {
                        return Err(CpError::UnknownParam {
                            component: component.text().into(),
                            param: param.clone(),
                        })
                    }
                    Some(class) if *class != literal.class() => {
                        return Err(CpError::IllSorted {
                            component: component.text().into(),
                            param: param.clone(),
                            expected: class.keyword(),
                            found: literal.class().keyword(),
                        })
                    }
                    Some(_) => {}
                }
            }
            Ok(())
        }
        Atom::ClassOf { var, .. } | Atom::VarPresent(var) => match lookup_var(scope, var) {
            Some(_) => Ok(()),
            None => Err(CpError::UnboundVariable(var.clone())),
        },
    }
}

/// Shape of a component as far as properties can observe it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ComponentShape {
    pub ports: BTreeSet<String>,
    pub params: BTreeMap<String, ValueClass>,
}

/// Every component id, port and parameter that may occur along a path.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    pub components: BTreeMap<String, ComponentShape>,
}

impl Vocabulary {
    pub fn from_model(m: &ComponentModel) -> Self {
        let mut v = Self::default();
        for c in m.components.values() {
            v.absorb(c);
        }
        v
    }

    pub fn merge(&mut self, other: &Vocabulary) {
        for (id, shape) in &other.components {
            let mine = self.components.entry(id.clone()).or_default();
            mine.ports.extend(shape.ports.iter().cloned());
            mine.params
                .extend(shape.params.iter().map(|(k, v)| (k.clone(), *v)));
        }
    }

    pub fn absorb(&mut self, c: &Component) {
        let shape = self.components.entry(c.id.clone()).or_default();
        shape.ports.extend(c.inputs.keys().cloned());
        shape.ports.extend(c.outputs.keys().cloned());
        for (name, p) in &c.params {
            shape.params.insert(name.clone(), p.class);
        }
    }
}

#[derive(Clone, Copy)]
enum Bound<'m> {
    Component(&'m Component),
    Binding(&'m Binding),
}

/// Evaluates a configuration property on one configuration.
///
/// Atoms naming a component, port or parameter absent from `m` are false.
/// Errors are reserved for ill-formed properties: unbound or mis-sorted
/// variables, and parameter comparisons whose literal class differs from
/// the parameter's class.
pub fn eval_cp(cp: &ConfigProperty, m: &ComponentModel) -> Result<bool, CpError> {
    let mut env = Vec::new();
    eval_in(cp, m, &mut env)
}

fn eval_in<'p, 'm>(
    cp: &'p ConfigProperty,
    m: &'m ComponentModel,
    env: &mut Vec<(&'p str, Bound<'m>)>,
) -> Result<bool, CpError> {
    Ok(match cp {
        ConfigProperty::Atom(a) => eval_atom(a, m, env)?,
        ConfigProperty::Not(p) => !eval_in(p, m, env)?,
        ConfigProperty::And(a, b) => eval_in(a, m, env)? && eval_in(b, m, env)?,
        ConfigProperty::Or(a, b) => eval_in(a, m, env)? || eval_in(b, m, env)?,
        ConfigProperty::Implies(a, b) => !eval_in(a, m, env)? || eval_in(b, m, env)?,
        ConfigProperty::Forall { var, domain, body } => {
            for value in domain_values(m, *domain) {
                env.push((var.as_str(), value));
                let r = eval_in(body, m, env);
                env.pop();
                if !r? {
                    return Ok(false);
                }
            }
            true
        }
        ConfigProperty::Exists { var, domain, body } => {
            for value in domain_values(m, *domain) {
                env.push((var.as_str(), value));
                let r = eval_in(body, m, env);
                env.pop();
                if r? {
                    return Ok(true);
                }
            }
            false
        }
    })
}

fn domain_values(m: &ComponentModel, domain: Domain) -> Vec<Bound<'_>> {
    match domain {
        Domain::Components => m.components.values().map(Bound::Component).collect(),
        Domain::Bindings => m.bindings.iter().map(Bound::Binding).collect(),
    }
}

fn lookup<'m>(env: &[(&str, Bound<'m>)], var: &str) -> Result<Bound<'m>, CpError> {
    env.iter()
        .rev()
        .find(|(v, _)| *v == var)
        .map(|(_, b)| *b)
        .ok_or_else(|| CpError::UnboundVariable(var.into()))
}

/// Resolves a component reference to a component id; `Ok(None)` means the
/// named component is absent from the model.
fn component_of<'m>(
    r: &ComponentRef,
    m: &'m ComponentModel,
    env: &[(&str, Bound<'m>)],
) -> Result<Option<&'m Component>, CpError> {
    match r {
        ComponentRef::Named(id) => Ok(m.components.get(id)),
        ComponentRef::Var(v) => match lookup(env, v)? {
            Bound::Component(c) => Ok(Some(c)),
            Bound::Binding(_) => Err(CpError::WrongSort {
                var: v.clone(),
                found: "bindings",
            }),
        },
    }
}

fn eval_atom<'m>(
    a: &Atom,
    m: &'m ComponentModel,
    env: &[(&str, Bound<'m>)],
) -> Result<bool, CpError> {
    Ok(match a {
        Atom::True => true,
        Atom::False => false,
        Atom::ComponentPresent(r) => component_of(r, m, env)?.is_some(),
        Atom::Started(r) => {
            component_of(r, m, env)?.is_some_and(|c| c.lifecycle == super::Lifecycle::Started)
        }
        Atom::Subcomponent { child, parent } => {
            let child = component_of(child, m, env)?;
            let parent = component_of(parent, m, env)?;
            match (child, parent) {
                (Some(c), Some(p)) => p.contains.contains(&c.id),
                _ => false,
            }
        }
        Atom::Bound {
            out_component,
            out_port,
            in_component,
            in_port,
        } => {
            let out = component_of(out_component, m, env)?;
            let inp = component_of(in_component, m, env)?;
            match (out, inp) {
                (Some(o), Some(i)) => m
                    .bindings
                    .contains(&Binding::new(&o.id, out_port, &i.id, in_port)),
                _ => false,
            }
        }
        Atom::ParamCmp {
            component,
            param,
            op,
            literal,
        } => match component_of(component, m, env)?
            .and_then(|c| c.params.get(param).map(|p| (c, p)))
        {
            None => false,
            Some((c, p)) => {
                if p.class != literal.class() {
                    return Err(CpError::IllSorted {
                        component: c.id.clone(),
                        param: param.clone(),
                        expected: p.class.keyword(),
                        found: literal.class().keyword(),
                    });
                }
                op.holds(&p.value, literal)
            }
        },
        Atom::ClassOf { var, class } => match lookup(env, var)? {
            Bound::Component(c) => c.class == *class,
            Bound::Binding(b) => m
                .components
                .get(&b.out_component)
                .and_then(|c| c.outputs.get(&b.out_port))
                .is_some_and(|k| k == class),
        },
        Atom::VarPresent(var) => match lookup(env, var)? {
            Bound::Component(c) => m.components.contains_key(&c.id),
            Bound::Binding(b) => m.bindings.contains(b),
        },
    })
}

// ---------------------------------------------------------------------------
// concrete syntax

pub(crate) fn parse_cp(cur: &mut Cursor) -> Result<ConfigProperty, ParseError> {
    let mut scope = Vec::new();
    parse_quant_or_implies(cur, &mut scope)
}

type Scope = Vec<(String, Domain)>;

fn parse_quant_or_implies(
    cur: &mut Cursor,
    scope: &mut Scope,
) -> Result<ConfigProperty, ParseError> {
    if cur.is_keyword("forall") || cur.is_keyword("exists") {
        let universal = cur.eat_keyword("forall");
        if !universal {
            cur.expect_keyword("exists")?;
        }
        let var = cur.expect_ident("variable name")?;
        cur.expect_keyword("in")?;
        let domain = if cur.eat_keyword("components") {
            Domain::Components
        } else if cur.eat_keyword("bindings") {
            Domain::Bindings
        } else {
            return Err(cur.unexpected("`components` or `bindings`"));
        };
        cur.expect(&Token::Colon)?;
        scope.push((var.clone(), domain));
        let body = parse_quant_or_implies(cur, scope);
        scope.pop();
        let body = Box::new(body?);
        return Ok(if universal {
            ConfigProperty::Forall { var, domain, body }
        } else {
            ConfigProperty::Exists { var, domain, body }
        });
    }
    let lhs = parse_or(cur, scope)?;
    if cur.eat(&Token::Implies) {
        let rhs = parse_quant_or_implies(cur, scope)?;
        Ok(ConfigProperty::implies(lhs, rhs))
    } else {
        Ok(lhs)
    }
}

fn parse_or(cur: &mut Cursor, scope: &mut Scope) -> Result<ConfigProperty, ParseError> {
    let mut lhs = parse_and(cur, scope)?;
    while cur.eat_keyword("or") {
        let rhs = parse_and(cur, scope)?;
        lhs = ConfigProperty::or(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_and(cur: &mut Cursor, scope: &mut Scope) -> Result<ConfigProperty, ParseError> {
    let mut lhs = parse_unary(cur, scope)?;
    while cur.eat_keyword("and") {
        let rhs = parse_unary(cur, scope)?;
        lhs = ConfigProperty::and(lhs, rhs);
    }
    Ok(lhs)
}

fn parse_unary(cur: &mut Cursor, scope: &mut Scope) -> Result<ConfigProperty, ParseError> {
    if cur.eat_keyword("not") {
        return Ok(ConfigProperty::not(parse_unary(cur, scope)?));
    }
    if cur.eat(&Token::LParen) {
        let inner = parse_quant_or_implies(cur, scope)?;
        cur.expect(&Token::RParen)?;
        return Ok(inner);
    }
    if cur.is_keyword("forall") || cur.is_keyword("exists") {
        return parse_quant_or_implies(cur, scope);
    }
    parse_atom(cur, scope).map(ConfigProperty::Atom)
}

fn parse_ref(cur: &mut Cursor, scope: &Scope) -> Result<ComponentRef, ParseError> {
    let name = cur.expect_ident("component id")?;
    match lookup_var(scope, &name) {
        Some(Domain::Components) => Ok(ComponentRef::Var(name)),
        Some(Domain::Bindings) => Err(cur.error(format!(
            "variable `{name}` ranges over bindings and cannot name a component"
        ))),
        None => Ok(ComponentRef::Named(name)),
    }
}

fn parse_bound_var(cur: &mut Cursor, scope: &Scope) -> Result<String, ParseError> {
    let name = cur.expect_ident("variable name")?;
    if lookup_var(scope, &name).is_none() {
        return Err(cur.error(format!("variable `{name}` is not bound by a quantifier")));
    }
    Ok(name)
}

pub(crate) fn parse_literal(cur: &mut Cursor) -> Result<Value, ParseError> {
    match cur.peek() {
        Some(Token::Str(s)) => {
            let s = s.clone();
            cur.bump();
            Ok(Value::Str(s))
        }
        Some(Token::Ident(s)) if s == "true" || s == "false" => {
            let b = s == "true";
            cur.bump();
            Ok(Value::Bool(b))
        }
        Some(Token::Int(_)) | Some(Token::Minus) => cur.expect_int().map(Value::Int),
        _ => Err(cur.unexpected("literal")),
    }
}

fn parse_atom(cur: &mut Cursor, scope: &Scope) -> Result<Atom, ParseError> {
    let head = cur.expect_ident("property")?;
    let atom = match head.as_str() {
        "true" => return Ok(Atom::True),
        "false" => return Ok(Atom::False),
        "component" | "started" => {
            cur.expect(&Token::LParen)?;
            let r = parse_ref(cur, scope)?;
            if head == "component" {
                Atom::ComponentPresent(r)
            } else {
                Atom::Started(r)
            }
        }
        "bound" => {
            cur.expect(&Token::LParen)?;
            let out_component = parse_ref(cur, scope)?;
            cur.expect(&Token::Dot)?;
            let out_port = cur.expect_ident("port name")?;
            cur.expect(&Token::Comma)?;
            let in_component = parse_ref(cur, scope)?;
            cur.expect(&Token::Dot)?;
            let in_port = cur.expect_ident("port name")?;
            Atom::Bound {
                out_component,
                out_port,
                in_component,
                in_port,
            }
        }
        "param" => {
            cur.expect(&Token::LParen)?;
            let component = parse_ref(cur, scope)?;
            cur.expect(&Token::Dot)?;
            let param = cur.expect_ident("parameter name")?;
            cur.expect(&Token::RParen)?;
            let op = cur
                .peek()
                .and_then(RelOp::from_token)
                .ok_or_else(|| cur.unexpected("comparison operator"))?;
            cur.bump();
            let literal = parse_literal(cur)?;
            return Ok(Atom::ParamCmp {
                component,
                param,
                op,
                literal,
            });
        }
        "sub" => {
            cur.expect(&Token::LParen)?;
            let child = parse_ref(cur, scope)?;
            cur.expect(&Token::Comma)?;
            let parent = parse_ref(cur, scope)?;
            Atom::Subcomponent { child, parent }
        }
        "class" => {
            cur.expect(&Token::LParen)?;
            let var = parse_bound_var(cur, scope)?;
            cur.expect(&Token::RParen)?;
            cur.expect(&Token::Eq)?;
            let class = cur.expect_ident("class name")?;
            return Ok(Atom::ClassOf { var, class });
        }
        "present" => {
            cur.expect(&Token::LParen)?;
            Atom::VarPresent(parse_bound_var(cur, scope)?)
        }
        other => return Err(cur.error(format!("unknown property `{other}`"))),
    };
    cur.expect(&Token::RParen)?;
    Ok(atom)
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Atom::True => f.write_str("true"),
            Atom::False => f.write_str("false"),
            Atom::ComponentPresent(r) => write!(f, "component({})", r.text()),
            Atom::Started(r) => write!(f, "started({})", r.text()),
            Atom::Bound {
                out_component,
                out_port,
                in_component,
                in_port,
            } => write!(
                f,
                "bound({}.{}, {}.{})",
                out_component.text(),
                out_port,
                in_component.text(),
                in_port
            ),
            Atom::ParamCmp {
                component,
                param,
                op,
                literal,
            } => write!(
                f,
                "param({}.{}) {} {}",
                component.text(),
                param,
                op.symbol(),
                literal
            ),
            Atom::Subcomponent { child, parent } => {
                write!(f, "sub({}, {})", child.text(), parent.text())
            }
            Atom::ClassOf { var, class } => write!(f, "class({var}) = {class}"),
            Atom::VarPresent(var) => write!(f, "present({var})"),
        }
    }
}

fn level(cp: &ConfigProperty) -> u8 {
    match cp {
        ConfigProperty::Forall { .. } | ConfigProperty::Exists { .. } => 0,
        ConfigProperty::Implies(..) => 1,
        ConfigProperty::Or(..) => 2,
        ConfigProperty::And(..) => 3,
        ConfigProperty::Not(_) => 4,
        ConfigProperty::Atom(_) => 5,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, cp: &ConfigProperty, min: u8) -> fmt::Result {
    if level(cp) < min {
        f.write_str("(")?;
        write_at(f, cp, 0)?;
        return f.write_str(")");
    }
    match cp {
        ConfigProperty::Atom(a) => write!(f, "{a}"),
        ConfigProperty::Not(p) => {
            f.write_str("not ")?;
            write_at(f, p, 4)
        }
        ConfigProperty::And(a, b) => {
            write_at(f, a, 3)?;
            f.write_str(" and ")?;
            write_at(f, b, 4)
        }
        ConfigProperty::Or(a, b) => {
            write_at(f, a, 2)?;
            f.write_str(" or ")?;
            write_at(f, b, 3)
        }
        ConfigProperty::Implies(a, b) => {
            write_at(f, a, 2)?;
            f.write_str(" => ")?;
            write_at(f, b, 1)
        }
        ConfigProperty::Forall { var, domain, body }
        | ConfigProperty::Exists { var, domain, body } => {
            let q = if matches!(cp, ConfigProperty::Forall { .. }) {
                "forall"
            } else {
                "exists"
            };
            write!(f, "{q} {var} in {}: ", domain.keyword())?;
            write_at(f, body, 0)
        }
    }
}

impl fmt::Display for ConfigProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_at(f, self, 0)
    }
}
