//! Textual formats for component models (`.arch`) and recipe sets (`.ops`).
//!
//! ```text
//! model HttpServerModel {
//!   composite HttpServer {
//!     input httpRequest : Trequest
//!     contains RequestReceiver
//!     contains RequestHandler
//!   }
//!   component CacheHandler {
//!     output cache : Tcache
//!     param memorySize : int = 100
//!     state stopped
//!   }
//!   bind CacheHandler.cache -> RequestHandler.getCache
//!   delegate HttpServer.httpRequest -> RequestReceiver.request
//! }
//! ```
//!
//! ```text
//! op AddCacheHandler {
//!   add component CacheHandler { output cache : Tcache } in HttpServer
//!   bind CacheHandler.cache -> RequestHandler.getCache
//!   set CacheHandler.memorySize := param(CacheHandler.memorySize) + 10
//! }
//! ```
//!
//! Both formats accept `//` line comments. `class` defaults to the component
//! id, `state` defaults to `started`, and `composite` is a synonym for
//! `component`. The printers emit a canonical form that the parsers read back
//! to an equal value.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::model::{
    parse_literal, validate_model, Binding, Component, ComponentModel, Delegation, Lifecycle,
    Param, ValueClass, Violation,
};
use crate::reconfig::{IntExpr, Primitive, Recipe, RecipeSet};
use crate::syntax::{Comments, Cursor, ParseError, Token};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AdlError {
    #[error("{0}")]
    Syntax(#[from] ParseError),
    #[error("invalid model: {}", join(.0))]
    Invalid(Vec<Violation>),
}

fn join(vs: &[Violation]) -> String {
    vs.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

/// Reads a model without checking its structural invariants, except that
/// component ids must be unique.
pub fn parse_model_unchecked(text: &str) -> Result<ComponentModel, AdlError> {
    let mut cur = Cursor::new(text, Comments::Slashes)?;
    cur.expect_keyword("model")?;
    let name = cur.expect_ident("model name")?;
    let mut m = ComponentModel::new(name);
    let mut duplicates = Vec::new();
    cur.expect(&Token::LBrace)?;
    while !cur.eat(&Token::RBrace) {
        if cur.eat_keyword("component") || cur.eat_keyword("composite") {
            let c = parse_component_block(&mut cur)?;
            if m.components.contains_key(&c.id) {
                duplicates.push(Violation::new(
                    format!("component {}", c.id),
                    "declared more than once",
                ));
            } else {
                m.insert(c);
            }
        } else if cur.eat_keyword("bind") {
            m.bindings.insert(parse_binding(&mut cur)?);
        } else if cur.eat_keyword("delegate") {
            let (composite, composite_port) = cur.expect_dotted("composite port")?;
            cur.expect(&Token::Arrow)?;
            let (inner, inner_port) = cur.expect_dotted("subcomponent port")?;
            m.delegations.insert(Delegation::new(
                &composite,
                &composite_port,
                &inner,
                &inner_port,
            ));
        } else {
            return Err(cur
                .unexpected("`component`, `composite`, `bind`, `delegate` or `}`")
                .into());
        }
    }
    cur.expect_end()?;
    if duplicates.is_empty() {
        Ok(m)
    } else {
        Err(AdlError::Invalid(duplicates))
    }
}

/// [`parse_model_unchecked`] followed by [`validate_model`].
pub fn parse_model(text: &str) -> Result<ComponentModel, AdlError> {
    let m = parse_model_unchecked(text)?;
    let violations = validate_model(&m);
    if violations.is_empty() {
        Ok(m)
    } else {
        Err(AdlError::Invalid(violations))
    }
}

fn parse_binding(cur: &mut Cursor) -> Result<Binding, ParseError> {
    let (oc, op) = cur.expect_dotted("output port")?;
    cur.expect(&Token::Arrow)?;
    let (ic, ip) = cur.expect_dotted("input port")?;
    Ok(Binding::new(&oc, &op, &ic, &ip))
}

/// After the `component` or `composite` keyword.
fn parse_component_block(cur: &mut Cursor) -> Result<Component, ParseError> {
    let id = cur.expect_ident("component id")?;
    let mut class = None;
    let mut c = Component::new(id.clone(), id);
    let mut seen_state = false;
    cur.expect(&Token::LBrace)?;
    while !cur.eat(&Token::RBrace) {
        if cur.eat_keyword("class") {
            if class.is_some() {
                return Err(cur.error("class declared twice"));
            }
            class = Some(cur.expect_ident("class name")?);
        } else if cur.is_keyword("input") || cur.is_keyword("output") {
            let input = cur.eat_keyword("input");
            if !input {
                cur.expect_keyword("output")?;
            }
            let port = cur.expect_ident("port name")?;
            if c.port(&port).is_some() || c.params.contains_key(&port) {
                return Err(cur.error(format!("name `{port}` declared twice")));
            }
            cur.expect(&Token::Colon)?;
            let port_class = cur.expect_ident("port class")?;
            if input {
                c.inputs.insert(port, port_class);
            } else {
                c.outputs.insert(port, port_class);
            }
        } else if cur.eat_keyword("param") {
            let name = cur.expect_ident("parameter name")?;
            if c.port(&name).is_some() || c.params.contains_key(&name) {
                return Err(cur.error(format!("name `{name}` declared twice")));
            }
            cur.expect(&Token::Colon)?;
            let kw = cur.expect_ident("`int`, `string` or `bool`")?;
            let value_class = ValueClass::from_keyword(&kw)
                .ok_or_else(|| cur.error(format!("unknown value class `{kw}`")))?;
            cur.expect(&Token::Eq)?;
            let value = parse_literal(cur)?;
            if value.class() != value_class {
                return Err(cur.error(format!(
                    "parameter `{name}` is declared {kw} but initialised with a {} literal",
                    value.class().keyword()
                )));
            }
            c.params.insert(name, Param::new(value));
        } else if cur.eat_keyword("contains") {
            let child = cur.expect_ident("subcomponent id")?;
            c.contains.insert(child);
        } else if cur.eat_keyword("state") {
            if seen_state {
                return Err(cur.error("state declared twice"));
            }
            seen_state = true;
            c.lifecycle = if cur.eat_keyword("started") {
                Lifecycle::Started
            } else if cur.eat_keyword("stopped") {
                Lifecycle::Stopped
            } else {
                return Err(cur.unexpected("`started` or `stopped`"));
            };
        } else {
            return Err(
                cur.unexpected("`class`, `input`, `output`, `param`, `contains`, `state` or `}`")
            );
        }
    }
    if let Some(class) = class {
        c.class = class;
    }
    Ok(c)
}

/// Writes `component ID { ... }` with the body indented one level deeper
/// than `indent` and the closing brace at `indent`.
pub fn write_component(w: &mut impl fmt::Write, c: &Component, indent: &str) -> fmt::Result {
    let kw = if c.is_composite() {
        "composite"
    } else {
        "component"
    };
    let mut lines = Vec::new();
    if c.class != c.id {
        lines.push(format!("class {}", c.class));
    }
    for (p, class) in &c.inputs {
        lines.push(format!("input {p} : {class}"));
    }
    for (p, class) in &c.outputs {
        lines.push(format!("output {p} : {class}"));
    }
    for (p, param) in &c.params {
        lines.push(format!(
            "param {p} : {} = {}",
            param.class.keyword(),
            param.value
        ));
    }
    for child in &c.contains {
        lines.push(format!("contains {child}"));
    }
    if c.lifecycle == Lifecycle::Stopped {
        lines.push("state stopped".to_string());
    }
    if lines.is_empty() {
        return write!(w, "{kw} {} {{}}", c.id);
    }
    writeln!(w, "{kw} {} {{", c.id)?;
    for l in lines {
        writeln!(w, "{indent}  {l}")?;
    }
    write!(w, "{indent}}}")
}

pub fn print_model(m: &ComponentModel) -> String {
    let mut out = format!("model {} {{\n", m.name);
    for c in m.components.values() {
        out.push_str("  ");
        write_component(&mut out, c, "  ").expect("writing to a String");
        out.push('\n');
    }
    for b in &m.bindings {
        let _ = writeln!(out, "  bind {b}");
    }
    for d in &m.delegations {
        let _ = writeln!(out, "  delegate {d}");
    }
    out.push_str("}\n");
    out
}

/// Hex SHA-256 of the canonical text of `m`.
pub fn model_digest(m: &ComponentModel) -> String {
    hex::encode(Sha256::digest(print_model(m).as_bytes()))
}

pub fn parse_recipes(text: &str) -> Result<RecipeSet, ParseError> {
    let mut cur = Cursor::new(text, Comments::Slashes)?;
    let mut set = RecipeSet::new();
    while !cur.at_end() {
        cur.expect_keyword("op")?;
        let at = cur.error("");
        let name = cur.expect_ident("operation name")?;
        cur.expect(&Token::LBrace)?;
        let mut steps = Vec::new();
        while !cur.eat(&Token::RBrace) {
            steps.push(parse_step(&mut cur)?);
        }
        if steps.is_empty() {
            return Err(ParseError::new(
                at.line,
                at.column,
                format!("operation `{name}` has no steps"),
            ));
        }
        if let Err(r) = set.insert(Recipe { name, steps }) {
            let why = if r.name == crate::reconfig::EvolutionOperation::RUN {
                "is reserved".to_string()
            } else {
                "is defined twice".to_string()
            };
            return Err(ParseError::new(
                at.line,
                at.column,
                format!("operation `{}` {why}", r.name),
            ));
        }
    }
    Ok(set)
}

pub fn print_recipes(set: &RecipeSet) -> String {
    let mut out = String::new();
    for (i, r) in set.recipes.values().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        let _ = writeln!(out, "op {} {{", r.name);
        for s in &r.steps {
            let _ = writeln!(out, "  {s}");
        }
        out.push_str("}\n");
    }
    out
}

/// Parses one primitive, as written inside an `op` body.
pub fn parse_primitive(text: &str) -> Result<Primitive, ParseError> {
    let mut cur = Cursor::new(text, Comments::Slashes)?;
    let p = parse_step(&mut cur)?;
    cur.expect_end()?;
    Ok(p)
}

fn parse_step(cur: &mut Cursor) -> Result<Primitive, ParseError> {
    let kw = cur.expect_ident("step")?;
    Ok(match kw.as_str() {
        "add" => {
            if !(cur.eat_keyword("component") || cur.eat_keyword("composite")) {
                return Err(cur.unexpected("`component` or `composite`"));
            }
            let component = parse_component_block(cur)?;
            let parent = if cur.eat_keyword("in") {
                Some(cur.expect_ident("parent id")?)
            } else {
                None
            };
            Primitive::AddComponent { component, parent }
        }
        "remove" => {
            cur.expect_keyword("component")?;
            Primitive::RemoveComponent(cur.expect_ident("component id")?)
        }
        "bind" => Primitive::Bind(parse_binding(cur)?),
        "unbind" => Primitive::Unbind(parse_binding(cur)?),
        "set" => {
            let (component, param) = cur.expect_dotted("parameter")?;
            cur.expect(&Token::Assign)?;
            let expr = parse_sum(cur)?;
            Primitive::SetParam {
                component,
                param,
                expr,
            }
        }
        "stop" => Primitive::Stop(cur.expect_ident("component id")?),
        "start" => Primitive::Start(cur.expect_ident("component id")?),
        other => {
            return Err(cur.error(format!(
                "unknown step `{other}`; expected add, remove, bind, unbind, set, stop or start"
            )))
        }
    })
}

fn parse_sum(cur: &mut Cursor) -> Result<IntExpr, ParseError> {
    let mut lhs = parse_product(cur)?;
    loop {
        if cur.eat(&Token::Plus) {
            lhs = IntExpr::Add(Box::new(lhs), Box::new(parse_product(cur)?));
        } else if cur.eat(&Token::Minus) {
            lhs = IntExpr::Sub(Box::new(lhs), Box::new(parse_product(cur)?));
        } else {
            return Ok(lhs);
        }
    }
}

fn parse_product(cur: &mut Cursor) -> Result<IntExpr, ParseError> {
    let mut lhs = parse_operand(cur)?;
    while cur.eat(&Token::Star) {
        lhs = IntExpr::Mul(Box::new(lhs), Box::new(parse_operand(cur)?));
    }
    Ok(lhs)
}

fn parse_operand(cur: &mut Cursor) -> Result<IntExpr, ParseError> {
    if cur.eat(&Token::LParen) {
        let e = parse_sum(cur)?;
        cur.expect(&Token::RParen)?;
        return Ok(e);
    }
    if cur.eat_keyword("param") {
        cur.expect(&Token::LParen)?;
        let (component, param) = cur.expect_dotted("parameter")?;
        cur.expect(&Token::RParen)?;
        return Ok(IntExpr::Param { component, param });
    }
    match cur.peek() {
        Some(Token::Int(_)) | Some(Token::Minus) => cur.expect_int().map(IntExpr::Lit),
        _ => Err(cur.unexpected("integer expression")),
    }
}

/// Ids of every component a recipe set may add.
pub fn added_components(set: &RecipeSet) -> BTreeSet<String> {
    set.recipes
        .values()
        .flat_map(|r| r.steps.iter())
        .filter_map(|s| match s {
            Primitive::AddComponent { component, .. } => Some(component.id.clone()),
            _ => None,
        })
        .collect()
}
