//! Reconfiguration paths and their lasso automata.
//!
//! A path is a finite sequence of operation names, optionally followed by a
//! group repeated forever:
//!
//! ```text
//! # comments start with '#'
//! run RemoveCacheHandler AddCacheHandler (MemorySizeUp run AddFileServer)+
//! ```
//!
//! The automaton has one state per prefix operation, one per cycle
//! operation, and a final state when there is no cycle. States are numbered
//! in path order, so `q < q'` is integer comparison and the only transition
//! that goes backwards is the one leaving `q_max`.

use std::fmt;

use thiserror::Error;

use crate::reconfig::{EvolutionOperation, RecipeSet};
use crate::syntax::{Comments, Cursor, ParseError, Token};

pub type StateId = usize;

#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct PathExpr {
    pub prefix: Vec<String>,
    /// Empty for a finite path.
    pub cycle: Vec<String>,
}

impl PathExpr {
    pub fn new(prefix: Vec<String>, cycle: Vec<String>) -> Self {
        Self { prefix, cycle }
    }

    pub fn finite(prefix: Vec<String>) -> Self {
        Self::new(prefix, Vec::new())
    }

    pub fn has_cycle(&self) -> bool {
        !self.cycle.is_empty()
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.prefix.iter().chain(&self.cycle).map(String::as_str)
    }

    /// The first name not known to `recipes`.
    pub fn unknown_operation(&self, recipes: &RecipeSet) -> Option<&str> {
        self.labels().find(|l| !recipes.knows(l))
    }
}

impl fmt::Display for PathExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for p in &self.prefix {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            f.write_str(p)?;
        }
        if self.has_cycle() {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "({})+", self.cycle.join(" "))?;
        }
        Ok(())
    }
}

/// Reads a path without checking operation names.
pub fn parse_path_syntax(text: &str) -> Result<PathExpr, ParseError> {
    let mut cur = Cursor::new(text, Comments::Hash)?;
    let mut prefix = Vec::new();
    let mut cycle = Vec::new();
    while !cur.at_end() {
        if cur.eat(&Token::LParen) {
            while !cur.eat(&Token::RParen) {
                cycle.push(cur.expect_ident("operation name or `)`")?);
            }
            if cycle.is_empty() {
                return Err(cur.error("empty repeated group"));
            }
            cur.expect(&Token::Plus)?;
            if !cur.at_end() {
                return Err(cur.error("the repeated group must come last"));
            }
        } else {
            prefix.push(cur.expect_ident("operation name or `(`")?);
        }
    }
    Ok(PathExpr { prefix, cycle })
}

/// Reads a path and checks that every name is `run` or a recipe of
/// `recipes`.
pub fn parse_path(text: &str, recipes: &RecipeSet) -> Result<PathExpr, ParseError> {
    let p = parse_path_syntax(text)?;
    if let Some(name) = p.unknown_operation(recipes) {
        let (line, column) = locate(text, name);
        return Err(ParseError::new(
            line,
            column,
            format!("unknown operation `{name}`"),
        ));
    }
    Ok(p)
}

fn locate(text: &str, word: &str) -> (usize, usize) {
    for (i, line) in text.lines().enumerate() {
        let code = line.split('#').next().unwrap_or("");
        let mut start = 0;
        while let Some(off) = code[start..].find(word) {
            let at = start + off;
            let before = code[..at].chars().last();
            let after = code[at + word.len()..].chars().next();
            let boundary =
                |c: Option<char>| !c.is_some_and(|c| c.is_ascii_alphanumeric() || c == '_');
            if boundary(before) && boundary(after) {
                return (i + 1, code[..at].chars().count() + 1);
            }
            start = at + word.len();
        }
    }
    (1, 1)
}

/// A deterministic lasso automaton. Each state has at most one outgoing
/// transition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathAutomaton {
    expr: PathExpr,
    labels: Vec<String>,
}

pub fn build_automaton(p: &PathExpr) -> PathAutomaton {
    let labels: Vec<String> = p.labels().map(str::to_string).collect();
    PathAutomaton {
        expr: p.clone(),
        labels,
    }
}

impl PathAutomaton {
    pub fn expr(&self) -> &PathExpr {
        &self.expr
    }

    pub fn num_states(&self) -> usize {
        if self.expr.has_cycle() {
            self.labels.len()
        } else {
            self.labels.len() + 1
        }
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn initial(&self) -> StateId {
        0
    }

    pub fn q_max(&self) -> StateId {
        self.num_states() - 1
    }

    /// The state the cycle returns to.
    pub fn back_target(&self) -> Option<StateId> {
        self.expr.has_cycle().then_some(self.expr.prefix.len())
    }

    pub fn prefix_len(&self) -> usize {
        self.expr.prefix.len()
    }

    pub fn cycle_len(&self) -> usize {
        self.expr.cycle.len()
    }

    /// Whether `q` lies on the cycle.
    pub fn in_cycle(&self, q: StateId) -> bool {
        self.back_target().is_some_and(|b| q >= b)
    }

    /// The outgoing transition of `q`, or `None` at the terminal state of a
    /// finite path.
    ///
    /// # Panics
    /// If `q` is not a state.
    pub fn succ(&self, q: StateId) -> Option<(&str, StateId)> {
        assert!(q < self.num_states(), "no state {q}");
        let label = self.labels.get(q)?;
        let next = if q + 1 < self.labels.len() || !self.expr.has_cycle() {
            q + 1
        } else {
            self.expr.prefix.len()
        };
        Some((label.as_str(), next))
    }

    /// The state reached after `k` transitions from the initial state, if
    /// the path is that long.
    pub fn state_at(&self, k: usize) -> Option<StateId> {
        let p = self.prefix_len();
        if k < p || (!self.expr.has_cycle() && k == p) {
            Some(k)
        } else if self.expr.has_cycle() {
            Some(p + (k - p) % self.cycle_len())
        } else {
            None
        }
    }

    /// The path still to be followed from `q`.
    pub fn residual(&self, q: StateId) -> PathExpr {
        let p = self.prefix_len();
        if q < p {
            PathExpr::new(self.expr.prefix[q..].to_vec(), self.expr.cycle.clone())
        } else if self.expr.has_cycle() {
            PathExpr::new(self.expr.cycle[q - p..].to_vec(), self.expr.cycle.clone())
        } else {
            PathExpr::default()
        }
    }

    /// Resolves every label against `recipes`, indexed by source state.
    pub fn operations(
        &self,
        recipes: &RecipeSet,
    ) -> Result<Vec<EvolutionOperation>, UnknownOperation> {
        self.labels
            .iter()
            .map(|l| {
                recipes
                    .operation(l)
                    .ok_or_else(|| UnknownOperation(l.clone()))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown operation `{0}`")]
pub struct UnknownOperation(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mark {
    #[default]
    Unchecked,
    Again,
    Checked,
}

/// Per-state marks, owned by one checking-operator instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkMap {
    marks: Vec<Mark>,
}

impl MarkMap {
    pub fn fresh(a: &PathAutomaton) -> Self {
        Self::with_states(a.num_states())
    }

    pub fn with_states(n: usize) -> Self {
        Self {
            marks: vec![Mark::Unchecked; n],
        }
    }

    pub fn get(&self, q: StateId) -> Mark {
        self.marks[q]
    }

    pub fn set(&mut self, q: StateId, mark: Mark) {
        self.marks[q] = mark;
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, Mark)> + '_ {
        self.marks.iter().copied().enumerate()
    }
}
