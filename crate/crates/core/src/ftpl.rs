//! Temporal formulas over reconfiguration paths.
//!
//! ```text
//! formula := "after" EVENT formula | "before" EVENT trace | trace
//! trace   := ("always" | "eventually") "[" cp "]"
//! EVENT   := NAME ("normal" | "exceptional" | "terminates")
//! ```
//!
//! Line comments start with `//` or `#`.

use std::collections::BTreeSet;
use std::fmt;

use crate::model::{model_equal, parse_cp, ComponentModel, ConfigProperty, CpError, Vocabulary};
use crate::syntax::{Comments, Cursor, ParseError, Token};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modality {
    /// The operation changed the configuration.
    Normal,
    /// The operation left the configuration unchanged.
    Exceptional,
    Terminates,
}

impl Modality {
    pub fn keyword(self) -> &'static str {
        match self {
            Modality::Normal => "normal",
            Modality::Exceptional => "exceptional",
            Modality::Terminates => "terminates",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventSpec {
    pub op: String,
    pub modality: Modality,
}

impl EventSpec {
    pub fn new(op: &str, modality: Modality) -> Self {
        Self {
            op: op.into(),
            modality,
        }
    }
}

impl fmt::Display for EventSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.op, self.modality.keyword())
    }
}

/// Whether the step `prev --label--> next` ending at `position` satisfies
/// `e`. Position 0 has no incoming step and satisfies no event.
pub fn event_holds(
    prev: &ComponentModel,
    next: &ComponentModel,
    label: &str,
    e: &EventSpec,
    position: usize,
) -> bool {
    if position == 0 || label != e.op {
        return false;
    }
    let same = model_equal(prev, next);
    match e.modality {
        Modality::Normal => !same,
        Modality::Exceptional => same,
        Modality::Terminates => true,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceProperty {
    Always(ConfigProperty),
    Eventually(ConfigProperty),
}

impl TraceProperty {
    pub fn cp(&self) -> &ConfigProperty {
        match self {
            TraceProperty::Always(cp) | TraceProperty::Eventually(cp) => cp,
        }
    }
}

impl fmt::Display for TraceProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceProperty::Always(cp) => write!(f, "always [{cp}]"),
            TraceProperty::Eventually(cp) => write!(f, "eventually [{cp}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FtplFormula {
    After(EventSpec, Box<FtplFormula>),
    Before(EventSpec, TraceProperty),
    Trace(TraceProperty),
}

impl FtplFormula {
    pub fn after(e: EventSpec, inner: FtplFormula) -> Self {
        FtplFormula::After(e, Box::new(inner))
    }

    pub fn always(cp: ConfigProperty) -> Self {
        FtplFormula::Trace(TraceProperty::Always(cp))
    }

    pub fn eventually(cp: ConfigProperty) -> Self {
        FtplFormula::Trace(TraceProperty::Eventually(cp))
    }

    pub fn events(&self) -> Vec<&EventSpec> {
        let mut out = Vec::new();
        let mut f = self;
        loop {
            match f {
                FtplFormula::After(e, inner) => {
                    out.push(e);
                    f = inner;
                }
                FtplFormula::Before(e, _) => {
                    out.push(e);
                    return out;
                }
                FtplFormula::Trace(_) => return out,
            }
        }
    }

    pub fn event_ops(&self) -> BTreeSet<&str> {
        self.events().into_iter().map(|e| e.op.as_str()).collect()
    }

    /// The innermost trace property.
    pub fn trace(&self) -> &TraceProperty {
        match self {
            FtplFormula::After(_, inner) => inner.trace(),
            FtplFormula::Before(_, t) | FtplFormula::Trace(t) => t,
        }
    }

    pub fn mentions_params(&self) -> bool {
        self.trace().cp().mentions_params()
    }

    pub fn resolve(&self, vocabulary: &Vocabulary) -> Result<(), CpError> {
        self.trace().cp().resolve(vocabulary)
    }

    /// Formulas for which satisfaction on a suffix carries over to every
    /// later suffix of the same lasso once its cycle has stabilised.
    pub fn is_suffix_monotone(&self) -> bool {
        match self {
            FtplFormula::After(..) => true,
            FtplFormula::Before(_, t) | FtplFormula::Trace(t) => {
                matches!(t, TraceProperty::Always(_))
            }
        }
    }
}

impl fmt::Display for FtplFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FtplFormula::After(e, inner) => write!(f, "after {e} {inner}"),
            FtplFormula::Before(e, t) => write!(f, "before {e} {t}"),
            FtplFormula::Trace(t) => write!(f, "{t}"),
        }
    }
}

pub fn parse_formula(text: &str) -> Result<FtplFormula, ParseError> {
    let mut cur = Cursor::new(text, Comments::Both)?;
    let f = parse_temp(&mut cur)?;
    cur.expect_end()?;
    Ok(f)
}

fn parse_temp(cur: &mut Cursor) -> Result<FtplFormula, ParseError> {
    if cur.eat_keyword("after") {
        let e = parse_event(cur)?;
        let inner = parse_temp(cur)?;
        Ok(FtplFormula::after(e, inner))
    } else if cur.eat_keyword("before") {
        let e = parse_event(cur)?;
        Ok(FtplFormula::Before(e, parse_trace(cur)?))
    } else if cur.is_keyword("always") || cur.is_keyword("eventually") {
        Ok(FtplFormula::Trace(parse_trace(cur)?))
    } else {
        Err(cur.unexpected("`after`, `before`, `always` or `eventually`"))
    }
}

fn parse_event(cur: &mut Cursor) -> Result<EventSpec, ParseError> {
    let op = cur.expect_ident("operation name")?;
    let modality = match cur.peek() {
        Some(Token::Ident(m)) => match m.as_str() {
            "normal" => Modality::Normal,
            "exceptional" => Modality::Exceptional,
            "terminates" => Modality::Terminates,
            other => return Err(cur.error(format!("unknown modality `{other}`"))),
        },
        _ => return Err(cur.unexpected("`normal`, `exceptional` or `terminates`")),
    };
    cur.bump();
    Ok(EventSpec { op, modality })
}

fn parse_trace(cur: &mut Cursor) -> Result<TraceProperty, ParseError> {
    let always = cur.eat_keyword("always");
    if !always && !cur.eat_keyword("eventually") {
        return Err(cur.unexpected("`always` or `eventually`"));
    }
    cur.expect(&Token::LBracket)?;
    let cp = parse_cp(cur)?;
    cur.expect(&Token::RBracket)?;
    Ok(if always {
        TraceProperty::Always(cp)
    } else {
        TraceProperty::Eventually(cp)
    })
}
