//! Design-time model checking of temporal properties over reconfiguration
//! paths of component-based architectures.
//!
//! A reconfiguration path is a finite sequence of evolution operations,
//! optionally ending in a cycle that repeats forever. Such a path is a
//! deterministic lasso automaton ([`pathspec`]); the [`checker`] walks it
//! with per-state marks so that every transition is applied at most twice,
//! and the [`oracle`] evaluates the same formulas by brute force on the
//! unrolled configuration sequence.

pub mod adl;
pub mod checker;
pub mod ftpl;
pub mod model;
pub mod oracle;
pub mod pathspec;
pub mod reconfig;
pub mod syntax;

pub use checker::{check, CheckError, CheckOptions, Verdict};
pub use ftpl::{parse_formula, FtplFormula};
pub use model::{model_equal, validate_model, ComponentModel};
pub use pathspec::{build_automaton, parse_path, PathAutomaton, PathExpr};
pub use reconfig::{apply_evolution, apply_primitive, EvolutionOperation, RecipeSet};
