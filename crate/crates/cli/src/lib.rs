//! Command-line front end: reads architecture, recipe, path and formula
//! files, runs the checker and prints text or JSON reports.

pub mod report;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::thread;

use anyhow::Context;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use lassocheck::adl::{model_digest, parse_model, parse_recipes, print_model, AdlError};
use lassocheck::checker::{check_with_stats, params_irrelevant, CheckError, CheckOptions, Verdict};
use lassocheck::ftpl::{parse_formula, FtplFormula};
use lassocheck::model::{validate_model, ComponentModel, Violation, Vocabulary};
use lassocheck::oracle::{
    oracle_eval, unfold_to_lasso, unfold_to_lasso_modulo_params, DEFAULT_MAX_ROUNDS,
};
use lassocheck::pathspec::{build_automaton, parse_path, PathAutomaton, PathExpr};
use lassocheck::reconfig::{apply_evolution, apply_sequence, is_idempotent_sequence, RecipeSet};
use lassocheck::syntax::ParseError;

use report::{
    CheckReport, ErrorReport, IdempotenceReport, SimulateReport, SimulationStep, ValidateReport,
    ViolationEntry,
};

pub const EXIT_HOLDS: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_INVALID_MODEL: u8 = 4;
pub const EXIT_DISAGREEMENT: u8 = 5;

#[derive(Debug, Parser)]
#[command(
    name = "lassocheck",
    version,
    about = "Check temporal properties of architecture reconfiguration paths"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a formula on a reconfiguration path.
    Check(CheckArgs),
    /// Apply the operations of a path step by step.
    Simulate(SimulateArgs),
    /// Test whether the cycle of a path is idempotent at its entry.
    Idempotence(PathInputs),
    /// Check the structural rules of a model.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct PathInputs {
    /// Initial architecture (.arch).
    #[arg(long)]
    model: PathBuf,
    /// Reconfiguration recipes (.ops).
    #[arg(long)]
    ops: Option<PathBuf>,
    /// Reconfiguration path (.rp).
    #[arg(long)]
    path: PathBuf,
    /// Print a JSON report.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    inputs: PathInputs,
    /// Formula text.
    #[arg(
        long,
        conflicts_with = "formula_file",
        required_unless_present = "formula_file"
    )]
    formula: Option<String>,
    /// File holding the formula (.ftpl).
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// Transition budget; exploration stops with an unknown verdict when it
    /// runs out.
    #[arg(long)]
    max_steps: Option<usize>,
    /// Compare configurations without parameter values when testing the
    /// cycle for idempotence.
    #[arg(long)]
    ignore_params: bool,
    /// Evaluate the formula with the reference unfolding as well.
    #[arg(long)]
    oracle: bool,
    /// Directory receiving the witness configurations, or the reached
    /// model, residual path and pending formula of an unknown verdict.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    /// Additional model whose identifiers the formula may name, such as the
    /// initial model when resuming from a residual.
    #[arg(long)]
    vocabulary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    inputs: PathInputs,
    /// Number of transitions to apply.
    #[arg(long)]
    steps: usize,
    /// Directory receiving one `step_NNN.arch` file per configuration.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Architecture to validate (.arch).
    #[arg(long)]
    model: PathBuf,
    /// Print a JSON report.
    #[arg(long)]
    json: bool,
}

/// An error that ends the command with `code`.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::usage(format!("{e:#}"))
    }
}

fn parse_failure(file: &Path, e: &ParseError) -> Failure {
    Failure::usage(format!("{}:{e}", file.display()))
}

fn invalid_model(file: &Path, violations: &[Violation]) -> Failure {
    let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
    Failure {
        code: EXIT_INVALID_MODEL,
        message: format!("{}: invalid model: {}", file.display(), list.join("; ")),
    }
}

fn read(file: &Path) -> Result<String, Failure> {
    Ok(fs::read_to_string(file).with_context(|| format!("cannot read {}", file.display()))?)
}

fn load_model(file: &Path) -> Result<ComponentModel, Failure> {
    match parse_model(&read(file)?) {
        Ok(m) => Ok(m),
        Err(AdlError::Syntax(e)) => Err(parse_failure(file, &e)),
        Err(AdlError::Invalid(v)) => Err(invalid_model(file, &v)),
    }
}

fn load_recipes(file: Option<&Path>) -> Result<RecipeSet, Failure> {
    match file {
        None => Ok(RecipeSet::new()),
        Some(f) => parse_recipes(&read(f)?).map_err(|e| parse_failure(f, &e)),
    }
}

struct Loaded {
    model: ComponentModel,
    recipes: RecipeSet,
    path: PathExpr,
}

fn load_inputs(inputs: &PathInputs) -> Result<Loaded, Failure> {
    let model = load_model(&inputs.model)?;
    let recipes = load_recipes(inputs.ops.as_deref())?;
    let path =
        parse_path(&read(&inputs.path)?, &recipes).map_err(|e| parse_failure(&inputs.path, &e))?;
    Ok(Loaded {
        model,
        recipes,
        path,
    })
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), Failure> {
    let file = dir.join(name);
    Ok(fs::write(&file, contents).with_context(|| format!("cannot write {}", file.display()))?)
}

fn create_dir(dir: &Path) -> Result<(), Failure> {
    Ok(fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?)
}

fn print_json(out: &mut dyn Write, value: &impl Serialize) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("cannot serialise report")?;
    writeln!(out, "{text}").context("cannot write report")?;
    Ok(())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .context("cannot write report")?;
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns its
/// exit code. Reports go to `out`, errors to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return 0;
                }
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let json = match &cli.command {
        Command::Check(a) => a.inputs.json,
        Command::Simulate(a) => a.inputs.json,
        Command::Idempotence(a) => a.json,
        Command::Validate(a) => a.json,
    };
    let result = match cli.command {
        Command::Check(a) => run_check(a, out),
        Command::Simulate(a) => run_simulate(a, out),
        Command::Idempotence(a) => run_idempotence(a, out),
        Command::Validate(a) => run_validate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            if json {
                let report = ErrorReport {
                    error: f.message.clone(),
                    exit_code: f.code,
                };
                let _ = print_json(out, &report);
            }
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn check_failure(e: CheckError) -> Failure {
    match e {
        CheckError::InvalidModel(v) => Failure {
            code: EXIT_INVALID_MODEL,
            message: CheckError::InvalidModel(v).to_string(),
        },
        e @ CheckError::OracleDisagreement { .. } => Failure {
            code: EXIT_DISAGREEMENT,
            message: e.to_string(),
        },
        e => Failure::usage(e.to_string()),
    }
}

fn run_oracle(
    f: &FtplFormula,
    a: &PathAutomaton,
    c0: &ComponentModel,
    recipes: &RecipeSet,
    ignore_params: bool,
) -> Result<Option<bool>, Failure> {
    let ops = a
        .operations(recipes)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let lasso = if ignore_params || params_irrelevant(f, recipes) {
        unfold_to_lasso_modulo_params(a, c0, &ops, DEFAULT_MAX_ROUNDS)
    } else {
        unfold_to_lasso(a, c0, &ops, DEFAULT_MAX_ROUNDS)
    };
    oracle_eval(f, &lasso).map_err(|e| Failure::usage(e.to_string()))
}

fn run_check(args: CheckArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let Loaded {
        model,
        recipes,
        path,
    } = load_inputs(&args.inputs)?;
    let formula = match (&args.formula, &args.formula_file) {
        (Some(text), _) => {
            parse_formula(text).map_err(|e| Failure::usage(format!("formula:{e}")))?
        }
        (None, Some(file)) => parse_formula(&read(file)?).map_err(|e| parse_failure(file, &e))?,
        (None, None) => return Err(Failure::usage("a formula is required")),
    };
    let mut vocabulary = Vocabulary::default();
    if let Some(file) = &args.vocabulary {
        vocabulary = Vocabulary::from_model(&load_model(file)?);
    }
    let opts = CheckOptions {
        max_steps: args.max_steps,
        ignore_params: args.ignore_params,
        oracle_crosscheck: false,
        vocabulary,
    };
    let a = build_automaton(&path);

    let (checked, oracle) = if args.oracle {
        thread::scope(|s| {
            let oracle = s.spawn(|| run_oracle(&formula, &a, &model, &recipes, opts.ignore_params));
            let checked = check_with_stats(&formula, &a, &model, &recipes, &opts);
            let oracle = oracle.join().expect("oracle thread panicked");
            (checked, Some(oracle))
        })
    } else {
        (
            check_with_stats(&formula, &a, &model, &recipes, &opts),
            None,
        )
    };
    let (verdict, stats) = checked.map_err(check_failure)?;
    let oracle = oracle.transpose()?.flatten();
    if let (Some(checker), Some(oracle)) = (verdict.as_bool(), oracle) {
        if checker != oracle {
            return Err(check_failure(CheckError::OracleDisagreement {
                checker,
                oracle,
            }));
        }
    }

    if let Some(dir) = &args.dump_dir {
        dump_verdict(dir, &verdict, &a, &model, &recipes)?;
    }

    let report = CheckReport::new(
        formula.to_string(),
        path.to_string(),
        &verdict,
        &stats,
        oracle,
    );
    if args.inputs.json {
        print_json(out, &report)?;
    } else {
        emit(out, &check_text(&verdict, &report))?;
    }
    Ok(match verdict {
        Verdict::Holds => EXIT_HOLDS,
        Verdict::Fails(_) => EXIT_FAILS,
        Verdict::Unknown(_) => EXIT_UNKNOWN,
    })
}

fn check_text(verdict: &Verdict, report: &CheckReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{verdict}");
    if let Some(steps) = &report.witness {
        for step in steps {
            let _ = writeln!(
                s,
                "  {:>4}  q{:<3} {:<24} {}",
                step.position,
                step.state,
                step.label.as_deref().unwrap_or("-"),
                &step.digest[..16]
            );
        }
    }
    if let (Verdict::Unknown(r), Some(res)) = (verdict, &report.residual) {
        let _ = writeln!(
            s,
            "  reached after {} transitions, model digest {}",
            r.position,
            &res.reached_digest[..16]
        );
        let _ = writeln!(s, "  pending formula: {}", res.pending);
    }
    if let Some(o) = report.oracle {
        let _ = writeln!(s, "  oracle: {}", if o { "holds" } else { "fails" });
    }
    s
}

fn dump_verdict(
    dir: &Path,
    verdict: &Verdict,
    a: &PathAutomaton,
    c0: &ComponentModel,
    recipes: &RecipeSet,
) -> Result<(), Failure> {
    match verdict {
        Verdict::Holds => Ok(()),
        Verdict::Fails(w) => {
            create_dir(dir)?;
            let ops = a
                .operations(recipes)
                .map_err(|e| Failure::usage(e.to_string()))?;
            let mut q = a.initial();
            let mut c = c0.clone();
            write_file(dir, "step_000.arch", &print_model(&c))?;
            for k in 1..w.steps.len() {
                c = apply_evolution(&ops[q], &c).result;
                q = a.succ(q).map(|(_, n)| n).expect("witness lies on the path");
                write_file(dir, &format!("step_{k:03}.arch"), &print_model(&c))?;
            }
            Ok(())
        }
        Verdict::Unknown(r) => {
            create_dir(dir)?;
            write_file(dir, "reached.arch", &print_model(&r.reached))?;
            write_file(dir, "residual.rp", &format!("{}\n", r.residual))?;
            write_file(dir, "pending.ftpl", &format!("{}\n", r.pending))
        }
    }
}

fn run_simulate(args: SimulateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let Loaded {
        model,
        recipes,
        path,
    } = load_inputs(&args.inputs)?;
    let a = build_automaton(&path);
    let ops = a
        .operations(&recipes)
        .map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(dir) = &args.dump_dir {
        create_dir(dir)?;
    }
    let mut steps = Vec::new();
    let mut q = a.initial();
    let mut c = model;
    let mut label = None;
    let mut changed = false;
    for position in 0..=args.steps {
        if let Some(dir) = &args.dump_dir {
            write_file(dir, &format!("step_{position:03}.arch"), &print_model(&c))?;
        }
        steps.push(SimulationStep {
            position,
            state: q,
            label: label.take(),
            changed,
            digest: model_digest(&c),
        });
        if position == args.steps {
            break;
        }
        let Some((l, next)) = a.succ(q) else {
            break;
        };
        let outcome = apply_evolution(&ops[q], &c);
        c = outcome.result;
        changed = outcome.changed;
        label = Some(l.to_string());
        q = next;
    }
    let report = SimulateReport {
        path: path.to_string(),
        steps,
    };
    if args.inputs.json {
        print_json(out, &report)?;
    } else {
        let mut s = String::new();
        for step in &report.steps {
            let _ = writeln!(
                s,
                "{:>4}  q{:<3} {:<24} {:<9} {}",
                step.position,
                step.state,
                step.label.as_deref().unwrap_or("-"),
                if step.label.is_none() {
                    ""
                } else if step.changed {
                    "normal"
                } else {
                    "exceptional"
                },
                &step.digest[..16]
            );
        }
        emit(out, &s)?;
    }
    Ok(0)
}

fn run_idempotence(inputs: PathInputs, out: &mut dyn Write) -> Result<u8, Failure> {
    let Loaded {
        model,
        recipes,
        path,
    } = load_inputs(&inputs)?;
    let a = build_automaton(&path);
    let ops = a
        .operations(&recipes)
        .map_err(|e| Failure::usage(e.to_string()))?;
    let report = if path.has_cycle() {
        let p = a.prefix_len();
        let entry = apply_sequence(&ops[..p], &model);
        IdempotenceReport {
            path: path.to_string(),
            cycle: Some(path.cycle.join(" ")),
            entry_digest: Some(model_digest(&entry)),
            exact: Some(is_idempotent_sequence(&ops[p..], &entry, false)),
            modulo_params: Some(is_idempotent_sequence(&ops[p..], &entry, true)),
        }
    } else {
        IdempotenceReport {
            path: path.to_string(),
            cycle: None,
            entry_digest: None,
            exact: None,
            modulo_params: None,
        }
    };
    if inputs.json {
        print_json(out, &report)?;
    } else {
        let yes_no = |b: Option<bool>| match b {
            Some(true) => "yes",
            Some(false) => "no",
            None => "-",
        };
        let text = match &report.cycle {
            None => "no cycle\n".to_string(),
            Some(cycle) => format!(
                "cycle: {cycle}\nidempotent: {}\nidempotent ignoring parameters: {}\n",
                yes_no(report.exact),
                yes_no(report.modulo_params)
            ),
        };
        emit(out, &text)?;
    }
    Ok(0)
}

fn run_validate(args: ValidateArgs, out: &mut dyn Write) -> Result<u8, Failure> {
    let text = read(&args.model)?;
    let model = lassocheck::adl::parse_model_unchecked(&text);
    let violations = match model {
        Ok(m) => validate_model(&m),
        Err(AdlError::Syntax(e)) => return Err(parse_failure(&args.model, &e)),
        Err(AdlError::Invalid(v)) => v,
    };
    let report = ValidateReport {
        model: args.model.display().to_string(),
        valid: violations.is_empty(),
        violations: violations.iter().map(ViolationEntry::from).collect(),
    };
    if args.json {
        print_json(out, &report)?;
    } else if violations.is_empty() {
        emit(out, "valid\n")?;
    } else {
        let mut s = format!("{} violation(s)\n", violations.len());
        for v in &violations {
            let _ = writeln!(s, "  {v}");
        }
        emit(out, &s)?;
    }
    Ok(if violations.is_empty() {
        0
    } else {
        EXIT_INVALID_MODEL
    })
}
