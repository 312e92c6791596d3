//! Shared fixtures and seeded random generators for the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use lassocheck::adl::parse_model;
use lassocheck::ftpl::{EventSpec, FtplFormula, Modality, TraceProperty};
use lassocheck::model::{
    validate_model, Atom, Binding, Component, ComponentModel, ComponentRef, ConfigProperty,
    Delegation, Domain, Lifecycle, RelOp, Value, Vocabulary,
};
use lassocheck::pathspec::PathExpr;
use lassocheck::reconfig::{IntExpr, Primitive, PrimitiveKind, Recipe, RecipeSet};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn sample(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "samples", name]
        .iter()
        .collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn sample_model(name: &str) -> ComponentModel {
    parse_model(&sample(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Fixed shapes for every component the generators may create. Port
/// classes are `T1` and `T2`; `P` is the only possible parent.
struct Shape {
    id: &'static str,
    class: &'static str,
    inputs: &'static [(&'static str, &'static str)],
    outputs: &'static [(&'static str, &'static str)],
    int_params: &'static [&'static str],
    bool_params: &'static [&'static str],
}

const POOL: &[Shape] = &[
    Shape {
        id: "A",
        class: "Alpha",
        inputs: &[("a_in", "T2")],
        outputs: &[("a_out", "T1")],
        int_params: &["pa"],
        bool_params: &[],
    },
    Shape {
        id: "B",
        class: "Beta",
        inputs: &[("b_in", "T1"), ("b_in2", "T1")],
        outputs: &[("b_out", "T2")],
        int_params: &["pb", "qb"],
        bool_params: &[],
    },
    Shape {
        id: "C",
        class: "Alpha",
        inputs: &[("c_in", "T2")],
        outputs: &[("c_out", "T1")],
        int_params: &["pc"],
        bool_params: &["flag"],
    },
    Shape {
        id: "D",
        class: "Delta",
        inputs: &[("d_in", "T1")],
        outputs: &[("d_out", "T2")],
        int_params: &[],
        bool_params: &[],
    },
    Shape {
        id: "P",
        class: "Parent",
        inputs: &[("p_in", "T1")],
        outputs: &[],
        int_params: &[],
        bool_params: &[],
    },
];

pub const POOL_IDS: &[&str] = &["A", "B", "C", "D", "P"];

fn shape(id: &str) -> &'static Shape {
    POOL.iter().find(|s| s.id == id).expect("pool id")
}

pub fn pool_component(rng: &mut impl Rng, id: &str) -> Component {
    let s = shape(id);
    let mut c = Component::new(s.id, s.class);
    for (p, cl) in s.inputs {
        c = c.with_input(p, cl);
    }
    for (p, cl) in s.outputs {
        c = c.with_output(p, cl);
    }
    for p in s.int_params {
        c = c.with_param(p, Value::Int(rng.gen_range(0..4)));
    }
    for p in s.bool_params {
        c = c.with_param(p, Value::Bool(rng.gen()));
    }
    c
}

/// Every (output, input) pair of the pool with matching classes.
pub fn all_bindings() -> Vec<Binding> {
    let mut out = Vec::new();
    for a in POOL {
        for (op, oc) in a.outputs {
            for b in POOL {
                for (ip, ic) in b.inputs {
                    if oc == ic && a.id != b.id {
                        out.push(Binding::new(a.id, op, b.id, ip));
                    }
                }
            }
        }
    }
    out
}

pub fn random_model(rng: &mut impl Rng) -> ComponentModel {
    loop {
        let mut m = ComponentModel::new(format!("M{}", rng.gen_range(0..3)));
        for id in POOL_IDS {
            if rng.gen_bool(0.65) {
                let mut c = pool_component(rng, id);
                if rng.gen_bool(0.25) {
                    c.lifecycle = Lifecycle::Stopped;
                }
                m.insert(c);
            }
        }
        if m.components.contains_key("P") {
            let children: Vec<String> =
                m.components.keys().filter(|k| *k != "P").cloned().collect();
            for child in children {
                if rng.gen_bool(0.4) {
                    m.components.get_mut("P").unwrap().contains.insert(child);
                }
            }
            let p = m.components["P"].clone();
            for child in &p.contains {
                for (port, class) in &m.components[child].inputs {
                    if class == "T1" && rng.gen_bool(0.3) {
                        m.delegations
                            .insert(Delegation::new("P", "p_in", child, port));
                    }
                }
            }
        }
        let mut bindings = all_bindings();
        bindings.shuffle(rng);
        let mut bound_inputs = BTreeSet::new();
        for b in bindings {
            if m.components.contains_key(&b.out_component)
                && m.components.contains_key(&b.in_component)
                && rng.gen_bool(0.4)
                && bound_inputs.insert((b.in_component.clone(), b.in_port.clone()))
            {
                m.bindings.insert(b);
            }
        }
        if validate_model(&m).is_empty() {
            return m;
        }
    }
}

fn int_params() -> Vec<(&'static str, &'static str)> {
    POOL.iter()
        .flat_map(|s| s.int_params.iter().map(move |p| (s.id, *p)))
        .collect()
}

pub fn random_int_expr(rng: &mut impl Rng, depth: usize) -> IntExpr {
    let leaf = depth == 0 || rng.gen_bool(0.5);
    if leaf {
        if rng.gen_bool(0.5) {
            IntExpr::Lit(rng.gen_range(-3..6))
        } else {
            let (c, p) = *int_params().choose(rng).unwrap();
            IntExpr::param(c, p)
        }
    } else {
        let a = Box::new(random_int_expr(rng, depth - 1));
        let b = Box::new(random_int_expr(rng, depth - 1));
        match rng.gen_range(0..3) {
            0 => IntExpr::Add(a, b),
            1 => IntExpr::Sub(a, b),
            _ => IntExpr::Mul(a, b),
        }
    }
}

pub fn random_primitive_of(rng: &mut impl Rng, kind: PrimitiveKind) -> Primitive {
    let pick = |rng: &mut dyn rand::RngCore| *POOL_IDS.choose(rng).unwrap();
    match kind {
        PrimitiveKind::AddComponent => {
            let target = pick(rng);
            let parent = (target != "P" && rng.gen_bool(0.3)).then(|| "P".to_string());
            Primitive::AddComponent {
                component: pool_component(rng, target),
                parent,
            }
        }
        PrimitiveKind::RemoveComponent => Primitive::RemoveComponent(pick(rng).to_string()),
        PrimitiveKind::Bind => Primitive::Bind(all_bindings().choose(rng).unwrap().clone()),
        PrimitiveKind::Unbind => Primitive::Unbind(all_bindings().choose(rng).unwrap().clone()),
        PrimitiveKind::SetParam => {
            let (c, p) = *int_params().choose(rng).unwrap();
            let expr = if rng.gen_bool(0.5) {
                IntExpr::Lit(rng.gen_range(0..4))
            } else {
                random_int_expr(rng, 2)
            };
            Primitive::SetParam {
                component: c.into(),
                param: p.into(),
                expr,
            }
        }
        PrimitiveKind::Stop => Primitive::Stop(pick(rng).to_string()),
        PrimitiveKind::Start => Primitive::Start(pick(rng).to_string()),
    }
}

pub const TOPOLOGICAL_KINDS: &[PrimitiveKind] = &[
    PrimitiveKind::AddComponent,
    PrimitiveKind::RemoveComponent,
    PrimitiveKind::Bind,
    PrimitiveKind::Unbind,
];

const ALL_KINDS: &[PrimitiveKind] = &[
    PrimitiveKind::AddComponent,
    PrimitiveKind::RemoveComponent,
    PrimitiveKind::Bind,
    PrimitiveKind::Unbind,
    PrimitiveKind::SetParam,
    PrimitiveKind::Stop,
    PrimitiveKind::Start,
];

pub fn random_primitive(rng: &mut impl Rng) -> Primitive {
    let kind = *ALL_KINDS.choose(rng).unwrap();
    random_primitive_of(rng, kind)
}

/// Between one and five recipes named `R0`, `R1`, ...
pub fn random_recipes(rng: &mut impl Rng) -> RecipeSet {
    let mut set = RecipeSet::new();
    for i in 0..rng.gen_range(1..=5) {
        let steps = (0..rng.gen_range(1..=3))
            .map(|_| random_primitive(rng))
            .collect();
        set.insert(Recipe {
            name: format!("R{i}"),
            steps,
        })
        .expect("fresh name");
    }
    set
}

pub fn operation_names(recipes: &RecipeSet) -> Vec<String> {
    let mut names: Vec<String> = recipes.recipes.keys().cloned().collect();
    names.push("run".into());
    names
}

pub fn random_path(rng: &mut impl Rng, recipes: &RecipeSet) -> PathExpr {
    let names = operation_names(recipes);
    let draw = |n: usize, rng: &mut dyn rand::RngCore| -> Vec<String> {
        (0..n).map(|_| names.choose(rng).unwrap().clone()).collect()
    };
    let prefix_len = rng.gen_range(0..=3);
    let prefix = draw(prefix_len, rng);
    let cycle = if rng.gen_bool(0.8) {
        let n = rng.gen_range(1..=4);
        draw(n, rng)
    } else {
        Vec::new()
    };
    PathExpr::new(prefix, cycle)
}

fn relop(rng: &mut impl Rng) -> RelOp {
    *[
        RelOp::Lt,
        RelOp::Le,
        RelOp::Eq,
        RelOp::Ne,
        RelOp::Ge,
        RelOp::Gt,
    ]
    .choose(rng)
    .unwrap()
}

/// Identifiers a property may mention: the vocabulary of the model and the
/// recipes.
pub struct Names {
    pub components: Vec<String>,
    pub ports: Vec<(String, String, bool, String)>,
    pub params: Vec<(String, String, Value)>,
    pub classes: Vec<String>,
}

impl Names {
    pub fn new(m: &ComponentModel, recipes: &RecipeSet) -> Self {
        let mut comps: Vec<Component> = m.components.values().cloned().collect();
        for r in recipes.recipes.values() {
            for s in &r.steps {
                if let Primitive::AddComponent { component, .. } = s {
                    comps.push(component.clone());
                }
            }
        }
        let mut components = BTreeSet::new();
        let mut ports = BTreeSet::new();
        let mut params = Vec::new();
        let mut classes = BTreeSet::new();
        for c in &comps {
            components.insert(c.id.clone());
            classes.insert(c.class.clone());
            for (p, cl) in &c.inputs {
                ports.insert((c.id.clone(), p.clone(), true, cl.clone()));
                classes.insert(cl.clone());
            }
            for (p, cl) in &c.outputs {
                ports.insert((c.id.clone(), p.clone(), false, cl.clone()));
            }
            for (p, v) in &c.params {
                params.push((c.id.clone(), p.clone(), v.value.clone()));
            }
        }
        let mut voc = Vocabulary::from_model(m);
        recipes.extend_vocabulary(&mut voc);
        debug_assert_eq!(voc.components.len(), components.len());
        Names {
            components: components.into_iter().collect(),
            ports: ports.into_iter().collect(),
            params,
            classes: classes.into_iter().collect(),
        }
    }
}

fn ground_atom(rng: &mut impl Rng, names: &Names, vars: &[(String, Domain)]) -> Atom {
    let comp_vars: Vec<&String> = vars
        .iter()
        .filter(|(_, d)| *d == Domain::Components)
        .map(|(v, _)| v)
        .collect();
    let component = |rng: &mut dyn rand::RngCore| -> Option<ComponentRef> {
        if !comp_vars.is_empty() && rng.gen_bool(0.5) {
            return Some(ComponentRef::Var((*comp_vars.choose(rng).unwrap()).clone()));
        }
        names.components.choose(rng).map(|c| ComponentRef::named(c))
    };
    for _ in 0..8 {
        let atom = match rng.gen_range(0..9) {
            0 => Some(Atom::True),
            1 => Some(Atom::False),
            2 => component(rng).map(Atom::ComponentPresent),
            3 => component(rng).map(Atom::Started),
            4 | 5 => {
                let outs: Vec<_> = names.ports.iter().filter(|p| !p.2).collect();
                let ins: Vec<_> = names.ports.iter().filter(|p| p.2).collect();
                match (outs.choose(rng), ins.choose(rng)) {
                    (Some(o), Some(i)) => Some(Atom::Bound {
                        out_component: ComponentRef::named(&o.0),
                        out_port: o.1.clone(),
                        in_component: ComponentRef::named(&i.0),
                        in_port: i.1.clone(),
                    }),
                    _ => None,
                }
            }
            6 | 7 => names.params.choose(rng).map(|(c, p, v)| {
                let literal = match v {
                    Value::Int(_) => Value::Int(rng.gen_range(-1..6)),
                    Value::Bool(_) => Value::Bool(rng.gen()),
                    Value::Str(_) => Value::Str("x".into()),
                };
                let op = if matches!(v, Value::Int(_)) {
                    relop(rng)
                } else {
                    RelOp::Eq
                };
                Atom::ParamCmp {
                    component: ComponentRef::named(c),
                    param: p.clone(),
                    op,
                    literal,
                }
            }),
            _ => match (component(rng), component(rng)) {
                (Some(child), Some(parent)) => Some(Atom::Subcomponent { child, parent }),
                _ => None,
            },
        };
        if let Some(a) = atom {
            return a;
        }
    }
    Atom::True
}

fn random_cp_in(
    rng: &mut impl Rng,
    names: &Names,
    depth: usize,
    vars: &mut Vec<(String, Domain)>,
    params: bool,
) -> ConfigProperty {
    if depth == 0 || rng.gen_bool(0.3) {
        let bvars: Vec<String> = vars
            .iter()
            .filter(|(_, d)| *d == Domain::Bindings)
            .map(|(v, _)| v.clone())
            .collect();
        if !bvars.is_empty() && rng.gen_bool(0.5) {
            let var = bvars.choose(rng).unwrap().clone();
            return ConfigProperty::Atom(if rng.gen_bool(0.5) {
                Atom::ClassOf {
                    var,
                    class: if rng.gen_bool(0.5) {
                        "T1".into()
                    } else {
                        "T2".into()
                    },
                }
            } else {
                Atom::VarPresent(var)
            });
        }
        let cvars: Vec<String> = vars
            .iter()
            .filter(|(_, d)| *d == Domain::Components)
            .map(|(v, _)| v.clone())
            .collect();
        if !cvars.is_empty() && rng.gen_bool(0.3) {
            let var = cvars.choose(rng).unwrap().clone();
            let class = names
                .classes
                .choose(rng)
                .cloned()
                .unwrap_or_else(|| "Alpha".into());
            return ConfigProperty::Atom(Atom::ClassOf { var, class });
        }
        loop {
            let a = ground_atom(rng, names, vars);
            if params || !matches!(a, Atom::ParamCmp { .. }) {
                return ConfigProperty::Atom(a);
            }
        }
    }
    match rng.gen_range(0..6) {
        0 => ConfigProperty::not(random_cp_in(rng, names, depth - 1, vars, params)),
        1 => ConfigProperty::and(
            random_cp_in(rng, names, depth - 1, vars, params),
            random_cp_in(rng, names, depth - 1, vars, params),
        ),
        2 => ConfigProperty::or(
            random_cp_in(rng, names, depth - 1, vars, params),
            random_cp_in(rng, names, depth - 1, vars, params),
        ),
        3 => ConfigProperty::implies(
            random_cp_in(rng, names, depth - 1, vars, params),
            random_cp_in(rng, names, depth - 1, vars, params),
        ),
        _ => {
            let var = format!("v{}", vars.len());
            let domain = if rng.gen_bool(0.6) {
                Domain::Components
            } else {
                Domain::Bindings
            };
            vars.push((var.clone(), domain));
            let body = Box::new(random_cp_in(rng, names, depth - 1, vars, params));
            vars.pop();
            if rng.gen_bool(0.5) {
                ConfigProperty::Forall { var, domain, body }
            } else {
                ConfigProperty::Exists { var, domain, body }
            }
        }
    }
}

pub fn random_cp(rng: &mut impl Rng, names: &Names, params: bool) -> ConfigProperty {
    random_cp_in(rng, names, 3, &mut Vec::new(), params)
}

fn random_event(rng: &mut impl Rng, ops: &[String]) -> EventSpec {
    let modality = *[
        Modality::Normal,
        Modality::Exceptional,
        Modality::Terminates,
    ]
    .choose(rng)
    .unwrap();
    EventSpec::new(ops.choose(rng).unwrap(), modality)
}

fn random_trace(rng: &mut impl Rng, names: &Names, params: bool) -> TraceProperty {
    let cp = random_cp(rng, names, params);
    if rng.gen_bool(0.5) {
        TraceProperty::Always(cp)
    } else {
        TraceProperty::Eventually(cp)
    }
}

/// A formula whose events name operations in `ops` and whose properties use
/// the identifiers in `names`. Parameter comparisons appear only when
/// `params` is set.
pub fn random_formula(
    rng: &mut impl Rng,
    names: &Names,
    ops: &[String],
    params: bool,
) -> FtplFormula {
    let afters = rng.gen_range(0..=2);
    let mut f = if rng.gen_bool(0.35) {
        FtplFormula::Before(random_event(rng, ops), random_trace(rng, names, params))
    } else {
        FtplFormula::Trace(random_trace(rng, names, params))
    };
    for _ in 0..afters {
        f = FtplFormula::after(random_event(rng, ops), f);
    }
    f
}
