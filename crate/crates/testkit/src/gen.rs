//! Random contract generation with ground-truth access sets.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarType {
    Scalar,
    Mapping,
    Array,
}

impl VarType {
    fn declaration(self) -> &'static str {
        match self {
            VarType::Scalar => "uint256",
            VarType::Mapping => "mapping(uint256 => uint256)",
            VarType::Array => "uint256[]",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelVar {
    pub name: String,
    pub ty: VarType,
    pub visibility: &'static str,
}

/// Mutability levels in increasing order of permission.
pub const MUTABILITY: [&str; 4] = ["pure", "view", "nonpayable", "payable"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFunction {
    pub name: String,
    pub visibility: &'static str,
    /// Index into [`MUTABILITY`].
    pub mutability: usize,
    /// A parameter that shadows the state variable of the same name.
    pub shadow: Option<String>,
    pub body: Vec<String>,
    /// Ground truth: state variables read and written directly.
    pub reads: BTreeSet<String>,
    pub writes: BTreeSet<String>,
    /// Indices of called functions.
    pub calls: BTreeSet<usize>,
}

impl ModelFunction {
    pub fn arity(&self) -> usize {
        1 + usize::from(self.shadow.is_some())
    }

    pub fn is_transactional(&self) -> bool {
        matches!(self.visibility, "public" | "external") && self.mutability > 0
    }

    pub fn is_read_only(&self) -> bool {
        MUTABILITY[self.mutability] == "view"
    }

    fn call_syntax(&self) -> String {
        let args = if self.shadow.is_some() { "a, 2" } else { "a" };
        if self.visibility == "external" {
            format!("this.{}({args})", self.name)
        } else {
            format!("{}({args})", self.name)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelContract {
    pub name: String,
    pub vars: Vec<ModelVar>,
    pub functions: Vec<ModelFunction>,
    /// Constructor body lines; constructors never take part in conflicts.
    pub constructor: Option<Vec<String>>,
}

pub const CONSTANT: &str = "LIMIT";
pub const EVENT: &str = "Touched";

impl ModelContract {
    /// Analyzer key of function `i`: `Contract.name/arity`.
    pub fn key(&self, i: usize) -> String {
        let f = &self.functions[i];
        format!("{}.{}/{}", self.name, f.name, f.arity())
    }

    pub fn qualified(&self, var: &str) -> String {
        format!("{}.{var}", self.name)
    }

    pub fn render(&self) -> String {
        let order: Vec<usize> = (0..self.functions.len()).collect();
        self.render_with_order(&order)
    }

    /// Renders the contract with functions declared in `order`.
    pub fn render_with_order(&self, order: &[usize]) -> String {
        let mut s = String::from("pragma solidity ^0.8.0;\n\n");
        s.push_str(&format!("contract {} {{\n", self.name));
        s.push_str(&format!("    uint256 constant {CONSTANT} = 7;\n"));
        for v in &self.vars {
            s.push_str(&format!(
                "    {} {} {};\n",
                v.ty.declaration(),
                v.visibility,
                v.name
            ));
        }
        s.push_str(&format!("    event {EVENT}(uint256 value);\n"));
        if let Some(body) = &self.constructor {
            s.push_str("\n    constructor() {\n");
            for line in body {
                s.push_str(&format!("        {line}\n"));
            }
            s.push_str("    }\n");
        }
        for &i in order {
            let f = &self.functions[i];
            let mut params = String::from("uint256 a");
            if let Some(p) = &f.shadow {
                params.push_str(&format!(", uint256 {p}"));
            }
            let mutability = match MUTABILITY[f.mutability] {
                "nonpayable" => String::new(),
                m => format!(" {m}"),
            };
            s.push_str(&format!(
                "\n    function {}({params}) {}{mutability} {{\n",
                f.name, f.visibility
            ));
            for line in &f.body {
                s.push_str(&format!("        {line}\n"));
            }
            s.push_str("    }\n");
        }
        s.push_str("}\n");
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub functions: (usize, usize),
    pub vars: (usize, usize),
    pub max_statements: usize,
    /// Maximum length of the acyclic part of any call chain.
    pub max_call_depth: usize,
    /// Probability of adding a back edge (possibly a self call) per function.
    pub back_edge_probability: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            functions: (1, 8),
            vars: (1, 6),
            max_statements: 4,
            max_call_depth: 2,
            back_edge_probability: 0.25,
        }
    }
}

impl GenConfig {
    /// Fixed-size contracts for performance runs.
    pub fn sized(functions: usize, vars: usize) -> Self {
        GenConfig {
            functions: (functions, functions),
            vars: (vars, vars),
            max_statements: 6,
            ..GenConfig::default()
        }
    }
}

/// A generated contract and its rendered source.
#[derive(Debug, Clone)]
pub struct Generated {
    pub model: ModelContract,
    pub source: String,
}

impl Generated {
    pub fn new(seed: u64, config: &GenConfig, name: &str) -> Self {
        let model = generate(seed, config, name);
        let source = model.render();
        Generated { model, source }
    }
}

#[derive(Default)]
struct Access {
    reads: BTreeSet<String>,
    writes: BTreeSet<String>,
}

struct FnCtx<'a> {
    vars: &'a [ModelVar],
    shadow: Option<&'a str>,
}

impl FnCtx<'_> {
    fn is_shadowed(&self, name: &str) -> bool {
        self.shadow == Some(name)
    }
}

fn expr(rng: &mut ChaCha8Rng, ctx: &FnCtx, acc: &mut Access) -> String {
    let atoms = rng.gen_range(1..=2);
    let mut parts = Vec::new();
    for _ in 0..atoms {
        let part = match rng.gen_range(0..4) {
            0 => rng.gen_range(0..100u32).to_string(),
            1 => "a".to_string(),
            2 => CONSTANT.to_string(),
            _ => {
                let v = ctx.vars.choose(rng).unwrap();
                if !ctx.is_shadowed(&v.name) {
                    acc.reads.insert(v.name.clone());
                }
                match v.ty {
                    VarType::Scalar => v.name.clone(),
                    VarType::Mapping => format!("{}[a]", v.name),
                    VarType::Array => format!("{}.length", v.name),
                }
            }
        };
        parts.push(part);
    }
    parts.join(" + ")
}

fn simple_stmt(rng: &mut ChaCha8Rng, ctx: &FnCtx, acc: &mut Access) -> String {
    let v = ctx.vars.choose(rng).unwrap();
    let t = v.name.as_str();
    if ctx.is_shadowed(t) {
        let e = expr(rng, ctx, acc);
        return format!("{t} = {t} + {e};");
    }
    let (read, write, line) = match (v.ty, rng.gen_range(0..6)) {
        (VarType::Scalar, 0) => (false, true, format!("{t} = {};", expr(rng, ctx, acc))),
        (VarType::Scalar, 1) => (true, true, format!("{t} += {};", expr(rng, ctx, acc))),
        (VarType::Scalar, 2) => (true, true, format!("{t}++;")),
        (VarType::Scalar, 3) => (true, true, format!("--{t};")),
        (VarType::Scalar, 4) => (false, true, format!("delete {t};")),
        (VarType::Scalar, _) => (true, false, format!("require({t} >= {});", expr(rng, ctx, acc))),
        (VarType::Mapping, 0 | 1) => (false, true, format!("{t}[a] = {};", expr(rng, ctx, acc))),
        (VarType::Mapping, 2) => (true, true, format!("{t}[{}] += 1;", expr(rng, ctx, acc))),
        (VarType::Mapping, 3) => (false, true, format!("delete {t}[a];")),
        (VarType::Mapping, _) => (true, false, format!("require({t}[a] != {});", expr(rng, ctx, acc))),
        (VarType::Array, 0 | 1) => (false, true, format!("{t}.push({});", expr(rng, ctx, acc))),
        (VarType::Array, 2) => (false, true, format!("{t}[0] = {};", expr(rng, ctx, acc))),
        (VarType::Array, 3) => (false, true, format!("{t}.pop();")),
        (VarType::Array, _) => (true, false, format!("require({t}.length > {});", expr(rng, ctx, acc))),
    };
    if read {
        acc.reads.insert(t.to_string());
    }
    if write {
        acc.writes.insert(t.to_string());
    }
    line
}

fn stmt(rng: &mut ChaCha8Rng, ctx: &FnCtx, acc: &mut Access) -> String {
    match rng.gen_range(0..10) {
        0 => {
            let cond = expr(rng, ctx, acc);
            let inner = simple_stmt(rng, ctx, acc);
            format!("if ({cond} > 3) {{ {inner} }}")
        }
        1 => {
            let bound = expr(rng, ctx, acc);
            let inner = simple_stmt(rng, ctx, acc);
            format!("for (uint256 i = 0; i < {bound}; i++) {{ {inner} }}")
        }
        2 => {
            // A local that hides a scalar state variable for the rest of the block.
            let scalars: Vec<&ModelVar> = ctx.vars.iter().filter(|v| v.ty == VarType::Scalar).collect();
            match scalars.choose(rng) {
                Some(v) => {
                    let init = expr(rng, ctx, acc);
                    let n = &v.name;
                    format!("{{ uint256 {n} = {init}; {n} += 1; {n}++; }}")
                }
                None => simple_stmt(rng, ctx, acc),
            }
        }
        3 => format!("emit {EVENT}({});", expr(rng, ctx, acc)),
        _ => simple_stmt(rng, ctx, acc),
    }
}

/// Generates a contract named `name` from `seed`.
pub fn generate(seed: u64, config: &GenConfig, name: &str) -> ModelContract {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = rng.gen_range(config.vars.0..=config.vars.1);
    let vars: Vec<ModelVar> = (0..nvars)
        .map(|i| ModelVar {
            name: format!("v{i}"),
            ty: match rng.gen_range(0..4) {
                0 => VarType::Mapping,
                1 => VarType::Array,
                _ => VarType::Scalar,
            },
            visibility: ["public", "internal", "private"][rng.gen_range(0..3)],
        })
        .collect();

    let nfns = rng.gen_range(config.functions.0..=config.functions.1);
    let layers: Vec<usize> = (0..nfns)
        .map(|_| rng.gen_range(0..=config.max_call_depth))
        .collect();
    let mut calls: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); nfns];
    for i in 0..nfns {
        let deeper: Vec<usize> = (0..nfns).filter(|&j| layers[j] == layers[i] + 1).collect();
        for _ in 0..rng.gen_range(0..=2) {
            if let Some(&j) = deeper.choose(&mut rng) {
                calls[i].insert(j);
            }
        }
        if rng.gen_bool(config.back_edge_probability) {
            let back: Vec<usize> = (0..nfns).filter(|&j| layers[j] <= layers[i]).collect();
            if let Some(&j) = back.choose(&mut rng) {
                calls[i].insert(j);
            }
        }
    }

    let mut functions = Vec::with_capacity(nfns);
    for (i, callees) in calls.into_iter().enumerate() {
        let shadow = if rng.gen_bool(0.2) {
            vars.iter()
                .filter(|v| v.ty == VarType::Scalar)
                .collect::<Vec<_>>()
                .choose(&mut rng)
                .map(|v| v.name.clone())
        } else {
            None
        };
        let ctx = FnCtx {
            vars: &vars,
            shadow: shadow.as_deref(),
        };
        let mut acc = Access::default();
        let mut body: Vec<String> = (0..rng.gen_range(0..=config.max_statements))
            .map(|_| stmt(&mut rng, &ctx, &mut acc))
            .collect();
        for &c in &callees {
            let pos = rng.gen_range(0..=body.len());
            body.insert(pos, format!("<call {c}>"));
        }
        functions.push(ModelFunction {
            name: format!("f{i}"),
            visibility: ["public", "external", "internal", "private"][rng.gen_range(0..4)],
            mutability: 0,
            shadow,
            body,
            reads: acc.reads,
            writes: acc.writes,
            calls: callees,
        });
    }

    // Callers must be at least as permissive as everything they reach.
    let floors: Vec<usize> = functions
        .iter()
        .map(|f| {
            let needed = if !f.writes.is_empty() {
                2
            } else if !f.reads.is_empty() {
                1
            } else {
                0
            };
            let bump = usize::from(rng.gen_bool(0.3));
            (needed + bump).min(3)
        })
        .collect();
    let reach = crate::oracle::reachability(
        &functions.iter().map(|f| f.calls.clone()).collect::<Vec<_>>(),
    );
    for i in 0..nfns {
        functions[i].mutability = (0..nfns)
            .filter(|&j| reach[i][j])
            .map(|j| floors[j])
            .max()
            .unwrap_or(0);
    }
    let call_syntax: Vec<String> = functions.iter().map(ModelFunction::call_syntax).collect();
    for f in &mut functions {
        for line in &mut f.body {
            if let Some(idx) = line.strip_prefix("<call ").and_then(|s| s.strip_suffix('>')) {
                *line = format!("{};", call_syntax[idx.parse::<usize>().unwrap()]);
            }
        }
    }

    let constructor = rng.gen_bool(0.5).then(|| {
        vars.iter()
            .filter(|v| v.ty == VarType::Scalar)
            .map(|v| format!("{} = {CONSTANT};", v.name))
            .collect()
    });

    ModelContract {
        name: name.to_string(),
        vars,
        functions,
        constructor,
    }
}

/// Per-node accesses and call edges of a synthetic call graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallGraph {
    pub reads: Vec<BTreeSet<usize>>,
    pub writes: Vec<BTreeSet<usize>>,
    pub calls: Vec<BTreeSet<usize>>,
}

/// A random graph on `nodes` nodes over `vars` variables that contains
/// at least one cycle.
pub fn random_call_graph(seed: u64, nodes: usize, vars: usize) -> CallGraph {
    assert!(nodes >= 1 && vars >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = rng.gen_range(0.05..0.5);
    let mut calls = vec![BTreeSet::new(); nodes];
    for (i, out) in calls.iter_mut().enumerate() {
        for j in 0..nodes {
            if rng.gen_bool(density) {
                out.insert(j);
            }
        }
        if out.is_empty() && rng.gen_bool(0.5) {
            out.insert((i + 1) % nodes);
        }
    }
    // Close a cycle through a random run of nodes.
    let len = rng.gen_range(1..=nodes);
    let start = rng.gen_range(0..nodes);
    for k in 0..len - 1 {
        calls[(start + k) % nodes].insert((start + k + 1) % nodes);
    }
    calls[(start + len - 1) % nodes].insert(start);
    let pick = |rng: &mut ChaCha8Rng| -> BTreeSet<usize> {
        (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..vars)).collect()
    };
    let reads = (0..nodes).map(|_| pick(&mut rng)).collect();
    let writes = (0..nodes).map(|_| pick(&mut rng)).collect();
    CallGraph {
        reads,
        writes,
        calls,
    }
}
