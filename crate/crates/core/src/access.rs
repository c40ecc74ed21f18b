//! Per-function state-variable access extraction.
//!
//! For every function this computes the storage variables it reads, the
//! ones it writes, and the functions it calls. Accesses made inside an
//! invoked modifier's body are attributed to the function, since the
//! modifier runs as part of the same transaction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::frontend::{
    Block, CallArgs, Contract, Expr, Function, FunctionKind, Mutability, SourceUnit, StateVariable,
    Stmt, StmtKind, TypeName, UnaryOp, Visibility,
};

/// Globally unique function identifier: `Contract.name/arity`, with a
/// `#n` suffix when two overloads share name and arity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FunctionKey(String);

impl FunctionKey {
    pub fn new(contract: &str, name: &str, arity: usize) -> Self {
        FunctionKey(format!("{contract}.{name}/{arity}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn contract(&self) -> &str {
        self.0.split_once('.').map(|(c, _)| c).unwrap_or(&self.0)
    }

    /// The key without its contract prefix, e.g. `transfer/2`.
    pub fn local(&self) -> &str {
        self.0.split_once('.').map(|(_, f)| f).unwrap_or(&self.0)
    }
}

impl fmt::Display for FunctionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// State variable qualified by its declaring contract: `Contract.var`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarName(String);

impl VarName {
    pub fn new(contract: &str, var: &str) -> Self {
        VarName(format!("{contract}.{var}"))
    }

    /// Wraps an already-qualified or sentinel name.
    pub fn from_qualified(name: impl Into<String>) -> Self {
        VarName(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AccessMode {
    Read,
    Write,
}

impl AccessMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AccessMode::Read => "read",
            AccessMode::Write => "write",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AccessRecord {
    pub variable: VarName,
    pub mode: AccessMode,
    /// Source line of the access. Accesses inside a modifier body are
    /// reported at the line of the modifier invocation.
    pub site: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("contract `{0}` is defined more than once across the analyzed sources")]
    DuplicateContract(String),
}

/// Names that can appear in call position without being function calls.
const BUILTIN_FUNCTIONS: &[&str] = &[
    "addmod",
    "assert",
    "blobhash",
    "blockhash",
    "ecrecover",
    "gasleft",
    "keccak256",
    "mulmod",
    "require",
    "revert",
    "ripemd160",
    "selfdestruct",
    "sha256",
    "sha3",
    "suicide",
];

const BUILTIN_RECEIVERS: &[&str] = &["abi", "block", "bytes", "msg", "string", "tx"];

const MUTATING_MEMBERS: &[&str] = &["push", "pop"];

pub const DYNAMIC_CALLEE: &str = "<dynamic>";

/// Stable keys for `contract.functions`, in declaration order.
pub fn function_keys(contract: &Contract) -> Vec<FunctionKey> {
    let mut seen: HashMap<(String, usize), usize> = HashMap::new();
    contract
        .functions
        .iter()
        .map(|f| {
            let n = seen.entry((f.name.clone(), f.arity())).or_insert(0);
            *n += 1;
            let base = FunctionKey::new(&contract.name, &f.name, f.arity());
            if *n == 1 {
                base
            } else {
                FunctionKey(format!("{}#{}", base.0, n))
            }
        })
        .collect()
}

struct ContractEntry<'a> {
    contract: &'a Contract,
    keys: Vec<FunctionKey>,
}

/// Index over every contract of the analyzed sources, used to resolve
/// calls within and across contracts.
pub struct Program<'a> {
    contracts: BTreeMap<&'a str, ContractEntry<'a>>,
    /// File-level struct, enum and error names.
    file_types: HashSet<&'a str>,
}

impl<'a> Program<'a> {
    pub fn new(units: &'a [SourceUnit]) -> Result<Self, AnalysisError> {
        let mut contracts = BTreeMap::new();
        let mut file_types = HashSet::new();
        for unit in units {
            file_types.extend(unit.definitions.iter().map(|d| d.name()));
            for contract in &unit.contracts {
                let entry = ContractEntry {
                    contract,
                    keys: function_keys(contract),
                };
                if contracts.insert(contract.name.as_str(), entry).is_some() {
                    return Err(AnalysisError::DuplicateContract(contract.name.clone()));
                }
            }
        }
        Ok(Program {
            contracts,
            file_types,
        })
    }

    pub fn contract(&self, name: &str) -> Option<&'a Contract> {
        self.contracts.get(name).map(|e| e.contract)
    }

    /// Contracts in canonical (name) order.
    pub fn contracts(&self) -> impl Iterator<Item = &'a Contract> + '_ {
        self.contracts.values().map(|e| e.contract)
    }

    /// Every function with its key, in canonical contract order and then
    /// declaration order.
    pub fn functions(&self) -> impl Iterator<Item = (&FunctionKey, &'a Contract, &'a Function)> + '_ {
        self.contracts.values().flat_map(|e| {
            e.keys
                .iter()
                .zip(&e.contract.functions)
                .map(move |(k, f)| (k, e.contract, f))
        })
    }

    pub fn function(&self, key: &FunctionKey) -> Option<(&'a Contract, &'a Function)> {
        let entry = self.contracts.get(key.contract())?;
        let idx = entry.keys.iter().position(|k| k == key)?;
        Some((entry.contract, &entry.contract.functions[idx]))
    }

    pub fn key_of(&self, contract: &str, index: usize) -> Option<&FunctionKey> {
        self.contracts.get(contract)?.keys.get(index)
    }

    /// Keys of callable functions named `name` in `contract`; prefers an
    /// arity match and falls back to every overload.
    fn resolve(&self, contract: &str, name: &str, arity: usize) -> Vec<FunctionKey> {
        let Some(entry) = self.contracts.get(contract) else {
            return Vec::new();
        };
        let named: Vec<_> = entry
            .contract
            .functions
            .iter()
            .zip(&entry.keys)
            .filter(|(f, _)| f.kind == FunctionKind::Function && f.name == name)
            .collect();
        let exact: Vec<_> = named
            .iter()
            .filter(|(f, _)| f.arity() == arity)
            .map(|(_, k)| (*k).clone())
            .collect();
        if exact.is_empty() {
            named.into_iter().map(|(_, k)| k.clone()).collect()
        } else {
            exact
        }
    }
}

/// Everything extracted from one function.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FunctionAccess {
    pub records: Vec<AccessRecord>,
    pub calls: BTreeSet<FunctionKey>,
    pub unresolved_calls: BTreeSet<String>,
}

impl FunctionAccess {
    pub fn reads(&self) -> BTreeSet<VarName> {
        self.vars(AccessMode::Read)
    }

    pub fn writes(&self) -> BTreeSet<VarName> {
        self.vars(AccessMode::Write)
    }

    fn vars(&self, mode: AccessMode) -> BTreeSet<VarName> {
        self.records
            .iter()
            .filter(|r| r.mode == mode)
            .map(|r| r.variable.clone())
            .collect()
    }
}

/// Walks `function` (declared in `contract`) and collects its accesses.
pub fn analyze_function(program: &Program, contract: &Contract, function: &Function) -> FunctionAccess {
    let mut ex = Extractor {
        program,
        contract,
        scopes: Vec::new(),
        site_override: None,
        out: FunctionAccess::default(),
    };
    ex.function(function);
    let mut out = ex.out;
    match function.mutability {
        Mutability::Pure => out.records.clear(),
        Mutability::View => out.records.retain(|r| r.mode == AccessMode::Read),
        Mutability::Payable | Mutability::NonPayable => {}
    }
    out.records.sort();
    out.records.dedup();
    out
}

pub fn extract_reads(program: &Program, contract: &Contract, function: &Function) -> BTreeSet<VarName> {
    analyze_function(program, contract, function).reads()
}

pub fn extract_writes(program: &Program, contract: &Contract, function: &Function) -> BTreeSet<VarName> {
    analyze_function(program, contract, function).writes()
}

/// Resolved callee keys and raw names of callees that could not be resolved.
pub fn extract_calls(
    program: &Program,
    contract: &Contract,
    function: &Function,
) -> (BTreeSet<FunctionKey>, BTreeSet<String>) {
    let access = analyze_function(program, contract, function);
    (access.calls, access.unresolved_calls)
}

/// The R, W and C maps over every function of the analyzed sources.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AccessMaps {
    pub reads: BTreeMap<FunctionKey, BTreeSet<VarName>>,
    pub writes: BTreeMap<FunctionKey, BTreeSet<VarName>>,
    pub calls: BTreeMap<FunctionKey, BTreeSet<FunctionKey>>,
    pub unresolved_calls: BTreeMap<FunctionKey, BTreeSet<String>>,
    pub records: BTreeMap<FunctionKey, Vec<AccessRecord>>,
}

impl AccessMaps {
    pub fn from_program(program: &Program) -> Self {
        let mut maps = AccessMaps::default();
        for (key, contract, function) in program.functions() {
            maps.insert(key.clone(), analyze_function(program, contract, function));
        }
        maps
    }

    pub fn insert(&mut self, key: FunctionKey, access: FunctionAccess) {
        self.reads.insert(key.clone(), access.reads());
        self.writes.insert(key.clone(), access.writes());
        self.calls.insert(key.clone(), access.calls);
        self.unresolved_calls
            .insert(key.clone(), access.unresolved_calls);
        self.records.insert(key, access.records);
    }

    pub fn reads_of(&self, key: &FunctionKey) -> &BTreeSet<VarName> {
        self.reads.get(key).unwrap_or(empty_vars())
    }

    pub fn writes_of(&self, key: &FunctionKey) -> &BTreeSet<VarName> {
        self.writes.get(key).unwrap_or(empty_vars())
    }

    pub fn calls_of(&self, key: &FunctionKey) -> impl Iterator<Item = &FunctionKey> {
        self.calls.get(key).into_iter().flatten()
    }

    pub fn unresolved_of(&self, key: &FunctionKey) -> impl Iterator<Item = &String> {
        self.unresolved_calls.get(key).into_iter().flatten()
    }

    pub fn contains(&self, key: &FunctionKey) -> bool {
        self.reads.contains_key(key)
    }
}

fn empty_vars() -> &'static BTreeSet<VarName> {
    static EMPTY: BTreeSet<VarName> = BTreeSet::new();
    &EMPTY
}

pub fn build_access_maps(units: &[SourceUnit]) -> Result<AccessMaps, AnalysisError> {
    let program = Program::new(units)?;
    Ok(AccessMaps::from_program(&program))
}

/// Local name → contract name when the local has a contract type.
type Scope = HashMap<String, Option<String>>;

struct Extractor<'p, 'a> {
    program: &'p Program<'a>,
    contract: &'p Contract,
    scopes: Vec<Scope>,
    site_override: Option<u32>,
    out: FunctionAccess,
}

impl Extractor<'_, '_> {
    fn function(&mut self, f: &Function) {
        let mut params = Scope::new();
        for p in f.parameters.iter().chain(&f.returns) {
            if !p.name.is_empty() {
                params.insert(p.name.clone(), self.contract_type(&p.type_name));
            }
        }
        self.scopes.push(params);
        for invocation in &f.modifiers {
            for arg in invocation.arguments.iter().flatten() {
                self.read(arg);
            }
            match self.contract.modifier(&invocation.name) {
                Some(def) => {
                    let mut scope = Scope::new();
                    for p in &def.parameters {
                        if !p.name.is_empty() {
                            scope.insert(p.name.clone(), self.contract_type(&p.type_name));
                        }
                    }
                    let saved = std::mem::replace(&mut self.scopes, vec![scope]);
                    self.site_override = Some(invocation.line);
                    self.block(&def.body);
                    self.site_override = None;
                    self.scopes = saved;
                }
                None => {
                    self.out.unresolved_calls.insert(invocation.name.clone());
                }
            }
        }
        if let Some(body) = &f.body {
            self.block(body);
        }
        self.scopes.pop();
    }

    fn contract_type(&self, ty: &TypeName) -> Option<String> {
        ty.user_defined_name()
            .filter(|n| self.program.contract(n).is_some())
            .map(str::to_string)
    }

    fn is_local(&self, name: &str) -> bool {
        self.scopes.iter().any(|s| s.contains_key(name))
    }

    fn local_contract_type(&self, name: &str) -> Option<&str> {
        self.scopes
            .iter()
            .rev()
            .find_map(|s| s.get(name))
            .and_then(|t| t.as_deref())
    }

    /// The storage variable `name` refers to at this point, if any.
    fn state_var(&self, name: &str) -> Option<&StateVariable> {
        if self.is_local(name) {
            return None;
        }
        self.contract
            .state_variable(name)
            .filter(|v| v.is_storage())
    }

    fn declare(&mut self, name: &str, ty: &TypeName) {
        let contract_ty = self.contract_type(ty);
        if let Some(scope) = self.scopes.last_mut() {
            scope.insert(name.to_string(), contract_ty);
        }
    }

    fn record(&mut self, var: VarName, mode: AccessMode, line: u32) {
        let site = self.site_override.unwrap_or(line);
        self.out.records.push(AccessRecord {
            variable: var,
            mode,
            site,
        });
    }

    fn block(&mut self, block: &Block) {
        self.scopes.push(Scope::new());
        for stmt in &block.statements {
            self.stmt(stmt);
        }
        self.scopes.pop();
    }

    fn scoped_stmt(&mut self, stmt: &Stmt) {
        self.scopes.push(Scope::new());
        self.stmt(stmt);
        self.scopes.pop();
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Block(b) => self.block(b),
            StmtKind::VarDecl { decl, value } => {
                if let Some(v) = value {
                    self.read(v);
                }
                self.declare(&decl.name, &decl.type_name);
            }
            StmtKind::TupleDecl { decls, value } => {
                self.read(value);
                for decl in decls.iter().flatten() {
                    self.declare(&decl.name, &decl.type_name);
                }
            }
            StmtKind::Expr(e) | StmtKind::Return(Some(e)) => self.read(e),
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                self.read(cond);
                self.scoped_stmt(then);
                if let Some(o) = otherwise {
                    self.scoped_stmt(o);
                }
            }
            StmtKind::For {
                init,
                cond,
                step,
                body,
            } => {
                self.scopes.push(Scope::new());
                if let Some(i) = init {
                    self.stmt(i);
                }
                if let Some(c) = cond {
                    self.read(c);
                }
                self.scoped_stmt(body);
                if let Some(s) = step {
                    self.read(s);
                }
                self.scopes.pop();
            }
            StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => {
                self.read(cond);
                self.scoped_stmt(body);
            }
            StmtKind::Emit(call) | StmtKind::Revert(call) => {
                if let Expr::Call { options, args, .. } = call {
                    for (_, e) in options {
                        self.read(e);
                    }
                    for e in args.exprs() {
                        self.read(e);
                    }
                }
            }
            StmtKind::Return(None)
            | StmtKind::Break
            | StmtKind::Continue
            | StmtKind::Placeholder => {}
        }
    }

    /// Evaluates `expr` as a value.
    fn read(&mut self, expr: &Expr) {
        match expr {
            Expr::Ident(id) => {
                if let Some(var) = self.state_var(&id.name) {
                    let name = VarName::new(&var.declaring_contract, &var.name);
                    self.record(name, AccessMode::Read, id.line);
                }
            }
            Expr::Literal(_) | Expr::ElementaryType(_) | Expr::New(_) | Expr::TypeQuery(_) => {}
            Expr::Member { base, .. } => self.read(base),
            Expr::Index { base, index } => {
                self.read(base);
                if let Some(i) = index {
                    self.read(i);
                }
            }
            Expr::Slice { base, start, end } => {
                self.read(base);
                for e in start.iter().chain(end.iter()) {
                    self.read(e);
                }
            }
            Expr::Call {
                callee,
                options,
                args,
            } => self.call(callee, options, args),
            Expr::Unary { op, operand } => match op {
                UnaryOp::PreIncrement | UnaryOp::PreDecrement => self.write(operand, true),
                UnaryOp::Delete => self.write(operand, false),
                UnaryOp::Not | UnaryOp::Neg | UnaryOp::BitNot => self.read(operand),
            },
            Expr::Postfix { operand, .. } => self.write(operand, true),
            Expr::Binary { lhs, rhs, .. } => {
                self.read(lhs);
                self.read(rhs);
            }
            Expr::Assign { op, target, value } => {
                self.read(value);
                self.write(target, op.is_compound());
            }
            Expr::Conditional {
                cond,
                then,
                otherwise,
            } => {
                self.read(cond);
                self.read(then);
                self.read(otherwise);
            }
            Expr::Tuple(slots) => {
                for e in slots.iter().flatten() {
                    self.read(e);
                }
            }
            Expr::ArrayLiteral(items) => {
                for e in items {
                    self.read(e);
                }
            }
        }
    }

    /// Treats `target` as an assignment destination. Element and member
    /// writes land on the root variable; index expressions along the way
    /// are reads.
    fn write(&mut self, target: &Expr, also_read: bool) {
        if let Expr::Tuple(slots) = target {
            for slot in slots.iter().flatten() {
                self.write(slot, also_read);
            }
            return;
        }
        let mut cur = target;
        loop {
            match cur {
                Expr::Member { base, .. } => cur = base,
                Expr::Index { base, index } => {
                    if let Some(i) = index {
                        self.read(i);
                    }
                    cur = base;
                }
                Expr::Slice { base, start, end } => {
                    for e in start.iter().chain(end.iter()) {
                        self.read(e);
                    }
                    cur = base;
                }
                _ => break,
            }
        }
        match cur {
            Expr::Ident(id) => {
                if let Some(var) = self.state_var(&id.name) {
                    let name = VarName::new(&var.declaring_contract, &var.name);
                    if also_read {
                        self.record(name.clone(), AccessMode::Read, id.line);
                    }
                    self.record(name, AccessMode::Write, id.line);
                }
            }
            other => self.read(other),
        }
    }

    /// Contract a member call on `base` is dispatched to, when it can be
    /// determined statically.
    fn receiver_contract(&self, base: &Expr) -> Option<String> {
        match base {
            Expr::Ident(id) if id.name == "this" && !self.is_local("this") => {
                Some(self.contract.name.clone())
            }
            Expr::Ident(id) => {
                if self.is_local(&id.name) {
                    return self.local_contract_type(&id.name).map(str::to_string);
                }
                if let Some(var) = self.state_var(&id.name) {
                    return self.contract_type(&var.type_name);
                }
                self.program.contract(&id.name).map(|c| c.name.clone())
            }
            Expr::Call { callee, args, .. } if args.len() == 1 => match callee.as_ref() {
                Expr::Ident(id) if !self.is_local(&id.name) => {
                    self.program.contract(&id.name).map(|c| c.name.clone())
                }
                _ => None,
            },
            _ => None,
        }
    }

    fn is_builtin_receiver(&self, base: &Expr) -> bool {
        match base {
            Expr::Ident(id) => {
                BUILTIN_RECEIVERS.contains(&id.name.as_str()) && !self.is_local(&id.name)
            }
            Expr::TypeQuery(_) => true,
            _ => false,
        }
    }

    /// Whether `name` in call position denotes a struct constructor, enum,
    /// error, event, or contract conversion rather than a function.
    fn is_non_function_name(&self, name: &str) -> bool {
        self.contract.events.iter().any(|e| e.name == name)
            || self.contract.definitions.iter().any(|d| d.name() == name)
            || self.program.file_types.contains(name)
            || self.program.contract(name).is_some()
    }

    fn call(&mut self, callee: &Expr, options: &[(String, Expr)], args: &CallArgs) {
        for (_, e) in options {
            self.read(e);
        }
        for e in args.exprs() {
            self.read(e);
        }
        match callee {
            Expr::Ident(id) => {
                let name = id.name.as_str();
                if self.is_local(name) {
                    self.out.unresolved_calls.insert(DYNAMIC_CALLEE.to_string());
                    return;
                }
                let resolved = self.program.resolve(&self.contract.name, name, args.len());
                if !resolved.is_empty() {
                    self.out.calls.extend(resolved);
                } else if BUILTIN_FUNCTIONS.contains(&name) || self.is_non_function_name(name) {
                } else {
                    self.out.unresolved_calls.insert(name.to_string());
                }
            }
            Expr::Member { base, member } => {
                if let Some(target) = self.receiver_contract(base) {
                    self.read(base);
                    let resolved = self.program.resolve(&target, member, args.len());
                    if !resolved.is_empty() {
                        self.out.calls.extend(resolved);
                        return;
                    }
                    let getter = self
                        .program
                        .contract(&target)
                        .and_then(|c| c.state_variable(member))
                        .filter(|v| v.visibility == Visibility::Public && v.is_storage());
                    match getter {
                        Some(var) => {
                            let name = VarName::new(&var.declaring_contract, &var.name);
                            let line = match base.access_root() {
                                Expr::Ident(id) => id.line,
                                _ => 0,
                            };
                            self.record(name, AccessMode::Read, line);
                        }
                        None => {
                            self.out.unresolved_calls.insert(member.clone());
                        }
                    }
                    return;
                }
                if MUTATING_MEMBERS.contains(&member.as_str()) {
                    if let Expr::Ident(root) = base.access_root() {
                        if self.state_var(&root.name).is_some() {
                            self.write(base, false);
                            return;
                        }
                    }
                    self.read(base);
                    return;
                }
                self.read(base);
                if !self.is_builtin_receiver(base) {
                    self.out.unresolved_calls.insert(member.clone());
                }
            }
            Expr::ElementaryType(_) | Expr::New(_) | Expr::TypeQuery(_) => {}
            other => {
                self.read(other);
                self.out.unresolved_calls.insert(DYNAMIC_CALLEE.to_string());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse;

    const LISTING: &str = include_str!("../tests/fixtures/example.sol");

    fn maps(src: &str) -> AccessMaps {
        build_access_maps(&[parse(src, "t.sol").unwrap()]).unwrap()
    }

    fn key(s: &str) -> FunctionKey {
        FunctionKey(s.to_string())
    }

    fn vars(names: &[&str]) -> BTreeSet<VarName> {
        names.iter().map(|n| VarName::from_qualified(*n)).collect()
    }

    fn in_body(body: &str) -> AccessMaps {
        maps(&format!(
            "contract C {{ uint x; uint y; mapping(uint => uint) m; uint[] a; \
             struct S {{ uint f; }} S s; function f() public {{ {body} }} function helper() internal {{}} }}"
        ))
    }

    #[test]
    fn listing_example() {
        let m = maps(LISTING);
        let add = key("Example.addToStorage/1");
        let mem = key("Example.addToMemory/1");
        assert_eq!(
            m.writes_of(&add),
            &vars(&["Example.storageArray", "Example.storageSize"])
        );
        assert!(m.reads_of(&mem).is_empty());
        assert!(m.writes_of(&mem).is_empty());
        // storageSize++ reads as well as writes; push is a write only.
        assert_eq!(m.reads_of(&add), &vars(&["Example.storageSize"]));
        assert!(m.calls_of(&add).next().is_none());
        assert!(m.unresolved_of(&add).next().is_none());
    }

    #[test]
    fn assignment_reads_rhs_writes_lhs() {
        let m = in_body("x = y + 1;");
        let f = key("C.f/0");
        assert_eq!(m.reads_of(&f), &vars(&["C.y"]));
        assert_eq!(m.writes_of(&f), &vars(&["C.x"]));
    }

    #[test]
    fn compound_assignment_is_read_and_write() {
        for body in ["x += 1;", "x++;", "--x;", "x <<= 2;"] {
            let m = in_body(body);
            let f = key("C.f/0");
            assert_eq!(m.reads_of(&f), &vars(&["C.x"]), "{body}");
            assert_eq!(m.writes_of(&f), &vars(&["C.x"]), "{body}");
        }
    }

    #[test]
    fn return_only_reads() {
        let m = in_body("return;");
        assert!(m.writes_of(&key("C.f/0")).is_empty());
        let m = maps("contract C { uint x; function f() public view returns (uint) { return x; } }");
        assert!(m.writes_of(&key("C.f/0")).is_empty());
        assert_eq!(m.reads_of(&key("C.f/0")), &vars(&["C.x"]));
    }

    #[test]
    fn element_and_member_writes_hit_the_base() {
        let m = in_body("m[y] = 1; s.f = 2; a[0] = x; delete m[3]; a.pop();");
        let f = key("C.f/0");
        assert_eq!(m.writes_of(&f), &vars(&["C.a", "C.m", "C.s"]));
        assert_eq!(m.reads_of(&f), &vars(&["C.x", "C.y"]));
    }

    #[test]
    fn chained_assignment_writes_both() {
        let m = in_body("x = y = 1;");
        let f = key("C.f/0");
        assert_eq!(m.writes_of(&f), &vars(&["C.x", "C.y"]));
        assert!(m.reads_of(&f).is_empty());
    }

    #[test]
    fn shadowing_starts_at_declaration() {
        let m = in_body("x = 1; uint x = y; x = 2; { uint y; y = 3; } y = 4;");
        let f = key("C.f/0");
        assert_eq!(m.writes_of(&f), &vars(&["C.x", "C.y"]));
        assert_eq!(m.reads_of(&f), &vars(&["C.y"]));
        // y=4 is outside the inner block, so it is the state variable again.
        let sites: Vec<_> = m.records[&f]
            .iter()
            .filter(|r| r.variable.as_str() == "C.y" && r.mode == AccessMode::Write)
            .collect();
        assert_eq!(sites.len(), 1);
    }

    #[test]
    fn parameters_shadow_state() {
        let m = maps("contract C { uint x; function f(uint x) public { x = 1; } }");
        assert!(m.writes_of(&key("C.f/1")).is_empty());
    }

    #[test]
    fn conditions_count_as_reads() {
        let m = in_body("require(x > 0, \"no\"); if (y == 1) { helper(); }");
        let f = key("C.f/0");
        assert_eq!(m.reads_of(&f), &vars(&["C.x", "C.y"]));
        assert_eq!(m.calls[&f], [key("C.helper/0")].into_iter().collect());
    }

    #[test]
    fn unknown_receivers_are_unresolved() {
        let m = maps(
            "contract C { address token; function f(address a, uint b) public { \
             IERC20(token).transfer(a, b); payable(a).transfer(b); (bool ok, ) = a.call{value: b}(\"\"); \
             bytes memory d = abi.encode(a); keccak256(d); } }",
        );
        let f = key("C.f/2");
        assert_eq!(
            m.unresolved_calls[&f],
            ["IERC20", "call", "transfer"].iter().map(|s| s.to_string()).collect()
        );
        assert!(m.calls[&f].is_empty());
        assert_eq!(m.reads_of(&f), &vars(&["C.token"]));
    }

    #[test]
    fn cross_contract_resolution() {
        let m = maps(
            "contract Token { mapping(address => uint) public balances; function transfer(address to, uint v) public { balances[to] += v; } } \
             contract Vault { Token token; function pay(address to) public { token.transfer(to, 1); Token(address(0)).balances(to); this.pay(to); } }",
        );
        let pay = key("Vault.pay/1");
        assert_eq!(
            m.calls[&pay],
            [key("Token.transfer/2"), key("Vault.pay/1")].into_iter().collect()
        );
        assert_eq!(m.reads_of(&pay), &vars(&["Token.balances", "Vault.token"]));
        assert!(m.unresolved_calls[&pay].is_empty());
    }

    #[test]
    fn same_variable_name_in_two_contracts_stays_distinct() {
        let m = maps(
            "contract A { uint x; function f() public { x = 1; } } contract B { uint x; function f() public { x = 1; } }",
        );
        assert_eq!(m.writes_of(&key("A.f/0")), &vars(&["A.x"]));
        assert_eq!(m.writes_of(&key("B.f/0")), &vars(&["B.x"]));
    }

    #[test]
    fn modifiers_contribute_accesses() {
        let m = maps(
            "contract C { address owner; uint locked; \
             modifier onlyOwner() { require(msg.sender == owner); _; } \
             modifier lock() { locked = 1; _; locked = 0; } \
             function f() public onlyOwner lock { } }",
        );
        let f = key("C.f/0");
        assert_eq!(m.reads_of(&f), &vars(&["C.owner"]));
        assert_eq!(m.writes_of(&f), &vars(&["C.locked"]));
        assert!(m.records[&f].iter().all(|r| r.site == 1));
    }

    #[test]
    fn constants_never_accessed() {
        let m = maps(
            "contract C { uint constant K = 1; uint immutable I; uint x; \
             constructor() { I = 2; } function f() public { x = K + I; } }",
        );
        assert_eq!(m.reads_of(&key("C.f/0")), &BTreeSet::new());
        assert!(m.writes_of(&key("C.constructor/0")).is_empty());
    }

    #[test]
    fn mutability_clamps_sets() {
        let m = maps(
            "contract C { uint x; function p() public pure returns (uint) { return x; } \
             function v() public view { x = 1; } }",
        );
        assert!(m.reads_of(&key("C.p/0")).is_empty());
        assert!(m.writes_of(&key("C.v/0")).is_empty());
    }

    #[test]
    fn overload_keys() {
        let m = maps(
            "contract C { uint x; function f() public { f(1); } function f(uint a) public { x = a; } \
             function f(address a) public { } }",
        );
        assert!(m.contains(&key("C.f/1#2")));
        assert_eq!(
            m.calls[&key("C.f/0")],
            [key("C.f/1"), key("C.f/1#2")].into_iter().collect()
        );
    }

    #[test]
    fn events_and_builtins_excluded() {
        let m = maps(
            "struct P { uint a; } contract C { event E(uint); error Bad(); uint x; \
             function f() public { emit E(x); P memory p = P(1); revert Bad(); } }",
        );
        let f = key("C.f/0");
        assert!(m.calls[&f].is_empty());
        assert!(m.unresolved_calls[&f].is_empty());
        assert_eq!(m.reads_of(&f), &vars(&["C.x"]));
    }

    #[test]
    fn duplicate_contracts_across_units() {
        let a = parse("contract A {}", "a.sol").unwrap();
        let b = parse("contract A {}", "b.sol").unwrap();
        assert_eq!(
            build_access_maps(&[a, b]),
            Err(AnalysisError::DuplicateContract("A".into()))
        );
        assert_eq!(build_access_maps(&[]).unwrap(), AccessMaps::default());
    }
}
