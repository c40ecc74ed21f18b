//! Syntax tree for the supported Solidity subset.
//!
//! Declarations mirror what conflict analysis needs: contracts with their
//! state variables, functions, modifiers and events. Function bodies are
//! kept as full statement/expression trees so access extraction can tell
//! read positions from write positions.

use std::fmt;

use super::lexer::LiteralKind;

/// Path recorded for sources that did not come from disk.
pub const SYNTHETIC_PATH: &str = "<synthetic>";

#[derive(Debug, Clone, PartialEq)]
pub struct SourceUnit {
    pub path: String,
    pub pragma: Option<String>,
    /// File-level structs, enums and errors.
    pub definitions: Vec<TypeDefinition>,
    pub contracts: Vec<Contract>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Contract {
    pub name: String,
    pub is_abstract: bool,
    pub state_variables: Vec<StateVariable>,
    pub functions: Vec<Function>,
    pub modifiers: Vec<ModifierDefinition>,
    pub events: Vec<Event>,
    pub definitions: Vec<TypeDefinition>,
}

impl Contract {
    pub fn state_variable(&self, name: &str) -> Option<&StateVariable> {
        self.state_variables.iter().find(|v| v.name == name)
    }

    pub fn modifier(&self, name: &str) -> Option<&ModifierDefinition> {
        self.modifiers.iter().find(|m| m.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Visibility {
    Public,
    Private,
    Internal,
    External,
}

impl Visibility {
    pub fn as_str(self) -> &'static str {
        match self {
            Visibility::Public => "public",
            Visibility::Private => "private",
            Visibility::Internal => "internal",
            Visibility::External => "external",
        }
    }
}

impl fmt::Display for Visibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mutability {
    Pure,
    View,
    Payable,
    NonPayable,
}

impl Mutability {
    pub fn as_str(self) -> &'static str {
        match self {
            Mutability::Pure => "pure",
            Mutability::View => "view",
            Mutability::Payable => "payable",
            Mutability::NonPayable => "nonpayable",
        }
    }
}

impl fmt::Display for Mutability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DataLocation {
    Calldata,
    Memory,
    Storage,
    #[default]
    Default,
}

impl DataLocation {
    pub fn keyword(self) -> Option<&'static str> {
        match self {
            DataLocation::Calldata => Some("calldata"),
            DataLocation::Memory => Some("memory"),
            DataLocation::Storage => Some("storage"),
            DataLocation::Default => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeName {
    /// Built-in value types, including `address payable`.
    Elementary(String),
    /// Struct, enum or contract name, possibly qualified (`C.S`).
    UserDefined(Vec<String>),
    Mapping {
        key: Box<TypeName>,
        key_name: Option<String>,
        value: Box<TypeName>,
        value_name: Option<String>,
    },
    Array {
        base: Box<TypeName>,
        length: Option<Box<Expr>>,
    },
}

impl TypeName {
    /// Mappings, arrays, structs and dynamically sized built-ins.
    pub fn is_reference(&self) -> bool {
        match self {
            TypeName::Elementary(name) => matches!(name.as_str(), "string" | "bytes"),
            TypeName::UserDefined(_) | TypeName::Mapping { .. } | TypeName::Array { .. } => true,
        }
    }

    /// The user-defined name at the root of this type, if any.
    pub fn user_defined_name(&self) -> Option<&str> {
        match self {
            TypeName::UserDefined(path) => path.last().map(String::as_str),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVariable {
    pub name: String,
    pub type_name: TypeName,
    pub visibility: Visibility,
    pub is_constant: bool,
    pub is_immutable: bool,
    pub initializer: Option<Expr>,
    pub declaring_contract: String,
    pub line: u32,
}

impl StateVariable {
    /// Constants and immutables are compiled into code rather than kept in
    /// storage, so transactions can never race on them.
    pub fn is_storage(&self) -> bool {
        !self.is_constant && !self.is_immutable
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    /// Empty for unnamed parameters.
    pub name: String,
    pub type_name: TypeName,
    pub location: DataLocation,
    pub indexed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FunctionKind {
    Function,
    Constructor,
    Fallback,
    Receive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifierInvocation {
    pub name: String,
    pub arguments: Option<Vec<Expr>>,
    pub line: u32,
}

/// First and last line of a declaration, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LineSpan {
    pub start: u32,
    pub end: u32,
}

impl LineSpan {
    pub fn contains(&self, line: u32) -> bool {
        (self.start..=self.end).contains(&line)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Function {
    pub name: String,
    pub kind: FunctionKind,
    pub parameters: Vec<Parameter>,
    pub returns: Vec<Parameter>,
    pub visibility: Visibility,
    pub mutability: Mutability,
    pub modifiers: Vec<ModifierInvocation>,
    pub is_virtual: bool,
    pub is_override: bool,
    /// `None` for declarations without an implementation.
    pub body: Option<Block>,
    pub span: LineSpan,
}

impl Function {
    pub fn is_constructor(&self) -> bool {
        self.kind == FunctionKind::Constructor
    }

    pub fn is_fallback(&self) -> bool {
        self.kind == FunctionKind::Fallback
    }

    pub fn is_receive(&self) -> bool {
        self.kind == FunctionKind::Receive
    }

    pub fn arity(&self) -> usize {
        self.parameters.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModifierDefinition {
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub is_virtual: bool,
    pub body: Block,
    pub span: LineSpan,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub name: String,
    pub parameters: Vec<Parameter>,
    pub anonymous: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypeDefinition {
    Struct {
        name: String,
        fields: Vec<Parameter>,
    },
    Enum {
        name: String,
        variants: Vec<String>,
    },
    Error {
        name: String,
        parameters: Vec<Parameter>,
    },
}

impl TypeDefinition {
    pub fn name(&self) -> &str {
        match self {
            TypeDefinition::Struct { name, .. }
            | TypeDefinition::Enum { name, .. }
            | TypeDefinition::Error { name, .. } => name,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Block {
    pub statements: Vec<Stmt>,
    pub unchecked: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Stmt {
    pub kind: StmtKind,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalDecl {
    pub type_name: TypeName,
    pub location: DataLocation,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq)]
pub enum StmtKind {
    Block(Block),
    VarDecl {
        decl: LocalDecl,
        value: Option<Expr>,
    },
    /// `(uint a, , bool b) = f();`
    TupleDecl {
        decls: Vec<Option<LocalDecl>>,
        value: Expr,
    },
    Expr(Expr),
    If {
        cond: Expr,
        then: Box<Stmt>,
        otherwise: Option<Box<Stmt>>,
    },
    For {
        init: Option<Box<Stmt>>,
        cond: Option<Expr>,
        step: Option<Expr>,
        body: Box<Stmt>,
    },
    While {
        cond: Expr,
        body: Box<Stmt>,
    },
    DoWhile {
        body: Box<Stmt>,
        cond: Expr,
    },
    Return(Option<Expr>),
    /// `emit E(args);` holds the call expression.
    Emit(Expr),
    /// `revert CustomError(args);` holds the call expression.
    Revert(Expr),
    Break,
    Continue,
    /// The `_;` marker inside modifier bodies.
    Placeholder,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ident {
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub kind: LiteralKind,
    pub text: String,
    /// Denomination such as `ether` or `days`.
    pub unit: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Gt,
    Le,
    Ge,
    BitOr,
    BitXor,
    BitAnd,
    Shl,
    Shr,
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
}

impl BinaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            BinaryOp::Or => "||",
            BinaryOp::And => "&&",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Gt => ">",
            BinaryOp::Le => "<=",
            BinaryOp::Ge => ">=",
            BinaryOp::BitOr => "|",
            BinaryOp::BitXor => "^",
            BinaryOp::BitAnd => "&",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Mod => "%",
            BinaryOp::Pow => "**",
        }
    }

    pub fn from_token(text: &str) -> Option<Self> {
        Some(match text {
            "||" => BinaryOp::Or,
            "&&" => BinaryOp::And,
            "==" => BinaryOp::Eq,
            "!=" => BinaryOp::Ne,
            "<" => BinaryOp::Lt,
            ">" => BinaryOp::Gt,
            "<=" => BinaryOp::Le,
            ">=" => BinaryOp::Ge,
            "|" => BinaryOp::BitOr,
            "^" => BinaryOp::BitXor,
            "&" => BinaryOp::BitAnd,
            "<<" => BinaryOp::Shl,
            ">>" => BinaryOp::Shr,
            "+" => BinaryOp::Add,
            "-" => BinaryOp::Sub,
            "*" => BinaryOp::Mul,
            "/" => BinaryOp::Div,
            "%" => BinaryOp::Mod,
            "**" => BinaryOp::Pow,
            _ => return None,
        })
    }

    /// Binding strength; higher binds tighter.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Or => 1,
            BinaryOp::And => 2,
            BinaryOp::Eq | BinaryOp::Ne => 3,
            BinaryOp::Lt | BinaryOp::Gt | BinaryOp::Le | BinaryOp::Ge => 4,
            BinaryOp::BitOr => 5,
            BinaryOp::BitXor => 6,
            BinaryOp::BitAnd => 7,
            BinaryOp::Shl | BinaryOp::Shr => 8,
            BinaryOp::Add | BinaryOp::Sub => 9,
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Mod => 10,
            BinaryOp::Pow => 11,
        }
    }
}

/// `=` or one of the compound forms such as `+=`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Assign,
    Compound(BinaryOp),
}

impl AssignOp {
    pub fn from_token(text: &str) -> Option<Self> {
        if text == "=" {
            return Some(AssignOp::Assign);
        }
        let base = text.strip_suffix('=')?;
        match BinaryOp::from_token(base)? {
            op @ (BinaryOp::BitOr
            | BinaryOp::BitXor
            | BinaryOp::BitAnd
            | BinaryOp::Shl
            | BinaryOp::Shr
            | BinaryOp::Add
            | BinaryOp::Sub
            | BinaryOp::Mul
            | BinaryOp::Div
            | BinaryOp::Mod) => Some(AssignOp::Compound(op)),
            _ => None,
        }
    }

    pub fn is_compound(self) -> bool {
        matches!(self, AssignOp::Compound(_))
    }
}

impl fmt::Display for AssignOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AssignOp::Assign => f.write_str("="),
            AssignOp::Compound(op) => write!(f, "{}=", op.as_str()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Not,
    Neg,
    BitNot,
    PreIncrement,
    PreDecrement,
    Delete,
}

impl UnaryOp {
    pub fn as_str(self) -> &'static str {
        match self {
            UnaryOp::Not => "!",
            UnaryOp::Neg => "-",
            UnaryOp::BitNot => "~",
            UnaryOp::PreIncrement => "++",
            UnaryOp::PreDecrement => "--",
            UnaryOp::Delete => "delete",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PostfixOp {
    Increment,
    Decrement,
}

impl PostfixOp {
    pub fn as_str(self) -> &'static str {
        match self {
            PostfixOp::Increment => "++",
            PostfixOp::Decrement => "--",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CallArgs {
    Positional(Vec<Expr>),
    Named(Vec<(String, Expr)>),
}

impl CallArgs {
    pub fn len(&self) -> usize {
        match self {
            CallArgs::Positional(args) => args.len(),
            CallArgs::Named(args) => args.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn exprs(&self) -> Box<dyn Iterator<Item = &Expr> + '_> {
        match self {
            CallArgs::Positional(args) => Box::new(args.iter()),
            CallArgs::Named(args) => Box::new(args.iter().map(|(_, e)| e)),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Ident(Ident),
    Literal(Literal),
    /// An elementary type used as a value: `uint256(x)`, `address(0)`, `payable(a)`.
    ElementaryType(String),
    Member {
        base: Box<Expr>,
        member: String,
    },
    Index {
        base: Box<Expr>,
        index: Option<Box<Expr>>,
    },
    Slice {
        base: Box<Expr>,
        start: Option<Box<Expr>>,
        end: Option<Box<Expr>>,
    },
    Call {
        callee: Box<Expr>,
        options: Vec<(String, Expr)>,
        args: CallArgs,
    },
    Unary {
        op: UnaryOp,
        operand: Box<Expr>,
    },
    Postfix {
        op: PostfixOp,
        operand: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Assign {
        op: AssignOp,
        target: Box<Expr>,
        value: Box<Expr>,
    },
    Conditional {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
    /// Parenthesized list with zero or at least two slots; slots may be empty.
    Tuple(Vec<Option<Expr>>),
    ArrayLiteral(Vec<Expr>),
    New(TypeName),
    /// `type(T)`
    TypeQuery(TypeName),
}

impl Expr {
    pub fn ident(name: &str, line: u32) -> Expr {
        Expr::Ident(Ident {
            name: name.to_string(),
            line,
        })
    }

    /// Innermost expression reached by repeatedly stripping member, index
    /// and slice accesses: `a.b[c].d` → `a`.
    pub fn access_root(&self) -> &Expr {
        let mut cur = self;
        loop {
            match cur {
                Expr::Member { base, .. } | Expr::Index { base, .. } | Expr::Slice { base, .. } => {
                    cur = base
                }
                _ => return cur,
            }
        }
    }
}
