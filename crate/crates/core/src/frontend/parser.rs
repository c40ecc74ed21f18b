//! Recursive-descent parser for the supported Solidity subset.
//!
//! Anything outside the subset that would change which storage a function
//! touches (inheritance, inline assembly, libraries attached with `using`,
//! try/catch) is rejected with [`FrontendError::Unsupported`] instead of
//! being skipped.

use std::collections::HashSet;

use super::ast::*;
use super::error::{FrontendError, Position};
use super::lexer::{is_elementary_type, tokenize, LiteralKind, Token, TokenKind};

/// Statements and expressions nested deeper than this are rejected, which
/// keeps recursion bounded on adversarial input.
const MAX_DEPTH: usize = 64;

const UNITS: &[&str] = &[
    "wei", "gwei", "szabo", "finney", "ether", "seconds", "minutes", "hours", "days", "weeks",
    "years",
];

type PResult<T> = Result<T, FrontendError>;

/// Parses one source file.
pub fn parse(source: &str, path: &str) -> PResult<SourceUnit> {
    let tokens = tokenize(source)?;
    let mut parser = Parser::new(tokens);
    let mut unit = parser.source_unit()?;
    unit.path = if path.is_empty() {
        SYNTHETIC_PATH.to_string()
    } else {
        path.to_string()
    };
    Ok(unit)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    depth: usize,
    last_line: u32,
}

impl Parser {
    fn new(tokens: Vec<Token>) -> Self {
        Parser {
            tokens,
            pos: 0,
            depth: 0,
            last_line: 1,
        }
    }

    // -- token helpers --

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&Token> {
        self.tokens.get(self.pos + n)
    }

    fn at_punct(&self, p: &str) -> bool {
        self.peek().is_some_and(|t| t.is_punct(p))
    }

    fn at_op(&self, op: &str) -> bool {
        self.peek().is_some_and(|t| t.is_op(op))
    }

    fn at_keyword(&self, kw: &str) -> bool {
        self.peek().is_some_and(|t| t.is_keyword(kw))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(|t| t.kind == TokenKind::Identifier)
    }

    fn current_pos(&self) -> Position {
        match self.peek() {
            Some(t) => t.pos,
            None => self.tokens.last().map(|t| t.pos).unwrap_or_default(),
        }
    }

    fn current_line(&self) -> u32 {
        self.current_pos().line
    }

    fn bump(&mut self) -> PResult<Token> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                let t = t.clone();
                self.pos += 1;
                self.last_line = t.pos.line;
                Ok(t)
            }
            None => Err(self.expected("more input")),
        }
    }

    fn eat_punct(&mut self, p: &str) -> bool {
        if self.at_punct(p) {
            self.pos += 1;
            self.last_line = self.tokens[self.pos - 1].pos.line;
            true
        } else {
            false
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.at_keyword(kw) {
            self.pos += 1;
            self.last_line = self.tokens[self.pos - 1].pos.line;
            true
        } else {
            false
        }
    }

    fn eat_op(&mut self, op: &str) -> bool {
        if self.at_op(op) {
            self.pos += 1;
            self.last_line = self.tokens[self.pos - 1].pos.line;
            true
        } else {
            false
        }
    }

    fn expected(&self, what: &str) -> FrontendError {
        FrontendError::Parse {
            pos: self.current_pos(),
            expected: what.to_string(),
            found: self
                .peek()
                .map(|t| t.to_string())
                .unwrap_or_else(|| "end of input".to_string()),
        }
    }

    fn unsupported(&self, construct: &str) -> FrontendError {
        FrontendError::Unsupported {
            pos: self.current_pos(),
            construct: construct.to_string(),
        }
    }

    fn expect_punct(&mut self, p: &str) -> PResult<()> {
        if self.eat_punct(p) {
            Ok(())
        } else {
            Err(self.expected(&format!("`{p}`")))
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.expected(&format!("`{kw}`")))
        }
    }

    fn expect_ident(&mut self) -> PResult<String> {
        if self.at_ident() {
            Ok(self.bump()?.text)
        } else {
            Err(self.expected("identifier"))
        }
    }

    fn nested<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_DEPTH {
            return Err(self.expected("shallower nesting"));
        }
        self.depth += 1;
        let result = f(self);
        self.depth -= 1;
        result
    }

    /// Runs `f`, rewinding to the starting token if it fails or declines.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<Option<T>>) -> Option<T> {
        let (pos, depth, line) = (self.pos, self.depth, self.last_line);
        match f(self) {
            Ok(Some(v)) => Some(v),
            _ => {
                self.pos = pos;
                self.depth = depth;
                self.last_line = line;
                None
            }
        }
    }

    // -- declarations --

    fn source_unit(&mut self) -> PResult<SourceUnit> {
        let mut unit = SourceUnit {
            path: String::new(),
            pragma: None,
            definitions: Vec::new(),
            contracts: Vec::new(),
        };
        let mut names = HashSet::new();
        while let Some(tok) = self.peek() {
            let start = tok.pos;
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Keyword, "pragma") => {
                    if let Some(version) = self.pragma()? {
                        unit.pragma = Some(version);
                    }
                }
                (TokenKind::Keyword, "abstract") | (TokenKind::Keyword, "contract") => {
                    let contract = self.contract()?;
                    if !names.insert(contract.name.clone()) {
                        return Err(FrontendError::Parse {
                            pos: start,
                            expected: "unique contract name".to_string(),
                            found: format!("duplicate `{}`", contract.name),
                        });
                    }
                    unit.contracts.push(contract);
                }
                (TokenKind::Keyword, "struct" | "enum" | "error") => {
                    unit.definitions.push(self.type_definition()?);
                }
                (TokenKind::Keyword, "import") => return Err(self.unsupported("import directive")),
                (TokenKind::Keyword, "interface") => {
                    return Err(self.unsupported("interface definition"))
                }
                (TokenKind::Keyword, "library") => {
                    return Err(self.unsupported("library definition"))
                }
                (TokenKind::Keyword, "using") => return Err(self.unsupported("using-for directive")),
                (TokenKind::Keyword, "function") => {
                    return Err(self.unsupported("free function"))
                }
                (TokenKind::Keyword, "type") => {
                    return Err(self.unsupported("user-defined value type"))
                }
                (TokenKind::Keyword, "event") => {
                    return Err(self.unsupported("file-level event"))
                }
                _ => return Err(self.expected("contract definition")),
            }
        }
        Ok(unit)
    }

    /// `pragma solidity <version>;` yields the version text; other pragmas
    /// are accepted and dropped.
    fn pragma(&mut self) -> PResult<Option<String>> {
        self.expect_keyword("pragma")?;
        let mut parts: Vec<Token> = Vec::new();
        loop {
            match self.peek() {
                None => return Err(self.expected("`;`")),
                Some(t) if t.is_punct(";") => {
                    self.bump()?;
                    break;
                }
                Some(_) => parts.push(self.bump()?),
            }
        }
        let Some((first, rest)) = parts.split_first() else {
            return Err(self.expected("pragma name"));
        };
        if first.text != "solidity" {
            return Ok(None);
        }
        Ok(Some(join_tokens(rest)))
    }

    fn contract(&mut self) -> PResult<Contract> {
        let is_abstract = self.eat_keyword("abstract");
        if self.at_keyword("interface") {
            return Err(self.unsupported("interface definition"));
        }
        self.expect_keyword("contract")?;
        let name = self.expect_ident()?;
        if self.at_keyword("is") {
            return Err(self.unsupported("inheritance list"));
        }
        self.expect_punct("{")?;
        let mut contract = Contract {
            name: name.clone(),
            is_abstract,
            state_variables: Vec::new(),
            functions: Vec::new(),
            modifiers: Vec::new(),
            events: Vec::new(),
            definitions: Vec::new(),
        };
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.expected("`}`"));
            };
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Punctuation, "}") => {
                    self.bump()?;
                    break;
                }
                (TokenKind::Keyword, "function") => {
                    if self.peek_at(1).is_some_and(|t| t.is_punct("(")) {
                        return Err(self.unsupported("function type or unnamed fallback"));
                    }
                    contract.functions.push(self.function()?);
                }
                (TokenKind::Keyword, "constructor" | "fallback" | "receive") => {
                    contract.functions.push(self.function()?);
                }
                (TokenKind::Keyword, "modifier") => contract.modifiers.push(self.modifier()?),
                (TokenKind::Keyword, "event") => contract.events.push(self.event()?),
                (TokenKind::Keyword, "struct" | "enum" | "error") => {
                    contract.definitions.push(self.type_definition()?)
                }
                (TokenKind::Keyword, "using") => return Err(self.unsupported("using-for directive")),
                (TokenKind::Keyword, "type") => {
                    return Err(self.unsupported("user-defined value type"))
                }
                (TokenKind::Keyword, "assembly") => return Err(self.unsupported("inline assembly")),
                _ => {
                    let pos = self.current_pos();
                    let var = self.state_variable(&name)?;
                    if contract.state_variable(&var.name).is_some() {
                        return Err(FrontendError::Parse {
                            pos,
                            expected: "unique state variable name".to_string(),
                            found: format!("duplicate `{}`", var.name),
                        });
                    }
                    contract.state_variables.push(var);
                }
            }
        }
        Ok(contract)
    }

    fn state_variable(&mut self, contract: &str) -> PResult<StateVariable> {
        let line = self.current_line();
        let type_name = self.type_name()?;
        let mut visibility = None;
        let mut is_constant = false;
        let mut is_immutable = false;
        while let Some(tok) = self.peek() {
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Keyword, "public" | "private" | "internal") => {
                    if visibility.is_some() {
                        return Err(self.expected("a single visibility"));
                    }
                    visibility = Some(match self.bump()?.text.as_str() {
                        "public" => Visibility::Public,
                        "private" => Visibility::Private,
                        _ => Visibility::Internal,
                    });
                }
                (TokenKind::Keyword, "external") => {
                    return Err(self.expected("state variable visibility"))
                }
                (TokenKind::Keyword, "constant") => {
                    self.bump()?;
                    is_constant = true;
                }
                (TokenKind::Keyword, "immutable") => {
                    self.bump()?;
                    is_immutable = true;
                }
                (TokenKind::Keyword, "override") => self.override_spec()?,
                (TokenKind::Identifier, "transient") => {
                    return Err(self.unsupported("transient storage"))
                }
                _ => break,
            }
        }
        let name = self.expect_ident()?;
        let initializer = if self.eat_op("=") {
            Some(self.expression()?)
        } else {
            None
        };
        self.expect_punct(";")?;
        Ok(StateVariable {
            name,
            type_name,
            visibility: visibility.unwrap_or(Visibility::Internal),
            is_constant,
            is_immutable,
            initializer,
            declaring_contract: contract.to_string(),
            line,
        })
    }

    fn override_spec(&mut self) -> PResult<()> {
        self.expect_keyword("override")?;
        if self.eat_punct("(") {
            loop {
                self.type_name()?;
                if !self.eat_punct(",") {
                    break;
                }
            }
            self.expect_punct(")")?;
        }
        Ok(())
    }

    fn function(&mut self) -> PResult<Function> {
        let start = self.current_line();
        let head = self.bump()?;
        let (kind, name) = match head.text.as_str() {
            "constructor" => (FunctionKind::Constructor, "constructor".to_string()),
            "fallback" => (FunctionKind::Fallback, "fallback".to_string()),
            "receive" => (FunctionKind::Receive, "receive".to_string()),
            _ => {
                let name = self.expect_ident()?;
                (FunctionKind::Function, name)
            }
        };
        let parameters = self.parameter_list()?;
        let mut visibility = None;
        let mut mutability = None;
        let mut modifiers = Vec::new();
        let mut returns = Vec::new();
        let mut is_virtual = false;
        let mut is_override = false;
        loop {
            let Some(tok) = self.peek() else {
                return Err(self.expected("function body"));
            };
            match (tok.kind, tok.text.as_str()) {
                (TokenKind::Keyword, "public" | "private" | "internal" | "external") => {
                    if visibility.is_some() {
                        return Err(self.expected("a single visibility"));
                    }
                    visibility = Some(match self.bump()?.text.as_str() {
                        "public" => Visibility::Public,
                        "private" => Visibility::Private,
                        "internal" => Visibility::Internal,
                        _ => Visibility::External,
                    });
                }
                (TokenKind::Keyword, "pure" | "view" | "payable" | "constant") => {
                    if mutability.is_some() {
                        return Err(self.expected("a single state mutability"));
                    }
                    mutability = Some(match self.bump()?.text.as_str() {
                        "pure" => Mutability::Pure,
                        "payable" => Mutability::Payable,
                        _ => Mutability::View,
                    });
                }
                (TokenKind::Keyword, "virtual") => {
                    self.bump()?;
                    is_virtual = true;
                }
                (TokenKind::Keyword, "override") => {
                    self.override_spec()?;
                    is_override = true;
                }
                (TokenKind::Keyword, "returns") => {
                    self.bump()?;
                    returns = self.parameter_list()?;
                }
                (TokenKind::Identifier, _) => {
                    let line = tok.pos.line;
                    let name = self.bump()?.text;
                    if self.at_punct(".") {
                        return Err(self.unsupported("qualified modifier invocation"));
                    }
                    let arguments = if self.at_punct("(") {
                        match self.call_arguments()? {
                            CallArgs::Positional(args) => Some(args),
                            CallArgs::Named(_) => {
                                return Err(self.expected("positional modifier arguments"))
                            }
                        }
                    } else {
                        None
                    };
                    modifiers.push(ModifierInvocation {
                        name,
                        arguments,
                        line,
                    });
                }
                (TokenKind::Punctuation, "{" | ";") => break,
                _ => return Err(self.expected("function attribute or body")),
            }
        }
        let body = if self.eat_punct(";") {
            None
        } else {
            Some(self.block()?)
        };
        let default_visibility = match kind {
            FunctionKind::Fallback | FunctionKind::Receive => Visibility::External,
            FunctionKind::Constructor | FunctionKind::Function => Visibility::Public,
        };
        Ok(Function {
            name,
            kind,
            parameters,
            returns,
            visibility: visibility.unwrap_or(default_visibility),
            mutability: mutability.unwrap_or(Mutability::NonPayable),
            modifiers,
            is_virtual,
            is_override,
            body,
            span: LineSpan {
                start,
                end: self.last_line,
            },
        })
    }

    fn modifier(&mut self) -> PResult<ModifierDefinition> {
        let start = self.current_line();
        self.expect_keyword("modifier")?;
        let name = self.expect_ident()?;
        let parameters = if self.at_punct("(") {
            self.parameter_list()?
        } else {
            Vec::new()
        };
        let mut is_virtual = false;
        loop {
            if self.eat_keyword("virtual") {
                is_virtual = true;
            } else if self.at_keyword("override") {
                self.override_spec()?;
            } else {
                break;
            }
        }
        let body = if self.eat_punct(";") {
            Block::default()
        } else {
            self.block()?
        };
        Ok(ModifierDefinition {
            name,
            parameters,
            is_virtual,
            body,
            span: LineSpan {
                start,
                end: self.last_line,
            },
        })
    }

    fn event(&mut self) -> PResult<Event> {
        self.expect_keyword("event")?;
        let name = self.expect_ident()?;
        let parameters = self.parameter_list()?;
        let anonymous = self.eat_keyword("anonymous");
        self.expect_punct(";")?;
        Ok(Event {
            name,
            parameters,
            anonymous,
        })
    }

    fn type_definition(&mut self) -> PResult<TypeDefinition> {
        let head = self.bump()?;
        let name = self.expect_ident()?;
        match head.text.as_str() {
            "struct" => {
                self.expect_punct("{")?;
                let mut fields = Vec::new();
                while !self.eat_punct("}") {
                    let type_name = self.type_name()?;
                    let field = self.expect_ident()?;
                    self.expect_punct(";")?;
                    fields.push(Parameter {
                        name: field,
                        type_name,
                        location: DataLocation::Default,
                        indexed: false,
                    });
                }
                Ok(TypeDefinition::Struct { name, fields })
            }
            "enum" => {
                self.expect_punct("{")?;
                let mut variants = Vec::new();
                loop {
                    variants.push(self.expect_ident()?);
                    if !self.eat_punct(",") {
                        break;
                    }
                }
                self.expect_punct("}")?;
                Ok(TypeDefinition::Enum { name, variants })
            }
            _ => {
                let parameters = self.parameter_list()?;
                self.expect_punct(";")?;
                Ok(TypeDefinition::Error { name, parameters })
            }
        }
    }

    fn parameter_list(&mut self) -> PResult<Vec<Parameter>> {
        self.expect_punct("(")?;
        let mut params = Vec::new();
        if self.eat_punct(")") {
            return Ok(params);
        }
        loop {
            params.push(self.parameter()?);
            if self.eat_punct(")") {
                return Ok(params);
            }
            self.expect_punct(",")?;
        }
    }

    fn parameter(&mut self) -> PResult<Parameter> {
        let type_name = self.type_name()?;
        let mut location = DataLocation::Default;
        let mut indexed = false;
        loop {
            if let Some(loc) = self.data_location() {
                location = loc;
            } else if self.eat_keyword("indexed") {
                indexed = true;
            } else {
                break;
            }
        }
        if location == DataLocation::Storage && !type_name.is_reference() {
            return Err(self.expected("reference type for storage location"));
        }
        let name = if self.at_ident() {
            self.bump()?.text
        } else {
            String::new()
        };
        Ok(Parameter {
            name,
            type_name,
            location,
            indexed,
        })
    }

    fn data_location(&mut self) -> Option<DataLocation> {
        let loc = match self.peek() {
            Some(t) if t.is_keyword("memory") => DataLocation::Memory,
            Some(t) if t.is_keyword("storage") => DataLocation::Storage,
            Some(t) if t.is_keyword("calldata") => DataLocation::Calldata,
            _ => return None,
        };
        self.pos += 1;
        Some(loc)
    }

    fn type_name(&mut self) -> PResult<TypeName> {
        self.nested(|p| {
            let mut ty = match p.peek() {
                Some(t) if t.is_keyword("mapping") => {
                    p.bump()?;
                    p.expect_punct("(")?;
                    let key = p.type_name()?;
                    let key_name = if p.at_ident() {
                        Some(p.bump()?.text)
                    } else {
                        None
                    };
                    if !p.eat_op("=>") {
                        return Err(p.expected("`=>`"));
                    }
                    let value = p.type_name()?;
                    let value_name = if p.at_ident() {
                        Some(p.bump()?.text)
                    } else {
                        None
                    };
                    p.expect_punct(")")?;
                    TypeName::Mapping {
                        key: Box::new(key),
                        key_name,
                        value: Box::new(value),
                        value_name,
                    }
                }
                Some(t) if t.kind == TokenKind::Keyword && is_elementary_type(&t.text) => {
                    let text = p.bump()?.text;
                    if text == "address" && p.eat_keyword("payable") {
                        TypeName::Elementary("address payable".to_string())
                    } else {
                        TypeName::Elementary(text)
                    }
                }
                Some(t) if t.kind == TokenKind::Identifier => {
                    let mut path = vec![p.bump()?.text];
                    while p.at_punct(".") && p.peek_at(1).is_some_and(|t| t.kind == TokenKind::Identifier) {
                        p.bump()?;
                        path.push(p.bump()?.text);
                    }
                    TypeName::UserDefined(path)
                }
                Some(t) if t.is_keyword("function") => return Err(p.unsupported("function type")),
                _ => return Err(p.expected("type name")),
            };
            while p.eat_punct("[") {
                let length = if p.at_punct("]") {
                    None
                } else {
                    Some(Box::new(p.expression()?))
                };
                p.expect_punct("]")?;
                ty = TypeName::Array {
                    base: Box::new(ty),
                    length,
                };
            }
            Ok(ty)
        })
    }

    // -- statements --

    fn block(&mut self) -> PResult<Block> {
        let unchecked = self.eat_keyword("unchecked");
        self.expect_punct("{")?;
        let mut statements = Vec::new();
        while !self.eat_punct("}") {
            if self.peek().is_none() {
                return Err(self.expected("`}`"));
            }
            statements.push(self.statement()?);
        }
        Ok(Block {
            statements,
            unchecked,
        })
    }

    fn statement(&mut self) -> PResult<Stmt> {
        self.nested(|p| {
            let line = p.current_line();
            let kind = p.statement_kind()?;
            Ok(Stmt { kind, line })
        })
    }

    fn statement_kind(&mut self) -> PResult<StmtKind> {
        let Some(tok) = self.peek() else {
            return Err(self.expected("statement"));
        };
        match (tok.kind, tok.text.as_str()) {
            (TokenKind::Punctuation, "{") | (TokenKind::Keyword, "unchecked") => {
                Ok(StmtKind::Block(self.block()?))
            }
            (TokenKind::Keyword, "if") => {
                self.bump()?;
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let then = Box::new(self.statement()?);
                let otherwise = if self.eat_keyword("else") {
                    Some(Box::new(self.statement()?))
                } else {
                    None
                };
                Ok(StmtKind::If {
                    cond,
                    then,
                    otherwise,
                })
            }
            (TokenKind::Keyword, "for") => {
                self.bump()?;
                self.expect_punct("(")?;
                let init = if self.eat_punct(";") {
                    None
                } else {
                    let line = self.current_line();
                    let kind = self.simple_statement()?;
                    Some(Box::new(Stmt { kind, line }))
                };
                let cond = if self.at_punct(";") {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.expect_punct(";")?;
                let step = if self.at_punct(")") {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                Ok(StmtKind::For {
                    init,
                    cond,
                    step,
                    body,
                })
            }
            (TokenKind::Keyword, "while") => {
                self.bump()?;
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                let body = Box::new(self.statement()?);
                Ok(StmtKind::While { cond, body })
            }
            (TokenKind::Keyword, "do") => {
                self.bump()?;
                let body = Box::new(self.statement()?);
                self.expect_keyword("while")?;
                self.expect_punct("(")?;
                let cond = self.expression()?;
                self.expect_punct(")")?;
                self.expect_punct(";")?;
                Ok(StmtKind::DoWhile { body, cond })
            }
            (TokenKind::Keyword, "return") => {
                self.bump()?;
                let value = if self.at_punct(";") {
                    None
                } else {
                    Some(self.expression()?)
                };
                self.expect_punct(";")?;
                Ok(StmtKind::Return(value))
            }
            (TokenKind::Keyword, "emit") => {
                self.bump()?;
                let call = self.expression()?;
                if !matches!(call, Expr::Call { .. }) {
                    return Err(self.expected("event invocation"));
                }
                self.expect_punct(";")?;
                Ok(StmtKind::Emit(call))
            }
            (TokenKind::Keyword, "break") => {
                self.bump()?;
                self.expect_punct(";")?;
                Ok(StmtKind::Break)
            }
            (TokenKind::Keyword, "continue") => {
                self.bump()?;
                self.expect_punct(";")?;
                Ok(StmtKind::Continue)
            }
            (TokenKind::Keyword, "assembly") => Err(self.unsupported("inline assembly")),
            (TokenKind::Keyword, "try") => Err(self.unsupported("try/catch")),
            (TokenKind::Keyword, "function") => Err(self.unsupported("function type")),
            (TokenKind::Identifier, "_") if self.peek_at(1).is_some_and(|t| t.is_punct(";")) => {
                self.bump()?;
                self.bump()?;
                Ok(StmtKind::Placeholder)
            }
            (TokenKind::Identifier, "revert")
                if self
                    .peek_at(1)
                    .is_some_and(|t| t.kind == TokenKind::Identifier) =>
            {
                self.bump()?;
                let call = self.expression()?;
                if !matches!(call, Expr::Call { .. }) {
                    return Err(self.expected("error invocation"));
                }
                self.expect_punct(";")?;
                Ok(StmtKind::Revert(call))
            }
            _ => self.simple_statement(),
        }
    }

    /// Declaration or expression statement, including the trailing `;`.
    fn simple_statement(&mut self) -> PResult<StmtKind> {
        if self.at_punct("(") {
            if let Some(kind) = self.attempt(Self::tuple_declaration) {
                return Ok(kind);
            }
        } else if let Some(kind) = self.attempt(Self::variable_declaration) {
            return Ok(kind);
        }
        let expr = self.expression()?;
        self.expect_punct(";")?;
        Ok(StmtKind::Expr(expr))
    }

    fn local_decl(&mut self) -> PResult<Option<LocalDecl>> {
        let starts_type = match self.peek() {
            Some(t) => {
                t.kind == TokenKind::Identifier
                    || t.is_keyword("mapping")
                    || (t.kind == TokenKind::Keyword && is_elementary_type(&t.text))
            }
            None => false,
        };
        if !starts_type {
            return Ok(None);
        }
        let type_name = self.type_name()?;
        let location = self.data_location().unwrap_or_default();
        if !self.at_ident() {
            return Ok(None);
        }
        let name = self.bump()?.text;
        Ok(Some(LocalDecl {
            type_name,
            location,
            name,
        }))
    }

    fn variable_declaration(&mut self) -> PResult<Option<StmtKind>> {
        let Some(decl) = self.local_decl()? else {
            return Ok(None);
        };
        let value = if self.eat_op("=") {
            Some(self.expression()?)
        } else if self.at_punct(";") {
            None
        } else {
            return Ok(None);
        };
        self.expect_punct(";")?;
        Ok(Some(StmtKind::VarDecl { decl, value }))
    }

    fn tuple_declaration(&mut self) -> PResult<Option<StmtKind>> {
        self.expect_punct("(")?;
        let mut decls = Vec::new();
        loop {
            if self.at_punct(",") || self.at_punct(")") {
                decls.push(None);
            } else {
                match self.local_decl()? {
                    Some(decl) => decls.push(Some(decl)),
                    None => return Ok(None),
                }
            }
            if self.eat_punct(")") {
                break;
            }
            self.expect_punct(",")?;
        }
        if decls.iter().all(Option::is_none) || !self.eat_op("=") {
            return Ok(None);
        }
        let value = self.expression()?;
        self.expect_punct(";")?;
        Ok(Some(StmtKind::TupleDecl { decls, value }))
    }

    // -- expressions --

    fn expression(&mut self) -> PResult<Expr> {
        self.nested(Self::assignment)
    }

    fn assignment(&mut self) -> PResult<Expr> {
        let lhs = self.conditional()?;
        if let Some(op) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Operator)
            .and_then(|t| AssignOp::from_token(&t.text))
        {
            self.bump()?;
            let value = self.expression()?;
            return Ok(Expr::Assign {
                op,
                target: Box::new(lhs),
                value: Box::new(value),
            });
        }
        Ok(lhs)
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.binary(1)?;
        if self.eat_op("?") {
            let then = self.expression()?;
            if !self.eat_op(":") {
                return Err(self.expected("`:`"));
            }
            let otherwise = self.expression()?;
            return Ok(Expr::Conditional {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            });
        }
        Ok(cond)
    }

    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self
            .peek()
            .filter(|t| t.kind == TokenKind::Operator)
            .and_then(|t| BinaryOp::from_token(&t.text))
        {
            let prec = op.precedence();
            if prec < min_prec {
                break;
            }
            self.bump()?;
            // `**` is right-associative.
            let next = if op == BinaryOp::Pow { prec } else { prec + 1 };
            let rhs = self.nested(|p| p.binary(next))?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        self.nested(|p| {
            let op = match p.peek() {
                Some(t) if t.is_op("!") => Some(UnaryOp::Not),
                Some(t) if t.is_op("-") => Some(UnaryOp::Neg),
                Some(t) if t.is_op("~") => Some(UnaryOp::BitNot),
                Some(t) if t.is_op("++") => Some(UnaryOp::PreIncrement),
                Some(t) if t.is_op("--") => Some(UnaryOp::PreDecrement),
                Some(t) if t.is_keyword("delete") => Some(UnaryOp::Delete),
                _ => None,
            };
            match op {
                Some(op) => {
                    p.bump()?;
                    let operand = p.unary()?;
                    Ok(Expr::Unary {
                        op,
                        operand: Box::new(operand),
                    })
                }
                None => p.postfix(),
            }
        })
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut expr = self.primary()?;
        loop {
            if self.eat_punct("[") {
                let start = if self.at_punct("]") || self.at_op(":") {
                    None
                } else {
                    Some(Box::new(self.expression()?))
                };
                if self.eat_op(":") {
                    let end = if self.at_punct("]") {
                        None
                    } else {
                        Some(Box::new(self.expression()?))
                    };
                    self.expect_punct("]")?;
                    expr = Expr::Slice {
                        base: Box::new(expr),
                        start,
                        end,
                    };
                } else {
                    self.expect_punct("]")?;
                    expr = Expr::Index {
                        base: Box::new(expr),
                        index: start,
                    };
                }
            } else if self.eat_punct(".") {
                let member = match self.peek() {
                    Some(t) if matches!(t.kind, TokenKind::Identifier | TokenKind::Keyword) => {
                        self.bump()?.text
                    }
                    _ => return Err(self.expected("member name")),
                };
                expr = Expr::Member {
                    base: Box::new(expr),
                    member,
                };
            } else if self.at_punct("{") && self.at_call_options() {
                let options = self.named_list("{", "}")?;
                if !self.at_punct("(") {
                    return Err(self.expected("`(`"));
                }
                let args = self.call_arguments()?;
                expr = Expr::Call {
                    callee: Box::new(expr),
                    options,
                    args,
                };
            } else if self.at_punct("(") {
                let args = self.call_arguments()?;
                expr = Expr::Call {
                    callee: Box::new(expr),
                    options: Vec::new(),
                    args,
                };
            } else if self.eat_op("++") {
                expr = Expr::Postfix {
                    op: PostfixOp::Increment,
                    operand: Box::new(expr),
                };
            } else if self.eat_op("--") {
                expr = Expr::Postfix {
                    op: PostfixOp::Decrement,
                    operand: Box::new(expr),
                };
            } else {
                return Ok(expr);
            }
        }
    }

    fn at_call_options(&self) -> bool {
        self.peek_at(1)
            .is_some_and(|t| t.kind == TokenKind::Identifier)
            && self.peek_at(2).is_some_and(|t| t.is_op(":"))
    }

    /// `{ name: expr, ... }` delimited by `open` / `close`.
    fn named_list(&mut self, open: &str, close: &str) -> PResult<Vec<(String, Expr)>> {
        self.expect_punct(open)?;
        let mut items = Vec::new();
        if self.eat_punct(close) {
            return Ok(items);
        }
        loop {
            let name = self.expect_ident()?;
            if !self.eat_op(":") {
                return Err(self.expected("`:`"));
            }
            items.push((name, self.expression()?));
            if self.eat_punct(close) {
                return Ok(items);
            }
            self.expect_punct(",")?;
        }
    }

    fn call_arguments(&mut self) -> PResult<CallArgs> {
        self.expect_punct("(")?;
        if self.at_punct("{") {
            let named = self.named_list("{", "}")?;
            self.expect_punct(")")?;
            return Ok(CallArgs::Named(named));
        }
        let mut args = Vec::new();
        if self.eat_punct(")") {
            return Ok(CallArgs::Positional(args));
        }
        loop {
            args.push(self.expression()?);
            if self.eat_punct(")") {
                return Ok(CallArgs::Positional(args));
            }
            self.expect_punct(",")?;
        }
    }

    fn primary(&mut self) -> PResult<Expr> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.expected("expression"));
        };
        match tok.kind {
            TokenKind::Identifier => {
                self.bump()?;
                Ok(Expr::Ident(Ident {
                    name: tok.text,
                    line: tok.pos.line,
                }))
            }
            TokenKind::Literal(kind) => {
                self.bump()?;
                let unit = if kind == LiteralKind::Number
                    && self
                        .peek()
                        .is_some_and(|t| t.kind == TokenKind::Identifier && UNITS.contains(&t.text.as_str()))
                {
                    Some(self.bump()?.text)
                } else {
                    None
                };
                Ok(Expr::Literal(Literal {
                    kind,
                    text: tok.text,
                    unit,
                }))
            }
            TokenKind::Keyword => match tok.text.as_str() {
                "true" | "false" => {
                    self.bump()?;
                    Ok(Expr::Literal(Literal {
                        kind: LiteralKind::Bool,
                        text: tok.text,
                        unit: None,
                    }))
                }
                "new" => {
                    self.bump()?;
                    Ok(Expr::New(self.type_name()?))
                }
                "type" => {
                    self.bump()?;
                    self.expect_punct("(")?;
                    let ty = self.type_name()?;
                    self.expect_punct(")")?;
                    Ok(Expr::TypeQuery(ty))
                }
                "payable" if self.peek_at(1).is_some_and(|t| t.is_punct("(")) => {
                    self.bump()?;
                    Ok(Expr::ElementaryType(tok.text))
                }
                text if is_elementary_type(text) => {
                    self.bump()?;
                    Ok(Expr::ElementaryType(tok.text))
                }
                _ => Err(self.expected("expression")),
            },
            TokenKind::Punctuation if tok.text == "(" => {
                self.bump()?;
                let mut slots = Vec::new();
                let mut saw_comma = false;
                if self.eat_punct(")") {
                    return Ok(Expr::Tuple(slots));
                }
                loop {
                    if self.at_punct(",") || self.at_punct(")") {
                        slots.push(None);
                    } else {
                        slots.push(Some(self.expression()?));
                    }
                    if self.eat_punct(")") {
                        break;
                    }
                    self.expect_punct(",")?;
                    saw_comma = true;
                }
                if !saw_comma {
                    if let Some(Some(inner)) = slots.pop() {
                        return Ok(inner);
                    }
                    return Err(self.expected("expression"));
                }
                Ok(Expr::Tuple(slots))
            }
            TokenKind::Punctuation if tok.text == "[" => {
                self.bump()?;
                let mut items = Vec::new();
                if !self.eat_punct("]") {
                    loop {
                        items.push(self.expression()?);
                        if self.eat_punct("]") {
                            break;
                        }
                        self.expect_punct(",")?;
                    }
                }
                Ok(Expr::ArrayLiteral(items))
            }
            _ => Err(self.expected("expression")),
        }
    }
}

/// Re-joins tokens, keeping a single space wherever the source had a gap.
fn join_tokens(tokens: &[Token]) -> String {
    let mut out = String::new();
    let mut prev_end: Option<Position> = None;
    for tok in tokens {
        if let Some(end) = prev_end {
            if end != tok.pos {
                out.push(' ');
            }
        }
        out.push_str(&tok.text);
        prev_end = Some(Position {
            line: tok.pos.line,
            column: tok.pos.column + tok.text.chars().count() as u32,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(src: &str) -> SourceUnit {
        parse(src, "test.sol").unwrap()
    }

    fn body_of(src: &str) -> Vec<Stmt> {
        let u = unit(&format!("contract C {{ function f() public {{ {src} }} }}"));
        u.contracts[0].functions[0].body.clone().unwrap().statements
    }

    #[test]
    fn pragma_only() {
        let u = unit("pragma solidity ^0.8.0;");
        assert_eq!(u.pragma.as_deref(), Some("^0.8.0"));
        assert!(u.contracts.is_empty());
        let u = unit("pragma solidity >=0.7.0 <0.9.0; pragma abicoder v2;");
        assert_eq!(u.pragma.as_deref(), Some(">=0.7.0 <0.9.0"));
    }

    #[test]
    fn empty_contract() {
        let u = unit("contract C {}");
        assert_eq!(u.contracts.len(), 1);
        let c = &u.contracts[0];
        assert_eq!(c.name, "C");
        assert!(c.state_variables.is_empty() && c.functions.is_empty() && c.events.is_empty());
    }

    #[test]
    fn empty_path_gets_sentinel() {
        assert_eq!(parse("", "").unwrap().path, SYNTHETIC_PATH);
    }

    #[test]
    fn function_header() {
        let u = unit(
            "contract C { modifier only(address a) { _; } \
             function f(uint256 a, bytes calldata b) external payable only(msg.sender) returns (bool ok, uint256) { return (true, a); } }",
        );
        let f = &u.contracts[0].functions[0];
        assert_eq!(f.visibility, Visibility::External);
        assert_eq!(f.mutability, Mutability::Payable);
        assert_eq!(f.parameters.len(), 2);
        assert_eq!(f.parameters[1].location, DataLocation::Calldata);
        assert_eq!(f.returns.len(), 2);
        assert_eq!(f.returns[0].name, "ok");
        assert_eq!(f.returns[1].name, "");
        assert_eq!(f.modifiers[0].name, "only");
        assert_eq!(f.modifiers[0].arguments.as_ref().unwrap().len(), 1);
    }

    #[test]
    fn special_functions() {
        let u = unit(
            "contract C { constructor() {} fallback() external {} receive() external payable {} function g() public; }",
        );
        let fs = &u.contracts[0].functions;
        assert!(fs[0].is_constructor() && !fs[0].is_fallback() && !fs[0].is_receive());
        assert!(fs[1].is_fallback());
        assert!(fs[2].is_receive());
        assert_eq!(fs[2].mutability, Mutability::Payable);
        assert!(fs[3].body.is_none());
    }

    #[test]
    fn state_variable_attributes() {
        let u = unit(
            "contract C { uint256 constant FEE = 3; address immutable owner; mapping(address => mapping(address => uint)) public allowed; uint[] xs; }",
        );
        let vars = &u.contracts[0].state_variables;
        assert!(vars[0].is_constant && !vars[0].is_storage());
        assert!(vars[1].is_immutable);
        assert_eq!(vars[2].visibility, Visibility::Public);
        assert!(matches!(vars[2].type_name, TypeName::Mapping { .. }));
        assert_eq!(vars[3].visibility, Visibility::Internal);
        assert_eq!(vars[3].declaring_contract, "C");
    }

    #[test]
    fn declarations_versus_expressions() {
        let stmts = body_of("uint x = 1; a[i] = 2; S memory s; x.y z; a.b = c; (uint p, , bool q) = f(); (a, b) = (b, a);");
        assert!(matches!(stmts[0].kind, StmtKind::VarDecl { .. }));
        assert!(matches!(stmts[1].kind, StmtKind::Expr(Expr::Assign { .. })));
        assert!(matches!(stmts[2].kind, StmtKind::VarDecl { .. }));
        assert!(matches!(stmts[3].kind, StmtKind::VarDecl { .. }));
        assert!(matches!(stmts[4].kind, StmtKind::Expr(Expr::Assign { .. })));
        match &stmts[5].kind {
            StmtKind::TupleDecl { decls, .. } => assert_eq!(decls.len(), 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(stmts[6].kind, StmtKind::Expr(Expr::Assign { .. })));
    }

    #[test]
    fn precedence() {
        let stmts = body_of("x = a + b * c ** d ** e;");
        let StmtKind::Expr(Expr::Assign { value, .. }) = &stmts[0].kind else {
            panic!()
        };
        let Expr::Binary { op: BinaryOp::Add, rhs, .. } = value.as_ref() else {
            panic!("{value:?}")
        };
        let Expr::Binary { op: BinaryOp::Mul, rhs, .. } = rhs.as_ref() else {
            panic!()
        };
        let Expr::Binary { op: BinaryOp::Pow, rhs, .. } = rhs.as_ref() else {
            panic!()
        };
        assert!(matches!(rhs.as_ref(), Expr::Binary { op: BinaryOp::Pow, .. }));
    }

    #[test]
    fn call_forms() {
        let stmts = body_of(
            r#"(bool ok, ) = to.call{value: amount}(""); f({a: 1, b: 2}); x = new uint256[](10); y = type(uint256).max; emit E(1); revert Bad(2);"#,
        );
        let StmtKind::TupleDecl { value, .. } = &stmts[0].kind else {
            panic!()
        };
        let Expr::Call { options, .. } = value else {
            panic!()
        };
        assert_eq!(options[0].0, "value");
        assert!(matches!(
            &stmts[1].kind,
            StmtKind::Expr(Expr::Call { args: CallArgs::Named(_), .. })
        ));
        assert!(matches!(stmts[4].kind, StmtKind::Emit(_)));
        assert!(matches!(stmts[5].kind, StmtKind::Revert(_)));
    }

    #[test]
    fn control_flow() {
        let stmts = body_of(
            "if (a) { b++; } else c--; for (uint i = 0; i < n; i++) { continue; } while (x) break; do { x -= 1; } while (x > 0); unchecked { y += 1; } return;",
        );
        assert!(matches!(stmts[0].kind, StmtKind::If { otherwise: Some(_), .. }));
        assert!(matches!(stmts[1].kind, StmtKind::For { init: Some(_), .. }));
        assert!(matches!(stmts[2].kind, StmtKind::While { .. }));
        assert!(matches!(stmts[3].kind, StmtKind::DoWhile { .. }));
        assert!(matches!(&stmts[4].kind, StmtKind::Block(b) if b.unchecked));
        assert!(matches!(stmts[5].kind, StmtKind::Return(None)));
    }

    #[test]
    fn unsupported_constructs() {
        let cases = [
            "contract A {} contract B is A {}",
            "contract C { function f() public { assembly { } } }",
            "contract C { using L for uint; }",
            "library L {}",
            "interface I {}",
            "import \"x.sol\";",
            "contract C { function f() public { try g() {} catch {} } }",
        ];
        for src in cases {
            match parse(src, "t.sol") {
                Err(FrontendError::Unsupported { .. }) => {}
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn parse_errors_report_expectation() {
        match parse("contract C { uint x }", "t.sol") {
            Err(FrontendError::Parse { expected, found, pos }) => {
                assert_eq!(expected, "`;`");
                assert_eq!(found, "`}`");
                assert_eq!(pos.column, 21);
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse("contract C { uint x; uint x; }", "t.sol"),
            Err(FrontendError::Parse { .. })
        ));
        assert!(matches!(
            parse("contract C {} contract C {}", "t.sol"),
            Err(FrontendError::Parse { .. })
        ));
        assert!(matches!(
            parse("contract C { function f(uint storage x) internal {} }", "t.sol"),
            Err(FrontendError::Parse { .. })
        ));
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = format!(
            "contract C {{ function f() public {{ x = {}1{}; }} }}",
            "(".repeat(10_000),
            ")".repeat(10_000)
        );
        assert!(matches!(parse(&src, "t.sol"), Err(FrontendError::Parse { .. })));
        let src = format!(
            "contract C {{ function f() public {} }}",
            "{".repeat(5_000)
        );
        assert!(parse(&src, "t.sol").is_err());
    }

    #[test]
    fn spans_cover_function() {
        let u = unit("contract C {\n function f() public {\n x = 1;\n }\n}");
        let f = &u.contracts[0].functions[0];
        assert_eq!(f.span, LineSpan { start: 2, end: 4 });
        assert_eq!(f.body.as_ref().unwrap().statements[0].line, 3);
    }
}
