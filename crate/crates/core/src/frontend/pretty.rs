//! Renders a [`SourceUnit`] back to Solidity text.
//!
//! Compound expressions are always parenthesized, so the output re-parses
//! to the same tree regardless of operator precedence.

use std::fmt::{self, Write};

use super::ast::*;

pub fn print_source_unit(unit: &SourceUnit) -> String {
    let mut p = Printer::default();
    p.source_unit(unit);
    p.out
}

pub fn print_expr(expr: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, expr).expect("writing to a String cannot fail");
    s
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::Elementary(name) => f.write_str(name),
            TypeName::UserDefined(path) => f.write_str(&path.join(".")),
            TypeName::Mapping {
                key,
                key_name,
                value,
                value_name,
            } => {
                write!(f, "mapping({key}")?;
                if let Some(n) = key_name {
                    write!(f, " {n}")?;
                }
                write!(f, " => {value}")?;
                if let Some(n) = value_name {
                    write!(f, " {n}")?;
                }
                f.write_str(")")
            }
            TypeName::Array { base, length } => {
                write!(f, "{base}[")?;
                if let Some(len) = length {
                    write_expr(f, len)?;
                }
                f.write_str("]")
            }
        }
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.type_name)?;
        if let Some(loc) = self.location.keyword() {
            write!(f, " {loc}")?;
        }
        if self.indexed {
            f.write_str(" indexed")?;
        }
        if !self.name.is_empty() {
            write!(f, " {}", self.name)?;
        }
        Ok(())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self)
    }
}

fn write_list<W: Write>(w: &mut W, items: &[Parameter]) -> fmt::Result {
    w.write_char('(')?;
    for (i, p) in items.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write!(w, "{p}")?;
    }
    w.write_char(')')
}

fn write_exprs<W: Write>(w: &mut W, items: &[Expr]) -> fmt::Result {
    for (i, e) in items.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write_expr(w, e)?;
    }
    Ok(())
}

fn write_named<W: Write>(w: &mut W, items: &[(String, Expr)]) -> fmt::Result {
    w.write_char('{')?;
    for (i, (name, e)) in items.iter().enumerate() {
        if i > 0 {
            w.write_str(", ")?;
        }
        write!(w, "{name}: ")?;
        write_expr(w, e)?;
    }
    w.write_char('}')
}

fn write_expr<W: Write>(w: &mut W, expr: &Expr) -> fmt::Result {
    match expr {
        Expr::Ident(id) => w.write_str(&id.name),
        Expr::Literal(lit) => {
            w.write_str(&lit.text)?;
            if let Some(unit) = &lit.unit {
                write!(w, " {unit}")?;
            }
            Ok(())
        }
        Expr::ElementaryType(name) => w.write_str(name),
        Expr::Member { base, member } => {
            write_expr(w, base)?;
            write!(w, ".{member}")
        }
        Expr::Index { base, index } => {
            write_expr(w, base)?;
            w.write_char('[')?;
            if let Some(i) = index {
                write_expr(w, i)?;
            }
            w.write_char(']')
        }
        Expr::Slice { base, start, end } => {
            write_expr(w, base)?;
            w.write_char('[')?;
            if let Some(s) = start {
                write_expr(w, s)?;
            }
            w.write_char(':')?;
            if let Some(e) = end {
                write_expr(w, e)?;
            }
            w.write_char(']')
        }
        Expr::Call {
            callee,
            options,
            args,
        } => {
            write_expr(w, callee)?;
            if !options.is_empty() {
                write_named(w, options)?;
            }
            w.write_char('(')?;
            match args {
                CallArgs::Positional(args) => write_exprs(w, args)?,
                CallArgs::Named(args) => write_named(w, args)?,
            }
            w.write_char(')')
        }
        Expr::Unary { op, operand } => {
            w.write_char('(')?;
            w.write_str(op.as_str())?;
            if *op == UnaryOp::Delete {
                w.write_char(' ')?;
            }
            write_expr(w, operand)?;
            w.write_char(')')
        }
        Expr::Postfix { op, operand } => {
            w.write_char('(')?;
            write_expr(w, operand)?;
            w.write_str(op.as_str())?;
            w.write_char(')')
        }
        Expr::Binary { op, lhs, rhs } => {
            w.write_char('(')?;
            write_expr(w, lhs)?;
            write!(w, " {} ", op.as_str())?;
            write_expr(w, rhs)?;
            w.write_char(')')
        }
        Expr::Assign { op, target, value } => {
            w.write_char('(')?;
            write_expr(w, target)?;
            write!(w, " {op} ")?;
            write_expr(w, value)?;
            w.write_char(')')
        }
        Expr::Conditional {
            cond,
            then,
            otherwise,
        } => {
            w.write_char('(')?;
            write_expr(w, cond)?;
            w.write_str(" ? ")?;
            write_expr(w, then)?;
            w.write_str(" : ")?;
            write_expr(w, otherwise)?;
            w.write_char(')')
        }
        Expr::Tuple(slots) => {
            w.write_char('(')?;
            for (i, slot) in slots.iter().enumerate() {
                if i > 0 {
                    w.write_str(", ")?;
                }
                if let Some(e) = slot {
                    write_expr(w, e)?;
                }
            }
            w.write_char(')')
        }
        Expr::ArrayLiteral(items) => {
            w.write_char('[')?;
            write_exprs(w, items)?;
            w.write_char(']')
        }
        Expr::New(ty) => write!(w, "new {ty}"),
        Expr::TypeQuery(ty) => write!(w, "type({ty})"),
    }
}

#[derive(Default)]
struct Printer {
    out: String,
    indent: usize,
}

impl Printer {
    fn line(&mut self, text: &str) {
        for _ in 0..self.indent {
            self.out.push_str("    ");
        }
        self.out.push_str(text);
        self.out.push('\n');
    }

    fn source_unit(&mut self, unit: &SourceUnit) {
        if let Some(pragma) = &unit.pragma {
            self.line(&format!("pragma solidity {pragma};"));
        }
        for def in &unit.definitions {
            self.definition(def);
        }
        for contract in &unit.contracts {
            self.contract(contract);
        }
    }

    fn definition(&mut self, def: &TypeDefinition) {
        match def {
            TypeDefinition::Struct { name, fields } => {
                self.line(&format!("struct {name} {{"));
                self.indent += 1;
                for field in fields {
                    self.line(&format!("{} {};", field.type_name, field.name));
                }
                self.indent -= 1;
                self.line("}");
            }
            TypeDefinition::Enum { name, variants } => {
                self.line(&format!("enum {name} {{ {} }}", variants.join(", ")));
            }
            TypeDefinition::Error { name, parameters } => {
                let mut s = format!("error {name}");
                write_list(&mut s, parameters).unwrap();
                s.push(';');
                self.line(&s);
            }
        }
    }

    fn contract(&mut self, c: &Contract) {
        let prefix = if c.is_abstract { "abstract " } else { "" };
        self.line(&format!("{prefix}contract {} {{", c.name));
        self.indent += 1;
        for def in &c.definitions {
            self.definition(def);
        }
        for var in &c.state_variables {
            let mut s = format!("{} {}", var.type_name, var.visibility);
            if var.is_constant {
                s.push_str(" constant");
            }
            if var.is_immutable {
                s.push_str(" immutable");
            }
            write!(s, " {}", var.name).unwrap();
            if let Some(init) = &var.initializer {
                write!(s, " = {init}").unwrap();
            }
            s.push(';');
            self.line(&s);
        }
        for event in &c.events {
            let mut s = format!("event {}", event.name);
            write_list(&mut s, &event.parameters).unwrap();
            if event.anonymous {
                s.push_str(" anonymous");
            }
            s.push(';');
            self.line(&s);
        }
        for m in &c.modifiers {
            let mut s = format!("modifier {}", m.name);
            write_list(&mut s, &m.parameters).unwrap();
            if m.is_virtual {
                s.push_str(" virtual");
            }
            self.block_with_header(&s, &m.body);
        }
        for f in &c.functions {
            self.function(f);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn function(&mut self, f: &Function) {
        let mut s = match f.kind {
            FunctionKind::Function => format!("function {}", f.name),
            FunctionKind::Constructor => "constructor".to_string(),
            FunctionKind::Fallback => "fallback".to_string(),
            FunctionKind::Receive => "receive".to_string(),
        };
        write_list(&mut s, &f.parameters).unwrap();
        write!(s, " {}", f.visibility).unwrap();
        if f.mutability != Mutability::NonPayable {
            write!(s, " {}", f.mutability).unwrap();
        }
        if f.is_virtual {
            s.push_str(" virtual");
        }
        if f.is_override {
            s.push_str(" override");
        }
        for m in &f.modifiers {
            write!(s, " {}", m.name).unwrap();
            if let Some(args) = &m.arguments {
                s.push('(');
                write_exprs(&mut s, args).unwrap();
                s.push(')');
            }
        }
        if !f.returns.is_empty() {
            s.push_str(" returns ");
            write_list(&mut s, &f.returns).unwrap();
        }
        match &f.body {
            Some(body) => self.block_with_header(&s, body),
            None => {
                s.push(';');
                self.line(&s);
            }
        }
    }

    fn block_with_header(&mut self, header: &str, block: &Block) {
        let open = if block.unchecked { "unchecked {" } else { "{" };
        if header.is_empty() {
            self.line(open);
        } else {
            self.line(&format!("{header} {open}"));
        }
        self.indent += 1;
        for stmt in &block.statements {
            self.stmt(stmt);
        }
        self.indent -= 1;
        self.line("}");
    }

    fn local(decl: &LocalDecl) -> String {
        let mut s = decl.type_name.to_string();
        if let Some(loc) = decl.location.keyword() {
            write!(s, " {loc}").unwrap();
        }
        write!(s, " {}", decl.name).unwrap();
        s
    }

    /// Single-line rendering used for `for` headers.
    fn inline_simple(stmt: &Stmt) -> String {
        match &stmt.kind {
            StmtKind::VarDecl { decl, value } => match value {
                Some(v) => format!("{} = {v};", Self::local(decl)),
                None => format!("{};", Self::local(decl)),
            },
            StmtKind::TupleDecl { decls, value } => {
                let slots: Vec<String> = decls
                    .iter()
                    .map(|d| d.as_ref().map(Self::local).unwrap_or_default())
                    .collect();
                format!("({}) = {value};", slots.join(", "))
            }
            StmtKind::Expr(e) => format!("{e};"),
            _ => unreachable!("for-loop initializers are declarations or expressions"),
        }
    }

    fn stmt(&mut self, stmt: &Stmt) {
        match &stmt.kind {
            StmtKind::Block(b) => self.block_with_header("", b),
            StmtKind::VarDecl { .. } | StmtKind::TupleDecl { .. } | StmtKind::Expr(_) => {
                self.line(&Self::inline_simple(stmt))
            }
            StmtKind::If {
                cond,
                then,
                otherwise,
            } => {
                self.line(&format!("if ({cond})"));
                self.nested_stmt(then);
                if let Some(other) = otherwise {
                    self.line("else");
                    self.nested_stmt(other);
                }
            }
            StmtKind::For {
                init,
                cond,
                step,
                body,
            } => {
                let init = init
                    .as_ref()
                    .map(|s| Self::inline_simple(s))
                    .unwrap_or_else(|| ";".to_string());
                let cond = cond.as_ref().map(|c| c.to_string()).unwrap_or_default();
                let step = step.as_ref().map(|s| s.to_string()).unwrap_or_default();
                self.line(&format!("for ({init} {cond}; {step})"));
                self.nested_stmt(body);
            }
            StmtKind::While { cond, body } => {
                self.line(&format!("while ({cond})"));
                self.nested_stmt(body);
            }
            StmtKind::DoWhile { body, cond } => {
                self.line("do");
                self.nested_stmt(body);
                self.line(&format!("while ({cond});"));
            }
            StmtKind::Return(value) => match value {
                Some(v) => self.line(&format!("return {v};")),
                None => self.line("return;"),
            },
            StmtKind::Emit(call) => self.line(&format!("emit {call};")),
            StmtKind::Revert(call) => self.line(&format!("revert {call};")),
            StmtKind::Break => self.line("break;"),
            StmtKind::Continue => self.line("continue;"),
            StmtKind::Placeholder => self.line("_;"),
        }
    }

    fn nested_stmt(&mut self, stmt: &Stmt) {
        if matches!(stmt.kind, StmtKind::Block(_)) {
            self.stmt(stmt);
        } else {
            self.indent += 1;
            self.stmt(stmt);
            self.indent -= 1;
        }
    }
}

/// Zeroes every line number so trees parsed from differently formatted
/// text can be compared structurally.
pub fn erase_positions(unit: &mut SourceUnit) {
    for contract in &mut unit.contracts {
        for var in &mut contract.state_variables {
            var.line = 0;
            if let Some(init) = &mut var.initializer {
                erase_expr(init);
            }
            erase_type(&mut var.type_name);
        }
        for f in &mut contract.functions {
            f.span = LineSpan::default();
            for m in &mut f.modifiers {
                m.line = 0;
                m.arguments.iter_mut().flatten().for_each(erase_expr);
            }
            if let Some(body) = &mut f.body {
                erase_block(body);
            }
        }
        for m in &mut contract.modifiers {
            m.span = LineSpan::default();
            erase_block(&mut m.body);
        }
    }
}

fn erase_type(ty: &mut TypeName) {
    match ty {
        TypeName::Array { base, length } => {
            erase_type(base);
            if let Some(len) = length {
                erase_expr(len);
            }
        }
        TypeName::Mapping { key, value, .. } => {
            erase_type(key);
            erase_type(value);
        }
        TypeName::Elementary(_) | TypeName::UserDefined(_) => {}
    }
}

fn erase_block(block: &mut Block) {
    block.statements.iter_mut().for_each(erase_stmt);
}

fn erase_stmt(stmt: &mut Stmt) {
    stmt.line = 0;
    match &mut stmt.kind {
        StmtKind::Block(b) => erase_block(b),
        StmtKind::VarDecl { decl, value } => {
            erase_type(&mut decl.type_name);
            if let Some(v) = value {
                erase_expr(v);
            }
        }
        StmtKind::TupleDecl { decls, value } => {
            decls
                .iter_mut()
                .flatten()
                .for_each(|d| erase_type(&mut d.type_name));
            erase_expr(value);
        }
        StmtKind::Expr(e) | StmtKind::Emit(e) | StmtKind::Revert(e) => erase_expr(e),
        StmtKind::If {
            cond,
            then,
            otherwise,
        } => {
            erase_expr(cond);
            erase_stmt(then);
            if let Some(o) = otherwise {
                erase_stmt(o);
            }
        }
        StmtKind::For {
            init,
            cond,
            step,
            body,
        } => {
            if let Some(i) = init {
                erase_stmt(i);
            }
            cond.iter_mut().chain(step.iter_mut()).for_each(erase_expr);
            erase_stmt(body);
        }
        StmtKind::While { cond, body } | StmtKind::DoWhile { body, cond } => {
            erase_expr(cond);
            erase_stmt(body);
        }
        StmtKind::Return(v) => {
            if let Some(v) = v {
                erase_expr(v);
            }
        }
        StmtKind::Break | StmtKind::Continue | StmtKind::Placeholder => {}
    }
}

fn erase_expr(expr: &mut Expr) {
    match expr {
        Expr::Ident(id) => id.line = 0,
        Expr::Literal(_) | Expr::ElementaryType(_) => {}
        Expr::Member { base, .. } => erase_expr(base),
        Expr::Index { base, index } => {
            erase_expr(base);
            if let Some(i) = index {
                erase_expr(i);
            }
        }
        Expr::Slice { base, start, end } => {
            erase_expr(base);
            start.iter_mut().chain(end.iter_mut()).for_each(|e| erase_expr(e));
        }
        Expr::Call {
            callee,
            options,
            args,
        } => {
            erase_expr(callee);
            options.iter_mut().for_each(|(_, e)| erase_expr(e));
            match args {
                CallArgs::Positional(a) => a.iter_mut().for_each(erase_expr),
                CallArgs::Named(a) => a.iter_mut().for_each(|(_, e)| erase_expr(e)),
            }
        }
        Expr::Unary { operand, .. } | Expr::Postfix { operand, .. } => erase_expr(operand),
        Expr::Binary { lhs, rhs, .. } => {
            erase_expr(lhs);
            erase_expr(rhs);
        }
        Expr::Assign { target, value, .. } => {
            erase_expr(target);
            erase_expr(value);
        }
        Expr::Conditional {
            cond,
            then,
            otherwise,
        } => {
            erase_expr(cond);
            erase_expr(then);
            erase_expr(otherwise);
        }
        Expr::Tuple(slots) => slots.iter_mut().flatten().for_each(erase_expr),
        Expr::ArrayLiteral(items) => items.iter_mut().for_each(erase_expr),
        Expr::New(ty) | Expr::TypeQuery(ty) => erase_type(ty),
    }
}
