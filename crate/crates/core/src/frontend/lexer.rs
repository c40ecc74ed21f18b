//! Tokenizer for the supported Solidity subset.
//!
//! Comments and whitespace are dropped; every token keeps the line and
//! column where it starts so later stages can report positions.

use std::fmt;

use super::error::{FrontendError, Position};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Operator,
    Literal(LiteralKind),
    Punctuation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LiteralKind {
    /// Only produced by the parser for `true` / `false`, which lex as keywords.
    Bool,
    Number,
    String,
    HexString,
    UnicodeString,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub text: String,
    pub pos: Position,
}

impl Token {
    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }

    pub fn is_punct(&self, text: &str) -> bool {
        self.is(TokenKind::Punctuation, text)
    }

    pub fn is_op(&self, text: &str) -> bool {
        self.is(TokenKind::Operator, text)
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", self.text)
    }
}

const KEYWORDS: &[&str] = &[
    "abstract",
    "anonymous",
    "assembly",
    "break",
    "calldata",
    "catch",
    "constant",
    "constructor",
    "continue",
    "contract",
    "delete",
    "do",
    "else",
    "emit",
    "enum",
    "error",
    "event",
    "external",
    "fallback",
    "false",
    "for",
    "function",
    "if",
    "immutable",
    "import",
    "indexed",
    "interface",
    "internal",
    "is",
    "library",
    "mapping",
    "memory",
    "modifier",
    "new",
    "override",
    "payable",
    "pragma",
    "private",
    "public",
    "pure",
    "receive",
    "return",
    "returns",
    "storage",
    "struct",
    "true",
    "try",
    "type",
    "unchecked",
    "using",
    "view",
    "virtual",
    "while",
];

/// Longest operators first so that greedy matching picks them.
const OPERATORS: &[&str] = &[
    ">>>=", ">>>", "<<=", ">>=", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=", "-=",
    "*=", "/=", "%=", "|=", "&=", "^=", "=>", ":=", "<<", ">>", "+", "-", "*", "/", "%", "=", "<",
    ">", "!", "~", "&", "|", "^", "?", ":",
];

const PUNCTUATION: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.'];

/// Elementary type names are keywords. Sized integer and byte types are
/// recognized by shape rather than listed.
pub fn is_elementary_type(word: &str) -> bool {
    match word {
        "address" | "bool" | "string" | "bytes" | "byte" | "uint" | "int" | "fixed" | "ufixed"
        | "var" => true,
        _ => {
            sized("uint", word, 8, 256, 8)
                || sized("int", word, 8, 256, 8)
                || sized("bytes", word, 1, 32, 1)
                || fixed_point(word)
        }
    }
}

fn sized(prefix: &str, word: &str, min: u32, max: u32, step: u32) -> bool {
    let Some(digits) = word.strip_prefix(prefix) else {
        return false;
    };
    if digits.is_empty() || digits.starts_with('0') || !digits.bytes().all(|b| b.is_ascii_digit())
    {
        return false;
    }
    match digits.parse::<u32>() {
        Ok(n) => (min..=max).contains(&n) && n % step == 0,
        Err(_) => false,
    }
}

fn fixed_point(word: &str) -> bool {
    let rest = word
        .strip_prefix("ufixed")
        .or_else(|| word.strip_prefix("fixed"));
    let Some(rest) = rest else { return false };
    let mut parts = rest.splitn(2, 'x');
    match (parts.next(), parts.next()) {
        (Some(m), Some(n)) => {
            !m.is_empty()
                && !n.is_empty()
                && m.bytes().all(|b| b.is_ascii_digit())
                && n.bytes().all(|b| b.is_ascii_digit())
        }
        _ => false,
    }
}

fn is_keyword(word: &str) -> bool {
    KEYWORDS.binary_search(&word).is_ok() || is_elementary_type(word)
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

struct Lexer<'a> {
    src: &'a str,
    offset: usize,
    line: u32,
    column: u32,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            offset: 0,
            line: 1,
            column: 1,
        }
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.offset..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek_second(&self) -> Option<char> {
        let mut it = self.rest().chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.offset += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, pos: Position, message: impl Into<String>) -> FrontendError {
        FrontendError::Lex {
            pos,
            message: message.into(),
        }
    }

    fn skip_trivia(&mut self) -> Result<(), FrontendError> {
        loop {
            match (self.peek(), self.peek_second()) {
                (Some(c), _) if c.is_whitespace() => {
                    self.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = self.peek() {
                        if c == '\n' {
                            break;
                        }
                        self.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let start = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.bump() {
                            Some('*') if self.peek() == Some('/') => {
                                self.bump();
                                break;
                            }
                            Some(_) => {}
                            None => return Err(self.error(start, "unterminated block comment")),
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn string_body(&mut self, start: Position) -> Result<String, FrontendError> {
        let quote = self.bump().expect("caller checked for a quote");
        let begin = self.offset;
        loop {
            match self.bump() {
                Some('\\') => {
                    if self.bump().is_none() {
                        break;
                    }
                }
                Some('\n') | None => break,
                Some(c) if c == quote => {
                    let end = self.offset - c.len_utf8();
                    return Ok(format!("{quote}{}{quote}", &self.src[begin..end]));
                }
                Some(_) => {}
            }
        }
        Err(self.error(start, "unterminated string literal"))
    }

    fn number(&mut self) -> String {
        let begin = self.offset;
        if self.peek() == Some('0') && matches!(self.peek_second(), Some('x') | Some('X')) {
            self.bump();
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_hexdigit() || c == '_') {
                self.bump();
            }
            return self.src[begin..self.offset].to_string();
        }
        while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
            self.bump();
        }
        if self.peek() == Some('.') && matches!(self.peek_second(), Some(c) if c.is_ascii_digit())
        {
            self.bump();
            while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
                self.bump();
            }
        }
        if matches!(self.peek(), Some('e') | Some('E')) {
            let mut look = self.rest().chars().skip(1);
            let next = look.next();
            let digit_follows = match next {
                Some('-') => matches!(look.next(), Some(c) if c.is_ascii_digit()),
                Some(c) => c.is_ascii_digit(),
                None => false,
            };
            if digit_follows {
                self.bump();
                if self.peek() == Some('-') {
                    self.bump();
                }
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == '_') {
                    self.bump();
                }
            }
        }
        self.src[begin..self.offset].to_string()
    }

    fn next_token(&mut self) -> Result<Option<Token>, FrontendError> {
        self.skip_trivia()?;
        let pos = self.pos();
        let Some(c) = self.peek() else {
            return Ok(None);
        };

        if is_ident_start(c) {
            let begin = self.offset;
            while matches!(self.peek(), Some(c) if is_ident_continue(c)) {
                self.bump();
            }
            let word = &self.src[begin..self.offset];
            if matches!(word, "hex" | "unicode") && matches!(self.peek(), Some('"') | Some('\''))
            {
                let body = self.string_body(pos)?;
                let kind = if word == "hex" {
                    LiteralKind::HexString
                } else {
                    LiteralKind::UnicodeString
                };
                return Ok(Some(Token {
                    kind: TokenKind::Literal(kind),
                    text: format!("{word}{body}"),
                    pos,
                }));
            }
            let kind = if is_keyword(word) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            };
            return Ok(Some(Token {
                kind,
                text: word.to_string(),
                pos,
            }));
        }

        if c.is_ascii_digit()
            || (c == '.' && matches!(self.peek_second(), Some(d) if d.is_ascii_digit()))
        {
            let text = self.number();
            if matches!(self.peek(), Some(c) if is_ident_start(c)) {
                return Err(self.error(self.pos(), "identifier directly after number literal"));
            }
            return Ok(Some(Token {
                kind: TokenKind::Literal(LiteralKind::Number),
                text,
                pos,
            }));
        }

        if c == '"' || c == '\'' {
            let text = self.string_body(pos)?;
            return Ok(Some(Token {
                kind: TokenKind::Literal(LiteralKind::String),
                text,
                pos,
            }));
        }

        if PUNCTUATION.contains(&c) {
            self.bump();
            return Ok(Some(Token {
                kind: TokenKind::Punctuation,
                text: c.to_string(),
                pos,
            }));
        }

        let rest = self.rest();
        if let Some(op) = OPERATORS.iter().find(|op| rest.starts_with(**op)) {
            for _ in 0..op.len() {
                self.bump();
            }
            return Ok(Some(Token {
                kind: TokenKind::Operator,
                text: (*op).to_string(),
                pos,
            }));
        }

        Err(self.error(pos, format!("illegal character {c:?}")))
    }
}

/// Splits `source` into classified tokens.
pub fn tokenize(source: &str) -> Result<Vec<Token>, FrontendError> {
    let mut lexer = Lexer::new(source);
    let mut tokens = Vec::new();
    while let Some(token) = lexer.next_token()? {
        tokens.push(token);
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<(TokenKind, String)> {
        tokenize(src)
            .unwrap()
            .into_iter()
            .map(|t| (t.kind, t.text))
            .collect()
    }

    #[test]
    fn keyword_list_is_sorted() {
        let mut sorted = KEYWORDS.to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, KEYWORDS);
    }

    #[test]
    fn simple_declaration() {
        assert_eq!(
            kinds("uint256 x;"),
            vec![
                (TokenKind::Keyword, "uint256".to_string()),
                (TokenKind::Identifier, "x".to_string()),
                (TokenKind::Punctuation, ";".to_string()),
            ]
        );
    }

    #[test]
    fn empty_source() {
        assert!(tokenize("").unwrap().is_empty());
        assert!(tokenize("  // only a comment\n /* and another */ ").unwrap().is_empty());
    }

    #[test]
    fn positions_survive_comments() {
        let toks = tokenize("/* a\nb */ x\n  // c\n  y").unwrap();
        assert_eq!(toks[0].pos, Position { line: 2, column: 6 });
        assert_eq!(toks[1].pos, Position { line: 4, column: 3 });
    }

    #[test]
    fn greedy_operators() {
        let ops: Vec<_> = kinds("a >>= b ** c != d++")
            .into_iter()
            .filter(|(k, _)| *k == TokenKind::Operator)
            .map(|(_, t)| t)
            .collect();
        assert_eq!(ops, [">>=", "**", "!=", "++"]);
    }

    #[test]
    fn literals() {
        let toks = kinds(r#"0xFF 1_000 1.5e18 2e-3 "a\"b" 'c' hex"00ff" unicode"hi""#);
        let expect = [
            LiteralKind::Number,
            LiteralKind::Number,
            LiteralKind::Number,
            LiteralKind::Number,
            LiteralKind::String,
            LiteralKind::String,
            LiteralKind::HexString,
            LiteralKind::UnicodeString,
        ];
        assert_eq!(toks.len(), expect.len());
        for ((kind, _), lit) in toks.iter().zip(expect) {
            assert_eq!(*kind, TokenKind::Literal(lit));
        }
        assert_eq!(toks[4].1, r#""a\"b""#);
    }

    #[test]
    fn elementary_types() {
        for ty in ["uint8", "uint256", "int128", "bytes32", "bytes1", "address", "ufixed128x18"] {
            assert!(is_elementary_type(ty), "{ty}");
        }
        for ty in ["uint7", "uint264", "bytes33", "bytes0", "uint08", "integer"] {
            assert!(!is_elementary_type(ty), "{ty}");
        }
    }

    #[test]
    fn errors_carry_positions() {
        match tokenize("x = \"abc") {
            Err(FrontendError::Lex { pos, .. }) => assert_eq!(pos, Position { line: 1, column: 5 }),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(tokenize("/* open"), Err(FrontendError::Lex { .. })));
        assert!(matches!(tokenize("a # b"), Err(FrontendError::Lex { .. })));
        assert!(matches!(tokenize("é"), Err(FrontendError::Lex { .. })));
        assert!(matches!(tokenize("12abc"), Err(FrontendError::Lex { .. })));
    }
}
