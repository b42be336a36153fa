//! Concrete syntax for `.coh` corpus files.
//!
//! ```text
//! program  := decl*
//! decl     := "coh" IDENT tele ":" ty
//!           | "def" IDENT tele ":" ty ":=" tm
//! tele     := ("(" IDENT+ ":" ty ")")*
//! ty       := "*" | tm "=" tm | tm "=[" ty "]" tm
//! tm       := IDENT | IDENT "(" tm ("," tm)* ")"
//! IDENT    := [A-Za-z_][A-Za-z0-9_'-]*
//! ```
//!
//! `--` starts a line comment. The base of an equality is optional in source
//! and inferred from the left endpoint during checking; `u =[T] v` is the
//! explicit form. Applications `name(e1, ..., ek)` keep the name reference;
//! resolution against the symbol table happens in the checker.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::syntax::Name;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

/// A half-open region of a source file, 1-based.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub start: Pos,
    pub end: Pos,
}

impl SourceSpan {
    pub fn merge(&self, other: &SourceSpan) -> SourceSpan {
        SourceSpan {
            file: self.file.clone(),
            start: self.start.min(other.start),
            end: self.end.max(other.end),
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.start.line, self.start.col)
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Program {
    pub decls: Vec<Decl>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Decl {
    Coh(CohDeclSrc),
    Def(DefDeclSrc),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Coh(d) => &d.name,
            Decl::Def(d) => &d.name,
        }
    }

    pub fn span(&self) -> &SourceSpan {
        match self {
            Decl::Coh(d) => &d.span,
            Decl::Def(d) => &d.span,
        }
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct CohDeclSrc {
    pub name: Name,
    pub tele: Vec<TeleGroup>,
    pub ty: STy,
    pub span: SourceSpan,
}

#[derive(Clone, PartialEq, Debug)]
pub struct DefDeclSrc {
    pub name: Name,
    pub tele: Vec<TeleGroup>,
    pub ty: STy,
    pub body: STm,
    pub span: SourceSpan,
}

/// One parenthesized telescope group `(x y : T)`.
#[derive(Clone, PartialEq, Debug)]
pub struct TeleGroup {
    pub names: Vec<(Name, SourceSpan)>,
    pub ty: STy,
}

#[derive(Clone, PartialEq, Debug)]
pub struct STy {
    pub kind: STyKind,
    pub span: SourceSpan,
}

#[derive(Clone, PartialEq, Debug)]
pub enum STyKind {
    Star,
    Hom {
        base: Option<Box<STy>>,
        lhs: STm,
        rhs: STm,
    },
}

#[derive(Clone, PartialEq, Debug)]
pub struct STm {
    pub kind: STmKind,
    pub span: SourceSpan,
}

#[derive(Clone, PartialEq, Debug)]
pub enum STmKind {
    Ident(Name),
    App(Name, Vec<STm>),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: {message}")]
    Syntax {
        span: SourceSpan,
        message: String,
        expected: Vec<String>,
    },
    #[error("{span}: duplicate declaration {name}")]
    DuplicateDecl { name: Name, span: SourceSpan },
    #[error("{file}: input is not valid UTF-8")]
    InvalidUtf8 { file: String },
}

// ---------------------------------------------------------------------------
// Lexer

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    KwCoh,
    KwDef,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    ColonEq,
    Comma,
    Star,
    Eq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier {s:?}"),
            Tok::KwCoh => "\"coh\"".into(),
            Tok::KwDef => "\"def\"".into(),
            Tok::LParen => "\"(\"".into(),
            Tok::RParen => "\")\"".into(),
            Tok::LBracket => "\"[\"".into(),
            Tok::RBracket => "\"]\"".into(),
            Tok::Colon => "\":\"".into(),
            Tok::ColonEq => "\":=\"".into(),
            Tok::Comma => "\",\"".into(),
            Tok::Star => "\"*\"".into(),
            Tok::Eq => "\"=\"".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    file: &'a str,
    line: u32,
    col: u32,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str, file: &'a str) -> Lexer<'a> {
        Lexer {
            chars: text.chars().peekable(),
            file,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn span(&self, start: Pos) -> SourceSpan {
        SourceSpan {
            file: self.file.to_string(),
            start,
            end: self.pos(),
        }
    }

    fn error(&self, start: Pos, message: String) -> ParseError {
        ParseError::Syntax {
            span: self.span(start),
            message,
            expected: Vec::new(),
        }
    }

    fn tokens(mut self) -> Result<Vec<(Tok, SourceSpan)>, ParseError> {
        let mut out = Vec::new();
        loop {
            // skip whitespace and comments
            loop {
                match self.chars.peek() {
                    Some(c) if c.is_whitespace() => {
                        self.bump();
                    }
                    Some('-') => {
                        let mut look = self.chars.clone();
                        look.next();
                        if look.peek() == Some(&'-') {
                            while let Some(c) = self.chars.peek() {
                                if *c == '\n' {
                                    break;
                                }
                                self.bump();
                            }
                        } else {
                            break;
                        }
                    }
                    _ => break,
                }
            }
            let start = self.pos();
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, self.span(start)));
                return Ok(out);
            };
            let tok = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                ':' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::ColonEq
                    } else {
                        Tok::Colon
                    }
                }
                c if is_ident_start(c) => {
                    let mut s = String::from(c);
                    loop {
                        match self.chars.peek() {
                            Some(&c) if is_ident_continue(c) => {
                                s.push(c);
                                self.bump();
                            }
                            // '-' continues an identifier unless it opens a
                            // "--" comment
                            Some('-') => {
                                let mut look = self.chars.clone();
                                look.next();
                                match look.peek() {
                                    Some(&c2) if is_ident_continue(c2) => {
                                        s.push('-');
                                        self.bump();
                                    }
                                    _ => break,
                                }
                            }
                            _ => break,
                        }
                    }
                    match s.as_str() {
                        "coh" => Tok::KwCoh,
                        "def" => Tok::KwDef,
                        _ => Tok::Ident(s),
                    }
                }
                c => {
                    return Err(self.error(start, format!("unexpected character {c:?}")));
                }
            };
            out.push((tok, self.span(start)));
        }
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser {
    toks: Vec<(Tok, SourceSpan)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_span(&self) -> &SourceSpan {
        &self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, SourceSpan) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expected(&self, what: &[&str]) -> ParseError {
        ParseError::Syntax {
            span: self.peek_span().clone(),
            message: format!(
                "expected {}, found {}",
                what.join(" or "),
                self.peek().describe()
            ),
            expected: what.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<SourceSpan, ParseError> {
        if self.peek() == &tok {
            Ok(self.next().1)
        } else {
            Err(self.expected(&[what]))
        }
    }

    fn ident(&mut self, what: &str) -> Result<(Name, SourceSpan), ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let (_, span) = self.next();
                let name = Name::new(s).map_err(|e| ParseError::Syntax {
                    span: span.clone(),
                    message: e.to_string(),
                    expected: vec![what.to_string()],
                })?;
                Ok((name, span))
            }
            _ => Err(self.expected(&[what])),
        }
    }

    fn program(&mut self) -> Result<Program, ParseError> {
        let mut decls: Vec<Decl> = Vec::new();
        loop {
            match self.peek() {
                Tok::Eof => break,
                Tok::KwCoh | Tok::KwDef => {
                    let d = self.decl()?;
                    if decls.iter().any(|e| e.name() == d.name()) {
                        return Err(ParseError::DuplicateDecl {
                            name: d.name().clone(),
                            span: d.span().clone(),
                        });
                    }
                    decls.push(d);
                }
                _ => return Err(self.expected(&["\"coh\"", "\"def\""])),
            }
        }
        Ok(Program { decls })
    }

    fn decl(&mut self) -> Result<Decl, ParseError> {
        let (kw, kw_span) = self.next();
        let (name, _) = self.ident("declaration name")?;
        let mut tele = Vec::new();
        while self.peek() == &Tok::LParen {
            tele.push(self.tele_group()?);
        }
        self.expect(Tok::Colon, "\":\"")?;
        let ty = self.ty()?;
        match kw {
            Tok::KwCoh => {
                let span = kw_span.merge(&ty.span);
                Ok(Decl::Coh(CohDeclSrc {
                    name,
                    tele,
                    ty,
                    span,
                }))
            }
            Tok::KwDef => {
                self.expect(Tok::ColonEq, "\":=\"")?;
                let body = self.tm()?;
                let span = kw_span.merge(&body.span);
                Ok(Decl::Def(DefDeclSrc {
                    name,
                    tele,
                    ty,
                    body,
                    span,
                }))
            }
            _ => unreachable!(),
        }
    }

    fn tele_group(&mut self) -> Result<TeleGroup, ParseError> {
        self.expect(Tok::LParen, "\"(\"")?;
        let mut names = vec![self.ident("variable name")?];
        while matches!(self.peek(), Tok::Ident(_)) {
            names.push(self.ident("variable name")?);
        }
        self.expect(Tok::Colon, "\":\"")?;
        let ty = self.ty()?;
        self.expect(Tok::RParen, "\")\"")?;
        Ok(TeleGroup { names, ty })
    }

    fn ty(&mut self) -> Result<STy, ParseError> {
        if self.peek() == &Tok::Star {
            let (_, span) = self.next();
            return Ok(STy {
                kind: STyKind::Star,
                span,
            });
        }
        let lhs = self.tm()?;
        self.expect(Tok::Eq, "\"=\"")?;
        let base = if self.peek() == &Tok::LBracket {
            self.next();
            let b = self.ty()?;
            self.expect(Tok::RBracket, "\"]\"")?;
            Some(Box::new(b))
        } else {
            None
        };
        let rhs = self.tm()?;
        let span = lhs.span.merge(&rhs.span);
        Ok(STy {
            kind: STyKind::Hom { base, lhs, rhs },
            span,
        })
    }

    fn tm(&mut self) -> Result<STm, ParseError> {
        let (head, head_span) = self.ident("term")?;
        if self.peek() != &Tok::LParen {
            return Ok(STm {
                kind: STmKind::Ident(head),
                span: head_span,
            });
        }
        self.next();
        let mut args = vec![self.tm()?];
        while self.peek() == &Tok::Comma {
            self.next();
            args.push(self.tm()?);
        }
        let close = self.expect(Tok::RParen, "\")\"")?;
        Ok(STm {
            kind: STmKind::App(head, args),
            span: head_span.merge(&close),
        })
    }
}

/// Parses a `.coh` program. Never panics; all failures are `ParseError`s.
pub fn parse_program(text: &str, file: &str) -> Result<Program, ParseError> {
    let toks = Lexer::new(text, file).tokens()?;
    let mut p = Parser { toks, at: 0 };
    p.program()
}

/// Byte-level entry point: rejects invalid UTF-8 with a `ParseError`.
pub fn parse_bytes(bytes: &[u8], file: &str) -> Result<Program, ParseError> {
    let text = std::str::from_utf8(bytes).map_err(|_| ParseError::InvalidUtf8 {
        file: file.to_string(),
    })?;
    parse_program(text, file)
}

// ---------------------------------------------------------------------------
// Printer

/// Deterministic printer; `parse_program(print_program(p))` equals `p` up to
/// spans.
pub fn print_program(p: &Program) -> String {
    let mut out = String::new();
    for (i, d) in p.decls.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        print_decl(d, &mut out);
    }
    out
}

fn print_decl(d: &Decl, out: &mut String) {
    match d {
        Decl::Coh(c) => {
            out.push_str("coh ");
            out.push_str(c.name.as_str());
            print_tele(&c.tele, out);
            out.push_str(" : ");
            print_ty(&c.ty, out);
            out.push('\n');
        }
        Decl::Def(def) => {
            out.push_str("def ");
            out.push_str(def.name.as_str());
            print_tele(&def.tele, out);
            out.push_str(" : ");
            print_ty(&def.ty, out);
            out.push_str(" := ");
            print_tm(&def.body, out);
            out.push('\n');
        }
    }
}

fn print_tele(tele: &[TeleGroup], out: &mut String) {
    for g in tele {
        out.push_str(" (");
        for (i, (n, _)) in g.names.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(n.as_str());
        }
        out.push_str(" : ");
        print_ty(&g.ty, out);
        out.push(')');
    }
}

fn print_ty(ty: &STy, out: &mut String) {
    match &ty.kind {
        STyKind::Star => out.push('*'),
        STyKind::Hom { base, lhs, rhs } => {
            print_tm(lhs, out);
            match base {
                None => out.push_str(" = "),
                Some(b) => {
                    out.push_str(" =[");
                    print_ty(b, out);
                    out.push_str("] ");
                }
            }
            print_tm(rhs, out);
        }
    }
}

fn print_tm(tm: &STm, out: &mut String) {
    match &tm.kind {
        STmKind::Ident(n) => out.push_str(n.as_str()),
        STmKind::App(head, args) => {
            out.push_str(head.as_str());
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                print_tm(a, out);
            }
            out.push(')');
        }
    }
}

// ---------------------------------------------------------------------------
// Span-insensitive AST equality (roundtrip checks)

pub fn ast_eq(a: &Program, b: &Program) -> bool {
    a.decls.len() == b.decls.len()
        && a.decls.iter().zip(&b.decls).all(|(x, y)| decl_eq(x, y))
}

fn decl_eq(a: &Decl, b: &Decl) -> bool {
    match (a, b) {
        (Decl::Coh(a), Decl::Coh(b)) => {
            a.name == b.name && tele_eq(&a.tele, &b.tele) && ty_eq(&a.ty, &b.ty)
        }
        (Decl::Def(a), Decl::Def(b)) => {
            a.name == b.name
                && tele_eq(&a.tele, &b.tele)
                && ty_eq(&a.ty, &b.ty)
                && tm_eq(&a.body, &b.body)
        }
        _ => false,
    }
}

fn tele_eq(a: &[TeleGroup], b: &[TeleGroup]) -> bool {
    a.len() == b.len()
        && a.iter().zip(b).all(|(x, y)| {
            x.names.len() == y.names.len()
                && x.names
                    .iter()
                    .zip(&y.names)
                    .all(|((n, _), (m, _))| n == m)
                && ty_eq(&x.ty, &y.ty)
        })
}

fn ty_eq(a: &STy, b: &STy) -> bool {
    match (&a.kind, &b.kind) {
        (STyKind::Star, STyKind::Star) => true,
        (
            STyKind::Hom {
                base: ba,
                lhs: la,
                rhs: ra,
            },
            STyKind::Hom {
                base: bb,
                lhs: lb,
                rhs: rb,
            },
        ) => {
            match (ba, bb) {
                (None, None) => true,
                (Some(x), Some(y)) => ty_eq(x, y),
                _ => false,
            }
        }
        .then(|| tm_eq(la, lb) && tm_eq(ra, rb))
        .unwrap_or(false),
        _ => false,
    }
}

fn tm_eq(a: &STm, b: &STm) -> bool {
    match (&a.kind, &b.kind) {
        (STmKind::Ident(x), STmKind::Ident(y)) => x == y,
        (STmKind::App(x, xs), STmKind::App(y, ys)) => {
            x == y && xs.len() == ys.len() && xs.iter().zip(ys).all(|(u, v)| tm_eq(u, v))
        }
        _ => false,
    }
}
