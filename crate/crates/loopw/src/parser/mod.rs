//! Recursive-descent parser producing the syntax tree plus a parallel span
//! tree for diagnostics.
//!
//! The span tree mirrors the shape of the parsed node: entry `i` of a node's
//! children corresponds to child `i` of the syntax node under a fixed
//! numbering (documented on [`SpanTree`]). Keeping positions out of the
//! syntax tree itself means configurations compare structurally, which the
//! stepper relies on.

mod lexer;

pub use lexer::{tokenize, Tok, Token};

use crate::syntax::*;
use num_bigint::BigInt;
use std::fmt;
use std::io;
use std::path::Path;

/// A source position, 1-based.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

/// A parse failure at a position.
#[derive(Clone, Debug)]
pub struct ParseError {
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(span: Span, message: String) -> ParseError {
        ParseError { span, message }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.span.line, self.span.col, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A source file: path for diagnostics, full text.
#[derive(Clone, Debug)]
pub struct SourceFile {
    pub path: String,
    pub text: String,
}

impl SourceFile {
    pub fn new(path: impl Into<String>, text: impl Into<String>) -> SourceFile {
        SourceFile { path: path.into(), text: text.into() }
    }

    pub fn read(path: impl AsRef<Path>) -> io::Result<SourceFile> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Ok(SourceFile::new(path.as_ref().display().to_string(), text))
    }
}

/// Positions for a parsed node and its descendants.
///
/// Child numbering, matching the order the type checker walks:
/// - `Block`: command 0; `UninitVar`: rest 0; `InitVar`/`ConstDecl`/`Alias`:
///   initializer 0, rest 1; `ProcDecl`: body 0, rest 1; `Aliases`:
///   right-hand side `i` per binding, rest last.
/// - `Assign`: expression 0; `Seq`: 0, 1; `If`: condition 0, branches 1, 2;
///   `While`: condition 0, body 1; `For`: bounds 0, 1, body 2; `Declare`:
///   declaration 0; `Call`: callee 0, argument `i` at `i + 1`.
/// - Binary expressions: operands 0, 1; `Not`: operand 0; procedure
///   literals: body 0.
#[derive(Clone, Debug)]
pub struct SpanTree {
    pub span: Span,
    pub children: Vec<SpanTree>,
}

impl SpanTree {
    fn leaf(span: Span) -> SpanTree {
        SpanTree { span, children: Vec::new() }
    }

    fn node(span: Span, children: Vec<SpanTree>) -> SpanTree {
        SpanTree { span, children }
    }

    /// Span of the node at `path`, or of the deepest recorded ancestor.
    pub fn at(&self, path: &[u32]) -> Span {
        let mut node = self;
        for &i in path {
            match node.children.get(i as usize) {
                Some(child) => node = child,
                None => break,
            }
        }
        node.span
    }
}

/// A parsed program: the top-level declaration and its spans.
#[derive(Clone, Debug)]
pub struct Program {
    pub path: String,
    pub dcl: Dcl,
    pub spans: SpanTree,
}

/// Parse a whole source file as a declaration.
pub fn parse_program(src: &SourceFile) -> Result<Program, ParseError> {
    let mut p = Parser::new(&src.text)?;
    let (dcl, spans) = p.dcl()?;
    p.expect_eof()?;
    Ok(Program { path: src.path.clone(), dcl, spans })
}

/// Parse a standalone expression (the whole text must be consumed).
pub fn parse_exp(text: &str) -> Result<Exp, ParseError> {
    let mut p = Parser::new(text)?;
    let (e, _) = p.exp()?;
    p.expect_eof()?;
    Ok(e)
}

/// Parse a standalone command list; the trailing `;` may be omitted.
pub fn parse_cmd(text: &str) -> Result<Cmd, ParseError> {
    let mut p = Parser::new(text)?;
    let (c, _) = p.cmd_list_lenient()?;
    p.expect_eof()?;
    Ok(c)
}

/// Parse a standalone declaration (the whole text must be consumed).
pub fn parse_dcl(text: &str) -> Result<Dcl, ParseError> {
    let mut p = Parser::new(text)?;
    let (d, _) = p.dcl()?;
    p.expect_eof()?;
    Ok(d)
}

type Parsed<T> = Result<(T, SpanTree), ParseError>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    eof: Span,
}

impl Parser {
    fn new(text: &str) -> Result<Parser, ParseError> {
        let toks = tokenize(text)?;
        let eof = toks.last().map_or(Span { line: 1, col: 1 }, |t| Span {
            line: t.span.line,
            col: t.span.col + 1,
        });
        Ok(Parser { toks, pos: 0, eof })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek2(&self) -> Option<&Tok> {
        self.toks.get(self.pos + 1).map(|t| &t.tok)
    }

    fn here(&self) -> Span {
        self.toks.get(self.pos).map_or(self.eof, |t| t.span)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(t) => format!("{t}"),
            None => "end of input".to_string(),
        }
    }

    fn fail<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError::new(
            self.here(),
            format!("expected {expected}, found {}", self.found()),
        ))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<Span, ParseError> {
        if self.peek() == Some(&tok) {
            let span = self.here();
            self.pos += 1;
            Ok(span)
        } else {
            self.fail(expected)
        }
    }

    fn expect_eof(&self) -> Result<(), ParseError> {
        if self.pos == self.toks.len() {
            Ok(())
        } else {
            self.fail("end of input")
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek() {
            Some(Tok::Ident(_)) => {
                let Some(Token { tok: Tok::Ident(name), .. }) = self.bump() else {
                    unreachable!()
                };
                Ok(Ident::new(name))
            }
            _ => self.fail(what),
        }
    }

    // ---- expressions ----

    fn exp(&mut self) -> Parsed<Exp> {
        self.exp_or()
    }

    fn exp_or(&mut self) -> Parsed<Exp> {
        let (mut e, mut t) = self.exp_and()?;
        while self.eat(&Tok::KwOr) {
            let (r, rt) = self.exp_and()?;
            let span = t.span;
            e = Exp::bin(BinOp::Or, e, r);
            t = SpanTree::node(span, vec![t, rt]);
        }
        Ok((e, t))
    }

    fn exp_and(&mut self) -> Parsed<Exp> {
        let (mut e, mut t) = self.exp_not()?;
        while self.eat(&Tok::KwAnd) {
            let (r, rt) = self.exp_not()?;
            let span = t.span;
            e = Exp::bin(BinOp::And, e, r);
            t = SpanTree::node(span, vec![t, rt]);
        }
        Ok((e, t))
    }

    fn exp_not(&mut self) -> Parsed<Exp> {
        if self.peek() == Some(&Tok::KwNot) {
            let span = self.here();
            self.pos += 1;
            let (inner, it) = self.exp_not()?;
            Ok((Exp::not(inner), SpanTree::node(span, vec![it])))
        } else {
            self.exp_cmp()
        }
    }

    fn cmp_op(&self) -> Option<BinOp> {
        match self.peek() {
            Some(Tok::Eq) => Some(BinOp::Eq),
            Some(Tok::Gt) => Some(BinOp::Gt),
            Some(Tok::Lt) => Some(BinOp::Lt),
            _ => None,
        }
    }

    fn exp_cmp(&mut self) -> Parsed<Exp> {
        let (l, lt) = self.exp_add()?;
        let Some(op) = self.cmp_op() else { return Ok((l, lt)) };
        self.pos += 1;
        let (r, rt) = self.exp_add()?;
        if self.cmp_op().is_some() {
            return Err(ParseError::new(
                self.here(),
                "comparison operators do not chain; parenthesize".to_string(),
            ));
        }
        let span = lt.span;
        Ok((Exp::bin(op, l, r), SpanTree::node(span, vec![lt, rt])))
    }

    fn exp_add(&mut self) -> Parsed<Exp> {
        let (mut e, mut t) = self.exp_mul()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Plus,
                Some(Tok::Minus) => BinOp::Minus,
                _ => break,
            };
            self.pos += 1;
            let (r, rt) = self.exp_mul()?;
            let span = t.span;
            e = Exp::bin(op, e, r);
            t = SpanTree::node(span, vec![t, rt]);
        }
        Ok((e, t))
    }

    fn exp_mul(&mut self) -> Parsed<Exp> {
        let (mut e, mut t) = self.exp_primary()?;
        while self.eat(&Tok::Star) {
            let (r, rt) = self.exp_primary()?;
            let span = t.span;
            e = Exp::bin(BinOp::Times, e, r);
            t = SpanTree::node(span, vec![t, rt]);
        }
        Ok((e, t))
    }

    fn exp_primary(&mut self) -> Parsed<Exp> {
        let span = self.here();
        match self.peek() {
            Some(Tok::Num(_)) => {
                let Some(Token { tok: Tok::Num(n), .. }) = self.bump() else {
                    unreachable!()
                };
                Ok((Exp::Val(Value::Int(n)), SpanTree::leaf(span)))
            }
            Some(Tok::Minus) => {
                // a negative numeral; there is no general unary minus
                self.pos += 1;
                match self.peek() {
                    Some(Tok::Num(_)) => {
                        let Some(Token { tok: Tok::Num(n), .. }) = self.bump() else {
                            unreachable!()
                        };
                        Ok((Exp::Val(Value::Int(-n)), SpanTree::leaf(span)))
                    }
                    _ => self.fail("a numeral after '-'"),
                }
            }
            Some(Tok::KwTrue) => {
                self.pos += 1;
                Ok((Exp::bool(true), SpanTree::leaf(span)))
            }
            Some(Tok::KwFalse) => {
                self.pos += 1;
                Ok((Exp::bool(false), SpanTree::leaf(span)))
            }
            Some(Tok::Ident(_)) => {
                let x = self.ident("an identifier")?;
                Ok((Exp::Var(x), SpanTree::leaf(span)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.exp()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Some(Tok::KwProc) => {
                self.pos += 1;
                self.expect(Tok::LParen, "'(' after 'proc'")?;
                let params = self.params()?;
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::KwIs, "'is'")?;
                let (body, bt) = self.dcl()?;
                let v = Value::Proc(ProcVal { params, body: Box::new(body) });
                Ok((Exp::Val(v), SpanTree::node(span, vec![bt])))
            }
            _ => self.fail("an expression"),
        }
    }

    // ---- shared pieces ----

    fn mode(&mut self) -> Result<Mode, ParseError> {
        if self.eat(&Tok::KwIn) {
            if self.eat(&Tok::KwOut) {
                Ok(Mode::InOut)
            } else {
                Ok(Mode::In)
            }
        } else if self.eat(&Tok::KwOut) {
            Ok(Mode::Out)
        } else {
            self.fail("a mode ('in', 'out' or 'in out')")
        }
    }

    fn ty(&mut self) -> Result<Type, ParseError> {
        if self.eat(&Tok::KwInt) {
            Ok(Type::Int)
        } else if self.eat(&Tok::KwBool) {
            Ok(Type::Bool)
        } else if self.eat(&Tok::KwVoid) {
            Ok(Type::Void)
        } else if self.eat(&Tok::KwProc) {
            self.expect(Tok::LParen, "'(' after 'proc'")?;
            let mut params = Vec::new();
            if self.peek() != Some(&Tok::RParen) {
                loop {
                    let m = self.mode()?;
                    let t = self.ty()?;
                    params.push((m, t));
                    if !self.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            self.expect(Tok::RParen, "')'")?;
            Ok(Type::Proc(params))
        } else {
            self.fail("a type ('int', 'bool', 'void' or 'proc(...)')")
        }
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        let mut params = Vec::new();
        if self.peek() == Some(&Tok::RParen) {
            return Ok(params);
        }
        loop {
            let name = self.ident("a parameter name")?;
            self.expect(Tok::Colon, "':'")?;
            let mode = self.mode()?;
            let ty = self.ty()?;
            params.push(Param { name, mode, ty });
            if !self.eat(&Tok::Semi) {
                break;
            }
        }
        Ok(params)
    }

    fn alias_binding(&mut self) -> Parsed<AliasBinding> {
        let name = self.ident("an identifier")?;
        self.expect(Tok::Colon, "':'")?;
        let mode = self.mode()?;
        let ty = self.ty()?;
        self.expect(Tok::Eq, "'='")?;
        let (rhs, rt) = self.exp()?;
        Ok((AliasBinding { name, mode, ty, rhs }, rt))
    }

    // ---- commands ----

    fn starts_cmd(&self) -> bool {
        matches!(
            self.peek(),
            Some(
                Tok::KwNull
                    | Tok::KwIf
                    | Tok::KwWhile
                    | Tok::KwFor
                    | Tok::KwDeclare
                    | Tok::Ident(_)
                    | Tok::Num(_)
                    | Tok::Minus
                    | Tok::KwTrue
                    | Tok::KwFalse
                    | Tok::KwNot
                    | Tok::KwProc
                    | Tok::LParen
            )
        )
    }

    /// `c ;` repeated; stops before a token that cannot start a command.
    fn cmd_list(&mut self) -> Parsed<Cmd> {
        let (c1, t1) = self.cmd_single()?;
        self.expect(Tok::Semi, "';' after command")?;
        if self.starts_cmd() {
            let (c2, t2) = self.cmd_list()?;
            let span = t1.span;
            Ok((Cmd::seq(c1, c2), SpanTree::node(span, vec![t1, t2])))
        } else {
            Ok((c1, t1))
        }
    }

    /// Like [`Parser::cmd_list`] but the final `;` is optional.
    fn cmd_list_lenient(&mut self) -> Parsed<Cmd> {
        let (c1, t1) = self.cmd_single()?;
        if self.eat(&Tok::Semi) && self.starts_cmd() {
            let (c2, t2) = self.cmd_list_lenient()?;
            let span = t1.span;
            return Ok((Cmd::seq(c1, c2), SpanTree::node(span, vec![t1, t2])));
        }
        Ok((c1, t1))
    }

    fn cmd_single(&mut self) -> Parsed<Cmd> {
        let span = self.here();
        match self.peek() {
            Some(Tok::KwNull) => {
                self.pos += 1;
                Ok((Cmd::Null, SpanTree::leaf(span)))
            }
            Some(Tok::KwIf) => {
                self.pos += 1;
                let (cond, ct) = self.exp()?;
                self.expect(Tok::KwThen, "'then'")?;
                let (then_c, tt) = self.cmd_list()?;
                self.expect(Tok::KwElse, "'else' (both branches are required)")?;
                let (else_c, et) = self.cmd_list()?;
                self.expect(Tok::KwEnd, "'end if'")?;
                self.expect(Tok::KwIf, "'if' after 'end'")?;
                Ok((
                    Cmd::If(cond, Box::new(then_c), Box::new(else_c)),
                    SpanTree::node(span, vec![ct, tt, et]),
                ))
            }
            Some(Tok::KwWhile) => {
                self.pos += 1;
                let (cond, ct) = self.exp()?;
                self.expect(Tok::KwLoop, "'loop'")?;
                let (body, bt) = self.cmd_list()?;
                self.expect(Tok::KwEnd, "'end loop'")?;
                self.expect(Tok::KwLoop, "'loop' after 'end'")?;
                Ok((
                    Cmd::While(cond, Box::new(body)),
                    SpanTree::node(span, vec![ct, bt]),
                ))
            }
            Some(Tok::KwFor) => {
                self.pos += 1;
                let x = self.ident("a loop variable")?;
                self.expect(Tok::KwIn, "'in'")?;
                let (lo, lot) = self.exp()?;
                self.expect(Tok::DotDot, "'..'")?;
                let (hi, hit) = self.exp()?;
                self.expect(Tok::KwLoop, "'loop'")?;
                let (body, bt) = self.cmd_list()?;
                self.expect(Tok::KwEnd, "'end loop'")?;
                self.expect(Tok::KwLoop, "'loop' after 'end'")?;
                Ok((
                    Cmd::For(x, lo, hi, Box::new(body)),
                    SpanTree::node(span, vec![lot, hit, bt]),
                ))
            }
            Some(Tok::KwDeclare) => {
                self.pos += 1;
                let (d, dt) = self.dcl()?;
                Ok((Cmd::Declare(Box::new(d)), SpanTree::node(span, vec![dt])))
            }
            Some(Tok::Ident(_)) if self.peek2() == Some(&Tok::Assign) => {
                let x = self.ident("an identifier")?;
                self.pos += 1; // ':='
                let (e, et) = self.exp()?;
                Ok((Cmd::Assign(x, e), SpanTree::node(span, vec![et])))
            }
            _ => {
                // a call: expression followed by an argument list
                let (callee, ct) = self.exp()?;
                self.expect(Tok::LParen, "'(' (argument list)")?;
                let mut args = Vec::new();
                let mut children = vec![ct];
                if self.peek() != Some(&Tok::RParen) {
                    loop {
                        let (a, at) = self.exp()?;
                        args.push(a);
                        children.push(at);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RParen, "')'")?;
                Ok((Cmd::Call(callee, args), SpanTree::node(span, children)))
            }
        }
    }

    // ---- declarations ----

    fn dcl(&mut self) -> Parsed<Dcl> {
        let span = self.here();
        match self.peek() {
            Some(Tok::KwBegin) => {
                self.pos += 1;
                if self.eat(&Tok::KwEnd) {
                    return Ok((Dcl::Empty, SpanTree::leaf(span)));
                }
                let (c, ct) = self.cmd_list()?;
                self.expect(Tok::KwEnd, "'end'")?;
                Ok((Dcl::block(c), SpanTree::node(span, vec![ct])))
            }
            Some(Tok::KwProcedure) => {
                self.pos += 1;
                let p = self.ident("a procedure name")?;
                self.expect(Tok::LParen, "'('")?;
                let params = self.params()?;
                self.expect(Tok::RParen, "')'")?;
                self.expect(Tok::KwIs, "'is'")?;
                let (body, bt) = self.dcl()?;
                self.expect(Tok::Semi, "';' after procedure body")?;
                let (rest, rt) = self.dcl()?;
                Ok((
                    Dcl::ProcDecl(p, params, Box::new(body), Box::new(rest)),
                    SpanTree::node(span, vec![bt, rt]),
                ))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let (b, et) = self.alias_binding()?;
                self.expect(Tok::RParen, "')'")?;
                let (d, dt) = self.dcl()?;
                Ok((
                    Dcl::Alias(b, Box::new(d)),
                    SpanTree::node(span, vec![et, dt]),
                ))
            }
            Some(Tok::LBracket) => {
                self.pos += 1;
                let mut bindings = Vec::new();
                let mut children = Vec::new();
                if self.peek() != Some(&Tok::RBracket) {
                    loop {
                        let (b, et) = self.alias_binding()?;
                        bindings.push(b);
                        children.push(et);
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBracket, "']'")?;
                let (d, dt) = self.dcl()?;
                children.push(dt);
                Ok((Dcl::Aliases(bindings, Box::new(d)), SpanTree::node(span, children)))
            }
            Some(Tok::Ident(_)) => {
                let x = self.ident("an identifier")?;
                self.expect(Tok::Colon, "':' in declaration")?;
                if self.eat(&Tok::KwConstant) {
                    let t = self.ty()?;
                    self.expect(Tok::Assign, "':=' (constants require an initializer)")?;
                    let (e, et) = self.exp()?;
                    self.expect(Tok::Semi, "';' after declaration")?;
                    let (rest, rt) = self.dcl()?;
                    Ok((
                        Dcl::ConstDecl(x, t, e, Box::new(rest)),
                        SpanTree::node(span, vec![et, rt]),
                    ))
                } else {
                    let t = self.ty()?;
                    if self.eat(&Tok::Assign) {
                        let (e, et) = self.exp()?;
                        self.expect(Tok::Semi, "';' after declaration")?;
                        let (rest, rt) = self.dcl()?;
                        Ok((
                            Dcl::InitVar(x, t, e, Box::new(rest)),
                            SpanTree::node(span, vec![et, rt]),
                        ))
                    } else {
                        self.expect(Tok::Semi, "';' after declaration")?;
                        let (rest, rt) = self.dcl()?;
                        Ok((
                            Dcl::UninitVar(x, t, Box::new(rest)),
                            SpanTree::node(span, vec![rt]),
                        ))
                    }
                }
            }
            _ => self.fail("a declaration"),
        }
    }
}

/// Convenience for tests and tools: an integer literal expression.
pub fn int_exp(n: impl Into<BigInt>) -> Exp {
    Exp::int(n)
}
