//! Tokenizer. Input is UTF-8; outside of `--` comments only ASCII is
//! meaningful. `__` is reserved for machine-generated names and rejected in
//! source identifiers. The range token may be written `..` or `. .`.

use super::{ParseError, Span};
use num_bigint::BigInt;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Tok {
    Ident(String),
    Num(BigInt),
    // keywords
    KwNull,
    KwIf,
    KwThen,
    KwElse,
    KwEnd,
    KwWhile,
    KwLoop,
    KwFor,
    KwIn,
    KwOut,
    KwDeclare,
    KwBegin,
    KwProcedure,
    KwIs,
    KwConstant,
    KwProc,
    KwInt,
    KwBool,
    KwVoid,
    KwTrue,
    KwFalse,
    KwNot,
    KwAnd,
    KwOr,
    // symbols
    Assign,
    Colon,
    Semi,
    Comma,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Plus,
    Minus,
    Star,
    Eq,
    Gt,
    Lt,
    DotDot,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => return write!(f, "identifier '{s}'"),
            Tok::Num(n) => return write!(f, "numeral '{n}'"),
            _ => {}
        }
        let s = match self {
            Tok::KwNull => "'null'",
            Tok::KwIf => "'if'",
            Tok::KwThen => "'then'",
            Tok::KwElse => "'else'",
            Tok::KwEnd => "'end'",
            Tok::KwWhile => "'while'",
            Tok::KwLoop => "'loop'",
            Tok::KwFor => "'for'",
            Tok::KwIn => "'in'",
            Tok::KwOut => "'out'",
            Tok::KwDeclare => "'declare'",
            Tok::KwBegin => "'begin'",
            Tok::KwProcedure => "'procedure'",
            Tok::KwIs => "'is'",
            Tok::KwConstant => "'constant'",
            Tok::KwProc => "'proc'",
            Tok::KwInt => "'int'",
            Tok::KwBool => "'bool'",
            Tok::KwVoid => "'void'",
            Tok::KwTrue => "'true'",
            Tok::KwFalse => "'false'",
            Tok::KwNot => "'not'",
            Tok::KwAnd => "'and'",
            Tok::KwOr => "'or'",
            Tok::Assign => "':='",
            Tok::Colon => "':'",
            Tok::Semi => "';'",
            Tok::Comma => "','",
            Tok::LParen => "'('",
            Tok::RParen => "')'",
            Tok::LBracket => "'['",
            Tok::RBracket => "']'",
            Tok::Plus => "'+'",
            Tok::Minus => "'-'",
            Tok::Star => "'*'",
            Tok::Eq => "'='",
            Tok::Gt => "'>'",
            Tok::Lt => "'<'",
            Tok::DotDot => "'..'",
            Tok::Ident(_) | Tok::Num(_) => unreachable!(),
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "null" => Tok::KwNull,
        "if" => Tok::KwIf,
        "then" => Tok::KwThen,
        "else" => Tok::KwElse,
        "end" => Tok::KwEnd,
        "while" => Tok::KwWhile,
        "loop" => Tok::KwLoop,
        "for" => Tok::KwFor,
        "in" => Tok::KwIn,
        "out" => Tok::KwOut,
        "declare" => Tok::KwDeclare,
        "begin" => Tok::KwBegin,
        "procedure" => Tok::KwProcedure,
        "is" => Tok::KwIs,
        "constant" => Tok::KwConstant,
        "proc" => Tok::KwProc,
        "int" => Tok::KwInt,
        "bool" => Tok::KwBool,
        "void" => Tok::KwVoid,
        "true" => Tok::KwTrue,
        "false" => Tok::KwFalse,
        "not" => Tok::KwNot,
        "and" => Tok::KwAnd,
        "or" => Tok::KwOr,
        _ => return None,
    })
}

struct Scanner<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: u32,
    col: u32,
}

impl<'a> Scanner<'a> {
    fn new(text: &'a str) -> Scanner<'a> {
        Scanner { chars: text.chars().peekable(), line: 1, col: 1 }
    }

    fn span(&self) -> Span {
        Span { line: self.line, col: self.col }
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().copied()
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

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('-') => {
                    // only a comment if a second '-' follows
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if ahead.peek() == Some(&'-') {
                        while let Some(c) = self.peek() {
                            if c == '\n' {
                                break;
                            }
                            self.bump();
                        }
                    } else {
                        return;
                    }
                }
                _ => return,
            }
        }
    }
}

/// Split source text into tokens with positions (1-based line and column).
pub fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut sc = Scanner::new(text);
    let mut out = Vec::new();
    loop {
        sc.skip_trivia();
        let span = sc.span();
        let c = match sc.peek() {
            None => break,
            Some(c) => c,
        };
        let tok = if c.is_ascii_alphabetic() {
            let mut word = String::new();
            while let Some(c) = sc.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    sc.bump();
                } else {
                    break;
                }
            }
            if word.contains("__") {
                return Err(ParseError::new(
                    span,
                    format!("identifier '{word}' contains '__', which is reserved"),
                ));
            }
            keyword(&word).unwrap_or(Tok::Ident(word))
        } else if c.is_ascii_digit() {
            let mut digits = String::new();
            while let Some(c) = sc.peek() {
                if c.is_ascii_digit() {
                    digits.push(c);
                    sc.bump();
                } else {
                    break;
                }
            }
            Tok::Num(digits.parse::<BigInt>().expect("digit run parses"))
        } else {
            sc.bump();
            match c {
                ':' => {
                    if sc.peek() == Some('=') {
                        sc.bump();
                        Tok::Assign
                    } else {
                        Tok::Colon
                    }
                }
                '.' => {
                    // the range token; whitespace may separate the two dots
                    while sc.peek().is_some_and(|c| c.is_whitespace()) {
                        sc.bump();
                    }
                    if sc.peek() == Some('.') {
                        sc.bump();
                        Tok::DotDot
                    } else {
                        return Err(ParseError::new(
                            span,
                            "expected a second '.' to form the range token '..'".to_string(),
                        ));
                    }
                }
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                '>' => Tok::Gt,
                '<' => Tok::Lt,
                other => {
                    return Err(ParseError::new(
                        span,
                        format!("unexpected character '{other}'"),
                    ));
                }
            }
        };
        out.push(Token { tok, span });
    }
    Ok(out)
}
