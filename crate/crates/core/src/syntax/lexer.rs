use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Pos, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// `Name:` header item name, colon consumed.
    Header(String),
    Ident(String),
    /// `@name`, without the `@`.
    Alias(String),
    Str(String),
    /// Plain natural number: variable reference, state index, count.
    Nat(usize),
    IntLit(BigInt),
    RealLit(BigRational),
    LBrack,
    RBrack,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Bang,
    Amp,
    Bar,
    Dollar,
    Comma,
    Assign,
    Plus,
    Minus,
    Star,
    Lt,
    Le,
    Gt,
    Ge,
    EqEq,
    Ne,
    Implies,
    Iff,
    Body,
    End,
    Abort,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Header(h) => format!("header item `{h}:`"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Alias(s) => format!("alias `@{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Nat(n) => format!("integer `{n}`"),
            Tok::IntLit(n) => format!("integer literal `i{n}`"),
            Tok::RealLit(_) => "real literal".to_string(),
            Tok::Body => "`--BODY--`".to_string(),
            Tok::End => "`--END--`".to_string(),
            Tok::Abort => "`--ABORT--`".to_string(),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", punct_text(other)),
        }
    }
}

fn punct_text(t: &Tok) -> &'static str {
    match t {
        Tok::LBrack => "[",
        Tok::RBrack => "]",
        Tok::LParen => "(",
        Tok::RParen => ")",
        Tok::LBrace => "{",
        Tok::RBrace => "}",
        Tok::Bang => "!",
        Tok::Amp => "&",
        Tok::Bar => "|",
        Tok::Dollar => "$",
        Tok::Comma => ",",
        Tok::Assign => ":=",
        Tok::Plus => "+",
        Tok::Minus => "-",
        Tok::Star => "*",
        Tok::Lt => "<",
        Tok::Le => "<=",
        Tok::Gt => ">",
        Tok::Ge => ">=",
        Tok::EqEq => "==",
        Tok::Ne => "!=",
        Tok::Implies => "->",
        Tok::Iff => "<->",
        _ => "?",
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
    /// Byte range in the source.
    pub start: usize,
    pub end: usize,
}

struct Lexer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    i: usize,
    line: usize,
    col: usize,
}

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn is_alias_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_' || c == b'-'
}

impl<'a> Lexer<'a> {
    fn peek_at(&self, k: usize) -> Option<u8> {
        self.bytes.get(self.i + k).copied()
    }

    fn pos(&self) -> Pos {
        Pos::new(self.line, self.col)
    }

    fn bump(&mut self) -> u8 {
        let c = self.bytes[self.i];
        self.i += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else if (c & 0xC0) != 0x80 {
            self.col += 1;
        }
        c
    }

    fn skip_trivia(&mut self) -> Result<()> {
        loop {
            match self.peek_at(0) {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some(b'/') if self.peek_at(1) == Some(b'*') => {
                    let pos = self.pos();
                    self.bump();
                    self.bump();
                    loop {
                        match self.peek_at(0) {
                            None => return Err(Error::parse(pos, "unterminated comment")),
                            Some(b'*') if self.peek_at(1) == Some(b'/') => {
                                self.bump();
                                self.bump();
                                break;
                            }
                            Some(_) => {
                                self.bump();
                            }
                        }
                    }
                }
                _ => return Ok(()),
            }
        }
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.i..].starts_with(s)
    }

    fn next(&mut self) -> Result<Token> {
        self.skip_trivia()?;
        let pos = self.pos();
        let start = self.i;
        let Some(c) = self.peek_at(0) else {
            return Ok(Token {
                tok: Tok::Eof,
                pos,
                start,
                end: start,
            });
        };
        let tok = match c {
            b'"' => self.string(pos)?,
            b'@' => {
                self.bump();
                let s = self.i;
                while self.peek_at(0).is_some_and(is_alias_char) {
                    self.bump();
                }
                if s == self.i {
                    return Err(Error::parse(pos, "empty alias name after `@`"));
                }
                Tok::Alias(self.src[s..self.i].to_string())
            }
            b'0'..=b'9' => {
                let s = self.i;
                while self.peek_at(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let n = self.src[s..self.i]
                    .parse::<usize>()
                    .map_err(|_| Error::parse(pos, "integer out of range"))?;
                Tok::Nat(n)
            }
            c if is_ident_start(c) => self.word(pos)?,
            b'-' => {
                if self.starts_with("--BODY--") {
                    self.advance(8);
                    Tok::Body
                } else if self.starts_with("--END--") {
                    self.advance(7);
                    Tok::End
                } else if self.starts_with("--ABORT--") {
                    self.advance(9);
                    Tok::Abort
                } else if self.starts_with("->") {
                    self.advance(2);
                    Tok::Implies
                } else {
                    self.bump();
                    Tok::Minus
                }
            }
            b'<' => {
                if self.starts_with("<->") {
                    self.advance(3);
                    Tok::Iff
                } else if self.starts_with("<=") {
                    self.advance(2);
                    Tok::Le
                } else {
                    self.bump();
                    Tok::Lt
                }
            }
            b'>' => {
                if self.starts_with(">=") {
                    self.advance(2);
                    Tok::Ge
                } else {
                    self.bump();
                    Tok::Gt
                }
            }
            b'=' => {
                if self.starts_with("==") {
                    self.advance(2);
                    Tok::EqEq
                } else {
                    return Err(Error::parse(pos, "unexpected `=` (did you mean `==`?)"));
                }
            }
            b'!' => {
                if self.starts_with("!=") {
                    self.advance(2);
                    Tok::Ne
                } else {
                    self.bump();
                    Tok::Bang
                }
            }
            b':' => {
                if self.starts_with(":=") {
                    self.advance(2);
                    Tok::Assign
                } else {
                    return Err(Error::parse(pos, "unexpected `:`"));
                }
            }
            _ => {
                let t = match c {
                    b'[' => Tok::LBrack,
                    b']' => Tok::RBrack,
                    b'(' => Tok::LParen,
                    b')' => Tok::RParen,
                    b'{' => Tok::LBrace,
                    b'}' => Tok::RBrace,
                    b'&' => Tok::Amp,
                    b'|' => Tok::Bar,
                    b'$' => Tok::Dollar,
                    b',' => Tok::Comma,
                    b'+' => Tok::Plus,
                    b'*' => Tok::Star,
                    _ => {
                        let ch = self.src[self.i..].chars().next().unwrap_or('?');
                        return Err(Error::parse(pos, format!("unexpected character {ch:?}")));
                    }
                };
                self.bump();
                t
            }
        };
        Ok(Token {
            tok,
            pos,
            start,
            end: self.i,
        })
    }

    fn advance(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn string(&mut self, pos: Pos) -> Result<Tok> {
        self.bump();
        let mut out = String::new();
        loop {
            let rest = &self.src[self.i..];
            let Some(ch) = rest.chars().next() else {
                return Err(Error::parse(pos, "unterminated string"));
            };
            match ch {
                '"' => {
                    self.bump();
                    return Ok(Tok::Str(out));
                }
                '\\' => {
                    self.bump();
                    let Some(esc) = self.src[self.i..].chars().next() else {
                        return Err(Error::parse(pos, "unterminated string"));
                    };
                    for _ in 0..esc.len_utf8() {
                        self.bump();
                    }
                    match esc {
                        'n' => out.push('\n'),
                        't' => out.push('\t'),
                        other => out.push(other),
                    }
                }
                _ => {
                    for _ in 0..ch.len_utf8() {
                        self.bump();
                    }
                    out.push(ch);
                }
            }
        }
    }

    fn word(&mut self, pos: Pos) -> Result<Tok> {
        // Header names may contain dashes (`AP-type:`); plain identifiers may not.
        let s = self.i;
        let mut j = self.i;
        while j < self.bytes.len() && is_alias_char(self.bytes[j]) {
            j += 1;
        }
        if self.bytes.get(j) == Some(&b':') && self.bytes.get(j + 1) != Some(&b'=') {
            let name = self.src[s..j].to_string();
            self.advance(j - s + 1);
            return Ok(Tok::Header(name));
        }
        while self.peek_at(0).is_some_and(is_ident_char) {
            self.bump();
        }
        let word = &self.src[s..self.i];
        if let Some(digits) = word.strip_prefix('i') {
            if is_canonical_nat(digits) {
                return Ok(Tok::IntLit(digits.parse().expect("digits")));
            }
        }
        if let Some(digits) = word.strip_prefix('r') {
            if is_canonical_nat(digits) && self.peek_at(0) == Some(b'.') {
                self.bump();
                let fs = self.i;
                while self.peek_at(0).is_some_and(|c| c.is_ascii_digit()) {
                    self.bump();
                }
                let frac = &self.src[fs..self.i];
                return Ok(Tok::RealLit(decimal_to_rational(digits, frac)));
            }
            if is_canonical_nat(digits) {
                return Err(Error::parse(pos, format!("real literal `{word}` lacks a decimal point")));
            }
        }
        Ok(Tok::Ident(word.to_string()))
    }
}

fn is_canonical_nat(s: &str) -> bool {
    !s.is_empty()
        && s.bytes().all(|c| c.is_ascii_digit())
        && (s == "0" || !s.starts_with('0'))
}

/// `int.frac` as an exact rational.
pub fn decimal_to_rational(int: &str, frac: &str) -> BigRational {
    let int: BigInt = if int.is_empty() {
        BigInt::zero()
    } else {
        int.parse().expect("digits")
    };
    let mut denom = BigInt::one();
    let mut num = int;
    for d in frac.bytes() {
        num = num * 10 + BigInt::from(d - b'0');
        denom *= 10;
    }
    BigRational::new(num, denom)
}

pub fn tokenize(src: &str) -> Result<Vec<Token>> {
    let mut lx = Lexer {
        src,
        bytes: src.as_bytes(),
        i: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        let t = lx.next()?;
        let eof = t.tok == Tok::Eof;
        out.push(t);
        if eof {
            return Ok(out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn header_names_keep_dashes() {
        assert_eq!(
            toks("AP-type: int v1pp-AP: 1"),
            vec![
                Tok::Header("AP-type".into()),
                Tok::Ident("int".into()),
                Tok::Header("v1pp-AP".into()),
                Tok::Nat(1),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            toks("i0 i12 r2.5 r0."),
            vec![
                Tok::IntLit(0.into()),
                Tok::IntLit(12.into()),
                Tok::RealLit(BigRational::new(5.into(), 2.into())),
                Tok::RealLit(BigRational::zero()),
                Tok::Eof
            ]
        );
        // Leading zeros are not literals.
        assert_eq!(toks("i01"), vec![Tok::Ident("i01".into()), Tok::Eof]);
        assert!(tokenize("r2").is_err());
    }

    #[test]
    fn dashes() {
        assert_eq!(
            toks("--BODY-- - -> --END--"),
            vec![Tok::Body, Tok::Minus, Tok::Implies, Tok::End, Tok::Eof]
        );
        assert_eq!(toks("--i1"), vec![Tok::Minus, Tok::Minus, Tok::IntLit(1.into()), Tok::Eof]);
    }

    #[test]
    fn assignment_vs_header() {
        assert_eq!(
            toks("@x := 0"),
            vec![Tok::Alias("x".into()), Tok::Assign, Tok::Nat(0), Tok::Eof]
        );
    }

    #[test]
    fn error_position() {
        let err = tokenize("HOA: v1\n  # x").unwrap_err();
        assert_eq!(err.to_string(), "2:3: unexpected character '#'");
    }

    #[test]
    fn comments_and_strings() {
        assert_eq!(
            toks("/* c */ \"a \\\"b\\\"\""),
            vec![Tok::Str("a \"b\"".into()), Tok::Eof]
        );
    }
}
