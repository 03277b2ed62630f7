//! Values on the right of `key = value`: numbers (with `a^b` powers),
//! booleans, bare words, quoted strings, calls like `poisson(2)` and
//! lists like `[1e2, 1e3]`. Calls and lists nest.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Num(f64),
    Bool(bool),
    Word(String),
    Str(String),
    Call(String, Vec<Literal>),
    List(Vec<Literal>),
    /// `name=value` inside a call.
    Named(String, Box<Literal>),
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |items: &[Literal]| items.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ");
        match self {
            Literal::Num(v) => write!(f, "{v}"),
            Literal::Bool(b) => write!(f, "{b}"),
            Literal::Word(w) => f.write_str(w),
            Literal::Str(s) => write!(f, "\"{s}\""),
            Literal::Call(name, args) => write!(f, "{name}({})", join(args)),
            Literal::List(items) => write!(f, "[{}]", join(items)),
            Literal::Named(name, v) => write!(f, "{name}={v}"),
        }
    }
}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn take_while(&mut self, ok: impl Fn(u8) -> bool) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && ok(self.src[self.pos]) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii slice")
    }

    fn items(&mut self, close: u8) -> Result<Vec<Literal>, String> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            out.push(self.value()?);
            if self.eat(close) {
                return Ok(out);
            }
            if !self.eat(b',') {
                return Err(format!("expected ',' or '{}' at column {}", close as char, self.pos + 1));
            }
        }
    }

    fn value(&mut self) -> Result<Literal, String> {
        match self.peek() {
            None => Err("missing value".into()),
            Some(b'[') => {
                self.pos += 1;
                Ok(Literal::List(self.items(b']')?))
            }
            Some(b'"') => {
                self.pos += 1;
                let s = self.take_while(|c| c != b'"').to_string();
                if !self.eat(b'"') {
                    return Err("unterminated string".into());
                }
                Ok(Literal::Str(s))
            }
            Some(c) if c.is_ascii_digit() || c == b'-' || c == b'+' || c == b'.' => {
                let tok = self.take_while(|c| c.is_ascii_alphanumeric() || b".+-^_".contains(&c)).to_string();
                parse_number(&tok).map(Literal::Num)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' || c == b'/' => {
                let word = self.take_while(|c| c.is_ascii_alphanumeric() || b"_./-".contains(&c)).to_string();
                if self.eat(b'(') {
                    return Ok(Literal::Call(word, self.items(b')')?));
                }
                if self.eat(b'=') {
                    return Ok(Literal::Named(word, Box::new(self.value()?)));
                }
                Ok(match word.as_str() {
                    "true" => Literal::Bool(true),
                    "false" => Literal::Bool(false),
                    _ => Literal::Word(word),
                })
            }
            Some(c) => Err(format!("unexpected '{}' at column {}", c as char, self.pos + 1)),
        }
    }
}

fn parse_number(tok: &str) -> Result<f64, String> {
    let bad = || format!("malformed number `{tok}`");
    let tok_clean = tok.replace('_', "");
    if let Some((base, exp)) = tok_clean.split_once('^') {
        let b: f64 = base.parse().map_err(|_| bad())?;
        let e: f64 = exp.parse().map_err(|_| bad())?;
        return Ok(b.powf(e));
    }
    tok_clean.parse().map_err(|_| bad())
}

/// Parses one complete value.
pub fn parse_literal(text: &str) -> Result<Literal, String> {
    let mut c = Cursor { src: text.as_bytes(), pos: 0 };
    let v = c.value()?;
    if c.peek().is_some() {
        return Err(format!("trailing input at column {}", c.pos + 1));
    }
    Ok(v)
}
