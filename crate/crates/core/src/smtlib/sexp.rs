//! S-expression reader for SMT-LIB 2 text.

use std::fmt;

use num_bigint::BigInt;

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Atom {
    Symbol(String),
    Keyword(String),
    Numeral(BigInt),
    Decimal(String),
    Str(String),
    Hex(String),
    Binary(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SExp {
    Atom(Atom, Pos),
    /// A list together with the byte offsets of its parentheses.
    List(Vec<SExp>, Pos, usize),
}

impl SExp {
    pub fn pos(&self) -> Pos {
        match self {
            SExp::Atom(_, p) | SExp::List(_, p, _) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExp::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn as_list(&self) -> Option<&[SExp]> {
        match self {
            SExp::List(items, _, _) => Some(items),
            _ => None,
        }
    }

    /// Head symbol of a list, if it has one.
    pub fn head(&self) -> Option<&str> {
        self.as_list().and_then(|l| l.first()).and_then(SExp::as_symbol)
    }

    /// Byte range of this expression in the source it was read from.
    pub fn span(&self, src: &str) -> (usize, usize) {
        match self {
            SExp::List(_, p, end) => (p.offset, *end),
            SExp::Atom(..) => {
                let start = self.pos().offset;
                let len = atom_len(&src[start..]);
                (start, start + len)
            }
        }
    }
}

fn atom_len(s: &str) -> usize {
    let bytes = s.as_bytes();
    match bytes.first() {
        Some(b'|') => s[1..].find('|').map_or(s.len(), |i| i + 2),
        Some(b'"') => {
            let mut i = 1;
            while i < bytes.len() {
                if bytes[i] == b'"' {
                    if bytes.get(i + 1) == Some(&b'"') {
                        i += 2;
                        continue;
                    }
                    return i + 1;
                }
                i += 1;
            }
            s.len()
        }
        _ => s
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')' || c == ';')
            .unwrap_or(s.len()),
    }
}

impl fmt::Display for SExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SExp::Atom(a, _) => match a {
                Atom::Symbol(s) => f.write_str(&crate::ast::quote_symbol(s)),
                Atom::Keyword(s) => write!(f, ":{s}"),
                Atom::Numeral(n) => write!(f, "{n}"),
                Atom::Decimal(d) => f.write_str(d),
                Atom::Str(s) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
                Atom::Hex(h) => write!(f, "#x{h}"),
                Atom::Binary(b) => write!(f, "#b{b}"),
            },
            SExp::List(items, _, _) => {
                f.write_str("(")?;
                for (i, it) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{it}")?;
                }
                f.write_str(")")
            }
        }
    }
}

struct Reader<'a> {
    src: &'a str,
    bytes: &'a [u8],
    offset: usize,
    line: usize,
    col: usize,
}

impl<'a> Reader<'a> {
    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
            offset: self.offset,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = *self.bytes.get(self.offset)?;
        self.offset += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.offset).copied()
    }

    fn skip_trivia(&mut self) {
        while let Some(b) = self.peek() {
            if b.is_ascii_whitespace() {
                self.bump();
            } else if b == b';' {
                while let Some(b) = self.bump() {
                    if b == b'\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn error(&self, pos: Pos, msg: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }

    fn read(&mut self) -> Result<SExp, ParseError> {
        self.skip_trivia();
        let start = self.pos();
        match self.peek() {
            None => Err(self.error(start, "unexpected end of input")),
            Some(b'(') => {
                self.bump();
                let mut items = Vec::new();
                loop {
                    self.skip_trivia();
                    match self.peek() {
                        None => return Err(self.error(start, "unclosed parenthesis")),
                        Some(b')') => {
                            self.bump();
                            return Ok(SExp::List(items, start, self.offset));
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
            }
            Some(b')') => Err(self.error(start, "unexpected `)`")),
            Some(b'|') => {
                self.bump();
                let body_start = self.offset;
                loop {
                    match self.bump() {
                        None => return Err(self.error(start, "unterminated quoted symbol")),
                        Some(b'|') => break,
                        Some(b'\\') => return Err(self.error(self.pos(), "`\\` in quoted symbol")),
                        Some(_) => {}
                    }
                }
                let name = self.src[body_start..self.offset - 1].to_string();
                Ok(SExp::Atom(Atom::Symbol(name), start))
            }
            Some(b'"') => {
                self.bump();
                let mut s = String::new();
                let mut chunk = self.offset;
                loop {
                    match self.bump() {
                        None => return Err(self.error(start, "unterminated string literal")),
                        Some(b'"') if self.peek() == Some(b'"') => {
                            s.push_str(&self.src[chunk..self.offset]);
                            self.bump();
                            chunk = self.offset;
                        }
                        Some(b'"') => {
                            s.push_str(&self.src[chunk..self.offset - 1]);
                            break;
                        }
                        Some(_) => {}
                    }
                }
                Ok(SExp::Atom(Atom::Str(s), start))
            }
            Some(_) => {
                let len = atom_len(&self.src[self.offset..]);
                let text = &self.src[self.offset..self.offset + len];
                for _ in 0..len {
                    self.bump();
                }
                Ok(SExp::Atom(classify(text, start, self)?, start))
            }
        }
    }
}

fn classify(text: &str, pos: Pos, r: &Reader<'_>) -> Result<Atom, ParseError> {
    if let Some(k) = text.strip_prefix(':') {
        return Ok(Atom::Keyword(k.to_string()));
    }
    if let Some(h) = text.strip_prefix("#x") {
        return Ok(Atom::Hex(h.to_string()));
    }
    if let Some(b) = text.strip_prefix("#b") {
        return Ok(Atom::Binary(b.to_string()));
    }
    if text.starts_with(|c: char| c.is_ascii_digit()) {
        if text.bytes().all(|b| b.is_ascii_digit()) {
            if text.len() > 1 && text.starts_with('0') {
                return Err(r.error(pos, format!("numeral with leading zero `{text}`")));
            }
            return Ok(Atom::Numeral(text.parse().expect("digits")));
        }
        let mut parts = text.splitn(2, '.');
        let (int, frac) = (parts.next().unwrap_or(""), parts.next().unwrap_or(""));
        if !frac.is_empty()
            && int.bytes().all(|b| b.is_ascii_digit())
            && frac.bytes().all(|b| b.is_ascii_digit())
        {
            return Ok(Atom::Decimal(text.to_string()));
        }
        return Err(r.error(pos, format!("malformed numeral `{text}`")));
    }
    Ok(Atom::Symbol(text.to_string()))
}

/// Reads every top-level s-expression in `src`.
pub fn read_all(src: &str) -> Result<Vec<SExp>, ParseError> {
    let mut r = Reader {
        src,
        bytes: src.as_bytes(),
        offset: 0,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        r.skip_trivia();
        if r.peek().is_none() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}
