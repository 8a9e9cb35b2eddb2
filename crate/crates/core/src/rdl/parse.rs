use crate::error::{Error, Result};
use crate::rational;
use crate::timed::Relation;

use super::RdlFormula;

/// Character cursor shared by the boolean and weighted parsers. Columns are
/// 1-based.
pub(crate) struct Cursor<'a> {
    chars: Vec<char>,
    pos: usize,
    _src: &'a str,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, _src: src }
    }

    pub fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    pub fn column(&self) -> usize {
        self.pos + 1
    }

    pub fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Syntax { column: self.column(), message: message.into() })
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn looking_at(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars())
    }

    pub fn eat(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn is_ident_char(c: char) -> bool {
        c.is_alphanumeric() || c == '_' || c == '\''
    }

    /// Next identifier without consuming it.
    pub fn peek_ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        let mut end = start;
        while self.chars.get(end).is_some_and(|&c| Self::is_ident_char(c)) {
            end += 1;
        }
        if end == start || !self.chars[start].is_alphabetic() && self.chars[start] != '_' {
            return None;
        }
        Some(self.chars[start..end].iter().collect())
    }

    pub fn ident(&mut self) -> Result<String> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.chars().count();
                Ok(id)
            }
            None => self.err("expected a variable name"),
        }
    }

    /// Consumes `kw` only as a whole word.
    pub fn keyword(&mut self, kw: &str) -> bool {
        if self.peek_ident().as_deref() == Some(kw) {
            self.pos += kw.chars().count();
            true
        } else {
            false
        }
    }

    /// Raw text up to (excluding) `stop`.
    pub fn until(&mut self, stop: char) -> Result<String> {
        let start = self.pos;
        while let Some(&c) = self.chars.get(self.pos) {
            if c == stop {
                return Ok(self.chars[start..self.pos].iter().collect());
            }
            self.pos += 1;
        }
        self.err(format!("expected `{stop}`"))
    }

    /// A number token such as `3`, `-1/2` or `2.5`.
    pub fn number(&mut self) -> Result<(usize, String)> {
        self.skip_ws();
        let start = self.pos;
        if self.chars.get(self.pos) == Some(&'-') {
            self.pos += 1;
        }
        while self.chars.get(self.pos).is_some_and(|&c| c.is_ascii_digit() || c == '/' || c == '.') {
            self.pos += 1;
        }
        if self.pos == start {
            return self.err("expected a number");
        }
        Ok((start + 1, self.chars[start..self.pos].iter().collect()))
    }

    pub fn relation(&mut self) -> Result<Relation> {
        for (s, r) in [("<=", Relation::Le), (">=", Relation::Ge), ("<", Relation::Lt), (">", Relation::Gt), ("=", Relation::Eq)] {
            if self.eat(s) {
                return Ok(r);
            }
        }
        self.err("expected one of < <= = >= >")
    }
}

/// Parses the concrete syntax. `&` and `all x.` are expanded on the fly.
pub fn parse_rdl(text: &str) -> Result<RdlFormula> {
    let mut c = Cursor::new(text);
    let f = parse_or(&mut c)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(f)
}

pub(crate) fn parse_or(c: &mut Cursor) -> Result<RdlFormula> {
    let mut f = parse_and(c)?;
    while c.eat("|") {
        f = f.or(parse_and(c)?);
    }
    Ok(f)
}

fn parse_and(c: &mut Cursor) -> Result<RdlFormula> {
    let mut f = parse_unary(c)?;
    while c.eat("&") {
        f = f.and(parse_unary(c)?);
    }
    Ok(f)
}

fn parse_unary(c: &mut Cursor) -> Result<RdlFormula> {
    if c.eat("!") {
        return Ok(parse_unary(c)?.not());
    }
    for kw in ["ex", "EX", "all"] {
        if c.keyword(kw) {
            let x = c.ident()?;
            c.expect(".")?;
            let body = parse_or(c)?;
            return Ok(match kw {
                "ex" => RdlFormula::exists(x, body),
                "EX" => RdlFormula::exists_set(x, body),
                _ => RdlFormula::forall(x, body),
            });
        }
    }
    parse_primary(c)
}

fn parse_primary(c: &mut Cursor) -> Result<RdlFormula> {
    if c.eat("(") {
        let f = parse_or(c)?;
        c.expect(")")?;
        return Ok(f);
    }
    if c.keyword("true") {
        return Ok(RdlFormula::True);
    }
    if c.keyword("false") {
        return Ok(RdlFormula::ff());
    }
    if c.eat("P[") {
        let letter = c.until(']')?;
        if letter.is_empty() {
            return c.err("empty letter");
        }
        c.expect("]")?;
        c.expect("(")?;
        let var = c.ident()?;
        c.expect(")")?;
        return Ok(RdlFormula::letter(letter, var));
    }
    if c.eat("dpast[") {
        let rel = c.relation()?;
        let (col, text) = c.number()?;
        let bound = rational::parse_q(&text)
            .ok()
            .and_then(|q| rational::as_u32(&q))
            .ok_or_else(|| Error::Syntax { column: col, message: format!("distance bound `{text}` is not a natural number") })?;
        c.expect("]")?;
        c.expect("(")?;
        let set = c.ident()?;
        c.expect(",")?;
        let var = c.ident()?;
        c.expect(")")?;
        return Ok(RdlFormula::dist(rel, bound, set, var));
    }
    let name = c.ident()?;
    if c.eat("(") {
        let var = c.ident()?;
        c.expect(")")?;
        return Ok(RdlFormula::in_set(name, var));
    }
    if c.eat("<=") {
        let y = c.ident()?;
        return Ok(RdlFormula::leq(name, y));
    }
    c.err("expected `(` or `<=` after a variable")
}
