use crate::error::{Error, Result};
use crate::monoid::{TimedPvMonoid, Weight};
use crate::rdl::{in_rdl_past, parse_or as parse_rdl_or, Cursor, RdlFormula};

use super::WrdlFormula;

/// Parses `B(β)`, constants, `|`, `&`, `ex x.`, `EX X.` and `all x.(φ1, φ2)`.
/// Boolean payloads must avoid quantifying their own distance variables.
pub fn parse_wrdl(text: &str, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    let mut c = Cursor::new(text);
    let f = parse_or(&mut c, m)?;
    if !c.at_end() {
        return c.err("unexpected trailing input");
    }
    Ok(f)
}

fn parse_or(c: &mut Cursor, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    let mut f = parse_and(c, m)?;
    while c.eat("|") {
        f = f.or(parse_and(c, m)?);
    }
    Ok(f)
}

fn parse_and(c: &mut Cursor, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    let mut f = parse_unary(c, m)?;
    while c.eat("&") {
        f = f.and(parse_unary(c, m)?);
    }
    Ok(f)
}

fn parse_unary(c: &mut Cursor, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    if c.keyword("ex") {
        let x = c.ident()?;
        c.expect(".")?;
        return Ok(WrdlFormula::exists(x, parse_or(c, m)?));
    }
    if c.keyword("EX") {
        let x = c.ident()?;
        c.expect(".")?;
        return Ok(WrdlFormula::exists_set(x, parse_or(c, m)?));
    }
    if c.keyword("all") {
        let x = c.ident()?;
        c.expect(".")?;
        c.expect("(")?;
        let first = parse_or(c, m)?;
        c.expect(",")?;
        let second = parse_or(c, m)?;
        c.expect(")")?;
        return Ok(WrdlFormula::forall(x, first, second));
    }
    parse_primary(c, m)
}

fn parse_primary(c: &mut Cursor, m: &TimedPvMonoid) -> Result<WrdlFormula> {
    if c.eat("(") {
        let f = parse_or(c, m)?;
        c.expect(")")?;
        return Ok(f);
    }
    if c.keyword("inf") {
        return Ok(WrdlFormula::Const(Weight::Inf));
    }
    if c.keyword("B") {
        let col = c.column();
        c.expect("(")?;
        let beta = parse_rdl_or(c)?;
        c.expect(")")?;
        // A first-order binder reusing a distance set's name is treated as
        // quantifying that set.
        let d = beta.distance_sets();
        let mut rebinds = false;
        beta.walk(&mut |f| rebinds |= matches!(f, RdlFormula::ExistsFO(x, _) if d.contains(x)));
        if rebinds || !in_rdl_past(&beta) {
            return Err(Error::Fragment(format!(
                "boolean formula at column {col} quantifies one of its distance variables: {beta}"
            )));
        }
        return Ok(WrdlFormula::Bool(beta));
    }
    if c.peek().is_some_and(|ch| ch.is_ascii_digit() || ch == '-') {
        let (col, text) = c.number()?;
        let w = Weight::parse(&text).map_err(|_| Error::Syntax { column: col, message: format!("bad constant `{text}`") })?;
        if !m.base.in_domain(&w) {
            return Err(Error::BadWeight(text, m.id().to_string()));
        }
        return Ok(WrdlFormula::Const(w));
    }
    c.err("expected `B(`, a constant, a quantifier or `(`")
}
