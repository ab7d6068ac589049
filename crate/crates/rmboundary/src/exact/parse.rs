//! Text grammar: `p/q`, `u + v*sqrt(D)`, `(x ; q)`.

use super::{Disc, PCElem, QuadElem, Rat};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_traits::{One, Zero};

fn perr(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

pub fn parse_rat(s: &str) -> Result<Rat> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let t = t.strip_prefix('+').unwrap_or(&t);
    let (p, q) = match t.split_once('/') {
        Some((p, q)) => (p, q),
        None => (t, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| perr(format!("bad rational `{s}`")))?;
    let q: BigInt = q.parse().map_err(|_| perr(format!("bad rational `{s}`")))?;
    if q.is_zero() {
        return Err(perr(format!("zero denominator in `{s}`")));
    }
    Ok(Rat::new(p, q))
}

/// Splits at `sep` occurring outside any bracket pair.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' | '<' => depth += 1,
            ')' | ']' | '>' => depth -= 1,
            _ if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// Splits a whitespace-free sum into signed terms.
fn signed_terms(t: &str) -> Vec<(bool, &str)> {
    let mut out = Vec::new();
    let bytes = t.as_bytes();
    let mut depth = 0i32;
    let mut start = 0;
    let mut neg = false;
    for i in 0..bytes.len() {
        let c = bytes[i] as char;
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '-' if depth == 0 => {
                let prev = if i == 0 { None } else { Some(bytes[i - 1] as char) };
                if matches!(prev, Some('*') | Some('/')) {
                    continue;
                }
                if i > start {
                    out.push((neg, &t[start..i]));
                }
                neg = c == '-';
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((neg, &t[start..]));
    out
}

/// Parses `u + v*sqrt(D)`; `g` may stand for (D + sqrt D)/2.
pub fn parse_quad(s: &str, d: Disc) -> Result<QuadElem> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        return Err(perr("empty element"));
    }
    let mut acc = QuadElem::zero(d);
    for (neg, term) in signed_terms(&t) {
        if term.is_empty() {
            return Err(perr(format!("dangling sign in `{s}`")));
        }
        let (coef, unit) = if let Some(pos) = term.find("sqrt(") {
            let inner = term[pos + 5..]
                .strip_suffix(')')
                .ok_or_else(|| perr(format!("unclosed sqrt in `{s}`")))?;
            let dd: i64 = inner.parse().map_err(|_| perr(format!("bad radicand in `{s}`")))?;
            if dd != d.value() {
                return Err(Error::DiscriminantMismatch(dd, d.value()));
            }
            (coef_part(&term[..pos], s)?, QuadElem::sqrt_d(d))
        } else if let Some(head) = term.strip_suffix('g') {
            (coef_part(head, s)?, QuadElem::gamma(d))
        } else {
            (parse_rat(term)?, QuadElem::one(d))
        };
        let c = if neg { -coef } else { coef };
        acc = &acc + &unit.scale(&c);
    }
    Ok(acc)
}

fn coef_part(head: &str, whole: &str) -> Result<Rat> {
    if head.is_empty() {
        return Ok(Rat::one());
    }
    let h = head
        .strip_suffix('*')
        .ok_or_else(|| perr(format!("expected `*` before radical in `{whole}`")))?;
    parse_rat(h)
}

/// Parses `(x ; q)`.
pub fn parse_pc(s: &str, d: Disc) -> Result<PCElem> {
    let t = s.trim();
    let inner = t
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| perr(format!("expected `(x ; q)`, got `{s}`")))?;
    let parts = split_top_level(inner, ';');
    if parts.len() != 2 {
        return Err(perr(format!("expected exactly one `;` in `{s}`")));
    }
    Ok(PCElem::new(parse_quad(parts[0], d)?, parse_rat(parts[1])?))
}

pub fn parse_pc_list(s: &str, d: Disc) -> Result<Vec<PCElem>> {
    split_top_level(s.trim(), ',').into_iter().map(|p| parse_pc(p, d)).collect()
}
