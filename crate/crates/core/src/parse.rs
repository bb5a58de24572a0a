//! Text literals for automorphisms, currents and trees.
//!
//! ```text
//! automorphism  phi | D | id | twist(a,b) | prime | double-prime | ca-basis
//!               | inv(<automorphism>)
//!               | a->ab; e->ed | a->aB; e->eD      (inverse table required)
//! current       3/2*[ab] + 1*[c] + [aB]
//! tree          cayley [w(a)=2 ...] [scale=p/q] [marking=<automorphism>]
//!               twist (a:b,1) (e:d,3/2) [scale=p/q] [marking=<automorphism>]
//! ```
//!
//! Error positions are byte offsets into the literal.

use std::str::FromStr;

use crate::automorphism::FreeAutomorphism;
use crate::currents::RationalCurrent;
use crate::error::{Error, Result};
use crate::trees::{TreeLengthFunction, Twist, TwistSplittingCore};
use crate::word::{Basis, Letter, Word};
use crate::{qi, Rational};

fn parse_err(pos: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        pos,
        msg: msg.into(),
    }
}

/// Shifts the position of a nested parse error by `offset`.
fn shifted<T>(r: Result<T>, offset: usize) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { pos, msg } => Error::Parse {
            pos: pos + offset,
            msg,
        },
        other => other,
    })
}

fn leading_ws(s: &str) -> usize {
    s.len() - s.trim_start().len()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    Rational::from_str(t).map_err(|_| parse_err(leading_ws(s), format!("invalid rational `{t}`")))
}

fn parse_generator(s: &str, pos: usize) -> Result<Letter> {
    let t = s.trim();
    let mut chars = t.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) if c.is_ascii_lowercase() => Ok(Letter::from_char(c).expect("lowercase")),
        _ => Err(parse_err(pos + leading_ws(s), format!("expected a generator letter, got `{t}`"))),
    }
}

fn parse_table(basis: Basis, s: &str, offset: usize) -> Result<Vec<Word>> {
    let mut images: Vec<Word> = basis.generators().map(Word::letter).collect();
    let mut start = 0;
    for item in s.split(';') {
        let here = offset + start;
        start += item.len() + 1;
        if item.trim().is_empty() {
            continue;
        }
        let Some(arrow) = item.find("->") else {
            return Err(parse_err(here + leading_ws(item), "expected `x->word`"));
        };
        let g = parse_generator(&item[..arrow], here)?;
        basis.check_letter(g)?;
        let image = shifted(Word::parse(&item[arrow + 2..]), here + arrow + 2)?;
        images[g.index() - 1] = image;
    }
    Ok(images)
}

/// Parses an automorphism literal over `basis`.
pub fn parse_automorphism(basis: Basis, s: &str) -> Result<FreeAutomorphism> {
    let off = leading_ws(s);
    let t = s.trim();
    if let Some(inner) = t.strip_prefix("inv(").and_then(|r| r.strip_suffix(')')) {
        return Ok(shifted(parse_automorphism(basis, inner), off + 4)?.inverse());
    }
    if let Some(inner) = t.strip_prefix("twist(").and_then(|r| r.strip_suffix(')')) {
        let Some((x, y)) = inner.split_once(',') else {
            return Err(parse_err(off + 6, "expected `twist(t,z)`"));
        };
        let tw = parse_generator(x, off + 6)?;
        let tz = parse_generator(y, off + 6 + x.len() + 1)?;
        return FreeAutomorphism::simple_twist(basis, tw, tz);
    }
    match t {
        "id" => return Ok(FreeAutomorphism::identity(basis)),
        "phi" => return FreeAutomorphism::twist_ab_ed(basis),
        "D" => {
            return FreeAutomorphism::simple_twist(basis, Letter::generator(1), Letter::generator(2))
        }
        "prime" => return FreeAutomorphism::prime_basis_change(basis),
        "double-prime" => return FreeAutomorphism::double_prime_basis_change(basis),
        "ca-basis" => return FreeAutomorphism::ca_basis_change(basis),
        _ => {}
    }
    if !t.contains("->") {
        return Err(parse_err(off, format!("unknown automorphism `{t}`")));
    }
    let Some(bar) = t.find('|') else {
        return Err(parse_err(
            off + t.len(),
            "explicit automorphism needs an inverse table after `|`",
        ));
    };
    let images = parse_table(basis, &t[..bar], off)?;
    let inverse_images = parse_table(basis, &t[bar + 1..], off + bar + 1)?;
    FreeAutomorphism::new(basis, images, inverse_images)
}

/// Parses `w1*[g1] + w2*[g2] + ...`; a missing weight means 1.
pub fn parse_current(basis: Basis, s: &str) -> Result<RationalCurrent> {
    let mut acc = RationalCurrent::zero(basis);
    let mut start = 0;
    for term in s.split('+') {
        let here = start;
        start += term.len() + 1;
        let off = here + leading_ws(term);
        let t = term.trim();
        if t.is_empty() {
            return Err(parse_err(off, "empty term"));
        }
        let (weight, class, class_off) = match t.find('*') {
            Some(star) => (shifted(parse_rational(&t[..star]), off)?, t[star + 1..].trim(), off + star + 1),
            None => (qi(1), t, off),
        };
        let Some(inner) = class.strip_prefix('[').and_then(|r| r.strip_suffix(']')) else {
            return Err(parse_err(class_off, format!("expected `[word]`, got `{class}`")));
        };
        let word = shifted(Word::parse(inner), class_off + 1)?;
        let term = RationalCurrent::of_word(basis, &word)?.scale(&weight)?;
        acc = acc.add(&term)?;
    }
    Ok(acc)
}

/// Parses a tree literal over `basis`.
pub fn parse_tree(basis: Basis, s: &str) -> Result<TreeLengthFunction> {
    let (head, marking) = match s.find("marking=") {
        Some(m) => {
            let lit = &s[m + "marking=".len()..];
            let aut = shifted(parse_automorphism(basis, lit), m + "marking=".len())?;
            (&s[..m], Some(aut))
        }
        None => (s, None),
    };
    let off = leading_ws(head);
    let body = head.trim();
    let mut scale = qi(1);
    let mut tree = if let Some(rest) = body.strip_prefix("cayley") {
        let mut weights = vec![qi(1); basis.rank()];
        let base = off + "cayley".len();
        for (pos, tok) in tokens(rest) {
            let at = base + pos;
            if let Some(v) = tok.strip_prefix("scale=") {
                scale = shifted(parse_rational(v), at + 6)?;
            } else if let Some(inner) = tok.strip_prefix("w(") {
                let Some((letter, value)) = inner.split_once(")=") else {
                    return Err(parse_err(at, "expected `w(x)=value`"));
                };
                let g = parse_generator(letter, at + 2)?;
                basis.check_letter(g)?;
                weights[g.index() - 1] = shifted(parse_rational(value), at + 2 + letter.len() + 2)?;
            } else {
                return Err(parse_err(at, format!("unexpected `{tok}`")));
            }
        }
        TreeLengthFunction::weighted_cayley(basis, weights)?
    } else if let Some(rest) = body.strip_prefix("twist") {
        let base = off + "twist".len();
        let mut twists = Vec::new();
        for (pos, tok) in tokens(rest) {
            let at = base + pos;
            if let Some(v) = tok.strip_prefix("scale=") {
                scale = shifted(parse_rational(v), at + 6)?;
                continue;
            }
            let Some(inner) = tok.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
                return Err(parse_err(at, format!("expected `(t:z,length)`, got `{tok}`")));
            };
            let (pair, len) = inner
                .split_once(',')
                .ok_or_else(|| parse_err(at, "expected `(t:z,length)`"))?;
            let (t, z) = pair
                .split_once(':')
                .ok_or_else(|| parse_err(at + 1, "expected `t:z`"))?;
            let t = parse_generator(t, at + 1)?;
            let z = parse_generator(z, at + 2 + pair.find(':').unwrap_or(0))?;
            let length = shifted(parse_rational(len), at + 1 + pair.len() + 1)?;
            twists.push(Twist::new(t, z, length));
        }
        TreeLengthFunction::twist(TwistSplittingCore::new(basis, twists)?)
    } else {
        return Err(parse_err(off, "tree literal must start with `cayley` or `twist`"));
    };
    if let Some(m) = marking {
        tree = tree.with_marking(m)?;
    }
    tree.scaled(&scale)
}

/// Whitespace-separated tokens with their byte offsets; parenthesised groups
/// stay together.
fn tokens(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut depth = 0usize;
    let mut start: Option<usize> = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push((st, &s[st..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}
