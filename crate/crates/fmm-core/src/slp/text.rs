//! Line-oriented program text.
//!
//! ```text
//! t1 = [1/3*s3] a22          # scale
//! l1 = [1/2*s3] a11 + [1/2] t3
//! p7 = (t4 - t0) * (s0 - s3) # product of two linear forms
//! c11 = [1/2](c12 + v2 - v3)
//! l3 = t2                    # alias, no instruction
//! ```

use std::collections::HashMap;

use super::build::Builder;
use super::{Op, Slp};
use crate::coeff::{parse_coeff, Coefficient};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Coeff(Coefficient),
    Plus,
    Minus,
    Star,
    Open,
    Close,
}

fn lex(line: &str, ln: usize) -> Result<Vec<Tok>> {
    let err = |msg: String| Error::Parse { line: ln, msg };
    let b = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < b.len() {
        let c = b[i];
        match c {
            b' ' | b'\t' => i += 1,
            b'+' => (out.push(Tok::Plus), i += 1).1,
            b'-' => (out.push(Tok::Minus), i += 1).1,
            b'*' => (out.push(Tok::Star), i += 1).1,
            b'(' => (out.push(Tok::Open), i += 1).1,
            b')' => (out.push(Tok::Close), i += 1).1,
            b'[' => {
                let end = line[i..].find(']').ok_or_else(|| err("unterminated '['".into()))? + i;
                let c = parse_coeff(&line[i + 1..end]).map_err(|e| err(format!("coefficient: {e}")))?;
                out.push(Tok::Coeff(c));
                i = end + 1;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_') {
                    i += 1;
                }
                out.push(Tok::Ident(line[start..i].to_string()));
            }
            other => return Err(err(format!("unexpected character {:?}", other as char))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    line: usize,
    env: &'a HashMap<String, usize>,
}

impl Parser<'_> {
    fn err<T>(&self, msg: &str) -> Result<T> {
        Err(Error::Parse { line: self.line, msg: msg.to_string() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    /// `expr := ['-'] term (('+'|'-') term)*`, `term := [coeff] atom`,
    /// `atom := ident | '(' expr ')'`. Returns `(slot, coefficient)` terms.
    fn expr(&mut self, b: &mut Builder) -> Result<Vec<(usize, Coefficient)>> {
        let mut terms = Vec::new();
        let mut sign = Coefficient::one();
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            sign = -sign;
        }
        loop {
            let mut c = sign.clone();
            if let Some(Tok::Coeff(k)) = self.peek() {
                c = &c * k;
                self.pos += 1;
            }
            let slot = match self.peek().cloned() {
                Some(Tok::Ident(name)) => {
                    self.pos += 1;
                    match self.env.get(&name) {
                        Some(&s) => s,
                        None => return self.err(&format!("unbound name `{name}`")),
                    }
                }
                Some(Tok::Open) => {
                    self.pos += 1;
                    let inner = self.expr(b)?;
                    if self.peek() != Some(&Tok::Close) {
                        return self.err("expected ')'");
                    }
                    self.pos += 1;
                    match b.signed_sum(&inner) {
                        Some((s, true)) => {
                            c = -c;
                            s
                        }
                        Some((s, false)) => s,
                        None => return self.err("empty group"),
                    }
                }
                _ => return self.err("expected a name or '('"),
            };
            terms.push((slot, c));
            match self.peek() {
                Some(Tok::Plus) => sign = Coefficient::one(),
                Some(Tok::Minus) => sign = -Coefficient::one(),
                _ => return Ok(terms),
            }
            self.pos += 1;
        }
    }
}

/// Parses program text. `inputs` name the input slots in order (the first `left` of them
/// form the left operand of a bilinear program) and `outputs` name the returned values.
pub fn parse_slp(text: &str, inputs: &[&str], left: Option<usize>, outputs: &[&str]) -> Result<Slp> {
    let mut env: HashMap<String, usize> = inputs.iter().enumerate().map(|(i, n)| (n.to_string(), i)).collect();
    let mut b = Builder::new(inputs.len());
    for (idx, raw) in text.lines().enumerate() {
        let ln = idx + 1;
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or(Error::Parse { line: ln, msg: "expected `name = expression`".into() })?;
        let name = lhs.trim();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::Parse { line: ln, msg: format!("bad target `{name}`") });
        }
        if env.contains_key(name) {
            return Err(Error::Parse { line: ln, msg: format!("`{name}` assigned twice") });
        }
        let toks = lex(rhs, ln)?;
        let mut p = Parser { toks: &toks, pos: 0, line: ln, env: &env };
        let first = p.expr(&mut b)?;
        let slot = if p.peek() == Some(&Tok::Star) {
            p.pos += 1;
            let second = p.expr(&mut b)?;
            let x = b.sum(&first).ok_or(Error::Parse { line: ln, msg: "empty factor".into() })?;
            let y = b.sum(&second).ok_or(Error::Parse { line: ln, msg: "empty factor".into() })?;
            b.push(Op::Mul(x, y))
        } else {
            match first.as_slice() {
                [(s, c)] if c.is_one() => *s,
                _ => b.sum(&first).ok_or(Error::Parse { line: ln, msg: "empty expression".into() })?,
            }
        };
        if p.pos != toks.len() {
            return Err(Error::Parse { line: ln, msg: "trailing tokens".into() });
        }
        env.insert(name.to_string(), slot);
    }
    let outs = outputs
        .iter()
        .map(|o| env.get(*o).copied().map(Some).ok_or(Error::Parse { line: 0, msg: format!("output `{o}` never assigned") }))
        .collect::<Result<Vec<_>>>()?;
    let prog = Slp {
        inputs: inputs.iter().map(|s| s.to_string()).collect(),
        left,
        ops: b.ops,
        outputs: outs,
        output_names: outputs.iter().map(|s| s.to_string()).collect(),
    };
    prog.validate()?;
    Ok(prog)
}
