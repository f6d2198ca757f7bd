//! Concrete syntax for PGA terms and repeater sequences.
//!
//! Both dialects share the primitive instructions:
//!
//! ```text
//! prim   := "!" | "#" nat0 | ["+"|"-"] name
//! name   := [a-z][a-z0-9.]*
//! ```
//!
//! PGA terms add grouping and the postfix repetition `^w`; L-sequences are
//! flat and add the repeat instruction `\##n` (also spelled `##n`).

use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Largest counter accepted by the parsers.
pub const MAX_COUNTER: usize = u32::MAX as usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Instruction {
    Basic(String),
    PosTest(String),
    NegTest(String),
    Jump(usize),
    Halt,
    /// Repeat the last `n` instructions forever. Only legal in L-sequences.
    Repeat(usize),
}

impl Instruction {
    pub fn is_primitive(&self) -> bool {
        !matches!(self, Instruction::Repeat(_))
    }

    pub fn is_jump(&self) -> bool {
        matches!(self, Instruction::Jump(_))
    }

    /// The action name of a basic or test instruction.
    pub fn action(&self) -> Option<&str> {
        match self {
            Instruction::Basic(a) | Instruction::PosTest(a) | Instruction::NegTest(a) => Some(a),
            _ => None,
        }
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instruction::Basic(a) => write!(f, "{a}"),
            Instruction::PosTest(a) => write!(f, "+{a}"),
            Instruction::NegTest(a) => write!(f, "-{a}"),
            Instruction::Jump(k) => write!(f, "#{k}"),
            Instruction::Halt => write!(f, "!"),
            Instruction::Repeat(n) => write!(f, "\\##{n}"),
        }
    }
}

/// A PGA program: primitive instructions under concatenation and repetition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PgaTerm {
    Prim(Instruction),
    Concat(Box<PgaTerm>, Box<PgaTerm>),
    Omega(Box<PgaTerm>),
}

impl PgaTerm {
    /// Wraps a primitive instruction; repeaters are rejected.
    pub fn prim(inst: Instruction) -> Option<PgaTerm> {
        inst.is_primitive().then_some(PgaTerm::Prim(inst))
    }

    pub fn concat(left: PgaTerm, right: PgaTerm) -> PgaTerm {
        PgaTerm::Concat(Box::new(left), Box::new(right))
    }

    pub fn omega(body: PgaTerm) -> PgaTerm {
        PgaTerm::Omega(Box::new(body))
    }

    /// Right-leaning concatenation of a nonempty list of terms.
    pub fn concat_all(parts: Vec<PgaTerm>) -> Option<PgaTerm> {
        parts.into_iter().rev().reduce(|acc, t| PgaTerm::concat(t, acc))
    }

    /// Repetition-free term for a nonempty instruction word.
    pub fn word(insts: &[Instruction]) -> Option<PgaTerm> {
        PgaTerm::concat_all(insts.iter().cloned().map(PgaTerm::Prim).collect())
    }

    /// The operands of the top-level concatenation chain, left to right.
    pub fn factors(&self) -> Vec<&PgaTerm> {
        let mut out = Vec::new();
        self.collect_factors(&mut out);
        out
    }

    fn collect_factors<'a>(&'a self, out: &mut Vec<&'a PgaTerm>) {
        match self {
            PgaTerm::Concat(l, r) => {
                l.collect_factors(out);
                r.collect_factors(out);
            }
            t => out.push(t),
        }
    }

    /// Re-associates every concatenation chain to the right.
    pub fn reassociate(&self) -> PgaTerm {
        let parts = self
            .factors()
            .into_iter()
            .map(|t| match t {
                PgaTerm::Omega(b) => PgaTerm::omega(b.reassociate()),
                t => t.clone(),
            })
            .collect();
        PgaTerm::concat_all(parts).expect("factors are nonempty")
    }

    pub fn instruction_count(&self) -> usize {
        match self {
            PgaTerm::Prim(_) => 1,
            PgaTerm::Concat(l, r) => l.instruction_count() + r.instruction_count(),
            PgaTerm::Omega(b) => b.instruction_count(),
        }
    }
}

impl fmt::Display for PgaTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, factor) in self.factors().into_iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            match factor {
                PgaTerm::Prim(inst) => write!(f, "{inst}")?,
                PgaTerm::Omega(body) => match body.as_ref() {
                    PgaTerm::Prim(inst) => write!(f, "{inst}^w")?,
                    body => write!(f, "({body})^w")?,
                },
                PgaTerm::Concat(..) => unreachable!("factors never returns a concatenation"),
            }
        }
        Ok(())
    }
}

/// A flat, nonempty sequence over primitive instructions and repeaters.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LSeq(Vec<Instruction>);

impl LSeq {
    pub fn new(items: Vec<Instruction>) -> Option<LSeq> {
        (!items.is_empty()).then_some(LSeq(items))
    }

    pub fn items(&self) -> &[Instruction] {
        &self.0
    }

    pub fn into_items(self) -> Vec<Instruction> {
        self.0
    }

    pub fn has_repeater(&self) -> bool {
        self.0.iter().any(|i| !i.is_primitive())
    }
}

impl fmt::Display for LSeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, inst) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{inst}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at column {}: {message}", .offset + 1)]
pub struct ParseError {
    /// Byte offset into the input.
    pub offset: usize,
    pub message: String,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dialect {
    Pga,
    L,
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    dialect: Dialect,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str, dialect: Dialect) -> Self {
        Parser { src: text.as_bytes(), pos: 0, dialect }
    }

    fn error<T>(&self, offset: usize, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { offset, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn starts_with(&mut self, lit: &str) -> bool {
        self.skip_ws();
        self.src[self.pos..].starts_with(lit.as_bytes())
    }

    fn describe(&self, at: usize) -> String {
        match std::str::from_utf8(&self.src[at..]).ok().and_then(|s| s.chars().next()) {
            Some(c) => format!("'{}'", c.escape_default()),
            None if at < self.src.len() => "invalid byte".to_string(),
            None => "end of input".to_string(),
        }
    }

    fn expect_end(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(b')') if self.dialect == Dialect::Pga => {
                self.error(self.pos, "unmatched ')'")
            }
            Some(_) => self.error(self.pos, format!("expected ';' but found {}", self.describe(self.pos))),
        }
    }

    fn number(&mut self, allow_zero: bool) -> Result<usize, ParseError> {
        let start = self.pos;
        let mut end = start;
        while end < self.src.len() && self.src[end].is_ascii_digit() {
            end += 1;
        }
        if end == start {
            return self.error(start, format!("expected a number but found {}", self.describe(start)));
        }
        let digits = std::str::from_utf8(&self.src[start..end]).expect("ascii digits");
        if digits.len() > 1 && digits.starts_with('0') {
            return self.error(start, "leading zeros are not allowed in counters");
        }
        let value: usize = match digits.parse() {
            Ok(v) if v <= MAX_COUNTER => v,
            _ => return self.error(start, "counter too large"),
        };
        if value == 0 && !allow_zero {
            return self.error(start, "repeat counter must be at least 1");
        }
        self.pos = end;
        Ok(value)
    }

    fn name(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        match self.src.get(start) {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => {
                return self.error(start, format!("expected an instruction but found {}", self.describe(start)))
            }
        }
        let mut end = start + 1;
        while end < self.src.len()
            && (self.src[end].is_ascii_lowercase() || self.src[end].is_ascii_digit() || self.src[end] == b'.')
        {
            end += 1;
        }
        self.pos = end;
        Ok(String::from_utf8(self.src[start..end].to_vec()).expect("ascii name"))
    }

    /// Parses one instruction token, including repeaters; the caller decides
    /// whether a repeater is legal.
    fn instruction(&mut self) -> Result<(usize, Instruction), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.starts_with("\\##") {
            self.pos += 3;
            return Ok((start, Instruction::Repeat(self.number(false)?)));
        }
        if self.starts_with("##") {
            self.pos += 2;
            return Ok((start, Instruction::Repeat(self.number(false)?)));
        }
        let inst = match self.src.get(start) {
            Some(b'!') => {
                self.pos += 1;
                Instruction::Halt
            }
            Some(b'#') => {
                self.pos += 1;
                Instruction::Jump(self.number(true)?)
            }
            Some(b'+') => {
                self.pos += 1;
                Instruction::PosTest(self.name()?)
            }
            Some(b'-') => {
                self.pos += 1;
                Instruction::NegTest(self.name()?)
            }
            _ => Instruction::Basic(self.name()?),
        };
        Ok((start, inst))
    }

    fn pga_seq(&mut self) -> Result<PgaTerm, ParseError> {
        let mut parts = vec![self.pga_rep()?];
        while self.peek() == Some(b';') {
            self.pos += 1;
            parts.push(self.pga_rep()?);
        }
        Ok(PgaTerm::concat_all(parts).expect("at least one factor"))
    }

    fn pga_rep(&mut self) -> Result<PgaTerm, ParseError> {
        let atom = self.pga_atom()?;
        if self.starts_with("^w") {
            self.pos += 2;
            if self.starts_with("^w") {
                return self.error(self.pos, "repetition must be applied to a parenthesized group");
            }
            return Ok(PgaTerm::omega(atom));
        }
        if self.peek() == Some(b'^') {
            return self.error(self.pos, "expected '^w'");
        }
        Ok(atom)
    }

    fn pga_atom(&mut self) -> Result<PgaTerm, ParseError> {
        if self.peek() == Some(b'(') {
            let open = self.pos;
            self.pos += 1;
            let inner = self.pga_seq()?;
            if self.peek() != Some(b')') {
                if self.pos >= self.src.len() {
                    return self.error(open, "unclosed '('");
                }
                return self.error(self.pos, format!("expected ')' but found {}", self.describe(self.pos)));
            }
            self.pos += 1;
            return Ok(inner);
        }
        let (start, inst) = self.instruction()?;
        if !inst.is_primitive() {
            return self.error(start, "repeat instructions are not allowed in PGA terms");
        }
        Ok(PgaTerm::Prim(inst))
    }

    fn l_item(&mut self) -> Result<Instruction, ParseError> {
        match self.peek() {
            Some(b'(') | Some(b')') => {
                return self.error(self.pos, "parentheses are not allowed in L-sequences")
            }
            Some(b'^') => return self.error(self.pos, "repetition '^w' is not allowed in L-sequences"),
            _ => {}
        }
        let (_, inst) = self.instruction()?;
        if self.peek() == Some(b'^') {
            return self.error(self.pos, "repetition '^w' is not allowed in L-sequences");
        }
        Ok(inst)
    }
}

fn check_nonempty(text: &str) -> Result<(), ParseError> {
    if text.trim().is_empty() {
        return Err(ParseError { offset: 0, message: "empty input".into() });
    }
    Ok(())
}

/// Parses a PGA term. Concatenation chains come back right-leaning.
pub fn parse_pga(text: &str) -> Result<PgaTerm, ParseError> {
    check_nonempty(text)?;
    let mut p = Parser::new(text, Dialect::Pga);
    let term = p.pga_seq()?;
    p.expect_end()?;
    Ok(term)
}

/// Parses a flat L-sequence (PGLA notation).
pub fn parse_l(text: &str) -> Result<LSeq, ParseError> {
    check_nonempty(text)?;
    let mut p = Parser::new(text, Dialect::L);
    let mut items = vec![p.l_item()?];
    while p.peek() == Some(b';') {
        p.pos += 1;
        items.push(p.l_item()?);
    }
    p.expect_end()?;
    Ok(LSeq(items))
}
