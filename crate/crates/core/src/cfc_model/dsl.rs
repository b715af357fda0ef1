//! The textual spec language: terms joined by `+`, term = kind, size, an
//! optional `(mu)` parameter and an optional `*count` repeat.
//!
//! Kinds: `J` (Type 0), `G` (Type I), `H` (Type II). Examples:
//! `"J3 + J2*2"`, `"G4*2 + H6(2)"`, `"H4(1/2+3/4i)"`. Whitespace is ignored
//! between tokens.

use num_traits::{Signed, Zero};

use super::{Block, CfcSpec, SpecError};
use crate::exact_linalg::GaussianRational;

pub fn parse_spec(input: &str) -> Result<CfcSpec, SpecError> {
    Parser { input, pos: 0 }.parse()
}

/// Canonical rendering: blocks fully expanded, joined by `" + "`, with `mu`
/// printed in reduced form. The output parses back to an equal spec.
pub fn format_spec(spec: &CfcSpec) -> String {
    if spec.is_empty() {
        return String::new();
    }
    spec.blocks().iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" + ")
}

pub(super) fn format_mu(mu: &GaussianRational) -> String {
    let rat = |r: &crate::exact_linalg::Rational| {
        if r.denom() == &num_bigint::BigInt::from(1) {
            r.numer().to_string()
        } else {
            format!("{}/{}", r.numer(), r.denom())
        }
    };
    if mu.im().is_zero() {
        rat(mu.re())
    } else if mu.re().is_zero() {
        format!("{}i", rat(mu.im()))
    } else if mu.im().is_negative() {
        format!("{}-{}i", rat(mu.re()), rat(&mu.im().abs()))
    } else {
        format!("{}+{}i", rat(mu.re()), rat(mu.im()))
    }
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn parse(mut self) -> Result<CfcSpec, SpecError> {
        let mut blocks = Vec::new();
        self.skip_ws();
        if self.at_end() {
            return Ok(CfcSpec::empty());
        }
        loop {
            self.term(&mut blocks)?;
            self.skip_ws();
            if self.at_end() {
                return Ok(CfcSpec::new(blocks));
            }
            self.expect('+')?;
            self.skip_ws();
        }
    }

    fn term(&mut self, blocks: &mut Vec<Block>) -> Result<(), SpecError> {
        let kind = match self.next_char() {
            Some('J') | Some('j') => 'J',
            Some('G') | Some('g') => 'G',
            Some('H') | Some('h') => 'H',
            other => {
                return Err(self.err(format!(
                    "expected block kind J, G or H, found {}",
                    other.map_or("end of input".to_string(), |c| format!("{c:?}"))
                )))
            }
        };
        self.bump();
        let size = self.number("block size")?;
        self.skip_ws();
        let mu = if self.next_char() == Some('(') {
            self.bump();
            let start = self.pos;
            let mut depth = 1usize;
            while let Some(c) = self.next_char() {
                match c {
                    '(' => depth += 1,
                    ')' => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    _ => {}
                }
                self.bump();
            }
            if depth != 0 {
                return Err(self.err("unclosed '(' in mu parameter".to_string()));
            }
            let literal: String =
                self.input[start..self.pos].chars().filter(|c| !c.is_whitespace()).collect();
            self.bump(); // closing ')'
            let mu: GaussianRational = literal
                .parse()
                .map_err(|e| SpecError::Parse { pos: start, msg: format!("bad mu literal: {e}") })?;
            Some(mu)
        } else {
            None
        };
        self.skip_ws();
        let count = if self.next_char() == Some('*') {
            self.bump();
            self.skip_ws();
            let c = self.number("repeat count")?;
            if c == 0 {
                return Err(self.err("repeat count must be positive".to_string()));
            }
            c
        } else {
            1
        };
        let here = self.pos;
        let block = match (kind, mu) {
            ('J', None) => Block::type0(size),
            ('G', None) => Block::type_i(size),
            ('H', Some(mu)) => Block::type_ii(size, mu),
            ('H', None) => return Err(self.err("H block needs a (mu) parameter".to_string())),
            (_, Some(_)) => return Err(self.err("only H blocks take a (mu) parameter".to_string())),
            _ => unreachable!("kind is one of J, G, H"),
        }
        .map_err(|e| SpecError::Parse { pos: here, msg: e.to_string() })?;
        blocks.extend(std::iter::repeat_n(block, count));
        Ok(())
    }

    fn number(&mut self, what: &str) -> Result<usize, SpecError> {
        let start = self.pos;
        while matches!(self.next_char(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.pos == start {
            return Err(self.err(format!("expected {what}")));
        }
        self.input[start..self.pos]
            .parse()
            .map_err(|_| self.err(format!("{what} out of range")))
    }

    fn expect(&mut self, c: char) -> Result<(), SpecError> {
        if self.next_char() == Some(c) {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {c:?}")))
        }
    }

    fn next_char(&self) -> Option<char> {
        self.input[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.next_char() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while matches!(self.next_char(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.input.len()
    }

    fn err(&self, msg: String) -> SpecError {
        SpecError::Parse { pos: self.pos, msg }
    }
}
