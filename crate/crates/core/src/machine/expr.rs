//! Recursive-descent parser for amplitude expressions and ket sums.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := number | 'i' | 'pi' | 'sqrt' '(' expr ')' | '(' expr ')' | '-' factor
//! ```
//!
//! Evaluation is in double precision; `sqrt` is the principal complex root.
//! A ket sum is `expr '|' nat '>'` terms joined by `+` or `-`, with the
//! amplitude defaulting to 1 when omitted.

use crate::error::ParseError;
use crate::hilbert::Amplitude;

pub struct ExprParser<'a> {
    src: &'a str,
    pos: usize,
    line: usize,
    col_offset: usize,
}

type PResult<T> = Result<T, ParseError>;

impl<'a> ExprParser<'a> {
    pub fn new(src: &'a str) -> Self {
        Self::located(src, 1, 0)
    }

    /// A parser whose error locations are shifted to `line` and to columns
    /// after `col_offset`.
    pub fn located(src: &'a str, line: usize, col_offset: usize) -> Self {
        Self {
            src,
            pos: 0,
            line,
            col_offset,
        }
    }

    fn error(&self, at: usize, msg: impl Into<String>) -> ParseError {
        let column = self.col_offset + self.src[..at.min(self.src.len())].chars().count() + 1;
        ParseError::new(self.line, column, msg)
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> PResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(self.pos, format!("expected `{c}`")))
        }
    }

    pub fn parse_expr(&mut self) -> PResult<Amplitude> {
        let mut acc = self.parse_term()?;
        loop {
            if self.eat('+') {
                acc += self.parse_term()?;
            } else if self.eat('-') {
                acc -= self.parse_term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn parse_term(&mut self) -> PResult<Amplitude> {
        let mut acc = self.parse_factor()?;
        loop {
            if self.eat('*') {
                acc *= self.parse_factor()?;
            } else {
                self.skip_ws();
                let at = self.pos;
                if self.eat('/') {
                    let d = self.parse_factor()?;
                    if d.norm_sqr() == 0.0 {
                        return Err(self.error(at, "division by zero"));
                    }
                    acc /= d;
                } else {
                    return Ok(acc);
                }
            }
        }
    }

    fn parse_factor(&mut self) -> PResult<Amplitude> {
        self.skip_ws();
        let start = self.pos;
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                // 0 − x rather than −x keeps zero parts positive
                Ok(Amplitude::new(0.0, 0.0) - self.parse_factor()?)
            }
            Some('(') => {
                self.pos += 1;
                let v = self.parse_expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.parse_number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let len = self.src[start..]
                    .find(|ch: char| !ch.is_ascii_alphanumeric() && ch != '_')
                    .unwrap_or(self.src.len() - start);
                let ident = &self.src[start..start + len];
                self.pos += len;
                match ident {
                    "i" => Ok(Amplitude::new(0.0, 1.0)),
                    "pi" => Ok(Amplitude::new(std::f64::consts::PI, 0.0)),
                    "sqrt" => {
                        self.expect('(')?;
                        let v = self.parse_expr()?;
                        self.expect(')')?;
                        Ok(v.sqrt())
                    }
                    _ => Err(self.error(start, format!("unknown identifier `{ident}`"))),
                }
            }
            Some(c) => Err(self.error(start, format!("unexpected `{c}`"))),
            None => Err(self.error(start, "unexpected end of expression")),
        }
    }

    fn parse_number(&mut self) -> PResult<Amplitude> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && bytes[end].is_ascii_digit() {
            end += 1;
        }
        if end < bytes.len() && bytes[end] == b'.' {
            end += 1;
            while end < bytes.len() && bytes[end].is_ascii_digit() {
                end += 1;
            }
        }
        let text = &self.src[start..end];
        let v: f64 = text
            .parse()
            .map_err(|_| self.error(start, format!("malformed number `{text}`")))?;
        self.pos = end;
        Ok(Amplitude::new(v, 0.0))
    }

    fn parse_nat(&mut self) -> PResult<u64> {
        self.skip_ws();
        let start = self.pos;
        let digits = self.src[start..]
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.src.len() - start);
        if digits == 0 {
            return Err(self.error(start, "expected a natural number"));
        }
        let v = self.src[start..start + digits]
            .parse()
            .map_err(|_| self.error(start, "natural number out of range"))?;
        self.pos += digits;
        Ok(v)
    }

    /// Parses the whole input as one expression.
    pub fn parse_complete(mut self) -> PResult<Amplitude> {
        let v = self.parse_expr()?;
        if !self.at_end() {
            return Err(self.error(self.pos, "trailing input after expression"));
        }
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(self.error(0, "amplitude is not finite"));
        }
        Ok(v)
    }

    /// Parses `amp|n> ± amp|n> ...` into `(amplitude, n)` terms.
    pub fn parse_ket_sum(mut self) -> PResult<Vec<(Amplitude, u64)>> {
        let mut terms = Vec::new();
        let mut sign = Amplitude::new(1.0, 0.0);
        loop {
            self.skip_ws();
            let amp = if self.peek() == Some('|') {
                Amplitude::new(1.0, 0.0)
            } else {
                self.parse_expr()?
            };
            self.expect('|')?;
            let n = self.parse_nat()?;
            self.expect('>')?;
            let amp = sign * amp;
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(self.error(self.pos, "amplitude is not finite"));
            }
            terms.push((amp, n));
            if self.at_end() {
                return Ok(terms);
            }
            sign = if self.eat('+') {
                Amplitude::new(1.0, 0.0)
            } else if self.eat('-') {
                Amplitude::new(-1.0, 0.0)
            } else {
                return Err(self.error(self.pos, "expected `+` or `-` between terms"));
            };
        }
    }
}

pub fn parse_amplitude(src: &str) -> Result<Amplitude, ParseError> {
    ExprParser::new(src).parse_complete()
}

pub fn parse_ket_sum(src: &str) -> Result<Vec<(Amplitude, u64)>, ParseError> {
    ExprParser::new(src).parse_ket_sum()
}

/// Decimal rendering that parses back to the identical amplitude.
pub fn format_amplitude(a: Amplitude) -> String {
    match (a.re == 0.0, a.im == 0.0) {
        (_, true) => format!("{}", a.re),
        (true, false) => format!("{}*i", a.im),
        (false, false) if a.im < 0.0 => format!("{} - {}*i", a.re, -a.im),
        (false, false) => format!("{} + {}*i", a.re, a.im),
    }
}
