//! Line-oriented text format for machines.
//!
//! ```text
//! qtm
//! alphabet: _ 1 $
//! states: q0 r qf
//! source: q0
//! target: qf
//! initial: q0
//! final: qf
//! rule: q0 1 -> r 1 R 1/sqrt(2)
//! ```
//!
//! `#` starts a comment. The amplitude after the direction is an expression
//! in the grammar of [`super::expr`] and defaults to 1. `initial` defaults to
//! the first listed source and `final` to the first listed target. A file
//! with header `bvqtm` has no `source:`/`target:` lines and requires
//! `initial:` and `final:`.

use crate::error::{Error, ParseError, Result};
use crate::hilbert::Amplitude;
use crate::tape::{Alphabet, Direction, StateId};

use super::expr::{format_amplitude, ExprParser};
use super::{Machine, Rule, StateInfo, StateKind};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Header {
    Qtm,
    Bv,
}

impl Header {
    fn keyword(self) -> &'static str {
        match self {
            Header::Qtm => "qtm",
            Header::Bv => "bvqtm",
        }
    }
}

/// A parsed machine file before any semantic checks beyond name resolution.
#[derive(Clone, Debug)]
pub struct MachineText {
    pub header: Header,
    pub alphabet: Alphabet,
    pub states: Vec<String>,
    pub sources: Vec<StateId>,
    pub targets: Vec<StateId>,
    pub initial: StateId,
    pub final_state: StateId,
    pub rules: Vec<Rule>,
}

struct Token<'a> {
    text: &'a str,
    col: usize,
}

fn tokens(line: &str, from: usize) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in line.char_indices().skip_while(|&(i, _)| i < from) {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    col: line[..s].chars().count() + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            col: line[..s].chars().count() + 1,
        });
    }
    out
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Line, tokens with their columns, amplitude source and its column.
type RawRule = (usize, Vec<(String, usize)>, String, usize);

pub fn parse(text: &str) -> Result<MachineText, ParseError> {
    let mut header: Option<Header> = None;
    let mut alphabet: Option<Alphabet> = None;
    let mut states: Option<Vec<String>> = None;
    let mut sources: Option<(Vec<String>, usize)> = None;
    let mut targets: Option<(Vec<String>, usize)> = None;
    let mut initial: Option<(String, usize, usize)> = None;
    let mut final_state: Option<(String, usize, usize)> = None;
    let mut raw_rules: Vec<RawRule> = Vec::new();

    for (idx, full) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = strip_comment(full);
        let first = tokens(line, 0);
        let Some(head) = first.first() else { continue };

        if header.is_none() {
            header = match head.text {
                "qtm" => Some(Header::Qtm),
                "bvqtm" => Some(Header::Bv),
                other => {
                    return Err(ParseError::new(
                        lineno,
                        head.col,
                        format!("expected header `qtm` or `bvqtm`, found `{other}`"),
                    ))
                }
            };
            if let Some(extra) = first.get(1) {
                return Err(ParseError::new(
                    lineno,
                    extra.col,
                    "unexpected text after header",
                ));
            }
            continue;
        }

        let Some(colon) = line.find(':') else {
            return Err(ParseError::new(lineno, head.col, "expected `key: value`"));
        };
        let key = line[..colon].trim();
        let key_col = head.col;
        let rest_from = colon + 1;
        let values = tokens(line, rest_from);
        let dup =
            |what: &str| ParseError::new(lineno, key_col, format!("duplicate `{what}:` line"));
        let names = |v: &[Token]| v.iter().map(|t| t.text.to_string()).collect::<Vec<_>>();
        let single = |v: &[Token]| -> Result<(String, usize, usize), ParseError> {
            match v {
                [t] => Ok((t.text.to_string(), lineno, t.col)),
                [] => Err(ParseError::new(
                    lineno,
                    key_col,
                    format!("`{key}:` needs a state name"),
                )),
                [_, t, ..] => Err(ParseError::new(
                    lineno,
                    t.col,
                    "expected a single state name",
                )),
            }
        };

        match key {
            "alphabet" => {
                if alphabet.is_some() {
                    return Err(dup(key));
                }
                for t in &values {
                    if t.text == "-" || t.text.contains('\'') {
                        return Err(ParseError::new(
                            lineno,
                            t.col,
                            format!("invalid glyph `{}`", t.text),
                        ));
                    }
                }
                for (i, t) in values.iter().enumerate() {
                    if values[..i].iter().any(|u| u.text == t.text) {
                        return Err(ParseError::new(
                            lineno,
                            t.col,
                            format!("repeated glyph `{}`", t.text),
                        ));
                    }
                }
                alphabet = Some(
                    Alphabet::new(values.iter().map(|t| t.text))
                        .map_err(|e| ParseError::new(lineno, key_col, e.to_string()))?,
                );
            }
            "states" => {
                if states.is_some() {
                    return Err(dup(key));
                }
                if values.is_empty() {
                    return Err(ParseError::new(lineno, key_col, "no states listed"));
                }
                for (i, t) in values.iter().enumerate() {
                    if values[..i].iter().any(|u| u.text == t.text) {
                        return Err(ParseError::new(
                            lineno,
                            t.col,
                            format!("repeated state `{}`", t.text),
                        ));
                    }
                }
                states = Some(names(&values));
            }
            "source" | "target" if header == Some(Header::Bv) => {
                return Err(ParseError::new(
                    lineno,
                    key_col,
                    format!("`{key}:` is not allowed in a bvqtm file"),
                ));
            }
            "source" => {
                if sources.is_some() {
                    return Err(dup(key));
                }
                sources = Some((names(&values), lineno));
            }
            "target" => {
                if targets.is_some() {
                    return Err(dup(key));
                }
                targets = Some((names(&values), lineno));
            }
            "initial" => {
                if initial.is_some() {
                    return Err(dup(key));
                }
                initial = Some(single(&values)?);
            }
            "final" => {
                if final_state.is_some() {
                    return Err(dup(key));
                }
                final_state = Some(single(&values)?);
            }
            "rule" => {
                if values.len() < 6 {
                    return Err(ParseError::new(
                        lineno,
                        values.last().map_or(key_col, |t| t.col),
                        "expected `rule: FROM READ -> TO WRITE DIR [AMPLITUDE]`",
                    ));
                }
                let fields = values[..6]
                    .iter()
                    .map(|t| (t.text.to_string(), t.col))
                    .collect();
                let (amp_src, amp_col) = match values.get(6) {
                    Some(t) => {
                        let byte = line
                            .char_indices()
                            .nth(t.col - 1)
                            .map_or(line.len(), |(b, _)| b);
                        (line[byte..].trim_end().to_string(), t.col)
                    }
                    None => (String::new(), 0),
                };
                raw_rules.push((lineno, fields, amp_src, amp_col));
            }
            other => {
                return Err(ParseError::new(
                    lineno,
                    key_col,
                    format!("unknown key `{other}`"),
                ));
            }
        }
    }

    let header = header.ok_or_else(|| ParseError::new(1, 1, "empty machine file"))?;
    let end = text.lines().count().max(1);
    let alphabet = alphabet.ok_or_else(|| ParseError::new(end, 1, "missing `alphabet:` line"))?;
    let states = states.ok_or_else(|| ParseError::new(end, 1, "missing `states:` line"))?;

    let resolve = |name: &str, line: usize, col: usize| -> Result<StateId, ParseError> {
        states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u16))
            .ok_or_else(|| ParseError::new(line, col, format!("unknown state `{name}`")))
    };
    let resolve_list = |list: &Option<(Vec<String>, usize)>| -> Result<Vec<StateId>, ParseError> {
        match list {
            Some((names, line)) => names.iter().map(|n| resolve(n, *line, 1)).collect(),
            None => Ok(Vec::new()),
        }
    };
    let sources = resolve_list(&sources)?;
    let targets = resolve_list(&targets)?;

    let mut rules = Vec::with_capacity(raw_rules.len());
    for (line, f, amp_src, amp_col) in raw_rules {
        let symbol = |(text, col): &(String, usize)| {
            alphabet.lookup(text).ok_or_else(|| {
                ParseError::new(
                    line,
                    *col,
                    format!("symbol `{text}` is not in the alphabet"),
                )
            })
        };
        if f[2].0 != "->" {
            return Err(ParseError::new(line, f[2].1, "expected `->`"));
        }
        let dir = match f[5].0.as_str() {
            "L" => Direction::L,
            "R" => Direction::R,
            other => {
                return Err(ParseError::new(
                    line,
                    f[5].1,
                    format!("direction must be L or R, found `{other}`"),
                ))
            }
        };
        let amp = if amp_src.is_empty() {
            Amplitude::new(1.0, 0.0)
        } else {
            ExprParser::located(&amp_src, line, amp_col - 1).parse_complete()?
        };
        rules.push(Rule {
            from: resolve(&f[0].0, line, f[0].1)?,
            read: symbol(&f[1])?,
            to: resolve(&f[3].0, line, f[3].1)?,
            write: symbol(&f[4])?,
            dir,
            amp,
        });
    }

    let initial = match initial {
        Some((n, l, c)) => resolve(&n, l, c)?,
        None => match (header, sources.first()) {
            (Header::Qtm, Some(&s)) => s,
            _ => return Err(ParseError::new(end, 1, "missing `initial:` line")),
        },
    };
    let final_state = match final_state {
        Some((n, l, c)) => resolve(&n, l, c)?,
        None => match (header, targets.first()) {
            (Header::Qtm, Some(&t)) => t,
            _ => return Err(ParseError::new(end, 1, "missing `final:` line")),
        },
    };

    Ok(MachineText {
        header,
        alphabet,
        states,
        sources,
        targets,
        initial,
        final_state,
        rules,
    })
}

impl MachineText {
    /// Builds the pre-QTM described by a `qtm` file.
    pub fn into_machine(self) -> Result<Machine> {
        if self.header != Header::Qtm {
            return Err(Error::Structure(
                "expected a `qtm` file, found `bvqtm`".into(),
            ));
        }
        for s in &self.sources {
            if self.targets.contains(s) {
                return Err(Error::Structure(format!(
                    "state `{}` is both a source and a target",
                    self.states[s.index()]
                )));
            }
        }
        let states = self
            .states
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let id = StateId(i as u16);
                let kind = if self.sources.contains(&id) {
                    StateKind::Source
                } else if self.targets.contains(&id) {
                    StateKind::Target
                } else {
                    StateKind::Neutral
                };
                StateInfo::new(name.clone(), kind)
            })
            .collect();
        Machine::new(
            self.alphabet,
            states,
            self.initial,
            self.final_state,
            self.rules,
        )
    }
}

/// Parses a `qtm` file into an unvalidated machine.
pub fn parse_qtm(text: &str) -> Result<Machine> {
    parse(text)?.into_machine()
}

#[allow(clippy::too_many_arguments)]
fn render(
    header: Header,
    alphabet: &Alphabet,
    states: &[&str],
    sources: &[&str],
    targets: &[&str],
    initial: &str,
    final_state: &str,
    rules: &[Rule],
) -> String {
    let mut out = String::new();
    out.push_str(header.keyword());
    out.push('\n');
    out.push_str(&format!("alphabet: {}\n", alphabet.glyphs().join(" ")));
    out.push_str(&format!("states: {}\n", states.join(" ")));
    if header == Header::Qtm {
        out.push_str(&format!("source: {}\n", sources.join(" ")));
        out.push_str(&format!("target: {}\n", targets.join(" ")));
    }
    out.push_str(&format!("initial: {initial}\n"));
    out.push_str(&format!("final: {final_state}\n"));
    for r in rules {
        out.push_str(&format!(
            "rule: {} {} -> {} {} {} {}\n",
            states[r.from.index()],
            alphabet.glyph(r.read),
            states[r.to.index()],
            alphabet.glyph(r.write),
            r.dir,
            format_amplitude(r.amp)
        ));
    }
    out
}

/// Serializes a machine so that [`parse_qtm`] reproduces it exactly. The
/// initial and final states are listed first among sources and targets.
pub fn render_qtm(m: &Machine) -> String {
    let names: Vec<&str> = m.states().iter().map(|s| s.name.as_str()).collect();
    let of_kind = |kind: StateKind, first: StateId| {
        let mut v = vec![names[first.index()]];
        for (i, s) in m.states().iter().enumerate() {
            if s.kind == kind && i != first.index() {
                v.push(names[i]);
            }
        }
        v
    };
    render(
        Header::Qtm,
        m.alphabet(),
        &names,
        &of_kind(StateKind::Source, m.initial_state()),
        &of_kind(StateKind::Target, m.final_state()),
        names[m.initial_state().index()],
        names[m.final_state().index()],
        m.rules(),
    )
}

/// Serializes a `bvqtm` file.
pub fn render_bv(
    alphabet: &Alphabet,
    states: &[String],
    initial: StateId,
    final_state: StateId,
    rules: &[Rule],
) -> String {
    let names: Vec<&str> = states.iter().map(String::as_str).collect();
    render(
        Header::Bv,
        alphabet,
        &names,
        &[],
        &[],
        names[initial.index()],
        names[final_state.index()],
        rules,
    )
}
