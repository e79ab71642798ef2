//! Tape symbols, canonical configurations and the step / reverse-step maps.
//!
//! A configuration `⟨α, q, β⟩` keeps the head implicitly on the first symbol
//! of `β`. Configurations are always stored in canonical form: `α` never
//! starts with an unmarked blank and `β` never ends with one. Marked blanks
//! are ordinary non-empty cells. With canonical storage, equality of
//! configurations up to blank padding is plain structural equality.

use std::fmt;

use crate::error::{Error, Result};
use crate::machine::{Machine, StateKind};

/// A tape symbol: an index into the machine alphabet, possibly marked.
///
/// Index 0 is always the blank and index 1 is always `1`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    base: u8,
    marked: bool,
}

impl Symbol {
    pub const BLANK: Symbol = Symbol {
        base: 0,
        marked: false,
    };
    pub const ONE: Symbol = Symbol {
        base: 1,
        marked: false,
    };

    pub const fn new(base: u8) -> Self {
        Symbol {
            base,
            marked: false,
        }
    }

    pub const fn base(self) -> u8 {
        self.base
    }

    pub const fn is_marked(self) -> bool {
        self.marked
    }

    pub const fn marked(self) -> Self {
        Symbol {
            base: self.base,
            marked: true,
        }
    }

    pub const fn unmarked(self) -> Self {
        Symbol {
            base: self.base,
            marked: false,
        }
    }

    /// Only the unmarked blank denotes an empty cell.
    pub fn is_blank(self) -> bool {
        self == Symbol::BLANK
    }

    pub fn is_one(self) -> bool {
        self.base == 1
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    L,
    R,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::L => "L",
            Direction::R => "R",
        })
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub u16);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Glyphs of a tape alphabet. Glyph 0 is the blank `_`, glyph 1 is `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    glyphs: Vec<String>,
}

impl Alphabet {
    pub const BLANK_GLYPH: &'static str = "_";

    /// Builds an alphabet from glyphs in any order. The blank and `1` are
    /// added when absent and always receive indices 0 and 1.
    pub fn new<I, S>(glyphs: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = vec![Self::BLANK_GLYPH.to_string(), "1".to_string()];
        for g in glyphs {
            let g = g.into();
            if g.is_empty() || g.contains(char::is_whitespace) || g.contains('\'') || g == "-" {
                return Err(Error::Structure(format!("invalid tape glyph `{g}`")));
            }
            if !out.contains(&g) {
                out.push(g);
            }
        }
        if out.len() > u8::MAX as usize {
            return Err(Error::Structure("alphabet too large".into()));
        }
        Ok(Self { glyphs: out })
    }

    pub fn len(&self) -> usize {
        self.glyphs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unmarked symbols of the alphabet, blank first.
    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        (0..self.glyphs.len()).map(|i| Symbol::new(i as u8))
    }

    pub fn glyph(&self, s: Symbol) -> &str {
        &self.glyphs[s.base as usize]
    }

    pub fn lookup(&self, glyph: &str) -> Option<Symbol> {
        self.glyphs
            .iter()
            .position(|g| g == glyph)
            .map(|i| Symbol::new(i as u8))
    }

    pub fn glyphs(&self) -> &[String] {
        &self.glyphs
    }

    /// Glyph with a trailing `'` for marked symbols.
    pub fn render_symbol(&self, s: Symbol) -> String {
        if s.marked {
            format!("{}'", self.glyph(s))
        } else {
            self.glyph(s).to_string()
        }
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        if word.is_empty() {
            return "-".to_string();
        }
        word.iter()
            .map(|&s| self.render_symbol(s))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Configuration {
    left: Vec<Symbol>,
    state: StateId,
    right: Vec<Symbol>,
}

fn strip(left: &mut Vec<Symbol>, right: &mut Vec<Symbol>) {
    let lead = left.iter().take_while(|s| s.is_blank()).count();
    if lead > 0 {
        left.drain(..lead);
    }
    while right.last().is_some_and(|s| s.is_blank()) {
        right.pop();
    }
}

impl Configuration {
    pub fn left(&self) -> &[Symbol] {
        &self.left
    }

    pub fn state(&self) -> StateId {
        self.state
    }

    pub fn right(&self) -> &[Symbol] {
        &self.right
    }

    /// Symbol under the head; the unmarked blank when `β` is empty.
    pub fn current(&self) -> Symbol {
        self.right.first().copied().unwrap_or(Symbol::BLANK)
    }

    /// The cell immediately left of the head: the symbol an R-move wrote.
    pub fn reverse_right_symbol(&self) -> Symbol {
        self.left.last().copied().unwrap_or(Symbol::BLANK)
    }

    /// The cell immediately right of the head: the symbol an L-move wrote.
    pub fn reverse_left_symbol(&self) -> Symbol {
        self.right.get(1).copied().unwrap_or(Symbol::BLANK)
    }

    /// Replaces current state and current symbol (`C[q, u]`).
    pub fn with_state_and_current(&self, state: StateId, current: Symbol) -> Self {
        let mut right = self.right.clone();
        if right.is_empty() {
            right.push(current);
        } else {
            right[0] = current;
        }
        canonicalize(self.left.clone(), state, right)
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.left.iter().chain(self.right.iter()).copied()
    }

    pub fn has_marks(&self) -> bool {
        self.symbols().any(Symbol::is_marked)
    }

    pub fn mark_count(&self) -> usize {
        self.symbols().filter(|s| s.is_marked()).count()
    }

    /// Canonical textual form `<alpha> | q | <beta>`.
    pub fn render(&self, alphabet: &Alphabet, state_name: &str) -> String {
        format!(
            "{} | {} | {}",
            alphabet.render_word(&self.left),
            state_name,
            alphabet.render_word(&self.right)
        )
    }
}

/// Strips leading unmarked blanks from `left` and trailing unmarked blanks
/// from `right`.
pub fn canonicalize(
    mut left: Vec<Symbol>,
    state: StateId,
    mut right: Vec<Symbol>,
) -> Configuration {
    strip(&mut left, &mut right);
    Configuration { left, state, right }
}

/// The step map γ: write `write` in the current cell, move the head, enter
/// `state`.
pub fn step(c: &Configuration, state: StateId, write: Symbol, dir: Direction) -> Configuration {
    let rest = c.right.get(1..).unwrap_or(&[]);
    match dir {
        Direction::R => {
            let mut left = Vec::with_capacity(c.left.len() + 1);
            left.extend_from_slice(&c.left);
            left.push(write);
            canonicalize(left, state, rest.to_vec())
        }
        Direction::L => {
            let (left, w) = match c.left.split_last() {
                Some((w, init)) => (init.to_vec(), *w),
                None => (Vec::new(), Symbol::BLANK),
            };
            let mut right = Vec::with_capacity(rest.len() + 2);
            right.push(w);
            right.push(write);
            right.extend_from_slice(rest);
            canonicalize(left, state, right)
        }
    }
}

/// The reverse step map γ̄. For `D = ⟨α v_R, p, w v_L β⟩` it restores the
/// pre-move configuration with state `state` and current symbol `current`:
/// an R-reverse step gives `⟨α, q, u w v_L β⟩`, an L-reverse step gives
/// `⟨α v_R w, q, u β⟩`.
pub fn reverse_step(
    d: &Configuration,
    state: StateId,
    current: Symbol,
    dir: Direction,
) -> Configuration {
    match dir {
        Direction::R => {
            let left = match d.left.split_last() {
                Some((_, init)) => init.to_vec(),
                None => Vec::new(),
            };
            let mut right = Vec::with_capacity(d.right.len() + 1);
            right.push(current);
            right.extend_from_slice(&d.right);
            canonicalize(left, state, right)
        }
        Direction::L => {
            let mut left = Vec::with_capacity(d.left.len() + 1);
            left.extend_from_slice(&d.left);
            left.push(d.current());
            let mut right = Vec::with_capacity(d.right.len());
            right.push(current);
            right.extend_from_slice(d.right.get(2..).unwrap_or(&[]));
            canonicalize(left, state, right)
        }
    }
}

/// Number of `1` and marked `1` symbols on the tape.
pub fn val(c: &Configuration) -> u64 {
    c.symbols().filter(|s| s.is_one()).count() as u64
}

/// The initial configuration `⟨λ, q, 1^{n+1}⟩` encoding `n`.
pub fn unary_input(state: StateId, n: u64) -> Configuration {
    canonicalize(Vec::new(), state, vec![Symbol::ONE; n as usize + 1])
}

/// Checks the placement of marked symbols against the state class.
pub fn well_formed(c: &Configuration, m: &Machine) -> Result<bool> {
    let kind = m.kind_checked(c.state)?;
    let ok = match kind {
        StateKind::Neutral => !c.has_marks(),
        // α ∈ Σ*, β ∈ Σ̄*Σ*
        StateKind::Source => !c.left.iter().any(|s| s.marked) && is_marked_then_plain(&c.right),
        // β ∈ Σ*, α ∈ Σ*Σ̄*
        StateKind::Target => !c.right.iter().any(|s| s.marked) && is_plain_then_marked(&c.left),
    };
    Ok(ok)
}

fn is_marked_then_plain(w: &[Symbol]) -> bool {
    let k = w.iter().take_while(|s| s.marked).count();
    w[k..].iter().all(|s| !s.marked)
}

fn is_plain_then_marked(w: &[Symbol]) -> bool {
    let k = w.iter().take_while(|s| !s.marked).count();
    w[k..].iter().all(|s| s.marked)
}

/// Which transition function acts on a configuration.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConfigClass {
    /// (neutral or source state, unmarked symbol): δ₀.
    S0,
    /// (source state, marked symbol): δ_s.
    Ss,
    /// (target state, unmarked symbol): δ_t.
    St,
}

/// Partition of configurations by how they can be entered, keyed on the
/// current state and the R-reverse symbol.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum TargetClass {
    T0,
    Ts,
    Tt,
}

pub fn classify(c: &Configuration, m: &Machine) -> Result<ConfigClass> {
    let kind = m.kind_checked(c.state)?;
    let u = c.current();
    match (kind, u.marked) {
        (StateKind::Neutral | StateKind::Source, false) => Ok(ConfigClass::S0),
        (StateKind::Source, true) => Ok(ConfigClass::Ss),
        (StateKind::Target, false) => Ok(ConfigClass::St),
        _ => Err(Error::Protocol(format!(
            "no transition applies to {}",
            m.render_config(c)
        ))),
    }
}

pub fn classify_target(c: &Configuration, m: &Machine) -> Result<TargetClass> {
    let kind = m.kind_checked(c.state)?;
    let v = c.reverse_right_symbol();
    match (kind, v.marked) {
        (StateKind::Neutral | StateKind::Target, false) => Ok(TargetClass::T0),
        (StateKind::Source, false) => Ok(TargetClass::Ts),
        (StateKind::Target, true) => Ok(TargetClass::Tt),
        _ => Err(Error::Protocol(format!(
            "{} cannot be entered by any transition",
            m.render_config(c)
        ))),
    }
}

/// `C[k]` for a final configuration `C` without marks: the current symbol
/// and the `k − 1` cells to its right are marked and the head sits just past
/// them, padding with marked blanks beyond the right content. `C[k]` is the
/// configuration reached from `C` after `k` steps.
pub fn mark_k(c: &Configuration, k: usize, m: &Machine) -> Result<Configuration> {
    if c.state != m.final_state() {
        return Err(Error::Argument(format!(
            "{} is not a final configuration",
            m.render_config(c)
        )));
    }
    if c.has_marks() {
        return Err(Error::Argument(format!(
            "{} already contains marked symbols",
            m.render_config(c)
        )));
    }
    let mut left = c.left.clone();
    let mut right = c.right.clone();
    for _ in 0..k {
        let u = if right.is_empty() {
            Symbol::BLANK
        } else {
            right.remove(0)
        };
        left.push(u.marked());
    }
    Ok(canonicalize(left, c.state, right))
}
