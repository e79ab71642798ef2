//! Machine definitions and validation against the local unitary conditions.
//!
//! Only the main transition function δ₀ is stored. The source and target
//! transitions are fixed by the state classes: a source state reading a
//! marked `ā` writes `a` and moves right, a target state reading `a` writes
//! `ā` and moves right, both with amplitude 1.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::Amplitude;
use crate::tape::{Alphabet, Configuration, Direction, StateId, Symbol};

pub mod corpus;
pub mod expr;
pub mod file;
mod unitarity;

pub use unitarity::{check_rows, UnitarityReport, Witness};

/// Default tolerance for the local unitary conditions.
pub const DEFAULT_EPS: f64 = 1e-9;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateKind {
    Neutral,
    Source,
    Target,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateInfo {
    pub name: String,
    pub kind: StateKind,
}

impl StateInfo {
    pub fn new(name: impl Into<String>, kind: StateKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

/// One nonzero entry `δ₀(from, read)(to, write, dir) = amp`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rule {
    pub from: StateId,
    pub read: Symbol,
    pub to: StateId,
    pub write: Symbol,
    pub dir: Direction,
    pub amp: Amplitude,
}

/// One outgoing branch of a transition row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Transition {
    pub to: StateId,
    pub write: Symbol,
    pub dir: Direction,
    pub amp: Amplitude,
}

/// A row of δ₀ entering `(to, write, dir)`, as seen from the target side.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Incoming {
    pub from: StateId,
    pub read: Symbol,
    pub amp: Amplitude,
}

#[derive(Clone, Debug)]
pub struct Machine {
    alphabet: Alphabet,
    states: Vec<StateInfo>,
    initial: StateId,
    final_state: StateId,
    rules: Vec<Rule>,
    rows: HashMap<(StateId, Symbol), Vec<Transition>>,
    incoming: HashMap<(StateId, Symbol, Direction), Vec<Incoming>>,
    validated: bool,
}

impl Machine {
    /// Builds a pre-QTM. Checks state classes and the signature of every
    /// rule; zero-amplitude rules are discarded. The local unitary
    /// conditions are not checked here, see [`Machine::validate`].
    pub fn new(
        alphabet: Alphabet,
        states: Vec<StateInfo>,
        initial: StateId,
        final_state: StateId,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        if states.len() > u16::MAX as usize {
            return Err(Error::Structure("too many states".into()));
        }
        for (i, s) in states.iter().enumerate() {
            if states[..i].iter().any(|t| t.name == s.name) {
                return Err(Error::Structure(format!("duplicate state `{}`", s.name)));
            }
        }
        let kind = |id: StateId| -> Result<StateKind> {
            states
                .get(id.index())
                .map(|s| s.kind)
                .ok_or_else(|| Error::UnknownState(format!("#{}", id.0)))
        };
        if kind(initial)? != StateKind::Source {
            return Err(Error::Structure(format!(
                "initial state `{}` must be a source state",
                states[initial.index()].name
            )));
        }
        if kind(final_state)? != StateKind::Target {
            return Err(Error::Structure(format!(
                "final state `{}` must be a target state",
                states[final_state.index()].name
            )));
        }

        let in_alphabet = |s: Symbol| !s.is_marked() && (s.base() as usize) < alphabet.len();
        let mut kept: Vec<Rule> = Vec::with_capacity(rules.len());
        for r in rules {
            let describe = || {
                format!(
                    "rule {} {} -> {} {} {}",
                    states.get(r.from.index()).map_or("?", |s| &s.name),
                    if in_alphabet(r.read) {
                        alphabet.glyph(r.read)
                    } else {
                        "?"
                    },
                    states.get(r.to.index()).map_or("?", |s| &s.name),
                    if in_alphabet(r.write) {
                        alphabet.glyph(r.write)
                    } else {
                        "?"
                    },
                    r.dir
                )
            };
            if !r.amp.re.is_finite() || !r.amp.im.is_finite() {
                return Err(Error::Structure(format!(
                    "{}: amplitude is not finite",
                    describe()
                )));
            }
            if !in_alphabet(r.read) || !in_alphabet(r.write) {
                return Err(Error::Structure(format!(
                    "{}: symbols must be unmarked alphabet symbols",
                    describe()
                )));
            }
            if kind(r.from)? == StateKind::Target {
                return Err(Error::Structure(format!(
                    "{}: target states have no main transitions",
                    describe()
                )));
            }
            if kind(r.to)? == StateKind::Source {
                return Err(Error::Structure(format!(
                    "{}: main transitions cannot enter a source state",
                    describe()
                )));
            }
            if kept.iter().any(|k| {
                (k.from, k.read, k.to, k.write, k.dir) == (r.from, r.read, r.to, r.write, r.dir)
            }) {
                return Err(Error::Structure(format!("{}: duplicate entry", describe())));
            }
            if r.amp.norm_sqr() != 0.0 {
                kept.push(r);
            }
        }
        kept.sort_by(|a, b| {
            (a.from, a.read, a.to, a.write, a.dir).cmp(&(b.from, b.read, b.to, b.write, b.dir))
        });

        let mut rows: HashMap<(StateId, Symbol), Vec<Transition>> = HashMap::new();
        let mut incoming: HashMap<(StateId, Symbol, Direction), Vec<Incoming>> = HashMap::new();
        for r in &kept {
            rows.entry((r.from, r.read)).or_default().push(Transition {
                to: r.to,
                write: r.write,
                dir: r.dir,
                amp: r.amp,
            });
            incoming
                .entry((r.to, r.write, r.dir))
                .or_default()
                .push(Incoming {
                    from: r.from,
                    read: r.read,
                    amp: r.amp,
                });
        }

        Ok(Self {
            alphabet,
            states,
            initial,
            final_state,
            rules: kept,
            rows,
            incoming,
            validated: false,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[StateInfo] {
        &self.states
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn initial_state(&self) -> StateId {
        self.initial
    }

    pub fn final_state(&self) -> StateId {
        self.final_state
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn state_name(&self, id: StateId) -> &str {
        self.states.get(id.index()).map_or("?", |s| s.name.as_str())
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s.name == name)
            .map(|i| StateId(i as u16))
    }

    pub fn kind(&self, id: StateId) -> StateKind {
        self.states[id.index()].kind
    }

    pub(crate) fn kind_checked(&self, id: StateId) -> Result<StateKind> {
        self.states
            .get(id.index())
            .map(|s| s.kind)
            .ok_or_else(|| Error::UnknownState(format!("#{}", id.0)))
    }

    pub fn is_final(&self, c: &Configuration) -> bool {
        c.state() == self.final_state
    }

    pub fn render_config(&self, c: &Configuration) -> String {
        c.render(&self.alphabet, self.state_name(c.state()))
    }

    pub fn render_row(&self, row: (StateId, Symbol)) -> String {
        format!(
            "({}, {})",
            self.state_name(row.0),
            self.alphabet.render_symbol(row.1)
        )
    }

    /// The domain of δ₀: non-target states times unmarked symbols.
    pub fn main_domain(&self) -> Vec<(StateId, Symbol)> {
        let mut out = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if s.kind != StateKind::Target {
                for a in self.alphabet.symbols() {
                    out.push((StateId(i as u16), a));
                }
            }
        }
        out
    }

    /// δ₀ row for `(q, a)`; empty when the row has no nonzero entries.
    pub fn row(&self, q: StateId, a: Symbol) -> &[Transition] {
        self.rows.get(&(q, a)).map_or(&[], Vec::as_slice)
    }

    pub(crate) fn incoming(&self, p: StateId, v: Symbol, d: Direction) -> &[Incoming] {
        self.incoming.get(&(p, v, d)).map_or(&[], Vec::as_slice)
    }

    /// The full transition function δ = δ₀ ∪ δ_s ∪ δ_t at `(q, u)`.
    pub fn delta(&self, q: StateId, u: Symbol) -> Result<Vec<Transition>> {
        let one = Amplitude::new(1.0, 0.0);
        match (self.kind_checked(q)?, u.is_marked()) {
            (StateKind::Neutral | StateKind::Source, false) => Ok(self.row(q, u).to_vec()),
            (StateKind::Source, true) => Ok(vec![Transition {
                to: q,
                write: u.unmarked(),
                dir: Direction::R,
                amp: one,
            }]),
            (StateKind::Target, false) => Ok(vec![Transition {
                to: q,
                write: u.marked(),
                dir: Direction::R,
                amp: one,
            }]),
            _ => Err(Error::Protocol(format!(
                "({}, {}) is outside the domain of the transition function",
                self.state_name(q),
                self.alphabet.render_symbol(u)
            ))),
        }
    }

    /// Rows of the main domain without any nonzero entry.
    pub fn missing_rows(&self) -> Vec<(StateId, Symbol)> {
        self.main_domain()
            .into_iter()
            .filter(|&(q, a)| self.row(q, a).is_empty())
            .collect()
    }

    pub fn check_local_unitarity(&self, eps: f64) -> UnitarityReport {
        check_rows(
            &self.main_domain(),
            &self.rules,
            eps,
            |row| self.render_row(row),
            |s| self.alphabet.render_symbol(s),
        )
    }

    /// Marks the machine as a QTM when every δ₀ row is present and the local
    /// unitary conditions hold within `eps`.
    pub fn validate(mut self, eps: f64) -> Result<Self> {
        if let Some(&(q, a)) = self.missing_rows().first() {
            return Err(Error::Incomplete {
                state: self.state_name(q).to_string(),
                symbol: self.alphabet.render_symbol(a),
            });
        }
        let report = self.check_local_unitarity(eps);
        if !report.passes() {
            return Err(Error::NotUnitary(Box::new(report)));
        }
        self.validated = true;
        Ok(self)
    }

    /// Rules grouped by source row, in canonical order.
    pub fn rules_by_row(&self) -> BTreeMap<(StateId, Symbol), Vec<Rule>> {
        let mut out: BTreeMap<(StateId, Symbol), Vec<Rule>> = BTreeMap::new();
        for r in &self.rules {
            out.entry((r.from, r.read)).or_default().push(*r);
        }
        out
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&file::render_qtm(self))
    }
}
