//! Bernstein–Vazirani machines and their conversion into machines with
//! source and target states.
//!
//! A B&V machine has a total transition function on `Q × Σ` and no marked
//! symbols. Its final state `qf` loops back into the initial state `q0`:
//! `δ(qf, a) = |q0, a, R⟩` for every symbol, and nothing else enters `q0`.
//! Conversion turns `q0` into the only source state and `qf` into the only
//! target state and drops the loop rows.
//!
//! B&V machines are simulated here on an absolute tape, independently of
//! the canonical configurations used by [`crate::evolution`].

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::{Amplitude, SparseVector};
use crate::machine::file::{self, Header};
use crate::machine::{check_rows, Machine, Rule, StateInfo, StateKind, UnitarityReport};
use crate::tape::{canonicalize, Alphabet, Configuration, Direction, StateId, Symbol};

/// Amplitude tolerance for trajectory comparison.
pub const TRAJECTORY_EPS: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct BvMachine {
    alphabet: Alphabet,
    states: Vec<String>,
    initial: StateId,
    final_state: StateId,
    rules: Vec<Rule>,
}

impl BvMachine {
    pub fn new(
        alphabet: Alphabet,
        states: Vec<String>,
        initial: StateId,
        final_state: StateId,
        rules: Vec<Rule>,
    ) -> Result<Self> {
        let n = states.len();
        if initial.index() >= n || final_state.index() >= n {
            return Err(Error::Structure(
                "initial or final state out of range".into(),
            ));
        }
        if initial == final_state {
            return Err(Error::Structure(
                "initial and final state must differ".into(),
            ));
        }
        let mut kept: Vec<Rule> = Vec::with_capacity(rules.len());
        for r in rules {
            if r.from.index() >= n || r.to.index() >= n {
                return Err(Error::Structure("rule refers to an unknown state".into()));
            }
            let ok = |s: Symbol| !s.is_marked() && (s.base() as usize) < alphabet.len();
            if !ok(r.read) || !ok(r.write) {
                return Err(Error::Structure(
                    "rule uses a symbol outside the alphabet".into(),
                ));
            }
            if !r.amp.re.is_finite() || !r.amp.im.is_finite() {
                return Err(Error::Structure("amplitude is not finite".into()));
            }
            if kept.iter().any(|k| {
                (k.from, k.read, k.to, k.write, k.dir) == (r.from, r.read, r.to, r.write, r.dir)
            }) {
                return Err(Error::Structure(format!(
                    "duplicate rule from ({}, {})",
                    states[r.from.index()],
                    alphabet.glyph(r.read)
                )));
            }
            if r.amp.norm_sqr() != 0.0 {
                kept.push(r);
            }
        }
        kept.sort_by_key(|r| (r.from, r.read, r.to, r.write, r.dir));
        Ok(Self {
            alphabet,
            states,
            initial,
            final_state,
            rules: kept,
        })
    }

    /// Parses a `bvqtm` file.
    pub fn parse(text: &str) -> Result<Self> {
        let t = file::parse(text)?;
        if t.header != Header::Bv {
            return Err(Error::Structure(
                "expected a `bvqtm` file, found `qtm`".into(),
            ));
        }
        Self::new(t.alphabet, t.states, t.initial, t.final_state, t.rules)
    }

    pub fn render(&self) -> String {
        file::render_bv(
            &self.alphabet,
            &self.states,
            self.initial,
            self.final_state,
            &self.rules,
        )
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
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

    fn row(&self, q: StateId, a: Symbol) -> impl Iterator<Item = &Rule> {
        self.rules
            .iter()
            .filter(move |r| r.from == q && r.read == a)
    }

    fn loop_rule(&self, a: Symbol) -> Rule {
        Rule {
            from: self.final_state,
            read: a,
            to: self.initial,
            write: a,
            dir: Direction::R,
            amp: Amplitude::new(1.0, 0.0),
        }
    }

    /// Adds the loop row `(qf, a) → (q0, a, R)` for every symbol `a` that has
    /// no row from the final state yet.
    pub fn complete_loops(&self) -> Self {
        let mut rules = self.rules.clone();
        for a in self.alphabet.symbols() {
            if self.row(self.final_state, a).next().is_none() {
                rules.push(self.loop_rule(a));
            }
        }
        Self::new(
            self.alphabet.clone(),
            self.states.clone(),
            self.initial,
            self.final_state,
            rules,
        )
        .expect("adding loop rows keeps the machine well-formed")
    }

    fn render_row(&self, (q, a): (StateId, Symbol)) -> String {
        format!("({}, {})", self.states[q.index()], self.alphabet.glyph(a))
    }
}

/// A violated structural constraint of a B&V machine.
#[derive(Clone, Debug, PartialEq)]
pub enum BvViolation {
    /// `(qf, a)` is not exactly the loop into the initial state.
    Loop { symbol: String },
    /// A rule other than a loop row enters the initial state.
    EntersInitial { row: String },
    /// `(q, a)` has no rule.
    MissingRow { row: String },
}

impl fmt::Display for BvViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BvViolation::Loop { symbol } => write!(
                f,
                "final row (qf, {symbol}) is not the loop into the initial state"
            ),
            BvViolation::EntersInitial { row } => write!(f, "row {row} enters the initial state"),
            BvViolation::MissingRow { row } => write!(f, "row {row} has no transitions"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BvReport {
    pub violations: Vec<BvViolation>,
    pub unitarity: UnitarityReport,
}

impl BvReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty() && self.unitarity.passes()
    }
}

impl fmt::Display for BvReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        write!(f, "{}", self.unitarity)
    }
}

/// Checks the loop constraints exactly and the local unitary conditions on
/// the whole of `Q × Σ` numerically.
pub fn validate_bv(bv: &BvMachine, eps: f64) -> BvReport {
    let mut violations = Vec::new();
    for a in bv.alphabet.symbols() {
        let row: Vec<&Rule> = bv.row(bv.final_state, a).collect();
        let expect = bv.loop_rule(a);
        if row.len() != 1 || *row[0] != expect {
            violations.push(BvViolation::Loop {
                symbol: bv.alphabet.glyph(a).to_string(),
            });
        }
    }
    for r in &bv.rules {
        if r.to == bv.initial && r.from != bv.final_state {
            violations.push(BvViolation::EntersInitial {
                row: bv.render_row((r.from, r.read)),
            });
        }
    }
    let mut domain = Vec::new();
    for q in 0..bv.states.len() {
        for a in bv.alphabet.symbols() {
            let row = (StateId(q as u16), a);
            if bv.row(row.0, a).next().is_none() && row.0 != bv.final_state {
                violations.push(BvViolation::MissingRow {
                    row: bv.render_row(row),
                });
            }
            domain.push(row);
        }
    }
    let unitarity = check_rows(
        &domain,
        &bv.rules,
        eps,
        |r| bv.render_row(r),
        |s| bv.alphabet.render_symbol(s),
    );
    BvReport {
        violations,
        unitarity,
    }
}

/// The machine with `Q_s = {q0}`, `Q_t = {qf}` and `δ₀` the restriction of
/// `δ` to the non-final rows. Fails unless both the B&V machine and the
/// result validate at `eps`.
pub fn convert(bv: &BvMachine, eps: f64) -> Result<Machine> {
    let report = validate_bv(bv, eps);
    if !report.passes() {
        return Err(Error::NotBv(report.to_string()));
    }
    let states = bv
        .states
        .iter()
        .enumerate()
        .map(|(i, name)| {
            let id = StateId(i as u16);
            let kind = if id == bv.initial {
                StateKind::Source
            } else if id == bv.final_state {
                StateKind::Target
            } else {
                StateKind::Neutral
            };
            StateInfo::new(name.clone(), kind)
        })
        .collect();
    let rules = bv
        .rules
        .iter()
        .filter(|r| r.from != bv.final_state)
        .copied()
        .collect();
    Machine::new(
        bv.alphabet.clone(),
        states,
        bv.initial,
        bv.final_state,
        rules,
    )?
    .validate(eps)
}

/// A B&V configuration on an absolute tape.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BvConfig {
    pub state: StateId,
    pub head: i64,
    /// Non-blank cells.
    pub cells: BTreeMap<i64, Symbol>,
}

impl BvConfig {
    /// `1^{n+1}` starting under the head at cell 0.
    pub fn input(state: StateId, n: u64) -> Self {
        Self {
            state,
            head: 0,
            cells: (0..=n as i64).map(|i| (i, Symbol::ONE)).collect(),
        }
    }

    fn read(&self) -> Symbol {
        self.cells.get(&self.head).copied().unwrap_or(Symbol::BLANK)
    }

    fn apply(&self, r: &Rule) -> Self {
        let mut cells = self.cells.clone();
        if r.write.is_blank() {
            cells.remove(&self.head);
        } else {
            cells.insert(self.head, r.write);
        }
        let head = match r.dir {
            Direction::L => self.head - 1,
            Direction::R => self.head + 1,
        };
        Self {
            state: r.to,
            head,
            cells,
        }
    }

    /// The configuration seen without absolute positions.
    pub fn to_configuration(&self) -> Configuration {
        let cell = |i: i64| self.cells.get(&i).copied().unwrap_or(Symbol::BLANK);
        let lo = self
            .cells
            .keys()
            .next()
            .copied()
            .unwrap_or(self.head)
            .min(self.head);
        let hi = self
            .cells
            .keys()
            .next_back()
            .copied()
            .unwrap_or(self.head)
            .max(self.head);
        let left = (lo..self.head).map(cell).collect();
        let right = (self.head..=hi).map(cell).collect();
        canonicalize(left, self.state, right)
    }
}

pub type BvSuperposition = SparseVector<BvConfig>;

/// One step of the B&V machine on a superposition.
pub fn bv_step(bv: &BvMachine, phi: &BvSuperposition) -> BvSuperposition {
    SparseVector::from_entries(phi.iter().flat_map(|(c, a)| {
        bv.row(c.state, c.read())
            .map(move |r| (c.apply(r), a * r.amp))
            .collect::<Vec<_>>()
    }))
}

pub fn bv_input(bv: &BvMachine, terms: &[(Amplitude, u64)]) -> BvSuperposition {
    SparseVector::from_entries(
        terms
            .iter()
            .map(|&(d, n)| (BvConfig::input(bv.initial, n), d)),
    )
}

/// Collapses absolute positions, summing amplitudes of configurations that
/// coincide without them.
pub fn forget_positions(phi: &BvSuperposition) -> SparseVector<Configuration> {
    SparseVector::from_entries(phi.iter().map(|(c, a)| (c.to_configuration(), *a)))
}

/// Compares the B&V trajectory on `|n̄⟩` with the trajectory of `m` for
/// steps `0..=k`, configuration by configuration.
pub fn bounded_equiv(bv: &BvMachine, m: &Machine, n: u64, k: usize) -> Result<bool> {
    let mut b = bv_input(bv, &[(Amplitude::new(1.0, 0.0), n)]);
    let mut q = SparseVector::basis(crate::tape::unary_input(m.initial_state(), n));
    for i in 0..=k {
        if i > 0 {
            b = bv_step(bv, &b);
            q = crate::evolution::apply_u(m, &q)?;
        }
        if forget_positions(&b).max_abs_diff(&q) > TRAJECTORY_EPS {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HaltStatus {
    /// All-final at step `k` and no final configuration before.
    Halted(usize),
    /// At `step` some but not all of the superposition is final.
    StationarityViolation {
        step: usize,
        final_mass: f64,
    },
    NotHalted,
}

/// Runs the B&V machine from `Σ d_k |n̄_k⟩` and reports the first step at
/// which the superposition is entirely final, provided that no earlier step
/// contained a final configuration.
pub fn halt_detect(bv: &BvMachine, input: &[(Amplitude, u64)], max_steps: usize) -> HaltStatus {
    let mut phi = bv_input(bv, input);
    for k in 0..=max_steps {
        if k > 0 {
            phi = bv_step(bv, &phi);
        }
        let final_mass: f64 = phi
            .iter()
            .filter(|(c, _)| c.state == bv.final_state)
            .map(|(_, a)| a.norm_sqr())
            .sum();
        let all_final = phi.keys().all(|c| c.state == bv.final_state);
        if all_final {
            return HaltStatus::Halted(k);
        }
        if final_mass > 0.0 {
            return HaltStatus::StationarityViolation {
                step: k,
                final_mass,
            };
        }
    }
    HaltStatus::NotHalted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::corpus;
    use crate::machine::DEFAULT_EPS;

    #[test]
    fn reversible_machine_with_loops_is_valid() {
        let bv = BvMachine::parse(corpus::SUCC_FINITE_BV).unwrap();
        let r = validate_bv(&bv, DEFAULT_EPS);
        assert!(r.passes(), "{r}");
    }

    #[test]
    fn missing_loops_are_reported_and_completed() {
        let bv = BvMachine::parse(corpus::SUCC_FINITE_BV_NO_LOOPS).unwrap();
        let r = validate_bv(&bv, DEFAULT_EPS);
        assert_eq!(r.violations.len(), 3);
        assert!(matches!(&r.violations[0], BvViolation::Loop { symbol } if symbol == "_"));
        assert!(convert(&bv, DEFAULT_EPS).is_err());
        let done = bv.complete_loops();
        assert_eq!(done.rules().len(), bv.rules().len() + bv.alphabet().len());
        assert!(validate_bv(&done, DEFAULT_EPS).passes());
    }

    #[test]
    fn extra_rule_into_initial_is_rejected() {
        let text = corpus::SUCC_FINITE_BV.replace("rule: b  $ -> qf 1 R", "rule: b  $ -> q0 1 R");
        let bv = BvMachine::parse(&text).unwrap();
        let r = validate_bv(&bv, DEFAULT_EPS);
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, BvViolation::EntersInitial { .. })));
    }

    #[test]
    fn conversion_keeps_states_and_drops_loops() {
        let bv = BvMachine::parse(corpus::SUCC_FINITE_BV).unwrap();
        let m = convert(&bv, DEFAULT_EPS).unwrap();
        assert!(m.is_validated());
        assert_eq!(m.states().len(), bv.states().len());
        assert_eq!(m.alphabet(), bv.alphabet());
        assert_eq!(m.rules().len(), bv.rules().len() - 3);
        assert!(m.rules().iter().all(|r| r.from != bv.final_state()));
        assert_eq!(m.kind(bv.initial_state()), StateKind::Source);
        assert_eq!(m.kind(bv.final_state()), StateKind::Target);
    }

    #[test]
    fn trajectories_agree_until_halting() {
        let bv = BvMachine::parse(corpus::SUCC_FINITE_BV).unwrap();
        let m = convert(&bv, DEFAULT_EPS).unwrap();
        for n in 0..=5u64 {
            let one = [(Amplitude::new(1.0, 0.0), n)];
            let HaltStatus::Halted(k) = halt_detect(&bv, &one, 100) else {
                panic!("successor must halt on {n}");
            };
            assert!(bounded_equiv(&bv, &m, n, k).unwrap());
        }
        assert_eq!(
            halt_detect(&bv, &[(Amplitude::new(1.0, 0.0), 4)], 3),
            HaltStatus::NotHalted
        );
    }

    #[test]
    fn mutated_amplitude_breaks_equivalence() {
        let bv = BvMachine::parse(corpus::SUCC_FINITE_BV).unwrap();
        let m = convert(&bv, DEFAULT_EPS).unwrap();
        let text =
            corpus::SUCC_FINITE_BV.replace("rule: r  1 -> r  1 R", "rule: r  1 -> r  1 R -1");
        let mutated = BvMachine::parse(&text).unwrap();
        assert!(!bounded_equiv(&mutated, &m, 2, 7).unwrap());
    }

    #[test]
    fn coin_superposition_violates_stationarity() {
        let bv = BvMachine::parse(corpus::COIN_BV).unwrap();
        assert!(validate_bv(&bv, DEFAULT_EPS).passes());
        match halt_detect(&bv, &corpus::coin_input(), 50) {
            HaltStatus::StationarityViolation { step, final_mass } => {
                assert_eq!(step, 3);
                assert!((final_mass - 0.5).abs() < 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn absolute_tape_matches_canonical_form() {
        let c = BvConfig {
            state: StateId(1),
            head: 3,
            cells: [(0, Symbol::ONE), (5, Symbol::new(2))]
                .into_iter()
                .collect(),
        };
        let expect = canonicalize(
            vec![Symbol::ONE, Symbol::BLANK, Symbol::BLANK],
            StateId(1),
            vec![Symbol::BLANK, Symbol::BLANK, Symbol::new(2)],
        );
        assert_eq!(c.to_configuration(), expect);
    }
}
