use std::collections::BTreeMap;
use std::fmt;

use crate::hilbert::Amplitude;
use crate::tape::{Direction, StateId, Symbol};

use super::Rule;

/// Worst offender for one of the three conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness {
    pub condition: u8,
    pub description: String,
    pub deviation: f64,
}

/// Largest deviation observed for each local unitary condition: row norms
/// (1), row orthogonality (2) and the left/right separation sums (3).
#[derive(Clone, Debug, PartialEq)]
pub struct UnitarityReport {
    pub eps: f64,
    pub max_dev_norm: f64,
    pub max_dev_orth: f64,
    pub max_dev_sep: f64,
    pub worst_witnesses: Vec<Witness>,
}

impl UnitarityReport {
    pub fn passes(&self) -> bool {
        self.max_dev_norm <= self.eps
            && self.max_dev_orth <= self.eps
            && self.max_dev_sep <= self.eps
    }

    pub fn max_deviation(&self) -> f64 {
        self.max_dev_norm
            .max(self.max_dev_orth)
            .max(self.max_dev_sep)
    }
}

pub(crate) fn fmt_dev(d: f64) -> String {
    if d == 0.0 {
        "0".to_string()
    } else if d >= 1e-4 {
        let r = (d * 1e12).round() / 1e12;
        format!("{r}")
    } else {
        format!("{d:.3e}")
    }
}

impl fmt::Display for UnitarityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cond1 max_dev={}", fmt_dev(self.max_dev_norm))?;
        writeln!(f, "cond2 max_dev={}", fmt_dev(self.max_dev_orth))?;
        writeln!(f, "cond3 max_dev={}", fmt_dev(self.max_dev_sep))?;
        for w in &self.worst_witnesses {
            writeln!(
                f,
                "  cond{} worst {} dev={}",
                w.condition,
                w.description,
                fmt_dev(w.deviation)
            )?;
        }
        write!(
            f,
            "eps={:e} {}",
            self.eps,
            if self.passes() { "PASS" } else { "FAIL" }
        )
    }
}

type Row = (StateId, Symbol);

/// Evaluates the local unitary conditions over the rows in `domain`.
///
/// Condition (2) covers every unordered pair of distinct rows and condition
/// (3) every ordered pair of `(row, written symbol)` including a row with
/// itself. Only pairs sharing a target can give a nonzero sum, so both are
/// accumulated from an index by target. Sums run in canonical key order.
pub fn check_rows<R, S>(
    domain: &[Row],
    rules: &[Rule],
    eps: f64,
    render_row: R,
    render_symbol: S,
) -> UnitarityReport
where
    R: Fn(Row) -> String,
    S: Fn(Symbol) -> String,
{
    let zero = Amplitude::new(0.0, 0.0);

    // (1) row norms
    let mut norms: BTreeMap<Row, f64> = domain.iter().map(|&r| (r, 0.0)).collect();
    for r in rules {
        if let Some(n) = norms.get_mut(&(r.from, r.read)) {
            *n += r.amp.norm_sqr();
        }
    }
    let mut worst_norm: Option<(Row, f64)> = None;
    for (&row, &n) in &norms {
        let dev = (1.0 - n).abs();
        if worst_norm.is_none_or(|(_, w)| dev > w) {
            worst_norm = Some((row, dev));
        }
    }

    // index by target
    let mut by_target: BTreeMap<(StateId, Symbol, Direction), Vec<(Row, Amplitude)>> =
        BTreeMap::new();
    for r in rules {
        by_target
            .entry((r.to, r.write, r.dir))
            .or_default()
            .push(((r.from, r.read), r.amp));
    }
    for list in by_target.values_mut() {
        list.sort_by_key(|e| e.0);
    }

    // (2) Σ_t δ(b)(t)* δ(a)(t) for rows a < b
    let mut orth: BTreeMap<(Row, Row), Amplitude> = BTreeMap::new();
    for list in by_target.values() {
        for (i, &(ra, aa)) in list.iter().enumerate() {
            for &(rb, ab) in &list[i + 1..] {
                *orth.entry((ra, rb)).or_insert(zero) += ab.conj() * aa;
            }
        }
    }
    let mut worst_orth: Option<((Row, Row), f64)> = None;
    for (&key, s) in &orth {
        let dev = s.norm();
        if worst_orth.is_none_or(|(_, w)| dev > w) {
            worst_orth = Some((key, dev));
        }
    }

    // (3) Σ_p δ(a')(p, b', L)* δ(a)(p, b, R)
    type Entering = Vec<(Row, Symbol, Amplitude)>;
    let mut per_state: BTreeMap<StateId, (Entering, Entering)> = BTreeMap::new();
    for (&(p, b, d), list) in &by_target {
        let slot = per_state.entry(p).or_default();
        for &(row, amp) in list {
            match d {
                Direction::R => slot.0.push((row, b, amp)),
                Direction::L => slot.1.push((row, b, amp)),
            }
        }
    }
    let mut sep: BTreeMap<(Row, Symbol, Row, Symbol), Amplitude> = BTreeMap::new();
    for (rights, lefts) in per_state.values() {
        for &(ra, b, amp_r) in rights {
            for &(rl, b2, amp_l) in lefts {
                *sep.entry((ra, b, rl, b2)).or_insert(zero) += amp_l.conj() * amp_r;
            }
        }
    }
    let mut worst_sep: Option<((Row, Symbol, Row, Symbol), f64)> = None;
    for (&key, s) in &sep {
        let dev = s.norm();
        if worst_sep.is_none_or(|(_, w)| dev > w) {
            worst_sep = Some((key, dev));
        }
    }

    let mut witnesses = Vec::new();
    if let Some((row, dev)) = worst_norm.filter(|&(_, d)| d > 0.0) {
        witnesses.push(Witness {
            condition: 1,
            description: render_row(row),
            deviation: dev,
        });
    }
    if let Some(((a, b), dev)) = worst_orth.filter(|&(_, d)| d > 0.0) {
        witnesses.push(Witness {
            condition: 2,
            description: format!("{} / {}", render_row(a), render_row(b)),
            deviation: dev,
        });
    }
    if let Some(((a, b, a2, b2), dev)) = worst_sep.filter(|&(_, d)| d > 0.0) {
        witnesses.push(Witness {
            condition: 3,
            description: format!(
                "{} writing {} R / {} writing {} L",
                render_row(a),
                render_symbol(b),
                render_row(a2),
                render_symbol(b2)
            ),
            deviation: dev,
        });
    }

    UnitarityReport {
        eps,
        max_dev_norm: worst_norm.map_or(0.0, |(_, d)| d),
        max_dev_orth: worst_orth.map_or(0.0, |(_, d)| d),
        max_dev_sep: worst_sep.map_or(0.0, |(_, d)| d),
        worst_witnesses: witnesses,
    }
}
