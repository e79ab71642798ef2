//! Reference machines.
//!
//! * `SUCC_FINITE` halts on every classical input `n` after `2n + 3` steps
//!   with `n + 1` ones on the tape.
//! * `COIN` halts on input 1 with output 2 and diverges on input 3.
//! * `SUCC_LIMIT` reaches output `n + 1` only in the limit: each step after
//!   the second splits off a halting branch of probability one half.
//! * `BROKEN_*` each violate exactly one local unitary condition.

use crate::error::Result;
use crate::hilbert::Amplitude;

use super::file::parse_qtm;
use super::Machine;

pub const SUCC_FINITE: &str = include_str!("../../machines/succ_finite.qtm");
pub const COIN: &str = include_str!("../../machines/coin.qtm");
pub const SUCC_LIMIT: &str = include_str!("../../machines/succ_limit.qtm");
pub const BROKEN_NORM: &str = include_str!("../../machines/broken_norm.qtm");
pub const BROKEN_ORTH: &str = include_str!("../../machines/broken_orth.qtm");
pub const BROKEN_SEP: &str = include_str!("../../machines/broken_sep.qtm");

pub const SUCC_FINITE_BV: &str = include_str!("../../machines/succ_finite.bv");
pub const SUCC_FINITE_BV_NO_LOOPS: &str = include_str!("../../machines/succ_finite_noloops.bv");
pub const COIN_BV: &str = include_str!("../../machines/coin.bv");

/// A named corpus entry with the inputs it is exercised on.
pub struct CorpusMachine {
    pub name: &'static str,
    pub text: &'static str,
    pub inputs: Vec<Vec<(Amplitude, u64)>>,
}

impl CorpusMachine {
    pub fn machine(&self) -> Result<Machine> {
        parse_qtm(self.text)
    }
}

fn classical(n: u64) -> Vec<(Amplitude, u64)> {
    vec![(Amplitude::new(1.0, 0.0), n)]
}

/// `1/√2·|1⟩ + 1/√2·|3⟩`.
pub fn coin_input() -> Vec<(Amplitude, u64)> {
    let s = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    vec![(s, 1), (s, 3)]
}

/// The valid machines with their reference inputs.
pub fn build_corpus() -> Vec<CorpusMachine> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        CorpusMachine {
            name: "succ_finite",
            text: SUCC_FINITE,
            inputs: (0..=5)
                .map(classical)
                .chain([vec![
                    (Amplitude::new(0.6, 0.0), 0),
                    (Amplitude::new(0.0, 0.8), 2),
                ]])
                .collect(),
        },
        CorpusMachine {
            name: "coin",
            text: COIN,
            inputs: vec![coin_input(), classical(1), classical(3)],
        },
        CorpusMachine {
            name: "succ_limit",
            text: SUCC_LIMIT,
            inputs: (0..=3)
                .map(classical)
                .chain([vec![
                    (Amplitude::new(s, 0.0), 0),
                    (Amplitude::new(-s, 0.0), 1),
                ]])
                .collect(),
        },
    ]
}

/// Machines failing condition 1, 2 and 3 respectively.
pub fn broken_machines() -> Vec<(u8, &'static str, &'static str)> {
    vec![
        (1, "broken_norm", BROKEN_NORM),
        (2, "broken_orth", BROKEN_ORTH),
        (3, "broken_sep", BROKEN_SEP),
    ]
}
