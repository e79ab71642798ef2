//! The time evolution operator `U` and its adjoint on finite superpositions.
//!
//! Each basis configuration contributes the rows of the transition function
//! selected by its class; contributions are computed per support entry
//! (optionally in parallel) and merged in canonical key order, so the result
//! does not depend on the execution mode. Nothing is normalized or pruned.

use crate::error::Result;
use crate::hilbert::{Accumulator, Amplitude, SparseVector};
use crate::machine::Machine;
use crate::par::{self, Exec};
use crate::tape::{
    classify, classify_target, reverse_step, step, well_formed, Configuration, Direction,
    TargetClass,
};

/// A finite linear combination of configurations.
pub type Superposition = SparseVector<Configuration>;

type Contributions = Vec<(Configuration, Amplitude)>;

fn forward(m: &Machine, c: &Configuration, a: Amplitude) -> Result<Contributions> {
    classify(c, m)?;
    Ok(m.delta(c.state(), c.current())?
        .into_iter()
        .map(|t| (step(c, t.to, t.write, t.dir), a * t.amp))
        .collect())
}

fn backward(m: &Machine, d: &Configuration, a: Amplitude) -> Result<Contributions> {
    let p = d.state();
    let v_r = d.reverse_right_symbol();
    let one = Amplitude::new(1.0, 0.0);
    Ok(match classify_target(d, m)? {
        TargetClass::T0 => {
            let v_l = d.reverse_left_symbol();
            let mut out = Vec::new();
            for inc in m.incoming(p, v_r, Direction::R) {
                out.push((
                    reverse_step(d, inc.from, inc.read, Direction::R),
                    a * inc.amp.conj(),
                ));
            }
            for inc in m.incoming(p, v_l, Direction::L) {
                out.push((
                    reverse_step(d, inc.from, inc.read, Direction::L),
                    a * inc.amp.conj(),
                ));
            }
            out
        }
        TargetClass::Ts => vec![(reverse_step(d, p, v_r.marked(), Direction::R), a * one)],
        TargetClass::Tt => vec![(reverse_step(d, p, v_r.unmarked(), Direction::R), a * one)],
    })
}

fn apply(
    m: &Machine,
    phi: &Superposition,
    exec: Exec,
    f: fn(&Machine, &Configuration, Amplitude) -> Result<Contributions>,
) -> Result<Superposition> {
    let entries: Vec<(&Configuration, &Amplitude)> = phi.iter().collect();
    let parts = par::map(exec, &entries, |&(c, &a)| f(m, c, a));
    let mut acc = Accumulator::new();
    for part in parts {
        for (c, a) in part? {
            acc.push(c, a);
        }
    }
    Ok(acc.finish())
}

/// `U φ` with the default execution mode.
pub fn apply_u(m: &Machine, phi: &Superposition) -> Result<Superposition> {
    apply_u_with(m, phi, Exec::default())
}

pub fn apply_u_with(m: &Machine, phi: &Superposition, exec: Exec) -> Result<Superposition> {
    apply(m, phi, exec, forward)
}

/// `U* φ`. Each configuration is sorted by how it can be entered: through a
/// main transition (both directions are reversed, with conjugated
/// amplitudes), through a source transition or through a target transition.
pub fn apply_u_adjoint(m: &Machine, phi: &Superposition) -> Result<Superposition> {
    apply_u_adjoint_with(m, phi, Exec::default())
}

pub fn apply_u_adjoint_with(m: &Machine, phi: &Superposition, exec: Exec) -> Result<Superposition> {
    apply(m, phi, exec, backward)
}

/// Lazily yields `φ, Uφ, U²φ, ...`. Stops after the first error.
pub struct Trajectory<'a> {
    machine: &'a Machine,
    next: Option<Superposition>,
    exec: Exec,
}

impl<'a> Trajectory<'a> {
    pub fn new(machine: &'a Machine, phi0: Superposition) -> Self {
        Self::with_exec(machine, phi0, Exec::default())
    }

    pub fn with_exec(machine: &'a Machine, phi0: Superposition, exec: Exec) -> Self {
        Self {
            machine,
            next: Some(phi0),
            exec,
        }
    }
}

impl Iterator for Trajectory<'_> {
    type Item = Result<Superposition>;

    fn next(&mut self) -> Option<Self::Item> {
        let current = self.next.take()?;
        match apply_u_with(self.machine, &current, self.exec) {
            Ok(n) => self.next = Some(n),
            Err(e) => return Some(Err(e)),
        }
        Some(Ok(current))
    }
}

/// `φ_0, ..., φ_k` with `φ_i = U^i φ_0`, computed on demand.
pub fn evolve(
    m: &Machine,
    phi0: Superposition,
    k: usize,
) -> impl Iterator<Item = Result<Superposition>> + '_ {
    Trajectory::new(m, phi0).take(k + 1)
}

/// `U^k φ`.
pub fn evolve_to(m: &Machine, phi0: &Superposition, k: usize) -> Result<Superposition> {
    let mut phi = phi0.clone();
    for _ in 0..k {
        phi = apply_u(m, &phi)?;
    }
    Ok(phi)
}

/// True when every configuration in the support is final.
pub fn is_final(m: &Machine, phi: &Superposition) -> bool {
    phi.keys().all(|c| m.is_final(c))
}

pub fn final_part(m: &Machine, phi: &Superposition) -> Superposition {
    phi.filter(|c, _| m.is_final(c))
}

pub fn nonfinal_part(m: &Machine, phi: &Superposition) -> Superposition {
    phi.filter(|c, _| !m.is_final(c))
}

/// Checks every support configuration against the placement rules for
/// marked symbols.
pub fn all_well_formed(m: &Machine, phi: &Superposition) -> Result<bool> {
    for c in phi.keys() {
        if !well_formed(c, m)? {
            return Ok(false);
        }
    }
    Ok(true)
}
