#![allow(dead_code)]

use proptest::prelude::*;
use qtm_core::machine::corpus;
use qtm_core::machine::file::parse_qtm;
use qtm_core::machine::StateKind;
use qtm_core::tape::canonicalize;
use qtm_core::{Amplitude, Configuration, Machine, StateId, Superposition, Symbol};

pub fn corpus_machines() -> Vec<(&'static str, Machine)> {
    corpus::build_corpus()
        .into_iter()
        .map(|c| (c.name, c.machine().unwrap().validate(1e-9).unwrap()))
        .collect()
}

pub fn machine(text: &str) -> Machine {
    parse_qtm(text).unwrap()
}

fn word(alphabet: usize, max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    prop::collection::vec((0..alphabet as u8).prop_map(Symbol::new), 0..=max_len)
}

fn marked_word(alphabet: usize, max_len: usize) -> impl Strategy<Value = Vec<Symbol>> {
    word(alphabet, max_len).prop_map(|w| w.into_iter().map(Symbol::marked).collect())
}

/// A random well-formed configuration of `m` with at most `max_len` cells on
/// each side of the head.
pub fn config(m: &Machine, max_len: usize) -> BoxedStrategy<Configuration> {
    let n = m.alphabet().len();
    let kinds: Vec<StateKind> = m.states().iter().map(|s| s.kind).collect();
    (0..kinds.len())
        .prop_flat_map(move |q| {
            let state = StateId(q as u16);
            match kinds[q] {
                StateKind::Neutral => (word(n, max_len), word(n, max_len))
                    .prop_map(move |(l, r)| canonicalize(l, state, r))
                    .boxed(),
                StateKind::Source => (word(n, max_len), marked_word(n, max_len), word(n, max_len))
                    .prop_map(move |(l, mut r, rest)| {
                        r.extend(rest);
                        canonicalize(l, state, r)
                    })
                    .boxed(),
                StateKind::Target => (word(n, max_len), marked_word(n, max_len), word(n, max_len))
                    .prop_map(move |(mut l, marks, r)| {
                        l.extend(marks);
                        canonicalize(l, state, r)
                    })
                    .boxed(),
            }
        })
        .boxed()
}

pub fn amplitude() -> impl Strategy<Value = Amplitude> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Amplitude::new(re, im))
}

/// A random superposition with up to `max_support` entries; not normalized.
pub fn superposition(
    m: &Machine,
    max_support: usize,
    max_len: usize,
) -> BoxedStrategy<Superposition> {
    prop::collection::vec((config(m, max_len), amplitude()), 1..=max_support)
        .prop_map(Superposition::from_entries)
        .boxed()
}

pub fn normalized(m: &Machine, max_support: usize, max_len: usize) -> BoxedStrategy<Superposition> {
    superposition(m, max_support, max_len)
        .prop_filter("nonzero", |v| v.norm() > 1e-3)
        .prop_map(|v| v.normalize().unwrap())
        .boxed()
}

/// Every unmarked configuration in a non-target state whose tape fits in
/// `cells` cells, with the head on any cell except the outermost two.
pub fn window_configurations(m: &Machine, cells: usize) -> Vec<Configuration> {
    let n = m.alphabet().len();
    let mut out = std::collections::BTreeSet::new();
    let total = n.pow(cells as u32);
    for (q, s) in m.states().iter().enumerate() {
        if s.kind == StateKind::Target {
            continue;
        }
        for code in 0..total {
            let mut x = code;
            let tape: Vec<Symbol> = (0..cells)
                .map(|_| {
                    let s = Symbol::new((x % n) as u8);
                    x /= n;
                    s
                })
                .collect();
            for head in 1..cells - 1 {
                out.insert(canonicalize(
                    tape[..head].to_vec(),
                    StateId(q as u16),
                    tape[head..].to_vec(),
                ));
            }
        }
    }
    out.into_iter().collect()
}

/// Largest `|⟨UC, UC'⟩ − δ(C, C')|` over the given configurations.
pub fn gram_deviation(m: &Machine, configs: &[Configuration]) -> f64 {
    let images: Vec<Superposition> = configs
        .iter()
        .map(|c| qtm_core::evolution::apply_u(m, &Superposition::basis(c.clone())).unwrap())
        .collect();
    let mut dev = 0.0f64;
    for (i, x) in images.iter().enumerate() {
        for (j, y) in images.iter().enumerate().skip(i) {
            let expect = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((x.inner(y) - Amplitude::new(expect, 0.0)).norm());
        }
    }
    dev
}
