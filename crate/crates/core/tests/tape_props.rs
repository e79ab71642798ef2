mod common;

use proptest::prelude::*;
use qtm_core::machine::corpus;
use qtm_core::tape::{canonicalize, mark_k, reverse_step, step, val, well_formed};
use qtm_core::{Configuration, Direction, StateId, Symbol};

const B: Symbol = Symbol::BLANK;

fn sym() -> impl Strategy<Value = Symbol> {
    (0u8..3, any::<bool>()).prop_map(|(b, m)| {
        if m {
            Symbol::new(b).marked()
        } else {
            Symbol::new(b)
        }
    })
}

fn raw_config() -> impl Strategy<Value = Configuration> {
    (
        prop::collection::vec(sym(), 0..6),
        0u16..4,
        prop::collection::vec(sym(), 0..6),
    )
        .prop_map(|(l, q, r)| canonicalize(l, StateId(q), r))
}

fn dir() -> impl Strategy<Value = Direction> {
    prop_oneof![Just(Direction::L), Just(Direction::R)]
}

fn is_canonical(c: &Configuration) -> bool {
    c.left().first() != Some(&B) && c.right().last() != Some(&B)
}

/// The tape as an explicit cell list with the head index, padded with
/// `pad` blanks on both sides.
fn cells(c: &Configuration, pad: usize) -> (Vec<Symbol>, usize) {
    let mut t = vec![B; pad];
    t.extend_from_slice(c.left());
    let head = t.len();
    t.extend_from_slice(c.right());
    t.extend(std::iter::repeat_n(B, pad + 1));
    (t, head)
}

fn from_cells(t: &[Symbol], head: usize, q: StateId) -> Configuration {
    canonicalize(t[..head].to_vec(), q, t[head..].to_vec())
}

proptest! {
    #[test]
    fn canonicalize_is_idempotent(l in prop::collection::vec(sym(), 0..6), r in prop::collection::vec(sym(), 0..6)) {
        let c = canonicalize(l, StateId(0), r);
        prop_assert!(is_canonical(&c));
        prop_assert_eq!(canonicalize(c.left().to_vec(), c.state(), c.right().to_vec()), c);
    }

    /// The step map agrees with a write-and-move on an explicit padded tape.
    #[test]
    fn step_matches_explicit_tape(c in raw_config(), p in 0u16..4, v in sym(), d in dir()) {
        let (mut t, head) = cells(&c, 2);
        t[head] = v;
        let head = match d { Direction::L => head - 1, Direction::R => head + 1 };
        let expect = from_cells(&t, head, StateId(p));
        let got = step(&c, StateId(p), v, d);
        prop_assert!(is_canonical(&got));
        prop_assert_eq!(got, expect);
    }

    #[test]
    fn reverse_step_undoes_step(c in raw_config(), p in 0u16..4, v in sym(), d in dir()) {
        let d_conf = step(&c, StateId(p), v, d);
        let back = reverse_step(&d_conf, c.state(), c.current(), d);
        prop_assert!(is_canonical(&back));
        prop_assert_eq!(back, c);
    }

    /// `reverse_step(D, q, u, d) = C` forces `step(C, p, v_d, d) = D` where
    /// `v_R` is the symbol left of the head of `D` and `v_L` the symbol right
    /// of it.
    #[test]
    fn step_undoes_reverse_step(dc in raw_config(), q in 0u16..4, u in sym(), d in dir()) {
        let c = reverse_step(&dc, StateId(q), u, d);
        let v = match d {
            Direction::R => dc.reverse_right_symbol(),
            Direction::L => dc.reverse_left_symbol(),
        };
        prop_assert_eq!(step(&c, dc.state(), v, d), dc);
    }

    #[test]
    fn marking_keeps_the_value(l in prop::collection::vec(0u8..2, 0..5), r in prop::collection::vec(0u8..2, 0..5), k in 0usize..12) {
        let m = common::machine(corpus::SUCC_FINITE);
        let c = canonicalize(
            l.into_iter().map(Symbol::new).collect(),
            m.final_state(),
            r.into_iter().map(Symbol::new).collect(),
        );
        let ck = mark_k(&c, k, &m).unwrap();
        prop_assert_eq!(val(&ck), val(&c));
        prop_assert_eq!(ck.mark_count(), k);
        prop_assert!(well_formed(&ck, &m).unwrap());
    }
}

/// Reversing a configuration through two different directions never gives
/// the same configuration, as long as some non-current cell is nonblank.
#[test]
fn reverse_images_in_opposite_directions_differ() {
    let syms: Vec<Symbol> = (0u8..2)
        .flat_map(|b| [Symbol::new(b), Symbol::new(b).marked()])
        .collect();
    let mut words: Vec<Vec<Symbol>> = vec![vec![]];
    for len in 1..=2 {
        let mut next = Vec::new();
        for w in words.iter().filter(|w| w.len() == len - 1) {
            for &s in &syms {
                let mut x = w.clone();
                x.push(s);
                next.push(x);
            }
        }
        words.extend(next);
    }
    let mut checked = 0;
    for l in &words {
        for r in &words {
            let dc = canonicalize(l.clone(), StateId(0), r.clone());
            let non_current_blank = dc
                .left()
                .iter()
                .chain(dc.right().iter().skip(1))
                .all(|s| *s == B);
            if non_current_blank {
                continue;
            }
            for &u1 in &syms {
                for &u2 in &syms {
                    for (q1, q2) in [(1u16, 1u16), (1, 2)] {
                        let a = reverse_step(&dc, StateId(q1), u1, Direction::R);
                        let b = reverse_step(&dc, StateId(q2), u2, Direction::L);
                        assert_ne!(a, b, "{dc:?}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn step_and_reverse_examples() {
    let (q, p) = (StateId(0), StateId(1));
    let one = Symbol::ONE;
    let (a, b, c) = (Symbol::new(2), Symbol::new(3), Symbol::new(4));
    assert_eq!(
        step(&canonicalize(vec![], q, vec![one, one]), p, B, Direction::R),
        canonicalize(vec![], p, vec![one])
    );
    assert_eq!(
        step(&canonicalize(vec![a], q, vec![b]), p, c, Direction::L),
        canonicalize(vec![], p, vec![a, c])
    );
    assert_eq!(
        step(&canonicalize(vec![], q, vec![]), p, one, Direction::R),
        canonicalize(vec![one], p, vec![])
    );

    let start = canonicalize(vec![a], q, vec![one, b]);
    let after = step(&start, p, c, Direction::R);
    assert_eq!(reverse_step(&after, q, one, Direction::R), start);
    assert_eq!(
        reverse_step(&canonicalize(vec![], p, vec![]), q, B, Direction::R),
        canonicalize(vec![], q, vec![])
    );
}
