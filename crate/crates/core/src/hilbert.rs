//! Finite-support vectors of the Hilbert space spanned by a countable basis.
//!
//! A [`SparseVector`] is a finite linear combination of basis elements with
//! complex coefficients. Keys are kept in a `BTreeMap`, so iteration and
//! every accumulation run in canonical key order and results are
//! bit-reproducible.

use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Amplitude = Complex64;

/// Sums that cancel below this magnitude are removed.
pub const CANCEL_EPS: f64 = 1e-15;

#[derive(Clone, Debug, PartialEq)]
pub struct SparseVector<K: Ord> {
    entries: BTreeMap<K, Amplitude>,
}

impl<K: Ord> Default for SparseVector<K> {
    fn default() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }
}

impl<K: Ord + Clone> SparseVector<K> {
    pub fn new() -> Self {
        Self::default()
    }

    /// The base vector `|key⟩`.
    pub fn basis(key: K) -> Self {
        Self::single(key, Amplitude::new(1.0, 0.0))
    }

    pub fn single(key: K, amp: Amplitude) -> Self {
        let mut v = Self::new();
        if amp.norm_sqr() != 0.0 {
            v.entries.insert(key, amp);
        }
        v
    }

    /// Builds a vector from `(key, amplitude)` pairs. Repeated keys are
    /// summed; a key whose contributions cancel is dropped.
    pub fn from_entries<I: IntoIterator<Item = (K, Amplitude)>>(iter: I) -> Self {
        let mut acc = Accumulator::new();
        for (k, a) in iter {
            acc.push(k, a);
        }
        acc.finish()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &K) -> Amplitude {
        self.entries.get(key).copied().unwrap_or_default()
    }

    pub fn contains(&self, key: &K) -> bool {
        self.entries.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, &Amplitude)> {
        self.entries.iter()
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.keys()
    }

    pub fn into_entries(self) -> impl Iterator<Item = (K, Amplitude)> {
        self.entries.into_iter()
    }

    /// ⟨self|other⟩, conjugate-linear in `self`.
    pub fn inner(&self, other: &Self) -> Amplitude {
        inner_product(self, other)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut acc = Accumulator::new();
        for (k, a) in self.iter().chain(other.iter()) {
            acc.push(k.clone(), *a);
        }
        acc.finish()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Amplitude::new(-1.0, 0.0)))
    }

    pub fn scale(&self, factor: Amplitude) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .map(|(k, a)| (k.clone(), a * factor))
                .filter(|(_, a)| a.norm_sqr() != 0.0)
                .collect(),
        }
    }

    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroNorm);
        }
        Ok(self.scale(Amplitude::new(1.0 / n, 0.0)))
    }

    /// Drops entries with magnitude below `eps`. Evolution never calls this;
    /// it exists for callers that trade exactness for support size.
    pub fn prune(&self, eps: f64) -> Self {
        self.filter(|_, a| a.norm() >= eps)
    }

    /// Restriction to the entries satisfying `keep`.
    pub fn filter<F: Fn(&K, &Amplitude) -> bool>(&self, keep: F) -> Self {
        Self {
            entries: self
                .entries
                .iter()
                .filter(|(k, a)| keep(k, a))
                .map(|(k, a)| (k.clone(), *a))
                .collect(),
        }
    }

    /// Euclidean distance `‖self − other‖`.
    pub fn distance(&self, other: &Self) -> f64 {
        let mut sum = 0.0;
        for (k, a) in &self.entries {
            sum += (a - other.get(k)).norm_sqr();
        }
        for (k, b) in &other.entries {
            if !self.entries.contains_key(k) {
                sum += b.norm_sqr();
            }
        }
        sum.sqrt()
    }

    /// Largest entrywise amplitude difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, a) in &self.entries {
            worst = worst.max((a - other.get(k)).norm());
        }
        for (k, b) in &other.entries {
            if !self.entries.contains_key(k) {
                worst = worst.max(b.norm());
            }
        }
        worst
    }
}

/// ⟨x|y⟩ = Σ x(C)* y(C), summed over the common support in key order.
pub fn inner_product<K: Ord>(x: &SparseVector<K>, y: &SparseVector<K>) -> Amplitude {
    let (small, large, swap) = if x.entries.len() <= y.entries.len() {
        (x, y, false)
    } else {
        (y, x, true)
    };
    let mut sum = Amplitude::new(0.0, 0.0);
    for (k, a) in &small.entries {
        if let Some(b) = large.entries.get(k) {
            sum += if swap { b.conj() * a } else { a.conj() * b };
        }
    }
    sum
}

pub fn norm<K: Ord>(x: &SparseVector<K>) -> f64 {
    x.entries.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// Sums contributions per key. A key that received a single contribution is
/// kept unless it is exactly zero; a key that received several is dropped
/// when the sum cancels below [`CANCEL_EPS`].
pub(crate) struct Accumulator<K: Ord> {
    entries: BTreeMap<K, (Amplitude, u32)>,
}

impl<K: Ord> Accumulator<K> {
    pub(crate) fn new() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub(crate) fn push(&mut self, key: K, amp: Amplitude) {
        let slot = self
            .entries
            .entry(key)
            .or_insert((Amplitude::new(0.0, 0.0), 0));
        slot.0 += amp;
        slot.1 += 1;
    }

    pub(crate) fn finish(self) -> SparseVector<K> {
        SparseVector {
            entries: self
                .entries
                .into_iter()
                .filter(|(_, (a, hits))| {
                    let mag = a.norm();
                    mag != 0.0 && (*hits < 2 || mag >= CANCEL_EPS)
                })
                .map(|(k, (a, _))| (k, a))
                .collect(),
        }
    }
}
