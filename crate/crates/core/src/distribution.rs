//! Partial probability distributions over the naturals and computed outputs.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::evolution::{apply_u, is_final, nonfinal_part, Superposition};
use crate::hilbert::{Amplitude, SparseVector};
use crate::machine::Machine;
use crate::tape::{unary_input, val};

/// Slack for pointwise comparisons and the total-mass bound.
pub const PPD_SLACK: f64 = 1e-12;
/// Steps over which the mass gain must stay below `settle_eps`.
pub const SETTLE_WINDOW: usize = 50;
pub const DEFAULT_SETTLE_EPS: f64 = 1e-6;
/// Tolerance on the norm of an input superposition.
pub const INPUT_NORM_EPS: f64 = 1e-9;

/// A partial probability distribution. Only nonzero masses are stored; the
/// mass of ⊥ is whatever is missing from 1.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Ppd {
    mass: BTreeMap<u64, f64>,
}

impl Ppd {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a distribution from `(n, p)` pairs, summing repeats.
    pub fn from_masses<I: IntoIterator<Item = (u64, f64)>>(iter: I) -> Self {
        let mut mass = BTreeMap::new();
        for (n, p) in iter {
            *mass.entry(n).or_insert(0.0) += p;
        }
        mass.retain(|_, p| *p != 0.0);
        Self { mass }
    }

    pub fn get(&self, n: u64) -> f64 {
        self.mass.get(&n).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, f64)> + '_ {
        self.mass.iter().map(|(&n, &p)| (n, p))
    }

    pub fn len(&self) -> usize {
        self.mass.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mass.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.mass.values().sum()
    }

    /// `1 − Σ p(n)`, clamped at 0.
    pub fn bottom(&self) -> f64 {
        (1.0 - self.total()).max(0.0)
    }

    /// Pointwise `self(n) ≤ other(n) + 1e-12` for every `n`.
    pub fn leq(&self, other: &Ppd) -> bool {
        self.mass
            .iter()
            .all(|(&n, &p)| p <= other.get(n) + PPD_SLACK)
    }

    pub fn max_abs_diff(&self, other: &Ppd) -> f64 {
        self.mass
            .keys()
            .chain(other.mass.keys())
            .map(|&n| (self.get(n) - other.get(n)).abs())
            .fold(0.0, f64::max)
    }

    /// `n<TAB>p` lines in increasing `n`, then `BOTTOM<TAB>residual`.
    pub fn render(&self) -> String {
        self.render_with("BOTTOM")
    }

    pub fn render_with(&self, bottom_label: &str) -> String {
        let mut out = String::new();
        for (n, p) in self.iter() {
            out.push_str(&format!("{n}\t{}\n", format_prob(p)));
        }
        out.push_str(&format!("{bottom_label}\t{}\n", format_prob(self.bottom())));
        out
    }
}

impl fmt::Display for Ppd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Fixed-point rendering with twelve decimals.
pub fn format_prob(p: f64) -> String {
    let s = format!("{p:.12}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// `p(n) = Σ |φ(C)|²` over final configurations `C` with `val(C) = n`.
pub fn ppd_of(m: &Machine, phi: &Superposition) -> Ppd {
    Ppd::from_masses(
        phi.iter()
            .filter(|(c, _)| m.is_final(c))
            .map(|(c, a)| (val(c), a.norm_sqr())),
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OutputStatus {
    /// The superposition at this step is entirely final; the distribution is
    /// exact and constant from here on.
    Finitary(usize),
    /// Mass gained over the last [`SETTLE_WINDOW`] steps stayed below the
    /// threshold. The residual is the missing mass.
    ConvergedEstimate(f64),
    /// Neither of the above within the step budget.
    BudgetExhausted(f64),
}

// Residuals are often far below the resolution of `format_prob`.
impl fmt::Display for OutputStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputStatus::Finitary(k) => write!(f, "FINITARY {k}"),
            OutputStatus::ConvergedEstimate(r) => write!(f, "CONVERGED {r:.6e}"),
            OutputStatus::BudgetExhausted(r) => write!(f, "BUDGET {r:.6e}"),
        }
    }
}

/// Evolves `phi0` for at most `max_steps` steps and estimates the limit of
/// the distributions `ppd_of(φ_k)`.
///
/// Returns `Finitary(k)` at the first all-final `φ_k`. Otherwise the last
/// distribution is returned, labelled converged when a full window of
/// [`SETTLE_WINDOW`] steps fits in the budget and the mass gained over it is
/// below `settle_eps`.
pub fn computed_output(
    m: &Machine,
    phi0: &Superposition,
    max_steps: usize,
    settle_eps: f64,
) -> Result<(Ppd, OutputStatus)> {
    let mut phi = phi0.clone();
    let mut totals = Vec::with_capacity(max_steps + 1);
    let mut ppd = ppd_of(m, &phi);
    for k in 0..=max_steps {
        if k > 0 {
            phi = apply_u(m, &phi)?;
            ppd = ppd_of(m, &phi);
        }
        if is_final(m, &phi) {
            return Ok((ppd, OutputStatus::Finitary(k)));
        }
        totals.push(ppd.total());
    }
    // equal to 1 − Σ p(n) but without the cancellation
    let residual = nonfinal_part(m, &phi).norm_sqr();
    let status = if max_steps >= SETTLE_WINDOW
        && totals[max_steps] - totals[max_steps - SETTLE_WINDOW] < settle_eps
    {
        OutputStatus::ConvergedEstimate(residual)
    } else {
        OutputStatus::BudgetExhausted(residual)
    };
    Ok((ppd, status))
}

/// `Σ d_k |n̄_k⟩` with `n̄ = 1^{n+1}` in the initial state.
pub fn encode_input(m: &Machine, terms: &[(Amplitude, u64)]) -> Result<Superposition> {
    if terms.is_empty() {
        return Err(Error::Input("empty superposition".into()));
    }
    for (i, (_, n)) in terms.iter().enumerate() {
        if terms[..i].iter().any(|(_, k)| k == n) {
            return Err(Error::Input(format!("|{n}> appears more than once")));
        }
    }
    let norm_sqr: f64 = terms.iter().map(|(d, _)| d.norm_sqr()).sum();
    if (norm_sqr.sqrt() - 1.0).abs() > INPUT_NORM_EPS {
        return Err(Error::Input(format!(
            "norm is {} instead of 1",
            norm_sqr.sqrt()
        )));
    }
    Ok(SparseVector::from_entries(
        terms
            .iter()
            .map(|&(d, n)| (unary_input(m.initial_state(), n), d)),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machine::corpus;
    use crate::machine::file::parse_qtm;
    use crate::tape::{canonicalize, Symbol};

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn ppd_examples() {
        let m = parse_qtm(corpus::SUCC_FINITE).unwrap();
        let (q0, qf) = (m.initial_state(), m.final_state());
        let o = Symbol::ONE;

        let nonfinal = SparseVector::basis(canonicalize(vec![], q0, vec![o]));
        let p = ppd_of(&m, &nonfinal);
        assert!(p.is_empty());
        assert_eq!(p.bottom(), 1.0);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let two = canonicalize(vec![o], qf, vec![o]);
        let four = canonicalize(vec![o, o], qf, vec![o, o]);
        let p = ppd_of(
            &m,
            &SparseVector::from_entries([(two.clone(), c(s)), (four, c(s))]),
        );
        assert!((p.get(2) - 0.5).abs() < 1e-15 && (p.get(4) - 0.5).abs() < 1e-15);

        let three_a = canonicalize(vec![o], qf, vec![o, o]);
        let three_b = canonicalize(vec![o, o, o], qf, vec![]);
        let p = ppd_of(
            &m,
            &SparseVector::from_entries([(three_a, c(0.6)), (three_b, Amplitude::new(0.0, 0.8))]),
        );
        assert!((p.get(3) - 1.0).abs() < 1e-15);
        assert_eq!(p.len(), 1);
    }

    #[test]
    fn ordering_examples() {
        let a = Ppd::from_masses([(2, 0.5)]);
        assert!(a.leq(&a));
        assert!(a.leq(&Ppd::from_masses([(2, 0.5), (3, 0.1)])));
        assert!(!a.leq(&Ppd::from_masses([(3, 0.9)])));
    }

    #[test]
    fn rendering() {
        assert_eq!(Ppd::new().render(), "BOTTOM\t1.000000000000\n");
        let p = Ppd::from_masses([(4, 1.0)]);
        assert_eq!(p.render(), "4\t1.000000000000\nBOTTOM\t0.000000000000\n");
        assert_eq!(format_prob(-1e-17), "0.000000000000");
        assert_eq!(
            OutputStatus::ConvergedEstimate(0.25).to_string(),
            "CONVERGED 2.500000e-1"
        );
    }

    #[test]
    fn encode_input_examples() {
        let m = parse_qtm(corpus::SUCC_FINITE).unwrap();
        let phi = encode_input(&m, &[(c(1.0), 0)]).unwrap();
        assert_eq!(
            phi,
            SparseVector::basis(canonicalize(vec![], m.initial_state(), vec![Symbol::ONE]))
        );
        let phi = encode_input(&m, &corpus::coin_input()).unwrap();
        assert_eq!(phi.len(), 2);
        assert!(matches!(
            encode_input(&m, &[(c(1.0), 0), (c(1.0), 1)]),
            Err(Error::Input(_))
        ));
        assert!(matches!(
            encode_input(&m, &[(c(0.6), 1), (c(0.8), 1)]),
            Err(Error::Input(_))
        ));
        assert!(encode_input(&m, &[]).is_err());
    }

    #[test]
    fn computed_output_statuses() {
        let succ = parse_qtm(corpus::SUCC_FINITE).unwrap();
        let phi = encode_input(&succ, &[(c(1.0), 3)]).unwrap();
        let (p, st) = computed_output(&succ, &phi, 100, DEFAULT_SETTLE_EPS).unwrap();
        assert_eq!(st, OutputStatus::Finitary(9));
        assert_eq!(p, Ppd::from_masses([(4, 1.0)]));

        let lim = parse_qtm(corpus::SUCC_LIMIT).unwrap();
        let phi = encode_input(&lim, &[(c(1.0), 1)]).unwrap();
        let (p, st) = computed_output(&lim, &phi, 1, DEFAULT_SETTLE_EPS).unwrap();
        assert!(matches!(st, OutputStatus::BudgetExhausted(r) if r == 1.0));
        assert!(p.is_empty());
        let (p, st) = computed_output(&lim, &phi, 120, DEFAULT_SETTLE_EPS).unwrap();
        match st {
            OutputStatus::ConvergedEstimate(r) => assert!(r <= DEFAULT_SETTLE_EPS),
            other => panic!("unexpected {other:?}"),
        }
        assert!(p.get(2) > 1.0 - 1e-9);
    }
}
