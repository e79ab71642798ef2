//! Output measurements interleaved with the unitary evolution.
//!
//! A schedule `τ` lists the steps at which the output is observed. At step
//! `h = τ(i)` the superposition `φ_h` of a run is measured: every final
//! configuration `C` in its support is a branch with probability `|φ(C)|²`
//! that collapses onto `|C⟩`, and the nonfinal part, when present, is one
//! more branch (outcome ⊥) that collapses onto its normalization. The
//! recorded state of a run at step `h` is the collapsed one. Once a run has
//! collapsed onto a final configuration every later measurement repeats the
//! same outcome with probability 1, so such runs are advanced without
//! branching.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::distribution::Ppd;
use crate::error::{Error, Result};
use crate::evolution::{apply_u, final_part, nonfinal_part, Superposition};
use crate::hilbert::{Amplitude, SparseVector};
use crate::machine::Machine;
use crate::par::{self, Exec};
use crate::rng::Rng;
use crate::tape::val;

/// Default limit on the number of live branches during enumeration.
pub const DEFAULT_BRANCH_CAP: usize = 100_000;
/// Tolerance on the norm of a measured superposition.
pub const MEASURE_NORM_EPS: f64 = 1e-9;

/// Strictly increasing observation times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schedule {
    /// `τ(i) = offset + stride·i`.
    Affine {
        offset: u64,
        stride: u64,
    },
    Explicit(Vec<u64>),
}

impl Schedule {
    pub fn affine(offset: u64, stride: u64) -> Result<Self> {
        if stride == 0 {
            return Err(Error::Schedule("stride must be at least 1".into()));
        }
        Ok(Schedule::Affine { offset, stride })
    }

    pub fn explicit(points: Vec<u64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Schedule("empty schedule".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Schedule("points must be strictly increasing".into()));
        }
        Ok(Schedule::Explicit(points))
    }

    /// Whether `h = τ(i)` for some `i`.
    pub fn contains(&self, h: u64) -> bool {
        match self {
            Schedule::Affine { offset, stride } => {
                h >= *offset && (h - offset).is_multiple_of(*stride)
            }
            Schedule::Explicit(p) => p.binary_search(&h).is_ok(),
        }
    }

    /// Schedule points `≤ k`.
    pub fn points_up_to(&self, k: u64) -> Vec<u64> {
        match self {
            Schedule::Affine { offset, stride } => {
                if k < *offset {
                    Vec::new()
                } else {
                    (0..=(k - offset) / stride)
                        .map(|i| offset + stride * i)
                        .collect()
                }
            }
            Schedule::Explicit(p) => p.iter().copied().take_while(|&h| h <= k).collect(),
        }
    }
}

impl FromStr for Schedule {
    type Err = Error;

    /// `a+b*i`, `b*i`, `i` or a comma-separated list such as `0,3,7,20`.
    fn from_str(s: &str) -> Result<Self> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let num = |t: &str| -> Result<u64> {
            t.parse::<u64>()
                .map_err(|_| Error::Schedule(format!("`{t}` is not a natural number in `{s}`")))
        };
        if compact.is_empty() {
            return Err(Error::Schedule("empty schedule".into()));
        }
        if compact.ends_with('i') {
            let (offset, term) = match compact.rsplit_once('+') {
                Some((a, t)) => (num(a)?, t),
                None => (0, compact.as_str()),
            };
            let stride = match term.strip_suffix('i') {
                Some("") => 1,
                Some(b) => match b.strip_suffix('*') {
                    Some(b) => num(b)?,
                    None => return Err(Error::Schedule(format!("expected `a+b*i`, found `{s}`"))),
                },
                None => unreachable!(),
            };
            return Schedule::affine(offset, stride);
        }
        Schedule::explicit(compact.split(',').map(num).collect::<Result<_>>()?)
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Schedule::Affine { offset, stride } => write!(f, "{offset}+{stride}*i"),
            Schedule::Explicit(p) => {
                let parts: Vec<String> = p.iter().map(u64::to_string).collect();
                f.write_str(&parts.join(","))
            }
        }
    }
}

/// The result of an output measurement: a natural number, or ⊥ when no
/// final configuration was found.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Value(u64),
    Bottom,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Value(n) => write!(f, "{n}"),
            Outcome::Bottom => f.write_str("BOT"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputObservation {
    pub outcome: Outcome,
    pub collapsed: Superposition,
    pub probability: f64,
}

/// Splits `φ` into its measurement branches: one per final configuration in
/// canonical order, then ⊥ if there is nonfinal mass.
pub fn measure_output(m: &Machine, phi: &Superposition) -> Result<Vec<OutputObservation>> {
    let n = phi.norm();
    if (n - 1.0).abs() > MEASURE_NORM_EPS {
        return Err(Error::Argument(format!(
            "measured superposition has norm {n} instead of 1"
        )));
    }
    let mut out = Vec::new();
    for (c, a) in final_part(m, phi).iter() {
        out.push(OutputObservation {
            outcome: Outcome::Value(val(c)),
            collapsed: SparseVector::single(c.clone(), a / a.norm()),
            probability: a.norm_sqr(),
        });
    }
    let rest = nonfinal_part(m, phi);
    if !rest.is_empty() {
        out.push(OutputObservation {
            outcome: Outcome::Bottom,
            probability: rest.norm_sqr(),
            collapsed: rest.normalize()?,
        });
    }
    Ok(out)
}

/// One measurement along a run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observation {
    pub step: u64,
    pub outcome: Outcome,
    /// Conditional probability of this branch given the run so far.
    pub probability: f64,
}

/// A finite observed run `R[k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteRun {
    /// `ψ_0, ..., ψ_k`; only the last is kept when states are not recorded.
    pub states: Vec<Superposition>,
    pub observations: Vec<Observation>,
    /// Product of the branch probabilities.
    pub probability: f64,
}

impl FiniteRun {
    /// The first numeric outcome of the run, or ⊥.
    pub fn outcome(&self) -> Outcome {
        self.observations
            .iter()
            .map(|o| o.outcome)
            .find(|o| matches!(o, Outcome::Value(_)))
            .unwrap_or(Outcome::Bottom)
    }

    pub fn last(&self) -> &Superposition {
        self.states.last().expect("a run has at least one state")
    }

    fn frozen(&self) -> bool {
        matches!(self.outcome(), Outcome::Value(_))
    }
}

/// Options for exact run enumeration.
#[derive(Clone, Copy, Debug)]
pub struct EnumOptions {
    pub branch_cap: usize,
    pub exec: Exec,
    /// Keep the whole state sequence of every run.
    pub keep_states: bool,
}

impl Default for EnumOptions {
    fn default() -> Self {
        Self {
            branch_cap: DEFAULT_BRANCH_CAP,
            exec: Exec::default(),
            keep_states: true,
        }
    }
}

fn advance(m: &Machine, run: &FiniteRun, keep: bool) -> Result<FiniteRun> {
    let next = apply_u(m, run.last())?;
    let mut states = if keep { run.states.clone() } else { Vec::new() };
    states.push(next);
    Ok(FiniteRun {
        states,
        observations: run.observations.clone(),
        probability: run.probability,
    })
}

fn observe(m: &Machine, run: FiniteRun, h: u64) -> Result<Vec<FiniteRun>> {
    if let Outcome::Value(n) = run.outcome() {
        let mut run = run;
        run.observations.push(Observation {
            step: h,
            outcome: Outcome::Value(n),
            probability: 1.0,
        });
        return Ok(vec![run]);
    }
    let branches = measure_output(m, run.last())?;
    let count = branches.len();
    let mut out = Vec::with_capacity(count);
    let mut run = Some(run);
    for (i, b) in branches.into_iter().enumerate() {
        let mut r = if i + 1 == count {
            run.take().expect("run used once")
        } else {
            run.as_ref().expect("run still present").clone()
        };
        *r.states.last_mut().expect("nonempty") = b.collapsed;
        r.observations.push(Observation {
            step: h,
            outcome: b.outcome,
            probability: b.probability,
        });
        r.probability *= b.probability;
        out.push(r);
    }
    Ok(out)
}

/// All τ-observed runs of length `depth` from `phi0`, in a canonical order.
pub fn enumerate_runs_with(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    depth: u64,
    opts: EnumOptions,
) -> Result<Vec<FiniteRun>> {
    let mut runs = vec![FiniteRun {
        states: vec![phi0.clone()],
        observations: Vec::new(),
        probability: 1.0,
    }];
    for h in 0..=depth {
        if h > 0 {
            runs = par::map(opts.exec, &runs, |r| advance(m, r, opts.keep_states))
                .into_iter()
                .collect::<Result<_>>()?;
        }
        if schedule.contains(h) {
            let expanded: Vec<Result<Vec<FiniteRun>>> = if runs.iter().all(FiniteRun::frozen) {
                runs.into_iter().map(|r| observe(m, r, h)).collect()
            } else {
                par::map(opts.exec, &runs, |r| observe(m, r.clone(), h))
            };
            let mut next = Vec::new();
            for part in expanded {
                next.extend(part?);
                if next.len() > opts.branch_cap {
                    return Err(Error::BranchCap {
                        cap: opts.branch_cap,
                    });
                }
            }
            runs = next;
        }
    }
    Ok(runs)
}

pub fn enumerate_runs(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    depth: u64,
) -> Result<Vec<FiniteRun>> {
    enumerate_runs_with(m, phi0, schedule, depth, EnumOptions::default())
}

/// Distribution of the observed outputs of the runs of length `k`. At a
/// schedule point `k = τ(i)` it coincides with `ppd_of(φ_k)`.
pub fn observed_distribution_exact(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    k: u64,
) -> Result<Ppd> {
    observed_distribution_with(m, phi0, schedule, k, DEFAULT_BRANCH_CAP, Exec::default())
}

pub fn observed_distribution_with(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    k: u64,
    branch_cap: usize,
    exec: Exec,
) -> Result<Ppd> {
    let opts = EnumOptions {
        branch_cap,
        exec,
        keep_states: false,
    };
    let runs = enumerate_runs_with(m, phi0, schedule, k, opts)?;
    Ok(Ppd::from_masses(runs.iter().filter_map(
        |r| match r.outcome() {
            Outcome::Value(n) => Some((n, r.probability)),
            Outcome::Bottom => None,
        },
    )))
}

/// `Σ_R √Pr(R)·ψ_R` over the runs of length `k`, where `ψ_R` is the last
/// state of `R`. Equals `U^k φ_0`.
pub fn reconstruct(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    k: u64,
) -> Result<Superposition> {
    let opts = EnumOptions {
        keep_states: false,
        ..EnumOptions::default()
    };
    let runs = enumerate_runs_with(m, phi0, schedule, k, opts)?;
    let mut out = Superposition::new();
    for r in &runs {
        out = out.add(&r.last().scale(Amplitude::new(r.probability.sqrt(), 0.0)));
    }
    Ok(out)
}

/// One sampled run.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledRun {
    pub outcome: Outcome,
    pub trace: Vec<Observation>,
}

impl SampledRun {
    /// One `step=<h> outcome=<n|BOT> p=<prob>` line per observation.
    pub fn render_trace(&self) -> String {
        let mut out = String::new();
        for o in &self.trace {
            out.push_str(&format!(
                "step={} outcome={} p={}\n",
                o.step,
                o.outcome,
                crate::distribution::format_prob(o.probability)
            ));
        }
        out
    }
}

fn choose(branches: &[OutputObservation], u: f64) -> usize {
    let mut cum = 0.0;
    for (i, b) in branches.iter().enumerate() {
        cum += b.probability;
        if u < cum {
            return i;
        }
    }
    branches.len() - 1
}

/// Samples one run of length `depth`, drawing each measurement branch with
/// its probability from the generator seeded with `seed`. Sampling stops at
/// the first numeric outcome, which no later measurement can change.
pub fn sample_run(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    depth: u64,
    seed: u64,
) -> Result<SampledRun> {
    let mut rng = Rng::new(seed);
    let mut phi = phi0.clone();
    let mut trace = Vec::new();
    for h in 0..=depth {
        if h > 0 {
            phi = apply_u(m, &phi)?;
        }
        if schedule.contains(h) {
            let mut branches = measure_output(m, &phi)?;
            let i = if branches.len() == 1 {
                0
            } else {
                choose(&branches, rng.uniform())
            };
            let b = branches.swap_remove(i);
            trace.push(Observation {
                step: h,
                outcome: b.outcome,
                probability: b.probability,
            });
            if let Outcome::Value(_) = b.outcome {
                return Ok(SampledRun {
                    outcome: b.outcome,
                    trace,
                });
            }
            phi = b.collapsed;
        }
    }
    Ok(SampledRun {
        outcome: Outcome::Bottom,
        trace,
    })
}

/// Outcome counts over many sampled runs.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarlo {
    pub samples: usize,
    pub seed: u64,
    pub counts: BTreeMap<Outcome, u64>,
}

impl MonteCarlo {
    pub fn frequency(&self, o: Outcome) -> f64 {
        self.counts.get(&o).copied().unwrap_or(0) as f64 / self.samples as f64
    }
}

/// Runs `samples` independent samples. Sample `i` uses the `i`-th output of
/// a generator seeded with `seed` as its own seed, so the counts do not
/// depend on the execution mode.
pub fn sample_many(
    m: &Machine,
    phi0: &Superposition,
    schedule: &Schedule,
    depth: u64,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<(MonteCarlo, Vec<SampledRun>)> {
    let seeds = Rng::derive_seeds(seed, samples);
    let runs: Vec<SampledRun> =
        par::map(exec, &seeds, |&s| sample_run(m, phi0, schedule, depth, s))
            .into_iter()
            .collect::<Result<_>>()?;
    let mut counts = BTreeMap::new();
    for r in &runs {
        *counts.entry(r.outcome).or_insert(0) += 1;
    }
    Ok((
        MonteCarlo {
            samples,
            seed,
            counts,
        },
        runs,
    ))
}
