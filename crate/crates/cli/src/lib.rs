//! The `qtmlab` command line.
//!
//! Exit codes: 0 success, 1 parse error, 2 semantic or validation error,
//! 3 resource error.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use qtm_core::bvcompat::{convert, validate_bv, BvMachine};
use qtm_core::distribution::{computed_output, encode_input, ppd_of, DEFAULT_SETTLE_EPS};
use qtm_core::evolution::apply_u;
use qtm_core::machine::expr::parse_ket_sum;
use qtm_core::machine::file::{parse_qtm, render_qtm};
use qtm_core::observation::{
    observed_distribution_with, sample_many, Outcome, Schedule, DEFAULT_BRANCH_CAP,
};
use qtm_core::{Error, Exec, Machine, Superposition, DEFAULT_EPS};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 1;
pub const EXIT_SEMANTIC: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Environment variable overriding the branch cap of exact enumeration.
pub const BRANCH_CAP_ENV: &str = "QTMLAB_BRANCH_CAP";

#[derive(Parser, Debug)]
#[command(name = "qtmlab", version, about = "Quantum Turing machine laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a machine against the local unitary conditions.
    Check {
        machine: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Evolve an input and print the output distribution.
    Run {
        machine: PathBuf,
        /// Input superposition such as `1/sqrt(2)|1> + 1/sqrt(2)|3>`.
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// Print the distribution after every step.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Estimate the computed output as a limit.
    Limit {
        machine: PathBuf,
        #[arg(long)]
        input: String,
        #[arg(long, default_value_t = 200)]
        max_steps: usize,
        #[arg(long, default_value_t = DEFAULT_SETTLE_EPS)]
        settle_eps: f64,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Observe the output along a schedule.
    Observe {
        machine: PathBuf,
        #[arg(long)]
        input: String,
        /// `a+b*i` or a list such as `0,3,7`.
        #[arg(long)]
        schedule: String,
        #[arg(long)]
        depth: u64,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// In mc mode, print the trace of every sample.
        #[arg(long)]
        trace: bool,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
    /// Convert a B&V machine into a machine with source and target states.
    ConvertBv {
        machine: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add the missing loop rows from the final state.
        #[arg(long)]
        complete_loops: bool,
        #[arg(long, default_value_t = DEFAULT_EPS)]
        eps: f64,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Mc,
}

/// A failure with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Schedule(_) => EXIT_PARSE,
            Error::BranchCap { .. } => EXIT_RESOURCE,
            _ => EXIT_SEMANTIC,
        };
        Failure::new(code, e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::new(EXIT_RESOURCE, e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_RESOURCE, format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path) -> Result<Machine, Failure> {
    let text = read(path)?;
    parse_qtm(&text).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn load_validated(path: &Path, eps: f64) -> Result<Machine, Failure> {
    Ok(load_machine(path)?.validate(eps)?)
}

fn load_input(m: &Machine, text: &str) -> Result<Superposition, Failure> {
    let terms = parse_ket_sum(text).map_err(|e| Failure::new(EXIT_PARSE, format!("input: {e}")))?;
    Ok(encode_input(m, &terms)?)
}

fn branch_cap() -> Result<usize, Failure> {
    match std::env::var(BRANCH_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::new(
                EXIT_PARSE,
                format!("{BRANCH_CAP_ENV}: `{v}` is not a count"),
            )
        }),
        Err(_) => Ok(DEFAULT_BRANCH_CAP),
    }
}

fn cmd_check(out: &mut dyn Write, path: &Path, eps: f64) -> CmdResult {
    let m = load_machine(path)?;
    if let Some(&(q, a)) = m.missing_rows().first() {
        return Err(Error::Incomplete {
            state: m.state_name(q).to_string(),
            symbol: m.alphabet().render_symbol(a),
        }
        .into());
    }
    let report = m.check_local_unitarity(eps);
    writeln!(out, "{report}")?;
    if report.passes() {
        Ok(())
    } else {
        Err(Failure::new(
            EXIT_SEMANTIC,
            "machine violates the local unitary conditions",
        ))
    }
}

fn cmd_run(
    out: &mut dyn Write,
    path: &Path,
    input: &str,
    steps: usize,
    trace: bool,
    eps: f64,
) -> CmdResult {
    let m = load_validated(path, eps)?;
    let mut phi = load_input(&m, input)?;
    for k in 0..=steps {
        if k > 0 {
            phi = apply_u(&m, &phi)?;
        }
        if trace {
            writeln!(out, "step={k}")?;
            write!(out, "{}", ppd_of(&m, &phi).render())?;
        }
    }
    if !trace {
        write!(out, "{}", ppd_of(&m, &phi).render())?;
    }
    Ok(())
}

fn cmd_limit(
    out: &mut dyn Write,
    path: &Path,
    input: &str,
    max_steps: usize,
    settle_eps: f64,
    eps: f64,
) -> CmdResult {
    let m = load_validated(path, eps)?;
    let phi = load_input(&m, input)?;
    let (ppd, status) = computed_output(&m, &phi, max_steps, settle_eps)?;
    write!(out, "{}", ppd.render())?;
    writeln!(out, "{status}")?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_observe(
    out: &mut dyn Write,
    path: &Path,
    input: &str,
    schedule: &str,
    depth: u64,
    mode: Mode,
    samples: usize,
    seed: u64,
    trace: bool,
    eps: f64,
) -> CmdResult {
    let sched: Schedule = schedule.parse()?;
    let m = load_validated(path, eps)?;
    let phi = load_input(&m, input)?;
    match mode {
        Mode::Exact => {
            let p = observed_distribution_with(
                &m,
                &phi,
                &sched,
                depth,
                branch_cap()?,
                Exec::default(),
            )?;
            write!(out, "{}", p.render_with("BOT"))?;
        }
        Mode::Mc => {
            if samples == 0 {
                return Err(Failure::new(EXIT_SEMANTIC, "--samples must be positive"));
            }
            let (mc, runs) = sample_many(&m, &phi, &sched, depth, samples, seed, Exec::default())?;
            if trace {
                for (i, r) in runs.iter().enumerate() {
                    writeln!(out, "sample={i}")?;
                    write!(out, "{}", r.render_trace())?;
                }
            }
            writeln!(out, "samples={} seed={}", mc.samples, mc.seed)?;
            for (o, c) in &mc.counts {
                if let Outcome::Value(n) = o {
                    writeln!(
                        out,
                        "{n}\t{}",
                        qtm_core::distribution::format_prob(*c as f64 / samples as f64)
                    )?;
                }
            }
            writeln!(
                out,
                "BOT\t{}",
                qtm_core::distribution::format_prob(mc.frequency(Outcome::Bottom))
            )?;
        }
    }
    Ok(())
}

fn cmd_convert_bv(
    out: &mut dyn Write,
    path: &Path,
    dest: Option<&Path>,
    complete: bool,
    eps: f64,
) -> CmdResult {
    let text = read(path)?;
    let mut bv = BvMachine::parse(&text)?;
    if complete {
        bv = bv.complete_loops();
    }
    let report = validate_bv(&bv, eps);
    if !report.passes() {
        return Err(Failure::new(
            EXIT_SEMANTIC,
            format!("not a valid B&V machine:\n{report}"),
        ));
    }
    let m = convert(&bv, eps)?;
    let rendered = render_qtm(&m);
    match dest {
        Some(p) => std::fs::write(p, rendered)?,
        None => write!(out, "{rendered}")?,
    }
    Ok(())
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> CmdResult {
    match cli.command {
        Command::Check { machine, eps } => cmd_check(out, &machine, eps),
        Command::Run {
            machine,
            input,
            steps,
            trace,
            eps,
        } => cmd_run(out, &machine, &input, steps, trace, eps),
        Command::Limit {
            machine,
            input,
            max_steps,
            settle_eps,
            eps,
        } => cmd_limit(out, &machine, &input, max_steps, settle_eps, eps),
        Command::Observe {
            machine,
            input,
            schedule,
            depth,
            mode,
            samples,
            seed,
            trace,
            eps,
        } => cmd_observe(
            out, &machine, &input, &schedule, depth, mode, samples, seed, trace, eps,
        ),
        Command::ConvertBv {
            machine,
            out: dest,
            complete_loops,
            eps,
        } => cmd_convert_bv(out, &machine, dest.as_deref(), complete_loops, eps),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code. Reports go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
