//! Command-line front end: load a net, answer one query, print the table.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, ValueEnum};

use crate::engine::{Engine, FirstCandidate, RandomChoice, SmallestFirst};
use crate::error::{Error, Result};
use crate::format::parse_net;
use crate::oracle::brute_force_marginal;
use crate::semibn::{Query, SemiBayesNet};
use crate::tables::{Evidence, Potential, VarId};

/// Relative tolerance of `--check`.
pub const CHECK_REL: f64 = 1e-9;
/// Absolute floor of `--check`.
pub const CHECK_ABS: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    /// Smallest answer first.
    Default,
    /// First available candidate.
    FirstLeaf,
    /// Uniformly random, seeded by `--seed`.
    Random,
}

#[derive(Debug, Parser)]
#[command(name = "ctprop", version, about = "Exact inference in discrete Bayesian nets by component tree propagation")]
pub struct Args {
    /// Net file in the `variable` / `cpt` text format.
    #[arg(long)]
    pub net: PathBuf,
    /// Comma-separated target variables.
    #[arg(long, value_delimiter = ',')]
    pub target: Vec<String>,
    /// Comma-separated observations, `name=state`.
    #[arg(long, value_delimiter = ',')]
    pub evidence: Vec<String>,
    /// Normalize the answer into P(targets | evidence).
    #[arg(long)]
    pub posterior: bool,
    /// Print the reduction steps before the table.
    #[arg(long)]
    pub trace: bool,
    /// Compare against brute-force enumeration.
    #[arg(long)]
    pub check: bool,
    #[arg(long, value_enum, default_value_t = StrategyArg::Default)]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Exit status of a run.
pub mod exit {
    pub const OK: i32 = 0;
    pub const MODEL: i32 = 1;
    pub const ZERO_EVIDENCE: i32 = 2;
    pub const MISMATCH: i32 = 3;
}

/// Parses `args` (including the program name) and runs the query. Answers
/// and traces go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { exit::MODEL } else { exit::OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match execute(&args, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            match e {
                Error::ZeroProbabilityEvidence(_) => exit::ZERO_EVIDENCE,
                _ => exit::MODEL,
            }
        }
    }
}

fn execute(args: &Args, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let text = std::fs::read_to_string(&args.net).map_err(|e| Error::Input(format!("cannot read {}: {e}", args.net.display())))?;
    let net = parse_net(&text)?;
    let query = build_query(&net, &args.target, &args.evidence)?;

    let unspecified = net.unspecified_roots();
    if !unspecified.is_empty() {
        let names: Vec<String> = unspecified.iter().map(|v| net.name_of(*v)).collect();
        let _ = writeln!(
            err,
            "warning: {} ha{} no prior; answers are potentials, not probabilities",
            names.join(", "),
            if names.len() == 1 { "s" } else { "ve" }
        );
    }

    let mut engine = match args.strategy {
        StrategyArg::Default => Engine::with_strategy(SmallestFirst),
        StrategyArg::FirstLeaf => Engine::with_strategy(FirstCandidate),
        StrategyArg::Random => Engine::with_strategy(RandomChoice::new(args.seed)),
    };
    let answer = engine.answer(&net, &query)?;
    log::info!("engine stats: {:?}", answer.stats);

    if args.trace {
        for step in &answer.trace {
            let _ = writeln!(out, "{step}");
        }
    }
    let table = if args.posterior {
        answer.potential.normalize().map_err(|_| {
            let names: Vec<String> = query
                .evidence
                .iter()
                .map(|(&v, &s)| format!("{}={}", net.name_of(v), net.var(v).map(|x| x.states[s].clone()).unwrap_or_default()))
                .collect();
            Error::ZeroProbabilityEvidence(format!("{} has probability zero", names.join(", ")))
        })?
    } else {
        answer.potential.clone()
    };
    write_table(out, &net, &query, &table, args.posterior)?;

    if args.check {
        let oracle = brute_force_marginal(&net, &query)?;
        if answer.potential.approx_eq(&oracle, CHECK_REL, CHECK_ABS) {
            let _ = writeln!(out, "oracle check: PASS");
        } else {
            let _ = writeln!(out, "oracle check: FAIL (largest relative difference {:e})", answer.potential.max_rel_diff(&oracle));
            return Ok(exit::MISMATCH);
        }
    }
    Ok(exit::OK)
}

/// Builds a query from variable names and `name=state` observations.
pub fn build_query(net: &SemiBayesNet, targets: &[String], evidence: &[String]) -> Result<Query> {
    let u = net.universe();
    let mut xs = Vec::new();
    for t in targets.iter().map(|t| t.trim()).filter(|t| !t.is_empty()) {
        xs.push(u.lookup(t).map_err(|_| Error::Input(format!("unknown variable {t}")))?.id);
    }
    let mut ys = Evidence::new();
    for e in evidence.iter().map(|e| e.trim()).filter(|e| !e.is_empty()) {
        let (name, state) = e.split_once('=').ok_or_else(|| Error::Input(format!("observation {e} is not of the form name=state")))?;
        let var = u.lookup(name.trim()).map_err(|_| Error::Input(format!("unknown variable {name}")))?;
        if ys.insert(var.id, var.state_index(state.trim())?).is_some() {
            return Err(Error::Input(format!("{name} observed twice")));
        }
    }
    Query::new(xs, ys).map_err(|_| Error::Input("a variable cannot be both a target and observed".into()))
}

fn write_table(out: &mut dyn Write, net: &SemiBayesNet, q: &Query, table: &Potential, posterior: bool) -> Result<()> {
    let evidence: Vec<String> = q
        .evidence
        .iter()
        .map(|(&v, &s)| format!("{}={}", net.name_of(v), net.var(v).map(|x| x.states[s].clone()).unwrap_or_default()))
        .collect();
    let vars: Vec<VarId> = table.vars().to_vec();
    for (row, value) in table.assignments().into_iter().zip(table.values()) {
        let mut parts: Vec<String> = vars
            .iter()
            .zip(&row)
            .map(|(&v, &s)| format!("{}={}", net.name_of(v), net.var(v).map(|x| x.states[s].clone()).unwrap_or_default()))
            .collect();
        let head = if posterior {
            if evidence.is_empty() {
                parts.join(", ")
            } else {
                format!("{} | {}", parts.join(", "), evidence.join(", "))
            }
        } else {
            parts.extend(evidence.iter().cloned());
            parts.join(", ")
        };
        let _ = writeln!(out, "P({head}) = {}", significant(*value, 12));
    }
    Ok(())
}

/// `x` with `digits` significant digits, in fixed notation for moderate
/// magnitudes and scientific notation otherwise, trailing zeros removed.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits.saturating_sub(1), x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let m = trim_zeros(mantissa);
        return format!("{m}e{exp}");
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(significant(0.5, 12), "0.5");
        assert_eq!(significant(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(significant(2.0 / 3.0, 12), "0.666666666667");
        assert_eq!(significant(1.0, 12), "1");
        assert_eq!(significant(1.234e-7, 12), "1.234e-7");
        assert_eq!(significant(0.0, 12), "0");
        assert_eq!(significant(123.456, 4), "123.5");
    }

    #[test]
    fn help_exits_cleanly() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["ctprop", "--help"], &mut out, &mut err), exit::OK);
        assert!(String::from_utf8(out).unwrap().contains("--posterior"));
    }

    #[test]
    fn missing_file_is_an_input_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["ctprop", "--net", "/nonexistent.net", "--target", "a"], &mut out, &mut err), exit::MODEL);
    }
}
