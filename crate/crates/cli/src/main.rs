//! `ppl`: probabilities, validity, pq-entailment and proof checking from the
//! command line.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ppl_core::calculus::{check_derivation, parse_script};
use ppl_core::dist::{psv, svp, FinDist, ProbAssignment, StochasticValuation};
use ppl_core::parse::{parse_ppl, parse_prop, parse_prop_lines, parse_theory};
use ppl_core::pool::{random_valuation, rng};
use ppl_core::ppl::{ppl_entails_reduction, PplFormula};
use ppl_core::pq::{hailperin_counterexample, pq_counterexample, PqLimits, ThresholdPair, DEFAULT_PQ_SCOPE_CAP};
use ppl_core::prop::phi;
use ppl_core::rational::{format_rational, parse_rational};
use ppl_core::rcof::{a_ppl, counter_model, emit_smtlib, validity_sentence, BackendConfig, DecisionOutcome, SOLVER_ENV};
use ppl_core::{Error, Result};

#[derive(Parser)]
#[command(name = "ppl", version, about = "Probabilistic propositional logic workbench")]
struct Cli {
    /// SMT solver executable for nonlinear sentences. Defaults to $PPL_SOLVER,
    /// then to `z3` on the PATH; an empty PPL_SOLVER disables the solver.
    #[arg(long, global = true)]
    solver: Option<PathBuf>,
    /// Solver timeout in seconds.
    #[arg(long, global = true, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    timeout: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Most propositional atoms a question may mention.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    scope_cap: Option<u64>,
    /// Most clauses in the normal form of a negated sentence.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..))]
    clause_cap: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Probability of a classical formula under a valuation file.
    Prob {
        /// JSON joint: {"carrier": [1, 2], "mass": {"0": "1/4", ...}}.
        valuation: PathBuf,
        formula: String,
    },
    /// Decide validity of a PPL formula (exit 0 valid, 1 invalid, 3 unsupported).
    Valid {
        formula: String,
        /// Decide `theory ⊨ formula` instead, one PPL formula per line.
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Decide pq-entailment (exit 0 entails, 1 does not).
    PqEntail {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        /// Hypotheses, one classical formula per line.
        #[arg(long)]
        hyp: Option<PathBuf>,
        #[arg(long)]
        concl: String,
        /// Require each hypothesis separately rather than their conjunction.
        #[arg(long)]
        hailperin: bool,
    },
    /// Check a proof script (exit 0 accepted, 1 rejected).
    Check { script: PathBuf },
    /// Print the SMT-LIB script deciding validity of a PPL formula.
    EmitSmt {
        formula: String,
        #[arg(long)]
        theory: Option<PathBuf>,
    },
    /// Show psv and svp on a valuation and check the round trip.
    GaloisDemo {
        /// JSON joint; a random one over B1..B3 when omitted.
        valuation: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

impl Cli {
    fn backend(&self) -> BackendConfig {
        let mut config = BackendConfig {
            solver: self.solver().filter(|p| !p.as_os_str().is_empty()),
            timeout: Duration::from_secs(self.timeout),
            ..BackendConfig::default()
        };
        if let Some(cap) = self.scope_cap {
            config.scope_cap = cap as usize;
        }
        if let Some(cap) = self.clause_cap {
            config.clause_cap = cap as usize;
        }
        config
    }

    fn solver(&self) -> Option<PathBuf> {
        if let Some(p) = &self.solver {
            return Some(p.clone());
        }
        if let Some(p) = std::env::var_os(SOLVER_ENV) {
            return Some(PathBuf::from(p));
        }
        let path = std::env::var_os("PATH")?;
        std::env::split_paths(&path).map(|dir| dir.join("z3")).find(|p| p.is_file())
    }

    fn pq_limits(&self) -> PqLimits {
        PqLimits {
            scope_cap: self.scope_cap.map_or(DEFAULT_PQ_SCOPE_CAP, |c| c as usize),
            ..PqLimits::default()
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn load_valuation(path: &Path) -> Result<StochasticValuation> {
    Ok(StochasticValuation::new(FinDist::from_json(&read(path)?)?))
}

fn joint_json(v: &StochasticValuation) -> Value {
    serde_json::from_str(&v.joint().to_json()).expect("joint JSON is well formed")
}

/// Prints `text` or `value` depending on the format.
fn emit(format: Format, text: impl FnOnce() -> String, value: Value) {
    match format {
        Format::Text => println!("{}", text()),
        Format::Json => println!("{value:#}"),
    }
}

fn with_theory(formula: &str, theory: Option<&Path>) -> Result<PplFormula> {
    let phi = parse_ppl(formula)?;
    Ok(match theory {
        Some(path) => ppl_entails_reduction(&parse_theory(&read(path)?)?, &phi),
        None => phi,
    })
}

fn prob(cli: &Cli, valuation: &Path, formula: &str) -> Result<u8> {
    let v = load_valuation(valuation)?;
    let alpha = parse_prop(formula)?;
    let p = format_rational(&v.prob(&alpha)?);
    emit(cli.format, || p.clone(), json!({ "formula": alpha.to_string(), "probability": p }));
    Ok(0)
}

fn valid(cli: &Cli, formula: &str, theory: Option<&Path>) -> Result<u8> {
    let phi = with_theory(formula, theory)?;
    let outcome = a_ppl(&phi, &cli.backend())?;
    let (code, witness, reason) = match &outcome {
        DecisionOutcome::Valid => (0, Value::Null, Value::Null),
        DecisionOutcome::Invalid(rho) => {
            let (v, numbers) = counter_model(&phi, rho)?;
            (1, json!({ "valuation": joint_json(&v), "assignment": numbers.to_json() }), Value::Null)
        }
        DecisionOutcome::Unsupported(why) => (3, Value::Null, Value::String(why.clone())),
    };
    let text = || match &outcome {
        DecisionOutcome::Valid => "valid".to_string(),
        DecisionOutcome::Invalid(_) => format!("invalid\ncounter-model: {witness}"),
        DecisionOutcome::Unsupported(why) => format!("unsupported: {why}"),
    };
    let value = json!({
        "formula": phi.to_string(),
        "verdict": outcome.label(),
        "witness": witness,
        "reason": reason,
    });
    emit(cli.format, text, value);
    Ok(code)
}

fn pq_entail(cli: &Cli, p: &str, q: &str, hyp: Option<&Path>, concl: &str, hailperin: bool) -> Result<u8> {
    let (p, q) = (parse_rational(p)?, parse_rational(q)?);
    let delta = match hyp {
        Some(path) => parse_prop_lines(&read(path)?)?,
        None => Vec::new(),
    };
    let alpha = parse_prop(concl)?;
    let counter = if hailperin {
        hailperin_counterexample(&delta, &alpha, &p, &q, cli.pq_limits())?
    } else {
        pq_counterexample(&delta, &alpha, &ThresholdPair::new(p.clone(), q.clone())?, cli.pq_limits())?
    };
    let entails = counter.is_none();
    let counter_json = counter.as_ref().map_or(Value::Null, joint_json);
    let text = || {
        if entails {
            "entails".to_string()
        } else {
            format!("does not entail\ncounter-model: {counter_json}")
        }
    };
    let value = json!({
        "hypotheses": delta.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        "conclusion": alpha.to_string(),
        "p": format_rational(&p),
        "q": format_rational(&q),
        "mode": if hailperin { "hailperin" } else { "pq" },
        "entails": entails,
        "counterexample": counter_json,
    });
    emit(cli.format, text, value);
    Ok(if entails { 0 } else { 1 })
}

fn check(cli: &Cli, script: &Path) -> Result<u8> {
    let d = parse_script(&read(script)?)?;
    let report = check_derivation(&d, &cli.backend());
    let text = || {
        let mut out = String::new();
        for s in &report.steps {
            let mark = if s.ok { "ok  " } else { "FAIL" };
            out.push_str(&format!("{mark} {:>3}. {} ; {}\n", s.index, s.formula, s.justification));
            if let Some(detail) = &s.detail {
                out.push_str(&format!("          {detail}\n"));
            }
        }
        match report.first_failure {
            None => out.push_str("accepted"),
            Some(n) => out.push_str(&format!("rejected at step {n}")),
        }
        out
    };
    emit(cli.format, text, report.to_json());
    Ok(if report.accepted() { 0 } else { 1 })
}

fn emit_smt(cli: &Cli, formula: &str, theory: Option<&Path>) -> Result<u8> {
    let phi = with_theory(formula, theory)?;
    let (sentence, _) = validity_sentence(&phi, &cli.backend())?;
    print!("{}", emit_smtlib(&sentence));
    Ok(0)
}

fn galois_demo(cli: &Cli, valuation: Option<&Path>, seed: u64) -> Result<u8> {
    let v = match valuation {
        Some(path) => load_valuation(path)?,
        None => random_valuation(&mut rng(seed), &[1, 2, 3])?,
    };
    let carrier = v.carrier().clone();
    let p = psv(&v);
    let mut table = Vec::new();
    for u in 0..carrier.subset_count() {
        let point = phi(&carrier, u)?;
        let value = p.value(&point).ok_or_else(|| Error::Internal("psv is total".into()))?;
        table.push((point, value));
    }
    let back = svp(&p, &carrier)?;
    let round_trip = back == v;
    let back_p = psv(&back);
    let table_trip = table.iter().all(|(f, value)| back_p.value(f).as_ref() == Some(value));
    let ok = round_trip && table_trip;
    let text = || {
        let mut out = format!("V: {}\npsv(V) on point conjunctions:\n", v.joint().to_json());
        for (f, value) in &table {
            out.push_str(&format!("  P({f}) = {}\n", format_rational(value)));
        }
        out.push_str(&format!("svp(psv(V)): {}\n", back.joint().to_json()));
        out.push_str(&format!("svp(psv(V)) = V: {round_trip}\npsv(svp(P)) = P: {table_trip}"));
        out
    };
    let value = json!({
        "valuation": joint_json(&v),
        "table": table.iter().map(|(f, value)| json!({ "formula": f.to_string(), "value": format_rational(value) })).collect::<Vec<_>>(),
        "reconstructed": joint_json(&back),
        "round_trip": round_trip,
        "table_round_trip": table_trip,
    });
    emit(cli.format, text, value);
    Ok(if ok { 0 } else { 1 })
}

fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Prob { valuation, formula } => prob(cli, valuation, formula),
        Command::Valid { formula, theory } => valid(cli, formula, theory.as_deref()),
        Command::PqEntail { p, q, hyp, concl, hailperin } => pq_entail(cli, p, q, hyp.as_deref(), concl, *hailperin),
        Command::Check { script } => check(cli, script),
        Command::EmitSmt { formula, theory } => emit_smt(cli, formula, theory.as_deref()),
        Command::GaloisDemo { valuation, seed } => galois_demo(cli, valuation.as_deref(), *seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
