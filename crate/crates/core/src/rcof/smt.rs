//! SMT-LIB 2 export and the external-solver bridge.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Read;
use std::path::Path;
use std::process::{Command, Stdio};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use num::{BigInt, Signed, Zero};
use sha2::{Digest, Sha256};

use super::DecisionOutcome;
use crate::ppl::{Assignment, RcofFormula, Term};
use crate::prop::PropFormula;
use crate::{Error, Rational, Result};

fn formula_name(alpha: &PropFormula) -> String {
    let digest = Sha256::digest(alpha.to_string().as_bytes());
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("xa_{hex}")
}

fn num_name(k: u32) -> String {
    format!("xk_{k}")
}

fn write_rational(out: &mut String, r: &Rational) {
    let body = if r.is_integer() {
        format!("{}.0", r.numer().abs())
    } else {
        format!("(/ {}.0 {}.0)", r.numer().abs(), r.denom())
    };
    if r.is_negative() {
        let _ = write!(out, "(- {body})");
    } else {
        out.push_str(&body);
    }
}

fn write_term(out: &mut String, t: &Term) {
    match t {
        Term::Const(c) => write_rational(out, c),
        Term::Var(k) => out.push_str(&num_name(*k)),
        Term::FormulaVar(a) => out.push_str(&formula_name(a)),
        Term::Neg(a) => {
            out.push_str("(- ");
            write_term(out, a);
            out.push(')');
        }
        Term::Add(a, b) | Term::Mul(a, b) => {
            out.push_str(if matches!(t, Term::Add(..)) { "(+ " } else { "(* " });
            write_term(out, a);
            out.push(' ');
            write_term(out, b);
            out.push(')');
        }
    }
}

fn write_formula(out: &mut String, f: &RcofFormula) {
    let binary = |out: &mut String, op: &str, a: &Term, b: &Term| {
        let _ = write!(out, "({op} ");
        write_term(out, a);
        out.push(' ');
        write_term(out, b);
        out.push(')');
    };
    match f {
        RcofFormula::True => out.push_str("true"),
        RcofFormula::False => out.push_str("false"),
        RcofFormula::Eq(a, b) => binary(out, "=", a, b),
        RcofFormula::Lt(a, b) => binary(out, "<", a, b),
        RcofFormula::Le(a, b) => binary(out, "<=", a, b),
        RcofFormula::Not(a) => {
            out.push_str("(not ");
            write_formula(out, a);
            out.push(')');
        }
        RcofFormula::Implies(a, b) => {
            out.push_str("(=> ");
            write_formula(out, a);
            out.push(' ');
            write_formula(out, b);
            out.push(')');
        }
        RcofFormula::And(xs) | RcofFormula::Or(xs) => {
            let (op, unit) = if matches!(f, RcofFormula::And(_)) { ("and", "true") } else { ("or", "false") };
            match xs.len() {
                0 => out.push_str(unit),
                1 => write_formula(out, &xs[0]),
                _ => {
                    let _ = write!(out, "({op}");
                    for x in xs {
                        out.push(' ');
                        write_formula(out, x);
                    }
                    out.push(')');
                }
            }
        }
        // the closure is implicit: free constants of the negation are
        // existentially read by the solver
        RcofFormula::ForAll(a) => write_formula(out, a),
    }
}

/// An SMT-LIB 2 script asserting the negation of the universal closure of
/// `f`'s matrix: `unsat` means `f` is valid.
pub fn emit_smtlib(f: &RcofFormula) -> String {
    let matrix = f.matrix();
    let (nums, forms) = matrix.free_vars();
    let mut out = String::new();
    out.push_str("; negated universal sentence; unsat means valid\n");
    for k in &nums {
        let _ = writeln!(out, "; {} = x{k}", num_name(*k));
    }
    for a in &forms {
        let _ = writeln!(out, "; {} = x[{a}]", formula_name(a));
    }
    out.push_str("(set-option :produce-models true)\n");
    out.push_str("(set-logic QF_NRA)\n");
    for k in &nums {
        let _ = writeln!(out, "(declare-const {} Real)", num_name(*k));
    }
    for a in &forms {
        let _ = writeln!(out, "(declare-const {} Real)", formula_name(a));
    }
    out.push_str("(assert (not ");
    write_formula(&mut out, matrix);
    out.push_str("))\n(check-sat)\n(get-model)\n");
    out
}

static SCRIPT_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Runs `solver <script>` on the emitted script and interprets the answer.
pub fn run_external(f: &RcofFormula, solver: &Path, timeout: Duration) -> Result<DecisionOutcome> {
    let script = emit_smtlib(f);
    let path = std::env::temp_dir().join(format!(
        "ppl-{}-{}.smt2",
        std::process::id(),
        SCRIPT_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::write(&path, &script)?;
    let result = run_script(&path, solver, timeout);
    let _ = std::fs::remove_file(&path);
    let stdout = match result? {
        Some(s) => s,
        None => return Ok(DecisionOutcome::Unsupported(format!("solver timed out after {timeout:?}"))),
    };
    interpret(f, &stdout)
}

fn run_script(path: &Path, solver: &Path, timeout: Duration) -> Result<Option<String>> {
    let mut child = Command::new(solver)
        .arg(path)
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", solver.display()))))?;
    let mut stdout = child.stdout.take().ok_or_else(|| Error::Internal("solver stdout unavailable".into()))?;
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let deadline = Instant::now() + timeout;
    loop {
        if child.try_wait()?.is_some() {
            break;
        }
        if Instant::now() >= deadline {
            let _ = child.kill();
            let _ = child.wait();
            return Ok(None);
        }
        std::thread::sleep(Duration::from_millis(5));
    }
    Ok(Some(reader.join().map_err(|_| Error::Internal("solver reader panicked".into()))?))
}

fn interpret(f: &RcofFormula, stdout: &str) -> Result<DecisionOutcome> {
    let mut lines = stdout.lines().map(str::trim).filter(|l| !l.is_empty());
    match lines.next() {
        Some("unsat") => Ok(DecisionOutcome::Valid),
        Some("sat") => {
            let rest: Vec<&str> = lines.collect();
            let Some(rho) = parse_model(f, &rest.join("\n")) else {
                return Ok(DecisionOutcome::Unsupported("solver model is not rational".into()));
            };
            if f.matrix().eval(&rho) {
                Ok(DecisionOutcome::Unsupported("solver model does not refute the sentence".into()))
            } else {
                Ok(DecisionOutcome::Invalid(rho))
            }
        }
        Some("unknown") => Ok(DecisionOutcome::Unsupported("solver answered unknown".into())),
        other => Ok(DecisionOutcome::Unsupported(format!("unexpected solver output {:?}", other.unwrap_or("")))),
    }
}

#[derive(Debug, PartialEq)]
enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

fn parse_sexps(src: &str) -> Option<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = src.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '(' => stack.push(Vec::new()),
            ')' => {
                let done = stack.pop()?;
                stack.last_mut()?.push(Sexp::List(done));
            }
            ';' => {
                for c in chars.by_ref() {
                    if c == '\n' {
                        break;
                    }
                }
            }
            c if c.is_whitespace() => {}
            c => {
                let mut word = String::from(c);
                while let Some(&n) = chars.peek() {
                    if n.is_whitespace() || n == '(' || n == ')' {
                        break;
                    }
                    word.push(n);
                    chars.next();
                }
                stack.last_mut()?.push(Sexp::Atom(word));
            }
        }
    }
    if stack.len() == 1 {
        stack.pop()
    } else {
        None
    }
}

fn decimal(s: &str) -> Option<Rational> {
    let (int_part, frac) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() || !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac}").parse().ok()?;
    Some(Rational::new(digits, num::pow(BigInt::from(10), frac.len())))
}

fn value(e: &Sexp) -> Option<Rational> {
    match e {
        Sexp::Atom(a) => decimal(a),
        Sexp::List(xs) => match xs.as_slice() {
            [Sexp::Atom(op), x] if op == "-" => Some(-value(x)?),
            [Sexp::Atom(op), x, y] if op == "/" => {
                let d = value(y)?;
                if d.is_zero() {
                    None
                } else {
                    Some(value(x)? / d)
                }
            }
            _ => None,
        },
    }
}

fn parse_model(f: &RcofFormula, src: &str) -> Option<Assignment> {
    let (nums, forms) = f.matrix().free_vars();
    let mut names: BTreeMap<String, Result<u32, PropFormula>> = BTreeMap::new();
    for k in nums {
        names.insert(num_name(k), Ok(k));
    }
    for a in forms {
        names.insert(formula_name(&a), Err(a));
    }
    let sexps = parse_sexps(src)?;
    // z3 wraps the definitions in one list, older versions prefix `model`
    let defs: Vec<&Sexp> = sexps
        .iter()
        .flat_map(|s| match s {
            Sexp::List(xs) => xs.iter().collect::<Vec<_>>(),
            Sexp::Atom(_) => Vec::new(),
        })
        .collect();
    let mut rho = Assignment::new();
    for d in defs {
        let Sexp::List(parts) = d else { continue };
        let [Sexp::Atom(kw), Sexp::Atom(name), Sexp::List(args), _sort, body] = parts.as_slice() else { continue };
        if kw != "define-fun" || !args.is_empty() {
            continue;
        }
        match names.get(name) {
            Some(Ok(k)) => rho.set_num(*k, value(body)?),
            Some(Err(a)) => rho.set_formula(a.clone(), value(body)?),
            None => {}
        }
    }
    Some(rho)
}
