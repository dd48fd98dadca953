//! `skewdet`: command-line front end with JSON output.
//!
//! Exit codes: 0 success, 2 input error, 3 internal consistency failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Map, Value};
use skewdet::brill_noether::{self as bn, BNInstance, Evaluation, Method};
use skewdet::exact::{f_generalized, Partition, SkewShape};
use skewdet::permutations::Permutation;
use skewdet::polyring::{
    default_cap, fsvt_generating_function, grothendieck_determinant, grothendieck_oracle,
    schubert_determinant, schubert_oracle, verify_lemma_powers, DegreeCap, MultiPoly,
};
use skewdet::tableaux::{
    alpha_determinant, count_alpha, count_standard, count_zeta, zeta_determinant,
};
use skewdet::Error;

#[derive(Parser)]
#[command(
    name = "skewdet",
    version,
    about = "Exact Brill-Noether Euler characteristics and 321-avoiding Schubert/Grothendieck determinants"
)]
struct Cli {
    /// Worker threads for sweeps and self-checks.
    #[arg(long, global = true, env = "SKEWDET_JOBS")]
    jobs: Option<usize>,
    /// Add wall-clock timing to the output (makes output non-deterministic).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum MethodArg {
    All,
    Thm1,
    Tableau,
    Series,
    Closed,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Method {
        match m {
            MethodArg::All => Method::All,
            MethodArg::Thm1 => Method::Thm1,
            MethodArg::Tableau => Method::Tableau,
            MethodArg::Series => Method::Series,
            MethodArg::Closed => Method::Closed,
        }
    }
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Kind {
    Schubert,
    Grothendieck,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum PolyMode {
    /// The Δ determinant (321-avoiding `w` only).
    Determinant,
    /// Divided differences or pipe dreams (any `w`).
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Euler characteristic of one instance.
    Euler {
        #[arg(long)]
        g: i64,
        #[arg(long)]
        r: i64,
        #[arg(long)]
        d: i64,
        /// Vanishing sequence at the first point, e.g. 0,1 (default 0..r).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        a: Option<Vec<i64>>,
        /// Vanishing sequence at the second point (default 0..r).
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        b: Option<Vec<i64>>,
        /// Normalization of the shapes (default: smallest valid).
        #[arg(long)]
        n: Option<i64>,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodArg,
        #[arg(long, default_value_t = 12)]
        max_g: i64,
    },
    /// Double/single Schubert or Grothendieck polynomial of a permutation.
    Poly {
        /// One-line notation, e.g. "3 1 2 5 4".
        #[arg(long)]
        w: String,
        #[arg(long, value_enum, default_value = "schubert")]
        kind: Kind,
        #[arg(long)]
        double: bool,
        /// Also run the independent oracle and require equality.
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value = "determinant")]
        mode: PolyMode,
        /// β-degree cap (default length(w) + 4).
        #[arg(long)]
        cap: Option<u32>,
        /// Largest n for S_n.
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        /// Expected polynomial; a mismatch exits with 3.
        #[arg(long)]
        expect: Option<String>,
    },
    /// Evaluate every instance in a range, one JSON line each.
    Sweep {
        /// Genus range: N, A..B or A..=B (both inclusive).
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "0..2")]
        r: String,
        /// Degree range (default 0..2g+r).
        #[arg(long)]
        d: Option<String>,
        /// Keep only this ρ range (default 0..3).
        #[arg(long, default_value = "0..3")]
        rho: String,
        /// Only a = b = (0..r).
        #[arg(long)]
        classical: bool,
        /// Only b = (0..r).
        #[arg(long)]
        one_pointed: bool,
        #[arg(long, value_enum, default_value = "all")]
        method: MethodArg,
        /// Output file (default stdout).
        #[arg(long)]
        out: Option<std::path::PathBuf>,
        #[arg(long, default_value_t = 12)]
        max_g: i64,
    },
    /// Run the invariant suites and report each.
    Selfcheck {
        /// Smaller suites, a few seconds in total.
        #[arg(long)]
        quick: bool,
        /// Force the named suite to fail (harness testing).
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn inconsistent(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Inconsistent(_) => Failure::inconsistent(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn num(v: &BigInt) -> Value {
    serde_json::from_str(&v.to_string()).expect("integers are valid JSON numbers")
}

fn parts(p: &Partition) -> Value {
    json!(p.parts())
}

fn evaluation_record(e: &Evaluation) -> Value {
    let inst = &e.instance;
    let values: Map<String, Value> = e
        .values
        .iter()
        .map(|(k, v)| (k.to_string(), num(v)))
        .collect();
    let mut rec = json!({
        "g": inst.g(),
        "r": inst.r(),
        "d": inst.d(),
        "a": inst.a(),
        "b": inst.b(),
        "n": e.shapes.n,
        "lambda": parts(&e.shapes.lam),
        "mu": parts(&e.shapes.mu),
        "rho": e.shapes.rho,
        "rho_prime": e.shapes.rho_prime,
        "a_prime": e.shapes.a_prime,
        "nonempty_guaranteed": e.nonempty,
        "empty_expected": e.empty_expected,
        "numclass": e.numclass.to_string(),
        "values": values,
        "agree": e.agree(),
    });
    let obj = rec.as_object_mut().expect("record is an object");
    if e.agree() {
        if let Some(chi) = e.chi() {
            obj.insert("chi".into(), num(chi));
        }
    }
    obj.insert(
        "sign_matches_rho".into(),
        e.sign_matches_rho().map_or(Value::Null, Value::Bool),
    );
    rec
}

fn emit(mut rec: Value, start: Option<Instant>) -> io::Result<()> {
    if let (Some(t), Some(obj)) = (start, rec.as_object_mut()) {
        obj.insert("timing_ms".into(), json!(t.elapsed().as_millis() as u64));
    }
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, &rec)?;
    writeln!(out)
}

#[allow(clippy::too_many_arguments)]
fn cmd_euler(
    g: i64,
    r: i64,
    d: i64,
    a: Option<Vec<i64>>,
    b: Option<Vec<i64>>,
    n: Option<i64>,
    method: MethodArg,
    max_g: i64,
    start: Option<Instant>,
) -> Outcome {
    if g > max_g {
        return Err(Failure::input(format!("g={g} exceeds --max-g {max_g}")));
    }
    let default: Vec<i64> = (0..=r.max(0)).collect();
    let inst = BNInstance::new(
        g,
        r,
        d,
        a.unwrap_or_else(|| default.clone()),
        b.unwrap_or(default),
    )?;
    let eval = match n {
        None => bn::evaluate(&inst, method.into())?,
        Some(n) => evaluate_at(&inst, n, method)?,
    };
    let agree = eval.agree();
    emit(evaluation_record(&eval), start)?;
    if agree {
        Ok(())
    } else {
        Err(Failure::inconsistent(format!(
            "methods disagree: {:?}",
            eval.values
        )))
    }
}

/// Evaluation with an explicit normalization `n`; only the shape-based pipelines depend on it.
fn evaluate_at(inst: &BNInstance, n: i64, method: MethodArg) -> Result<Evaluation, Failure> {
    let mut eval = bn::evaluate(inst, method.into())?;
    let sh = bn::shapes(inst, Some(n))?;
    if !eval.empty_expected {
        let all = method == MethodArg::All;
        if all || method == MethodArg::Thm1 {
            eval.values.insert("thm1", bn::euler_thm1_with(&sh));
        }
        if all || method == MethodArg::Tableau {
            eval.values.insert("tableau", bn::euler_tableau_with(&sh)?);
        }
        if all || method == MethodArg::Series {
            eval.values
                .insert("series", bn::euler_series_with(&sh, inst.g()));
        }
    }
    eval.numclass = bn::numclass_coefficient_with(inst, &sh)?;
    eval.shapes = sh;
    Ok(eval)
}

#[allow(clippy::too_many_arguments)]
fn cmd_poly(
    w: &str,
    kind: Kind,
    double: bool,
    check: bool,
    mode: PolyMode,
    cap: Option<u32>,
    max_n: usize,
    expect: Option<String>,
    start: Option<Instant>,
) -> Outcome {
    let perm: Permutation = w.parse()?;
    let perm = perm.trimmed();
    if perm.n() > max_n {
        return Err(Failure::input(format!(
            "{perm} lies in S_{} but --max-n is {max_n}",
            perm.n()
        )));
    }
    if mode == PolyMode::Determinant && !perm.is_321_avoiding() {
        return Err(Failure::input(format!(
            "{perm} contains the pattern 321; use --mode oracle"
        )));
    }
    let cap = cap.map_or_else(|| default_cap(&perm), DegreeCap);
    let determinant = || -> Result<MultiPoly, Error> {
        match kind {
            Kind::Schubert => schubert_determinant(&perm, double),
            Kind::Grothendieck => grothendieck_determinant(&perm, double, cap),
        }
    };
    let oracle = || -> Result<MultiPoly, Error> {
        match kind {
            Kind::Schubert if double => schubert_oracle(&perm),
            Kind::Schubert => Ok(schubert_oracle(&perm)?.at_y_zero()),
            Kind::Grothendieck => grothendieck_oracle(&perm, double, cap),
        }
    };
    let (poly, method) = match mode {
        PolyMode::Determinant => (determinant()?, "determinant"),
        PolyMode::Oracle => (oracle()?, "oracle"),
    };
    let mut rec = json!({
        "inputs": {
            "w": perm.to_string(),
            "kind": match kind { Kind::Schubert => "schubert", Kind::Grothendieck => "grothendieck" },
            "double": double,
            "mode": method,
        },
        "length": perm.length(),
        "method": method,
        "polynomial": poly.to_string(),
    });
    let obj = rec.as_object_mut().expect("record is an object");
    if kind == Kind::Grothendieck {
        obj.insert("cap".into(), json!(cap.0));
    }
    let mut failures = Vec::new();
    if check {
        let mut checks = Map::new();
        let other = match mode {
            PolyMode::Determinant => ("oracle", oracle()?),
            PolyMode::Oracle if perm.is_321_avoiding() => ("determinant", determinant()?),
            PolyMode::Oracle => ("oracle", poly.clone()),
        };
        let mut results = vec![other];
        if kind == Kind::Grothendieck && !double && perm.is_321_avoiding() {
            results.push(("set_valued_tableaux", fsvt_generating_function(&perm, cap)?));
        }
        for (name, p) in results {
            let agree = p == poly;
            if !agree {
                failures.push(name);
            }
            checks.insert(
                name.into(),
                json!({ "polynomial": p.to_string(), "agree": agree }),
            );
        }
        obj.insert("check".into(), Value::Object(checks));
    }
    if let Some(text) = expect {
        let expected: MultiPoly = text.parse()?;
        let agree = expected == poly;
        if !agree {
            failures.push("expect");
        }
        obj.insert(
            "expect".into(),
            json!({ "polynomial": expected.to_string(), "agree": agree }),
        );
    }
    obj.insert("agree".into(), json!(failures.is_empty()));
    emit(rec, start)?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::inconsistent(format!(
            "mismatch: {}",
            failures.join(", ")
        )))
    }
}

/// `N`, `A..B` or `A..=B`, both ends inclusive.
fn parse_range(s: &str) -> Result<RangeInclusive<i64>, Failure> {
    let bad = || Failure::input(format!("bad range {s:?}; expected N, A..B or A..=B"));
    let s = s.trim();
    let parse = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
    match s.split_once("..") {
        None => {
            let v = parse(s)?;
            Ok(v..=v)
        }
        Some((lo, hi)) => {
            let hi = hi.strip_prefix('=').unwrap_or(hi);
            Ok(parse(lo)?..=parse(hi)?)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    g: &str,
    r: &str,
    d: Option<String>,
    rho: &str,
    classical: bool,
    one_pointed: bool,
    method: MethodArg,
    out: Option<std::path::PathBuf>,
    max_g: i64,
) -> Outcome {
    let g = parse_range(g)?;
    let r = parse_range(r)?;
    let rho = parse_range(rho)?;
    let d = d.as_deref().map(parse_range).transpose()?;
    if !g.is_empty() && (*g.start() < 0 || *g.end() > max_g) {
        return Err(Failure::input(format!(
            "genus range must lie in 0..={max_g}"
        )));
    }
    if !r.is_empty() && *r.start() < 0 {
        return Err(Failure::input("r must be nonnegative"));
    }
    let insts: Vec<BNInstance> =
        bn::instances(g, r, |g, r| d.as_ref().map_or(2 * g + r, |d| *d.end()), rho)
            .into_iter()
            .filter(|i| d.as_ref().is_none_or(|d| d.contains(&i.d())))
            .filter(|i| !classical || i.is_classical())
            .filter(|i| !one_pointed || i.is_one_pointed())
            .filter(|i| {
                method != MethodArg::Closed || (i.is_classical() && i.g() - i.d() + i.r() >= 0)
            })
            .collect();
    let sink: Box<dyn Write> = match &out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut sink = BufWriter::new(sink);
    let mut disagreements = 0usize;
    for chunk in insts.chunks(4096) {
        let evals = bn::evaluate_many(chunk, method.into());
        for e in evals {
            let e = e?;
            if !e.agree() {
                disagreements += 1;
            }
            serde_json::to_writer(&mut sink, &evaluation_record(&e)).map_err(io::Error::from)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    if disagreements == 0 {
        Ok(())
    } else {
        Err(Failure::inconsistent(format!(
            "{disagreements} instances disagree"
        )))
    }
}

type Suite = (
    &'static str,
    Box<dyn Fn(bool) -> Result<String, String> + Sync>,
);

fn suites() -> Vec<Suite> {
    vec![
        (
            "tableau-determinant",
            Box::new(|quick| {
                let side = if quick { 3 } else { 4 };
                let boxes = Partition::all_in_box(side, side as i64);
                let mut count = 0;
                for o in &boxes {
                    for i in boxes.iter().filter(|i| o.contains(i)) {
                        let shape =
                            SkewShape::new(o.clone(), i.clone()).map_err(|e| e.to_string())?;
                        let ok = count_standard(&shape) == f_generalized(o, i)
                            && count_alpha(o, i).map_err(|e| e.to_string())?
                                == alpha_determinant(o, i)
                            && count_zeta(o, i).map_err(|e| e.to_string())?
                                == zeta_determinant(o, i);
                        if !ok {
                            return Err(format!("{o}/{i}"));
                        }
                        count += 1;
                    }
                }
                Ok(format!("{count} skew shapes"))
            }),
        ),
        (
            "euler-cross-formula",
            Box::new(|quick| {
                let g_max = if quick { 4 } else { 6 };
                let insts = bn::instances(0..=g_max, 0..=2, |g, r| 2 * g + r, 0..=3);
                let bad = bn::evaluate_many(&insts, Method::All)
                    .into_iter()
                    .filter(|e| !e.as_ref().is_ok_and(|e| e.agree()))
                    .count();
                if bad > 0 {
                    return Err(format!("{bad} instances disagree"));
                }
                Ok(format!("{} instances", insts.len()))
            }),
        ),
        (
            "n-invariance",
            Box::new(|quick| {
                let g_max = if quick { 4 } else { 6 };
                let insts = bn::instances(0..=g_max, 0..=2, |g, r| 2 * g + r, 0..=3);
                let bad = insts
                    .par_iter()
                    .filter(|i| !bn::n_invariant(i).unwrap_or(false))
                    .count();
                if bad > 0 {
                    return Err(format!("{bad} instances change under n -> n+1"));
                }
                Ok(format!("{} instances", insts.len()))
            }),
        ),
        (
            "lemma-powers",
            Box::new(|_| {
                for n in 1..=4 {
                    for i in 1..=n {
                        if !verify_lemma_powers(n, i).map_err(|e| e.to_string())? {
                            return Err(format!("n={n}, i={i}"));
                        }
                    }
                }
                Ok("1 <= i <= n <= 4".into())
            }),
        ),
        (
            "s4-polynomials",
            Box::new(|quick| {
                let n = if quick { 3 } else { 4 };
                let perms: Vec<_> = Permutation::all(n)
                    .into_iter()
                    .filter(|p| p.is_321_avoiding())
                    .collect();
                for v in &perms {
                    let err = |e: Error| format!("{v}: {e}");
                    if schubert_determinant(v, true).map_err(err)?
                        != schubert_oracle(v).map_err(err)?
                    {
                        return Err(format!("{v}: Schubert"));
                    }
                    let cap = default_cap(v);
                    for double in [false, true] {
                        let det = grothendieck_determinant(v, double, cap).map_err(err)?;
                        if det != grothendieck_oracle(v, double, cap).map_err(err)? {
                            return Err(format!("{v}: Grothendieck double={double}"));
                        }
                    }
                    let single = grothendieck_determinant(v, false, cap).map_err(err)?;
                    if single != fsvt_generating_function(v, cap).map_err(err)? {
                        return Err(format!("{v}: set-valued tableaux"));
                    }
                }
                Ok(format!("{} permutations of S_{n}", perms.len()))
            }),
        ),
    ]
}

fn cmd_selfcheck(quick: bool, inject_fault: Option<String>, start: Option<Instant>) -> Outcome {
    let all = suites();
    if let Some(name) = &inject_fault {
        if !all.iter().any(|(n, _)| n == name) {
            return Err(Failure::input(format!("unknown suite {name:?}")));
        }
    }
    let mut report = Map::new();
    let mut failed = Vec::new();
    for (name, run) in &all {
        let result = if inject_fault.as_deref() == Some(*name) {
            Err("injected fault".to_string())
        } else {
            run(quick)
        };
        let entry = match result {
            Ok(detail) => json!({ "pass": true, "detail": detail }),
            Err(detail) => {
                failed.push(*name);
                json!({ "pass": false, "detail": detail })
            }
        };
        report.insert(name.to_string(), entry);
    }
    let rec = json!({
        "quick": quick,
        "suites": report,
        "pass": failed.is_empty(),
        "failed": failed,
    });
    emit(rec, start)?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::inconsistent(format!(
            "failing suites: {}",
            failed.join(", ")
        )))
    }
}

fn run(cli: Cli) -> Outcome {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .map_err(|e| Failure::input(e.to_string()))?;
    }
    let start = cli.timing.then(Instant::now);
    match cli.command {
        Command::Euler {
            g,
            r,
            d,
            a,
            b,
            n,
            method,
            max_g,
        } => cmd_euler(g, r, d, a, b, n, method, max_g, start),
        Command::Poly {
            w,
            kind,
            double,
            check,
            mode,
            cap,
            max_n,
            expect,
        } => cmd_poly(&w, kind, double, check, mode, cap, max_n, expect, start),
        Command::Sweep {
            g,
            r,
            d,
            rho,
            classical,
            one_pointed,
            method,
            out,
            max_g,
        } => cmd_sweep(&g, &r, d, &rho, classical, one_pointed, method, out, max_g),
        Command::Selfcheck {
            quick,
            inject_fault,
        } => cmd_selfcheck(quick, inject_fault, start),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
