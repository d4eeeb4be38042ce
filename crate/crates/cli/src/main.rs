//! `hardy`: evaluate, search and decide properties of rounded Hardy-field
//! sequences from the command line.
//!
//! Exit codes: 0 true/found/pass, 1 false/none/fail, 2 unknown (budget or
//! time exhausted), 3 runtime error, 4 usage error.

mod config;
mod output;

use std::collections::BTreeMap;
use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hardy_core::folang::{check_closed, evaluate, parse_formula_with, EvalOptions, MacroTable};
use hardy_core::lexpr::{Enclosure, GrowthClass, LEFunction};
use hardy_core::nearlin::{
    find_lambda_exact, find_lambda_witness, lambda_conditions, LambdaWitness, NearLinearEngine, DEFAULT_X1,
};
use hardy_core::seqcalc::{derivative_algebra_check, error_propagation_check, remainder_bound_check};
use hardy_core::sublin::{inverse_growth_check, verify_inverse_agreement};
use hardy_core::superlin::{
    density_diagnostic, estimate_alpha, mu_exact, mu_super, search_pi_interval_with, CoarseMultContext, PiSearchOptions,
    MU_EXACT_TAIL,
};
use hardy_core::{json, TriState};
use num_bigint::BigInt;
use num_integer::Roots;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use config::{Format, RunConfig};
use output::Report;

/// Marks errors caused by how the tool was invoked.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "hardy", version, about = "Rounded Hardy-field sequences: evaluation, window searches and bounded decision")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Key-value config file (may include others).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Builtin function preset: x5_2, sqrt2x2, x3_2, x2_3.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Function expression in x, e.g. "x^(5/2)".
    #[arg(long, global = true)]
    function: Option<String>,
    /// Growth class: super:D, exact:D[:alpha], near, sub:EPS.
    #[arg(long, global = true)]
    growth: Option<String>,
    #[arg(long = "precision-cap", global = true, value_name = "BITS")]
    precision_cap: Option<u32>,
    #[arg(long = "n-from", global = true, allow_hyphen_values = true)]
    n_from: Option<i64>,
    #[arg(long = "n-to", global = true, allow_hyphen_values = true)]
    n_to: Option<i64>,
    /// Window length.
    #[arg(long = "M", global = true)]
    big_m: Option<usize>,
    /// Candidate cap for searches and formula evaluation.
    #[arg(long, global = true)]
    budget: Option<u64>,
    /// Wall-clock cap in seconds; expiry is reported as unknown.
    #[arg(long = "wall-clock", global = true)]
    wall_clock: Option<f64>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Range [-B, B] of unbounded formula quantifiers.
    #[arg(long, global = true)]
    bound: Option<i64>,
    /// Treat unbounded quantifiers as ranging over [-B, B] only.
    #[arg(long, global = true)]
    closed: bool,
    /// Scale of the exactly-polynomial multiplication predicate.
    #[arg(long = "D", global = true)]
    big_d: Option<i64>,
    /// Log verbosity (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Print an enclosure of f(n) and the rounded value.
    Eval {
        #[arg(allow_hyphen_values = true)]
        n: i64,
        /// Report 0 below x0 instead of failing.
        #[arg(long)]
        zero_extend: bool,
    },
    /// Scan for a polynomial (pi) or progression (lambda) window.
    Search {
        case: Case,
        #[arg(long)]
        d: Option<u32>,
        /// Progression step n for lambda.
        #[arg(long)]
        step: Option<i64>,
        /// Pre-filter tolerance for pi, as p/q or a decimal.
        #[arg(long, default_value = "3/10")]
        eps: String,
        /// Disable the pre-filter.
        #[arg(long)]
        exhaustive: bool,
    },
    /// Decide q = n*m through the multiplication predicate of a regime.
    Mult {
        regime: Regime,
        #[arg(allow_hyphen_values = true)]
        n: i64,
        #[arg(allow_hyphen_values = true)]
        m: i64,
        #[arg(allow_hyphen_values = true)]
        q: i64,
    },
    /// Run property suites.
    Verify {
        suite: Suite,
        #[arg(long)]
        trials: Option<usize>,
        /// Upper end of the m range for the inverse suite.
        #[arg(long, default_value_t = 1000)]
        m_to: i64,
    },
    /// Evaluate a first-order formula over (Z; <, +, round f).
    Decide {
        /// Formula file, or - for stdin.
        source: String,
        /// Treat SOURCE as the formula text itself.
        #[arg(long)]
        expr: bool,
        /// Free variable assignment, name=value (repeatable).
        #[arg(long = "env", value_name = "NAME=VALUE")]
        env: Vec<String>,
        /// Degree used by the pi and mu_super templates.
        #[arg(long)]
        d: Option<u32>,
    },
    /// Histograms of fractional parts of the scaled derivatives.
    Density {
        #[arg(long, default_value_t = 20)]
        bins: usize,
        #[arg(long)]
        d: Option<u32>,
    },
}

impl Cmd {
    fn verb(&self) -> &'static str {
        match self {
            Cmd::Eval { .. } => "eval",
            Cmd::Search { .. } => "search",
            Cmd::Mult { .. } => "mult",
            Cmd::Verify { .. } => "verify",
            Cmd::Decide { .. } => "decide",
            Cmd::Density { .. } => "density",
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Case {
    Pi,
    Lambda,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Regime {
    Super,
    Exact,
    Near,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Suite {
    Derivatives,
    Taylor,
    Error,
    Inverse,
    All,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    let level = match cli.global.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if e.downcast_ref::<Usage>().is_some() { 4 } else { 3 })
        }
    }
}

fn build_config(g: &GlobalArgs, verb: &str) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut pairs = Vec::new();
    if let Some(p) = &g.preset {
        config::parse_text(&format!("include = preset:{p}"), "--preset", None, &mut pairs)?;
    }
    if let Some(path) = &g.config {
        pairs.extend(config::read_config(path)?);
    }
    config::apply(&mut cfg, &pairs, verb)?;
    if let Some(v) = &g.function {
        cfg.function_text = Some(v.clone());
    }
    if let Some(v) = &g.growth {
        cfg.set("growth", v)?;
    }
    if let Some(v) = g.precision_cap {
        cfg.precision_cap_bits = v;
    }
    if let Some(v) = g.n_from {
        cfg.budget.n_from = v;
    }
    if let Some(v) = g.n_to {
        cfg.budget.n_to = v;
    }
    if let Some(v) = g.big_m {
        cfg.budget.m = Some(v);
    }
    if let Some(v) = g.budget {
        cfg.budget.candidate_cap = v;
    }
    if let Some(v) = g.wall_clock {
        cfg.budget.wall_clock_cap = Some(v);
    }
    if let Some(v) = g.seed {
        cfg.seed = v;
    }
    if let Some(v) = g.threads {
        cfg.threads = v;
    }
    if let Some(v) = g.format {
        cfg.format = v;
    }
    if let Some(v) = g.bound {
        cfg.bound = v;
    }
    cfg.closed |= g.closed;
    if let Some(v) = g.big_d {
        cfg.big_d = Some(v);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<u8> {
    let cfg = build_config(&cli.global, cli.cmd.verb()).map_err(|e| usage(format!("{e:#}")))?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.threads).build()?;
    let (report, code) = pool.install(|| dispatch(&cli.cmd, &cfg))?;
    print!("{}", output::render(&report, cfg.format)?);
    Ok(code)
}

fn dispatch(cmd: &Cmd, cfg: &RunConfig) -> Result<(Report, u8)> {
    match cmd {
        Cmd::Eval { n, zero_extend } => cmd_eval(cfg, *n, *zero_extend),
        Cmd::Search { case: Case::Pi, d, eps, exhaustive, .. } => cmd_search_pi(cfg, *d, eps, *exhaustive),
        Cmd::Search { case: Case::Lambda, step, .. } => cmd_search_lambda(cfg, *step),
        Cmd::Mult { regime, n, m, q } => cmd_mult(cfg, *regime, *n, *m, *q),
        Cmd::Verify { suite, trials, m_to } => cmd_verify(cfg, *suite, *trials, *m_to),
        Cmd::Decide { source, expr, env, d } => cmd_decide(cfg, source, *expr, env, *d),
        Cmd::Density { bins, d } => cmd_density(cfg, *bins, *d),
    }
}

fn function(cfg: &RunConfig) -> Result<LEFunction> {
    if cfg.function_text.is_none() {
        return Err(usage("no function given (use --function, --preset or a config file)"));
    }
    cfg.function()
}

fn growth(cfg: &RunConfig) -> Result<&GrowthClass> {
    cfg.growth.as_ref().ok_or_else(|| usage("this verb needs a declared growth class (--growth)"))
}

fn exit_of(t: &TriState) -> u8 {
    t.exit_code() as u8
}

const DECIMAL_DIGITS: usize = 40;

fn fixed_point(k: &BigInt, digits: usize) -> String {
    let s = format!("{:0>width$}", k.to_string(), width = digits + 1);
    let (int, frac) = s.split_at(s.len() - digits);
    format!("{int}.{frac}")
}

/// Decimal digits shared by every point of the enclosure, then an ellipsis.
fn approximate(e: &Enclosure) -> String {
    if e.is_exact() {
        return e.lo.to_string();
    }
    let neg = e.hi.is_negative() || e.hi.is_zero();
    let (a, b) = if neg { (-e.hi.clone(), -e.lo.clone()) } else { (e.lo.clone(), e.hi.clone()) };
    if a.is_negative() {
        return format!("{e}");
    }
    let scale = BigRational::from_integer(BigInt::from(10).pow(DECIMAL_DIGITS as u32));
    let sa = fixed_point(&(&a * &scale).floor().to_integer(), DECIMAL_DIGITS);
    let sb = fixed_point(&(&b * &scale).floor().to_integer(), DECIMAL_DIGITS);
    let common: String = sa.chars().zip(sb.chars()).take_while(|(x, y)| x == y).map(|(x, _)| x).collect();
    if !common.contains('.') {
        return format!("{e}");
    }
    let common = common.trim_end_matches('.');
    format!("{}{common}…", if neg { "-" } else { "" })
}

fn cmd_eval(cfg: &RunConfig, n: i64, zero_extend: bool) -> Result<(Report, u8)> {
    let f = function(cfg)?;
    if n < f.x0() {
        if !zero_extend {
            return Err(hardy_core::Error::BelowDomain { n, x0: f.x0() }.into());
        }
        let data = json!({"n": n, "x0": f.x0(), "zero_extended": true, "value": 0, "exact": true, "nint": 0});
        let text = format!("f({n}) = 0 (zero extension below x0 = {})\nround f({n}) = 0", f.x0());
        return Ok((Report::new(data, text), 0));
    }
    let bits = 256.min(cfg.precision_cap_bits);
    let enc = f.eval_enclosure(n, bits)?;
    let nint = f.nint(n)?;
    let approx = approximate(&enc);
    let shown = if enc.is_exact() { format!("{approx} (exact)") } else { format!("{approx} [{bits} bits]") };
    let data = json!({
        "n": n,
        "x0": f.x0(),
        "zero_extended": false,
        "enclosure": enc,
        "exact": enc.is_exact(),
        "value": approx,
        "nint": json::bigint_value(&nint),
    });
    Ok((Report::new(data, format!("f({n}) = {shown}\nround f({n}) = {nint}")), 0))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((i, frac)) = s.split_once('.') {
        let digits = format!("{i}{frac}");
        let num: BigInt = digits.parse().map_err(|_| usage(format!("bad number '{s}'")))?;
        return Ok(BigRational::new(num, BigInt::from(10).pow(frac.len() as u32)));
    }
    s.parse().map_err(|_| usage(format!("bad number '{s}'")))
}

fn need_m(cfg: &RunConfig) -> Result<usize> {
    cfg.budget.m.ok_or_else(|| usage("this search needs a window length (--M)"))
}

fn cmd_search_pi(cfg: &RunConfig, d: Option<u32>, eps: &str, exhaustive: bool) -> Result<(Report, u8)> {
    let g = growth(cfg)?;
    let class_d = g
        .degree()
        .ok_or_else(|| usage(format!("pi windows need a super-linear or exactly polynomial class, not {g}")))?;
    let d = d.unwrap_or(class_d);
    let f = function(cfg)?;
    let m = need_m(cfg)?;
    let opts = PiSearchOptions {
        eps: if exhaustive { None } else { Some(parse_rational(eps)?) },
        candidate_cap: cfg.budget.candidate_cap,
        deadline: cfg.budget.deadline(),
        ..PiSearchOptions::default()
    };
    let from = cfg.budget.n_from.max(f.x0());
    let rep = search_pi_interval_with(&f, d, m, from, cfg.budget.n_to, &opts)?;
    let code = match (&rep.witness, rep.range_exhausted && !rep.timed_out) {
        (Some(_), _) => 0,
        (None, true) => 1,
        (None, false) => 2,
    };
    let text = match &rep.witness {
        Some(w) => serde_json::to_string(w)?,
        None if code == 1 => "none".to_string(),
        None => format!("none (unknown: stopped after {} candidates)", rep.scanned),
    };
    let mut data = serde_json::to_value(&rep)?;
    data["range"] = json!([from, cfg.budget.n_to]);
    Ok((Report::new(data, text), code))
}

fn cmd_search_lambda(cfg: &RunConfig, step: Option<i64>) -> Result<(Report, u8)> {
    let g = growth(cfg)?;
    if *g != GrowthClass::NearLinear {
        return Err(usage(format!("lambda windows need the near-linear class, not {g}")));
    }
    let step = step.ok_or_else(|| usage("lambda search needs --step"))?;
    let big_m = need_m(cfg)? as i64;
    let f = function(cfg)?;
    let (from, to) = (cfg.budget.n_from, cfg.budget.n_to);
    let (witness, certified) = match find_lambda_witness(&f, big_m, step, from, to)? {
        Some(w) => (Some(w), true),
        None => match find_lambda_exact(&f, big_m, step, from, to, cfg.budget.candidate_cap)? {
            Some(n0) => {
                let conditions = lambda_conditions(&f, n0, big_m, step, DEFAULT_X1.max(f.x0()))?;
                (Some(LambdaWitness { n0, big_m, n: step, conditions }), false)
            }
            None => (None, false),
        },
    };
    let data = json!({"witness": witness, "certified": certified, "range": [from, to]});
    let (text, code) = match &witness {
        Some(w) if certified => (serde_json::to_string(w)?, 0),
        Some(w) => (
            format!("{}\nnote: progression verified exactly; the sufficient conditions do not all hold", serde_json::to_string(w)?),
            0,
        ),
        None => ("none".to_string(), 1),
    };
    Ok((Report::new(data, text), code))
}

fn cmd_mult(cfg: &RunConfig, regime: Regime, n: i64, m: i64, q: i64) -> Result<(Report, u8)> {
    let g = growth(cfg)?.clone();
    let f = function(cfg)?;
    let (value, witness) = match (regime, &g) {
        (Regime::Super, GrowthClass::SuperLinearStrict { d }) => {
            let out = mu_super(&f, *d, n, m, q, &cfg.budget)?;
            (out.value, json!(out.witness))
        }
        (Regime::Exact, GrowthClass::ExactPolynomial { d, alpha_hint }) => {
            let big_d = cfg.big_d.ok_or_else(|| usage("the exact regime needs a scale (--D)"))?;
            let tol = BigRational::new(1.into(), 1000.into());
            let alpha = estimate_alpha(&f, *d, &[1000, 10_000, 100_000], &tol, *alpha_hint)?;
            let ctx = CoarseMultContext::new(f.clone(), *d, alpha, big_d, CoarseMultContext::decades(6, 8))?;
            let v = mu_exact(&ctx, n, m, q)?;
            let tail = &ctx.n_schedule[ctx.n_schedule.len().saturating_sub(MU_EXACT_TAIL)..];
            (v, json!({"D": big_d, "alpha": ctx.alpha, "N": tail}))
        }
        (Regime::Near, GrowthClass::NearLinear) => {
            let out = NearLinearEngine::new(f.clone(), cfg.budget.clone())?.mu1(n, m, q)?;
            let windows: Vec<Value> =
                out.windows.iter().map(|(s, n0, big_m)| json!({"n": s, "N": n0, "M": big_m})).collect();
            (out.value, json!(windows))
        }
        (r, g) => return Err(usage(format!("regime {r:?} does not match the growth class {g}").to_lowercase())),
    };
    let code = exit_of(&value);
    let mut text = value.to_string();
    if let TriState::Unknown(reason) = &value {
        text.push_str(&format!(" ({reason})"));
    }
    if !witness.is_null() {
        text.push_str(&format!("\nwitness: {witness}"));
    }
    let data = json!({"regime": format!("{regime:?}").to_lowercase(), "n": n, "m": m, "q": q, "result": value, "witness": witness});
    Ok((Report::new(data, text), code))
}

fn suite_row(suite: &str, pass: bool, checks: u64, seed: Option<u64>, detail: Value) -> Value {
    json!({"suite": suite, "pass": pass, "checks": checks, "seed": seed, "detail": detail})
}

fn cmd_verify(cfg: &RunConfig, suite: Suite, trials: Option<usize>, m_to: i64) -> Result<(Report, u8)> {
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut rows = Vec::new();
    if want(Suite::Derivatives) {
        let rep = derivative_algebra_check(trials.unwrap_or(200), cfg.seed)?;
        rows.push(suite_row("derivatives", rep.pass, rep.checks, Some(rep.seed), serde_json::to_value(&rep)?));
    }
    if want(Suite::Error) {
        let eps = BigRational::new(1.into(), 4.into());
        for r in 1..=5 {
            let rep = error_propagation_check(&eps, r, trials.unwrap_or(1000), cfg.seed.wrapping_add(r as u64))?;
            rows.push(suite_row(&format!("error:r={r}"), rep.pass, rep.trials as u64, Some(rep.seed), serde_json::to_value(&rep)?));
        }
    }
    let f = match &cfg.function_text {
        Some(_) => Some(cfg.function()?),
        None if suite == Suite::Taylor || suite == Suite::Inverse => return Err(usage("this suite needs a function")),
        None => None,
    };
    if want(Suite::Taylor) {
        match (&f, cfg.growth.as_ref().and_then(GrowthClass::degree)) {
            (Some(f), Some(d)) => {
                for n in [1000i64, 10_000] {
                    let rep = remainder_bound_check(f, n, d, n.sqrt())?;
                    rows.push(suite_row(&format!("taylor:N={n}"), rep.pass, rep.checked as u64, None, serde_json::to_value(&rep)?));
                }
            }
            _ if suite == Suite::Taylor => return Err(usage("the taylor suite needs a super-linear or exact growth class")),
            _ => {}
        }
    }
    if want(Suite::Inverse) {
        match (&f, cfg.growth.as_ref()) {
            (Some(f), Some(GrowthClass::SubLinear { epsilon })) => {
                let rep = verify_inverse_agreement(f, 1, m_to)?;
                let pass = rep.pass() && rep.m0.is_some();
                rows.push(suite_row("inverse:agreement", pass, rep.checked, None, serde_json::to_value(&rep)?));
                let rep = inverse_growth_check(f, epsilon, 8)?;
                rows.push(suite_row("inverse:growth", rep.pass, rep.points.len() as u64, None, serde_json::to_value(&rep)?));
            }
            _ if suite == Suite::Inverse => return Err(usage("the inverse suite needs a sub-linear growth class")),
            _ => {}
        }
    }
    let all = rows.iter().all(|r| r["pass"] == json!(true));
    let text: Vec<String> = rows
        .iter()
        .map(|r| {
            let mut line = format!(
                "{} {} ({} checks)",
                if r["pass"] == json!(true) { "PASS" } else { "FAIL" },
                r["suite"].as_str().unwrap_or(""),
                r["checks"]
            );
            if let Some(m0) = r["detail"].get("m0") {
                line.push_str(&format!(", m0 = {m0}"));
            }
            line
        })
        .collect();
    let data = json!({"pass": all, "rows": rows});
    Ok((Report::new(data, text.join("\n")), if all { 0 } else { 1 }))
}

fn parse_env(pairs: &[String]) -> Result<BTreeMap<String, BigInt>> {
    pairs
        .iter()
        .map(|p| {
            let (k, v) = p.split_once('=').ok_or_else(|| usage(format!("--env expects NAME=VALUE, got '{p}'")))?;
            let v: BigInt = v.trim().parse().map_err(|_| usage(format!("--env {k}: not an integer")))?;
            Ok((k.trim().to_string(), v))
        })
        .collect()
}

fn cmd_decide(cfg: &RunConfig, source: &str, expr: bool, env: &[String], d: Option<u32>) -> Result<(Report, u8)> {
    let text = if expr {
        source.to_string()
    } else if source == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).context("reading formula from stdin")?;
        s
    } else {
        std::fs::read_to_string(source).with_context(|| format!("cannot read formula file {source}"))?
    };
    let env = parse_env(env)?;
    let f = function(cfg)?;
    let d = d.or_else(|| cfg.growth.as_ref().and_then(GrowthClass::degree)).unwrap_or(3);
    let table = MacroTable::builtin_with(d, cfg.big_d)?;
    // `#` lines are comments in formula files
    let body: Vec<&str> = text.lines().filter(|l| !l.trim_start().starts_with('#')).collect();
    let phi = parse_formula_with(body.join("\n").trim(), &table)?;
    let names: Vec<&str> = env.keys().map(String::as_str).collect();
    check_closed(&phi, &names)?;
    let opts = EvalOptions { bound: cfg.bound, closed_world: cfg.closed, candidate_cap: cfg.budget.candidate_cap };
    let r = evaluate(&phi, &f, &env, &opts)?;
    let mut out = r.value.to_string();
    if let TriState::Unknown(reason) = &r.value {
        out.push_str(&format!(" ({reason})"));
    }
    for (k, v) in &r.witness {
        out.push_str(&format!("\n{k} = {v}"));
    }
    let witness: serde_json::Map<String, Value> = r.witness.iter().map(|(k, v)| (k.clone(), json::bigint_value(v))).collect();
    let data = json!({
        "formula": phi.to_string(),
        "result": r.value,
        "witness": witness,
        "bound": cfg.bound,
        "closed_world": cfg.closed,
        "enumerated": r.enumerated,
    });
    Ok((Report::new(data, out), exit_of(&r.value)))
}

fn cmd_density(cfg: &RunConfig, bins: usize, d: Option<u32>) -> Result<(Report, u8)> {
    let d = match d.or_else(|| cfg.growth.as_ref().and_then(GrowthClass::degree)) {
        Some(d) => d,
        None => return Err(usage("density needs --d or a super-linear or exact growth class")),
    };
    let f = function(cfg)?;
    let rep = density_diagnostic(&f, d, cfg.budget.n_from, cfg.budget.n_to, bins)?;
    let mut text = format!(
        "N in [{}, {}], {} samples; joint minimum norm {:.3e} at N = {}",
        rep.n_from, rep.n_to, rep.samples, rep.joint_min, rep.joint_min_at
    );
    for (k, (h, m)) in rep.histograms.iter().zip(&rep.min_norm).enumerate() {
        let counts: Vec<String> = h.iter().map(u64::to_string).collect();
        text.push_str(&format!("\nk = {k}: min norm {m:.3e}; {}", counts.join(" ")));
    }
    Ok((Report::new(serde_json::to_value(&rep)?, text), 0))
}
