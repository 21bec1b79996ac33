//! The `cmnl` command-line front end.
//!
//! Every command renders either a plain-text summary or, with
//! `--format json`, a report `{schema_version, command, inputs_digest,
//! results}` whose floats carry 12 significant digits. Exit status is 0 on
//! success, 1 on usage or parse errors, 2 on validation failures and 3 when a
//! solver refuses an instance as too large.

mod report;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::acme::{self, best_of, sweep_reports, SolveReport, DEFAULT_EPSILON, DEFAULT_RHO};
use crate::choice::{evaluate, EvaluationReport};
use crate::dp::{dp_solve_with, DpMode, DpOptions, DpStats};
use crate::error::Error;
use crate::model::io::{instance_to_json, load_assortment, load_instance, AssortmentDoc};
use crate::model::{generate_instance, validate_assortment, Assortment, GeneratorProfile, Instance, PatienceModel};
use crate::oracle::{brute_force_opt, brute_force_p1};
use crate::sim::{estimate_probabilities, Estimate};
use crate::single_stage::solve_single_stage;

use report::{envelope, fmt, inputs_digest, real, table};

#[derive(Debug, Parser)]
#[command(name = "cmnl", version, about = "Assortment optimization under the cascade MNL choice model")]
struct Cli {
    /// Report format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write the report to this file instead of standard output
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Acme,
    Dp,
    #[value(name = "single-stage")]
    SingleStage,
    Exact,
    #[value(name = "exact-p1")]
    ExactP1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TableMode {
    Sparse,
    Dense,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check an instance and, optionally, an assortment against it
    Validate { instance: PathBuf, assortment: Option<PathBuf> },
    /// Closed-form reachability, purchase probabilities and revenue
    Eval { instance: PathBuf, assortment: PathBuf },
    /// Monte Carlo estimates of the purchase probabilities
    Simulate {
        instance: PathBuf,
        assortment: PathBuf,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Compute an assortment
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Acme)]
        method: Method,
        /// Reachability threshold for acme, dp and exact-p1 [default: 0.5]
        #[arg(long)]
        rho: Option<f64>,
        /// Grid precision for acme and dp
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
        /// DP table storage
        #[arg(long, value_enum, default_value_t = TableMode::Sparse)]
        table: TableMode,
        /// Also write the assortment document to this file
        #[arg(long, value_name = "FILE")]
        assortment_out: Option<PathBuf>,
    },
    /// Run ACME for several thresholds and keep the best
    Sweep {
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        rhos: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_EPSILON)]
        epsilon: f64,
    },
    /// Write a seeded random instance
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        w: usize,
        /// default, exponential, deterministic, burnout or patient
        #[arg(long, default_value = "default")]
        profile: String,
        #[arg(short = 'o', long = "output", value_name = "FILE")]
        output: PathBuf,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::OutOfRange(_) | Error::Io(_) => 1,
        Error::Validation(_) | Error::Shape(_) | Error::Infeasible(_) => 2,
        Error::EnumerationCeiling { .. } | Error::Refused { .. } | Error::DegenerateGrid(_) => 3,
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), message: e.to_string() }
    }
}

fn in_file(path: &Path) -> impl Fn(Error) -> Failure + '_ {
    move |e| Failure { code: exit_code(&e), message: format!("{}: {e}", path.display()) }
}

struct Outcome {
    command: &'static str,
    code: i32,
    inputs: Vec<Vec<u8>>,
    text: String,
    results: Value,
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn instance(path: &Path) -> Result<(Instance, String), Failure> {
    let text = read(path)?;
    Ok((load_instance(&text).map_err(in_file(path))?, text))
}

fn assortment(path: &Path, inst: &Instance) -> Result<(Assortment, String), Failure> {
    let text = read(path)?;
    Ok((load_assortment(&text, inst).map_err(in_file(path))?, text))
}

fn describe(p: &PatienceModel) -> String {
    match p {
        PatienceModel::Exponential { rate } => format!("exponential patience, rate {}", fmt(*rate)),
        PatienceModel::Deterministic { budget } => format!("deterministic patience, budget {}", fmt(*budget)),
        PatienceModel::Table { points } => format!("tabulated patience, {} points", points.len()),
    }
}

fn placements_json(a: &Assortment) -> Value {
    serde_json::to_value(AssortmentDoc::from(a)).expect("assortment document serializes")["placements"].take()
}

fn placements_text(a: &Assortment) -> String {
    if a.is_empty() {
        return "assortment: empty\n".into();
    }
    let rows: Vec<Vec<String>> = a
        .placements()
        .iter()
        .map(|p| vec![(p.stage + 1).to_string(), (p.product + 1).to_string(), (p.exposure + 1).to_string()])
        .collect();
    let mut rows = rows;
    rows.sort();
    table(&["stage", "product", "exposure"], &rows)
}

pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(rendered.as_bytes()) } else { stderr.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    match execute(&cli) {
        Ok(out) => {
            let rendered = match cli.format {
                Format::Text => out.text,
                Format::Json => {
                    let inputs: Vec<&[u8]> = out.inputs.iter().map(|b| b.as_slice()).collect();
                    envelope(out.command, inputs_digest(&inputs), out.results)
                }
            };
            let written = match &cli.out {
                Some(path) => write(path, &rendered),
                None => stdout.write_all(rendered.as_bytes()).map_err(|e| Failure::usage(e.to_string())),
            };
            if let Err(f) = written {
                let _ = writeln!(stderr, "error: {}", f.message);
                return f.code;
            }
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(cli: &Cli) -> Result<Outcome, Failure> {
    match &cli.command {
        Command::Validate { instance, assortment } => validate(instance, assortment.as_deref()),
        Command::Eval { instance, assortment } => eval(instance, assortment),
        Command::Simulate { instance, assortment, trials, seed } => simulate(instance, assortment, *trials, *seed),
        Command::Solve { instance, method, rho, epsilon, table, assortment_out } => {
            solve(instance, *method, *rho, *epsilon, *table, assortment_out.as_deref())
        }
        Command::Sweep { instance, rhos, epsilon } => sweep(instance, rhos, *epsilon),
        Command::Gen { seed, n, m, d, w, profile, output } => gen(*seed, [*n, *m, *d, *w], profile, output),
    }
}

fn validate(inst_path: &Path, a_path: Option<&Path>) -> Result<Outcome, Failure> {
    let (inst, inst_text) = instance(inst_path)?;
    let mut inputs = vec![inst_text.into_bytes()];
    let mut text = format!(
        "instance {}: ok (n = {}, m = {}, d = {}, w = {}, {})\n",
        inst_path.display(),
        inst.n(),
        inst.m(),
        inst.d(),
        inst.w(),
        describe(inst.patience())
    );
    let mut results = json!({
        "instance": {"valid": true, "n": inst.n(), "m": inst.m(), "d": inst.d(), "w": inst.w()}
    });
    let mut code = 0;
    if let Some(a_path) = a_path {
        let (a, a_text) = assortment(a_path, &inst)?;
        inputs.push(a_text.into_bytes());
        let violations: Vec<String> = validate_assortment(&inst, &a)?.iter().map(|v| v.to_string()).collect();
        if violations.is_empty() {
            text += &format!("assortment {}: ok ({} placements)\n", a_path.display(), a.placements().len());
        } else {
            code = 2;
            text += &format!("assortment {}: infeasible\n", a_path.display());
            for v in &violations {
                text += &format!("  {v}\n");
            }
        }
        results["assortment"] = json!({
            "valid": violations.is_empty(),
            "placements": a.placements().len(),
            "violations": violations,
        });
    }
    Ok(Outcome { command: "validate", code, inputs, text, results })
}

fn eval_json(r: &EvaluationReport) -> Value {
    json!({
        "f_value": r.f_value,
        "g_value": r.g_value,
        "no_purchase_prob": r.no_purchase_prob,
        "per_stage_reachability": r.per_stage_reachability,
        "purchase_prob": r.purchase_prob,
    })
}

fn eval(inst_path: &Path, a_path: &Path) -> Result<Outcome, Failure> {
    let (inst, inst_text) = instance(inst_path)?;
    let (a, a_text) = assortment(a_path, &inst)?;
    let r = evaluate(&inst, &a)?;
    let mut header = vec!["product".to_string()];
    header.extend((1..=inst.m()).map(|t| format!("stage {t}")));
    let header: Vec<&str> = header.iter().map(|s| s.as_str()).collect();
    let mut rows = vec![];
    let mut reach = vec!["reach".to_string()];
    reach.extend(r.per_stage_reachability.iter().map(|&x| fmt(x)));
    rows.push(reach);
    for (i, probs) in r.purchase_prob.iter().enumerate() {
        let mut row = vec![(i + 1).to_string()];
        row.extend(probs.iter().map(|&x| fmt(x)));
        rows.push(row);
    }
    let text = format!(
        "{}\nno purchase: {}\nf = {}\ng = {}\n",
        table(&header, &rows),
        fmt(r.no_purchase_prob),
        fmt(r.f_value),
        fmt(r.g_value)
    );
    Ok(Outcome { command: "eval", code: 0, inputs: vec![inst_text.into_bytes(), a_text.into_bytes()], text, results: eval_json(&r) })
}

fn est_json(mut head: Value, e: &Estimate, exact: f64) -> Value {
    let body = json!({"estimate": e.estimate, "std_error": e.std_error, "closed_form": exact, "delta": e.estimate - exact});
    if let (Value::Object(h), Value::Object(b)) = (&mut head, body) {
        h.extend(b);
    }
    head
}

fn simulate(inst_path: &Path, a_path: &Path, trials: u64, seed: u64) -> Result<Outcome, Failure> {
    let (inst, inst_text) = instance(inst_path)?;
    let (a, a_text) = assortment(a_path, &inst)?;
    let exact = evaluate(&inst, &a)?;
    let est = estimate_probabilities(&inst, &a, trials, seed)?;
    let mut cells = vec![];
    let mut rows = vec![];
    let mut max_delta = 0.0f64;
    for i in 0..inst.n() {
        for t in 0..inst.m() {
            let e = &est.purchase[i][t];
            let p = exact.purchase_prob[i][t];
            max_delta = max_delta.max((e.estimate - p).abs());
            cells.push(est_json(json!({"product": i + 1, "stage": t + 1}), e, p));
            rows.push(vec![
                (i + 1).to_string(),
                (t + 1).to_string(),
                fmt(e.estimate),
                fmt(p),
                fmt(e.estimate - p),
                fmt(e.std_error),
            ]);
        }
    }
    let reach: Vec<Value> = est
        .reach
        .iter()
        .zip(&exact.per_stage_reachability)
        .enumerate()
        .map(|(t, (e, &r))| est_json(json!({"stage": t + 1}), e, r))
        .collect();
    let stage_only = |xs: &[Estimate]| -> Value {
        xs.iter()
            .enumerate()
            .map(|(t, e)| json!({"stage": t + 1, "estimate": e.estimate, "std_error": e.std_error}))
            .collect()
    };
    let results = json!({
        "trials": trials,
        "seed": seed,
        "purchase": cells,
        "no_purchase": est_json(json!({}), &est.no_purchase, exact.no_purchase_prob),
        "reach": reach,
        "browsed": stage_only(&est.browsed),
        "abandoned": {"estimate": est.abandoned.estimate, "std_error": est.abandoned.std_error},
        "exhausted": {"estimate": est.exhausted.estimate, "std_error": est.exhausted.std_error},
        "max_abs_delta": max_delta,
    });
    let text = format!(
        "{trials} trials, seed {seed}\n{}\nno purchase: {} (closed form {})\nmax |delta| = {}\n",
        table(&["product", "stage", "estimate", "closed form", "delta", "std error"], &rows),
        fmt(est.no_purchase.estimate),
        fmt(exact.no_purchase_prob),
        fmt(max_delta)
    );
    Ok(Outcome { command: "simulate", code: 0, inputs: vec![inst_text.into_bytes(), a_text.into_bytes()], text, results })
}

fn dp_stats_json(s: &DpStats) -> Value {
    let mut v = serde_json::to_value(s).expect("stats serialize");
    v["budget_cap"] = real(s.budget_cap);
    v
}

fn acme_json(r: &SolveReport) -> Value {
    json!({
        "rho": r.rho,
        "epsilon": r.epsilon,
        "winning_branch": r.winning_branch.to_string(),
        "kappa": r.kappa,
        "certified_ratio": r.certified_ratio,
        "guarantee_degraded": r.guarantee_degraded,
        "branches": r.branches,
        "dp_stats": r.dp_stats.as_ref().map(dp_stats_json),
        "warnings": r.warnings,
    })
}

fn solve(
    inst_path: &Path,
    method: Method,
    rho: Option<f64>,
    epsilon: f64,
    mode: TableMode,
    a_out: Option<&Path>,
) -> Result<Outcome, Failure> {
    let (inst, inst_text) = instance(inst_path)?;
    let rho_v = rho.unwrap_or(DEFAULT_RHO);
    let opts = DpOptions {
        mode: match mode {
            TableMode::Sparse => DpMode::Sparse,
            TableMode::Dense => DpMode::Dense,
        },
        ..DpOptions::default()
    };
    let mut extra = json!({});
    let mut lines = vec![];
    let a = match method {
        Method::Acme => {
            let r = acme::solve_acme_with(&inst, rho_v, epsilon, &opts)?;
            extra = acme_json(&r);
            lines.push(format!("method: acme (rho = {}, epsilon = {})", fmt(rho_v), fmt(epsilon)));
            lines.push(format!("winning branch: {}", r.winning_branch));
            for b in &r.branches {
                lines.push(format!("  {} branch: f = {}, g = {}", b.branch, fmt(b.f_value), fmt(b.g_value)));
            }
            lines.push(format!("certified ratio: {}", fmt(r.certified_ratio)));
            for w in &r.warnings {
                lines.push(format!("warning: {w}"));
            }
            lines.push(format!("wall time: {:.3} s", r.wall_time.as_secs_f64()));
            r.assortment
        }
        Method::Dp => {
            let s = dp_solve_with(&inst, rho_v, epsilon, &opts)?;
            extra = json!({
                "rho": rho_v,
                "epsilon": epsilon,
                "kappa": acme::kappa(epsilon),
                "dp_stats": dp_stats_json(&s.stats),
            });
            lines.push(format!("method: dp (rho = {}, epsilon = {})", fmt(rho_v), fmt(epsilon)));
            lines.push(format!(
                "tables filled: {} of {} guesses, {} candidates",
                s.stats.table_runs, s.stats.guess_count, s.stats.candidates_evaluated
            ));
            lines.push(format!("budget cap: {}", fmt(s.stats.budget_cap)));
            s.assortment
        }
        Method::SingleStage => {
            lines.push("method: single-stage".into());
            solve_single_stage(&inst).0
        }
        Method::Exact => {
            lines.push("method: exact".into());
            brute_force_opt(&inst)?.0
        }
        Method::ExactP1 => {
            extra = json!({"rho": rho_v});
            lines.push(format!("method: exact-p1 (rho = {})", fmt(rho_v)));
            brute_force_p1(&inst, rho_v)?.0
        }
    };
    let r = evaluate(&inst, &a)?;
    let total_cost: f64 = a.placements().iter().map(|p| inst.product(p.product).patience_cost).sum();
    let mut results = json!({
        "method": method.to_possible_value().expect("named method").get_name(),
        "f_value": r.f_value,
        "g_value": r.g_value,
        "total_cost": total_cost,
        "per_stage_reachability": r.per_stage_reachability,
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut results, extra) {
        dst.extend(src);
    }
    results["assortment"] = json!({"placements": placements_json(&a)});
    if let Some(path) = a_out {
        write(path, &(crate::model::io::assortment_to_json(&a) + "\n"))?;
    }
    let text = format!(
        "{}\nf = {}\ng = {}\ntotal patience cost = {}\n{}",
        lines.join("\n"),
        fmt(r.f_value),
        fmt(r.g_value),
        fmt(total_cost),
        placements_text(&a)
    );
    Ok(Outcome { command: "solve", code: 0, inputs: vec![inst_text.into_bytes()], text, results })
}

fn sweep(inst_path: &Path, rhos: &[f64], epsilon: f64) -> Result<Outcome, Failure> {
    let (inst, inst_text) = instance(inst_path)?;
    let reports = sweep_reports(&inst, rhos, epsilon, &DpOptions::default())?;
    let per_rho: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "rho": r.rho,
                "f_value": r.f_value,
                "g_value": r.g_value,
                "winning_branch": r.winning_branch.to_string(),
                "certified_ratio": r.certified_ratio,
                "guarantee_degraded": r.guarantee_degraded,
            })
        })
        .collect();
    let rows: Vec<Vec<String>> = reports
        .iter()
        .map(|r| vec![fmt(r.rho), fmt(r.f_value), fmt(r.g_value), r.winning_branch.to_string(), fmt(r.certified_ratio)])
        .collect();
    let best = best_of(reports);
    let results = json!({
        "epsilon": epsilon,
        "per_rho": per_rho,
        "best": {
            "rho": best.rho,
            "f_value": best.f_value,
            "g_value": best.g_value,
            "winning_branch": best.winning_branch.to_string(),
            "certified_ratio": best.certified_ratio,
            "assortment": {"placements": placements_json(&best.assortment)},
        },
    });
    let text = format!(
        "{}\nbest: rho = {}, f = {}\n{}",
        table(&["rho", "f", "g", "branch", "certified"], &rows),
        fmt(best.rho),
        fmt(best.f_value),
        placements_text(&best.assortment)
    );
    Ok(Outcome { command: "sweep", code: 0, inputs: vec![inst_text.into_bytes()], text, results })
}

fn gen(seed: u64, [n, m, d, w]: [usize; 4], profile: &str, output: &Path) -> Result<Outcome, Failure> {
    let p = GeneratorProfile::named(profile)?;
    let inst = generate_instance(seed, n, m, d, w, &p)?;
    let doc = instance_to_json(&inst) + "\n";
    write(output, &doc)?;
    let results = json!({
        "seed": seed, "n": n, "m": m, "d": d, "w": w, "profile": profile,
        "instance_digest": inputs_digest(&[doc.as_bytes()]),
    });
    let text = format!("wrote {} (n = {n}, m = {m}, d = {d}, w = {w}, profile {profile}, seed {seed})\n", output.display());
    Ok(Outcome { command: "gen", code: 0, inputs: vec![], text, results })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("cmnl").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_args(&["frobnicate"]).0, 1);
        assert_eq!(run_args(&["simulate", "a.json", "b.json", "--trials", "10"]).0, 1);
        assert_eq!(run_args(&["gen", "--n", "2", "--m", "1", "--d", "1", "--w", "1", "-o", "x.json"]).0, 1);
        assert_eq!(run_args(&["eval", "/nonexistent/instance.json", "/nonexistent/a.json"]).0, 1);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_args(&["--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("solve"));
    }
}
