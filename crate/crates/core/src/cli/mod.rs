//! Command-line front end.
//!
//! Exit status: 0 success, 1 bad arguments, 2 precondition violation,
//! 3 non-convergence, 4 verification failure.

pub mod args;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;

use clap::Parser;
use serde::Serialize;

use crate::elimination::trace::fmt_sig;
use crate::elimination::{
    closed_form_limit, pure_nash_two, rationalize, ChoiceSet, EliminationError, EliminationTrace,
};
use crate::exec::Exec;
use crate::market::{solve_cuts, LocationProfile, ModelParams};
use crate::oracle::{compare_traces, default_eps_opt, grid_best_response, grid_eliminate, Grid};
use crate::reaction::{
    matching_branches, normalize_belief, reaction_three_any, reaction_two, ResponseSet, BRANCH_TOL,
};

use args::*;
pub use args::{parse_number, Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PRECONDITION: i32 = 2;
pub const EXIT_NON_CONVERGENCE: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

/// Limit-versus-closed-form bound used by `verify`.
pub const CLOSED_FORM_TOL: f64 = 1e-6;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Precondition(String),
    /// Non-convergence still carries the partial report.
    NonConverged(String),
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Precondition(_) => EXIT_PRECONDITION,
            CliError::NonConverged(_) => EXIT_NON_CONVERGENCE,
            CliError::Verification(_) => EXIT_VERIFICATION,
        }
    }
}

fn pre(e: impl std::fmt::Display) -> CliError {
    CliError::Precondition(e.to_string())
}

/// Parses `args` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let path = common_of(&cli.command).output.clone();
    let (text, failure) = match execute(&cli.command) {
        Ok(text) => (Some(text), None),
        Err((text, e)) => (text, Some(e)),
    };
    if let Some(text) = text {
        let written = match &path {
            Some(p) => std::fs::write(p, text.as_bytes()),
            None => std::io::stdout().lock().write_all(text.as_bytes()),
        };
        if let Err(e) = written {
            eprintln!("error: cannot write output: {e}");
            return EXIT_PRECONDITION;
        }
    }
    match failure {
        None => EXIT_OK,
        Some(e) => {
            let msg = match &e {
                CliError::Usage(m)
                | CliError::Precondition(m)
                | CliError::NonConverged(m)
                | CliError::Verification(m) => m,
            };
            eprintln!("error: {msg}");
            e.exit_code()
        }
    }
}

fn common_of(command: &Command) -> &Common {
    match command {
        Command::Shares(a) => &a.common,
        Command::BestResponse(a) => &a.common,
        Command::ReactionTable(a) => &a.common,
        Command::Rationalize(a) => &a.common,
        Command::Nash(a) => &a.common,
        Command::Verify(a) => &a.common,
    }
}

type Outcome = Result<String, (Option<String>, CliError)>;

fn fail(e: CliError) -> (Option<String>, CliError) {
    (None, e)
}

/// Runs a parsed command and renders its report.
pub fn execute(command: &Command) -> Outcome {
    match command {
        Command::Shares(a) => shares(a),
        Command::BestResponse(a) => best_response(a),
        Command::ReactionTable(a) => reaction_table(a),
        Command::Rationalize(a) => rationalize_cmd(a),
        Command::Nash(a) => nash(a),
        Command::Verify(a) => verify(a),
    }
}

fn model(common: &Common) -> Result<ModelParams, CliError> {
    let n = common.n.unwrap_or(common.a.len());
    let a = if common.a.len() == 1 && n > 1 {
        vec![common.a[0]; n]
    } else if common.a.len() == n {
        common.a.clone()
    } else {
        return Err(CliError::Usage(format!(
            "--n {n} does not match {} inefficiencies",
            common.a.len()
        )));
    };
    ModelParams::new(a).map_err(pre)
}

fn exec_of(common: &Common) -> Exec {
    if common.sequential {
        Exec::Sequential
    } else {
        Exec::Parallel
    }
}

/// Settings echoed at the top of every report.
#[derive(Debug, Serialize)]
struct Config {
    command: &'static str,
    n: usize,
    a: Vec<f64>,
    #[serde(serialize_with = "ordered_map")]
    settings: Vec<(&'static str, Setting)>,
    format: &'static str,
    exec: &'static str,
    version: &'static str,
}

impl Config {
    fn new(command: &'static str, params: &ModelParams, common: &Common) -> Self {
        Config {
            command,
            n: params.n(),
            a: params.inefficiencies().to_vec(),
            settings: Vec::new(),
            format: common.format.name(),
            exec: match exec_of(common) {
                Exec::Sequential => "sequential",
                Exec::Parallel if Exec::parallel_available() => "parallel",
                Exec::Parallel => "sequential",
            },
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    fn with(mut self, key: &'static str, value: f64) -> Self {
        self.settings.push((key, Setting::Float(value)));
        self
    }

    fn with_count(mut self, key: &'static str, value: usize) -> Self {
        self.settings.push((key, Setting::Count(value)));
        self
    }

    fn csv_header(&self) -> String {
        let mut s = String::new();
        let a: Vec<String> = self.a.iter().map(|x| fmt_sig(*x)).collect();
        let _ = writeln!(s, "# command={}", self.command);
        let _ = writeln!(s, "# n={}", self.n);
        let _ = writeln!(s, "# a={}", a.join(";"));
        for (k, v) in &self.settings {
            let v = match v {
                Setting::Float(x) => fmt_sig(*x),
                Setting::Count(c) => c.to_string(),
            };
            let _ = writeln!(s, "# {k}={v}");
        }
        let _ = writeln!(s, "# exec={}", self.exec);
        let _ = writeln!(s, "# version={}", self.version);
        s
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
enum Setting {
    Float(f64),
    Count(usize),
}

fn ordered_map<S: serde::Serializer>(
    pairs: &[(&'static str, Setting)],
    s: S,
) -> Result<S::Ok, S::Error> {
    s.collect_map(pairs.iter().map(|(k, v)| (*k, *v)))
}

#[derive(Serialize)]
struct Report<'a, T: Serialize> {
    config: &'a Config,
    result: T,
}

fn json<T: Serialize>(config: &Config, result: T) -> String {
    let mut s =
        serde_json::to_string_pretty(&Report { config, result }).expect("report serializes");
    s.push('\n');
    s
}

fn csv_text(config: &Config, header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8");
    format!("{}{}", config.csv_header(), body)
}

#[derive(Serialize)]
struct SharesReport {
    locations: Vec<f64>,
    cuts: Vec<f64>,
    shares: Vec<f64>,
    residual: f64,
}

fn shares(args: &SharesArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    let profile = LocationProfile::new(args.c.clone()).map_err(|e| fail(pre(e)))?;
    let out = solve_cuts(&profile, &params, args.tol).map_err(|e| fail(pre(e)))?;
    let config = Config::new("shares", &params, &args.common).with("tol", args.tol);
    let report = SharesReport {
        locations: args.c.clone(),
        cuts: out.cuts().to_vec(),
        shares: out.shares().to_vec(),
        residual: out.residual(),
    };
    Ok(match args.common.format {
        Format::Json => json(&config, report),
        Format::Csv => {
            let rows = (0..params.n())
                .map(|i| {
                    vec![
                        (i + 1).to_string(),
                        fmt_sig(args.c[i]),
                        fmt_sig(params.a(i)),
                        fmt_sig(report.shares[i]),
                    ]
                })
                .collect();
            csv_text(&config, &["firm", "location", "a", "share"], rows)
        }
    })
}

fn response_for(
    firm: usize,
    opponents: &[f64],
    params: &ModelParams,
) -> Result<ResponseSet, CliError> {
    match params.n() {
        2 => reaction_two(firm, opponents[0], params).map_err(pre),
        3 if params.is_symmetric() => {
            reaction_three_any(opponents[0], opponents[1], params.a(0)).map_err(pre)
        }
        _ => Err(CliError::Precondition(
            "closed-form responses cover two firms or three symmetric firms".into(),
        )),
    }
}

fn response_rows(source: &str, set: &ResponseSet) -> Vec<Vec<String>> {
    match set {
        ResponseSet::Points { points } => points
            .iter()
            .enumerate()
            .map(|(k, p)| vec![source.into(), k.to_string(), fmt_sig(*p), fmt_sig(*p)])
            .collect(),
        ResponseSet::Interval { lo, hi } => {
            vec![vec![source.into(), "0".into(), fmt_sig(*lo), fmt_sig(*hi)]]
        }
    }
}

#[derive(Serialize)]
struct OracleCheck {
    grid_m: usize,
    eps_opt: f64,
    grid_min: f64,
    grid_max: f64,
    grid_count: usize,
    grid_best_share: f64,
    analytic_share: f64,
    /// Grid optimum minus the share earned at the closed-form response.
    share_gap: f64,
    /// Hausdorff distance between the closed-form set and the grid optimisers.
    location_gap: f64,
}

#[derive(Serialize)]
struct BestResponseReport {
    firm: usize,
    opponents: Vec<f64>,
    response: ResponseSet,
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<OracleCheck>,
}

fn best_response(args: &BestResponseArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    let n = params.n();
    if args.firm == 0 || args.firm > n {
        return Err(fail(CliError::Usage(format!(
            "--firm must be between 1 and {n}"
        ))));
    }
    if args.opponents.len() != n - 1 {
        return Err(fail(CliError::Usage(format!(
            "--opponents needs {} locations",
            n - 1
        ))));
    }
    let f = args.firm - 1;
    let response = response_for(f, &args.opponents, &params).map_err(fail)?;
    let eps = args
        .eps_opt
        .unwrap_or_else(|| default_eps_opt(args.grid_m.max(1)));
    let mut config =
        Config::new("best-response", &params, &args.common).with_count("firm", args.firm);
    let mut check = None;
    let mut grid_set = None;
    if args.oracle {
        config = config
            .with_count("grid_m", args.grid_m)
            .with("eps_opt", eps);
        let grid = Grid::new(args.grid_m, eps)
            .map_err(|e| fail(pre(e)))?
            .with_exec(exec_of(&args.common));
        let gr = grid_best_response(f, &args.opponents, &params, &grid, None)
            .map_err(|e| fail(pre(e)))?;
        let mut loc = vec![0.0; n];
        let mut analytic_share = f64::NEG_INFINITY;
        for x in response.samples(11) {
            let mut k = 0;
            for (i, slot) in loc.iter_mut().enumerate() {
                if i == f {
                    *slot = x;
                } else {
                    *slot = args.opponents[k];
                    k += 1;
                }
            }
            let profile = LocationProfile::new(loc.clone()).map_err(|e| fail(pre(e)))?;
            let out = solve_cuts(&profile, &params, crate::market::DEFAULT_TOL)
                .map_err(|e| fail(pre(e)))?;
            analytic_share = analytic_share.max(out.share(f));
        }
        grid_set =
            Some(grid.set_of(&grid.mask_of(&ChoiceSet::points(&gr.points).expect("grid points"))));
        check = Some(OracleCheck {
            grid_m: args.grid_m,
            eps_opt: eps,
            grid_min: gr.min(),
            grid_max: gr.max(),
            grid_count: gr.points.len(),
            grid_best_share: gr.best_share,
            analytic_share,
            share_gap: gr.best_share - analytic_share,
            location_gap: response.hausdorff_to_points(&gr.points),
        });
    }
    let report = BestResponseReport {
        firm: args.firm,
        opponents: args.opponents.clone(),
        response,
        oracle: check,
    };
    Ok(match args.common.format {
        Format::Json => json(&config, report),
        Format::Csv => {
            let mut rows = response_rows("analytic", &report.response);
            if let Some(set) = grid_set {
                for (k, i) in set.intervals().iter().enumerate() {
                    rows.push(vec![
                        "grid".into(),
                        k.to_string(),
                        fmt_sig(i.lo),
                        fmt_sig(i.hi),
                    ]);
                }
            }
            csv_text(&config, &["source", "piece", "lo", "hi"], rows)
        }
    })
}

#[derive(Serialize)]
struct TableRow {
    belief: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region: Option<u8>,
    response: ResponseSet,
}

fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    if steps == 1 {
        return vec![from];
    }
    (0..steps)
        .map(|k| from + (to - from) * k as f64 / (steps - 1) as f64)
        .collect()
}

fn reaction_table(args: &ReactionTableArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    if args.steps == 0 {
        return Err(fail(CliError::Usage("--steps must be positive".into())));
    }
    if !(0.0..=1.0).contains(&args.from) || !(0.0..=1.0).contains(&args.to) {
        return Err(fail(CliError::Precondition(
            "--from and --to must lie in [0, 1]".into(),
        )));
    }
    let xs = linspace(args.from, args.to, args.steps);
    let mut config = Config::new("reaction-table", &params, &args.common)
        .with("from", args.from)
        .with("to", args.to)
        .with_count("steps", args.steps);
    let mut rows = Vec::new();
    match params.n() {
        2 => {
            if args.firm == 0 || args.firm > 2 {
                return Err(fail(CliError::Usage("--firm must be 1 or 2".into())));
            }
            config = config.with_count("firm", args.firm);
            for &x in &xs {
                let response = reaction_two(args.firm - 1, x, &params).map_err(|e| fail(pre(e)))?;
                rows.push(TableRow {
                    belief: vec![x],
                    region: None,
                    response,
                });
            }
        }
        3 if params.is_symmetric() => {
            let a = params.a(0);
            let beliefs: Vec<(f64, f64)> = match args.c_l {
                Some(l) => {
                    config = config.with("c_l", l);
                    xs.iter().map(|&r| (l, r)).collect()
                }
                None => xs
                    .iter()
                    .flat_map(|&l| xs.iter().map(move |&r| (l, r)))
                    .collect(),
            };
            for (l, r) in beliefs {
                let response = reaction_three_any(l, r, a).map_err(|e| fail(pre(e)))?;
                let (reduced, _) = normalize_belief(l, r).map_err(|e| fail(pre(e)))?;
                let region = matching_branches(reduced, a, BRANCH_TOL)
                    .first()
                    .map(|b| b.region);
                rows.push(TableRow {
                    belief: vec![l, r],
                    region,
                    response,
                });
            }
        }
        _ => {
            return Err(fail(CliError::Precondition(
                "reaction tables cover two firms or three symmetric firms".into(),
            )))
        }
    }
    Ok(match args.common.format {
        Format::Json => json(&config, rows),
        Format::Csv => {
            let three = params.n() == 3;
            let mut header: Vec<&str> = if three {
                vec!["c_l", "c_r", "region"]
            } else {
                vec!["c_other"]
            };
            header.extend(["piece", "lo", "hi"]);
            let mut out = Vec::new();
            for row in &rows {
                let mut prefix: Vec<String> = row.belief.iter().map(|x| fmt_sig(*x)).collect();
                if three {
                    prefix.push(row.region.map(|r| r.to_string()).unwrap_or_default());
                }
                for mut r in response_rows("", &row.response) {
                    r.remove(0);
                    let mut line = prefix.clone();
                    line.extend(r);
                    out.push(line);
                }
            }
            csv_text(&config, &header, out)
        }
    })
}

/// Renders a trace in the requested format.
pub fn serialize_trace(trace: &EliminationTrace, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = trace.to_json().expect("trace serializes");
            s.push('\n');
            s
        }
        Format::Csv => trace.to_csv(),
    }
}

#[derive(Serialize)]
struct TraceReport<'a> {
    config: &'a Config,
    trace: &'a EliminationTrace,
}

fn render_trace(config: &Config, trace: &EliminationTrace, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&TraceReport { config, trace })
                .expect("trace serializes");
            s.push('\n');
            s
        }
        Format::Csv => format!("{}{}", config.csv_header(), trace.to_csv()),
    }
}

fn elimination_failure(
    e: EliminationError,
    config: &Config,
    format: Format,
) -> (Option<String>, CliError) {
    match e {
        EliminationError::NonConverged(trace) => {
            let text = render_trace(config, &trace, format);
            (
                Some(text),
                CliError::NonConverged(EliminationError::NonConverged(trace).to_string()),
            )
        }
        other => fail(pre(other)),
    }
}

fn rationalize_cmd(args: &RationalizeArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    let config = Config::new("rationalize", &params, &args.common)
        .with("tol", args.tol)
        .with_count("max_rounds", args.max_rounds);
    let trace = rationalize(&params, args.tol, args.max_rounds)
        .map_err(|e| elimination_failure(e, &config, args.common.format))?;
    Ok(render_trace(&config, &trace, args.common.format))
}

fn nash(args: &NashArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    let config = Config::new("nash", &params, &args.common).with_count("scan_n", args.scan_n);
    let report = pure_nash_two(&params, args.scan_n).map_err(|e| fail(pre(e)))?;
    Ok(match args.common.format {
        Format::Json => json(&config, report),
        Format::Csv => {
            let eq = |k: usize| {
                report
                    .equilibrium
                    .map(|e| fmt_sig(e[k]))
                    .unwrap_or_default()
            };
            let rows = vec![
                vec!["equilibrium_c1".into(), eq(0)],
                vec!["equilibrium_c2".into(), eq(1)],
                vec!["min_gap".into(), fmt_sig(report.min_gap)],
                vec!["argmin_c1".into(), fmt_sig(report.argmin[0])],
                vec!["argmin_c2".into(), fmt_sig(report.argmin[1])],
            ];
            csv_text(&config, &["key", "value"], rows)
        }
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

fn check(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        pass: value <= threshold,
    }
}

#[derive(Serialize)]
struct VerifyReport<'a> {
    passed: bool,
    checks: Vec<Check>,
    comparison: crate::oracle::TraceComparison,
    analytic_limit: &'a [ChoiceSet],
    grid_limit: &'a [ChoiceSet],
    grid_rounds: usize,
    counterexamples: &'a [crate::oracle::Counterexample],
}

fn verify(args: &VerifyArgs) -> Outcome {
    let params = model(&args.common).map_err(fail)?;
    let eps = args
        .eps_opt
        .unwrap_or_else(|| default_eps_opt(args.grid_m.max(1)));
    let config = Config::new("verify", &params, &args.common)
        .with("tol", args.tol)
        .with_count("max_rounds", args.max_rounds)
        .with_count("grid_m", args.grid_m)
        .with("eps_opt", eps);
    let analytic = rationalize(&params, args.tol, args.max_rounds)
        .map_err(|e| elimination_failure(e, &config, args.common.format))?;
    let closed = closed_form_limit(&params).map_err(|e| fail(pre(e)))?;
    let grid = Grid::new(args.grid_m, eps)
        .map_err(|e| fail(pre(e)))?
        .with_exec(exec_of(&args.common));
    let ge = grid_eliminate(&params, &grid, args.max_rounds, true).map_err(|e| fail(pre(e)))?;
    let cmp = compare_traces(&analytic, &ge.trace, &grid).map_err(|e| fail(pre(e)))?;

    let flag = |ok: bool| if ok { 0.0 } else { 1.0 };
    let closed_gap = analytic
        .limit
        .iter()
        .map(|l| l.hausdorff(&closed))
        .fold(0.0, f64::max);
    let asymmetry = analytic
        .rounds
        .iter()
        .flatten()
        .map(|s| s.hausdorff(&s.mirror()))
        .fold(0.0, f64::max);
    let worst_round = cmp.round_gaps.iter().copied().fold(0.0, f64::max);
    let checks = vec![
        check("limit_vs_closed_form", closed_gap, CLOSED_FORM_TOL),
        check(
            "analytic_monotone",
            flag(analytic.is_monotone(crate::elimination::MERGE_TOL)),
            0.0,
        ),
        check("analytic_symmetry", asymmetry, 1e-12),
        check(
            "limit_nested",
            flag(analytic.limit_is_nested(args.tol)),
            0.0,
        ),
        check("grid_converged", flag(ge.trace.converged()), 0.0),
        check("grid_monotone", flag(ge.trace.is_monotone(0.0)), 0.0),
        check("grid_limit_gap", cmp.limit_gap, cmp.threshold),
        check("grid_round_gap", worst_round, cmp.threshold),
        check(
            "unrestricted_counterexamples",
            ge.counterexample_count as f64,
            0.0,
        ),
    ];
    let passed = checks.iter().all(|c| c.pass);
    let report = VerifyReport {
        passed,
        checks: checks.clone(),
        comparison: cmp,
        analytic_limit: &analytic.limit,
        grid_limit: &ge.trace.limit,
        grid_rounds: ge.trace.n_rounds(),
        counterexamples: &ge.counterexamples,
    };
    let text = match args.common.format {
        Format::Json => json(&config, report),
        Format::Csv => {
            let rows = checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.to_string(),
                        fmt_sig(c.value),
                        fmt_sig(c.threshold),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            csv_text(&config, &["check", "value", "threshold", "pass"], rows)
        }
    };
    if passed {
        Ok(text)
    } else {
        let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
        Err((
            Some(text),
            CliError::Verification(format!("failed checks: {}", failed.join(", "))),
        ))
    }
}
