//! Command-line front end. Every command renders its output as a string
//! that starts with a header carrying the version, seed and arguments.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{self, BoundQuery};
use crate::collect::{self, CollectReport, OptimizerConfig};
use crate::pseudopure::{self, ClickRecord, MeasurementAxis};
use crate::qcore::{ComplexMatrix, ComplexVector, DensityMatrix, PureState, TensorShape, C64, DEFAULT_TOL};
use crate::{werner, Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Parser)]
#[command(name = "collectibility", version, about = "Collectibility-based entanglement tests")]
pub struct Cli {
    /// Seed for every random choice (optimizer starts, click simulation).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Significant digits in numeric output.
    #[arg(long, global = true, default_value_t = 6)]
    pub digits: usize,
    /// Write the output here instead of standard output.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Maximise the pure- or mixed-state collectibility of a state file.
    Collect(CollectArgs),
    /// Minimal, PPT and critical purities for both table panels.
    CritTable {
        #[arg(long, default_value_t = 4)]
        decimals: usize,
    },
    /// Two-qubit Werner thresholds alpha_T, alpha_C on a lambda grid.
    WernerScan {
        #[arg(long, default_value_t = 101)]
        lambda_steps: usize,
    },
    /// Evaluate the two-qubit witness on a state file or on click counts.
    Witness(WitnessArgs),
    /// Simulate click counts for a state and evaluate the witness on them.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct OptimizerArgs {
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    #[arg(long, default_value_t = 2000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct CollectArgs {
    pub state: PathBuf,
    /// Treat the input as a pure state (requires `amplitudes`).
    #[arg(long, conflicts_with = "mixed")]
    pub pure: bool,
    /// Use the mixed-state functional (a pure input is turned into its projector).
    #[arg(long)]
    pub mixed: bool,
    #[command(flatten)]
    pub optimizer: OptimizerArgs,
}

#[derive(Debug, Args)]
pub struct AxisArgs {
    #[arg(long, default_value = "z")]
    pub axis_z: MeasurementAxis,
    #[arg(long, default_value = "x")]
    pub axis_x: MeasurementAxis,
}

#[derive(Debug, Args)]
pub struct WitnessArgs {
    #[arg(long, required_unless_present = "clicks", conflicts_with = "clicks")]
    pub state: Option<PathBuf>,
    /// Click-record CSV holding both axes.
    #[arg(long)]
    pub clicks: Option<PathBuf>,
    #[command(flatten)]
    pub axes: AxisArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub state: PathBuf,
    #[arg(long)]
    pub shots: u64,
    /// Also write the click records as CSV.
    #[arg(long)]
    pub clicks_out: Option<PathBuf>,
    #[command(flatten)]
    pub axes: AxisArgs,
}

/// JSON state file: `{"k", "n", "matrix": [[[re, im], ...], ...]}` or
/// `{"k", "n", "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub k: usize,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitudes: Option<Vec<[f64; 2]>>,
}

pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(psi) => psi.projector(),
            LoadedState::Mixed(rho) => rho.clone(),
        }
    }
}

impl StateFile {
    pub fn from_pure(psi: &PureState) -> Self {
        let s = psi.shape();
        StateFile { k: s.k(), n: s.n(), matrix: None, amplitudes: Some(psi.amplitudes().iter().map(|z| [z.re, z.im]).collect()) }
    }

    pub fn from_density(rho: &DensityMatrix) -> Self {
        let s = rho.shape();
        let m = rho.matrix();
        let rows = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
        StateFile { k: s.k(), n: s.n(), matrix: Some(rows), amplitudes: None }
    }

    pub fn load(&self) -> Result<LoadedState> {
        let shape = TensorShape::new(self.k, self.n)?;
        let d = shape.dim();
        let c = |v: &[f64; 2]| C64::new(v[0], v[1]);
        match (&self.matrix, &self.amplitudes) {
            (Some(rows), None) => {
                if rows.len() != d || rows.iter().any(|r| r.len() != d) {
                    return Err(Error::ShapeMismatch { expected: format!("{d}x{d} matrix"), found: format!("{} rows", rows.len()) });
                }
                let m = ComplexMatrix::from_fn(d, d, |i, j| c(&rows[i][j]));
                Ok(LoadedState::Mixed(DensityMatrix::validate(m, shape, DEFAULT_TOL)?))
            }
            (None, Some(amps)) => {
                if amps.len() != d {
                    return Err(Error::ShapeMismatch { expected: format!("{d} amplitudes"), found: amps.len().to_string() });
                }
                let v = ComplexVector::from_iterator(d, amps.iter().map(c));
                Ok(LoadedState::Pure(PureState::new(shape, v, DEFAULT_TOL)?))
            }
            _ => Err(Error::Parse("state file needs exactly one of `matrix` or `amplitudes`".into())),
        }
    }
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let file: StateFile = serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    file.load()
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.max(1) - 1, x).parse().unwrap_or(x)
}

fn round_json(v: &mut Value, digits: usize) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(x) = n.as_f64() {
                *v = json!(round_sig(x, digits));
            }
        }
        Value::Array(items) => items.iter_mut().for_each(|x| round_json(x, digits)),
        Value::Object(map) => map.values_mut().for_each(|x| round_json(x, digits)),
        _ => {}
    }
}

struct Context {
    seed: u64,
    digits: usize,
    args: String,
}

impl Context {
    fn csv_header(&self) -> String {
        format!("# collectibility {VERSION} seed={} args={}\n", self.seed, self.args)
    }

    fn json(&self, body: Value) -> Result<String> {
        let mut out = json!({ "meta": { "version": VERSION, "seed": self.seed, "args": self.args } });
        if let (Value::Object(out), Value::Object(body)) = (&mut out, body) {
            out.extend(body);
        }
        round_json(&mut out, self.digits);
        serde_json::to_string_pretty(&out).map(|s| s + "\n").map_err(|e| Error::Io(e.to_string()))
    }

    fn num(&self, x: f64) -> String {
        round_sig(x, self.digits).to_string()
    }
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    Value::Array((0..m.nrows()).map(|i| Value::Array((0..m.ncols()).map(|j| json!([m[(i, j)].re, m[(i, j)].im])).collect())).collect())
}

fn bound_entry(name: &str, value: f64, ours: f64) -> Value {
    json!({ "name": name, "value": value, "exceeded": ours > value + collect::VERDICT_GUARD })
}

fn cmd_collect(ctx: &Context, args: &CollectArgs) -> Result<String> {
    let cfg = OptimizerConfig { restarts: args.optimizer.restarts, max_iters: args.optimizer.max_iters, objective_tol: args.optimizer.tol, seed: ctx.seed };
    cfg.validate()?;
    let state = read_state(&args.state)?;
    let mixed = match (&state, args.pure, args.mixed) {
        (LoadedState::Mixed(_), true, _) => return Err(Error::BadParams("--pure needs a state file with `amplitudes`".into())),
        (_, _, true) | (LoadedState::Mixed(_), _, _) => true,
        _ => false,
    };
    let (report, bounds_list, bound_name): (CollectReport, Vec<Value>, &str) = if mixed {
        let rho = state.density();
        let shape = rho.shape();
        let report = collect::collectibility_mixed_max(&rho, &cfg)?;
        let mut list = Vec::new();
        let name = if shape.k() == 2 { "ppt_bipartite" } else { "ppt_all_cuts" };
        if let Some(t) = report.threshold {
            list.push(bound_entry(name, t, report.value));
        }
        let r = bounds::r_bound(&BoundQuery::new(shape.dim(), shape.n(), 1.0, rho.purity().min(1.0))?)?;
        list.push(bound_entry("purity_r_n", r.r_n, report.value));
        (report, list, if bounds::ppt_bound(shape).is_ok() { name } else { "none" })
    } else {
        let LoadedState::Pure(psi) = &state else { unreachable!("pure mode needs a pure state") };
        let report = collect::collectibility_pure_max(psi, &cfg)?;
        let shape = psi.shape();
        let list = vec![
            bound_entry("separable_pure", collect::pure_separable_bound(shape), report.value),
            bound_entry("universal_pure", collect::pure_universal_bound(shape), report.value),
        ];
        (report, list, "separable_pure")
    };
    let shape = report.basis.shape();
    ctx.json(json!({
        "command": "collect",
        "mode": if mixed { "mixed" } else { "pure" },
        "k": shape.k(),
        "n": shape.n(),
        "value": report.value,
        "threshold": report.threshold,
        "checked_against": bound_name,
        "verdict": report.verdict,
        "bounds": bounds_list,
        "restarts": cfg.restarts,
        "restarts_converged": report.restarts_converged,
        "basis": report.basis.locals().iter().map(matrix_json).collect::<Vec<_>>(),
    }))
}

fn cmd_crit_table(ctx: &Context, decimals: usize) -> Result<String> {
    let mut out = ctx.csv_header();
    out.push_str("panel,k,n,p_min,p_ppt,p_crit\n");
    for row in bounds::critical_purity_table()? {
        out.push_str(&format!(
            "{},{},{},{:.d$},{:.d$},{:.d$}\n",
            row.panel,
            row.k,
            row.n,
            row.p_min,
            row.p_ppt,
            row.p_crit,
            d = decimals
        ));
    }
    Ok(out)
}

fn cmd_werner_scan(ctx: &Context, steps: usize) -> Result<String> {
    let mut out = ctx.csv_header();
    out.push_str("lambda,alpha_T,alpha_C\n");
    for row in werner::scan(steps)? {
        out.push_str(&format!("{},{},{}\n", ctx.num(row.lambda), ctx.num(row.alpha_t), ctx.num(row.alpha_c)));
    }
    Ok(out)
}

fn pick_records(records: Vec<ClickRecord>, axes: &AxisArgs) -> Result<(ClickRecord, ClickRecord)> {
    let find = |axis: MeasurementAxis| {
        records
            .iter()
            .find(|r| r.axis == axis)
            .cloned()
            .ok_or_else(|| Error::Parse(format!("no click records for axis {axis}")))
    };
    Ok((find(axes.axis_z)?, find(axes.axis_x)?))
}

fn cmd_witness(ctx: &Context, args: &WitnessArgs) -> Result<String> {
    let (z, x) = (args.axes.axis_z, args.axes.axis_x);
    if let Some(path) = &args.clicks {
        let file = fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let (rz, rx) = pick_records(pseudopure::read_click_csv(file)?, &args.axes)?;
        let report = pseudopure::witness_from_clicks(&rz, &rx)?;
        return ctx.json(json!({ "command": "witness", "input": "clicks", "verdict": report.verdict, "report": to_value(&report) }));
    }
    let path = args.state.as_ref().ok_or_else(|| Error::BadParams("need --state or --clicks".into()))?;
    let rho = read_state(path)?.density();
    let report = pseudopure::witness(&rho, z, x)?;
    let purity = pseudopure::bob_purity_bound(&rho, z, x)?;
    ctx.json(json!({
        "command": "witness",
        "input": "state",
        "verdict": report.verdict,
        "report": to_value(&report),
        "bob_purity_bound": to_value(&purity),
    }))
}

fn cmd_simulate(ctx: &Context, args: &SimulateArgs) -> Result<String> {
    if args.shots == 0 {
        return Err(Error::BadParams("--shots must be >= 1".into()));
    }
    let rho = read_state(&args.state)?.density();
    let (rz, rx) = pseudopure::simulate_pair(&rho, args.axes.axis_z, args.axes.axis_x, args.shots, ctx.seed)?;
    if let Some(path) = &args.clicks_out {
        let mut buf = ctx.csv_header().into_bytes();
        pseudopure::write_click_csv(&[rz.clone(), rx.clone()], &mut buf)?;
        fs::write(path, buf).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    }
    let (report, verdict, warnings) = match pseudopure::witness_from_clicks(&rz, &rx) {
        Ok(r) => {
            let v = r.verdict;
            (to_value(&r), v, Vec::new())
        }
        Err(e @ Error::InsufficientCounts(_)) => {
            log::warn!("{e}");
            (Value::Null, crate::Verdict::Inconclusive, vec![e.to_string()])
        }
        Err(e) => return Err(e),
    };
    ctx.json(json!({
        "command": "simulate",
        "shots": args.shots,
        "verdict": verdict,
        "warnings": warnings,
        "records": [to_value(&rz), to_value(&rx)],
        "report": report,
    }))
}

/// Caps rayon's global pool at `COLLECT_THREADS` when set.
pub fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("COLLECT_THREADS") {
        let n: usize = raw.trim().parse().map_err(|_| Error::BadConfig(format!("COLLECT_THREADS = '{raw}' is not a positive integer")))?;
        if n == 0 {
            return Err(Error::BadConfig("COLLECT_THREADS must be >= 1".into()));
        }
        // fails only if the pool was already built, in which case it stays as is
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs a parsed command; `args` is the argument echo for the header.
pub fn run(cli: &Cli, args: String) -> Result<String> {
    let ctx = Context { seed: cli.seed, digits: cli.digits, args };
    match &cli.command {
        Command::Collect(a) => cmd_collect(&ctx, a),
        Command::CritTable { decimals } => cmd_crit_table(&ctx, *decimals),
        Command::WernerScan { lambda_steps } => cmd_werner_scan(&ctx, *lambda_steps),
        Command::Witness(a) => cmd_witness(&ctx, a),
        Command::Simulate(a) => cmd_simulate(&ctx, a),
    }
}

/// Process entry point; returns the exit code (0 success, 2 invalid input,
/// 3 numerical failure).
pub fn main_entry() -> i32 {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let echo = argv.iter().skip(1).cloned().collect::<Vec<_>>().join(" ");
    let result = configure_threads().and_then(|()| run(&cli, echo)).and_then(|out| match &cli.output {
        Some(path) => fs::write(path, out).map_err(|e| Error::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{out}");
            Ok(())
        }
    });
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}: {e}", e.name());
            if e.is_numerical() {
                3
            } else {
                2
            }
        }
    }
}
