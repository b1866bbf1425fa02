//! Command-line front end: generate benchmark grids, fit rational models,
//! evaluate them on sweeps, and report errors.
//!
//! Exit codes: 0 success, 2 input/parse error, 3 numerical fit failure.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use paaa::fit::{error_report, fit, interpolate_fixed, FitMode, FitOptions, FitTrace};
use paaa::grid::{Partition, TensorGrid};
use paaa::io::{self, GridData, ModelData};
use paaa::loewner::assemble;
use paaa::mimo::{matrix_error_report, mimo_fit, Scalarizer};
use paaa::models;

#[derive(Parser)]
#[command(
    name = "paaa",
    version,
    about = "Multivariate rational approximation of sampled data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a built-in benchmark function onto a grid file.
    Generate(GenerateArgs),
    /// Fit a rational model to a grid file.
    Fit(FitArgs),
    /// Evaluate a model on a tensor sweep or on a reference grid.
    Eval(EvalArgs),
    /// Report the model error against a grid.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BenchModel {
    /// Two-variable synthetic rational.
    Synthetic2,
    /// Two-variable Penzl transfer function.
    Penzl2,
    /// Three-variable Penzl transfer function.
    Penzl3,
    /// Seeded random parametric state-space MIMO system.
    Mimo,
}

#[derive(Clone, Copy, ValueEnum)]
enum FileFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct GenerateArgs {
    /// Benchmark to sample.
    #[arg(long, value_enum)]
    model: BenchModel,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
    /// Per-axis sample counts, comma-separated (defaults per model).
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    /// Output format; csv only for two-variable real-valued grids.
    #[arg(long, value_enum, default_value = "json")]
    format: FileFormat,
    /// State dimension (mimo).
    #[arg(long, default_value_t = 6)]
    state_dim: usize,
    /// Output count (mimo).
    #[arg(long, default_value_t = 2)]
    outputs: usize,
    /// Input count (mimo).
    #[arg(long, default_value_t = 2)]
    inputs: usize,
    /// Seed for the mimo system draw.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum CliFitMode {
    /// Greedy interpolation/LS fit.
    Paaa,
    /// One-shot interpolation on an explicit support set.
    Interp,
}

#[derive(Args)]
struct FitArgs {
    /// Input grid file (JSON, or CSV for two-variable real grids).
    #[arg(long)]
    input: PathBuf,
    /// Where to write the fitted model JSON.
    #[arg(long)]
    model_out: PathBuf,
    /// Where to write the per-iteration trace (JSON lines).
    #[arg(long)]
    trace_out: Option<PathBuf>,
    /// Relative max-norm stopping tolerance.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Iteration cap.
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Per-axis caps on support counts, comma-separated.
    #[arg(long, value_delimiter = ',')]
    max_orders: Option<Vec<usize>>,
    /// Fitting mode.
    #[arg(long, value_enum, default_value = "paaa")]
    mode: CliFitMode,
    /// Weight LS rows by the previous iterate's reciprocal denominator.
    #[arg(long)]
    weighted: bool,
    /// Scalarizer seed for matrix-valued grids.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Support index lists for interp mode: per-axis comma lists joined
    /// by semicolons, e.g. "0,5,9;2,7".
    #[arg(long)]
    support: Option<String>,
    /// Dump the final Loewner system as CSV (alternating re/im columns).
    #[arg(long)]
    dump_loewner: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON to evaluate.
    #[arg(long)]
    model: PathBuf,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Per-axis sweep specs `lin:a:b:n`, `log:a:b:n`, `ilin:…`, `ilog:…`
    /// (i-prefix places points on the imaginary axis). One per axis.
    #[arg(long)]
    sweep: Vec<String>,
    /// Reference grid: evaluate at its points and add an abs_error column.
    #[arg(long)]
    grid: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Grid file to compare against.
    #[arg(long)]
    grid: PathBuf,
}

enum CliError {
    /// Bad input: file, parse, shape, or option problems (exit 2).
    Input(String),
    /// Numerical failure inside the fit (exit 3).
    Fit(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Fit(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Fit(m) => m,
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Input(e.to_string())
}

fn fit_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Fit(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Fit(args) => cmd_fit(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Report(args) => cmd_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}

fn read_grid(path: &PathBuf) -> Result<GridData, CliError> {
    let text = fs::read_to_string(path).map_err(input_err)?;
    if path.extension().is_some_and(|e| e == "csv") {
        Ok(GridData::Scalar(
            io::grid_from_csv(&text).map_err(input_err)?,
        ))
    } else {
        io::grid_from_json(&text).map_err(input_err)
    }
}

fn read_model(path: &PathBuf) -> Result<ModelData, CliError> {
    let text = fs::read_to_string(path).map_err(input_err)?;
    io::model_from_json(&text).map_err(input_err)
}

// ---------------------------------------------------------------------------
// generate

fn cmd_generate(args: GenerateArgs) -> Result<(), CliError> {
    let counts = |defaults: &[usize]| -> Result<Vec<usize>, CliError> {
        match &args.points {
            None => Ok(defaults.to_vec()),
            Some(p) if p.len() == defaults.len() => Ok(p.clone()),
            Some(p) => Err(CliError::Input(format!(
                "--points needs {} entries for this model, got {}",
                defaults.len(),
                p.len()
            ))),
        }
    };

    let payload = match args.model {
        BenchModel::Synthetic2 => {
            let n = counts(&[21, 21])?;
            let grid = models::synthetic_2var_grid(n[0], n[1]).map_err(input_err)?;
            match args.format {
                FileFormat::Json => io::grid_to_json(&grid),
                FileFormat::Csv => io::grid_to_csv(&grid).map_err(input_err)?,
            }
        }
        BenchModel::Penzl2 => {
            let n = counts(&[100, 30])?;
            let grid = models::penzl_2var_grid(n[0], n[1]).map_err(input_err)?;
            match args.format {
                FileFormat::Json => io::grid_to_json(&grid),
                FileFormat::Csv => {
                    return Err(CliError::Input(
                        "penzl2 samples are complex; csv holds real data only".into(),
                    ))
                }
            }
        }
        BenchModel::Penzl3 => {
            let n = counts(&[100, 10, 10])?;
            let grid = models::penzl_3var_grid(n[0], n[1], n[2]).map_err(input_err)?;
            match args.format {
                FileFormat::Json => io::grid_to_json(&grid),
                FileFormat::Csv => {
                    return Err(CliError::Input("penzl3 grids are three-variable".into()))
                }
            }
        }
        BenchModel::Mimo => {
            let n = counts(&[40, 10])?;
            let grid = models::random_mimo_grid(
                args.state_dim,
                args.outputs,
                args.inputs,
                args.seed,
                n[0],
                n[1],
            )
            .map_err(input_err)?;
            match args.format {
                FileFormat::Json => io::matrix_grid_to_json(&grid),
                FileFormat::Csv => {
                    return Err(CliError::Input("matrix grids have no csv form".into()))
                }
            }
        }
    };
    fs::write(&args.out, payload).map_err(input_err)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// fit

#[derive(Serialize)]
struct FitSummary {
    mode: &'static str,
    iterations: usize,
    support_counts: Vec<usize>,
    orders: Vec<usize>,
    rel_error: f64,
    stop_reason: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    sigma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scalarizer_seed: Option<u64>,
    zero_weights: usize,
}

fn parse_support(text: &str, ndim: usize) -> Result<Partition, CliError> {
    let lists: Vec<Vec<usize>> = text
        .split(';')
        .map(|axis| {
            axis.split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| s.trim().parse::<usize>().map_err(input_err))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    if lists.len() != ndim {
        return Err(CliError::Input(format!(
            "--support has {} axis lists, grid has {ndim} axes",
            lists.len()
        )));
    }
    Partition::from_support(lists).map_err(input_err)
}

fn dump_loewner_csv(grid: &TensorGrid, part: &Partition, path: &PathBuf) -> Result<(), CliError> {
    let system = assemble(grid, part).map_err(fit_err)?;
    let mut out = String::new();
    for r in 0..system.matrix.nrows() {
        let mut cells = Vec::with_capacity(2 * system.matrix.ncols());
        for c in 0..system.matrix.ncols() {
            let z = system.matrix[(r, c)];
            cells.push(format!("{}", z.re));
            cells.push(format!("{}", z.im));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    fs::write(path, out).map_err(input_err)
}

fn write_outputs(
    args: &FitArgs,
    model_json: String,
    trace: Option<&FitTrace>,
    summary: &FitSummary,
) -> Result<(), CliError> {
    fs::write(&args.model_out, model_json).map_err(input_err)?;
    if let Some(path) = &args.trace_out {
        let text = trace.map(io::trace_to_jsonl).unwrap_or_default();
        fs::write(path, text).map_err(input_err)?;
    }
    println!(
        "{}",
        serde_json::to_string(summary).expect("summary serializes")
    );
    Ok(())
}

fn cmd_fit(args: FitArgs) -> Result<(), CliError> {
    let data = read_grid(&args.input)?;
    let opts = FitOptions {
        tol: args.tol,
        max_iters: args.max_iters,
        max_orders: args.max_orders.clone(),
        weighted: args.weighted,
        mode: FitMode::Greedy,
    };

    match (data, args.mode) {
        (GridData::Scalar(grid), CliFitMode::Paaa) => {
            let (model, trace) = fit(&grid, &opts).map_err(fit_err)?;
            if let Some(path) = &args.dump_loewner {
                let part =
                    Partition::from_coords(grid.axes(), model.support_points()).map_err(fit_err)?;
                dump_loewner_csv(&grid, &part, path)?;
            }
            let zero_weights = model.zero_weights().len();
            if zero_weights > 0 {
                eprintln!("warning: {zero_weights} support weights are exactly zero");
            }
            let summary = FitSummary {
                mode: "paaa",
                iterations: trace.iterations.len(),
                support_counts: model.counts(),
                orders: model.orders(),
                rel_error: trace.final_error().unwrap_or(0.0),
                stop_reason: trace.stop.as_str().to_string(),
                sigma_min: None,
                scalarizer_seed: None,
                zero_weights,
            };
            write_outputs(&args, io::model_to_json(&model), Some(&trace), &summary)
        }
        (GridData::Scalar(grid), CliFitMode::Interp) => {
            let support = args
                .support
                .as_ref()
                .ok_or_else(|| CliError::Input("interp mode needs --support index lists".into()))?;
            let part = parse_support(support, grid.ndim())?;
            part.validate_for(grid.shape()).map_err(input_err)?;
            let (model, solution) = interpolate_fixed(&grid, &part).map_err(fit_err)?;
            if let Some(path) = &args.dump_loewner {
                dump_loewner_csv(&grid, &part, path)?;
            }
            let (rel_error, _) = error_report(&grid, &model).map_err(fit_err)?;
            let zero_weights = model.zero_weights().len();
            if zero_weights > 0 {
                eprintln!("warning: {zero_weights} support weights are exactly zero");
            }
            let summary = FitSummary {
                mode: "interp",
                iterations: 0,
                support_counts: model.counts(),
                orders: model.orders(),
                rel_error,
                stop_reason: "fixed_support".to_string(),
                sigma_min: Some(solution.sigma_min),
                scalarizer_seed: None,
                zero_weights,
            };
            write_outputs(&args, io::model_to_json(&model), None, &summary)
        }
        (GridData::Matrix(grid), CliFitMode::Paaa) => {
            let (rows, cols) = grid.value_shape();
            let sc = Scalarizer::from_seed(rows, cols, args.seed).map_err(input_err)?;
            let (model, trace) = mimo_fit(&grid, &opts, &sc).map_err(fit_err)?;
            if let Some(path) = &args.dump_loewner {
                let scalar = paaa::mimo::scalarize(&grid, &sc).map_err(fit_err)?;
                let part = Partition::from_coords(scalar.axes(), model.support_points())
                    .map_err(fit_err)?;
                dump_loewner_csv(&scalar, &part, path)?;
            }
            let (rel_error, _) = matrix_error_report(&grid, &model).map_err(fit_err)?;
            let zero_weights = model
                .weights()
                .iter()
                .filter(|w| **w == Complex64::new(0.0, 0.0))
                .count();
            if zero_weights > 0 {
                eprintln!("warning: {zero_weights} support weights are exactly zero");
            }
            let summary = FitSummary {
                mode: "mimo",
                iterations: trace.iterations.len(),
                support_counts: model.counts(),
                orders: model.orders(),
                rel_error,
                stop_reason: trace.stop.as_str().to_string(),
                sigma_min: None,
                scalarizer_seed: Some(args.seed),
                zero_weights,
            };
            write_outputs(
                &args,
                io::matrix_model_to_json(&model),
                Some(&trace),
                &summary,
            )
        }
        (GridData::Matrix(_), CliFitMode::Interp) => Err(CliError::Input(
            "interp mode works on scalar grids only".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// eval

fn parse_sweep_axis(spec: &str) -> Result<Vec<Complex64>, CliError> {
    let (imaginary, rest) = match spec.strip_prefix('i') {
        Some(rest) => (true, rest),
        None => (false, spec),
    };
    let parts: Vec<&str> = rest.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Input(format!(
            "sweep spec '{spec}' is not [i]lin:start:stop:count or [i]log:start:stop:count"
        )));
    }
    let start: f64 = parts[1].parse().map_err(input_err)?;
    let stop: f64 = parts[2].parse().map_err(input_err)?;
    let count: usize = parts[3].parse().map_err(input_err)?;
    if count == 0 {
        return Err(CliError::Input("sweep count must be positive".into()));
    }
    let points = match parts[0] {
        "lin" => models::linspace(start, stop, count),
        "log" => {
            if start <= 0.0 || stop <= 0.0 {
                return Err(CliError::Input("log sweeps need positive endpoints".into()));
            }
            models::logspace(start, stop, count)
        }
        other => {
            return Err(CliError::Input(format!(
                "unknown sweep spacing '{other}' in '{spec}'"
            )))
        }
    };
    Ok(if imaginary {
        models::imaginary_axis(&points)
    } else {
        models::real_axis(&points)
    })
}

fn eval_header(model: &ModelData, with_error: bool) -> String {
    let mut cols = Vec::new();
    for d in 0..model.ndim() {
        cols.push(format!("x{d}_re"));
        cols.push(format!("x{d}_im"));
    }
    match model {
        ModelData::Scalar(_) => {
            cols.push("re".into());
            cols.push("im".into());
        }
        ModelData::Matrix(m) => {
            let (rows, ncols) = m.value_shape();
            for r in 0..rows {
                for c in 0..ncols {
                    cols.push(format!("h{r}{c}_re"));
                    cols.push(format!("h{r}{c}_im"));
                }
            }
        }
    }
    if with_error {
        cols.push("abs_error".into());
    }
    cols.push("pole".into());
    cols.join(",")
}

fn eval_row(
    model: &ModelData,
    point: &[Complex64],
    reference: Option<&GridData>,
    ref_lin: usize,
    poles: &mut usize,
) -> String {
    let mut cells: Vec<String> = Vec::new();
    for x in point {
        cells.push(format!("{}", x.re));
        cells.push(format!("{}", x.im));
    }
    let mut pole = false;
    let mut abs_error: Option<f64> = None;
    match model {
        ModelData::Scalar(m) => match m.eval(point) {
            Ok(v) => {
                cells.push(format!("{}", v.re));
                cells.push(format!("{}", v.im));
                if let Some(GridData::Scalar(g)) = reference {
                    abs_error = Some((g.values()[ref_lin] - v).norm());
                }
            }
            Err(_) => {
                pole = true;
                cells.push("nan".into());
                cells.push("nan".into());
                if reference.is_some() {
                    abs_error = Some(f64::NAN);
                }
            }
        },
        ModelData::Matrix(m) => {
            let (rows, ncols) = m.value_shape();
            match m.eval_matrix(point) {
                Ok(v) => {
                    for r in 0..rows {
                        for c in 0..ncols {
                            cells.push(format!("{}", v[(r, c)].re));
                            cells.push(format!("{}", v[(r, c)].im));
                        }
                    }
                    if let Some(GridData::Matrix(g)) = reference {
                        let diff = g.values()[ref_lin].clone() - &v;
                        abs_error = Some(diff.iter().map(|z| z.norm()).fold(0.0, f64::max));
                    }
                }
                Err(_) => {
                    pole = true;
                    for _ in 0..rows * ncols {
                        cells.push("nan".into());
                        cells.push("nan".into());
                    }
                    if reference.is_some() {
                        abs_error = Some(f64::NAN);
                    }
                }
            }
        }
    }
    if let Some(err) = abs_error {
        cells.push(format!("{err}"));
    }
    if pole {
        *poles += 1;
    }
    cells.push(if pole { "1".into() } else { "0".into() });
    cells.join(",")
}

fn cmd_eval(args: EvalArgs) -> Result<(), CliError> {
    let model = read_model(&args.model)?;

    let (axes, reference): (Vec<Vec<Complex64>>, Option<GridData>) = match &args.grid {
        Some(path) => {
            let data = read_grid(path)?;
            let axes = match &data {
                GridData::Scalar(g) => g.axes().to_vec(),
                GridData::Matrix(g) => g.axes().to_vec(),
            };
            match (&data, &model) {
                (GridData::Scalar(_), ModelData::Matrix(_))
                | (GridData::Matrix(_), ModelData::Scalar(_)) => {
                    return Err(CliError::Input(
                        "reference grid kind does not match the model kind".into(),
                    ))
                }
                _ => {}
            }
            (axes, Some(data))
        }
        None => {
            if args.sweep.is_empty() {
                return Err(CliError::Input("eval needs --sweep specs or --grid".into()));
            }
            if args.sweep.len() != model.ndim() {
                return Err(CliError::Input(format!(
                    "{} sweep specs for a {}-variable model",
                    args.sweep.len(),
                    model.ndim()
                )));
            }
            let axes = args
                .sweep
                .iter()
                .map(|s| parse_sweep_axis(s))
                .collect::<Result<Vec<_>, _>>()?;
            (axes, None)
        }
    };

    if axes.len() != model.ndim() {
        return Err(CliError::Input(format!(
            "grid has {} axes, model has {} variables",
            axes.len(),
            model.ndim()
        )));
    }

    let shape: Vec<usize> = axes.iter().map(Vec::len).collect();
    let total: usize = shape.iter().product();
    let mut out = String::new();
    let _ = writeln!(out, "{}", eval_header(&model, reference.is_some()));
    let mut poles = 0usize;
    let mut multi = vec![0usize; shape.len()];
    for lin in 0..total {
        let mut rem = lin;
        for d in (0..shape.len()).rev() {
            multi[d] = rem % shape[d];
            rem /= shape[d];
        }
        let point: Vec<Complex64> = multi.iter().zip(&axes).map(|(&i, a)| a[i]).collect();
        let _ = writeln!(
            out,
            "{}",
            eval_row(&model, &point, reference.as_ref(), lin, &mut poles)
        );
    }
    fs::write(&args.out, out).map_err(input_err)?;
    if poles > 0 {
        eprintln!("warning: {poles} evaluation points hit a pole");
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// report

#[derive(Serialize)]
struct ReportSummary {
    max_rel_error: f64,
    argmax: Vec<[f64; 2]>,
    orders: Vec<usize>,
}

fn cmd_report(args: ReportArgs) -> Result<(), CliError> {
    let model = read_model(&args.model)?;
    let data = read_grid(&args.grid)?;
    let (rel, argmax_point) = match (&model, &data) {
        (ModelData::Scalar(m), GridData::Scalar(g)) => {
            if m.ndim() != g.ndim() {
                return Err(CliError::Input(format!(
                    "model has {} variables, grid has {}",
                    m.ndim(),
                    g.ndim()
                )));
            }
            let (rel, errors) = error_report(g, m).map_err(fit_err)?;
            let argmax = argmax_index(&errors);
            (rel, g.point_at(&g.multi_index(argmax)))
        }
        (ModelData::Matrix(m), GridData::Matrix(g)) => {
            if m.ndim() != g.ndim() || m.value_shape() != g.value_shape() {
                return Err(CliError::Input(
                    "model and grid dimensions do not match".into(),
                ));
            }
            let (rel, errors) = matrix_error_report(g, m).map_err(fit_err)?;
            let argmax = argmax_index(&errors);
            (rel, g.point_at(&g.multi_index(argmax)))
        }
        _ => {
            return Err(CliError::Input(
                "model kind (scalar/matrix) does not match grid kind".into(),
            ))
        }
    };
    let summary = ReportSummary {
        max_rel_error: rel,
        argmax: argmax_point.iter().map(|z| [z.re, z.im]).collect(),
        orders: model.orders(),
    };
    println!(
        "{}",
        serde_json::to_string(&summary).expect("summary serializes")
    );
    Ok(())
}

fn argmax_index(errors: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..errors.len() {
        if errors[i] > errors[best] {
            best = i;
        }
    }
    best
}
