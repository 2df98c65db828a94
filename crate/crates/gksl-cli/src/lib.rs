// Copyright 2026 GKSL Numerics Contributors
// SPDX-License-Identifier: Apache-2.0

//! Command implementations behind the `gksl` binary.
//!
//! Every command is a pure function of its configuration (seeds determine
//! all randomness, reports carry no timestamps), writes files atomically,
//! and returns the list of failed assertion bands; the binary maps those to
//! exit code 1 and maps error families to distinct codes (see
//! [`exit_code`]).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gksl_core::align;
use gksl_core::channel::{kraus_from_choi, KrausSet, DEFAULT_RANK_TOL};
use gksl_core::channel::{choi_from_super, super_from_kraus};
use gksl_core::error::CoreError;
use gksl_core::extraction::{self, kraus_of_channel};
use gksl_core::io::{self, Channel, GeneratorDto, IoError};
use gksl_core::operator::Operator;
use gksl_core::random;
use gksl_core::semigroup;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Smallest and largest supported Hilbert-space dimension for `gen`.
pub const DIM_RANGE: (usize, usize) = (2, 8);

const TROTTER_SLOPE_BAND: (f64, f64) = (-1.15, -0.85);
const SLOPE_M_BAND: (f64, f64) = (0.45, 0.55);
const SLOPE_Y_BAND: (f64, f64) = (0.85, 1.15);
const CLOSENESS_MIN_EXPONENT: f64 = 0.4;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    Io(IoError),
    Config(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Config(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        match e {
            IoError::Core(c) => CliError::Core(c),
            other => CliError::Io(other),
        }
    }
}

/// Exit code per error family: 2 configuration, 3 shape/validation,
/// 4 positivity, 5 completeness/canonical form, 6 step/grid, 7 file I/O
/// and parsing. Band failures exit with 1 and a report.
pub fn exit_code(err: &CliError) -> i32 {
    match err {
        CliError::Config(_) => 2,
        CliError::Io(_) => 7,
        CliError::Core(e) => match e {
            CoreError::DimensionMismatch { .. }
            | CoreError::NonFinite
            | CoreError::NotHermitian { .. }
            | CoreError::UnsupportedDim { .. }
            | CoreError::PadTooSmall { .. } => 3,
            CoreError::NotPsd { .. } | CoreError::NotCp { .. } => 4,
            CoreError::NotUnital { .. }
            | CoreError::NotUnitary { .. }
            | CoreError::NotCanonical { .. } => 5,
            CoreError::StepTooLarge { .. }
            | CoreError::NegativeTime(_)
            | CoreError::InsufficientGrid(_)
            | CoreError::EigFailed => 6,
        },
    }
}

#[derive(Parser, Debug)]
#[command(name = "gksl", version, about = "GKSL generator and quantum channel numerics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate a random instance file (generator, unital channel, CP map).
    Gen(GenArgs),
    /// Validate a generator or channel file and report every check.
    Validate(ValidateArgs),
    /// Exponentiate a generator to the channel at time t.
    Expm(ExpmArgs),
    /// Sweep the product-formula channels and fit the convergence rate.
    Trotter(TrotterArgs),
    /// Recover a generator from its channels at a small step pair.
    Extract(ExtractArgs),
    /// Optimally align the Kraus sets of two channels.
    Align(AlignArgs),
    /// Run the Kraus-closeness experiment against a perturbed channel.
    Closeness(ClosenessArgs),
    /// Measure the step scaling laws of a generator's channel family.
    Diagnose(DiagnoseArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum GenKind {
    Generator,
    UnitalChannel,
    CpMap,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, env = "GKSL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long, env = "GKSL_DIM", default_value_t = 2)]
    pub dim: usize,
    #[arg(long, value_enum)]
    pub kind: GenKind,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
    /// Residual tolerance for the unitality and CP checks.
    #[arg(long, env = "GKSL_TOL", default_value_t = 1.0e-9)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct ExpmArgs {
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = ReprKind::Super)]
    pub repr: ReprKind,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum ReprKind {
    Super,
    Choi,
    Kraus,
}

#[derive(Args, Debug)]
pub struct TrotterArgs {
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    #[arg(long = "n-grid", env = "GKSL_N_GRID", value_delimiter = ',',
          default_values_t = semigroup::DEFAULT_N_GRID)]
    pub n_grid: Vec<u64>,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtractArgs {
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long, env = "GKSL_DT1", default_value_t = extraction::DEFAULT_DT_PAIR.0)]
    pub dt1: f64,
    #[arg(long, env = "GKSL_DT2", default_value_t = extraction::DEFAULT_DT_PAIR.1)]
    pub dt2: f64,
    #[arg(long = "dt-grid", env = "GKSL_DT_GRID", value_delimiter = ',',
          default_values_t = extraction::DEFAULT_DT_GRID)]
    pub dt_grid: Vec<f64>,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AlignArgs {
    /// Reference channel file.
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    /// Target channel file, mixed towards the reference.
    #[arg(long)]
    pub target: PathBuf,
    /// Rank cut for Kraus extraction from Choi/super inputs.
    #[arg(long, env = "GKSL_TOL", default_value_t = DEFAULT_RANK_TOL)]
    pub tol: f64,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ClosenessArgs {
    /// Base channel file.
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long, env = "GKSL_SEED", default_value_t = 0)]
    pub seed: u64,
    #[arg(long = "eps-grid", env = "GKSL_EPS_GRID", value_delimiter = ',',
          default_values_t = [1.0e-1, 1.0e-2, 1.0e-3, 1.0e-4])]
    pub eps_grid: Vec<f64>,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
    /// CSV copy of the table (defaults to the JSON path with .csv).
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DiagnoseArgs {
    #[arg(long = "in", env = "GKSL_IN")]
    pub input: PathBuf,
    #[arg(long = "dt-grid", env = "GKSL_DT_GRID", value_delimiter = ',',
          default_values_t = extraction::DEFAULT_DT_GRID)]
    pub dt_grid: Vec<f64>,
    #[arg(long = "out", env = "GKSL_OUT")]
    pub out: Option<PathBuf>,
}

/// Outcome of a command: the report JSON already written (or printed) and
/// the failed bands, if any.
pub struct Outcome {
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn ok() -> Self {
        Self {
            failures: Vec::new(),
        }
    }
}

fn wrap_report<T: Serialize>(
    command: &str,
    config: serde_json::Value,
    report: &T,
    failures: &[String],
) -> serde_json::Value {
    json!({
        "version": VERSION,
        "command": command,
        "config": config,
        "report": report,
        "failures": failures,
    })
}

fn emit(path: Option<&Path>, value: &serde_json::Value) -> Result<(), CliError> {
    match path {
        Some(p) => io::write_json_atomic(p, value).map_err(CliError::from),
        None => {
            println!("{}", serde_json::to_string_pretty(value).expect("serializable"));
            Ok(())
        }
    }
}

fn check_dim(dim: usize) -> Result<(), CliError> {
    if dim < DIM_RANGE.0 || dim > DIM_RANGE.1 {
        return Err(CliError::Core(CoreError::UnsupportedDim {
            dim,
            min: DIM_RANGE.0,
            max: DIM_RANGE.1,
        }));
    }
    Ok(())
}

fn kraus_of_file_channel(chan: &Channel, tol: f64) -> Result<KrausSet, CliError> {
    match chan {
        Channel::Kraus(k) => Ok(k.clone()),
        other => Ok(kraus_from_choi(&choi_from_super(&other.to_super())?, tol)?),
    }
}

pub fn run_gen(args: &GenArgs) -> Result<Outcome, CliError> {
    check_dim(args.dim)?;
    let mut rng = random::rng_from_seed(args.seed);
    match args.kind {
        GenKind::Generator => {
            let g = random::generator(&mut rng, args.dim);
            io::save_generator(&args.out, &g)?;
        }
        GenKind::UnitalChannel => {
            let g = random::generator(&mut rng, args.dim);
            let s = semigroup::channel_at(&g, 1.0)?;
            io::save_channel(&args.out, &Channel::Super(s))?;
        }
        GenKind::CpMap => {
            let k = random::cp_map(&mut rng, args.dim);
            io::save_channel(&args.out, &Channel::Kraus(k))?;
        }
    }
    Ok(Outcome::ok())
}

#[derive(Serialize)]
struct CheckRow {
    name: String,
    pass: bool,
    value: f64,
    threshold: f64,
}

fn push_check(rows: &mut Vec<CheckRow>, failures: &mut Vec<String>, name: &str, value: f64, threshold: f64) {
    let pass = value <= threshold;
    if !pass {
        failures.push(format!("{name}: {value:.3e} exceeds {threshold:.3e}"));
    }
    rows.push(CheckRow {
        name: name.into(),
        pass,
        value,
        threshold,
    });
}

pub fn run_validate(args: &ValidateArgs) -> Result<Outcome, CliError> {
    let value: serde_json::Value =
        io::read_json(&args.input).map_err(CliError::from)?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut extra = serde_json::Map::new();

    if value.get("H").is_some() {
        let dto: GeneratorDto = serde_json::from_value(value).map_err(IoError::from)?;
        let g = dto.to_generator()?;
        push_check(
            &mut rows,
            &mut failures,
            "hamiltonian_hermiticity",
            g.hamiltonian().hermiticity_residual(),
            1.0e-12 * (1.0 + g.hamiltonian().hs_norm()),
        );
        push_check(
            &mut rows,
            &mut failures,
            "canonical_form",
            g.canonical_residual(),
            gksl_core::generator::CANONICAL_TOL,
        );
        extra.insert("canonical".into(), json!(g.is_canonical()));
        let canon = g.canonicalize();
        let (lhs, rhs) = canon.trace_identity_check()?;
        extra.insert("trace_identity".into(), json!({"lhs": lhs, "rhs": rhs}));
        push_check(
            &mut rows,
            &mut failures,
            "trace_identity",
            (lhs - rhs).abs(),
            1.0e-10 * (1.0 + rhs.abs()),
        );
        let s = g.build_super();
        let unital = s.apply(&Operator::identity(g.dim()))?;
        push_check(
            &mut rows,
            &mut failures,
            "annihilates_identity",
            unital.hs_norm(),
            1.0e-10 * (1.0 + s.hs_norm()),
        );
    } else if value.get("repr").is_some() {
        let dto: io::ChannelDto = serde_json::from_value(value).map_err(IoError::from)?;
        let chan = Channel::from_dto(&dto)?;
        let j = choi_from_super(&chan.to_super())?;
        let spectrum;
        {
            let (vals, _) = gksl_core::linalg::hermitian_eigen(j.matrix())?;
            spectrum = vals;
        }
        let min = *spectrum.last().unwrap_or(&0.0);
        let norm = spectrum.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        push_check(
            &mut rows,
            &mut failures,
            "completely_positive",
            (-min).max(0.0),
            args.tol.max(1.0e-9 * norm),
        );
        push_check(
            &mut rows,
            &mut failures,
            "unitality",
            j.unitality_residual(),
            args.tol,
        );
        extra.insert("choi_spectrum".into(), json!(spectrum));
    } else {
        return Err(CliError::Io(IoError::Format(
            "file is neither a generator (no \"H\" field) nor a channel (no \"repr\" field)"
                .into(),
        )));
    }

    let report = json!({"checks": rows, "details": extra});
    let config = json!({"in": args.input, "tol": args.tol});
    let wrapped = wrap_report("validate", config, &report, &failures);
    emit(args.out.as_deref(), &wrapped)?;
    Ok(Outcome { failures })
}

pub fn run_expm(args: &ExpmArgs) -> Result<Outcome, CliError> {
    let g = io::load_generator(&args.input)?;
    let s = semigroup::channel_at(&g, args.t)?;
    let chan = match args.repr {
        ReprKind::Super => Channel::Super(s),
        ReprKind::Choi => Channel::Choi(choi_from_super(&s)?),
        ReprKind::Kraus => Channel::Kraus(kraus_of_channel(&s)?),
    };
    io::save_channel(&args.out, &chan)?;
    Ok(Outcome::ok())
}

pub fn run_trotter(args: &TrotterArgs) -> Result<Outcome, CliError> {
    let g = io::load_generator(&args.input)?;
    let report = semigroup::trotter_convergence(&g, args.t, &args.n_grid)?;
    let mut failures = Vec::new();
    match report.fitted_slope {
        Some(s) if !(TROTTER_SLOPE_BAND.0..=TROTTER_SLOPE_BAND.1).contains(&s) => {
            failures.push(format!(
                "trotter_slope: {s:.4} outside [{}, {}]",
                TROTTER_SLOPE_BAND.0, TROTTER_SLOPE_BAND.1
            ));
        }
        _ => {}
    }
    if !report.monotone {
        failures.push("trotter_errors: not monotone within 10% jitter".into());
    }
    let config = json!({
        "in": args.input, "t": args.t, "n_grid": args.n_grid,
    });
    let wrapped = wrap_report("trotter", config, &report, &failures);
    emit(args.out.as_deref(), &wrapped)?;
    Ok(Outcome { failures })
}

pub fn run_extract(args: &ExtractArgs) -> Result<Outcome, CliError> {
    let g = io::load_generator(&args.input)?;
    let result = extraction::extract_generator_with(
        |t| semigroup::channel_at(&g, t),
        (args.dt1, args.dt2),
        &args.dt_grid,
    )?;
    let mut failures = Vec::new();
    if let Some(s) = result.diagnostics.slope_m {
        if !(SLOPE_M_BAND.0..=SLOPE_M_BAND.1).contains(&s) {
            failures.push(format!(
                "slope_m: {s:.4} outside [{}, {}]",
                SLOPE_M_BAND.0, SLOPE_M_BAND.1
            ));
        }
    }
    if let Some(s) = result.diagnostics.slope_y {
        if !(SLOPE_Y_BAND.0..=SLOPE_Y_BAND.1).contains(&s) {
            failures.push(format!(
                "slope_y: {s:.4} outside [{}, {}]",
                SLOPE_Y_BAND.0, SLOPE_Y_BAND.1
            ));
        }
    }
    let l_norm = result.generator.build_super().hs_norm();
    for (i, r) in result.residuals.iter().enumerate() {
        let bound = 1.0e-8 * (1.0 + l_norm);
        if *r > bound {
            failures.push(format!(
                "splitting_residual[{i}]: {r:.3e} exceeds {bound:.3e}"
            ));
        }
    }
    // the input generator is the ground truth here; report the round trip
    let roundtrip = result.generator.distance(&g)? / (1.0 + g.build_super().hs_norm());
    let mut dto = serde_json::to_value(io::ExtractionResultDto::from_result(&result))
        .expect("serializable");
    dto.as_object_mut()
        .expect("object")
        .insert("roundtrip_relative_distance".into(), json!(roundtrip));
    let config = json!({
        "in": args.input, "dt1": args.dt1, "dt2": args.dt2, "dt_grid": args.dt_grid,
    });
    let wrapped = wrap_report("extract", config, &dto, &failures);
    emit(args.out.as_deref(), &wrapped)?;
    Ok(Outcome { failures })
}

pub fn run_align(args: &AlignArgs) -> Result<Outcome, CliError> {
    let reference = kraus_of_file_channel(&io::load_channel(&args.input)?, args.tol)?;
    let target = kraus_of_file_channel(&io::load_channel(&args.target)?, args.tol)?;
    let result = align::align(&reference, &target)?;
    let mut failures = Vec::new();
    let same_map = align::kraus_map_distance(&result.aligned, &target)?;
    let scale = 1.0 + super_from_kraus(&target).hs_norm();
    if same_map > 1.0e-11 * scale {
        failures.push(format!(
            "aligned_map_residual: {same_map:.3e} exceeds {:.3e}",
            1.0e-11 * scale
        ));
    }
    if result.distance_after > result.distance_before + 1.0e-12 {
        failures.push(format!(
            "alignment_regression: after {:.3e} exceeds before {:.3e}",
            result.distance_after, result.distance_before
        ));
    }
    let dto = io::AlignmentResultDto::from_result(&result);
    let config = json!({
        "in": args.input, "target": args.target, "tol": args.tol,
    });
    let wrapped = wrap_report("align", config, &dto, &failures);
    emit(args.out.as_deref(), &wrapped)?;
    Ok(Outcome { failures })
}

pub fn run_closeness(args: &ClosenessArgs) -> Result<Outcome, CliError> {
    let base = kraus_of_file_channel(&io::load_channel(&args.input)?, DEFAULT_RANK_TOL)?;
    let report = align::closeness_experiment(&base, &args.eps_grid, args.seed)?;
    let mut failures = Vec::new();
    for w in report.rows.windows(2) {
        if w[1].aligned_distance >= w[0].aligned_distance {
            failures.push(format!(
                "aligned_distance not decreasing between eps {:.1e} and {:.1e}",
                w[0].epsilon, w[1].epsilon
            ));
        }
    }
    if let Some(exp) = report.fitted_exponent {
        if exp < CLOSENESS_MIN_EXPONENT {
            failures.push(format!(
                "fitted_exponent: {exp:.3} below {CLOSENESS_MIN_EXPONENT}"
            ));
        }
    }
    let config = json!({
        "in": args.input, "seed": args.seed, "eps_grid": args.eps_grid,
    });
    let wrapped = wrap_report("closeness", config, &report, &failures);
    emit(args.out.as_deref(), &wrapped)?;

    let csv_path = args.csv.clone().or_else(|| {
        args.out
            .as_ref()
            .map(|p| p.with_extension("csv"))
    });
    if let Some(csv) = csv_path {
        let mut text = String::from("epsilon,channel_distance,aligned_distance\n");
        for row in &report.rows {
            text.push_str(&format!(
                "{},{},{}\n",
                row.epsilon, row.channel_distance, row.aligned_distance
            ));
        }
        io::write_atomic(&csv, text.as_bytes()).map_err(CliError::from)?;
    }
    Ok(Outcome { failures })
}

pub fn run_diagnose(args: &DiagnoseArgs) -> Result<Outcome, CliError> {
    let g = io::load_generator(&args.input)?;
    let diag =
        extraction::order_diagnostics(|t| semigroup::channel_at(&g, t), &args.dt_grid)?;
    let mut failures = Vec::new();
    if let Some(s) = diag.slope_m {
        if !(SLOPE_M_BAND.0..=SLOPE_M_BAND.1).contains(&s) {
            failures.push(format!(
                "slope_m: {s:.4} outside [{}, {}]",
                SLOPE_M_BAND.0, SLOPE_M_BAND.1
            ));
        }
    }
    if let Some(s) = diag.slope_y {
        if !(SLOPE_Y_BAND.0..=SLOPE_Y_BAND.1).contains(&s) {
            failures.push(format!(
                "slope_y: {s:.4} outside [{}, {}]",
                SLOPE_Y_BAND.0, SLOPE_Y_BAND.1
            ));
        }
    }
    for (i, r) in diag.trace_residuals.iter().enumerate() {
        if *r > 1.0e-9 {
            failures.push(format!("trace_residual[{i}]: {r:.3e} exceeds 1e-9"));
        }
    }
    let degenerate = diag.slope_m.is_none() || diag.slope_y.is_none();
    let mut report = serde_json::to_value(&diag).expect("serializable");
    report
        .as_object_mut()
        .expect("object")
        .insert("degenerate".into(), json!(degenerate));
    let config = json!({"in": args.input, "dt_grid": args.dt_grid});
    let wrapped = wrap_report("diagnose", config, &report, &failures);
    emit(args.out.as_deref(), &wrapped)?;
    Ok(Outcome { failures })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Gen(a) => run_gen(a),
        Command::Validate(a) => run_validate(a),
        Command::Expm(a) => run_expm(a),
        Command::Trotter(a) => run_trotter(a),
        Command::Extract(a) => run_extract(a),
        Command::Align(a) => run_align(a),
        Command::Closeness(a) => run_closeness(a),
        Command::Diagnose(a) => run_diagnose(a),
    }
}
