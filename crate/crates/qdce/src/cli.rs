//! Batch front end: config parsing, sweeps, checkpoint dumps, simulation
//! versus closed-form comparison, and the phase-mapping fit.
//!
//! Configuration comes from an optional file (`key = value` lines or one
//! JSON object) plus command-line flags; flags override the file. All
//! validation problems are collected and reported together, each tagged
//! with the line or flag it came from. Angles are radians only; a `deg:`
//! prefix is rejected rather than converted.
//!
//! Output is CSV (17 significant digits, lowercase scientific) or JSON
//! lines. The pipeline contains no randomness, so identical configs give
//! byte-identical output.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::Serialize;

use crate::dynamics::RamseyConvention;
use crate::error::{ConfigIssue, Error, Result};
use crate::hilbert::{fidelity_up_to_global_phase, TwoQubitDensity};
use crate::ideal::{ideal_final_state, ideal_joint_distribution, wave_state, IdealParams};
use crate::measurement::{
    branch_state, concurrence, joint_distribution, visibility, white_noise_mix, Branch,
    NoiseParams,
};
use crate::protocol::{
    cavity_vacuum_population, final_two_atom_state, fit_phase_mapping, interference_phase,
    reduce_final_state, run_protocol, ProtocolParams, CLAIMED_PHASE_OFFSET, CLAIMED_PHASE_SLOPE,
};

/// Length of the fixed internal dispersive-phase grid used to measure the
/// marginal interference visibility for each record. Sixteen points over
/// [0, 2 pi) include both extrema of the marginal curve.
pub const VISIBILITY_GRID_LEN: usize = 16;

/// Column names of the sweep table, in emission order.
pub const SWEEP_COLUMNS: [&str; 10] = [
    "alpha",
    "vartheta",
    "P00",
    "P01",
    "P10",
    "P11",
    "visibility_marginal",
    "concurrence",
    "cavity_vacuum_population",
    "branch_fidelity_vs_ideal",
];

const CHECKPOINT_COLUMNS: [&str; 8] = ["label", "index", "a1", "a2", "a3", "n", "re", "im"];
const COMPARE_COLUMNS: [&str; 5] = ["alpha", "vartheta", "phi", "fidelity", "max_deviation"];
const FIT_PHASE_COLUMNS: [&str; 5] = [
    "slope",
    "offset",
    "residual",
    "claimed_slope",
    "claimed_offset",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Sweep,
    Checkpoints,
    Compare,
    FitPhase,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Simulate => "simulate",
            Mode::Sweep => "sweep",
            Mode::Checkpoints => "checkpoints",
            Mode::Compare => "compare",
            Mode::FitPhase => "fit-phase",
        }
    }

    fn parse(text: &str) -> Option<Mode> {
        match text {
            "simulate" => Some(Mode::Simulate),
            "sweep" => Some(Mode::Sweep),
            "checkpoints" => Some(Mode::Checkpoints),
            "compare" => Some(Mode::Compare),
            "fit-phase" => Some(Mode::FitPhase),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

/// Inclusive linear grid parsed from `start:stop:count`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn points(&self) -> Vec<f64> {
        let span = self.stop - self.start;
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + span * (i as f64 / last))
            .collect()
    }
}

/// One sweep axis: a fixed value or a grid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AxisSpec {
    Scalar(f64),
    Grid(GridSpec),
}

impl AxisSpec {
    pub fn points(&self) -> Vec<f64> {
        match self {
            AxisSpec::Scalar(v) => vec![*v],
            AxisSpec::Grid(g) => g.points(),
        }
    }

    fn scalar(&self) -> f64 {
        match self {
            AxisSpec::Scalar(v) => *v,
            AxisSpec::Grid(_) => unreachable!("validation admits only scalars here"),
        }
    }

    fn grid_points(&self) -> Vec<f64> {
        match self {
            AxisSpec::Grid(g) => g.points(),
            AxisSpec::Scalar(_) => unreachable!("validation admits only grids here"),
        }
    }
}

/// Fully validated run description.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub alpha: AxisSpec,
    pub vartheta: AxisSpec,
    pub n_max: usize,
    pub epsilon: f64,
    pub convention: RamseyConvention,
    pub format: OutputFormat,
    pub out: Option<String>,
}

/// Everything needed to evaluate one parameter point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointSettings {
    pub alpha: f64,
    pub vartheta: f64,
    pub n_max: usize,
    pub epsilon: f64,
    pub convention: RamseyConvention,
}

impl PointSettings {
    fn protocol_params(&self, vartheta: f64) -> ProtocolParams {
        ProtocolParams::new(self.alpha, vartheta)
            .with_n_max(self.n_max)
            .with_convention(self.convention)
    }
}

/// One row of the sweep table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepRecord {
    pub alpha: f64,
    pub vartheta: f64,
    #[serde(rename = "P00")]
    pub p00: f64,
    #[serde(rename = "P01")]
    pub p01: f64,
    #[serde(rename = "P10")]
    pub p10: f64,
    #[serde(rename = "P11")]
    pub p11: f64,
    pub visibility_marginal: f64,
    pub concurrence: f64,
    pub cavity_vacuum_population: f64,
    pub branch_fidelity_vs_ideal: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct CheckpointRow {
    label: &'static str,
    index: usize,
    a1: usize,
    a2: usize,
    a3: usize,
    n: usize,
    re: f64,
    im: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct CompareRow {
    alpha: f64,
    vartheta: f64,
    phi: f64,
    fidelity: f64,
    max_deviation: f64,
}

#[derive(Clone, Copy, Debug, Serialize)]
struct FitPhaseRow {
    slope: f64,
    offset: f64,
    residual: f64,
    claimed_slope: f64,
    claimed_offset: f64,
}

/// Evaluate the full record at one parameter point.
pub fn evaluate_point(settings: &PointSettings) -> Result<SweepRecord> {
    let noise = NoiseParams::new(settings.epsilon)?;
    let run = run_protocol(&settings.protocol_params(settings.vartheta))?;
    let vacuum = cavity_vacuum_population(&run.final_checkpoint().state);
    let pure = reduce_final_state(&run)?;
    let mixed = white_noise_mix(&TwoQubitDensity::from_pure(&pure)?, noise)?;
    let probs = mixed.diagonal();
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidDensity {
            context: format!("emitted probabilities sum to {total}"),
        });
    }
    let conc = concurrence(&mixed)?;

    // Marginal interference curve over the fixed internal phase grid; the
    // same noise weight applies so the record is self-consistent.
    let mut curve = Vec::with_capacity(VISIBILITY_GRID_LEN);
    for k in 0..VISIBILITY_GRID_LEN {
        let vt = k as f64 * TAU / VISIBILITY_GRID_LEN as f64;
        let state = final_two_atom_state(&settings.protocol_params(vt))?;
        let dist = joint_distribution(&state)?.mix_white(settings.epsilon)?;
        curve.push(dist.system_zero_marginal());
    }
    let vis = visibility(&curve)?;

    // Pointer self-consistency: the postselected branch must coincide with
    // the closed-form wave state at its own extracted phase.
    let branch = if settings.alpha.sin().powi(2) > 1e-12 {
        Branch::Wave
    } else {
        Branch::Particle
    };
    let pointer = branch_state(&pure, branch)?;
    let phi = interference_phase(&pointer)?;
    let fid = fidelity_up_to_global_phase(&pointer, &wave_state(phi)?)?;

    Ok(SweepRecord {
        alpha: settings.alpha,
        vartheta: settings.vartheta,
        p00: probs[0],
        p01: probs[1],
        p10: probs[2],
        p11: probs[3],
        visibility_marginal: vis,
        concurrence: conc,
        cavity_vacuum_population: vacuum,
        branch_fidelity_vs_ideal: fid,
    })
}

/// 17 significant digits, lowercase scientific; round-trips exactly.
fn fmt_sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_lines(lines: Vec<String>) -> String {
    let mut out = lines.join("\n");
    out.push('\n');
    out
}

fn sweep_csv_row(r: &SweepRecord) -> String {
    [
        r.alpha,
        r.vartheta,
        r.p00,
        r.p01,
        r.p10,
        r.p11,
        r.visibility_marginal,
        r.concurrence,
        r.cavity_vacuum_population,
        r.branch_fidelity_vs_ideal,
    ]
    .iter()
    .map(|v| fmt_sci(*v))
    .collect::<Vec<_>>()
    .join(",")
}

fn render_sweep(records: &[SweepRecord], format: OutputFormat) -> Result<String> {
    let mut lines = Vec::with_capacity(records.len() + 1);
    match format {
        OutputFormat::Csv => {
            lines.push(SWEEP_COLUMNS.join(","));
            lines.extend(records.iter().map(sweep_csv_row));
        }
        OutputFormat::JsonLines => {
            for r in records {
                lines.push(serde_json::to_string(r).map_err(io_like)?);
            }
        }
    }
    Ok(render_lines(lines))
}

fn io_like(err: serde_json::Error) -> Error {
    Error::Io(std::io::Error::other(err))
}

/// Decompose a flat row-major index into per-subsystem digits.
fn decompose(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; dims.len()];
    for (slot, dim) in digits.iter_mut().zip(dims.iter()).rev() {
        *slot = index % dim;
        index /= dim;
    }
    digits
}

fn run_simulate(config: &RunConfig) -> Result<String> {
    let record = evaluate_point(&PointSettings {
        alpha: config.alpha.scalar(),
        vartheta: config.vartheta.scalar(),
        n_max: config.n_max,
        epsilon: config.epsilon,
        convention: config.convention,
    })?;
    render_sweep(&[record], config.format)
}

fn run_sweep(config: &RunConfig) -> Result<String> {
    let alphas = config.alpha.points();
    let varthetas = config.vartheta.points();
    let mut records = Vec::with_capacity(alphas.len() * varthetas.len());
    for &alpha in &alphas {
        for &vartheta in &varthetas {
            records.push(evaluate_point(&PointSettings {
                alpha,
                vartheta,
                n_max: config.n_max,
                epsilon: config.epsilon,
                convention: config.convention,
            })?);
        }
    }
    render_sweep(&records, config.format)
}

fn run_checkpoints(config: &RunConfig) -> Result<String> {
    let params = ProtocolParams::new(config.alpha.scalar(), config.vartheta.scalar())
        .with_n_max(config.n_max)
        .with_convention(config.convention);
    let run = run_protocol(&params)?;
    let mut rows = Vec::new();
    for cp in &run.checkpoints {
        for (index, amp) in cp.state.amplitudes().iter().enumerate() {
            let digits = decompose(index, cp.state.dims());
            rows.push(CheckpointRow {
                label: cp.label.as_str(),
                index,
                a1: digits[0],
                a2: digits[1],
                a3: digits[2],
                n: digits[3],
                re: amp.re,
                im: amp.im,
            });
        }
    }
    let mut lines = Vec::with_capacity(rows.len() + 1);
    match config.format {
        OutputFormat::Csv => {
            lines.push(CHECKPOINT_COLUMNS.join(","));
            for r in rows {
                lines.push(format!(
                    "{},{},{},{},{},{},{},{}",
                    r.label,
                    r.index,
                    r.a1,
                    r.a2,
                    r.a3,
                    r.n,
                    fmt_sci(r.re),
                    fmt_sci(r.im),
                ));
            }
        }
        OutputFormat::JsonLines => {
            for r in rows {
                lines.push(serde_json::to_string(&r).map_err(io_like)?);
            }
        }
    }
    Ok(render_lines(lines))
}

fn run_compare(config: &RunConfig) -> Result<String> {
    let alpha = config.alpha.scalar();
    let grid = config.vartheta.grid_points();
    let base = ProtocolParams::new(alpha, 0.0)
        .with_n_max(config.n_max)
        .with_convention(config.convention);
    let mapping = fit_phase_mapping(&base, &grid)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &vartheta in &grid {
        let phi = mapping.slope * vartheta + mapping.offset;
        let sim = final_two_atom_state(&ProtocolParams {
            vartheta,
            ..base
        })?;
        let reference = IdealParams::new(alpha, phi)?;
        let fidelity = fidelity_up_to_global_phase(&sim, &ideal_final_state(&reference)?)?;
        let max_deviation =
            joint_distribution(&sim)?.max_abs_diff(&ideal_joint_distribution(&reference)?);
        rows.push(CompareRow {
            alpha,
            vartheta,
            phi,
            fidelity,
            max_deviation,
        });
    }
    let mut lines = Vec::with_capacity(rows.len() + 1);
    match config.format {
        OutputFormat::Csv => {
            lines.push(COMPARE_COLUMNS.join(","));
            for r in rows {
                lines.push(
                    [r.alpha, r.vartheta, r.phi, r.fidelity, r.max_deviation]
                        .iter()
                        .map(|v| fmt_sci(*v))
                        .collect::<Vec<_>>()
                        .join(","),
                );
            }
        }
        OutputFormat::JsonLines => {
            for r in rows {
                lines.push(serde_json::to_string(&r).map_err(io_like)?);
            }
        }
    }
    Ok(render_lines(lines))
}

fn run_fit_phase(config: &RunConfig) -> Result<String> {
    let base = ProtocolParams::new(config.alpha.scalar(), 0.0)
        .with_n_max(config.n_max)
        .with_convention(config.convention);
    let mapping = fit_phase_mapping(&base, &config.vartheta.grid_points())?;
    let row = FitPhaseRow {
        slope: mapping.slope,
        offset: mapping.offset,
        residual: mapping.residual,
        claimed_slope: CLAIMED_PHASE_SLOPE,
        claimed_offset: CLAIMED_PHASE_OFFSET,
    };
    let lines = match config.format {
        OutputFormat::Csv => vec![
            FIT_PHASE_COLUMNS.join(","),
            [
                row.slope,
                row.offset,
                row.residual,
                row.claimed_slope,
                row.claimed_offset,
            ]
            .iter()
            .map(|v| fmt_sci(*v))
            .collect::<Vec<_>>()
            .join(","),
        ],
        OutputFormat::JsonLines => vec![serde_json::to_string(&row).map_err(io_like)?],
    };
    Ok(render_lines(lines))
}

/// Produce the full output text for a validated config.
pub fn execute(config: &RunConfig) -> Result<String> {
    match config.mode {
        Mode::Simulate => run_simulate(config),
        Mode::Sweep => run_sweep(config),
        Mode::Checkpoints => run_checkpoints(config),
        Mode::Compare => run_compare(config),
        Mode::FitPhase => run_fit_phase(config),
    }
}

// ---- configuration parsing ----

#[derive(Clone, Debug)]
struct RawEntry {
    value: String,
    source: String,
}

type RawMap = BTreeMap<String, RawEntry>;

const KNOWN_KEYS: [&str; 10] = [
    "mode",
    "alpha",
    "vartheta",
    "alpha_grid",
    "vartheta_grid",
    "n_max",
    "epsilon",
    "convention",
    "format",
    "out",
];

fn issue(source: &str, key: &str, message: impl Into<String>) -> ConfigIssue {
    ConfigIssue {
        source: source.to_string(),
        key: key.to_string(),
        message: message.into(),
    }
}

fn insert_entry(
    map: &mut RawMap,
    issues: &mut Vec<ConfigIssue>,
    source: String,
    key: &str,
    value: String,
) {
    if !KNOWN_KEYS.contains(&key) {
        issues.push(issue(
            &source,
            key,
            format!("unknown key; expected one of: {}", KNOWN_KEYS.join(", ")),
        ));
        return;
    }
    if let Some(previous) = map.get(key) {
        issues.push(issue(
            &source,
            key,
            format!("already given at {}", previous.source),
        ));
        return;
    }
    map.insert(key.to_string(), RawEntry { value, source });
}

/// Parse the config-file text into raw entries. Two shapes are accepted:
/// `key = value` lines with `#` comments, or a single JSON object whose
/// values are strings or numbers.
fn parse_file_entries(text: &str) -> (RawMap, Vec<ConfigIssue>) {
    let mut map = RawMap::new();
    let mut issues = Vec::new();
    if text.trim_start().starts_with('{') {
        match serde_json::from_str::<serde_json::Value>(text) {
            Ok(serde_json::Value::Object(fields)) => {
                for (key, value) in fields {
                    let text_value = match value {
                        serde_json::Value::String(s) => s,
                        serde_json::Value::Number(n) => n.to_string(),
                        other => {
                            issues.push(issue(
                                "json",
                                &key,
                                format!("expected a string or number, got {other}"),
                            ));
                            continue;
                        }
                    };
                    insert_entry(&mut map, &mut issues, "json".into(), &key, text_value);
                }
            }
            Ok(_) => issues.push(issue("json", "<document>", "expected a JSON object")),
            Err(e) => issues.push(issue("json", "<document>", format!("invalid JSON: {e}"))),
        }
        return (map, issues);
    }
    for (i, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        let source = format!("line {}", i + 1);
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                insert_entry(
                    &mut map,
                    &mut issues,
                    source,
                    key.trim(),
                    value.trim().to_string(),
                );
            }
            None => issues.push(issue(&source, line, "expected `key = value`")),
        }
    }
    (map, issues)
}

fn flag_key(flag: &str) -> Option<&'static str> {
    match flag {
        "--mode" => Some("mode"),
        "--alpha" => Some("alpha"),
        "--alpha-grid" => Some("alpha_grid"),
        "--vartheta" => Some("vartheta"),
        "--vartheta-grid" => Some("vartheta_grid"),
        "--n-max" => Some("n_max"),
        "--epsilon" => Some("epsilon"),
        "--convention" => Some("convention"),
        "--format" => Some("format"),
        "--out" => Some("out"),
        "--config" => Some("config"),
        _ => None,
    }
}

struct ParsedArgs {
    entries: Vec<(String, RawEntry)>,
    config_path: Option<String>,
    issues: Vec<ConfigIssue>,
}

/// Split the argument list into raw config entries. The first argument may
/// be a bare mode name; everything else is `--flag value` or `--flag=value`.
fn parse_args(args: &[String]) -> ParsedArgs {
    let mut entries: Vec<(String, RawEntry)> = Vec::new();
    let mut config_path = None;
    let mut issues = Vec::new();
    let mut start = 0;
    if let Some(first) = args.first() {
        if !first.starts_with("--") {
            entries.push((
                "mode".into(),
                RawEntry {
                    value: first.clone(),
                    source: "argument 1".into(),
                },
            ));
            start = 1;
        }
    }
    let mut i = start;
    while i < args.len() {
        let arg = &args[i];
        if !arg.starts_with("--") {
            issues.push(issue(
                &format!("argument {}", i + 1),
                arg,
                "unexpected positional argument",
            ));
            i += 1;
            continue;
        }
        let (flag, inline) = match arg.split_once('=') {
            Some((f, v)) => (f.to_string(), Some(v.to_string())),
            None => (arg.clone(), None),
        };
        let source = format!("flag {flag}");
        let Some(key) = flag_key(&flag) else {
            issues.push(issue(&source, &flag, "unknown flag"));
            i += 1;
            continue;
        };
        let value = match inline {
            Some(v) => v,
            None => {
                i += 1;
                match args.get(i) {
                    Some(v) => v.clone(),
                    None => {
                        issues.push(issue(&source, &flag, "missing value"));
                        break;
                    }
                }
            }
        };
        if key == "config" {
            if config_path.is_some() {
                issues.push(issue(&source, &flag, "given more than once"));
            } else {
                config_path = Some(value);
            }
        } else if entries.iter().any(|(k, _)| k == key) {
            issues.push(issue(&source, &flag, "given more than once"));
        } else {
            entries.push((key.to_string(), RawEntry { value, source }));
        }
        i += 1;
    }
    ParsedArgs {
        entries,
        config_path,
        issues,
    }
}

fn check_degrees(entry: &RawEntry, key: &str, issues: &mut Vec<ConfigIssue>) -> bool {
    if entry.value.starts_with("deg:") {
        issues.push(issue(
            &entry.source,
            key,
            "degrees are not accepted; give the angle in radians",
        ));
        return true;
    }
    false
}

fn parse_angle(map: &RawMap, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<f64> {
    let entry = map.get(key)?;
    if check_degrees(entry, key, issues) {
        return None;
    }
    match entry.value.parse::<f64>() {
        Ok(v) if v.is_finite() => Some(v),
        Ok(v) => {
            issues.push(issue(&entry.source, key, format!("{v} is not finite")));
            None
        }
        Err(_) => {
            issues.push(issue(
                &entry.source,
                key,
                format!("expected a number in radians, got `{}`", entry.value),
            ));
            None
        }
    }
}

fn parse_grid(map: &RawMap, key: &str, issues: &mut Vec<ConfigIssue>) -> Option<GridSpec> {
    let entry = map.get(key)?;
    let parts: Vec<&str> = entry.value.split(':').collect();
    if parts.len() != 3 {
        issues.push(issue(
            &entry.source,
            key,
            format!("expected `start:stop:count`, got `{}`", entry.value),
        ));
        return None;
    }
    let mut endpoint = |text: &str, which: &str| -> Option<f64> {
        if text.starts_with("deg:") {
            issues.push(issue(
                &entry.source,
                key,
                format!("degrees are not accepted in the {which} endpoint; give radians"),
            ));
            return None;
        }
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Some(v),
            _ => {
                issues.push(issue(
                    &entry.source,
                    key,
                    format!("{which} endpoint `{text}` is not a finite number"),
                ));
                None
            }
        }
    };
    let start = endpoint(parts[0], "start");
    let stop = endpoint(parts[1], "stop");
    let count = match parts[2].parse::<usize>() {
        Ok(c) => Some(c),
        Err(_) => {
            issues.push(issue(
                &entry.source,
                key,
                format!("count `{}` is not a whole number", parts[2]),
            ));
            None
        }
    };
    let (start, stop, count) = (start?, stop?, count?);
    if count < 2 {
        issues.push(issue(&entry.source, key, "grid needs count >= 2"));
        return None;
    }
    if start >= stop {
        issues.push(issue(
            &entry.source,
            key,
            format!("grid needs start < stop, got {start} >= {stop}"),
        ));
        return None;
    }
    Some(GridSpec { start, stop, count })
}

fn require(
    map: &RawMap,
    key: &str,
    mode: Mode,
    issues: &mut Vec<ConfigIssue>,
) {
    if !map.contains_key(key) {
        issues.push(issue(
            "config",
            key,
            format!("required by mode {}", mode.as_str()),
        ));
    }
}

fn forbid(map: &RawMap, key: &str, mode: Mode, issues: &mut Vec<ConfigIssue>) {
    if let Some(entry) = map.get(key) {
        issues.push(issue(
            &entry.source,
            key,
            format!("not used by mode {}", mode.as_str()),
        ));
    }
}

/// Validate raw entries into a RunConfig, collecting every problem.
fn resolve_config(map: &RawMap, mut issues: Vec<ConfigIssue>) -> Result<RunConfig> {
    let mode = match map.get("mode") {
        Some(entry) => match Mode::parse(&entry.value) {
            Some(m) => Some(m),
            None => {
                issues.push(issue(
                    &entry.source,
                    "mode",
                    format!(
                        "unknown mode `{}`; expected simulate, sweep, checkpoints, compare, or fit-phase",
                        entry.value
                    ),
                ));
                None
            }
        },
        None => {
            issues.push(issue("config", "mode", "required"));
            None
        }
    };

    let alpha = parse_angle(map, "alpha", &mut issues);
    let vartheta = parse_angle(map, "vartheta", &mut issues);
    let alpha_grid = parse_grid(map, "alpha_grid", &mut issues);
    let vartheta_grid = parse_grid(map, "vartheta_grid", &mut issues);

    let n_max = match map.get("n_max") {
        Some(entry) => match entry.value.parse::<usize>() {
            Ok(n) if n >= 1 => n,
            Ok(n) => {
                issues.push(issue(
                    &entry.source,
                    "n_max",
                    format!("needs at least one photon level, got {n}"),
                ));
                2
            }
            Err(_) => {
                issues.push(issue(
                    &entry.source,
                    "n_max",
                    format!("expected a whole number, got `{}`", entry.value),
                ));
                2
            }
        },
        None => 2,
    };

    let epsilon = match map.get("epsilon") {
        Some(entry) => match entry.value.parse::<f64>() {
            Ok(e) if (0.0..=1.0).contains(&e) => e,
            Ok(e) => {
                issues.push(issue(
                    &entry.source,
                    "epsilon",
                    format!("noise weight {e} outside [0, 1]"),
                ));
                0.0
            }
            Err(_) => {
                issues.push(issue(
                    &entry.source,
                    "epsilon",
                    format!("expected a number, got `{}`", entry.value),
                ));
                0.0
            }
        },
        None => 0.0,
    };

    let convention = match map.get("convention") {
        Some(entry) => match entry.value.parse::<RamseyConvention>() {
            Ok(c) => c,
            Err(message) => {
                issues.push(issue(&entry.source, "convention", message));
                RamseyConvention::Hamiltonian
            }
        },
        None => RamseyConvention::Hamiltonian,
    };

    let format = match map.get("format") {
        Some(entry) => match entry.value.as_str() {
            "csv" => OutputFormat::Csv,
            "json-lines" => OutputFormat::JsonLines,
            other => {
                issues.push(issue(
                    &entry.source,
                    "format",
                    format!("unknown format `{other}`; expected csv or json-lines"),
                ));
                OutputFormat::Csv
            }
        },
        None => OutputFormat::Csv,
    };

    let out = match map.get("out") {
        Some(entry) if entry.value.is_empty() => {
            issues.push(issue(&entry.source, "out", "output path is empty"));
            None
        }
        Some(entry) => Some(entry.value.clone()),
        None => None,
    };

    // Per-mode field discipline: exactly the fields the mode uses.
    if let Some(mode) = mode {
        match mode {
            Mode::Simulate | Mode::Checkpoints => {
                require(map, "alpha", mode, &mut issues);
                require(map, "vartheta", mode, &mut issues);
                forbid(map, "alpha_grid", mode, &mut issues);
                forbid(map, "vartheta_grid", mode, &mut issues);
                if mode == Mode::Checkpoints {
                    forbid(map, "epsilon", mode, &mut issues);
                }
            }
            Mode::Sweep => {
                let has_alpha = map.contains_key("alpha");
                let has_alpha_grid = map.contains_key("alpha_grid");
                let has_vartheta = map.contains_key("vartheta");
                let has_vartheta_grid = map.contains_key("vartheta_grid");
                if has_alpha && has_alpha_grid {
                    issues.push(issue(
                        "config",
                        "alpha",
                        "alpha and alpha_grid are mutually exclusive",
                    ));
                }
                if !has_alpha && !has_alpha_grid {
                    issues.push(issue("config", "alpha", "sweep needs alpha or alpha_grid"));
                }
                if has_vartheta && has_vartheta_grid {
                    issues.push(issue(
                        "config",
                        "vartheta",
                        "vartheta and vartheta_grid are mutually exclusive",
                    ));
                }
                if !has_vartheta && !has_vartheta_grid {
                    issues.push(issue(
                        "config",
                        "vartheta",
                        "sweep needs vartheta or vartheta_grid",
                    ));
                }
                if (has_alpha || has_alpha_grid)
                    && (has_vartheta || has_vartheta_grid)
                    && !has_alpha_grid
                    && !has_vartheta_grid
                {
                    issues.push(issue(
                        "config",
                        "mode",
                        "sweep needs at least one grid; use simulate for a single point",
                    ));
                }
            }
            Mode::Compare | Mode::FitPhase => {
                require(map, "alpha", mode, &mut issues);
                require(map, "vartheta_grid", mode, &mut issues);
                forbid(map, "alpha_grid", mode, &mut issues);
                forbid(map, "vartheta", mode, &mut issues);
                forbid(map, "epsilon", mode, &mut issues);
            }
        }
    }

    if !issues.is_empty() {
        return Err(Error::Config(issues));
    }
    let mode = mode.expect("mode issues already reported");

    let alpha_axis = match mode {
        Mode::Simulate | Mode::Checkpoints | Mode::Compare | Mode::FitPhase => {
            AxisSpec::Scalar(alpha.expect("presence validated"))
        }
        Mode::Sweep => match alpha_grid {
            Some(g) => AxisSpec::Grid(g),
            None => AxisSpec::Scalar(alpha.expect("presence validated")),
        },
    };
    let vartheta_axis = match mode {
        Mode::Simulate | Mode::Checkpoints => AxisSpec::Scalar(vartheta.expect("presence validated")),
        Mode::Compare | Mode::FitPhase => AxisSpec::Grid(vartheta_grid.expect("presence validated")),
        Mode::Sweep => match vartheta_grid {
            Some(g) => AxisSpec::Grid(g),
            None => AxisSpec::Scalar(vartheta.expect("presence validated")),
        },
    };

    Ok(RunConfig {
        mode,
        alpha: alpha_axis,
        vartheta: vartheta_axis,
        n_max,
        epsilon,
        convention,
        format,
        out,
    })
}

/// Parse a config-file text on its own (no flags).
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let (map, issues) = parse_file_entries(text);
    resolve_config(&map, issues)
}

/// Parse command-line arguments plus the optional `--config` file into a
/// validated RunConfig. Flags override file values.
pub fn config_from_args(args: &[String]) -> Result<RunConfig> {
    let parsed = parse_args(args);
    let mut issues = parsed.issues;
    let mut map = match &parsed.config_path {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let (map, file_issues) = parse_file_entries(&text);
            issues.extend(file_issues);
            map
        }
        None => RawMap::new(),
    };
    for (key, entry) in parsed.entries {
        // Flags override the file silently; that is the documented contract.
        map.insert(key, entry);
    }
    resolve_config(&map, issues)
}

/// Full pipeline: parse, execute, write to the chosen sink.
pub fn run_cli(args: &[String]) -> Result<()> {
    let config = config_from_args(args)?;
    let output = execute(&config)?;
    match &config.out {
        Some(path) => std::fs::write(path, output)?,
        None => print!("{output}"),
    }
    Ok(())
}

/// Entry point used by the binary: errors become a one-line JSON record on
/// stderr plus the matching exit status.
pub fn main_entry(args: &[String]) -> i32 {
    match run_cli(args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json_record());
            e.exit_code()
        }
    }
}
