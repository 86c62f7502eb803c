//! Experiment runners behind the `whill` binary: gap comparison tables,
//! exponent sweeps, series listings, closed-gap and gap-sign reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::asymptotics::leading_gap_in;
use crate::error::{invalid, Error, Result};
use crate::gapstruct::{
    closed_gap_profile, ince_transform, numeric_gap_orientation_detailed, predicted_gap_signs,
    ClosedGapProfile, MagnusForm, Orientation, Parity,
};
use crate::potential::{
    realize_trig, regime_with_tolerance, Regime, WhittakerHillParams, BALANCE_TOLERANCE,
};
use crate::spectral::{
    default_tolerance, gap_table, gap_width, ladder_precision, EigenRequest, GapEstimate,
};
use crate::walks::{default_step_budget, evaluate_series_prec, gap_series_exact, GapSeries};

/// Bits used to evaluate the exact series.
const SERIES_PREC: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Everything a run needs. `None` selects the automatic choice: precision
/// from the ladder, tolerance matched to the precision, default step budget.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: WhittakerHillParams,
    pub n_max: u32,
    pub rel_tol: Option<f64>,
    pub precision_bits: Option<u32>,
    pub step_budget: Option<u32>,
    pub balance_tol: f64,
    pub output: OutputFormat,
    pub output_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(params: WhittakerHillParams, n_max: u32) -> Result<Self> {
        let config = Self {
            params,
            n_max,
            rel_tol: None,
            precision_bits: None,
            step_budget: None,
            balance_tol: BALANCE_TOLERANCE,
            output: OutputFormat::Csv,
            output_path: None,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(invalid("n-max", "must be at least 1"));
        }
        if let Some(tol) = self.rel_tol {
            if !(tol > 0.0 && tol < 1.0) {
                return Err(invalid("tol", format!("must lie in (0, 1), got {tol}")));
            }
        }
        if let Some(bits) = self.precision_bits {
            if bits < 53 {
                return Err(invalid(
                    "precision-bits",
                    format!("must be at least 53, got {bits}"),
                ));
            }
        }
        if !(self.balance_tol >= 0.0) {
            return Err(invalid("balance-tol", "must be non-negative"));
        }
        Ok(())
    }

    pub fn regime(&self) -> Regime {
        regime_with_tolerance(&self.params, self.balance_tol)
    }

    fn step_budget_for(&self, n: u32) -> u32 {
        self.step_budget
            .unwrap_or_else(|| default_step_budget(n))
            .max(crate::walks::min_steps(n))
    }

    /// Rough size of `gamma_n` used to pick a precision.
    fn predicted_gap(&self, n: u32) -> Option<f64> {
        if let Ok(p) = leading_gap_in(&self.params, self.regime(), n) {
            if p.value > 0.0 {
                return Some(p.value);
            }
        }
        let series = gap_series_exact(n, crate::walks::min_steps(n) + 2).ok()?;
        let v = evaluate_series_prec(&series, &self.params, 128)
            .to_f64()
            .abs();
        (v > 0.0).then_some(v)
    }

    /// Precision adequate for every gap up to `n_max`.
    pub fn precision_for(&self, n_max: u32) -> u32 {
        self.precision_bits.unwrap_or_else(|| {
            (1..=n_max)
                .map(|n| ladder_precision(n, self.predicted_gap(n)))
                .max()
                .unwrap_or(53)
        })
    }

    pub fn eigen_request(&self, count: usize, precision_bits: u32) -> Result<EigenRequest> {
        let tol = self
            .rel_tol
            .unwrap_or_else(|| default_tolerance(precision_bits));
        EigenRequest::new(count, tol, precision_bits)
    }
}

/// One line of the three-engine comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub n: u32,
    pub gamma_spectral: Option<f64>,
    pub gamma_series: Option<f64>,
    pub gamma_asymptotic: Option<f64>,
    pub ratio_series: Option<f64>,
    pub ratio_asym: Option<f64>,
    pub flags: String,
}

pub const CSV_HEADER: [&str; 7] = [
    "n",
    "gamma_spectral",
    "gamma_series",
    "gamma_asymptotic",
    "ratio_series",
    "ratio_asym",
    "flags",
];

fn closure_profile(params: &WhittakerHillParams) -> Option<ClosedGapProfile> {
    closed_gap_profile(&MagnusForm::from_params(params))
        .ok()
        .filter(|p| p.applicable)
}

/// Spectral, series and asymptotic `gamma_n` for `n = 1..=n_max`.
pub fn run_gaps(config: &RunConfig) -> Result<Vec<ComparisonRow>> {
    config.validate()?;
    let pot = realize_trig(&config.params);
    let prec = config.precision_for(config.n_max);
    let req = config.eigen_request(config.n_max as usize + 1, prec)?;
    let table = gap_table(&pot, config.n_max, &req);
    let profile = closure_profile(&config.params);
    let regime = config.regime();

    let rows = (1..=config.n_max)
        .into_par_iter()
        .map(|n| {
            let mut flags: Vec<String> = Vec::new();
            let spectral: Option<GapEstimate> = match &table {
                Ok(t) => Some(t.gaps[n as usize - 1].clone()),
                Err(e) => {
                    flags.push(format!("spectral-error: {e}"));
                    None
                }
            };
            let series = gap_series_exact(n, config.step_budget_for(n)).map(|s| {
                evaluate_series_prec(&s, &config.params, SERIES_PREC)
                    .abs()
                    .to_f64()
            });
            let series = match series {
                Ok(v) => Some(v),
                Err(e) => {
                    flags.push(format!("series-error: {e}"));
                    None
                }
            };
            let asym = match leading_gap_in(&config.params, regime, n) {
                Ok(p) => Some(p.value),
                Err(Error::NotApplicable(_)) => {
                    flags.push("asymptotics-not-applicable".into());
                    None
                }
                Err(e) => {
                    flags.push(format!("asymptotic-error: {e}"));
                    None
                }
            };
            if profile.is_some_and(|p| p.predicts_closed(n)) {
                flags.push("predicted-closed".into());
            }
            let (gamma, resolution) = match &spectral {
                Some(g) => {
                    if g.below_resolution() {
                        flags.push("below-resolution".into());
                    }
                    (Some(g.value), g.resolution)
                }
                None => (None, f64::INFINITY),
            };
            if let Ok(t) = &table {
                if !t.interlacing.holds {
                    flags.push("interlacing-violation".into());
                }
            }
            let open = spectral.as_ref().is_some_and(|g| !g.below_resolution());
            let ratio = |den: Option<f64>| match (gamma, den) {
                (Some(g), Some(d)) if open && d > resolution => Some(g / d),
                _ => None,
            };
            ComparisonRow {
                n,
                gamma_spectral: gamma,
                gamma_series: series,
                gamma_asymptotic: asym,
                ratio_series: ratio(series),
                ratio_asym: ratio(asym),
                flags: flags.join(";"),
            }
        })
        .collect();
    Ok(rows)
}

/// Least-squares line through `(log q, log gamma_n)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFit {
    pub n: u32,
    pub slope: f64,
    pub intercept: f64,
    /// root-mean-square residual of the fit
    pub residual: f64,
    pub points: Vec<(f64, f64)>,
    /// `q` values whose gap was below resolution
    pub dropped: Vec<f64>,
}

pub fn run_sweep_fit(config: &RunConfig, q_values: &[f64], n: u32) -> Result<SweepFit> {
    config.validate()?;
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    if let Some(q) = q_values.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(invalid(
            "q-values",
            format!("every q must lie in (0, 1), got {q}"),
        ));
    }
    let mut distinct = q_values.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(invalid("q-values", "need at least three distinct values"));
    }
    let gaps: Vec<(f64, GapEstimate)> = q_values
        .par_iter()
        .map(|&q| {
            let mut c = config.clone();
            c.params = config.params.with_q(q)?;
            let prec = c.precision_for(n);
            let req = c.eigen_request(n as usize + 1, prec)?;
            Ok((q, gap_width(&realize_trig(&c.params), n, &req)?))
        })
        .collect::<Result<_>>()?;
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    for (q, g) in gaps {
        if g.below_resolution() {
            dropped.push(q);
        } else {
            points.push((q, g.value));
        }
    }
    if points.len() < 2 {
        return Err(Error::NotApplicable(format!(
            "only {} of {} gaps resolved; cannot fit",
            points.len(),
            q_values.len()
        )));
    }
    let (slope, intercept, residual) = fit_line(
        &points
            .iter()
            .map(|(q, g)| (q.ln(), g.ln()))
            .collect::<Vec<_>>(),
    );
    Ok(SweepFit {
        n,
        slope,
        intercept,
        residual,
        points,
        dropped,
    })
}

/// Ordinary least squares `y = slope x + intercept`, with the RMS residual.
pub fn fit_line(xy: &[(f64, f64)]) -> (f64, f64, f64) {
    let k = xy.len() as f64;
    let mx = xy.iter().map(|p| p.0).sum::<f64>() / k;
    let my = xy.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = xy.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = xy.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xy
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    (slope, intercept, (rss / k).sqrt())
}

/// The exact series of gap `n`, one `(a,s) coefficient` line per monomial,
/// ordered by `q` exponent and then by `(a, s)`.
pub fn run_series(config: &RunConfig, n: u32) -> Result<GapSeries> {
    config.validate()?;
    gap_series_exact(n, config.step_budget_for(n))
}

pub fn render_series(series: &GapSeries, m1: f64, m2: f64) -> String {
    let mut out = String::new();
    for (m, c) in series.sorted_terms(m1, m2) {
        let _ = writeln!(out, "{m} {c}");
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesTerm {
    pub a: u32,
    pub s: u32,
    pub exponent: f64,
    pub coefficient: String,
}

pub fn series_terms(series: &GapSeries, m1: f64, m2: f64) -> Vec<SeriesTerm> {
    series
        .sorted_terms(m1, m2)
        .into_iter()
        .map(|(m, c)| SeriesTerm {
            a: m.a,
            s: m.s,
            exponent: m.exponent(m1, m2),
            coefficient: c.to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedGapRow {
    pub n: u32,
    pub predicted_closed: bool,
    pub gamma_spectral: f64,
    pub resolution: f64,
    pub below_resolution: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedGapReport {
    pub magnus: MagnusForm,
    /// `None` when `C <= 0`
    pub profile: Option<ClosedGapProfile>,
    pub m_ince: Option<f64>,
    pub rows: Vec<ClosedGapRow>,
}

impl ClosedGapReport {
    /// Every predicted closure is below resolution and every other gap of
    /// the closing parity is open.
    pub fn verified(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.predicted_closed == r.below_resolution || !self.parity_matches(r.n))
    }

    fn parity_matches(&self, n: u32) -> bool {
        match self.profile {
            Some(p) if p.applicable => match p.parity {
                Parity::Even => n % 2 == 0,
                Parity::Odd => n % 2 == 1,
            },
            _ => false,
        }
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "B = {:e}, C = {:e}", self.magnus.B, self.magnus.C);
        match (&self.profile, self.m_ince) {
            (None, _) => {
                let _ = writeln!(
                    out,
                    "closed-gap prediction not applicable (needs C > 0, i.e. c < 0)"
                );
            }
            (Some(p), m) if !p.applicable => {
                let _ = writeln!(
                    out,
                    "no closure predicted (m_ince = {:e} is neither an integer nor a half-integer multiple)",
                    m.unwrap_or(f64::NAN)
                );
            }
            (Some(p), _) => {
                let parity = match p.parity {
                    Parity::Even => "even",
                    Parity::Odd => "odd",
                };
                let closed: Vec<String> = self
                    .rows
                    .iter()
                    .filter(|r| r.predicted_closed)
                    .map(|r| r.n.to_string())
                    .collect();
                let status = if self.verified() {
                    "verified < resolution"
                } else {
                    "NOT verified"
                };
                let _ = writeln!(
                    out,
                    "{parity} gaps open: {}; gaps {} closed ({status})",
                    p.open_count,
                    closed.join(",")
                );
            }
        }
        let _ = writeln!(
            out,
            "n,predicted_closed,gamma_spectral,resolution,below_resolution"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{:e},{:e},{}",
                r.n, r.predicted_closed, r.gamma_spectral, r.resolution, r.below_resolution
            );
        }
        out
    }
}

pub fn run_closed_gaps(config: &RunConfig) -> Result<ClosedGapReport> {
    config.validate()?;
    let magnus = MagnusForm::from_params(&config.params);
    let profile = closed_gap_profile(&magnus).ok();
    let m_ince = ince_transform(&magnus).ok().map(|ip| ip.m_ince);
    let pot = realize_trig(&config.params);
    let prec = config
        .precision_bits
        .unwrap_or(256)
        .max(config.precision_for(config.n_max));
    let req = config.eigen_request(config.n_max as usize + 1, prec)?;
    let table = gap_table(&pot, config.n_max, &req)?;
    let rows = table
        .gaps
        .iter()
        .map(|g| ClosedGapRow {
            n: g.n,
            predicted_closed: profile.is_some_and(|p| p.predicts_closed(g.n)),
            gamma_spectral: g.value,
            resolution: g.resolution,
            below_resolution: g.below_resolution(),
        })
        .collect();
    Ok(ClosedGapReport {
        magnus,
        profile,
        m_ince,
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignRow {
    pub n: u32,
    pub predicted: i8,
    pub numeric: Orientation,
    pub matches: bool,
}

/// Predicted orientation of gaps `1..=n_max` against the sector eigenvalues.
pub fn run_signs(config: &RunConfig) -> Result<Vec<SignRow>> {
    config.validate()?;
    let ip = ince_transform(&MagnusForm::from_params(&config.params))?;
    let pot = realize_trig(&config.params);
    let prec = config.precision_for(config.n_max).max(128);
    let req = config.eigen_request(1, prec)?;
    (1..=config.n_max)
        .into_par_iter()
        .map(|n| {
            let (even, odd) = predicted_gap_signs(&ip, n / 2);
            let predicted = if n % 2 == 0 { even } else { odd };
            let numeric = numeric_gap_orientation_detailed(&pot, n, &req)?;
            Ok(SignRow {
                n,
                predicted,
                numeric,
                matches: predicted == numeric.by_rank,
            })
        })
        .collect()
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| format!("{v:e}")).unwrap_or_default()
}

/// CSV (fixed header, `{:e}` floats, empty cells for missing values) or a
/// JSON array of rows.
pub fn render_rows(rows: &[ComparisonRow], format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let io = |e: csv::Error| Error::Io(e.to_string());
            w.write_record(CSV_HEADER).map_err(io)?;
            for r in rows {
                w.write_record([
                    r.n.to_string(),
                    opt(r.gamma_spectral),
                    opt(r.gamma_series),
                    opt(r.gamma_asymptotic),
                    opt(r.ratio_series),
                    opt(r.ratio_asym),
                    r.flags.clone(),
                ])
                .map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
        OutputFormat::Json => to_json(&rows),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

/// Writes `rows` to `path`, or to stdout when `path` is `None`.
pub fn emit(rows: &[ComparisonRow], format: OutputFormat, path: Option<&Path>) -> Result<()> {
    write_text(&render_rows(rows, format)?, path)
}

fn write_text(text: &str, path: Option<&Path>) -> Result<()> {
    let result = match path {
        Some(p) => std::fs::write(p, text).map_err(|e| (p.display().to_string(), e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| ("stdout".to_string(), e)),
    };
    result.map_err(|(dest, e)| Error::Io(format!("cannot write {dest}: {e}")))
}

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| invalid("config", format!("line {}: expected key=value", i + 1)))?;
        map.insert(k.trim().replace('_', "-"), v.trim().to_string());
    }
    Ok(map)
}

#[derive(Debug, Parser)]
#[command(
    name = "whill",
    version,
    about = "Band gaps of the Whittaker-Hill operator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare spectral, series and asymptotic gap widths
    Gaps(Shared),
    /// Fit log(gamma_n) against log(q)
    Sweep {
        #[command(flatten)]
        shared: Shared,
        /// Gap index to fit
        #[arg(long)]
        n: u32,
        /// Comma-separated q values in (0, 1)
        #[arg(long, value_delimiter = ',', required = true)]
        q_values: Vec<f64>,
    },
    /// Print the exact walk series of one gap
    Series {
        #[command(flatten)]
        shared: Shared,
        #[arg(long)]
        n: u32,
    },
    /// Predicted closed gaps and their numeric verification
    ClosedGaps(Shared),
    /// Predicted gap orientation against sector eigenvalues
    Signs(Shared),
}

#[derive(Debug, Clone, Args)]
pub struct Shared {
    /// Coefficient of q^m1 cos 2x [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Coefficient of q^m2 cos 4x [default: 1]
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    /// Small parameter, q > 0 [default: 0.1]
    #[arg(long)]
    pub q: Option<f64>,
    /// Exponent of q in the cos 2x term [default: 1]
    #[arg(long)]
    pub m1: Option<f64>,
    /// Exponent of q in the cos 4x term [default: 2]
    #[arg(long)]
    pub m2: Option<f64>,
    /// Largest gap index [default: 8]
    #[arg(long)]
    pub n_max: Option<u32>,
    /// Relative eigenvalue tolerance (default: matched to the precision)
    #[arg(long)]
    pub tol: Option<f64>,
    /// Significand bits (default: chosen per gap size)
    #[arg(long)]
    pub precision_bits: Option<u32>,
    /// Longest walk kept in the series [default: ceil(n/2) + 6]
    #[arg(long)]
    pub step_budget: Option<u32>,
    /// Absolute tolerance on |2 m1 - m2| for the balanced regime; 0 demands equality
    #[arg(long)]
    pub balance_tol: Option<f64>,
    /// Output format [default: csv]
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Write to this file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// key=value file supplying defaults for the flags above
    #[arg(long)]
    pub config: Option<PathBuf>,
}

impl Shared {
    /// Flags first, then the config file, then built-in defaults.
    pub fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => parse_config_file(
                &std::fs::read_to_string(p)
                    .map_err(|e| invalid("config", format!("cannot read {}: {e}", p.display())))?,
            )?,
            None => BTreeMap::new(),
        };
        const KNOWN: [&str; 12] = [
            "b",
            "c",
            "q",
            "m1",
            "m2",
            "n-max",
            "tol",
            "precision-bits",
            "step-budget",
            "balance-tol",
            "format",
            "out",
        ];
        if let Some(k) = file.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(invalid("config", format!("unknown key `{k}`")));
        }
        fn pick<T: std::str::FromStr>(
            flag: Option<T>,
            file: &BTreeMap<String, String>,
            key: &'static str,
        ) -> Result<Option<T>> {
            if flag.is_some() {
                return Ok(flag);
            }
            file.get(key)
                .map(|v| {
                    v.parse::<T>()
                        .map_err(|_| invalid(key, format!("cannot parse `{v}`")))
                })
                .transpose()
        }
        let params = WhittakerHillParams::new(
            pick(self.b, &file, "b")?.unwrap_or(1.0),
            pick(self.c, &file, "c")?.unwrap_or(1.0),
            pick(self.q, &file, "q")?.unwrap_or(0.1),
            pick(self.m1, &file, "m1")?.unwrap_or(1.0),
            pick(self.m2, &file, "m2")?.unwrap_or(2.0),
        )?;
        let format = match (self.format, file.get("format")) {
            (Some(f), _) => f,
            (None, Some(v)) => OutputFormat::from_str(v, true)
                .map_err(|_| invalid("format", format!("expected csv or json, got `{v}`")))?,
            (None, None) => OutputFormat::Csv,
        };
        let config = RunConfig {
            params,
            n_max: pick(self.n_max, &file, "n-max")?.unwrap_or(8),
            rel_tol: pick(self.tol, &file, "tol")?,
            precision_bits: pick(self.precision_bits, &file, "precision-bits")?,
            step_budget: pick(self.step_budget, &file, "step-budget")?,
            balance_tol: pick(self.balance_tol, &file, "balance-tol")?.unwrap_or(BALANCE_TOLERANCE),
            output: format,
            output_path: self
                .out
                .clone()
                .or_else(|| file.get("out").map(PathBuf::from)),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Process exit status: 0 success, 1 invalid configuration, 2 I/O or engine failure.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidParameter { .. } => 1,
        _ => 2,
    }
}

/// Runs one parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gaps(shared) => {
            let config = shared.resolve()?;
            let rows = run_gaps(&config)?;
            emit(&rows, config.output, config.output_path.as_deref())
        }
        Command::Sweep {
            shared,
            n,
            q_values,
        } => {
            let config = shared.resolve()?;
            let fit = run_sweep_fit(&config, &q_values, n)?;
            let text = match config.output {
                OutputFormat::Json => to_json(&fit)?,
                OutputFormat::Csv => {
                    let mut s = String::from("q,gamma\n");
                    for (q, g) in &fit.points {
                        let _ = writeln!(s, "{q:e},{g:e}");
                    }
                    let _ = writeln!(
                        s,
                        "# slope={:e} intercept={:e} residual={:e} dropped={:?}",
                        fit.slope, fit.intercept, fit.residual, fit.dropped
                    );
                    s
                }
            };
            write_text(&text, config.output_path.as_deref())
        }
        Command::Series { shared, n } => {
            let config = shared.resolve()?;
            let series = run_series(&config, n)?;
            let (m1, m2) = (config.params.m1(), config.params.m2());
            let text = match config.output {
                OutputFormat::Json => to_json(&series_terms(&series, m1, m2))?,
                OutputFormat::Csv => render_series(&series, m1, m2),
            };
            write_text(&text, config.output_path.as_deref())
        }
        Command::ClosedGaps(shared) => {
            let config = shared.resolve()?;
            let report = run_closed_gaps(&config)?;
            let text = match config.output {
                OutputFormat::Json => to_json(&report)?,
                OutputFormat::Csv => report.render(),
            };
            write_text(&text, config.output_path.as_deref())
        }
        Command::Signs(shared) => {
            let config = shared.resolve()?;
            let rows = run_signs(&config)?;
            let text = match config.output {
                OutputFormat::Json => to_json(&rows)?,
                OutputFormat::Csv => {
                    let mut s = String::from("n,predicted,by_rank,by_edge,matches\n");
                    for r in &rows {
                        let _ = writeln!(
                            s,
                            "{},{},{},{},{}",
                            r.n, r.predicted, r.numeric.by_rank, r.numeric.by_edge, r.matches
                        );
                    }
                    s
                }
            };
            write_text(&text, config.output_path.as_deref())
        }
    }
}

/// Parses `args`, runs, reports errors on stderr and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(b: f64, c: f64, q: f64, m1: f64, m2: f64, n_max: u32) -> RunConfig {
        RunConfig::new(WhittakerHillParams::new(b, c, q, m1, m2).unwrap(), n_max).unwrap()
    }

    #[test]
    fn csv_layout() {
        assert_eq!(
            render_rows(&[], OutputFormat::Csv).unwrap(),
            "n,gamma_spectral,gamma_series,gamma_asymptotic,ratio_series,ratio_asym,flags\n"
        );
        let row = ComparisonRow {
            n: 3,
            gamma_spectral: Some(3.5e-8),
            gamma_series: None,
            gamma_asymptotic: Some(0.25),
            ratio_series: None,
            ratio_asym: Some(1.4e-7),
            flags: "a;b".into(),
        };
        let text = render_rows(std::slice::from_ref(&row), OutputFormat::Csv).unwrap();
        assert_eq!(text.lines().nth(1).unwrap(), "3,3.5e-8,,2.5e-1,,1.4e-7,a;b");
        let json: serde_json::Value =
            serde_json::from_str(&render_rows(&[row], OutputFormat::Json).unwrap()).unwrap();
        let obj = json[0].as_object().unwrap();
        assert_eq!(obj.len(), 7);
        assert!(obj["gamma_series"].is_null());
    }

    #[test]
    fn series_listing() {
        let c = config(1.0, 1.0, 0.1, 1.0, 2.0, 4);
        let lines = |n, m1, m2| render_series(&run_series(&c, n).unwrap(), m1, m2);
        let s2 = lines(2, 1.0, 2.0);
        assert!(s2.starts_with("(0,1) 1\n(2,0) 1/8\n"), "{s2}");
        assert!(lines(1, 1.0, 2.0).starts_with("(1,0) 1\n"));
        let series = run_series(&c, 3).unwrap();
        let terms = series_terms(&series, 2.0, 1.0);
        assert_eq!(
            (terms[0].a, terms[0].s, terms[0].coefficient.as_str()),
            (1, 1, "1/8")
        );
        assert!(terms.windows(2).all(|w| w[0].exponent <= w[1].exponent));
        assert!(render_series(&series, 2.0, 1.0).contains("(3,0) 1/256\n"));
    }

    #[test]
    fn zero_potential_rows() {
        let rows = run_gaps(&config(0.0, 0.0, 0.1, 1.0, 2.0, 3)).unwrap();
        for r in rows {
            assert_eq!(r.gamma_series, Some(0.0));
            assert!(r.gamma_spectral.unwrap() < 1e-10);
            assert!(r.ratio_series.is_none() && r.ratio_asym.is_none());
        }
    }

    #[test]
    fn config_file_and_flag_precedence() {
        let map = parse_config_file("# comment\nb = 2\nn_max=3\n\nq=0.05 # trailing\n").unwrap();
        assert_eq!(map["b"], "2");
        assert_eq!(map["n-max"], "3");
        assert_eq!(map["q"], "0.05");
        assert!(parse_config_file("oops").is_err());
    }

    #[test]
    fn line_fit() {
        let pts: Vec<(f64, f64)> = (1..5).map(|i| (i as f64, 3.0 * i as f64 - 1.0)).collect();
        let (s, i, r) = fit_line(&pts);
        assert!((s - 3.0).abs() < 1e-12 && (i + 1.0).abs() < 1e-12 && r < 1e-12);
    }

    #[test]
    fn sweep_validation() {
        let c = config(1.0, 1.0, 0.1, 1.0, 4.0, 3);
        assert!(run_sweep_fit(&c, &[0.1, 0.2], 1).is_err());
        assert!(run_sweep_fit(&c, &[0.1, 0.2, 1.5], 1).is_err());
        assert!(run_sweep_fit(&c, &[0.1, 0.1, 0.2], 1).is_err());
        let fit = run_sweep_fit(&c, &[0.02, 0.04, 0.08], 1).unwrap();
        assert!((fit.slope - 1.0).abs() < 0.05, "{fit:?}");
    }
}
