use rug::Float;
use serde::Serialize;

use super::matrix::{build_sector_matrix, Boundary, SymmetrySector};
use super::sturm::lowest_with_tol;
use super::EigenRequest;
use crate::error::{invalid, Error, Result};
use crate::potential::TrigPotential;

/// Default cap on truncation doublings.
pub const MAX_DOUBLINGS: u32 = 12;

/// Lowest eigenvalues that survived the truncation-doubling test.
#[derive(Debug, Clone)]
pub struct ConvergedSpectrum {
    pub values: Vec<Float>,
    pub truncation_dim: usize,
}

/// The `count` lowest eigenvalues of one sector, truncation doubled from
/// `count + 16` until no value moves by `rel_tol * max(1, |lambda|)`.
pub fn sector_spectrum(
    pot: &TrigPotential,
    sector: SymmetrySector,
    count: usize,
    req: &EigenRequest,
) -> Result<ConvergedSpectrum> {
    if count == 0 {
        return Err(invalid("count", "must be positive"));
    }
    let tol = req.effective_tol();
    let prec = req.precision_bits;
    let mut dim = count + 16;
    let mut previous: Option<Vec<Float>> = None;
    let mut worst = f64::INFINITY;
    for _ in 0..=req.max_doublings {
        let m = build_sector_matrix(pot, sector, dim)?;
        // bisect well below the convergence threshold so that bracket noise
        // cannot masquerade as truncation drift
        let values = lowest_with_tol(&m, count, tol / 8.0, prec)?;
        if let Some(prev) = &previous {
            worst = max_relative_change(prev, &values);
            if worst < tol {
                return Ok(ConvergedSpectrum {
                    values,
                    truncation_dim: dim,
                });
            }
        }
        previous = Some(values);
        dim *= 2;
    }
    Err(Error::NoConvergence {
        doublings: req.max_doublings,
        dim: dim / 2,
        worst_change: worst,
    })
}

fn max_relative_change(a: &[Float], b: &[Float]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = Float::with_val(y.prec(), x - y).abs().to_f64();
            d / y.to_f64().abs().max(1.0)
        })
        .fold(0.0, f64::max)
}

/// Merged even/odd spectrum of one boundary class: `lambda_0^+ <= lambda_1^+ <= ...`
/// for periodic, `lambda_1^- <= lambda_2^- <= ...` for antiperiodic.
pub fn boundary_spectrum(
    pot: &TrigPotential,
    boundary: Boundary,
    count: usize,
    req: &EigenRequest,
) -> Result<Vec<Float>> {
    Ok(boundary_spectrum_detailed(pot, boundary, count, req)?.values)
}

pub fn boundary_spectrum_detailed(
    pot: &TrigPotential,
    boundary: Boundary,
    count: usize,
    req: &EigenRequest,
) -> Result<ConvergedSpectrum> {
    if count == 0 {
        return Err(invalid("count", "must be positive"));
    }
    let (even, odd) = boundary.sectors();
    let mut per_sector = [count.div_ceil(2) + 1; 2];
    loop {
        let (e, o) = rayon::join(
            || sector_spectrum(pot, even, per_sector[0], req),
            || sector_spectrum(pot, odd, per_sector[1], req),
        );
        let (e, o) = (e?, o?);
        let mut merged: Vec<Float> = e.values.iter().chain(&o.values).cloned().collect();
        merged.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        merged.truncate(count);
        // a sector whose largest computed value lies below the last merged
        // value may hide smaller uncomputed eigenvalues
        let top = merged.last().expect("count >= 1").clone();
        let mut retry = false;
        for (k, s) in [&e, &o].into_iter().enumerate() {
            if s.values.last().is_some_and(|last| *last < top) {
                per_sector[k] *= 2;
                retry = true;
            }
        }
        if !retry {
            return Ok(ConvergedSpectrum {
                values: merged,
                truncation_dim: e.truncation_dim.max(o.truncation_dim),
            });
        }
    }
}

/// Engine that produced a gap value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GapMethod {
    Spectral,
    Series,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorBudget {
    pub truncation_dim: usize,
    pub precision_bits: u32,
    pub residual_tol: f64,
}

/// Width of gap `n`. A width below `resolution` is only known to lie in
/// `[0, resolution]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapEstimate {
    pub n: u32,
    pub value: f64,
    pub method: GapMethod,
    pub error_budget: ErrorBudget,
    pub resolution: f64,
}

impl GapEstimate {
    pub fn below_resolution(&self) -> bool {
        self.value < self.resolution
    }

    /// Interval known to contain the width.
    pub fn interval(&self) -> (f64, f64) {
        if self.below_resolution() {
            (0.0, self.resolution)
        } else {
            (
                (self.value - self.resolution).max(0.0),
                self.value + self.resolution,
            )
        }
    }
}

fn spectral_gap(lo: &Float, hi: &Float, n: u32, dim: usize, req: &EigenRequest) -> GapEstimate {
    let tol = req.effective_tol();
    let diff = Float::with_val(hi.prec().max(lo.prec()), hi - lo).to_f64();
    let scale = hi.to_f64().abs().max(1.0);
    GapEstimate {
        n,
        // the merged list is sorted, so only rounding can push this below zero
        value: diff.max(0.0),
        method: GapMethod::Spectral,
        error_budget: ErrorBudget {
            truncation_dim: dim,
            precision_bits: req.precision_bits,
            residual_tol: tol,
        },
        resolution: 2.0 * tol * scale,
    }
}

/// Band edges of gap `n` in a boundary spectrum: indices into the
/// antiperiodic list (`lambda_1^-` first) for odd `n`, into the periodic list
/// (`lambda_0^+` first) for even `n`.
fn edge_indices(n: u32) -> (Boundary, usize, usize) {
    let n = n as usize;
    if n % 2 == 1 {
        (Boundary::Antiperiodic, n - 1, n)
    } else {
        (Boundary::Periodic, n - 1, n)
    }
}

/// `gamma_n`: `lambda_{n+1}^- - lambda_n^-` for odd `n`, `lambda_n^+ - lambda_{n-1}^+` for even `n`.
pub fn gap_width(pot: &TrigPotential, n: u32, req: &EigenRequest) -> Result<GapEstimate> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    let (boundary, lo, hi) = edge_indices(n);
    let spec = boundary_spectrum_detailed(pot, boundary, hi + 1, req)?;
    Ok(spectral_gap(
        &spec.values[lo],
        &spec.values[hi],
        n,
        spec.truncation_dim,
        req,
    ))
}

/// Outcome of checking `lambda_0^+ < lambda_1^- <= lambda_2^- <= lambda_1^+ <= lambda_2^+ < ...`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Interlacing {
    pub holds: bool,
    /// `(label of the left edge, label of the right edge, amount by which the right one is smaller)`
    pub violations: Vec<(String, String, f64)>,
}

/// Gaps `1..=n_max` from one periodic and one antiperiodic spectrum.
#[derive(Debug, Clone)]
pub struct GapTable {
    pub gaps: Vec<GapEstimate>,
    pub interlacing: Interlacing,
    pub periodic: Vec<Float>,
    pub antiperiodic: Vec<Float>,
}

pub fn gap_table(pot: &TrigPotential, n_max: u32, req: &EigenRequest) -> Result<GapTable> {
    if n_max == 0 {
        return Err(invalid("n_max", "must be positive"));
    }
    let count = n_max as usize + 1;
    let (per, anti) = rayon::join(
        || boundary_spectrum_detailed(pot, Boundary::Periodic, count, req),
        || boundary_spectrum_detailed(pot, Boundary::Antiperiodic, count, req),
    );
    let (per, anti) = (per?, anti?);
    let gaps = (1..=n_max)
        .map(|n| {
            let (boundary, lo, hi) = edge_indices(n);
            let spec = match boundary {
                Boundary::Periodic => &per,
                Boundary::Antiperiodic => &anti,
            };
            spectral_gap(
                &spec.values[lo],
                &spec.values[hi],
                n,
                spec.truncation_dim,
                req,
            )
        })
        .collect();
    let interlacing = check_interlacing(&per.values, &anti.values, req.effective_tol());
    Ok(GapTable {
        gaps,
        interlacing,
        periodic: per.values,
        antiperiodic: anti.values,
    })
}

fn check_interlacing(per: &[Float], anti: &[Float], tol: f64) -> Interlacing {
    let mut chain: Vec<(String, &Float)> = Vec::new();
    if let Some(p0) = per.first() {
        chain.push(("lambda_0^+".into(), p0));
    }
    // lambda_{2k+1}^-, lambda_{2k+2}^-, lambda_{2k+1}^+, lambda_{2k+2}^+
    'outer: for k in 0.. {
        let quad = [
            (anti.get(2 * k), format!("lambda_{}^-", 2 * k + 1)),
            (anti.get(2 * k + 1), format!("lambda_{}^-", 2 * k + 2)),
            (per.get(2 * k + 1), format!("lambda_{}^+", 2 * k + 1)),
            (per.get(2 * k + 2), format!("lambda_{}^+", 2 * k + 2)),
        ];
        for (v, label) in quad {
            match v {
                Some(v) => chain.push((label, v)),
                None => break 'outer,
            }
        }
    }
    let mut violations = Vec::new();
    for pair in chain.windows(2) {
        let (a, b) = (pair[0].1, pair[1].1);
        let drop = Float::with_val(a.prec(), a - b).to_f64();
        let allowed = 2.0 * tol * b.to_f64().abs().max(1.0);
        if drop > allowed {
            violations.push((pair[0].0.clone(), pair[1].0.clone(), drop));
        }
    }
    Interlacing {
        holds: violations.is_empty(),
        violations,
    }
}

/// Working precision for resolving gap `n` given a predicted width:
/// 53 bits up to `n = 3`, otherwise `max(64, ceil(1.5 |log2(gamma / lambda_n)|) + 32)`
/// with `lambda_n ~ n^2`. Without a usable prediction, 256 bits.
pub fn ladder_precision(n: u32, predicted_gap: Option<f64>) -> u32 {
    if n <= 3 {
        return 53;
    }
    let lambda = (n as f64).powi(2);
    match predicted_gap.filter(|g| g.is_finite() && *g > 0.0) {
        Some(g) => {
            let bits = (1.5 * (g / lambda).log2().abs()).ceil() as u32 + 32;
            bits.max(64)
        }
        None => 256,
    }
}
