//! Sturm counts from the banded `L D L^T` factorization and bisection.

use rayon::prelude::*;
use rug::{Assign, Float};

use super::matrix::{Bands, SectorMatrix};
use super::EigenRequest;
use crate::error::{Error, Result};

/// Retries with a nudged shift before a zero pivot is reported.
const MAX_SHIFT_RETRIES: u32 = 16;

/// Working-precision scalar driving the bisection.
pub(crate) trait BisectScalar: Clone + PartialOrd + Send + Sync {
    fn from_f64(x: f64, prec: u32) -> Self;
    fn midpoint(a: &Self, b: &Self) -> Self;
    /// `b - a <= tol * max(1, |mid|)`
    fn narrow(a: &Self, b: &Self, tol: f64) -> bool;
    /// Moves the shift up by one ulp at the scale `max(1, |x|)`.
    fn nudge(&self) -> Self;
    fn to_f64(&self) -> f64;
}

impl BisectScalar for f64 {
    fn from_f64(x: f64, _prec: u32) -> Self {
        x
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        a + (b - a) / 2.0
    }

    fn narrow(a: &Self, b: &Self, tol: f64) -> bool {
        b - a <= tol * <Self as BisectScalar>::midpoint(a, b).abs().max(1.0)
    }

    fn nudge(&self) -> Self {
        self + f64::EPSILON * self.abs().max(1.0)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl BisectScalar for Float {
    fn from_f64(x: f64, prec: u32) -> Self {
        Float::with_val(prec, x)
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        let mut m = Float::with_val(a.prec(), a + b);
        m /= 2u32;
        m
    }

    fn narrow(a: &Self, b: &Self, tol: f64) -> bool {
        let width = Float::with_val(a.prec(), b - a);
        let scale = Self::midpoint(a, b).abs().max(&Float::with_val(53, 1u32));
        width <= scale * tol
    }

    fn nudge(&self) -> Self {
        let prec = self.prec();
        let mut ulp = Float::with_val(prec, self.abs_ref()).max(&Float::with_val(53, 1u32));
        ulp >>= prec - 1;
        ulp + self
    }

    fn to_f64(&self) -> f64 {
        Float::to_f64(self)
    }
}

/// Number of eigenvalues strictly below a shift.
pub(crate) trait Inertia<T>: Sync {
    /// `None` when a pivot vanishes (or overflows) at this shift.
    fn negatives_below(&self, shift: &T) -> Option<usize>;
}

impl Inertia<f64> for Bands<f64> {
    fn negatives_below(&self, shift: &f64) -> Option<usize> {
        let x = *shift;
        let n = self.diag.len();
        let mut neg = 0;
        // d_{i-2}, d_{i-1} and l_{i-1,i-2}
        let (mut d2, mut d1, mut l_prev) = (0.0f64, 0.0f64, 0.0f64);
        for i in 0..n {
            let mut d = self.diag[i] - x;
            let mut l1 = 0.0;
            if i >= 1 {
                let mut w = self.off1[i - 1];
                if i >= 2 {
                    let e = self.off2[i - 2];
                    w -= e * l_prev;
                    d -= e * (e / d2);
                }
                l1 = w / d1;
                d -= w * l1;
            }
            if d == 0.0 || !d.is_finite() {
                return None;
            }
            if d < 0.0 {
                neg += 1;
            }
            d2 = d1;
            d1 = d;
            l_prev = l1;
        }
        Some(neg)
    }
}

impl Inertia<Float> for Bands<Float> {
    fn negatives_below(&self, shift: &Float) -> Option<usize> {
        let prec = shift.prec();
        let n = self.diag.len();
        let mut neg = 0;
        let mut d = Float::new(prec);
        let mut d1 = Float::new(prec);
        let mut d2 = Float::new(prec);
        let mut w = Float::new(prec);
        let mut l1 = Float::new(prec);
        let mut l_prev = Float::new(prec);
        let mut tmp = Float::new(prec);
        for i in 0..n {
            d.assign(&self.diag[i] - shift);
            l1.assign(0u32);
            if i >= 1 {
                w.assign(&self.off1[i - 1]);
                if i >= 2 {
                    let e = &self.off2[i - 2];
                    tmp.assign(e * &l_prev);
                    w -= &tmp;
                    tmp.assign(e / &d2);
                    tmp *= e;
                    d -= &tmp;
                }
                l1.assign(&w / &d1);
                tmp.assign(&w * &l1);
                d -= &tmp;
            }
            if d.is_zero() || !d.is_finite() {
                return None;
            }
            if d.is_sign_negative() {
                neg += 1;
            }
            std::mem::swap(&mut d2, &mut d1);
            std::mem::swap(&mut d1, &mut d);
            std::mem::swap(&mut l_prev, &mut l1);
        }
        Some(neg)
    }
}

fn count_at<T: BisectScalar, M: Inertia<T>>(m: &M, x: &T) -> Result<(T, usize)> {
    let mut shift = x.clone();
    for _ in 0..=MAX_SHIFT_RETRIES {
        if let Some(c) = m.negatives_below(&shift) {
            return Ok((shift, c));
        }
        shift = shift.nudge();
    }
    Err(Error::FactorizationBreakdown {
        shift: x.to_f64(),
        retries: MAX_SHIFT_RETRIES,
    })
}

#[derive(Clone)]
struct Bracket<T> {
    lo: T,
    lo_count: usize,
    hi: T,
    hi_count: usize,
}

/// The `count` smallest eigenvalues, each bisected to width
/// `tol * max(1, |lambda|)`.
pub(crate) fn lowest<T: BisectScalar, M: Inertia<T>>(
    m: &M,
    count: usize,
    dim: usize,
    enclosure: (f64, f64),
    tol: f64,
    prec: u32,
) -> Result<Vec<T>> {
    let margin = 1.0 + 1e-6 * enclosure.0.abs().max(enclosure.1.abs());
    let lo = T::from_f64(enclosure.0 - margin, prec);
    let hi = T::from_f64(enclosure.1 + margin, prec);
    let mut brackets = vec![
        Bracket {
            lo,
            lo_count: 0,
            hi,
            hi_count: dim,
        };
        count
    ];

    // Shared phase: every count tightens the brackets of all eigenvalues,
    // until each one is alone in its bracket (or already narrow enough).
    for k in 0..count {
        loop {
            let b = &brackets[k];
            if (b.lo_count == k && b.hi_count == k + 1) || T::narrow(&b.lo, &b.hi, tol) {
                break;
            }
            let mid = T::midpoint(&b.lo, &b.hi);
            if mid <= b.lo || mid >= b.hi {
                break;
            }
            let (x, c) = count_at(m, &mid)?;
            for (j, br) in brackets.iter_mut().enumerate() {
                if j < c {
                    if x < br.hi {
                        br.hi = x.clone();
                        br.hi_count = c;
                    }
                } else if x > br.lo {
                    br.lo = x.clone();
                    br.lo_count = c;
                }
            }
        }
    }

    // Independent refinement of the isolated eigenvalues.
    brackets
        .into_par_iter()
        .enumerate()
        .map(|(k, mut b)| {
            while !T::narrow(&b.lo, &b.hi, tol) {
                let mid = T::midpoint(&b.lo, &b.hi);
                if mid <= b.lo || mid >= b.hi {
                    break;
                }
                let (x, c) = count_at(m, &mid)?;
                if c > k {
                    b.hi = x;
                } else {
                    b.lo = x;
                }
            }
            Ok(T::midpoint(&b.lo, &b.hi))
        })
        .collect()
}

/// The `req.count` smallest eigenvalues of `matrix` at `req.precision_bits`
/// bits, bracketed to `rel_tol * max(1, |lambda|)`.
pub fn sturm_lowest_eigenvalues(matrix: &SectorMatrix, req: &EigenRequest) -> Result<Vec<Float>> {
    lowest_with_tol(matrix, req.count, req.effective_tol(), req.precision_bits)
}

pub(crate) fn lowest_with_tol(
    matrix: &SectorMatrix,
    count: usize,
    tol: f64,
    prec: u32,
) -> Result<Vec<Float>> {
    let dim = matrix.dim();
    if count > dim {
        return Err(crate::error::invalid(
            "count",
            format!("requested {count} eigenvalues of a {dim}x{dim} matrix"),
        ));
    }
    let enclosure = matrix.gershgorin();
    if prec <= 53 {
        let vals = lowest::<f64, _>(&matrix.bands_f64(), count, dim, enclosure, tol, 53)?;
        Ok(vals.into_iter().map(|x| Float::with_val(53, x)).collect())
    } else {
        lowest::<Float, _>(&matrix.bands_at(prec), count, dim, enclosure, tol, prec)
    }
}
