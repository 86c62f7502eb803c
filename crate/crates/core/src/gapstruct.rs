//! Which gaps close and which way the open ones are oriented: the Ince
//! transform of `-D^2 - (B cos 2x + C cos 4x)` for `C > 0`, and the numeric
//! orientation read off the symmetry sectors.

use rug::{Integer, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::potential::{to_magnus_form, TrigPotential, WhittakerHillParams};
use crate::spectral::{sector_spectrum, Boundary, EigenRequest};

/// Relative tolerance for detecting integer and half-integer ratios.
pub const RATIO_TOLERANCE: f64 = 1e-9;

/// `L = -D^2 - (B cos 2x + C cos 4x)`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnusForm {
    pub B: f64,
    pub C: f64,
}

impl MagnusForm {
    #[allow(non_snake_case)]
    pub fn new(B: f64, C: f64) -> Self {
        Self { B, C }
    }

    pub fn from_params(params: &WhittakerHillParams) -> Self {
        let (b, c) = to_magnus_form(params);
        Self::new(b, c)
    }

    pub fn from_potential(pot: &TrigPotential) -> Self {
        Self::new(-pot.s2, -pot.s4)
    }

    /// `r = B / (4 sqrt(2C))`.
    pub fn ratio(&self) -> Result<f64> {
        require_positive_c(self.C)?;
        Ok(self.B / (4.0 * (2.0 * self.C).sqrt()))
    }
}

fn require_positive_c(c: f64) -> Result<()> {
    if c > 0.0 {
        Ok(())
    } else {
        Err(Error::NotApplicable(format!(
            "the Ince transform needs C > 0 (c < 0 in the + convention), got C = {c}"
        )))
    }
}

/// Parameters of the Ince equation `y'' - 4q sin 2t y' + (lambda + 2q^2 + 4(m-1)q cos 2t) y = 0`
/// reached from the Whittaker-Hill equation through `f = exp(-sqrt(C/2) cos 2x) g`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InceParams {
    /// `-sqrt(C/2)`
    pub q_ince: f64,
    /// `2 q_ince^2 = C`: the Ince constant term is `lambda + C`, with `lambda = A`
    /// the Whittaker-Hill spectral parameter.
    pub lambda_shift: f64,
    /// `-B / (2 sqrt(2C))`
    pub m_ince: f64,
}

pub fn ince_transform(mf: &MagnusForm) -> Result<InceParams> {
    require_positive_c(mf.C)?;
    Ok(InceParams {
        q_ince: -(mf.C / 2.0).sqrt(),
        lambda_shift: mf.C,
        m_ince: -mf.B / (2.0 * (2.0 * mf.C).sqrt()),
    })
}

/// Two independent solutions of period `pi` or `2 pi` can coexist iff
/// `m_ince` is an integer.
pub fn coexistence_predicate(mf: &MagnusForm) -> Result<bool> {
    let m = ince_transform(mf)?.m_ince;
    Ok(near_integer(m).is_some())
}

fn near_integer(x: f64) -> Option<i64> {
    let k = x.round();
    ((x - k).abs() <= RATIO_TOLERANCE * x.abs().max(1.0)).then_some(k as i64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Parity {
    Even,
    Odd,
}

/// Gaps of `parity` are closed beyond the first `open_count` of that parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosedGapProfile {
    pub parity: Parity,
    pub open_count: u32,
    pub applicable: bool,
}

impl ClosedGapProfile {
    fn none() -> Self {
        Self {
            parity: Parity::Even,
            open_count: 0,
            applicable: false,
        }
    }

    fn from_doubled_ratio(two_r: u64) -> Self {
        if two_r % 2 == 1 {
            Self {
                parity: Parity::Even,
                open_count: ((two_r - 1) / 2) as u32,
                applicable: true,
            }
        } else {
            Self {
                parity: Parity::Odd,
                open_count: (two_r / 2) as u32,
                applicable: true,
            }
        }
    }

    /// Whether gap `n` is predicted closed.
    pub fn predicts_closed(&self, n: u32) -> bool {
        if !self.applicable || n == 0 {
            return false;
        }
        match self.parity {
            Parity::Even => n % 2 == 0 && n / 2 > self.open_count,
            Parity::Odd => n % 2 == 1 && n.div_ceil(2) > self.open_count,
        }
    }
}

/// Closure pattern from `r = B / (4 sqrt(2C))`: `|r| = k + 1/2` closes the
/// even gaps beyond the first `k`; `|r| = k` closes the odd gaps beyond the
/// first `k`. `r = 0` is the `pi/2`-periodic potential, where every odd gap
/// closes.
pub fn closed_gap_profile(mf: &MagnusForm) -> Result<ClosedGapProfile> {
    let r = mf.ratio()?.abs();
    Ok(match near_integer(2.0 * r) {
        Some(k) => ClosedGapProfile::from_doubled_ratio(k as u64),
        None => ClosedGapProfile::none(),
    })
}

/// [`closed_gap_profile`] for exact rational `B`, `C`, without tolerance:
/// `4 r^2 = B^2 / (8C)` must be the square of an integer.
#[allow(non_snake_case)]
pub fn closed_gap_profile_exact(B: &Rational, C: &Rational) -> Result<ClosedGapProfile> {
    if *C <= 0 {
        return Err(Error::NotApplicable(format!(
            "the Ince transform needs C > 0, got C = {C}"
        )));
    }
    let four_r2 = Rational::from(B.square_ref()) / (Rational::from(C * 8u32));
    if *four_r2.denom() != 1 {
        return Ok(ClosedGapProfile::none());
    }
    let numer: &Integer = four_r2.numer();
    if !numer.is_perfect_square() {
        return Ok(ClosedGapProfile::none());
    }
    let two_r = Integer::from(numer.sqrt_ref());
    Ok(ClosedGapProfile::from_doubled_ratio(
        two_r.to_u64().expect("ratio fits in u64"),
    ))
}

fn sign_of(x: f64) -> i8 {
    if x > 0.0 {
        1
    } else if x < 0.0 {
        -1
    } else {
        0
    }
}

fn product_sign(factors: impl Iterator<Item = f64>) -> i8 {
    let mut sign = 1;
    for f in factors {
        if near_integer(f) == Some(0) {
            return 0;
        }
        sign *= sign_of(f);
    }
    sign
}

/// Predicted `sign(alpha_{2n} - beta_{2n})` and `sign(alpha_{2n+1} - beta_{2n+1})`,
/// where `alpha` are even and `beta` odd eigenvalues:
/// even `sign q^2 * sign prod_{p=-n}^{n-1} (2p - m + 1)`,
/// odd `sign q * sign prod_{p=-n}^{n} (2p - m)`.
///
/// The odd product runs to `p = n`. Stopping at `n - 1` would make the
/// first odd gap always oriented like `q`, contradicting the first-order
/// splitting `alpha_1 - beta_1 = -B`; the extra factor `2n - m` also supplies
/// the closure of gap `2n + 1` at `m = 2n`.
pub fn predicted_gap_signs(ip: &InceParams, n: u32) -> (i8, i8) {
    let m = ip.m_ince;
    let n = n as i64;
    let q_sign = sign_of(ip.q_ince);
    let even = q_sign * q_sign * product_sign((-n..n).map(|p| (2 * p) as f64 - m + 1.0));
    let odd = q_sign * product_sign((-n..=n).map(|p| (2 * p) as f64 - m));
    (even, odd)
}

/// Numeric orientation of gap `n` under the two possible pairings of even
/// and odd sector eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Orientation {
    /// even-sector minus odd-sector eigenvalue paired by rank: gap `2k+1`
    /// pairs the `k`-th antiperiodic cosine and sine levels, gap `2k` the
    /// `k`-th periodic cosine level (constant mode first) with the `(k-1)`-th
    /// sine level
    pub by_rank: i8,
    /// `+1` when the upper edge of the gap is the even-sector eigenvalue and
    /// the lower edge the odd one, `-1` for the reverse, `0` for a closed gap
    /// or edges from the same sector
    pub by_edge: i8,
}

impl Orientation {
    pub fn agree(&self) -> bool {
        self.by_rank == self.by_edge
    }
}

/// Sign of (even - odd) eigenvalue at gap `n`, pairing by rank.
pub fn numeric_gap_orientation(pot: &TrigPotential, n: u32, req: &EigenRequest) -> Result<i8> {
    Ok(numeric_gap_orientation_detailed(pot, n, req)?.by_rank)
}

pub fn numeric_gap_orientation_detailed(
    pot: &TrigPotential,
    n: u32,
    req: &EigenRequest,
) -> Result<Orientation> {
    if n == 0 {
        return Err(crate::error::invalid("n", "gap index starts at 1"));
    }
    let k = (n / 2) as usize;
    let (boundary, even_rank, odd_rank) = if n % 2 == 1 {
        (Boundary::Antiperiodic, k, k)
    } else {
        (Boundary::Periodic, k, k - 1)
    };
    let (even_sector, odd_sector) = boundary.sectors();
    // merged indices n-1 and n are the gap edges; with 0-based ranks the even
    // sector needs k+1 levels and the odd one k+1, plus margin to merge safely
    let mut count = k + 3;
    loop {
        let (even, odd) = rayon::join(
            || sector_spectrum(pot, even_sector, count, req),
            || sector_spectrum(pot, odd_sector, count, req),
        );
        let (even, odd) = (even?, odd?);
        let tol = req.effective_tol();
        let diff = rug::Float::with_val(
            req.precision_bits,
            &even.values[even_rank] - &odd.values[odd_rank],
        );
        let scale = even.values[even_rank].to_f64().abs().max(1.0);
        let resolution = 2.0 * tol * scale;
        let by_rank = if diff.to_f64().abs() < resolution {
            0
        } else if diff.is_sign_positive() {
            1
        } else {
            -1
        };

        let mut merged: Vec<(&rug::Float, bool)> = even
            .values
            .iter()
            .map(|v| (v, true))
            .chain(odd.values.iter().map(|v| (v, false)))
            .collect();
        merged.sort_by(|a, b| a.0.partial_cmp(b.0).expect("finite eigenvalues"));
        let (lo_idx, hi_idx) = (n as usize - 1, n as usize);
        let top = merged[hi_idx].0;
        if even.values.last().expect("count > 0") < top
            || odd.values.last().expect("count > 0") < top
        {
            count *= 2;
            continue;
        }
        let (lo, hi) = (merged[lo_idx], merged[hi_idx]);
        let width = rug::Float::with_val(req.precision_bits, hi.0 - lo.0).to_f64();
        let by_edge = if width < resolution {
            0
        } else {
            match (hi.1, lo.1) {
                (true, false) => 1,
                (false, true) => -1,
                _ => 0,
            }
        };
        return Ok(Orientation { by_rank, by_edge });
    }
}
