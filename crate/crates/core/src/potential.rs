//! Parameterization of the Whittaker-Hill potential
//!
//! `v(x) = b q^m1 cos 2x + c q^m2 cos 4x`, its Fourier coefficients, norm and
//! regime classification. The canonical sign convention is the "+" form above;
//! the "-" (Magnus) form `-(B cos 2x + C cos 4x)` is only reached through
//! [`to_magnus_form`].

use rug::ops::Pow;
use rug::Float;

use crate::error::{invalid, Result};

/// Default absolute tolerance on `|2 m1 - m2|` for the balanced regime.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

/// The five real parameters `(b, c, q, m1, m2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WhittakerHillParams {
    b: f64,
    c: f64,
    q: f64,
    m1: f64,
    m2: f64,
}

impl WhittakerHillParams {
    pub fn new(b: f64, c: f64, q: f64, m1: f64, m2: f64) -> Result<Self> {
        if !b.is_finite() {
            return Err(invalid("b", "must be finite"));
        }
        if !c.is_finite() {
            return Err(invalid("c", "must be finite"));
        }
        for (name, value) in [("q", q), ("m1", m1), ("m2", m2)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(
                    name,
                    format!("must be a finite positive real, got {value}"),
                ));
            }
        }
        Ok(Self { b, c, q, m1, m2 })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m1(&self) -> f64 {
        self.m1
    }

    pub fn m2(&self) -> f64 {
        self.m2
    }

    /// `c = 0` reduces the operator to Mathieu's.
    pub fn is_mathieu_degenerate(&self) -> bool {
        self.c == 0.0
    }

    pub fn with_b(&self, b: f64) -> Result<Self> {
        Self::new(b, self.c, self.q, self.m1, self.m2)
    }

    pub fn with_q(&self, q: f64) -> Result<Self> {
        Self::new(self.b, self.c, q, self.m1, self.m2)
    }

    /// `(q, m1, m2) -> (q^t, m1/t, m2/t)`, which leaves the potential unchanged.
    pub fn rescaled(&self, t: f64) -> Result<Self> {
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid("t", "rescaling exponent must be positive"));
        }
        Self::new(self.b, self.c, self.q.powf(t), self.m1 / t, self.m2 / t)
    }

    /// `q^m1` and `q^m2` at `prec` bits.
    fn powers(&self, prec: u32) -> (Float, Float) {
        let q = Float::with_val(prec, self.q);
        let p1 = Float::with_val(prec, (&q).pow(&Float::with_val(prec, self.m1)));
        let p2 = Float::with_val(prec, (&q).pow(&Float::with_val(prec, self.m2)));
        (p1, p2)
    }
}

/// `v(x) = s2 cos 2x + s4 cos 4x`.
///
/// When built by [`realize_trig`] the potential remembers its parameters so
/// that extended-precision consumers can re-evaluate `b q^m1` and `c q^m2` at
/// their working precision instead of inheriting the double rounding.
#[derive(Debug, Clone, Copy)]
pub struct TrigPotential {
    pub s2: f64,
    pub s4: f64,
    source: Option<WhittakerHillParams>,
}

impl PartialEq for TrigPotential {
    fn eq(&self, other: &Self) -> bool {
        self.s2 == other.s2 && self.s4 == other.s4
    }
}

impl TrigPotential {
    pub fn new(s2: f64, s4: f64) -> Self {
        Self {
            s2,
            s4,
            source: None,
        }
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0)
    }

    pub fn source(&self) -> Option<&WhittakerHillParams> {
        self.source.as_ref()
    }

    /// `(s2, s4)` evaluated at `prec` bits.
    pub fn coefficients_at(&self, prec: u32) -> (Float, Float) {
        match &self.source {
            Some(p) if prec > 53 => {
                let (p1, p2) = p.powers(prec);
                (p1 * p.b, p2 * p.c)
            }
            _ => (
                Float::with_val(prec, self.s2),
                Float::with_val(prec, self.s4),
            ),
        }
    }

    /// The same potential translated by `pi/2`, i.e. `s2 -> -s2`.
    pub fn shifted_half_period(&self) -> Self {
        Self {
            s2: -self.s2,
            s4: self.s4,
            source: self.source.and_then(|p| p.with_b(-p.b).ok()),
        }
    }
}

/// Nonzero Fourier coefficients `V(+-2)`, `V(+-4)` of `v(x) = sum V(j) e^{ijx}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierCoefficients {
    v2: f64,
    v4: f64,
}

impl FourierCoefficients {
    pub fn new(v2: f64, v4: f64) -> Self {
        Self { v2, v4 }
    }

    /// `V(index)`; zero outside `{+-2, +-4}`.
    pub fn get(&self, index: i64) -> f64 {
        match index.abs() {
            2 => self.v2,
            4 => self.v4,
            _ => 0.0,
        }
    }

    pub fn support(&self) -> [i64; 4] {
        [-4, -2, 2, 4]
    }

    /// `sum_j |V(j)|^2`.
    pub fn norm_squared(&self) -> f64 {
        2.0 * (self.v2 * self.v2 + self.v4 * self.v4)
    }
}

/// Which family of walks carries the leading behaviour of the gaps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `m1 > m2 / 2`: steps of length 4 are cheaper.
    FourStepDominant,
    /// `m1 < m2 / 2`: steps of length 2 are cheaper.
    TwoStepDominant,
    /// `m1 = m2 / 2`. Closed-form asymptotics need `c < 0`.
    Balanced { asymptotics_available: bool },
}

pub fn realize_trig(params: &WhittakerHillParams) -> TrigPotential {
    TrigPotential {
        s2: params.b * params.q.powf(params.m1),
        s4: params.c * params.q.powf(params.m2),
        source: Some(*params),
    }
}

pub fn fourier_coefficients(pot: &TrigPotential) -> FourierCoefficients {
    FourierCoefficients::new(pot.s2 / 2.0, pot.s4 / 2.0)
}

/// `||v|| = sqrt((s2^2 + s4^2) / 2)`.
pub fn potential_norm(params: &WhittakerHillParams) -> f64 {
    let pot = realize_trig(params);
    ((pot.s2 * pot.s2 + pot.s4 * pot.s4) / 2.0).sqrt()
}

pub fn regime(params: &WhittakerHillParams) -> Regime {
    regime_with_tolerance(params, BALANCE_TOLERANCE)
}

/// Regime classification with an explicit balance tolerance; `0.0` demands
/// exact equality `2 m1 == m2`.
pub fn regime_with_tolerance(params: &WhittakerHillParams, tol: f64) -> Regime {
    let excess = 2.0 * params.m1 - params.m2;
    if excess.abs() <= tol {
        Regime::Balanced {
            asymptotics_available: params.c < 0.0,
        }
    } else if excess > 0.0 {
        Regime::FourStepDominant
    } else {
        Regime::TwoStepDominant
    }
}

/// `(B, C)` such that the operator reads `-D^2 - (B cos 2x + C cos 4x)`.
pub fn to_magnus_form(params: &WhittakerHillParams) -> (f64, f64) {
    let pot = realize_trig(params);
    (-pot.s2, -pot.s4)
}
