//! Closed-form leading behaviour of the gaps.
//!
//! Small-`q` leading terms are kept as exact polynomials in `b` and `c`
//! (one [`Monomial`] per `b^a c^s q^(a m1 + s m2)`), so they can be compared
//! with the walk expansion without rounding. Large-`n` formulas involve
//! `pi` and trigonometric factors and are evaluated in floating point.

use std::collections::BTreeMap;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::potential::{regime, Regime, WhittakerHillParams};
use crate::walks::Monomial;

/// Bits used when evaluating leading terms.
const EVAL_PREC: u32 = 192;

/// Which formula produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// small-`q` leading terms, three regimes
    SmallQ,
    /// large-`n` formula for `m2 = 2 m1`, `c < 0`
    LargeN,
    /// the family `-(4 alpha t cos 2x + 2 alpha^2 cos 4x)`, small `alpha`
    SpecialSmallAlpha,
    /// the same family, large `n`
    SpecialLargeN,
    /// Mathieu, small `B`
    MathieuSmallB,
    /// Mathieu, large `n`
    MathieuLargeN,
}

/// Size of the neglected part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Remainder {
    /// `O(x^e)` in the small parameter (`q`, `alpha` or `B`).
    Absolute(f64),
    /// relative `O(log m / m)`
    LogMOverM,
    /// relative `O(1 / n^2)`
    InverseNSquared,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymptoticPrediction {
    pub n: u32,
    /// Magnitude of the leading term.
    pub value: f64,
    pub error_exponent: Remainder,
    pub source: Source,
}

/// Leading term as `sum coeff b^a c^s q^(a m1 + s m2)` before taking `|.|`.
pub type LeadingPolynomial = BTreeMap<Monomial, Rational>;

/// `k!!` with `0!! = 1`.
pub fn double_factorial(k: u32) -> Integer {
    Integer::from(Integer::factorial_2(k))
}

/// `(-1)!! = 1` as well, for formulas that reach it at their lowest index.
fn double_factorial_signed(k: i64) -> Integer {
    if k <= 0 {
        Integer::from(1)
    } else {
        double_factorial(k as u32)
    }
}

fn factorial(k: u32) -> Integer {
    Integer::from(Integer::factorial(k))
}

fn pow2(e: u32) -> Integer {
    Integer::from(1) << e
}

fn rat(num: Integer, den: Integer) -> Rational {
    Rational::from((num, den))
}

/// Exact leading polynomial of `gamma_n` in the regime of `params`.
pub fn leading_polynomial(
    params: &WhittakerHillParams,
    n: u32,
) -> Result<(LeadingPolynomial, Remainder)> {
    leading_polynomial_in(params, regime(params), n)
}

/// [`leading_polynomial`] for an explicitly chosen regime.
pub fn leading_polynomial_in(
    params: &WhittakerHillParams,
    regime: Regime,
    n: u32,
) -> Result<(LeadingPolynomial, Remainder)> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    let (m1, m2) = (params.m1(), params.m2());
    let mut poly = LeadingPolynomial::new();
    let remainder;
    match regime {
        Regime::Balanced {
            asymptotics_available: false,
        } => {
            return Err(Error::NotApplicable(
                "balanced regime (m2 = 2 m1) needs c < 0 for closed-form asymptotics".into(),
            ))
        }
        Regime::FourStepDominant => {
            if n % 2 == 0 {
                let m = n / 2;
                // 32 (c/2)^m / (2^{4m} [(m-1)!]^2)
                let den = pow2(m) * pow2(4 * m) * factorial(m - 1).square();
                poly.insert(Monomial::new(0, m), rat(Integer::from(32), den));
                remainder = Remainder::Absolute(m2 * (m as f64 - 0.5) + m1);
            } else {
                let m = n.div_ceil(2);
                match m {
                    1 => {
                        poly.insert(Monomial::new(1, 0), Rational::from(1));
                        remainder = Remainder::Absolute(2.0 * m1 - m2 / 2.0);
                    }
                    2 => {
                        poly.insert(Monomial::new(1, 1), Rational::from((1, 8)));
                        remainder = Remainder::Absolute(2.0 * m1 + m2 / 2.0);
                    }
                    _ => {
                        poly.insert(Monomial::new(1, m - 1), odd_four_step_coefficient(m));
                        remainder = Remainder::Absolute(m2 * (m as f64 - 1.5) + 2.0 * m1);
                    }
                }
            }
        }
        Regime::TwoStepDominant => match n {
            1 => {
                poly.insert(Monomial::new(1, 0), Rational::from(1));
                remainder = Remainder::Absolute(m2 - m1);
            }
            2 => {
                poly.insert(Monomial::new(0, 1), Rational::from(1));
                poly.insert(Monomial::new(2, 0), Rational::from((1, 8)));
                remainder = Remainder::Absolute(m2);
            }
            _ => {
                // 8 / (2^{3n} [(n-1)!]^2)
                let den = pow2(3 * n) * factorial(n - 1).square();
                poly.insert(Monomial::new(n, 0), rat(Integer::from(8), den));
                remainder = Remainder::Absolute(m1 * n as f64 + m2 - 2.0 * m1);
            }
        },
        Regime::Balanced { .. } => match n {
            1 => {
                poly.insert(Monomial::new(1, 0), Rational::from(1));
                remainder = Remainder::Absolute(3.0 * m1);
            }
            2 => {
                poly.insert(Monomial::new(0, 1), Rational::from(1));
                poly.insert(Monomial::new(2, 0), Rational::from((1, 8)));
                remainder = Remainder::Absolute(4.0 * m1);
            }
            _ => {
                poly = balanced_polynomial(n);
                let m = n.div_ceil(2) as f64;
                remainder = Remainder::Absolute(if n % 2 == 0 {
                    2.0 * m1 * (m + 1.0)
                } else {
                    m1 * (2.0 * m + 1.0)
                });
            }
        },
    }
    Ok((poly, remainder))
}

/// Coefficient of `b c^{m-1}` in `gamma_{2m-1}`, four-step regime, `m >= 3`:
/// `(1/2)^{m-1} 8 / 2^{3m} { [(2m-3)!!]^{-2} sum_{i=1}^{m-2} (2m-2i-3)!! (2i-1)!! / (i! (m-1-i)!)
///  + 2 / ((2m-3)!! (m-1)!) }`.
fn odd_four_step_coefficient(m: u32) -> Rational {
    let df = double_factorial(2 * m - 3);
    let mut sum = Rational::new();
    for i in 1..=m.saturating_sub(2) {
        let num =
            double_factorial_signed(2 * m as i64 - 2 * i as i64 - 3) * double_factorial(2 * i - 1);
        sum += rat(num, factorial(i) * factorial(m - 1 - i));
    }
    let bracket =
        sum / Rational::from(df.clone().square()) + rat(Integer::from(2), df * factorial(m - 1));
    bracket * rat(Integer::from(8), pow2(m - 1) * pow2(3 * m))
}

/// Balanced regime, `n >= 3`:
/// even `8 prod_{k=1}^{m} ((b/2)^2 + 8c(k-1/2)^2) / (2^{2n} [(n-1)!]^2)`,
/// odd `8 (b/2) prod_{k=1}^{m-1} ((b/2)^2 + 8ck^2) / (2^{2n} [(n-1)!]^2)`.
fn balanced_polynomial(n: u32) -> LeadingPolynomial {
    // polynomial in (b, c) as map (a, s) -> coefficient
    let mut poly = LeadingPolynomial::new();
    let prefactor = rat(Integer::from(8), pow2(2 * n) * factorial(n - 1).square());
    if n % 2 == 0 {
        poly.insert(Monomial::new(0, 0), prefactor);
        for k in 1..=n / 2 {
            let shift = Rational::from((2 * k as i64 - 1, 2)).square() * 8;
            poly = times_quadratic(&poly, shift);
        }
    } else {
        poly.insert(Monomial::new(1, 0), prefactor / 2);
        for k in 1..=(n - 1) / 2 {
            poly = times_quadratic(&poly, Rational::from(8 * (k as i64).pow(2)));
        }
    }
    poly
}

/// `poly * ((b/2)^2 + w c)`.
fn times_quadratic(poly: &LeadingPolynomial, w: Rational) -> LeadingPolynomial {
    let mut out = LeadingPolynomial::new();
    for (m, coeff) in poly {
        *out.entry(Monomial::new(m.a + 2, m.s)).or_default() += Rational::from(coeff / 4u32);
        *out.entry(Monomial::new(m.a, m.s + 1)).or_default() += Rational::from(coeff * &w);
    }
    out.retain(|_, c| *c != 0);
    out
}

/// `|sum coeff b^a c^s q^(a m1 + s m2)|`.
pub fn evaluate_polynomial(poly: &LeadingPolynomial, params: &WhittakerHillParams) -> f64 {
    let p = EVAL_PREC;
    let q = Float::with_val(p, params.q());
    let v2 = Float::with_val(p, params.b())
        * Float::with_val(p, (&q).pow(&Float::with_val(p, params.m1())));
    let v4 = Float::with_val(p, params.c())
        * Float::with_val(p, (&q).pow(&Float::with_val(p, params.m2())));
    let mut total = Float::new(p);
    for (m, coeff) in poly {
        total += Float::with_val(p, coeff)
            * Float::with_val(p, (&v2).pow(m.a))
            * Float::with_val(p, (&v4).pow(m.s));
    }
    total.abs().to_f64()
}

/// Small-`q` leading term of `gamma_n` for the regime of `params`.
pub fn leading_gap(params: &WhittakerHillParams, n: u32) -> Result<AsymptoticPrediction> {
    leading_gap_in(params, regime(params), n)
}

/// [`leading_gap`] for an explicitly chosen regime.
pub fn leading_gap_in(
    params: &WhittakerHillParams,
    regime: Regime,
    n: u32,
) -> Result<AsymptoticPrediction> {
    let (poly, remainder) = leading_polynomial_in(params, regime, n)?;
    Ok(AsymptoticPrediction {
        n,
        value: evaluate_polynomial(&poly, params),
        error_exponent: remainder,
        source: Source::SmallQ,
    })
}

/// `b pi / (4 sqrt(-2c))`.
fn trig_argument(b: f64, c: f64) -> f64 {
    b * std::f64::consts::PI / (4.0 * (-2.0 * c).sqrt())
}

/// Large-`n` asymptotics for `m2 = 2 m1`, `c < 0`.
pub fn large_n_gap(params: &WhittakerHillParams, n: u32) -> Result<AsymptoticPrediction> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    if !matches!(
        regime(params),
        Regime::Balanced {
            asymptotics_available: true
        }
    ) {
        return Err(Error::NotApplicable(
            "the large-n formula needs m2 = 2 m1 and c < 0".into(),
        ));
    }
    let (b, c) = (params.b(), params.c());
    let p = EVAL_PREC;
    let qn = Float::with_val(p, params.q()).pow(Float::with_val(p, params.m1() * n as f64));
    let theta = trig_argument(b, c);
    let m = n.div_ceil(2);
    let value = if n % 2 == 0 {
        // q^{2 m1 m} |c|^m / (2^{3m-3} [(2m-2)!!]^2) |cos|
        let den = Float::with_val(p, double_factorial(2 * m - 2).square()) << (3 * m - 3);
        qn * Float::with_val(p, c.abs()).pow(m) / den * theta.cos().abs()
    } else {
        // q^{m1(2m-1)} |c|^{m-1} sqrt(-2c) / (2^{3m-5} [(2m-3)!!]^2 pi) |sin|
        let den = Float::with_val(p, double_factorial_signed(2 * m as i64 - 3).square())
            * Float::with_val(p, rug::float::Constant::Pi);
        let num = qn * Float::with_val(p, c.abs()).pow(m - 1) * (-2.0 * c).sqrt();
        let scaled = if 3 * m >= 5 {
            (num / den) >> (3 * m - 5)
        } else {
            (num / den) << (5 - 3 * m)
        };
        scaled * theta.sin().abs()
    };
    Ok(AsymptoticPrediction {
        n,
        value: value.to_f64(),
        error_exponent: Remainder::LogMOverM,
        source: Source::LargeN,
    })
}

/// Parameters of the potential `-(4 alpha t cos 2x + 2 alpha^2 cos 4x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecialCaseParams {
    pub alpha: f64,
    pub t: f64,
}

impl SpecialCaseParams {
    /// `b = -4t`, `c = -2`, `q = |alpha|`, `m1 = 1`, `m2 = 2`.
    pub fn to_params(&self) -> Result<WhittakerHillParams> {
        WhittakerHillParams::new(-4.0 * self.t, -2.0, self.alpha.abs(), 1.0, 2.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecialCaseMode {
    SmallAlpha,
    LargeN,
}

/// The bracket of the small-`alpha` formula as a polynomial in `t`:
/// even `n`: `8 / (2^n [(n-1)!]^2) prod_{k=1}^{n/2} (t^2 - (2k-1)^2)`,
/// odd `n`: `8 t / (2^n [(n-1)!]^2) prod_{k=1}^{(n-1)/2} (t^2 - (2k)^2)`.
pub fn special_case_polynomial(n: u32) -> BTreeMap<u32, Rational> {
    let prefactor = rat(Integer::from(8), pow2(n) * factorial(n - 1).square());
    let mut poly = BTreeMap::new();
    let (start, roots): (u32, Vec<i64>) = if n % 2 == 0 {
        (0, (1..=n as i64 / 2).map(|k| 2 * k - 1).collect())
    } else {
        (1, (1..=(n as i64 - 1) / 2).map(|k| 2 * k).collect())
    };
    poly.insert(start, prefactor);
    for r in roots {
        let mut next: BTreeMap<u32, Rational> = BTreeMap::new();
        for (e, c) in &poly {
            *next.entry(e + 2).or_default() += c.clone();
            *next.entry(*e).or_default() -= Rational::from(c * (r * r));
        }
        next.retain(|_, c| *c != 0);
        poly = next;
    }
    poly
}

/// Substitutes `b = -4t`, `c = -2` into a polynomial in `(b, c)`.
pub fn substitute_special_case(poly: &LeadingPolynomial) -> BTreeMap<u32, Rational> {
    let mut out: BTreeMap<u32, Rational> = BTreeMap::new();
    for (m, coeff) in poly {
        let scale = Integer::from(-4).pow(m.a) * Integer::from(-2).pow(m.s);
        *out.entry(m.a).or_default() += Rational::from(coeff * scale);
    }
    out.retain(|_, c| *c != 0);
    out
}

/// [`special_case_polynomial`] evaluated in product form, so that its integer roots
/// give exact zeros.
fn special_case_bracket(n: u32, t: f64) -> f64 {
    let prefactor = rat(Integer::from(8), pow2(n) * factorial(n - 1).square()).to_f64();
    if n % 2 == 0 {
        prefactor
            * (1..=n / 2)
                .map(|k| t * t - ((2 * k - 1) as f64).powi(2))
                .product::<f64>()
    } else {
        prefactor
            * t
            * (1..=(n - 1) / 2)
                .map(|k| t * t - ((2 * k) as f64).powi(2))
                .product::<f64>()
    }
}

/// Exact rational prefactor of the large-`n` special-case formula (without
/// `|alpha|^n`, the trigonometric factor and, for odd `n`, `1/pi`):
/// `8 / (2^n [(n-2)!!]^2)`, times 2 for odd `n`.
pub fn special_large_n_prefactor(n: u32) -> Rational {
    let base = rat(
        Integer::from(8),
        pow2(n) * double_factorial_signed(n as i64 - 2).square(),
    );
    if n % 2 == 0 {
        base
    } else {
        base * 2
    }
}

/// Exact rational prefactor of [`large_n_gap`] at `c = -2` (so `sqrt(-2c) = 2`),
/// stripped the same way as [`special_large_n_prefactor`].
pub fn large_n_prefactor_at_c_minus_two(n: u32) -> Rational {
    let m = n.div_ceil(2);
    let c_abs = Integer::from(2);
    if n % 2 == 0 {
        rat(
            c_abs.pow(m),
            pow2(3 * m - 3) * double_factorial(2 * m - 2).square(),
        )
    } else {
        // 2^{3m-5} may be 2^{-2} at m = 1
        let num = c_abs.pow(m - 1) * 2u32;
        let den = double_factorial_signed(2 * m as i64 - 3).square();
        let r = rat(num, den);
        if 3 * m >= 5 {
            r / Rational::from(pow2(3 * m - 5))
        } else {
            r * Rational::from(pow2(5 - 3 * m))
        }
    }
}

/// Small-`alpha` and large-`n` formulas for `-(4 alpha t cos 2x + 2 alpha^2 cos 4x)`.
pub fn special_case_gap(
    dp: &SpecialCaseParams,
    n: u32,
    mode: SpecialCaseMode,
) -> Result<AsymptoticPrediction> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    let alpha_n = dp.alpha.abs().powi(n as i32);
    Ok(match mode {
        SpecialCaseMode::SmallAlpha => AsymptoticPrediction {
            n,
            value: (special_case_bracket(n, dp.t) * alpha_n).abs(),
            error_exponent: Remainder::Absolute(n as f64 + 1.0),
            source: Source::SpecialSmallAlpha,
        },
        SpecialCaseMode::LargeN => {
            let half = std::f64::consts::FRAC_PI_2 * dp.t;
            let trig = if n % 2 == 0 {
                half.cos().abs()
            } else {
                half.sin().abs() / std::f64::consts::PI
            };
            AsymptoticPrediction {
                n,
                value: special_large_n_prefactor(n).to_f64() * alpha_n * trig,
                error_exponent: Remainder::LogMOverM,
                source: Source::SpecialLargeN,
            }
        }
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MathieuMode {
    SmallB,
    LargeN,
}

/// `8 / [(n-1)!]^2 (|B|/8)^n` for the Mathieu potential `-B cos 2x`.
pub fn mathieu_gap(b: f64, n: u32, mode: MathieuMode) -> Result<AsymptoticPrediction> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    let p = EVAL_PREC;
    let value = Float::with_val(p, b.abs() / 8.0).pow(n) * 8u32
        / Float::with_val(p, factorial(n - 1).square());
    let (error_exponent, source) = match mode {
        MathieuMode::SmallB => (Remainder::Absolute(n as f64 + 1.0), Source::MathieuSmallB),
        MathieuMode::LargeN => (Remainder::InverseNSquared, Source::MathieuLargeN),
    };
    Ok(AsymptoticPrediction {
        n,
        value: value.to_f64(),
        error_exponent,
        source,
    })
}

/// Partial products of `cos(theta) = prod_k (1 + b^2 / (8c(2k-1)^2))` and
/// `sin(theta) = theta prod_k (1 + b^2 / (8c(2k)^2))`, `theta = b pi / (4 sqrt(-2c))`.
pub fn trig_partial_products(b: f64, c: f64, m: u32) -> Result<(f64, f64)> {
    if !(c < 0.0) {
        return Err(invalid("c", "the product expansions need c < 0"));
    }
    let r = b * b / (8.0 * c);
    let cos_partial: f64 = (1..=m)
        .map(|k| 1.0 + r / ((2 * k - 1) as f64).powi(2))
        .product();
    let sin_partial: f64 = trig_argument(b, c)
        * (1..m)
            .map(|k| 1.0 + r / ((2 * k) as f64).powi(2))
            .product::<f64>();
    Ok((cos_partial, sin_partial))
}
