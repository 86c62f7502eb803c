//! Walks from `-n` to `n` with steps `+-2`, `+-4` and the gap expansion
//! `2 (V(2n) + sum_k beta_k(n, z))` built from them, numerically at a given
//! `z` and as an exact rational polynomial in `b`, `c` at `z = 0`.

use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::potential::{realize_trig, FourierCoefficients, WhittakerHillParams};

/// A finite walk on `n + 2Z` starting at `-n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Walk {
    steps: Vec<i64>,
}

impl Walk {
    pub fn new(steps: Vec<i64>) -> Result<Self> {
        if steps.is_empty() {
            return Err(invalid("steps", "a walk has at least one step"));
        }
        if let Some(bad) = steps.iter().find(|s| ![-4, -2, 2, 4].contains(*s)) {
            return Err(invalid(
                "steps",
                format!("step {bad} is not one of +-2, +-4"),
            ));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[i64] {
        &self.steps
    }

    /// Intermediate vertices `j_1, ..., j_nu` of the walk from `-n`.
    pub fn vertices(&self, n: u32) -> Vec<i64> {
        let mut j = -(n as i64);
        let mut out = Vec::with_capacity(self.steps.len().saturating_sub(1));
        for &s in &self.steps[..self.steps.len() - 1] {
            j += s;
            out.push(j);
        }
        out
    }

    /// Ends at `n` without touching `+-n` in between.
    pub fn joins(&self, n: u32) -> bool {
        let n = n as i64;
        self.steps.iter().sum::<i64>() == 2 * n
            && self.vertices(n as u32).iter().all(|j| j.abs() != n)
    }

    /// Number of `+-2` and of `+-4` steps.
    pub fn monomial(&self) -> Monomial {
        let a = self.steps.iter().filter(|s| s.abs() == 2).count() as u32;
        Monomial {
            a,
            s: self.steps.len() as u32 - a,
        }
    }
}

/// All compositions of `2n` into parts 2 and 4, in lexicographic order.
pub fn positive_walks(n: u32) -> Vec<Walk> {
    fn extend(rest: i64, prefix: &mut Vec<i64>, out: &mut Vec<Walk>) {
        if rest == 0 {
            out.push(Walk {
                steps: prefix.clone(),
            });
            return;
        }
        for step in [2, 4] {
            if step <= rest {
                prefix.push(step);
                extend(rest - step, prefix, out);
                prefix.pop();
            }
        }
    }
    let mut out = Vec::new();
    if n >= 1 {
        extend(2 * n as i64, &mut Vec::new(), &mut out);
    }
    out
}

/// `B_n(x, z) = V(x_1) ... V(x_{nu+1}) / ((n^2 - j_1^2 + z) ... (n^2 - j_nu^2 + z))`.
pub fn walk_weight(walk: &Walk, n: u32, z: f64, coeffs: &FourierCoefficients) -> Result<f64> {
    let nn = (n as i64).pow(2);
    let mut w: f64 = walk.steps.iter().map(|&s| coeffs.get(s)).product();
    for j in walk.vertices(n) {
        let den = (nn - j * j) as f64 + z;
        if den == 0.0 {
            return Err(Error::Singular { n, vertex: j, z });
        }
        w /= den;
    }
    Ok(w)
}

/// `b^a c^s`: `a` steps of length 2 and `s` steps of length 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Monomial {
    pub a: u32,
    pub s: u32,
}

impl Monomial {
    pub fn new(a: u32, s: u32) -> Self {
        Self { a, s }
    }

    /// Power of `q` carried by the monomial.
    pub fn exponent(&self, m1: f64, m2: f64) -> f64 {
        self.a as f64 * m1 + self.s as f64 * m2
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.a, self.s)
    }
}

/// `sum coeff(a, s) b^a c^s q^(a m1 + s m2)`, exact in every monomial with
/// `a + s <= step_budget`.
#[derive(Debug, Clone, PartialEq)]
pub struct GapSeries {
    pub n: u32,
    pub coeffs: BTreeMap<Monomial, Rational>,
    pub step_budget: u32,
}

impl GapSeries {
    /// Monomials ordered by `q` exponent, ties broken by `(a, s)`.
    pub fn sorted_terms(&self, m1: f64, m2: f64) -> Vec<(Monomial, &Rational)> {
        let mut terms: Vec<_> = self.coeffs.iter().map(|(m, c)| (*m, c)).collect();
        terms.sort_by(|x, y| {
            x.0.exponent(m1, m2)
                .total_cmp(&y.0.exponent(m1, m2))
                .then(x.0.cmp(&y.0))
        });
        terms
    }

    /// The terms of smallest `q` exponent.
    pub fn leading_terms(&self, m1: f64, m2: f64) -> BTreeMap<Monomial, Rational> {
        let min = self
            .coeffs
            .keys()
            .map(|m| m.exponent(m1, m2))
            .fold(f64::INFINITY, f64::min);
        self.coeffs
            .iter()
            .filter(|(m, _)| (m.exponent(m1, m2) - min).abs() <= 1e-12 * min.abs().max(1.0))
            .map(|(m, c)| (*m, c.clone()))
            .collect()
    }
}

/// Minimal number of steps needed to go from `-n` to `n`.
pub fn min_steps(n: u32) -> u32 {
    n.div_ceil(2)
}

/// Default step budget: leading order plus three correction orders.
pub fn default_step_budget(n: u32) -> u32 {
    min_steps(n) + 6
}

/// Exact expansion of `2 (V(2n) + sum_k beta_k(n, 0))` over walks with at most
/// `step_budget` steps.
pub fn gap_series_exact(n: u32, step_budget: u32) -> Result<GapSeries> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    if step_budget < min_steps(n) {
        return Err(invalid(
            "step_budget",
            format!("gap {n} needs at least {} steps", min_steps(n)),
        ));
    }
    let target = n as i64;
    let nn = target * target;
    let half = Rational::from((1, 2));
    // (vertex, number of 2-steps) -> coefficient, for walks of the current length
    let mut layer: BTreeMap<(i64, u32), Rational> = BTreeMap::new();
    layer.insert((-target, 0), Rational::from(1));
    let mut coeffs: BTreeMap<Monomial, Rational> = BTreeMap::new();
    for used in 0..step_budget {
        let remaining = (step_budget - used - 1) as i64;
        let mut next: BTreeMap<(i64, u32), Rational> = BTreeMap::new();
        for ((j, a), w) in &layer {
            for step in [-4i64, -2, 2, 4] {
                let k = j + step;
                let a2 = a + u32::from(step.abs() == 2);
                let weight = Rational::from(w * &half);
                if k == target {
                    let m = Monomial::new(a2, used + 1 - a2);
                    *coeffs.entry(m).or_default() += weight;
                } else if k != -target && target - k <= 4 * remaining {
                    let den = Integer::from(nn - k * k);
                    *next.entry((k, a2)).or_default() += weight / den;
                }
            }
        }
        layer = next;
    }
    for c in coeffs.values_mut() {
        *c *= 2;
    }
    coeffs.retain(|_, c| *c != 0);
    Ok(GapSeries {
        n,
        coeffs,
        step_budget,
    })
}

/// `sum coeff(a, s) b^a c^s q^(a m1 + s m2)` in double precision, summed from
/// the smallest exponent up.
pub fn evaluate_series(series: &GapSeries, params: &WhittakerHillParams) -> f64 {
    let (b, c, q) = (params.b(), params.c(), params.q());
    series
        .sorted_terms(params.m1(), params.m2())
        .iter()
        .rev()
        .map(|(m, coeff)| {
            coeff.to_f64()
                * b.powi(m.a as i32)
                * c.powi(m.s as i32)
                * q.powf(m.exponent(params.m1(), params.m2()))
        })
        .sum()
}

/// [`evaluate_series`] at `prec` bits.
pub fn evaluate_series_prec(series: &GapSeries, params: &WhittakerHillParams, prec: u32) -> Float {
    let b = Float::with_val(prec, params.b());
    let c = Float::with_val(prec, params.c());
    let q = Float::with_val(prec, params.q());
    let qm1 = Float::with_val(prec, (&q).pow(&Float::with_val(prec, params.m1())));
    let qm2 = Float::with_val(prec, (&q).pow(&Float::with_val(prec, params.m2())));
    let v2 = b * qm1;
    let v4 = c * qm2;
    let mut total = Float::new(prec);
    for (m, coeff) in series.sorted_terms(params.m1(), params.m2()).iter().rev() {
        let term = Float::with_val(prec, *coeff)
            * Float::with_val(prec, (&v2).pow(m.a))
            * Float::with_val(prec, (&v4).pow(m.s));
        total += term;
    }
    total
}

/// `V(2n) + sum_k beta_k(n, z)` truncated in steps and vertices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BetaEvaluation {
    pub n: u32,
    pub z: f64,
    pub value: f64,
    /// Geometric tail estimate for the walks beyond the step budget.
    pub truncation_bound: f64,
}

/// `K = 40 (|V(2)| + |V(4)| + |V(2)^2 / V(4)|)`, the walk-tail constant in
/// the coefficient normalisation `V(2) = b q^m1 / 2`, `V(4) = c q^m2 / 2`.
pub fn walk_tail_constant(params: &WhittakerHillParams) -> Result<f64> {
    if params.is_mathieu_degenerate() {
        return Err(Error::NotApplicable(
            "the walk-tail constant divides by c; c = 0 is the Mathieu case".into(),
        ));
    }
    let v = crate::potential::fourier_coefficients(&realize_trig(params));
    Ok(tail_constant(&v))
}

fn tail_constant(v: &FourierCoefficients) -> f64 {
    let (v2, v4) = (v.get(2), v.get(4));
    let cross = if v4 != 0.0 { (v2 * v2 / v4).abs() } else { 0.0 };
    40.0 * (v2.abs() + v4.abs() + cross)
}

/// Numeric sum over all walks from `-n` to `n` with at most `step_budget`
/// steps and every vertex in `[-vertex_bound, vertex_bound]`, by dynamic
/// programming over (vertex, steps used).
pub fn beta_sum_numeric(
    coeffs: &FourierCoefficients,
    n: u32,
    z: f64,
    step_budget: u32,
    vertex_bound: u32,
) -> Result<BetaEvaluation> {
    if n == 0 {
        return Err(invalid("n", "gap index starts at 1"));
    }
    if !(z.abs() <= 1.0) {
        return Err(invalid("z", format!("|z| must not exceed 1, got {z}")));
    }
    if step_budget < min_steps(n) {
        return Err(invalid(
            "step_budget",
            format!("gap {n} needs at least {} steps", min_steps(n)),
        ));
    }
    if vertex_bound < n + 4 {
        return Err(invalid(
            "vertex_bound",
            format!("must be at least n + 4 = {}", n + 4),
        ));
    }
    let target = n as i64;
    let bound = vertex_bound as i64;
    let width = (2 * bound + 1) as usize;
    let idx = |j: i64| (j + bound) as usize;
    let nn = (target * target) as f64;

    // denominators are fixed by the vertex, so check them once
    let mut inv_den = vec![0.0; width];
    for j in (-bound..=bound).filter(|j| (j - target).rem_euclid(2) == 0) {
        if j.abs() == target {
            continue;
        }
        let den = nn - (j * j) as f64 + z;
        if den == 0.0 {
            return Err(Error::Singular { n, vertex: j, z });
        }
        inv_den[idx(j)] = 1.0 / den;
    }

    let mut layer = vec![0.0; width];
    layer[idx(-target)] = 1.0;
    let mut value = 0.0;
    for used in 0..step_budget {
        let remaining = (step_budget - used - 1) as i64;
        let mut next = vec![0.0; width];
        for j in -bound..=bound {
            let w = layer[idx(j)];
            if w == 0.0 {
                continue;
            }
            for step in [-4i64, -2, 2, 4] {
                let k = j + step;
                let contrib = w * coeffs.get(step);
                if k == target {
                    value += contrib;
                } else if k != -target && k.abs() <= bound && target - k <= 4 * remaining {
                    next[idx(k)] += contrib * inv_den[idx(k)];
                }
            }
        }
        layer = next;
    }

    let leading: f64 = positive_walks(n)
        .iter()
        .map(|w| walk_weight(w, n, z, coeffs).map(f64::abs))
        .sum::<Result<f64>>()?;
    let rho = tail_constant(coeffs) * (n.max(2) as f64).ln() / n as f64;
    let mu0 = step_budget as i64 + 1 - n as i64;
    let truncation_bound = if leading == 0.0 {
        0.0
    } else if rho >= 1.0 || mu0 <= 0 {
        f64::INFINITY
    } else {
        leading * rho.powi(mu0 as i32) / (1.0 - rho)
    };
    Ok(BetaEvaluation {
        n,
        z,
        value,
        truncation_bound,
    })
}

/// Positive and negative parts of `sigma_n = sum over positive walks of B_n(xi, 0)`.
pub fn sigma_split(coeffs: &FourierCoefficients, n: u32) -> (f64, f64) {
    let mut plus = 0.0;
    let mut minus = 0.0;
    for w in positive_walks(n) {
        let b = walk_weight(&w, n, 0.0, coeffs).expect("positive walks avoid +-n");
        if b > 0.0 {
            plus += b;
        } else {
            minus += b;
        }
    }
    (plus, minus)
}
