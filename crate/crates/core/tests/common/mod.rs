//! Independent oracles shared by the integration tests.

use std::collections::BTreeMap;

use rug::{Integer, Rational};
use whittaker_hill::walks::Monomial;

/// `8 P_n(b/2) / (2^{2n} [(n-1)!]^2)` from the product form of `P_n`, as a
/// polynomial in `(b, c)`.
pub fn product_polynomial(n: u32) -> BTreeMap<Monomial, Rational> {
    // factors (b/2)^2 + w c, starting from 1 (even n) or b/2 (odd n)
    let mut poly: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    let weights: Vec<Rational> = if n % 2 == 0 {
        (1..=n as i64 / 2)
            .map(|k| Rational::from((8 * (2 * k - 1) * (2 * k - 1), 4)))
            .collect()
    } else {
        (1..=(n as i64 - 1) / 2)
            .map(|k| Rational::from(8 * k * k))
            .collect()
    };
    if n % 2 == 0 {
        poly.insert((0, 0), Rational::from(1));
    } else {
        poly.insert((1, 0), Rational::from((1, 2)));
    }
    for w in weights {
        let mut next: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
        for ((a, s), coeff) in &poly {
            *next.entry((a + 2, *s)).or_default() += Rational::from(coeff / 4u32);
            *next.entry((*a, s + 1)).or_default() += Rational::from(coeff * &w);
        }
        poly = next;
    }
    let fact = Integer::from(Integer::factorial(n - 1));
    let scale = Rational::from((
        Integer::from(8),
        (Integer::from(1) << (2 * n)) * fact.square(),
    ));
    poly.into_iter()
        .filter(|(_, c)| *c != 0)
        .map(|((a, s), c)| (Monomial::new(a, s), c * &scale))
        .collect()
}

/// Every step sequence in `{+-2, +-4}` from `-n` to `n` of length at most
/// `budget` avoiding `+-n` in between, weighted `2 prod (1/2) / (n^2 - j^2)`.
pub fn brute_force_series(n: u32, budget: u32) -> BTreeMap<Monomial, Rational> {
    fn extend(
        n: i64,
        at: i64,
        steps: u32,
        twos: u32,
        weight: Rational,
        budget: u32,
        out: &mut BTreeMap<Monomial, Rational>,
    ) {
        if steps == budget {
            return;
        }
        for step in [-4i64, -2, 2, 4] {
            let next = at + step;
            let twos = twos + u32::from(step.abs() == 2);
            let w = Rational::from(&weight / 2u32);
            if next == n {
                *out.entry(Monomial::new(twos, steps + 1 - twos))
                    .or_default() += &w;
            } else if next != -n {
                let den = Integer::from(n * n - next * next);
                extend(n, next, steps + 1, twos, w / den, budget, out);
            }
        }
    }
    let mut out = BTreeMap::new();
    extend(
        n as i64,
        -(n as i64),
        0,
        0,
        Rational::from(2),
        budget,
        &mut out,
    );
    out.retain(|_, c| *c != 0);
    out
}
