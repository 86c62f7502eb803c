//! Exact walk expansion of a gap and its numeric counterpart with a tail bound.

use whittaker_hill::potential::{fourier_coefficients, realize_trig, WhittakerHillParams};
use whittaker_hill::walks::{beta_sum_numeric, evaluate_series, gap_series_exact, min_steps};

fn main() -> whittaker_hill::Result<()> {
    let params = WhittakerHillParams::new(1.0, 1.0, 0.01, 1.0, 1.5)?;
    // the tail bound is finite once K ln n / n < 1
    let n = 8;
    let series = gap_series_exact(n, min_steps(n) + 4)?;
    println!("gap {n}, walks of at most {} steps:", series.step_budget);
    for (m, c) in series.sorted_terms(params.m1(), params.m2()).iter().take(8) {
        println!("  {m} {c}   q^{}", m.exponent(params.m1(), params.m2()));
    }
    println!(
        "series value   {:e}",
        evaluate_series(&series, &params).abs()
    );

    let v = fourier_coefficients(&realize_trig(&params));
    let beta = beta_sum_numeric(&v, n, 0.0, min_steps(n) + 10, n + 40)?;
    println!(
        "numeric 2|beta| {:e}  (tail bound {:e})",
        2.0 * beta.value.abs(),
        2.0 * beta.truncation_bound
    );
    Ok(())
}
