//! Leading q exponent of a gap from a log-log fit over q.

use whittaker_hill::cli::{run_sweep_fit, RunConfig};
use whittaker_hill::potential::WhittakerHillParams;

fn main() -> whittaker_hill::Result<()> {
    let qs = [0.01, 0.02, 0.04, 0.08];
    for (m1, m2, n) in [(1.0, 4.0, 3), (2.0, 1.0, 4), (1.0, 4.0, 1)] {
        let config = RunConfig::new(WhittakerHillParams::new(1.0, 1.0, 0.1, m1, m2)?, n)?;
        let fit = run_sweep_fit(&config, &qs, n)?;
        println!(
            "m1={m1} m2={m2} n={n}: slope {:.4}, residual {:.1e}, dropped {:?}",
            fit.slope, fit.residual, fit.dropped
        );
    }
    Ok(())
}
