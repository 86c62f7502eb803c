//! Which sector supplies the upper edge of each gap, predicted and computed.

use whittaker_hill::cli::{run_signs, RunConfig};
use whittaker_hill::potential::WhittakerHillParams;

fn main() -> whittaker_hill::Result<()> {
    for (b, c) in [(1.0, -2.0), (-3.0, -2.0), (5.0, -1.0)] {
        let config = RunConfig::new(WhittakerHillParams::new(b, c, 0.5, 1.0, 2.0)?, 5)?;
        println!("b={b} c={c}");
        for row in run_signs(&config)? {
            println!(
                "  n={} predicted {:+} numeric {:+} (edge pairing {:+})",
                row.n, row.predicted, row.numeric.by_rank, row.numeric.by_edge
            );
        }
    }
    Ok(())
}
