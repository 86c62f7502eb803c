//! Closed gaps predicted from the Ince parameter and confirmed at 256 bits.

use whittaker_hill::cli::{run_closed_gaps, RunConfig};
use whittaker_hill::potential::WhittakerHillParams;

fn main() -> whittaker_hill::Result<()> {
    for t in [3.0, 4.0] {
        let params = WhittakerHillParams::new(-4.0 * t, -2.0, 0.3, 1.0, 2.0)?;
        let mut config = RunConfig::new(params, 8)?;
        config.precision_bits = Some(256);
        println!("t = {t}");
        print!("{}", run_closed_gaps(&config)?.render());
        println!();
    }
    Ok(())
}
