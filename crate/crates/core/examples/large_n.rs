//! Large-n closed form for m2 = 2 m1, c < 0, against the exact series.

use whittaker_hill::asymptotics::large_n_gap;
use whittaker_hill::potential::WhittakerHillParams;
use whittaker_hill::walks::{evaluate_series_prec, gap_series_exact};

fn main() -> whittaker_hill::Result<()> {
    let params = WhittakerHillParams::new(1.0, -2.0, 0.2, 1.0, 2.0)?;
    println!("n   series                 closed form            rel. error");
    for n in 6..=16 {
        let series = gap_series_exact(n, n + 6)?;
        let exact = evaluate_series_prec(&series, &params, 256).abs().to_f64();
        let asym = large_n_gap(&params, n)?.value;
        println!(
            "{n:<3} {exact:<22e} {asym:<22e} {:.3e}",
            (exact / asym - 1.0).abs()
        );
    }
    Ok(())
}
