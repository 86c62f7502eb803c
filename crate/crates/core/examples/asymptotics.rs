//! Small-q leading terms in the three regimes against the spectral widths.

use whittaker_hill::asymptotics::leading_gap;
use whittaker_hill::potential::{realize_trig, regime, WhittakerHillParams};
use whittaker_hill::spectral::{gap_table, EigenRequest};

fn main() -> whittaker_hill::Result<()> {
    let cases = [(1.0, 4.0), (2.0, 1.0), (1.0, 2.0)];
    for (m1, m2) in cases {
        let params = WhittakerHillParams::new(1.0, -1.0, 0.05, m1, m2)?;
        let req = EigenRequest::at_precision(6, 160)?;
        let table = gap_table(&realize_trig(&params), 5, &req)?;
        println!("m1={m1} m2={m2}: {:?}", regime(&params));
        for g in &table.gaps {
            let lead = leading_gap(&params, g.n)?;
            println!(
                "  n={} spectral {:<12.6e} leading {:<12.6e} ratio {:.6}",
                g.n,
                g.value,
                lead.value,
                g.value / lead.value
            );
        }
    }
    Ok(())
}
