//! c = 0 reduces to Mathieu's equation; compare with the classical gap formula.

use whittaker_hill::asymptotics::{mathieu_gap, MathieuMode};
use whittaker_hill::potential::{realize_trig, WhittakerHillParams};
use whittaker_hill::spectral::{gap_table, EigenRequest};

fn main() -> whittaker_hill::Result<()> {
    for q in [0.05, 0.1, 0.2] {
        let params = WhittakerHillParams::new(1.0, 0.0, q, 1.0, 2.0)?;
        let table = gap_table(
            &realize_trig(&params),
            5,
            &EigenRequest::at_precision(6, 128)?,
        )?;
        let ratios: Vec<String> = table
            .gaps
            .iter()
            .map(|g| {
                let m = mathieu_gap(q, g.n, MathieuMode::SmallB).unwrap().value;
                format!("{:.5}", g.value / m)
            })
            .collect();
        println!("q={q}: gamma_n / mathieu_n = {}", ratios.join(" "));
    }
    Ok(())
}
