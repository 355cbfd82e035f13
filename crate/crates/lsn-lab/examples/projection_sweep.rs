//! Success-rate sweep of the codespace-projection decoder in the very-low
//! noise regime p ~ 1/n, where the rate tracks the no-error probability
//! (1 - 3p/4)^n -> e^(-3/4) ~ 0.472 as n grows (p quoted in the mixing
//! parameterization; the Kraus rate is 3p/4).
//!
//! ```bash
//! cargo run --release --example projection_sweep
//! ```

use lsn_lab::{run_sweep, DecoderKind, ExperimentConfig, GridPoint, NoiseSpec};

fn main() -> lsn_lab::Result<()> {
    let points = [8usize, 16, 24]
        .into_iter()
        .map(|n| {
            let p = 1.0 / n as f64;
            GridPoint {
                n,
                k: 4.min(n / 2),
                m: 1,
                noise: NoiseSpec::depolarizing(3.0 * p / 4.0),
                w_max: None,
                w_cut: None,
                code: None,
            }
        })
        .collect();
    let cfg = ExperimentConfig {
        experiment: "sweep".into(),
        decoder: DecoderKind::Projection,
        trials: 20_000,
        seed: 7,
        threads: 1,
        out: None,
        points,
    };
    let report = run_sweep(&cfg)?;
    println!("{}", report.to_csv());
    println!("n      rate      bound (1-3p/4)^n");
    for row in &report.rows {
        let bound = (1.0 - 3.0 / (4.0 * row.n as f64)).powi(row.n as i32);
        println!(
            "{:<6} {:.4}    {bound:.4}  {}",
            row.n,
            row.success_rate,
            if row.success_rate >= bound { "(above)" } else { "(below)" },
        );
    }
    println!("limit as n grows: e^(-3/4) = {:.4}", (-0.75f64).exp());
    Ok(())
}
