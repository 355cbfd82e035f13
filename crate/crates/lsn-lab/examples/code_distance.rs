//! Exhaustive distance search, Knill-Laflamme correctability, and the
//! Gilbert-Varshamov accounting for random codes.
//!
//! ```bash
//! cargo run --release --example code_distance
//! ```

use lsn_lab::{gv_bound, gv_validate, StabilizerCode};

fn main() -> lsn_lab::Result<()> {
    let five = StabilizerCode::five_qubit();
    println!("five-qubit code generators:");
    for g in five.generators() {
        println!("  {g}");
    }
    println!("distance (exhaustive):        {:?}", five.distance_exact(3)?);
    println!("corrects weight-1 errors:     {}", five.knill_laflamme_ok(1)?);

    let rep = StabilizerCode::repetition(3);
    println!("\n3-qubit repetition code:");
    println!("distance (exhaustive):        {:?}", rep.distance_exact(3)?);
    println!("corrects weight-1 errors:     {}", rep.knill_laflamme_ok(1)?);

    println!("\nGilbert-Varshamov lower bounds on Pr[distance >= d]:");
    for (n, k, d) in [(30, 1, 2), (20, 4, 3), (12, 1, 2)] {
        println!("  [[{n},{k}]], d={d}: {:+.5}", gv_bound(n, k, d));
    }

    println!("\nempirical check at [[12, 1]], d = 2 over 300 random codes:");
    let report = gv_validate(12, 1, 2, 300, Some(0.05), 3)?;
    println!(
        "  fraction {:.4} vs bound {:+.4} (vacuous: {})",
        report.fraction, report.gv_bound, report.bound_is_vacuous
    );
    println!(
        "  threshold expression H(3p) + 3 log2(3) p + k/n at p = 0.05: {:.4}",
        report.threshold_expression.unwrap()
    );
    Ok(())
}
