//! Statistical hiding of the commitment construction, numerically: the
//! two commitment-register states are close in trace distance (within
//! 2 exp(-np/48)), and exactly identical under truncated noise at the
//! code's correctable weight.
//!
//! ```bash
//! cargo run --release --example commitment_hiding
//! ```

use lsn_lab::{commitment_demo, derive_rng, StabilizerCode};

fn main() -> lsn_lab::Result<()> {
    let mut rng = derive_rng(77, 0, 0);

    println!("random [[4, 1]] code, p = 0.15 (full depolarizing):");
    let code = StabilizerCode::random(4, 1, &mut rng)?;
    let report = commitment_demo(&code, 0.15, None, 3)?;
    if let Some(full) = &report.full {
        println!(
            "  trace distance {:.6}  vs bound {:.6}",
            full.trace_distance, report.hiding_bound
        );
    }
    println!("  certified distance: {:?}", report.certified_distance);

    println!("\nfive-qubit code, p = 0.1, truncated at the correctable weight:");
    let report = commitment_demo(&StabilizerCode::five_qubit(), 0.1, None, 3)?;
    let truncated = report.truncated.unwrap();
    println!(
        "  w_cut = {:?}: trace distance {:.3e} (exact-zero distinguishability)",
        truncated.noise.w_cut, truncated.trace_distance
    );
    println!(
        "  fidelity {:.12}, analytic bound {:.6}",
        truncated.fidelity, report.hiding_bound
    );

    println!("\nno noise means nothing to hide from:");
    let report = commitment_demo(&StabilizerCode::five_qubit(), 0.0, None, 3)?;
    println!(
        "  p = 0: trace distance {:.3e}",
        report.full.unwrap().trace_distance
    );
    Ok(())
}
