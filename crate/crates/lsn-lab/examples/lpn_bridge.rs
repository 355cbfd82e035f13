//! Classical parity learning as a special case: a noisy linear-code
//! sample maps to a decoding instance whose encoder is the CNOT circuit
//! of the (completed) generator matrix, with bit-flip noise semantics.
//!
//! ```bash
//! cargo run --release --example lpn_bridge
//! ```

use lsn_lab::{
    decode_syndrome_ml, derive_rng, full_column_rank_probability, lpn_bridge_trials, lpn_to_lsn,
    sample_lpn,
};

fn main() -> lsn_lab::Result<()> {
    let mut rng = derive_rng(12, 0, 0);
    let (n, k, p) = (10, 3, 0.1);

    let lpn = sample_lpn(n, k, p, &mut rng)?;
    println!("parity sample: b = {:?}", lpn.b);
    match lpn_to_lsn(&lpn)? {
        None => println!("generator matrix was rank-deficient; reduction aborts"),
        Some(lsn) => {
            println!(
                "bridged instance: [[{}, {}]] code with {} CNOT/SWAP gates, noise {:?}",
                lsn.code.n(),
                lsn.code.k(),
                lsn.code.encoder_circuit().len(),
                lsn.noise
            );
            for g in lsn.code.generators().iter().take(3) {
                println!("  generator {g}  (Z-type parity check)");
            }
            let out = decode_syndrome_ml(&lsn.view(), 2)?;
            println!(
                "syndrome decode: candidate {:?}, truth {:?}",
                out.candidate,
                lpn.witness().unwrap().x
            );
        }
    }

    println!("\naggregate round trip at n = 8, k = 2, p = 0.25:");
    let report = lpn_bridge_trials(8, 2, 0.25, 3, 5000, 7)?;
    println!(
        "  full-rank rate {:.4} (formula {:.4})",
        report.full_rank_rate,
        full_column_rank_probability(8, 2)
    );
    println!(
        "  error-bit frequency {:.4} (rate p = {:.2})",
        report.error_bit_frequency, report.p
    );
    println!(
        "  decoded {} of {} bridged instances correctly ({:.3})",
        report.recoveries, report.decoded, report.recovery_rate
    );
    Ok(())
}
