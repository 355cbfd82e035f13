//! Exact-uniformity checks for the Clifford and stabilizer-group
//! samplers: all 24 single-qubit Cliffords and all 30 one-generator
//! groups on two qubits show up with uniform frequencies.
//!
//! ```bash
//! cargo run --release --example uniform_sampling
//! ```

use lsn_lab::{derive_rng, sample_uniform_clifford, stats, StabilizerCode};
use std::collections::HashMap;

fn main() -> lsn_lab::Result<()> {
    let mut rng = derive_rng(1, 0, 0);

    let mut tableaux: HashMap<String, u64> = HashMap::new();
    for _ in 0..48_000 {
        let t = sample_uniform_clifford(1, &mut rng);
        *tableaux
            .entry(format!("{}|{}", t.x_image(0), t.z_image(0)))
            .or_insert(0) += 1;
    }
    let observed: Vec<u64> = tableaux.values().copied().collect();
    let (stat, p) = stats::uniformity_pvalue(&observed);
    println!(
        "single-qubit Cliffords: {} distinct (expect 24), chi-square {stat:.1}, p = {p:.3}",
        tableaux.len()
    );

    let mut groups: HashMap<String, u64> = HashMap::new();
    for _ in 0..30_000 {
        let code = StabilizerCode::random(2, 1, &mut rng)?;
        *groups.entry(code.group_key()?).or_insert(0) += 1;
    }
    let observed: Vec<u64> = groups.values().copied().collect();
    let (stat, p) = stats::uniformity_pvalue(&observed);
    println!(
        "[[2, 1]] stabilizer groups: {} distinct (expect 30), chi-square {stat:.1}, p = {p:.3}",
        groups.len()
    );

    // a random Clifford Pauli-mixes: the image of X_0 is a uniform
    // non-identity signed Pauli
    let mut images: HashMap<String, u64> = HashMap::new();
    let x0 = lsn_lab::PauliOperator::parse("X").unwrap();
    for _ in 0..30_000 {
        let t = sample_uniform_clifford(1, &mut rng);
        *images.entry(t.conjugate(&x0).to_string()).or_insert(0) += 1;
    }
    let observed: Vec<u64> = images.values().copied().collect();
    let (stat, p) = stats::uniformity_pvalue(&observed);
    println!(
        "images of X under conjugation: {} distinct (expect 6), chi-square {stat:.1}, p = {p:.3}",
        images.len()
    );
    Ok(())
}
