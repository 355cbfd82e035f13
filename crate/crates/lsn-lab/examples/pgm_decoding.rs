//! The pretty good measurement on the five-qubit code: under weight-1
//! truncated depolarizing noise the candidate ensemble is exactly
//! orthogonal, so the PGM identifies the secret with probability 1. Also
//! checks the worst-case-error bound against the pairwise fidelities.
//!
//! ```bash
//! cargo run --release --example pgm_decoding
//! ```

use lsn_lab::{
    decode_pgm, derive_rng, fidelity, noisy_codeword_density, pgm, tail_bound, BitVector,
    InstanceForm, LsnInstance, NoiseSpec, StabilizerCode,
};

fn main() -> lsn_lab::Result<()> {
    let code = StabilizerCode::five_qubit();
    let p = 0.1;
    let noise = NoiseSpec::truncated_depolarizing(p, 1);
    let mut rng = derive_rng(5, 0, 0);

    let trials = 500;
    let mut hits = 0;
    for _ in 0..trials {
        let secret = BitVector::random(1, &mut rng);
        let error = noise.sample_error(5, &mut rng)?;
        let inst =
            LsnInstance::from_parts(code.clone(), &error, &secret, noise, InstanceForm::Symbolic)?;
        if decode_pgm(&inst.view(), Some(1), &mut rng)?.candidate == Some(secret) {
            hits += 1;
        }
    }
    println!("five-qubit code, truncated w<=1 noise: {hits}/{trials} decoded\n");

    // worst-case error of the truncated PGM against the full-noise states
    let truncated: Vec<_> = (0..2)
        .map(|x| noisy_codeword_density(&code, &BitVector::from_bits(&[x == 1]), &noise))
        .collect::<lsn_lab::Result<_>>()?;
    let povm = pgm(&truncated)?;
    let full = NoiseSpec::depolarizing(p);
    let mut worst: f64 = 0.0;
    for x in 0..2usize {
        let rho = noisy_codeword_density(&code, &BitVector::from_bits(&[x == 1]), &full)?;
        worst = worst.max(1.0 - povm.outcome_probabilities(&rho)?[x]);
    }
    let fiducial = fidelity(&truncated[0], &truncated[1])?;
    println!("pairwise fidelity of the truncated candidates: {fiducial:.3e}");
    println!(
        "worst-case error vs full depolarizing: {worst:.5} <= exp(-np/12) + sum sqrt(F) = {:.5}",
        tail_bound(5, p) + 2.0 * fiducial.max(0.0).sqrt()
    );
    Ok(())
}
