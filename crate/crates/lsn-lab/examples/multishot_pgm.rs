//! Multi-shot decoding: the PGM over the per-block tensor ensemble needs
//! only one good (distance >= 3) block. Block 1 is a phase-flip
//! repetition code whose weight-1 logical X confuses the secrets; block 2
//! is the five-qubit perfect code, and it rescues the joint measurement.
//!
//! ```bash
//! cargo run --release --example multishot_pgm
//! ```

use lsn_lab::{
    decode_pgm, decode_pgm_multishot, derive_rng, BitVector, InstanceForm, LsnInstance,
    MslsnInstance, NoiseSpec, PauliOperator, StabilizerCode,
};

fn phase_flip_repetition() -> StabilizerCode {
    let gens: Vec<PauliOperator> = ["XXIII", "IXXII", "IIXXI", "IIIXX"]
        .iter()
        .map(|s| PauliOperator::parse(s).unwrap())
        .collect();
    StabilizerCode::from_generators(&gens).unwrap()
}

fn main() -> lsn_lab::Result<()> {
    let mut rng = derive_rng(9, 0, 0);
    let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
    let bad = phase_flip_repetition();
    let good = StabilizerCode::five_qubit();
    println!(
        "block 1: phase-flip repetition, distance {:?}; block 2: five-qubit code, distance {:?}\n",
        bad.distance_exact(3)?,
        good.distance_exact(3)?
    );

    let trials = 60;
    let mut single_hits = 0;
    let mut multi_hits = 0;
    for _ in 0..trials {
        let secret = BitVector::random(1, &mut rng);
        let errors = [noise.sample_error(5, &mut rng)?, noise.sample_error(5, &mut rng)?];

        // single shot on the bad block alone: a weight-1 error can be an
        // undetectable logical flip
        let single = LsnInstance::from_parts(
            bad.clone(),
            &errors[0],
            &secret,
            noise,
            InstanceForm::Symbolic,
        )?;
        if decode_pgm(&single.view(), Some(1), &mut rng)?.candidate == Some(secret.clone()) {
            single_hits += 1;
        }

        // both blocks jointly
        let inst = MslsnInstance::from_parts(
            vec![bad.clone(), good.clone()],
            &errors,
            &secret,
            noise,
            InstanceForm::Symbolic,
        )?;
        if decode_pgm_multishot(&inst, Some(1), &mut rng)?.candidate == Some(secret) {
            multi_hits += 1;
        }
    }
    println!("single shot on the bad block:     {single_hits}/{trials}");
    println!("two-block multi-shot measurement: {multi_hits}/{trials}");
    Ok(())
}
