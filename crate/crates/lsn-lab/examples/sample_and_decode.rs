//! Sample decoding instances and run each single-shot decoder on them.
//!
//! ```bash
//! cargo run --release --example sample_and_decode
//! ```

use lsn_lab::{
    decode_pgm, decode_projection, decode_syndrome_ml, derive_rng, sample_lsn, DecoderOutcome,
    InstanceForm, NoiseSpec,
};

fn main() -> lsn_lab::Result<()> {
    let mut rng = derive_rng(2024, 0, 0);
    let (n, k) = (8, 2);
    let noise = NoiseSpec::depolarizing(0.05);
    println!("sampling [[{n}, {k}]] instances under {noise:?}\n");

    for trial in 0..5 {
        let inst = sample_lsn(n, k, noise, &mut rng, InstanceForm::Symbolic)?;
        let witness = inst.witness().unwrap().clone();
        let view = inst.view();

        let proj = decode_projection(&view, &mut rng)?;
        let ml = decode_syndrome_ml(&view, 2)?;
        let pgm = decode_pgm(&view, None, &mut rng)?;

        println!("trial {trial}: secret {:?}, error {}", witness.secret, witness.error);
        for (name, result) in [("projection", &proj), ("syndrome-ml", &ml), ("pgm", &pgm)] {
            let verdict = match (&result.outcome, &result.candidate) {
                (DecoderOutcome::Decoded, Some(c)) if *c == witness.secret => "correct",
                (DecoderOutcome::Decoded, _) => "wrong",
                _ => "fail",
            };
            println!(
                "  {name:<12} -> {:<12} ({verdict}, {:?})",
                result
                    .candidate
                    .as_ref()
                    .map(|c| format!("{c:?}"))
                    .unwrap_or_else(|| "-".into()),
                result.wall,
            );
        }
        println!();
    }

    // witness-stripped files stay decodable: decoders never read it
    let mut inst = sample_lsn(n, k, noise, &mut rng, InstanceForm::Symbolic)?;
    inst.strip_witness();
    let json = serde_json::to_string(&inst).unwrap();
    println!(
        "witness-free instance file is {} bytes; syndrome still measurable: {:?}",
        json.len(),
        inst.view().syndrome()?
    );
    Ok(())
}
