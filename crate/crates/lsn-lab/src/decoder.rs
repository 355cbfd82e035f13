//! The decoding algorithms, all scored against sealed witnesses by the
//! harness: codespace projection, exact minimum-weight syndrome decoding,
//! and the pretty good measurement in single- and multi-shot form.

use crate::code::SEARCH_GUARD;
use crate::dense::{measure, noisy_codeword_density, pgm, DensityMatrix};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::instance::{LsnView, MslsnInstance};
use crate::noise::NoiseSpec;
use crate::pauli::{for_each_pauli_of_weight, pauli_count_up_to_weight, PauliOperator};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecoderOutcome {
    Decoded,
    Fail,
}

/// What a decoder hands back to the harness.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecoderResult {
    pub outcome: DecoderOutcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<BitVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub syndrome: Option<BitVector>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction: Option<PauliOperator>,
    pub wall: Duration,
}

impl DecoderResult {
    fn decoded(candidate: BitVector, start: Instant) -> Self {
        Self {
            outcome: DecoderOutcome::Decoded,
            candidate: Some(candidate),
            syndrome: None,
            correction: None,
            wall: start.elapsed(),
        }
    }

    fn failed(start: Instant) -> Self {
        Self {
            outcome: DecoderOutcome::Fail,
            candidate: None,
            syndrome: None,
            correction: None,
            wall: start.elapsed(),
        }
    }
}

/// CLI-selectable decoder names.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    Projection,
    SyndromeMl,
    Pgm,
    PgmMultishot,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projection" => Ok(DecoderKind::Projection),
            "syndrome-ml" => Ok(DecoderKind::SyndromeMl),
            "pgm" => Ok(DecoderKind::Pgm),
            "pgm-multishot" => Ok(DecoderKind::PgmMultishot),
            other => Err(Error::InvalidParameter(format!(
                "unknown decoder {other:?}; expected projection | syndrome-ml | pgm | pgm-multishot"
            ))),
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            DecoderKind::Projection => "projection",
            DecoderKind::SyndromeMl => "syndrome-ml",
            DecoderKind::Pgm => "pgm",
            DecoderKind::PgmMultishot => "pgm-multishot",
        })
    }
}

/// Codespace projection: apply the inverse encoder, measure everything,
/// return the last k bits. The first n - k measured bits double as the
/// stabilizer syndrome.
pub fn decode_projection(view: &LsnView<'_>, rng: &mut impl Rng) -> Result<DecoderResult> {
    let start = Instant::now();
    let n = view.code().n();
    let k = view.code().k();
    let bits = view.measure_all_after_inverse_encoding(rng)?;
    let mut out = DecoderResult::decoded(bits.slice(n - k, n), start);
    out.syndrome = Some(bits.slice(0, n - k));
    Ok(out)
}

/// Exact syndrome decoding: extract the syndrome, find the minimum-weight
/// unsigned Pauli reproducing it (weights 0..=w_max, colex order, first
/// hit), apply it as the correction and read out the logical frame.
pub fn decode_syndrome_ml(view: &LsnView<'_>, w_max: usize) -> Result<DecoderResult> {
    let start = Instant::now();
    let code = view.code();
    let n = code.n();
    let total = pauli_count_up_to_weight(n, w_max);
    if total > SEARCH_GUARD {
        return Err(Error::GuardExceeded {
            what: "syndrome search space",
            requested: total.min(usize::MAX as u64) as usize,
            limit: SEARCH_GUARD as usize,
        });
    }
    let syndrome = view.syndrome()?;
    let mut correction: Option<PauliOperator> = None;
    'weights: for w in 0..=w_max.min(n) {
        let mut hit = None;
        for_each_pauli_of_weight(n, w, &mut |p| {
            if code.syndrome(p).expect("dims agree") == syndrome {
                hit = Some(p.clone());
                return false;
            }
            true
        });
        if hit.is_some() {
            correction = hit;
            break 'weights;
        }
    }
    let Some(correction) = correction else {
        let mut out = DecoderResult::failed(start);
        out.syndrome = Some(syndrome);
        return Ok(out);
    };
    let candidate = view.readout_after_correction(&correction)?;
    let mut out = DecoderResult::decoded(candidate, start);
    out.syndrome = Some(syndrome);
    out.correction = Some(correction);
    Ok(out)
}

pub const PGM_QUBIT_GUARD: usize = 10;
pub const PGM_LOGICAL_GUARD: usize = 4;

/// Default truncation weight: `ceil(3 n p / 2)`, capped at n.
pub fn default_truncation(n: usize, p: f64) -> usize {
    ((1.5 * n as f64 * p).ceil() as usize).clamp(1, n)
}

fn index_to_bits(k: usize, idx: usize) -> BitVector {
    let mut bits = BitVector::zeros(k);
    for j in 0..k {
        bits.set(j, idx >> (k - 1 - j) & 1 == 1);
    }
    bits
}

fn check_pgm_guards(n: usize, k: usize) -> Result<()> {
    if n > PGM_QUBIT_GUARD {
        return Err(Error::GuardExceeded {
            what: "pgm physical qubits",
            requested: n,
            limit: PGM_QUBIT_GUARD,
        });
    }
    if k > PGM_LOGICAL_GUARD {
        return Err(Error::GuardExceeded {
            what: "pgm logical qubits",
            requested: k,
            limit: PGM_LOGICAL_GUARD,
        });
    }
    Ok(())
}

/// Pretty good measurement over the truncated-noise candidate ensemble
/// `{rho_x}`: build every candidate state, measure the instance, map the
/// outcome index back to a secret. Kernel mass maps to `Fail`.
pub fn decode_pgm(
    view: &LsnView<'_>,
    w_cut: Option<usize>,
    rng: &mut impl Rng,
) -> Result<DecoderResult> {
    let start = Instant::now();
    let code = view.code();
    let (n, k) = (code.n(), code.k());
    check_pgm_guards(n, k)?;
    let w_cut = w_cut.unwrap_or_else(|| default_truncation(n, view.noise().p));
    let truncated = NoiseSpec::truncated_depolarizing(view.noise().p, w_cut.min(n));
    let candidates: Vec<DensityMatrix> = (0..(1usize << k))
        .map(|xi| noisy_codeword_density(code, &index_to_bits(k, xi), &truncated))
        .collect::<Result<_>>()?;
    let povm = pgm(&candidates)?;
    let state = DensityMatrix::from_pure(&view.dense_state()?)?;
    let outcome = measure(&povm, &state, rng)?;
    if outcome == povm.num_outcomes() {
        return Ok(DecoderResult::failed(start));
    }
    Ok(DecoderResult::decoded(index_to_bits(k, outcome), start))
}

/// Multi-shot pretty good measurement over the per-block tensor product of
/// truncated ensembles; one non-degenerate block already makes the
/// candidates orthogonal.
pub fn decode_pgm_multishot(
    inst: &MslsnInstance,
    w_cut: Option<usize>,
    rng: &mut impl Rng,
) -> Result<DecoderResult> {
    let start = Instant::now();
    let m = inst.num_samples();
    let (n, k) = (inst.n(), inst.k());
    check_pgm_guards(m * n, k)?;
    let w_cut = w_cut.unwrap_or_else(|| default_truncation(n, inst.noise.p));
    let truncated = NoiseSpec::truncated_depolarizing(inst.noise.p, w_cut.min(n));
    let mut candidates = Vec::with_capacity(1 << k);
    for xi in 0..(1usize << k) {
        let x = index_to_bits(k, xi);
        let mut blocks = noisy_codeword_density(inst.sample_view(0).code(), &x, &truncated)?;
        for b in 1..m {
            let next = noisy_codeword_density(inst.sample_view(b).code(), &x, &truncated)?;
            blocks = blocks.tensor(&next)?;
        }
        candidates.push(blocks);
    }
    let povm = pgm(&candidates)?;
    let mut joint = inst.sample_view(0).dense_state()?;
    for b in 1..m {
        joint = joint.tensor(&inst.sample_view(b).dense_state()?)?;
    }
    let state = DensityMatrix::from_pure(&joint)?;
    let outcome = measure(&povm, &state, rng)?;
    if outcome == povm.num_outcomes() {
        return Ok(DecoderResult::failed(start));
    }
    Ok(DecoderResult::decoded(index_to_bits(k, outcome), start))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::StabilizerCode;
    use crate::dense::fidelity;
    use crate::instance::{sample_lsn, sample_mslsn, InstanceForm, LsnInstance, MslsnInstance};
    use crate::noise::tail_bound;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fixed_instance(
        code: &StabilizerCode,
        error: &str,
        secret: &[bool],
        form: InstanceForm,
    ) -> LsnInstance {
        LsnInstance::from_parts(
            code.clone(),
            &PauliOperator::parse(error).unwrap(),
            &BitVector::from_bits(secret),
            NoiseSpec::depolarizing(0.1),
            form,
        )
        .unwrap()
    }

    #[test]
    fn projection_noiseless_recovers_secret() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let inst = sample_lsn(
                6,
                2,
                NoiseSpec::depolarizing(0.0),
                &mut rng,
                InstanceForm::Symbolic,
            )
            .unwrap();
            let out = decode_projection(&inst.view(), &mut rng).unwrap();
            assert_eq!(out.candidate.unwrap(), inst.witness().unwrap().secret);
            assert!(out.syndrome.unwrap().is_zero());
        }
    }

    #[test]
    fn projection_symbolic_and_dense_agree() {
        // the payload after inverse encoding is a basis state, so the dense
        // measurement is deterministic and must match the symbolic one
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let code = StabilizerCode::random(6, 2, &mut rng).unwrap();
            let secret = BitVector::random(2, &mut rng);
            let error = NoiseSpec::depolarizing(0.3)
                .sample_error(6, &mut rng)
                .unwrap();
            let noise = NoiseSpec::depolarizing(0.3);
            let sym = LsnInstance::from_parts(
                code.clone(),
                &error,
                &secret,
                noise,
                InstanceForm::Symbolic,
            )
            .unwrap();
            let den =
                LsnInstance::from_parts(code, &error, &secret, noise, InstanceForm::Dense).unwrap();
            let a = decode_projection(&sym.view(), &mut rng).unwrap();
            let b = decode_projection(&den.view(), &mut rng).unwrap();
            assert_eq!(a.candidate, b.candidate);
            assert_eq!(a.syndrome, b.syndrome);
        }
    }

    #[test]
    fn projection_success_rate_low_noise() {
        // Kraus rate p = 1/n still clears the coarse 1/4 bound
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (n, k) = (16, 4);
        let trials = 4000;
        let mut hits = 0;
        for _ in 0..trials {
            let inst = sample_lsn(
                n,
                k,
                NoiseSpec::depolarizing(1.0 / n as f64),
                &mut rng,
                InstanceForm::Symbolic,
            )
            .unwrap();
            let out = decode_projection(&inst.view(), &mut rng).unwrap();
            if out.candidate.as_ref() == Some(&inst.witness().unwrap().secret) {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        assert!(rate >= 0.25, "rate {rate}");
    }

    #[test]
    fn syndrome_ml_five_qubit_corrects_all_weight_one_errors() {
        let code = StabilizerCode::five_qubit();
        assert_eq!(code.distance_exact(3).unwrap(), Some(3));
        for secret in [[false], [true]] {
            let mut checked = 0;
            for_each_pauli_of_weight(5, 1, &mut |e| {
                let inst = fixed_instance(
                    &code,
                    &e.to_string(),
                    &secret,
                    InstanceForm::Symbolic,
                );
                let out = decode_syndrome_ml(&inst.view(), 2).unwrap();
                assert_eq!(
                    out.candidate.unwrap(),
                    BitVector::from_bits(&secret),
                    "error {e}"
                );
                assert_eq!(out.correction.unwrap().unsigned(), e.unsigned());
                checked += 1;
                true
            });
            assert_eq!(checked, 15);
        }
    }

    #[test]
    fn syndrome_ml_degenerate_and_logical_cases() {
        let code = StabilizerCode::five_qubit();
        // a stabilizer element has zero syndrome and acts trivially
        let stab = code.generators()[1].unsigned();
        let inst = fixed_instance(&code, &stab.to_string(), &[true], InstanceForm::Symbolic);
        let out = decode_syndrome_ml(&inst.view(), 0).unwrap();
        assert_eq!(out.candidate.unwrap().to_bits(), vec![true]);

        // an undetectable logical error flips the readout
        let logical = code.logical_x()[0].unsigned();
        let inst = fixed_instance(&code, &logical.to_string(), &[false], InstanceForm::Symbolic);
        assert!(inst.view().syndrome().unwrap().is_zero());
        let out = decode_syndrome_ml(&inst.view(), 0).unwrap();
        assert_eq!(out.candidate.unwrap().to_bits(), vec![true]);
    }

    #[test]
    fn syndrome_ml_fails_outside_weight_bound() {
        let code = StabilizerCode::five_qubit();
        let inst = fixed_instance(&code, "XIIII", &[false], InstanceForm::Symbolic);
        let out = decode_syndrome_ml(&inst.view(), 0).unwrap();
        assert_eq!(out.outcome, DecoderOutcome::Fail);
    }

    #[test]
    fn syndrome_ml_exact_on_certified_random_codes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut tested_codes = 0;
        while tested_codes < 5 {
            let code = StabilizerCode::random(7, 1, &mut rng).unwrap();
            if code.distance_exact(2).unwrap().is_some() {
                continue; // distance < 3, not certified for weight 1
            }
            tested_codes += 1;
            for_each_pauli_of_weight(7, 1, &mut |e| {
                let inst =
                    fixed_instance(&code, &e.to_string(), &[true], InstanceForm::Symbolic);
                let out = decode_syndrome_ml(&inst.view(), 1).unwrap();
                assert_eq!(out.candidate.unwrap().to_bits(), vec![true]);
                true
            });
        }
    }

    #[test]
    fn pgm_five_qubit_truncated_is_perfect() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let code = StabilizerCode::five_qubit();
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        for _ in 0..50 {
            let secret = BitVector::random(1, &mut rng);
            let error = noise.sample_error(5, &mut rng).unwrap();
            let inst =
                LsnInstance::from_parts(code.clone(), &error, &secret, noise, InstanceForm::Dense)
                    .unwrap();
            let out = decode_pgm(&inst.view(), Some(1), &mut rng).unwrap();
            assert_eq!(out.candidate.unwrap(), secret);
        }
    }

    #[test]
    fn pgm_error_bound_chain_five_qubit() {
        // worst-case error of the truncated PGM against the *untruncated*
        // ensemble is within the tail bound plus the pairwise fidelities
        let code = StabilizerCode::five_qubit();
        let p = 0.1;
        let truncated = NoiseSpec::truncated_depolarizing(p, 1);
        let candidates: Vec<DensityMatrix> = (0..2)
            .map(|xi| {
                noisy_codeword_density(&code, &index_to_bits(1, xi), &truncated).unwrap()
            })
            .collect();
        let povm = pgm(&candidates).unwrap();
        let full = NoiseSpec::depolarizing(p);
        let mut worst: f64 = 0.0;
        for xi in 0..2usize {
            let rho = noisy_codeword_density(&code, &index_to_bits(1, xi), &full).unwrap();
            let probs = povm.outcome_probabilities(&rho).unwrap();
            worst = worst.max(1.0 - probs[xi]);
        }
        let mut fid_sum = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                if i != j {
                    fid_sum += fidelity(&candidates[i], &candidates[j])
                        .unwrap()
                        .max(0.0)
                        .sqrt();
                }
            }
        }
        let bound = tail_bound(5, p) + fid_sum;
        assert!(worst <= bound + 1e-9, "worst {worst} > bound {bound}");
        // for the distance-3 code the truncated candidates are orthogonal
        // (sqrt amplifies eigensolver noise, hence the loose cutoff)
        assert!(fid_sum < 1e-5, "fidelity sum {fid_sum}");
    }

    #[test]
    fn pgm_multishot_single_sample_matches_single_shot() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = sample_mslsn(
            1,
            4,
            1,
            NoiseSpec::truncated_depolarizing(0.1, 1),
            &mut rng,
            InstanceForm::Symbolic,
        )
        .unwrap();
        let single = LsnInstance::from_parts(
            inst.sample_view(0).code().clone(),
            &inst.witness().unwrap().errors[0],
            &inst.witness().unwrap().secret,
            inst.noise,
            InstanceForm::Dense,
        )
        .unwrap();
        let mut rng_a = ChaCha8Rng::seed_from_u64(100);
        let mut rng_b = ChaCha8Rng::seed_from_u64(100);
        let a = decode_pgm_multishot(&inst, Some(1), &mut rng_a).unwrap();
        let b = decode_pgm(&single.view(), Some(1), &mut rng_b).unwrap();
        assert_eq!(a.candidate, b.candidate);
    }

    #[test]
    fn pgm_multishot_one_good_block_suffices() {
        // block 1: distance-1 phase-flip repetition code, whose weight-1
        // logical X genuinely confuses the two secrets; block 2: the
        // five-qubit code (good); weight <= 1 truncated noise
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        let bad = StabilizerCode::from_generators(
            &["XXIII", "IXXII", "IIXXI", "IIIXX"]
                .iter()
                .map(|s| PauliOperator::parse(s).unwrap())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        assert_eq!(bad.distance_exact(3).unwrap(), Some(1));
        let codes = vec![bad.clone(), StabilizerCode::five_qubit()];
        for trial in 0..5 {
            let secret = BitVector::from_bits(&[trial % 2 == 0]);
            let errors = vec![
                noise.sample_error(5, &mut rng).unwrap(),
                noise.sample_error(5, &mut rng).unwrap(),
            ];
            let inst =
                MslsnInstance::from_parts(codes.clone(), &errors, &secret, noise, InstanceForm::Symbolic)
                    .unwrap();
            let out = decode_pgm_multishot(&inst, Some(1), &mut rng).unwrap();
            assert_eq!(out.candidate.unwrap(), secret);
        }
        // the bad block alone drops well below certainty when the error
        // lands on its logical: the joint measurement never does
        let inst = LsnInstance::from_parts(
            bad,
            &PauliOperator::parse("XIIII").unwrap(),
            &BitVector::from_bits(&[false]),
            noise,
            InstanceForm::Symbolic,
        )
        .unwrap();
        let mut flips = 0;
        for _ in 0..40 {
            if decode_pgm(&inst.view(), Some(1), &mut rng).unwrap().candidate
                != Some(BitVector::from_bits(&[false]))
            {
                flips += 1;
            }
        }
        assert!(flips > 0, "logical flip never confused the single block");
    }

    #[test]
    fn product_fidelity_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..20 {
            let mk = |rng: &mut ChaCha8Rng| {
                let mut a = crate::dense::CMatrix::zeros(2, 2);
                for v in a.data.iter_mut() {
                    *v = num_complex::Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                }
                let h = a.mul(&a.dagger());
                let t = h.trace().re;
                DensityMatrix::from_matrix(1, h.scale(num_complex::Complex64::new(1.0 / t, 0.0)))
                    .unwrap()
            };
            let (r1, r2, s1, s2) = (mk(&mut rng), mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let lhs = fidelity(&r1.tensor(&r2).unwrap(), &s1.tensor(&s2).unwrap()).unwrap();
            let rhs = fidelity(&r1, &s1).unwrap() * fidelity(&r2, &s2).unwrap();
            assert!((lhs - rhs).abs() < 1e-7, "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn pgm_never_underperforms_syndrome_ml_when_kl_holds() {
        // on the five-qubit code with weight-1 truncated noise both
        // decoders are exact
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let code = StabilizerCode::five_qubit();
        assert!(code.knill_laflamme_ok(1).unwrap());
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        let trials = 100;
        let mut pgm_hits = 0;
        let mut ml_hits = 0;
        for _ in 0..trials {
            let secret = BitVector::random(1, &mut rng);
            let error = noise.sample_error(5, &mut rng).unwrap();
            let sym = LsnInstance::from_parts(
                code.clone(),
                &error,
                &secret,
                noise,
                InstanceForm::Symbolic,
            )
            .unwrap();
            if decode_syndrome_ml(&sym.view(), 1).unwrap().candidate == Some(secret.clone()) {
                ml_hits += 1;
            }
            if decode_pgm(&sym.view(), Some(1), &mut rng).unwrap().candidate == Some(secret) {
                pgm_hits += 1;
            }
        }
        assert_eq!(ml_hits, trials);
        assert_eq!(pgm_hits, trials);
    }

    #[test]
    fn mslsn_combined_instance_decodes_to_repeated_secret() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        let codes = vec![StabilizerCode::five_qubit(), StabilizerCode::five_qubit()];
        for _ in 0..10 {
            let secret = BitVector::random(1, &mut rng);
            let errors = vec![
                noise.sample_error(5, &mut rng).unwrap(),
                noise.sample_error(5, &mut rng).unwrap(),
            ];
            let inst = MslsnInstance::from_parts(
                codes.clone(),
                &errors,
                &secret,
                noise,
                InstanceForm::Symbolic,
            )
            .unwrap();
            let combined = crate::instance::mslsn_to_lsn(&inst).unwrap();
            let out = decode_syndrome_ml(&combined.view(), 2).unwrap();
            let got = out.candidate.unwrap();
            assert_eq!(got, combined.witness().unwrap().secret);
            // x repeated twice
            assert_eq!(got.get(0), secret.get(0));
            assert_eq!(got.get(1), secret.get(0));
        }
    }

    #[test]
    fn decoder_kind_parsing() {
        assert_eq!(
            "syndrome-ml".parse::<DecoderKind>().unwrap(),
            DecoderKind::SyndromeMl
        );
        assert!("belief-prop".parse::<DecoderKind>().is_err());
        assert_eq!(DecoderKind::PgmMultishot.to_string(), "pgm-multishot");
    }
}
