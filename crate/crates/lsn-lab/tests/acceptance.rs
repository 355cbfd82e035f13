//! Acceptance suite: one test per quantitative claim the lab reproduces,
//! each printing a pass/fail line with its runtime (run with
//! `cargo test --test acceptance -- --nocapture` to see them).
//!
//! Depolarizing rates follow the Kraus convention (identity with
//! probability 1 - p). Bounds of the form `(1 - 3p/4)^n` quote the
//! mixing-parameterized channel, which translates to a Kraus rate of
//! `3p/4`; criterion 1 exercises both readings.

use lsn_lab::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::time::{Duration, Instant};

struct Criterion {
    name: &'static str,
    budget: Duration,
    start: Instant,
}

impl Criterion {
    fn new(name: &'static str, budget: Duration) -> Self {
        Self {
            name,
            budget,
            start: Instant::now(),
        }
    }

    fn check(&self, ok: bool, detail: &str) {
        if !ok {
            println!("[acceptance] {}: FAIL — {detail}", self.name);
            panic!("{}: {detail}", self.name);
        }
    }

    fn finish(self, detail: String) {
        let elapsed = self.start.elapsed();
        let ok = elapsed <= self.budget;
        println!(
            "[acceptance] {}: {} — {detail} ({elapsed:.2?}, budget {:?})",
            self.name,
            if ok { "PASS" } else { "FAIL (over budget)" },
            self.budget,
        );
        assert!(
            ok,
            "{} exceeded its runtime budget: {elapsed:?} > {:?}",
            self.name, self.budget
        );
    }
}

fn projection_rate(n: usize, k: usize, kraus_p: f64, trials: u64, seed: u64) -> f64 {
    let cfg = ExperimentConfig {
        experiment: "sweep".into(),
        decoder: DecoderKind::Projection,
        trials,
        seed,
        threads: 1,
        out: None,
        points: vec![GridPoint {
            n,
            k,
            m: 1,
            noise: NoiseSpec::depolarizing(kraus_p),
            w_max: None,
            w_cut: None,
            code: None,
        }],
    };
    run_sweep(&cfg).unwrap().rows[0].success_rate
}

#[test]
fn criterion_1_projection_decoder_bound() {
    let c = Criterion::new("1 projection-decoder bound", Duration::from_secs(10));
    let (n, k) = (16usize, 4usize);
    let trials = 20_000u64;
    // the bound (1 - 3p/4)^n at p = 1/16 is the no-error probability of
    // the mixing-parameterized channel; its Kraus rate is 3p/4 = 3/64
    let p: f64 = 1.0 / 16.0;
    let bound = (1.0 - 3.0 * p / 4.0).powi(n as i32);
    let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
    let rate = projection_rate(n, k, 3.0 * p / 4.0, trials, 41);
    c.check(
        rate >= bound - 3.0 * sigma,
        &format!("rate {rate:.4} below {bound:.4} - 3s = {:.4}", bound - 3.0 * sigma),
    );
    c.check(rate >= 0.25, &format!("rate {rate:.4} below 1/4"));
    // the literal Kraus reading p = 1/16 still clears the final 1/4 bound
    let literal = projection_rate(n, k, p, 5_000, 43);
    c.check(literal >= 0.25, &format!("literal rate {literal:.4} below 1/4"));
    c.finish(format!(
        "rate {rate:.4} >= {:.4} (bound {bound:.4} - 3 sigma) and >= 0.25; literal-Kraus rate {literal:.4} >= 0.25",
        bound - 3.0 * sigma
    ));
}

#[test]
fn criterion_2_exact_correction_at_certified_distance() {
    let c = Criterion::new(
        "2 exact correction at certified distance",
        Duration::from_secs(1),
    );
    let code = StabilizerCode::five_qubit();
    c.check(
        code.distance_exact(3).unwrap() == Some(3),
        "five-qubit distance is not 3",
    );
    let mut cases = 0u32;
    for secret in [[false], [true]] {
        for_each_pauli_of_weight(5, 1, &mut |e| {
            let inst = LsnInstance::from_parts(
                code.clone(),
                e,
                &BitVector::from_bits(&secret),
                NoiseSpec::truncated_depolarizing(0.1, 1),
                InstanceForm::Symbolic,
            )
            .unwrap();
            let out = decode_syndrome_ml(&inst.view(), 1).unwrap();
            assert_eq!(
                out.candidate.as_deref_bits(),
                Some(secret.to_vec()),
                "error {e}, secret {secret:?}"
            );
            cases += 1;
            true
        });
    }
    c.check(cases == 30, "expected 15 errors x 2 secrets");
    c.finish(format!("{cases}/30 (error, secret) cases recovered exactly"));
}

trait BitsView {
    fn as_deref_bits(&self) -> Option<Vec<bool>>;
}

impl BitsView for Option<BitVector> {
    fn as_deref_bits(&self) -> Option<Vec<bool>> {
        self.as_ref().map(|b| b.to_bits())
    }
}

#[test]
fn criterion_3_pgm_perfection_on_orthogonal_ensembles() {
    let c = Criterion::new("3 pgm on orthogonal ensembles", Duration::from_secs(120));
    let code = StabilizerCode::five_qubit();
    let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
    let trials = 1000u32;
    let mut rng: ChaCha8Rng = derive_rng(7, 3, 0);
    let mut hits = 0u32;
    for _ in 0..trials {
        let secret = BitVector::random(1, &mut rng);
        let error = noise.sample_error(5, &mut rng).unwrap();
        let inst =
            LsnInstance::from_parts(code.clone(), &error, &secret, noise, InstanceForm::Symbolic)
                .unwrap();
        let out = decode_pgm(&inst.view(), Some(1), &mut rng).unwrap();
        if out.candidate.as_ref() == Some(&secret) {
            hits += 1;
        }
    }
    let rate = hits as f64 / trials as f64;
    c.check(
        rate >= 1.0 - 1e-6,
        &format!("success probability {rate} below 1 - 1e-6"),
    );

    // worst-case-error inequality on random three-state qubit ensembles
    let mut worst_slack: f64 = f64::INFINITY;
    for _ in 0..100 {
        let states: Vec<DensityMatrix> = (0..3)
            .map(|_| {
                let mut a = CMatrix::zeros(2, 2);
                for v in a.data.iter_mut() {
                    *v = num_complex::Complex64::new(
                        rng.gen::<f64>() - 0.5,
                        rng.gen::<f64>() - 0.5,
                    );
                }
                let h = a.mul(&a.dagger());
                let t = h.trace().re;
                DensityMatrix::from_matrix(1, h.scale(num_complex::Complex64::new(1.0 / t, 0.0)))
                    .unwrap()
            })
            .collect();
        let povm = pgm(&states).unwrap();
        let mut worst_err: f64 = 0.0;
        for (i, s) in states.iter().enumerate() {
            let probs = povm.outcome_probabilities(s).unwrap();
            worst_err = worst_err.max(1.0 - probs[i]);
        }
        let mut bound = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    bound += fidelity(&states[i], &states[j]).unwrap().max(0.0).sqrt();
                }
            }
        }
        let slack = bound - worst_err;
        worst_slack = worst_slack.min(slack);
        c.check(
            worst_err <= bound + 1e-7,
            &format!("pgm error {worst_err} exceeds fidelity bound {bound}"),
        );
    }
    c.finish(format!(
        "success rate {rate}; error inequality held on 100 ensembles (min slack {worst_slack:.3e})"
    ));
}

#[test]
fn criterion_4_knill_laflamme_fidelity_chain() {
    let c = Criterion::new("4 knill-laflamme/fidelity chain", Duration::from_secs(60));
    let code = StabilizerCode::five_qubit();
    let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
    let (q0, q1) = purified_instance_states(&code, &noise).unwrap();
    let f = fidelity(&q0, &q1).unwrap();
    c.check(
        (f - 1.0).abs() < 1e-9,
        &format!("purified-state fidelity {f} differs from 1"),
    );

    // symbolic anticommutation certificate vs dense inner products for
    // every weight <= 1 error pair and both ordered secret pairs
    let mut errors = Vec::new();
    for_each_pauli_up_to_weight(5, 1, &mut |e| {
        errors.push(e.clone());
        true
    });
    assert_eq!(errors.len(), 16);
    let psi: Vec<StateVector> = (0..2)
        .map(|x| encode_basis(&code, &BitVector::from_bits(&[x == 1])).unwrap())
        .collect();
    let mut combos = 0u32;
    for (x, y) in [(0usize, 1usize), (1, 0)] {
        for ea in &errors {
            for eb in &errors {
                let product = ea.inverse().multiply(eb).unwrap();
                // symbolic certificate: either a generator anticommutes, or
                // the product is a stabilizer element (x != y then kills it)
                let detectable = !code.in_normalizer(&product);
                let in_group = code.contains_unsigned(&product);
                c.check(
                    detectable || in_group,
                    &format!("product {product} is an undetected logical at weight <= 2"),
                );
                let dense = psi[x].inner(&apply_pauli(&apply_pauli(&psi[y], eb), &ea.inverse()));
                c.check(
                    dense.norm() < 1e-9,
                    &format!("<psi_{x}| Ea^dag Eb |psi_{y}> = {dense} for {ea}, {eb}"),
                );
                combos += 1;
            }
        }
    }
    c.finish(format!(
        "F(Q0, Q1) = {f:.12}; certificate and dense overlap agree on {combos} combinations"
    ));
}

#[test]
fn criterion_5_uniformity_of_random_codes() {
    let c = Criterion::new("5 uniformity of random codes", Duration::from_secs(10));
    let mut rng: ChaCha8Rng = derive_rng(11, 5, 0);
    let draws = 30_000u32;
    let mut counts: std::collections::HashMap<String, u64> = Default::default();
    for _ in 0..draws {
        let code = StabilizerCode::random(2, 1, &mut rng).unwrap();
        *counts.entry(code.group_key().unwrap()).or_insert(0) += 1;
    }
    c.check(
        counts.len() == 30,
        &format!("saw {} distinct groups, expected 30", counts.len()),
    );
    let observed: Vec<u64> = counts.values().copied().collect();
    let (stat_codes, p_codes) = stats::uniformity_pvalue(&observed);
    c.check(
        p_codes > 0.001,
        &format!("group chi-square {stat_codes:.1}, p = {p_codes:.5}"),
    );

    let mut clifford_counts: std::collections::HashMap<String, u64> = Default::default();
    for _ in 0..48_000 {
        let t = sample_uniform_clifford(1, &mut rng);
        let key = format!("{}|{}", t.x_image(0), t.z_image(0));
        *clifford_counts.entry(key).or_insert(0) += 1;
    }
    c.check(
        clifford_counts.len() == 24,
        &format!("saw {} single-qubit tableaux, expected 24", clifford_counts.len()),
    );
    let observed: Vec<u64> = clifford_counts.values().copied().collect();
    let (stat_cliff, p_cliff) = stats::uniformity_pvalue(&observed);
    c.check(
        p_cliff > 0.001,
        &format!("clifford chi-square {stat_cliff:.1}, p = {p_cliff:.5}"),
    );
    c.finish(format!(
        "30 groups (chi2 {stat_codes:.1}, p {p_codes:.3}); 24 single-qubit tableaux (chi2 {stat_cliff:.1}, p {p_cliff:.3})"
    ));
}

#[test]
fn criterion_6_rerandomization_lemmas() {
    let c = Criterion::new("6 re-randomization lemmas", Duration::from_secs(30));
    let mut rng: ChaCha8Rng = derive_rng(13, 6, 0);

    // (a) shifted secret uniform over {0,1}^3
    let base = WorstCaseInstance::new(
        StabilizerCode::random(5, 3, &mut rng).unwrap(),
        PauliOperator::identity(5),
        BitVector::from_bits(&[true, true, false]),
        0,
    )
    .unwrap();
    let mut counts = [0u64; 8];
    for _ in 0..16_000 {
        let (shifted, _) = rerandomize_secret(&base, &mut rng);
        let s = &shifted.secret;
        counts[(s.get(0) as usize) << 2 | (s.get(1) as usize) << 1 | s.get(2) as usize] += 1;
    }
    let (stat_a, p_a) = stats::uniformity_pvalue(&counts);
    c.check(p_a > 0.001, &format!("secret shift chi2 {stat_a:.1}, p {p_a:.5}"));

    // (b) twirl preserves the error weight
    let mut weight_ok = true;
    for _ in 0..10_000 {
        let n = 5;
        let w = rng.gen_range(0..=3usize);
        let inst = WorstCaseInstance::new(
            StabilizerCode::random(n, 1, &mut rng).unwrap(),
            random_pauli_of_weight(n, w, &mut rng).unwrap(),
            BitVector::zeros(1),
            w,
        )
        .unwrap();
        weight_ok &= twirl_code_error(&inst, &mut rng).error.weight() == w;
    }
    c.check(weight_ok, "twirl changed an error weight");

    // (c) twirled weight-1 marginal uniform over the 12 cells at n = 4
    let inst = WorstCaseInstance::new(
        StabilizerCode::random(4, 1, &mut rng).unwrap(),
        PauliOperator::parse("XIII").unwrap(),
        BitVector::zeros(1),
        1,
    )
    .unwrap();
    let mut marg: std::collections::HashMap<String, u64> = Default::default();
    for _ in 0..24_000 {
        *marg
            .entry(twirl_code_error(&inst, &mut rng).error.to_string())
            .or_insert(0) += 1;
    }
    c.check(marg.len() == 12, &format!("{} marginal cells", marg.len()));
    let observed: Vec<u64> = marg.values().copied().collect();
    let (stat_c, p_c) = stats::uniformity_pvalue(&observed);
    c.check(p_c > 0.001, &format!("marginal chi2 {stat_c:.1}, p {p_c:.5}"));

    // (d) end-to-end reduction with the exact solver on a distance-3 code
    let trials = 1000u64;
    let mut recoveries = 0u64;
    for trial in 0..trials {
        let error = random_pauli_of_weight(5, 1, &mut rng).unwrap();
        let secret = BitVector::from_bits(&[trial % 2 == 0]);
        let inst = WorstCaseInstance::new(
            StabilizerCode::five_qubit(),
            error,
            secret.clone(),
            1,
        )
        .unwrap();
        let mut solver = |view: &LsnView<'_>, _rng: &mut ChaCha8Rng| {
            decode_syndrome_ml(view, 1).ok().and_then(|r| r.candidate)
        };
        if worst_to_average(&inst, &mut solver, &mut rng).unwrap() == Some(secret) {
            recoveries += 1;
        }
    }
    let rate = recoveries as f64 / trials as f64;
    c.check(rate >= 0.99, &format!("recovery rate {rate}"));
    c.finish(format!(
        "shift p {p_a:.3}; weights preserved; marginal p {p_c:.3}; reduction recovery {rate:.3}"
    ));
}

#[test]
fn criterion_7_lpn_bridge() {
    let c = Criterion::new("7 lpn bridge", Duration::from_secs(10));
    // full-column-rank frequency against the derived product formula
    let report = lpn_bridge_trials(8, 2, 0.25, 3, 20_000, 17).unwrap();
    let expected = full_column_rank_probability(8, 2);
    c.check(
        (expected - 0.9883).abs() < 1e-4,
        &format!("formula value {expected}"),
    );
    let sigma = (expected * (1.0 - expected) / report.trials as f64).sqrt();
    c.check(
        (report.full_rank_rate - expected).abs() <= 3.0 * sigma,
        &format!(
            "full-rank rate {:.5} vs {expected:.5} (3 sigma {:.5})",
            report.full_rank_rate,
            3.0 * sigma
        ),
    );
    // bit-flip marginals at p = 0.25
    let bits_sigma = (0.25 * 0.75 / (report.trials * 8) as f64).sqrt();
    c.check(
        (report.error_bit_frequency - 0.25).abs() <= 3.0 * bits_sigma,
        &format!("error bit frequency {:.5}", report.error_bit_frequency),
    );
    // noiseless round trip decodes every produced instance
    let clean = lpn_bridge_trials(10, 3, 0.0, 0, 1000, 19).unwrap();
    c.check(
        clean.decoded > 0 && clean.recovery_rate == 1.0,
        &format!("noiseless recovery rate {}", clean.recovery_rate),
    );
    c.finish(format!(
        "full-rank {:.5} vs {expected:.5}; error-bit freq {:.5}; p=0 recovery {:.3}",
        report.full_rank_rate, report.error_bit_frequency, clean.recovery_rate
    ));
}

#[test]
fn criterion_8_engine_cross_validation() {
    let c = Criterion::new("8 engine cross-validation", Duration::from_secs(30));
    let mut rng: ChaCha8Rng = derive_rng(23, 8, 0);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let n = rng.gen_range(1..=6usize);
        let gates: Vec<CliffordGate> = (0..rng.gen_range(5..40))
            .map(|_| {
                let q = rng.gen_range(0..n);
                if n == 1 {
                    match rng.gen_range(0..4) {
                        0 => CliffordGate::H(q),
                        1 => CliffordGate::S(q),
                        2 => CliffordGate::X(q),
                        _ => CliffordGate::Z(q),
                    }
                } else {
                    let mut r = rng.gen_range(0..n - 1);
                    if r >= q {
                        r += 1;
                    }
                    match rng.gen_range(0..7) {
                        0 => CliffordGate::H(q),
                        1 => CliffordGate::S(q),
                        2 => CliffordGate::X(q),
                        3 => CliffordGate::Z(q),
                        4 => CliffordGate::Cnot(q, r),
                        5 => CliffordGate::Cz(q, r),
                        _ => CliffordGate::Swap(q, r),
                    }
                }
            })
            .collect();
        let circuit = CliffordCircuit::new(n, gates).unwrap();
        let tableau = circuit.tableau();
        let mut p = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
        p.set_phase_exp(if rng.gen::<bool>() { 2 } else { 0 });
        let image = tableau.conjugate(&p);
        let basis = BitVector::random(n, &mut rng);
        let v = StateVector::basis(n, &basis).unwrap();
        // U P |v> against P' U |v> amplitude by amplitude
        let lhs = apply_circuit(&apply_pauli(&v, &p), &circuit).unwrap();
        let rhs = apply_pauli(&apply_circuit(&v, &circuit).unwrap(), &image);
        let dist = lhs.max_amplitude_distance(&rhs);
        worst = worst.max(dist);
        c.check(
            dist < 1e-9,
            &format!("amplitude deviation {dist} on an n={n} circuit"),
        );
    }
    c.finish(format!(
        "1000 random (circuit, Pauli, basis state) triples agree; worst deviation {worst:.3e}"
    ));
}
