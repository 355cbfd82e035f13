//! Seeded Monte-Carlo experiment runner and report/file I/O.
//!
//! Per-trial RNG streams are derived counter-style from
//! `(master seed, point index, trial index)`, so results are byte-identical
//! regardless of thread count or scheduling. Sweep CSVs contain only
//! deterministic columns; wall-clock timings live in the report structs
//! and the human-readable summaries.

use crate::code::{gv_bound, StabilizerCode};
use crate::decoder::{
    decode_pgm, decode_pgm_multishot, decode_projection, decode_syndrome_ml, DecoderKind,
    DecoderOutcome,
};
use crate::dense::{fidelity, purified_instance_states, trace_distance};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::instance::{sample_lsn, sample_mslsn, InstanceForm, LsnInstance, LsnView};
use crate::noise::{NoiseKind, NoiseSpec};
use crate::reduction::{worst_to_average, WorstCaseInstance};
use crate::stats::wilson_interval;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;
use std::time::Duration;

/// Counter-mode RNG derivation: one independent stream per
/// `(seed, point, trial)` triple.
pub fn derive_rng(master_seed: u64, point: u64, trial: u64) -> ChaCha8Rng {
    let mut seed = [0u8; 32];
    seed[0..8].copy_from_slice(&master_seed.to_le_bytes());
    seed[8..16].copy_from_slice(&point.to_le_bytes());
    seed[16..24].copy_from_slice(&trial.to_le_bytes());
    seed[24..32].copy_from_slice(&0x6c61_622d_7374_7231u64.to_le_bytes());
    ChaCha8Rng::from_seed(seed)
}

fn default_m() -> usize {
    1
}

fn default_threads() -> usize {
    1
}

/// One grid point of a sweep: problem sizes, the noise channel, decoder
/// parameters, and optionally a pinned code instead of fresh random codes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridPoint {
    pub n: usize,
    pub k: usize,
    #[serde(default = "default_m")]
    pub m: usize,
    pub noise: NoiseSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_cut: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub code: Option<StabilizerCode>,
}

/// Sweep configuration; identical config + seed reproduces the CSV
/// byte-for-byte.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: String,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub points: Vec<GridPoint>,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        if cfg.experiment != "sweep" {
            return Err(Error::InvalidParameter(format!(
                "unknown experiment kind {:?}",
                cfg.experiment
            )));
        }
        Ok(cfg)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub point: usize,
    pub n: usize,
    pub k: usize,
    pub m: usize,
    pub noise_kind: NoiseKind,
    pub p: f64,
    pub w_cut: Option<usize>,
    pub w_max: Option<usize>,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// Mean decode wall time; reported in summaries, never in the CSV.
    #[serde(skip)]
    pub mean_wall: Duration,
    pub skipped: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub decoder: DecoderKind,
    pub seed: u64,
    pub trials: u64,
    pub rows: Vec<SweepRow>,
}

impl SweepReport {
    /// Fixed, versioned column layout; every field is deterministic under
    /// the seed.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str("# lsn-lab sweep csv v1\n");
        out.push_str(&format!(
            "# decoder={} seed={} trials={}\n",
            self.decoder, self.seed, self.trials
        ));
        out.push_str(
            "point,n,k,m,noise,p,w_cut,w_max,trials,successes,success_rate,wilson_low,wilson_high,flag\n",
        );
        for r in &self.rows {
            let opt = |v: &Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
            let kind = match r.noise_kind {
                NoiseKind::Depolarizing => "depolarizing",
                NoiseKind::Bitflip => "bitflip",
                NoiseKind::TruncatedDepolarizing => "truncated_depolarizing",
            };
            out.push_str(&format!(
                "{},{},{},{},{},{:.6},{},{},{},{},{:.6},{:.6},{:.6},{}\n",
                r.point,
                r.n,
                r.k,
                r.m,
                kind,
                r.p,
                opt(&r.w_cut),
                opt(&r.w_max),
                r.trials,
                r.successes,
                r.success_rate,
                r.wilson_low,
                r.wilson_high,
                r.skipped.clone().unwrap_or_default(),
            ));
        }
        out
    }
}

fn decode_single_trial(
    cfg: &ExperimentConfig,
    point: &GridPoint,
    point_idx: usize,
    trial: u64,
) -> Result<(bool, Duration)> {
    let mut rng = derive_rng(cfg.seed, point_idx as u64, trial);
    match cfg.decoder {
        DecoderKind::PgmMultishot => {
            let inst = sample_mslsn(
                point.m,
                point.n,
                point.k,
                point.noise,
                &mut rng,
                InstanceForm::Symbolic,
            )?;
            let result = decode_pgm_multishot(&inst, point.w_cut, &mut rng)?;
            let hit = result.outcome == DecoderOutcome::Decoded
                && result.candidate.as_ref() == Some(&inst.witness().unwrap().secret);
            Ok((hit, result.wall))
        }
        kind => {
            let inst = match &point.code {
                Some(code) => {
                    let secret = BitVector::random(code.k(), &mut rng);
                    let error = point.noise.sample_error(code.n(), &mut rng)?;
                    LsnInstance::from_parts(
                        code.clone(),
                        &error,
                        &secret,
                        point.noise,
                        InstanceForm::Symbolic,
                    )?
                }
                None => sample_lsn(
                    point.n,
                    point.k,
                    point.noise,
                    &mut rng,
                    InstanceForm::Symbolic,
                )?,
            };
            let view = inst.view();
            let result = match kind {
                DecoderKind::Projection => decode_projection(&view, &mut rng)?,
                DecoderKind::SyndromeMl => {
                    let w_max = point.w_max.ok_or_else(|| {
                        Error::InvalidParameter(
                            "syndrome-ml sweep points need w_max".into(),
                        )
                    })?;
                    decode_syndrome_ml(&view, w_max)?
                }
                DecoderKind::Pgm => decode_pgm(&view, point.w_cut, &mut rng)?,
                DecoderKind::PgmMultishot => unreachable!(),
            };
            let hit = result.outcome == DecoderOutcome::Decoded
                && result.candidate.as_ref() == Some(&inst.witness().unwrap().secret);
            Ok((hit, result.wall))
        }
    }
}

/// Runs every grid point: sample, decode, score against the sealed
/// witness, aggregate. Guard violations skip the point and flag the row;
/// configuration errors abort the sweep.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepReport> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let mut rows = Vec::new();
    for (point_idx, point) in cfg.points.iter().enumerate() {
        if cfg.trials == 0 {
            continue;
        }
        point.noise.validate(point.n)?;
        // pre-flight: a guard violation flags and skips the whole point
        let mut skipped = None;
        if let Err(e) = decode_single_trial(cfg, point, point_idx, 0) {
            match e {
                Error::GuardExceeded { .. } => skipped = Some(e.to_string()),
                other => return Err(other),
            }
        }
        if let Some(flag) = skipped {
            rows.push(SweepRow {
                point: point_idx,
                n: point.n,
                k: point.k,
                m: point.m,
                noise_kind: point.noise.kind,
                p: point.noise.p,
                w_cut: point.w_cut.or(point.noise.w_cut),
                w_max: point.w_max,
                trials: 0,
                successes: 0,
                success_rate: 0.0,
                wilson_low: 0.0,
                wilson_high: 1.0,
                mean_wall: Duration::ZERO,
                skipped: Some(flag),
            });
            continue;
        }
        let outcomes: Vec<(bool, Duration)> = pool.install(|| {
            (0..cfg.trials)
                .into_par_iter()
                .map(|trial| decode_single_trial(cfg, point, point_idx, trial))
                .collect::<Result<Vec<_>>>()
        })?;
        let successes = outcomes.iter().filter(|(hit, _)| *hit).count() as u64;
        let total_wall: Duration = outcomes.iter().map(|(_, w)| *w).sum();
        let (lo, hi) = wilson_interval(successes, cfg.trials);
        rows.push(SweepRow {
            point: point_idx,
            n: point.n,
            k: point.k,
            m: point.m,
            noise_kind: point.noise.kind,
            p: point.noise.p,
            w_cut: point.w_cut.or(point.noise.w_cut),
            w_max: point.w_max,
            trials: cfg.trials,
            successes,
            success_rate: successes as f64 / cfg.trials as f64,
            wilson_low: lo,
            wilson_high: hi,
            mean_wall: total_wall / cfg.trials.max(1) as u32,
            skipped: None,
        });
    }
    Ok(SweepReport {
        decoder: cfg.decoder,
        seed: cfg.seed,
        trials: cfg.trials,
        rows,
    })
}

// ---------------------------------------------------------------------------
// Gilbert-Varshamov validation
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct GvReport {
    pub n: usize,
    pub k: usize,
    pub d: usize,
    pub codes: u64,
    pub good_codes: u64,
    pub fraction: f64,
    pub gv_bound: f64,
    pub bound_is_vacuous: bool,
    /// `H(3p) + 3 log2(3) p + k/n` for the requested noise rate; decoding
    /// is information-theoretically impossible once this exceeds 1.
    pub threshold_expression: Option<f64>,
}

/// Fraction of random codes with distance at least `d` and non-degenerate
/// correctability at weight `floor((d-1)/2)`, against the analytic bound
/// (reported even when vacuous).
pub fn gv_validate(
    n: usize,
    k: usize,
    d: usize,
    codes: u64,
    p_for_threshold: Option<f64>,
    seed: u64,
) -> Result<GvReport> {
    if d == 0 || d > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= d <= n, got d={d}"
        )));
    }
    let t = (d - 1) / 2;
    let mut good = 0u64;
    for trial in 0..codes {
        let mut rng = derive_rng(seed, 0, trial);
        let code = StabilizerCode::random(n, k, &mut rng)?;
        let distance_ok = d == 1 || code.distance_exact(d - 1)?.is_none();
        if distance_ok && code.knill_laflamme_ok(t)? {
            good += 1;
        }
    }
    let bound = gv_bound(n, k, d);
    let threshold_expression = p_for_threshold.map(|p| {
        crate::code::binary_entropy(3.0 * p) + 3.0 * 3f64.log2() * p + k as f64 / n as f64
    });
    Ok(GvReport {
        n,
        k,
        d,
        codes,
        good_codes: good,
        fraction: if codes == 0 {
            1.0
        } else {
            good as f64 / codes as f64
        },
        gv_bound: bound,
        bound_is_vacuous: bound <= 0.0,
        threshold_expression,
    })
}

// ---------------------------------------------------------------------------
// Commitment-hiding demo
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct CommitSide {
    pub noise: NoiseSpec,
    pub trace_distance: f64,
    pub fidelity: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommitReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    /// `2 exp(-np/48)`: the analytic cap on the distinguishing advantage.
    pub hiding_bound: f64,
    pub certified_distance: Option<usize>,
    /// Full depolarizing channel, when the support fits the dense guard.
    pub full: Option<CommitSide>,
    /// Truncated channel at `w_cut = floor((d-1)/2)` (or the override).
    pub truncated: Option<CommitSide>,
}

/// Numerical hiding check: distinguishability of the two commitment
/// register states, next to the analytic bound.
pub fn commitment_demo(
    code: &StabilizerCode,
    p: f64,
    w_cut_override: Option<usize>,
    distance_search_cap: usize,
) -> Result<CommitReport> {
    let n = code.n();
    let k = code.k();
    let hiding_bound = 2.0 * (-(n as f64) * p / 48.0).exp();
    let side = |noise: NoiseSpec| -> Result<CommitSide> {
        let (q0, q1) = purified_instance_states(code, &noise)?;
        Ok(CommitSide {
            noise,
            trace_distance: trace_distance(&q0, &q1)?,
            fidelity: fidelity(&q0, &q1)?,
        })
    };
    let full = match side(NoiseSpec::depolarizing(p)) {
        Ok(s) => Some(s),
        Err(Error::GuardExceeded { .. }) => None,
        Err(e) => return Err(e),
    };
    let certified_distance = code.distance_exact(distance_search_cap.min(n))?;
    let w_cut = w_cut_override.or_else(|| certified_distance.map(|d| (d - 1) / 2));
    let truncated = match w_cut {
        Some(w) if p > 0.0 => match side(NoiseSpec::truncated_depolarizing(p, w.min(n))) {
            Ok(s) => Some(s),
            Err(Error::GuardExceeded { .. }) => None,
            Err(e) => return Err(e),
        },
        _ => None,
    };
    Ok(CommitReport {
        n,
        k,
        p,
        hiding_bound,
        certified_distance,
        full,
        truncated,
    })
}

// ---------------------------------------------------------------------------
// Worst-to-average reduction runner
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct ReduceReport {
    /// The average-case stabilizer distribution depends on the worst-case
    /// input, so these runs are labeled distinctly from standard sweeps.
    pub label: String,
    pub decoder: DecoderKind,
    pub trials: u64,
    pub recoveries: u64,
    pub rate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
}

/// Repeatedly re-randomizes the worst-case instance, solves the packaged
/// average-case sample, and scores the unshifted answer.
pub fn reduce_trials(
    inst: &WorstCaseInstance,
    decoder: DecoderKind,
    w_max: Option<usize>,
    w_cut: Option<usize>,
    trials: u64,
    seed: u64,
) -> Result<ReduceReport> {
    let mut recoveries = 0u64;
    for trial in 0..trials {
        let mut rng = derive_rng(seed, 1, trial);
        let mut solver = |view: &LsnView<'_>, rng: &mut ChaCha8Rng| -> Option<BitVector> {
            let result = match decoder {
                DecoderKind::Projection => decode_projection(view, rng),
                DecoderKind::SyndromeMl => {
                    decode_syndrome_ml(view, w_max.unwrap_or(inst.weight_bound))
                }
                DecoderKind::Pgm => decode_pgm(view, w_cut, rng),
                DecoderKind::PgmMultishot => {
                    return None;
                }
            };
            result.ok().and_then(|r| r.candidate)
        };
        if worst_to_average(inst, &mut solver, &mut rng)? == Some(inst.secret.clone()) {
            recoveries += 1;
        }
    }
    let (lo, hi) = wilson_interval(recoveries, trials);
    Ok(ReduceReport {
        label: "S-relative average case".into(),
        decoder,
        trials,
        recoveries,
        rate: if trials == 0 {
            0.0
        } else {
            recoveries as f64 / trials as f64
        },
        wilson_low: lo,
        wilson_high: hi,
    })
}

// ---------------------------------------------------------------------------
// Parity-learning bridge runner
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, Serialize)]
pub struct LpnBridgeReport {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub trials: u64,
    pub aborts: u64,
    pub full_rank_rate: f64,
    pub expected_full_rank_rate: f64,
    pub decoded: u64,
    pub recoveries: u64,
    pub recovery_rate: f64,
    pub error_bit_frequency: f64,
}

/// Samples parity-learning instances, maps them through the bridge, and
/// decodes the produced quantum instances with the exact syndrome decoder.
pub fn lpn_bridge_trials(
    n: usize,
    k: usize,
    p: f64,
    w_max: usize,
    trials: u64,
    seed: u64,
) -> Result<LpnBridgeReport> {
    let mut aborts = 0u64;
    let mut decoded = 0u64;
    let mut recoveries = 0u64;
    let mut error_bits = 0u64;
    for trial in 0..trials {
        let mut rng = derive_rng(seed, 2, trial);
        let lpn = crate::instance::sample_lpn(n, k, p, &mut rng)?;
        error_bits += lpn.witness().unwrap().e.count_ones() as u64;
        match crate::instance::lpn_to_lsn(&lpn)? {
            None => aborts += 1,
            Some(lsn) => {
                decoded += 1;
                let out = decode_syndrome_ml(&lsn.view(), w_max)?;
                if out.outcome == DecoderOutcome::Decoded
                    && out.candidate.as_ref() == Some(&lpn.witness().unwrap().x)
                {
                    recoveries += 1;
                }
            }
        }
    }
    Ok(LpnBridgeReport {
        n,
        k,
        p,
        trials,
        aborts,
        full_rank_rate: if trials == 0 {
            0.0
        } else {
            (trials - aborts) as f64 / trials as f64
        },
        expected_full_rank_rate: crate::instance::full_column_rank_probability(n, k),
        decoded,
        recoveries,
        recovery_rate: if decoded == 0 {
            0.0
        } else {
            recoveries as f64 / decoded as f64
        },
        error_bit_frequency: error_bits as f64 / (trials * n as u64).max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn projection_config(trials: u64) -> ExperimentConfig {
        ExperimentConfig {
            experiment: "sweep".into(),
            decoder: DecoderKind::Projection,
            trials,
            seed: 11,
            threads: 2,
            out: None,
            points: vec![GridPoint {
                n: 8,
                k: 2,
                m: 1,
                noise: NoiseSpec::depolarizing(1.0 / 8.0),
                w_max: None,
                w_cut: None,
                code: None,
            }],
        }
    }

    #[test]
    fn sweep_is_reproducible_byte_for_byte() {
        let cfg = projection_config(400);
        let a = run_sweep(&cfg).unwrap().to_csv();
        let b = run_sweep(&cfg).unwrap().to_csv();
        assert_eq!(a, b);
        // thread count must not change the bytes either
        let mut cfg_single = cfg.clone();
        cfg_single.threads = 1;
        assert_eq!(run_sweep(&cfg_single).unwrap().to_csv(), a);
    }

    #[test]
    fn zero_trials_give_empty_report() {
        let cfg = projection_config(0);
        let report = run_sweep(&cfg).unwrap();
        assert!(report.rows.is_empty());
        assert_eq!(report.to_csv().lines().count(), 3); // headers only
    }

    #[test]
    fn sweep_row_invariants() {
        let report = run_sweep(&projection_config(500)).unwrap();
        for row in &report.rows {
            assert!(row.successes <= row.trials);
            let rate = row.successes as f64 / row.trials as f64;
            assert!(row.wilson_low <= rate && rate <= row.wilson_high);
        }
    }

    #[test]
    fn sweep_flags_guarded_points() {
        let mut cfg = projection_config(10);
        cfg.decoder = DecoderKind::Pgm;
        cfg.points[0].n = 12; // beyond the pgm qubit guard
        cfg.points[0].k = 1;
        cfg.points[0].noise = NoiseSpec::depolarizing(0.05);
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].skipped.is_some());
        let csv = report.to_csv();
        assert!(csv.contains("guard exceeded"));
    }

    #[test]
    fn sweep_fixed_code_syndrome_ml_is_exact() {
        let cfg = ExperimentConfig {
            experiment: "sweep".into(),
            decoder: DecoderKind::SyndromeMl,
            trials: 500,
            seed: 3,
            threads: 2,
            out: None,
            points: vec![GridPoint {
                n: 5,
                k: 1,
                m: 1,
                noise: NoiseSpec::truncated_depolarizing(0.1, 1),
                w_max: Some(1),
                w_cut: None,
                code: Some(StabilizerCode::five_qubit()),
            }],
        };
        let report = run_sweep(&cfg).unwrap();
        assert_eq!(report.rows[0].successes, 500);
    }

    #[test]
    fn config_json_round_trip() {
        let text = r#"{
            "experiment": "sweep",
            "decoder": "projection",
            "trials": 100,
            "seed": 5,
            "points": [
                {"n": 8, "k": 2, "noise": {"kind": "depolarizing", "p": 0.125}}
            ]
        }"#;
        let cfg = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(cfg.threads, 1);
        assert_eq!(cfg.points[0].m, 1);
        assert!(ExperimentConfig::from_json("{\"experiment\":\"plot\"}").is_err());
    }

    #[test]
    fn gv_validate_conventions() {
        let report = gv_validate(6, 1, 1, 50, Some(0.1), 7).unwrap();
        assert_eq!(report.fraction, 1.0); // every code has distance >= 1
        let expr = report.threshold_expression.unwrap();
        let by_hand = crate::code::binary_entropy(0.3) + 3.0 * 3f64.log2() * 0.1 + 1.0 / 6.0;
        assert!((expr - by_hand).abs() < 1e-12);

        let vac = gv_validate(12, 1, 2, 100, None, 7).unwrap();
        assert!(vac.bound_is_vacuous);
        assert!(vac.fraction >= vac.gv_bound.max(0.0));
    }

    #[test]
    fn commitment_demo_cases() {
        // p = 0: nothing to distinguish
        let code = StabilizerCode::five_qubit();
        let report = commitment_demo(&code, 0.0, None, 3).unwrap();
        let full = report.full.unwrap();
        assert!(full.trace_distance < 1e-9);
        assert!((report.hiding_bound - 2.0).abs() < 1e-12);

        // five-qubit truncated at w_cut = 1: exact-zero distinguishability
        let report = commitment_demo(&code, 0.1, None, 3).unwrap();
        assert_eq!(report.certified_distance, Some(3));
        let truncated = report.truncated.unwrap();
        assert_eq!(truncated.noise.w_cut, Some(1));
        assert!(truncated.trace_distance <= 1e-8, "{}", truncated.trace_distance);
        assert!(report.full.is_none()); // 4^5 support exceeds the dense guard
    }

    #[test]
    fn reduce_trials_perfect_on_distance_three() {
        let inst = WorstCaseInstance::new(
            StabilizerCode::five_qubit(),
            crate::pauli::PauliOperator::parse("IYIII").unwrap(),
            BitVector::from_bits(&[true]),
            1,
        )
        .unwrap();
        let report =
            reduce_trials(&inst, DecoderKind::SyndromeMl, Some(1), None, 200, 13).unwrap();
        assert_eq!(report.recoveries, 200);
        assert_eq!(report.label, "S-relative average case");
    }

    #[test]
    fn lpn_bridge_noiseless_round_trip() {
        let report = lpn_bridge_trials(10, 3, 0.0, 0, 300, 17).unwrap();
        assert_eq!(report.recoveries, report.decoded);
        assert!(report.decoded > 0);
        assert!(report.recovery_rate == 1.0);
    }
}
