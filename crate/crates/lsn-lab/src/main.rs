//! Command-line front end: every subcommand is a thin wrapper over the
//! library. Exit codes: 0 success, 2 configuration error, 3 guard
//! violation.

use clap::{Parser, Subcommand};
use lsn_lab::{
    commitment_demo, decode_pgm, decode_pgm_multishot, decode_projection, decode_syndrome_ml,
    derive_rng, gv_validate, lpn_bridge_trials, reduce_trials, run_sweep, sample_lsn,
    sample_mslsn, DecoderKind, Error, ExperimentConfig, InstanceForm, LsnInstance, MslsnInstance,
    NoiseSpec, StabilizerCode, WorstCaseInstance,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "lsn-lab",
    version,
    about = "Decoding random stabilizer codes under local Pauli noise"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct NoiseArgs {
    /// Noise channel: depolarizing | bitflip | truncated-depolarizing
    #[arg(long, default_value = "depolarizing")]
    noise: String,
    /// Noise rate
    #[arg(long, short)]
    p: f64,
    /// Weight cutoff (truncated depolarizing only)
    #[arg(long)]
    w_cut: Option<usize>,
}

impl NoiseArgs {
    fn spec(&self) -> Result<NoiseSpec, Error> {
        match self.noise.as_str() {
            "depolarizing" => Ok(NoiseSpec::depolarizing(self.p)),
            "bitflip" => Ok(NoiseSpec::bitflip(self.p)),
            "truncated-depolarizing" | "truncated_depolarizing" => {
                let w = self.w_cut.ok_or_else(|| {
                    Error::InvalidParameter("truncated depolarizing needs --w-cut".into())
                })?;
                Ok(NoiseSpec::truncated_depolarizing(self.p, w))
            }
            other => Err(Error::InvalidParameter(format!(
                "unknown noise kind {other:?}"
            ))),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Sample a (multi-shot) decoding instance and write it as JSON
    SampleInstance {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        /// Number of samples; m > 1 produces a multi-shot instance
        #[arg(long, default_value_t = 1)]
        m: usize,
        #[command(flatten)]
        noise: NoiseArgs,
        /// Payload form: symbolic | dense
        #[arg(long, default_value = "symbolic")]
        form: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Drop the sealed witness section from the file
        #[arg(long)]
        strip_witness: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a decoder against an instance file
    Decode {
        /// Instance JSON produced by sample-instance
        #[arg(long)]
        instance: PathBuf,
        /// projection | syndrome-ml | pgm | pgm-multishot
        #[arg(long)]
        decoder: DecoderKind,
        /// Weight bound for the syndrome search
        #[arg(long)]
        w_max: Option<usize>,
        /// Truncation weight for the pretty good measurement
        #[arg(long)]
        w_cut: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a seeded Monte-Carlo sweep described by a JSON config
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Override the config's output path
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the config's thread count
        #[arg(long)]
        threads: Option<usize>,
        /// Override the config's master seed
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's trial count
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Empirical distance/non-degeneracy fractions of random codes against
    /// the Gilbert-Varshamov bound
    GvCheck {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 200)]
        codes: u64,
        /// Optional noise rate for the threshold expression in the report
        #[arg(long)]
        p: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Worst-case to average-case reduction trials on a worst-case
    /// instance file
    Reduce {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "syndrome-ml")]
        decoder: DecoderKind,
        #[arg(long)]
        w_max: Option<usize>,
        #[arg(long)]
        w_cut: Option<usize>,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parity-learning round trip: sample, bridge, decode
    LpnBridge {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, short)]
        p: f64,
        #[arg(long, default_value_t = 2)]
        w_max: usize,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Commitment-hiding demo: distinguishability of the two commitment
    /// register states next to the analytic bound
    CommitDemo {
        #[arg(long, default_value_t = 5)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, short)]
        p: f64,
        #[arg(long)]
        w_cut: Option<usize>,
        /// Use the five-qubit code instead of a random one
        #[arg(long)]
        five_qubit: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => println!("{text}"),
    }
    Ok(())
}

fn emit_json<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), Error> {
    emit(out, &serde_json::to_string_pretty(value)?)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::SampleInstance {
            n,
            k,
            m,
            noise,
            form,
            seed,
            strip_witness,
            out,
        } => {
            let spec = noise.spec()?;
            let form = match form.as_str() {
                "symbolic" => InstanceForm::Symbolic,
                "dense" => InstanceForm::Dense,
                other => {
                    return Err(Error::InvalidParameter(format!(
                        "unknown form {other:?}"
                    )))
                }
            };
            let mut rng = derive_rng(seed, 0, 0);
            if m <= 1 {
                let mut inst = sample_lsn(n, k, spec, &mut rng, form)?;
                if strip_witness {
                    inst.strip_witness();
                }
                emit_json(&out, &inst)?;
            } else {
                let mut inst = sample_mslsn(m, n, k, spec, &mut rng, form)?;
                if strip_witness {
                    inst.strip_witness();
                }
                emit_json(&out, &inst)?;
            }
        }
        Command::Decode {
            instance,
            decoder,
            w_max,
            w_cut,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&instance)?;
            let mut rng = derive_rng(seed, 0, 0);
            if decoder == DecoderKind::PgmMultishot {
                let inst: MslsnInstance = serde_json::from_str(&text)?;
                let result = decode_pgm_multishot(&inst, w_cut, &mut rng)?;
                report_decode(&out, &result, inst.witness().map(|w| &w.secret))?;
            } else {
                let inst: LsnInstance = serde_json::from_str(&text)?;
                let view = inst.view();
                let result = match decoder {
                    DecoderKind::Projection => decode_projection(&view, &mut rng)?,
                    DecoderKind::SyndromeMl => {
                        let w_max = w_max.ok_or_else(|| {
                            Error::InvalidParameter("syndrome-ml needs --w-max".into())
                        })?;
                        decode_syndrome_ml(&view, w_max)?
                    }
                    DecoderKind::Pgm => decode_pgm(&view, w_cut, &mut rng)?,
                    DecoderKind::PgmMultishot => unreachable!(),
                };
                report_decode(&out, &result, inst.witness().map(|w| &w.secret))?;
            }
        }
        Command::Sweep {
            config,
            out,
            threads,
            seed,
            trials,
        } => {
            let text = std::fs::read_to_string(&config)?;
            let mut cfg = ExperimentConfig::from_json(&text)?;
            if let Some(t) = threads {
                cfg.threads = t;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(t) = trials {
                cfg.trials = t;
            }
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            let report = run_sweep(&cfg)?;
            let csv = report.to_csv();
            match &cfg.out {
                Some(path) => {
                    std::fs::write(path, &csv)?;
                    eprintln!("wrote {} rows to {}", report.rows.len(), path.display());
                }
                None => print!("{csv}"),
            }
            for row in &report.rows {
                eprintln!(
                    "point {}: {}/{} decoded ({:.4}), mean decode time {:?}{}",
                    row.point,
                    row.successes,
                    row.trials,
                    row.success_rate,
                    row.mean_wall,
                    row.skipped
                        .as_deref()
                        .map(|s| format!(" [skipped: {s}]"))
                        .unwrap_or_default()
                );
            }
        }
        Command::GvCheck {
            n,
            k,
            d,
            codes,
            p,
            seed,
            out,
        } => {
            let report = gv_validate(n, k, d, codes, p, seed)?;
            emit_json(&out, &report)?;
        }
        Command::Reduce {
            instance,
            decoder,
            w_max,
            w_cut,
            trials,
            seed,
            out,
        } => {
            let text = std::fs::read_to_string(&instance)?;
            let inst: WorstCaseInstance = serde_json::from_str(&text)?;
            let report = reduce_trials(&inst, decoder, w_max, w_cut, trials, seed)?;
            emit_json(&out, &report)?;
        }
        Command::LpnBridge {
            n,
            k,
            p,
            w_max,
            trials,
            seed,
            out,
        } => {
            let report = lpn_bridge_trials(n, k, p, w_max, trials, seed)?;
            emit_json(&out, &report)?;
        }
        Command::CommitDemo {
            n,
            k,
            p,
            w_cut,
            five_qubit,
            seed,
            out,
        } => {
            let code = if five_qubit {
                StabilizerCode::five_qubit()
            } else {
                let mut rng = derive_rng(seed, 0, 0);
                StabilizerCode::random(n, k, &mut rng)?
            };
            let report = commitment_demo(&code, p, w_cut, 4)?;
            emit_json(&out, &report)?;
        }
    }
    Ok(())
}

#[derive(serde::Serialize)]
struct DecodeReport<'a> {
    #[serde(flatten)]
    result: &'a lsn_lab::DecoderResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_match: Option<bool>,
}

fn report_decode(
    out: &Option<PathBuf>,
    result: &lsn_lab::DecoderResult,
    truth: Option<&lsn_lab::BitVector>,
) -> Result<(), Error> {
    let witness_match = truth.map(|t| result.candidate.as_ref() == Some(t));
    emit_json(
        out,
        &DecodeReport {
            result,
            witness_match,
        },
    )
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
