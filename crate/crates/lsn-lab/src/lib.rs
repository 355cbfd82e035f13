//! Learning-stabilizers-with-noise laboratory.
//!
//! End-to-end tooling for decoding random stabilizer codes under local
//! Pauli noise: bit-packed GF(2) linear algebra, signed Pauli and Clifford
//! tableau algebra, stabilizer-code synthesis, noise channels, a dense
//! statevector/density-matrix oracle, instance samplers with sealed
//! witnesses, three decoders plus a multi-shot variant, classical
//! parity-learning bridges, the worst-to-average re-randomization
//! pipeline, and a seeded Monte-Carlo experiment harness.
//!
//! Start with the runnable examples (`cargo run --example sample_and_decode`)
//! or the `lsn-lab` CLI.

pub mod clifford;
pub mod code;
pub mod decoder;
pub mod dense;
pub mod error;
pub mod gf2;
pub mod harness;
pub mod instance;
pub mod noise;
pub mod pauli;
pub mod reduction;
pub mod stats;

pub use clifford::{
    permutation_circuit, sample_plc, sample_uniform_clifford, single_qubit_cliffords,
    synthesize_circuit, tableau_from_circuit, CliffordCircuit, CliffordGate, CliffordTableau,
    Permutation,
};
pub use code::{gv_bound, synthesize_encoder, PauliDecomposition, StabilizerCode};
pub use decoder::{
    decode_pgm, decode_pgm_multishot, decode_projection, decode_syndrome_ml, default_truncation,
    DecoderKind, DecoderOutcome, DecoderResult,
};
pub use dense::{
    apply_circuit, apply_pauli, eigh, encode_basis, fidelity, measure, mix_ensemble,
    noisy_codeword_density, pgm, purified_instance_states, sample_basis_measurement,
    trace_distance, CMatrix, DensityMatrix, PovmSet, StateVector,
};
pub use error::{Error, Result};
pub use gf2::{BitMatrix, BitVector};
pub use harness::{
    commitment_demo, derive_rng, gv_validate, lpn_bridge_trials, reduce_trials, run_sweep,
    CommitReport, ExperimentConfig, GridPoint, GvReport, LpnBridgeReport, ReduceReport,
    SweepReport, SweepRow,
};
pub use instance::{
    block_gather_permutation, full_column_rank_probability, lpn_to_lsn, lpn_to_mslsn, mslsn_to_lsn,
    sample_lpn,
    sample_lsn, sample_mslsn, InstanceForm, LpnInstance, LpnWitness, LsnInstance, LsnView,
    MslsnInstance, MslsnWitness, Witness,
};
pub use noise::{binomial_cdf, tail_bound, NoiseKind, NoiseSpec};
pub use pauli::{
    for_each_pauli_of_weight, for_each_pauli_up_to_weight, pauli_count_of_weight,
    pauli_count_up_to_weight, random_pauli_of_weight, PauliLetter, PauliOperator,
};
pub use reduction::{
    orbit_statistics, rerandomize_secret, twirl_code_error, worst_to_average,
    worst_to_average_with, OrbitReport, WorstCaseInstance,
};
