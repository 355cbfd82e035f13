//! Instance samplers and serializers for the decoding problems, plus the
//! bridges between them.
//!
//! Decoders never see the hidden `(secret, error)` witness. A symbolic
//! instance stores the noisy codeword as a single frame Pauli `F` relative
//! to the code's fiducial state, so the query surface (`LsnView`) exposes
//! exactly what a physical apparatus would: syndrome extraction and
//! measurements, never the witness itself. The witness rides along in a
//! separable section used only by scoring code and can be stripped from
//! files entirely.

use crate::clifford::{CliffordTableau, Permutation};
use crate::code::StabilizerCode;
use crate::dense::{
    apply_circuit, apply_pauli, encode_basis, sample_basis_measurement, StateVector,
};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::noise::NoiseSpec;
use crate::pauli::PauliOperator;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub const INSTANCE_FORMAT_VERSION: u32 = 1;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceForm {
    Symbolic,
    Dense,
}

/// Hidden ground truth, sealed away from decoders.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub secret: BitVector,
    pub error: PauliOperator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum Payload {
    /// Frame Pauli `F` with noisy codeword `F * U_enc |0^n>`; equals
    /// `error * logical_X^secret` up to phase.
    Symbolic { frame: PauliOperator },
    Dense { state: StateVector },
}

/// A single decoding-problem sample: a code description plus a noisy
/// codeword, with the witness sealed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LsnInstance {
    pub version: u32,
    pub code: StabilizerCode,
    pub noise: NoiseSpec,
    payload: Payload,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Witness>,
}

impl<'de> Deserialize<'de> for LsnInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Raw {
            version: u32,
            code: StabilizerCode,
            noise: NoiseSpec,
            payload: Payload,
            #[serde(default)]
            witness: Option<Witness>,
        }
        let raw = Raw::deserialize(d)?;
        let n = raw.code.n();
        raw.noise.validate(n).map_err(D::Error::custom)?;
        match &raw.payload {
            Payload::Symbolic { frame } if frame.num_qubits() != n => {
                return Err(D::Error::custom("frame qubit count does not match the code"));
            }
            Payload::Dense { state } if state.num_qubits() != n => {
                return Err(D::Error::custom("state qubit count does not match the code"));
            }
            _ => {}
        }
        if let Some(w) = &raw.witness {
            if w.secret.len() != raw.code.k() || w.error.num_qubits() != n {
                return Err(D::Error::custom("witness dimensions do not match the code"));
            }
        }
        Ok(LsnInstance {
            version: raw.version,
            code: raw.code,
            noise: raw.noise,
            payload: raw.payload,
            witness: raw.witness,
        })
    }
}

impl LsnInstance {
    /// Packages explicit parts into an instance (used by samplers, the
    /// worst-case pipeline and tests).
    pub fn from_parts(
        code: StabilizerCode,
        error: &PauliOperator,
        secret: &BitVector,
        noise: NoiseSpec,
        form: InstanceForm,
    ) -> Result<Self> {
        if error.num_qubits() != code.n() {
            return Err(Error::DimensionMismatch {
                expected: code.n(),
                actual: error.num_qubits(),
            });
        }
        if secret.len() != code.k() {
            return Err(Error::DimensionMismatch {
                expected: code.k(),
                actual: secret.len(),
            });
        }
        let payload = match form {
            InstanceForm::Symbolic => {
                let logical = code.logical_x_string(secret);
                let frame = error.multiply(&logical)?.unsigned();
                Payload::Symbolic { frame }
            }
            InstanceForm::Dense => {
                let psi = encode_basis(&code, secret)?;
                Payload::Dense {
                    state: apply_pauli(&psi, error),
                }
            }
        };
        Ok(Self {
            version: INSTANCE_FORMAT_VERSION,
            code,
            noise,
            payload,
            witness: Some(Witness {
                secret: secret.clone(),
                error: error.unsigned(),
            }),
        })
    }

    pub fn form(&self) -> InstanceForm {
        match self.payload {
            Payload::Symbolic { .. } => InstanceForm::Symbolic,
            Payload::Dense { .. } => InstanceForm::Dense,
        }
    }

    /// Ground truth for scoring; never handed to decoders.
    pub fn witness(&self) -> Option<&Witness> {
        self.witness.as_ref()
    }

    /// Drops the witness section, e.g. before shipping an instance file.
    pub fn strip_witness(&mut self) {
        self.witness = None;
    }

    /// Decoder-facing query surface.
    pub fn view(&self) -> LsnView<'_> {
        LsnView { inst: self }
    }
}

/// What a decoder may do with an instance: inspect the public code
/// description and interact with the quantum payload the way a physical
/// measurement apparatus would.
pub struct LsnView<'a> {
    inst: &'a LsnInstance,
}

impl LsnView<'_> {
    pub fn code(&self) -> &StabilizerCode {
        &self.inst.code
    }

    pub fn noise(&self) -> &NoiseSpec {
        &self.inst.noise
    }

    pub fn form(&self) -> InstanceForm {
        self.inst.form()
    }

    /// All n - k stabilizer syndromes at once (symbolic form only; the
    /// measurement is deterministic for Pauli errors).
    pub fn syndrome(&self) -> Result<BitVector> {
        match &self.inst.payload {
            Payload::Symbolic { frame } => self.inst.code.syndrome(frame),
            Payload::Dense { .. } => Err(Error::WrongForm("symbolic")),
        }
    }

    /// Applies the inverse encoder and measures every qubit; returns the n
    /// measured bits. Deterministic for the symbolic form, Born-sampled
    /// for the dense form.
    pub fn measure_all_after_inverse_encoding(&self, rng: &mut impl Rng) -> Result<BitVector> {
        match &self.inst.payload {
            Payload::Symbolic { frame } => Ok(symbolic_basis_bits(&self.inst.code, frame, 0)),
            Payload::Dense { state } => {
                let rotated = apply_circuit(state, &self.inst.code.encoder_circuit().inverse())?;
                Ok(sample_basis_measurement(&rotated, rng))
            }
        }
    }

    /// Applies the chosen Pauli correction, then the inverse encoder, and
    /// measures the k logical qubits (symbolic form).
    pub fn readout_after_correction(&self, correction: &PauliOperator) -> Result<BitVector> {
        match &self.inst.payload {
            Payload::Symbolic { frame } => {
                let corrected = correction.multiply(frame)?;
                let code = &self.inst.code;
                Ok(symbolic_basis_bits(code, &corrected, code.n() - code.k()))
            }
            Payload::Dense { .. } => Err(Error::WrongForm("symbolic")),
        }
    }

    /// The quantum payload as a dense state (reconstructed under the
    /// statevector guard for symbolic instances).
    pub fn dense_state(&self) -> Result<StateVector> {
        match &self.inst.payload {
            Payload::Symbolic { frame } => {
                let fiducial = encode_basis(&self.inst.code, &BitVector::zeros(self.inst.code.k()))?;
                Ok(apply_pauli(&fiducial, frame))
            }
            Payload::Dense { state } => Ok(state.clone()),
        }
    }
}

/// Measured bits `start..n` of the inverse-encoded frame state: bit `i`
/// is the X component of `U^dag F U` at qubit `i`, which equals the
/// symplectic pairing of `F` with the image of `Z_i` (the stabilizer
/// generators for `i < n-k`, the logical Z operators after). No tableau
/// inversion and no sign tracking is needed.
fn symbolic_basis_bits(code: &StabilizerCode, frame: &PauliOperator, start: usize) -> BitVector {
    let n = code.n();
    let mut bits = BitVector::zeros(n - start);
    for i in start..n {
        bits.set(
            i - start,
            frame.symplectic_product(code.encoder().z_image(i)),
        );
    }
    bits
}

/// Samples a fresh average-case instance: uniform code, uniform secret,
/// error from the noise channel.
pub fn sample_lsn(
    n: usize,
    k: usize,
    noise: NoiseSpec,
    rng: &mut impl Rng,
    form: InstanceForm,
) -> Result<LsnInstance> {
    noise.validate(n)?;
    let code = StabilizerCode::random(n, k, rng)?;
    let secret = BitVector::random(k, rng);
    let error = noise.sample_error(n, rng)?;
    LsnInstance::from_parts(code, &error, &secret, noise, form)
}

// ---------------------------------------------------------------------------
// Multi-shot instances
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MslsnSample {
    pub code: StabilizerCode,
    payload: Payload,
}

/// `m` independent samples sharing one secret.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MslsnInstance {
    pub version: u32,
    pub noise: NoiseSpec,
    pub samples: Vec<MslsnSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<MslsnWitness>,
}

impl<'de> Deserialize<'de> for MslsnInstance {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        #[derive(Deserialize)]
        struct Raw {
            version: u32,
            noise: NoiseSpec,
            samples: Vec<MslsnSample>,
            #[serde(default)]
            witness: Option<MslsnWitness>,
        }
        let raw = Raw::deserialize(d)?;
        let Some(first) = raw.samples.first() else {
            return Err(D::Error::custom("multi-shot instance needs samples"));
        };
        let (n, k) = (first.code.n(), first.code.k());
        raw.noise.validate(n).map_err(D::Error::custom)?;
        for s in &raw.samples {
            if s.code.n() != n || s.code.k() != k {
                return Err(D::Error::custom("samples must share n and k"));
            }
            match &s.payload {
                Payload::Symbolic { frame } if frame.num_qubits() != n => {
                    return Err(D::Error::custom("frame qubit count does not match the code"));
                }
                Payload::Dense { state } if state.num_qubits() != n => {
                    return Err(D::Error::custom("state qubit count does not match the code"));
                }
                _ => {}
            }
        }
        if let Some(w) = &raw.witness {
            if w.secret.len() != k
                || w.errors.len() != raw.samples.len()
                || w.errors.iter().any(|e| e.num_qubits() != n)
            {
                return Err(D::Error::custom("witness dimensions do not match the samples"));
            }
        }
        Ok(MslsnInstance {
            version: raw.version,
            noise: raw.noise,
            samples: raw.samples,
            witness: raw.witness,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MslsnWitness {
    pub secret: BitVector,
    pub errors: Vec<PauliOperator>,
}

impl MslsnInstance {
    pub fn from_parts(
        codes: Vec<StabilizerCode>,
        errors: &[PauliOperator],
        secret: &BitVector,
        noise: NoiseSpec,
        form: InstanceForm,
    ) -> Result<Self> {
        if codes.is_empty() || codes.len() != errors.len() {
            return Err(Error::InvalidParameter(
                "need one error per sample".into(),
            ));
        }
        let (n, k) = (codes[0].n(), codes[0].k());
        let mut samples = Vec::with_capacity(codes.len());
        for (code, error) in codes.into_iter().zip(errors) {
            if code.n() != n || code.k() != k {
                return Err(Error::InvalidParameter(
                    "samples must share n and k".into(),
                ));
            }
            let single = LsnInstance::from_parts(code, error, secret, noise, form)?;
            samples.push(MslsnSample {
                code: single.code,
                payload: single.payload,
            });
        }
        Ok(Self {
            version: INSTANCE_FORMAT_VERSION,
            noise,
            samples,
            witness: Some(MslsnWitness {
                secret: secret.clone(),
                errors: errors.iter().map(|e| e.unsigned()).collect(),
            }),
        })
    }

    pub fn num_samples(&self) -> usize {
        self.samples.len()
    }

    pub fn n(&self) -> usize {
        self.samples[0].code.n()
    }

    pub fn k(&self) -> usize {
        self.samples[0].code.k()
    }

    pub fn witness(&self) -> Option<&MslsnWitness> {
        self.witness.as_ref()
    }

    pub fn strip_witness(&mut self) {
        self.witness = None;
    }

    /// Query view of sample `i`.
    pub fn sample_view(&self, i: usize) -> MslsnSampleView<'_> {
        MslsnSampleView {
            sample: &self.samples[i],
        }
    }
}

pub struct MslsnSampleView<'a> {
    sample: &'a MslsnSample,
}

impl MslsnSampleView<'_> {
    pub fn code(&self) -> &StabilizerCode {
        &self.sample.code
    }

    pub fn dense_state(&self) -> Result<StateVector> {
        match &self.sample.payload {
            Payload::Symbolic { frame } => {
                let fiducial =
                    encode_basis(&self.sample.code, &BitVector::zeros(self.sample.code.k()))?;
                Ok(apply_pauli(&fiducial, frame))
            }
            Payload::Dense { state } => Ok(state.clone()),
        }
    }
}

/// Samples independent codes and errors with a shared secret.
pub fn sample_mslsn(
    m: usize,
    n: usize,
    k: usize,
    noise: NoiseSpec,
    rng: &mut impl Rng,
    form: InstanceForm,
) -> Result<MslsnInstance> {
    if m == 0 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    noise.validate(n)?;
    let secret = BitVector::random(k, rng);
    let mut codes = Vec::with_capacity(m);
    let mut errors = Vec::with_capacity(m);
    for _ in 0..m {
        codes.push(StabilizerCode::random(n, k, rng)?);
        errors.push(noise.sample_error(n, rng)?);
    }
    MslsnInstance::from_parts(codes, &errors, &secret, noise, form)
}

/// The qubit relabeling that gathers every block's ancilla qubits first
/// and the secret-carrying qubits last.
pub fn block_gather_permutation(m: usize, n: usize, k: usize) -> Permutation {
    let r = n - k;
    let mut map = vec![0usize; m * n];
    for b in 0..m {
        for q in 0..n {
            map[b * n + q] = if q < r {
                b * r + q
            } else {
                m * r + b * k + (q - r)
            };
        }
    }
    Permutation::new(map).expect("gathering map is a bijection")
}

/// Repackages a multi-shot instance as a single instance on `m*n` qubits:
/// the block-tensor code conjugated by the gathering permutation, with the
/// combined error the permuted tensor of the per-sample errors and the
/// combined secret the original secret repeated `m` times.
pub fn mslsn_to_lsn(inst: &MslsnInstance) -> Result<LsnInstance> {
    let m = inst.num_samples();
    let n = inst.n();
    let k = inst.k();
    let perm = block_gather_permutation(m, n, k);
    let blocks: Vec<&CliffordTableau> = inst.samples.iter().map(|s| s.code.encoder()).collect();
    let tensor = CliffordTableau::tensor(&blocks);
    let perm_t = perm.tableau();
    let combined_encoder = perm_t.compose(&tensor)?.compose(&perm_t.inverse())?;
    let combined_code = StabilizerCode::from_encoder_tableau(m * n, m * k, combined_encoder)?;

    // combined frame: permuted tensor of the per-sample frames
    let mut frame = PauliOperator::identity(m * n);
    for (b, sample) in inst.samples.iter().enumerate() {
        let block_frame = match &sample.payload {
            Payload::Symbolic { frame } => frame.clone(),
            Payload::Dense { .. } => return Err(Error::WrongForm("symbolic")),
        };
        frame = frame.multiply(&block_frame.embed(m * n, b * n))?;
    }
    let frame = frame.permute(perm.as_slice()).unsigned();

    let witness = inst.witness.as_ref().map(|w| {
        let mut secret = BitVector::zeros(m * k);
        for b in 0..m {
            for j in 0..k {
                secret.set(b * k + j, w.secret.get(j));
            }
        }
        let mut error = PauliOperator::identity(m * n);
        for (b, e) in w.errors.iter().enumerate() {
            error = error.multiply(&e.embed(m * n, b * n)).unwrap();
        }
        Witness {
            secret,
            error: error.permute(perm.as_slice()).unsigned(),
        }
    });
    Ok(LsnInstance {
        version: INSTANCE_FORMAT_VERSION,
        code: combined_code,
        noise: inst.noise,
        payload: Payload::Symbolic { frame },
        witness,
    })
}

// ---------------------------------------------------------------------------
// Classical parity-learning instances and the bridge
// ---------------------------------------------------------------------------

/// A noisy linear-code sample `(A, A x + e)` over GF(2).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnInstance {
    pub version: u32,
    pub a: Vec<BitVector>,
    pub b: BitVector,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<LpnWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpnWitness {
    pub x: BitVector,
    pub e: BitVector,
}

impl LpnInstance {
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn k(&self) -> usize {
        self.a.first().map_or(0, BitVector::len)
    }

    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_rows(self.a.clone())
    }

    pub fn witness(&self) -> Option<&LpnWitness> {
        self.witness.as_ref()
    }

    pub fn strip_witness(&mut self) {
        self.witness = None;
    }
}

/// Samples `A` uniform, `x` uniform, `e ~ Ber_p^n`.
pub fn sample_lpn(n: usize, k: usize, p: f64, rng: &mut impl Rng) -> Result<LpnInstance> {
    if !(0.0..0.5).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "bit-flip rate must be in [0, 1/2), got {p}"
        )));
    }
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < n, got n={n}, k={k}"
        )));
    }
    let a = BitMatrix::random(n, k, rng);
    let x = BitVector::random(k, rng);
    let mut e = BitVector::zeros(n);
    for i in 0..n {
        if rng.gen::<f64>() < p {
            e.set(i, true);
        }
    }
    let b = a.mat_vec_mul(&x)?.xor(&e);
    Ok(LpnInstance {
        version: INSTANCE_FORMAT_VERSION,
        a: (0..n).map(|i| a.row(i).clone()).collect(),
        b,
        p,
        witness: Some(LpnWitness { x, e }),
    })
}

/// CNOT/SWAP circuit computing `|v> -> |M v>` for invertible `M`, by
/// Gaussian elimination.
fn linear_circuit(m: &BitMatrix) -> crate::clifford::CliffordCircuit {
    use crate::clifford::CliffordGate;
    let n = m.rows();
    let mut work = m.clone();
    let mut ops: Vec<CliffordGate> = Vec::new();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| work.get(r, col))
            .expect("matrix is invertible");
        if pivot != col {
            work.swap_rows(col, pivot);
            ops.push(CliffordGate::Swap(col, pivot));
        }
        for r in 0..n {
            if r != col && work.get(r, col) {
                work.xor_row(r, col);
                // row add r += col corresponds to CNOT(control=col, target=r)
                ops.push(CliffordGate::Cnot(col, r));
            }
        }
    }
    debug_assert_eq!(work, BitMatrix::identity(n));
    // ops reduce M to I from the left, so M is their product in recorded
    // order and the temporal gate list is the reverse
    ops.reverse();
    crate::clifford::CliffordCircuit { n, gates: ops }
}

/// Maps a parity-learning instance to a decoding instance over the
/// CNOT-circuit code of its generator matrix, with bit-flip noise
/// semantics. Returns `None` (the reduction aborts) when `A` is not of
/// full column rank.
pub fn lpn_to_lsn(inst: &LpnInstance) -> Result<Option<LsnInstance>> {
    let n = inst.n();
    let k = inst.k();
    let a = inst.matrix();
    if a.transpose().rank() < k {
        return Ok(None);
    }
    // complete A to an invertible M with A as the trailing block, so that
    // U|0, x> = |A x>
    let cols = a.transpose(); // k x n; complete_basis wants columns
    let mut col_matrix = BitMatrix::zeros(n, k);
    for j in 0..k {
        for i in 0..n {
            if cols.get(j, i) {
                col_matrix.set(i, j, true);
            }
        }
    }
    let m = col_matrix.complete_basis()?;
    let circuit = linear_circuit(&m);
    let code = StabilizerCode::from_encoder_tableau(n, k, circuit.tableau())?;
    // payload: the computational basis state |A x + e> as a frame Pauli
    let mut frame = PauliOperator::identity(n);
    for i in inst.b.iter_ones() {
        frame.set_letter(i, crate::pauli::PauliLetter::X);
    }
    let witness = inst.witness.as_ref().map(|w| {
        let mut error = PauliOperator::identity(n);
        for i in w.e.iter_ones() {
            error.set_letter(i, crate::pauli::PauliLetter::X);
        }
        Witness {
            secret: w.x.clone(),
            error,
        }
    });
    Ok(Some(LsnInstance {
        version: INSTANCE_FORMAT_VERSION,
        code,
        noise: NoiseSpec::bitflip(inst.p),
        payload: Payload::Symbolic { frame },
        witness,
    }))
}

/// Multi-shot variant of the parity bridge: an `m*n`-row sample splits
/// into `m` blocks, each bridged separately with the shared secret.
/// Aborts (returns `None`) when any block's generator matrix lacks full
/// column rank.
pub fn lpn_to_mslsn(inst: &LpnInstance, m: usize) -> Result<Option<MslsnInstance>> {
    let total = inst.n();
    let k = inst.k();
    if m == 0 || total % m != 0 {
        return Err(Error::InvalidParameter(format!(
            "{total} rows do not split into {m} blocks"
        )));
    }
    let n = total / m;
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "blocks of {n} rows cannot encode {k} secret bits"
        )));
    }
    let mut samples = Vec::with_capacity(m);
    let mut errors = Vec::with_capacity(m);
    for b in 0..m {
        let block = LpnInstance {
            version: INSTANCE_FORMAT_VERSION,
            a: inst.a[b * n..(b + 1) * n].to_vec(),
            b: inst.b.slice(b * n, (b + 1) * n),
            p: inst.p,
            witness: inst.witness.as_ref().map(|w| LpnWitness {
                x: w.x.clone(),
                e: w.e.slice(b * n, (b + 1) * n),
            }),
        };
        let Some(lsn) = lpn_to_lsn(&block)? else {
            return Ok(None);
        };
        if let Some(w) = lsn.witness() {
            errors.push(w.error.clone());
        }
        samples.push(MslsnSample {
            code: lsn.code,
            payload: lsn.payload,
        });
    }
    let witness = inst.witness.as_ref().map(|w| MslsnWitness {
        secret: w.x.clone(),
        errors,
    });
    Ok(Some(MslsnInstance {
        version: INSTANCE_FORMAT_VERSION,
        noise: NoiseSpec::bitflip(inst.p),
        samples,
        witness,
    }))
}

/// Probability that a uniform n-by-k binary matrix has full column rank:
/// `prod_{i=1..k} (1 - 2^(i-n-1))`.
pub fn full_column_rank_probability(n: usize, k: usize) -> f64 {
    (1..=k).map(|i| 1.0 - 2f64.powi(i as i32 - n as i32 - 1)).product()
}
