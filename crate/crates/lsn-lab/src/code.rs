//! Stabilizer codes: encoder synthesis, syndromes, destabilizer
//! decomposition, exact distance, Knill-Laflamme checks, and the quantum
//! Gilbert-Varshamov bound.

use crate::clifford::{
    sample_uniform_clifford, synthesize_circuit, synthesize_circuit_opts, CliffordCircuit,
    CliffordTableau,
};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::{
    for_each_pauli_of_weight, pauli_count_up_to_weight, PauliLetter, PauliOperator,
};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Enumeration guard for the exhaustive searches.
pub const SEARCH_GUARD: u64 = 10_000_000;

/// An `[[n, k]]` stabilizer code with a synthesized encoder.
///
/// The encoder tableau conjugates `Z_i` to generator `i` (sign included)
/// for `i < n-k`; destabilizers are the encoder images of the `X_i`, and
/// the logical operators are the images of `X_{n-k+j}` and `Z_{n-k+j}`.
/// The gate-level encoder circuit is synthesized on first use; symbolic
/// decoding never touches it.
#[derive(Clone, Debug)]
pub struct StabilizerCode {
    n: usize,
    k: usize,
    generators: Vec<PauliOperator>,
    encoder: CliffordTableau,
    circuit: once_cell::sync::OnceCell<CliffordCircuit>,
    destabilizers: Vec<PauliOperator>,
    logical_x: Vec<PauliOperator>,
    logical_z: Vec<PauliOperator>,
}

impl PartialEq for StabilizerCode {
    fn eq(&self, other: &Self) -> bool {
        // the circuit is a deterministic function of the tableau (or of
        // the file it was loaded from) and stays out of the comparison
        self.n == other.n
            && self.k == other.k
            && self.generators == other.generators
            && self.encoder == other.encoder
    }
}

/// Unique expansion of a Pauli over destabilizer, stabilizer and logical
/// factors: `p = i^phase * prod d_i^{s_i} * prod g_i^{t_i} * prod Lx_j^{a_j}
/// * prod Lz_j^{b_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliDecomposition {
    pub syndrome_bits: BitVector,
    pub stabilizer_bits: BitVector,
    pub logical_x_bits: BitVector,
    pub logical_z_bits: BitVector,
    pub phase_exp: u8,
}

fn symplectic_rows(ops: &[PauliOperator]) -> BitMatrix {
    BitMatrix::from_rows(ops.iter().map(|p| p.symplectic()).collect())
}

/// Row-span membership tests against a fixed generating set.
struct SpanChecker {
    rref: BitMatrix,
    pivots: Vec<usize>,
}

impl SpanChecker {
    fn new(ops: &[PauliOperator]) -> Self {
        let (rref, pivots) = symplectic_rows(ops).rref_with_pivots();
        Self { rref, pivots }
    }

    fn contains(&self, v: &BitVector) -> bool {
        let mut w = v.clone();
        for (row, &col) in self.pivots.iter().enumerate() {
            if w.get(col) {
                w.xor_assign(self.rref.row(row));
            }
        }
        w.is_zero()
    }
}

impl StabilizerCode {
    /// Builds a code from its tableau: generators are the images of the
    /// first `n-k` `Z_i`, destabilizers and logicals the remaining images.
    /// A known-good circuit may be seeded; otherwise it is synthesized on
    /// first use.
    fn from_encoder(
        n: usize,
        k: usize,
        encoder: CliffordTableau,
        circuit: Option<CliffordCircuit>,
    ) -> Self {
        let r = n - k;
        let generators = (0..r).map(|i| encoder.z_image(i).clone()).collect();
        let destabilizers = (0..r).map(|i| encoder.x_image(i).clone()).collect();
        let logical_x = (0..k).map(|j| encoder.x_image(r + j).clone()).collect();
        let logical_z = (0..k).map(|j| encoder.z_image(r + j).clone()).collect();
        let cell = once_cell::sync::OnceCell::new();
        if let Some(c) = circuit {
            cell.set(c).expect("fresh cell");
        }
        Self {
            n,
            k,
            generators,
            encoder,
            circuit: cell,
            destabilizers,
            logical_x,
            logical_z,
        }
    }

    /// Builds a code whose encoder is the given tableau; an exact circuit
    /// is synthesized for dense work.
    pub fn from_encoder_tableau(n: usize, k: usize, encoder: CliffordTableau) -> Result<Self> {
        check_nk(n, k)?;
        if encoder.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: encoder.num_qubits(),
            });
        }
        Ok(Self::from_encoder(n, k, encoder, None))
    }

    /// The trivial code stabilized by `Z_0 .. Z_{n-k-1}`.
    pub fn canonical(n: usize, k: usize) -> Result<Self> {
        check_nk(n, k)?;
        Ok(Self::from_encoder(
            n,
            k,
            CliffordTableau::identity(n),
            Some(CliffordCircuit::empty(n)),
        ))
    }

    /// Uniformly random code: the canonical stabilizer conjugated by a
    /// uniform Clifford, which is uniform over all `[[n, k]]` stabilizer
    /// groups.
    pub fn random(n: usize, k: usize, rng: &mut impl Rng) -> Result<Self> {
        check_nk(n, k)?;
        let encoder = sample_uniform_clifford(n, rng);
        Ok(Self::from_encoder(n, k, encoder, None))
    }

    /// Builds a code from independent commuting signed generators by
    /// synthesizing an encoding circuit for them.
    pub fn from_generators(generators: &[PauliOperator]) -> Result<Self> {
        let (circuit, tableau) = synthesize_encoder(generators)?;
        let n = tableau.num_qubits();
        let k = n - generators.len();
        let code = Self::from_encoder(n, k, tableau, Some(circuit));
        debug_assert_eq!(code.generators, generators);
        Ok(code)
    }

    /// The `[[5, 1, 3]]` code generated by XZZXI and its cyclic shifts.
    pub fn five_qubit() -> Self {
        let gens: Vec<PauliOperator> = ["XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"]
            .iter()
            .map(|s| PauliOperator::parse(s).unwrap())
            .collect();
        Self::from_generators(&gens).expect("five-qubit generators are valid")
    }

    /// The n-qubit bit-flip repetition code `{Z_0 Z_1, .., Z_{n-2} Z_{n-1}}`.
    pub fn repetition(n: usize) -> Self {
        assert!(n >= 2);
        let gens: Vec<PauliOperator> = (0..n - 1)
            .map(|i| {
                let mut p = PauliOperator::identity(n);
                p.set_letter(i, PauliLetter::Z);
                p.set_letter(i + 1, PauliLetter::Z);
                p
            })
            .collect();
        Self::from_generators(&gens).expect("repetition generators are valid")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn num_generators(&self) -> usize {
        self.n - self.k
    }

    pub fn generators(&self) -> &[PauliOperator] {
        &self.generators
    }

    pub fn destabilizers(&self) -> &[PauliOperator] {
        &self.destabilizers
    }

    pub fn logical_x(&self) -> &[PauliOperator] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliOperator] {
        &self.logical_z
    }

    pub fn encoder(&self) -> &CliffordTableau {
        &self.encoder
    }

    /// Gate list realizing the encoder tableau exactly, signs included;
    /// synthesized lazily.
    pub fn encoder_circuit(&self) -> &CliffordCircuit {
        self.circuit.get_or_init(|| {
            let c = synthesize_circuit(&self.encoder);
            debug_assert_eq!(c.tableau(), self.encoder);
            c
        })
    }

    /// Syndrome bit `i` is set iff `e` anticommutes with generator `i`.
    pub fn syndrome(&self, e: &PauliOperator) -> Result<BitVector> {
        if e.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: e.num_qubits(),
            });
        }
        let mut s = BitVector::zeros(self.num_generators());
        for (i, g) in self.generators.iter().enumerate() {
            if e.symplectic_product(g) {
                s.set(i, true);
            }
        }
        Ok(s)
    }

    /// Logical `X^u` with respect to this code's encoder.
    pub fn logical_x_string(&self, u: &BitVector) -> PauliOperator {
        debug_assert_eq!(u.len(), self.k);
        self.encoder
            .conjugate(&PauliOperator::x_string(self.n, self.n - self.k, u))
    }

    /// True iff the unsigned part of `p` lies in the span of the generators.
    pub fn contains_unsigned(&self, p: &PauliOperator) -> bool {
        SpanChecker::new(&self.generators).contains(&p.symplectic())
    }

    /// True iff `p` commutes with every generator.
    pub fn in_normalizer(&self, p: &PauliOperator) -> bool {
        self.generators.iter().all(|g| !p.symplectic_product(g))
    }

    /// Unique expansion over destabilizer / stabilizer / logical factors;
    /// `recompose` inverts it exactly.
    pub fn decompose_pauli(&self, p: &PauliOperator) -> Result<PauliDecomposition> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: p.num_qubits(),
            });
        }
        let r = self.num_generators();
        let mut syndrome_bits = BitVector::zeros(r);
        let mut stabilizer_bits = BitVector::zeros(r);
        for i in 0..r {
            // the destabilizer exponent is detected by the paired generator
            // and vice versa
            syndrome_bits.set(i, p.symplectic_product(&self.generators[i]));
            stabilizer_bits.set(i, p.symplectic_product(&self.destabilizers[i]));
        }
        let mut logical_x_bits = BitVector::zeros(self.k);
        let mut logical_z_bits = BitVector::zeros(self.k);
        for j in 0..self.k {
            logical_x_bits.set(j, p.symplectic_product(&self.logical_z[j]));
            logical_z_bits.set(j, p.symplectic_product(&self.logical_x[j]));
        }
        let partial = PauliDecomposition {
            syndrome_bits,
            stabilizer_bits,
            logical_x_bits,
            logical_z_bits,
            phase_exp: 0,
        };
        let unsigned_product = self.product_for(&partial);
        debug_assert_eq!(unsigned_product.unsigned(), p.unsigned());
        let phase_exp = (p.phase_exp() + 4 - unsigned_product.phase_exp()) % 4;
        Ok(PauliDecomposition {
            phase_exp,
            ..partial
        })
    }

    fn product_for(&self, d: &PauliDecomposition) -> PauliOperator {
        let mut out = PauliOperator::identity(self.n);
        for i in d.syndrome_bits.iter_ones() {
            out = out.multiply(&self.destabilizers[i]).unwrap();
        }
        for i in d.stabilizer_bits.iter_ones() {
            out = out.multiply(&self.generators[i]).unwrap();
        }
        for j in d.logical_x_bits.iter_ones() {
            out = out.multiply(&self.logical_x[j]).unwrap();
        }
        for j in d.logical_z_bits.iter_ones() {
            out = out.multiply(&self.logical_z[j]).unwrap();
        }
        out
    }

    /// Reassembles the Pauli from its decomposition.
    pub fn recompose(&self, d: &PauliDecomposition) -> PauliOperator {
        let mut out = self.product_for(d);
        out.set_phase_exp((out.phase_exp() + d.phase_exp) % 4);
        out
    }

    /// Minimum weight of a normalizer element outside the group (up to
    /// sign), searching weights `1..=w_max` in colex order; `None` when
    /// nothing is found within the bound.
    pub fn distance_exact(&self, w_max: usize) -> Result<Option<usize>> {
        let total = pauli_count_up_to_weight(self.n, w_max);
        if total > SEARCH_GUARD {
            return Err(Error::GuardExceeded {
                what: "distance search space",
                requested: total.min(usize::MAX as u64) as usize,
                limit: SEARCH_GUARD as usize,
            });
        }
        let span = SpanChecker::new(&self.generators);
        let hit = (1..=w_max.min(self.n))
            .into_par_iter()
            .filter(|&w| {
                let mut found = false;
                for_each_pauli_of_weight(self.n, w, &mut |p| {
                    if self.in_normalizer(p) && !span.contains(&p.symplectic()) {
                        found = true;
                        return false;
                    }
                    true
                });
                found
            })
            .min();
        Ok(hit)
    }

    /// True iff every product `E_a^dag E_b` of weight-at-most-`t` errors is
    /// either detectable (anticommutes with some generator) or lies in the
    /// stabilizer group itself; this is non-degenerate correctability at
    /// weight `t`.
    pub fn knill_laflamme_ok(&self, t: usize) -> Result<bool> {
        let count = pauli_count_up_to_weight(self.n, t);
        if count.saturating_mul(count) > SEARCH_GUARD {
            return Err(Error::GuardExceeded {
                what: "Knill-Laflamme pair enumeration",
                requested: count.saturating_mul(count).min(usize::MAX as u64) as usize,
                limit: SEARCH_GUARD as usize,
            });
        }
        let mut errors = Vec::with_capacity(count as usize);
        for w in 0..=t.min(self.n) {
            for_each_pauli_of_weight(self.n, w, &mut |p| {
                errors.push(p.clone());
                true
            });
        }
        let span = SpanChecker::new(&self.generators);
        for a in &errors {
            for b in &errors {
                let prod = a.multiply(b).unwrap();
                if self.in_normalizer(&prod) && !span.contains(&prod.symplectic()) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// All `2^(n-k)` signed group elements (guarded for small codes).
    pub fn group_elements(&self) -> Result<Vec<PauliOperator>> {
        let r = self.num_generators();
        if r > 20 {
            return Err(Error::GuardExceeded {
                what: "group enumeration",
                requested: r,
                limit: 20,
            });
        }
        let mut out = Vec::with_capacity(1 << r);
        for mask in 0u32..(1 << r) {
            let mut p = PauliOperator::identity(self.n);
            for i in 0..r {
                if mask >> i & 1 == 1 {
                    p = p.multiply(&self.generators[i]).unwrap();
                }
            }
            out.push(p);
        }
        Ok(out)
    }

    /// Canonical text key for the stabilizer group: the sorted list of its
    /// signed elements. Two codes get the same key iff they stabilize the
    /// same subspace.
    pub fn group_key(&self) -> Result<String> {
        let mut elems: Vec<String> = self
            .group_elements()?
            .into_iter()
            .map(|p| p.to_string())
            .collect();
        elems.sort();
        Ok(elems.join(";"))
    }
}

fn check_nk(n: usize, k: usize) -> Result<()> {
    if k >= n || k == 0 {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < n, got n={n}, k={k}"
        )));
    }
    Ok(())
}

/// Synthesizes an encoding circuit for independent commuting signed
/// generators: the returned tableau conjugates `Z_i` to generator `i` with
/// the correct sign, and the circuit uses gates from
/// {H, S, CNOT, CZ, SWAP, X} with sign-fixing X gates at the start.
pub fn synthesize_encoder(
    generators: &[PauliOperator],
) -> Result<(CliffordCircuit, CliffordTableau)> {
    let r = generators.len();
    if r == 0 {
        return Err(Error::InvalidParameter("no generators".into()));
    }
    let n = generators[0].num_qubits();
    if r >= n {
        return Err(Error::InvalidParameter(format!(
            "{r} generators on {n} qubits leaves no logical qubit"
        )));
    }
    for g in generators {
        if g.num_qubits() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: g.num_qubits(),
            });
        }
        if g.phase_exp() % 2 != 0 {
            return Err(Error::InvalidParameter(format!(
                "generator {g} is not Hermitian"
            )));
        }
    }
    for i in 0..r {
        for j in (i + 1)..r {
            if generators[i].symplectic_product(&generators[j]) {
                return Err(Error::NonCommutingGenerators);
            }
        }
    }
    if symplectic_rows(generators).rank() != r {
        return Err(Error::DependentGenerators);
    }

    let k = n - r;
    let gen_vecs: Vec<BitVector> = generators.iter().map(|g| g.symplectic()).collect();
    let sp_row = |v: &BitVector| -> BitVector {
        // symplectic pairing as an ordinary dot product: swap the halves
        v.slice(n, 2 * n).concat(&v.slice(0, n))
    };

    // destabilizers: d_i anticommutes with g_i only, and commutes with the
    // previously chosen destabilizers
    let mut destab_vecs: Vec<BitVector> = Vec::with_capacity(r);
    for i in 0..r {
        let mut rows: Vec<BitVector> = gen_vecs.iter().map(&sp_row).collect();
        rows.extend(destab_vecs.iter().map(&sp_row));
        let m = BitMatrix::from_rows(rows);
        let mut rhs = BitVector::zeros(m.rows());
        rhs.set(i, true);
        let d = m
            .solve(&rhs)?
            .expect("independent constraints always have a solution");
        destab_vecs.push(d);
    }

    // logical pairs complete the symplectic basis
    let mut logical_x_vecs: Vec<BitVector> = Vec::with_capacity(k);
    let mut logical_z_vecs: Vec<BitVector> = Vec::with_capacity(k);
    for _ in 0..k {
        let mut rows: Vec<BitVector> = gen_vecs.iter().map(&sp_row).collect();
        rows.extend(destab_vecs.iter().map(&sp_row));
        for (lx, lz) in logical_x_vecs.iter().zip(logical_z_vecs.iter()) {
            rows.push(sp_row(lx));
            rows.push(sp_row(lz));
        }
        let m = BitMatrix::from_rows(rows.clone());
        let lx = m.nullspace().into_iter().find(|v| !v.is_zero()).expect(
            "symplectic complement of a partial basis is nonempty",
        );
        rows.push(sp_row(&lx));
        let m2 = BitMatrix::from_rows(rows);
        let mut rhs = BitVector::zeros(m2.rows());
        rhs.set(m2.rows() - 1, true);
        let lz = m2.solve(&rhs)?.expect("pairing partner exists");
        logical_x_vecs.push(lx);
        logical_z_vecs.push(lz);
    }

    let mut x_images: Vec<PauliOperator> = destab_vecs
        .iter()
        .map(|v| PauliOperator::from_symplectic(n, v))
        .collect();
    x_images.extend(
        logical_x_vecs
            .iter()
            .map(|v| PauliOperator::from_symplectic(n, v)),
    );
    let mut z_images: Vec<PauliOperator> = generators.to_vec();
    z_images.extend(
        logical_z_vecs
            .iter()
            .map(|v| PauliOperator::from_symplectic(n, v)),
    );
    let target = CliffordTableau::from_images(x_images, z_images)?;

    // destabilizer signs are free, so X-image signs stay floating and the
    // gate set avoids Z corrections
    let circuit = synthesize_circuit_opts(&target, false);
    let tableau = circuit.tableau();
    for (i, g) in generators.iter().enumerate() {
        debug_assert_eq!(tableau.z_image(i), g);
    }
    Ok((circuit, tableau))
}

/// Binary entropy in bits.
pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Gilbert-Varshamov lower bound on the probability that a random
/// `[[n, k]]` code is non-degenerate with distance `d`:
/// `1 - d * 2^(n H(d/n)) * 3^d * 2^(k-n)`. May be negative (vacuous).
pub fn gv_bound(n: usize, k: usize, d: usize) -> f64 {
    assert!(d >= 1 && d <= n);
    let log_term = (d as f64).log2()
        + n as f64 * binary_entropy(d as f64 / n as f64)
        + d as f64 * 3f64.log2()
        + k as f64
        - n as f64;
    1.0 - log_term.exp2()
}

// JSON form: the classical description of the code shipped in instance
// files.
#[derive(Serialize, Deserialize)]
struct CodeJson {
    n: usize,
    k: usize,
    generators: Vec<PauliOperator>,
    #[serde(skip_serializing_if = "Option::is_none")]
    encoder_gates: Option<CliffordCircuit>,
}

impl Serialize for StabilizerCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CodeJson {
            n: self.n,
            k: self.k,
            generators: self.generators.clone(),
            encoder_gates: Some(self.encoder_circuit().clone()),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for StabilizerCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = CodeJson::deserialize(d)?;
        let code = match raw.encoder_gates {
            Some(circuit) => {
                if circuit.n != raw.n {
                    return Err(D::Error::custom("encoder circuit qubit count mismatch"));
                }
                let tableau = circuit.tableau();
                for (i, g) in raw.generators.iter().enumerate() {
                    if tableau.z_image(i) != g {
                        return Err(D::Error::custom(
                            "encoder circuit does not reproduce the generators",
                        ));
                    }
                }
                StabilizerCode::from_encoder(raw.n, raw.k, tableau, Some(circuit))
            }
            None => StabilizerCode::from_generators(&raw.generators).map_err(D::Error::custom)?,
        };
        if code.n != raw.n || code.k != raw.k {
            return Err(D::Error::custom("inconsistent n/k in code description"));
        }
        Ok(code)
    }
}
