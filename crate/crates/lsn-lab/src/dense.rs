//! Small-n exact statevector / density-matrix engine.
//!
//! This is the oracle side of the lab: every symbolic claim (tableau
//! conjugation, syndrome algebra, orthogonality certificates) can be
//! cross-checked here densely. Guards are hard errors; the symbolic engine
//! is the scalable path.
//!
//! Qubit 0 is the most significant bit of a basis index.

use crate::clifford::CliffordCircuit;
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::noise::NoiseSpec;
use crate::pauli::PauliOperator;
use num_complex::Complex64;
use rand::Rng;

pub const STATE_QUBIT_GUARD: usize = 14;
pub const DENSITY_QUBIT_GUARD: usize = 10;
/// Absolute eigenvalue threshold below which spectral mass counts as kernel.
pub const KERNEL_THRESHOLD: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn guard(what: &'static str, n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::GuardExceeded {
            what,
            requested: n,
            limit,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Complex matrices
// ---------------------------------------------------------------------------

/// Dense row-major complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for l in 0..self.cols {
                let a = self[(i, l)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(l, j)];
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a += b;
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(other.data.iter()) {
            *a -= b;
        }
        out
    }

    pub fn scale(&self, f: Complex64) -> CMatrix {
        let mut out = self.clone();
        for a in out.data.iter_mut() {
            *a *= f;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        if self.rows != self.cols {
            return false;
        }
        for i in 0..self.rows {
            for j in i..self.cols {
                if (self[(i, j)] - self[(j, i)].conj()).norm() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Returns `(eigenvalues, V)` with eigenvalues ascending and the columns of
/// `V` the matching orthonormal eigenvectors. Adequate up to dimension
/// ~1024, which covers every guard in this crate.
pub fn eigh(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    assert_eq!(a.rows, a.cols);
    let n = a.rows;
    let mut m = a.clone();
    let mut v = CMatrix::identity(n);
    let scale = 1.0 + m.frobenius_norm();
    for _sweep in 0..60 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[(p, q)].norm_sqr();
            }
        }
        if off.sqrt() < 1e-13 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                let r = apq.norm();
                if r < 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                let theta = (aqq - app) / (2.0 * r);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // J is identity except J[p][p]=c, J[p][q]=s*phase,
                // J[q][p]=-s*conj(phase)... realized below column-wise
                let jpp = Complex64::new(c, 0.0);
                let jpq = Complex64::new(s, 0.0) * phase;
                let jqp = -Complex64::new(s, 0.0) * phase.conj();
                let jqq = Complex64::new(c, 0.0);
                // m <- J^dag m J
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = mkp * jpp + mkq * jqp;
                    m[(k, q)] = mkp * jpq + mkq * jqq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = jpp.conj() * mpk + jqp.conj() * mqk;
                    m[(q, k)] = jpq.conj() * mpk + jqq.conj() * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = vkp * jpp + vkq * jqp;
                    v[(k, q)] = vkp * jpq + vkq * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let eigvals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (new, &old) in order.iter().enumerate() {
        for k in 0..n {
            vecs[(k, new)] = v[(k, old)];
        }
    }
    (eigvals, vecs)
}

/// `f(A)` for Hermitian `A` via its spectral decomposition.
fn hermitian_function(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (vals, vecs) = eigh(a);
    let n = a.rows;
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let fv = Complex64::new(f(l), 0.0);
        for i in 0..n {
            scaled[(i, j)] *= fv;
        }
    }
    scaled.mul(&vecs.dagger())
}

// ---------------------------------------------------------------------------
// Statevectors
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|bits>`.
    pub fn basis(n: usize, bits: &BitVector) -> Result<Self> {
        guard("statevector qubits", n, STATE_QUBIT_GUARD)?;
        debug_assert_eq!(bits.len(), n);
        let mut amps = vec![ZERO; 1 << n];
        amps[basis_index(bits)] = ONE;
        Ok(Self { n, amps })
    }

    pub fn zero_state(n: usize) -> Result<Self> {
        Self::basis(n, &BitVector::zeros(n))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &StateVector) -> Complex64 {
        debug_assert_eq!(self.n, other.n);
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `<self| P |self>`.
    pub fn expectation(&self, p: &PauliOperator) -> Complex64 {
        let moved = apply_pauli(self, p);
        self.inner(&moved)
    }

    /// True iff the states agree up to a global phase.
    pub fn equal_up_to_phase(&self, other: &StateVector, tol: f64) -> bool {
        (self.inner(other).norm() - 1.0).abs() < tol
    }

    /// Tensor product `self (x) other` (self on the more significant qubits).
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n + other.n;
        guard("statevector qubits", n, STATE_QUBIT_GUARD)?;
        let mut amps = vec![ZERO; 1 << n];
        for (i, a) in self.amps.iter().enumerate() {
            if *a == ZERO {
                continue;
            }
            for (j, b) in other.amps.iter().enumerate() {
                amps[(i << other.n) | j] = a * b;
            }
        }
        Ok(StateVector { n, amps })
    }

    /// Maximum amplitude deviation from `other`.
    pub fn max_amplitude_distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl serde::Serialize for StateVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("StateVector", 2)?;
        st.serialize_field("n", &self.n)?;
        let amps: Vec<(f64, f64)> = self.amps.iter().map(|a| (a.re, a.im)).collect();
        st.serialize_field("amps", &amps)?;
        st.end()
    }
}

impl<'de> serde::Deserialize<'de> for StateVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(serde::Deserialize)]
        struct Raw {
            n: usize,
            amps: Vec<(f64, f64)>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.amps.len() != 1 << raw.n {
            return Err(serde::de::Error::custom("amplitude count mismatch"));
        }
        Ok(StateVector {
            n: raw.n,
            amps: raw
                .amps
                .into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        })
    }
}

fn basis_index(bits: &BitVector) -> usize {
    let n = bits.len();
    let mut idx = 0usize;
    for q in 0..n {
        if bits.get(q) {
            idx |= 1 << (n - 1 - q);
        }
    }
    idx
}

fn index_bit(idx: usize, n: usize, q: usize) -> bool {
    idx >> (n - 1 - q) & 1 == 1
}

/// Exact gate-by-gate circuit application.
pub fn apply_circuit(state: &StateVector, circuit: &CliffordCircuit) -> Result<StateVector> {
    if circuit.n != state.n {
        return Err(Error::DimensionMismatch {
            expected: state.n,
            actual: circuit.n,
        });
    }
    guard("statevector qubits", state.n, STATE_QUBIT_GUARD)?;
    let n = state.n;
    let dim = 1usize << n;
    let mut amps = state.amps.clone();
    for &g in &circuit.gates {
        match g {
            crate::clifford::CliffordGate::H(q) => {
                let bit = 1usize << (n - 1 - q);
                let s = std::f64::consts::FRAC_1_SQRT_2;
                for i in 0..dim {
                    if i & bit == 0 {
                        let a = amps[i];
                        let b = amps[i | bit];
                        amps[i] = (a + b) * s;
                        amps[i | bit] = (a - b) * s;
                    }
                }
            }
            crate::clifford::CliffordGate::S(q) => {
                let bit = 1usize << (n - 1 - q);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a *= Complex64::new(0.0, 1.0);
                    }
                }
            }
            crate::clifford::CliffordGate::X(q) => {
                let bit = 1usize << (n - 1 - q);
                for i in 0..dim {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            crate::clifford::CliffordGate::Z(q) => {
                let bit = 1usize << (n - 1 - q);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            crate::clifford::CliffordGate::Cnot(c, t) => {
                let cb = 1usize << (n - 1 - c);
                let tb = 1usize << (n - 1 - t);
                for i in 0..dim {
                    if i & cb != 0 && i & tb == 0 {
                        amps.swap(i, i | tb);
                    }
                }
            }
            crate::clifford::CliffordGate::Cz(a, b) => {
                let ab = 1usize << (n - 1 - a);
                let bb = 1usize << (n - 1 - b);
                for (i, v) in amps.iter_mut().enumerate() {
                    if i & ab != 0 && i & bb != 0 {
                        *v = -*v;
                    }
                }
            }
            crate::clifford::CliffordGate::Swap(a, b) => {
                let ab = 1usize << (n - 1 - a);
                let bb = 1usize << (n - 1 - b);
                for i in 0..dim {
                    if i & ab != 0 && i & bb == 0 {
                        amps.swap(i, (i & !ab) | bb);
                    }
                }
            }
        }
    }
    let out = StateVector { n, amps };
    debug_assert!((out.norm_sqr() - 1.0).abs() < 1e-9);
    Ok(out)
}

/// Exact signed Pauli application: `X^x Z^z |v> = i^phase (-1)^(z.v) |v + x>`.
pub fn apply_pauli(state: &StateVector, p: &PauliOperator) -> StateVector {
    debug_assert_eq!(state.n, p.num_qubits());
    let n = state.n;
    let dim = 1usize << n;
    let phase = [ONE, Complex64::new(0.0, 1.0), -ONE, Complex64::new(0.0, -1.0)]
        [p.xz_phase_exp() as usize];
    let mut xmask = 0usize;
    for q in p.x_bits().iter_ones() {
        xmask |= 1 << (n - 1 - q);
    }
    let mut zmask = 0usize;
    for q in p.z_bits().iter_ones() {
        zmask |= 1 << (n - 1 - q);
    }
    let mut amps = vec![ZERO; dim];
    for (i, a) in state.amps.iter().enumerate() {
        let sign = if (i & zmask).count_ones() % 2 == 1 {
            -ONE
        } else {
            ONE
        };
        amps[i ^ xmask] = a * phase * sign;
    }
    StateVector { n, amps }
}

/// Samples a full computational-basis measurement; returns the measured
/// bits, qubit 0 first.
pub fn sample_basis_measurement(state: &StateVector, rng: &mut impl Rng) -> BitVector {
    let mut u = rng.gen::<f64>() * state.norm_sqr();
    let mut chosen = state.amps.len() - 1;
    for (i, a) in state.amps.iter().enumerate() {
        let w = a.norm_sqr();
        if u < w {
            chosen = i;
            break;
        }
        u -= w;
    }
    let mut bits = BitVector::zeros(state.n);
    for q in 0..state.n {
        bits.set(q, index_bit(chosen, state.n, q));
    }
    bits
}

// ---------------------------------------------------------------------------
// Density matrices
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn from_pure(state: &StateVector) -> Result<Self> {
        guard("density-matrix qubits", state.n, DENSITY_QUBIT_GUARD)?;
        let dim = state.dim();
        let mut mat = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i, j)] = state.amps[i] * state.amps[j].conj();
            }
        }
        Ok(Self { n: state.n, mat })
    }

    pub fn from_matrix(n: usize, mat: CMatrix) -> Result<Self> {
        guard("density-matrix qubits", n, DENSITY_QUBIT_GUARD)?;
        if mat.rows != 1 << n || mat.cols != 1 << n {
            return Err(Error::DimensionMismatch {
                expected: 1 << n,
                actual: mat.rows,
            });
        }
        if !mat.is_hermitian(1e-9) {
            return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
        }
        if (mat.trace().re - 1.0).abs() > 1e-9 || mat.trace().im.abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "trace is {}, expected 1",
                mat.trace()
            )));
        }
        Ok(Self { n, mat })
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        guard("density-matrix qubits", n, DENSITY_QUBIT_GUARD)?;
        let dim = 1 << n;
        let mut mat = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            mat[(i, i)] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { n, mat })
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    /// Conjugation by a signed Pauli (the phase cancels).
    pub fn conjugate_by_pauli(&self, p: &PauliOperator) -> DensityMatrix {
        let dim = self.dim();
        let n = self.n;
        let mut xmask = 0usize;
        for q in p.x_bits().iter_ones() {
            xmask |= 1 << (n - 1 - q);
        }
        let mut zmask = 0usize;
        for q in p.z_bits().iter_ones() {
            zmask |= 1 << (n - 1 - q);
        }
        let sign = |i: usize| {
            if (i & zmask).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            }
        };
        let mut mat = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                mat[(i ^ xmask, j ^ xmask)] = self.mat[(i, j)] * sign(i) * sign(j);
            }
        }
        DensityMatrix { n, mat }
    }

    /// Tensor product of two density matrices.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n + other.n;
        guard("density-matrix qubits", n, DENSITY_QUBIT_GUARD)?;
        let (da, db) = (self.dim(), other.dim());
        let mut mat = CMatrix::zeros(da * db, da * db);
        for i in 0..da {
            for j in 0..da {
                let a = self.mat[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        mat[(i * db + k, j * db + l)] = a * other.mat[(k, l)];
                    }
                }
            }
        }
        Ok(DensityMatrix { n, mat })
    }
}

/// Convex combination of density matrices.
pub fn mix_ensemble(weights: &[f64], states: &[DensityMatrix]) -> Result<DensityMatrix> {
    if weights.len() != states.len() || states.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            actual: states.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(Error::WeightSum(total));
    }
    let n = states[0].n;
    guard("density-matrix qubits", n, DENSITY_QUBIT_GUARD)?;
    let dim = states[0].dim();
    let mut mat = CMatrix::zeros(dim, dim);
    for (w, s) in weights.iter().zip(states) {
        if s.n != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: s.n,
            });
        }
        for (a, b) in mat.data.iter_mut().zip(s.mat.data.iter()) {
            *a += b * Complex64::new(*w, 0.0);
        }
    }
    Ok(DensityMatrix { n, mat })
}

/// The noisy codeword ensemble `sum_E p(E) E |psi> <psi| E^dag` for the
/// codeword of secret `x`; the noise support enumeration is guarded.
pub fn noisy_codeword_density(
    code: &StabilizerCode,
    x: &BitVector,
    noise: &NoiseSpec,
) -> Result<DensityMatrix> {
    let n = code.n();
    guard("density-matrix qubits", n, DENSITY_QUBIT_GUARD)?;
    let psi = encode_basis(code, x)?;
    let support = noise.support(n, 1 << 20)?;
    let dim = 1 << n;
    let mut mat = CMatrix::zeros(dim, dim);
    for (e, prob) in &support {
        let v = apply_pauli(&psi, e);
        for i in 0..dim {
            let ai = v.amps[i] * Complex64::new(*prob, 0.0);
            if ai == ZERO {
                continue;
            }
            for j in 0..dim {
                mat[(i, j)] += ai * v.amps[j].conj();
            }
        }
    }
    DensityMatrix::from_matrix(n, mat)
}

/// Dense codeword `U_enc (|0^(n-k)> tensor |x>)`.
pub fn encode_basis(code: &StabilizerCode, x: &BitVector) -> Result<StateVector> {
    debug_assert_eq!(x.len(), code.k());
    let input = BitVector::zeros(code.n() - code.k()).concat(x);
    apply_circuit(&StateVector::basis(code.n(), &input)?, code.encoder_circuit())
}

/// Squared fidelity `||sqrt(rho) sqrt(sigma)||_1^2`.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let sqrt_a = psd_sqrt(&a.mat)?;
    let inner = sqrt_a.mul(&b.mat).mul(&sqrt_a);
    let (vals, _) = eigh(&inner);
    let root_sum: f64 = vals.iter().map(|&l| l.max(0.0).sqrt()).sum();
    Ok(root_sum * root_sum)
}

fn psd_sqrt(m: &CMatrix) -> Result<CMatrix> {
    let (vals, _) = eigh(m);
    if let Some(&l) = vals.first() {
        if l < -1e-9 {
            return Err(Error::NotPositive(l));
        }
    }
    Ok(hermitian_function(m, |l| l.max(0.0).sqrt()))
}

/// Trace distance `0.5 * ||a - b||_1`.
pub fn trace_distance(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            actual: b.dim(),
        });
    }
    let (vals, _) = eigh(&a.mat.sub(&b.mat));
    Ok(vals.iter().map(|l| l.abs()).sum::<f64>() / 2.0)
}

// ---------------------------------------------------------------------------
// Pretty good measurement
// ---------------------------------------------------------------------------

/// POVM in a support-projected representation: `basis` has orthonormal
/// columns spanning the support of the ensemble average, `ops` are the
/// projected POVM elements (positive semidefinite, summing to the identity
/// on the support within 1e-9), and the leftover kernel mass is the
/// designated fail outcome.
pub struct PovmSet {
    dim: usize,
    basis: CMatrix,
    ops: Vec<CMatrix>,
}

impl PovmSet {
    /// Number of proper outcomes; index `num_outcomes()` is the fail
    /// outcome in `measure`.
    pub fn num_outcomes(&self) -> usize {
        self.ops.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn support_rank(&self) -> usize {
        self.basis.cols
    }

    /// Probabilities of each outcome on `rho`; the last entry is the fail
    /// (kernel) mass.
    pub fn outcome_probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: rho.dim(),
            });
        }
        let projected = self.basis.dagger().mul(&rho.mat).mul(&self.basis);
        let mut probs = Vec::with_capacity(self.ops.len() + 1);
        let mut total = 0.0;
        for op in &self.ops {
            let p = op.mul(&projected).trace().re;
            if p < -1e-9 {
                return Err(Error::NotPositive(p));
            }
            let p = p.max(0.0);
            probs.push(p);
            total += p;
        }
        probs.push((1.0 - total).max(0.0));
        Ok(probs)
    }

    /// POVM element embedded back into the full space (for invariant
    /// checks; quadratic in the dimension).
    pub fn element_embedded(&self, i: usize) -> CMatrix {
        self.basis.mul(&self.ops[i]).mul(&self.basis.dagger())
    }

    /// `I - sum_x element(x)`: the projector-like fail element.
    pub fn fail_element(&self) -> CMatrix {
        let mut acc = CMatrix::identity(self.dim);
        for i in 0..self.ops.len() {
            acc = acc.sub(&self.element_embedded(i));
        }
        acc
    }
}

/// Pretty good measurement `Lambda_x = Sigma^(-1/2) rho_x Sigma^(-1/2)`
/// with `Sigma = sum_x rho_x`, inverses taken on the support of `Sigma`
/// (eigenvalues below `KERNEL_THRESHOLD` count as kernel).
pub fn pgm(ensemble: &[DensityMatrix]) -> Result<PovmSet> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let dim = ensemble[0].dim();
    for s in ensemble {
        if s.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: s.dim(),
            });
        }
    }
    // orthonormal basis of the joint support, from the columns of the states
    let mut basis_cols: Vec<Vec<Complex64>> = Vec::new();
    for s in ensemble {
        for j in 0..dim {
            let mut col = s.mat.column(j);
            let norm0: f64 = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm0 < 1e-12 {
                continue;
            }
            for b in &basis_cols {
                let overlap: Complex64 = b.iter().zip(col.iter()).map(|(x, y)| x.conj() * y).sum();
                for (c, bv) in col.iter_mut().zip(b.iter()) {
                    *c -= overlap * bv;
                }
            }
            let norm: f64 = col.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-9 * (1.0 + norm0) {
                for c in col.iter_mut() {
                    *c /= Complex64::new(norm, 0.0);
                }
                basis_cols.push(col);
            }
        }
    }
    let r = basis_cols.len();
    let mut q = CMatrix::zeros(dim, r);
    for (j, col) in basis_cols.iter().enumerate() {
        for i in 0..dim {
            q[(i, j)] = col[i];
        }
    }
    // Sigma in the support basis
    let mut sigma_p = CMatrix::zeros(r, r);
    let projected: Vec<CMatrix> = ensemble
        .iter()
        .map(|s| q.dagger().mul(&s.mat).mul(&q))
        .collect();
    for sp in &projected {
        sigma_p = sigma_p.add(sp);
    }
    let (vals, vecs) = eigh(&sigma_p);
    let kept: Vec<usize> = (0..r).filter(|&i| vals[i] > KERNEL_THRESHOLD).collect();
    let rk = kept.len();
    let mut w = CMatrix::zeros(r, rk);
    for (new, &old) in kept.iter().enumerate() {
        for i in 0..r {
            w[(i, new)] = vecs[(i, old)];
        }
    }
    // final basis B = Q W diagonalizes Sigma with eigenvalues vals[kept]
    let b = q.mul(&w);
    let inv_sqrt: Vec<f64> = kept.iter().map(|&i| 1.0 / vals[i].sqrt()).collect();
    let ops = projected
        .iter()
        .map(|sp| {
            let mut m = w.dagger().mul(sp).mul(&w);
            for i in 0..rk {
                for j in 0..rk {
                    let f = Complex64::new(inv_sqrt[i] * inv_sqrt[j], 0.0);
                    m[(i, j)] *= f;
                }
            }
            m
        })
        .collect();
    Ok(PovmSet {
        dim,
        basis: b,
        ops,
    })
}

/// Born-rule sampling of a POVM outcome; `num_outcomes()` denotes fail.
pub fn measure(povm: &PovmSet, rho: &DensityMatrix, rng: &mut impl Rng) -> Result<usize> {
    let probs = povm.outcome_probabilities(rho)?;
    let total: f64 = probs.iter().sum();
    let mut u = rng.gen::<f64>() * total;
    for (i, p) in probs.iter().enumerate() {
        if u < *p {
            return Ok(i);
        }
        u -= p;
    }
    Ok(probs.len() - 1)
}

// ---------------------------------------------------------------------------
// Purified instance states
// ---------------------------------------------------------------------------

/// Reduced states on the classical register of the two purifications used
/// to argue uniqueness of the decoding problem: `Q0` entangles the
/// register with noisy codewords, `Q1` with a classical copy. Support
/// enumeration follows the noise spec, so a truncated spec realizes the
/// weight-cutoff projector exactly.
pub fn purified_instance_states(
    code: &StabilizerCode,
    noise: &NoiseSpec,
) -> Result<(DensityMatrix, DensityMatrix)> {
    let n = code.n();
    let k = code.k();
    guard("purification physical qubits", n, 8)?;
    let support = noise.support(n, 1 << 16)?;
    let s = support.len();
    let s_pad = s.next_power_of_two();
    let a_qubits = k + s_pad.trailing_zeros() as usize;
    guard("purification register qubits", a_qubits, DENSITY_QUBIT_GUARD)?;
    let dim = (1 << k) * s_pad;
    // B-register states E_a |psi_x>
    let mut b_states: Vec<Vec<StateVector>> = Vec::with_capacity(1 << k);
    for xi in 0..(1usize << k) {
        let mut x = BitVector::zeros(k);
        for j in 0..k {
            x.set(j, xi >> (k - 1 - j) & 1 == 1);
        }
        let psi = encode_basis(code, &x)?;
        b_states.push(support.iter().map(|(e, _)| apply_pauli(&psi, e)).collect());
    }
    let amp = 1.0 / (1 << k) as f64;
    let mut q0 = CMatrix::zeros(dim, dim);
    let mut q1 = CMatrix::zeros(dim, dim);
    for xi in 0..(1usize << k) {
        for (a, (_, pa)) in support.iter().enumerate() {
            let row = xi * s_pad + a;
            for yi in 0..(1usize << k) {
                for (bi, (_, pb)) in support.iter().enumerate() {
                    let col = yi * s_pad + bi;
                    let weight = Complex64::new(amp * (pa * pb).sqrt(), 0.0);
                    q0[(row, col)] = weight * b_states[yi][bi].inner(&b_states[xi][a]);
                    if xi == yi && a == bi {
                        q1[(row, col)] = Complex64::new(amp * pa, 0.0);
                    }
                }
            }
        }
    }
    Ok((
        DensityMatrix::from_matrix(a_qubits, q0)?,
        DensityMatrix::from_matrix(a_qubits, q1)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::{CliffordCircuit, CliffordGate};
    use crate::pauli::random_pauli_of_weight;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn pauli(s: &str) -> PauliOperator {
        PauliOperator::parse(s).unwrap()
    }

    fn random_density(n: usize, rng: &mut impl Rng) -> DensityMatrix {
        let dim = 1 << n;
        let mut a = CMatrix::zeros(dim, dim);
        for v in a.data.iter_mut() {
            *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        }
        let h = a.mul(&a.dagger());
        let t = h.trace().re;
        DensityMatrix::from_matrix(n, h.scale(Complex64::new(1.0 / t, 0.0))).unwrap()
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let dim = rng.gen_range(1..=24usize);
            let mut a = CMatrix::zeros(dim, dim);
            for v in a.data.iter_mut() {
                *v = Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            }
            let h = a.add(&a.dagger());
            let (vals, vecs) = eigh(&h);
            // A V = V diag(vals)
            let hv = h.mul(&vecs);
            for j in 0..dim {
                for i in 0..dim {
                    let expect = vecs[(i, j)] * Complex64::new(vals[j], 0.0);
                    assert!((hv[(i, j)] - expect).norm() < 1e-8);
                }
            }
            // orthonormal columns
            let gram = vecs.dagger().mul(&vecs);
            assert!(gram.sub(&CMatrix::identity(dim)).frobenius_norm() < 1e-8);
            // ascending
            for w in vals.windows(2) {
                assert!(w[0] <= w[1] + 1e-12);
            }
        }
    }

    #[test]
    fn empty_circuit_preserves_state() {
        let s = StateVector::zero_state(3).unwrap();
        assert_eq!(apply_circuit(&s, &CliffordCircuit::empty(3)).unwrap(), s);
    }

    #[test]
    fn hadamard_makes_plus_state() {
        let s = StateVector::zero_state(1).unwrap();
        let c = CliffordCircuit::new(1, vec![CliffordGate::H(0)]).unwrap();
        let out = apply_circuit(&s, &c).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((out.amplitudes()[0] - Complex64::new(r, 0.0)).norm() < 1e-12);
        assert!((out.amplitudes()[1] - Complex64::new(r, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn repetition_encoder_stabilizes_codewords() {
        let code = StabilizerCode::repetition(3);
        for xi in [false, true] {
            let x = BitVector::from_bits(&[xi]);
            let psi = encode_basis(&code, &x).unwrap();
            for g in code.generators() {
                let e = psi.expectation(g);
                assert!((e - ONE).norm() < 1e-9, "generator expectation {e}");
            }
            // logical Z readout has eigenvalue (-1)^x
            let lz = &code.logical_z()[0];
            let e = psi.expectation(lz);
            let want = if xi { -ONE } else { ONE };
            assert!((e - want).norm() < 1e-9);
        }
    }

    #[test]
    fn dense_and_symbolic_conjugation_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(1..=5usize);
            let gates = crate::clifford::tests_support::random_gates(n, 25, &mut rng);
            let circuit = CliffordCircuit::new(n, gates).unwrap();
            let tableau = circuit.tableau();
            let mut p = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            p.set_phase_exp(if rng.gen::<bool>() { 2 } else { 0 });
            let image = tableau.conjugate(&p);
            let basis = BitVector::random(n, &mut rng);
            let v = StateVector::basis(n, &basis).unwrap();
            // U P |v> vs P' U |v>
            let lhs = apply_circuit(&apply_pauli(&v, &p), &circuit).unwrap();
            let rhs = apply_pauli(&apply_circuit(&v, &circuit).unwrap(), &image);
            for (a, b) in lhs.amplitudes().iter().zip(rhs.amplitudes()) {
                assert!((a - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn mix_ensemble_cases() {
        let zero = DensityMatrix::from_pure(&StateVector::zero_state(1).unwrap()).unwrap();
        let one = DensityMatrix::from_pure(
            &StateVector::basis(1, &BitVector::from_bits(&[true])).unwrap(),
        )
        .unwrap();
        assert_eq!(mix_ensemble(&[1.0], std::slice::from_ref(&zero)).unwrap(), zero);
        let mixed = mix_ensemble(&[0.5, 0.5], &[zero, one]).unwrap();
        assert_eq!(mixed, DensityMatrix::maximally_mixed(1).unwrap());
        assert!(matches!(
            mix_ensemble(&[0.6, 0.3], &[mixed.clone(), mixed.clone()]),
            Err(Error::WeightSum(_))
        ));
    }

    #[test]
    fn depolarizing_mix_matches_per_qubit_channel() {
        // route A: enumerate errors of the product channel
        // route B: apply the single-qubit channel qubit by qubit
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 3;
        let p = 0.2;
        let code = StabilizerCode::random(n, 1, &mut rng).unwrap();
        let x = BitVector::from_bits(&[true]);
        let route_a = noisy_codeword_density(&code, &x, &NoiseSpec::depolarizing(p)).unwrap();
        let psi = encode_basis(&code, &x).unwrap();
        let mut route_b = DensityMatrix::from_pure(&psi).unwrap();
        for q in 0..n {
            let mut acc = route_b.mat.scale(Complex64::new(1.0 - p, 0.0));
            for letter in ["X", "Y", "Z"] {
                let mut s = String::new();
                for i in 0..n {
                    s.push(if i == q {
                        letter.chars().next().unwrap()
                    } else {
                        'I'
                    });
                }
                let moved = route_b.conjugate_by_pauli(&pauli(&s));
                acc = acc.add(&moved.mat.scale(Complex64::new(p / 3.0, 0.0)));
            }
            route_b = DensityMatrix::from_matrix(n, acc).unwrap();
        }
        assert!(route_a.mat.sub(&route_b.mat).frobenius_norm() < 1e-10);
    }

    #[test]
    fn fidelity_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rho = random_density(2, &mut rng);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-7);

        let zero = DensityMatrix::from_pure(&StateVector::zero_state(1).unwrap()).unwrap();
        let one = DensityMatrix::from_pure(
            &StateVector::basis(1, &BitVector::from_bits(&[true])).unwrap(),
        )
        .unwrap();
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-9);

        let plus = {
            let c = CliffordCircuit::new(1, vec![CliffordGate::H(0)]).unwrap();
            DensityMatrix::from_pure(
                &apply_circuit(&StateVector::zero_state(1).unwrap(), &c).unwrap(),
            )
            .unwrap()
        };
        assert!((fidelity(&zero, &plus).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn trace_distance_cases() {
        let zero = DensityMatrix::from_pure(&StateVector::zero_state(1).unwrap()).unwrap();
        let one = DensityMatrix::from_pure(
            &StateVector::basis(1, &BitVector::from_bits(&[true])).unwrap(),
        )
        .unwrap();
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-12);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!((trace_distance(&zero, &mixed).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn fuchs_van_de_graaf_sandwich() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=2usize);
            let a = random_density(n, &mut rng);
            let b = random_density(n, &mut rng);
            let f = fidelity(&a, &b).unwrap();
            let d = trace_distance(&a, &b).unwrap();
            assert!(1.0 - f.sqrt() <= d + 1e-7, "lower bound violated");
            assert!(d <= (1.0 - f).sqrt() + 1e-7, "upper bound violated");
        }
    }

    #[test]
    fn pgm_orthogonal_pair_is_projective() {
        let zero = DensityMatrix::from_pure(&StateVector::zero_state(1).unwrap()).unwrap();
        let one = DensityMatrix::from_pure(
            &StateVector::basis(1, &BitVector::from_bits(&[true])).unwrap(),
        )
        .unwrap();
        let povm = pgm(&[zero.clone(), one.clone()]).unwrap();
        let p0 = povm.outcome_probabilities(&zero).unwrap();
        assert!((p0[0] - 1.0).abs() < 1e-9 && p0[1] < 1e-9 && p0[2] < 1e-9);
        let p1 = povm.outcome_probabilities(&one).unwrap();
        assert!((p1[1] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pgm_single_state_is_support_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let rho = random_density(2, &mut rng);
        let povm = pgm(std::slice::from_ref(&rho)).unwrap();
        let probs = povm.outcome_probabilities(&rho).unwrap();
        assert!((probs[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pgm_completeness_on_support() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let states: Vec<DensityMatrix> = (0..3).map(|_| random_density(2, &mut rng)).collect();
        let povm = pgm(&states).unwrap();
        let mut total = CMatrix::zeros(povm.support_rank(), povm.support_rank());
        for op in &povm.ops {
            total = total.add(op);
            // positivity
            let (vals, _) = eigh(op);
            assert!(vals.iter().all(|&l| l > -1e-9));
        }
        assert!(
            total
                .sub(&CMatrix::identity(povm.support_rank()))
                .frobenius_norm()
                < 1e-9
        );
        // fail element carries the kernel
        let fail = povm.fail_element();
        let (vals, _) = eigh(&fail);
        assert!(vals.iter().all(|&l| l > -1e-9));
    }

    #[test]
    fn pgm_error_bound_random_qubit_ensembles() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let states: Vec<DensityMatrix> = (0..3).map(|_| random_density(1, &mut rng)).collect();
            let povm = pgm(&states).unwrap();
            let mut worst: f64 = 0.0;
            for (i, s) in states.iter().enumerate() {
                let probs = povm.outcome_probabilities(s).unwrap();
                worst = worst.max(1.0 - probs[i]);
            }
            let mut bound = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    if i != j {
                        bound += fidelity(&states[i], &states[j]).unwrap().max(0.0).sqrt();
                    }
                }
            }
            assert!(worst <= bound + 1e-7, "worst {worst} > bound {bound}");
        }
    }

    #[test]
    fn measurement_sampling() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let zero = DensityMatrix::from_pure(&StateVector::zero_state(1).unwrap()).unwrap();
        let one = DensityMatrix::from_pure(
            &StateVector::basis(1, &BitVector::from_bits(&[true])).unwrap(),
        )
        .unwrap();
        let povm = pgm(&[zero.clone(), one]).unwrap();
        for _ in 0..100 {
            assert_eq!(measure(&povm, &zero, &mut rng).unwrap(), 0);
        }
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        let mut counts = [0usize; 3];
        for _ in 0..10_000 {
            counts[measure(&povm, &mixed, &mut rng).unwrap()] += 1;
        }
        assert!((counts[0] as f64 / 10_000.0 - 0.5).abs() < 0.02);
        assert_eq!(counts[2], 0);
    }

    #[test]
    fn purified_states_no_noise_are_equal() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let code = StabilizerCode::random(4, 1, &mut rng).unwrap();
        let (q0, q1) = purified_instance_states(&code, &NoiseSpec::depolarizing(0.0)).unwrap();
        assert!(trace_distance(&q0, &q1).unwrap() < 1e-10);
    }

    #[test]
    fn purified_states_five_qubit_truncated_identical() {
        let code = StabilizerCode::five_qubit();
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        let (q0, q1) = purified_instance_states(&code, &noise).unwrap();
        let f = fidelity(&q0, &q1).unwrap();
        assert!((f - 1.0).abs() < 1e-9, "fidelity {f}");
    }

    #[test]
    fn purified_states_repetition_distinguishable() {
        let code = StabilizerCode::repetition(3);
        let noise = NoiseSpec::truncated_depolarizing(0.1, 1);
        let (q0, q1) = purified_instance_states(&code, &noise).unwrap();
        let f = fidelity(&q0, &q1).unwrap();
        assert!(f < 1.0 - 1e-6, "fidelity {f} should be bounded away from 1");
    }

    #[test]
    fn guards_are_hard_errors() {
        assert!(matches!(
            StateVector::zero_state(15),
            Err(Error::GuardExceeded { .. })
        ));
        assert!(matches!(
            DensityMatrix::maximally_mixed(11),
            Err(Error::GuardExceeded { .. })
        ));
    }
}
