//! Clifford unitaries as sign-carrying symplectic tableaux.
//!
//! A tableau stores the conjugation images of every `X_i` and `Z_i` as
//! signed Pauli operators, which is a complete normal form for a Clifford
//! modulo global phase. Gate conjugation rules are generated once from
//! dense 2x2 / 4x4 matrices, so the symbolic engine cannot drift from the
//! concrete unitaries.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVector};
use crate::pauli::PauliOperator;
use num_complex::Complex64;
use once_cell::sync::Lazy;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Clifford generators used throughout: Hadamard, the pi/4 phase gate,
/// Pauli gates, and the two-qubit entanglers.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CliffordGate {
    H(usize),
    S(usize),
    X(usize),
    Z(usize),
    Cnot(usize, usize),
    Cz(usize, usize),
    Swap(usize, usize),
}

impl CliffordGate {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::X(q) | CliffordGate::Z(q) => {
                vec![q]
            }
            CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) | CliffordGate::Swap(a, b) => {
                vec![a, b]
            }
        }
    }

    pub fn is_valid_on(&self, n: usize) -> bool {
        let qs = self.qubits();
        qs.iter().all(|&q| q < n) && (qs.len() == 1 || qs[0] != qs[1])
    }

    /// Gate sequence realizing the inverse (S^-1 = S^3, the rest are
    /// involutions).
    pub fn inverse_gates(&self) -> Vec<CliffordGate> {
        match *self {
            CliffordGate::S(q) => vec![CliffordGate::S(q); 3],
            g => vec![g],
        }
    }
}

// ---------------------------------------------------------------------------
// Conjugation tables, generated from dense matrices.
// ---------------------------------------------------------------------------

type CMat = Vec<Vec<Complex64>>;

fn mat_mul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for j in 0..m {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..k {
                acc += a[i][l] * b[l][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

fn dagger(a: &CMat) -> CMat {
    let n = a.len();
    let m = a[0].len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; m];
    for i in 0..n {
        for j in 0..m {
            out[j][i] = a[i][j].conj();
        }
    }
    out
}

fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac, br, bc) = (a.len(), a[0].len(), b.len(), b[0].len());
    let mut out = vec![vec![Complex64::new(0.0, 0.0); ac * bc]; ar * br];
    for i in 0..ar {
        for j in 0..ac {
            for k in 0..br {
                for l in 0..bc {
                    out[i * br + k][j * bc + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

fn mats_close(a: &CMat, b: &CMat) -> bool {
    a.iter()
        .zip(b)
        .all(|(ra, rb)| ra.iter().zip(rb).all(|(x, y)| (x - y).norm() < 1e-9))
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Dense `X^x Z^z` on one qubit (no letter-form phase adjustment).
fn xz_matrix(x: bool, z: bool) -> CMat {
    match (x, z) {
        (false, false) => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]],
        (true, false) => vec![vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
        (false, true) => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(-1.0, 0.0)]],
        // XZ = [[0,-1],[1,0]]
        (true, true) => vec![vec![c(0.0, 0.0), c(-1.0, 0.0)], vec![c(1.0, 0.0), c(0.0, 0.0)]],
    }
}

pub(crate) fn gate_matrix_1q(kind: char) -> CMat {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match kind {
        'H' => vec![vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]],
        'S' => vec![vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 1.0)]],
        'X' => xz_matrix(true, false),
        'Z' => xz_matrix(false, true),
        _ => unreachable!(),
    }
}

pub(crate) fn gate_matrix_2q(kind: char) -> CMat {
    let mut m = vec![vec![c(0.0, 0.0); 4]; 4];
    match kind {
        // basis order |first second>
        'C' => {
            // CNOT, first = control
            for (i, j) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
                m[j][i] = c(1.0, 0.0);
            }
        }
        'Z' => {
            for i in 0..4 {
                m[i][i] = c(if i == 3 { -1.0 } else { 1.0 }, 0.0);
            }
        }
        'W' => {
            // SWAP
            for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
                m[j][i] = c(1.0, 0.0);
            }
        }
        _ => unreachable!(),
    }
    m
}

/// Entry: output `(x', z')` bits plus the extra power of `i` picked up in
/// the `X^x Z^z` ordering.
#[derive(Copy, Clone)]
struct Conj1 {
    x: bool,
    z: bool,
    phase: u8,
}

#[derive(Copy, Clone)]
struct Conj2 {
    bits: [bool; 4],
    phase: u8,
}

fn build_table_1q(kind: char) -> [Conj1; 4] {
    let g = gate_matrix_1q(kind);
    let gd = dagger(&g);
    let mut table = [Conj1 {
        x: false,
        z: false,
        phase: 0,
    }; 4];
    for idx in 0..4usize {
        let (x, z) = (idx & 2 != 0, idx & 1 != 0);
        let conj = mat_mul(&mat_mul(&g, &xz_matrix(x, z)), &gd);
        let mut found = false;
        'search: for phase in 0..4u8 {
            let ip = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][phase as usize];
            for cand in 0..4usize {
                let (cx, cz) = (cand & 2 != 0, cand & 1 != 0);
                let mut m = xz_matrix(cx, cz);
                for row in m.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= ip;
                    }
                }
                if mats_close(&conj, &m) {
                    table[idx] = Conj1 {
                        x: cx,
                        z: cz,
                        phase,
                    };
                    found = true;
                    break 'search;
                }
            }
        }
        assert!(found, "conjugation image not a signed Pauli");
    }
    table
}

fn build_table_2q(kind: char) -> [Conj2; 16] {
    let g = gate_matrix_2q(kind);
    let gd = dagger(&g);
    let mut table = [Conj2 {
        bits: [false; 4],
        phase: 0,
    }; 16];
    for idx in 0..16usize {
        // bit layout: (xa, xb, za, zb)
        let bits = [idx & 8 != 0, idx & 4 != 0, idx & 2 != 0, idx & 1 != 0];
        let pauli = kron(&xz_matrix(bits[0], bits[2]), &xz_matrix(bits[1], bits[3]));
        let conj = mat_mul(&mat_mul(&g, &pauli), &gd);
        let mut found = false;
        'search: for phase in 0..4u8 {
            let ip = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)][phase as usize];
            for cand in 0..16usize {
                let cb = [cand & 8 != 0, cand & 4 != 0, cand & 2 != 0, cand & 1 != 0];
                let mut m = kron(&xz_matrix(cb[0], cb[2]), &xz_matrix(cb[1], cb[3]));
                for row in m.iter_mut() {
                    for v in row.iter_mut() {
                        *v *= ip;
                    }
                }
                if mats_close(&conj, &m) {
                    table[idx] = Conj2 { bits: cb, phase };
                    found = true;
                    break 'search;
                }
            }
        }
        assert!(found, "conjugation image not a signed Pauli");
    }
    table
}

static TABLE_H: Lazy<[Conj1; 4]> = Lazy::new(|| build_table_1q('H'));
static TABLE_S: Lazy<[Conj1; 4]> = Lazy::new(|| build_table_1q('S'));
static TABLE_X: Lazy<[Conj1; 4]> = Lazy::new(|| build_table_1q('X'));
static TABLE_Z: Lazy<[Conj1; 4]> = Lazy::new(|| build_table_1q('Z'));
static TABLE_CNOT: Lazy<[Conj2; 16]> = Lazy::new(|| build_table_2q('C'));
static TABLE_CZ: Lazy<[Conj2; 16]> = Lazy::new(|| build_table_2q('Z'));
static TABLE_SWAP: Lazy<[Conj2; 16]> = Lazy::new(|| build_table_2q('W'));

/// Conjugates `p` by a single gate, in place and sign-exact.
pub fn apply_gate_to_pauli(gate: CliffordGate, p: &mut PauliOperator) {
    match gate {
        CliffordGate::H(q) | CliffordGate::S(q) | CliffordGate::X(q) | CliffordGate::Z(q) => {
            let table: &[Conj1; 4] = match gate {
                CliffordGate::H(_) => &TABLE_H,
                CliffordGate::S(_) => &TABLE_S,
                CliffordGate::X(_) => &TABLE_X,
                _ => &TABLE_Z,
            };
            let (x, z, phase) = p.parts_mut();
            let idx = ((x.get(q) as usize) << 1) | z.get(q) as usize;
            let e = table[idx];
            *phase = (*phase + e.phase) % 4;
            x.set(q, e.x);
            z.set(q, e.z);
        }
        CliffordGate::Cnot(a, b) | CliffordGate::Cz(a, b) | CliffordGate::Swap(a, b) => {
            let table: &[Conj2; 16] = match gate {
                CliffordGate::Cnot(..) => &TABLE_CNOT,
                CliffordGate::Cz(..) => &TABLE_CZ,
                _ => &TABLE_SWAP,
            };
            let (x, z, phase) = p.parts_mut();
            let idx = ((x.get(a) as usize) << 3)
                | ((x.get(b) as usize) << 2)
                | ((z.get(a) as usize) << 1)
                | z.get(b) as usize;
            let e = table[idx];
            *phase = (*phase + e.phase) % 4;
            x.set(a, e.bits[0]);
            x.set(b, e.bits[1]);
            z.set(a, e.bits[2]);
            z.set(b, e.bits[3]);
        }
    }
}

// ---------------------------------------------------------------------------
// Circuits
// ---------------------------------------------------------------------------

/// Ordered gate list; gates apply left to right.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliffordCircuit {
    pub n: usize,
    pub gates: Vec<CliffordGate>,
}

impl<'de> Deserialize<'de> for CliffordCircuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            gates: Vec<CliffordGate>,
        }
        let raw = Raw::deserialize(d)?;
        CliffordCircuit::new(raw.n, raw.gates).map_err(serde::de::Error::custom)
    }
}

impl CliffordCircuit {
    pub fn empty(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    pub fn new(n: usize, gates: Vec<CliffordGate>) -> Result<Self> {
        for g in &gates {
            if !g.is_valid_on(n) {
                return Err(Error::InvalidParameter(format!(
                    "gate {g:?} invalid on {n} qubits"
                )));
            }
        }
        Ok(Self { n, gates })
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// `U p U^dag` computed gate by gate; cost linear in circuit size.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        let mut out = p.clone();
        for &g in &self.gates {
            apply_gate_to_pauli(g, &mut out);
        }
        out
    }

    /// Reversed, gate-wise inverted circuit.
    pub fn inverse(&self) -> CliffordCircuit {
        let gates = self
            .gates
            .iter()
            .rev()
            .flat_map(|g| g.inverse_gates())
            .collect();
        CliffordCircuit { n: self.n, gates }
    }

    /// Rewrites every SWAP as its three-CNOT expansion.
    pub fn expand_swaps(&self) -> CliffordCircuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for &g in &self.gates {
            if let CliffordGate::Swap(a, b) = g {
                gates.push(CliffordGate::Cnot(a, b));
                gates.push(CliffordGate::Cnot(b, a));
                gates.push(CliffordGate::Cnot(a, b));
            } else {
                gates.push(g);
            }
        }
        CliffordCircuit { n: self.n, gates }
    }

    pub fn tableau(&self) -> CliffordTableau {
        tableau_from_circuit(self)
    }
}

// ---------------------------------------------------------------------------
// Tableaux
// ---------------------------------------------------------------------------

/// Conjugation images of all `X_i` and `Z_i`; the normal form of a Clifford
/// modulo global phase.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CliffordTableau {
    n: usize,
    x_images: Vec<PauliOperator>,
    z_images: Vec<PauliOperator>,
}

impl<'de> Deserialize<'de> for CliffordTableau {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            x_images: Vec<PauliOperator>,
            z_images: Vec<PauliOperator>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.x_images.len() != raw.n {
            return Err(serde::de::Error::custom("image count does not match n"));
        }
        CliffordTableau::from_images(raw.x_images, raw.z_images).map_err(serde::de::Error::custom)
    }
}

impl std::fmt::Debug for CliffordTableau {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "CliffordTableau n={} [", self.n)?;
        for i in 0..self.n {
            writeln!(f, "  X{} -> {}   Z{} -> {}", i, self.x_images[i], i, self.z_images[i])?;
        }
        write!(f, "]")
    }
}

impl CliffordTableau {
    pub fn identity(n: usize) -> Self {
        use crate::pauli::PauliLetter;
        Self {
            n,
            x_images: (0..n)
                .map(|q| PauliOperator::single(n, q, PauliLetter::X))
                .collect(),
            z_images: (0..n)
                .map(|q| PauliOperator::single(n, q, PauliLetter::Z))
                .collect(),
        }
    }

    pub fn from_images(
        x_images: Vec<PauliOperator>,
        z_images: Vec<PauliOperator>,
    ) -> Result<Self> {
        let n = x_images.len();
        if z_images.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: z_images.len(),
            });
        }
        let t = Self {
            n,
            x_images,
            z_images,
        };
        if !t.is_valid() {
            return Err(Error::InvalidParameter(
                "images do not satisfy the symplectic conditions".into(),
            ));
        }
        Ok(t)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_image(&self, i: usize) -> &PauliOperator {
        &self.x_images[i]
    }

    pub fn z_image(&self, i: usize) -> &PauliOperator {
        &self.z_images[i]
    }

    /// Checks the symplectic conditions: `image(X_i)` anticommutes with
    /// `image(Z_i)`, every other pair commutes, and all rows are Hermitian.
    pub fn is_valid(&self) -> bool {
        let n = self.n;
        for i in 0..n {
            if self.x_images[i].num_qubits() != n || self.z_images[i].num_qubits() != n {
                return false;
            }
            if self.x_images[i].phase_exp() % 2 != 0 || self.z_images[i].phase_exp() % 2 != 0 {
                return false;
            }
            if !self.x_images[i].symplectic_product(&self.z_images[i]) {
                return false;
            }
            for j in (i + 1)..n {
                if self.x_images[i].symplectic_product(&self.x_images[j])
                    || self.z_images[i].symplectic_product(&self.z_images[j])
                    || self.x_images[i].symplectic_product(&self.z_images[j])
                    || self.z_images[i].symplectic_product(&self.x_images[j])
                {
                    return false;
                }
            }
        }
        true
    }

    fn debug_validate(&self) {
        debug_assert!(self.is_valid(), "tableau lost symplectic validity");
    }

    /// Exact signed `U p U^dag` by combining image rows; cost is linear in
    /// `n * weight(p)` word operations.
    pub fn conjugate(&self, p: &PauliOperator) -> PauliOperator {
        debug_assert_eq!(p.num_qubits(), self.n);
        let mut out = PauliOperator::from_parts(
            self.n,
            BitVector::zeros(self.n),
            BitVector::zeros(self.n),
            p.xz_phase_exp(),
        );
        for i in p.x_bits().iter_ones() {
            out = out.multiply(&self.x_images[i]).expect("equal n");
        }
        for i in p.z_bits().iter_ones() {
            out = out.multiply(&self.z_images[i]).expect("equal n");
        }
        out
    }

    /// Left-composes a gate: the tableau becomes `G * U`.
    pub fn apply_gate(&mut self, gate: CliffordGate) {
        for row in self.x_images.iter_mut().chain(self.z_images.iter_mut()) {
            apply_gate_to_pauli(gate, row);
        }
        #[cfg(debug_assertions)]
        self.debug_validate();
    }

    /// Tableau of the product `A * B` (B acts first).
    pub fn compose(&self, b: &CliffordTableau) -> Result<CliffordTableau> {
        if self.n != b.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: b.n,
            });
        }
        let t = CliffordTableau {
            n: self.n,
            x_images: b.x_images.iter().map(|p| self.conjugate(p)).collect(),
            z_images: b.z_images.iter().map(|p| self.conjugate(p)).collect(),
        };
        t.debug_validate();
        Ok(t)
    }

    /// 2n x 2n binary symplectic matrix; column `i` is the image of `X_i`,
    /// column `n+i` the image of `Z_i`, in `(x|z)` coordinates.
    pub fn symplectic_matrix(&self) -> BitMatrix {
        let n = self.n;
        let mut m = BitMatrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for (col, img) in [(i, &self.x_images[i]), (n + i, &self.z_images[i])] {
                let v = img.symplectic();
                for r in v.iter_ones() {
                    m.set(r, col, true);
                }
            }
        }
        m
    }

    /// Tableau of `U^dag`.
    pub fn inverse(&self) -> CliffordTableau {
        let n = self.n;
        let m = self.symplectic_matrix();
        // symplectic inverse: M^-1 = Omega M^T Omega with Omega swapping halves
        let mt = m.transpose();
        let swap_halves = |v: &BitVector| -> BitVector {
            let x = v.slice(0, n);
            let z = v.slice(n, 2 * n);
            z.concat(&x)
        };
        let build = |col_of: &dyn Fn(usize) -> usize| -> Vec<PauliOperator> {
            (0..n)
                .map(|i| {
                    let target = col_of(i);
                    // column `target` of M^-1 = Omega M^T Omega
                    let e = BitVector::unit(2 * n, target);
                    let col = mt.mat_vec_mul(&swap_halves(&e)).expect("square");
                    let mut q = PauliOperator::from_symplectic(n, &swap_halves(&col));
                    // fix the sign so that U q U^dag = +basis Pauli
                    let image = self.conjugate(&q);
                    debug_assert!(image.phase_exp() % 2 == 0);
                    if image.phase_exp() == 2 {
                        q.set_phase_exp(2);
                    }
                    q
                })
                .collect()
        };
        let x_images = build(&|i| i);
        let z_images = build(&|i| n + i);
        let t = CliffordTableau {
            n,
            x_images,
            z_images,
        };
        t.debug_validate();
        t
    }

    /// Block embedding into a larger register at qubit `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> CliffordTableau {
        let mut t = CliffordTableau::identity(total);
        for i in 0..self.n {
            t.x_images[offset + i] = self.x_images[i].embed(total, offset);
            t.z_images[offset + i] = self.z_images[i].embed(total, offset);
        }
        t
    }

    /// Tensor product of block tableaux.
    pub fn tensor(blocks: &[&CliffordTableau]) -> CliffordTableau {
        let total: usize = blocks.iter().map(|b| b.n).sum();
        let mut t = CliffordTableau::identity(total);
        let mut offset = 0;
        for b in blocks {
            for i in 0..b.n {
                t.x_images[offset + i] = b.x_images[i].embed(total, offset);
                t.z_images[offset + i] = b.z_images[i].embed(total, offset);
            }
            offset += b.n;
        }
        t.debug_validate();
        t
    }

    /// When the tableau lies in the permutation + local-Clifford subgroup,
    /// returns the qubit permutation it realizes.
    pub fn plc_structure(&self) -> Option<Permutation> {
        let mut map = vec![usize::MAX; self.n];
        for i in 0..self.n {
            let xs: Vec<usize> = support(&self.x_images[i]);
            let zs: Vec<usize> = support(&self.z_images[i]);
            if xs.len() != 1 || zs.len() != 1 || xs[0] != zs[0] {
                return None;
            }
            map[i] = xs[0];
        }
        Permutation::new(map).ok()
    }
}

fn support(p: &PauliOperator) -> Vec<usize> {
    (0..p.num_qubits())
        .filter(|&q| p.x_bits().get(q) || p.z_bits().get(q))
        .collect()
}

/// Left-to-right fold of per-gate conjugation rules.
pub fn tableau_from_circuit(c: &CliffordCircuit) -> CliffordTableau {
    let mut t = CliffordTableau::identity(c.n);
    for &g in &c.gates {
        debug_assert!(g.is_valid_on(c.n));
        for row in t.x_images.iter_mut().chain(t.z_images.iter_mut()) {
            apply_gate_to_pauli(g, row);
        }
    }
    t.debug_validate();
    t
}

// ---------------------------------------------------------------------------
// Permutations
// ---------------------------------------------------------------------------

/// Bijection on qubit labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation {
    map: Vec<usize>,
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for &v in &map {
            if v >= n || seen[v] {
                return Err(Error::InvalidParameter("not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(Self { map })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
        }
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut map: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.gen_range(0..=i);
            map.swap(i, j);
        }
        Self { map }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { map: inv }
    }

    pub fn compose(&self, other: &Permutation) -> Permutation {
        // (self o other)(i) = self(other(i))
        Permutation {
            map: other.map.iter().map(|&i| self.map[i]).collect(),
        }
    }

    /// Tableau of the permutation operator: conjugation moves the factor at
    /// qubit `i` to qubit `perm(i)`.
    pub fn tableau(&self) -> CliffordTableau {
        use crate::pauli::PauliLetter;
        let n = self.map.len();
        CliffordTableau {
            n,
            x_images: (0..n)
                .map(|i| PauliOperator::single(n, self.map[i], PauliLetter::X))
                .collect(),
            z_images: (0..n)
                .map(|i| PauliOperator::single(n, self.map[i], PauliLetter::Z))
                .collect(),
        }
    }
}

/// SWAP-gate circuit realizing the permutation operator; each SWAP expands
/// to three CNOTs via `expand_swaps`.
pub fn permutation_circuit(perm: &Permutation) -> CliffordCircuit {
    let n = perm.len();
    let mut gates = Vec::new();
    let mut visited = vec![false; n];
    for start in 0..n {
        if visited[start] || perm.apply(start) == start {
            visited[start] = true;
            continue;
        }
        // walk the cycle start -> perm(start) -> ...
        let mut cycle = vec![start];
        visited[start] = true;
        let mut cur = perm.apply(start);
        while cur != start {
            visited[cur] = true;
            cycle.push(cur);
            cur = perm.apply(cur);
        }
        // (c0 c1 ... c_{l-1}) = (c0 c_{l-1}) o ... o (c0 c1); gates apply in
        // reverse of the operator product
        for &q in cycle.iter().skip(1) {
            gates.push(CliffordGate::Swap(cycle[0], q));
        }
    }
    CliffordCircuit { n, gates }
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

fn swap_halves(v: &BitVector, n: usize) -> BitVector {
    v.slice(n, 2 * n).concat(&v.slice(0, n))
}

fn random_combination(basis: &[BitVector], dim: usize, rng: &mut impl Rng) -> BitVector {
    let mut out = BitVector::zeros(dim);
    for b in basis {
        if rng.gen::<bool>() {
            out.xor_assign(b);
        }
    }
    out
}

fn random_nonzero_combination(basis: &[BitVector], dim: usize, rng: &mut impl Rng) -> BitVector {
    loop {
        let mut out = BitVector::zeros(dim);
        let mut any = false;
        for b in basis {
            if rng.gen::<bool>() {
                out.xor_assign(b);
                any = true;
            }
        }
        if any && !out.is_zero() {
            return out;
        }
    }
}

/// Uniform tableau over the Clifford group modulo global phase.
///
/// Row-wise symplectic construction: each `(X_i, Z_i)` image pair is a
/// uniform anticommuting pair inside the symplectic complement of the
/// previously fixed pairs, then all 2n sign bits are uniform. Every
/// symplectic matrix arises in exactly one way, so the output is exactly
/// uniform. Up to 64 qubits the construction runs on packed 128-bit
/// symplectic vectors.
pub fn sample_uniform_clifford(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    assert!(n >= 1);
    if n <= 64 {
        return sample_uniform_clifford_packed(n, rng);
    }
    sample_uniform_clifford_generic(n, rng)
}

/// Packed fast path: symplectic vectors live in a u128 as `(x | z)`.
fn sample_uniform_clifford_packed(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    let dim = 2 * n;
    let dim_mask: u128 = if dim == 128 { !0 } else { (1u128 << dim) - 1 };
    let half_mask: u128 = (1u128 << n) - 1;
    let sp = |a: u128, b: u128| -> bool {
        let swapped = ((b >> n) & half_mask) | ((b & half_mask) << n);
        (a & swapped).count_ones() & 1 == 1
    };
    // the pool spans the symplectic complement of the fixed pairs; a
    // uniform 0/1 combination of a spanning set is uniform over its span
    let mut pool: Vec<u128> = (0..dim).map(|i| 1u128 << i).collect();
    let combine = |pool: &[u128], rng: &mut dyn rand::RngCore| -> u128 {
        let coeff = ((rng.next_u64() as u128) | ((rng.next_u64() as u128) << 64)) & dim_mask;
        let mut acc = 0u128;
        for (j, &u) in pool.iter().enumerate() {
            if coeff >> j & 1 == 1 {
                acc ^= u;
            }
        }
        acc
    };
    let mut x_rows = Vec::with_capacity(n);
    let mut z_rows = Vec::with_capacity(n);
    for _ in 0..n {
        let v = loop {
            let cand = combine(&pool, rng);
            if cand != 0 {
                break cand;
            }
        };
        let w = loop {
            let cand = combine(&pool, rng);
            if sp(v, cand) {
                break cand;
            }
        };
        for u in pool.iter_mut() {
            let mut next = *u;
            if sp(next, w) {
                next ^= v;
            }
            if sp(*u, v) {
                next ^= w;
            }
            *u = next;
        }
        x_rows.push(v);
        z_rows.push(w);
    }
    let build = |rows: Vec<u128>, rng: &mut dyn rand::RngCore| -> Vec<PauliOperator> {
        rows.into_iter()
            .map(|bits| {
                let mut v = BitVector::zeros(dim);
                for i in 0..dim {
                    if bits >> i & 1 == 1 {
                        v.set(i, true);
                    }
                }
                let mut p = PauliOperator::from_symplectic(n, &v);
                p.set_phase_exp(if rng.next_u32() & 1 == 1 { 2 } else { 0 });
                p
            })
            .collect()
    };
    let t = CliffordTableau {
        n,
        x_images: build(x_rows, rng),
        z_images: build(z_rows, rng),
    };
    t.debug_validate();
    t
}

fn sample_uniform_clifford_generic(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    let dim = 2 * n;
    let mut x_rows: Vec<BitVector> = Vec::with_capacity(n);
    let mut z_rows: Vec<BitVector> = Vec::with_capacity(n);
    let mut constraint_rows: Vec<BitVector> = Vec::new();
    for _ in 0..n {
        // v uniform nonzero with <v, fixed> = 0 for all fixed vectors
        let constraints = BitMatrix::from_rows(
            constraint_rows
                .iter()
                .map(|r| swap_halves(r, n))
                .collect::<Vec<_>>(),
        );
        let v = if constraint_rows.is_empty() {
            loop {
                let cand = BitVector::random(dim, rng);
                if !cand.is_zero() {
                    break cand;
                }
            }
        } else {
            let basis = constraints.nullspace();
            random_nonzero_combination(&basis, dim, rng)
        };
        // w uniform with <w, v> = 1 and <w, fixed> = 0
        let mut rows: Vec<BitVector> = constraint_rows.iter().map(|r| swap_halves(r, n)).collect();
        rows.push(swap_halves(&v, n));
        let m = BitMatrix::from_rows(rows);
        let mut rhs = BitVector::zeros(m.rows());
        rhs.set(m.rows() - 1, true);
        let particular = m
            .solve(&rhs)
            .expect("dims agree")
            .expect("independent constraints are solvable");
        let w = {
            let mut w = particular;
            w.xor_assign(&random_combination(&m.nullspace(), dim, rng));
            w
        };
        constraint_rows.push(v.clone());
        constraint_rows.push(w.clone());
        x_rows.push(v);
        z_rows.push(w);
    }
    let sign = |rng: &mut dyn rand::RngCore| if rng.gen::<bool>() { 2u8 } else { 0u8 };
    let build = |rows: Vec<BitVector>, rng: &mut dyn rand::RngCore| -> Vec<PauliOperator> {
        rows.into_iter()
            .map(|v| {
                let mut p = PauliOperator::from_symplectic(n, &v);
                p.set_phase_exp(sign(rng));
                p
            })
            .collect()
    };
    let t = CliffordTableau {
        n,
        x_images: build(x_rows, rng),
        z_images: build(z_rows, rng),
    };
    t.debug_validate();
    t
}

/// The 24 single-qubit Clifford tableaux in a fixed order.
pub fn single_qubit_cliffords() -> Vec<CliffordTableau> {
    use crate::pauli::PauliLetter::*;
    let letters = [X, Y, Z];
    let mut out = Vec::with_capacity(24);
    for &lx in &letters {
        for &lz in &letters {
            if lx == lz {
                continue;
            }
            for sx in [0u8, 2] {
                for sz in [0u8, 2] {
                    let mut px = PauliOperator::single(1, 0, lx);
                    px.set_phase_exp(sx);
                    let mut pz = PauliOperator::single(1, 0, lz);
                    pz.set_phase_exp(sz);
                    out.push(CliffordTableau {
                        n: 1,
                        x_images: vec![px],
                        z_images: vec![pz],
                    });
                }
            }
        }
    }
    out
}

/// Uniform element of the permutation + local-Clifford subgroup: the
/// tableau of `(tensor of uniform single-qubit Cliffords) o Q(pi)` with
/// `pi` uniform.
pub fn sample_plc(n: usize, rng: &mut impl Rng) -> CliffordTableau {
    assert!(n >= 1);
    let locals = single_qubit_cliffords();
    let perm = Permutation::random(n, rng);
    let choice: Vec<usize> = (0..n).map(|_| rng.gen_range(0..24)).collect();
    let mut x_images = Vec::with_capacity(n);
    let mut z_images = Vec::with_capacity(n);
    for i in 0..n {
        let target = perm.apply(i);
        let local = &locals[choice[target]];
        x_images.push(local.x_images[0].embed(n, target));
        z_images.push(local.z_images[0].embed(n, target));
    }
    let t = CliffordTableau {
        n,
        x_images,
        z_images,
    };
    t.debug_validate();
    t
}

// ---------------------------------------------------------------------------
// Circuit synthesis from a tableau
// ---------------------------------------------------------------------------

/// Options for `synthesize_circuit`: when `fix_x_image_signs` is false the
/// signs of the `X_i` images are left floating (the caller treats them as
/// free), which keeps the gate set to {H, S, CNOT, CZ, SWAP, X}.
pub(crate) fn synthesize_circuit_opts(
    target: &CliffordTableau,
    fix_x_image_signs: bool,
) -> CliffordCircuit {
    let n = target.num_qubits();
    let mut cur = target.clone();
    let mut ops: Vec<CliffordGate> = Vec::new();
    let emit = |cur: &mut CliffordTableau, ops: &mut Vec<CliffordGate>, g: CliffordGate| {
        cur.apply_gate(g);
        ops.push(g);
    };
    for i in 0..n {
        // reduce image(X_i) to +-X_i
        let has_x = |p: &PauliOperator, q: usize| p.x_bits().get(q);
        let has_z = |p: &PauliOperator, q: usize| p.z_bits().get(q);
        let pivot_x = (i..n).find(|&q| has_x(&cur.x_images[i], q));
        if pivot_x.is_none() {
            let q = (i..n)
                .find(|&q| has_z(&cur.x_images[i], q))
                .expect("nonzero row");
            emit(&mut cur, &mut ops, CliffordGate::H(q));
        }
        let pivot = (i..n).find(|&q| has_x(&cur.x_images[i], q)).unwrap();
        if pivot != i {
            emit(&mut cur, &mut ops, CliffordGate::Swap(i, pivot));
        }
        for j in (i + 1)..n {
            if has_x(&cur.x_images[i], j) {
                emit(&mut cur, &mut ops, CliffordGate::Cnot(i, j));
            }
        }
        if has_z(&cur.x_images[i], i) {
            emit(&mut cur, &mut ops, CliffordGate::S(i));
        }
        for j in (i + 1)..n {
            if has_z(&cur.x_images[i], j) {
                emit(&mut cur, &mut ops, CliffordGate::Cz(i, j));
            }
        }
        debug_assert_eq!(cur.x_images[i].unsigned().to_string(), {
            let mut s = String::from("+");
            for q in 0..n {
                s.push(if q == i { 'X' } else { 'I' });
            }
            s
        });
        // reduce image(Z_i) to +-Z_i, preserving X_i
        let z_is_reduced = |p: &PauliOperator| {
            support(p) == vec![i] && !p.x_bits().get(i) && p.z_bits().get(i)
        };
        if !z_is_reduced(&cur.z_images[i]) {
            emit(&mut cur, &mut ops, CliffordGate::H(i));
            debug_assert!(has_x(&cur.z_images[i], i));
            for j in (i + 1)..n {
                if has_x(&cur.z_images[i], j) {
                    emit(&mut cur, &mut ops, CliffordGate::Cnot(i, j));
                }
            }
            if has_z(&cur.z_images[i], i) {
                emit(&mut cur, &mut ops, CliffordGate::S(i));
            }
            for j in (i + 1)..n {
                if has_z(&cur.z_images[i], j) {
                    emit(&mut cur, &mut ops, CliffordGate::Cz(i, j));
                }
            }
            emit(&mut cur, &mut ops, CliffordGate::H(i));
        }
    }
    // Pauli sign corrections; these land at the start of the output circuit.
    for i in 0..n {
        if cur.z_images[i].phase_exp() == 2 {
            emit(&mut cur, &mut ops, CliffordGate::X(i));
        }
        if fix_x_image_signs && cur.x_images[i].phase_exp() == 2 {
            emit(&mut cur, &mut ops, CliffordGate::Z(i));
        }
    }
    debug_assert!(cur
        .z_images
        .iter()
        .enumerate()
        .all(|(i, p)| p == CliffordTableau::identity(n).z_image(i)));
    // ops reduce the target to identity from the left, so the circuit is the
    // reversed list of inverse gates
    let gates = ops.iter().rev().flat_map(|g| g.inverse_gates()).collect();
    CliffordCircuit { n, gates }
}

/// Gate list whose tableau reproduces `target` exactly, signs included.
pub fn synthesize_circuit(target: &CliffordTableau) -> CliffordCircuit {
    synthesize_circuit_opts(target, true)
}

#[cfg(test)]
pub(crate) mod tests_support {
    use super::CliffordGate;
    use rand::Rng;

    /// Random gate words over the full generating set, for oracle tests.
    pub(crate) fn random_gates(n: usize, len: usize, rng: &mut impl Rng) -> Vec<CliffordGate> {
        (0..len)
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
            .collect()
    }
}
