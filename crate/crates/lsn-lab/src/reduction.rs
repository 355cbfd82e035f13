//! Worst-case to average-case re-randomization: logical secret shift,
//! permutation + local-Clifford twirl of code and error, the wrapped-solver
//! pipeline, and orbit diagnostics.
//!
//! The twirl is what makes the reduction work at all: a uniform Clifford
//! would Pauli-mix a low-weight error into a weight-3n/4 mess, while the
//! permutation + local-Clifford subgroup re-randomizes the error within
//! its weight class.

use crate::clifford::{apply_gate_to_pauli, sample_plc, CliffordGate, CliffordTableau};
use crate::code::StabilizerCode;
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::instance::{InstanceForm, LsnInstance, LsnView};
use crate::noise::NoiseSpec;
use crate::pauli::{pauli_count_of_weight, PauliOperator};
use crate::stats::uniformity_pvalue;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet, VecDeque};

/// A fully explicit (possibly adversarial) decoding instance: nothing is
/// sealed here, this is the *input* of the reduction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WorstCaseInstance {
    pub code: StabilizerCode,
    pub error: PauliOperator,
    pub secret: BitVector,
    pub weight_bound: usize,
}

impl WorstCaseInstance {
    pub fn new(
        code: StabilizerCode,
        error: PauliOperator,
        secret: BitVector,
        weight_bound: usize,
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
        if error.weight() > weight_bound {
            return Err(Error::InvalidParameter(format!(
                "error weight {} exceeds declared bound {weight_bound}",
                error.weight()
            )));
        }
        Ok(Self {
            code,
            error: error.unsigned(),
            secret,
            weight_bound,
        })
    }
}

/// Left-multiplies the noisy codeword by a uniformly random logical X
/// string: the code and error are unchanged (up to a dropped global phase)
/// and the new secret is `x XOR u`, now uniform.
pub fn rerandomize_secret(
    inst: &WorstCaseInstance,
    rng: &mut impl Rng,
) -> (WorstCaseInstance, BitVector) {
    let u = BitVector::random(inst.code.k(), rng);
    let shifted = WorstCaseInstance {
        code: inst.code.clone(),
        error: inst.error.clone(),
        secret: inst.secret.xor(&u),
        weight_bound: inst.weight_bound,
    };
    (shifted, u)
}

/// Conjugates the code and the error by one uniform permutation +
/// local-Clifford unitary; the error weight is invariant and the output
/// pair is uniform over the orbit of the input pair.
pub fn twirl_code_error(inst: &WorstCaseInstance, rng: &mut impl Rng) -> WorstCaseInstance {
    let u = sample_plc(inst.code.n(), rng);
    twirl_with(inst, &u)
}

fn twirl_with(inst: &WorstCaseInstance, u: &CliffordTableau) -> WorstCaseInstance {
    let n = inst.code.n();
    let k = inst.code.k();
    let encoder = u
        .compose(inst.code.encoder())
        .expect("equal qubit counts");
    let code = StabilizerCode::from_encoder_tableau(n, k, encoder)
        .expect("twirled encoder is a valid tableau");
    WorstCaseInstance {
        code,
        error: u.conjugate(&inst.error).unsigned(),
        secret: inst.secret.clone(),
        weight_bound: inst.weight_bound,
    }
}

/// The full reduction: shift the secret, twirl code and error, hand the
/// re-randomized instance to the average-case solver, and undo the shift
/// on its answer. The packaged instance's noise field is descriptive (the
/// true error marginal is uniform over the weight class).
pub fn worst_to_average<R: Rng>(
    inst: &WorstCaseInstance,
    solver: &mut dyn FnMut(&LsnView<'_>, &mut R) -> Option<BitVector>,
    rng: &mut R,
) -> Result<Option<BitVector>> {
    let (shifted, u) = rerandomize_secret(inst, rng);
    let twirl = sample_plc(inst.code.n(), rng);
    worst_to_average_with(&shifted, &u, &twirl, solver, rng)
}

/// Deterministic core of the reduction with the randomness fixed by the
/// caller; `worst_to_average` samples `u` and the twirl uniformly.
pub fn worst_to_average_with<R: Rng>(
    shifted: &WorstCaseInstance,
    u: &BitVector,
    twirl: &CliffordTableau,
    solver: &mut dyn FnMut(&LsnView<'_>, &mut R) -> Option<BitVector>,
    rng: &mut R,
) -> Result<Option<BitVector>> {
    let twirled = twirl_with(shifted, twirl);
    let noise = NoiseSpec::truncated_depolarizing(0.75, twirled.weight_bound.max(1));
    let packaged = LsnInstance::from_parts(
        twirled.code,
        &twirled.error,
        &twirled.secret,
        noise,
        InstanceForm::Symbolic,
    )?;
    Ok(solver(&packaged.view(), rng).map(|answer| answer.xor(u)))
}

/// Joint-frequency diagnostics for the twirl: enumerates the orbit of
/// `(error, code)` under the permutation + local-Clifford group and
/// compares empirical twirl samples against the uniform distribution on
/// that orbit.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitReport {
    pub orbit_size: usize,
    pub distinct_codes: usize,
    pub samples: u64,
    pub occupied_cells: usize,
    pub chi_square: f64,
    pub p_value: f64,
    /// Exact total-variation distance between uniform-on-orbit and the
    /// product of its marginal supports.
    pub tv_to_product: f64,
    /// `1 - 1/(2 C(n,w) 3^w)`: the proven cap on that distance.
    pub tv_bound: f64,
}

const ORBIT_QUBIT_GUARD: usize = 4;

fn pair_key(error: &PauliOperator, generators: &[PauliOperator]) -> Result<(String, String)> {
    // group key: canonical sorted element list, so conjugated generating
    // sets of the same group collide
    let code_key = group_key(generators)?;
    Ok((error.to_string(), code_key))
}

fn group_key(generators: &[PauliOperator]) -> Result<String> {
    let r = generators.len();
    if r > 12 {
        return Err(Error::GuardExceeded {
            what: "orbit group enumeration",
            requested: r,
            limit: 12,
        });
    }
    let n = generators[0].num_qubits();
    let mut elems: Vec<String> = (0u32..(1 << r))
        .map(|mask| {
            let mut p = PauliOperator::identity(n);
            for (i, g) in generators.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    p = p.multiply(g).unwrap();
                }
            }
            p.to_string()
        })
        .collect();
    elems.sort();
    Ok(elems.join(";"))
}

/// Breadth-first closure of `(error, generators)` under the group
/// generators of the permutation + local-Clifford subgroup.
fn enumerate_orbit(
    code: &StabilizerCode,
    error: &PauliOperator,
) -> Result<(HashSet<(String, String)>, HashSet<String>)> {
    let n = code.n();
    let mut moves: Vec<CliffordGate> = Vec::new();
    for q in 0..n {
        moves.push(CliffordGate::H(q));
        moves.push(CliffordGate::S(q));
    }
    for q in 0..n.saturating_sub(1) {
        moves.push(CliffordGate::Swap(q, q + 1));
    }
    let mut seen: HashSet<(String, String)> = HashSet::new();
    let mut codes: HashSet<String> = HashSet::new();
    let start = (error.unsigned(), code.generators().to_vec());
    let start_key = pair_key(&start.0, &start.1)?;
    codes.insert(start_key.1.clone());
    seen.insert(start_key);
    let mut queue = VecDeque::from([start]);
    while let Some((e, gens)) = queue.pop_front() {
        for &g in &moves {
            let mut e2 = e.clone();
            apply_gate_to_pauli(g, &mut e2);
            let e2 = e2.unsigned();
            let gens2: Vec<PauliOperator> = gens
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    apply_gate_to_pauli(g, &mut q);
                    q
                })
                .collect();
            let key = pair_key(&e2, &gens2)?;
            if seen.insert(key.clone()) {
                codes.insert(key.1);
                queue.push_back((e2, gens2));
            }
        }
    }
    Ok((seen, codes))
}

/// Samples `samples` twirls of `(error, code)` and reports uniformity
/// statistics over the enumerated orbit.
pub fn orbit_statistics(
    code: &StabilizerCode,
    error: &PauliOperator,
    samples: u64,
    rng: &mut impl Rng,
) -> Result<OrbitReport> {
    let n = code.n();
    if n > ORBIT_QUBIT_GUARD {
        return Err(Error::GuardExceeded {
            what: "orbit enumeration qubits",
            requested: n,
            limit: ORBIT_QUBIT_GUARD,
        });
    }
    let (orbit, codes) = enumerate_orbit(code, error)?;
    let w = error.weight();
    let inst = WorstCaseInstance::new(code.clone(), error.clone(), BitVector::zeros(code.k()), w)?;
    let mut counts: HashMap<(String, String), u64> = HashMap::new();
    for _ in 0..samples {
        let twirled = twirl_code_error(&inst, rng);
        let key = pair_key(&twirled.error, twirled.code.generators())?;
        debug_assert!(orbit.contains(&key), "twirl left the enumerated orbit");
        *counts.entry(key).or_insert(0) += 1;
    }
    let observed: Vec<u64> = orbit
        .iter()
        .map(|key| counts.get(key).copied().unwrap_or(0))
        .collect();
    let (chi_square, p_value) = uniformity_pvalue(&observed);
    let rectangle = pauli_count_of_weight(n, w) as f64 * codes.len() as f64;
    let tv_to_product = 1.0 - orbit.len() as f64 / rectangle;
    let tv_bound = 1.0 - 1.0 / (2.0 * pauli_count_of_weight(n, w) as f64);
    Ok(OrbitReport {
        orbit_size: orbit.len(),
        distinct_codes: codes.len(),
        samples,
        occupied_cells: counts.len(),
        chi_square,
        p_value,
        tv_to_product,
        tv_bound,
    })
}
