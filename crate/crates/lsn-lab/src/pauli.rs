//! Signed n-qubit Pauli operators in symplectic form.
//!
//! An operator is stored as `i^phase * X^x * Z^z` with `x`, `z` packed bit
//! vectors and the phase exponent tracked mod 4. The printable form uses the
//! letter decomposition (`Y` instead of `XZ`), so a leading sign of `-i`
//! means the letter product carries that phase.

use crate::error::{Error, Result};
use crate::gf2::BitVector;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Single-qubit Pauli letter.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    pub fn bits(self) -> (bool, bool) {
        match self {
            PauliLetter::I => (false, false),
            PauliLetter::X => (true, false),
            PauliLetter::Y => (true, true),
            PauliLetter::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (true, true) => PauliLetter::Y,
            (false, true) => PauliLetter::Z,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliOperator {
    n: usize,
    x: BitVector,
    z: BitVector,
    /// Exponent of `i` in the `X^x Z^z` ordering, mod 4.
    xz_phase: u8,
}

impl PauliOperator {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
            xz_phase: 0,
        }
    }

    pub fn from_parts(n: usize, x: BitVector, z: BitVector, xz_phase: u8) -> Self {
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(z.len(), n);
        Self {
            n,
            x,
            z,
            xz_phase: xz_phase % 4,
        }
    }

    /// Single-letter Pauli on one qubit of an n-qubit register.
    pub fn single(n: usize, qubit: usize, letter: PauliLetter) -> Self {
        let mut p = Self::identity(n);
        p.set_letter(qubit, letter);
        p
    }

    /// Unsigned operator from its letter assignment.
    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let n = letters.len();
        let mut p = Self::identity(n);
        for (q, &l) in letters.iter().enumerate() {
            p.set_letter(q, l);
        }
        p
    }

    /// `X^u` acting on the `len`-qubit window starting at `offset`.
    pub fn x_string(n: usize, offset: usize, u: &BitVector) -> Self {
        let mut p = Self::identity(n);
        for i in u.iter_ones() {
            p.x.set(offset + i, true);
        }
        p
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &BitVector {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVector {
        &self.z
    }

    /// In-place access for the gate-conjugation hot path.
    pub(crate) fn parts_mut(&mut self) -> (&mut BitVector, &mut BitVector, &mut u8) {
        (&mut self.x, &mut self.z, &mut self.xz_phase)
    }

    /// Symplectic representation `(x | z)` as a single 2n-bit vector.
    pub fn symplectic(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    /// Hermitian (phase-free) operator from a 2n-bit `(x | z)` vector.
    pub fn from_symplectic(n: usize, v: &BitVector) -> Self {
        debug_assert_eq!(v.len(), 2 * n);
        let p = Self {
            n,
            x: v.slice(0, n),
            z: v.slice(n, 2 * n),
            xz_phase: 0,
        };
        p.unsigned()
    }

    pub fn letter(&self, qubit: usize) -> PauliLetter {
        PauliLetter::from_bits(self.x.get(qubit), self.z.get(qubit))
    }

    /// Overwrites the letter on one qubit, keeping the letter-form phase.
    pub fn set_letter(&mut self, qubit: usize, letter: PauliLetter) {
        let was_y = self.x.get(qubit) && self.z.get(qubit);
        let (x, z) = letter.bits();
        self.x.set(qubit, x);
        self.z.set(qubit, z);
        let is_y = x && z;
        // a Y letter contributes -i in the X^x Z^z ordering
        self.xz_phase = (self.xz_phase + 4 + is_y as u8 - was_y as u8) % 4;
    }

    fn y_count(&self) -> u8 {
        let mut c = 0usize;
        for i in self.x.iter_ones() {
            if self.z.get(i) {
                c += 1;
            }
        }
        (c % 4) as u8
    }

    /// Phase exponent of the letter decomposition: the operator equals
    /// `i^phase_exp` times the tensor product of its letters.
    pub fn phase_exp(&self) -> u8 {
        (self.xz_phase + 4 - self.y_count()) % 4
    }

    /// Phase exponent in the raw `X^x Z^z` ordering.
    pub fn xz_phase_exp(&self) -> u8 {
        self.xz_phase
    }

    pub fn set_phase_exp(&mut self, letter_phase: u8) {
        self.xz_phase = (letter_phase + self.y_count()) % 4;
    }

    /// Copy with the phase masked to zero; this is the image in the
    /// quotient by `{±1, ±i}` used for errors.
    pub fn unsigned(&self) -> PauliOperator {
        let mut p = self.clone();
        p.xz_phase = p.y_count();
        debug_assert_eq!(p.phase_exp(), 0);
        p
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of non-identity tensor factors.
    pub fn weight(&self) -> usize {
        let mut w = 0;
        for i in 0..self.n {
            if self.x.get(i) || self.z.get(i) {
                w += 1;
            }
        }
        w
    }

    /// Exact signed product, including the `i` powers from X/Z reordering.
    pub fn multiply(&self, other: &PauliOperator) -> Result<PauliOperator> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        // Moving other's X block left past self's Z block picks up
        // (-1)^(self.z . other.x).
        let swaps = self.z.dot(&other.x) as u8;
        Ok(PauliOperator {
            n: self.n,
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            xz_phase: (self.xz_phase + other.xz_phase + 2 * swaps) % 4,
        })
    }

    pub fn inverse(&self) -> PauliOperator {
        let overlap = self.x.dot(&self.z) as u8;
        PauliOperator {
            n: self.n,
            x: self.x.clone(),
            z: self.z.clone(),
            xz_phase: (4 - self.xz_phase + 2 * overlap) % 4,
        }
    }

    /// Symplectic inner product `p_x.q_z + p_z.q_x` mod 2.
    pub fn symplectic_product(&self, other: &PauliOperator) -> bool {
        self.x.dot(&other.z) ^ self.z.dot(&other.x)
    }

    /// True iff the operators commute.
    pub fn commutes(&self, other: &PauliOperator) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(!self.symplectic_product(other))
    }

    /// Places `self` on a `total`-qubit register starting at `offset`.
    pub fn embed(&self, total: usize, offset: usize) -> PauliOperator {
        debug_assert!(offset + self.n <= total);
        let mut out = PauliOperator::identity(total);
        for i in self.x.iter_ones() {
            out.x.set(offset + i, true);
        }
        for i in self.z.iter_ones() {
            out.z.set(offset + i, true);
        }
        out.xz_phase = self.xz_phase;
        out
    }

    /// Restriction to the qubit window `[start, end)`.
    pub fn restrict(&self, start: usize, end: usize) -> PauliOperator {
        PauliOperator {
            n: end - start,
            x: self.x.slice(start, end),
            z: self.z.slice(start, end),
            xz_phase: 0,
        }
    }

    /// Relabels qubits: factor at qubit `i` moves to qubit `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> PauliOperator {
        debug_assert_eq!(perm.len(), self.n);
        let mut out = PauliOperator::identity(self.n);
        for i in 0..self.n {
            out.x.set(perm[i], self.x.get(i));
            out.z.set(perm[i], self.z.get(i));
        }
        out.xz_phase = self.xz_phase;
        out
    }

    pub fn parse(text: &str) -> Result<PauliOperator> {
        let t = text.trim().replace('\u{2212}', "-");
        let (phase, rest) = if let Some(r) = t.strip_prefix("+i") {
            (1u8, r)
        } else if let Some(r) = t.strip_prefix("-i") {
            (3u8, r)
        } else if let Some(r) = t.strip_prefix('+') {
            (0u8, r)
        } else if let Some(r) = t.strip_prefix('-') {
            (2u8, r)
        } else if let Some(r) = t.strip_prefix('i') {
            (1u8, r)
        } else {
            (0u8, t.as_str())
        };
        let mut letters = Vec::with_capacity(rest.len());
        for (i, c) in rest.chars().enumerate() {
            letters.push(match c {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                _ => {
                    return Err(Error::Parse {
                        location: format!("qubit {i}"),
                        message: format!("expected one of I, X, Y, Z, got {c:?}"),
                    })
                }
            });
        }
        let mut p = PauliOperator::from_letters(&letters);
        p.set_phase_exp(phase);
        Ok(p)
    }
}

impl fmt::Display for PauliOperator {
    /// Leading sign from `{+, +i, -, -i}`, then one letter per qubit,
    /// qubit 0 leftmost.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase_exp() {
            0 => "+",
            1 => "+i",
            2 => "-",
            3 => "-i",
            _ => unreachable!(),
        };
        write!(f, "{sign}")?;
        for q in 0..self.n {
            write!(f, "{}", self.letter(q).to_char())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Serialize for PauliOperator {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PauliOperator {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        PauliOperator::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Uniform unsigned Pauli of exact weight `w`: the support is a uniform
/// w-subset and each supported qubit gets a uniform letter from {X, Y, Z}.
pub fn random_pauli_of_weight(n: usize, w: usize, rng: &mut impl Rng) -> Result<PauliOperator> {
    if w > n {
        return Err(Error::InvalidParameter(format!(
            "weight {w} exceeds qubit count {n}"
        )));
    }
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..w {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut p = PauliOperator::identity(n);
    for &q in indices.iter().take(w) {
        let letter = match rng.gen_range(0..3u8) {
            0 => PauliLetter::X,
            1 => PauliLetter::Y,
            _ => PauliLetter::Z,
        };
        p.set_letter(q, letter);
    }
    Ok(p)
}

/// Number of unsigned Paulis of exact weight `w` on `n` qubits:
/// `C(n, w) * 3^w`. Saturates at `u64::MAX`.
pub fn pauli_count_of_weight(n: usize, w: usize) -> u64 {
    let mut binom = 1u128;
    for i in 0..w {
        binom = binom * (n - i) as u128 / (i + 1) as u128;
    }
    let total = binom.saturating_mul(3u128.saturating_pow(w as u32));
    u64::try_from(total).unwrap_or(u64::MAX)
}

/// Total number of unsigned Paulis with weight at most `w_max`.
pub fn pauli_count_up_to_weight(n: usize, w_max: usize) -> u64 {
    (0..=w_max.min(n))
        .map(|w| pauli_count_of_weight(n, w))
        .fold(0u64, u64::saturating_add)
}

/// Visits every unsigned Pauli of exact weight `w` in a fixed order:
/// supports in colexicographic order, letters cycling X < Y < Z with the
/// highest supported qubit fastest. Returning `false` stops the walk.
pub fn for_each_pauli_of_weight<F>(n: usize, w: usize, f: &mut F) -> bool
where
    F: FnMut(&PauliOperator) -> bool,
{
    let mut support = vec![0usize; w];
    fn supports<F>(n: usize, w: usize, support: &mut Vec<usize>, pos: usize, f: &mut F) -> bool
    where
        F: FnMut(&PauliOperator) -> bool,
    {
        if pos == 0 {
            return letters(n, support, f);
        }
        // colex: fix the largest element last; recurse over smaller subsets
        let top_min = pos - 1;
        let top_max = if pos == support.len() {
            n - 1
        } else {
            support[pos] - 1
        };
        for top in top_min..=top_max {
            support[pos - 1] = top;
            if !supports(n, w, support, pos - 1, f) {
                return false;
            }
        }
        true
    }
    fn letters<F>(n: usize, support: &[usize], f: &mut F) -> bool
    where
        F: FnMut(&PauliOperator) -> bool,
    {
        let w = support.len();
        let mut choice = vec![0u8; w];
        loop {
            let mut p = PauliOperator::identity(n);
            for (idx, &q) in support.iter().enumerate() {
                let letter = match choice[idx] {
                    0 => PauliLetter::X,
                    1 => PauliLetter::Y,
                    _ => PauliLetter::Z,
                };
                p.set_letter(q, letter);
            }
            if !f(&p) {
                return false;
            }
            // increment base-3 counter, last support position fastest
            let mut i = w;
            loop {
                if i == 0 {
                    return true;
                }
                i -= 1;
                if choice[i] < 2 {
                    choice[i] += 1;
                    choice[i + 1..].fill(0);
                    break;
                }
            }
        }
    }
    if w == 0 {
        return f(&PauliOperator::identity(n));
    }
    if w > n {
        return true;
    }
    supports(n, w, &mut support, w, f)
}

/// Visits unsigned Paulis of weight `0..=w_max` in increasing weight.
pub fn for_each_pauli_up_to_weight<F>(n: usize, w_max: usize, f: &mut F) -> bool
where
    F: FnMut(&PauliOperator) -> bool,
{
    for w in 0..=w_max.min(n) {
        if !for_each_pauli_of_weight(n, w, f) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::HashMap;

    fn p(s: &str) -> PauliOperator {
        PauliOperator::parse(s).unwrap()
    }

    #[test]
    fn x_times_z_is_minus_i_y() {
        let out = p("X").multiply(&p("Z")).unwrap();
        assert_eq!(out.to_string(), "-iY");
        assert_eq!(out.phase_exp(), 3);
        assert_eq!(out.unsigned(), p("Y"));
    }

    #[test]
    fn involutions() {
        for s in ["X", "Y", "Z"] {
            let out = p(s).multiply(&p(s)).unwrap();
            assert!(out.is_identity());
            assert_eq!(out.phase_exp(), 0);
        }
    }

    #[test]
    fn two_qubit_product() {
        let out = p("XZ").multiply(&p("ZZ")).unwrap();
        assert_eq!(out.to_string(), "-iYI");
    }

    #[test]
    fn inverse_cancels() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let n = rng.gen_range(1..=12usize);
            let mut q = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            q.set_phase_exp(rng.gen_range(0..4));
            let prod = q.multiply(&q.inverse()).unwrap();
            assert!(prod.is_identity());
            assert_eq!(prod.phase_exp(), 0);
        }
    }

    #[test]
    fn commutation_cases() {
        assert!(!p("X").commutes(&p("Z")).unwrap());
        assert!(p("XX").commutes(&p("ZZ")).unwrap());
        assert!(!p("YI").commutes(&p("XX")).unwrap());
    }

    #[test]
    fn weight_cases() {
        assert_eq!(PauliOperator::identity(6).weight(), 0);
        assert_eq!(p("XIY").weight(), 2);
        assert_eq!(p("YYYYYYY").weight(), 7);
    }

    #[test]
    fn commutes_iff_phases_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..500 {
            let n = rng.gen_range(1..=8usize);
            let a = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            let b = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            let ab = a.multiply(&b).unwrap();
            let ba = b.multiply(&a).unwrap();
            assert_eq!(ab.unsigned(), ba.unsigned());
            let same_phase = ab.phase_exp() == ba.phase_exp();
            assert_eq!(a.commutes(&b).unwrap(), same_phase);
            // phases differ by twice the symplectic product
            let delta = (ab.phase_exp() + 4 - ba.phase_exp()) % 4;
            assert_eq!(delta, 2 * (a.symplectic_product(&b) as u8));
        }
    }

    #[test]
    fn multiply_associative() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..10_000 {
            let n = rng.gen_range(1..=16usize);
            let mut ops = Vec::new();
            for _ in 0..3 {
                let mut q = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
                q.set_phase_exp(rng.gen_range(0..4));
                ops.push(q);
            }
            let left = ops[0].multiply(&ops[1]).unwrap().multiply(&ops[2]).unwrap();
            let right = ops[0].multiply(&ops[1].multiply(&ops[2]).unwrap()).unwrap();
            assert_eq!(left, right);
        }
    }

    #[test]
    fn weight_subadditive() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=10usize);
            let a = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            let b = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            assert!(a.multiply(&b).unwrap().weight() <= a.weight() + b.weight());
        }
    }

    #[test]
    fn weight_zero_always_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            assert!(random_pauli_of_weight(5, 0, &mut rng).unwrap().is_identity());
        }
    }

    #[test]
    fn weight_exceeding_n_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        assert!(random_pauli_of_weight(3, 4, &mut rng).is_err());
    }

    #[test]
    fn single_qubit_weight_one_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        let mut counts = HashMap::new();
        let draws = 30_000usize;
        for _ in 0..draws {
            let q = random_pauli_of_weight(1, 1, &mut rng).unwrap();
            *counts.entry(q.to_string()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 3);
        let expected = draws as f64 / 3.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square with 2 dof; 0.001 critical value is 13.8
        assert!(stat < 13.8, "chi-square statistic {stat}");
    }

    #[test]
    fn four_qubit_weight_one_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut counts = HashMap::new();
        let draws = 60_000usize;
        for _ in 0..draws {
            let q = random_pauli_of_weight(4, 1, &mut rng).unwrap();
            *counts.entry(q.to_string()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 12);
        let expected = draws as f64 / 12.0;
        let stat: f64 = counts
            .values()
            .map(|&c| (c as f64 - expected).powi(2) / expected)
            .sum();
        // chi-square with 11 dof; 0.001 critical value is 31.3
        assert!(stat < 31.3, "chi-square statistic {stat}");
    }

    #[test]
    fn enumeration_counts_match_formula() {
        for n in 1..=5usize {
            for w in 0..=n {
                let mut count = 0u64;
                for_each_pauli_of_weight(n, w, &mut |q| {
                    assert_eq!(q.weight(), w);
                    assert_eq!(q.phase_exp(), 0);
                    count += 1;
                    true
                });
                assert_eq!(count, pauli_count_of_weight(n, w));
            }
        }
    }

    #[test]
    fn enumeration_order_is_stable() {
        let mut seen = Vec::new();
        for_each_pauli_of_weight(3, 1, &mut |q| {
            seen.push(q.to_string());
            seen.len() < 5
        });
        assert_eq!(seen, vec!["+XII", "+YII", "+ZII", "+IXI", "+IYI"]);
    }

    #[test]
    fn text_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..300 {
            let n = rng.gen_range(1..=9usize);
            let mut q = random_pauli_of_weight(n, rng.gen_range(0..=n), &mut rng).unwrap();
            q.set_phase_exp(rng.gen_range(0..4));
            assert_eq!(PauliOperator::parse(&q.to_string()).unwrap(), q);
        }
        // unicode minus accepted on input
        assert_eq!(PauliOperator::parse("\u{2212}iY").unwrap(), p("-iY"));
    }

    #[test]
    fn serde_round_trip() {
        let q = p("-iXYZI");
        let json = serde_json::to_string(&q).unwrap();
        assert_eq!(json, "\"-iXYZI\"");
        assert_eq!(serde_json::from_str::<PauliOperator>(&json).unwrap(), q);
    }
}
