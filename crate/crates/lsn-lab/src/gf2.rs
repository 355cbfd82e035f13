//! Bit-packed linear algebra over GF(2).
//!
//! Vectors and matrices are stored as little-endian `u64` words: bit `i`
//! of a vector lives in word `i / 64` at position `i % 64`. Elimination
//! routines pivot on the lowest available index and zero free variables,
//! so every solver in this module is deterministic.

use crate::error::{Error, Result};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;

const WORD_BITS: usize = 64;

fn words_for(len: usize) -> usize {
    len.div_ceil(WORD_BITS)
}

/// Dense GF(2) vector with packed 64-bit words.
///
/// Bits past `len` in the last word are kept at zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Vector with a single bit set.
    pub fn unit(len: usize, bit: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(bit, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    /// Uniformly random vector of the given length.
    pub fn random(len: usize, rng: &mut impl Rng) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = rng.gen();
        }
        v.mask_tail();
        v
    }

    fn mask_tail(&mut self) {
        let rem = self.len % WORD_BITS;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
        if self.len == 0 {
            self.words.clear();
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, bit: usize) -> bool {
        debug_assert!(bit < self.len);
        (self.words[bit / WORD_BITS] >> (bit % WORD_BITS)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, bit: usize, value: bool) {
        debug_assert!(bit < self.len);
        let mask = 1u64 << (bit % WORD_BITS);
        if value {
            self.words[bit / WORD_BITS] |= mask;
        } else {
            self.words[bit / WORD_BITS] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, bit: usize) {
        debug_assert!(bit < self.len);
        self.words[bit / WORD_BITS] ^= 1u64 << (bit % WORD_BITS);
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(other.words.iter()) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over GF(2): parity of the AND.
    pub fn dot(&self, other: &BitVector) -> bool {
        debug_assert_eq!(self.len, other.len);
        let mut acc = 0u32;
        for (a, b) in self.words.iter().zip(other.words.iter()) {
            acc ^= (a & b).count_ones() & 1;
        }
        acc & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Index of the lowest set bit, if any.
    pub fn first_one(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate() {
            if w != 0 {
                return Some(wi * WORD_BITS + w.trailing_zeros() as usize);
            }
        }
        None
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }

    /// Concatenate `self` followed by `other`.
    pub fn concat(&self, other: &BitVector) -> BitVector {
        let mut out = BitVector::zeros(self.len + other.len);
        for i in self.iter_ones() {
            out.set(i, true);
        }
        for i in other.iter_ones() {
            out.set(self.len + i, true);
        }
        out
    }

    /// Copy of the bit range `[start, end)`.
    pub fn slice(&self, start: usize, end: usize) -> BitVector {
        debug_assert!(start <= end && end <= self.len);
        let mut out = BitVector::zeros(end - start);
        for i in start..end {
            if self.get(i) {
                out.set(i - start, true);
            }
        }
        out
    }

    pub fn to_bits(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    fn to_bitstring(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }

    fn from_bitstring(s: &str) -> Result<Self> {
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                _ => {
                    return Err(Error::Parse {
                        location: format!("bit {i}"),
                        message: format!("expected 0 or 1, got {c:?}"),
                    })
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bitstring())
    }
}

impl Serialize for BitVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_bitstring())
    }
}

impl<'de> Deserialize<'de> for BitVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        BitVector::from_bitstring(&s).map_err(serde::de::Error::custom)
    }
}

/// Dense GF(2) matrix, row-major packed rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_rows(rows: Vec<BitVector>) -> Self {
        let cols = rows.first().map_or(0, BitVector::len);
        debug_assert!(rows.iter().all(|r| r.len() == cols));
        Self {
            rows: rows.len(),
            cols,
            data: rows,
        }
    }

    pub fn from_bits(bits: &[&[u8]]) -> Self {
        let rows = bits.len();
        let cols = bits.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows, cols);
        for (i, row) in bits.iter().enumerate() {
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        m
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows).map(|_| BitVector::random(cols, rng)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.data[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.data[r].set(c, value);
    }

    pub fn row(&self, r: usize) -> &BitVector {
        &self.data[r]
    }

    pub fn set_row(&mut self, r: usize, v: BitVector) {
        debug_assert_eq!(v.len(), self.cols);
        self.data[r] = v;
    }

    pub fn column(&self, c: usize) -> BitVector {
        let mut v = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    pub fn xor_row(&mut self, target: usize, source: usize) {
        let (t, s) = if target < source {
            let (a, b) = self.data.split_at_mut(source);
            (&mut a[target], &b[0])
        } else {
            let (a, b) = self.data.split_at_mut(target);
            (&mut b[0], &a[source])
        };
        t.xor_assign(s);
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        self.data.swap(a, b);
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.data[r].iter_ones() {
                m.set(c, r, true);
            }
        }
        m
    }

    /// Matrix-vector product over GF(2).
    pub fn mat_vec_mul(&self, v: &BitVector) -> Result<BitVector> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: v.len(),
            });
        }
        let mut out = BitVector::zeros(self.rows);
        for r in 0..self.rows {
            if self.data[r].dot(v) {
                out.set(r, true);
            }
        }
        Ok(out)
    }

    pub fn mat_mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                actual: other.rows,
            });
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            let mut acc = BitVector::zeros(other.cols);
            for c in self.data[r].iter_ones() {
                acc.xor_assign(&other.data[c]);
            }
            out.data[r] = acc;
        }
        Ok(out)
    }

    /// GF(2) rank via Gaussian elimination on a copy.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        m.rref_in_place().len()
    }

    /// Reduced row-echelon form.
    pub fn rref(&self) -> BitMatrix {
        let mut m = self.clone();
        m.rref_in_place();
        m
    }

    /// Reduced row-echelon form together with its pivot columns.
    pub fn rref_with_pivots(&self) -> (BitMatrix, Vec<usize>) {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        (m, pivots)
    }

    /// Returns the pivot columns; `self` ends in reduced row-echelon form.
    fn rref_in_place(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..self.cols {
            if row == self.rows {
                break;
            }
            let Some(pivot) = (row..self.rows).find(|&r| self.get(r, col)) else {
                continue;
            };
            self.swap_rows(row, pivot);
            for r in 0..self.rows {
                if r != row && self.get(r, col) {
                    self.xor_row(r, row);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Any solution of `self * x = b`, or `None` when inconsistent.
    ///
    /// Free variables are set to zero, pivoting on the lowest available
    /// row/column, so the output is deterministic.
    pub fn solve(&self, b: &BitVector) -> Result<Option<BitVector>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                actual: b.len(),
            });
        }
        // Eliminate on the augmented matrix [self | b].
        let mut aug = BitMatrix::zeros(self.rows, self.cols + 1);
        for r in 0..self.rows {
            aug.data[r] = self.data[r].concat(&b.slice(r, r + 1));
        }
        let pivots = aug.rref_in_place();
        if pivots.contains(&self.cols) {
            return Ok(None); // a row reduced to 0 = 1
        }
        let mut x = BitVector::zeros(self.cols);
        for (row, &col) in pivots.iter().enumerate() {
            if aug.get(row, self.cols) {
                x.set(col, true);
            }
        }
        Ok(Some(x))
    }

    /// Basis of the kernel `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<BitVector> {
        let mut m = self.clone();
        let pivots = m.rref_in_place();
        let pivot_set: Vec<bool> = {
            let mut s = vec![false; self.cols];
            for &c in &pivots {
                s[c] = true;
            }
            s
        };
        let mut basis = Vec::new();
        for free in 0..self.cols {
            if pivot_set[free] {
                continue;
            }
            let mut v = BitVector::zeros(self.cols);
            v.set(free, true);
            for (row, &col) in pivots.iter().enumerate() {
                if m.get(row, free) {
                    v.set(col, true);
                }
            }
            basis.push(v);
        }
        basis
    }

    /// Invert a square matrix, if invertible.
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let mut aug = BitMatrix::zeros(n, 2 * n);
        for r in 0..n {
            for c in self.data[r].iter_ones() {
                aug.set(r, c, true);
            }
            aug.set(r, n + r, true);
        }
        let pivots = aug.rref_in_place();
        if pivots.len() < n || pivots.iter().enumerate().any(|(i, &c)| c != i) {
            return None;
        }
        let mut inv = BitMatrix::zeros(n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Some(inv)
    }

    /// Extends full-column-rank `cols` to an invertible square matrix whose
    /// trailing block equals `cols`. The prepended columns are standard basis
    /// vectors chosen greedily in index order.
    pub fn complete_basis(&self) -> Result<BitMatrix> {
        let n = self.rows;
        let c = self.cols;
        if self.transpose().rank() != c {
            return Err(Error::InvalidParameter(
                "complete_basis requires full column rank".into(),
            ));
        }
        let mut chosen: Vec<usize> = Vec::with_capacity(n - c);
        let mut span = self.transpose(); // rows = the input columns
        let mut current_rank = c;
        for i in 0..n {
            if chosen.len() == n - c {
                break;
            }
            let mut candidate = span.clone();
            let mut rows = candidate.data;
            rows.push(BitVector::unit(n, i));
            candidate = BitMatrix::from_rows(rows);
            if candidate.rank() > current_rank {
                current_rank += 1;
                chosen.push(i);
                span = candidate;
            }
        }
        let mut out = BitMatrix::zeros(n, n);
        for (j, &i) in chosen.iter().enumerate() {
            out.set(i, j, true);
        }
        for j in 0..c {
            for r in 0..n {
                if self.get(r, j) {
                    out.set(r, n - c + j, true);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in &self.data {
            writeln!(f, "  {}", r.to_bitstring())?;
        }
        write!(f, "]")
    }
}
