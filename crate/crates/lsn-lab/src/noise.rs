//! Pauli noise channels: depolarizing, bit-flip, and truncated
//! depolarizing, with samplers and exact pmfs.
//!
//! Depolarizing noise uses the Kraus parameterization: each qubit is left
//! alone with probability `1 - p` and otherwise hit by a uniform letter
//! from {X, Y, Z} (probability `p/3` each), so the total error weight is
//! `Binom(n, p)`. Bounds quoted in the contraction-style parameterization
//! `(1 - p) rho + p I/2` translate via `p_kraus = 3 p / 4`.

use crate::error::{Error, Result};
use crate::pauli::{random_pauli_of_weight, PauliLetter, PauliOperator};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    Depolarizing,
    Bitflip,
    TruncatedDepolarizing,
}

/// Noise channel description; serialized as `{kind, p, w_cut?}` inside
/// experiment configs and instance files.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_cut: Option<usize>,
}

impl NoiseSpec {
    pub fn depolarizing(p: f64) -> Self {
        Self {
            kind: NoiseKind::Depolarizing,
            p,
            w_cut: None,
        }
    }

    pub fn bitflip(p: f64) -> Self {
        Self {
            kind: NoiseKind::Bitflip,
            p,
            w_cut: None,
        }
    }

    pub fn truncated_depolarizing(p: f64, w_cut: usize) -> Self {
        Self {
            kind: NoiseKind::TruncatedDepolarizing,
            p,
            w_cut: Some(w_cut),
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self.kind {
            NoiseKind::Depolarizing | NoiseKind::TruncatedDepolarizing => {
                if !(0.0..=0.75).contains(&self.p) {
                    return Err(Error::InvalidParameter(format!(
                        "depolarizing p must be in [0, 3/4], got {}",
                        self.p
                    )));
                }
            }
            NoiseKind::Bitflip => {
                if !(0.0..1.0).contains(&self.p) {
                    return Err(Error::InvalidParameter(format!(
                        "bit-flip p must be in [0, 1), got {}",
                        self.p
                    )));
                }
            }
        }
        if self.kind == NoiseKind::TruncatedDepolarizing {
            match self.w_cut {
                None => {
                    return Err(Error::InvalidParameter(
                        "truncated depolarizing needs w_cut".into(),
                    ))
                }
                Some(w) if w > n => {
                    return Err(Error::InvalidParameter(format!(
                        "w_cut {w} exceeds qubit count {n}"
                    )))
                }
                _ => {}
            }
        } else if self.w_cut.is_some() {
            return Err(Error::InvalidParameter(
                "w_cut only applies to truncated depolarizing".into(),
            ));
        }
        Ok(())
    }

    /// Draws an unsigned error Pauli on `n` qubits.
    pub fn sample_error(&self, n: usize, rng: &mut impl Rng) -> Result<PauliOperator> {
        self.validate(n)?;
        Ok(match self.kind {
            NoiseKind::Depolarizing => sample_depolarizing(n, self.p, rng),
            NoiseKind::Bitflip => {
                let mut e = PauliOperator::identity(n);
                for q in 0..n {
                    if rng.gen::<f64>() < self.p {
                        e.set_letter(q, PauliLetter::X);
                    }
                }
                e
            }
            NoiseKind::TruncatedDepolarizing => {
                let w_cut = self.w_cut.unwrap();
                let keep = binomial_cdf(n, self.p, w_cut);
                if keep >= 0.05 {
                    // rejection keeps the exact conditional distribution
                    loop {
                        let e = sample_depolarizing(n, self.p, rng);
                        if e.weight() <= w_cut {
                            break e;
                        }
                    }
                } else {
                    // weight-then-support sampling avoids pathological
                    // retry counts when w_cut << np
                    let weights = binomial_terms(n, self.p, w_cut);
                    let total: f64 = weights.iter().sum();
                    let mut u = rng.gen::<f64>() * total;
                    let mut w = w_cut;
                    for (i, t) in weights.iter().enumerate() {
                        if u < *t {
                            w = i;
                            break;
                        }
                        u -= t;
                    }
                    random_pauli_of_weight(n, w, rng)?
                }
            }
        })
    }

    /// Exact probability of the unsigned error `e`, plus a support flag.
    /// Errors outside the support (truncated weight bound, or non-X
    /// components under bit-flip noise) report `(0.0, false)`.
    pub fn pmf(&self, n: usize, e: &PauliOperator) -> (f64, bool) {
        debug_assert_eq!(e.num_qubits(), n);
        let w = e.weight();
        match self.kind {
            NoiseKind::Depolarizing => (
                (self.p / 3.0).powi(w as i32) * (1.0 - self.p).powi((n - w) as i32),
                true,
            ),
            NoiseKind::Bitflip => {
                if !e.z_bits().is_zero() {
                    return (0.0, false);
                }
                (
                    self.p.powi(w as i32) * (1.0 - self.p).powi((n - w) as i32),
                    true,
                )
            }
            NoiseKind::TruncatedDepolarizing => {
                let w_cut = self.w_cut.unwrap();
                if w > w_cut {
                    return (0.0, false);
                }
                let base =
                    (self.p / 3.0).powi(w as i32) * (1.0 - self.p).powi((n - w) as i32);
                (base / self.normalization(n), true)
            }
        }
    }

    /// Normalization `N = sum_{w <= w_cut} C(n, w) p^w (1-p)^(n-w)` of the
    /// truncated channel; 1 for the others.
    pub fn normalization(&self, n: usize) -> f64 {
        match self.kind {
            NoiseKind::TruncatedDepolarizing => binomial_cdf(n, self.p, self.w_cut.unwrap()),
            _ => 1.0,
        }
    }

    /// Number of unsigned Paulis in the support.
    pub fn support_size(&self, n: usize) -> u64 {
        match self.kind {
            NoiseKind::Depolarizing => 4u64.saturating_pow(n as u32),
            NoiseKind::Bitflip => 2u64.saturating_pow(n as u32),
            NoiseKind::TruncatedDepolarizing => {
                crate::pauli::pauli_count_up_to_weight(n, self.w_cut.unwrap())
            }
        }
    }

    /// Enumerates the support (errors with nonzero probability) as
    /// `(error, probability)` pairs in a fixed order; errors out when more
    /// than `limit` entries carry mass.
    pub fn support(&self, n: usize, limit: u64) -> Result<Vec<(PauliOperator, f64)>> {
        self.validate(n)?;
        let w_max = match self.kind {
            NoiseKind::TruncatedDepolarizing => self.w_cut.unwrap(),
            _ => n,
        };
        let mut out = Vec::new();
        let mut overflow = false;
        crate::pauli::for_each_pauli_up_to_weight(n, w_max, &mut |p| {
            let (prob, in_support) = self.pmf(n, p);
            if in_support && prob > 0.0 {
                if out.len() as u64 == limit {
                    overflow = true;
                    return false;
                }
                out.push((p.clone(), prob));
            }
            true
        });
        if overflow {
            return Err(Error::GuardExceeded {
                what: "noise support enumeration",
                requested: self.support_size(n).min(usize::MAX as u64) as usize,
                limit: limit.min(usize::MAX as u64) as usize,
            });
        }
        Ok(out)
    }
}

fn sample_depolarizing(n: usize, p: f64, rng: &mut impl Rng) -> PauliOperator {
    let mut e = PauliOperator::identity(n);
    for q in 0..n {
        if rng.gen::<f64>() < p {
            let letter = match rng.gen_range(0..3u8) {
                0 => PauliLetter::X,
                1 => PauliLetter::Y,
                _ => PauliLetter::Z,
            };
            e.set_letter(q, letter);
        }
    }
    e
}

/// Terms `C(n, w) p^w (1-p)^(n-w)` for `w = 0..=w_cut`.
fn binomial_terms(n: usize, p: f64, w_cut: usize) -> Vec<f64> {
    let mut terms = Vec::with_capacity(w_cut + 1);
    if p >= 1.0 {
        return (0..=w_cut).map(|w| if w == n { 1.0 } else { 0.0 }).collect();
    }
    let mut t = (1.0 - p).powi(n as i32);
    for w in 0..=w_cut.min(n) {
        terms.push(t);
        t *= (n - w) as f64 / (w + 1) as f64 * p / (1.0 - p);
    }
    terms
}

/// Binomial CDF `Pr[Binom(n, p) <= w_cut]`.
pub fn binomial_cdf(n: usize, p: f64, w_cut: usize) -> f64 {
    binomial_terms(n, p, w_cut).iter().sum()
}

/// Chernoff tail bound `exp(-n p / 12)` on
/// `Pr[|E| >= 3np/2]` for depolarizing noise of rate `p`.
pub fn tail_bound(n: usize, p: f64) -> f64 {
    (-(n as f64) * p / 12.0).exp()
}
