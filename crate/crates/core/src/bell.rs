//! Bell-sampling statistics of a unitary.
//!
//! Sampling acts on the Choi state of `U`: `n` maximally entangled pairs with
//! `U` applied to the first half, each pair measured in the Bell basis. The
//! outcome labelled by Pauli `P` then occurs with probability
//! `|Tr(P U)|^2 / 4^n`, and the all-identity outcome with probability
//! `I(t) = 4^{-n} sum_{j,k} cos((l_j - l_k) t)` when `U = exp(-i t H)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::Binomial;

use crate::dense::{DenseOperator, Spectrum};
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

/// Qubit cap for the explicit doubled-register simulation.
pub const BELL_SAMPLER_CAP: usize = 4;

/// Unitarity tolerance accepted by [`identity_prob_trace`].
pub const UNITARITY_TOL: f64 = 1e-8;

/// Identity-outcome probability from the spectrum of `H`.
pub fn identity_prob_spectral(spec: &Spectrum, t: f64) -> f64 {
    let v = spec.values();
    let n = v.len() as f64;
    let mut off = 0.0;
    for (j, &a) in v.iter().enumerate() {
        for &b in &v[j + 1..] {
            off += ((a - b) * t).cos();
        }
    }
    ((n + 2.0 * off) / (n * n)).clamp(0.0, 1.0)
}

/// Identity-outcome probability `|Tr U|^2 / 4^n` of a unitary.
pub fn identity_prob_trace(u: &DenseOperator) -> Result<f64> {
    let defect = u.unitarity_defect();
    if defect > UNITARITY_TOL {
        return Err(Error::NotUnitary(defect));
    }
    let d = u.dim() as f64;
    Ok((u.trace().norm_sqr() / (d * d)).clamp(0.0, 1.0))
}

/// Number of identity outcomes among `m` independent shots.
pub fn sample_identity_shots<R: Rng + ?Sized>(p: f64, m: u64, rng: &mut R) -> Result<u64> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!(
            "probability {p} outside [0, 1]"
        )));
    }
    let dist = Binomial::new(m, p).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok(dist.sample(rng))
}

/// One Bell-basis outcome on `n` pairs: two bits per pair, pair 0 in the
/// most significant position. Bits `00, 01, 10, 11` denote the Bell states
/// `(|00>+|11>)`, `(|00>-|11>)`, `(|01>+|10>)`, `(|01>-|10>)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BellOutcome {
    n: usize,
    bits: u64,
}

impl BellOutcome {
    pub fn pair_bits(&self, pair: usize) -> u8 {
        ((self.bits >> (2 * (self.n - 1 - pair))) & 0b11) as u8
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn is_identity(&self) -> bool {
        self.bits == 0
    }

    /// The Pauli `P` with `(P (x) I)|Phi+> ~ |sigma_s>` for this outcome.
    pub fn pauli_label(&self) -> PauliString {
        let letters: Vec<Pauli> = (0..self.n)
            .map(|i| match self.pair_bits(i) {
                0b00 => Pauli::I,
                0b01 => Pauli::Z,
                0b10 => Pauli::X,
                _ => Pauli::Y,
            })
            .collect();
        PauliString::new(&letters).expect("pair count within bounds")
    }
}

/// Two-qubit Bell state amplitudes `<ab|sigma_s>` (times sqrt 2).
fn bell_amplitude(s: u8, a: usize, b: usize) -> f64 {
    match (s, a, b) {
        (0b00, 0, 0) | (0b00, 1, 1) => 1.0,
        (0b01, 0, 0) => 1.0,
        (0b01, 1, 1) => -1.0,
        (0b10, 0, 1) | (0b10, 1, 0) => 1.0,
        (0b11, 0, 1) => 1.0,
        (0b11, 1, 0) => -1.0,
        _ => 0.0,
    }
}

/// Bell-basis measurement of the Choi state of a unitary, simulated on the
/// full `2n`-qubit register.
#[derive(Clone, Debug)]
pub struct ChoiBellSampler {
    n: usize,
    probabilities: Vec<f64>,
    dist: WeightedIndex<f64>,
}

impl ChoiBellSampler {
    pub fn new(u: &DenseOperator) -> Result<Self> {
        let n = u.num_qubits();
        if n > BELL_SAMPLER_CAP {
            return Err(Error::DenseCapExceeded {
                n,
                cap: BELL_SAMPLER_CAP,
            });
        }
        let dim = u.dim();
        // (U (x) I)|Phi> has amplitude U[i][j] / sqrt(dim) on |i>_A |j>_B
        let norm = (dim as f64).sqrt();
        let state = |a: usize, b: usize| u.entry(a, b) / norm;

        let outcomes = dim * dim;
        let pair_norm = 2f64.powf(-(n as f64) / 2.0);
        let mut probabilities = Vec::with_capacity(outcomes);
        for s in 0..outcomes {
            let mut amp = num_complex::Complex64::new(0.0, 0.0);
            for a in 0..dim {
                for b in 0..dim {
                    let mut coeff = 1.0;
                    for pair in 0..n {
                        let shift = n - 1 - pair;
                        let sp = ((s >> (2 * shift)) & 0b11) as u8;
                        coeff *= bell_amplitude(sp, (a >> shift) & 1, (b >> shift) & 1);
                        if coeff == 0.0 {
                            break;
                        }
                    }
                    if coeff != 0.0 {
                        amp += state(a, b) * coeff;
                    }
                }
            }
            probabilities.push((amp * pair_norm).norm_sqr());
        }
        let dist = WeightedIndex::new(&probabilities)
            .map_err(|e| Error::InvalidParameter(format!("Bell distribution: {e}")))?;
        Ok(Self {
            n,
            probabilities,
            dist,
        })
    }

    pub fn num_pairs(&self) -> usize {
        self.n
    }

    /// Outcome probabilities indexed by the packed outcome bits.
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn outcome(&self, bits: u64) -> BellOutcome {
        BellOutcome { n: self.n, bits }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BellOutcome {
        self.outcome(self.dist.sample(rng) as u64)
    }
}

/// Single-shot convenience wrapper around [`ChoiBellSampler`].
pub fn bell_measure_choi<R: Rng + ?Sized>(u: &DenseOperator, rng: &mut R) -> Result<BellOutcome> {
    Ok(ChoiBellSampler::new(u)?.sample(rng))
}
