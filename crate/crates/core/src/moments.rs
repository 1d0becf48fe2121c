//! Boolean-Fourier machinery for Z-diagonal Hamiltonians: eigenvalues via the
//! Walsh-Hadamard transform, exact gap moments, hypercontractive moment
//! checks and the Paley-Zygmund anti-concentration bound.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::Spectrum;
use crate::error::{Error, Result};
use crate::gap::lambda_stat;
use crate::pauli::PauliSum;

/// Largest qubit count accepted by [`walsh_eigenvalues`].
pub const WALSH_CAP: usize = 20;

/// Largest spectrum size for exact pair enumeration in [`gap_moments`].
pub const MOMENT_ENUMERATION_CAP: usize = 1 << 12;

/// In-place unnormalized fast Walsh-Hadamard transform:
/// `out[s] = sum_p (-1)^{popcount(s & p)} in[p]`.
pub fn walsh_hadamard(values: &mut [f64]) {
    let len = values.len();
    assert!(len.is_power_of_two(), "length must be a power of two");
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let (a, b) = (values[i], values[i + half]);
                values[i] = a + b;
                values[i + half] = a - b;
            }
        }
        half *= 2;
    }
}

/// Diagonal entries `f(s)` of a Z-diagonal Hamiltonian, indexed by basis state.
pub fn walsh_values(h: &PauliSum) -> Result<Vec<f64>> {
    let n = h.num_qubits();
    if n > WALSH_CAP {
        return Err(Error::DenseCapExceeded { n, cap: WALSH_CAP });
    }
    let mut table = vec![0.0; 1 << n];
    for (p, c) in h.iter() {
        if !p.is_z_diagonal() {
            return Err(Error::NotDiagonal(p.to_string()));
        }
        table[p.z_mask() as usize] += c;
    }
    walsh_hadamard(&mut table);
    Ok(table)
}

pub fn walsh_eigenvalues(h: &PauliSum) -> Result<Spectrum> {
    Spectrum::new(walsh_values(h)?)
}

/// Exact `(E[F^2], E[F^4])` for `F = f(s) - f(t)` over ordered pairs.
pub fn gap_moments(spec: &Spectrum) -> Result<(f64, f64)> {
    if spec.len() > MOMENT_ENUMERATION_CAP {
        return Err(Error::SpectrumTooLarge {
            len: spec.len(),
            cap: MOMENT_ENUMERATION_CAP,
        });
    }
    let v = spec.values();
    let (mut m2, mut m4) = (0.0, 0.0);
    for &a in v {
        for &b in v {
            let d2 = (a - b) * (a - b);
            m2 += d2;
            m4 += d2 * d2;
        }
    }
    let pairs = (v.len() * v.len()) as f64;
    Ok((m2 / pairs, m4 / pairs))
}

/// `(E[f^2], E[f^4])` of a function given by its values on the cube.
pub fn function_moments(values: &[f64]) -> (f64, f64) {
    let len = values.len() as f64;
    let m2 = values.iter().map(|v| v * v).sum::<f64>() / len;
    let m4 = values.iter().map(|v| v.powi(4)).sum::<f64>() / len;
    (m2, m4)
}

/// `(1 - theta)^2 m2^2 / m4`, a lower bound on `Pr[Z > theta E[Z]]` for
/// `Z >= 0` with `E[Z] = m2`, `E[Z^2] = m4`.
pub fn paley_zygmund_bound(m2: f64, m4: f64, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!(
            "theta {theta} outside [0, 1]"
        )));
    }
    if m4 <= 0.0 || m2 < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "moments (m2={m2}, m4={m4}) need m4 > 0 and m2 >= 0"
        )));
    }
    Ok((1.0 - theta).powi(2) * m2 * m2 / m4)
}

/// Gap-proportion floor `9^{-k} / 4` for Z-diagonal k-local Hamiltonians.
pub fn diagonal_gap_floor(k: usize) -> f64 {
    0.25 * 9f64.powi(-(k as i32))
}

/// Checks `Lambda(H, ||H||_F) >= 9^{-k} / 4` through the Walsh spectrum.
pub fn verify_gap_bound(h: &PauliSum, k: usize) -> Result<bool> {
    if h.is_empty() {
        return Err(Error::InvalidParameter(
            "gap bound needs a nonzero Hamiltonian".into(),
        ));
    }
    if !h.is_z_diagonal() {
        let p = h.iter().find(|(p, _)| !p.is_z_diagonal()).unwrap().0;
        return Err(Error::NotDiagonal(p.to_string()));
    }
    h.ensure_k_local(k)?;
    let spec = walsh_eigenvalues(h)?;
    Ok(lambda_stat(&spec, h.frobenius_norm())? >= diagonal_gap_floor(k))
}

/// A real multilinear polynomial on `{-1,1}^n` given by its Fourier
/// coefficients on subsets (bitmasks).
#[derive(Clone, Debug)]
pub struct MultilinearFunction {
    n: usize,
    coefficients: Vec<(u64, f64)>,
}

impl MultilinearFunction {
    pub fn new(n: usize, coefficients: Vec<(u64, f64)>) -> Result<Self> {
        if n == 0 || n > WALSH_CAP {
            return Err(Error::InvalidQubitCount { n, max: WALSH_CAP });
        }
        if coefficients.iter().any(|(m, _)| *m >> n != 0) {
            return Err(Error::InvalidParameter(
                "subset outside the variables".into(),
            ));
        }
        Ok(Self { n, coefficients })
    }

    /// Gaussian coefficients on every subset of size `<= k`, the empty set included.
    pub fn random<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Self> {
        let coefficients = (0u64..(1 << n))
            .filter(|m| m.count_ones() as usize <= k)
            .map(|m| (m, rng.sample::<f64, _>(StandardNormal)))
            .collect();
        Self::new(n, coefficients)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &[(u64, f64)] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(m, _)| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Values on all `2^n` points via the fast transform.
    pub fn values(&self) -> Vec<f64> {
        let mut table = vec![0.0; 1 << self.n];
        for &(m, c) in &self.coefficients {
            table[m as usize] += c;
        }
        walsh_hadamard(&mut table);
        table
    }
}
