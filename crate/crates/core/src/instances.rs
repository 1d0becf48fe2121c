//! Random problem instances shared by the verification suites and tests.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::dense::DenseOperator;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

fn random_string<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    letters: &[Pauli],
    rng: &mut R,
) -> Result<PauliString> {
    let max_w = k.min(n);
    let w = rng.random_range(1..=max_w);
    let mut out = vec![Pauli::I; n];
    for site in sample(rng, n, w) {
        out[site] = letters[rng.random_range(0..letters.len())];
    }
    PauliString::new(&out)
}

fn random_sum<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    terms: usize,
    letters: &[Pauli],
    rng: &mut R,
) -> Result<PauliSum> {
    if k == 0 || terms == 0 {
        return Err(Error::InvalidParameter(
            "random instances need k >= 1 and at least one term".into(),
        ));
    }
    let mut h = PauliSum::new(n)?;
    while h.is_empty() {
        for _ in 0..terms {
            let p = random_string(n, k, letters, rng)?;
            let c: f64 = rng.sample(StandardNormal);
            h.add_term(p, c)?;
        }
    }
    Ok(h)
}

/// Sum of `terms` random strings of weight `1..=k` with Gaussian coefficients.
pub fn random_k_local<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    terms: usize,
    rng: &mut R,
) -> Result<PauliSum> {
    random_sum(n, k, terms, &Pauli::NON_IDENTITY, rng)
}

/// Like [`random_k_local`] but only I/Z letters.
pub fn random_z_diagonal<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    terms: usize,
    rng: &mut R,
) -> Result<PauliSum> {
    random_sum(n, k, terms, &[Pauli::Z], rng)
}

/// Random k-local sum rescaled to unit Frobenius norm.
pub fn random_direction<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    terms: usize,
    rng: &mut R,
) -> Result<PauliSum> {
    let h = random_k_local(n, k, terms, rng)?;
    h.scale(1.0 / h.frobenius_norm())
}

/// Hermitian matrix with i.i.d. Gaussian entries (GUE-like, not traceless).
pub fn random_hermitian<R: Rng + ?Sized>(dim: usize, scale: f64, rng: &mut R) -> DenseOperator {
    let mut m = DMatrix::<Complex64>::zeros(dim, dim);
    for i in 0..dim {
        let d: f64 = rng.sample(StandardNormal);
        m[(i, i)] = Complex64::new(scale * d, 0.0);
        for j in (i + 1)..dim {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = Complex64::new(re, im) * (scale / std::f64::consts::SQRT_2);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    DenseOperator::from_matrix(m).expect("square power-of-two dimension")
}
