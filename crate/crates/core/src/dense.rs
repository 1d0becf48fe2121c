//! Dense complex matrices for small systems: materialized Pauli sums,
//! Hermitian spectra and exact unitary evolution.

use std::ops::Mul;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// Default qubit cap for materializing a Pauli sum (1024 x 1024).
pub const DEFAULT_DENSE_CAP: usize = 10;

/// Hermiticity tolerance on `max |M - M^dagger|`.
pub const HERMITIAN_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        let (r, c) = matrix.shape();
        if r != c {
            return Err(Error::DimensionMismatch { left: r, right: c });
        }
        if r == 0 || !r.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "dimension {r} is not a power of two"
            )));
        }
        Ok(Self { matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: DMatrix::identity(dim, dim),
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            matrix: DMatrix::zeros(dim, dim),
        }
    }

    /// Diagonal operator with the given real entries.
    pub fn diagonal(values: &[f64]) -> Result<Self> {
        let m = DMatrix::from_fn(values.len(), values.len(), |i, j| {
            if i == j {
                Complex64::new(values[i], 0.0)
            } else {
                ZERO
            }
        });
        Self::from_matrix(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix[(row, col)]
    }

    pub fn adjoint(&self) -> Self {
        Self {
            matrix: self.matrix.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn hermitian_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                let diff = self.matrix[(i, j)] - self.matrix[(j, i)].conj();
                worst = worst.max(diff.norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= HERMITIAN_TOL
    }

    /// `max |U^dagger U - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let prod = self.matrix.adjoint() * &self.matrix;
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in 0..d {
                let target = if i == j { ONE } else { ZERO };
                worst = worst.max((prod[(i, j)] - target).norm());
            }
        }
        worst
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            matrix: &self.matrix - &other.matrix,
        })
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
        })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            matrix: &self.matrix * factor,
        }
    }

    /// Largest singular value.
    pub fn op_norm(&self) -> f64 {
        self.matrix
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }

    /// `sqrt(Tr(M^dagger M) / dim)`.
    pub fn normalized_frobenius(&self) -> f64 {
        (self.matrix.norm_squared() / self.dim() as f64).sqrt()
    }

    /// `P M P` for a Pauli string on the same number of qubits.
    pub fn conjugate_by(&self, p: &PauliString) -> Result<Self> {
        if p.is_identity() {
            if p.num_qubits() != self.num_qubits() {
                return Err(Error::DimensionMismatch {
                    left: self.dim(),
                    right: 1 << p.num_qubits(),
                });
            }
            return Ok(self.clone());
        }
        let pm = pauli_matrix(p)?;
        pm.try_mul(self)?.try_mul(&pm)
    }

    /// Integer power by repeated squaring.
    pub fn pow(&self, mut exponent: u64) -> Self {
        let mut result = Self::identity(self.dim());
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result.matrix = &result.matrix * &base.matrix;
            }
            exponent >>= 1;
            if exponent > 0 {
                base.matrix = &base.matrix * &base.matrix;
            }
        }
        result
    }
}

impl Mul for &DenseOperator {
    type Output = DenseOperator;

    /// Panics on dimension mismatch; use [`DenseOperator::try_mul`] otherwise.
    fn mul(self, rhs: &DenseOperator) -> DenseOperator {
        self.try_mul(rhs)
            .expect("dimension mismatch in operator product")
    }
}

/// Phase of `P|j>`: `P|j> = phase * |j xor x>`.
fn pauli_phase(p: &PauliString, j: usize) -> Complex64 {
    let y_count = (p.x_mask() & p.z_mask()).count_ones();
    let sign_flips = (j as u64 & p.z_mask()).count_ones();
    let mut phase = match y_count % 4 {
        0 => ONE,
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    };
    if sign_flips % 2 == 1 {
        phase = -phase;
    }
    phase
}

fn check_cap(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::DenseCapExceeded { n, cap });
    }
    Ok(())
}

pub fn pauli_matrix(p: &PauliString) -> Result<DenseOperator> {
    let n = p.num_qubits();
    check_cap(n, DEFAULT_DENSE_CAP)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    let x = p.x_mask() as usize;
    for j in 0..dim {
        m[(j ^ x, j)] = pauli_phase(p, j);
    }
    Ok(DenseOperator { matrix: m })
}

pub fn to_dense(h: &PauliSum) -> Result<DenseOperator> {
    to_dense_with_cap(h, DEFAULT_DENSE_CAP)
}

pub fn to_dense_with_cap(h: &PauliSum, cap: usize) -> Result<DenseOperator> {
    let n = h.num_qubits();
    check_cap(n, cap)?;
    let dim = 1usize << n;
    let mut m = DMatrix::zeros(dim, dim);
    for (p, c) in h.iter() {
        let x = p.x_mask() as usize;
        for j in 0..dim {
            m[(j ^ x, j)] += pauli_phase(p, j) * c;
        }
    }
    Ok(DenseOperator { matrix: m })
}

/// Real eigenvalues sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    values: Vec<f64>,
}

impl Spectrum {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("empty spectrum".into()));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoefficient(*v));
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `(1/d) sum_i (a_i - b_i)^2` under ascending pairing.
    pub fn mean_square_displacement(&self, other: &Spectrum) -> Result<f64> {
        if self.len() != other.len() {
            return Err(Error::DimensionMismatch {
                left: self.len(),
                right: other.len(),
            });
        }
        let sum: f64 = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        Ok(sum / self.len() as f64)
    }

    pub fn scaled(&self, factor: f64) -> Result<Spectrum> {
        Spectrum::new(self.values.iter().map(|v| v * factor).collect())
    }

    pub fn shifted(&self, offset: f64) -> Result<Spectrum> {
        Spectrum::new(self.values.iter().map(|v| v + offset).collect())
    }
}

/// Eigenvalues with matching orthonormal eigenvectors (as columns).
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: DMatrix<Complex64>,
}

impl EigenDecomposition {
    pub fn spectrum(&self) -> Spectrum {
        Spectrum::new(self.values.clone()).expect("Hermitian eigenvalues are finite")
    }

    /// `exp(-i t M)` assembled from the decomposition; any sign of `t`.
    pub fn evolve(&self, t: f64) -> DenseOperator {
        let dim = self.values.len();
        let mut scaled = self.vectors.clone();
        for (j, &lambda) in self.values.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -lambda * t);
            for i in 0..dim {
                scaled[(i, j)] *= phase;
            }
        }
        DenseOperator {
            matrix: scaled * self.vectors.adjoint(),
        }
    }
}

pub fn eigendecompose(m: &DenseOperator) -> Result<EigenDecomposition> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let eig = m.matrix.clone().symmetric_eigen();
    Ok(EigenDecomposition {
        values: eig.eigenvalues.iter().copied().collect(),
        vectors: eig.eigenvectors,
    })
}

pub fn eigenvalues(m: &DenseOperator) -> Result<Spectrum> {
    let defect = m.hermitian_defect();
    if defect > HERMITIAN_TOL {
        return Err(Error::NotHermitian(defect));
    }
    Spectrum::new(
        m.matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect(),
    )
}

/// `exp(-i t H)`; the zero operator maps to the exact identity.
pub fn evolve(h: &PauliSum, t: f64) -> Result<DenseOperator> {
    check_cap(h.num_qubits(), DEFAULT_DENSE_CAP)?;
    if h.is_empty() || t == 0.0 {
        return Ok(DenseOperator::identity(1 << h.num_qubits()));
    }
    Ok(eigendecompose(&to_dense(h)?)?.evolve(t))
}

/// Mean-square eigenvalue displacement `(1/d) sum (lambda_i(A) - lambda_i(B))^2`
/// with both spectra sorted ascending.
pub fn hoffman_wielandt_gap(a: &DenseOperator, b: &DenseOperator) -> Result<f64> {
    a.check_dim(b)?;
    eigenvalues(a)?.mean_square_displacement(&eigenvalues(b)?)
}
