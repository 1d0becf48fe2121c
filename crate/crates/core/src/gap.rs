//! The eigenvalue-gap proportion `Lambda(X, eps)`, the randomized drop-time
//! search it enables, and its stability under small perturbations.

use rand::Rng;

use crate::bell::identity_prob_spectral;
use crate::dense::{eigenvalues, to_dense, DenseOperator, Spectrum};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;

/// Fraction of ordered eigenvalue pairs `(j, k)` with `|l_j - l_k| >= eps`,
/// self-pairs included.
pub fn lambda_stat(spec: &Spectrum, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gap threshold must be positive, got {epsilon}"
        )));
    }
    let v = spec.values();
    // pairs with l_k - l_j >= eps; ordered pairs count both orientations
    let mut upper = 0usize;
    for (j, &lj) in v.iter().enumerate() {
        let first = v[j..].partition_point(|&lk| lk - lj < epsilon);
        upper += v.len() - j - first;
    }
    Ok(2.0 * upper as f64 / (v.len() * v.len()) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapStatConfig {
    pub epsilon: f64,
    pub d: f64,
    pub delta: f64,
    pub m_times: usize,
}

impl GapStatConfig {
    /// `m_times` is the smallest count with `(2/3)^m_times <= delta`.
    pub fn new(epsilon: f64, d: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} <= 0")));
        }
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::InvalidParameter(format!("d {d} outside (0, 1]")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta {delta} outside (0, 1)"
            )));
        }
        let m_times = ((1.0 / delta).ln() / 1.5f64.ln()).ceil().max(1.0) as usize;
        Ok(Self {
            epsilon,
            d,
            delta,
            m_times,
        })
    }

    /// Right end of the sampling window `[0, 2/eps]`.
    pub fn window(&self) -> f64 {
        2.0 / self.epsilon
    }

    pub fn drop_level(&self) -> f64 {
        1.0 - self.d / 4.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DropTime {
    pub t: f64,
    pub identity_prob: f64,
    pub draws: usize,
}

/// Draws up to `m_times` uniform times in `[0, 2/eps]` and returns the first
/// with `I(t) <= 1 - d/4`. Uses the exact identity probability.
pub fn find_drop_time<R: Rng + ?Sized>(
    spec: &Spectrum,
    cfg: &GapStatConfig,
    rng: &mut R,
) -> Option<DropTime> {
    let level = cfg.drop_level();
    for draw in 1..=cfg.m_times {
        let t = rng.random::<f64>() * cfg.window();
        let p = identity_prob_spectral(spec, t);
        if p <= level {
            return Some(DropTime {
                t,
                identity_prob: p,
                draws: draw,
            });
        }
    }
    None
}

/// Midpoint-rule fraction of `[0, 2/eps]` on which `I(t) <= 1 - d/4`.
pub fn good_time_fraction(spec: &Spectrum, cfg: &GapStatConfig, grid: usize) -> f64 {
    let level = cfg.drop_level();
    let h = cfg.window() / grid as f64;
    let good = (0..grid)
        .filter(|&i| identity_prob_spectral(spec, (i as f64 + 0.5) * h) <= level)
        .count();
    good as f64 / grid as f64
}

/// Closed-form mean of `cos(delta * t)` for `t` uniform on `[0, 2/eps]`.
pub fn mean_cosine_over_window(delta: f64, epsilon: f64) -> f64 {
    if delta == 0.0 {
        return 1.0;
    }
    0.5 * epsilon * (2.0 * delta / epsilon).sin() / delta
}

/// Lower bound `max(0, p - 32 q^2)` on `Lambda(A + B, eps/2)` when
/// `Lambda(A, eps) >= p` and `||B||_F <= q eps`.
pub fn stability_bound(p: f64, q: f64) -> f64 {
    (p - 32.0 * q * q).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StabilityCheck {
    /// `Lambda(A + B, eps/2)`.
    pub perturbed: f64,
    /// `max(0, Lambda(A, eps) - 32 (||B||_F / eps)^2)`.
    pub bound: f64,
}

impl StabilityCheck {
    pub fn holds(&self) -> bool {
        self.perturbed >= self.bound
    }
}

pub fn stability_check(a: &PauliSum, b: &PauliSum, epsilon: f64) -> Result<StabilityCheck> {
    let sum = a.add(b)?;
    let base = eigenvalues(&to_dense(a)?)?;
    let perturbed = eigenvalues(&to_dense(&sum)?)?;
    let q = b.frobenius_norm() / epsilon;
    Ok(StabilityCheck {
        perturbed: lambda_stat(&perturbed, epsilon / 2.0)?,
        bound: stability_bound(lambda_stat(&base, epsilon)?, q),
    })
}

/// [`stability_check`] for dense Hermitian matrices, with the normalized
/// Frobenius norm of `b`.
pub fn stability_check_dense(
    a: &DenseOperator,
    b: &DenseOperator,
    epsilon: f64,
) -> Result<StabilityCheck> {
    let base = eigenvalues(a)?;
    let perturbed = eigenvalues(&a.try_add(b)?)?;
    let q = b.normalized_frobenius() / epsilon;
    Ok(StabilityCheck {
        perturbed: lambda_stat(&perturbed, epsilon / 2.0)?,
        bound: stability_bound(lambda_stat(&base, epsilon)?, q),
    })
}

pub fn verify_stability(a: &PauliSum, b: &PauliSum, epsilon: f64) -> Result<bool> {
    Ok(stability_check(a, b, epsilon)?.holds())
}
