//! Random diagonal basis selection and coefficient-space Pauli twirling.
//!
//! A [`DiagonalSubspace`] fixes one axis `Q_i` in `{X, Y, Z}` per qubit and
//! spans the abelian group `S = (x)_i {I, Q_i}`. Twirling by a uniform
//! element of `S` keeps every term commuting with it and zeroes the rest,
//! so the process never needs dense matrices.

use std::fmt;

use rand::Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct DiagonalSubspace {
    axes: PauliString,
}

impl DiagonalSubspace {
    pub fn new(axes: &[Pauli]) -> Result<Self> {
        if let Some(i) = axes.iter().position(|p| *p == Pauli::I) {
            return Err(Error::InvalidParameter(format!("axis {i} is the identity")));
        }
        Ok(Self {
            axes: PauliString::new(axes)?,
        })
    }

    /// Each axis drawn independently and uniformly from `{X, Y, Z}`.
    pub fn sample<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        let axes: Vec<Pauli> = (0..n)
            .map(|_| Pauli::NON_IDENTITY[rng.random_range(0..3)])
            .collect();
        Self::new(&axes)
    }

    /// All axes Z: the computational-basis diagonal subspace.
    pub fn computational(n: usize) -> Result<Self> {
        Self::new(&vec![Pauli::Z; n])
    }

    pub fn num_qubits(&self) -> usize {
        self.axes.num_qubits()
    }

    pub fn axis(&self, site: usize) -> Pauli {
        self.axes.letter(site)
    }

    /// The axes as one full-weight string, e.g. `XZY`.
    pub fn axes(&self) -> &PauliString {
        &self.axes
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        if p.num_qubits() != self.num_qubits() {
            return false;
        }
        let support = p.support();
        (p.x_mask() ^ self.axes.x_mask()) & support == 0
            && (p.z_mask() ^ self.axes.z_mask()) & support == 0
    }

    /// The element carrying `Q_i` exactly on the sites set in `mask`.
    pub fn element(&self, mask: u64) -> PauliString {
        let mask = mask & self.axes.support();
        PauliString::from_masks(
            self.num_qubits(),
            self.axes.x_mask() & mask,
            self.axes.z_mask() & mask,
        )
        .expect("mask restricted to the register")
    }

    /// Uniform element of `S`: one fair bit per site.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> PauliString {
        let n = self.num_qubits();
        let bits = if n == 64 {
            rng.random::<u64>()
        } else {
            rng.random::<u64>() & ((1u64 << n) - 1)
        };
        self.element(bits)
    }

    /// Splits `h` into its in-subspace part and the remainder.
    pub fn project(&self, h: &PauliSum) -> Result<(PauliSum, PauliSum)> {
        self.check_len(h)?;
        Ok((
            h.filter(|p| self.contains(p)),
            h.filter(|p| !self.contains(p)),
        ))
    }

    /// Rewrites a Z-diagonal sum with `Q_i` in place of `Z` on each site.
    pub fn lift_z_diagonal(&self, h: &PauliSum) -> Result<PauliSum> {
        self.check_len(h)?;
        let mut out = PauliSum::new(h.num_qubits())?;
        for (p, c) in h.iter() {
            if !p.is_z_diagonal() {
                return Err(Error::NotDiagonal(p.to_string()));
            }
            out.add_term(self.element(p.z_mask()), c)?;
        }
        Ok(out)
    }

    /// Inverse of [`DiagonalSubspace::lift_z_diagonal`] for in-subspace sums.
    pub fn to_z_frame(&self, h: &PauliSum) -> Result<PauliSum> {
        self.check_len(h)?;
        let n = h.num_qubits();
        let mut out = PauliSum::new(n)?;
        for (p, c) in h.iter() {
            if !self.contains(p) {
                return Err(Error::InvalidParameter(format!("{p} is not in {self}")));
            }
            out.add_term(PauliString::from_masks(n, 0, p.support())?, c)?;
        }
        Ok(out)
    }

    fn check_len(&self, h: &PauliSum) -> Result<()> {
        if h.num_qubits() != self.num_qubits() {
            return Err(Error::LengthMismatch {
                left: self.num_qubits(),
                right: h.num_qubits(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for DiagonalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.axes)
    }
}

impl fmt::Debug for DiagonalSubspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DiagonalSubspace({})", self.axes)
    }
}

/// `Pr[P in S] = 3^{-|P|}` over uniformly random axes.
pub fn survival_probability(p: &PauliString) -> f64 {
    3f64.powi(-(p.weight() as i32))
}

/// Exact `(E ||H_eff||_F^2, E ||H_eff||_F^4)` by enumerating all `3^n` subspaces.
pub fn effective_norm_moments_exact(h: &PauliSum) -> Result<(f64, f64)> {
    let n = h.num_qubits();
    if n > 10 {
        return Err(Error::DenseCapExceeded { n, cap: 10 });
    }
    let total = 3usize.pow(n as u32);
    let (mut m1, mut m2) = (0.0, 0.0);
    let mut axes = vec![Pauli::X; n];
    for code in 0..total {
        let mut c = code;
        for a in axes.iter_mut() {
            *a = Pauli::NON_IDENTITY[c % 3];
            c /= 3;
        }
        let s = DiagonalSubspace::new(&axes)?;
        let y: f64 = h
            .iter()
            .filter(|(p, _)| s.contains(p))
            .map(|(_, c)| c * c)
            .sum();
        m1 += y;
        m2 += y * y;
    }
    Ok((m1 / total as f64, m2 / total as f64))
}

/// A subspace with the sequence of twirling Paulis drawn from it. Holds no
/// Hamiltonian data, so it can be sampled without access to the hidden `H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwirlSchedule {
    subspace: DiagonalSubspace,
    paulis: Vec<PauliString>,
}

impl TwirlSchedule {
    pub fn new(subspace: DiagonalSubspace, paulis: Vec<PauliString>) -> Result<Self> {
        if let Some(p) = paulis.iter().find(|p| !subspace.contains(p)) {
            return Err(Error::InvalidParameter(format!(
                "twirl Pauli {p} is not in {subspace}"
            )));
        }
        Ok(Self { subspace, paulis })
    }

    /// Draws `depth` independent uniform elements of `subspace`.
    pub fn sample<R: Rng + ?Sized>(
        subspace: DiagonalSubspace,
        depth: usize,
        rng: &mut R,
    ) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidParameter("twirl depth must be >= 1".into()));
        }
        let paulis = (0..depth).map(|_| subspace.random_element(rng)).collect();
        Ok(Self { subspace, paulis })
    }

    pub fn subspace(&self) -> &DiagonalSubspace {
        &self.subspace
    }

    pub fn paulis(&self) -> &[PauliString] {
        &self.paulis
    }

    pub fn depth(&self) -> usize {
        self.paulis.len()
    }

    /// The twirled operator: terms commuting with every drawn Pauli survive.
    pub fn apply(&self, h: &PauliSum) -> Result<PauliSum> {
        self.subspace.check_len(h)?;
        Ok(h.filter(|q| self.paulis.iter().all(|p| p.commutes_unchecked(q))))
    }

    /// Frobenius norms of `H_1, ..., H_{T+1}` step by step.
    pub fn norm_trajectory(&self, h: &PauliSum) -> Result<Vec<f64>> {
        self.subspace.check_len(h)?;
        let mut current = h.clone();
        let mut norms = vec![current.frobenius_norm()];
        for p in &self.paulis {
            current = current.filter(|q| p.commutes_unchecked(q));
            norms.push(current.frobenius_norm());
        }
        Ok(norms)
    }

    /// Short hex digest of the axes and drawn Paulis.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.subspace.to_string().as_bytes());
        for p in &self.paulis {
            hasher.update(b"|");
            hasher.update(p.to_string().as_bytes());
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Full record of one twirl of `H_1 = H - H_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TwirlTranscript {
    pub schedule: TwirlSchedule,
    pub h_eff: PauliSum,
    pub h_t_prime: PauliSum,
    pub h_t: PauliSum,
}

impl TwirlTranscript {
    pub fn from_schedule(h1: &PauliSum, schedule: TwirlSchedule) -> Result<Self> {
        let (h_eff, off) = schedule.subspace().project(h1)?;
        let h_t_prime = schedule.apply(&off)?;
        let h_t = h_eff.add(&h_t_prime)?;
        Ok(Self {
            schedule,
            h_eff,
            h_t_prime,
            h_t,
        })
    }
}

/// Draws `depth` twirl Paulis from `subspace` and applies them to `h1`.
pub fn run_twirl<R: Rng + ?Sized>(
    h1: &PauliSum,
    subspace: &DiagonalSubspace,
    depth: usize,
    rng: &mut R,
) -> Result<TwirlTranscript> {
    let schedule = TwirlSchedule::sample(subspace.clone(), depth, rng)?;
    TwirlTranscript::from_schedule(h1, schedule)
}

/// `E ||H_T'||_F^2 = 2^{-T} ||H_1'||_F^2` for the off-subspace part.
pub fn expected_residual_norm_sq(off_subspace: &PauliSum, depth: usize) -> f64 {
    off_subspace.frobenius_norm().powi(2) * 2f64.powi(-(depth as i32))
}
