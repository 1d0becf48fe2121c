//! Black-box access to the unknown Hamiltonian.
//!
//! The hidden `H` goes in at construction and never comes back out. The only
//! ways to use it are forward evolutions `exp(-i t H)` with `t >= 0`, each
//! charged to an [`EvolutionLedger`], and (in exact-effective mode) the ideal
//! twirled evolution charged at its nominal duration. There is no inverse
//! or controlled access.

use std::fmt;

use crate::dense::{eigendecompose, evolve, to_dense, DenseOperator, EigenDecomposition};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::twirl::TwirlSchedule;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OracleMode {
    /// Ideal `exp(-i t H_T)` per shot, charged `t`.
    ExactEffective,
    /// `exp(-i t H_T)` realized by a product formula over forward queries.
    Trotterized,
}

impl OracleMode {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleMode::ExactEffective => "exact",
            OracleMode::Trotterized => "trotter",
        }
    }
}

impl fmt::Display for OracleMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Cumulative forward evolution time spent on the unknown Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EvolutionLedger {
    total_time: f64,
    query_count: u64,
}

impl EvolutionLedger {
    pub(crate) fn new(total_time: f64, query_count: u64) -> Self {
        Self {
            total_time,
            query_count,
        }
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    fn charge(&mut self, duration: f64, queries: u64) {
        self.total_time += duration;
        self.query_count += queries;
    }

    /// Adds another ledger's totals, e.g. from a parallel worker.
    pub fn merge(&mut self, other: &EvolutionLedger) {
        self.charge(other.total_time, other.query_count);
    }

    /// Ledger accumulated between `earlier` and `self`.
    pub fn since(&self, earlier: &EvolutionLedger) -> EvolutionLedger {
        EvolutionLedger {
            total_time: self.total_time - earlier.total_time,
            query_count: self.query_count - earlier.query_count,
        }
    }
}

/// Evolution under the known reference Hamiltonian. Compiled classically,
/// so both time directions are allowed and nothing is charged.
pub fn evolve_known(h0: &PauliSum, t: f64) -> Result<DenseOperator> {
    evolve(h0, t)
}

pub struct EvolutionOracle {
    hidden: PauliSum,
    eigen: EigenDecomposition,
    mode: OracleMode,
    ledger: EvolutionLedger,
}

impl EvolutionOracle {
    pub fn new(hidden: PauliSum, mode: OracleMode) -> Result<Self> {
        let eigen = eigendecompose(&to_dense(&hidden)?)?;
        Ok(Self {
            hidden,
            eigen,
            mode,
            ledger: EvolutionLedger::default(),
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.hidden.num_qubits()
    }

    pub fn mode(&self) -> OracleMode {
        self.mode
    }

    pub fn ledger(&self) -> EvolutionLedger {
        self.ledger
    }

    /// A second handle on the same hidden Hamiltonian with an empty ledger,
    /// for per-worker accounting that is merged afterwards.
    pub fn fork(&self) -> Self {
        Self {
            hidden: self.hidden.clone(),
            eigen: self.eigen.clone(),
            mode: self.mode,
            ledger: EvolutionLedger::default(),
        }
    }

    fn check_time(t: f64) -> Result<()> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::NegativeTime(t));
        }
        Ok(())
    }

    fn require_mode(&self, expected: OracleMode) -> Result<()> {
        if self.mode != expected {
            return Err(Error::ModeMismatch {
                expected: expected.as_str(),
                actual: self.mode.as_str(),
            });
        }
        Ok(())
    }

    /// `exp(-i t H)` for the hidden `H`; charges `t`.
    pub fn query_forward(&mut self, t: f64) -> Result<DenseOperator> {
        Self::check_time(t)?;
        self.ledger.charge(t, 1);
        if t == 0.0 {
            return Ok(DenseOperator::identity(1 << self.num_qubits()));
        }
        Ok(self.eigen.evolve(t))
    }

    pub fn evolve_known(&self, h0: &PauliSum, t: f64) -> Result<DenseOperator> {
        evolve_known(h0, t)
    }

    /// Ideal `exp(-i t H_T)` with `H_T` the twirl of `H - H0` under
    /// `schedule`; charges `t` for each of `shots` repetitions.
    pub fn effective_shot(
        &mut self,
        h0: &PauliSum,
        schedule: &TwirlSchedule,
        t: f64,
        shots: u64,
    ) -> Result<DenseOperator> {
        self.require_mode(OracleMode::ExactEffective)?;
        Self::check_time(t)?;
        let h1 = self.hidden.subtract(h0)?;
        let (h_eff, off) = schedule.subspace().project(&h1)?;
        let h_t = h_eff.add(&schedule.apply(&off)?)?;
        let u = evolve(&h_t, t)?;
        self.ledger.charge(t * shots as f64, shots);
        Ok(u)
    }

    /// Records `times` further repetitions of an already executed query
    /// sequence whose cost was `per_run`.
    pub fn replay(&mut self, per_run: &EvolutionLedger, times: u64) {
        self.ledger.charge(
            per_run.total_time * times as f64,
            per_run.query_count * times,
        );
    }

    pub(crate) fn require_trotterized(&self) -> Result<()> {
        self.require_mode(OracleMode::Trotterized)
    }
}

impl fmt::Debug for EvolutionOracle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvolutionOracle")
            .field("n", &self.num_qubits())
            .field("mode", &self.mode)
            .field("ledger", &self.ledger)
            .finish_non_exhaustive()
    }
}
