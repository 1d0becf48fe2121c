//! Second-order product-formula implementation of `exp(-i t H_T)` from
//! forward queries to the hidden `H` and compiled evolutions of `H_0`.
//!
//! Unrolling the twirl gives `H_T = sum_b w_b Q_b (H - H_0) Q_b` with Pauli
//! conjugators `Q_b` in the subspace and weights summing to one. Each sector
//! contributes two generators, `w_b Q_b H Q_b` (a forward oracle query
//! sandwiched by `Q_b`) and `-w_b Q_b H_0 Q_b` (classically compiled). One
//! step applies every generator for half a step in order and then again in
//! mirrored order.

use std::collections::BTreeMap;

use crate::dense::{evolve, pauli_matrix, DenseOperator};
use crate::error::{Error, Result};
use crate::oracle::{EvolutionLedger, EvolutionOracle};
use crate::pauli::{PauliString, PauliSum};
use crate::twirl::TwirlSchedule;

/// Largest twirl depth accepted by [`unroll_twirl`].
pub const UNROLL_CAP: usize = 8;

/// Upper limit on the number of product-formula steps.
pub const MAX_TROTTER_STEPS: u64 = 1 << 16;

/// The `2^T` conjugators `Q_b`, `b` running over subsets of the drawn
/// Paulis (bit `i` of `b` selects the `i`-th draw).
pub fn unroll_twirl(schedule: &TwirlSchedule) -> Result<Vec<PauliString>> {
    let depth = schedule.depth();
    if depth > UNROLL_CAP {
        return Err(Error::TwirlDepthCap {
            depth,
            cap: UNROLL_CAP,
        });
    }
    let n = schedule.subspace().num_qubits();
    let mut out = Vec::with_capacity(1 << depth);
    for b in 0u32..(1 << depth) {
        let mut q = PauliString::identity(n)?;
        for (i, p) in schedule.paulis().iter().enumerate() {
            if b >> i & 1 == 1 {
                q = q.mul_phase_free(p)?;
            }
        }
        out.push(q);
    }
    Ok(out)
}

/// `(1/|list|) sum_Q Q h Q` in coefficient space.
pub fn conjugation_average(h: &PauliSum, conjugators: &[PauliString]) -> Result<PauliSum> {
    weighted_average(
        h,
        conjugators
            .iter()
            .map(|q| (*q, 1.0 / conjugators.len() as f64)),
    )
}

fn weighted_average<I>(h: &PauliSum, sectors: I) -> Result<PauliSum>
where
    I: IntoIterator<Item = (PauliString, f64)>,
{
    let mut out = PauliSum::new(h.num_qubits())?;
    for (q, w) in sectors {
        for (p, c) in h.conjugate(&q)?.iter() {
            out.add_term(*p, w * c)?;
        }
    }
    Ok(out)
}

/// Product-formula parameters: weighted conjugator sectors, step count and
/// total evolution time.
#[derive(Clone, Debug, PartialEq)]
pub struct TrotterPlan {
    sectors: Vec<(PauliString, f64)>,
    steps: u64,
    time: f64,
}

impl TrotterPlan {
    fn build(sectors: Vec<(PauliString, f64)>, steps: u64, time: f64) -> Result<Self> {
        if steps == 0 || steps > MAX_TROTTER_STEPS {
            return Err(Error::InvalidParameter(format!(
                "step count {steps} outside 1..={MAX_TROTTER_STEPS}"
            )));
        }
        if !(time >= 0.0) || !time.is_finite() {
            return Err(Error::NegativeTime(time));
        }
        Ok(Self {
            sectors,
            steps,
            time,
        })
    }

    /// One sector per unrolled conjugator, each with weight `1/len`.
    pub fn from_conjugators(conjugators: &[PauliString], steps: u64, time: f64) -> Result<Self> {
        if conjugators.is_empty() {
            return Err(Error::InvalidParameter("no conjugators".into()));
        }
        let w = 1.0 / conjugators.len() as f64;
        Self::build(conjugators.iter().map(|q| (*q, w)).collect(), steps, time)
    }

    /// Sectors with repeated conjugators merged, so there are at most
    /// `min(2^T, 2^n)` of them at any twirl depth.
    pub fn from_schedule(schedule: &TwirlSchedule, steps: u64, time: f64) -> Result<Self> {
        let n = schedule.subspace().num_qubits();
        let mut weights: BTreeMap<PauliString, f64> = BTreeMap::new();
        weights.insert(PauliString::identity(n)?, 1.0);
        for p in schedule.paulis() {
            let mut next: BTreeMap<PauliString, f64> = BTreeMap::new();
            for (q, w) in &weights {
                *next.entry(*q).or_default() += 0.5 * w;
                *next.entry(q.mul_phase_free(p)?).or_default() += 0.5 * w;
            }
            weights = next;
        }
        Self::build(weights.into_iter().collect(), steps, time)
    }

    pub fn with_steps(&self, steps: u64) -> Result<Self> {
        Self::build(self.sectors.clone(), steps, self.time)
    }

    pub fn sectors(&self) -> &[(PauliString, f64)] {
        &self.sectors
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn total_weight(&self) -> f64 {
        self.sectors.iter().map(|(_, w)| w).sum()
    }

    /// `sum_b w_b Q_b h Q_b`; applied to `H - H_0` this is `H_T`.
    pub fn effective_hamiltonian(&self, h1: &PauliSum) -> Result<PauliSum> {
        weighted_average(h1, self.sectors.iter().copied())
    }
}

/// Step-count guess `ceil(sectors * sqrt(t^3 / eps))`, clamped to the allowed range.
pub fn initial_step_guess(sectors: usize, time: f64, eps_trott: f64) -> u64 {
    let raw = sectors as f64 * (time.powi(3) / eps_trott).sqrt();
    if !raw.is_finite() {
        return MAX_TROTTER_STEPS;
    }
    (raw.ceil() as u64).clamp(1, MAX_TROTTER_STEPS)
}

fn sandwich(q: &DenseOperator, u: &DenseOperator, identity: bool) -> DenseOperator {
    if identity {
        u.clone()
    } else {
        &(q * u) * q
    }
}

/// Runs the plan against the oracle; the hidden-H evolution time charged
/// is exactly `plan.time()`.
pub fn trotter_evolve(
    oracle: &mut EvolutionOracle,
    h0: &PauliSum,
    plan: &TrotterPlan,
) -> Result<DenseOperator> {
    oracle.require_trotterized()?;
    let n = oracle.num_qubits();
    if h0.num_qubits() != n {
        return Err(Error::LengthMismatch {
            left: n,
            right: h0.num_qubits(),
        });
    }
    let dim = 1usize << n;
    if plan.time == 0.0 {
        return Ok(DenseOperator::identity(dim));
    }
    let half = 0.5 * plan.time / plan.steps as f64;

    // Factors in time order for the forward half-sweep: (conjugator, weight, is_hidden).
    let mut order = Vec::with_capacity(2 * plan.sectors.len());
    for (q, w) in &plan.sectors {
        order.push((*q, *w, true));
        order.push((*q, *w, false));
    }
    let conj: Vec<DenseOperator> = plan
        .sectors
        .iter()
        .map(|(q, _)| pauli_matrix(q))
        .collect::<Result<_>>()?;
    let known: Vec<DenseOperator> = plan
        .sectors
        .iter()
        .zip(&conj)
        .map(|((q, w), qm)| Ok(sandwich(qm, &evolve(h0, -half * w)?, q.is_identity())))
        .collect::<Result<_>>()?;

    let mut step = DenseOperator::identity(dim);
    // charged locally; differencing the running ledger loses precision
    let (mut step_time, mut step_queries) = (0.0, 0u64);
    let sweep = order
        .iter()
        .enumerate()
        .chain(order.iter().enumerate().rev());
    for (idx, (q, w, hidden)) in sweep {
        let sector = idx / 2;
        let factor = if *hidden {
            let u = oracle.query_forward(half * w)?;
            step_time += half * w;
            step_queries += 1;
            sandwich(&conj[sector], &u, q.is_identity())
        } else {
            known[sector].clone()
        };
        step = &factor * &step;
    }
    oracle.replay(
        &EvolutionLedger::new(step_time, step_queries),
        plan.steps - 1,
    );
    Ok(step.pow(plan.steps))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrotterError {
    /// `||V - exp(-i t H_T)||_op`.
    pub op_norm_err: f64,
    /// `|Tr(exp(-i t H_T) - V)| / 2^n`.
    pub bell_deviation: f64,
}

pub fn trotter_error(v: &DenseOperator, h_t: &PauliSum, time: f64) -> Result<TrotterError> {
    let exact = evolve(h_t, time)?;
    let diff = exact.try_sub(v)?;
    Ok(TrotterError {
        op_norm_err: diff.op_norm(),
        bell_deviation: diff.trace().norm() / v.dim() as f64,
    })
}

/// Doubles the step count from the closed-form guess until the measured
/// operator-norm error meets `target` or the step cap is hit. Needs `h_t`,
/// so it is an analysis-side calibration; runs on a forked oracle and leaves
/// the caller's ledger untouched.
pub fn calibrate_steps(
    oracle: &EvolutionOracle,
    h0: &PauliSum,
    plan: &TrotterPlan,
    h_t: &PauliSum,
    target: f64,
) -> Result<(TrotterPlan, TrotterError)> {
    let mut steps = initial_step_guess(plan.sectors.len(), plan.time, target);
    loop {
        let candidate = plan.with_steps(steps)?;
        let mut scratch = oracle.fork();
        let v = trotter_evolve(&mut scratch, h0, &candidate)?;
        let err = trotter_error(&v, h_t, plan.time)?;
        if err.op_norm_err <= target || steps == MAX_TROTTER_STEPS {
            return Ok((candidate, err));
        }
        steps = (steps * 2).min(MAX_TROTTER_STEPS);
    }
}
