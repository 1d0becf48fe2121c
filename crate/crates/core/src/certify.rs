//! The end-to-end certification loop: random diagonal basis, random
//! twirl, evolution of the twirled difference for a random time, and a
//! threshold on the identity-outcome fraction of the Bell statistics.

use std::fmt::Write as _;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bell::{identity_prob_trace, sample_identity_shots};
use crate::dense::DEFAULT_DENSE_CAP;
use crate::error::{Error, Result};
use crate::oracle::{EvolutionLedger, EvolutionOracle, OracleMode};
use crate::pauli::PauliSum;
use crate::trotter::{initial_step_guess, trotter_evolve, TrotterPlan};
use crate::twirl::{DiagonalSubspace, TwirlSchedule};

pub const DEFAULT_C1: f64 = 16.0 / 3.0;
pub const DEFAULT_C2: f64 = 17.0;
pub const DEFAULT_C3: f64 = 4.0 * std::f64::consts::SQRT_2;
pub const DEFAULT_C4: f64 = 128.0;
pub const DEFAULT_C0: f64 = 1.0 / 64.0;

/// Largest locality accepted; `9^k` shots per round beyond this is absurd.
pub const MAX_LOCALITY: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Accept => "ACCEPT",
            Verdict::Reject => "REJECT",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoundSchedule {
    /// Rounds in order, stopping at the first flagged one.
    Sequential,
    /// All rounds run; the verdict is the OR of the flags.
    Parallel,
}

impl RoundSchedule {
    pub fn as_str(self) -> &'static str {
        match self {
            RoundSchedule::Sequential => "sequential",
            RoundSchedule::Parallel => "parallel",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub k: usize,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c0: f64,
    /// Per-round product-formula error budget; `None` picks `c0 / (4 9^k R)`.
    pub eps_trott: Option<f64>,
    pub mode: OracleMode,
    pub schedule: RoundSchedule,
    pub seed: u64,
}

/// Quantities the loop actually runs with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParameters {
    pub rounds: u64,
    pub depth: usize,
    pub time_bound: f64,
    pub shots: u64,
    pub threshold: f64,
    pub eps_trott: f64,
}

impl DerivedParameters {
    /// `R * m * b`, the most evolution time a run can spend.
    pub fn ledger_bound(&self) -> f64 {
        self.rounds as f64 * self.shots as f64 * self.time_bound
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantCheck {
    pub name: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

fn check_le(name: &'static str, lhs: f64, rhs: f64) -> ConstantCheck {
    ConstantCheck {
        name,
        lhs,
        rhs,
        holds: lhs <= rhs + 1e-12 * rhs.abs().max(1.0),
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl CertificationConfig {
    pub fn new(epsilon: f64, delta: f64, k: usize) -> Self {
        Self {
            epsilon,
            delta,
            k,
            c1: DEFAULT_C1,
            c2: DEFAULT_C2,
            c3: DEFAULT_C3,
            c4: DEFAULT_C4,
            c0: DEFAULT_C0,
            eps_trott: None,
            mode: OracleMode::ExactEffective,
            schedule: RoundSchedule::Sequential,
            seed: 0,
        }
    }

    fn nine_k(&self) -> f64 {
        9f64.powi(self.k as i32)
    }

    pub fn validate(&self) -> Result<()> {
        positive("epsilon", self.epsilon)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {}",
                self.delta
            )));
        }
        if self.k == 0 || self.k > MAX_LOCALITY {
            return Err(Error::InvalidParameter(format!(
                "k must lie in 1..={MAX_LOCALITY}, got {}",
                self.k
            )));
        }
        for (name, v) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("c0", self.c0),
        ] {
            positive(name, v)?;
        }
        if self.c0 >= self.nine_k() {
            return Err(Error::InvalidParameter(format!(
                "c0 = {} leaves no room below 1 for the threshold",
                self.c0
            )));
        }
        if let Some(e) = self.eps_trott {
            positive("eps_trott", e)?;
            let cap = 1.0 / (128.0 * self.nine_k());
            if e > cap {
                return Err(Error::InvalidParameter(format!(
                    "eps_trott {e} exceeds 1/(128 9^k) = {cap}"
                )));
            }
        }
        Ok(())
    }

    pub fn derive(&self) -> Result<DerivedParameters> {
        self.validate()?;
        let three_k = 3f64.powi(self.k as i32);
        let nine_k = self.nine_k();
        let rounds = (self.c1 * three_k * (1.0 / self.delta).ln())
            .ceil()
            .max(1.0);
        let depth = (self.c2 * self.k as f64).ceil().max(1.0);
        let shots = (self.c4 * nine_k).ceil().max(1.0);
        if rounds > 1e9 || depth > 1e6 || shots > 1e12 {
            return Err(Error::InvalidParameter(
                "derived round, depth or shot count is unreasonably large".into(),
            ));
        }
        let rounds = rounds as u64;
        Ok(DerivedParameters {
            rounds,
            depth: depth as usize,
            time_bound: self.c3 * three_k.sqrt() / self.epsilon,
            shots: shots as u64,
            threshold: 1.0 - self.c0 / nine_k,
            eps_trott: self
                .eps_trott
                .unwrap_or(self.c0 / (4.0 * nine_k * rounds as f64)),
        })
    }

    /// The arithmetic the default constants are chosen to satisfy. Overridden
    /// constants may fail these; the run still proceeds and the report says so.
    pub fn constant_checks(&self) -> Result<Vec<ConstantCheck>> {
        let p = self.derive()?;
        let k = self.k as i32;
        let three_k = 3f64.powi(k);
        let nine_k = self.nine_k();
        let detect = 0.75 / (4.0 * three_k);
        Ok(vec![
            // 2^11 3^{3k} <= 2^T, compared in log2
            check_le(
                "twirl_depth",
                11.0 + 3.0 * k as f64 * 3f64.log2(),
                p.depth as f64,
            ),
            check_le(
                "residual_ratio",
                2.0 * 2f64.powf(-(p.depth as f64) / 2.0),
                (1.0 / 16.0) / three_k / (std::f64::consts::SQRT_2 * three_k.sqrt()),
            ),
            check_le(
                "threshold_gap",
                self.c0 / nine_k,
                1.0 / (32.0 * nine_k) - 2.0 * p.eps_trott,
            ),
            check_le(
                "amplification",
                p.rounds as f64 * (1.0 - detect).ln(),
                self.delta.ln(),
            ),
            check_le(
                "time_window",
                4.0 * std::f64::consts::SQRT_2 * three_k.sqrt() / self.epsilon,
                p.time_bound,
            ),
        ])
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub subspace: String,
    pub transcript_digest: String,
    pub t: f64,
    /// Product-formula steps; zero in exact mode.
    pub trotter_steps: u64,
    pub identity_count: u64,
    pub shots: u64,
    pub flagged: bool,
    pub ledger: EvolutionLedger,
}

impl RoundRecord {
    pub fn identity_fraction(&self) -> f64 {
        self.identity_count as f64 / self.shots as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificationReport {
    pub verdict: Verdict,
    pub rounds_run: u64,
    pub rejecting_round: Option<u64>,
    pub rounds: Vec<RoundRecord>,
    pub ledger: EvolutionLedger,
    pub config: CertificationConfig,
    pub params: DerivedParameters,
    pub checks: Vec<ConstantCheck>,
    pub num_qubits: usize,
    pub h0: PauliSum,
    /// Extra `key = value` header lines, e.g. input file names.
    pub annotations: Vec<(String, String)>,
}

impl CertificationReport {
    pub fn to_text(&self) -> String {
        let c = &self.config;
        let p = &self.params;
        let mut out = String::from("hamcert certification report\n");
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        kv("verdict", self.verdict.as_str().into());
        kv("schedule", c.schedule.as_str().into());
        kv("mode", c.mode.as_str().into());
        kv("seed", c.seed.to_string());
        kv("qubits", self.num_qubits.to_string());
        kv("epsilon", c.epsilon.to_string());
        kv("delta", c.delta.to_string());
        kv("k", c.k.to_string());
        kv("c1", c.c1.to_string());
        kv("c2", c.c2.to_string());
        kv("c3", c.c3.to_string());
        kv("c4", c.c4.to_string());
        kv("c0", c.c0.to_string());
        kv("eps_trott", p.eps_trott.to_string());
        kv("rounds_budget", p.rounds.to_string());
        kv("twirl_depth", p.depth.to_string());
        kv("time_bound", p.time_bound.to_string());
        kv("shots_per_round", p.shots.to_string());
        kv("threshold", p.threshold.to_string());
        for check in &self.checks {
            let status = if check.holds { "pass" } else { "FAIL" };
            kv(&format!("check.{}", check.name), status.into());
        }
        let h0: Vec<String> = self.h0.iter().map(|(p, c)| format!("{c} {p}")).collect();
        kv("h0", h0.join("; "));
        for (k, v) in &self.annotations {
            kv(k, v.clone());
        }
        kv("rounds_run", self.rounds_run.to_string());
        kv(
            "rejecting_round",
            self.rejecting_round
                .map_or_else(|| "none".to_string(), |r| r.to_string()),
        );
        kv("ledger_total_time", self.ledger.total_time().to_string());
        kv("ledger_queries", self.ledger.query_count().to_string());
        kv("ledger_bound", p.ledger_bound().to_string());
        out.push_str("[rounds]\n");
        out.push_str(
            "round,subspace,transcript_digest,t,trotter_steps,identity_count,shots,identity_fraction,flagged\n",
        );
        for r in &self.rounds {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.round,
                r.subspace,
                r.transcript_digest,
                r.t,
                r.trotter_steps,
                r.identity_count,
                r.shots,
                r.identity_fraction(),
                r.flagged
            );
        }
        out
    }
}

/// Generator for round `round` (1-based) of a run seeded with `seed`.
/// Independent of scheduling, so sequential and parallel runs draw the
/// same randomness per round.
pub fn round_rng(seed: u64, round: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(round);
    rng
}

fn check_inputs(h0: &PauliSum, oracle: &EvolutionOracle, cfg: &CertificationConfig) -> Result<()> {
    cfg.validate()?;
    if h0.num_qubits() != oracle.num_qubits() {
        return Err(Error::LengthMismatch {
            left: h0.num_qubits(),
            right: oracle.num_qubits(),
        });
    }
    if h0.num_qubits() > DEFAULT_DENSE_CAP {
        return Err(Error::DenseCapExceeded {
            n: h0.num_qubits(),
            cap: DEFAULT_DENSE_CAP,
        });
    }
    h0.ensure_k_local(cfg.k)?;
    if oracle.mode() != cfg.mode {
        return Err(Error::ModeMismatch {
            expected: cfg.mode.as_str(),
            actual: oracle.mode().as_str(),
        });
    }
    Ok(())
}

/// One pass of the loop body with round index `round`.
pub fn run_round<R: Rng + ?Sized>(
    h0: &PauliSum,
    oracle: &mut EvolutionOracle,
    cfg: &CertificationConfig,
    round: u64,
    rng: &mut R,
) -> Result<RoundRecord> {
    check_inputs(h0, oracle, cfg)?;
    let p = cfg.derive()?;
    let n = oracle.num_qubits();
    let subspace = DiagonalSubspace::sample(n, rng)?;
    let schedule = TwirlSchedule::sample(subspace, p.depth, rng)?;
    let t = rng.random::<f64>() * p.time_bound;

    // a fresh ledger per round keeps the round's charge exact
    let mut worker = oracle.fork();
    let (u, steps) = match cfg.mode {
        OracleMode::ExactEffective => (worker.effective_shot(h0, &schedule, t, p.shots)?, 0),
        OracleMode::Trotterized => {
            let probe = TrotterPlan::from_schedule(&schedule, 1, t)?;
            let steps = initial_step_guess(probe.sectors().len(), t, p.eps_trott);
            let plan = probe.with_steps(steps)?;
            let v = trotter_evolve(&mut worker, h0, &plan)?;
            let per_shot = worker.ledger();
            worker.replay(&per_shot, p.shots - 1);
            (v, steps)
        }
    };
    let prob = identity_prob_trace(&u)?;
    let identity_count = sample_identity_shots(prob, p.shots, rng)?;
    let flagged = (identity_count as f64 / p.shots as f64) <= p.threshold;
    oracle.replay(&worker.ledger(), 1);
    Ok(RoundRecord {
        round,
        subspace: schedule.subspace().to_string(),
        transcript_digest: schedule.digest(),
        t,
        trotter_steps: steps,
        identity_count,
        shots: p.shots,
        flagged,
        ledger: worker.ledger(),
    })
}

/// Runs the certification loop against the oracle. The oracle's ledger
/// accumulates every charge the run makes.
pub fn certify(
    h0: &PauliSum,
    oracle: &mut EvolutionOracle,
    cfg: &CertificationConfig,
) -> Result<CertificationReport> {
    check_inputs(h0, oracle, cfg)?;
    let params = cfg.derive()?;
    let checks = cfg.constant_checks()?;
    let start = oracle.ledger();

    let rounds = match cfg.schedule {
        RoundSchedule::Sequential => {
            let mut out = Vec::new();
            for r in 1..=params.rounds {
                let rec = run_round(h0, oracle, cfg, r, &mut round_rng(cfg.seed, r))?;
                let stop = rec.flagged;
                out.push(rec);
                if stop {
                    break;
                }
            }
            out
        }
        RoundSchedule::Parallel => {
            let results: Vec<Result<RoundRecord>> = (1..=params.rounds)
                .into_par_iter()
                .map(|r| {
                    let mut worker = oracle.fork();
                    run_round(h0, &mut worker, cfg, r, &mut round_rng(cfg.seed, r))
                })
                .collect();
            let records = results.into_iter().collect::<Result<Vec<_>>>()?;
            for rec in &records {
                oracle.replay(&rec.ledger, 1);
            }
            records
        }
    };

    let rejecting_round = rounds.iter().find(|r| r.flagged).map(|r| r.round);
    Ok(CertificationReport {
        verdict: if rejecting_round.is_some() {
            Verdict::Reject
        } else {
            Verdict::Accept
        },
        rounds_run: rounds.len() as u64,
        rejecting_round,
        rounds,
        ledger: oracle.ledger().since(&start),
        config: cfg.clone(),
        params,
        checks,
        num_qubits: h0.num_qubits(),
        h0: h0.clone(),
        annotations: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub epsilon: f64,
    pub total_time: f64,
    pub queries: u64,
    pub verdict: Verdict,
    pub seed: u64,
}

/// Least-squares slope of `ln(total_time)` against `ln(epsilon)`; `None`
/// with fewer than two usable rows.
pub fn loglog_slope(rows: &[SweepRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.total_time > 0.0 && r.epsilon > 0.0)
        .map(|r| (r.epsilon.ln(), r.total_time.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Certifies `H0 + eps * direction` for each `eps`, every run with the
/// template's seed, and records what each run spent.
pub fn sweep_epsilon(
    h0: &PauliSum,
    direction: &PauliSum,
    eps_list: &[f64],
    template: &CertificationConfig,
) -> Result<Vec<SweepRow>> {
    let norm = direction.frobenius_norm();
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "direction must have unit Frobenius norm, got {norm}"
        )));
    }
    if eps_list.is_empty() {
        return Err(Error::InvalidParameter("empty epsilon list".into()));
    }
    let mut rows = Vec::with_capacity(eps_list.len());
    for &eps in eps_list {
        let cfg = CertificationConfig {
            epsilon: eps,
            ..template.clone()
        };
        cfg.validate()?;
        let hidden = h0.add(&direction.scale(eps)?)?;
        let mut oracle = EvolutionOracle::new(hidden, cfg.mode)?;
        let report = certify(h0, &mut oracle, &cfg)?;
        rows.push(SweepRow {
            epsilon: eps,
            total_time: report.ledger.total_time(),
            queries: report.ledger.query_count(),
            verdict: report.verdict,
            seed: cfg.seed,
        });
    }
    Ok(rows)
}
