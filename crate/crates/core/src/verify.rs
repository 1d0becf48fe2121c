//! Randomized property suites behind `hamcert verify`. Each suite draws its
//! instances from its own stream of the master seed and counts violations
//! of one mathematical property.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bell::{identity_prob_spectral, identity_prob_trace, ChoiBellSampler};
use crate::dense::{
    eigenvalues, evolve, hoffman_wielandt_gap, pauli_matrix, to_dense, DenseOperator, Spectrum,
};
use crate::error::{Error, Result};
use crate::gap::{
    find_drop_time, good_time_fraction, lambda_stat, stability_check_dense, GapStatConfig,
};
use crate::instances::{random_hermitian, random_k_local, random_z_diagonal};
use crate::moments::{
    function_moments, gap_moments, paley_zygmund_bound, verify_gap_bound, walsh_eigenvalues,
    MultilinearFunction,
};
use crate::oracle::{EvolutionOracle, OracleMode};
use crate::pauli::{PauliString, PauliSum};
use crate::trotter::{trotter_error, trotter_evolve, unroll_twirl, TrotterPlan};
use crate::twirl::{survival_probability, DiagonalSubspace, TwirlSchedule};

pub const SUITES: [&str; 10] = [
    "bell",
    "gapbound",
    "basis",
    "twirl",
    "stability",
    "hoffman",
    "paley",
    "droptime",
    "trotter",
    "bonami",
];

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub checks: u64,
    pub failures: u64,
    pub detail: String,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Default)]
struct Tally {
    checks: u64,
    failures: u64,
    first: Option<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(what());
            }
        }
    }

    fn finish(self, name: &'static str, summary: String) -> SuiteOutcome {
        let detail = match self.first {
            Some(f) => format!("{summary}; first failure: {f}"),
            None => summary,
        };
        SuiteOutcome {
            name,
            checks: self.checks,
            failures: self.failures,
            detail,
        }
    }
}

/// Binomial standard error, floored at one count so that degenerate
/// probabilities do not demand exact agreement.
fn binomial_sigma(p: f64, draws: u64) -> f64 {
    (p * (1.0 - p) / draws as f64)
        .sqrt()
        .max(1.0 / draws as f64)
}

pub fn run_suite(name: &str, trials: usize, seed: u64) -> Result<SuiteOutcome> {
    let index = SUITES
        .iter()
        .position(|s| *s == name)
        .ok_or_else(|| Error::InvalidParameter(format!("unknown suite '{name}'")))?;
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let rng = &mut rng;
    match SUITES[index] {
        "bell" => bell(trials, rng),
        "gapbound" => gapbound(trials, rng),
        "basis" => basis(trials, rng),
        "twirl" => twirl(trials, rng),
        "stability" => stability(trials, rng),
        "hoffman" => hoffman(trials, rng),
        "paley" => paley(trials, rng),
        "droptime" => droptime(trials, rng),
        "trotter" => trotter(trials, rng),
        _ => bonami(trials, rng),
    }
}

fn nonempty<F>(mut make: F) -> Result<PauliSum>
where
    F: FnMut() -> Result<PauliSum>,
{
    loop {
        let h = make()?;
        if !h.is_empty() {
            return Ok(h);
        }
    }
}

fn bell(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    let mut worst = 0f64;
    for i in 0..trials {
        let n = 1 + i % 4;
        let h = nonempty(|| random_k_local(n, n.min(2), 2 * n, rng))?;
        let t = rng.random::<f64>() * 20.0;
        let spectral = identity_prob_spectral(&eigenvalues(&to_dense(&h)?)?, t);
        let trace = identity_prob_trace(&evolve(&h, t)?)?;
        worst = worst.max((spectral - trace).abs());
        tally.check((spectral - trace).abs() <= 1e-10, || format!("n={n} t={t}"));
    }
    let shots = 1000 * trials as u64;
    for i in 0..trials.min(10) {
        let n = 1 + i % 3;
        let h = nonempty(|| random_k_local(n, n.min(2), 2 * n, rng))?;
        let u = evolve(&h, rng.random::<f64>() * 20.0)?;
        let sampler = ChoiBellSampler::new(&u)?;
        for (bits, &prob) in sampler.probabilities().iter().enumerate() {
            let label = sampler.outcome(bits as u64).pauli_label();
            let tr = pauli_matrix(&label)?.try_mul(&u)?.trace();
            let want = tr.norm_sqr() / (u.dim() * u.dim()) as f64;
            tally.check((prob - want).abs() <= 1e-10, || format!("outcome {label}"));
        }
        let p = identity_prob_trace(&u)?;
        let hits = (0..shots)
            .filter(|_| sampler.sample(rng).is_identity())
            .count();
        let freq = hits as f64 / shots as f64;
        tally.check((freq - p).abs() <= 3.0 * binomial_sigma(p, shots), || {
            format!("identity frequency {freq} vs {p}")
        });
    }
    Ok(tally.finish("bell", format!("max spectral/trace gap {worst:e}")))
}

fn gapbound(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    for k in 1..=3usize {
        for i in 0..trials {
            let n = rng.random_range(k..=8);
            let terms = rng.random_range(1..=3 * n);
            let h = nonempty(|| random_z_diagonal(n, k, terms, rng))?;
            tally.check(verify_gap_bound(&h, k)?, || format!("k={k} {h:?}"));
            if i % 10 == 0 {
                let walsh = walsh_eigenvalues(&h)?;
                let dense = eigenvalues(&to_dense(&h)?)?;
                let ok = walsh
                    .values()
                    .iter()
                    .zip(dense.values())
                    .all(|(a, b)| (a - b).abs() <= 1e-9);
                tally.check(ok, || format!("Walsh spectrum mismatch {h:?}"));
            }
        }
    }
    Ok(tally.finish("gapbound", format!("{} instances per k", trials)))
}

fn basis(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    let draws = 1000 * trials as u64;
    let h = nonempty(|| random_k_local(4, 3, 12, rng))?;
    let terms: Vec<PauliString> = h.iter().map(|(p, _)| *p).collect();
    let mut hits = vec![0u64; terms.len()];
    for _ in 0..draws {
        let s = DiagonalSubspace::sample(4, rng)?;
        for (count, p) in hits.iter_mut().zip(&terms) {
            *count += s.contains(p) as u64;
        }
    }
    for (count, p) in hits.iter().zip(&terms) {
        let want = survival_probability(p);
        let freq = *count as f64 / draws as f64;
        tally.check(
            (freq - want).abs() <= 3.0 * binomial_sigma(want, draws),
            || format!("{p}: {freq} vs {want}"),
        );
    }
    let instance_draws = 100 * trials as u64;
    for i in 0..10 {
        let k = 1 + i % 2;
        let h = nonempty(|| random_k_local(4, k, 8, rng))?;
        let level = h.frobenius_norm() / (std::f64::consts::SQRT_2 * 3f64.powf(k as f64 / 2.0));
        let floor = 1.0 / (4.0 * 3f64.powi(k as i32));
        let mut good = 0u64;
        for _ in 0..instance_draws {
            let s = DiagonalSubspace::sample(4, rng)?;
            good += (s.project(&h)?.0.frobenius_norm() >= level) as u64;
        }
        let freq = good as f64 / instance_draws as f64;
        tally.check(
            freq >= floor - 3.0 * binomial_sigma(floor, instance_draws),
            || format!("k={k} effective-norm frequency {freq} < {floor}"),
        );
    }
    Ok(tally.finish("basis", format!("{draws} subspace draws")))
}

fn twirl(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    let draws = 200 * trials;
    for depth in 1..=6usize {
        let (s, off) = loop {
            let s = DiagonalSubspace::sample(3, rng)?;
            let h1 = random_k_local(3, 3, 12, rng)?;
            let off = s.project(&h1)?.1;
            if !off.is_empty() {
                break (s, off);
            }
        };
        let norm_sq = off.frobenius_norm().powi(2);
        let want = norm_sq * 2f64.powi(-(depth as i32));
        let markov = 2.0 * 2f64.powf(-(depth as f64) / 2.0) * off.frobenius_norm();
        let mut values = Vec::with_capacity(draws);
        let mut below = 0u64;
        for _ in 0..draws {
            let residual = TwirlSchedule::sample(s.clone(), depth, rng)?.apply(&off)?;
            let r = residual.frobenius_norm();
            values.push(r * r);
            below += (r <= markov) as u64;
        }
        let mean = values.iter().sum::<f64>() / draws as f64;
        let var =
            values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (draws - 1).max(1) as f64;
        let se = (var / draws as f64).sqrt().max(1e-12 * norm_sq);
        tally.check((mean - want).abs() <= 3.0 * se, || {
            format!("T={depth}: mean {mean} vs {want}")
        });
        let freq = below as f64 / draws as f64;
        tally.check(
            freq >= 0.75 - 3.0 * binomial_sigma(0.75, draws as u64),
            || format!("T={depth}: Markov frequency {freq}"),
        );
    }
    Ok(tally.finish("twirl", format!("{draws} schedules per depth")))
}

fn scaled_to(m: &DenseOperator, norm: f64) -> DenseOperator {
    let current = m.normalized_frobenius();
    if current == 0.0 {
        return m.clone();
    }
    m.scale((norm / current).into())
}

fn stability(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    for i in 0..trials {
        let dim = 1 << (1 + i % 4);
        let a = random_hermitian(dim, 1.0, rng);
        let eps = rng.random_range(0.2..1.0) * a.normalized_frobenius();
        let p = lambda_stat(&eigenvalues(&a)?, eps)?;
        let q = rng.random::<f64>() * (p / 32.0).sqrt();
        let b = scaled_to(&random_hermitian(dim, 1.0, rng), q * eps);
        let check = stability_check_dense(&a, &b, eps)?;
        tally.check(check.holds(), || format!("dim={dim} {check:?}"));
    }
    Ok(tally.finish("stability", format!("{trials} perturbation pairs")))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut p = rest.clone();
            p.insert(pos, n - 1);
            out.push(p);
        }
    }
    out
}

fn hoffman(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    for i in 0..trials {
        let dim = 1 << (1 + i % 4);
        let a = random_hermitian(dim, 1.0, rng);
        let b = random_hermitian(dim, rng.random_range(0.01..2.0), rng);
        let gap = hoffman_wielandt_gap(&a, &b)?;
        let diff = a.try_sub(&b)?.normalized_frobenius().powi(2);
        tally.check(gap <= diff * (1.0 + 1e-12) + 1e-14, || {
            format!("dim={dim}: {gap} > {diff}")
        });
    }
    // sorted matching is the best permutation
    for i in 0..trials {
        let len = 2 + i % 5;
        let mut a: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let b: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        a.shuffle(rng);
        let sorted =
            Spectrum::new(a.clone())?.mean_square_displacement(&Spectrum::new(b.clone())?)?;
        let best = permutations(len)
            .iter()
            .map(|p| {
                p.iter()
                    .enumerate()
                    .map(|(j, &pj)| (a[j] - b[pj]).powi(2))
                    .sum::<f64>()
                    / len as f64
            })
            .fold(f64::INFINITY, f64::min);
        tally.check(sorted <= best + 1e-12, || {
            format!("len={len}: {sorted} > {best}")
        });
    }
    Ok(tally.finish("hoffman", format!("{trials} matrix pairs")))
}

fn paley(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    for _ in 0..trials {
        let len = rng.random_range(2..=20);
        let z: Vec<f64> = (0..len)
            .map(|_| {
                if rng.random::<f64>() < 0.3 {
                    0.0
                } else {
                    rng.random::<f64>().powi(3) * 10.0
                }
            })
            .collect();
        let ez = z.iter().sum::<f64>() / len as f64;
        let ez2 = z.iter().map(|v| v * v).sum::<f64>() / len as f64;
        if ez2 == 0.0 {
            continue;
        }
        let theta = rng.random::<f64>();
        let exact = z.iter().filter(|&&v| v > theta * ez).count() as f64 / len as f64;
        let bound = paley_zygmund_bound(ez, ez2, theta)?;
        tally.check(exact >= bound - 1e-12, || {
            format!("theta={theta}: {exact} < {bound}")
        });
    }
    // Z = F^2 with F a pairwise eigenvalue difference of a diagonal Hamiltonian
    for _ in 0..trials.min(50) {
        let n = rng.random_range(1..=6);
        let k = rng.random_range(1..=n.min(3));
        let h = nonempty(|| random_z_diagonal(n, k, 2 * n, rng))?;
        let spec = walsh_eigenvalues(&h)?;
        let (m2, m4) = gap_moments(&spec)?;
        let v = spec.values();
        let theta = 0.5;
        let above = v
            .iter()
            .flat_map(|a| v.iter().map(move |b| (a - b).powi(2)))
            .filter(|&f2| f2 > theta * m2)
            .count() as f64
            / (v.len() * v.len()) as f64;
        let bound = paley_zygmund_bound(m2, m4, theta)?;
        tally.check(above >= bound - 1e-12, || format!("{above} < {bound}"));
    }
    Ok(tally.finish("paley", format!("{trials} distributions")))
}

fn random_spectrum(rng: &mut ChaCha8Rng) -> Result<Spectrum> {
    let len = rng.random_range(2..=16);
    let family = rng.random_range(0..3);
    let values: Vec<f64> = (0..len)
        .map(|_| match family {
            0 => rng.sample::<f64, _>(StandardNormal),
            1 => rng.random_range(-1.0..1.0),
            _ => [-1.0, 0.0, 0.0, 1.0, 3.0][rng.random_range(0..5)],
        })
        .collect();
    Spectrum::new(values)
}

fn droptime(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    let mut lowest = 1f64;
    let mut tested = Vec::new();
    while tested.len() < trials {
        let spec = random_spectrum(rng)?;
        let eps = rng.random_range(0.05..3.0);
        let d = lambda_stat(&spec, eps)?;
        if d == 0.0 {
            continue;
        }
        let cfg = GapStatConfig::new(eps, d, 0.1)?;
        let frac = good_time_fraction(&spec, &cfg, 4000);
        lowest = lowest.min(frac);
        tally.check(frac >= 1.0 / 3.0, || {
            format!("eps={eps} d={d}: measure {frac}")
        });
        tested.push((spec, cfg));
    }
    let reps = 100 * trials as u64;
    for (spec, cfg) in tested.iter().take(5) {
        let failures = (0..reps)
            .filter(|_| find_drop_time(spec, cfg, rng).is_none())
            .count() as f64;
        let rate = failures / reps as f64;
        let limit = cfg.delta + 3.0 * binomial_sigma(cfg.delta, reps);
        tally.check(rate <= limit, || {
            format!("finder failure rate {rate} > {limit}")
        });
    }
    Ok(tally.finish("droptime", format!("lowest good-time measure {lowest:.4}")))
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = points.iter().map(|(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn trotter(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    let t = 1.0;
    let mut slopes = Vec::new();
    for _ in 0..trials.clamp(1, 5) {
        let h = random_k_local(3, 2, 8, rng)?;
        let h0 = random_k_local(3, 2, 4, rng)?;
        let s = DiagonalSubspace::sample(3, rng)?;
        let schedule = TwirlSchedule::sample(s, 3, rng)?;
        let conj = unroll_twirl(&schedule)?;
        let mut points = Vec::new();
        for steps in [8u64, 16, 32, 64, 128] {
            let plan = TrotterPlan::from_conjugators(&conj, steps, t)?;
            let h_t = plan.effective_hamiltonian(&h.subtract(&h0)?)?;
            let mut oracle = EvolutionOracle::new(h.clone(), OracleMode::Trotterized)?;
            let v = trotter_evolve(&mut oracle, &h0, &plan)?;
            tally.check((oracle.ledger().total_time() - t).abs() <= 1e-12, || {
                format!("charge {} for t={t}", oracle.ledger().total_time())
            });
            let err = trotter_error(&v, &h_t, t)?;
            tally.check(err.bell_deviation <= err.op_norm_err + 1e-15, || {
                format!("{err:?}")
            });
            let a = identity_prob_trace(&evolve(&h_t, t)?)?;
            let b = identity_prob_trace(&v)?;
            let scale = a.sqrt() + b.sqrt();
            tally.check((a - b).abs() <= scale * err.bell_deviation + 1e-14, || {
                format!(
                    "identity shift {} vs deviation {}",
                    (a - b).abs(),
                    err.bell_deviation
                )
            });
            points.push((steps as f64, err.op_norm_err));
        }
        if points.iter().all(|p| p.1 > 1e-12) {
            let slope = fit_loglog(&points);
            slopes.push(slope);
            tally.check((-2.4..=-1.6).contains(&slope), || format!("slope {slope}"));
        }
    }
    Ok(tally.finish("trotter", format!("error slopes {slopes:.3?}")))
}

fn bonami(trials: usize, rng: &mut ChaCha8Rng) -> Result<SuiteOutcome> {
    let mut tally = Tally::default();
    for _ in 0..trials {
        let n = rng.random_range(1..=12);
        let k = rng.random_range(1..=n.min(3));
        let f = MultilinearFunction::random(n, k, rng)?;
        let (m2, m4) = function_moments(&f.values());
        let bound = 9f64.powi(k as i32) * m2 * m2;
        tally.check(m4 <= bound * (1.0 + 1e-12), || {
            format!("n={n} k={k}: {m4} > {bound}")
        });
    }
    Ok(tally.finish("bonami", format!("{trials} functions")))
}
