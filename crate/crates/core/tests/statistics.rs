mod common;

use common::{dense_kron, jacobi_hermitian, pauli_kron};
use hamcert::bell::{identity_prob_spectral, identity_prob_trace, ChoiBellSampler};
use hamcert::dense::{evolve, Spectrum};
use hamcert::gap::{find_drop_time, lambda_stat, GapStatConfig};
use hamcert::instances::{random_k_local, random_z_diagonal};
use hamcert::moments::{gap_moments, walsh_eigenvalues, MultilinearFunction};
use hamcert::pauli::{PauliString, PauliSum};
use hamcert::twirl::{effective_norm_moments_exact, DiagonalSubspace, TwirlSchedule};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn brute_lambda(v: &[f64], eps: f64) -> f64 {
    let hits = v
        .iter()
        .flat_map(|a| v.iter().map(move |b| (a - b).abs() >= eps))
        .filter(|&x| x)
        .count();
    hits as f64 / (v.len() * v.len()) as f64
}

proptest! {
    #[test]
    fn lambda_matches_brute_force(
        v in proptest::collection::vec(-3.0f64..3.0, 1..40),
        eps in 0.01f64..4.0,
    ) {
        let spec = Spectrum::new(v.clone()).unwrap();
        prop_assert_eq!(lambda_stat(&spec, eps).unwrap(), brute_lambda(&v, eps));
    }

    #[test]
    fn lambda_is_monotone_in_epsilon(
        v in proptest::collection::vec(-3.0f64..3.0, 1..40),
        e1 in 0.01f64..4.0,
        e2 in 0.01f64..4.0,
    ) {
        let spec = Spectrum::new(v).unwrap();
        let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
        prop_assert!(lambda_stat(&spec, lo).unwrap() >= lambda_stat(&spec, hi).unwrap());
    }

    #[test]
    fn identity_probability_is_a_probability(
        v in proptest::collection::vec(-5.0f64..5.0, 1..20),
        t in 0.0f64..50.0,
    ) {
        let p = identity_prob_spectral(&Spectrum::new(v).unwrap(), t);
        prop_assert!((0.0..=1.0).contains(&p));
    }
}

#[test]
fn spectral_and_trace_agree_with_reference_eigensolver() {
    let mut r = rng(1);
    for n in 1..=4 {
        let h = random_k_local(n, n.min(2), 2 * n, &mut r).unwrap();
        let spec = Spectrum::new(jacobi_hermitian(&dense_kron(&h))).unwrap();
        for t in [0.1, 3.0, 19.0] {
            let a = identity_prob_spectral(&spec, t);
            let b = identity_prob_trace(&evolve(&h, t).unwrap()).unwrap();
            assert!((a - b).abs() < 1e-10, "n={n} t={t}: {a} vs {b}");
        }
    }
}

#[test]
fn choi_probabilities_are_pauli_overlaps() {
    let mut r = rng(2);
    for n in 1..=3 {
        let h = random_k_local(n, n, 3 * n, &mut r).unwrap();
        let u = evolve(&h, 1.7).unwrap();
        let sampler = ChoiBellSampler::new(&u).unwrap();
        let total: f64 = sampler.probabilities().iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        for (bits, &p) in sampler.probabilities().iter().enumerate() {
            let label = sampler.outcome(bits as u64).pauli_label().to_string();
            let overlap = (pauli_kron(&label) * u.matrix()).trace().norm_sqr();
            let want = overlap / (u.dim() * u.dim()) as f64;
            assert!((p - want).abs() < 1e-12, "{label}");
        }
    }
}

#[test]
fn walsh_spectrum_matches_reference() {
    let mut r = rng(3);
    for n in 1..=6 {
        for k in 1..=n.min(3) {
            let h = random_z_diagonal(n, k, 2 * n, &mut r).unwrap();
            if h.is_empty() {
                continue;
            }
            let walsh = walsh_eigenvalues(&h).unwrap();
            let reference = jacobi_hermitian(&dense_kron(&h));
            for (a, b) in walsh.values().iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9);
            }
            let (m2, _) = gap_moments(&walsh).unwrap();
            assert!((m2 - 2.0 * h.frobenius_norm().powi(2)).abs() < 1e-9);
            let mean: f64 = walsh.values().iter().sum::<f64>() / walsh.len() as f64;
            assert!(mean.abs() < 1e-12);
        }
    }
}

#[test]
fn walsh_examples() {
    let h = PauliSum::from_labels(&[(1.0, "ZI")]).unwrap();
    assert_eq!(
        walsh_eigenvalues(&h).unwrap().values(),
        &[-1.0, -1.0, 1.0, 1.0]
    );
    let h = PauliSum::from_labels(&[(1.0, "ZZ"), (1.0, "ZI")]).unwrap();
    assert_eq!(
        walsh_eigenvalues(&h).unwrap().values(),
        &[-2.0, 0.0, 0.0, 2.0]
    );
    let spec = walsh_eigenvalues(&PauliSum::from_labels(&[(1.0, "Z")]).unwrap()).unwrap();
    assert_eq!(gap_moments(&spec).unwrap(), (2.0, 8.0));
}

#[test]
fn multilinear_values_match_direct_evaluation() {
    let mut r = rng(4);
    for n in 1..=7 {
        let f = MultilinearFunction::random(n, n.min(3), &mut r).unwrap();
        let values = f.values();
        for (s, v) in values.iter().enumerate() {
            let direct: f64 = f
                .coefficients()
                .iter()
                .map(|&(m, c)| {
                    let sign = if (s as u64 & m).count_ones().is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    sign * c
                })
                .sum();
            assert!((v - direct).abs() < 1e-12);
        }
    }
}

#[test]
fn subspace_axes_are_uniform() {
    let mut r = rng(5);
    let draws = 30_000;
    let mut counts = [0usize; 3];
    for _ in 0..draws {
        let s = DiagonalSubspace::sample(1, &mut r).unwrap();
        counts[s
            .axes()
            .to_string()
            .chars()
            .map(|c| "XYZ".find(c).unwrap())
            .next()
            .unwrap()] += 1;
    }
    let sigma = (draws as f64 * (1.0 / 3.0) * (2.0 / 3.0)).sqrt();
    for c in counts {
        assert!(
            (c as f64 - draws as f64 / 3.0).abs() <= 3.0 * sigma,
            "{counts:?}"
        );
    }
}

#[test]
fn effective_norm_mean_is_survival_weighted() {
    let mut r = rng(6);
    for _ in 0..5 {
        let h = random_k_local(3, 3, 8, &mut r).unwrap();
        let (mean, _) = effective_norm_moments_exact(&h).unwrap();
        let want: f64 = h
            .iter()
            .map(|(p, c)| c * c * 3f64.powi(-(p.weight() as i32)))
            .sum();
        assert!((mean - want).abs() < 1e-12);
    }
}

#[test]
fn twirl_keeps_subspace_terms_and_only_commuting_ones() {
    let mut r = rng(7);
    for _ in 0..50 {
        let h1 = random_k_local(3, 3, 10, &mut r).unwrap();
        let s = DiagonalSubspace::sample(3, &mut r).unwrap();
        let schedule = TwirlSchedule::sample(s.clone(), 4, &mut r).unwrap();
        let twirled = schedule.apply(&h1).unwrap();
        for (p, c) in twirled.iter() {
            assert_eq!(h1.coefficient(p), c);
            for q in schedule.paulis() {
                assert!(p.commutes(q).unwrap());
            }
        }
        let (eff, _) = s.project(&h1).unwrap();
        for (p, c) in eff.iter() {
            assert_eq!(twirled.coefficient(p), c);
        }
        let norms = schedule.norm_trajectory(&h1).unwrap();
        assert!(norms.windows(2).all(|w| w[1] <= w[0] + 1e-15));
    }
}

#[test]
fn twirl_matches_dense_average() {
    // one twirl step is (H + P H P) / 2
    let mut r = rng(8);
    let h1 = random_k_local(2, 2, 6, &mut r).unwrap();
    let s = DiagonalSubspace::sample(2, &mut r).unwrap();
    let p = s.random_element(&mut r);
    let schedule = TwirlSchedule::new(s, vec![p]).unwrap();
    let got = dense_kron(&schedule.apply(&h1).unwrap());
    let pm = pauli_kron(&p.to_string());
    let h = dense_kron(&h1);
    let want = (&h + &pm * &h * &pm) * common::c(0.5, 0.0);
    assert!((got - want).iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn digests_are_reproducible() {
    let s = DiagonalSubspace::new(
        &"XZ"
            .parse::<PauliString>()
            .unwrap()
            .letters()
            .collect::<Vec<_>>(),
    )
    .unwrap();
    let a = TwirlSchedule::sample(s.clone(), 5, &mut rng(9)).unwrap();
    let b = TwirlSchedule::sample(s, 5, &mut rng(9)).unwrap();
    assert_eq!(a.digest(), b.digest());
    assert_eq!(a.digest().len(), 16);
}

#[test]
fn drop_time_finder_returns_good_times() {
    let spec = Spectrum::new(vec![-0.5, 0.5]).unwrap();
    let cfg = GapStatConfig::new(0.5, 0.5, 0.1).unwrap();
    let mut r = rng(10);
    for _ in 0..200 {
        if let Some(drop) = find_drop_time(&spec, &cfg, &mut r) {
            assert!(drop.identity_prob <= cfg.drop_level());
            assert!((0.0..=cfg.window()).contains(&drop.t));
            assert!(drop.draws <= cfg.m_times);
        }
    }
}
