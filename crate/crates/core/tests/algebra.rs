mod common;

use common::{c, dense_kron, expm_taylor, jacobi_hermitian, pauli_kron, CMat};
use hamcert::dense::{eigenvalues, evolve, hoffman_wielandt_gap, pauli_matrix, to_dense};
use hamcert::error::Error;
use hamcert::pauli::{PauliString, PauliSum};
use proptest::prelude::*;

fn label(n: usize) -> impl Strategy<Value = String> {
    proptest::collection::vec(prop_oneof![Just('I'), Just('X'), Just('Y'), Just('Z')], n)
        .prop_map(|v| v.into_iter().collect())
}

fn pair(max_n: usize) -> impl Strategy<Value = (String, String)> {
    (1..=max_n).prop_flat_map(|n| (label(n), label(n)))
}

fn to_cmat(m: &hamcert::dense::DenseOperator) -> CMat {
    m.matrix().clone()
}

fn max_diff(a: &CMat, b: &CMat) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn pauli_matrix_matches_kronecker(l in (1usize..=5).prop_flat_map(label)) {
        let p: PauliString = l.parse().unwrap();
        prop_assert!(max_diff(&to_cmat(&pauli_matrix(&p).unwrap()), &pauli_kron(&l)) < 1e-15);
    }

    #[test]
    fn commutation_matches_dense_commutator((a, b) in pair(5)) {
        let pa: PauliString = a.parse().unwrap();
        let pb: PauliString = b.parse().unwrap();
        let (ma, mb) = (pauli_kron(&a), pauli_kron(&b));
        let comm = &ma * &mb - &mb * &ma;
        let zero = comm.iter().all(|z| z.norm() < 1e-12);
        prop_assert_eq!(pa.commutes(&pb).unwrap(), zero);
        prop_assert_eq!(pb.commutes(&pa).unwrap(), zero);
    }

    #[test]
    fn phase_free_product_matches_dense_up_to_phase((a, b) in pair(4)) {
        let pa: PauliString = a.parse().unwrap();
        let pb: PauliString = b.parse().unwrap();
        let prod = pa.mul_phase_free(&pb).unwrap();
        let dense = pauli_kron(&a) * pauli_kron(&b);
        let want = pauli_kron(&prod.to_string());
        // dense = phase * want with |phase| = 1
        let phase = (want.adjoint() * &dense).trace() / c(want.nrows() as f64, 0.0);
        prop_assert!((phase.norm() - 1.0).abs() < 1e-12);
        prop_assert!(max_diff(&dense, &(want * phase)) < 1e-12);
    }

    #[test]
    fn conjugation_matches_dense(
        (n, labels, coeffs, q) in (1usize..=4).prop_flat_map(|n| (
            Just(n),
            proptest::collection::vec(label(n), 1..6),
            proptest::collection::vec(-2.0f64..2.0, 6),
            label(n),
        ))
    ) {
        let mut h = PauliSum::new(n).unwrap();
        for (l, c) in labels.iter().zip(&coeffs) {
            let p: PauliString = l.parse().unwrap();
            if !p.is_identity() {
                h.add_term(p, *c).unwrap();
            }
        }
        let qp: PauliString = q.parse().unwrap();
        let got = dense_kron(&h.conjugate(&qp).unwrap());
        let qm = pauli_kron(&q);
        let want = &qm * dense_kron(&h) * &qm;
        prop_assert!(max_diff(&got, &want) < 1e-12);
    }

    #[test]
    fn text_round_trip(
        (n, labels, coeffs) in (1usize..=6).prop_flat_map(|n| (
            Just(n),
            proptest::collection::vec(label(n), 1..8),
            proptest::collection::vec(-5.0f64..5.0, 8),
        ))
    ) {
        let mut h = PauliSum::new(n).unwrap();
        for (l, c) in labels.iter().zip(&coeffs) {
            let p: PauliString = l.parse().unwrap();
            if !p.is_identity() {
                h.add_term(p, *c).unwrap();
            }
        }
        if !h.is_empty() {
            let back = PauliSum::parse_text(&h.to_text()).unwrap();
            prop_assert_eq!(back, h);
        }
    }
}

#[test]
fn dense_builder_matches_kronecker_sums() {
    let h = PauliSum::from_labels(&[(0.7, "XYZ"), (-0.2, "IZI"), (1.1, "YYI")]).unwrap();
    assert!(max_diff(&to_cmat(&to_dense(&h).unwrap()), &dense_kron(&h)) < 1e-14);
}

#[test]
fn eigenvalues_match_jacobi() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(101);
    for n in 1..=4 {
        for _ in 0..10 {
            let h = hamcert::instances::random_k_local(n, n, 3 * n, &mut rng).unwrap();
            if h.is_empty() {
                continue;
            }
            let lib = eigenvalues(&to_dense(&h).unwrap()).unwrap();
            let reference = jacobi_hermitian(&dense_kron(&h));
            for (a, b) in lib.values().iter().zip(&reference) {
                assert!((a - b).abs() < 1e-9, "{a} vs {b}");
            }
        }
    }
}

#[test]
fn evolution_matches_taylor_series() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(202);
    for n in 1..=3 {
        let h = hamcert::instances::random_k_local(n, n, 2 * n, &mut rng).unwrap();
        for t in [0.0, 0.3, 2.0, 11.0] {
            let lib = to_cmat(&evolve(&h, t).unwrap());
            let want = expm_taylor(&dense_kron(&h), t);
            assert!(max_diff(&lib, &want) < 1e-9, "n={n} t={t}");
        }
    }
}

#[test]
fn evolution_identities() {
    let empty = PauliSum::new(3).unwrap();
    assert_eq!(evolve(&empty, 4.0).unwrap().matrix(), &CMat::identity(8, 8));
    let h = PauliSum::from_labels(&[(0.4, "XZ")]).unwrap();
    assert_eq!(evolve(&h, 0.0).unwrap().matrix(), &CMat::identity(4, 4));
}

#[test]
fn hoffman_wielandt_is_best_matching() {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(303);
    for dim in [2, 4] {
        for _ in 0..20 {
            let a = hamcert::instances::random_hermitian(dim, 1.0, &mut rng);
            let b = hamcert::instances::random_hermitian(dim, 0.5, &mut rng);
            let lib = hoffman_wielandt_gap(&a, &b).unwrap();
            let ea = jacobi_hermitian(&to_cmat(&a));
            let eb = jacobi_hermitian(&to_cmat(&b));
            let best = common::best_matching(&ea, &eb);
            assert!((lib - best).abs() < 1e-9);
            let frob = a.try_sub(&b).unwrap().normalized_frobenius().powi(2);
            assert!(lib <= frob + 1e-12);
        }
    }
}

#[test]
fn dense_cap_enforced() {
    let h: PauliSum = PauliSum::from_labels(&[(1.0, "ZIIIIIIIIII")]).unwrap();
    assert!(matches!(to_dense(&h), Err(Error::DenseCapExceeded { .. })));
}

#[test]
fn parse_errors_carry_line_numbers() {
    let err = PauliSum::parse_text("0.5 XZ\n# note\nabc YY\n").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 3, .. }), "{err:?}");
    assert!(PauliSum::parse_text("0.5 XZ\n0.1 XYZ\n").is_err());
    assert!(PauliSum::parse_text("1.0 II\n").is_err());
    assert!(PauliSum::parse_text("nan X\n").is_err());
}
