mod common;

use common::{rng, TOL};
use proptest::prelude::*;
use rand::Rng;
use retrodict::{hermitian_eig, is_psd, loewner_leq, random, Complex64, Matrix64};

#[test]
fn eigensystems_reconstruct_random_hermitian_matrices() {
    let mut r = rng(1);
    for trial in 0..1000 {
        let n = 2 + trial % 7;
        let m: Matrix64 = random::hermitian(n, &mut r);
        let e = hermitian_eig(&m).unwrap();
        let scale = m.op_norm().unwrap().max(1.0);
        assert!(
            e.reconstruct().max_abs_diff(&m).unwrap() <= 1e-10 * scale,
            "trial {trial}"
        );
        let v = &e.eigenvectors;
        let gram = &v.adjoint() * v;
        assert!(gram.max_abs_diff(&Matrix64::identity(n)).unwrap() <= 1e-10);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn degenerate_spectra_still_reconstruct() {
    let mut r = rng(2);
    for n in 2..8 {
        let u: Matrix64 = random::unitary(n, &mut r);
        let vals: Vec<f64> = (0..n).map(|k| (k / 2) as f64).collect();
        let m = &(&u * &Matrix64::diag(&vals)) * &u.adjoint();
        let e = hermitian_eig(&m).unwrap();
        assert!(e.reconstruct().max_abs_diff(&m).unwrap() < 1e-12);
        let mut sorted = vals.clone();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in e.eigenvalues.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn eigenvalues_match_two_by_two_closed_form() {
    let mut r = rng(3);
    for _ in 0..200 {
        let m: Matrix64 = random::hermitian(2, &mut r);
        let (a, d, b) = (m[(0, 0)].re, m[(1, 1)].re, m[(0, 1)]);
        let rad = (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt();
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - ((a + d) / 2.0 - rad)).abs() < 1e-12);
        assert!((e.eigenvalues[1] - ((a + d) / 2.0 + rad)).abs() < 1e-12);
    }
}

#[test]
fn loewner_order_is_transitive() {
    let mut r = rng(4);
    let mut chains = 0;
    for trial in 0..400 {
        let n = 2 + trial % 4;
        let a: Matrix64 = random::hermitian(n, &mut r);
        // Half the triples are built as chains, half are arbitrary.
        let (b, c) = if trial % 2 == 0 {
            let b = &a + &random::psd(n, &mut r);
            let c = &b + &random::psd(n, &mut r).scale_real(r.random::<f64>());
            (b, c)
        } else {
            (random::hermitian(n, &mut r), random::hermitian(n, &mut r))
        };
        if loewner_leq(&a, &b, TOL).unwrap() && loewner_leq(&b, &c, TOL).unwrap() {
            chains += 1;
            assert!(loewner_leq(&a, &c, 3.0 * TOL).unwrap());
        }
    }
    assert!(chains >= 200);
}

#[test]
fn wishart_matrices_are_psd() {
    let mut r = rng(5);
    for n in 1..8 {
        assert!(is_psd(&random::psd::<f64, _>(n, &mut r), TOL).unwrap());
    }
}

fn matrix_strategy(n: usize) -> impl Strategy<Value = Matrix64> {
    proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), n * n).prop_map(move |v| {
        Matrix64::from_row_major(
            n,
            v.into_iter()
                .map(|(re, im)| Complex64::new(re, im))
                .collect(),
        )
        .unwrap()
    })
}

fn pair_strategy() -> impl Strategy<Value = (Matrix64, Matrix64)> {
    (1usize..6).prop_flat_map(|n| (matrix_strategy(n), matrix_strategy(n)))
}

proptest! {
    #[test]
    fn trace_is_cyclic((a, b) in pair_strategy()) {
        let ab = (&a * &b).trace();
        let ba = (&b * &a).trace();
        let scale = a.frobenius_norm() * b.frobenius_norm() + 1.0;
        prop_assert!((ab - ba).norm() <= 1e-12 * scale);
    }

    #[test]
    fn hs_inner_is_normalized_trace_of_product((a, b) in pair_strategy()) {
        let lhs = a.hs_inner(&b).unwrap();
        let rhs = (&a.adjoint() * &b).normalized_trace();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn op_norm_bounds(a in (1usize..6).prop_flat_map(matrix_strategy)) {
        let norm = a.op_norm().unwrap();
        prop_assert!(norm <= a.frobenius_norm() * (1.0 + 1e-12));
        prop_assert!(norm >= a.max_abs() * (1.0 - 1e-12));
    }
}
