use num_complex::Complex64;
use proptest::prelude::*;
use qmaxent::densemath::{expm, hermitian_eig, kron, logm, matrix_func, partial_trace, HERMITIAN_TOL};
use qmaxent::{ComplexMatrix, Subsystem};

fn matrix(n: usize, m: usize, vals: &[f64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, m, |i, j| {
        let k = 2 * (i * m + j);
        Complex64::new(vals[k], vals[k + 1])
    })
}

fn hermitian(d: usize, vals: &[f64]) -> ComplexMatrix {
    matrix(d, d, vals).hermitian_part()
}

fn dim_and_entries(max_dim: usize, scale: f64) -> impl Strategy<Value = (usize, Vec<f64>)> {
    (1..=max_dim).prop_flat_map(move |d| (Just(d), prop::collection::vec(-scale..scale, 2 * d * d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigen_reconstruction((d, vals) in dim_and_entries(8, 3.0)) {
        let m = hermitian(d, &vals);
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        prop_assert!(eig.reconstruct().max_abs_diff(&m) <= 1e-10);
        let v = &eig.eigenvectors;
        let gram = v.adjoint().matmul(v).unwrap();
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(d)) <= 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn exp_then_log_is_identity((d, vals) in dim_and_entries(6, 1.0)) {
        // rescale so the spectrum lies in [-5, 5]
        let m = hermitian(d, &vals);
        let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
        let radius = eig.eigenvalues.iter().fold(0.0f64, |a, l| a.max(l.abs()));
        let m = if radius > 5.0 { m.scale_real(5.0 / radius) } else { m };
        let back = logm(&expm(&m).unwrap()).unwrap();
        prop_assert!(back.max_abs_diff(&m) <= 1e-8);
        let back = matrix_func(&matrix_func(&m, f64::exp).unwrap(), f64::ln).unwrap();
        prop_assert!(back.max_abs_diff(&m) <= 1e-8);
    }

    #[test]
    fn partial_trace_is_linear(
        da in 1usize..=3,
        db in 1usize..=3,
        alpha in -2.0f64..2.0,
        beta in -2.0f64..2.0,
        vals in prop::collection::vec(-1.0f64..1.0, 2 * 2 * 81),
    ) {
        let d = da * db;
        let m = matrix(d, d, &vals[..2 * d * d]);
        let n = matrix(d, d, &vals[2 * 81..2 * 81 + 2 * d * d]);
        let combo = &m.scale_real(alpha) + &n.scale_real(beta);
        for keep in [Subsystem::First, Subsystem::Second] {
            let lhs = partial_trace(&combo, (da, db), keep).unwrap();
            let rhs = &partial_trace(&m, (da, db), keep).unwrap().scale_real(alpha)
                + &partial_trace(&n, (da, db), keep).unwrap().scale_real(beta);
            prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
        }
    }

    #[test]
    fn kron_mixed_product(
        p in 2usize..=3,
        q in 2usize..=3,
        vals in prop::collection::vec(-1.0f64..1.0, 4 * 2 * 9),
    ) {
        let chunk = |k: usize, d: usize| matrix(d, d, &vals[k * 18..k * 18 + 2 * d * d]);
        let (a, c) = (chunk(0, p), chunk(1, p));
        let (b, dm) = (chunk(2, q), chunk(3, q));
        let lhs = kron(&a, &b).matmul(&kron(&c, &dm)).unwrap();
        let rhs = kron(&a.matmul(&c).unwrap(), &b.matmul(&dm).unwrap());
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }
}

#[test]
fn partial_trace_of_product_recovers_factors() {
    let a = ComplexMatrix::from_real_rows(&[&[0.25, 0.1], &[0.1, 0.75]]);
    let b = ComplexMatrix::from_real_diag(&[0.5, 0.3, 0.2]);
    let ab = kron(&a, &b);
    assert!(partial_trace(&ab, (2, 3), Subsystem::First).unwrap().max_abs_diff(&a) < 1e-15);
    assert!(partial_trace(&ab, (2, 3), Subsystem::Second).unwrap().max_abs_diff(&b) < 1e-15);
}

#[test]
fn degenerate_spectrum_has_orthonormal_vectors() {
    let m = ComplexMatrix::identity(5).scale_real(2.0);
    let eig = hermitian_eig(&m, HERMITIAN_TOL).unwrap();
    assert!(eig.eigenvalues.iter().all(|&l| (l - 2.0).abs() < 1e-15));
    let v = &eig.eigenvectors;
    assert!(v.adjoint().matmul(v).unwrap().max_abs_diff(&ComplexMatrix::identity(5)) < 1e-14);
}
