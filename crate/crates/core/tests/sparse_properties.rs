use csemb::sparse::{dilate, kernel_matrix, rescale_spectrum, DenseBlock, Graph, KernelKind, KernelSpec, SparseMatrix};
use csemb::synth::{erdos_renyi, gaussian_matrix, random_sparse_symmetric};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn eigenvalues(s: &SparseMatrix<f64>) -> Vec<f64> {
    let m = DMatrix::from_row_slice(s.n_rows(), s.n_cols(), &s.to_dense());
    let mut e: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    e.sort_by(f64::total_cmp);
    e
}

fn csr_is_valid(s: &SparseMatrix<f64>) -> bool {
    let offs = s.row_offsets();
    offs[0] == 0
        && offs[s.n_rows()] == s.nnz()
        && offs.windows(2).all(|w| w[0] <= w[1])
        && (0..s.n_rows()).all(|r| {
            let cols = &s.col_indices()[offs[r]..offs[r + 1]];
            cols.windows(2).all(|w| w[0] < w[1]) && cols.iter().all(|&c| c < s.n_cols())
        })
        && s.values().iter().all(|&v| v != 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triplet_construction_keeps_csr_invariants(
        entries in proptest::collection::vec((0usize..7, 0usize..5, -3i32..=3), 0..40)
    ) {
        let s = SparseMatrix::from_triplets(7, 5, entries.iter().map(|&(r, c, v)| (r, c, v as f64))).unwrap();
        prop_assert!(csr_is_valid(&s));
        let mut dense = vec![0.0; 35];
        for &(r, c, v) in &entries {
            dense[r * 5 + c] += v as f64;
        }
        prop_assert_eq!(s.to_dense(), dense);
    }

    #[test]
    fn spmv_is_linear(seed in any::<u64>(), alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
        let s = random_sparse_symmetric(40, 0.1, seed).unwrap();
        let x = gaussian_matrix(40, 3, seed ^ 1);
        let y = gaussian_matrix(40, 3, seed ^ 2);
        let combo = x.scaled(alpha).add(&y.scaled(beta)).unwrap();
        let lhs = s.spmv_multi(&combo).unwrap();
        let rhs = s.spmv_multi(&x).unwrap().scaled(alpha).add(&s.spmv_multi(&y).unwrap().scaled(beta)).unwrap();
        let err = lhs.sub(&rhs).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-12 * rhs.frobenius_norm().max(1.0));
    }

    #[test]
    fn dilation_is_symmetric_with_doubled_nnz(m in 1usize..9, n in 1usize..9, seed in any::<u64>()) {
        let dense = gaussian_matrix(m, n, seed);
        let a = SparseMatrix::from_dense(m, n, dense.values()).unwrap();
        let s = dilate(&a).unwrap();
        prop_assert!(s.is_symmetric());
        prop_assert!(csr_is_valid(&s));
        prop_assert_eq!(s.nnz(), 2 * a.nnz());
        // first n indices are the columns of A, the last m its rows
        for i in 0..m {
            for j in 0..n {
                prop_assert_eq!(s.get(n + i, j), dense.get(i, j));
            }
        }
    }

    #[test]
    fn normalized_adjacency_has_unit_spectral_radius(seed in any::<u64>(), p in 0.02f64..0.5) {
        let g = erdos_renyi(30, p, seed).unwrap();
        let s = g.normalized_adjacency::<f64>();
        prop_assert!(s.is_symmetric());
        let e = eigenvalues(&s);
        prop_assert!(e[0] >= -1.0 - 1e-9 && e[29] <= 1.0 + 1e-9);
    }

    #[test]
    fn kernels_are_symmetric_with_unit_diagonal(
        pts in proptest::collection::vec(proptest::collection::vec(-2.0f64..2.0, 2), 1..15),
        alpha in 0.1f64..2.0,
    ) {
        for kind in [KernelKind::Gaussian, KernelKind::Indicator] {
            let k = kernel_matrix(&pts, KernelSpec::new(kind, alpha).unwrap()).unwrap();
            prop_assert!(k.is_symmetric());
            for i in 0..pts.len() {
                prop_assert_eq!(k.get(i, i), 1.0);
            }
        }
    }

    #[test]
    fn rescaling_maps_eigenvalues_affinely(seed in any::<u64>(), lo in -3.0f64..-0.1, width in 0.5f64..6.0) {
        let s = random_sparse_symmetric(20, 0.3, seed).unwrap();
        let hi = lo + width;
        let (t, map) = rescale_spectrum(&s, lo, hi).unwrap();
        let before = eigenvalues(&s);
        let after = eigenvalues(&t);
        for (b, a) in before.iter().zip(&after) {
            prop_assert!((a - (2.0 * b - (hi + lo)) / (hi - lo)).abs() <= 1e-10);
            prop_assert!((map.apply(*a) - b).abs() <= 1e-10);
        }
        prop_assert!((map.apply(1.0) - hi).abs() <= 1e-12 && (map.apply(-1.0) - lo).abs() <= 1e-12);
    }
}

#[test]
fn dilation_spectrum_matches_singular_values() {
    let dense = gaussian_matrix(5, 3, 17);
    let a = SparseMatrix::from_dense(5, 3, dense.values()).unwrap();
    let got = eigenvalues(&dilate(&a).unwrap());
    let sv = DMatrix::from_row_slice(5, 3, dense.values()).singular_values();
    let mut want: Vec<f64> = sv.iter().flat_map(|&x| [x, -x]).chain([0.0, 0.0]).collect();
    want.sort_by(f64::total_cmp);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() <= 1e-10);
    }
}

#[test]
fn triangle_spectrum() {
    let g = Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
    let e = eigenvalues(&g.normalized_adjacency());
    for (got, want) in e.iter().zip([-0.5, -0.5, 1.0]) {
        assert!((got - want).abs() <= 1e-12);
    }
}

#[test]
fn zero_matrix_product_is_zero() {
    let s = SparseMatrix::<f64>::zeros(4, 3);
    let y = s.spmv_multi(&gaussian_matrix(3, 2, 1)).unwrap();
    assert_eq!(y, DenseBlock::zeros(4, 2));
}
