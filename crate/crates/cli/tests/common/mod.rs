#![allow(dead_code)]

use trunclsq_core::dense::{matmul_nt, DenseMatrix};
use trunclsq_core::sketch::{gaussian_matrix, RngSeed};

/// Rank-`k` `m x n` matrix `X Y^T` with Gaussian factors.
pub fn rank_k(m: usize, n: usize, k: usize, seed: u64) -> DenseMatrix {
    let x = gaussian_matrix(m, k, RngSeed::with_stream(seed, 1));
    let y = gaussian_matrix(n, k, RngSeed::with_stream(seed, 2));
    matmul_nt(&x, &y).unwrap()
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, descending.
pub fn symmetric_eigenvalues(m: &DenseMatrix) -> Vec<f64> {
    let n = m.rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i)).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off.sqrt() <= 1e-300 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (x, y) = (row[p], row[q]);
                    row[p] = c * x - s * y;
                    row[q] = s * x + c * y;
                }
                let (head, tail) = a.split_at_mut(q);
                for (x, y) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = c * u - s * v;
                    *y = s * u + c * v;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| y.total_cmp(x));
    eig
}
