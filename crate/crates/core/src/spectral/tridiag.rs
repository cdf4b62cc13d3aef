//! Symmetric tridiagonal eigensolver: implicit-shift QL with Wilkinson
//! shifts, accumulating the rotations into the eigenvector matrix.

use nalgebra::DMatrix;

use crate::{Error, Result};

/// Sweep cap per eigenvalue.
pub const MAX_ITERATIONS: usize = 30;

/// Eigen-decomposition of the symmetric tridiagonal matrix with main
/// diagonal `diag` and off-diagonal `off` (`off[i]` couples `i` and `i + 1`).
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of the matrix.
pub fn symmetric_tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = diag.len();
    if n == 0 {
        return Err(Error::Domain("empty matrix".into()));
    }
    if off.len() + 1 != n {
        return Err(Error::Dimension {
            expected: n - 1,
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = DMatrix::<f64>::identity(n, n);

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == MAX_ITERATIONS {
                return Err(Error::NoConvergence {
                    index: l,
                    iterations: iter,
                    residual: e[l].abs(),
                });
            }
            iter += 1;

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;

            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for k in 0..n {
                    let zk1 = z[(k, i + 1)];
                    let zk = z[(k, i)];
                    z[(k, i + 1)] = s * zk + c * zk1;
                    z[(k, i)] = c * zk - s * zk1;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].total_cmp(&d[b]));
    let values = order.iter().map(|&k| d[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |row, col| z[(row, order[col])]);
    Ok((values, vectors))
}
