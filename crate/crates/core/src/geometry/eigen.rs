//! Cyclic Jacobi eigen-decomposition for small symmetric matrices.

use crate::scalar::Real;

/// Eigenpairs of a symmetric matrix, sorted by descending eigenvalue.
/// `vectors[k]` is the unit eigenvector for `values[k]`.
pub(crate) struct SymmetricEigen<T, const N: usize> {
    pub values: [T; N],
    pub vectors: [[T; N]; N],
}

#[allow(clippy::needless_range_loop)]
pub(crate) fn symmetric_eigen<T: Real, const N: usize>(
    matrix: &[[T; N]; N],
) -> SymmetricEigen<T, N> {
    let mut a = *matrix;
    // v holds eigenvectors as columns.
    let mut v = [[T::zero(); N]; N];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = T::one();
    }

    let scale = a
        .iter()
        .flat_map(|row| row.iter())
        .fold(T::zero(), |acc, &x| acc + x * x)
        .sqrt();

    for _sweep in 0..64 {
        let off: T = (0..N)
            .flat_map(|p| ((p + 1)..N).map(move |q| (p, q)))
            .fold(T::zero(), |acc, (p, q)| acc + a[p][q] * a[p][q]);
        if off.sqrt() <= T::epsilon() * scale || off == T::zero() {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a[p][q];
                if apq == T::zero() {
                    continue;
                }
                let two = T::lit(2.0);
                let theta = (a[q][q] - a[p][p]) / (two * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..N {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..N {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: [usize; N] = [0; N];
    for (i, o) in order.iter_mut().enumerate() {
        *o = i;
    }
    order.sort_by(|&i, &j| {
        a[j][j]
            .partial_cmp(&a[i][i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    let mut values = [T::zero(); N];
    let mut vectors = [[T::zero(); N]; N];
    for (k, &col) in order.iter().enumerate() {
        values[k] = a[col][col];
        for r in 0..N {
            vectors[k][r] = v[r][col];
        }
    }
    SymmetricEigen { values, vectors }
}
