//! Dense matrix helpers: exact rational elimination and a float Jacobi
//! eigensolver for the metric layer.

use num_traits::{One, Zero};

use crate::ratmath::{to_f64, Rational};

pub type RatMatrix = Vec<Vec<Rational>>;

/// Reduced row echelon form in place. Returns the pivot columns.
///
/// Pivots are taken at the lowest available column index; each pivot row is
/// scaled to a leading 1 and the column is cleared above and below, so the
/// result is the unique RREF of the row space.
pub fn rref(rows: &mut RatMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut next = 0;
    for col in 0..ncols {
        if next == rows.len() {
            break;
        }
        let Some(found) = (next..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(next, found);
        let lead = rows[next][col].clone();
        if !lead.is_one() {
            for x in rows[next].iter_mut() {
                *x /= &lead;
            }
        }
        let pivot_row = rows[next].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == next || row[col].is_zero() {
                continue;
            }
            let factor = row[col].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x -= &factor * p;
                }
            }
        }
        pivots.push(col);
        next += 1;
    }
    rows.truncate(next);
    pivots
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut work = rows.to_vec();
    rref(&mut work, ncols).len()
}

/// Basis of `{x : rows * x = 0}`, one vector per free column.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> RatMatrix {
    let mut work = rows.to_vec();
    let pivots = rref(&mut work, ncols);
    let mut is_pivot = vec![false; ncols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|&c| !is_pivot[c]) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &p) in work.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        basis.push(v);
    }
    basis
}

pub fn transpose(m: &[Vec<Rational>], ncols: usize) -> RatMatrix {
    (0..ncols).map(|c| m.iter().map(|row| row[c].clone()).collect()).collect()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> RatMatrix {
    let inner = b.len();
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|c| {
                    let mut acc = Rational::zero();
                    for i in 0..inner {
                        if !row[i].is_zero() && !b[i][c].is_zero() {
                            acc += &row[i] * &b[i][c];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn identity(n: usize) -> RatMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect()
}

pub fn mat_sub(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> RatMatrix {
    a.iter().zip(b).map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect()).collect()
}

/// Inverse of a nonsingular square matrix by Gauss-Jordan on `[A | I]`.
pub fn inverse(a: &[Vec<Rational>]) -> Option<RatMatrix> {
    let n = a.len();
    let mut aug: RatMatrix = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return None;
    }
    Some(aug.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn to_float(m: &[Vec<Rational>]) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(to_f64).collect()).collect()
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the matching eigenvectors (as rows). Sweeps stop
/// once the off-diagonal Frobenius norm drops below `tol` times the norm of
/// the matrix.
pub fn symmetric_eigen(mut a: Vec<Vec<f64>>, tol: f64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    let scale = a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum::<f64>()
            .sqrt();
        if off <= tol * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let values = (0..n).map(|i| a[i][i]).collect();
    let vectors = (0..n).map(|j| (0..n).map(|i| v[i][j]).collect()).collect();
    (values, vectors)
}

/// Largest singular value of `m` from the exact Gram matrix `m^T m`.
pub fn operator_norm(m: &[Vec<Rational>], ncols: usize) -> f64 {
    let gram = mat_mul(&transpose(m, ncols), m);
    let (values, _) = symmetric_eigen(to_float(&gram), 1e-12);
    values.into_iter().fold(0.0f64, f64::max).max(0.0).sqrt()
}
