//! Brute-force references for the sector network. Nothing here calls into
//! [`crate::sectornet`]; the tests compare the two paths.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

pub const MAX_ORACLE_SECTORS: usize = 8;
pub const MAX_ORACLE_CBGS: usize = 32;
pub const MAX_ORACLE_DIM: usize = 12;

/// Proximity by explicit set intersection over a `cbgs x sectors` table.
/// Returns the indices of sectors preferred by at least one CBG and the
/// proximity matrix over them.
pub fn oracle_proximity(preferred: &[Vec<bool>]) -> Result<(Vec<usize>, Vec<Vec<f64>>)> {
    let n_sectors = preferred.first().map_or(0, Vec::len);
    if preferred.len() > MAX_ORACLE_CBGS || n_sectors > MAX_ORACLE_SECTORS {
        return Err(Error::InvalidArgument(format!(
            "oracle limited to {MAX_ORACLE_CBGS} CBGs x {MAX_ORACLE_SECTORS} sectors"
        )));
    }
    let sets: Vec<BTreeSet<usize>> = (0..n_sectors)
        .map(|i| (0..preferred.len()).filter(|&m| preferred[m][i]).collect())
        .collect();
    let kept: Vec<usize> = (0..n_sectors).filter(|&i| !sets[i].is_empty()).collect();
    let matrix = kept
        .iter()
        .map(|&i| {
            kept.iter()
                .map(|&j| {
                    if i == j {
                        return 0.0;
                    }
                    let both = sets[i].intersection(&sets[j]).count();
                    // the larger conditional has the smaller denominator
                    let smaller = sets[i].len().min(sets[j].len());
                    both as f64 / smaller as f64
                })
                .collect()
        })
        .collect();
    Ok((kept, matrix))
}

/// Dominant unit eigenvector of a small symmetric matrix by cyclic Jacobi
/// rotations.
///
/// Ties for the largest eigenvalue go to the eigenvector Jacobi lists first,
/// which for a diagonal matrix is the basis vector of the lowest index. The
/// sign is fixed so the entries sum to a positive value. Every eigenpair is
/// checked against `A v = lambda v` before returning.
pub fn oracle_eigenvector(matrix: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = matrix.len();
    if n == 0 || n > MAX_ORACLE_DIM || matrix.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument(format!("oracle needs a square matrix of size 1..={MAX_ORACLE_DIM}")));
    }
    for i in 0..n {
        for j in 0..n {
            if matrix[i][j] != matrix[j][i] || matrix[i][j] < 0.0 {
                return Err(Error::InvalidArgument("oracle needs a symmetric nonnegative matrix".into()));
            }
        }
    }

    let mut a: Vec<Vec<f64>> = matrix.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    let scale: f64 = matrix.iter().flatten().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == 0.0 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
                for k in 0..n {
                    let (pk, qk) = (a[p][k], a[q][k]);
                    a[p][k] = c * pk - s * qk;
                    a[q][k] = s * pk + c * qk;
                }
                for row in v.iter_mut() {
                    let (kp, kq) = (row[p], row[q]);
                    row[p] = c * kp - s * kq;
                    row[q] = s * kp + c * kq;
                }
            }
        }
    }

    let eigen: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    for (k, &lambda) in eigen.iter().enumerate() {
        let residual: f64 = (0..n)
            .map(|i| {
                let av: f64 = (0..n).map(|j| matrix[i][j] * v[j][k]).sum();
                (av - lambda * v[i][k]).powi(2)
            })
            .sum::<f64>()
            .sqrt();
        if residual > 1e-9 * scale.max(1.0) {
            return Err(Error::NonConvergence { max_iter: 100, last_step: residual });
        }
    }
    let top = eigen.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let k = (0..n)
        .find(|&k| eigen[k] >= top - 1e-12 * top.abs().max(1.0))
        .expect("maximum is attained");
    let mut out: Vec<f64> = (0..n).map(|i| v[i][k]).collect();
    let norm = out.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sum: f64 = out.iter().sum();
    let flip = if sum.abs() > 1e-12 {
        sum < 0.0
    } else {
        out.iter().find(|x| x.abs() > 1e-12).is_some_and(|x| *x < 0.0)
    };
    let sign = if flip { -1.0 } else { 1.0 };
    out.iter_mut().for_each(|x| *x *= sign / norm);
    Ok(out)
}
