//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

/// `tau(n) * sum |m_i / T - 1/n|` evaluated directly in floating point.
pub fn segregation_oracle(counts: &[u64]) -> f64 {
    let n = counts.len() as f64;
    let total: f64 = counts.iter().map(|&c| c as f64).sum();
    let dev: f64 = counts.iter().map(|&c| (c as f64 / total - 1.0 / n).abs()).sum();
    n / (2.0 * (n - 1.0)) * dev
}

/// Least squares with intercept by solving the normal equations with
/// Gauss-Jordan elimination. Returns `[intercept, b_1, ..., b_k]`.
pub fn normal_equations(y: &[f64], columns: &[Vec<f64>]) -> Vec<f64> {
    let n = y.len();
    let p = columns.len() + 1;
    let x = |i: usize, j: usize| if j == 0 { 1.0 } else { columns[j - 1][i] };
    let mut a = vec![vec![0.0; p + 1]; p];
    for r in 0..p {
        for c in 0..p {
            a[r][c] = (0..n).map(|i| x(i, r) * x(i, c)).sum();
        }
        a[r][p] = (0..n).map(|i| x(i, r) * y[i]).sum();
    }
    for col in 0..p {
        let pivot = (col..p).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, pivot);
        let d = a[col][col];
        for v in a[col].iter_mut() {
            *v /= d;
        }
        for r in 0..p {
            if r != col {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (v, pv) in a[r].iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
    }
    a.iter().map(|row| row[p]).collect()
}

/// Two-sided Wilcoxon p-value by listing all `2^n` sign assignments of the
/// average ranks of the nonzero `|d|`.
pub fn wilcoxon_enumeration(diffs: &[f64]) -> (f64, f64) {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let n = d.len();
    let mut ranks = vec![0.0; n];
    for i in 0..n {
        let below = d.iter().filter(|x| x.abs() < d[i].abs()).count() as f64;
        let equal = d.iter().filter(|x| x.abs() == d[i].abs()).count() as f64;
        ranks[i] = below + (equal + 1.0) / 2.0;
    }
    let w: f64 = (0..n).filter(|&i| d[i] > 0.0).map(|i| ranks[i]).sum();
    let (mut lo, mut hi) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n).filter(|&i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if s <= w + 1e-9 {
            lo += 1;
        }
        if s >= w - 1e-9 {
            hi += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (w, (2.0 * lo.min(hi) as f64 / total).min(1.0))
}

/// Smallest circle through a pair (as diameter) or a triple containing every
/// point, by exhaustive search. Returns `(cx, cy, r)`.
pub fn brute_force_mec(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len();
    if n == 1 {
        return (points[0].0, points[0].1, 0.0);
    }
    let covers = |cx: f64, cy: f64, r: f64| {
        points
            .iter()
            .all(|&(x, y)| ((x - cx).powi(2) + (y - cy).powi(2)).sqrt() <= r * (1.0 + 1e-9) + 1e-12)
    };
    let mut best = (0.0, 0.0, f64::INFINITY);
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (points[i], points[j]);
            let c = ((a.0 + b.0) / 2.0, (a.1 + b.1) / 2.0);
            let r = ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt() / 2.0;
            if r < best.2 && covers(c.0, c.1, r) {
                best = (c.0, c.1, r);
            }
            for k in (j + 1)..n {
                let cc = points[k];
                let (bx, by) = (b.0 - a.0, b.1 - a.1);
                let (cx, cy) = (cc.0 - a.0, cc.1 - a.1);
                let d = 2.0 * (bx * cy - by * cx);
                if d.abs() < 1e-14 {
                    continue;
                }
                let ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d;
                let uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d;
                let r = (ux * ux + uy * uy).sqrt();
                if r < best.2 && covers(a.0 + ux, a.1 + uy, r) {
                    best = (a.0 + ux, a.1 + uy, r);
                }
            }
        }
    }
    best
}

/// Whether the graph of positive off-diagonal entries is connected.
pub fn connected(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for j in 0..n {
            if !seen[j] && i != j && m[i][j] > 0.0 {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.into_iter().all(|s| s)
}
