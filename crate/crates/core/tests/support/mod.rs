//! Reference implementations used only by tests.
//!
//! Each oracle is written independently of the library code it checks.

#![allow(dead_code)]

/// Column means and sample standard deviations (n - 1), constant columns get 1.
pub fn standardize(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mut out = rows.to_vec();
    for j in 0..d {
        let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        let var = rows.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        let sd = if var > 0.0 { var.sqrt() } else { 1.0 };
        for r in &mut out {
            r[j] = (r[j] - mean) / sd;
        }
    }
    out
}

/// Sample covariance by the textbook double loop.
pub fn covariance(rows: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let means: Vec<f64> = (0..d)
        .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / n as f64)
        .collect();
    let mut c = vec![vec![0.0; d]; d];
    for p in 0..d {
        for q in 0..d {
            c[p][q] = rows
                .iter()
                .map(|r| (r[p] - means[p]) * (r[q] - means[q]))
                .sum::<f64>()
                / (n - 1) as f64;
        }
    }
    c
}

/// Symmetric eigen-decomposition by Householder tridiagonalization followed
/// by implicit QL iterations.
///
/// Returns eigenvalues in descending order and the matching unit
/// eigenvectors (one `Vec` per eigenvector).
pub fn eigen_descending(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut v: Vec<Vec<f64>> = a.to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n];
    tred2(&mut v, &mut d, &mut e);
    tql2(&mut v, &mut d, &mut e);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| d[y].partial_cmp(&d[x]).unwrap());
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| (0..n).map(|r| v[r][i]).collect())
        .collect();
    (values, vectors)
}

fn tred2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for j in 0..n {
        d[j] = v[n - 1][j];
    }
    for i in (1..n).rev() {
        let mut scale = 0.0;
        let mut h = 0.0;
        for k in 0..i {
            scale += d[k].abs();
        }
        if scale == 0.0 {
            e[i] = d[i - 1];
            for j in 0..i {
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
                v[j][i] = 0.0;
            }
        } else {
            for k in 0..i {
                d[k] /= scale;
                h += d[k] * d[k];
            }
            let mut f = d[i - 1];
            let mut g = h.sqrt();
            if f > 0.0 {
                g = -g;
            }
            e[i] = scale * g;
            h -= f * g;
            d[i - 1] = f - g;
            for j in 0..i {
                e[j] = 0.0;
            }
            for j in 0..i {
                f = d[j];
                v[j][i] = f;
                g = e[j] + v[j][j] * f;
                for k in j + 1..i {
                    g += v[k][j] * d[k];
                    e[k] += v[k][j] * f;
                }
                e[j] = g;
            }
            f = 0.0;
            for j in 0..i {
                e[j] /= h;
                f += e[j] * d[j];
            }
            let hh = f / (h + h);
            for j in 0..i {
                e[j] -= hh * d[j];
            }
            for j in 0..i {
                f = d[j];
                g = e[j];
                for k in j..i {
                    v[k][j] -= f * e[k] + g * d[k];
                }
                d[j] = v[i - 1][j];
                v[i][j] = 0.0;
            }
        }
        d[i] = h;
    }
    for i in 0..n - 1 {
        v[n - 1][i] = v[i][i];
        v[i][i] = 1.0;
        let h = d[i + 1];
        if h != 0.0 {
            for k in 0..=i {
                d[k] = v[k][i + 1] / h;
            }
            for j in 0..=i {
                let mut g = 0.0;
                for k in 0..=i {
                    g += v[k][i + 1] * v[k][j];
                }
                for k in 0..=i {
                    v[k][j] -= g * d[k];
                }
            }
        }
        for k in 0..=i {
            v[k][i + 1] = 0.0;
        }
    }
    for j in 0..n {
        d[j] = v[n - 1][j];
        v[n - 1][j] = 0.0;
    }
    v[n - 1][n - 1] = 1.0;
    e[0] = 0.0;
}

fn tql2(v: &mut [Vec<f64>], d: &mut [f64], e: &mut [f64]) {
    let n = d.len();
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = 0.0;
    let mut f = 0.0;
    let mut tst1: f64 = 0.0;
    let eps = f64::EPSILON;
    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }
        if m > l {
            loop {
                let mut g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for i in l + 2..n {
                    d[i] -= h;
                }
                f += h;
                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        h = v[k][i + 1];
                        v[k][i + 1] = s * v[k][i] + c * h;
                        v[k][i] = c * v[k][i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;
                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }
}

/// Class frequencies among the `k` nearest training rows, found by sorting
/// every training row by (squared distance, index).
pub fn knn_scan(
    train: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    k: usize,
    query: &[f64],
) -> Vec<f64> {
    let mut all: Vec<(f64, usize)> = train
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut s = 0.0;
            for (a, b) in row.iter().zip(query) {
                s += (a - b) * (a - b);
            }
            (s, i)
        })
        .collect();
    all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
    let mut counts = vec![0usize; n_classes];
    for &(_, i) in &all[..k] {
        counts[labels[i]] += 1;
    }
    counts.iter().map(|&c| c as f64 / k as f64).collect()
}

/// True if some depth-2 tree of axis-aligned `x[col] <= t` splits labels
/// every point correctly. Thresholds are tried at every midpoint.
pub fn depth2_tree_separates(points: &[[f64; 2]], labels: &[usize]) -> bool {
    let thresholds = |col: usize| -> Vec<f64> {
        let mut v: Vec<f64> = points.iter().map(|p| p[col]).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup();
        v.windows(2).map(|w| (w[0] + w[1]) / 2.0).collect()
    };
    let pure = |idx: &[usize]| idx.windows(2).all(|w| labels[w[0]] == labels[w[1]]);
    let separable_in_one = |idx: &[usize]| {
        if pure(idx) {
            return true;
        }
        (0..2).any(|c| {
            thresholds(c).into_iter().any(|t| {
                let (l, r): (Vec<usize>, Vec<usize>) = idx.iter().partition(|&&i| points[i][c] <= t);
                pure(&l) && pure(&r)
            })
        })
    };
    let all: Vec<usize> = (0..points.len()).collect();
    (0..2).any(|c| {
        thresholds(c).into_iter().any(|t| {
            let (l, r): (Vec<usize>, Vec<usize>) = all.iter().partition(|&&i| points[i][c] <= t);
            separable_in_one(&l) && separable_in_one(&r)
        })
    })
}
