//! Statistical test kit used by the verification suite: Kolmogorov-Smirnov
//! tests, a quantile-binned independence test, exact binomial two-sided
//! p-values, and a finite-difference check that a map pushes one density
//! forward to another.

use crate::special::{beta_inc, gamma_q, kolmogorov_sf};

/// Outcome of a single statistical test.
#[derive(Clone, Debug)]
pub struct TestOutcome {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
///
/// The p-value uses the Stephens small-sample correction, accurate for
/// n as small as a few dozen.
pub fn ks_test<F: Fn(f64) -> f64>(data: &[f64], cdf: F) -> TestOutcome {
    let n = data.len();
    assert!(n > 0, "empty sample");
    let mut xs: Vec<f64> = data.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).expect("nan in sample"));
    let mut d = 0.0f64;
    for (i, x) in xs.iter().enumerate() {
        let f = cdf(*x);
        let hi = (i + 1) as f64 / n as f64 - f;
        let lo = f - i as f64 / n as f64;
        d = d.max(hi).max(lo);
    }
    let sn = (n as f64).sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    TestOutcome {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        n,
    }
}

/// Two-sample Kolmogorov-Smirnov test.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> TestOutcome {
    let (n, m) = (a.len(), b.len());
    assert!(n > 0 && m > 0, "empty sample");
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).expect("nan in sample"));
    ys.sort_by(|p, q| p.partial_cmp(q).expect("nan in sample"));
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < n && j < m {
        let (fx, fy) = (xs[i], ys[j]);
        if fx <= fy {
            i += 1;
        }
        if fy <= fx {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n as f64 * m as f64) / (n as f64 + m as f64);
    let sn = ne.sqrt();
    let lambda = (sn + 0.12 + 0.11 / sn) * d;
    TestOutcome {
        statistic: d,
        p_value: kolmogorov_sf(lambda),
        n: n + m,
    }
}

/// Independence test for paired samples: each margin is cut at its own
/// empirical quantiles into `bins` classes, and the contingency table is
/// tested with a chi-square statistic on (bins - 1)^2 degrees of freedom.
pub fn quantile_independence(xs: &[f64], ys: &[f64], bins: usize) -> TestOutcome {
    let n = xs.len();
    assert!(n == ys.len() && n > 0, "paired samples required");
    assert!(bins >= 2 && n >= 10 * bins * bins, "too few pairs for this bin count");
    let class = |data: &[f64]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| data[i].partial_cmp(&data[j]).expect("nan in sample"));
        let mut cls = vec![0usize; n];
        for (rank, &idx) in order.iter().enumerate() {
            cls[idx] = (rank * bins / n).min(bins - 1);
        }
        cls
    };
    let cx = class(xs);
    let cy = class(ys);
    let mut counts = vec![0usize; bins * bins];
    for k in 0..n {
        counts[cx[k] * bins + cy[k]] += 1;
    }
    // quantile binning makes all margins equal by construction
    let expected = n as f64 / (bins * bins) as f64;
    let chi2: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let df = ((bins - 1) * (bins - 1)) as f64;
    TestOutcome {
        statistic: chi2,
        p_value: gamma_q(df / 2.0, chi2 / 2.0),
        n,
    }
}

/// Exact two-sided binomial test of `k` successes in `n` trials against
/// success probability `p0`.
pub fn binomial_two_sided(k: usize, n: usize, p0: f64) -> f64 {
    assert!(k <= n && n > 0 && (0.0..=1.0).contains(&p0));
    // P(X <= k) and P(X >= k) via the regularized incomplete beta
    let p_le = if k == n {
        1.0
    } else {
        beta_inc((n - k) as f64, (k + 1) as f64, 1.0 - p0)
    };
    let p_ge = if k == 0 {
        1.0
    } else {
        beta_inc(k as f64, (n - k + 1) as f64, p0)
    };
    (2.0 * p_le.min(p_ge)).min(1.0)
}

/// Multiplicative defect of the change-of-variables identity for `map` at
/// the point `x`: how far `f_out(map(x)) |det J(x)|` is from `f_in(x)`,
/// as `|ratio - 1|`. Densities are given in log form; the Jacobian is a
/// central difference with step `h * (1 + |x_i|)` per coordinate.
pub fn pushforward_defect(
    map: &dyn Fn(&[f64]) -> Vec<f64>,
    ln_f_in: &dyn Fn(&[f64]) -> f64,
    ln_f_out: &dyn Fn(&[f64]) -> f64,
    x: &[f64],
    h: f64,
) -> f64 {
    let d = x.len();
    let y = map(x);
    assert_eq!(y.len(), d, "map must preserve dimension");
    let mut jac = vec![vec![0.0; d]; d];
    for j in 0..d {
        let step = h * (1.0 + x[j].abs());
        let mut up = x.to_vec();
        let mut dn = x.to_vec();
        up[j] += step;
        dn[j] -= step;
        let fu = map(&up);
        let fd = map(&dn);
        for i in 0..d {
            jac[i][j] = (fu[i] - fd[i]) / (2.0 * step);
        }
    }
    let ln_abs_det = ln_abs_det(&mut jac);
    let ln_ratio = ln_f_out(&y) + ln_abs_det - ln_f_in(x);
    (ln_ratio.exp() - 1.0).abs()
}

/// log |det| by Gaussian elimination with partial pivoting; consumes the
/// matrix. Returns -inf for a singular matrix.
fn ln_abs_det(m: &mut [Vec<f64>]) -> f64 {
    let d = m.len();
    let mut acc = 0.0f64;
    for col in 0..d {
        let (mut best, mut best_abs) = (col, m[col][col].abs());
        for row in col + 1..d {
            if m[row][col].abs() > best_abs {
                best = row;
                best_abs = m[row][col].abs();
            }
        }
        if best_abs == 0.0 {
            return f64::NEG_INFINITY;
        }
        m.swap(col, best);
        acc += m[col][col].abs().ln();
        for row in col + 1..d {
            let factor = m[row][col] / m[col][col];
            for k in col..d {
                m[row][k] -= factor * m[col][k];
            }
        }
    }
    acc
}
