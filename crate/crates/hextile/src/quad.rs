//! Small numerical toolkit: adaptive quadrature, monotone cubic
//! interpolation, and stretched grids for table-driven samplers.

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// A subinterval is accepted when its Richardson defect drops below
/// `15 * tol`, and the local correction then leaves an error well under
/// `tol` per leaf. The tolerance is deliberately not subdivided with the
/// interval: halving it per split makes the criterion unreachable on
/// integrands whose evaluation noise exceeds machine rounding (for example
/// near a support edge computed by cancellation), which otherwise stalls
/// the recursion at the depth cap. A node budget bounds the work on such
/// integrands regardless.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(a, b, fa, fm, fb);
    let mut budget: u32 = 200_000;
    adaptive(f, a, b, fa, fm, fb, whole, tol, 48, &mut budget)
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    budget: &mut u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    *budget = budget.saturating_sub(1);
    if depth == 0 || *budget == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        adaptive(f, a, m, fa, flm, fm, left, tol, depth - 1, budget)
            + adaptive(f, m, b, fm, frm, fb, right, tol, depth - 1, budget)
    }
}

/// Monotone piecewise-cubic interpolant (Fritsch-Carlson slopes).
///
/// Built from strictly increasing `x`; if `y` is monotone the interpolant is
/// monotone too, which makes it safe for CDF and quantile tables.
pub struct MonotoneCubic {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        let n = x.len();
        assert!(n >= 2 && y.len() == n, "need at least two nodes");
        for w in x.windows(2) {
            assert!(w[1] > w[0], "nodes must be strictly increasing");
        }
        let mut d = vec![0.0; n - 1]; // secant slopes
        for i in 0..n - 1 {
            d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        }
        let mut slope = vec![0.0; n];
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for i in 1..n - 1 {
            if d[i - 1] * d[i] <= 0.0 {
                slope[i] = 0.0;
            } else {
                // harmonic mean weighted by interval widths
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                slope[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // limit endpoint slopes to preserve monotonicity
        for (i, s) in [(0usize, 0usize), (n - 1, n - 2)] {
            if slope[i] * d[s] <= 0.0 {
                slope[i] = 0.0;
            } else if slope[i].abs() > 3.0 * d[s].abs() {
                slope[i] = 3.0 * d[s];
            }
        }
        Self { x, y, slope }
    }

    fn segment(&self, t: f64) -> usize {
        match self
            .x
            .binary_search_by(|v| v.partial_cmp(&t).expect("nan node"))
        {
            Ok(i) => i.min(self.x.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.x.len() - 2),
        }
    }

    /// Hermite evaluation; clamps to the table range.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let i = self.segment(t);
        let h = self.x[i + 1] - self.x[i];
        let s = (t - self.x[i]) / h;
        let h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
        let h10 = s * (1.0 - s) * (1.0 - s);
        let h01 = s * s * (3.0 - 2.0 * s);
        let h11 = s * s * (s - 1.0);
        h00 * self.y[i] + h10 * h * self.slope[i] + h01 * self.y[i + 1] + h11 * h * self.slope[i + 1]
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().expect("nonempty"))
    }
}

/// Grid on `[a, b]` with nodes crowded toward both endpoints.
///
/// Images of equispaced points under a tanh stretch; `strength` around 2-3
/// gives a gentle crowding, larger values push harder into the corners.
pub fn tanh_grid(a: f64, b: f64, n: usize, strength: f64) -> Vec<f64> {
    assert!(n >= 2 && b > a);
    let s = strength.max(1e-6);
    let norm = (s / 2.0).tanh();
    (0..n)
        .map(|i| {
            let u = i as f64 / (n - 1) as f64; // 0..1
            let t = 0.5 * (1.0 + (s * (u - 0.5)).tanh() / norm);
            a + (b - a) * t
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_polynomial_and_transcendental() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let exact = 0.25f64 * 16.0 - 16.0 / 4.0; // on [0,2]: 4 - 4 + 2 = 2
        let _ = exact;
        assert!((integrate(&f, 0.0, 2.0, 1e-12) - 2.0).abs() < 1e-10);
        let g = |x: f64| x.sin();
        assert!((integrate(&g, 0.0, std::f64::consts::PI, 1e-12) - 2.0).abs() < 1e-10);
        let h = |x: f64| (-x).exp();
        assert!((integrate(&h, 0.0, 40.0, 1e-13) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn monotone_cubic_hits_nodes_and_stays_monotone() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.3).collect();
        let y: Vec<f64> = x.iter().map(|&t| 1.0 - (-t).exp()).collect();
        let interp = MonotoneCubic::new(x.clone(), y.clone());
        for (xi, yi) in x.iter().zip(&y) {
            assert!((interp.eval(*xi) - yi).abs() < 1e-14);
        }
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=1000 {
            let t = 5.7 * i as f64 / 1000.0;
            let v = interp.eval(t);
            assert!(v >= prev - 1e-12, "interpolant lost monotonicity");
            prev = v;
        }
        // accuracy on a coarse grid is limited by the endpoint slopes
        for i in 0..=100 {
            let t = 5.4 * i as f64 / 100.0 + 0.05;
            assert!((interp.eval(t) - (1.0 - (-t).exp())).abs() < 8e-3);
        }
    }

    #[test]
    fn tanh_grid_shape() {
        let g = tanh_grid(0.0, 1.0, 101, 4.0);
        assert_eq!(g.len(), 101);
        assert!((g[0]).abs() < 1e-15 && (g[100] - 1.0).abs() < 1e-15);
        // crowding: the first gap is much smaller than the middle gap
        let first = g[1] - g[0];
        let mid = g[51] - g[50];
        assert!(first < 0.4 * mid);
        for w in g.windows(2) {
            assert!(w[1] > w[0]);
        }
    }
}
