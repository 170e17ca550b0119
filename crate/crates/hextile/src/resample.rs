//! Heat-bath resampling of a boundary layer's cross-edges at fixed
//! boundary subdivision.
//!
//! A boundary layer carries hexagons `(x[i], y[i], x[i+1])` with deep
//! edges `z[i]` determined by completion. Holding the boundary sides `y`
//! fixed (they are shared with already-placed tiles), the interior
//! cross-edges are Markov: each `x[i]` has an explicit one-dimensional
//! conditional density given its flanking data, and sweeping sites in
//! checkerboard order is a Gibbs sampler whose invariant law is exactly
//! the conditional law of a fresh layer given `y`.

use crate::hextree::BoundaryLayer;
use crate::measures::EdgeLaw;
use crate::polygons::{complete_consecutive, PolyError};

#[derive(Debug, thiserror::Error)]
pub enum ResampleError {
    #[error("flank (x={x_side:.6}, y={y_side:.6}) admits no completion for any cross-edge")]
    EmptySupport { x_side: f64, y_side: f64 },
    #[error("cross-edge {x:.6} is below the support threshold {x_min:.6}")]
    OutOfSupport { x: f64, x_min: f64 },
    #[error("window of {0} hexagons is too short to sweep (need at least 5)")]
    Window(usize),
    #[error("inconsistent layer data: {0}")]
    BadLayer(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Flanking data of one interior cross-edge: everything the two hexagons
/// sharing it pin down, except the edge itself and the two deep edges it
/// determines.
#[derive(Clone, Copy, Debug)]
pub struct Flank {
    pub x_left: f64,
    pub y_left: f64,
    pub y_right: f64,
    pub x_right: f64,
}

/// Least cross-edge admitting a completion against one flanking pair:
/// the completion condition `sinh(xs) cosh(ys) sinh(x) - cosh(xs) cosh(x)
/// > 1` is a shifted sinh in `x`, positive past a single threshold.
///
/// The gap `sinh(xs) cosh(ys) - cosh(xs)` is regrouped as
/// `2 sinh(xs) sinh^2(ys/2) - exp(-xs)` so that a near-zero `ys` keeps its
/// full relative precision instead of vanishing into the rounding of
/// `cosh(ys)`; this matches the grouping the completion itself uses, so a
/// point above this threshold really does complete.
pub(crate) fn side_min(x_side: f64, y_side: f64) -> Result<f64, ResampleError> {
    let sh = (0.5 * y_side).sinh();
    let gap = 2.0 * x_side.sinh() * sh * sh - (-x_side).exp();
    if !(gap > 0.0) {
        return Err(ResampleError::EmptySupport { x_side, y_side });
    }
    let sum = x_side.sinh() * y_side.cosh() + x_side.cosh();
    let s = (gap * sum).sqrt();
    Ok(0.5 * (sum.ln() - gap.ln()) + (1.0 / s).asinh())
}

impl Flank {
    pub fn around(layer: &BoundaryLayer, i: usize) -> Flank {
        Flank {
            x_left: layer.x[i - 1],
            y_left: layer.y[i - 1],
            y_right: layer.y[i],
            x_right: layer.x[i + 1],
        }
    }

    /// Infimum of the support of the conditional law (the support is the
    /// half-line above it, further truncated by the edge law's own
    /// support).
    pub fn support_min(&self) -> Result<f64, ResampleError> {
        let l = side_min(self.x_left, self.y_left)?;
        let r = side_min(self.x_right, self.y_right)?;
        Ok(l.max(r))
    }

    /// Support infimum together with a guard offset: draws at least this
    /// far above the infimum are provably on the completing side of the
    /// threshold despite rounding. The completion argument's terms are
    /// O(cosh(x_side - x)) near the binding side's threshold and its slope
    /// there is at least one, so a cushion of ~1e3 ulps of that scale
    /// covers both the threshold's own rounding and the completion's.
    pub(crate) fn support_min_with_guard(&self) -> Result<(f64, f64), ResampleError> {
        let l = side_min(self.x_left, self.y_left)?;
        let r = side_min(self.x_right, self.y_right)?;
        let (x_min, x_bind) = if l >= r {
            (l, self.x_left)
        } else {
            (r, self.x_right)
        };
        let guard = (1e-12 * (1.0 + (x_bind - x_min).cosh())).min(1e-3);
        Ok((x_min, guard))
    }
}

/// Unnormalized log density of an interior cross-edge given its flanks:
/// the edge's own law, the laws of the two deep edges it determines, and
/// the Jacobian of the completion map on each side.
pub fn cond_logpdf(x: f64, flank: &Flank, law: &EdgeLaw) -> Result<f64, ResampleError> {
    let x_min = flank.support_min()?;
    if !(x > x_min) {
        return Err(ResampleError::OutOfSupport { x, x_min });
    }
    let left = complete_consecutive(flank.x_left, flank.y_left, x)?;
    let right = complete_consecutive(x, flank.y_right, flank.x_right)?;
    Ok(law.ln_pdf(x)
        + law.ln_pdf(left.opposite)
        + left.dopp_dmid.ln()
        + law.ln_pdf(right.opposite)
        + right.dopp_dmid.ln())
}

/// Grid resolution for the tabulated conditional density.
#[derive(Clone, Copy, Debug)]
pub struct GridProfile {
    /// Nodes in the refined inverse-CDF table.
    pub nodes: usize,
    /// Nodes in the coarse mass-location pass.
    pub coarse: usize,
    /// Log-density drop below the peak at which the upper tail is cut.
    pub tail_drop: f64,
}

impl Default for GridProfile {
    fn default() -> GridProfile {
        GridProfile {
            nodes: 4096,
            coarse: 256,
            tail_drop: 40.0,
        }
    }
}

impl GridProfile {
    /// Cheaper table for high-volume interior use; the distributional
    /// error stays far below the statistical tolerances it is paired with.
    pub const FAST: GridProfile = GridProfile {
        nodes: 256,
        coarse: 64,
        tail_drop: 30.0,
    };
}

/// Tabulated conditional density of one cross-edge, in the cube-root
/// coordinate `w = (x - x_min)^(1/3)` that absorbs the integrable
/// boundary singularity (deep edge near zero: its law contributes
/// z^(-1/3) and the completion Jacobian z^(-1), with z^2 ~ x - x_min).
pub struct ConditionalDensity1D {
    x_min: f64,
    x_cap: f64,
    /// Least offset above `x_min` a draw may take: just above the support
    /// threshold the completion's existence test runs on a cancellation
    /// with absolute noise ~ eps * cosh(x_side) * cosh(x), so raw draws in
    /// that sliver would build layers the completion later rejects. The
    /// slope of the completion argument at the threshold is at least one,
    /// so a floor a few hundred ulps above the noise scale is safe, and
    /// it displaces a vanishing fraction of the mass by a vanishing
    /// amount.
    guard: f64,
    w: Vec<f64>,
    cdf: Vec<f64>,
}

impl ConditionalDensity1D {
    pub fn build(
        flank: &Flank,
        law: &EdgeLaw,
        profile: &GridProfile,
    ) -> Result<ConditionalDensity1D, ResampleError> {
        let (x_min, guard) = flank.support_min_with_guard()?;
        let x_cap = law.support().1;
        let logpdf = |x: f64| cond_logpdf(x, flank, law);
        ConditionalDensity1D::build_with(x_min, x_cap, logpdf, profile, guard)
    }

    /// Core builder over an arbitrary log density on `(x_min, x_cap)`.
    pub(crate) fn build_with<F: Fn(f64) -> Result<f64, ResampleError>>(
        x_min: f64,
        x_cap: f64,
        logpdf: F,
        profile: &GridProfile,
        guard: f64,
    ) -> Result<ConditionalDensity1D, ResampleError> {
        let width_cap = x_cap - x_min;
        if width_cap < 1e-6 {
            // degenerate sliver; quantile collapses to the midpoint
            return Ok(ConditionalDensity1D {
                x_min,
                x_cap,
                guard,
                w: Vec::new(),
                cdf: Vec::new(),
            });
        }
        let lp = |x: f64| logpdf(x).unwrap_or(f64::NEG_INFINITY);
        // locate the peak with geometric probes from the support edge
        let mut logmax = f64::NEG_INFINITY;
        let mut at = 0.0f64;
        let mut step = 1e-9;
        while step < width_cap.min(600.0) {
            let v = lp(x_min + step);
            if v > logmax {
                logmax = v;
                at = step;
            }
            step *= 2.0;
        }
        if !logmax.is_finite() {
            return Err(ResampleError::BadLayer(
                "conditional density has no mass on its support".into(),
            ));
        }
        // extend past the peak until the tail is dead
        let mut hi = (2.0 * at).max(1e-3);
        while hi < width_cap.min(650.0) && lp(x_min + hi) > logmax - profile.tail_drop {
            hi *= 1.5;
        }
        let hi = hi.min(width_cap);
        let w_hi = hi.cbrt();

        // at w = 0 the integrand has a finite limit even when the density
        // is edge-singular; evaluate just inside to capture it
        let w_floor = 1e-9 * w_hi;
        let eval_w = |w: f64| {
            let w = w.max(w_floor);
            let v = lp(x_min + w * w * w) - logmax;
            if v > -700.0 {
                v.exp() * 3.0 * w * w
            } else {
                0.0
            }
        };
        // coarse pass: find where the mass sits
        let n0 = profile.coarse.max(16);
        let coarse: Vec<f64> = (0..=n0).map(|j| w_hi * j as f64 / n0 as f64).collect();
        let gc: Vec<f64> = coarse.iter().map(|&w| eval_w(w)).collect();
        let cell_mass: Vec<f64> = (0..n0)
            .map(|j| (gc[j] + gc[j + 1]) * 0.5 * (coarse[j + 1] - coarse[j]))
            .collect();
        let total: f64 = cell_mass.iter().sum();
        if !(total > 0.0) {
            return Err(ResampleError::BadLayer(
                "conditional density has no mass on its support".into(),
            ));
        }
        // refined grid: nodes per coarse cell proportional to its mass
        let n = profile.nodes.max(2 * n0);
        let mut w = Vec::with_capacity(n + n0 + 1);
        w.push(0.0);
        for j in 0..n0 {
            let k = 1 + (n as f64 * cell_mass[j] / total).round() as usize;
            for t in 1..=k {
                w.push(coarse[j] + (coarse[j + 1] - coarse[j]) * t as f64 / k as f64);
            }
        }
        let g: Vec<f64> = w.iter().map(|&wj| eval_w(wj)).collect();
        let mut cdf = Vec::with_capacity(w.len());
        cdf.push(0.0);
        for j in 1..w.len() {
            let m = (g[j - 1] + g[j]) * 0.5 * (w[j] - w[j - 1]);
            cdf.push(cdf[j - 1] + m);
        }
        let z = *cdf.last().expect("nonempty");
        if !(z > 0.0) {
            return Err(ResampleError::BadLayer(
                "conditional density has no mass on its support".into(),
            ));
        }
        for c in &mut cdf {
            *c /= z;
        }
        Ok(ConditionalDensity1D {
            x_min,
            x_cap: x_min + hi,
            guard,
            w,
            cdf,
        })
    }

    pub fn support_min(&self) -> f64 {
        self.x_min
    }

    /// Width of the interval actually carrying mass (or of the support
    /// sliver in the degenerate case).
    pub fn width(&self) -> f64 {
        self.x_cap - self.x_min
    }

    pub fn is_degenerate(&self) -> bool {
        self.w.is_empty()
    }

    /// Inverse CDF; `u` in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        if self.is_degenerate() {
            return self.x_min + 0.5 * self.width();
        }
        let i = self.cdf.partition_point(|&c| c < u).clamp(1, self.cdf.len() - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        let wq = self.w[i - 1] + t * (self.w[i] - self.w[i - 1]);
        let off = (wq * wq * wq).max(self.guard.min(0.5 * self.width()));
        self.x_min + off
    }
}

/// One conditional draw of an interior cross-edge.
pub fn heat_bath_draw<R: rand::Rng>(
    flank: &Flank,
    law: &EdgeLaw,
    profile: &GridProfile,
    rng: &mut R,
) -> Result<f64, ResampleError> {
    let dens = ConditionalDensity1D::build(flank, law, profile)?;
    Ok(dens.quantile(crate::rng::uniform_open(rng)))
}

/// Gibbs chain over the interior cross-edges of one layer, with the two
/// extreme cross-edges and every boundary side held fixed.
pub struct LayerChain {
    layer: BoundaryLayer,
    law: EdgeLaw,
    profile: GridProfile,
    parity: usize,
    sweep_count: usize,
}

impl LayerChain {
    pub fn new(
        layer: BoundaryLayer,
        law: EdgeLaw,
        profile: GridProfile,
    ) -> Result<LayerChain, ResampleError> {
        let m = layer.len();
        if m < 5 {
            return Err(ResampleError::Window(m));
        }
        if layer.x.len() != m + 1 || layer.z.len() != m {
            return Err(ResampleError::BadLayer(format!(
                "side counts x={}, y={}, z={}",
                layer.x.len(),
                m,
                layer.z.len()
            )));
        }
        layer
            .validate()
            .map_err(|e| ResampleError::BadLayer(e.to_string()))?;
        Ok(LayerChain {
            layer,
            law,
            profile,
            parity: 0,
            sweep_count: 0,
        })
    }

    pub fn layer(&self) -> &BoundaryLayer {
        &self.layer
    }

    pub fn into_layer(self) -> BoundaryLayer {
        self.layer
    }

    pub fn sweep_count(&self) -> usize {
        self.sweep_count
    }

    /// Resample every interior cross-edge of the current parity from its
    /// exact conditional, then refresh the deep edges; alternating calls
    /// cover both parities.
    pub fn sweep<R: rand::Rng>(&mut self, rng: &mut R) -> Result<(), ResampleError> {
        let m = self.layer.len();
        for i in ((1 + self.parity)..m).step_by(2) {
            let flank = Flank::around(&self.layer, i);
            self.layer.x[i] = heat_bath_draw(&flank, &self.law, &self.profile, rng)?;
            // refresh only the two deep edges this site touches; deep
            // edges of untouched hexagons keep their (valid) values
            for j in [i - 1, i] {
                self.layer.z[j] = complete_consecutive(
                    self.layer.x[j],
                    self.layer.y[j],
                    self.layer.x[j + 1],
                )?
                .opposite;
            }
        }
        self.parity ^= 1;
        self.sweep_count += 1;
        Ok(())
    }
}

/// Lag-1 autocorrelation of a series.
pub(crate) fn lag1_autocorr(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 3 {
        return 0.0;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var: f64 = series.iter().map(|v| (v - mean) * (v - mean)).sum();
    if var == 0.0 {
        return 0.0;
    }
    let cov: f64 = series
        .windows(2)
        .map(|p| (p[0] - mean) * (p[1] - mean))
        .sum();
    cov / var
}

pub const DEFAULT_SWEEPS: usize = 128;

/// Resample a layer's interior cross-edges conditioned on its boundary
/// sides: completes the deep edges of the initial state, runs `n_sweeps`
/// checkerboard sweeps, and returns the final layer (same `y`, same
/// extreme `x`). With `n_sweeps = 0` the initial state is returned with
/// its deep edges completed.
pub fn resample_layer<R: rand::Rng>(
    y: &[f64],
    init_x: &[f64],
    n_sweeps: usize,
    law: &EdgeLaw,
    profile: &GridProfile,
    rng: &mut R,
) -> Result<BoundaryLayer, ResampleError> {
    let m = y.len();
    if init_x.len() != m + 1 {
        return Err(ResampleError::BadLayer(format!(
            "{} cross-edges against {m} boundary sides",
            init_x.len()
        )));
    }
    let mut z = Vec::with_capacity(m);
    for i in 0..m {
        z.push(complete_consecutive(init_x[i], y[i], init_x[i + 1])?.opposite);
    }
    let layer = BoundaryLayer {
        x: init_x.to_vec(),
        y: y.to_vec(),
        z,
    };
    if n_sweeps == 0 {
        return Ok(layer);
    }
    let mut chain = LayerChain::new(layer, law.clone(), *profile)?;
    let center = m / 2;
    let mut trace = Vec::with_capacity(n_sweeps / 2 + 1);
    for _ in 0..n_sweeps {
        let active = (center - 1) % 2 == chain.parity;
        chain.sweep(rng)?;
        if active {
            trace.push(chain.layer.x[center]);
        }
    }
    let rho = lag1_autocorr(&trace);
    if rho > 0.1 {
        log::warn!(
            "layer resampling may be under-mixed: center-site autocorrelation {rho:.3} \
             over {n_sweeps} sweeps (window of {m})"
        );
    }
    Ok(chain.into_layer())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hextree::sample_layer;
    use crate::quad::{integrate, MonotoneCubic};
    use crate::stats::ks_test;

    fn law() -> EdgeLaw {
        EdgeLaw::Stationary
    }

    fn test_profile() -> GridProfile {
        GridProfile {
            nodes: 192,
            coarse: 48,
            tail_drop: 30.0,
        }
    }

    #[test]
    fn support_threshold_is_exact() {
        let mut rng = crate::rng::stream(1, &["support"]);
        let l = law();
        for _ in 0..200 {
            let xs = l.sample(&mut rng);
            let ys = l.sample(&mut rng);
            match side_min(xs, ys) {
                Ok(x_min) => {
                    let above = x_min + 1e-9 * (1.0 + x_min);
                    let below = x_min - 1e-9 * (1.0 + x_min);
                    assert!(complete_consecutive(xs, ys, above).is_ok());
                    if below > 0.0 {
                        assert!(complete_consecutive(xs, ys, below).is_err());
                    }
                }
                Err(ResampleError::EmptySupport { .. }) => {
                    assert!(xs.tanh() * ys.cosh() <= 1.0);
                }
                Err(e) => panic!("unexpected {e}"),
            }
        }
        // a flank too small to ever close a hexagon
        assert!(matches!(
            side_min(0.1, 0.1),
            Err(ResampleError::EmptySupport { .. })
        ));
    }

    #[test]
    fn cond_logpdf_rejects_outside_support() {
        let flank = Flank {
            x_left: 1.2,
            y_left: 0.8,
            y_right: 1.7,
            x_right: 2.4,
        };
        let x_min = flank.support_min().unwrap();
        assert!(matches!(
            cond_logpdf(x_min - 0.01, &flank, &law()),
            Err(ResampleError::OutOfSupport { .. })
        ));
        assert!(cond_logpdf(x_min + 0.1, &flank, &law()).unwrap().is_finite());
    }

    /// Quadrature CDF of the conditional density, in the cube-root
    /// coordinate where the integrand is bounded.
    fn quadrature_cdf(flank: &Flank, l: &EdgeLaw) -> (f64, impl Fn(f64) -> f64) {
        let x_min = flank.support_min().unwrap();
        let f = *flank;
        let lc = l.clone();
        let g = move |w: f64| {
            let x = x_min + w * w * w;
            match cond_logpdf(x, &f, &lc) {
                Ok(lp) if lp > -700.0 => lp.exp() * 3.0 * w * w,
                _ => 0.0,
            }
        };
        let w_hi = 30.0f64.cbrt();
        let z = integrate(&g, 0.0, w_hi, 1e-12);
        let nodes: Vec<f64> = (0..=400).map(|j| w_hi * j as f64 / 400.0).collect();
        let mut cum = vec![0.0];
        for p in nodes.windows(2) {
            cum.push(cum.last().unwrap() + integrate(&g, p[0], p[1], 1e-12));
        }
        for c in &mut cum {
            *c /= z;
        }
        let interp = MonotoneCubic::new(nodes.clone(), cum);
        (x_min, move |x: f64| {
            if x <= x_min {
                0.0
            } else {
                let w = (x - x_min).cbrt();
                if w >= w_hi {
                    1.0
                } else {
                    interp.eval(w).clamp(0.0, 1.0)
                }
            }
        })
    }

    #[test]
    fn grid_quantiles_match_quadrature() {
        let flank = Flank {
            x_left: 1.2,
            y_left: 0.8,
            y_right: 1.7,
            x_right: 2.4,
        };
        let l = law();
        let dens = ConditionalDensity1D::build(&flank, &l, &GridProfile::default()).unwrap();
        let (_, cdf) = quadrature_cdf(&flank, &l);
        for u in [0.001, 0.05, 0.25, 0.5, 0.75, 0.95, 0.999] {
            let q = dens.quantile(u);
            let err = (cdf(q) - u).abs();
            assert!(err < 2e-3, "u = {u}: CDF mismatch {err:.2e}");
        }
    }

    #[test]
    fn draws_match_quadrature_cdf() {
        // flanks with well-separated support thresholds and a singular
        // left edge on one side
        for (flank, n) in [
            (
                Flank {
                    x_left: 1.2,
                    y_left: 0.8,
                    y_right: 1.7,
                    x_right: 2.4,
                },
                20_000,
            ),
            (
                Flank {
                    x_left: 3.0,
                    y_left: 2.0,
                    y_right: 0.9,
                    x_right: 1.4,
                },
                20_000,
            ),
        ] {
            let l = law();
            let dens = ConditionalDensity1D::build(&flank, &l, &GridProfile::default()).unwrap();
            let mut rng = crate::rng::stream(7, &["draws"]);
            let draws: Vec<f64> = (0..n)
                .map(|_| dens.quantile(crate::rng::uniform_open(&mut rng)))
                .collect();
            let (_, cdf) = quadrature_cdf(&flank, &l);
            let out = ks_test(&draws, cdf);
            assert!(out.p_value > 1e-4, "KS p = {}", out.p_value);
        }
    }

    #[test]
    fn binned_total_variation_against_quadrature() {
        let flank = Flank {
            x_left: 1.6,
            y_left: 1.1,
            y_right: 1.3,
            x_right: 1.9,
        };
        let l = law();
        let (_, cdf) = quadrature_cdf(&flank, &l);
        let dens = ConditionalDensity1D::build(&flank, &l, &GridProfile::default()).unwrap();
        // 40 equal-mass bins of the exact conditional
        let edges: Vec<f64> = (1..40)
            .map(|k| {
                let target = k as f64 / 40.0;
                // bisect the quadrature CDF
                let (mut lo, mut hi) = (dens.support_min(), dens.support_min() + 30.0);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if cdf(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect();
        let n = 200_000usize;
        let mut counts = vec![0usize; 40];
        let mut rng = crate::rng::stream(8, &["tv"]);
        for _ in 0..n {
            let x = dens.quantile(crate::rng::uniform_open(&mut rng));
            let b = edges.partition_point(|&e| e < x);
            counts[b] += 1;
        }
        let tv: f64 = counts
            .iter()
            .map(|&c| (c as f64 / n as f64 - 0.025).abs())
            .sum::<f64>()
            * 0.5;
        assert!(tv < 0.02, "TV = {tv:.4}");
    }

    #[test]
    fn sweeps_preserve_the_generative_law() {
        // layers drawn from the true joint law; sweeping at fixed y must
        // leave the center cross-edge exactly law-distributed, which fails
        // loudly if any factor of the conditional is wrong
        let l = law();
        let profile = test_profile();
        let mut rng = crate::rng::stream(21, &["stationarity"]);
        let m = 9;
        let mut center = Vec::new();
        let mut far_left = Vec::new();
        let mut far_right = Vec::new();
        for _ in 0..4000 {
            let layer = sample_layer(&l, m, &mut rng).unwrap();
            let mut chain = LayerChain::new(layer, l.clone(), profile).unwrap();
            chain.sweep(&mut rng).unwrap();
            chain.sweep(&mut rng).unwrap();
            let x = &chain.layer().x;
            center.push(x[4]);
            far_left.push(x[2]);
            far_right.push(x[6]);
        }
        let out = ks_test(&center, |v| l.cdf(v));
        assert!(out.p_value > 0.01, "stationarity KS p = {}", out.p_value);
        // sweeping must not leak correlation across the window either
        let ind = crate::stats::quantile_independence(&far_left, &far_right, 4);
        assert!(ind.p_value > 1e-4, "screening p = {}", ind.p_value);
    }

    #[test]
    fn wrong_kernel_breaks_stationarity() {
        // canary for the test above: drop the completion Jacobian from the
        // conditional and the drift is unmistakable
        let l = law();
        let profile = test_profile();
        let mut rng = crate::rng::stream(22, &["canary"]);
        let m = 9;
        let mut center = Vec::new();
        for _ in 0..2000 {
            let mut layer = sample_layer(&l, m, &mut rng).unwrap();
            for _ in 0..2 {
                for i in 1..m {
                    let flank = Flank::around(&layer, i);
                    let (x_min, guard) = flank.support_min_with_guard().unwrap();
                    let lc = l.clone();
                    let doctored = move |x: f64| {
                        let left = complete_consecutive(flank.x_left, flank.y_left, x)?;
                        let right = complete_consecutive(x, flank.y_right, flank.x_right)?;
                        Ok(lc.ln_pdf(x)
                            + lc.ln_pdf(left.opposite)
                            + lc.ln_pdf(right.opposite))
                    };
                    let dens = ConditionalDensity1D::build_with(
                        x_min,
                        f64::INFINITY,
                        doctored,
                        &profile,
                        guard,
                    )
                    .unwrap();
                    layer.x[i] = dens.quantile(crate::rng::uniform_open(&mut rng));
                }
            }
            center.push(layer.x[4]);
        }
        let out = ks_test(&center, |v| l.cdf(v));
        assert!(
            out.p_value < 1e-3,
            "doctored kernel was not detected: p = {}",
            out.p_value
        );
    }

    fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
        let n = xs.len() as f64;
        let (mx, my) = (
            xs.iter().sum::<f64>() / n,
            ys.iter().sum::<f64>() / n,
        );
        let cov: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>();
        let vx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let vy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
        cov / (vx * vy).sqrt()
    }

    // The conditioning data (the y row and the clamped boundary x) carries
    // real information about the interior sites, so corr(init, final) has a
    // positive floor no Markov chain can cross. The honest null is the
    // correlation between two states resampled from the SAME conditioning
    // data with independent randomness: that is exactly the information the
    // data alone pins down. A converged chain must match that floor, and an
    // early checkpoint must still remember strictly more than the late one.
    #[test]
    fn sweeps_erase_initialization_beyond_conditioning() {
        let l = law();
        let profile = test_profile();
        let mut rng = crate::rng::stream(23, &["decorrelate"]);
        let m = 7;
        let mut init = Vec::new();
        let mut early = Vec::new();
        let mut late_a = Vec::new();
        let mut late_b = Vec::new();
        for rep in 0..240 {
            let layer = sample_layer(&l, m, &mut rng).unwrap();
            init.push(layer.x[3]);
            let mut rng_a = crate::rng::stream(23, &["decorr-a", &rep.to_string()]);
            let mut rng_b = crate::rng::stream(23, &["decorr-b", &rep.to_string()]);
            let mut chain = LayerChain::new(layer.clone(), l.clone(), profile).unwrap();
            for s in 0..48 {
                chain.sweep(&mut rng_a).unwrap();
                if s == 3 {
                    early.push(chain.layer().x[3]);
                }
            }
            late_a.push(chain.layer().x[3]);
            let mut chain = LayerChain::new(layer, l.clone(), profile).unwrap();
            for _ in 0..48 {
                chain.sweep(&mut rng_b).unwrap();
            }
            late_b.push(chain.layer().x[3]);
        }
        let c_early = pearson(&init, &early);
        let c_late = pearson(&init, &late_a);
        let c_null = pearson(&late_a, &late_b);
        let excess = (c_late - c_null).abs();
        assert!(
            excess < 0.15,
            "converged chain remembers its initialization: corr(init, late) = {c_late:.4} \
             vs independent-randomness floor {c_null:.4}"
        );
        assert!(
            c_early > c_late + 0.05,
            "early checkpoint should retain more of the initial state: \
             corr(init, early) = {c_early:.4}, corr(init, late) = {c_late:.4}"
        );
        assert!(
            c_null < 0.85,
            "conditioning floor suspiciously high: corr(late_a, late_b) = {c_null:.4}"
        );
    }

    #[test]
    fn sweep_mechanics_and_bookkeeping() {
        let l = law();
        let mut rng = crate::rng::stream(24, &["mechanics"]);
        let layer = sample_layer(&l, 8, &mut rng).unwrap();
        let y0 = layer.y.clone();
        let (first, last) = (layer.x[0], layer.x[8]);
        let x_init = layer.x.clone();

        // zero sweeps: exact identity on x, deep edges completed
        let same = resample_layer(&y0, &x_init, 0, &l, &test_profile(), &mut rng).unwrap();
        assert_eq!(same.x, x_init);
        same.validate().unwrap();

        let mut chain = LayerChain::new(layer, l.clone(), test_profile()).unwrap();
        chain.sweep(&mut rng).unwrap();
        // parity 0 touched odd interior sites only
        assert_eq!(chain.layer().x[2], x_init[2]);
        assert_ne!(chain.layer().x[3], x_init[3]);
        let x3 = chain.layer().x[3];
        chain.sweep(&mut rng).unwrap();
        assert_eq!(chain.layer().x[3], x3);
        assert_ne!(chain.layer().x[2], x_init[2]);
        assert_eq!(chain.sweep_count(), 2);
        // ends and boundary sides are untouchable
        assert_eq!(chain.layer().x[0], first);
        assert_eq!(chain.layer().x[8], last);
        assert_eq!(chain.layer().y, y0);
        chain.layer().validate().unwrap();

        // windows below five hexagons are refused
        let short = sample_layer(&l, 4, &mut rng).unwrap();
        assert!(matches!(
            LayerChain::new(short, l.clone(), test_profile()),
            Err(ResampleError::Window(4))
        ));
        // mismatched inputs are refused
        assert!(resample_layer(&y0[..7], &x_init, 1, &l, &test_profile(), &mut rng).is_err());
    }

    #[test]
    fn resampled_layer_keeps_its_boundary_exactly() {
        let l = law();
        let mut rng = crate::rng::stream(25, &["boundary-fixed"]);
        let layer = sample_layer(&l, 9, &mut rng).unwrap();
        let out = resample_layer(
            &layer.y,
            &layer.x,
            16,
            &l,
            &test_profile(),
            &mut rng,
        )
        .unwrap();
        assert_eq!(out.y, layer.y);
        assert_eq!(out.x[0], layer.x[0]);
        assert_eq!(out.x[9], layer.x[9]);
        assert!(out.x[1..9] != layer.x[1..9]);
        out.validate().unwrap();
    }

    #[test]
    fn every_draw_lands_in_support() {
        let l = law();
        let mut rng = crate::rng::stream(26, &["support-violations"]);
        let mut checked = 0usize;
        while checked < 10_000 {
            let layer = sample_layer(&l, 5, &mut rng).unwrap();
            let flank = Flank::around(&layer, 2);
            let x = match heat_bath_draw(&flank, &l, &test_profile(), &mut rng) {
                Ok(x) => x,
                Err(ResampleError::EmptySupport { .. }) => continue,
                Err(e) => panic!("unexpected {e}"),
            };
            assert!(
                complete_consecutive(flank.x_left, flank.y_left, x).is_ok()
                    && complete_consecutive(x, flank.y_right, flank.x_right).is_ok(),
                "draw {x} escaped its support; flank {flank:?}, x_min {:?}",
                flank.support_min()
            );
            checked += 1;
        }
    }

    #[test]
    fn degenerate_support_collapses_to_midpoint() {
        // a bounded edge law whose upper end nearly coincides with the
        // support threshold leaves a sliver; the draw is its midpoint,
        // independent of the random stream
        let nodes: Vec<(f64, f64)> = (0..=32)
            .map(|j| (1.0 + j as f64 / 32.0, 1.0))
            .collect();
        let table = EdgeLaw::Tabulated(std::sync::Arc::new(
            crate::measures::Tabulated::from_nodes(&nodes, "test").unwrap(),
        ));
        // find a symmetric flank whose threshold sits just under 2.0
        let (mut lo, mut hi) = (1.0f64, 3.0f64);
        for _ in 0..80 {
            let t = 0.5 * (lo + hi);
            let m = side_min(t, t).unwrap_or(f64::INFINITY);
            if m > 2.0 - 5e-7 {
                lo = t;
            } else {
                hi = t;
            }
        }
        let t = 0.5 * (lo + hi);
        let flank = Flank {
            x_left: t,
            y_left: t,
            y_right: t,
            x_right: t,
        };
        let x_min = flank.support_min().unwrap();
        assert!(2.0 - x_min < 1e-6 && 2.0 > x_min);
        let mut r1 = crate::rng::stream(1, &["deg-a"]);
        let mut r2 = crate::rng::stream(2, &["deg-b"]);
        let a = heat_bath_draw(&flank, &table, &GridProfile::default(), &mut r1).unwrap();
        let b = heat_bath_draw(&flank, &table, &GridProfile::default(), &mut r2).unwrap();
        assert_eq!(a, b, "degenerate draw must ignore the stream");
        assert!((a - (x_min + 0.5 * (2.0 - x_min))).abs() < 1e-12);
    }

    #[test]
    fn lag1_autocorr_behaves() {
        let iid: Vec<f64> = {
            let mut r = crate::rng::stream(3, &["lag"]);
            (0..4000).map(|_| crate::rng::uniform_open(&mut r)).collect()
        };
        assert!(lag1_autocorr(&iid).abs() < 0.05);
        let trending: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert!(lag1_autocorr(&trending) > 0.9);
    }
}
