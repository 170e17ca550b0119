//! Edge-length laws.
//!
//! [`EdgeLaw`] is the family of distributions a cross-edge length can be
//! drawn from: the distinguished stationary law (density proportional to
//! `sinh^(-1/3)`), a shifted-exponential family parametrized in `cosh` of
//! the length, and user-supplied tables. [`AdjacentPairLaw`] is the joint
//! law of two adjacent free sides of a right-angled pentagon, which is the
//! invariant input law for the four-pentagon construction.
//!
//! All quantile machinery is built once per law: a monotone-cubic table in
//! the bulk and analytic head/tail expansions outside it, so sampling is a
//! table lookup and the tails stay exact.

use std::sync::{Arc, OnceLock};

use crate::quad::{integrate, tanh_grid, MonotoneCubic};
use crate::special::{ellip_k, ln_sinh};

#[derive(Debug, thiserror::Error)]
pub enum MeasureError {
    #[error("unknown distribution spec '{0}'")]
    UnknownSpec(String),
    #[error("invalid parameter: {0}")]
    BadParam(String),
    #[error("invalid density table: {0}")]
    BadTable(String),
    #[error("could not read density table: {0}")]
    Io(#[from] std::io::Error),
}

/// Normalizing constant of the stationary law: the density is
/// `STATIONARY_NORM / sinh(l)^(1/3)`.
pub const STATIONARY_NORM: f64 = 0.237_724_709_270_886_62;

/// A distribution for a single cross-edge length on (0, infinity) or a
/// compact sub-interval.
#[derive(Clone)]
pub enum EdgeLaw {
    Stationary,
    ExpShifted(ExpShifted),
    Tabulated(Arc<Tabulated>),
}

impl std::fmt::Debug for EdgeLaw {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "EdgeLaw({})", self.spec_string())
    }
}

impl EdgeLaw {
    /// Parse a spec string: `nu0`, `expshift:a0=<rate>`,
    /// `expshift:mean=<target>`, or `table:<path>`.
    pub fn parse(spec: &str) -> Result<EdgeLaw, MeasureError> {
        if spec == "nu0" || spec == "stationary" {
            return Ok(EdgeLaw::Stationary);
        }
        if let Some(rest) = spec.strip_prefix("expshift:") {
            if let Some(v) = rest.strip_prefix("a0=") {
                let rate: f64 = v
                    .parse()
                    .map_err(|_| MeasureError::BadParam(format!("rate '{v}'")))?;
                return Ok(EdgeLaw::ExpShifted(ExpShifted::from_rate(rate)?));
            }
            if let Some(v) = rest.strip_prefix("mean=") {
                let mean: f64 = v
                    .parse()
                    .map_err(|_| MeasureError::BadParam(format!("mean '{v}'")))?;
                return Ok(EdgeLaw::ExpShifted(ExpShifted::from_mean(mean)?));
            }
            return Err(MeasureError::UnknownSpec(spec.to_string()));
        }
        if let Some(path) = spec.strip_prefix("table:") {
            return Ok(EdgeLaw::Tabulated(Arc::new(Tabulated::from_text_file(
                std::path::Path::new(path),
            )?)));
        }
        Err(MeasureError::UnknownSpec(spec.to_string()))
    }

    /// Canonical spec string (resolved parameters, not the input form).
    pub fn spec_string(&self) -> String {
        match self {
            EdgeLaw::Stationary => "nu0".to_string(),
            EdgeLaw::ExpShifted(e) => format!("expshift:a0={:.17e}", e.rate),
            EdgeLaw::Tabulated(t) => format!("table:{}", t.source),
        }
    }

    /// Interval outside which the density vanishes.
    pub fn support(&self) -> (f64, f64) {
        match self {
            EdgeLaw::Stationary | EdgeLaw::ExpShifted(_) => (0.0, f64::INFINITY),
            EdgeLaw::Tabulated(t) => (t.lo, t.hi),
        }
    }

    pub fn ln_pdf(&self, l: f64) -> f64 {
        match self {
            EdgeLaw::Stationary => {
                if l > 0.0 {
                    STATIONARY_NORM.ln() - ln_sinh(l) / 3.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            EdgeLaw::ExpShifted(e) => e.ln_pdf(l),
            EdgeLaw::Tabulated(t) => t.ln_pdf(l),
        }
    }

    pub fn pdf(&self, l: f64) -> f64 {
        self.ln_pdf(l).exp()
    }

    pub fn cdf(&self, l: f64) -> f64 {
        match self {
            EdgeLaw::Stationary => stationary_table().cdf(l),
            EdgeLaw::ExpShifted(e) => e.cdf(l),
            EdgeLaw::Tabulated(t) => t.cdf(l),
        }
    }

    /// Inverse CDF for u in (0, 1).
    pub fn quantile(&self, u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0, "quantile needs u strictly inside (0,1)");
        match self {
            EdgeLaw::Stationary => stationary_table().quantile(u),
            EdgeLaw::ExpShifted(e) => e.quantile(u),
            EdgeLaw::Tabulated(t) => t.quantile(u),
        }
    }

    pub fn sample<R: rand::Rng>(&self, rng: &mut R) -> f64 {
        match self {
            // closed-form: exp(l) - 1 is Gamma(2, rate)
            EdgeLaw::ExpShifted(e) => {
                let e1 = -crate::rng::uniform_open(rng).ln();
                let e2 = -crate::rng::uniform_open(rng).ln();
                ((e1 + e2) / e.rate).ln_1p()
            }
            _ => self.quantile(crate::rng::uniform_open(rng)),
        }
    }

    /// Mean length, by quadrature.
    pub fn mean(&self) -> f64 {
        let (lo, hi) = self.support();
        let hi = hi.min(200.0);
        integrate(&|l: f64| l * self.pdf(l), lo.max(1e-12), hi, 1e-11)
    }
}

// ---------------------------------------------------------------------------
// stationary law

/// CDF and quantile tables for the stationary law, built in the
/// substituted coordinate `w = l^(2/3)` where the CDF is analytic at the
/// origin (the density has an `l^(-1/3)` head).
struct StationaryTable {
    fwd: MonotoneCubic,
    inv: MonotoneCubic,
    lo: f64,
    hi: f64,
    u_lo: f64,
    u_hi: f64,
}

const STAT_TAIL_COEFF: f64 = 3.0 * STATIONARY_NORM * 1.259_921_049_894_873_2; // 3 C 2^(1/3)

fn stationary_pdf(l: f64) -> f64 {
    STATIONARY_NORM * (-ln_sinh(l) / 3.0).exp()
}

/// Series for the CDF near zero, where the density has an integrable
/// l^(-1/3) singularity.
fn stationary_cdf_head(l: f64) -> f64 {
    STATIONARY_NORM * (1.5 * l.powf(2.0 / 3.0) - l.powf(8.0 / 3.0) / 48.0)
}

fn stationary_sf_tail(l: f64) -> f64 {
    STAT_TAIL_COEFF * (-l / 3.0).exp()
}

fn stationary_table() -> &'static StationaryTable {
    static TABLE: OnceLock<StationaryTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let lo = 1e-3f64;
        let hi = 25.0f64;
        let ws = tanh_grid(lo.powf(2.0 / 3.0), hi.powf(2.0 / 3.0), 1200, 4.0);
        let mut us = Vec::with_capacity(ws.len());
        let mut acc = stationary_cdf_head(lo);
        us.push(acc);
        for w in ws.windows(2) {
            acc += integrate(&stationary_pdf, w[0].powf(1.5), w[1].powf(1.5), 1e-14);
            us.push(acc);
        }
        let u_lo = us[0];
        let u_hi = *us.last().expect("nonempty");
        debug_assert!(
            (u_hi + stationary_sf_tail(hi) - 1.0).abs() < 1e-9,
            "stationary law mass mismatch"
        );
        StationaryTable {
            fwd: MonotoneCubic::new(ws.clone(), us.clone()),
            inv: MonotoneCubic::new(us, ws),
            lo,
            hi,
            u_lo,
            u_hi,
        }
    })
}

impl StationaryTable {
    fn cdf(&self, l: f64) -> f64 {
        if l <= 0.0 {
            0.0
        } else if l < self.lo {
            stationary_cdf_head(l)
        } else if l > self.hi {
            1.0 - stationary_sf_tail(l)
        } else {
            self.fwd.eval(l.powf(2.0 / 3.0))
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        if u < self.u_lo {
            // invert the head series with two Newton corrections
            let mut l = (u / (1.5 * STATIONARY_NORM)).powf(1.5);
            for _ in 0..2 {
                l -= (stationary_cdf_head(l) - u) / stationary_pdf(l);
            }
            l
        } else if u > self.u_hi {
            3.0 * (STAT_TAIL_COEFF / (1.0 - u)).ln()
        } else {
            self.inv.eval(u).powf(1.5)
        }
    }
}

// ---------------------------------------------------------------------------
// shifted-exponential family

/// Law of `l` with `exp(l) - 1` distributed Gamma(2, rate): the density in
/// the variable `u = exp(l)` is `rate^2 (u - 1) exp(-rate (u - 1))`.
#[derive(Clone, Copy, Debug)]
pub struct ExpShifted {
    pub rate: f64,
}

impl ExpShifted {
    pub fn from_rate(rate: f64) -> Result<ExpShifted, MeasureError> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(MeasureError::BadParam(format!("rate must be positive, got {rate}")));
        }
        Ok(ExpShifted { rate })
    }

    /// Rate whose mean length equals `target`, found by bisection.
    pub fn from_mean(target: f64) -> Result<ExpShifted, MeasureError> {
        if !(target.is_finite() && target > 0.0) {
            return Err(MeasureError::BadParam(format!(
                "mean must be positive, got {target}"
            )));
        }
        let mean_of = |rate: f64| ExpShifted { rate }.mean();
        let (mut lo, mut hi) = (1e-9, 1e6); // mean decreasing in rate
        if target > mean_of(lo) || target < mean_of(hi) {
            return Err(MeasureError::BadParam(format!(
                "mean {target} outside the reachable range"
            )));
        }
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if mean_of(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-14 {
                break;
            }
        }
        Ok(ExpShifted {
            rate: (lo * hi).sqrt(),
        })
    }

    /// Mean length: integral of ln(1 + t / rate) against the Gamma(2)
    /// weight t e^(-t).
    pub fn mean(&self) -> f64 {
        let rate = self.rate;
        integrate(
            &|t: f64| (t / rate).ln_1p() * t * (-t).exp(),
            0.0,
            120.0,
            1e-12,
        )
    }

    fn shifted(&self, l: f64) -> f64 {
        // rate * (exp(l) - 1), stable for small l
        self.rate * l.exp_m1()
    }

    pub fn ln_pdf(&self, l: f64) -> f64 {
        if !(l > 0.0) {
            return f64::NEG_INFINITY;
        }
        let t = self.shifted(l);
        if !(t < 745.0) {
            // exp(-t) underflows; the density is zero to working precision
            return f64::NEG_INFINITY;
        }
        // ln(u - 1) + l - t with u = exp(l); ln(u - 1) = l + ln(1 - exp(-l))
        2.0 * self.rate.ln() + l + (-(-l).exp()).ln_1p() + l - t
    }

    pub fn cdf(&self, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        let t = self.shifted(l);
        if t > 745.0 {
            return 1.0;
        }
        if t < 1e-4 {
            // 1 - (1 + t) e^(-t) expanded to avoid cancellation
            return t * t * (0.5 - t / 3.0 + t * t / 8.0);
        }
        1.0 - (1.0 + t) * (-t).exp()
    }

    pub fn quantile(&self, u: f64) -> f64 {
        // solve 1 - (1 + t) e^(-t) = u by bisection-seeded Newton
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        let g = |t: f64| {
            if t < 1e-4 {
                t * t * (0.5 - t / 3.0 + t * t / 8.0)
            } else {
                1.0 - (1.0 + t) * (-t).exp()
            }
        };
        while g(hi) < u {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) < u {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo < 1e-13 * (1.0 + lo) {
                break;
            }
        }
        let t = 0.5 * (lo + hi);
        (t / self.rate).ln_1p()
    }
}

// ---------------------------------------------------------------------------
// tabulated law

/// Density given by interpolation nodes on a compact interval.
pub struct Tabulated {
    source: String,
    pdf_interp: MonotoneCubic,
    fwd: MonotoneCubic,
    inv: MonotoneCubic,
    lo: f64,
    hi: f64,
}

impl Tabulated {
    /// Nodes are `(length, unnormalized density)` pairs with strictly
    /// increasing lengths; the density is interpolated shape-preservingly
    /// and renormalized to unit mass.
    pub fn from_nodes(nodes: &[(f64, f64)], source: &str) -> Result<Tabulated, MeasureError> {
        if nodes.len() < 4 {
            return Err(MeasureError::BadTable("need at least 4 nodes".into()));
        }
        let xs: Vec<f64> = nodes.iter().map(|p| p.0).collect();
        let ys: Vec<f64> = nodes.iter().map(|p| p.1).collect();
        if xs[0] <= 0.0 {
            return Err(MeasureError::BadTable("lengths must be positive".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(MeasureError::BadTable("lengths must be strictly increasing".into()));
        }
        if ys.iter().any(|&y| !(y.is_finite() && y >= 0.0)) {
            return Err(MeasureError::BadTable("densities must be finite and nonnegative".into()));
        }
        if ys.iter().all(|&y| y == 0.0) {
            return Err(MeasureError::BadTable("density is identically zero".into()));
        }
        let raw = MonotoneCubic::new(xs.clone(), ys.clone());
        let (lo, hi) = raw.domain();
        // refined grid for the CDF: several points per node interval
        let mut grid = Vec::with_capacity(xs.len() * 8);
        for w in xs.windows(2) {
            for k in 0..8 {
                grid.push(w[0] + (w[1] - w[0]) * k as f64 / 8.0);
            }
        }
        grid.push(hi);
        let mut cum = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        cum.push(0.0);
        let f = |x: f64| raw.eval(x).max(0.0);
        for w in grid.windows(2) {
            acc += integrate(&f, w[0], w[1], 1e-12);
            cum.push(acc);
        }
        let mass = acc;
        if mass <= 0.0 || !mass.is_finite() {
            return Err(MeasureError::BadTable("density mass is not positive".into()));
        }
        for u in &mut cum {
            *u /= mass;
        }
        // strictly increasing cumulative values are required for inversion
        for w in cum.windows(2) {
            if w[1] <= w[0] {
                return Err(MeasureError::BadTable(
                    "density vanishes on an interior interval".into(),
                ));
            }
        }
        let ys_norm: Vec<f64> = ys.iter().map(|y| y / mass).collect();
        Ok(Tabulated {
            source: source.to_string(),
            pdf_interp: MonotoneCubic::new(xs, ys_norm),
            fwd: MonotoneCubic::new(grid.clone(), cum.clone()),
            inv: MonotoneCubic::new(cum, grid),
            lo,
            hi,
        })
    }

    /// Read a two-column text file: one `length density` pair per line,
    /// whitespace separated; blank lines and `#` comments are skipped.
    pub fn from_text_file(path: &std::path::Path) -> Result<Tabulated, MeasureError> {
        let text = std::fs::read_to_string(path)?;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let bad = || MeasureError::BadTable(format!("line {}: expected 'length density'", idx + 1));
            let l: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            let f: f64 = cols.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if cols.next().is_some() {
                return Err(bad());
            }
            pairs.push((l, f));
        }
        Tabulated::from_nodes(&pairs, &path.display().to_string())
    }

    pub fn ln_pdf(&self, l: f64) -> f64 {
        if l < self.lo || l > self.hi {
            return f64::NEG_INFINITY;
        }
        let v = self.pdf_interp.eval(l).max(0.0);
        if v == 0.0 {
            f64::NEG_INFINITY
        } else {
            v.ln()
        }
    }

    pub fn cdf(&self, l: f64) -> f64 {
        if l <= self.lo {
            0.0
        } else if l >= self.hi {
            1.0
        } else {
            self.fwd.eval(l).clamp(0.0, 1.0)
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        self.inv.eval(u).clamp(self.lo, self.hi)
    }
}

// ---------------------------------------------------------------------------
// adjacent-pair law for right-angled pentagons

/// Joint law of two adjacent free sides `(l1, l2)` of a right-angled
/// pentagon, supported on `sinh(l1) sinh(l2) > 1`, with density
/// `1 / (norm * sinh(opposite))` where `cosh(opposite) = sinh(l1) sinh(l2)`.
/// It is exchangeable, each margin has mean pi/2, and it is preserved by
/// the pentagon completion maps.
pub struct AdjacentPairLaw;

struct PairTables {
    k: f64,       // quarter period at modulus 1/sqrt(2)
    ln_norm: f64, // 2 ln k
    fwd: MonotoneCubic,
    inv: MonotoneCubic,
    lo: f64,
    hi: f64,
    u_lo: f64,
    u_hi: f64,
}

fn pair_tables() -> &'static PairTables {
    static TABLE: OnceLock<PairTables> = OnceLock::new();
    TABLE.get_or_init(|| {
        let k = ellip_k(std::f64::consts::FRAC_1_SQRT_2);
        let ln_norm = 2.0 * k.ln();
        let lo = 1e-3;
        let hi = 18.0;
        let xs = tanh_grid(lo, hi, 1200, 4.0);
        let pdf = |l: f64| AdjacentPairLaw::marginal_pdf_with(k, l);
        let mut us = Vec::with_capacity(xs.len());
        // near zero the marginal is flat at its central value
        let m0 = std::f64::consts::FRAC_PI_2 / (k * k);
        let mut acc = m0 * (lo - lo * lo * lo / 12.0);
        us.push(acc);
        for w in xs.windows(2) {
            acc += integrate(&pdf, w[0], w[1], 1e-14);
            us.push(acc);
        }
        let u_lo = us[0];
        let u_hi = *us.last().expect("nonempty");
        let tail = AdjacentPairLaw::marginal_sf_tail(k, hi);
        debug_assert!(
            (u_hi + tail - 1.0).abs() < 1e-9,
            "pair marginal mass mismatch: {}",
            u_hi + tail
        );
        PairTables {
            k,
            ln_norm,
            fwd: MonotoneCubic::new(xs.clone(), us.clone()),
            inv: MonotoneCubic::new(us, xs),
            lo,
            hi,
            u_lo,
            u_hi,
        }
    })
}

impl AdjacentPairLaw {
    /// The normalizer: square of the quarter period.
    pub fn norm() -> f64 {
        let k = pair_tables().k;
        k * k
    }

    /// Log joint density at `(l1, l2)`.
    pub fn ln_joint(l1: f64, l2: f64) -> f64 {
        if !(l1 > 0.0 && l2 > 0.0) {
            return f64::NEG_INFINITY;
        }
        let ls = ln_sinh(l1) + ln_sinh(l2);
        if ls <= 0.0 {
            return f64::NEG_INFINITY;
        }
        // ln sinh(opposite) where cosh(opposite) = exp(ls)
        let ln_sinh_opp = ls + 0.5 * (-(-2.0 * ls).exp()).ln_1p();
        -pair_tables().ln_norm - ln_sinh_opp
    }

    pub fn joint_pdf(l1: f64, l2: f64) -> f64 {
        Self::ln_joint(l1, l2).exp()
    }

    fn marginal_pdf_with(k: f64, l: f64) -> f64 {
        if l <= 0.0 {
            return 0.0;
        }
        if l > 17.0 {
            // K(tanh l) approaches ln(4 cosh l)
            return 2.0 * (l + std::f64::consts::LN_2) * (-l).exp() / (k * k)
                * (1.0 / (1.0 + (-2.0 * l).exp()));
        }
        ellip_k(l.tanh()) / (k * k * l.cosh())
    }

    fn marginal_sf_tail(k: f64, l: f64) -> f64 {
        2.0 * (-l).exp() * (l + 1.0 + std::f64::consts::LN_2) / (k * k)
    }

    /// Marginal density of one coordinate.
    pub fn marginal_pdf(l: f64) -> f64 {
        Self::marginal_pdf_with(pair_tables().k, l)
    }

    pub fn marginal_cdf(l: f64) -> f64 {
        let t = pair_tables();
        if l <= 0.0 {
            0.0
        } else if l < t.lo {
            let m0 = std::f64::consts::FRAC_PI_2 / (t.k * t.k);
            m0 * (l - l * l * l / 12.0)
        } else if l > t.hi {
            1.0 - Self::marginal_sf_tail(t.k, l)
        } else {
            t.fwd.eval(l)
        }
    }

    pub fn marginal_quantile(u: f64) -> f64 {
        assert!(u > 0.0 && u < 1.0);
        let t = pair_tables();
        if u < t.u_lo {
            let m0 = std::f64::consts::FRAC_PI_2 / (t.k * t.k);
            let mut l = u / m0;
            l = u / m0 + l * l * l / 12.0;
            l
        } else if u > t.u_hi {
            // fixed-point on the log form of the tail survival, then Newton
            let r = 2.0 / ((1.0 - u) * t.k * t.k);
            let mut l = r.ln();
            for _ in 0..4 {
                l = (r * (l + 1.0 + std::f64::consts::LN_2)).ln();
            }
            for _ in 0..3 {
                let sf = Self::marginal_sf_tail(t.k, l);
                let pdf = Self::marginal_pdf_with(t.k, l);
                l += (sf - (1.0 - u)) / pdf;
            }
            l
        } else {
            t.inv.eval(u)
        }
    }

    /// Draw the second coordinate given the first.
    pub fn conditional_sample<R: rand::Rng>(rng: &mut R, l1: f64) -> f64 {
        Self::conditional_sample_counted(rng, l1).0
    }

    /// As above, also reporting how many proposals the rejection loop used.
    pub(crate) fn conditional_sample_counted<R: rand::Rng>(rng: &mut R, l1: f64) -> (f64, u32) {
        // In the angle substitution sinh(l2) = 1 / (a cos(theta)) with
        // a = sinh(l1), the conditional density of theta on (0, pi/2) is
        // proportional to 1 / sqrt(1 + a^2 cos^2(theta)), which is bounded
        // by the normalized envelope min(1, 1 / (a cos(theta))); both
        // envelope pieces sample in closed form and the acceptance rate is
        // at least 1 / sqrt(2).
        let a = l1.sinh();
        let mut attempts = 0u32;
        loop {
            attempts += 1;
            let (theta, envelope) = if a <= 1.0 {
                (
                    crate::rng::uniform_open(rng) * std::f64::consts::FRAC_PI_2,
                    1.0,
                )
            } else {
                let theta_star = (1.0 / a).acos();
                let w_uniform = std::f64::consts::FRAC_PI_2 - theta_star;
                let w_sec = crate::geom::stable_acosh(a) / a;
                if crate::rng::uniform_open(rng) * (w_uniform + w_sec) < w_uniform {
                    (
                        theta_star + crate::rng::uniform_open(rng) * w_uniform,
                        1.0,
                    )
                } else {
                    // inverse CDF of sec(theta) on (0, theta_star)
                    let x = crate::rng::uniform_open(rng) * crate::geom::stable_acosh(a);
                    let theta = x.sinh().atan();
                    (theta, 1.0 / (a * theta.cos()))
                }
            };
            let c = a * theta.cos();
            let target = 1.0 / (1.0 + c * c).sqrt();
            if crate::rng::uniform_open(rng) * envelope <= target {
                return ((1.0 / c).asinh(), attempts);
            }
        }
    }

    /// Draw an adjacent pair from the joint law.
    pub fn sample<R: rand::Rng>(rng: &mut R) -> (f64, f64) {
        let l1 = Self::marginal_quantile(crate::rng::uniform_open(rng));
        let l2 = Self::conditional_sample(rng, l1);
        (l1, l2)
    }
}
