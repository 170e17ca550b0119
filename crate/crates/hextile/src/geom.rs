//! Hyperbolic plane primitives on the hyperboloid sheet
//! x^2 + y^2 - z^2 = -1, z > 0.
//!
//! Orientation-preserving isometries are 3x3 matrices preserving the
//! bilinear form J = diag(1, 1, -1). Composition drifts off the group at
//! floating-point speed, so every isometry carries an age counter and gets
//! re-orthonormalized against J after a bounded number of products.

use std::fmt;
use std::ops::Mul;

#[derive(Debug, thiserror::Error)]
pub enum GeomError {
    #[error("translation length {0} exceeds the overflow guard")]
    LengthOverflow(f64),
    #[error("matrix is too far from the isometry group (defect {0:.3e})")]
    Defect(f64),
    #[error("degenerate configuration: {0}")]
    Degenerate(&'static str),
}

/// Longest representable translation; cosh overflows shortly past this.
pub const MAX_LENGTH: f64 = 700.0;

/// Compositions between re-orthonormalizations.
const RENORM_AGE: u32 = 32;

/// Minkowski inner product with signature (+, +, -).
#[inline]
pub fn mink(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

/// A point on the upper hyperboloid sheet.
#[derive(Clone, Copy, PartialEq)]
pub struct Point(pub [f64; 3]);

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({:.6}, {:.6}, {:.6})", self.0[0], self.0[1], self.0[2])
    }
}

impl Point {
    pub const ORIGIN: Point = Point([0.0, 0.0, 1.0]);

    /// Point at hyperbolic distance `r` from the origin in direction `theta`.
    pub fn from_polar(r: f64, theta: f64) -> Point {
        Point([r.sinh() * theta.cos(), r.sinh() * theta.sin(), r.cosh()])
    }

    /// Pull z back onto the sheet; x and y are kept as-is.
    #[inline]
    fn reproject(mut self) -> Point {
        let s = self.0[0] * self.0[0] + self.0[1] * self.0[1];
        self.0[2] = if s.is_finite() {
            (1.0 + s).sqrt()
        } else {
            // coordinates near the overflow edge: square via hypot
            self.0[0].hypot(self.0[1]).hypot(1.0)
        };
        self
    }

    pub fn dist(&self, other: &Point) -> f64 {
        let c = -mink(&self.0, &other.0);
        stable_acosh(c)
    }

    /// Conformal disk coordinates (|w| < 1).
    pub fn to_disk(&self) -> (f64, f64) {
        let d = 1.0 + self.0[2];
        (self.0[0] / d, self.0[1] / d)
    }

    pub fn from_disk(u: f64, v: f64) -> Result<Point, GeomError> {
        let s = u * u + v * v;
        if s >= 1.0 {
            return Err(GeomError::Degenerate("disk coordinates outside the unit disk"));
        }
        let f = 1.0 / (1.0 - s);
        Ok(Point([2.0 * u * f, 2.0 * v * f, (1.0 + s) * f]))
    }
}

/// acosh with the cancellation near 1 and the overflow past 1e150 handled.
#[inline]
pub fn stable_acosh(c: f64) -> f64 {
    if c <= 1.0 {
        return 0.0;
    }
    if c > 1e150 {
        return c.ln() + std::f64::consts::LN_2;
    }
    let d = c - 1.0;
    (d + (d * (d + 2.0)).sqrt()).ln_1p()
}

/// Orientation-preserving isometry, row-major, with a renormalization age.
#[derive(Clone, Copy)]
pub struct Isometry {
    pub m: [[f64; 3]; 3],
    age: u32,
}

impl fmt::Debug for Isometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Isometry[{:?}; {:?}; {:?}]",
            self.m[0], self.m[1], self.m[2]
        )
    }
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        age: 0,
    };

    pub fn from_rows(m: [[f64; 3]; 3]) -> Isometry {
        Isometry { m, age: RENORM_AGE } // unknown provenance: renormalize on next product
    }

    /// Translation along the x-axis by hyperbolic length `l`.
    pub fn translation_x(l: f64) -> Result<Isometry, GeomError> {
        if !l.is_finite() || l.abs() > MAX_LENGTH {
            return Err(GeomError::LengthOverflow(l));
        }
        let (s, c) = (l.sinh(), l.cosh());
        Ok(Isometry {
            m: [[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]],
            age: 0,
        })
    }

    /// Rotation about the origin by `theta`.
    pub fn rotation(theta: f64) -> Isometry {
        let (s, c) = theta.sin_cos();
        Isometry {
            m: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]],
            age: 0,
        }
    }

    /// The symmetric translation taking the origin to `p`.
    pub fn point_translation(p: &Point) -> Isometry {
        let [x, y, z] = p.0;
        let d = 1.0 + z;
        Isometry {
            m: [
                [1.0 + x * x / d, x * y / d, x],
                [x * y / d, 1.0 + y * y / d, y],
                [x, y, z],
            ],
            age: 1,
        }
    }

    /// Pose with origin at `a` and the positive x-axis pointing toward `b`.
    pub fn frame_along(a: &Point, b: &Point) -> Result<Isometry, GeomError> {
        let to_a = Isometry::point_translation(a);
        let q = to_a.inverse().apply(b);
        let (x, y) = (q.0[0], q.0[1]);
        if x * x + y * y < 1e-28 {
            return Err(GeomError::Degenerate("frame endpoints coincide"));
        }
        Ok(to_a * Isometry::rotation(y.atan2(x)))
    }

    #[inline]
    pub fn apply(&self, p: &Point) -> Point {
        let v = &p.0;
        Point([
            self.m[0][0] * v[0] + self.m[0][1] * v[1] + self.m[0][2] * v[2],
            self.m[1][0] * v[0] + self.m[1][1] * v[1] + self.m[1][2] * v[2],
            self.m[2][0] * v[0] + self.m[2][1] * v[1] + self.m[2][2] * v[2],
        ])
        .reproject()
    }

    /// Exact group inverse: J * transpose * J.
    pub fn inverse(&self) -> Isometry {
        let m = &self.m;
        Isometry {
            m: [
                [m[0][0], m[1][0], -m[2][0]],
                [m[0][1], m[1][1], -m[2][1]],
                [-m[0][2], -m[1][2], m[2][2]],
            ],
            age: self.age,
        }
    }

    /// Frobenius distance of M^T J M from J.
    pub fn defect(&self) -> f64 {
        let m = &self.m;
        let mut total = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let g = m[0][i] * m[0][j] + m[1][i] * m[1][j] - m[2][i] * m[2][j];
                let target = match (i == j, i) {
                    (true, 2) => -1.0,
                    (true, _) => 1.0,
                    (false, _) => 0.0,
                };
                total += (g - target) * (g - target);
            }
        }
        total.sqrt()
    }

    /// Frobenius distance from the identity.
    pub fn defect_from_identity(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                let d = self.m[i][j] - target;
                total += d * d;
            }
        }
        total.sqrt()
    }

    /// Gram-Schmidt against J on the columns (the timelike column first),
    /// restoring exact group membership up to roundoff.
    pub fn renormalize(&mut self) {
        let mut c2 = [self.m[0][2], self.m[1][2], self.m[2][2]];
        let n2 = -mink(&c2, &c2);
        let inv = 1.0 / n2.sqrt();
        for v in &mut c2 {
            *v *= inv;
        }
        let mut c0 = [self.m[0][0], self.m[1][0], self.m[2][0]];
        let s = mink(&c0, &c2);
        for i in 0..3 {
            c0[i] += s * c2[i];
        }
        let n0 = mink(&c0, &c0).sqrt();
        for v in &mut c0 {
            *v /= n0;
        }
        let mut c1 = [self.m[0][1], self.m[1][1], self.m[2][1]];
        let s2 = mink(&c1, &c2);
        let s0 = mink(&c1, &c0);
        for i in 0..3 {
            c1[i] += s2 * c2[i] - s0 * c0[i];
        }
        let n1 = mink(&c1, &c1).sqrt();
        for v in &mut c1 {
            *v /= n1;
        }
        for i in 0..3 {
            self.m[i][0] = c0[i];
            self.m[i][1] = c1[i];
            self.m[i][2] = c2[i];
        }
        self.age = 0;
    }

    /// Squared Frobenius norm; grows like cosh^2 of the translation part.
    pub fn norm_sq(&self) -> f64 {
        self.m.iter().flatten().map(|v| v * v).sum()
    }

    /// Checked composition: rejects inputs that have left the group. The
    /// test is scale-relative, since the J-residual of a healthy product
    /// grows with the square of its magnitude. It is a corruption canary,
    /// not an accuracy certificate: frames reached through walks with
    /// large intermediate excursions legitimately carry relative residuals
    /// up to ~1e-4 (cancellation re-amplified by later factors), while
    /// structural corruption shows up at order one.
    pub fn compose(&self, other: &Isometry) -> Result<Isometry, GeomError> {
        let scale = self.norm_sq().max(other.norm_sq());
        let d = self.defect().max(other.defect()) / scale;
        if d > 1e-3 {
            return Err(GeomError::Defect(d));
        }
        Ok(*self * *other)
    }

    pub fn row_major(&self) -> [f64; 9] {
        let m = &self.m;
        [
            m[0][0], m[0][1], m[0][2], m[1][0], m[1][1], m[1][2], m[2][0], m[2][1], m[2][2],
        ]
    }

    pub fn from_row_major(v: &[f64; 9]) -> Isometry {
        Isometry::from_rows([[v[0], v[1], v[2]], [v[3], v[4], v[5]], [v[6], v[7], v[8]]])
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, rhs: Isometry) -> Isometry {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
            }
        }
        let mut out = Isometry {
            m,
            age: self.age.saturating_add(rhs.age).saturating_add(1),
        };
        if out.age >= RENORM_AGE {
            out.renormalize();
        }
        out
    }
}

/// Unit spacelike normal of the geodesic through `a` and `b`.
fn geodesic_normal(a: &Point, b: &Point) -> Result<[f64; 3], GeomError> {
    let (u, v) = (&a.0, &b.0);
    // J applied to the Euclidean cross product is J-orthogonal to both
    let n = [
        u[1] * v[2] - u[2] * v[1],
        u[2] * v[0] - u[0] * v[2],
        -(u[0] * v[1] - u[1] * v[0]),
    ];
    let nn = mink(&n, &n);
    if nn <= 1e-24 {
        return Err(GeomError::Degenerate("geodesic endpoints coincide"));
    }
    let inv = 1.0 / nn.sqrt();
    Ok([n[0] * inv, n[1] * inv, n[2] * inv])
}

/// Signed distance from `p` to the oriented geodesic through `a` then `b`;
/// positive on the left of the direction of travel.
pub fn signed_dist_to_geodesic(p: &Point, a: &Point, b: &Point) -> Result<f64, GeomError> {
    let n = geodesic_normal(a, b)?;
    Ok(mink(&p.0, &n).asinh())
}

/// Distance from `p` to the geodesic segment from `a` to `b`.
pub fn dist_to_segment(p: &Point, a: &Point, b: &Point) -> Result<f64, GeomError> {
    let n = geodesic_normal(a, b)?;
    let s = mink(&p.0, &n);
    // closest point on the full geodesic
    let foot = [p.0[0] - s * n[0], p.0[1] - s * n[1], p.0[2] - s * n[2]];
    let t = -mink(&foot, &foot);
    if t > 0.0 {
        let inv = 1.0 / t.sqrt();
        let f = Point([foot[0] * inv, foot[1] * inv, foot[2] * inv]);
        let ab = a.dist(b);
        if a.dist(&f) + f.dist(b) <= ab + 1e-9 {
            return Ok(s.abs().asinh());
        }
    }
    Ok(p.dist(a).min(p.dist(b)))
}

/// Interior angle at `v` between the geodesics toward `prev` and `next`.
pub fn angle_at(prev: &Point, v: &Point, next: &Point) -> f64 {
    let t1 = tangent_toward(v, prev);
    let t2 = tangent_toward(v, next);
    mink(&t1, &t2).clamp(-1.0, 1.0).acos()
}

/// Unit tangent at `v` pointing along the geodesic toward `q`.
fn tangent_toward(v: &Point, q: &Point) -> [f64; 3] {
    let c = mink(&q.0, &v.0);
    let mut w = [0.0; 3];
    for i in 0..3 {
        w[i] = q.0[i] + c * v.0[i];
    }
    let n = mink(&w, &w).sqrt();
    for t in &mut w {
        *t /= n;
    }
    w
}

/// A right-angled polygon realized in the plane.
///
/// Side k runs from `vertices[k]` to `vertices[(k+1) % n]`; `side_poses[k]`
/// has its origin at `vertices[k]` with the x-axis along side k and the
/// interior on the left.
#[derive(Clone, Debug)]
pub struct PlacedPolygon {
    pub lengths: Vec<f64>,
    pub vertices: Vec<Point>,
    pub side_poses: Vec<Isometry>,
    pub closure_defect: f64,
    /// Largest Frobenius norm the realizing walk passed through, in the
    /// anchor frame. Absolute float error in the vertices scales with it,
    /// so audits must widen their tolerances accordingly.
    pub walk_reach: f64,
}

impl PlacedPolygon {
    pub fn n(&self) -> usize {
        self.lengths.len()
    }

    /// True when the traversal returned to its anchor within `tol`.
    pub fn is_closed(&self, tol: f64) -> bool {
        self.closure_defect <= tol
    }

    /// Signed distance from `p` to the supporting geodesic of side `k`,
    /// positive on the interior side.
    pub fn side_signed_dist(&self, k: usize, p: &Point) -> Result<f64, GeomError> {
        let a = &self.vertices[k];
        let b = &self.vertices[(k + 1) % self.n()];
        signed_dist_to_geodesic(p, a, b)
    }

    /// Strict interior test with a margin: every side at signed distance
    /// greater than `margin` (negative margin admits near-boundary points).
    ///
    /// Sides shorter than 1e-7 are treated as flat vertices and skipped:
    /// a right-angled polygon pinches to one with two collinear neighbors
    /// as a side shrinks, the supporting geodesic of a side below float
    /// resolution is not computable anyway, and the neighbors' half-planes
    /// decide containment up to that side's own length around the pinch.
    pub fn contains(&self, p: &Point, margin: f64) -> Result<bool, GeomError> {
        for k in 0..self.n() {
            if self.lengths[k] < 1e-7 {
                continue;
            }
            if self.side_signed_dist(k, p)? <= margin {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Walk a counterclockwise chain of geodesic sides meeting at right angles:
/// advance by each length, then turn left by a quarter turn. Interior lies
/// on the left; the closure defect records how far the walk missed its
/// anchor, and is tiny exactly when the lengths form a valid right-angled
/// polygon in this cyclic order.
pub fn realize_right_polygon(
    lengths: &[f64],
    anchor: &Isometry,
) -> Result<PlacedPolygon, GeomError> {
    if lengths.len() < 4 {
        return Err(GeomError::Degenerate("right-angled polygon needs at least 4 sides"));
    }
    let quarter = Isometry::rotation(std::f64::consts::FRAC_PI_2);
    // walk in the local frame so the closure residual is independent of
    // how far away the anchor sits
    let mut local = Isometry::IDENTITY;
    let mut scale = local.norm_sq();
    let mut vertices = Vec::with_capacity(lengths.len());
    let mut side_poses = Vec::with_capacity(lengths.len());
    for &l in lengths {
        if !(l > 0.0) {
            return Err(GeomError::Degenerate("side lengths must be positive"));
        }
        // large polygons cancel hugely on the way back from their far
        // vertices, which drifts the walked frames off the group; snap
        // each pose back so downstream composition sees true isometries
        let mut pose = *anchor * local;
        pose.renormalize();
        vertices.push(pose.apply(&Point::ORIGIN));
        side_poses.push(pose);
        local = local * Isometry::translation_x(l)? * quarter;
        scale = scale.max(local.norm_sq());
    }
    Ok(PlacedPolygon {
        lengths: lengths.to_vec(),
        vertices,
        side_poses,
        // relative to the magnitude the walk reached, so one threshold
        // serves small and large polygons alike
        closure_defect: local.defect_from_identity() / scale,
        walk_reach: scale.sqrt(),
    })
}
