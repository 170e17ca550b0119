//! Side-length algebra of right-angled polygons.
//!
//! A right-angled hexagon is determined by its three alternating sides; a
//! right-angled pentagon by two adjacent sides; and four right-angled
//! pentagons sharing a vertex merge into a right-angled octagon. The
//! functions here produce full cyclic length tuples from the free
//! parameters; [`crate::geom::realize_right_polygon`] certifies them by
//! actually closing the boundary walk.
//!
//! Side indexing matches the walk order: in the output array, side `k` is
//! followed by side `k + 1`, and in a hexagon side `k` is opposite side
//! `k + 3`.

use crate::geom::{GeomError, MAX_LENGTH};

#[derive(Debug, thiserror::Error)]
pub enum PolyError {
    #[error("no right-angled hexagon has these side lengths")]
    InvalidHexagon,
    #[error("no right-angled pentagon: the two adjacent sides are too short")]
    InvalidPentagon,
    #[error("side length {0} is not positive, finite, and within the overflow guard")]
    BadLength(f64),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

fn check_length(l: f64) -> Result<(), PolyError> {
    if l.is_finite() && l > 0.0 && l <= MAX_LENGTH {
        Ok(())
    } else {
        Err(PolyError::BadLength(l))
    }
}

use crate::special::{ln_sinh, log_add_exp};

/// `ln(exp(v) - 1)` without overflow or small-`v` cancellation.
fn ln_expm1(v: f64) -> f64 {
    if v > 1.0 {
        v + (-(-v).exp()).ln_1p()
    } else {
        v.exp_m1().ln()
    }
}

/// Opposite side paired with the first of three alternating sides.
///
/// Computed entirely in the log domain. The defining ratio is
/// `exp(2t) = N / D` with `N = (1 + e^(a+b+c))(e^a + e^(b+c))` and
/// `D = (e^b + e^(a+c))(e^c + e^(a+b))`; expanding, the dominant cross
/// terms cancel exactly, leaving `N - D = e^a (e^(2b) - 1)(e^(2c) - 1)`.
/// Using that difference keeps full relative precision in `t` at both
/// extremes: a huge opposite (t near zero, where forming N and D
/// separately loses every significant digit) and a tiny one (t large).
fn opposite_of_alternate(la: f64, lb: f64, lc: f64) -> f64 {
    let ln_d = log_add_exp(
        log_add_exp(lb + lc, 2.0 * la + lb + lc),
        log_add_exp(la + 2.0 * lb, la + 2.0 * lc),
    );
    let ln_nd = la + ln_expm1(2.0 * lb) + ln_expm1(2.0 * lc);
    let lr = ln_nd - ln_d;
    let t = if lr > 36.0 {
        0.5 * lr
    } else {
        0.5 * lr.exp().ln_1p()
    };
    // the opposite length solves tanh(l / 2) = exp(-t), i.e.
    // l = ln(1 + e^-t) - ln(1 - e^-t), each piece in the form that keeps
    // the relative precision of e^-t at its size
    let ln_1m = if t > std::f64::consts::LN_2 {
        (-(-t).exp()).ln_1p()
    } else {
        (-(-t).exp_m1()).ln()
    };
    (-t).exp().ln_1p() - ln_1m
}

/// Full hexagon from its three alternating sides `(l1, l3, l5)`.
///
/// Returns the six sides in walk order `[l1, l2, l3, l4, l5, l6]`; the
/// even-indexed entries are the inputs and each output side sits opposite
/// its defining input. Any positive alternating triple works.
pub fn hexagon_from_alternate(l1: f64, l3: f64, l5: f64) -> Result<[f64; 6], PolyError> {
    check_length(l1)?;
    check_length(l3)?;
    check_length(l5)?;
    let l4 = opposite_of_alternate(l1, l3, l5);
    let l6 = opposite_of_alternate(l3, l5, l1);
    let l2 = opposite_of_alternate(l5, l1, l3);
    if !(l4 > 0.0 && l6 > 0.0 && l2 > 0.0) {
        return Err(PolyError::InvalidHexagon);
    }
    Ok([l1, l2, l3, l4, l5, l6])
}

/// Completion of three consecutive hexagon sides.
#[derive(Clone, Copy, Debug)]
pub struct Completion {
    /// Length of the side opposite the middle input side.
    pub opposite: f64,
    /// Derivative of that length with respect to the middle side.
    pub dopp_dmid: f64,
}

/// Switch to the log-domain path when intermediate products of hyperbolic
/// functions would lose headroom.
const CC_LOG_THRESHOLD: f64 = 650.0;

/// Side opposite the middle one of three consecutive sides `(la, lm, lb)`,
/// together with its sensitivity to the middle length.
///
/// Fails when no right-angled hexagon contains the given consecutive
/// triple (the flanking sides are too short for the span).
pub fn complete_consecutive(la: f64, lm: f64, lb: f64) -> Result<Completion, PolyError> {
    check_length(la)?;
    check_length(lm)?;
    check_length(lb)?;
    if la + lm + lb < CC_LOG_THRESHOLD {
        // u = cosh(opposite) - 1, grouped so both terms are
        // O(cosh(la - lb)) near the existence threshold rather than
        // O(cosh(la + lb)), and so a tiny middle side contributes through
        // sinh(lm/2) instead of vanishing into the rounding of cosh(lm)
        let sh = (0.5 * lm).sinh();
        let hd = (0.5 * (la - lb)).cosh();
        let u = 2.0 * (la.sinh() * lb.sinh() * sh * sh - hd * hd);
        if u <= 0.0 {
            return Err(PolyError::InvalidHexagon);
        }
        let sinh_z = if u > 1e8 {
            u + 1.0
        } else {
            (u * (u + 2.0)).sqrt()
        };
        let z = (u + sinh_z).ln_1p();
        let dz = la.sinh() * lb.sinh() * lm.sinh() / sinh_z;
        Ok(Completion {
            opposite: z,
            dopp_dmid: dz,
        })
    } else {
        // cz = exp(la + lb + lm)/8 * [(1-ea)(1-eb)(1+em) - 2 exp(-lm)(1+ea)(1+eb)]
        let ea = (-2.0 * la).exp();
        let eb = (-2.0 * lb).exp();
        let em = (-2.0 * lm).exp();
        let bracket =
            (1.0 - ea) * (1.0 - eb) * (1.0 + em) - 2.0 * (-lm).exp() * (1.0 + ea) * (1.0 + eb);
        if bracket <= 0.0 {
            return Err(PolyError::InvalidHexagon);
        }
        let ln_cz = la + lb + lm - 3.0 * std::f64::consts::LN_2 + bracket.ln();
        // acosh(c) = ln(2c) up to e^{-2z} corrections, far below resolution here
        let z = ln_cz + std::f64::consts::LN_2;
        let ln_dz = ln_sinh(la) + ln_sinh(lb) + ln_sinh(lm) - ln_sinh(z);
        Ok(Completion {
            opposite: z,
            dopp_dmid: ln_dz.exp(),
        })
    }
}

/// Defect of the angle-sum constraint for a triple of tangents; zero
/// exactly on the family of hexagons whose opposite sides are equal.
pub fn mirror_condition(a: f64, b: f64, c: f64) -> f64 {
    1.0 - a - b - c - a * b - a * c - b * c + a * b * c
}

/// Random hexagon with equal opposite sides.
///
/// The three distinct side lengths are `ln tan` of angles drawn uniformly
/// from the triangle of admissible triples summing to 5 pi / 4; each angle
/// lies in (pi/4, pi/2), so every side is positive.
pub fn mirror_sample<R: rand::Rng>(rng: &mut R) -> [f64; 6] {
    let u: f64 = crate::rng::uniform_open(rng);
    let v: f64 = crate::rng::uniform_open(rng);
    let (s, t) = if u <= v { (u, v) } else { (v, u) };
    let bary = [s, t - s, 1.0 - t];
    let mut alt = [0.0; 3];
    for i in 0..3 {
        let angle = std::f64::consts::FRAC_PI_2 - bary[i] * std::f64::consts::FRAC_PI_4;
        alt[i] = angle.tan().ln();
    }
    hexagon_from_alternate(alt[0], alt[1], alt[2])
        .expect("positive alternating sides always complete")
}

/// Full right-angled pentagon from two adjacent sides `(l1, l2)`.
///
/// Returns `[l1, l2, l3, l4, l5]` in walk order; requires
/// `sinh(l1) sinh(l2) > 1`. Every cyclically consecutive pair determines
/// the side opposite it by the same relation, which pins the remaining
/// three lengths.
pub fn pentagon_from_two(l1: f64, l2: f64) -> Result<[f64; 5], PolyError> {
    check_length(l1)?;
    check_length(l2)?;
    let s = l1.sinh() * l2.sinh();
    let disc = (s - 1.0) * (s + 1.0);
    if disc <= 0.0 {
        return Err(PolyError::InvalidPentagon);
    }
    let root = disc.sqrt();
    let l4 = root.asinh();
    let l3 = (l1.cosh() / root).asinh();
    let l5 = (l2.cosh() / root).asinh();
    Ok([l1, l2, l3, l4, l5])
}

/// Four right-angled pentagons sharing a vertex, merged into an octagon.
///
/// `spokes[k]` is the edge from the shared vertex to the octagon boundary
/// between pentagon `k - 1` and pentagon `k`; pentagon `k` has walk order
/// `[spokes[k], spokes[k+1], inner, outer, inner']`. The merged octagon
/// boundary alternates outer sides with joins of two collinear inner
/// sides.
#[derive(Clone, Debug)]
pub struct OctagonAssembly {
    pub spokes: [f64; 4],
    pub pentagons: [[f64; 5]; 4],
    /// `sides[2k]` is pentagon k's outer side; `sides[2k+1]` joins
    /// pentagon k's inner side to pentagon k+1's trailing inner side.
    pub sides: [f64; 8],
}

pub fn octagon_from_four(spokes: [f64; 4]) -> Result<OctagonAssembly, PolyError> {
    let mut pentagons = [[0.0; 5]; 4];
    for k in 0..4 {
        pentagons[k] = pentagon_from_two(spokes[k], spokes[(k + 1) % 4])?;
    }
    let mut sides = [0.0; 8];
    for k in 0..4 {
        sides[2 * k] = pentagons[k][3];
        sides[2 * k + 1] = pentagons[k][2] + pentagons[(k + 1) % 4][4];
    }
    Ok(OctagonAssembly {
        spokes,
        pentagons,
        sides,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{realize_right_polygon, Isometry};
    use proptest::prelude::*;

    const SYM_PARTNER: f64 = 1.566_799_236_972_411; // acosh(2.5), partner of ln 3

    #[test]
    fn symmetric_hexagon_reference() {
        let l = 3.0f64.ln();
        let hex = hexagon_from_alternate(l, l, l).unwrap();
        for k in [1, 3, 5] {
            assert!((hex[k] - SYM_PARTNER).abs() < 1e-14);
        }
        let placed = realize_right_polygon(&hex, &Isometry::IDENTITY).unwrap();
        assert!(placed.closure_defect < 1e-12);
    }

    #[test]
    fn asymmetric_hexagon_closes() {
        let hex = hexagon_from_alternate(0.4, 1.7, 2.9).unwrap();
        let placed = realize_right_polygon(&hex, &Isometry::IDENTITY).unwrap();
        assert!(
            placed.closure_defect < 1e-10,
            "defect {}",
            placed.closure_defect
        );
    }

    #[test]
    fn huge_alternate_sides_stay_accurate() {
        // outputs shrink like exp(-(sum)/2); the log-domain path keeps
        // full relative precision where naive evaluation returns garbage
        let hex = hexagon_from_alternate(50.0, 60.0, 70.0).unwrap();
        assert!((hex[3] / 8.496_708_510_583_178e-18 - 1.0).abs() < 1e-12);
        assert!((hex[5] / 1.871_524_593_768_035e-13 - 1.0).abs() < 1e-12);
        assert!((hex[1] / 4.122_307_244_877_116e-9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn completion_reference_values() {
        // symmetric case: flanks ln 3 and middle acosh(2.5) span ln 3
        let c = complete_consecutive(3.0f64.ln(), SYM_PARTNER, 3.0f64.ln()).unwrap();
        assert!((c.opposite - 3.0f64.ln()).abs() < 1e-13);
        assert!((c.dopp_dmid - 3.055_050_463_303_893_3).abs() < 1e-13);
        let c = complete_consecutive(1.2, 1.5, 2.0).unwrap();
        assert!((c.opposite - 2.489_061_412_260_717_6).abs() < 1e-13);
        assert!((c.dopp_dmid - 1.948_189_444_988_734_3).abs() < 1e-13);
    }

    #[test]
    fn completion_log_fallback_matches_reference() {
        let c = complete_consecutive(200.0, 200.0, 200.0).unwrap();
        assert!((c.opposite - 598.613_705_638_880_1).abs() < 1e-10);
        assert!((c.dopp_dmid - 1.0).abs() < 1e-12);
        let c = complete_consecutive(250.0, 260.0, 270.0).unwrap();
        assert!((c.opposite - 778.613_705_638_880_1).abs() < 1e-10);
        assert!((c.dopp_dmid - 1.0).abs() < 1e-12);
    }

    #[test]
    fn completion_rejects_short_flanks() {
        assert!(matches!(
            complete_consecutive(0.3, 0.3, 0.3),
            Err(PolyError::InvalidHexagon)
        ));
        assert!(matches!(
            complete_consecutive(1.2, 0.7, 2.0),
            Err(PolyError::InvalidHexagon)
        ));
    }

    #[test]
    fn completion_derivative_matches_finite_difference() {
        for (la, lm, lb) in [(1.0, 1.2, 2.1), (0.7, 2.0, 1.8), (2.5, 0.9, 1.4)] {
            let c = complete_consecutive(la, lm, lb).unwrap();
            let h = 1e-6;
            let up = complete_consecutive(la, lm + h, lb).unwrap().opposite;
            let dn = complete_consecutive(la, lm - h, lb).unwrap().opposite;
            let fd = (up - dn) / (2.0 * h);
            assert!(
                (c.dopp_dmid - fd).abs() < 1e-7 * c.dopp_dmid.abs(),
                "analytic {} vs fd {}",
                c.dopp_dmid,
                fd
            );
        }
    }

    #[test]
    fn completion_agrees_with_alternate_construction() {
        // build a hexagon from alternating sides, then re-derive side 5
        // from the consecutive run (l1, l2, l3)
        let hex = hexagon_from_alternate(0.8, 1.3, 0.6).unwrap();
        let c = complete_consecutive(hex[0], hex[1], hex[2]).unwrap();
        assert!((c.opposite - hex[4]).abs() < 1e-12);
    }

    #[test]
    fn mirror_family_fixed_point() {
        // the equilateral member has all sides acosh(2)
        let t: f64 = 2.0 + 3.0f64.sqrt();
        assert!(mirror_condition(t, t, t).abs() < 1e-12);
        let l = t.ln();
        assert!((l - 2.0f64.acosh()).abs() < 1e-15);
        let hex = hexagon_from_alternate(l, l, l).unwrap();
        for k in 0..6 {
            assert!((hex[k] - l).abs() < 1e-13);
        }
    }

    #[test]
    fn mirror_samples_have_equal_opposite_sides() {
        let mut rng = crate::rng::stream(5, &["mirror"]);
        for _ in 0..200 {
            let hex = mirror_sample(&mut rng);
            for k in 0..3 {
                assert!(
                    (hex[k] - hex[k + 3]).abs() < 1e-9 * (1.0 + hex[k]),
                    "opposite sides differ: {hex:?}"
                );
            }
            let t = [hex[0].exp(), hex[2].exp(), hex[4].exp()];
            assert!(mirror_condition(t[0], t[1], t[2]).abs() < 1e-7 * t.iter().product::<f64>());
            let placed = realize_right_polygon(&hex, &Isometry::IDENTITY).unwrap();
            assert!(placed.closure_defect < 1e-9);
        }
    }

    #[test]
    fn pentagon_reference_example() {
        let s2 = std::f64::consts::SQRT_2.asinh();
        let pent = pentagon_from_two(s2, s2).unwrap();
        assert!((pent[2] - 1.0f64.asinh()).abs() < 1e-13);
        assert!((pent[3] - 3.0f64.sqrt().asinh()).abs() < 1e-13);
        assert!((pent[4] - 1.0f64.asinh()).abs() < 1e-13);
        // every cyclic consecutive pair spans the side opposite it
        for i in 0..5 {
            let lhs = pent[(i + 3) % 5].cosh();
            let rhs = pent[i].sinh() * pent[(i + 1) % 5].sinh();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let placed = realize_right_polygon(&pent, &Isometry::IDENTITY).unwrap();
        assert!(placed.closure_defect < 1e-12);
    }

    #[test]
    fn pentagon_rejects_short_sides() {
        assert!(matches!(
            pentagon_from_two(0.5, 0.5),
            Err(PolyError::InvalidPentagon)
        ));
        // boundary case: product exactly 1 is degenerate
        let l = 1.0f64.asinh();
        assert!(pentagon_from_two(l, l).is_err());
    }

    #[test]
    fn octagon_assembly_closes() {
        let oct = octagon_from_four([0.9, 1.1, 1.3, 1.0]).unwrap();
        for pent in &oct.pentagons {
            let placed = realize_right_polygon(pent, &Isometry::IDENTITY).unwrap();
            assert!(placed.closure_defect < 1e-11);
        }
        let placed = realize_right_polygon(&oct.sides, &Isometry::IDENTITY).unwrap();
        assert!(
            placed.closure_defect < 1e-10,
            "merged octagon defect {}",
            placed.closure_defect
        );
        // outer sides: alternating products of opposite pairs agree
        let p = |k: usize| oct.sides[2 * k].cosh();
        assert!((p(0) * p(2) - p(1) * p(3)).abs() < 1e-10);
    }

    #[test]
    fn octagon_rejects_short_spokes() {
        assert!(octagon_from_four([0.5, 0.5, 0.5, 0.5]).is_err());
        // one bad adjacent pair is enough to fail
        assert!(octagon_from_four([2.0, 2.0, 0.3, 0.3]).is_err());
    }

    proptest! {
        #[test]
        fn hexagon_involution(
            l1 in 0.05f64..3.5,
            l3 in 0.05f64..3.5,
            l5 in 0.05f64..3.5,
        ) {
            let hex = hexagon_from_alternate(l1, l3, l5).unwrap();
            let back = hexagon_from_alternate(hex[3], hex[5], hex[1]).unwrap();
            prop_assert!((back[3] - l1).abs() < 1e-10 * (1.0 + l1));
            prop_assert!((back[5] - l3).abs() < 1e-10 * (1.0 + l3));
            prop_assert!((back[1] - l5).abs() < 1e-10 * (1.0 + l5));
        }

        #[test]
        fn hexagon_always_closes(
            l1 in 0.05f64..3.5,
            l3 in 0.05f64..3.5,
            l5 in 0.05f64..3.5,
        ) {
            let hex = hexagon_from_alternate(l1, l3, l5).unwrap();
            let placed = realize_right_polygon(&hex, &Isometry::IDENTITY).unwrap();
            prop_assert!(placed.closure_defect < 1e-9, "defect {}", placed.closure_defect);
        }

        #[test]
        fn pentagon_always_closes(
            l1 in 0.6f64..3.0,
            l2 in 0.6f64..3.0,
        ) {
            prop_assume!(l1.sinh() * l2.sinh() > 1.02);
            let pent = pentagon_from_two(l1, l2).unwrap();
            let placed = realize_right_polygon(&pent, &Isometry::IDENTITY).unwrap();
            prop_assert!(placed.closure_defect < 1e-9, "defect {}", placed.closure_defect);
        }

        #[test]
        fn octagon_always_closes(
            m0 in 0.95f64..2.5,
            m1 in 0.95f64..2.5,
            m2 in 0.95f64..2.5,
            m3 in 0.95f64..2.5,
        ) {
            // sinh(0.95) = 1.086, so all adjacent products exceed 1
            let oct = octagon_from_four([m0, m1, m2, m3]).unwrap();
            let placed = realize_right_polygon(&oct.sides, &Isometry::IDENTITY).unwrap();
            prop_assert!(placed.closure_defect < 1e-8, "defect {}", placed.closure_defect);
        }
    }
}
