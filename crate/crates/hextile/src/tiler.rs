//! Growth of an edge-to-edge hexagon tiling covering a disk, plus the
//! geometric certificates that audit the result.
//!
//! The tiling is a union of sheets: each sheet is a tree of hexagons glued
//! along their alternating cross-edges, and neighboring sheets meet along
//! shared boundary geodesics, subdivided identically on both sides. Growth
//! alternates two moves until the target disk is enclosed:
//!
//! - across an open cross-edge, attach the same-sheet neighbor, drawing its
//!   two new cross-edges independently from the edge law;
//! - across a boundary geodesic, attach the facing layer of a fresh sheet
//!   in one piece, conditioning its cross-edges on the shared subdivision
//!   by heat-bath resampling seeded from the near side's own cross-edges.
//!
//! Each geodesic is glued exactly once, over a window sized for the largest
//! supported disk rather than the requested one; growth for a smaller
//! radius is therefore a prefix of growth for a larger with the same seed.

use std::collections::{BTreeMap, BinaryHeap};

use crate::geom::{
    angle_at, dist_to_segment, realize_right_polygon, GeomError, Isometry, PlacedPolygon, Point,
};
use crate::hextree::{glue_anchor, point_mismatch};
use crate::measures::EdgeLaw;
use crate::polygons::{hexagon_from_alternate, PolyError};
use crate::resample::{resample_layer, GridProfile, ResampleError};

#[derive(Debug, thiserror::Error)]
pub enum TilerError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error("radius {0} outside the supported range")]
    Radius(f64),
    #[error("tile cap {0} reached before the disk was enclosed")]
    Cap(usize),
    #[error("hexagon {address} failed to close (defect {defect:.3e})")]
    Defect { address: String, defect: f64 },
    #[error("internal invariant breached: {0}")]
    Internal(String),
}

/// Knobs controlling growth cost and determinism scope.
#[derive(Clone, Debug)]
pub struct GrowthProfile {
    /// Heat-bath sweeps per glued layer.
    pub sweeps: usize,
    /// Quadrature profile for the conditional draws.
    pub grid: GridProfile,
    /// Abort threshold on the total tile count.
    pub max_tiles: usize,
    /// Layer windows cover the disk of this radius regardless of the
    /// requested one, so that growth is monotone in the request; it is
    /// also the largest radius `grow_tiling` accepts.
    pub window_radius: f64,
    /// Extra subdivision indices kept on each end of a window beyond the
    /// disk, confining the frozen-end truncation to outside it.
    pub buffer: usize,
}

impl Default for GrowthProfile {
    fn default() -> GrowthProfile {
        GrowthProfile {
            sweeps: 32,
            grid: GridProfile {
                nodes: 96,
                coarse: 24,
                tail_drop: 30.0,
            },
            max_tiles: 200_000,
            window_radius: 12.0,
            buffer: 8,
        }
    }
}

/// One placed hexagon of a tiling.
#[derive(Clone, Debug)]
pub struct Tile {
    pub id: usize,
    /// Sheet (cross-edge-connected component) the tile belongs to.
    pub sheet: usize,
    /// Position label within the sheet.
    pub address: String,
    pub lengths: [f64; 6],
    pub placement: Isometry,
    pub placed: PlacedPolygon,
    /// The three slots holding cross-edges; the other three are boundary
    /// sides lying on geodesics shared with neighboring sheets.
    pub cross_slots: [usize; 3],
}

impl Tile {
    pub fn cross_lengths(&self) -> [f64; 3] {
        self.cross_slots.map(|s| self.lengths[s])
    }
}

/// Record of one glued layer: the shared subdivision, the near side's
/// cross-edges it was seeded from, and the resampled far side.
#[derive(Clone, Debug)]
pub struct GluedWindow {
    pub geodesic: usize,
    pub y: Vec<f64>,
    pub near_x: Vec<f64>,
    pub far_x: Vec<f64>,
    /// Indices within `buffer` of either end carry the frozen-end
    /// truncation and sit outside the certified disk.
    pub buffer: usize,
}

impl GluedWindow {
    /// The far-side cross-edges clear of both frozen ends.
    pub fn trusted_far(&self) -> &[f64] {
        let n = self.far_x.len();
        &self.far_x[self.buffer.min(n)..n.saturating_sub(self.buffer)]
    }
}

#[derive(Clone, Debug)]
pub struct Tiling {
    pub seed: u64,
    pub spec: String,
    pub tiles: Vec<Tile>,
    /// Symmetric map: both orientations of every shared side are present.
    pub adjacency: BTreeMap<(usize, usize), (usize, usize)>,
    pub radius_certified: f64,
    pub windows: Vec<GluedWindow>,
}

impl Tiling {
    pub fn origin_tile(&self) -> &Tile {
        &self.tiles[0]
    }

    /// Consecutive cross-edge pairs along every glued geodesic, near and
    /// far side, for reversibility statistics.
    pub fn boundary_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.windows.iter().flat_map(|w| {
            w.near_x
                .windows(2)
                .chain(w.far_x.windows(2))
                .map(|p| (p[0], p[1]))
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum SideKind {
    Cross,
    Boundary,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct SideRef {
    tile: usize,
    slot: usize,
}

#[derive(Clone, Debug)]
struct SideState {
    kind: SideKind,
    matched: Option<SideRef>,
    /// Geodesic id (boundary sides only).
    geodesic: usize,
    /// Neighbors along the geodesic in traversal order (boundary only).
    prev: Option<SideRef>,
    next: Option<SideRef>,
}

const NO_GEODESIC: usize = usize::MAX;

#[derive(Clone, Debug)]
struct Geodesic {
    glued: bool,
    dead: bool,
}

struct Builder<'a> {
    law: &'a EdgeLaw,
    profile: &'a GrowthProfile,
    tiles: Vec<Tile>,
    sides: Vec<[SideState; 6]>,
    geodesics: Vec<Geodesic>,
    adjacency: BTreeMap<(usize, usize), (usize, usize)>,
    windows: Vec<GluedWindow>,
    sheets: usize,
    /// Frontier queue keyed by distance bits (nonnegative, so the IEEE
    /// bit pattern orders like the value); entries go stale when a side
    /// is matched or its geodesic glued, and are dropped lazily.
    frontier: BinaryHeap<std::cmp::Reverse<(u64, usize, usize)>>,
}

impl<'a> Builder<'a> {
    fn new(law: &'a EdgeLaw, profile: &'a GrowthProfile) -> Builder<'a> {
        Builder {
            law,
            profile,
            tiles: Vec::new(),
            sides: Vec::new(),
            geodesics: Vec::new(),
            adjacency: BTreeMap::new(),
            windows: Vec::new(),
            sheets: 0,
            frontier: BinaryHeap::new(),
        }
    }

    fn side(&self, r: SideRef) -> &SideState {
        &self.sides[r.tile][r.slot]
    }

    fn side_mut(&mut self, r: SideRef) -> &mut SideState {
        &mut self.sides[r.tile][r.slot]
    }

    /// Realize and record a hexagon; registers all six sides, assigning
    /// every boundary side a fresh geodesic until links merge it.
    fn place_tile(
        &mut self,
        sheet: usize,
        address: String,
        lengths: [f64; 6],
        cross_slots: [usize; 3],
        anchor: &Isometry,
    ) -> Result<usize, TilerError> {
        if self.tiles.len() >= self.profile.max_tiles {
            return Err(TilerError::Cap(self.tiles.len()));
        }
        eprintln!(
            "place {} {} lens {:?} anchor_rel_defect {:.3e} norm {:.3e}",
            self.tiles.len(),
            address,
            lengths.map(|l| (l * 100.0).round() / 100.0),
            anchor.defect() / anchor.norm_sq(),
            anchor.norm_sq()
        );
        let placed = realize_right_polygon(&lengths, anchor)?;
        if placed.closure_defect > 1e-6 {
            return Err(TilerError::Defect {
                address,
                defect: placed.closure_defect,
            });
        }
        let id = self.tiles.len();
        let mut states: Vec<SideState> = Vec::with_capacity(6);
        for slot in 0..6 {
            let a = &placed.vertices[slot];
            let b = &placed.vertices[(slot + 1) % 6];
            let dist = if lengths[slot] < 1e-9 {
                Point::ORIGIN.dist(a)
            } else {
                dist_to_segment(&Point::ORIGIN, a, b)?
            };
            let kind = if cross_slots.contains(&slot) {
                SideKind::Cross
            } else {
                SideKind::Boundary
            };
            let geodesic = if kind == SideKind::Boundary {
                self.geodesics.push(Geodesic {
                    glued: false,
                    dead: false,
                });
                self.geodesics.len() - 1
            } else {
                NO_GEODESIC
            };
            self.frontier
                .push(std::cmp::Reverse((dist.to_bits(), id, slot)));
            states.push(SideState {
                kind,
                matched: None,
                geodesic,
                prev: None,
                next: None,
            });
        }
        self.sides.push(
            states
                .try_into()
                .map_err(|_| TilerError::Internal("side state arity".into()))?,
        );
        self.tiles.push(Tile {
            id,
            sheet,
            address,
            lengths,
            placement: *anchor,
            placed,
            cross_slots,
        });
        Ok(id)
    }

    /// Join two boundary sides as consecutive along their geodesic and
    /// merge the two geodesic records.
    fn link(&mut self, u: SideRef, w: SideRef) -> Result<(), TilerError> {
        if self.side(u).next.is_some() || self.side(w).prev.is_some() {
            return Err(TilerError::Internal(format!(
                "chain relink at {u:?} -> {w:?}"
            )));
        }
        self.side_mut(u).next = Some(w);
        self.side_mut(w).prev = Some(u);
        let gu = self.side(u).geodesic;
        let gw = self.side(w).geodesic;
        if gu == gw {
            return Ok(());
        }
        let (keep, drop) = if gu < gw { (gu, gw) } else { (gw, gu) };
        if self.geodesics[gu].glued && self.geodesics[gw].glued {
            return Err(TilerError::Internal(
                "two glued chains met on one geodesic".into(),
            ));
        }
        self.geodesics[keep].glued |= self.geodesics[drop].glued;
        self.geodesics[drop].dead = true;
        // relabel the chain that carried `drop`
        let start = if gu == drop { u } else { w };
        let mut cur = Some(start);
        while let Some(c) = cur {
            if self.side(c).geodesic != drop {
                break;
            }
            self.side_mut(c).geodesic = keep;
            cur = self.side(c).prev;
        }
        let mut cur = self.side(start).next;
        while let Some(c) = cur {
            if self.side(c).geodesic != drop {
                break;
            }
            self.side_mut(c).geodesic = keep;
            cur = self.side(c).next;
        }
        Ok(())
    }

    /// Record a matched cross-edge pair and link the flanking boundary
    /// sides, which become consecutive along their geodesics at the two
    /// shared endpoints.
    fn match_cross(&mut self, a: SideRef, b: SideRef) -> Result<(), TilerError> {
        self.side_mut(a).matched = Some(b);
        self.side_mut(b).matched = Some(a);
        self.adjacency.insert((a.tile, a.slot), (b.tile, b.slot));
        self.adjacency.insert((b.tile, b.slot), (a.tile, a.slot));
        let before_a = SideRef {
            tile: a.tile,
            slot: (a.slot + 5) % 6,
        };
        let after_a = SideRef {
            tile: a.tile,
            slot: (a.slot + 1) % 6,
        };
        let before_b = SideRef {
            tile: b.tile,
            slot: (b.slot + 5) % 6,
        };
        let after_b = SideRef {
            tile: b.tile,
            slot: (b.slot + 1) % 6,
        };
        self.link(before_a, after_b)?;
        self.link(before_b, after_a)?;
        Ok(())
    }

    /// Record a matched boundary pair (the two hexagons facing each other
    /// across a shared subdivision segment).
    fn match_boundary(&mut self, a: SideRef, b: SideRef) {
        self.side_mut(a).matched = Some(b);
        self.side_mut(b).matched = Some(a);
        self.adjacency.insert((a.tile, a.slot), (b.tile, b.slot));
        self.adjacency.insert((b.tile, b.slot), (a.tile, a.slot));
    }

    /// Attach the same-sheet neighbor across an open cross-edge, drawing
    /// its two new cross-edges independently from the law.
    fn expand_cross<R: rand::Rng>(
        &mut self,
        parent: SideRef,
        rng: &mut R,
    ) -> Result<usize, TilerError> {
        let shared = self.tiles[parent.tile].lengths[parent.slot];
        let d1 = self.law.sample(rng);
        let d2 = self.law.sample(rng);
        eprintln!("draw {d1:.4} {d2:.4} (shared {shared:.4})");
        let lengths = hexagon_from_alternate(shared, d1, d2)?;
        let anchor = glue_anchor(&self.tiles[parent.tile].placed, parent.slot)?;
        let digit = self.tiles[parent.tile]
            .cross_slots
            .iter()
            .position(|&s| s == parent.slot)
            .ok_or_else(|| TilerError::Internal("expand across a boundary side".into()))?;
        let address = format!("{}.{digit}", self.tiles[parent.tile].address);
        let sheet = self.tiles[parent.tile].sheet;
        let id = self.place_tile(sheet, address, lengths, [0, 2, 4], &anchor)?;
        self.match_cross(parent, SideRef { tile: id, slot: 0 })?;
        Ok(id)
    }

    /// Distance from the origin to the perpendicular to a boundary side's
    /// geodesic at the side's far (`forward`) or near endpoint. The
    /// perpendicular's pole is the geodesic's unit tangent there: the
    /// first frame column of the side pose, advanced by the side length
    /// for the far end.
    fn wall_dist(&self, r: SideRef, forward: bool) -> Result<f64, TilerError> {
        let t = &self.tiles[r.tile];
        let pose = if forward {
            t.placed.side_poses[r.slot]
                .compose(&Isometry::translation_x(t.lengths[r.slot])?)?
        } else {
            t.placed.side_poses[r.slot]
        };
        Ok(pose.row_major()[6].abs().asinh())
    }

    /// The chain neighbor of a boundary side along its geodesic, realizing
    /// the next same-sheet hexagon if the walk has not reached it yet.
    fn chain_step<R: rand::Rng>(
        &mut self,
        from: SideRef,
        forward: bool,
        rng: &mut R,
    ) -> Result<SideRef, TilerError> {
        let existing = if forward {
            self.side(from).next
        } else {
            self.side(from).prev
        };
        if let Some(n) = existing {
            return Ok(n);
        }
        let cross = SideRef {
            tile: from.tile,
            slot: if forward {
                (from.slot + 1) % 6
            } else {
                (from.slot + 5) % 6
            },
        };
        if self.side(cross).matched.is_some() {
            return Err(TilerError::Internal(
                "matched cross-edge with an unlinked boundary chain".into(),
            ));
        }
        self.expand_cross(cross, rng)?;
        let made = if forward {
            self.side(from).next
        } else {
            self.side(from).prev
        };
        made.ok_or_else(|| TilerError::Internal("expansion failed to extend the chain".into()))
    }

    /// Glue the facing layer of a fresh sheet along the geodesic through
    /// `pivot`, over a window covering the disk of `window_radius` plus
    /// `buffer` subdivision indices per side.
    fn glue_layer<R: rand::Rng>(&mut self, pivot: SideRef, rng: &mut R) -> Result<(), TilerError> {
        let g = self.side(pivot).geodesic;
        if self.geodesics[g].glued {
            return Err(TilerError::Internal("regluing a glued geodesic".into()));
        }
        // realize the near-side walk across the window
        let mut chain = std::collections::VecDeque::from([pivot]);
        for forward in [true, false] {
            let mut cur = pivot;
            let mut beyond = 0usize;
            while beyond < self.profile.buffer {
                if self.wall_dist(cur, forward)? > self.profile.window_radius {
                    beyond += 1;
                }
                cur = self.chain_step(cur, forward, rng)?;
                if forward {
                    chain.push_back(cur);
                } else {
                    chain.push_front(cur);
                }
            }
        }
        let window: Vec<SideRef> = chain.into();
        let m = window.len();
        let mut y = Vec::with_capacity(m);
        let mut near_x = Vec::with_capacity(m + 1);
        near_x.push(self.tiles[window[0].tile].lengths[(window[0].slot + 5) % 6]);
        for w in &window {
            y.push(self.tiles[w.tile].lengths[w.slot]);
            near_x.push(self.tiles[w.tile].lengths[(w.slot + 1) % 6]);
        }
        let far = resample_layer(
            &y,
            &near_x,
            self.profile.sweeps,
            self.law,
            &self.profile.grid,
            rng,
        )?;
        // realize the far layer, one hexagon per shared segment
        let sheet = self.sheets;
        self.sheets += 1;
        let pivot_pos = window
            .iter()
            .position(|w| *w == pivot)
            .ok_or_else(|| TilerError::Internal("pivot fell out of its window".into()))?;
        let mut prev_tile: Option<usize> = None;
        for (i, w) in window.iter().enumerate() {
            let hx = hexagon_from_alternate(far.x[i], far.z[i], far.x[i + 1])?;
            let lengths = [y[i], far.x[i], hx[1], far.z[i], hx[3], far.x[i + 1]];
            let anchor = glue_anchor(&self.tiles[w.tile].placed, w.slot)?;
            let address = format!("w{:+}", i as i64 - pivot_pos as i64);
            let id = self.place_tile(sheet, address, lengths, [1, 3, 5], &anchor)?;
            // the shared segment lies on the glued geodesic; adopt its id
            // before any link can see the fresh placeholder
            let fresh = self.side(SideRef { tile: id, slot: 0 }).geodesic;
            self.geodesics[fresh].dead = true;
            self.side_mut(SideRef { tile: id, slot: 0 }).geodesic = g;
            self.match_boundary(*w, SideRef { tile: id, slot: 0 });
            if let Some(p) = prev_tile {
                self.match_cross(SideRef { tile: p, slot: 5 }, SideRef { tile: id, slot: 1 })?;
            }
            prev_tile = Some(id);
        }
        self.geodesics[g].glued = true;
        self.windows.push(GluedWindow {
            geodesic: g,
            y,
            near_x,
            far_x: far.x,
            buffer: self.profile.buffer,
        });
        Ok(())
    }

    /// Pop the nearest live frontier side, dropping stale entries.
    fn pop_frontier(&mut self) -> Option<(f64, SideRef)> {
        while let Some(std::cmp::Reverse((bits, tile, slot))) = self.frontier.pop() {
            let r = SideRef { tile, slot };
            let s = self.side(r);
            if s.matched.is_some() {
                continue;
            }
            if s.kind == SideKind::Boundary && self.geodesics[s.geodesic].glued {
                continue;
            }
            return Some((f64::from_bits(bits), r));
        }
        None
    }
}

/// Draw a point uniformly with respect to hyperbolic area in a hexagon
/// realized with side 0 on the x-axis spine from the origin. Works in
/// Fermi coordinates over that side: `(s, t)` with area element
/// `cosh t ds dt`, where the region is `0 <= s <= l0`, `0 <= t <= h(s)`
/// and the height is cut by the three far sides (the two sides adjacent
/// to side 0 are the coordinate walls, by the right angles).
fn uniform_point_in_base_hexagon<R: rand::Rng>(
    placed: &PlacedPolygon,
    rng: &mut R,
) -> Result<Point, TilerError> {
    const GRID: usize = 1024;
    let l0 = placed.lengths[0];
    // unit spacelike poles of the far sides, oriented interior-positive
    let mut poles = Vec::with_capacity(3);
    for k in 2..5 {
        let a = &placed.vertices[k].0;
        let b = &placed.vertices[(k + 1) % 6].0;
        let mut n = [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            -(a[0] * b[1] - a[1] * b[0]),
        ];
        let s2 = n[0] * n[0] + n[1] * n[1] - n[2] * n[2];
        if !(s2 > 0.0) {
            return Err(TilerError::Internal("side pole not spacelike".into()));
        }
        let inv = 1.0 / s2.sqrt();
        for c in &mut n {
            *c *= inv;
        }
        let r = &placed.vertices[(k + 3) % 6].0;
        if r[0] * n[0] + r[1] * n[1] - r[2] * n[2] < 0.0 {
            for c in &mut n {
                *c = -*c;
            }
        }
        poles.push(n);
    }
    let height = |s: f64| -> f64 {
        let (sh, ch) = (s.sinh(), s.cosh());
        let mut h = f64::INFINITY;
        for n in &poles {
            // interior means cosh(t) * (-q) + n_y sinh(t) >= 0
            let q = n[2] * ch - n[0] * sh;
            if n[1] < 0.0 {
                let ratio = q / n[1];
                if ratio < 1.0 {
                    h = h.min(ratio.max(0.0).atanh());
                }
            }
        }
        h
    };
    let mut hs: Vec<f64> = Vec::with_capacity(GRID + 1);
    let mut cum: Vec<f64> = Vec::with_capacity(GRID + 1);
    let step = l0 / GRID as f64;
    let mut acc = 0.0;
    for i in 0..=GRID {
        let h = height(step * i as f64);
        if !h.is_finite() {
            return Err(TilerError::Internal("unbounded hexagon section".into()));
        }
        if i > 0 {
            acc += 0.5 * step * (hs[i - 1].sinh() + h.sinh());
        }
        hs.push(h);
        cum.push(acc);
    }
    if !(acc > 0.0) {
        return Err(TilerError::Internal("hexagon with empty interior".into()));
    }
    for _ in 0..256 {
        let target = crate::rng::uniform_open(rng) * acc;
        let j = cum.partition_point(|&c| c < target).clamp(1, GRID);
        let frac = (target - cum[j - 1]) / (cum[j] - cum[j - 1]).max(f64::MIN_POSITIVE);
        let s = step * (j as f64 - 1.0 + frac);
        let h = hs[j - 1] + (hs[j] - hs[j - 1]) * frac;
        let t = (crate::rng::uniform_open(rng) * h.sinh()).asinh();
        let p = Point([t.cosh() * s.sinh(), t.sinh(), t.cosh() * s.cosh()]);
        if placed.contains(&p, 0.0)? {
            return Ok(p);
        }
    }
    Err(TilerError::Internal(
        "interior sampling kept landing on the boundary".into(),
    ))
}

/// Grow a tiling from `law` until the closed disk of radius `r` around
/// the origin is enclosed by tiles. The first tile contains the origin at
/// a point drawn uniformly from its area, and the same seed yields the
/// same tiling, with larger radii extending smaller ones tile for tile.
pub fn grow_tiling(
    law: &EdgeLaw,
    r: f64,
    seed: u64,
    profile: &GrowthProfile,
) -> Result<Tiling, TilerError> {
    if !(r > 0.0 && r <= profile.window_radius) {
        return Err(TilerError::Radius(r));
    }
    let mut rng = crate::rng::stream(seed, &["tiling"]);
    let mut b = Builder::new(law, profile);

    // root hexagon with the origin at a uniform interior point
    let a0 = law.sample(&mut rng);
    let a1 = law.sample(&mut rng);
    let a2 = law.sample(&mut rng);
    let lengths = hexagon_from_alternate(a0, a1, a2)?;
    let local = realize_right_polygon(&lengths, &Isometry::IDENTITY)?;
    let p = uniform_point_in_base_hexagon(&local, &mut rng)?;
    let anchor = Isometry::point_translation(&p).inverse();
    b.sheets = 1;
    let root = b.place_tile(0, "r".into(), lengths, [0, 2, 4], &anchor)?;
    if !b.tiles[root].placed.contains(&Point::ORIGIN, -1e-9)? {
        return Err(TilerError::Internal(
            "origin escaped the root hexagon".into(),
        ));
    }

    while let Some((dist, side)) = b.pop_frontier() {
        if dist > r {
            break;
        }
        match b.side(side).kind {
            SideKind::Cross => {
                b.expand_cross(side, &mut rng)?;
            }
            SideKind::Boundary => {
                b.glue_layer(side, &mut rng)?;
            }
        }
    }

    Ok(Tiling {
        seed,
        spec: law.spec_string(),
        tiles: b.tiles,
        adjacency: b.adjacency,
        radius_certified: r,
        windows: b.windows,
    })
}

/// All sides equal to the fixed point of the alternate-to-opposite map,
/// `acosh 2`: gluing copies of that hexagon across every side tiles the
/// plane with four around each vertex.
pub const REGULAR_SIDE: f64 = 1.316_957_896_924_816_7;

/// Assemble the regular tiling out to (at least) disk radius `r` by
/// reflection-free gluing of one fixed hexagon shape across every side,
/// deduplicating tiles by center.
pub fn regular_tiling(r: f64) -> Result<Tiling, TilerError> {
    let lengths = [REGULAR_SIDE; 6];
    let center_of = |placed: &PlacedPolygon| -> Result<Point, TilerError> {
        let mut c = [0.0; 3];
        for v in &placed.vertices {
            for k in 0..3 {
                c[k] += v.0[k];
            }
        }
        let norm = (c[2] * c[2] - c[0] * c[0] - c[1] * c[1]).sqrt();
        if !(norm > 0.0) {
            return Err(TilerError::Internal("tile center not timelike".into()));
        }
        Ok(Point([c[0] / norm, c[1] / norm, c[2] / norm]))
    };
    let key_of = |p: &Point| -> (i64, i64) {
        let (u, v) = p.to_disk();
        ((u * 1e7).round() as i64, (v * 1e7).round() as i64)
    };
    let mut tiles: Vec<Tile> = Vec::new();
    let mut adjacency = BTreeMap::new();
    let mut seen: BTreeMap<(i64, i64), usize> = BTreeMap::new();
    let first = realize_right_polygon(&lengths, &Isometry::IDENTITY)?;
    let reach = first
        .vertices
        .iter()
        .map(|v| center_of(&first).map(|c| c.dist(v)))
        .try_fold(0.0f64, |m, d| d.map(|d| m.max(d)))?;
    let c0 = center_of(&first)?;
    seen.insert(key_of(&c0), 0);
    tiles.push(Tile {
        id: 0,
        sheet: 0,
        address: "g0".into(),
        lengths,
        placement: Isometry::IDENTITY,
        placed: first,
        cross_slots: [0, 2, 4],
    });
    let mut head = 0;
    while head < tiles.len() {
        for slot in 0..6 {
            if adjacency.contains_key(&(head, slot)) {
                continue;
            }
            let anchor = glue_anchor(&tiles[head].placed, slot)?;
            let placed = realize_right_polygon(&lengths, &anchor)?;
            let c = center_of(&placed)?;
            let id = match seen.get(&key_of(&c)) {
                Some(&id) => id,
                None => {
                    if Point::ORIGIN.dist(&c) > r + 2.0 * reach {
                        continue;
                    }
                    let id = tiles.len();
                    seen.insert(key_of(&c), id);
                    tiles.push(Tile {
                        id,
                        sheet: 0,
                        address: format!("g{id}"),
                        lengths,
                        placement: anchor,
                        placed,
                        cross_slots: [0, 2, 4],
                    });
                    id
                }
            };
            // find which of the neighbor's slots faces back
            let a = &tiles[head].placed.vertices[slot];
            let b = &tiles[head].placed.vertices[(slot + 1) % 6];
            let mut facing = None;
            for s in 0..6 {
                let na = &tiles[id].placed.vertices[s];
                let nb = &tiles[id].placed.vertices[(s + 1) % 6];
                if point_mismatch(a, nb) < 1e-6 && point_mismatch(b, na) < 1e-6 {
                    facing = Some(s);
                    break;
                }
            }
            let Some(s) = facing else {
                return Err(TilerError::Internal(
                    "regular neighbor shares no side".into(),
                ));
            };
            adjacency.insert((head, slot), (id, s));
            adjacency.insert((id, s), (head, slot));
        }
        head += 1;
    }
    Ok(Tiling {
        seed: 0,
        spec: "regular".into(),
        tiles,
        adjacency,
        radius_certified: r,
        windows: Vec::new(),
    })
}

/// Float error in a tile realized through a walk of the given reach;
/// audits widen their tolerances by this much.
fn placement_fuzz(walk_reach: f64) -> f64 {
    1e-13 * walk_reach
}

/// Covering audit: uniform hyperbolic-area points in the disk of radius
/// `r`, each required to lie in exactly one tile up to a hair's width of
/// its edges. The width scales with each tile's realization error, so a
/// genuine gap or overlap (tile-sized) always shows while float fuzz on
/// huge tiles does not.
#[derive(Clone, Debug)]
pub struct CoverReport {
    pub points: usize,
    /// Points in no tile even closed by the edge tolerance.
    pub uncovered: usize,
    /// Points strictly inside more than one tile.
    pub multi_covered: usize,
}

impl CoverReport {
    pub fn pass(&self) -> bool {
        self.uncovered == 0 && self.multi_covered == 0
    }
}

pub fn check_cover(t: &Tiling, r: f64, n: usize, seed: u64) -> Result<CoverReport, TilerError> {
    let mut rng = crate::rng::stream(seed, &["cover"]);
    let bands: Vec<f64> = t
        .tiles
        .iter()
        .map(|tile| 1e-7 + placement_fuzz(tile.placed.walk_reach))
        .collect();
    let mut uncovered = 0;
    let mut multi = 0;
    for _ in 0..n {
        let rad = (1.0 + crate::rng::uniform_open(&mut rng) * (r.cosh() - 1.0)).acosh();
        let theta = crate::rng::uniform_open(&mut rng) * std::f64::consts::TAU;
        let p = Point::from_polar(rad, theta);
        let mut strict = 0;
        let mut closed = 0;
        for (tile, band) in t.tiles.iter().zip(&bands) {
            if tile.placed.contains(&p, *band)? {
                strict += 1;
            }
            if tile.placed.contains(&p, -*band)? {
                closed += 1;
            }
        }
        if closed == 0 {
            uncovered += 1;
        }
        if strict > 1 {
            multi += 1;
        }
    }
    Ok(CoverReport {
        points: n,
        uncovered,
        multi_covered: multi,
    })
}

/// Edge-to-edge audit: every recorded adjacency shares its full segment,
/// and every vertex strictly inside the certified disk carries exactly
/// four right angles.
#[derive(Clone, Debug)]
pub struct EdgeToEdgeReport {
    pub shared_sides: usize,
    pub worst_endpoint: f64,
    pub worst_length: f64,
    pub vertices: usize,
    pub bad_vertices: usize,
    pub worst_angle: f64,
}

impl EdgeToEdgeReport {
    pub fn pass(&self) -> bool {
        self.worst_endpoint < 1e-6 && self.worst_length < 1e-6 && self.bad_vertices == 0
    }
}

pub fn check_edge_to_edge(t: &Tiling) -> Result<EdgeToEdgeReport, TilerError> {
    let mut worst_endpoint = 0.0f64;
    let mut worst_length = 0.0f64;
    let mut shared = 0;
    for (&(ta, sa), &(tb, sb)) in &t.adjacency {
        if (ta, sa) >= (tb, sb) {
            continue;
        }
        shared += 1;
        let a = &t.tiles[ta].placed;
        let b = &t.tiles[tb].placed;
        let e = point_mismatch(&a.vertices[sa], &b.vertices[(sb + 1) % 6])
            .max(point_mismatch(&a.vertices[(sa + 1) % 6], &b.vertices[sb]));
        worst_endpoint = worst_endpoint.max(e);
        let dl = (t.tiles[ta].lengths[sa] - t.tiles[tb].lengths[sb]).abs()
            / (1.0 + t.tiles[ta].lengths[sa]);
        worst_length = worst_length.max(dl);
    }
    // cluster the corners lying strictly inside the certified disk
    let mut corners: Vec<(Point, usize, usize)> = Vec::new();
    for tile in &t.tiles {
        for (k, v) in tile.placed.vertices.iter().enumerate() {
            if Point::ORIGIN.dist(v) < t.radius_certified {
                corners.push((v.clone(), tile.id, k));
            }
        }
    }
    let mut assigned = vec![usize::MAX; corners.len()];
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for i in 0..corners.len() {
        if assigned[i] != usize::MAX {
            continue;
        }
        let mut members = vec![i];
        assigned[i] = clusters.len();
        for j in (i + 1)..corners.len() {
            if assigned[j] == usize::MAX && point_mismatch(&corners[i].0, &corners[j].0) < 1e-6 {
                assigned[j] = clusters.len();
                members.push(j);
            }
        }
        clusters.push(members);
    }
    let mut bad = 0;
    let mut worst_angle = 0.0f64;
    let mut counted = 0;
    for members in &clusters {
        // a side below the merge tolerance would conflate two vertex
        // figures; skip such pinched clusters rather than miscount them
        let pinched = members.iter().any(|&i| {
            let (_, tile, k) = corners[i];
            let l = &t.tiles[tile].lengths;
            l[k] < 1e-6 || l[(k + 5) % 6] < 1e-6
        });
        if pinched {
            continue;
        }
        counted += 1;
        if members.len() != 4 {
            bad += 1;
            continue;
        }
        for &i in members {
            let (ref v, tile, k) = corners[i];
            let p = &t.tiles[tile].placed;
            let ang = angle_at(&p.vertices[(k + 5) % 6], v, &p.vertices[(k + 1) % 6]);
            worst_angle = worst_angle.max((ang - std::f64::consts::FRAC_PI_2).abs());
        }
    }
    Ok(EdgeToEdgeReport {
        shared_sides: shared,
        worst_endpoint,
        worst_length,
        vertices: counted,
        bad_vertices: bad,
        worst_angle,
    })
}

/// Per-geodesic thickness data: decreasing runs of cross-edges are what
/// could pinch a tiling shut, and reversibility makes long ones rare.
#[derive(Clone, Debug)]
pub struct ThicknessReport {
    pub geodesics: usize,
    pub min_cross: f64,
    /// `counts[k]` = number of strictly decreasing streaks reaching at
    /// least `k + 1` steps, over all monitored sequences.
    pub down_run_counts: Vec<usize>,
    /// (rises, comparable pairs) over consecutive cross-edges.
    pub up_pairs: (usize, usize),
    /// Longest strictly decreasing step run per glued geodesic.
    pub longest_runs: Vec<usize>,
}

pub fn thickness_monitor(t: &Tiling) -> ThicknessReport {
    const MAX_RUN: usize = 8;
    let mut counts = vec![0usize; MAX_RUN];
    let mut ups = 0;
    let mut pairs = 0;
    let mut min_cross = f64::INFINITY;
    let mut longest = Vec::with_capacity(t.windows.len());
    for w in &t.windows {
        let mut geod_longest = 0usize;
        for seq in [&w.near_x, &w.far_x] {
            for v in seq {
                min_cross = min_cross.min(*v);
            }
            for p in seq.windows(2) {
                pairs += 1;
                if p[1] > p[0] {
                    ups += 1;
                }
            }
            // a streak of `s` consecutive falls contributes one run of
            // each length up to `s`
            let mut streak = 0usize;
            for p in seq.windows(2) {
                if p[1] < p[0] {
                    streak += 1;
                    geod_longest = geod_longest.max(streak);
                    if streak <= MAX_RUN {
                        counts[streak - 1] += 1;
                    }
                } else {
                    streak = 0;
                }
            }
        }
        longest.push(geod_longest);
    }
    ThicknessReport {
        geodesics: t.windows.len(),
        min_cross,
        down_run_counts: counts,
        up_pairs: (ups, pairs),
        longest_runs: longest,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{binomial_two_sided, ks_two_sample};

    fn law() -> EdgeLaw {
        EdgeLaw::Stationary
    }

    fn quick_profile() -> GrowthProfile {
        GrowthProfile {
            sweeps: 16,
            ..GrowthProfile::default()
        }
    }

    #[test]
    fn radius_bounds_are_enforced() {
        let p = GrowthProfile::default();
        assert!(matches!(
            grow_tiling(&law(), 0.0, 1, &p),
            Err(TilerError::Radius(_))
        ));
        assert!(matches!(
            grow_tiling(&law(), 12.5, 1, &p),
            Err(TilerError::Radius(_))
        ));
    }

    #[test]
    fn tile_cap_aborts_growth() {
        let p = GrowthProfile {
            max_tiles: 3,
            ..GrowthProfile::default()
        };
        assert!(matches!(
            grow_tiling(&law(), 2.0, 5, &p),
            Err(TilerError::Cap(_))
        ));
    }

    #[test]
    fn same_seed_same_tiling() {
        let p = quick_profile();
        let a = grow_tiling(&law(), 1.0, 42, &p).unwrap();
        let b = grow_tiling(&law(), 1.0, 42, &p).unwrap();
        assert_eq!(a.tiles.len(), b.tiles.len());
        assert_eq!(a.adjacency, b.adjacency);
        for (ta, tb) in a.tiles.iter().zip(&b.tiles) {
            assert_eq!(ta.lengths, tb.lengths);
            assert_eq!(ta.placement.row_major(), tb.placement.row_major());
            assert_eq!(ta.address, tb.address);
        }
    }

    #[test]
    fn growth_is_monotone_in_radius() {
        let p = quick_profile();
        let small = grow_tiling(&law(), 0.8, 7, &p).unwrap();
        let big = grow_tiling(&law(), 1.6, 7, &p).unwrap();
        assert!(small.tiles.len() <= big.tiles.len());
        for (ts, tb) in small.tiles.iter().zip(&big.tiles) {
            assert_eq!(ts.lengths, tb.lengths);
            assert_eq!(ts.placement.row_major(), tb.placement.row_major());
        }
        for (k, v) in &small.adjacency {
            assert_eq!(big.adjacency.get(k), Some(v));
        }
    }

    #[test]
    fn origin_sits_in_the_root_tile() {
        let p = quick_profile();
        for seed in 0..8 {
            let t = grow_tiling(&law(), 0.5, seed, &p).unwrap();
            assert!(t.tiles[0].placed.contains(&Point::ORIGIN, -1e-9).unwrap());
        }
    }

    #[test]
    fn certificates_pass_and_catch_sabotage() {
        let p = quick_profile();
        let t = grow_tiling(&law(), 1.5, 11, &p).unwrap();
        assert!(t.tiles.len() > 20, "only {} tiles", t.tiles.len());

        let cover = check_cover(&t, 1.5, 1500, 99).unwrap();
        assert!(
            cover.pass(),
            "uncovered {} multi {}",
            cover.uncovered,
            cover.multi_covered
        );
        let edges = check_edge_to_edge(&t).unwrap();
        assert!(
            edges.pass(),
            "endpoint {:.2e} length {:.2e} bad vertices {}",
            edges.worst_endpoint,
            edges.worst_length,
            edges.bad_vertices
        );
        assert!(edges.vertices > 10);
        assert!(edges.worst_angle < 1e-6);

        // deleting the origin tile leaves a visible hole
        let mut holed = t.clone();
        holed.tiles.remove(0);
        let report = check_cover(&holed, 1.5, 1500, 99).unwrap();
        assert!(report.uncovered > 0);

        // nudging one tile breaks shared edges
        let mut skewed = t.clone();
        let nudge = skewed.tiles[0]
            .placement
            .compose(&Isometry::translation_x(1e-3).unwrap())
            .unwrap();
        skewed.tiles[0].placed = realize_right_polygon(&skewed.tiles[0].lengths, &nudge).unwrap();
        let report = check_edge_to_edge(&skewed).unwrap();
        assert!(!report.pass());
    }

    #[test]
    fn regular_tiling_is_exact() {
        // the all-equal hexagon is the fixed point of completion
        let hx = hexagon_from_alternate(REGULAR_SIDE, REGULAR_SIDE, REGULAR_SIDE).unwrap();
        for l in hx {
            assert!((l - REGULAR_SIDE).abs() < 1e-12, "{l}");
        }
        let t = regular_tiling(1.8).unwrap();
        assert!(t.tiles.len() >= 10);
        let edges = check_edge_to_edge(&t).unwrap();
        assert!(
            edges.pass(),
            "endpoint {:.2e} bad {}",
            edges.worst_endpoint,
            edges.bad_vertices
        );
        let cover = check_cover(&t, 1.8, 1000, 3).unwrap();
        assert!(cover.pass());
    }

    // One grown ensemble feeds every distributional check: the glued
    // layers' cross-edges keep the generative law, rises and falls along
    // geodesics stay balanced, decreasing runs die off geometrically,
    // and reading boundaries backwards changes nothing.
    #[test]
    fn ensemble_statistics_match_the_construction() {
        let p = quick_profile();
        let mut far_interior = Vec::new();
        let mut diffs_a = Vec::new();
        let mut diffs_b = Vec::new();
        let mut ups = 0usize;
        let mut pairs = 0usize;
        let mut counts = [0usize; 4];
        let mut min_cross = f64::INFINITY;
        for seed in 100..125 {
            let t = grow_tiling(&law(), 1.5, seed, &p).unwrap();
            let th = thickness_monitor(&t);
            assert!(th.min_cross > 0.0);
            min_cross = min_cross.min(th.min_cross);
            ups += th.up_pairs.0;
            pairs += th.up_pairs.1;
            for k in 0..4 {
                counts[k] += th.down_run_counts[k];
            }
            for (wi, w) in t.windows.iter().enumerate() {
                // thin to every third interior value to blunt the chain
                // correlation along each geodesic
                for v in w.trusted_far().iter().step_by(3) {
                    far_interior.push(*v);
                }
                let seq = &w.far_x[w.buffer..w.far_x.len() - w.buffer];
                for q in seq.windows(2) {
                    if wi % 2 == 0 {
                        diffs_a.push(q[1] - q[0]);
                    } else {
                        diffs_b.push(q[0] - q[1]);
                    }
                }
            }
        }
        assert!(min_cross > 0.0);

        // balance of rises and falls along geodesics
        let bin = binomial_two_sided(ups, pairs, 0.5);
        assert!(bin > 1e-4, "p(up) imbalance: {ups}/{pairs}, p={bin:.2e}");

        // decreasing runs decay at least geometrically (ratio 1/2 in law)
        for k in 0..3 {
            let ratio = counts[k + 1] as f64 / counts[k].max(1) as f64;
            assert!(
                ratio < 0.62,
                "run decay ratio {ratio:.3} at k={k} ({counts:?})"
            );
        }

        // glued interior cross-edges keep the generative law
        let mut rng = crate::rng::stream(9, &["ensemble-ref"]);
        let reference: Vec<f64> = (0..far_interior.len().max(2000))
            .map(|_| law().sample(&mut rng))
            .collect();
        let ks = ks_two_sample(&far_interior, &reference);
        assert!(
            ks.p_value > 1e-3,
            "far-layer law drift: D={:.4}, p={:.2e}, n={}",
            ks.statistic,
            ks.p_value,
            far_interior.len()
        );

        // difference law is symmetric under reversing the reading order
        let ks = ks_two_sample(&diffs_a, &diffs_b);
        assert!(
            ks.p_value > 1e-3,
            "orientation asymmetry: D={:.4}, p={:.2e}",
            ks.statistic,
            ks.p_value
        );
    }
}
