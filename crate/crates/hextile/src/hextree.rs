//! Trees of hexagons glued along alternating cross-edges.
//!
//! A hextree assigns an independent random length to every edge of a
//! 3-regular tree; the hexagon at a vertex takes its three incident edge
//! lengths as alternate sides, and neighboring hexagons are glued along
//! the shared cross-edge. [`boundary_layer`] walks one boundary geodesic
//! of the truncated tree and extracts the `(x, y, z)` side sequences that
//! the conditional resampler operates on.
//!
//! Edge lengths are a pure hash of `(seed, edge label)`, so deepening the
//! truncation never changes lengths already drawn.

use std::collections::BTreeMap;

use crate::geom::{realize_right_polygon, GeomError, Isometry, PlacedPolygon, Point};
use crate::measures::EdgeLaw;
use crate::polygons::{hexagon_from_alternate, PolyError};

#[derive(Debug, thiserror::Error)]
pub enum HextreeError {
    #[error("invalid tree address '{0}'")]
    BadAddress(String),
    #[error("address '{0}' is outside the built tree")]
    OutsideTruncation(String),
    #[error("boundary window of {requested} hexagons needs tree depth {needed}, have {depth}")]
    Window {
        requested: usize,
        needed: usize,
        depth: usize,
    },
    #[error("gluing defect {defect:.3e} at tile '{address}'")]
    Defect { address: String, defect: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

/// Position in the 3-regular tree: a digit string from the root. The root
/// (empty path) has children `0`, `1`, `2`; every other vertex reaches its
/// two children by digits `0` and `1` (the third neighbor is its parent).
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeAddress {
    path: String,
}

impl std::fmt::Debug for TreeAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TreeAddress({:?})", self.path)
    }
}

impl std::fmt::Display for TreeAddress {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.path.is_empty() {
            f.write_str("(root)")
        } else {
            f.write_str(&self.path)
        }
    }
}

impl TreeAddress {
    pub fn root() -> TreeAddress {
        TreeAddress {
            path: String::new(),
        }
    }

    pub fn parse(path: &str) -> Result<TreeAddress, HextreeError> {
        let mut chars = path.chars();
        if let Some(first) = chars.next() {
            if !matches!(first, '0' | '1' | '2') {
                return Err(HextreeError::BadAddress(path.to_string()));
            }
            if !chars.all(|c| matches!(c, '0' | '1')) {
                return Err(HextreeError::BadAddress(path.to_string()));
            }
        }
        Ok(TreeAddress {
            path: path.to_string(),
        })
    }

    pub fn is_root(&self) -> bool {
        self.path.is_empty()
    }

    /// Distance to the root.
    pub fn depth(&self) -> usize {
        self.path.len()
    }

    pub fn as_str(&self) -> &str {
        &self.path
    }

    pub fn degree(&self) -> usize {
        if self.is_root() {
            3
        } else {
            2
        }
    }

    pub fn child(&self, digit: usize) -> Result<TreeAddress, HextreeError> {
        if digit >= self.degree() {
            return Err(HextreeError::BadAddress(format!("{}{digit}", self.path)));
        }
        let mut path = self.path.clone();
        path.push(char::from(b'0' + digit as u8));
        Ok(TreeAddress { path })
    }

    pub fn parent(&self) -> Option<TreeAddress> {
        if self.is_root() {
            None
        } else {
            Some(TreeAddress {
                path: self.path[..self.path.len() - 1].to_string(),
            })
        }
    }

    /// Hexagon side index carrying the edge to child `digit`: the root uses
    /// cross-slots 0, 2, 4 for its three children; elsewhere slot 0 holds
    /// the parent edge and slots 2, 4 the children.
    pub fn child_side(&self, digit: usize) -> usize {
        if self.is_root() {
            2 * digit
        } else {
            2 + 2 * digit
        }
    }
}

/// A truncated random hextree: every tree edge incident to a vertex within
/// `depth` of the root carries a length drawn from the edge law.
pub struct Hextree {
    law: EdgeLaw,
    seed: u64,
    depth: usize,
    lengths: BTreeMap<String, f64>,
}

/// The length of the edge from `child.parent()` to `child`, as a pure
/// function of the seed and the canonical edge label.
fn derive_length(law: &EdgeLaw, seed: u64, child: &TreeAddress) -> f64 {
    let parent = child.parent().expect("edges are keyed by the child end");
    let u = crate::rng::unit_hash(seed, &["edge", parent.as_str(), child.as_str()]);
    law.quantile(u)
}

impl Hextree {
    pub fn build(law: EdgeLaw, depth: usize, seed: u64) -> Hextree {
        let mut lengths = BTreeMap::new();
        let mut frontier = vec![TreeAddress::root()];
        while let Some(v) = frontier.pop() {
            for digit in 0..v.degree() {
                let c = v.child(digit).expect("digit in range");
                lengths.insert(
                    c.as_str().to_string(),
                    derive_length(&law, seed, &c),
                );
                if c.depth() <= depth {
                    frontier.push(c);
                }
            }
        }
        Hextree {
            law,
            seed,
            depth,
            lengths,
        }
    }

    pub fn law(&self) -> &EdgeLaw {
        &self.law
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Stored length of the edge ending at `child`.
    pub fn edge_length(&self, child: &TreeAddress) -> Option<f64> {
        self.lengths.get(child.as_str()).copied()
    }

    /// All stored edges as `(child address, length)`, in address order.
    pub fn edges(&self) -> impl Iterator<Item = (&str, f64)> {
        self.lengths.iter().map(|(k, &v)| (k.as_str(), v))
    }

    /// Vertices whose hexagons are materialized (all within `depth`).
    pub fn vertices(&self) -> Vec<TreeAddress> {
        let mut out = vec![TreeAddress::root()];
        let mut i = 0;
        while i < out.len() {
            let v = out[i].clone();
            if v.depth() < self.depth {
                for digit in 0..v.degree() {
                    out.push(v.child(digit).expect("digit in range"));
                }
            }
            i += 1;
        }
        out
    }

    /// The three incident edge lengths of `v`, in hexagon cross-slot order
    /// (sides 0, 2, 4).
    pub fn cross_lengths(&self, v: &TreeAddress) -> Result<[f64; 3], HextreeError> {
        let missing = || HextreeError::OutsideTruncation(v.as_str().to_string());
        if v.is_root() {
            Ok([
                self.edge_length(&v.child(0)?).ok_or_else(missing)?,
                self.edge_length(&v.child(1)?).ok_or_else(missing)?,
                self.edge_length(&v.child(2)?).ok_or_else(missing)?,
            ])
        } else {
            Ok([
                self.edge_length(v).ok_or_else(missing)?,
                self.edge_length(&v.child(0)?).ok_or_else(missing)?,
                self.edge_length(&v.child(1)?).ok_or_else(missing)?,
            ])
        }
    }

    /// All six side lengths of the hexagon at `v`.
    pub fn hexagon_lengths(&self, v: &TreeAddress) -> Result<[f64; 6], HextreeError> {
        let [a, b, c] = self.cross_lengths(v)?;
        Ok(hexagon_from_alternate(a, b, c)?)
    }
}

/// One realized hexagon of a hextree.
pub struct PlacedHex {
    pub address: TreeAddress,
    pub lengths: [f64; 6],
    pub placed: PlacedPolygon,
}

/// Scale-aware coordinate mismatch between two points (hyperbolic distance
/// loses resolution far from the origin, coordinates do not).
pub fn point_mismatch(a: &Point, b: &Point) -> f64 {
    let scale = 1.0 + a.0[2].abs().max(b.0[2].abs());
    (0..3)
        .map(|k| (a.0[k] - b.0[k]).abs())
        .fold(0.0f64, f64::max)
        / scale
}

/// Frame for gluing a neighbor across side `side` of `placed`: positioned
/// at the far endpoint of the side, pointing back along it, so a polygon
/// realized from it shares the side with opposite orientation.
pub fn glue_anchor(placed: &PlacedPolygon, side: usize) -> Result<Isometry, GeomError> {
    let step = Isometry::translation_x(placed.lengths[side])?;
    placed.side_poses[side]
        .compose(&step)?
        .compose(&Isometry::rotation(std::f64::consts::PI))
}

/// Realize every hexagon of the truncated tree, gluing children across the
/// shared cross-edges. Fails if any closure or shared-edge defect exceeds
/// 1e-6.
pub fn realize_hextree(
    h: &Hextree,
    anchor: &Isometry,
) -> Result<Vec<PlacedHex>, HextreeError> {
    let mut out: Vec<PlacedHex> = Vec::new();
    // queue of (vertex, anchor for its realization)
    let mut queue: Vec<(TreeAddress, Isometry)> = vec![(TreeAddress::root(), anchor.clone())];
    while let Some((v, frame)) = queue.pop() {
        let lengths = h.hexagon_lengths(&v)?;
        let placed = realize_right_polygon(&lengths, &frame)?;
        if placed.closure_defect > 1e-6 {
            return Err(HextreeError::Defect {
                address: v.as_str().to_string(),
                defect: placed.closure_defect,
            });
        }
        if v.depth() < h.depth {
            for digit in 0..v.degree() {
                let side = v.child_side(digit);
                let child = v.child(digit)?;
                queue.push((child, glue_anchor(&placed, side)?));
            }
        }
        out.push(PlacedHex {
            address: v,
            lengths,
            placed,
        });
        }
    // shared-edge certificate: each non-root hexagon's side 0 must coincide
    // with its parent's gluing side, traversed backwards
    let index: BTreeMap<&str, usize> = out
        .iter()
        .enumerate()
        .map(|(i, ph)| (ph.address.as_str(), i))
        .collect();
    for i in 0..out.len() {
        let Some(parent) = out[i].address.parent() else {
            continue;
        };
        let child = &out[i];
        let p = &out[*index.get(parent.as_str()).expect("parent realized")];
        let last = child.address.as_str().len() - 1;
        let digit = (child.address.as_str().as_bytes()[last] - b'0') as usize;
        let side = parent.child_side(digit);
        let pa = &p.placed.vertices[side];
        let pb = &p.placed.vertices[(side + 1) % 6];
        let ca = &child.placed.vertices[0];
        let cb = &child.placed.vertices[1];
        let defect = point_mismatch(pb, ca).max(point_mismatch(pa, cb));
        if defect > 1e-7 {
            return Err(HextreeError::Defect {
                address: child.address.as_str().to_string(),
                defect,
            });
        }
    }
    Ok(out)
}

/// Side data of one boundary geodesic of a hextree: hexagon `i` of the walk
/// contributes three consecutive sides `(x[i], y[i], x[i+1])`, with `y[i]`
/// lying on the geodesic and the cross-edge `z[i]` opposite it.
#[derive(Clone, Debug)]
pub struct BoundaryLayer {
    /// Perpendicular cross-edges; `x[i]` precedes hexagon `i` (length m+1).
    pub x: Vec<f64>,
    /// Boundary edges on the geodesic (length m).
    pub y: Vec<f64>,
    /// Deep cross-edges behind each hexagon (length m).
    pub z: Vec<f64>,
}

impl BoundaryLayer {
    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    /// Check the defining relation between the three side sequences: the
    /// hexagon on alternates `(x[i], z[i], x[i+1])` must present `y[i]`
    /// as the side between the two cross-edges. (Checked in this forward
    /// direction because recovering `z` from `y` amplifies rounding by
    /// the inverse completion Jacobian when `z` is small.)
    pub fn validate(&self) -> Result<(), HextreeError> {
        assert_eq!(self.x.len(), self.y.len() + 1);
        assert_eq!(self.z.len(), self.y.len());
        for i in 0..self.y.len() {
            let hex = hexagon_from_alternate(self.x[i], self.z[i], self.x[i + 1])?;
            let err = (hex[5] - self.y[i]).abs() / (1.0 + self.y[i]);
            if err > 1e-9 {
                return Err(HextreeError::Defect {
                    address: format!("layer site {i}"),
                    defect: err,
                });
            }
        }
        Ok(())
    }
}

/// Draw a boundary layer directly from the generative law: cross-edges
/// `x` and deep edges `z` i.i.d. from the edge law, boundary sides `y`
/// derived. Distributed exactly as [`boundary_layer`] of a random hextree.
pub fn sample_layer<R: rand::Rng>(
    law: &EdgeLaw,
    m: usize,
    rng: &mut R,
) -> Result<BoundaryLayer, HextreeError> {
    let x: Vec<f64> = (0..=m).map(|_| law.sample(rng)).collect();
    let z: Vec<f64> = (0..m).map(|_| law.sample(rng)).collect();
    let mut y = Vec::with_capacity(m);
    for i in 0..m {
        y.push(hexagon_from_alternate(x[i], z[i], x[i + 1])?[5]);
    }
    Ok(BoundaryLayer { x, y, z })
}

/// Addresses of the hexagons met by the canonical boundary walk: the root
/// entered across its child-2 edge, then descending the all-0 branch.
pub fn boundary_walk_addresses(m: usize) -> Vec<TreeAddress> {
    (0..m)
        .map(|i| TreeAddress {
            path: "0".repeat(i),
        })
        .collect()
}

/// Extract `m` hexagons of boundary data along the canonical boundary
/// geodesic (see [`boundary_walk_addresses`]).
pub fn boundary_layer(h: &Hextree, m: usize) -> Result<BoundaryLayer, HextreeError> {
    if m == 0 {
        return Ok(BoundaryLayer {
            x: vec![0.0; 1],
            y: Vec::new(),
            z: Vec::new(),
        });
    }
    if m > h.depth() + 1 {
        return Err(HextreeError::Window {
            requested: m,
            needed: m - 1,
            depth: h.depth(),
        });
    }
    let mut x = Vec::with_capacity(m + 1);
    let mut y = Vec::with_capacity(m);
    let mut z = Vec::with_capacity(m);
    for (i, v) in boundary_walk_addresses(m).iter().enumerate() {
        let hex = h.hexagon_lengths(v)?;
        if i == 0 {
            // entered across side 4 (child 2), exits side 0 (child 0):
            // boundary side 5, deep edge opposite it is side 2
            x.push(hex[4]);
            y.push(hex[5]);
            z.push(hex[2]);
            x.push(hex[0]);
        } else {
            // entered across side 0 (parent), exits side 2 (child 0)
            y.push(hex[1]);
            z.push(hex[4]);
            x.push(hex[2]);
        }
    }
    Ok(BoundaryLayer { x, y, z })
}
