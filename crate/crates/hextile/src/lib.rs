//! Isometry-invariant random tilings of the hyperbolic plane by
//! right-angled hexagons, with the sampling, resampling, and verification
//! machinery needed to build and audit them.
//!
//! The crate is organized bottom-up:
//!
//! - [`geom`]: hyperboloid-model points, isometries, geodesics, and
//!   right-angled polygon realization;
//! - [`polygons`]: the side-length relations of right-angled hexagons,
//!   pentagons, and octagons;
//! - [`measures`]: the edge-length laws, including the distinguished
//!   stationary one, and exact samplers for them;
//! - [`hextree`]: random trees of hexagons glued edge-to-edge along a
//!   trivalent tree;
//! - [`resample`]: heat-bath resampling of cross-edge lengths between
//!   adjacent layers;
//! - [`tiler`]: growth of a tiling covering a disk, plus the geometric
//!   certificates that audit it;
//! - [`pentatile`]: the right-angled pentagon variant built from a
//!   four-valent tree of octagons;
//! - [`stats`]: the statistical test kit used by the verification suite.

pub mod geom;
pub mod hextree;
pub mod measures;
pub mod polygons;
pub mod quad;
pub mod resample;
pub mod rng;
pub mod special;
pub mod stats;
pub mod tiler;
