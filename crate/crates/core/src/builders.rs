//! Canonical example surfaces: the square torus, dilation cylinders of a
//! prescribed angular extent, and the two-chamber surface.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::ParamOutOfRange;
use crate::geom::PlanarPoint;
use crate::math;
use crate::surface::{EdgeRef, Surface, SurfaceSpec};

fn reject(what: impl core::fmt::Display) -> ParamOutOfRange {
    ParamOutOfRange { what: format!("{what}") }
}

/// Unit square with opposite sides glued by translations: the square torus,
/// genus 1, one marked point. A translation surface; it never carries a
/// hyperbolic closed geodesic.
pub fn build_torus() -> Result<Surface, ParamOutOfRange> {
    let spec = SurfaceSpec {
        polygons: vec![vec![
            PlanarPoint::new(0.0, 0.0),
            PlanarPoint::new(1.0, 0.0),
            PlanarPoint::new(1.0, 1.0),
            PlanarPoint::new(0.0, 1.0),
        ]],
        pairings: vec![
            (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
            (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
        ],
        marked_points: vec![(0, 0)],
    };
    Ok(Surface::validate(spec).expect("torus construction is always valid"))
}

/// Dilation cylinder of inner/outer ratio `rho` and angular extent `alpha`.
///
/// Realized as a chain of quadrilateral wedges between radii `rho` and `1`:
/// wedge `j` spans angles `[jα/m, (j+1)α/m]`, its outer chord is glued to its
/// inner chord by `z ↦ ρz`, and consecutive wedges share their radial edge.
/// The radial edges at angles `0` and `α` stay unglued: they are the two
/// boundary saddle connections. Every direction `β ∈ (0, α)` traps the flow
/// onto the closed geodesic through the ray at angle `β`, with contraction
/// factor `ρ` per turn.
///
/// `alpha` may exceed π (up to, excluding, 2π); the wedge chain keeps the
/// charts embeddable while the developed sector wraps as far as needed.
pub fn build_dilation_cylinder(rho: f64, alpha: f64) -> Result<Surface, ParamOutOfRange> {
    if !(rho.is_finite() && 0.0 < rho && rho < 1.0) {
        return Err(reject(format!("rho must lie in (0, 1), got {rho}")));
    }
    if !(alpha.is_finite() && 0.0 < alpha && alpha < math::TAU) {
        return Err(reject(format!("alpha must lie in (0, 2π), got {alpha}")));
    }

    let m = (alpha / (math::PI / 2.0)) as usize + 1;
    let step = alpha / m as f64;
    let dir = |theta: f64| (math::cos(theta), math::sin(theta));

    let mut polygons = Vec::with_capacity(m);
    let mut pairings = Vec::new();
    for j in 0..m {
        let (c0, s0) = dir(j as f64 * step);
        let (c1, s1) = dir((j + 1) as f64 * step);
        polygons.push(vec![
            PlanarPoint::new(c0, s0),
            PlanarPoint::new(c1, s1),
            PlanarPoint::new(rho * c1, rho * s1),
            PlanarPoint::new(rho * c0, rho * s0),
        ]);
        // Outer chord to inner chord by z ↦ ρz.
        pairings.push((EdgeRef::new(j, 0), EdgeRef::new(j, 2)));
        // Shared radial edge with the next wedge (identity gluing).
        if j + 1 < m {
            pairings.push((EdgeRef::new(j, 1), EdgeRef::new(j + 1, 3)));
        }
    }
    let marked_points = (1..m).map(|j| (j, 0)).collect();

    let spec = SurfaceSpec { polygons, pairings, marked_points };
    Ok(Surface::validate(spec).expect("wedge chain construction is always valid"))
}

/// Parameters of the two-chamber surface; see [`build_two_chamber`].
#[derive(Clone, Copy, Debug)]
pub struct TwoChamberParams {
    /// Contraction of the first handle gluing of each chamber (> 1).
    pub ratio_a: f64,
    /// Contraction of the second handle gluing of each chamber (> 1).
    pub ratio_b: f64,
    /// Size of the second chamber relative to the first (> 0); it is also the
    /// dilation ratio of the gluing along the connecting slit.
    pub scale: f64,
}

impl Default for TwoChamberParams {
    fn default() -> Self {
        Self { ratio_a: 2.0, ratio_b: 2.0, scale: 1.0 }
    }
}

/// A two-chamber surface together with its designated separating slit.
#[derive(Clone, Debug)]
pub struct TwoChamber {
    pub surface: Surface,
    /// The slit edge (as seen from chamber A); cutting the surface along this
    /// saddle connection disconnects it into the two chambers.
    pub designated_edge: EdgeRef,
}

/// Closed genus-two surface made of two pentagon "chambers" joined along one
/// slit.
///
/// Each pentagon carries the edge word a b a⁻¹ b⁻¹ ℓ: the first four sides are
/// glued in opposite pairs with dilation ratios `ratio_a` and `ratio_b`
/// (a handle with one boundary slit ℓ), and the two slits are glued to each
/// other across the chambers. All ten corners meet in a single interior
/// singularity of cone angle 6π (index 3), and the slit is a saddle
/// connection from that point to itself whose complement is disconnected —
/// no trajectory can cross it twice.
pub fn build_two_chamber(params: TwoChamberParams) -> Result<TwoChamber, ParamOutOfRange> {
    let TwoChamberParams { ratio_a: p, ratio_b: q, scale: s } = params;
    if !(p.is_finite() && p > 1.0) {
        return Err(reject(format!("ratio_a must be > 1, got {p}")));
    }
    if !(q.is_finite() && q > 1.0) {
        return Err(reject(format!("ratio_b must be > 1, got {q}")));
    }
    if !(s.is_finite() && s > 0.0) {
        return Err(reject(format!("scale must be > 0, got {s}")));
    }

    // Chamber A: edge vectors (1,0), (0,1), -p(1,0), -q(0,1); the slit edge
    // closes the loop with vector (p-1, q-1).
    let a: Vec<PlanarPoint> = vec![
        PlanarPoint::new(0.0, 0.0),
        PlanarPoint::new(1.0, 0.0),
        PlanarPoint::new(1.0, 1.0),
        PlanarPoint::new(1.0 - p, 1.0),
        PlanarPoint::new(1.0 - p, 1.0 - q),
    ];
    // Chamber B is the image of A under z ↦ c - s·z (rotation by π and scale),
    // which keeps the orientation and makes the two slits anti-parallel.
    let shift = 2.0 + s * p;
    let b: Vec<PlanarPoint> =
        a.iter().map(|v| PlanarPoint::new(shift - s * v.x, -s * v.y)).collect();

    let spec = SurfaceSpec {
        polygons: vec![a, b],
        pairings: vec![
            (EdgeRef::new(0, 0), EdgeRef::new(0, 2)),
            (EdgeRef::new(0, 1), EdgeRef::new(0, 3)),
            (EdgeRef::new(1, 0), EdgeRef::new(1, 2)),
            (EdgeRef::new(1, 1), EdgeRef::new(1, 3)),
            (EdgeRef::new(0, 4), EdgeRef::new(1, 4)),
        ],
        marked_points: vec![],
    };
    let surface = Surface::validate(spec).expect("pentagon pair construction is always valid");
    Ok(TwoChamber { surface, designated_edge: EdgeRef::new(0, 4) })
}
