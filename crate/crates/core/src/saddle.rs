//! Saddle connections: geodesic segments joining two vertex classes.
//!
//! Enumeration develops chains of polygon charts outward from each corner,
//! collecting developed vertex images inside the length bound (measured in
//! the start corner's chart, so holonomy rescaling is inherent in the
//! development maps). Every candidate is confirmed by a direct trace before
//! it is reported.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::geom::{AffineMap, DirectionAngle};
use crate::math;
use crate::surface::{Corner, EdgeRef, Surface};
use crate::trace::{launch_separatrix, TraceConfig, TraceOutcome, TraceResult};

/// An oriented geodesic segment between two vertex classes, interior to the
/// complement of the vertices.
#[derive(Clone, Debug)]
pub struct SaddleConnection {
    pub start_singularity: usize,
    pub end_singularity: usize,
    /// Corner whose sector the connection leaves through; its vertex is the
    /// start point and its polygon the anchoring chart.
    pub start_corner: Corner,
    pub direction: DirectionAngle,
    /// Length in the start corner's chart.
    pub chart_length: f64,
    /// Edges crossed strictly between the endpoints.
    pub signature: Vec<EdgeRef>,
}

impl SaddleConnection {
    /// Stable content id (signature, endpoints, quantized geometry).
    pub fn content_id(&self) -> u64 {
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&(self.start_corner.0 as u64).to_le_bytes());
        bytes.extend_from_slice(&(self.start_corner.1 as u64).to_le_bytes());
        bytes.extend_from_slice(&quantize(self.direction.radians()).to_le_bytes());
        bytes.extend_from_slice(&quantize(self.chart_length).to_le_bytes());
        for e in &self.signature {
            bytes.extend_from_slice(&(e.polygon as u64).to_le_bytes());
            bytes.extend_from_slice(&(e.edge_index as u64).to_le_bytes());
        }
        math::fnv1a(bytes)
    }

    /// The connection realized by a single polygon edge.
    pub fn of_edge(surface: &Surface, edge: EdgeRef) -> Self {
        let poly = &surface.polygons[edge.polygon];
        let n = poly.len();
        let start = (edge.polygon, edge.edge_index);
        let end = (edge.polygon, (edge.edge_index + 1) % n);
        SaddleConnection {
            start_singularity: surface.class_of(start),
            end_singularity: surface.class_of(end),
            start_corner: start,
            direction: DirectionAngle::new(poly.edge_dir(edge.edge_index)),
            chart_length: poly.edge_len(edge.edge_index),
            signature: Vec::new(),
        }
    }

    /// Whether this connection runs along a complex edge, and which one.
    pub fn as_edge(&self, surface: &Surface) -> Option<EdgeRef> {
        if !self.signature.is_empty() {
            return None;
        }
        let (p, v) = self.start_corner;
        let poly = &surface.polygons[p];
        let e = EdgeRef::new(p, v);
        let same_dir =
            math::abs(math::angle_diff(self.direction.radians(), poly.edge_dir(v))) < 1e-9;
        let same_len = math::abs(self.chart_length - poly.edge_len(v)) < surface.eps_geo * 10.0;
        (same_dir && same_len).then_some(e)
    }

    /// Polyline of the connection, one segment per crossed polygon.
    pub fn chain(&self, surface: &Surface) -> Option<Vec<(usize, crate::geom::PlanarPoint, crate::geom::PlanarPoint)>> {
        let result = verify(surface, self.start_corner, self.direction, self.chart_length)?;
        Some(result.segments(surface))
    }
}

fn quantize(x: f64) -> u64 {
    // 1e-9 buckets keep ids stable under last-bit noise.
    ((x / 1e-9) + 0.5) as i64 as u64
}

/// Enumeration knobs.
#[derive(Clone, Copy, Debug)]
pub struct SaddleConfig {
    pub trace: TraceConfig,
    /// Cap on developed polygon charts per start corner.
    pub max_developments: usize,
}

impl Default for SaddleConfig {
    fn default() -> Self {
        Self { trace: TraceConfig::default(), max_developments: 20_000 }
    }
}

/// Enumerate oriented saddle connections of chart length at most
/// `max_chart_length`, sorted by (direction, length).
///
/// Chains of charts are developed breadth-first from each corner whose class
/// belongs to Σ; development is capped by `max_developments` per corner, so
/// the list is complete up to that budget and the length bound.
pub fn enumerate_saddle_connections(
    surface: &Surface,
    max_chart_length: f64,
    cfg: &SaddleConfig,
) -> Vec<SaddleConnection> {
    let mut out: Vec<SaddleConnection> = Vec::new();
    if max_chart_length <= 0.0 {
        return out;
    }
    for corner in surface.corners() {
        let class = surface.class_of(corner);
        if !surface.singularities[class].in_sigma() {
            continue;
        }
        enumerate_from_corner(surface, corner, max_chart_length, cfg, &mut out);
    }
    out.sort_by(|a, b| {
        (a.direction.radians(), a.chart_length, a.start_corner)
            .partial_cmp(&(b.direction.radians(), b.chart_length, b.start_corner))
            .unwrap()
    });
    out
}

fn enumerate_from_corner(
    surface: &Surface,
    corner: Corner,
    bound: f64,
    cfg: &SaddleConfig,
    out: &mut Vec<SaddleConnection>,
) {
    let (sector_start, sector_width) = surface.corner_sector(corner);
    let origin = surface.polygons[corner.0].vertices[corner.1];
    let mut seen: BTreeSet<(u64, u64)> = BTreeSet::new();

    // Breadth-first development: (polygon, map into the start chart, entry edge).
    let mut queue: Vec<(usize, AffineMap, Option<EdgeRef>)> = Vec::new();
    queue.push((corner.0, AffineMap::IDENTITY, None));
    let mut head = 0usize;
    while head < queue.len() && queue.len() <= cfg.max_developments {
        let (poly_id, dev, entry) = queue[head];
        head += 1;
        let poly = &surface.polygons[poly_id];

        // Candidate endpoints: developed vertex images inside the sector cone
        // and the length bound.
        let mut min_dist = f64::INFINITY;
        for v in 0..poly.len() {
            let w = dev.apply(&poly.vertices[v]);
            let dx = (w.x - origin.x, w.y - origin.y);
            let len = math::hypot(dx.0, dx.1);
            min_dist = min_dist.min(len);
            if len <= surface.eps_geo || len > bound {
                continue;
            }
            let dir = math::normalize_angle(math::atan2(dx.1, dx.0));
            if math::ccw_delta(sector_start, dir) >= sector_width {
                continue;
            }
            if !seen.insert((quantize(dir), quantize(len))) {
                continue;
            }
            if let Some(result) = verify(surface, corner, DirectionAngle::new(dir), len) {
                let end = match result.outcome {
                    TraceOutcome::HitSingularity { singularity } => singularity,
                    _ => continue,
                };
                out.push(SaddleConnection {
                    start_singularity: surface.class_of(corner),
                    end_singularity: end,
                    start_corner: corner,
                    direction: DirectionAngle::new(dir),
                    chart_length: len,
                    signature: result.crossings.iter().map(|c| c.edge).collect(),
                });
            }
        }

        // Expand across glued edges; prune charts entirely beyond the bound.
        if min_dist - dev.a * poly.diameter() > bound {
            continue;
        }
        for i in 0..poly.len() {
            let e = EdgeRef::new(poly_id, i);
            if Some(e) == entry {
                continue;
            }
            if let Some(side) = surface.crossing_side(e) {
                // Points of the neighbour chart map into this chart by the
                // inverse transition, then onward into the start chart.
                let child = dev.compose(&side.map.inverse());
                queue.push((side.other.polygon, child, Some(side.other)));
            }
        }
    }
}

/// Confirm a candidate by tracing: the separatrix from the corner must hit a
/// vertex at the expected chart distance.
pub(crate) fn verify(
    surface: &Surface,
    corner: Corner,
    d: DirectionAngle,
    expected_len: f64,
) -> Option<TraceResult> {
    let cfg = TraceConfig {
        max_path_length: expected_len * (1.0 + 1e-6) + surface.eps_geo,
        ..TraceConfig::default()
    };
    let result = launch_separatrix(surface, corner, d, &cfg)?;
    match result.outcome {
        TraceOutcome::HitSingularity { .. } => {
            let tol = 1e-6 * expected_len.max(1.0) + 10.0 * surface.eps_geo;
            (math::abs(result.path_length - expected_len) <= tol).then_some(result)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    #[test]
    fn torus_has_eight_connections_within_radius_one_point_five() {
        // Oracle: integer lattice points within radius 1.5 of the origin,
        // excluding the origin itself.
        let mut expected = 0;
        for p in -2i32..=2 {
            for q in -2i32..=2 {
                let len2 = (p * p + q * q) as f64;
                if (p, q) != (0, 0) && len2 <= 1.5 * 1.5 {
                    expected += 1;
                }
            }
        }
        assert_eq!(expected, 8);

        let s = builders::build_torus().unwrap();
        let found = enumerate_saddle_connections(&s, 1.5, &SaddleConfig::default());
        assert_eq!(found.len(), 8, "{found:#?}");
        let unit = found.iter().filter(|c| (c.chart_length - 1.0).abs() < 1e-9).count();
        let diag = found
            .iter()
            .filter(|c| (c.chart_length - core::f64::consts::SQRT_2).abs() < 1e-9)
            .count();
        assert_eq!((unit, diag), (4, 4));
        for c in &found {
            assert_eq!(c.start_singularity, 0);
            assert_eq!(c.end_singularity, 0);
        }
    }

    #[test]
    fn zero_bound_is_empty() {
        let s = builders::build_torus().unwrap();
        assert!(enumerate_saddle_connections(&s, 0.0, &SaddleConfig::default()).is_empty());
    }

    #[test]
    fn two_chamber_designated_slit_is_enumerated() {
        let tc = builders::build_two_chamber(Default::default()).unwrap();
        let s = &tc.surface;
        let slit = SaddleConnection::of_edge(s, tc.designated_edge);
        let found = enumerate_saddle_connections(s, 2.0, &SaddleConfig::default());
        assert!(
            found.iter().any(|c| c.content_id() == slit.content_id()),
            "designated slit missing from: {found:#?}"
        );
        assert_eq!(slit.as_edge(s), Some(tc.designated_edge));
    }
}
