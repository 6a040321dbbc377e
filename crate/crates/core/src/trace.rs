//! Straight-line flow across edge identifications.
//!
//! A trajectory advances inside the current polygon to its first boundary
//! intersection; crossing a glued edge re-enters at the partner edge with
//! the direction unchanged (transitions have positive real linear part) and
//! multiplies the accumulated dilation ratio by the gluing ratio. A pass
//! within the hit tolerance of any vertex terminates the trace there.
//!
//! Trailing crossing history is watched for a repeating cyclic edge
//! signature with contracting per-cycle ratio: an attracting limit cycle.
//! Flat repetitions (per-cycle ratio 1, e.g. torus cylinders) are never
//! reported as limit cycles; such traces run to their budget.

use alloc::vec::Vec;

use crate::error::TraceError;
use crate::geodesics::ClosedGeodesic;
use crate::geom::{self, DirectionAngle, PlanarPoint};
use crate::math;
use crate::surface::{Corner, EdgeRef, Surface};

/// A point of the surface in a specific chart.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FlowPoint {
    pub polygon: usize,
    pub position: PlanarPoint,
}

impl FlowPoint {
    pub const fn new(polygon: usize, x: f64, y: f64) -> Self {
        Self { polygon, position: PlanarPoint::new(x, y) }
    }
}

/// Tracer budgets and tolerances.
#[derive(Clone, Copy, Debug)]
pub struct TraceConfig {
    /// Maximum number of edge crossings before giving up.
    pub max_crossings: usize,
    /// Maximum total length measured in the start chart: each segment length
    /// is divided by the accumulated ratio before summing, which makes the
    /// bound independent of where along the trajectory tracing begins.
    pub max_path_length: f64,
    /// Vertex-hit tolerance relative to the polygon diameter.
    pub eps_hit: f64,
    /// Identical signature cycles required before a limit cycle is reported.
    pub cycle_confirmations: usize,
}

impl Default for TraceConfig {
    fn default() -> Self {
        Self {
            max_crossings: 4096,
            max_path_length: 1e12,
            eps_hit: 1e-9,
            cycle_confirmations: 3,
        }
    }
}

impl TraceConfig {
    pub fn with_max_crossings(max_crossings: usize) -> Self {
        Self { max_crossings, ..Self::default() }
    }
}

/// One edge crossing: the edge hit in the current polygon, the barycentric
/// coordinate of the hit along it, and the dilation ratio accumulated
/// after applying the gluing.
#[derive(Clone, Copy, Debug)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CrossingRecord {
    pub edge: EdgeRef,
    pub coord: f64,
    pub accumulated_ratio: f64,
}

/// Terminal state of a trace.
#[derive(Clone, Debug)]
pub enum TraceOutcome {
    /// Passed within the hit tolerance of a vertex of this class.
    HitSingularity { singularity: usize },
    /// Reached an unglued edge.
    CrossedBoundary { edge: EdgeRef, coord: f64 },
    /// Locked onto an attracting closed geodesic.
    LimitCycle(ClosedGeodesic),
    /// Ran out of crossings or path length.
    BudgetExhausted,
}

impl TraceOutcome {
    pub fn is_resolved(&self) -> bool {
        !matches!(self, TraceOutcome::BudgetExhausted)
    }
}

/// A finished trace: the crossing history plus how it ended.
#[derive(Clone, Debug)]
pub struct TraceResult {
    pub start: FlowPoint,
    pub direction: DirectionAngle,
    pub crossings: Vec<CrossingRecord>,
    pub outcome: TraceOutcome,
    /// Where the trace stopped, in its final chart.
    pub final_point: FlowPoint,
    /// Total length in start-chart units.
    pub path_length: f64,
}

impl TraceResult {
    /// Straight segments of the trace, one per polygon visit:
    /// `(polygon, from, to)`. Reconstructed from the crossing history.
    pub fn segments(&self, surface: &Surface) -> Vec<(usize, PlanarPoint, PlanarPoint)> {
        let mut out = Vec::with_capacity(self.crossings.len() + 1);
        let mut poly = self.start.polygon;
        let mut pos = self.start.position;
        for cr in &self.crossings {
            let hit = surface.polygons[cr.edge.polygon].edge_point(cr.edge.edge_index, cr.coord);
            out.push((poly, pos, hit));
            let side = surface
                .crossing_side(cr.edge)
                .expect("crossing records only reference glued edges");
            pos = surface.polygons[side.other.polygon].edge_point(side.other.edge_index, 1.0 - cr.coord);
            poly = side.other.polygon;
        }
        out.push((poly, pos, self.final_point.position));
        out
    }
}

/// Limit-cycle candidate extracted from a crossing history.
#[derive(Clone, Debug)]
pub struct LimitCycleInfo {
    pub period: usize,
    pub lambda: f64,
    pub fixed_coord: f64,
    pub reference_edge: EdgeRef,
}

const MAX_PERIOD: usize = 512;
const FIXED_POINT_TOL: f64 = 1e-9;

/// Look for a repeating cyclic edge signature with contracting per-cycle
/// ratio at the tail of a crossing history.
///
/// Detection requires `cfg.cycle_confirmations` identical signature cycles
/// and geometric decay of the edge coordinate toward the affine fixed point;
/// repetition with per-cycle ratio 1 (flat cylinders) is not a limit cycle.
pub fn detect_limit_cycle(history: &[CrossingRecord], cfg: &TraceConfig) -> Option<LimitCycleInfo> {
    detect_limit_cycle_excluding(history, cfg, None)
}

pub(crate) fn cycle_key(info: &LimitCycleInfo) -> (EdgeRef, i64) {
    (info.reference_edge, math::floor(info.fixed_coord / 1e-12) as i64)
}

pub(crate) fn detect_limit_cycle_excluding(
    history: &[CrossingRecord],
    cfg: &TraceConfig,
    excluded: Option<&alloc::collections::BTreeSet<(EdgeRef, i64)>>,
) -> Option<LimitCycleInfo> {
    let n = history.len();
    if n < 2 {
        return None;
    }
    let conf = cfg.cycle_confirmations.max(2);
    let last = &history[n - 1];
    // Candidate periods are the gaps back to earlier crossings of the same
    // edge (a cycle may cross one edge many times, so all gaps up to the
    // period cap are candidates). Non-contracting gaps are rejected by a
    // ratio comparison before any signature scan.
    for back in 1..=(n - 1).min(MAX_PERIOD) {
        if history[n - 1 - back].edge != last.edge {
            continue;
        }
        let lambda = last.accumulated_ratio / history[n - 1 - back].accumulated_ratio;
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 - 1e-9 {
            continue;
        }
        if let Some(info) = try_period(history, back, conf) {
            if excluded.is_some_and(|set| set.contains(&cycle_key(&info))) {
                continue;
            }
            return Some(info);
        }
    }
    None
}

fn try_period(history: &[CrossingRecord], g: usize, conf: usize) -> Option<LimitCycleInfo> {
    let n = history.len();
    if n < conf * g + 1 {
        return None;
    }
    // Edge-periodicity over `conf` trailing blocks.
    for i in (n - (conf - 1) * g)..n {
        if history[i].edge != history[i - g].edge {
            return None;
        }
    }
    // Contracting per-cycle ratio (ratios are post-crossing products).
    let lambda = history[n - 1].accumulated_ratio / history[n - 1 - g].accumulated_ratio;
    if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 - 1e-9 {
        return None;
    }
    // Affine return map x ↦ λx + c on the reference edge coordinate. A fixed
    // point at an edge endpoint is not a closed geodesic: it is the chain of
    // saddle connections the trajectory accumulates on, so the coordinate
    // must be strictly interior.
    let x: Vec<f64> = (0..conf).map(|j| history[n - 1 - j * g].coord).collect();
    let c = x[0] - lambda * x[1];
    let fixed = c / (1.0 - lambda);
    if fixed <= 1e-9 || fixed >= 1.0 - 1e-9 {
        return None;
    }
    for j in 1..(conf - 1) {
        let predicted = lambda * x[j + 1] + c;
        if math::abs(x[j] - predicted) > FIXED_POINT_TOL {
            return None;
        }
    }
    Some(LimitCycleInfo {
        period: g,
        lambda,
        fixed_coord: fixed,
        reference_edge: history[n - 1].edge,
    })
}

/// Event produced by one tracer step.
#[derive(Clone, Debug)]
pub(crate) enum StepEvent {
    Crossed(CrossingRecord),
    HitVertex { corner: Corner },
    HitBoundary { edge: EdgeRef, coord: f64 },
    OutOfPath,
    NoExit,
}

/// Incremental tracer; [`trace`] drives it to a terminal outcome, the
/// return-map construction stops it at section hits.
pub(crate) struct Tracer<'s> {
    surface: &'s Surface,
    pub poly: usize,
    pub pos: PlanarPoint,
    dir: (f64, f64),
    pub acc_ratio: f64,
    pub path_length: f64,
    max_path_length: f64,
    eps_hit_rel: f64,
}

impl<'s> Tracer<'s> {
    pub fn new(surface: &'s Surface, start: FlowPoint, d: DirectionAngle, cfg: &TraceConfig) -> Self {
        Self {
            surface,
            poly: start.polygon,
            pos: start.position,
            dir: d.unit(),
            acc_ratio: 1.0,
            path_length: 0.0,
            max_path_length: cfg.max_path_length,
            eps_hit_rel: cfg.eps_hit,
        }
    }

    pub fn current(&self) -> FlowPoint {
        FlowPoint { polygon: self.poly, position: self.pos }
    }

    /// Advance to the next boundary intersection of the current polygon and
    /// cross it if glued.
    pub fn step(&mut self) -> StepEvent {
        let poly = &self.surface.polygons[self.poly];
        let eps = self.eps_hit_rel * poly.diameter();
        // The skip window only masks re-hits of the edge the position sits
        // on (float noise); keeping it far below the vertex tolerance lets
        // genuine exits very close to a corner still be found.
        let t_min = 1e-10 * poly.diameter();

        // Nearest vertex pass within tolerance.
        let mut vertex_hit: Option<(f64, usize)> = None;
        for v in 0..poly.len() {
            let (t, d) = geom::ray_closest_approach(&self.pos, self.dir, &poly.vertices[v]);
            if d <= eps && t > t_min && vertex_hit.is_none_or(|(bt, _)| t < bt) {
                vertex_hit = Some((t, v));
            }
        }
        // Nearest edge crossing.
        let mut edge_hit: Option<(f64, usize, f64)> = None;
        for i in 0..poly.len() {
            if let Some((t, s)) =
                geom::ray_segment_hit(&self.pos, self.dir, poly.edge_start(i), poly.edge_end(i), t_min)
            {
                if edge_hit.is_none_or(|(bt, _, _)| t < bt) {
                    edge_hit = Some((t, i, s));
                }
            }
        }

        // Vertex passes win ties: the conservative corner rule.
        if let Some((tv, v)) = vertex_hit {
            if edge_hit.is_none_or(|(te, _, _)| tv <= te + eps) {
                if self.consume_length(tv) {
                    return StepEvent::OutOfPath;
                }
                self.pos = poly.vertices[v];
                return StepEvent::HitVertex { corner: (self.poly, v) };
            }
        }
        let Some((t, i, s)) = edge_hit else {
            // A point within the hit tolerance of a vertex can be aimed so
            // that its exit lies inside the skip window; that is a vertex
            // hit under the conservative corner rule.
            for v in 0..poly.len() {
                if poly.vertices[v].dist(&self.pos) <= eps {
                    self.pos = poly.vertices[v];
                    return StepEvent::HitVertex { corner: (self.poly, v) };
                }
            }
            debug_assert!(
                false,
                "ray found no exit from polygon {} at ({}, {}) dir ({}, {})",
                self.poly, self.pos.x, self.pos.y, self.dir.0, self.dir.1
            );
            return StepEvent::NoExit;
        };
        if self.consume_length(t) {
            return StepEvent::OutOfPath;
        }

        let edge = EdgeRef::new(self.poly, i);
        match self.surface.crossing_side(edge) {
            None => {
                self.pos = poly.edge_point(i, s);
                StepEvent::HitBoundary { edge, coord: s }
            }
            Some(side) => {
                // Re-enter on the partner edge; the anti-parallel pairing maps
                // coordinate s to 1 - s exactly.
                let other_poly = &self.surface.polygons[side.other.polygon];
                let landing = 1.0 - s;
                let new_pos = other_poly.edge_point(side.other.edge_index, landing);
                // The hit cleared the vertex tolerance of the old chart, but
                // the charts are scaled against each other: apply the
                // conservative vertex rule in the arrival chart as well.
                let eps_new = self.eps_hit_rel * other_poly.diameter();
                let len = other_poly.edge_len(side.other.edge_index);
                let n_other = other_poly.len();
                if landing * len <= eps_new {
                    self.pos = other_poly.vertices[side.other.edge_index];
                    self.poly = side.other.polygon;
                    return StepEvent::HitVertex {
                        corner: (side.other.polygon, side.other.edge_index),
                    };
                }
                if (1.0 - landing) * len <= eps_new {
                    let v = (side.other.edge_index + 1) % n_other;
                    self.pos = other_poly.vertices[v];
                    self.poly = side.other.polygon;
                    return StepEvent::HitVertex { corner: (side.other.polygon, v) };
                }
                self.pos = new_pos;
                self.poly = side.other.polygon;
                self.acc_ratio *= side.ratio;
                StepEvent::Crossed(CrossingRecord {
                    edge,
                    coord: s,
                    accumulated_ratio: self.acc_ratio,
                })
            }
        }
    }

    fn consume_length(&mut self, t: f64) -> bool {
        self.path_length += t / self.acc_ratio;
        self.path_length > self.max_path_length
    }
}

/// Confirm a limit-cycle candidate by tracing one full period from its fixed
/// point: the crossing sequence must reproduce the candidate block and come
/// back to the fixed coordinate.
///
/// A run of same-edge crossings inside a longer cycle satisfies the affine
/// coordinate relation exactly, so the candidate test alone can report a
/// sub-period whose fixed point is off the true orbit; the confirmation
/// trace rejects those.
pub(crate) fn confirm_cycle(
    surface: &Surface,
    d: DirectionAngle,
    history: &[CrossingRecord],
    info: &LimitCycleInfo,
    cfg: &TraceConfig,
) -> bool {
    let n = history.len();
    let g = info.period;
    let seam = &history[n - 1].edge;
    let start = FlowPoint {
        polygon: seam.polygon,
        position: surface.polygons[seam.polygon].edge_point(seam.edge_index, info.fixed_coord),
    };
    let Ok(start) = normalize_start(surface, start, d, cfg) else { return false };
    let mut tracer = Tracer::new(surface, start, d, cfg);
    for j in 0..g {
        match tracer.step() {
            StepEvent::Crossed(cr) => {
                if cr.edge != history[n - g + j].edge {
                    return false;
                }
                if j + 1 == g && math::abs(cr.coord - info.fixed_coord) > 1e-7 {
                    return false;
                }
            }
            _ => return false,
        }
    }
    true
}

/// Trace the directional flow from `start` along `d` until it hits a vertex,
/// crosses the boundary, locks onto a limit cycle, or exhausts its budget.
pub fn trace(
    surface: &Surface,
    start: FlowPoint,
    d: DirectionAngle,
    cfg: &TraceConfig,
) -> Result<TraceResult, TraceError> {
    let start = normalize_start(surface, start, d, cfg)?;
    let mut tracer = Tracer::new(surface, start, d, cfg);
    let mut crossings: Vec<CrossingRecord> = Vec::new();
    // Fixed points of rejected candidates, so a persisting same-edge run
    // does not re-verify the same phantom every crossing.
    let mut rejected: alloc::collections::BTreeSet<(EdgeRef, i64)> = alloc::collections::BTreeSet::new();
    let outcome = loop {
        match tracer.step() {
            StepEvent::Crossed(cr) => {
                crossings.push(cr);
                let mut found = None;
                while let Some(info) =
                    detect_limit_cycle_excluding(&crossings, cfg, Some(&rejected))
                {
                    if confirm_cycle(surface, d, &crossings, &info, cfg) {
                        found = Some(info);
                        break;
                    }
                    rejected.insert(cycle_key(&info));
                }
                if let Some(info) = found {
                    let geo = ClosedGeodesic::from_cycle(&crossings, &info, d);
                    break TraceOutcome::LimitCycle(geo);
                }
                if crossings.len() >= cfg.max_crossings {
                    break TraceOutcome::BudgetExhausted;
                }
            }
            StepEvent::HitVertex { corner } => {
                break TraceOutcome::HitSingularity { singularity: surface.class_of(corner) };
            }
            StepEvent::HitBoundary { edge, coord } => {
                break TraceOutcome::CrossedBoundary { edge, coord };
            }
            StepEvent::OutOfPath | StepEvent::NoExit => break TraceOutcome::BudgetExhausted,
        }
    };
    Ok(TraceResult {
        start,
        direction: d,
        crossings,
        outcome,
        final_point: tracer.current(),
        path_length: tracer.path_length,
    })
}

/// Validate the start point; when it lies on an edge aimed out of the given
/// polygon, transfer it to the partner chart (or report an immediate
/// boundary exit is impossible here — `trace` handles that case itself).
fn normalize_start(
    surface: &Surface,
    start: FlowPoint,
    d: DirectionAngle,
    cfg: &TraceConfig,
) -> Result<FlowPoint, TraceError> {
    if start.polygon >= surface.polygons.len() {
        return Err(TraceError::InvalidStart);
    }
    let poly = &surface.polygons[start.polygon];
    let eps = cfg.eps_hit * poly.diameter();
    if !start.position.is_finite() || !poly.contains(&start.position, eps) {
        return Err(TraceError::InvalidStart);
    }
    // Start at a vertex: the direction must leave into this corner's sector.
    for v in 0..poly.len() {
        if poly.vertices[v].dist(&start.position) <= eps {
            let (s0, width) = surface.corner_sector((start.polygon, v));
            if math::ccw_delta(s0, d.radians()) < width {
                return Ok(FlowPoint { polygon: start.polygon, position: poly.vertices[v] });
            }
            return Err(TraceError::InvalidStart);
        }
    }
    // Start on an edge aimed outward: hop through the gluing when there is
    // one; an outward start on a boundary edge cannot enter the surface.
    for i in 0..poly.len() {
        let a = poly.edge_start(i);
        let b = poly.edge_end(i);
        let ev = poly.edge_vec(i);
        let len2 = geom::dot(ev, ev);
        let s = (geom::dot(start.position.sub(a), ev) / len2).clamp(0.0, 1.0);
        if a.lerp(b, s).dist(&start.position) > eps {
            continue;
        }
        let outward = geom::cross(ev, d.unit()) < 0.0;
        if !outward {
            return Ok(start);
        }
        return match surface.crossing_side(EdgeRef::new(start.polygon, i)) {
            Some(side) => {
                let p = surface.polygons[side.other.polygon].edge_point(side.other.edge_index, 1.0 - s);
                Ok(FlowPoint { polygon: side.other.polygon, position: p })
            }
            None => Err(TraceError::InvalidStart),
        };
    }
    Ok(start)
}

/// Launch the separatrix leaving `corner` in direction `d`, if `d` lies in
/// the corner's angular sector.
pub fn launch_separatrix(
    surface: &Surface,
    corner: Corner,
    d: DirectionAngle,
    cfg: &TraceConfig,
) -> Option<TraceResult> {
    let (s0, width) = surface.corner_sector(corner);
    if math::ccw_delta(s0, d.radians()) >= width {
        return None;
    }
    let start = FlowPoint {
        polygon: corner.0,
        position: surface.polygons[corner.0].vertices[corner.1],
    };
    // The sector test guarantees a valid start.
    Some(trace(surface, start, d, cfg).expect("in-sector separatrix launch is valid"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn torus() -> Surface {
        builders::build_torus().unwrap()
    }

    #[test]
    fn torus_slope_half_is_period_three() {
        // Unrolled, the ray (0.5, 0.5) + t(2, 1) crosses the right edge at
        // y = 0.75, the top at x = 0.5, the right at y = 0.25, then repeats.
        let s = torus();
        let d = DirectionAngle::new((0.5_f64).atan2(1.0));
        let cfg = TraceConfig::with_max_crossings(30);
        let r = trace(&s, FlowPoint::new(0, 0.5, 0.5), d, &cfg).unwrap();
        assert!(matches!(r.outcome, TraceOutcome::BudgetExhausted));
        assert_eq!(r.crossings.len(), 30);
        for w in r.crossings.windows(3).step_by(3) {
            let edges: Vec<usize> = w.iter().map(|c| c.edge.edge_index).collect();
            assert_eq!(edges, alloc::vec![1, 2, 1]);
        }
        for (i, c) in r.crossings.iter().enumerate() {
            assert!((c.accumulated_ratio - 1.0).abs() < 1e-12);
            assert_eq!(c.edge, r.crossings[i % 3].edge);
            assert!((c.coord - r.crossings[i % 3].coord).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_vertical_from_marked_point_is_saddle_connection() {
        let s = torus();
        let d = DirectionAngle::new(core::f64::consts::FRAC_PI_2);
        // The vertical direction leaves the marked point through the corner
        // at (1, 0), whose sector is [π/2, π).
        let r = trace(&s, FlowPoint::new(0, 1.0, 0.0), d, &TraceConfig::default()).unwrap();
        match r.outcome {
            TraceOutcome::HitSingularity { singularity } => assert_eq!(singularity, 0),
            ref other => panic!("expected singularity hit, got {other:?}"),
        }
        assert!((r.path_length - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cylinder_interior_start_locks_onto_limit_cycle() {
        let alpha = math::PI / 3.0;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        let d = DirectionAngle::new(math::PI / 6.0);
        // A point strictly inside the wedge chart.
        let start = FlowPoint::new(0, 0.7 * math::cos(0.4), 0.7 * math::sin(0.4));
        let r = trace(&s, start, d, &TraceConfig::default()).unwrap();
        match &r.outcome {
            TraceOutcome::LimitCycle(geo) => {
                assert!((geo.holonomy - 0.5).abs() < 1e-9);
                assert_eq!(geo.signature.len(), 1);
            }
            other => panic!("expected limit cycle, got {other:?}"),
        }
    }

    #[test]
    fn cylinder_outward_directions_cross_boundary() {
        let alpha = math::PI / 3.0;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        // From the radial boundary edge at angle 0, aimed above the trapped
        // sector: exits through the other radial edge.
        let start = FlowPoint::new(0, 0.7, 0.0);
        let d = DirectionAngle::new(alpha + 0.3);
        let r = trace(&s, start, d, &TraceConfig::default()).unwrap();
        assert!(matches!(r.outcome, TraceOutcome::CrossedBoundary { .. }), "{:?}", r.outcome);
    }

    #[test]
    fn synthetic_history_fixed_point_algebra() {
        // Repeating single-edge signature with per-cycle ratio 1/2 and return
        // map x ↦ x/2 + 1/4: fixed point at 1/2.
        let e = EdgeRef::new(0, 0);
        let mut x = 0.9;
        let mut acc = 1.0;
        let mut hist = Vec::new();
        for _ in 0..6 {
            x = 0.5 * x + 0.25;
            acc *= 0.5;
            hist.push(CrossingRecord { edge: e, coord: x, accumulated_ratio: acc });
        }
        let info = detect_limit_cycle(&hist, &TraceConfig::default()).unwrap();
        assert_eq!(info.period, 1);
        assert!((info.lambda - 0.5).abs() < 1e-12);
        assert!((info.fixed_coord - 0.5).abs() < 1e-9);
    }

    #[test]
    fn flat_repetition_is_not_a_cycle() {
        let e = EdgeRef::new(0, 0);
        let hist: Vec<CrossingRecord> = (0..10)
            .map(|_| CrossingRecord { edge: e, coord: 0.25, accumulated_ratio: 1.0 })
            .collect();
        assert!(detect_limit_cycle(&hist, &TraceConfig::default()).is_none());
    }

    #[test]
    fn non_repeating_history_is_not_a_cycle() {
        let hist: Vec<CrossingRecord> = (0..10)
            .map(|i| CrossingRecord {
                edge: EdgeRef::new(0, i % 4),
                coord: 0.1 + 0.05 * i as f64,
                accumulated_ratio: 1.0 / (i + 1) as f64,
            })
            .collect();
        assert!(detect_limit_cycle(&hist, &TraceConfig::default()).is_none());
    }

    #[test]
    fn invalid_start_rejected() {
        let s = torus();
        let d = DirectionAngle::new(1.0);
        assert!(matches!(
            trace(&s, FlowPoint::new(0, 3.0, 0.5), d, &TraceConfig::default()),
            Err(TraceError::InvalidStart)
        ));
        assert!(matches!(
            trace(&s, FlowPoint::new(5, 0.5, 0.5), d, &TraceConfig::default()),
            Err(TraceError::InvalidStart)
        ));
    }
}
