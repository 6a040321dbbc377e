//! Maximal one-parameter families of hyperbolic closed geodesics.
//!
//! A hyperbolic closed geodesic persists under small changes of direction:
//! the family sweeps an open interval of directions (the cylinder) and
//! degenerates into saddle connections at the ends. The extension marches
//! the direction outward from the core, following the geodesic by its
//! first-return fixed point on a deep section edge (re-anchoring when the
//! crossing combinatorics change) and halving the step until the endpoint
//! is bracketed to the angular tolerance.

use alloc::vec::Vec;

use crate::error::CylinderError;
use crate::geodesics::{closed_geodesics_in_direction, ClosedGeodesic, GeodesicConfig};
use crate::geom::DirectionAngle;
use crate::math;
use crate::saddle::SaddleConnection;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{launch_separatrix, trace, CrossingRecord, TraceConfig, TraceOutcome, Tracer, StepEvent, FlowPoint};

/// A maximal family of closed geodesics around a hyperbolic core.
#[derive(Clone, Debug)]
pub struct Cylinder {
    pub core: ClosedGeodesic,
    /// Direction interval as real numbers around the core direction
    /// (unwrapped; subtract/add multiples of 2π to fold onto the circle).
    pub direction_interval: (f64, f64),
    pub angular_extent: f64,
    /// Saddle connections bounding the family at its limit directions.
    pub boundary: Vec<SaddleConnection>,
    /// Whether the family covers an angle of at least π.
    pub spans_pi: bool,
}

impl Cylinder {
    /// Whether direction `d` lies strictly inside the family's interval.
    pub fn contains_direction(&self, d: DirectionAngle) -> bool {
        let (lo, hi) = self.direction_interval;
        let t = math::normalize_angle(d.radians() - lo);
        t > 0.0 && t < hi - lo
    }
}

/// Extension knobs.
#[derive(Clone, Copy, Debug)]
pub struct ExtendConfig {
    /// Initial (and maximal) marching step in radians.
    pub step: f64,
    /// Angular tolerance for the interval endpoints.
    pub angle_tol: f64,
    /// Safety cap on the total extent.
    pub max_extent: f64,
    pub geodesic: GeodesicConfig,
}

impl Default for ExtendConfig {
    fn default() -> Self {
        Self {
            step: 1e-3,
            angle_tol: 1e-9,
            max_extent: 2.0 * math::TAU,
            geodesic: GeodesicConfig::default(),
        }
    }
}

/// State carried while marching: the current member of the family with its
/// cycle crossing coordinates (anchor candidates).
#[derive(Clone, Debug)]
struct FamilyMember {
    geo: ClosedGeodesic,
    /// Quotient sections crossed by the cycle with their section coordinate,
    /// sorted by interior depth (deepest first).
    anchors: Vec<(EdgeRef, f64)>,
}

fn quotient_section(surface: &Surface, edge: EdgeRef, coord: f64) -> (EdgeRef, f64) {
    match surface.pairing_of(edge) {
        Some(p) if p.f == edge => (p.e, 1.0 - coord),
        _ => (edge, coord),
    }
}

fn member_of(surface: &Surface, geo: &ClosedGeodesic, cfg: &ExtendConfig) -> Option<FamilyMember> {
    let crossings = cycle_crossings(surface, geo, &cfg.geodesic.return_map.trace)?;
    let mut anchors: Vec<(EdgeRef, f64)> = crossings
        .iter()
        .map(|c| quotient_section(surface, c.edge, c.coord))
        .collect();
    anchors.sort_by(|a, b| {
        let depth = |x: &(EdgeRef, f64)| -(x.1.min(1.0 - x.1));
        depth(a).partial_cmp(&depth(b)).unwrap()
    });
    anchors.dedup_by(|a, b| a.0 == b.0 && (a.1 - b.1).abs() < 1e-12);
    Some(FamilyMember { geo: geo.clone(), anchors })
}

/// One full period of crossings of a closed geodesic, traced from its base.
pub(crate) fn cycle_crossings(
    surface: &Surface,
    geo: &ClosedGeodesic,
    cfg: &TraceConfig,
) -> Option<Vec<CrossingRecord>> {
    let start = geo.base_point(surface);
    let result = trace(surface, start, geo.direction, cfg).ok()?;
    let g = geo.signature.len();
    if result.crossings.len() < g {
        return None;
    }
    Some(result.crossings[..g].to_vec())
}

/// Continue the family to direction `d`: first by the first-return fixed
/// point on an anchor section, then by letting a trace from the previous
/// base get trapped onto the nearby cycle.
fn continue_member(
    surface: &Surface,
    member: &FamilyMember,
    d: DirectionAngle,
    cfg: &ExtendConfig,
) -> Option<ClosedGeodesic> {
    for &(section, x_anchor) in member.anchors.iter().take(4) {
        if let Some(geo) = continue_via_section(surface, section, x_anchor, d, cfg) {
            return Some(geo);
        }
    }
    continue_via_capture(surface, member, d, cfg)
}

fn continue_via_section(
    surface: &Surface,
    section: EdgeRef,
    x_anchor: f64,
    d: DirectionAngle,
    cfg: &ExtendConfig,
) -> Option<ClosedGeodesic> {
    let sec_dir = surface.polygons[section.polygon].edge_dir(section.edge_index);
    if math::abs(math::sin(d.radians() - sec_dir)) < 1e-9 {
        return None;
    }
    let (sig, return_edge, y) = first_return(surface, section, x_anchor, d, cfg)?;
    let mut slope = 1.0;
    for e in &sig {
        slope *= surface.crossing_side(*e)?.ratio;
    }
    slope *= surface.crossing_side(return_edge).map_or(1.0, |s| s.ratio);
    if slope >= 1.0 - 1e-9 {
        return None;
    }
    let fixed = (y - slope * x_anchor) / (1.0 - slope);
    if !(1e-12..=1.0 - 1e-12).contains(&fixed) || math::abs(fixed - x_anchor) > 0.3 {
        return None;
    }
    // Confirm the fixed point with its own first return.
    let (sig2, _, y2) = first_return(surface, section, fixed, d, cfg)?;
    if sig2 != sig || math::abs(y2 - fixed) > 1e-7 {
        return None;
    }
    let mut signature = sig;
    signature.push(return_edge);
    Some(ClosedGeodesic {
        signature,
        direction: d,
        holonomy: slope,
        base: CrossingRecord { edge: section, coord: fixed, accumulated_ratio: 1.0 },
        is_hyperbolic: true,
    })
}

/// First return to `section` from section coordinate `x` in direction `d`.
fn first_return(
    surface: &Surface,
    section: EdgeRef,
    x: f64,
    d: DirectionAngle,
    cfg: &ExtendConfig,
) -> Option<(Vec<EdgeRef>, EdgeRef, f64)> {
    let partner = surface.crossing_side(section).map(|s| s.other);
    let u = d.unit();
    let sec_poly = &surface.polygons[section.polygon];
    let inward = crate::geom::cross(sec_poly.edge_vec(section.edge_index), u) > 0.0;
    let start = if inward {
        FlowPoint { polygon: section.polygon, position: sec_poly.edge_point(section.edge_index, x) }
    } else {
        let p = partner?;
        FlowPoint {
            polygon: p.polygon,
            position: surface.polygons[p.polygon].edge_point(p.edge_index, 1.0 - x),
        }
    };
    let trace_cfg = cfg.geodesic.return_map.trace;
    let mut tracer = Tracer::new(surface, start, d, &trace_cfg);
    let mut sig = Vec::new();
    loop {
        match tracer.step() {
            StepEvent::Crossed(cr) => {
                if cr.edge == section || Some(cr.edge) == partner {
                    let y = if cr.edge == section { cr.coord } else { 1.0 - cr.coord };
                    return Some((sig, cr.edge, y));
                }
                sig.push(cr.edge);
                if sig.len() >= trace_cfg.max_crossings {
                    return None;
                }
            }
            _ => return None,
        }
    }
}

fn continue_via_capture(
    surface: &Surface,
    member: &FamilyMember,
    d: DirectionAngle,
    cfg: &ExtendConfig,
) -> Option<ClosedGeodesic> {
    let g = member.geo.signature.len();
    let capture_cfg = TraceConfig {
        max_crossings: (12 * g + 48).max(128),
        ..cfg.geodesic.return_map.trace
    };
    let start = member.geo.base_point(surface);
    let result = trace(surface, start, d, &capture_cfg).ok()?;
    match result.outcome {
        TraceOutcome::LimitCycle(geo) => Some(geo),
        _ => None,
    }
}

/// Grow the maximal direction interval around a hyperbolic geodesic.
///
/// Marching step starts at `cfg.step` and is bisected whenever the family
/// fails to continue, locating each endpoint to `cfg.angle_tol`. Boundary
/// saddle connections are recovered by tracing separatrices in the limit
/// directions from the vertex classes the degenerating cycle approaches.
pub fn extend_to_cylinder(
    surface: &Surface,
    geo: &ClosedGeodesic,
    cfg: &ExtendConfig,
) -> Result<Cylinder, CylinderError> {
    if !geo.is_hyperbolic || geo.holonomy >= 1.0 - 1e-9 {
        return Err(CylinderError::NotHyperbolic);
    }
    let center = geo.direction.radians();
    let mut boundary = Vec::new();
    let mut extents = [0.0_f64; 2];
    for (k, sign) in [1.0_f64, -1.0].iter().enumerate() {
        let mut member = member_of(surface, geo, cfg).ok_or(CylinderError::NotHyperbolic)?;
        let mut offset = 0.0_f64;
        let mut step = cfg.step;
        while step >= cfg.angle_tol && offset < cfg.max_extent {
            let d_next = DirectionAngle::new(center + sign * (offset + step));
            match continue_member(surface, &member, d_next, cfg) {
                Some(next) => match member_of(surface, &next, cfg) {
                    Some(m) => {
                        member = m;
                        offset += step;
                        step = (step * 2.0).min(cfg.step);
                    }
                    None => step *= 0.5,
                },
                None => step *= 0.5,
            }
        }
        extents[k] = offset;
        let limit_dir = DirectionAngle::new(center + sign * offset);
        boundary.extend(boundary_connections(surface, &member, limit_dir, cfg));
    }

    let angular_extent = extents[0] + extents[1];
    let mut seen = alloc::collections::BTreeSet::new();
    boundary.retain(|sc: &SaddleConnection| seen.insert(sc.content_id()));
    Ok(Cylinder {
        core: geo.clone(),
        direction_interval: (center - extents[1], center + extents[0]),
        angular_extent,
        boundary,
        spans_pi: angular_extent >= math::PI - 1e-9,
    })
}

/// Saddle connections in the limit direction incident to the vertex classes
/// the degenerating cycle approaches.
fn boundary_connections(
    surface: &Surface,
    member: &FamilyMember,
    limit_dir: DirectionAngle,
    cfg: &ExtendConfig,
) -> Vec<SaddleConnection> {
    let near = 1e-3;
    let mut classes = alloc::collections::BTreeSet::new();
    if let Some(crossings) = cycle_crossings(surface, &member.geo, &cfg.geodesic.return_map.trace) {
        for cr in &crossings {
            let poly = &surface.polygons[cr.edge.polygon];
            let n = poly.len();
            if cr.coord < near {
                classes.insert(surface.class_of((cr.edge.polygon, cr.edge.edge_index)));
            } else if cr.coord > 1.0 - near {
                classes.insert(surface.class_of((cr.edge.polygon, (cr.edge.edge_index + 1) % n)));
            }
        }
    }
    let mut out = Vec::new();
    for class in classes {
        for &corner in &surface.singularities[class].corners {
            for dir in [limit_dir, limit_dir.opposite()] {
                let Some(result) =
                    launch_separatrix(surface, corner, dir, &cfg.geodesic.return_map.trace)
                else {
                    continue;
                };
                if let TraceOutcome::HitSingularity { singularity } = result.outcome {
                    out.push(SaddleConnection {
                        start_singularity: class,
                        end_singularity: singularity,
                        start_corner: corner,
                        direction: dir,
                        chart_length: result.path_length,
                        signature: result.crossings.iter().map(|c| c.edge).collect(),
                    });
                }
            }
        }
    }
    out
}

/// Verdict of the large-cylinder search.
#[derive(Clone, Debug)]
pub enum VeechVerdict {
    /// A hyperbolic cylinder of angular extent at least π was found.
    FoundCylinder(Cylinder),
    /// No such cylinder within the sweep budget; absence is budget-qualified,
    /// not a proof.
    NoLargeCylinderFound { directions_checked: usize, cylinders_extended: usize, max_extent: f64 },
}

/// Search knobs for [`veech_criterion`].
#[derive(Clone, Copy, Debug)]
pub struct VeechConfig {
    /// Direction grid resolution over the full circle.
    pub grid: usize,
    pub extend: ExtendConfig,
}

impl Default for VeechConfig {
    fn default() -> Self {
        Self { grid: 360, extend: ExtendConfig::default() }
    }
}

/// Sweep a direction grid and extend every distinct hyperbolic family found.
/// Directions already covered by an extended family are skipped.
pub fn collect_cylinders(surface: &Surface, cfg: &VeechConfig) -> Vec<Cylinder> {
    let mut out: Vec<Cylinder> = Vec::new();
    let mut seen = alloc::collections::BTreeSet::new();
    for i in 0..cfg.grid {
        let d = DirectionAngle::new(math::TAU * i as f64 / cfg.grid as f64);
        let covered = out.iter().any(|c| {
            c.contains_direction(d) || c.contains_direction(d.opposite())
        });
        if covered {
            continue;
        }
        let scan = closed_geodesics_in_direction(surface, d, &cfg.extend.geodesic);
        for geo in &scan.hyperbolic {
            if !seen.insert(geo.canonical_signature()) {
                continue;
            }
            if let Ok(cyl) = extend_to_cylinder(surface, geo, &cfg.extend) {
                out.push(cyl);
            }
        }
    }
    out
}

/// Sweep a direction grid for hyperbolic geodesics, extend each new family,
/// and report the first cylinder of angle at least π.
pub fn veech_criterion(surface: &Surface, cfg: &VeechConfig) -> VeechVerdict {
    let mut checked = 0usize;
    let mut extended = 0usize;
    let mut max_extent = 0.0_f64;
    let mut covered: Vec<(f64, f64)> = Vec::new();
    let mut seen = alloc::collections::BTreeSet::new();

    for i in 0..cfg.grid {
        let d = DirectionAngle::new(math::TAU * i as f64 / cfg.grid as f64);
        if covered.iter().any(|&(lo, hi)| {
            let t = math::normalize_angle(d.radians() - lo);
            t < hi - lo
        }) {
            continue;
        }
        checked += 1;
        let scan = closed_geodesics_in_direction(surface, d, &cfg.extend.geodesic);
        for geo in &scan.hyperbolic {
            if !seen.insert(geo.canonical_signature()) {
                continue;
            }
            let Ok(cyl) = extend_to_cylinder(surface, geo, &cfg.extend) else {
                continue;
            };
            extended += 1;
            max_extent = max_extent.max(cyl.angular_extent);
            if cyl.spans_pi {
                return VeechVerdict::FoundCylinder(cyl);
            }
            covered.push((
                math::normalize_angle(cyl.direction_interval.0),
                math::normalize_angle(cyl.direction_interval.0) + cyl.angular_extent,
            ));
            // The reversed traversals live in the opposite interval.
            covered.push((
                math::normalize_angle(cyl.direction_interval.0 + math::PI),
                math::normalize_angle(cyl.direction_interval.0 + math::PI) + cyl.angular_extent,
            ));
        }
    }
    VeechVerdict::NoLargeCylinderFound { directions_checked: checked, cylinders_extended: extended, max_extent }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn core_geodesic(surface: &Surface, d: f64) -> ClosedGeodesic {
        let scan =
            closed_geodesics_in_direction(surface, DirectionAngle::new(d), &Default::default());
        scan.hyperbolic.into_iter().next().expect("core geodesic exists")
    }

    #[test]
    fn wedge_cylinder_extent_matches_alpha() {
        let alpha = math::PI / 3.0;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        let geo = core_geodesic(&s, alpha / 2.0);
        let cyl = extend_to_cylinder(&s, &geo, &ExtendConfig::default()).unwrap();
        assert!(
            (cyl.angular_extent - alpha).abs() < 1e-6,
            "extent {} vs {}",
            cyl.angular_extent,
            alpha
        );
        assert!(!cyl.spans_pi);
        // Interval endpoints at 0 and alpha.
        assert!(cyl.direction_interval.0.abs() < 1e-6);
        assert!((cyl.direction_interval.1 - alpha).abs() < 1e-6);
    }

    #[test]
    fn wedge_cylinder_past_pi_spans_pi() {
        let alpha = math::PI + 0.1;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        let geo = core_geodesic(&s, 0.7);
        let cyl = extend_to_cylinder(&s, &geo, &ExtendConfig::default()).unwrap();
        assert!((cyl.angular_extent - alpha).abs() < 1e-6, "extent {}", cyl.angular_extent);
        assert!(cyl.spans_pi);
    }

    #[test]
    fn flat_geodesic_cannot_extend() {
        let s = builders::build_torus().unwrap();
        let fake = ClosedGeodesic {
            signature: alloc::vec![EdgeRef::new(0, 0)],
            direction: DirectionAngle::new(1.0),
            holonomy: 1.0,
            base: CrossingRecord { edge: EdgeRef::new(0, 0), coord: 0.5, accumulated_ratio: 1.0 },
            is_hyperbolic: false,
        };
        assert!(matches!(
            extend_to_cylinder(&s, &fake, &ExtendConfig::default()),
            Err(CylinderError::NotHyperbolic)
        ));
    }

    #[test]
    fn veech_detector_on_builders() {
        let torus = builders::build_torus().unwrap();
        assert!(matches!(
            veech_criterion(&torus, &VeechConfig { grid: 64, ..Default::default() }),
            VeechVerdict::NoLargeCylinderFound { .. }
        ));

        let small = builders::build_dilation_cylinder(0.5, math::PI / 3.0).unwrap();
        match veech_criterion(&small, &VeechConfig { grid: 64, ..Default::default() }) {
            VeechVerdict::NoLargeCylinderFound { max_extent, .. } => {
                assert!((max_extent - math::PI / 3.0).abs() < 1e-6)
            }
            VeechVerdict::FoundCylinder(c) => panic!("unexpected large cylinder {c:?}"),
        }

        let big = builders::build_dilation_cylinder(0.5, math::PI + 0.1).unwrap();
        match veech_criterion(&big, &VeechConfig { grid: 64, ..Default::default() }) {
            VeechVerdict::FoundCylinder(c) => {
                assert!(c.angular_extent >= math::PI - 1e-6);
            }
            other => panic!("expected a large cylinder, got {other:?}"),
        }
    }
}
