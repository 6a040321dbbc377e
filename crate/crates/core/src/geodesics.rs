//! Closed geodesics of the directional flow in a fixed direction.
//!
//! A closed geodesic is hyperbolic when its holonomy ratio differs from 1;
//! hyperbolic geodesics are always reported in the orientation that makes
//! the holonomy contracting (λ < 1), which pins their direction on the
//! circle rather than the projective line. Flat one-parameter families
//! (holonomy exactly 1) are reported separately and are never hyperbolic.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::geom::DirectionAngle;
use crate::math;
use crate::return_map::{return_map_on_edge, ReturnMapConfig};
use crate::surface::{EdgeRef, Surface};
use crate::trace::{trace, CrossingRecord, FlowPoint, LimitCycleInfo, TraceOutcome};

/// A closed geodesic given by its cyclic crossing signature, the direction of
/// its contracting traversal, its holonomy ratio and a base crossing (the
/// fixed point of the first-return map on the base edge).
#[derive(Clone, Debug)]
pub struct ClosedGeodesic {
    /// Edges crossed in one period, in traversal order from the base.
    pub signature: Vec<EdgeRef>,
    /// Direction of the contracting traversal.
    pub direction: DirectionAngle,
    /// Per-period holonomy ratio in that orientation; < 1 for hyperbolic
    /// geodesics, exactly 1 for members of flat families.
    pub holonomy: f64,
    /// Fixed point of the return map on `base.edge`.
    pub base: CrossingRecord,
    pub is_hyperbolic: bool,
}

impl ClosedGeodesic {
    pub(crate) fn from_cycle(
        history: &[CrossingRecord],
        info: &LimitCycleInfo,
        direction: DirectionAngle,
    ) -> Self {
        let n = history.len();
        let g = info.period;
        let mut signature = Vec::with_capacity(g);
        signature.push(info.reference_edge);
        for cr in &history[n - g..n - 1] {
            signature.push(cr.edge);
        }
        ClosedGeodesic {
            signature,
            direction,
            holonomy: info.lambda,
            base: CrossingRecord {
                edge: info.reference_edge,
                coord: info.fixed_coord,
                accumulated_ratio: 1.0,
            },
            is_hyperbolic: true,
        }
    }

    /// Signature rotated to its lexicographically smallest rotation; equal
    /// for any two descriptions of the same oriented geodesic.
    pub fn canonical_signature(&self) -> Vec<EdgeRef> {
        canonical_rotation(&self.signature)
    }

    /// Stable content id derived from the canonical signature.
    pub fn content_id(&self) -> u64 {
        let mut bytes = Vec::new();
        for e in self.canonical_signature() {
            bytes.extend_from_slice(&(e.polygon as u64).to_le_bytes());
            bytes.extend_from_slice(&(e.edge_index as u64).to_le_bytes());
        }
        math::fnv1a(bytes)
    }

    /// The point of the surface the base crossing sits at.
    pub fn base_point(&self, surface: &Surface) -> FlowPoint {
        FlowPoint {
            polygon: self.base.edge.polygon,
            position: surface.polygons[self.base.edge.polygon]
                .edge_point(self.base.edge.edge_index, self.base.coord),
        }
    }
}

pub(crate) fn canonical_rotation(sig: &[EdgeRef]) -> Vec<EdgeRef> {
    let n = sig.len();
    if n == 0 {
        return Vec::new();
    }
    let mut best: Option<Vec<EdgeRef>> = None;
    for r in 0..n {
        let rot: Vec<EdgeRef> = (0..n).map(|i| sig[(r + i) % n]).collect();
        if best.as_ref().is_none_or(|b| rot < *b) {
            best = Some(rot);
        }
    }
    best.unwrap()
}

/// A one-parameter family of flat closed geodesics: a full subinterval of a
/// section on which the return map is the identity.
#[derive(Clone, Debug)]
pub struct FlatFamily {
    pub section: EdgeRef,
    pub domain: (f64, f64),
    pub signature: Vec<EdgeRef>,
    pub direction: DirectionAngle,
}

/// Everything found parallel to one direction.
#[derive(Clone, Debug, Default)]
pub struct GeodesicScan {
    pub hyperbolic: Vec<ClosedGeodesic>,
    pub flat_families: Vec<FlatFamily>,
}

/// Configuration for geodesic search.
#[derive(Clone, Copy, Debug, Default)]
pub struct GeodesicConfig {
    pub return_map: ReturnMapConfig,
}

/// Find the closed geodesics parallel to direction `d`.
///
/// Every edge section not parallel to `d` contributes its first-return map;
/// a branch with slope ≠ 1 whose fixed point lies inside the branch domain
/// carries a closed geodesic through that point, contracting when the slope
/// is below 1 and reported with reversed orientation otherwise. Both
/// traversal orientations are scanned — a geodesic crossing some section
/// several times per period is a first-return fixed point only on sections
/// it meets once, and only its contracting orientation yields wide, reliably
/// sampled branches. Results are deduplicated by cyclic signature; the list
/// is always finite.
pub fn closed_geodesics_in_direction(
    surface: &Surface,
    d: DirectionAngle,
    cfg: &GeodesicConfig,
) -> GeodesicScan {
    let mut scan = GeodesicScan::default();
    let mut seen: BTreeSet<Vec<EdgeRef>> = BTreeSet::new();
    scan_one_orientation(surface, d, cfg, &mut scan, &mut seen, true);
    scan_one_orientation(surface, d.opposite(), cfg, &mut scan, &mut seen, false);
    scan
}

fn scan_one_orientation(
    surface: &Surface,
    d: DirectionAngle,
    cfg: &GeodesicConfig,
    scan: &mut GeodesicScan,
    seen: &mut BTreeSet<Vec<EdgeRef>>,
    collect_flat: bool,
) {
    let mut seen_flat: BTreeSet<(EdgeRef, Vec<EdgeRef>)> = BTreeSet::new();

    let sections: Vec<EdgeRef> = surface
        .pairings
        .iter()
        .map(|p| p.e)
        .chain(
            surface
                .boundary_components
                .iter()
                .flat_map(|c| c.iter().copied()),
        )
        .collect();

    for section in sections {
        let sec_dir = surface.polygons[section.polygon].edge_dir(section.edge_index);
        if math::abs(math::sin(d.radians() - sec_dir)) < 1e-9 {
            continue;
        }
        let Ok(rm) = return_map_on_edge(surface, section, d, &cfg.return_map) else {
            continue;
        };
        for branch in &rm.branches {
            if math::abs(branch.slope - 1.0) <= 1e-9 {
                let mid = 0.5 * (branch.domain.0 + branch.domain.1);
                if collect_flat && math::abs(branch.eval(mid) - mid) <= 1e-9 {
                    let key = (section, branch.signature.clone());
                    if seen_flat.insert(key) {
                        scan.flat_families.push(FlatFamily {
                            section,
                            domain: branch.domain,
                            signature: branch.cycle_signature(),
                            direction: d,
                        });
                    }
                }
                continue;
            }
            let Some(fp) = branch.fixed_point() else { continue };
            let margin = 1e-12;
            if !(branch.domain.0 + margin < fp && fp < branch.domain.1 - margin) {
                continue;
            }
            let geo = if branch.slope < 1.0 {
                Some(ClosedGeodesic {
                    signature: branch.cycle_signature(),
                    direction: d,
                    holonomy: branch.slope,
                    base: CrossingRecord { edge: section, coord: fp, accumulated_ratio: 1.0 },
                    is_hyperbolic: true,
                })
            } else {
                // Expanding in `d`: rebuild in the contracting orientation by
                // tracing backwards from the fixed point.
                retrace_contracting(surface, section, fp, d.opposite(), cfg)
            };
            if let Some(geo) = geo {
                if seen.insert(geo.canonical_signature()) {
                    scan.hyperbolic.push(geo);
                }
            }
        }
    }
}

/// Trace from a point of a repelling cycle in the reversed direction, where
/// the same cycle is attracting, and return it in contracting form.
fn retrace_contracting(
    surface: &Surface,
    section: EdgeRef,
    coord: f64,
    back: DirectionAngle,
    cfg: &GeodesicConfig,
) -> Option<ClosedGeodesic> {
    let start = FlowPoint {
        polygon: section.polygon,
        position: surface.polygons[section.polygon].edge_point(section.edge_index, coord),
    };
    let result = trace(surface, start, back, &cfg.return_map.trace).ok()?;
    match result.outcome {
        TraceOutcome::LimitCycle(geo) => Some(geo),
        _ => None,
    }
}
