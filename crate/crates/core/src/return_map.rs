//! First-return maps of the directional flow on an edge cross-section.
//!
//! Restricted to a section edge, the flow induces a piecewise affine map of
//! the edge coordinate: each maximal interval of starts sharing one crossing
//! signature is an affine branch whose slope is the product of gluing ratios
//! along the signature. Branch boundaries are preimages of singularities
//! (separatrix hits); they are located by seeding with backward-separatrix
//! crossings and bisecting signature changes down to a coordinate tolerance.

use alloc::vec::Vec;

use crate::error::ReturnMapError;
use crate::geom::{self, DirectionAngle};
use crate::math;
use crate::surface::{EdgeRef, Surface};
use crate::trace::{
    confirm_cycle, cycle_key, detect_limit_cycle_excluding, launch_separatrix, CrossingRecord,
    FlowPoint, StepEvent, TraceConfig, Tracer,
};

/// Why a subinterval of the section carries no first return.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum GapReason {
    /// The flow leaves through the surface boundary before returning.
    Boundary,
    /// The flow locks onto a limit cycle that avoids the section.
    Trapped,
    /// The trace budget ran out before a return.
    Budget,
    /// The sample hit a vertex before returning (boundary sliver between
    /// branches, at most the bisection tolerance wide).
    SingularHit,
}

/// One affine branch `x ↦ slope·x + offset` of the first-return map.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Open domain in section coordinates.
    pub domain: (f64, f64),
    pub slope: f64,
    pub offset: f64,
    /// Edges crossed strictly between leaving and returning to the section.
    pub signature: Vec<EdgeRef>,
    /// Side of the section on which the return lands (the section edge
    /// itself or its gluing partner).
    pub return_edge: EdgeRef,
}

impl Branch {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.offset
    }

    /// Fixed point of the branch map, if the branch is not flat.
    pub fn fixed_point(&self) -> Option<f64> {
        if math::abs(self.slope - 1.0) <= 1e-9 {
            return None;
        }
        Some(self.offset / (1.0 - self.slope))
    }

    /// Full cycle of edges crossed by the closed trajectory through the
    /// fixed point, anchored at the section crossing.
    pub fn cycle_signature(&self) -> Vec<EdgeRef> {
        let mut sig = self.signature.clone();
        sig.push(self.return_edge);
        sig
    }
}

/// A non-returning subinterval.
#[derive(Clone, Debug)]
pub struct Gap {
    pub domain: (f64, f64),
    pub reason: GapReason,
}

/// The first-return map of direction `d` on a section edge: disjoint affine
/// branches plus explicitly reported gaps. Domains partition `(0, 1)` up to
/// the bisection tolerance.
#[derive(Clone, Debug)]
pub struct PiecewiseAffineMap {
    pub section: EdgeRef,
    pub direction: DirectionAngle,
    pub branches: Vec<Branch>,
    pub gaps: Vec<Gap>,
}

impl PiecewiseAffineMap {
    /// Branch containing `x`, if any.
    pub fn branch_at(&self, x: f64) -> Option<&Branch> {
        self.branches.iter().find(|b| b.domain.0 < x && x < b.domain.1)
    }
}

/// Construction knobs for [`return_map_on_edge`].
#[derive(Clone, Copy, Debug)]
pub struct ReturnMapConfig {
    pub trace: TraceConfig,
    /// Uniform seed samples of the section before refinement.
    pub initial_samples: usize,
    /// Bisection tolerance on the edge coordinate for branch boundaries.
    pub bisect_tol: f64,
    /// Also seed with backward-separatrix crossings of the section, which
    /// are the exact branch boundaries reachable within budget.
    pub separatrix_seeds: bool,
}

impl Default for ReturnMapConfig {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            initial_samples: 128,
            bisect_tol: 1e-12,
            separatrix_seeds: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum SampleKind {
    Returned { signature: Vec<EdgeRef>, return_edge: EdgeRef },
    Ended(GapReason),
}

#[derive(Clone, Debug)]
struct Sample {
    x: f64,
    kind: SampleKind,
    /// Return coordinate for `Returned` samples.
    y: f64,
}

/// First return of the flow to the section from section coordinate `x`.
fn sample_return(
    surface: &Surface,
    section: EdgeRef,
    partner: Option<EdgeRef>,
    d: DirectionAngle,
    x: f64,
    cfg: &ReturnMapConfig,
) -> Sample {
    let u = d.unit();
    let sec_poly = &surface.polygons[section.polygon];
    let inward = geom::cross(sec_poly.edge_vec(section.edge_index), u) > 0.0;
    let start = if inward {
        FlowPoint { polygon: section.polygon, position: sec_poly.edge_point(section.edge_index, x) }
    } else if let Some(p) = partner {
        FlowPoint {
            polygon: p.polygon,
            position: surface.polygons[p.polygon].edge_point(p.edge_index, 1.0 - x),
        }
    } else {
        // Boundary section with the flow leaving the surface.
        return Sample { x, kind: SampleKind::Ended(GapReason::Boundary), y: 0.0 };
    };

    let mut tracer = Tracer::new(surface, start, d, &cfg.trace);
    let mut crossings: Vec<CrossingRecord> = Vec::new();
    let mut rejected = alloc::collections::BTreeSet::new();
    loop {
        match tracer.step() {
            StepEvent::Crossed(cr) => {
                if cr.edge == section || Some(cr.edge) == partner {
                    let y = if cr.edge == section { cr.coord } else { 1.0 - cr.coord };
                    return Sample {
                        x,
                        kind: SampleKind::Returned { signature: crossings.iter().map(|c| c.edge).collect(), return_edge: cr.edge },
                        y,
                    };
                }
                crossings.push(cr);
                while let Some(info) =
                    detect_limit_cycle_excluding(&crossings, &cfg.trace, Some(&rejected))
                {
                    if confirm_cycle(surface, d, &crossings, &info, &cfg.trace) {
                        return Sample { x, kind: SampleKind::Ended(GapReason::Trapped), y: 0.0 };
                    }
                    rejected.insert(cycle_key(&info));
                }
                if crossings.len() >= cfg.trace.max_crossings {
                    return Sample { x, kind: SampleKind::Ended(GapReason::Budget), y: 0.0 };
                }
            }
            StepEvent::HitVertex { .. } => {
                return Sample { x, kind: SampleKind::Ended(GapReason::SingularHit), y: 0.0 }
            }
            StepEvent::HitBoundary { edge, coord } => {
                // An unglued section is its own one-sided return target.
                if edge == section {
                    return Sample {
                        x,
                        kind: SampleKind::Returned {
                            signature: crossings.iter().map(|c| c.edge).collect(),
                            return_edge: edge,
                        },
                        y: coord,
                    };
                }
                return Sample { x, kind: SampleKind::Ended(GapReason::Boundary), y: 0.0 };
            }
            StepEvent::OutOfPath | StepEvent::NoExit => {
                return Sample { x, kind: SampleKind::Ended(GapReason::Budget), y: 0.0 }
            }
        }
    }
}

/// Product of the gluing ratios applied along a branch, including the final
/// section crossing: the slope of the branch in section coordinates. For a
/// glued section this equals the holonomy of the full cycle through a fixed
/// point; an unglued (boundary) section contributes no return factor.
fn branch_slope(surface: &Surface, signature: &[EdgeRef], return_edge: EdgeRef) -> f64 {
    let mut acc = 1.0;
    for e in signature {
        acc *= surface.crossing_side(*e).expect("signature edges are glued").ratio;
    }
    acc * surface.crossing_side(return_edge).map_or(1.0, |s| s.ratio)
}

/// Compute the first-return map of direction `d` on the given section edge.
///
/// Gap subintervals (boundary escape, trapping, budget) are reported, never
/// silently merged into branches.
pub fn return_map_on_edge(
    surface: &Surface,
    section: EdgeRef,
    d: DirectionAngle,
    cfg: &ReturnMapConfig,
) -> Result<PiecewiseAffineMap, ReturnMapError> {
    let poly = &surface.polygons[section.polygon];
    let sec_dir = poly.edge_dir(section.edge_index);
    let sine = math::abs(math::sin(d.radians() - sec_dir));
    if sine < 1e-12 {
        return Err(ReturnMapError::SectionParallelToDirection);
    }
    let partner = surface.crossing_side(section).map(|s| s.other);

    // Seed coordinates: uniform grid plus backward-separatrix hits.
    let mut xs: Vec<f64> = Vec::new();
    let n0 = cfg.initial_samples.max(8);
    for i in 0..n0 {
        xs.push((i as f64 + 0.5) / n0 as f64);
    }
    if cfg.separatrix_seeds {
        for seed in separatrix_split_points(surface, section, partner, d, cfg) {
            // Sample just either side of each exact split point.
            let h = cfg.bisect_tol.max(1e-12) * 4.0;
            if seed - h > 0.0 {
                xs.push(seed - h);
            }
            if seed + h < 1.0 {
                xs.push(seed + h);
            }
        }
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    xs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    let mut samples: Vec<Sample> = xs
        .iter()
        .map(|&x| sample_return(surface, section, partner, d, x, cfg))
        .collect();

    // Refine every signature change down to the bisection tolerance.
    let mut budget = 20_000usize;
    let mut i = 0;
    while i + 1 < samples.len() {
        let (a, b) = (&samples[i], &samples[i + 1]);
        if a.kind == b.kind || b.x - a.x <= cfg.bisect_tol {
            i += 1;
            continue;
        }
        if budget == 0 {
            i += 1;
            continue;
        }
        budget -= 1;
        let mid = 0.5 * (a.x + b.x);
        let s = sample_return(surface, section, partner, d, mid, cfg);
        samples.insert(i + 1, s);
    }

    // Assemble maximal constant-signature runs into branches and gaps.
    let mut branches = Vec::new();
    let mut gaps = Vec::new();
    let mut run_start_idx = 0;
    let mut lo = 0.0;
    for j in 1..=samples.len() {
        let run_ends = j == samples.len() || samples[j].kind != samples[run_start_idx].kind;
        if !run_ends {
            continue;
        }
        let hi = if j == samples.len() { 1.0 } else { 0.5 * (samples[j - 1].x + samples[j].x) };
        let rep = &samples[run_start_idx];
        match &rep.kind {
            SampleKind::Returned { signature, return_edge } => {
                let slope = branch_slope(surface, signature, *return_edge);
                let offset = rep.y - slope * rep.x;
                branches.push(Branch {
                    domain: (lo, hi),
                    slope,
                    offset,
                    signature: signature.clone(),
                    return_edge: *return_edge,
                });
            }
            SampleKind::Ended(reason) => gaps.push(Gap { domain: (lo, hi), reason: *reason }),
        }
        lo = hi;
        run_start_idx = j;
    }

    Ok(PiecewiseAffineMap { section, direction: d, branches, gaps })
}

/// Section coordinates cut out by backward separatrices: points whose
/// forward flow reaches a vertex before returning. These are the exact
/// branch boundaries (up to trace budget).
fn separatrix_split_points(
    surface: &Surface,
    section: EdgeRef,
    partner: Option<EdgeRef>,
    d: DirectionAngle,
    cfg: &ReturnMapConfig,
) -> Vec<f64> {
    let mut out = Vec::new();
    let back = d.opposite();
    for corner in surface.corners() {
        let Some(result) = launch_separatrix(surface, corner, back, &cfg.trace) else {
            continue;
        };
        for cr in &result.crossings {
            if cr.edge == section {
                out.push(cr.coord);
            } else if Some(cr.edge) == partner {
                out.push(1.0 - cr.coord);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    #[test]
    fn torus_vertical_on_horizontal_section_is_identity() {
        let s = builders::build_torus().unwrap();
        let d = DirectionAngle::new(core::f64::consts::FRAC_PI_2);
        let rm = return_map_on_edge(&s, EdgeRef::new(0, 0), d, &ReturnMapConfig::default()).unwrap();
        assert_eq!(rm.branches.len(), 1, "gaps: {:?}", rm.gaps);
        let b = &rm.branches[0];
        assert!((b.slope - 1.0).abs() < 1e-12);
        assert!(b.offset.abs() < 1e-9);
        assert!(b.domain.0 < 1e-9 && b.domain.1 > 1.0 - 1e-9);
    }

    #[test]
    fn section_parallel_to_direction_rejected() {
        let s = builders::build_torus().unwrap();
        let d = DirectionAngle::new(0.0);
        assert!(matches!(
            return_map_on_edge(&s, EdgeRef::new(0, 0), d, &ReturnMapConfig::default()),
            Err(ReturnMapError::SectionParallelToDirection)
        ));
    }

    #[test]
    fn cylinder_chord_section_contracts_with_interior_fixed_point() {
        let alpha = math::PI / 3.0;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        let d = DirectionAngle::new(math::PI / 6.0);
        let rm = return_map_on_edge(&s, EdgeRef::new(0, 0), d, &ReturnMapConfig::default()).unwrap();
        assert_eq!(rm.branches.len(), 1);
        let b = &rm.branches[0];
        assert!((b.slope - 0.5).abs() < 1e-9, "slope {}", b.slope);
        let fp = b.fixed_point().unwrap();
        // Symmetric direction: the trapped ray meets the chord at its middle.
        assert!((fp - 0.5).abs() < 1e-9, "fixed point {fp}");
        assert!(b.domain.0 < fp && fp < b.domain.1);
    }

    #[test]
    fn branch_prediction_matches_traced_first_return() {
        let tc = builders::build_two_chamber(Default::default()).unwrap();
        let s = &tc.surface;
        let d = DirectionAngle::new(0.83);
        let section = EdgeRef::new(0, 0);
        let rm = return_map_on_edge(s, section, d, &ReturnMapConfig::default()).unwrap();
        assert!(rm.branches.len() >= 2, "branches: {}", rm.branches.len());
        for b in &rm.branches {
            let w = b.domain.1 - b.domain.0;
            if w < 1e-6 {
                continue;
            }
            let x = 0.5 * (b.domain.0 + b.domain.1);
            let predicted = b.eval(x);
            let cfg = ReturnMapConfig::default();
            let sample = sample_return(s, section, s.crossing_side(section).map(|c| c.other), d, x, &cfg);
            match sample.kind {
                SampleKind::Returned { .. } => {
                    assert!((sample.y - predicted).abs() < 1e-9, "y {} vs {}", sample.y, predicted)
                }
                other => panic!("midpoint of a branch failed to return: {other:?}"),
            }
        }
    }
}
