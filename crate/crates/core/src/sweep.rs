//! Morse-Smale classification of directions.
//!
//! The behaviour of separatrices controls the whole flow: once every
//! separatrix in a direction and its reverse terminates (in a singularity,
//! an attracting cycle, or through the boundary), so does every trajectory.
//! The classifier traces all separatrices, promotes the verdict accordingly,
//! and guards the promotion with a handful of seeded probe trajectories.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::geodesics::ClosedGeodesic;
use crate::geom::DirectionAngle;
use crate::math::{self, SplitMix64};
use crate::saddle::SaddleConnection;
use crate::surface::Surface;
use crate::trace::{launch_separatrix, trace, FlowPoint, TraceConfig, TraceOutcome};

/// Verdict for one direction of the circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum DirectionClass {
    /// Every separatrix accumulates on an attracting closed geodesic (and no
    /// saddle connection exists): every trajectory is critical or trapped.
    MorseSmale,
    /// Some separatrix connects two singularities.
    SaddleConnectionDirection,
    /// Every separatrix leaves through the boundary and no attractor was
    /// seen; all trajectories terminate on the boundary or in a vertex.
    BoundaryEscape,
    /// The budget ran out before every separatrix resolved.
    Unresolved,
}

/// Classification of one direction with its evidence.
#[derive(Clone, Debug)]
pub struct DirectionClassification {
    pub direction: DirectionAngle,
    pub class: DirectionClass,
    /// Attracting geodesics seen by separatrices or probes (deduplicated).
    pub witnesses: Vec<ClosedGeodesic>,
    /// A certified connection for saddle-connection directions.
    pub connection: Option<SaddleConnection>,
    pub separatrices_traced: usize,
    pub exhausted: usize,
}

impl DirectionClassification {
    pub fn has_hyperbolic(&self) -> bool {
        !self.witnesses.is_empty()
    }
}

/// Sweep configuration; all randomness flows from `seed`.
#[derive(Clone, Copy, Debug)]
pub struct SweepConfig {
    pub trace: TraceConfig,
    /// Random interior trajectories spot-checking a Morse-Smale promotion.
    pub probes: usize,
    pub seed: u64,
    /// Histogram resolution over the circle.
    pub bins: usize,
    /// One level of adaptive refinement at class boundaries.
    pub refine: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self { trace: TraceConfig::default(), probes: 16, seed: 7, bins: 100, refine: true }
    }
}

/// Classify one direction by tracing every separatrix in it and its reverse.
pub fn classify_direction(
    surface: &Surface,
    d: DirectionAngle,
    cfg: &SweepConfig,
) -> DirectionClassification {
    let mut witnesses: Vec<ClosedGeodesic> = Vec::new();
    let mut seen = BTreeSet::new();
    let mut connection: Option<SaddleConnection> = None;
    let mut exhausted = 0usize;
    let mut boundary_exits = 0usize;
    let mut traced = 0usize;

    for sing in &surface.singularities {
        if !sing.in_sigma() {
            continue;
        }
        for &corner in &sing.corners {
            for dir in [d, d.opposite()] {
                let Some(result) = launch_separatrix(surface, corner, dir, &cfg.trace) else {
                    continue;
                };
                traced += 1;
                match result.outcome {
                    TraceOutcome::LimitCycle(geo) => {
                        if seen.insert(geo.canonical_signature()) {
                            witnesses.push(geo);
                        }
                    }
                    TraceOutcome::HitSingularity { singularity } => {
                        if connection.is_none() {
                            connection = Some(SaddleConnection {
                                start_singularity: sing.id,
                                end_singularity: singularity,
                                start_corner: corner,
                                direction: dir,
                                chart_length: result.path_length,
                                signature: result.crossings.iter().map(|c| c.edge).collect(),
                            });
                        }
                    }
                    TraceOutcome::CrossedBoundary { .. } => boundary_exits += 1,
                    TraceOutcome::BudgetExhausted => exhausted += 1,
                }
            }
        }
    }

    let mut class = if connection.is_some() {
        DirectionClass::SaddleConnectionDirection
    } else if exhausted > 0 {
        DirectionClass::Unresolved
    } else if !witnesses.is_empty() {
        DirectionClass::MorseSmale
    } else if boundary_exits > 0 {
        DirectionClass::BoundaryEscape
    } else {
        DirectionClass::Unresolved
    };

    // Spot-check the promotion from separatrices to all trajectories.
    if class == DirectionClass::MorseSmale && cfg.probes > 0 {
        let mut rng = SplitMix64::fork(cfg.seed, d.radians().to_bits());
        for i in 0..cfg.probes {
            let poly = (rng.next_u64() % surface.polygons.len() as u64) as usize;
            let start = random_interior(surface, poly, &mut rng);
            let Ok(result) = trace(surface, start, if i % 2 == 0 { d } else { d.opposite() }, &cfg.trace)
            else {
                continue;
            };
            match result.outcome {
                TraceOutcome::LimitCycle(geo) => {
                    if seen.insert(geo.canonical_signature()) {
                        witnesses.push(geo);
                    }
                }
                TraceOutcome::BudgetExhausted => {
                    class = DirectionClass::Unresolved;
                    exhausted += 1;
                }
                _ => {}
            }
        }
    }

    DirectionClassification {
        direction: d,
        class,
        witnesses,
        connection,
        separatrices_traced: traced,
        exhausted,
    }
}

fn random_interior(surface: &Surface, poly: usize, rng: &mut SplitMix64) -> FlowPoint {
    let p = &surface.polygons[poly];
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in &p.vertices {
        lo_x = lo_x.min(v.x);
        hi_x = hi_x.max(v.x);
        lo_y = lo_y.min(v.y);
        hi_y = hi_y.max(v.y);
    }
    for _ in 0..256 {
        let cand = crate::geom::PlanarPoint::new(rng.in_range(lo_x, hi_x), rng.in_range(lo_y, hi_y));
        if p.contains(&cand, 0.0) {
            return FlowPoint { polygon: poly, position: cand };
        }
    }
    FlowPoint { polygon: poly, position: p.vertices[0] }
}

/// One classified grid direction of a sweep.
#[derive(Clone, Debug)]
pub struct SweepEntry {
    pub direction: f64,
    pub class: DirectionClass,
    pub has_hyperbolic: bool,
    pub witness_count: usize,
    pub refined: bool,
}

/// Per-bin tallies over a uniform partition of the circle.
#[derive(Clone, Copy, Debug, Default)]
pub struct BinStats {
    pub total: usize,
    pub with_hyperbolic: usize,
    pub morse_smale: usize,
    pub saddle_connection: usize,
    pub boundary: usize,
    pub unresolved: usize,
}

/// Aggregated sweep over the circle.
#[derive(Clone, Debug)]
pub struct SweepReport {
    pub surface_id: u64,
    pub n_requested: usize,
    pub seed: u64,
    pub max_crossings: usize,
    /// Entries sorted by direction, refinement included.
    pub entries: Vec<SweepEntry>,
    pub bins: Vec<BinStats>,
    /// Maximal runs of consecutive entries carrying hyperbolic witnesses.
    pub hyperbolic_intervals: Vec<(f64, f64)>,
    pub morse_smale: usize,
    pub saddle_connection: usize,
    pub boundary: usize,
    pub unresolved: usize,
}

impl SweepReport {
    pub fn morse_smale_fraction(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.morse_smale as f64 / self.entries.len() as f64
    }

    pub fn bins_with_hyperbolic(&self) -> usize {
        self.bins.iter().filter(|b| b.with_hyperbolic > 0).count()
    }
}

/// Classify a uniform grid of directions (plus one refinement level around
/// class changes) and aggregate per-bin statistics. Deterministic for a
/// fixed configuration.
pub fn sweep(surface: &Surface, n_directions: usize, cfg: &SweepConfig) -> SweepReport {
    let n = n_directions.max(1);
    let mut classified: Vec<(f64, DirectionClassification, bool)> = (0..n)
        .map(|i| {
            let theta = math::TAU * i as f64 / n as f64;
            (theta, classify_direction(surface, DirectionAngle::new(theta), cfg), false)
        })
        .collect();

    if cfg.refine && n >= 2 {
        let mut refined = Vec::new();
        for i in 0..n {
            let (t0, c0, _) = &classified[i];
            let (t1, c1, _) = &classified[(i + 1) % n];
            if c0.class != c1.class {
                let mid = if i + 1 == n {
                    0.5 * (t0 + t1 + math::TAU)
                } else {
                    0.5 * (t0 + t1)
                };
                let mid = math::normalize_angle(mid);
                refined.push((
                    mid,
                    classify_direction(surface, DirectionAngle::new(mid), cfg),
                    true,
                ));
            }
        }
        classified.extend(refined);
        classified.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    }

    let entries: Vec<SweepEntry> = classified
        .iter()
        .map(|(t, c, refined)| SweepEntry {
            direction: *t,
            class: c.class,
            has_hyperbolic: c.has_hyperbolic(),
            witness_count: c.witnesses.len(),
            refined: *refined,
        })
        .collect();

    let bins_n = cfg.bins.max(1);
    let mut bins = alloc::vec![BinStats::default(); bins_n];
    let mut counts = [0usize; 4];
    for e in &entries {
        let b = ((e.direction / math::TAU * bins_n as f64) as usize).min(bins_n - 1);
        bins[b].total += 1;
        if e.has_hyperbolic {
            bins[b].with_hyperbolic += 1;
        }
        match e.class {
            DirectionClass::MorseSmale => {
                bins[b].morse_smale += 1;
                counts[0] += 1;
            }
            DirectionClass::SaddleConnectionDirection => {
                bins[b].saddle_connection += 1;
                counts[1] += 1;
            }
            DirectionClass::BoundaryEscape => {
                bins[b].boundary += 1;
                counts[2] += 1;
            }
            DirectionClass::Unresolved => {
                bins[b].unresolved += 1;
                counts[3] += 1;
            }
        }
    }

    let hyperbolic_intervals = hyperbolic_runs(&entries);

    SweepReport {
        surface_id: surface.content_id(),
        n_requested: n,
        seed: cfg.seed,
        max_crossings: cfg.trace.max_crossings,
        entries,
        bins,
        hyperbolic_intervals,
        morse_smale: counts[0],
        saddle_connection: counts[1],
        boundary: counts[2],
        unresolved: counts[3],
    }
}

fn hyperbolic_runs(entries: &[SweepEntry]) -> Vec<(f64, f64)> {
    let n = entries.len();
    if n == 0 {
        return Vec::new();
    }
    let mut runs: Vec<(usize, usize)> = Vec::new();
    let mut start: Option<usize> = None;
    for (i, e) in entries.iter().enumerate() {
        match (e.has_hyperbolic, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                runs.push((s, i - 1));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        runs.push((s, n - 1));
    }
    // Merge a wrap-around pair.
    if runs.len() >= 2 {
        let first = runs[0];
        let last = *runs.last().unwrap();
        if first.0 == 0 && last.1 == n - 1 && runs.len() > 1 {
            runs[0] = (last.0, first.1);
            runs.pop();
        }
    }
    runs.iter()
        .map(|&(s, e)| (entries[s].direction, entries[e].direction))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    fn cfg(max_crossings: usize) -> SweepConfig {
        SweepConfig { trace: TraceConfig::with_max_crossings(max_crossings), ..Default::default() }
    }

    #[test]
    fn torus_rational_slopes_are_saddle_connections() {
        let s = builders::build_torus().unwrap();
        for d in [0.0, core::f64::consts::FRAC_PI_4, core::f64::consts::FRAC_PI_2] {
            let c = classify_direction(&s, DirectionAngle::new(d), &cfg(256));
            assert_eq!(c.class, DirectionClass::SaddleConnectionDirection, "dir {d}");
            assert!(c.connection.is_some());
        }
    }

    #[test]
    fn torus_irrational_slope_is_unresolved_with_no_witnesses() {
        let s = builders::build_torus().unwrap();
        let c = classify_direction(&s, DirectionAngle::new(1.0), &cfg(256));
        assert_eq!(c.class, DirectionClass::Unresolved);
        assert!(c.witnesses.is_empty());
    }

    #[test]
    fn cylinder_trapped_sector_is_morse_smale_outside_escapes() {
        let alpha = math::PI / 3.0;
        let s = builders::build_dilation_cylinder(0.5, alpha).unwrap();
        let inside = classify_direction(&s, DirectionAngle::new(alpha / 2.0), &cfg(512));
        assert_eq!(inside.class, DirectionClass::MorseSmale, "{inside:?}");
        assert!(inside.has_hyperbolic());

        let reversed = classify_direction(
            &s,
            DirectionAngle::new(alpha / 2.0 + math::PI),
            &cfg(512),
        );
        assert_eq!(reversed.class, DirectionClass::MorseSmale);

        let outside = classify_direction(&s, DirectionAngle::new(alpha + 0.4), &cfg(512));
        assert_eq!(outside.class, DirectionClass::BoundaryEscape, "{outside:?}");
        assert!(!outside.has_hyperbolic());
    }

    #[test]
    fn classification_is_symmetric_under_reversal() {
        let tc = builders::build_two_chamber(Default::default()).unwrap();
        for d in [0.3, 0.9, 2.0] {
            let a = classify_direction(&tc.surface, DirectionAngle::new(d), &cfg(512));
            let b = classify_direction(
                &tc.surface,
                DirectionAngle::new(d + math::PI),
                &cfg(512),
            );
            assert_eq!(a.class, b.class, "dir {d}");
        }
    }

    #[test]
    fn torus_sweep_has_no_hyperbolic_and_no_morse_smale() {
        let s = builders::build_torus().unwrap();
        let report = sweep(&s, 64, &cfg(200));
        assert_eq!(report.morse_smale, 0);
        assert!(report.entries.iter().all(|e| !e.has_hyperbolic));
        assert!(report.hyperbolic_intervals.is_empty());
    }

    #[test]
    fn budget_increase_never_unresolves() {
        let tc = builders::build_two_chamber(Default::default()).unwrap();
        let small = cfg(192);
        let large = cfg(384);
        for i in 0..24 {
            let d = DirectionAngle::new(math::TAU * i as f64 / 24.0 + 0.013);
            let a = classify_direction(&tc.surface, d, &small);
            let b = classify_direction(&tc.surface, d, &large);
            if a.class != DirectionClass::Unresolved {
                assert_ne!(b.class, DirectionClass::Unresolved, "dir {}", d.radians());
            }
        }
    }
}
