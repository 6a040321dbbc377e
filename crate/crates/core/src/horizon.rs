//! Horizon tests for saddle connections.
//!
//! A saddle connection is a horizon connection when some finite bound caps
//! the number of times any single trajectory can cross it. Sampling can only
//! certify lower bounds; the one certificate this module issues is
//! topological: if cutting the surface open along the connection
//! disconnects it, trajectories cross in one sense only and never twice.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::HorizonError;
use crate::geom::{self, DirectionAngle, PlanarPoint};
use crate::math::{self, SplitMix64};
use crate::saddle::{self, SaddleConnection};
use crate::surface::{Corner, EdgeRef, Surface, SurfaceSpec};
use crate::trace::{trace, FlowPoint, TraceConfig, TraceResult};

/// Result of cutting a surface open along a saddle connection.
#[derive(Clone, Debug)]
pub struct CutResult {
    /// Connected components of the cut surface, each independently valid.
    pub components: Vec<Surface>,
    pub euler_before: i64,
    pub euler_after: i64,
}

/// Cut the surface open along a saddle connection.
///
/// The chain of polygons the connection traverses is split along its
/// developed segments; each segment produces two unglued banks, and the
/// endpoints become boundary singularities of the reglued components.
pub fn cut_along(surface: &Surface, sc: &SaddleConnection) -> Result<CutResult, HorizonError> {
    let euler_before = surface.euler_characteristic;

    // A connection running along a complex edge cuts by ungluing that edge.
    if let Some(edge) = sc.as_edge(surface) {
        let components = match surface.pairing_index_of(edge) {
            None => vec![surface.clone()],
            Some(skip) => reassemble(
                surface.polygons.iter().map(|p| p.vertices.clone()).collect(),
                surface
                    .pairings
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, p)| (p.e, p.f))
                    .collect(),
                marked_corners(surface),
            )?,
        };
        let euler_after = components.iter().map(|c| c.euler_characteristic).sum();
        return Ok(CutResult { components, euler_before, euler_after });
    }

    // General chord cut: confirm the chain, then subdivide each polygon it
    // traverses.
    let result = saddle::verify(surface, sc.start_corner, sc.direction, sc.chart_length)
        .ok_or(HorizonError::NotASaddleConnection)?;
    let segments = result.segments(surface);

    // Split coordinates per edge: chord endpoints plus the mirror images from
    // each gluing partner.
    let mut splits: BTreeMap<EdgeRef, Vec<f64>> = BTreeMap::new();
    let add_split = |edge: EdgeRef, s: f64, splits: &mut BTreeMap<EdgeRef, Vec<f64>>| {
        splits.entry(edge).or_default().push(s);
    };
    let mut chord_ends: Vec<(usize, NodeSpot, NodeSpot)> = Vec::new();
    for (k, (poly, a, b)) in segments.iter().enumerate() {
        let spot_a = if k == 0 {
            NodeSpot::Vertex(sc.start_corner.1)
        } else {
            // Entry through the partner of the previous crossing.
            let prev = result.crossings[k - 1];
            let side = surface.crossing_side(prev.edge).expect("crossed edges are glued");
            let s = 1.0 - prev.coord;
            add_split(side.other, s, &mut splits);
            NodeSpot::OnEdge { edge: side.other.edge_index, s }
        };
        let spot_b = if k + 1 == segments.len() {
            let v = nearest_vertex(surface, *poly, b);
            NodeSpot::Vertex(v)
        } else {
            let cr = result.crossings[k];
            add_split(cr.edge, cr.coord, &mut splits);
            NodeSpot::OnEdge { edge: cr.edge.edge_index, s: cr.coord }
        };
        chord_ends.push((*poly, spot_a, spot_b));
        let _ = a;
    }
    // Mirror split points onto gluing partners.
    let mirrored: Vec<(EdgeRef, f64)> = splits
        .iter()
        .flat_map(|(edge, ss)| {
            let side = surface.crossing_side(*edge);
            ss.iter()
                .filter_map(move |s| side.as_ref().map(|sd| (sd.other, 1.0 - s)))
                .collect::<Vec<_>>()
        })
        .collect();
    for (edge, s) in mirrored {
        splits.entry(edge).or_default().push(s);
    }
    for ss in splits.values_mut() {
        ss.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ss.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    }

    // Subdivide every polygon into faces; collect provenance for regluing.
    let mut new_polygons: Vec<Vec<PlanarPoint>> = Vec::new();
    let mut edge_lookup: BTreeMap<(usize, usize, i64), (usize, usize)> = BTreeMap::new();
    let mut vertex_lookup: BTreeMap<Corner, (usize, usize)> = BTreeMap::new();
    for (pid, poly) in surface.polygons.iter().enumerate() {
        let chords: Vec<(NodeSpot, NodeSpot)> = chord_ends
            .iter()
            .filter(|(p, _, _)| *p == pid)
            .map(|(_, a, b)| (*a, *b))
            .collect();
        let per_edge: Vec<Vec<f64>> = (0..poly.len())
            .map(|i| splits.get(&EdgeRef::new(pid, i)).cloned().unwrap_or_default())
            .collect();
        subdivide_polygon(
            pid,
            &poly.vertices,
            &per_edge,
            &chords,
            &mut new_polygons,
            &mut edge_lookup,
            &mut vertex_lookup,
        );
    }

    // Reglue boundary sub-edges pairwise; chord banks stay open.
    let mut new_pairings: Vec<(EdgeRef, EdgeRef)> = Vec::new();
    for pairing in &surface.pairings {
        let ss = {
            let mut v = vec![0.0];
            v.extend(splits.get(&pairing.e).cloned().unwrap_or_default());
            v.push(1.0);
            v
        };
        for w in ss.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi - lo < 1e-12 {
                continue;
            }
            let a = edge_lookup
                .get(&(pairing.e.polygon, pairing.e.edge_index, quant(lo)))
                .copied()
                .ok_or(HorizonError::NotASaddleConnection)?;
            let b = edge_lookup
                .get(&(pairing.f.polygon, pairing.f.edge_index, quant(1.0 - hi)))
                .copied()
                .ok_or(HorizonError::NotASaddleConnection)?;
            new_pairings.push((EdgeRef::new(a.0, a.1), EdgeRef::new(b.0, b.1)));
        }
    }

    let marked: Vec<(usize, usize)> = marked_corners(surface)
        .into_iter()
        .filter_map(|c| vertex_lookup.get(&c).copied())
        .collect();

    let components = reassemble(new_polygons, new_pairings, marked)?;
    let euler_after = components.iter().map(|c| c.euler_characteristic).sum();
    Ok(CutResult { components, euler_before, euler_after })
}

fn quant(s: f64) -> i64 {
    math::floor(s / 1e-9 + 0.5) as i64
}

fn nearest_vertex(surface: &Surface, poly: usize, p: &PlanarPoint) -> usize {
    let verts = &surface.polygons[poly].vertices;
    let mut best = 0;
    for v in 1..verts.len() {
        if verts[v].dist(p) < verts[best].dist(p) {
            best = v;
        }
    }
    best
}

fn marked_corners(surface: &Surface) -> Vec<Corner> {
    surface
        .singularities
        .iter()
        .filter(|s| s.is_marked)
        .map(|s| s.corners[0])
        .collect()
}

/// Endpoint of a chord within one polygon.
#[derive(Clone, Copy, Debug)]
enum NodeSpot {
    Vertex(usize),
    OnEdge { edge: usize, s: f64 },
}

/// Split a simple polygon along pairwise disjoint chords and append the
/// resulting faces, recording where each boundary sub-edge and original
/// vertex went.
fn subdivide_polygon(
    pid: usize,
    vertices: &[PlanarPoint],
    per_edge_splits: &[Vec<f64>],
    chords: &[(NodeSpot, NodeSpot)],
    new_polygons: &mut Vec<Vec<PlanarPoint>>,
    edge_lookup: &mut BTreeMap<(usize, usize, i64), (usize, usize)>,
    vertex_lookup: &mut BTreeMap<Corner, (usize, usize)>,
) {
    let n = vertices.len();
    // Nodes: original vertices then split points in boundary order.
    let mut nodes: Vec<PlanarPoint> = vertices.to_vec();
    // Boundary walk: list of (node id, provenance s on its edge).
    let mut boundary: Vec<(usize, usize, f64)> = Vec::new(); // (node, edge, s at node)
    for i in 0..n {
        boundary.push((i, i, 0.0));
        for &s in &per_edge_splits[i] {
            let p = vertices[i].lerp(&vertices[(i + 1) % n], s);
            nodes.push(p);
            boundary.push((nodes.len() - 1, i, s));
        }
    }
    let node_of = |spot: &NodeSpot| -> usize {
        match spot {
            NodeSpot::Vertex(v) => *v,
            NodeSpot::OnEdge { edge, s } => {
                boundary
                    .iter()
                    .find(|(_, e, q)| e == edge && (q - s).abs() < 1e-9)
                    .expect("chord endpoint registered as split")
                    .0
            }
        }
    };

    #[derive(Clone, Copy)]
    enum Prov {
        Boundary { edge: usize, s_lo: f64 },
        Chord,
    }
    struct DirEdge {
        from: usize,
        to: usize,
        prov: Prov,
        angle: f64,
    }
    let mut dir_edges: Vec<DirEdge> = Vec::new();
    let m = boundary.len();
    for k in 0..m {
        let (node, edge, s) = boundary[k];
        let (next_node, next_edge, next_s) = boundary[(k + 1) % m];
        // End coordinate of this sub-edge on `edge` is 1 when the next node
        // starts the following edge.
        let _ = (next_edge, next_s);
        let a = nodes[node];
        let b = nodes[next_node];
        dir_edges.push(DirEdge {
            from: node,
            to: next_node,
            prov: Prov::Boundary { edge, s_lo: s },
            angle: math::atan2(b.y - a.y, b.x - a.x),
        });
    }
    for (a, b) in chords {
        let (na, nb) = (node_of(a), node_of(b));
        let (pa, pb) = (nodes[na], nodes[nb]);
        let ang = math::atan2(pb.y - pa.y, pb.x - pa.x);
        dir_edges.push(DirEdge { from: na, to: nb, prov: Prov::Chord, angle: ang });
        dir_edges.push(DirEdge {
            from: nb,
            to: na,
            prov: Prov::Chord,
            angle: math::normalize_angle(ang + math::PI),
        });
    }

    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
    for (i, e) in dir_edges.iter().enumerate() {
        outgoing[e.from].push(i);
    }

    // Trace faces: from each unused directed edge, repeatedly take the most
    // clockwise outgoing edge relative to the reversed arrival direction;
    // interior faces come out counterclockwise.
    let mut used = vec![false; dir_edges.len()];
    for start in 0..dir_edges.len() {
        if used[start] {
            continue;
        }
        let mut loop_edges = Vec::new();
        let mut cur = start;
        loop {
            used[cur] = true;
            loop_edges.push(cur);
            let e = &dir_edges[cur];
            let rev = math::normalize_angle(e.angle + math::PI);
            let mut best: Option<(f64, usize)> = None;
            for &cand in &outgoing[e.to] {
                if used[cand] && cand != start {
                    // Each directed edge belongs to exactly one face; stale
                    // candidates only appear on malformed input.
                }
                let delta = math::ccw_delta(rev, dir_edges[cand].angle);
                let score = if delta < 1e-12 { -1.0 } else { delta };
                if best.is_none_or(|(bs, _)| score > bs) {
                    best = Some((score, cand));
                }
            }
            let (_, next) = best.expect("every node has an outgoing edge");
            if next == start {
                break;
            }
            cur = next;
        }
        // Register the face.
        let face_id = new_polygons.len();
        let verts: Vec<PlanarPoint> = loop_edges.iter().map(|&i| nodes[dir_edges[i].from]).collect();
        for (idx, &eid) in loop_edges.iter().enumerate() {
            match dir_edges[eid].prov {
                Prov::Boundary { edge, s_lo } => {
                    edge_lookup.insert((pid, edge, quant(s_lo)), (face_id, idx));
                }
                Prov::Chord => {}
            }
            let from = dir_edges[eid].from;
            if from < n {
                vertex_lookup.entry((pid, from)).or_insert((face_id, idx));
            }
        }
        new_polygons.push(verts);
    }
}

/// Union-find the glued components and validate each as its own surface.
fn reassemble(
    polygons: Vec<Vec<PlanarPoint>>,
    pairings: Vec<(EdgeRef, EdgeRef)>,
    marked: Vec<(usize, usize)>,
) -> Result<Vec<Surface>, HorizonError> {
    let n = polygons.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (e, f) in &pairings {
        let (a, b) = (find(&mut parent, e.polygon), find(&mut parent, f.polygon));
        if a != b {
            parent[a] = b;
        }
    }
    let mut roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, r) in roots.iter().enumerate() {
        groups.entry(*r).or_default().push(i);
    }
    let _ = &mut roots;

    let mut components = Vec::new();
    for group in groups.values() {
        let index_of: BTreeMap<usize, usize> =
            group.iter().enumerate().map(|(new, old)| (*old, new)).collect();
        let spec = SurfaceSpec {
            polygons: group.iter().map(|&i| polygons[i].clone()).collect(),
            pairings: pairings
                .iter()
                .filter(|(e, _)| index_of.contains_key(&e.polygon))
                .map(|(e, f)| {
                    (
                        EdgeRef::new(index_of[&e.polygon], e.edge_index),
                        EdgeRef::new(index_of[&f.polygon], f.edge_index),
                    )
                })
                .collect(),
            marked_points: marked
                .iter()
                .filter(|(p, _)| index_of.contains_key(p))
                .map(|(p, v)| (index_of[p], *v))
                .collect(),
        };
        components.push(Surface::validate(spec)?);
    }
    Ok(components)
}

/// Topological disconnection test with its crossing-bound certificate.
#[derive(Clone, Debug)]
pub struct DisconnectionReport {
    pub disconnecting: bool,
    pub components: usize,
    pub euler_before: i64,
    pub euler_after: i64,
    /// When the cut disconnects, no trajectory crosses the connection twice:
    /// a certified horizon bound.
    pub certified_bound: Option<usize>,
}

pub fn is_disconnecting(
    surface: &Surface,
    sc: &SaddleConnection,
) -> Result<DisconnectionReport, HorizonError> {
    let cut = cut_along(surface, sc)?;
    let k = cut.components.len();
    Ok(DisconnectionReport {
        disconnecting: k >= 2,
        components: k,
        euler_before: cut.euler_before,
        euler_after: cut.euler_after,
        certified_bound: (k >= 2).then_some(1),
    })
}

/// Sampling configuration for crossing bounds and pencils.
#[derive(Clone, Copy, Debug)]
pub struct HorizonConfig {
    pub trace: TraceConfig,
    pub seed: u64,
    /// Angular offset used by the openness diagnostic.
    pub openness_delta: f64,
    /// Pencil sampling density.
    pub witness_count: usize,
}

impl Default for HorizonConfig {
    fn default() -> Self {
        Self {
            trace: TraceConfig::default(),
            seed: 0xd11a_f104,
            openness_delta: 1e-5,
            witness_count: 16,
        }
    }
}

/// How one probe trajectory was launched.
#[derive(Clone, Debug)]
pub struct CrossingWitness {
    pub start: FlowPoint,
    pub direction: DirectionAngle,
    /// Whether the backward half of the leaf is counted too.
    pub bidirectional: bool,
    pub count: usize,
}

#[derive(Clone, Debug)]
pub struct DirectionBound {
    pub direction: DirectionAngle,
    pub k_lower: usize,
    pub witness: Option<CrossingWitness>,
}

#[derive(Clone, Debug)]
pub struct OpennessProbe {
    pub direction: f64,
    pub k: usize,
    pub minus_ok: bool,
    pub plus_ok: bool,
}

/// Empirical lower bounds on the crossing number of a saddle connection.
#[derive(Clone, Debug)]
pub struct CrossingBoundEstimate {
    pub per_direction: Vec<DirectionBound>,
    pub global_max: usize,
    /// One probe per recorded positive bound: nearby directions must realize
    /// the same count (crossing counts are lower semicontinuous).
    pub openness: Vec<OpennessProbe>,
    pub traces_run: usize,
    pub budget_crossings: usize,
}

/// Count how often a trace crosses the connection.
pub fn count_crossings(surface: &Surface, sc: &SaddleConnection, result: &TraceResult) -> usize {
    if let Some(edge) = sc.as_edge(surface) {
        let partner = surface.crossing_side(edge).map(|s| s.other);
        return result
            .crossings
            .iter()
            .filter(|c| c.edge == edge || Some(c.edge) == partner)
            .count();
    }
    let Some(chain) = sc.chain(surface) else { return 0 };
    let mut count = 0;
    for (poly, a, b) in result.segments(surface) {
        for (cp, ca, cb) in &chain {
            if *cp == poly && geom::segments_cross(&a, &b, ca, cb) {
                count += 1;
            }
        }
    }
    count
}

fn interior_point(surface: &Surface, poly: usize, rng: &mut SplitMix64) -> FlowPoint {
    let p = &surface.polygons[poly];
    let (mut lo_x, mut hi_x, mut lo_y, mut hi_y) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for v in &p.vertices {
        lo_x = lo_x.min(v.x);
        hi_x = hi_x.max(v.x);
        lo_y = lo_y.min(v.y);
        hi_y = hi_y.max(v.y);
    }
    for _ in 0..256 {
        let cand = PlanarPoint::new(rng.in_range(lo_x, hi_x), rng.in_range(lo_y, hi_y));
        // Stay clear of the boundary so both flow directions start inside.
        if p.contains(&cand, -1e-6 * p.diameter()) && p.contains(&cand, 0.0) {
            return FlowPoint { polygon: poly, position: cand };
        }
    }
    // Fall back to a point near a vertex, nudged inward along the diagonal
    // of its corner sector.
    let (s0, w) = surface.corner_sector((poly, 0));
    let mid = s0 + 0.5 * w;
    let v = p.vertices[0];
    let r = 1e-3 * p.diameter();
    FlowPoint {
        polygon: poly,
        position: PlanarPoint::new(v.x + r * math::cos(mid), v.y + r * math::sin(mid)),
    }
}

/// All probe launches for one direction: one interior leaf per polygon plus
/// every separatrix in the direction and its reverse.
fn probes_for_direction(
    surface: &Surface,
    d: DirectionAngle,
    seed: u64,
) -> Vec<(FlowPoint, DirectionAngle, bool)> {
    let mut rng = SplitMix64::fork(seed, d.radians().to_bits());
    let mut out = Vec::new();
    for poly in 0..surface.polygons.len() {
        out.push((interior_point(surface, poly, &mut rng), d, true));
    }
    for sing in &surface.singularities {
        if !sing.in_sigma() {
            continue;
        }
        for &corner in &sing.corners {
            for dir in [d, d.opposite()] {
                let (s0, width) = surface.corner_sector(corner);
                if math::ccw_delta(s0, dir.radians()) >= width {
                    continue;
                }
                let start = FlowPoint {
                    polygon: corner.0,
                    position: surface.polygons[corner.0].vertices[corner.1],
                };
                out.push((start, dir, false));
            }
        }
    }
    out
}

fn count_leaf(
    surface: &Surface,
    sc: &SaddleConnection,
    start: FlowPoint,
    d: DirectionAngle,
    bidirectional: bool,
    cfg: &TraceConfig,
) -> Option<(usize, TraceResult)> {
    let fwd = trace(surface, start, d, cfg).ok()?;
    let mut count = count_crossings(surface, sc, &fwd);
    if bidirectional {
        if let Ok(bwd) = trace(surface, start, d.opposite(), cfg) {
            count += count_crossings(surface, sc, &bwd);
        }
    }
    Some((count, fwd))
}

/// Probe a grid of directions for the largest observed crossing count.
///
/// Counts are lower bounds: the estimate never claims exactness and records
/// its budget alongside. For each positive per-direction bound, the openness
/// diagnostic re-traces the witness with the direction tilted by ±δ and
/// checks the count persists.
pub fn empirical_crossing_bound(
    surface: &Surface,
    sc: &SaddleConnection,
    grid: &[DirectionAngle],
    cfg: &HorizonConfig,
) -> CrossingBoundEstimate {
    let mut per_direction = Vec::with_capacity(grid.len());
    let mut traces_run = 0usize;
    for &d in grid {
        let mut best: Option<CrossingWitness> = None;
        for (start, dir, bidi) in probes_for_direction(surface, d, cfg.seed) {
            let Some((count, fwd)) = count_leaf(surface, sc, start, dir, bidi, &cfg.trace) else {
                continue;
            };
            traces_run += if bidi { 2 } else { 1 };
            let witness_start = if bidi {
                start
            } else {
                // Separatrix launches re-probe from the midpoint of their
                // first segment, which realizes the same count from an
                // interior point.
                let seg = fwd.segments(surface);
                let (poly, a, b) = seg[0];
                FlowPoint { polygon: poly, position: a.lerp(&b, 0.5) }
            };
            if best.as_ref().is_none_or(|w| count > w.count) {
                best = Some(CrossingWitness {
                    start: witness_start,
                    direction: dir,
                    bidirectional: bidi,
                    count,
                });
            }
        }
        per_direction.push(DirectionBound {
            direction: d,
            k_lower: best.as_ref().map_or(0, |w| w.count),
            witness: best,
        });
    }
    let global_max = per_direction.iter().map(|b| b.k_lower).max().unwrap_or(0);

    let mut openness = Vec::new();
    for bound in &per_direction {
        let Some(w) = &bound.witness else { continue };
        if w.count == 0 {
            continue;
        }
        let mut ok = [false, false];
        for (i, sign) in [-1.0f64, 1.0].iter().enumerate() {
            let d2 = DirectionAngle::new(w.direction.radians() + sign * cfg.openness_delta);
            if let Some((count, _)) =
                count_leaf(surface, sc, w.start, d2, w.bidirectional, &cfg.trace)
            {
                traces_run += if w.bidirectional { 2 } else { 1 };
                ok[i] = count >= w.count;
            }
        }
        openness.push(OpennessProbe {
            direction: bound.direction.radians(),
            k: w.count,
            minus_ok: ok[0],
            plus_ok: ok[1],
        });
    }

    CrossingBoundEstimate {
        per_direction,
        global_max,
        openness,
        traces_run,
        budget_crossings: cfg.trace.max_crossings,
    }
}

/// A one-parameter family of trajectories out of one apex point.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub apex: FlowPoint,
    /// Open direction interval of the family.
    pub interval: (f64, f64),
    /// Forward trajectories sampled across the interval; all verified to
    /// avoid the saddle connection entirely.
    pub witnesses: Vec<TraceResult>,
    /// The observed crossing count was zero throughout the input interval,
    /// so any apex works; kept as a note rather than an error.
    pub trivial: bool,
}

/// Build a pencil that never meets the connection, out of a trajectory
/// realizing the maximal crossing count.
///
/// The apex is the last crossing point of a maximal witness; directions near
/// the witness keep the full backward crossing count, so their forward
/// continuations can never meet the connection again without violating
/// maximality.
pub fn max_crossing_pencil(
    surface: &Surface,
    sc: &SaddleConnection,
    interval: (f64, f64),
    cfg: &HorizonConfig,
) -> Result<Pencil, HorizonError> {
    let n_grid = 33usize;
    let grid: Vec<DirectionAngle> = (0..n_grid)
        .map(|i| {
            DirectionAngle::new(
                interval.0 + (interval.1 - interval.0) * (i as f64 + 0.5) / n_grid as f64,
            )
        })
        .collect();
    let estimate = empirical_crossing_bound(surface, sc, &grid, cfg);

    // Stability: the count must not grow when the budget doubles.
    let bigger = HorizonConfig {
        trace: TraceConfig {
            max_crossings: cfg.trace.max_crossings * 2,
            ..cfg.trace
        },
        ..*cfg
    };
    let estimate2 = empirical_crossing_bound(surface, sc, &grid, &bigger);
    if estimate2.global_max > estimate.global_max {
        return Err(HorizonError::UnstableCrossingBound {
            at_budget: bigger.trace.max_crossings,
            max_seen: estimate2.global_max,
        });
    }
    let k = estimate.global_max;

    if k == 0 {
        let mut rng = SplitMix64::fork(cfg.seed, 1);
        let apex = interior_point(surface, 0, &mut rng);
        let witnesses = sample_forward(surface, sc, apex, interval, cfg)?;
        return Ok(Pencil { apex, interval, witnesses, trivial: true });
    }

    let best = estimate
        .per_direction
        .iter()
        .filter_map(|b| b.witness.as_ref())
        .max_by_key(|w| w.count)
        .expect("positive max has a witness");
    let apex = last_crossing_point(surface, sc, best, &cfg.trace)
        .ok_or(HorizonError::NotASaddleConnection)?;

    // Grow the direction interval while the backward pencil keeps at least
    // k - 1 further crossings (the apex itself sits on the connection).
    let d_star = best.direction.radians();
    let step = (interval.1 - interval.0) / 256.0;
    let backward_keeps = |omega: f64| -> bool {
        let d = DirectionAngle::new(omega + math::PI);
        match trace(surface, apex, d, &cfg.trace) {
            Ok(r) => count_crossings(surface, sc, &r) >= k - 1,
            Err(_) => false,
        }
    };
    let mut lo = d_star;
    let mut hi = d_star;
    while lo - step >= interval.0 - 1e-12 && backward_keeps(lo - step) {
        lo -= step;
    }
    while hi + step <= interval.1 + 1e-12 && backward_keeps(hi + step) {
        hi += step;
    }
    let pencil_interval = (lo, hi);

    let witnesses = sample_forward(surface, sc, apex, pencil_interval, cfg)?;
    Ok(Pencil { apex, interval: pencil_interval, witnesses, trivial: false })
}

fn sample_forward(
    surface: &Surface,
    sc: &SaddleConnection,
    apex: FlowPoint,
    interval: (f64, f64),
    cfg: &HorizonConfig,
) -> Result<Vec<TraceResult>, HorizonError> {
    let m = cfg.witness_count.max(2);
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        let d = DirectionAngle::new(
            interval.0 + (interval.1 - interval.0) * (i as f64 + 0.5) / m as f64,
        );
        let Ok(r) = trace(surface, apex, d, &cfg.trace) else { continue };
        let crossings = count_crossings(surface, sc, &r);
        if crossings > 0 {
            return Err(HorizonError::UnstableCrossingBound {
                at_budget: cfg.trace.max_crossings,
                max_seen: crossings,
            });
        }
        out.push(r);
    }
    Ok(out)
}

/// Position of the last (along the flow) crossing of the witness with the
/// connection.
fn last_crossing_point(
    surface: &Surface,
    sc: &SaddleConnection,
    witness: &CrossingWitness,
    cfg: &TraceConfig,
) -> Option<FlowPoint> {
    // Re-trace forward; if the forward half carries no crossing, use the
    // first crossing of the backward half (last along the oriented leaf).
    let fwd = trace(surface, witness.start, witness.direction, cfg).ok()?;
    if let Some(p) = crossing_points(surface, sc, &fwd).into_iter().last() {
        return Some(p);
    }
    if witness.bidirectional {
        let bwd = trace(surface, witness.start, witness.direction.opposite(), cfg).ok()?;
        return crossing_points(surface, sc, &bwd).into_iter().next();
    }
    None
}

fn crossing_points(
    surface: &Surface,
    sc: &SaddleConnection,
    result: &TraceResult,
) -> Vec<FlowPoint> {
    let mut out = Vec::new();
    if let Some(edge) = sc.as_edge(surface) {
        let partner = surface.crossing_side(edge).map(|s| s.other);
        for c in &result.crossings {
            if c.edge == edge || Some(c.edge) == partner {
                out.push(FlowPoint {
                    polygon: c.edge.polygon,
                    position: surface.polygons[c.edge.polygon].edge_point(c.edge.edge_index, c.coord),
                });
            }
        }
        return out;
    }
    let Some(chain) = sc.chain(surface) else { return out };
    for (poly, a, b) in result.segments(surface) {
        for (cp, ca, cb) in &chain {
            if *cp != poly || !geom::segments_cross(&a, &b, ca, cb) {
                continue;
            }
            let d1 = (b.x - a.x, b.y - a.y);
            let d2 = (cb.x - ca.x, cb.y - ca.y);
            let denom = geom::cross(d1, d2);
            let v = (ca.x - a.x, ca.y - a.y);
            let t = geom::cross(v, d2) / denom;
            out.push(FlowPoint {
                polygon: poly,
                position: PlanarPoint::new(a.x + t * d1.0, a.y + t * d1.1),
            });
        }
    }
    out
}
