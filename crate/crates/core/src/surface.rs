//! Dilation surfaces as validated polygon complexes.
//!
//! A surface is a list of counterclockwise planar polygons (one chart each)
//! together with a partial matching of their edges. A matched pair is glued
//! by the unique map `z ↦ az + b` (a > 0) sending one edge onto the other
//! with opposite boundary orientation, so edge vectors of a pair must be
//! anti-parallel. Unmatched edges form the boundary. Validation derives the
//! gluing maps, vertex classes (cone points), boundary components, Euler
//! characteristic and genus, and rejects inconsistent input.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{PathError, SurfaceError};
use crate::geom::{self, AffineMap, DirectionAngle, PlanarPoint};
use crate::math;

/// Relative geometric tolerance. One knob governs parallelism, endpoint and
/// holonomy checks; all uses scale it by a local length.
pub const EPS_GEO: f64 = 1e-9;

/// A corner of the complex: (polygon index, vertex index).
pub type Corner = (usize, usize);

/// Reference to one polygon edge: the edge from vertex `edge_index` to vertex
/// `edge_index + 1 (mod n)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeRef {
    pub polygon: usize,
    pub edge_index: usize,
}

impl EdgeRef {
    pub const fn new(polygon: usize, edge_index: usize) -> Self {
        Self { polygon, edge_index }
    }
}

/// A chart polygon with derived per-edge and per-corner data.
#[derive(Clone, Debug)]
pub struct Polygon {
    pub id: usize,
    pub vertices: Vec<PlanarPoint>,
    edge_vecs: Vec<(f64, f64)>,
    edge_lens: Vec<f64>,
    edge_dirs: Vec<f64>,
    corner_angles: Vec<f64>,
    diameter: f64,
}

impl Polygon {
    fn build(id: usize, vertices: Vec<PlanarPoint>) -> Result<Self, SurfaceError> {
        if vertices.len() < 3 {
            return Err(SurfaceError::TooFewVertices { polygon: id });
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(SurfaceError::NonFiniteCoordinate { polygon: id });
        }
        let n = vertices.len();
        let mut edge_vecs = Vec::with_capacity(n);
        let mut edge_lens = Vec::with_capacity(n);
        let mut edge_dirs = Vec::with_capacity(n);
        for i in 0..n {
            let v = vertices[(i + 1) % n].sub(&vertices[i]);
            let len = geom::norm(v);
            if len == 0.0 {
                return Err(SurfaceError::NonPositiveArea { polygon: id });
            }
            edge_vecs.push(v);
            edge_lens.push(len);
            edge_dirs.push(math::normalize_angle(math::atan2(v.1, v.0)));
        }
        if geom::is_self_intersecting(&vertices) {
            return Err(SurfaceError::SelfIntersectingPolygon { polygon: id });
        }
        if geom::signed_area(&vertices) <= 0.0 {
            return Err(SurfaceError::NonPositiveArea { polygon: id });
        }
        let mut corner_angles = Vec::with_capacity(n);
        for v in 0..n {
            let out_dir = edge_dirs[v];
            let in_rev = math::normalize_angle(edge_dirs[(v + n - 1) % n] + math::PI);
            corner_angles.push(math::ccw_delta(out_dir, in_rev));
        }
        let diameter = geom::diameter(&vertices);
        Ok(Self { id, vertices, edge_vecs, edge_lens, edge_dirs, corner_angles, diameter })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn edge_start(&self, i: usize) -> &PlanarPoint {
        &self.vertices[i]
    }

    #[inline]
    pub fn edge_end(&self, i: usize) -> &PlanarPoint {
        &self.vertices[(i + 1) % self.vertices.len()]
    }

    #[inline]
    pub fn edge_vec(&self, i: usize) -> (f64, f64) {
        self.edge_vecs[i]
    }

    #[inline]
    pub fn edge_len(&self, i: usize) -> f64 {
        self.edge_lens[i]
    }

    /// Direction angle of edge `i` in `[0, 2π)`.
    #[inline]
    pub fn edge_dir(&self, i: usize) -> f64 {
        self.edge_dirs[i]
    }

    /// Interior angle at vertex `v`.
    #[inline]
    pub fn corner_angle(&self, v: usize) -> f64 {
        self.corner_angles[v]
    }

    #[inline]
    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Point at barycentric coordinate `s` along edge `i`.
    pub fn edge_point(&self, i: usize, s: f64) -> PlanarPoint {
        self.edge_start(i).lerp(self.edge_end(i), s)
    }

    pub fn contains(&self, p: &PlanarPoint, eps: f64) -> bool {
        geom::point_in_polygon(&self.vertices, p, eps)
    }
}

/// A glued edge pair with its derived dilation data.
///
/// The stored map sends points of edge `e` to points of edge `f` and maps the
/// start of `e` to the end of `f` (pairings reverse boundary orientation).
#[derive(Clone, Debug)]
pub struct EdgePairing {
    pub e: EdgeRef,
    pub f: EdgeRef,
    /// `length(f) / length(e)`, derived from the geometry.
    pub ratio: f64,
    /// The map from the chart of `e.polygon` to the chart of `f.polygon`.
    pub map: AffineMap,
}

/// Interior cone points carry a positive integer index (cone angle `2πk`);
/// boundary points have arbitrary angle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SingularityKind {
    Interior { index: u32 },
    Boundary,
}

/// A vertex class of the complex together with its local dilation data.
#[derive(Clone, Debug)]
pub struct Singularity {
    pub id: usize,
    /// Corners in walk order: cyclic for interior classes, chain order from
    /// one boundary edge to the other for boundary classes.
    pub corners: Vec<Corner>,
    pub cone_angle: f64,
    pub kind: SingularityKind,
    /// Linear holonomy of the positive loop around the point (interior), or
    /// the product of gluing ratios along the corner chain (boundary).
    pub dilation_ratio: f64,
    pub on_boundary: bool,
    /// Declared (or auto-inserted) marked point.
    pub is_marked: bool,
    /// Geometrically removable: angle 2π interior / π boundary with ratio 1.
    pub is_flat: bool,
}

impl Singularity {
    /// Member of the singular set Σ: every non-removable point, plus marked
    /// flat points.
    pub fn in_sigma(&self) -> bool {
        !self.is_flat || self.is_marked
    }
}

/// Raw input for [`Surface::validate`]: vertex loops, a pairing list, and
/// optional marked-point declarations.
#[derive(Clone, Debug, Default)]
pub struct SurfaceSpec {
    pub polygons: Vec<Vec<PlanarPoint>>,
    pub pairings: Vec<(EdgeRef, EdgeRef)>,
    pub marked_points: Vec<Corner>,
}

/// Validation knobs.
#[derive(Clone, Copy, Debug)]
pub struct ValidateOptions {
    /// Insert a marked point on a boundary component that has no Σ member
    /// (warning) instead of failing with `BareBoundaryComponent`.
    pub auto_mark_bare_boundaries: bool,
}

impl Default for ValidateOptions {
    fn default() -> Self {
        Self { auto_mark_bare_boundaries: true }
    }
}

/// A validated dilation surface. Immutable after construction; all flow and
/// search operations take `&Surface` and may run concurrently.
#[derive(Clone, Debug)]
pub struct Surface {
    pub polygons: Vec<Polygon>,
    pub pairings: Vec<EdgePairing>,
    pub singularities: Vec<Singularity>,
    /// Cyclic lists of unpaired edges, one per boundary component, oriented
    /// with the surface on the left.
    pub boundary_components: Vec<Vec<EdgeRef>>,
    pub euler_characteristic: i64,
    pub genus: usize,
    /// Absolute geometric tolerance: `EPS_GEO` times the largest diameter.
    pub eps_geo: f64,
    pub warnings: Vec<String>,
    pair_lookup: Vec<Vec<Option<usize>>>,
    corner_class: Vec<Vec<usize>>,
}

/// One side of a gluing as seen from the edge being crossed.
#[derive(Clone, Copy, Debug)]
pub struct CrossingSide {
    /// The edge on the other side of the gluing.
    pub other: EdgeRef,
    /// Linear part of the transition applied when crossing.
    pub ratio: f64,
    /// Full transition map from the current chart to the other chart.
    pub map: AffineMap,
}

impl Surface {
    /// Validate a polygon complex and derive all structure.
    pub fn validate(spec: SurfaceSpec) -> Result<Self, SurfaceError> {
        Self::validate_with(spec, ValidateOptions::default())
    }

    pub fn validate_with(spec: SurfaceSpec, opts: ValidateOptions) -> Result<Self, SurfaceError> {
        let mut polygons = Vec::with_capacity(spec.polygons.len());
        for (id, verts) in spec.polygons.into_iter().enumerate() {
            polygons.push(Polygon::build(id, verts)?);
        }
        if polygons.is_empty() {
            return Err(SurfaceError::Disconnected);
        }

        let in_range = |e: &EdgeRef| -> bool {
            e.polygon < polygons.len() && e.edge_index < polygons[e.polygon].len()
        };
        for (p, v) in &spec.marked_points {
            if *p >= polygons.len() || *v >= polygons[*p].len() {
                return Err(SurfaceError::IndexOutOfRange { edge: EdgeRef::new(*p, *v) });
            }
        }

        // Derive pairings: anti-parallel check and the gluing map.
        let mut pair_lookup: Vec<Vec<Option<usize>>> =
            polygons.iter().map(|p| vec![None; p.len()]).collect();
        let mut pairings = Vec::with_capacity(spec.pairings.len());
        for (idx, (e, f)) in spec.pairings.iter().enumerate() {
            for r in [e, f] {
                if !in_range(r) {
                    return Err(SurfaceError::IndexOutOfRange { edge: *r });
                }
            }
            if e == f {
                return Err(SurfaceError::DuplicatePairing { edge: *e });
            }
            for r in [e, f] {
                if pair_lookup[r.polygon][r.edge_index].is_some() {
                    return Err(SurfaceError::DuplicatePairing { edge: *r });
                }
                pair_lookup[r.polygon][r.edge_index] = Some(idx);
            }
            let ve = polygons[e.polygon].edge_vec(e.edge_index);
            let vf = polygons[f.polygon].edge_vec(f.edge_index);
            let le = polygons[e.polygon].edge_len(e.edge_index);
            let lf = polygons[f.polygon].edge_len(f.edge_index);
            // Anti-parallel test: sine of the angle between the vectors must
            // vanish, and they must point opposite ways (a gluing with the
            // same sense would need a negative linear part).
            let sine = math::abs(geom::cross(ve, vf)) / (le * lf);
            if sine > EPS_GEO {
                return Err(SurfaceError::NonParallelEdges { e: *e, f: *f, defect: sine });
            }
            if geom::dot(ve, vf) > 0.0 {
                return Err(SurfaceError::NegativeRatio { e: *e, f: *f });
            }
            let ratio = lf / le;
            let p_e = polygons[e.polygon].edge_start(e.edge_index);
            let q_f = polygons[f.polygon].edge_end(f.edge_index);
            let map = AffineMap::new(ratio, (q_f.x - ratio * p_e.x, q_f.y - ratio * p_e.y));
            pairings.push(EdgePairing { e: *e, f: *f, ratio, map });
        }

        // Connectivity of the gluing graph.
        let mut uf = UnionFind::new(polygons.len());
        for p in &pairings {
            uf.union(p.e.polygon, p.f.polygon);
        }
        let root = uf.find(0);
        if (0..polygons.len()).any(|i| uf.find(i) != root) {
            return Err(SurfaceError::Disconnected);
        }

        let global_diam = polygons.iter().map(|p| p.diameter()).fold(0.0_f64, f64::max);
        let eps_geo = EPS_GEO * global_diam;

        let mut builder = SurfaceBuilder {
            polygons,
            pairings,
            pair_lookup,
            eps_geo,
            warnings: Vec::new(),
        };
        let (mut singularities, corner_class) = builder.vertex_classes()?;
        for (p, v) in &spec.marked_points {
            let id = corner_class[*p][*v];
            singularities[id].is_marked = true;
        }
        let boundary_components = builder.boundary_components();

        // Each boundary component must meet Σ; auto-mark one flat point when
        // it does not (mirrors marking points on a bare boundary).
        for (ci, comp) in boundary_components.iter().enumerate() {
            let classes: Vec<usize> = comp
                .iter()
                .map(|e| corner_class[e.polygon][e.edge_index])
                .collect();
            if classes.iter().any(|&c| singularities[c].in_sigma()) {
                continue;
            }
            if !opts.auto_mark_bare_boundaries {
                return Err(SurfaceError::BareBoundaryComponent { component: ci });
            }
            let c = classes[0];
            singularities[c].is_marked = true;
            builder.warnings.push(format!(
                "boundary component {ci} had no singular point; marked vertex class {c}"
            ));
        }

        // Euler characteristic and genus.
        let v = singularities.len() as i64;
        let unpaired: i64 = boundary_components.iter().map(|c| c.len() as i64).sum();
        let e = builder.pairings.len() as i64 + unpaired;
        let f = builder.polygons.len() as i64;
        let chi = v - e + f;
        let b = boundary_components.len() as i64;
        let two_g = 2 - chi - b;
        debug_assert!(two_g >= 0 && two_g % 2 == 0, "non-orientable or inconsistent complex");
        let genus = (two_g.max(0) / 2) as usize;

        Ok(Surface {
            polygons: builder.polygons,
            pairings: builder.pairings,
            singularities,
            boundary_components,
            euler_characteristic: chi,
            genus,
            eps_geo,
            warnings: builder.warnings,
            pair_lookup: builder.pair_lookup,
            corner_class,
        })
    }

    /// The pairing an edge participates in, if any.
    pub fn pairing_of(&self, e: EdgeRef) -> Option<&EdgePairing> {
        self.pair_lookup[e.polygon][e.edge_index].map(|i| &self.pairings[i])
    }

    pub fn pairing_index_of(&self, e: EdgeRef) -> Option<usize> {
        self.pair_lookup[e.polygon][e.edge_index]
    }

    pub fn is_boundary_edge(&self, e: EdgeRef) -> bool {
        self.pair_lookup[e.polygon][e.edge_index].is_none()
    }

    /// Transition data for crossing edge `e` out of its own polygon.
    pub fn crossing_side(&self, e: EdgeRef) -> Option<CrossingSide> {
        let pairing = self.pairing_of(e)?;
        if pairing.e == e {
            Some(CrossingSide { other: pairing.f, ratio: pairing.ratio, map: pairing.map })
        } else {
            Some(CrossingSide {
                other: pairing.e,
                ratio: 1.0 / pairing.ratio,
                map: pairing.map.inverse(),
            })
        }
    }

    /// Singularity id of a corner.
    pub fn class_of(&self, corner: Corner) -> usize {
        self.corner_class[corner.0][corner.1]
    }

    /// Sum over interior singularities of `(index - 1)`; equals `2g - 2` on
    /// closed surfaces.
    pub fn index_sum(&self) -> i64 {
        self.singularities
            .iter()
            .filter_map(|s| match s.kind {
                SingularityKind::Interior { index } => Some(index as i64 - 1),
                SingularityKind::Boundary => None,
            })
            .sum()
    }

    pub fn is_closed(&self) -> bool {
        self.boundary_components.is_empty()
    }

    /// Largest polygon diameter; the natural length scale of the surface.
    pub fn scale(&self) -> f64 {
        self.polygons.iter().map(|p| p.diameter()).fold(0.0_f64, f64::max)
    }

    /// Angular sector of directions leaving a corner into its polygon:
    /// `(start, width)` with membership `ccw_delta(start, d) ∈ [0, width)`.
    pub fn corner_sector(&self, corner: Corner) -> (f64, f64) {
        let poly = &self.polygons[corner.0];
        (poly.edge_dir(corner.1), poly.corner_angle(corner.1))
    }

    /// All corners of the complex, in deterministic order.
    pub fn corners(&self) -> impl Iterator<Item = Corner> + '_ {
        self.polygons
            .iter()
            .enumerate()
            .flat_map(|(p, poly)| (0..poly.len()).map(move |v| (p, v)))
    }

    /// Stable content id of the complex (polygon geometry plus pairings).
    pub fn content_id(&self) -> u64 {
        let mut bytes = Vec::new();
        for poly in &self.polygons {
            for v in &poly.vertices {
                bytes.extend_from_slice(&v.x.to_bits().to_le_bytes());
                bytes.extend_from_slice(&v.y.to_bits().to_le_bytes());
            }
        }
        for p in &self.pairings {
            for e in [p.e, p.f] {
                bytes.extend_from_slice(&(e.polygon as u64).to_le_bytes());
                bytes.extend_from_slice(&(e.edge_index as u64).to_le_bytes());
            }
        }
        math::fnv1a(bytes)
    }
}

/// Compose the gluing maps along a chain of edge crossings. The linear part
/// of the result is the dilation ratio of the path.
pub fn holonomy_of_path(surface: &Surface, path: &[EdgeRef]) -> Result<AffineMap, PathError> {
    let mut acc = AffineMap::IDENTITY;
    let mut current: Option<usize> = None;
    for (i, edge) in path.iter().enumerate() {
        if let Some(cur) = current {
            if edge.polygon != cur {
                return Err(PathError::BrokenChain { position: i });
            }
        }
        let side = surface
            .crossing_side(*edge)
            .ok_or(PathError::UnpairedEdge { edge: *edge })?;
        acc = side.map.compose(&acc);
        current = Some(side.other.polygon);
    }
    Ok(acc)
}

struct SurfaceBuilder {
    polygons: Vec<Polygon>,
    pairings: Vec<EdgePairing>,
    pair_lookup: Vec<Vec<Option<usize>>>,
    eps_geo: f64,
    warnings: Vec<String>,
}

impl SurfaceBuilder {
    fn crossing_side(&self, e: EdgeRef) -> Option<CrossingSide> {
        let idx = self.pair_lookup[e.polygon][e.edge_index]?;
        let pairing = &self.pairings[idx];
        if pairing.e == e {
            Some(CrossingSide { other: pairing.f, ratio: pairing.ratio, map: pairing.map })
        } else {
            Some(CrossingSide {
                other: pairing.e,
                ratio: 1.0 / pairing.ratio,
                map: pairing.map.inverse(),
            })
        }
    }

    /// Step counterclockwise around a vertex: cross the incoming edge of the
    /// corner. Returns the next corner and the transition applied.
    fn corner_forward(&self, (p, v): Corner) -> Option<(Corner, CrossingSide)> {
        let n = self.polygons[p].len();
        let e_in = EdgeRef::new(p, (v + n - 1) % n);
        let side = self.crossing_side(e_in)?;
        Some(((side.other.polygon, side.other.edge_index), side))
    }

    /// Step clockwise around a vertex: cross the outgoing edge of the corner.
    fn corner_backward(&self, (p, v): Corner) -> Option<Corner> {
        let e_out = EdgeRef::new(p, v);
        let side = self.crossing_side(e_out)?;
        let n_other = self.polygons[side.other.polygon].len();
        Some((side.other.polygon, (side.other.edge_index + 1) % n_other))
    }

    fn vertex_classes(&self) -> Result<(Vec<Singularity>, Vec<Vec<usize>>), SurfaceError> {
        let mut class_of: Vec<Vec<usize>> =
            self.polygons.iter().map(|p| vec![usize::MAX; p.len()]).collect();
        let mut singularities = Vec::new();
        let total_corners: usize = self.polygons.iter().map(|p| p.len()).sum();

        for seed_poly in 0..self.polygons.len() {
            for seed_v in 0..self.polygons[seed_poly].len() {
                if class_of[seed_poly][seed_v] != usize::MAX {
                    continue;
                }
                let id = singularities.len();
                let seed = (seed_poly, seed_v);

                // Rewind clockwise to the chain start (or detect a closed loop).
                let mut start = seed;
                let mut closed = false;
                for _ in 0..=total_corners {
                    match self.corner_backward(start) {
                        Some(prev) => {
                            if prev == seed {
                                closed = true;
                                break;
                            }
                            start = prev;
                        }
                        None => break,
                    }
                }
                if !closed {
                    // Re-check: a full sweep without closing means boundary.
                } else {
                    start = seed;
                }

                // Walk counterclockwise collecting corners and composing maps.
                let mut corners = vec![start];
                let mut holonomy = AffineMap::IDENTITY;
                let mut on_boundary = !closed;
                let mut cursor = start;
                loop {
                    match self.corner_forward(cursor) {
                        Some((next, side)) => {
                            holonomy = side.map.compose(&holonomy);
                            if next == start {
                                break;
                            }
                            if corners.len() > total_corners {
                                return Err(SurfaceError::InconsistentVertex {
                                    class_id: id,
                                    defect: f64::INFINITY,
                                });
                            }
                            corners.push(next);
                            cursor = next;
                        }
                        None => {
                            on_boundary = true;
                            break;
                        }
                    }
                }

                let cone_angle: f64 = corners
                    .iter()
                    .map(|&(p, v)| self.polygons[p].corner_angle(v))
                    .sum();

                let (kind, dilation_ratio) = if on_boundary {
                    (SingularityKind::Boundary, holonomy.a)
                } else {
                    // Closed walk: the composed transition must fix the vertex.
                    let v0 = self.polygons[start.0].vertices[start.1];
                    let image = holonomy.apply(&v0);
                    let defect = image.dist(&v0);
                    if defect > self.eps_geo.max(1e-12) * 10.0 {
                        return Err(SurfaceError::InconsistentVertex { class_id: id, defect });
                    }
                    let k = (cone_angle / math::TAU + 0.5) as i64;
                    let angle_defect = math::abs(cone_angle - k as f64 * math::TAU);
                    if k < 1 || angle_defect > 1e-7 * (k.max(1) as f64) {
                        return Err(SurfaceError::BadConeAngle { class_id: id, angle: cone_angle });
                    }
                    (SingularityKind::Interior { index: k as u32 }, holonomy.a)
                };

                let is_flat = match kind {
                    SingularityKind::Interior { index } => {
                        index == 1 && math::abs(dilation_ratio - 1.0) <= 1e-9
                    }
                    SingularityKind::Boundary => {
                        math::abs(cone_angle - math::PI) <= 1e-9
                            && math::abs(dilation_ratio - 1.0) <= 1e-9
                    }
                };

                for &(p, v) in &corners {
                    class_of[p][v] = id;
                }
                singularities.push(Singularity {
                    id,
                    corners,
                    cone_angle,
                    kind,
                    dilation_ratio,
                    on_boundary,
                    is_marked: false,
                    is_flat,
                });
            }
        }
        Ok((singularities, class_of))
    }

    /// Chain unpaired edges into boundary cycles, surface on the left.
    fn boundary_components(&self) -> Vec<Vec<EdgeRef>> {
        let mut seen: Vec<Vec<bool>> = self.polygons.iter().map(|p| vec![false; p.len()]).collect();
        let mut components = Vec::new();
        for p in 0..self.polygons.len() {
            for i in 0..self.polygons[p].len() {
                let start = EdgeRef::new(p, i);
                if seen[p][i] || self.pair_lookup[p][i].is_some() {
                    continue;
                }
                let mut comp = Vec::new();
                let mut e = start;
                loop {
                    seen[e.polygon][e.edge_index] = true;
                    comp.push(e);
                    // Hop corners at the end vertex until the next unpaired
                    // outgoing edge; the matching is finite so this halts.
                    let n = self.polygons[e.polygon].len();
                    let mut corner: Corner = (e.polygon, (e.edge_index + 1) % n);
                    let mut guard = 0usize;
                    let total: usize = self.polygons.iter().map(|q| q.len()).sum();
                    while self.pair_lookup[corner.0][corner.1].is_some() {
                        corner = self
                            .corner_backward(corner)
                            .expect("paired outgoing edge must have a backward hop");
                        guard += 1;
                        assert!(guard <= total, "boundary walk failed to terminate");
                    }
                    let next = EdgeRef::new(corner.0, corner.1);
                    if next == start {
                        break;
                    }
                    e = next;
                }
                components.push(comp);
            }
        }
        components
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra] = rb;
        }
    }
}

/// Direction transported through any gluing is unchanged: transitions have
/// positive real linear part. Exposed for tests and callers that want to be
/// explicit about it.
pub fn transport_direction(_side: &CrossingSide, d: DirectionAngle) -> DirectionAngle {
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders;

    #[test]
    fn torus_classes_and_genus() {
        let s = builders::build_torus().unwrap();
        assert_eq!(s.polygons.len(), 1);
        assert_eq!(s.pairings.len(), 2);
        assert_eq!(s.singularities.len(), 1);
        let sing = &s.singularities[0];
        assert_eq!(sing.kind, SingularityKind::Interior { index: 1 });
        assert!(sing.is_marked);
        assert!((sing.cone_angle - math::TAU).abs() < 1e-12);
        assert!((sing.dilation_ratio - 1.0).abs() < 1e-15);
        assert_eq!(s.genus, 1);
        assert!(s.is_closed());
        assert_eq!(s.index_sum(), 0);
    }

    #[test]
    fn holonomy_identity_on_empty_and_involutive_paths() {
        let s = builders::build_torus().unwrap();
        let id = holonomy_of_path(&s, &[]).unwrap();
        assert!(id.identity_defect() < 1e-15);
        let e = EdgeRef::new(0, 0);
        let f = s.pairing_of(e).unwrap().f;
        let out_back = holonomy_of_path(&s, &[e, f]).unwrap();
        assert!(out_back.identity_defect() < 1e-12);
    }

    #[test]
    fn torus_commutator_loop_is_identity() {
        let s = builders::build_torus().unwrap();
        // Crossing sequence bottom, left, top, right composes to the identity.
        let path = [
            EdgeRef::new(0, 0),
            EdgeRef::new(0, 3),
            EdgeRef::new(0, 2),
            EdgeRef::new(0, 1),
        ];
        let h = holonomy_of_path(&s, &path).unwrap();
        assert!(h.identity_defect() < 1e-12, "defect {}", h.identity_defect());
    }

    #[test]
    fn broken_chain_detected() {
        let s = builders::build_two_chamber(Default::default()).unwrap();
        // Edge 0 of polygon 0 crosses within polygon 0; a crossing listed on
        // polygon 1 right after is only valid if the first hop lands there.
        let path = [EdgeRef::new(0, 0), EdgeRef::new(1, 0)];
        assert!(matches!(
            holonomy_of_path(&s.surface, &path),
            Err(PathError::BrokenChain { .. })
        ));
    }

    fn two_squares() -> Vec<Vec<PlanarPoint>> {
        vec![
            vec![
                PlanarPoint::new(0.0, 0.0),
                PlanarPoint::new(1.0, 0.0),
                PlanarPoint::new(1.0, 1.0),
                PlanarPoint::new(0.0, 1.0),
            ],
            vec![
                PlanarPoint::new(2.0, 0.0),
                PlanarPoint::new(4.0, 0.0),
                PlanarPoint::new(4.0, 1.0),
                PlanarPoint::new(2.0, 1.0),
            ],
        ]
    }

    #[test]
    fn non_antiparallel_pairings_rejected() {
        // Bottom of square 0 against the right side of square 1: perpendicular.
        let spec = SurfaceSpec {
            polygons: two_squares(),
            pairings: vec![(EdgeRef::new(0, 0), EdgeRef::new(1, 1))],
            marked_points: vec![],
        };
        let err = Surface::validate(spec).unwrap_err();
        assert!(matches!(err, SurfaceError::NonParallelEdges { .. }), "{err:?}");

        // Bottom against bottom (scaled by 2): collinear but the same sense,
        // so the implied linear part would be negative.
        let spec = SurfaceSpec {
            polygons: two_squares(),
            pairings: vec![(EdgeRef::new(0, 0), EdgeRef::new(1, 0))],
            marked_points: vec![],
        };
        let err = Surface::validate(spec).unwrap_err();
        assert!(matches!(err, SurfaceError::NegativeRatio { .. }), "{err:?}");
    }

    #[test]
    fn strict_dilation_torus_with_index_one_nontrivial_ratio() {
        // Wedge chain closed after a full turn with alternating chord
        // ratios: the holonomy around each joint picks up the quotient of
        // adjacent ratios. Interior vertex classes of index 1 with
        // nontrivial dilation ratio are genuine singularities and accepted
        // as input.
        let sigmas = [0.8, 0.5, 0.8, 0.5];
        let dir = |j: usize| {
            let t = j as f64 * math::PI / 2.0;
            (math::cos(t), math::sin(t))
        };
        let mut polygons = Vec::new();
        let mut pairings = Vec::new();
        for (j, &sg) in sigmas.iter().enumerate() {
            let (c0, s0) = dir(j);
            let (c1, s1) = dir(j + 1);
            polygons.push(vec![
                PlanarPoint::new(c0, s0),
                PlanarPoint::new(c1, s1),
                PlanarPoint::new(sg * c1, sg * s1),
                PlanarPoint::new(sg * c0, sg * s0),
            ]);
            pairings.push((EdgeRef::new(j, 0), EdgeRef::new(j, 2)));
            pairings.push((EdgeRef::new(j, 1), EdgeRef::new((j + 1) % 4, 3)));
        }
        let s = Surface::validate(SurfaceSpec { polygons, pairings, marked_points: vec![] })
            .unwrap();
        assert!(s.is_closed());
        assert_eq!(s.euler_characteristic, 0);
        assert_eq!(s.genus, 1);
        assert_eq!(s.index_sum(), 0);
        assert!(
            s.singularities.iter().any(|x| {
                x.kind == SingularityKind::Interior { index: 1 }
                    && (x.dilation_ratio - 1.0).abs() > 1e-9
            }),
            "expected an index-1 point with nontrivial holonomy: {:?}",
            s.singularities
        );
    }

    #[test]
    fn self_intersecting_polygon_rejected() {
        let spec = SurfaceSpec {
            polygons: vec![vec![
                PlanarPoint::new(0.0, 0.0),
                PlanarPoint::new(1.0, 1.0),
                PlanarPoint::new(1.0, 0.0),
                PlanarPoint::new(0.0, 1.0),
            ]],
            pairings: vec![],
            marked_points: vec![],
        };
        assert!(matches!(
            Surface::validate(spec),
            Err(SurfaceError::SelfIntersectingPolygon { .. })
        ));
    }
}
