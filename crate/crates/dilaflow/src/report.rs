//! JSON report shapes for machine output (`--json`) and trace dumps.
//!
//! Reports are plain data mirrors of the core result types with stable field
//! order; ids are content hashes of signatures, printed as hex strings.

use dilaflow_core::cylinder::{Cylinder, VeechVerdict};
use dilaflow_core::geodesics::{ClosedGeodesic, GeodesicScan};
use dilaflow_core::horizon::{CrossingBoundEstimate, DisconnectionReport, Pencil};
use dilaflow_core::saddle::SaddleConnection;
use dilaflow_core::surface::{Singularity, SingularityKind, Surface};
use dilaflow_core::sweep::{DirectionClass, SweepReport};
use dilaflow_core::trace::{TraceOutcome, TraceResult};
use serde::{Deserialize, Serialize};

pub fn hex_id(id: u64) -> String {
    format!("{id:016x}")
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SingularityReport {
    pub id: usize,
    pub kind: String,
    pub index: Option<u32>,
    pub cone_angle: f64,
    pub dilation_ratio: f64,
    pub on_boundary: bool,
    pub marked: bool,
    pub corners: usize,
}

impl SingularityReport {
    pub fn new(s: &Singularity) -> Self {
        let (kind, index) = match s.kind {
            SingularityKind::Interior { index } => ("interior".to_string(), Some(index)),
            SingularityKind::Boundary => ("boundary".to_string(), None),
        };
        SingularityReport {
            id: s.id,
            kind,
            index,
            cone_angle: s.cone_angle,
            dilation_ratio: s.dilation_ratio,
            on_boundary: s.on_boundary,
            marked: s.is_marked,
            corners: s.corners.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InfoReport {
    pub surface_id: String,
    pub polygons: usize,
    pub pairings: usize,
    pub genus: usize,
    pub euler_characteristic: i64,
    pub boundary_components: usize,
    pub closed: bool,
    pub index_sum: i64,
    /// Interior index sum equals 2g - 2 on closed surfaces.
    pub gauss_bonnet_ok: bool,
    pub singularities: Vec<SingularityReport>,
    pub warnings: Vec<String>,
}

impl InfoReport {
    pub fn new(surface: &Surface) -> Self {
        let closed = surface.is_closed();
        InfoReport {
            surface_id: hex_id(surface.content_id()),
            polygons: surface.polygons.len(),
            pairings: surface.pairings.len(),
            genus: surface.genus,
            euler_characteristic: surface.euler_characteristic,
            boundary_components: surface.boundary_components.len(),
            closed,
            index_sum: surface.index_sum(),
            gauss_bonnet_ok: !closed || surface.index_sum() == 2 * surface.genus as i64 - 2,
            singularities: surface.singularities.iter().map(SingularityReport::new).collect(),
            warnings: surface.warnings.clone(),
        }
    }
}

/// Header line of a trace dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceHeader {
    pub polygon: usize,
    pub start: [f64; 2],
    pub direction: f64,
}

/// One crossing line of a trace dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceLine {
    pub edge: [usize; 2],
    pub coord: f64,
    pub ratio: f64,
}

/// Terminal line of a trace dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceEnd {
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singularity: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edge: Option<[usize; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coord: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cycle: Option<GeodesicReport>,
    pub crossings: usize,
    pub path_length: f64,
}

/// Serialize a trace as JSON lines: header, one line per crossing, outcome.
pub fn trace_dump(result: &TraceResult) -> String {
    let mut out = String::new();
    let header = TraceHeader {
        polygon: result.start.polygon,
        start: [result.start.position.x, result.start.position.y],
        direction: result.direction.radians(),
    };
    out.push_str(&serde_json::to_string(&header).unwrap());
    out.push('\n');
    for c in &result.crossings {
        let line = TraceLine {
            edge: [c.edge.polygon, c.edge.edge_index],
            coord: c.coord,
            ratio: c.accumulated_ratio,
        };
        out.push_str(&serde_json::to_string(&line).unwrap());
        out.push('\n');
    }
    let end = match &result.outcome {
        TraceOutcome::HitSingularity { singularity } => TraceEnd {
            outcome: "hit_singularity".into(),
            singularity: Some(*singularity),
            edge: None,
            coord: None,
            cycle: None,
            crossings: result.crossings.len(),
            path_length: result.path_length,
        },
        TraceOutcome::CrossedBoundary { edge, coord } => TraceEnd {
            outcome: "crossed_boundary".into(),
            singularity: None,
            edge: Some([edge.polygon, edge.edge_index]),
            coord: Some(*coord),
            cycle: None,
            crossings: result.crossings.len(),
            path_length: result.path_length,
        },
        TraceOutcome::LimitCycle(geo) => TraceEnd {
            outcome: "limit_cycle".into(),
            singularity: None,
            edge: None,
            coord: None,
            cycle: Some(GeodesicReport::new(geo)),
            crossings: result.crossings.len(),
            path_length: result.path_length,
        },
        TraceOutcome::BudgetExhausted => TraceEnd {
            outcome: "budget_exhausted".into(),
            singularity: None,
            edge: None,
            coord: None,
            cycle: None,
            crossings: result.crossings.len(),
            path_length: result.path_length,
        },
    };
    out.push_str(&serde_json::to_string(&end).unwrap());
    out.push('\n');
    out
}

/// Parse a trace dump back into (header, crossings).
pub fn parse_trace_dump(text: &str) -> Result<(TraceHeader, Vec<TraceLine>), String> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header: TraceHeader = serde_json::from_str(
        lines.next().ok_or_else(|| "empty trace dump".to_string())?,
    )
    .map_err(|e| format!("bad trace header: {e}"))?;
    let mut crossings = Vec::new();
    for line in lines {
        if line.contains("\"outcome\"") {
            break;
        }
        crossings.push(serde_json::from_str(line).map_err(|e| format!("bad trace line: {e}"))?);
    }
    Ok((header, crossings))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicReport {
    pub id: String,
    pub direction: f64,
    pub holonomy: f64,
    pub hyperbolic: bool,
    pub base_edge: [usize; 2],
    pub base_coord: f64,
    pub signature: Vec<[usize; 2]>,
}

impl GeodesicReport {
    pub fn new(geo: &ClosedGeodesic) -> Self {
        GeodesicReport {
            id: hex_id(geo.content_id()),
            direction: geo.direction.radians(),
            holonomy: geo.holonomy,
            hyperbolic: geo.is_hyperbolic,
            base_edge: [geo.base.edge.polygon, geo.base.edge.edge_index],
            base_coord: geo.base.coord,
            signature: geo.signature.iter().map(|e| [e.polygon, e.edge_index]).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FlatFamilyReport {
    pub section: [usize; 2],
    pub domain: [f64; 2],
    pub direction: f64,
    pub signature: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeodesicScanReport {
    pub direction: f64,
    pub hyperbolic: Vec<GeodesicReport>,
    pub flat_families: Vec<FlatFamilyReport>,
}

impl GeodesicScanReport {
    pub fn new(direction: f64, scan: &GeodesicScan) -> Self {
        GeodesicScanReport {
            direction,
            hyperbolic: scan.hyperbolic.iter().map(GeodesicReport::new).collect(),
            flat_families: scan
                .flat_families
                .iter()
                .map(|f| FlatFamilyReport {
                    section: [f.section.polygon, f.section.edge_index],
                    domain: [f.domain.0, f.domain.1],
                    direction: f.direction.radians(),
                    signature: f.signature.iter().map(|e| [e.polygon, e.edge_index]).collect(),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaddleConnectionReport {
    pub id: String,
    pub start_singularity: usize,
    pub end_singularity: usize,
    pub start_corner: [usize; 2],
    pub direction: f64,
    pub chart_length: f64,
    pub crossings: usize,
}

impl SaddleConnectionReport {
    pub fn new(sc: &SaddleConnection) -> Self {
        SaddleConnectionReport {
            id: hex_id(sc.content_id()),
            start_singularity: sc.start_singularity,
            end_singularity: sc.end_singularity,
            start_corner: [sc.start_corner.0, sc.start_corner.1],
            direction: sc.direction.radians(),
            chart_length: sc.chart_length,
            crossings: sc.signature.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CylinderReport {
    pub core: GeodesicReport,
    pub direction_interval: [f64; 2],
    pub angular_extent: f64,
    pub spans_pi: bool,
    pub boundary: Vec<SaddleConnectionReport>,
}

impl CylinderReport {
    pub fn new(c: &Cylinder) -> Self {
        CylinderReport {
            core: GeodesicReport::new(&c.core),
            direction_interval: [c.direction_interval.0, c.direction_interval.1],
            angular_extent: c.angular_extent,
            spans_pi: c.spans_pi,
            boundary: c.boundary.iter().map(SaddleConnectionReport::new).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VeechReport {
    pub verdict: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cylinder: Option<CylinderReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directions_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cylinders_extended: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_extent: Option<f64>,
}

impl VeechReport {
    pub fn new(v: &VeechVerdict) -> Self {
        match v {
            VeechVerdict::FoundCylinder(c) => VeechReport {
                verdict: "found_cylinder".into(),
                cylinder: Some(CylinderReport::new(c)),
                directions_checked: None,
                cylinders_extended: None,
                max_extent: None,
            },
            VeechVerdict::NoLargeCylinderFound {
                directions_checked,
                cylinders_extended,
                max_extent,
            } => VeechReport {
                verdict: "no_large_cylinder_found".into(),
                cylinder: None,
                directions_checked: Some(*directions_checked),
                cylinders_extended: Some(*cylinders_extended),
                max_extent: Some(*max_extent),
            },
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DisconnectionJson {
    pub disconnecting: bool,
    pub components: usize,
    pub euler_before: i64,
    pub euler_after: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certified_bound: Option<usize>,
}

impl DisconnectionJson {
    pub fn new(r: &DisconnectionReport) -> Self {
        DisconnectionJson {
            disconnecting: r.disconnecting,
            components: r.components,
            euler_before: r.euler_before,
            euler_after: r.euler_after,
            certified_bound: r.certified_bound,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CrossingBoundJson {
    pub global_max: usize,
    pub budget_crossings: usize,
    pub traces_run: usize,
    pub per_direction: Vec<DirectionBoundJson>,
    pub openness_ok: bool,
    pub openness_failures: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DirectionBoundJson {
    pub direction: f64,
    pub k_lower: usize,
}

impl CrossingBoundJson {
    pub fn new(e: &CrossingBoundEstimate) -> Self {
        let failures = e.openness.iter().filter(|p| !(p.minus_ok && p.plus_ok)).count();
        CrossingBoundJson {
            global_max: e.global_max,
            budget_crossings: e.budget_crossings,
            traces_run: e.traces_run,
            per_direction: e
                .per_direction
                .iter()
                .map(|b| DirectionBoundJson {
                    direction: b.direction.radians(),
                    k_lower: b.k_lower,
                })
                .collect(),
            openness_ok: failures == 0,
            openness_failures: failures,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PencilJson {
    pub apex_polygon: usize,
    pub apex: [f64; 2],
    pub interval: [f64; 2],
    pub trivial: bool,
    pub witnesses: usize,
}

impl PencilJson {
    pub fn new(p: &Pencil) -> Self {
        PencilJson {
            apex_polygon: p.apex.polygon,
            apex: [p.apex.position.x, p.apex.position.y],
            interval: [p.interval.0, p.interval.1],
            trivial: p.trivial,
            witnesses: p.witnesses.len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepEntryJson {
    pub direction: f64,
    pub class: String,
    pub has_hyperbolic: bool,
    pub witnesses: usize,
    pub refined: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BinJson {
    pub total: usize,
    pub with_hyperbolic: usize,
    pub morse_smale: usize,
    pub saddle_connection: usize,
    pub boundary: usize,
    pub unresolved: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepJson {
    pub surface_id: String,
    pub n: usize,
    pub seed: u64,
    pub max_crossings: usize,
    pub morse_smale: usize,
    pub saddle_connection: usize,
    pub boundary: usize,
    pub unresolved: usize,
    pub bins_with_hyperbolic: usize,
    pub bins: Vec<BinJson>,
    pub hyperbolic_intervals: Vec<[f64; 2]>,
    pub entries: Vec<SweepEntryJson>,
}

pub fn class_name(c: DirectionClass) -> &'static str {
    match c {
        DirectionClass::MorseSmale => "morse_smale",
        DirectionClass::SaddleConnectionDirection => "saddle_connection",
        DirectionClass::BoundaryEscape => "boundary",
        DirectionClass::Unresolved => "unresolved",
    }
}

impl SweepJson {
    pub fn new(r: &SweepReport) -> Self {
        SweepJson {
            surface_id: hex_id(r.surface_id),
            n: r.n_requested,
            seed: r.seed,
            max_crossings: r.max_crossings,
            morse_smale: r.morse_smale,
            saddle_connection: r.saddle_connection,
            boundary: r.boundary,
            unresolved: r.unresolved,
            bins_with_hyperbolic: r.bins_with_hyperbolic(),
            bins: r
                .bins
                .iter()
                .map(|b| BinJson {
                    total: b.total,
                    with_hyperbolic: b.with_hyperbolic,
                    morse_smale: b.morse_smale,
                    saddle_connection: b.saddle_connection,
                    boundary: b.boundary,
                    unresolved: b.unresolved,
                })
                .collect(),
            hyperbolic_intervals: r.hyperbolic_intervals.iter().map(|&(a, b)| [a, b]).collect(),
            entries: r
                .entries
                .iter()
                .map(|e| SweepEntryJson {
                    direction: e.direction,
                    class: class_name(e.class).to_string(),
                    has_hyperbolic: e.has_hyperbolic,
                    witnesses: e.witness_count,
                    refined: e.refined,
                })
                .collect(),
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
