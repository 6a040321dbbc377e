//! Error types for surface construction and the dynamical operations.

use alloc::string::String;
use core::fmt;

use crate::surface::EdgeRef;

/// Failures while validating a polygon complex into a dilation surface.
#[derive(Clone, Debug, PartialEq)]
pub enum SurfaceError {
    /// A polygon has fewer than three vertices.
    TooFewVertices { polygon: usize },
    /// A polygon boundary crosses itself.
    SelfIntersectingPolygon { polygon: usize },
    /// A polygon is not counterclockwise (or is degenerate).
    NonPositiveArea { polygon: usize },
    /// A vertex coordinate is NaN or infinite.
    NonFiniteCoordinate { polygon: usize },
    /// An edge reference points outside the polygon list.
    IndexOutOfRange { edge: EdgeRef },
    /// An edge appears in more than one pairing, or is paired with itself.
    DuplicatePairing { edge: EdgeRef },
    /// Paired edge vectors are not anti-parallel within tolerance.
    NonParallelEdges { e: EdgeRef, f: EdgeRef, defect: f64 },
    /// Derived pairing ratio is not strictly positive.
    NegativeRatio { e: EdgeRef, f: EdgeRef },
    /// The pairing adjacency graph is not connected.
    Disconnected,
    /// A boundary component carries no singular or marked point and
    /// auto-marking was disabled.
    BareBoundaryComponent { component: usize },
    /// Transition maps around a vertex class do not fix the vertex.
    InconsistentVertex { class_id: usize, defect: f64 },
    /// An interior cone angle is not an integer multiple of 2π.
    BadConeAngle { class_id: usize, angle: f64 },
}

impl fmt::Display for SurfaceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooFewVertices { polygon } => {
                write!(f, "polygon {polygon} has fewer than 3 vertices")
            }
            Self::SelfIntersectingPolygon { polygon } => {
                write!(f, "polygon {polygon} is self-intersecting")
            }
            Self::NonPositiveArea { polygon } => {
                write!(f, "polygon {polygon} is not counterclockwise (signed area <= 0)")
            }
            Self::NonFiniteCoordinate { polygon } => {
                write!(f, "polygon {polygon} has a non-finite vertex coordinate")
            }
            Self::IndexOutOfRange { edge } => {
                write!(f, "edge reference ({}, {}) out of range", edge.polygon, edge.edge_index)
            }
            Self::DuplicatePairing { edge } => {
                write!(
                    f,
                    "edge ({}, {}) appears in more than one pairing",
                    edge.polygon, edge.edge_index
                )
            }
            Self::NonParallelEdges { e, f: f2, defect } => write!(
                f,
                "paired edges ({}, {}) and ({}, {}) are not anti-parallel (defect {defect:.3e})",
                e.polygon, e.edge_index, f2.polygon, f2.edge_index
            ),
            Self::NegativeRatio { e, f: f2 } => write!(
                f,
                "pairing of ({}, {}) and ({}, {}) has non-positive ratio",
                e.polygon, e.edge_index, f2.polygon, f2.edge_index
            ),
            Self::Disconnected => write!(f, "surface is not connected"),
            Self::BareBoundaryComponent { component } => {
                write!(f, "boundary component {component} has no singular point")
            }
            Self::InconsistentVertex { class_id, defect } => write!(
                f,
                "vertex class {class_id} has inconsistent transition maps (defect {defect:.3e})"
            ),
            Self::BadConeAngle { class_id, angle } => write!(
                f,
                "interior vertex class {class_id} has cone angle {angle} not a multiple of 2π"
            ),
        }
    }
}

/// Failures of the holonomy composition along an edge path.
#[derive(Clone, Debug, PartialEq)]
pub enum PathError {
    /// Consecutive crossings do not chain through adjacent polygons.
    BrokenChain { position: usize },
    /// A crossing references an unpaired (boundary) edge.
    UnpairedEdge { edge: EdgeRef },
}

impl fmt::Display for PathError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::BrokenChain { position } => {
                write!(f, "path breaks at crossing {position}: not on the current polygon")
            }
            Self::UnpairedEdge { edge } => write!(
                f,
                "path crosses unpaired edge ({}, {})",
                edge.polygon, edge.edge_index
            ),
        }
    }
}

/// Builder parameter rejection.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamOutOfRange {
    pub what: String,
}

impl fmt::Display for ParamOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parameter out of range: {}", self.what)
    }
}

/// Tracer start rejection.
#[derive(Clone, Debug, PartialEq)]
pub enum TraceError {
    InvalidStart,
}

impl fmt::Display for TraceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidStart => write!(f, "start point is not inside the given polygon"),
        }
    }
}

/// Return-map construction rejection.
#[derive(Clone, Debug, PartialEq)]
pub enum ReturnMapError {
    SectionParallelToDirection,
}

impl fmt::Display for ReturnMapError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SectionParallelToDirection => {
                write!(f, "section edge is parallel to the flow direction")
            }
        }
    }
}

/// Cylinder extension rejection.
#[derive(Clone, Debug, PartialEq)]
pub enum CylinderError {
    NotHyperbolic,
}

impl fmt::Display for CylinderError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotHyperbolic => write!(f, "geodesic is flat (holonomy 1); no cylinder family"),
        }
    }
}

/// Horizon-module failures.
#[derive(Clone, Debug, PartialEq)]
pub enum HorizonError {
    /// The claimed saddle connection could not be confirmed by a trace.
    NotASaddleConnection,
    /// Empirical crossing counts keep growing with budget; no stable pencil.
    UnstableCrossingBound { at_budget: usize, max_seen: usize },
    /// Cutting produced geometry the validator rejected.
    Surface(SurfaceError),
}

impl fmt::Display for HorizonError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::NotASaddleConnection => write!(f, "segment is not a saddle connection"),
            Self::UnstableCrossingBound { at_budget, max_seen } => write!(
                f,
                "crossing bound still grows at budget {at_budget} (max {max_seen}); no stable pencil"
            ),
            Self::Surface(e) => write!(f, "cut surface invalid: {e}"),
        }
    }
}

impl From<SurfaceError> for HorizonError {
    fn from(e: SurfaceError) -> Self {
        Self::Surface(e)
    }
}

#[cfg(feature = "std")]
mod std_impls {
    use super::*;
    impl std::error::Error for SurfaceError {}
    impl std::error::Error for PathError {}
    impl std::error::Error for ParamOutOfRange {}
    impl std::error::Error for TraceError {}
    impl std::error::Error for ReturnMapError {}
    impl std::error::Error for CylinderError {}
    impl std::error::Error for HorizonError {}
}
