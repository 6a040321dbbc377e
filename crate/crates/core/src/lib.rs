//! Dilation surfaces and their directional flow.
//!
//! A dilation surface is a compact surface built from Euclidean polygons
//! whose edges are glued by maps `z ↦ az + b` with `a > 0`. Directions are
//! globally defined, lengths are not: the flow along a fixed direction can
//! spiral onto attracting closed geodesics, which never happens on
//! translation surfaces. This crate provides:
//!
//! - the validated surface model and canonical builders ([`surface`],
//!   [`builders`]);
//! - a deterministic tracer for the directional flow with limit-cycle
//!   detection and first-return maps on edges ([`trace`], [`return_map`]);
//! - search for closed geodesics, their maximal cylinders and the
//!   large-cylinder criterion, plus saddle-connection enumeration
//!   ([`geodesics`], [`cylinder`], [`saddle`]);
//! - horizon tests for saddle connections: cutting, disconnection, empirical
//!   crossing bounds and pencils ([`horizon`]);
//! - a direction sweep classifying the circle into Morse-Smale /
//!   saddle-connection / unresolved directions ([`sweep`]).
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is
//! enabled; all randomness is seeded and all results are deterministic.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod builders;
pub mod cylinder;
pub mod error;
pub mod geodesics;
pub mod geom;
pub mod horizon;
pub mod math;
pub mod return_map;
pub mod saddle;
pub mod surface;
pub mod sweep;
pub mod trace;

pub use builders::{build_dilation_cylinder, build_torus, build_two_chamber, TwoChamberParams};
pub use geom::{AffineMap, DirectionAngle, PlanarPoint};
pub use surface::{holonomy_of_path, EdgeRef, Polygon, Singularity, Surface, SurfaceSpec};
pub use trace::{trace, FlowPoint, TraceConfig, TraceOutcome, TraceResult};
