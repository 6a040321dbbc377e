//! IO, report, and rendering layer over `dilaflow-core`, plus the `dilaflow`
//! command-line binary.

pub mod io;
pub mod render;
pub mod report;
