//! Spherical cone metrics on closed triangulated surfaces.
//!
//! Given an edge invariant `D`, the crate decides whether some angle
//! structure realizes it, minimizes the total capacity over those that do,
//! and reads a spherical polyhedral metric off the minimizer.

pub mod angles;
pub mod capacity;
pub mod corpus;
pub mod cycles;
pub mod error;
pub mod format;
pub mod lobachevsky;
pub mod mesh;
pub mod simplex;
pub mod solver;
pub mod trig;

pub use angles::{AngleVector, ConstraintSystem, FeasibilityResult, FeasibilityStatus};
pub use capacity::CapacityValue;
pub use cycles::{PiCycle, PiCycleSearch};
pub use error::{Error, Result};
pub use format::{parse_mesh, render_mesh, MeshFile};
pub use lobachevsky::{lobachevsky, LobachevskyEvaluator, LobachevskyMethod};
pub use mesh::{validate_mesh, EdgeFunction, Face, Mesh, ValidationReport, Vertex};
pub use solver::{ExtractedMetric, RoundtripReport, SolveOptions, SolveReport, SolveStatus};
pub use trig::{BoundaryType, TriangleAngles, TriangleLengths};
