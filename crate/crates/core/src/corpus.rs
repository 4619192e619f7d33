//! Small reference surfaces with known solutions.

use crate::format::{parse_mesh, MeshFile};

const DOUBLE_TRIANGLE: &str = include_str!("../../../fixtures/double_tri.mesh");
const TETRAHEDRON: &str = include_str!("../../../fixtures/tetrahedron.mesh");
const OCTAHEDRON: &str = include_str!("../../../fixtures/octahedron.mesh");

fn load(text: &str) -> MeshFile {
    parse_mesh(text).expect("bundled mesh parses")
}

/// Two triangles glued along all three edges, `D ≡ 0.8π`, equilateral
/// metric with side `arccos(1/√5)`.
pub fn double_triangle() -> MeshFile {
    load(DOUBLE_TRIANGLE)
}

/// Boundary of a tetrahedron with `D ≡ 0.9π`.
pub fn tetrahedron() -> MeshFile {
    load(TETRAHEDRON)
}

/// Boundary of the octahedron with `D ≡ π` and the octant metric `l ≡ π/2`.
pub fn octahedron() -> MeshFile {
    load(OCTAHEDRON)
}
