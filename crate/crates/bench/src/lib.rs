//! Inputs shared by the benchmarks.

use std::f64::consts::PI;

use polysphere::angles;
use polysphere::{AngleVector, EdgeFunction, Mesh, MeshFile};

/// Closed surface made of `2n` triangles: the suspension of an `n`-gon.
/// Edges are named `r{i}` (rim), `t{i}` (to the top apex), `b{i}` (bottom).
pub fn bipyramid(n: usize) -> Mesh {
    assert!(n >= 3);
    let faces = (0..n).flat_map(|i| {
        let j = (i + 1) % n;
        [
            (
                format!("top{i}"),
                [format!("t{j}"), format!("t{i}"), format!("r{i}")],
            ),
            (
                format!("bot{i}"),
                [format!("b{j}"), format!("b{i}"), format!("r{i}")],
            ),
        ]
    });
    Mesh::from_faces(faces).expect("bipyramid is a valid surface")
}

/// Edge invariant of a deterministic, uneven angle structure with corner
/// angles in `0.45π ± 0.1`, which keeps every face spherical.
pub fn uneven_invariant(m: &Mesh) -> EdgeFunction {
    let x = AngleVector(
        (0..m.num_corners())
            .map(|c| 0.45 * PI + 0.1 * (1.3 * c as f64).sin())
            .collect(),
    );
    angles::edge_invariant(m, &x).expect("angle vector matches the mesh")
}

pub fn fixture(file: MeshFile) -> (Mesh, EdgeFunction) {
    let d = file.invariant.expect("fixture has an invariant");
    (file.mesh, d)
}
