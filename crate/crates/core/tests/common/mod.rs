#![allow(dead_code)]

use std::f64::consts::PI;

use polysphere::{corpus, AngleVector, Mesh, MeshFile, TriangleAngles};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn corpus() -> Vec<(&'static str, MeshFile)> {
    vec![
        ("double triangle", corpus::double_triangle()),
        ("tetrahedron", corpus::tetrahedron()),
        ("octahedron", corpus::octahedron()),
    ]
}

/// Uniform on the part of the moduli space at least `margin` from its
/// boundary, by rejection from the cube `(0, π)³`.
pub fn interior_point<R: Rng>(rng: &mut R, margin: f64) -> TriangleAngles {
    loop {
        let x = TriangleAngles(std::array::from_fn(|_| rng.random_range(0.0..PI)));
        if x.margin() >= margin {
            return x;
        }
    }
}

/// Angles summing to π, uniform on the simplex.
pub fn euclidean_point<R: Rng>(rng: &mut R) -> TriangleAngles {
    let (mut u, mut v) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
    if u > v {
        std::mem::swap(&mut u, &mut v);
    }
    let a = PI * u;
    let b = PI * (v - u);
    TriangleAngles([a, b, PI - a - b])
}

pub fn random_structure<R: Rng>(m: &Mesh, rng: &mut R, margin: f64) -> AngleVector {
    AngleVector(
        (0..m.num_faces())
            .flat_map(|_| interior_point(rng, margin).0)
            .collect(),
    )
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
