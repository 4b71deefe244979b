//! Brouwer degree of a map `S² → S²` by summing signed solid angles of the
//! images of a fine triangulation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coarsest subdivision accepted.
pub const MIN_MESH: usize = 64;
/// Largest admissible distance of the raw sum from an integer.
pub const MAX_DEGREE_RESIDUAL: f64 = 0.05;
/// Image triangles with an edge longer than this (radians) make the solid
/// angle branch ambiguous.
pub const MAX_IMAGE_EDGE: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub degree: i64,
    /// `|raw − degree|` before rounding.
    pub residual: f64,
    pub triangles: usize,
}

type P3 = [f64; 3];

fn dot(a: P3, b: P3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: P3, b: P3) -> P3 {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn normalize(a: P3) -> P3 {
    let r = dot(a, a).sqrt();
    [a[0] / r, a[1] / r, a[2] / r]
}

/// Signed solid angle of the spherical triangle `(a, b, c)` of unit vectors
/// (Van Oosterom–Strackee).
pub fn solid_angle(a: P3, b: P3, c: P3) -> f64 {
    let num = dot(a, cross(b, c));
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Positively oriented triangles of the octahedron, each face cut into
/// `mesh²` pieces and pushed radially onto the sphere.
pub fn octahedral_mesh(mesh: usize) -> Vec<[P3; 3]> {
    let mut out = Vec::with_capacity(8 * mesh * mesh);
    for sx in [1.0, -1.0] {
        for sy in [1.0, -1.0] {
            for sz in [1.0, -1.0] {
                let (a, mut b, mut c) = ([sx, 0.0, 0.0], [0.0, sy, 0.0], [0.0, 0.0, sz]);
                if sx * sy * sz < 0.0 {
                    std::mem::swap(&mut b, &mut c);
                }
                let at = |i: usize, j: usize| -> P3 {
                    let (u, v) = (i as f64 / mesh as f64, j as f64 / mesh as f64);
                    let w = 1.0 - u - v;
                    normalize([
                        w * a[0] + u * b[0] + v * c[0],
                        w * a[1] + u * b[1] + v * c[1],
                        w * a[2] + u * b[2] + v * c[2],
                    ])
                };
                for i in 0..mesh {
                    for j in 0..mesh - i {
                        out.push([at(i, j), at(i + 1, j), at(i, j + 1)]);
                        if i + j + 1 < mesh {
                            out.push([at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)]);
                        }
                    }
                }
            }
        }
    }
    out
}

/// Degree of `xi`, which must return unit vectors.
pub fn topological_degree_s2<F>(xi: F, mesh: usize) -> Result<DegreeEstimate>
where
    F: Fn(P3) -> P3,
{
    if mesh < MIN_MESH {
        return Err(Error::InvalidInput(format!("mesh must be at least {MIN_MESH}, got {mesh}")));
    }
    let tris = octahedral_mesh(mesh);
    let min_cos = MAX_IMAGE_EDGE.cos();
    let mut torn = false;
    let parts: Vec<f64> = tris
        .iter()
        .map(|[a, b, c]| {
            let (a, b, c) = (normalize(xi(*a)), normalize(xi(*b)), normalize(xi(*c)));
            if dot(a, b) < min_cos || dot(b, c) < min_cos || dot(c, a) < min_cos {
                torn = true;
            }
            solid_angle(a, b, c)
        })
        .collect();
    let raw = super::quadrature::pairwise_sum(&parts) / (4.0 * std::f64::consts::PI);
    let degree = raw.round();
    let residual = (raw - degree).abs();
    if torn || !residual.is_finite() || residual >= MAX_DEGREE_RESIDUAL {
        return Err(Error::DegreeNotInteger(residual));
    }
    Ok(DegreeEstimate { degree: degree as i64, residual, triangles: tris.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_map(v: P3) -> P3 {
        [2.0 * v[0] * v[2], 2.0 * v[1] * v[2], v[2] * v[2] - v[0] * v[0] - v[1] * v[1]]
    }

    #[test]
    fn mesh_covers_the_sphere_once() {
        let total: f64 = octahedral_mesh(16).iter().map(|[a, b, c]| solid_angle(*a, *b, *c)).sum();
        assert!((total - 4.0 * std::f64::consts::PI).abs() < 1e-10);
        assert_eq!(octahedral_mesh(64).len(), 8 * 64 * 64);
    }

    #[test]
    fn octant_angle() {
        let w = solid_angle([1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]);
        assert!((w - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn classical_degrees() {
        let id = topological_degree_s2(|v| v, 64).unwrap();
        assert_eq!(id.degree, 1);
        assert!(id.residual < 1e-10);
        assert_eq!(topological_degree_s2(|v| [-v[0], -v[1], -v[2]], 64).unwrap().degree, -1);
        assert_eq!(topological_degree_s2(even_map, 64).unwrap().degree, 0);
        // a reflection reverses orientation
        assert_eq!(topological_degree_s2(|v| [v[0], v[1], -v[2]], 64).unwrap().degree, -1);
    }

    #[test]
    fn winding_twice_around_the_axis() {
        // (θ, φ) ↦ (θ, 2φ) has degree 2
        let map = |v: P3| {
            let r = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if r < 1e-300 {
                return v;
            }
            let (c, s) = (v[0] / r, v[1] / r);
            [r * (c * c - s * s), r * 2.0 * c * s, v[2]]
        };
        assert_eq!(topological_degree_s2(map, 64).unwrap().degree, 2);
    }

    #[test]
    fn stable_under_refinement() {
        for f in [(|v: P3| v) as fn(P3) -> P3, even_map, |v: P3| [-v[0], -v[1], -v[2]]] {
            let d: Vec<i64> = [64, 128, 256].iter().map(|m| topological_degree_s2(f, *m).unwrap().degree).collect();
            assert!(d.windows(2).all(|w| w[0] == w[1]), "{d:?}");
        }
    }

    #[test]
    fn coarse_meshes_are_refused() {
        assert!(matches!(topological_degree_s2(|v| v, 8), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn discontinuous_maps_are_flagged() {
        // flips the lower hemisphere, so equatorial triangles map to near-antipodal triples
        let map = |v: P3| if v[2] > 0.0 { v } else { [-v[0], -v[1], -v[2]] };
        assert!(matches!(topological_degree_s2(map, 64), Err(Error::DegreeNotInteger(_))));
        let blank = |_: P3| [f64::NAN; 3];
        assert!(matches!(topological_degree_s2(blank, 64), Err(Error::DegreeNotInteger(_))));
    }
}
