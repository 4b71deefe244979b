//! Anosov base systems: a hyperbolic toral automorphism (discrete time) and
//! the geodesic flow of the hyperbolic plane with an octagonal fundamental
//! domain (continuous time).

pub mod disk;
pub mod fuchsian;
pub mod rates;
pub mod torus;

use serde::{Deserialize, Serialize};

pub use disk::{geodesic_flow, hyperbolic_distance, DiskPoint, MobiusIsometry, UnitTangent};
pub use fuchsian::{reduce_to_domain, FuchsianDomain};
pub use rates::{anosov_rate_check, AnosovSystem, RateEstimate};
pub use torus::{cat_step, cat_step_inverse, homoclinic_points, HomoclinicPoint, ToralAutomorphism, TorusPoint};

/// A phase point of either base system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BasePoint {
    Torus(TorusPoint),
    Tangent(UnitTangent),
}

impl BasePoint {
    /// Real coordinates fed to cocycle generators: `(x, y)` on the torus,
    /// `(Re z, Im z, θ/2π)` on the unit tangent bundle.
    pub fn features(&self) -> Vec<f64> {
        match self {
            BasePoint::Torus(p) => vec![p.x(), p.y()],
            BasePoint::Tangent(v) => {
                let z = v.base().z();
                vec![z.re, z.im, v.angle() / std::f64::consts::TAU]
            }
        }
    }

    pub fn record(&self) -> StateRecord {
        match self {
            BasePoint::Torus(p) => StateRecord { model: "torus".into(), coordinates: vec![p.x(), p.y()], angle: None },
            BasePoint::Tangent(v) => {
                let z = v.base().z();
                StateRecord { model: "disk".into(), coordinates: vec![z.re, z.im], angle: Some(v.angle()) }
            }
        }
    }
}

/// JSON form of a base state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub model: String,
    pub coordinates: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub angle: Option<f64>,
}
