//! Principal SO(m)-extensions of the base dynamics: cocycle extensions of
//! the toral automorphism, continuous extensions of the geodesic flow and
//! Levi-Civita transport in the disk.

pub mod cocycle;
pub mod equidistribution;
pub mod step;
pub mod transport;

pub use cocycle::{cocycle_product, kahler_like_cocycle, Cocycle, CocycleKind, TrigTerm};
pub use equidistribution::{batch_means, fiber_equidistribution, EquidistributionEntry, Observable};
pub use step::{step_extension, write_orbit_csv, Advance, BaseDynamics, ExtendedState, ExtensionConfig, Orbit};
pub use transport::{
    geodesic_loop, geodesic_path, holonomy_angle, orientation, parallel_transport_disk, triangle_angles, triangle_area,
};
