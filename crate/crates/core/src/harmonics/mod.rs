//! Spherical harmonics on the fibers of the unit sphere bundle.

pub mod degree;
pub mod killing;
pub mod poly;
pub mod quadrature;
pub mod spectrum;
pub mod tensor;

pub use degree::{topological_degree_s2, DegreeEstimate};
pub use killing::{killing_form_residual, FormField, PatchMetric};
pub use poly::{harmonic_projection, monomial_sphere_integral, monomials_of_degree, sphere_area, Polynomial};
pub use quadrature::SphereQuadrature;
pub use spectrum::{
    degree_spectrum, degree_spectrum_with, harmonic_dimension, Degree, DegreeSpectrum, FiberFunction, Parity,
    SpectrumMethod,
};
pub use tensor::{
    laplace_eigenvalue, pi_star, trace_free_project, vertical_laplacian_eigencheck, SymTensor, TraceFreeSymTensor,
};
