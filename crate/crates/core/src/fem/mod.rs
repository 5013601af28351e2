//! Reference elements, quadrature, degree-of-freedom maps and assembly.

mod assembly;
mod element;
mod field;
pub mod quadrature;
mod space;
mod system;

pub use assembly::{assemble_divergence, assemble_gradient_coupling, assemble_gram, local_p1_mass, GramForm};
pub use element::{DofLocation, ElementKind, TriangleGeometry};
pub use field::{assemble_field_loads, error_norms, field_norms, AnalyticField, LoadKind};
pub use space::{make_space, FeSpace};
pub use system::{
    evaluate_norms, l2_project_gradient, norms_with, project_piecewise_constant, ElementPair, Norms, StokesSystem,
};

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::mesh::MeshError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FemError {
    #[error("unsupported space: {0}")]
    Unsupported(String),
    #[error("field is missing the required {0} callback")]
    MissingCallback(&'static str),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}
