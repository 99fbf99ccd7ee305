//! Obstacle scattering data: boundary curves, the Nyström boundary system,
//! receiver evaluation and noise.

pub mod curve;
pub mod data;
pub mod nystrom;
pub mod solver;

pub use curve::{make_curve, BoundaryCurve, CurveKind, CurvePoint};
pub use data::{add_noise, synthesize_data, synthesize_with, ScatterDataSet, SurveyGeometry, FORMAT_VERSION};
pub use nystrom::Mesh;
pub use solver::{BcKind, ForwardSolver, ImpedanceProfile, Obstacle, SolverOptions};
