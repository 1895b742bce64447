pub mod basis;
pub mod benchmarks;
pub mod boundary;
pub mod error;
pub mod field;
pub mod grid;
pub mod integrator;
pub mod matrix;
pub mod operator;
pub mod report;
pub mod stability;
pub mod weights;

pub use basis::{BasisFamily, KnotStencil};
pub use boundary::{apply_boundary, BoundarySpec, EdgeCondition};
pub use error::{Error, Result};
pub use field::Field;
pub use grid::{make_grid, Axis, Grid2D};
pub use integrator::{FnRhs, IntegrationSummary, Rhs, SspRk54};
pub use matrix::Matrix;
pub use operator::{assemble_operator, PdeCoefficients, SemiDiscreteSystem};
pub use weights::{build_weight_set, TridiagonalSystem, WeightSet};
pub use stability::{check_stability, spectrum, stability_function, SpectrumReport};
pub use benchmarks::{BenchmarkProblem, BoundaryKind, Domain, ErrorReport, ExperimentConfig, StepRule};
pub use report::{ReferenceTable, TolerancePolicy};
