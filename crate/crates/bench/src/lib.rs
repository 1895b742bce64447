//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use dqcd_core::benchmarks::problem1;
use dqcd_core::{assemble_operator, build_weight_set, BasisFamily, Domain, Field, PdeCoefficients, SemiDiscreteSystem};

/// Gaussian pulse operator on `[1, 2]^2` with `n` nodes per direction.
pub fn pulse_system(basis: BasisFamily, n: usize) -> (SemiDiscreteSystem, Vec<f64>) {
    let p = problem1(PdeCoefficients::new(0.05, 0.05, 0.8, 0.8), Domain::new(1.0, 2.0, 1.0, 2.0))
        .expect("valid coefficients");
    let grid = p.domain.grid(n, n).expect("valid grid");
    let weights = Arc::new(build_weight_set(basis, &grid).expect("valid basis"));
    let u = Field::sample(&grid, |x, y| (p.initial)(x, y)).gather_interior();
    let system = assemble_operator(p.coeffs, weights, grid, p.boundary).expect("consistent shapes");
    (system, u)
}
