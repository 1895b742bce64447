//! Semi-discrete system `dU/dt = B U + F(t, U)` over the interior nodes.
//!
//! `B = alpha_x A2 + alpha_y B2 - beta_x A1 - beta_y B1` where `A_r` acts along
//! x (Kronecker `W_r ⊗ I`) and `B_r` along y (`I ⊗ W_r`), all restricted to
//! interior rows and columns. `F` collects the boundary-column contributions
//! and is rebuilt on every evaluation because Neumann boundary values depend
//! on the interior.

use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::boundary::{apply_boundary, BoundarySpec};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid2D;
use crate::integrator::Rhs;
use crate::matrix::Matrix;
use crate::weights::WeightSet;

/// Largest interior dimension for which a dense `B` is materialized.
pub const DENSE_CAP: usize = 45 * 45;

/// Coefficients of `u_t = ax u_xx + ay u_yy - bx u_x - by u_y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdeCoefficients {
    pub alpha_x: f64,
    pub alpha_y: f64,
    pub beta_x: f64,
    pub beta_y: f64,
}

impl PdeCoefficients {
    pub fn new(alpha_x: f64, alpha_y: f64, beta_x: f64, beta_y: f64) -> Self {
        Self { alpha_x, alpha_y, beta_x, beta_y }
    }

    /// Every coefficient finite and diffusion non-negative.
    pub fn validate(&self) -> Result<()> {
        let all = [self.alpha_x, self.alpha_y, self.beta_x, self.beta_y];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coefficient in {self:?}")));
        }
        if self.alpha_x < 0.0 || self.alpha_y < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "diffusion coefficients must be non-negative, got alpha_x = {}, alpha_y = {}",
                self.alpha_x, self.alpha_y
            )));
        }
        Ok(())
    }

    /// Strictly positive diffusion, as required by the benchmark problems.
    pub fn validate_parabolic(&self) -> Result<()> {
        self.validate()?;
        if self.alpha_x > 0.0 && self.alpha_y > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "diffusion coefficients must be positive, got alpha_x = {}, alpha_y = {}",
                self.alpha_x, self.alpha_y
            )))
        }
    }
}

/// The assembled method-of-lines system.
#[derive(Debug, Clone)]
pub struct SemiDiscreteSystem {
    grid: Grid2D,
    weights: Arc<WeightSet>,
    coeffs: PdeCoefficients,
    boundary: BoundarySpec,
    /// `alpha_x a2 - beta_x a1`, full `nx x nx`.
    along_x: Matrix,
    /// `alpha_y b2 - beta_y b1`, full `ny x ny`.
    along_y: Matrix,
}

/// Assemble the semi-discrete operator for `grid` with the given weights.
pub fn assemble_operator(
    coeffs: PdeCoefficients,
    weights: Arc<WeightSet>,
    grid: Grid2D,
    boundary: BoundarySpec,
) -> Result<SemiDiscreteSystem> {
    coeffs.validate()?;
    let (nx, ny) = (grid.nx(), grid.ny());
    let shape_ok = |m: &Matrix, n: usize| m.nrows() == n && m.ncols() == n;
    if !(shape_ok(&weights.a1, nx) && shape_ok(&weights.a2, nx) && shape_ok(&weights.b1, ny) && shape_ok(&weights.b2, ny)) {
        return Err(Error::InvalidConfiguration(format!(
            "weight matrices do not match the {nx}x{ny} grid"
        )));
    }
    let along_x = weights.a2.combine(coeffs.alpha_x, &weights.a1, -coeffs.beta_x);
    let along_y = weights.b2.combine(coeffs.alpha_y, &weights.b1, -coeffs.beta_y);
    Ok(SemiDiscreteSystem { grid, weights, coeffs, boundary, along_x, along_y })
}

impl SemiDiscreteSystem {
    pub fn grid(&self) -> &Grid2D {
        &self.grid
    }

    pub fn weights(&self) -> &WeightSet {
        &self.weights
    }

    pub fn coefficients(&self) -> PdeCoefficients {
        self.coeffs
    }

    pub fn boundary(&self) -> &BoundarySpec {
        &self.boundary
    }

    pub fn interior_len(&self) -> usize {
        self.grid.interior_len()
    }

    fn check_len(&self, name: &str, len: usize) -> Result<()> {
        if len != self.interior_len() {
            return Err(Error::ShapeMismatch(format!(
                "{name} has {len} entries, expected {}",
                self.interior_len()
            )));
        }
        Ok(())
    }

    /// Apply the full-grid stencil to `field` and write interior results.
    fn apply_full(&self, field: &Field, out: &mut [f64]) {
        let (nx, ny) = (self.grid.nx(), self.grid.ny());
        let mj = ny - 2;
        for i in 1..nx - 1 {
            let out_row = &mut out[(i - 1) * mj..i * mj];
            out_row.fill(0.0);
            let px = self.along_x.row(i);
            for (k, &c) in px.iter().enumerate() {
                if c != 0.0 {
                    let line = &field.x_line(k)[1..ny - 1];
                    for (o, &v) in out_row.iter_mut().zip(line) {
                        *o += c * v;
                    }
                }
            }
            let line = field.x_line(i);
            for (jj, o) in out_row.iter_mut().enumerate() {
                *o += crate::matrix::dot(self.along_y.row(jj + 1), line);
            }
        }
    }

    /// `B u` without boundary contributions (matrix-free).
    pub fn apply_operator(&self, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.check_len("state", u.len())?;
        self.check_len("output", out.len())?;
        let mut field = Field::for_grid(&self.grid);
        field.scatter_interior(u)?;
        self.apply_full(&field, out);
        Ok(())
    }

    /// Full field at time `t`: interior from `u`, boundary ring updated.
    pub fn full_field(&self, t: f64, u: &[f64]) -> Result<Field> {
        let mut field = Field::for_grid(&self.grid);
        field.scatter_interior(u)?;
        apply_boundary(&self.boundary, &self.weights, &self.grid, t, &mut field)?;
        Ok(field)
    }

    /// `L(U) = B U + F(t, U)`, using `work` as the full-field scratch.
    pub fn rhs_into(&self, t: f64, u: &[f64], out: &mut [f64], work: &mut Field) -> Result<()> {
        self.check_len("state", u.len())?;
        self.check_len("output", out.len())?;
        work.scatter_interior(u)?;
        apply_boundary(&self.boundary, &self.weights, &self.grid, t, work)?;
        self.apply_full(work, out);
        Ok(())
    }

    /// `L(U) = B U + F(t, U)`.
    pub fn rhs(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.interior_len()];
        let mut work = Field::for_grid(&self.grid);
        self.rhs_into(t, u, &mut out, &mut work)?;
        Ok(out)
    }

    /// Boundary vector `F(t, U) = L(U) - B U`.
    pub fn boundary_vector(&self, t: f64, u: &[f64]) -> Result<Vec<f64>> {
        let full = self.rhs(t, u)?;
        let mut bu = vec![0.0; u.len()];
        self.apply_operator(u, &mut bu)?;
        Ok(full.iter().zip(&bu).map(|(a, b)| a - b).collect())
    }

    /// `alpha_x a2 - beta_x a1` restricted to interior rows and columns.
    pub fn interior_x_operator(&self) -> Matrix {
        let n = self.grid.nx() - 2;
        Matrix::from_fn(n, n, |i, k| self.along_x[(i + 1, k + 1)])
    }

    /// `alpha_y b2 - beta_y b1` restricted to interior rows and columns.
    pub fn interior_y_operator(&self) -> Matrix {
        let n = self.grid.ny() - 2;
        Matrix::from_fn(n, n, |j, l| self.along_y[(j + 1, l + 1)])
    }

    /// Dense `B`; refused above [`DENSE_CAP`] interior unknowns.
    pub fn dense_operator(&self) -> Result<Matrix> {
        let dim = self.interior_len();
        if dim > DENSE_CAP {
            return Err(Error::DimensionCap { dim, cap: DENSE_CAP });
        }
        let (mi, mj) = (self.grid.nx() - 2, self.grid.ny() - 2);
        let px = self.interior_x_operator();
        let qy = self.interior_y_operator();
        let mut b = Matrix::zeros(dim, dim);
        for i in 0..mi {
            for j in 0..mj {
                let r = i * mj + j;
                for k in 0..mi {
                    b[(r, k * mj + j)] += px[(i, k)];
                }
                for l in 0..mj {
                    b[(r, i * mj + l)] += qy[(j, l)];
                }
            }
        }
        Ok(b)
    }

    /// Dump dense `B` as CSV (17 significant digits).
    pub fn write_dense_csv(&self, path: &Path) -> Result<()> {
        let b = self.dense_operator()?;
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        b.write_csv(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// An evaluator with its own scratch field, usable by the integrator.
    pub fn evaluator(&self) -> SystemRhs<'_> {
        SystemRhs { system: self, work: Field::for_grid(&self.grid) }
    }
}

/// [`Rhs`] adapter over a [`SemiDiscreteSystem`].
pub struct SystemRhs<'a> {
    system: &'a SemiDiscreteSystem,
    work: Field,
}

impl Rhs for SystemRhs<'_> {
    fn dim(&self) -> usize {
        self.system.interior_len()
    }

    fn eval(&mut self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        self.system.rhs_into(t, u, out, &mut self.work)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisFamily;
    use crate::boundary::EdgeCondition;
    use crate::weights::build_weight_set;

    fn system(n: usize, coeffs: PdeCoefficients, u: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>) -> SemiDiscreteSystem {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, n, n).unwrap();
        let w = Arc::new(build_weight_set(BasisFamily::Extended { lambda: 0.0 }, &g).unwrap());
        let spec = BoundarySpec::dirichlet_from(&g, u);
        assemble_operator(coeffs, w, g, spec).unwrap()
    }

    fn lcg(seed: &mut u64) -> f64 {
        *seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((*seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
    }

    #[test]
    fn empty_pde_has_zero_operator() {
        let s = system(6, PdeCoefficients::new(0.0, 0.0, 0.0, 0.0), Arc::new(|x, y, _| x + y));
        let b = s.dense_operator().unwrap();
        assert!(b.as_slice().iter().all(|&v| v == 0.0));
        let u = vec![1.0; s.interior_len()];
        assert!(s.rhs(0.0, &u).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_interior_node_composition() {
        // A 3-node axis is below the basis minimum, so compose the 1x1 case
        // from an explicit WeightSet.
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap();
        let ws = build_weight_set(BasisFamily::Trigonometric, &g).unwrap();
        let c = PdeCoefficients::new(0.3, 0.7, 1.1, -0.4);
        let s = assemble_operator(c, Arc::new(ws.clone()), g, BoundarySpec::dirichlet_from(
            &Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 4).unwrap(), Arc::new(|_, _, _| 0.0))).unwrap();
        let b = s.dense_operator().unwrap();
        // B[(0,0),(0,0)] = ax a2_22 + ay b2_22 - bx a1_22 - by b1_22 (1-based)
        let expect = 0.3 * ws.a2[(1, 1)] + 0.7 * ws.b2[(1, 1)] - 1.1 * ws.a1[(1, 1)] + 0.4 * ws.b1[(1, 1)];
        assert!((b[(0, 0)] - expect).abs() < 1e-12 * expect.abs().max(1.0));
        // coupling to (3,2): only the x-direction term
        let r = s.grid().interior_linear_index(3, 2).unwrap();
        let expect = 0.3 * ws.a2[(1, 2)] - 1.1 * ws.a1[(1, 2)];
        assert!((b[(0, r)] - expect).abs() < 1e-12 * expect.abs().max(1.0));
    }

    #[test]
    fn dense_and_matrix_free_agree() {
        let mut seed = 7u64;
        for (nx, ny) in [(5, 5), (9, 13), (20, 17)] {
            let g = Grid2D::new(0.0, 1.0, -1.0, 2.0, nx, ny).unwrap();
            let w = Arc::new(build_weight_set(BasisFamily::Exponential { p: 1.5 }, &g).unwrap());
            let spec = BoundarySpec::dirichlet_from(&g, Arc::new(|_, _, _| 0.0));
            let s = assemble_operator(PdeCoefficients::new(0.05, 0.02, 0.8, -0.3), w, g, spec).unwrap();
            let b = s.dense_operator().unwrap();
            let u: Vec<f64> = (0..s.interior_len()).map(|_| lcg(&mut seed)).collect();
            let dense = b.mul_vec(&u);
            let mut free = vec![0.0; u.len()];
            s.apply_operator(&u, &mut free).unwrap();
            let scale = dense.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for (a, c) in dense.iter().zip(&free) {
                assert!((a - c).abs() <= 1e-13 * scale.max(1.0));
            }
        }
    }

    #[test]
    fn constant_steady_state() {
        let s = system(15, PdeCoefficients::new(0.1, 0.2, 0.8, 0.8), Arc::new(|_, _, _| 3.0));
        let u = vec![3.0; s.interior_len()];
        let r = s.rhs(0.0, &u).unwrap();
        let scale = 3.0 * s.weights().a2.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
        assert!(r.iter().all(|v| v.abs() <= 1e-9 * scale.max(1.0)));
    }

    #[test]
    fn rhs_is_affine_with_frozen_dirichlet_data() {
        let s = system(11, PdeCoefficients::new(0.05, 0.05, 0.8, 0.8), Arc::new(|x, y, _| (x * y).sin()));
        let mut seed = 3u64;
        let u1: Vec<f64> = (0..s.interior_len()).map(|_| lcg(&mut seed)).collect();
        let u2: Vec<f64> = (0..s.interior_len()).map(|_| lcg(&mut seed)).collect();
        let r1 = s.rhs(0.5, &u1).unwrap();
        let r2 = s.rhs(0.5, &u2).unwrap();
        let du: Vec<f64> = u1.iter().zip(&u2).map(|(a, b)| a - b).collect();
        let mut bdu = vec![0.0; du.len()];
        s.apply_operator(&du, &mut bdu).unwrap();
        for k in 0..du.len() {
            assert!((r1[k] - r2[k] - bdu[k]).abs() <= 1e-12 * bdu[k].abs().max(1.0));
        }
    }

    #[test]
    fn convection_of_linear_field() {
        // u = (1 + x)(2 + y): B U + F reproduces -bx u_x - by u_y exactly
        // since second derivatives vanish and weights reproduce linears.
        let u = |x: f64, y: f64, _t: f64| (1.0 + x) * (2.0 + y);
        let s = system(21, PdeCoefficients::new(0.0, 0.0, 0.6, -0.9), Arc::new(u));
        let field = Field::sample(s.grid(), |x, y| u(x, y, 0.0));
        let r = s.rhs(0.0, &field.gather_interior()).unwrap();
        let g = s.grid();
        for i in 2..g.nx() {
            for j in 2..g.ny() {
                let (x, y) = (g.x.nodes()[i - 1], g.y.nodes()[j - 1]);
                let expect = -0.6 * (2.0 + y) + 0.9 * (1.0 + x);
                let k = g.interior_linear_index(i, j).unwrap();
                assert!((r[k] - expect).abs() <= 1e-8, "{} vs {}", r[k], expect);
            }
        }
    }

    #[test]
    fn boundary_vector_uses_symmetric_end_columns() {
        let s = system(9, PdeCoefficients::new(0.3, 0.2, 0.5, -0.7), Arc::new(|x, y, t| 1.0 + x * x + y + t));
        let g = s.grid().clone();
        let u = vec![0.0; s.interior_len()];
        let f = s.boundary_vector(0.25, &u).unwrap();
        let field = s.full_field(0.25, &u).unwrap();
        let w = s.weights();
        let c = s.coefficients();
        let (nx, ny) = (g.nx(), g.ny());
        for i in 1..nx - 1 {
            for j in 1..ny - 1 {
                let expect = c.alpha_x * (w.a2[(i, 0)] * field.at(0, j) + w.a2[(i, nx - 1)] * field.at(nx - 1, j))
                    + c.alpha_y * (w.b2[(j, 0)] * field.at(i, 0) + w.b2[(j, ny - 1)] * field.at(i, ny - 1))
                    - c.beta_x * (w.a1[(i, 0)] * field.at(0, j) + w.a1[(i, nx - 1)] * field.at(nx - 1, j))
                    - c.beta_y * (w.b1[(j, 0)] * field.at(i, 0) + w.b1[(j, ny - 1)] * field.at(i, ny - 1));
                let k = (i - 1) * (ny - 2) + (j - 1);
                assert!((f[k] - expect).abs() <= 1e-10 * expect.abs().max(1.0));
            }
        }
    }

    #[test]
    fn neumann_boundary_changes_with_interior() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 8, 8).unwrap();
        let w = Arc::new(build_weight_set(BasisFamily::Extended { lambda: 0.0 }, &g).unwrap());
        let spec = BoundarySpec {
            x_lo: EdgeCondition::neumann(|_, _| 0.0),
            x_hi: EdgeCondition::neumann(|_, _| 0.0),
            y_lo: EdgeCondition::neumann(|_, _| 0.0),
            y_hi: EdgeCondition::neumann(|_, _| 0.0),
        };
        let s = assemble_operator(PdeCoefficients::new(0.1, 0.1, 0.0, 0.0), w, g, spec).unwrap();
        let u = vec![2.0; s.interior_len()];
        // constant field with zero flux is steady
        let r = s.rhs(0.0, &u).unwrap();
        assert!(r.iter().all(|v| v.abs() < 1e-9), "{r:?}");
        let f = s.boundary_vector(0.0, &u).unwrap();
        assert!(f.iter().any(|v| v.abs() > 1e-3));
    }

    #[test]
    fn shape_and_cap_errors() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 6, 6).unwrap();
        let other = Grid2D::new(0.0, 1.0, 0.0, 1.0, 7, 6).unwrap();
        let w = Arc::new(build_weight_set(BasisFamily::Trigonometric, &other).unwrap());
        let spec = BoundarySpec::dirichlet_from(&g, Arc::new(|_, _, _| 0.0));
        assert!(matches!(
            assemble_operator(PdeCoefficients::new(1.0, 1.0, 0.0, 0.0), w, g.clone(), spec.clone()),
            Err(Error::InvalidConfiguration(_))
        ));
        let big = Grid2D::new(0.0, 1.0, 0.0, 1.0, 48, 48).unwrap();
        let w = Arc::new(build_weight_set(BasisFamily::Trigonometric, &big).unwrap());
        let spec = BoundarySpec::dirichlet_from(&big, Arc::new(|_, _, _| 0.0));
        let s = assemble_operator(PdeCoefficients::new(1.0, 1.0, 0.0, 0.0), w, big, spec).unwrap();
        assert!(matches!(s.dense_operator(), Err(Error::DimensionCap { .. })));
        assert!(s.rhs(0.0, &[1.0]).is_err());
    }
}
