//! Uniform tensor-product grids.
//!
//! Node indices in the public API are 1-based (`1..=nx`) so that they line up
//! with the usual DQ notation `u_{ij}`; storage is 0-based.

use crate::error::{Error, Result};

/// Uniformly spaced nodes along one axis.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    lo: f64,
    hi: f64,
    spacing: f64,
    nodes: Vec<f64>,
}

impl Axis {
    pub fn uniform(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || hi <= lo {
            return Err(Error::InvalidConfiguration(format!(
                "axis bounds must be finite and increasing, got [{lo}, {hi}]"
            )));
        }
        if n < 4 {
            return Err(Error::InvalidConfiguration(format!(
                "at least 4 nodes per direction are required, got {n}"
            )));
        }
        let spacing = (hi - lo) / (n - 1) as f64;
        let mut nodes: Vec<f64> = (0..n).map(|k| lo + k as f64 * spacing).collect();
        nodes[n - 1] = hi;
        Ok(Self { lo, hi, spacing, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
}

/// Uniform partition of `[a, b] x [c, d]` with `nx * ny` nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    pub x: Axis,
    pub y: Axis,
}

impl Grid2D {
    pub fn new(a: f64, b: f64, c: f64, d: f64, nx: usize, ny: usize) -> Result<Self> {
        Ok(Self { x: Axis::uniform(a, b, nx)?, y: Axis::uniform(c, d, ny)? })
    }

    pub fn nx(&self) -> usize {
        self.x.len()
    }

    pub fn ny(&self) -> usize {
        self.y.len()
    }

    pub fn hx(&self) -> f64 {
        self.x.spacing()
    }

    pub fn hy(&self) -> f64 {
        self.y.spacing()
    }

    /// Number of interior unknowns, `(nx - 2)(ny - 2)`.
    pub fn interior_len(&self) -> usize {
        (self.nx() - 2) * (self.ny() - 2)
    }

    /// Flat position of interior node `(i, j)` (1-based) in the solution
    /// vector `U = (u_22, u_23, ..., u_2(ny-1), u_32, ...)`.
    pub fn interior_linear_index(&self, i: usize, j: usize) -> Result<usize> {
        let (nx, ny) = (self.nx(), self.ny());
        if i < 2 || i > nx - 1 || j < 2 || j > ny - 1 {
            return Err(Error::OutOfRange { i, j, nx, ny });
        }
        Ok((i - 2) * (ny - 2) + (j - 2))
    }
}

/// Convenience constructor matching `make_grid(a, b, c, d, nx, ny)`.
pub fn make_grid(a: f64, b: f64, c: f64, d: f64, nx: usize, ny: usize) -> Result<Grid2D> {
    Grid2D::new(a, b, c, d, nx, ny)
}
