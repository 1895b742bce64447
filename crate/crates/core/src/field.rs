//! Node values on a full grid (boundary ring included).

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::grid::Grid2D;

/// Values `u_{ij}` on an `nx x ny` grid, stored x-major: `data[i * ny + j]`
/// with 0-based `i`, `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    nx: usize,
    ny: usize,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self { nx, ny, data: vec![0.0; nx * ny] }
    }

    pub fn for_grid(grid: &Grid2D) -> Self {
        Self::zeros(grid.nx(), grid.ny())
    }

    /// Sample `f(x, y)` at every node.
    pub fn sample(grid: &Grid2D, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut out = Self::for_grid(grid);
        for (i, &x) in grid.x.nodes().iter().enumerate() {
            for (j, &y) in grid.y.nodes().iter().enumerate() {
                out.data[i * grid.ny() + j] = f(x, y);
            }
        }
        out
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ny + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.ny + j] = v;
    }

    /// Values along the grid line `x = x_i`.
    pub fn x_line(&self, i: usize) -> &[f64] {
        &self.data[i * self.ny..(i + 1) * self.ny]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Copy interior values from a solution vector `U` into this field.
    pub fn scatter_interior(&mut self, u: &[f64]) -> Result<()> {
        let (mi, mj) = (self.nx - 2, self.ny - 2);
        if u.len() != mi * mj {
            return Err(Error::ShapeMismatch(format!(
                "interior vector has {} entries, grid expects {}",
                u.len(),
                mi * mj
            )));
        }
        for i in 0..mi {
            let dst = (i + 1) * self.ny + 1;
            self.data[dst..dst + mj].copy_from_slice(&u[i * mj..(i + 1) * mj]);
        }
        Ok(())
    }

    /// Interior values as the solution vector `U`.
    pub fn gather_interior(&self) -> Vec<f64> {
        let mj = self.ny - 2;
        let mut out = Vec::with_capacity((self.nx - 2) * mj);
        for i in 1..self.nx - 1 {
            out.extend_from_slice(&self.data[i * self.ny + 1..i * self.ny + 1 + mj]);
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// Write whitespace-separated `x y u` rows, one blank line between
    /// x-blocks (gnuplot `splot` layout).
    pub fn write_xyz<W: Write>(&self, grid: &Grid2D, mut w: W) -> io::Result<()> {
        for (i, &x) in grid.x.nodes().iter().enumerate() {
            if i > 0 {
                writeln!(w)?;
            }
            for (j, &y) in grid.y.nodes().iter().enumerate() {
                writeln!(w, "{x:.15e} {y:.15e} {:.15e}", self.at(i, j))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scatter_gather_round_trip() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 2.0, 5, 6).unwrap();
        let u: Vec<f64> = (0..g.interior_len()).map(|k| k as f64).collect();
        let mut f = Field::for_grid(&g);
        f.scatter_interior(&u).unwrap();
        assert_eq!(f.gather_interior(), u);
        // interior (i, j) 1-based maps to the documented flat index
        assert_eq!(f.at(2, 1), u[g.interior_linear_index(3, 2).unwrap()]);
        assert!(f.scatter_interior(&u[1..]).is_err());
    }

    #[test]
    fn xyz_dump_has_blank_line_between_blocks() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 4, 5).unwrap();
        let f = Field::sample(&g, |x, y| x + y);
        let mut buf = Vec::new();
        f.write_xyz(&g, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let blocks: Vec<&str> = text.split("\n\n").collect();
        assert_eq!(blocks.len(), 4);
        assert_eq!(blocks[0].lines().count(), 5);
        let last: Vec<f64> = text.lines().last().unwrap().split_whitespace().map(|v| v.parse().unwrap()).collect();
        assert_eq!(last, vec![1.0, 1.0, 2.0]);
    }
}
