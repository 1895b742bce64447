//! Dirichlet and Neumann boundary data and the boundary-node update.
//!
//! Dirichlet edges are read directly from the data. Neumann edges are
//! recovered from the DQ first-derivative rows at the two ends of each grid
//! line: for fixed `j`,
//!
//! ```text
//! a11 u_1j  + a1N u_Nj = g1 - sum_{k=2}^{N-1} a1k u_kj   (= S_a)
//! aN1 u_1j  + aNN u_Nj = g2 - sum_{k=2}^{N-1} aNk u_kj   (= S_b)
//! ```
//!
//! solved in closed form. The update runs on every right-hand-side
//! evaluation because the Neumann values depend on the current interior.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid2D;
use crate::matrix::Matrix;
use crate::weights::WeightSet;

/// Boundary data as a function of (coordinate along the edge, time).
pub type EdgeFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum EdgeCondition {
    /// Prescribed value `u = f(s, t)`.
    Dirichlet(EdgeFn),
    /// Prescribed derivative along the axis normal to the edge, `du/dx` on
    /// x-edges and `du/dy` on y-edges (not the outward normal).
    Neumann(EdgeFn),
}

impl EdgeCondition {
    pub fn dirichlet(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        EdgeCondition::Dirichlet(Arc::new(f))
    }

    pub fn neumann(g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        EdgeCondition::Neumann(Arc::new(g))
    }

    pub fn is_neumann(&self) -> bool {
        matches!(self, EdgeCondition::Neumann(_))
    }

    pub fn eval(&self, s: f64, t: f64) -> f64 {
        match self {
            EdgeCondition::Dirichlet(f) | EdgeCondition::Neumann(f) => f(s, t),
        }
    }
}

impl fmt::Debug for EdgeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EdgeCondition::Dirichlet(_) => "Dirichlet",
            EdgeCondition::Neumann(_) => "Neumann",
        })
    }
}

/// Conditions on the four edges of `[a, b] x [c, d]`.
#[derive(Clone, Debug)]
pub struct BoundarySpec {
    /// `x = a`, data in terms of `(y, t)`.
    pub x_lo: EdgeCondition,
    /// `x = b`, data in terms of `(y, t)`.
    pub x_hi: EdgeCondition,
    /// `y = c`, data in terms of `(x, t)`.
    pub y_lo: EdgeCondition,
    /// `y = d`, data in terms of `(x, t)`.
    pub y_hi: EdgeCondition,
}

impl BoundarySpec {
    /// Dirichlet data on all four edges traced from `u(x, y, t)`.
    pub fn dirichlet_from(grid: &Grid2D, u: Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>) -> Self {
        let (a, b, c, d) = (grid.x.lo(), grid.x.hi(), grid.y.lo(), grid.y.hi());
        let (u1, u2, u3, u4) = (u.clone(), u.clone(), u.clone(), u);
        Self {
            x_lo: EdgeCondition::dirichlet(move |y, t| u1(a, y, t)),
            x_hi: EdgeCondition::dirichlet(move |y, t| u2(b, y, t)),
            y_lo: EdgeCondition::dirichlet(move |x, t| u3(x, c, t)),
            y_hi: EdgeCondition::dirichlet(move |x, t| u4(x, d, t)),
        }
    }

    pub fn has_neumann(&self) -> bool {
        [&self.x_lo, &self.x_hi, &self.y_lo, &self.y_hi].iter().any(|e| e.is_neumann())
    }
}

/// Write Dirichlet data onto every Dirichlet edge (corners included); the
/// interior and Neumann edges are untouched.
pub fn apply_dirichlet(spec: &BoundarySpec, grid: &Grid2D, t: f64, field: &mut Field) {
    let (nx, ny) = (grid.nx(), grid.ny());
    if let EdgeCondition::Dirichlet(f) = &spec.x_lo {
        for (j, &y) in grid.y.nodes().iter().enumerate() {
            field.set(0, j, f(y, t));
        }
    }
    if let EdgeCondition::Dirichlet(f) = &spec.x_hi {
        for (j, &y) in grid.y.nodes().iter().enumerate() {
            field.set(nx - 1, j, f(y, t));
        }
    }
    if let EdgeCondition::Dirichlet(f) = &spec.y_lo {
        for (i, &x) in grid.x.nodes().iter().enumerate() {
            field.set(i, 0, f(x, t));
        }
    }
    if let EdgeCondition::Dirichlet(f) = &spec.y_hi {
        for (i, &x) in grid.x.nodes().iter().enumerate() {
            field.set(i, ny - 1, f(x, t));
        }
    }
}

/// Solve the end-point equations of one grid line.
///
/// `line(k)` returns the current value at position `k` along the line and
/// `w` is the first-derivative matrix for that direction.
fn solve_line_ends(
    w: &Matrix,
    lo: &EdgeCondition,
    hi: &EdgeCondition,
    s: f64,
    t: f64,
    line: impl Fn(usize) -> f64,
) -> Result<(f64, f64)> {
    let n = w.nrows();
    let last = n - 1;
    let inner = |row: usize| -> f64 { (1..last).map(|k| w[(row, k)] * line(k)).sum() };
    match (lo, hi) {
        (EdgeCondition::Neumann(g1), EdgeCondition::Neumann(g2)) => {
            let sa = g1(s, t) - inner(0);
            let sb = g2(s, t) - inner(last);
            let (a11, a1n, an1, ann) = (w[(0, 0)], w[(0, last)], w[(last, 0)], w[(last, last)]);
            let det = a11 * ann - an1 * a1n;
            let scale = a11.abs().max(ann.abs()).max(a1n.abs()).max(an1.abs());
            if !det.is_finite() || det.abs() <= f64::EPSILON * scale * scale {
                return Err(Error::DegenerateBoundary { det });
            }
            Ok(((sa * ann - sb * a1n) / det, (sb * a11 - sa * an1) / det))
        }
        (EdgeCondition::Neumann(g1), EdgeCondition::Dirichlet(f2)) => {
            let u_hi = f2(s, t);
            let a11 = w[(0, 0)];
            if a11 == 0.0 || !a11.is_finite() {
                return Err(Error::DegenerateBoundary { det: a11 });
            }
            Ok(((g1(s, t) - inner(0) - w[(0, last)] * u_hi) / a11, u_hi))
        }
        (EdgeCondition::Dirichlet(f1), EdgeCondition::Neumann(g2)) => {
            let u_lo = f1(s, t);
            let ann = w[(last, last)];
            if ann == 0.0 || !ann.is_finite() {
                return Err(Error::DegenerateBoundary { det: ann });
            }
            Ok((u_lo, (g2(s, t) - inner(last) - w[(last, 0)] * u_lo) / ann))
        }
        (EdgeCondition::Dirichlet(f1), EdgeCondition::Dirichlet(f2)) => Ok((f1(s, t), f2(s, t))),
    }
}

/// Boundary values `(u_1j, u_Nx j)` for every `j`, recovered from the x-edge
/// Neumann data and the current field. A Dirichlet edge returns its data.
pub fn eliminate_neumann_x(
    spec: &BoundarySpec,
    weights: &WeightSet,
    grid: &Grid2D,
    t: f64,
    field: &Field,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let ny = grid.ny();
    let mut lo = Vec::with_capacity(ny);
    let mut hi = Vec::with_capacity(ny);
    for (j, &y) in grid.y.nodes().iter().enumerate() {
        let (l, h) = solve_line_ends(&weights.a1, &spec.x_lo, &spec.x_hi, y, t, |k| field.at(k, j))?;
        lo.push(l);
        hi.push(h);
    }
    Ok((lo, hi))
}

/// Boundary values `(u_i1, u_i Ny)` for every `i`; mirror of
/// [`eliminate_neumann_x`] using the y-direction weights.
pub fn eliminate_neumann_y(
    spec: &BoundarySpec,
    weights: &WeightSet,
    grid: &Grid2D,
    t: f64,
    field: &Field,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let nx = grid.nx();
    let mut lo = Vec::with_capacity(nx);
    let mut hi = Vec::with_capacity(nx);
    for (i, &x) in grid.x.nodes().iter().enumerate() {
        let line = field.x_line(i);
        let (l, h) = solve_line_ends(&weights.b1, &spec.y_lo, &spec.y_hi, x, t, |k| line[k])?;
        lo.push(l);
        hi.push(h);
    }
    Ok((lo, hi))
}

/// Bring the boundary ring of `field` up to date at time `t`.
///
/// Order: Dirichlet edges, then x-direction Neumann edges (all `j`, corners
/// included), then y-direction Neumann edges (all `i`), so a corner between
/// two Dirichlet edges keeps its Dirichlet value.
pub fn apply_boundary(
    spec: &BoundarySpec,
    weights: &WeightSet,
    grid: &Grid2D,
    t: f64,
    field: &mut Field,
) -> Result<()> {
    apply_dirichlet(spec, grid, t, field);
    let (nx, ny) = (grid.nx(), grid.ny());
    if spec.x_lo.is_neumann() || spec.x_hi.is_neumann() {
        let (lo, hi) = eliminate_neumann_x(spec, weights, grid, t, field)?;
        for j in 0..ny {
            if spec.x_lo.is_neumann() {
                field.set(0, j, lo[j]);
            }
            if spec.x_hi.is_neumann() {
                field.set(nx - 1, j, hi[j]);
            }
        }
    }
    if spec.y_lo.is_neumann() || spec.y_hi.is_neumann() {
        let (lo, hi) = eliminate_neumann_y(spec, weights, grid, t, field)?;
        for i in 0..nx {
            if spec.y_lo.is_neumann() {
                field.set(i, 0, lo[i]);
            }
            if spec.y_hi.is_neumann() {
                field.set(i, ny - 1, hi[i]);
            }
        }
    }
    Ok(())
}
