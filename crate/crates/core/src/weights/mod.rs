//! DQ weighting coefficients.
//!
//! First-order weights come from requiring the quadrature rule to be exact on
//! every member of the modified basis: `V A^T = D`, where `V` is the
//! tridiagonal value matrix and `D` holds basis slopes. Row `i` of `A` is a
//! solve against column `i` of `D`. Higher orders follow from Shu's recursion.

mod thomas;

use std::io::Write;
use std::path::Path;

pub use thomas::{thomas_solve, ThomasFactor, TridiagonalSystem};

use crate::basis::{modified_basis_rows, BasisFamily};
use crate::error::{Error, Result};
use crate::grid::{Axis, Grid2D};
use crate::matrix::Matrix;

/// First-order derivative matrix on a uniform axis.
pub fn first_order_weights(basis: &BasisFamily, axis: &Axis) -> Result<Matrix> {
    let n = axis.len();
    let stencil = basis.stencil(axis.spacing())?;
    let mb = modified_basis_rows(&stencil, n)?;
    let factor = mb.values.factorize()?;
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        let row = w.row_mut(i);
        row.copy_from_slice(mb.first_derivative_column(i));
        factor.solve_in_place(row)?;
    }
    Ok(w)
}

/// Second-order matrix obtained by solving against basis curvatures instead
/// of recursing from first-order weights. Kept as an independent check on
/// [`shu_recursion`].
pub fn second_order_weights_direct(basis: &BasisFamily, axis: &Axis) -> Result<Matrix> {
    let n = axis.len();
    let stencil = basis.stencil(axis.spacing())?;
    let mb = modified_basis_rows(&stencil, n)?;
    let factor = mb.values.factorize()?;
    let mut w = Matrix::zeros(n, n);
    for i in 0..n {
        let row = w.row_mut(i);
        row.copy_from_slice(mb.second_derivative_column(i));
        factor.solve_in_place(row)?;
    }
    Ok(w)
}

/// Shu's recursion: r-th order weights from first-order weights.
///
/// Off-diagonal `w_ij^(r) = r (w_ij^(1) w_ii^(r-1) - w_ij^(r-1) / (x_i - x_j))`;
/// the diagonal is minus the sum of the row's off-diagonal entries.
pub fn shu_recursion(w1: &Matrix, nodes: &[f64], r: usize) -> Result<Matrix> {
    let n = nodes.len();
    if w1.nrows() != n || w1.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "weights are {}x{} but there are {n} nodes",
            w1.nrows(),
            w1.ncols()
        )));
    }
    if r < 2 {
        return Err(Error::InvalidParameter(format!("recursion order must be >= 2, got {r}")));
    }
    for i in 0..n {
        for j in i + 1..n {
            if nodes[i] == nodes[j] {
                return Err(Error::RepeatedNodes { i: i + 1, j: j + 1 });
            }
        }
    }
    let mut prev = w1.clone();
    for order in 2..=r {
        let k = order as f64;
        let mut next = Matrix::zeros(n, n);
        for i in 0..n {
            let prev_ii = prev[(i, i)];
            let mut off_sum = 0.0;
            for j in 0..n {
                if j != i {
                    let v = k * (w1[(i, j)] * prev_ii - prev[(i, j)] / (nodes[i] - nodes[j]));
                    next[(i, j)] = v;
                    off_sum += v;
                }
            }
            next[(i, i)] = -off_sum;
        }
        prev = next;
    }
    Ok(prev)
}

/// First- and second-order weights for both directions of a grid.
#[derive(Debug, Clone)]
pub struct WeightSet {
    pub basis: BasisFamily,
    /// x-direction first derivative, `nx x nx`.
    pub a1: Matrix,
    /// x-direction second derivative.
    pub a2: Matrix,
    /// y-direction first derivative, `ny x ny`.
    pub b1: Matrix,
    /// y-direction second derivative.
    pub b2: Matrix,
}

fn axis_weights(basis: &BasisFamily, axis: &Axis) -> Result<(Matrix, Matrix)> {
    let w1 = first_order_weights(basis, axis)?;
    let w2 = shu_recursion(&w1, axis.nodes(), 2)?;
    Ok((w1, w2))
}

/// Build all four weight matrices for `grid`.
pub fn build_weight_set(basis: BasisFamily, grid: &Grid2D) -> Result<WeightSet> {
    basis.validate()?;
    let (a1, a2) = axis_weights(&basis, &grid.x)?;
    let (b1, b2) = if grid.y == grid.x {
        (a1.clone(), a2.clone())
    } else {
        axis_weights(&basis, &grid.y)?
    };
    Ok(WeightSet { basis, a1, a2, b1, b2 })
}

impl WeightSet {
    /// Dump the four matrices as `a1.csv`, `a2.csv`, `b1.csv`, `b2.csv`.
    pub fn write_csv_dir(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        for (name, m) in [("a1", &self.a1), ("a2", &self.a2), ("b1", &self.b1), ("b2", &self.b2)] {
            let mut f = std::io::BufWriter::new(std::fs::File::create(dir.join(format!("{name}.csv")))?);
            m.write_csv(&mut f)?;
            f.flush()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ext_stencil;
    use std::f64::consts::PI;

    fn families() -> [BasisFamily; 3] {
        [
            BasisFamily::Trigonometric,
            BasisFamily::Exponential { p: 1.0 },
            BasisFamily::Extended { lambda: 0.0 },
        ]
    }

    /// Gaussian elimination with partial pivoting on a dense copy.
    fn dense_solve(m: &Matrix, rhs: &[f64]) -> Vec<f64> {
        let n = m.nrows();
        let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
        let mut b = rhs.to_vec();
        for col in 0..n {
            let piv = (col..n).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap();
            a.swap(col, piv);
            b.swap(col, piv);
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
        let mut x = vec![0.0; n];
        for r in (0..n).rev() {
            let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
            x[r] = (b[r] - s) / a[r][r];
        }
        x
    }

    #[test]
    fn thomas_matches_dense_lu_on_ext_system() {
        let s = ext_stencil(0.25, 0.0).unwrap();
        let mb = modified_basis_rows(&s, 5).unwrap();
        let rhs = mb.first_derivative_column(2);
        let x = thomas_solve(&mb.values, rhs).unwrap();
        let y = dense_solve(&mb.values.to_dense(), rhs);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-13);
        }
    }

    #[test]
    fn thomas_matches_dense_lu_on_all_weight_systems() {
        for basis in families().into_iter().chain([
            BasisFamily::Exponential { p: 1e-4 },
            BasisFamily::Extended { lambda: -0.3 },
        ]) {
            for n in 4..=12 {
                let axis = Axis::uniform(0.0, 1.0, n).unwrap();
                let mb = modified_basis_rows(&basis.stencil(axis.spacing()).unwrap(), n).unwrap();
                let dense = mb.values.to_dense();
                for i in 0..n {
                    let rhs = mb.first_derivative_column(i);
                    let x = thomas_solve(&mb.values, rhs).unwrap();
                    let y = dense_solve(&dense, rhs);
                    let diff = x.iter().zip(&y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                    assert!(diff <= 1e-12, "{basis} n={n} i={i} diff={diff}");
                }
            }
        }
    }

    #[test]
    fn constant_and_linear_reproduction() {
        let axis = Axis::uniform(0.0, 1.0, 41).unwrap();
        for basis in families() {
            let w = first_order_weights(&basis, &axis).unwrap();
            let ones = vec![1.0; 41];
            let d = w.mul_vec(&ones);
            let worst = d.iter().map(|v| v.abs()).fold(0.0, f64::max);
            assert!(worst <= 1e-10 / axis.spacing(), "{basis}: {worst}");
            let dx = w.mul_vec(axis.nodes());
            for v in &dx[1..40] {
                assert!((v - 1.0).abs() <= 1e-8, "{basis}: {v}");
            }
        }
    }

    #[test]
    fn first_derivative_converges_on_sine() {
        for basis in families() {
            let mut errs = Vec::new();
            for n in [11, 21, 41] {
                let axis = Axis::uniform(0.0, 1.0, n).unwrap();
                let w = first_order_weights(&basis, &axis).unwrap();
                let f: Vec<f64> = axis.nodes().iter().map(|x| (PI * x).sin()).collect();
                let d = w.mul_vec(&f);
                let e = (1..n - 1)
                    .map(|i| (d[i] - PI * (PI * axis.nodes()[i]).cos()).abs())
                    .fold(0.0, f64::max);
                errs.push(e);
            }
            for pair in errs.windows(2) {
                let order = (pair[0] / pair[1]).ln() / 2f64.ln();
                assert!(order >= 2.0, "{basis}: errors {errs:?}");
            }
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let axis = Axis::uniform(0.0, 1.0, 41).unwrap();
        let w1 = first_order_weights(&BasisFamily::Extended { lambda: 0.0 }, &axis).unwrap();
        let w2 = shu_recursion(&w1, axis.nodes(), 2).unwrap();
        let f: Vec<f64> = axis.nodes().iter().map(|x| (PI * x).sin()).collect();
        let d2 = w2.mul_vec(&f);
        let err: Vec<f64> = (0..41).map(|i| (d2[i] + PI * PI * f[i]).abs()).collect();
        // O(h) end layer decaying by about 2 + sqrt(3) per node
        assert!(err[0] < 0.2 && err[1] < err[0] / 3.0 && err[2] < err[1] / 3.0);
        let deep = err[4..37].iter().cloned().fold(0.0, f64::max);
        assert!(deep <= 1e-3, "error {deep}");
    }

    #[test]
    fn shu_rows_sum_to_zero() {
        let axis = Axis::uniform(-1.0, 3.0, 17).unwrap();
        for basis in families() {
            let w1 = first_order_weights(&basis, &axis).unwrap();
            for r in 2..=4 {
                let w = shu_recursion(&w1, axis.nodes(), r).unwrap();
                for i in 0..17 {
                    let row = w.row(i);
                    let scale = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
                    let s: f64 = row.iter().sum();
                    assert!(s.abs() <= 1e-12 * scale, "{basis} r={r} row {i}: {s}");
                }
            }
        }
    }

    #[test]
    fn shu_three_node_hand_computation() {
        // On a 3-node grid the recursion is small enough to write out.
        let x = [0.0, 0.5, 1.0];
        let w1 = Matrix::from_rows(&[
            vec![-3.0, 4.0, -1.0],
            vec![-1.0, 0.0, 1.0],
            vec![1.0, -4.0, 3.0],
        ]);
        let w2 = shu_recursion(&w1, &x, 2).unwrap();
        // row 0: w_01 = 2(4*(-3) - 4/(0-0.5)) = 2(-12+8) = -8
        //        w_02 = 2((-1)(-3) - (-1)/(0-1)) = 2(3-1) = 4
        // row 1: w_10 = 2(-1*0 - (-1)/(0.5)) = 4, w_12 = 2(0 - 1/(-0.5)) = 4
        // row 2: w_20 = 2(1*3 - 1/1) = 4, w_21 = 2(-4*3 - (-4)/0.5) = -8
        let expect = Matrix::from_rows(&[
            vec![4.0, -8.0, 4.0],
            vec![4.0, -8.0, 4.0],
            vec![4.0, -8.0, 4.0],
        ]);
        assert!(w2.max_abs_diff(&expect) < 1e-14);
    }

    #[test]
    fn shu_rejects_repeated_nodes() {
        let w1 = Matrix::identity(3);
        assert!(matches!(
            shu_recursion(&w1, &[0.0, 0.5, 0.5], 2),
            Err(Error::RepeatedNodes { i: 2, j: 3 })
        ));
        assert!(shu_recursion(&w1, &[0.0, 0.5, 1.0], 1).is_err());
    }

    #[test]
    fn shu_agrees_with_direct_curvature_solve_asymptotically() {
        // Both routes approximate f''; away from the end layers their
        // discrepancy shrinks with h.
        let mut diffs = Vec::new();
        for n in [11, 21, 41] {
            let axis = Axis::uniform(0.0, 1.0, n).unwrap();
            let basis = BasisFamily::Extended { lambda: 0.0 };
            let w1 = first_order_weights(&basis, &axis).unwrap();
            let shu = shu_recursion(&w1, axis.nodes(), 2).unwrap();
            let direct = second_order_weights_direct(&basis, &axis).unwrap();
            let f: Vec<f64> = axis.nodes().iter().map(|x| x.exp()).collect();
            let (a, b) = (shu.mul_vec(&f), direct.mul_vec(&f));
            diffs.push((n / 4..3 * n / 4).map(|i| (a[i] - b[i]).abs()).fold(0.0, f64::max));
        }
        assert!(diffs[1] < diffs[0] && diffs[2] < diffs[1], "{diffs:?}");
    }

    #[test]
    fn exponential_derivatives_converge_monotonically() {
        for basis in families() {
            let mut e1 = Vec::new();
            let mut e2 = Vec::new();
            for n in [11, 21, 41, 81] {
                let axis = Axis::uniform(0.0, 1.0, n).unwrap();
                let w1 = first_order_weights(&basis, &axis).unwrap();
                let w2 = shu_recursion(&w1, axis.nodes(), 2).unwrap();
                let f: Vec<f64> = axis.nodes().iter().map(|x| x.exp()).collect();
                let (d1, d2) = (w1.mul_vec(&f), w2.mul_vec(&f));
                e1.push((1..n - 1).map(|i| (d1[i] - f[i]).abs()).fold(0.0, f64::max));
                e2.push((1..n - 1).map(|i| (d2[i] - f[i]).abs()).fold(0.0, f64::max));
            }
            for k in 1..e1.len() {
                assert!(e1[k] < e1[k - 1], "{basis} first: {e1:?}");
                assert!(e2[k] < e2[k - 1], "{basis} second: {e2:?}");
            }
        }
    }

    #[test]
    fn weight_set_shapes_and_symmetry() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 11, 21).unwrap();
        let ws = build_weight_set(BasisFamily::Trigonometric, &g).unwrap();
        assert_eq!((ws.a1.nrows(), ws.a1.ncols()), (11, 11));
        assert_eq!((ws.b2.nrows(), ws.b2.ncols()), (21, 21));

        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 9, 9).unwrap();
        let ws = build_weight_set(BasisFamily::Exponential { p: 2.0 }, &g).unwrap();
        assert_eq!(ws.a1, ws.b1);
        assert_eq!(ws.a2, ws.b2);
    }

    #[test]
    fn trig_weight_rows_sum_to_zero_at_n41() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 41, 41).unwrap();
        let ws = build_weight_set(BasisFamily::Trigonometric, &g).unwrap();
        for m in [&ws.a1, &ws.a2, &ws.b1, &ws.b2] {
            for i in 0..41 {
                let row = m.row(i);
                let scale = row.iter().map(|v| v.abs()).fold(0.0, f64::max);
                assert!(row.iter().sum::<f64>().abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn csv_dump_writes_four_files() {
        let g = Grid2D::new(0.0, 1.0, 0.0, 1.0, 5, 6).unwrap();
        let ws = build_weight_set(BasisFamily::Extended { lambda: 0.0 }, &g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        ws.write_csv_dir(dir.path()).unwrap();
        let b1 = std::fs::read_to_string(dir.path().join("b1.csv")).unwrap();
        assert_eq!(b1.lines().count(), 6);
        assert_eq!(b1.lines().next().unwrap().split(',').count(), 6);
    }
}
