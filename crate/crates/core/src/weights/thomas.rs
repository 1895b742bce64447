use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Tridiagonal matrix stored by diagonals, each of length `n`.
///
/// `sub[r]` is entry `(r, r-1)` and `sup[r]` is entry `(r, r+1)`, so `sub[0]`
/// and `sup[n-1]` are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSystem {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n < 2 || sub.len() != n || sup.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "tridiagonal bands must share a length >= 2, got {}/{}/{}",
                sub.len(),
                n,
                sup.len()
            )));
        }
        Ok(Self { sub, diag, sup })
    }

    /// Build from the sub-diagonal and super-diagonal of length `n - 1`.
    pub fn from_bands(lower: &[f64], diag: &[f64], upper: &[f64]) -> Result<Self> {
        let n = diag.len();
        if lower.len() + 1 != n || upper.len() + 1 != n {
            return Err(Error::ShapeMismatch(format!(
                "off-diagonal bands must have length {}, got {}/{}",
                n.saturating_sub(1),
                lower.len(),
                upper.len()
            )));
        }
        let mut sub = vec![0.0; n];
        sub[1..].copy_from_slice(lower);
        let mut sup = vec![0.0; n];
        sup[..n - 1].copy_from_slice(upper);
        Self::new(sub, diag.to_vec(), sup)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sup(&self) -> &[f64] {
        &self.sup
    }

    pub fn to_dense(&self) -> Matrix {
        let n = self.len();
        let mut m = Matrix::zeros(n, n);
        for r in 0..n {
            m[(r, r)] = self.diag[r];
            if r > 0 {
                m[(r, r - 1)] = self.sub[r];
            }
            if r + 1 < n {
                m[(r, r + 1)] = self.sup[r];
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        (0..n)
            .map(|r| {
                let mut acc = self.diag[r] * x[r];
                if r > 0 {
                    acc += self.sub[r] * x[r - 1];
                }
                if r + 1 < n {
                    acc += self.sup[r] * x[r + 1];
                }
                acc
            })
            .collect()
    }

    /// Forward-elimination sweep, reusable for any number of right-hand sides.
    pub fn factorize(&self) -> Result<ThomasFactor> {
        let n = self.len();
        let scale = self
            .diag
            .iter()
            .chain(&self.sub)
            .chain(&self.sup)
            .fold(0.0f64, |m, v| m.max(v.abs()));
        let tiny = f64::EPSILON * scale.max(f64::MIN_POSITIVE);
        let mut pivot = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for r in 0..n {
            let p = if r == 0 { self.diag[0] } else { self.diag[r] - self.sub[r] * upper[r - 1] };
            if !p.is_finite() || p.abs() <= tiny {
                return Err(Error::SingularSystem { row: r });
            }
            pivot[r] = p;
            upper[r] = if r + 1 < n { self.sup[r] / p } else { 0.0 };
        }
        Ok(ThomasFactor { sub: self.sub.clone(), pivot, upper })
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        self.factorize()?.solve(rhs)
    }
}

/// Result of the Thomas forward sweep.
#[derive(Debug, Clone)]
pub struct ThomasFactor {
    sub: Vec<f64>,
    pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl ThomasFactor {
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x)?;
        Ok(x)
    }

    pub fn solve_in_place(&self, x: &mut [f64]) -> Result<()> {
        let n = self.pivot.len();
        if x.len() != n {
            return Err(Error::ShapeMismatch(format!("rhs length {} != {}", x.len(), n)));
        }
        x[0] /= self.pivot[0];
        for r in 1..n {
            x[r] = (x[r] - self.sub[r] * x[r - 1]) / self.pivot[r];
        }
        for r in (0..n - 1).rev() {
            x[r] -= self.upper[r] * x[r + 1];
        }
        Ok(())
    }
}

/// Solve `sys * x = rhs` with the Thomas algorithm.
pub fn thomas_solve(sys: &TridiagonalSystem, rhs: &[f64]) -> Result<Vec<f64>> {
    sys.solve(rhs)
}
