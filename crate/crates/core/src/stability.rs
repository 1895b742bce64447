//! Spectra of the semi-discrete operator and membership of `lambda dt` in the
//! stability region of the time integrator.

use std::io::Write;

use faer::c64;

use crate::basis::BasisFamily;
use crate::error::{Error, Result};
use crate::integrator::{FnRhs, SspRk54};
use crate::matrix::Matrix;
use crate::operator::{PdeCoefficients, SemiDiscreteSystem, DENSE_CAP};

/// Largest real part accepted as "zero or negative".
pub const REAL_PART_TOL: f64 = 1e-8;

/// Slack on `|R(z)| <= 1`.
pub const AMPLIFICATION_TOL: f64 = 1e-12;

/// All eigenvalues of a square matrix, sorted by real then imaginary part.
pub fn spectrum(m: &Matrix) -> Result<Vec<c64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::ShapeMismatch(format!("{}x{} matrix is not square", m.nrows(), m.ncols())));
    }
    if m.nrows() > DENSE_CAP {
        return Err(Error::DimensionCap { dim: m.nrows(), cap: DENSE_CAP });
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut eig = m.to_faer().eigenvalues().map_err(|e| Error::Eigen(format!("{e:?}")))?;
    eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(eig)
}

/// Amplification factor of one integrator step on `u' = lambda u` with
/// `lambda dt = z`.
pub fn stability_function(z: c64) -> c64 {
    let mut rhs = FnRhs::new(2, move |_t, u: &[f64], out: &mut [f64]| {
        out[0] = z.re * u[0] - z.im * u[1];
        out[1] = z.re * u[1] + z.im * u[0];
    });
    let mut u = [1.0, 0.0];
    SspRk54::new(2)
        .step(&mut rhs, 0.0, 1.0, &mut u)
        .expect("two-dimensional scalar system");
    c64::new(u[0], u[1])
}

/// Eigenvalue summary for one operator and step size.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<c64>,
    pub max_real_part: f64,
    pub dt: f64,
    /// `max |R(lambda dt)|` over the spectrum.
    pub max_amplification: f64,
    /// Eigenvalues with `|R(lambda dt)| > 1 + AMPLIFICATION_TOL`.
    pub violations: usize,
    pub all_in_region: bool,
    pub grid: Option<(usize, usize)>,
    pub basis: Option<BasisFamily>,
    pub coeffs: Option<PdeCoefficients>,
}

impl SpectrumReport {
    /// Real parts within [`REAL_PART_TOL`] of the left half-plane and every
    /// scaled eigenvalue inside the stability region.
    pub fn is_stable(&self) -> bool {
        self.max_real_part <= REAL_PART_TOL && self.all_in_region
    }

    pub fn grid_label(&self) -> String {
        self.grid.map(|(nx, ny)| format!("{nx}x{ny}")).unwrap_or_else(|| "-".into())
    }

    pub fn basis_label(&self) -> String {
        self.basis.map(|b| b.to_string()).unwrap_or_else(|| "-".into())
    }

    /// One `re,im,grid,basis` row per eigenvalue (no header).
    pub fn write_csv_rows<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let (grid, basis) = (self.grid_label(), self.basis_label());
        for z in &self.eigenvalues {
            writeln!(w, "{:.16e},{:.16e},{grid},\"{basis}\"", z.re, z.im)?;
        }
        Ok(())
    }
}

pub const SPECTRUM_CSV_HEADER: &str = "re,im,grid,basis";

/// Stability check of an arbitrary operator.
pub fn check_matrix(m: &Matrix, dt: f64) -> Result<SpectrumReport> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let eigenvalues = spectrum(m)?;
    let max_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let amps: Vec<f64> = eigenvalues.iter().map(|&z| stability_function(z * dt).norm()).collect();
    let max_amplification = amps.iter().copied().fold(0.0, f64::max);
    let violations = amps.iter().filter(|&&a| a > 1.0 + AMPLIFICATION_TOL).count();
    Ok(SpectrumReport {
        eigenvalues,
        max_real_part,
        dt,
        max_amplification,
        violations,
        all_in_region: violations == 0,
        grid: None,
        basis: None,
        coeffs: None,
    })
}

/// Stability check of the assembled semi-discrete operator.
pub fn check_stability(system: &SemiDiscreteSystem, dt: f64) -> Result<SpectrumReport> {
    let b = system.dense_operator()?;
    let mut report = check_matrix(&b, dt)?;
    report.grid = Some((system.grid().nx(), system.grid().ny()));
    report.basis = Some(system.weights().basis);
    report.coeffs = Some(system.coefficients());
    Ok(report)
}
