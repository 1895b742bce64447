//! Knot values of the cubic B-spline families and the modified end splines.
//!
//! DQ weights only need each spline's value, slope and curvature at its own
//! knot and the two neighbouring knots, so nothing here evaluates a spline
//! between knots.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weights::TridiagonalSystem;

/// Default admissible range for the extended family's free parameter.
pub const LAMBDA_RANGE: (f64, f64) = (-2.0, 1.0);

/// Which cubic B-spline family generates the DQ weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum BasisFamily {
    /// Trigonometric cubic B-splines (MTB-DQM).
    Trigonometric,
    /// Exponential cubic B-splines with tension `p > 0` (mExp-DQM).
    Exponential { p: f64 },
    /// Extended cubic B-splines with free parameter `lambda` (mECDQ).
    /// `lambda = 0` is the classical cubic B-spline.
    Extended { lambda: f64 },
}

impl BasisFamily {
    pub fn validate(&self) -> Result<()> {
        match *self {
            BasisFamily::Trigonometric => Ok(()),
            BasisFamily::Exponential { p } => {
                if p.is_finite() && p > 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "exponential basis requires p > 0, got p = {p}"
                    )))
                }
            }
            BasisFamily::Extended { lambda } => {
                let (lo, hi) = LAMBDA_RANGE;
                if lambda.is_finite() && lambda > lo && lambda < hi {
                    Ok(())
                } else {
                    Err(Error::InvalidParameter(format!(
                        "extended basis requires {lo} < lambda < {hi}, got lambda = {lambda}"
                    )))
                }
            }
        }
    }

    /// Short identifier used in reports (`trig`, `exp`, `ext`).
    pub fn short_name(&self) -> &'static str {
        match self {
            BasisFamily::Trigonometric => "trig",
            BasisFamily::Exponential { .. } => "exp",
            BasisFamily::Extended { .. } => "ext",
        }
    }

    /// Long method name used in error tables.
    pub fn method_name(&self) -> &'static str {
        match self {
            BasisFamily::Trigonometric => "MTB-DQM",
            BasisFamily::Exponential { .. } => "mExp-DQM",
            BasisFamily::Extended { lambda } if *lambda == 0.0 => "MCB-DQM",
            BasisFamily::Extended { .. } => "mECDQ",
        }
    }

    /// Build from a short name and its parameter (`lambda` for `ext`, `p`
    /// for `exp`, ignored for `trig`), validated.
    pub fn from_name(name: &str, param: Option<f64>) -> Result<Self> {
        let missing = |what: &str| Error::InvalidParameter(format!("basis '{name}' requires {what}"));
        let basis = match name {
            "trig" => BasisFamily::Trigonometric,
            "exp" => BasisFamily::Exponential { p: param.ok_or_else(|| missing("p"))? },
            "ext" => BasisFamily::Extended { lambda: param.ok_or_else(|| missing("lambda"))? },
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown basis '{other}', expected trig, exp or ext"
                )))
            }
        };
        basis.validate()?;
        Ok(basis)
    }

    pub fn lambda(&self) -> Option<f64> {
        match *self {
            BasisFamily::Extended { lambda } => Some(lambda),
            _ => None,
        }
    }

    pub fn p(&self) -> Option<f64> {
        match *self {
            BasisFamily::Exponential { p } => Some(p),
            _ => None,
        }
    }

    /// Knot stencil of this family on a uniform axis with spacing `h`.
    pub fn stencil(&self, h: f64) -> Result<KnotStencil> {
        self.validate()?;
        match *self {
            BasisFamily::Trigonometric => trig_stencil(h),
            BasisFamily::Exponential { p } => exp_stencil(h, p),
            BasisFamily::Extended { lambda } => ext_stencil(h, lambda),
        }
    }
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            BasisFamily::Trigonometric => write!(f, "trig"),
            BasisFamily::Exponential { p } => write!(f, "exp(p={p})"),
            BasisFamily::Extended { lambda } => write!(f, "ext(lambda={lambda})"),
        }
    }
}

/// Value, slope and curvature of a spline `B_k` at the knots `x_{k-1}`,
/// `x_k`, `x_{k+1}`.
///
/// Suffix `m1` is the knot left of the spline's centre and `p1` the knot to
/// its right. A bump rises towards its centre, so `d_m1 > 0 > d_p1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnotStencil {
    pub v_m1: f64,
    pub v_0: f64,
    pub v_p1: f64,
    pub d_m1: f64,
    pub d_0: f64,
    pub d_p1: f64,
    pub s_m1: f64,
    pub s_0: f64,
    pub s_p1: f64,
}

impl KnotStencil {
    fn symmetric(v_1: f64, v_0: f64, d_left: f64, s_1: f64, s_0: f64) -> Self {
        Self {
            v_m1: v_1,
            v_0,
            v_p1: v_1,
            d_m1: d_left,
            d_0: 0.0,
            d_p1: -d_left,
            s_m1: s_1,
            s_0,
            s_p1: s_1,
        }
    }

    /// Stencil entry for the knot at `offset = node - centre`.
    fn at(&self, offset: isize) -> (f64, f64, f64) {
        match offset {
            -1 => (self.v_m1, self.d_m1, self.s_m1),
            0 => (self.v_0, self.d_0, self.s_0),
            1 => (self.v_p1, self.d_p1, self.s_p1),
            _ => (0.0, 0.0, 0.0),
        }
    }

    /// Every entry multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            v_m1: self.v_m1 * factor,
            v_0: self.v_0 * factor,
            v_p1: self.v_p1 * factor,
            d_m1: self.d_m1 * factor,
            d_0: self.d_0 * factor,
            d_p1: self.d_p1 * factor,
            s_m1: self.s_m1 * factor,
            s_0: self.s_0 * factor,
            s_p1: self.s_p1 * factor,
        }
    }
}

/// Trigonometric cubic B-spline knot values.
pub fn trig_stencil(h: f64) -> Result<KnotStencil> {
    if !(h.is_finite() && h > 0.0 && h < 2.0 * PI / 3.0) {
        return Err(Error::SingularBasis(format!(
            "trigonometric basis requires 0 < h < 2*pi/3, got h = {h}"
        )));
    }
    let (s_half, c_half) = (0.5 * h).sin_cos();
    let (s1, c1) = h.sin_cos();
    let (s_3half, c_3half) = (1.5 * h).sin_cos();

    let a1 = s_half * s_half / (s1 * s_3half);
    let a2 = 2.0 / (1.0 + 2.0 * c1);
    let a4 = 3.0 / (4.0 * s_3half);
    let a5 = (3.0 + 9.0 * c1) / (16.0 * s_half * s_half * (2.0 * c_half + c_3half));
    // Curvature at the centre is negative; the closed form gives its magnitude.
    let a6 = 3.0 * c_half * c_half / (s_half * s_half * (2.0 + 4.0 * c1));

    Ok(KnotStencil::symmetric(a1, a2, a4, a5, -a6))
}

// Series helpers for z = p*h. Each returns an expression divided by its
// leading power of z so that p -> 0 does not cancel catastrophically.

const SERIES_CUTOFF: f64 = 0.5;

/// (sinh z - z) / z^3
fn sinh_minus_z_over_z3(z: f64) -> f64 {
    if z > SERIES_CUTOFF {
        return (z.sinh() - z) / (z * z * z);
    }
    // sum_{k>=1} z^{2k-2} / (2k+1)!
    let z2 = z * z;
    let mut term = 1.0 / 6.0;
    let mut sum = term;
    for k in 2..20 {
        term *= z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
    }
    sum
}

/// (z cosh z - sinh z) / z^3
fn z_cosh_minus_sinh_over_z3(z: f64) -> f64 {
    if z > SERIES_CUTOFF {
        return (z * z.cosh() - z.sinh()) / (z * z * z);
    }
    // sum_{k>=1} 2k z^{2k-2} / (2k+1)!
    let z2 = z * z;
    let mut inv_fact = 1.0 / 6.0;
    let mut sum = 2.0 * inv_fact;
    for k in 2..20 {
        inv_fact *= z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += (2 * k) as f64 * inv_fact;
    }
    sum
}

/// (cosh z - 1) / z^2
fn cosh_minus_one_over_z2(z: f64) -> f64 {
    if z > SERIES_CUTOFF {
        return (z.cosh() - 1.0) / (z * z);
    }
    let z2 = z * z;
    let mut term = 0.5;
    let mut sum = term;
    for k in 2..20 {
        term *= z2 / ((2 * k - 1) as f64 * (2 * k) as f64);
        sum += term;
    }
    sum
}

/// sinh z / z
fn sinhc(z: f64) -> f64 {
    if z > SERIES_CUTOFF {
        return z.sinh() / z;
    }
    let z2 = z * z;
    let mut term = 1.0;
    let mut sum = term;
    for k in 1..20 {
        term *= z2 / ((2 * k) as f64 * (2 * k + 1) as f64);
        sum += term;
    }
    sum
}

/// Exponential cubic B-spline knot values with `c = cosh(ph)`, `s = sinh(ph)`:
/// value `(s - ph) / (2(pch - s))` at the neighbours and 1 at the centre.
pub fn exp_stencil(h: f64, p: f64) -> Result<KnotStencil> {
    if !(p.is_finite() && p > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "exponential basis requires p > 0, got p = {p}"
        )));
    }
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
    }
    let z = p * h;
    let denom = z_cosh_minus_sinh_over_z3(z); // (pch - s) / z^3
    if !(denom.is_finite() && denom > 0.0) {
        return Err(Error::SingularBasis(format!(
            "exponential basis overflows for p*h = {z}"
        )));
    }
    let v1 = sinh_minus_z_over_z3(z) / (2.0 * denom);
    // p(c - 1) / (2(pch - s)) = ((c-1)/z^2) / (2 h (pch-s)/z^3)
    let d_left = cosh_minus_one_over_z2(z) / (2.0 * h * denom);
    // p^2 s / (pch - s) = (s/z) / (h^2 (pch-s)/z^3)
    let s_ratio = sinhc(z) / (h * h * denom);
    Ok(KnotStencil::symmetric(v1, 1.0, d_left, 0.5 * s_ratio, -s_ratio))
}

/// Extended cubic B-spline knot values: `(4 - lambda)/24` at the neighbours,
/// `(8 + lambda)/12` at the centre, slopes `+-1/(2h)`, curvature
/// `(2 + lambda)/(2h^2)` at the neighbours.
pub fn ext_stencil(h: f64, lambda: f64) -> Result<KnotStencil> {
    BasisFamily::Extended { lambda }.validate()?;
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!("spacing must be positive, got {h}")));
    }
    let wp = (4.0 - lambda) / 24.0;
    let theta = (8.0 + lambda) / 12.0;
    let omega = (2.0 + lambda) / (2.0 * h * h);
    Ok(KnotStencil::symmetric(wp, theta, 0.5 / h, omega, -2.0 * omega))
}

/// The N-member modified basis on N uniform knots.
///
/// `values` is the tridiagonal matrix `V[p][l] = phi_p(x_l)`; column `i` of
/// `first` holds `phi_p'(x_i)` for all `p`, likewise `second` for curvature.
#[derive(Debug, Clone)]
pub struct ModifiedBasis {
    pub values: TridiagonalSystem,
    first: Vec<Vec<f64>>,
    second: Vec<Vec<f64>>,
}

impl ModifiedBasis {
    pub fn len(&self) -> usize {
        self.first.len()
    }

    pub fn is_empty(&self) -> bool {
        self.first.is_empty()
    }

    /// Slopes of every basis member at node `i` (0-based).
    pub fn first_derivative_column(&self, i: usize) -> &[f64] {
        &self.first[i]
    }

    /// Curvatures of every basis member at node `i` (0-based).
    pub fn second_derivative_column(&self, i: usize) -> &[f64] {
        &self.second[i]
    }
}

/// Raw spline combination defining modified member `p` (1-based) on `n` knots:
/// `phi_1 = B_1 + 2B_0`, `phi_2 = B_2 - B_0`, `phi_{n-1} = B_{n-1} - B_{n+1}`,
/// `phi_n = B_n + 2B_{n+1}`, otherwise `phi_p = B_p`.
fn modification(p: usize, n: usize) -> Vec<(usize, f64)> {
    let mut terms = vec![(p, 1.0)];
    if p == 1 {
        terms.push((0, 2.0));
    } else if p == 2 {
        terms.push((0, -1.0));
    }
    if p == n {
        terms.push((n + 1, 2.0));
    } else if p == n - 1 {
        terms.push((n + 1, -1.0));
    }
    terms
}

/// Assemble the modified basis system for `n` knots from a knot stencil.
pub fn modified_basis_rows(stencil: &KnotStencil, n: usize) -> Result<ModifiedBasis> {
    if n < 4 {
        return Err(Error::InvalidConfiguration(format!(
            "modified basis needs at least 4 knots, got {n}"
        )));
    }
    let mut dense_v = vec![vec![0.0; n]; n];
    let mut first = vec![vec![0.0; n]; n];
    let mut second = vec![vec![0.0; n]; n];
    for p in 1..=n {
        for (k, coef) in modification(p, n) {
            // B_k is supported on knots k-1, k, k+1
            for l in k.saturating_sub(1).max(1)..=(k + 1).min(n) {
                let (v, d, s) = stencil.at(l as isize - k as isize);
                dense_v[p - 1][l - 1] += coef * v;
                first[l - 1][p - 1] += coef * d;
                second[l - 1][p - 1] += coef * s;
            }
        }
    }
    let mut sub = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut sup = vec![0.0; n];
    for r in 0..n {
        for (c, &val) in dense_v[r].iter().enumerate() {
            match c as isize - r as isize {
                -1 => sub[r] = val,
                0 => diag[r] = val,
                1 => sup[r] = val,
                _ => debug_assert!(val == 0.0, "modified basis is not tridiagonal"),
            }
        }
    }
    Ok(ModifiedBasis { values: TridiagonalSystem::new(sub, diag, sup)?, first, second })
}
