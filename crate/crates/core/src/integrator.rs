//! Five-stage, fourth-order strong-stability-preserving Runge-Kutta scheme in
//! Shu-Osher form.

use crate::error::{Error, Result};

/// Number of stages.
pub const STAGES: usize = 5;

/// States whose max-norm exceeds this are treated as diverged.
pub const DIVERGENCE_LIMIT: f64 = 1e12;

/// Relative slack when deciding whether `(t_final - t0) / dt` is an integer.
pub const STEP_COUNT_TOL: f64 = 1e-9;

/// `ALPHA[k][j]` multiplies stage `U_j` in stage `U_{k+1}`; `U_0 = U^m` and
/// `U_5 = U^{m+1}`.
pub const ALPHA: [[f64; STAGES]; STAGES] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [0.444370493651235, 0.555629506348765, 0.0, 0.0, 0.0],
    [0.620101851488403, 0.0, 0.379898148511597, 0.0, 0.0],
    [0.178079954393132, 0.0, 0.0, 0.821920045606868, 0.0],
    [0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269],
];

/// `BETA[k][j]` multiplies `dt L(U_j)` in stage `U_{k+1}`.
pub const BETA: [[f64; STAGES]; STAGES] = [
    [0.391752226571890, 0.0, 0.0, 0.0, 0.0],
    [0.0, 0.368410593050371, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.251891774271694, 0.0, 0.0],
    [0.0, 0.0, 0.0, 0.544974750228521, 0.0],
    [0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906],
];

/// Abscissae `c_j` at which `L(U_j)` is evaluated, found by running the
/// tableau on `u' = 1`. The last entry is the end-of-step value (close to 1).
pub fn stage_times() -> [f64; STAGES + 1] {
    let mut c = [0.0; STAGES + 1];
    for k in 0..STAGES {
        c[k + 1] = (0..=k).map(|j| ALPHA[k][j] * c[j] + BETA[k][j]).sum();
    }
    c
}

/// A right-hand side `du/dt = L(t, u)`.
pub trait Rhs {
    fn dim(&self) -> usize;
    fn eval(&mut self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()>;
}

/// [`Rhs`] from a closure `(t, u, out)`.
pub struct FnRhs<F> {
    dim: usize,
    f: F,
}

impl<F> FnRhs<F>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f }
    }
}

impl<F> Rhs for FnRhs<F>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&mut self, t: f64, u: &[f64], out: &mut [f64]) -> Result<()> {
        (self.f)(t, u, out);
        Ok(())
    }
}

/// `out = sum_j ALPHA[k][j] U_j + dt BETA[k][j] L(U_j)`.
fn combine_stage(k: usize, dt: f64, stages: &[Vec<f64>], slopes: &[Vec<f64>], out: &mut [f64]) {
    out.fill(0.0);
    for j in 0..=k {
        let (a, b) = (ALPHA[k][j], BETA[k][j] * dt);
        if a != 0.0 {
            for (o, &s) in out.iter_mut().zip(&stages[j]) {
                *o += a * s;
            }
        }
        if b != 0.0 {
            for (o, &s) in out.iter_mut().zip(&slopes[j]) {
                *o += b * s;
            }
        }
    }
}

/// Integrator with reusable stage storage.
#[derive(Debug, Clone)]
pub struct SspRk54 {
    stages: Vec<Vec<f64>>,
    slopes: Vec<Vec<f64>>,
    c: [f64; STAGES + 1],
}

/// Outcome of [`SspRk54::integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationSummary {
    pub steps: usize,
    /// Step actually used; differs from the request when it was nudged so
    /// that the final time is hit exactly.
    pub dt: f64,
    pub nudged: bool,
    pub t_final: f64,
}

/// Number of steps and the step size that land exactly on `t_final`.
pub fn plan_steps(t0: f64, t_final: f64, dt: f64) -> Result<(usize, f64, bool)> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!("time step must be positive, got {dt}")));
    }
    let span = t_final - t0;
    if !(span >= 0.0 && span.is_finite()) {
        return Err(Error::InvalidParameter(format!("final time {t_final} precedes start {t0}")));
    }
    if span == 0.0 {
        return Ok((0, dt, false));
    }
    let ratio = span / dt;
    let nearest = ratio.round();
    if nearest >= 1.0 && (ratio - nearest).abs() <= STEP_COUNT_TOL * nearest.max(1.0) {
        let n = nearest as usize;
        Ok((n, span / n as f64, false))
    } else {
        let n = ratio.ceil().max(1.0) as usize;
        Ok((n, span / n as f64, true))
    }
}

impl SspRk54 {
    pub fn new(dim: usize) -> Self {
        Self {
            stages: vec![vec![0.0; dim]; STAGES],
            slopes: vec![vec![0.0; dim]; STAGES],
            c: stage_times(),
        }
    }

    fn ensure_dim(&mut self, dim: usize) {
        if self.stages[0].len() != dim {
            *self = Self::new(dim);
        }
    }

    /// Advance `u` from `t` to `t + dt` in place.
    pub fn step<R: Rhs + ?Sized>(&mut self, rhs: &mut R, t: f64, dt: f64, u: &mut [f64]) -> Result<()> {
        if rhs.dim() != u.len() {
            return Err(Error::ShapeMismatch(format!(
                "state has {} entries, right-hand side expects {}",
                u.len(),
                rhs.dim()
            )));
        }
        self.ensure_dim(u.len());
        self.stages[0].copy_from_slice(u);
        for k in 0..STAGES {
            rhs.eval(t + self.c[k] * dt, &self.stages[k], &mut self.slopes[k])?;
            if k + 1 < STAGES {
                let (done, rest) = self.stages.split_at_mut(k + 1);
                combine_stage(k, dt, done, &self.slopes[..=k], &mut rest[0]);
            } else {
                combine_stage(k, dt, &self.stages, &self.slopes, u);
            }
        }
        Ok(())
    }

    /// Integrate from `t0` to `t_final`. `observe(step, t, u)` runs after
    /// every step; a non-finite or runaway state stops with
    /// [`Error::Divergence`].
    pub fn integrate<R, F>(
        &mut self,
        rhs: &mut R,
        u: &mut [f64],
        t0: f64,
        t_final: f64,
        dt: f64,
        mut observe: F,
    ) -> Result<IntegrationSummary>
    where
        R: Rhs + ?Sized,
        F: FnMut(usize, f64, &[f64]) -> Result<()>,
    {
        let (steps, dt_used, nudged) = plan_steps(t0, t_final, dt)?;
        for n in 1..=steps {
            let t = t0 + (n - 1) as f64 * dt_used;
            self.step(rhs, t, dt_used, u)?;
            let t_new = if n == steps { t_final } else { t0 + n as f64 * dt_used };
            if u.iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
                return Err(Error::Divergence { step: n, time: t_new });
            }
            observe(n, t_new, u)?;
        }
        Ok(IntegrationSummary { steps, dt: dt_used, nudged, t_final })
    }
}
