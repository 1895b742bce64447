//! Test problems with closed-form or prescribed data, error norms, observed
//! convergence orders and the experiment driver.

use std::fmt;
use std::io::Write;
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::boundary::{BoundarySpec, EdgeCondition};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::Grid2D;
use crate::integrator::{plan_steps, SspRk54};
use crate::operator::{assemble_operator, PdeCoefficients};
use crate::weights::build_weight_set;

/// `u(x, y, t)`.
pub type SpaceTimeFn = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;

/// Rectangle `[a, b] x [c, d]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Domain {
    pub const UNIT: Domain = Domain { a: 0.0, b: 1.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub fn grid(&self, nx: usize, ny: usize) -> Result<Grid2D> {
        Grid2D::new(self.a, self.b, self.c, self.d, nx, ny)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
}

impl fmt::Display for BoundaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundaryKind::Dirichlet => "dirichlet",
            BoundaryKind::Neumann => "neumann",
        })
    }
}

/// An initial-boundary value problem for the convection-diffusion equation.
#[derive(Clone)]
pub struct BenchmarkProblem {
    pub name: String,
    pub domain: Domain,
    pub coeffs: PdeCoefficients,
    pub initial: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>,
    pub exact: Option<SpaceTimeFn>,
    pub boundary: BoundarySpec,
    /// Free constants, echoed in run logs.
    pub constants: Vec<(&'static str, f64)>,
}

impl fmt::Debug for BenchmarkProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BenchmarkProblem")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("coeffs", &self.coeffs)
            .field("has_exact", &self.exact.is_some())
            .field("boundary", &self.boundary)
            .field("constants", &self.constants)
            .finish()
    }
}

fn dirichlet_traced(domain: Domain, u: SpaceTimeFn) -> BoundarySpec {
    let Domain { a, b, c, d } = domain;
    let (u1, u2, u3, u4) = (u.clone(), u.clone(), u.clone(), u);
    BoundarySpec {
        x_lo: EdgeCondition::dirichlet(move |y, t| u1(a, y, t)),
        x_hi: EdgeCondition::dirichlet(move |y, t| u2(b, y, t)),
        y_lo: EdgeCondition::dirichlet(move |x, t| u3(x, c, t)),
        y_hi: EdgeCondition::dirichlet(move |x, t| u4(x, d, t)),
    }
}

/// Gaussian pulse of unit height centred at `(0.5, 0.5)`, translated by the
/// convection and spread by diffusion.
pub fn problem1(coeffs: PdeCoefficients, domain: Domain) -> Result<BenchmarkProblem> {
    coeffs.validate_parabolic()?;
    let (x0, y0) = (0.5, 0.5);
    let PdeCoefficients { alpha_x, alpha_y, beta_x, beta_y } = coeffs;
    let exact: SpaceTimeFn = Arc::new(move |x, y, t| {
        let s = 1.0 + 4.0 * t;
        let dx = x - x0 - beta_x * t;
        let dy = y - y0 - beta_y * t;
        (-(dx * dx) / (alpha_x * s) - (dy * dy) / (alpha_y * s)).exp() / s
    });
    let e0 = exact.clone();
    Ok(BenchmarkProblem {
        name: "gaussian-pulse".into(),
        domain,
        coeffs,
        initial: Arc::new(move |x, y| e0(x, y, 0.0)),
        boundary: dirichlet_traced(domain, exact.clone()),
        exact: Some(exact),
        constants: vec![("x0", x0), ("y0", y0)],
    })
}

/// Positive root of `alpha c^2 + beta c - b = 0`, computed without
/// cancellation. The larger positive root is returned when both qualify.
pub fn decay_rate(alpha: f64, beta: f64, b: f64) -> Result<f64> {
    let disc = beta * beta + 4.0 * b * alpha;
    if alpha.is_nan() || alpha <= 0.0 || !disc.is_finite() || disc < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "no real decay rate for alpha = {alpha}, beta = {beta}, b = {b}"
        )));
    }
    let sq = disc.sqrt();
    // r_plus >= r_minus; their product is -b / alpha.
    let r_plus = if beta > 0.0 { 2.0 * b / (beta + sq) } else { (-beta + sq) / (2.0 * alpha) };
    if r_plus > 0.0 {
        return Ok(r_plus);
    }
    Err(Error::InvalidParameter(format!(
        "no positive decay rate for alpha = {alpha}, beta = {beta}, b = {b}"
    )))
}

/// `u = a e^{bt} (e^{-c_x x} + e^{-c_y y})` on the unit square, with either
/// Dirichlet data or x/y-derivative data taken from the exact solution on the
/// actual boundary.
pub fn problem2(coeffs: PdeCoefficients, a: f64, b: f64, kind: BoundaryKind) -> Result<BenchmarkProblem> {
    coeffs.validate_parabolic()?;
    let cx = decay_rate(coeffs.alpha_x, coeffs.beta_x, b)?;
    let cy = decay_rate(coeffs.alpha_y, coeffs.beta_y, b)?;
    let domain = Domain::UNIT;
    let exact: SpaceTimeFn = Arc::new(move |x, y, t| a * (b * t).exp() * ((-cx * x).exp() + (-cy * y).exp()));
    let boundary = match kind {
        BoundaryKind::Dirichlet => dirichlet_traced(domain, exact.clone()),
        BoundaryKind::Neumann => {
            let ux = move |x: f64, t: f64| -a * cx * (b * t - cx * x).exp();
            let uy = move |y: f64, t: f64| -a * cy * (b * t - cy * y).exp();
            let (xa, xb, yc, yd) = (domain.a, domain.b, domain.c, domain.d);
            BoundarySpec {
                x_lo: EdgeCondition::neumann(move |_y, t| ux(xa, t)),
                x_hi: EdgeCondition::neumann(move |_y, t| ux(xb, t)),
                y_lo: EdgeCondition::neumann(move |_x, t| uy(yc, t)),
                y_hi: EdgeCondition::neumann(move |_x, t| uy(yd, t)),
            }
        }
    };
    let e0 = exact.clone();
    Ok(BenchmarkProblem {
        name: format!("exponential-{kind}"),
        domain,
        coeffs,
        initial: Arc::new(move |x, y| e0(x, y, 0.0)),
        exact: Some(exact),
        boundary,
        constants: vec![("a", a), ("b", b), ("cx", cx), ("cy", cy)],
    })
}

/// Default coefficients of [`problem3`].
pub const PROBLEM3_COEFFS: PdeCoefficients =
    PdeCoefficients { alpha_x: 0.2, alpha_y: 0.3, beta_x: -0.1, beta_y: 0.2 };

/// Initial field of [`problem3`].
pub fn problem3_initial(x: f64, y: f64) -> f64 {
    let sq = |v: f64| v * v;
    5.0 * (-sq(9.0 * x - 2.0) / 4.0 - sq(9.0 * y - 2.0) / 4.0).exp()
        + 7.0 * (-sq(9.0 * x + 1.0) / 50.0 - (9.0 * y + 1.0) / 10.0).exp()
        + 4.0 * (-sq(9.0 * x - 7.0) / 4.0 - sq(9.0 * y - 3.0) / 4.0).exp()
        - 2.0 * (-sq(9.0 * x - 4.0) - sq(9.0 * y - 7.0)).exp()
}

/// Four-bump initial field on the unit square; edges follow
/// `h(edge) - c_bar t`. No exact solution.
pub fn problem3(coeffs: PdeCoefficients, c_bar: f64) -> Result<BenchmarkProblem> {
    coeffs.validate_parabolic()?;
    if !c_bar.is_finite() {
        return Err(Error::InvalidParameter(format!("c_bar must be finite, got {c_bar}")));
    }
    let data: SpaceTimeFn = Arc::new(move |x, y, t| problem3_initial(x, y) - c_bar * t);
    Ok(BenchmarkProblem {
        name: "four-bump".into(),
        domain: Domain::UNIT,
        coeffs,
        initial: Arc::new(problem3_initial),
        exact: None,
        boundary: dirichlet_traced(Domain::UNIT, data),
        constants: vec![("c_bar", c_bar)],
    })
}

/// `(L_inf, L2)` of `numeric - exact` over interior nodes; L2 is the RMS.
pub fn error_norms(numeric: &Field, exact: &Field) -> Result<(f64, f64)> {
    if numeric.nx() != exact.nx() || numeric.ny() != exact.ny() {
        return Err(Error::ShapeMismatch(format!(
            "fields are {}x{} and {}x{}",
            numeric.nx(),
            numeric.ny(),
            exact.nx(),
            exact.ny()
        )));
    }
    let (mut linf, mut sum, mut count) = (0.0f64, 0.0, 0usize);
    for i in 1..numeric.nx() - 1 {
        for j in 1..numeric.ny() - 1 {
            let e = (numeric.at(i, j) - exact.at(i, j)).abs();
            linf = linf.max(e);
            sum += e * e;
            count += 1;
        }
    }
    Ok((linf, (sum / count as f64).sqrt()))
}

/// Observed order `ln(E_coarse / E_fine) / ln(rho)`.
pub fn roc(e_coarse: f64, e_fine: f64, rho: f64) -> Result<f64> {
    if !(e_coarse > 0.0 && e_fine > 0.0) || !e_coarse.is_finite() || !e_fine.is_finite() {
        return Err(Error::UndefinedOrder(format!("errors must be positive, got {e_coarse} and {e_fine}")));
    }
    if !rho.is_finite() || rho <= 1.0 {
        return Err(Error::UndefinedOrder(format!("refinement factor must exceed 1, got {rho}")));
    }
    Ok((e_coarse / e_fine).ln() / rho.ln())
}

/// Time-step selection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StepRule {
    Fixed(f64),
    /// `dt = h^2` with `h` the x spacing.
    HSquared,
}

impl StepRule {
    pub fn resolve(&self, grid: &Grid2D) -> f64 {
        match *self {
            StepRule::Fixed(dt) => dt,
            StepRule::HSquared => grid.hx() * grid.hx(),
        }
    }
}

impl fmt::Display for StepRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepRule::Fixed(dt) => write!(f, "{dt}"),
            StepRule::HSquared => f.write_str("h2"),
        }
    }
}

/// One experiment: basis, nodes per direction, step rule, final time and
/// the times at which full fields are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub basis: BasisFamily,
    pub n: usize,
    pub dt: StepRule,
    pub t_final: f64,
    pub snapshots: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(basis: BasisFamily, n: usize, dt: StepRule, t_final: f64) -> Self {
        Self { basis, n, dt, t_final, snapshots: Vec::new() }
    }
}

/// One row of an error table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub basis: BasisFamily,
    pub n: usize,
    pub h: f64,
    /// Step actually taken.
    pub dt: f64,
    pub steps: usize,
    pub t_final: f64,
    /// `None` when no exact solution exists or the run failed.
    pub linf: Option<f64>,
    pub l2: Option<f64>,
    pub roc_linf: Option<f64>,
    pub roc_l2: Option<f64>,
    pub seconds: f64,
    /// Failure message when the run diverged or errored.
    pub failure: Option<String>,
}

pub const REPORT_CSV_HEADER: &str = "basis,lambda,p,N,h,dt,t_final,linf,l2,roc_linf,roc_l2,seconds";

fn opt6(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.5e}")).unwrap_or_else(|| "nan".into())
}

fn opt_param(v: Option<f64>) -> String {
    v.map(|x| format!("{x}")).unwrap_or_default()
}

impl ErrorReport {
    /// CSV row matching [`REPORT_CSV_HEADER`]; errors carry 6 significant
    /// digits. `timing = false` writes 0 seconds for reproducible files.
    pub fn csv_row(&self, timing: bool) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.basis.short_name(),
            opt_param(self.basis.lambda()),
            opt_param(self.basis.p()),
            self.n,
            self.h,
            self.dt,
            self.t_final,
            opt6(self.linf),
            opt6(self.l2),
            self.roc_linf.map(|r| format!("{r:.3}")).unwrap_or_default(),
            self.roc_l2.map(|r| format!("{r:.3}")).unwrap_or_default(),
            if timing { format!("{:.3}", self.seconds) } else { "0".into() },
        )
    }
}

/// Write a header and one row per report.
pub fn write_reports_csv<W: Write>(reports: &[ErrorReport], timing: bool, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{REPORT_CSV_HEADER}")?;
    for r in reports {
        writeln!(w, "{}", r.csv_row(timing))?;
    }
    Ok(())
}

/// Result of [`run_experiment`].
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: ErrorReport,
    pub grid: Grid2D,
    /// Field at the last completed step, boundary ring included.
    pub final_field: Field,
    /// `(t, field)` for each requested snapshot that was reached.
    pub snapshots: Vec<(f64, Field)>,
    /// `(t, max |u|)` over the full grid after every step, starting at `t = 0`.
    pub max_history: Vec<(f64, f64)>,
    pub dt_nudged: bool,
}

/// Build grid, weights and operator, integrate to `t_final` and compare to
/// the exact solution if there is one. Divergence and integration errors
/// end up in `report.failure`; only configuration errors are returned.
pub fn run_experiment(problem: &BenchmarkProblem, config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    let start = Instant::now();
    config.basis.validate()?;
    let grid = problem.domain.grid(config.n, config.n)?;
    let dt_req = config.dt.resolve(&grid);
    let (steps, dt, nudged) = plan_steps(0.0, config.t_final, dt_req)?;
    let weights = Arc::new(build_weight_set(config.basis, &grid)?);
    let system = assemble_operator(problem.coeffs, weights, grid.clone(), problem.boundary.clone())?;

    let initial = Field::sample(&grid, |x, y| (problem.initial)(x, y));
    let mut u = initial.gather_interior();
    let mut max_history = vec![(0.0, system.full_field(0.0, &u)?.max_abs())];
    let mut snapshots = Vec::new();
    let mut pending: Vec<f64> = config.snapshots.clone();
    pending.sort_by(f64::total_cmp);
    if let Some(pos) = pending.iter().position(|&s| s > 0.5 * dt) {
        for &s in &pending[..pos] {
            snapshots.push((s, system.full_field(0.0, &u)?));
        }
        pending.drain(..pos);
    } else {
        for &s in &pending {
            snapshots.push((s, system.full_field(0.0, &u)?));
        }
        pending.clear();
    }

    let mut rk = SspRk54::new(u.len());
    let mut rhs = system.evaluator();
    let mut last_field = system.full_field(0.0, &u)?;
    let run = rk.integrate(&mut rhs, &mut u, 0.0, config.t_final, dt, |_n, t, state| {
        let field = system.full_field(t, state)?;
        max_history.push((t, field.max_abs()));
        while let Some(&s) = pending.first() {
            if (s - t).abs() <= 0.5 * dt {
                snapshots.push((s, field.clone()));
                pending.remove(0);
            } else {
                break;
            }
        }
        last_field = field;
        Ok(())
    });
    drop(rhs);

    let failure = run.as_ref().err().map(|e| e.to_string());
    let final_field = last_field;
    let (linf, l2) = match (&problem.exact, &run) {
        (Some(exact), Ok(_)) => {
            let reference = Field::sample(&grid, |x, y| exact(x, y, config.t_final));
            let (a, b) = error_norms(&final_field, &reference)?;
            (Some(a), Some(b))
        }
        _ => (None, None),
    };
    Ok(ExperimentOutcome {
        report: ErrorReport {
            basis: config.basis,
            n: config.n,
            h: grid.hx(),
            dt,
            steps,
            t_final: config.t_final,
            linf,
            l2,
            roc_linf: None,
            roc_l2: None,
            seconds: start.elapsed().as_secs_f64(),
            failure,
        },
        grid,
        final_field,
        snapshots,
        max_history,
        dt_nudged: nudged,
    })
}

/// Reject sweeps with fewer than two sizes or sizes that do not increase.
pub fn validate_sweep(ns: &[usize]) -> Result<()> {
    if ns.len() < 2 {
        return Err(Error::InvalidConfiguration(format!(
            "a convergence sweep needs at least two grid sizes, got {}",
            ns.len()
        )));
    }
    if ns.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfiguration(format!("grid sizes must increase, got {ns:?}")));
    }
    Ok(())
}

/// Run a sweep over node counts (at least two, increasing) and fill in the
/// observed orders using the node-count ratio.
pub fn convergence_sweep(
    problem: &BenchmarkProblem,
    basis: BasisFamily,
    ns: &[usize],
    dt: StepRule,
    t_final: f64,
) -> Result<Vec<ErrorReport>> {
    validate_sweep(ns)?;
    let mut reports = Vec::with_capacity(ns.len());
    for &n in ns {
        let outcome = run_experiment(problem, &ExperimentConfig::new(basis, n, dt, t_final))?;
        reports.push(outcome.report);
    }
    fill_orders(&mut reports);
    Ok(reports)
}

/// Set `roc_linf` / `roc_l2` of each report relative to its predecessor.
pub fn fill_orders(reports: &mut [ErrorReport]) {
    for k in 1..reports.len() {
        let rho = reports[k].n as f64 / reports[k - 1].n as f64;
        let pair = |a: Option<f64>, b: Option<f64>| match (a, b) {
            (Some(a), Some(b)) => roc(a, b, rho).ok(),
            _ => None,
        };
        reports[k].roc_linf = pair(reports[k - 1].linf, reports[k].linf);
        reports[k].roc_l2 = pair(reports[k - 1].l2, reports[k].l2);
    }
}
