use std::path::PathBuf;

use dqcd_core::benchmarks::{problem1, problem2, problem3, PROBLEM3_COEFFS};
use dqcd_core::{BasisFamily, BenchmarkProblem, BoundaryKind, Domain, PdeCoefficients, StepRule};

use crate::args::{BasisName, BcKind, ProblemArgs};
use crate::error::{CliError, Result};

pub const OUT_DIR_ENV: &str = "DQCD_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "dqcd-out";

/// A validated run description.
pub struct RunConfig {
    pub problem_id: u8,
    pub problem: BenchmarkProblem,
    pub basis: BasisFamily,
    pub dt: StepRule,
    pub t_final: f64,
    pub boundary: BoundaryKind,
    pub out_dir: PathBuf,
    pub timing: bool,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn resolve_basis(args: &ProblemArgs) -> Result<BasisFamily> {
    let (name, param) = match args.basis {
        BasisName::Trig => {
            if args.lambda.is_some() || args.p.is_some() {
                return Err(usage("--lambda and --p do not apply to the trig basis"));
            }
            ("trig", None)
        }
        BasisName::Exp => {
            if args.lambda.is_some() {
                return Err(usage("--lambda applies to the ext basis only"));
            }
            ("exp", args.p)
        }
        BasisName::Ext => {
            if args.p.is_some() {
                return Err(usage("--p applies to the exp basis only"));
            }
            ("ext", args.lambda)
        }
    };
    Ok(BasisFamily::from_name(name, param)?)
}

fn coefficients(args: &ProblemArgs, defaults: PdeCoefficients) -> PdeCoefficients {
    PdeCoefficients::new(
        args.alpha_x.unwrap_or(defaults.alpha_x),
        args.alpha_y.unwrap_or(defaults.alpha_y),
        args.beta_x.unwrap_or(defaults.beta_x),
        args.beta_y.unwrap_or(defaults.beta_y),
    )
}

pub fn out_dir(explicit: Option<&PathBuf>) -> PathBuf {
    explicit
        .cloned()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

impl RunConfig {
    pub fn resolve(args: &ProblemArgs) -> Result<Self> {
        let basis = resolve_basis(args)?;
        if !(args.t_final.is_finite() && args.t_final > 0.0) {
            return Err(usage(format!("--t must be positive, got {}", args.t_final)));
        }
        if args.problem != 1 && args.domain.is_some() {
            return Err(usage(format!("problem {} is posed on the unit square; --domain applies to problem 1", args.problem)));
        }
        if args.problem != 2 && args.bc == Some(BcKind::Neumann) {
            return Err(usage("Neumann boundaries are available for problem 2 only"));
        }
        let boundary = match args.bc {
            Some(BcKind::Neumann) => BoundaryKind::Neumann,
            _ => BoundaryKind::Dirichlet,
        };
        let problem = match args.problem {
            1 => {
                let domain = match args.domain.as_deref() {
                    Some(&[a, b, c, d]) => Domain::new(a, b, c, d),
                    Some(_) => return Err(usage("--domain takes four values")),
                    None => Domain::new(1.0, 2.0, 1.0, 2.0),
                };
                problem1(coefficients(args, PdeCoefficients::new(0.05, 0.05, 0.8, 0.8)), domain)?
            }
            2 => problem2(
                coefficients(args, PdeCoefficients::new(0.1, 0.1, 1.0, 1.0)),
                args.amplitude,
                args.growth,
                boundary,
            )?,
            _ => problem3(coefficients(args, PROBLEM3_COEFFS), args.c_bar)?,
        };
        Ok(Self {
            problem_id: args.problem,
            problem,
            basis,
            dt: args.dt,
            t_final: args.t_final,
            boundary,
            out_dir: out_dir(args.out.as_ref()),
            timing: !args.no_timing,
        })
    }

    /// `key = value` lines echoing the effective parameters.
    pub fn describe(&self) -> Vec<(String, String)> {
        let c = self.problem.coeffs;
        let d = self.problem.domain;
        let mut lines = vec![
            ("problem".to_string(), format!("{} ({})", self.problem_id, self.problem.name)),
            ("basis".to_string(), self.basis.to_string()),
            ("domain".to_string(), format!("[{}, {}] x [{}, {}]", d.a, d.b, d.c, d.d)),
            ("alpha".to_string(), format!("{} {}", c.alpha_x, c.alpha_y)),
            ("beta".to_string(), format!("{} {}", c.beta_x, c.beta_y)),
            ("boundary".to_string(), self.boundary.to_string()),
            ("dt_rule".to_string(), self.dt.to_string()),
            ("t_final".to_string(), self.t_final.to_string()),
        ];
        for (name, value) in &self.problem.constants {
            lines.push((name.to_string(), value.to_string()));
        }
        lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn common(args: &[&str]) -> ProblemArgs {
        let mut full = vec!["dqcd", "solve"];
        full.extend_from_slice(args);
        match Cli::try_parse_from(full).unwrap().command {
            Command::Solve(s) => s.common,
            _ => unreachable!(),
        }
    }

    #[test]
    fn basis_flags() {
        assert_eq!(resolve_basis(&common(&[])).unwrap(), BasisFamily::Trigonometric);
        assert_eq!(
            resolve_basis(&common(&["--basis", "ext", "--lambda", "-0.3"])).unwrap(),
            BasisFamily::Extended { lambda: -0.3 }
        );
        assert!(resolve_basis(&common(&["--basis", "exp", "--lambda", "0.1"])).is_err());
        assert!(resolve_basis(&common(&["--basis", "exp", "--p", "-1"])).is_err());
    }

    #[test]
    fn problem_defaults_and_overrides() {
        let cfg = RunConfig::resolve(&common(&["--alpha-y", "0.02"])).unwrap();
        assert_eq!(cfg.problem.coeffs, PdeCoefficients::new(0.05, 0.02, 0.8, 0.8));
        assert_eq!(cfg.problem.domain, Domain::new(1.0, 2.0, 1.0, 2.0));
        let cfg = RunConfig::resolve(&common(&["--problem", "2", "--bc", "neumann"])).unwrap();
        assert_eq!(cfg.boundary, BoundaryKind::Neumann);
        assert!(cfg.problem.boundary.has_neumann());
        let cfg = RunConfig::resolve(&common(&["--problem", "3"])).unwrap();
        assert_eq!(cfg.problem.coeffs, PROBLEM3_COEFFS);
        assert!(cfg.describe().iter().any(|(k, v)| k == "c_bar" && v == "0"));
    }

    #[test]
    fn explicit_out_dir_wins() {
        assert_eq!(out_dir(Some(&PathBuf::from("x"))), PathBuf::from("x"));
    }
}
