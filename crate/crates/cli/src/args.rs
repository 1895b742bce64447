use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dqcd_core::StepRule;

#[derive(Debug, Parser)]
#[command(name = "dqcd", version, about = "Differential quadrature solver for 2D convection-diffusion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one configuration; writes a report row, field dumps and a run log.
    Solve(SolveArgs),
    /// Sweep node counts and tabulate errors with observed orders.
    Convergence(ConvergenceArgs),
    /// Eigenvalues of the semi-discrete operator and a stability verdict.
    Stability(StabilityArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BasisName {
    Trig,
    Exp,
    Ext,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BcKind {
    Dirichlet,
    Neumann,
}

/// Operators substituted for the assembled one, for exercising the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Injected {
    /// `B = -I`.
    MinusIdentity,
    /// Diagonal operator with one eigenvalue at `+1`.
    Growing,
}

pub fn parse_step_rule(s: &str) -> Result<StepRule, String> {
    if s == "h2" {
        return Ok(StepRule::HSquared);
    }
    match s.parse::<f64>() {
        Ok(dt) if dt.is_finite() && dt > 0.0 => Ok(StepRule::Fixed(dt)),
        _ => Err(format!("expected a positive number or 'h2', got '{s}'")),
    }
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Benchmark problem: 1 Gaussian pulse, 2 exponential, 3 four-bump.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub problem: u8,

    #[arg(long, value_enum, default_value_t = BasisName::Trig)]
    pub basis: BasisName,

    /// Extended basis parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<f64>,

    /// Exponential basis parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,

    /// Rectangle `a b c d` for problem 1.
    #[arg(long, num_args = 4, value_names = ["A", "B", "C", "D"], allow_hyphen_values = true)]
    pub domain: Option<Vec<f64>>,

    #[arg(long = "alpha-x")]
    pub alpha_x: Option<f64>,
    #[arg(long = "alpha-y")]
    pub alpha_y: Option<f64>,
    #[arg(long = "beta-x", allow_hyphen_values = true)]
    pub beta_x: Option<f64>,
    #[arg(long = "beta-y", allow_hyphen_values = true)]
    pub beta_y: Option<f64>,

    /// Boundary kind for problem 2.
    #[arg(long, value_enum)]
    pub bc: Option<BcKind>,

    /// Amplitude `a` of problem 2.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub amplitude: f64,

    /// Growth rate `b` of problem 2.
    #[arg(long, default_value_t = 0.1, allow_hyphen_values = true)]
    pub growth: f64,

    /// Boundary drift of problem 3.
    #[arg(long = "c-bar", default_value_t = 0.0, allow_hyphen_values = true)]
    pub c_bar: f64,

    /// Time step, or `h2` for dt = h^2.
    #[arg(long, default_value = "h2", value_parser = parse_step_rule)]
    pub dt: StepRule,

    /// Final time.
    #[arg(long = "t", default_value_t = 1.0)]
    pub t_final: f64,

    /// Output directory; falls back to DQCD_OUT_DIR, then `dqcd-out`.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Write 0 in the seconds column so outputs are byte-reproducible.
    #[arg(long = "no-timing")]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: ProblemArgs,

    /// Nodes per direction.
    #[arg(long = "N", default_value_t = 21)]
    pub n: usize,

    /// Times at which to dump the full field (comma separated).
    #[arg(long = "dump-at", value_delimiter = ',')]
    pub dump_at: Vec<f64>,

    /// Also write the four weight matrices.
    #[arg(long = "dump-weights")]
    pub dump_weights: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ConvergenceArgs {
    #[command(flatten)]
    pub common: ProblemArgs,

    /// Node counts per direction, increasing (comma separated).
    #[arg(long = "N", value_delimiter = ',', required = true)]
    pub ns: Vec<usize>,

    /// Compare against a published table by id and write diff files.
    #[arg(long)]
    pub reference: Option<u8>,
}

#[derive(Debug, Clone, Args)]
pub struct StabilityArgs {
    #[command(flatten)]
    pub common: ProblemArgs,

    /// Node counts per direction (comma separated).
    #[arg(long = "N", value_delimiter = ',', default_values_t = [11, 21, 31, 41])]
    pub ns: Vec<usize>,

    #[arg(long, value_enum, hide = true)]
    pub inject: Option<Injected>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn step_rule_tokens() {
        assert_eq!(parse_step_rule("h2"), Ok(StepRule::HSquared));
        assert_eq!(parse_step_rule("0.00625"), Ok(StepRule::Fixed(0.00625)));
        assert!(parse_step_rule("0").is_err());
        assert!(parse_step_rule("fast").is_err());
    }

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
        let cli = Cli::try_parse_from(["dqcd", "stability", "--beta-x", "-1"]).unwrap();
        let Command::Stability(a) = cli.command else { panic!() };
        assert_eq!(a.ns, vec![11, 21, 31, 41]);
        assert_eq!(a.common.beta_x, Some(-1.0));
    }
}
