//! Batch verification of the drift-flux symmetry, conservation, Hamiltonian,
//! recursion and solution engines, with machine-readable reports.

use std::fmt::Write as _;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub mod fields;
pub mod generate;
pub mod infix;
mod suites;

pub use fields::{parse_field, parse_operator};
pub use generate::{generate, Family, GenerateOutput, GenerateParams};
pub use infix::{parse_expr, to_prefix};

pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Suites accepted by [`run_suite`], in the order `all` runs them.
pub const SUITES: [&str; 7] = [
    "symmetry",
    "cosymmetry",
    "conservation",
    "hamiltonian",
    "recursion",
    "solutions",
    "kernel",
];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Kernel(#[from] expr_kernel::KernelError),
    #[error(transparent)]
    Symmetry(#[from] symmetry::SymmetryError),
    #[error(transparent)]
    Conservation(#[from] conservation::ConservationError),
    #[error(transparent)]
    Recursion(#[from] recursion::RecursionError),
    #[error(transparent)]
    Solution(#[from] solutions::SolutionError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 1 for a numeric failure while generating a solution, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        use solutions::SolutionError as S;
        match self {
            CliError::Solution(
                S::NewtonDiverged { .. }
                | S::JacobianSingular { .. }
                | S::BranchJump { .. }
                | S::NonFinite { .. },
            ) => 1,
            _ => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    /// Nonzero residual expressions or numeric norms; always set on failure.
    pub residual: Option<String>,
    /// Wall time of the job that produced the check.
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub suite: String,
    pub engine_version: String,
    pub seed: u64,
    pub summary: Summary,
    pub checks: Vec<CheckRecord>,
}

impl VerificationReport {
    fn new(suite: &str, seed: u64, checks: Vec<CheckRecord>) -> VerificationReport {
        let count = |s| checks.iter().filter(|c| c.status == s).count();
        VerificationReport {
            suite: suite.to_string(),
            engine_version: ENGINE_VERSION.to_string(),
            seed,
            summary: Summary {
                pass: count(Status::Pass),
                fail: count(Status::Fail),
                inconclusive: count(Status::Inconclusive),
            },
            checks,
        }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.fail == 0
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// Checks whose id starts with `prefix`.
    pub fn with_prefix<'a>(
        &'a self,
        prefix: &'a str,
    ) -> impl Iterator<Item = &'a CheckRecord> + 'a {
        self.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "suite {} (engine {}, seed {})\n",
            self.suite, self.engine_version, self.seed
        );
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Inconclusive => "INCONCLUSIVE",
            };
            let _ = write!(s, "{tag:<5} {} [{:.0} ms]", c.id, c.wall_time_ms);
            if let Some(r) = &c.residual {
                let _ = write!(s, "  {r}");
            }
            s.push('\n');
        }
        let _ = writeln!(
            s,
            "{} pass, {} fail, {} inconclusive",
            self.summary.pass, self.summary.fail, self.summary.inconclusive
        );
        s
    }
}

fn default_gamma_order() -> u32 {
    3
}

fn default_r4_grid() -> usize {
    101
}

fn default_grids() -> Vec<usize> {
    vec![51, 101, 201]
}

fn default_cases() -> usize {
    1000
}

/// Suite parameters, read from the JSON config file and overridden by flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    /// Largest `κ + ι` of the `ℛ̌(Γ)` fields in the symmetry sample.
    #[serde(default = "default_gamma_order")]
    pub gamma_order: u32,
    /// Extra `(Θ, Ξ, c₀)` tuple for the Hamiltonian form check.
    #[serde(default)]
    pub theta: Option<String>,
    #[serde(default)]
    pub xi: Option<String>,
    #[serde(default)]
    pub c0: Option<String>,
    /// Optional parts: `r4` adds the numeric nonlocal recursion check.
    #[serde(default)]
    pub include: Vec<String>,
    #[serde(default = "default_r4_grid")]
    pub r4_grid: usize,
    /// Grid sizes of the convergence study, each a refinement of the previous.
    #[serde(default = "default_grids")]
    pub grids: Vec<usize>,
    /// Number of random expressions for the kernel properties.
    #[serde(default = "default_cases")]
    pub cases: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("defaults")
    }
}

impl SuiteConfig {
    pub fn from_json(text: &str) -> Result<SuiteConfig, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn includes(&self, part: &str) -> bool {
        self.include.iter().any(|p| p == part)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(p) = self.include.iter().find(|p| p.as_str() != "r4") {
            return bad(format!("unknown include '{p}'"));
        }
        if self.grids.len() < 2 {
            return bad("at least two grid sizes are needed".into());
        }
        for w in self.grids.windows(2) {
            if w[0] < 5 || w[1] != 2 * w[0] - 1 {
                return bad(format!(
                    "grid {} does not refine {} by halving the spacing",
                    w[1], w[0]
                ));
            }
        }
        if self.r4_grid < 9 || self.r4_grid.is_multiple_of(2) {
            return bad(format!(
                "r4_grid must be odd and at least 9, got {}",
                self.r4_grid
            ));
        }
        if self.cases == 0 {
            return bad("cases must be positive".into());
        }
        if self.gamma_order > symmetry::DEFAULT_ORDER_CAP {
            return bad(format!("gamma_order above {}", symmetry::DEFAULT_ORDER_CAP));
        }
        for s in [&self.theta, &self.xi, &self.c0].into_iter().flatten() {
            parse_expr(s).map_err(|e| CliError::Config(format!("'{s}': {e}")))?;
        }
        Ok(())
    }
}

/// Outcome of one check before timing is attached.
#[derive(Clone, Debug)]
pub(crate) struct Outcome {
    pub id: String,
    pub anchor: String,
    pub status: Status,
    pub residual: Option<String>,
}

pub(crate) type Job = Box<dyn FnOnce() -> Vec<Outcome> + Send>;

fn execute(jobs: Vec<Job>) -> Vec<CheckRecord> {
    let timed: Vec<(f64, Vec<Outcome>)> = jobs
        .into_par_iter()
        .map(|job| {
            let start = Instant::now();
            let out = job();
            (start.elapsed().as_secs_f64() * 1e3, out)
        })
        .collect();
    timed
        .into_iter()
        .flat_map(|(ms, out)| {
            out.into_iter().map(move |o| CheckRecord {
                id: o.id,
                anchor: o.anchor,
                status: o.status,
                residual: o.residual,
                wall_time_ms: ms,
            })
        })
        .collect()
}

/// Runs a named suite, or every suite for `all`.
pub fn run_suite(
    name: &str,
    config: &SuiteConfig,
    seed: u64,
) -> Result<VerificationReport, CliError> {
    config.validate()?;
    let names: Vec<&str> = match name {
        "all" => SUITES.to_vec(),
        n if SUITES.contains(&n) => vec![n],
        n => return Err(CliError::Config(format!("unknown suite '{n}'"))),
    };
    let mut jobs = Vec::new();
    for n in names {
        jobs.extend(suites::jobs(n, config, seed)?);
    }
    Ok(VerificationReport::new(name, seed, execute(jobs)))
}
