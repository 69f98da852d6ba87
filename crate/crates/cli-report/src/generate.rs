//! Sampling of one solution family on a grid, written as CSV with a JSON
//! sidecar of residual norms, the convergence table and the Newton certificate.

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use conservation::{generating_currents, make_current_family1, physical_laws, ConservedCurrent};
use expr_kernel::{DiffFunction, Q};
use serde::{Deserialize, Serialize};
use solutions::{
    convergence_orders, make_regular, make_singular, make_ultra, sample_on_grid, GridField,
    GridSpec, ImplicitSolution, KGSolution, KGTerm, Norms, Side, Univariate,
};

use crate::{parse_expr, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Regular,
    Singular,
    Ultra,
}

impl Family {
    fn name(self) -> &'static str {
        match self {
            Family::Regular => "regular",
            Family::Singular => "singular",
            Family::Ultra => "ultra",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, clap::Args)]
pub struct GenerateParams {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Klein–Gordon seed of the regular family: `coef:a:b` terms joined by
    /// `;`, each `coef·e^{a r¹ + b r²}` with `ab = −1/4`.
    #[arg(long, default_value = "1:1:-1/4")]
    pub psi: String,
    /// Coefficient `d` of the extra term `d(r¹+r²)e^{(r¹−r²)/2}`.
    #[arg(long)]
    pub degenerate: Option<String>,
    /// Arbitrary function `W(s)`.
    #[arg(long, default_value = "tanh(s)")]
    pub w: String,
    /// Constant invariant of the singular family: `r1` or `r2`.
    #[arg(long, default_value = "r1")]
    pub side: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    /// `Θ(s)` of the singular family.
    #[arg(long, default_value = "exp(s)")]
    pub theta: String,
    #[arg(long, default_value_t = 0.3, allow_hyphen_values = true)]
    pub c1: f64,
    #[arg(long, default_value_t = 0.2, allow_hyphen_values = true)]
    pub c2: f64,
    /// Nodes per direction.
    #[arg(long, default_value_t = 101)]
    pub n: usize,
    /// Grid centre `t,x`; defaults to the image of the seed for the regular family.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    /// Half-widths `ht,hx`.
    #[arg(long, value_delimiter = ',', num_args = 2)]
    pub half: Option<Vec<f64>>,
    /// Initial guess `(r¹, r²)` for the first Newton solve.
    #[arg(long, value_delimiter = ',', num_args = 2, allow_hyphen_values = true)]
    pub seed_point: Option<Vec<f64>>,
    /// Skip the refined grids of the convergence table.
    #[arg(long, default_value_t = false)]
    pub no_refine: bool,
}

impl GenerateParams {
    pub fn new(family: Family) -> GenerateParams {
        use clap::Parser;
        #[derive(clap::Parser)]
        struct Wrap {
            #[command(flatten)]
            p: GenerateParams,
        }
        let mut p = Wrap::parse_from(["generate", "--family", "regular"]).p;
        p.family = family;
        p
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridInfo {
    pub t0: f64,
    pub x0: f64,
    pub dt: f64,
    pub dx: f64,
    pub nt: usize,
    pub nx: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct Certificate {
    pub max_residual: f64,
    pub max_iterations: usize,
    pub max_jump: f64,
    pub min_nondegeneracy: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NormPair {
    pub name: String,
    pub max: f64,
    pub l2: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sequence {
    pub name: String,
    pub errors: Vec<f64>,
    pub orders: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Sidecar {
    pub family: Family,
    pub params: GenerateParams,
    pub grid: GridInfo,
    pub newton: Certificate,
    pub residuals: Vec<NormPair>,
    pub convergence: Convergence,
}

#[derive(Clone, Debug, Serialize)]
pub struct Convergence {
    pub grids: Vec<usize>,
    pub sequences: Vec<Sequence>,
}

#[derive(Clone, Debug)]
pub struct GenerateOutput {
    pub csv: PathBuf,
    pub json: PathBuf,
    pub sidecar: Sidecar,
}

fn rational(text: &str) -> Result<Q, CliError> {
    parse_expr(text)?
        .as_constant()
        .ok_or_else(|| CliError::Config(format!("'{text}' is not a rational number")))
}

fn univariate(text: &str) -> Result<Univariate, CliError> {
    Ok(Univariate::new(parse_expr(text)?)?)
}

fn seed_psi(p: &GenerateParams) -> Result<KGSolution, CliError> {
    let mut terms = Vec::new();
    for part in p.psi.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let f: Vec<&str> = part.split(':').collect();
        let [coef, a, b] = f[..] else {
            return Err(CliError::Config(format!(
                "seed term '{part}' is not coef:a:b"
            )));
        };
        terms.push(KGTerm {
            coef: rational(coef)?,
            a: rational(a)?,
            b: rational(b)?,
        });
    }
    let mut psi = KGSolution::new(terms)?;
    if let Some(d) = &p.degenerate {
        psi = psi.with_degenerate(rational(d)?);
    }
    Ok(psi)
}

fn pair(v: &Option<Vec<f64>>, default: [f64; 2], what: &str) -> Result<[f64; 2], CliError> {
    match v {
        None => Ok(default),
        Some(v) if v.len() == 2 => Ok([v[0], v[1]]),
        Some(_) => Err(CliError::Config(format!("{what} takes two numbers"))),
    }
}

struct Setup {
    sol: ImplicitSolution,
    center: [f64; 2],
    half: [f64; 2],
    seed: [f64; 2],
    currents: Vec<(String, ConservedCurrent)>,
}

fn setup(p: &GenerateParams) -> Result<Setup, CliError> {
    let w = univariate(&p.w)?;
    let mass = (
        "mixture mass".to_string(),
        make_current_family1(&DiffFunction::one())?,
    );
    let laws = physical_laws()?;
    let momentum = laws
        .into_iter()
        .find(|l| l.name == "mixture momentum")
        .map(|l| ("mixture momentum".to_string(), l.current))
        .ok_or_else(|| CliError::Config("momentum law missing".into()))?;
    Ok(match p.family {
        Family::Regular => {
            let sol = make_regular(seed_psi(p)?, w)?;
            let seed = pair(&p.seed_point, [0.0, 0.0], "--seed-point")?;
            let image = sol.image_of(seed).ok_or_else(|| {
                CliError::Config("the hodograph map is undefined at the seed point".into())
            })?;
            Setup {
                center: pair(&p.center, [image.0, image.1], "--center")?,
                half: pair(&p.half, [0.1, 0.1], "--half")?,
                seed,
                sol,
                currents: vec![mass, momentum],
            }
        }
        Family::Singular => {
            let side = match p.side.as_str() {
                "r1" => Side::R1,
                "r2" => Side::R2,
                s => {
                    return Err(CliError::Config(format!(
                        "--side must be r1 or r2, got '{s}'"
                    )))
                }
            };
            Setup {
                sol: make_singular(side, p.c, univariate(&p.theta)?, w),
                center: pair(&p.center, [0.5, 0.5], "--center")?,
                half: pair(&p.half, [0.2, 0.2], "--half")?,
                seed: pair(
                    &p.seed_point,
                    if side == Side::R1 {
                        [p.c, 0.0]
                    } else {
                        [0.0, p.c]
                    },
                    "--seed-point",
                )?,
                currents: vec![mass, momentum],
            }
        }
        Family::Ultra => {
            let w0 = DiffFunction::omega(0);
            Setup {
                sol: make_ultra(p.c1, p.c2, w),
                center: pair(&p.center, [0.0, 0.0], "--center")?,
                half: pair(&p.half, [1.0, 1.0], "--half")?,
                seed: pair(&p.seed_point, [p.c1, p.c2], "--seed-point")?,
                currents: vec![
                    (
                        "generating r3 density".to_string(),
                        generating_currents()?[0].clone(),
                    ),
                    (
                        "family1 w0^2".to_string(),
                        make_current_family1(&w0.pow(2))?,
                    ),
                ],
            }
        }
    })
}

fn norms(
    f: &GridField,
    currents: &[(String, ConservedCurrent)],
) -> Result<Vec<(String, Norms)>, CliError> {
    let mut out: Vec<(String, Norms)> = f
        .pde_residual()
        .iter()
        .enumerate()
        .map(|(k, n)| (format!("pde r{}", k + 1), *n))
        .collect();
    for (name, c) in currents {
        out.push((format!("current {name}"), f.conservation_residual(c)?));
    }
    Ok(out)
}

/// Samples the family, writes `<family>.csv` and `<family>.json` into `dir`.
pub fn generate(p: &GenerateParams, dir: &Path) -> Result<GenerateOutput, CliError> {
    let s = setup(p)?;
    let spec_for =
        |n: usize| GridSpec::centered(s.center[0], s.center[1], s.half[0], s.half[1], n, n);
    let spec = spec_for(p.n)?;
    let field = sample_on_grid(&s.sol, &spec, s.seed)?;
    let residuals = norms(&field, &s.currents)?;

    let mut grids = vec![p.n];
    if !p.no_refine {
        grids.extend([2 * p.n - 1, 4 * p.n - 3]);
    }
    let mut table: Vec<Vec<f64>> = residuals.iter().map(|(_, n)| vec![n.max]).collect();
    for &n in &grids[1..] {
        let f = sample_on_grid(&s.sol, &spec_for(n)?, s.seed)?;
        for (row, (_, norm)) in table.iter_mut().zip(norms(&f, &s.currents)?) {
            row.push(norm.max);
        }
    }

    std::fs::create_dir_all(dir)?;
    let name = p.family.name();
    let csv = dir.join(format!("{name}.csv"));
    let json = dir.join(format!("{name}.json"));
    field.write_csv(BufWriter::new(File::create(&csv)?))?;

    let c = field.certificate;
    let sidecar = Sidecar {
        family: p.family,
        params: p.clone(),
        grid: GridInfo {
            t0: spec.t0,
            x0: spec.x0,
            dt: spec.dt,
            dx: spec.dx,
            nt: spec.nt,
            nx: spec.nx,
        },
        newton: Certificate {
            max_residual: c.max_residual,
            max_iterations: c.max_iterations,
            max_jump: c.max_jump,
            min_nondegeneracy: c.min_nondegeneracy,
        },
        residuals: residuals
            .iter()
            .map(|(name, n)| NormPair {
                name: name.clone(),
                max: n.max,
                l2: n.l2,
            })
            .collect(),
        convergence: Convergence {
            grids,
            sequences: residuals
                .iter()
                .zip(table)
                .map(|((name, _), errors)| Sequence {
                    name: name.clone(),
                    orders: convergence_orders(&errors),
                    errors,
                })
                .collect(),
        },
    };
    serde_json::to_writer_pretty(BufWriter::new(File::create(&json)?), &sidecar)?;
    Ok(GenerateOutput { csv, json, sidecar })
}
