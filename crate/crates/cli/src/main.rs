mod output;
mod problem;

use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use quadsep::oracle::{grid_separation_2d, OracleReport};
use quadsep::{
    canonical_form, check_mutual, components, grid_components_2d, oracle_separates, separates_level,
    Error, GridSpec, QuadraticFunction, Target,
};
use serde::Serialize;

use output::{AllComponents, Classification, Mutual, Verdict};
use problem::{emit, parse_problem, validate, Problem};

const SEPARATED: u8 = 0;
const INPUT_ERROR: u8 = 2;
const NOT_SEPARATED: u8 = 3;
const INCONSISTENT: u8 = 4;

#[derive(Parser)]
#[command(name = "quadsep", version)]
#[command(about = "Connectivity and separation of quadratic level sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Problem file (JSON); reads stdin when omitted or "-"
    file: Option<PathBuf>,

    /// Relative tolerance (overrides the file)
    #[arg(long)]
    tol_rel: Option<f64>,

    /// Absolute tolerance (overrides the file)
    #[arg(long)]
    tol_abs: Option<f64>,
}

#[derive(Args, Clone)]
struct OracleArgs {
    /// Number of level-set samples
    #[arg(long, default_value_t = 200)]
    samples: usize,

    /// Sampling seed
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Grid resolution (cells per side)
    #[arg(long, default_value_t = 512)]
    grid: usize,

    /// Grid half-width in canonical coordinates
    #[arg(long, default_value_t = 8.0)]
    window: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Canonical form of f (and g when present)
    Classify(Common),
    /// Component counts and witnesses for {f<0}, {f<=0}, {f=0}
    Components(Common),
    /// Does {g=0} separate {f=0}?
    Separate(Common),
    /// Both directions of separation
    Mutual(Common),
    /// Analytic verdict checked against sampling and grid oracles
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        oracle: OracleArgs,
    },
    /// Print the problem file with symmetrized matrices and effective tolerances
    Normalize(Common),
    /// CSV of zero-set grid cells (n = 2)
    Plot {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        oracle: OracleArgs,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: INPUT_ERROR,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconsistency(_) | Error::EigenNotConverged { .. } => INCONSISTENT,
            _ => INPUT_ERROR,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn load(common: &Common) -> Result<Problem, Failure> {
    let text = match &common.file {
        Some(path) if path.as_os_str() != "-" => fs::read_to_string(path)
            .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?,
        _ => {
            let mut buf = String::new();
            io::stdin()
                .read_to_string(&mut buf)
                .map_err(|e| Failure::input(format!("cannot read stdin: {e}")))?;
            buf
        }
    };
    let file = parse_problem(&text).map_err(|e| Failure::input(e.to_string()))?;
    let problem =
        validate(file, (common.tol_rel, common.tol_abs)).map_err(|e| Failure::input(e.to_string()))?;
    for w in &problem.warnings {
        eprintln!("warning: {w}");
    }
    Ok(problem)
}

fn require_g(problem: &Problem) -> Result<&QuadraticFunction, Failure> {
    problem
        .g
        .as_ref()
        .ok_or_else(|| Failure::input("this command needs \"g\" in the problem file"))
}

/// Writes to stdout; a closed pipe is not an error.
fn emit_stdout(text: &str) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    match writeln!(out, "{text}").and_then(|_| out.flush()) {
        Err(e) if e.kind() != io::ErrorKind::BrokenPipe => Err(Failure {
            code: INPUT_ERROR,
            message: format!("cannot write output: {e}"),
        }),
        _ => Ok(()),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    emit_stdout(&serde_json::to_string_pretty(value).expect("reports serialize"))
}

fn verdict_code(separated: bool) -> u8 {
    if separated {
        SEPARATED
    } else {
        NOT_SEPARATED
    }
}

fn classify(common: &Common) -> Outcome {
    #[derive(Serialize)]
    struct Report {
        f: Classification,
        #[serde(skip_serializing_if = "Option::is_none")]
        g: Option<Classification>,
    }
    let p = load(common)?;
    let t = p.tolerances;
    let f = Classification::new(&p.f, &canonical_form(&p.f, t)?, t)?;
    let g = match &p.g {
        Some(g) => Some(Classification::new(g, &canonical_form(g, t)?, t)?),
        None => None,
    };
    print_json(&Report { f, g })?;
    Ok(0)
}

fn all_components(q: &QuadraticFunction, p: &Problem) -> Result<AllComponents, Failure> {
    let t = p.tolerances;
    Ok(AllComponents {
        strict_sublevel: (&components(q, Target::StrictSublevel, t)?).into(),
        sublevel: (&components(q, Target::Sublevel, t)?).into(),
        level: (&components(q, Target::Level, t)?).into(),
    })
}

fn components_cmd(common: &Common) -> Outcome {
    #[derive(Serialize)]
    struct Report {
        f: AllComponents,
        #[serde(skip_serializing_if = "Option::is_none")]
        g: Option<AllComponents>,
    }
    let p = load(common)?;
    let f = all_components(&p.f, &p)?;
    let g = p.g.as_ref().map(|g| all_components(g, &p)).transpose()?;
    print_json(&Report { f, g })?;
    Ok(0)
}

fn separate(common: &Common) -> Outcome {
    let p = load(common)?;
    let g = require_g(&p)?;
    let v = separates_level(g, &p.f, p.tolerances)?;
    print_json(&Verdict::from(&v))?;
    Ok(verdict_code(v.separated))
}

fn mutual(common: &Common) -> Outcome {
    let p = load(common)?;
    let g = require_g(&p)?;
    let m = check_mutual(&p.f, g, p.tolerances)?;
    print_json(&Mutual::new(&m.forward, &m.reverse))?;
    Ok(verdict_code(m.forward.separated))
}

fn normalize(common: &Common) -> Outcome {
    let p = load(common)?;
    emit_stdout(&emit(&p))?;
    Ok(0)
}

fn grid_spec(p: &Problem, oracle: &OracleArgs) -> Result<GridSpec, Failure> {
    Ok(GridSpec::around(&p.f, oracle.window, oracle.grid, p.tolerances)?)
}

fn verify(common: &Common, oracle: &OracleArgs) -> Outcome {
    #[derive(Serialize)]
    struct Report {
        analytic: Verdict,
        sampling: Option<OracleReport>,
        grid: Option<OracleReport>,
        agree: bool,
    }
    let p = load(common)?;
    let g = require_g(&p)?;
    let t = p.tolerances;
    let analytic = separates_level(g, &p.f, t)?;
    let sampling = match oracle_separates(g, &p.f, oracle.samples, oracle.seed, t) {
        Ok(r) => Some(r),
        Err(Error::EmptyLevelSet) => None,
        Err(e) => return Err(e.into()),
    };
    let grid = if p.file.n == 2 {
        Some(grid_separation_2d(g, &p.f, &grid_spec(&p, oracle)?)?.0)
    } else {
        None
    };
    // Sampling can only confirm a separation; the grid is two-sided when
    // it is confident.
    let sampling_ok = !analytic.separated || sampling.as_ref().is_some_and(|s| s.separated);
    let grid_ok = grid
        .as_ref()
        .is_none_or(|r| !r.confident || r.separated == analytic.separated);
    let agree = sampling_ok && grid_ok;
    print_json(&Report {
        analytic: (&analytic).into(),
        sampling,
        grid,
        agree,
    })?;
    if agree {
        Ok(verdict_code(analytic.separated))
    } else {
        eprintln!("error: analytic verdict and oracle disagree");
        Ok(INCONSISTENT)
    }
}

fn plot(common: &Common, oracle: &OracleArgs) -> Outcome {
    let p = load(common)?;
    if p.file.n != 2 {
        return Err(Failure::input(format!("plot needs n = 2, got n = {}", p.file.n)));
    }
    let spec = grid_spec(&p, oracle)?;
    let comps = grid_components_2d(&p.f, &spec)?;
    let mut csv = String::from("x,y,component,sign_g");
    for cell in &comps.cells {
        let c = spec.cell_center(cell.i, cell.j);
        let sign = match &p.g {
            Some(g) => {
                let v = g.value(&c);
                if v > 0.0 {
                    "1"
                } else if v < 0.0 {
                    "-1"
                } else {
                    "0"
                }
            }
            None => "",
        };
        csv.push_str(&format!("\n{},{},{},{sign}", c[0], c[1], cell.component));
    }
    emit_stdout(&csv)?;
    if !comps.confident {
        eprintln!("warning: grid is not confident at this resolution");
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Classify(c) => classify(c),
        Command::Components(c) => components_cmd(c),
        Command::Separate(c) => separate(c),
        Command::Mutual(c) => mutual(c),
        Command::Normalize(c) => normalize(c),
        Command::Verify { common, oracle } => verify(common, oracle),
        Command::Plot { common, oracle } => plot(common, oracle),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
