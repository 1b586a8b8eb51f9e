use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use period_atlas::aronhold::{derivation_fingerprint, InvariantPair};
use period_atlas::cubic::{cubic_period, TernaryCubic};
use period_atlas::double_cover::period;
use period_atlas::grassmann::{column_subsets, cross_ratios, gauge_fix, minor, ParameterMatrix};
use period_atlas::hyperseries::SeriesConfig;
use period_atlas::positive_closure::{is_positively_closed, AlgebraicElement};
use period_atlas::rational_poly::SparsePolynomial;
use period_atlas::verify::{self, Suite, Tolerances};
use period_atlas::{complex_json, Error};

const EXIT_USAGE: u8 = 64;
const CACHE_ENV: &str = "PERIOD_ATLAS_CACHE";

#[derive(Parser)]
#[command(name = "period-atlas", version, about = "Invariants and period series of double covers and plane cubics")]
struct Cli {
    /// Compact single-line JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximal minors, cross-ratios and the canonical representative of a matrix.
    Invariants(InvariantsArgs),
    /// Evaluate period series.
    #[command(subcommand)]
    Period(PeriodCommand),
    /// Derive or load the invariants S and T of the ternary cubic.
    #[command(subcommand)]
    Aronhold(AronholdCommand),
    /// Decide membership in the positive closure of Q[x].
    PcCheck {
        #[arg(long, value_name = "FILE")]
        minpoly: PathBuf,
        #[arg(long, default_value_t = 0)]
        root_index: usize,
    },
    /// Run a seeded verification suite and report each check.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["legendre", "k3", "cubic", "operators", "all"])]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct InvariantsArgs {
    #[arg(long, value_name = "FILE")]
    matrix: PathBuf,
    #[arg(long, group = "view")]
    minors: bool,
    #[arg(long, group = "view")]
    cross_ratios: bool,
    #[arg(long, group = "view")]
    gauge_fix: bool,
}

#[derive(Subcommand)]
enum PeriodCommand {
    /// Period of the double cover branched along the columns of a matrix.
    DoubleCover {
        #[arg(long, value_name = "FILE")]
        matrix: PathBuf,
        #[arg(long, default_value_t = 40)]
        max_degree: u32,
    },
    /// Period branches of a plane cubic.
    Cubic {
        #[arg(long, value_name = "FILE")]
        coeffs: PathBuf,
        #[arg(long, default_value_t = 40)]
        max_degree: u32,
    },
}

#[derive(Subcommand)]
enum AronholdCommand {
    /// Derive S and T by exact kernel computation, or load them from the cache.
    Derive {
        #[arg(long)]
        force: bool,
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

struct RunConfig {
    cache_dir: PathBuf,
    tolerances: Tolerances,
}

impl RunConfig {
    fn from_env() -> Self {
        let cache_dir = std::env::var_os(CACHE_ENV)
            .map(PathBuf::from)
            .or_else(|| std::env::var_os("XDG_CACHE_HOME").map(|d| PathBuf::from(d).join("period-atlas")))
            .or_else(|| std::env::var_os("HOME").map(|d| PathBuf::from(d).join(".cache").join("period-atlas")))
            .unwrap_or_else(|| PathBuf::from(".period-atlas-cache"));
        RunConfig {
            cache_dir,
            tolerances: Tolerances::default(),
        }
    }
}

enum Failure {
    Lib(Error),
    ChecksFailed(Value),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn series(max_degree: u32) -> SeriesConfig {
    SeriesConfig::default().with_max_degree(max_degree)
}

fn invariants(args: &InvariantsArgs) -> Result<Value, Error> {
    let z = ParameterMatrix::from_json(&read_json(&args.matrix)?)?;
    let n = z.n();
    let all = !(args.minors || args.cross_ratios || args.gauge_fix);
    let mut out = json!({ "n": n });
    if all || args.minors {
        let minors = column_subsets(2 * n, n)
            .into_iter()
            .map(|cols| minor(&z, &cols).map(|d| json!({ "columns": cols, "value": complex_json(d) })))
            .collect::<Result<Vec<_>, _>>()?;
        out["minors"] = json!(minors);
        out["vanishing_minors"] = json!(z.vanishing_minors());
    }
    if all || args.cross_ratios {
        out["cross_ratios"] = cross_ratios(&z)?.to_json();
    }
    if all || args.gauge_fix {
        out["gauge_fixed"] = gauge_fix(&z)?.to_json();
    }
    Ok(out)
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> Result<Value, Failure> {
    Ok(match &cli.command {
        Command::Invariants(args) => invariants(args)?,
        Command::Period(PeriodCommand::DoubleCover { matrix, max_degree }) => {
            let z = ParameterMatrix::from_json(&read_json(matrix)?)?;
            period(&z, &series(*max_degree))?.to_json()
        }
        Command::Period(PeriodCommand::Cubic { coeffs, max_degree }) => {
            let c = TernaryCubic::from_json(&read_json(coeffs)?)?;
            let branches = cubic_period(&c, &series(*max_degree))?;
            json!({ "branches": branches.iter().map(|b| b.to_json()).collect::<Vec<_>>() })
        }
        Command::Aronhold(AronholdCommand::Derive { force, out }) => {
            let dir = out.clone().unwrap_or_else(|| cfg.cache_dir.clone());
            let (pair, derived) = InvariantPair::load_or_derive(&dir, *force)?;
            json!({
                "directory": dir.display().to_string(),
                "derived": derived,
                "derivation_sha256": derivation_fingerprint(),
                "s_terms": pair.s.num_terms(),
                "t_terms": pair.t.num_terms(),
            })
        }
        Command::PcCheck { minpoly, root_index } => {
            let v = read_json(minpoly)?;
            let s = match v.get("minimal_polynomial") {
                Some(_) => AlgebraicElement::from_json(&v)?,
                None => AlgebraicElement::new(SparsePolynomial::from_json(&v, None)?, *root_index)?,
            };
            let mut out = is_positively_closed(&s)?.to_json();
            out["minimal_polynomial"] = json!(s.display());
            out
        }
        Command::Verify { suite, seed } => {
            let suite: Suite = suite.parse()?;
            let report = verify::run(suite, *seed, &cfg.tolerances);
            let v = report.to_json();
            if !report.passed() {
                return Err(Failure::ChecksFailed(v));
            }
            v
        }
    })
}

fn render(v: &Value, compact: bool) -> String {
    if compact {
        v.to_string()
    } else {
        serde_json::to_string_pretty(v).expect("JSON values always serialize")
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cfg = RunConfig::from_env();
    match dispatch(&cli, &cfg) {
        Ok(v) => {
            println!("{}", render(&v, cli.json));
            ExitCode::SUCCESS
        }
        Err(Failure::ChecksFailed(v)) => {
            println!("{}", render(&v, cli.json));
            ExitCode::from(1)
        }
        Err(Failure::Lib(e)) => {
            let v = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
            println!("{}", render(&v, cli.json));
            ExitCode::from(if e.is_domain_error() { 2 } else { 1 })
        }
    }
}
