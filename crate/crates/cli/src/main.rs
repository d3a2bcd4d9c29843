//! `fslattice`: subset-sum structure of lattice point sets from the shell.
//!
//! JSON goes to stdout unless `--out` names a file. Exit status: 0 success,
//! 1 domain or validation failure (including a failed check), 2 resource cap,
//! 64 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use fslattice_core::bitint::BitInt;
use fslattice_core::cone::{self, ConeSpec};
use fslattice_core::dyadic::{self, grid_generators, DyadicRepresentation};
use fslattice_core::gap;
use fslattice_core::oracle::{fs_enumerate, fs_membership};
use fslattice_core::selftest;
use fslattice_core::{Error, GeneratorSet, Point, Region, Representation, RunConfig};

const EXIT_FAILURE: u8 = 1;
const EXIT_RESOURCE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "fslattice", version, about = "Subset sums of lattice point sets")]
struct Cli {
    /// JSON run configuration (cell_cap, ray_depth, seed, cone_max)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Cell cap for dense tables; overrides config and FSLATTICE_CAP
    #[arg(long, global = true)]
    cap: Option<u64>,

    /// Seed for sampled checks
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Brute-force subset sums
    #[command(subcommand)]
    Fs(FsCmd),
    /// Thin complete generator sets for cones
    #[command(subcommand)]
    Cone(ConeCmd),
    /// The dyadic grid {2^m} x {2^k}
    #[command(subcommand)]
    Dyadic(DyadicCmd),
    /// Progressions and rectangles in FS(A x B)
    #[command(subcommand)]
    Gap(GapCmd),
    /// Run every acceptance check and print a JSON report
    Selftest {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum FsCmd {
    /// Is the target a sum of distinct generators?
    Check {
        #[arg(long, value_name = "FILE")]
        generators: PathBuf,
        #[arg(long)]
        target: Point,
    },
    /// All reachable points of a box
    Enumerate {
        #[arg(long, value_name = "FILE")]
        generators: PathBuf,
        /// "lo_1,...,lo_k,hi_1,...,hi_k"
        #[arg(long = "box")]
        region: String,
        #[arg(long)]
        witnesses: bool,
        /// P2 grayscale map, 2-D boxes only
        #[arg(long, value_name = "FILE")]
        heatmap: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SpecArg {
    /// Cone spec file, {"v": [[1,2],[2,1]]}
    #[arg(long, value_name = "FILE", conflicts_with = "v", required_unless_present = "v")]
    spec: Option<PathBuf>,
    /// Inline generators, "1,2;2,1"
    #[arg(long)]
    v: Option<String>,
}

impl SpecArg {
    fn load(&self) -> Result<ConeSpec, Failure> {
        match (&self.spec, &self.v) {
            (Some(path), _) => read_json(path),
            (None, Some(v)) => Ok(ConeSpec::parse(v)?),
            (None, None) => unreachable!("clap enforces one of --spec/--v"),
        }
    }
}

#[derive(Subcommand)]
enum ConeCmd {
    /// Build S and the dyadic rays
    Build {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        depth: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a cone point as a sum of distinct generators
    Decompose {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        point: Point,
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Decompose every cone point of [0, max]^k
    Verify {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        max: u64,
        /// Also compare with brute force on [0, oracle-max]^k
        #[arg(long)]
        oracle_max: Option<u64>,
        #[arg(long)]
        depth: Option<u32>,
    },
}

#[derive(Subcommand)]
enum DyadicCmd {
    /// Membership in E and an explicit representation when outside it
    Check {
        /// "a,b"; each coordinate decimal or 2^e
        #[arg(long)]
        point: String,
    },
    /// Three-level PGM of E and reachability over a box
    Map {
        #[arg(long = "box")]
        region: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// The D x D square missed by FS(X)
    EmptySquare {
        #[arg(long = "D", value_name = "D")]
        d: u64,
        /// Confirm by brute force when x0 fits a machine word
        #[arg(long)]
        verify: bool,
    },
    /// Horizontal sums in the square at 2^(2^(R+1))
    DenseSquare {
        #[arg(long = "R", value_name = "R")]
        r: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GapCmd {
    /// Proper homogeneous GAP from popular sums
    Build {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        /// Lengths, "3,2"
        #[arg(long = "L", value_name = "L")]
        l: String,
    },
    /// Dense rectangle pipeline
    Rectangle {
        #[arg(long = "A", value_name = "FILE")]
        a: PathBuf,
        #[arg(long = "B", value_name = "FILE")]
        b: PathBuf,
        #[arg(long = "T", value_name = "T")]
        t: u64,
        #[arg(long = "H", value_name = "H")]
        h: u64,
    },
    /// n in [lo, hi] that are not sums of five distinct positive squares
    FiveSquares {
        #[arg(long)]
        lo: u64,
        #[arg(long)]
        hi: u64,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_resource() { EXIT_RESOURCE } else { EXIT_FAILURE };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn fail(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_FAILURE,
        message: message.into(),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    fs::write(path, contents).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(value).expect("report types serialize");
    text.push('\n');
    match out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_list(s: &str) -> Result<Vec<u64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|e| fail(format!("bad list {s:?}: {e}"))))
        .collect()
}

fn load_config(cli: &Cli) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_json_file(path)?,
        None => RunConfig::default(),
    }
    .with_env()?;
    if let Some(cap) = cli.cap {
        cfg.cell_cap = cap;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg.validated()?)
}

/// `Ok(false)` means the command ran but its check did not pass.
fn run(cli: Cli) -> Result<bool, Failure> {
    let cfg = load_config(&cli)?;
    match cli.command {
        Command::Fs(cmd) => run_fs(cmd, &cfg),
        Command::Cone(cmd) => run_cone(cmd, &cfg),
        Command::Dyadic(cmd) => run_dyadic(cmd, &cfg),
        Command::Gap(cmd) => run_gap(cmd, &cfg),
        Command::Selftest { out } => {
            let report = selftest::run_all(&cfg);
            for c in &report.criteria {
                eprintln!("{}", c.line());
            }
            emit(&report, out.as_deref())?;
            Ok(report.passed)
        }
    }
}

#[derive(Serialize)]
struct CheckOutput {
    target: Point,
    member: bool,
    representation: Option<Representation>,
}

fn run_fs(cmd: FsCmd, cfg: &RunConfig) -> Result<bool, Failure> {
    match cmd {
        FsCmd::Check { generators, target } => {
            let gens: GeneratorSet = read_json(&generators)?;
            let representation = fs_membership(&gens, &target, cfg.cell_cap)?;
            emit(
                &CheckOutput {
                    target,
                    member: representation.is_some(),
                    representation,
                },
                None,
            )?;
        }
        FsCmd::Enumerate {
            generators,
            region,
            witnesses,
            heatmap,
            out,
        } => {
            let gens: GeneratorSet = read_json(&generators)?;
            let region = Region::parse_box(&region)?;
            let reach = fs_enumerate(&gens, &region, cfg.cell_cap)?;
            if let Some(path) = heatmap {
                write_file(&path, &reach.heatmap()?.to_p2())?;
            }
            emit(&reach.summary(witnesses), out.as_deref())?;
        }
    }
    Ok(true)
}

fn run_cone(cmd: ConeCmd, cfg: &RunConfig) -> Result<bool, Failure> {
    match cmd {
        ConeCmd::Build { spec, depth, out } => {
            let spec = spec.load()?;
            let depth = depth.or(cfg.ray_depth).unwrap_or(6);
            let x = cone::build_thin_generators(&spec, depth)?;
            emit(&x, out.as_deref())?;
            Ok(true)
        }
        ConeCmd::Decompose { spec, point, depth } => {
            let spec = spec.load()?;
            let (_, rep) = cone::decompose_auto(&spec, &point, depth.or(cfg.ray_depth))?;
            emit(&rep, None)?;
            Ok(true)
        }
        ConeCmd::Verify {
            spec,
            max,
            oracle_max,
            depth,
        } => {
            let spec = spec.load()?;
            let report =
                cone::verify_cone(&spec, max, oracle_max, depth.or(cfg.ray_depth), cfg.cell_cap)?;
            emit(&report, None)?;
            Ok(report.pass)
        }
    }
}

#[derive(Serialize)]
struct DyadicCheckOutput {
    point: (BitInt, BitInt),
    in_e: bool,
    representation: Option<DyadicRepresentation>,
    /// Brute-force verdict for points of E small enough to enumerate.
    oracle: Option<Representation>,
    oracle_ran: bool,
}

#[derive(Serialize)]
struct EmptySquareOutput {
    #[serde(flatten)]
    square: dyadic::EmptySquare,
    verified: Option<bool>,
}

fn run_dyadic(cmd: DyadicCmd, cfg: &RunConfig) -> Result<bool, Failure> {
    match cmd {
        DyadicCmd::Check { point } => {
            let (a, b) = point
                .split_once(',')
                .ok_or_else(|| fail(format!("expected \"a,b\", got {point:?}")))?;
            let (a, b): (BitInt, BitInt) = (a.parse()?, b.parse()?);
            let in_e = dyadic::in_exceptional(&a, &b)?;
            let representation = if in_e { None } else { Some(dyadic::dyadic_represent(&a, &b)?) };
            let small = match (a.to_u64(), b.to_u64()) {
                (Some(x), Some(y)) => {
                    let cells = (u128::from(x) + 1) * (u128::from(y) + 1);
                    (in_e && cells <= u128::from(cfg.cell_cap)).then_some((x, y))
                }
                _ => None,
            };
            let oracle = match small {
                Some((x, y)) => {
                    let target = Point::new(vec![x, y])?;
                    fs_membership(&grid_generators(&target)?, &target, cfg.cell_cap)?
                }
                None => None,
            };
            emit(
                &DyadicCheckOutput {
                    point: (a, b),
                    in_e,
                    representation,
                    oracle,
                    oracle_ran: small.is_some(),
                },
                None,
            )?;
            Ok(true)
        }
        DyadicCmd::Map { region, out } => {
            let region = Region::parse_box(&region)?;
            let map = dyadic::exceptional_map(&region, cfg.cell_cap)?;
            write_file(&out, &map.image.to_p2())?;
            emit(&map, None)?;
            Ok(map.outside_e_unreachable == 0)
        }
        DyadicCmd::EmptySquare { d, verify } => {
            let square = dyadic::empty_square(d)?;
            let verified = if verify { square.verify_with_oracle(cfg.cell_cap)? } else { None };
            let ok = square.guaranteed && verified != Some(false);
            emit(&EmptySquareOutput { square, verified }, None)?;
            Ok(ok)
        }
        DyadicCmd::DenseSquare { r, out } => {
            let report = dyadic::dense_square_count(r)?;
            emit(&report, out.as_deref())?;
            Ok(report.counts_agree && report.all_certified)
        }
    }
}

#[derive(Serialize)]
struct FiveSquaresOutput {
    lo: u64,
    hi: u64,
    checked: u64,
    failures: Vec<u64>,
}

fn run_gap(cmd: GapCmd, cfg: &RunConfig) -> Result<bool, Failure> {
    match cmd {
        GapCmd::Build { a, b, l } => {
            let (a, b): (Vec<u64>, Vec<u64>) = (read_json(&a)?, read_json(&b)?);
            let g = gap::build_gap(&a, &b, &parse_list(&l)?)?;
            emit(&g, None)?;
            Ok(g.proper && g.representations_valid)
        }
        GapCmd::Rectangle { a, b, t, h } => {
            let (a, b): (Vec<u64>, Vec<u64>) = (read_json(&a)?, read_json(&b)?);
            let r = gap::dense_rectangle(&a, &b, t, h, cfg.cell_cap)?;
            emit(&r, None)?;
            Ok(r.measured >= r.ledger_bound)
        }
        GapCmd::FiveSquares { lo, hi } => {
            if lo > hi {
                return Err(fail("lo must not exceed hi"));
            }
            let failures = gap::five_squares_check(lo, hi);
            let ok = failures.is_empty();
            emit(
                &FiveSquaresOutput {
                    lo,
                    hi,
                    checked: hi - lo + 1,
                    failures,
                },
                None,
            )?;
            Ok(ok)
        }
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
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAILURE),
        Err(f) => {
            eprintln!("fslattice: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
