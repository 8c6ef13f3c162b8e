//! Command-line front end: validation, sampling, membership, certification,
//! realization, polynomial extraction, canonical construction, equivalence.
//!
//! Exit codes: 0 success or verdict-positive, 1 verdict-negative, 2 input
//! error, 3 numerical failure. Errors go to stderr as JSON objects. All
//! randomness sits behind --seed (default 0) and output bytes are a function
//! of (input, flags, seed).

use clap::{Args, Parser, Subcommand, ValueEnum};
use distvar::bidisc::{self, GridSpec, Region, Verdict, VarietyPoint};
use distvar::canonical::{self, EquivVerdict};
use distvar::inner::RationalInnerFn;
use distvar::io;
use distvar::matrix::C64;
use distvar::polydisc;
use distvar::symm;
use distvar::Error;
use serde_json::json;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "distvar",
    version,
    about = "Distinguished varieties of the bidisc, symmetrized bidisc, and polydisc from finite model data"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GridArgs {
    /// Outer radius of the sampling grid
    #[arg(long)]
    grid_radius: Option<f64>,
    /// Number of radial rings
    #[arg(long)]
    radii: Option<usize>,
    /// Number of angles per ring
    #[arg(long)]
    angles: Option<usize>,
}

impl GridArgs {
    fn apply(&self, mut grid: GridSpec) -> GridSpec {
        if let Some(r) = self.grid_radius {
            grid.radius = r;
        }
        if let Some(n) = self.radii {
            grid.radii = n;
        }
        if let Some(m) = self.angles {
            grid.angles = m;
        }
        grid
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check the defining matrix identities of a model triple file
    Validate {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sample the variety of a triple over a disc grid of fiber parameters
    Sample {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Test membership of a bidisc point in the variety of a triple
    Member {
        file: PathBuf,
        /// Coordinates as z1_re,z1_im,z2_re,z2_im
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Run the certificate battery and report a verdict
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Emit the transfer-function realization, or its value at a point
    Realize {
        file: PathBuf,
        /// Evaluation point as re,im
        #[arg(long, allow_hyphen_values = true)]
        at: Option<String>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Extract the defining bivariate polynomial of the variety
    Xi {
        file: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the canonical model triple of a rational inner function
    Canonical {
        file: PathBuf,
        /// Interpolation nodes on the circle (default scales with dimension)
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide unitary equivalence of two model triples
    Equiv {
        file1: PathBuf,
        file2: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Sample the symmetrized variety and attach the numerical-radius certificate
    Symm {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample and certify the variety of a commuting model tuple
    Poly {
        file: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    kind: String,
    message: String,
    code: u8,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { kind: "InvalidInput".into(), message: message.into(), code: 2 }
    }

    fn to_json(&self) -> String {
        json!({"error": {"kind": self.kind, "message": self.message}}).to_string()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let (kind, code) = match &e {
            Error::NonSquare { .. } => ("NonSquare", 2),
            Error::DimensionMismatch { .. } => ("DimensionMismatch", 2),
            Error::InvalidInput(_) => ("InvalidInput", 2),
            Error::EmptyRange => ("EmptyRange", 2),
            Error::NonConvergence { .. } => ("NonConvergence", 3),
            Error::NotCommuting { .. } => ("NotCommuting", 3),
            Error::RetriesExhausted { .. } => ("RetriesExhausted", 3),
            Error::SingularResolvent => ("SingularResolvent", 3),
            Error::NotUnitary { .. } => ("NotUnitary", 3),
            Error::RankDeficiencyUnstable { .. } => ("RankDeficiencyUnstable", 3),
            Error::DefectMismatch { .. } => ("DefectMismatch", 3),
            Error::DeflationAmbiguous { .. } => ("DeflationAmbiguous", 3),
            Error::UnimodularEigenvalue { .. } => ("UnimodularEigenvalue", 3),
        };
        Failure { kind: kind.into(), message: e.to_string(), code }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure {
        kind: "Io".into(),
        message: format!("{}: {e}", path.display()),
        code: 2,
    })
}

fn parse_floats(s: &str, n: usize, flag: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(Failure::input(format!(
            "{flag} expects {n} comma-separated numbers, got {}",
            parts.len()
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Failure::input(format!("{flag}: cannot parse number {p:?}")))
        })
        .collect()
}

/// Verdict commands map their outcome to the exit code; emission commands
/// return 0 whenever they produce output.
fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::Distinguished => 0,
        _ => 1,
    }
}

fn run(cmd: Cmd) -> Result<(String, Option<PathBuf>, u8), Failure> {
    match cmd {
        Cmd::Validate { file, tol } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let report = t.validate(tol);
            let checks: Vec<_> = report
                .checks
                .iter()
                .map(|c| json!({"name": c.name, "defect": c.defect, "tol": c.tol, "ok": c.ok()}))
                .collect();
            let text = serde_json::to_string_pretty(&json!({
                "checks": checks,
                "valid": report.ok(),
            }))
            .unwrap();
            let code = if report.ok() { 0 } else { 1 };
            Ok((text, None, code))
        }
        Cmd::Sample { file, grid, seed, tol, format, out } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let spec = grid.apply(GridSpec::default());
            let s = bidisc::sample(&t, &spec, seed, tol)?;
            let text = match format {
                Format::Json => io::cloud_to_json(&io::sample_to_cloud(&s)),
                Format::Csv => io::variety_points_to_csv(&s.points),
            };
            Ok((text, out, 0))
        }
        Cmd::Member { file, point, tol } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let v = parse_floats(&point, 4, "--point")?;
            let m = bidisc::is_member(&t, C64::new(v[0], v[1]), C64::new(v[2], v[3]), tol)?;
            let text =
                serde_json::to_string_pretty(&json!({"member": m.member, "defect": m.defect}))
                    .unwrap();
            Ok((text, None, if m.member { 0 } else { 1 }))
        }
        Cmd::Check { file, tol } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let b = bidisc::certify(&t, tol)?;
            let text = serde_json::to_string_pretty(&json!({
                "verdict": b.verdict.label(),
                "compatibility": {
                    "max_nu_left": b.compatibility.max_nu_left,
                    "max_nu_right": b.compatibility.max_nu_right,
                    "margin": b.compatibility.margin,
                    "compatible": b.compatibility.compatible,
                },
                "nonconstancy": {
                    "spread_left": b.nonconstancy.spread_left,
                    "spread_right": b.nonconstancy.spread_right,
                    "threshold": b.nonconstancy.threshold,
                    "nonconstant": b.nonconstancy.nonconstant,
                },
                "open_count": b.open_count,
                "torus_count": b.torus_count,
                "exterior_count": b.exterior_count,
                "mixed_count": b.mixed_count,
            }))
            .unwrap();
            Ok((text, None, verdict_code(b.verdict)))
        }
        Cmd::Realize { file, at, tol } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let psi = RationalInnerFn::from_triple(&t, tol)?;
            let text = match at {
                Some(s) => {
                    let v = parse_floats(&s, 2, "--at")?;
                    let z = C64::new(v[0], v[1]);
                    let value = psi.eval(z)?;
                    serde_json::to_string_pretty(&json!({
                        "at": [z.re, z.im],
                        "value": io::matrix_to_rows(&value),
                    }))
                    .unwrap()
                }
                None => io::colligation_to_json(&psi.colligation),
            };
            Ok((text, None, 0))
        }
        Cmd::Xi { file, tol, out } => {
            let psi = inner_fn_from_file(&file, tol)?;
            let xi = psi.xi_extract(tol)?;
            Ok((io::poly_to_json(&xi), out, 0))
        }
        Cmd::Canonical { file, nodes, seed, tol, out } => {
            let psi = inner_fn_from_file(&file, tol)?;
            let n = nodes.unwrap_or_else(|| canonical::default_node_count(&psi));
            let t = canonical::canonical_triple(&psi, n, seed, tol)?;
            Ok((io::triple_to_json(&t), out, 0))
        }
        Cmd::Equiv { file1, file2, seed, tol } => {
            let t1 = io::parse_triple(&read_file(&file1)?)?;
            let t2 = io::parse_triple(&read_file(&file2)?)?;
            let (verdict, witness) = canonical::unitary_equivalence(&t1, &t2, seed, tol);
            let text = serde_json::to_string_pretty(&json!({
                "verdict": verdict.label(),
                "witness": witness.as_ref().map(io::matrix_to_rows),
            }))
            .unwrap();
            let code = match verdict {
                EquivVerdict::Equivalent => 0,
                EquivVerdict::NotEquivalent => 1,
                EquivVerdict::Undetermined => 3,
            };
            Ok((text, None, code))
        }
        Cmd::Symm { file, grid, tol, format, out } => {
            let t = io::parse_triple(&read_file(&file)?)?;
            let spec = grid.apply(symm::symm_grid());
            let s = symm::sample_symm(&t, &spec, tol)?;
            let nu = symm::nu_certificate(&t, tol)?;
            let text = match format {
                Format::Json => {
                    let mut v = serde_json::to_value(io::symm_sample_to_cloud(&s)).unwrap();
                    v["nu"] = json!({"value": nu.nu, "margin": nu.margin, "strict": nu.strict});
                    v["evidence"] = json!(s.evidence);
                    serde_json::to_string_pretty(&v).unwrap()
                }
                Format::Csv => io::symm_points_to_csv(&s.points),
            };
            Ok((text, out, 0))
        }
        Cmd::Poly { file, grid, seed, tol, format, out } => {
            let t = io::parse_tuple(&read_file(&file)?)?;
            let cert = polydisc::certify_poly(&t, tol)?;
            let spec = grid.apply(GridSpec::default());
            let mut points = Vec::new();
            for (k, z) in spec.points().into_iter().enumerate() {
                for coords in polydisc::tuple_fiber(&t, z, seed.wrapping_add(k as u64 + 1), tol)? {
                    let region = Region::classify(&coords, spec.region_band);
                    points.push(VarietyPoint { fiber_param: z, coords, region });
                }
            }
            let text = match format {
                Format::Json => {
                    let cloud = io::variety_points_to_cloud(&points, cert.verdict.label());
                    let mut v = serde_json::to_value(&cloud).unwrap();
                    v["nu_max"] = json!(cert.nu_max);
                    v["margin"] = json!(cert.margin);
                    v["compatible"] = json!(cert.compatible);
                    v["max_fiber_size"] = json!(cert.max_fiber_size);
                    v["evidence"] = json!(cert.evidence);
                    serde_json::to_string_pretty(&v).unwrap()
                }
                Format::Csv => io::variety_points_to_csv(&points),
            };
            Ok((text, out, 0))
        }
    }
}

/// xi and canonical accept either a colligation file or a triple file; the
/// triple is realized first in the latter case.
fn inner_fn_from_file(path: &Path, tol: f64) -> Result<RationalInnerFn, Failure> {
    let text = read_file(path)?;
    if let Ok(col) = io::parse_colligation(&text) {
        return Ok(RationalInnerFn::new(col, tol)?);
    }
    match io::parse_triple(&text) {
        Ok(t) => Ok(RationalInnerFn::from_triple(&t, tol)?),
        Err(e) => Err(Failure::input(format!(
            "{}: neither a colligation nor a model triple ({e})",
            path.display()
        ))),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let f = Failure { kind: "Usage".into(), message: e.to_string(), code: 2 };
            eprintln!("{}", f.to_json());
            return ExitCode::from(2);
        }
    };
    match run(cli.cmd) {
        Ok((mut text, out, code)) => {
            if !text.ends_with('\n') {
                text.push('\n');
            }
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, text.as_bytes()) {
                        let f = Failure {
                            kind: "Io".into(),
                            message: format!("{}: {e}", path.display()),
                            code: 2,
                        };
                        eprintln!("{}", f.to_json());
                        return ExitCode::from(2);
                    }
                }
                None => {
                    let stdout = std::io::stdout();
                    let mut h = stdout.lock();
                    let _ = h.write_all(text.as_bytes());
                    let _ = h.flush();
                }
            }
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.code)
        }
    }
}
