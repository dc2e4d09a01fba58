//! Command-line front end. Subcommands map onto the library entry points;
//! all diagnostics go to stderr as single-line JSON objects and the exit
//! code tells pipelines what class of failure occurred:
//!
//!   0  success
//!   1  round-trip driver found a mismatch
//!   2  argument, parse, or validation failure
//!   3  input cloud is not a valid (maximal) cloud
//!   4  reconstruction is ambiguous (full-circle cloud, undecidable aperture)
//!   5  reconstruction succeeded structurally but failed certification
//!
//! The `OMEGA_CLOUD_EPS` environment variable rescales the base tolerance
//! (default 1e-9) for robustness experiments.

mod formats;
mod render;

use clap::{Parser, Subcommand};
use formats::{FormatError, Loaded};
use omega_cloud::{
    match_polygons, maximal_cloud_with, omega_cloud_with, random_convex_polygon,
    reconstruct_aware_with, reconstruct_oblivious_with, safe_omega, CloudError, Config,
    OracleError, ReconstructError, ReconstructionResult,
};
use serde::Serialize;
use std::f64::consts::PI;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "omega-cloud",
    version,
    about = "Wedge apex loci of convex polygons: forward construction, reconstruction, and rendering"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the cloud of a polygon file for a given aperture
    Cloud {
        /// Polygon file (JSON)
        input: PathBuf,
        /// Aperture in radians, strictly between 0 and pi
        #[arg(long)]
        omega: f64,
        /// Merge co-circular neighbors and drop hidden junctions
        #[arg(long)]
        maximal: bool,
        /// Output cloud file
        #[arg(long)]
        out: PathBuf,
    },
    /// Reconstruct the polygon from a maximal cloud file
    Reconstruct {
        /// Cloud file (JSON)
        input: PathBuf,
        /// Aperture in radians; omit together with --oblivious
        #[arg(long)]
        omega: Option<f64>,
        /// Recover the aperture from the cloud alone (below a half turn)
        #[arg(long)]
        oblivious: bool,
        /// Output polygon file
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate random polygons and check both round trips
    Roundtrip {
        /// Vertex count of the generated polygons
        #[arg(long)]
        n: usize,
        /// Aperture in radians (nudged per polygon off degenerate ties)
        #[arg(long)]
        omega: f64,
        /// Base seed; polygon i uses seed + i
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of polygons
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Tamper with each serialized cloud to confirm rejection
        #[arg(long)]
        corrupt: bool,
    },
    /// Render polygon and cloud files into one SVG figure
    Render {
        /// Input files, drawn in order (polygons filled, clouds as arcs)
        inputs: Vec<PathBuf>,
        /// Output SVG path
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a random convex polygon file
    Generate {
        /// Vertex count (at least 3)
        #[arg(long)]
        n: usize,
        /// Generator seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output polygon file
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug)]
enum CliError {
    Args(String),
    Format(FormatError),
    Forward(CloudError),
    Reconstruct(ReconstructError),
    Oracle(OracleError),
    Mismatch(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Args(s) => write!(f, "{s}"),
            CliError::Format(e) => write!(f, "{e}"),
            CliError::Forward(e) => write!(f, "{e}"),
            CliError::Reconstruct(e) => write!(f, "{e}"),
            CliError::Oracle(e) => write!(f, "{e}"),
            CliError::Mismatch(s) => write!(f, "{s}"),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        CliError::Format(e)
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Oracle(e)
    }
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Args(_) => "args",
            CliError::Format(_) => "format",
            CliError::Forward(_) => "forward",
            CliError::Reconstruct(_) => "reconstruct",
            CliError::Oracle(_) => "generator",
            CliError::Mismatch(_) => "mismatch",
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Args(_) | CliError::Format(_) | CliError::Oracle(_) => 2,
            CliError::Forward(_) => 2,
            CliError::Reconstruct(e) => match e {
                ReconstructError::InvalidAperture => 2,
                ReconstructError::SingleCircleAmbiguous | ReconstructError::AmbiguousOmega => 4,
                ReconstructError::CertificationFailed => 5,
                _ => 3,
            },
            CliError::Mismatch(_) => 1,
        }
    }
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    error: &'a str,
    detail: String,
}

#[derive(Serialize)]
struct ReconstructReport {
    omega: f64,
    certified: bool,
    pivot_visits: usize,
    narrow_count: usize,
}

fn check_aperture(omega: f64) -> Result<(), CliError> {
    if omega > 0.0 && omega < PI && omega.is_finite() {
        Ok(())
    } else {
        Err(CliError::Args(format!(
            "omega out of range: {omega} (need 0 < omega < pi)"
        )))
    }
}

fn cmd_cloud(input: &Path, omega: f64, maximal: bool, out: &Path) -> Result<(), CliError> {
    check_aperture(omega)?;
    let config = Config::from_env();
    let p = formats::load_polygon(input, &config)?;
    let mut c = omega_cloud_with(&p, omega, &config).map_err(CliError::Forward)?;
    if maximal {
        c = maximal_cloud_with(&c, &config).map_err(CliError::Forward)?;
    }
    formats::save_cloud(out, &c)?;
    let total: f64 = c.arcs().iter().map(|a| a.measure).sum();
    println!(
        "{}",
        serde_json::json!({ "arcs": c.arcs().len(), "total_measure": total })
    );
    Ok(())
}

fn cmd_reconstruct(
    input: &Path,
    omega: Option<f64>,
    oblivious: bool,
    out: &Path,
) -> Result<(), CliError> {
    if omega.is_some() == oblivious {
        return Err(CliError::Args(
            "pass exactly one of --omega <radians> or --oblivious".to_string(),
        ));
    }
    let config = Config::from_env();
    let c = formats::load_cloud(input, &config)?;
    let r: ReconstructionResult = match omega {
        Some(w) => {
            check_aperture(w)?;
            reconstruct_aware_with(&c, w, &config).map_err(CliError::Reconstruct)?
        }
        None => reconstruct_oblivious_with(&c, &config).map_err(CliError::Reconstruct)?,
    };
    formats::save_polygon(out, &r.polygon)?;
    let report = ReconstructReport {
        omega: r.omega,
        certified: r.certified,
        pivot_visits: r.stats.pivot_visits,
        narrow_count: r.stats.narrow_count,
    };
    println!(
        "{}",
        serde_json::to_string(&report).expect("report serializes")
    );
    Ok(())
}

fn cmd_roundtrip(
    n: usize,
    omega: f64,
    seed: u64,
    count: usize,
    corrupt: bool,
) -> Result<(), CliError> {
    check_aperture(omega)?;
    if count == 0 {
        return Err(CliError::Args("count must be positive".to_string()));
    }
    let config = Config::from_env();
    let mut failures = 0usize;
    let mut max_vertex_err: f64 = 0.0;
    let mut max_omega_err: f64 = 0.0;
    println!(
        "{:<6} {:<4} {:<10} {:<16} {:<16}",
        "idx", "n", "omega", "aware", "oblivious"
    );
    for i in 0..count {
        let p = random_convex_polygon(n, seed.wrapping_add(i as u64))?;
        let lo = (omega - 0.02).max(0.02);
        let hi = (omega + 0.02).min(PI - 0.02);
        let w = safe_omega(&p, omega, lo, hi);
        let raw = omega_cloud_with(&p, w, &config).map_err(CliError::Forward)?;
        let maximal = maximal_cloud_with(&raw, &config).map_err(CliError::Forward)?;

        if corrupt {
            let mut file = formats::cloud_to_file(&maximal);
            file.arcs[0].measure *= 1.001;
            let status = match formats::file_to_cloud(&file, &config) {
                Err(_) => "rejected",
                Ok(tampered) => match reconstruct_aware_with(&tampered, w, &config) {
                    Err(_) => "rejected",
                    Ok(_) => "accepted",
                },
            };
            // A tampered cloud slipping through to a certified polygon
            // would be the real failure; either way the run reports red.
            failures += 1;
            println!("{:<6} {:<4} {:<10.6} corrupt {:<8} -", i, n, w, status);
            continue;
        }

        let tol = 1e-6 * maximal.scale();
        let aware_cell;
        match reconstruct_aware_with(&maximal, w, &config) {
            Ok(r) => {
                let rep = match_polygons(&p, &r.polygon, tol);
                if rep.verdict && r.certified {
                    max_vertex_err = max_vertex_err.max(rep.max_vertex_error);
                    aware_cell = format!("ok {:.2e}", rep.max_vertex_error);
                } else {
                    failures += 1;
                    aware_cell = format!("MISMATCH {:.2e}", rep.max_vertex_error);
                }
            }
            Err(e) => {
                failures += 1;
                aware_cell = format!("ERROR {e}");
            }
        }

        let obl_cell;
        if w < PI / 2.0 {
            match reconstruct_oblivious_with(&maximal, &config) {
                Ok(r) => {
                    let rep = match_polygons(&p, &r.polygon, tol);
                    let werr = (r.omega - w).abs();
                    if rep.verdict && r.certified && werr <= 1e-9 {
                        max_vertex_err = max_vertex_err.max(rep.max_vertex_error);
                        max_omega_err = max_omega_err.max(werr);
                        obl_cell = format!("ok {werr:.2e}");
                    } else {
                        failures += 1;
                        obl_cell = format!("MISMATCH {werr:.2e}");
                    }
                }
                Err(e) => {
                    failures += 1;
                    obl_cell = format!("ERROR {e}");
                }
            }
        } else {
            obl_cell = "-".to_string();
        }

        println!(
            "{:<6} {:<4} {:<10.6} {:<16} {:<16}",
            i, n, w, aware_cell, obl_cell
        );
    }
    println!(
        "max vertex error {:.3e}, max aperture error {:.3e}",
        max_vertex_err, max_omega_err
    );
    if failures == 0 {
        println!("all {count} passed");
        Ok(())
    } else {
        println!("{failures} of {count} failed");
        Err(CliError::Mismatch(format!(
            "{failures} of {count} round trips failed"
        )))
    }
}

fn cmd_render(inputs: &[PathBuf], out: &Path) -> Result<(), CliError> {
    if inputs.is_empty() {
        return Err(CliError::Args(
            "render needs at least one input file".to_string(),
        ));
    }
    let config = Config::from_env();
    let mut items: Vec<Loaded> = Vec::with_capacity(inputs.len());
    for path in inputs {
        items.push(formats::load_any(path, &config)?);
    }
    let svg = render::render_svg(&items);
    std::fs::write(out, svg).map_err(FormatError::Io)?;
    Ok(())
}

fn cmd_generate(n: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let p = random_convex_polygon(n, seed)?;
    formats::save_polygon(out, &p)?;
    println!(
        "{}",
        serde_json::json!({ "vertices": p.len(), "seed": seed })
    );
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Cloud {
            input,
            omega,
            maximal,
            out,
        } => cmd_cloud(input, *omega, *maximal, out),
        Command::Reconstruct {
            input,
            omega,
            oblivious,
            out,
        } => cmd_reconstruct(input, *omega, *oblivious, out),
        Command::Roundtrip {
            n,
            omega,
            seed,
            count,
            corrupt,
        } => cmd_roundtrip(*n, *omega, *seed, *count, *corrupt),
        Command::Render { inputs, out } => cmd_render(inputs, out),
        Command::Generate { n, seed, out } => cmd_generate(*n, *seed, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let diag = Diagnostic {
                error: e.kind(),
                detail: e.to_string(),
            };
            eprintln!(
                "{}",
                serde_json::to_string(&diag).expect("diagnostic serializes")
            );
            ExitCode::from(e.exit_code())
        }
    }
}
