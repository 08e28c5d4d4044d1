//! `spdfix`: classify isometries of the SPD manifold and sample and verify
//! their fixed-point loci.
//!
//! Exit codes: 0 success, 1 not elliptic or verification failed, 2 unusable
//! input.

mod io;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use spdfix::fixlocus::{membership_residual, sample_point, SamplingOptions};
use spdfix::isometry::{classify_with, IsometrySpec};
use spdfix::manifold::{distance, geodesic};
use spdfix::{SpdPoint, Tolerances};

use crate::io::{format_f64, rows, to_json, InputError, MatrixFile};
use crate::report::{classification_text, matrix_text, report_text, ReportDocument};

#[derive(Parser)]
#[command(name = "spdfix", version, about = "Fixed-point loci of elliptic isometries of the SPD manifold")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the isometry in INPUT is elliptic.
    Classify {
        input: PathBuf,
        #[command(flatten)]
        out: Output,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Describe the fixed locus and verify sampled points.
    Locus {
        input: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
        /// Write the first sampled point to this file.
        #[arg(long, value_name = "PATH")]
        emit_point: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// As `locus`, and include every sampled point in the report.
    Report {
        input: PathBuf,
        #[command(flatten)]
        sampling: SamplingArgs,
        #[command(flatten)]
        out: Output,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Check that the point in POINT is fixed by the isometry in INPUT.
    Verify {
        input: PathBuf,
        point: PathBuf,
        /// Relative residual threshold.
        #[arg(long, visible_alias = "tol-residual", default_value_t = 1e-8)]
        tol: f64,
        #[command(flatten)]
        out: Output,
        #[command(flatten)]
        tols: TolArgs,
    },
    /// Point at parameter T on the geodesic from A to B.
    Geodesic {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
        t: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Trace-metric distance between A and B.
    Distance {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args)]
struct Output {
    /// Write JSON.
    #[arg(long, conflicts_with = "text")]
    json: bool,
    /// Write plain text (default).
    #[arg(long)]
    text: bool,
}

#[derive(Args)]
struct SamplingArgs {
    #[arg(long, default_value_t = 10)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative membership residual threshold.
    #[arg(long, visible_alias = "tol-residual", default_value_t = 1e-8)]
    tol: f64,
    /// Standard deviation of the Gaussian model coordinates.
    #[arg(long, default_value_t = 0.5)]
    scale: f64,
}

impl SamplingArgs {
    fn options(&self) -> SamplingOptions {
        SamplingOptions { samples: self.samples, seed: self.seed, scale: self.scale, tol: self.tol }
    }
}

/// Overrides of the library tolerances; unset flags keep the defaults.
#[derive(Args)]
struct TolArgs {
    #[arg(long)]
    tol_eig: Option<f64>,
    #[arg(long)]
    tol_sym: Option<f64>,
    #[arg(long)]
    tol_orth: Option<f64>,
    #[arg(long)]
    tol_pd: Option<f64>,
    #[arg(long)]
    tol_sing: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    angle_gap: Option<f64>,
    #[arg(long)]
    right_angle_band: Option<f64>,
    #[arg(long)]
    modulus_ratio: Option<f64>,
    #[arg(long)]
    modulus_one: Option<f64>,
    #[arg(long)]
    det_unit: Option<f64>,
    #[arg(long)]
    tol_kernel: Option<f64>,
    #[arg(long)]
    sweeps_per_order: Option<usize>,
}

impl TolArgs {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            tol_eig: self.tol_eig.unwrap_or(d.tol_eig),
            tol_sym: self.tol_sym.unwrap_or(d.tol_sym),
            tol_orth: self.tol_orth.unwrap_or(d.tol_orth),
            tol_pd: self.tol_pd.unwrap_or(d.tol_pd),
            tol_sing: self.tol_sing.unwrap_or(d.tol_sing),
            tol_rank: self.tol_rank.unwrap_or(d.tol_rank),
            angle_gap: self.angle_gap.unwrap_or(d.angle_gap),
            right_angle_band: self.right_angle_band.unwrap_or(d.right_angle_band),
            modulus_ratio: self.modulus_ratio.unwrap_or(d.modulus_ratio),
            modulus_one: self.modulus_one.unwrap_or(d.modulus_one),
            det_unit: self.det_unit.unwrap_or(d.det_unit),
            kernel: self.tol_kernel.unwrap_or(d.kernel),
            sweeps_per_order: self.sweeps_per_order.unwrap_or(d.sweeps_per_order),
        }
    }
}

fn load_spec(path: &Path, tol: &Tolerances) -> Result<(MatrixFile, IsometrySpec), InputError> {
    let file = MatrixFile::load(path)?;
    let spec = IsometrySpec::with_tolerances(
        file.matrix(),
        file.use_j.unwrap_or(false),
        file.use_delta.unwrap_or(false),
        tol,
    )?;
    Ok((file, spec))
}

fn load_point(path: &Path, tol: &Tolerances) -> Result<SpdPoint, InputError> {
    let file = MatrixFile::load(path)?;
    SpdPoint::with_tolerances(file.matrix(), tol).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), InputError> {
    fs::write(path, text).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, InputError> {
    match cli.command {
        Command::Classify { input, out, tol } => {
            let tol = tol.tolerances();
            let (_, spec) = load_spec(&input, &tol)?;
            match classify_with(&spec, &tol) {
                Ok(r) => {
                    print!("{}", if out.json { to_json(&r) } else { classification_text(&r) });
                    Ok(if r.elliptic { 0 } else { 1 })
                }
                Err(e) => {
                    eprintln!("spdfix: classification failed: {e}");
                    Ok(1)
                }
            }
        }
        Command::Locus { input, sampling, emit_point, out, tol } => {
            let tol = tol.tolerances();
            let (file, spec) = load_spec(&input, &tol)?;
            let opts = sampling.options();
            let doc = ReportDocument::build(file, &spec, &opts, &tol, false);
            if let Some(path) = emit_point {
                let desc = spdfix::fixlocus::fix_locus_with(&spec, &tol);
                match desc {
                    Ok(d) => write_file(&path, &to_json(&MatrixFile::from_matrix(sample_point(&d, opts.seed, opts.scale).matrix())))?,
                    Err(e) => eprintln!("spdfix: no point written: {e}"),
                }
            }
            print!("{}", if out.json { to_json(&doc) } else { report_text(&doc) });
            Ok(if doc.verified { 0 } else { 1 })
        }
        Command::Report { input, sampling, out, tol } => {
            let tol = tol.tolerances();
            let (file, spec) = load_spec(&input, &tol)?;
            let doc = ReportDocument::build(file, &spec, &sampling.options(), &tol, true);
            print!("{}", if out.json { to_json(&doc) } else { report_text(&doc) });
            Ok(if doc.verified { 0 } else { 1 })
        }
        Command::Verify { input, point, tol, out, tols } => {
            let tols = tols.tolerances();
            let (_, spec) = load_spec(&input, &tols)?;
            let p = load_point(&point, &tols)?;
            let residual = membership_residual(&spec, &p)?;
            let fixed = residual <= tol;
            if out.json {
                #[derive(serde::Serialize)]
                struct Verdict {
                    residual: f64,
                    tol: f64,
                    fixed: bool,
                }
                print!("{}", to_json(&Verdict { residual, tol, fixed }));
            } else {
                println!("residual: {}", format_f64(residual));
                println!("fixed: {fixed}");
            }
            Ok(if fixed { 0 } else { 1 })
        }
        Command::Geodesic { a, b, t, out } => {
            let tol = Tolerances::default();
            let (a, b) = (load_point(&a, &tol)?, load_point(&b, &tol)?);
            let g = geodesic(&a, &b, t)?;
            if out.json {
                print!("{}", to_json(&MatrixFile::from_matrix(g.matrix())));
            } else {
                print!("{}", matrix_text(&rows(g.matrix())));
            }
            Ok(0)
        }
        Command::Distance { a, b, out } => {
            let tol = Tolerances::default();
            let (a, b) = (load_point(&a, &tol)?, load_point(&b, &tol)?);
            let d = distance(&a, &b)?;
            if out.json {
                #[derive(serde::Serialize)]
                struct Distance {
                    distance: f64,
                }
                print!("{}", to_json(&Distance { distance: d }));
            } else {
                println!("{}", format_f64(d));
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("spdfix: {e}");
            ExitCode::from(2)
        }
    }
}
