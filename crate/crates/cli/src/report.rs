//! The report document written by `locus` and `report`, and the text
//! renderings of every output.

use std::fmt::Write;

use serde::Serialize;
use spdfix::canonical::{RjaSignature, RjsSignature};
use spdfix::fixlocus::{locus_report, sample_point, FixedLocusDescriptor, LocusSignature, SampleRecord, SamplingOptions};
use spdfix::isometry::{EllipticityReport, IsometrySpec};
use spdfix::Tolerances;

use crate::io::{format_f64, rows, MatrixFile};

#[derive(Debug, Clone, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub const TOOL: Tool = Tool { name: "spdfix", version: env!("CARGO_PKG_VERSION") };

#[derive(Debug, Clone, Serialize)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
    pub scale: f64,
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FactorEntry {
    pub kind: String,
    pub dimension: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocusEntry {
    pub conjugator: Vec<Vec<f64>>,
    pub signature: LocusSignature,
    pub det_constraint: Option<f64>,
    pub dimension: usize,
    pub factors: Vec<FactorEntry>,
}

impl From<&FixedLocusDescriptor> for LocusEntry {
    fn from(d: &FixedLocusDescriptor) -> Self {
        Self {
            conjugator: rows(&d.conjugator),
            signature: d.signature.clone(),
            det_constraint: d.det_constraint,
            dimension: d.dimension,
            factors: d.factors.iter().map(|f| FactorEntry { kind: f.kind.to_string(), dimension: f.dimension }).collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: Tool,
    pub input: MatrixFile,
    pub tolerances: Tolerances,
    pub sampling: Sampling,
    pub classification: EllipticityReport,
    pub locus: Option<LocusEntry>,
    pub samples: Vec<SampleRecord>,
    /// Oracle dimension at the first sample.
    pub oracle_dimension: Option<usize>,
    pub verified: bool,
    pub failure: Option<String>,
    /// Sampled fixed points, written by `report` only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<Vec<f64>>>>,
}

impl ReportDocument {
    pub fn build(input: MatrixFile, spec: &IsometrySpec, opts: &SamplingOptions, tol: &Tolerances, with_points: bool) -> Self {
        let r = locus_report(spec, opts, tol);
        let points = match (&r.descriptor, with_points) {
            (Some(d), true) => Some(r.samples.iter().map(|s| rows(sample_point(d, s.seed, opts.scale).matrix())).collect()),
            _ => None,
        };
        Self {
            tool: TOOL,
            input,
            tolerances: *tol,
            sampling: Sampling { samples: opts.samples, seed: opts.seed, scale: opts.scale, tol: opts.tol },
            oracle_dimension: r.samples.first().and_then(|s| s.oracle_dimension),
            locus: r.descriptor.as_ref().map(LocusEntry::from),
            classification: r.classification,
            samples: r.samples,
            verified: r.verified,
            failure: r.failure,
            points,
        }
    }
}

fn rjs_text(s: &RjsSignature) -> String {
    let rot: Vec<String> = s.rotations.iter().map(|b| format!("({}, {})", format_f64(b.angle), b.multiplicity)).collect();
    format!("modulus {}, p {}, q {}, rotations [{}]", format_f64(s.modulus), s.p, s.q, rot.join(", "))
}

fn rja_text(s: &RjaSignature) -> String {
    let mixed: Vec<String> =
        s.mixed.iter().map(|b| format!("({}; {}, {})", format_f64(b.angle), b.mu, b.nu)).collect();
    format!("modulus {}, p {}, q {}, k {}, mixed [{}]", format_f64(s.modulus), s.p, s.q, s.k, mixed.join(", "))
}

pub fn matrix_text(m: &[Vec<f64>]) -> String {
    let mut out = String::new();
    for row in m {
        let cells: Vec<String> = row.iter().map(|&x| format!("{:>24}", format_f64(x))).collect();
        writeln!(out, "{}", cells.join(" ")).unwrap();
    }
    out
}

pub fn classification_text(r: &EllipticityReport) -> String {
    let mut out = String::new();
    writeln!(out, "family: {:?}", r.family).unwrap();
    writeln!(out, "elliptic: {}", r.elliptic).unwrap();
    writeln!(out, "reason: {:?}", r.reason).unwrap();
    if let Some(s) = &r.rjs_of {
        let of = if r.family.uses_j() { "MM^-T" } else { "M" };
        writeln!(out, "rjs signature of {of}: {}", rjs_text(s)).unwrap();
    }
    if let Some(s) = &r.rja_of_u {
        writeln!(out, "rja signature of U: {}", rja_text(s)).unwrap();
    }
    out
}

pub fn report_text(doc: &ReportDocument) -> String {
    let mut out = String::new();
    writeln!(out, "{} {}", doc.tool.name, doc.tool.version).unwrap();
    writeln!(out, "input (n {}, use_j {}, use_delta {}):", doc.input.n, doc.input.use_j.unwrap_or(false), doc.input.use_delta.unwrap_or(false)).unwrap();
    out.push_str(&matrix_text(&doc.input.data));
    let t = &doc.tolerances;
    writeln!(
        out,
        "tolerances: tol_sym {} tol_orth {} tol_pd {} tol_sing {} tol_eig {} tol_rank {} angle_gap {} right_angle_band {} modulus_ratio {} modulus_one {} det_unit {} kernel {} sweeps_per_order {}",
        format_f64(t.tol_sym), format_f64(t.tol_orth), format_f64(t.tol_pd), format_f64(t.tol_sing), format_f64(t.tol_eig),
        format_f64(t.tol_rank), format_f64(t.angle_gap), format_f64(t.right_angle_band), format_f64(t.modulus_ratio),
        format_f64(t.modulus_one), format_f64(t.det_unit), format_f64(t.kernel), t.sweeps_per_order
    )
    .unwrap();
    out.push_str(&classification_text(&doc.classification));
    if let Some(l) = &doc.locus {
        match &l.signature {
            LocusSignature::Rjs(s) => writeln!(out, "locus signature: {}", rjs_text(s)).unwrap(),
            LocusSignature::Rja(s) => writeln!(out, "locus signature: {}", rja_text(s)).unwrap(),
        }
        writeln!(out, "dimension: {}", l.dimension).unwrap();
        let factors: Vec<&str> = l.factors.iter().map(|f| f.kind.as_str()).collect();
        writeln!(out, "factors: {}", factors.join(" x ")).unwrap();
        if let Some(c) = l.det_constraint {
            writeln!(out, "det constraint: {}", format_f64(c)).unwrap();
        }
        writeln!(out, "conjugator:").unwrap();
        out.push_str(&matrix_text(&l.conjugator));
    }
    if !doc.samples.is_empty() {
        let s = &doc.sampling;
        writeln!(out, "samples (seed {}, scale {}, tol {}):", s.seed, format_f64(s.scale), format_f64(s.tol)).unwrap();
        writeln!(out, "  {:>20}  {:>24}  {:>6}", "seed", "residual", "oracle").unwrap();
        for r in &doc.samples {
            let oracle = r.oracle_dimension.map_or("-".to_string(), |d| d.to_string());
            writeln!(out, "  {:>20}  {:>24}  {:>6}", r.seed, format_f64(r.residual), oracle).unwrap();
        }
    }
    if let Some(points) = &doc.points {
        for (r, p) in doc.samples.iter().zip(points) {
            writeln!(out, "point (seed {}):", r.seed).unwrap();
            out.push_str(&matrix_text(p));
        }
    }
    if let Some(f) = &doc.failure {
        writeln!(out, "failure: {f}").unwrap();
    }
    writeln!(out, "verified: {}", doc.verified).unwrap();
    out
}
