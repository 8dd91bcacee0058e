//! Batch front end: every command reads a builtin substitution (or a JSON
//! job spec) and writes one deterministic artifact to stdout or `--out`.
//!
//! Diagnostics go to stderr; errors are reported as a JSON object on
//! stdout with exit code 2 for schema/usage problems and 1 otherwise.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use solenoid::complex::{positive_cone, validate_complex, BranchedComplex};
use solenoid::geometry::{
    classify_patches, delone_metric, extract_patches, voronoi_diagram, voronoi_svg,
    voronoi_translation_classes, GroupMode, SearchGrid,
};
use solenoid::rectify::{
    commensurate_rescale, rect_svg, to_lattice_delone_1d, to_lattice_delone_2d, RectTiling,
};
use solenoid::substitution::{anderson_putnam, builtin, builtin_names, Builtin};
use solenoid::tower::{
    induced_matrix, measure_cone, unique_ergodicity, IntMatSerde, Tower, Verdict,
};
use solenoid::DeloneSet;

const SCHEMA_VERSION: &str = "0.1.0";

#[derive(Parser)]
#[command(name = "solenoid", version, about = "Substitution tilings toolbox")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Svg,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GroupArg {
    Translations,
    Isometries,
}

impl From<GroupArg> for GroupMode {
    fn from(g: GroupArg) -> Self {
        match g {
            GroupArg::Translations => GroupMode::Translations,
            GroupArg::Isometries => GroupMode::PlanarDirectIsometries,
        }
    }
}

#[derive(Args)]
struct Target {
    /// Builtin substitution name (see `gen --list`)
    #[arg(long)]
    sub: Option<String>,
    /// JSON job spec file; explicit flags override its fields
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Args)]
struct OutOpt {
    /// Output path (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the labeled control-point set of a substitution iterate
    Gen {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        /// List builtin substitutions and exit
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Voronoi tiling of the control points, with translation classes
    Voronoi {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Classify radius-T patches of the control points
    Patches {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        radius: Option<f64>,
        #[arg(long, value_enum, default_value = "translations")]
        group: GroupArg,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Quotient cell complex of the substitution, with validation
    Complex {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        collared: bool,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Top cycle space and its nonnegative extremal rays
    Homology {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        collared: bool,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Push the measure cone down the tower and report its Hilbert diameter
    Measures {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        collared: bool,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Unique ergodicity verdict with a contraction certificate
    Ergodicity {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        collared: bool,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Rescale a box tiling onto the integer lattice, with certificate
    Rectify {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        depth: Option<usize>,
        #[command(flatten)]
        out: OutOpt,
    },
    /// Matching-metric upper bound between two stored point sets
    Metric {
        /// Two Delone-set JSON files
        #[arg(long, num_args = 1, action = clap::ArgAction::Append)]
        input: Vec<PathBuf>,
        #[arg(long, value_enum, default_value = "translations")]
        group: GroupArg,
        #[command(flatten)]
        out: OutOpt,
    },
}

// ---------------------------------------------------------------------------
// errors

struct CliError {
    kind: &'static str,
    message: String,
    code: u8,
}

impl CliError {
    fn schema(message: impl Into<String>) -> Self {
        CliError { kind: "schema", message: message.into(), code: 2 }
    }

    fn module(message: impl Into<String>) -> Self {
        CliError { kind: "module", message: message.into(), code: 1 }
    }

    fn io(message: impl Into<String>) -> Self {
        CliError { kind: "io", message: message.into(), code: 1 }
    }
}

macro_rules! from_module_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::module(e.to_string())
            }
        }
    )*};
}

from_module_error!(
    solenoid::substitution::SubstitutionError,
    solenoid::tower::TowerError,
    solenoid::geometry::GeometryError,
    solenoid::rectify::RectifyError,
    solenoid::complex::ComplexError
);

// ---------------------------------------------------------------------------
// job spec

/// Optional parameters loadable from `--spec FILE`; unknown keys are
/// rejected so typos fail loudly.
#[derive(Default)]
struct JobSpec {
    sub: Option<String>,
    depth: Option<usize>,
    tol: Option<f64>,
    radius: Option<f64>,
    collared: Option<bool>,
    group: Option<GroupArg>,
    matrices: Option<Vec<Vec<Vec<i64>>>>,
    inputs: Option<Vec<String>>,
}

fn load_spec(path: &PathBuf) -> Result<JobSpec, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::schema(format!("spec is not valid JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::schema("spec must be a JSON object"))?;
    let mut spec = JobSpec::default();
    for (key, v) in obj {
        match key.as_str() {
            "sub" => {
                spec.sub = Some(
                    v.as_str()
                        .ok_or_else(|| CliError::schema("spec.sub must be a string"))?
                        .to_string(),
                )
            }
            "depth" => {
                spec.depth = Some(
                    v.as_u64()
                        .ok_or_else(|| CliError::schema("spec.depth must be a nonnegative integer"))?
                        as usize,
                )
            }
            "tol" => {
                spec.tol =
                    Some(v.as_f64().ok_or_else(|| CliError::schema("spec.tol must be a number"))?)
            }
            "radius" => {
                spec.radius = Some(
                    v.as_f64().ok_or_else(|| CliError::schema("spec.radius must be a number"))?,
                )
            }
            "collared" => {
                spec.collared = Some(
                    v.as_bool()
                        .ok_or_else(|| CliError::schema("spec.collared must be a boolean"))?,
                )
            }
            "group" => {
                spec.group = Some(match v.as_str() {
                    Some("translations") => GroupArg::Translations,
                    Some("isometries") => GroupArg::Isometries,
                    _ => {
                        return Err(CliError::schema(
                            "spec.group must be \"translations\" or \"isometries\"",
                        ))
                    }
                })
            }
            "matrices" => {
                let mats: Vec<Vec<Vec<i64>>> = serde_json::from_value(v.clone()).map_err(|_| {
                    CliError::schema("spec.matrices must be an array of integer matrices")
                })?;
                for m in &mats {
                    let cols = m.first().map_or(0, Vec::len);
                    if m.is_empty() || cols == 0 || m.iter().any(|r| r.len() != cols) {
                        return Err(CliError::schema("spec.matrices entries must be rectangular"));
                    }
                    if m.iter().flatten().any(|&x| x < 0) {
                        return Err(CliError::schema("spec.matrices entries must be nonnegative"));
                    }
                }
                spec.matrices = Some(mats);
            }
            "inputs" => {
                let inputs: Vec<String> = serde_json::from_value(v.clone()).map_err(|_| {
                    CliError::schema("spec.inputs must be an array of file paths")
                })?;
                spec.inputs = Some(inputs);
            }
            other => return Err(CliError::schema(format!("unknown spec key {other:?}"))),
        }
    }
    Ok(spec)
}

// ---------------------------------------------------------------------------
// shared plumbing

fn check_threads_env() -> Result<(), CliError> {
    if let Ok(v) = std::env::var("SOLENOID_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| CliError::schema(format!("SOLENOID_THREADS must be an integer, got {v:?}")))?;
        if n == 0 {
            return Err(CliError::schema("SOLENOID_THREADS must be positive"));
        }
        // all pipelines here are single-threaded; the cap is recorded only
        eprintln!("threads capped at {n}");
    }
    Ok(())
}

fn resolve_target(target: &Target) -> Result<(Option<String>, JobSpec), CliError> {
    let spec = match &target.spec {
        Some(path) => load_spec(path)?,
        None => JobSpec::default(),
    };
    let name = target.sub.clone().or_else(|| spec.sub.clone());
    Ok((name, spec))
}

fn require_name(name: Option<String>) -> Result<String, CliError> {
    name.ok_or_else(|| {
        CliError::schema(format!(
            "no substitution given: pass --sub NAME or a spec file; builtins are {}",
            builtin_names().join(", ")
        ))
    })
}

/// Control points of the n-th iterate; 1D seeds from the first letter,
/// 2D from the rectangle-free single-tile patch.
fn delone_for(name: &str, depth: usize) -> Result<DeloneSet, CliError> {
    match builtin(name)? {
        Builtin::OneD(s) => Ok(s.to_delone(0, depth)?),
        Builtin::TwoD(s) => {
            let patch = s.iterate(&s.initial_patch(0), depth)?;
            Ok(s.to_delone(&patch)?)
        }
    }
}

/// Complex and self-map data for a builtin, 1D collaring optional.
fn complex_for(
    name: &str,
    collared: bool,
) -> Result<(BranchedComplex, IntMatSerde), CliError> {
    match builtin(name)? {
        Builtin::OneD(s) => {
            let ap = anderson_putnam(&s, collared)?;
            let (subm, _) = ap.self_submersion();
            let m = induced_matrix(&subm)?;
            Ok((ap.complex, m.a))
        }
        Builtin::TwoD(s) => {
            if collared {
                return Err(CliError::schema("--collared is only available in one dimension"));
            }
            let ap = s.anderson_putnam()?;
            let (subm, _) = ap.self_submersion();
            let m = induced_matrix(&subm)?;
            Ok((ap.complex, m.a))
        }
    }
}

fn tower_for(name: Option<String>, spec: &JobSpec, collared: bool) -> Result<Tower, CliError> {
    if let Some(mats) = &spec.matrices {
        let matrices = mats
            .iter()
            .map(|m| {
                let rows: Vec<Vec<u64>> =
                    m.iter().map(|r| r.iter().map(|&x| x as u64).collect()).collect();
                IntMatSerde(solenoid::linalg::IntMat::from_u64(&rows))
            })
            .collect();
        return Ok(Tower::Explicit { matrices });
    }
    let name = require_name(name)?;
    let (complex, matrix) = complex_for(&name, collared)?;
    Ok(Tower::Stationary { matrix, complex: Some(complex) })
}

fn write_output(out: &Option<PathBuf>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, body)
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(body.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::io(e.to_string()))
        }
    }
}

fn pretty(mut value: Value) -> String {
    if let Some(obj) = value.as_object_mut() {
        obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    }
    let mut s = serde_json::to_string_pretty(&value).expect("serializable");
    s.push('\n');
    s
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Unique => json!("unique"),
        Verdict::Multiple(k) => json!({ "multiple": k }),
        Verdict::Undecided => json!("undecided"),
    }
}

/// Hilbert diameters can legitimately be infinite (rays on the orthant
/// boundary); JSON has no Infinity, so encode those as "inf".
fn diam_json(d: f64) -> Value {
    if d.is_finite() {
        json!(d)
    } else {
        json!("inf")
    }
}

fn diams_json(ds: &[f64]) -> Value {
    Value::Array(ds.iter().copied().map(diam_json).collect())
}

fn bigint_json(x: &num_bigint::BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn set_json(set: &DeloneSet) -> Value {
    serde_json::from_str(&set.to_json()).expect("set serializes")
}

fn unsupported_format(cmd: &str, format: &str) -> CliError {
    CliError::schema(format!("{cmd} does not support --format {format}"))
}

// ---------------------------------------------------------------------------
// commands

fn run(cli: Cli) -> Result<(), CliError> {
    check_threads_env()?;
    match cli.cmd {
        Cmd::Gen { target, depth, list, out } => {
            if list {
                let body = pretty(json!({ "builtins": builtin_names() }));
                return write_output(&out.out, &body);
            }
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let depth = depth.or(spec.depth).unwrap_or(4);
            let set = delone_for(&name, depth)?;
            eprintln!("generated {} points for {name} at depth {depth}", set.points.len());
            let body = match out.format {
                Format::Json => pretty(json!({
                    "sub": name,
                    "depth": depth,
                    "set": set_json(&set),
                })),
                Format::Csv => {
                    let mut s = String::from(if set.dim == 1 { "x,label\n" } else { "x,y,label\n" });
                    for (i, p) in set.points.iter().enumerate() {
                        let coords: Vec<String> =
                            p.coords.iter().map(|c| format!("{c}")).collect();
                        s.push_str(&format!(
                            "{},{}\n",
                            coords.join(","),
                            set.label(i).unwrap_or("")
                        ));
                    }
                    s
                }
                Format::Svg => return Err(unsupported_format("gen", "svg")),
            };
            write_output(&out.out, &body)
        }
        Cmd::Voronoi { target, depth, tol, out } => {
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let depth = depth.or(spec.depth).unwrap_or(4);
            let tol = tol.or(spec.tol).unwrap_or(1e-9);
            let set = delone_for(&name, depth)?;
            let diagram = voronoi_diagram(&set)?;
            let classes = voronoi_translation_classes(&diagram, &set.points, tol);
            eprintln!(
                "{} cells, {} translation classes",
                diagram.cells.len(),
                classes.len()
            );
            let body = match out.format {
                Format::Json => pretty(json!({
                    "sub": name,
                    "depth": depth,
                    "dim": diagram.dim,
                    "cells": diagram.cells.iter().map(|c| json!({
                        "site": c.site,
                        "vertices": c.vertices,
                        "clipped": c.clipped,
                        "neighbors": c.neighbors,
                    })).collect::<Vec<_>>(),
                    "adjacency": diagram.adjacency,
                    "translation_classes": classes,
                })),
                Format::Svg => {
                    if set.dim != 2 {
                        return Err(unsupported_format("voronoi (1d)", "svg"));
                    }
                    voronoi_svg(&diagram, &set)
                }
                Format::Csv => return Err(unsupported_format("voronoi", "csv")),
            };
            write_output(&out.out, &body)
        }
        Cmd::Patches { target, depth, radius, group, tol, out } => {
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let depth = depth.or(spec.depth).unwrap_or(4);
            let radius = radius.or(spec.radius).unwrap_or(2.0);
            let tol = tol.or(spec.tol).unwrap_or(1e-9);
            // an explicit non-default flag wins over the spec file
            let group = match group {
                GroupArg::Translations => spec.group.unwrap_or(group),
                other => other,
            };
            let set = delone_for(&name, depth)?;
            let patches = extract_patches(&set, radius);
            let classes = classify_patches(&patches, group.into(), tol);
            eprintln!("{} patches in {} classes", patches.len(), classes.len());
            let body = match out.format {
                Format::Json => pretty(json!({
                    "sub": name,
                    "depth": depth,
                    "radius": radius,
                    "num_patches": patches.len(),
                    "classes": classes.iter().map(|c| json!({
                        "size": c.len(),
                        "members": c,
                        "representative_offsets": patches[c[0]].offsets.iter().map(|(o, l)| json!({
                            "offset": o,
                            "label": l,
                        })).collect::<Vec<_>>(),
                    })).collect::<Vec<_>>(),
                })),
                Format::Csv => {
                    let mut s = String::from("class,size\n");
                    for (i, c) in classes.iter().enumerate() {
                        s.push_str(&format!("{i},{}\n", c.len()));
                    }
                    s
                }
                Format::Svg => return Err(unsupported_format("patches", "svg")),
            };
            write_output(&out.out, &body)
        }
        Cmd::Complex { target, collared, out } => {
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let collared = collared || spec.collared.unwrap_or(false);
            let (complex, matrix) = complex_for(&name, collared)?;
            let report = validate_complex(&complex);
            eprintln!(
                "{} top cells, valid: {}",
                complex.top_cell_count(),
                report.valid
            );
            if out.format != Format::Json {
                return Err(unsupported_format("complex", "csv/svg"));
            }
            let body = pretty(json!({
                "sub": name,
                "collared": collared,
                "complex": serde_json::from_str::<Value>(&complex.to_json())
                    .expect("complex serializes"),
                "transition_matrix": serde_json::to_value(&matrix).expect("matrix serializes"),
                "validation": serde_json::to_value(&report).expect("report serializes"),
            }));
            write_output(&out.out, &body)
        }
        Cmd::Homology { target, collared, out } => {
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let collared = collared || spec.collared.unwrap_or(false);
            let (complex, _) = complex_for(&name, collared)?;
            let cone = positive_cone(&complex);
            eprintln!(
                "cycle space dim {}, {} extremal rays",
                cone.cycle_basis.len(),
                cone.extremal_rays.len()
            );
            if out.format != Format::Json {
                return Err(unsupported_format("homology", "csv/svg"));
            }
            let body = pretty(json!({
                "sub": name,
                "collared": collared,
                "dim_cycle_space": cone.cycle_basis.len(),
                "cycle_basis": cone.cycle_basis.iter().map(|v| {
                    v.iter().map(|x| x.to_string()).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
                "rays": cone.extremal_rays.iter().map(|r| {
                    r.iter().map(bigint_json).collect::<Vec<_>>()
                }).collect::<Vec<_>>(),
            }));
            write_output(&out.out, &body)
        }
        Cmd::Measures { target, depth, tol, collared, out } => {
            let (name, spec) = resolve_target(&target)?;
            let collared = collared || spec.collared.unwrap_or(false);
            let depth = depth.or(spec.depth).unwrap_or(30);
            let tol = tol.or(spec.tol).unwrap_or(1e-8);
            let tower = tower_for(name.clone(), &spec, collared)?;
            let report = measure_cone(&tower, depth, tol)?;
            eprintln!(
                "{} rays at depth {depth}, diameter {:.3e}",
                report.rays_at_depth.len(),
                report.hilbert_diameter
            );
            let body = match out.format {
                Format::Json => pretty(json!({
                    "sub": name,
                    "depth": report.depth,
                    "tol": tol,
                    "verdict": verdict_json(&report.verdict),
                    "frequencies": report.frequencies,
                    "hilbert_diameter": diam_json(report.hilbert_diameter),
                    "diameter_sequence": diams_json(&report.diameter_sequence),
                })),
                Format::Csv => {
                    let mut s = String::from("ray,component,frequency\n");
                    for (i, f) in report.frequencies.iter().enumerate() {
                        for (j, x) in f.iter().enumerate() {
                            s.push_str(&format!("{i},{j},{x}\n"));
                        }
                    }
                    s
                }
                Format::Svg => return Err(unsupported_format("measures", "svg")),
            };
            write_output(&out.out, &body)
        }
        Cmd::Ergodicity { target, depth, tol, collared, out } => {
            let (name, spec) = resolve_target(&target)?;
            let collared = collared || spec.collared.unwrap_or(false);
            let depth = depth.or(spec.depth).unwrap_or(30);
            let tol = tol.or(spec.tol).unwrap_or(1e-8);
            let tower = tower_for(name.clone(), &spec, collared)?;
            let report = unique_ergodicity(&tower, depth, tol)?;
            eprintln!("verdict: {:?}", report.verdict);
            if out.format != Format::Json {
                return Err(unsupported_format("ergodicity", "csv/svg"));
            }
            // a unique verdict flattens to one frequency vector (the rays
            // agree to within the verdict tolerance)
            let frequencies = match (&report.verdict, report.cone.frequencies.first()) {
                (Verdict::Unique, Some(f)) => json!(f),
                _ => json!(report.cone.frequencies),
            };
            let body = pretty(json!({
                "sub": name,
                "depth": report.cone.depth,
                "tol": tol,
                "verdict": verdict_json(&report.verdict),
                "frequencies": frequencies,
                "hilbert_diameter": diam_json(report.cone.hilbert_diameter),
                "diameter_sequence": diams_json(&report.cone.diameter_sequence),
                "certificate": serde_json::to_value(&report.certificate)
                    .expect("certificate serializes"),
            }));
            write_output(&out.out, &body)
        }
        Cmd::Rectify { target, depth, out } => {
            let (name, spec) = resolve_target(&target)?;
            let name = require_name(name)?;
            let depth = depth.or(spec.depth).unwrap_or(6);
            let result = match builtin(&name)? {
                Builtin::OneD(s) => {
                    if out.format == Format::Svg {
                        return Err(unsupported_format("rectify (1d)", "svg"));
                    }
                    to_lattice_delone_1d(&s, 0, depth)?
                }
                Builtin::TwoD(s) => {
                    let patch = s.iterate(&s.initial_patch(0), depth)?;
                    if out.format == Format::Svg {
                        let tiling = RectTiling::from_square_patch(&s, &patch)?;
                        let map = commensurate_rescale(&tiling, false);
                        return write_output(&out.out, &rect_svg(&tiling, &map));
                    }
                    to_lattice_delone_2d(&s, &patch)?
                }
            };
            eprintln!(
                "{} lattice points, labels preserved: {}",
                result.set.points.len(),
                result.certificate.labels_equal
            );
            if out.format != Format::Json {
                return Err(unsupported_format("rectify", "csv"));
            }
            let body = pretty(json!({
                "sub": name,
                "depth": depth,
                "certificate": {
                    "dim": result.certificate.dim,
                    "labels_equal": result.certificate.labels_equal,
                    "shift": result.certificate.shift.iter()
                        .map(|r| r.to_string()).collect::<Vec<_>>(),
                    "note": result.certificate.note,
                },
                "fibration": {
                    "tau": result.fibration.tau.to_string(),
                    "corner_residues": result.fibration.corner_residues.iter()
                        .map(|v| v.iter().map(|r| r.to_string()).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "samples_checked": result.fibration.samples_checked,
                    "commutes": result.fibration.commutes,
                },
                "set": set_json(&result.set),
            }));
            write_output(&out.out, &body)
        }
        Cmd::Metric { input, group, out } => {
            if input.len() != 2 {
                return Err(CliError::schema(format!(
                    "metric needs exactly two --input files, got {}",
                    input.len()
                )));
            }
            let load = |p: &PathBuf| -> Result<DeloneSet, CliError> {
                let text = fs::read_to_string(p)
                    .map_err(|e| CliError::io(format!("cannot read {}: {e}", p.display())))?;
                DeloneSet::from_json(&text)
                    .map_err(|e| CliError::schema(format!("{}: {e}", p.display())))
            };
            let a = load(&input[0])?;
            let b = load(&input[1])?;
            let grid = SearchGrid {
                epsilons: vec![0.025, 0.05, 0.1, 0.2, 0.25, 0.5],
                shift_steps: 8,
                angle_steps: 8,
                group: group.into(),
                match_tol: 1e-6,
            };
            let result = delone_metric(&a, &b, &grid)?;
            eprintln!("metric upper bound {}", result.value);
            if out.format != Format::Json {
                return Err(unsupported_format("metric", "csv/svg"));
            }
            let body = pretty(json!({
                "value": result.value,
                "untestable": result.untestable,
            }));
            write_output(&out.out, &body)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = json!({ "error": { "kind": e.kind, "message": e.message } });
            println!("{}", serde_json::to_string(&payload).expect("error serializes"));
            ExitCode::from(e.code)
        }
    }
}
