use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use ppchow::checks::{acceptance_checks, property_checks, run, CheckConfig, DEFAULT_DEPTH, DEFAULT_SEED};
use ppchow::limits::{
    degree_current, delta_current, green_from_lifting, is_green, regularity_check, CurrentTower, FormModDdbar, InvariantCycle, Model,
};
use ppchow::polyhedra::{refines, standard_chain, PolyComplex, StarCenter};
use ppchow::ppfan::{self, graded_basis, PPFunction};
use ppchow::qlinalg::{fmt_rat, parse_rat, RatVec};
use ppchow::specialfiber::{affine_basis, alpha, beta, ddc_model, from_vertex_tuple, homology_presentation, AffinePP, VertexTuple};
use ppchow::Error;

#[derive(Parser)]
#[command(name = "ppchow", version, about = "Exact piecewise polynomial and arithmetic Chow computations on toric models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Degree for `basis`.
    #[arg(long, global = true, default_value_t = 1)]
    degree: i64,
    /// Number of models in materialized chains.
    #[arg(long, global = true, default_value_t = DEFAULT_DEPTH)]
    depth: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and check input files of any kind.
    Validate { files: Vec<PathBuf> },
    /// Dimension and basis of a graded piece.
    Basis {
        complex: PathBuf,
        #[arg(long, value_enum, default_value_t = Which::PpCone)]
        which: Which,
    },
    /// dd^c of a vertex tuple, as an affine PP function.
    Ddc { file: PathBuf },
    /// The delta tower of a horizontal cycle.
    Delta { file: PathBuf },
    /// The Green tower of a horizontal cycle with its certificate.
    Green { file: PathBuf },
    /// Push a value on a refinement down to a coarser model.
    Push {
        file: PathBuf,
        #[arg(long)]
        to: PathBuf,
    },
    /// Equivariant degree of a top-degree class or cycle.
    Degree { file: PathBuf },
    /// Refine a complex by a star subdivision or a common refinement.
    Refine {
        complex: PathBuf,
        /// Star-subdivide at this point of the base, e.g. `1,1`.
        #[arg(long, conflicts_with_all = ["ray", "with"])]
        point: Option<String>,
        /// Star-subdivide along this recession direction.
        #[arg(long, conflicts_with = "with")]
        ray: Option<String>,
        /// Common refinement with another complex.
        #[arg(long)]
        with: Option<PathBuf>,
    },
    /// Run a check suite and emit a pass/fail ledger.
    Check {
        #[arg(long, value_enum, default_value_t = Suite::Core)]
        suite: Suite,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    PpCone,
    Affine,
    Homology,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Core,
    Acceptance,
    Properties,
}

enum Failure {
    /// A report to print before exiting with the given code.
    Report(Value, u8),
    Input(Error),
    Internal(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Internal(_) => Failure::Internal(e),
            e => Failure::Input(e),
        }
    }
}

type CmdResult = Result<Value, Failure>;

fn io_error(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Parse(format!("{}: {e}", path.display()))
}

fn read_json(path: &Path) -> Result<Value, Error> {
    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_error(path, e))
}

fn error_kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(['(', ' ']).next().unwrap_or_default().to_string()
}

fn witness(e: &Error) -> Value {
    match e {
        Error::NotAComplex(a, b) => json!({"cells": [a, b]}),
        Error::FaceMismatch(a, b, face) => json!({"cones": [a, b], "face": face}),
        Error::FacetMismatch(a, b, face) => json!({"cells": [a, b], "face": face}),
        Error::NotInKernel(e) => json!({"edge": e}),
        Error::CompatibilityViolation(a, b) => json!({"models": [a, b]}),
        Error::NotStabilized(d) => json!({"depth": d}),
        Error::DegreeMismatch(a, b) => json!({"degrees": [a, b]}),
        Error::UnboundedEdge(c) => json!({"cell": c}),
        _ => Value::Null,
    }
}

fn diagnostic(e: &Error) -> Value {
    json!({"error": error_kind(e), "message": e.to_string(), "witness": witness(e)})
}

/// Input payloads: a complex on its own, or a value attached to a complex.
enum Input {
    Complex(Model),
    Pp(Model, PPFunction),
    Affine(Model, AffinePP),
    Tuple(Model, VertexTuple),
    Cycle(Model, InvariantCycle, Option<PPFunction>),
}

impl Input {
    fn kind(&self) -> &'static str {
        match self {
            Input::Complex(_) => "complex",
            Input::Pp(..) => "pp",
            Input::Affine(..) => "affine",
            Input::Tuple(..) => "vertex_tuple",
            Input::Cycle(..) => "cycle",
        }
    }

    fn model(&self) -> &Model {
        match self {
            Input::Complex(m) | Input::Pp(m, _) | Input::Affine(m, _) | Input::Tuple(m, _) | Input::Cycle(m, ..) => m,
        }
    }
}

fn load_complex(v: &Value, base: &Path) -> Result<Model, Error> {
    match v {
        Value::String(rel) => {
            let p = base.join(rel);
            load_complex(&read_json(&p)?, p.parent().unwrap_or(Path::new(".")))
        }
        v => Ok(Arc::new(PolyComplex::from_json(v)?)),
    }
}

fn load(path: &Path) -> Result<Input, Error> {
    let v = read_json(path)?;
    let base = path.parent().unwrap_or(Path::new("."));
    if v.get("cells").is_some() && v.get("rank").is_some() {
        return Ok(Input::Complex(load_complex(&v, base)?));
    }
    let pc = load_complex(v.get("complex").ok_or_else(|| Error::Parse("value file needs \"complex\"".into()))?, base)?;
    if let Some(p) = v.get("pp") {
        return Ok(Input::Pp(pc.clone(), PPFunction::from_json(pc.cone_over(), p)?));
    }
    if let Some(a) = v.get("affine") {
        return Ok(Input::Affine(pc.clone(), AffinePP::from_json(&pc, a)?));
    }
    if let Some(t) = v.get("vertex_tuple") {
        return Ok(Input::Tuple(pc.clone(), VertexTuple::from_json(&pc, t)?));
    }
    if let Some(c) = v.get("cycle") {
        let z = InvariantCycle::from_json(c, pc.rank())?;
        let lifting = v.get("lifting").map(|l| PPFunction::from_json(pc.cone_over(), l)).transpose()?;
        return Ok(Input::Cycle(pc, z, lifting));
    }
    Err(Error::Parse("value file needs one of \"pp\", \"affine\", \"vertex_tuple\", \"cycle\"".into()))
}

fn parse_vec(s: &str) -> Result<RatVec, Error> {
    s.split(',').map(|x| parse_rat(x.trim())).collect()
}

fn cmd_validate(files: &[PathBuf]) -> CmdResult {
    let mut all_ok = true;
    let reports: Vec<Value> = files
        .iter()
        .map(|f| match load(f) {
            Ok(input) => {
                let m = input.model();
                json!({"path": f.display().to_string(), "ok": true, "kind": input.kind(),
                       "rank": m.rank(), "vertices": m.vertices().len(), "cells": m.maximal_cells().len()})
            }
            Err(e) => {
                all_ok = false;
                json!({"path": f.display().to_string(), "ok": false, "diagnostic": diagnostic(&e)})
            }
        })
        .collect();
    let out = json!({"valid": all_ok, "files": reports});
    if all_ok {
        Ok(out)
    } else {
        Err(Failure::Report(out, 2))
    }
}

fn cmd_basis(path: &Path, which: Which, k: i64) -> CmdResult {
    let pc = match load(path)? {
        Input::Complex(pc) => pc,
        _ => return Err(Error::Parse("basis needs a complex file".into()).into()),
    };
    let (name, basis): (&str, Vec<Value>) = match which {
        Which::PpCone => ("pp-cone", graded_basis(pc.cone_over(), k).iter().map(|f| f.to_json()).collect()),
        Which::Affine => ("affine", affine_basis(&pc, k).iter().map(|f| f.to_json()).collect()),
        Which::Homology => ("homology", homology_presentation(&pc, k)?.basis.iter().map(|t| t.to_json()).collect()),
    };
    Ok(json!({"which": name, "degree": k, "dim": basis.len(), "basis": basis}))
}

fn cmd_ddc(path: &Path) -> CmdResult {
    match load(path)? {
        Input::Tuple(_, t) => {
            let d = ddc_model(&t)?;
            let a = from_vertex_tuple(&d).map_err(|e| Error::Internal(format!("dd^c image is not in ker rho: {e}")))?;
            Ok(json!({"affine": a.to_json(), "vertex_tuple": d.to_json()}))
        }
        _ => Err(Error::Parse("ddc needs a vertex_tuple file".into()).into()),
    }
}

fn horizontal_cycle(input: Input) -> Result<(Model, InvariantCycle, Option<PPFunction>), Error> {
    match input {
        Input::Cycle(pc, z, l) if z.ambient() == pc.rank() => Ok((pc, z, l)),
        Input::Cycle(..) => Err(Error::DimensionMismatch("expected a horizontal cycle".into())),
        _ => Err(Error::Parse("expected a cycle file".into())),
    }
}

fn cmd_delta(path: &Path, depth: usize) -> CmdResult {
    let (pc, z, _) = horizontal_cycle(load(path)?)?;
    let chain = standard_chain(&pc, depth)?;
    Ok(delta_current(&z, &pc)?.to_json(&chain)?)
}

fn cmd_green(path: &Path, depth: usize) -> CmdResult {
    let (pc, z, lifting) = horizontal_cycle(load(path)?)?;
    let f = match lifting {
        Some(f) => f,
        None => z.closure_on(&pc)?,
    };
    let chain = standard_chain(&pc, depth)?;
    let g = green_from_lifting(&pc, &f, &z)?;
    let cert = is_green(&g, &z, &chain)?;
    let regularity = match regularity_check(&g, &chain) {
        Ok(s) => json!({"regular": true, "model": s.model.to_json(), "value": s.value.tuple().to_json()}),
        Err(Error::NotStabilized(d)) => json!({"regular": false, "not_stabilized": d}),
        Err(e) => return Err(e.into()),
    };
    let certificate = match &cert {
        Some(s) => json!({"model": s.model.to_json(), "form": s.value.form().to_json()}),
        None => Value::Null,
    };
    let out = json!({"tower": g.to_json(&chain)?, "green": cert.is_some(), "certificate": certificate, "regularity": regularity});
    if cert.is_some() {
        Ok(out)
    } else {
        Err(Failure::Report(out, 1))
    }
}

fn cmd_push(path: &Path, to: &Path) -> CmdResult {
    let input = load(path)?;
    let target = match load(to)? {
        Input::Complex(pc) => pc,
        _ => return Err(Error::Parse("--to needs a complex file".into()).into()),
    };
    let m = refines(input.model(), &target).ok_or_else(|| Error::NotARefinement("the value's model does not refine the target".into()))?;
    let out = match input {
        Input::Pp(_, f) => json!({"pp": ppfan::pushforward(&m, &f)?.to_json()}),
        Input::Affine(_, f) => json!({"affine": beta(&m, &f)?.to_json()}),
        Input::Tuple(_, t) => json!({"vertex_tuple": alpha(&m, &t)?.to_json()}),
        _ => return Err(Error::Parse("push needs a pp, affine or vertex_tuple file".into()).into()),
    };
    Ok(out)
}

fn cmd_degree(path: &Path, depth: usize) -> CmdResult {
    let input = load(path)?;
    let pc = input.model().clone();
    let chain = standard_chain(&pc, depth)?;
    let tower = match input {
        Input::Cycle(..) => {
            let (pc, z, _) = horizontal_cycle(input)?;
            delta_current(&z, &pc)?
        }
        Input::Tuple(_, t) => CurrentTower::from_form_mod(&FormModDdbar::new(t)),
        Input::Affine(_, f) => CurrentTower::from_form(&ppchow::limits::ClosedForm::new(f)),
        _ => return Err(Error::Parse("degree needs a cycle, vertex_tuple or affine file".into()).into()),
    };
    let d = degree_current(&tower, &chain)?;
    let value = if d.degree() == 0 || d.is_zero() { Value::String(fmt_rat(&d.coeff(&vec![0; d.nvars()]))) } else { d.to_json() };
    Ok(json!({ "degree": value }))
}

fn cmd_refine(path: &Path, point: Option<&str>, ray: Option<&str>, with: Option<&Path>) -> CmdResult {
    let pc = match load(path)? {
        Input::Complex(pc) => pc,
        _ => return Err(Error::Parse("refine needs a complex file".into()).into()),
    };
    let out = match (point, ray, with) {
        (Some(p), _, _) => pc.star_subdivision(&StarCenter::Point(parse_vec(p)?))?,
        (_, Some(r), _) => pc.star_subdivision(&StarCenter::Ray(parse_vec(r)?))?,
        (_, _, Some(w)) => match load(w)? {
            Input::Complex(other) => pc.common_refinement(&other)?,
            _ => return Err(Error::Parse("--with needs a complex file".into()).into()),
        },
        _ => return Err(Error::Parse("refine needs --point, --ray or --with".into()).into()),
    };
    Ok(out.to_json())
}

fn cmd_check(suite: Suite, cfg: &CheckConfig) -> CmdResult {
    let checks = match suite {
        Suite::Core => acceptance_checks().into_iter().chain(property_checks()).collect(),
        Suite::Acceptance => acceptance_checks(),
        Suite::Properties => property_checks(),
    };
    let results = run(&checks, cfg);
    let passed = results.iter().all(|r| r.passed);
    let name = match suite {
        Suite::Core => "core",
        Suite::Acceptance => "acceptance",
        Suite::Properties => "properties",
    };
    let out = json!({
        "suite": name,
        "depth": cfg.depth,
        "seed": cfg.seed,
        "passed": passed,
        "results": results.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
    });
    if passed {
        Ok(out)
    } else {
        Err(Failure::Report(out, 1))
    }
}

fn emit(v: &Value, out: Option<&Path>) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(v).expect("JSON values serialize") + "\n";
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_error(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = CheckConfig { depth: cli.depth, seed: cli.seed };
    let result = match &cli.command {
        Command::Validate { files } => cmd_validate(files),
        Command::Basis { complex, which } => cmd_basis(complex, *which, cli.degree),
        Command::Ddc { file } => cmd_ddc(file),
        Command::Delta { file } => cmd_delta(file, cli.depth),
        Command::Green { file } => cmd_green(file, cli.depth),
        Command::Push { file, to } => cmd_push(file, to),
        Command::Degree { file } => cmd_degree(file, cli.depth),
        Command::Refine { complex, point, ray, with } => cmd_refine(complex, point.as_deref(), ray.as_deref(), with.as_deref()),
        Command::Check { suite } => cmd_check(*suite, &cfg),
    };
    let out = cli.out.as_deref();
    match result {
        Ok(v) => match emit(&v, out) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("{}", diagnostic(&e));
                ExitCode::from(2)
            }
        },
        Err(Failure::Report(v, code)) => {
            let _ = emit(&v, out);
            ExitCode::from(code)
        }
        Err(Failure::Input(e)) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("{}", diagnostic(&e));
            ExitCode::from(3)
        }
    }
}
