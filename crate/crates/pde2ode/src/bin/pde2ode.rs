//! Command-line front end: parse → rif → initdata → ode →
//! {integrate | polysolve | liestructure | probe}, with deterministic
//! text/JSON/CSV output.
//!
//! Exit codes: 0 success; 1 usage error; 2 parse error; 3 inconsistent
//! system; 4 infinite-dimensional solution space where finiteness is
//! required; 5 numerical failure (pivot, eigenvalue, projection); 6
//! iteration cap reached under `--strict`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use pde2ode::dae::{
    check_consistent_point, integrate_along_curve, CurveSpec, Trajectory, DEFAULT_GUARD,
    DEFAULT_POINT_TOL,
};
use pde2ode::diffpoly::Rational;
use pde2ode::elimination::{probe_pivot_case, rif, RifForm, RifStatus, DEFAULT_PROLONGATION_CAP};
use pde2ode::error::Error;
use pde2ode::initial_data::{is_finite_dimensional, parametric_derivatives};
use pde2ode::lie::{resolve_basis, structure_constants, VectorFieldSpec};
use pde2ode::ode_reduce::{check_formal_compatibility, reduce_to_parametric_ode};
use pde2ode::parse::{
    parse_f64_assignments, parse_rational_assignments, parse_system, SystemSource,
};
use pde2ode::ranking::Ranking;
use pde2ode::render::{
    initdata_to_json, initdata_to_text, lie_to_json, lie_to_text, multiplication_to_json,
    ode_to_json, ode_to_text, poly_to_text, rif_to_json, rif_to_text, roots_to_json, SCHEMA,
};
use pde2ode::zero_dim::{build_multiplication_matrices, poly_to_diff, solve_zero_dim};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Parser, Debug)]
#[command(
    name = "pde2ode",
    about = "Reduce PDE systems to canonical form, initial data, and parametric ODE systems; \
             solve zero-dimensional polynomial systems; integrate constrained ODE systems; \
             compute Lie-algebra structure constants.",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// input system in .pde format
    file: PathBuf,
    /// prolongation-order margin for the completion
    #[arg(long, default_value_t = DEFAULT_PROLONGATION_CAP)]
    cap: u32,
    /// treat an iteration-capped completion as a failure (exit 6)
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Complete a system to canonical form (rules, constraints, inequations)
    Rif {
        #[command(flatten)]
        common: Common,
    },
    /// Initial data: parametric derivatives and finite-dimensionality
    Initdata {
        #[command(flatten)]
        common: Common,
    },
    /// Parametric first-order ODE system on constraints, with a formal
    /// compatibility report
    Ode {
        #[command(flatten)]
        common: Common,
    },
    /// Integrate the parametric ODE system along straight-line curves
    Integrate {
        #[command(flatten)]
        common: Common,
        /// initial states, e.g. "u=2,u_x=1,u_y=1"
        #[arg(long)]
        state: String,
        /// start point, e.g. "x=0,y=0"
        #[arg(long)]
        from: String,
        /// direction vector, e.g. "1,0"; repeat for chained legs
        #[arg(long = "dir", required = true)]
        dirs: Vec<String>,
        /// sample index at which each chained leg restarts (one per extra --dir)
        #[arg(long = "continue-from")]
        continue_from: Vec<usize>,
        #[arg(long, default_value_t = 0.01)]
        h: f64,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        /// disable Gauss-Newton projection onto the constraints
        #[arg(long)]
        no_project: bool,
        /// pivot guard: abort when any inequation magnitude falls below this
        #[arg(long, default_value_t = DEFAULT_GUARD)]
        guard: f64,
        /// consistency tolerance for the initial point
        #[arg(long, default_value_t = DEFAULT_POINT_TOL)]
        tol: f64,
    },
    /// Solve a zero-dimensional polynomial system via multiplication matrices
    Polysolve {
        #[command(flatten)]
        common: Common,
        /// clustering tolerance for eigenvalue coordinates
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// seed for the random shear and inverse iteration
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
    /// Structure constants of the symmetry Lie algebra
    Liestructure {
        #[command(flatten)]
        common: Common,
        /// assignment of coefficients to directions, e.g. "xi:x,eta:y"
        #[arg(long)]
        vf: String,
        /// expansion point, e.g. "x0=0,y0=2" (exact rationals)
        #[arg(long)]
        point: String,
        /// basis order as comma-separated parametric names, e.g.
        /// "eta,xi,eta_y,eta_x,eta_xx"; default is listing order
        #[arg(long)]
        basis: Option<String>,
        /// report the linearizability verdict for this ODE order
        #[arg(long)]
        order: Option<usize>,
    },
    /// Consistency verdicts for the discarded pivot = 0 branches
    Probe {
        #[command(flatten)]
        common: Common,
        /// probe only the k-th recorded inequation (1-based); default all
        #[arg(long)]
        pivot: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Syntax { .. } | Error::UnknownSymbol(_) | Error::BadArity(_) => 2,
        Error::Inconsistent | Error::InconsistentPoint(_) => 3,
        Error::Infinite => 4,
        Error::Pivot { .. }
        | Error::EigenFail
        | Error::ProjectFail(_)
        | Error::PivotAtPoint(_)
        | Error::DivZero => 5,
        _ => 1,
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(&e))
}

fn load(file: &PathBuf) -> Result<SystemSource, Error> {
    let text = std::fs::read_to_string(file).map_err(|io| Error::Syntax {
        line: 0,
        col: 0,
        expected: "readable input file".into(),
        found: format!("{}: {io}", file.display()),
    })?;
    parse_system(&text)
}

enum Capped {
    No(RifForm),
    Strict,
}

fn complete(src: &SystemSource, common: &Common) -> Result<Capped, Error> {
    let ranking = Ranking::grlex(src.signature.n_indep(), src.signature.n_dep().max(1));
    let f = rif(src, &ranking, common.cap)?;
    if f.status == RifStatus::IterationCapped {
        if common.strict {
            eprintln!("error: completion stopped at the iteration cap (strict mode)");
            return Ok(Capped::Strict);
        }
        eprintln!("warning: completion stopped at the iteration cap; output may be incomplete");
    }
    Ok(Capped::No(f))
}

fn assignments_to_vec(
    text: &str,
    names: &[String],
    what: &str,
) -> Result<Vec<f64>, Error> {
    let pairs = parse_f64_assignments(text)?;
    let mut out = vec![f64::NAN; names.len()];
    for (name, val) in pairs {
        let k = names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::UnknownSymbol(format!("{what} `{name}`")))?;
        out[k] = val;
    }
    if let Some(k) = out.iter().position(|v| v.is_nan()) {
        return Err(Error::Invalid(format!("{what} `{}` not assigned", names[k])));
    }
    Ok(out)
}

fn parse_direction(text: &str, n: usize) -> Result<Vec<f64>, Error> {
    let parts: Result<Vec<f64>, _> = text.split(',').map(|s| s.trim().parse::<f64>()).collect();
    let d = parts.map_err(|_| Error::Invalid(format!("bad direction `{text}`")))?;
    if d.len() != n || d.iter().all(|x| *x == 0.0) {
        return Err(Error::Invalid(format!(
            "direction needs {n} components, not all zero"
        )));
    }
    Ok(d)
}

fn trajectory_csv(out: &mut String, sys_states: &[String], indep: &[String], legs: &[Trajectory]) {
    out.push_str("leg,t");
    for x in indep {
        out.push_str(&format!(",{x}"));
    }
    for s in sys_states {
        out.push_str(&format!(",{s}"));
    }
    out.push_str(",max_drift,min_pivot\n");
    for (leg, tr) in legs.iter().enumerate() {
        for (k, s) in tr.samples.iter().enumerate() {
            out.push_str(&format!("{leg},{}", s.t));
            for x in &s.x {
                out.push_str(&format!(",{x}"));
            }
            for v in &s.v {
                out.push_str(&format!(",{v}"));
            }
            out.push_str(&format!(",{},{}\n", tr.drift[k], tr.pivot_margin[k]));
        }
    }
}

fn trajectory_json(legs: &[Trajectory]) -> serde_json::Value {
    serde_json::json!({
        "schema": SCHEMA,
        "legs": legs.iter().map(|tr| serde_json::json!({
            "samples": tr.samples.iter().enumerate().map(|(k, s)| serde_json::json!({
                "t": s.t, "x": s.x, "v": s.v,
                "max_drift": tr.drift[k],
                "min_pivot": tr.pivot_margin[k],
            })).collect::<Vec<_>>(),
        })).collect::<Vec<_>>(),
    })
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.cmd {
        Cmd::Rif { common } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            match common.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rif_to_json(&f)).expect("json")),
                _ => print!("{}", rif_to_text(&f)),
            }
        }
        Cmd::Initdata { common } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let finite = is_finite_dimensional(&f);
            let id = parametric_derivatives(&f)?;
            match common.format {
                Format::Json => {
                    let mut j = initdata_to_json(&id, &f.signature);
                    j["finite_dimensional"] = serde_json::json!(finite);
                    println!("{}", serde_json::to_string_pretty(&j).expect("json"));
                }
                _ => {
                    print!("{}", initdata_to_text(&id, &f.signature));
                    println!("finite-dimensional: {finite} (dimension {})", id.dimension());
                }
            }
        }
        Cmd::Ode { common } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let sys = reduce_to_parametric_ode(&f)?;
            let report = check_formal_compatibility(&sys);
            match common.format {
                Format::Json => {
                    let mut j = ode_to_json(&sys);
                    j["compatible"] = serde_json::json!(report.is_compatible());
                    j["compatibility_residuals"] = serde_json::json!(report
                        .residuals
                        .iter()
                        .map(|r| format!(
                            "state {} pair ({},{}): {}",
                            sys.state_names()[r.state],
                            sys.signature.indep_names[r.pair.0],
                            sys.signature.indep_names[r.pair.1],
                            poly_to_text(&r.residual, &sys.signature)
                        ))
                        .collect::<Vec<_>>());
                    println!("{}", serde_json::to_string_pretty(&j).expect("json"));
                }
                _ => {
                    print!("{}", ode_to_text(&sys));
                    println!("formally compatible: {}", report.is_compatible());
                    for r in &report.residuals {
                        println!(
                            "residual (state {}, pair {},{}): {}",
                            sys.state_names()[r.state],
                            sys.signature.indep_names[r.pair.0],
                            sys.signature.indep_names[r.pair.1],
                            poly_to_text(&r.residual, &sys.signature)
                        );
                    }
                }
            }
        }
        Cmd::Integrate {
            common,
            state,
            from,
            dirs,
            continue_from,
            h,
            steps,
            no_project,
            guard,
            tol,
        } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let sys = reduce_to_parametric_ode(&f)?;
            let indep = sys.signature.indep_names.clone();
            let states: Vec<String> = sys.state_names().to_vec();
            let x0 = assignments_to_vec(&from, &indep, "independent variable")?;
            let v0 = assignments_to_vec(&state, &states, "state")?;
            if continue_from.len() + 1 != dirs.len() {
                return Err(Error::Invalid(
                    "each extra --dir needs a matching --continue-from sample index".into(),
                ));
            }
            let violations = check_consistent_point(&sys, &x0, &v0, tol, guard)?;
            if !violations.is_empty() {
                return Err(Error::InconsistentPoint(violations.join("; ")));
            }
            let mut legs: Vec<Trajectory> = Vec::new();
            let mut start = x0;
            let mut v = v0;
            for (leg, dir) in dirs.iter().enumerate() {
                let direction = parse_direction(dir, indep.len())?;
                let curve = CurveSpec {
                    start: start.clone(),
                    direction,
                    h,
                    steps,
                };
                let tr = integrate_along_curve(&sys, &curve, &v, !no_project, guard)?;
                if leg < continue_from.len() {
                    let k = continue_from[leg];
                    let s = tr.samples.get(k).ok_or_else(|| {
                        Error::Invalid(format!("--continue-from {k} exceeds {} samples", tr.samples.len()))
                    })?;
                    start = s.x.clone();
                    v = s.v.clone();
                }
                legs.push(tr);
            }
            match common.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&trajectory_json(&legs)).expect("json")
                ),
                Format::Csv => {
                    let mut out = String::new();
                    trajectory_csv(&mut out, &states, &indep, &legs);
                    print!("{out}");
                }
                Format::Text => {
                    for (leg, tr) in legs.iter().enumerate() {
                        let last = tr.samples.last().unwrap();
                        let max_drift = tr.drift.iter().cloned().fold(0.0, f64::max);
                        let min_pivot = tr.pivot_margin.iter().cloned().fold(f64::INFINITY, f64::min);
                        println!(
                            "leg {leg}: {} steps to t = {}, final state {:?}, max drift {:.3e}, min pivot {:.3e}",
                            tr.samples.len() - 1,
                            last.t,
                            last.v,
                            max_drift,
                            min_pivot
                        );
                    }
                }
            }
        }
        Cmd::Polysolve { common, tol, seed } => {
            let src = load(&common.file)?;
            let pde = poly_to_diff(&src)?;
            let f = match complete(&pde, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let sys = reduce_to_parametric_ode(&f)?;
            let ms = build_multiplication_matrices(&sys)?;
            let roots = solve_zero_dim(&ms, &src.equations, tol, seed)?;
            match common.format {
                Format::Json => {
                    let mut j = roots_to_json(&roots, ms.dimension());
                    j["multiplication"] = multiplication_to_json(&ms, &f.signature);
                    println!("{}", serde_json::to_string_pretty(&j).expect("json"));
                }
                _ => {
                    println!("quotient dimension: {}", ms.dimension());
                    println!(
                        "root clusters: {} (total multiplicity {})",
                        roots.roots.len(),
                        roots.total_multiplicity()
                    );
                    for r in &roots.roots {
                        let coords: Vec<String> = r
                            .coords
                            .iter()
                            .map(|z| format!("{:+.6}{:+.6}i", z.re, z.im))
                            .collect();
                        println!(
                            "  ({}) multiplicity {} residual {:.3e}",
                            coords.join(", "),
                            r.multiplicity,
                            r.residual
                        );
                    }
                }
            }
        }
        Cmd::Liestructure {
            common,
            vf,
            point,
            basis,
            order,
        } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let id = parametric_derivatives(&f)?;
            let spec = VectorFieldSpec::parse(&vf, &f.signature)?;
            let pairs = parse_rational_assignments(&point)?;
            let mut coords: Vec<Option<Rational>> = vec![None; f.signature.n_indep()];
            for (name, val) in pairs {
                let k = id
                    .point_symbols
                    .iter()
                    .position(|s| *s == name || s.replace('_', "") == name)
                    .or_else(|| f.signature.indep_names.iter().position(|s| *s == name))
                    .ok_or_else(|| Error::UnknownSymbol(format!("point symbol `{name}`")))?;
                coords[k] = Some(val);
            }
            let point: Vec<Rational> = coords
                .into_iter()
                .enumerate()
                .map(|(k, v)| {
                    v.ok_or_else(|| {
                        Error::Invalid(format!(
                            "point symbol `{}` not assigned",
                            id.point_symbols[k]
                        ))
                    })
                })
                .collect::<Result<_, _>>()?;
            let names: Option<Vec<String>> = basis
                .map(|b| b.split(',').map(|s| s.trim().to_string()).collect());
            let basis = resolve_basis(&id, &f.signature, names.as_deref())?;
            let sc = structure_constants(&f, &id, &spec, &point, &basis)?;
            match common.format {
                Format::Json => println!(
                    "{}",
                    serde_json::to_string_pretty(&lie_to_json(&sc, order)).expect("json")
                ),
                _ => print!("{}", lie_to_text(&sc, order)),
            }
        }
        Cmd::Probe { common, pivot } => {
            let src = load(&common.file)?;
            let f = match complete(&src, &common)? {
                Capped::No(f) => f,
                Capped::Strict => return Ok(ExitCode::from(6)),
            };
            let ranking = Ranking::grlex(src.signature.n_indep(), src.signature.n_dep().max(1));
            let indices: Vec<usize> = match pivot {
                Some(k) => {
                    if k == 0 || k > f.inequations.len() {
                        return Err(Error::Invalid(format!(
                            "--pivot {k} out of range (1..={})",
                            f.inequations.len()
                        )));
                    }
                    vec![k - 1]
                }
                None => (0..f.inequations.len()).collect(),
            };
            if f.inequations.is_empty() {
                println!("no pivots were recorded");
            }
            for k in indices {
                let g = &f.inequations[k];
                let verdict = probe_pivot_case(&src, g, &ranking, common.cap);
                println!(
                    "pivot {}: {} = 0 branch is {}",
                    k + 1,
                    poly_to_text(g, &src.signature),
                    verdict
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(e),
    }
}
