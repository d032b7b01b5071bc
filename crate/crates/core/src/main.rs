use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value as Json};

use bellkit::constructions::{
    counterfactual_completion, epr_deterministic_completion, epr_grid_model, example1_model,
    hall_brans_model, point_mass, pr_box_model, uniform_dist, CompletionResult,
};
use bellkit::decide::ks::{bundled_uncolorable_directions, ks_colorable, KsResult};
use bellkit::decide::lhv::{decide_lhv, LhvResult};
use bellkit::decide::lp::Rat;
use bellkit::decide::mdl::{decide_mdl, mdl_threshold, JointDistribution, MdlResult};
use bellkit::decide::vcs::{check_value_assignment, AssignmentResult};
use bellkit::error::{Error, Result};
use bellkit::hvmodel::Condition;
use bellkit::io;
use bellkit::quantum;
use bellkit::sample;
use bellkit::value::{format_rational, parse_rational};

#[derive(Parser)]
#[command(
    name = "bellkit",
    version,
    about = "Generate, check, and decide two/three-party correlation models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a bundled construction as a JSON document.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Check λ-level conditions of a model document.
    Check {
        /// Model JSON file.
        model: PathBuf,
        /// Comma-separated subset of pi,oi,lc,det,mi,ac (default: all).
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<String>,
        /// Emit the machine-readable report.
        #[arg(long)]
        json: bool,
    },
    /// Run a decision procedure on a document.
    Decide {
        #[command(subcommand)]
        mode: DecideMode,
    },
    /// Run a pre-wired pipeline and report whether the verdicts match the
    /// expected pattern.
    Reproduce {
        /// One of prop1, prop3-example1, lemma, prop4-5, prop6-ghz,
        /// prop6-prbox-pairs, prop7.
        id: String,
        #[arg(long, default_value_t = sample::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Nonlocal box model: ½δ_{ab,(−1)^{jk}} responses for every λ.
    PrBox {
        #[arg(long, default_value_t = 1)]
        lambdas: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Discretized position–momentum model on Z_N (single λ).
    EprGrid {
        #[arg(long, default_value_t = 8)]
        n: usize,
        /// "uniform" or "point:k".
        #[arg(long, default_value = "uniform")]
        mu: String,
        #[arg(long, default_value = "uniform")]
        nu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Deterministic phase-space completion of the grid model.
    EprComplete {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value = "uniform")]
        mu: String,
        #[arg(long, default_value = "uniform")]
        nu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flattened two-stage one-way-signalling singlet model.
    Example1 {
        /// JSON file with a list of unit 3-vectors (default: z, x, diagonal).
        #[arg(long)]
        directions: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement-dependent deterministic model of a target behavior.
    HallBrans {
        #[arg(long)]
        behavior: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Singlet statistics over two direction lists (float behavior).
    Singlet {
        #[arg(long)]
        directions_a: Option<PathBuf>,
        #[arg(long)]
        directions_b: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parity-state value-assignment constraint system.
    Ghz {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spin-1 pair statistics over orthogonal triples (float behavior).
    Spin1 {
        /// JSON file with a list of triples of 3-vectors (default: two
        /// built-in triples).
        #[arg(long)]
        triples: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum DecideMode {
    /// Local-polytope membership of a behavior.
    Lhv {
        input: PathBuf,
        /// Round a float behavior to rationals with this many decimal digits.
        #[arg(long)]
        rationalize: Option<u32>,
        #[arg(long)]
        json: bool,
    },
    /// Floor-ℓ setting-dependent model membership of a joint distribution.
    Mdl {
        input: PathBuf,
        /// Rational floor, e.g. "1/4".
        #[arg(long)]
        l: String,
        #[arg(long)]
        json: bool,
    },
    /// Bisect the largest feasible floor for a joint distribution.
    MdlThreshold {
        input: PathBuf,
        /// Rational interval width, e.g. "1/1000".
        #[arg(long)]
        precision: String,
        #[arg(long)]
        json: bool,
    },
    /// Satisfiability of a value-assignment constraint system.
    Assignment {
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// 101-colorability of a direction set.
    Ks {
        /// JSON list of 3-vectors; omit with --bundled.
        input: Option<PathBuf>,
        /// Use the bundled 33-direction set.
        #[arg(long)]
        bundled: bool,
        #[arg(long)]
        json: bool,
    },
}

fn parse_dist(spec: &str, n: usize) -> Result<Vec<Rat>> {
    if spec == "uniform" {
        return Ok(uniform_dist(n));
    }
    if let Some(k) = spec.strip_prefix("point:") {
        let k: usize = k
            .parse()
            .map_err(|_| Error::Validation(format!("bad point index in \"{spec}\"")))?;
        if k >= n {
            return Err(Error::Validation(format!("point index {k} out of range 0..{n}")));
        }
        return Ok(point_mass(n, k));
    }
    Err(Error::Validation(format!(
        "distribution must be \"uniform\" or \"point:k\", got \"{spec}\""
    )))
}

fn emit(doc: &Json, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => io::write_json(path, doc),
        None => {
            println!("{}", serde_json::to_string_pretty(doc)?);
            Ok(())
        }
    }
}

fn default_example1_directions() -> Vec<[f64; 3]> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [r, 0.0, r]]
}

fn default_singlet_directions() -> (Vec<[f64; 3]>, Vec<[f64; 3]>) {
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
    (
        vec![quantum::xz_direction(0.0), quantum::xz_direction(FRAC_PI_2)],
        vec![
            quantum::xz_direction(FRAC_PI_4),
            quantum::xz_direction(3.0 * FRAC_PI_4),
        ],
    )
}

fn default_spin1_triples() -> Vec<[[f64; 3]; 3]> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![
        [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        [[r, r, 0.0], [r, -r, 0.0], [0.0, 0.0, 1.0]],
    ]
}

fn load_directions(path: &Path) -> Result<Vec<[f64; 3]>> {
    io::directions_from_json(&io::read_json(path)?)
}

fn load_triples(path: &Path) -> Result<Vec<[[f64; 3]; 3]>> {
    let doc = io::read_json(path)?;
    doc.as_array()
        .ok_or_else(|| Error::Validation("triples are a JSON list of direction triples".into()))?
        .iter()
        .map(|t| {
            let dirs = io::directions_from_json(t)?;
            if dirs.len() != 3 {
                return Err(Error::Validation("each triple has exactly three directions".into()));
            }
            Ok([dirs[0], dirs[1], dirs[2]])
        })
        .collect()
}

fn cmd_generate(kind: GenerateKind) -> Result<i32> {
    match kind {
        GenerateKind::PrBox { lambdas, out } => {
            let m = pr_box_model(lambdas)?;
            emit(&io::model_to_json(&m), out.as_deref())?;
        }
        GenerateKind::EprGrid { n, mu, nu, out } => {
            let m = epr_grid_model(n, &parse_dist(&mu, n)?, &parse_dist(&nu, n)?)?;
            emit(&io::model_to_json(&m), out.as_deref())?;
        }
        GenerateKind::EprComplete { n, mu, nu, out } => {
            let m = epr_deterministic_completion(n, &parse_dist(&mu, n)?, &parse_dist(&nu, n)?)?;
            emit(&io::model_to_json(&m), out.as_deref())?;
        }
        GenerateKind::Example1 { directions, out } => {
            let dirs = match directions {
                Some(p) => load_directions(&p)?,
                None => default_example1_directions(),
            };
            let m = example1_model(&dirs)?.flatten();
            emit(&io::model_to_json(&m), out.as_deref())?;
        }
        GenerateKind::HallBrans { behavior, out } => {
            let b = io::behavior_from_json(&io::read_json(&behavior)?)?;
            let m = hall_brans_model(&b)?;
            emit(&io::model_to_json(&m), out.as_deref())?;
        }
        GenerateKind::Singlet { directions_a, directions_b, out } => {
            let (da, db) = match (directions_a, directions_b) {
                (Some(a), Some(b)) => (load_directions(&a)?, load_directions(&b)?),
                (None, None) => default_singlet_directions(),
                _ => {
                    return Err(Error::Validation(
                        "give both direction files or neither".into(),
                    ))
                }
            };
            let b = quantum::singlet_behavior(&da, &db)?;
            emit(&io::behavior_to_json(&b), out.as_deref())?;
        }
        GenerateKind::Ghz { out } => {
            let sys = quantum::ghz_constraint_system()?;
            emit(&io::vcs_to_json(&sys), out.as_deref())?;
        }
        GenerateKind::Spin1 { triples, out } => {
            let t = match triples {
                Some(p) => load_triples(&p)?,
                None => default_spin1_triples(),
            };
            let b = quantum::spin_one_pair_behavior(&t)?;
            emit(&io::behavior_to_json(&b), out.as_deref())?;
        }
    }
    Ok(0)
}

fn cmd_check(model: &Path, conditions: &[String], as_json: bool) -> Result<i32> {
    let m = io::model_from_json(&io::read_json(model)?)?;
    let requested: Vec<Condition> = if conditions.is_empty() {
        vec![
            Condition::ParameterIndependence,
            Condition::OutcomeIndependence,
            Condition::LocalCausality,
            Condition::Determinism,
            Condition::MeasurementIndependence,
            Condition::AccessibleChoice,
        ]
    } else {
        conditions
            .iter()
            .map(|c| Condition::from_short(c))
            .collect::<Result<_>>()?
    };
    let mut all_pass = true;
    let mut rows = Vec::new();
    for c in requested {
        let report = m.check(c)?;
        let pass = report.passes();
        all_pass &= pass;
        if as_json {
            rows.push(json!({
                "condition": c.short(),
                "verdict": if pass { "pass" } else { "fail" },
                "witnesses": report.witnesses.iter().map(|w| json!({
                    "location": w.location,
                    "lhs": w.lhs.to_f64(),
                    "rhs": w.rhs.to_f64(),
                    "deviation": w.deviation.to_f64(),
                })).collect::<Vec<_>>(),
            }));
        } else {
            println!("{}: {}", c.short(), if pass { "pass" } else { "fail" });
            if let Some(w) = report.witnesses.first() {
                println!("  witness: {} ({} vs {})", w.location, w.lhs, w.rhs);
            }
        }
    }
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "check",
                "input": model.display().to_string(),
                "results": rows,
            }))?
        );
    }
    Ok(if all_pass { 0 } else { 1 })
}

fn functional_to_json(f: &bellkit::decide::lhv::BellFunctional) -> Json {
    json!({
        "coefficients": f.coefficients.iter().map(|((s, o), c)| json!({
            "x": s[0], "y": s[1], "a": o[0], "b": o[1],
            "c": format_rational(c),
        })).collect::<Vec<_>>(),
        "local_bound": format_rational(&f.local_bound),
    })
}

fn report(as_json: bool, doc: Json, human: &str) -> Result<()> {
    if as_json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{human}");
    }
    Ok(())
}

fn cmd_decide(mode: DecideMode) -> Result<i32> {
    match mode {
        DecideMode::Lhv { input, rationalize, json: as_json } => {
            let b = io::behavior_from_json(&io::read_json(&input)?)?;
            let b = if b.mode.is_exact() {
                b
            } else {
                match rationalize {
                    Some(digits) => io::to_exact_behavior(&b, digits)?,
                    None => {
                        return Err(Error::ExactnessRequired(
                            "float behavior: pass --rationalize <digits>".into(),
                        ))
                    }
                }
            };
            match decide_lhv(&b)? {
                LhvResult::Local { weights } => {
                    report(
                        as_json,
                        json!({
                            "command": "decide lhv",
                            "verdict": "feasible",
                            "support": weights.len(),
                            "weights": weights.iter().map(|(st, w)| json!({
                                "choices": st.choices,
                                "weight": format_rational(w),
                            })).collect::<Vec<_>>(),
                        }),
                        &format!("feasible: mixture of {} deterministic strategies", weights.len()),
                    )?;
                    Ok(0)
                }
                LhvResult::Nonlocal { functional, value, .. } => {
                    report(
                        as_json,
                        json!({
                            "command": "decide lhv",
                            "verdict": "infeasible",
                            "functional": functional_to_json(&functional),
                            "value": format_rational(&value),
                        }),
                        &format!(
                            "infeasible: functional value {} exceeds local bound {}",
                            value, functional.local_bound
                        ),
                    )?;
                    Ok(1)
                }
            }
        }
        DecideMode::Mdl { input, l, json: as_json } => {
            let joint = io::joint_from_json(&io::read_json(&input)?)?;
            let ell = parse_rational(&l)?;
            match decide_mdl(&joint, &ell)? {
                MdlResult::Feasible(m) => {
                    report(
                        as_json,
                        json!({
                            "command": "decide mdl",
                            "floor": format_rational(&ell),
                            "verdict": "feasible",
                            "lambdas": m.lambdas.len(),
                        }),
                        &format!("feasible at floor {ell}: model with {} λ", m.lambdas.len()),
                    )?;
                    Ok(0)
                }
                MdlResult::Infeasible(cert) => {
                    report(
                        as_json,
                        json!({
                            "command": "decide mdl",
                            "floor": format_rational(&ell),
                            "verdict": "infeasible",
                            "multipliers": cert.farkas.row_multipliers.iter()
                                .map(format_rational).collect::<Vec<_>>(),
                        }),
                        &format!("infeasible at floor {ell} (verified multiplier certificate)"),
                    )?;
                    Ok(1)
                }
            }
        }
        DecideMode::MdlThreshold { input, precision, json: as_json } => {
            let joint = io::joint_from_json(&io::read_json(&input)?)?;
            let prec = parse_rational(&precision)?;
            let t = mdl_threshold(&joint, &prec)?;
            report(
                as_json,
                json!({
                    "command": "decide mdl-threshold",
                    "precision": format_rational(&prec),
                    "feasible": format_rational(&t.feasible),
                    "infeasible": format_rational(&t.infeasible),
                }),
                &format!(
                    "largest feasible floor lies in [{}, {}]",
                    t.feasible, t.infeasible
                ),
            )?;
            Ok(0)
        }
        DecideMode::Assignment { input, json: as_json } => {
            let sys = io::vcs_from_json(&io::read_json(&input)?)?;
            match check_value_assignment(&sys)? {
                AssignmentResult::Satisfiable(a) => {
                    let named: Vec<String> = a
                        .iter()
                        .enumerate()
                        .map(|(v, &o)| {
                            format!("{}={}", sys.variables[v].name, sys.variables[v].alphabet[o])
                        })
                        .collect();
                    report(
                        as_json,
                        json!({
                            "command": "decide assignment",
                            "verdict": "satisfiable",
                            "assignment": named,
                        }),
                        &format!("satisfiable: {}", named.join(", ")),
                    )?;
                    Ok(0)
                }
                AssignmentResult::Unsat(cert) => {
                    report(
                        as_json,
                        json!({
                            "command": "decide assignment",
                            "verdict": "unsatisfiable",
                            "assignments_checked": cert.assignments_checked,
                            "parity_obstruction": cert.parity_obstruction,
                            "constraints": cert.constraints,
                        }),
                        &format!(
                            "unsatisfiable after exhausting {} assignments{}",
                            cert.assignments_checked,
                            match &cert.parity_obstruction {
                                Some(subset) => format!(
                                    " (parity obstruction over constraints {subset:?})"
                                ),
                                None => String::new(),
                            }
                        ),
                    )?;
                    Ok(1)
                }
            }
        }
        DecideMode::Ks { input, bundled, json: as_json } => {
            let dirs = match (input, bundled) {
                (Some(p), false) => load_directions(&p)?,
                (None, true) => bundled_uncolorable_directions(),
                _ => {
                    return Err(Error::Validation(
                        "give a directions file or --bundled, not both".into(),
                    ))
                }
            };
            match ks_colorable(&dirs)? {
                KsResult::Colorable(coloring) => {
                    report(
                        as_json,
                        json!({
                            "command": "decide ks",
                            "verdict": "colorable",
                            "zeros": coloring.iter().enumerate()
                                .filter(|(_, &z)| z).map(|(i, _)| i).collect::<Vec<_>>(),
                        }),
                        &format!(
                            "colorable: {} of {} directions colored 0",
                            coloring.iter().filter(|&&z| z).count(),
                            coloring.len()
                        ),
                    )?;
                    Ok(0)
                }
                KsResult::Uncolorable(cert) => {
                    report(
                        as_json,
                        json!({
                            "command": "decide ks",
                            "verdict": "uncolorable",
                            "branches_explored": cert.branches_explored,
                            "pairs": cert.structure.pairs.len(),
                            "triples": cert.structure.triples.len(),
                        }),
                        &format!(
                            "uncolorable: exhausted {} branches over {} orthogonal triples",
                            cert.branches_explored,
                            cert.structure.triples.len()
                        ),
                    )?;
                    Ok(1)
                }
            }
        }
    }
}

struct Reproduction {
    steps: Vec<(String, bool)>,
}

impl Reproduction {
    fn new() -> Reproduction {
        Reproduction { steps: Vec::new() }
    }

    fn step(&mut self, label: impl Into<String>, ok: bool) {
        self.steps.push((label.into(), ok));
    }

    fn matched(&self) -> bool {
        self.steps.iter().all(|(_, ok)| *ok)
    }
}

fn reproduce_prop1() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let box_model = pr_box_model(1)?;
    r.step("box model: parameter independence", box_model.check_parameter_independence()?.passes());
    r.step("box model: determinism fails", !box_model.check_determinism()?.passes());
    let b = box_model.reconstruct_behavior()?;
    r.step(
        "box behavior: four perfectly correlated pairs",
        b.find_perfect_correlations()?.len() == 4,
    );
    let n = 8;
    let grid = epr_grid_model(n, &uniform_dist(n), &uniform_dist(n))?;
    r.step("grid model: parameter independence", grid.check_parameter_independence()?.passes());
    r.step("grid model: determinism fails", !grid.check_determinism()?.passes());
    let gb = grid.reconstruct_behavior()?;
    let pcs = gb.find_perfect_correlations()?;
    let q_ok = pcs
        .iter()
        .any(|p| p.x == 0 && p.y == 0 && p.map == (0..n).map(|q| (n - q) % n).collect::<Vec<_>>());
    let p_ok = pcs.iter().any(|p| p.x == 1 && p.y == 1 && p.map == (0..n).collect::<Vec<_>>());
    r.step("grid behavior: Q pair q1+q2 ≡ 0", q_ok);
    r.step("grid behavior: P pair p1 = p2", p_ok);
    Ok(r)
}

fn reproduce_example1() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let m = example1_model(&default_example1_directions())?;
    let d = m.disturbance_report()?;
    r.step("region-B statistics invariant under A's setting", d.b_stats_deviation <= 1e-12);
    r.step("region-A ontic distribution depends on y", d.a_ontic_y_dependence.is_some());
    let uniform_b = (0..m.directions.len())
        .all(|y| m.region_b_premeasurement_dist(y) == vec![0.5, 0.5]);
    r.step("region-B pre-measurement distribution uniform", uniform_b);
    let flat = m.flatten();
    let direct = m.behavior();
    let rb = flat.reconstruct_behavior()?;
    let mut max_dev: f64 = 0.0;
    for s in rb.scenario.joint_settings() {
        for o in rb.scenario.joint_outcomes(&s) {
            max_dev = max_dev
                .max((rb.get(&s, &o)?.to_f64() - direct.get(&s, &o)?.to_f64()).abs());
        }
    }
    r.step("flattened model reproduces ¼(1 − ab x·y)", max_dev <= 1e-9);
    r.step("flattened model is not locally causal", !flat.check_local_causality()?.passes());
    Ok(r)
}

fn reproduce_lemma(seed: u64) -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let report = sample::run_lemma_suite(seed, 1000)?;
    r.step("1000 random conditionals stay deterministic", report.all_preserved());
    r.step("zero-probability guard triggered", report.incompatible_guards > 0);
    Ok(r)
}

fn reproduce_prop4_5() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let n = 8;
    let b = epr_grid_model(n, &uniform_dist(n), &uniform_dist(n))?.reconstruct_behavior()?;
    let pairs: Vec<_> = b
        .find_perfect_correlations()?
        .into_iter()
        .filter(|p| p.x == p.y)
        .collect();
    r.step("Q and P pairs found", pairs.len() == 2);
    match counterfactual_completion(&b, &pairs)? {
        CompletionResult::Completed(m) => {
            r.step("completion exists", true);
            r.step("completion deterministic", m.check_determinism()?.passes());
            r.step("completion parameter-independent", m.check_parameter_independence()?.passes());
            r.step("completion passes accessible choice", m.check_accessible_choice()?.passes());
        }
        CompletionResult::Contradiction(_) => r.step("completion exists", false),
    }
    Ok(r)
}

fn reproduce_prop6_ghz() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let sys = quantum::ghz_constraint_system()?;
    match check_value_assignment(&sys)? {
        AssignmentResult::Unsat(cert) => {
            r.step("constraint system unsatisfiable", true);
            r.step("64-assignment exhaustion", cert.assignments_checked == 64);
            r.step("parity obstruction detected", cert.parity_obstruction.is_some());
        }
        AssignmentResult::Satisfiable(_) => r.step("constraint system unsatisfiable", false),
    }
    for drop in 0..sys.constraints.len() {
        let mut reduced = sys.clone();
        reduced.constraints.remove(drop);
        let sat = matches!(check_value_assignment(&reduced)?, AssignmentResult::Satisfiable(_));
        r.step(format!("dropping constraint {drop} restores satisfiability"), sat);
    }
    Ok(r)
}

fn reproduce_prop6_prbox() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let b = bellkit::scenario::pr_box_behavior();
    let pairs = b.find_perfect_correlations()?;
    r.step("four perfectly correlated pairs", pairs.len() == 4);
    match counterfactual_completion(&b, &pairs)? {
        CompletionResult::Contradiction(cert) => {
            r.step("joint assignment contradiction", true);
            r.step("16-assignment exhaustion", cert.assignments_checked == 16);
        }
        CompletionResult::Completed(_) => r.step("joint assignment contradiction", false),
    }
    Ok(r)
}

fn singlet_chsh_joint(digits: u32) -> Result<JointDistribution> {
    let (da, db) = default_singlet_directions();
    let b = quantum::singlet_behavior(&da, &db)?;
    JointDistribution::with_uniform_settings(b.rationalize(digits)?)
}

fn reproduce_prop7() -> Result<Reproduction> {
    let mut r = Reproduction::new();
    let box_joint = JointDistribution::with_uniform_settings(bellkit::scenario::pr_box_behavior())?;
    r.step(
        "box joint feasible at floor 0",
        matches!(decide_mdl(&box_joint, &Rat::from_integer(0.into()))?, MdlResult::Feasible(_)),
    );
    r.step(
        "box joint infeasible at floor 1/4",
        matches!(
            decide_mdl(&box_joint, &Rat::new(1.into(), 4.into()))?,
            MdlResult::Infeasible(_)
        ),
    );
    let t = mdl_threshold(&box_joint, &Rat::new(1.into(), 1000.into()))?;
    r.step("box threshold bracket is monotone-consistent", t.feasible <= t.infeasible);
    let singlet = singlet_chsh_joint(6)?;
    r.step(
        "rationalized singlet joint infeasible at floor 1/4",
        matches!(
            decide_mdl(&singlet, &Rat::new(1.into(), 4.into()))?,
            MdlResult::Infeasible(_)
        ),
    );
    match decide_lhv(&singlet.behavior)? {
        LhvResult::Nonlocal { functional, value, .. } => {
            r.step(
                "rationalized singlet violates a verified functional",
                value > functional.local_bound,
            );
        }
        LhvResult::Local { .. } => r.step("rationalized singlet violates a verified functional", false),
    }
    Ok(r)
}

fn cmd_reproduce(id: &str, seed: u64, as_json: bool) -> Result<i32> {
    let r = match id {
        "prop1" => reproduce_prop1()?,
        "prop3-example1" => reproduce_example1()?,
        "lemma" => reproduce_lemma(seed)?,
        "prop4-5" => reproduce_prop4_5()?,
        "prop6-ghz" => reproduce_prop6_ghz()?,
        "prop6-prbox-pairs" => reproduce_prop6_prbox()?,
        "prop7" => reproduce_prop7()?,
        other => return Err(Error::Validation(format!("unknown reproduction id \"{other}\""))),
    };
    if as_json {
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({
                "command": "reproduce",
                "id": id,
                "seed": seed,
                "steps": r.steps.iter().map(|(label, ok)| json!({
                    "step": label,
                    "ok": ok,
                })).collect::<Vec<_>>(),
                "match": r.matched(),
            }))?
        );
    } else {
        for (label, ok) in &r.steps {
            println!("{}: {}", label, if *ok { "ok" } else { "MISMATCH" });
        }
        println!("{}: {}", id, if r.matched() { "match" } else { "mismatch" });
    }
    Ok(if r.matched() { 0 } else { 1 })
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate { kind } => cmd_generate(kind),
        Command::Check { model, conditions, json } => cmd_check(&model, &conditions, json),
        Command::Decide { mode } => cmd_decide(mode),
        Command::Reproduce { id, seed, json } => cmd_reproduce(&id, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
