//! Executable counterexamples and constructive arguments: the PR-box model,
//! the discretized position–momentum model and its deterministic phase-space
//! completion, the one-way-signalling sequential ontic model, the
//! measurement-dependent deterministic model for arbitrary correlations, and
//! counterfactual completion from perfect correlations.

use num_traits::{One, Signed, Zero};

use crate::decide::lp::{rat, solve_lp, ConstraintOp, LinearProgram, LpResult, Rat};
use crate::decide::strategies::{enumerate_deterministic_strategies, DeterministicStrategy, DEFAULT_STRATEGY_CAP};
use crate::error::{Error, Result};
use crate::hvmodel::{uniform_weight, HiddenVariableModel};
use crate::scenario::{Behavior, JointSetting, Party, PerfectCorrelation, Scenario, Setting};
use crate::value::{Value, ValueMode, DEFAULT_TOL};

/// Witness that a constraint subset admits no deterministic value assignment.
/// Replaying the constraints against all assignments confirms unsatisfiability.
#[derive(Clone, Debug)]
pub struct ContradictionCertificate {
    /// Human-readable constraint descriptions.
    pub constraints: Vec<String>,
    /// Size of the exhausted search transcript.
    pub assignments_checked: u64,
    /// Indices of a parity-constraint subset whose signs multiply to −1,
    /// when such an obstruction was detected.
    pub parity_obstruction: Option<Vec<usize>>,
}

/// The PR-box model: response ½δ_{ab,(−1)^{jk}} for every λ, uniform prior and
/// setting weights. Passes parameter independence, fails determinism.
pub fn pr_box_model(n_lambda: usize) -> Result<HiddenVariableModel> {
    if n_lambda == 0 {
        return Err(Error::Validation("n_lambda must be at least 1".into()));
    }
    let scenario = Scenario::chsh();
    let w = uniform_weight(&scenario);
    let model = HiddenVariableModel::from_fns(
        scenario,
        ValueMode::Exact,
        (0..n_lambda).map(|i| format!("λ{i}")).collect(),
        |_| Value::exact(1, n_lambda as i64),
        move |_, _| w.clone(),
        |s, _, o| {
            let a = if o[0] == 0 { 1i8 } else { -1 };
            let b = if o[1] == 0 { 1i8 } else { -1 };
            let target = if s[0] == 1 && s[1] == 1 { -1 } else { 1 };
            if a * b == target {
                Value::exact(1, 2)
            } else {
                Value::exact_int(0)
            }
        },
    );
    model.validate()?;
    Ok(model)
}

fn check_distribution(name: &str, dist: &[Rat], n: usize) -> Result<()> {
    if dist.len() != n {
        return Err(Error::Validation(format!("{name} must have {n} entries")));
    }
    if dist.iter().any(|p| p.is_negative()) {
        return Err(Error::Validation(format!("{name} has a negative entry")));
    }
    let total: Rat = dist.iter().fold(Rat::zero(), |acc, p| acc + p);
    if !total.is_one() {
        return Err(Error::Validation(format!("{name} sums to {total}, not 1")));
    }
    Ok(())
}

/// Scenario for the discretized position–momentum correlations: settings
/// Q_1/P_1 versus Q_2/P_2, outcomes in Z_N.
pub fn epr_scenario(n: usize) -> Scenario {
    let outcomes: Vec<String> = (0..n).map(|i| i.to_string()).collect();
    Scenario {
        parties: vec![
            Party {
                label: "A".into(),
                settings: vec![
                    Setting { label: "Q_1".into(), outcomes: outcomes.clone() },
                    Setting { label: "P_1".into(), outcomes: outcomes.clone() },
                ],
            },
            Party {
                label: "B".into(),
                settings: vec![
                    Setting { label: "Q_2".into(), outcomes: outcomes.clone() },
                    Setting { label: "P_2".into(), outcomes },
                ],
            },
        ],
    }
}

/// Discretized position–momentum model on Z_N: positions sum to 0 mod N,
/// momenta agree, mixed pairs respond with the product μ⊗ν. Single λ.
pub fn epr_grid_model(n: usize, mu: &[Rat], nu: &[Rat]) -> Result<HiddenVariableModel> {
    if n < 2 {
        return Err(Error::Validation("grid size must be at least 2".into()));
    }
    check_distribution("mu", mu, n)?;
    check_distribution("nu", nu, n)?;
    let scenario = epr_scenario(n);
    let w = uniform_weight(&scenario);
    let mu = mu.to_vec();
    let nu = nu.to_vec();
    let model = HiddenVariableModel::from_fns(
        scenario,
        ValueMode::Exact,
        vec!["λ0".into()],
        |_| Value::exact_int(1),
        move |_, _| w.clone(),
        move |s, _, o| {
            let (a, b) = (o[0], o[1]);
            let p = match (s[0], s[1]) {
                // (Q_1, Q_2): q_1 + q_2 ≡ 0 mod N.
                (0, 0) => {
                    if (a + b) % n == 0 {
                        mu[a].clone()
                    } else {
                        Rat::zero()
                    }
                }
                // (Q_1, P_2): product response.
                (0, 1) => &mu[a] * &nu[b],
                // (P_1, Q_2): ν(p_1)·μ(−q_2).
                (1, 0) => &nu[a] * &mu[(n - b) % n],
                // (P_1, P_2): p_1 ≡ p_2.
                (1, 1) => {
                    if a == b {
                        nu[a].clone()
                    } else {
                        Rat::zero()
                    }
                }
                _ => unreachable!(),
            };
            Value::Exact(p)
        },
    );
    model.validate()?;
    Ok(model)
}

/// Deterministic phase-space completion: λ ranges over grid points (q_1, p_1)
/// weighted μ(q_1)ν(p_1); responses are point masses with q_2 = −q_1 and
/// p_2 = p_1. Passes determinism and parameter independence and reconstructs
/// the same behavior as `epr_grid_model` exactly.
pub fn epr_deterministic_completion(n: usize, mu: &[Rat], nu: &[Rat]) -> Result<HiddenVariableModel> {
    if n < 2 {
        return Err(Error::Validation("grid size must be at least 2".into()));
    }
    check_distribution("mu", mu, n)?;
    check_distribution("nu", nu, n)?;
    let scenario = epr_scenario(n);
    let w = uniform_weight(&scenario);
    let mut lambdas = Vec::with_capacity(n * n);
    for q in 0..n {
        for p in 0..n {
            lambdas.push(format!("q{q}p{p}"));
        }
    }
    let mu = mu.to_vec();
    let nu = nu.to_vec();
    let model = HiddenVariableModel::from_fns(
        scenario,
        ValueMode::Exact,
        lambdas,
        {
            let mu = mu.clone();
            let nu = nu.clone();
            move |l| Value::Exact(&mu[l / n] * &nu[l % n])
        },
        move |_, _| w.clone(),
        move |s, l, o| {
            let (q1, p1) = (l / n, l % n);
            let expect_a = if s[0] == 0 { q1 } else { p1 };
            let expect_b = if s[1] == 0 { (n - q1) % n } else { p1 };
            if o[0] == expect_a && o[1] == expect_b {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        },
    );
    model.validate()?;
    Ok(model)
}

/// The two-stage one-way-signalling ontic model: region B measures first along
/// y with a uniformly random result b, a signal puts region A's particle into
/// the "−b along y" state, then A's response along x has
/// p(a|x; y, b) = ½(1 − a·b·x·y). The flattened statistics are the singlet's.
#[derive(Clone, Debug)]
pub struct SequentialOnticModel {
    pub directions: Vec<[f64; 3]>,
}

/// Report of the asymmetric-disturbance check on a sequential ontic model.
#[derive(Clone, Debug)]
pub struct DisturbanceReport {
    /// Max deviation of region-B statistics across region-A settings.
    pub b_stats_deviation: f64,
    /// Witness that region A's ontic-state distribution depends on y, when it
    /// does: a pair of B-settings with distinguishable ontic distributions.
    pub a_ontic_y_dependence: Option<(usize, usize)>,
}

fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl SequentialOnticModel {
    pub fn scenario(&self) -> Scenario {
        let make = |prefix: &str| -> Vec<Setting> {
            (0..self.directions.len())
                .map(|i| Setting {
                    label: format!("{prefix}_{i}"),
                    outcomes: vec!["+1".into(), "-1".into()],
                })
                .collect()
        };
        Scenario {
            parties: vec![
                Party { label: "A".into(), settings: make("x") },
                Party { label: "B".into(), settings: make("y") },
            ],
        }
    }

    /// Pre-measurement outcome distribution in region B: uniform for every y.
    pub fn region_b_premeasurement_dist(&self, _y: usize) -> Vec<f64> {
        vec![0.5, 0.5]
    }

    /// Distribution over region-A ontic states after B's measurement along y:
    /// uniform over the two "−b along y" states, indexed (y, b).
    pub fn ontic_state_distribution(&self, y: usize) -> Vec<((usize, i8), f64)> {
        vec![((y, 1), 0.5), ((y, -1), 0.5)]
    }

    /// A's response given the post-signal ontic state (y, b).
    pub fn a_response(&self, x: usize, ontic: (usize, i8)) -> [f64; 2] {
        let (y, b) = ontic;
        let c = dot3(&self.directions[x], &self.directions[y]);
        let p_plus = 0.5 * (1.0 - (b as f64) * c);
        [p_plus, 1.0 - p_plus]
    }

    /// The observed two-region statistics, built from the two-stage process.
    pub fn behavior(&self) -> Behavior {
        let dirs = self.directions.clone();
        Behavior::from_fn(self.scenario(), ValueMode::float_default(), move |s, o| {
            let mut total = 0.0;
            for b_val in [1i8, -1] {
                // b occurs with probability ½; A then responds to (y, b).
                let b_idx = if b_val == 1 { 0 } else { 1 };
                if o[1] != b_idx {
                    continue;
                }
                let c = dot3(&dirs[s[0]], &dirs[s[1]]);
                let a_val: f64 = if o[0] == 0 { 1.0 } else { -1.0 };
                total += 0.5 * 0.5 * (1.0 - a_val * (b_val as f64) * c);
            }
            Value::Float(total)
        })
    }

    /// Flatten the two-stage process into a hidden-variable model with
    /// λ = B's (predetermined) outcome and setting-independent λ weights.
    /// The signal from B to A shows up as y-dependence of A's response — a
    /// parameter-independence failure, not a setting-weight one.
    pub fn flatten(&self) -> HiddenVariableModel {
        let n = self.directions.len();
        let dirs = self.directions.clone();
        let w = Value::Float(1.0 / ((n * n) as f64));
        HiddenVariableModel::from_fns(
            self.scenario(),
            ValueMode::float_default(),
            vec!["b=+1".into(), "b=-1".into()],
            |_| Value::Float(0.5),
            move |_, _| w.clone(),
            move |s, l, o| {
                // λ index doubles as B's outcome index.
                if o[1] != l {
                    return Value::Float(0.0);
                }
                let b_val: f64 = if l == 0 { 1.0 } else { -1.0 };
                let c = dot3(&dirs[s[0]], &dirs[s[1]]);
                let a_val: f64 = if o[0] == 0 { 1.0 } else { -1.0 };
                Value::Float(0.5 * (1.0 - a_val * b_val * c))
            },
        )
    }

    /// One-way non-disturbance: B's statistics are invariant under A's
    /// setting, while A's ontic state distribution depends on y.
    pub fn disturbance_report(&self) -> Result<DisturbanceReport> {
        let behavior = self.behavior();
        let mut max_dev: f64 = 0.0;
        for y in 0..self.directions.len() {
            let mut reference: Option<Vec<f64>> = None;
            for x in 0..self.directions.len() {
                let m = behavior.marginal(&vec![x, y], 1)?;
                let m: Vec<f64> = m.iter().map(|v| v.to_f64()).collect();
                if let Some(r) = &reference {
                    for (a, b) in r.iter().zip(&m) {
                        max_dev = max_dev.max((a - b).abs());
                    }
                } else {
                    reference = Some(m);
                }
            }
        }
        let mut witness = None;
        'outer: for y1 in 0..self.directions.len() {
            for y2 in (y1 + 1)..self.directions.len() {
                let d1 = self.ontic_state_distribution(y1);
                let d2 = self.ontic_state_distribution(y2);
                // Distinct supports: the post-signal states are tagged by y.
                if d1.iter().any(|(s, p)| *p > 0.0 && !d2.iter().any(|(t, q)| t == s && *q > 0.0)) {
                    witness = Some((y1, y2));
                    break 'outer;
                }
            }
        }
        Ok(DisturbanceReport { b_stats_deviation: max_dev, a_ontic_y_dependence: witness })
    }
}

/// Build the one-way-signalling singlet model over a finite direction set.
pub fn example1_model(directions: &[[f64; 3]]) -> Result<SequentialOnticModel> {
    if directions.len() < 2 {
        return Err(Error::Validation("need at least two directions".into()));
    }
    for (i, d) in directions.iter().enumerate() {
        if (dot3(d, d).sqrt() - 1.0).abs() > DEFAULT_TOL {
            return Err(Error::Validation(format!("direction {i} is not a unit vector")));
        }
    }
    Ok(SequentialOnticModel { directions: directions.to_vec() })
}

/// Local deterministic model for an arbitrary behavior via measurement-
/// dependent λ weights: λ runs over the support tuples (x, y, a, b), with
/// p(λ|x,y) ∝ p(a,b|x,y) on the matching pair and 0 elsewhere. Deterministic
/// product responses with a y-independent A-part and x-independent B-part.
pub fn hall_brans_model(b: &Behavior) -> Result<HiddenVariableModel> {
    if !b.mode.is_exact() {
        return Err(Error::ExactnessRequired(
            "hall_brans_model needs an exact-mode behavior; rationalize first".into(),
        ));
    }
    let report = b.validate()?;
    if !report.is_valid() {
        return Err(Error::Validation("behavior is invalid".into()));
    }
    let scenario = b.scenario.clone();
    let contexts = scenario.joint_settings();
    let num_contexts = contexts.len() as i64;
    // λ set: support tuples in table order.
    let mut lambda_keys: Vec<(JointSetting, Vec<usize>)> = Vec::new();
    let mut lambdas = Vec::new();
    for s in &contexts {
        for o in scenario.joint_outcomes(s) {
            if b.mode.is_positive(b.get(s, &o)?) {
                lambdas.push(scenario.describe_point(s, &o));
                lambda_keys.push((s.clone(), o));
            }
        }
    }
    let table: Vec<Value> = lambda_keys
        .iter()
        .map(|(s, o)| b.get(s, o).map(|v| v.clone()))
        .collect::<Result<_>>()?;
    let keys = lambda_keys.clone();
    let keys2 = lambda_keys;
    let model = HiddenVariableModel::from_fns(
        scenario,
        ValueMode::Exact,
        lambdas,
        move |l| &table[l] * &Value::exact(1, num_contexts),
        move |s, l| {
            if s == &keys[l].0 {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        },
        move |s, l, o| {
            let (s0, o0) = &keys2[l];
            // Per-party deterministic response: the recorded outcome at the
            // tied setting, the first outcome elsewhere.
            let matches = s.iter().enumerate().all(|(party, &x)| {
                let expect = if x == s0[party] { o0[party] } else { 0 };
                o[party] == expect
            });
            if matches {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        },
    );
    model.validate()?;
    Ok(model)
}

/// Outcome of counterfactual completion.
#[derive(Clone, Debug)]
pub enum CompletionResult {
    /// A deterministic, parameter-independent, accessible-choice model whose
    /// behavior matches the input on the constrained pairs.
    Completed(HiddenVariableModel),
    /// No joint deterministic assignment family satisfies the constraints.
    Contradiction(ContradictionCertificate),
}

/// Search for a family of predetermined outcome assignments {a(x), b(y)}
/// satisfying b(y_s) = f_s(a(x_s)) for every given perfectly correlated pair,
/// with λ-weights reproducing the behavior on those pairs. Exhaustive over
/// outcome assignments; the certificate is replayable.
pub fn counterfactual_completion(
    b: &Behavior,
    pairs: &[PerfectCorrelation],
) -> Result<CompletionResult> {
    if b.scenario.num_parties() != 2 {
        return Err(Error::Unsupported("counterfactual completion is bipartite".into()));
    }
    if !b.mode.is_exact() {
        return Err(Error::ExactnessRequired("counterfactual completion needs exact mode".into()));
    }
    let verified = b.find_perfect_correlations()?;
    for pair in pairs {
        if !verified.contains(pair) {
            return Err(Error::Precondition(format!(
                "pair ({}, {}) is not perfectly correlated in the behavior with the given map",
                b.scenario.parties[0].settings[pair.x].label,
                b.scenario.parties[1].settings[pair.y].label,
            )));
        }
    }
    let strategies = enumerate_deterministic_strategies(&b.scenario, DEFAULT_STRATEGY_CAP)?;
    let total = strategies.len() as u64;
    let satisfying: Vec<&DeterministicStrategy> = strategies
        .iter()
        .filter(|st| {
            pairs
                .iter()
                .all(|pc| st.choices[1][pc.y] == pc.map[st.choices[0][pc.x]])
        })
        .collect();
    let descriptions: Vec<String> = pairs
        .iter()
        .map(|pc| {
            format!(
                "b({}) = f(a({}))",
                b.scenario.parties[1].settings[pc.y].label,
                b.scenario.parties[0].settings[pc.x].label
            )
        })
        .collect();
    if satisfying.is_empty() {
        return Ok(CompletionResult::Contradiction(ContradictionCertificate {
            constraints: descriptions,
            assignments_checked: total,
            parity_obstruction: None,
        }));
    }

    // Weights over satisfying assignments reproducing the behavior on the
    // constrained pairs.
    let mut lp = LinearProgram::feasibility(satisfying.len());
    let mut norm = vec![Rat::one(); satisfying.len()];
    lp.add(std::mem::take(&mut norm), ConstraintOp::Eq, Rat::one());
    for pc in pairs {
        let s = vec![pc.x, pc.y];
        for o in b.scenario.joint_outcomes(&s) {
            let coeffs: Vec<Rat> = satisfying
                .iter()
                .map(|st| {
                    if st.consistent(&s, &o) {
                        Rat::one()
                    } else {
                        Rat::zero()
                    }
                })
                .collect();
            let rhs = b.get(&s, &o)?.clone().into_rational()?;
            lp.add(coeffs, ConstraintOp::Eq, rhs);
        }
    }
    let weights = match solve_lp(&lp)? {
        LpResult::Feasible { witness, .. } => witness,
        LpResult::Infeasible(_) => {
            return Err(Error::Validation(
                "assignments exist but no λ-weights reproduce the behavior on the constrained pairs"
                    .into(),
            ));
        }
        LpResult::Unbounded => unreachable!("feasibility problem"),
    };

    let kept: Vec<(DeterministicStrategy, Rat)> = satisfying
        .iter()
        .zip(weights)
        .filter(|(_, w)| w.is_positive())
        .map(|(st, w)| ((*st).clone(), w))
        .collect();
    let scenario = b.scenario.clone();
    let w = uniform_weight(&scenario);
    let kept_for_prior: Vec<Rat> = kept.iter().map(|(_, w)| w.clone()).collect();
    let kept_strategies: Vec<DeterministicStrategy> = kept.iter().map(|(s, _)| s.clone()).collect();
    let model = HiddenVariableModel::from_fns(
        scenario,
        ValueMode::Exact,
        (0..kept.len()).map(|i| format!("assign{i}")).collect(),
        move |l| Value::Exact(kept_for_prior[l].clone()),
        move |_, _| w.clone(),
        move |s, l, o| {
            if kept_strategies[l].consistent(s, o) {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        },
    );
    model.validate()?;
    Ok(CompletionResult::Completed(model))
}

/// Convenience: exact uniform distribution over Z_N.
pub fn uniform_dist(n: usize) -> Vec<Rat> {
    vec![rat(1, n as i64); n]
}

/// Exact point mass at k in Z_N.
pub fn point_mass(n: usize, k: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[k] = Rat::one();
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::pr_box_behavior;

    #[test]
    fn pr_box_model_reconstructs_pr_box() {
        let m = pr_box_model(1).unwrap();
        let b = m.reconstruct_behavior().unwrap();
        let target = pr_box_behavior();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                assert!(b.mode.eq(b.get(&s, &o).unwrap(), target.get(&s, &o).unwrap()));
            }
        }
        // Anticorrelation forced at (x_1, y_1).
        assert!(b.mode.is_zero(b.get(&vec![1, 1], &vec![0, 0]).unwrap()));
    }

    #[test]
    fn pr_box_model_lambda_count_is_irrelevant() {
        let b1 = pr_box_model(1).unwrap().reconstruct_behavior().unwrap();
        let b5 = pr_box_model(5).unwrap().reconstruct_behavior().unwrap();
        for s in b1.scenario.joint_settings() {
            for o in b1.scenario.joint_outcomes(&s) {
                assert!(b1.mode.eq(b1.get(&s, &o).unwrap(), b5.get(&s, &o).unwrap()));
            }
        }
    }

    #[test]
    fn pr_box_model_verdicts() {
        let m = pr_box_model(2).unwrap();
        assert!(m.check_parameter_independence().unwrap().passes());
        assert!(!m.check_determinism().unwrap().passes());
        assert!(!m.check_outcome_independence().unwrap().passes());
    }

    #[test]
    fn epr_grid_uniform_passes_pi_fails_det() {
        let n = 8;
        let m = epr_grid_model(n, &uniform_dist(n), &uniform_dist(n)).unwrap();
        assert!(m.check_parameter_independence().unwrap().passes());
        assert!(!m.check_determinism().unwrap().passes());
        let b = m.reconstruct_behavior().unwrap();
        let pcs = b.find_perfect_correlations().unwrap();
        // Q-pair: f(q) = −q mod 8; P-pair: identity.
        let q_pair = pcs.iter().find(|p| p.x == 0 && p.y == 0).expect("Q pair");
        assert_eq!(q_pair.map, (0..n).map(|q| (n - q) % n).collect::<Vec<_>>());
        let p_pair = pcs.iter().find(|p| p.x == 1 && p.y == 1).expect("P pair");
        assert_eq!(p_pair.map, (0..n).collect::<Vec<_>>());
        assert!(!pcs.iter().any(|p| p.x != p.y));
    }

    #[test]
    fn epr_grid_point_mass_is_deterministic_on_q_pair() {
        let n = 8;
        let m = epr_grid_model(n, &point_mass(n, 3), &uniform_dist(n)).unwrap();
        let s = vec![0usize, 0usize];
        for l in m.supported_lambdas() {
            for o in m.scenario.joint_outcomes(&s) {
                let r = m.response_at(&s, l, &o).unwrap();
                assert!(m.mode.is_zero(r) || m.mode.is_one(r));
            }
        }
    }

    #[test]
    fn deterministic_completion_matches_grid_model_exactly() {
        let n = 8;
        let mu = uniform_dist(n);
        let nu = uniform_dist(n);
        let grid = epr_grid_model(n, &mu, &nu).unwrap().reconstruct_behavior().unwrap();
        let complete = epr_deterministic_completion(n, &mu, &nu).unwrap();
        assert!(complete.check_determinism().unwrap().passes());
        assert!(complete.check_parameter_independence().unwrap().passes());
        let b = complete.reconstruct_behavior().unwrap();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                assert!(b.mode.eq(b.get(&s, &o).unwrap(), grid.get(&s, &o).unwrap()));
            }
        }
    }

    #[test]
    fn completion_with_point_mass_mu_collapses_support() {
        let n = 4;
        let m = epr_deterministic_completion(n, &point_mass(n, 1), &uniform_dist(n)).unwrap();
        assert_eq!(m.supported_lambdas().len(), n);
    }

    #[test]
    fn example1_reproduces_singlet_statistics() {
        let dirs = [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            [std::f64::consts::FRAC_1_SQRT_2, 0.0, std::f64::consts::FRAC_1_SQRT_2],
        ];
        let m = example1_model(&dirs).unwrap();
        let b = m.behavior();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                let a: f64 = if o[0] == 0 { 1.0 } else { -1.0 };
                let bb: f64 = if o[1] == 0 { 1.0 } else { -1.0 };
                let expected = 0.25 * (1.0 - a * bb * dot3(&dirs[s[0]], &dirs[s[1]]));
                assert!((b.get(&s, &o).unwrap().to_f64() - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn example1_disturbance_is_one_way() {
        let dirs = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let m = example1_model(&dirs).unwrap();
        let report = m.disturbance_report().unwrap();
        assert!(report.b_stats_deviation <= 1e-12);
        assert_eq!(report.a_ontic_y_dependence, Some((0, 1)));
        for y in 0..2 {
            assert_eq!(m.region_b_premeasurement_dist(y), vec![0.5, 0.5]);
        }
    }

    #[test]
    fn example1_flattened_model_matches_closed_form() {
        let dirs = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]];
        let m = example1_model(&dirs).unwrap();
        let flat = m.flatten();
        flat.validate().unwrap();
        let b = flat.reconstruct_behavior().unwrap();
        let direct = m.behavior();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                assert!(
                    (b.get(&s, &o).unwrap().to_f64() - direct.get(&s, &o).unwrap().to_f64()).abs()
                        < 1e-12
                );
            }
        }
        // The flattened model is not locally causal: B's outcome feeds A's
        // response through its y-dependence (a parameter-independence failure),
        // while the λ weights stay setting-independent.
        assert!(!flat.check_parameter_independence().unwrap().passes());
        assert!(!flat.check_local_causality().unwrap().passes());
        assert!(flat.check_measurement_independence().unwrap().passes());
    }

    #[test]
    fn example1_rejects_non_unit_vectors() {
        assert!(example1_model(&[[0.0, 0.0, 2.0], [1.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn hall_brans_reconstructs_pr_box_with_expected_verdicts() {
        let target = pr_box_behavior();
        let m = hall_brans_model(&target).unwrap();
        assert!(m.check_determinism().unwrap().passes());
        assert!(m.check_parameter_independence().unwrap().passes());
        assert!(m.check_local_causality().unwrap().passes());
        assert!(!m.check_measurement_independence().unwrap().passes());
        assert!(!m.check_accessible_choice().unwrap().passes());
        let b = m.reconstruct_behavior().unwrap();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                assert!(b.mode.eq(b.get(&s, &o).unwrap(), target.get(&s, &o).unwrap()));
            }
        }
    }

    #[test]
    fn hall_brans_lambda_count_on_uniform_behavior() {
        let b = crate::scenario::uniform_behavior(Scenario::chsh());
        let m = hall_brans_model(&b).unwrap();
        // 4 setting pairs × 4 outcome pairs in the support.
        assert_eq!(m.lambdas.len(), 16);
    }

    #[test]
    fn hall_brans_rejects_float_mode() {
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::float_default(), |_, _| {
            Value::Float(0.25)
        });
        assert!(matches!(hall_brans_model(&b), Err(Error::ExactnessRequired(_))));
    }

    #[test]
    fn counterfactual_completion_contradiction_on_pr_box() {
        let b = pr_box_behavior();
        let pairs = b.find_perfect_correlations().unwrap();
        assert_eq!(pairs.len(), 4);
        match counterfactual_completion(&b, &pairs).unwrap() {
            CompletionResult::Contradiction(cert) => {
                assert_eq!(cert.assignments_checked, 16);
                assert_eq!(cert.constraints.len(), 4);
            }
            _ => panic!("expected contradiction"),
        }
    }

    #[test]
    fn counterfactual_completion_single_pair_succeeds() {
        let b = pr_box_behavior();
        let pairs = b.find_perfect_correlations().unwrap();
        let one = vec![pairs[0].clone()];
        match counterfactual_completion(&b, &one).unwrap() {
            CompletionResult::Completed(m) => {
                assert!(m.check_determinism().unwrap().passes());
                assert!(m.check_parameter_independence().unwrap().passes());
                assert!(m.check_accessible_choice().unwrap().passes());
            }
            _ => panic!("expected completion"),
        }
    }

    #[test]
    fn counterfactual_completion_on_epr_grid() {
        let n = 4;
        let mu = uniform_dist(n);
        let nu = uniform_dist(n);
        let b = epr_grid_model(n, &mu, &nu).unwrap().reconstruct_behavior().unwrap();
        let pairs: Vec<PerfectCorrelation> = b
            .find_perfect_correlations()
            .unwrap()
            .into_iter()
            .filter(|p| p.x == p.y)
            .collect();
        assert_eq!(pairs.len(), 2);
        match counterfactual_completion(&b, &pairs).unwrap() {
            CompletionResult::Completed(m) => {
                assert!(m.check_determinism().unwrap().passes());
                assert!(m.check_parameter_independence().unwrap().passes());
                assert!(m.check_accessible_choice().unwrap().passes());
                // Matches the target behavior on the constrained pairs.
                let rb = m.reconstruct_behavior().unwrap();
                for pc in &pairs {
                    let s = vec![pc.x, pc.y];
                    for o in b.scenario.joint_outcomes(&s) {
                        assert!(b.mode.eq(rb.get(&s, &o).unwrap(), b.get(&s, &o).unwrap()));
                    }
                }
            }
            _ => panic!("expected completion"),
        }
    }

    #[test]
    fn counterfactual_completion_rejects_bad_pairs() {
        let b = crate::scenario::uniform_behavior(Scenario::chsh());
        let fake = PerfectCorrelation { x: 0, y: 0, map: vec![0, 1] };
        assert!(matches!(
            counterfactual_completion(&b, &[fake]),
            Err(Error::Precondition(_))
        ));
    }
}
