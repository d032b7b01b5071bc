//! Seeded random generators: exact behaviors, vertex mixtures of the
//! no-signalling polytope, random models, and the randomized conditioning-
//! lemma suite. Everything is deterministic given the seed.

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::decide::lp::Rat;
use crate::decide::strategies::enumerate_deterministic_strategies;
use crate::error::{Error, Result};
use crate::hvmodel::{condition_preserves_determinism, HiddenVariableModel, uniform_weight};
use crate::scenario::{Behavior, Scenario};
use crate::value::{Value, ValueMode};

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Exact distribution over n outcomes with all probabilities multiples of
/// 1/denom, drawn uniformly from compositions of denom.
pub fn random_exact_dist(rng: &mut ChaCha8Rng, n: usize, denom: u64) -> Vec<Rat> {
    assert!(n >= 1 && denom >= 1);
    let mut cuts: Vec<u64> = (0..n - 1).map(|_| rng.gen_range(0..=denom)).collect();
    cuts.sort_unstable();
    cuts.push(denom);
    let mut prev = 0u64;
    let mut out = Vec::with_capacity(n);
    for c in cuts {
        out.push(Rat::new((c - prev).into(), denom.into()));
        prev = c;
    }
    out
}

/// Behavior with an independent random exact distribution per context.
/// Generally signalling.
pub fn random_exact_behavior(rng: &mut ChaCha8Rng, scenario: &Scenario, denom: u64) -> Behavior {
    let mut b = Behavior::new(scenario.clone(), ValueMode::Exact, Default::default());
    for s in scenario.joint_settings() {
        let outcomes = scenario.joint_outcomes(&s);
        let dist = random_exact_dist(rng, outcomes.len(), denom);
        for (o, p) in outcomes.into_iter().zip(dist) {
            b.set(s.clone(), o, Value::Exact(p));
        }
    }
    b
}

/// The 24 vertices of the no-signalling set for two parties, two settings,
/// two outcomes: 16 deterministic strategies plus the 8 box variants
/// a ⊕ b = x·y ⊕ αx ⊕ βy ⊕ γ.
pub fn no_signalling_vertices() -> Result<Vec<Behavior>> {
    let scenario = Scenario::chsh();
    let mut out: Vec<Behavior> = enumerate_deterministic_strategies(&scenario, 64)?
        .into_iter()
        .map(|st| st.behavior(&scenario))
        .collect();
    for alpha in 0..2usize {
        for beta in 0..2usize {
            for gamma in 0..2usize {
                out.push(Behavior::from_fn(scenario.clone(), ValueMode::Exact, move |s, o| {
                    let target = (s[0] * s[1] + alpha * s[0] + beta * s[1] + gamma) % 2;
                    if (o[0] + o[1]) % 2 == target {
                        Value::exact(1, 2)
                    } else {
                        Value::exact_int(0)
                    }
                }));
            }
        }
    }
    Ok(out)
}

/// Exact convex mixture of behaviors over a shared scenario.
pub fn mixture(behaviors: &[Behavior], weights: &[Rat]) -> Result<Behavior> {
    if behaviors.is_empty() || behaviors.len() != weights.len() {
        return Err(Error::Validation("mixture needs matching behaviors and weights".into()));
    }
    let scenario = behaviors[0].scenario.clone();
    let mut b = Behavior::new(scenario.clone(), ValueMode::Exact, Default::default());
    for s in scenario.joint_settings() {
        for o in scenario.joint_outcomes(&s) {
            let mut total = Rat::zero();
            for (bi, w) in behaviors.iter().zip(weights) {
                total += w * bi.get(&s, &o)?.clone().into_rational()?;
            }
            b.set(s.clone(), o, Value::Exact(total));
        }
    }
    Ok(b)
}

/// Random exact no-signalling behavior: a vertex mixture with denominator
/// `denom`.
pub fn random_no_signalling_behavior(rng: &mut ChaCha8Rng, denom: u64) -> Result<Behavior> {
    let vertices = no_signalling_vertices()?;
    let weights = random_exact_dist(rng, vertices.len(), denom);
    mixture(&vertices, &weights)
}

/// Random exact local behavior: a strategy mixture.
pub fn random_local_behavior(
    rng: &mut ChaCha8Rng,
    scenario: &Scenario,
    denom: u64,
) -> Result<Behavior> {
    let vertices: Vec<Behavior> = enumerate_deterministic_strategies(scenario, 1 << 16)?
        .into_iter()
        .map(|st| st.behavior(scenario))
        .collect();
    let weights = random_exact_dist(rng, vertices.len(), denom);
    mixture(&vertices, &weights)
}

/// Random exact model with uniform setting weights and random responses —
/// passes no condition in particular.
pub fn random_model(
    rng: &mut ChaCha8Rng,
    scenario: &Scenario,
    n_lambda: usize,
    denom: u64,
) -> HiddenVariableModel {
    let prior = random_exact_dist(rng, n_lambda, denom);
    let w = uniform_weight(scenario);
    let mut responses = std::collections::BTreeMap::new();
    for s in scenario.joint_settings() {
        for l in 0..n_lambda {
            let outcomes = scenario.joint_outcomes(&s);
            let dist = random_exact_dist(rng, outcomes.len(), denom);
            for (o, p) in outcomes.into_iter().zip(dist) {
                responses.insert((s.clone(), l, o), Value::Exact(p));
            }
        }
    }
    HiddenVariableModel::from_fns(
        scenario.clone(),
        ValueMode::Exact,
        (0..n_lambda).map(|i| format!("λ{i}")).collect(),
        |l| Value::Exact(prior[l].clone()),
        |_, _| w.clone(),
        |s, l, o| responses[&(s.clone(), l, o.clone())].clone(),
    )
}

/// Random exact model built as a mixture of deterministic strategies with
/// uniform setting weights: passes DET, PI, MI by construction.
pub fn random_deterministic_model(
    rng: &mut ChaCha8Rng,
    scenario: &Scenario,
    denom: u64,
) -> Result<HiddenVariableModel> {
    let strategies = enumerate_deterministic_strategies(scenario, 1 << 16)?;
    let prior = random_exact_dist(rng, strategies.len(), denom);
    let w = uniform_weight(scenario);
    Ok(HiddenVariableModel::from_fns(
        scenario.clone(),
        ValueMode::Exact,
        (0..strategies.len()).map(|i| format!("strategy{i}")).collect(),
        |l| Value::Exact(prior[l].clone()),
        |_, _| w.clone(),
        |s, l, o| {
            if strategies[l].consistent(s, o) {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        },
    ))
}

/// Summary of a randomized conditioning-lemma run.
#[derive(Clone, Debug, Default)]
pub struct LemmaSuiteReport {
    pub trials: usize,
    pub preserved: usize,
    pub incompatible_guards: usize,
}

impl LemmaSuiteReport {
    pub fn all_preserved(&self) -> bool {
        self.preserved == self.trials
    }
}

/// Run `n` random trials of the conditioning lemma: a deterministic
/// conditional p(u|v), a random compatible extension p(u,w|v), and one check
/// per conditioning event w. Events with p(w|v) = 0 must trip the
/// incompatibility guard instead of producing a verdict.
pub fn run_lemma_suite(seed: u64, n: usize) -> Result<LemmaSuiteReport> {
    let mut rng = seeded_rng(seed);
    let mode = ValueMode::Exact;
    let mut report = LemmaSuiteReport::default();
    while report.trials < n {
        let nu = rng.gen_range(2..5usize);
        let nw = rng.gen_range(2..5usize);
        let point = rng.gen_range(0..nu);
        let p_u: Vec<Value> = (0..nu)
            .map(|u| if u == point { Value::exact_int(1) } else { Value::exact_int(0) })
            .collect();
        let p_w: Vec<Value> = random_exact_dist(&mut rng, nw, 12)
            .into_iter()
            .map(Value::Exact)
            .collect();
        // The only joint consistent with a deterministic p(u|v):
        // p(u,w|v) = δ_{u,point}·p(w|v).
        let joint: Vec<Vec<Value>> = (0..nu)
            .map(|u| {
                (0..nw)
                    .map(|w| if u == point { p_w[w].clone() } else { Value::exact_int(0) })
                    .collect()
            })
            .collect();
        for w in 0..nw {
            if report.trials >= n {
                break;
            }
            let compatible = mode.is_positive(&p_w[w]);
            match condition_preserves_determinism(&mode, &p_u, &p_w, &joint, w) {
                Ok(verdict) => {
                    if !compatible {
                        return Err(Error::Domain(
                            "guard failed to trip on an incompatible event".into(),
                        ));
                    }
                    report.trials += 1;
                    if verdict.preserved && verdict.point == point {
                        report.preserved += 1;
                    }
                }
                Err(Error::Incompatible(_)) if !compatible => {
                    report.incompatible_guards += 1;
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(report)
}
