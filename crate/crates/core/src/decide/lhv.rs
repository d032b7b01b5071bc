//! Exact membership test for the local polytope: either a convex combination
//! of deterministic strategies reproducing the behavior, or a separating
//! linear functional extracted from the infeasibility certificate.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::decide::lp::{solve_lp, ConstraintOp, FarkasCertificate, LinearProgram, LpResult, Rat};
use crate::decide::strategies::{
    enumerate_deterministic_strategies, DeterministicStrategy, DEFAULT_STRATEGY_CAP,
};
use crate::error::{Error, Result};
use crate::scenario::{Behavior, JointOutcome, JointSetting, Scenario};
use crate::value::Value;

/// A linear functional on behaviors with its bound over deterministic
/// strategies. A behavior with `evaluate > local_bound` is outside the local
/// polytope.
#[derive(Clone, Debug)]
pub struct BellFunctional {
    pub coefficients: BTreeMap<(JointSetting, JointOutcome), Rat>,
    pub local_bound: Rat,
}

impl BellFunctional {
    /// Σ coefficients · p(a,b|x,y); exact behaviors only.
    pub fn evaluate(&self, b: &Behavior) -> Result<Rat> {
        let mut total = Rat::zero();
        for ((s, o), c) in &self.coefficients {
            let p = b.get(s, o)?.clone().into_rational()?;
            total += c * p;
        }
        Ok(total)
    }

    /// Recompute the bound by direct enumeration of deterministic strategies.
    pub fn bound_by_enumeration(&self, scenario: &Scenario) -> Result<Rat> {
        let strategies = enumerate_deterministic_strategies(scenario, DEFAULT_STRATEGY_CAP)?;
        let mut best: Option<Rat> = None;
        for st in &strategies {
            let mut v = Rat::zero();
            for ((s, o), c) in &self.coefficients {
                if st.consistent(s, o) {
                    v += c;
                }
            }
            best = Some(match best {
                Some(b) if b >= v => b,
                _ => v,
            });
        }
        best.ok_or_else(|| Error::Domain("no deterministic strategies".into()))
    }
}

#[derive(Clone, Debug)]
pub enum LhvResult {
    /// Convex weights over deterministic strategies reproducing the behavior.
    Local { weights: Vec<(DeterministicStrategy, Rat)> },
    /// A functional violated by the behavior, with the raw LP certificate.
    Nonlocal { functional: BellFunctional, value: Rat, certificate: FarkasCertificate },
}

/// Decide membership of an exact behavior in the convex hull of deterministic
/// strategies. Both verdicts are replayed before being returned: the mixture
/// is re-expanded entry by entry, and the functional is re-bounded by direct
/// enumeration.
pub fn decide_lhv(b: &Behavior) -> Result<LhvResult> {
    if !b.mode.is_exact() {
        return Err(Error::ExactnessRequired(
            "local-polytope membership needs an exact behavior; rationalize first".into(),
        ));
    }
    let report = b.validate()?;
    if !report.is_valid() {
        return Err(Error::Validation("behavior is invalid".into()));
    }
    let strategies = enumerate_deterministic_strategies(&b.scenario, DEFAULT_STRATEGY_CAP)?;
    // One equality row per table entry: Σ_d [d consistent] q_d = p(o|s).
    // Normalization Σ q_d = 1 follows from the rows at any one context.
    let mut rows: Vec<(JointSetting, JointOutcome)> = Vec::new();
    let mut lp = LinearProgram::feasibility(strategies.len());
    for s in b.scenario.joint_settings() {
        for o in b.scenario.joint_outcomes(&s) {
            let coeffs: Vec<Rat> = strategies
                .iter()
                .map(|st| if st.consistent(&s, &o) { Rat::from_integer(1.into()) } else { Rat::zero() })
                .collect();
            let rhs = b.get(&s, &o)?.clone().into_rational()?;
            lp.add(coeffs, ConstraintOp::Eq, rhs);
            rows.push((s.clone(), o));
        }
    }
    match solve_lp(&lp)? {
        LpResult::Feasible { witness, .. } => {
            let weights: Vec<(DeterministicStrategy, Rat)> = strategies
                .into_iter()
                .zip(witness)
                .filter(|(_, w)| w.is_positive())
                .collect();
            // Replay: the mixture must reproduce every entry.
            for (i, (s, o)) in rows.iter().enumerate() {
                let mut total = Rat::zero();
                for (st, w) in &weights {
                    if st.consistent(s, o) {
                        total += w;
                    }
                }
                let target = b.get(s, o)?.clone().into_rational()?;
                if total != target {
                    return Err(Error::Domain(format!("mixture replay failed at row {i}")));
                }
            }
            Ok(LhvResult::Local { weights })
        }
        LpResult::Infeasible(certificate) => {
            if !certificate.verify(&lp)? {
                return Err(Error::Domain("infeasibility certificate failed to verify".into()));
            }
            let coefficients: BTreeMap<(JointSetting, JointOutcome), Rat> = rows
                .iter()
                .cloned()
                .zip(certificate.row_multipliers.iter().cloned())
                .collect();
            let mut functional = BellFunctional { coefficients, local_bound: Rat::zero() };
            functional.local_bound = functional.bound_by_enumeration(&b.scenario)?;
            let value = functional.evaluate(b)?;
            if value <= functional.local_bound {
                return Err(Error::Domain("extracted functional is not violated".into()));
            }
            Ok(LhvResult::Nonlocal { functional, value, certificate })
        }
        LpResult::Unbounded => unreachable!("feasibility problem"),
    }
}

/// The CHSH functional S = E(x0,y0) + E(x0,y1) + E(x1,y0) − E(x1,y1) as a
/// coefficient table over a binary-outcome bipartite scenario.
pub fn chsh_functional(scenario: &Scenario, quad: (usize, usize, usize, usize)) -> Result<BellFunctional> {
    if !scenario.all_binary_pm() || scenario.num_parties() != 2 {
        return Err(Error::Unsupported("CHSH needs binary ±1 outcomes for two parties".into()));
    }
    let (x0, x1, y0, y1) = quad;
    let mut coefficients = BTreeMap::new();
    for (x, y, sign) in [(x0, y0, 1i64), (x0, y1, 1), (x1, y0, 1), (x1, y1, -1)] {
        for a in 0..2usize {
            for b in 0..2usize {
                let parity: i64 = if (a + b) % 2 == 0 { 1 } else { -1 };
                let entry = coefficients
                    .entry((vec![x, y], vec![a, b]))
                    .or_insert_with(Rat::zero);
                *entry += Rat::from_integer((sign * parity).into());
            }
        }
    }
    let mut f = BellFunctional { coefficients, local_bound: Rat::zero() };
    f.local_bound = f.bound_by_enumeration(scenario)?;
    Ok(f)
}

/// Behavior induced by a convex mixture of deterministic strategies.
pub fn mixture_behavior(
    scenario: &Scenario,
    weights: &[(DeterministicStrategy, Rat)],
) -> Behavior {
    Behavior::from_fn(scenario.clone(), crate::value::ValueMode::Exact, |s, o| {
        let mut total = Rat::zero();
        for (st, w) in weights {
            if st.consistent(s, o) {
                total += w;
            }
        }
        Value::Exact(total)
    })
}
