//! Measurement-dependent locality: exact membership test for models that are
//! deterministic and parameter-independent but whose λ may carry information
//! about the settings, subject to a floor p(x,y|λ) ≥ ℓ, and bisection for the
//! largest admissible floor.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::decide::lp::{solve_lp, ConstraintOp, FarkasCertificate, LinearProgram, LpResult, Rat};
use crate::decide::strategies::{
    enumerate_deterministic_strategies, DeterministicStrategy, DEFAULT_STRATEGY_CAP,
};
use crate::error::{Error, Result};
use crate::hvmodel::HiddenVariableModel;
use crate::scenario::{Behavior, JointSetting};
use crate::value::{Value, ValueMode};

/// A behavior together with a distribution over joint settings; the product
/// p(x,y)·p(a,b|x,y) is the joint experiment distribution.
#[derive(Clone, Debug)]
pub struct JointDistribution {
    pub behavior: Behavior,
    pub settings_dist: BTreeMap<JointSetting, Rat>,
}

impl JointDistribution {
    pub fn new(behavior: Behavior, settings_dist: BTreeMap<JointSetting, Rat>) -> Result<JointDistribution> {
        if !behavior.mode.is_exact() {
            return Err(Error::ExactnessRequired("joint distributions are exact-mode only".into()));
        }
        if !behavior.validate()?.is_valid() {
            return Err(Error::Validation("behavior is invalid".into()));
        }
        let contexts = behavior.scenario.joint_settings();
        let mut total = Rat::zero();
        for s in &contexts {
            let p = settings_dist
                .get(s)
                .ok_or_else(|| Error::MissingEntry(behavior.scenario.describe_settings(s)))?;
            if p.is_negative() {
                return Err(Error::Validation(format!(
                    "negative setting probability at {}",
                    behavior.scenario.describe_settings(s)
                )));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::Validation(format!("settings distribution sums to {total}, not 1")));
        }
        if settings_dist.len() != contexts.len() {
            return Err(Error::Validation("settings distribution has extra entries".into()));
        }
        Ok(JointDistribution { behavior, settings_dist })
    }

    /// Uniform settings distribution over the behavior's contexts.
    pub fn with_uniform_settings(behavior: Behavior) -> Result<JointDistribution> {
        let contexts = behavior.scenario.joint_settings();
        let n = contexts.len() as i64;
        let dist = contexts
            .into_iter()
            .map(|s| (s, Rat::new(1.into(), n.into())))
            .collect();
        JointDistribution::new(behavior, dist)
    }

    pub fn setting_probability(&self, s: &JointSetting) -> Result<&Rat> {
        self.settings_dist
            .get(s)
            .ok_or_else(|| Error::MissingEntry(self.behavior.scenario.describe_settings(s)))
    }

    /// p(a,b,x,y) = p(x,y)·p(a,b|x,y).
    pub fn joint_probability(&self, s: &JointSetting, o: &[usize]) -> Result<Rat> {
        let cond = self.behavior.get(s, &o.to_vec())?.clone().into_rational()?;
        Ok(self.setting_probability(s)? * cond)
    }

    /// Largest meaningful floor: ℓ ≤ 1/#contexts since Σ_{x,y} p(x,y|λ) = 1.
    pub fn max_floor(&self) -> Rat {
        let n = self.behavior.scenario.joint_settings().len() as i64;
        Rat::new(1.into(), n.into())
    }
}

/// Verified evidence that no floor-ℓ model exists.
#[derive(Clone, Debug)]
pub struct MdlCertificate {
    pub ell: Rat,
    pub farkas: FarkasCertificate,
}

#[derive(Clone, Debug)]
pub enum MdlResult {
    /// A deterministic parameter-independent model whose setting weights obey
    /// p(x,y|λ) ≥ ℓ and which reproduces the joint distribution.
    Feasible(HiddenVariableModel),
    Infeasible(MdlCertificate),
}

/// LP for floor ℓ: variables w(d, x, y) = p(λ_d)·p(x,y|λ_d) over deterministic
/// strategies d and contexts; entry rows fix the joint distribution, and
/// floor rows demand w(d,x,y) ≥ ℓ·Σ_{x',y'} w(d,x',y').
fn build_lp(joint: &JointDistribution, ell: &Rat, strategies: &[DeterministicStrategy]) -> Result<LinearProgram> {
    let scenario = &joint.behavior.scenario;
    let contexts = scenario.joint_settings();
    let nc = contexts.len();
    let nd = strategies.len();
    let var = |d: usize, ci: usize| d * nc + ci;
    let mut lp = LinearProgram::feasibility(nd * nc);
    for (ci, s) in contexts.iter().enumerate() {
        for o in scenario.joint_outcomes(s) {
            let mut coeffs = vec![Rat::zero(); nd * nc];
            for (d, st) in strategies.iter().enumerate() {
                if st.consistent(s, &o) {
                    coeffs[var(d, ci)] = Rat::one();
                }
            }
            lp.add(coeffs, ConstraintOp::Eq, joint.joint_probability(s, &o)?);
        }
    }
    if ell.is_positive() {
        for d in 0..nd {
            for ci in 0..nc {
                let mut coeffs = vec![Rat::zero(); nd * nc];
                for cj in 0..nc {
                    coeffs[var(d, cj)] = -ell.clone();
                }
                coeffs[var(d, ci)] += Rat::one();
                lp.add(coeffs, ConstraintOp::Ge, Rat::zero());
            }
        }
    }
    Ok(lp)
}

/// Decide whether the joint distribution admits a deterministic model with
/// setting-information floor ℓ. Feasible verdicts are replayed by validating
/// the model and reconstructing the joint distribution; infeasible verdicts
/// carry a multiplier certificate verified against the LP.
pub fn decide_mdl(joint: &JointDistribution, ell: &Rat) -> Result<MdlResult> {
    if ell.is_negative() || ell > &joint.max_floor() {
        return Err(Error::Domain(format!(
            "floor must lie in [0, {}], got {ell}",
            joint.max_floor()
        )));
    }
    let scenario = &joint.behavior.scenario;
    let strategies = enumerate_deterministic_strategies(scenario, DEFAULT_STRATEGY_CAP)?;
    let contexts = scenario.joint_settings();
    let nc = contexts.len();
    let lp = build_lp(joint, ell, &strategies)?;
    match solve_lp(&lp)? {
        LpResult::Feasible { witness, .. } => {
            // λ = strategies with positive total mass.
            let masses: Vec<Rat> = strategies
                .iter()
                .enumerate()
                .map(|(d, _)| (0..nc).map(|ci| witness[d * nc + ci].clone()).sum())
                .collect();
            let kept: Vec<usize> = (0..strategies.len())
                .filter(|&d| masses[d].is_positive())
                .collect();
            let context_index: BTreeMap<JointSetting, usize> = contexts
                .iter()
                .cloned()
                .enumerate()
                .map(|(i, s)| (s, i))
                .collect();
            let model = HiddenVariableModel::from_fns(
                scenario.clone(),
                ValueMode::Exact,
                kept.iter().map(|&d| format!("strategy{d}")).collect(),
                |l| Value::Exact(masses[kept[l]].clone()),
                |s, l| {
                    let d = kept[l];
                    let ci = context_index[s];
                    Value::Exact(&witness[d * nc + ci] / &masses[d])
                },
                |s, l, o| {
                    if strategies[kept[l]].consistent(s, o) {
                        Value::exact_int(1)
                    } else {
                        Value::exact_int(0)
                    }
                },
            );
            model.validate()?;
            // Replay: floor bound and joint reconstruction.
            for (l, &d) in kept.iter().enumerate() {
                for s in &contexts {
                    let w = model.weight(s, l)?.clone().into_rational()?;
                    if ell.is_positive() && &w < ell {
                        return Err(Error::Domain("floor replay failed".into()));
                    }
                    let _ = d;
                }
            }
            for s in &contexts {
                let ps = model.setting_probability(s)?.into_rational()?;
                if &ps != joint.setting_probability(s)? {
                    return Err(Error::Domain("setting-distribution replay failed".into()));
                }
            }
            let rb = model.reconstruct_behavior()?;
            for s in &contexts {
                for o in scenario.joint_outcomes(s) {
                    if rb.get(s, &o)? != joint.behavior.get(s, &o)? {
                        return Err(Error::Domain("behavior replay failed".into()));
                    }
                }
            }
            Ok(MdlResult::Feasible(model))
        }
        LpResult::Infeasible(farkas) => {
            if !farkas.verify(&lp)? {
                return Err(Error::Domain("infeasibility certificate failed to verify".into()));
            }
            Ok(MdlResult::Infeasible(MdlCertificate { ell: ell.clone(), farkas }))
        }
        LpResult::Unbounded => unreachable!("feasibility problem"),
    }
}

/// Bracketing interval for the largest feasible floor.
#[derive(Clone, Debug)]
pub struct MdlThreshold {
    /// A floor verified feasible.
    pub feasible: Rat,
    /// A floor verified infeasible, unless equal to `feasible` (in which case
    /// the maximum floor itself is feasible).
    pub infeasible: Rat,
}

impl MdlThreshold {
    pub fn width(&self) -> Rat {
        &self.infeasible - &self.feasible
    }
}

/// Bisect for the largest floor ℓ with a feasible model, shrinking the
/// bracket until its width is at most `precision`. Feasibility is monotone:
/// a floor-ℓ model satisfies every smaller floor, so the bracket
/// [feasible, infeasible] is maintained as an invariant and halves per step.
pub fn mdl_threshold(joint: &JointDistribution, precision: &Rat) -> Result<MdlThreshold> {
    if !precision.is_positive() {
        return Err(Error::Domain("precision must be positive".into()));
    }
    let max = joint.max_floor();
    if let MdlResult::Feasible(_) = decide_mdl(joint, &max)? {
        return Ok(MdlThreshold { feasible: max.clone(), infeasible: max });
    }
    let zero = Rat::zero();
    match decide_mdl(joint, &zero)? {
        MdlResult::Feasible(_) => {}
        MdlResult::Infeasible(_) => {
            return Err(Error::Domain(
                "joint distribution admits no setting-dependent model at all".into(),
            ));
        }
    }
    let mut lo = zero;
    let mut hi = max;
    while &(&hi - &lo) > precision {
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        match decide_mdl(joint, &mid)? {
            MdlResult::Feasible(_) => {
                assert!(mid >= lo, "bisection invariant");
                lo = mid;
            }
            MdlResult::Infeasible(_) => {
                assert!(mid <= hi, "bisection invariant");
                hi = mid;
            }
        }
    }
    Ok(MdlThreshold { feasible: lo, infeasible: hi })
}
