//! Hidden-variable models over a finite λ set, and checkers for the λ-level
//! conditions: parameter independence, outcome independence, local causality,
//! outcome determinism, measurement independence, and accessible choice.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scenario::{Behavior, JointOutcome, JointSetting, Scenario};
use crate::value::{Value, ValueMode};

/// Finite hidden-variable model: p(λ), p(x,y|λ) and responses p(a,b|x,y,λ).
///
/// The model stores p(x,y|λ) and p(λ) rather than p(λ|x,y), so measurement
/// independence and accessible choice are both first-class; p(λ|x,y) is
/// derived by Bayes where needed.
#[derive(Clone, Debug)]
pub struct HiddenVariableModel {
    pub scenario: Scenario,
    pub mode: ValueMode,
    pub lambdas: Vec<String>,
    /// p(λ), indexed like `lambdas`.
    pub prior: Vec<Value>,
    /// p(x,y|λ) keyed by (joint setting, λ index).
    pub setting_weights: BTreeMap<(JointSetting, usize), Value>,
    /// p(a,b|x,y,λ) keyed by (joint setting, λ index, joint outcome).
    pub response: BTreeMap<(JointSetting, usize, JointOutcome), Value>,
}

/// The λ-level conditions defined on a model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Condition {
    ParameterIndependence,
    OutcomeIndependence,
    LocalCausality,
    Determinism,
    MeasurementIndependence,
    AccessibleChoice,
}

impl Condition {
    pub fn short(&self) -> &'static str {
        match self {
            Condition::ParameterIndependence => "pi",
            Condition::OutcomeIndependence => "oi",
            Condition::LocalCausality => "lc",
            Condition::Determinism => "det",
            Condition::MeasurementIndependence => "mi",
            Condition::AccessibleChoice => "ac",
        }
    }

    pub fn from_short(s: &str) -> Result<Condition> {
        match s {
            "pi" => Ok(Condition::ParameterIndependence),
            "oi" => Ok(Condition::OutcomeIndependence),
            "lc" => Ok(Condition::LocalCausality),
            "det" => Ok(Condition::Determinism),
            "mi" => Ok(Condition::MeasurementIndependence),
            "ac" => Ok(Condition::AccessibleChoice),
            other => Err(Error::Validation(format!("unknown condition {other:?}"))),
        }
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// One failed equality (or positivity) instance.
#[derive(Clone, Debug)]
pub struct ConditionWitness {
    pub location: String,
    pub lhs: Value,
    pub rhs: Value,
    pub deviation: Value,
}

/// Verdict of a condition check; fail ⟺ witnesses nonempty.
#[derive(Clone, Debug)]
pub struct ConditionReport {
    pub condition: Condition,
    pub mode: ValueMode,
    pub witnesses: Vec<ConditionWitness>,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.witnesses.is_empty()
    }

    fn new(condition: Condition, mode: ValueMode) -> Self {
        ConditionReport { condition, mode, witnesses: Vec::new() }
    }

    fn witness(&mut self, location: String, lhs: Value, rhs: Value) {
        let deviation = (&lhs - &rhs).abs();
        self.witnesses.push(ConditionWitness { location, lhs, rhs, deviation });
    }
}

impl HiddenVariableModel {
    /// Build a model by evaluating closures on every index.
    pub fn from_fns(
        scenario: Scenario,
        mode: ValueMode,
        lambdas: Vec<String>,
        prior: impl Fn(usize) -> Value,
        weight: impl Fn(&JointSetting, usize) -> Value,
        response: impl Fn(&JointSetting, usize, &JointOutcome) -> Value,
    ) -> HiddenVariableModel {
        let prior_vec: Vec<Value> = (0..lambdas.len()).map(&prior).collect();
        let mut setting_weights = BTreeMap::new();
        let mut resp = BTreeMap::new();
        for s in scenario.joint_settings() {
            for l in 0..lambdas.len() {
                setting_weights.insert((s.clone(), l), weight(&s, l));
                for o in scenario.joint_outcomes(&s) {
                    resp.insert((s.clone(), l, o.clone()), response(&s, l, &o));
                }
            }
        }
        HiddenVariableModel {
            scenario,
            mode,
            lambdas,
            prior: prior_vec,
            setting_weights,
            response: resp,
        }
    }

    pub fn weight(&self, settings: &JointSetting, lambda: usize) -> Result<&Value> {
        self.setting_weights
            .get(&(settings.clone(), lambda))
            .ok_or_else(|| Error::MissingEntry(format!("p({:?}|λ{lambda})", settings)))
    }

    pub fn response_at(
        &self,
        settings: &JointSetting,
        lambda: usize,
        outcomes: &JointOutcome,
    ) -> Result<&Value> {
        self.response
            .get(&(settings.clone(), lambda, outcomes.clone()))
            .ok_or_else(|| {
                Error::MissingEntry(format!("p({:?}|{:?},λ{lambda})", outcomes, settings))
            })
    }

    /// λ indices with positive prior.
    pub fn supported_lambdas(&self) -> Vec<usize> {
        (0..self.lambdas.len())
            .filter(|&l| self.mode.is_positive(&self.prior[l]))
            .collect()
    }

    /// Joint settings with positive weight under λ.
    pub fn supported_settings(&self, lambda: usize) -> Result<Vec<JointSetting>> {
        let mut out = Vec::new();
        for s in self.scenario.joint_settings() {
            if self.mode.is_positive(self.weight(&s, lambda)?) {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Normalization and nonnegativity of the model's three tables.
    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        if self.prior.len() != self.lambdas.len() {
            return Err(Error::Validation("prior length != number of lambdas".into()));
        }
        let mut total = self.mode.zero();
        for (l, p) in self.prior.iter().enumerate() {
            if !self.mode.is_nonnegative(p) {
                return Err(Error::Validation(format!("negative prior at λ{l}")));
            }
            total = &total + p;
        }
        if !self.mode.is_one(&total) {
            return Err(Error::Validation(format!("prior sums to {total}, not 1")));
        }
        for l in self.supported_lambdas() {
            let mut wsum = self.mode.zero();
            for s in self.scenario.joint_settings() {
                let w = self.weight(&s, l)?;
                if !self.mode.is_nonnegative(w) {
                    return Err(Error::Validation(format!(
                        "negative setting weight at {} λ{l}",
                        self.scenario.describe_settings(&s)
                    )));
                }
                wsum = &wsum + w;
            }
            if !self.mode.is_one(&wsum) {
                return Err(Error::Validation(format!(
                    "setting weights for λ{l} sum to {wsum}, not 1"
                )));
            }
            for s in self.supported_settings(l)? {
                let mut rsum = self.mode.zero();
                for o in self.scenario.joint_outcomes(&s) {
                    let r = self.response_at(&s, l, &o)?;
                    if !self.mode.is_nonnegative(r) {
                        return Err(Error::Validation(format!(
                            "negative response at {} λ{l}",
                            self.scenario.describe_point(&s, &o)
                        )));
                    }
                    rsum = &rsum + r;
                }
                if !self.mode.is_one(&rsum) {
                    return Err(Error::Validation(format!(
                        "responses at {} λ{l} sum to {rsum}, not 1",
                        self.scenario.describe_settings(&s)
                    )));
                }
            }
        }
        Ok(())
    }

    /// p(x,y) = Σ_λ p(λ) p(x,y|λ).
    pub fn setting_probability(&self, settings: &JointSetting) -> Result<Value> {
        let mut total = self.mode.zero();
        for l in 0..self.lambdas.len() {
            total = &total + &(&self.prior[l] * self.weight(settings, l)?);
        }
        Ok(total)
    }

    /// p(λ|x,y) by Bayes; errors if p(x,y) = 0.
    pub fn posterior(&self, settings: &JointSetting) -> Result<Vec<Value>> {
        let pxy = self.setting_probability(settings)?;
        if !self.mode.is_positive(&pxy) {
            return Err(Error::UndefinedConditional(self.scenario.describe_settings(settings)));
        }
        (0..self.lambdas.len())
            .map(|l| Ok(&(&self.prior[l] * self.weight(settings, l)?) / &pxy))
            .collect()
    }

    /// Observed behavior p(a,b|x,y) = Σ_λ p(a,b|x,y,λ) p(λ|x,y).
    pub fn reconstruct_behavior(&self) -> Result<Behavior> {
        let mut table = BTreeMap::new();
        for s in self.scenario.joint_settings() {
            let posterior = self.posterior(&s)?;
            for o in self.scenario.joint_outcomes(&s) {
                let mut p = self.mode.zero();
                for (l, post) in posterior.iter().enumerate() {
                    if self.mode.is_zero(post) {
                        continue;
                    }
                    p = &p + &(self.response_at(&s, l, &o)? * post);
                }
                table.insert((s.clone(), o), p);
            }
        }
        Ok(Behavior::new(self.scenario.clone(), self.mode, table))
    }

    /// Marginal response of one party under (settings, λ).
    pub fn response_marginal(
        &self,
        settings: &JointSetting,
        lambda: usize,
        party: usize,
    ) -> Result<Vec<Value>> {
        let n = self.scenario.setting(party, settings[party])?.outcomes.len();
        let mut dist = vec![self.mode.zero(); n];
        for o in self.scenario.joint_outcomes(settings) {
            dist[o[party]] = &dist[o[party]] + self.response_at(settings, lambda, &o)?;
        }
        Ok(dist)
    }

    /// Parameter independence: each party's λ-conditioned marginal response is
    /// independent of the other parties' settings, on the support of λ.
    pub fn check_parameter_independence(&self) -> Result<ConditionReport> {
        let mut report = ConditionReport::new(Condition::ParameterIndependence, self.mode);
        for l in self.supported_lambdas() {
            let contexts = self.supported_settings(l)?;
            for party in 0..self.scenario.num_parties() {
                for i in 0..contexts.len() {
                    for j in (i + 1)..contexts.len() {
                        if contexts[i][party] != contexts[j][party] {
                            continue;
                        }
                        let ma = self.response_marginal(&contexts[i], l, party)?;
                        let mb = self.response_marginal(&contexts[j], l, party)?;
                        for (outcome, (va, vb)) in ma.iter().zip(mb.iter()).enumerate() {
                            if !self.mode.eq(va, vb) {
                                report.witness(
                                    format!(
                                        "λ={} party {} outcome {} contexts {} vs {}",
                                        self.lambdas[l],
                                        self.scenario.parties[party].label,
                                        outcome,
                                        self.scenario.describe_settings(&contexts[i]),
                                        self.scenario.describe_settings(&contexts[j]),
                                    ),
                                    va.clone(),
                                    vb.clone(),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(report)
    }

    /// Outcome independence: the joint response factorizes into its own
    /// per-party marginals for every supported (x,y,λ).
    pub fn check_outcome_independence(&self) -> Result<ConditionReport> {
        let mut report = ConditionReport::new(Condition::OutcomeIndependence, self.mode);
        for l in self.supported_lambdas() {
            for s in self.supported_settings(l)? {
                let marginals: Vec<Vec<Value>> = (0..self.scenario.num_parties())
                    .map(|p| self.response_marginal(&s, l, p))
                    .collect::<Result<_>>()?;
                for o in self.scenario.joint_outcomes(&s) {
                    let joint = self.response_at(&s, l, &o)?;
                    let mut product = self.mode.one();
                    for (party, &oi) in o.iter().enumerate() {
                        product = &product * &marginals[party][oi];
                    }
                    if !self.mode.eq(joint, &product) {
                        report.witness(
                            format!("λ={} at {}", self.lambdas[l], self.scenario.describe_point(&s, &o)),
                            joint.clone(),
                            product,
                        );
                    }
                }
            }
        }
        Ok(report)
    }

    /// Local causality: the joint response equals the product of per-party
    /// marginals that are independent of the other parties' settings.
    /// Equivalent to PI ∧ OI.
    pub fn check_local_causality(&self) -> Result<ConditionReport> {
        let pi = self.check_parameter_independence()?;
        let oi = self.check_outcome_independence()?;
        let mut report = ConditionReport::new(Condition::LocalCausality, self.mode);
        report.witnesses.extend(pi.witnesses);
        report.witnesses.extend(oi.witnesses);
        Ok(report)
    }

    /// Outcome determinism: every response probability is 0 or 1 on the support.
    pub fn check_determinism(&self) -> Result<ConditionReport> {
        let mut report = ConditionReport::new(Condition::Determinism, self.mode);
        for l in self.supported_lambdas() {
            for s in self.supported_settings(l)? {
                for o in self.scenario.joint_outcomes(&s) {
                    let r = self.response_at(&s, l, &o)?;
                    if !self.mode.is_zero(r) && !self.mode.is_one(r) {
                        let nearest = if r.to_f64() < 0.5 { self.mode.zero() } else { self.mode.one() };
                        report.witness(
                            format!("λ={} at {}", self.lambdas[l], self.scenario.describe_point(&s, &o)),
                            r.clone(),
                            nearest,
                        );
                    }
                }
            }
        }
        Ok(report)
    }

    /// Measurement independence: p(λ|x,y) is the same distribution for every
    /// setting pair. Requires p(x,y) > 0 for all pairs.
    pub fn check_measurement_independence(&self) -> Result<ConditionReport> {
        let mut report = ConditionReport::new(Condition::MeasurementIndependence, self.mode);
        let contexts = self.scenario.joint_settings();
        let reference = self.posterior(&contexts[0])?;
        for s in contexts.iter().skip(1) {
            let post = self.posterior(s)?;
            for (l, (va, vb)) in reference.iter().zip(post.iter()).enumerate() {
                if !self.mode.eq(va, vb) {
                    report.witness(
                        format!(
                            "p(λ={}|{}) vs p(λ={}|{})",
                            self.lambdas[l],
                            self.scenario.describe_settings(&contexts[0]),
                            self.lambdas[l],
                            self.scenario.describe_settings(s),
                        ),
                        va.clone(),
                        vb.clone(),
                    );
                }
            }
        }
        Ok(report)
    }

    /// Accessible choice: p(x,y|λ) > 0 for every setting pair and supported λ.
    pub fn check_accessible_choice(&self) -> Result<ConditionReport> {
        let mut report = ConditionReport::new(Condition::AccessibleChoice, self.mode);
        for l in self.supported_lambdas() {
            for s in self.scenario.joint_settings() {
                let w = self.weight(&s, l)?;
                if !self.mode.is_positive(w) {
                    report.witness(
                        format!(
                            "p({}|λ={}) not positive",
                            self.scenario.describe_settings(&s),
                            self.lambdas[l]
                        ),
                        w.clone(),
                        self.mode.zero(),
                    );
                }
            }
        }
        Ok(report)
    }

    pub fn check(&self, condition: Condition) -> Result<ConditionReport> {
        match condition {
            Condition::ParameterIndependence => self.check_parameter_independence(),
            Condition::OutcomeIndependence => self.check_outcome_independence(),
            Condition::LocalCausality => self.check_local_causality(),
            Condition::Determinism => self.check_determinism(),
            Condition::MeasurementIndependence => self.check_measurement_independence(),
            Condition::AccessibleChoice => self.check_accessible_choice(),
        }
    }
}

/// Result of one conditioning-Lemma check.
#[derive(Clone, Debug)]
pub struct LemmaVerdict {
    /// The computed conditional p(u|v,w).
    pub conditional: Vec<Value>,
    /// The point of the original point mass.
    pub point: usize,
    /// True iff the conditional is a point mass at the same point.
    pub preserved: bool,
}

/// The conditioning Lemma: a deterministic conditional p(u|v) stays
/// deterministic (same point) after conditioning on any compatible w.
///
/// `p_u` is p(u|v), `p_w` is p(w|v), `joint[u][w]` is p(u,w|v); `w` selects
/// the conditioning event. A zero p(w|v) is an incompatibility error, not a
/// Lemma failure.
pub fn condition_preserves_determinism(
    mode: &ValueMode,
    p_u: &[Value],
    p_w: &[Value],
    joint: &[Vec<Value>],
    w: usize,
) -> Result<LemmaVerdict> {
    if joint.len() != p_u.len() || joint.iter().any(|row| row.len() != p_w.len()) {
        return Err(Error::Validation("joint table shape mismatch".into()));
    }
    let point = p_u
        .iter()
        .position(|p| mode.is_one(p))
        .ok_or_else(|| Error::Precondition("p(u|v) is not deterministic".into()))?;
    for (u, p) in p_u.iter().enumerate() {
        if u != point && !mode.is_zero(p) {
            return Err(Error::Precondition("p(u|v) is not deterministic".into()));
        }
        // Marginal consistency of the joint with p(u|v).
        let mut row = mode.zero();
        for v in &joint[u] {
            row = &row + v;
        }
        if !mode.eq(&row, p) {
            return Err(Error::Precondition(format!(
                "joint marginal over w at u={u} is {row}, expected {p}"
            )));
        }
    }
    let mut pw = mode.zero();
    for row in joint {
        pw = &pw + &row[w];
    }
    if !mode.eq(&pw, &p_w[w]) {
        return Err(Error::Precondition(format!(
            "joint marginal at w={w} is {pw}, expected {}",
            p_w[w]
        )));
    }
    if !mode.is_positive(&pw) {
        return Err(Error::Incompatible(format!("w={w} given v")));
    }
    let conditional: Vec<Value> = joint.iter().map(|row| &row[w] / &pw).collect();
    let preserved = conditional
        .iter()
        .enumerate()
        .all(|(u, p)| if u == point { mode.is_one(p) } else { mode.is_zero(p) });
    Ok(LemmaVerdict { conditional, point, preserved })
}

/// Uniform p(x,y|λ) over all joint settings.
pub fn uniform_weight(scenario: &Scenario) -> Value {
    Value::exact(1, scenario.joint_settings().len() as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Scenario;

    /// Single-λ model whose response is the given closure.
    fn single_lambda_model(
        response: impl Fn(&JointSetting, &JointOutcome) -> Value,
    ) -> HiddenVariableModel {
        let scenario = Scenario::chsh();
        let w = uniform_weight(&scenario);
        HiddenVariableModel::from_fns(
            scenario,
            ValueMode::Exact,
            vec!["λ0".into()],
            |_| Value::exact_int(1),
            move |_, _| w.clone(),
            move |s, _, o| response(s, o),
        )
    }

    fn product_half_model() -> HiddenVariableModel {
        single_lambda_model(|_, _| Value::exact(1, 4))
    }

    #[test]
    fn single_lambda_model_reconstructs_response() {
        let m = product_half_model();
        m.validate().unwrap();
        let b = m.reconstruct_behavior().unwrap();
        for s in b.scenario.joint_settings() {
            for o in b.scenario.joint_outcomes(&s) {
                assert!(b.mode.eq(b.get(&s, &o).unwrap(), &Value::exact(1, 4)));
            }
        }
    }

    #[test]
    fn product_response_passes_everything_local() {
        let m = product_half_model();
        assert!(m.check_parameter_independence().unwrap().passes());
        assert!(m.check_outcome_independence().unwrap().passes());
        assert!(m.check_local_causality().unwrap().passes());
        assert!(m.check_measurement_independence().unwrap().passes());
        assert!(m.check_accessible_choice().unwrap().passes());
        assert!(!m.check_determinism().unwrap().passes());
    }

    #[test]
    fn signalling_response_fails_pi() {
        // Party A's outcome is a point mass at σ(y): parameter dependence.
        let m = single_lambda_model(|s, o| {
            let a_target = if s[1] == 0 { 0 } else { 1 };
            if o[0] == a_target && o[1] == 0 {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        });
        m.validate().unwrap();
        let report = m.check_parameter_independence().unwrap();
        assert!(!report.passes());
    }

    #[test]
    fn deterministic_model_passes_oi_and_det() {
        let m = single_lambda_model(|_, o| {
            if o == &vec![0, 0] {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        });
        assert!(m.check_outcome_independence().unwrap().passes());
        assert!(m.check_determinism().unwrap().passes());
        assert!(m.check_local_causality().unwrap().passes());
    }

    #[test]
    fn mi_passes_for_uniform_weights_and_single_lambda() {
        let m = product_half_model();
        assert!(m.check_measurement_independence().unwrap().passes());
    }

    #[test]
    fn superdeterministic_weights_fail_ac() {
        // One allowed setting pair per λ.
        let scenario = Scenario::chsh();
        let contexts = scenario.joint_settings();
        let n = contexts.len() as i64;
        let m = HiddenVariableModel::from_fns(
            scenario,
            ValueMode::Exact,
            (0..contexts.len()).map(|i| format!("λ{i}")).collect(),
            move |_| Value::exact(1, n),
            {
                let contexts = contexts.clone();
                move |s, l| {
                    if s == &contexts[l] {
                        Value::exact_int(1)
                    } else {
                        Value::exact_int(0)
                    }
                }
            },
            |_, _, _| Value::exact(1, 4),
        );
        m.validate().unwrap();
        assert!(!m.check_accessible_choice().unwrap().passes());
        assert!(!m.check_measurement_independence().unwrap().passes());
    }

    #[test]
    fn lemma_point_mass_preserved() {
        let mode = ValueMode::Exact;
        let p_u = vec![Value::exact_int(0), Value::exact_int(1)];
        let p_w = vec![Value::exact(1, 3), Value::exact(2, 3)];
        let joint = vec![
            vec![Value::exact_int(0), Value::exact_int(0)],
            vec![Value::exact(1, 3), Value::exact(2, 3)],
        ];
        for w in 0..2 {
            let v = condition_preserves_determinism(&mode, &p_u, &p_w, &joint, w).unwrap();
            assert!(v.preserved);
            assert_eq!(v.point, 1);
        }
    }

    #[test]
    fn lemma_guards_division_by_zero() {
        let mode = ValueMode::Exact;
        let p_u = vec![Value::exact_int(1), Value::exact_int(0)];
        let p_w = vec![Value::exact_int(1), Value::exact_int(0)];
        let joint = vec![
            vec![Value::exact_int(1), Value::exact_int(0)],
            vec![Value::exact_int(0), Value::exact_int(0)],
        ];
        let err = condition_preserves_determinism(&mode, &p_u, &p_w, &joint, 1);
        assert!(matches!(err, Err(Error::Incompatible(_))));
    }

    #[test]
    fn lemma_rejects_nondeterministic_input() {
        let mode = ValueMode::Exact;
        let p_u = vec![Value::exact(1, 2), Value::exact(1, 2)];
        let p_w = vec![Value::exact_int(1)];
        let joint = vec![vec![Value::exact(1, 2)], vec![Value::exact(1, 2)]];
        assert!(matches!(
            condition_preserves_determinism(&mode, &p_u, &p_w, &joint, 0),
            Err(Error::Precondition(_))
        ));
    }
}
