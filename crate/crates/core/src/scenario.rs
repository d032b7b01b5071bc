//! Bell scenarios and observed behaviors: validation, marginals, observed-level
//! no-signalling, perfect-correlation detection, and CHSH evaluation.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::value::{Value, ValueMode};

/// One measurement setting of one party, with its finite outcome alphabet.
#[derive(Clone, Debug, PartialEq)]
pub struct Setting {
    pub label: String,
    pub outcomes: Vec<String>,
}

/// One separated region (party) with its available settings.
#[derive(Clone, Debug, PartialEq)]
pub struct Party {
    pub label: String,
    pub settings: Vec<Setting>,
}

/// A finite Bell scenario for two or three separated regions.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub parties: Vec<Party>,
}

/// One setting index per party.
pub type JointSetting = Vec<usize>;
/// One outcome index per party (relative to that party's chosen setting).
pub type JointOutcome = Vec<usize>;

/// Cartesian product of index ranges `0..dims[i]`, in lexicographic order.
pub fn cartesian(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &d in dims {
        let mut next = Vec::with_capacity(out.len() * d);
        for prefix in &out {
            for i in 0..d {
                let mut v = prefix.clone();
                v.push(i);
                next.push(v);
            }
        }
        out = next;
    }
    out
}

impl Scenario {
    pub fn new(parties: Vec<Party>) -> Result<Scenario> {
        let s = Scenario { parties };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.parties.len() < 2 || self.parties.len() > 3 {
            return Err(Error::Scenario(format!(
                "scenario must have 2 or 3 parties, got {}",
                self.parties.len()
            )));
        }
        for party in &self.parties {
            if party.settings.is_empty() {
                return Err(Error::Scenario(format!("party {} has no settings", party.label)));
            }
            let mut labels: Vec<&str> = party.settings.iter().map(|s| s.label.as_str()).collect();
            labels.sort_unstable();
            labels.dedup();
            if labels.len() != party.settings.len() {
                return Err(Error::Scenario(format!(
                    "duplicate setting labels for party {}",
                    party.label
                )));
            }
            for setting in &party.settings {
                if setting.outcomes.len() < 2 {
                    return Err(Error::Scenario(format!(
                        "setting {} of party {} has fewer than 2 outcomes",
                        setting.label, party.label
                    )));
                }
                let mut o: Vec<&str> = setting.outcomes.iter().map(|s| s.as_str()).collect();
                o.sort_unstable();
                o.dedup();
                if o.len() != setting.outcomes.len() {
                    return Err(Error::Scenario(format!(
                        "duplicate outcome labels in setting {} of party {}",
                        setting.label, party.label
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_parties(&self) -> usize {
        self.parties.len()
    }

    pub fn setting(&self, party: usize, idx: usize) -> Result<&Setting> {
        self.parties
            .get(party)
            .and_then(|p| p.settings.get(idx))
            .ok_or_else(|| Error::Index(format!("party {party} setting {idx}")))
    }

    pub fn setting_index(&self, party: usize, label: &str) -> Result<usize> {
        self.parties
            .get(party)
            .ok_or_else(|| Error::Index(format!("party {party}")))?
            .settings
            .iter()
            .position(|s| s.label == label)
            .ok_or_else(|| Error::Index(format!("setting {label:?} of party {party}")))
    }

    pub fn outcome_index(&self, party: usize, setting: usize, label: &str) -> Result<usize> {
        self.setting(party, setting)?
            .outcomes
            .iter()
            .position(|o| o == label)
            .ok_or_else(|| Error::Index(format!("outcome {label:?} of party {party} setting {setting}")))
    }

    /// All joint settings, lexicographically ordered.
    pub fn joint_settings(&self) -> Vec<JointSetting> {
        let dims: Vec<usize> = self.parties.iter().map(|p| p.settings.len()).collect();
        cartesian(&dims)
    }

    /// All joint outcomes available under a given joint setting.
    pub fn joint_outcomes(&self, settings: &JointSetting) -> Vec<JointOutcome> {
        let dims: Vec<usize> = settings
            .iter()
            .enumerate()
            .map(|(p, &s)| self.parties[p].settings[s].outcomes.len())
            .collect();
        cartesian(&dims)
    }

    pub fn describe_point(&self, settings: &JointSetting, outcomes: &JointOutcome) -> String {
        let s: Vec<String> = settings
            .iter()
            .enumerate()
            .map(|(p, &x)| self.parties[p].settings[x].label.clone())
            .collect();
        let o: Vec<String> = outcomes
            .iter()
            .enumerate()
            .map(|(p, &a)| self.parties[p].settings[settings[p]].outcomes[a].clone())
            .collect();
        format!("({} | {})", o.join(","), s.join(","))
    }

    pub fn describe_settings(&self, settings: &JointSetting) -> String {
        let s: Vec<String> = settings
            .iter()
            .enumerate()
            .map(|(p, &x)| self.parties[p].settings[x].label.clone())
            .collect();
        format!("({})", s.join(","))
    }

    /// True if every outcome of every setting is a ±1 label.
    pub fn all_binary_pm(&self) -> bool {
        self.parties.iter().all(|p| {
            p.settings
                .iter()
                .all(|s| s.outcomes.len() == 2 && s.outcomes.iter().all(|o| pm_value(o).is_some()))
        })
    }

    /// Two parties with `na`/`nb` settings labelled `x_i`/`y_j`, outcomes ±1.
    pub fn binary_pm(na: usize, nb: usize) -> Scenario {
        let make = |prefix: &str, n: usize| -> Vec<Setting> {
            (0..n)
                .map(|i| Setting {
                    label: format!("{prefix}_{i}"),
                    outcomes: vec!["+1".into(), "-1".into()],
                })
                .collect()
        };
        Scenario {
            parties: vec![
                Party { label: "A".into(), settings: make("x", na) },
                Party { label: "B".into(), settings: make("y", nb) },
            ],
        }
    }

    /// The standard 2-setting, 2-outcome CHSH scenario.
    pub fn chsh() -> Scenario {
        Scenario::binary_pm(2, 2)
    }

    /// Three parties, each choosing between X and Y, outcomes ±1.
    pub fn ghz() -> Scenario {
        let settings = || {
            vec![
                Setting { label: "X".into(), outcomes: vec!["+1".into(), "-1".into()] },
                Setting { label: "Y".into(), outcomes: vec!["+1".into(), "-1".into()] },
            ]
        };
        Scenario {
            parties: vec![
                Party { label: "A".into(), settings: settings() },
                Party { label: "B".into(), settings: settings() },
                Party { label: "C".into(), settings: settings() },
            ],
        }
    }
}

/// Parse a ±1 outcome label.
pub fn pm_value(label: &str) -> Option<i8> {
    match label {
        "+1" | "1" => Some(1),
        "-1" => Some(-1),
        _ => None,
    }
}

/// A conditional probability table p(outcomes | settings) over a scenario.
#[derive(Clone, Debug)]
pub struct Behavior {
    pub scenario: Scenario,
    pub mode: ValueMode,
    table: BTreeMap<(JointSetting, JointOutcome), Value>,
}

/// One violated constraint found by `validate_behavior`.
#[derive(Clone, Debug)]
pub enum Violation {
    Negative { settings: JointSetting, outcomes: JointOutcome, value: Value },
    Normalization { settings: JointSetting, total: Value },
}

/// Everything `validate_behavior` found; empty means valid.
#[derive(Clone, Debug, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A no-signalling failure witness: the marginal of `party` at its setting
/// differs between two contexts of the other parties' settings.
#[derive(Clone, Debug)]
pub struct SignallingWitness {
    pub party: usize,
    pub context_a: JointSetting,
    pub context_b: JointSetting,
    pub outcome: usize,
    pub deviation: Value,
}

#[derive(Clone, Debug, Default)]
pub struct NoSignallingReport {
    pub failures: Vec<SignallingWitness>,
}

impl NoSignallingReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

/// A perfectly correlated setting pair (x, y) with its outcome bijection
/// b = f(a). Two-party scenarios only.
#[derive(Clone, Debug, PartialEq)]
pub struct PerfectCorrelation {
    pub x: usize,
    pub y: usize,
    /// Outcome index of party B for each outcome index of party A.
    pub map: Vec<usize>,
}

impl Behavior {
    pub fn new(
        scenario: Scenario,
        mode: ValueMode,
        table: BTreeMap<(JointSetting, JointOutcome), Value>,
    ) -> Behavior {
        Behavior { scenario, mode, table }
    }

    /// Build a behavior by evaluating `f` on every (settings, outcomes) point.
    pub fn from_fn(
        scenario: Scenario,
        mode: ValueMode,
        mut f: impl FnMut(&JointSetting, &JointOutcome) -> Value,
    ) -> Behavior {
        let mut table = BTreeMap::new();
        for s in scenario.joint_settings() {
            for o in scenario.joint_outcomes(&s) {
                let v = f(&s, &o);
                table.insert((s.clone(), o), v);
            }
        }
        Behavior { scenario, mode, table }
    }

    pub fn get(&self, settings: &JointSetting, outcomes: &JointOutcome) -> Result<&Value> {
        self.table
            .get(&(settings.clone(), outcomes.clone()))
            .ok_or_else(|| Error::MissingEntry(self.scenario.describe_point(settings, outcomes)))
    }

    pub fn set(&mut self, settings: JointSetting, outcomes: JointOutcome, p: Value) {
        self.table.insert((settings, outcomes), p);
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(JointSetting, JointOutcome), &Value)> {
        self.table.iter()
    }

    /// Check table coverage, nonnegativity and per-setting normalization.
    /// A missing entry is a structural error; numeric violations are reported.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.scenario.validate()?;
        let mut report = ValidationReport::default();
        for s in self.scenario.joint_settings() {
            let mut total = self.mode.zero();
            for o in self.scenario.joint_outcomes(&s) {
                let p = self.get(&s, &o)?;
                if !self.mode.is_nonnegative(p) {
                    report.violations.push(Violation::Negative {
                        settings: s.clone(),
                        outcomes: o.clone(),
                        value: p.clone(),
                    });
                }
                total = &total + p;
            }
            if !self.mode.is_one(&total) {
                report.violations.push(Violation::Normalization { settings: s.clone(), total });
            }
        }
        Ok(report)
    }

    /// Marginal distribution of one party's outcome under a joint setting.
    pub fn marginal(&self, settings: &JointSetting, party: usize) -> Result<Vec<Value>> {
        if party >= self.scenario.num_parties() {
            return Err(Error::Index(format!("party {party}")));
        }
        let n = self.scenario.setting(party, settings[party])?.outcomes.len();
        let mut dist = vec![self.mode.zero(); n];
        for o in self.scenario.joint_outcomes(settings) {
            let p = self.get(settings, &o)?;
            dist[o[party]] = &dist[o[party]] + p;
        }
        Ok(dist)
    }

    /// Bipartite convenience: both parties' marginals at (x, y).
    pub fn marginals(&self, x: usize, y: usize) -> Result<(Vec<Value>, Vec<Value>)> {
        let s = vec![x, y];
        Ok((self.marginal(&s, 0)?, self.marginal(&s, 1)?))
    }

    /// Observed-level no-signalling: each party's outcome marginal is
    /// independent of every other party's setting.
    pub fn check_no_signalling(&self) -> Result<NoSignallingReport> {
        let mut report = NoSignallingReport::default();
        let all = self.scenario.joint_settings();
        for party in 0..self.scenario.num_parties() {
            for i in 0..all.len() {
                for j in (i + 1)..all.len() {
                    if all[i][party] != all[j][party] {
                        continue;
                    }
                    let ma = self.marginal(&all[i], party)?;
                    let mb = self.marginal(&all[j], party)?;
                    for (outcome, (va, vb)) in ma.iter().zip(mb.iter()).enumerate() {
                        if !self.mode.eq(va, vb) {
                            report.failures.push(SignallingWitness {
                                party,
                                context_a: all[i].clone(),
                                context_b: all[j].clone(),
                                outcome,
                                deviation: (va - vb).abs(),
                            });
                        }
                    }
                }
            }
        }
        Ok(report)
    }

    /// Find every setting pair (x, y) whose outcomes are linked by a bijection
    /// with probability one. Off-support outcomes are matched by the
    /// smallest-label rule. Two-party scenarios only.
    pub fn find_perfect_correlations(&self) -> Result<Vec<PerfectCorrelation>> {
        if self.scenario.num_parties() != 2 {
            return Err(Error::Unsupported(
                "perfect-correlation extraction is defined for two parties".into(),
            ));
        }
        let mut found = Vec::new();
        for s in self.scenario.joint_settings() {
            let (x, y) = (s[0], s[1]);
            let na = self.scenario.setting(0, x)?.outcomes.len();
            let nb = self.scenario.setting(1, y)?.outcomes.len();
            if na != nb {
                continue;
            }
            let marg_a = self.marginal(&s, 0)?;
            let mut map: Vec<Option<usize>> = vec![None; na];
            let mut used = vec![false; nb];
            let mut ok = true;
            for a in 0..na {
                if !self.mode.is_positive(&marg_a[a]) {
                    continue;
                }
                let mut target = None;
                for b in 0..nb {
                    let p = self.get(&s, &vec![a, b])?;
                    if self.mode.is_positive(p) {
                        if target.is_some() {
                            ok = false;
                            break;
                        }
                        target = Some(b);
                    }
                }
                match target {
                    Some(b) if ok => {
                        if used[b] {
                            ok = false; // not injective on the support
                        } else {
                            used[b] = true;
                            map[a] = Some(b);
                        }
                    }
                    _ => ok = false,
                }
                if !ok {
                    break;
                }
            }
            if !ok {
                continue;
            }
            // Smallest-label rule off the support.
            let mut free: Vec<usize> = (0..nb).filter(|b| !used[*b]).collect();
            free.reverse();
            let full: Vec<usize> = map
                .into_iter()
                .map(|m| m.unwrap_or_else(|| free.pop().expect("counts match")))
                .collect();
            found.push(PerfectCorrelation { x, y, map: full });
        }
        Ok(found)
    }

    /// Correlator E(x, y) = Σ a·b·p(a,b|x,y) for ±1 outcomes.
    pub fn correlator(&self, x: usize, y: usize) -> Result<Value> {
        if self.scenario.num_parties() != 2 {
            return Err(Error::Unsupported("correlators are defined for two parties".into()));
        }
        let s = vec![x, y];
        let mut total = self.mode.zero();
        for o in self.scenario.joint_outcomes(&s) {
            let a = pm_value(&self.scenario.setting(0, x)?.outcomes[o[0]]).ok_or_else(|| {
                Error::Unsupported("correlators require ±1 outcome labels".into())
            })?;
            let b = pm_value(&self.scenario.setting(1, y)?.outcomes[o[1]]).ok_or_else(|| {
                Error::Unsupported("correlators require ±1 outcome labels".into())
            })?;
            let p = self.get(&s, &o)?;
            let signed = if a * b > 0 { p.clone() } else { -p.clone() };
            total = &total + &signed;
        }
        Ok(total)
    }

    /// CHSH combination E(x0,y0) + E(x0,y1) + E(x1,y0) − E(x1,y1) with the
    /// coefficient layout (+,+,+,−) fixed on the ordered quad.
    pub fn chsh_value(&self, quad: (usize, usize, usize, usize)) -> Result<Value> {
        let (x0, x1, y0, y1) = quad;
        let e00 = self.correlator(x0, y0)?;
        let e01 = self.correlator(x0, y1)?;
        let e10 = self.correlator(x1, y0)?;
        let e11 = self.correlator(x1, y1)?;
        Ok(&(&(&e00 + &e01) + &e10) - &e11)
    }

    /// Convert a float-mode behavior to exact mode by rounding every entry to
    /// denominator 10^digits and renormalizing each setting context.
    pub fn rationalize(&self, digits: u32) -> Result<Behavior> {
        use crate::value::rationalize_f64;
        use num_traits::Zero;
        let mut table = BTreeMap::new();
        for s in self.scenario.joint_settings() {
            let mut rounded = Vec::new();
            let mut total = num_rational::BigRational::zero();
            for o in self.scenario.joint_outcomes(&s) {
                let mut r = rationalize_f64(self.get(&s, &o)?.to_f64(), digits)?;
                if r < num_rational::BigRational::zero() {
                    r = num_rational::BigRational::zero();
                }
                total += r.clone();
                rounded.push((o, r));
            }
            if total.is_zero() {
                return Err(Error::Validation(format!(
                    "all entries rounded to zero at {}",
                    self.scenario.describe_settings(&s)
                )));
            }
            for (o, r) in rounded {
                table.insert((s.clone(), o), Value::Exact(r / total.clone()));
            }
        }
        Ok(Behavior { scenario: self.scenario.clone(), mode: ValueMode::Exact, table })
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Negative { settings, outcomes, value } => {
                write!(f, "negative entry {value} at settings {settings:?} outcomes {outcomes:?}")
            }
            Violation::Normalization { settings, total } => {
                write!(f, "normalization {total} != 1 at settings {settings:?}")
            }
        }
    }
}

/// The PR-box behavior: p(a,b|x_j,y_k) = ½ when ab = (−1)^{jk}, else 0.
pub fn pr_box_behavior() -> Behavior {
    let scenario = Scenario::chsh();
    Behavior::from_fn(scenario, ValueMode::Exact, |s, o| {
        let (j, k) = (s[0], s[1]);
        let a = if o[0] == 0 { 1i8 } else { -1 };
        let b = if o[1] == 0 { 1i8 } else { -1 };
        let target = if j == 1 && k == 1 { -1 } else { 1 };
        if a * b == target {
            Value::exact(1, 2)
        } else {
            Value::exact_int(0)
        }
    })
}

/// Uniform behavior over a scenario (exact mode).
pub fn uniform_behavior(scenario: Scenario) -> Behavior {
    Behavior::from_fn(scenario.clone(), ValueMode::Exact, |s, _| {
        let n = scenario.joint_outcomes(s).len() as i64;
        Value::exact(1, n)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::sum_values;

    fn sum_table(b: &Behavior, s: &JointSetting) -> Value {
        let parts: Vec<Value> = b
            .scenario
            .joint_outcomes(s)
            .iter()
            .map(|o| b.get(s, o).unwrap().clone())
            .collect();
        sum_values(&b.mode, parts.iter())
    }

    #[test]
    fn pr_box_is_valid_and_normalized() {
        let b = pr_box_behavior();
        let report = b.validate().unwrap();
        assert!(report.is_valid());
        for s in b.scenario.joint_settings() {
            assert!(b.mode.is_one(&sum_table(&b, &s)));
        }
    }

    #[test]
    fn constant_table_normalization_violation() {
        // All entries 0.3 in a 2x2-outcome context: excess 0.2 per (x,y).
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::float_default(), |_, _| {
            Value::Float(0.3)
        });
        let report = b.validate().unwrap();
        assert_eq!(report.violations.len(), 4);
        for v in &report.violations {
            match v {
                Violation::Normalization { total, .. } => {
                    assert!((total.to_f64() - 1.2).abs() < 1e-12)
                }
                _ => panic!("expected normalization violation"),
            }
        }
    }

    #[test]
    fn negative_entry_is_reported() {
        let mut b = pr_box_behavior();
        b.set(vec![0, 0], vec![0, 1], Value::exact(-1, 10));
        let report = b.validate().unwrap();
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Negative { settings, .. } if settings == &vec![0, 0])));
    }

    #[test]
    fn missing_entry_is_structural_error() {
        let scenario = Scenario::chsh();
        let b = Behavior::new(scenario, ValueMode::Exact, BTreeMap::new());
        assert!(matches!(b.validate(), Err(Error::MissingEntry(_))));
    }

    #[test]
    fn pr_box_marginals_are_half() {
        let b = pr_box_behavior();
        for s in b.scenario.joint_settings() {
            for party in 0..2 {
                let m = b.marginal(&s, party).unwrap();
                assert!(b.mode.eq(&m[0], &Value::exact(1, 2)));
                assert!(b.mode.eq(&m[1], &Value::exact(1, 2)));
            }
        }
    }

    #[test]
    fn deterministic_point_mass_marginal() {
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::Exact, |_, o| {
            if o == &vec![0, 0] {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        });
        let (ma, mb) = b.marginals(0, 0).unwrap();
        assert!(b.mode.is_one(&ma[0]));
        assert!(b.mode.is_zero(&ma[1]));
        assert!(b.mode.is_one(&mb[0]));
    }

    #[test]
    fn pr_box_is_no_signalling() {
        let b = pr_box_behavior();
        assert!(b.check_no_signalling().unwrap().passes());
    }

    #[test]
    fn constructed_signalling_behavior_fails_with_witness() {
        // Party A's outcome is a point mass at σ(y): a = +1 if y = y_0 else −1.
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::Exact, |s, o| {
            let a_target = if s[1] == 0 { 0 } else { 1 };
            if o[0] == a_target && o[1] == 0 {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        });
        let report = b.check_no_signalling().unwrap();
        assert!(!report.passes());
        assert!(report.failures.iter().any(|w| w.party == 0));
    }

    #[test]
    fn pr_box_perfect_correlations() {
        let b = pr_box_behavior();
        let pcs = b.find_perfect_correlations().unwrap();
        assert_eq!(pcs.len(), 4);
        for pc in &pcs {
            // b = (−1)^{jk} a: identity map except at (x_1, y_1) where it swaps.
            if pc.x == 1 && pc.y == 1 {
                assert_eq!(pc.map, vec![1, 0]);
            } else {
                assert_eq!(pc.map, vec![0, 1]);
            }
        }
    }

    #[test]
    fn uniform_behavior_has_no_perfect_correlations() {
        let b = uniform_behavior(Scenario::chsh());
        assert!(b.find_perfect_correlations().unwrap().is_empty());
    }

    #[test]
    fn pr_box_chsh_is_four() {
        let b = pr_box_behavior();
        let v = b.chsh_value((0, 1, 0, 1)).unwrap();
        assert!(b.mode.eq(&v, &Value::exact_int(4)));
    }

    #[test]
    fn all_plus_one_behavior_chsh_is_two() {
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::Exact, |_, o| {
            if o == &vec![0, 0] {
                Value::exact_int(1)
            } else {
                Value::exact_int(0)
            }
        });
        let v = b.chsh_value((0, 1, 0, 1)).unwrap();
        assert!(b.mode.eq(&v, &Value::exact_int(2)));
    }

    #[test]
    fn chsh_rejects_non_binary_outcomes() {
        let scenario = Scenario {
            parties: vec![
                Party {
                    label: "A".into(),
                    settings: vec![Setting {
                        label: "x_0".into(),
                        outcomes: vec!["u".into(), "v".into(), "w".into()],
                    }],
                },
                Party {
                    label: "B".into(),
                    settings: vec![Setting {
                        label: "y_0".into(),
                        outcomes: vec!["u".into(), "v".into()],
                    }],
                },
            ],
        };
        let b = uniform_behavior(scenario);
        assert!(matches!(b.correlator(0, 0), Err(Error::Unsupported(_))));
    }

    #[test]
    fn rationalize_renormalizes() {
        let b = Behavior::from_fn(Scenario::chsh(), ValueMode::float_default(), |_, _| {
            Value::Float(0.25)
        });
        let e = b.rationalize(6).unwrap();
        assert!(e.validate().unwrap().is_valid());
        assert!(e.mode.is_exact());
    }
}
